//! Decreasing profile functions `f` describing `E = {|y| < f(|x|)}`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{hermite, pchip_slopes};

/// Largest excursion of a Hermite panel outside `[f1, f0]`, relative to the
/// panel drop, before its end slopes are declared inconsistent. Exact slopes of
/// a smooth profile with `f' ~ -r^(alpha+1)` at the origin overshoot by a few
/// percent on the first panel; inconsistent slopes overshoot by multiples.
pub const MAX_PANEL_OVERSHOOT: f64 = 0.5;
/// Slack for the non-increasing check on values, relative to `max f`.
const MONOTONE_SLACK: f64 = 1e-12;

/// How the profile is continued between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Interp {
    /// Piecewise cubic Hermite on the given (or monotone-cubic) slopes.
    #[default]
    Cubic,
    /// Piecewise linear: the profile is exactly the polyline through the nodes.
    Linear,
}

/// Sampled profile on `[0, r0]` with `r0` the last node.
///
/// The value at `r0` is normally `0`. A positive last value is read as a
/// vertical wall: the set is `{|y| < f(|x|), |x| < r0}` and its boundary
/// contains the cylinder `|x| = r0, |y| < f(r0-)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Option<Vec<f64>>,
    kind: Interp,
    // slopes actually used by the interpolant
    eff: Vec<f64>,
}

impl Profile {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, slopes: Option<Vec<f64>>) -> Result<Self> {
        Self::with_kind(nodes, values, slopes, Interp::Cubic)
    }

    /// The polyline through `(r_i, f_i)`.
    pub fn piecewise_linear(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_kind(nodes, values, None, Interp::Linear)
    }

    /// Sample `f` and `f'` at the given nodes.
    pub fn from_fn(
        nodes: Vec<f64>,
        f: impl Fn(f64) -> f64,
        fp: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = nodes.iter().map(|&r| f(r)).collect();
        let slopes = nodes.iter().map(|&r| fp(r)).collect();
        Self::new(nodes, values, Some(slopes))
    }

    pub fn with_kind(
        nodes: Vec<f64>,
        values: Vec<f64>,
        slopes: Option<Vec<f64>>,
        kind: Interp,
    ) -> Result<Self> {
        validate(&nodes, &values, slopes.as_deref())?;
        let eff = match kind {
            Interp::Linear => {
                let mut d: Vec<f64> = nodes
                    .windows(2)
                    .zip(values.windows(2))
                    .map(|(r, f)| (f[1] - f[0]) / (r[1] - r[0]))
                    .collect();
                d.push(*d.last().expect("at least one panel"));
                d
            }
            Interp::Cubic => match &slopes {
                Some(s) => s.clone(),
                None => pchip_slopes(&nodes, &values),
            },
        };
        Ok(Profile { nodes, values, slopes, kind, eff })
    }

    pub fn r0(&self) -> f64 {
        *self.nodes.last().expect("validated")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// User-supplied slopes, if any.
    pub fn slopes(&self) -> Option<&[f64]> {
        self.slopes.as_deref()
    }

    /// Slopes used by the interpolant (given, monotone-cubic, or secant).
    pub fn effective_slopes(&self) -> &[f64] {
        &self.eff
    }

    pub fn kind(&self) -> Interp {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Height of the vertical wall at `r0` (zero for a profile closing on the axis).
    pub fn wall_height(&self) -> f64 {
        *self.values.last().expect("validated")
    }

    /// Value and slope of the interpolant on panel `i` at `r`.
    pub(crate) fn eval_panel(&self, i: usize, r: f64) -> (f64, f64) {
        let (r0, r1) = (self.nodes[i], self.nodes[i + 1]);
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        match self.kind {
            Interp::Linear => {
                let m = (f1 - f0) / (r1 - r0);
                (f0 + m * (r - r0), m)
            }
            Interp::Cubic => {
                // an infinite end slope (vertical tangent at r0) is replaced by the
                // steepest slope that keeps the cubic monotone
                let sec = (f1 - f0) / (r1 - r0);
                let fin = |d: f64| if d.is_finite() { d } else { 3.0 * sec };
                hermite(r0, r1, f0, f1, fin(self.eff[i]), fin(self.eff[i + 1]), r)
            }
        }
    }

    /// Value and slope of the interpolant at `r` (clamped to `[0, r0]`).
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let n = self.nodes.len();
        let r = r.clamp(0.0, self.r0());
        match self.nodes.binary_search_by(|v| v.total_cmp(&r)) {
            Ok(i) => (self.values[i], self.eff[i]),
            Err(i) => self.eval_panel((i - 1).min(n - 2), r),
        }
    }

    /// Write `r,f[,fp]` CSV, one row per node.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let map = |e: csv::Error| Error::Io(std::io::Error::other(e));
        match &self.slopes {
            Some(s) => {
                wr.write_record(["r", "f", "fp"]).map_err(map)?;
                for i in 0..self.len() {
                    wr.write_record([
                        self.nodes[i].to_string(),
                        self.values[i].to_string(),
                        s[i].to_string(),
                    ])
                    .map_err(map)?;
                }
            }
            None => {
                wr.write_record(["r", "f"]).map_err(map)?;
                for i in 0..self.len() {
                    wr.write_record([self.nodes[i].to_string(), self.values[i].to_string()])
                        .map_err(map)?;
                }
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }

    /// Parse `r,f[,fp]` CSV. Errors carry the 1-based line number.
    pub fn read_csv<R: Read>(rd: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(rd);
        let headers = reader
            .headers()
            .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
            .clone();
        let cols: Vec<&str> = headers.iter().collect();
        let with_slopes = match cols.as_slice() {
            ["r", "f"] => false,
            ["r", "f", "fp"] => true,
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected header `r,f[,fp]`, found `{}`", cols.join(",")),
                })
            }
        };
        let (mut nodes, mut values, mut slopes) = (Vec::new(), Vec::new(), Vec::new());
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                msg: e.to_string(),
            })?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            let field = |j: usize| -> Result<f64> {
                let s = rec.get(j).unwrap_or("");
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("column {} is not a number: `{s}`", j + 1),
                })
            };
            nodes.push(field(0)?);
            values.push(field(1)?);
            if with_slopes {
                slopes.push(field(2)?);
            }
        }
        Profile::new(nodes, values, with_slopes.then_some(slopes))
    }
}

fn validate(nodes: &[f64], values: &[f64], slopes: Option<&[f64]>) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidProfile(m));
    if nodes.len() < 2 {
        return bad(format!("need at least two nodes, got {}", nodes.len()));
    }
    if nodes.len() != values.len() {
        return bad("nodes and values differ in length".into());
    }
    if nodes[0] != 0.0 {
        return bad(format!("first node must be 0, got {}", nodes[0]));
    }
    for (i, w) in nodes.windows(2).enumerate() {
        if !(w[1].is_finite() && w[1] > w[0]) {
            return bad(format!("nodes not strictly increasing at index {}", i + 1));
        }
    }
    let top = values.iter().cloned().fold(0.0f64, f64::max);
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return bad(format!("value {v} at index {i} is not a finite nonnegative number"));
        }
    }
    for (i, w) in values.windows(2).enumerate() {
        if w[1] > w[0] + MONOTONE_SLACK * top {
            return bad(format!(
                "profile increases between nodes {i} and {} ({} -> {})",
                i + 1,
                w[0],
                w[1]
            ));
        }
    }
    if let Some(s) = slopes {
        if s.len() != nodes.len() {
            return bad("slopes and nodes differ in length".into());
        }
        let n = s.len();
        for (i, &d) in s.iter().enumerate() {
            let last_vertical = i == n - 1 && d == f64::NEG_INFINITY && values[n - 1] == 0.0;
            if !(d.is_finite() || last_vertical) {
                return bad(format!("slope {d} at index {i} is not finite"));
            }
            if d > 0.0 {
                return bad(format!("slope {d} at index {i} is positive"));
            }
        }
        for i in 0..n - 1 {
            if !hermite_monotone(values[i], values[i + 1], nodes[i + 1] - nodes[i], s[i], s[i + 1]) {
                return bad(format!(
                    "slopes ({}, {}) give a non-monotone cubic on panel {i}",
                    s[i],
                    s[i + 1]
                ));
            }
        }
    }
    Ok(())
}

/// Whether the Hermite cubic on one panel stays within `MAX_PANEL_OVERSHOOT`
/// of the panel drop outside `[f1, f0]`.
fn hermite_monotone(f0: f64, f1: f64, dr: f64, a: f64, b: f64) -> bool {
    let drop = f0 - f1;
    if !(a.is_finite() && b.is_finite()) {
        // a vertical end is only allowed at r0; the cubic is evaluated with a bounded surrogate
        return true;
    }
    // below the resolution of the values the shape of the cubic is noise
    let tiny = 16.0 * f64::EPSILON * f0.abs().max(f1.abs());
    if drop.abs() <= tiny && (a.abs() + b.abs()) * dr <= tiny {
        return true;
    }
    if drop <= 0.0 {
        // flat panel: only flat end slopes keep it flat
        return a == 0.0 && b == 0.0;
    }
    // normalized cubic H(t) = al t + (3 - 2 al - be) t^2 + (al + be - 2) t^3
    let dd = -drop / dr;
    let (al, be) = (a / dd, b / dd);
    let (c2, c3) = (3.0 - 2.0 * al - be, al + be - 2.0);
    let hval = |t: f64| t * (al + t * (c2 + t * c3));
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // critical points of H: al + 2 c2 t + 3 c3 t^2 = 0
    let mut crit = Vec::with_capacity(2);
    if c3.abs() > 1e-300 {
        let disc = c2 * c2 - 3.0 * al * c3;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            crit.push((-c2 + sq) / (3.0 * c3));
            crit.push((-c2 - sq) / (3.0 * c3));
        }
    } else if c2.abs() > 1e-300 {
        crit.push(-al / (2.0 * c2));
    }
    for t in crit {
        if (0.0..=1.0).contains(&t) {
            let v = hval(t);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (hi - 1.0).max(-lo) <= MAX_PANEL_OVERSHOOT
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pansu(n: usize) -> Profile {
        let nodes: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64).sin())
            .map(|r: f64| r.min(1.0))
            .collect();
        Profile::from_fn(
            nodes,
            |r| 0.5 * (r.acos() + r * (1.0 - r * r).max(0.0).sqrt()),
            |r| if r >= 1.0 { f64::NEG_INFINITY } else { -r * r / (1.0 - r * r).sqrt() },
        )
        .unwrap()
    }

    #[test]
    fn rejects_increasing_values() {
        let e = Profile::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.5, 0.0], None);
        assert!(matches!(e, Err(Error::InvalidProfile(_))));
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(Profile::new(vec![0.1, 1.0], vec![1.0, 0.0], None).is_err());
        assert!(Profile::new(vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0], None).is_err());
        assert!(Profile::new(vec![0.0], vec![1.0], None).is_err());
        assert!(Profile::new(vec![0.0, 1.0], vec![f64::NAN, 0.0], None).is_err());
    }

    #[test]
    fn rejects_inconsistent_slopes() {
        let e = Profile::new(vec![0.0, 1.0, 2.0], vec![2.0, 1.0, 0.0], Some(vec![-1.0, -30.0, -1.0]));
        assert!(e.is_err());
        let e = Profile::new(vec![0.0, 1.0], vec![1.0, 0.0], Some(vec![0.5, -1.0]));
        assert!(e.is_err());
    }

    #[test]
    fn interpolation_hits_nodes() {
        let p = pansu(50);
        for (r, f) in p.nodes().iter().zip(p.values()) {
            assert!((p.eval(*r).0 - f).abs() < 1e-15);
        }
        assert_eq!(p.wall_height(), 0.0);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let p = pansu(17);
        let text = p.to_csv_string();
        assert!(text.starts_with("r,f,fp\n"));
        let q = Profile::read_csv(text.as_bytes()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn csv_reports_line_numbers() {
        let text = "r,f\n0,1\n0.5,oops\n1,0\n";
        match Profile::read_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "x,y\n0,1\n";
        assert!(matches!(Profile::read_csv(text.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }
}
