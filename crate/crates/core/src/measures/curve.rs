use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::quad::integrate;
use crate::spaces::Params;

/// Closed polygon in the quadrant `r, s >= 0`, bounding the generating set of
/// an `x`- and `y`-spherically symmetric set. The last vertex connects back
/// to the first. Edges lying on `r = 0` or `s = 0` are symmetry axes of the
/// full set, not boundary, and carry no perimeter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingCurve {
    vertices: Vec<(f64, f64)>,
}

impl GeneratingCurve {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidCurve(m));
        if vertices.len() < 3 {
            return bad(format!("need at least 3 vertices, got {}", vertices.len()));
        }
        for (i, &(r, s)) in vertices.iter().enumerate() {
            if !(r.is_finite() && s.is_finite() && r >= 0.0 && s >= 0.0) {
                return bad(format!("vertex {i} = ({r}, {s}) outside the closed quadrant"));
            }
        }
        let c = GeneratingCurve { vertices };
        if c.signed_area().abs() <= 0.0 {
            return bad("enclosed area is zero".into());
        }
        if let Some((a, b)) = c.find_self_intersection() {
            return bad(format!("segments {a} and {b} intersect"));
        }
        Ok(c)
    }

    /// Polygon bounded by the graph of `profile` and the two axes.
    pub fn from_profile_graph(profile: &Profile) -> Result<Self> {
        let mut v: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        v.extend(profile.nodes().iter().cloned().zip(profile.values().iter().cloned()));
        if profile.wall_height() > 0.0 {
            v.push((profile.r0(), 0.0));
        }
        Self::new(v)
    }

    /// Axis-aligned rectangle `[0, a] x [0, b]`.
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(0.0, 0.0), (a, 0.0), (a, b), (0.0, b)])
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area of the polygon in the `(r, s)` plane.
    pub fn signed_area(&self) -> f64 {
        0.5 * self
            .segments()
            .map(|((r0, s0), (r1, s1))| r0 * s1 - r1 * s0)
            .sum::<f64>()
    }

    fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        let segs: Vec<_> = self.segments().collect();
        let mut order: Vec<usize> = (0..n).collect();
        let lo = |i: usize| segs[i].0 .0.min(segs[i].1 .0);
        let hi = |i: usize| segs[i].0 .0.max(segs[i].1 .0);
        order.sort_by(|&a, &b| lo(a).total_cmp(&lo(b)));
        for (p, &a) in order.iter().enumerate() {
            for &b in &order[p + 1..] {
                if lo(b) > hi(a) {
                    break;
                }
                let adjacent = (a + 1) % n == b || (b + 1) % n == a;
                if segments_intersect(segs[a], segs[b], adjacent) {
                    return Some((a.min(b), a.max(b)));
                }
            }
        }
        None
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(p: (f64, f64), q: (f64, f64), x: (f64, f64)) -> bool {
    x.0 >= p.0.min(q.0) && x.0 <= p.0.max(q.0) && x.1 >= p.1.min(q.1) && x.1 <= p.1.max(q.1)
}

/// Proper or touching intersection; adjacent segments may share their common
/// vertex but must not overlap along a stretch.
fn segments_intersect(
    (p1, p2): ((f64, f64), (f64, f64)),
    (q1, q2): ((f64, f64), (f64, f64)),
    adjacent: bool,
) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if adjacent {
        // only collinear back-tracking counts
        if d1 == 0.0 && d2 == 0.0 {
            let shared = if p2 == q1 || p2 == q2 { p2 } else { p1 };
            let other_p = if shared == p1 { p2 } else { p1 };
            let other_q = if shared == q1 { q2 } else { q1 };
            let dp = (other_p.0 - shared.0, other_p.1 - shared.1);
            let dq = (other_q.0 - shared.0, other_q.1 - shared.1);
            return dp.0 * dq.0 + dp.1 * dq.1 > 0.0;
        }
        return false;
    }
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// `int |(N_r, r^alpha N_s)| r^(h-1) s^(k-1) dH^1` along one segment, without `c_hk`.
///
/// Axis-aligned segments use closed-form antiderivatives; others are
/// integrated adaptively in the segment parameter. Segments on an axis give 0.
pub(crate) fn segment_weight(params: &Params, a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    let (h, k, al) = (params.h as i32, params.k as i32, params.alpha);
    let ((r0, s0), (r1, s1)) = (a, b);
    if (r0 == 0.0 && r1 == 0.0) || (s0 == 0.0 && s1 == 0.0) {
        return Ok(0.0);
    }
    if s0 == s1 {
        let e = h as f64 + al;
        return Ok(s0.powi(k - 1) * (r1.powf(e) - r0.powf(e)).abs() / e);
    }
    if r0 == r1 {
        return Ok(r0.powi(h - 1) * (s1.powi(k) - s0.powi(k)).abs() / k as f64);
    }
    let (dr, ds) = (r1 - r0, s1 - s0);
    integrate(
        |t| {
            let r = r0 + t * dr;
            let s = s0 + t * ds;
            (ds * ds + r.powf(2.0 * al) * dr * dr).sqrt() * r.powi(h - 1) * s.powi(k - 1)
        },
        0.0,
        1.0,
        1e-15,
        1e-14,
    )
}

/// Alpha-perimeter of the set generated by `curve`.
pub fn perimeter_curve(params: &Params, curve: &GeneratingCurve) -> Result<f64> {
    params.validate()?;
    let mut acc = 0.0;
    for (a, b) in curve.segments() {
        acc += segment_weight(params, a, b)?;
    }
    Ok(params.c_hk() * acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_and_rectangle() {
        let p = Params::new(1, 1, 1.0).unwrap();
        let sq = GeneratingCurve::rectangle(1.0, 1.0).unwrap();
        assert!((perimeter_curve(&p, &sq).unwrap() - 6.0).abs() < 1e-12);
        let rect = GeneratingCurve::rectangle(2.0, 1.0).unwrap();
        assert!((perimeter_curve(&p, &rect).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bow_tie() {
        let e = GeneratingCurve::new(vec![(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        assert!(matches!(e, Err(Error::InvalidCurve(_))));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(GeneratingCurve::new(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).is_err());
        assert!(GeneratingCurve::new(vec![(0.0, 0.0), (-1.0, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn slanted_segment_matches_closed_form() {
        // triangle under s = 1 - r, h = k = 1, alpha = 1
        let p = Params::new(1, 1, 1.0).unwrap();
        let tri = GeneratingCurve::new(vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        let exact = 0.5 * (2f64.sqrt() + (1.0 + 2f64.sqrt()).ln());
        assert!((perimeter_curve(&p, &tri).unwrap() - 4.0 * exact).abs() < 1e-13);
    }

    #[test]
    fn profile_graph_matches_profile_quadrature() {
        let p = Params::new(2, 2, 0.5).unwrap();
        let n = 41;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = nodes.iter().map(|r| (1.0 - r * r).sqrt()).collect();
        let prof = Profile::piecewise_linear(nodes, values).unwrap();
        let curve = GeneratingCurve::from_profile_graph(&prof).unwrap();
        let a = perimeter_curve(&p, &curve).unwrap();
        let b = crate::measures::perimeter_profile(&p, &prof).unwrap();
        assert!((a - b).abs() / a < 1e-8, "{a} vs {b}");
    }
}
