use serde::{Deserialize, Serialize};

use super::curve::segment_weight;
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::spaces::Params;

/// Union of cells `[r_i, r_{i+1}] x [s_j, s_{j+1}]` in the quadrant.
///
/// Edges are strictly increasing and nonnegative; uniform grids are the usual
/// case, but the symmetrization pipeline produces staircase sets whose steps
/// sit at arbitrary abscissae, so non-uniform edges are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrantGrid {
    params: Params,
    r_edges: Vec<f64>,
    s_edges: Vec<f64>,
    occ: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    params: Params,
    r_edges: Vec<f64>,
    s_edges: Vec<f64>,
    cells: Vec<[usize; 2]>,
}

pub(crate) fn check_edges(name: &str, edges: &[f64], nonneg: bool) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::InvalidGrid(format!("{name} needs at least two edges")));
    }
    if nonneg && edges[0] < 0.0 {
        return Err(Error::InvalidGrid(format!("{name} must start at r >= 0")));
    }
    for w in edges.windows(2) {
        if !(w[0].is_finite() && w[1].is_finite() && w[1] > w[0]) {
            return Err(Error::InvalidGrid(format!("{name} not strictly increasing")));
        }
    }
    Ok(())
}

impl QuadrantGrid {
    pub fn new(
        params: Params,
        r_edges: Vec<f64>,
        s_edges: Vec<f64>,
        cells: &[(usize, usize)],
    ) -> Result<Self> {
        params.validate()?;
        check_edges("r_edges", &r_edges, true)?;
        check_edges("s_edges", &s_edges, true)?;
        let mut g = QuadrantGrid::empty_unchecked(params, r_edges, s_edges);
        for &(i, j) in cells {
            if i >= g.nr() || j >= g.ns() {
                return Err(Error::InvalidGrid(format!("cell ({i}, {j}) outside the grid")));
            }
            g.set(i, j, true);
        }
        Ok(g)
    }

    pub(crate) fn empty_unchecked(params: Params, r_edges: Vec<f64>, s_edges: Vec<f64>) -> Self {
        let n = (r_edges.len() - 1) * (s_edges.len() - 1);
        QuadrantGrid { params, r_edges, s_edges, occ: vec![false; n] }
    }

    /// `nr x ns` cells of size `dr x ds` starting at the origin, all empty.
    pub fn uniform(params: Params, nr: usize, ns: usize, dr: f64, ds: f64) -> Result<Self> {
        if nr == 0 || ns == 0 || !(dr > 0.0) || !(ds > 0.0) {
            return Err(Error::InvalidGrid("grid spacing and size must be positive".into()));
        }
        let r_edges = (0..=nr).map(|i| i as f64 * dr).collect();
        let s_edges = (0..=ns).map(|j| j as f64 * ds).collect();
        Self::new(params, r_edges, s_edges, &[])
    }

    /// Cells whose centre lies below the graph of `profile`.
    pub fn from_profile(
        params: Params,
        profile: &Profile,
        nr: usize,
        ns: usize,
        r_max: f64,
        s_max: f64,
    ) -> Result<Self> {
        let mut g = Self::uniform(params, nr, ns, r_max / nr as f64, s_max / ns as f64)?;
        for i in 0..nr {
            let rc = 0.5 * (g.r_edges[i] + g.r_edges[i + 1]);
            if rc >= profile.r0() {
                continue;
            }
            let f = profile.eval(rc).0;
            for j in 0..ns {
                if 0.5 * (g.s_edges[j] + g.s_edges[j + 1]) < f {
                    g.set(i, j, true);
                }
            }
        }
        Ok(g)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn r_edges(&self) -> &[f64] {
        &self.r_edges
    }

    pub fn s_edges(&self) -> &[f64] {
        &self.s_edges
    }

    pub fn nr(&self) -> usize {
        self.r_edges.len() - 1
    }

    pub fn ns(&self) -> usize {
        self.s_edges.len() - 1
    }

    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        self.occ[j * self.nr() + i]
    }

    /// Out-of-range indices read as empty.
    pub(crate) fn occ_or_empty(&self, i: isize, j: isize) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.nr()
            && (j as usize) < self.ns()
            && self.is_occupied(i as usize, j as usize)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let nr = self.nr();
        self.occ[j * nr + i] = v;
    }

    pub fn occupied_cells(&self) -> Vec<(usize, usize)> {
        let nr = self.nr();
        (0..self.occ.len())
            .filter(|&c| self.occ[c])
            .map(|c| (c % nr, c / nr))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.occ.iter().any(|&b| b)
    }

    /// Largest cell diagonal.
    pub fn max_cell_diagonal(&self) -> f64 {
        let dr = self.r_edges.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let ds = self.s_edges.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        dr.hypot(ds)
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = GridJson {
            params: self.params,
            r_edges: self.r_edges.clone(),
            s_edges: self.s_edges.clone(),
            cells: self.occupied_cells().into_iter().map(|(i, j)| [i, j]).collect(),
        };
        Ok(serde_json::to_string_pretty(&wire)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: GridJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        let cells: Vec<(usize, usize)> = wire.cells.iter().map(|c| (c[0], c[1])).collect();
        Self::new(wire.params, wire.r_edges, wire.s_edges, &cells)
    }
}

/// Boundary edges of the occupancy set with `s`-edge index below `j_max`,
/// as segments in the quadrant. Vertical edges are cut by row; horizontal
/// edges by column. Edges on the axes are skipped.
fn boundary_segments(grid: &QuadrantGrid, j_max: usize) -> Vec<((f64, f64), (f64, f64))> {
    let (nr, ns) = (grid.nr() as isize, grid.ns() as isize);
    let (re, se) = (&grid.r_edges, &grid.s_edges);
    let mut out = Vec::new();
    for j in 0..(j_max as isize).min(ns) {
        for i in 0..=nr {
            if grid.occ_or_empty(i - 1, j) != grid.occ_or_empty(i, j) {
                let r = re[i as usize];
                out.push(((r, se[j as usize]), (r, se[j as usize + 1])));
            }
        }
    }
    for j in 0..(j_max as isize).min(ns + 1) {
        for i in 0..nr {
            if grid.occ_or_empty(i, j - 1) != grid.occ_or_empty(i, j) {
                let s = se[j as usize];
                out.push(((re[i as usize], s), (re[i as usize + 1], s)));
            }
        }
    }
    out
}

/// Alpha-perimeter of the cell union (segment-exact on every boundary edge).
pub fn perimeter_grid(grid: &QuadrantGrid) -> Result<f64> {
    perimeter_grid_below_y(grid, f64::INFINITY)
}

/// `P(E; {|y| < t})`: perimeter of the cell union inside the open slab, with `t`
/// snapped to the nearest `s`-edge.
pub fn perimeter_grid_below_y(grid: &QuadrantGrid, t: f64) -> Result<f64> {
    let j = if t.is_infinite() { grid.ns() + 1 } else { snap_s(grid, t) };
    let mut acc = 0.0;
    for (a, b) in boundary_segments(grid, j) {
        acc += segment_weight(&grid.params, a, b)?;
    }
    Ok(grid.params.c_hk() * acc)
}

/// Exact volume: `c_hk * sum (r_b^h - r_a^h)/h * (s_b^k - s_a^k)/k` over occupied cells.
pub fn volume_grid(grid: &QuadrantGrid) -> f64 {
    let (h, k) = (grid.params.h as i32, grid.params.k as i32);
    let acc: f64 = grid
        .occupied_cells()
        .into_iter()
        .map(|(i, j)| {
            let (ra, rb) = (grid.r_edges[i], grid.r_edges[i + 1]);
            let (sa, sb) = (grid.s_edges[j], grid.s_edges[j + 1]);
            (rb.powi(h) - ra.powi(h)) / h as f64 * (sb.powi(k) - sa.powi(k)) / k as f64
        })
        .sum();
    grid.params.c_hk() * acc
}

/// Index of the `s`-edge nearest to `t`.
pub(crate) fn snap_s(grid: &QuadrantGrid, t: f64) -> usize {
    let se = &grid.s_edges;
    let p = se.partition_point(|&s| s < t);
    if p == 0 {
        0
    } else if p >= se.len() {
        se.len() - 1
    } else if (t - se[p - 1]) <= (se[p] - t) {
        p - 1
    } else {
        p
    }
}

/// `E ∩ {|y| < t}` with `t` snapped to the nearest `s`-edge.
pub fn truncate_y(grid: &QuadrantGrid, t: f64) -> QuadrantGrid {
    let jt = snap_s(grid, t);
    let mut out = grid.clone();
    for j in jt..grid.ns() {
        for i in 0..grid.nr() {
            out.set(i, j, false);
        }
    }
    out
}

/// `v^y(t) = int_{E ∩ {|y| = t}} |x|^alpha dH^(n-1)`, with `t` snapped to an
/// `s`-edge and the slice taken as the trace of the row just below it.
pub fn slice_weight_y(grid: &QuadrantGrid, t: f64) -> f64 {
    let jt = snap_s(grid, t);
    if jt == 0 {
        return 0.0;
    }
    let p = &grid.params;
    let e = p.h as f64 + p.alpha;
    let ts = grid.s_edges[jt];
    let row: f64 = (0..grid.nr())
        .filter(|&i| grid.is_occupied(i, jt - 1))
        .map(|i| (grid.r_edges[i + 1].powf(e) - grid.r_edges[i].powf(e)) / e)
        .sum();
    p.c_hk() * ts.powi(p.k as i32 - 1) * row
}
