//! Symmetrization of staircase sets: the coordinate change `Psi`/`Phi`, the
//! measure `mu`, Steiner and Schwartz steps, the radial `x`-rearrangement and
//! the volume-restoring dilation.
//!
//! Every step is applied exactly to the union of rectangles it receives and
//! returns another union of rectangles whose edges sit where the rearranged
//! sections end. Volumes are therefore conserved up to rounding and the
//! perimeter inequalities hold without discretization error.
//!
//! For `h = 1` the carrier is the half plane `(u, sigma)` with `u` either the
//! signed coordinate `x` or `xi = Psi(x)`, and `sigma = |y|`. For `h >= 2` it
//! is the quadrant `(r, s) = (|x|, |y|)` of [`QuadrantGrid`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{perimeter_grid, volume_grid, QuadrantGrid};
use crate::spaces::{unit_ball_volume, Params};

/// `Psi(x, y) = (sgn(x) |x|^(alpha+1) / (alpha+1), y)`.
pub fn psi_point(alpha: f64, (x, y): (f64, f64)) -> (f64, f64) {
    (x.signum() * x.abs().powf(alpha + 1.0) / (alpha + 1.0), y)
}

/// Inverse of [`psi_point`]: `x = sgn(xi) |(alpha+1) xi|^(1/(alpha+1))`.
pub fn phi_point(alpha: f64, (xi, y): (f64, f64)) -> (f64, f64) {
    (phi_x(alpha, xi), y)
}

fn psi_x(alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x.signum() * x.abs().powf(alpha + 1.0) / (alpha + 1.0)
}

fn phi_x(alpha: f64, xi: f64) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    xi.signum() * ((alpha + 1.0) * xi.abs()).powf(1.0 / (alpha + 1.0))
}

/// `int_a^b |(alpha+1) xi|^(-alpha/(alpha+1)) d xi`; the antiderivative is
/// `Phi`'s `x`-coordinate, so intervals through `0` need no splitting.
pub fn mu_xi_integral(alpha: f64, a: f64, b: f64) -> f64 {
    phi_x(alpha, b) - phi_x(alpha, a)
}

/// Which horizontal coordinate a [`HalfPlaneGrid`] is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Frame {
    /// The signed coordinate `x` of `R^1`.
    X,
    /// `xi = Psi(x)`.
    Xi,
}

/// Union of cells `[u_i, u_{i+1}] x [sigma_j, sigma_{j+1}]` in the half plane
/// `sigma >= 0`, describing a `y`-spherically symmetric set in `R x R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneGrid {
    params: Params,
    frame: Frame,
    u_edges: Vec<f64>,
    sigma_edges: Vec<f64>,
    occ: Vec<bool>,
}

impl HalfPlaneGrid {
    pub fn new(
        params: Params,
        frame: Frame,
        u_edges: Vec<f64>,
        sigma_edges: Vec<f64>,
        cells: &[(usize, usize)],
    ) -> Result<Self> {
        params.validate()?;
        if params.h != 1 {
            return Err(Error::InvalidGrid(format!(
                "half-plane carrier needs h = 1, got h = {}",
                params.h
            )));
        }
        crate::measures::check_edges("u_edges", &u_edges, false)?;
        crate::measures::check_edges("sigma_edges", &sigma_edges, true)?;
        let mut g = Self::blank(params, frame, u_edges, sigma_edges);
        for &(i, j) in cells {
            if i >= g.nu() || j >= g.nsigma() {
                return Err(Error::InvalidGrid(format!("cell ({i}, {j}) outside the grid")));
            }
            g.set(i, j, true);
        }
        Ok(g)
    }

    fn blank(params: Params, frame: Frame, u_edges: Vec<f64>, sigma_edges: Vec<f64>) -> Self {
        let n = (u_edges.len() - 1) * (sigma_edges.len() - 1);
        HalfPlaneGrid { params, frame, u_edges, sigma_edges, occ: vec![false; n] }
    }

    /// Mirror an `x`-symmetric quadrant grid to the full half plane (`x` frame).
    pub fn from_quadrant(grid: &QuadrantGrid) -> Result<Self> {
        let re = grid.r_edges();
        let mut u: Vec<f64> = re.iter().rev().map(|r| -r).collect();
        let offset = if re[0] == 0.0 {
            u.pop();
            re.len() - 1
        } else {
            re.len()
        };
        u.extend_from_slice(re);
        let mirror = re.len() - 2;
        let cells: Vec<(usize, usize)> = grid
            .occupied_cells()
            .into_iter()
            .flat_map(|(i, j)| [(offset + i, j), (mirror - i, j)])
            .collect();
        Self::new(*grid.params(), Frame::X, u, grid.s_edges().to_vec(), &cells)
    }

    /// The `x >= 0` half of an `x`-symmetric grid as a quadrant grid.
    pub fn to_quadrant(&self) -> Result<QuadrantGrid> {
        if self.frame != Frame::X {
            return Err(Error::InvalidGrid("to_quadrant needs the x frame".into()));
        }
        let mut r_edges = vec![0.0];
        r_edges.extend(self.u_edges.iter().copied().filter(|&u| u > 0.0));
        if r_edges.len() < 2 {
            return Err(Error::InvalidGrid("grid has no part with x > 0".into()));
        }
        let mut cells = Vec::new();
        for i in 0..r_edges.len() - 1 {
            let mid = 0.5 * (r_edges[i] + r_edges[i + 1]);
            if let Some(iu) = self.column_of(mid) {
                for j in 0..self.nsigma() {
                    if self.is_occupied(iu, j) {
                        cells.push((i, j));
                    }
                }
            }
        }
        QuadrantGrid::new(self.params, r_edges, self.sigma_edges.clone(), &cells)
    }

    fn column_of(&self, u: f64) -> Option<usize> {
        let p = self.u_edges.partition_point(|&e| e <= u);
        (p >= 1 && p < self.u_edges.len()).then(|| p - 1)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn u_edges(&self) -> &[f64] {
        &self.u_edges
    }

    pub fn sigma_edges(&self) -> &[f64] {
        &self.sigma_edges
    }

    pub fn nu(&self) -> usize {
        self.u_edges.len() - 1
    }

    pub fn nsigma(&self) -> usize {
        self.sigma_edges.len() - 1
    }

    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        self.occ[j * self.nu() + i]
    }

    fn occ_or_empty(&self, i: isize, j: isize) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.nu()
            && (j as usize) < self.nsigma()
            && self.is_occupied(i as usize, j as usize)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let nu = self.nu();
        self.occ[j * nu + i] = v;
    }

    pub fn occupied_cells(&self) -> Vec<(usize, usize)> {
        (0..self.nsigma())
            .flat_map(|j| (0..self.nu()).map(move |i| (i, j)))
            .filter(|&(i, j)| self.is_occupied(i, j))
            .collect()
    }

    /// Change of frame by mapping every `u`-edge; cells are unchanged.
    fn map_frame(&self, frame: Frame, f: impl Fn(f64) -> f64) -> Self {
        HalfPlaneGrid {
            params: self.params,
            frame,
            u_edges: self.u_edges.iter().map(|&u| f(u)).collect(),
            sigma_edges: self.sigma_edges.clone(),
            occ: self.occ.clone(),
        }
    }

    /// `Psi(E)`: the same cells in the `xi` frame.
    pub fn psi(&self) -> Result<Self> {
        match self.frame {
            Frame::X => Ok(self.map_frame(Frame::Xi, |x| psi_x(self.params.alpha, x))),
            Frame::Xi => Err(Error::InvalidGrid("grid is already in the xi frame".into())),
        }
    }

    /// `Phi(F)`: the same cells back in the `x` frame.
    pub fn phi(&self) -> Result<Self> {
        match self.frame {
            Frame::Xi => Ok(self.map_frame(Frame::X, |xi| phi_x(self.params.alpha, xi))),
            Frame::X => Err(Error::InvalidGrid("grid is already in the x frame".into())),
        }
    }

    // omega_k (b^k - a^k): measure of the y-shell a < |y| < b
    fn shell(&self, a: f64, b: f64) -> f64 {
        let k = self.params.k as i32;
        unit_ball_volume(self.params.k).expect("validated k") * (b.powi(k) - a.powi(k))
    }

    /// Lebesgue measure of the cells with the `u` direction taken as flat.
    pub fn flat_volume(&self) -> f64 {
        self.occupied_cells()
            .into_iter()
            .map(|(i, j)| {
                (self.u_edges[i + 1] - self.u_edges[i])
                    * self.shell(self.sigma_edges[j], self.sigma_edges[j + 1])
            })
            .sum()
    }

    /// Volume of the set in `R x R^k`: Lebesgue in the `x` frame, `mu` in the
    /// `xi` frame.
    pub fn volume(&self) -> f64 {
        match self.frame {
            Frame::X => self.flat_volume(),
            Frame::Xi => mu_volume(self),
        }
    }

    /// Boundary edges: vertical ones as `(u, sigma_a, sigma_b)`, horizontal
    /// ones as `(sigma, u_a, u_b)`; the axis `sigma = 0` is interior.
    fn boundary(&self) -> (Vec<(f64, f64, f64)>, Vec<(f64, f64, f64)>) {
        let (nu, ns) = (self.nu() as isize, self.nsigma() as isize);
        let (ue, se) = (&self.u_edges, &self.sigma_edges);
        let mut vert = Vec::new();
        let mut horiz = Vec::new();
        for j in 0..ns {
            for i in 0..=nu {
                if self.occ_or_empty(i - 1, j) != self.occ_or_empty(i, j) {
                    vert.push((ue[i as usize], se[j as usize], se[j as usize + 1]));
                }
            }
        }
        for j in 0..=ns {
            if se[j as usize] == 0.0 {
                continue;
            }
            for i in 0..nu {
                if self.occ_or_empty(i, j - 1) != self.occ_or_empty(i, j) {
                    horiz.push((se[j as usize], ue[i as usize], ue[i as usize + 1]));
                }
            }
        }
        (vert, horiz)
    }

    /// Euclidean perimeter in `R^(1+k)` of the set the cells describe, with
    /// `u` taken as a flat coordinate.
    pub fn euclidean_perimeter(&self) -> f64 {
        let k = self.params.k;
        let kw = k as f64 * unit_ball_volume(k).expect("validated k");
        let (vert, horiz) = self.boundary();
        let v: f64 = vert.iter().map(|&(_, a, b)| self.shell(a, b)).sum();
        let h: f64 = horiz
            .iter()
            .map(|&(s, a, b)| kw * s.powi(k as i32 - 1) * (b - a))
            .sum();
        v + h
    }

    /// Alpha-perimeter of the set in `R x R^k`; the grid must be in the `x`
    /// frame. Horizontal edges carry `int |x|^alpha dx`.
    pub fn alpha_perimeter(&self) -> Result<f64> {
        if self.frame != Frame::X {
            return Err(Error::InvalidGrid("alpha_perimeter needs the x frame".into()));
        }
        let (k, a) = (self.params.k, self.params.alpha);
        let kw = k as f64 * unit_ball_volume(k)?;
        let (vert, horiz) = self.boundary();
        let v: f64 = vert.iter().map(|&(_, lo, hi)| self.shell(lo, hi)).sum();
        let h: f64 = horiz
            .iter()
            .map(|&(s, lo, hi)| kw * s.powi(k as i32 - 1) * (psi_x(a, hi) - psi_x(a, lo)))
            .sum();
        Ok(v + h)
    }
}

/// `mu(F) = int_F |(alpha+1) xi|^(-alpha/(alpha+1)) k omega_k sigma^(k-1)`
/// for a grid in the `xi` frame, by exact per-cell antiderivatives.
pub fn mu_volume(grid: &HalfPlaneGrid) -> f64 {
    let a = grid.params.alpha;
    grid.occupied_cells()
        .into_iter()
        .map(|(i, j)| {
            mu_xi_integral(a, grid.u_edges[i], grid.u_edges[i + 1])
                * grid.shell(grid.sigma_edges[j], grid.sigma_edges[j + 1])
        })
        .sum()
}

// sorted, deduplicated
fn sorted_edges(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Steiner symmetrization in `u`: every `sigma`-row of total length `L`
/// becomes `(-L/2, L/2)`.
pub fn steiner_xi(grid: &HalfPlaneGrid) -> Result<HalfPlaneGrid> {
    let lengths: Vec<f64> = (0..grid.nsigma())
        .into_par_iter()
        .map(|j| {
            (0..grid.nu())
                .filter(|&i| grid.is_occupied(i, j))
                .map(|i| grid.u_edges[i + 1] - grid.u_edges[i])
                .sum()
        })
        .collect();
    let mut edges: Vec<f64> = lengths
        .iter()
        .filter(|&&l| l > 0.0)
        .flat_map(|&l| [-0.5 * l, 0.5 * l])
        .collect();
    if edges.is_empty() {
        return Err(Error::InvalidGrid("Steiner step on an empty set".into()));
    }
    edges = sorted_edges(edges);
    let mut out = HalfPlaneGrid::blank(grid.params, grid.frame, edges, grid.sigma_edges.clone());
    for (j, &l) in lengths.iter().enumerate() {
        for i in 0..out.nu() {
            if out.u_edges[i] >= -0.5 * l && out.u_edges[i + 1] <= 0.5 * l {
                out.set(i, j, true);
            }
        }
    }
    Ok(out)
}

/// Schwartz symmetrization in `y`: every `u`-column becomes `(0, rho)` with
/// the same `omega_k sigma^k`-measure.
pub fn schwartz_sigma(grid: &HalfPlaneGrid) -> Result<HalfPlaneGrid> {
    let k = grid.params.k as i32;
    let radii: Vec<f64> = (0..grid.nu())
        .into_par_iter()
        .map(|i| column_radius(k, &grid.sigma_edges, |j| grid.is_occupied(i, j)))
        .collect();
    let edges = schwartz_edges(&radii)?;
    let mut out = HalfPlaneGrid::blank(grid.params, grid.frame, grid.u_edges.clone(), edges);
    for (i, &rho) in radii.iter().enumerate() {
        for j in 0..out.nsigma() {
            if out.sigma_edges[j + 1] <= rho {
                out.set(i, j, true);
            }
        }
    }
    Ok(out)
}

fn column_radius(k: i32, edges: &[f64], occupied: impl Fn(usize) -> bool) -> f64 {
    let m: f64 = (0..edges.len() - 1)
        .filter(|&j| occupied(j))
        .map(|j| edges[j + 1].powi(k) - edges[j].powi(k))
        .sum();
    m.powf(1.0 / k as f64)
}

fn schwartz_edges(radii: &[f64]) -> Result<Vec<f64>> {
    let mut edges: Vec<f64> = radii.iter().copied().filter(|&r| r > 0.0).collect();
    if edges.is_empty() {
        return Err(Error::InvalidGrid("Schwartz step on an empty set".into()));
    }
    edges.push(0.0);
    Ok(sorted_edges(edges))
}

/// Schwartz symmetrization in `s` of a quadrant grid: every `r`-column
/// becomes `(0, rho)` with the same `s^(k-1)`-weighted length.
pub fn schwartz_s(grid: &QuadrantGrid) -> Result<QuadrantGrid> {
    let k = grid.params().k as i32;
    let radii: Vec<f64> = (0..grid.nr())
        .into_par_iter()
        .map(|i| column_radius(k, grid.s_edges(), |j| grid.is_occupied(i, j)))
        .collect();
    let edges = schwartz_edges(&radii)?;
    let mut cells = Vec::new();
    for (i, &rho) in radii.iter().enumerate() {
        for j in 0..edges.len() - 1 {
            if edges[j + 1] <= rho {
                cells.push((i, j));
            }
        }
    }
    QuadrantGrid::new(*grid.params(), grid.r_edges().to_vec(), edges, &cells)
}

/// Radial rearrangement in `r`: every `s`-row `F_y` becomes `(0, g)` with
/// `g^(h+alpha)/(h+alpha) = int_{F_y} r^(h-1+alpha) dr`.
pub fn radial_rearrange_r(grid: &QuadrantGrid) -> Result<QuadrantGrid> {
    let p = grid.params();
    let e = p.h as f64 + p.alpha;
    let re = grid.r_edges();
    let g: Vec<f64> = (0..grid.ns())
        .into_par_iter()
        .map(|j| {
            let m: f64 = (0..grid.nr())
                .filter(|&i| grid.is_occupied(i, j))
                .map(|i| re[i + 1].powf(e) - re[i].powf(e))
                .sum();
            m.powf(1.0 / e)
        })
        .collect();
    let mut edges: Vec<f64> = g.iter().copied().filter(|&v| v > 0.0).collect();
    if edges.is_empty() {
        return Err(Error::InvalidGrid("radial rearrangement of an empty set".into()));
    }
    edges.push(0.0);
    let edges = sorted_edges(edges);
    let mut cells = Vec::new();
    for (j, &gj) in g.iter().enumerate() {
        for i in 0..edges.len() - 1 {
            if edges[i + 1] <= gj {
                cells.push((i, j));
            }
        }
    }
    QuadrantGrid::new(*p, edges, grid.s_edges().to_vec(), &cells)
}

/// `delta_lambda` applied to a quadrant grid.
pub fn dilate_grid(grid: &QuadrantGrid, lambda: f64) -> Result<QuadrantGrid> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::params(format!("dilation factor must be positive, got {lambda}")));
    }
    let ls = lambda.powf(1.0 + grid.params().alpha);
    QuadrantGrid::new(
        *grid.params(),
        grid.r_edges().iter().map(|r| r * lambda).collect(),
        grid.s_edges().iter().map(|s| s * ls).collect(),
        &grid.occupied_cells(),
    )
}

/// One line of the pipeline trace.
#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub stage: String,
    pub perimeter: f64,
    pub volume: f64,
}

/// Output of [`rearrange_full`].
#[derive(Debug, Clone)]
pub struct Rearranged {
    pub grid: QuadrantGrid,
    pub trace: Vec<Stage>,
    /// Dilation factor that restored the volume.
    pub lambda: f64,
    /// Declared perimeter slack `4 * (cell diagonal) / (min feature size)`.
    pub eps_grid: f64,
}

/// Slack `4 * diag / feature` with `diag` the largest cell diagonal and
/// `feature` the shorter side of the bounding box of the occupied cells.
pub fn eps_grid(grid: &QuadrantGrid) -> f64 {
    let cells = grid.occupied_cells();
    if cells.is_empty() {
        return f64::INFINITY;
    }
    let (re, se) = (grid.r_edges(), grid.s_edges());
    let r_lo = cells.iter().map(|c| re[c.0]).fold(f64::INFINITY, f64::min);
    let r_hi = cells.iter().map(|c| re[c.0 + 1]).fold(0.0, f64::max);
    let s_lo = cells.iter().map(|c| se[c.1]).fold(f64::INFINITY, f64::min);
    let s_hi = cells.iter().map(|c| se[c.1 + 1]).fold(0.0, f64::max);
    4.0 * grid.max_cell_diagonal() / (r_hi - r_lo).min(s_hi - s_lo)
}

fn stage_q(name: &str, g: &QuadrantGrid) -> Result<Stage> {
    Ok(Stage { stage: name.into(), perimeter: perimeter_grid(g)?, volume: volume_grid(g) })
}

fn stage_h(name: &str, g: &HalfPlaneGrid) -> Result<Stage> {
    let perimeter = match g.frame {
        Frame::X => g.alpha_perimeter()?,
        Frame::Xi => g.euclidean_perimeter(),
    };
    Ok(Stage { stage: name.into(), perimeter, volume: g.volume() })
}

/// Full symmetrization of a doubly symmetric set, volume restored by a dilation.
///
/// `h = 1`: `Psi`, Steiner in `xi`, Schwartz in `sigma`, `Phi`, dilation.
/// `h >= 2`: radial rearrangement in `r`, Schwartz in `s`, dilation.
pub fn rearrange_full(params: &Params, grid: &QuadrantGrid) -> Result<Rearranged> {
    params.validate()?;
    if grid.params() != params {
        return Err(Error::params("grid parameters differ from the requested ones"));
    }
    let v_in = volume_grid(grid);
    if !(v_in > 0.0 && v_in.is_finite()) {
        return Err(Error::InvalidGrid(format!("volume must be positive and finite, got {v_in}")));
    }
    let mut trace = vec![stage_q("input", grid)?];
    let sym = if params.h == 1 {
        let hp = HalfPlaneGrid::from_quadrant(grid)?;
        let xi = hp.psi()?;
        trace.push(stage_h("psi", &xi)?);
        let st = steiner_xi(&xi)?;
        trace.push(stage_h("steiner_xi", &st)?);
        let sw = schwartz_sigma(&st)?;
        trace.push(stage_h("schwartz_sigma", &sw)?);
        let back = sw.phi()?.to_quadrant()?;
        trace.push(stage_q("phi", &back)?);
        back
    } else {
        let rad = radial_rearrange_r(grid)?;
        trace.push(stage_q("radial_r", &rad)?);
        let sw = schwartz_s(&rad)?;
        trace.push(stage_q("schwartz_s", &sw)?);
        sw
    };
    let lambda = (v_in / volume_grid(&sym)).powf(1.0 / params.d());
    let out = dilate_grid(&sym, lambda)?;
    trace.push(stage_q("dilation", &out)?);
    Ok(Rearranged { grid: out, trace, lambda, eps_grid: eps_grid(grid) })
}

/// Volume of the symmetric difference of two quadrant grids with the same
/// parameters, on their common refinement.
pub fn symmetric_difference_volume(a: &QuadrantGrid, b: &QuadrantGrid) -> f64 {
    let p = a.params();
    let (h, k) = (p.h as i32, p.k as i32);
    let re = sorted_edges(a.r_edges().iter().chain(b.r_edges()).copied().collect());
    let se = sorted_edges(a.s_edges().iter().chain(b.s_edges()).copied().collect());
    let inside = |g: &QuadrantGrid, r: f64, s: f64| {
        let i = g.r_edges().partition_point(|&e| e <= r);
        let j = g.s_edges().partition_point(|&e| e <= s);
        i >= 1 && j >= 1 && i < g.r_edges().len() && j < g.s_edges().len() && g.is_occupied(i - 1, j - 1)
    };
    let mut acc = 0.0;
    for i in 0..re.len() - 1 {
        let rm = 0.5 * (re[i] + re[i + 1]);
        for j in 0..se.len() - 1 {
            let sm = 0.5 * (se[j] + se[j + 1]);
            if inside(a, rm, sm) != inside(b, rm, sm) {
                acc += (re[i + 1].powi(h) - re[i].powi(h)) / h as f64
                    * (se[j + 1].powi(k) - se[j].powi(k))
                    / k as f64;
            }
        }
    }
    p.c_hk() * acc
}
