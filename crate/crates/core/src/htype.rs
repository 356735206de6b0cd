//! Step-2 groups `(x, y) . (x', y') = (x + x', y + y' + Q(x, x'))` given by a
//! skew tensor `Q^l_ij`, their Kaplan matrices, the H-type test and the
//! H-perimeter of symmetric sets.
//!
//! The left-invariant frame is
//! `X_i = d/dx_i - sum_l sum_j Q^l_ij x_j d/dy_l`, `Y_l = d/dy_l`, whose
//! brackets are `[X_i, X_j] = 2 sum_l Q^l_ij Y_l`. With this convention the
//! Heisenberg group with `Q^1_12 = 1/2` is H-type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::perimeter_with_vertical_weight;
use crate::profile::Profile;
use crate::spaces::Params;

/// Default tolerance of [`HTypeStructure::validate`].
pub const DEFAULT_HTYPE_TOL: f64 = 1e-12;

/// Skew tensor `Q^l_ij`, `l < k`, `i, j < h` (0-based in memory, 1-based on the wire).
#[derive(Debug, Clone, PartialEq)]
pub struct HTypeStructure {
    h: usize,
    k: usize,
    q: Vec<f64>,
    // bracket coefficients c^l_ij with [X_i, X_j] = sum_l c^l_ij Y_l
    bracket: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    h: usize,
    k: usize,
    #[serde(rename = "Q")]
    q: Vec<(usize, usize, usize, f64)>,
}

/// Outcome of the H-type test with the largest entry of
/// `J_a^T J_b + J_b^T J_a - 2 <e_a, e_b> I` over basis pairs `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub valid: bool,
    pub tolerance: f64,
    pub max_violation: f64,
    /// 1-based basis pair `(a, b)` and matrix entry `(i, j)` attaining it.
    pub worst_pair: (usize, usize),
    pub worst_entry: (usize, usize),
}

impl HTypeStructure {
    /// Build from strictly-upper-triangle entries `(l, i, j, value)` with
    /// 1-based indices and `i < j`; the lower triangle follows by skewness.
    pub fn new(h: usize, k: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidStructure(m));
        if h == 0 || !h.is_multiple_of(2) {
            return bad(format!("h must be a positive even integer, got {h}"));
        }
        if k == 0 {
            return bad("k must be positive".into());
        }
        let mut q = vec![0.0; k * h * h];
        for &(l, i, j, v) in entries {
            if !(1..=k).contains(&l) || !(1..=h).contains(&i) || !(1..=h).contains(&j) {
                return bad(format!("index ({l}, {i}, {j}) out of range"));
            }
            if i >= j {
                return bad(format!("entry ({l}, {i}, {j}) is not strictly upper triangular"));
            }
            if !v.is_finite() {
                return bad(format!("entry ({l}, {i}, {j}) is not finite"));
            }
            let (l, i, j) = (l - 1, i - 1, j - 1);
            q[(l * h + i) * h + j] = v;
            q[(l * h + j) * h + i] = -v;
        }
        Ok(Self::from_tensor(h, k, q))
    }

    /// Build from a dense tensor `q[l][i][j]`, which must be skew in `(i, j)`.
    pub fn from_dense(q: &[Vec<Vec<f64>>]) -> Result<Self> {
        let k = q.len();
        let h = q.first().map_or(0, |m| m.len());
        let mut entries = Vec::new();
        for (l, m) in q.iter().enumerate() {
            if m.len() != h || m.iter().any(|row| row.len() != h) {
                return Err(Error::InvalidStructure("tensor slices must be h x h".into()));
            }
            for i in 0..h {
                for j in 0..h {
                    if m[i][j] != -m[j][i] {
                        return Err(Error::InvalidStructure(format!(
                            "Q^{}_{}{} is not skew",
                            l + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                    if i < j && m[i][j] != 0.0 {
                        entries.push((l + 1, i + 1, j + 1, m[i][j]));
                    }
                }
            }
        }
        Self::new(h, k, &entries)
    }

    fn from_tensor(h: usize, k: usize, q: Vec<f64>) -> Self {
        // coefficient of d/dy_l in X_i is sum_p a^l_ip x_p with a = -Q; the
        // commutator of two such linear fields is X_i(a_j) - X_j(a_i)
        let a = |l: usize, i: usize, p: usize| -q[(l * h + i) * h + p];
        let mut bracket = vec![0.0; k * h * h];
        for l in 0..k {
            for i in 0..h {
                for j in 0..h {
                    bracket[(l * h + i) * h + j] = a(l, j, i) - a(l, i, j);
                }
            }
        }
        HTypeStructure { h, k, q, bracket }
    }

    /// Heisenberg group `H^1`: `h = 2`, `k = 1`, `Q^1_12 = q12`.
    pub fn heisenberg(q12: f64) -> Result<Self> {
        Self::new(2, 1, &[(1, 1, 2, q12)])
    }

    /// Quaternionic structure on `R^4 x R^3` from left multiplication by
    /// `i, j, k`, with `Q^l = scale * L_l^T`; `scale = 1/2` is H-type.
    pub fn quaternionic(scale: f64) -> Result<Self> {
        // rows of left multiplication by i, j, k on a + bi + cj + dk
        let li = [[0., -1., 0., 0.], [1., 0., 0., 0.], [0., 0., 0., -1.], [0., 0., 1., 0.]];
        let lj = [[0., 0., -1., 0.], [0., 0., 0., 1.], [1., 0., 0., 0.], [0., -1., 0., 0.]];
        let lk = [[0., 0., 0., -1.], [0., 0., -1., 0.], [0., 1., 0., 0.], [1., 0., 0., 0.]];
        let dense: Vec<Vec<Vec<f64>>> = [li, lj, lk]
            .iter()
            .map(|m| (0..4).map(|i| (0..4).map(|j| scale * m[j][i]).collect()).collect())
            .collect();
        Self::from_dense(&dense)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `Q^l_ij` with 0-based indices.
    pub fn q(&self, l: usize, i: usize, j: usize) -> f64 {
        self.q[(l * self.h + i) * self.h + j]
    }

    /// Coefficient of `Y_l` in `[X_i, X_j]` (0-based).
    pub fn bracket(&self, l: usize, i: usize, j: usize) -> f64 {
        self.bracket[(l * self.h + i) * self.h + j]
    }

    pub fn to_json(&self) -> Result<String> {
        let mut q = Vec::new();
        for l in 0..self.k {
            for i in 0..self.h {
                for j in i + 1..self.h {
                    let v = self.q(l, i, j);
                    if v != 0.0 {
                        q.push((l + 1, i + 1, j + 1, v));
                    }
                }
            }
        }
        Ok(serde_json::to_string_pretty(&StructureJson { h: self.h, k: self.k, q })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let w: StructureJson = serde_json::from_str(text)?;
        Self::new(w.h, w.k, &w.q)
    }

    /// Kaplan matrix `J_Y` as rows: `J[j][i] = <J_Y X_i, X_j> = <Y, [X_i, X_j]>`.
    pub fn kaplan_matrix(&self, y: &[f64]) -> Result<Vec<Vec<f64>>> {
        if y.len() != self.k {
            return Err(Error::InvalidStructure(format!(
                "Y has {} components, expected {}",
                y.len(),
                self.k
            )));
        }
        let h = self.h;
        let mut m = vec![vec![0.0; h]; h];
        for (j, row) in m.iter_mut().enumerate() {
            for (i, e) in row.iter_mut().enumerate() {
                *e = (0..self.k).map(|l| y[l] * self.bracket(l, i, j)).sum();
            }
        }
        Ok(m)
    }

    /// Check `J_a^T J_b + J_b^T J_a = 2 delta_ab I` on all basis pairs.
    pub fn validate(&self, tolerance: f64) -> Certificate {
        let h = self.h;
        let basis: Vec<Vec<Vec<f64>>> = (0..self.k)
            .map(|a| {
                let mut e = vec![0.0; self.k];
                e[a] = 1.0;
                self.kaplan_matrix(&e).expect("basis vector has length k")
            })
            .collect();
        let mut cert = Certificate {
            valid: true,
            tolerance,
            max_violation: 0.0,
            worst_pair: (1, 1),
            worst_entry: (1, 1),
        };
        for a in 0..self.k {
            for b in a..self.k {
                let (ja, jb) = (&basis[a], &basis[b]);
                for i in 0..h {
                    for j in 0..h {
                        // (J_a^T J_b)_ij = sum_p J_a[p][i] J_b[p][j]
                        let mut v: f64 =
                            (0..h).map(|p| ja[p][i] * jb[p][j] + jb[p][i] * ja[p][j]).sum();
                        if a == b && i == j {
                            v -= 2.0;
                        }
                        if v.abs() > cert.max_violation {
                            cert.max_violation = v.abs();
                            cert.worst_pair = (a + 1, b + 1);
                            cert.worst_entry = (i + 1, j + 1);
                        }
                    }
                }
            }
        }
        cert.valid = cert.max_violation <= tolerance;
        cert
    }

    /// `sum_i <X_i(x, y), N>^2` for a Euclidean normal `N = (n_x, n_y)`.
    ///
    /// The frame does not depend on `y`; `N` is assumed to be a unit vector.
    pub fn horizontal_normal_sq(&self, x: &[f64], n_x: &[f64], n_y: &[f64]) -> Result<f64> {
        if x.len() != self.h || n_x.len() != self.h || n_y.len() != self.k {
            return Err(Error::InvalidStructure("point or normal has the wrong dimension".into()));
        }
        let mut acc = 0.0;
        for i in 0..self.h {
            let mut c = n_x[i];
            for l in 0..self.k {
                for j in 0..self.h {
                    c -= self.q(l, i, j) * x[j] * n_y[l];
                }
            }
            acc += c * c;
        }
        Ok(acc)
    }

    /// `sum_ij Q^l_ij x_j n_i` for each `l`; zero whenever `n` is parallel to `x`.
    pub fn skew_contraction(&self, x: &[f64], n: &[f64]) -> Vec<f64> {
        (0..self.k)
            .map(|l| {
                let mut s = 0.0;
                for i in 0..self.h {
                    for j in 0..self.h {
                        s += self.q(l, i, j) * x[j] * n[i];
                    }
                }
                s
            })
            .collect()
    }

    /// `sum_i (sum_lj Q^l_ij n_l x_j)^2`, the quadratic term of `|N_H|^2`.
    pub fn quadratic_contraction(&self, x: &[f64], n_y: &[f64]) -> f64 {
        (0..self.h)
            .map(|i| {
                let mut c = 0.0;
                for l in 0..self.k {
                    for j in 0..self.h {
                        c += self.q(l, i, j) * n_y[l] * x[j];
                    }
                }
                c * c
            })
            .sum()
    }

    /// Factor `kappa^2` with `|N_H|^2 = |N_x|^2 + kappa^2 |x|^2 |N_y|^2` on
    /// x-symmetric data, read off the frame at a fixed generic configuration.
    pub fn vertical_weight(&self) -> Result<f64> {
        let x: Vec<f64> = (0..self.h).map(|i| 1.0 / (i as f64 + 1.5)).collect();
        let ny: Vec<f64> = (0..self.k).map(|l| 1.0 / (l as f64 + 2.0)).collect();
        let x2: f64 = x.iter().map(|v| v * v).sum();
        let y2: f64 = ny.iter().map(|v| v * v).sum();
        let zero = vec![0.0; self.h];
        Ok(self.horizontal_normal_sq(&x, &zero, &ny)? / (x2 * y2))
    }
}

/// H-perimeter of `E = {|y| < f(|x|)}` in the group given by `structure`.
///
/// Requires a valid H-type structure: then `|N_H|^2 = |N_x|^2 +
/// kappa^2 |x|^2 |N_y|^2` with a constant `kappa` and the generating-set
/// reduction applies with that weight on the vertical part of the normal.
pub fn perimeter_h(structure: &HTypeStructure, profile: &Profile) -> Result<f64> {
    let cert = structure.validate(DEFAULT_HTYPE_TOL);
    if !cert.valid {
        return Err(Error::InvalidStructure(format!(
            "not H-type: violation {:e} at basis pair {:?}",
            cert.max_violation, cert.worst_pair
        )));
    }
    let params = Params::new(structure.h as u32, structure.k as u32, 1.0)?;
    perimeter_with_vertical_weight(&params, profile, structure.vertical_weight()?)
}
