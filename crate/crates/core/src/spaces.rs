//! Dimensional parameters, homogeneity constants and anisotropic dilations.

use serde::{Deserialize, Serialize};


use crate::error::{Error, Result};
use crate::profile::Profile;

/// Largest ball dimension accepted by [`unit_ball_volume`].
pub const MAX_BALL_DIM: u32 = 64;

/// The triple `(h, k, alpha)`: horizontal dimension, vertical dimension and
/// Grushin exponent. The H-type case is `alpha = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub h: u32,
    pub k: u32,
    pub alpha: f64,
}

impl Params {
    pub fn new(h: u32, k: u32, alpha: f64) -> Result<Self> {
        let p = Params { h, k, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h == 0 || self.k == 0 {
            return Err(Error::params(format!(
                "h and k must be positive (h={}, k={})",
                self.h, self.k
            )));
        }
        if self.h > MAX_BALL_DIM || self.k > MAX_BALL_DIM {
            return Err(Error::params(format!(
                "h and k are limited to {MAX_BALL_DIM}"
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::params(format!(
                "alpha must be positive and finite (alpha={})",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Homogeneous dimension `d = h + k (1 + alpha)`.
    pub fn d(&self) -> f64 {
        homogeneous_dimension(self)
    }

    /// `c_hk = h k omega_h omega_k`, the area factor of the product of unit spheres.
    pub fn c_hk(&self) -> f64 {
        let h = self.h as f64;
        let k = self.k as f64;
        h * k * omega(self.h) * omega(self.k)
    }

    /// Surface area of the unit sphere in `R^h`, `h omega_h`.
    pub fn sphere_h(&self) -> f64 {
        self.h as f64 * omega(self.h)
    }

    /// Surface area of the unit sphere in `R^k`, `k omega_k`.
    pub fn sphere_k(&self) -> f64 {
        self.k as f64 * omega(self.k)
    }
}

fn omega(m: u32) -> f64 {
    unit_ball_volume(m).expect("dimension validated")
}

/// Lebesgue measure of the unit ball in `R^m`: `pi^(m/2) / Gamma(m/2 + 1)`.
pub fn unit_ball_volume(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::params("ball dimension must be at least 1"));
    }
    if m > MAX_BALL_DIM {
        return Err(Error::params(format!(
            "ball dimension {m} exceeds {MAX_BALL_DIM}"
        )));
    }
    let half = m as f64 / 2.0;
    Ok((half * std::f64::consts::PI.ln() - libm::lgamma(half + 1.0)).exp())
}

pub fn homogeneous_dimension(params: &Params) -> f64 {
    params.h as f64 + params.k as f64 * (1.0 + params.alpha)
}

/// Profile of `delta_lambda(E)` where `delta_lambda(x, y) = (lambda x, lambda^(1+alpha) y)`.
///
/// Nodes map to `lambda r_i`, values to `lambda^(1+alpha) f_i` and slopes to
/// `lambda^alpha f'_i`, so the image is exact at every node.
pub fn dilate_profile(params: &Params, profile: &Profile, lambda: f64) -> Result<Profile> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::params(format!("dilation factor must be positive, got {lambda}")));
    }
    let vs = lambda.powf(1.0 + params.alpha);
    let ss = lambda.powf(params.alpha);
    let nodes = profile.nodes().iter().map(|r| r * lambda).collect();
    let values = profile.values().iter().map(|f| f * vs).collect();
    let slopes = profile.slopes().map(|s| s.iter().map(|d| d * ss).collect());
    Profile::with_kind(nodes, values, slopes, profile.kind())
}
