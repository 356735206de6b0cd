//! Quadrature engines for alpha-perimeter and volume on profiles, generating
//! curves and quadrant grids, plus the isoperimetric ratio.
//!
//! All three representations describe a set `E` in `R^h x R^k` that is
//! spherically symmetric in `x` and in `y` through its generating set in the
//! quadrant `(r, s) = (|x|, |y|)`. Perimeters integrate the weighted normal
//! `|(N_r, r^alpha N_s)| r^(h-1) s^(k-1)` along the part of the boundary of
//! the generating set that lies off the coordinate axes, and volumes
//! integrate `r^(h-1) s^(k-1)`, both times `c_hk`.

mod curve;
mod grid;
mod profile;

pub use curve::{perimeter_curve, GeneratingCurve};
pub use grid::{
    perimeter_grid, perimeter_grid_below_y, slice_weight_y, truncate_y, volume_grid, QuadrantGrid,
};
pub(crate) use grid::check_edges;
pub(crate) use profile::perimeter_with_vertical_weight;
pub use profile::{perimeter_profile, volume_profile};

use crate::error::{Error, Result};
use crate::spaces::Params;

/// Isoperimetric ratio `P^d / V^(d-1)`, invariant under the anisotropic dilations.
pub fn iso_ratio(params: &Params, perimeter: f64, volume: f64) -> Result<f64> {
    if !(perimeter > 0.0 && perimeter.is_finite()) || !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::params(format!(
            "perimeter and volume must be positive (P={perimeter}, V={volume})"
        )));
    }
    let d = params.d();
    // logs keep large d from overflowing
    Ok((d * perimeter.ln() - (d - 1.0) * volume.ln()).exp())
}

/// Whether `P >= C V^((d-1)/d)` holds with `C = ratio_min^(1/d)`, i.e. whether
/// the isoperimetric ratio is at least `ratio_min` up to relative `slack`.
pub fn isoperimetric_inequality_holds(
    params: &Params,
    perimeter: f64,
    volume: f64,
    ratio_min: f64,
    slack: f64,
) -> bool {
    let d = params.d();
    let c = ratio_min.powf(1.0 / d);
    perimeter >= (1.0 - slack) * c * volume.powf((d - 1.0) / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_values() {
        let p = Params::new(1, 1, 1.0).unwrap();
        assert!((iso_ratio(&p, 4.0, 8.0 / 3.0).unwrap() - 9.0).abs() < 1e-12);
        let sq = iso_ratio(&p, 6.0, 4.0).unwrap();
        assert!((sq - 13.5).abs() < 1e-12);
        assert!(sq > 9.0);
        assert!(iso_ratio(&p, 0.0, 1.0).is_err());
        assert!(iso_ratio(&p, 1.0, -1.0).is_err());
    }

    #[test]
    fn ratio_is_scale_free() {
        let p = Params::new(2, 3, 0.5).unwrap();
        let d = p.d();
        let base = iso_ratio(&p, 3.0, 2.0).unwrap();
        for lambda in [0.5f64, 2.0, 10.0] {
            let r = iso_ratio(&p, 3.0 * lambda.powf(d - 1.0), 2.0 * lambda.powf(d)).unwrap();
            assert!((r - base).abs() / base < 1e-12);
        }
    }
}
