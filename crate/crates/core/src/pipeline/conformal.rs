//! The conformally rescaled metric `ĝ = u⁴ g̃`, `u = (1 + ψ)/2`.

use rayon::prelude::*;
use serde::Serialize;

use super::manifold::PiecewiseManifold;
use super::matching::{guarded_samples, outside_guard_band};
use crate::curvature::curvature_at;
use crate::error::{Error, Result};
use crate::oracle::fd_curvature_oracle_extrapolated;
use crate::profile::{RadialProfile, UCorruption};

/// Relative finite-difference step for the scalar-curvature oracle. Larger
/// steps lose to truncation next to the minimal boundary, smaller ones to
/// double-double rounding on the reflected end where `u⁴` is tiny.
pub const ORACLE_STEP: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ConformalManifold {
    pub base: PiecewiseManifold,
    /// `ĝ` on each chart, indexed like `base.charts`.
    pub charts: Vec<RadialProfile>,
    pub corruption: UCorruption,
}

impl ConformalManifold {
    fn index(&self, chart: usize) -> Result<usize> {
        self.base.charts.iter().position(|c| c.id == chart).ok_or(Error::UnknownChart(chart))
    }

    pub fn profile(&self, chart: usize) -> Result<&RadialProfile> {
        Ok(&self.charts[self.index(chart)?])
    }

    /// Conformal factor including any corruption.
    pub fn u(&self, chart: usize, r: f64) -> Result<f64> {
        let psi = self.base.chart(chart)?.psi(r)?;
        let u = 0.5 * (1.0 + psi);
        Ok(match self.corruption {
            UCorruption::None => u,
            UCorruption::Shift(c) => u + c,
            UCorruption::Quadratic(c) => u + c * psi * psi,
        })
    }
}

pub fn conformal_transform(manifold: &PiecewiseManifold) -> Result<ConformalManifold> {
    conformal_transform_with(manifold, UCorruption::None)
}

/// Rescale every chart; refuses if `u ≤ 0` anywhere on a 256-point grid per chart.
pub fn conformal_transform_with(manifold: &PiecewiseManifold, corruption: UCorruption) -> Result<ConformalManifold> {
    let charts = manifold.charts.iter().map(|c| c.conformal_profile(corruption)).collect();
    let cm = ConformalManifold { base: manifold.clone(), charts, corruption };
    for c in &manifold.charts {
        let d = c.interval();
        for k in 0..256 {
            let r = if k == 255 { d.hi } else { d.lo + d.width() * k as f64 / 255.0 };
            let u = cm.u(c.id, r)?;
            if !(u > 0.0) {
                return Err(Error::NonPositiveConformalFactor { chart: c.id, r, value: u });
            }
        }
    }
    Ok(cm)
}

/// Scalar curvature of `u⁴ g` for a scalar `u` on `(g, R)`: `u⁻⁵ (R u − 8 Δu)`.
pub fn conformal_scalar(scalar: f64, u: f64, lap_u: f64) -> f64 {
    (scalar * u - 8.0 * lap_u) / u.powi(5)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConformalSample {
    pub chart: usize,
    pub r: f64,
    pub psi: f64,
    pub u: f64,
    /// `R̂` from the finite-difference oracle.
    pub scalar: f64,
    /// Largest closed-form curvature component of `ĝ`.
    pub max_curvature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalScan {
    pub samples: Vec<ConformalSample>,
    pub max_scalar: f64,
    pub max_curvature: f64,
}

/// `R̂` at one point, refusing points inside the guard band.
pub fn conformal_scalar_at(cm: &ConformalManifold, chart: usize, r: f64) -> Result<f64> {
    if !outside_guard_band(cm.base.chart(chart)?, r) {
        return Err(Error::GuardBand { r });
    }
    Ok(fd_curvature_oracle_extrapolated(cm.profile(chart)?, r, ORACLE_STEP * r)?.scalar)
}

/// Closed-form curvature magnitude of `ĝ` at one point.
pub fn conformal_curvature_at(cm: &ConformalManifold, chart: usize, r: f64) -> Result<f64> {
    if !outside_guard_band(cm.base.chart(chart)?, r) {
        return Err(Error::GuardBand { r });
    }
    Ok(curvature_at(cm.profile(chart)?, r)?.max_curvature())
}

/// `R̂` (oracle) and curvature magnitude (closed form) over guarded samples.
pub fn conformal_scan(cm: &ConformalManifold, n_total: usize) -> Result<ConformalScan> {
    let pts = guarded_samples(&cm.base, n_total);
    let samples: Vec<ConformalSample> = pts
        .par_iter()
        .map(|&(chart, r)| {
            Ok(ConformalSample {
                chart,
                r,
                psi: cm.base.chart(chart)?.psi(r)?,
                u: cm.u(chart, r)?,
                scalar: conformal_scalar_at(cm, chart, r)?,
                max_curvature: conformal_curvature_at(cm, chart, r)?,
            })
        })
        .collect::<Result<_>>()?;
    let max_scalar = samples.iter().fold(0.0_f64, |a, s| a.max(s.scalar.abs()));
    let max_curvature = samples.iter().fold(0.0_f64, |a, s| a.max(s.max_curvature));
    Ok(ConformalScan { samples, max_scalar, max_curvature })
}

pub fn conformal_scalar_residual(cm: &ConformalManifold, n_total: usize) -> Result<f64> {
    Ok(conformal_scan(cm, n_total)?.max_scalar)
}

pub fn flatness_check(cm: &ConformalManifold, n_total: usize) -> Result<f64> {
    Ok(conformal_scan(cm, n_total)?.max_curvature)
}

#[cfg(test)]
mod tests {
    use super::super::manifold::{double, glue_neck};
    use super::*;
    use crate::profile::RadialProfile;

    fn doubled(m: f64) -> PiecewiseManifold {
        let ext = RadialProfile::schwarzschild_exterior(m, 3.0 * m, 100.0 * m).unwrap();
        double(&glue_neck(&ext, 3.0 * m).unwrap()).unwrap()
    }

    #[test]
    fn conformal_factor_values() {
        let cm = conformal_transform(&doubled(1.0)).unwrap();
        let n100 = 0.98f64.sqrt();
        assert!((cm.u(3, 100.0).unwrap() - 0.5 * (1.0 + n100)).abs() < 1e-15);
        assert!((cm.u(0, 100.0).unwrap() - 0.5 * (1.0 - n100)).abs() < 1e-15);
        assert_eq!(cm.u(1, 2.0).unwrap(), 0.5);
        assert_eq!(cm.u(2, 2.0).unwrap(), 0.5);
        // Reflection: u ∘ reflect = 1 − u to rounding.
        for r in [2.5, 2.9, 3.0] {
            let (a, b) = (cm.u(2, r).unwrap(), cm.u(1, r).unwrap());
            assert!((a + b - 1.0).abs() <= f64::EPSILON);
        }
    }

    #[test]
    fn laplacian_sign_fixed_by_oracle() {
        // A non-harmonic conformal factor on a scalar-flat background:
        // u = (1+N)/2 + c N², so Δu = 2c |∇N|² and R̂ = ∓16 c |∇N|² / u⁵.
        let base = RadialProfile::schwarzschild_exterior(1.0, 3.0, 100.0).unwrap();
        let c = 0.05;
        let p = RadialProfile::conformal(&base, 1.0, 1.0, UCorruption::Quadratic(c));
        for r in [4.0, 7.5, 20.0] {
            let j = base.jets(r).unwrap();
            let nu_n = j.lapse.d1 / j.radial.v;
            let u = 0.5 * (1.0 + j.lapse.v) + c * j.lapse.v.powi(2);
            let lap_u = 2.0 * c * nu_n * nu_n;
            let oracle = fd_curvature_oracle_extrapolated(&p, r, 1e-3 * r).unwrap().scalar;
            let minus = conformal_scalar(0.0, u, lap_u);
            let plus = (8.0 * lap_u) / u.powi(5);
            assert!((oracle - minus).abs() < 1e-10 * minus.abs(), "{oracle} vs {minus}");
            assert!((oracle - plus).abs() > 1.0 * minus.abs());
        }
    }

    #[test]
    fn scalar_flat_and_flat_for_schwarzschild() {
        let cm = conformal_transform(&doubled(1.0)).unwrap();
        let scan = conformal_scan(&cm, 64).unwrap();
        assert!(scan.max_scalar <= 1e-8, "{}", scan.max_scalar);
        assert!(scan.max_curvature <= 1e-6, "{}", scan.max_curvature);
    }

    #[test]
    fn harmonic_shift_keeps_scalar_flatness_but_not_flatness() {
        let cm = conformal_transform_with(&doubled(1.0), UCorruption::Shift(0.01)).unwrap();
        let scan = conformal_scan(&cm, 64).unwrap();
        assert!(scan.max_scalar <= 1e-8, "{}", scan.max_scalar);
        assert!(scan.max_curvature > 1e-3);
    }

    #[test]
    fn quadratic_corruption_breaks_scalar_flatness() {
        let cm = conformal_transform_with(&doubled(1.0), UCorruption::Quadratic(0.01)).unwrap();
        assert!(conformal_scalar_residual(&cm, 64).unwrap() > 1e-3);
    }

    #[test]
    fn identity_transform_of_flat_space() {
        let flat = RadialProfile::schwarzschild_family(0.0, 1.0, 10.0).unwrap();
        let p = RadialProfile::conformal(&flat, 1.0, 1.0, UCorruption::None);
        for r in [1.5, 4.0, 9.0] {
            assert_eq!(curvature_at(&p, r).unwrap().max_curvature(), 0.0);
        }
    }

    #[test]
    fn guard_band_is_enforced() {
        let cm = conformal_transform(&doubled(1.0)).unwrap();
        assert!(matches!(conformal_scalar_at(&cm, 3, 3.0), Err(Error::GuardBand { .. })));
    }
}
