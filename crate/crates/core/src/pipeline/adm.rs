//! Mass at an asymptotic end, and compactification of the reflected end.

use serde::Serialize;

use super::conformal::ConformalManifold;
use crate::error::{Error, Result};
use crate::profile::RadialProfile;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassEstimate {
    pub mass: f64,
    pub error_bar: f64,
    /// Chart radii of the schedule.
    pub radii: Vec<f64>,
    pub areal_radii: Vec<f64>,
    pub integrand: Vec<f64>,
}

/// Polynomial extrapolation to `x = 0` through `(xs, ys)` (Neville).
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

fn check_schedule(schedule: &[f64], increasing: bool) -> Result<()> {
    if schedule.len() < 3 {
        return Err(Error::BadSchedule(format!("need at least 3 entries, got {}", schedule.len())));
    }
    let ordered = schedule.windows(2).all(|w| if increasing { w[0] < w[1] } else { w[0] > w[1] });
    if !ordered || schedule.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        let dir = if increasing { "increasing" } else { "decreasing" };
        return Err(Error::BadSchedule(format!("entries must be positive and strictly {dir}: {schedule:?}")));
    }
    Ok(())
}

/// Mass from coordinate spheres at the schedule radii.
///
/// In the areal coordinate `ρ` the metric reads `A_ρ² dρ² + ρ² dΩ` and the
/// surface integral reduces to `(ρ/2)(A_ρ² − 1)`. The values are extrapolated
/// to `1/ρ → 0`; the error bar compares the full extrapolant with the one
/// that drops the innermost radius.
pub fn adm_mass_estimate(profile: &RadialProfile, schedule: &[f64]) -> Result<MassEstimate> {
    check_schedule(schedule, true)?;
    let mut areal_radii = Vec::with_capacity(schedule.len());
    let mut integrand = Vec::with_capacity(schedule.len());
    for &r in schedule {
        let j = profile.jets_extended(r)?;
        let rho = j.areal.v;
        let a_rho = j.radial.v / j.areal.d1;
        areal_radii.push(rho);
        integrand.push(0.5 * rho * (a_rho * a_rho - 1.0));
    }
    let xs: Vec<f64> = areal_radii.iter().map(|r| 1.0 / r).collect();
    let mass = neville_at_zero(&xs, &integrand);
    let previous = neville_at_zero(&xs[1..], &integrand[1..]);
    Ok(MassEstimate { mass, error_bar: (mass - previous).abs(), radii: schedule.to_vec(), areal_radii, integrand })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactificationReport {
    pub chart: usize,
    /// Inverted radii `R = 1/r`, decreasing.
    pub schedule: Vec<f64>,
    /// `u⁴ r⁴` (tangential factor in inverted coordinates).
    pub tangential: Vec<f64>,
    /// `u⁴ A² r⁴` (radial factor in inverted coordinates).
    pub radial: Vec<f64>,
    /// Observed convergence orders from successive differences.
    pub rates_tangential: Vec<f64>,
    pub rates_radial: Vec<f64>,
    pub limit_tangential: f64,
    pub limit_radial: f64,
    /// `m̂ = 2 F^{1/4}` from the tangential limit.
    pub mass_hat: f64,
    pub component_mass: f64,
    pub converged: bool,
}

fn rates(schedule: &[f64], values: &[f64]) -> Vec<f64> {
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    diffs.windows(2).zip(schedule.windows(2)).map(|(d, s)| (d[0] / d[1]).ln() / (s[0] / s[1]).ln()).collect()
}

/// In `R = 1/r` the reflected end of `ĝ` reads `F_R dR² + F_t R² dΩ`; both
/// factors must tend to `(m/2)⁴` linearly in `R`.
pub fn compactification_check(cm: &ConformalManifold, schedule: &[f64]) -> Result<CompactificationReport> {
    check_schedule(schedule, false)?;
    let chart = cm.base.reflected_end()?;
    let profile = cm.profile(chart.id)?;
    let mut tangential = Vec::with_capacity(schedule.len());
    let mut radial = Vec::with_capacity(schedule.len());
    for &big_r in schedule {
        let r = 1.0 / big_r;
        let m = profile.jets_extended(r)?;
        tangential.push((m.areal.v * r).powi(2));
        radial.push((m.radial.v * r * r).powi(2));
    }
    let rates_tangential = rates(schedule, &tangential);
    let rates_radial = rates(schedule, &radial);
    let limit_tangential = neville_at_zero(schedule, &tangential);
    let limit_radial = neville_at_zero(schedule, &radial);
    let linear = |rs: &[f64]| rs.iter().all(|q| q.is_finite() && (q - 1.0).abs() <= 0.25);
    let converged = linear(&rates_tangential)
        && linear(&rates_radial)
        && limit_tangential > 0.0
        && (limit_tangential - limit_radial).abs() <= 1e-3 * limit_tangential;
    Ok(CompactificationReport {
        chart: chart.id,
        schedule: schedule.to_vec(),
        tangential,
        radial,
        rates_tangential,
        rates_radial,
        limit_tangential,
        limit_radial,
        mass_hat: 2.0 * limit_tangential.max(0.0).powf(0.25),
        component_mass: cm.base.photon_sphere.mass_i,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::super::conformal::{conformal_transform, conformal_transform_with};
    use super::super::manifold::{double, glue_neck};
    use super::*;
    use crate::profile::UCorruption;

    const SCHEDULE: [f64; 4] = [50.0, 100.0, 200.0, 400.0];

    fn conformal(m: f64, corruption: UCorruption) -> ConformalManifold {
        let ext = RadialProfile::schwarzschild_exterior(m, 3.0 * m, 100.0 * m).unwrap();
        let d = double(&glue_neck(&ext, 3.0 * m).unwrap()).unwrap();
        if corruption == UCorruption::None {
            conformal_transform(&d).unwrap()
        } else {
            conformal_transform_with(&d, corruption).unwrap()
        }
    }

    #[test]
    fn neville_reproduces_polynomials() {
        let xs = [0.5, 0.25, 0.125, 0.0625];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 5.0 * x * x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn exterior_mass() {
        for m in [0.5, 1.0, 2.0] {
            let ext = RadialProfile::schwarzschild_exterior(m, 3.0 * m, 100.0 * m).unwrap();
            let sched: Vec<f64> = SCHEDULE.iter().map(|s| s * m).collect();
            let est = adm_mass_estimate(&ext, &sched).unwrap();
            assert!((est.mass - m).abs() <= 1e-3 * m, "{est:?}");
            assert!(est.error_bar <= 1e-3 * m);
        }
    }

    #[test]
    fn minkowski_mass_is_zero() {
        let flat = RadialProfile::schwarzschild_family(0.0, 1.0, 10.0).unwrap();
        let est = adm_mass_estimate(&flat, &SCHEDULE).unwrap();
        assert_eq!(est.mass, 0.0);
        assert_eq!(est.error_bar, 0.0);
    }

    #[test]
    fn conformal_end_is_massless() {
        let cm = conformal(1.0, UCorruption::None);
        let end = cm.profile(3).unwrap();
        let est = adm_mass_estimate(end, &SCHEDULE).unwrap();
        assert!(est.mass.abs() <= 1e-3 && est.error_bar <= 1e-3, "{est:?}");
    }

    #[test]
    fn schedule_validation() {
        let ext = RadialProfile::schwarzschild_exterior(1.0, 3.0, 100.0).unwrap();
        assert!(matches!(adm_mass_estimate(&ext, &[50.0, 100.0]), Err(Error::BadSchedule(_))));
        assert!(matches!(adm_mass_estimate(&ext, &[100.0, 50.0, 200.0]), Err(Error::BadSchedule(_))));
        let tab_like = ext.restrict(3.0, 100.0).unwrap();
        assert!(adm_mass_estimate(&tab_like, &SCHEDULE).is_ok());
    }

    #[test]
    fn compactification_limit() {
        for (m, limit) in [(1.0, 0.0625), (2.0, 1.0)] {
            let cm = conformal(m, UCorruption::None);
            let rep = compactification_check(&cm, &[1e-2, 1e-3, 1e-4]).unwrap();
            assert!(rep.converged, "{rep:?}");
            assert!((rep.limit_tangential - limit).abs() <= 1e-6 * limit, "{rep:?}");
            assert!((rep.mass_hat - m).abs() <= 1e-6 * m);
            for q in rep.rates_tangential.iter().chain(&rep.rates_radial) {
                assert!((q - 1.0).abs() < 0.05, "{q}");
            }
        }
    }

    #[test]
    fn corrupted_u_does_not_compactify() {
        let cm = conformal(1.0, UCorruption::Shift(0.01));
        let rep = compactification_check(&cm, &[1e-2, 1e-3, 1e-4]).unwrap();
        assert!(!rep.converged);
    }
}
