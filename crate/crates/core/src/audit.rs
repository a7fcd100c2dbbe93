//! Algebraic identities that must hold on a photon sphere, and the
//! component mass / mean-curvature relation.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{surface_geometry, SurfaceGeometry};
use crate::error::{Error, Result};
use crate::profile::RadialProfile;

/// Residual threshold for closed-form photon-sphere data.
pub const AUDIT_TOL: f64 = 1e-10;
/// Midpoint panels for the flux integral defining the component mass.
pub const MASS_PANELS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub r0: f64,
    pub area_radius: f64,
    pub lapse: f64,
    pub mean_curvature: f64,
    pub nu_n: f64,
    pub sigma_scalar: f64,
    /// `|h̊|`
    pub res_umbilic: f64,
    /// `N·H − 2ν(N)`
    #[serde(rename = "res_NH")]
    pub res_nh: f64,
    /// `(r·H)² − 4/3`
    #[serde(rename = "res_rH")]
    pub res_rh: f64,
    /// `σR − (3/2)H²`
    #[serde(rename = "res_sigmaR")]
    pub res_sigma_r: f64,
    /// `N − √3·m_i/r`
    pub res_chain: f64,
    pub mass_i: f64,
    #[serde(rename = "H_positive")]
    pub h_positive: bool,
    /// Spacetime mean curvature `𝔥 = (3/2)H`.
    #[serde(rename = "spacetime_H")]
    pub spacetime_h: f64,
    /// `1/(√3·𝔥)`
    #[serde(rename = "mass_from_H")]
    pub mass_from_h: f64,
    pub is_photon_sphere: bool,
}

impl IdentityReport {
    fn from_surface(s: &SurfaceGeometry) -> Self {
        let h = s.mean_curvature;
        let r = s.area_radius;
        let mass_i = r * r * s.nu_n;
        let spacetime_h = 1.5 * h;
        let mut rep = Self {
            r0: s.r,
            area_radius: r,
            lapse: s.lapse,
            mean_curvature: h,
            nu_n: s.nu_n,
            sigma_scalar: s.sigma_scalar,
            res_umbilic: s.tracefree_h_norm,
            res_nh: s.lapse * h - 2.0 * s.nu_n,
            res_rh: (r * h).powi(2) - 4.0 / 3.0,
            res_sigma_r: s.sigma_scalar - 1.5 * h * h,
            res_chain: s.lapse - 3f64.sqrt() * mass_i / r,
            mass_i,
            h_positive: h > 0.0,
            spacetime_h,
            mass_from_h: 1.0 / (3f64.sqrt() * spacetime_h),
            is_photon_sphere: false,
        };
        rep.is_photon_sphere = rep.h_positive && rep.worst_residual().1.abs() <= AUDIT_TOL;
        rep
    }

    /// The four identity residuals by name.
    pub fn residuals(&self) -> [(&'static str, f64); 4] {
        [
            ("res_umbilic", self.res_umbilic),
            ("res_NH", self.res_nh),
            ("res_rH", self.res_rh),
            ("res_sigmaR", self.res_sigma_r),
        ]
    }

    /// Residual of largest magnitude (first one wins ties).
    pub fn worst_residual(&self) -> (&'static str, f64) {
        self.residuals()
            .into_iter()
            .fold(("res_umbilic", 0.0), |best, cur| if cur.1.abs() > best.1.abs() { cur } else { best })
    }

    /// `Ok` on a photon sphere, otherwise an error naming the worst residual.
    pub fn require_photon_sphere(&self) -> Result<()> {
        self.require_within(AUDIT_TOL)
    }

    pub fn require_within(&self, tol: f64) -> Result<()> {
        let (name, value) = self.worst_residual();
        if !(value.abs() <= tol) {
            return Err(Error::AuditFailed { r: self.r0, residual: name, value });
        }
        if !self.h_positive {
            return Err(Error::AuditFailed { r: self.r0, residual: "H_positive", value: self.mean_curvature });
        }
        Ok(())
    }
}

fn checked_surface(profile: &RadialProfile, r0: f64) -> Result<SurfaceGeometry> {
    let s = surface_geometry(profile, r0)?;
    if !(s.lapse > 0.0) {
        return Err(Error::VanishingLapse { r: r0 });
    }
    Ok(s)
}

/// Measure every photon-sphere identity at `r0`; nothing is assumed.
///
/// Domain endpoints are accepted, since a photon sphere is usually the inner
/// boundary of the exterior chart.
pub fn audit_sphere(profile: &RadialProfile, r0: f64) -> Result<IdentityReport> {
    Ok(IdentityReport::from_surface(&checked_surface(profile, r0)?))
}

/// [`audit_sphere`] over many radii in parallel; output order follows `radii`.
pub fn audit_batch(profile: &RadialProfile, radii: &[f64]) -> Vec<Result<IdentityReport>> {
    radii.par_iter().map(|&r| audit_sphere(profile, r)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComponentMass {
    /// `r_area² · ν(N)`
    pub analytic: f64,
    /// `(1/4π) ∮ ν(N) dA` by the midpoint rule in `z = cos θ`.
    pub quadrature: f64,
}

impl ComponentMass {
    pub fn difference(&self) -> f64 {
        (self.analytic - self.quadrature).abs()
    }
}

pub fn component_mass(profile: &RadialProfile, r0: f64) -> Result<ComponentMass> {
    let s = checked_surface(profile, r0)?;
    let r2 = s.area_radius * s.area_radius;
    // dA = R² dz dφ; the integrand is evaluated per panel even though
    // spherical symmetry makes it constant.
    let flux_density = |_z: f64| s.nu_n * r2;
    let dz = 2.0 / MASS_PANELS as f64;
    let polar: f64 = (0..MASS_PANELS).map(|k| flux_density(-1.0 + (k as f64 + 0.5) * dz) * dz).sum();
    Ok(ComponentMass { analytic: r2 * s.nu_n, quadrature: 2.0 * PI * polar / (4.0 * PI) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowSample {
    /// Metric arclength from the start radius.
    pub t: f64,
    pub r: f64,
    pub h_over_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityScan {
    pub samples: Vec<FlowSample>,
    /// Largest increase of `H/N` between consecutive samples (0 if none).
    pub max_upward_violation: f64,
    pub upward_violations: usize,
}

impl MonotonicityScan {
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "r", "H_over_N"])?;
        for s in &self.samples {
            out.write_record([s.t.to_string(), s.r.to_string(), s.h_over_n.to_string()])?;
        }
        out.flush()
    }
}

/// `H/N` along the outward normal flow, parameterized by arclength `∫A dr`.
pub fn monotonicity_scan(profile: &RadialProfile, r_start: f64, r_end: f64, n: usize) -> Result<MonotonicityScan> {
    if !(r_start < r_end) || n < 2 {
        return Err(Error::EmptyDomain { lo: r_start, hi: r_end });
    }
    let d = profile.domain();
    for r in [r_start, r_end] {
        if !d.contains(r) {
            return Err(Error::OutOfDomain { r, lo: d.lo, hi: d.hi });
        }
    }
    let radii: Vec<f64> = (0..n)
        .map(|k| if k == n - 1 { r_end } else { r_start + (r_end - r_start) * k as f64 / (n - 1) as f64 })
        .collect();
    let ratios: Vec<f64> = radii
        .par_iter()
        .map(|&r| {
            let s = checked_surface(profile, r)?;
            Ok(s.mean_curvature / s.lapse)
        })
        .collect::<Result<_>>()?;
    let mut samples = Vec::with_capacity(n);
    let mut t = 0.0;
    for (k, (&r, &q)) in radii.iter().zip(&ratios).enumerate() {
        if k > 0 {
            let a = radii[k - 1];
            t += quadrature::integrate(|x| profile.metric(x).radial, a, r, 1e-12).integral;
        }
        samples.push(FlowSample { t, r, h_over_n: q });
    }
    let mut max_up = 0.0_f64;
    let mut count = 0;
    for w in samples.windows(2) {
        let up = w[1].h_over_n - w[0].h_over_n;
        if up > 0.0 {
            count += 1;
            max_up = max_up.max(up);
        }
    }
    Ok(MonotonicityScan { samples, max_upward_violation: max_up, upward_violations: count })
}

/// True iff the mean curvature at `r0` is positive; degenerate input gives false.
pub fn positivity_check(profile: &RadialProfile, r0: f64) -> bool {
    surface_geometry(profile, r0).map(|s| s.mean_curvature > 0.0).unwrap_or(false)
}

/// CSV summary, one row per audited radius.
pub fn write_audit_csv<W: Write>(reports: &[IdentityReport], w: W) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "r0",
        "res_umbilic",
        "res_NH",
        "res_rH",
        "res_sigmaR",
        "mass_i",
        "H_positive",
        "spacetime_H",
        "mass_from_H",
        "is_photon_sphere",
    ])?;
    for r in reports {
        out.write_record([
            r.r0.to_string(),
            r.res_umbilic.to_string(),
            r.res_nh.to_string(),
            r.res_rh.to_string(),
            r.res_sigma_r.to_string(),
            r.mass_i.to_string(),
            r.h_positive.to_string(),
            r.spacetime_h.to_string(),
            r.mass_from_h.to_string(),
            r.is_photon_sphere.to_string(),
        ])?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schw(m: f64) -> RadialProfile {
        RadialProfile::schwarzschild_family(m, if m > 0.0 { 2.1 * m } else { 0.5 }, 100.0).unwrap()
    }

    #[test]
    fn photon_sphere_identities_hold() {
        for m in [0.5, 1.0, 2.0] {
            let rep = audit_sphere(&schw(m), 3.0 * m).unwrap();
            for (name, v) in rep.residuals() {
                assert!(v.abs() <= 1e-12 / m.min(1.0).powi(2), "{name} = {v}");
            }
            assert!(rep.res_chain.abs() <= 1e-12);
            assert!((rep.mass_i - m).abs() <= 1e-12 * m);
            assert!((rep.mass_from_h - m).abs() <= 1e-12 * m);
            assert!(rep.h_positive && rep.is_photon_sphere);
            assert!(rep.sigma_scalar > 0.0);
        }
    }

    #[test]
    fn off_sphere_refusal_names_largest_residual() {
        let rep = audit_sphere(&schw(1.0), 2.9).unwrap();
        assert!(!rep.is_photon_sphere);
        // (r H)² = 4 (1 − 2/r) at r = 2.9
        let expected = 4.0 * (1.0 - 2.0 / 2.9) - 4.0 / 3.0;
        assert!((rep.res_rh - expected).abs() < 1e-14);
        match rep.require_photon_sphere() {
            Err(Error::AuditFailed { residual, .. }) => assert_eq!(residual, "res_rH"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flat_slice_has_no_mass() {
        let rep = audit_sphere(&schw(0.0), 5.0).unwrap();
        assert_eq!(rep.mass_i, 0.0);
        assert!((rep.res_rh - (4.0 - 4.0 / 3.0)).abs() < 1e-14);
        assert!(!rep.is_photon_sphere);
    }

    #[test]
    fn component_mass_paths_agree() {
        let p = schw(1.0);
        for r in [3.0, 10.0, 57.3] {
            let cm = component_mass(&p, r).unwrap();
            assert!((cm.analytic - 1.0).abs() < 1e-12);
            assert!(cm.difference() < 1e-12);
        }
        assert_eq!(component_mass(&schw(0.0), 4.0).unwrap().analytic, 0.0);
    }

    #[test]
    fn monotone_flow_in_vacuum() {
        for m in [0.0, 1.0] {
            let scan = monotonicity_scan(&schw(m), 3.0, 100.0, 256).unwrap();
            assert_eq!(scan.upward_violations, 0);
            assert_eq!(scan.max_upward_violation, 0.0);
            let first = scan.samples[0];
            assert!((first.h_over_n - 2.0 / 3.0).abs() < 1e-14);
            // Arclength ∫ dr/√(1−2m/r) exceeds the coordinate span when m > 0.
            let last = scan.samples.last().unwrap();
            if m == 0.0 {
                assert!((last.t - 97.0).abs() < 1e-10);
            } else {
                let exact = |r: f64| (r * (r - 2.0)).sqrt() + 2.0 * (r.sqrt() + (r - 2.0).sqrt()).ln();
                assert!((last.t - (exact(100.0) - exact(3.0))).abs() < 1e-9, "{}", last.t);
            }
        }
    }

    #[test]
    fn positivity() {
        assert!(positivity_check(&schw(1.0), 3.0));
        assert!(positivity_check(&schw(-1.0), 3.0));
        let neck = RadialProfile::neck_between(1.0, 3.0).unwrap();
        assert!(!positivity_check(&neck, 2.0));
    }

    #[test]
    fn csv_summary() {
        let p = schw(1.0);
        let reps: Vec<_> = audit_batch(&p, &[3.0, 4.0]).into_iter().map(|r| r.unwrap()).collect();
        let mut buf = Vec::new();
        write_audit_csv(&reps, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().ends_with(",true"));
    }
}
