//! One-sided limits of the matched quantities at gluing surfaces.

use rayon::prelude::*;
use serde::Serialize;

use super::manifold::{Chart, Gluing, PiecewiseManifold, SurfaceKind};
use crate::curvature::curvature_at;
use crate::error::Result;
use crate::profile::Model;

/// Chart quantities at a gluing surface, seen from one side. The normal
/// `ν̃` points from the left chart into the right chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SideData {
    pub psi: f64,
    /// `ν̃(ψ)`
    pub nu_psi: f64,
    pub area_radius: f64,
    /// `H̃`
    pub mean_curvature: f64,
    /// `∇²ψ(ν̃, ν̃)`, measured directly.
    pub hess_psi: f64,
    /// `∂_ψ g_AB` proxy `H̃ r² / ν̃(ψ)` (from `2h̃/ν̃(ψ)`, `h̃ = (H̃/2) g`).
    pub dg_tangential: f64,
    /// `g_ψψ = 1/ν̃(ψ)²`
    pub g_psipsi: f64,
    /// `∂_ψ g_ψψ = −2 ∇²ψ(ν̃,ν̃) / ν̃(ψ)⁴`
    pub dg_psipsi: f64,
}

impl SideData {
    fn new(psi: f64, nu_psi: f64, area_radius: f64, mean_curvature: f64, hess_psi: f64) -> Self {
        Self {
            psi,
            nu_psi,
            area_radius,
            mean_curvature,
            hess_psi,
            dg_tangential: mean_curvature * area_radius * area_radius / nu_psi,
            g_psipsi: 1.0 / (nu_psi * nu_psi),
            dg_psipsi: -2.0 * hess_psi / nu_psi.powi(4),
        }
    }

    /// Vacuum identity `∇²ψ(ν̃,ν̃) + H̃ ν̃(ψ) = 0` for harmonic `ψ` constant on the surface.
    pub fn hessian_identity_residual(&self) -> f64 {
        self.hess_psi + self.mean_curvature * self.nu_psi
    }
}

/// One-sided data of `chart` at radius `r`.
pub fn side_data(chart: &Chart, r: f64) -> Result<SideData> {
    let n_sign = chart.normal_sign();
    let k = chart.psi_sign * chart.psi_scale;
    if chart.is_minimal_boundary(r) {
        // φ → 0, ν(φ) = φφ' → μ/r², H = 2φ/r → 0, ∇²φ(ν,ν) = φ (φφ')' → 0.
        let Model::Neck { mu } = chart.profile.model() else { unreachable!("minimal boundary lives on a neck") };
        return Ok(SideData::new(0.0, n_sign * k * mu / (r * r), r, 0.0, 0.0));
    }
    let j = chart.profile.jets(r)?;
    let (n, a, rr) = (j.lapse, j.radial, j.areal);
    let hess_n = (n.d2 / a.v - n.d1 * a.d1 / (a.v * a.v)) / a.v;
    Ok(SideData::new(k * n.v, n_sign * k * n.d1 / a.v, rr.v, n_sign * 2.0 * rr.d1 / (a.v * rr.v), k * hess_n))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Jumps {
    pub psi: f64,
    pub nu_psi: f64,
    pub area_radius: f64,
    pub mean_curvature: f64,
    pub dg_tangential: f64,
    pub g_psipsi: f64,
    pub dg_psipsi: f64,
}

impl Jumps {
    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("psi", self.psi),
            ("nu_psi", self.nu_psi),
            ("area_radius", self.area_radius),
            ("mean_curvature", self.mean_curvature),
            ("dg_tangential", self.dg_tangential),
            ("g_psipsi", self.g_psipsi),
            ("dg_psipsi", self.dg_psipsi),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().fold(0.0_f64, |acc, (_, v)| acc.max(*v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    pub surface: usize,
    pub kind: SurfaceKind,
    pub left: SideData,
    pub right: SideData,
    pub jumps: Jumps,
}

impl MatchReport {
    pub fn max_jump(&self) -> f64 {
        self.jumps.max()
    }
}

pub fn match_report(manifold: &PiecewiseManifold, surface_id: usize) -> Result<MatchReport> {
    let g: &Gluing = manifold.gluing(surface_id)?;
    let left = side_data(manifold.chart(g.left.chart)?, g.left.r)?;
    let right = side_data(manifold.chart(g.right.chart)?, g.right.r)?;
    let d = |a: f64, b: f64| (a - b).abs();
    let jumps = Jumps {
        psi: d(left.psi, right.psi),
        nu_psi: d(left.nu_psi, right.nu_psi),
        area_radius: d(left.area_radius, right.area_radius),
        mean_curvature: d(left.mean_curvature, right.mean_curvature),
        dg_tangential: d(left.dg_tangential, right.dg_tangential),
        g_psipsi: d(left.g_psipsi, right.g_psipsi),
        dg_psipsi: d(left.dg_psipsi, right.dg_psipsi),
    };
    Ok(MatchReport { surface: g.id, kind: g.kind, left, right, jumps })
}

pub fn match_all(manifold: &PiecewiseManifold) -> Result<Vec<MatchReport>> {
    manifold.gluings.iter().map(|g| match_report(manifold, g.id)).collect()
}

/// Relative distance kept from gluing surfaces when sampling curvature.
pub const GUARD_BAND: f64 = 1e-3;

/// `n_total` sample points spread over the charts, each at least
/// `GUARD_BAND · r` away from the chart endpoints.
pub fn guarded_samples(manifold: &PiecewiseManifold, n_total: usize) -> Vec<(usize, f64)> {
    let per_chart = (n_total / manifold.charts.len()).max(1);
    let mut out = Vec::with_capacity(per_chart * manifold.charts.len());
    for c in &manifold.charts {
        let d = c.interval();
        let lo = d.lo * (1.0 + GUARD_BAND);
        let hi = d.hi * (1.0 - GUARD_BAND);
        // Geometric spacing resolves the region near the inner boundary.
        let ratio = (hi / lo).ln();
        for k in 0..per_chart {
            let t = (k as f64 + 0.5) / per_chart as f64;
            out.push((c.id, lo * (ratio * t).exp()));
        }
    }
    out
}

/// True when `r` keeps the guard band from both ends of the chart interval.
pub fn outside_guard_band(chart: &Chart, r: f64) -> bool {
    let d = chart.interval();
    r >= d.lo * (1.0 + GUARD_BAND) && r <= d.hi * (1.0 - GUARD_BAND)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicityReport {
    pub samples: usize,
    /// `max |Δ̃ψ|` over guarded samples.
    pub max_laplacian: f64,
    /// `max |∇²ψ(ν̃,ν̃) + H̃ ν̃(ψ)|` over both sides of every gluing surface.
    pub max_surface_hessian_identity: f64,
}

/// `Δ̃ψ = sign · scale · ΔN` on every chart, away from the surfaces.
pub fn harmonicity_check(manifold: &PiecewiseManifold, n_total: usize) -> Result<HarmonicityReport> {
    let pts = guarded_samples(manifold, n_total);
    let laps: Vec<f64> = pts
        .par_iter()
        .map(|&(id, r)| {
            let c = manifold.chart(id)?;
            let s = curvature_at(&c.profile, r)?;
            Ok((c.psi_sign * c.psi_scale * s.lap_n).abs())
        })
        .collect::<Result<_>>()?;
    let max_laplacian = laps.iter().fold(0.0_f64, |a, v| a.max(*v));
    let mut max_surface = 0.0_f64;
    for rep in match_all(manifold)? {
        max_surface = max_surface
            .max(rep.left.hessian_identity_residual().abs())
            .max(rep.right.hessian_identity_residual().abs());
    }
    Ok(HarmonicityReport { samples: pts.len(), max_laplacian, max_surface_hessian_identity: max_surface })
}

#[cfg(test)]
mod tests {
    use super::super::manifold::{double, glue_neck, glue_neck_with, GlueOptions};
    use super::*;
    use crate::profile::RadialProfile;

    fn doubled(m: f64) -> PiecewiseManifold {
        let ext = RadialProfile::schwarzschild_exterior(m, 3.0 * m, 100.0 * m).unwrap();
        double(&glue_neck(&ext, 3.0 * m).unwrap()).unwrap()
    }

    #[test]
    fn all_jumps_vanish_on_schwarzschild() {
        for m in [0.5, 1.0, 2.0] {
            let d = doubled(m);
            for rep in match_all(&d).unwrap() {
                assert!(rep.max_jump() <= 1e-12, "{m} {rep:?}");
            }
            let minimal = match_report(&d, 1).unwrap();
            assert_eq!(minimal.kind, SurfaceKind::MinimalBoundary);
            assert_eq!(minimal.left.psi, 0.0);
            assert_eq!(minimal.right.psi, 0.0);
        }
    }

    #[test]
    fn photon_sphere_side_values() {
        let d = doubled(1.0);
        let rep = match_report(&d, 2).unwrap();
        assert!((rep.right.nu_psi - 1.0 / 9.0).abs() < 1e-15);
        assert!((rep.right.mean_curvature - 2.0 / (3.0 * 3f64.sqrt())).abs() < 1e-15);
        // The reflected copy sees the same normal derivative with its normal flipped.
        let mirrored = match_report(&d, 0).unwrap();
        assert!((mirrored.left.nu_psi - rep.right.nu_psi).abs() < 1e-15);
    }

    #[test]
    fn wrong_neck_mass_shows_in_normal_derivative() {
        let ext = RadialProfile::schwarzschild_exterior(1.0, 3.0, 100.0).unwrap();
        let opts = GlueOptions { mu_override: Some(0.9), ..GlueOptions::default() };
        let g = glue_neck_with(&ext, 3.0, &opts).unwrap();
        let rep = match_report(&g, 0).unwrap();
        // ν(ψ) on the neck is (3 m_i / r_i) μ'/r² = 0.9/9.
        assert!((rep.jumps.nu_psi - 0.1 / 9.0).abs() < 1e-14);
        assert!(rep.jumps.nu_psi >= 1e-3);
    }

    #[test]
    fn psi_is_harmonic() {
        let rep = harmonicity_check(&doubled(1.0), 512).unwrap();
        assert!(rep.max_laplacian <= 1e-12, "{rep:?}");
        assert!(rep.max_surface_hessian_identity <= 1e-12, "{rep:?}");
    }

    #[test]
    fn samples_respect_guard_band() {
        let d = doubled(1.0);
        for (id, r) in guarded_samples(&d, 512) {
            assert!(outside_guard_band(d.chart(id).unwrap(), r));
        }
    }
}
