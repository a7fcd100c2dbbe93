//! Closed-form curvature of `g = A² dr² + R² Ω` and of its coordinate spheres.
//!
//! With unit normal `ν = A⁻¹ ∂_r` and `e` a unit tangent to the sphere:
//!
//! ```text
//! Ric(ν,ν) = −2/(A R) · (R'/A)'
//! Ric(e,e) = (1 − (R'/A)²)/R² − (R'/A)'/(A R)
//! ∇²N(ν,ν) = (N'/A)'/A          ∇²N(e,e) = R' N'/(A² R)
//! H        = 2 R'/(A R)         ν(N)     = N'/A
//! ```

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{Metric, Model, ProfileKind, RadialProfile};
use crate::real::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub r: f64,
    pub ric_nn: f64,
    pub ric_tt: f64,
    pub scalar: f64,
    pub hess_nn: f64,
    pub hess_tt: f64,
    pub lap_n: f64,
    pub vac_residual_nn: f64,
    pub vac_residual_tt: f64,
    pub scalar_residual: f64,
    pub lap_residual: f64,
}

impl CurvatureSample {
    /// Assembles a sample from the six independent components.
    pub(crate) fn assemble(
        r: f64,
        lapse: f64,
        ric_nn: f64,
        ric_tt: f64,
        scalar: f64,
        hess_nn: f64,
        hess_tt: f64,
    ) -> Self {
        let lap_n = hess_nn + 2.0 * hess_tt;
        Self {
            r,
            ric_nn,
            ric_tt,
            scalar,
            hess_nn,
            hess_tt,
            lap_n,
            vac_residual_nn: lapse * ric_nn - hess_nn,
            vac_residual_tt: lapse * ric_tt - hess_tt,
            scalar_residual: scalar,
            lap_residual: lap_n,
        }
    }

    /// Trace of the Ricci tensor over one normal and two tangent directions.
    pub fn ricci_trace(&self) -> f64 {
        self.ric_nn + 2.0 * self.ric_tt
    }

    /// Largest static-vacuum residual magnitude.
    pub fn max_vacuum_residual(&self) -> f64 {
        [self.vac_residual_nn, self.vac_residual_tt, self.scalar_residual, self.lap_residual]
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest curvature magnitude (Ricci components and scalar).
    pub fn max_curvature(&self) -> f64 {
        [self.ric_nn, self.ric_tt, self.scalar].iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest field-wise difference to another sample.
    pub fn max_abs_diff(&self, other: &CurvatureSample) -> f64 {
        self.fields().iter().zip(other.fields().iter()).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn fields(&self) -> [f64; 6] {
        [self.ric_nn, self.ric_tt, self.scalar, self.hess_nn, self.hess_tt, self.lap_n]
    }
}

pub fn curvature_at(profile: &RadialProfile, r: f64) -> Result<CurvatureSample> {
    curvature_from_jets(r, profile.jets(r)?)
}

pub(crate) fn curvature_from_jets(r: f64, m: Metric<Jet>) -> Result<CurvatureSample> {
    let (n, a, rr) = (m.lapse, m.radial, m.areal);
    if rr.v <= 0.0 || a.v <= 0.0 {
        return Err(Error::OneSidedLimit { r });
    }
    // (R'/A)' and (N'/A)'
    let y = rr.d1 / a.v;
    let dy = rr.d2 / a.v - rr.d1 * a.d1 / (a.v * a.v);
    let dz = n.d2 / a.v - n.d1 * a.d1 / (a.v * a.v);

    let ric_nn = -2.0 * dy / (a.v * rr.v);
    let ric_tt = (1.0 - y * y) / (rr.v * rr.v) - dy / (a.v * rr.v);
    let scalar = -4.0 * dy / (a.v * rr.v) + 2.0 * (1.0 - y * y) / (rr.v * rr.v);
    let hess_nn = dz / a.v;
    let hess_tt = rr.d1 * n.d1 / (a.v * a.v * rr.v);
    Ok(CurvatureSample::assemble(r, n.v, ric_nn, ric_tt, scalar, hess_nn, hess_tt))
}

/// Geometry of the coordinate sphere `{r}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceGeometry {
    pub r: f64,
    pub area: f64,
    pub area_radius: f64,
    pub mean_curvature: f64,
    pub tracefree_h_norm: f64,
    pub nu_n: f64,
    pub sigma_scalar: f64,
    pub lapse: f64,
    /// Set at a degenerate horizon endpoint, where `H` is the limit `0`.
    pub minimal_surface: bool,
}

pub fn surface_geometry(profile: &RadialProfile, r: f64) -> Result<SurfaceGeometry> {
    match profile.jets(r) {
        Ok(m) => Ok(surface_from_jets(r, m)),
        Err(Error::OneSidedLimit { .. }) => horizon_limit(profile, r).ok_or(Error::OneSidedLimit { r }),
        Err(e) => Err(e),
    }
}

pub(crate) fn surface_from_jets(r: f64, m: Metric<Jet>) -> SurfaceGeometry {
    let rr = m.areal.v;
    SurfaceGeometry {
        r,
        area: 4.0 * std::f64::consts::PI * rr * rr,
        area_radius: rr,
        mean_curvature: 2.0 * m.areal.d1 / (m.radial.v * rr),
        tracefree_h_norm: 0.0,
        nu_n: m.lapse.d1 / m.radial.v,
        sigma_scalar: 2.0 / (rr * rr),
        lapse: m.lapse.v,
        minimal_surface: false,
    }
}

/// One-sided limit at the minimal boundary `r = 2μ` of a neck:
/// `φ → 0`, `H = 2φ/r → 0`, `ν(φ) = φ φ' = μ/r²`.
pub(crate) fn horizon_limit(profile: &RadialProfile, r: f64) -> Option<SurfaceGeometry> {
    match profile.model() {
        Model::Neck { mu } if r == 2.0 * mu && profile.kind() == ProfileKind::SchwarzschildNeck => {
            Some(SurfaceGeometry {
                r,
                area: 4.0 * std::f64::consts::PI * r * r,
                area_radius: r,
                mean_curvature: 0.0,
                tracefree_h_norm: 0.0,
                nu_n: mu / (r * r),
                sigma_scalar: 2.0 / (r * r),
                lapse: 0.0,
                minimal_surface: true,
            })
        }
        _ => None,
    }
}

/// Radial test functions for the identity audits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunction {
    Lapse,
    Radius,
    RadiusSquared,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [TestFunction::Lapse, TestFunction::Radius, TestFunction::RadiusSquared];

    fn jet(self, r: f64, m: &Metric<Jet>) -> Jet {
        let x = Jet::var(r);
        match self {
            TestFunction::Lapse => m.lapse,
            TestFunction::Radius => x,
            TestFunction::RadiusSquared => x * x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `R − 2 Ric(ν,ν) − (σR − (tr h)² + |h|²)`
    pub gauss: f64,
    /// `Δf − (Δ_σ f + ∇²f(ν,ν) + H ν(f))`
    pub surface_laplacian: f64,
}

pub fn identity_residuals(profile: &RadialProfile, r: f64, f: TestFunction) -> Result<IdentityResiduals> {
    let m = profile.jets(r)?;
    let c = curvature_from_jets(r, m)?;
    let s = surface_from_jets(r, m);

    let h = s.mean_curvature;
    let h_norm_sq = 0.5 * h * h + s.tracefree_h_norm * s.tracefree_h_norm;
    let gauss = c.scalar - 2.0 * c.ric_nn - (s.sigma_scalar - h * h + h_norm_sq);

    let fj = f.jet(r, &m);
    let (a, rr) = (m.radial, m.areal);
    // Divergence form: Δf = (A R²)⁻¹ (R² f'/A)'.
    let flux_d =
        2.0 * rr.v * rr.d1 * fj.d1 / a.v + rr.v * rr.v * fj.d2 / a.v - rr.v * rr.v * fj.d1 * a.d1 / (a.v * a.v);
    let lap_f = flux_d / (a.v * rr.v * rr.v);
    let hess_f_nn = fj.d2 / (a.v * a.v) - fj.d1 * a.d1 / (a.v * a.v * a.v);
    let nu_f = fj.d1 / a.v;
    let surface_lap_f = 0.0; // radial functions are constant on each sphere
    let surface_laplacian = lap_f - (surface_lap_f + hess_f_nn + h * nu_f);

    Ok(IdentityResiduals { gauss, surface_laplacian })
}

/// Interpolation-error annotation for tabulated profiles: curvature
/// differences between the full table and the table on every other node.
#[derive(Clone, Debug)]
pub struct InterpolationErrorModel {
    full: RadialProfile,
    coarse: RadialProfile,
}

impl InterpolationErrorModel {
    pub fn new(profile: &RadialProfile) -> Option<Self> {
        let nodes = profile.table_nodes()?;
        if profile.kind() != ProfileKind::Tabulated || nodes.len() < 8 {
            return None;
        }
        let mut idx: Vec<usize> = (0..nodes.len()).step_by(2).collect();
        if *idx.last()? != nodes.len() - 1 {
            idx.push(nodes.len() - 1);
        }
        let mut cols: [Vec<f64>; 4] = Default::default();
        for &i in &idx {
            let r = nodes[i];
            let m = profile.eval(r).ok()?;
            cols[0].push(r);
            cols[1].push(m.lapse);
            cols[2].push(m.radial);
            cols[3].push(m.areal);
        }
        let coarse = RadialProfile::tabulated(&cols[0], &cols[1], &cols[2], &cols[3]).ok()?;
        Some(Self { full: profile.clone(), coarse })
    }

    /// Bound on the interpolation error of every curvature field at `r`.
    pub fn bound(&self, r: f64) -> Result<f64> {
        let fine = curvature_at(&self.full, r)?;
        let coarse = curvature_at(&self.coarse, r)?;
        Ok(fine.max_abs_diff(&coarse))
    }
}

/// Static-vacuum residuals over `n` interior points of the domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VacuumScan {
    pub samples: Vec<CurvatureSample>,
    /// Interpolation-error bound per sample; empty unless the profile is tabulated.
    pub interpolation_bounds: Vec<f64>,
    pub max_residual: f64,
    /// Radius and residual name of the worst sample.
    pub worst_r: f64,
    pub worst_field: &'static str,
}

impl VacuumScan {
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "vac_nn", "vac_tt", "scalar", "lap_N", "max_residual", "interp_bound"])?;
        for (k, s) in self.samples.iter().enumerate() {
            let bound = self.interpolation_bounds.get(k).map(|b| b.to_string()).unwrap_or_default();
            out.write_record([
                s.r.to_string(),
                s.vac_residual_nn.to_string(),
                s.vac_residual_tt.to_string(),
                s.scalar_residual.to_string(),
                s.lap_residual.to_string(),
                s.max_vacuum_residual().to_string(),
                bound,
            ])?;
        }
        out.flush()
    }
}

pub fn vacuum_scan(profile: &RadialProfile, n: usize) -> Result<VacuumScan> {
    if n == 0 {
        let d = profile.domain();
        return Err(Error::EmptyDomain { lo: d.lo, hi: d.hi });
    }
    let grid = profile.domain().interior_grid(n);
    let samples: Vec<CurvatureSample> = grid.par_iter().map(|&r| curvature_at(profile, r)).collect::<Result<_>>()?;
    let interpolation_bounds = match InterpolationErrorModel::new(profile) {
        Some(model) => grid.par_iter().map(|&r| model.bound(r)).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let (mut max_residual, mut worst_r, mut worst_field) = (0.0_f64, grid[0], "vac_nn");
    for s in &samples {
        let named = [
            ("vac_nn", s.vac_residual_nn),
            ("vac_tt", s.vac_residual_tt),
            ("scalar", s.scalar_residual),
            ("lap_N", s.lap_residual),
        ];
        for (name, v) in named {
            if !(v.abs() <= max_residual) {
                max_residual = if v.is_nan() { f64::INFINITY } else { v.abs() };
                worst_r = s.r;
                worst_field = name;
            }
        }
    }
    Ok(VacuumScan { samples, interpolation_bounds, max_residual, worst_r, worst_field })
}
