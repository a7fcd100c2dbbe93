//! Piecewise radial manifolds: charts glued along spheres.

use serde::Serialize;

use crate::audit::{audit_sphere, IdentityReport};
use crate::error::{Error, Result};
use crate::profile::{Interval, Model, RadialProfile, UCorruption};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Outward,
    Reflected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartRole {
    Exterior,
    Neck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    PhotonSphere,
    MinimalBoundary,
}

/// One chart with its collar function `ψ = psi_sign · psi_scale · N`.
#[derive(Clone, Debug)]
pub struct Chart {
    pub id: usize,
    pub role: ChartRole,
    pub profile: RadialProfile,
    pub orientation: Orientation,
    pub psi_sign: f64,
    pub psi_scale: f64,
}

impl Chart {
    pub fn interval(&self) -> Interval {
        self.profile.domain()
    }

    /// `+1` when the manifold's left-to-right direction is `+∂_r`.
    pub fn normal_sign(&self) -> f64 {
        match self.orientation {
            Orientation::Outward => 1.0,
            Orientation::Reflected => -1.0,
        }
    }

    /// Collar function; exactly zero on a neck's minimal boundary.
    pub fn psi(&self, r: f64) -> Result<f64> {
        let d = self.interval();
        if !d.contains(r) {
            return Err(Error::OutOfDomain { r, lo: d.lo, hi: d.hi });
        }
        if self.is_minimal_boundary(r) {
            return Ok(0.0);
        }
        Ok(self.psi_sign * self.psi_scale * self.profile.metric(r).lapse)
    }

    pub fn is_minimal_boundary(&self, r: f64) -> bool {
        matches!(self.profile.model(), Model::Neck { mu } if self.role == ChartRole::Neck && r == 2.0 * mu)
    }

    /// Radius of the neck's minimal boundary.
    pub fn minimal_radius(&self) -> Option<f64> {
        match (self.role, self.profile.model()) {
            (ChartRole::Neck, Model::Neck { mu }) => Some(2.0 * mu),
            _ => None,
        }
    }

    pub(crate) fn conformal_profile(&self, corruption: UCorruption) -> RadialProfile {
        RadialProfile::conformal(&self.profile, self.psi_scale, self.psi_sign, corruption)
    }

    pub fn summary(&self) -> ChartSummary {
        let d = self.interval();
        ChartSummary {
            id: self.id,
            role: self.role,
            orientation: self.orientation,
            psi_sign: self.psi_sign,
            psi_scale: self.psi_scale,
            lo: d.lo,
            hi: d.hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartSummary {
    pub id: usize,
    pub role: ChartRole,
    pub orientation: Orientation,
    pub psi_sign: f64,
    pub psi_scale: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceSide {
    pub chart: usize,
    pub r: f64,
}

/// Surface joining the `left` chart to the `right` chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gluing {
    pub id: usize,
    pub kind: SurfaceKind,
    pub left: SurfaceSide,
    pub right: SurfaceSide,
}

/// Charts ordered left to right, with gluings between neighbours.
#[derive(Clone, Debug)]
pub struct PiecewiseManifold {
    pub charts: Vec<Chart>,
    pub gluings: Vec<Gluing>,
    /// Charts carrying an asymptotically flat end.
    pub ends: Vec<usize>,
    /// Audit of the photon sphere the neck was glued to.
    pub photon_sphere: IdentityReport,
}

impl PiecewiseManifold {
    pub fn chart(&self, id: usize) -> Result<&Chart> {
        self.charts.iter().find(|c| c.id == id).ok_or(Error::UnknownChart(id))
    }

    pub fn gluing(&self, id: usize) -> Result<&Gluing> {
        self.gluings.iter().find(|g| g.id == id).ok_or(Error::UnknownSurface(id))
    }

    pub fn is_doubled(&self) -> bool {
        self.charts.iter().any(|c| c.orientation == Orientation::Reflected)
    }

    /// Mirror image of `(chart, r)` in a doubled manifold.
    pub fn reflect(&self, chart: usize, r: f64) -> Result<(usize, f64)> {
        self.chart(chart)?;
        let n = self.charts.len();
        if !self.is_doubled() {
            return Err(Error::NoMinimalBoundary);
        }
        let idx = self.charts.iter().position(|c| c.id == chart).expect("checked above");
        Ok((self.charts[n - 1 - idx].id, r))
    }

    pub fn chart_summaries(&self) -> Vec<ChartSummary> {
        self.charts.iter().map(Chart::summary).collect()
    }

    /// The chart carrying the original (unreflected) end.
    pub fn outward_end(&self) -> Result<&Chart> {
        self.ends
            .iter()
            .filter_map(|&id| self.chart(id).ok())
            .find(|c| c.orientation == Orientation::Outward)
            .ok_or(Error::UnknownChart(usize::MAX))
    }

    pub fn reflected_end(&self) -> Result<&Chart> {
        self.ends
            .iter()
            .filter_map(|&id| self.chart(id).ok())
            .find(|c| c.orientation == Orientation::Reflected)
            .ok_or(Error::NoReflectedEnd)
    }
}

/// `μ = r_area/3` and the neck interval `[2μ, 3μ]`.
pub fn neck_parameters(area_radius: f64) -> (f64, Interval) {
    let mu = area_radius / 3.0;
    (mu, Interval { lo: 2.0 * mu, hi: area_radius })
}

/// Knobs for deliberately mismatched gluings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GlueOptions {
    /// Residual gate for the boundary audit; `None` skips the gate.
    pub audit_tol: Option<f64>,
    /// Replaces `μ = r_area/3`.
    pub mu_override: Option<f64>,
    /// Multiplies the neck collar scale `3 m_i / r_i`.
    pub psi_scale_factor: f64,
}

impl Default for GlueOptions {
    fn default() -> Self {
        Self { audit_tol: Some(1e-8), mu_override: None, psi_scale_factor: 1.0 }
    }
}

/// Glue a Schwarzschild neck inside the photon sphere at `r0`, the inner
/// boundary of the exterior region.
pub fn glue_neck(exterior: &RadialProfile, r0: f64) -> Result<PiecewiseManifold> {
    glue_neck_with(exterior, r0, &GlueOptions::default())
}

pub fn glue_neck_with(exterior: &RadialProfile, r0: f64, opts: &GlueOptions) -> Result<PiecewiseManifold> {
    let audit = audit_sphere(exterior, r0)?;
    if let Some(tol) = opts.audit_tol {
        audit.require_within(tol)?;
    }
    let ext =
        if r0 == exterior.domain().lo { exterior.clone() } else { exterior.restrict(r0, exterior.domain().hi)? };
    let r_i = audit.area_radius;
    let (mu, _) = neck_parameters(r_i);
    let mu = opts.mu_override.unwrap_or(mu);
    let neck = RadialProfile::neck_between(mu, r_i)?;
    let scale = 3.0 * audit.mass_i / r_i * opts.psi_scale_factor;
    let charts = vec![
        Chart {
            id: 0,
            role: ChartRole::Neck,
            profile: neck,
            orientation: Orientation::Outward,
            psi_sign: 1.0,
            psi_scale: scale,
        },
        Chart {
            id: 1,
            role: ChartRole::Exterior,
            profile: ext,
            orientation: Orientation::Outward,
            psi_sign: 1.0,
            psi_scale: 1.0,
        },
    ];
    let gluings = vec![Gluing {
        id: 0,
        kind: SurfaceKind::PhotonSphere,
        left: SurfaceSide { chart: 0, r: r_i },
        right: SurfaceSide { chart: 1, r: r0 },
    }];
    Ok(PiecewiseManifold { charts, gluings, ends: vec![1], photon_sphere: audit })
}

/// Reflect through the minimal boundary of the innermost neck.
///
/// The result lists the mirrored charts in reverse order, then the originals,
/// so chart `k` and chart `n − 1 − k` are mirror images.
pub fn double(manifold: &PiecewiseManifold) -> Result<PiecewiseManifold> {
    if manifold.is_doubled() {
        return Err(Error::NoMinimalBoundary);
    }
    let inner = manifold.charts.first().ok_or(Error::NoMinimalBoundary)?;
    let r_min = inner.minimal_radius().ok_or(Error::NoMinimalBoundary)?;
    if inner.interval().lo != r_min {
        return Err(Error::NoMinimalBoundary);
    }
    let n = manifold.charts.len();
    let old_to_new = |id: usize| -> usize {
        let idx = manifold.charts.iter().position(|c| c.id == id).expect("gluings reference known charts");
        n + idx
    };
    let mirror_of = |id: usize| -> usize { 2 * n - 1 - old_to_new(id) };

    let mut charts = Vec::with_capacity(2 * n);
    for c in manifold.charts.iter().rev() {
        charts.push(Chart {
            id: mirror_of(c.id),
            orientation: Orientation::Reflected,
            psi_sign: -c.psi_sign,
            ..c.clone()
        });
    }
    for c in &manifold.charts {
        charts.push(Chart { id: old_to_new(c.id), ..c.clone() });
    }

    let mut gluings = Vec::with_capacity(2 * manifold.gluings.len() + 1);
    for g in manifold.gluings.iter().rev() {
        gluings.push(Gluing {
            id: gluings.len(),
            kind: g.kind,
            left: SurfaceSide { chart: mirror_of(g.right.chart), r: g.right.r },
            right: SurfaceSide { chart: mirror_of(g.left.chart), r: g.left.r },
        });
    }
    gluings.push(Gluing {
        id: gluings.len(),
        kind: SurfaceKind::MinimalBoundary,
        left: SurfaceSide { chart: mirror_of(inner.id), r: r_min },
        right: SurfaceSide { chart: old_to_new(inner.id), r: r_min },
    });
    for g in &manifold.gluings {
        gluings.push(Gluing {
            id: gluings.len(),
            kind: g.kind,
            left: SurfaceSide { chart: old_to_new(g.left.chart), r: g.left.r },
            right: SurfaceSide { chart: old_to_new(g.right.chart), r: g.right.r },
        });
    }
    let mut ends: Vec<usize> = manifold.ends.iter().map(|&e| mirror_of(e)).collect();
    ends.extend(manifold.ends.iter().map(|&e| old_to_new(e)));
    ends.sort_unstable();
    Ok(PiecewiseManifold { charts, gluings, ends, photon_sphere: manifold.photon_sphere.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiBoundReport {
    pub samples: usize,
    pub max_abs_psi: f64,
    pub at_chart: usize,
    pub at_r: f64,
    /// Lapse `N_i` on each photon-sphere gluing.
    pub boundary_lapses: Vec<f64>,
    pub ok: bool,
}

/// Dense `|ψ| < 1` check spread evenly over the charts, endpoints included.
pub fn psi_bound_check(manifold: &PiecewiseManifold, n_samples: usize) -> Result<PsiBoundReport> {
    let per_chart = (n_samples / manifold.charts.len()).max(2);
    let mut best = (0.0_f64, manifold.charts[0].id, manifold.charts[0].interval().lo);
    let mut count = 0;
    for c in &manifold.charts {
        let d = c.interval();
        for k in 0..per_chart {
            let r = if k == per_chart - 1 { d.hi } else { d.lo + d.width() * k as f64 / (per_chart - 1) as f64 };
            let v = c.psi(r)?.abs();
            count += 1;
            if v > best.0 {
                best = (v, c.id, r);
            }
        }
    }
    let boundary_lapses = manifold
        .gluings
        .iter()
        .filter(|g| g.kind == SurfaceKind::PhotonSphere)
        .map(|g| Ok(manifold.chart(g.right.chart)?.profile.metric(g.right.r).lapse))
        .collect::<Result<Vec<f64>>>()?;
    let ok = best.0 < 1.0 && boundary_lapses.iter().all(|n| *n < 1.0);
    Ok(PsiBoundReport { samples: count, max_abs_psi: best.0, at_chart: best.1, at_r: best.2, boundary_lapses, ok })
}

impl PsiBoundReport {
    pub fn require(&self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            Err(Error::PsiBound { chart: self.at_chart, r: self.at_r, value: self.max_abs_psi })
        }
    }
}
