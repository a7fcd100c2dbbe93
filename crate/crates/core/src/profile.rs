//! Static spherically symmetric triples `(M, g, N)` in a radial chart.
//!
//! A profile carries the lapse `N(r)`, the radial factor `A(r)` with
//! `g_rr = A²` and the areal radius `R(r)`, so that
//! `g = A² dr² + R² Ω` with `Ω` the round unit-sphere metric.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{Jet, Real};
use crate::spline::CubicSpline;

/// Upper edge of the Buchdahl bound on `2m/R_b`.
pub const BUCHDAHL_LIMIT: f64 = 8.0 / 9.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    SchwarzschildExterior,
    SchwarzschildNeck,
    InteriorFluid,
    Tabulated,
    CompositeReference,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || hi.is_nan() {
            return Err(Error::EmptyDomain { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, r: f64) -> bool {
        self.lo <= r && r <= self.hi
    }

    pub fn contains_open(&self, r: f64) -> bool {
        self.lo < r && r < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` equally spaced points strictly inside the interval.
    pub fn interior_grid(&self, n: usize) -> Vec<f64> {
        let step = self.width() / (n as f64 + 1.0);
        (1..=n).map(|k| self.lo + step * k as f64).collect()
    }
}

/// Metric functions at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric<T> {
    pub lapse: T,
    pub radial: T,
    pub areal: T,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Table {
    r: Vec<f64>,
    lapse: CubicSpline,
    radial: CubicSpline,
    areal: CubicSpline,
}

/// Deliberate perturbation of the conformal factor `u`, for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "amount", rename_all = "snake_case")]
pub enum UCorruption {
    #[default]
    None,
    /// `u + c`; stays harmonic.
    Shift(f64),
    /// `u + c·ψ²`; not harmonic.
    Quadratic(f64),
}

/// Conformal rescaling `u⁴ g` with `u = (1 + ψ)/2` and `ψ = sign · scale · N`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Conformal {
    pub(crate) base: RadialProfile,
    pub(crate) psi_scale: f64,
    pub(crate) psi_sign: f64,
    pub(crate) corruption: UCorruption,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Model {
    Schwarzschild { mass: f64 },
    Neck { mu: f64 },
    Fluid { mass: f64, radius: f64 },
    Star { mass: f64, radius: f64 },
    Tabulated(Arc<Table>),
    Fermat(Arc<RadialProfile>),
    Conformal(Arc<Conformal>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    kind: ProfileKind,
    domain: Interval,
    model: Model,
}

fn schwarzschild_lapse<T: Real>(mass: f64, r: T) -> T {
    (T::cst(1.0) - T::cst(2.0 * mass) / r).sqrt()
}

fn fluid_metric<T: Real>(mass: f64, radius: f64, r: T) -> Metric<T> {
    let k = 2.0 * mass / radius.powi(3);
    let inner = (T::cst(1.0) - T::cst(k) * r * r).sqrt();
    let surface = (1.0 - 2.0 * mass / radius).sqrt();
    Metric { lapse: T::cst(1.5 * surface) - T::cst(0.5) * inner, radial: inner.recip(), areal: r }
}

impl RadialProfile {
    /// Spatial Schwarzschild exterior of positive mass.
    pub fn schwarzschild_exterior(mass: f64, r_lo: f64, r_hi: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::NonPositiveMass(mass));
        }
        Self::schwarzschild_family(mass, r_lo, r_hi)
    }

    /// Schwarzschild slice for any real mass (`m ≤ 0` included).
    pub fn schwarzschild_family(mass: f64, r_lo: f64, r_hi: f64) -> Result<Self> {
        let bound = (2.0 * mass).max(0.0);
        if !(r_lo > bound) {
            return Err(Error::DegenerateLowerBound { r_lo, bound });
        }
        Ok(Self {
            kind: ProfileKind::SchwarzschildExterior,
            domain: Interval::new(r_lo, r_hi)?,
            model: Model::Schwarzschild { mass },
        })
    }

    /// The Schwarzschild neck of mass `mu` between horizon `2μ` and photon sphere `3μ`.
    /// The stored lapse is the bare factor `φ = √(1 − 2μ/r)`.
    pub fn schwarzschild_neck(mu: f64) -> Result<Self> {
        Self::neck_between(mu, 3.0 * mu)
    }

    /// A neck of mass `mu` on `[2μ, r_hi]`.
    pub fn neck_between(mu: f64, r_hi: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::NonPositiveMass(mu));
        }
        Ok(Self {
            kind: ProfileKind::SchwarzschildNeck,
            domain: Interval::new(2.0 * mu, r_hi)?,
            model: Model::Neck { mu },
        })
    }

    /// Constant-density perfect-fluid interior on `[0, R_b]`, matched to the
    /// exterior of mass `mass` at `R_b`.
    pub fn interior_fluid(mass: f64, radius: f64) -> Result<Self> {
        let ratio = check_buchdahl(mass, radius)?;
        debug_assert!(ratio < BUCHDAHL_LIMIT);
        Ok(Self {
            kind: ProfileKind::InteriorFluid,
            domain: Interval::new(0.0, radius)?,
            model: Model::Fluid { mass, radius },
        })
    }

    /// Fluid interior on `[0, R_b]` continued by the vacuum exterior up to `r_hi`.
    pub fn star(mass: f64, radius: f64, r_hi: f64) -> Result<Self> {
        check_buchdahl(mass, radius)?;
        if !(r_hi > radius) {
            return Err(Error::EmptyDomain { lo: radius, hi: r_hi });
        }
        Ok(Self {
            kind: ProfileKind::CompositeReference,
            domain: Interval::new(0.0, r_hi)?,
            model: Model::Star { mass, radius },
        })
    }

    pub fn tabulated(r: &[f64], lapse: &[f64], radial: &[f64], areal: &[f64]) -> Result<Self> {
        if lapse.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidTable("lapse must be non-negative".into()));
        }
        if radial.iter().chain(areal).any(|&v| v <= 0.0) {
            return Err(Error::InvalidTable("A and Rareal must be positive".into()));
        }
        let table = Table {
            r: r.to_vec(),
            lapse: CubicSpline::new(r, lapse)?,
            radial: CubicSpline::new(r, radial)?,
            areal: CubicSpline::new(r, areal)?,
        };
        Ok(Self {
            kind: ProfileKind::Tabulated,
            domain: Interval::new(r[0], r[r.len() - 1])?,
            model: Model::Tabulated(Arc::new(table)),
        })
    }

    pub(crate) fn conformal(base: &RadialProfile, psi_scale: f64, psi_sign: f64, corruption: UCorruption) -> Self {
        Self {
            kind: ProfileKind::CompositeReference,
            domain: base.domain,
            model: Model::Conformal(Arc::new(Conformal { base: base.clone(), psi_scale, psi_sign, corruption })),
        }
    }

    pub(crate) fn fermat_unchecked(&self) -> Self {
        Self {
            kind: ProfileKind::CompositeReference,
            domain: self.domain,
            model: Model::Fermat(Arc::new(self.clone())),
        }
    }

    pub(crate) fn model(&self) -> &Model {
        &self.model
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Mass parameter of closed-form models.
    pub fn mass_parameter(&self) -> Option<f64> {
        match &self.model {
            Model::Schwarzschild { mass } | Model::Fluid { mass, .. } | Model::Star { mass, .. } => Some(*mass),
            Model::Neck { mu } => Some(*mu),
            Model::Fermat(base) => base.mass_parameter(),
            Model::Conformal(c) => c.base.mass_parameter(),
            Model::Tabulated(_) => None,
        }
    }

    /// Node abscissae of tabulated data, if any.
    pub fn table_nodes(&self) -> Option<&[f64]> {
        match &self.model {
            Model::Tabulated(t) => Some(&t.r),
            Model::Fermat(base) => base.table_nodes(),
            Model::Conformal(c) => c.base.table_nodes(),
            _ => None,
        }
    }

    /// Largest interval on which the model's formulas remain valid.
    /// Closed-form vacuum exteriors extend to infinity; tabulated data does not.
    pub fn natural_domain(&self) -> Interval {
        match &self.model {
            Model::Schwarzschild { .. } | Model::Star { .. } => Interval { lo: self.domain.lo, hi: f64::INFINITY },
            Model::Fermat(base) => Interval { lo: self.domain.lo, hi: base.natural_domain().hi },
            Model::Conformal(c) => Interval { lo: self.domain.lo, hi: c.base.natural_domain().hi },
            _ => self.domain,
        }
    }

    /// Same model on a sub-interval of the natural domain.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let nat = self.natural_domain();
        let domain = Interval::new(lo, hi)?;
        if !nat.contains(lo) {
            return Err(Error::OutOfDomain { r: lo, lo: nat.lo, hi: nat.hi });
        }
        if !nat.contains(hi) {
            return Err(Error::OutOfDomain { r: hi, lo: nat.lo, hi: nat.hi });
        }
        let model = match &self.model {
            Model::Fermat(base) => Model::Fermat(Arc::new(base.restrict(lo, hi)?)),
            Model::Conformal(c) => {
                Model::Conformal(Arc::new(Conformal { base: c.base.restrict(lo, hi)?, ..(**c).clone() }))
            }
            m => m.clone(),
        };
        Ok(Self { kind: self.kind, domain, model })
    }

    /// Unchecked evaluation in any scalar type.
    pub fn metric<T: Real>(&self, r: T) -> Metric<T> {
        match &self.model {
            Model::Schwarzschild { mass } => {
                let n = schwarzschild_lapse(*mass, r);
                Metric { lapse: n, radial: n.recip(), areal: r }
            }
            Model::Neck { mu } => {
                let phi = schwarzschild_lapse(*mu, r);
                Metric { lapse: phi, radial: phi.recip(), areal: r }
            }
            Model::Fluid { mass, radius } => fluid_metric(*mass, *radius, r),
            Model::Star { mass, radius } => {
                if r.value() <= *radius {
                    fluid_metric(*mass, *radius, r)
                } else {
                    let n = schwarzschild_lapse(*mass, r);
                    Metric { lapse: n, radial: n.recip(), areal: r }
                }
            }
            Model::Tabulated(t) => Metric { lapse: t.lapse.eval(r), radial: t.radial.eval(r), areal: t.areal.eval(r) },
            Model::Fermat(base) => {
                let m = base.metric(r);
                let inv = m.lapse.recip();
                Metric { lapse: T::cst(1.0), radial: m.radial * inv, areal: m.areal * inv }
            }
            Model::Conformal(c) => {
                let m = c.base.metric(r);
                let psi = T::cst(c.psi_sign * c.psi_scale) * m.lapse;
                let u = (T::cst(1.0) + psi) * T::cst(0.5);
                let u = match c.corruption {
                    UCorruption::None => u,
                    UCorruption::Shift(k) => u + T::cst(k),
                    UCorruption::Quadratic(k) => u + T::cst(k) * psi * psi,
                };
                let u2 = u * u;
                Metric { lapse: T::cst(1.0), radial: u2 * m.radial, areal: u2 * m.areal }
            }
        }
    }

    fn check_in(&self, domain: Interval, r: f64) -> Result<()> {
        if !domain.contains(r) {
            return Err(Error::OutOfDomain { r, lo: domain.lo, hi: domain.hi });
        }
        Ok(())
    }

    fn nondegenerate(r: f64, m: Metric<Jet>) -> Result<Metric<Jet>> {
        let ok = m.lapse.is_finite()
            && m.radial.is_finite()
            && m.areal.is_finite()
            && m.radial.v > 0.0
            && m.areal.v > 0.0
            && m.lapse.v >= 0.0;
        if ok {
            Ok(m)
        } else {
            Err(Error::OneSidedLimit { r })
        }
    }

    /// Values and first two derivatives of `N`, `A`, `R` at `r` (closed domain).
    pub fn jets(&self, r: f64) -> Result<Metric<Jet>> {
        self.check_in(self.domain, r)?;
        Self::nondegenerate(r, self.metric(Jet::var(r)))
    }

    /// As [`jets`](Self::jets) but accepting radii in the natural domain.
    pub fn jets_extended(&self, r: f64) -> Result<Metric<Jet>> {
        self.check_in(self.natural_domain(), r)?;
        Self::nondegenerate(r, self.metric(Jet::var(r)))
    }

    pub fn eval(&self, r: f64) -> Result<Metric<f64>> {
        let j = self.jets(r)?;
        Ok(Metric { lapse: j.lapse.v, radial: j.radial.v, areal: j.areal.v })
    }

    pub fn lapse(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.lapse)
    }

    pub fn radial_factor(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.radial)
    }

    pub fn areal_radius(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.areal)
    }

    /// Fermat (optical) profile `N⁻² g`: `A_F = A/N`, `R_F = R/N`, unit lapse.
    pub fn fermat(&self) -> Result<Self> {
        let d = self.domain;
        let probes = std::iter::once(d.lo)
            .chain(d.interior_grid(64))
            .chain(std::iter::once(d.hi))
            .chain(self.table_nodes().map(<[f64]>::to_vec).unwrap_or_default());
        for r in probes {
            let n = self.metric(r).lapse;
            if !(n > 0.0) {
                return Err(Error::VanishingLapse { r });
            }
        }
        Ok(self.fermat_unchecked())
    }
}

fn check_buchdahl(mass: f64, radius: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    if !(radius > 0.0) {
        return Err(Error::EmptyDomain { lo: 0.0, hi: radius });
    }
    let ratio = 2.0 * mass / radius;
    if !(ratio < BUCHDAHL_LIMIT) {
        return Err(Error::Buchdahl { ratio });
    }
    Ok(ratio)
}

/// On-disk profile description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Schwarzschild {
        mass: f64,
        r_lo: f64,
        r_hi: f64,
    },
    Neck {
        mu: f64,
    },
    InteriorFluid {
        mass: f64,
        radius: f64,
    },
    Star {
        mass: f64,
        radius: f64,
        r_hi: f64,
    },
    Tabulated {
        r: Vec<f64>,
        #[serde(rename = "N")]
        lapse: Vec<f64>,
        #[serde(rename = "A")]
        radial: Vec<f64>,
        #[serde(rename = "Rareal")]
        areal: Vec<f64>,
    },
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        match self {
            ProfileSpec::Schwarzschild { mass, r_lo, r_hi } => RadialProfile::schwarzschild_family(*mass, *r_lo, *r_hi),
            ProfileSpec::Neck { mu } => RadialProfile::schwarzschild_neck(*mu),
            ProfileSpec::InteriorFluid { mass, radius } => RadialProfile::interior_fluid(*mass, *radius),
            ProfileSpec::Star { mass, radius, r_hi } => RadialProfile::star(*mass, *radius, *r_hi),
            ProfileSpec::Tabulated { r, lapse, radial, areal } => RadialProfile::tabulated(r, lapse, radial, areal),
        }
    }

    /// Samples `profile` at `nodes` into a tabulated description.
    pub fn sample(profile: &RadialProfile, nodes: &[f64]) -> Result<Self> {
        let mut lapse = Vec::with_capacity(nodes.len());
        let mut radial = Vec::with_capacity(nodes.len());
        let mut areal = Vec::with_capacity(nodes.len());
        for &r in nodes {
            let m = profile.eval(r)?;
            lapse.push(m.lapse);
            radial.push(m.radial);
            areal.push(m.areal);
        }
        Ok(ProfileSpec::Tabulated { r: nodes.to_vec(), lapse, radial, areal })
    }
}

/// `n` nodes on `[lo, hi]` with geometric spacing (denser at small radii).
pub fn geometric_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    let mut nodes: Vec<f64> = (0..n).map(|k| lo * (ratio * k as f64 / (n - 1) as f64).exp()).collect();
    nodes[0] = lo;
    nodes[n - 1] = hi;
    nodes
}
