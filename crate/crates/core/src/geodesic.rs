//! Photon-sphere detection.
//!
//! Two independent criteria: a sphere is a photon sphere when it is totally
//! geodesic in the Fermat metric `N⁻² g` (its Fermat mean curvature
//! vanishes), and when null geodesics launched tangent to it stay on it.

use std::io::Write;

use ode_solvers::dop_shared::IntegrationError;
use ode_solvers::{Dop853, OutputType, SVector, System};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::real::Jet;

/// Number of scan points used to bracket Fermat-residual roots.
pub const SCAN_POINTS: usize = 1024;
/// Relative root tolerance `|Δr| ≤ ROOT_TOL · r`.
pub const ROOT_TOL: f64 = 1e-10;

pub fn fermat_profile(profile: &RadialProfile) -> Result<RadialProfile> {
    profile.fermat()
}

/// Mean curvature of the sphere `{r0}` in the Fermat metric.
pub fn fermat_geodesy_residual(profile: &RadialProfile, r0: f64) -> Result<f64> {
    let m = profile.jets(r0)?;
    if !(m.lapse.v > 0.0) {
        return Err(Error::VanishingLapse { r: r0 });
    }
    let fermat = profile.fermat_unchecked();
    let f = fermat.jets(r0)?;
    Ok(2.0 * f.areal.d1 / (f.radial.v * f.areal.v))
}

fn residual_or_none(profile: &RadialProfile, r: f64) -> Option<f64> {
    fermat_geodesy_residual(profile, r).ok().filter(|v| v.is_finite())
}

/// Bisection interleaved with secant steps on a sign-change bracket.
fn refine_root(f: impl Fn(f64) -> Option<f64>, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> f64 {
    for _ in 0..200 {
        if fa == 0.0 {
            return a;
        }
        if fb == 0.0 {
            return b;
        }
        let width = b - a;
        if width <= 1e-15 * a.abs().max(b.abs()) {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        // Secant only when it lands well inside the bracket.
        let x = if secant > a + 0.05 * width && secant < b - 0.05 * width { secant } else { mid };
        let Some(fx) = f(x) else { break };
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // Follow every secant step with a bisection so the bracket shrinks.
        let mid = 0.5 * (a + b);
        let Some(fm) = f(mid) else { break };
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

/// All sign-change-bracketed roots of the Fermat residual on the domain.
pub fn photon_sphere_search(profile: &RadialProfile) -> Vec<f64> {
    let d = profile.domain();
    let step = d.width() / (SCAN_POINTS - 1) as f64;
    let grid: Vec<(f64, Option<f64>)> = (0..SCAN_POINTS)
        .map(|k| {
            let r = if k == SCAN_POINTS - 1 { d.hi } else { d.lo + step * k as f64 };
            (r, residual_or_none(profile, r))
        })
        .collect();

    let f = |r: f64| residual_or_none(profile, r);
    let mut roots = Vec::new();
    for (k, &(r, v)) in grid.iter().enumerate() {
        if v == Some(0.0) {
            roots.push(r);
            continue;
        }
        if let (Some(va), Some(&(rb, Some(vb)))) = (v, grid.get(k + 1)) {
            if vb != 0.0 && (va < 0.0) != (vb < 0.0) {
                roots.push(refine_root(f, r, va, rb, vb));
            }
        }
    }
    roots
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NullGeodesicState {
    pub lambda: f64,
    pub r: f64,
    pub phi: f64,
    pub p_r: f64,
    /// Conserved energy `E = N² dt/dλ`.
    pub energy: f64,
    /// Conserved angular momentum `L = R² dφ/dλ`.
    pub angular_momentum: f64,
}

impl NullGeodesicState {
    /// `−E²/N² + A² (dr/dλ)² + L²/R²` (zero for a null vector).
    pub fn constraint(&self, profile: &RadialProfile) -> f64 {
        let m = profile.metric(self.r);
        null_constraint(m.lapse, m.radial, m.areal, self.p_r, self.energy, self.angular_momentum)
    }

    /// Tangent launch at `r0` with unit energy in the equatorial plane.
    pub fn tangent(profile: &RadialProfile, r0: f64) -> Result<Self> {
        let m = profile.eval(r0)?;
        if !(m.lapse > 0.0) {
            return Err(Error::VanishingLapse { r: r0 });
        }
        Ok(Self { lambda: 0.0, r: r0, phi: 0.0, p_r: 0.0, energy: 1.0, angular_momentum: m.areal / m.lapse })
    }
}

fn null_constraint(n: f64, a: f64, rr: f64, p_r: f64, e: f64, l: f64) -> f64 {
    -e * e / (n * n) + p_r * p_r / (a * a) + l * l / (rr * rr)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    DomainExit,
    HorizonApproach,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub states: Vec<NullGeodesicState>,
    /// Null-constraint value at every accepted step.
    pub constraints: Vec<f64>,
    pub termination: Termination,
    pub accepted_steps: u32,
    pub rejected_steps: u32,
}

impl Trajectory {
    pub fn last(&self) -> &NullGeodesicState {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Largest `|constraint|/E²` over the accepted steps.
    pub fn max_constraint_violation(&self) -> f64 {
        let e2 = self.states[0].energy.powi(2);
        self.constraints.iter().fold(0.0_f64, |acc, c| acc.max(c.abs() / e2))
    }

    /// Largest relative change of `E` and `L` along the trajectory.
    pub fn max_conserved_drift(&self) -> f64 {
        let first = self.states[0];
        self.states.iter().fold(0.0_f64, |acc, s| {
            let de = ((s.energy - first.energy) / first.energy).abs();
            let dl = if first.angular_momentum == 0.0 {
                s.angular_momentum.abs()
            } else {
                ((s.angular_momentum - first.angular_momentum) / first.angular_momentum).abs()
            };
            acc.max(de).max(dl)
        })
    }

    pub fn max_radial_deviation(&self) -> f64 {
        let r0 = self.states[0].r;
        self.states.iter().fold(0.0_f64, |acc, s| acc.max((s.r - r0).abs()))
    }

    /// CSV with header `lambda,r,phi,p_r,constraint`, one row per accepted step.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["lambda", "r", "phi", "p_r", "constraint"])?;
        for (s, c) in self.states.iter().zip(&self.constraints) {
            out.write_record([s.lambda, s.r, s.phi, s.p_r, *c].iter().map(|v| v.to_string()))?;
        }
        out.flush()
    }
}

type State = SVector<f64, 5>;

struct GeodesicSystem<'a> {
    profile: &'a RadialProfile,
    r_min: f64,
    r_max: f64,
}

/// Lapse below which the ray is considered to have reached a horizon.
const HORIZON_LAPSE: f64 = 1e-6;

impl GeodesicSystem<'_> {
    fn termination(&self, r: f64) -> Option<Termination> {
        if !(r > self.r_min && r < self.r_max) {
            return Some(Termination::DomainExit);
        }
        if !(self.profile.metric(r).lapse > HORIZON_LAPSE) {
            return Some(Termination::HorizonApproach);
        }
        None
    }
}

impl System<f64, State> for GeodesicSystem<'_> {
    fn system(&self, _lambda: f64, y: &State, dy: &mut State) {
        let (r, p_r, e, l) = (y[0], y[2], y[3], y[4]);
        let m = self.profile.metric(Jet::var(r));
        let (n, a, rr) = (m.lapse, m.radial, m.areal);
        dy[0] = p_r / (a.v * a.v);
        dy[1] = l / (rr.v * rr.v);
        // ṗ_r = −∂_r H,  H = ½(−E²/N² + p_r²/A² + L²/R²)
        dy[2] = -e * e * n.d1 / n.v.powi(3) + p_r * p_r * a.d1 / a.v.powi(3) + l * l * rr.d1 / rr.v.powi(3);
        dy[3] = 0.0;
        dy[4] = 0.0;
    }

    fn solout(&mut self, _lambda: f64, y: &State, _dy: &State) -> bool {
        self.termination(y[0]).is_some()
    }
}

/// Adaptive Dormand–Prince 8(5,3) integration of an equatorial null geodesic.
///
/// The ray stops early when it leaves the profile's domain or its lapse
/// drops below `1e-6`. Step-size underflow and similar solver failures are
/// reported as [`Error::Integration`].
pub fn integrate_null_geodesic(
    profile: &RadialProfile,
    init: NullGeodesicState,
    lambda_max: f64,
    tol: f64,
) -> Result<Trajectory> {
    if !(tol > 0.0) || !(lambda_max > init.lambda) {
        return Err(Error::Integration {
            lambda: init.lambda,
            reason: format!("need tol > 0 and lambda_max > lambda0, got tol={tol}, lambda_max={lambda_max}"),
        });
    }
    let c0 = init.constraint(profile);
    let violation = c0.abs() / init.energy.powi(2);
    if !(violation <= 1e-12) {
        return Err(Error::NotNull { violation });
    }
    let sys = GeodesicSystem { profile, r_min: profile.natural_domain().lo, r_max: profile.domain().hi };
    if let Some(t) = sys.termination(init.r) {
        if t == Termination::DomainExit {
            return Err(Error::OutOfDomain { r: init.r, lo: sys.r_min, hi: sys.r_max });
        }
        return Err(Error::VanishingLapse { r: init.r });
    }
    let y0 = State::from([init.r, init.phi, init.p_r, init.energy, init.angular_momentum]);
    let mut solver = Dop853::new(sys, init.lambda, lambda_max, 0.0, y0, tol, tol);
    solver.set_output(OutputType::Sparse);
    let stats = solver.integrate().map_err(|e| {
        let (lambda, reason) = match e {
            IntegrationError::StepSizeUnderflow { x } => (x, "step-size underflow".to_string()),
            IntegrationError::MaxNumStepReached { x, n_step } => (x, format!("step budget of {n_step} exhausted")),
            IntegrationError::StiffnessDetected { x } => (x, "problem became stiff".to_string()),
        };
        Error::Integration { lambda, reason }
    })?;

    let (xs, ys) = solver.results().get();
    let states: Vec<NullGeodesicState> = xs
        .iter()
        .zip(ys)
        .map(|(&lambda, y)| NullGeodesicState {
            lambda,
            r: y[0],
            phi: y[1],
            p_r: y[2],
            energy: y[3],
            angular_momentum: y[4],
        })
        .collect();
    let constraints = states.iter().map(|s| s.constraint(profile)).collect();
    let last_r = states.last().map_or(init.r, |s| s.r);
    let termination = GeodesicSystem { profile, r_min: profile.natural_domain().lo, r_max: profile.domain().hi }
        .termination(last_r)
        .unwrap_or(Termination::Completed);
    Ok(Trajectory {
        states,
        constraints,
        termination,
        accepted_steps: stats.accepted_steps,
        rejected_steps: stats.rejected_steps,
    })
}

pub fn impact_parameter(profile: &RadialProfile, r0: f64) -> Result<f64> {
    let m = profile.eval(r0)?;
    if !(m.lapse > 0.0) {
        return Err(Error::VanishingLapse { r: r0 });
    }
    Ok(m.areal / m.lapse)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrappingVerdict {
    Trapped,
    Escaped,
    FellIn,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrappingOptions {
    /// Affine window `Λ` in units of the mass parameter.
    pub window: f64,
    /// Allowed `|r − r0|` in units of the mass parameter.
    pub tolerance: f64,
    pub integrator_tol: f64,
}

impl Default for TrappingOptions {
    fn default() -> Self {
        Self { window: 50.0, tolerance: 1e-3, integrator_tol: 1e-12 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrappingReport {
    pub r0: f64,
    pub impact_parameter: f64,
    pub max_radial_deviation: f64,
    pub max_constraint_violation: f64,
    pub window: f64,
    pub verdict: TrappingVerdict,
}

/// Launch a tangent ray at `r0` and see whether it stays on the sphere.
pub fn trapping_test(profile: &RadialProfile, r0: f64, opts: &TrappingOptions) -> Result<TrappingReport> {
    let scale = profile.mass_parameter().map(f64::abs).filter(|m| *m > 0.0).unwrap_or(1.0);
    let init = NullGeodesicState::tangent(profile, r0)?;
    let window = opts.window * scale;
    let traj = integrate_null_geodesic(profile, init, window, opts.integrator_tol)?;
    let dev = traj.max_radial_deviation();
    let verdict = if dev <= opts.tolerance * scale && traj.termination == Termination::Completed {
        TrappingVerdict::Trapped
    } else if traj.last().r < r0 {
        TrappingVerdict::FellIn
    } else {
        TrappingVerdict::Escaped
    };
    Ok(TrappingReport {
        r0,
        impact_parameter: init.angular_momentum / init.energy,
        max_radial_deviation: dev,
        max_constraint_violation: traj.max_constraint_violation(),
        window,
        verdict,
    })
}

/// [`trapping_test`] over many radii in parallel; output order follows `radii`.
pub fn trapping_batch(profile: &RadialProfile, radii: &[f64], opts: &TrappingOptions) -> Vec<Result<TrappingReport>> {
    radii.par_iter().map(|&r| trapping_test(profile, r, opts)).collect()
}
