//! Very compact bodies: constant-density fluid interior with a vacuum exterior.

use serde::Serialize;

use crate::audit::{audit_sphere, monotonicity_scan, IdentityReport};
use crate::error::Result;
use crate::geodesic::photon_sphere_search;
use crate::profile::{RadialProfile, BUCHDAHL_LIMIT};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarScenarioReport {
    pub mass: f64,
    pub radius: f64,
    pub buchdahl_ratio: f64,
    pub buchdahl_limit: f64,
    /// `R_b < 3m`: the body sits inside its own photon sphere.
    pub very_compact: bool,
    pub vacuum_region: [f64; 2],
    /// Fermat-residual roots in the vacuum region.
    pub photon_sphere_radii: Vec<f64>,
    pub audits: Vec<IdentityReport>,
    pub all_audits_pass: bool,
    /// Largest increase of `H/N` along the vacuum region (256 samples).
    pub vacuum_monotonicity_violation: f64,
    /// Fermat-residual roots inside the fluid (stable light rings).
    pub interior_light_rings: Vec<f64>,
    pub hypothesis_met: bool,
    pub verdict: String,
}

/// Builds the composite body and reports its photon spheres.
/// Fails with [`crate::Error::Buchdahl`] when `2m/R_b ≥ 8/9`.
pub fn star_scenario(mass: f64, radius: f64, r_hi: f64) -> Result<StarScenarioReport> {
    let star = RadialProfile::star(mass, radius, r_hi)?;
    let vacuum = star.restrict(radius, r_hi)?;
    let interior = star.restrict(0.0, radius)?;

    let photon_sphere_radii = photon_sphere_search(&vacuum);
    let audits = photon_sphere_radii.iter().map(|&r| audit_sphere(&vacuum, r)).collect::<Result<Vec<_>>>()?;
    let all_audits_pass = audits.iter().all(|a| a.is_photon_sphere);
    let interior_light_rings = photon_sphere_search(&interior);
    let vacuum_monotonicity_violation = monotonicity_scan(&vacuum, radius, r_hi, 256)?.max_upward_violation;

    let very_compact = radius < 3.0 * mass;
    let hypothesis_met = very_compact && photon_sphere_radii.len() == 1 && all_audits_pass;
    let verdict = if hypothesis_met {
        format!(
            "photon sphere at r = {:.10} encloses the body; by the n-body uniqueness theorem no second such body \
             can share a static spacetime with it",
            photon_sphere_radii[0]
        )
    } else if !very_compact {
        format!(
            "boundary R_b = {radius} lies outside r = 3m = {}: no photon sphere in the vacuum region, \
             the very-compact hypothesis is unmet",
            3.0 * mass
        )
    } else {
        format!(
            "vacuum region holds {} audited photon sphere(s) (all pass: {all_audits_pass}); hypothesis unmet",
            photon_sphere_radii.len()
        )
    };
    Ok(StarScenarioReport {
        mass,
        radius,
        buchdahl_ratio: 2.0 * mass / radius,
        buchdahl_limit: BUCHDAHL_LIMIT,
        very_compact,
        vacuum_region: [radius, r_hi],
        photon_sphere_radii,
        audits,
        all_audits_pass,
        vacuum_monotonicity_violation,
        interior_light_rings,
        hypothesis_met,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn compact_star_has_one_vacuum_photon_sphere() {
        let rep = star_scenario(1.0, 2.5, 100.0).unwrap();
        assert!((rep.buchdahl_ratio - 0.8).abs() < 1e-15);
        assert_eq!(rep.photon_sphere_radii.len(), 1);
        assert!((rep.photon_sphere_radii[0] - 3.0).abs() <= 3e-10);
        assert!(rep.all_audits_pass && rep.hypothesis_met);
        assert_eq!(rep.vacuum_monotonicity_violation, 0.0);
        // The fluid traps light on a stable ring below R_b.
        assert_eq!(rep.interior_light_rings.len(), 1);
        assert!(rep.interior_light_rings[0] < 2.5);
    }

    #[test]
    fn buchdahl_violation_is_rejected() {
        match star_scenario(1.0, 2.2, 100.0) {
            Err(Error::Buchdahl { ratio }) => assert!((ratio - 2.0 / 2.2).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dilute_star_has_no_vacuum_photon_sphere() {
        let rep = star_scenario(1.0, 3.5, 100.0).unwrap();
        assert!(rep.photon_sphere_radii.is_empty());
        assert!(!rep.hypothesis_met);
        assert!(rep.verdict.contains("unmet"));
        assert!(rep.interior_light_rings.is_empty());
    }
}
