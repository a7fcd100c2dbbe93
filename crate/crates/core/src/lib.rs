//! Executable checks for the geometry of static photon spheres.
//!
//! The crate models static spherically symmetric triples `(M³, g, N)` in a
//! radial chart and provides
//!
//! * closed-form curvature with an independent finite-difference oracle,
//! * photon-sphere detection via the Fermat metric and null-geodesic trapping,
//! * audits of the algebraic identities that hold on a photon sphere,
//! * the neck gluing, doubling and conformal rigidity pipeline, ending with
//!   a Schwarzschild reconstruction,
//! * the very-compact-star scenario with its Buchdahl gate.

// `!(x <= tol)` is used on purpose so that NaN fails every gate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod curvature;
pub mod error;
pub mod geodesic;
pub mod oracle;
pub mod pipeline;
pub mod profile;
pub mod real;
pub mod spline;
pub mod star;

pub use audit::{audit_sphere, component_mass, monotonicity_scan, positivity_check, IdentityReport};
pub use curvature::{
    curvature_at, identity_residuals, surface_geometry, vacuum_scan, CurvatureSample, SurfaceGeometry, TestFunction,
    VacuumScan,
};
pub use error::{Error, Result};
pub use geodesic::{
    fermat_geodesy_residual, fermat_profile, impact_parameter, integrate_null_geodesic, photon_sphere_search,
    trapping_test, NullGeodesicState, Trajectory, TrappingOptions, TrappingReport, TrappingVerdict,
};
pub use oracle::fd_curvature_oracle;
pub use pipeline::{run_pipeline, PipelineOptions, PipelineReport, Verdict};
pub use profile::{Interval, ProfileKind, ProfileSpec, RadialProfile, UCorruption};
pub use star::{star_scenario, StarScenarioReport};
