//! Shared fixtures for the benchmarks.

use photonsphere::RadialProfile;

/// Schwarzschild exterior of mass `m` on `[3m, 100m]`.
pub fn exterior(m: f64) -> RadialProfile {
    RadialProfile::schwarzschild_exterior(m, 3.0 * m, 100.0 * m).expect("valid exterior")
}

/// The wider family chart `[2.1m, 100m]` used for detection.
pub fn family(m: f64) -> RadialProfile {
    RadialProfile::schwarzschild_family(m, 2.1 * m, 100.0 * m).expect("valid profile")
}
