//! Finite-difference curvature oracle.
//!
//! Works on the full coordinate metric `g_ij(r, δ, φ)` with `θ = π/2 + δ`:
//! centred differences of the components give `∂g` and `∂∂g`, from which
//! Christoffel symbols, their derivatives, Riemann, Ricci and the Hessian of
//! the lapse are assembled numerically. None of the closed-form expressions
//! in [`crate::curvature`] are used. All arithmetic runs in double-double so
//! that the stencil's cancellation error stays far below its `O(h²)`
//! truncation error for every step used in the convergence studies.

// Tensor index loops read closer to the formulas than iterator chains.
#![allow(clippy::needless_range_loop)]

use serde::Serialize;

use crate::curvature::CurvatureSample;
use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::real::{Dd, Real};

type Mat = [[Dd; 3]; 3];

fn zero() -> Dd {
    Dd::cst(0.0)
}

fn zmat() -> Mat {
    [[zero(); 3]; 3]
}

/// `cos δ` by its Taylor series (δ is a small offset from the equator).
fn cos_small(delta: Dd) -> Dd {
    let d2 = delta * delta;
    let mut term = Dd::cst(1.0);
    let mut sum = term;
    for k in 1..30 {
        term = -(term * d2) / Dd::cst(((2 * k - 1) * (2 * k)) as f64);
        sum = sum + term;
        if term.value().abs() < 1e-36 {
            break;
        }
    }
    sum
}

struct Point {
    g: Mat,
    lapse: Dd,
}

fn eval_point(profile: &RadialProfile, r: Dd, delta: Dd) -> Point {
    let m = profile.metric(r);
    let c = cos_small(delta);
    let mut g = zmat();
    g[0][0] = m.radial * m.radial;
    g[1][1] = m.areal * m.areal;
    g[2][2] = m.areal * m.areal * c * c;
    Point { g, lapse: m.lapse }
}

fn inverse(g: &Mat) -> Mat {
    let c00 = g[1][1] * g[2][2] - g[1][2] * g[2][1];
    let c01 = g[1][2] * g[2][0] - g[1][0] * g[2][2];
    let c02 = g[1][0] * g[2][1] - g[1][1] * g[2][0];
    let det = g[0][0] * c00 + g[0][1] * c01 + g[0][2] * c02;
    let inv_det = det.recip();
    let mut out = zmat();
    out[0][0] = c00 * inv_det;
    out[1][0] = c01 * inv_det;
    out[2][0] = c02 * inv_det;
    out[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) * inv_det;
    out[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) * inv_det;
    out[2][1] = (g[0][1] * g[2][0] - g[0][0] * g[2][1]) * inv_det;
    out[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) * inv_det;
    out[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) * inv_det;
    out[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) * inv_det;
    out
}

/// Angular step paired with radial step `h` at radius `r`. The angular
/// dependence is fixed (`cos²δ`), so its step is kept well below the radial
/// one; double-double arithmetic keeps the rounding floor negligible.
fn angular_step(h: f64, r: f64) -> f64 {
    1e-2 * (h / r.abs().max(h)).min(0.05)
}

pub fn fd_curvature_oracle(profile: &RadialProfile, r: f64, h: f64) -> Result<CurvatureSample> {
    let d = profile.domain();
    let (lo, hi) = (r - 2.0 * h, r + 2.0 * h);
    if !(h > 0.0) || lo < d.lo || hi > d.hi {
        return Err(Error::StencilOutsideDomain { lo, hi });
    }
    let steps = [h, angular_step(h, r), angular_step(h, r)];

    // 3×3×3 stencil indexed by offsets in {-1, 0, 1}.
    let idx = |a: [i32; 3]| ((a[0] + 1) * 9 + (a[1] + 1) * 3 + (a[2] + 1)) as usize;
    let mut pts: Vec<Point> = Vec::with_capacity(27);
    for a0 in -1..=1 {
        for a1 in -1..=1 {
            for _a2 in -1..=1 {
                // Nothing depends on φ; the φ offsets reuse the same evaluation.
                let rr = Dd::cst(r) + Dd::cst(a0 as f64) * Dd::cst(steps[0]);
                let dl = Dd::cst(a1 as f64) * Dd::cst(steps[1]);
                pts.push(eval_point(profile, rr, dl));
            }
        }
    }
    let at = |a: [i32; 3]| &pts[idx(a)];
    let unit = |k: usize, s: i32| {
        let mut a = [0; 3];
        a[k] = s;
        a
    };
    let pair = |k: usize, sk: i32, l: usize, sl: i32| {
        let mut a = [0; 3];
        a[k] = sk;
        a[l] = sl;
        a
    };

    let center = at([0, 0, 0]);
    let g = center.g;
    let hs: [Dd; 3] = [Dd::cst(steps[0]), Dd::cst(steps[1]), Dd::cst(steps[2])];

    // dg[k][i][j] = ∂_k g_ij, ddg[k][l][i][j] = ∂_k ∂_l g_ij, same for N.
    let mut dg = [zmat(); 3];
    let mut ddg = [[zmat(); 3]; 3];
    let mut dn = [zero(); 3];
    let mut ddn = [[zero(); 3]; 3];
    for k in 0..3 {
        let (p, m) = (at(unit(k, 1)), at(unit(k, -1)));
        let two_h = Dd::cst(2.0) * hs[k];
        let h2 = hs[k] * hs[k];
        for i in 0..3 {
            for j in 0..3 {
                dg[k][i][j] = (p.g[i][j] - m.g[i][j]) / two_h;
                ddg[k][k][i][j] = (p.g[i][j] - Dd::cst(2.0) * g[i][j] + m.g[i][j]) / h2;
            }
        }
        dn[k] = (p.lapse - m.lapse) / two_h;
        ddn[k][k] = (p.lapse - Dd::cst(2.0) * center.lapse + m.lapse) / h2;
        for l in (k + 1)..3 {
            let pp = at(pair(k, 1, l, 1));
            let pm = at(pair(k, 1, l, -1));
            let mp = at(pair(k, -1, l, 1));
            let mm = at(pair(k, -1, l, -1));
            let denom = Dd::cst(4.0) * hs[k] * hs[l];
            for i in 0..3 {
                for j in 0..3 {
                    let v = (pp.g[i][j] - pm.g[i][j] - mp.g[i][j] + mm.g[i][j]) / denom;
                    ddg[k][l][i][j] = v;
                    ddg[l][k][i][j] = v;
                }
            }
            let v = (pp.lapse - pm.lapse - mp.lapse + mm.lapse) / denom;
            ddn[k][l] = v;
            ddn[l][k] = v;
        }
    }

    let ginv = inverse(&g);
    // ∂_m g^{ij} = −g^{ia} ∂_m g_ab g^{bj}
    let mut dginv = [zmat(); 3];
    for m in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = zero();
                for a in 0..3 {
                    for b in 0..3 {
                        s = s + ginv[i][a] * dg[m][a][b] * ginv[b][j];
                    }
                }
                dginv[m][i][j] = -s;
            }
        }
    }

    let half = Dd::cst(0.5);
    // Γ^i_jk and ∂_m Γ^i_jk
    let mut gamma = [zmat(); 3];
    let mut dgamma = [[zmat(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut s = zero();
                for l in 0..3 {
                    s = s + ginv[i][l] * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k]);
                }
                gamma[i][j][k] = half * s;
                for m in 0..3 {
                    let mut t = zero();
                    for l in 0..3 {
                        t = t
                            + dginv[m][i][l] * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k])
                            + ginv[i][l] * (ddg[m][j][l][k] + ddg[m][k][l][j] - ddg[m][l][j][k]);
                    }
                    dgamma[m][i][j][k] = half * t;
                }
            }
        }
    }

    // Ric_jl = R^i_jil with R^i_jkl = ∂_k Γ^i_lj − ∂_l Γ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj
    let mut ric = zmat();
    for j in 0..3 {
        for l in 0..3 {
            let mut s = zero();
            for i in 0..3 {
                s = s + dgamma[i][i][l][j] - dgamma[l][i][i][j];
                for m in 0..3 {
                    s = s + gamma[i][i][m] * gamma[m][l][j] - gamma[i][l][m] * gamma[m][i][j];
                }
            }
            ric[j][l] = s;
        }
    }

    let mut hess = zmat();
    for i in 0..3 {
        for j in 0..3 {
            let mut s = ddn[i][j];
            for k in 0..3 {
                s = s - gamma[k][i][j] * dn[k];
            }
            hess[i][j] = s;
        }
    }

    let mut scalar = zero();
    let mut lap = zero();
    for i in 0..3 {
        for j in 0..3 {
            scalar = scalar + ginv[i][j] * ric[i][j];
            lap = lap + ginv[i][j] * hess[i][j];
        }
    }

    // ν = ∇r/|∇r|, e = ∂_δ/|∂_δ|
    let norm = ginv[0][0].sqrt();
    let nu: [Dd; 3] = [ginv[0][0] / norm, ginv[1][0] / norm, ginv[2][0] / norm];
    let quad_nu = |t: &Mat| {
        let mut s = zero();
        for i in 0..3 {
            for j in 0..3 {
                s = s + nu[i] * nu[j] * t[i][j];
            }
        }
        s
    };
    let ric_nn = quad_nu(&ric);
    let hess_nn = quad_nu(&hess);
    let ric_tt = ric[1][1] / g[1][1];
    let hess_tt = hess[1][1] / g[1][1];
    let lapse = center.lapse;

    Ok(CurvatureSample {
        r,
        ric_nn: ric_nn.value(),
        ric_tt: ric_tt.value(),
        scalar: scalar.value(),
        hess_nn: hess_nn.value(),
        hess_tt: hess_tt.value(),
        lap_n: lap.value(),
        vac_residual_nn: (lapse * ric_nn - hess_nn).value(),
        vac_residual_tt: (lapse * ric_tt - hess_tt).value(),
        scalar_residual: scalar.value(),
        lap_residual: lap.value(),
    })
}

/// Richardson combination `(4·O(h/2) − O(h))/3` of two oracle runs (fourth order).
pub fn fd_curvature_oracle_extrapolated(profile: &RadialProfile, r: f64, h: f64) -> Result<CurvatureSample> {
    let coarse = fd_curvature_oracle(profile, r, h)?;
    let fine = fd_curvature_oracle(profile, r, 0.5 * h)?;
    let x = |f: f64, c: f64| (4.0 * f - c) / 3.0;
    Ok(CurvatureSample {
        r,
        ric_nn: x(fine.ric_nn, coarse.ric_nn),
        ric_tt: x(fine.ric_tt, coarse.ric_tt),
        scalar: x(fine.scalar, coarse.scalar),
        hess_nn: x(fine.hess_nn, coarse.hess_nn),
        hess_tt: x(fine.hess_tt, coarse.hess_tt),
        lap_n: x(fine.lap_n, coarse.lap_n),
        vac_residual_nn: x(fine.vac_residual_nn, coarse.vac_residual_nn),
        vac_residual_tt: x(fine.vac_residual_tt, coarse.vac_residual_tt),
        scalar_residual: x(fine.scalar_residual, coarse.scalar_residual),
        lap_residual: x(fine.lap_residual, coarse.lap_residual),
    })
}

/// Convergence of the oracle towards a reference sample over a ladder of steps.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub r: f64,
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Observed order between consecutive steps; `None` when both errors sit
    /// at the rounding floor.
    pub rates: Vec<Option<f64>>,
    /// Measured `C` in `|Δ| ≤ C h²` (largest over the ladder).
    pub constant: f64,
}

/// Errors below this are treated as exact agreement when measuring rates.
pub const RATE_FLOOR: f64 = 1e-20;

pub fn oracle_convergence(
    profile: &RadialProfile,
    reference: &CurvatureSample,
    steps: &[f64],
) -> Result<ConvergenceReport> {
    let r = reference.r;
    let errors = steps
        .iter()
        .map(|&h| Ok(fd_curvature_oracle(profile, r, h)?.max_abs_diff(reference)))
        .collect::<Result<Vec<f64>>>()?;
    let rates =
        errors
            .windows(2)
            .zip(steps.windows(2))
            .map(|(e, h)| {
                if e[0] < RATE_FLOOR && e[1] < RATE_FLOOR {
                    None
                } else {
                    Some((e[0] / e[1]).ln() / (h[0] / h[1]).ln())
                }
            })
            .collect();
    let constant = errors.iter().zip(steps).fold(0.0_f64, |acc, (e, h)| acc.max(e / (h * h)));
    Ok(ConvergenceReport { r, steps: steps.to_vec(), errors, rates, constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::curvature_at;

    #[test]
    fn flat_space_is_flat() {
        let p = RadialProfile::schwarzschild_family(0.0, 0.5, 50.0).unwrap();
        let c = fd_curvature_oracle(&p, 5.0, 1e-3).unwrap();
        assert!(c.max_curvature() <= 1e-9 && c.max_vacuum_residual() <= 1e-9, "{c:?}");
    }

    #[test]
    fn agrees_with_closed_form_quadratically() {
        let p = RadialProfile::schwarzschild_exterior(1.0, 2.5, 50.0).unwrap();
        let exact = curvature_at(&p, 5.0).unwrap();
        let rep = oracle_convergence(&p, &exact, &[1e-2, 1e-3, 1e-4]).unwrap();
        for rate in rep.rates.iter().flatten() {
            assert!((rate - 2.0).abs() <= 0.2, "{rep:?}");
        }
        assert!(rep.errors[1] <= rep.constant * 1e-6 * 1.0000001);
    }

    #[test]
    fn stencil_must_fit() {
        let p = RadialProfile::schwarzschild_exterior(1.0, 3.0, 50.0).unwrap();
        assert!(matches!(fd_curvature_oracle(&p, 3.01, 1e-2), Err(Error::StencilOutsideDomain { .. })));
        assert!(fd_curvature_oracle(&p, 3.02, 1e-2).is_ok());
    }

    #[test]
    fn cos_series() {
        for d in [0.0, 1e-3, 0.05, 0.1] {
            assert!((cos_small(Dd::cst(d)).value() - f64::cos(d)).abs() < 1e-16);
        }
    }
}
