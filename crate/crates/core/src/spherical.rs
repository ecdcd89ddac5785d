//! Spherical functions `phi_s(a_t)` of rank-one groups and the Harish-Chandra
//! c-function.
//!
//! In Jacobi form,
//!
//! ```text
//! phi_s(a_t) = 2F1((rho + s)/2, (rho - s)/2; alpha + 1; -sinh^2 t)
//! ```
//!
//! with `s = i lambda` on the principal series, and
//!
//! ```text
//! phi_s(a_t) ~ c(s) e^{-(rho - s) t},
//! c(s) = 2^{rho - s} Γ(alpha + 1) Γ(s) / (Γ((rho + s)/2) Γ((s + alpha - beta + 1)/2)).
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{is_pole, ln_gamma};
use crate::group::{RankOneGroup, SpectralParam};
use crate::hypergeometric::{hyp2f1_neg_arg, NegArg};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalValue {
    pub value: f64,
    pub t: f64,
    pub param: SpectralParam,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CFunctionValue {
    pub c: Complex64,
    pub param: SpectralParam,
}

/// Upper and lower `2F1` parameters for `phi_s`.
fn jacobi_params(group: &RankOneGroup, s: Complex64) -> (Complex64, Complex64, f64) {
    let rho = group.rho();
    ((rho + s) * 0.5, (rho - s) * 0.5, group.alpha() + 1.0)
}

/// `phi_s(a_t)` for the spectral parameter `param`.
pub fn spherical_fn(group: &RankOneGroup, param: SpectralParam, t: f64) -> Result<SphericalValue> {
    let value = phi(group, param, t)?;
    Ok(SphericalValue { value, t, param })
}

/// Bare value of [`spherical_fn`].
pub fn phi(group: &RankOneGroup, param: SpectralParam, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("t = {t} must be >= 0")));
    }
    param.validate(group)?;
    if param.is_trivial() || t == 0.0 {
        return Ok(1.0);
    }
    phi_at_s(group, param.s(group), t)
}

/// `phi_s(a_t)` for an arbitrary `s` that is real or purely imaginary. No
/// membership check against the spherical dual; used for symmetry tests and
/// by callers that sweep `s` freely.
pub fn phi_at_s(group: &RankOneGroup, s: Complex64, t: f64) -> Result<f64> {
    if s.re != 0.0 && s.im != 0.0 {
        return Err(Error::invalid(format!("s = {s} must be real or purely imaginary")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let (a, b, c) = jacobi_params(group, s);
    hyp2f1_neg_arg(a, b, c, &NegArg::from_sinh_sq(t)?)
}

/// Harish-Chandra c-function. `Trivial` gives 1 (since `phi_rho = 1`).
pub fn hc_c_function(group: &RankOneGroup, param: SpectralParam) -> Result<CFunctionValue> {
    param.validate(group)?;
    let s = param.s(group);
    if s.norm() == 0.0 {
        return Err(Error::Pole("c(s) is singular at s = 0".into()));
    }
    let rho = group.rho();
    let (alpha, beta) = (group.alpha(), group.beta());
    let den1 = (rho + s) * 0.5;
    let den2 = (s + alpha - beta + 1.0) * 0.5;
    if is_pole(s) {
        return Err(Error::Pole(format!("Γ(s) at s = {s}")));
    }
    if is_pole(den1) || is_pole(den2) {
        return Ok(CFunctionValue {
            c: Complex64::new(0.0, 0.0),
            param,
        });
    }
    let ln_c = (rho - s) * std::f64::consts::LN_2 + ln_gamma(Complex64::new(alpha + 1.0, 0.0))?
        + ln_gamma(s)?
        - ln_gamma(den1)?
        - ln_gamma(den2)?;
    Ok(CFunctionValue {
        c: ln_c.exp(),
        param,
    })
}

/// Envelope `e^{-(rho - Re s) t} (1 + t)` of the uniform bound on `|phi_s|`.
pub fn envelope_01(group: &RankOneGroup, param: SpectralParam, t: f64) -> f64 {
    (-(group.rho() - param.re_s(group)) * t).exp() * (1.0 + t)
}

/// Measured constant of the bound `|phi_s(a_t)| <= C e^{-(rho - Re s) t} (1 + t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstant {
    pub param: SpectralParam,
    /// `max |phi_s(a_t)| / envelope` over the grid.
    pub sup: f64,
    /// Grid point attaining the maximum.
    pub argmax: f64,
}

/// Empirical supremum `C*` of `|phi_s(a_t)| e^{(rho - Re s) t} / (1 + t)` on `t_grid`,
/// one entry per parameter.
pub fn certify_bound_01(
    group: &RankOneGroup,
    params: &[SpectralParam],
    t_grid: &[f64],
) -> Result<Vec<BoundConstant>> {
    params
        .iter()
        .map(|&param| {
            let mut best = BoundConstant {
                param,
                sup: 0.0,
                argmax: f64::NAN,
            };
            for &t in t_grid {
                let ratio = phi(group, param, t)?.abs() / envelope_01(group, param, t);
                if ratio > best.sup || best.argmax.is_nan() {
                    best.sup = ratio;
                    best.argmax = t;
                }
            }
            Ok(best)
        })
        .collect()
}
