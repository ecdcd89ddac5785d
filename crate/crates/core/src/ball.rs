//! Haar measure in Cartan coordinates, ball volumes and ball-averaged
//! spherical functions.
//!
//! The radial density of Haar measure is `Δ(t) = sinh(t)^{n1} sinh(2t)^{n2}`,
//! so `m(B_t) = ∫_0^t Δ` grows like `e^{2 rho t}`. Integrals over `[0, t]` are
//! computed against `Δ(τ) e^{-2 rho t}`, which stays bounded for all `t`.
//!
//! The ball average of a spherical function is
//! `psi_s(t) = ∫_0^t phi_s(a_τ) Δ(τ) dτ / ∫_0^t Δ(τ) dτ`; the `K`-integrals
//! drop out by bi-invariance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{RankOneGroup, SpectralParam};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::spherical::{hc_c_function, phi};

/// `ln sinh t` for `t > 0`, stable for large `t`.
fn ln_sinh(t: f64) -> f64 {
    if t < 20.0 {
        t.sinh().ln()
    } else {
        t + (-(-2.0 * t).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// Radial Haar density `Δ(t)`.
pub fn delta(group: &RankOneGroup, t: f64) -> f64 {
    let n1 = group.n1() as i32;
    let n2 = group.n2() as i32;
    t.sinh().powi(n1) * (2.0 * t).sinh().powi(n2)
}

/// `Δ'(t)`.
pub fn delta_derivative(group: &RankOneGroup, t: f64) -> f64 {
    let n1 = group.n1() as i32;
    let n2 = group.n2() as i32;
    let (sh, ch) = (t.sinh(), t.cosh());
    let (sh2, ch2) = ((2.0 * t).sinh(), (2.0 * t).cosh());
    let mut d = f64::from(n1) * sh.powi(n1 - 1) * ch * sh2.powi(n2);
    if n2 > 0 {
        d += 2.0 * f64::from(n2) * sh.powi(n1) * sh2.powi(n2 - 1) * ch2;
    }
    d
}

/// `ln Δ(t) - 2 rho anchor`.
fn ln_delta_scaled(group: &RankOneGroup, tau: f64, anchor: f64) -> f64 {
    if tau <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut ln = f64::from(group.n1()) * ln_sinh(tau) - 2.0 * group.rho() * anchor;
    if group.n2() > 0 {
        ln += f64::from(group.n2()) * ln_sinh(2.0 * tau);
    }
    ln
}

/// `e^{-2 rho anchor} ∫_a^b f(τ) Δ(τ) dτ`.
fn scaled_integral<F>(
    group: &RankOneGroup,
    mut f: F,
    a: f64,
    b: f64,
    anchor: f64,
    config: &QuadratureConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(
        |tau| {
            let w = ln_delta_scaled(group, tau, anchor).exp();
            if w == 0.0 {
                Ok(0.0)
            } else {
                Ok(f(tau)? * w)
            }
        },
        a,
        b,
        config,
    )
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("radius t = {t} must be finite and >= 0")))
    }
}

/// `m(B_t) e^{-2 rho t}`, bounded for all `t`.
pub fn scaled_ball_volume(group: &RankOneGroup, t: f64, config: &QuadratureConfig) -> Result<f64> {
    check_t(t)?;
    scaled_integral(group, |_| Ok(1.0), 0.0, t, t, config)
}

/// `m(B_t) = ∫_0^t Δ`.
pub fn ball_volume(group: &RankOneGroup, t: f64) -> Result<f64> {
    ball_volume_with(group, t, &QuadratureConfig::default())
}

pub fn ball_volume_with(group: &RankOneGroup, t: f64, config: &QuadratureConfig) -> Result<f64> {
    Ok(scaled_ball_volume(group, t, config)? * (2.0 * group.rho() * t).exp())
}

/// `m(B_{t+eps} \ B_t)`, integrated directly rather than by subtraction.
pub fn shell_volume(group: &RankOneGroup, t: f64, eps: f64) -> Result<f64> {
    check_t(t)?;
    let anchor = t + eps;
    let cfg = QuadratureConfig::default();
    Ok(scaled_integral(group, |_| Ok(1.0), t, t + eps, anchor, &cfg)? * (2.0 * group.rho() * anchor).exp())
}

/// `m(B_{t+eps} \ B_t) / (eps m(B_t))`, bounded for `t >= 1`, `0 < eps < 1`.
pub fn volume_regularity(group: &RankOneGroup, t: f64, eps: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::invalid(format!("volume regularity needs t >= 1, got {t}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps = {eps} must lie in (0, 1)")));
    }
    let cfg = QuadratureConfig::default();
    // both scaled to the same anchor t
    let shell = scaled_integral(group, |_| Ok(1.0), t, t + eps, t, &cfg)?;
    let ball = scaled_ball_volume(group, t, &cfg)?;
    Ok(shell / (eps * ball))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiValue {
    pub value: f64,
    pub t: f64,
    pub param: SpectralParam,
}

/// Ball average `psi_s(t)` of the spherical function.
pub fn psi(group: &RankOneGroup, param: SpectralParam, t: f64) -> Result<PsiValue> {
    psi_with(group, param, t, &QuadratureConfig::default())
}

pub fn psi_with(
    group: &RankOneGroup,
    param: SpectralParam,
    t: f64,
    config: &QuadratureConfig,
) -> Result<PsiValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("psi needs t > 0, got {t}")));
    }
    param.validate(group)?;
    let value = if param.is_trivial() {
        1.0
    } else {
        let num = scaled_integral(group, |tau| phi(group, param, tau), 0.0, t, t, config)?;
        let den = scaled_ball_volume(group, t, config)?;
        num / den
    };
    Ok(PsiValue { value, t, param })
}

/// `psi_s` on an increasing grid of positive times, integrating each gap once.
pub fn psi_on_grid(group: &RankOneGroup, param: SpectralParam, times: &[f64]) -> Result<Vec<f64>> {
    param.validate(group)?;
    if let Some(&t) = times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::invalid(format!("psi needs t > 0, got {t}")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("psi grid must be non-decreasing"));
    }
    if param.is_trivial() {
        return Ok(vec![1.0; times.len()]);
    }
    let cfg = QuadratureConfig::default();
    let two_rho = 2.0 * group.rho();
    let (mut prev, mut num, mut den) = (0.0, 0.0, 0.0);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let decay = (-two_rho * (t - prev)).exp();
        num = num * decay + scaled_integral(group, |tau| phi(group, param, tau), prev, t, t, &cfg)?;
        den = den * decay + scaled_integral(group, |_| Ok(1.0), prev, t, t, &cfg)?;
        out.push(num / den);
        prev = t;
    }
    Ok(out)
}

/// Empirical constant `C = max |psi_s(t)| e^{(rho - r) t} / t` over `t_grid`
/// and all `params`; zero for an empty parameter set.
pub fn psi_bound_check(
    group: &RankOneGroup,
    params: &[SpectralParam],
    t_grid: &[f64],
    r: f64,
) -> Result<f64> {
    if let Some(&t) = t_grid.iter().find(|t| !(**t >= 1.0)) {
        return Err(Error::invalid(format!("bound grid must satisfy t >= 1, got {t}")));
    }
    for p in params {
        if p.re_s(group) > r {
            return Err(Error::invalid(format!(
                "{p} has Re s = {} above r = {r}",
                p.re_s(group)
            )));
        }
    }
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sup = 0.0f64;
    for &p in params {
        let values = psi_on_grid(group, p, &sorted)?;
        for (&t, v) in sorted.iter().zip(values) {
            sup = sup.max(v.abs() * ((group.rho() - r) * t).exp() / t);
        }
    }
    Ok(sup)
}

/// Leading constant of `psi_s(t) ~ c e^{-(rho - s) t}` for a complementary
/// parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticConstant {
    /// Aitken-accelerated limit.
    pub value: f64,
    /// `(t, psi_s(t) e^{(rho - s) t})` at the sample times.
    pub samples: Vec<(f64, f64)>,
    /// `|value - last sample| / |value|`.
    pub relative_change: f64,
    /// `c(s) 2 rho / (rho + s)` from the c-function.
    pub from_c_function: f64,
}

/// Limit of `psi_s(t) e^{(rho - s) t}` from samples at `t = 20, 30, 40`.
pub fn psi_asymptotic_constant(group: &RankOneGroup, param: SpectralParam) -> Result<AsymptoticConstant> {
    psi_asymptotic_constant_at(group, param, [20.0, 30.0, 40.0])
}

/// As [`psi_asymptotic_constant`] with custom, equally spaced sample times.
pub fn psi_asymptotic_constant_at(
    group: &RankOneGroup,
    param: SpectralParam,
    times: [f64; 3],
) -> Result<AsymptoticConstant> {
    let s = match param {
        SpectralParam::Complementary(s) => s,
        other => {
            return Err(Error::invalid(format!(
                "asymptotic constant needs a complementary parameter, got {other}"
            )))
        }
    };
    param.validate(group)?;
    if s >= group.rho() {
        return Err(Error::invalid("s = rho is reserved for the trivial representation"));
    }
    let spacing = times[1] - times[0];
    if !(spacing > 0.0 && (times[2] - times[1] - spacing).abs() <= 1e-12 * spacing) {
        return Err(Error::invalid("sample times must be increasing and equally spaced"));
    }
    let psis = psi_on_grid(group, param, &times)?;
    let g: Vec<f64> = times
        .iter()
        .zip(&psis)
        .map(|(&t, &v)| v * ((group.rho() - s) * t).exp())
        .collect();
    let (d1, d2) = (g[1] - g[0], g[2] - g[1]);
    let denom = d2 - d1;
    let value = if denom == 0.0 || d2 == 0.0 {
        g[2]
    } else {
        g[2] - d2 * d2 / denom
    };
    let relative_change = ((value - g[2]) / value).abs();
    if !(relative_change <= 1e-4) {
        return Err(Error::convergence(
            "asymptotic constant",
            format!(
                "extrapolated {value} moved {relative_change:e} from psi e^((rho-s)t) = {} at t = {}",
                g[2], times[2]
            ),
        ));
    }
    let c = hc_c_function(group, param)?.c.re;
    Ok(AsymptoticConstant {
        value,
        samples: times.iter().copied().zip(g).collect(),
        relative_change,
        from_c_function: c * 2.0 * group.rho() / (group.rho() + s),
    })
}

/// Both sides of `|psi(t + eps) - psi(t)| <= m(B_{t+eps} \ B_t) / m(B_{t+eps})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzCheck {
    pub difference: f64,
    pub bound: f64,
}

impl LipschitzCheck {
    /// `bound - difference`; non-negative when the inequality holds.
    pub fn slack(&self) -> f64 {
        self.bound - self.difference
    }
}

pub fn psi_lipschitz_check(
    group: &RankOneGroup,
    param: SpectralParam,
    t: f64,
    eps: f64,
) -> Result<LipschitzCheck> {
    if !(t >= 1.0) {
        return Err(Error::invalid(format!("Lipschitz check needs t >= 1, got {t}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps = {eps} must lie in (0, 1)")));
    }
    let cfg = QuadratureConfig::default();
    let outer = t + eps;
    let shell = scaled_integral(group, |_| Ok(1.0), t, outer, outer, &cfg)?;
    let ball = scaled_ball_volume(group, outer, &cfg)?;
    let difference = if param.is_trivial() {
        0.0
    } else {
        let v = psi_on_grid(group, param, &[t, outer])?;
        (v[1] - v[0]).abs()
    };
    Ok(LipschitzCheck {
        difference,
        bound: shell / ball,
    })
}

/// Tabulated `m(B_t)` on a uniform knot grid with quintic Hermite
/// interpolation (values, `Δ` and `Δ'` at the knots). Used for inverse-CDF
/// sampling of the radial coordinate.
#[derive(Debug, Clone)]
pub struct VolumeProfile {
    group: RankOneGroup,
    spacing: f64,
    t_max: f64,
    cumulative: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl VolumeProfile {
    /// Default knot spacing is `0.05 / max(rho, 1)`.
    pub fn build(group: &RankOneGroup, t_max: f64) -> Result<Self> {
        Self::build_with_spacing(group, t_max, 0.05 / group.rho().max(1.0))
    }

    pub fn build_with_spacing(group: &RankOneGroup, t_max: f64, spacing: f64) -> Result<Self> {
        check_t(t_max)?;
        if !(spacing > 0.0) {
            return Err(Error::invalid("knot spacing must be positive"));
        }
        if 2.0 * group.rho() * t_max > 700.0 {
            return Err(Error::invalid(format!(
                "t_max = {t_max} overflows the unscaled volume table"
            )));
        }
        let n = (t_max / spacing).ceil() as usize + 1;
        let cfg = QuadratureConfig::default();
        let rule = crate::quadrature::gl20();
        let mut cumulative = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        let mut acc = 0.0;
        for k in 0..n {
            let t = k as f64 * spacing;
            if k > 0 {
                // one 20-point panel per knot gap is exact to rounding here
                let lo = t - spacing;
                let piece = rule.integrate(lo, t, |x| delta(group, x));
                let check = integrate(|x| Ok(delta(group, x)), lo, t, &cfg)?;
                acc += if (piece - check).abs() <= 1e-13 * check.abs() {
                    piece
                } else {
                    check
                };
            }
            cumulative.push(acc);
            d1.push(delta(group, t));
            d2.push(delta_derivative(group, t));
        }
        Ok(Self {
            group: *group,
            spacing,
            t_max: (n - 1) as f64 * spacing,
            cumulative,
            d1,
            d2,
        })
    }

    pub fn group(&self) -> &RankOneGroup {
        &self.group
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Interpolated `m(B_t)`.
    pub fn volume(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.t_max) {
            return Err(Error::invalid(format!(
                "t = {t} outside the profile range [0, {}]",
                self.t_max
            )));
        }
        let k = ((t / self.spacing) as usize).min(self.cumulative.len() - 2);
        Ok(self.hermite(k, t))
    }

    fn hermite(&self, k: usize, t: f64) -> f64 {
        let h = self.spacing;
        let u = (t - k as f64 * h) / h;
        let (u2, u3) = (u * u, u * u * u);
        let (u4, u5) = (u3 * u, u3 * u2);
        let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
        let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
        let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
        let h3 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
        let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
        let h5 = 0.5 * (u3 - 2.0 * u4 + u5);
        self.cumulative[k] * h0
            + h * self.d1[k] * h1
            + h * h * self.d2[k] * h2
            + self.cumulative[k + 1] * h3
            + h * self.d1[k + 1] * h4
            + h * h * self.d2[k + 1] * h5
    }

    /// Radius `τ in [0, t]` with `m(B_τ) = u m(B_t)`, by bisection to `1e-12`
    /// in CDF space.
    pub fn inverse_cdf(&self, t: f64, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::invalid(format!("u = {u} outside [0, 1]")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let total = self.volume(t)?;
        let target = u * total;
        // knot interval containing the target
        let last = ((t / self.spacing) as usize).min(self.cumulative.len() - 2);
        let k = self.cumulative[..=last].partition_point(|&m| m <= target).saturating_sub(1);
        let mut lo = k as f64 * self.spacing;
        let mut hi = ((k + 1) as f64 * self.spacing).min(t);
        if !(self.hermite(k, lo) <= target && self.hermite(k, hi) >= target) {
            return Err(Error::convergence(
                "inverse CDF",
                format!("target {target} not bracketed by [{lo}, {hi}]"),
            ));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.hermite(k, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if (self.hermite(k, hi) - self.hermite(k, lo)) <= 1e-12 * total {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
