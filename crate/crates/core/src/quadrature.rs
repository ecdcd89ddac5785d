//! Composite Gauss–Legendre quadrature with interval-halving error control.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Rule applied on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// Fallible variant of [`GaussLegendre::integrate`].
    pub fn try_integrate<F: FnMut(f64) -> Result<f64>>(&self, a: f64, b: f64, mut f: F) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x)?;
        }
        Ok(sum * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Shared 20-point rule.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Panel layout and tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Panels never exceed this width.
    pub max_panel: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of halvings of any initial panel.
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            max_panel: 0.25,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 30,
        }
    }
}

impl QuadratureConfig {
    /// Same tolerances, panels half as wide.
    pub fn refined(self) -> Self {
        Self {
            max_panel: 0.5 * self.max_panel,
            ..self
        }
    }
}

/// `∫_a^b f` by 20-point Gauss–Legendre panels of width at most
/// `config.max_panel`. Each panel is compared against the sum over its two
/// halves and subdivided until they agree.
pub fn integrate<F>(mut f: F, a: f64, b: f64, config: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("integration bounds [{a}, {b}] not finite")));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, config).map(|v| -v);
    }
    let rule = gl20();
    let panels = ((b - a) / config.max_panel).ceil().max(1.0) as usize;
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == panels { b } else { lo + width };
        let whole = rule.try_integrate(lo, hi, &mut f)?;
        total += refine(rule, &mut f, lo, hi, whole, (b - a).max(1.0), config, 0)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    rule: &GaussLegendre,
    f: &mut F,
    lo: f64,
    hi: f64,
    whole: f64,
    span: f64,
    config: &QuadratureConfig,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mid = 0.5 * (lo + hi);
    let left = rule.try_integrate(lo, mid, &mut *f)?;
    let right = rule.try_integrate(mid, hi, &mut *f)?;
    let halves = left + right;
    let err = (halves - whole).abs();
    let tol = (config.abs_tol * (hi - lo) / span).max(config.rel_tol * halves.abs());
    if err <= tol || err <= 4.0 * f64::EPSILON * halves.abs() {
        return Ok(halves);
    }
    if depth >= config.max_depth {
        return Err(Error::convergence(
            "adaptive quadrature",
            format!("panel [{lo}, {hi}] error estimate {err:e} above {tol:e} at depth {depth}"),
        ));
    }
    Ok(refine(rule, f, lo, mid, left, span, config, depth + 1)?
        + refine(rule, f, mid, hi, right, span, config, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1usize, 2, 5, 20, 33] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}");
            for i in 0..n {
                assert!((r.nodes()[i] + r.nodes()[n - 1 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_39() {
        let r = gl20();
        for k in 0..40 {
            let v = r.integrate(0.0, 1.0, |x| x.powi(k));
            assert!((v - 1.0 / f64::from(k + 1)).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn adaptive_handles_exponential_growth() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|x| Ok(x.exp()), 0.0, 30.0, &cfg).unwrap();
        let exact = 30f64.exp_m1();
        assert!((v - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn adaptive_subdivides_peaks() {
        let cfg = QuadratureConfig {
            max_panel: 1.0,
            ..Default::default()
        };
        // narrow Lorentzian, ∫_{-1}^{1} = 2 atan(1/w)
        let w: f64 = 1e-3;
        let v = integrate(|x| Ok(w / (x * x + w * w)), -1.0, 1.0, &cfg).unwrap();
        let exact = 2.0 * (1.0 / w).atan();
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
    }

    #[test]
    fn reversed_bounds_and_failure() {
        let cfg = QuadratureConfig::default();
        let v = integrate(Ok, 1.0, 0.0, &cfg).unwrap();
        assert!((v + 0.5).abs() < 1e-15);
        let cfg = QuadratureConfig {
            max_depth: 2,
            ..Default::default()
        };
        let r = integrate(|x: f64| Ok(1.0 / x.abs().sqrt()), -1.0, 1.0, &cfg);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }
}
