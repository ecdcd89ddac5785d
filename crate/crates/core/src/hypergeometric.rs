//! Gauss hypergeometric function `2F1(a, b; c; x)` on the negative real axis.
//!
//! Only the case needed for spherical functions of rank-one groups is covered:
//! `x <= 0`, real `c`, and upper parameters that are either both real or a
//! complex-conjugate pair, so the value is real.
//!
//! Three evaluation regions:
//!
//! | region                 | method                                                     |
//! |------------------------|------------------------------------------------------------|
//! | `-x <= 1/2`            | Maclaurin series in `x`                                    |
//! | `1/2 < -x <= 3`        | Pfaff transform, series in `x/(x-1) <= 3/4`                |
//! | `-x > 3`               | connection formula, series in `1/(1-x) < 1/4`              |
//!
//! When `a - b` is an integer the connection coefficients have poles that
//! cancel between the two terms. There the value is taken from symmetric
//! averages over `a - b ± kh`, `k = 1, 2, 3` (with `a + b` fixed), combined by
//! Richardson extrapolation to remove the `h^2` and `h^4` terms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::{is_pole, ln_gamma};

/// Upper bound of `-x` for the direct series.
pub const DIRECT_LIMIT: f64 = 0.5;
/// Upper bound of `-x` for the Pfaff-transformed series (`x/(x-1) <= 0.75`).
pub const PFAFF_LIMIT: f64 = 3.0;

/// Shift of `a - b` around degenerate connection coefficients, scaled down by
/// `ln(1 - x)` because the value varies like `(1 - x)^{(a - b)/2}`.
pub fn degenerate_step(ln_one_minus_x: f64) -> f64 {
    0.02 / ln_one_minus_x.max(2.0)
}

const MAX_TERMS: usize = 20_000;
const SERIES_EPS: f64 = 1e-17;

/// Argument of `2F1` together with the quantities the large-`|x|` expansion
/// needs. Carrying `ln(1 - x)` and `1/(1 - x)` separately keeps the evaluation
/// finite when `x` itself overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegArg {
    /// `x <= 0` (may be `-inf`).
    pub x: f64,
    /// `ln(1 - x)`.
    pub ln_one_minus_x: f64,
    /// `1 / (1 - x)`.
    pub inv_one_minus_x: f64,
}

impl NegArg {
    pub fn new(x: f64) -> Result<Self> {
        if !(x <= 0.0) {
            return Err(Error::invalid(format!("2F1 argument {x} must be <= 0")));
        }
        Ok(Self {
            x,
            ln_one_minus_x: (-x).ln_1p(),
            inv_one_minus_x: 1.0 / (1.0 - x),
        })
    }

    /// `x = -sinh^2 t`, computed without forming `sinh t` for large `t`.
    pub fn from_sinh_sq(t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::invalid(format!("t = {t} must be >= 0")));
        }
        let sh = t.sinh();
        // ln cosh t = t + ln(1 + e^{-2t}) - ln 2
        let ln_cosh = t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2;
        let sech = if t < 300.0 { 1.0 / t.cosh() } else { 0.0 };
        Ok(Self {
            x: -sh * sh,
            ln_one_minus_x: 2.0 * ln_cosh,
            inv_one_minus_x: sech * sech,
        })
    }
}

/// Evaluation region chosen for a given argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Direct,
    Pfaff,
    Connection,
}

impl Region {
    pub fn of(x: f64) -> Region {
        if -x <= DIRECT_LIMIT {
            Region::Direct
        } else if -x <= PFAFF_LIMIT {
            Region::Pfaff
        } else {
            Region::Connection
        }
    }
}

/// Upper parameters must be both real or complex conjugates for a real value.
fn check_params(a: Complex64, b: Complex64, c: f64) -> Result<()> {
    let real = a.im == 0.0 && b.im == 0.0;
    let conj = (a - b.conj()).norm() <= 1e-14 * (1.0 + a.norm());
    if !(real || conj) {
        return Err(Error::invalid(format!(
            "2F1 upper parameters {a}, {b} must be real or a conjugate pair"
        )));
    }
    if c <= 0.0 && c == c.round() {
        return Err(Error::Pole(format!("lower parameter c = {c}")));
    }
    Ok(())
}

fn nonpositive_integer(z: Complex64) -> Option<u64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        Some((-z.re) as u64)
    } else {
        None
    }
}

/// `2F1(a, b; c; x)` for `x <= 0`; `b` must be real alongside `a` or equal to
/// `conj(a)`.
pub fn hyp2f1_neg(a: Complex64, b: Complex64, c: f64, x: f64) -> Result<f64> {
    hyp2f1_neg_arg(a, b, c, &NegArg::new(x)?)
}

/// Real-parameter convenience wrapper around [`hyp2f1_neg`].
pub fn hyp2f1_neg_real(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    hyp2f1_neg(Complex64::new(a, 0.0), Complex64::new(b, 0.0), c, x)
}

pub fn hyp2f1_neg_arg(a: Complex64, b: Complex64, c: f64, arg: &NegArg) -> Result<f64> {
    check_params(a, b, c)?;
    if arg.x == 0.0 {
        return Ok(1.0);
    }
    // terminating series: a polynomial in x, valid everywhere
    if let Some(m) = nonpositive_integer(a).or_else(|| nonpositive_integer(b)) {
        return polynomial(a, b, c, arg.x, m);
    }
    match Region::of(arg.x) {
        Region::Direct => direct(a, b, c, arg.x),
        Region::Pfaff => pfaff(a, b, c, arg),
        Region::Connection => connection_any(a, b, c, arg),
    }
}

fn polynomial(a: Complex64, b: Complex64, c: f64, x: f64, degree: u64) -> Result<f64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..degree {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
    }
    Ok(sum.re)
}

/// Maclaurin series. For conjugate upper parameters the coefficient
/// `(a)_n (conj a)_n = |(a)_n|^2` is accumulated in real arithmetic.
pub fn direct(a: Complex64, b: Complex64, c: f64, x: f64) -> Result<f64> {
    check_params(a, b, c)?;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let num = if a.im == 0.0 {
            (a.re + nf) * (b.re + nf)
        } else {
            (a + nf).norm_sqr()
        };
        term *= num / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        if term.abs() <= SERIES_EPS * sum.abs() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::convergence(
        "2F1 direct series",
        format!("a={a}, b={b}, c={c}, x={x}"),
    ))
}

/// Power series of `2F1(a, b; c; z)` with complex parameters, `0 <= z < 1`.
fn series_complex(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.norm() <= SERIES_EPS * sum.norm() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::convergence(
        "2F1 series",
        format!("a={a}, b={b}, c={c}, z={z}"),
    ))
}

/// Pfaff transform: `(1-x)^{-a} 2F1(a, c-b; c; x/(x-1))`.
pub fn pfaff(a: Complex64, b: Complex64, c: f64, arg: &NegArg) -> Result<f64> {
    check_params(a, b, c)?;
    let z = -arg.x * arg.inv_one_minus_x;
    let cc = Complex64::new(c, 0.0);
    let f = series_complex(a, cc - b, cc, z)?;
    let pre = (-a * arg.ln_one_minus_x).exp();
    Ok((pre * f).re)
}

/// One term of the connection formula:
/// `Γ(c)Γ(b-a) / (Γ(b)Γ(c-a)) (1-x)^{-a} 2F1(a, c-b; a-b+1; 1/(1-x))`.
fn connection_term(a: Complex64, b: Complex64, c: f64, arg: &NegArg) -> Result<Complex64> {
    let cc = Complex64::new(c, 0.0);
    if is_pole(b) || is_pole(cc - a) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ln_coef = ln_gamma(cc)? + ln_gamma(b - a)? - ln_gamma(b)? - ln_gamma(cc - a)?
        - a * arg.ln_one_minus_x;
    if ln_coef.re < -745.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let f = series_complex(a, cc - b, a - b + 1.0, arg.inv_one_minus_x)?;
    Ok(ln_coef.exp() * f)
}

fn connection_raw(a: Complex64, b: Complex64, c: f64, arg: &NegArg) -> Result<Complex64> {
    Ok(connection_term(a, b, c, arg)? + connection_term(b, a, c, arg)?)
}

fn distance_to_integer(d: Complex64) -> f64 {
    Complex64::new(d.re - d.re.round(), d.im).norm()
}

/// True when `a - b` is close enough to an integer that the connection
/// coefficients are evaluated by symmetric shifts.
pub fn is_degenerate(a: Complex64, b: Complex64, arg: &NegArg) -> bool {
    distance_to_integer(a - b) < 0.5 * degenerate_step(arg.ln_one_minus_x)
}

/// Connection formula, expansion in powers of `1/(1-x)`. Valid for any
/// `x < 0`, accurate when `1/(1-x)` is small.
pub fn connection(a: Complex64, b: Complex64, c: f64, arg: &NegArg) -> Result<f64> {
    check_params(a, b, c)?;
    connection_any(a, b, c, arg)
}

fn connection_any(a: Complex64, b: Complex64, c: f64, arg: &NegArg) -> Result<f64> {
    if !is_degenerate(a, b, arg) {
        return Ok(connection_raw(a, b, c, arg)?.re);
    }
    // The symmetric average is even in h: avg(kh) = f + A k^2 + B k^4 + O(h^6).
    let h = degenerate_step(arg.ln_one_minus_x);
    let avg = |k: f64| -> Result<f64> {
        let d = 0.5 * k * h;
        let plus = connection_raw(a + d, b - d, c, arg)?;
        let minus = connection_raw(a - d, b + d, c, arg)?;
        Ok(0.5 * (plus.re + minus.re))
    };
    Ok((15.0 * avg(1.0)? - 6.0 * avg(2.0)? + avg(3.0)?) / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn r(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn b_zero_terminates() {
        for x in [-0.1, -2.0, -50.0, -1e6] {
            assert_eq!(hyp2f1_neg_real(3.7, 0.0, 1.5, x).unwrap(), 1.0);
        }
    }

    #[test]
    fn log_closed_form() {
        // 2F1(1,1;2;x) = -ln(1-x)/x
        let v = hyp2f1_neg_real(1.0, 1.0, 2.0, -1.0).unwrap();
        assert!((v - LN_2).abs() < 1e-14);
        for x in [-0.3, -0.9, -2.5, -3.5, -40.0, -1e4] {
            let v = hyp2f1_neg_real(1.0, 1.0, 2.0, x).unwrap();
            let exact = -(-x).ln_1p() / x;
            assert!((v - exact).abs() < 1e-12 * exact, "x = {x}: {v} vs {exact}");
        }
    }

    #[test]
    fn arctan_closed_form() {
        let v = hyp2f1_neg_real(1.0, 0.5, 1.5, -1.0).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-14);
        // independent check by brute force on the alternating series at z = 0.5
        let z: f64 = 0.5;
        let brute: f64 = (0..200).map(|n| (-z * z).powi(n) / f64::from(2 * n + 1)).sum();
        let v = hyp2f1_neg_real(1.0, 0.5, 1.5, -z * z).unwrap();
        assert!((v - brute).abs() < 1e-15);
        for z in [3.0f64, 10.0, 300.0] {
            let v = hyp2f1_neg_real(1.0, 0.5, 1.5, -z * z).unwrap();
            assert!((v - z.atan() / z).abs() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn conjugate_pair_is_symmetric() {
        let a = Complex64::new(0.75, 1.3);
        for x in [-0.2, -1.7, -9.0] {
            let v1 = hyp2f1_neg(a, a.conj(), 1.25, x).unwrap();
            let v2 = hyp2f1_neg(a.conj(), a, 1.25, x).unwrap();
            assert!((v1 - v2).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(hyp2f1_neg_real(1.0, 1.0, 2.0, 0.5).is_err());
        assert!(matches!(
            hyp2f1_neg_real(1.0, 1.0, -2.0, -0.5),
            Err(Error::Pole(_))
        ));
        assert!(hyp2f1_neg(Complex64::new(1.0, 1.0), r(1.0), 2.0, -0.5).is_err());
    }

    #[test]
    fn regions_agree_on_overlaps() {
        let cases: [(Complex64, Complex64, f64); 5] = [
            (r(0.75), r(0.25), 1.5),
            (r(1.3), r(0.2), 2.5),
            (Complex64::new(0.5, 1.0), Complex64::new(0.5, -1.0), 1.5),
            (Complex64::new(1.5, 0.25), Complex64::new(1.5, -0.25), 4.0),
            (r(5.2), r(5.8), 8.5),
        ];
        for (a, b, c) in cases {
            for x in [-0.4, -0.5, -0.6] {
                let arg = NegArg::new(x).unwrap();
                let d = direct(a, b, c, x).unwrap();
                let p = pfaff(a, b, c, &arg).unwrap();
                assert!((d - p).abs() <= 1e-11 * d.abs().max(1e-300) + 1e-15, "{a} {b} {c} {x}");
            }
            for x in [-2.5, -3.0, -3.5] {
                let arg = NegArg::new(x).unwrap();
                let p = pfaff(a, b, c, &arg).unwrap();
                let k = connection(a, b, c, &arg).unwrap();
                assert!((p - k).abs() <= 1e-11 * p.abs() + 1e-15, "{a} {b} {c} {x}: {p} vs {k}");
            }
        }
    }

    #[test]
    fn degenerate_connection_matches_pfaff() {
        // a - b = 0 and a - b = 1: coefficients have cancelling poles
        for (a, b, c) in [(1.0, 1.0, 2.0), (1.5, 0.5, 2.5), (0.5, 0.5, 1.0)] {
            let (a, b) = (r(a), r(b));
            for x in [-2.0, -3.0] {
                let arg = NegArg::new(x).unwrap();
                assert!(is_degenerate(a, b, &arg));
                let p = pfaff(a, b, c, &arg).unwrap();
                let k = connection(a, b, c, &arg).unwrap();
                assert!((p - k).abs() <= 1e-10 * p.abs(), "{a} {b} {c} {x}: {p} vs {k}");
            }
        }
    }

    #[test]
    fn overflowing_argument_is_finite() {
        let arg = NegArg::from_sinh_sq(400.0).unwrap();
        assert_eq!(arg.x, f64::NEG_INFINITY);
        let v = hyp2f1_neg_arg(r(0.75), r(0.25), 1.5, &arg).unwrap();
        assert!(v.is_finite() && v >= 0.0);
    }
}
