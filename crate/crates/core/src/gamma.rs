//! Log-gamma for complex arguments.
//!
//! Lanczos approximation (g = 671/128, 14 terms) on `Re z >= 1/2`, reflection
//! formula below that. Relative accuracy is close to machine precision over the
//! strip `Re z in [-10, 50]`, `|Im z| <= 50`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 5.242_187_5; // 671/128
#[allow(clippy::excessive_precision)]
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
#[allow(clippy::excessive_precision)]
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// True when `z` is (numerically) a non-positive integer.
pub fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let mut y = z;
    let tmp = z + LANCZOS_G;
    let tmp = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    for c in LANCZOS_COEF {
        y += 1.0;
        ser += c / y;
    }
    tmp + (SQRT_2PI * ser / z).ln()
}

/// `ln Γ(z)`. The imaginary part is only determined modulo `2π` in the
/// reflected half-plane; use [`gamma`] or [`recip_gamma`] when only the value
/// of `Γ` matters.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid(format!("ln_gamma of non-finite {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole(z.to_string()));
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        let s = (PI * z).sin();
        Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_lanczos(1.0 - z))
    } else {
        Ok(ln_gamma_lanczos(z))
    }
}

/// Real log-gamma `ln|Γ(x)|`.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    ln_gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

/// `Γ(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    ln_gamma(z).map(|v| v.exp())
}

/// `1/Γ(z)`, which is entire: zero at the poles of `Γ`.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    match ln_gamma(z) {
        Ok(v) => (-v).exp(),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_integer_and_half_integer_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = ln_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.572_364_942_924_700_1).abs() < 1e-14);
        let five = ln_gamma(c(5.0, 0.0)).unwrap();
        assert!((five.re - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn factorials_up_to_170() {
        let mut ln_fact = 0.0f64;
        for n in 1..=170u32 {
            // ln Γ(n + 1) = ln n!
            ln_fact += f64::from(n).ln();
            let v = ln_gamma_real(f64::from(n) + 1.0).unwrap();
            assert!(
                (v - ln_fact).abs() <= 1e-13 * ln_fact.abs().max(1.0),
                "n = {n}: {v} vs {ln_fact}"
            );
        }
    }

    #[test]
    fn negative_real_axis_uses_reflection() {
        // Γ(-1/2) = -2√π
        let g = gamma(c(-0.5, 0.0)).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(g.im.abs() < 1e-13);
        // Γ(-5/2) = -8√π/15
        let g = gamma(c(-2.5, 0.0)).unwrap();
        assert!((g.re + 8.0 * PI.sqrt() / 15.0).abs() < 1e-13);
    }

    #[test]
    fn poles() {
        assert!(matches!(ln_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(ln_gamma(c(-3.0, 0.0)), Err(Error::Pole(_))));
        assert_eq!(recip_gamma(c(-4.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn modulus_on_imaginary_lines() {
        // |Γ(iy)|^2 = π / (y sinh πy), |Γ(1/2 + iy)|^2 = π / cosh πy
        for &y in &[0.1, 0.7, 1.0, 3.3, 10.0, 25.0, 49.0] {
            let lhs = 2.0 * ln_gamma(c(0.0, y)).unwrap().re;
            let rhs = (PI / (y * (PI * y).sinh())).ln();
            assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs().max(1.0), "iy, y = {y}");

            let lhs = 2.0 * ln_gamma(c(0.5, y)).unwrap().re;
            let rhs = (PI / (PI * y).cosh()).ln();
            assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs().max(1.0), "1/2 + iy, y = {y}");
        }
    }

    #[test]
    fn recurrence_across_the_strip() {
        // Γ(z + 1) = z Γ(z), compared on the log scale modulo 2πi
        for re in [-9.7, -4.2, -0.3, 0.4, 1.5, 7.0, 23.0, 48.0] {
            for im in [-50.0, -12.5, -1.0, 0.3, 4.0, 31.0, 50.0] {
                let z = c(re, im);
                let lhs = ln_gamma(z + 1.0).unwrap();
                let rhs = ln_gamma(z).unwrap() + z.ln();
                let d = lhs - rhs;
                let wrapped = d.im - (2.0 * PI) * (d.im / (2.0 * PI)).round();
                let scale = lhs.norm().max(1.0);
                assert!(d.re.abs() <= 1e-13 * scale, "z = {z}: {d}");
                assert!(wrapped.abs() <= 1e-13 * scale, "z = {z}: {d}");
            }
        }
    }

    #[test]
    fn stirling_agreement_for_large_argument() {
        // Independent check: Stirling series with four correction terms.
        for z in [c(40.0, 0.0), c(30.0, 30.0), c(45.0, -20.0), c(20.0, 50.0)] {
            let stirling = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * z)
                - 1.0 / (360.0 * z.powi(3))
                + 1.0 / (1260.0 * z.powi(5))
                - 1.0 / (1680.0 * z.powi(7));
            let v = ln_gamma(z).unwrap();
            assert!((v - stirling).norm() <= 1e-13 * v.norm(), "z = {z}");
        }
    }
}
