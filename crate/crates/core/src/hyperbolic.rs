//! Ball averages on the modular surface `PSL(2,Z)\H`.
//!
//! Elements of `PSL(2,R)` act on the upper half-plane by Möbius maps, the
//! stabilizer of `i` is `SO(2)` and `d(g i, i)` is the Cartan parameter `τ`
//! of `g = k(θ₁) a_τ k(θ₂)`. Uniform points of the ball `B_t` are drawn with
//! uniform angles and `τ` from the radial density `sinh τ / (cosh t - 1)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::VolumeProfile;
use crate::error::{Error, Result};
use crate::group::RankOneGroup;

/// Samples per RNG substream. Fixed so results do not depend on the worker count.
pub const CHUNK: u64 = 10_000;

/// Iteration cap for [`reduce`].
pub const REDUCE_CAP: u64 = 1_000_000;

/// Base points used for spot checks of almost-everywhere statements.
pub const BASE_POINTS: [HPoint; 5] = [
    HPoint { x: 0.1, y: 1.3 },
    HPoint { x: 0.0, y: 1.0 },
    HPoint { x: -0.31, y: 2.2 },
    HPoint { x: 0.45, y: 0.95 },
    HPoint { x: 0.27, y: 4.1 },
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite() && x.is_finite()) {
            return Err(Error::invalid(format!("({x}, {y}) is not in the upper half-plane")));
        }
        Ok(Self { x, y })
    }

    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };

    /// Closed standard fundamental domain `|Re z| <= 1/2`, `|z| >= 1`, with
    /// a small tolerance for rounding.
    pub fn in_fundamental_domain(&self, tol: f64) -> bool {
        self.x.abs() <= 0.5 + tol && self.x * self.x + self.y * self.y >= 1.0 - tol
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for HPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| Error::invalid(format!("point '{s}' must be 'x,y'")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad coordinate '{v}' in '{s}'")))
        };
        HPoint::new(parse(x)?, parse(y)?)
    }
}

/// `cosh d(z, w) = 1 + |z - w|^2 / (2 Im z Im w)`.
pub fn hyp_dist(z: HPoint, w: HPoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    // arcosh(1 + u) = ln(1 + u + sqrt(u (u + 2))), accurate for small u
    let u = (dx * dx + dy * dy) / (2.0 * z.y * w.y);
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}

/// A real 2×2 matrix of determinant one, up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0 && det.is_finite()) {
            return Err(Error::invalid(format!("determinant {det} is not positive")));
        }
        Ok(Mat2 { a, b, c, d }.renormalized())
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Rescales by `det^{-1/2}`.
    pub fn renormalized(self) -> Self {
        let s = self.det().sqrt().recip();
        Mat2 {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    /// `k(θ)`, rotation about `i` by angle `2θ`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2 { a: c, b: s, c: -s, d: c }
    }

    /// `a_τ = diag(e^{τ/2}, e^{-τ/2})`, which maps `i` to `e^τ i`.
    pub fn diagonal(tau: f64) -> Self {
        let h = (0.5 * tau).exp();
        Mat2 {
            a: h,
            b: 0.0,
            c: 0.0,
            d: h.recip(),
        }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// `[[√y, x/√y], [0, 1/√y]]`, which maps `i` to `z`.
    pub fn lift(z: HPoint) -> Mat2 {
        let r = z.y.sqrt();
        Mat2 {
            a: r,
            b: z.x / r,
            c: 0.0,
            d: r.recip(),
        }
    }

    pub fn inverse(&self) -> Mat2 {
        Mat2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `(a z + b) / (c z + d)`.
    pub fn act(&self, z: HPoint) -> HPoint {
        // numerator times conj(denominator), over |denominator|^2
        let (nx, ny) = (self.a * z.x + self.b, self.a * z.y);
        let (dx, dy) = (self.c * z.x + self.d, self.c * z.y);
        let den = dx * dx + dy * dy;
        HPoint {
            x: (nx * dx + ny * dy) / den,
            y: self.det() * z.y / den,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanSample {
    pub g: Mat2,
    pub tau: f64,
}

/// Draws `g` uniformly from `B_t` (Haar measure restricted to the ball).
pub fn cartan_sample<R: Rng + ?Sized>(profile: &VolumeProfile, t: f64, rng: &mut R) -> Result<CartanSample> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("ball radius {t} must be >= 0")));
    }
    let th1 = std::f64::consts::PI * rng.random::<f64>();
    let th2 = std::f64::consts::PI * rng.random::<f64>();
    let u = rng.random::<f64>();
    let tau = if t == 0.0 { 0.0 } else { profile.inverse_cdf(t, u)? };
    let g = Mat2::rotation(th1).mul(&Mat2::diagonal(tau)).mul(&Mat2::rotation(th2));
    Ok(CartanSample { g, tau })
}

/// Profile of the radial law on `H^2`, valid for radii up to `t_max`.
pub fn radial_profile(t_max: f64) -> Result<VolumeProfile> {
    VolumeProfile::build(&RankOneGroup::so(2)?, t_max.max(1e-3))
}

/// Integer matrix of the accumulated word, acting as `z ↦ (a z + b)/(c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Word {
    pub const IDENTITY: Word = Word { a: 1, b: 0, c: 0, d: 1 };

    fn left(&self, m: [i64; 4]) -> Option<Word> {
        let [a, b, c, d] = m;
        Some(Word {
            a: a.checked_mul(self.a)?.checked_add(b.checked_mul(self.c)?)?,
            b: a.checked_mul(self.b)?.checked_add(b.checked_mul(self.d)?)?,
            c: c.checked_mul(self.a)?.checked_add(d.checked_mul(self.c)?)?,
            d: c.checked_mul(self.b)?.checked_add(d.checked_mul(self.d)?)?,
        })
    }

    pub fn to_mat(&self) -> Mat2 {
        Mat2 {
            a: self.a as f64,
            b: self.b as f64,
            c: self.c as f64,
            d: self.d as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    pub point: HPoint,
    pub word: Word,
    pub steps: u64,
}

/// Moves `z` into the standard fundamental domain by translations and the
/// inversion `z ↦ -1/z`, recording the applied word.
pub fn reduce(z: HPoint) -> Result<Reduction> {
    reduce_with_cap(z, REDUCE_CAP)
}

pub fn reduce_with_cap(z: HPoint, cap: u64) -> Result<Reduction> {
    let mut p = HPoint::new(z.x, z.y)?;
    let mut word = Word::IDENTITY;
    let overflow = || Error::convergence("reduce", format!("word overflow reducing {z}"));
    for steps in 0..cap {
        let n = p.x.round();
        if n != 0.0 {
            p.x -= n;
            if n.abs() > 9e15 {
                return Err(overflow());
            }
            word = word.left([1, -(n as i64), 0, 1]).ok_or_else(overflow)?;
        }
        let r2 = p.x * p.x + p.y * p.y;
        if r2 >= 1.0 {
            return Ok(Reduction {
                point: p,
                word,
                steps,
            });
        }
        p = HPoint {
            x: -p.x / r2,
            y: p.y / r2,
        };
        word = word.left([0, -1, 1, 0]).ok_or_else(overflow)?;
    }
    Err(Error::convergence(
        "reduce",
        format!("{z} not reduced after {cap} iterations"),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Observable {
    Constant,
    /// Indicator of `Im z > y` on the fundamental domain, `y >= 1`.
    Cusp { y: f64 },
    /// Indicator of a closed hyperbolic disk inside the fundamental domain.
    Disk { center: HPoint, radius: f64 },
}

impl Observable {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Observable::Constant => Ok(()),
            Observable::Cusp { y } => {
                if y >= 1.0 && y.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("cusp height {y} must be >= 1")))
                }
            }
            Observable::Disk { center, radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid(format!("disk radius {radius} must be positive")));
                }
                HPoint::new(center.x, center.y)?;
                // Euclidean circle: center (x, y cosh r), radius y sinh r
                let ec = center.y * radius.cosh();
                let er = center.y * radius.sinh();
                let inside = center.x.abs() + er < 0.5 && (center.x * center.x + ec * ec).sqrt() - er > 1.0;
                if inside {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "disk around {center} of radius {radius} leaves the fundamental domain"
                    )))
                }
            }
        }
    }

    /// Value at a reduced point.
    pub fn eval(&self, z: HPoint) -> f64 {
        match *self {
            Observable::Constant => 1.0,
            Observable::Cusp { y } => f64::from(u8::from(z.y > y)),
            Observable::Disk { center, radius } => f64::from(u8::from(hyp_dist(z, center) <= radius)),
        }
    }

    /// Integral against the normalized area `3 dx dy / (π y^2)`.
    pub fn mean(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Observable::Constant => 1.0,
            Observable::Cusp { y } => 3.0 / (PI * y),
            Observable::Disk { radius, .. } => 6.0 * (radius.cosh() - 1.0),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Constant => write!(f, "const"),
            Observable::Cusp { y } => write!(f, "cusp:{y}"),
            Observable::Disk { center, radius } => write!(f, "disk:{},{},{}", center.x, center.y, radius),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// `const`, `cusp:Y` or `disk:X,Y,R`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unknown observable '{s}' (expected const, cusp:Y or disk:X,Y,R)"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let obs = match s.split_once(':') {
            None if s == "const" || s == "constant" => Observable::Constant,
            Some(("cusp", y)) => Observable::Cusp { y: num(y)? },
            Some(("disk", rest)) => {
                let v: Vec<&str> = rest.split(',').collect();
                if v.len() != 3 {
                    return Err(bad());
                }
                Observable::Disk {
                    center: HPoint::new(num(v[0])?, num(v[1])?)?,
                    radius: num(v[2])?,
                }
            }
            _ => return Err(bad()),
        };
        obs.validate()?;
        Ok(obs)
    }
}

/// Whether a sample `g` moves the base point `x₀ = Γh` to `x₀ g⁻¹ = Γhg`
/// or to `Γhg⁻¹`. Either way the image `h g^{±1} i` is uniform on the
/// hyperbolic ball of radius `t` around `x₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Action {
    #[default]
    Inverse,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRun {
    pub t: f64,
    pub samples: u64,
    pub seed: u64,
    pub observable: Observable,
    pub base: HPoint,
    pub estimate: f64,
    pub standard_error: f64,
}

impl McRun {
    pub fn deviation(&self) -> f64 {
        (self.estimate - self.observable.mean()).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
    pub observable: Observable,
    pub base: HPoint,
    pub action: Action,
}

impl McSettings {
    pub fn new(samples: u64, seed: u64, observable: Observable, base: HPoint) -> Self {
        Self {
            samples,
            seed,
            observable,
            base,
            action: Action::Inverse,
        }
    }
}

fn chunk_sums(profile: &VolumeProfile, t: f64, s: &McSettings, chunk: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    rng.set_stream(chunk);
    let start = chunk * CHUNK;
    let end = (start + CHUNK).min(s.samples);
    let lift = Mat2::lift(s.base);
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in start..end {
        let g = cartan_sample(profile, t, &mut rng)?.g;
        let h = match s.action {
            Action::Inverse => g.inverse(),
            Action::Direct => g,
        };
        let v = s.observable.eval(reduce(lift.mul(&h).act(HPoint::I))?.point);
        sum += v;
        sq += v * v;
    }
    Ok((sum, sq))
}

/// Monte Carlo estimate of `(A_t f)(x₀)` using a prebuilt radial profile.
pub fn mc_average_with(profile: &VolumeProfile, t: f64, s: &McSettings) -> Result<McRun> {
    s.observable.validate()?;
    HPoint::new(s.base.x, s.base.y)?;
    if !(t >= 0.0 && t <= profile.t_max()) {
        return Err(Error::invalid(format!(
            "t = {t} outside [0, {}] covered by the profile",
            profile.t_max()
        )));
    }
    if s.samples < 100 {
        return Err(Error::invalid(format!("need at least 100 samples, got {}", s.samples)));
    }
    let chunks = s.samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| chunk_sums(profile, t, s, c))
        .collect::<Result<_>>()?;
    let (sum, sq) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let n = s.samples as f64;
    let estimate = sum / n;
    let var = ((sq - sum * sum / n) / (n - 1.0)).max(0.0);
    Ok(McRun {
        t,
        samples: s.samples,
        seed: s.seed,
        observable: s.observable,
        base: s.base,
        estimate,
        standard_error: (var / n).sqrt(),
    })
}

pub fn mc_average(t: f64, s: &McSettings) -> Result<McRun> {
    mc_average_with(&radial_profile(t)?, t, s)
}

/// Kolmogorov–Smirnov statistic of `samples` against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Critical value of the one-sample KS statistic at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Draws `n` radii from `B_t` with the same substream layout as [`mc_average`].
pub fn radial_draws(profile: &VolumeProfile, t: f64, n: u64, seed: u64) -> Result<Vec<f64>> {
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| Ok(cartan_sample(profile, t, &mut rng)?.tau)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub deviation: f64,
    pub envelope: f64,
    /// `deviation <= max(envelope, 4 stderr)`.
    pub within: bool,
}

/// Deviations of Monte Carlo averages from the space average along a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Envelope constant `C` in `C t e^{-t/2}`, fitted on the grid points
    /// with `t` at most the median grid time.
    pub constant: f64,
    pub fit_count: usize,
    /// Least-squares slope of `ln deviation` against `t` and its standard
    /// error; `None` with fewer than three usable points.
    pub exponent: Option<(f64, f64)>,
}

impl ScanReport {
    pub fn all_within(&self) -> bool {
        self.rows.iter().all(|r| r.within)
    }
}

pub fn decay_scan(t_grid: &[f64], settings: &McSettings) -> Result<ScanReport> {
    if t_grid.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(1.0..=10.0).contains(*t)) {
        return Err(Error::invalid(format!("scan times must lie in [1, 10], got {t}")));
    }
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);
    let profile = radial_profile(t_max)?;
    let runs: Vec<McRun> = t_grid
        .iter()
        .map(|&t| mc_average_with(&profile, t, settings))
        .collect::<Result<_>>()?;
    let shape = |t: f64| t * (-0.5 * t).exp();
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[(sorted.len() - 1) / 2];
    let fit: Vec<&McRun> = runs.iter().filter(|r| r.t <= median).collect();
    let constant = fit.iter().map(|r| r.deviation() / shape(r.t)).fold(0.0, f64::max);
    let rows = runs
        .iter()
        .map(|r| {
            let envelope = constant * shape(r.t);
            let deviation = r.deviation();
            ScanRow {
                t: r.t,
                estimate: r.estimate,
                stderr: r.standard_error,
                deviation,
                envelope,
                within: deviation <= envelope.max(4.0 * r.standard_error),
            }
        })
        .collect();
    Ok(ScanReport {
        rows,
        constant,
        fit_count: fit.len(),
        exponent: slope_with_error(&runs),
    })
}

fn slope_with_error(runs: &[McRun]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = runs
        .iter()
        .filter(|r| r.deviation() > 0.0)
        .map(|r| (r.t, r.deviation().ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Some((slope, (rss / (n - 2.0) / sxx).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert!((hyp_dist(HPoint::I, HPoint::new(0.0, 1f64.exp()).unwrap()) - 1.0).abs() < 1e-15);
        assert_eq!(hyp_dist(HPoint::I, HPoint::I), 0.0);
        let d = hyp_dist(HPoint::I, HPoint::new(1.0, 1.0).unwrap());
        assert!((d - 1.5f64.acosh()).abs() < 1e-15);
        assert!((d - 0.9624236501192069).abs() < 1e-15);
    }

    #[test]
    fn point_validation() {
        assert!(HPoint::new(0.0, 0.0).is_err());
        assert!(HPoint::new(f64::NAN, 1.0).is_err());
        assert_eq!("0.1,1.3".parse::<HPoint>().unwrap(), HPoint { x: 0.1, y: 1.3 });
        assert!("0.1".parse::<HPoint>().is_err());
    }

    #[test]
    fn diagonal_moves_along_geodesic() {
        for tau in [0.0, 0.3, 2.0, 7.5] {
            let z = Mat2::diagonal(tau).act(HPoint::I);
            assert!((z.y - tau.exp()).abs() <= 1e-15 * z.y);
            assert!((hyp_dist(z, HPoint::I) - tau).abs() < 1e-12);
        }
        let r = Mat2::rotation(0.77).act(HPoint::I);
        assert!(hyp_dist(r, HPoint::I) < 1e-7);
    }

    #[test]
    fn matrix_normalization() {
        let m = Mat2::new(2.0, 1.0, 1.0, 3.0).unwrap();
        assert!((m.det() - 1.0).abs() < 1e-12);
        assert!(Mat2::new(1.0, 2.0, 2.0, 1.0).is_err());
        let p = m.mul(&m.inverse());
        assert!((p.a - 1.0).abs() < 1e-15 && p.b.abs() < 1e-15);
    }

    #[test]
    fn reduce_example() {
        let z = HPoint::new(0.7, 0.4).unwrap();
        let r = reduce(z).unwrap();
        assert!((r.point.x - 0.2).abs() < 1e-12 && (r.point.y - 1.6).abs() < 1e-12, "{r:?}");
        let w = r.word.to_mat().act(z);
        assert!((w.x - r.point.x).abs() < 1e-12 && (w.y - r.point.y).abs() < 1e-12);
        let inside = HPoint::new(0.2, 1.6).unwrap();
        assert_eq!(reduce(inside).unwrap().point, inside);
        assert_eq!(reduce(inside).unwrap().word, Word::IDENTITY);
    }

    #[test]
    fn reduce_cap() {
        let z = HPoint::new(0.3, 1e-9).unwrap();
        assert!(matches!(reduce_with_cap(z, 2), Err(Error::Convergence { .. })));
        assert!(reduce(z).unwrap().point.in_fundamental_domain(1e-12));
    }

    #[test]
    fn observables() {
        use std::f64::consts::PI;
        let c: Observable = "cusp:2".parse().unwrap();
        assert!((c.mean() - 3.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((Observable::Cusp { y: 1.0 }.mean() - 0.954929658551372).abs() < 1e-14);
        assert!("cusp:0.5".parse::<Observable>().is_err());
        assert_eq!("const".parse::<Observable>().unwrap().mean(), 1.0);
        let d: Observable = "disk:0,2,0.2".parse().unwrap();
        assert_eq!(d.eval(HPoint::new(0.0, 2.1).unwrap()), 1.0);
        assert_eq!(d.eval(HPoint::new(0.45, 2.0).unwrap()), 0.0);
        assert!("disk:0,1.1,0.5".parse::<Observable>().is_err());
        assert!("blob".parse::<Observable>().is_err());
        assert_eq!(d.to_string().parse::<Observable>().unwrap(), d);
    }

    #[test]
    fn constant_and_degenerate_runs() {
        let base = HPoint::new(0.1, 1.3).unwrap();
        let s = McSettings::new(1234, 9, Observable::Constant, base);
        let run = mc_average(3.0, &s).unwrap();
        assert_eq!(run.estimate, 1.0);
        assert_eq!(run.standard_error, 0.0);
        let s = McSettings::new(500, 9, Observable::Cusp { y: 1.2 }, base);
        assert_eq!(mc_average(0.0, &s).unwrap().estimate, 1.0);
        assert!(mc_average(2.0, &McSettings::new(10, 1, Observable::Constant, base)).is_err());
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let s = McSettings::new(25_000, 42, Observable::Cusp { y: 2.0 }, HPoint::new(0.1, 1.3).unwrap());
        let profile = radial_profile(4.0).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_average_with(&profile, 4.0, &s)).unwrap();
        let b = four.install(|| mc_average_with(&profile, 4.0, &s)).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.standard_error.to_bits(), b.standard_error.to_bits());
    }

    #[test]
    fn ks_statistic_of_exact_quantiles_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }
}
