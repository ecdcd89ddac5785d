//! Spectral model of a measure-preserving action satisfying purity.
//!
//! The averaging operator acts on each spherical component as multiplication
//! by the ball-averaged spherical function `psi_sigma(t)`. A function `f` is
//! represented by the norms of its components: `‖P_j f‖` on the atoms
//! `s_0 = rho > s_1 > ... > s_k` and `‖f_sigma‖` on the finitely many
//! components that discretize the remainder `omega`. Each omega component
//! carries a weight (its `nu`-mass), which multiplies its squared norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{psi_on_grid, psi_lipschitz_check};
use crate::error::{Error, Result};
use crate::grid::{subintervals, TimeGrid};
use crate::group::{validate_purity, RankOneGroup, SpectralParam};

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaComponent {
    pub param: SpectralParam,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

impl OmegaComponent {
    pub fn new(param: SpectralParam) -> Self {
        Self { param, weight: 1.0 }
    }
}

/// Atoms `rho = s_0 > ... > s_k > r` plus the remainder `omega` with
/// `Re s <= r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PuritySpectrum {
    group: RankOneGroup,
    atoms: Vec<f64>,
    r: f64,
    omega: Vec<OmegaComponent>,
}

impl PuritySpectrum {
    pub fn new(group: RankOneGroup, atoms: Vec<f64>, r: f64, omega: Vec<OmegaComponent>) -> Result<Self> {
        let params: Vec<SpectralParam> = omega.iter().map(|c| c.param).collect();
        validate_purity(&group, &atoms, r, &params)?;
        if let Some(c) = omega.iter().find(|c| !(c.weight >= 0.0 && c.weight.is_finite())) {
            return Err(Error::invalid(format!("omega weight {} must be finite and >= 0", c.weight)));
        }
        Ok(Self {
            group,
            atoms,
            r,
            omega,
        })
    }

    pub fn group(&self) -> &RankOneGroup {
        &self.group
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn omega(&self) -> &[OmegaComponent] {
        &self.omega
    }

    /// Spectral gap `rho - r`.
    pub fn gap(&self) -> f64 {
        self.group.rho() - self.r
    }

    /// Atom parameters; `s_0` is the trivial representation.
    pub fn atom_params(&self) -> Vec<SpectralParam> {
        self.atoms
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                if j == 0 {
                    SpectralParam::Trivial
                } else {
                    SpectralParam::Complementary(s)
                }
            })
            .collect()
    }

    /// Signed multipliers `psi_sigma(t)` for every component at every time of
    /// an increasing grid. Components are evaluated in parallel; the result
    /// does not depend on the thread count.
    pub fn multipliers_on_grid(&self, times: &[f64]) -> Result<Vec<Multipliers>> {
        let params: Vec<SpectralParam> = self
            .atom_params()
            .into_iter()
            .chain(self.omega.iter().map(|c| c.param))
            .collect();
        let mut sorted = times.to_vec();
        sorted.sort_by(f64::total_cmp);
        let columns: Vec<Vec<f64>> = params
            .par_iter()
            .map(|&p| psi_on_grid(&self.group, p, &sorted))
            .collect::<Result<_>>()?;
        let k = self.atoms.len();
        let at = |i: usize| Multipliers {
            atoms: columns[..k].iter().map(|c| c[i]).collect(),
            omega: columns[k..].iter().map(|c| c[i]).collect(),
        };
        // restore the caller's order
        Ok(times
            .iter()
            .map(|t| at(sorted.partition_point(|s| s < t)))
            .collect())
    }

    pub fn multipliers(&self, t: f64) -> Result<Multipliers> {
        Ok(self.multipliers_on_grid(&[t])?.remove(0))
    }
}

/// File form of a spectrum and a vector:
/// `{"group": "so:3", "atoms": [...], "r": ..., "omega": [{"param": "c:0.4", "weight": 1}],
/// "f": {"atom_norms": [...], "omega_norms": [...]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_prime: Option<f64>,
    pub atoms: Vec<f64>,
    pub r: f64,
    #[serde(default)]
    pub omega: Vec<OmegaComponent>,
    pub f: SpectralVector,
}

impl SpectrumConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("spectrum file: {e}")))
    }

    pub fn build(&self) -> Result<(PuritySpectrum, SpectralVector)> {
        let mut group: RankOneGroup = self.group.parse()?;
        if let Some(rp) = self.rho_prime {
            group = group.with_rho_prime(rp)?;
        }
        let spec = PuritySpectrum::new(group, self.atoms.clone(), self.r, self.omega.clone())?;
        self.f.check(&spec)?;
        Ok((spec, self.f.clone()))
    }
}

/// `psi_sigma(t)` for each atom and each omega component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Multipliers {
    pub atoms: Vec<f64>,
    pub omega: Vec<f64>,
}

/// Component norms of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralVector {
    pub atom_norms: Vec<f64>,
    pub omega_norms: Vec<f64>,
}

impl SpectralVector {
    pub fn new(spec: &PuritySpectrum, atom_norms: Vec<f64>, omega_norms: Vec<f64>) -> Result<Self> {
        let v = Self {
            atom_norms,
            omega_norms,
        };
        v.check(spec)?;
        Ok(v)
    }

    pub fn check(&self, spec: &PuritySpectrum) -> Result<()> {
        if self.atom_norms.len() != spec.atoms.len() || self.omega_norms.len() != spec.omega.len() {
            return Err(Error::invalid(format!(
                "vector shape ({}, {}) does not match spectrum ({}, {})",
                self.atom_norms.len(),
                self.omega_norms.len(),
                spec.atoms.len(),
                spec.omega.len()
            )));
        }
        if let Some(x) = self
            .atom_norms
            .iter()
            .chain(&self.omega_norms)
            .find(|x| !(**x >= 0.0 && x.is_finite()))
        {
            return Err(Error::invalid(format!("component norm {x} must be finite and >= 0")));
        }
        Ok(())
    }

    /// `‖f‖^2 = Σ ‖P_j f‖^2 + Σ w_sigma ‖f_sigma‖^2`.
    pub fn norm(&self, spec: &PuritySpectrum) -> f64 {
        let atoms: f64 = self.atom_norms.iter().map(|a| a * a).sum();
        let omega: f64 = self
            .omega_norms
            .iter()
            .zip(&spec.omega)
            .map(|(o, c)| c.weight * o * o)
            .sum();
        (atoms + omega).sqrt()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            atom_norms: self.atom_norms.iter().map(|a| a * k).collect(),
            omega_norms: self.omega_norms.iter().map(|o| o * k).collect(),
        }
    }
}

/// `A_t f` in component norms, with the signs of the multipliers kept apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedVector {
    pub vector: SpectralVector,
    pub atom_signs: Vec<f64>,
    pub omega_signs: Vec<f64>,
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

pub fn apply_average(spec: &PuritySpectrum, f: &SpectralVector, t: f64) -> Result<AveragedVector> {
    f.check(spec)?;
    Ok(averaged(f, &spec.multipliers(t)?))
}

fn averaged(f: &SpectralVector, m: &Multipliers) -> AveragedVector {
    AveragedVector {
        vector: SpectralVector {
            atom_norms: f.atom_norms.iter().zip(&m.atoms).map(|(a, p)| a * p.abs()).collect(),
            omega_norms: f.omega_norms.iter().zip(&m.omega).map(|(o, p)| o * p.abs()).collect(),
        },
        atom_signs: m.atoms.iter().map(|&p| sign(p)).collect(),
        omega_signs: m.omega.iter().map(|&p| sign(p)).collect(),
    }
}

fn deviation_from(spec: &PuritySpectrum, f: &SpectralVector, m: &Multipliers) -> f64 {
    f.omega_norms
        .iter()
        .zip(&spec.omega)
        .zip(&m.omega)
        .map(|((o, c), p)| c.weight * (p * o).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `‖A_t f - Σ_j psi_j(t) P_j f‖`; the atoms cancel exactly.
pub fn deviation_norm(spec: &PuritySpectrum, f: &SpectralVector, t: f64) -> Result<f64> {
    f.check(spec)?;
    Ok(deviation_from(spec, f, &spec.multipliers(t)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: f64,
    pub deviation: f64,
    pub envelope: f64,
    pub ratio: f64,
    pub direction_distance: f64,
}

/// Deviations against the envelope `t e^{-(rho - r) t} ‖f‖`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    /// Slope of `ln` of the running upper envelope of the deviations against
    /// `t`; `None` with fewer than two non-zero deviations.
    pub fitted_exponent: Option<f64>,
    pub sup_ratio: f64,
}

/// Least-squares slope of `ln y` on `x` over points with `y > 0`.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 0.0 && y.is_finite())
        .map(|&(x, y)| (x, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Replaces each value by the max over itself and all later points, so
/// oscillating deviations are fitted through their crests.
fn upper_envelope(values: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = values.to_vec();
    let mut running = 0.0f64;
    for p in out.iter_mut().rev() {
        running = running.max(p.1);
        p.1 = running;
    }
    out
}

fn direction_distance_from(spec: &PuritySpectrum, f: &SpectralVector, m: &Multipliers) -> f64 {
    if spec.atoms.len() < 2 {
        return f64::NAN;
    }
    // components of A_t f - P_0 f; atom 0 cancels
    let mut comps: Vec<f64> = Vec::with_capacity(spec.atoms.len() + spec.omega.len());
    for j in 1..spec.atoms.len() {
        comps.push(m.atoms[j] * f.atom_norms[j]);
    }
    for ((o, c), p) in f.omega_norms.iter().zip(&spec.omega).zip(&m.omega) {
        comps.push(p * o * c.weight.sqrt());
    }
    let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let mut d2 = (comps[0] / norm - 1.0).powi(2);
    d2 += comps[1..].iter().map(|c| (c / norm).powi(2)).sum::<f64>();
    d2.sqrt()
}

pub fn theorem_mean_report(spec: &PuritySpectrum, f: &SpectralVector, t_grid: &[f64]) -> Result<DecayReport> {
    f.check(spec)?;
    if t_grid.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 1.0)) {
        return Err(Error::invalid(format!("report grid must satisfy t >= 1, got {t}")));
    }
    let norm = f.norm(spec);
    let gap = spec.gap();
    let mults = spec.multipliers_on_grid(t_grid)?;
    let rows: Vec<DecayRow> = t_grid
        .iter()
        .zip(&mults)
        .map(|(&t, m)| {
            let deviation = deviation_from(spec, f, m);
            let envelope = t * (-gap * t).exp() * norm;
            let ratio = if envelope > 0.0 { deviation / envelope } else { 0.0 };
            DecayRow {
                t,
                deviation,
                envelope,
                ratio,
                direction_distance: direction_distance_from(spec, f, m),
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.deviation)).collect();
    Ok(DecayReport {
        fitted_exponent: log_slope(&upper_envelope(&pts)),
        sup_ratio: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
        rows,
    })
}

/// Distance of `(A_t f - P_0 f)/‖A_t f - P_0 f‖` from the unit vector on atom 1.
pub fn direction_convergence(spec: &PuritySpectrum, f: &SpectralVector, t_grid: &[f64]) -> Result<Vec<f64>> {
    f.check(spec)?;
    if spec.atoms.len() < 2 {
        return Err(Error::invalid("direction convergence needs an atom s_1"));
    }
    if !(f.atom_norms[1] > 0.0) {
        return Err(Error::invalid("direction convergence needs ‖P_1 f‖ > 0"));
    }
    let mults = spec.multipliers_on_grid(t_grid)?;
    Ok(mults.iter().map(|m| direction_distance_from(spec, f, m)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteConstant {
    pub eps: f64,
    /// `C_eps` truncated at `N = 1..=n_max`.
    pub partial: Vec<f64>,
    /// `K = max_n deviation(n) / (n e^{-(rho - r) n} ‖f‖)` over `n <= n_max`.
    pub mean_constant: f64,
    /// Comparison bound on the squared tail after `N`:
    /// `K^2 ‖f‖^2 Σ_{n > N} n^{-1-2 eps} <= K^2 ‖f‖^2 N^{-2 eps} / (2 eps)`.
    pub tail_bounds: Vec<f64>,
}

impl DiscreteConstant {
    pub fn value(&self) -> f64 {
        *self.partial.last().unwrap_or(&0.0)
    }
}

/// `C_eps = (Σ_n n^{-3-2 eps} e^{2(rho - r) n} deviation(n)^2)^{1/2}` at the
/// level of norms, with terms formed in log space.
pub fn discrete_constant(spec: &PuritySpectrum, f: &SpectralVector, eps: f64, n_max: u32) -> Result<DiscreteConstant> {
    f.check(spec)?;
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps = {eps} must be positive")));
    }
    if n_max == 0 {
        return Err(Error::invalid("N_max must be at least 1"));
    }
    let times: Vec<f64> = (1..=n_max).map(f64::from).collect();
    let mults = spec.multipliers_on_grid(&times)?;
    let gap = spec.gap();
    let norm = f.norm(spec);
    let mut acc = 0.0;
    let mut partial = Vec::with_capacity(times.len());
    let mut k = 0.0f64;
    for (&n, m) in times.iter().zip(&mults) {
        let dev = deviation_from(spec, f, m);
        if dev > 0.0 {
            let ln_term = (-3.0 - 2.0 * eps) * n.ln() + 2.0 * gap * n + 2.0 * dev.ln();
            acc += ln_term.exp();
            k = k.max((dev.ln() - n.ln() + gap * n - norm.ln()).exp());
        }
        partial.push(acc.sqrt());
    }
    let tail_bounds = times
        .iter()
        .map(|&n| k * k * norm * norm * n.powf(-2.0 * eps) / (2.0 * eps))
        .collect();
    Ok(DiscreteConstant {
        eps,
        partial,
        mean_constant: k,
        tail_bounds,
    })
}

/// Both sides of the triangle inequality that moves the deviation from a grid
/// time `t_n <= t` to `t`, with the ball-regularity bound on each increment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainCheck {
    pub t: f64,
    pub t_n: f64,
    /// `‖A_t f - Σ psi_j(t) P_j f‖`.
    pub lhs: f64,
    /// `‖A_{t_n} f - Σ psi_j(t_n) P_j f‖`.
    pub grid_deviation: f64,
    /// `‖A_t f - A_{t_n} f‖`.
    pub average_increment: f64,
    /// `Σ_j |psi_j(t) - psi_j(t_n)| ‖P_j f‖`.
    pub atom_increment: f64,
    /// `m(B_t \ B_{t_n}) / m(B_t)`.
    pub shell_fraction: f64,
    /// `1 / ⌊e^{δ⌊t_n⌋/2} + 1⌋`.
    pub mesh: f64,
}

impl ChainCheck {
    pub fn rhs(&self) -> f64 {
        self.grid_deviation + self.average_increment + self.atom_increment
    }

    /// Triangle inequality plus the increment bounds, all with `slack` allowance.
    pub fn holds(&self, norm_f: f64, atom_mass: f64, slack: f64) -> bool {
        self.lhs <= self.rhs() + slack
            && self.average_increment <= self.shell_fraction * norm_f + slack
            && self.atom_increment <= self.shell_fraction * atom_mass + slack
    }
}

/// Evaluates the chain at `t >= 1` with `t_n` the last point of the
/// `δ = rho - r` time grid not exceeding `t`.
pub fn interpolation_chain(spec: &PuritySpectrum, f: &SpectralVector, t: f64) -> Result<ChainCheck> {
    f.check(spec)?;
    if !(t >= 1.0) {
        return Err(Error::invalid(format!("chain check needs t >= 1, got {t}")));
    }
    let delta = spec.gap();
    let t_n = TimeGrid::new(delta, t.floor() as u64)?
        .take_while(|p| p.t <= t)
        .last()
        .map(|p| p.t)
        .unwrap_or(1.0);
    let both = spec.multipliers_on_grid(&[t_n, t])?;
    let (mn, mt) = (&both[0], &both[1]);
    let lhs = deviation_from(spec, f, mt);
    let grid_deviation = deviation_from(spec, f, mn);
    let mut inc2 = 0.0;
    let mut atom_increment = 0.0;
    for (j, a) in f.atom_norms.iter().enumerate() {
        let d = (mt.atoms[j] - mn.atoms[j]).abs() * a;
        inc2 += d * d;
        atom_increment += d;
    }
    for (i, o) in f.omega_norms.iter().enumerate() {
        let d = (mt.omega[i] - mn.omega[i]).abs() * o;
        inc2 += spec.omega[i].weight * d * d;
    }
    let shell_fraction = if t > t_n {
        psi_lipschitz_check(&spec.group, SpectralParam::Trivial, t_n, t - t_n)?.bound
    } else {
        0.0
    };
    Ok(ChainCheck {
        t,
        t_n,
        lhs,
        grid_deviation,
        average_increment: inc2.sqrt(),
        atom_increment,
        shell_fraction,
        mesh: 1.0 / subintervals(delta, t_n.floor() as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> PuritySpectrum {
        PuritySpectrum::new(
            RankOneGroup::so(3).unwrap(),
            vec![1.0, 0.7],
            0.4,
            vec![
                OmegaComponent::new(SpectralParam::Complementary(0.4)),
                OmegaComponent::new(SpectralParam::Principal(1.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn config_from_json() {
        let text = r#"{"group": "so:3", "atoms": [1, 0.7], "r": 0.4,
            "omega": [{"param": "c:0.4"}, {"param": "p:1", "weight": 0.5}],
            "f": {"atom_norms": [1, 1], "omega_norms": [1, 2]}}"#;
        let cfg = SpectrumConfig::from_json(text).unwrap();
        let (s, f) = cfg.build().unwrap();
        assert_eq!(s, PuritySpectrum::new(*s.group(), vec![1.0, 0.7], 0.4, s.omega().to_vec()).unwrap());
        assert_eq!(s.omega()[0].weight, 1.0);
        assert_eq!(f.norm(&s), 5f64.sqrt());
        let back: SpectrumConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(SpectrumConfig::from_json(r#"{"group": "so:3"}"#).is_err());
        let bad = text.replace("[1, 2]", "[1]");
        assert!(SpectrumConfig::from_json(&bad).unwrap().build().is_err());
    }

    #[test]
    fn rejects_impure_spectrum() {
        let g = RankOneGroup::so(3).unwrap();
        let bad = PuritySpectrum::new(
            g,
            vec![1.0],
            0.5,
            vec![OmegaComponent::new(SpectralParam::Complementary(0.7))],
        );
        assert!(matches!(bad, Err(Error::Purity(_))));
        let bad = PuritySpectrum::new(
            g,
            vec![1.0],
            0.5,
            vec![OmegaComponent {
                param: SpectralParam::Principal(1.0),
                weight: -1.0,
            }],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn vector_shape_checked() {
        let s = spec();
        assert!(SpectralVector::new(&s, vec![1.0], vec![1.0, 1.0]).is_err());
        assert!(SpectralVector::new(&s, vec![1.0, -1.0], vec![1.0, 1.0]).is_err());
        let v = SpectralVector::new(&s, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(v.norm(&s), 2.0);
    }

    #[test]
    fn atom_zero_is_fixed() {
        let s = spec();
        let f = SpectralVector::new(&s, vec![2.5, 0.0], vec![0.0, 0.0]).unwrap();
        for t in [1.0, 7.0, 33.0] {
            let a = apply_average(&s, &f, t).unwrap();
            assert_eq!(a.vector, f);
            assert_eq!(deviation_norm(&s, &f, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_vector() {
        let s = spec();
        let f = SpectralVector::new(&s, vec![0.0; 2], vec![0.0; 2]).unwrap();
        let a = apply_average(&s, &f, 3.0).unwrap();
        assert_eq!(a.vector, f);
        let r = theorem_mean_report(&s, &f, &[1.0, 2.0]).unwrap();
        assert!(r.rows.iter().all(|row| row.deviation == 0.0 && row.ratio == 0.0));
        assert_eq!(r.fitted_exponent, None);
        assert_eq!(discrete_constant(&s, &f, 0.5, 10).unwrap().value(), 0.0);
    }

    #[test]
    fn single_principal_component_deviation() {
        let g = RankOneGroup::so(3).unwrap();
        let s = PuritySpectrum::new(
            g,
            vec![1.0],
            0.2,
            vec![OmegaComponent::new(SpectralParam::Principal(1.0))],
        )
        .unwrap();
        let f = SpectralVector::new(&s, vec![0.3], vec![1.0]).unwrap();
        for t in [1.0, 4.0, 9.5] {
            let d = deviation_norm(&s, &f, t).unwrap();
            let p = crate::ball::psi(&g, SpectralParam::Principal(1.0), t).unwrap().value;
            assert!((d - p.abs()).abs() < 1e-15);
            assert!((deviation_norm(&s, &f.scaled(2.0), t).unwrap() - 2.0 * d).abs() < 1e-15);
        }
    }

    #[test]
    fn multipliers_preserve_caller_order() {
        let s = spec();
        let a = s.multipliers_on_grid(&[5.0, 1.0, 3.0]).unwrap();
        let b = s.multipliers_on_grid(&[1.0, 3.0, 5.0]).unwrap();
        assert_eq!(a[0], b[2]);
        assert_eq!(a[1], b[0]);
        assert_eq!(a[2], b[1]);
    }

    #[test]
    fn direction_preconditions() {
        let s = spec();
        let f = SpectralVector::new(&s, vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(direction_convergence(&s, &f, &[1.0]).is_err());
        let f = SpectralVector::new(&s, vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let d = direction_convergence(&s, &f, &[1.0, 5.0, 20.0]).unwrap();
        assert!(d.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn log_slope_recovers_exponential() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 3.0 * (-0.6 * i as f64).exp())).collect();
        assert!((log_slope(&pts).unwrap() + 0.6).abs() < 1e-12);
        assert_eq!(log_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn chain_check_holds() {
        let s = spec();
        let f = SpectralVector::new(&s, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let atom_mass: f64 = f.atom_norms.iter().sum();
        for t in [1.0, 1.3, 2.77, 6.02, 9.9] {
            let c = interpolation_chain(&s, &f, t).unwrap();
            assert!(c.t_n <= t && c.t_n >= 1.0);
            assert!(t - c.t_n <= c.mesh + 1e-12);
            assert!(c.holds(f.norm(&s), atom_mass, 1e-9), "{c:?}");
        }
    }
}
