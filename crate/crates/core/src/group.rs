//! Root data of rank-one groups and the parametrization of their spherical dual.
//!
//! A rank-one group is described by the multiplicities `(n1, n2)` of its short
//! and long restricted roots. Everything else used in this crate (the half-sum
//! `rho`, the Jacobi parameters `alpha`, `beta`) is derived from them.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named families of connected simple rank-one groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupName {
    /// `SO°(n,1)`, `n >= 2`.
    So(u32),
    /// `SU(n,1)`, `n >= 2`.
    Su(u32),
    /// `Sp(n,1)`, `n >= 2`.
    Sp(u32),
    /// `F4(-20)`.
    F4,
    /// Arbitrary multiplicities.
    Custom(u32, u32),
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupName::So(n) => write!(f, "so:{n}"),
            GroupName::Su(n) => write!(f, "su:{n}"),
            GroupName::Sp(n) => write!(f, "sp:{n}"),
            GroupName::F4 => write!(f, "f4"),
            GroupName::Custom(a, b) => write!(f, "custom:{a},{b}"),
        }
    }
}

impl FromStr for GroupName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "f4" {
            return Ok(GroupName::F4);
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("unrecognised group `{s}`")))?;
        let int = |v: &str| -> Result<u32> {
            v.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("bad integer `{v}` in group `{s}`")))
        };
        match kind {
            "so" => Ok(GroupName::So(int(rest)?)),
            "su" => Ok(GroupName::Su(int(rest)?)),
            "sp" => Ok(GroupName::Sp(int(rest)?)),
            "custom" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::invalid("custom group needs `custom:n1,n2`"))?;
                Ok(GroupName::Custom(int(a)?, int(b)?))
            }
            _ => Err(Error::invalid(format!("unrecognised group `{s}`"))),
        }
    }
}

/// Root multiplicities of a rank-one group plus the configured top of the
/// complementary series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankOneGroup {
    name: GroupName,
    n1: u32,
    n2: u32,
    rho_prime: f64,
    /// Set when `rho_prime` was defaulted to `rho` for a family whose actual
    /// complementary range is not known to this crate.
    rho_prime_defaulted: bool,
}

impl RankOneGroup {
    pub fn new(name: GroupName) -> Result<Self> {
        let (n1, n2) = match name {
            GroupName::So(n) if n >= 2 => (n - 1, 0),
            GroupName::Su(n) if n >= 2 => (2 * (n - 1), 1),
            GroupName::Sp(n) if n >= 2 => (4 * (n - 1), 3),
            GroupName::F4 => (8, 7),
            GroupName::Custom(n1, n2) => (n1, n2),
            other => return Err(Error::invalid(format!("unsupported rank in {other} (need n >= 2)"))),
        };
        if n1 == 0 {
            return Err(Error::invalid("short root multiplicity n1 must be at least 1"));
        }
        let rho = f64::from(n1 + 2 * n2) / 2.0;
        Ok(Self {
            name,
            n1,
            n2,
            rho_prime: rho,
            rho_prime_defaulted: !matches!(name, GroupName::So(_)),
        })
    }

    /// Overrides the upper end of the complementary series range.
    pub fn with_rho_prime(mut self, rho_prime: f64) -> Result<Self> {
        if !(rho_prime > 0.0 && rho_prime <= self.rho()) {
            return Err(Error::invalid(format!(
                "rho' = {rho_prime} must lie in (0, rho = {}]",
                self.rho()
            )));
        }
        self.rho_prime = rho_prime;
        self.rho_prime_defaulted = false;
        Ok(self)
    }

    pub fn so(n: u32) -> Result<Self> {
        Self::new(GroupName::So(n))
    }

    pub fn name(&self) -> GroupName {
        self.name
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn rho(&self) -> f64 {
        f64::from(self.n1 + 2 * self.n2) / 2.0
    }

    pub fn rho_prime(&self) -> f64 {
        self.rho_prime
    }

    pub fn rho_prime_defaulted(&self) -> bool {
        self.rho_prime_defaulted
    }

    /// Jacobi parameter `alpha = (n1 + n2 - 1) / 2`.
    pub fn alpha(&self) -> f64 {
        (f64::from(self.n1 + self.n2) - 1.0) / 2.0
    }

    /// Jacobi parameter `beta = (n2 - 1) / 2`.
    pub fn beta(&self) -> f64 {
        (f64::from(self.n2) - 1.0) / 2.0
    }
}

impl FromStr for RankOneGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RankOneGroup::new(s.parse()?)
    }
}

/// A point of the spherical dual `{rho} ∪ (0, rho'] ∪ iR+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SpectralParam {
    Trivial,
    /// Complementary series with real parameter `s`.
    Complementary(f64),
    /// Principal series with parameter `s = i * lambda`.
    Principal(f64),
}

impl SpectralParam {
    /// Real part of the parameter `s`.
    pub fn re_s(&self, group: &RankOneGroup) -> f64 {
        match *self {
            SpectralParam::Trivial => group.rho(),
            SpectralParam::Complementary(s) => s,
            SpectralParam::Principal(_) => 0.0,
        }
    }

    /// The parameter `s` as a complex number.
    pub fn s(&self, group: &RankOneGroup) -> Complex64 {
        match *self {
            SpectralParam::Trivial => Complex64::new(group.rho(), 0.0),
            SpectralParam::Complementary(s) => Complex64::new(s, 0.0),
            SpectralParam::Principal(l) => Complex64::new(0.0, l),
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, SpectralParam::Trivial)
    }

    /// Checks the parameter lies in the spherical dual of `group`.
    pub fn validate(&self, group: &RankOneGroup) -> Result<()> {
        match *self {
            SpectralParam::Trivial => Ok(()),
            SpectralParam::Complementary(s) => {
                if s > 0.0 && s <= group.rho_prime() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "complementary parameter {s} outside (0, rho' = {}]",
                        group.rho_prime()
                    )))
                }
            }
            SpectralParam::Principal(l) => {
                if l >= 0.0 && l.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("principal parameter {l} must be >= 0")))
                }
            }
        }
    }
}

impl fmt::Display for SpectralParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralParam::Trivial => write!(f, "trivial"),
            SpectralParam::Complementary(s) => write!(f, "c:{s}"),
            SpectralParam::Principal(l) => write!(f, "p:{l}"),
        }
    }
}

impl FromStr for SpectralParam {
    type Err = Error;

    /// Accepts `trivial`, `c:<s>` and `p:<lambda>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("trivial") {
            return Ok(SpectralParam::Trivial);
        }
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("unrecognised spectral parameter `{s}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad number in spectral parameter `{s}`")))?;
        match kind {
            "c" => Ok(SpectralParam::Complementary(value)),
            "p" => Ok(SpectralParam::Principal(value)),
            _ => Err(Error::invalid(format!("unrecognised spectral parameter `{s}`"))),
        }
    }
}

impl TryFrom<String> for SpectralParam {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SpectralParam> for String {
    fn from(p: SpectralParam) -> String {
        p.to_string()
    }
}

/// Checks the purity inequalities `rho = s_0 > s_1 > ... > s_k > r > 0` and
/// `Re s <= r` on the remainder `omega`. Every failed inequality is reported.
pub fn validate_purity(
    group: &RankOneGroup,
    atoms: &[f64],
    r: f64,
    omega: &[SpectralParam],
) -> Result<()> {
    let mut violations = Vec::new();
    let rho = group.rho();

    if !(r > 0.0) {
        violations.push(format!("r = {r} must be positive"));
    }
    match atoms.first() {
        None => violations.push("atom list is empty (s_0 = rho is required)".into()),
        Some(&s0) if (s0 - rho).abs() > 1e-12 => {
            violations.push(format!("s_0 = {s0} differs from rho = {rho}"))
        }
        _ => {}
    }
    for (j, pair) in atoms.windows(2).enumerate() {
        if !(pair[0] > pair[1]) {
            violations.push(format!(
                "atoms not strictly decreasing at s_{} = {} >= s_{} = {}",
                j + 1,
                pair[1],
                j,
                pair[0]
            ));
        }
    }
    for (j, &s) in atoms.iter().enumerate() {
        if !(s > r) {
            violations.push(format!("atom s_{j} = {s} is not above r = {r}"));
        }
        if j > 0 && !(s > 0.0 && s <= group.rho_prime()) {
            violations.push(format!(
                "atom s_{j} = {s} outside the complementary range (0, {}]",
                group.rho_prime()
            ));
        }
    }
    for (i, p) in omega.iter().enumerate() {
        if let Err(e) = p.validate(group) {
            violations.push(format!("omega[{i}]: {e}"));
        }
        let re = p.re_s(group);
        if re > r {
            violations.push(format!("omega[{i}] = {p} has Re s = {re} above r = {r}"));
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Purity(violations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so_multiplicities() {
        let g = RankOneGroup::so(3).unwrap();
        assert_eq!((g.n1(), g.n2()), (2, 0));
        assert_eq!(g.rho(), 1.0);
        assert_eq!(g.rho_prime(), 1.0);
        assert!(!g.rho_prime_defaulted());

        let g = RankOneGroup::so(2).unwrap();
        assert_eq!((g.n1(), g.n2()), (1, 0));
        assert_eq!(g.rho(), 0.5);
    }

    #[test]
    fn other_families() {
        let su = RankOneGroup::new(GroupName::Su(3)).unwrap();
        assert_eq!((su.n1(), su.n2()), (4, 1));
        assert_eq!(su.rho(), 3.0);
        assert!(su.rho_prime_defaulted());
        let sp = RankOneGroup::new(GroupName::Sp(2)).unwrap();
        assert_eq!((sp.n1(), sp.n2()), (4, 3));
        let f4 = RankOneGroup::new(GroupName::F4).unwrap();
        assert_eq!((f4.n1(), f4.n2()), (8, 7));
        assert_eq!(f4.rho(), 11.0);
    }

    #[test]
    fn custom_alpha_beta() {
        let g = RankOneGroup::new(GroupName::Custom(2, 0)).unwrap();
        assert_eq!(g.alpha(), 0.5);
        assert_eq!(g.beta(), -0.5);
    }

    #[test]
    fn jacobi_identities_hold_exactly() {
        let names = [
            GroupName::So(2),
            GroupName::So(7),
            GroupName::Su(4),
            GroupName::Sp(3),
            GroupName::F4,
            GroupName::Custom(5, 2),
        ];
        for name in names {
            let g = RankOneGroup::new(name).unwrap();
            assert_eq!(2.0 * g.alpha() + 1.0, f64::from(g.n1() + g.n2()));
            assert_eq!(2.0 * g.beta() + 1.0, f64::from(g.n2()));
            assert_eq!(g.alpha() + g.beta() + 1.0, g.rho());
            assert!(g.alpha() >= g.beta());
        }
    }

    #[test]
    fn rejects_bad_groups() {
        assert!(RankOneGroup::so(1).is_err());
        assert!(RankOneGroup::new(GroupName::Su(1)).is_err());
        assert!(RankOneGroup::new(GroupName::Custom(0, 3)).is_err());
        assert!(RankOneGroup::so(3).unwrap().with_rho_prime(1.5).is_err());
        assert!(RankOneGroup::so(3).unwrap().with_rho_prime(0.0).is_err());
    }

    #[test]
    fn parse_groups() {
        assert_eq!("so:3".parse::<GroupName>().unwrap(), GroupName::So(3));
        assert_eq!("SU:2".parse::<GroupName>().unwrap(), GroupName::Su(2));
        assert_eq!("f4".parse::<GroupName>().unwrap(), GroupName::F4);
        assert_eq!(
            "custom:3,1".parse::<GroupName>().unwrap(),
            GroupName::Custom(3, 1)
        );
        assert!("so".parse::<GroupName>().is_err());
        assert!("xx:3".parse::<GroupName>().is_err());
    }

    #[test]
    fn parse_params() {
        assert_eq!("trivial".parse::<SpectralParam>().unwrap(), SpectralParam::Trivial);
        assert_eq!(
            "c:0.5".parse::<SpectralParam>().unwrap(),
            SpectralParam::Complementary(0.5)
        );
        assert_eq!(
            "p:1".parse::<SpectralParam>().unwrap(),
            SpectralParam::Principal(1.0)
        );
        assert!("q:1".parse::<SpectralParam>().is_err());
    }

    #[test]
    fn re_s_values() {
        let g = RankOneGroup::so(3).unwrap();
        assert_eq!(SpectralParam::Trivial.re_s(&g), 1.0);
        assert_eq!(SpectralParam::Principal(7.0).re_s(&g), 0.0);
        assert_eq!(SpectralParam::Complementary(0.3).re_s(&g), 0.3);
        assert!(SpectralParam::Complementary(1.2).validate(&g).is_err());
        assert!(SpectralParam::Principal(-1.0).validate(&g).is_err());
    }

    #[test]
    fn purity_examples() {
        let g = RankOneGroup::so(3).unwrap();
        assert!(validate_purity(&g, &[1.0, 0.8], 0.5, &[SpectralParam::Principal(1.0)]).is_ok());

        let err = validate_purity(&g, &[1.0], 0.5, &[SpectralParam::Complementary(0.7)]);
        assert!(matches!(err, Err(Error::Purity(v)) if v.len() == 1));

        let err = validate_purity(&g, &[0.9], 0.5, &[]);
        assert!(matches!(err, Err(Error::Purity(v)) if v.len() == 1));
    }

    #[test]
    fn purity_reports_each_violation() {
        let g = RankOneGroup::so(3).unwrap();
        let err = validate_purity(
            &g,
            &[0.9, 0.95],
            -0.1,
            &[SpectralParam::Complementary(0.7)],
        )
        .unwrap_err();
        match err {
            // r <= 0, s_0 != rho, not decreasing, omega above r
            Error::Purity(v) => assert_eq!(v.len(), 4, "{v:?}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
