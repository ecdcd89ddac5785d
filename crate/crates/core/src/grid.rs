//! Time grids `t_n` that subdivide each `[m, m+1]` into `⌊e^{δm/2} + 1⌋`
//! equal pieces, and the summability of `Σ t_n^2 e^{-δ t_n}` over them.

use serde::Serialize;

use crate::error::{Error, Result};

/// Intervals with at most this many points are summed term by term.
const ENUMERATION_LIMIT: u64 = 1 << 20;

/// Number of equal sub-intervals of `[m, m+1]`.
pub fn subintervals(delta: f64, m: u64) -> f64 {
    (delta * m as f64 / 2.0).exp().floor() + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    /// Integer part of the interval the point was generated in.
    pub m: u64,
    pub t: f64,
}

/// Iterator over the grid points in `[1, m_max + 1]`, increasing.
#[derive(Debug, Clone)]
pub struct TimeGrid {
    delta: f64,
    m_max: u64,
    m: u64,
    k: u64,
    count: u64,
    done: bool,
}

impl TimeGrid {
    pub fn new(delta: f64, m_max: u64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!("delta = {delta} must be positive")));
        }
        if m_max == 0 {
            return Err(Error::invalid("m_max must be at least 1"));
        }
        let count = subintervals(delta, 1);
        if count > u64::MAX as f64 {
            return Err(Error::invalid("sub-interval count overflows"));
        }
        Ok(Self {
            delta,
            m_max,
            m: 1,
            k: 0,
            count: count as u64,
            done: false,
        })
    }
}

impl Iterator for TimeGrid {
    type Item = GridPoint;

    fn next(&mut self) -> Option<GridPoint> {
        if self.done {
            return None;
        }
        if self.m > self.m_max {
            self.done = true;
            return Some(GridPoint {
                m: self.m_max,
                t: (self.m_max + 1) as f64,
            });
        }
        let point = GridPoint {
            m: self.m,
            t: self.m as f64 + self.k as f64 / self.count as f64,
        };
        self.k += 1;
        if self.k == self.count {
            self.k = 0;
            self.m += 1;
            self.count = subintervals(self.delta, self.m).min(u64::MAX as f64) as u64;
        }
        Some(point)
    }
}

/// All grid points in `[1, m_max + 1]`.
pub fn time_grid(delta: f64, m_max: u64) -> Result<Vec<GridPoint>> {
    let total: f64 = (1..=m_max).map(|m| subintervals(delta, m)).sum();
    if total > 5e7 {
        return Err(Error::invalid(format!(
            "grid has {total:e} points; iterate with TimeGrid instead"
        )));
    }
    Ok(TimeGrid::new(delta, m_max)?.collect())
}

fn term(delta: f64, t: f64) -> f64 {
    t * t * (-delta * t).exp()
}

/// `Σ_{k=0}^{K-1} g(m + k/K)` with `g(τ) = τ^2 e^{-δτ}`. Large `K` use
/// Euler–Maclaurin through the `g'''` correction.
pub fn interval_sum(delta: f64, m: u64) -> f64 {
    let count = subintervals(delta, m);
    let a = m as f64;
    if count <= ENUMERATION_LIMIT as f64 {
        let n = count as u64;
        return (0..n).map(|k| term(delta, a + k as f64 / count)).sum();
    }
    let b = a + 1.0;
    let h = 1.0 / count;
    let e = |t: f64| (-delta * t).exp();
    let antideriv = |t: f64| -e(t) * (t * t / delta + 2.0 * t / (delta * delta) + 2.0 / delta.powi(3));
    let g1 = |t: f64| (2.0 * t - delta * t * t) * e(t);
    let g3 = |t: f64| (-6.0 * delta + 6.0 * delta * delta * t - delta.powi(3) * t * t) * e(t);
    (antideriv(b) - antideriv(a)) / h + 0.5 * (term(delta, a) - term(delta, b))
        + h / 12.0 * (g1(b) - g1(a))
        - h.powi(3) / 720.0 * (g3(b) - g3(a))
}

/// `(m + 1)^2 ⌊e^{δm/2} + 1⌋ e^{-δm}`.
pub fn dominating_term(delta: f64, m: u64) -> f64 {
    let mf = m as f64;
    (mf + 1.0).powi(2) * subintervals(delta, m) * (-delta * mf).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteSumReport {
    pub delta: f64,
    /// `S(M)`: sum of `t_n^2 e^{-δ t_n}` over the points in `[1, M + 1)`, `M = 1..=m_max`.
    pub partial_sums: Vec<f64>,
    /// Partial sums of the dominating series.
    pub dominating: Vec<f64>,
}

impl FiniteSumReport {
    /// `|S(2M) - S(M)|`, summed directly over `m in (M, 2M]`.
    pub fn cauchy_gap(&self, m: u64) -> f64 {
        (m + 1..=2 * m).map(|k| interval_sum(self.delta, k)).sum()
    }
}

pub fn finite_sum_check(delta: f64, m_max: u64) -> Result<FiniteSumReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("delta = {delta} must be positive")));
    }
    let mut s = 0.0;
    let mut d = 0.0;
    let mut partial_sums = Vec::with_capacity(m_max as usize);
    let mut dominating = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        s += interval_sum(delta, m);
        d += dominating_term(delta, m);
        partial_sums.push(s);
        dominating.push(d);
    }
    Ok(FiniteSumReport {
        delta,
        partial_sums,
        dominating,
    })
}

/// Smallest `M <= m_cap` with `|S(2M) - S(M)| < tol`.
pub fn cauchy_threshold(delta: f64, tol: f64, m_cap: u64) -> Option<u64> {
    (1..=m_cap).find(|&m| {
        let gap: f64 = (m + 1..=2 * m).map(|k| interval_sum(delta, k)).sum();
        gap < tol
    })
}

/// Result of checking `t_n^2 e^{-δ t_n} <= (m+1)^2 e^{-δm}` point by point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationCheck {
    pub points: u64,
    pub violations: u64,
    /// Largest ratio of term to its bound.
    pub max_ratio: f64,
}

pub fn check_domination(delta: f64, m_max: u64) -> Result<DominationCheck> {
    let mut out = DominationCheck {
        points: 0,
        violations: 0,
        max_ratio: 0.0,
    };
    for p in TimeGrid::new(delta, m_max)? {
        let mf = p.m as f64;
        let bound = (mf + 1.0).powi(2) * (-delta * mf).exp();
        let ratio = term(delta, p.t) / bound;
        out.points += 1;
        if ratio > 1.0 {
            out.violations += 1;
        }
        out.max_ratio = out.max_ratio.max(ratio);
    }
    Ok(out)
}
