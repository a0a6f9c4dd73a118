//! Labeled band edges of a Floquet discriminant.
//!
//! Both the Hill discriminant `Δ` and the modified Lyapunov function `ξ`
//! oscillate between `±1` with exactly one critical point per closed gap.
//! Edges are found segment by segment between consecutive critical points,
//! where the discriminant is monotone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{parity_sign, Real};
use crate::roots::{brent, expand_bracket, newton_bisect, RootOptions};

/// Bracket expansions allowed before a search is declared failed.
pub const MAX_DOUBLINGS: usize = 8;

/// Gap `n ≥ 1`: `(minus, plus)` with the critical point and height inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap<T> {
    pub n: usize,
    pub minus: T,
    pub plus: T,
    /// Zero of the discriminant's derivative inside `[minus, plus]`.
    pub critical: T,
    /// `h ≥ 0` with `f(critical) = (-1)^n cosh h`.
    pub height: T,
    pub degenerate: bool,
}

impl<T: Real> Gap<T> {
    pub fn width(&self) -> T {
        self.plus - self.minus
    }

    pub fn is_open(&self) -> bool {
        !self.degenerate
    }

    /// Edge `λₙ⁺` (`plus = true`) or `λₙ⁻`.
    pub fn edge(&self, plus: bool) -> T {
        if plus {
            self.plus
        } else {
            self.minus
        }
    }
}

/// Where a real spectral parameter sits relative to the labeled edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `λ < λ₀⁺`
    Below,
    /// Band `σₙ = [λₙ₋₁⁺, λₙ⁻]`, `n ≥ 1`.
    Band(usize),
    /// Open gap `(λₙ⁻, λₙ⁺)`.
    Gap(usize),
    /// Past the last computed edge.
    Beyond,
}

/// `λ₀⁺ < λ₁⁻ ≤ λ₁⁺ < λ₂⁻ ≤ …` through `n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeSet<T> {
    pub lambda0_plus: T,
    pub gaps: Vec<Gap<T>>,
}

impl<T: Real> EdgeSet<T> {
    pub fn n_max(&self) -> usize {
        self.gaps.len()
    }

    /// Gap `n` (1-based).
    pub fn gap(&self, n: usize) -> Option<&Gap<T>> {
        n.checked_sub(1).and_then(|i| self.gaps.get(i))
    }

    /// `λₙ⁺`, with `λ₀⁺` for `n = 0`.
    pub fn upper_edge(&self, n: usize) -> Option<T> {
        if n == 0 {
            Some(self.lambda0_plus)
        } else {
            self.gap(n).map(|g| g.plus)
        }
    }

    /// Band `σₙ = [λₙ₋₁⁺, λₙ⁻]`.
    pub fn band(&self, n: usize) -> Option<(T, T)> {
        let lo = self.upper_edge(n.checked_sub(1)?)?;
        let hi = self.gap(n)?.minus;
        Some((lo, hi))
    }

    pub fn band_width(&self, n: usize) -> Option<T> {
        self.band(n).map(|(lo, hi)| hi - lo)
    }

    /// Every edge value in increasing order (degenerate gaps contribute twice).
    pub fn all_edges(&self) -> Vec<T> {
        let mut v = vec![self.lambda0_plus];
        for g in &self.gaps {
            v.push(g.minus);
            v.push(g.plus);
        }
        v
    }

    pub fn locate(&self, lambda: T) -> Region {
        if lambda < self.lambda0_plus {
            return Region::Below;
        }
        let mut lo = self.lambda0_plus;
        for g in &self.gaps {
            if lambda >= lo && lambda <= g.minus {
                return Region::Band(g.n);
            }
            if lambda > g.minus && lambda < g.plus {
                return Region::Gap(g.n);
            }
            lo = g.plus;
        }
        Region::Beyond
    }
}

/// Search parameters for one discriminant.
pub(crate) struct EdgeSearch<'a, T> {
    /// `λ ↦ (f, f')` for the discriminant.
    pub value: &'a dyn Fn(T) -> (T, T),
    /// Function whose zeros are the critical points of `f`.
    pub critical: &'a dyn Fn(T) -> T,
    /// Spacing of critical points in `√λ` for the free problem.
    pub spacing: T,
    /// Additive shift of the free guesses (the mean of `q`).
    pub shift: T,
    /// Starting point for the downward search of `λ₀⁺`.
    pub lower_hint: T,
    /// `(-1)^n f(λₙ) ≤ 1 + degeneracy_tol` marks a closed gap.
    pub degeneracy_tol: T,
    pub what: &'static str,
}

fn free_guess<T: Real>(x: T, spacing: T, shift: T) -> T {
    let z = x * spacing;
    z * z + shift
}

/// Zeros `λ₁ < λ₂ < … < λ_count` of `g`, the n-th seeded at `((n)·spacing)² + shift`
/// and expected to satisfy `sign(g(λ⁻)) = left_sign(n)` just below it.
pub(crate) fn sequential_zeros<T: Real>(
    g: &dyn Fn(T) -> T,
    count: usize,
    spacing: T,
    shift: T,
    left_sign: &dyn Fn(usize) -> T,
    what: &'static str,
) -> Result<Vec<T>> {
    let half = T::lit(0.5);
    let opts = RootOptions::default();
    let mut zeros: Vec<T> = Vec::with_capacity(count);
    for n in 1..=count {
        let nn = T::from_usize(n).unwrap();
        let center = free_guess(nn, spacing, shift);
        let lo = free_guess(nn - half, spacing, shift);
        let hi = free_guess(nn + half, spacing, shift);
        let floor = zeros
            .last()
            .map(|&p: &T| p + T::tol(1e-12, 16.0) * p.abs().max(T::one()));
        let s = left_sign(n);
        let (lo, hi) = expand_bracket(center, lo, hi, floor, None, MAX_DOUBLINGS, |a, b| {
            s * g(a) > T::zero() && s * g(b) < T::zero()
        })
        .ok_or(Error::BracketFailure { what, index: n })?;
        let root = brent(g, lo, hi, opts).ok_or(Error::NoConvergence { what })?;
        if let Some(&prev) = zeros.last() {
            if root <= prev {
                return Err(Error::BracketFailure { what, index: n });
            }
        }
        zeros.push(root);
    }
    Ok(zeros)
}

impl<'a, T: Real> EdgeSearch<'a, T> {
    pub(crate) fn critical_points(&self, count: usize) -> Result<Vec<T>> {
        sequential_zeros(
            self.critical,
            count,
            self.spacing,
            self.shift,
            &|n| parity_sign(n),
            self.what,
        )
    }

    fn lambda0_plus(&self, first_critical: T) -> Result<T> {
        let f = self.value;
        let target = T::one();
        let mut lo = self.lower_hint.min(first_critical - T::one());
        let mut step = T::one();
        let mut found = false;
        for _ in 0..=(MAX_DOUBLINGS + 8) {
            if f(lo).0 > target {
                found = true;
                break;
            }
            step = step * T::lit(2.0);
            lo = lo - step;
        }
        if !found {
            return Err(Error::BracketFailure {
                what: self.what,
                index: 0,
            });
        }
        newton_bisect(
            |x| {
                let (v, d) = f(x);
                (v - target, d)
            },
            lo,
            first_critical,
            RootOptions::default(),
        )
        .ok_or(Error::BracketFailure {
            what: self.what,
            index: 0,
        })
    }

    /// Labeled edges through `n_max`.
    pub(crate) fn solve(&self, n_max: usize) -> Result<EdgeSet<T>> {
        if n_max == 0 {
            return Err(Error::InvalidBandCount);
        }
        let crit = self.critical_points(n_max + 1)?;
        let f = self.value;
        let lambda0_plus = self.lambda0_plus(crit[0])?;
        let mut gaps = Vec::with_capacity(n_max);
        let opts = RootOptions::default();
        for n in 1..=n_max {
            let t: T = parity_sign(n);
            let c = crit[n - 1];
            let v = t * f(c).0;
            let closed = Gap {
                n,
                minus: c,
                plus: c,
                critical: c,
                height: T::zero(),
                degenerate: true,
            };
            if v <= T::one() + self.degeneracy_tol {
                gaps.push(closed);
                continue;
            }
            let left = if n == 1 { lambda0_plus } else { crit[n - 2] };
            let right = crit[n];
            let shifted = |x: T| {
                let (y, d) = f(x);
                (y - t, d)
            };
            let minus = newton_bisect(shifted, left, c, opts).ok_or(Error::BracketFailure {
                what: self.what,
                index: n,
            })?;
            let plus = newton_bisect(shifted, c, right, opts).ok_or(Error::BracketFailure {
                what: self.what,
                index: n,
            })?;
            if plus - minus < T::tol(1e-9, 64.0) * minus.abs().max(T::one()) {
                gaps.push(closed);
                continue;
            }
            gaps.push(Gap {
                n,
                minus,
                plus,
                critical: c,
                height: v.acosh(),
                degenerate: false,
            });
        }
        Ok(EdgeSet { lambda0_plus, gaps })
    }
}
