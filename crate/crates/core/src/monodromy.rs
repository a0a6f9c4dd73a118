//! Fundamental solutions of `-y'' + q y = λ y` on `[0, 1]` and the Hill
//! discriminant built from them.
//!
//! For piecewise-constant `q` the monodromy is an exact product of 2×2
//! transfer matrices; λ-derivatives are carried along by the product rule.

use num_complex::Complex;
use serde::Serialize;

use crate::edges::{sequential_zeros, EdgeSearch, EdgeSet};
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::quasimomentum::{branch, Quasimomentum};
use crate::real::{parity_sign, Real};

/// Below this `|w² E|` the transfer entries use their Taylor series.
const SERIES_THRESHOLD: f64 = 0.5;

/// `θ, φ` and their `t`-derivatives at `t = 1`, with λ-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Monodromy<T> {
    pub lambda: T,
    pub theta: T,
    /// `θ'(1)` (derivative in `t`).
    pub theta_t: T,
    pub phi: T,
    /// `φ'(1)`.
    pub phi_t: T,
    /// `∂λ` of `theta, theta_t, phi, phi_t`.
    pub d_theta: T,
    pub d_theta_t: T,
    pub d_phi: T,
    pub d_phi_t: T,
}

impl<T: Real> Monodromy<T> {
    /// `Δ = (φ' + θ)/2`
    pub fn delta(&self) -> T {
        (self.phi_t + self.theta) * T::lit(0.5)
    }

    /// `Δ₋ = (φ' - θ)/2`
    pub fn delta_minus(&self) -> T {
        (self.phi_t - self.theta) * T::lit(0.5)
    }

    pub fn d_delta(&self) -> T {
        (self.d_phi_t + self.d_theta) * T::lit(0.5)
    }

    pub fn d_delta_minus(&self) -> T {
        (self.d_phi_t - self.d_theta) * T::lit(0.5)
    }

    /// `θ φ' - θ' φ`, identically 1.
    pub fn wronskian(&self) -> T {
        self.theta * self.phi_t - self.theta_t * self.phi
    }

    /// Scale against which the Wronskian's rounding error is measured.
    pub fn wronskian_scale(&self) -> T {
        (self.theta * self.phi_t).abs() + (self.theta_t * self.phi).abs()
    }

    /// `F = (9Δ² - Δ₋² - 5)/4`, evaluated as `2Δ² - 1 + θ'φ/4`.
    pub fn f(&self) -> T {
        let d = self.delta();
        T::lit(2.0) * d * d - T::one() + self.theta_t * self.phi * T::lit(0.25)
    }

    /// `∂λ F`
    pub fn df(&self) -> T {
        T::lit(4.0) * self.delta() * self.d_delta()
            + (self.d_theta_t * self.phi + self.theta_t * self.d_phi) * T::lit(0.25)
    }
}

/// `(cos √x, sin √x / √x, d/dx [sin √x / √x])`, entire in `x` and real on ℝ.
pub(crate) fn trig_kernel<T: Real>(x: T) -> (T, T, T) {
    if x.abs() < T::lit(SERIES_THRESHOLD) {
        // c = Σ(-x)^k/(2k)!, s = Σ(-x)^k/(2k+1)!, s' = Σ_{k≥1} k(-x)^{k-1}(-1)/(2k+1)!
        let mut c = T::zero();
        let mut s = T::zero();
        let mut sp = T::zero();
        let mut pc = T::one();
        let mut ps = T::one();
        let mut k = 0usize;
        loop {
            c = c + pc;
            s = s + ps;
            let kk = T::from_usize(k).unwrap();
            let two_k = T::lit(2.0) * kk;
            // term k+1 of s' is -(k+1) ps / ((2k+2)(2k+3))
            let pd = -(kk + T::one()) * ps / ((two_k + T::lit(2.0)) * (two_k + T::lit(3.0)));
            sp = sp + pd;
            pc = -pc * x / ((two_k + T::one()) * (two_k + T::lit(2.0)));
            ps = -ps * x / ((two_k + T::lit(2.0)) * (two_k + T::lit(3.0)));
            k += 1;
            if pc.abs() + ps.abs() + pd.abs() < T::epsilon() * T::lit(1e-3) || k > 40 {
                break;
            }
        }
        (c, s, sp)
    } else if x > T::zero() {
        let r = x.sqrt();
        let c = r.cos();
        let s = r.sin() / r;
        (c, s, (c - s) / (T::lit(2.0) * x))
    } else {
        let r = (-x).sqrt();
        let c = r.cosh();
        let s = r.sinh() / r;
        (c, s, (c - s) / (T::lit(2.0) * x))
    }
}

/// Entries `C`, `S` of one constant-potential transfer matrix and `∂E S`.
struct Transfer<T> {
    c: T,
    s: T,
    ds: T,
}

fn transfer<T: Real>(w: T, e: T) -> Transfer<T> {
    let (c, s, sp) = trig_kernel(w * w * e);
    Transfer {
        c,
        s: w * s,
        ds: w * w * w * sp,
    }
}

type Mat<T> = [[T; 2]; 2];

fn mul<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn add<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

/// Monodromy of `q` at spectral parameter `λ`.
pub fn evaluate<T: Real>(q: &PotentialSpec<T>, lambda: T) -> Monodromy<T> {
    let half = T::lit(0.5);
    let mut p: Mat<T> = [[T::one(), T::zero()], [T::zero(), T::one()]];
    let mut dp: Mat<T> = [[T::zero(); 2]; 2];
    for piece in q.pieces() {
        let w = piece.width;
        let e = lambda - piece.value;
        let t = transfer(w, e);
        let m = [[t.c, t.s], [-e * t.s, t.c]];
        let dm = [
            [-w * t.s * half, t.ds],
            [-(t.s + w * t.c) * half, -w * t.s * half],
        ];
        dp = add(&mul(&dm, &p), &mul(&m, &dp));
        p = mul(&m, &p);
    }
    Monodromy {
        lambda,
        theta: p[0][0],
        theta_t: p[1][0],
        phi: p[0][1],
        phi_t: p[1][1],
        d_theta: dp[0][0],
        d_theta_t: dp[1][0],
        d_phi: dp[0][1],
        d_phi_t: dp[1][1],
    }
}

/// Periodic/antiperiodic edges of the Hill operator plus Dirichlet roots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HillSpectrum<T> {
    pub edges: EdgeSet<T>,
    /// Zeros of `φ(1, λ)`; the n-th lies in the closure of gap `n`.
    pub dirichlet: Vec<T>,
}

/// Edges `λ̃₀⁺ < λ̃₁⁻ ≤ λ̃₁⁺ < …` of `-y'' + q y` through gap `n_max`.
pub fn hill_spectrum<T: Real>(q: &PotentialSpec<T>, n_max: usize) -> Result<HillSpectrum<T>> {
    if n_max == 0 {
        return Err(Error::InvalidBandCount);
    }
    let value = |l: T| {
        let m = evaluate(q, l);
        (m.delta(), m.d_delta())
    };
    let critical = |l: T| evaluate(q, l).d_delta();
    let search = EdgeSearch {
        value: &value,
        critical: &critical,
        spacing: T::PI(),
        shift: q.q0(),
        lower_hint: q.min_value() - T::one(),
        degeneracy_tol: T::tol(1e-12, 64.0),
        what: "Hill edge",
    };
    let edges = search.solve(n_max)?;
    let phi = |l: T| evaluate(q, l).phi;
    let dirichlet = sequential_zeros(
        &phi,
        n_max,
        T::PI(),
        q.q0(),
        &|n| -parity_sign::<T>(n),
        "Dirichlet root",
    )?;
    Ok(HillSpectrum { edges, dirichlet })
}

/// Hill quasimomentum `k̃(λ)` with the branch `k̃(σ̃ₙ) = [π(n-1), πn]`.
pub fn hill_quasimomentum<T: Real>(q: &PotentialSpec<T>, lambda: T) -> Result<Complex<T>> {
    let reach = (lambda - q.min_value()).max(T::zero()).sqrt() / T::PI();
    let n_max = reach.to_usize().unwrap_or(0) + 2;
    let spec = hill_spectrum(q, n_max)?;
    let m = evaluate(q, lambda);
    let k: Quasimomentum<T> = branch(&spec.edges, lambda, m.delta(), m.d_delta())?;
    Ok(k.to_complex())
}
