//! Piecewise-constant 1-periodic potentials and the functionals of `q`
//! consumed by the band-structure formulas.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Default number of cells when projecting a general potential.
pub const DEFAULT_PROJECTION_CELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece<T> {
    pub width: T,
    pub value: T,
}

/// A 1-periodic potential, constant on each cell of a partition of `[0, 1]`.
///
/// Immutable after construction; `q0` is the mean `Σ width·value`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialSpec<T> {
    label: String,
    pieces: Vec<Piece<T>>,
    q0: T,
}

/// Fourier data of `q` at index `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierCoeffs<T> {
    pub n: usize,
    /// `∫₀¹ q(t) e^{i2πnt} dt`
    pub q_hat: Complex<T>,
    /// `Im q_hat`
    pub q_hat_s: T,
    /// `∫₀¹ q(t) cos(πnt) dt`
    pub q_tilde_c: T,
}

impl<T: Real> PotentialSpec<T> {
    /// The zero potential: one piece of value 0.
    pub fn zero() -> Self {
        Self::constant("zero", T::zero())
    }

    pub fn constant(label: impl Into<String>, value: T) -> Self {
        Self {
            label: label.into(),
            pieces: vec![Piece {
                width: T::one(),
                value,
            }],
            q0: value,
        }
    }

    /// Builds a potential from `(width, value)` pairs covering `[0, 1]` in order.
    ///
    /// Widths must be positive and sum to one within `1e-9`; they are then
    /// rescaled so the partition is exact up to rounding.
    pub fn from_pieces(label: impl Into<String>, pieces: &[(T, T)]) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyPotential);
        }
        let mut sum = T::zero();
        for (index, &(width, value)) in pieces.iter().enumerate() {
            if width.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater)
                || !width.is_finite()
            {
                return Err(Error::NonPositiveWidth {
                    index,
                    width: width.to_f64_lossy(),
                });
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
            sum = sum + width;
        }
        if (sum - T::one()).abs() > T::tol(1e-9, 16.0) {
            return Err(Error::WidthsDoNotSumToOne {
                sum: sum.to_f64_lossy(),
            });
        }
        let label = label.into();
        if pieces.iter().all(|&(_, v)| v == T::zero()) {
            return Ok(Self::constant(label, T::zero()));
        }
        let pieces: Vec<Piece<T>> = pieces
            .iter()
            .map(|&(width, value)| Piece {
                width: width / sum,
                value,
            })
            .collect();
        let q0 = pieces
            .iter()
            .fold(T::zero(), |acc, p| acc + p.width * p.value);
        Ok(Self { label, pieces, q0 })
    }

    /// Names accepted by [`PotentialSpec::preset`].
    pub const PRESETS: &'static [&'static str] = &[
        "zero",
        "two-step",
        "two-step-shifted",
        "square-wave",
        "three-piece",
    ];

    /// Named test potentials:
    ///
    /// | name               | pieces                          | `q0` |
    /// |--------------------|---------------------------------|------|
    /// | `zero`             | `[(1, 0)]`                      | 0    |
    /// | `two-step`         | `[(½, 2), (½, -2)]`             | 0    |
    /// | `two-step-shifted` | `[(½, 3), (½, -1)]`             | 1    |
    /// | `square-wave`      | `[(½, 1), (½, -1)]`             | 0    |
    /// | `three-piece`      | `[(0.2, 5), (0.5, -1), (0.3, 3)]` | 1.4  |
    pub fn preset(name: &str) -> Option<Self> {
        let pieces: &[(f64, f64)] = match name {
            "zero" => return Some(Self::zero()),
            "two-step" => &[(0.5, 2.0), (0.5, -2.0)],
            "two-step-shifted" => &[(0.5, 3.0), (0.5, -1.0)],
            "square-wave" => &[(0.5, 1.0), (0.5, -1.0)],
            "three-piece" => &[(0.2, 5.0), (0.5, -1.0), (0.3, 3.0)],
            _ => return None,
        };
        let pieces: Vec<(T, T)> = pieces
            .iter()
            .map(|&(w, v)| (T::lit(w), T::lit(v)))
            .collect();
        Self::from_pieces(name, &pieces).ok()
    }

    /// Uniform samples, each becoming one equal-width piece.
    pub fn from_samples(label: impl Into<String>, samples: &[T]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyPotential);
        }
        let w = T::one() / T::from_usize(samples.len()).unwrap();
        let pieces: Vec<(T, T)> = samples.iter().map(|&v| (w, v)).collect();
        Self::from_pieces(label, &pieces)
    }

    /// L² projection of a general 1-periodic `q` onto `cells` equal pieces
    /// (cell averages by 5-point Gauss–Legendre). The projection error is the
    /// distance from `q` to the piecewise-constant subspace, `O(1/cells)` for
    /// Lipschitz `q`.
    pub fn project<F: Fn(T) -> T>(label: impl Into<String>, q: F, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::EmptyPotential);
        }
        const NODES: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_47,
            0.478_628_670_499_366_47,
            0.236_926_885_056_189_08,
            0.236_926_885_056_189_08,
        ];
        let m = T::from_usize(cells).unwrap();
        let half = T::lit(0.5);
        let samples: Vec<T> = (0..cells)
            .map(|i| {
                let mid = (T::from_usize(i).unwrap() + half) / m;
                let r = half / m;
                let s = NODES.iter().zip(WEIGHTS).fold(T::zero(), |acc, (&x, w)| {
                    acc + T::lit(w) * q(mid + r * T::lit(x))
                });
                s * half
            })
            .collect();
        Self::from_samples(label, &samples)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn q0(&self) -> T {
        self.q0
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.value == T::zero())
    }

    pub fn min_value(&self) -> T {
        self.pieces
            .iter()
            .fold(T::infinity(), |m, p| m.min(p.value))
    }

    pub fn max_value(&self) -> T {
        self.pieces
            .iter()
            .fold(T::neg_infinity(), |m, p| m.max(p.value))
    }

    /// `∫₀¹ q² dt`
    pub fn mean_square(&self) -> T {
        self.pieces
            .iter()
            .fold(T::zero(), |acc, p| acc + p.width * p.value * p.value)
    }

    /// Value of `q` at `t ∈ [0, 1)` (periodically extended).
    pub fn value_at(&self, t: T) -> T {
        let t = t - t.floor();
        let mut start = T::zero();
        for p in &self.pieces {
            if t < start + p.width {
                return p.value;
            }
            start = start + p.width;
        }
        self.pieces.last().map(|p| p.value).unwrap_or_else(T::zero)
    }

    /// `(start, end, value)` of every piece.
    pub fn intervals(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        let mut start = T::zero();
        self.pieces.iter().map(move |p| {
            let s = start;
            start = start + p.width;
            (s, start, p.value)
        })
    }

    /// The same potential with every value shifted by `mu`.
    pub fn shifted(&self, mu: T) -> Self {
        let pieces: Vec<Piece<T>> = self
            .pieces
            .iter()
            .map(|p| Piece {
                width: p.width,
                value: p.value + mu,
            })
            .collect();
        let q0 = pieces
            .iter()
            .fold(T::zero(), |acc: T, p: &Piece<T>| acc + p.width * p.value);
        Self {
            label: format!("{}{:+}", self.label, mu),
            pieces,
            q0,
        }
    }

    /// Exact Fourier integrals over the constant pieces.
    pub fn fourier_coeffs(&self, n: usize) -> Result<FourierCoeffs<T>> {
        if n == 0 {
            return Err(Error::ZeroFourierIndex);
        }
        let nn = T::from_usize(n).unwrap();
        let omega = T::lit(2.0) * T::PI() * nn;
        let kc = T::PI() * nn;
        let mut q_hat = Complex::new(T::zero(), T::zero());
        let mut q_tilde_c = T::zero();
        for (t0, t1, v) in self.intervals() {
            // ∫ e^{iωt} = (e^{iωt1} − e^{iωt0}) / (iω)
            let d = Complex::new(
                (omega * t1).sin() - (omega * t0).sin(),
                -((omega * t1).cos() - (omega * t0).cos()),
            );
            q_hat = q_hat + d * (v / omega);
            q_tilde_c = q_tilde_c + v * ((kc * t1).sin() - (kc * t0).sin()) / kc;
        }
        Ok(FourierCoeffs {
            n,
            q_hat,
            q_hat_s: q_hat.im,
            q_tilde_c,
        })
    }
}
