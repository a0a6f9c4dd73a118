//! Quasimomentum `k(λ)` of the nanotube operator and its asymptotics.

use num_complex::Complex;
use serde::Serialize;

use crate::edges::{EdgeSet, Region};
use crate::error::{Error, Result};
use crate::masses::kprime_squared;
use crate::potential::PotentialSpec;
use crate::real::{parity_sign, Real};
use crate::spectrum::{band_structure, BandStructure, MagneticConfig};

/// Relative overshoot of `|f|` past `1` that is attributed to rounding and clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-10;

/// Value of `k(λ)` tagged with the spectral region it was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Quasimomentum<T> {
    /// `λ < λ₀⁺`: `k = i κ`.
    Below { im: T },
    /// Band `n`: `k ∈ [π(n-1), πn]`.
    Band { n: usize, re: T },
    /// Gap `n`: `k = πn + i κ`.
    Gap { n: usize, re: T, im: T },
}

impl<T: Real> Quasimomentum<T> {
    pub fn to_complex(&self) -> Complex<T> {
        match *self {
            Quasimomentum::Below { im } => Complex::new(T::zero(), im),
            Quasimomentum::Band { re, .. } => Complex::new(re, T::zero()),
            Quasimomentum::Gap { re, im, .. } => Complex::new(re, im),
        }
    }
}

fn clamp_to_unit<T: Real>(u: T, lambda: T, slope: T, upper: bool) -> Result<T> {
    let tol = T::tol(CLAMP_TOLERANCE, 64.0) * (T::one() + slope.abs() * lambda.abs().max(T::one()));
    let excess = if upper { u - T::one() } else { T::one() - u };
    if excess <= T::zero() {
        Ok(u)
    } else if excess <= tol {
        Ok(T::one())
    } else {
        Err(Error::BranchClamp {
            lambda: lambda.to_f64_lossy(),
            excess: excess.to_f64_lossy(),
        })
    }
}

/// `k(λ)` for the discriminant value `f = f(λ)` with slope `df`, using
/// `edges` to fix the branch.
pub fn branch<T: Real>(edges: &EdgeSet<T>, lambda: T, f: T, df: T) -> Result<Quasimomentum<T>> {
    match edges.locate(lambda) {
        Region::Below => {
            let u = clamp_to_unit(f, lambda, df, false)?;
            Ok(Quasimomentum::Below { im: u.acosh() })
        }
        Region::Band(n) => {
            let s: T = parity_sign(n - 1);
            let u = s * f;
            let u = if u < T::zero() {
                -clamp_to_unit(-u, lambda, df, true)?
            } else {
                clamp_to_unit(u, lambda, df, true)?
            };
            let base = T::PI() * T::from_usize(n - 1).unwrap();
            Ok(Quasimomentum::Band {
                n,
                re: base + u.acos(),
            })
        }
        Region::Gap(n) => {
            let s: T = parity_sign(n);
            let u = clamp_to_unit(s * f, lambda, df, false)?;
            Ok(Quasimomentum::Gap {
                n,
                re: T::PI() * T::from_usize(n).unwrap(),
                im: u.acosh(),
            })
        }
        Region::Beyond => Err(Error::OutsideComputedRange {
            lambda: lambda.to_f64_lossy(),
            n_max: edges.n_max(),
        }),
    }
}

/// Comb-domain data of `k`: slit heights over `πn` and the band intervals
/// mapped onto `[π(n-1), πn]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombMap<T> {
    /// `h₀ = 0` after normalization; kept so indices line up with gaps.
    pub h0: T,
    /// `hₙ`, `n ≥ 1`.
    pub heights: Vec<T>,
    pub bands: Vec<(T, T)>,
}

impl<T: Real> CombMap<T> {
    pub fn from_structure(bs: &BandStructure<T>) -> Self {
        Self {
            h0: T::zero(),
            heights: bs.gaps().iter().map(|g| g.height).collect(),
            bands: (1..=bs.n_max()).filter_map(|n| bs.band(n)).collect(),
        }
    }

    /// `sup hₙ` over the computed range.
    pub fn sup_height(&self) -> T {
        self.heights.iter().copied().fold(T::zero(), T::max)
    }
}

/// Number of gaps needed for the structure to reach `λ`.
pub(crate) fn gaps_to_cover<T: Real>(q: &PotentialSpec<T>, lambda: T) -> usize {
    let reach = (lambda - q.min_value()).max(T::zero()).sqrt() * T::lit(2.0) / T::PI();
    reach.to_usize().unwrap_or(0) + 2
}

/// `k(λ)` on an existing band structure.
pub fn k_eval_with<T: Real>(
    bs: &BandStructure<T>,
    q: &PotentialSpec<T>,
    lambda: T,
) -> Result<Quasimomentum<T>> {
    let (x, dx) = bs.xi_at(q, lambda);
    branch(&bs.edges, lambda, x, dx)
}

/// `k(λ) = arccos ξ(λ)` on the comb branch.
pub fn k_eval<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    lambda: T,
) -> Result<Complex<T>> {
    let bs = band_structure(q, cfg, gaps_to_cover(q, lambda))?;
    Ok(k_eval_with(&bs, q, lambda)?.to_complex())
}

/// `q` shifted so that `λ₀⁺ = 0`, and the shift applied.
pub fn normalize<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
) -> Result<(PotentialSpec<T>, T)> {
    let bs = band_structure(q, cfg, 1)?;
    let shift = -bs.lambda0_plus();
    Ok((q.shifted(shift), shift))
}

/// `k(-y²)` against `2z + C - q0/z`, `z = iy`, at one depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeepPoint<T> {
    pub y: T,
    pub k_re: T,
    pub k_im: T,
    /// `k - 2iy - i q0/y`, the constant term with the `1/z` term removed.
    pub constant_re: T,
    pub constant_im: T,
    /// `y (Im k - 2y - log(9/(8c)))`, the `1/z` coefficient estimate.
    pub q0_estimate: T,
}

/// Candidate readings of the constant term `log(9/8c)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantCandidates<T> {
    /// `2 log(9/(8c))`, real.
    pub twice_log: T,
    /// `i log(9/(8c))`.
    pub imaginary_log: T,
    /// `log(9/(8c²))`, real.
    pub log_c_squared: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeepAsymptoticReport<T> {
    pub c: T,
    /// Mean of the normalized potential.
    pub q0: T,
    pub shift: T,
    pub points: Vec<DeepPoint<T>>,
    pub candidates: ConstantCandidates<T>,
    /// `|C(y_max) - candidate|` for each candidate, in the order of the fields above.
    pub deviation_twice_log: T,
    pub deviation_imaginary_log: T,
    pub deviation_log_c_squared: T,
    /// Fitted `p` in `|k - 2z - C + q0/z| ~ y^{-p}` with `C = i log(9/(8c))`.
    pub decay_exponent: Option<T>,
}

fn log_slope<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    let pts: Vec<(T, T)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y > T::zero())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_usize(pts.len()).unwrap();
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxx = pts
        .iter()
        .fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = pts
        .iter()
        .fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    if sxx == T::zero() {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Measures the constant and `1/z` terms of `k(-y²)` after normalizing `λ₀⁺ = 0`.
pub fn verify_deep_asymptotics<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    y_values: &[T],
) -> Result<DeepAsymptoticReport<T>> {
    let (qn, shift) = normalize(q, cfg)?;
    let bs = band_structure(&qn, cfg, 1)?;
    let c = bs.c;
    let q0 = qn.q0();
    let log_ratio = (T::lit(9.0) / (T::lit(8.0) * c)).ln();
    let mut points = Vec::with_capacity(y_values.len());
    let mut tails = Vec::with_capacity(y_values.len());
    for &y in y_values {
        let k = k_eval_with(&bs, &qn, -y * y)?.to_complex();
        let cre = k.re;
        let cim = k.im - T::lit(2.0) * y - q0 / y;
        tails.push(((cim - log_ratio) * (cim - log_ratio) + cre * cre).sqrt());
        points.push(DeepPoint {
            y,
            k_re: k.re,
            k_im: k.im,
            constant_re: cre,
            constant_im: cim,
            q0_estimate: y * (k.im - T::lit(2.0) * y - log_ratio),
        });
    }
    let last = points
        .last()
        .copied()
        .ok_or_else(|| Error::InvalidArgument("deep asymptotics need at least one depth".into()))?;
    let dist = |re: T, im: T| {
        let dr = last.constant_re - re;
        let di = last.constant_im - im;
        (dr * dr + di * di).sqrt()
    };
    let candidates = ConstantCandidates {
        twice_log: T::lit(2.0) * log_ratio,
        imaginary_log: log_ratio,
        log_c_squared: (T::lit(9.0) / (T::lit(8.0) * c * c)).ln(),
    };
    Ok(DeepAsymptoticReport {
        c,
        q0,
        shift,
        deviation_twice_log: dist(candidates.twice_log, T::zero()),
        deviation_imaginary_log: dist(T::zero(), candidates.imaginary_log),
        deviation_log_c_squared: dist(candidates.log_c_squared, T::zero()),
        decay_exponent: log_slope(y_values, &tails).map(|s| -s),
        points,
        candidates,
    })
}

/// `λ²(k'² - 1/λ)` at `λ = -y²`, which tends to the normalized mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KPrimePoint<T> {
    pub lambda: T,
    pub kprime_squared: T,
    pub scaled: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KPrimeReport<T> {
    pub q0: T,
    pub shift: T,
    pub points: Vec<KPrimePoint<T>>,
}

impl<T: Real> KPrimeReport<T> {
    /// `|scaled - q0| / max(|q0|, 1e-12)` at the deepest point.
    pub fn relative_error(&self) -> Option<T> {
        let p = self.points.last()?;
        Some((p.scaled - self.q0).abs() / self.q0.abs().max(T::lit(1e-12)))
    }
}

pub fn verify_kprime_squared<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    y_values: &[T],
) -> Result<KPrimeReport<T>> {
    let (qn, shift) = normalize(q, cfg)?;
    let bs = band_structure(&qn, cfg, 1)?;
    let points = y_values
        .iter()
        .map(|&y| {
            let lambda = -y * y;
            let (x, dx) = bs.xi_at(&qn, lambda);
            let kp2 = kprime_squared(x, dx);
            KPrimePoint {
                lambda,
                kprime_squared: kp2,
                scaled: lambda * lambda * (kp2 - lambda.recip()),
            }
        })
        .collect();
    Ok(KPrimeReport {
        q0: qn.q0(),
        shift,
        points,
    })
}
