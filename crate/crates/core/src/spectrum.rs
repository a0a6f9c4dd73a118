//! Band structure of one magnetic sector from `ξ = (F + s²)/c`.

use serde::Serialize;

use crate::edges::{sequential_zeros, EdgeSearch, EdgeSet, Gap};
use crate::error::{Error, Result};
use crate::monodromy::evaluate;
use crate::potential::PotentialSpec;
use crate::real::{parity_sign, Real};

/// Below this `|c_j|` the sector is pure point and `ξ` is undefined.
pub const PURE_POINT_CUTOFF: f64 = 1e-8;

/// Magnetic data of one sector: `a_j = a + πj/N`, `c = cos a_j`, `s = sin a_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagneticConfig<T> {
    /// Field strength, when the configuration came from one.
    pub field: Option<T>,
    /// Circumference index `N`.
    pub circumference: Option<usize>,
    pub sector: usize,
    /// Reduced phase `a` before the sector shift.
    pub a: T,
    pub a_j: T,
    pub c: T,
    pub s: T,
}

impl<T: Real> MagneticConfig<T> {
    /// Sector 0 at reduced phase `a`.
    pub fn from_angle(a: T) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidMagnetic(format!("non-finite phase {a}")));
        }
        Ok(Self {
            field: None,
            circumference: None,
            sector: 0,
            a,
            a_j: a,
            c: a.cos(),
            s: a.sin(),
        })
    }

    /// Sector `j ∈ ℤ_N` at reduced phase `a`.
    pub fn from_angle_sector(a: T, n: usize, j: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMagnetic("N must be positive".into()));
        }
        if j >= n {
            return Err(Error::InvalidMagnetic(format!("sector {j} outside Z_{n}")));
        }
        let mut cfg = Self::from_angle(a)?;
        let a_j = a + T::PI() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
        cfg.circumference = Some(n);
        cfg.sector = j;
        cfg.a_j = a_j;
        cfg.c = a_j.cos();
        cfg.s = a_j.sin();
        Ok(cfg)
    }

    /// Field `B` on the tube with circumference index `N`: `a = (3B/16) cot(π/2N)`.
    pub fn from_field(b: T, n: usize, j: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMagnetic("N must be positive".into()));
        }
        if !b.is_finite() {
            return Err(Error::InvalidMagnetic(format!("non-finite field {b}")));
        }
        let half_angle = T::PI() / (T::lit(2.0) * T::from_usize(n).unwrap());
        let a = T::lit(3.0) * b / T::lit(16.0) / half_angle.tan();
        let mut cfg = Self::from_angle_sector(a, n, j)?;
        cfg.field = Some(b);
        Ok(cfg)
    }

    pub fn is_pure_point(&self) -> bool {
        self.c.abs() < T::lit(PURE_POINT_CUTOFF)
    }

    fn checked_c(&self) -> Result<T> {
        if self.is_pure_point() {
            Err(Error::PurePointRegime {
                c: self.c.to_f64_lossy(),
            })
        } else {
            Ok(self.c)
        }
    }
}

/// `(ξ(λ), ξ'(λ))` for the signed `c` of `cfg`.
pub fn xi<T: Real>(q: &PotentialSpec<T>, cfg: &MagneticConfig<T>, lambda: T) -> Result<(T, T)> {
    let c = cfg.checked_c()?;
    let m = evaluate(q, lambda);
    Ok(((m.f() + cfg.s * cfg.s) / c, m.df() / c))
}

/// `σ(n, n₁) = σ_{n+1} ∪ … ∪ σ_{n₁}`, joined through closed gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergedBand<T> {
    pub n: usize,
    pub n1: usize,
    pub lo: T,
    pub hi: T,
}

impl<T> MergedBand<T> {
    pub fn components(&self) -> usize {
        self.n1 - self.n
    }
}

/// Labeled spectrum of one sector through gap `n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure<T> {
    /// `|c_j|`; a negative `c_j` only flips the sign of `ξ`.
    pub c: T,
    pub s: T,
    pub q0: T,
    pub edges: EdgeSet<T>,
    /// `σ_D`, zeros of `φ(1, ·)`.
    pub flat_bands: Vec<T>,
    pub merged: Vec<MergedBand<T>>,
    /// Structural statements that failed (e.g. more than two merged components).
    pub violations: Vec<String>,
}

impl<T: Real> BandStructure<T> {
    pub fn n_max(&self) -> usize {
        self.edges.n_max()
    }

    pub fn lambda0_plus(&self) -> T {
        self.edges.lambda0_plus
    }

    pub fn gaps(&self) -> &[Gap<T>] {
        &self.edges.gaps
    }

    pub fn gap(&self, n: usize) -> Option<&Gap<T>> {
        self.edges.gap(n)
    }

    pub fn band(&self, n: usize) -> Option<(T, T)> {
        self.edges.band(n)
    }

    /// Gap `n` labels with `hₙ > 0`.
    pub fn open_gaps(&self) -> impl Iterator<Item = &Gap<T>> {
        self.edges.gaps.iter().filter(|g| g.is_open())
    }

    /// `ξ(λ)` and `ξ'(λ)` with the analysis sign convention (`c > 0`).
    pub fn xi_at(&self, q: &PotentialSpec<T>, lambda: T) -> (T, T) {
        let m = evaluate(q, lambda);
        ((m.f() + self.s * self.s) / self.c, m.df() / self.c)
    }
}

fn merged_bands<T: Real>(edges: &EdgeSet<T>) -> (Vec<MergedBand<T>>, Vec<String>) {
    let mut merged = Vec::new();
    let mut violations = Vec::new();
    let mut start = 0usize;
    for g in &edges.gaps {
        if g.degenerate {
            continue;
        }
        let lo = edges.upper_edge(start).unwrap();
        let band = MergedBand {
            n: start,
            n1: g.n,
            lo,
            hi: g.minus,
        };
        if band.components() > 2 {
            violations.push(format!(
                "merged band sigma({}, {}) has {} components, more than 2",
                band.n,
                band.n1,
                band.components()
            ));
        }
        merged.push(band);
        start = g.n;
    }
    (merged, violations)
}

/// Edges, heights, flat bands and merged intervals through gap `n_max`.
pub fn band_structure<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    n_max: usize,
) -> Result<BandStructure<T>> {
    let c = cfg.checked_c()?.abs();
    if n_max == 0 {
        return Err(Error::InvalidBandCount);
    }
    let s2 = cfg.s * cfg.s;
    let value = |l: T| {
        let m = evaluate(q, l);
        ((m.f() + s2) / c, m.df() / c)
    };
    let critical = |l: T| evaluate(q, l).df();
    let search = EdgeSearch {
        value: &value,
        critical: &critical,
        spacing: T::FRAC_PI_2(),
        shift: q.q0(),
        lower_hint: q.min_value() - T::one(),
        degeneracy_tol: T::tol(1e-12, 64.0) * c.recip().max(T::one()),
        what: "band edge",
    };
    let edges = search.solve(n_max)?;
    let flat_bands = dirichlet_roots(q, n_max)?;
    let (merged, mut violations) = merged_bands(&edges);
    for g in &edges.gaps {
        if !(g.minus <= g.critical && g.critical <= g.plus) {
            violations.push(format!(
                "critical point of gap {} lies outside the gap",
                g.n
            ));
        }
    }
    Ok(BandStructure {
        c,
        s: cfg.s,
        q0: q.q0(),
        edges,
        flat_bands,
        merged,
        violations,
    })
}

fn dirichlet_roots<T: Real>(q: &PotentialSpec<T>, count: usize) -> Result<Vec<T>> {
    let phi = |l: T| evaluate(q, l).phi;
    sequential_zeros(
        &phi,
        count,
        T::PI(),
        q.q0(),
        &|n| -parity_sign::<T>(n),
        "Dirichlet root",
    )
}

/// Eigenvalues of infinite multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatSpectrum<T> {
    /// `σ_D`, always present.
    pub dirichlet: Vec<T>,
    /// Roots of `F + 1`, present only in the pure-point regime `c_j ≈ 0`.
    pub f_minus_one: Vec<T>,
}

impl<T: Real> FlatSpectrum<T> {
    /// Both families merged in increasing order.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut v: Vec<T> = self
            .dirichlet
            .iter()
            .chain(self.f_minus_one.iter())
            .copied()
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

/// `σ_∞`: the Dirichlet spectrum, plus `{F = -1}` when `|c_j| < 1e-8`.
///
/// The `F + 1` roots cover the range up to the `n_max`-th critical point of `F`.
pub fn flat_spectrum<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    n_max: usize,
) -> Result<FlatSpectrum<T>> {
    if n_max == 0 {
        return Err(Error::InvalidBandCount);
    }
    let dirichlet = dirichlet_roots(q, n_max)?;
    let mut f_minus_one = Vec::new();
    if cfg.is_pure_point() {
        let critical = |l: T| evaluate(q, l).df();
        let value = |l: T| {
            let m = evaluate(q, l);
            (m.f() + T::one(), m.df())
        };
        let search = EdgeSearch {
            value: &value,
            critical: &critical,
            spacing: T::FRAC_PI_2(),
            shift: q.q0(),
            lower_hint: q.min_value() - T::one(),
            degeneracy_tol: T::zero(),
            what: "F + 1 root",
        };
        let crit = search.critical_points(n_max)?;
        let opts = crate::roots::RootOptions::default();
        // below the first critical point F decreases from +∞
        let mut lo = q.min_value() - T::one();
        let mut step = T::one();
        let mut k = 0;
        while value(lo).0 <= T::zero() {
            step = step * T::lit(2.0);
            lo = lo - step;
            k += 1;
            if k > 30 {
                return Err(Error::BracketFailure {
                    what: "F + 1 root",
                    index: 0,
                });
            }
        }
        let mut segments = vec![(lo, crit[0])];
        segments.extend(crit.windows(2).map(|w| (w[0], w[1])));
        let tiny = T::tol(1e-12, 64.0);
        for (i, (a, b)) in segments.into_iter().enumerate() {
            let (fa, fb) = (value(a).0, value(b).0);
            if fa.abs() <= tiny {
                if f_minus_one.last() != Some(&a) {
                    f_minus_one.push(a);
                }
                continue;
            }
            if fa * fb > T::zero() {
                continue;
            }
            if fb.abs() <= tiny {
                continue;
            }
            let r =
                crate::roots::newton_bisect(value, a, b, opts).ok_or(Error::BracketFailure {
                    what: "F + 1 root",
                    index: i,
                })?;
            f_minus_one.push(r);
        }
    }
    Ok(FlatSpectrum {
        dirichlet,
        f_minus_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unperturbed;
    use std::f64::consts::PI;

    fn two_step() -> PotentialSpec<f64> {
        PotentialSpec::from_pieces("two-step", &[(0.5, 2.0), (0.5, -2.0)]).unwrap()
    }

    #[test]
    fn config_from_field() {
        let cfg = MagneticConfig::from_field(1.0f64, 5, 0).unwrap();
        let expect = 3.0 / 16.0 / (PI / 10.0).tan();
        assert!((cfg.a - expect).abs() < 1e-15);
        let cfg = MagneticConfig::from_field(1.0f64, 5, 2).unwrap();
        assert!((cfg.a_j - expect - 2.0 * PI / 5.0).abs() < 1e-15);
        assert!((cfg.c * cfg.c + cfg.s * cfg.s - 1.0).abs() < 1e-15);
        assert!(MagneticConfig::from_field(1.0f64, 0, 0).is_err());
        assert!(MagneticConfig::from_angle_sector(1.0f64, 3, 3).is_err());
    }

    #[test]
    fn xi_examples() {
        let q = PotentialSpec::zero();
        let cfg = MagneticConfig::from_angle(0.0f64).unwrap();
        let (x, _) = xi(&q, &cfg, (PI / 3.0).powi(2)).unwrap();
        assert!((x + 0.6875).abs() < 1e-12);
        let (x, _) = xi(&q, &cfg, (PI / 2.0).powi(2)).unwrap();
        assert!((x + 1.25).abs() < 1e-12);
        let cfg = MagneticConfig::from_angle(0.7f64).unwrap();
        let (x, _) = xi(&q, &cfg, 0.0).unwrap();
        assert!((x - (2.0 - cfg.c * cfg.c) / cfg.c).abs() < 1e-12);
        let cfg = MagneticConfig::from_angle(PI / 2.0).unwrap();
        assert!(matches!(
            xi(&q, &cfg, 1.0),
            Err(Error::PurePointRegime { .. })
        ));
    }

    #[test]
    fn xi_matches_closed_form_on_grid() {
        let q = PotentialSpec::zero();
        for &a in &[0.0f64, PI / 5.0, PI / 3.0] {
            let cfg = MagneticConfig::from_angle(a).unwrap();
            for i in 0..1000 {
                let l = -20.0 + 0.3 * i as f64;
                let (x, _) = xi(&q, &cfg, l).unwrap();
                let e = unperturbed::xi0(l, cfg.c);
                assert!((x - e).abs() < 1e-11 * e.abs().max(1.0), "a={a} λ={l}");
            }
        }
    }

    #[test]
    fn unit_c_structure() {
        let q = PotentialSpec::zero();
        let cfg = MagneticConfig::from_angle(0.0f64).unwrap();
        let bs = band_structure(&q, &cfg, 6).unwrap();
        assert!(bs.lambda0_plus().abs() < 1e-12);
        let g1 = bs.gap(1).unwrap();
        assert!((g1.minus - unperturbed::edge(1, false, 1.0)).abs() < 1e-12);
        assert!((g1.plus - unperturbed::edge(1, true, 1.0)).abs() < 1e-12);
        assert!((g1.minus - 1.5152).abs() < 1e-4 && (g1.plus - 3.6504).abs() < 2e-4);
        for g in bs.gaps() {
            assert_eq!(g.degenerate, g.n % 2 == 0, "gap {}", g.n);
        }
        assert!(bs.merged.iter().skip(1).all(|m| m.components() == 2));
        assert!(bs.violations.is_empty());
    }

    #[test]
    fn third_pi_structure() {
        let q = PotentialSpec::zero();
        let cfg = MagneticConfig::from_angle(PI / 3.0).unwrap();
        let bs = band_structure(&q, &cfg, 8).unwrap();
        for g in bs.gaps() {
            assert_eq!(g.degenerate, g.n % 2 == 1, "gap {}", g.n);
            assert!((g.height - unperturbed::height(g.n, 0.5)).abs() < 1e-10);
        }
        assert!((unperturbed::height(0, 0.5f64) - 1.9248).abs() < 1e-4);
    }

    #[test]
    fn two_step_edges_satisfy_labels() {
        let q = two_step();
        let cfg = MagneticConfig::from_angle(PI / 5.0).unwrap();
        let bs = band_structure(&q, &cfg, 12).unwrap();
        let (x0, _) = bs.xi_at(&q, bs.lambda0_plus());
        assert!((x0 - 1.0).abs() < 1e-10);
        for g in bs.gaps() {
            assert!(g.is_open());
            let t = parity_sign::<f64>(g.n);
            for l in [g.minus, g.plus] {
                assert!((bs.xi_at(&q, l).0 - t).abs() < 1e-10);
            }
            let (xc, dxc) = bs.xi_at(&q, g.critical);
            assert!(dxc.abs() < 1e-6 * (1.0 + g.critical));
            assert!((t * xc - g.height.cosh()).abs() < 1e-10 * xc.abs());
        }
    }

    #[test]
    fn negative_c_matches_positive() {
        let q = two_step();
        let a = MagneticConfig::from_angle(0.4f64).unwrap();
        let b = MagneticConfig::from_angle(PI - 0.4).unwrap();
        let sa = band_structure(&q, &a, 5).unwrap();
        let sb = band_structure(&q, &b, 5).unwrap();
        for (x, y) in sa.gaps().iter().zip(sb.gaps()) {
            assert!((x.minus - y.minus).abs() < 1e-10 && (x.plus - y.plus).abs() < 1e-10);
        }
    }

    #[test]
    fn edge_asymptotics_residual_decreases() {
        let q = two_step();
        let cfg = MagneticConfig::from_angle(PI / 5.0).unwrap();
        let bs = band_structure(&q, &cfg, 50).unwrap();
        let r = |n: usize| {
            let g = bs.gap(n).unwrap();
            let a = (g.minus - unperturbed::edge(n, false, cfg.c) - q.q0()).abs();
            let b = (g.plus - unperturbed::edge(n, true, cfg.c) - q.q0()).abs();
            a.max(b)
        };
        assert!(r(50) < r(10));
    }

    #[test]
    fn flat_bands() {
        let q = PotentialSpec::zero();
        let cfg = MagneticConfig::from_angle(0.3f64).unwrap();
        let fs = flat_spectrum(&q, &cfg, 4).unwrap();
        assert!(fs.f_minus_one.is_empty());
        for (n, l) in fs.dirichlet.iter().enumerate() {
            assert!((l - (PI * (n + 1) as f64).powi(2)).abs() < 1e-9);
        }
        let cfg = MagneticConfig::from_angle(PI / 2.0).unwrap();
        let fs = flat_spectrum(&q, &cfg, 6).unwrap();
        let half = 0.5 * (-7.0f64 / 9.0).acos();
        let mut expect = vec![];
        for m in 0..4 {
            let base = PI * m as f64;
            for z in [base + half, base + PI - half] {
                expect.push(z * z);
            }
        }
        let last = fs.f_minus_one.len();
        assert!(last >= 5);
        for (got, want) in fs.f_minus_one.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-9 * want.max(1.0), "{got} vs {want}");
        }
        let t = two_step();
        let hill = crate::monodromy::hill_spectrum(&t, 5).unwrap();
        let fs = flat_spectrum(&t, &MagneticConfig::from_angle(0.2).unwrap(), 5).unwrap();
        assert_eq!(fs.dirichlet, hill.dirichlet);
        assert!(fs.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }
}
