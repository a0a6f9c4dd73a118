//! Effective masses at gap edges and the identities they satisfy.

use serde::Serialize;

use crate::edges::Region;
use crate::error::{Error, Result};
use crate::monodromy::evaluate;
use crate::potential::PotentialSpec;
use crate::real::{parity_sign, Real};
use crate::spectrum::{band_structure, BandStructure, MagneticConfig};
use crate::unperturbed;

/// Test points closer than this to an edge are rejected by the partial-fraction check.
pub const EDGE_CLEARANCE: f64 = 0.1;

/// Masses at both edges of gap `n` (`n = 0` only has the `+` edge).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassEntry<T> {
    pub n: usize,
    pub lambda_minus: T,
    pub lambda_plus: T,
    pub minus: T,
    pub plus: T,
    /// `μₙ^{0,±}` of the free problem at the same `c`.
    pub free_minus: T,
    pub free_plus: T,
    pub degenerate: bool,
}

impl<T: Real> MassEntry<T> {
    pub fn mass(&self, plus: bool) -> T {
        if plus {
            self.plus
        } else {
            self.minus
        }
    }

    pub fn edge(&self, plus: bool) -> T {
        if plus {
            self.lambda_plus
        } else {
            self.lambda_minus
        }
    }

    pub fn free_mass(&self, plus: bool) -> T {
        if plus {
            self.free_plus
        } else {
            self.free_minus
        }
    }
}

/// Residuals of the mass identities, filled in by the `verify_*` functions' callers.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IdentityResiduals<T> {
    pub trace: Option<TraceReport<T>>,
    pub series: Vec<MassSeriesReport<T>>,
    pub partial_fraction: Vec<PartialFractionReport<T>>,
    pub asymptotic: Option<AsymptoticReport<T>>,
}

/// `μₙ±` for `n = 0..=n_max`; `entries[n]` is gap `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassTable<T> {
    pub c: T,
    pub q0: T,
    pub entries: Vec<MassEntry<T>>,
    pub residuals: IdentityResiduals<T>,
}

impl<T: Real> MassTable<T> {
    pub fn n_max(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn mu0_plus(&self) -> T {
        self.entries[0].plus
    }

    pub fn entry(&self, n: usize) -> Option<&MassEntry<T>> {
        self.entries.get(n)
    }
}

/// `μₙ± = -(-1)ⁿ F'(λₙ±)/c` at every open edge, zero on closed gaps.
pub fn effective_masses<T: Real>(bs: &BandStructure<T>, q: &PotentialSpec<T>) -> MassTable<T> {
    let c = bs.c;
    let mass_at = |n: usize, l: T| -parity_sign::<T>(n) * evaluate(q, l).df() / c;
    let l0 = bs.lambda0_plus();
    let mut entries = vec![MassEntry {
        n: 0,
        lambda_minus: l0,
        lambda_plus: l0,
        minus: T::zero(),
        plus: mass_at(0, l0),
        free_minus: T::zero(),
        free_plus: unperturbed::mass(0, true, c),
        degenerate: false,
    }];
    for g in bs.gaps() {
        let (minus, plus) = if g.degenerate {
            (T::zero(), T::zero())
        } else {
            (mass_at(g.n, g.minus), mass_at(g.n, g.plus))
        };
        entries.push(MassEntry {
            n: g.n,
            lambda_minus: g.minus,
            lambda_plus: g.plus,
            minus,
            plus,
            free_minus: unperturbed::mass(g.n, false, c),
            free_plus: unperturbed::mass(g.n, true, c),
            degenerate: g.degenerate,
        });
    }
    MassTable {
        c,
        q0: bs.q0,
        entries,
        residuals: IdentityResiduals::default(),
    }
}

/// Least-squares limit `a` of `s(n) ≈ a + b/n + d/n²`.
pub fn extrapolate_limit<T: Real>(ns: &[T], sums: &[T]) -> Option<T> {
    if ns.len() < 3 || ns.len() != sums.len() {
        return None;
    }
    let mut ata = [[T::zero(); 3]; 3];
    let mut atb = [T::zero(); 3];
    for (&n, &s) in ns.iter().zip(sums) {
        let row = [T::one(), n.recip(), (n * n).recip()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] = ata[i][j] + row[i] * row[j];
            }
            atb[i] = atb[i] + row[i] * s;
        }
    }
    // Gaussian elimination with partial pivoting on the 3×3 normal equations.
    let mut m = [[T::zero(); 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&ata[i]);
        m[i][3] = atb[i];
    }
    for col in 0..3 {
        let piv =
            (col..3).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[piv][col] == T::zero() {
            return None;
        }
        m.swap(col, piv);
        let pivot_row = m[col];
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                for (x, &v) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = *x - f * v;
                }
            }
        }
    }
    Some(m[0][3] / m[0][0])
}

/// Indices `n` in the last decade `[n_max/10, n_max]` with the given stride.
fn last_decade(n_max: usize, stride: usize) -> impl Iterator<Item = usize> {
    let start = (n_max / 10).max(1);
    (start..=n_max).filter(move |n| n % stride == 0)
}

fn extrapolate_partial_sums<T: Real>(sums: &[T], stride: usize) -> Option<T> {
    let n_max = sums.len() - 1;
    let idx: Vec<usize> = last_decade(n_max, stride).collect();
    let ns: Vec<T> = idx.iter().map(|&n| T::from_usize(n).unwrap()).collect();
    let vals: Vec<T> = idx.iter().map(|&n| sums[n]).collect();
    extrapolate_limit(&ns, &vals)
}

/// `μ₀⁺ + Σ (μₙ⁺ + μₙ⁻) = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceReport<T> {
    pub n_max: usize,
    pub partial_sum: T,
    pub extrapolated: T,
    pub residual: T,
}

/// Trace identity with the tail extrapolated from partial sums at even `n`.
pub fn verify_trace_identity<T: Real>(mt: &MassTable<T>) -> TraceReport<T> {
    let mut sums = Vec::with_capacity(mt.entries.len());
    let mut s = T::zero();
    for e in &mt.entries {
        s = s + e.plus + e.minus;
        sums.push(s);
    }
    let extrapolated = extrapolate_partial_sums(&sums, 2).unwrap_or(s);
    TraceReport {
        n_max: mt.n_max(),
        partial_sum: s,
        extrapolated,
        residual: (extrapolated - T::lit(2.0)).abs(),
    }
}

/// `k'(λ)² = ½ Σ μₙ^ν/(λ - λₙ^ν)` at one test point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialFractionReport<T> {
    pub lambda: T,
    pub series: T,
    pub extrapolated: T,
    pub direct: T,
    /// `|extrapolated - direct| / |direct|`
    pub residual: T,
}

/// `k'²` from `ξ`: `ξ'²/(1 - ξ²)`, rewritten to avoid overflow for large `|ξ|`.
pub fn kprime_squared<T: Real>(xi: T, dxi: T) -> T {
    if xi.abs() > T::one() {
        let r = dxi / xi;
        -r * r / (T::one() - (xi * xi).recip())
    } else {
        dxi * dxi / (T::one() - xi * xi)
    }
}

fn check_clearance<T: Real>(bs: &BandStructure<T>, lambda: T) -> Result<()> {
    if let Region::Gap(_) = bs.edges.locate(lambda) {
        return Err(Error::InvalidArgument(format!(
            "test point {lambda} lies inside a gap"
        )));
    }
    for e in bs.edges.all_edges() {
        let d = (lambda - e).abs();
        if d < T::lit(EDGE_CLEARANCE) {
            return Err(Error::TooCloseToEdge {
                lambda: lambda.to_f64_lossy(),
                distance: d.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Paired series for `k'²` against the direct value at each test point.
pub fn verify_partial_fraction<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    test_lambdas: &[T],
    n_max: usize,
) -> Result<Vec<PartialFractionReport<T>>> {
    let bs = band_structure(q, cfg, n_max)?;
    let mt = effective_masses(&bs, q);
    partial_fraction_with(&bs, &mt, q, test_lambdas)
}

/// As [`verify_partial_fraction`] on an already computed structure.
pub fn partial_fraction_with<T: Real>(
    bs: &BandStructure<T>,
    mt: &MassTable<T>,
    q: &PotentialSpec<T>,
    test_lambdas: &[T],
) -> Result<Vec<PartialFractionReport<T>>> {
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(test_lambdas.len());
    for &lambda in test_lambdas {
        check_clearance(bs, lambda)?;
        let e0 = &mt.entries[0];
        let mut s = e0.plus / (lambda - e0.lambda_plus);
        let mut sums = vec![half * s];
        for e in &mt.entries[1..] {
            let u = (lambda - e.lambda_plus).recip();
            let v = (lambda - e.lambda_minus).recip();
            let a = half * (e.plus + e.minus) * (u + v);
            let b = half * (e.plus - e.minus) * (e.lambda_plus - e.lambda_minus) * u * v;
            s = s + a + b;
            sums.push(half * s);
        }
        let series = half * s;
        let extrapolated = extrapolate_partial_sums(&sums, 2).unwrap_or(series);
        let (x, dx) = bs.xi_at(q, lambda);
        let direct = kprime_squared(x, dx);
        out.push(PartialFractionReport {
            lambda,
            series,
            extrapolated,
            direct,
            residual: (extrapolated - direct).abs() / direct.abs(),
        });
    }
    Ok(out)
}

/// One edge of the mass series identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassSeriesReport<T> {
    pub n: usize,
    pub plus: bool,
    pub mass: T,
    pub m_max: usize,
    pub series: T,
    pub extrapolated: T,
    pub residual: T,
}

/// `μ₂ₙ± = 2Σ_{m≥1,s}(λ_{2m-1}^s - λ₂ₙ±)⁻¹` and
/// `μ₂ₙ₊₁± = 2Σ_{m≥0,s}(λ_{2m}^s - λ₂ₙ₊₁±)⁻¹`, truncated at the largest
/// `m` the structure covers and extrapolated in `1/m`.
pub fn verify_mass_series<T: Real>(
    bs: &BandStructure<T>,
    mt: &MassTable<T>,
    n: usize,
    plus: bool,
) -> Result<MassSeriesReport<T>> {
    let entry = mt.entry(n).ok_or(Error::InsufficientBands {
        available: mt.n_max(),
        required: n,
    })?;
    if n == 0 && !plus {
        return Err(Error::InvalidArgument("gap 0 has no lower edge".into()));
    }
    let target = entry.edge(plus);
    let two = T::lit(2.0);
    let mut sums = Vec::new();
    let mut s = T::zero();
    if n.is_multiple_of(2) {
        sums.push(T::zero());
        let mut m = 1;
        while 2 * m - 1 <= bs.n_max() {
            let g = bs.gap(2 * m - 1).unwrap();
            s = s + two * ((g.minus - target).recip() + (g.plus - target).recip());
            sums.push(s);
            m += 1;
        }
    } else {
        s = two * (bs.lambda0_plus() - target).recip();
        sums.push(s);
        let mut m = 1;
        while 2 * m <= bs.n_max() {
            let g = bs.gap(2 * m).unwrap();
            s = s + two * ((g.minus - target).recip() + (g.plus - target).recip());
            sums.push(s);
            m += 1;
        }
    }
    let m_max = sums.len() - 1;
    if m_max < 10 {
        return Err(Error::InsufficientBands {
            available: bs.n_max(),
            required: n + 20,
        });
    }
    let extrapolated = extrapolate_partial_sums(&sums, 1).unwrap_or(s);
    let mass = entry.mass(plus);
    Ok(MassSeriesReport {
        n,
        plus,
        mass,
        m_max,
        series: s,
        extrapolated,
        residual: (extrapolated - mass).abs(),
    })
}

/// `rₙ = μₙ± - μₙ^{0,±} - (-1)^{n+1} F₀''(λₙ^{0,±}) εₙ±/c` at one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticPoint<T> {
    pub n: usize,
    pub plus: bool,
    pub epsilon: T,
    pub residual: T,
    /// `n³ rₙ`
    pub scaled: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport<T> {
    pub points: Vec<AsymptoticPoint<T>>,
    pub max_scaled: T,
    pub min_scaled: T,
    /// `max |n³ rₙ| / min |n³ rₙ|`, the boundedness proxy.
    pub spread: T,
}

/// Residuals of the first-order mass asymptotics over open gaps with `n ∈ range`.
pub fn verify_mass_asymptotics<T: Real>(
    mt: &MassTable<T>,
    range: std::ops::RangeInclusive<usize>,
) -> AsymptoticReport<T> {
    let c = mt.c;
    let mut points = Vec::new();
    for n in range {
        let Some(e) = mt.entry(n) else { break };
        if e.degenerate || n == 0 {
            continue;
        }
        for plus in [false, true] {
            let l0 = unperturbed::edge(n, plus, c);
            let eps = e.edge(plus) - l0 - mt.q0;
            let corr = -parity_sign::<T>(n) * unperturbed::d2f0(l0) * eps / c;
            let r = e.mass(plus) - e.free_mass(plus) - corr;
            let nn = T::from_usize(n).unwrap();
            points.push(AsymptoticPoint {
                n,
                plus,
                epsilon: eps,
                residual: r,
                scaled: nn * nn * nn * r,
            });
        }
    }
    let abs: Vec<T> = points.iter().map(|p| p.scaled.abs()).collect();
    let max_scaled = abs.iter().copied().fold(T::zero(), T::max);
    let min_scaled = abs.iter().copied().fold(T::infinity(), T::min);
    let spread = if min_scaled > T::zero() {
        max_scaled / min_scaled
    } else if max_scaled == T::zero() {
        T::one()
    } else {
        T::infinity()
    };
    AsymptoticReport {
        points,
        max_scaled,
        min_scaled,
        spread,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn two_step() -> PotentialSpec<f64> {
        PotentialSpec::from_pieces("two-step", &[(0.5, 2.0), (0.5, -2.0)]).unwrap()
    }

    fn table(q: &PotentialSpec<f64>, a: f64, n_max: usize) -> (BandStructure<f64>, MassTable<f64>) {
        let cfg = MagneticConfig::from_angle(a).unwrap();
        let bs = band_structure(q, &cfg, n_max).unwrap();
        let mt = effective_masses(&bs, q);
        (bs, mt)
    }

    #[test]
    fn free_masses_match_closed_forms() {
        let (_, mt) = table(&PotentialSpec::zero(), PI / 3.0, 10);
        for e in &mt.entries {
            assert!(
                (e.plus - e.free_plus).abs() < 1e-9 * e.plus.abs().max(1.0),
                "n={}",
                e.n
            );
            assert!((e.minus - e.free_minus).abs() < 1e-9 * e.minus.abs().max(1.0));
            if e.degenerate {
                assert_eq!((e.plus, e.minus), (0.0, 0.0));
            } else if e.n > 0 {
                assert!(e.plus > 0.0 && e.minus < 0.0 && e.plus + e.minus < 0.0);
            }
        }
        assert!((mt.mu0_plus() - 2.6586).abs() < 1e-4);
    }

    #[test]
    fn pair_sums_decay_like_inverse_square() {
        let (_, mt) = table(&PotentialSpec::zero(), PI / 5.0, 80);
        let pair = |n: usize| {
            let e = mt.entry(n).unwrap();
            (e.plus + e.minus).abs() * (n * n) as f64
        };
        assert!(pair(80) < 2.0 * pair(40) && pair(40) < 2.0 * pair(20));
    }

    #[test]
    fn extrapolation_recovers_limit() {
        let ns: Vec<f64> = (10..100).map(|n| n as f64).collect();
        let s: Vec<f64> = ns.iter().map(|n| 3.0 - 2.0 / n + 0.5 / (n * n)).collect();
        assert!((extrapolate_limit(&ns, &s).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn trace_identity_free_and_perturbed() {
        for &a in &[0.0, PI / 3.0] {
            let (_, mt) = table(&PotentialSpec::zero(), a, 200);
            let r = verify_trace_identity(&mt);
            assert!(r.residual < 1e-3, "a={a}: {r:?}");
        }
        let (_, mt) = table(&two_step(), PI / 5.0, 200);
        let r = verify_trace_identity(&mt);
        assert!(r.residual < 1e-3, "{r:?}");
        // dropping the n = 0 term shifts the sum by exactly μ₀⁺
        let mut mt2 = mt.clone();
        mt2.entries[0].plus = 0.0;
        let r2 = verify_trace_identity(&mt2);
        assert!((r.partial_sum - r2.partial_sum - mt.mu0_plus()).abs() < 1e-12);
    }

    #[test]
    fn partial_fractions_agree() {
        let q = PotentialSpec::zero();
        let cfg = MagneticConfig::from_angle(PI / 3.0).unwrap();
        let r = verify_partial_fraction(&q, &cfg, &[-10.0], 500).unwrap();
        assert!(r[0].residual < 1e-3, "{:?}", r[0]);
        let r = verify_partial_fraction(&q, &cfg, &[-1e4], 500).unwrap();
        assert!((r[0].direct * -1e4 - 1.0).abs() < 1e-2);
        assert!((r[0].extrapolated * -1e4 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn partial_fraction_rejects_edges() {
        let q = PotentialSpec::zero();
        let cfg = MagneticConfig::from_angle(PI / 3.0).unwrap();
        let l0 = unperturbed::edge(0, true, 0.5);
        assert!(matches!(
            verify_partial_fraction(&q, &cfg, &[l0 + 0.05], 20),
            Err(Error::TooCloseToEdge { .. })
        ));
        let mid = 0.5 * (unperturbed::edge(2, false, 0.5) + unperturbed::edge(2, true, 0.5));
        assert!(verify_partial_fraction(&q, &cfg, &[mid], 20).is_err());
    }

    #[test]
    fn mass_series_free_case() {
        let (bs, mt) = table(&PotentialSpec::zero(), PI / 3.0, 2001);
        for plus in [false, true] {
            let r = verify_mass_series(&bs, &mt, 2, plus).unwrap();
            assert!(r.residual < 1e-4, "{r:?}");
        }
    }

    #[test]
    fn mass_series_odd_two_step() {
        let (bs, mt) = table(&two_step(), PI / 5.0, 2001);
        for plus in [false, true] {
            let r = verify_mass_series(&bs, &mt, 1, plus).unwrap();
            assert!(r.residual < 1e-3, "{r:?}");
        }
    }

    #[test]
    fn asymptotics_vanish_for_free_and_constant() {
        let (_, mt) = table(&PotentialSpec::zero(), PI / 5.0, 30);
        let r = verify_mass_asymptotics(&mt, 1..=30);
        assert!(r.max_scaled < 1e-4, "{}", r.max_scaled);
        let q = PotentialSpec::constant("c", 1.5);
        let (_, mt) = table(&q, PI / 5.0, 30);
        let r = verify_mass_asymptotics(&mt, 1..=30);
        for p in &r.points {
            assert!(p.epsilon.abs() < 1e-9 * (p.n * p.n) as f64);
        }
        assert!(r.max_scaled < 1e-3, "{}", r.max_scaled);
    }

    #[test]
    fn mass_matches_edge_curvature() {
        // λ - λₙ± ≈ (k - πn)²/(2μ) just inside the band next to the edge
        let q = two_step();
        let (bs, mt) = table(&q, PI / 5.0, 4);
        for n in 1..=3 {
            let e = mt.entry(n).unwrap();
            for plus in [false, true] {
                let edge = e.edge(plus);
                let dir = if plus { 1.0 } else { -1.0 };
                let fit = |d: f64| {
                    let l = edge + dir * d;
                    let k = crate::quasimomentum::k_eval_with(&bs, &q, l)
                        .unwrap()
                        .to_complex();
                    let dk = k.re - PI * n as f64;
                    dk * dk / (2.0 * (l - edge))
                };
                // Richardson in the step removes the linear correction
                let m = 2.0 * fit(1e-5) - fit(2e-5);
                let mu = e.mass(plus);
                assert!(
                    (m - mu).abs() < 1e-4 * mu.abs(),
                    "n={n} plus={plus}: {m} vs {mu}"
                );
            }
        }
    }
}
