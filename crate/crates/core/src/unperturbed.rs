//! Closed forms for the free problem `q = 0`.
//!
//! Here `ξ⁰ = (F₀ + s²)/c` with `F₀(λ) = (9 cos 2√λ - 1)/8`; the band edges
//! sit at `√λ = πm ± φ₀` (even gaps) and `√λ = π(m - ½) ± φ₁` (odd gaps).

use crate::monodromy::trig_kernel;
use crate::real::{parity_sign, Real};

/// `½ arccos x`, snapped to 0 when `x` is within rounding of 1 so that the
/// closed gaps at `c ∈ {1/2, 1}` come out exactly closed.
fn half_acos<T: Real>(x: T) -> T {
    if x >= T::one() - T::tol(1e-14, 64.0) {
        return T::zero();
    }
    x.max(-T::one()).acos() * T::lit(0.5)
}

/// `φ₀` from `cos 2φ₀ = (8/9)(c² + c - 7/8)`.
pub fn phi0<T: Real>(c: T) -> T {
    let c = c.abs();
    half_acos(T::lit(8.0 / 9.0) * (c * c + c - T::lit(7.0 / 8.0)))
}

/// `φ₁` from `cos 2φ₁ = -(8/9)(c² - c - 7/8)`.
pub fn phi1<T: Real>(c: T) -> T {
    let c = c.abs();
    half_acos(-T::lit(8.0 / 9.0) * (c * c - c - T::lit(7.0 / 8.0)))
}

/// `√λₙ^{0,±}`; `n = 0` only has the `+` edge `φ₀`.
pub fn edge_root<T: Real>(n: usize, plus: bool, c: T) -> T {
    let sign = if plus { T::one() } else { -T::one() };
    if n == 0 {
        return phi0(c);
    }
    if n.is_multiple_of(2) {
        let m = T::from_usize(n / 2).unwrap();
        T::PI() * m + sign * phi0(c)
    } else {
        let m = T::from_usize(n / 2 + 1).unwrap();
        T::PI() * (m - T::lit(0.5)) + sign * phi1(c)
    }
}

/// `λₙ^{0,±}`
pub fn edge<T: Real>(n: usize, plus: bool, c: T) -> T {
    let z = edge_root(n, plus, c);
    z * z
}

/// Whether gap `n ≥ 1` of the free problem is closed (`φ = 0`).
pub fn is_degenerate<T: Real>(n: usize, c: T) -> bool {
    let phi = if n.is_multiple_of(2) {
        phi0(c)
    } else {
        phi1(c)
    };
    n > 0 && phi == T::zero()
}

/// `μₙ^{0,±} = (9(-1)ⁿ/(8c)) sin 2z / z` at `z = √λₙ^{0,±}`, zero on closed gaps.
pub fn mass<T: Real>(n: usize, plus: bool, c: T) -> T {
    if is_degenerate(n, c) {
        return T::zero();
    }
    let c = c.abs();
    let z = edge_root(n, plus, c);
    // sin 2z / z = 2 s(4z²) stays finite at z = 0
    let (_, s, _) = trig_kernel(T::lit(4.0) * z * z);
    parity_sign::<T>(n) * T::lit(9.0) / (T::lit(8.0) * c) * T::lit(2.0) * s
}

/// `hₙ⁰`: `cosh h = (1 + s²)/c` for even `n`, `(1 + 4c²)/(4c)` for odd `n`.
pub fn height<T: Real>(n: usize, c: T) -> T {
    let c = c.abs();
    let v = if n.is_multiple_of(2) {
        (T::lit(2.0) - c * c) / c
    } else {
        (T::one() + T::lit(4.0) * c * c) / (T::lit(4.0) * c)
    };
    if v <= T::one() + T::tol(1e-14, 64.0) {
        return T::zero();
    }
    v.acosh()
}

/// `F₀(λ) = (9 cos 2√λ - 1)/8`
pub fn f0<T: Real>(lambda: T) -> T {
    let (c, _, _) = trig_kernel(T::lit(4.0) * lambda);
    (T::lit(9.0) * c - T::one()) / T::lit(8.0)
}

/// `F₀'(λ) = -(9/8) sin 2√λ / √λ`
pub fn df0<T: Real>(lambda: T) -> T {
    let (_, s, _) = trig_kernel(T::lit(4.0) * lambda);
    -T::lit(9.0 / 4.0) * s
}

/// `F₀''(λ) = -(9/16)(2z cos 2z - sin 2z)/z³`
pub fn d2f0<T: Real>(lambda: T) -> T {
    let (_, _, sp) = trig_kernel(T::lit(4.0) * lambda);
    -T::lit(9.0) * sp
}

/// `ξ⁰(λ) = (F₀ + s²)/c`
pub fn xi0<T: Real>(lambda: T, c: T) -> T {
    (f0(lambda) + T::one() - c * c) / c
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_edges_for_unit_c() {
        assert_eq!(phi0(1.0f64), 0.0);
        let p1 = phi1(1.0f64);
        assert!((p1 - 0.5 * (7.0f64 / 9.0).acos()).abs() < 1e-15);
        assert!((p1 - 0.33985).abs() < 2e-5);
        assert!((edge(1, false, 1.0f64) - 1.5152).abs() < 1e-4);
        assert!((edge(1, true, 1.0f64) - 3.6504).abs() < 2e-4);
        assert!(is_degenerate(2, 1.0f64));
        assert!(!is_degenerate(1, 1.0f64));
    }

    #[test]
    fn edges_solve_xi_equals_parity() {
        for &c in &[1.0f64, 0.809, 0.5, 0.156] {
            for n in 0..12 {
                let t = parity_sign::<f64>(n);
                for plus in [false, true] {
                    if n == 0 && !plus {
                        continue;
                    }
                    let l = edge(n, plus, c);
                    assert!((xi0(l, c) - t).abs() < 1e-12, "c={c} n={n}");
                }
            }
        }
    }

    #[test]
    fn masses_at_third_pi() {
        let c = 0.5f64;
        let p0 = phi0(c);
        assert!(((2.0 * p0).cos() + 1.0 / 9.0).abs() < 1e-15);
        assert!((p0 - 0.84115).abs() < 1e-4);
        let sin2 = 80f64.sqrt() / 9.0;
        assert!((mass(0, true, c) - 2.25 * sin2 / p0).abs() < 1e-13);
        assert!((mass(0, true, c) - 2.6583).abs() < 5e-4);
        assert!((mass(2, true, c) - 0.5614).abs() < 1e-4);
        assert!(mass(2, false, c) < 0.0);
        assert_eq!(mass(1, true, c), 0.0);
        // limit at φ₀ = 0
        assert!((mass(0, true, 1.0f64) - 9.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn masses_are_minus_parity_slope_over_c() {
        for &c in &[0.809f64, 0.156] {
            for n in 0..10 {
                for plus in [false, true] {
                    let l = edge(n, plus, c);
                    let m = -parity_sign::<f64>(n) * df0(l) / c;
                    assert!((mass(n, plus, c) - m).abs() < 1e-12 * m.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn heights_at_third_pi() {
        assert!((height(0, 0.5f64) - 3.5f64.acosh()).abs() < 1e-15);
        assert!((height(0, 0.5f64) - 1.9248).abs() < 1e-4);
        assert_eq!(height(1, 0.5f64), 0.0);
        let c = (PI / 3.0).cos();
        assert!(is_degenerate(1, c) && is_degenerate(3, c));
        assert_eq!(phi1(c), 0.0);
        assert_eq!(height(1, c), 0.0);
    }

    #[test]
    fn f0_derivatives_match_differences() {
        for &l in &[-3.0f64, -0.01, 0.0, 0.05, 0.2, 2.0, 30.0] {
            let h = 1e-5;
            let d = (f0(l + h) - f0(l - h)) / (2.0 * h);
            assert!((df0(l) - d).abs() < 1e-7 * (1.0 + d.abs()), "λ={l}");
            let d2 = (df0(l + h) - df0(l - h)) / (2.0 * h);
            assert!((d2f0(l) - d2).abs() < 1e-6 * (1.0 + d2.abs()), "λ={l}");
        }
        let z = 1.3f64;
        let closed = -(9.0 / 16.0) * (2.0 * z * (2.0 * z).cos() - (2.0 * z).sin()) / z.powi(3);
        assert!((d2f0(z * z) - closed).abs() < 1e-13);
        assert!((f0((PI / 3.0).powi(2)) + 0.6875).abs() < 1e-15);
    }
}
