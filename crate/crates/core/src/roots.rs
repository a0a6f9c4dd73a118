//! Bracketed scalar root finding: safeguarded Newton–bisection when the
//! derivative is available, Brent's method otherwise.

use crate::real::Real;

/// Termination controls for the bracketed solvers.
#[derive(Debug, Clone, Copy)]
pub struct RootOptions<T> {
    /// Step/width tolerance, relative to `max(1, |x|)`.
    pub xtol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for RootOptions<T> {
    fn default() -> Self {
        Self {
            xtol: T::tol(1e-14, 4.0),
            max_iter: 400,
        }
    }
}

fn scale<T: Real>(x: T) -> T {
    x.abs().max(T::one())
}

fn same_sign<T: Real>(a: T, b: T) -> bool {
    (a > T::zero() && b > T::zero()) || (a < T::zero() && b < T::zero())
}

/// Root of `f` in `[lo, hi]` where `f` returns `(value, derivative)`.
///
/// Requires a sign change on the bracket. Newton steps that leave the current
/// bracket are replaced by bisection, so the iteration cannot escape.
pub fn newton_bisect<T, F>(mut f: F, lo: T, hi: T, opts: RootOptions<T>) -> Option<T>
where
    T: Real,
    F: FnMut(T) -> (T, T),
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa0 = f(a).0;
    let fb0 = f(b).0;
    if fa0 == T::zero() {
        return Some(a);
    }
    if fb0 == T::zero() {
        return Some(b);
    }
    if same_sign(fa0, fb0) || fa0.is_nan() || fb0.is_nan() {
        return None;
    }
    let mut fa = fa0;
    let two = T::lit(2.0);
    let mut x = (a + b) / two;
    for _ in 0..opts.max_iter {
        let (fx, dfx) = f(x);
        if fx == T::zero() {
            return Some(x);
        }
        if same_sign(fx, fa) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != T::zero() && newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            (a + b) / two
        };
        let step = (next - x).abs();
        x = next;
        let tol = opts.xtol * scale(x);
        if step <= tol || (b - a) <= tol {
            return Some(x);
        }
    }
    None
}

/// Brent's method on a sign-changing bracket.
pub fn brent<T, F>(mut f: F, lo: T, hi: T, opts: RootOptions<T>) -> Option<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Some(a);
    }
    if fb == T::zero() {
        return Some(b);
    }
    if same_sign(fa, fb) || fa.is_nan() || fb.is_nan() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..opts.max_iter {
        if same_sign(fb, fc) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * opts.xtol * scale(b);
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b = b + d;
        } else {
            b = b + if xm > T::zero() { tol1 } else { -tol1 };
        }
        fb = f(b);
    }
    None
}

/// Grows `[lo, hi]` geometrically about `center` until `accept(lo, hi)`
/// holds, at most `max_doublings` times. Endpoints never cross the given
/// floor/ceiling.
pub fn expand_bracket<T, A>(
    center: T,
    mut lo: T,
    mut hi: T,
    floor: Option<T>,
    ceiling: Option<T>,
    max_doublings: usize,
    mut accept: A,
) -> Option<(T, T)>
where
    T: Real,
    A: FnMut(T, T) -> bool,
{
    let two = T::lit(2.0);
    let clamp = |x: T| {
        let x = match floor {
            Some(f) if x <= f => f,
            _ => x,
        };
        match ceiling {
            Some(c) if x >= c => c,
            _ => x,
        }
    };
    lo = clamp(lo);
    hi = clamp(hi);
    for _ in 0..=max_doublings {
        if accept(lo, hi) {
            return Some((lo, hi));
        }
        lo = clamp(center - two * (center - lo));
        hi = clamp(center + two * (hi - center));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisect_finds_sqrt2() {
        let r = newton_bisect(
            |x: f64| (x * x - 2.0, 2.0 * x),
            0.0,
            2.0,
            RootOptions::default(),
        )
        .unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_bisect_survives_flat_derivative() {
        // Newton from the midpoint of [-1, 3] hits f' = 0 at x = 1.
        let r = newton_bisect(
            |x: f64| ((x - 1.0).powi(3) - 0.5, 3.0 * (x - 1.0).powi(2)),
            -1.0,
            3.0,
            RootOptions::default(),
        )
        .unwrap();
        assert!((r - (1.0 + 0.5f64.cbrt())).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_rejected() {
        assert!(newton_bisect(
            |x: f64| (x * x + 1.0, 2.0 * x),
            -1.0,
            1.0,
            RootOptions::default()
        )
        .is_none());
        assert!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, RootOptions::default()).is_none());
    }

    #[test]
    fn brent_finds_cos_root() {
        let r = brent(|x: f64| x.cos(), 1.0, 2.0, RootOptions::default()).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn brent_works_in_f32() {
        let r = brent(|x: f32| x * x - 3.0, 0.0, 3.0, RootOptions::default()).unwrap();
        assert!((r - 3f32.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn expansion_stops_at_floor() {
        let got = expand_bracket(0.0f64, -0.1, 0.1, Some(-0.3), None, 8, |lo, hi| {
            lo <= -0.3 && hi > 1.0
        });
        assert_eq!(got, Some((-0.3, 1.6)));
        let none = expand_bracket(0.0f64, -0.1, 0.1, None, None, 2, |_, hi| hi > 10.0);
        assert!(none.is_none());
    }
}
