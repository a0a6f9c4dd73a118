//! Dispersion relation straight from the vertex conditions of one cell,
//! without going through `ξ`.
//!
//! Each edge function is `y_ω = A_ω θ + B_ω φ` for the three edges
//! `ω = 0, 1, 2` of a cell. With `p = e^{ia}`, `e = e^{ia} sʲ` and the
//! Floquet relation `f_{n+1,ω} = z f_{n,ω}`, the conditions read, in the
//! unknowns `(A₀, B₀, A₁, B₁, A₂, B₂)`:
//!
//! ```text
//! y₀(1) - y₁(0)                    = 0
//! y₁(0) - e y₂(1)                  = 0
//! z y₀(0) - p y₁(1)                = 0
//! p y₁(1) - y₂(0)                  = 0
//! -y₀'(1) + y₁'(0) - e y₂'(1)      = 0
//! z y₀'(0) - p y₁'(1) + y₂'(0)     = 0
//! ```
//!
//! `z` only enters through `A₀` and `B₀`, each in one row, so the
//! determinant is a quadratic in `z`. Its coefficients come from three
//! evaluations of the determinant.

use num_complex::Complex;
use serde::Serialize;

use crate::edges::Region;
use crate::error::{Error, Result};
use crate::monodromy::{evaluate, Monodromy};
use crate::potential::PotentialSpec;
use crate::real::Real;
use crate::spectrum::{band_structure, xi, MagneticConfig};

/// A root with `||z| - 1|` below this is read as a unit-circle multiplier.
pub const UNIT_CIRCLE_TOL: f64 = 1e-6;
/// Relative distance to a Dirichlet eigenvalue treated as the flat-band vicinity.
pub const DIRICHLET_TOL: f64 = 1e-8;
/// Grid points this close to a band edge are not classified.
pub const EDGE_EXCLUSION: f64 = 1e-6;

type C<T> = Complex<T>;

/// The cell system at one `λ`.
#[derive(Debug, Clone)]
pub struct CellSystem<T> {
    pub lambda: T,
    pub monodromy: Monodromy<T>,
    /// `e^{ia}`
    pub p: C<T>,
    /// `e^{ia} sʲ`
    pub e: C<T>,
    /// `e^{iπj/N}`, the shift between `p` and the quasimomentum.
    pub w: C<T>,
}

impl<T: Real> CellSystem<T> {
    pub fn new(q: &PotentialSpec<T>, cfg: &MagneticConfig<T>, lambda: T) -> Self {
        let shift = cfg.a_j - cfg.a;
        Self {
            lambda,
            monodromy: evaluate(q, lambda),
            p: C::from_polar(T::one(), cfg.a),
            e: C::from_polar(T::one(), cfg.a + shift + shift),
            w: C::from_polar(T::one(), shift),
        }
    }

    /// `M(λ, z)`
    pub fn matrix(&self, z: C<T>) -> [[C<T>; 6]; 6] {
        let m = &self.monodromy;
        let (th, ph, tht, pht) = (
            C::from(m.theta),
            C::from(m.phi),
            C::from(m.theta_t),
            C::from(m.phi_t),
        );
        let (p, e) = (self.p, self.e);
        let o = C::new(T::zero(), T::zero());
        let one = C::new(T::one(), T::zero());
        [
            [th, ph, -one, o, o, o],
            [o, o, one, o, -e * th, -e * ph],
            [z, o, -p * th, -p * ph, o, o],
            [o, o, p * th, p * ph, -one, o],
            [-tht, -pht, o, one, -e * tht, -e * pht],
            [o, z, -p * tht, -p * pht, o, one],
        ]
    }

    pub fn determinant(&self, z: C<T>) -> C<T> {
        determinant(self.matrix(z))
    }

    /// `(d₀, d₁, d₂)` with `det M(λ, z) = d₀ + d₁z + d₂z²`.
    pub fn coefficients(&self) -> [C<T>; 3] {
        let one = C::new(T::one(), T::zero());
        let half = T::lit(0.5);
        let d0 = self.determinant(C::new(T::zero(), T::zero()));
        let dp = self.determinant(one);
        let dm = self.determinant(-one);
        [d0, (dp - dm) * half, (dp + dm) * half - d0]
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Real, const K: usize>(mut m: [[C<T>; K]; K]) -> C<T> {
    let mut det = C::new(T::one(), T::zero());
    for col in 0..K {
        let pivot = (col..K)
            .max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())
            .unwrap();
        if m[pivot][col].norm() == T::zero() {
            return C::new(T::zero(), T::zero());
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let d = m[col][col];
        det = det * d;
        let pivot_row = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let factor = row[col] / d;
            for (x, &v) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = *x - factor * v;
            }
        }
    }
    det
}

/// Roots of `d₀ + d₁z + d₂z²` with the cancellation-free quadratic formula.
fn quadratic_roots<T: Real>([d0, d1, d2]: [C<T>; 3]) -> Vec<C<T>> {
    let scale = d0.norm().max(d1.norm()).max(d2.norm());
    if scale == T::zero() {
        return Vec::new();
    }
    let tiny = T::epsilon() * T::lit(64.0) * scale;
    if d2.norm() <= tiny {
        if d1.norm() <= tiny {
            return Vec::new();
        }
        return vec![-d0 / d1];
    }
    let disc = (d1 * d1 - d0 * d2 * T::lit(4.0)).sqrt();
    let sign = if (d1.conj() * disc).re >= T::zero() {
        T::one()
    } else {
        -T::one()
    };
    let qq = (d1 + disc * sign) * T::lit(-0.5);
    if qq.norm() == T::zero() {
        return vec![C::new(T::zero(), T::zero()); 2];
    }
    vec![qq / d2, d0 / qq]
}

fn check_dirichlet<T: Real>(m: &Monodromy<T>) -> Result<()> {
    let scale = m.d_phi.abs().max(T::one());
    if m.phi.abs() <= T::lit(DIRICHLET_TOL) * scale {
        return Err(Error::FlatBandVicinity {
            lambda: m.lambda.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Floquet multipliers at `λ`, with multiplicity.
pub fn dispersion_roots<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    lambda: T,
) -> Result<Vec<C<T>>> {
    let sys = CellSystem::new(q, cfg, lambda);
    check_dirichlet(&sys.monodromy)?;
    Ok(quadratic_roots(sys.coefficients()))
}

/// `cos(p + πj/N)` for the multiplier `z = e^{ip}`.
pub fn cos_quasimomentum<T: Real>(z: C<T>, cfg: &MagneticConfig<T>) -> C<T> {
    let zw = z * C::from_polar(T::one(), cfg.a_j - cfg.a);
    (zw + zw.inv()) * T::lit(0.5)
}

/// Whether some multiplier lies on the unit circle.
pub fn on_unit_circle<T: Real>(roots: &[C<T>]) -> bool {
    roots
        .iter()
        .any(|z| (z.norm() - T::one()).abs() < T::lit(UNIT_CIRCLE_TOL))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OraclePoint<T> {
    pub lambda: T,
    /// `(re, im)` of each multiplier.
    pub roots: Vec<(T, T)>,
    /// `cos k` averaged over the roots.
    pub cos_k: (T, T),
    pub xi: T,
    pub deviation: T,
    pub oracle_band: bool,
    /// `None` within the edge exclusion zone.
    pub structure_band: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport<T> {
    pub points: Vec<OraclePoint<T>>,
    /// Grid points in the flat-band vicinity.
    pub skipped: Vec<T>,
    pub max_deviation: T,
    pub classification_mismatches: Vec<T>,
}

impl<T: Real> OracleReport<T> {
    pub fn classified(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.structure_band.is_some())
            .count()
    }
}

/// Oracle against `ξ` and against the band structure on `grid`.
pub fn cross_validate<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    grid: &[T],
) -> Result<OracleReport<T>> {
    let top = grid.iter().copied().fold(T::zero(), T::max);
    let reach = (top - q.min_value()).max(T::zero()).sqrt();
    let n_max = (T::lit(2.0) * reach / T::PI()).to_usize().unwrap_or(0) + 3;
    let bs = band_structure(q, cfg, n_max)?;
    let edges = bs.edges.all_edges();
    let mut points = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    let mut mismatches = Vec::new();
    let mut max_dev = T::zero();
    for &lambda in grid {
        let roots = match dispersion_roots(q, cfg, lambda) {
            Ok(r) => r,
            Err(Error::FlatBandVicinity { .. }) => {
                skipped.push(lambda);
                continue;
            }
            Err(e) => return Err(e),
        };
        let (x, _) = xi(q, cfg, lambda)?;
        let mut cos_k = C::new(T::zero(), T::zero());
        for z in &roots {
            cos_k = cos_k + cos_quasimomentum(*z, cfg);
        }
        if !roots.is_empty() {
            cos_k = cos_k / T::from_usize(roots.len()).unwrap();
        }
        let deviation = (cos_k - C::from(x)).norm();
        max_dev = max_dev.max(deviation);
        let oracle_band = on_unit_circle(&roots);
        let near = edges
            .iter()
            .any(|&e| (lambda - e).abs() <= T::lit(EDGE_EXCLUSION));
        let structure_band = if near {
            None
        } else {
            Some(matches!(bs.edges.locate(lambda), Region::Band(_)))
        };
        if structure_band.is_some_and(|b| b != oracle_band) {
            mismatches.push(lambda);
        }
        points.push(OraclePoint {
            lambda,
            roots: roots.iter().map(|z| (z.re, z.im)).collect(),
            cos_k: (cos_k.re, cos_k.im),
            xi: x,
            deviation,
            oracle_band,
            structure_band,
        });
    }
    Ok(OracleReport {
        points,
        skipped,
        max_deviation: max_dev,
        classification_mismatches: mismatches,
    })
}

/// Order of vanishing of the determinant coefficients at a Dirichlet
/// eigenvalue `λ_D`, estimated from `max |d_i|` at `λ_D ± ε` for two `ε`.
pub fn dirichlet_order<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    lambda_d: T,
    eps: (T, T),
) -> T {
    let size = |l: T| {
        let c = CellSystem::new(q, cfg, l).coefficients();
        c.iter().map(|d| d.norm()).fold(T::zero(), T::max)
    };
    let a = size(lambda_d + eps.0) + size(lambda_d - eps.0);
    let b = size(lambda_d + eps.1) + size(lambda_d - eps.1);
    (a / b).ln() / (eps.0 / eps.1).ln()
}

/// Determinant coefficients divided by `φ(1, λ)^k`.
pub fn regularized_coefficients<T: Real>(
    q: &PotentialSpec<T>,
    cfg: &MagneticConfig<T>,
    lambda: T,
    k: i32,
) -> [C<T>; 3] {
    let sys = CellSystem::new(q, cfg, lambda);
    let scale = sys.monodromy.phi.powi(k);
    sys.coefficients().map(|d| d / scale)
}
