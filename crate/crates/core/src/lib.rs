//! Band structure, effective masses and spectral identities for zigzag
//! nanotube quantum graphs in a uniform magnetic field.
//!
//! The core is generic over the scalar type through [`Real`]; the `*64`
//! aliases at the crate root fix it to `f64`.

pub mod cli;
pub mod edges;
pub mod error;
pub mod floquet;
pub mod masses;
pub mod monodromy;
pub mod potential;
pub mod quasimomentum;
pub mod real;
pub mod roots;
pub mod spectrum;
pub mod unperturbed;
pub mod verifier;

pub use edges::{EdgeSet, Gap, Region};
pub use error::{Error, Result};
pub use floquet::{cross_validate, dispersion_roots, CellSystem, OracleReport};
pub use masses::{effective_masses, MassEntry, MassTable};
pub use monodromy::{evaluate, hill_quasimomentum, hill_spectrum, HillSpectrum, Monodromy};
pub use potential::{FourierCoeffs, Piece, PotentialSpec};
pub use quasimomentum::{k_eval, CombMap, Quasimomentum};
pub use real::Real;
pub use spectrum::{
    band_structure, flat_spectrum, xi, BandStructure, FlatSpectrum, MagneticConfig, MergedBand,
};
pub use verifier::{
    check_comb_comparison, check_height_mass_gap, check_merged_band_bound, check_monotonicity,
    Check, GapRecord, InequalityReport,
};

pub type PotentialSpec64 = PotentialSpec<f64>;
pub type Monodromy64 = Monodromy<f64>;
pub type HillSpectrum64 = HillSpectrum<f64>;
pub type MagneticConfig64 = MagneticConfig<f64>;
pub type BandStructure64 = BandStructure<f64>;
pub type MassTable64 = MassTable<f64>;
pub type InequalityReport64 = InequalityReport<f64>;
pub type OracleReport64 = OracleReport<f64>;
