use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("potential description is empty")]
    EmptyPotential,
    #[error("piece {index} has non-positive width {width}")]
    NonPositiveWidth { index: usize, width: f64 },
    #[error("piece widths sum to {sum}, expected 1")]
    WidthsDoNotSumToOne { sum: f64 },
    #[error("non-finite potential value at piece {index}")]
    NonFiniteValue { index: usize },
    #[error("Fourier index must be >= 1 (use q0 for the mean)")]
    ZeroFourierIndex,
    #[error("band index bound must be >= 1")]
    InvalidBandCount,
    #[error("|c_j| = {c} is below 1e-8: pure-point regime, use flat_spectrum")]
    PurePointRegime { c: f64 },
    #[error("root bracketing failed for {what} at index {index}")]
    BracketFailure { what: &'static str, index: usize },
    #[error("no critical point found inside gap {index}")]
    CriticalPointFailure { index: usize },
    #[error("root iteration for {what} did not converge")]
    NoConvergence { what: &'static str },
    #[error("test point {lambda} lies within {distance} of band edge (minimum 0.1)")]
    TooCloseToEdge { lambda: f64, distance: f64 },
    #[error("lambda = {lambda} is within 1e-8 of a Dirichlet eigenvalue (flat-band vicinity)")]
    FlatBandVicinity { lambda: f64 },
    #[error("lambda = {lambda} lies beyond the computed band structure (n_max = {n_max})")]
    OutsideComputedRange { lambda: f64, n_max: usize },
    #[error("arccos argument off [-1, 1] by {excess} at lambda = {lambda}")]
    BranchClamp { lambda: f64, excess: f64 },
    #[error("band structure has {available} gaps, {required} are needed")]
    InsufficientBands { available: usize, required: usize },
    #[error("invalid magnetic configuration: {0}")]
    InvalidMagnetic(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
