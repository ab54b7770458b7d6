//! Perturbative and non-perturbative energies of the quartic anharmonic
//! oscillator in the holomorphic (Bargmann) representation.
//!
//! * [`weyl`]: normally ordered operator polynomials in `z` and `∂`.
//! * [`series`]: exact Rayleigh–Schrödinger coefficients and the table check.
//! * [`borel`]: Borel transform, Padé approximants, Laplace resummation and
//!   large-order analysis.
//! * [`spectral`]: truncated-matrix eigenvalues used as the reference values.
//! * [`coherent`]: displacement, instanton, trans-series and phase-space tools.
//! * [`report`]: JSON records and float formatting.

pub mod borel;
pub mod coherent;
pub mod numeric;
pub mod report;
pub mod series;
pub mod spectral;
pub mod weyl;

pub use borel::{
    BorelError, BorelSeries, LargeOrderFit, LocationConsensus, PadeApproximant, QuadratureOutcome,
    ResummationResult, SingularityEstimate, SingularityMethod,
};
pub use coherent::{
    CoherentError, HoloPoly, InstantonParams, Measure, Symbol, TransSeriesParams, TransSeriesResult,
};
pub use report::EstimateRecord;
pub use series::{EnergySeries, VerificationReport, WavefunctionTable};
pub use spectral::{ConvergenceTable, EigenResult, OperatorMatrix, SpectralError};
pub use weyl::{Hamiltonian, MonomialVector, WeylPoly};
