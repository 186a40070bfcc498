//! Analytic three-body model of a light particle scattered on a pair of
//! heavy bodies in the Born-Oppenheimer limit.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: quadrature, principal values, root finding and the 2×2
//!   complex solve used everywhere else.
//! * [`twobody`]: separable light-heavy pair interaction, with the loop integral,
//!   amplification coefficient and pair poles.
//! * [`threebody`]: exchange kernel, channel matrix and the connected
//!   amplitudes `M⁺`/`M⁻`.
//! * [`enhancement`]: the enhancement factor ξ of the heavy-heavy
//!   interaction and its t₀-aggregate Ξ.
//! * [`scanner`]: parameter-surface scans and resonance detection.
//! * [`units`]: conversion of the dimensionless variables to CGS units.
//!
//! All quantities are dimensionless: momenta are measured in units of the
//! form-factor range β (`t₀ = p₀/β`) and distances in units of `1/β`
//! (`ρ = rβ`, with `r` the half-separation of the heavy bodies).

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod enhancement;
pub mod error;
pub mod numerics;
pub mod scanner;
pub mod threebody;
pub mod twobody;
pub mod units;

pub use enhancement::{big_xi, classify, xi, AggregateFactor, AggregateMode, EnhancementFactor, Regime, Variant};
pub use error::{Error, Result};
pub use numerics::{Complex, QuadratureSpec, RootFindSpec};
pub use scanner::{
    find_resonance_regions, find_resonances, scan_surface, GridRange, ResonanceRecord, ResonanceRegion, ScanGrid,
    ScanSample,
};
pub use threebody::{exchange_kernel, m_amplitudes, MAmplitudes, Separation};
pub use twobody::{amplification, find_pair_pole, propagator_loop, Coupling, PairPole, PoleKind, TwoBodyDress};
pub use units::PhysicalScale;
