//! Mixed-state three-tangle of the rank-2 states left behind by the
//! single-mode channel.
//!
//! Three independent routes are provided:
//!
//! * closed-form eigendecompositions of the reduced canonical state for each
//!   accelerated party, with the equal-weight family `√p|+⟩ ± e^{iθ}√(1−p)|−⟩`
//!   evaluated at the roof-optimal phase `θ = π/2`;
//! * a numerical eigendecomposition of the reduced state of an arbitrary
//!   three-qubit input, phase-aligned against the channel's Kraus branches;
//! * a multi-start search over all decompositions of up to four elements.

mod analytic;
mod roof;
mod spectral;

pub use analytic::{
    alice_decomposition, analytic_mixed_tangle, bob_decomposition, charlie_decomposition, decomposition,
    equal_weight_family, mixed_tangle_bracket, Branch, Intermediates, Rank2Decomposition,
};
pub use roof::{optimize_roof, optimize_roof_with, RoofCandidate, RoofObjective, RoofOptions};
pub use spectral::{spectral_family, SpectralFamily};
