//! Degradation of fermionic bipartite and tripartite entanglement seen by
//! uniformly accelerated observers.
//!
//! States live on labelled qubit registers ([`qmat::Register`]). One party is
//! sent through the single-mode Unruh channel ([`unruh`]), region II is traced
//! out, and the surviving entanglement is measured with the Wootters
//! concurrence or the convex-roof three-tangle ([`measures`], [`convexroof`]).
//!
//! ```
//! use unruh_tangle::{analytic_mixed_tangle, AcinParams, Qubit, RindlerParams};
//!
//! let r = RindlerParams::from_angle(std::f64::consts::FRAC_PI_4).unwrap();
//! let tau = analytic_mixed_tangle(&AcinParams::ghz(), &r, Qubit::A).unwrap();
//! assert!((tau.value - 0.5).abs() < 1e-12);
//! ```

pub mod cli;
pub mod convexroof;
pub mod error;
pub mod measures;
pub mod qmat;
pub mod states;
pub mod unruh;

pub use convexroof::{
    analytic_mixed_tangle, decomposition, optimize_roof, optimize_roof_with, spectral_family, RoofCandidate,
    RoofObjective, RoofOptions,
};
pub use error::{Error, Result};
pub use measures::{
    concurrence_mixed, concurrence_pure, monogamy_residual, three_tangle_acin, three_tangle_pure, MeasureKind,
    MeasureResult, Provenance,
};
pub use qmat::{ComplexMatrix, Qubit, Register};
pub use states::{AcinParams, DensityMatrix, PureState, StateFile};
pub use unruh::{r_from_acceleration, reduced_state, RindlerParams, UnruhModeParams};
