//! Cameron–Martin directions, cylindrical functionals and the path-space
//! calculus along simulated frame paths.

mod differential;
mod direction;
mod divergence;
mod functional;

pub use differential::{differential_along, green_gradient_norm, GreenKind};
pub use direction::{cm_basis, CmDirection, Profile};
pub use divergence::{
    divergence_direct, divergence_lemma1, divergence_pair, endpoint_pairing,
    DivergenceBreakdown, DivergencePair,
};
pub use functional::{BoundFunctional, CustomFunctional, CylinderFunctional, FD_STEP};
