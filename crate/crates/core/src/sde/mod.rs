//! Time grids, Brownian increments and the horizontal frame SDE for free
//! and bridge paths, plus the radial Bessel-bridge oracle.

mod frame;
mod grid;
mod noise;
mod path;

pub use frame::{
    frame_apply, frame_inverse_apply, horizontal_heun_step, orthonormality_defect,
    reorthonormalize, FrameState, Stepper,
};
pub use grid::{make_time_grid, Refinement, TimeGrid};
pub use noise::BrownianIncrements;
pub use path::{
    simulate_bessel_bridge, simulate_bm, simulate_bridge, simulate_with_increments,
    FramePathSample, PathKind, FRAME_TOLERANCE,
};
