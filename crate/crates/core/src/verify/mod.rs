//! Monte Carlo and finite-difference checks of the integration-by-parts
//! formula and its supporting identities.

mod decay;
mod equiv;
mod girsanov;
mod ibp;
mod identities;
pub mod oracles;
mod radial;
mod runner;
mod stats;

pub use decay::{endpoint_decay_check, DecayRow, DecayTable};
pub use equiv::{representation_equiv_check, EquivRow, EquivTable};
pub use girsanov::{girsanov_check, girsanov_density, GirsanovReport};
pub use ibp::{divergence_mean_check, ibp_check, ibp_check_many, IbpCombo};
pub use identities::{
    identity_suite, random_sample_points, rel_err, IdentityReport, IdentityRow, CLOSED_TOL,
    FD_TOL,
};
pub use radial::{exponential_moment_audit, radial_law_check, MomentRow};
pub use runner::{run_paths, sample_path, McSettings, PathBatch, FAILURE_BUDGET};
pub use stats::{flat_bridge_second_moment, z_score, Estimate, GridMeta, McReport, RunMeta, Z_THRESHOLD};
