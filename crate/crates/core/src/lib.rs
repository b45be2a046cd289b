//! Long-term dynamics of a Bayes-optimal threshold classifier coupled to a
//! population that responds to its decisions through replicator dynamics.
//!
//! The crate is organised bottom-up:
//!
//! - [`dist`]: label-conditioned feature densities with a monotone likelihood ratio
//! - [`classifier`]: payoffs, the threshold equation, per-group metrics and utility
//! - [`state`]: qualification rates and the `(D, s̄)` coordinates
//! - [`dynamics`]: fitness, the replicator update, and two comparison response models
//! - [`analysis`]: equilibrium hyperplanes and their linear stability
//! - [`interventions`]: policy generators (group-independent, laissez-faire,
//!   demographic parity, universal subsidy, feedback control, capacity caps)
//! - [`harness`]: scenarios, trajectories, convergence detection, phase-portrait sweeps
//! - [`config`] and [`cli`]: scenario files and the `fairdyn` command line
//!
//! Runnable walkthroughs of each capability live in `examples/`:
//!
//! ```bash
//! cargo run --example equilibrium_analysis
//! ```

pub mod analysis;
pub mod classifier;
pub mod cli;
pub mod config;
pub mod dist;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod interventions;
pub mod state;

pub use analysis::{EquilibriumReport, Stability};
pub use classifier::{ClassifierPayoffs, ThresholdPolicy};
pub use dist::{FeaturePair, Label};
pub use dynamics::{AgentSuccess, DynamicsModel};
pub use error::{Error, Result};
pub use harness::{Scenario, TrajectoryRecord};
pub use interventions::InterventionSpec;
pub use state::{CoordState, GroupProfile, PopulationState};

/// Parameter sets used throughout the examples and tests.
pub mod settings {
    use crate::classifier::ClassifierPayoffs;
    use crate::dist::FeaturePair;
    use crate::dynamics::AgentSuccess;
    use crate::harness::Scenario;
    use crate::state::GroupProfile;

    fn two_equal_groups(payoffs: ClassifierPayoffs, success: AgentSuccess) -> Scenario {
        Scenario::replicator(GroupProfile::equal(2).expect("valid"), FeaturePair::standard(), payoffs, success)
            .expect("valid")
    }

    /// Two equal-sized groups under the main reference setting, replicator
    /// dynamics, group-independent policy.
    pub fn setting1() -> Scenario {
        two_equal_groups(setting1_payoffs(), setting1_success())
    }

    pub fn setting2() -> Scenario {
        two_equal_groups(setting2_payoffs(), setting2_success())
    }

    pub fn setting3() -> Scenario {
        two_equal_groups(setting3_payoffs(), setting3_success())
    }

    /// Agent success matrix of the main reference setting.
    pub fn setting1_success() -> AgentSuccess {
        AgentSuccess::new([[0.1, 5.5], [0.5, 1.0]]).expect("valid")
    }

    /// Classifier payoffs of the main reference setting.
    pub fn setting1_payoffs() -> ClassifierPayoffs {
        ClassifierPayoffs::new([[0.5, -0.5], [-0.25, 1.0]]).expect("valid")
    }

    /// A stable and an unstable hyperplane.
    pub fn setting2_success() -> AgentSuccess {
        AgentSuccess::new([[0.5, 1.5], [0.1, 1.0]]).expect("valid")
    }

    pub fn setting2_payoffs() -> ClassifierPayoffs {
        ClassifierPayoffs::new([[1.0, 0.0], [0.0, 1.0]]).expect("valid")
    }

    /// Only an unstable hyperplane.
    pub fn setting3_success() -> AgentSuccess {
        AgentSuccess::new([[0.5, 0.5], [0.1, 1.5]]).expect("valid")
    }

    pub fn setting3_payoffs() -> ClassifierPayoffs {
        ClassifierPayoffs::new([[10.0, 0.0], [1.0, 1.5]]).expect("valid")
    }
}
