//! Every walkthrough under `examples/` runs to completion.

trait Outcome {
    fn check(self);
}

impl Outcome for () {
    fn check(self) {}
}

impl<E: std::fmt::Debug> Outcome for Result<(), E> {
    fn check(self) {
        self.expect("example failed");
    }
}

#[path = "../examples/threshold_classifier.rs"]
#[allow(dead_code)]
mod threshold_classifier;

#[test]
fn threshold_classifier_runs() {
    threshold_classifier::main().check();
}

#[path = "../examples/equilibrium_analysis.rs"]
#[allow(dead_code)]
mod equilibrium_analysis;

#[test]
fn equilibrium_analysis_runs() {
    equilibrium_analysis::main().check();
}

#[path = "../examples/persistence_of_disparity.rs"]
#[allow(dead_code)]
mod persistence_of_disparity;

#[test]
fn persistence_of_disparity_runs() {
    persistence_of_disparity::main().check();
}

#[path = "../examples/interventions_compare.rs"]
#[allow(dead_code)]
mod interventions_compare;

#[test]
fn interventions_compare_runs() {
    interventions_compare::main().check();
}

#[path = "../examples/phase_portrait_sweep.rs"]
#[allow(dead_code)]
mod phase_portrait_sweep;

#[test]
fn phase_portrait_sweep_runs() {
    phase_portrait_sweep::main().check();
}

#[path = "../examples/feedback_control.rs"]
#[allow(dead_code)]
mod feedback_control;

#[test]
fn feedback_control_runs() {
    feedback_control::main().check();
}

#[path = "../examples/demographic_parity.rs"]
#[allow(dead_code)]
mod demographic_parity;

#[test]
fn demographic_parity_runs() {
    demographic_parity::main().check();
}

#[path = "../examples/alternative_dynamics.rs"]
#[allow(dead_code)]
mod alternative_dynamics;

#[test]
fn alternative_dynamics_runs() {
    alternative_dynamics::main().check();
}

#[path = "../examples/capacity_cap.rs"]
#[allow(dead_code)]
mod capacity_cap;

#[test]
fn capacity_cap_runs() {
    capacity_cap::main().check();
}

#[path = "../examples/scenario_from_config.rs"]
#[allow(dead_code)]
mod scenario_from_config;

#[test]
fn scenario_from_config_runs() {
    scenario_from_config::main().check();
}
