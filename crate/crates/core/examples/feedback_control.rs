//! Feedback control: small group-specific threshold perturbations that shrink
//! every qualification distance while leaving the global rate unchanged to
//! first order.

use fairdyn::analysis::{equilibrium_report, SearchOptions};
use fairdyn::harness::run_trajectory;
use fairdyn::state::{from_coords, mean_qualification, CoordState};
use fairdyn::{settings, InterventionSpec, PopulationState};

pub fn main() -> fairdyn::Result<()> {
    let base = settings::setting1();
    let s0 = PopulationState::new(vec![0.6, 0.4])?;
    let sc = base.with_intervention(InterventionSpec::FeedbackControl { epsilon: 0.05 })?;
    let records = run_trajectory(&sc, &s0, 5000, 500)?;
    for r in &records {
        println!("t = {:>4}: s_bar = {:.8}, |D|_1 = {:.3e}", r.t, r.s_bar, r.disparity_l1);
    }

    // Change in s_bar over one step from a disparate on-hyperplane state.
    let report = equilibrium_report(&base.features, &base.success, &base.payoffs, &base.mu, &SearchOptions::default())?;
    let s_bar = report.s_bar_plus.expect("stable hyperplane");
    let s = from_coords(&base.mu, &CoordState { distances: vec![0.2], s_bar })?;
    for epsilon in [1e-2, 1e-3, 1e-4] {
        let sc = base.with_intervention(InterventionSpec::FeedbackControl { epsilon })?;
        let (_, next) = sc.step(&s)?;
        let shift = mean_qualification(&base.mu, &next)? - s_bar;
        println!("epsilon = {epsilon:e}: one-step change in s_bar = {shift:.3e}");
    }
    Ok(())
}
