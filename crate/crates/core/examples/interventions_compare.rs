//! Long-run outcome of each intervention from the same starting state.

use fairdyn::cli::compare;
use fairdyn::{settings, InterventionSpec, PopulationState};

pub fn main() -> fairdyn::Result<()> {
    let sc = settings::setting1();
    let s0 = PopulationState::new(vec![0.6, 0.4])?;
    let specs = [
        InterventionSpec::GroupIndependent,
        InterventionSpec::DemographicParity,
        InterventionSpec::FeedbackControl { epsilon: 0.05 },
        InterventionSpec::LaissezFaire,
        InterventionSpec::UniversalSubsidy { delta: 0.1, inner: None },
    ];
    let rows = compare(&sc, &s0, &specs, 10_000, 100, 1e-10)?;
    println!(
        "{:<32} {:>10} {:>12} {:>6} {:>5} {:>5}",
        "intervention", "s_bar", "|D|_1", "steps", "EO", "DP"
    );
    for r in rows {
        let steps = r.steps_to_convergence.map_or("-".to_string(), |s| s.to_string());
        println!(
            "{:<32} {:>10.6} {:>12.3e} {:>6} {:>5} {:>5}",
            r.intervention, r.terminal_s_bar, r.terminal_disparity_l1, steps, r.eo_satisfied, r.dp_satisfied
        );
    }
    Ok(())
}
