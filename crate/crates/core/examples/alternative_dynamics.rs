//! The same classifier under two other population models: group-independent
//! Markov transitions, where disparity cannot persist, and best-response
//! agents with private qualification costs.

use fairdyn::classifier::ClassifierPayoffs;
use fairdyn::dynamics::{CostDistribution, TransitionMatrix};
use fairdyn::harness::run_trajectory;
use fairdyn::{settings, DynamicsModel, InterventionSpec, PopulationState, Scenario};

fn run(name: &str, sc: &Scenario, s0: &[f64]) -> fairdyn::Result<()> {
    let records = run_trajectory(sc, &PopulationState::new(s0.to_vec())?, 10_000, 2500)?;
    for r in &records {
        println!("{name} t = {:>5}: s = {:.6?}, |D|_1 = {:.3e}", r.t, r.s, r.disparity_l1);
    }
    Ok(())
}

pub fn main() -> fairdyn::Result<()> {
    let base = settings::setting1();

    let markov = Scenario {
        payoffs: ClassifierPayoffs::new([[0.0, -1.0], [0.0, 1.3]])?,
        ..base.with_dynamics(DynamicsModel::Markov {
            transition: TransitionMatrix::new([[0.2, 0.5], [0.1, 0.8]])?,
        })?
    };
    run("markov", &markov, &[0.6, 0.4])?;

    let best_response = Scenario {
        payoffs: ClassifierPayoffs::new([[0.0, -500.0], [0.0, 1.0]])?,
        ..base.with_dynamics(DynamicsModel::BestResponse {
            omega: 1.0,
            cost: CostDistribution::Exponential { rate: 10.0 },
        })?
    };
    run("best-response GI", &best_response, &[0.995, 0.95])?;
    run(
        "best-response LZ",
        &best_response.with_intervention(InterventionSpec::LaissezFaire)?,
        &[0.995, 0.95],
    )?;
    Ok(())
}
