//! A classifier that may accept at most a fixed share of the population.

use fairdyn::harness::run_trajectory;
use fairdyn::interventions::global_acceptance;
use fairdyn::{settings, InterventionSpec, PopulationState};

pub fn main() -> fairdyn::Result<()> {
    let base = settings::setting1();
    let s0 = PopulationState::new(vec![0.6, 0.4])?;
    for cap in [0.6, 0.3] {
        let sc = base.with_intervention(InterventionSpec::CapacityCapped {
            cap,
            inner: Box::new(InterventionSpec::GroupIndependent),
        })?;
        let policy = sc.policy(&s0)?;
        let accepted = global_acceptance(&sc.features, &sc.mu, &s0, &policy);
        println!("cap {cap}: phi at s0 = {:.6}, accepted share = {accepted:.9}", policy.get(0));
        let records = run_trajectory(&sc, &s0, 1000, 250)?;
        for r in &records {
            println!("  t = {:>4}: s = {:.6?}, s_bar = {:.6}", r.t, r.s, r.s_bar);
        }
    }
    Ok(())
}
