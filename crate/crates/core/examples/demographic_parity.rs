//! Demographic parity versus laissez-faire thresholds: parity moves the two
//! groups' thresholds in opposite directions.

use fairdyn::interventions::{demographic_parity_policy, laissez_faire_policy, DpOptions};
use fairdyn::harness::run_trajectory;
use fairdyn::{settings, InterventionSpec, PopulationState};

pub fn main() -> fairdyn::Result<()> {
    let sc = settings::setting1();
    let s = PopulationState::new(vec![0.6, 0.4])?;
    let dp = demographic_parity_policy(&sc.features, &sc.payoffs, &sc.mu, &s, &DpOptions::default())?;
    let lz = laissez_faire_policy(&sc.features, &sc.payoffs, &sc.mu, &s)?;
    println!("common acceptance rate {:.6}, utility {:.6}", dp.acceptance, dp.utility);
    for g in 0..2 {
        println!(
            "group {}: phi_DP = {:.6}, phi_LZ = {:.6}, change = {:+.6}",
            g + 1,
            dp.policy.get(g),
            lz.get(g),
            dp.policy.get(g) - lz.get(g)
        );
    }

    let sc = sc.with_intervention(InterventionSpec::DemographicParity)?;
    let records = run_trajectory(&sc, &s, 2000, 500)?;
    for r in &records {
        println!("t = {:>4}: s = {:.6?}, acceptance = {:.6?}", r.t, r.s, r.acceptance);
    }
    Ok(())
}
