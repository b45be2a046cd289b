//! The Bayes-optimal classifier as a function of the population.
//!
//! Accepts exactly the agents whose feature exceeds `φ`, where `φ` solves the
//! threshold equation for the global qualification rate.

use fairdyn::classifier::{confusion, solve_threshold, utility};
use fairdyn::{settings, FeaturePair, GroupProfile, PopulationState, ThresholdPolicy};

pub fn main() -> fairdyn::Result<()> {
    let d = FeaturePair::standard();
    let v = settings::setting1_payoffs();
    println!("xi = {:.4}, theta = {:.4}", v.xi(), v.theta());

    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "s_bar", "phi", "accept", "fpr", "fnr");
    for s_bar in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let phi = solve_threshold(&d, &v, s_bar)?;
        let c = confusion(&d, phi, s_bar);
        println!(
            "{s_bar:>6.2} {phi:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            c.acceptance(),
            c.fpr,
            c.fnr
        );
    }

    // The optimal threshold beats nearby alternatives.
    let mu = GroupProfile::equal(2)?;
    let s = PopulationState::new(vec![0.6, 0.4])?;
    let phi = solve_threshold(&d, &v, mu.mean(&s)?)?;
    for offset in [-0.5, 0.0, 0.5] {
        let policy = ThresholdPolicy::uniform(2, phi + offset);
        println!("utility at phi{offset:+} = {:.6}", utility(&d, &v, &mu, &policy, &s)?);
    }
    Ok(())
}
