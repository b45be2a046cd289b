//! Equilibrium hyperplanes of the three reference settings and their linear
//! stability, cross-checked against a finite-difference Jacobian.

use fairdyn::analysis::{equilibrium_report, jacobian_eigen, numeric_jacobian, SearchOptions};
use fairdyn::state::{from_coords, CoordState};
use fairdyn::{settings, PopulationState, Scenario};

fn report(name: &str, sc: &Scenario) -> fairdyn::Result<()> {
    let r = equilibrium_report(&sc.features, &sc.success, &sc.payoffs, &sc.mu, &SearchOptions::default())?;
    println!("{name}: phi* = {:.6}", r.phi_star);
    for h in &r.hyperplanes {
        println!(
            "  {:?}: phi = {:.6}, s_bar = {:.6}, gap' = {:.4}, lambda = {:.6} ({:?})",
            h.flank, h.phi, h.s_bar, h.gap_slope, h.lambda, h.stability
        );
    }
    Ok(())
}

pub fn main() -> fairdyn::Result<()> {
    report("setting 1", &settings::setting1())?;
    report("setting 2", &settings::setting2())?;
    report("setting 3", &settings::setting3())?;

    // A disparate state on the stable hyperplane of setting 1.
    let sc = settings::setting1();
    let r = equilibrium_report(&sc.features, &sc.success, &sc.payoffs, &sc.mu, &SearchOptions::default())?;
    let s_bar = r.s_bar_plus.expect("setting 1 has a stable hyperplane");
    let s: PopulationState = from_coords(&sc.mu, &CoordState { distances: vec![0.2], s_bar })?;
    let eigen = jacobian_eigen(&sc.mu, &s, &sc.features, &sc.success, &sc.payoffs)?;
    let jac = numeric_jacobian(&sc, &s, 1e-6)?;
    println!("state {:?}: lambda = {:.6}, eigenvector = {:?}", s.as_slice(), eigen.lambda, eigen.vector);
    println!("finite-difference Jacobian (D, s_bar): {jac:.6?}");
    Ok(())
}
