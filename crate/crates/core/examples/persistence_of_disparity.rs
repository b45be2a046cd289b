//! Under a group-independent policy the groups converge to a common
//! equilibrium hyperplane but keep their initial disparity, even though the
//! classifier satisfies equalized odds at every step.

use fairdyn::harness::{detect_convergence, run_trajectory};
use fairdyn::{settings, PopulationState};

pub fn main() -> fairdyn::Result<()> {
    let sc = settings::setting1();
    for s0 in [vec![0.6, 0.4], vec![0.9, 0.2], vec![0.5, 0.5]] {
        let s0 = PopulationState::new(s0)?;
        let records = run_trajectory(&sc, &s0, 10_000, 1)?;
        let conv = detect_convergence(&records, 100, 1e-10)?;
        let eo = records.iter().all(|r| r.equalized_odds(1e-12));
        let last = records.last().expect("non-empty");
        println!(
            "s0 = {:?} -> s = {:.6?}, s_bar = {:.6}, |D|_1 = {:.6}, converged = {}, EO at every step = {eo}",
            s0.as_slice(),
            last.s,
            last.s_bar,
            last.disparity_l1,
            conv.converged
        );
    }
    Ok(())
}
