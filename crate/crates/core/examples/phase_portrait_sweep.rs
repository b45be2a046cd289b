//! One-step displacement fields over the unit square, one CSV per
//! intervention, ready for a streamline plot.

use std::fs::File;

use fairdyn::cli::write_sweep_csv;
use fairdyn::harness::sweep_grid;
use fairdyn::{settings, InterventionSpec};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("fairdyn_sweeps");
    std::fs::create_dir_all(&dir)?;
    let base = settings::setting1();
    for spec in [
        InterventionSpec::GroupIndependent,
        InterventionSpec::DemographicParity,
        InterventionSpec::FeedbackControl { epsilon: 0.05 },
        InterventionSpec::LaissezFaire,
    ] {
        let sweep = sweep_grid(&base.with_intervention(spec.clone())?, 20)?;
        let path = dir.join(format!("{}.csv", spec.tag()));
        write_sweep_csv(&mut File::create(&path)?, &sweep)?;
        let speed = sweep
            .cells
            .iter()
            .map(|c| c.ds1.hypot(c.ds2))
            .fold(0.0, f64::max);
        println!("{:<20} max |ds| = {speed:.4} -> {}", spec.tag(), path.display());
    }
    Ok(())
}
