//! Loads every scenario file shipped next to the examples and reports its
//! equilibria and where a short trajectory ends.

use std::path::Path;

use fairdyn::analysis::{equilibrium_report, SearchOptions};
use fairdyn::config::ScenarioConfig;
use fairdyn::harness::run_trajectory;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    for path in paths {
        let cfg = ScenarioConfig::from_path(&path)?;
        let sc = &cfg.scenario;
        let report = equilibrium_report(&sc.features, &sc.success, &sc.payoffs, &sc.mu, &SearchOptions::default())?;
        let name = path.file_stem().unwrap_or_default().to_string_lossy();
        print!("{name:<20} hyperplanes at s_bar {:?}", report.hyperplanes.iter().map(|h| h.s_bar).collect::<Vec<_>>());
        if let Some(s0) = &cfg.s0 {
            let records = run_trajectory(sc, s0, 1000, 1000)?;
            let last = records.last().expect("non-empty");
            print!("; {} from {:?} -> {:.4?}", sc.intervention.label(), s0.as_slice(), last.s);
        }
        println!();
    }
    Ok(())
}
