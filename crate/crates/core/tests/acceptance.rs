//! Acceptance criteria 1 to 11. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fail.

use std::time::{Duration, Instant};

use fairdyn::analysis::{
    equilibrium_report, find_equilibrium_thresholds, fitness_gap, gap_slope, jacobian_eigen, numeric_jacobian,
    EquilibriumReport, Flank, SearchOptions, Stability,
};
use fairdyn::classifier::{confusion, solve_threshold, utility, ClassifierPayoffs};
use fairdyn::dynamics::{fitness, replicator_update, AgentSuccess, TransitionMatrix};
use fairdyn::harness::run_trajectory;
use fairdyn::interventions::{demographic_parity_policy, laissez_faire_policy, threshold_for_acceptance, DpOptions};
use fairdyn::state::{from_coords, mean_qualification, CoordState};
use fairdyn::{settings, DynamicsModel, FeaturePair, InterventionSpec, PopulationState, Scenario, ThresholdPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(start: Instant, budget: Duration, detail: String) -> Outcome {
    let elapsed = start.elapsed();
    check(elapsed < budget, format!("{detail}; {:.3} s (budget {} s)", elapsed.as_secs_f64(), budget.as_secs_f64()))
}

fn report(sc: &Scenario) -> Result<EquilibriumReport, String> {
    equilibrium_report(&sc.features, &sc.success, &sc.payoffs, &sc.mu, &SearchOptions::default()).map_err(|e| e.to_string())
}

fn s_bar_plus(sc: &Scenario) -> Result<f64, String> {
    report(sc)?.s_bar_plus.ok_or_else(|| "no stable hyperplane".to_string())
}

fn state(s: &[f64]) -> PopulationState {
    PopulationState::new(s.to_vec()).expect("valid state")
}

fn c1_threshold_solver() -> Outcome {
    let start = Instant::now();
    let d = FeaturePair::standard();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for i in 0..40 {
        let xi = 10f64.powf(-2.0 + 4.0 * i as f64 / 39.0);
        let v = ClassifierPayoffs::new([[xi, 0.0], [0.0, 1.0]]).map_err(|e| e.to_string())?;
        for j in 0..25 {
            let s_bar = 0.02 + 0.96 * j as f64 / 24.0;
            let phi = solve_threshold(&d, &v, s_bar).map_err(|e| e.to_string())?;
            worst = worst.max((phi - 0.5 * (xi * (1.0 - s_bar) / s_bar).ln()).abs());
            count += 1;
        }
    }
    if worst >= 1e-9 {
        return Err(format!("max error {worst:.3e} over {count} points"));
    }
    within_budget(start, Duration::from_secs(1), format!("max error {worst:.3e} over {count} points"))
}

fn c2_setting1_equilibrium() -> Outcome {
    let start = Instant::now();
    let r = report(&settings::setting1())?;
    let mut failures = Vec::new();
    if r.hyperplanes.len() != 1 {
        failures.push(format!("{} hyperplanes", r.hyperplanes.len()));
    }
    let h = r.hyperplane(Flank::Plus).ok_or("no positive-slope hyperplane")?;
    if (h.phi - 0.037).abs() > 0.002 {
        failures.push(format!("phi+ = {:.6} outside 0.037 ± 0.002", h.phi));
    }
    if (h.s_bar - 0.426).abs() > 0.005 {
        failures.push(format!("s_bar+ = {:.6} outside 0.426 ± 0.005", h.s_bar));
    }
    if !(h.stability == Stability::Stable && h.lambda > -2.0 && h.lambda < 0.0) {
        failures.push(format!("lambda = {:.6} ({:?})", h.lambda, h.stability));
    }
    let detail = format!("phi+ = {:.6}, s_bar+ = {:.6}, lambda = {:.6}", h.phi, h.s_bar, h.lambda);
    if !failures.is_empty() {
        return Err(format!("{}; {detail}", failures.join("; ")));
    }
    within_budget(start, Duration::from_secs(1), detail)
}

fn c3_persistence() -> Outcome {
    let start = Instant::now();
    let sc = settings::setting1();
    let target = s_bar_plus(&sc)?;
    let records = run_trajectory(&sc, &state(&[0.6, 0.4]), 10_000, 1).map_err(|e| e.to_string())?;
    let last = records.last().ok_or("empty trajectory")?;
    let equal = run_trajectory(&sc, &state(&[0.5, 0.5]), 10_000, 1).map_err(|e| e.to_string())?;
    let worst_equal = equal.iter().map(|r| r.disparity_l1).fold(0.0, f64::max);
    let detail = format!(
        "|s_bar - s_bar+| = {:.3e}, |D|_1 = {:.6}, max |D|_1 from equal start = {worst_equal:.3e}",
        (last.s_bar - target).abs(),
        last.disparity_l1
    );
    if !((last.s_bar - target).abs() < 1e-6 && last.disparity_l1 > 0.01 && worst_equal < 1e-12) {
        return Err(detail);
    }
    within_budget(start, Duration::from_secs(5), detail)
}

fn c4_jacobian() -> Outcome {
    let sc = settings::setting1();
    let s_bar = s_bar_plus(&sc)?;
    let mut lines = Vec::new();
    let mut ok = true;
    for distance in [0.0, 0.2] {
        let s = from_coords(&sc.mu, &CoordState { distances: vec![distance], s_bar }).map_err(|e| e.to_string())?;
        let eigen = jacobian_eigen(&sc.mu, &s, &sc.features, &sc.success, &sc.payoffs).map_err(|e| e.to_string())?;
        let jac = numeric_jacobian(&sc, &s, 1e-6).map_err(|e| e.to_string())?;
        let n = jac.len();
        let zero_block = jac.iter().flat_map(|row| row[..n - 1].iter()).fold(0.0, |m: f64, x| m.max(x.abs()));
        let col: Vec<f64> = jac.iter().map(|row| row[n - 1]).collect();
        let v = &eigen.vector;
        let scale = col.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / v.iter().map(|b| b * b).sum::<f64>();
        let col_norm = col.iter().map(|a| a * a).sum::<f64>().sqrt();
        let residual = col.iter().zip(v).map(|(a, b)| (a - scale * b).powi(2)).sum::<f64>().sqrt() / col_norm;
        let lambda_err = ((jac[n - 1][n - 1] - eigen.lambda) / eigen.lambda).abs();
        ok &= zero_block < 1e-4 && residual < 1e-3 && lambda_err < 1e-3;
        lines.push(format!(
            "D = {distance}: zero block {zero_block:.1e}, column vs v {residual:.1e}, lambda {lambda_err:.1e}"
        ));
    }
    check(ok, lines.join("; "))
}

fn c5_quasi_concavity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_gap: f64 = 0.0;
    let mut max_changes = 0;
    let mut max_zeros = 0;
    for _ in 0..500 {
        let mut m = [[0.0; 2]; 2];
        for x in m.iter_mut().flatten() {
            *x = rng.random_range(0.0..5.0);
        }
        if m[1][1] <= m[1][0] {
            m[1].swap(0, 1);
        }
        if m[1][1] == m[1][0] {
            m[1][1] += 1.0;
        }
        let u = AgentSuccess::new(m).map_err(|e| e.to_string())?;
        let mean0 = rng.random_range(-2.0..1.0);
        let mean1 = mean0 + rng.random_range(0.2..3.0);
        let sigma = rng.random_range(0.5..2.0);
        let d = FeaturePair::gaussian(mean0, mean1, sigma).map_err(|e| e.to_string())?;
        let (lo, hi) = (mean0 - 8.0 * sigma, mean1 + 8.0 * sigma);
        let signs: Vec<f64> = (0..2000)
            .map(|k| gap_slope(&d, &u, lo + (hi - lo) * k as f64 / 1999.0))
            .filter(|s| *s != 0.0)
            .map(f64::signum)
            .collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        max_changes = max_changes.max(changes);
        let zeros = find_equilibrium_thresholds(&d, &u, &SearchOptions::default()).map_err(|e| e.to_string())?;
        max_zeros = max_zeros.max(zeros.count());
        for phi in [zeros.phi_plus, zeros.phi_minus].into_iter().flatten() {
            worst_gap = worst_gap.max(fitness_gap(&d, &u, phi).abs());
        }
    }
    let detail = format!("max sign changes {max_changes}, max zeros {max_zeros}, max |gap| at zeros {worst_gap:.1e}");
    if !(max_changes <= 1 && max_zeros <= 2 && worst_gap < 1e-8) {
        return Err(detail);
    }
    within_budget(start, Duration::from_secs(10), detail)
}

fn c6_feedback_control() -> Outcome {
    let base = settings::setting1();
    let sc = base
        .with_intervention(InterventionSpec::FeedbackControl { epsilon: 0.05 })
        .map_err(|e| e.to_string())?;
    let records = run_trajectory(&sc, &state(&[0.6, 0.4]), 5000, 1).map_err(|e| e.to_string())?;
    let reached = records.iter().find(|r| r.disparity_l1 < 1e-6).map(|r| r.t);

    let s_bar = s_bar_plus(&base)?;
    let s = from_coords(&base.mu, &CoordState { distances: vec![0.2], s_bar }).map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for epsilon in [1e-2, 1e-3, 1e-4] {
        let sc = base.with_intervention(InterventionSpec::FeedbackControl { epsilon }).map_err(|e| e.to_string())?;
        let (_, next) = sc.step(&s).map_err(|e| e.to_string())?;
        let shift = (mean_qualification(&base.mu, &next).map_err(|e| e.to_string())? - s_bar).abs();
        points.push((epsilon.ln(), shift.ln()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = points.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    check(
        reached.is_some() && (slope - 2.0).abs() <= 0.2,
        format!("|D|_1 < 1e-6 at step {reached:?}; log-log slope {slope:.4}"),
    )
}

fn c7_demographic_parity() -> Outcome {
    let sc = settings::setting1();
    let s = state(&[0.6, 0.4]);
    let (d, v, mu) = (&sc.features, &sc.payoffs, &sc.mu);
    let dp = demographic_parity_policy(d, v, mu, &s, &DpOptions::default()).map_err(|e| e.to_string())?;
    let lz = laissez_faire_policy(d, v, mu, &s).map_err(|e| e.to_string())?;
    let acc: Vec<f64> = (0..2).map(|g| confusion(d, dp.policy.get(g), s.get(g)).acceptance()).collect();
    let spread = (acc[0] - acc[1]).abs();
    let shifts = [dp.policy.get(0) - lz.get(0), dp.policy.get(1) - lz.get(1)];
    let u_dp = utility(d, v, mu, &dp.policy, &s).map_err(|e| e.to_string())?;
    let mut worst_excess = f64::NEG_INFINITY;
    for k in 1..=1000 {
        let a = k as f64 / 1001.0;
        let phi = (0..2)
            .map(|g| threshold_for_acceptance(d, s.get(g), a))
            .collect::<fairdyn::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let policy = ThresholdPolicy::new(phi).map_err(|e| e.to_string())?;
        let u = utility(d, v, mu, &policy, &s).map_err(|e| e.to_string())?;
        worst_excess = worst_excess.max(u - u_dp);
    }
    check(
        spread <= 1e-9 && shifts[0] * shifts[1] < 0.0 && worst_excess <= 1e-12,
        format!(
            "acceptance spread {spread:.1e}; threshold shifts {:+.4}, {:+.4}; best grid utility minus DP utility {worst_excess:.1e}",
            shifts[0], shifts[1]
        ),
    )
}

fn c8_equalized_odds() -> Outcome {
    let sc = settings::setting1();
    let records = run_trajectory(&sc, &state(&[0.6, 0.4]), 10_000, 1).map_err(|e| e.to_string())?;
    let eo_everywhere = records.iter().all(|r| r.equalized_odds(f64::EPSILON));
    let last = records.last().ok_or("empty trajectory")?;
    check(
        eo_everywhere && last.disparity_l1 > 0.01,
        format!("EO at every step: {eo_everywhere}; terminal |D|_1 = {:.6}", last.disparity_l1),
    )
}

fn c9_laissez_faire() -> Outcome {
    let sc = settings::setting1()
        .with_intervention(InterventionSpec::LaissezFaire)
        .map_err(|e| e.to_string())?;
    let target = s_bar_plus(&sc)?;
    let steps = 10_000;
    let records = run_trajectory(&sc, &state(&[0.6, 0.4]), steps, 1).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut finals = Vec::new();
    for (g, start) in [0.6, 0.4].into_iter().enumerate() {
        let mut s = start;
        for r in &records {
            worst = worst.max((r.s[g] - s).abs());
            let phi = solve_threshold(&sc.features, &sc.payoffs, s).map_err(|e| e.to_string())?;
            let f = fitness(&sc.features, &sc.success, phi).map_err(|e| e.to_string())?;
            s = replicator_update(s, f).ok_or("degenerate fitness")?;
        }
        finals.push(records.last().ok_or("empty")?.s[g]);
    }
    let miss = finals.iter().map(|s| (s - target).abs()).fold(0.0, f64::max);
    check(
        worst <= 1e-12 && miss < 1e-6,
        format!("max deviation from single-group runs {worst:.1e}; max |s_g - s_bar+| = {miss:.1e}"),
    )
}

fn c10_markov() -> Outcome {
    let base = settings::setting1();
    let sc = Scenario::new(
        base.mu.clone(),
        base.features,
        ClassifierPayoffs::new([[0.0, -1.0], [0.0, 1.3]]).map_err(|e| e.to_string())?,
        base.success,
        DynamicsModel::Markov {
            transition: TransitionMatrix::new([[0.2, 0.5], [0.1, 0.8]]).map_err(|e| e.to_string())?,
        },
        InterventionSpec::GroupIndependent,
    )
    .map_err(|e| e.to_string())?;
    let records = run_trajectory(&sc, &state(&[0.6, 0.4]), 10_000, 1).map_err(|e| e.to_string())?;
    let reached = records.iter().find(|r| r.disparity_l1 < 1e-8).map(|r| r.t);
    check(reached.is_some(), format!("|D|_1 < 1e-8 at step {reached:?}"))
}

fn c11_setting2() -> Outcome {
    let r = report(&settings::setting2())?;
    let plus = r.hyperplane(Flank::Plus);
    let minus = r.hyperplane(Flank::Minus);
    let detail = r
        .hyperplanes
        .iter()
        .map(|h| format!("{:?}: phi {:.6}, slope {:+.4}, lambda {:+.6} ({:?})", h.flank, h.phi, h.gap_slope, h.lambda, h.stability))
        .collect::<Vec<_>>()
        .join("; ");
    let ok = r.hyperplanes.len() == 2
        && matches!((plus, minus), (Some(p), Some(m))
            if p.stability == Stability::Stable && m.stability == Stability::Unstable && p.gap_slope > 0.0);
    check(ok, detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("threshold solver exactness", c1_threshold_solver),
        ("setting-1 equilibrium", c2_setting1_equilibrium),
        ("persistence of disparity", c3_persistence),
        ("jacobian fidelity", c4_jacobian),
        ("quasi-concavity", c5_quasi_concavity),
        ("feedback control", c6_feedback_control),
        ("demographic parity", c7_demographic_parity),
        ("equalized odds counterexample", c8_equalized_odds),
        ("laissez-faire decoupling", c9_laissez_faire),
        ("markov comparison", c10_markov),
        ("setting-2 dual hyperplanes", c11_setting2),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {:>2} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
