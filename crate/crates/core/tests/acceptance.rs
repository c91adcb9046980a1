//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the observed values (run with `--nocapture` to see
//! them). Tolerances are pinned in the assertions.

use std::time::{Duration, Instant};

use rangecast::analysis::{
    charging_disks, check_containment, check_disjoint, competitive_ratio, f_alpha_sum,
    DiskVariant,
};
use rangecast::bounds::{
    alpha_star, f_star_upper, gen_1d_nn_lb, gen_2d_nn_lb, gen_random,
    gen_random_nonnegative_line, gen_recursive_squares, quadratic_closed_forms,
    run_adaptive_adversary, universal_constants,
};
use rangecast::instance::within_range;
use rangecast::oracle::{approx_5alpha, enumerate_optimal, solve_optimal};
use rangecast::strategies::verify_dual_feasibility;
use rangecast::{cost_alpha, simulate, Alpha, ArrivalInstance, Space, StrategyConfig};

fn report(criterion: &str, failures: &[String], detail: String) {
    if failures.is_empty() {
        println!("acceptance {criterion}: PASS ({detail})");
    } else {
        println!("acceptance {criterion}: FAIL ({})", failures.join("; "));
        panic!("{criterion} failed: {}", failures.join("; "));
    }
}

fn a(v: f64) -> Alpha {
    Alpha::new(v).unwrap()
}

#[test]
fn criterion_01_universal_constants_closed_form() {
    let start = Instant::now();
    let uc = universal_constants(a(2.0), 1e-8).unwrap();
    let elapsed = start.elapsed();
    let (c2, delta2) = quadratic_closed_forms();

    let mut failures = Vec::new();
    if (uc.c_alpha - c2).abs() > 1e-4 {
        failures.push(format!("c {} vs closed form {c2}", uc.c_alpha));
    }
    if (uc.delta_alpha - delta2).abs() > 1e-4 {
        failures.push(format!("delta {} vs closed form {delta2}", uc.delta_alpha));
    }
    if elapsed >= Duration::from_secs(1) {
        failures.push(format!("took {elapsed:?}"));
    }
    report(
        "01 universal constants",
        &failures,
        format!(
            "c={:.6} delta={:.6} in {elapsed:?}",
            uc.c_alpha, uc.delta_alpha
        ),
    );
}

#[test]
fn criterion_02_charge_bound_closed_forms() {
    let start = Instant::now();
    let f3 = f_star_upper(a(3.0)).unwrap();
    let f4 = f_star_upper(a(4.0)).unwrap();
    let (arg, val) = alpha_star(1e-9).unwrap();
    let elapsed = start.elapsed();

    let mut failures = Vec::new();
    if f3 != 15.0 {
        failures.push(format!("f*(3) = {f3}, want exactly 15"));
    }
    if f4 != 13.0 {
        failures.push(format!("f*(4) = {f4}, want exactly 13"));
    }
    if (arg - 4.3).abs() > 0.05 {
        failures.push(format!("alpha* = {arg}"));
    }
    if (val - 12.94).abs() > 0.01 {
        failures.push(format!("minimum value = {val}"));
    }
    if elapsed >= Duration::from_secs(1) {
        failures.push(format!("took {elapsed:?}"));
    }
    report(
        "02 charge bound",
        &failures,
        format!("f*(3)={f3} f*(4)={f4} alpha*={arg:.4} value={val:.4}"),
    );
}

#[test]
fn criterion_03_1d_lower_bound_replay() {
    let inst = gen_1d_nn_lb(0.01, 1.0).unwrap();
    let alpha = a(2.0);
    let nn_cost = simulate(&inst, &StrategyConfig::nn(alpha)).total_cost();
    let opt = solve_optimal(&inst, alpha).unwrap().cost;
    let report_line = competitive_ratio(&inst, &StrategyConfig::nn(alpha)).unwrap();

    let mut failures = Vec::new();
    if (nn_cost - 1.9801).abs() > 1e-9 {
        failures.push(format!("nn cost {nn_cost}"));
    }
    if (opt - 1.0).abs() > 1e-9 {
        failures.push(format!("optimum {opt}"));
    }
    if (report_line.ratio - 1.9801).abs() > 1e-9 {
        failures.push(format!("ratio {}", report_line.ratio));
    }
    report(
        "03 line lower bound",
        &failures,
        format!("cost={nn_cost} optimum={opt} ratio={:.6}", report_line.ratio),
    );
}

#[test]
fn criterion_04_2d_lower_bound_replay() {
    let inst = gen_2d_nn_lb(1e-3).unwrap();
    let alpha = a(2.0);
    let nn_cost = simulate(&inst, &StrategyConfig::nn(alpha)).total_cost();
    let start = Instant::now();
    let opt = solve_optimal(&inst, alpha).unwrap();
    let oracle_time = start.elapsed();
    let ratio = nn_cost / opt.cost;

    let mut failures = Vec::new();
    if ratio < 7.5 {
        failures.push(format!("ratio {ratio}"));
    }
    if oracle_time >= Duration::from_secs(10) {
        failures.push(format!("oracle took {oracle_time:?}"));
    }
    report(
        "04 plane lower bound",
        &failures,
        format!(
            "ratio={ratio:.4} optimum={:.6} oracle_time={oracle_time:?} states={}",
            opt.cost, opt.states_expanded
        ),
    );
}

#[test]
fn criterion_05_adaptive_adversary() {
    let alpha = a(2.0);
    let (c2, _) = quadratic_closed_forms();
    let configs = [
        ("nn", StrategyConfig::nn(alpha)),
        ("ci", StrategyConfig::ci(alpha)),
        ("2-nn", StrategyConfig::knn(2.0, alpha).unwrap()),
        ("dual(4)", StrategyConfig::dual(4.0, alpha).unwrap()),
    ];
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for (name, config) in configs {
        let outcome = run_adaptive_adversary(&config, 1e6).unwrap();
        details.push(format!(
            "{name}: ratio={:.4} family={:?}",
            outcome.ratio, outcome.family
        ));
        if outcome.ratio < c2 - 0.05 {
            failures.push(format!("{name} achieved only {}", outcome.ratio));
        }
    }
    report(
        "05 adaptive adversary",
        &failures,
        format!("threshold={:.4}; {}", c2 - 0.05, details.join(", ")),
    );
}

#[test]
fn criterion_06_1d_optimality_and_two_competitiveness() {
    let mut failures = Vec::new();

    for seed in 0..1000u64 {
        let n = 2 + (seed % 13) as usize; // 2..=14
        let inst = gen_random_nonnegative_line(n, seed).unwrap();
        let alpha = a(2.0);
        let opt = solve_optimal(&inst, alpha).unwrap().cost;
        for config in [StrategyConfig::nn(alpha), StrategyConfig::ci(alpha)] {
            let cost = simulate(&inst, &config).total_cost();
            if (cost - opt).abs() > 1e-9 * opt.max(1e-30) {
                failures.push(format!(
                    "seed {seed}: {:?} cost {cost} vs optimum {opt}",
                    config.kind
                ));
            }
        }
    }

    for seed in 0..1000u64 {
        let n = 2 + (seed % 13) as usize;
        let inst = gen_random(Space::Line, n, seed).unwrap();
        let alpha = a(2.0);
        let opt = solve_optimal(&inst, alpha).unwrap().cost;
        for config in [StrategyConfig::nn(alpha), StrategyConfig::ci(alpha)] {
            let cost = simulate(&inst, &config).total_cost();
            if cost > 2.0 * opt * (1.0 + 1e-9) {
                failures.push(format!(
                    "seed {seed}: {:?} cost {cost} vs 2x optimum {opt}",
                    config.kind
                ));
            }
        }
    }
    if failures.len() > 5 {
        failures.truncate(5);
        failures.push("...".into());
    }
    report(
        "06 line optimality",
        &failures,
        "1000 nonnegative + 1000 general line instances".into(),
    );
}

#[test]
fn criterion_07_charging_disk_geometry() {
    let alpha = a(2.0);
    let gamma = 0.08;
    let mut failures = Vec::new();
    for seed in 0..500u64 {
        let n = 2 + (seed % 29) as usize; // 2..=30
        let inst = gen_random(Space::Plane, n, seed).unwrap();

        // Any priority-feasible final assignment witnesses containment;
        // use the exact optimum where the solver reaches, the proven
        // approximation beyond.
        let assignment = if n <= 12 {
            solve_optimal(&inst, alpha).unwrap().assignment
        } else {
            approx_5alpha(&inst, alpha).unwrap().0
        };

        let two_nn = simulate(&inst, &StrategyConfig::knn(2.0, alpha).unwrap());
        let disks = charging_disks(&inst, &two_nn, DiskVariant::TwoNearestNeighbor).unwrap();
        if let Some(v) = check_disjoint(&disks, 1e-9) {
            failures.push(format!("seed {seed}: 2-nn disks {v:?}"));
        }
        if let Some(v) = check_containment(&inst, &disks, &assignment, 1.5) {
            failures.push(format!("seed {seed}: 2-nn containment {v:?}"));
        }

        let nn = simulate(&inst, &StrategyConfig::nn(alpha));
        let disks = charging_disks(
            &inst,
            &nn,
            DiskVariant::MidpointNearestNeighbor { gamma },
        )
        .unwrap();
        if let Some(v) = check_disjoint(&disks, 1e-9) {
            failures.push(format!("seed {seed}: midpoint disks {v:?}"));
        }
        if let Some(v) = check_containment(&inst, &disks, &assignment, 1.5 + gamma) {
            failures.push(format!("seed {seed}: midpoint containment {v:?}"));
        }
    }
    if failures.len() > 5 {
        failures.truncate(5);
        failures.push("...".into());
    }
    report(
        "07 charging disks",
        &failures,
        "500 plane instances, scales 1.5 and 1.58".into(),
    );
}

#[test]
fn criterion_08_guaranteed_ratio_ceilings() {
    let alpha = a(2.0);
    let mut failures = Vec::new();
    let mut max_two_nn: f64 = 0.0;
    let mut max_nn: f64 = 0.0;
    for seed in 0..500u64 {
        let n = 2 + (seed % 11) as usize; // 2..=12
        let inst = gen_random(Space::Plane, n, seed).unwrap();
        let two_nn = competitive_ratio(&inst, &StrategyConfig::knn(2.0, alpha).unwrap()).unwrap();
        let nn = competitive_ratio(&inst, &StrategyConfig::nn(alpha)).unwrap();
        max_two_nn = max_two_nn.max(two_nn.ratio);
        max_nn = max_nn.max(nn.ratio);
        if two_nn.ratio > 36.0 {
            failures.push(format!("seed {seed}: 2-nn ratio {}", two_nn.ratio));
        }
        if nn.ratio > 322.0 {
            failures.push(format!("seed {seed}: nn ratio {}", nn.ratio));
        }
        if two_nn.ratio < 1.0 - 1e-9 || nn.ratio < 1.0 - 1e-9 {
            failures.push(format!("seed {seed}: ratio below 1"));
        }
    }
    report(
        "08 ratio ceilings",
        &failures,
        format!("observed maxima: 2-nn {max_two_nn:.4} (<=36), nn {max_nn:.4} (<=322)"),
    );
}

#[test]
fn criterion_09_dual_algorithm_contracts() {
    let mut failures = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for seed in 0..500u64 {
        let n = 2 + (seed % 11) as usize; // 2..=12
        let inst = gen_random(Space::Metric, n, seed).unwrap();
        for raw_alpha in [2.0, 3.0] {
            let alpha = a(raw_alpha);
            let config = StrategyConfig::dual(4.0, alpha).unwrap();
            let sim = simulate(&inst, &config);
            if let Err(e) = sim.trace.validate(&inst, alpha) {
                failures.push(format!("seed {seed} alpha {raw_alpha}: {e}"));
            }
            let y = sim.dual.as_ref().unwrap().values();
            for arrived in 1..=y.len() {
                if verify_dual_feasibility(&inst, alpha, &y[..arrived]).is_err() {
                    failures.push(format!(
                        "seed {seed} alpha {raw_alpha}: infeasible after arrival {}",
                        arrived - 1
                    ));
                    break;
                }
            }
            let opt = solve_optimal(&inst, alpha).unwrap().cost;
            let total: f64 = y.iter().sum();
            if total > opt * (1.0 + 1e-9) {
                failures.push(format!(
                    "seed {seed} alpha {raw_alpha}: dual total {total} above optimum {opt}"
                ));
            }
            max_ratio = max_ratio.max(sim.total_cost() / opt);
        }
    }
    if failures.len() > 5 {
        failures.truncate(5);
        failures.push("...".into());
    }
    report(
        "09 dual contracts",
        &failures,
        format!("500 metric instances x alpha in {{2,3}}; observed max ratio {max_ratio:.4} (informational)"),
    );
}

#[test]
fn criterion_10_offline_approximation() {
    let mut failures = Vec::new();
    for seed in 0..500u64 {
        let n = 2 + (seed % 11) as usize; // 2..=12
        let space = match seed % 3 {
            0 => Space::Line,
            1 => Space::Plane,
            _ => Space::Metric,
        };
        let inst = gen_random(space, n, seed).unwrap();
        let alpha = a(2.0);
        let (ranges, cert) = approx_5alpha(&inst, alpha).unwrap();
        for j in 1..inst.len() {
            if !(0..j).any(|i| within_range(inst.dist(i, j), ranges.get(i))) {
                failures.push(format!("seed {seed}: point {j} uncovered"));
            }
        }
        let cost = cost_alpha(&ranges, alpha);
        let factor = 25.0; // 5^2
        let opt = solve_optimal(&inst, alpha).unwrap().cost;
        if cost > factor * cert.dual_total * (1.0 + 1e-9) {
            failures.push(format!("seed {seed}: cost {cost} above 25 x dual {}", cert.dual_total));
        }
        if cert.dual_total > opt * (1.0 + 1e-9) {
            failures.push(format!("seed {seed}: dual {} above optimum {opt}", cert.dual_total));
        }
    }

    // tightness witness: on two points the ratio is exactly 5^alpha
    let two = ArrivalInstance::line(vec![0.0, 2.0]).unwrap();
    let alpha = a(2.0);
    let (ranges, _) = approx_5alpha(&two, alpha).unwrap();
    let ratio = cost_alpha(&ranges, alpha) / solve_optimal(&two, alpha).unwrap().cost;
    if ratio != 25.0 {
        failures.push(format!("two-point ratio {ratio}, want exactly 25"));
    }
    if failures.len() > 5 {
        failures.truncate(5);
        failures.push("...".into());
    }
    report(
        "10 offline approximation",
        &failures,
        "500 mixed-space instances + exact tightness witness".into(),
    );
}

#[test]
fn criterion_11_charge_sum_divergence_dichotomy() {
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for t in 1..=5usize {
        let inst = gen_recursive_squares(t).unwrap();
        let quadratic = f_alpha_sum(&inst, a(2.0), None);
        let cubic = f_alpha_sum(&inst, a(3.0), None);
        let cubic_expected = 1.0 - 0.5f64.powi(t as i32);
        details.push(format!("t={t}: sum2={quadratic:.9} sum3={cubic:.9}"));
        if (quadratic - t as f64).abs() > 1e-9 {
            failures.push(format!("t={t}: quadratic sum {quadratic}"));
        }
        if (cubic - cubic_expected).abs() > 1e-9 {
            failures.push(format!("t={t}: cubic sum {cubic} vs {cubic_expected}"));
        }
    }
    report("11 charge divergence", &failures, details.join(", "));
}

#[test]
fn criterion_12_oracle_cross_check() {
    let mut failures = Vec::new();
    for seed in 0..300u64 {
        let n = 2 + (seed % 7) as usize; // 2..=8
        let space = match seed % 3 {
            0 => Space::Line,
            1 => Space::Plane,
            _ => Space::Metric,
        };
        let inst = gen_random(space, n, seed).unwrap();
        for raw_alpha in [2.0, 3.0] {
            let alpha = a(raw_alpha);
            let dp = solve_optimal(&inst, alpha).unwrap().cost;
            let (brute, _) = enumerate_optimal(&inst, alpha).unwrap();
            if (dp - brute).abs() > 1e-9 * brute.max(1.0) {
                failures.push(format!(
                    "seed {seed} alpha {raw_alpha}: dp {dp} vs enumerator {brute}"
                ));
            }
        }
    }
    if failures.len() > 5 {
        failures.truncate(5);
        failures.push("...".into());
    }
    report(
        "12 oracle cross-check",
        &failures,
        "300 seeds, both solvers agree".into(),
    );
}
