//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any FAIL.

mod common;

use std::f64::consts::LN_2;
use std::time::Instant;

use common::*;
use voi::curve::{concavity_violation, monotonicity_violation, trace_curve_results};
use voi::leakage::{arimoto_mi, g_functional, optimal_q_f};
use voi::measures::{f_divergence, renyi_divergence};
use voi::oracle::{brute_force_r_of_u, grid_min_q, ChannelTable, GridSpec};
use voi::{
    alternate_minimize, bayes_risk_no_data, build_mechanism, leakage, verify_achievability, BetaGrid,
    Channel, CurveConfig, FGenerator, LeakageSpec, LossMatrix, Prior, Problem, SolverConfig, SolverResult,
    VoiError,
};

/// A finished solver run kept for the cross-cutting criteria.
struct Run {
    label: String,
    problem: Problem,
    result: SolverResult,
    converged: bool,
}

fn solve(problem: &Problem, beta: f64) -> (SolverResult, bool) {
    match alternate_minimize(problem, &SolverConfig::new(beta)) {
        Ok(r) => (r, true),
        Err(VoiError::NotConverged(r)) => (*r, false),
        Err(e) => panic!("solver error on {}: {e}", problem.leakage.name()),
    }
}

fn binary_entropy(u: f64) -> f64 {
    -u * u.ln() - (1.0 - u) * (1.0 - u).ln()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn hamming(spec: LeakageSpec) -> Problem {
    Problem::new(Prior::uniform(2).unwrap(), LossMatrix::hamming(2), spec).unwrap()
}

fn criterion_1(runs: &mut Vec<Run>) -> Outcome {
    let problem = hamming(LeakageSpec::Shannon);
    let betas = BetaGrid::log(0.05, 5.0, 30).betas().unwrap();
    let start = Instant::now();
    let traced = trace_curve_results(&problem, &betas, &CurveConfig::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let (mut er, mut eu) = (0.0_f64, 0.0_f64);
    let mut all_converged = true;
    for (pt, res) in traced {
        er = er.max((pt.r - (LN_2 - binary_entropy(pt.u))).abs());
        eu = eu.max((pt.u - 1.0 / (1.0 + (1.0 / pt.beta).exp())).abs());
        all_converged &= pt.converged;
        runs.push(Run {
            label: format!("hamming β={}", pt.beta),
            problem: problem.clone(),
            result: res,
            converged: pt.converged,
        });
    }
    outcome(
        er <= 1e-4 && eu <= 1e-6 && elapsed < 1.0 && all_converged,
        format!("max|r−(ln2−h(u))| = {er:.2e}, max|u−u*(β)| = {eu:.2e}, {elapsed:.3} s"),
    )
}

fn criterion_2(runs: &mut Vec<Run>) -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::new(0.002).unwrap();
    let mut worst = 0.0_f64;
    let mut worst_at = String::new();
    let mut failures = 0;
    for seed in 0..5 {
        for spec in certified_specs() {
            let problem = instance(100 + seed, 2, 2, spec);
            let table = ChannelTable::build(&problem, &grid).unwrap();
            for beta in [0.3, 1.0, 3.0] {
                let (res, converged) = solve(&problem, beta);
                let grid_u = table.min_loss(res.r_beta).unwrap();
                let err = (res.expected_loss - grid_u).abs();
                if err > worst {
                    worst = err;
                    worst_at = format!("{} seed {seed} β={beta}", spec.name());
                }
                if err > 2e-3 || !converged {
                    failures += 1;
                }
                runs.push(Run {
                    label: format!("{} seed {seed} β={beta}", spec.name()),
                    problem: problem.clone(),
                    result: res,
                    converged,
                });
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && elapsed < 120.0,
        format!("105 runs, max|U−U_grid| = {worst:.2e} ({worst_at}), {failures} failures, {elapsed:.1} s"),
    )
}

fn criterion_3(runs: &[Run]) -> Outcome {
    let mut rise = 0.0_f64;
    let mut bad = Vec::new();
    let mut max_iter = 0;
    let mut count = 0;
    for run in runs.iter().filter(|r| r.result.certified) {
        count += 1;
        let f = &run.result.trace.f_values;
        let r = f.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        rise = rise.max(r);
        max_iter = max_iter.max(run.result.trace.iterations);
        if r > 1e-10 || !run.converged || run.result.trace.iterations > 100_000 {
            bad.push(run.label.clone());
        }
    }
    outcome(
        bad.is_empty(),
        format!("{count} certified runs, max F rise {rise:.2e}, max iterations {max_iter}, failing: {bad:?}"),
    )
}

fn criterion_4(runs: &[Run]) -> Outcome {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for run in runs.iter().filter(|r| r.converged) {
        count += 1;
        let r = &run.result;
        worst = worst.max((r.expected_loss + r.beta * r.r_beta - r.f_final).abs());
    }
    outcome(worst <= 1e-9, format!("{count} converged runs, max|u+βr−F| = {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let grid = GridSpec::new(1e-3).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = String::new();
    for f in all_f_kinds() {
        for seed in 0..10 {
            let mut r = rng(500 + seed);
            let prior = prior(&mut r, 3);
            let ch = channel(&mut r, 3, 3);
            let spec = LeakageSpec::F(f);
            let q = optimal_q_f(&f, &prior, &ch);
            let closed = g_functional(&spec, &prior, &ch, &q).unwrap().value;
            let (_, best) = grid_min_q(&spec, &prior, &ch, &grid).unwrap();
            let gap = closed - best;
            if gap > worst {
                worst = gap;
                worst_at = format!("{} seed {seed}", f.name());
            }
        }
    }
    outcome(worst <= 1e-6, format!("70 instances, max D_f(q*) − grid min = {worst:.2e} ({worst_at})"))
}

/// Extra runs on every measure, certified or not, for the KKT criterion.
fn kkt_battery() -> Vec<Run> {
    let mut specs = certified_specs();
    specs.extend(all_f_kinds().into_iter().map(LeakageSpec::F));
    specs.extend([
        LeakageSpec::Arimoto(order(3.0)),
        LeakageSpec::Sibson(order(2.0)),
        LeakageSpec::Csiszar(order(2.0)),
    ]);
    let mut out = Vec::new();
    for spec in specs {
        for seed in 0..3 {
            let problem = instance(300 + seed, 3, 3, spec);
            for beta in [0.2, 1.0] {
                let (result, converged) = solve(&problem, beta);
                out.push(Run {
                    label: format!("{} 3×3 seed {seed} β={beta}", spec.name()),
                    problem: problem.clone(),
                    result,
                    converged,
                });
            }
        }
    }
    out
}

fn criterion_6(runs: &[Run]) -> Outcome {
    let (mut kp, mut kq) = (0.0_f64, 0.0_f64);
    let mut count = 0;
    let mut skipped = Vec::new();
    for run in runs {
        if !run.converged {
            skipped.push(run.label.clone());
            continue;
        }
        count += 1;
        kp = kp.max(run.result.kkt_residual_p);
        kq = kq.max(run.result.kkt_residual_q);
    }
    outcome(
        kp <= 1e-6 && kq <= 1e-6,
        format!("{count} converged runs, max kkt_p {kp:.2e}, max kkt_q {kq:.2e}; not converged: {skipped:?}"),
    )
}

fn criterion_7() -> Outcome {
    let mut v_end = 0.0_f64;
    let (mut mono, mut conc) = (0.0_f64, 0.0_f64);
    let mut unconverged = 0;
    for spec in certified_specs() {
        let h = hamming(spec);
        let (res, ok) = solve(&h, 1e6);
        let u0 = bayes_risk_no_data(&h.prior, &h.loss);
        v_end = v_end.max((u0 - res.expected_loss).abs());
        if !ok {
            unconverged += 1;
        }
        for seed in 0..3 {
            let problem = instance(700 + seed, 2, 2, spec);
            let betas = BetaGrid::log(0.05, 5.0, 30).betas().unwrap();
            let traced = trace_curve_results(&problem, &betas, &CurveConfig::default()).unwrap();
            let pts: Vec<_> = traced.into_iter().map(|(p, _)| p).filter(|p| p.converged).collect();
            mono = mono.max(monotonicity_violation(&pts));
            conc = conc.max(concavity_violation(&pts));
        }
    }
    outcome(
        v_end <= 1e-6 && mono == 0.0 && conc <= 1e-6 && unconverged == 0,
        format!("max V at β=1e6 {v_end:.2e}, max v drop {mono:.2e}, max concavity violation {conc:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut r = rng(800);
    for alpha in [0.3, 0.7, 1.0 - 1e-6] {
        for _ in 0..200 {
            let prior = prior(&mut r, 3);
            let p1 = channel(&mut r, 3, 3);
            let p2 = channel(&mut r, 3, 3);
            let lam: f64 = rand::Rng::gen_range(&mut r, 0.0..1.0);
            let mixed = arimoto_mi(alpha, &prior, &p1.mix(lam, &p2).unwrap()).unwrap();
            let chord = lam * arimoto_mi(alpha, &prior, &p1).unwrap()
                + (1.0 - lam) * arimoto_mi(alpha, &prior, &p2).unwrap();
            worst = worst.max(mixed - chord);
        }
    }
    outcome(worst <= 1e-9, format!("600 triples, max (mixture value − value mixture) = {worst:.2e}"))
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0_f64;
    let mut r = rng(900);
    for alpha in [0.5, 2.0, 3.0] {
        let f = FGenerator::HellingerOrder(alpha);
        for _ in 0..50 {
            let p = distribution(&mut r, 4);
            let q = distribution(&mut r, 4);
            let d = renyi_divergence(alpha, &p, &q).unwrap();
            let h = f_divergence(&f, &p, &q).unwrap();
            let via = (1.0 + (alpha - 1.0) * h).ln() / (alpha - 1.0);
            worst = worst.max((d - via).abs());
        }
    }
    outcome(worst <= 1e-10, format!("150 pairs, max|D_α − log(1+(α−1)H_α)/(α−1)| = {worst:.2e}"))
}

fn criterion_10(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    let (mut gain_err, mut excess) = (0.0_f64, f64::NEG_INFINITY);
    let mut count = 0;
    for run in runs.iter().filter(|r| r.converged && r.result.certified) {
        count += 1;
        let mech = build_mechanism(&run.result, &run.problem.prior, 1e-6).unwrap();
        match verify_achievability(&run.problem, &run.result, &mech) {
            Ok(rep) => {
                gain_err = gain_err.max((rep.gain - rep.target_gain).abs());
                excess = excess.max(rep.leakage - rep.r_beta);
            }
            Err(e) => failures.push(format!("{}: {e}", run.label)),
        }
    }
    // actions 1 and 2 carry identical losses and must collapse into one output
    let dup = Problem::new(
        Prior::new(vec![0.4, 0.6]).unwrap(),
        LossMatrix::new(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.2, 0.2]]).unwrap(),
        LeakageSpec::Shannon,
    )
    .unwrap();
    let (res, _) = solve(&dup, 0.5);
    let mech = build_mechanism(&res, &dup.prior, 1e-6).unwrap();
    let merged = mech.class_of == vec![0, 1, 1];
    let dup_ok = verify_achievability(&dup, &res, &mech).is_ok();
    outcome(
        failures.is_empty() && merged && dup_ok,
        format!(
            "{count} runs, max gain error {gain_err:.2e}, max leakage excess {excess:.2e}, duplicate classes {:?}; failures {failures:?}",
            mech.class_of
        ),
    )
}

fn five_measures() -> Vec<LeakageSpec> {
    vec![
        LeakageSpec::Shannon,
        LeakageSpec::F(FGenerator::SquaredHellinger),
        LeakageSpec::Arimoto(order(0.5)),
        LeakageSpec::Sibson(order(2.0)),
        LeakageSpec::Csiszar(order(0.5)),
    ]
}

fn criterion_11() -> Outcome {
    let mut r = rng(1100);
    let (mut min_val, mut indep_max, mut dep_min, mut dpi) =
        (f64::INFINITY, 0.0_f64, f64::INFINITY, f64::NEG_INFINITY);
    for spec in five_measures() {
        for _ in 0..100 {
            let prior = prior(&mut r, 3);
            let w = channel(&mut r, 3, 3);
            let k = channel(&mut r, 3, 3);
            let lw = leakage(&spec, &prior, &w).unwrap();
            let lk = leakage(&spec, &prior, &w.compose(&k).unwrap()).unwrap();
            min_val = min_val.min(lw).min(lk);
            dep_min = dep_min.min(lw);
            dpi = dpi.max(lk - lw);
            let row = distribution(&mut r, 3);
            let indep = Channel::independent(3, &row).unwrap();
            indep_max = indep_max.max(leakage(&spec, &prior, &indep).unwrap().abs());
        }
    }
    outcome(
        min_val >= -1e-12 && indep_max <= 1e-9 && dep_min > 1e-9 && dpi <= 1e-9,
        format!(
            "min value {min_val:.2e}, max on independent {indep_max:.2e}, min on dependent {dep_min:.2e}, max DPI excess {dpi:.2e}"
        ),
    )
}

fn criterion_12() -> Outcome {
    const GRID_ERROR: f64 = 2e-3;
    let grid = GridSpec::new(0.002).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..5 {
        let problem = instance(1200 + seed, 2, 2, LeakageSpec::Shannon);
        let u_min: f64 = problem
            .loss
            .rows()
            .zip(problem.prior.probs())
            .map(|(row, p)| p * row.iter().cloned().fold(f64::INFINITY, f64::min))
            .sum();
        let u0 = bayes_risk_no_data(&problem.prior, &problem.loss);
        let table = ChannelTable::build(&problem, &grid).unwrap();
        let rates: Vec<f64> =
            (1..=10).map(|k| table.min_leakage(u_min + (u0 - u_min) * k as f64 / 11.0).unwrap()).collect();
        // the cached table must agree with the one-shot oracle
        let probe = u_min + (u0 - u_min) * 0.5;
        assert_eq!(brute_force_r_of_u(&problem, probe, &grid).unwrap(), table.min_leakage(probe).unwrap());
        worst = worst.max(rates.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
    }
    outcome(worst < -GRID_ERROR, format!("max successive difference {worst:.3e} (must be < −{GRID_ERROR:e})"))
}

fn main() {
    let mut runs = Vec::new();
    let c1 = criterion_1(&mut runs);
    let c2 = criterion_2(&mut runs);
    let mut kkt_runs = kkt_battery();
    kkt_runs.extend(runs.iter().map(|r| Run {
        label: r.label.clone(),
        problem: r.problem.clone(),
        result: r.result.clone(),
        converged: r.converged,
    }));
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "binary Hamming Shannon curve", c1),
        (2, "oracle equivalence", c2),
        (3, "descent and convergence", criterion_3(&runs)),
        (4, "Lagrangian identity", criterion_4(&runs)),
        (5, "closed-form f minimizers", criterion_5()),
        (6, "KKT certification", criterion_6(&kkt_runs)),
        (7, "VoI shape", criterion_7()),
        (8, "Arimoto convexity", criterion_8()),
        (9, "Renyi/Hellinger identity", criterion_9()),
        (10, "achievability", criterion_10(&runs)),
        (11, "leakage axioms", criterion_11()),
        (12, "strict decrease of R(U)", criterion_12()),
    ];

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {tag} {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
