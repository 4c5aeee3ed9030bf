//! End-to-end acceptance gate. Runs every criterion at its stated tolerance
//! and prints one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::{Command, Output};

use nlk_core::modes::{self, divergence_residual, divergence_weight, mode_residual, mode_residual_scale};
use nlk_core::ode_engine::{self, growth_exponent, GrowthKind, SecondSolutionMethod, TrajectoryOptions};
use nlk_core::testfn::{sample_point, GaussianPolynomial, KernelZ0, KernelZi, RadialJet};
use nlk_core::verifier::{self, verify_higher_mode};
use nlk_core::{bubble, linop, Dimension, SpacePoint, Tolerances, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const DIMS: [usize; 5] = [2, 3, 4, 5, 6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dims() -> impl Iterator<Item = Dimension> {
    DIMS.into_iter().map(|n| Dimension::new(n).unwrap())
}

fn log_grid() -> Vec<f64> {
    verifier::closed_form_grid()
}

fn nlk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlk")).args(args).output().expect("run nlk")
}

fn pde_residual() -> Outcome {
    let mut worst = 0.0f64;
    for n in dims() {
        for r in log_grid() {
            worst = worst.max(bubble::n_laplace_residual(n, r).abs() / bubble::exp_u(n, r));
        }
    }
    outcome(worst <= 1e-10, format!("max |Δ_N U + e^U| / e^U = {worst:.3e} (≤ 1e-10)"))
}

fn mass_identity() -> Outcome {
    let mut worst = 0.0f64;
    for n in dims() {
        let target = bubble::mass_target(n);
        let mass = bubble::mass_integral(n, 1e-11).unwrap();
        worst = worst.max((mass - target).abs() / target);
    }
    let d = |n| Dimension::new(n).unwrap();
    let known = [(d(2), 8.0 * PI), (d(3), 81.0 * PI)];
    let known_err = known.iter().map(|&(n, v)| (bubble::mass_target(n) - v).abs() / v).fold(0.0, f64::max);
    outcome(
        worst <= 1e-9 && known_err <= 1e-14,
        format!("quadrature vs closed form {worst:.3e} (≤ 1e-9); 8π, 81π reproduced to {known_err:.1e}"),
    )
}

fn operator_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for n in dims() {
        let ni = n.get();
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0000 + ni as u64);
        for _ in 0..200 {
            let f = GaussianPolynomial::random(ni, &mut rng);
            let x = SpacePoint::new(sample_point(ni, 1e-2, 1e2, &mut rng));
            let f = f.widened(x.r().max(1.0));
            let terms = linop::terms(n, &f, &x).unwrap();
            let direct = linop::apply_linearized(n, &f, &x).unwrap();
            let rescaled = linop::weight(n, x.r()) * linop::regular_form(n, &f, &x).unwrap();
            let size: f64 = terms.iter().map(|t| t.abs()).sum();
            if size > 0.0 {
                worst = worst.max((direct - rescaled).abs() / size);
            }
        }
    }
    outcome(worst <= 1e-9, format!("max relative gap over 200 pairs per dimension = {worst:.3e} (≤ 1e-9)"))
}

fn kernel_elements() -> Outcome {
    let (mut z0_worst, mut zi_worst) = (0.0f64, 0.0f64);
    for n in dims() {
        let ni = n.get();
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_1000 + ni as u64);
        let z0 = KernelZ0::new(n);
        let zis: Vec<KernelZi> = (1..=ni).map(|i| KernelZi::new(n, i)).collect();
        for _ in 0..100 {
            let x = SpacePoint::new(sample_point(ni, 1e-2, 1e2, &mut rng));
            z0_worst = z0_worst.max(linop::apply_linearized(n, &z0, &x).unwrap().abs());
            for z in &zis {
                zi_worst = zi_worst.max(linop::apply_linearized(n, z, &x).unwrap().abs());
            }
        }
    }
    outcome(
        z0_worst <= 1e-8 && zi_worst <= 1e-8,
        format!("max |L Z_0| = {z0_worst:.3e}, max |L Z_i| = {zi_worst:.3e} (≤ 1e-8)"),
    )
}

fn check_value(report: &Value, name: &str) -> f64 {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("missing check {name}"))["value"]
        .as_f64()
        .unwrap()
}

fn directional_derivative(doc: &Value) -> Outcome {
    let (mut defect, mut excess) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for report in doc["reports"].as_array().unwrap() {
        defect = defect.max(check_value(report, "directional_derivative_order_min_defect"));
        excess = excess.max(check_value(report, "directional_derivative_order_max_excess"));
    }
    outcome(
        defect <= 0.2 && excess <= 0.2,
        format!("observed orders in [{:.3}, {:.3}] (2 ± 0.2)", 2.0 - defect, 2.0 + excess),
    )
}

fn mode_closed_forms() -> Outcome {
    let mut residual = 0.0f64;
    let mut proportionality = 0.0f64;
    for n in dims() {
        for r in log_grid() {
            for k in 0..=1 {
                let psi = if k == 0 { modes::psi0(n, r) } else { modes::psi1(n, r) };
                residual = residual.max(mode_residual(k, n, r, psi).abs() / mode_residual_scale(k, n, r, psi));
            }
            // arbitrary non-solution jets: the two forms differ by the factor p(r)
            for (k, jet) in [
                (0, RadialJet { value: 1.0, d1: -0.5, d2: 0.25 }),
                (3, RadialJet { value: r, d1: 1.0, d2: 0.0 }),
            ] {
                let (p, _) = divergence_weight(n, r);
                let expanded = mode_residual(k, n, r, jet);
                let gap = (divergence_residual(k, n, r, jet) - p * expanded).abs() / (p * mode_residual_scale(k, n, r, jet));
                proportionality = proportionality.max(gap);
            }
        }
    }
    outcome(
        residual <= 1e-10 && proportionality <= 1e-10,
        format!("ψ_0, ψ_1 scaled residual {residual:.3e}; divergence/expanded gap {proportionality:.3e} (≤ 1e-10)"),
    )
}

fn second_solution_asymptotics() -> Outcome {
    let opts = TrajectoryOptions::default();
    let (mut log_fit, mut min_coef, mut all_log, mut exp_err) = (0.0f64, f64::INFINITY, true, 0.0f64);
    for n in dims() {
        let range = ode_engine::default_range(0, n);
        let s0 = ode_engine::second_solution(0, n, SecondSolutionMethod::WronskianLaunch, range, &opts).unwrap();
        let g0 = growth_exponent(&s0, (1e2, 1e4)).unwrap();
        log_fit = log_fit.max(g0.log_fit_residual);
        min_coef = min_coef.min(g0.log_coefficient.abs());
        all_log &= g0.kind == GrowthKind::Logarithmic;

        let range = ode_engine::default_range(1, n);
        let s1 = ode_engine::second_solution(1, n, SecondSolutionMethod::WronskianLaunch, range, &opts).unwrap();
        let g1 = growth_exponent(&s1, (range.1 / 100.0, range.1)).unwrap();
        exp_err = exp_err.max((g1.exponent - 1.0).abs());
    }
    outcome(
        all_log && log_fit <= 0.02 && min_coef > 0.0 && exp_err <= 0.01,
        format!("k=0: log fit residual {log_fit:.3e} (≤ 0.02), min |A| {min_coef:.3e} (> 0); k=1: |γ - 1| {exp_err:.3e} (≤ 0.01)"),
    )
}

fn higher_modes() -> Outcome {
    let tol = Tolerances::default();
    let (mut nonpositive, mut exp_err, mut lagrange, mut integral_min) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    let mut failures = Vec::new();
    for n in dims() {
        for k in 2..=10 {
            let report = verify_higher_mode(k, n, &tol);
            if report.verdict != Verdict::Pass {
                failures.push(format!("n={} k={k}", n.get()));
                continue;
            }
            let value = |name: &str| report.checks.iter().find(|c| c.name == name).unwrap().value;
            nonpositive = nonpositive.max(value("regular_nonpositive_samples"));
            exp_err = exp_err.max(value("growth_exponent_relative_error"));
            lagrange = lagrange.max(value("lagrange_relative_residual"));
            integral_min = integral_min.min(value("lagrange_integral_side_min"));
        }
    }
    outcome(
        failures.is_empty() && nonpositive == 0.0 && exp_err <= 0.01 && lagrange <= 1e-6 && integral_min > 0.0,
        format!(
            "nonpositive samples {nonpositive}, exponent rel. error {exp_err:.3e} (≤ 0.01), Lagrange residual {lagrange:.3e} (≤ 1e-6), min integral {integral_min:.3e} (> 0){}",
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    )
}

fn kernel_count(out: &Output, doc: &Value) -> Outcome {
    let code = out.status.code();
    let mut counts = Vec::new();
    let mut ok = code == Some(0) && doc["verdict"] == "pass";
    for report in doc["reports"].as_array().unwrap() {
        let n = report["dimension"].as_u64().unwrap();
        let dim = report["kernel_dimension"].as_u64();
        ok &= dim == Some(n + 1);
        counts.push(format!("n={n}: {}", dim.map_or("withheld".into(), |d| d.to_string())));
    }
    ok &= counts.len() == DIMS.len();
    outcome(ok, format!("exit {code:?}; kernel dimensions {}", counts.join(", ")))
}

fn determinism(first: &Output) -> Outcome {
    let again = nlk(&["verify", "--seed", "0"]);
    let csv_a = nlk(&["verify", "--seed", "7", "--dim", "3", "--format", "csv"]);
    let csv_b = nlk(&["verify", "--seed", "7", "--dim", "3", "--format", "csv"]);
    let modes_a = nlk(&["modes", "--dim", "4", "--k", "0", "--format", "csv"]);
    let modes_b = nlk(&["modes", "--dim", "4", "--k", "0", "--format", "csv"]);
    let same = [
        first.stdout == again.stdout,
        csv_a.stdout == csv_b.stdout,
        modes_a.stdout == modes_b.stdout,
    ];
    let nonempty = !first.stdout.is_empty() && !csv_a.stdout.is_empty() && !modes_a.stdout.is_empty();
    outcome(
        nonempty && same.iter().all(|&s| s),
        format!("JSON report, CSV report, mode CSV byte-identical across runs: {same:?}"),
    )
}

fn main() {
    let run = nlk(&["verify", "--seed", "0"]);
    let doc: Value = serde_json::from_slice(&run.stdout).expect("verify emits JSON");

    let criteria: Vec<(&str, Outcome)> = vec![
        ("PDE residual", pde_residual()),
        ("mass identity", mass_identity()),
        ("operator equivalence", operator_equivalence()),
        ("kernel elements", kernel_elements()),
        ("directional derivative order", directional_derivative(&doc)),
        ("mode closed forms", mode_closed_forms()),
        ("second-solution asymptotics", second_solution_asymptotics()),
        ("higher modes", higher_modes()),
        ("kernel dimension n+1", kernel_count(&run, &doc)),
        ("determinism", determinism(&run)),
    ];
    let mut failed = 0;
    for (i, (name, o)) in criteria.iter().enumerate() {
        println!("[{}] {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
