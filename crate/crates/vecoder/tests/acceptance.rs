//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them all).

use std::time::Instant;

use vecoder::alphabet::{default_magnitudes, Alphabet, AlphabetKind, DataPrior};
use vecoder::montecarlo::{
    precode_exact, run_experiment, sphere_brute_worst_gap, ChannelConfig, SolverChoice,
};
use vecoder::replica::{
    crossover_load, solve_1d, solve_general, solve_kind, solve_quadrature, solve_semidiscrete,
    solve_square_1d, FixedPointConfig, SolverKind,
};
use vecoder::rmt::{verify_inverse_lemma, RTransformSpec};

fn report(criterion: u32, name: &str, passed: bool, detail: &str) {
    println!(
        "[criterion {criterion}] {} — {name}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion} failed: {name}: {detail}");
}

fn cfg() -> FixedPointConfig {
    FixedPointConfig::default()
}

#[test]
fn criterion_1_square_channel_table() {
    let t0 = Instant::now();
    let expects = [(2usize, 2.6942f64), (3, 2.6656), (4, 2.6655), (64, 2.6655)];
    let mut worst: f64 = 0.0;
    for (l, expect) in expects {
        let es = solve_square_1d(&default_magnitudes(l), &cfg())
            .unwrap()
            .es
            .unwrap();
        worst = worst.max((es - expect).abs());
    }
    let l1 = solve_square_1d(&default_magnitudes(1), &cfg()).unwrap();
    let elapsed = t0.elapsed();
    let passed = worst < 1e-3 && l1.diverged && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        "inverted square channel energies",
        passed,
        &format!(
            "max |es - reference| = {worst:.2e} (tol 1e-3), L=1 divergent = {}, runtime {:.0} ms (< 1 s)",
            l1.diverged,
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_2_no_precoding_closed_form() {
    let mut worst: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.75] {
        let es = solve_1d(alpha, &default_magnitudes(1), &cfg())
            .unwrap()
            .es
            .unwrap();
        worst = worst.max((es - 1.0 / (1.0 - alpha)).abs());
    }
    let at_one = solve_1d(1.0, &default_magnitudes(1), &cfg()).unwrap();
    let passed = worst < 1e-6 && at_one.diverged;
    report(
        2,
        "no-precoding energy 1/(1-alpha)",
        passed,
        &format!(
            "max |es - closed form| = {worst:.2e} (tol 1e-6), divergent at alpha = 1: {}",
            at_one.diverged
        ),
    );
}

#[test]
fn criterion_3_asymptotic_bit_energy() {
    let target = 4.0 / 3.0;
    let quad = solve_quadrature(4.0, &default_magnitudes(100), &cfg())
        .unwrap()
        .eb
        .unwrap();
    let semi = solve_semidiscrete(4.0, &default_magnitudes(100), &cfg())
        .unwrap()
        .eb
        .unwrap();
    let (rq, rs) = (
        (quad - target).abs() / target,
        (semi - target).abs() / target,
    );
    let passed = rq < 0.05 && rs < 0.05;
    report(
        3,
        "large-lattice bit energy approaches 4/3",
        passed,
        &format!("quadrature eb = {quad:.4} ({rq:.1e} rel), semidiscrete eb = {semi:.4} ({rs:.1e} rel), tol 5%"),
    );
}

#[test]
fn criterion_4_crossover_load() {
    let got = crossover_load(
        &default_magnitudes(1),
        &default_magnitudes(100),
        &cfg(),
        0.2,
        0.9,
    )
    .unwrap();
    let passed = (got - 0.479).abs() <= 0.01;
    report(
        4,
        "semidiscrete/quadrature crossover load",
        passed,
        &format!("bisection gives alpha = {got:.4}, expected 0.479 +- 0.01"),
    );
}

#[test]
fn criterion_5_inversion_identity_grid() {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for &alpha in &[0.25, 0.5, 0.75] {
        let x = RTransformSpec::MarchenkoPastur { alpha };
        let xinv = RTransformSpec::InverseGramian { alpha };
        for i in 0..20 {
            let w = -2.0 + (2.0 - 0.01) * i as f64 / 19.0;
            worst = worst.max(verify_inverse_lemma(&x, &xinv, w).unwrap());
            points += 1;
        }
    }
    let passed = worst < 1e-10 && points == 60;
    report(
        5,
        "R-transform inversion identity",
        passed,
        &format!("max residual {worst:.2e} over {points} grid points (tol 1e-10)"),
    );
}

#[test]
fn criterion_6_specialization_consistency() {
    let mut worst: f64 = 0.0;
    for &alpha in &[0.25, 0.5, 1.0] {
        for l in [2usize, 3] {
            let a = Alphabet::new(AlphabetKind::OneDimLattice, l).unwrap();
            let spec = RTransformSpec::InverseGramian { alpha };
            let general = solve_general(&spec, &a, &DataPrior::uniform(&a), &cfg())
                .unwrap()
                .es
                .unwrap();
            let closed = solve_1d(alpha, &default_magnitudes(l), &cfg())
                .unwrap()
                .es
                .unwrap();
            worst = worst.max(((general - closed) / closed).abs());
        }
    }
    let passed = worst < 1e-4;
    report(
        6,
        "general solver matches closed forms",
        passed,
        &format!("max relative deviation {worst:.2e} over L in {{2,3}}, alpha in {{0.25,0.5,1.0}} (tol 1e-4)"),
    );
}

#[test]
fn criterion_7_monte_carlo_validation() {
    let t0 = Instant::now();
    let cfg_fp = cfg();
    let mut detail = String::new();
    let mut passed = true;

    // Desk-scale runs at alpha = 1/2 against the replica prediction.
    for l in [1usize, 2] {
        let mags = default_magnitudes(l);
        let a = Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, mags.clone()).unwrap();
        let replica = solve_kind(SolverKind::OneDim, 0.5, &mags, &cfg_fp).unwrap();
        let channel = ChannelConfig {
            k: 8,
            n: 16,
            samples: 200,
            seed: 42,
            solver: SolverChoice::Auto,
        };
        let sim = run_experiment(&channel, &a, &DataPrior::uniform(&a), Some(&replica)).unwrap();
        let ratio = sim.mean_es / replica.es.unwrap();
        passed &= (ratio - 1.0).abs() < 0.10;
        detail.push_str(&format!(
            "L={l}: empirical {:.4} / replica {:.4} = {ratio:.3}; ",
            sim.mean_es,
            replica.es.unwrap()
        ));
    }

    // The larger system must sit at least as close to the prediction.
    let mags = default_magnitudes(2);
    let a = Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, mags.clone()).unwrap();
    let replica_es = solve_kind(SolverKind::OneDim, 0.5, &mags, &cfg_fp)
        .unwrap()
        .es
        .unwrap();
    let run = |k: usize| {
        let channel = ChannelConfig {
            k,
            n: 2 * k,
            samples: 200,
            seed: 42,
            solver: SolverChoice::Auto,
        };
        run_experiment(&channel, &a, &DataPrior::uniform(&a), None).unwrap()
    };
    let small = run(4);
    let large = run(12);
    let (d_small, d_large) = (
        (small.mean_es - replica_es).abs(),
        (large.mean_es - replica_es).abs(),
    );
    let se = (small.stderr * small.stderr + large.stderr * large.stderr).sqrt();
    passed &= d_large <= d_small + 2.0 * se;
    let elapsed = t0.elapsed();
    passed &= elapsed.as_secs_f64() < 120.0;
    detail.push_str(&format!(
        "K=4 gap {d_small:.4} vs K=12 gap {d_large:.4} (2se = {:.4}); runtime {:.1} s (< 120 s)",
        2.0 * se,
        elapsed.as_secs_f64()
    ));
    report(7, "finite-size Monte-Carlo validation", passed, &detail);
}

#[test]
fn criterion_8_exact_solver_integrity() {
    // Sphere decoder against the brute-force oracle.
    let worst = sphere_brute_worst_gap(200, 10, 3, 2024);
    let mut passed = worst < 1e-10;
    let mut detail = format!("max |sphere - brute| = {worst:.2e} over 200 instances (tol 1e-10); ");

    // Nesting monotonicity and gamma^2 scaling on every instance.
    let mut worst_nest: f64 = f64::NEG_INFINITY;
    let mut worst_scale: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = vecoder::montecarlo::sample_rng(777, i);
        let k = 2 + (i as usize) % 5;
        let h = vecoder::montecarlo::sample_channel(k, 2 * k, &mut rng);
        let j = vecoder::montecarlo::gramian_inverse(&h).unwrap();
        let s: Vec<u8> = (0..k).map(|_| (i as u8 + 1) % 2).collect();

        let a2 = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
        let a3 = Alphabet::new(AlphabetKind::OneDimLattice, 3).unwrap();
        let (_, e2) = precode_exact(&j, &s, &a2).unwrap();
        let (_, e3) = precode_exact(&j, &s, &a3).unwrap();
        worst_nest = worst_nest.max(e3 - e2);

        let scaled =
            Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, vec![2.0, 6.0]).unwrap();
        let (_, e2s) = precode_exact(&j, &s, &scaled).unwrap();
        worst_scale = worst_scale.max(((e2s - 4.0 * e2) / (4.0 * e2)).abs());
    }
    passed &= worst_nest <= 1e-12 && worst_scale < 1e-12;
    detail.push_str(&format!(
        "worst nesting violation {worst_nest:.2e} (tol 1e-12), worst scaling deviation {worst_scale:.2e}"
    ));
    report(8, "exact-solver integrity", passed, &detail);
}

#[test]
fn criterion_9_checkerboard_equivalence() {
    let l = 6;
    let mut worst: f64 = 0.0;
    for &alpha in &[0.5, 1.5] {
        let a = Alphabet::new(AlphabetKind::CheckerboardLattice, l).unwrap();
        let spec = RTransformSpec::InverseGramian { alpha };
        let cb = solve_general(&spec, &a, &DataPrior::uniform(&a), &cfg())
            .unwrap()
            .eb
            .unwrap();
        let quad = solve_quadrature(alpha, &default_magnitudes(l), &cfg())
            .unwrap()
            .eb
            .unwrap();
        worst = worst.max(((cb - quad) / quad).abs());
    }
    let passed = worst < 0.01;
    report(
        9,
        "checkerboard/quadrature bit-energy equivalence",
        passed,
        &format!("max relative gap {worst:.2e} at alpha in {{0.5, 1.5}}, L = {l} (tol 1%)"),
    );
}
