//! Acceptance gate: one verdict line per criterion, printed as
//! `criterion NN: PASS` or `criterion NN: FAIL`. Run with `--nocapture`
//! to see every line; failures always surface theirs.

use std::fs;
use std::process::Command;
use std::time::Instant;

use nvsim_core::noise::{
    sample_run_disorder, BathConfig, BathConstants, BathMode, NoiseModel, RunDisorder,
};
use nvsim_core::nvmodel::{absorb_emit, prepare_initial, reexcite_without_cnot};
use nvsim_core::protocol::{
    cluster_stabilizer_generators, fidelity_curve, ideal_ghz, run_protocol,
    run_protocol_with_disorder, stabilizer_expectations, BranchMode, FilterMode, ProtocolKind,
};
use nvsim_core::rng::stream;
use nvsim_core::statevec::{
    density_from_ensemble, fidelity_pure_mixed, gates, Gate, SubsystemLabel,
};
use nvsim_core::stats::{p_chain, simulate_sessions, RateConfig};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const TOL_IDEAL_FIDELITY: f64 = 1e-9;
const TOL_STABILIZER: f64 = 1e-10;
const TOL_FACTOR_SIGMA: f64 = 1e-12;
const TOL_STRUCTURE: f64 = 1e-10;
const TOL_RATE: f64 = 1e-9;
const CHI2_P_MIN: f64 = 0.01;
const IDEAL_CHAIN_SECONDS: f64 = 10.0;

fn report(n: u32, ok: bool, detail: &str) {
    println!("criterion {n:02}: {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n:02} failed: {detail}");
}

fn forced_run(
    kind: ProtocolKind,
    m: u32,
    noise: &NoiseModel,
    disorder: &RunDisorder,
    branch: u8,
    seed_tags: &[u64],
) -> nvsim_core::protocol::ProtocolOutcome {
    let mut rng = stream(2026, seed_tags);
    run_protocol_with_disorder(
        kind,
        m,
        noise,
        disorder,
        &mut rng,
        FilterMode::ForceBright,
        BranchMode::Force(branch),
    )
    .unwrap()
}

#[test]
fn criterion_01_ideal_ghz_chains_are_exact_and_fast() {
    let start = Instant::now();
    let noise = NoiseModel::ideal();
    let mut worst = 0.0f64;
    for m in 2..=8u32 {
        for branch in [0u8, 1] {
            let out = forced_run(
                ProtocolKind::Ghz,
                m,
                &noise,
                &RunDisorder::NONE,
                branch,
                &[1, u64::from(m), u64::from(branch)],
            );
            let f = out.fidelity_vs_ideal.expect("completed run");
            worst = worst.max((f - 1.0).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst <= TOL_IDEAL_FIDELITY && elapsed < IDEAL_CHAIN_SECONDS;
    report(1, ok, &format!("worst |F-1|={worst:.3e}, elapsed={elapsed:.2}s"));
}

#[test]
fn criterion_02_ideal_cluster_chains_satisfy_every_stabilizer() {
    let noise = NoiseModel::ideal();
    let mut worst = 0.0f64;
    for m in 2..=8u32 {
        let generators = cluster_stabilizer_generators(m);
        for branch in [0u8, 1] {
            let out = forced_run(
                ProtocolKind::Cluster,
                m,
                &noise,
                &RunDisorder::NONE,
                branch,
                &[2, u64::from(m), u64::from(branch)],
            );
            let state = out.photon_state.expect("completed run");
            for value in stabilizer_expectations(&state, &generators).unwrap() {
                worst = worst.max((value - 1.0).abs());
            }
        }
    }
    let ok = worst <= TOL_STABILIZER;
    report(2, ok, &format!("worst |<S>-1|={worst:.3e}"));
}

#[test]
fn criterion_03_reexcitation_without_remapping_decouples_the_photon() {
    let s0 = prepare_initial(0).unwrap();
    let s1 = absorb_emit(&s0, 1).unwrap();
    let s2 = reexcite_without_cnot(&s1).unwrap();
    let cut = [SubsystemLabel::Photon(1)];
    let values = s2.schmidt_values(&cut).unwrap();
    let rank = s2.schmidt_rank(&cut, TOL_FACTOR_SIGMA).unwrap();
    let ok = rank == 1 && values[1] < TOL_FACTOR_SIGMA;
    report(3, ok, &format!("rank={rank}, sigma2={:.3e}", values[1]));
}

#[test]
fn criterion_04_bright_filter_passes_half_the_time_after_cycle_one() {
    const RUNS: u64 = 10_000;
    let noise = NoiseModel::ideal();
    let mut reached_two: u64 = 0;
    let mut completed: u64 = 0;
    for i in 0..RUNS {
        let mut rng = stream(2026, &[4, i]);
        let out = run_protocol(ProtocolKind::Ghz, 2, &noise, &mut rng, false).unwrap();
        if out.achieved_m >= 2 {
            reached_two += 1;
        }
        if out.photon_state.is_some() {
            completed += 1;
        }
    }
    let p2 = reached_two as f64 / RUNS as f64;
    let band2 = 3.0 * (0.25 / RUNS as f64).sqrt();
    let p3 = completed as f64 / reached_two as f64;
    let band3 = 3.0 * (0.25 / reached_two as f64).sqrt();
    let ok = (p2 - 0.5).abs() <= band2 && (p3 - 0.5).abs() <= band3;
    report(4, ok, &format!("cycle2 pass={p2:.4}, final pass={p3:.4}"));
}

#[test]
fn criterion_05_window_statistics_follow_the_halving_law() {
    let thousand = RateConfig {
        repetitions: 1000,
        ..RateConfig::default()
    };
    let hist = simulate_sessions(&thousand, &mut stream(2026, &[5, 1])).unwrap();
    let c5 = hist.count_at_least(5);
    let c10 = hist.count_at_least(10);
    let counts_ok = (39..=86).contains(&c5) && c10 <= 8;

    let big = RateConfig {
        repetitions: 100_000,
        ..RateConfig::default()
    };
    let hist2 = simulate_sessions(&big, &mut stream(2026, &[5, 2])).unwrap();
    let mut law_ok = true;
    let mut worst_pull = 0.0f64;
    for m in 1..=8u32 {
        let p = p_chain(m).unwrap();
        let emp = hist2.empirical_p_at_least(m);
        let sigma = (p * (1.0 - p) / big.repetitions as f64).sqrt();
        if sigma == 0.0 {
            law_ok &= emp == p;
        } else {
            let pull = (emp - p).abs() / sigma;
            worst_pull = worst_pull.max(pull);
            law_ok &= pull <= 3.0;
        }
    }
    let ok = counts_ok && law_ok;
    report(
        5,
        ok,
        &format!("count>=5 is {c5}, count>=10 is {c10}, worst pull={worst_pull:.2} sigma"),
    );
}

#[test]
fn criterion_06_quasi_static_phase_splits_and_averages_as_predicted() {
    let eta = 10.0f64.to_radians();
    let noise = NoiseModel::ideal();
    let ghz = ideal_ghz(2).unwrap();
    let flipped = ghz
        .apply_gate(&Gate::One(gates::pauli_x()), &[SubsystemLabel::Photon(1)])
        .unwrap();

    let plus = RunDisorder {
        delta_n: 2.0 * eta / noise.tau,
        delta_e: 0.0,
    };
    let out = forced_run(ProtocolKind::Ghz, 2, &noise, &plus, 0, &[6, 1]);
    let psi = out.photon_state.unwrap();
    let a = ghz.inner_product(&psi).unwrap();
    let b = flipped.inner_product(&psi).unwrap();
    let ratio = b / a;
    let structure_ok = (a.norm() - eta.cos()).abs() < TOL_STRUCTURE
        && (b.norm() - eta.sin()).abs() < TOL_STRUCTURE
        && (a.norm_sqr() + b.norm_sqr() - 1.0).abs() < TOL_STRUCTURE
        && ratio.re.abs() < TOL_STRUCTURE
        && (ratio.im + eta.tan()).abs() < TOL_STRUCTURE;

    let mut ensemble = Vec::new();
    for sign in [1.0f64, -1.0] {
        let disorder = RunDisorder {
            delta_n: sign * 2.0 * eta / noise.tau,
            delta_e: 0.0,
        };
        let out = forced_run(ProtocolKind::Ghz, 2, &noise, &disorder, 0, &[6, 2]);
        ensemble.push((0.5, out.photon_state.unwrap()));
    }
    let rho = density_from_ensemble(&ensemble).unwrap();
    let f = fidelity_pure_mixed(&ghz, &rho).unwrap();
    let expected = eta.cos().powi(2);
    let ensemble_ok = (f - expected).abs() <= TOL_IDEAL_FIDELITY;

    let ok = structure_ok && ensemble_ok;
    report(
        6,
        ok,
        &format!("|a|={:.6}, |b|={:.6}, ensemble F={f:.12} vs {expected:.12}", a.norm(), b.norm()),
    );
}

#[test]
fn criterion_07_fidelity_falls_with_length_and_gate_noise_bites_harder() {
    const TRIALS: u64 = 1000;
    let model = |gate_deg: f64, bath_deg: f64| NoiseModel {
        gate_angle_max: gate_deg.to_radians(),
        bath_phase_max: bath_deg.to_radians(),
        bath_mode: BathMode::UniformBounded,
        hahn_echo: false,
        tau: 1e-6,
        seed: 20260817,
    };
    let both = fidelity_curve(ProtocolKind::Ghz, 10, &model(10.0, 10.0), TRIALS).unwrap();
    let bath_only = fidelity_curve(ProtocolKind::Ghz, 10, &model(0.0, 10.0), TRIALS).unwrap();
    let gate_only = fidelity_curve(ProtocolKind::Ghz, 10, &model(10.0, 0.0), TRIALS).unwrap();

    let mut monotone = true;
    for pair in both.points.windows(2) {
        monotone &= pair[1].1 <= pair[0].1;
    }
    let mut ordering = true;
    for (b, g) in bath_only.points.iter().zip(&gate_only.points) {
        ordering &= b.1 >= g.1;
    }
    let ok = monotone && ordering;
    report(
        7,
        ok,
        &format!(
            "combined curve {:?}, bath vs gate at m=10: {:.4} vs {:.4}",
            both.points, bath_only.points[8].1, gate_only.points[8].1
        ),
    );
}

#[test]
fn criterion_08_echo_restores_exactness_under_an_electron_only_bath() {
    let mut spins = Vec::new();
    for i in 0..30 {
        let r = 2e-9 + 0.07e-9 * f64::from(i);
        let theta = 0.7 * f64::from(i);
        let phi = 1.3 * f64::from(i);
        spins.push([
            r * theta.sin() * phi.cos(),
            r * theta.sin() * phi.sin(),
            r * theta.cos(),
        ]);
    }
    let constants = BathConstants {
        gamma_n: 0.0,
        ..BathConstants::default()
    };
    let mut noise = NoiseModel::ideal();
    noise.bath_mode = BathMode::ExplicitBath(BathConfig { spins, constants });
    noise.hahn_echo = true;

    let mut worst = 0.0f64;
    let mut bath_active = true;
    for kind in [ProtocolKind::Ghz, ProtocolKind::Cluster] {
        for m in 2..=8u32 {
            for branch in [0u8, 1] {
                let mut rng = stream(2026, &[8, kind.tag(), u64::from(m), u64::from(branch)]);
                let disorder = sample_run_disorder(&noise, &mut rng).unwrap();
                bath_active &= disorder.delta_e.abs() > 0.0 && disorder.delta_n == 0.0;
                let out = run_protocol_with_disorder(
                    kind,
                    m,
                    &noise,
                    &disorder,
                    &mut rng,
                    FilterMode::ForceBright,
                    BranchMode::Force(branch),
                )
                .unwrap();
                worst = worst.max((out.fidelity_vs_ideal.unwrap() - 1.0).abs());
            }
        }
    }
    let ok = bath_active && worst <= TOL_IDEAL_FIDELITY;
    report(8, ok, &format!("worst |F-1|={worst:.3e}, bath_active={bath_active}"));
}

fn rates_csv(dir: &std::path::Path, name: &str, zpl: &str, collection: &str, seed: &str) -> String {
    let out_path = dir.join(name);
    let out = Command::new(env!("CARGO_BIN_EXE_nvsim"))
        .args([
            "rates", "--tau-us", "1", "--window-us", "100", "--reps", "100",
            "--zpl", zpl, "--collection", collection, "--target-m", "10",
            "--seed", seed, "--out", out_path.to_str().unwrap(),
        ])
        .output()
        .expect("spawn nvsim");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(&out_path).unwrap()
}

fn parse_report_value(text: &str, key: &str) -> f64 {
    let prefix = format!("# {key} = ");
    text.lines()
        .find_map(|line| line.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("missing {key} in report"))
        .parse()
        .unwrap()
}

#[test]
fn criterion_09_ten_photon_rate_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let unit = rates_csv(dir.path(), "unit.csv", "1", "1", "909");
    let rate = parse_report_value(&unit, "detected_event_rate_hz");
    let expected = 1e4 * 0.5f64.powi(9);
    let exact_ok = (rate - expected).abs() <= TOL_RATE;

    let cavity = rates_csv(dir.path(), "cavity.csv", "0.7", "0.9", "909");
    let cavity_rate = parse_report_value(&cavity, "detected_event_rate_hz");
    let flagged = cavity.contains("order-of-magnitude");
    let cavity_ok = flagged && cavity_rate > 0.0 && cavity_rate < expected;

    let ok = exact_ok && cavity_ok;
    report(
        9,
        ok,
        &format!("unit rate={rate} vs {expected}, cavity rate={cavity_rate}, flagged={flagged}"),
    );
}

#[test]
fn criterion_10_quantum_chain_lengths_match_the_coin_flip_model() {
    const RUNS: u64 = 10_000;
    const SLOTS: usize = 6;
    let noise = NoiseModel::ideal();
    let mut quantum = [0u64; SLOTS + 1];
    for i in 0..RUNS {
        let mut rng = stream(2026, &[10, 1, i]);
        let out = run_protocol(ProtocolKind::Ghz, SLOTS as u32, &noise, &mut rng, false).unwrap();
        quantum[out.achieved_m as usize] += 1;
    }

    let config = RateConfig {
        tau: 1e-6,
        cycle_time: 6e-6,
        repetitions: RUNS,
        ..RateConfig::default()
    };
    let hist = simulate_sessions(&config, &mut stream(2026, &[10, 2])).unwrap();
    let chain_exact =
        |len: u32| hist.count_at_least(len) - hist.count_at_least(len + 1);

    let mut statistic = 0.0f64;
    let mut bins = 0u32;
    for len in 1..=SLOTS as u32 {
        let a = quantum[len as usize] as f64;
        let b = chain_exact(len) as f64;
        if a + b > 0.0 {
            statistic += (a - b).powi(2) / (a + b);
            bins += 1;
        }
    }
    let dof = f64::from(bins - 1);
    let p_value = 1.0 - ChiSquared::new(dof).unwrap().cdf(statistic);
    let ok = p_value > CHI2_P_MIN;
    report(10, ok, &format!("chi2={statistic:.3}, dof={dof}, p={p_value:.4}"));
}

#[test]
fn criterion_11_identical_invocations_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let invoke = |args: &[&str], name: &str| -> Vec<u8> {
        let out_path = dir.path().join(name);
        let mut full: Vec<&str> = args.to_vec();
        let path_str = out_path.to_str().unwrap().to_owned();
        full.push("--out");
        full.push(&path_str);
        let out = Command::new(env!("CARGO_BIN_EXE_nvsim"))
            .args(&full)
            .output()
            .expect("spawn nvsim");
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        fs::read(&out_path).unwrap()
    };
    let sweep_args = [
        "fidelity-sweep", "--kind", "cluster", "--mmax", "3", "--trials", "50",
        "--gate-err-deg", "5", "--bath-err-deg", "5", "--seed", "42",
    ];
    let rates_args = [
        "rates", "--tau-us", "1", "--window-us", "100", "--reps", "2000",
        "--zpl", "0.7", "--collection", "0.9", "--target-m", "8", "--seed", "42",
    ];
    let sweep_same = invoke(&sweep_args, "s1.csv") == invoke(&sweep_args, "s2.csv");
    let rates_same = invoke(&rates_args, "r1.csv") == invoke(&rates_args, "r2.csv");
    let ok = sweep_same && rates_same;
    report(11, ok, &format!("sweep identical={sweep_same}, rates identical={rates_same}"));
}
