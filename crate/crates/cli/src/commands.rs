//! The three subcommands and their frozen CSV formats.

use std::fs;
use std::path::Path;

use nvsim_core::protocol::{
    cluster_stabilizer_generators, fidelity_curve, ghz_stabilizer_generators, run_protocol,
    ProtocolKind, MAX_PHOTONS,
};
use nvsim_core::noise::{BathMode, NoiseModel};
use nvsim_core::rng::stream;
use nvsim_core::stats::{detected_event_rate, p_chain, simulate_sessions, RateConfig};

use crate::config::{deg_to_rad, default_noise, noise_from_file, resolve_out};
use crate::{CmdError, RatesArgs, RunArgs, SweepArgs};

/// 17 significant digits, enough to round-trip any f64.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn kind_name(kind: ProtocolKind) -> &'static str {
    match kind {
        ProtocolKind::Ghz => "ghz",
        ProtocolKind::Cluster => "cluster",
    }
}

fn write_output(path: &Path, contents: &str) -> Result<(), CmdError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CmdError::Config(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents)
        .map_err(|e| CmdError::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CmdError> {
    if args.photons < 1 || args.photons > MAX_PHOTONS {
        return Err(CmdError::Config(format!(
            "--photons must lie in 1..={MAX_PHOTONS}"
        )));
    }
    if args.trials < 1 {
        return Err(CmdError::Config("--trials must be at least 1".into()));
    }
    let noise = match &args.noise {
        Some(path) => noise_from_file(path, args.seed)?,
        None => default_noise(args.seed),
    };
    let kind = args.kind.to_kind();
    let m = args.photons;

    let generators = match kind {
        ProtocolKind::Ghz => ghz_stabilizer_generators(m),
        ProtocolKind::Cluster => cluster_stabilizer_generators(m),
    };
    let mut stab_sums = vec![0.0f64; generators.len()];
    let mut completed: u64 = 0;
    let mut fidelity_sum = 0.0f64;
    let mut achieved_sum: u64 = 0;

    let mut csv = format!(
        "# run kind={} photons={} trials={} seed={} post_select={} {}\n",
        kind_name(kind),
        m,
        args.trials,
        args.seed,
        args.post_select,
        noise.echo
    );
    csv.push_str("trial,achieved_m,branch,fidelity\n");

    for trial in 1..=args.trials {
        let mut rng = stream(args.seed, &[kind.tag(), m as u64, trial]);
        let outcome = run_protocol(kind, m, &noise.model, &mut rng, args.post_select)?;
        achieved_sum += outcome.achieved_m as u64;
        let branch = outcome
            .nuclear_branch
            .map(|b| b.to_string())
            .unwrap_or_default();
        let fidelity = outcome.fidelity_vs_ideal.map(fmt_f).unwrap_or_default();
        csv.push_str(&format!(
            "{trial},{},{branch},{fidelity}\n",
            outcome.achieved_m
        ));
        if let Some(state) = &outcome.photon_state {
            completed += 1;
            fidelity_sum += outcome.fidelity_vs_ideal.unwrap_or(0.0);
            let expectations = nvsim_core::protocol::stabilizer_expectations(state, &generators)?;
            for (acc, v) in stab_sums.iter_mut().zip(expectations) {
                *acc += v;
            }
        }
    }

    let mean_achieved = achieved_sum as f64 / args.trials as f64;
    let mean_fidelity = if completed > 0 {
        fmt_f(fidelity_sum / completed as f64)
    } else {
        String::new()
    };
    csv.push_str(&format!(
        "summary,{},{completed},{mean_fidelity}\n",
        fmt_f(mean_achieved)
    ));

    let out = resolve_out(&args.out);
    write_output(&out, &csv)?;

    println!("completed {completed}/{} trials", args.trials);
    if completed > 0 {
        for (gen, sum) in generators.iter().zip(&stab_sums) {
            let name: String = gen.iter().map(|p| format!("{p:?}")).collect();
            println!("stabilizer {name} = {}", fmt_f(sum / completed as f64));
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

pub fn cmd_fidelity_sweep(args: &SweepArgs) -> Result<(), CmdError> {
    if args.mmax < 2 || args.mmax > MAX_PHOTONS {
        return Err(CmdError::Config(format!(
            "--mmax must lie in 2..={MAX_PHOTONS}"
        )));
    }
    if args.trials < 1 {
        return Err(CmdError::Config("--trials must be at least 1".into()));
    }
    for (flag, deg) in [
        ("--gate-err-deg", args.gate_err_deg),
        ("--bath-err-deg", args.bath_err_deg),
    ] {
        if !(0.0..=180.0).contains(&deg) {
            return Err(CmdError::Config(format!(
                "{flag} must lie in 0..=180, got {deg}"
            )));
        }
    }
    let model = NoiseModel {
        gate_angle_max: deg_to_rad(args.gate_err_deg),
        bath_phase_max: deg_to_rad(args.bath_err_deg),
        bath_mode: BathMode::UniformBounded,
        hahn_echo: args.hahn_echo,
        tau: 1e-6,
        seed: args.seed,
    };
    let curve = fidelity_curve(args.kind.to_kind(), args.mmax, &model, args.trials)?;
    let out = resolve_out(&args.out);
    write_output(&out, &curve.to_csv())?;
    println!("wrote {}", out.display());
    Ok(())
}

pub fn cmd_rates(args: &RatesArgs) -> Result<(), CmdError> {
    if args.target_m < 1 {
        return Err(CmdError::Config("--target-m must be at least 1".into()));
    }
    let config = RateConfig {
        tau: args.tau_us * 1e-6,
        cycle_time: args.window_us * 1e-6,
        repetitions: args.reps,
        zpl_fraction: args.zpl,
        collection_eff: args.collection,
        detector_eff: args.detector,
        include_final_photon: args.include_final_photon,
    };
    config
        .validate()
        .map_err(|e| CmdError::Config(e.to_string()))?;

    let mut rng = stream(args.seed, &[17]);
    let hist = simulate_sessions(&config, &mut rng)?;
    let rate = detected_event_rate(&config, args.target_m)?;
    let per_photon = args.zpl * args.collection * args.detector;

    let mut csv = format!(
        "# rates tau_us={} window_us={} reps={} zpl={} collection={} detector={} \
         target_m={} include_final_photon={} seed={}\n",
        args.tau_us,
        args.window_us,
        args.reps,
        args.zpl,
        args.collection,
        args.detector,
        args.target_m,
        args.include_final_photon,
        args.seed
    );
    csv.push_str(
        "# formula: rate_hz = (1/window_s) * 2^(1-m) * (zpl*collection*detector)^k, \
         k=m or m+1 when the final disentangling photon must also be detected\n",
    );
    csv.push_str(&format!(
        "# window_rate_hz = {}\n",
        fmt_f(1.0 / config.cycle_time)
    ));
    csv.push_str(&format!(
        "# p_chain_target = {}\n",
        fmt_f(p_chain(args.target_m)?)
    ));
    csv.push_str(&format!(
        "# per_photon_efficiency = {}\n",
        fmt_f(per_photon)
    ));
    csv.push_str(&format!("# detected_event_rate_hz = {}\n", fmt_f(rate)));
    csv.push_str(
        "# note: headline figures near one long-chain event per second assume extra \
         cavity enhancement; treat them as order-of-magnitude and recompute from the \
         factors above\n",
    );
    csv.push_str(&format!("# mc_count_at_least_5 = {}\n", hist.count_at_least(5)));
    csv.push_str(&format!(
        "# mc_count_at_least_target = {}\n",
        hist.count_at_least(args.target_m)
    ));
    csv.push_str(&hist.to_csv());

    let out = resolve_out(&args.out);
    write_output(&out, &csv)?;
    println!("wrote {}", out.display());
    Ok(())
}
