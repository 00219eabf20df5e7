//! Noise file ingestion and output path resolution.

use std::env;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nvsim_core::noise::{spins_from_text, BathConfig, BathConstants, BathMode, NoiseModel};

use crate::CmdError;

/// A noise model together with a stable one-line echo of its configuration,
/// reproduced in CSV headers so every output names the run that made it.
pub struct NoiseSettings {
    pub model: NoiseModel,
    pub echo: String,
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg * PI / 180.0
}

/// Ideal settings: exact gates, no dephasing.
pub fn default_noise(seed: u64) -> NoiseSettings {
    let mut model = NoiseModel::ideal();
    model.seed = seed;
    NoiseSettings {
        model,
        echo: "gate_angle_max_deg=0 bath_phase_max_deg=0 bath_mode=uniform \
               gaussian_sigma_deg=0 hahn_echo=false tau_us=1"
            .into(),
    }
}

/// Parses a key=value noise file. Keys: gate_angle_max_deg,
/// bath_phase_max_deg, bath_mode (uniform|gaussian|explicit),
/// gaussian_sigma_deg, hahn_echo, tau_us, bath_file. Degrees at this
/// interface, radians inside. Unknown keys are rejected so typos cannot
/// silently weaken a noise study.
pub fn noise_from_file(path: &Path, seed: u64) -> Result<NoiseSettings, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Config(format!("cannot read {}: {e}", path.display())))?;

    let mut gate_deg = 0.0f64;
    let mut bath_deg = 0.0f64;
    let mut mode = "uniform".to_string();
    let mut sigma_deg = 0.0f64;
    let mut hahn_echo = false;
    let mut tau_us = 1.0f64;
    let mut bath_file: Option<String> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CmdError::Config(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            CmdError::Config(format!(
                "{}:{}: {what} {value:?}",
                path.display(),
                lineno + 1
            ))
        };
        match key {
            "gate_angle_max_deg" => {
                gate_deg = value.parse().map_err(|_| bad("bad angle"))?;
            }
            "bath_phase_max_deg" => {
                bath_deg = value.parse().map_err(|_| bad("bad angle"))?;
            }
            "gaussian_sigma_deg" => {
                sigma_deg = value.parse().map_err(|_| bad("bad angle"))?;
            }
            "bath_mode" => {
                mode = value.to_string();
            }
            "hahn_echo" => {
                hahn_echo = value.parse().map_err(|_| bad("bad boolean"))?;
            }
            "tau_us" => {
                tau_us = value.parse().map_err(|_| bad("bad duration"))?;
            }
            "bath_file" => {
                bath_file = Some(value.to_string());
            }
            other => {
                return Err(CmdError::Config(format!(
                    "{}:{}: unknown key {other:?}",
                    path.display(),
                    lineno + 1
                )));
            }
        }
    }

    let mut spin_count = 0usize;
    let bath_mode = match mode.as_str() {
        "uniform" => BathMode::UniformBounded,
        "gaussian" => BathMode::GaussianSigma(deg_to_rad(sigma_deg)),
        "explicit" => {
            let rel = bath_file.ok_or_else(|| {
                CmdError::Config(format!(
                    "{}: bath_mode=explicit requires bath_file",
                    path.display()
                ))
            })?;
            // resolve against the noise file's own directory
            let spins_path = path.parent().unwrap_or(Path::new(".")).join(rel);
            let spins_text = std::fs::read_to_string(&spins_path).map_err(|e| {
                CmdError::Config(format!("cannot read {}: {e}", spins_path.display()))
            })?;
            let spins = spins_from_text(&spins_text)
                .map_err(|e| CmdError::Config(format!("{}: {e}", spins_path.display())))?;
            spin_count = spins.len();
            BathMode::ExplicitBath(BathConfig {
                spins,
                constants: BathConstants::default(),
            })
        }
        other => {
            return Err(CmdError::Config(format!(
                "{}: unknown bath_mode {other:?}",
                path.display()
            )));
        }
    };

    let model = NoiseModel {
        gate_angle_max: deg_to_rad(gate_deg),
        bath_phase_max: deg_to_rad(bath_deg),
        bath_mode,
        hahn_echo,
        tau: tau_us * 1e-6,
        seed,
    };
    model
        .validate()
        .map_err(|e| CmdError::Config(format!("{}: {e}", path.display())))?;

    let mut echo = format!(
        "gate_angle_max_deg={gate_deg} bath_phase_max_deg={bath_deg} bath_mode={mode} \
         gaussian_sigma_deg={sigma_deg} hahn_echo={hahn_echo} tau_us={tau_us}"
    );
    if spin_count > 0 {
        echo.push_str(&format!(" bath_spins={spin_count}"));
    }
    Ok(NoiseSettings { model, echo })
}

/// Relative output paths land in NVSIM_OUT_DIR when it is set.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = env::var_os("NVSIM_OUT_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}
