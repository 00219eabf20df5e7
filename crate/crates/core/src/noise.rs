//! Error channels: imperfect gate rotation angles and quasi-static dephasing
//! from a slow spin bath, with an optional echo on the electron.
//!
//! Everything here is trajectory-level: each Monte Carlo run draws one static
//! disorder sample and independent per-gate angle errors, and every channel
//! keeps the state normalized. Ensemble quantities (fidelities, rates) come
//! from averaging runs downstream.

use crate::error::{Error, Result};
use crate::statevec::{c64, gates, Gate, StateVector, SubsystemLabel};
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand::RngExt;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

/// Physical constants for the explicit bath geometry.
///
/// The gyromagnetic ratios and mu0 are standard SI values. The register
/// hyperfine coupling is a placeholder order of magnitude, not a fitted
/// device parameter; treat it (and any bath geometry) as configuration.
#[derive(Debug, Clone, Copy)]
pub struct BathConstants {
    /// Vacuum permeability, T m / A.
    pub mu0: f64,
    /// Electron gyromagnetic ratio, rad/s/T.
    pub gamma_e: f64,
    /// Carbon-13 gyromagnetic ratio, rad/s/T.
    pub gamma_c: f64,
    /// Register nuclear gyromagnetic ratio magnitude, rad/s/T. Zero turns the
    /// bath into an electron-only channel.
    pub gamma_n: f64,
    /// Electron-register hyperfine coupling, rad/s.
    pub hyperfine_a: f64,
}

impl Default for BathConstants {
    fn default() -> Self {
        Self {
            mu0: 1.256_637_062_12e-6,
            gamma_e: 1.760_859_630_23e11,
            gamma_c: 6.728_284e7,
            gamma_n: 1.933_8e7,
            hyperfine_a: 2.0 * PI * 2.2e6,
        }
    }
}

/// Explicit bath: classical spin positions around the defect.
#[derive(Debug, Clone)]
pub struct BathConfig {
    /// Spin positions relative to the electron, meters.
    pub spins: Vec<[f64; 3]>,
    pub constants: BathConstants,
}

/// How the per-run static detunings are drawn.
#[derive(Debug, Clone)]
pub enum BathMode {
    /// Nuclear phase per interval uniform in [-bath_phase_max, +bath_phase_max].
    UniformBounded,
    /// Nuclear phase per interval normal with the given standard deviation
    /// (radians).
    GaussianSigma(f64),
    /// Detunings computed from random +-1/2 projections of the configured
    /// spins; `bath_phase_max` is ignored in this mode.
    ExplicitBath(BathConfig),
}

/// All noise knobs for one simulation configuration.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    /// Bound on each gate's rotation-angle error, radians.
    pub gate_angle_max: f64,
    /// Bound (or scale) of the nuclear phase accumulated per interval, radians.
    pub bath_phase_max: f64,
    pub bath_mode: BathMode,
    /// When set, the interval's electron phase and the electron-register
    /// cross phase are cancelled.
    pub hahn_echo: bool,
    /// Inter-photon interval, seconds.
    pub tau: f64,
    /// Master seed for derived RNG streams.
    pub seed: u64,
}

impl NoiseModel {
    /// Noise-free model: exact gates, no dephasing.
    pub fn ideal() -> Self {
        Self {
            gate_angle_max: 0.0,
            bath_phase_max: 0.0,
            bath_mode: BathMode::UniformBounded,
            hahn_echo: false,
            tau: 1e-6,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=PI).contains(&self.gate_angle_max) {
            return Err(Error::InvalidConfig(format!(
                "gate_angle_max must lie in [0, pi], got {}",
                self.gate_angle_max
            )));
        }
        if !(0.0..=PI).contains(&self.bath_phase_max) {
            return Err(Error::InvalidConfig(format!(
                "bath_phase_max must lie in [0, pi], got {}",
                self.bath_phase_max
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        match &self.bath_mode {
            BathMode::UniformBounded => {}
            BathMode::GaussianSigma(sigma) => {
                if !(sigma.is_finite() && *sigma >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "gaussian sigma must be non-negative, got {sigma}"
                    )));
                }
            }
            BathMode::ExplicitBath(cfg) => {
                for (i, p) in cfg.spins.iter().enumerate() {
                    let r2: f64 = p.iter().map(|x| x * x).sum();
                    if !(r2 > 0.0 && r2.is_finite()) {
                        return Err(Error::InvalidConfig(format!(
                            "bath spin {i} must sit at a nonzero finite position"
                        )));
                    }
                }
                let c = &cfg.constants;
                for v in [c.mu0, c.gamma_e, c.gamma_c, c.gamma_n, c.hyperfine_a] {
                    if !v.is_finite() {
                        return Err(Error::InvalidConfig(
                            "bath constants must be finite".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Static detunings for one run, rad/s. Constant within a run by the
/// quasi-static bath assumption; independent across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunDisorder {
    pub delta_n: f64,
    pub delta_e: f64,
}

impl RunDisorder {
    pub const NONE: RunDisorder = RunDisorder {
        delta_n: 0.0,
        delta_e: 0.0,
    };
}

/// zz component of the secular dipolar coupling to a spin at `position`:
/// (mu0/4pi) (gamma_e gamma_c / r^3) (1 - 3 (z/r)^2), rad/s.
pub fn dipolar_zz(position: &[f64; 3], constants: &BathConstants) -> f64 {
    let r2: f64 = position.iter().map(|x| x * x).sum();
    let r = r2.sqrt();
    let cos2 = (position[2] / r).powi(2);
    (constants.mu0 / (4.0 * PI)) * constants.gamma_e * constants.gamma_c / (r * r2)
        * (1.0 - 3.0 * cos2)
}

/// Draws the static disorder for one run. Modes whose scale parameter is zero
/// consume no RNG, so ideal configurations stay draw-for-draw reproducible
/// against noisy ones.
pub fn sample_run_disorder<R: Rng>(model: &NoiseModel, rng: &mut R) -> Result<RunDisorder> {
    model.validate()?;
    match &model.bath_mode {
        BathMode::UniformBounded => {
            let phase = if model.bath_phase_max == 0.0 {
                0.0
            } else {
                rng.random_range(-model.bath_phase_max..=model.bath_phase_max)
            };
            Ok(RunDisorder {
                delta_n: phase / model.tau,
                delta_e: 0.0,
            })
        }
        BathMode::GaussianSigma(sigma) => {
            let phase = if *sigma == 0.0 {
                0.0
            } else {
                Normal::new(0.0, *sigma)
                    .map_err(|e| Error::InvalidConfig(format!("gaussian sigma: {e}")))?
                    .sample(rng)
            };
            Ok(RunDisorder {
                delta_n: phase / model.tau,
                delta_e: 0.0,
            })
        }
        BathMode::ExplicitBath(cfg) => {
            let mut delta_e = 0.0;
            for p in &cfg.spins {
                let m: f64 = if rng.random::<bool>() { 0.5 } else { -0.5 };
                delta_e += dipolar_zz(p, &cfg.constants) * m;
            }
            let ratio = if cfg.constants.gamma_e == 0.0 {
                0.0
            } else {
                cfg.constants.gamma_n / cfg.constants.gamma_e
            };
            Ok(RunDisorder {
                delta_n: ratio * delta_e,
                delta_e,
            })
        }
    }
}

fn cross_phase_gate(theta: f64) -> Gate {
    // exp(-i theta Z x Z): diagonal phases by the parity of the two bits
    let minus = Complex64::from_polar(1.0, -theta);
    let plus = Complex64::from_polar(1.0, theta);
    let z = c64(0.0, 0.0);
    Gate::Two(Matrix4::new(
        minus, z, z, z, z, plus, z, z, z, z, plus, z, z, z, z, minus,
    ))
}

/// Free evolution over one inter-photon interval.
///
/// The nuclear spin always picks up its detuning phase (Z-rotation by
/// delta_n * tau). Without the echo the electron picks up its own detuning
/// phase, plus, in explicit-bath mode, the fixed electron-register cross
/// phase of hyperfine_a * tau. The echo cancels both electron-side terms.
pub fn dephase_interval(
    state: &StateVector,
    disorder: &RunDisorder,
    model: &NoiseModel,
) -> Result<StateVector> {
    model.validate()?;
    let mut out = state.apply_gate(
        &Gate::One(gates::rz(disorder.delta_n * model.tau)),
        &[SubsystemLabel::Nuclear],
    )?;
    if !model.hahn_echo {
        out = out.apply_gate(
            &Gate::One(gates::rz(disorder.delta_e * model.tau)),
            &[SubsystemLabel::Electron],
        )?;
        if let BathMode::ExplicitBath(cfg) = &model.bath_mode {
            out = out.apply_gate(
                &cross_phase_gate(cfg.constants.hyperfine_a * model.tau),
                &[SubsystemLabel::Electron, SubsystemLabel::Nuclear],
            )?;
        }
    }
    Ok(out)
}

/// Gates whose implementation rotation can carry an angle error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisyGateKind {
    HadamardE,
    HadamardN,
    ControlledXEn,
    ControlledYEn,
}

/// One angle-error draw, uniform in [-gate_angle_max, +gate_angle_max];
/// consumes no RNG when the bound is zero.
pub fn draw_angle_error<R: Rng>(model: &NoiseModel, rng: &mut R) -> f64 {
    if model.gate_angle_max == 0.0 {
        0.0
    } else {
        rng.random_range(-model.gate_angle_max..=model.gate_angle_max)
    }
}

fn hadamard_with_error(eps: f64) -> Matrix2<Complex64> {
    // H = Ry(pi/2) Z exactly; the implementation error perturbs the rotation
    gates::ry(PI / 2.0 + eps) * gates::pauli_z()
}

fn controlled_rot_with_error(axis_x: bool, eps: f64) -> Matrix4<Complex64> {
    // X = e^{i pi/2} Rx(pi), Y = e^{i pi/2} Ry(pi); the phased rotation keeps
    // the controlled gate exactly CX/CY at eps = 0
    let rot = if axis_x {
        gates::rx(PI + eps)
    } else {
        gates::ry(PI + eps)
    };
    let phased = rot * Complex64::from_polar(1.0, PI / 2.0);
    gates::controlled(&phased)
}

/// The ideal gate with its generating rotation angle offset by `eps`.
pub fn gate_with_angle_error(kind: NoisyGateKind, eps: f64) -> Gate {
    match kind {
        NoisyGateKind::HadamardE | NoisyGateKind::HadamardN => {
            Gate::One(hadamard_with_error(eps))
        }
        NoisyGateKind::ControlledXEn => Gate::Two(controlled_rot_with_error(true, eps)),
        NoisyGateKind::ControlledYEn => Gate::Two(controlled_rot_with_error(false, eps)),
    }
}

/// Samples one noisy application of the given gate.
pub fn noisy_gate<R: Rng>(kind: NoisyGateKind, model: &NoiseModel, rng: &mut R) -> Result<Gate> {
    model.validate()?;
    Ok(gate_with_angle_error(kind, draw_angle_error(model, rng)))
}

/// Parses bath spin positions: one spin per line, `x y z` in nanometers,
/// `#` starts a comment, blank lines ignored. Returns positions in meters.
pub fn spins_from_text(text: &str) -> Result<Vec<[f64; 3]>> {
    let mut spins = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "bath file line {}: expected 3 coordinates, got {}",
                lineno + 1,
                parts.len()
            )));
        }
        let mut p = [0.0; 3];
        for (k, s) in parts.iter().enumerate() {
            p[k] = s.parse::<f64>().map_err(|e| {
                Error::InvalidConfig(format!("bath file line {}: {e}", lineno + 1))
            })? * 1e-9;
        }
        spins.push(p);
    }
    Ok(spins)
}
