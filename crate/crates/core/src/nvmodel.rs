//! Emitter physics layer: bright/dark filtering of the electron spin and the
//! absorption-emission event that appends one polarization-entangled photon.
//!
//! The optical cycle is collapsed to its effective action on the ground-state
//! manifold. Only emitted photons join the register; the consumed excitation
//! pulse and the excited states never appear as subsystems. Losses and
//! detector behavior are scalar efficiencies handled in [`crate::stats`].

use crate::error::{Error, Result};
use crate::statevec::{
    c64, Layout, StateVector, SubsystemLabel, PROB_FLOOR, TOL_MATRIX,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::RngExt;
use std::f64::consts::FRAC_1_SQRT_2;

/// Electron bright state (|+1> + |-1>)/sqrt(2): the component the resonant
/// transition keeps cycling.
pub fn bright() -> [Complex64; 2] {
    [c64(FRAC_1_SQRT_2, 0.0), c64(FRAC_1_SQRT_2, 0.0)]
}

/// Electron dark state (|+1> - |-1>)/sqrt(2): shelved, ends the run.
pub fn dark() -> [Complex64; 2] {
    [c64(FRAC_1_SQRT_2, 0.0), c64(-FRAC_1_SQRT_2, 0.0)]
}

/// Outcome of the bright/dark filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterStatus {
    Bright,
    Shelved,
}

/// Result of one filter event. `state` is present only on the bright branch;
/// a shelved electron terminates the run, so no state is carried.
/// `branch_probability` is the Born probability of the branch that was
/// actually realized.
#[derive(Debug, Clone)]
pub struct CycleResult {
    pub status: FilterStatus,
    pub state: Option<StateVector>,
    pub branch_probability: f64,
}

/// Electron in the bright state, nuclear spin in |nuclear_init>.
/// Layout [Electron, Nuclear].
pub fn prepare_initial(nuclear_init: u8) -> Result<StateVector> {
    if nuclear_init > 1 {
        return Err(Error::InvalidConfig(format!(
            "nuclear_init must be 0 or 1, got {nuclear_init}"
        )));
    }
    let layout = Layout::new(vec![SubsystemLabel::Electron, SubsystemLabel::Nuclear])?;
    let b = bright();
    let mut amps = vec![c64(0.0, 0.0); 4];
    // electron owns the most significant bit
    amps[usize::from(nuclear_init)] = b[0];
    amps[2 + usize::from(nuclear_init)] = b[1];
    StateVector::from_amplitudes(layout, amps)
}

/// Born probability of the bright branch.
pub fn bright_probability(state: &StateVector) -> Result<f64> {
    let mut p = DMatrix::zeros(2, 2);
    let b = bright();
    for i in 0..2 {
        for j in 0..2 {
            p[(i, j)] = b[i] * b[j].conj();
        }
    }
    let (prob, _) = state.project(&p, &[SubsystemLabel::Electron])?;
    Ok(prob)
}

/// Projectively measures the electron in the bright/dark basis.
///
/// Dark shelves the electron and ends the run, so the dark branch carries no
/// state. Consumes at most one RNG draw; none when either branch has
/// probability below the floor.
pub fn bright_dark_filter<R: Rng>(state: &StateVector, rng: &mut R) -> Result<CycleResult> {
    let p_b = bright_probability(state)?;
    let pick_bright = if p_b >= 1.0 - PROB_FLOOR {
        true
    } else if p_b < PROB_FLOOR {
        false
    } else {
        rng.random::<f64>() < p_b
    };
    if pick_bright {
        let (p, collapsed) = state.collapse_onto(SubsystemLabel::Electron, &bright())?;
        Ok(CycleResult {
            status: FilterStatus::Bright,
            state: Some(collapsed),
            branch_probability: p,
        })
    } else {
        Ok(CycleResult {
            status: FilterStatus::Shelved,
            state: None,
            branch_probability: 1.0 - p_b,
        })
    }
}

/// The absorption-emission event: maps the electron factor |b> onto the
/// electron-photon Bell pair (|+1>|sigma-> + |-1>|sigma+>)/sqrt(2), appending
/// Photon(new_photon_index) at the end of the layout.
///
/// Requires the state to factor as |b>_e tensor rest within 1e-10; this holds
/// by construction right after a bright filter outcome, and a violation means
/// the protocol sequenced its operations wrongly.
pub fn absorb_emit(state: &StateVector, new_photon_index: u32) -> Result<StateVector> {
    let p_b = bright_probability(state)?;
    if p_b < 1.0 - TOL_MATRIX {
        return Err(Error::NotBrightFactored(p_b));
    }
    let n = state.layout().len();
    let pe = state.layout().position(SubsystemLabel::Electron)?;
    let se = 1usize << (n - 1 - pe);

    let mut labels = state.layout().labels().to_vec();
    labels.push(SubsystemLabel::Photon(new_photon_index));
    let layout = Layout::new(labels)?;

    let dim = state.dim();
    let mut amps = vec![c64(0.0, 0.0); dim * 2];
    let r = c64(FRAC_1_SQRT_2, 0.0);
    for i in 0..dim {
        if i & se != 0 {
            continue;
        }
        // coefficient of |b>_e against the rest-register assignment in i,
        // then redistributed onto the Bell pair: chi/sqrt(2) per branch
        let chi = (state.amplitudes()[i] + state.amplitudes()[i | se]) * r;
        amps[i << 1] = chi * r;
        amps[((i | se) << 1) | 1] = chi * r;
    }
    StateVector::from_amplitudes(layout, amps)
}

/// Re-excitation without mapping the electron onto the nuclear spin first:
/// the filter's bright projection disentangles the existing photons, and the
/// fresh emission entangles the electron with the new photon only.
///
/// Demonstration path; the returned state has the previous photon factored
/// out (Schmidt rank 1 across that cut).
pub fn reexcite_without_cnot(state: &StateVector) -> Result<StateVector> {
    let (_, filtered) = state.collapse_onto(SubsystemLabel::Electron, &bright())?;
    let next = state.layout().photon_count() + 1;
    absorb_emit(&filtered, next)
}
