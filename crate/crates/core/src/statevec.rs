//! Dense complex state vectors and density matrices over labeled two-level
//! subsystems.
//!
//! Amplitude indexing is big-endian in layout order: the first subsystem in
//! the layout owns the most significant bit of the basis index. Bit values
//! follow a fixed convention: electron |+1> = 0, |-1> = 1; nuclear |+1> = 0,
//! |-1> = 1; photon |sigma-> = 0, |sigma+> = 1. Everything downstream (golden
//! files, stabilizer strings, branch corrections) depends on this mapping.
//!
//! All operations are pure: they take `&self` and return fresh values. RNG is
//! always caller-supplied, so threads owning separate streams can share state
//! values freely.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand::RngExt;
use std::fmt::Write as _;

/// Tolerance for algebraic identities (norms, probability sums).
pub const TOL_ALGEBRAIC: f64 = 1e-12;
/// Tolerance for matrix property checks (unitarity, projectors, stabilizers).
pub const TOL_MATRIX: f64 = 1e-10;
/// Eigenvalue floor for positive-semidefiniteness checks.
pub const TOL_EIGEN_FLOOR: f64 = 1e-9;
/// Probabilities below this signal a forbidden branch.
pub const PROB_FLOOR: f64 = 1e-14;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One two-level subsystem of the register.
///
/// Photon indices record emission order and start at 1; the spins carry no
/// index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubsystemLabel {
    Electron,
    Nuclear,
    Photon(u32),
}

impl std::fmt::Display for SubsystemLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubsystemLabel::Electron => write!(f, "e"),
            SubsystemLabel::Nuclear => write!(f, "n"),
            SubsystemLabel::Photon(k) => write!(f, "p{k}"),
        }
    }
}

/// Ordered list of subsystems defining the tensor factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    labels: Vec<SubsystemLabel>,
}

impl Layout {
    /// Validating constructor: at most one electron and one nuclear label,
    /// photon indices unique and contiguous from 1.
    pub fn new(labels: Vec<SubsystemLabel>) -> Result<Self> {
        Self::check_unique(&labels)?;
        let mut photons: Vec<u32> = labels
            .iter()
            .filter_map(|l| match l {
                SubsystemLabel::Photon(k) => Some(*k),
                _ => None,
            })
            .collect();
        photons.sort_unstable();
        for (i, k) in photons.iter().enumerate() {
            if *k != i as u32 + 1 {
                return Err(Error::InvalidLayout(format!(
                    "photon indices must be contiguous from 1, got {photons:?}"
                )));
            }
        }
        Ok(Self { labels })
    }

    /// Marginal layouts (reduced density matrices) keep the original labels,
    /// so photon contiguity is waived; uniqueness still holds.
    pub fn marginal(labels: Vec<SubsystemLabel>) -> Result<Self> {
        Self::check_unique(&labels)?;
        Ok(Self { labels })
    }

    fn check_unique(labels: &[SubsystemLabel]) -> Result<()> {
        if labels.is_empty() {
            return Err(Error::InvalidLayout("layout must be non-empty".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateSubsystem(l.to_string()));
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[SubsystemLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn contains(&self, label: SubsystemLabel) -> bool {
        self.labels.contains(&label)
    }

    pub fn position(&self, label: SubsystemLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| Error::UnknownSubsystem(label.to_string()))
    }

    pub fn photon_count(&self) -> u32 {
        self.labels
            .iter()
            .filter(|l| matches!(l, SubsystemLabel::Photon(_)))
            .count() as u32
    }

    /// Bit stride of the subsystem at `pos`: big-endian, so position 0 is the
    /// most significant bit.
    fn stride(&self, pos: usize) -> usize {
        1 << (self.labels.len() - 1 - pos)
    }
}

/// Pauli operator label, used for corrections and stabilizer strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Matrix2<Complex64> {
        match self {
            Pauli::I => gates::identity(),
            Pauli::X => gates::pauli_x(),
            Pauli::Y => gates::pauli_y(),
            Pauli::Z => gates::pauli_z(),
        }
    }

    pub fn from_char(ch: char) -> Result<Self> {
        match ch {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::InvalidConfig(format!("unknown Pauli letter {ch:?}"))),
        }
    }
}

/// Parses a Pauli string like "XZI" into operator labels.
pub fn pauli_string(s: &str) -> Result<Vec<Pauli>> {
    s.chars().map(Pauli::from_char).collect()
}

/// A 2x2 or 4x4 unitary to apply on one or two subsystems.
///
/// For two-target gates the first target owns the more significant bit of the
/// gate's own index, matching the global big-endian convention.
#[derive(Debug, Clone)]
pub enum Gate {
    One(Matrix2<Complex64>),
    Two(Matrix4<Complex64>),
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::One(_) => 1,
            Gate::Two(_) => 2,
        }
    }

    fn check_unitary(&self) -> Result<()> {
        let dev = match self {
            Gate::One(u) => {
                let d = u.adjoint() * u - Matrix2::identity();
                d.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
            Gate::Two(u) => {
                let d = u.adjoint() * u - Matrix4::identity();
                d.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
        };
        if dev > TOL_MATRIX {
            return Err(Error::NotUnitary { dev });
        }
        Ok(())
    }
}

/// Common fixed gates and rotation generators.
pub mod gates {
    use super::{c64, Matrix2, Matrix4};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn identity() -> Matrix2<Complex64> {
        Matrix2::identity()
    }

    pub fn hadamard() -> Matrix2<Complex64> {
        let s = c64(FRAC_1_SQRT_2, 0.0);
        Matrix2::new(s, s, s, -s)
    }

    pub fn pauli_x() -> Matrix2<Complex64> {
        Matrix2::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0))
    }

    pub fn pauli_y() -> Matrix2<Complex64> {
        Matrix2::new(c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0))
    }

    pub fn pauli_z() -> Matrix2<Complex64> {
        Matrix2::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0))
    }

    /// Rotation about X by `theta`: exp(-i theta X / 2).
    pub fn rx(theta: f64) -> Matrix2<Complex64> {
        let (s, c) = (theta / 2.0).sin_cos();
        Matrix2::new(c64(c, 0.0), c64(0.0, -s), c64(0.0, -s), c64(c, 0.0))
    }

    /// Rotation about Y by `theta`: exp(-i theta Y / 2).
    pub fn ry(theta: f64) -> Matrix2<Complex64> {
        let (s, c) = (theta / 2.0).sin_cos();
        Matrix2::new(c64(c, 0.0), c64(-s, 0.0), c64(s, 0.0), c64(c, 0.0))
    }

    /// Rotation about Z by `theta`: exp(-i theta Z / 2).
    pub fn rz(theta: f64) -> Matrix2<Complex64> {
        let half = theta / 2.0;
        Matrix2::new(
            Complex64::from_polar(1.0, -half),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            Complex64::from_polar(1.0, half),
        )
    }

    /// Controlled-U with the first (more significant) target as control.
    pub fn controlled(u: &Matrix2<Complex64>) -> Matrix4<Complex64> {
        let z = c64(0.0, 0.0);
        let o = c64(1.0, 0.0);
        Matrix4::new(
            o,
            z,
            z,
            z,
            z,
            o,
            z,
            z,
            z,
            z,
            u[(0, 0)],
            u[(0, 1)],
            z,
            z,
            u[(1, 0)],
            u[(1, 1)],
        )
    }
}

/// Pair of orthonormal 2-vectors defining a single-subsystem measurement.
pub type Basis2 = [[Complex64; 2]; 2];

/// Computational (Z) measurement basis.
pub fn z_basis() -> Basis2 {
    [
        [c64(1.0, 0.0), c64(0.0, 0.0)],
        [c64(0.0, 0.0), c64(1.0, 0.0)],
    ]
}

/// Bright/dark (X) measurement basis: outcome 0 is (|0>+|1>)/sqrt(2).
pub fn x_basis() -> Basis2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [c64(s, 0.0), c64(s, 0.0)],
        [c64(s, 0.0), c64(-s, 0.0)],
    ]
}

fn check_basis(basis: &Basis2) -> Result<()> {
    let dot = |a: &[Complex64; 2], b: &[Complex64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    let dev = (dot(&basis[0], &basis[0]).re - 1.0)
        .abs()
        .max((dot(&basis[1], &basis[1]).re - 1.0).abs())
        .max(dot(&basis[0], &basis[1]).norm());
    if dev > TOL_MATRIX {
        return Err(Error::BasisNotOrthonormal { dev });
    }
    Ok(())
}

/// Pure state over a layout of two-level subsystems.
#[derive(Debug, Clone)]
pub struct StateVector {
    layout: Layout,
    amps: Vec<Complex64>,
}

/// Unit basis vector with amplitude 1 at `basis_index`.
pub fn make_basis_state(labels: &[SubsystemLabel], basis_index: usize) -> Result<StateVector> {
    let layout = Layout::new(labels.to_vec())?;
    let dim = layout.dim();
    if basis_index >= dim {
        return Err(Error::IndexOutOfRange {
            index: basis_index,
            dim,
        });
    }
    let mut amps = vec![c64(0.0, 0.0); dim];
    amps[basis_index] = c64(1.0, 0.0);
    Ok(StateVector { layout, amps })
}

impl StateVector {
    /// Builds a state from raw amplitudes; requires the norm to be 1 within
    /// 1e-9 and then normalizes exactly.
    pub fn from_amplitudes(layout: Layout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::InvalidLayout(format!(
                "amplitude count {} does not match dimension {}",
                amps.len(),
                layout.dim()
            )));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm));
        }
        let amps = amps.into_iter().map(|z| z / norm).collect();
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// <self|other>; layouts must match.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_layout(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |<self|other>|^2, the phase-free pure-state fidelity.
    pub fn fidelity_pure(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    fn check_same_layout(&self, other: &StateVector) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!(
                "{:?} vs {:?}",
                self.layout.labels, other.layout.labels
            )));
        }
        Ok(())
    }

    fn target_positions(&self, targets: &[SubsystemLabel]) -> Result<Vec<usize>> {
        let mut seen = Vec::with_capacity(targets.len());
        for t in targets {
            if seen.contains(t) {
                return Err(Error::DuplicateSubsystem(t.to_string()));
            }
            seen.push(*t);
        }
        targets.iter().map(|t| self.layout.position(*t)).collect()
    }

    /// Applies a validated unitary on the given targets, identity elsewhere.
    pub fn apply_gate(&self, gate: &Gate, targets: &[SubsystemLabel]) -> Result<StateVector> {
        if gate.arity() != targets.len() {
            return Err(Error::ArityMismatch {
                arity: gate.arity(),
                targets: targets.len(),
            });
        }
        gate.check_unitary()?;
        let pos = self.target_positions(targets)?;
        let mut out = self.amps.clone();
        match gate {
            Gate::One(u) => {
                let s = self.layout.stride(pos[0]);
                for i in 0..self.dim() {
                    if i & s != 0 {
                        continue;
                    }
                    let j = i | s;
                    let (a0, a1) = (out[i], out[j]);
                    out[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                    out[j] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
                }
            }
            Gate::Two(u) => {
                let s1 = self.layout.stride(pos[0]);
                let s2 = self.layout.stride(pos[1]);
                for i in 0..self.dim() {
                    if i & s1 != 0 || i & s2 != 0 {
                        continue;
                    }
                    let idx = [i, i | s2, i | s1, i | s1 | s2];
                    let a: Vec<Complex64> = idx.iter().map(|&k| out[k]).collect();
                    for (r, &k) in idx.iter().enumerate() {
                        out[k] = (0..4).map(|cidx| u[(r, cidx)] * a[cidx]).sum();
                    }
                }
            }
        }
        Ok(StateVector {
            layout: self.layout.clone(),
            amps: out,
        })
    }

    /// Offsets of every assignment of the given positions (big-endian over
    /// `positions` order); used to address subspaces.
    fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let k = positions.len();
        (0..1usize << k)
            .map(|a| {
                positions
                    .iter()
                    .enumerate()
                    .map(|(q, &p)| ((a >> (k - 1 - q)) & 1) * self.layout.stride(p))
                    .sum()
            })
            .collect()
    }

    fn complement_positions(&self, positions: &[usize]) -> Vec<usize> {
        (0..self.layout.len())
            .filter(|p| !positions.contains(p))
            .collect()
    }

    /// Applies a Hermitian idempotent operator on a subsystem subset and
    /// returns the outcome probability plus the collapsed, renormalized state.
    /// Probabilities below `PROB_FLOOR` yield `None` for the state; the caller
    /// decides whether that branch was forbidden.
    pub fn project(
        &self,
        projector: &DMatrix<Complex64>,
        targets: &[SubsystemLabel],
    ) -> Result<(f64, Option<StateVector>)> {
        let pos = self.target_positions(targets)?;
        let k = pos.len();
        let pdim = 1usize << k;
        if projector.nrows() != pdim || projector.ncols() != pdim {
            return Err(Error::ArityMismatch {
                arity: projector.nrows().trailing_zeros() as usize,
                targets: k,
            });
        }
        let herm_dev = (projector - projector.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let idem_dev = (projector * projector - projector)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let dev = herm_dev.max(idem_dev);
        if dev > TOL_MATRIX {
            return Err(Error::NotProjector { dev });
        }

        let sub_off = self.offsets(&pos);
        let rest_off = self.offsets(&self.complement_positions(&pos));
        let mut out = vec![c64(0.0, 0.0); self.dim()];
        for &r in &rest_off {
            for (a, &oa) in sub_off.iter().enumerate() {
                let mut acc = c64(0.0, 0.0);
                for (ap, &oap) in sub_off.iter().enumerate() {
                    acc += projector[(a, ap)] * self.amps[r + oap];
                }
                out[r + oa] = acc;
            }
        }
        let prob: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        if prob < PROB_FLOOR {
            return Ok((prob, None));
        }
        let scale = prob.sqrt();
        for z in &mut out {
            *z /= scale;
        }
        Ok((
            prob,
            Some(StateVector {
                layout: self.layout.clone(),
                amps: out,
            }),
        ))
    }

    /// Projection onto a single-subsystem vector, unnormalized.
    /// Returns (probability, collapsed amplitudes before renormalization).
    fn project_vector(&self, pos: usize, v: &[Complex64; 2]) -> (f64, Vec<Complex64>) {
        let s = self.layout.stride(pos);
        let mut out = vec![c64(0.0, 0.0); self.dim()];
        let mut prob = 0.0;
        for i in 0..self.dim() {
            if i & s != 0 {
                continue;
            }
            let j = i | s;
            let coeff = v[0].conj() * self.amps[i] + v[1].conj() * self.amps[j];
            prob += coeff.norm_sqr();
            out[i] = v[0] * coeff;
            out[j] = v[1] * coeff;
        }
        (prob, out)
    }

    /// Samples a projective measurement of one subsystem in an orthonormal
    /// basis with Born probabilities. Deterministic given the RNG stream.
    pub fn measure<R: Rng>(
        &self,
        target: SubsystemLabel,
        basis: &Basis2,
        rng: &mut R,
    ) -> Result<(u8, StateVector)> {
        check_basis(basis)?;
        let pos = self.layout.position(target)?;
        let (p0, _) = self.project_vector(pos, &basis[0]);
        let outcome = if p0 >= 1.0 - PROB_FLOOR {
            0
        } else if p0 < PROB_FLOOR {
            1
        } else if rng.random::<f64>() < p0 {
            0
        } else {
            1
        };
        let (p, mut amps) = self.project_vector(pos, &basis[outcome as usize]);
        let scale = p.sqrt();
        for z in &mut amps {
            *z /= scale;
        }
        Ok((
            outcome,
            StateVector {
                layout: self.layout.clone(),
                amps,
            },
        ))
    }

    /// Deterministically collapses one subsystem onto a basis vector,
    /// erroring if that branch has vanishing probability. Used for forced
    /// branch selection in post-selected studies.
    pub fn collapse_onto(&self, target: SubsystemLabel, v: &[Complex64; 2]) -> Result<(f64, StateVector)> {
        let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if (nv - 1.0).abs() > TOL_MATRIX {
            return Err(Error::NotNormalized(nv));
        }
        let pos = self.layout.position(target)?;
        let (p, mut amps) = self.project_vector(pos, v);
        if p < PROB_FLOOR {
            return Err(Error::ForbiddenBranch(p));
        }
        let scale = p.sqrt();
        for z in &mut amps {
            *z /= scale;
        }
        Ok((
            p,
            StateVector {
                layout: self.layout.clone(),
                amps,
            },
        ))
    }

    /// Tensor product with a fresh subsystem appended at the layout end.
    pub fn append_subsystem(
        &self,
        label: SubsystemLabel,
        sub_state: [Complex64; 2],
    ) -> Result<StateVector> {
        let mut labels = self.layout.labels.clone();
        labels.push(label);
        let layout = Layout::new(labels)?;
        let norm = (sub_state[0].norm_sqr() + sub_state[1].norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm));
        }
        let v0 = sub_state[0] / norm;
        let v1 = sub_state[1] / norm;
        let mut amps = Vec::with_capacity(self.dim() * 2);
        for a in &self.amps {
            amps.push(a * v0);
            amps.push(a * v1);
        }
        Ok(StateVector { layout, amps })
    }

    /// Coefficient matrix of the bipartition (partition rows, complement
    /// columns), both sides ordered by layout position.
    fn bipartition_matrix(&self, partition: &[SubsystemLabel]) -> Result<DMatrix<Complex64>> {
        let mut pos = self.target_positions(partition)?;
        if pos.is_empty() || pos.len() == self.layout.len() {
            return Err(Error::BadPartition);
        }
        pos.sort_unstable();
        let rest = self.complement_positions(&pos);
        let row_off = self.offsets(&pos);
        let col_off = self.offsets(&rest);
        let mut m = DMatrix::zeros(row_off.len(), col_off.len());
        for (r, &ro) in row_off.iter().enumerate() {
            for (cc, &co) in col_off.iter().enumerate() {
                m[(r, cc)] = self.amps[ro + co];
            }
        }
        Ok(m)
    }

    /// Singular values of the bipartite coefficient matrix, descending.
    ///
    /// Computed by repeated dominant-factor deflation so every value is
    /// resolved at its own scale; a single Gram spectrum would floor the
    /// small values at the square root of the eigensolver's noise.
    pub fn schmidt_values(&self, partition: &[SubsystemLabel]) -> Result<Vec<f64>> {
        let mut m = self.bipartition_matrix(partition)?;
        let count = m.nrows().min(m.ncols());
        let mut vals = Vec::with_capacity(count);
        for _ in 0..count {
            let (sigma, d) = dominant_row_factor(&m);
            vals.push(sigma);
            deflate_row_factor(&mut m, &d);
        }
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(vals)
    }

    /// Number of singular values above `tol` across the bipartition.
    pub fn schmidt_rank(&self, partition: &[SubsystemLabel], tol: f64) -> Result<usize> {
        Ok(self
            .schmidt_values(partition)?
            .iter()
            .filter(|s| **s > tol)
            .count())
    }

    /// Splits off an exactly factored subset, returning the remaining state
    /// (subset removed from the layout) and the discarded factor's
    /// amplitudes, subset subsystems in layout order.
    ///
    /// Errors with `NotProduct` if the second singular value exceeds 1e-9.
    /// The split's phase gauge is fixed by making the discarded factor's
    /// largest-magnitude amplitude real positive, so the remaining state
    /// keeps the full phase of the original.
    pub fn factor_out(
        &self,
        subset: &[SubsystemLabel],
    ) -> Result<(StateVector, Vec<Complex64>)> {
        let m = self.bipartition_matrix(subset)?;
        // Dominant factor from the Gram matrix (reliable where the general
        // complex SVD is not), then the second singular value measured on
        // the deflated residual so it is resolved at its own scale rather
        // than under the dominant eigenvalue's noise floor.
        let (_, d) = dominant_row_factor(&m);
        let mut kept: Vec<Complex64> = (0..m.ncols())
            .map(|cc| (0..m.nrows()).map(|r| d[r].conj() * m[(r, cc)]).sum())
            .collect();
        let mut residual = m;
        deflate_row_factor(&mut residual, &d);
        let (sigma2, _) = dominant_row_factor(&residual);
        if sigma2 > TOL_EIGEN_FLOOR {
            return Err(Error::NotProduct(sigma2));
        }
        let mut discarded = d;

        // Phase gauge: canonicalize the discarded factor.
        let mut best = 0;
        for (i, z) in discarded.iter().enumerate() {
            if z.norm_sqr() > discarded[best].norm_sqr() + TOL_ALGEBRAIC {
                best = i;
            }
        }
        let phase = discarded[best] / discarded[best].norm();
        for z in &mut discarded {
            *z /= phase;
        }
        for z in &mut kept {
            *z *= phase;
        }
        let norm = kept.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut kept {
            *z /= norm;
        }

        let mut sub_pos = self.target_positions(subset)?;
        sub_pos.sort_unstable();
        let rest_labels: Vec<SubsystemLabel> = self
            .layout
            .labels
            .iter()
            .enumerate()
            .filter(|(p, _)| !sub_pos.contains(p))
            .map(|(_, l)| *l)
            .collect();
        // the remainder is a register fragment, so original labels survive
        // even when that breaks photon contiguity
        let layout = Layout::marginal(rest_labels)?;
        Ok((StateVector { layout, amps: kept }, discarded))
    }

    /// Partial trace onto `keep` (layout order preserved).
    pub fn reduced_density(&self, keep: &[SubsystemLabel]) -> Result<DensityMatrix> {
        let mut pos = self.target_positions(keep)?;
        if pos.is_empty() {
            return Err(Error::BadPartition);
        }
        pos.sort_unstable();
        let keep_labels: Vec<SubsystemLabel> =
            pos.iter().map(|&p| self.layout.labels[p]).collect();
        let keep_off = self.offsets(&pos);
        let rest_off = self.offsets(&self.complement_positions(&pos));
        let d = keep_off.len();
        let mut rho = DMatrix::zeros(d, d);
        for (a, &oa) in keep_off.iter().enumerate() {
            for (b, &ob) in keep_off.iter().enumerate() {
                let mut acc = c64(0.0, 0.0);
                for &r in &rest_off {
                    acc += self.amps[oa + r] * self.amps[ob + r].conj();
                }
                rho[(a, b)] = acc;
            }
        }
        DensityMatrix::new(Layout::marginal(keep_labels)?, rho)
    }

    /// Debug dump: one line per amplitude, `index<TAB>ket<TAB>re<TAB>im` with
    /// 17-significant-digit reals. Ket bits are in layout order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let n = self.layout.len();
        for (i, z) in self.amps.iter().enumerate() {
            let mut ket = String::new();
            for (p, l) in self.layout.labels.iter().enumerate() {
                let bit = (i >> (n - 1 - p)) & 1;
                let _ = write!(ket, "|{bit}>_{l}");
            }
            let _ = writeln!(out, "{i}\t{ket}\t{:.16e}\t{:.16e}", z.re, z.im);
        }
        out
    }
}

/// Dominant singular value of a coefficient matrix with its unit vector on
/// the row side, from the Hermitian Gram matrix on the smaller side. The
/// dominant pair is well conditioned whenever the rest of the spectrum is
/// separated, which is the only case the callers keep.
fn dominant_row_factor(m: &DMatrix<Complex64>) -> (f64, Vec<Complex64>) {
    let rows_small = m.nrows() <= m.ncols();
    let g = if rows_small {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let eig = g.symmetric_eigen();
    let mut first = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[first] {
            first = i;
        }
    }
    let w = eig.eigenvectors.column(first);
    if rows_small {
        let sigma = eig.eigenvalues[first].max(0.0).sqrt();
        (sigma, w.iter().copied().collect())
    } else {
        // carry the column-side vector through the matrix onto the row side
        let mut d: Vec<Complex64> = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|cc| m[(r, cc)] * w[cc]).sum())
            .collect();
        let norm = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            let mut e0 = vec![c64(0.0, 0.0); m.nrows()];
            e0[0] = c64(1.0, 0.0);
            return (0.0, e0);
        }
        for z in &mut d {
            *z /= norm;
        }
        (norm, d)
    }
}

/// Removes the rank-1 component along the unit row vector `d` in place:
/// m <- m - d (d^H m).
fn deflate_row_factor(m: &mut DMatrix<Complex64>, d: &[Complex64]) {
    for cc in 0..m.ncols() {
        let coef: Complex64 = (0..m.nrows()).map(|r| d[r].conj() * m[(r, cc)]).sum();
        for r in 0..m.nrows() {
            let sub = d[r] * coef;
            m[(r, cc)] -= sub;
        }
    }
}

/// Mixed state over a layout; Hermitian with unit trace.
///
/// Construction paths in this crate (pure-state ensembles, partial traces)
/// are positive semidefinite by construction; `min_eigenvalue` exposes the
/// spectral floor for verification against `TOL_EIGEN_FLOOR`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    layout: Layout,
    elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(layout: Layout, elements: DMatrix<Complex64>) -> Result<Self> {
        let dim = layout.dim();
        if elements.nrows() != dim || elements.ncols() != dim {
            return Err(Error::InvalidLayout(format!(
                "matrix is {}x{}, layout dimension is {dim}",
                elements.nrows(),
                elements.ncols()
            )));
        }
        let herm_dev = (&elements - elements.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_dev > TOL_MATRIX {
            return Err(Error::InvalidConfig(format!(
                "density matrix not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let trace_dev = (elements.trace() - c64(1.0, 0.0)).norm();
        if trace_dev > TOL_MATRIX {
            return Err(Error::InvalidConfig(format!(
                "density matrix trace differs from 1 by {trace_dev:.3e}"
            )));
        }
        Ok(Self { layout, elements })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    /// Smallest eigenvalue (real by Hermiticity). O(dim^3).
    pub fn min_eigenvalue(&self) -> f64 {
        self.elements
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// <psi| rho |psi> for a pure target and a mixed state on the same layout.
pub fn fidelity_pure_mixed(ideal: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if ideal.layout() != rho.layout() {
        return Err(Error::LayoutMismatch(format!(
            "{:?} vs {:?}",
            ideal.layout().labels,
            rho.layout().labels
        )));
    }
    let mut acc = c64(0.0, 0.0);
    for i in 0..ideal.dim() {
        for j in 0..ideal.dim() {
            acc += ideal.amplitudes()[i].conj() * rho.elements()[(i, j)] * ideal.amplitudes()[j];
        }
    }
    Ok(acc.re)
}

/// Sum of weighted pure-state projectors. Weights must be non-negative and
/// sum to 1 within 1e-9.
pub fn density_from_ensemble(states: &[(f64, StateVector)]) -> Result<DensityMatrix> {
    if states.is_empty() {
        return Err(Error::InvalidWeights("empty ensemble".into()));
    }
    let mut total = 0.0;
    for (w, _) in states {
        if *w < 0.0 {
            return Err(Error::InvalidWeights(format!("negative weight {w}")));
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    let layout = states[0].1.layout().clone();
    let dim = layout.dim();
    let mut rho = DMatrix::zeros(dim, dim);
    for (w, psi) in states {
        if psi.layout() != &layout {
            return Err(Error::LayoutMismatch(
                "ensemble states have differing layouts".into(),
            ));
        }
        let a = psi.amplitudes();
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] += c64(*w, 0.0) * a[i] * a[j].conj();
            }
        }
    }
    DensityMatrix::new(layout, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e() -> SubsystemLabel {
        SubsystemLabel::Electron
    }
    fn nu() -> SubsystemLabel {
        SubsystemLabel::Nuclear
    }
    fn ph(k: u32) -> SubsystemLabel {
        SubsystemLabel::Photon(k)
    }

    #[test]
    fn basis_state_examples() {
        let s = make_basis_state(&[e()], 0).unwrap();
        assert_eq!(s.amplitudes(), &[c64(1.0, 0.0), c64(0.0, 0.0)]);

        // |-1>_e |-1>_n is index 3 under big-endian bit order
        let s = make_basis_state(&[e(), nu()], 3).unwrap();
        assert_eq!(s.amplitudes()[3], c64(1.0, 0.0));
        assert_eq!(s.amplitudes()[0], c64(0.0, 0.0));

        // photon |sigma+> is bit 1
        let s = make_basis_state(&[ph(1)], 1).unwrap();
        assert_eq!(s.amplitudes()[1], c64(1.0, 0.0));

        assert!(make_basis_state(&[e()], 2).is_err());
    }

    #[test]
    fn layout_rejects_duplicates_and_gaps() {
        assert!(Layout::new(vec![e(), e()]).is_err());
        assert!(Layout::new(vec![ph(2)]).is_err());
        assert!(Layout::new(vec![ph(1), ph(3)]).is_err());
        assert!(Layout::new(vec![e(), nu(), ph(1), ph(2)]).is_ok());
        // marginal layouts keep original labels
        assert!(Layout::marginal(vec![ph(2)]).is_ok());
    }

    #[test]
    fn pauli_x_flips_photon() {
        let s = make_basis_state(&[ph(1)], 0).unwrap();
        let out = s
            .apply_gate(&Gate::One(gates::pauli_x()), &[ph(1)])
            .unwrap();
        assert!((out.amplitudes()[1] - c64(1.0, 0.0)).norm() < TOL_ALGEBRAIC);
    }

    #[test]
    fn hadamard_involution() {
        let s = make_basis_state(&[e(), nu()], 2).unwrap();
        let h = Gate::One(gates::hadamard());
        let once = s
            .apply_gate(&h, &[e()])
            .unwrap()
            .apply_gate(&h, &[nu()])
            .unwrap();
        let twice = once
            .apply_gate(&h, &[e()])
            .unwrap()
            .apply_gate(&h, &[nu()])
            .unwrap();
        for (a, b) in twice.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < TOL_ALGEBRAIC);
        }
    }

    #[test]
    fn cnot_entangles_superposed_electron_with_nuclear() {
        let s = make_basis_state(&[e(), nu()], 0)
            .unwrap()
            .apply_gate(&Gate::One(gates::hadamard()), &[e()])
            .unwrap();
        let cx = Gate::Two(gates::controlled(&gates::pauli_x()));
        let out = s.apply_gate(&cx, &[e(), nu()]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - c64(r, 0.0)).norm() < TOL_ALGEBRAIC);
        assert!((out.amplitudes()[3] - c64(r, 0.0)).norm() < TOL_ALGEBRAIC);
        assert!(out.amplitudes()[1].norm() < TOL_ALGEBRAIC);
        assert!(out.amplitudes()[2].norm() < TOL_ALGEBRAIC);
    }

    #[test]
    fn non_unitary_gate_rejected() {
        let bad = Gate::One(Matrix2::new(
            c64(1.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.5, 0.0),
        ));
        let s = make_basis_state(&[e()], 0).unwrap();
        assert!(matches!(
            s.apply_gate(&bad, &[e()]),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn unknown_target_rejected() {
        let s = make_basis_state(&[e()], 0).unwrap();
        let h = Gate::One(gates::hadamard());
        assert!(matches!(
            s.apply_gate(&h, &[nu()]),
            Err(Error::UnknownSubsystem(_))
        ));
    }

    #[test]
    fn append_examples() {
        let s = make_basis_state(&[e()], 0).unwrap();
        let sub = [c64(1.0, 0.0), c64(0.0, 0.0)];
        let out = s.append_subsystem(ph(1), sub).unwrap();
        assert_eq!(out.layout().labels(), &[e(), ph(1)]);
        assert!((out.amplitudes()[0] - c64(1.0, 0.0)).norm() < TOL_ALGEBRAIC);
        assert!((out.norm() - 1.0).abs() < TOL_ALGEBRAIC);

        // appending then projecting the new subsystem back out is identity
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c64(r, 0.0), c64(r, 0.0)];
        let grown = out.append_subsystem(ph(2), plus).unwrap();
        let mut proj = DMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                proj[(i, j)] = plus[i] * plus[j].conj();
            }
        }
        let (p, collapsed) = grown.project(&proj, &[ph(2)]).unwrap();
        assert!((p - 1.0).abs() < TOL_ALGEBRAIC);
        let collapsed = collapsed.unwrap();
        let (kept, _) = collapsed.factor_out(&[ph(2)]).unwrap();
        for (a, b) in kept.amplitudes().iter().zip(out.amplitudes()) {
            assert!((a - b).norm() < TOL_ALGEBRAIC);
        }

        assert!(out.append_subsystem(ph(1), sub).is_err());
    }

    fn plus_projector() -> DMatrix<Complex64> {
        let mut p = DMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                p[(i, j)] = c64(0.5, 0.0);
            }
        }
        p
    }

    #[test]
    fn project_examples() {
        // |+> on electron: P_+ certain
        let s = make_basis_state(&[e()], 0)
            .unwrap()
            .apply_gate(&Gate::One(gates::hadamard()), &[e()])
            .unwrap();
        let (p, out) = s.project(&plus_projector(), &[e()]).unwrap();
        assert!((p - 1.0).abs() < TOL_ALGEBRAIC);
        assert!(out.is_some());

        // electron-photon Bell pair: P_+ on electron has probability 1/2
        let bell = StateVector::from_amplitudes(
            Layout::new(vec![e(), ph(1)]).unwrap(),
            vec![
                c64(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let (p, _) = bell.project(&plus_projector(), &[e()]).unwrap();
        assert!((p - 0.5).abs() < TOL_ALGEBRAIC);

        // identity projector returns the input
        let (p, out) = bell.project(&DMatrix::identity(2, 2), &[e()]).unwrap();
        assert!((p - 1.0).abs() < TOL_ALGEBRAIC);
        for (a, b) in out.unwrap().amplitudes().iter().zip(bell.amplitudes()) {
            assert!((a - b).norm() < TOL_ALGEBRAIC);
        }

        // complementary projectors: probabilities sum to 1
        let minus = DMatrix::identity(2, 2) - plus_projector();
        let (pm, _) = bell.project(&minus, &[e()]).unwrap();
        assert!((p.min(1.0) - 1.0).abs() < TOL_ALGEBRAIC || (0.5 + pm - 1.0).abs() < TOL_ALGEBRAIC);

        // non-projector rejected
        let half = DMatrix::from_diagonal_element(2, 2, c64(0.5, 0.0));
        assert!(matches!(
            bell.project(&half, &[e()]),
            Err(Error::NotProjector { .. })
        ));
    }

    #[test]
    fn measure_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);

        // |-1>_n measured in Z gives outcome 1 with certainty
        let s = make_basis_state(&[nu()], 1).unwrap();
        let (o, _) = s.measure(nu(), &z_basis(), &mut rng).unwrap();
        assert_eq!(o, 1);

        // measuring the nuclear half of a Bell-type state: both outcomes 1/2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(
            Layout::new(vec![nu(), ph(1)]).unwrap(),
            vec![c64(r, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(r, 0.0)],
        )
        .unwrap();
        let z0 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c64(1.0, 0.0),
            c64(0.0, 0.0),
        ]));
        let (p0, _) = bell.project(&z0, &[nu()]).unwrap();
        assert!((p0 - 0.5).abs() < TOL_ALGEBRAIC);

        // Born statistics at 1e4 seeded trials on |+>
        let plus = make_basis_state(&[e()], 0)
            .unwrap()
            .apply_gate(&Gate::One(gates::hadamard()), &[e()])
            .unwrap();
        let mut ones = 0u32;
        for _ in 0..10_000 {
            let (o, _) = plus.measure(e(), &z_basis(), &mut rng).unwrap();
            ones += u32::from(o);
        }
        let freq = f64::from(ones) / 10_000.0;
        assert!((0.47..=0.53).contains(&freq), "freq {freq}");
    }

    #[test]
    fn fidelity_pure_mixed_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let layout = Layout::new(vec![ph(1), ph(2)]).unwrap();
        let psi = StateVector::from_amplitudes(
            layout.clone(),
            vec![c64(r, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(r, 0.0)],
        )
        .unwrap();
        let rho = density_from_ensemble(&[(1.0, psi.clone())]).unwrap();
        assert!((fidelity_pure_mixed(&psi, &rho).unwrap() - 1.0).abs() < TOL_ALGEBRAIC);

        // maximally mixed on 2 subsystems gives 1/4
        let mixed = DensityMatrix::new(
            layout.clone(),
            DMatrix::from_diagonal_element(4, 4, c64(0.25, 0.0)),
        )
        .unwrap();
        assert!((fidelity_pure_mixed(&psi, &mixed).unwrap() - 0.25).abs() < TOL_ALGEBRAIC);

        // cos^2 eta mixture of a state and an orthogonal partner
        let eta = 10f64.to_radians();
        let perp = StateVector::from_amplitudes(
            layout,
            vec![c64(0.0, 0.0), c64(r, 0.0), c64(r, 0.0), c64(0.0, 0.0)],
        )
        .unwrap();
        let rho = density_from_ensemble(&[
            (eta.cos().powi(2), psi.clone()),
            (eta.sin().powi(2), perp),
        ])
        .unwrap();
        let f = fidelity_pure_mixed(&psi, &rho).unwrap();
        assert!((f - eta.cos().powi(2)).abs() < TOL_ALGEBRAIC);
        assert!((f - 0.9698463103929542).abs() < 1e-12);
    }

    #[test]
    fn density_from_ensemble_examples() {
        // equal mix of the two photon polarizations is maximally mixed
        let a = make_basis_state(&[ph(1)], 0).unwrap();
        let b = make_basis_state(&[ph(1)], 1).unwrap();
        let rho = density_from_ensemble(&[(0.5, a.clone()), (0.5, b)]).unwrap();
        assert!((rho.elements()[(0, 0)] - c64(0.5, 0.0)).norm() < TOL_ALGEBRAIC);
        assert!((rho.elements()[(1, 1)] - c64(0.5, 0.0)).norm() < TOL_ALGEBRAIC);
        assert!(rho.elements()[(0, 1)].norm() < TOL_ALGEBRAIC);
        assert!(rho.min_eigenvalue() > -TOL_EIGEN_FLOOR);

        // weight validation
        assert!(density_from_ensemble(&[(0.7, a.clone())]).is_err());
        assert!(density_from_ensemble(&[(-0.5, a.clone()), (1.5, a)]).is_err());
    }

    #[test]
    fn ensemble_of_identical_states_is_projector() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_amplitudes(
            Layout::new(vec![e()]).unwrap(),
            vec![c64(r, 0.0), c64(0.0, r)],
        )
        .unwrap();
        let copies: Vec<(f64, StateVector)> = (0..4).map(|_| (0.25, psi.clone())).collect();
        let rho = density_from_ensemble(&copies).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = psi.amplitudes()[i] * psi.amplitudes()[j].conj();
                assert!((rho.elements()[(i, j)] - expect).norm() < TOL_ALGEBRAIC);
            }
        }
    }

    #[test]
    fn schmidt_examples() {
        // product state: rank 1
        let s = make_basis_state(&[e(), ph(1)], 0)
            .unwrap()
            .apply_gate(&Gate::One(gates::hadamard()), &[e()])
            .unwrap();
        assert_eq!(s.schmidt_rank(&[e()], 1e-9).unwrap(), 1);

        // Bell state: rank 2
        let cx = Gate::Two(gates::controlled(&gates::pauli_x()));
        let bell = s.apply_gate(&cx, &[e(), ph(1)]).unwrap();
        assert_eq!(bell.schmidt_rank(&[e()], 1e-9).unwrap(), 2);
        let vals = bell.schmidt_values(&[e()]).unwrap();
        assert!((vals[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < TOL_ALGEBRAIC);

        // degenerate partitions rejected
        assert!(bell.schmidt_values(&[]).is_err());
        assert!(bell.schmidt_values(&[e(), ph(1)]).is_err());
    }

    #[test]
    fn factor_out_splits_products_and_rejects_entanglement() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = make_basis_state(&[e(), nu(), ph(1)], 0)
            .unwrap()
            .apply_gate(&Gate::One(gates::hadamard()), &[nu()])
            .unwrap()
            .apply_gate(
                &Gate::Two(gates::controlled(&gates::pauli_x())),
                &[nu(), ph(1)],
            )
            .unwrap();
        // electron factors out; nuclear-photon pair stays entangled
        let (kept, dropped) = s.factor_out(&[e()]).unwrap();
        assert_eq!(kept.layout().labels(), &[nu(), ph(1)]);
        assert!((dropped[0].re - 1.0).abs() < TOL_ALGEBRAIC);
        assert!((kept.amplitudes()[0] - c64(r, 0.0)).norm() < TOL_ALGEBRAIC);
        assert!((kept.amplitudes()[3] - c64(r, 0.0)).norm() < TOL_ALGEBRAIC);

        assert!(matches!(
            s.factor_out(&[nu()]),
            Err(Error::NotProduct(_))
        ));
    }

    #[test]
    fn factor_out_gauge_keeps_relative_phase() {
        // (|0> + i|1>)_e x |1>_p: the kept photon state must stay |1> and the
        // electron factor keeps its own relative phase
        let s = StateVector::from_amplitudes(
            Layout::new(vec![e(), ph(1)]).unwrap(),
            vec![
                c64(0.0, 0.0),
                c64(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c64(0.0, 0.0),
                c64(0.0, std::f64::consts::FRAC_1_SQRT_2),
            ],
        )
        .unwrap();
        let (kept, dropped) = s.factor_out(&[e()]).unwrap();
        assert!((kept.amplitudes()[1] - c64(1.0, 0.0)).norm() < TOL_ALGEBRAIC);
        let ratio = dropped[1] / dropped[0];
        assert!((ratio - c64(0.0, 1.0)).norm() < TOL_ALGEBRAIC);
    }

    #[test]
    fn reduced_density_marginals() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(
            Layout::new(vec![e(), ph(1)]).unwrap(),
            vec![c64(r, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(r, 0.0)],
        )
        .unwrap();
        let rho = bell.reduced_density(&[ph(1)]).unwrap();
        assert!((rho.elements()[(0, 0)] - c64(0.5, 0.0)).norm() < TOL_ALGEBRAIC);
        assert!(rho.elements()[(0, 1)].norm() < TOL_ALGEBRAIC);
    }

    #[test]
    fn dump_is_stable() {
        let s = make_basis_state(&[e(), ph(1)], 2).unwrap();
        let text = s.dump();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], "2\t|1>_e|0>_p1\t1.0000000000000000e0\t0.0000000000000000e0");
    }

    #[test]
    fn pauli_string_parsing() {
        let ps = pauli_string("XZI").unwrap();
        assert_eq!(ps, vec![Pauli::X, Pauli::Z, Pauli::I]);
        assert!(pauli_string("XQ").is_err());
    }
}
