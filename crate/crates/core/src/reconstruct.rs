//! Measurement-only reconstruction.
//!
//! Two routes from computational-basis outcome probabilities p(kq|input):
//!
//! - the coherent part of the final-energy statistics for |++⟩, from the
//!   four basis inputs and |++⟩ alone:
//!   p(kq; χ) = p(kq|++) − ¼ Σ_{nm} p(kq|nm);
//! - the full transition tensor T[α][j][i] = ⟨j|V†Π_αV|i⟩ from a protocol of
//!   input states, which then gives ⟨ψ0|V†e^{−H}V|ψ0⟩ for any ψ0 by
//!   post-processing.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::energetics::LocalHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Dim, PureState, C64, I, ONE, ZERO};
use crate::lstsq;
#[allow(unused_imports)]
use num_traits::Float;

/// Labels of the computational basis, in basis order.
pub const BASIS_LABELS: [&str; 4] = ["00", "01", "10", "11"];
pub const PLUS_PLUS: &str = "++";

/// Display scales used to overlay the measured, theoretical and coherence
/// curves of the single-state comparison. Never applied inside kernels.
pub const OVERLAY_SCALES: [f64; 3] = [1.6153, 2.24774, 3.7404];

/// Conditional outcome probabilities p(kq|input), keyed by input label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbabilityTable {
    rows: Vec<(String, [f64; 4])>,
}

/// A non-fatal problem with one table row.
#[derive(Debug, Clone, PartialEq)]
pub enum RowIssue {
    OutOfRange { label: String, outcome: usize, value: f64 },
    NotNormalized { label: String, sum: f64 },
}

impl ProbabilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a row; duplicate labels are rejected.
    pub fn insert(&mut self, label: &str, probs: [f64; 4]) -> Result<()> {
        if self.get(label).is_some() {
            return Err(Error::Validation(format!("duplicate input label '{label}'")));
        }
        self.rows.push((label.to_owned(), probs));
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&[f64; 4]> {
        self.rows.iter().find(|(l, _)| l == label).map(|(_, p)| p)
    }

    pub fn rows(&self) -> &[(String, [f64; 4])] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn require(&self, labels: &[&str]) -> Result<Vec<[f64; 4]>> {
        let missing: Vec<String> = labels
            .iter()
            .filter(|l| self.get(l).is_none())
            .map(|l| (*l).to_owned())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingRows(missing));
        }
        Ok(labels.iter().map(|l| *self.get(l).expect("checked")).collect())
    }

    /// Flags probabilities outside `[−range_eps, 1 + range_eps]` and rows whose
    /// sum is farther than `sum_tol` from 1.
    pub fn check(&self, range_eps: f64, sum_tol: f64) -> Vec<RowIssue> {
        let mut issues = Vec::new();
        for (label, probs) in &self.rows {
            for (outcome, &value) in probs.iter().enumerate() {
                if !(value >= -range_eps && value <= 1.0 + range_eps) {
                    issues.push(RowIssue::OutOfRange {
                        label: label.clone(),
                        outcome,
                        value,
                    });
                }
            }
            let sum: f64 = probs.iter().sum();
            if !((sum - 1.0).abs() <= sum_tol) {
                issues.push(RowIssue::NotNormalized {
                    label: label.clone(),
                    sum,
                });
            }
        }
        issues
    }

    /// Rescales every row to unit sum. Rows summing to zero are left alone.
    pub fn renormalize(&mut self) {
        for (_, probs) in &mut self.rows {
            let sum: f64 = probs.iter().sum();
            if sum > 0.0 {
                probs.iter_mut().for_each(|p| *p /= sum);
            }
        }
    }
}

/// p(kq|input) = |⟨kq|V|input⟩|².
pub fn outcome_probabilities(v: &ComplexMatrix, input: &PureState) -> Result<[f64; 4]> {
    if v.dim() != Dim::Four || input.dim() != Dim::Four {
        return Err(Error::DimensionMismatch(v.n(), input.dim().size()));
    }
    let out = v.apply(input);
    Ok(out.populations())
}

/// Synthetic table for the given labelled inputs.
pub fn synthesize_table(v: &ComplexMatrix, inputs: &[(String, PureState)]) -> Result<ProbabilityTable> {
    let mut table = ProbabilityTable::new();
    for (label, psi) in inputs {
        table.insert(label, outcome_probabilities(v, psi)?)?;
    }
    Ok(table)
}

/// The five inputs used by the single-state χ reconstruction.
pub fn chi_inputs() -> Vec<(String, PureState)> {
    let mut v: Vec<(String, PureState)> = BASIS_LABELS
        .iter()
        .enumerate()
        .map(|(i, l)| ((*l).to_owned(), PureState::basis(Dim::Four, i)))
        .collect();
    v.push((PLUS_PLUS.to_owned(), plus_plus()));
    v
}

pub fn plus_plus() -> PureState {
    PureState::new(&[C64::new(0.5, 0.0); 4]).expect("normalized")
}

/// p(kq; χ) = p(kq|++) − ¼ Σ_{n,m} p(kq|nm), the populations of ℳ(χ) for
/// ρ0 = |++⟩⟨++|.
pub fn chi_populations(table: &ProbabilityTable) -> Result<[f64; 4]> {
    let mut labels = [PLUS_PLUS; 5];
    labels[1..].copy_from_slice(&BASIS_LABELS);
    let rows = table.require(&labels)?;
    let mut out = [0.0; 4];
    for (kq, slot) in out.iter_mut().enumerate() {
        let basis_mean: f64 = rows[1..].iter().map(|r| r[kq]).sum::<f64>() / 4.0;
        *slot = rows[0][kq] - basis_mean;
    }
    Ok(out)
}

/// ⟨ψ0|e^H|ψ0⟩, the initial factor of 𝒢(i).
pub fn initial_moment(psi0: &PureState, h: &LocalHamiltonian) -> f64 {
    let w = h.exp_weights(1.0);
    psi0.populations().iter().zip(w.iter()).map(|(p, w)| p * w).sum()
}

/// 𝒢_χ(i) = initial_moment · Σ_kq e^{−E_kq} p(kq; χ).
pub fn g_chi_from_table(table: &ProbabilityTable, h: &LocalHamiltonian, initial_moment: f64) -> Result<f64> {
    let chi = chi_populations(table)?;
    let w = h.exp_weights(-1.0);
    Ok(initial_moment * chi.iter().zip(w.iter()).map(|(p, w)| p * w).sum::<f64>())
}

/// |𝒢_χ(i; measured) − 𝒢_χ(i; ideal)|.
pub fn eta_kernel_from_tables(
    measured: &ProbabilityTable,
    ideal: &ProbabilityTable,
    h: &LocalHamiltonian,
    initial_moment: f64,
) -> Result<f64> {
    let m = g_chi_from_table(measured, h, initial_moment)?;
    let i = g_chi_from_table(ideal, h, initial_moment)?;
    Ok((m - i).abs())
}

/// Scales a curve so that its largest magnitude is 1. All-zero curves are
/// returned unchanged.
pub fn max_normalize(values: &[f64]) -> Vec<f64> {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        values.to_vec()
    } else {
        values.iter().map(|v| v / max).collect()
    }
}

/// Binomial standard error √(p(1−p)/N) for a probability estimated from
/// `counts` detection events.
pub fn binomial_std_error(p: f64, counts: u64) -> f64 {
    if counts == 0 {
        return f64::INFINITY;
    }
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / counts as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    /// Basis states plus (|i⟩+|j⟩)/√2 and (i|i⟩+|j⟩)/√2 for every pair.
    Straightforward,
    /// Product states only.
    Separable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolState {
    pub label: String,
    pub state: PureState,
    /// Schmidt rank 1 (within 1e-12).
    pub separable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolPlan {
    pub kind: ProtocolKind,
    pub states: Vec<ProtocolState>,
}

impl ProtocolPlan {
    pub fn labelled_states(&self) -> Vec<(String, PureState)> {
        self.states
            .iter()
            .map(|s| (s.label.clone(), s.state))
            .collect()
    }
}

/// True when a two-qubit state factorizes: a00·a11 − a01·a10 = 0.
pub fn is_product_state(psi: &PureState, tol: f64) -> bool {
    let a = psi.amplitudes();
    a.len() == 4 && (a[0] * a[3] - a[1] * a[2]).norm() <= tol
}

/// ½(e^{iγ}|0⟩ + |1⟩) ⊗ (e^{iθ}|0⟩ + |1⟩).
pub fn product_phase_state(gamma: f64, theta: f64) -> PureState {
    let g = C64::from_polar(1.0, gamma);
    let t = C64::from_polar(1.0, theta);
    PureState::new(&[g * t * 0.5, g * 0.5, t * 0.5, C64::new(0.5, 0.0)]).expect("normalized")
}

/// ½(i e^{iθ}|00⟩ + i|01⟩ + e^{iθ}|10⟩ + |11⟩) = ½(i|0⟩+|1⟩) ⊗ (e^{iθ}|0⟩+|1⟩).
pub fn phase_state(theta: f64) -> PureState {
    product_phase_state(FRAC_PI_2, theta)
}

fn two_term(i: usize, ci: C64, j: usize, cj: C64) -> PureState {
    let mut amps = [ZERO; 4];
    amps[i] = ci * FRAC_1_SQRT_2;
    amps[j] = cj * FRAC_1_SQRT_2;
    PureState::new(&amps).expect("normalized")
}

fn entry(label: String, state: PureState) -> ProtocolState {
    ProtocolState {
        label,
        separable: is_product_state(&state, 1e-12),
        state,
    }
}

fn basis_entries() -> Vec<ProtocolState> {
    BASIS_LABELS
        .iter()
        .enumerate()
        .map(|(i, l)| entry((*l).to_owned(), PureState::basis(Dim::Four, i)))
        .collect()
}

/// Labels: `00+01` for (|00⟩+|01⟩)/√2, `i00+01` for (i|00⟩+|01⟩)/√2,
/// `00-i01` for (|00⟩−i|01⟩)/√2.
pub fn protocol_plan(kind: ProtocolKind) -> ProtocolPlan {
    let mut states = basis_entries();
    match kind {
        ProtocolKind::Straightforward => {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let (li, lj) = (BASIS_LABELS[i], BASIS_LABELS[j]);
                    states.push(entry(format!("{li}+{lj}"), two_term(i, ONE, j, ONE)));
                    states.push(entry(format!("i{li}+{lj}"), two_term(i, I, j, ONE)));
                }
            }
        }
        ProtocolKind::Separable => {
            states.extend(literal_separable_superpositions());
            // The |++⟩ row and the θ = π/2 phase state fix the real parts of
            // ⟨00|·|11⟩ and ⟨01|·|10⟩; the last two states fix their imaginary
            // parts, which the other inputs never probe.
            states.push(entry(PLUS_PLUS.to_owned(), plus_plus()));
            states.push(entry("phase_re_diff".to_owned(), phase_state(FRAC_PI_2)));
            states.push(entry("phase_im_sum".to_owned(), phase_state(0.0)));
            states.push(entry(
                "phase_im_diff".to_owned(),
                product_phase_state(0.0, -FRAC_PI_2),
            ));
        }
    }
    ProtocolPlan { kind, states }
}

fn literal_separable_superpositions() -> Vec<ProtocolState> {
    // (|aa⟩+|ab⟩)/√2, (|aa⟩+|ba⟩)/√2 and the −i variants, a ≠ b
    let mut out = Vec::new();
    for (a, b) in [(0usize, 1usize), (1, 0)] {
        let aa = 2 * a + a;
        for other in [2 * a + b, 2 * b + a] {
            let (la, lo) = (BASIS_LABELS[aa], BASIS_LABELS[other]);
            out.push(entry(format!("{la}+{lo}"), two_term(aa, ONE, other, ONE)));
            out.push(entry(format!("{la}-i{lo}"), two_term(aa, ONE, other, -I)));
        }
    }
    out
}

/// The separable list with only the basis states, the eight two-term
/// superpositions, |++⟩ and the θ = π/2 phase state (14 states). It leaves
/// Im⟨00|·|11⟩ and Im⟨01|·|10⟩ undetermined.
pub fn literal_separable_states() -> Vec<ProtocolState> {
    let mut states = basis_entries();
    states.extend(literal_separable_superpositions());
    states.push(entry(PLUS_PLUS.to_owned(), plus_plus()));
    states.push(entry("phase_re_diff".to_owned(), phase_state(FRAC_PI_2)));
    states
}

/// T[α][j][i] = ⟨j|V†Π_αV|i⟩ for the four final projectors Π_α = |α⟩⟨α|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionTensor {
    entries: [[[C64; 4]; 4]; 4],
}

impl TransitionTensor {
    pub fn get(&self, alpha: usize, j: usize, i: usize) -> C64 {
        self.entries[alpha][j][i]
    }

    /// Direct evaluation from a known gate: conj(V_{αj}) V_{αi}.
    pub fn from_gate(v: &ComplexMatrix) -> Self {
        let mut entries = [[[ZERO; 4]; 4]; 4];
        for (alpha, block) in entries.iter_mut().enumerate() {
            for (j, row) in block.iter_mut().enumerate() {
                for (i, slot) in row.iter_mut().enumerate() {
                    *slot = v[(alpha, j)].conj() * v[(alpha, i)];
                }
            }
        }
        Self { entries }
    }

    /// Largest entrywise deviation between two tensors.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for a in 0..4 {
            for j in 0..4 {
                for i in 0..4 {
                    m = m.max((self.entries[a][j][i] - other.entries[a][j][i]).norm());
                }
            }
        }
        m
    }

    /// Max deviation from Σ_α T[α] = I.
    pub fn completeness_deviation(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..4 {
            for i in 0..4 {
                let s: C64 = (0..4).map(|a| self.entries[a][j][i]).sum();
                let target = if i == j { ONE } else { ZERO };
                m = m.max((s - target).norm());
            }
        }
        m
    }
}

/// Result of a tensor reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub tensor: TransitionTensor,
    /// Largest least-squares residual norm over the four projectors.
    pub residual: f64,
    /// Number of table rows used.
    pub equations: usize,
}

const UNKNOWNS: usize = 16;

fn pair_index() -> [(usize, usize); 6] {
    [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
}

fn unknown_name(col: usize) -> String {
    if col < 4 {
        return format!("T[{0}][{0}]", BASIS_LABELS[col]);
    }
    let (k, l) = pair_index()[(col - 4) / 2];
    let part = if (col - 4) % 2 == 0 { "Re" } else { "Im" };
    format!("{part} T[{}][{}]", BASIS_LABELS[k], BASIS_LABELS[l])
}

/// Coefficients of one input's outcome probability in the 16 real unknowns
/// (T_kk, then Re/Im of T[k][l] for k < l):
/// p = Σ_k |a_k|² T_kk + Σ_{k<l} 2 Re(a_k a_l* conj(T[k][l])).
fn design_row(psi: &PureState) -> [f64; UNKNOWNS] {
    let a = psi.amplitudes();
    let mut row = [0.0; UNKNOWNS];
    for k in 0..4 {
        row[k] = a[k].norm_sqr();
    }
    for (p, &(k, l)) in pair_index().iter().enumerate() {
        let c = a[k] * a[l].conj();
        row[4 + 2 * p] = 2.0 * c.re;
        row[4 + 2 * p + 1] = 2.0 * c.im;
    }
    row
}

/// Solves the linear relations between the protocol's outcome tables and the
/// transition tensor. Overdetermined data is resolved by least squares.
pub fn transition_tensor_from_states(
    states: &[(String, PureState)],
    table: &ProbabilityTable,
) -> Result<Reconstruction> {
    let missing: Vec<String> = states
        .iter()
        .filter(|(l, _)| table.get(l).is_none())
        .map(|(l, _)| l.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingRows(missing));
    }
    if states.iter().any(|(_, s)| s.dim() != Dim::Four) {
        return Err(Error::Validation("protocol states must be two-qubit".into()));
    }
    let rows = states.len();
    let design: Vec<f64> = states.iter().flat_map(|(_, s)| design_row(s)).collect();

    let mut entries = [[[ZERO; 4]; 4]; 4];
    let mut residual = 0.0f64;
    for (alpha, block) in entries.iter_mut().enumerate() {
        let b: Vec<f64> = states
            .iter()
            .map(|(l, _)| table.get(l).expect("checked")[alpha])
            .collect();
        let sol = lstsq::solve(&design, rows, UNKNOWNS, &b, 1e-10);
        if !sol.undetermined.is_empty() {
            return Err(Error::Underdetermined(
                sol.undetermined.iter().map(|&c| unknown_name(c)).collect(),
            ));
        }
        residual = residual.max(sol.residual);
        for k in 0..4 {
            block[k][k] = C64::new(sol.x[k], 0.0);
        }
        for (p, &(k, l)) in pair_index().iter().enumerate() {
            let x = C64::new(sol.x[4 + 2 * p], sol.x[4 + 2 * p + 1]);
            block[k][l] = x;
            block[l][k] = x.conj();
        }
    }
    Ok(Reconstruction {
        tensor: TransitionTensor { entries },
        residual,
        equations: rows,
    })
}

pub fn transition_tensor_from_tables(
    plan: &ProtocolPlan,
    table: &ProbabilityTable,
) -> Result<Reconstruction> {
    transition_tensor_from_states(&plan.labelled_states(), table)
}

/// Σ_α e^{−E_α} Σ_{ij} a_i a_j* T[α][j][i] = ⟨ψ0|V†e^{−H}V|ψ0⟩.
pub fn char_fn_from_tensor(psi0: &PureState, t: &TransitionTensor, h: &LocalHamiltonian) -> f64 {
    let a = psi0.amplitudes();
    let w = h.exp_weights(-1.0);
    let mut total = ZERO;
    for (alpha, &weight) in w.iter().enumerate().take(4) {
        let mut s = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                s += a[i] * a[j].conj() * t.entries[alpha][j][i];
            }
        }
        total += s * weight;
    }
    total.re
}
