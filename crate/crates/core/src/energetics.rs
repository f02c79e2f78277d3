//! End-point-measurement (EPM) energy statistics for a Hamiltonian that is
//! diagonal in the computational basis.
//!
//! The EPM scheme measures energy on ρ0 and, independently, on the evolved
//! state ℳ(ρ0); outcome pairs are drawn from the product of the two
//! marginals, so initial coherences survive into the final statistics.
//! Projectors stay rank-1 per basis state even where levels are degenerate.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gates::KrausChannel;
use crate::linalg::{ComplexMatrix, DensityMatrix, Dim, C64, ZERO};
#[allow(unused_imports)]
use num_traits::Float;

/// Hamiltonian diagonal in the computational basis; `energies[k]` is the
/// eigenvalue of basis state `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalHamiltonian {
    dim: Dim,
    energies: [f64; 4],
}

impl LocalHamiltonian {
    pub fn new(energies: &[f64]) -> Result<Self> {
        let dim = Dim::try_from(energies.len())?;
        let mut e = [0.0; 4];
        e[..energies.len()].copy_from_slice(energies);
        Ok(Self { dim, energies: e })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies[..self.dim.size()]
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.energies()[k]
    }

    /// e^{s·H} evaluated level by level: `exp_weights(-1.0)` gives e^{−H}.
    pub fn exp_weights(&self, s: f64) -> [f64; 4] {
        let mut w = [0.0; 4];
        for (slot, e) in w.iter_mut().zip(self.energies()) {
            *slot = (s * e).exp();
        }
        w
    }

    /// e^{z·H} for complex `z`, as a diagonal matrix.
    pub fn exp_matrix(&self, z: C64) -> ComplexMatrix {
        let mut d = [ZERO; 4];
        for (slot, &e) in d.iter_mut().zip(self.energies()) {
            *slot = (z * e).exp();
        }
        ComplexMatrix::from_diag(self.dim, &d[..self.dim.size()])
    }

    fn check_dim(&self, dim: Dim) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch(self.dim.size(), dim.size()));
        }
        Ok(())
    }
}

/// H = σz ⊗ I + I ⊗ σz: energies (2, 0, 0, −2) on |00⟩, |01⟩, |10⟩, |11⟩.
pub fn local_hamiltonian_2q() -> LocalHamiltonian {
    LocalHamiltonian {
        dim: Dim::Four,
        energies: [2.0, 0.0, 0.0, -2.0],
    }
}

/// ρ0 = 𝒫 + χ with 𝒫 the diagonal in the energy basis and χ the traceless,
/// zero-diagonal coherent remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSplit {
    pub populations: ComplexMatrix,
    pub chi: ComplexMatrix,
}

/// Which part of ρ0 enters the characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Populations,
    Chi,
}

pub fn split_state(rho0: &DensityMatrix, h: &LocalHamiltonian) -> Result<StateSplit> {
    h.check_dim(rho0.dim())?;
    Ok(split_matrix(rho0.matrix()))
}

pub(crate) fn split_matrix(rho: &ComplexMatrix) -> StateSplit {
    let n = rho.n();
    let mut populations = ComplexMatrix::zeros(rho.dim());
    let mut chi = *rho;
    for k in 0..n {
        populations[(k, k)] = rho[(k, k)];
        chi[(k, k)] = ZERO;
    }
    StateSplit { populations, chi }
}

/// One EPM outcome pair: initial level `k`, final level `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpmOutcome {
    pub k: usize,
    pub l: usize,
    /// E_fin^l − E_in^k.
    pub delta_e: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpmDistribution {
    pub outcomes: Vec<EpmOutcome>,
}

impl EpmDistribution {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Σ_outcomes p · e^{iuΔE}.
    pub fn char_fn(&self, u: C64) -> C64 {
        self.outcomes
            .iter()
            .map(|o| (C64::i() * u * o.delta_e).exp() * o.probability)
            .sum()
    }

    /// Marginal over final levels (indexed by initial level).
    pub fn initial_marginal(&self) -> [f64; 4] {
        let mut m = [0.0; 4];
        for o in &self.outcomes {
            m[o.k] += o.probability;
        }
        m
    }

    /// Marginal over initial levels (indexed by final level).
    pub fn final_marginal(&self) -> [f64; 4] {
        let mut m = [0.0; 4];
        for o in &self.outcomes {
            m[o.l] += o.probability;
        }
        m
    }
}

/// p(ΔE_{k,l}) = Tr[Π^k ρ0] · Tr[Π^l ℳ(ρ0)] over all level pairs.
pub fn epm_distribution(
    rho0: &DensityMatrix,
    channel: &KrausChannel,
    h: &LocalHamiltonian,
) -> Result<EpmDistribution> {
    h.check_dim(rho0.dim())?;
    h.check_dim(channel.dim())?;
    let evolved = channel.apply(rho0.matrix());
    let n = h.dim().size();
    let mut outcomes = Vec::with_capacity(n * n);
    for k in 0..n {
        let p_in = rho0.matrix()[(k, k)].re;
        for l in 0..n {
            outcomes.push(EpmOutcome {
                k,
                l,
                delta_e: h.energy(l) - h.energy(k),
                probability: p_in * evolved[(l, l)].re,
            });
        }
    }
    Ok(EpmDistribution { outcomes })
}

/// A characteristic-function evaluation 𝒢(u).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFnValue {
    pub u: C64,
    pub value: C64,
}

/// Tr[e^{−iuH} ρ0], the initial factor of the EPM characteristic function.
pub fn initial_factor(u: C64, rho0: &ComplexMatrix, h: &LocalHamiltonian) -> C64 {
    diag_weighted_trace(&h.exp_matrix(-C64::i() * u), rho0)
}

/// Tr[e^{iuH} X] for the (possibly non-physical) evolved operator X.
fn final_factor(u: C64, evolved: &ComplexMatrix, h: &LocalHamiltonian) -> C64 {
    diag_weighted_trace(&h.exp_matrix(C64::i() * u), evolved)
}

fn diag_weighted_trace(diag: &ComplexMatrix, m: &ComplexMatrix) -> C64 {
    (0..m.n()).map(|k| diag[(k, k)] * m[(k, k)]).sum()
}

/// 𝒢(u) = Tr[e^{−iuH} ρ0] · Tr[e^{iuH} ℳ(ρ0)].
pub fn epm_char_fn(
    u: C64,
    rho0: &DensityMatrix,
    channel: &KrausChannel,
    h: &LocalHamiltonian,
) -> Result<CharFnValue> {
    h.check_dim(rho0.dim())?;
    h.check_dim(channel.dim())?;
    let rho = rho0.matrix();
    let value = initial_factor(u, rho, h) * final_factor(u, &channel.apply(rho), h);
    Ok(CharFnValue { u, value })
}

/// 𝒢_Q(u) = Tr[e^{−iuH} ρ0] · Tr[e^{iuH} ℳ(Q)] for Q = 𝒫 or χ.
pub fn epm_char_fn_component(
    u: C64,
    which: Component,
    rho0: &DensityMatrix,
    channel: &KrausChannel,
    h: &LocalHamiltonian,
) -> Result<CharFnValue> {
    let split = split_state(rho0, h)?;
    h.check_dim(channel.dim())?;
    let q = match which {
        Component::Populations => split.populations,
        Component::Chi => split.chi,
    };
    let value = initial_factor(u, rho0.matrix(), h) * final_factor(u, &channel.apply(&q), h);
    Ok(CharFnValue { u, value })
}
