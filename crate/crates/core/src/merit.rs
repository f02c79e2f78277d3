//! Per-state kernels for every figure of merit and their Haar averages.
//!
//! Each kernel compares the output of the noisy gate `V` with that of the
//! ideal gate `U` for one pure input |ψ0⟩. The absolute value is taken per
//! sample, before averaging.
//!
//! | kind                 | kernel                                                         |
//! |----------------------|----------------------------------------------------------------|
//! | `Fidelity`           | Tr[(Vρ0V†)(Uρ0U†)]                                             |
//! | `CoherenceFidelity`  | \|C_ℓ1(Vρ0V†) − C_ℓ1(Uρ0U†)\|                                  |
//! | `EtaEpm`             | ⟨e^H⟩ · \|Tr[e^{−H}(Vρ0V† − Uρ0U†)]\|                          |
//! | `EtaP`               | ⟨e^H⟩ · \|Tr[e^{−H}(V𝒫V† − U𝒫U†)]\|                            |
//! | `EtaChi`             | ⟨e^H⟩ · \|Tr[e^{−H}(VχV† − UχU†)]\|                            |
//! | `EtaTpm`             | \|Tr[e^{−H}(V e^H𝒫 V† − U e^H𝒫 U†)]\| (no ⟨e^H⟩ prefactor)     |
//!
//! with ⟨e^H⟩ = ⟨ψ0|e^H|ψ0⟩ and ρ0 = 𝒫 + χ split in the energy basis.

use core::fmt;
use core::str::FromStr;

use alloc::format;
use alloc::string::String;

use crate::energetics::{split_matrix, LocalHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{dm_from_pure, ComplexMatrix, Dim, PureState, C64};
use crate::rng::RngStream;
#[allow(unused_imports)]
use num_traits::Float;

/// Default Monte Carlo sample count per average.
pub const DEFAULT_SAMPLES: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeritKind {
    Fidelity,
    CoherenceFidelity,
    EtaTpm,
    EtaP,
    EtaEpm,
    EtaChi,
}

impl MeritKind {
    pub const ALL: [MeritKind; 6] = [
        MeritKind::Fidelity,
        MeritKind::CoherenceFidelity,
        MeritKind::EtaTpm,
        MeritKind::EtaP,
        MeritKind::EtaEpm,
        MeritKind::EtaChi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeritKind::Fidelity => "fidelity",
            MeritKind::CoherenceFidelity => "coherence_fidelity",
            MeritKind::EtaTpm => "eta_tpm",
            MeritKind::EtaP => "eta_p",
            MeritKind::EtaEpm => "eta_epm",
            MeritKind::EtaChi => "eta_chi",
        }
    }

    /// Stable small integer used when deriving per-merit seeds.
    pub fn index(self) -> u64 {
        match self {
            MeritKind::Fidelity => 0,
            MeritKind::CoherenceFidelity => 1,
            MeritKind::EtaTpm => 2,
            MeritKind::EtaP => 3,
            MeritKind::EtaEpm => 4,
            MeritKind::EtaChi => 5,
        }
    }

    pub fn is_eta(self) -> bool {
        matches!(
            self,
            MeritKind::EtaTpm | MeritKind::EtaP | MeritKind::EtaEpm | MeritKind::EtaChi
        )
    }
}

impl fmt::Display for MeritKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeritKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeritKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown merit kind '{s}'")))
    }
}

/// C_ℓ1[ρ] = Σ_{n≠k} |ρ_nk|.
pub fn l1_coherence(rho: &ComplexMatrix) -> f64 {
    let n = rho.n();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += rho[(r, c)].norm();
            }
        }
    }
    sum
}

fn check_inputs(psi0: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) {
    assert_eq!(psi0.dim(), u.dim(), "state/gate dimension mismatch");
    assert_eq!(u.dim(), v.dim(), "gate dimension mismatch");
}

/// |C_ℓ1(Vρ0V†) − C_ℓ1(Uρ0U†)|.
pub fn kernel_coherence_fid(psi0: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    check_inputs(psi0, u, v);
    let rho = *dm_from_pure(psi0).matrix();
    (l1_coherence(&v.conjugate(&rho)) - l1_coherence(&u.conjugate(&rho))).abs()
}

/// Tr[(Vρ0V†)(Uρ0U†)] = |⟨Uψ0|Vψ0⟩|², normalized by the output norms so
/// that `V == U` gives exactly 1.
pub fn kernel_fidelity(psi0: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    check_inputs(psi0, u, v);
    let out_u = u.apply(psi0);
    let out_v = v.apply(psi0);
    let overlap = out_u.inner(&out_v).norm_sqr();
    let norms = out_u.inner(&out_u).re * out_v.inner(&out_v).re;
    overlap / norms
}

/// Signed, pre-absolute-value η expression:
/// `prefactor · (Tr[e^{−H} V Q V†] − Tr[e^{−H} U Q U†])`.
///
/// For `EtaTpm` the operator is Q = e^H𝒫 and the prefactor is 1; for the
/// other η kinds Q is ρ0, 𝒫 or χ and the prefactor is ⟨e^H⟩.
pub fn eta_signed(
    psi0: &PureState,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    h: &LocalHamiltonian,
    kind: MeritKind,
) -> Result<C64> {
    check_inputs(psi0, u, v);
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch(h.dim().size(), psi0.dim().size()));
    }
    let rho = *dm_from_pure(psi0).matrix();
    let split = split_matrix(&rho);
    let up = h.exp_weights(1.0);
    let down = h.exp_weights(-1.0);
    let mean_exp: f64 = (0..rho.n()).map(|m| rho[(m, m)].re * up[m]).sum();

    let (q, prefactor) = match kind {
        MeritKind::EtaEpm => (rho, mean_exp),
        MeritKind::EtaP => (split.populations, mean_exp),
        MeritKind::EtaChi => (split.chi, mean_exp),
        MeritKind::EtaTpm => {
            let weights = &h.exp_matrix(C64::new(1.0, 0.0));
            (weights * &split.populations, 1.0)
        }
        other => {
            return Err(Error::Validation(format!(
                "'{other}' is not an EPM/TPM kernel"
            )))
        }
    };
    let weighted = |m: &ComplexMatrix| -> C64 {
        (0..m.n()).map(|n| m[(n, n)] * down[n]).sum()
    };
    let diff = weighted(&v.conjugate(&q)) - weighted(&u.conjugate(&q));
    Ok(diff * prefactor)
}

/// Per-state η kernel (absolute value of [`eta_signed`]).
pub fn kernel_eta(
    psi0: &PureState,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    h: &LocalHamiltonian,
    kind: MeritKind,
) -> Result<f64> {
    eta_signed(psi0, u, v, h, kind).map(|z| z.norm())
}

/// Dispatches to the kernel for any merit kind.
pub fn kernel(
    kind: MeritKind,
    psi0: &PureState,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    h: &LocalHamiltonian,
) -> Result<f64> {
    match kind {
        MeritKind::Fidelity => Ok(kernel_fidelity(psi0, u, v)),
        MeritKind::CoherenceFidelity => Ok(kernel_coherence_fid(psi0, u, v)),
        eta => kernel_eta(psi0, u, v, h, eta),
    }
}

/// Coherence kernel with the absolute value pushed inside the sum over
/// input index pairs:
/// `|Σ_{n≠k, m1, m2} (|ρ_{m1m2} V_{n m1} V*_{k m2}| − |ρ_{m1m2} U_{n m1} U*_{k m2}|)|`.
///
/// This is not algebraically equal to [`kernel_coherence_fid`]; it is kept
/// as a diagnostic to quantify the difference.
pub fn coherence_kernel_abs_inside(psi0: &PureState, u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    check_inputs(psi0, u, v);
    let rho = *dm_from_pure(psi0).matrix();
    let d = rho.n();
    let mut sum = 0.0;
    for n in 0..d {
        for k in 0..d {
            if n == k {
                continue;
            }
            for m1 in 0..d {
                for m2 in 0..d {
                    sum += (rho[(m1, m2)] * v[(n, m1)] * v[(k, m2)].conj()).norm()
                        - (rho[(m1, m2)] * u[(n, m1)] * u[(k, m2)].conj()).norm();
                }
            }
        }
    }
    sum.abs()
}

/// Monte Carlo estimate of a Haar-averaged kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarAverage {
    pub kind: MeritKind,
    pub mean: f64,
    /// Sample standard deviation over √n.
    pub std_error: f64,
    pub n_samples: usize,
    pub master_seed: u64,
    pub min: f64,
    pub max: f64,
}

/// Running mean/variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    n: usize,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        if self.n == 1 {
            self.min = x;
            self.max = x;
        } else {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Averages the `kind` kernel over `n_samples` Haar-random inputs; sample
/// `i` is always drawn from substream `(seed, i)`.
pub fn haar_average(
    kind: MeritKind,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    h: &LocalHamiltonian,
    n_samples: usize,
    seed: u64,
) -> Result<HaarAverage> {
    if n_samples == 0 {
        return Err(Error::Validation("n_samples must be at least 1".into()));
    }
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim().size(), v.dim().size()));
    }
    if kind.is_eta() && h.dim() != u.dim() {
        return Err(Error::DimensionMismatch(h.dim().size(), u.dim().size()));
    }
    let dim: Dim = u.dim();
    let mut stats = RunningStats::default();
    for i in 0..n_samples {
        let psi = PureState::haar(&mut RngStream::new(seed, i as u64), dim);
        stats.push(kernel(kind, &psi, u, v, h)?);
    }
    Ok(HaarAverage {
        kind,
        mean: stats.mean(),
        std_error: stats.std_error(),
        n_samples,
        master_seed: seed,
        min: stats.min,
        max: stats.max,
    })
}

/// Human-readable one-line summary.
pub fn describe(avg: &HaarAverage) -> String {
    format!(
        "{}: {:.6} ± {:.6} (n = {}, seed = {})",
        avg.kind, avg.mean, avg.std_error, avg.n_samples, avg.master_seed
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energetics::local_hamiltonian_2q;
    use crate::gates::{g_gate, v_angle, v_axis};
    use crate::linalg::EXACT_TOL;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

    fn basis(i: usize) -> PureState {
        PureState::basis(Dim::Four, i)
    }

    #[test]
    fn l1_examples() {
        let mixed = ComplexMatrix::from_diag(Dim::Four, &[C64::new(0.25, 0.0); 4]);
        assert_eq!(l1_coherence(&mixed), 0.0);
        let plus = ComplexMatrix::from_rows2([[C64::new(0.5, 0.0); 2]; 2]);
        assert_eq!(l1_coherence(&plus), 1.0);
        let pp = dm_from_pure(&PureState::new(&[C64::new(0.5, 0.0); 4]).unwrap());
        assert_eq!(l1_coherence(pp.matrix()), 3.0);
    }

    #[test]
    fn coherence_kernel_examples() {
        let u = g_gate(FRAC_PI_8);
        assert_eq!(kernel_coherence_fid(&basis(0), &u, &u), 0.0);
        let v = v_axis(FRAC_PI_8, FRAC_PI_2);
        assert!((kernel_coherence_fid(&basis(0), &u, &v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_kernel_closed_form_on_basis_input() {
        let phi = 0.7;
        for theta in [0.0, 0.2, 0.5, 0.9, 1.4] {
            let (s2, c2) = (2.0 * theta).sin_cos();
            let (sp, cp) = (phi as f64).sin_cos();
            let noisy = 2.0 * (c2 * cp).abs() * (s2 * s2 * cp * cp + sp * sp).sqrt();
            let ideal = (4.0 * theta).sin().abs();
            let expected = (noisy - ideal).abs();
            let got = kernel_coherence_fid(&basis(0), &g_gate(theta), &v_axis(theta, phi));
            assert!((got - expected).abs() < 1e-12, "theta {theta}: {got} vs {expected}");
        }
    }

    #[test]
    fn fidelity_examples() {
        let u = g_gate(0.0);
        let v = v_axis(0.0, FRAC_PI_2);
        assert_eq!(kernel_fidelity(&basis(0), &u, &u), 1.0);
        assert!(kernel_fidelity(&basis(0), &u, &v) < 1e-30);
        for idx in 0..50 {
            let mut rng = RngStream::new(11, idx);
            let psi = PureState::haar(&mut rng, Dim::Four);
            let theta = rng.uniform() * PI;
            let phi = rng.uniform() * PI;
            let u = g_gate(theta);
            let v = v_axis(theta, phi);
            let rho = *dm_from_pure(&psi).matrix();
            let trace_form = (&v.conjugate(&rho) * &u.conjugate(&rho)).trace().re;
            assert!((kernel_fidelity(&psi, &u, &v) - trace_form).abs() < EXACT_TOL);
        }
    }

    #[test]
    fn eta_rejects_non_eta_kind() {
        let h = local_hamiltonian_2q();
        let u = g_gate(0.3);
        for kind in [MeritKind::Fidelity, MeritKind::CoherenceFidelity] {
            assert!(matches!(
                kernel_eta(&basis(0), &u, &u, &h, kind),
                Err(Error::Validation(_))
            ));
        }
    }

    #[test]
    fn identical_gates_give_null_kernels() {
        let h = local_hamiltonian_2q();
        for idx in 0..20 {
            let mut rng = RngStream::new(12, idx);
            let psi = PureState::haar(&mut rng, Dim::Four);
            let u = g_gate(rng.uniform() * PI);
            for kind in MeritKind::ALL {
                let k = kernel(kind, &psi, &u, &u, &h).unwrap();
                let expected = if kind == MeritKind::Fidelity { 1.0 } else { 0.0 };
                assert_eq!(k, expected, "{kind}");
            }
        }
    }

    #[test]
    fn eta_chi_vanishes_on_diagonal_input() {
        let h = local_hamiltonian_2q();
        for (theta, phi) in [(0.1, 0.4), (1.0, 2.0), (2.5, 5.5)] {
            for v in [v_axis(theta, phi), v_angle(theta, phi)] {
                let k = kernel_eta(&basis(1), &g_gate(theta), &v, &h, MeritKind::EtaChi).unwrap();
                assert_eq!(k, 0.0);
            }
        }
    }

    #[test]
    fn signed_components_add_up() {
        let h = local_hamiltonian_2q();
        for idx in 0..50 {
            let mut rng = RngStream::new(13, idx);
            let psi = PureState::haar(&mut rng, Dim::Four);
            let theta = rng.uniform() * PI;
            let (u, v) = (g_gate(theta), v_angle(theta, rng.uniform() * 2.0 * PI));
            let epm = eta_signed(&psi, &u, &v, &h, MeritKind::EtaEpm).unwrap();
            let p = eta_signed(&psi, &u, &v, &h, MeritKind::EtaP).unwrap();
            let chi = eta_signed(&psi, &u, &v, &h, MeritKind::EtaChi).unwrap();
            assert!((epm - p - chi).norm() < EXACT_TOL);
        }
    }

    #[test]
    fn merit_names_round_trip() {
        for k in MeritKind::ALL {
            assert_eq!(k.name().parse::<MeritKind>().unwrap(), k);
        }
        assert!("eta_xyz".parse::<MeritKind>().is_err());
    }

    #[test]
    fn haar_average_nulls_and_errors() {
        let h = local_hamiltonian_2q();
        let u = g_gate(0.8);
        let avg = haar_average(MeritKind::EtaChi, &u, &v_axis(0.8, 0.0), &h, 300, 1).unwrap();
        assert_eq!((avg.mean, avg.std_error), (0.0, 0.0));
        let avg = haar_average(MeritKind::Fidelity, &u, &u, &h, 300, 1).unwrap();
        assert_eq!((avg.mean, avg.std_error), (1.0, 0.0));
        assert!(haar_average(MeritKind::Fidelity, &u, &u, &h, 0, 1).is_err());
    }

    #[test]
    fn haar_average_is_deterministic_and_bounded() {
        let h = local_hamiltonian_2q();
        let (u, v) = (g_gate(0.4), v_axis(0.4, 0.9));
        let a = haar_average(MeritKind::EtaChi, &u, &v, &h, 500, 77).unwrap();
        let b = haar_average(MeritKind::EtaChi, &u, &v, &h, 500, 77).unwrap();
        assert_eq!(a, b);
        assert!(a.min <= a.mean && a.mean <= a.max);
        assert!(a.std_error > 0.0);
        let single = haar_average(MeritKind::EtaChi, &u, &v, &h, 1, 77).unwrap();
        assert_eq!(single.std_error, 0.0);
        assert_eq!(single.min, single.mean);
    }

    #[test]
    fn abs_inside_comparator_differs_from_main_kernel() {
        let u = g_gate(0.3);
        let v = v_axis(0.3, 0.5);
        let psi = PureState::new(&[C64::new(0.5, 0.0); 4]).unwrap();
        let main = kernel_coherence_fid(&psi, &u, &v);
        let diag = coherence_kernel_abs_inside(&psi, &u, &v);
        assert!(main.is_finite() && diag.is_finite());
        assert_eq!(coherence_kernel_abs_inside(&psi, &u, &u), 0.0);
    }
}
