//! Ideal gates, unitary error models and channel wrappers.
//!
//! All two-qubit gates share the controlled structure
//! `σ₊ ⊗ I + σ₋ ⊗ B` with σ± = (σx ± iσy)/2 taken literally, so σ₋|0⟩ = |1⟩:
//! the target block `B` acts when the control starts in |0⟩, and the control
//! is flipped in both branches. Errors only change the target block.

use core::f64::consts::PI;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    identity2, sigma_minus, sigma_plus, sigma_x, sigma_z, tensor, ComplexMatrix, Dim, C64,
};
#[allow(unused_imports)]
use num_traits::Float;

/// Which gate or error family a [`GateSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    R,
    G,
    VAxis,
    VAngle,
}

/// Gate family plus its angles, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub theta: f64,
    /// Error parameter; ignored for `R` and `G`.
    pub phi: f64,
}

impl GateSpec {
    pub fn new(kind: GateKind, theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Validation(alloc::format!(
                "gate angles must be finite (theta={theta}, phi={phi})"
            )));
        }
        Ok(Self { kind, theta, phi })
    }

    /// α = (φ + π)/2, the perturbed half-angle of the rotation-angle error.
    pub fn alpha(&self) -> f64 {
        (self.phi + PI) / 2.0
    }

    /// Ideal rotation axis n = (sin 2θ, 0, cos 2θ).
    pub fn axis(&self) -> [f64; 3] {
        let (s, c) = (2.0 * self.theta).sin_cos();
        [s, 0.0, c]
    }

    /// Tilted axis ñ = (sin 2θ cos φ, sin φ, cos 2θ cos φ).
    pub fn tilted_axis(&self) -> [f64; 3] {
        tilted_axis(self.theta, self.phi)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        match self.kind {
            GateKind::R => r_gate(self.theta),
            GateKind::G => g_gate(self.theta),
            GateKind::VAxis => v_axis(self.theta, self.phi),
            GateKind::VAngle => v_angle(self.theta, self.phi),
        }
    }
}

fn tilted_axis(theta: f64, phi: f64) -> [f64; 3] {
    let (s, c) = (2.0 * theta).sin_cos();
    let (sp, cp) = phi.sin_cos();
    [s * cp, sp, c * cp]
}

/// n·σ for a real axis vector.
fn axis_dot_sigma(n: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = n;
    ComplexMatrix::from_rows2([
        [C64::new(z, 0.0), C64::new(x, -y)],
        [C64::new(x, y), C64::new(-z, 0.0)],
    ])
}

/// `σ₊ ⊗ I + σ₋ ⊗ block`.
pub fn controlled(block: &ComplexMatrix) -> ComplexMatrix {
    let upper = tensor(&sigma_plus(), &identity2()).expect("2x2 factors");
    let lower = tensor(&sigma_minus(), block).expect("2x2 factors");
    &upper + &lower
}

/// The 2×2 target block of a controlled gate (rows/cols |1q⟩ ← |0q'⟩).
pub fn target_block(gate: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(gate.dim(), Dim::Four);
    let mut b = ComplexMatrix::zeros(Dim::Two);
    for r in 0..2 {
        for c in 0..2 {
            b[(r, c)] = gate[(2 + r, c)];
        }
    }
    b
}

/// R(θ) = cos(2θ)σz + sin(2θ)σx, a π rotation about (sin 2θ, 0, cos 2θ).
pub fn r_gate(theta: f64) -> ComplexMatrix {
    let (s, c) = (2.0 * theta).sin_cos();
    &sigma_z().scale(C64::new(c, 0.0)) + &sigma_x().scale(C64::new(s, 0.0))
}

/// G(θ) = σ₊ ⊗ I + σ₋ ⊗ R(θ).
pub fn g_gate(theta: f64) -> ComplexMatrix {
    controlled(&r_gate(theta))
}

/// Rotation-axis error V_axis(θ, φ) = σ₊ ⊗ I + iσ₋ ⊗ R̃_axis with
/// R̃_axis = −i(ñ·σ). The phases cancel, leaving target block ñ·σ.
pub fn v_axis(theta: f64, phi: f64) -> ComplexMatrix {
    controlled(&axis_dot_sigma(tilted_axis(theta, phi)))
}

/// R̃_angle(θ, φ) = i cos(α) I + sin(α) R(θ) with α = (φ + π)/2.
pub fn r_tilde_angle(theta: f64, phi: f64) -> ComplexMatrix {
    // cos α = −sin(φ/2), sin α = cos(φ/2): exact at φ = 0.
    let (half_s, half_c) = (phi / 2.0).sin_cos();
    let cos_alpha = -half_s;
    let sin_alpha = half_c;
    &identity2().scale(C64::new(0.0, cos_alpha)) + &r_gate(theta).scale(C64::new(sin_alpha, 0.0))
}

/// Rotation-angle error V_angle(θ, φ) = σ₊ ⊗ I + σ₋ ⊗ R̃_angle(θ, φ).
pub fn v_angle(theta: f64, phi: f64) -> ComplexMatrix {
    controlled(&r_tilde_angle(theta, phi))
}

/// Completely positive trace-preserving map in Kraus form,
/// ρ ↦ Σ_α K_α ρ K_α†.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: Dim,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates Σ K†K = I within `tol`.
    pub fn new(kraus_ops: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::Validation("channel needs at least one Kraus operator".into()))?;
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for k in &kraus_ops {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch(dim.size(), k.n()));
            }
            sum = &sum + &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > tol {
            return Err(Error::Validation(alloc::format!(
                "Kraus operators are not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(Self { dim, kraus_ops })
    }

    pub fn identity(dim: Dim) -> Self {
        Self {
            dim,
            kraus_ops: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// Applies the map to any operator (density matrix or not).
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for k in &self.kraus_ops {
            out = &out + &k.conjugate(rho);
        }
        out
    }

    /// Σ K†K, which is the identity for a valid channel.
    pub fn completeness(&self) -> ComplexMatrix {
        self.kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim), |acc, k| &acc + &(&k.adjoint() * k))
    }
}

/// Single-Kraus channel ρ ↦ VρV†. `V` must be unitary within 1e-10.
pub fn unitary_channel(v: &ComplexMatrix) -> Result<KrausChannel> {
    let dev = v.unitarity_deviation();
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    Ok(KrausChannel {
        dim: v.dim(),
        kraus_ops: vec![*v],
    })
}

/// Waveplate angles on the signal arm that realize V_axis(θ, φ), in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSettings {
    pub hwp_s1: f64,
    pub hwp_s2: f64,
    pub qwp_s1: f64,
    pub qwp_s2: f64,
}

/// Both HWPs at θ/2 + φ/4; QWPs at φ/2 + π/2 and φ/2.
pub fn waveplate_settings(theta: f64, phi: f64) -> WaveplateSettings {
    let hwp = theta / 2.0 + phi / 4.0;
    WaveplateSettings {
        hwp_s1: hwp,
        hwp_s2: hwp,
        qwp_s1: phi / 2.0 + PI / 2.0,
        qwp_s2: phi / 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sigma_y, PureState, EXACT_TOL, I, ZERO};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

    fn basis4(i: usize) -> PureState {
        PureState::basis(Dim::Four, i)
    }

    #[test]
    fn r_gate_examples() {
        assert!(r_gate(0.0).approx_eq(&sigma_z(), 1e-15));
        assert!(r_gate(FRAC_PI_4).approx_eq(&sigma_x(), 1e-15));
        let h = (&sigma_z() + &sigma_x()).scale(C64::new(FRAC_1_SQRT_2, 0.0));
        assert!(r_gate(FRAC_PI_8).approx_eq(&h, 1e-15));
        let r = r_gate(0.37);
        assert!(r.is_unitary(EXACT_TOL));
        assert!(r.hermiticity_deviation() < EXACT_TOL);
    }

    #[test]
    fn g_gate_examples() {
        // G(0)|00⟩ = |10⟩
        let out = g_gate(0.0).apply(&basis4(0));
        assert_eq!(out, basis4(2));
        for theta in [0.1, 0.7, 2.3] {
            assert!(g_gate(theta).is_unitary(EXACT_TOL));
        }
        // G(π/8)|01⟩ = (|10⟩ − |11⟩)/√2
        let out = g_gate(FRAC_PI_8).apply(&basis4(1));
        let expected = PureState::new(&[
            ZERO,
            ZERO,
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(-FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap();
        for (a, b) in out.amplitudes().iter().zip(expected.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn v_axis_examples() {
        assert!(v_axis(0.37, 0.0).approx_eq(&g_gate(0.37), 1e-14));
        assert_eq!(v_axis(0.37, 0.0), g_gate(0.37));
        let block = target_block(&v_axis(0.0, core::f64::consts::FRAC_PI_2));
        assert!(block.approx_eq(&sigma_y(), 1e-15));
        assert!(v_axis(0.3, 0.7).is_unitary(EXACT_TOL));
    }

    #[test]
    fn v_axis_matches_literal_formula() {
        // σ₊⊗I + iσ₋⊗(−i ñ·σ) built term by term
        let (theta, phi) = (0.61, 1.3);
        let n = tilted_axis(theta, phi);
        let ndots = &(&sigma_x().scale(C64::new(n[0], 0.0)) + &sigma_y().scale(C64::new(n[1], 0.0)))
            + &sigma_z().scale(C64::new(n[2], 0.0));
        let r_tilde = ndots.scale(-I);
        let literal = &tensor(&sigma_plus(), &identity2()).unwrap()
            + &tensor(&sigma_minus(), &r_tilde).unwrap().scale(I);
        assert!(v_axis(theta, phi).approx_eq(&literal, 1e-15));
    }

    #[test]
    fn v_angle_examples() {
        assert!(v_angle(1.1, 0.0).approx_eq(&g_gate(1.1), 1e-14));
        let block = target_block(&v_angle(0.4, PI));
        assert!(block.approx_eq(&identity2().scale(-I), 1e-15));
        assert!(v_angle(0.5, 2.0).is_unitary(EXACT_TOL));
    }

    #[test]
    fn v_angle_matches_literal_formula() {
        let (theta, phi) = (0.23, 2.9);
        let alpha = (phi + PI) / 2.0;
        let literal = &identity2().scale(C64::new(0.0, alpha.cos()))
            + &r_gate(theta).scale(C64::new(alpha.sin(), 0.0));
        assert!(r_tilde_angle(theta, phi).approx_eq(&literal, 1e-15));
        let spec = GateSpec::new(GateKind::VAngle, theta, phi).unwrap();
        assert!((spec.alpha() - alpha).abs() < 1e-15);
    }

    #[test]
    fn errors_only_touch_target_block() {
        for (theta, phi) in [(0.2, 0.4), (1.7, 2.2), (-0.3, 5.0)] {
            let g = g_gate(theta);
            for v in [v_axis(theta, phi), v_angle(theta, phi)] {
                for col in 2..4 {
                    for row in 0..4 {
                        assert_eq!(v[(row, col)], g[(row, col)]);
                    }
                }
            }
        }
    }

    #[test]
    fn r_gate_is_pi_periodic() {
        for theta in [0.0, 0.3, 1.9, -2.2] {
            assert!(r_gate(theta + PI).approx_eq(&r_gate(theta), EXACT_TOL));
        }
    }

    #[test]
    fn unitary_channel_contract() {
        let id = unitary_channel(&ComplexMatrix::identity(Dim::Four)).unwrap();
        let rho = ComplexMatrix::outer(&basis4(1), &basis4(3)).unwrap();
        assert_eq!(id.apply(&rho), rho);

        let g = g_gate(0.2);
        let ch = unitary_channel(&g).unwrap();
        let rho00 = ComplexMatrix::outer(&basis4(0), &basis4(0)).unwrap();
        let out = g.apply(&basis4(0));
        let expected = ComplexMatrix::outer(&out, &out).unwrap();
        assert!(ch.apply(&rho00).approx_eq(&expected, 1e-15));
        assert!(ch
            .completeness()
            .approx_eq(&ComplexMatrix::identity(Dim::Four), EXACT_TOL));

        let not_unitary = ComplexMatrix::identity(Dim::Four).scale(C64::new(1.1, 0.0));
        assert!(matches!(unitary_channel(&not_unitary), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn kraus_channel_validation() {
        let half = C64::new(FRAC_1_SQRT_2, 0.0);
        let dephase = KrausChannel::new(
            vec![identity2().scale(half), sigma_z().scale(half)],
            EXACT_TOL,
        )
        .unwrap();
        let plus = ComplexMatrix::from_rows2([[C64::new(0.5, 0.0); 2]; 2]);
        let out = dephase.apply(&plus);
        assert!(out.approx_eq(&ComplexMatrix::from_diag(Dim::Two, &[C64::new(0.5, 0.0); 2]), 1e-15));
        assert!(KrausChannel::new(vec![identity2(), sigma_z()], EXACT_TOL).is_err());
        assert!(KrausChannel::new(vec![], EXACT_TOL).is_err());
    }

    #[test]
    fn waveplate_examples() {
        let w = waveplate_settings(0.0, 0.0);
        assert_eq!((w.hwp_s1, w.hwp_s2, w.qwp_s1, w.qwp_s2), (0.0, 0.0, PI / 2.0, 0.0));
        let w = waveplate_settings(FRAC_PI_4, PI / 9.0);
        assert!((w.hwp_s1 - (PI / 8.0 + PI / 36.0)).abs() < 1e-15);
        assert_eq!(w.hwp_s1, w.hwp_s2);
        for theta in [0.0, 0.4, 2.0] {
            let w = waveplate_settings(theta, 0.0);
            assert!((w.qwp_s1 - w.qwp_s2 - PI / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gate_spec_rejects_non_finite() {
        assert!(GateSpec::new(GateKind::G, f64::NAN, 0.0).is_err());
        assert!(GateSpec::new(GateKind::VAxis, 0.1, f64::INFINITY).is_err());
        let s = GateSpec::new(GateKind::VAxis, 0.3, 0.0).unwrap();
        assert_eq!(s.matrix(), g_gate(0.3));
        assert_eq!(s.axis(), s.tilted_axis());
    }
}
