//! Parameter grids over (θ, φ) and the preset surfaces.
//!
//! Evaluation is per grid point and deterministic: the average for merit `m`
//! at grid index `g` always uses substream seed
//! `derive_seed(master_seed, [g, m.index()])`, so any scheduling of points
//! gives identical numbers.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};
use core::fmt;
use core::str::FromStr;

use crate::energetics::{local_hamiltonian_2q, LocalHamiltonian};
use crate::error::{Error, Result};
use crate::gates::{g_gate, v_angle, v_axis};
use crate::linalg::ComplexMatrix;
use crate::merit::{haar_average, kernel, HaarAverage, MeritKind, DEFAULT_SAMPLES};
use crate::reconstruct::{chi_inputs, max_normalize, outcome_probabilities, plus_plus};
use crate::rng::derive_seed;

/// Default points per axis.
pub const DEFAULT_RESOLUTION: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorFamily {
    Axis,
    Angle,
}

impl ErrorFamily {
    pub fn name(self) -> &'static str {
        match self {
            ErrorFamily::Axis => "axis",
            ErrorFamily::Angle => "angle",
        }
    }

    pub fn gate(self, theta: f64, phi: f64) -> ComplexMatrix {
        match self {
            ErrorFamily::Axis => v_axis(theta, phi),
            ErrorFamily::Angle => v_angle(theta, phi),
        }
    }

    /// φ ∈ [0, π] for axis errors, [0, 2π] for angle errors.
    pub fn default_phi_bounds(self) -> (f64, f64) {
        match self {
            ErrorFamily::Axis => (0.0, PI),
            ErrorFamily::Angle => (0.0, 2.0 * PI),
        }
    }
}

impl fmt::Display for ErrorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axis" => Ok(ErrorFamily::Axis),
            "angle" => Ok(ErrorFamily::Angle),
            other => Err(Error::Validation(format!(
                "unknown error family '{other}' (expected axis or angle)"
            ))),
        }
    }
}

/// Evenly spaced points on `[lo, hi]`, endpoints included. A single point
/// sits at `lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl AxisRange {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        let r = Self { lo, hi, points };
        r.validate("range")?;
        Ok(r)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Validation(format!("{what} bounds must be finite")));
        }
        if self.points == 0 {
            return Err(Error::Validation(format!("{what} needs at least one point")));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            self.lo
        } else if i + 1 == self.points {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub error_family: ErrorFamily,
    pub theta: AxisRange,
    pub phi: AxisRange,
    pub merits: Vec<MeritKind>,
    pub n_samples: usize,
    pub master_seed: u64,
}

impl SweepConfig {
    /// Full-range grid for the family at the given resolution.
    pub fn new(error_family: ErrorFamily, resolution: usize, merits: Vec<MeritKind>) -> Self {
        let (plo, phi) = error_family.default_phi_bounds();
        Self {
            error_family,
            theta: AxisRange { lo: 0.0, hi: PI, points: resolution },
            phi: AxisRange { lo: plo, hi: phi, points: resolution },
            merits,
            n_samples: DEFAULT_SAMPLES,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.theta.validate("theta")?;
        self.phi.validate("phi")?;
        if self.merits.is_empty() {
            return Err(Error::Validation("at least one merit is required".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::Validation("n_samples must be at least 1".into()));
        }
        let mut seen = self.merits.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.merits.len() {
            return Err(Error::Validation("merits must not repeat".into()));
        }
        Ok(())
    }

    /// Row-major over θ then φ: index = iθ · nφ + iφ.
    pub fn grid_points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.theta.points * self.phi.points);
        for it in 0..self.theta.points {
            for ip in 0..self.phi.points {
                out.push(GridPoint {
                    index: out.len(),
                    theta: self.theta.value(it),
                    phi: self.phi.value(ip),
                });
            }
        }
        out
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self::new(
            ErrorFamily::Axis,
            DEFAULT_RESOLUTION,
            alloc::vec![MeritKind::CoherenceFidelity, MeritKind::EtaChi],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub theta: f64,
    pub phi: f64,
    pub average: HaarAverage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub error_family: ErrorFamily,
    pub master_seed: u64,
    pub n_samples: usize,
    /// Grid order, merits in config order within each point.
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// Means of one merit in grid order.
    pub fn surface(&self, merit: MeritKind) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.average.kind == merit)
            .map(|r| r.average.mean)
            .collect()
    }
}

pub fn point_seed(master_seed: u64, grid_index: usize, merit: MeritKind) -> u64 {
    derive_seed(master_seed, &[grid_index as u64, merit.index()])
}

/// All requested merits at one grid point.
pub fn evaluate_point(config: &SweepConfig, h: &LocalHamiltonian, point: GridPoint) -> Result<Vec<SweepRecord>> {
    let u = g_gate(point.theta);
    let v = config.error_family.gate(point.theta, point.phi);
    config
        .merits
        .iter()
        .map(|&m| {
            let seed = point_seed(config.master_seed, point.index, m);
            let average = haar_average(m, &u, &v, h, config.n_samples, seed)?;
            Ok(SweepRecord { theta: point.theta, phi: point.phi, average })
        })
        .collect()
}

/// Single-threaded sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let h = local_hamiltonian_2q();
    let mut records = Vec::new();
    for p in config.grid_points() {
        records.extend(evaluate_point(config, &h, p)?);
    }
    Ok(SweepResult {
        error_family: config.error_family,
        master_seed: config.master_seed,
        n_samples: config.n_samples,
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fig1Panel {
    A,
    B,
    C,
    D,
}

impl Fig1Panel {
    pub fn family(self) -> ErrorFamily {
        match self {
            Fig1Panel::A | Fig1Panel::B => ErrorFamily::Axis,
            Fig1Panel::C | Fig1Panel::D => ErrorFamily::Angle,
        }
    }

    pub fn merit(self) -> MeritKind {
        match self {
            Fig1Panel::A | Fig1Panel::C => MeritKind::CoherenceFidelity,
            Fig1Panel::B | Fig1Panel::D => MeritKind::EtaChi,
        }
    }
}

impl FromStr for Fig1Panel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Fig1Panel::A),
            "b" | "B" => Ok(Fig1Panel::B),
            "c" | "C" => Ok(Fig1Panel::C),
            "d" | "D" => Ok(Fig1Panel::D),
            other => Err(Error::Validation(format!("unknown panel '{other}'"))),
        }
    }
}

pub fn preset_fig1(panel: Fig1Panel, resolution: usize, n_samples: usize, seed: u64) -> SweepConfig {
    let mut c = SweepConfig::new(panel.family(), resolution, alloc::vec![panel.merit()]);
    c.n_samples = n_samples;
    c.master_seed = seed;
    c
}

/// Input labels of [`Fig3Row::probabilities`], in order.
pub const FIG3_INPUTS: [&str; 5] = ["00", "01", "10", "11", "++"];

/// Default φ of the single-state comparison.
pub const FIG3_PHI: f64 = PI / 9.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Row {
    pub theta: f64,
    /// p(kq|input) for the inputs in [`FIG3_INPUTS`].
    pub probabilities: [[f64; 4]; 5],
    /// |𝒢_χ(i; V) − 𝒢_χ(i; U)| for |++⟩.
    pub eta_chi: f64,
    /// |C_ℓ1(V|++⟩) − C_ℓ1(U|++⟩)|.
    pub coherence: f64,
    pub eta_chi_normalized: f64,
    pub coherence_normalized: f64,
}

/// `points` values of θ on [0, π/4].
pub fn fig3_thetas(points: usize) -> Vec<f64> {
    AxisRange { lo: 0.0, hi: FRAC_PI_4, points: points.max(1) }.values()
}

/// Theory curves for V = v_axis(θ, φ) against U = g_gate(θ).
pub fn preset_fig3(thetas: &[f64], phi: f64) -> Result<Vec<Fig3Row>> {
    let h = local_hamiltonian_2q();
    let psi = plus_plus();
    let inputs = chi_inputs();
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Validation("angles must be finite".into()));
        }
        let u = g_gate(theta);
        let v = v_axis(theta, phi);
        let mut probabilities = [[0.0; 4]; 5];
        for (slot, (_, input)) in probabilities.iter_mut().zip(inputs.iter()) {
            *slot = outcome_probabilities(&v, input)?;
        }
        rows.push(Fig3Row {
            theta,
            probabilities,
            eta_chi: kernel(MeritKind::EtaChi, &psi, &u, &v, &h)?,
            coherence: kernel(MeritKind::CoherenceFidelity, &psi, &u, &v, &h)?,
            eta_chi_normalized: 0.0,
            coherence_normalized: 0.0,
        });
    }
    let eta: Vec<f64> = rows.iter().map(|r| r.eta_chi).collect();
    let coh: Vec<f64> = rows.iter().map(|r| r.coherence).collect();
    for ((r, e), c) in rows.iter_mut().zip(max_normalize(&eta)).zip(max_normalize(&coh)) {
        r.eta_chi_normalized = e;
        r.coherence_normalized = c;
    }
    Ok(rows)
}

/// Label used in tabular output, e.g. `p(10|00)`.
pub fn fig3_column(outcome: usize, input: usize) -> String {
    format!("p({}|{})", crate::reconstruct::BASIS_LABELS[outcome], FIG3_INPUTS[input])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_range_values() {
        let r = AxisRange::new(0.0, 1.0, 5).unwrap();
        assert_eq!(r.values(), [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(AxisRange::new(0.3, 1.0, 1).unwrap().values(), [0.3]);
        assert!(AxisRange::new(0.0, f64::NAN, 3).is_err());
        assert!(AxisRange::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn default_config_matches_figure_ranges() {
        let c = SweepConfig::default();
        assert_eq!((c.theta.points, c.phi.points), (41, 41));
        assert_eq!(c.phi.hi, PI);
        assert_eq!(c.n_samples, 5000);
        let a = SweepConfig::new(ErrorFamily::Angle, 3, alloc::vec![MeritKind::EtaChi]);
        assert_eq!(a.phi.hi, 2.0 * PI);
        assert_eq!(a.grid_points().len(), 9);
        assert_eq!(a.grid_points()[4].index, 4);
    }

    #[test]
    fn null_point_gives_exact_values() {
        let mut c = SweepConfig::new(
            ErrorFamily::Axis,
            1,
            alloc::vec![MeritKind::EtaChi, MeritKind::CoherenceFidelity, MeritKind::Fidelity],
        );
        c.theta = AxisRange::new(0.2, 0.2, 1).unwrap();
        c.n_samples = 200;
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.surface(MeritKind::EtaChi), [0.0]);
        assert_eq!(r.surface(MeritKind::CoherenceFidelity), [0.0]);
        assert_eq!(r.surface(MeritKind::Fidelity), [1.0]);
    }

    #[test]
    fn config_validation() {
        let mut c = SweepConfig::default();
        c.merits.clear();
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.merits.push(MeritKind::EtaChi);
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.n_samples = 0;
        assert!(run_sweep(&c).is_err());
    }

    #[test]
    fn fig1_phi_zero_column_vanishes() {
        for panel in [Fig1Panel::A, Fig1Panel::B, Fig1Panel::C, Fig1Panel::D] {
            let c = preset_fig1(panel, 3, 50, 9);
            let r = run_sweep(&c).unwrap();
            for rec in r.records.iter().filter(|r| r.phi == 0.0) {
                assert_eq!(rec.average.mean, 0.0);
            }
        }
    }

    #[test]
    fn fig3_examples() {
        let rows = preset_fig3(&fig3_thetas(50), FIG3_PHI).unwrap();
        let c = FIG3_PHI.cos().powi(2);
        assert!((rows[0].probabilities[0][2] - c).abs() < 1e-12);
        assert!((c - 0.88302).abs() < 1e-5);
        assert!(rows[49].probabilities[0][2].abs() < 1e-12);
        for r in &rows {
            for p in &r.probabilities {
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            assert!(r.eta_chi_normalized <= 1.0 && r.coherence_normalized <= 1.0);
        }
        assert_eq!(fig3_column(2, 0), "p(10|00)");
    }
}
