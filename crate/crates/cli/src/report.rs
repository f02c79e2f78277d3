//! Coherence-vs-θ curves, protocol export and reconstruction reports.

use std::io::Write;

use coherdiag_core::energetics::local_hamiltonian_2q;
use coherdiag_core::gates::{g_gate, v_axis, waveplate_settings};
use coherdiag_core::merit::{kernel, MeritKind};
use coherdiag_core::reconstruct::{
    chi_inputs, chi_populations, g_chi_from_table, initial_moment, max_normalize, plus_plus, protocol_plan,
    synthesize_table, transition_tensor_from_tables, ProbabilityTable, ProtocolKind, BASIS_LABELS,
};
use coherdiag_core::sweep::{fig3_column, Fig3Row, FIG3_INPUTS};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::table::LoadedTable;

fn csv_err(e: csv::Error) -> CliError {
    CliError::io("<output>", e.into())
}

pub fn write_fig3_csv<W: Write>(out: W, rows: &[Fig3Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["theta".to_owned()];
    for input in 0..FIG3_INPUTS.len() {
        for outcome in 0..4 {
            header.push(fig3_column(outcome, input));
        }
    }
    header.extend(
        ["eta_chi", "coherence", "eta_chi_normalized", "coherence_normalized"].map(str::to_owned),
    );
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.theta.to_string()];
        for p in &r.probabilities {
            rec.extend(p.iter().map(f64::to_string));
        }
        rec.extend(
            [r.eta_chi, r.coherence, r.eta_chi_normalized, r.coherence_normalized].map(|v| v.to_string()),
        );
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io("<output>", e))
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig3Json {
    pub theta: f64,
    pub inputs: Vec<String>,
    /// `probabilities[input][outcome]`
    pub probabilities: Vec<[f64; 4]>,
    pub eta_chi: f64,
    pub coherence: f64,
    pub eta_chi_normalized: f64,
    pub coherence_normalized: f64,
}

pub fn fig3_json(rows: &[Fig3Row]) -> Vec<Fig3Json> {
    rows.iter()
        .map(|r| Fig3Json {
            theta: r.theta,
            inputs: FIG3_INPUTS.iter().map(|s| (*s).to_owned()).collect(),
            probabilities: r.probabilities.to_vec(),
            eta_chi: r.eta_chi,
            coherence: r.coherence,
            eta_chi_normalized: r.eta_chi_normalized,
            coherence_normalized: r.coherence_normalized,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanState {
    pub label: String,
    pub separable: bool,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Waveplates {
    pub theta: f64,
    pub phi: f64,
    pub hwp_s1: f64,
    pub hwp_s2: f64,
    pub qwp_s1: f64,
    pub qwp_s2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanExport {
    pub kind: String,
    pub states: Vec<PlanState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub waveplate_settings: Option<Waveplates>,
}

pub fn export_plan(kind: ProtocolKind, gate_angles: Option<(f64, f64)>) -> PlanExport {
    let plan = protocol_plan(kind);
    PlanExport {
        kind: match kind {
            ProtocolKind::Straightforward => "straightforward",
            ProtocolKind::Separable => "separable",
        }
        .to_owned(),
        states: plan
            .states
            .iter()
            .map(|s| PlanState {
                label: s.label.clone(),
                separable: s.separable,
                amplitudes: s.state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
            })
            .collect(),
        waveplate_settings: gate_angles.map(|(theta, phi)| {
            let w = waveplate_settings(theta, phi);
            Waveplates {
                theta,
                phi,
                hwp_s1: w.hwp_s1,
                hwp_s2: w.hwp_s2,
                qwp_s1: w.qwp_s1,
                qwp_s2: w.qwp_s2,
            }
        }),
    }
}

/// Where the no-error reference tables come from.
#[derive(Debug, Clone)]
pub enum IdealSource {
    /// One table per measured table, matched by position.
    Tables(Vec<LoadedTable>),
    /// Synthesized from g_gate(θ) using each measured table's theta tag.
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionRow {
    pub source: String,
    pub theta: Option<f64>,
    pub chi_populations: [f64; 4],
    /// Σ p(kq; χ); zero for consistent data.
    pub chi_sum: f64,
    pub g_chi_measured: f64,
    pub g_chi_ideal: f64,
    pub eta_chi: f64,
    pub eta_chi_normalized: f64,
    /// |C_ℓ1 difference| for |++⟩ under v_axis(θ, φ) vs g_gate(θ).
    pub coherence_theory: Option<f64>,
    pub coherence_normalized: Option<f64>,
    /// Largest |row sum − 1| in the measured table.
    pub max_row_sum_dev: f64,
    pub tensor_plan: Option<String>,
    pub tensor_residual: Option<f64>,
}

fn max_row_sum_dev(t: &ProbabilityTable) -> f64 {
    t.rows()
        .iter()
        .map(|(_, p)| (p.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Reconstructs 𝒢_χ and the η_χ kernel for |++⟩ per measured table. `phi`
/// only enters the theoretical coherence comparison curve.
pub fn run_reconstruction(measured: &[LoadedTable], ideal: &IdealSource, phi: f64) -> Result<Vec<ReconstructionRow>> {
    if let IdealSource::Tables(t) = ideal {
        if t.len() != measured.len() {
            return Err(CliError::Validation(format!(
                "{} measured tables but {} ideal tables",
                measured.len(),
                t.len()
            )));
        }
    }
    let h = local_hamiltonian_2q();
    let psi = plus_plus();
    let moment = initial_moment(&psi, &h);
    let mut rows = Vec::with_capacity(measured.len());
    for (k, m) in measured.iter().enumerate() {
        let with_source = |e: coherdiag_core::Error| CliError::Validation(format!("{}: {e}", m.source));
        let ideal_table = match ideal {
            IdealSource::Tables(t) => t[k].table.clone(),
            IdealSource::Synthetic => {
                let theta = m.theta.ok_or_else(|| {
                    CliError::Validation(format!(
                        "{}: synthetic ideal needs a '# theta = <radians>' comment",
                        m.source
                    ))
                })?;
                synthesize_table(&g_gate(theta), &chi_inputs())?
            }
        };
        let chi = chi_populations(&m.table).map_err(with_source)?;
        let g_m = g_chi_from_table(&m.table, &h, moment).map_err(with_source)?;
        let g_i = g_chi_from_table(&ideal_table, &h, moment).map_err(with_source)?;
        let coherence_theory = match m.theta {
            Some(theta) => Some(kernel(
                MeritKind::CoherenceFidelity,
                &psi,
                &g_gate(theta),
                &v_axis(theta, phi),
                &h,
            )?),
            None => None,
        };
        let mut tensor_plan = None;
        let mut tensor_residual = None;
        for kind in [ProtocolKind::Straightforward, ProtocolKind::Separable] {
            if let Ok(rec) = transition_tensor_from_tables(&protocol_plan(kind), &m.table) {
                tensor_plan = Some(format!("{kind:?}").to_lowercase());
                tensor_residual = Some(rec.residual);
                break;
            }
        }
        rows.push(ReconstructionRow {
            source: m.source.clone(),
            theta: m.theta,
            chi_populations: chi,
            chi_sum: chi.iter().sum(),
            g_chi_measured: g_m,
            g_chi_ideal: g_i,
            eta_chi: (g_m - g_i).abs(),
            eta_chi_normalized: 0.0,
            coherence_theory,
            coherence_normalized: None,
            max_row_sum_dev: max_row_sum_dev(&m.table),
            tensor_plan,
            tensor_residual,
        });
    }
    let eta = max_normalize(&rows.iter().map(|r| r.eta_chi).collect::<Vec<_>>());
    for (r, e) in rows.iter_mut().zip(eta) {
        r.eta_chi_normalized = e;
    }
    if rows.iter().all(|r| r.coherence_theory.is_some()) {
        let coh: Vec<f64> = rows.iter().filter_map(|r| r.coherence_theory).collect();
        for (r, c) in rows.iter_mut().zip(max_normalize(&coh)) {
            r.coherence_normalized = Some(c);
        }
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn write_reconstruction_csv<W: Write>(out: W, rows: &[ReconstructionRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["source".to_owned(), "theta".to_owned()];
    header.extend(BASIS_LABELS.iter().map(|l| format!("p_chi_{l}")));
    header.extend(
        [
            "chi_sum",
            "g_chi_measured",
            "g_chi_ideal",
            "eta_chi",
            "eta_chi_normalized",
            "coherence_theory",
            "coherence_normalized",
            "max_row_sum_dev",
            "tensor_plan",
            "tensor_residual",
        ]
        .map(str::to_owned),
    );
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.source.clone(), opt(r.theta)];
        rec.extend(r.chi_populations.iter().map(f64::to_string));
        rec.extend([
            r.chi_sum.to_string(),
            r.g_chi_measured.to_string(),
            r.g_chi_ideal.to_string(),
            r.eta_chi.to_string(),
            r.eta_chi_normalized.to_string(),
            opt(r.coherence_theory),
            opt(r.coherence_normalized),
            r.max_row_sum_dev.to_string(),
            r.tensor_plan.clone().unwrap_or_default(),
            opt(r.tensor_residual),
        ]);
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io("<output>", e))
}
