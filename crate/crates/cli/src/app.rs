//! Command-line definition and dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use coherdiag_core::energetics::local_hamiltonian_2q;
use coherdiag_core::gates::g_gate;
use coherdiag_core::merit::{describe, haar_average, MeritKind, DEFAULT_SAMPLES};
use coherdiag_core::reconstruct::{chi_inputs, protocol_plan, synthesize_table, ProtocolKind};
use coherdiag_core::sweep::{
    fig3_thetas, preset_fig1, preset_fig3, point_seed, AxisRange, ErrorFamily, Fig1Panel, SweepConfig,
    DEFAULT_RESOLUTION,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::report::{
    export_plan, fig3_json, run_reconstruction, write_fig3_csv, write_reconstruction_csv, IdealSource,
};
use crate::sweep::{open_output, run_sweep, write_json, write_sweep, OutputFormat};
use crate::table::{load_probability_table, write_probability_table, LoadOptions};

#[derive(Debug, Parser)]
#[command(name = "coherdiag", version, about = "Coherent-error diagnostics for two-qubit controlled gates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Haar-averaged merits over a (theta, phi) grid.
    Sweep(SweepArgs),
    /// One panel of the coherence-fidelity / eta_chi surfaces.
    Fig1(Fig1Args),
    /// Conditional-probability and single-state kernel curves for v_axis(theta, phi).
    Fig3(Fig3Args),
    /// eta_chi kernels from measured probability tables.
    Reconstruct(ReconstructArgs),
    /// Input states of a tensor-reconstruction protocol.
    Protocol(ProtocolArgs),
    /// Haar averages at a single (theta, phi).
    HaarAvg(HaarAvgArgs),
    /// Synthetic probability table for a gate.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_family, default_value = "axis")]
    pub error: ErrorFamily,
    /// May be repeated; defaults to coherence_fidelity and eta_chi.
    #[arg(long, value_parser = parse_merit)]
    pub merit: Vec<MeritKind>,
    /// `lo:hi`, angles in radians; `pi` multiples allowed (e.g. `0:pi/2`).
    #[arg(long, value_parser = parse_range)]
    pub theta_range: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range)]
    pub phi_range: Option<(f64, f64)>,
    /// Points per axis.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Fig1Args {
    #[arg(long, value_parser = parse_panel)]
    pub panel: Fig1Panel,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Fig3Args {
    /// Number of theta points on [0, pi/4].
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, value_parser = parse_angle, default_value = "pi/9")]
    pub phi: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    /// Measured table CSV; repeat for several theta points.
    #[arg(long, required = true)]
    pub measured: Vec<PathBuf>,
    /// Ideal table CSV, one per measured file. Synthesized from g_gate(theta) when omitted.
    #[arg(long)]
    pub ideal: Vec<PathBuf>,
    /// Error angle of the theoretical coherence comparison curve.
    #[arg(long, value_parser = parse_angle, default_value = "pi/9")]
    pub phi: f64,
    /// Allowed |row sum - 1| before a warning.
    #[arg(long, default_value_t = 0.02)]
    pub sum_tol: f64,
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanKind {
    Straightforward,
    Separable,
}

impl From<PlanKind> for ProtocolKind {
    fn from(k: PlanKind) -> Self {
        match k {
            PlanKind::Straightforward => ProtocolKind::Straightforward,
            PlanKind::Separable => ProtocolKind::Separable,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolArgs {
    #[arg(long, value_enum)]
    pub kind: PlanKind,
    /// Gate angle for the waveplate settings (needs --phi too).
    #[arg(long, value_parser = parse_angle, requires = "phi")]
    pub theta: Option<f64>,
    #[arg(long, value_parser = parse_angle, requires = "theta")]
    pub phi: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HaarAvgArgs {
    #[arg(long, value_parser = parse_angle)]
    pub theta: f64,
    #[arg(long, value_parser = parse_angle)]
    pub phi: f64,
    #[arg(long, value_parser = parse_family, default_value = "axis")]
    pub error: ErrorFamily,
    /// May be repeated; defaults to all merits.
    #[arg(long, value_parser = parse_merit)]
    pub merit: Vec<MeritKind>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthInputs {
    /// 00, 01, 10, 11 and ++.
    Chi,
    Straightforward,
    Separable,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_parser = parse_angle)]
    pub theta: f64,
    /// Error angle; 0 gives the ideal gate.
    #[arg(long, value_parser = parse_angle, default_value = "0")]
    pub phi: f64,
    #[arg(long, value_parser = parse_family, default_value = "axis")]
    pub error: ErrorFamily,
    #[arg(long, value_enum, default_value_t = SynthInputs::Chi)]
    pub inputs: SynthInputs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_family(s: &str) -> std::result::Result<ErrorFamily, String> {
    s.parse().map_err(|e: coherdiag_core::Error| e.to_string())
}

fn parse_merit(s: &str) -> std::result::Result<MeritKind, String> {
    s.parse().map_err(|e: coherdiag_core::Error| e.to_string())
}

fn parse_panel(s: &str) -> std::result::Result<Fig1Panel, String> {
    s.parse().map_err(|e: coherdiag_core::Error| e.to_string())
}

/// A number, or `[k*]pi[/m]` with optional leading minus (`pi/9`, `2pi`, `3*pi/4`).
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("angle must be finite: '{s}'"))
        };
    }
    let bad = || format!("cannot read angle '{s}'");
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let factor = num.trim().strip_suffix("pi").ok_or_else(bad)?;
    let factor = factor.trim().trim_end_matches('*').trim();
    let k = if factor.is_empty() {
        1.0
    } else {
        factor.parse::<f64>().map_err(|_| bad())?
    };
    let v = sign * k * std::f64::consts::PI / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    Ok((parse_angle(lo)?, parse_angle(hi)?))
}

pub fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let merits = if args.merit.is_empty() {
        vec![MeritKind::CoherenceFidelity, MeritKind::EtaChi]
    } else {
        args.merit.clone()
    };
    let mut c = SweepConfig::new(args.error, args.resolution, merits);
    if let Some((lo, hi)) = args.theta_range {
        c.theta = AxisRange::new(lo, hi, args.resolution)?;
    }
    if let Some((lo, hi)) = args.phi_range {
        c.phi = AxisRange::new(lo, hi, args.resolution)?;
    }
    c.n_samples = args.run.samples;
    c.master_seed = args.run.seed;
    c.validate()?;
    Ok(c)
}

fn finish(mut w: Box<dyn Write>, out: Option<&Path>) -> Result<()> {
    w.flush()
        .map_err(|e| CliError::io(out.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf), e))
}

#[derive(Serialize)]
struct HaarAvgJson {
    theta: f64,
    phi: f64,
    error_family: &'static str,
    merit: &'static str,
    mean: f64,
    std_error: f64,
    n_samples: usize,
    seed: u64,
    min: f64,
    max: f64,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => {
            let c = sweep_config(&args)?;
            let r = run_sweep(&c, args.run.workers)?;
            write_sweep(&c, &r, args.run.out.as_deref(), args.run.format)
        }
        Command::Fig1(args) => {
            let c = preset_fig1(args.panel, args.resolution, args.run.samples, args.run.seed);
            c.validate()?;
            let r = run_sweep(&c, args.run.workers)?;
            write_sweep(&c, &r, args.run.out.as_deref(), args.run.format)
        }
        Command::Fig3(args) => {
            if args.points == 0 {
                return Err(CliError::Validation("--points must be at least 1".into()));
            }
            let rows = preset_fig3(&fig3_thetas(args.points), args.phi)?;
            let mut w = open_output(args.out.as_deref())?;
            match args.format {
                OutputFormat::Csv => write_fig3_csv(&mut w, &rows)?,
                OutputFormat::Json => write_json(&mut w, &fig3_json(&rows))?,
            }
            finish(w, args.out.as_deref())
        }
        Command::Reconstruct(args) => {
            let opts = LoadOptions {
                sum_tol: args.sum_tol,
                renormalize: args.renormalize,
                ..LoadOptions::default()
            };
            let load = |paths: &[PathBuf]| -> Result<Vec<_>> {
                paths.iter().map(|p| load_probability_table(p, opts)).collect()
            };
            let measured = load(&args.measured)?;
            let ideal = if args.ideal.is_empty() {
                IdealSource::Synthetic
            } else {
                IdealSource::Tables(load(&args.ideal)?)
            };
            let mut all_warnings: Vec<&String> = measured.iter().flat_map(|t| &t.warnings).collect();
            if let IdealSource::Tables(t) = &ideal {
                all_warnings.extend(t.iter().flat_map(|t| &t.warnings));
            }
            for w in all_warnings {
                eprintln!("warning: {w}");
            }
            let rows = run_reconstruction(&measured, &ideal, args.phi)?;
            let mut w = open_output(args.out.as_deref())?;
            match args.format {
                OutputFormat::Csv => write_reconstruction_csv(&mut w, &rows)?,
                OutputFormat::Json => write_json(&mut w, &rows)?,
            }
            finish(w, args.out.as_deref())
        }
        Command::Protocol(args) => {
            let angles = args.theta.zip(args.phi);
            let export = export_plan(args.kind.into(), angles);
            let mut w = open_output(args.out.as_deref())?;
            write_json(&mut w, &export)?;
            finish(w, args.out.as_deref())
        }
        Command::HaarAvg(args) => {
            let merits = if args.merit.is_empty() {
                MeritKind::ALL.to_vec()
            } else {
                args.merit.clone()
            };
            let h = local_hamiltonian_2q();
            let u = g_gate(args.theta);
            let v = args.error.gate(args.theta, args.phi);
            let mut w = open_output(args.run.out.as_deref())?;
            let mut rows = Vec::new();
            for m in merits {
                let avg = haar_average(m, &u, &v, &h, args.run.samples, point_seed(args.run.seed, 0, m))?;
                rows.push(HaarAvgJson {
                    theta: args.theta,
                    phi: args.phi,
                    error_family: args.error.name(),
                    merit: m.name(),
                    mean: avg.mean,
                    std_error: avg.std_error,
                    n_samples: avg.n_samples,
                    seed: args.run.seed,
                    min: avg.min,
                    max: avg.max,
                });
                if args.run.format == OutputFormat::Csv {
                    eprintln!("{}", describe(&avg));
                }
            }
            match args.run.format {
                OutputFormat::Json => write_json(&mut w, &rows)?,
                OutputFormat::Csv => {
                    let mut cw = csv::Writer::from_writer(&mut w);
                    for r in &rows {
                        cw.serialize(r).map_err(|e| CliError::io("<output>", e.into()))?;
                    }
                    cw.flush().map_err(|e| CliError::io("<output>", e))?;
                }
            }
            finish(w, args.run.out.as_deref())
        }
        Command::Synth(args) => {
            let v = args.error.gate(args.theta, args.phi);
            let inputs = match args.inputs {
                SynthInputs::Chi => chi_inputs(),
                SynthInputs::Straightforward => protocol_plan(ProtocolKind::Straightforward).labelled_states(),
                SynthInputs::Separable => protocol_plan(ProtocolKind::Separable).labelled_states(),
            };
            let table = synthesize_table(&v, &inputs)?;
            let mut w = open_output(args.out.as_deref())?;
            write_probability_table(&mut w, &table, Some(args.theta))?;
            finish(w, args.out.as_deref())
        }
    }
}
