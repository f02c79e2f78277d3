//! Parallel grid evaluation and sweep output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use coherdiag_core::energetics::local_hamiltonian_2q;
use coherdiag_core::merit::HaarAverage;
use coherdiag_core::sweep::{evaluate_point, AxisRange, SweepConfig, SweepResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Evaluates every grid point on `workers` threads (0 = one per core).
/// Output order and values do not depend on the worker count.
pub fn run_sweep(config: &SweepConfig, workers: usize) -> Result<SweepResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))?;
    let h = local_hamiltonian_2q();
    let points = config.grid_points();
    let per_point: Vec<_> = pool.install(|| {
        points
            .par_iter()
            .map(|&p| evaluate_point(config, &h, p))
            .collect::<coherdiag_core::Result<Vec<_>>>()
    })?;
    Ok(SweepResult {
        error_family: config.error_family,
        master_seed: config.master_seed,
        n_samples: config.n_samples,
        records: per_point.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeMeta {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl From<AxisRange> for RangeMeta {
    fn from(r: AxisRange) -> Self {
        Self {
            lo: r.lo,
            hi: r.hi,
            points: r.points,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadata {
    pub version: String,
    pub error_family: String,
    pub ideal_gate: String,
    pub master_seed: u64,
    pub n_samples: usize,
    pub theta: RangeMeta,
    pub phi: RangeMeta,
    pub merits: Vec<String>,
    pub substream: String,
}

impl SweepMetadata {
    pub fn new(config: &SweepConfig) -> Self {
        Self {
            version: ARTIFACT_VERSION.to_owned(),
            error_family: config.error_family.name().to_owned(),
            ideal_gate: "g_gate(theta)".to_owned(),
            master_seed: config.master_seed,
            n_samples: config.n_samples,
            theta: config.theta.into(),
            phi: config.phi.into(),
            merits: config.merits.iter().map(|m| m.name().to_owned()).collect(),
            substream: "derive_seed(master_seed, [grid_index, merit_index]), sample i from stream i".to_owned(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct RecordRow<'a> {
    theta: f64,
    phi: f64,
    merit: &'a str,
    mean: f64,
    std_error: f64,
    n_samples: usize,
}

fn row(theta: f64, phi: f64, a: &HaarAverage) -> RecordRow<'static> {
    RecordRow {
        theta,
        phi,
        merit: a.kind.name(),
        mean: a.mean,
        std_error: a.std_error,
        n_samples: a.n_samples,
    }
}

/// Long format: `theta,phi,merit,mean,std_error,n_samples`.
pub fn write_sweep_csv<W: Write>(out: W, result: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &result.records {
        w.serialize(row(r.theta, r.phi, &r.average))
            .map_err(|e| CliError::io("<output>", e.into()))?;
    }
    w.flush().map_err(|e| CliError::io("<output>", e))
}

#[derive(Serialize)]
struct SweepJson<'a> {
    metadata: &'a SweepMetadata,
    records: Vec<RecordRow<'static>>,
}

pub fn write_sweep_json<W: Write>(out: W, result: &SweepResult, meta: &SweepMetadata) -> Result<()> {
    let doc = SweepJson {
        metadata: meta,
        records: result
            .records
            .iter()
            .map(|r| row(r.theta, r.phi, &r.average))
            .collect(),
    };
    write_json(out, &doc)
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::io("<output>", e.into()))?;
    writeln!(out).map_err(|e| CliError::io("<output>", e))
}

/// `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Opens `path` for writing, or stdout when `None`.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

/// Writes the sweep; CSV output to a file also gets a metadata sidecar.
pub fn write_sweep(config: &SweepConfig, result: &SweepResult, out: Option<&Path>, format: OutputFormat) -> Result<()> {
    let meta = SweepMetadata::new(config);
    let mut w = open_output(out)?;
    let target = out.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    match format {
        OutputFormat::Csv => {
            write_sweep_csv(&mut w, result)?;
            if let Some(p) = out {
                let side = sidecar_path(p);
                let f = File::create(&side).map_err(|e| CliError::io(&side, e))?;
                write_json(BufWriter::new(f), &meta)?;
            }
        }
        OutputFormat::Json => write_sweep_json(&mut w, result, &meta)?,
    }
    w.flush().map_err(|e| CliError::io(target, e))
}
