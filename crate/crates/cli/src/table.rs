//! Probability-table CSV: header `input,p00,p01,p10,p11`, one row per input
//! label, `#` comments. A comment of the form `# theta = 0.25` tags the
//! table with the gate angle it was taken at.

use std::fs;
use std::io::Write;
use std::path::Path;

use coherdiag_core::reconstruct::{ProbabilityTable, RowIssue};

use crate::error::{CliError, Result};

pub const HEADER: [&str; 5] = ["input", "p00", "p01", "p10", "p11"];

/// Tolerances applied while loading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    /// Allowed distance of each row sum from 1 before a warning.
    pub sum_tol: f64,
    /// Allowed excursion outside [0, 1] before a warning.
    pub range_eps: f64,
    /// Rescale rows to unit sum after checking.
    pub renormalize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            sum_tol: 0.02,
            range_eps: 1e-9,
            renormalize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTable {
    pub source: String,
    pub table: ProbabilityTable,
    pub theta: Option<f64>,
    pub warnings: Vec<String>,
}

pub fn load_probability_table(path: &Path, opts: LoadOptions) -> Result<LoadedTable> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_probability_table(&text, &path.display().to_string(), opts)
}

fn parse_error(source: &str, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        source_name: source.to_owned(),
        line,
        message: message.into(),
    }
}

fn theta_tag(text: &str, source: &str) -> Result<Option<f64>> {
    let mut theta = None;
    for (n, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = comment.split_once(['=', ':']) else {
            continue;
        };
        if key.trim() != "theta" {
            continue;
        }
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse_error(source, n as u64 + 1, format!("bad theta value '{}'", value.trim())))?;
        theta = Some(v);
    }
    Ok(theta)
}

pub fn parse_probability_table(text: &str, source: &str, opts: LoadOptions) -> Result<LoadedTable> {
    let theta = theta_tag(text, source)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header_line = text
        .lines()
        .position(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map_or(1, |i| i as u64 + 1);
    let header = reader
        .headers()
        .map_err(|e| parse_error(source, header_line, e.to_string()))?
        .clone();
    let got: Vec<&str> = header.iter().collect();
    if got != HEADER {
        return Err(parse_error(
            source,
            header_line,
            format!("expected header '{}', found '{}'", HEADER.join(","), got.join(",")),
        ));
    }

    let mut table = ProbabilityTable::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(source, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let label = &record[0];
        if label.is_empty() {
            return Err(parse_error(source, line, "empty input label"));
        }
        let mut probs = [0.0f64; 4];
        for (k, slot) in probs.iter_mut().enumerate() {
            let field = &record[k + 1];
            *slot = field
                .parse()
                .map_err(|_| parse_error(source, line, format!("{}: not a number: '{field}'", HEADER[k + 1])))?;
            if !slot.is_finite() {
                return Err(parse_error(source, line, format!("{}: not finite", HEADER[k + 1])));
            }
        }
        table
            .insert(label, probs)
            .map_err(|_| CliError::Validation(format!("{source}:{line}: duplicate input label '{label}'")))?;
    }
    if table.is_empty() {
        return Err(CliError::Validation(format!("{source}: no rows")));
    }

    let warnings = table
        .check(opts.range_eps, opts.sum_tol)
        .into_iter()
        .map(|issue| match issue {
            RowIssue::OutOfRange { label, outcome, value } => {
                format!("{source}: row '{label}': {} = {value} outside [0, 1]", HEADER[outcome + 1])
            }
            RowIssue::NotNormalized { label, sum } => {
                let action = if opts.renormalize { "renormalized" } else { "kept as is" };
                format!("{source}: row '{label}' sums to {sum} (tolerance {}), {action}", opts.sum_tol)
            }
        })
        .collect();
    if opts.renormalize {
        table.renormalize();
    }
    Ok(LoadedTable {
        source: source.to_owned(),
        table,
        theta,
        warnings,
    })
}

/// Writes a table in the loader's format.
pub fn write_probability_table<W: Write>(out: W, table: &ProbabilityTable, theta: Option<f64>) -> Result<()> {
    let mut out = out;
    if let Some(t) = theta {
        writeln!(out, "# theta = {t}").map_err(|e| CliError::io("<output>", e))?;
    }
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| CliError::io("<output>", e.into());
    w.write_record(HEADER).map_err(io_err)?;
    for (label, p) in table.rows() {
        let mut rec = vec![label.clone()];
        rec.extend(p.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::io("<output>", e))?;
    Ok(())
}
