//! Command-line front end. Each subcommand loads a CSV dataset, calls the
//! library and emits plot-ready CSV or versioned JSON.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
//! precondition error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rand::seq::index;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::io::{self, IngestOptions};
use crate::mahalanobis::{self, DataMatrix};
use crate::numerics::{orthonormality_error, Matrix, RankTolerance};
use crate::outlier_lab::{self, CalibrationReport, Detector, SimulationConfig};
use crate::projection::{Projector, TargetConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Mahalanobis scores in the rank subspace
    Standardize,
    /// Distances, D and hat matrices, simplex verdict
    Diagnose,
    /// Orthogonal projection matching a target configuration
    Project,
    /// Directions isolating one observation
    Piling,
    /// Monte Carlo calibration of an outlier detector
    Simulate,
    /// Summarise a calibration report
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorArg {
    Sd,
    SdAdversarial,
    Pca,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "hidim",
    version,
    about = "Geometry of high-dimensional datasets"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Input CSV (a report JSON for `report`)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file (standardize, diagnose, report) or directory (project,
    /// piling, simulate); single-file outputs default to stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.025)]
    pub alpha: f64,
    #[arg(long, default_value_t = 500)]
    pub replicates: usize,
    #[arg(long, value_enum, default_value_t = DetectorArg::Pca)]
    pub detector: DetectorArg,
    /// Target configuration CSV (n rows, k columns)
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Variable subset: comma-separated 0-based indices or `random:K`
    #[arg(long)]
    pub columns: Option<String>,
    /// Apply log2 to every numeric entry
    #[arg(long)]
    pub log2: bool,
    /// Name of the column holding group labels
    #[arg(long)]
    pub label_column: Option<String>,
    #[arg(long, default_value_t = 0.9)]
    pub var_explained: f64,
    #[arg(long, default_value_t = 250)]
    pub directions: usize,
    /// Observation to isolate (piling); all rows when omitted
    #[arg(long)]
    pub row: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidArgument(_) => EXIT_USAGE,
            Error::Shape(_)
            | Error::NonFinite { .. }
            | Error::InsufficientData { .. }
            | Error::InsufficientGroup { .. }
            | Error::Parse { .. }
            | Error::Domain { .. }
            | Error::Io(_) => EXIT_DATA,
            Error::NotPsd { .. }
            | Error::Convergence(_)
            | Error::DegenerateData
            | Error::NotGeneralPosition { .. }
            | Error::Precondition(_)
            | Error::Target(_)
            | Error::Infeasible(_) => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn with_context(context: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| {
        let mut err = CliError::from(e);
        err.message = format!("{context}: {}", err.message);
        err
    }
}

/// Files produced by a run (already written) and text destined for stdout.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub stdout: Option<String>,
}

/// Parse arguments, run, print, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&config) {
        Ok(outcome) => {
            if let Some(text) = outcome.stdout {
                print!("{text}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

struct Pending {
    files: Vec<(PathBuf, Vec<u8>)>,
    dir: Option<PathBuf>,
}

impl Pending {
    fn new() -> Self {
        Pending {
            files: Vec::new(),
            dir: None,
        }
    }

    fn in_dir(dir: &Path) -> Self {
        Pending {
            files: Vec::new(),
            dir: Some(dir.to_path_buf()),
        }
    }

    fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    fn add_in_dir(&mut self, name: &str, bytes: Vec<u8>) {
        let dir = self.dir.clone().expect("directory output");
        self.add(dir.join(name), bytes);
    }

    /// Write everything or nothing: on failure, files already written (and a
    /// directory created here) are removed.
    fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut created_dir = None;
        if let Some(dir) = &self.dir {
            if !dir.exists() {
                fs::create_dir_all(dir).map_err(|e| CliError::from(Error::from(e)))?;
                created_dir = Some(dir.clone());
            }
        }
        let mut written = Vec::new();
        for (path, bytes) in &self.files {
            if let Err(e) = fs::write(path, bytes) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                if let Some(d) = &created_dir {
                    let _ = fs::remove_dir(d);
                }
                return Err(with_context(&path.display().to_string())(Error::from(e)));
            }
            written.push(path.clone());
        }
        Ok(written)
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    validate(config)?;
    match config.command {
        Command::Standardize => standardize(config),
        Command::Diagnose => diagnose(config),
        Command::Project => project(config),
        Command::Piling => piling(config),
        Command::Simulate => simulate(config),
        Command::Report => report(config),
    }
}

fn validate(config: &RunConfig) -> Result<(), CliError> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(usage(format!(
            "--alpha must lie in (0, 1), got {}",
            config.alpha
        )));
    }
    if config.replicates == 0 {
        return Err(usage("--replicates must be at least 1"));
    }
    if config.directions == 0 {
        return Err(usage("--directions must be at least 1"));
    }
    if !(config.var_explained > 0.0 && config.var_explained <= 1.0) {
        return Err(usage(format!(
            "--var-explained must lie in (0, 1], got {}",
            config.var_explained
        )));
    }
    if config.input.is_none() {
        return Err(usage("--input is required"));
    }
    let needs_dir = matches!(
        config.command,
        Command::Project | Command::Piling | Command::Simulate
    );
    if needs_dir && config.output.is_none() {
        return Err(usage("--output directory is required for this command"));
    }
    if config.command == Command::Project && config.target.is_none() {
        return Err(usage("--target is required for project"));
    }
    Ok(())
}

struct Loaded {
    data: DataMatrix,
    names: Vec<String>,
    columns: Option<Vec<usize>>,
}

/// Resolve a `--columns` value against `p` variables.
pub fn resolve_columns(spec: &str, p: usize, seed: u64) -> Result<Vec<usize>, CliError> {
    if let Some(k) = spec.strip_prefix("random:") {
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| usage(format!("invalid column count in '{spec}'")))?;
        if k == 0 || k > p {
            return Err(usage(format!("cannot pick {k} of {p} variables")));
        }
        let mut rng = outlier_lab::replicate_rng(seed, u64::MAX);
        let mut picked = index::sample(&mut rng, p, k).into_vec();
        picked.sort_unstable();
        return Ok(picked);
    }
    let cols = spec
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| usage(format!("invalid --columns '{spec}'")))?;
    if let Some(bad) = cols.iter().find(|&&c| c >= p) {
        return Err(usage(format!(
            "column {bad} out of range for {p} variables"
        )));
    }
    if cols.is_empty() {
        return Err(usage("--columns selects nothing"));
    }
    Ok(cols)
}

fn load(config: &RunConfig) -> Result<Loaded, CliError> {
    let input = config.input.as_ref().expect("validated");
    let opts = IngestOptions {
        log2: config.log2,
        label_column: config.label_column.clone(),
    };
    let file = fs::File::open(input)
        .map_err(|e| with_context(&input.display().to_string())(Error::from(e)))?;
    let (data, names) =
        io::ingest_with_header(file, &opts).map_err(with_context(&input.display().to_string()))?;
    let columns = match &config.columns {
        Some(spec) => Some(resolve_columns(spec, data.p(), config.seed)?),
        None => None,
    };
    Ok(Loaded {
        data,
        names,
        columns,
    })
}

impl Loaded {
    /// Data restricted to the requested columns.
    fn selected(&self) -> Result<(DataMatrix, Vec<String>), CliError> {
        match &self.columns {
            Some(cols) => Ok((
                self.data.select_columns(cols)?,
                cols.iter().map(|&c| self.names[c].clone()).collect(),
            )),
            None => Ok((self.data.clone(), self.names.clone())),
        }
    }
}

fn csv_bytes(
    header: &[String],
    labels: Option<&[String]>,
    m: &Matrix,
    label_name: &str,
) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    io::write_table(&mut buf, header, labels.map(|l| (label_name, l)), m)?;
    Ok(buf)
}

fn json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn finish_single(config: &RunConfig, bytes: Vec<u8>) -> Result<Outcome, CliError> {
    match &config.output {
        Some(path) => {
            let mut pending = Pending::new();
            pending.add(path.clone(), bytes);
            Ok(Outcome {
                files: pending.commit()?,
                stdout: None,
            })
        }
        None => Ok(Outcome {
            files: Vec::new(),
            stdout: Some(String::from_utf8(bytes).expect("utf-8 output")),
        }),
    }
}

fn label_name(config: &RunConfig) -> &str {
    config.label_column.as_deref().unwrap_or("label")
}

fn standardize(config: &RunConfig) -> Result<Outcome, CliError> {
    let (data, names) = load(config)?.selected()?;
    let std = mahalanobis::standardize(&data, RankTolerance::default())?;
    let bytes = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_bytes(
            &io::default_names("z", std.q),
            data.labels(),
            &std.z,
            label_name(config),
        )?,
        Format::Json => json_bytes(&standardized_json(&data, &names, &std)),
    };
    finish_single(config, bytes)
}

pub fn standardized_json(
    data: &DataMatrix,
    names: &[String],
    std: &mahalanobis::StandardizedData,
) -> serde_json::Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "standardized",
        "n": data.n(),
        "p": data.p(),
        "q": std.q,
        "variables": names,
        "labels": data.labels(),
        "mean": std.mean.as_slice(),
        "root_scales": std.root_scales.as_slice(),
        "scores": rows_of(&std.z),
        "invsqrt_factor": rows_of(&std.invsqrt_factor),
    })
}

pub fn diagnostics_json(diag: &mahalanobis::DistanceDiagnostics) -> serde_json::Value {
    let max_pair = (0..diag.n)
        .flat_map(|i| (0..diag.n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| diag.pairwise[(i, j)])
        .fold(0.0, f64::max);
    json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "diagnostics",
        "n": diag.n,
        "p": diag.p,
        "rank": diag.rank,
        "general_position": diag.general_position,
        "rank_deficit": diag.rank_deficit(),
        "degenerate": diag.degenerate,
        "constants": [diag.constants.0, diag.constants.1],
        "max_center_distance": diag.center_distances.max(),
        "max_pairwise_distance": max_pair,
        "center_distances": diag.center_distances.as_slice(),
        "pairwise": rows_of(&diag.pairwise),
        "d_matrix": rows_of(&diag.d_matrix),
        "hat_matrix": rows_of(&diag.hat_matrix),
    })
}

fn diagnose(config: &RunConfig) -> Result<Outcome, CliError> {
    let (data, _) = load(config)?.selected()?;
    let diag = mahalanobis::diagnose_degeneracy(&data, RankTolerance::default())?;
    let bytes = match config.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&diagnostics_json(&diag)),
        Format::Csv => {
            let table = Matrix::from_fn(diag.n, 2, |i, j| {
                if j == 0 {
                    diag.center_distances[i]
                } else {
                    diag.hat_matrix[(i, i)]
                }
            });
            let header = vec!["center_distance".to_string(), "leverage".to_string()];
            csv_bytes(&header, data.labels(), &table, label_name(config))?
        }
    };
    finish_single(config, bytes)
}

fn project(config: &RunConfig) -> Result<Outcome, CliError> {
    let (data, names) = load(config)?.selected()?;
    let target_path = config.target.as_ref().expect("validated");
    let y =
        io::read_matrix(target_path).map_err(with_context(&target_path.display().to_string()))?;
    let target = TargetConfig::new(y)?;
    let projector = Projector::new(&data, RankTolerance::default())?;
    let exact = data.p() + 1 >= data.n();
    let plan = if exact {
        projector.exact(&target)?
    } else {
        projector.approx(&target)?
    };
    let k = target.k();
    let coords = plan.project(&data);
    let proj_names = io::default_names("proj", k);

    let mut pending = Pending::in_dir(config.output.as_ref().expect("validated"));
    pending.add_in_dir(
        "coordinates.csv",
        csv_bytes(&proj_names, data.labels(), &coords, label_name(config))?,
    );
    pending.add_in_dir(
        "q.csv",
        csv_bytes(
            &io::default_names("q", k),
            Some(&names),
            &plan.q,
            "variable",
        )?,
    );
    pending.add_in_dir(
        "a.csv",
        csv_bytes(&io::default_names("a", k), None, &plan.a, "")?,
    );
    let b = Matrix::from_column_slice(k, 1, plan.b.as_slice());
    pending.add_in_dir("b.csv", csv_bytes(&["b".to_string()], None, &b, "")?);
    pending.add_in_dir(
        "plan.json",
        json_bytes(&json!({
            "schema_version": SCHEMA_VERSION,
            "kind": "projection",
            "method": if exact { "exact" } else { "least_squares" },
            "n": data.n(),
            "p": data.p(),
            "k": k,
            "residual": plan.residual,
            "orthonormality_error": orthonormality_error(&plan.q),
            "a": rows_of(&plan.a),
            "b": plan.b.as_slice(),
        })),
    );
    Ok(Outcome {
        files: pending.commit()?,
        stdout: None,
    })
}

fn piling(config: &RunConfig) -> Result<Outcome, CliError> {
    let (data, names) = load(config)?.selected()?;
    let projector = Projector::new(&data, RankTolerance::default())?;
    let rows: Vec<usize> = match config.row {
        Some(r) => vec![r],
        None => (0..data.n()).collect(),
    };
    let piles = rows
        .iter()
        .map(|&r| projector.piling(r))
        .collect::<crate::Result<Vec<_>>>()?;
    let directions = Matrix::from_fn(data.p(), piles.len(), |i, j| piles[j].direction[i]);
    let projected = Matrix::from_fn(data.n(), piles.len(), |i, j| piles[j].projected[i]);
    let header: Vec<String> = rows.iter().map(|r| format!("row{r}")).collect();

    let mut pending = Pending::in_dir(config.output.as_ref().expect("validated"));
    pending.add_in_dir(
        "directions.csv",
        csv_bytes(&header, Some(&names), &directions, "variable")?,
    );
    pending.add_in_dir(
        "projected.csv",
        csv_bytes(&header, data.labels(), &projected, label_name(config))?,
    );
    Ok(Outcome {
        files: pending.commit()?,
        stdout: None,
    })
}

/// On-disk form of a [`CalibrationReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub report: CalibrationReport,
}

impl ReportFile {
    pub fn new(report: CalibrationReport) -> Self {
        ReportFile {
            schema_version: SCHEMA_VERSION,
            kind: "calibration_report".into(),
            report,
        }
    }
}

pub fn frequency_csv(report: &CalibrationReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["group", "count", "observed", "expected"])
        .expect("in-memory write");
    for g in &report.groups {
        for c in 0..=g.n {
            w.write_record([
                g.label.clone(),
                c.to_string(),
                g.observed_freq[c].to_string(),
                io::format_number(g.expected_freq[c]),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory write")
}

fn simulate(config: &RunConfig) -> Result<Outcome, CliError> {
    let loaded = load(config)?;
    let model = outlier_lab::fit_group_model(&loaded.data)?;
    let detector = match config.detector {
        DetectorArg::Sd => Detector::Sd {
            directions: config.directions,
        },
        DetectorArg::SdAdversarial => Detector::SdAdversarial {
            directions: config.directions,
        },
        DetectorArg::Pca => Detector::PcaReduce {
            var_explained: config.var_explained,
        },
    };
    let mut sim = SimulationConfig::new(model, detector, config.seed);
    sim.replicates = config.replicates;
    sim.alpha = config.alpha;
    sim.variable_subset = loaded.columns.clone();
    let report = outlier_lab::run_calibration(&sim)?;

    let mut pending = Pending::in_dir(config.output.as_ref().expect("validated"));
    let file = ReportFile::new(report);
    let mut text = serde_json::to_string_pretty(&file).expect("serializable");
    text.push('\n');
    pending.add_in_dir("report.json", text.into_bytes());
    pending.add_in_dir("frequencies.csv", frequency_csv(&file.report));
    Ok(Outcome {
        files: pending.commit()?,
        stdout: None,
    })
}

pub fn read_report(path: &Path) -> Result<ReportFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| with_context(&path.display().to_string())(Error::from(e)))?;
    let file: ReportFile = serde_json::from_str(&text).map_err(|e| CliError {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError {
            code: EXIT_DATA,
            message: format!("unsupported schema_version {}", file.schema_version),
        });
    }
    Ok(file)
}

pub fn summary_text(report: &CalibrationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "detector {} | p = {} | alpha = {} | {} replicates | seed {}",
        report.detector.name(),
        report.p,
        report.alpha,
        report.replicates,
        report.seed
    );
    for g in &report.groups {
        let _ = writeln!(
            out,
            "\ngroup {} (n = {}): median {} | mean {:.3} | total variation {:.3}",
            g.label, g.n, g.median_count, g.mean_count, g.divergence
        );
        let _ = writeln!(out, "{:>6} {:>9} {:>9}", "count", "observed", "expected");
        let last = (0..=g.n)
            .filter(|&c| g.observed_freq[c] > 0 || g.expected_freq[c] >= 0.05)
            .max()
            .unwrap_or(0);
        for c in 0..=last {
            let _ = writeln!(
                out,
                "{:>6} {:>9} {:>9.1}",
                c, g.observed_freq[c], g.expected_freq[c]
            );
        }
    }
    out
}

fn report(config: &RunConfig) -> Result<Outcome, CliError> {
    let file = read_report(config.input.as_ref().expect("validated"))?;
    let bytes = match config.format {
        Some(Format::Csv) => frequency_csv(&file.report),
        Some(Format::Json) => {
            let mut s = serde_json::to_string_pretty(&file).expect("serializable");
            s.push('\n');
            s.into_bytes()
        }
        None => summary_text(&file.report).into_bytes(),
    };
    finish_single(config, bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_specs() {
        assert_eq!(resolve_columns("0, 2,5", 6, 0).unwrap(), vec![0, 2, 5]);
        assert_eq!(resolve_columns("3,9", 6, 0).unwrap_err().code, EXIT_USAGE);
        let picked = resolve_columns("random:5", 100, 7).unwrap();
        assert_eq!(picked.len(), 5);
        assert_eq!(picked, resolve_columns("random:5", 100, 7).unwrap());
        assert!(picked.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::DegenerateData).code, EXIT_NUMERICAL);
        assert_eq!(CliError::from(Error::Io("x".into())).code, EXIT_DATA);
        assert_eq!(
            CliError::from(Error::InvalidArgument("x".into())).code,
            EXIT_USAGE
        );
    }

    #[test]
    fn usage_errors() {
        let cfg = RunConfig::try_parse_from(["hidim", "project", "--input", "x.csv"]).unwrap();
        assert_eq!(execute(&cfg).unwrap_err().code, EXIT_USAGE);
        let cfg =
            RunConfig::try_parse_from(["hidim", "diagnose", "--input", "x.csv", "--alpha", "2"])
                .unwrap();
        assert_eq!(execute(&cfg).unwrap_err().code, EXIT_USAGE);
        assert_eq!(run(["hidim", "frobnicate"]), EXIT_USAGE);
    }
}
