//! Declarative experiments: a JSON spec in, `results.csv`, `fit.json`,
//! `plot.gp` and a `run.log` sidecar out.
//!
//! Every artifact except `run.log` is a pure function of the spec file, so reruns
//! are byte-identical. Timestamps live only in `run.log`.

use crate::error::{CliError, Context};
use mono_core::counting::{fit_power_law, scaling_row, ColouringFamily, PowerFit};
use mono_core::harmonic::hypotheses::{
    decay_grid, fourier_decay_sup, hua_norms, minor_arc_sample, HuaMajorant, HuaParams,
};
use mono_core::harmonic::{build_majorant, mixed_moment};
use mono_core::DiagonalEquation;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Extremal,
    Congruence,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    pub equation: DiagonalEquation,
    pub colouring: FamilyKind,
    pub r: u32,
    pub n_grid: Vec<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub output: PathBuf,
}

/// Exact `p`-th moment of the quadratic-times-linear sum over `(N/2, N]`
/// for every `(N, W)` pair of the two grids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentScanSpec {
    pub p: u32,
    pub n_grid: Vec<u64>,
    pub w_grid: Vec<u64>,
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `L^2/L^1` ratios of the four composite majorants.
    Hua,
    /// Sup of `|nu^ - 1_[N]^|/N` over rationals with small denominator and a uniform grid.
    FourierDecay,
    /// `|nu^(alpha)|/||nu||_1` at seeded minor-arc points.
    MinorArc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisSpec {
    pub check: CheckKind,
    pub n_grid: Vec<u64>,
    /// Majorant moduli `W` (even).
    #[serde(default = "default_w_grid")]
    pub w_grid: Vec<u64>,
    #[serde(default = "default_xi")]
    pub xi: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    /// minor-arc: points per `(N, W)`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// minor-arc: denominators up to this define the major arcs;
    /// fourier-decay: largest Farey denominator on the grid.
    #[serde(default = "default_q_cap")]
    pub q_cap: u64,
    /// fourier-decay: uniform grid size.
    #[serde(default = "default_grid")]
    pub grid: u64,
    pub output: PathBuf,
}

fn default_w_grid() -> Vec<u64> {
    vec![2]
}
fn default_xi() -> u64 {
    1
}
fn default_samples() -> usize {
    200
}
fn default_q_cap() -> u64 {
    50
}
fn default_grid() -> u64 {
    1 << 10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    Scaling(ScalingSpec),
    MomentScan(MomentScanSpec),
    HypothesisCheck(HypothesisSpec),
}

fn typed<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::schema(path, e.into_inner().to_string())
    })
}

fn check_grid(path: &str, grid: &[u64], min_len: usize) -> Result<(), CliError> {
    if grid.len() < min_len {
        return Err(CliError::schema(
            path,
            format!("needs at least {min_len} points, got {}", grid.len()),
        ));
    }
    if let Some(i) = grid.windows(2).position(|w| w[0] >= w[1]) {
        return Err(CliError::schema(
            format!("{path}[{}]", i + 1),
            "grid must be strictly increasing",
        ));
    }
    if grid.first() == Some(&0) {
        return Err(CliError::schema(format!("{path}[0]"), "grid values must be positive"));
    }
    Ok(())
}

impl ExperimentSpec {
    /// Parse and validate. Errors carry the JSON path of the offending field.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::schema(".", e.to_string()))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| CliError::schema(".", "spec must be a JSON object"))?;
        let kind = obj
            .remove("kind")
            .ok_or_else(|| CliError::schema("kind", "missing field"))?;
        let spec = match kind.as_str() {
            Some("scaling") => ExperimentSpec::Scaling(typed(value)?),
            Some("moment-scan") => ExperimentSpec::MomentScan(typed(value)?),
            Some("hypothesis-check") => ExperimentSpec::HypothesisCheck(typed(value)?),
            _ => {
                return Err(CliError::schema(
                    "kind",
                    format!("expected one of scaling, moment-scan, hypothesis-check, got {kind}"),
                ))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            ExperimentSpec::Scaling(s) => {
                check_grid("n_grid", &s.n_grid, 4)?;
                if s.r == 0 {
                    return Err(CliError::schema("r", "need at least one colour"));
                }
                if s.colouring == FamilyKind::Random && s.seed.is_none() {
                    return Err(CliError::schema("seed", "required for random colourings"));
                }
            }
            ExperimentSpec::MomentScan(s) => {
                if !matches!(s.p, 2 | 4 | 6 | 8) {
                    return Err(CliError::schema("p", "must be one of 2, 4, 6, 8"));
                }
                check_grid("n_grid", &s.n_grid, 1)?;
                check_grid("w_grid", &s.w_grid, 1)?;
                if s.n_grid.len() < 3 && s.w_grid.len() < 3 {
                    return Err(CliError::schema(
                        "n_grid",
                        "one of the grids needs at least 3 points to fit a slope",
                    ));
                }
            }
            ExperimentSpec::HypothesisCheck(s) => {
                let min_n = if s.check == CheckKind::Hua { 3 } else { 1 };
                check_grid("n_grid", &s.n_grid, min_n)?;
                check_grid("w_grid", &s.w_grid, 1)?;
                if let Some(i) = s.w_grid.iter().position(|w| w % 2 == 1) {
                    return Err(CliError::schema(format!("w_grid[{i}]"), "majorant moduli must be even"));
                }
                if s.check == CheckKind::MinorArc && s.seed.is_none() {
                    return Err(CliError::schema("seed", "required for minor-arc sampling"));
                }
                if s.q_cap == 0 || s.grid == 0 || s.samples == 0 {
                    return Err(CliError::schema("q_cap", "q_cap, grid and samples must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn output(&self) -> &Path {
        match self {
            ExperimentSpec::Scaling(s) => &s.output,
            ExperimentSpec::MomentScan(s) => &s.output,
            ExperimentSpec::HypothesisCheck(s) => &s.output,
        }
    }

    pub fn set_output(&mut self, dir: PathBuf) {
        match self {
            ExperimentSpec::Scaling(s) => s.output = dir,
            ExperimentSpec::MomentScan(s) => s.output = dir,
            ExperimentSpec::HypothesisCheck(s) => s.output = dir,
        }
    }
}

/// A fitted slope together with the points it was fitted to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedFit {
    pub series: String,
    pub slope: f64,
    pub intercept: f64,
    pub constant: f64,
    pub points: Vec<(f64, f64)>,
    pub residuals: Vec<f64>,
    pub excluded: Vec<f64>,
}

impl NamedFit {
    fn new(series: String, fit: PowerFit) -> Self {
        NamedFit {
            series,
            slope: fit.slope,
            intercept: fit.intercept,
            constant: fit.constant(),
            points: fit.points,
            residuals: fit.residuals,
            excluded: fit.excluded,
        }
    }
}

/// What a run produced, also written to `fit.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub kind: &'static str,
    pub rows: usize,
    pub fits: Vec<NamedFit>,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

/// Worker count: `MONO_THREADS` if set, otherwise the machine's parallelism.
pub fn thread_count() -> Result<usize, CliError> {
    match std::env::var("MONO_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Usage(format!(
                "MONO_THREADS must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<RunSummary, CliError> {
    let threads = thread_count()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} workers: {e}")))?;
    let started = unix_now();
    let (table, summary, plot) = pool.install(|| match spec {
        ExperimentSpec::Scaling(s) => run_scaling(s),
        ExperimentSpec::MomentScan(s) => run_moments(s),
        ExperimentSpec::HypothesisCheck(s) => run_hypothesis(s),
    })?;

    let dir = spec.output();
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let mut w = csv::Writer::from_path(dir.join("results.csv"))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| CliError::io("writing results.csv", e))?;
    let fit = serde_json::to_string_pretty(&summary)? + "\n";
    write(dir, "fit.json", &fit)?;
    write(dir, "plot.gp", &plot)?;
    let log = format!(
        "started_unix={started}\nfinished_unix={}\nthreads={threads}\nkind={}\nrows={}\n",
        unix_now(),
        summary.kind,
        summary.rows
    );
    write(dir, "run.log", &log)?;
    Ok(summary)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn fit_or_schema(series: String, points: &[(f64, f64)]) -> Result<NamedFit, CliError> {
    let fit = fit_power_law(points).context(|| format!("fitting {series}"))?;
    Ok(NamedFit::new(series, fit))
}

fn run_scaling(s: &ScalingSpec) -> Result<(Table, RunSummary, String), CliError> {
    let family = match s.colouring {
        FamilyKind::Extremal => ColouringFamily::Extremal,
        FamilyKind::Congruence => ColouringFamily::Congruence,
        FamilyKind::Random => ColouringFamily::Random {
            seed: s.seed.unwrap_or_default(),
        },
    };
    let mut rows = s
        .n_grid
        .par_iter()
        .map(|&n| scaling_row(&s.equation, family, s.r, n).context(|| format!("N = {n}, r = {}", s.r)))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| r.n);

    let mut table = Table {
        header: vec!["N", "r", "colour", "count"],
        rows: Vec::new(),
    };
    for row in &rows {
        for (j, count) in row.per_colour.iter().enumerate() {
            table.rows.push(vec![
                row.n.to_string(),
                row.r.to_string(),
                (j + 1).to_string(),
                count.to_string(),
            ]);
        }
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.max_count as f64)).collect();
    let fit = fit_or_schema("max-colour count vs N".into(), &points)?;
    let plot = scaling_plot(s, &fit);
    let summary = RunSummary {
        kind: "scaling",
        rows: table.rows.len(),
        fits: vec![fit],
    };
    Ok((table, summary, plot))
}

fn run_moments(s: &MomentScanSpec) -> Result<(Table, RunSummary, String), CliError> {
    let pairs: Vec<(u64, u64)> = s
        .n_grid
        .iter()
        .flat_map(|&n| s.w_grid.iter().map(move |&w| (n, w)))
        .collect();
    let mut values = pairs
        .par_iter()
        .map(|&(n, w)| {
            mixed_moment(n, w, s.p)
                .map(|m| (n, w, m))
                .context(|| format!("N = {n}, W = {w}, p = {}", s.p))
        })
        .collect::<Result<Vec<_>, _>>()?;
    values.sort_by_key(|&(n, w, _)| (n, w));

    let table = Table {
        header: vec!["N", "W", "p", "moment"],
        rows: values
            .iter()
            .map(|&(n, w, m)| vec![n.to_string(), w.to_string(), s.p.to_string(), m.to_string()])
            .collect(),
    };
    let mut fits = Vec::new();
    if s.w_grid.len() >= 3 {
        for &n in &s.n_grid {
            let pts: Vec<(f64, f64)> = values
                .iter()
                .filter(|v| v.0 == n)
                .map(|v| (v.1 as f64, v.2 as f64))
                .collect();
            fits.push(fit_or_schema(format!("moment vs W at N = {n}"), &pts)?);
        }
    }
    if s.n_grid.len() >= 3 {
        for &w in &s.w_grid {
            let pts: Vec<(f64, f64)> = values
                .iter()
                .filter(|v| v.1 == w)
                .map(|v| (v.0 as f64, v.2 as f64))
                .collect();
            fits.push(fit_or_schema(format!("moment vs N at W = {w}"), &pts)?);
        }
    }
    let plot = moment_plot(s);
    let summary = RunSummary {
        kind: "moment-scan",
        rows: table.rows.len(),
        fits,
    };
    Ok((table, summary, plot))
}

fn run_hypothesis(s: &HypothesisSpec) -> Result<(Table, RunSummary, String), CliError> {
    let majorant = |n: u64, w: u64| build_majorant(n, w, s.xi).context(|| format!("N = {n}, W = {w}, xi = {}", s.xi));
    match s.check {
        CheckKind::Hua => {
            let jobs: Vec<(HuaMajorant, u64, u64)> = HuaMajorant::ALL
                .iter()
                .flat_map(|&k| {
                    s.w_grid
                        .iter()
                        .flat_map(move |&w| s.n_grid.iter().map(move |&n| (k, w, n)))
                })
                .collect();
            let rows = jobs
                .par_iter()
                .map(|&(kind, w, n)| {
                    let params = HuaParams {
                        w1: w,
                        xi: s.xi,
                        ..HuaParams::default()
                    };
                    hua_norms(kind, &params, n)
                        .map(|norms| (kind, w, norms))
                        .context(|| format!("{} at N = {n}, W = {w}", kind_name(kind)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut fits = Vec::new();
            for &kind in &HuaMajorant::ALL {
                for &w in &s.w_grid {
                    let pts: Vec<(f64, f64)> = rows
                        .iter()
                        .filter(|r| r.0 == kind && r.1 == w)
                        .map(|r| (r.2.n as f64, r.2.ratio()))
                        .collect();
                    fits.push(fit_or_schema(format!("{} W = {w}", kind_name(kind)), &pts)?);
                }
            }
            let table = Table {
                header: vec!["majorant", "W", "N", "l1", "l2_squared", "ratio"],
                rows: rows
                    .iter()
                    .map(|(k, w, r)| {
                        vec![
                            kind_name(*k).into(),
                            w.to_string(),
                            r.n.to_string(),
                            r.l1.to_string(),
                            r.l2_squared.to_string(),
                            format!("{:e}", r.ratio()),
                        ]
                    })
                    .collect(),
            };
            let plot = series_plot("N", "||mu||_2 / ||mu||_1", 3, 6, "majorant", true);
            Ok(hypothesis_output(table, fits, plot))
        }
        CheckKind::FourierDecay => {
            let points = decay_grid(s.q_cap, s.grid);
            let jobs: Vec<(u64, u64)> = s
                .n_grid
                .iter()
                .flat_map(|&n| s.w_grid.iter().map(move |&w| (n, w)))
                .collect();
            let rows = jobs
                .par_iter()
                .map(|&(n, w)| Ok((n, w, fourier_decay_sup(&majorant(n, w)?, &points))))
                .collect::<Result<Vec<_>, CliError>>()?;
            let table = Table {
                header: vec!["N", "W", "sup_gap"],
                rows: rows
                    .iter()
                    .map(|&(n, w, g)| vec![n.to_string(), w.to_string(), format!("{g:e}")])
                    .collect(),
            };
            let plot = series_plot("W", "sup |nu^ - 1_[N]^| / N", 2, 3, "N", false);
            Ok(hypothesis_output(table, Vec::new(), plot))
        }
        CheckKind::MinorArc => {
            let seed = s.seed.unwrap_or_default();
            let jobs: Vec<(u64, u64)> = s
                .n_grid
                .iter()
                .flat_map(|&n| s.w_grid.iter().map(move |&w| (n, w)))
                .collect();
            let rows = jobs
                .par_iter()
                .map(|&(n, w)| {
                    let nu = majorant(n, w)?;
                    let key = mono_core::arith::split_seed(seed, n ^ (w << 40));
                    let sample =
                        minor_arc_sample(&nu, s.samples, s.q_cap, key).context(|| format!("N = {n}, W = {w}"))?;
                    Ok((n, w, sample.max_ratio))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let table = Table {
                header: vec!["N", "W", "samples", "max_ratio"],
                rows: rows
                    .iter()
                    .map(|&(n, w, m)| vec![n.to_string(), w.to_string(), s.samples.to_string(), format!("{m:e}")])
                    .collect(),
            };
            let plot = series_plot("N", "max |nu^(alpha)| / ||nu||_1", 1, 4, "W", true);
            Ok(hypothesis_output(table, Vec::new(), plot))
        }
    }
}

fn hypothesis_output(table: Table, fits: Vec<NamedFit>, plot: String) -> (Table, RunSummary, String) {
    let summary = RunSummary {
        kind: "hypothesis-check",
        rows: table.rows.len(),
        fits,
    };
    (table, summary, plot)
}

fn kind_name(k: HuaMajorant) -> &'static str {
    match k {
        HuaMajorant::NuNu => "nu-nu",
        HuaMajorant::NuSquare => "nu-square",
        HuaMajorant::NuInterval => "nu-interval",
        HuaMajorant::SquareInterval => "square-interval",
    }
}

const PLOT_PREAMBLE: &str = "set datafile separator ','\nset key autotitle columnhead\nset grid\n";

fn scaling_plot(s: &ScalingSpec, fit: &NamedFit) -> String {
    let mut out = String::from(PLOT_PREAMBLE);
    let _ = writeln!(out, "set logscale xy");
    let _ = writeln!(out, "set xlabel 'N'\nset ylabel 'monochromatic solutions'");
    let _ = writeln!(out, "set title 'fitted slope {:.4}'", fit.slope);
    let _ = writeln!(out, "fit_line(x) = {:e} * x**{:e}", fit.constant, fit.slope);
    let _ = writeln!(
        out,
        "plot for [c=1:{}] 'results.csv' using 1:($3==c ? $4 : 1/0) with linespoints title sprintf('colour %d', c), \\\n     fit_line(x) with lines dashtype 2 title 'max-colour fit'",
        s.r
    );
    out
}

fn moment_plot(s: &MomentScanSpec) -> String {
    let mut out = String::from(PLOT_PREAMBLE);
    let _ = writeln!(
        out,
        "set logscale xy\nset xlabel 'N'\nset ylabel 'moment (p = {})'",
        s.p
    );
    let ws: Vec<String> = s.w_grid.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(
        out,
        "plot for [w in \"{}\"] 'results.csv' using 1:($2==w+0 ? $4 : 1/0) with linespoints title 'W = '.w",
        ws.join(" ")
    );
    out
}

/// Column `y_col` against column `x_col` (1-based), log scale on y.
fn series_plot(xlabel: &str, ylabel: &str, x_col: usize, y_col: usize, key: &str, logx: bool) -> String {
    let mut out = String::from(PLOT_PREAMBLE);
    if logx {
        let _ = writeln!(out, "set logscale x");
    }
    let _ = writeln!(out, "set logscale y\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'");
    let _ = writeln!(
        out,
        "# one point set per {key}; split by that column for separate curves"
    );
    let _ = writeln!(
        out,
        "plot 'results.csv' using {x_col}:{y_col} with points title '{ylabel}'"
    );
    out
}
