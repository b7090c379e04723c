//! Experiment runner: configuration, metrics, trace and plot output.
//!
//! Output files of a run directory:
//!
//! * `trace.csv`, one row per sample, first line `# amkl-trace v1`;
//! * `summary.json`, a [`MetricsSummary`];
//! * `mse.dat`, `al_eff.dat`, `k.dat` (two numeric columns) and `plot.gp`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::data::{self, DatasetManifest, StreamSample, SyntheticSpec};
use crate::engine::{self, AlgorithmConfig, Engine, TraceRecord, Variant};
use crate::selection::SelectionParams;
use crate::{Error, Result};

pub const TRACE_HEADER: &str = "# amkl-trace v1";
pub const TRACE_COLUMNS: &str = "t,yhat,y,a_t,K_t,subset,mse,al_eff";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DataSource {
    Manifest { path: PathBuf },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitFlags {
    pub trace_csv: bool,
    pub summary: bool,
    pub plot_data: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            trace_csv: true,
            summary: true,
            plot_data: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: AlgorithmConfig,
    pub data: DataSource,
    /// Nothing is written when absent.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub emit: EmitFlags,
    /// Replace `η_l` and `η_g` with `1/√T` once the stream length is known.
    #[serde(default = "yes")]
    pub auto_step: bool,
    /// Compute the hindsight regret (engine variants only).
    #[serde(default)]
    pub regret: bool,
}

fn yes() -> bool {
    true
}

impl RunConfig {
    pub fn new(algorithm: AlgorithmConfig, data: DataSource) -> Self {
        Self {
            algorithm,
            data,
            output_dir: None,
            emit: EmitFlags::default(),
            auto_step: true,
            regret: false,
        }
    }

    /// Reads a JSON (`.json`) or TOML (anything else) run configuration.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Command-line style overrides applied on top of a [`RunConfig`].
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub variant: Option<Variant>,
    pub seed: Option<u64>,
    pub eta_l: Option<f64>,
    pub eta_g: Option<f64>,
    pub lambda: Option<f64>,
    pub num_features: Option<usize>,
    pub eta_c: Option<f64>,
    pub max_skips: Option<usize>,
    pub delta: Option<f64>,
    pub gamma_cap: Option<f64>,
    pub fixed_k: Option<usize>,
    pub budget: Option<usize>,
    pub active: Option<bool>,
    pub output_dir: Option<PathBuf>,
    pub regret: Option<bool>,
    pub emit: Option<EmitFlags>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let a = &mut cfg.algorithm;
        if let Some(v) = self.variant {
            if v != a.variant {
                let keep_dict = a.dictionary.clone();
                let mut fresh = AlgorithmConfig::standard(v, 1);
                if v != Variant::SingleKernel {
                    fresh.dictionary = keep_dict;
                }
                fresh.eta_l = a.eta_l;
                fresh.eta_g = a.eta_g;
                fresh.lambda = a.lambda;
                fresh.num_features = a.num_features;
                fresh.seed = a.seed;
                fresh.budget = a.budget;
                fresh.selection = a.selection;
                if v.is_active() && a.variant.is_active() {
                    fresh.active = a.active;
                }
                *a = fresh;
            }
        }
        if let Some(s) = self.seed {
            a.seed = s;
        }
        if let Some(v) = self.eta_l {
            a.eta_l = v;
            cfg.auto_step = false;
        }
        if let Some(v) = self.eta_g {
            a.eta_g = v;
            cfg.auto_step = false;
        }
        if let Some(v) = self.lambda {
            a.lambda = v;
        }
        if let Some(v) = self.num_features {
            a.num_features = v;
        }
        if let Some(v) = self.eta_c {
            a.active.eta_c = v;
        }
        if let Some(v) = self.max_skips {
            a.active.max_skips = v;
        }
        if let Some(v) = self.active {
            a.active.enabled = v;
        }
        if let Some(v) = self.delta {
            a.selection.delta = v;
        }
        if let Some(v) = self.gamma_cap {
            a.selection.gamma_cap = v;
        }
        if self.fixed_k.is_some() {
            a.selection.fixed_k = self.fixed_k;
        }
        if let Some(v) = self.budget {
            a.budget = v;
        }
        if self.output_dir.is_some() {
            cfg.output_dir = self.output_dir.clone();
        }
        if let Some(v) = self.regret {
            cfg.regret = v;
        }
        if let Some(e) = self.emit {
            cfg.emit = e;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub variant: Variant,
    pub dataset: String,
    pub samples: usize,
    pub seed: u64,
    pub final_mse: f64,
    pub final_al_eff: f64,
    pub mse_curve: Vec<f64>,
    pub k_curve: Vec<usize>,
    #[serde(default)]
    pub regret: Option<f64>,
}

pub fn summarize(variant: Variant, dataset: &str, seed: u64, trace: &[TraceRecord]) -> Result<MetricsSummary> {
    let last = trace.last().ok_or_else(|| Error::Data("empty trace".into()))?;
    Ok(MetricsSummary {
        variant,
        dataset: dataset.to_string(),
        samples: trace.len(),
        seed,
        final_mse: last.mse,
        final_al_eff: last.al_eff,
        mse_curve: trace.iter().map(|r| r.mse).collect(),
        k_curve: trace.iter().map(|r| r.k).collect(),
        regret: None,
    })
}

/// Loaded stream plus a display name.
pub fn load_samples(source: &DataSource) -> Result<(String, Vec<StreamSample>)> {
    match source {
        DataSource::Manifest { path } => {
            let manifest = DatasetManifest::from_file(path)?;
            if !manifest.data_available() {
                return Err(Error::Data(format!(
                    "{}: data file {} not found (see scripts/fetch_datasets.sh)",
                    manifest.name,
                    manifest.path.display()
                )));
            }
            let loaded = data::load_csv(&manifest)?;
            Ok((manifest.name, loaded.samples))
        }
        DataSource::Synthetic(spec) => {
            let s = data::synthetic_stream(spec)?;
            Ok((format!("synthetic(sigma2={})", spec.sigma2), s.samples))
        }
    }
}

/// Effective algorithm configuration for a stream of `len` samples.
pub fn resolve(cfg: &RunConfig, len: usize) -> AlgorithmConfig {
    if cfg.auto_step {
        cfg.algorithm.clone().with_horizon(len)
    } else {
        cfg.algorithm.clone()
    }
}

/// Runs `algorithm` on `samples` and returns the trace, plus the regret when
/// asked for and available.
pub fn execute(algorithm: &AlgorithmConfig, samples: &[StreamSample], regret: bool) -> Result<(Vec<TraceRecord>, Option<f64>)> {
    if regret && algorithm.variant.uses_engine() {
        let first = samples.first().ok_or_else(|| Error::Data("empty stream".into()))?;
        let mut engine = Engine::new(algorithm.clone(), first.x.len())?;
        let trace = engine::run_engine(&mut engine, samples)?;
        let report = engine::regret(&trace, engine.maps(), samples, algorithm.lambda)?;
        Ok((trace, Some(report.regret)))
    } else {
        Ok((baselines::run_variant(algorithm, samples)?, None))
    }
}

pub fn run_experiment(cfg: &RunConfig) -> Result<MetricsSummary> {
    let (name, samples) = load_samples(&cfg.data)?;
    run_on_samples(cfg, &name, &samples)
}

pub fn run_on_samples(cfg: &RunConfig, dataset: &str, samples: &[StreamSample]) -> Result<MetricsSummary> {
    let algorithm = resolve(cfg, samples.len());
    let (trace, regret) = execute(&algorithm, samples, cfg.regret)?;
    let mut summary = summarize(algorithm.variant, dataset, algorithm.seed, &trace)?;
    summary.regret = regret;
    if let Some(dir) = &cfg.output_dir {
        write_outputs(dir, &cfg.emit, &trace, &summary)?;
    }
    Ok(summary)
}

pub fn write_outputs(dir: &Path, emit: &EmitFlags, trace: &[TraceRecord], summary: &MetricsSummary) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    if emit.trace_csv {
        write_trace_csv(&dir.join("trace.csv"), trace)?;
    }
    if emit.summary {
        let path = dir.join("summary.json");
        let json = serde_json::to_string_pretty(summary).map_err(|e| Error::Data(e.to_string()))?;
        std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    }
    if emit.plot_data {
        write_plot_data(dir, trace, &summary.variant.to_string())?;
    }
    Ok(())
}

pub fn write_trace_csv(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "{TRACE_HEADER}").map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Data(format!("{}: {e}", path.display()));
    w.write_record(TRACE_COLUMNS.split(',')).map_err(csv_err)?;
    for r in trace {
        let subset = r.subset.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        w.write_record([
            r.t.to_string(),
            format!("{:e}", r.prediction),
            format!("{:e}", r.y),
            (r.labeled as u8).to_string(),
            r.k.to_string(),
            subset,
            format!("{:e}", r.mse),
            format!("{:e}", r.al_eff),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

/// Parsed row of a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub yhat: f64,
    pub y: f64,
    pub a_t: bool,
    pub k: usize,
    pub subset: Vec<usize>,
    pub mse: f64,
    pub al_eff: f64,
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let body = text
        .strip_prefix(TRACE_HEADER)
        .ok_or_else(|| Error::Data(format!("{}: missing '{TRACE_HEADER}' header", path.display())))?;
    let mut reader = csv::Reader::from_reader(body.trim_start().as_bytes());
    let mut rows = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let bad = |m: String| Error::Parse { row, message: m };
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(format!("column {i} is not a number")))
        };
        let int = |i: usize| -> Result<usize> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(format!("column {i} is not an integer")))
        };
        rows.push(TraceRow {
            t: int(0)?,
            yhat: num(1)?,
            y: num(2)?,
            a_t: int(3)? == 1,
            k: int(4)?,
            subset: rec
                .get(5)
                .unwrap_or("")
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| bad(format!("bad subset entry '{s}'"))))
                .collect::<Result<_>>()?,
            mse: num(6)?,
            al_eff: num(7)?,
        });
    }
    Ok(rows)
}

fn write_dat(path: &Path, points: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut s = String::new();
    for (a, b) in points {
        let _ = writeln!(s, "{a} {b:e}");
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn write_plot_data(dir: &Path, trace: &[TraceRecord], label: &str) -> Result<()> {
    let t = |r: &TraceRecord| r.t as f64;
    write_dat(&dir.join("mse.dat"), trace.iter().map(|r| (t(r), r.mse)))?;
    write_dat(&dir.join("al_eff.dat"), trace.iter().map(|r| (t(r), r.al_eff)))?;
    write_dat(&dir.join("k.dat"), trace.iter().map(|r| (t(r), r.k as f64)))?;
    let script = format!(
        "set terminal pngcairo size 900,600\n\
         set output 'mse.png'\n\
         set xlabel 't'\nset ylabel 'MSE'\nset logscale y\n\
         plot 'mse.dat' using 1:2 with lines title '{label}'\n\
         set output 'al_eff.png'\nunset logscale y\nset ylabel 'AL efficiency'\n\
         plot 'al_eff.dat' using 1:2 with lines title '{label}'\n\
         set output 'k.png'\nset ylabel 'K_t'\n\
         plot 'k.dat' using 1:2 with steps title '{label}'\n"
    );
    let path = dir.join("plot.gp");
    std::fs::write(&path, script).map_err(|e| Error::io(&path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub variant: Variant,
    pub final_mse: f64,
    pub final_al_eff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub dataset: String,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("algorithm,variant,mse_e3,al_eff\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{:.4},{:.4}", r.label, r.variant, r.final_mse * 1e3, r.final_al_eff);
        }
        s
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(9);
        let mut s = format!("dataset: {}\n", self.dataset);
        let _ = writeln!(s, "{:<width$}  {:>12}  {:>8}", "algorithm", "MSE (1e-3)", "AL_eff");
        for r in &self.rows {
            let _ = writeln!(s, "{:<width$}  {:>12.4}  {:>8.4}", r.label, r.final_mse * 1e3, r.final_al_eff);
        }
        s
    }
}

/// Runs every config on one shared dataset, in parallel.
pub fn compare(runs: &[RunConfig]) -> Result<ComparisonTable> {
    if runs.len() < 2 {
        return Err(Error::Config("compare needs at least two configurations".into()));
    }
    if runs.iter().any(|r| r.data != runs[0].data) {
        return Err(Error::Config("compared configurations use different datasets".into()));
    }
    let (dataset, samples) = load_samples(&runs[0].data)?;
    let summaries = runs
        .par_iter()
        .map(|r| run_on_samples(r, &dataset, &samples))
        .collect::<Result<Vec<_>>>()?;
    let rows = summaries
        .into_iter()
        .map(|s| ComparisonRow {
            label: s.variant.to_string(),
            variant: s.variant,
            final_mse: s.final_mse,
            final_al_eff: s.final_al_eff,
        })
        .collect();
    Ok(ComparisonTable { dataset, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eta_c: f64,
    pub seed: u64,
    pub final_mse: f64,
    pub final_al_eff: f64,
}

/// Runs `base` for every `(η_c, seed)` pair. Output directories, if any, get
/// one subdirectory per point.
pub fn sweep(base: &RunConfig, eta_cs: &[f64], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    if eta_cs.is_empty() || seeds.is_empty() {
        return Err(Error::Config("sweep needs at least one eta_c and one seed".into()));
    }
    if !base.algorithm.variant.is_active() {
        return Err(Error::Config(format!(
            "sweep varies eta_c, which variant {} does not use",
            base.algorithm.variant
        )));
    }
    let (dataset, samples) = load_samples(&base.data)?;
    let grid: Vec<(f64, u64)> = eta_cs.iter().flat_map(|&e| seeds.iter().map(move |&s| (e, s))).collect();
    let points = grid
        .par_iter()
        .map(|&(eta_c, seed)| {
            let mut cfg = base.clone();
            cfg.algorithm.active.eta_c = eta_c;
            cfg.algorithm.seed = seed;
            cfg.output_dir = base.output_dir.as_ref().map(|d| d.join(format!("eta_c_{eta_c:e}_seed_{seed}")));
            run_on_samples(&cfg, &dataset, &samples).map(|s| SweepPoint {
                eta_c,
                seed,
                final_mse: s.final_mse,
                final_al_eff: s.final_al_eff,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(dir) = &base.output_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut s = String::from("# eta_c seed al_eff mse\n");
        for p in &points {
            let _ = writeln!(s, "{:e} {} {} {:e}", p.eta_c, p.seed, p.final_al_eff, p.final_mse);
        }
        let path = dir.join("tradeoff.dat");
        std::fs::write(&path, s).map_err(|e| Error::io(&path, e))?;
    }
    Ok(points)
}

/// Default configuration for a variant on the synthetic stream.
pub fn synthetic_run(variant: Variant, spec: SyntheticSpec) -> RunConfig {
    let mut algorithm = AlgorithmConfig::standard(variant, spec.len);
    algorithm.selection = SelectionParams::default();
    RunConfig::new(algorithm, DataSource::Synthetic(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SyntheticSpec {
        SyntheticSpec::new(0.3, 0.05, 300, 4, 2)
    }

    #[test]
    fn trace_round_trip_and_recurrence() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = synthetic_run(Variant::AmklAks, spec());
        cfg.output_dir = Some(dir.path().to_path_buf());
        let summary = run_experiment(&cfg).unwrap();
        assert_eq!(summary.final_mse, *summary.mse_curve.last().unwrap());
        let rows = read_trace_csv(&dir.path().join("trace.csv")).unwrap();
        assert_eq!(rows.len(), 300);
        let mut prev = 0.0;
        for r in &rows {
            let t = r.t as f64;
            let expect = ((t - 1.0) * prev + (r.yhat - r.y).powi(2)) / t;
            assert!((r.mse - expect).abs() <= 1e-9, "t={}", r.t);
            prev = r.mse;
            assert_eq!(r.k, r.subset.len());
        }
        for f in ["summary.json", "mse.dat", "al_eff.dat", "k.dat", "plot.gp"] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
    }

    #[test]
    fn compare_rules() {
        let a = synthetic_run(Variant::Raker, spec());
        assert!(matches!(compare(std::slice::from_ref(&a)), Err(Error::Config(_))));
        let mut other = a.clone();
        other.data = DataSource::Synthetic(SyntheticSpec::new(1.0, 0.0, 10, 2, 1));
        assert!(compare(&[a.clone(), other]).is_err());
        let t = compare(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(t.rows[0], t.rows[1]);
        assert!(t.to_text().contains("raker"));
        assert_eq!(t.to_csv().lines().count(), 3);
    }

    #[test]
    fn overrides_switch_variant() {
        let mut cfg = synthetic_run(Variant::Raker, spec());
        Overrides {
            variant: Some(Variant::Amkl),
            eta_c: Some(1e-3),
            seed: Some(4),
            ..Default::default()
        }
        .apply(&mut cfg);
        assert_eq!(cfg.algorithm.variant, Variant::Amkl);
        assert!(cfg.algorithm.active.enabled);
        assert_eq!(cfg.algorithm.active.eta_c, 1e-3);
        assert_eq!(cfg.algorithm.seed, 4);
        cfg.algorithm.validate().unwrap();
    }

    #[test]
    fn config_file_formats() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = synthetic_run(Variant::OmklAks, spec());
        let j = dir.path().join("c.json");
        std::fs::write(&j, serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(RunConfig::from_file(&j).unwrap(), cfg);
        let t = dir.path().join("c.toml");
        std::fs::write(&t, toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(RunConfig::from_file(&t).unwrap(), cfg);
    }

    #[test]
    fn sweep_grid() {
        let cfg = synthetic_run(Variant::AmklAks, spec());
        let pts = sweep(&cfg, &[5e-5, 5e-3], &[0, 1]).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(sweep(&synthetic_run(Variant::Raker, spec()), &[1e-3], &[0]).is_err());
    }
}
