//! Dataset ingestion and synthetic streams.
//!
//! Every emitted sample has a unit-norm feature vector and a label scaled to
//! `[0, 1]` with the dataset-wide min and max. Samples keep file order.

use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::features::{exact_kernel, KernelSpec};
use crate::seed::{self, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSample {
    pub x: Vec<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Unit ℓ₂ norm per feature row, min-max scaled labels.
    #[default]
    UnitNormFeaturesMinmaxLabels,
}

/// Key-value description of a CSV dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    /// Data file, relative to the manifest's directory unless absolute.
    pub path: PathBuf,
    /// Expected number of features after column selection.
    pub feature_count: usize,
    /// Expected number of samples after row filtering.
    pub sample_count: usize,
    /// Label column (0-based); the last column when absent.
    #[serde(default)]
    pub label_column: Option<usize>,
    /// Columns ignored besides the label.
    #[serde(default)]
    pub exclude_columns: Vec<usize>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// Fields separated by runs of blanks; overrides `delimiter`.
    #[serde(default)]
    pub whitespace_separated: bool,
    #[serde(default)]
    pub has_header: bool,
    /// Numbers written with a decimal comma.
    #[serde(default)]
    pub decimal_comma: bool,
    /// Value marking a missing entry; rows holding it are dropped.
    #[serde(default)]
    pub missing_sentinel: Option<f64>,
    /// Keep at most this many rows, in file order.
    #[serde(default)]
    pub max_rows: Option<usize>,
    /// Hex SHA-256 of the data file.
    #[serde(default)]
    pub sha256: Option<String>,
    #[serde(default)]
    pub normalization: Normalization,
}

fn default_delimiter() -> char {
    ','
}

impl DatasetManifest {
    /// Reads a TOML manifest; a relative `path` is resolved against the
    /// manifest's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: DatasetManifest =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if manifest.path.is_relative() {
            if let Some(dir) = path.parent() {
                manifest.path = dir.join(&manifest.path);
            }
        }
        Ok(manifest)
    }

    pub fn data_available(&self) -> bool {
        self.path.is_file()
    }
}

/// Result of [`load_csv`].
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub samples: Vec<StreamSample>,
    /// Rows dropped for missing or non-numeric entries.
    pub dropped_rows: usize,
    pub sha256: String,
    /// Differences from the manifest's expected shape or hash.
    pub drift: Vec<String>,
}

fn parse_number(field: &str, decimal_comma: bool) -> Option<f64> {
    let f = field.trim();
    if f.is_empty() {
        return None;
    }
    let v = if decimal_comma {
        f.replace(',', ".").parse::<f64>().ok()
    } else {
        f.parse::<f64>().ok()
    }?;
    v.is_finite().then_some(v)
}

pub fn load_csv(manifest: &DatasetManifest) -> Result<LoadedDataset> {
    let bytes = std::fs::read(&manifest.path).map_err(|e| Error::io(&manifest.path, e))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    if !manifest.delimiter.is_ascii() {
        return Err(Error::Config(format!("delimiter {:?} is not ASCII", manifest.delimiter)));
    }
    let text;
    let (body, delimiter) = if manifest.whitespace_separated {
        text = String::from_utf8_lossy(&bytes)
            .lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n");
        (text.as_bytes(), b',')
    } else {
        (bytes.as_slice(), manifest.delimiter as u8)
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(manifest.has_header)
        .flexible(true)
        .from_reader(body);

    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut dropped_rows = 0;
    let mut width: Option<usize> = None;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Parse {
                row,
                message: format!("expected {w} fields, found {}", record.len()),
            });
        }
        let label_col = manifest.label_column.unwrap_or(w - 1);
        if label_col >= w {
            return Err(Error::Config(format!("label column {label_col} beyond {w} fields")));
        }
        let mut x = Vec::with_capacity(w);
        let mut y = None;
        let mut missing = false;
        for (col, field) in record.iter().enumerate() {
            if col != label_col && manifest.exclude_columns.contains(&col) {
                continue;
            }
            match parse_number(field, manifest.decimal_comma) {
                Some(v) if manifest.missing_sentinel != Some(v) => {
                    if col == label_col {
                        y = Some(v);
                    } else {
                        x.push(v);
                    }
                }
                _ => missing = true,
            }
        }
        if missing {
            dropped_rows += 1;
            continue;
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Parse {
                row,
                message: "feature row has zero norm".into(),
            });
        }
        x.iter_mut().for_each(|v| *v /= norm);
        rows.push((x, y.expect("label parsed")));
        if manifest.max_rows.is_some_and(|m| rows.len() >= m) {
            break;
        }
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{}: no usable rows", manifest.path.display())));
    }

    let mut drift = Vec::new();
    let d = rows[0].0.len();
    if d != manifest.feature_count {
        drift.push(format!("feature count {d}, manifest expects {}", manifest.feature_count));
    }
    if rows.len() != manifest.sample_count {
        drift.push(format!("sample count {}, manifest expects {}", rows.len(), manifest.sample_count));
    }
    if let Some(expected) = &manifest.sha256 {
        if !expected.eq_ignore_ascii_case(&sha256) {
            drift.push(format!("sha256 {sha256}, manifest expects {expected}"));
        }
    }

    let labels: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let scaled = minmax(&labels);
    let samples = rows
        .into_iter()
        .zip(scaled)
        .map(|((x, _), y)| StreamSample { x, y })
        .collect();
    Ok(LoadedDataset {
        samples,
        dropped_rows,
        sha256,
        drift,
    })
}

/// Min-max scaling to `[0, 1]`; a constant input maps to zeros.
pub fn minmax(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        values.iter().map(|v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; values.len()]
    }
}

/// Synthetic stream whose target lives in the RKHS of one Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub sigma2: f64,
    pub noise_std: f64,
    pub len: usize,
    pub dim: usize,
    #[serde(default = "default_centers")]
    pub centers: usize,
    pub seed: u64,
}

fn default_centers() -> usize {
    20
}

impl SyntheticSpec {
    pub fn new(sigma2: f64, noise_std: f64, len: usize, dim: usize, seed: u64) -> Self {
        Self {
            sigma2,
            noise_std,
            len,
            dim,
            centers: default_centers(),
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticStream {
    pub samples: Vec<StreamSample>,
    pub generating_kernel: KernelSpec,
}

impl SyntheticStream {
    /// Position of the generating kernel in `dictionary` (closest bandwidth
    /// on a log scale).
    pub fn generating_index(&self, dictionary: &[KernelSpec]) -> Option<usize> {
        let target = self.generating_kernel.sigma2.ln();
        dictionary
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = (a.1.sigma2.ln() - target).abs();
                let db = (b.1.sigma2.ln() - target).abs();
                da.total_cmp(&db)
            })
            .map(|(i, _)| i)
    }
}

fn random_unit(dim: usize, rng: &mut seed::Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// Unit-norm Gaussian-direction inputs with labels
/// `y = Σ_m c_m κ(x, u_m) + ε`, min-max scaled to `[0, 1]`.
pub fn synthetic_stream(spec: &SyntheticSpec) -> Result<SyntheticStream> {
    let kernel = KernelSpec::gaussian(spec.sigma2)?;
    if spec.len == 0 || spec.dim == 0 || spec.centers == 0 {
        return Err(Error::invalid("synthetic stream needs len, dim and centers >= 1"));
    }
    if !(spec.noise_std.is_finite() && spec.noise_std >= 0.0) {
        return Err(Error::invalid("noise_std must be nonnegative"));
    }
    let mut rng = seed::substream(spec.seed, Stream::Synthetic);
    let centers: Vec<Vec<f64>> = (0..spec.centers).map(|_| random_unit(spec.dim, &mut rng)).collect();
    let coeffs: Vec<f64> = (0..spec.centers).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut xs = Vec::with_capacity(spec.len);
    let mut ys = Vec::with_capacity(spec.len);
    for _ in 0..spec.len {
        let x = random_unit(spec.dim, &mut rng);
        let mut y = 0.0;
        for (c, u) in coeffs.iter().zip(&centers) {
            y += c * exact_kernel(&kernel, &x, u)?;
        }
        let noise: f64 = StandardNormal.sample(&mut rng);
        ys.push(y + spec.noise_std * noise);
        xs.push(x);
    }
    let samples = xs
        .into_iter()
        .zip(minmax(&ys))
        .map(|(x, y)| StreamSample { x, y })
        .collect();
    Ok(SyntheticStream {
        samples,
        generating_kernel: kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn manifest(path: PathBuf) -> DatasetManifest {
        DatasetManifest {
            name: "t".into(),
            path,
            feature_count: 2,
            sample_count: 3,
            label_column: None,
            exclude_columns: vec![],
            delimiter: ',',
            whitespace_separated: false,
            has_header: false,
            decimal_comma: false,
            missing_sentinel: None,
            max_rows: None,
            sha256: None,
            normalization: Normalization::default(),
        }
    }

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_and_normalizes() {
        let f = write("3,4,10\n1,0,20\n0,2,30\n");
        let d = load_csv(&manifest(f.path().into())).unwrap();
        assert_eq!(d.samples.len(), 3);
        assert!(d.drift.is_empty());
        assert_eq!(d.samples[0].x, vec![0.6, 0.8]);
        let ys: Vec<f64> = d.samples.iter().map(|s| s.y).collect();
        assert_eq!(ys, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn constant_labels_become_zero() {
        let f = write("1,1,5\n2,1,5\n");
        let d = load_csv(&manifest(f.path().into())).unwrap();
        assert!(d.samples.iter().all(|s| s.y == 0.0));
        assert_eq!(d.drift.len(), 1);
    }

    #[test]
    fn malformed_row_reports_index() {
        let f = write("1,1,5\n2,1\n");
        match load_csv(&manifest(f.path().into())) {
            Err(Error::Parse { row: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_norm_row_is_rejected() {
        let f = write("1,1,5\n0,0,1\n");
        assert!(matches!(load_csv(&manifest(f.path().into())), Err(Error::Parse { row: 1, .. })));
    }

    #[test]
    fn missing_values_are_dropped_and_counted() {
        let f = write("date;a;b;y;;\nx;1,5;-200;3;;\ny;2,0;1;4;;\nz;na;1;4;;\n");
        let mut m = manifest(f.path().into());
        m.delimiter = ';';
        m.has_header = true;
        m.decimal_comma = true;
        m.label_column = Some(3);
        m.exclude_columns = vec![0, 4, 5];
        m.missing_sentinel = Some(-200.0);
        m.sample_count = 1;
        let d = load_csv(&m).unwrap();
        assert_eq!(d.samples.len(), 1);
        assert_eq!(d.dropped_rows, 2);
        let n = (4.0f64 + 1.0).sqrt();
        assert!((d.samples[0].x[0] - 2.0 / n).abs() < 1e-15);
    }

    #[test]
    fn whitespace_separated_rows() {
        let f = write("  1.0   0.0  7\n 0.0\t2.0 9  \n");
        let mut m = manifest(f.path().into());
        m.whitespace_separated = true;
        m.sample_count = 2;
        let d = load_csv(&m).unwrap();
        assert_eq!(d.samples[1].x, vec![0.0, 1.0]);
        assert_eq!(d.samples[1].y, 1.0);
    }

    #[test]
    fn manifest_round_trip_and_hash_drift() {
        let f = write("1,2,3\n");
        let dir = tempfile::tempdir().unwrap();
        let mpath = dir.path().join("m.toml");
        let mut m = manifest(f.path().into());
        m.sha256 = Some("00".into());
        std::fs::write(&mpath, toml::to_string(&m).unwrap()).unwrap();
        let back = DatasetManifest::from_file(&mpath).unwrap();
        assert_eq!(back, m);
        let d = load_csv(&back).unwrap();
        assert!(d.drift.iter().any(|s| s.contains("sha256")));
        assert_eq!(d.sha256.len(), 64);
    }

    #[test]
    fn synthetic_invariants() {
        let spec = SyntheticSpec::new(0.5, 0.05, 500, 4, 3);
        let s = synthetic_stream(&spec).unwrap();
        assert_eq!(s.samples.len(), 500);
        for smp in &s.samples {
            let n: f64 = smp.x.iter().map(|v| v * v).sum();
            assert!((n - 1.0).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&smp.y));
        }
        let again = synthetic_stream(&spec).unwrap();
        assert_eq!(s.samples, again.samples);
        let one = synthetic_stream(&SyntheticSpec::new(0.5, 0.0, 1, 4, 3)).unwrap();
        assert_eq!(one.samples.len(), 1);
        let n: f64 = one.samples[0].x.iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generating_index_picks_closest_bandwidth() {
        let s = synthetic_stream(&SyntheticSpec::new(0.1, 0.0, 2, 2, 1)).unwrap();
        let dict = crate::features::gaussian_dictionary();
        assert_eq!(s.generating_index(&dict), Some(6));
    }
}
