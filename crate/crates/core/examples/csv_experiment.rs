//! Loads a dataset through a manifest and runs AMKL-AKS on it.
//!
//! Without an argument a small CSV is written to a temporary directory first.
//! Pass a manifest path (for example `manifests/twitter.toml`) to use real data.

use amkl::data::{load_csv, DatasetManifest};
use amkl::engine::{self, AlgorithmConfig, Variant};

fn main() -> amkl::Result<()> {
    let dir = std::env::temp_dir().join("amkl-csv-example");
    let manifest_path = match std::env::args().nth(1) {
        Some(path) => path.into(),
        None => {
            std::fs::create_dir_all(&dir).map_err(|e| amkl::Error::Data(e.to_string()))?;
            let mut csv = String::from("a,b,c,target\n");
            for i in 0..500 {
                let t = i as f64 / 50.0;
                csv += &format!("{:.4},{:.4},{:.4},{:.4}\n", t.sin(), t.cos(), (t / 3.0).sin(), (2.0 * t).sin() + 3.0);
            }
            std::fs::write(dir.join("toy.csv"), csv).map_err(|e| amkl::Error::Data(e.to_string()))?;
            let manifest = "name = \"toy\"\npath = \"toy.csv\"\nfeature_count = 3\nsample_count = 500\nlabel_column = 3\nhas_header = true\n";
            std::fs::write(dir.join("toy.toml"), manifest).map_err(|e| amkl::Error::Data(e.to_string()))?;
            dir.join("toy.toml")
        }
    };
    let manifest = DatasetManifest::from_file(&manifest_path)?;
    let data = load_csv(&manifest)?;
    println!("{}: {} samples, {} rows dropped, sha256 {}", manifest.name, data.samples.len(), data.dropped_rows, data.sha256);
    for note in &data.drift {
        println!("note: {note}");
    }
    let cfg = AlgorithmConfig::standard(Variant::AmklAks, data.samples.len());
    let trace = engine::run(&cfg, &data.samples)?;
    let last = trace.last().expect("nonempty trace");
    println!("final mse = {:.4e}, al_eff = {:.3}", last.mse, last.al_eff);
    Ok(())
}
