//! Saves the engine mid-stream, reloads it and checks the resumed run matches.

use amkl::data::{synthetic_stream, SyntheticSpec};
use amkl::engine::{self, AlgorithmConfig, Engine, Variant};

fn main() -> amkl::Result<()> {
    let stream = synthetic_stream(&SyntheticSpec::new(1.0, 0.05, 2000, 3, 5))?;
    let s = &stream.samples;
    let cfg = AlgorithmConfig::standard(Variant::AmklAks, s.len());
    let full = engine::run(&cfg, s)?;

    let mut first = Engine::new(cfg, 3)?;
    engine::run_engine(&mut first, &s[..1000])?;
    let path = std::env::temp_dir().join("amkl-checkpoint-example.json");
    first.save(&path)?;
    let mut resumed = Engine::load(&path)?;
    let tail = engine::run_engine(&mut resumed, &s[1000..])?;

    let same = full[1000..].iter().zip(&tail).all(|(a, b)| a.prediction == b.prediction && a.labeled == b.labeled);
    println!("checkpoint at {}: resumed run identical = {same}", path.display());
    Ok(())
}
