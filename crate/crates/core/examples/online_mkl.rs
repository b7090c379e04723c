//! Raker on a synthetic stream: per-kernel OGD combined with exponential weights.

use amkl::data::{synthetic_stream, SyntheticSpec};
use amkl::engine::{self, AlgorithmConfig, Engine, Variant};

fn main() -> amkl::Result<()> {
    let stream = synthetic_stream(&SyntheticSpec::new(1.0, 0.05, 4000, 3, 1))?;
    let cfg = AlgorithmConfig::standard(Variant::Raker, stream.samples.len());
    let mut engine = Engine::new(cfg.clone(), 3)?;
    let trace = engine::run_engine(&mut engine, &stream.samples)?;
    for r in trace.iter().filter(|r| r.t % 1000 == 0) {
        println!("t = {:>4}  mse = {:.4e}", r.t, r.mse);
    }
    let p = engine.distribution();
    let best = p.argmax();
    println!(
        "heaviest kernel: sigma2 = {:.3} (p = {:.3}), generating sigma2 = 1",
        cfg.dictionary[best].sigma2, p.p[best]
    );
    Ok(())
}
