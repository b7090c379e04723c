//! Regret against the best kernel's hindsight ridge solution at growing horizons.

use amkl::data::{synthetic_stream, SyntheticSpec};
use amkl::engine::{self, AlgorithmConfig, Engine, Variant};

fn main() -> amkl::Result<()> {
    for t in [1000, 4000, 16000] {
        let stream = synthetic_stream(&SyntheticSpec::new(1.0, 0.05, t, 2, 0))?;
        let cfg = AlgorithmConfig::standard(Variant::Raker, t);
        let mut engine = Engine::new(cfg.clone(), 2)?;
        let trace = engine::run_engine(&mut engine, &stream.samples)?;
        let report = engine::regret(&trace, engine.maps(), &stream.samples, cfg.lambda)?;
        println!(
            "T = {t:>5}: regret = {:>8.3}, regret/sqrt(T) = {:.3}, best sigma2 = {:.3}",
            report.regret,
            report.regret / (t as f64).sqrt(),
            cfg.dictionary[report.best_kernel].sigma2
        );
    }
    Ok(())
}
