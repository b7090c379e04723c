//! Active labeling with a counting oracle: labels are requested only when the
//! kernel functions disagree.

use amkl::data::{synthetic_stream, SyntheticSpec};
use amkl::engine::{AlgorithmConfig, Engine, Variant};

fn main() -> amkl::Result<()> {
    let stream = synthetic_stream(&SyntheticSpec::new(1.0, 0.02, 5000, 3, 3))?;
    for eta_c in [5e-4, 5e-3, 5e-2] {
        let mut cfg = AlgorithmConfig::standard(Variant::AmklAks, stream.samples.len());
        cfg.active.eta_c = eta_c;
        let mut engine = Engine::new(cfg, 3)?;
        let mut requests = 0;
        let mut sq = 0.0;
        for s in &stream.samples {
            let y = s.y;
            let mut oracle = |_t: usize| {
                requests += 1;
                Ok(y)
            };
            let out = engine.step(&s.x, &mut oracle)?;
            sq += (out.prediction - y).powi(2);
        }
        println!(
            "eta_c = {eta_c:.0e}: {requests} of {} labels requested, mse = {:.4e}",
            stream.samples.len(),
            sq / stream.samples.len() as f64
        );
    }
    Ok(())
}
