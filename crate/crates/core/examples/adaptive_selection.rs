//! Adaptive kernel selection: the subset size shrinks as the weights concentrate.

use amkl::data::{synthetic_stream, SyntheticSpec};
use amkl::engine::{self, AlgorithmConfig, Variant};

fn main() -> amkl::Result<()> {
    let stream = synthetic_stream(&SyntheticSpec::new(1.0, 0.05, 3000, 3, 2))?;
    let cfg = AlgorithmConfig::standard(Variant::OmklAks, stream.samples.len());
    let trace = engine::run(&cfg, &stream.samples)?;
    for r in trace.iter().filter(|r| [1, 10, 100, 1000, 3000].contains(&r.t)) {
        println!("t = {:>4}  K = {:>2}  subset = {:?}", r.t, r.k, r.subset);
    }
    let mean_k = trace.iter().map(|r| r.k as f64).sum::<f64>() / trace.len() as f64;
    println!("mean subset size: {mean_k:.2} of {}", cfg.dictionary.len());
    Ok(())
}
