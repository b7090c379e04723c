//! Every algorithm variant, including the comparators, on one stream.

use amkl::baselines;
use amkl::data::{synthetic_stream, SyntheticSpec};
use amkl::engine::{AlgorithmConfig, Variant};

fn main() -> amkl::Result<()> {
    let stream = synthetic_stream(&SyntheticSpec::new(0.316, 0.05, 1500, 3, 4))?;
    println!("{:<15} {:>12} {:>8}", "variant", "MSE (1e-3)", "AL_eff");
    for variant in Variant::ALL {
        let cfg = AlgorithmConfig::standard(variant, stream.samples.len());
        let trace = baselines::run_variant(&cfg, &stream.samples)?;
        let last = trace.last().expect("nonempty trace");
        println!("{:<15} {:>12.4} {:>8.4}", variant.name(), last.mse * 1e3, last.al_eff);
    }
    Ok(())
}
