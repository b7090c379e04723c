//! The harness: a comparison table across variants and an eta_c sweep.

use amkl::data::SyntheticSpec;
use amkl::engine::Variant;
use amkl::harness;

fn main() -> amkl::Result<()> {
    let spec = SyntheticSpec::new(1.0, 0.05, 2000, 3, 6);
    let runs: Vec<_> = [Variant::Raker, Variant::OmklAks, Variant::Amkl, Variant::AmklAks]
        .into_iter()
        .map(|v| harness::synthetic_run(v, spec.clone()))
        .collect();
    print!("{}", harness::compare(&runs)?.to_text());

    let base = harness::synthetic_run(Variant::AmklAks, spec);
    println!("\n{:>8}  {:>4}  {:>8}  {:>10}", "eta_c", "seed", "AL_eff", "MSE (1e-3)");
    for p in harness::sweep(&base, &[5e-5, 5e-4, 5e-3, 5e-2], &[0, 1])? {
        println!("{:>8.0e}  {:>4}  {:>8.4}  {:>10.4}", p.eta_c, p.seed, p.final_al_eff, p.final_mse * 1e3);
    }
    Ok(())
}
