//! Random Fourier features approach the exact Gaussian kernel as D grows.

use amkl::features::{exact_kernel, FeatureMap, KernelSpec, RandomFeatureMap};

fn main() -> amkl::Result<()> {
    let kernel = KernelSpec::gaussian(1.0)?;
    let x = [0.3, -0.2, 0.5];
    let y = [0.1, 0.4, 0.2];
    let exact = exact_kernel(&kernel, &x, &y)?;
    println!("exact kernel value: {exact:.6}");
    for d in [10, 100, 1000, 10000] {
        // Mean absolute error over independent draws of the map.
        let mut err = 0.0;
        for seed in 0..20 {
            let map = FeatureMap::from(RandomFeatureMap::sample(kernel, d, 3, seed)?);
            err += (map.map(&x)?.dot(&map.map(&y)?) - exact).abs() / 20.0;
        }
        println!("D = {d:>5}: mean error {err:.2e}");
    }
    Ok(())
}
