//! Boundary dilation of a disc automorphism and the horoball inclusions it
//! controls.

use num_complex::Complex64;
use plurikernel::julia::{horoball_inclusion_check, lambda_estimate, MapSpec, SamplingPlan};
use plurikernel::linalg::from_reals;

fn main() -> plurikernel::Result<()> {
    let one = from_reals(&[1.0]);
    let f = MapSpec::Blaschke { a: Complex64::new(0.5, 0.0) };
    let r = lambda_estimate(&f, 1, &one, &one, SamplingPlan::default())?;
    println!("grid sup {:.10}, normal ray limit {}, lambda {}", r.grid_sup, r.normal_ray_limit, r.lambda_estimate);
    let lambda = r.lambda_estimate.finite().expect("finite dilation");
    for l in [lambda, lambda / 2.0] {
        let inc = horoball_inclusion_check(&f, 1, &one, &one, l, &[0.1, 1.0, 10.0], 500, 1)?;
        println!("lambda = {l:.6}:");
        for rr in &inc.radii {
            println!(
                "  R = {:>4}: {} samples, {} violations, min relative margin {:.2e}",
                rr.radius, rr.sampled, rr.violations, rr.min_relative_margin
            );
        }
    }
    let q = from_reals(&[-1.0]);
    let off = lambda_estimate(&f, 1, &one, &q, SamplingPlan::default())?;
    println!("with the wrong target q = -1: lambda {}", off.lambda_estimate);
    Ok(())
}
