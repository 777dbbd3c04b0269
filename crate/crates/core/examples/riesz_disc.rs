//! On the disc a subharmonic function is recovered from its boundary values
//! once the Green potential of its Laplacian is subtracted.

use num_complex::Complex64;
use plurikernel::reproducing::{riesz_correction_1d, sphere_quadrature};

fn main() -> plurikernel::Result<()> {
    let rule = sphere_quadrature(1, 256)?;
    let cases: [(&str, fn(Complex64) -> f64, fn(Complex64) -> f64); 3] = [
        ("|w|^2", |w| w.norm_sqr(), |_| 4.0),
        ("|w|^4", |w| w.norm_sqr().powi(2), |w| 16.0 * w.norm_sqr()),
        ("exp(re w)", |w| w.re.exp(), |w| w.re.exp()),
    ];
    for z in [Complex64::new(0.0, 0.0), Complex64::new(0.4, -0.3)] {
        for (name, f, lap) in cases {
            let r = riesz_correction_1d(f, lap, z, &rule, 200, 200)?;
            println!(
                "z = {z}: {name:<10} boundary {:.8} correction {:.8} value {:.8} (f(z) = {:.8})",
                r.boundary_term,
                r.correction,
                r.value,
                f(z)
            );
        }
    }
    Ok(())
}
