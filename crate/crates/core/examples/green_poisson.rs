//! The inward normal derivative of the Green function at a boundary point
//! reproduces the Poisson kernel.

use plurikernel::domain::DomainSpec;
use plurikernel::green::{demailly_density, normal_derivative_green, DEFAULT_H0, DEFAULT_HALVINGS};
use plurikernel::kernels::omega_ball;
use plurikernel::linalg::{from_pairs, unit};

fn main() -> plurikernel::Result<()> {
    let ball = DomainSpec::unit_ball(2);
    let p = unit(2, 0);
    let z = from_pairs(&[(0.3, -0.2), (0.1, 0.4)]);
    let r = normal_derivative_green(&ball, &z, &p, DEFAULT_H0, DEFAULT_HALVINGS)?;
    for (h, q) in &r.step_sequence {
        println!("h = {h:.4e}  G/h = {q:.12}");
    }
    println!("extrapolated {:.12} +- {:.1e}", r.value, r.error);
    println!("kernel       {:.12}", omega_ball(&p, &z)?);
    println!("Demailly density at p: {:.10}", demailly_density(&ball, &z, &p)?);
    Ok(())
}
