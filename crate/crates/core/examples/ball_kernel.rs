//! Poisson kernel of the unit ball and its boundary behaviour along the normal.

use plurikernel::domain::DomainSpec;
use plurikernel::envelope;
use plurikernel::extrapolate::Schedule;
use plurikernel::kernels::{boundary_limit, BoundaryCurve, omega_ball};
use plurikernel::linalg::{from_reals, unit};

fn main() -> plurikernel::Result<()> {
    for n in 1..=3 {
        let domain = DomainSpec::unit_ball(n);
        let p = unit(n, 0);
        let center = envelope::kernel(&domain, &p, &from_reals(&vec![0.0; n]))?;
        let frame = domain.boundary_frame(&p)?;
        let curve = BoundaryCurve::linear(p.clone(), frame.nu.clone());
        let lim = boundary_limit(|z| omega_ball(&p, z), &frame.theta_coeffs, &curve, Schedule::default())?;
        println!(
            "n = {n}: Omega(0) = {:?}, lim Omega(p - h nu) h = {:.10} (predicted {}, error {:.1e})",
            center.exact(),
            lim.estimate.value,
            lim.prediction,
            lim.estimate.error
        );
    }
    Ok(())
}
