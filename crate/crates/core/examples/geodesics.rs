//! Complex geodesics of the ball ending at a boundary point, in CHL
//! normalization, and the restriction of the kernel to them.

use plurikernel::domain::DomainSpec;
use plurikernel::geodesics::{chl_geodesic, disc_grid, geodesic_through, restriction_identity_check};
use plurikernel::linalg::{from_pairs, unit};

fn main() -> plurikernel::Result<()> {
    let ball = DomainSpec::unit_ball(2);
    let p = unit(2, 0);
    let grid = disc_grid(200, 0.95);

    let through = geodesic_through(&ball, &from_pairs(&[(0.2, 0.1), (0.0, 0.4)]), &p, true)?;
    let v = from_pairs(&[(0.8, 0.0), (0.0, 0.6)]);
    let chl = chl_geodesic(&ball, &p, &v)?;

    for (name, g) in [("through z", &through), ("chl(v)", &chl)] {
        let data = g.boundary_data();
        println!("{name}:");
        println!("  phi(1)           = {:?}", data.phi_1);
        println!("  phi'(1)          = {:?}", data.phi_prime_1);
        println!("  Im<phi''(1), nu> = {:.2e}", data.im_second_dot_nu);
        println!("  theta(phi'(1))   = {}", g.theta_of_derivative());
        println!("  restriction identity deviation = {:.2e}", restriction_identity_check(&ball, g, &grid)?);
    }
    Ok(())
}
