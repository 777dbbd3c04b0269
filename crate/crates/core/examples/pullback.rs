//! Kernels transported by biholomorphisms: an automorphism of the ball and
//! an affine map onto a translated, dilated ball.

use plurikernel::domain::DomainSpec;
use plurikernel::kernels::{omega_ball, pullback_kernel, Biholomorphism};
use plurikernel::linalg::{from_pairs, from_reals, unit};

fn main() -> plurikernel::Result<()> {
    let ball = DomainSpec::unit_ball(2);
    let q = unit(2, 1);
    let map = Biholomorphism::BallAutomorphism { anchor: from_pairs(&[(0.3, 0.1), (0.2, -0.2)]) };
    let k = pullback_kernel(map, &ball, &q)?;
    println!("pole of the pulled-back kernel: {:?}", k.p.as_slice());
    println!("renormalization to the canonical couple: {:.10}", k.renormalization);
    for z in [from_reals(&[0.0, 0.0]), from_pairs(&[(0.4, 0.0), (0.0, -0.3)])] {
        println!(
            "z = {:?}: pulled back {:.10}, direct {:.10}",
            z.as_slice(),
            k.eval_canonical(&z)?,
            omega_ball(&k.p, &z)?
        );
    }
    let target = DomainSpec::ball(from_reals(&[1.0, 0.0]), 2.0)?;
    let affine = Biholomorphism::Affine { scale: 2.0, shift: from_reals(&[1.0, 0.0]) };
    let k = pullback_kernel(affine, &target, &from_reals(&[3.0, 0.0]))?;
    println!("affine pullback at 0: {:.10} (renormalization {})", k.eval_canonical(&from_reals(&[0.0, 0.0]))?, k.renormalization);
    Ok(())
}
