//! Pluriharmonic functions are reproduced by integrating against |Omega|^n
//! over the sphere.

use plurikernel::domain::DomainSpec;
use plurikernel::expr::Expr;
use plurikernel::linalg::from_pairs;
use plurikernel::reproducing::{reproduce, sphere_quadrature};

fn main() -> plurikernel::Result<()> {
    let ball = DomainSpec::unit_ball(2);
    let z = from_pairs(&[(0.3, 0.2), (-0.1, 0.5)]);
    for m in [16, 32, 64] {
        let rule = sphere_quadrature(2, m)?;
        println!("m = {m} ({} nodes, mass {:.12})", rule.len(), rule.mass());
        for src in ["1", "re(z1)", "re(z1*z2)", "im(z1^2) + 3*re(z2)"] {
            let f = Expr::parse(src)?;
            let v = reproduce(&ball, |x| f.eval_real(x), &z, &rule)?;
            println!("  {src:<22} {v:+.12}  (exact {:+.12})", f.eval_real(&z));
        }
    }
    Ok(())
}
