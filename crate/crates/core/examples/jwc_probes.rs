//! Derivative probes along a tilted approach to the boundary point.

use plurikernel::extrapolate::Schedule;
use plurikernel::julia::{condition_equivalence_check, jwc_derivative_probes, MapSpec};
use plurikernel::linalg::{from_reals, unit, CVector};

fn main() -> plurikernel::Result<()> {
    let e1 = unit(2, 0);
    let f = MapSpec::BallAuto { anchor: from_reals(&[0.5, 0.0]) };
    let q = -&e1;
    for aperture in [0.0, 0.5, 2.0] {
        let r = jwc_derivative_probes(&f, 2, &e1, &q, aperture, Schedule::default())?;
        println!(
            "aperture {aperture}: cone constant {:.3}, probe (1) -> {:.10}, (2) -> {:.2e}, (3) -> {:.2e}, max (4) {:.3}",
            r.cone_constant, r.limit1_re.value, r.limit2.value, r.limit3.value, r.max[3]
        );
    }
    let c = condition_equivalence_check(&f, 2, &e1, &q, &CVector::zeros(2), &CVector::zeros(2), Schedule::default())?;
    println!(
        "conditions: lambda {}, Kobayashi gap {}, distance ratio {}, consistent {}",
        c.lambda, c.kobayashi_gap, c.distance_ratio, c.consistent
    );
    Ok(())
}
