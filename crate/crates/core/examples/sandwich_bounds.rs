//! Certified bounds for the kernel of an ellipsoid from its tangent balls.

use plurikernel::domain::DomainSpec;
use plurikernel::envelope::{normal_ratio, sandwich_bounds};
use plurikernel::extrapolate::Schedule;
use plurikernel::linalg::{from_reals, unit};

fn main() -> plurikernel::Result<()> {
    let e = DomainSpec::ellipsoid(vec![1.0, 2.0])?;
    let p = unit(2, 0);
    let balls = e.tangent_balls(&p)?;
    println!("inner ball radius {}, outer ball radius {}", balls.inner.radius, balls.outer.radius);
    for t in [0.9, 0.5, 0.0, -0.5] {
        let kv = sandwich_bounds(&e, &p, &from_reals(&[t, 0.0]))?;
        println!("z = {t:>5} e1: [{:.6}, {:.6}]", kv.lower(), kv.upper());
    }
    let r = normal_ratio(&e, &p, Schedule::default())?;
    for (h, ratio) in r.samples.iter().step_by(4) {
        println!("h = {h:.3e}: upper/lower = {ratio:.8}");
    }
    println!("limit {:.10} (error {:.1e})", r.limit.value, r.limit.error);
    Ok(())
}
