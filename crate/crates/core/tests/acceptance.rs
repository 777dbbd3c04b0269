//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use plurikernel::domain::DomainSpec;
use plurikernel::envelope::{self, normal_ratio};
use plurikernel::extrapolate::{richardson, ExtReal, Schedule};
use plurikernel::geodesics::{chl_geodesic, disc_grid, restriction_identity_check};
use plurikernel::green::green_omega_identity_check;
use plurikernel::julia::{
    condition_equivalence_check, horoball_inclusion_check, jwc_derivative_probes, lambda_estimate, MapSpec,
    SamplingPlan,
};
use plurikernel::kernels::KernelValue;
use plurikernel::linalg::{from_reals, hermitian, norm, unit, CVector};
use plurikernel::reproducing::{reproduce, riesz_correction_1d, sphere_quadrature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_sphere(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    let v = CVector::from_iterator(
        n,
        (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    );
    &v / Complex64::new(norm(&v), 0.0)
}

fn random_ball(rng: &mut ChaCha8Rng, n: usize, r_max: f64) -> CVector {
    let r = r_max * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
    random_sphere(rng, n) * Complex64::new(r, 0.0)
}

fn ball_normal_limit() -> Outcome {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let domain = DomainSpec::unit_ball(n);
        let p = unit(n, 0);
        let values: Vec<f64> = Schedule::default()
            .steps()
            .into_iter()
            .map(|h| {
                let z = &p * Complex64::new(1.0 - h, 0.0);
                envelope::kernel(&domain, &p, &z).unwrap().exact().unwrap() * h
            })
            .collect();
        let e = richardson(&values, 2.0, 1.0);
        let dev = (e.value + 2.0).abs();
        worst = worst.max(dev);
        parts.push(format!("n={n}: {:.12}", e.value));
    }
    Outcome {
        pass: worst < 1e-6,
        detail: format!("{} | max |est + 2| = {worst:.2e} (tol 1e-6)", parts.join(", ")),
    }
}

fn restriction_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = disc_grid(200, 0.95);
    let mut worst = 0.0f64;
    let mut count = 0;
    for k in 0..10 {
        let domain = if k % 2 == 0 {
            DomainSpec::unit_ball(2)
        } else {
            DomainSpec::ball(from_reals(&[0.3, -0.2]), 1.7).unwrap()
        };
        let (c, r) = domain.as_ball().unwrap();
        let nu = random_sphere(&mut rng, 2);
        let p = &c + &nu * Complex64::new(r, 0.0);
        let v = loop {
            let v = random_sphere(&mut rng, 2);
            let vn = hermitian(&v, &nu);
            if vn.norm() > 0.1 {
                break v * (vn.conj() / vn.norm());
            }
        };
        let g = chl_geodesic(&domain, &p, &v).unwrap();
        worst = worst.max(restriction_identity_check(&domain, &g, &grid).unwrap());
        count += 1;
    }
    Outcome {
        pass: worst < 1e-8,
        detail: format!("{count} geodesics x {} points, max deviation {worst:.2e} (tol 1e-8)", grid.len()),
    }
}

fn green_poisson() -> Outcome {
    let ball = DomainSpec::unit_ball(2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<(CVector, CVector)> = (0..50)
        .map(|_| (random_ball(&mut rng, 2, 1.0), random_sphere(&mut rng, 2)))
        .collect();
    let dev = green_omega_identity_check(&ball, &samples, 1e-3).unwrap();
    Outcome {
        pass: dev < 1e-5,
        detail: format!("50 uniform pairs, max |-dG/dnu - Omega| = {dev:.2e} (tol 1e-5)"),
    }
}

fn mass_identity() -> Outcome {
    let m2 = sphere_quadrature(2, 64).unwrap().mass();
    let m1 = sphere_quadrature(1, 64).unwrap().mass();
    let d2 = (m2 - 4.0 * PI * PI).abs();
    let d1 = (m1 - 2.0 * PI).abs();
    Outcome {
        pass: d2 < 1e-8 && d1 < 1e-12,
        detail: format!("n=2 mass {m2:.12} (err {d2:.2e}, tol 1e-8); n=1 mass {m1:.15} (err {d1:.2e}, tol 1e-12)"),
    }
}

fn reproducing_formula() -> Outcome {
    let ball = DomainSpec::unit_ball(2);
    let rule = sphere_quadrature(2, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let points: Vec<CVector> = (0..10).map(|_| random_ball(&mut rng, 2, 1.0)).collect();
    type F = fn(&CVector) -> f64;
    let fs: [(&str, F); 4] = [
        ("1", |_| 1.0),
        ("Re z1", |z| z[0].re),
        ("Re z1z2", |z| (z[0] * z[1]).re),
        ("Re z1^2", |z| (z[0] * z[0]).re),
    ];
    let mut worst = 0.0f64;
    let mut worst_inner = 0.0f64;
    let mut max_r = 0.0f64;
    for z in &points {
        let r = norm(z);
        max_r = max_r.max(r);
        for (_, f) in &fs {
            let v = reproduce(&ball, f, z, &rule).unwrap();
            let e = (v - f(z)).abs();
            worst = worst.max(e);
            if r <= 0.9 {
                worst_inner = worst_inner.max(e);
            }
        }
    }
    let outer = points.iter().filter(|z| norm(z) > 0.9).count();
    Outcome {
        pass: worst < 1e-5,
        detail: format!(
            "4 functions x 10 uniform points in the ball, max error {worst:.2e} (tol 1e-5); \
             max |z| = {max_r:.3}, {outer} points with |z| > 0.9; max error over |z| <= 0.9: {worst_inner:.2e}"
        ),
    }
}

fn riesz_disc() -> Outcome {
    let rule = sphere_quadrature(1, 200).unwrap();
    let z = Complex64::new(0.0, 0.0);
    let a = riesz_correction_1d(|w| w.norm_sqr(), |_| 4.0, z, &rule, 200, 200).unwrap();
    let b = riesz_correction_1d(|w| w.norm_sqr().powi(2), |w| 16.0 * w.norm_sqr(), z, &rule, 200, 200).unwrap();
    let worst = a.value.abs().max(b.value.abs());
    Outcome {
        pass: worst < 1e-4,
        detail: format!("|w|^2 -> {:.2e}, |w|^4 -> {:.2e} (tol 1e-4)", a.value, b.value),
    }
}

fn julia_lemma() -> Outcome {
    let one = from_reals(&[1.0]);
    let map = MapSpec::Blaschke { a: Complex64::new(0.5, 0.0) };
    let r = lambda_estimate(&map, 1, &one, &one, SamplingPlan::default()).unwrap();
    let lambda = r.lambda_estimate.finite().unwrap_or(f64::NAN);
    let dl = (lambda - 1.0 / 3.0).abs();
    let radii = [0.1, 1.0, 10.0];
    let inc = horoball_inclusion_check(&map, 1, &one, &one, lambda, &radii, 500, 11).unwrap();
    let neg = horoball_inclusion_check(&map, 1, &one, &one, lambda / 2.0, &radii, 500, 11).unwrap();
    Outcome {
        pass: dl < 1e-6 && inc.violations.is_empty() && !neg.violations.is_empty(),
        detail: format!(
            "lambda {lambda:.10} (err {dl:.2e}, tol 1e-6); violations at lambda: {}; at lambda/2: {}",
            inc.violations.len(),
            neg.violations.len()
        ),
    }
}

fn jwc_probes() -> Outcome {
    let s = Schedule::default();
    let one = from_reals(&[1.0]);
    let e1 = unit(2, 0);
    let cases: [(&str, MapSpec, usize, CVector, CVector, f64, f64); 3] = [
        ("blaschke a=1/2", MapSpec::Blaschke { a: Complex64::new(0.5, 0.0) }, 1, one.clone(), one.clone(), 0.5, 1.0 / 3.0),
        ("z^2", MapSpec::Power(2), 1, one.clone(), one.clone(), 0.5, 2.0),
        (
            "ball automorphism a=e1/2",
            MapSpec::BallAuto { anchor: from_reals(&[0.5, 0.0]) },
            2,
            e1.clone(),
            -&e1,
            0.5,
            3.0,
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, map, n, p, q, aperture, oracle) in cases {
        let r = jwc_derivative_probes(&map, n, &p, &q, aperture, s).unwrap();
        let d1 = (r.limit1_re.value - oracle).abs().max(r.limit1_im.value.abs());
        let at20 = r.trace.iter().find(|t| t.h == 0.5f64.powi(20)).unwrap();
        pass &= d1 < 1e-5 && at20.probe2 < 1e-4 && at20.probe3 < 1e-4;
        parts.push(format!(
            "{name}: (1) err {d1:.1e}, (2) {:.1e}, (3) {:.1e}",
            at20.probe2, at20.probe3
        ));
    }
    Outcome {
        pass,
        detail: format!("{} (tols 1e-5, 1e-4)", parts.join("; ")),
    }
}

fn sandwich() -> Outcome {
    let e = DomainSpec::ellipsoid(vec![1.0, 2.0]).unwrap();
    let p = unit(2, 0);
    let kv = envelope::sandwich_bounds(&e, &p, &from_reals(&[0.5, 0.0])).unwrap();
    let exact = matches!(kv, KernelValue::Interval { .. }) && kv.lower() == -3.0 && kv.upper() == -2.0;
    let nr = normal_ratio(&e, &p, Schedule::default()).unwrap();
    let d = (nr.limit.value - 1.0).abs();
    Outcome {
        pass: exact && d < 1e-3,
        detail: format!(
            "interval [{}, {}]; ratio limit {:.8} (err {d:.2e}, tol 1e-3)",
            kv.lower(),
            kv.upper(),
            nr.limit.value
        ),
    }
}

fn condition_equivalence() -> Outcome {
    let s = Schedule::default();
    let one = from_reals(&[1.0]);
    let e1 = unit(2, 0);
    let c = |x: f64| Complex64::new(x, 0.0);
    let cases: Vec<(&str, MapSpec, CVector, CVector, bool)> = vec![
        ("identity", MapSpec::Identity, e1.clone(), e1.clone(), true),
        ("blaschke 1/2", MapSpec::Blaschke { a: c(0.5) }, one.clone(), one.clone(), true),
        ("z^2", MapSpec::Power(2), one.clone(), one.clone(), true),
        ("diag(1,1/2)", MapSpec::Diag(vec![c(1.0), c(0.5)]), e1.clone(), e1.clone(), true),
        ("ball automorphism", MapSpec::BallAuto { anchor: from_reals(&[0.5, 0.0]) }, e1.clone(), -&e1, true),
        ("constant", MapSpec::Constant(from_reals(&[0.3, 0.1])), e1.clone(), e1.clone(), false),
        ("diag(1/2,1/2)", MapSpec::Diag(vec![c(0.5), c(0.5)]), e1.clone(), e1.clone(), false),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, map, p, q, finite) in cases {
        let n = p.len();
        let z0 = CVector::zeros(n);
        let z0t = CVector::zeros(q.len());
        let r = condition_equivalence_check(&map, n, &p, &q, &z0, &z0t, s).unwrap();
        let ok = r.consistent && r.lambda.is_finite() == finite;
        let values_ok = match (r.lambda, r.distance_ratio, r.kobayashi_gap) {
            (ExtReal::Finite(l), ExtReal::Finite(d), ExtReal::Finite(g)) => {
                (l - d).abs() < 1e-4 * l && (g - 0.5 * l.ln()).abs() < 1e-4
            }
            _ => true,
        };
        pass &= ok && values_ok;
        parts.push(format!(
            "{name}: {}/{}/{}",
            r.lambda, r.kobayashi_gap, r.distance_ratio
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "ball kernel normal limit", Duration::from_secs(1), ball_normal_limit),
        (2, "restriction identity on CHL geodesics", Duration::from_secs(5), restriction_identity),
        (3, "Green normal derivative equals the kernel", Duration::from_secs(10), green_poisson),
        (4, "sphere quadrature mass", Duration::from_secs(1), mass_identity),
        (5, "boundary reproducing formula", Duration::from_secs(30), reproducing_formula),
        (6, "disc formula with area correction", Duration::from_secs(10), riesz_disc),
        (7, "Julia lemma and horoball inclusions", Duration::from_secs(10), julia_lemma),
        (8, "derivative probes", Duration::from_secs(10), jwc_probes),
        (9, "ellipsoid sandwich bounds", Duration::from_secs(5), sandwich),
        (10, "condition equivalence", Duration::from_secs(10), condition_equivalence),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed < limit;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {id:>2} {name}: {} [{:.3} s, limit {} s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
