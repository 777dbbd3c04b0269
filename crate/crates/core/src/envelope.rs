//! Two-sided bounds for Ω on domains without closed-form kernels.
//!
//! Lower bounds come from explicit members of the defining family (peak
//! functions, restrictions of circumscribed-ball kernels); upper bounds come
//! from inscribed tangent balls, with g = 0 outside the inscribed ball.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DomainSpec, TangentBall};
use crate::error::{Error, Result};
use crate::extrapolate::{richardson, Extrapolation, Schedule};
use crate::kernels::{omega_for_ball_domain, omega_general_ball, poisson_disc, KernelValue, Provenance};
use crate::linalg::{hermitian, CVector, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    /// u(z) = P_𝔻(exp⟨z − p, ν_p⟩).
    PeakPoisson,
    /// Kernel of the circumscribed tangent ball restricted to D.
    BallRestriction,
}

/// A member of the family whose upper envelope is Ω_p.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateMember {
    pub kind: CandidateKind,
    pub pole: CVector,
    pub nu: CVector,
    ball: Option<TangentBall>,
}

impl CandidateMember {
    pub fn eval(&self, z: &CVector) -> Result<f64> {
        match self.kind {
            CandidateKind::PeakPoisson => {
                let h = hermitian(&(z - &self.pole), &self.nu).exp();
                if h.norm_sqr() >= 1.0 {
                    return if (h - ONE).norm() < 1e-15 { Err(Error::PoleCoincidence) } else { Ok(0.0) };
                }
                poisson_disc(ONE, h)
            }
            CandidateKind::BallRestriction => {
                let b = self.ball.as_ref().expect("ball candidates carry their ball");
                omega_general_ball(&b.center, b.radius, &self.pole, z)
            }
        }
    }
}

/// The peak-function member u(z) = P_𝔻(exp⟨z − p, ν_p⟩); its peak slope is
/// 1 under the canonical couple.
pub fn peak_candidate(domain: &DomainSpec, p: &CVector) -> Result<CandidateMember> {
    if !domain.is_convex_kind() {
        return Err(Error::Unsupported(
            "peak candidates need Re⟨z − p, ν_p⟩ < 0 on the domain, which is only known for convex kinds".into(),
        ));
    }
    let frame = domain.boundary_frame(p)?;
    Ok(CandidateMember {
        kind: CandidateKind::PeakPoisson,
        pole: p.clone(),
        nu: frame.nu,
        ball: None,
    })
}

/// Restriction of the circumscribed tangent ball kernel.
pub fn circumscribed_candidate(domain: &DomainSpec, p: &CVector) -> Result<CandidateMember> {
    let frame = domain.boundary_frame(p)?;
    let balls = domain.tangent_balls(p)?;
    Ok(CandidateMember {
        kind: CandidateKind::BallRestriction,
        pole: p.clone(),
        nu: frame.nu,
        ball: Some(balls.outer),
    })
}

/// Pointwise maximum of the candidates: a lower bound for Ω_p(z).
pub fn lower_envelope(candidates: &[CandidateMember], z: &CVector) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = f64::NEG_INFINITY;
    for c in candidates {
        best = best.max(c.eval(z)?);
    }
    Ok(best)
}

fn check_interior(domain: &DomainSpec, z: &CVector) -> Result<()> {
    if z.len() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: z.len(),
        });
    }
    if !domain.contains(z) {
        return Err(Error::OutsideDomain(format!("psi(z) = {} is not negative", domain.psi(z))));
    }
    Ok(())
}

/// Certified interval [Ω_{B_out}(z), Ω_{B_in}(z) or 0] for Ω_{D,p}(z).
/// Balls return their closed form.
pub fn sandwich_bounds(domain: &DomainSpec, p: &CVector, z: &CVector) -> Result<KernelValue> {
    check_interior(domain, z)?;
    if domain.as_ball().is_some() {
        domain.boundary_frame(p)?;
        return Ok(KernelValue::closed_form(omega_for_ball_domain(domain, p, z)?));
    }
    let balls = domain.tangent_balls(p)?;
    let lower = omega_general_ball(&balls.outer.center, balls.outer.radius, p, z)?;
    let upper = if balls.inner.contains(z) {
        omega_general_ball(&balls.inner.center, balls.inner.radius, p, z)?
    } else {
        0.0
    };
    Ok(KernelValue::Interval {
        lower,
        upper,
        provenance: Provenance::SandwichInterval,
    })
}

/// Best available kernel value: closed form, sandwich interval, or (for
/// custom domains) an error since no certified candidate exists.
pub fn kernel(domain: &DomainSpec, p: &CVector, z: &CVector) -> Result<KernelValue> {
    match domain {
        DomainSpec::Custom(_) => Err(Error::ContainmentNotCertified(
            "custom domains have neither closed forms nor certified tangent balls".into(),
        )),
        _ => sandwich_bounds(domain, p, z),
    }
}

/// max over K×P of |u_p(z)| for the peak candidates; bounds sup_p |Ω_p| on K.
pub fn uniform_bound_check(domain: &DomainSpec, compact: &[CVector], poles: &[CVector]) -> Result<f64> {
    for z in compact {
        check_interior(domain, z)?;
    }
    let candidates = poles
        .iter()
        .map(|p| peak_candidate(domain, p))
        .collect::<Result<Vec<_>>>()?;
    let per_pole: Vec<Result<f64>> = candidates
        .par_iter()
        .map(|c| {
            let mut m = 0.0f64;
            for z in compact {
                m = m.max(c.eval(z)?.abs());
            }
            Ok(m)
        })
        .collect();
    let mut best = 0.0f64;
    for r in per_pole {
        best = best.max(r?);
    }
    Ok(best)
}

/// Upper bound g(z, q): inscribed tangent ball kernel at q, 0 outside it.
pub fn inscribed_upper_bound(domain: &DomainSpec, q: &CVector, z: &CVector) -> Result<f64> {
    Ok(sandwich_bounds(domain, q, z)?.upper())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalRatio {
    /// Extrapolated limit of upper/lower along the inward normal.
    pub limit: Extrapolation,
    /// (1 − t, upper/lower).
    pub samples: Vec<(f64, f64)>,
}

/// Ratio of the sandwich endpoints along γ(t) = p − (1 − t)ν_p.
pub fn normal_ratio(domain: &DomainSpec, p: &CVector, schedule: Schedule) -> Result<NormalRatio> {
    let frame = domain.boundary_frame(p)?;
    let balls = domain.tangent_balls(p)?;
    let mut samples = Vec::new();
    for h in schedule.steps() {
        if h >= balls.inner.radius {
            continue;
        }
        let z = p - &frame.nu * Complex64::new(h, 0.0);
        let kv = sandwich_bounds(domain, p, &z)?;
        samples.push((h, kv.upper() / kv.lower()));
    }
    if samples.len() < 3 {
        return Err(Error::InvalidArgument("schedule does not reach inside the inscribed ball".into()));
    }
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(NormalRatio {
        limit: richardson(&values, 2.0, 1.0),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_reals, norm, unit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn peak_candidate_at_ball_center() {
        let ball = DomainSpec::unit_ball(2);
        let u = peak_candidate(&ball, &unit(2, 0)).unwrap();
        let v = u.eval(&CVector::zeros(2)).unwrap();
        let e = (-1f64).exp();
        let expect = -(1.0 - e * e) / (1.0 - e).powi(2);
        assert!((v - expect).abs() < 1e-14);
        assert!((v + 2.1640).abs() < 1e-4);
        assert!(v <= -1.0);
    }

    #[test]
    fn peak_candidate_normal_limit() {
        let ball = DomainSpec::unit_ball(2);
        let u = peak_candidate(&ball, &unit(2, 0)).unwrap();
        let vals: Vec<f64> = Schedule::default()
            .steps()
            .into_iter()
            .map(|h| u.eval(&from_reals(&[1.0 - h, 0.0])).unwrap() * h)
            .collect();
        assert!((richardson(&vals, 2.0, 1.0).value + 2.0).abs() < 1e-8);
    }

    #[test]
    fn peak_candidate_is_negative_on_boundary_away_from_pole() {
        let ball = DomainSpec::unit_ball(2);
        let u = peak_candidate(&ball, &unit(2, 0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for q in ball.sample_boundary(50, &mut rng).unwrap() {
            if norm(&(&q - unit(2, 0))) > 1e-3 {
                assert!(u.eval(&q).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn envelope_monotone_and_exact_on_ball() {
        let ball = DomainSpec::unit_ball(2);
        let p = unit(2, 0);
        let z = from_reals(&[0.2, -0.3]);
        let peak = peak_candidate(&ball, &p).unwrap();
        let circ = circumscribed_candidate(&ball, &p).unwrap();
        let one = lower_envelope(std::slice::from_ref(&peak), &z).unwrap();
        let both = lower_envelope(&[peak, circ], &z).unwrap();
        assert!(both >= one);
        assert!((both - crate::kernels::omega_ball(&p, &z).unwrap()).abs() < 1e-15);
        assert_eq!(lower_envelope(&[], &z), Err(Error::EmptyCandidates));
    }

    #[test]
    fn sandwich_on_ellipsoid() {
        let e = DomainSpec::ellipsoid(vec![1.0, 2.0]).unwrap();
        let kv = sandwich_bounds(&e, &unit(2, 0), &from_reals(&[0.5, 0.0])).unwrap();
        assert!((kv.lower() + 3.0).abs() < 1e-12, "{kv:?}");
        assert!((kv.upper() + 2.0).abs() < 1e-12, "{kv:?}");
        let outside = sandwich_bounds(&e, &unit(2, 0), &from_reals(&[-0.5, 0.2])).unwrap();
        assert_eq!(outside.upper(), 0.0);
        assert!(outside.lower().is_finite() && outside.lower() < 0.0);
        let ball = sandwich_bounds(&DomainSpec::unit_ball(2), &unit(2, 0), &from_reals(&[0.5, 0.0])).unwrap();
        assert_eq!(ball.provenance(), Provenance::ClosedForm);
    }

    #[test]
    fn envelope_below_sandwich_upper() {
        let e = DomainSpec::ellipsoid(vec![1.0, 3.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for p in e.sample_boundary(10, &mut rng).unwrap() {
            let cands = vec![peak_candidate(&e, &p).unwrap(), circumscribed_candidate(&e, &p).unwrap()];
            for _ in 0..20 {
                let z = from_reals(&[rng.random::<f64>() - 0.5, 0.5 * (rng.random::<f64>() - 0.5)]);
                if !e.contains(&z) {
                    continue;
                }
                let kv = sandwich_bounds(&e, &p, &z).unwrap();
                let env = lower_envelope(&cands, &z).unwrap();
                assert!(env <= kv.upper() + 1e-12);
                assert!(env >= kv.lower() - 1e-12 && env <= 0.0);
            }
        }
    }

    #[test]
    fn uniform_bounds() {
        let ball = DomainSpec::unit_ball(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let poles = ball.sample_boundary(40, &mut rng).unwrap();
        let grid: Vec<CVector> = (0..40)
            .map(|k| {
                let r = 0.5 * (k as f64 / 40.0);
                from_reals(&[r, -r * 0.5])
            })
            .collect();
        let bound = uniform_bound_check(&ball, &grid, &poles).unwrap();
        for p in &poles {
            for z in &grid {
                assert!(crate::kernels::omega_ball(p, z).unwrap().abs() <= bound);
            }
        }
        let small = uniform_bound_check(&ball, &grid[..5], &poles).unwrap();
        assert!(small <= bound);
        let e = DomainSpec::ellipsoid(vec![1.0, 2.0]).unwrap();
        assert!(uniform_bound_check(&e, &[CVector::zeros(2)], &poles.iter().map(|p| e.boundary_point_along(p).unwrap()).collect::<Vec<_>>()).unwrap().is_finite());
        assert!(uniform_bound_check(&ball, &[unit(2, 0)], &poles).is_err());
    }

    #[test]
    fn custom_domains_have_no_sandwich() {
        let d = DomainSpec::custom("abs(z1)^2 + abs(z2)^4 - 1").unwrap();
        assert!(matches!(
            sandwich_bounds(&d, &unit(2, 0), &from_reals(&[0.5, 0.0])),
            Err(Error::ContainmentNotCertified(_))
        ));
    }
}
