//! Closed-form kernels and distances on the disc and on balls.
//!
//! Every kernel is normalized by the canonical couple θ_p(v) = ⟨v, ν_p⟩.
//! Other positive normalizations go through [`rescale_couple`].

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{DomainSpec, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::extrapolate::{richardson, ExtReal, Extrapolation, Schedule};
use crate::linalg::{hermitian, norm, norm_sqr, CMatrix, CVector, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    SandwichInterval,
    EnvelopeLowerBound,
}

/// A kernel value: exact, or a certified interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum KernelValue {
    Point { value: f64, provenance: Provenance },
    Interval { lower: f64, upper: f64, provenance: Provenance },
}

impl KernelValue {
    pub fn closed_form(value: f64) -> KernelValue {
        KernelValue::Point {
            value,
            provenance: Provenance::ClosedForm,
        }
    }

    pub fn lower(&self) -> f64 {
        match *self {
            KernelValue::Point { value, .. } => value,
            KernelValue::Interval { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            KernelValue::Point { value, .. } => value,
            KernelValue::Interval { upper, .. } => upper,
        }
    }

    pub fn provenance(&self) -> Provenance {
        match *self {
            KernelValue::Point { provenance, .. } | KernelValue::Interval { provenance, .. } => provenance,
        }
    }

    /// The exact value if this is a point evaluation.
    pub fn exact(&self) -> Option<f64> {
        match *self {
            KernelValue::Point {
                value,
                provenance: Provenance::ClosedForm,
            } => Some(value),
            _ => None,
        }
    }
}

/// Negative Poisson kernel of the disc, P_p(ζ) = −(1 − |ζ|²)/|p − ζ|².
pub fn poisson_disc(p: Complex64, zeta: Complex64) -> Result<f64> {
    if (p.norm() - 1.0).abs() > BOUNDARY_TOL {
        return Err(Error::NotOnBoundary {
            residual: (p.norm_sqr() - 1.0).abs(),
            tolerance: BOUNDARY_TOL,
        });
    }
    if !(zeta.norm_sqr() < 1.0) {
        return Err(Error::OutsideDomain(format!("|zeta| = {} is not below 1", zeta.norm())));
    }
    Ok(-(1.0 - zeta.norm_sqr()) / (p - zeta).norm_sqr())
}

/// Ω_{𝔹ⁿ,p}(z) = −(1 − ‖z‖²)/|1 − ⟨z, p⟩|², extended by 0 to ∂𝔹ⁿ∖{p}.
pub fn omega_ball(p: &CVector, z: &CVector) -> Result<f64> {
    if p.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: z.len(),
        });
    }
    let pp = norm_sqr(p);
    if (pp - 1.0).abs() > BOUNDARY_TOL {
        return Err(Error::NotOnBoundary {
            residual: (pp - 1.0).abs(),
            tolerance: BOUNDARY_TOL,
        });
    }
    let zz = norm_sqr(z);
    if zz > 1.0 + BOUNDARY_TOL {
        return Err(Error::OutsideDomain(format!("|z| = {} exceeds 1", zz.sqrt())));
    }
    if norm(&(z - p)) < 1e-14 {
        return Err(Error::PoleCoincidence);
    }
    if zz >= 1.0 {
        return Ok(0.0);
    }
    Ok(-(1.0 - zz) / (ONE - hermitian(z, p)).norm_sqr())
}

/// Ω_{B(c,r),p}(z) = (1/r)·Ω_{𝔹ⁿ,(p−c)/r}((z − c)/r).
pub fn omega_general_ball(center: &CVector, radius: f64, p: &CVector, z: &CVector) -> Result<f64> {
    let pu = (p - center) / Complex64::new(radius, 0.0);
    let zu = (z - center) / Complex64::new(radius, 0.0);
    Ok(omega_ball(&pu, &zu)? / radius)
}

/// Kernel value for Ω^{ρθ}, given the value for θ: Ω^{ρθ} = Ω^θ / ρ.
pub fn rescale_couple(value: f64, rho: f64) -> f64 {
    assert!(rho > 0.0, "couples rescale by positive factors");
    value / rho
}

fn check_ball_point(a: &CVector, what: &str) -> Result<()> {
    if !(norm_sqr(a) < 1.0) {
        return Err(Error::OutsideDomain(format!("{what} must lie in the open unit ball")));
    }
    Ok(())
}

/// The involutive automorphism φ_a of 𝔹ⁿ exchanging a and 0:
/// φ_a(w) = (a − P_a w − s_a Q_a w)/(1 − ⟨w, a⟩), s_a = √(1 − ‖a‖²).
pub fn mobius_ball(a: &CVector, w: &CVector) -> Result<CVector> {
    check_ball_point(a, "automorphism anchor")?;
    if w.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: w.len(),
        });
    }
    if norm_sqr(w) > 1.0 + BOUNDARY_TOL {
        return Err(Error::OutsideDomain("automorphisms act on the closed ball".into()));
    }
    Ok(mobius_unchecked(a, w))
}

pub(crate) fn mobius_unchecked(a: &CVector, w: &CVector) -> CVector {
    let aa = norm_sqr(a);
    let den = ONE - hermitian(w, a);
    if aa == 0.0 {
        return -w;
    }
    let s = (1.0 - aa).sqrt();
    let pw = a * (hermitian(w, a) / aa);
    let qw = w - &pw;
    (a - pw - qw * Complex64::new(s, 0.0)) / den
}

/// Linear part P_a + s_a Q_a of φ_a.
fn mobius_linear(a: &CVector) -> CMatrix {
    let n = a.len();
    let aa = norm_sqr(a);
    let id = CMatrix::identity(n, n);
    if aa == 0.0 {
        return id;
    }
    let s = (1.0 - aa).sqrt();
    let proj = (a * a.adjoint()) / Complex64::new(aa, 0.0);
    &proj + (id - &proj) * Complex64::new(s, 0.0)
}

/// Complex Jacobian of φ_a at w: (φ_a(w)·a* − (P_a + s_a Q_a)) / (1 − ⟨w, a⟩).
pub fn mobius_ball_jacobian(a: &CVector, w: &CVector) -> Result<CMatrix> {
    let fw = mobius_ball(a, w)?;
    let den = ONE - hermitian(w, a);
    Ok((fw * a.adjoint() - mobius_linear(a)) / den)
}

/// 1 − ‖φ_a(w)‖², computed without cancellation.
pub fn mobius_defect(a: &CVector, w: &CVector) -> f64 {
    (1.0 - norm_sqr(a)) * (1.0 - norm_sqr(w)) / (ONE - hermitian(w, a)).norm_sqr()
}

fn ball_points(domain: &DomainSpec, z: &CVector, w: &CVector) -> Result<()> {
    if !domain.is_unit_ball() {
        return Err(Error::Unsupported(format!(
            "closed forms exist for the disc and unit balls, not for {}",
            domain.kind_name()
        )));
    }
    for x in [z, w] {
        if x.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: x.len(),
            });
        }
        check_ball_point(x, "point")?;
    }
    Ok(())
}

/// Kobayashi distance arctanh ‖φ_z(w)‖ (on the disc: half the hyperbolic
/// distance of curvature −1).
pub fn kobayashi(domain: &DomainSpec, z: &CVector, w: &CVector) -> Result<f64> {
    ball_points(domain, z, w)?;
    Ok(kobayashi_unchecked(z, w))
}

pub(crate) fn kobayashi_unchecked(z: &CVector, w: &CVector) -> f64 {
    let defect = mobius_defect(z, w);
    if defect > 0.5 {
        return norm(&mobius_unchecked(z, w)).atanh();
    }
    let m = (1.0 - defect).sqrt();
    // arctanh m = ln(1 + m) − ½ ln(1 − m²)
    m.ln_1p() - 0.5 * defect.ln()
}

/// Poincaré distance on the disc in the same normalization as [`kobayashi`].
pub fn poincare(z: Complex64, w: Complex64) -> f64 {
    kobayashi_unchecked(&CVector::from_element(1, z), &CVector::from_element(1, w))
}

/// Pluricomplex Green function G(z, w) = log ‖φ_z(w)‖; −∞ at w = z.
pub fn green_ball(domain: &DomainSpec, z: &CVector, w: &CVector) -> Result<ExtReal> {
    ball_points(domain, z, w)?;
    Ok(green_unchecked(z, w))
}

pub(crate) fn green_unchecked(z: &CVector, w: &CVector) -> ExtReal {
    let defect = mobius_defect(z, w);
    if defect >= 1.0 {
        let m = norm(&mobius_unchecked(z, w));
        return if m == 0.0 { ExtReal::NegInfinity } else { ExtReal::Finite(m.ln()) };
    }
    if defect > 0.5 {
        ExtReal::Finite(norm(&mobius_unchecked(z, w)).ln())
    } else {
        ExtReal::Finite(0.5 * (-defect).ln_1p())
    }
}

/// A C¹ curve ending at a boundary point: γ(1) = p, γ(t) ∈ D for t < 1.
pub struct BoundaryCurve<'a> {
    pub gamma: Box<dyn Fn(f64) -> CVector + Send + Sync + 'a>,
    pub gamma_prime_at_1: CVector,
}

impl<'a> BoundaryCurve<'a> {
    /// γ(t) = p − (1 − t)·d.
    pub fn linear(p: CVector, d: CVector) -> BoundaryCurve<'a> {
        let dd = d.clone();
        BoundaryCurve {
            gamma: Box::new(move |t| &p - &dd * Complex64::new(1.0 - t, 0.0)),
            gamma_prime_at_1: d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryLimit {
    pub estimate: Extrapolation,
    /// −2 Re[θ_p(γ′(1))]^{−1}.
    pub prediction: f64,
    /// (1 − t, Ω(γ(t))·(1 − t)) on the schedule.
    pub samples: Vec<(f64, f64)>,
}

/// Richardson estimate of lim_{t→1} Ω(γ(t))(1 − t) on t_k = 1 − 2^{−k}.
pub fn boundary_limit<F>(kernel: F, theta: &CVector, curve: &BoundaryCurve, schedule: Schedule) -> Result<BoundaryLimit>
where
    F: Fn(&CVector) -> Result<f64>,
{
    let th: Complex64 = theta.iter().zip(curve.gamma_prime_at_1.iter()).map(|(c, v)| c * v).sum();
    if !(th.re > 1e-12) {
        return Err(Error::TangentialCurve(th.re));
    }
    let prediction = -2.0 * (ONE / th).re;
    let mut samples = Vec::new();
    for h in schedule.steps() {
        let v = kernel(&(curve.gamma)(1.0 - h))?;
        samples.push((h, v * h));
    }
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(BoundaryLimit {
        estimate: richardson(&values, 2.0, 1.0),
        prediction,
        samples,
    })
}

/// Biholomorphisms with known boundary extension that kernels can be pulled
/// back along.
#[derive(Debug, Clone, PartialEq)]
pub enum Biholomorphism {
    Identity,
    /// z ↦ U z with U unitary.
    Unitary(CMatrix),
    /// The involution φ_a of the unit ball.
    BallAutomorphism { anchor: CVector },
    /// z ↦ s·z + b with s > 0.
    Affine { scale: f64, shift: CVector },
}

impl Biholomorphism {
    pub fn apply(&self, z: &CVector) -> Result<CVector> {
        Ok(match self {
            Biholomorphism::Identity => z.clone(),
            Biholomorphism::Unitary(u) => u * z,
            Biholomorphism::BallAutomorphism { anchor } => mobius_ball(anchor, z)?,
            Biholomorphism::Affine { scale, shift } => z * Complex64::new(*scale, 0.0) + shift,
        })
    }

    pub fn inverse(&self, w: &CVector) -> Result<CVector> {
        Ok(match self {
            Biholomorphism::Identity => w.clone(),
            Biholomorphism::Unitary(u) => u.adjoint() * w,
            Biholomorphism::BallAutomorphism { anchor } => mobius_ball(anchor, w)?,
            Biholomorphism::Affine { scale, shift } => (w - shift) / Complex64::new(*scale, 0.0),
        })
    }

    pub fn jacobian(&self, z: &CVector) -> Result<CMatrix> {
        let n = z.len();
        Ok(match self {
            Biholomorphism::Identity => CMatrix::identity(n, n),
            Biholomorphism::Unitary(u) => u.clone(),
            Biholomorphism::BallAutomorphism { anchor } => mobius_ball_jacobian(anchor, z)?,
            Biholomorphism::Affine { scale, .. } => CMatrix::identity(n, n) * Complex64::new(*scale, 0.0),
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Biholomorphism::Unitary(u) => {
                let n = u.nrows();
                if u.ncols() != n || (u.adjoint() * u - CMatrix::identity(n, n)).norm() > 1e-10 {
                    return Err(Error::InvalidArgument("matrix is not unitary".into()));
                }
            }
            Biholomorphism::BallAutomorphism { anchor } => check_ball_point(anchor, "automorphism anchor")?,
            Biholomorphism::Affine { scale, .. } => {
                if !(*scale > 0.0) {
                    return Err(Error::InvalidArgument("affine scale must be positive".into()));
                }
            }
            Biholomorphism::Identity => {}
        }
        Ok(())
    }
}

/// z ↦ Ω_{D′,q}(F(z)) with the pulled-back couple F*θ_q = θ_q ∘ dF_p at
/// p = F^{−1}(q).
#[derive(Debug, Clone)]
pub struct PulledBackKernel {
    pub map: Biholomorphism,
    pub target: DomainSpec,
    pub q: CVector,
    pub p: CVector,
    /// Coefficients c with F*θ(v) = Σ c_j v_j.
    pub theta_coeffs: CVector,
    /// ρ with F*θ_q = ρ·θ_p; multiplying by ρ returns to the canonical couple.
    pub renormalization: f64,
}

impl PulledBackKernel {
    /// Value in the pulled-back normalization.
    pub fn eval(&self, z: &CVector) -> Result<f64> {
        omega_for_ball_domain(&self.target, &self.q, &self.map.apply(z)?)
    }

    /// Value renormalized to the canonical couple at p.
    pub fn eval_canonical(&self, z: &CVector) -> Result<f64> {
        Ok(self.eval(z)? * self.renormalization)
    }
}

/// Closed-form Ω on disc/unit-ball/general-ball domains.
pub fn omega_for_ball_domain(domain: &DomainSpec, p: &CVector, z: &CVector) -> Result<f64> {
    match domain.as_ball() {
        Some((c, r)) => {
            if domain.is_unit_ball() {
                omega_ball(p, z)
            } else {
                omega_general_ball(&c, r, p, z)
            }
        }
        None => Err(Error::Unsupported(format!(
            "no closed-form kernel on {} domains",
            domain.kind_name()
        ))),
    }
}

/// Pulls the kernel of `target` at q back along F.
pub fn pullback_kernel(map: Biholomorphism, target: &DomainSpec, q: &CVector) -> Result<PulledBackKernel> {
    map.validate()?;
    if target.as_ball().is_none() {
        return Err(Error::Unsupported("pullbacks are registered for ball targets".into()));
    }
    let frame_q = target.boundary_frame(q)?;
    let p = map.inverse(q)?;
    let source = match &map {
        Biholomorphism::Affine { scale, shift } => {
            let (c, r) = target.as_ball().unwrap();
            DomainSpec::ball((c - shift) / Complex64::new(*scale, 0.0), r / scale)?
        }
        _ => target.clone(),
    };
    let frame_p = source.boundary_frame_with_tol(&p, 1e-8)?;
    let jac = map.jacobian(&p)?;
    let theta_coeffs = (frame_q.theta_coeffs.transpose() * &jac).transpose();
    let rho: Complex64 = theta_coeffs.iter().zip(frame_p.nu.iter()).map(|(c, v)| c * v).sum();
    if !(rho.re > 0.0) || rho.im.abs() > 1e-8 * rho.re.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "pulled-back couple is not a positive multiple of the canonical one (ratio {rho})"
        )));
    }
    Ok(PulledBackKernel {
        map,
        target: target.clone(),
        q: q.clone(),
        p,
        theta_coeffs,
        renormalization: rho.re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_pairs, from_reals, unit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ball_point(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> CVector {
        loop {
            let v = CVector::from_iterator(
                n,
                (0..n).map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)),
            );
            if norm(&v) < rmax {
                return v;
            }
        }
    }

    fn random_sphere_point(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        let v = random_ball_point(rng, n, 1.0);
        &v / Complex64::new(norm(&v), 0.0)
    }

    #[test]
    fn poisson_disc_values() {
        assert_eq!(poisson_disc(ONE, Complex64::new(0.0, 0.0)).unwrap(), -1.0);
        for r in [0.1, 0.5, 0.9] {
            let v = poisson_disc(ONE, Complex64::new(r, 0.0)).unwrap();
            assert!((v + (1.0 + r) / (1.0 - r)).abs() < 1e-12);
        }
        assert!(poisson_disc(ONE, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn poisson_disc_radial_limit() {
        let curve = BoundaryCurve::linear(from_reals(&[1.0]), from_reals(&[1.0]));
        let lim = boundary_limit(|z| poisson_disc(ONE, z[0]), &from_reals(&[1.0]), &curve, Schedule::default()).unwrap();
        assert!((lim.estimate.value + 2.0).abs() < 1e-10);
        assert_eq!(lim.prediction, -2.0);
    }

    #[test]
    fn omega_ball_values() {
        let e1 = unit(2, 0);
        assert_eq!(omega_ball(&e1, &CVector::zeros(2)).unwrap(), -1.0);
        for t in [0.2, 0.7, 0.99] {
            let v = omega_ball(&e1, &from_reals(&[t, 0.0])).unwrap();
            assert!((v * (1.0 - t) + 1.0 + t).abs() < 1e-12);
        }
        let v = omega_general_ball(&from_reals(&[0.5, 0.0]), 0.5, &e1, &from_reals(&[0.5, 0.0])).unwrap();
        assert!((v + 2.0).abs() < 1e-15);
        assert_eq!(omega_ball(&e1, &unit(2, 1)).unwrap(), 0.0);
        assert_eq!(omega_ball(&e1, &e1), Err(Error::PoleCoincidence));
    }

    #[test]
    fn omega_restricted_to_radial_disc_is_poisson() {
        let e1 = unit(3, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let zeta = random_ball_point(&mut rng, 1, 0.999)[0];
            let mut z = CVector::zeros(3);
            z[0] = zeta;
            let a = omega_ball(&e1, &z).unwrap();
            let b = poisson_disc(ONE, zeta).unwrap();
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn mobius_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_ball_point(&mut rng, 2, 0.9);
        assert!(norm(&mobius_ball(&a, &a).unwrap()) < 1e-15);
        for _ in 0..100 {
            let w = random_ball_point(&mut rng, 2, 1.0);
            let back = mobius_ball(&a, &mobius_ball(&a, &w).unwrap()).unwrap();
            assert!(norm(&(back - &w)) < 1e-12);
            let d = 1.0 - norm_sqr(&mobius_ball(&a, &w).unwrap());
            assert!((d - mobius_defect(&a, &w)).abs() < 1e-12);
        }
        let w = from_pairs(&[(0.1, 0.2), (-0.3, 0.0)]);
        assert_eq!(mobius_ball(&CVector::zeros(2), &w).unwrap(), -w.clone());
        assert!(mobius_ball(&from_reals(&[1.0, 0.0]), &w).is_err());
    }

    #[test]
    fn mobius_jacobian_matches_finite_differences() {
        let a = from_pairs(&[(0.3, -0.2), (0.1, 0.4)]);
        let w = from_pairs(&[(-0.2, 0.1), (0.5, 0.2)]);
        let jac = mobius_ball_jacobian(&a, &w).unwrap();
        let h = 1e-6;
        for k in 0..2 {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += h;
            wm[k] -= h;
            let col = (mobius_ball(&a, &wp).unwrap() - mobius_ball(&a, &wm).unwrap()) / Complex64::new(2.0 * h, 0.0);
            assert!((col - jac.column(k)).norm() < 1e-8);
        }
    }

    #[test]
    fn kobayashi_values() {
        let disc = DomainSpec::Disc;
        let z = from_reals(&[0.3]);
        assert_eq!(kobayashi(&disc, &z, &z).unwrap(), 0.0);
        for r in [0.1, 0.6, 0.999999] {
            let k = kobayashi(&disc, &CVector::zeros(1), &from_reals(&[r])).unwrap();
            assert!((k - f64::atanh(r)).abs() < 1e-9 * k.max(1.0));
        }
        let ball = DomainSpec::unit_ball(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (z, w, u) = (
                random_ball_point(&mut rng, 2, 0.95),
                random_ball_point(&mut rng, 2, 0.95),
                random_ball_point(&mut rng, 2, 0.9),
            );
            let k1 = kobayashi(&ball, &z, &w).unwrap();
            let k2 = kobayashi(&ball, &mobius_ball(&u, &z).unwrap(), &mobius_ball(&u, &w).unwrap()).unwrap();
            assert!((k1 - k2).abs() < 1e-10 * k1.max(1.0));
        }
    }

    #[test]
    fn green_ball_properties() {
        let ball = DomainSpec::unit_ball(2);
        let w = from_pairs(&[(0.3, 0.1), (0.0, -0.4)]);
        let g = green_ball(&ball, &CVector::zeros(2), &w).unwrap().finite().unwrap();
        assert!((g - norm(&w).ln()).abs() < 1e-15);
        assert_eq!(green_ball(&ball, &w, &w).unwrap(), ExtReal::NegInfinity);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = random_ball_point(&mut rng, 2, 0.8);
        let dir = random_sphere_point(&mut rng, 2);
        let mut prev = f64::NEG_INFINITY;
        for k in 1..30 {
            let r = 1.0 - 0.5f64.powi(k);
            let g = green_ball(&ball, &z, &(&dir * Complex64::new(r, 0.0))).unwrap().finite().unwrap();
            assert!(g < 0.0);
            if k > 3 {
                assert!(g > prev);
            }
            prev = g;
        }
        assert!(prev.abs() < 1e-7);
        for _ in 0..100 {
            let (z, w) = (random_ball_point(&mut rng, 2, 0.99), random_ball_point(&mut rng, 2, 0.99));
            let a = green_ball(&ball, &z, &w).unwrap().finite().unwrap();
            let b = green_ball(&ball, &w, &z).unwrap().finite().unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn green_sub_mean_value_on_complex_lines() {
        let ball = DomainSpec::unit_ball(2);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let z = random_ball_point(&mut rng, 2, 0.5);
            let c = random_ball_point(&mut rng, 2, 0.5);
            let dir = random_sphere_point(&mut rng, 2);
            let r = 0.3;
            let center = green_ball(&ball, &z, &c).unwrap();
            let m = 256;
            let mean = (0..m)
                .map(|k| {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    let w = &c + &dir * Complex64::from_polar(r, th);
                    green_ball(&ball, &z, &w).unwrap().finite().unwrap_or(-1e300)
                })
                .sum::<f64>()
                / m as f64;
            if let Some(center) = center.finite() {
                assert!(center <= mean + 1e-9, "{center} > {mean}");
            }
        }
    }

    #[test]
    fn boundary_limits_match_prediction() {
        let e1 = unit(2, 0);
        let radial = BoundaryCurve::linear(e1.clone(), e1.clone());
        let lim = boundary_limit(|z| omega_ball(&e1, z), &e1, &radial, Schedule::default()).unwrap();
        assert!((lim.estimate.value + 2.0).abs() < 1e-9);
        let fast = BoundaryCurve::linear(e1.clone(), &e1 * Complex64::new(2.0, 0.0));
        let lim = boundary_limit(|z| omega_ball(&e1, z), &e1, &fast, Schedule::default()).unwrap();
        assert!((lim.estimate.value + 1.0).abs() < 1e-9 && lim.prediction == -1.0);
        let tangential = BoundaryCurve::linear(e1.clone(), unit(2, 1));
        assert!(matches!(
            boundary_limit(|z| omega_ball(&e1, z), &e1, &tangential, Schedule::default()),
            Err(Error::TangentialCurve(_))
        ));
    }

    #[test]
    fn rescaling_is_exact_algebra() {
        for rho in [0.5, 2.0, 7.0] {
            assert_eq!(rescale_couple(-3.0, rho) * rho, -3.0);
        }
    }

    #[test]
    fn pullback_identity_unitary_and_automorphism() {
        let ball = DomainSpec::unit_ball(2);
        let q = from_pairs(&[(0.6, 0.0), (0.0, 0.8)]);
        let z = from_pairs(&[(0.1, 0.3), (-0.2, 0.1)]);
        let id = pullback_kernel(Biholomorphism::Identity, &ball, &q).unwrap();
        assert_eq!(id.eval(&z).unwrap(), omega_ball(&q, &z).unwrap());
        assert!((id.renormalization - 1.0).abs() < 1e-15);

        let s = 0.5f64.sqrt();
        let u = CMatrix::from_row_slice(2, 2, &[
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, s),
            Complex64::new(s, 0.0),
        ]);
        let pb = pullback_kernel(Biholomorphism::Unitary(u.clone()), &ball, &q).unwrap();
        assert!((pb.renormalization - 1.0).abs() < 1e-12);
        assert!(norm(&(&pb.p - u.adjoint() * &q)) < 1e-15);
        assert!((pb.eval(&z).unwrap() - omega_ball(&pb.p, &z).unwrap()).abs() < 1e-12);

        let anchor = from_pairs(&[(0.3, 0.2), (-0.1, 0.4)]);
        let pb = pullback_kernel(Biholomorphism::BallAutomorphism { anchor }, &ball, &q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let z = random_ball_point(&mut rng, 2, 0.99);
            let a = pb.eval_canonical(&z).unwrap();
            let b = omega_ball(&pb.p, &z).unwrap();
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}
