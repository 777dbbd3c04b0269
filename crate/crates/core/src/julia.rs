//! Boundary behaviour of holomorphic self-maps of discs and balls: the
//! dilation coefficient λ_{p,q}, horoball inclusions, derivative probes and
//! the equivalent finiteness conditions along the normal ray.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::envelope;
use crate::error::{Error, Result};
use crate::extrapolate::{classify, richardson, ExtReal, Extrapolation, LimitClass, Schedule};
use crate::kernels::{kobayashi_unchecked, mobius_ball_jacobian, mobius_unchecked, omega_ball, KernelValue};
use crate::linalg::{from_entries, hermitian, norm, norm_sqr, orthonormal_complement, to_entries, CMatrix, CVector, ComplexEntry, ONE};

/// Holomorphic maps between unit balls, built from registered primitives.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    /// Disc automorphism (z + a)/(1 + āz).
    Blaschke { a: Complex64 },
    /// z ↦ (z_1^k, ..., z_n^k).
    Power(u32),
    /// z ↦ (d_1 z_1, ..., d_n z_n).
    Diag(Vec<Complex64>),
    /// The involution φ_anchor of the ball.
    BallAuto { anchor: CVector },
    Constant(CVector),
    Identity,
    /// Maps applied left to right: [f, g] is g ∘ f.
    Compose(Vec<MapSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapJson {
    Blaschke { a: ComplexEntry },
    Power(u32),
    Diag(Vec<ComplexEntry>),
    BallAuto { anchor: Vec<ComplexEntry> },
    Constant(Vec<ComplexEntry>),
    Identity,
    Compose(Vec<MapJson>),
}

impl From<MapJson> for MapSpec {
    fn from(j: MapJson) -> MapSpec {
        match j {
            MapJson::Blaschke { a } => MapSpec::Blaschke { a: a.value() },
            MapJson::Power(k) => MapSpec::Power(k),
            MapJson::Diag(d) => MapSpec::Diag(d.into_iter().map(|e| e.value()).collect()),
            MapJson::BallAuto { anchor } => MapSpec::BallAuto {
                anchor: from_entries(&anchor),
            },
            MapJson::Constant(c) => MapSpec::Constant(from_entries(&c)),
            MapJson::Identity => MapSpec::Identity,
            MapJson::Compose(ms) => MapSpec::Compose(ms.into_iter().map(MapSpec::from).collect()),
        }
    }
}

impl From<&MapSpec> for MapJson {
    fn from(m: &MapSpec) -> MapJson {
        match m {
            MapSpec::Blaschke { a } => MapJson::Blaschke { a: (*a).into() },
            MapSpec::Power(k) => MapJson::Power(*k),
            MapSpec::Diag(d) => MapJson::Diag(d.iter().map(|&c| c.into()).collect()),
            MapSpec::BallAuto { anchor } => MapJson::BallAuto {
                anchor: to_entries(anchor),
            },
            MapSpec::Constant(c) => MapJson::Constant(to_entries(c)),
            MapSpec::Identity => MapJson::Identity,
            MapSpec::Compose(ms) => MapJson::Compose(ms.iter().map(MapJson::from).collect()),
        }
    }
}

impl MapSpec {
    /// Parses `{"blaschke":{"a":0.5}}`, `{"power":2}`, `{"diag":[1,0.5]}`,
    /// `{"ball_auto":{"anchor":[...]}}`, `{"constant":[...]}`, `"identity"`
    /// or `{"compose":[...]}`.
    pub fn parse(text: &str) -> Result<MapSpec> {
        let j: MapJson = serde_json::from_str(text.trim()).map_err(|e| Error::Parse(format!("map spec: {e}")))?;
        Ok(j.into())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MapJson::from(self)).expect("map json")
    }

    /// Checks the map on 𝔹ⁿ and returns the target dimension.
    pub fn validate(&self, n: usize) -> Result<usize> {
        let mismatch = |expected: usize| Error::DimensionMismatch { expected, got: n };
        match self {
            MapSpec::Blaschke { a } => {
                if n != 1 {
                    return Err(mismatch(1));
                }
                if !(a.norm() < 1.0) {
                    return Err(Error::InvalidArgument("Blaschke parameter must satisfy |a| < 1".into()));
                }
                Ok(1)
            }
            MapSpec::Power(k) => {
                if *k == 0 {
                    return Err(Error::InvalidArgument("power must be at least 1".into()));
                }
                Ok(n)
            }
            MapSpec::Diag(d) => {
                if d.len() != n {
                    return Err(mismatch(d.len()));
                }
                if d.iter().any(|c| c.norm() > 1.0) {
                    return Err(Error::InvalidArgument("diagonal entries must satisfy |d_j| <= 1".into()));
                }
                Ok(n)
            }
            MapSpec::BallAuto { anchor } => {
                if anchor.len() != n {
                    return Err(mismatch(anchor.len()));
                }
                if !(norm_sqr(anchor) < 1.0) {
                    return Err(Error::InvalidArgument("automorphism anchor must be interior".into()));
                }
                Ok(n)
            }
            MapSpec::Constant(c) => {
                if !(norm_sqr(c) < 1.0) || c.is_empty() {
                    return Err(Error::InvalidArgument("constant value must be an interior point".into()));
                }
                Ok(c.len())
            }
            MapSpec::Identity => Ok(n),
            MapSpec::Compose(ms) => {
                let mut d = n;
                for m in ms {
                    d = m.validate(d)?;
                }
                Ok(d)
            }
        }
    }

    pub fn apply(&self, z: &CVector) -> CVector {
        match self {
            MapSpec::Blaschke { a } => z.map(|w| (w + a) / (ONE + a.conj() * w)),
            MapSpec::Power(k) => z.map(|w| w.powu(*k)),
            MapSpec::Diag(d) => CVector::from_iterator(z.len(), z.iter().zip(d).map(|(w, c)| w * c)),
            MapSpec::BallAuto { anchor } => mobius_unchecked(anchor, z),
            MapSpec::Constant(c) => c.clone(),
            MapSpec::Identity => z.clone(),
            MapSpec::Compose(ms) => ms.iter().fold(z.clone(), |w, m| m.apply(&w)),
        }
    }

    /// Complex Jacobian (target × source).
    pub fn jacobian(&self, z: &CVector) -> CMatrix {
        let n = z.len();
        match self {
            MapSpec::Blaschke { a } => {
                let den = ONE + a.conj() * z[0];
                CMatrix::from_element(1, 1, (ONE - a.norm_sqr()) / (den * den))
            }
            MapSpec::Power(k) => CMatrix::from_diagonal(&z.map(|w| Complex64::new(*k as f64, 0.0) * w.powu(k - 1))),
            MapSpec::Diag(d) => CMatrix::from_diagonal(&CVector::from_column_slice(d)),
            MapSpec::BallAuto { anchor } => mobius_ball_jacobian(anchor, z).expect("validated anchor"),
            MapSpec::Constant(c) => CMatrix::zeros(c.len(), n),
            MapSpec::Identity => CMatrix::identity(n, n),
            MapSpec::Compose(ms) => {
                let mut w = z.clone();
                let mut jac = CMatrix::identity(n, n);
                for m in ms {
                    jac = m.jacobian(&w) * jac;
                    w = m.apply(&w);
                }
                jac
            }
        }
    }
}

/// Membership of a point in a horoball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    Undetermined,
}

/// H(p, R) = {z ∈ D : Ω_p(z) < −1/R}.
#[derive(Debug, Clone, PartialEq)]
pub struct Horoball {
    pub domain: DomainSpec,
    pub pole: CVector,
    pub radius: f64,
}

impl Horoball {
    pub fn new(domain: DomainSpec, pole: CVector, radius: f64) -> Result<Horoball> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("horoball radius must be positive".into()));
        }
        domain.boundary_frame(&pole)?;
        Ok(Horoball { domain, pole, radius })
    }

    /// Exact for balls; from the sandwich interval otherwise.
    pub fn classify(&self, z: &CVector) -> Result<Membership> {
        if !self.domain.contains(z) {
            return Ok(Membership::Outside);
        }
        let level = -1.0 / self.radius;
        Ok(match envelope::kernel(&self.domain, &self.pole, z)? {
            KernelValue::Point { value, .. } => {
                if value < level {
                    Membership::Inside
                } else {
                    Membership::Outside
                }
            }
            KernelValue::Interval { lower, upper, .. } => {
                if upper < level {
                    Membership::Inside
                } else if lower >= level {
                    Membership::Outside
                } else {
                    Membership::Undetermined
                }
            }
        })
    }
}

/// Deterministic sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub samples: usize,
    pub seed: u64,
    pub schedule: Schedule,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            samples: 2000,
            seed: 0,
            schedule: Schedule::default(),
        }
    }
}

fn check_setup(map: &MapSpec, n: usize, p: &CVector, q: &CVector) -> Result<()> {
    let m = map.validate(n)?;
    for (x, d) in [(p, n), (q, m)] {
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        let r = (norm_sqr(x) - 1.0).abs();
        if r > 1e-9 {
            return Err(Error::NotOnBoundary {
                residual: r,
                tolerance: 1e-9,
            });
        }
    }
    Ok(())
}

fn image(map: &MapSpec, z: &CVector) -> Result<CVector> {
    let w = map.apply(z);
    let nw = norm(&w);
    if !(nw < 1.0) {
        return Err(Error::MapExitsTarget { norm: nw });
    }
    Ok(w)
}

/// Ω_p(z)/Ω_q(f(z)).
fn kernel_ratio(map: &MapSpec, p: &CVector, q: &CVector, z: &CVector) -> Result<f64> {
    let w = image(map, z)?;
    Ok(omega_ball(p, z)? / omega_ball(q, &w)?)
}

fn uniform_ball_point(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    let v = CVector::from_iterator(
        n,
        (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    );
    let r = rng.random::<f64>().powf(1.0 / (2 * n) as f64);
    &v * Complex64::new(r / norm(&v), 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JuliaReport {
    /// max(grid_sup, normal_ray_limit), or +inf if the ray ratio diverges.
    pub lambda_estimate: ExtReal,
    /// Supremum of the ratio over the sample (a lower bound for λ).
    pub grid_sup: f64,
    /// Extrapolated ratio along z = p − hν_p.
    pub normal_ray_limit: ExtReal,
    pub normal_ray_error: Option<f64>,
    pub q: Vec<[f64; 2]>,
    pub samples: usize,
    /// (h, ratio) along the normal ray.
    pub ray: Vec<(f64, f64)>,
    pub inclusion_violations: Vec<Violation>,
    pub undetermined_count: usize,
}

fn ray_ratios(map: &MapSpec, p: &CVector, q: &CVector, schedule: Schedule) -> Result<Vec<(f64, f64)>> {
    schedule
        .steps()
        .into_iter()
        .map(|h| Ok((h, kernel_ratio(map, p, q, &(p * Complex64::new(1.0 - h, 0.0)))?)))
        .collect()
}

/// Estimates λ_{p,q} = sup_z Ω_p(z)/Ω_q(f(z)) for f: 𝔹ⁿ → 𝔹ᵐ.
pub fn lambda_estimate(map: &MapSpec, n: usize, p: &CVector, q: &CVector, plan: SamplingPlan) -> Result<JuliaReport> {
    check_setup(map, n, p, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let points: Vec<CVector> = (0..plan.samples).map(|_| uniform_ball_point(&mut rng, n)).collect();
    let ratios: Vec<Result<f64>> = points.par_iter().map(|z| kernel_ratio(map, p, q, z)).collect();
    let ray = ray_ratios(map, p, q, plan.schedule)?;
    let mut grid_sup = f64::NEG_INFINITY;
    for r in ratios {
        grid_sup = grid_sup.max(r?);
    }
    for (_, r) in &ray {
        grid_sup = grid_sup.max(*r);
    }
    let values: Vec<f64> = ray.iter().map(|s| s.1).collect();
    let class = classify(&values, 1.0);
    let (normal_ray_limit, normal_ray_error) = match &class {
        LimitClass::Converges(e) => (ExtReal::Finite(e.value), Some(e.error)),
        other => (other.as_ext(), None),
    };
    let lambda_estimate = match normal_ray_limit {
        ExtReal::Finite(v) => ExtReal::Finite(v.max(grid_sup)),
        other => other,
    };
    Ok(JuliaReport {
        lambda_estimate,
        grid_sup,
        normal_ray_limit,
        normal_ray_error,
        q: q.iter().map(|c| [c.re, c.im]).collect(),
        samples: points.len() + ray.len(),
        ray,
        inclusion_violations: Vec::new(),
        undetermined_count: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub radius: f64,
    pub point: Vec<[f64; 2]>,
    /// λR·(−1/(λR) − Ω_q(f(z))); negative means f(z) ∉ H(q, λR).
    pub relative_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusReport {
    pub radius: f64,
    pub sampled: usize,
    pub violations: usize,
    pub undetermined: usize,
    pub min_relative_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub lambda: f64,
    pub radii: Vec<RadiusReport>,
    pub violations: Vec<Violation>,
    pub undetermined_count: usize,
}

/// Tolerance on the relative margin before a sample counts as a violation.
pub const INCLUSION_TOL: f64 = 1e-9;

/// Points h_edge(1 − 2^{−k}), k = 1..=EDGE_LEVELS, on the normal ray toward ∂H(p, R).
const EDGE_LEVELS: usize = 24;

/// Samples H(p, R) for each radius and checks f(z) ∈ H(q, λR).
///
/// Points are drawn by rejection from a box around the horoball (a disc in
/// the p direction, a ball across it), plus points approaching ∂H(p, R)
/// along the normal ray, where inclusions are tightest.
pub fn horoball_inclusion_check(
    map: &MapSpec,
    n: usize,
    p: &CVector,
    q: &CVector,
    lambda: f64,
    radii: &[f64],
    per_radius: usize,
    seed: u64,
) -> Result<InclusionReport> {
    check_setup(map, n, p, q)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InfiniteDilation(format!("inclusion needs a finite positive lambda, got {lambda}")));
    }
    let domain = DomainSpec::unit_ball(n);
    let target = DomainSpec::unit_ball(q.len());
    let transverse = orthonormal_complement(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let mut violations = Vec::new();
    let mut undetermined_total = 0;
    for &radius in radii {
        let hb = Horoball::new(domain.clone(), p.clone(), radius)?;
        let target_level = -1.0 / (lambda * radius);
        let c1 = 1.0 / (1.0 + radius);
        let r1 = radius / (1.0 + radius);
        let r2 = (radius / (1.0 + radius)).sqrt();
        let mut points = Vec::with_capacity(per_radius + EDGE_LEVELS);
        let h_edge = 2.0 * radius / (1.0 + radius);
        for k in 1..=EDGE_LEVELS as i32 {
            points.push(p * Complex64::new(1.0 - h_edge * (1.0 - 0.5f64.powi(k)), 0.0));
        }
        let mut undetermined = 0;
        let mut attempts = 0usize;
        while points.len() < per_radius + EDGE_LEVELS {
            attempts += 1;
            if attempts > 1000 * per_radius.max(1) {
                return Err(Error::NonConvergence {
                    what: "rejection sampling of a horoball".into(),
                    iterations: attempts,
                    trace: vec![],
                });
            }
            let u = uniform_ball_point(&mut rng, 1)[0] * r1 + c1;
            let mut z = p * u;
            if !transverse.is_empty() {
                let t = uniform_ball_point(&mut rng, transverse.len());
                for (tj, b) in t.iter().zip(&transverse) {
                    z += b * (tj * r2);
                }
            }
            match hb.classify(&z)? {
                Membership::Inside => points.push(z),
                Membership::Undetermined => undetermined += 1,
                Membership::Outside => {}
            }
        }
        let margins: Vec<Result<f64>> = points
            .par_iter()
            .map(|z| {
                let w = image(map, z)?;
                let v = envelope::kernel(&target, q, &w)?.upper();
                Ok((target_level - v) / -target_level)
            })
            .collect();
        let mut count = 0;
        let mut min_margin = f64::INFINITY;
        for (z, m) in points.iter().zip(margins) {
            let m = m?;
            min_margin = min_margin.min(m);
            if m < -INCLUSION_TOL {
                count += 1;
                violations.push(Violation {
                    radius,
                    point: z.iter().map(|c| [c.re, c.im]).collect(),
                    relative_margin: m,
                });
            }
        }
        undetermined_total += undetermined;
        reports.push(RadiusReport {
            radius,
            sampled: points.len(),
            violations: count,
            undetermined,
            min_relative_margin: min_margin,
        });
    }
    Ok(InclusionReport {
        lambda,
        radii: reports,
        violations,
        undetermined_count: undetermined_total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSample {
    pub h: f64,
    /// d(ρ̃_q ∘ f)_z(v_p), complex.
    pub probe1: [f64; 2],
    /// |1 − ρ̃_p(z)|^{1/2} ‖d(f − ρ_q ∘ f)_z(v_p)‖.
    pub probe2: f64,
    /// |1 − ρ̃_p(z)|^{−1/2} |d(ρ̃_q ∘ f)_z(τ_p)|.
    pub probe3: f64,
    /// ‖d(f − ρ_q ∘ f)_z(τ_p)‖.
    pub probe4: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub aperture: f64,
    /// M with the approach path inside {|z − p| < M dist(z, ∂𝔹ⁿ)} near p.
    pub cone_constant: f64,
    pub trace: Vec<ProbeSample>,
    pub limit1_re: Extrapolation,
    pub limit1_im: Extrapolation,
    pub limit2: Extrapolation,
    pub limit3: Extrapolation,
    /// Maximum of each probe's modulus along the trace.
    pub max: [f64; 4],
}

/// Evaluates the four derivative probes along z = p − h·d, where
/// d = (ν_p + aperture·τ_p)/‖·‖ (on the disc, ν_p(1 + i·aperture)/‖·‖).
///
/// The source geodesic is the diameter through p, so v_p = ν_p = p,
/// ρ̃_p(z) = ⟨z, p⟩; on the target ρ_q(w) = ⟨w, q⟩q.
pub fn jwc_derivative_probes(
    map: &MapSpec,
    n: usize,
    p: &CVector,
    q: &CVector,
    aperture: f64,
    schedule: Schedule,
) -> Result<ProbeReport> {
    check_setup(map, n, p, q)?;
    if !aperture.is_finite() {
        return Err(Error::TangentialCurve(0.0));
    }
    let ray = ray_ratios(map, p, q, schedule)?;
    let values: Vec<f64> = ray.iter().map(|s| s.1).collect();
    if let LimitClass::DivergesUp | LimitClass::DivergesDown = classify(&values, 1.0) {
        return Err(Error::InfiniteDilation(
            "the kernel ratio diverges along the normal ray; probes are only meaningful for finite lambda".into(),
        ));
    }
    let tangent = orthonormal_complement(p);
    let d = if let Some(t) = tangent.first() {
        p + t * Complex64::new(aperture, 0.0)
    } else {
        p * Complex64::new(1.0, aperture)
    };
    let d = &d / Complex64::new(norm(&d), 0.0);
    let dn = hermitian(&d, p);
    if !(dn.re > 1e-12) {
        return Err(Error::TangentialCurve(dn.re));
    }
    let mut trace = Vec::new();
    for h in schedule.steps() {
        if h >= dn.re {
            continue;
        }
        let z = p - &d * Complex64::new(h, 0.0);
        image(map, &z)?;
        let jac = map.jacobian(&z);
        let one_minus = (ONE - hermitian(&z, p)).norm();
        let dv = &jac * p;
        let dvq = hermitian(&dv, q);
        let probe2 = one_minus.sqrt() * norm(&(&dv - q * dvq));
        let (probe3, probe4) = match tangent.first() {
            Some(t) => {
                let dt = &jac * t;
                let dtq = hermitian(&dt, q);
                (dtq.norm() / one_minus.sqrt(), norm(&(&dt - q * dtq)))
            }
            None => (0.0, 0.0),
        };
        trace.push(ProbeSample {
            h,
            probe1: [dvq.re, dvq.im],
            probe2,
            probe3,
            probe4,
        });
    }
    if trace.len() < 3 {
        return Err(Error::InvalidArgument("schedule too short for the probes".into()));
    }
    let col = |f: &dyn Fn(&ProbeSample) -> f64| -> Vec<f64> { trace.iter().map(f).collect() };
    let limit1_re = richardson(&col(&|s| s.probe1[0]), 2.0, 0.5);
    let limit1_im = richardson(&col(&|s| s.probe1[1]), 2.0, 0.5);
    let limit2 = richardson(&col(&|s| s.probe2), 2.0, 0.5);
    let limit3 = richardson(&col(&|s| s.probe3), 2.0, 0.5);
    let mut max = [0.0f64; 4];
    for s in &trace {
        max[0] = max[0].max(s.probe1[0].hypot(s.probe1[1]));
        max[1] = max[1].max(s.probe2);
        max[2] = max[2].max(s.probe3);
        max[3] = max[3].max(s.probe4);
    }
    Ok(ProbeReport {
        aperture,
        cone_constant: 1.0 / dn.re,
        trace,
        limit1_re,
        limit1_im,
        limit2,
        limit3,
        max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// Limit of Ω_p(z)/Ω_q(f(z)) along the normal ray.
    pub lambda: ExtReal,
    /// Limit of k(z0, z) − k(f(z), z0′).
    pub kobayashi_gap: ExtReal,
    /// Limit of dist(f(z), ∂)/dist(z, ∂).
    pub distance_ratio: ExtReal,
    /// All three finite, or all three infinite.
    pub consistent: bool,
    /// (h, ratio, gap, distance ratio).
    pub trace: Vec<(f64, f64, f64, f64)>,
}

fn boundary_distance(w: &CVector) -> f64 {
    (1.0 - norm_sqr(w)) / (1.0 + norm(w))
}

/// Evaluates the three boundary conditions along z = p(1 − h).
pub fn condition_equivalence_check(
    map: &MapSpec,
    n: usize,
    p: &CVector,
    q: &CVector,
    z0: &CVector,
    z0_target: &CVector,
    schedule: Schedule,
) -> Result<ConditionReport> {
    check_setup(map, n, p, q)?;
    if z0.len() != n || z0_target.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z0.len(),
        });
    }
    if !(norm_sqr(z0) < 1.0) || !(norm_sqr(z0_target) < 1.0) {
        return Err(Error::OutsideDomain("base points must be interior".into()));
    }
    let mut trace = Vec::new();
    for h in schedule.steps() {
        let z = p * Complex64::new(1.0 - h, 0.0);
        let w = image(map, &z)?;
        let ratio = omega_ball(p, &z)? / omega_ball(q, &w)?;
        let gap = kobayashi_unchecked(z0, &z) - kobayashi_unchecked(&w, z0_target);
        let dist = boundary_distance(&w) / h;
        trace.push((h, ratio, gap, dist));
    }
    let lim = |f: &dyn Fn(&(f64, f64, f64, f64)) -> f64| classify(&trace.iter().map(f).collect::<Vec<_>>(), 1.0).as_ext();
    let lambda = lim(&|t| t.1);
    let kobayashi_gap = lim(&|t| t.2);
    let distance_ratio = lim(&|t| t.3);
    let finite = [lambda, kobayashi_gap, distance_ratio].map(|v| v.is_finite());
    Ok(ConditionReport {
        lambda,
        kobayashi_gap,
        distance_ratio,
        consistent: finite.iter().all(|&f| f) || finite.iter().all(|&f| !f),
        trace,
    })
}

/// f(p(1 − h))/‖·‖ at the finest level of the schedule: the candidate q.
pub fn boundary_image_estimate(map: &MapSpec, n: usize, p: &CVector, schedule: Schedule) -> Result<CVector> {
    map.validate(n)?;
    let h = *schedule.steps().last().unwrap();
    let w = image(map, &(p * Complex64::new(1.0 - h, 0.0)))?;
    let nw = norm(&w);
    if nw == 0.0 {
        return Err(Error::InvalidArgument("image of the normal ray is at the origin".into()));
    }
    Ok(&w / Complex64::new(nw, 0.0))
}
