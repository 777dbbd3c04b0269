//! Strongly pseudoconvex domains given by defining functions, and the
//! differential data of their boundaries.
//!
//! A domain is `{ψ < 0}`. Built-in kinds carry analytic derivatives; custom
//! domains parse ψ from an expression and fall back to central finite
//! differences (gradient step 1e−6, Hessian step 1e−4).
//!
//! All boundary data uses the canonical defining couple θ_p(v) = ⟨v, ν_p⟩,
//! with ν_p the outward Euclidean unit normal.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{
    self, from_entries, from_real, norm, orthonormal_complement, real_orthonormal_complement,
    to_entries, to_real, CMatrix, CVector, ComplexEntry,
};

/// |ψ(p)| below this counts as a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-9;

const FD_GRADIENT_STEP: f64 = 1e-6;
const FD_HESSIAN_STEP: f64 = 1e-4;
const LEVI_DEGENERACY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CustomDomain {
    psi: Expr,
    n: usize,
    interior: CVector,
    search_radius: f64,
}

impl CustomDomain {
    /// `interior` is a reference point with ψ < 0; `search_radius` bounds the
    /// region where boundary searches look for sign changes of ψ.
    pub fn new(psi: Expr, n: Option<usize>, interior: Option<CVector>, search_radius: Option<f64>) -> Result<Self> {
        let n = n.unwrap_or_else(|| psi.dimension()).max(psi.dimension());
        if n == 0 {
            return Err(Error::MalformedDefiningFunction(format!(
                "{:?} does not reference any coordinate",
                psi.source()
            )));
        }
        let interior = interior.unwrap_or_else(|| CVector::zeros(n));
        if interior.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: interior.len(),
            });
        }
        let v = psi.eval_real(&interior);
        if !v.is_finite() {
            return Err(Error::MalformedDefiningFunction(format!("psi is not finite at the reference point: {v}")));
        }
        if v >= 0.0 {
            return Err(Error::MalformedDefiningFunction(format!(
                "psi must be negative at the reference interior point, got {v}"
            )));
        }
        let search_radius = search_radius.unwrap_or(10.0);
        if !(search_radius > 0.0) {
            return Err(Error::InvalidArgument("search radius must be positive".into()));
        }
        Ok(CustomDomain {
            psi,
            n,
            interior,
            search_radius,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.psi
    }
}

/// A bounded domain `{ψ < 0}` in ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// The unit disc, ψ = |z|² − 1.
    Disc,
    /// ψ = ‖z‖² − 1.
    UnitBall { n: usize },
    /// ψ = ‖z − c‖² − r².
    Ball { center: CVector, radius: f64 },
    /// ψ = Σ a_j |z_j|² − 1.
    Ellipsoid { a: Vec<f64> },
    Custom(CustomDomain),
}

/// Value, complex gradient ∂ψ/∂z_j and complex Hessian ∂²ψ/∂z_i∂z̄_j.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiJet {
    pub value: f64,
    pub gradient: CVector,
    pub hessian: CMatrix,
}

/// Differential data of ∂D at a boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFrame {
    pub p: CVector,
    /// Outward Euclidean unit normal.
    pub nu: CVector,
    /// Orthonormal basis of the complex tangent space T_p^ℂ∂D.
    pub tangent_basis: Vec<CVector>,
    /// Levi form of ψ restricted to `tangent_basis`.
    pub levi: CMatrix,
    /// θ_p(v) = Σ theta_coeffs_j v_j = ⟨v, ν_p⟩.
    pub theta_coeffs: CVector,
    /// Euclidean norm of the real differential dψ at p.
    pub dpsi_norm: f64,
}

impl BoundaryFrame {
    pub fn theta(&self, v: &CVector) -> Complex64 {
        self.theta_coeffs.iter().zip(v.iter()).map(|(c, x)| c * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    /// The tangent balls are certified inside/around the whole domain.
    Global,
    /// Only the local curvature comparison holds.
    LocalOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OsculatingRadii {
    /// Reciprocal of the largest normal curvature.
    pub r_in: f64,
    /// Reciprocal of the smallest normal curvature (infinite if it is ≤ 0).
    pub r_out: f64,
    pub containment: Containment,
}

/// A Euclidean ball B(center, radius), tangent to ∂D at some boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBall {
    pub center: CVector,
    pub radius: f64,
}

impl TangentBall {
    pub fn contains(&self, z: &CVector) -> bool {
        norm(&(z - &self.center)) < self.radius
    }
}

/// Inscribed and circumscribed balls tangent at p with certified containment
/// `inner ⊆ D ⊆ outer`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBalls {
    pub inner: TangentBall,
    pub outer: TangentBall,
}

impl DomainSpec {
    pub fn unit_ball(n: usize) -> DomainSpec {
        assert!(n >= 1);
        if n == 1 {
            DomainSpec::Disc
        } else {
            DomainSpec::UnitBall { n }
        }
    }

    pub fn ball(center: CVector, radius: f64) -> Result<DomainSpec> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(DomainSpec::Ball { center, radius })
    }

    pub fn ellipsoid(a: Vec<f64>) -> Result<DomainSpec> {
        if a.is_empty() || a.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("ellipsoid coefficients must be positive, got {a:?}")));
        }
        Ok(DomainSpec::Ellipsoid { a })
    }

    pub fn custom(psi: &str) -> Result<DomainSpec> {
        Ok(DomainSpec::Custom(CustomDomain::new(Expr::parse(psi)?, None, None, None)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Disc => 1,
            DomainSpec::UnitBall { n } => *n,
            DomainSpec::Ball { center, .. } => center.len(),
            DomainSpec::Ellipsoid { a } => a.len(),
            DomainSpec::Custom(c) => c.n,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DomainSpec::Disc => "disc",
            DomainSpec::UnitBall { .. } => "unit_ball",
            DomainSpec::Ball { .. } => "ball",
            DomainSpec::Ellipsoid { .. } => "ellipsoid",
            DomainSpec::Custom(_) => "custom",
        }
    }

    /// True for the unit disc and unit balls (where closed forms exist for
    /// Green functions and geodesics).
    pub fn is_unit_ball(&self) -> bool {
        matches!(self, DomainSpec::Disc | DomainSpec::UnitBall { .. })
    }

    /// Built-in kinds that are convex (peak functions exp⟨z − p, ν_p⟩ apply).
    pub fn is_convex_kind(&self) -> bool {
        !matches!(self, DomainSpec::Custom(_))
    }

    /// As a ball (center, radius) if the domain is one.
    pub fn as_ball(&self) -> Option<(CVector, f64)> {
        match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } => Some((CVector::zeros(self.dim()), 1.0)),
            DomainSpec::Ball { center, radius } => Some((center.clone(), *radius)),
            _ => None,
        }
    }

    pub fn reference_point(&self) -> CVector {
        match self {
            DomainSpec::Ball { center, .. } => center.clone(),
            DomainSpec::Custom(c) => c.interior.clone(),
            _ => CVector::zeros(self.dim()),
        }
    }

    /// Radius of a ball around the reference point containing the closure.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } => 1.0,
            DomainSpec::Ball { radius, .. } => *radius,
            DomainSpec::Ellipsoid { a } => 1.0 / a.iter().cloned().fold(f64::INFINITY, f64::min).sqrt(),
            DomainSpec::Custom(c) => c.search_radius,
        }
    }

    fn check_dim(&self, z: &CVector) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(())
    }

    pub fn psi(&self, z: &CVector) -> f64 {
        match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } => linalg::norm_sqr(z) - 1.0,
            DomainSpec::Ball { center, radius } => linalg::norm_sqr(&(z - center)) - radius * radius,
            DomainSpec::Ellipsoid { a } => a.iter().zip(z.iter()).map(|(w, c)| w * c.norm_sqr()).sum::<f64>() - 1.0,
            DomainSpec::Custom(c) => c.psi.eval_real(z),
        }
    }

    pub fn contains(&self, z: &CVector) -> bool {
        z.len() == self.dim() && self.psi(z) < 0.0
    }

    fn psi_real(&self, x: &[f64]) -> f64 {
        self.psi(&from_real(x))
    }

    /// Real weights w with ψ = Σ w_k x_k² − 1 in interleaved real coordinates
    /// (ellipsoid kinds only).
    fn ellipsoid_weights(&self) -> Option<Vec<f64>> {
        match self {
            DomainSpec::Ellipsoid { a } => Some(a.iter().flat_map(|&w| [w, w]).collect()),
            _ => None,
        }
    }

    /// Real gradient (∂ψ/∂x_1, ∂ψ/∂y_1, ...).
    pub fn real_gradient(&self, z: &CVector) -> Vec<f64> {
        let x = to_real(z);
        match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } => x.iter().map(|v| 2.0 * v).collect(),
            DomainSpec::Ball { center, .. } => {
                let c = to_real(center);
                x.iter().zip(&c).map(|(v, c)| 2.0 * (v - c)).collect()
            }
            DomainSpec::Ellipsoid { .. } => {
                let w = self.ellipsoid_weights().unwrap();
                x.iter().zip(&w).map(|(v, w)| 2.0 * w * v).collect()
            }
            DomainSpec::Custom(_) => {
                let h = FD_GRADIENT_STEP;
                (0..x.len())
                    .map(|k| {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[k] += h;
                        xm[k] -= h;
                        (self.psi_real(&xp) - self.psi_real(&xm)) / (2.0 * h)
                    })
                    .collect()
            }
        }
    }

    /// Real Hessian in interleaved real coordinates.
    pub fn real_hessian(&self, z: &CVector) -> DMatrix<f64> {
        let d = 2 * self.dim();
        match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } | DomainSpec::Ball { .. } => {
                DMatrix::from_diagonal_element(d, d, 2.0)
            }
            DomainSpec::Ellipsoid { .. } => {
                let w = self.ellipsoid_weights().unwrap();
                DMatrix::from_diagonal(&DVector::from_iterator(d, w.iter().map(|w| 2.0 * w)))
            }
            DomainSpec::Custom(_) => {
                let x = to_real(z);
                let h = FD_HESSIAN_STEP;
                let f0 = self.psi_real(&x);
                let mut hess = DMatrix::zeros(d, d);
                for i in 0..d {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    hess[(i, i)] = (self.psi_real(&xp) - 2.0 * f0 + self.psi_real(&xm)) / (h * h);
                    for j in 0..i {
                        let shifted = |si: f64, sj: f64| {
                            let mut y = x.clone();
                            y[i] += si * h;
                            y[j] += sj * h;
                            self.psi_real(&y)
                        };
                        let v = (shifted(1.0, 1.0) - shifted(1.0, -1.0) - shifted(-1.0, 1.0) + shifted(-1.0, -1.0))
                            / (4.0 * h * h);
                        hess[(i, j)] = v;
                        hess[(j, i)] = v;
                    }
                }
                hess
            }
        }
    }

    /// ψ(z), ∂ψ/∂z_j and ∂²ψ/∂z_i∂z̄_j.
    pub fn psi_jet(&self, z: &CVector) -> Result<PsiJet> {
        self.check_dim(z)?;
        let value = self.psi(z);
        let g = self.real_gradient(z);
        let h = self.real_hessian(z);
        if !value.is_finite() || g.iter().any(|v| !v.is_finite()) || h.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedDefiningFunction(format!("non-finite jet at {z:?}")));
        }
        let n = self.dim();
        let gradient = CVector::from_iterator(n, (0..n).map(|j| Complex64::new(0.5 * g[2 * j], -0.5 * g[2 * j + 1])));
        let hessian = CMatrix::from_fn(n, n, |i, j| {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            Complex64::new(
                0.25 * (h[(xi, xj)] + h[(yi, yj)]),
                0.25 * (h[(xi, yj)] - h[(yi, xj)]),
            )
        });
        Ok(PsiJet {
            value,
            gradient,
            hessian,
        })
    }

    fn check_boundary(&self, p: &CVector, tol: f64) -> Result<()> {
        self.check_dim(p)?;
        let residual = self.psi(p).abs();
        if !(residual < tol) {
            return Err(Error::NotOnBoundary {
                residual,
                tolerance: tol,
            });
        }
        Ok(())
    }

    pub fn boundary_frame(&self, p: &CVector) -> Result<BoundaryFrame> {
        self.boundary_frame_with_tol(p, BOUNDARY_TOL)
    }

    pub fn boundary_frame_with_tol(&self, p: &CVector, tol: f64) -> Result<BoundaryFrame> {
        self.check_boundary(p, tol)?;
        let jet = self.psi_jet(p)?;
        let conj_grad = jet.gradient.map(|c| c.conj());
        let gnorm = norm(&conj_grad);
        if !(gnorm > 1e-14) {
            return Err(Error::ZeroGradient);
        }
        let nu = linalg::scale(&conj_grad, 1.0 / gnorm);
        let tangent_basis = orthonormal_complement(&nu);
        let m = tangent_basis.len();
        let levi = CMatrix::from_fn(m, m, |i, j| {
            let ti = &tangent_basis[i];
            let tj = &tangent_basis[j];
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..nu.len() {
                for l in 0..nu.len() {
                    s += jet.hessian[(k, l)] * ti[k] * tj[l].conj();
                }
            }
            s
        });
        Ok(BoundaryFrame {
            p: p.clone(),
            theta_coeffs: nu.map(|c| c.conj()),
            nu,
            tangent_basis,
            levi,
            dpsi_norm: 2.0 * gnorm,
        })
    }

    /// Density of ω_∂D against Euclidean surface measure:
    /// 4^{n−1} (n−1)! det(Levi ψ) / |dψ|^{n−1}.
    pub fn levi_density(&self, p: &CVector) -> Result<f64> {
        let frame = self.boundary_frame(p)?;
        let n = self.dim();
        let det = if frame.levi.nrows() == 0 {
            1.0
        } else {
            let eig = SymmetricEigen::new(frame.levi.clone());
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
            if !(min > LEVI_DEGENERACY_TOL * max.max(1.0)) {
                return Err(Error::NotPseudoconvex(format!(
                    "Levi form has eigenvalue {min:e} at {:?}",
                    to_real(p)
                )));
            }
            eig.eigenvalues.iter().product()
        };
        let factorial: f64 = (1..n).map(|k| k as f64).product();
        Ok(4f64.powi(n as i32 - 1) * factorial * det / frame.dpsi_norm.powi(n as i32 - 1))
    }

    /// Principal curvatures of the real hypersurface ∂D at p, ascending.
    pub fn principal_curvatures(&self, p: &CVector) -> Result<Vec<f64>> {
        self.check_boundary(p, BOUNDARY_TOL)?;
        let g = self.real_gradient(p);
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(gnorm > 1e-14) {
            return Err(Error::ZeroGradient);
        }
        let h = self.real_hessian(p);
        let basis = real_orthonormal_complement(&g);
        let m = basis.len();
        let shape = DMatrix::from_fn(m, m, |i, j| {
            let bi = DVector::from_column_slice(&basis[i]);
            let bj = DVector::from_column_slice(&basis[j]);
            bi.dot(&(&h * bj)) / gnorm
        });
        let mut k: Vec<f64> = SymmetricEigen::new(shape).eigenvalues.iter().cloned().collect();
        k.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(k)
    }

    /// Radii of the inscribed and circumscribed osculating balls at p.
    pub fn osculating_radii(&self, p: &CVector) -> Result<OsculatingRadii> {
        let k = self.principal_curvatures(p)?;
        let kmin = k[0];
        let kmax = *k.last().unwrap();
        let r_in = if kmax > 0.0 { 1.0 / kmax } else { f64::INFINITY };
        let r_out = if kmin > 0.0 { 1.0 / kmin } else { f64::INFINITY };
        let containment = match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } | DomainSpec::Ball { .. } => Containment::Global,
            DomainSpec::Ellipsoid { .. } => {
                let nu = self.boundary_frame(p)?.nu;
                let w = self.ellipsoid_weights().unwrap();
                let inner_ok = inner_certificate(&w, &to_real(&(p - linalg::scale(&nu, r_in))), r_in) >= -CERT_TOL;
                let outer_ok = r_out.is_finite()
                    && outer_certificate(&w, &to_real(&(p - linalg::scale(&nu, r_out))), r_out) >= -CERT_TOL * r_out * r_out;
                if inner_ok && outer_ok {
                    Containment::Global
                } else {
                    Containment::LocalOnly
                }
            }
            DomainSpec::Custom(_) => Containment::LocalOnly,
        };
        Ok(OsculatingRadii {
            r_in,
            r_out,
            containment,
        })
    }

    /// Tangent balls at p with certified global containment `inner ⊆ D ⊆ outer`.
    ///
    /// For ellipsoids the osculating radii are used when they certify;
    /// otherwise the radius is bisected towards the rolling-ball bounds
    /// s_min²/s_max (inner) and s_max²/s_min (outer), which always certify.
    pub fn tangent_balls(&self, p: &CVector) -> Result<TangentBalls> {
        match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } | DomainSpec::Ball { .. } => {
                self.check_boundary(p, BOUNDARY_TOL)?;
                let (center, radius) = self.as_ball().unwrap();
                let ball = TangentBall { center, radius };
                Ok(TangentBalls {
                    inner: ball.clone(),
                    outer: ball,
                })
            }
            DomainSpec::Ellipsoid { a } => {
                let local = self.osculating_radii(p)?;
                let nu = self.boundary_frame(p)?.nu;
                let w = self.ellipsoid_weights().unwrap();
                let center_at = |r: f64| p - linalg::scale(&nu, r);
                let inner_ok = |r: f64| inner_certificate(&w, &to_real(&center_at(r)), r) >= -CERT_TOL;
                let outer_ok = |r: f64| outer_certificate(&w, &to_real(&center_at(r)), r) >= -CERT_TOL * r * r;

                let s_min = 1.0 / a.iter().cloned().fold(f64::NEG_INFINITY, f64::max).sqrt();
                let s_max = 1.0 / a.iter().cloned().fold(f64::INFINITY, f64::min).sqrt();

                let r_in = if inner_ok(local.r_in) {
                    local.r_in
                } else {
                    let (mut good, mut bad) = ((s_min * s_min / s_max).min(local.r_in), local.r_in);
                    for _ in 0..80 {
                        let mid = 0.5 * (good + bad);
                        if inner_ok(mid) {
                            good = mid;
                        } else {
                            bad = mid;
                        }
                    }
                    good
                };
                let r_out = if local.r_out.is_finite() && outer_ok(local.r_out) {
                    local.r_out
                } else {
                    let safe = s_max * s_max / s_min;
                    let (mut good, mut bad) = (safe.max(local.r_out.min(safe)), local.r_out.min(safe));
                    for _ in 0..80 {
                        let mid = 0.5 * (good + bad);
                        if outer_ok(mid) {
                            good = mid;
                        } else {
                            bad = mid;
                        }
                    }
                    good
                };
                Ok(TangentBalls {
                    inner: TangentBall {
                        center: center_at(r_in),
                        radius: r_in,
                    },
                    outer: TangentBall {
                        center: center_at(r_out),
                        radius: r_out,
                    },
                })
            }
            DomainSpec::Custom(_) => Err(Error::ContainmentNotCertified(
                "custom domains carry no global containment certificate; use the lower envelope only".into(),
            )),
        }
    }

    /// Signed Euclidean distance to ∂D: negative inside, zero on the boundary.
    pub fn signed_boundary_distance(&self, z: &CVector) -> Result<f64> {
        self.check_dim(z)?;
        match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } => Ok(norm(z) - 1.0),
            DomainSpec::Ball { center, radius } => Ok(norm(&(z - center)) - radius),
            _ => {
                let v = self.psi(z);
                if v.abs() < BOUNDARY_TOL * 1e-3 {
                    return Ok(0.0);
                }
                let d = self.nearest_boundary_distance(z)?;
                Ok(if v < 0.0 { -d } else { d })
            }
        }
    }

    /// First boundary crossing from `origin` along `dir` within `max_t`.
    fn ray_crossing(&self, origin: &[f64], dir: &[f64], max_t: f64) -> Option<Vec<f64>> {
        let at = |t: f64| -> Vec<f64> { origin.iter().zip(dir).map(|(o, d)| o + t * d).collect() };
        let s0 = self.psi_real(origin).signum();
        let steps = 256;
        let mut prev = 0.0;
        for i in 1..=steps {
            let t = max_t * i as f64 / steps as f64;
            let v = self.psi_real(&at(t));
            if v.signum() != s0 || v == 0.0 {
                let (mut lo, mut hi) = (prev, t);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if self.psi_real(&at(mid)).signum() == s0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(at(0.5 * (lo + hi)));
            }
            prev = t;
        }
        None
    }

    /// Multi-start Newton iteration on the Lagrange system
    /// x − z = μ ∇ψ(x), ψ(x) = 0, keeping the nearest stationary point.
    fn nearest_boundary_distance(&self, z: &CVector) -> Result<f64> {
        let x0 = to_real(z);
        let d = x0.len();
        let max_t = self.bounding_radius() * 2.0 + norm(&(z - self.reference_point())) + 1.0;
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for k in 0..d {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[k] = s;
                dirs.push(e);
            }
        }
        let g = self.real_gradient(z);
        let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gn > 0.0 {
            dirs.push(g.iter().map(|x| x / gn).collect());
            dirs.push(g.iter().map(|x| -x / gn).collect());
        }
        let mut best: Option<f64> = None;
        let mut trace = Vec::new();
        for dir in dirs {
            let Some(start) = self.ray_crossing(&x0, &dir, max_t) else {
                continue;
            };
            match self.lagrange_newton(&x0, start) {
                Ok(x) => {
                    let dist = x.iter().zip(&x0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    best = Some(best.map_or(dist, |b: f64| b.min(dist)));
                }
                Err(res) => trace.push(res),
            }
        }
        best.ok_or(Error::NonConvergence {
            what: "projected Newton iteration for the boundary distance".into(),
            iterations: 100,
            trace,
        })
    }

    fn lagrange_newton(&self, z: &[f64], start: Vec<f64>) -> std::result::Result<Vec<f64>, f64> {
        let d = z.len();
        let mut x = start;
        let g = self.real_gradient(&from_real(&x));
        let gg: f64 = g.iter().map(|v| v * v).sum();
        let mut mu: f64 = x.iter().zip(z).zip(&g).map(|((x, z), g)| (x - z) * g).sum::<f64>() / gg.max(1e-300);
        let scale = 1.0 + z.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut residual = f64::INFINITY;
        for _ in 0..100 {
            let zx = from_real(&x);
            let g = self.real_gradient(&zx);
            let h = self.real_hessian(&zx);
            let psi = self.psi_real(&x);
            let mut f = DVector::zeros(d + 1);
            for k in 0..d {
                f[k] = x[k] - z[k] - mu * g[k];
            }
            f[d] = psi;
            residual = f.norm();
            if residual < 1e-13 * scale {
                return Ok(x);
            }
            let mut j = DMatrix::zeros(d + 1, d + 1);
            for r in 0..d {
                for c in 0..d {
                    j[(r, c)] = if r == c { 1.0 } else { 0.0 } - mu * h[(r, c)];
                }
                j[(r, d)] = -g[r];
                j[(d, r)] = g[r];
            }
            let Some(step) = j.lu().solve(&f) else {
                return Err(residual);
            };
            for k in 0..d {
                x[k] -= step[k];
            }
            mu -= step[d];
            if x.iter().any(|v| !v.is_finite()) {
                return Err(residual);
            }
        }
        if residual < 1e-10 * scale {
            Ok(x)
        } else {
            Err(residual)
        }
    }

    /// Boundary point hit by the ray from the reference point along `dir`.
    pub fn boundary_point_along(&self, dir: &CVector) -> Result<CVector> {
        self.check_dim(dir)?;
        let u = linalg::normalized(dir).ok_or_else(|| Error::InvalidArgument("zero direction".into()))?;
        match self {
            DomainSpec::Disc | DomainSpec::UnitBall { .. } => Ok(u),
            DomainSpec::Ball { center, radius } => Ok(center + linalg::scale(&u, *radius)),
            DomainSpec::Ellipsoid { a } => {
                let q: f64 = a.iter().zip(u.iter()).map(|(w, c)| w * c.norm_sqr()).sum();
                Ok(linalg::scale(&u, 1.0 / q.sqrt()))
            }
            DomainSpec::Custom(c) => {
                let origin = to_real(&c.interior);
                let x = self
                    .ray_crossing(&origin, &to_real(&u), 2.0 * c.search_radius)
                    .ok_or_else(|| Error::OutsideDomain("no boundary crossing within the search radius".into()))?;
                Ok(from_real(&x))
            }
        }
    }

    /// Boundary points along Gaussian-random directions.
    pub fn sample_boundary<R: Rng>(&self, count: usize, rng: &mut R) -> Result<Vec<CVector>> {
        (0..count)
            .map(|_| {
                let n = self.dim();
                let dir = CVector::from_iterator(
                    n,
                    (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
                );
                self.boundary_point_along(&dir)
            })
            .collect()
    }

    /// Checks the structural invariants on `samples` boundary points.
    pub fn validate<R: Rng>(&self, samples: usize, rng: &mut R) -> Result<()> {
        let r = self.reference_point();
        if !(self.psi(&r) < 0.0) {
            return Err(Error::MalformedDefiningFunction("psi is not negative at the reference point".into()));
        }
        for p in self.sample_boundary(samples, rng)? {
            self.levi_density(&p)?;
        }
        Ok(())
    }
}

const CERT_TOL: f64 = 1e-10;

/// Maximizes a concave function on [lo, hi] by golden-section search,
/// also trying the left endpoint.
fn maximize_concave<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd).max(f(lo))
}

/// S-lemma certificate for B(c, r) ⊆ {Σ w_k x_k² < 1}: contained iff the
/// returned maximum is ≥ 0.
fn inner_certificate(w: &[f64], c: &[f64], r: f64) -> f64 {
    let w_max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cc: f64 = c.iter().map(|x| x * x).sum();
    let g = |tau: f64| {
        let mut s = 1.0 + tau * (cc - r * r);
        for (wk, ck) in w.iter().zip(c) {
            if *ck != 0.0 {
                let den = tau - wk;
                if den <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                s -= tau * tau * ck * ck / den;
            }
        }
        s
    };
    let hi = 2.0 * w_max.max(1.0 / (r * r)) + 1.0;
    maximize_concave(g, w_max, hi)
}

/// S-lemma certificate for {Σ w_k x_k² < 1} ⊆ B(c, r): contained iff the
/// returned maximum is ≥ 0.
fn outer_certificate(w: &[f64], c: &[f64], r: f64) -> f64 {
    let w_min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let cc: f64 = c.iter().map(|x| x * x).sum();
    let f = |tau: f64| {
        let mut s = r * r - cc - tau;
        for (wk, ck) in w.iter().zip(c) {
            if *ck != 0.0 {
                let den = tau * wk - 1.0;
                if den <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                s -= ck * ck / den;
            }
        }
        s
    };
    let lo = 1.0 / w_min;
    maximize_concave(f, lo, lo.max(r * r) + 1.0)
}

// ---------------------------------------------------------------------------
// JSON form

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainJson {
    Disc,
    UnitBall {
        n: usize,
    },
    Ball {
        center: Vec<ComplexEntry>,
        radius: f64,
    },
    Ellipsoid {
        a: Vec<f64>,
    },
    Custom {
        psi: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interior: Option<Vec<ComplexEntry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
}

impl TryFrom<DomainJson> for DomainSpec {
    type Error = Error;

    fn try_from(j: DomainJson) -> Result<DomainSpec> {
        match j {
            DomainJson::Disc => Ok(DomainSpec::Disc),
            DomainJson::UnitBall { n } => {
                if n == 0 {
                    return Err(Error::InvalidArgument("dimension must be positive".into()));
                }
                Ok(DomainSpec::unit_ball(n))
            }
            DomainJson::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::InvalidArgument("ball center must be non-empty".into()));
                }
                DomainSpec::ball(from_entries(&center), radius)
            }
            DomainJson::Ellipsoid { a } => DomainSpec::ellipsoid(a),
            DomainJson::Custom {
                psi,
                n,
                interior,
                radius,
            } => Ok(DomainSpec::Custom(CustomDomain::new(
                Expr::parse(&psi)?,
                n,
                interior.map(|v| from_entries(&v)),
                radius,
            )?)),
        }
    }
}

impl From<&DomainSpec> for DomainJson {
    fn from(d: &DomainSpec) -> DomainJson {
        match d {
            DomainSpec::Disc => DomainJson::Disc,
            DomainSpec::UnitBall { n } => DomainJson::UnitBall { n: *n },
            DomainSpec::Ball { center, radius } => DomainJson::Ball {
                center: to_entries(center),
                radius: *radius,
            },
            DomainSpec::Ellipsoid { a } => DomainJson::Ellipsoid { a: a.clone() },
            DomainSpec::Custom(c) => DomainJson::Custom {
                psi: c.psi.source().to_string(),
                n: Some(c.n),
                interior: Some(to_entries(&c.interior)),
                radius: Some(c.search_radius),
            },
        }
    }
}

impl DomainSpec {
    /// Parses the JSON domain form, or the shorthands `disc`, `unit_ball:N`
    /// and `ellipsoid:a1,a2,...`.
    pub fn parse(text: &str) -> Result<DomainSpec> {
        let t = text.trim();
        if t.starts_with('{') {
            let j: DomainJson = serde_json::from_str(t).map_err(|e| Error::Parse(format!("domain spec: {e}")))?;
            return j.try_into();
        }
        let (kind, rest) = t.split_once(':').unwrap_or((t, ""));
        match kind {
            "disc" => Ok(DomainSpec::Disc),
            "unit_ball" => {
                let n: usize = rest
                    .parse()
                    .map_err(|_| Error::Parse(format!("unit_ball needs a dimension, got {rest:?}")))?;
                DomainSpec::try_from(DomainJson::UnitBall { n })
            }
            "ellipsoid" => {
                let a = rest
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad coefficient {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                DomainSpec::ellipsoid(a)
            }
            "custom" => DomainSpec::custom(rest),
            _ => Err(Error::Parse(format!("unknown domain {text:?}"))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DomainJson::from(self)).expect("domain json")
    }
}
