//! Complex geodesics of balls through a boundary pole.
//!
//! A geodesic through an interior point z and a pole p is built by moving z
//! to the origin: with p′ = φ_z(p) the disc ζ ↦ φ_z(ζp′) passes through z at
//! ζ = 0 and reaches p at ζ = 1. Expanding the automorphism gives
//!
//! ```text
//! g(ζ) = (z − ζm)/(1 − ζc),   m = P_z p′ + s_z Q_z p′,   c = ⟨p′, z⟩.
//! ```
//!
//! CHL normalization precomposes g with a disc automorphism h fixing 1,
//! h = C⁻¹(a·C + ib) with C(ζ) = (1 + ζ)/(1 − ζ), chosen so that
//! φ′(1) = ⟨v, ν_p⟩v and Im⟨φ″(1), ν_p⟩ = 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::kernels::{mobius_unchecked, omega_for_ball_domain, poisson_disc};
use crate::linalg::{hermitian, norm, norm_sqr, CVector, ONE};

/// ζ ↦ (αζ + β)/(γζ + δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscMobius {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl DiscMobius {
    pub fn identity() -> DiscMobius {
        DiscMobius {
            alpha: ONE,
            beta: Complex64::new(0.0, 0.0),
            gamma: Complex64::new(0.0, 0.0),
            delta: ONE,
        }
    }

    /// The automorphism C⁻¹(a·C(ζ) + ib) fixing 1, a > 0.
    pub fn fixing_one(a: f64, b: f64) -> DiscMobius {
        let ib = Complex64::new(0.0, b);
        DiscMobius {
            alpha: a - ib + 1.0,
            beta: a + ib - 1.0,
            gamma: a - ib - 1.0,
            delta: a + ib + 1.0,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.alpha * z + self.beta) / (self.gamma * z + self.delta)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.gamma * z + self.delta;
        (self.alpha * self.delta - self.beta * self.gamma) / (den * den)
    }

    pub fn second_derivative(&self, z: Complex64) -> Complex64 {
        let den = self.gamma * z + self.delta;
        -2.0 * self.gamma * (self.alpha * self.delta - self.beta * self.gamma) / (den * den * den)
    }

    pub fn inverse(&self) -> DiscMobius {
        DiscMobius {
            alpha: self.delta,
            beta: -self.beta,
            gamma: -self.gamma,
            delta: self.alpha,
        }
    }
}

/// A complex geodesic φ: 𝔻 → B(center, radius) with φ(1) = p.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicDisc {
    pub center: CVector,
    pub radius: f64,
    /// Pole in the original coordinates.
    pub p: CVector,
    /// Outward unit normal at p.
    pub nu: CVector,
    /// Anchor and transported pole, in unit-ball coordinates.
    anchor: CVector,
    p_transported: CVector,
    m: CVector,
    c: Complex64,
    reparam: DiscMobius,
    pub chl: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicBoundaryData {
    pub phi_1: Vec<[f64; 2]>,
    pub phi_prime_1: Vec<[f64; 2]>,
    pub phi_second_1: Vec<[f64; 2]>,
    /// Unit direction of φ′(1).
    pub v: Vec<[f64; 2]>,
    /// ⟨v, ν_p⟩.
    pub v_dot_nu: [f64; 2],
    /// Im⟨φ″(1), ν_p⟩.
    pub im_second_dot_nu: f64,
    pub chl: bool,
}

fn pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

impl GeodesicDisc {
    fn to_unit(&self, w: &CVector) -> CVector {
        (w - &self.center) / Complex64::new(self.radius, 0.0)
    }

    fn from_unit(&self, u: &CVector) -> CVector {
        &self.center + u * Complex64::new(self.radius, 0.0)
    }

    fn raw(&self, zeta: Complex64) -> CVector {
        (&self.anchor - &self.m * zeta) / (ONE - zeta * self.c)
    }

    fn raw_prime(&self, zeta: Complex64) -> CVector {
        let den = ONE - zeta * self.c;
        (&self.anchor * self.c - &self.m) / (den * den)
    }

    fn raw_second(&self, zeta: Complex64) -> CVector {
        let den = ONE - zeta * self.c;
        (&self.anchor * self.c - &self.m) * (2.0 * self.c / (den * den * den))
    }

    /// φ(ζ) for |ζ| ≤ 1.
    pub fn phi(&self, zeta: Complex64) -> CVector {
        self.from_unit(&self.raw(self.reparam.apply(zeta)))
    }

    pub fn phi_prime(&self, zeta: Complex64) -> CVector {
        let h = self.reparam.apply(zeta);
        self.raw_prime(h) * (self.reparam.derivative(zeta) * self.radius)
    }

    pub fn phi_second(&self, zeta: Complex64) -> CVector {
        let h = self.reparam.apply(zeta);
        let h1 = self.reparam.derivative(zeta);
        let h2 = self.reparam.second_derivative(zeta);
        (self.raw_second(h) * (h1 * h1) + self.raw_prime(h) * h2) * Complex64::new(self.radius, 0.0)
    }

    /// Left inverse ρ̃ with ρ̃ ∘ φ = id on 𝔻.
    pub fn left_inverse(&self, w: &CVector) -> Result<Complex64> {
        let u = self.to_unit(w);
        if !(norm_sqr(&u) <= 1.0) {
            return Err(Error::OutsideDomain("left inverse is defined on the closed ball".into()));
        }
        let t = hermitian(&mobius_unchecked(&self.anchor, &u), &self.p_transported);
        Ok(self.reparam.inverse().apply(t))
    }

    /// Lempert projection ρ = φ ∘ ρ̃.
    pub fn projection(&self, w: &CVector) -> Result<CVector> {
        Ok(self.phi(self.left_inverse(w)?))
    }

    pub fn boundary_data(&self) -> GeodesicBoundaryData {
        let one = ONE;
        let d1 = self.phi_prime(one);
        let d2 = self.phi_second(one);
        let v = &d1 / Complex64::new(norm(&d1), 0.0);
        let vn = hermitian(&v, &self.nu);
        GeodesicBoundaryData {
            phi_1: pairs(&self.phi(one)),
            phi_prime_1: pairs(&d1),
            phi_second_1: pairs(&d2),
            v: pairs(&v),
            v_dot_nu: [vn.re, vn.im],
            im_second_dot_nu: hermitian(&d2, &self.nu).im,
            chl: self.chl,
        }
    }

    /// θ_p(φ′(1)) = ⟨φ′(1), ν_p⟩.
    pub fn theta_of_derivative(&self) -> Complex64 {
        hermitian(&self.phi_prime(ONE), &self.nu)
    }
}

fn ball_of(domain: &DomainSpec) -> Result<(CVector, f64)> {
    domain.as_ball().ok_or_else(|| {
        Error::Unsupported(format!(
            "geodesics are constructed on balls only, not on {} domains",
            domain.kind_name()
        ))
    })
}

/// The geodesic through the interior point z with φ(1) = p; with
/// `normalize_chl` it is reparametrized to satisfy the CHL conditions.
pub fn geodesic_through(domain: &DomainSpec, z: &CVector, p: &CVector, normalize_chl: bool) -> Result<GeodesicDisc> {
    let (center, radius) = ball_of(domain)?;
    if z.len() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: z.len(),
        });
    }
    let frame = domain.boundary_frame(p)?;
    let scale = Complex64::new(radius, 0.0);
    let zu = (z - &center) / scale;
    let pu = (p - &center) / scale;
    let zz = norm_sqr(&zu);
    if !(zz < 1.0) {
        return Err(Error::OutsideDomain("geodesics pass through interior points".into()));
    }
    let p_transported = mobius_unchecked(&zu, &pu);
    let m = if zz == 0.0 {
        p_transported.clone()
    } else {
        let s = (1.0 - zz).sqrt();
        let proj = &zu * (hermitian(&p_transported, &zu) / zz);
        &proj + (&p_transported - &proj) * Complex64::new(s, 0.0)
    };
    let c = hermitian(&p_transported, &zu);
    let mut g = GeodesicDisc {
        center,
        radius,
        p: p.clone(),
        nu: frame.nu,
        anchor: zu,
        p_transported,
        m,
        c,
        reparam: DiscMobius::identity(),
        chl: false,
    };
    if normalize_chl {
        let d1 = g.phi_prime(ONE);
        let d2 = g.phi_second(ONE);
        let d1n = hermitian(&d1, &g.nu).re;
        if !(d1n > 0.0) {
            return Err(Error::TangentialCurve(d1n));
        }
        let a = norm_sqr(&d1) / d1n;
        let b = -hermitian(&d2, &g.nu).im / d1n;
        g.reparam = DiscMobius::fixing_one(a, b);
        g.chl = true;
    }
    Ok(g)
}

/// The CHL geodesic at p with φ′(1) parallel to the unit vector v,
/// ⟨v, ν_p⟩ > 0.
pub fn chl_geodesic(domain: &DomainSpec, p: &CVector, v: &CVector) -> Result<GeodesicDisc> {
    let (_, radius) = ball_of(domain)?;
    let frame = domain.boundary_frame(p)?;
    let nv = norm(v);
    if !(nv > 0.0) {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let v = v / Complex64::new(nv, 0.0);
    let vn = hermitian(&v, &frame.nu);
    if !(vn.re > 1e-12) || vn.im.abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "direction must satisfy ⟨v, ν_p⟩ > 0, got {vn}"
        )));
    }
    // The geodesic is the slice of the ball by the complex line p + ℂv.
    let z = p - &v * Complex64::new(radius * vn.re, 0.0);
    geodesic_through(domain, &z, p, true)
}

/// max over the grid of |Ω_p(φ(ζ)) − Re(1/θ(φ′(1)))·P_𝔻(ζ)|.
pub fn restriction_identity_check(domain: &DomainSpec, g: &GeodesicDisc, grid: &[Complex64]) -> Result<f64> {
    if norm(&(g.phi(ONE) - &g.p)) > 1e-9 {
        return Err(Error::InvalidArgument("geodesic is not anchored at the pole".into()));
    }
    let factor = (ONE / g.theta_of_derivative()).re;
    let mut worst = 0.0f64;
    for &zeta in grid {
        let lhs = omega_for_ball_domain(domain, &g.p, &g.phi(zeta))?;
        let rhs = factor * poisson_disc(ONE, zeta)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// A polar grid of `count` points in {|ζ| ≤ r_max}.
pub fn disc_grid(count: usize, r_max: f64) -> Vec<Complex64> {
    let rings = (count as f64).sqrt().ceil() as usize;
    let per = count.div_ceil(rings);
    let mut out = Vec::with_capacity(count);
    'outer: for i in 0..rings {
        let r = r_max * (i as f64 + 1.0) / rings as f64;
        for j in 0..per {
            if out.len() == count {
                break 'outer;
            }
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5 * (i % 2) as f64) / per as f64;
            out.push(Complex64::from_polar(r, th));
        }
    }
    out
}
