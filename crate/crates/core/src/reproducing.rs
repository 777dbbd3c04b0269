//! Quadrature against ω_∂D on spheres and the boundary reproducing formula.
//!
//! For n = 2 the sphere is parametrized in Hopf coordinates
//! z1 = cos η e^{iθ1}, z2 = sin η e^{iθ2}, whose surface element is
//! cos η sin η dη dθ1 dθ2. Nodes are Gauss-Legendre in η and equispaced in
//! both angles; weights include the Levi density 2, so they sum to (2π)².
//!
//! The one-variable correction term uses dd^c f = Δf dx∧dy.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::linalg::{hermitian, kahan_sum, norm_sqr, CVector, ONE};

/// Gauss-Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 1 { t } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (t * p - pm1) / (t * t - 1.0);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[m - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Boundary nodes ξ_i and weights w_i with Σ w_i f(ξ_i) ≈ ∫ f ω_∂D.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub n: usize,
    pub resolution: usize,
    /// Node coordinates, `n` consecutive entries per node.
    coords: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> CVector {
        CVector::from_column_slice(&self.coords[i * self.n..(i + 1) * self.n])
    }

    pub fn mass(&self) -> f64 {
        kahan_sum(self.weights.iter().copied())
    }

    /// Σ_i g(ξ_i) w_i in a fixed summation order.
    pub fn integrate<F>(&self, g: F) -> Result<f64>
    where
        F: Fn(&CVector) -> Result<f64> + Sync,
    {
        const CHUNK: usize = 4096;
        let partials: Vec<Result<f64>> = (0..self.len().div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(self.len());
                let mut terms = Vec::with_capacity(hi - lo);
                for i in lo..hi {
                    terms.push(g(&self.node(i))? * self.weights[i]);
                }
                Ok(kahan_sum(terms))
            })
            .collect();
        Ok(kahan_sum(partials.into_iter().collect::<Result<Vec<_>>>()?))
    }

    /// CSV with columns re_z1, im_z1, ..., weight.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header: Vec<String> = (1..=self.n).flat_map(|j| [format!("re_z{j}"), format!("im_z{j}")]).collect();
        header.push("weight".into());
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.len() {
            let node = &self.coords[i * self.n..(i + 1) * self.n];
            let mut row: Vec<String> = node.iter().flat_map(|c| [format!("{:e}", c.re), format!("{:e}", c.im)]).collect();
            row.push(format!("{:e}", self.weights[i]));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Quadrature on the unit sphere of ℂⁿ, n ∈ {1, 2}, at resolution m ≥ 4.
pub fn sphere_quadrature(n: usize, m: usize) -> Result<QuadratureRule> {
    if m < 4 {
        return Err(Error::InvalidArgument(format!("resolution must be at least 4, got {m}")));
    }
    let dtheta = 2.0 * PI / m as f64;
    match n {
        1 => {
            let coords = (0..m).map(|k| Complex64::from_polar(1.0, k as f64 * dtheta)).collect();
            Ok(QuadratureRule {
                n,
                resolution: m,
                coords,
                weights: vec![dtheta; m],
            })
        }
        2 => {
            let (x, wx) = gauss_legendre(m);
            let mut coords = Vec::with_capacity(2 * m * m * m);
            let mut weights = Vec::with_capacity(m * m * m);
            for (xi, wi) in x.iter().zip(&wx) {
                let eta = PI / 4.0 * (xi + 1.0);
                let w_eta = PI / 4.0 * wi;
                let (s, c) = eta.sin_cos();
                let w = 2.0 * c * s * w_eta * dtheta * dtheta;
                for j in 0..m {
                    let z1 = Complex64::from_polar(c, j as f64 * dtheta);
                    for k in 0..m {
                        coords.push(z1);
                        coords.push(Complex64::from_polar(s, k as f64 * dtheta));
                        weights.push(w);
                    }
                }
            }
            Ok(QuadratureRule {
                n,
                resolution: m,
                coords,
                weights,
            })
        }
        _ => Err(Error::Unsupported(format!("sphere quadrature is implemented for n = 1, 2, not {n}"))),
    }
}

fn check_rule(domain: &DomainSpec, rule: &QuadratureRule, z: &CVector) -> Result<()> {
    if !domain.is_unit_ball() || domain.dim() != rule.n {
        return Err(Error::InvalidArgument(format!(
            "rule for the unit sphere of C^{} does not match the {} domain of dimension {}",
            rule.n,
            domain.kind_name(),
            domain.dim()
        )));
    }
    if z.len() != rule.n {
        return Err(Error::DimensionMismatch {
            expected: rule.n,
            got: z.len(),
        });
    }
    if !(norm_sqr(z) < 1.0) {
        return Err(Error::OutsideDomain("evaluation point must be interior".into()));
    }
    Ok(())
}

/// (2π)^{−n} Σ_i f(ξ_i)|Ω_{ξ_i}(z)|^n w_i.
pub fn reproduce<F>(domain: &DomainSpec, f: F, z: &CVector, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(&CVector) -> f64 + Sync,
{
    check_rule(domain, rule, z)?;
    let n = rule.n as i32;
    let defect = 1.0 - norm_sqr(z);
    let s = rule.integrate(|xi| {
        let k = defect / (ONE - hermitian(z, xi)).norm_sqr();
        Ok(f(xi) * k.powi(n))
    })?;
    Ok(s / (2.0 * PI).powi(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszResult {
    /// (2π)^{−1} ∫ f |P_ξ(z)| dθ.
    pub boundary_term: f64,
    /// (2π)^{−1} ∫_𝔻 |G(z, w)| Δf(w) dA(w).
    pub correction: f64,
    /// boundary_term − correction, which reproduces f(z).
    pub value: f64,
}

/// Demailly's formula on the disc for subharmonic f:
/// f(z) = (2π)^{−1}∫ f|P_ξ(z)| dθ − (2π)^{−1}∫ |G(z,w)| Δf(w) dA(w).
///
/// The area integral is taken in the coordinates w = φ_z(u), where
/// |G(z, w)| = −ln|u|, on an `radial × angular` polar grid (Gauss-Legendre
/// in the radius, trapezoid in the angle).
pub fn riesz_correction_1d<F, L>(
    f: F,
    laplacian: L,
    z: Complex64,
    rule: &QuadratureRule,
    radial: usize,
    angular: usize,
) -> Result<RieszResult>
where
    F: Fn(Complex64) -> f64 + Sync,
    L: Fn(Complex64) -> f64 + Sync,
{
    if rule.n != 1 {
        return Err(Error::Unsupported("the correction term is implemented for n = 1 only".into()));
    }
    if radial < 1 || angular < 1 {
        return Err(Error::InvalidArgument("polar grid must be non-empty".into()));
    }
    let zv = CVector::from_element(1, z);
    let boundary_term = reproduce(&DomainSpec::Disc, |xi| f(xi[0]), &zv, rule)?;
    let (x, wx) = gauss_legendre(radial);
    let dth = 2.0 * PI / angular as f64;
    let zz = z.norm_sqr();
    let rows: Vec<f64> = x
        .par_iter()
        .zip(wx.par_iter())
        .map(|(xi, wi)| {
            let r = 0.5 * (xi + 1.0);
            let wr = 0.5 * wi;
            let terms = (0..angular).map(|k| {
                let u = Complex64::from_polar(r, k as f64 * dth);
                let den = ONE - z.conj() * u;
                let w = (z - u) / den;
                let jac = (1.0 - zz).powi(2) / den.norm_sqr().powi(2);
                -r.ln() * laplacian(w) * jac * r
            });
            kahan_sum(terms) * wr * dth
        })
        .collect();
    let correction = kahan_sum(rows) / (2.0 * PI);
    Ok(RieszResult {
        boundary_term,
        correction,
        value: boundary_term - correction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_pairs, from_reals};

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn masses() {
        let r1 = sphere_quadrature(1, 64).unwrap();
        assert!((r1.mass() - 2.0 * PI).abs() < 1e-12);
        let r2 = sphere_quadrature(2, 32).unwrap();
        assert!((r2.mass() - 4.0 * PI * PI).abs() < 1e-8);
        let e4 = (sphere_quadrature(2, 4).unwrap().mass() - 4.0 * PI * PI).abs();
        let e8 = (sphere_quadrature(2, 8).unwrap().mass() - 4.0 * PI * PI).abs();
        assert!(e8 <= e4 / 4.0, "{e4} {e8}");
        assert!(sphere_quadrature(3, 8).is_err());
        assert!(sphere_quadrature(2, 3).is_err());
    }

    #[test]
    fn nodes_lie_on_the_sphere() {
        let r = sphere_quadrature(2, 8).unwrap();
        for i in 0..r.len() {
            assert!((norm_sqr(&r.node(i)) - 1.0).abs() < 1e-14);
            assert!(r.weights[i] > 0.0);
        }
    }

    #[test]
    fn reproduces_pluriharmonic_functions() {
        let ball = DomainSpec::unit_ball(2);
        let rule = sphere_quadrature(2, 32).unwrap();
        let one = reproduce(&ball, |_| 1.0, &CVector::zeros(2), &rule).unwrap();
        assert!((one - 1.0).abs() < 1e-8);
        let re = reproduce(&ball, |x| x[0].re, &CVector::zeros(2), &rule).unwrap();
        assert!(re.abs() < 1e-8);
        let z = from_pairs(&[(0.2, -0.1), (0.3, 0.25)]);
        let v = reproduce(&ball, |x| (x[0] * x[1]).re, &z, &rule).unwrap();
        assert!((v - (z[0] * z[1]).re).abs() < 1e-6, "{v}");
    }

    #[test]
    fn positivity() {
        let ball = DomainSpec::unit_ball(2);
        let rule = sphere_quadrature(2, 8).unwrap();
        let v = reproduce(&ball, |x| x[0].norm_sqr(), &from_reals(&[0.5, 0.1]), &rule).unwrap();
        assert!(v >= 0.0);
    }

    #[test]
    fn rule_mismatch_is_rejected() {
        let rule = sphere_quadrature(1, 8).unwrap();
        assert!(reproduce(&DomainSpec::unit_ball(2), |_| 1.0, &CVector::zeros(2), &rule).is_err());
    }

    #[test]
    fn riesz_examples() {
        let rule = sphere_quadrature(1, 256).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let r = riesz_correction_1d(|w| w.norm_sqr(), |_| 4.0, zero, &rule, 200, 200).unwrap();
        assert!((r.boundary_term - 1.0).abs() < 1e-12);
        assert!((r.correction - 1.0).abs() < 1e-4, "{r:?}");
        let r = riesz_correction_1d(|w| w.norm_sqr().powi(2), |w| 16.0 * w.norm_sqr(), zero, &rule, 200, 200).unwrap();
        assert!(r.value.abs() < 1e-4, "{r:?}");
        let z = Complex64::new(0.3, -0.4);
        let r = riesz_correction_1d(|w| w.re, |_| 0.0, z, &rule, 20, 20).unwrap();
        assert_eq!(r.correction, 0.0);
        assert!((r.value - 0.3).abs() < 1e-12);
        let r = riesz_correction_1d(|w| w.norm_sqr(), |_| 4.0, z, &rule, 200, 200).unwrap();
        assert!((r.value - z.norm_sqr()).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn csv_export() {
        let rule = sphere_quadrature(1, 4).unwrap();
        let mut buf = Vec::new();
        rule.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("re_z1,im_z1,weight"));
    }
}
