//! Normal derivatives of the pluricomplex Green function and the boundary
//! measures built from them.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::kernels::{green_unchecked, omega_ball};
use crate::linalg::{norm_sqr, CVector};

pub const DEFAULT_H0: f64 = 1e-3;
pub const DEFAULT_HALVINGS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalDerivativeResult {
    /// −∂G(z, ·)/∂ν_p at p.
    pub value: f64,
    /// Richardson error estimate.
    pub error: f64,
    /// (h, G(z, p − hν_p)/h).
    pub step_sequence: Vec<(f64, f64)>,
    /// Largest |q(h) − q(h/2)|/h seen on the sequence.
    pub lipschitz_estimate: f64,
}

fn check_ball(domain: &DomainSpec) -> Result<()> {
    if !domain.is_unit_ball() {
        return Err(Error::Unsupported(format!(
            "the Green function is only available in closed form on the disc and unit balls, not on {}",
            domain.kind_name()
        )));
    }
    Ok(())
}

/// One-sided quotients G(z, p − hν_p)/h on h = h0·2^{−k}, k = 0..=halvings,
/// extrapolated to h → 0.
pub fn normal_derivative_green(
    domain: &DomainSpec,
    z: &CVector,
    p: &CVector,
    h0: f64,
    halvings: usize,
) -> Result<NormalDerivativeResult> {
    check_ball(domain)?;
    if !(h0 > 0.0 && h0 < 1.0) || halvings < 2 {
        return Err(Error::InvalidArgument("need 0 < h0 < 1 and at least two halvings".into()));
    }
    let frame = domain.boundary_frame(p)?;
    if !(norm_sqr(z) < 1.0) {
        return Err(Error::OutsideDomain("the Green pole must be interior".into()));
    }
    let mut steps = Vec::with_capacity(halvings + 1);
    for k in 0..=halvings {
        let h = h0 * 0.5f64.powi(k as i32);
        let w = p - &frame.nu * Complex64::new(h, 0.0);
        let g = green_unchecked(z, &w)
            .finite()
            .ok_or(Error::PoleCoincidence)?;
        steps.push((h, g / h));
    }
    let diffs: Vec<f64> = steps.windows(2).map(|w| (w[0].1 - w[1].1).abs()).collect();
    let lipschitz_estimate = diffs
        .iter()
        .zip(&steps)
        .map(|(d, (h, _))| d / h)
        .fold(0.0, f64::max);
    let scale = 1.0 + steps.last().unwrap().1.abs();
    let first = diffs[0];
    let last = *diffs.last().unwrap();
    let expected = first * 0.5f64.powi(diffs.len() as i32 - 1);
    if last > 4.0 * expected + 1e-12 * scale {
        return Err(Error::Regularity(format!(
            "quotient increments decay from {first:e} to {last:e}, slower than first order"
        )));
    }
    let values: Vec<f64> = steps.iter().map(|s| s.1).collect();
    let ex = richardson(&values, 2.0, 1.0);
    Ok(NormalDerivativeResult {
        value: ex.value,
        error: ex.error,
        step_sequence: steps,
        lipschitz_estimate,
    })
}

/// max over samples of |−∂G/∂ν_p − Ω_p(z)|.
pub fn green_omega_identity_check(domain: &DomainSpec, samples: &[(CVector, CVector)], h0: f64) -> Result<f64> {
    check_ball(domain)?;
    let devs: Vec<Result<f64>> = samples
        .par_iter()
        .map(|(z, p)| {
            let nd = normal_derivative_green(domain, z, p, h0, DEFAULT_HALVINGS)?;
            Ok((nd.value - omega_ball(p, z)?).abs())
        })
        .collect();
    let mut worst = 0.0f64;
    for d in devs {
        worst = worst.max(d?);
    }
    Ok(worst)
}

/// Density of the Demailly measure of G(z, ·) against surface volume at p:
/// (∂G/∂ν_p)^n · levi_density(p), with the normal derivative extrapolated.
pub fn demailly_density(domain: &DomainSpec, z: &CVector, p: &CVector) -> Result<f64> {
    let nd = normal_derivative_green(domain, z, p, DEFAULT_H0, DEFAULT_HALVINGS)?;
    let n = domain.dim() as i32;
    Ok((-nd.value).powi(n) * domain.levi_density(p)?)
}

/// Same density through the closed-form kernel: |Ω_p(z)|^n · levi_density(p).
pub fn demailly_density_closed_form(domain: &DomainSpec, z: &CVector, p: &CVector) -> Result<f64> {
    check_ball(domain)?;
    let n = domain.dim() as i32;
    Ok(omega_ball(p, z)?.abs().powi(n) * domain.levi_density(p)?)
}
