//! Small helpers for complex n-vectors.
//!
//! Points of ℂⁿ are `DVector<Complex64>`. The Hermitian product is linear in
//! the first slot: ⟨a, b⟩ = Σ a_j · conj(b_j).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// ⟨a, b⟩ = Σ a_j conj(b_j).
pub fn hermitian(a: &CVector, b: &CVector) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sqr(a: &CVector) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn norm(a: &CVector) -> f64 {
    norm_sqr(a).sqrt()
}

/// k-th standard basis vector (0-based).
pub fn unit(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = ONE;
    v
}

pub fn from_reals(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)))
}

pub fn from_pairs(values: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&(re, im)| Complex64::new(re, im)))
}

/// Interleaved real coordinates (x1, y1, x2, y2, ...).
pub fn to_real(z: &CVector) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn from_real(x: &[f64]) -> CVector {
    debug_assert!(x.len() % 2 == 0);
    CVector::from_iterator(x.len() / 2, x.chunks(2).map(|c| Complex64::new(c[0], c[1])))
}

pub fn scale(a: &CVector, s: f64) -> CVector {
    a.map(|x| x * s)
}

pub fn normalized(a: &CVector) -> Option<CVector> {
    let n = norm(a);
    if n == 0.0 || !n.is_finite() {
        None
    } else {
        Some(scale(a, 1.0 / n))
    }
}

/// Orthonormal basis (Hermitian product) of the complement of the unit vector `nu`.
pub fn orthonormal_complement(nu: &CVector) -> Vec<CVector> {
    let n = nu.len();
    let mut basis: Vec<CVector> = Vec::with_capacity(n.saturating_sub(1));
    // Seed Gram-Schmidt with the coordinate axes least aligned with nu.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| nu[i].norm().partial_cmp(&nu[j].norm()).unwrap());
    for k in order {
        if basis.len() + 1 == n {
            break;
        }
        let mut v = unit(n, k);
        for _ in 0..2 {
            let c = hermitian(&v, nu);
            v -= nu * c;
            for b in &basis {
                let c = hermitian(&v, b);
                v -= b * c;
            }
        }
        if let Some(u) = normalized(&v) {
            if norm(&v) > 1e-8 {
                basis.push(u);
            }
        }
    }
    basis
}

/// Orthonormal basis of the Euclidean complement of `g` in ℝᵈ.
pub fn real_orthonormal_complement(g: &[f64]) -> Vec<Vec<f64>> {
    let d = g.len();
    let gn: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let g: Vec<f64> = g.iter().map(|x| x / gn).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| g[i].abs().partial_cmp(&g[j].abs()).unwrap());
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for k in order {
        if basis.len() + 1 == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for _ in 0..2 {
            let c: f64 = v.iter().zip(&g).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(&g).for_each(|(a, b)| *a -= c * b);
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
            }
        }
        let vn: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vn > 1e-8 {
            basis.push(v.iter().map(|x| x / vn).collect());
        }
    }
    basis
}

/// Compensated summation in a fixed order.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// JSON form of a complex number: a bare real or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexEntry {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexEntry::Real(x) => Complex64::new(x, 0.0),
            ComplexEntry::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexEntry {
    fn from(c: Complex64) -> Self {
        ComplexEntry::Pair([c.re, c.im])
    }
}

pub fn from_entries(entries: &[ComplexEntry]) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|e| e.value()))
}

pub fn to_entries(z: &CVector) -> Vec<ComplexEntry> {
    z.iter().map(|&c| c.into()).collect()
}
