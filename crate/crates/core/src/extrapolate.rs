//! Richardson extrapolation of boundary limits on the geometric schedule
//! t_k = 1 − 2^{−k}.

use serde::{Serialize, Serializer};

/// Extended reals. Infinite results are carried explicitly instead of
/// letting `f64::INFINITY` leak into arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    NegInfinity,
    PosInfinity,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::NegInfinity => s.serialize_str("-inf"),
            ExtReal::PosInfinity => s.serialize_str("+inf"),
        }
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::NegInfinity => f.write_str("-inf"),
            ExtReal::PosInfinity => f.write_str("+inf"),
        }
    }
}

/// Levels k = first..=last of the schedule h_k = 2^{−k}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub first: u32,
    pub last: u32,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { first: 1, last: 24 }
    }
}

impl Schedule {
    pub fn new(first: u32, last: u32) -> Schedule {
        assert!(first < last && last <= 40, "schedule levels must satisfy first < last <= 40");
        Schedule { first, last }
    }

    pub fn steps(&self) -> Vec<f64> {
        (self.first..=self.last).map(|k| 0.5f64.powi(k as i32)).collect()
    }

    /// Samples f(h) on the schedule.
    pub fn sample<F: FnMut(f64) -> f64>(&self, mut f: F) -> Vec<(f64, f64)> {
        self.steps().into_iter().map(|h| (h, f(h))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    pub error: f64,
}

/// Richardson extrapolation to h → 0 of values sampled at h_k = h_0 / ratio^k,
/// assuming an error expansion in powers h^{power}, h^{2 power}, ...
///
/// Returns the tableau entry with the smallest error estimate (the
/// Ridders/Neville stopping rule).
pub fn richardson(values: &[f64], ratio: f64, power: f64) -> Extrapolation {
    assert!(!values.is_empty());
    let mut best = Extrapolation {
        value: *values.last().unwrap(),
        error: f64::INFINITY,
    };
    if values.len() == 1 {
        return best;
    }
    let mut prev: Vec<f64> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let mut row = vec![v];
        for j in 1..=i.min(prev.len()) {
            let factor = ratio.powf(power * j as f64);
            let t = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            let err = (t - row[j - 1]).abs().max((t - prev[j - 1]).abs());
            if err <= best.error {
                best = Extrapolation { value: t, error: err };
            }
            row.push(t);
        }
        if i > 0 {
            let err = (v - values[i - 1]).abs();
            if err < best.error {
                best = Extrapolation { value: v, error: err };
            }
        }
        prev = row;
    }
    best
}

/// Outcome of a limit estimate along a refining schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LimitClass {
    Converges(Extrapolation),
    DivergesUp,
    DivergesDown,
}

impl LimitClass {
    pub fn as_ext(&self) -> ExtReal {
        match self {
            LimitClass::Converges(e) => ExtReal::Finite(e.value),
            LimitClass::DivergesUp => ExtReal::PosInfinity,
            LimitClass::DivergesDown => ExtReal::NegInfinity,
        }
    }
}

/// Classifies a sequence sampled on a halving schedule as convergent or
/// divergent. Divergent sequences keep non-shrinking increments (logarithmic
/// growth adds a constant per halving, poles double); convergent ones have
/// increments that decay geometrically.
pub fn classify(values: &[f64], power: f64) -> LimitClass {
    let n = values.len();
    assert!(n >= 3, "need at least three samples to classify a limit");
    if values.iter().any(|v| !v.is_finite()) {
        let last = values.iter().rev().find(|v| !v.is_finite()).unwrap();
        return if *last > 0.0 {
            LimitClass::DivergesUp
        } else {
            LimitClass::DivergesDown
        };
    }
    let window = (n - 1).min(6);
    let incs: Vec<f64> = values[n - window - 1..].windows(2).map(|w| w[1] - w[0]).collect();
    let first = incs[0];
    let last = *incs.last().unwrap();
    let scale = 1.0 + values[n - 1].abs();
    let same_sign = incs.iter().all(|d| d.signum() == last.signum());
    if same_sign && last.abs() > 1e-6 * scale && last.abs() >= 0.5 * first.abs() {
        return if last > 0.0 {
            LimitClass::DivergesUp
        } else {
            LimitClass::DivergesDown
        };
    }
    LimitClass::Converges(richardson(values, 2.0, power))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_in_h() {
        let s = Schedule::new(1, 10);
        let vals: Vec<f64> = s.sample(|h| -2.0 + 3.0 * h - 5.0 * h * h).into_iter().map(|x| x.1).collect();
        let e = richardson(&vals, 2.0, 1.0);
        assert!((e.value + 2.0).abs() < 1e-13, "{e:?}");
    }

    #[test]
    fn handles_square_root_expansions() {
        let s = Schedule::new(2, 24);
        let vals: Vec<f64> = s.sample(|h| 1.0 + h.sqrt() + 0.3 * h).into_iter().map(|x| x.1).collect();
        let e = richardson(&vals, 2.0, 0.5);
        assert!((e.value - 1.0).abs() < 1e-9, "{e:?}");
    }

    #[test]
    fn classifies_divergence() {
        let s = Schedule::new(1, 30);
        let log_div: Vec<f64> = s.sample(|h| 0.5 * (1.0 / h).ln()).into_iter().map(|x| x.1).collect();
        assert_eq!(classify(&log_div, 1.0), LimitClass::DivergesUp);
        let pole: Vec<f64> = s.sample(|h| -1.0 / h).into_iter().map(|x| x.1).collect();
        assert_eq!(classify(&pole, 1.0), LimitClass::DivergesDown);
        let conv: Vec<f64> = s.sample(|h| 2.0 / (1.0 + h)).into_iter().map(|x| x.1).collect();
        match classify(&conv, 1.0) {
            LimitClass::Converges(e) => assert!((e.value - 2.0).abs() < 1e-10),
            other => panic!("{other:?}"),
        }
        let constant = vec![0.25; 12];
        assert!(matches!(classify(&constant, 1.0), LimitClass::Converges(_)));
    }
}
