//! Small divisors omega.k with compensated summation.

use serde::Serialize;

use super::ResonanceError;
use crate::poly::ModeId;
use crate::spectra::FrequencyTable;

/// Exact product a*b = p + e.
#[inline]
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// sum_j omega_j k_j from explicit (omega, k) pairs, each product split exactly.
pub fn compensated_dot<I: IntoIterator<Item = (f64, i64)>>(pairs: I) -> f64 {
    let mut parts = Vec::new();
    for (w, k) in pairs {
        let (p, e) = two_product(w, k as f64);
        parts.push(p);
        parts.push(e);
    }
    compensated_sum(parts)
}

/// Signed omega.k.
pub fn signed_divisor(freqs: &FrequencyTable, k: &[(ModeId, i64)]) -> Result<f64, ResonanceError> {
    let mut pairs = Vec::with_capacity(k.len());
    for (m, c) in k {
        let w = freqs.get(m).ok_or_else(|| ResonanceError::UnsupportedMode(m.to_string()))?;
        pairs.push((w, *c));
    }
    Ok(compensated_dot(pairs))
}

/// |omega.k|
pub fn small_divisor(freqs: &FrequencyTable, k: &[(ModeId, i64)]) -> Result<f64, ResonanceError> {
    signed_divisor(freqs, k).map(f64::abs)
}

/// Parameters of a near-resonance search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorQuery {
    /// order: |k| <= r + 2
    pub r: u32,
    /// tail cutoff N
    pub n_cut: u32,
    pub gamma: f64,
    pub alpha: f64,
    /// enumeration bound on |j|
    pub jmax: u32,
    /// node budget of the search
    pub node_cap: u64,
}

impl DivisorQuery {
    pub fn new(r: u32, n_cut: u32, gamma: f64, alpha: f64, jmax: u32) -> Result<Self, ResonanceError> {
        let q = DivisorQuery { r, n_cut, gamma, alpha, jmax, node_cap: 500_000_000 };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), ResonanceError> {
        if !(self.gamma > 0.0) || !(self.alpha > 0.0) {
            return Err(ResonanceError::InvalidQuery("gamma and alpha must be > 0".into()));
        }
        if self.n_cut == 0 {
            return Err(ResonanceError::InvalidQuery("N must be >= 1".into()));
        }
        if self.jmax < self.n_cut {
            return Err(ResonanceError::InvalidQuery(format!("jmax = {} below N = {}", self.jmax, self.n_cut)));
        }
        Ok(())
    }

    /// gamma / N^alpha
    pub fn threshold(&self) -> f64 {
        threshold(self.gamma, self.alpha, self.n_cut)
    }

    pub fn max_len(&self) -> u32 {
        self.r + 2
    }
}

pub fn threshold(gamma: f64, alpha: f64, n: u32) -> f64 {
    gamma / (n as f64).powf(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: &[(i32, i64)]) -> Vec<(ModeId, i64)> {
        v.iter().map(|&(j, c)| (ModeId::scalar(j), c)).collect()
    }

    #[test]
    fn examples() {
        let lin = FrequencyTable::from_values(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(small_divisor(&lin, &[]).unwrap(), 0.0);
        assert_eq!(small_divisor(&lin, &k(&[(1, 1), (2, 1), (3, -1)])).unwrap(), 0.0);
        let two = FrequencyTable::from_values(&[1.0, 2f64.sqrt()]).unwrap();
        let d = small_divisor(&two, &k(&[(1, 1), (2, -1)])).unwrap();
        assert!((d - 0.41421356237309515).abs() < 1e-16);
        assert!(small_divisor(&two, &k(&[(7, 1)])).is_err());
    }

    #[test]
    fn compensation_beats_naive_sum() {
        let xs = [1e16, 1.0, -1e16];
        assert_eq!(compensated_sum(xs), 1.0);
        assert_eq!(compensated_dot([(1e16, 1), (1.0, 1), (1e16, -1)]), 1.0);
        // the rounding error of 0.1*3 survives the cancellation
        let d = compensated_dot([(0.1, 3), (0.30000000000000004, -1)]);
        assert!(d.abs() < 1e-16 && d != 0.0);
    }

    #[test]
    fn query_validation() {
        assert!(DivisorQuery::new(1, 5, 0.1, 1.0, 4).is_err());
        assert!(DivisorQuery::new(1, 5, 0.0, 1.0, 6).is_err());
        assert!((DivisorQuery::new(1, 4, 0.2, 0.5, 6).unwrap().threshold() - 0.1).abs() < 1e-16);
    }
}
