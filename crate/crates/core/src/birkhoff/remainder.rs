//! Size of the tail-cubic remainder field on a sphere of states.

use num_complex::Complex64;
use rand::Rng;

use super::BirkhoffError;
use crate::poly::{CompiledPolynomial, ModeIndex, Polynomial, WeightScheme};
use crate::seeds;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailProbe {
    pub s: f64,
    pub radius: f64,
    pub weights: WeightScheme,
    /// random starting points besides the deterministic ones
    pub starts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for TailProbe {
    fn default() -> Self {
        TailProbe { s: 3.0, radius: 1.0, weights: WeightScheme::Shifted, starts: 8, iters: 4000, seed: 0 }
    }
}

struct Objective {
    f: CompiledPolynomial,
    w: Vec<f64>,
}

impl Objective {
    fn point(a: &[f64]) -> Vec<Complex64> {
        a.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    /// `sum_j w_j (|df/dxi_j|^2 + |df/deta_j|^2)` at `xi = eta = a`, with the
    /// partials.
    fn eval(&self, a: &[f64]) -> (f64, Vec<Complex64>, Vec<Complex64>) {
        let z = Self::point(a);
        let n = a.len();
        let mut dx = vec![Complex64::new(0.0, 0.0); n];
        let mut de = dx.clone();
        self.f.gradient(&z, &z, &mut dx, &mut de);
        let phi = (0..n).map(|j| self.w[j] * (dx[j].norm_sqr() + de[j].norm_sqr())).sum();
        (phi, dx, de)
    }

    /// Value and gradient in `a`; the Hessian-vector product comes from a
    /// central difference of the gradient along `w * conj(X)`.
    fn value_grad(&self, a: &[f64]) -> (f64, Vec<f64>) {
        let (phi, dx, de) = self.eval(a);
        let n = a.len();
        let ux: Vec<Complex64> = (0..n).map(|j| dx[j].conj() * self.w[j]).collect();
        let ue: Vec<Complex64> = (0..n).map(|j| de[j].conj() * self.w[j]).collect();
        let scale = ux.iter().chain(&ue).map(|u| u.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return (phi, vec![0.0; n]);
        }
        let h = 1e-4 * a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300) / scale;
        let shifted = |sgn: f64| {
            let xi: Vec<Complex64> = (0..n).map(|j| Complex64::new(a[j], 0.0) + ux[j] * (sgn * h)).collect();
            let eta: Vec<Complex64> = (0..n).map(|j| Complex64::new(a[j], 0.0) + ue[j] * (sgn * h)).collect();
            let mut gx = vec![Complex64::new(0.0, 0.0); n];
            let mut ge = gx.clone();
            self.f.gradient(&xi, &eta, &mut gx, &mut ge);
            (gx, ge)
        };
        let (px, pe) = shifted(1.0);
        let (mx, me) = shifted(-1.0);
        let grad = (0..n).map(|j| 2.0 * ((px[j] - mx[j]) + (pe[j] - me[j])).re / (2.0 * h)).collect();
        (phi, grad)
    }
}

fn normalize(a: &mut [f64], w: &[f64], radius: f64) -> bool {
    let norm = a.iter().zip(w).map(|(x, w)| 2.0 * w * x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return false;
    }
    a.iter_mut().for_each(|x| *x *= radius / norm);
    true
}

fn ascend(obj: &Objective, mut a: Vec<f64>, radius: f64, iters: usize) -> f64 {
    if !normalize(&mut a, &obj.w, radius) {
        return 0.0;
    }
    let (mut phi, mut g) = obj.value_grad(&a);
    let mut step = 1e-2 * radius / g.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut stall = 0;
    for _ in 0..iters {
        // gradient in the metric of the constraint, ascent then projection
        let mut trial: Vec<f64> = a.iter().zip(&g).zip(&obj.w).map(|((x, g), w)| (x + step * g / w).max(0.0)).collect();
        if !normalize(&mut trial, &obj.w, radius) {
            step *= 0.5;
            continue;
        }
        let (p2, g2) = obj.value_grad(&trial);
        if p2 > phi {
            stall = if p2 - phi <= 1e-13 * phi { stall + 1 } else { 0 };
            a = trial;
            phi = p2;
            g = g2;
            step *= 1.5;
            if stall > 50 {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-30 {
                break;
            }
        }
    }
    phi.sqrt()
}

/// Largest weighted size `||X_{f_N}(z)||_s` found over nonnegative real
/// states `xi = eta` with `||z||_s = radius`, where `f_N` collects the terms
/// of `f` with three or more factors of index above `n`.
///
/// This is a lower estimate of the sup by multistart projected ascent; for
/// polynomials with nonnegative coefficients the sup is attained on such
/// states.
pub fn tail_field_sup(f: &Polynomial, n: u32, probe: &TailProbe) -> Result<f64, BirkhoffError> {
    if !(probe.radius > 0.0 && probe.s >= 0.0) {
        return Err(BirkhoffError::InvalidParams("probe radius must be positive".into()));
    }
    let (_, high) = f.tail_split(n);
    if high.is_zero() {
        return Ok(0.0);
    }
    let index = ModeIndex::new(high.support());
    let w: Vec<f64> = index.modes().iter().map(|m| probe.weights.weight(m, probe.s)).collect();
    let obj = Objective { f: CompiledPolynomial::new(&high, &index)?, w };
    let dim = index.len();
    let decay = |p: f64| -> Vec<f64> { index.modes().iter().map(|m| probe.weights.base(m).powf(-(probe.s + p))).collect() };

    let mut starts: Vec<Vec<f64>> = [0.5, 1.0, 2.0, 3.0].iter().map(|&p| decay(p)).collect();
    for k in 0..dim.min(6) {
        let mut v = decay(3.0);
        v[k] *= 1e3;
        starts.push(v);
    }
    let mut rng = seeds::rng(probe.seed, "tail-probe");
    for _ in 0..probe.starts {
        let base = decay(0.0);
        starts.push(base.iter().map(|b| b * rng.gen::<f64>()).collect());
    }
    Ok(starts.into_iter().map(|a| ascend(&obj, a, probe.radius, probe.iters)).fold(0.0, f64::max))
}
