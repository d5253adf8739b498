//! Computable brackets for the tame norm of a polynomial vector field: an
//! l1-majorant upper bound and a sampled lower estimate.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::collections::BTreeMap;

use super::mode::{ModeId, WeightScheme};
use super::monomial::Monomial;
use super::polynomial::Polynomial;
use super::PolyError;

/// Upper bound for the tame constant of the vector field of `c * m`.
///
/// Each distinct variable `v` (multiplicity `e_v`) contributes the output
/// component `e_v c prod_{A-v} z`; its weighted size is bounded by putting the
/// s-norm on the cheapest remaining factor `m` and the 1-norm on the others,
/// then taking the worst choice of `m` so the bound also covers the
/// symmetrized multilinear form.
pub fn monomial_nu(m: &Monomial, c: f64, s: f64, weights: WeightScheme) -> f64 {
    let deg = m.degree();
    if deg == 0 {
        return 0.0;
    }
    let factors = m.factors();
    if deg == 1 {
        return c.abs() * weights.weight(&factors[0].mode, s).sqrt();
    }
    // log W1 = sum over the multiset of log w_1
    let log_w1_total: f64 = factors
        .iter()
        .map(|f| (f.xi + f.eta) as f64 * weights.weight(&f.mode, 1.0).ln())
        .sum();
    let mut total = 0.0;
    for (i, f) in factors.iter().enumerate() {
        for (e_v, _) in [(f.xi, true), (f.eta, false)] {
            if e_v == 0 {
                continue;
            }
            let wv_s = weights.weight(&f.mode, s).ln();
            let wv_1 = weights.weight(&f.mode, 1.0).ln();
            // best (largest) w_1(m)/w_s(m) over the multiset minus one copy of v
            let mut best = f64::NEG_INFINITY;
            for (k, g) in factors.iter().enumerate() {
                let avail = g.xi + g.eta - if k == i { 1 } else { 0 };
                if avail == 0 {
                    continue;
                }
                let r = weights.weight(&g.mode, 1.0).ln() - weights.weight(&g.mode, s).ln();
                if r > best {
                    best = r;
                }
            }
            let log_term = 0.5 * (wv_s + wv_1 + best - log_w1_total);
            total += e_v as f64 * log_term.exp();
        }
    }
    c.abs() * total
}

/// `nu_s` of a homogeneous component (or any polynomial): sum over terms.
pub fn nu(f: &Polynomial, s: f64, weights: WeightScheme) -> f64 {
    f.terms().map(|(m, c)| monomial_nu(m, c.norm(), s, weights)).sum()
}

/// `sum_r nu_s(f_r) R^{r-1}`.
pub fn majorant_norm(f: &Polynomial, s: f64, radius: f64, weights: WeightScheme) -> Result<f64, PolyError> {
    if !(s >= 1.0) || !(radius > 0.0) {
        return Err(PolyError::InvalidArgument(format!("need s >= 1 and R > 0, got s={s}, R={radius}")));
    }
    Ok(f
        .terms()
        .filter(|(m, _)| m.degree() >= 1)
        .map(|(m, c)| monomial_nu(m, c.norm(), s, weights) * radius.powi(m.degree() as i32 - 1))
        .sum())
}

/// Permanent by Ryser's formula; fine for the small sizes used here.
fn permanent(mat: &[Vec<f64>]) -> f64 {
    let n = mat.len();
    if n == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    let mut row_sums = vec![0.0; n];
    for subset in 1u32..(1 << n) {
        row_sums.iter_mut().for_each(|x| *x = 0.0);
        for (j, _) in (0..n).enumerate().filter(|(j, _)| subset & (1 << j) != 0) {
            for i in 0..n {
                row_sums[i] += mat[i][j];
            }
        }
        let prod: f64 = row_sums.iter().product();
        let sign = if (n - subset.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * prod;
    }
    total
}

/// Half-width of the log-uniform distribution used for the sample entries.
const LOG_SPREAD: f64 = 5.0;

/// Monte Carlo lower estimate of the tame constant of `mod f`.
///
/// `f` must be homogeneous of degree r >= 2. Each sample draws r-1 positive
/// vectors over the (xi, eta) variables of the support of `f`; the result is
/// the running maximum of the tame ratio, so more samples never decrease it.
pub fn sampled_tame_ratio(f: &Polynomial, s: f64, samples: usize, seed: u64, weights: WeightScheme) -> Result<f64, PolyError> {
    let degs = f.degrees();
    if degs.len() != 1 || degs[0] < 2 {
        return Err(PolyError::NonHomogeneous(format!("degrees present: {degs:?}")));
    }
    let r = degs[0] as usize;
    let modes = f.support();
    let index: BTreeMap<&ModeId, usize> = modes.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let nvar = 2 * modes.len();
    // variable slot: 2*i for xi_i, 2*i+1 for eta_i; conjugate slot flips the low bit
    let ws: Vec<f64> = modes.iter().flat_map(|m| [weights.weight(m, s); 2]).collect();
    let w1: Vec<f64> = modes.iter().flat_map(|m| [weights.weight(m, 1.0); 2]).collect();
    let terms: Vec<(f64, Vec<usize>)> = f
        .terms()
        .map(|(m, c)| {
            let vars = m
                .variables()
                .into_iter()
                .map(|(mode, is_xi)| 2 * index[&mode] + usize::from(!is_xi))
                .collect();
            (c.norm(), vars)
        })
        .collect();
    let fact: f64 = (1..r).map(|k| k as f64).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    let mut out = vec![0.0; nvar];
    for _ in 0..samples {
        let zs: Vec<Vec<f64>> = (0..r - 1)
            .map(|_| (0..nvar).map(|_| rng.gen_range(-LOG_SPREAD..LOG_SPREAD).exp()).collect())
            .collect();
        out.iter_mut().for_each(|x| *x = 0.0);
        for (c, vars) in &terms {
            let mut seen = Vec::with_capacity(r);
            for &v in vars {
                if seen.contains(&v) {
                    continue;
                }
                seen.push(v);
                let e_v = vars.iter().filter(|&&u| u == v).count() as f64;
                let mut rest = vars.clone();
                let pos = rest.iter().position(|&u| u == v).expect("v in vars");
                rest.remove(pos);
                let mat: Vec<Vec<f64>> = rest.iter().map(|&b| zs.iter().map(|z| z[b]).collect()).collect();
                out[v ^ 1] += c * e_v * permanent(&mat) / fact;
            }
        }
        let num = out.iter().zip(&ws).map(|(x, w)| w * x * x).sum::<f64>().sqrt();
        let norm_s: Vec<f64> = zs.iter().map(|z| z.iter().zip(&ws).map(|(x, w)| w * x * x).sum::<f64>().sqrt()).collect();
        let norm_1: Vec<f64> = zs.iter().map(|z| z.iter().zip(&w1).map(|(x, w)| w * x * x).sum::<f64>().sqrt()).collect();
        let mut den = 0.0;
        for l in 0..r - 1 {
            let mut p = norm_s[l];
            for (k, n1) in norm_1.iter().enumerate() {
                if k != l {
                    p *= n1;
                }
            }
            den += p;
        }
        den /= (r - 1) as f64;
        let ratio = num / den;
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Polynomial with a single real term, handy in tests and demos.
pub fn single_term(dim: usize, m: Monomial, c: f64) -> Polynomial {
    Polynomial::monomial(dim, m, Complex64::new(c, 0.0)).expect("dimension matches")
}
