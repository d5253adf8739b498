//! Sparse polynomials in (xi, eta) with a degree cap and a drop ledger.

use num_complex::Complex64;
use num_rational::BigRational;
use std::collections::{BTreeMap, HashMap};

use super::coeff::{Coeff, GaussianRational};
use super::mode::ModeId;
use super::monomial::Monomial;
use super::PolyError;

/// Polynomial in the Birkhoff variables with coefficients in `C`.
///
/// Terms of degree above `cap` are never stored; whenever an operation
/// produces some, their post-cancellation l1 mass is added to
/// `dropped_mass`. Addition sums the ledgers of both operands, products and
/// brackets only record what they themselves dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C: Coeff = Complex64> {
    dim: usize,
    terms: BTreeMap<Monomial, C>,
    cap: Option<u32>,
    dropped_mass: f64,
}

/// Accumulator keyed by monomial that remembers the largest contribution,
/// so that cancellation down to roundoff can be pruned.
pub(crate) struct Accumulator<C: Coeff> {
    map: HashMap<Monomial, (C, f64)>,
}

impl<C: Coeff> Accumulator<C> {
    pub(crate) fn new() -> Self {
        Accumulator { map: HashMap::new() }
    }

    pub(crate) fn push(&mut self, m: Monomial, c: C) {
        let mag = c.magnitude();
        match self.map.get_mut(&m) {
            Some(e) => {
                e.0 = e.0.clone() + c;
                if mag > e.1 {
                    e.1 = mag;
                }
            }
            None => {
                self.map.insert(m, (c, mag));
            }
        }
    }

    pub(crate) fn finish(self, dim: usize, cap: Option<u32>, inherited: f64) -> Polynomial<C> {
        let mut p = Polynomial { dim, terms: BTreeMap::new(), cap, dropped_mass: inherited };
        for (m, (c, scale)) in self.map {
            if c.negligible(scale) {
                continue;
            }
            if cap.is_some_and(|k| m.degree() > k) {
                p.dropped_mass += c.magnitude();
            } else {
                p.terms.insert(m, c);
            }
        }
        p
    }
}

fn merge_cap(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new(), cap: None, dropped_mass: 0.0 }
    }

    pub fn zero_capped(dim: usize, cap: u32) -> Self {
        Polynomial { dim, terms: BTreeMap::new(), cap: Some(cap), dropped_mass: 0.0 }
    }

    /// Single term `c * m`.
    pub fn monomial(dim: usize, m: Monomial, c: C) -> Result<Self, PolyError> {
        let mut p = Self::zero(dim);
        p.add_term(m, c)?;
        Ok(p)
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            p.add_term(m, c)?;
        }
        Ok(p)
    }

    /// Add `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: C) -> Result<(), PolyError> {
        if let Some(d) = m.dim() {
            if d != self.dim {
                return Err(PolyError::DimensionMismatch { left: self.dim, right: d });
            }
        }
        if self.cap.is_some_and(|k| m.degree() > k) {
            self.dropped_mass += c.magnitude();
            return Ok(());
        }
        let scale = c.magnitude();
        match self.terms.get_mut(&m) {
            Some(e) => {
                let scale = scale.max(e.magnitude());
                *e = e.clone() + c;
                if e.negligible(scale) {
                    self.terms.remove(&m);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(m, c);
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Distinct degrees present, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().map(|m| m.degree()).collect();
        v.dedup();
        v
    }

    /// Modes appearing in any term.
    pub fn support(&self) -> Vec<ModeId> {
        let mut v: Vec<ModeId> = self.terms.keys().flat_map(|m| m.factors().iter().map(|f| f.mode.clone())).collect();
        v.sort();
        v.dedup();
        v
    }

    fn check_dim(&self, other: &Self) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    /// Keep the terms selected by `pred`; the ledger is carried over.
    pub fn filter<F: Fn(&Monomial, &C) -> bool>(&self, pred: F) -> Self {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().filter(|(m, c)| pred(m, c)).map(|(m, c)| (m.clone(), c.clone())).collect(),
            cap: self.cap,
            dropped_mass: self.dropped_mass,
        }
    }

    pub fn map_coeffs<F: Fn(&Monomial, &C) -> C>(&self, f: F) -> Self {
        let mut p = Polynomial { dim: self.dim, terms: BTreeMap::new(), cap: self.cap, dropped_mass: self.dropped_mass };
        for (m, c) in &self.terms {
            let v = f(m, c);
            if !v.is_zero() {
                p.terms.insert(m.clone(), v);
            }
        }
        p
    }

    /// Homogeneous component of degree `deg`.
    pub fn homogeneous(&self, deg: u32) -> Self {
        self.filter(|m, _| m.degree() == deg).with_ledger(0.0)
    }

    /// Terms with degree in `lo..=hi`.
    pub fn degree_range(&self, lo: u32, hi: u32) -> Self {
        self.filter(|m, _| m.degree() >= lo && m.degree() <= hi).with_ledger(0.0)
    }

    pub(crate) fn with_ledger(mut self, mass: f64) -> Self {
        self.dropped_mass = mass;
        self
    }

    /// Reset the drop ledger to zero.
    pub fn clear_ledger(&mut self) {
        self.dropped_mass = 0.0;
    }

    /// Impose (or tighten) a degree cap; removed mass goes to the ledger.
    pub fn truncate(&self, cap: u32) -> Self {
        let cap = merge_cap(self.cap, Some(cap));
        let mut p = Polynomial { dim: self.dim, terms: BTreeMap::new(), cap, dropped_mass: self.dropped_mass };
        for (m, c) in &self.terms {
            if cap.is_some_and(|k| m.degree() > k) {
                p.dropped_mass += c.magnitude();
            } else {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    /// Remove the cap without touching the terms.
    pub fn uncapped(&self) -> Self {
        let mut p = self.clone();
        p.cap = None;
        p
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let cap = merge_cap(self.cap, other.cap);
        let mut p = self.truncate(cap.unwrap_or(u32::MAX));
        p.dropped_mass += other.dropped_mass;
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone())?;
        }
        Ok(p)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|_, c| -c.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut p = self.map_coeffs(|_, c| c.clone() * s.clone());
        p.dropped_mass *= s.magnitude();
        p
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let cap = merge_cap(self.cap, other.cap);
        let mut acc = Accumulator::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                acc.push(ma.product(mb), ca.clone() * cb.clone());
            }
        }
        Ok(acc.finish(self.dim, cap, 0.0))
    }

    /// `{f, g} = i sum_m (df/d eta_m dg/d xi_m - df/d xi_m dg/d eta_m)`.
    ///
    /// With this sign `{omega.I, xi^k eta^l} = i omega.(k-l) xi^k eta^l`.
    pub fn poisson_bracket(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let cap = merge_cap(self.cap, other.cap);
        let mut acc = Accumulator::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                bracket_pair(ma, ca, mb, cb, &mut acc);
            }
        }
        Ok(acc.finish(self.dim, cap, 0.0))
    }

    /// Derivative with respect to `xi_mode` (or `eta_mode`).
    pub fn derivative(&self, mode: &ModeId, wrt_xi: bool) -> Self {
        let mut acc = Accumulator::new();
        for (m, c) in &self.terms {
            if let Some(idx) = m.factors().iter().position(|f| &f.mode == mode) {
                let f = &m.factors()[idx];
                let e = if wrt_xi { f.xi } else { f.eta };
                if e == 0 {
                    continue;
                }
                let lowered = if wrt_xi { m.lowered_at(idx, 1, 0) } else { m.lowered_at(idx, 0, 1) };
                acc.push(lowered, c.clone() * C::from_int(e as i64));
            }
        }
        acc.finish(self.dim, self.cap, 0.0)
    }

    /// Split into (terms with at most two tail factors, the rest), where a
    /// tail factor has |j| > n.
    pub fn tail_split(&self, n: u32) -> (Self, Self) {
        let low = self.filter(|m, _| m.tail_degree(n) <= 2);
        let high = self.filter(|m, _| m.tail_degree(n) > 2).with_ledger(0.0);
        (low, high)
    }

    /// Drop terms of nonzero momentum.
    pub fn momentum_filter(&self) -> Self {
        self.filter(|m, _| m.has_zero_momentum())
    }

    /// sum |c|
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).sum()
    }

    /// max |c|
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// `c_{conj m} = conj(c_m)` for every term, i.e. real on the real slice.
    pub fn reality_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| (self.coefficient(&m.conjugate()).conj() - c.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    /// Complex conjugation of the function on the real slice.
    pub fn conjugated(&self) -> Self {
        let mut p = Polynomial { dim: self.dim, terms: BTreeMap::new(), cap: self.cap, dropped_mass: self.dropped_mass };
        for (m, c) in &self.terms {
            p.terms.insert(m.conjugate(), c.conj());
        }
        p
    }

    /// Evaluate at a point given by `xi(mode)`, `eta(mode)`.
    pub fn evaluate_with<F>(&self, vars: F) -> C
    where
        F: Fn(&ModeId) -> (C, C),
    {
        let mut total = C::zero();
        let mut cache: BTreeMap<&ModeId, (C, C)> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for f in m.factors() {
                let (x, e) = cache.entry(&f.mode).or_insert_with(|| vars(&f.mode)).clone();
                for _ in 0..f.xi {
                    v = v * x.clone();
                }
                for _ in 0..f.eta {
                    v = v * e.clone();
                }
            }
            total = total + v;
        }
        total
    }
}

fn bracket_pair<C: Coeff>(ma: &Monomial, ca: &C, mb: &Monomial, cb: &C, acc: &mut Accumulator<C>) {
    let (fa, fb) = (ma.factors(), mb.factors());
    let (mut i, mut j) = (0, 0);
    let mut prod: Option<Monomial> = None;
    while i < fa.len() && j < fb.len() {
        match fa[i].mode.cmp(&fb[j].mode) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let w = fa[i].eta as i64 * fb[j].xi as i64 - fa[i].xi as i64 * fb[j].eta as i64;
                if w != 0 {
                    let p = prod.get_or_insert_with(|| ma.product(mb));
                    let idx = p
                        .factors()
                        .binary_search_by(|f| f.mode.cmp(&fa[i].mode))
                        .expect("mode present in product");
                    let m = p.lowered_at(idx, 1, 1);
                    acc.push(m, (ca.clone() * cb.clone() * C::from_int(w)).times_i());
                }
                i += 1;
                j += 1;
            }
        }
    }
}

impl Polynomial<Complex64> {
    /// Replace every coefficient by its modulus.
    pub fn modulus(&self) -> Self {
        self.map_coeffs(|_, c| Complex64::new(c.norm(), 0.0))
    }

    /// Make the polynomial exactly real by averaging each coefficient with
    /// the conjugate of its partner.
    pub fn realified(&self) -> Self {
        let mut acc = Accumulator::new();
        for (m, c) in &self.terms {
            acc.push(m.clone(), c * 0.5);
            acc.push(m.conjugate(), c.conj() * 0.5);
        }
        acc.finish(self.dim, self.cap, self.dropped_mass)
    }

    /// Exact copy with dyadic rational coefficients.
    pub fn to_exact(&self) -> Result<Polynomial<GaussianRational>, PolyError> {
        let mut p = Polynomial::<GaussianRational>::zero(self.dim);
        p.cap = self.cap;
        for (m, c) in &self.terms {
            let re = BigRational::from_float(c.re).ok_or_else(|| PolyError::NonFinite)?;
            let im = BigRational::from_float(c.im).ok_or_else(|| PolyError::NonFinite)?;
            p.terms.insert(m.clone(), GaussianRational::new(re, im));
        }
        Ok(p)
    }

    pub fn evaluate(&self, vars: &BTreeMap<ModeId, (Complex64, Complex64)>) -> Complex64 {
        let zero = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        self.evaluate_with(|m| *vars.get(m).unwrap_or(&zero))
    }
}

impl Polynomial<GaussianRational> {
    pub fn to_float(&self) -> Polynomial<Complex64> {
        let mut p = Polynomial::<Complex64>::zero(self.dim);
        p.cap = self.cap;
        p.dropped_mass = self.dropped_mass;
        for (m, c) in &self.terms {
            p.terms.insert(m.clone(), c.to_c64());
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(j: i32) -> Monomial {
        Monomial::xi(ModeId::scalar(j))
    }
    fn e(j: i32) -> Monomial {
        Monomial::eta(ModeId::scalar(j))
    }
    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn harmonic_bracket_rotates() {
        // {w xi_1 eta_1, xi_1} = i w xi_1
        let h = Polynomial::monomial(1, Monomial::action(ModeId::scalar(1)), c(2.5, 0.0)).unwrap();
        let f = Polynomial::monomial(1, x(1), c(1.0, 0.0)).unwrap();
        let b = h.poisson_bracket(&f).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b.coefficient(&x(1)) - c(0.0, 2.5)).norm() < 1e-15);
        // and the eta coordinate goes the other way
        let g = Polynomial::monomial(1, e(1), c(1.0, 0.0)).unwrap();
        let b = h.poisson_bracket(&g).unwrap();
        assert!((b.coefficient(&e(1)) - c(0.0, -2.5)).norm() < 1e-15);
    }

    #[test]
    fn canonical_pair() {
        // {eta_j, xi_j} = i
        let a = Polynomial::monomial(1, e(3), c(1.0, 0.0)).unwrap();
        let b = Polynomial::monomial(1, x(3), c(1.0, 0.0)).unwrap();
        assert_eq!(a.poisson_bracket(&b).unwrap().coefficient(&Monomial::one()), c(0.0, 1.0));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Polynomial::<Complex64>::zero(1);
        let b = Polynomial::<Complex64>::zero(2);
        assert!(matches!(a.add(&b), Err(PolyError::DimensionMismatch { .. })));
        assert!(a.poisson_bracket(&b).is_err());
        let mut p = Polynomial::<Complex64>::zero(2);
        assert!(p.add_term(x(1), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn cap_drops_and_logs_mass() {
        let mut a = Polynomial::zero_capped(1, 3);
        a.add_term(Monomial::action(ModeId::scalar(1)), c(1.0, 0.0)).unwrap();
        let b = Polynomial::from_terms(1, [(x(1).product(&x(2)), c(0.0, 2.0))]).unwrap();
        let p = a.multiply(&b).unwrap();
        assert!(p.is_zero());
        assert!((p.dropped_mass() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cancellation_is_pruned() {
        let a = Polynomial::from_terms(1, [(x(1), c(0.1, 0.0)), (x(2), c(1.0, 0.0))]).unwrap();
        let b = Polynomial::from_terms(1, [(x(1), c(0.1 + 1e-17, 0.0))]).unwrap();
        let d = a.sub(&b).unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn tail_split_counts_factors_beyond_n() {
        let m3 = Monomial::from_factors([(ModeId::scalar(5), 2, 1), (ModeId::scalar(1), 1, 0)]);
        let m2 = Monomial::from_factors([(ModeId::scalar(5), 1, 1), (ModeId::scalar(1), 1, 0)]);
        let p = Polynomial::from_terms(1, [(m3.clone(), c(1.0, 0.0)), (m2.clone(), c(1.0, 0.0))]).unwrap();
        let (low, high) = p.tail_split(4);
        assert_eq!(low.coefficient(&m2), c(1.0, 0.0));
        assert_eq!(high.coefficient(&m3), c(1.0, 0.0));
        assert_eq!(low.len() + high.len(), p.len());
    }

    #[test]
    fn derivative_and_evaluation() {
        let m = Monomial::from_factors([(ModeId::scalar(1), 2, 1)]);
        let p = Polynomial::monomial(1, m, c(3.0, 0.0)).unwrap();
        let d = p.derivative(&ModeId::scalar(1), true);
        assert_eq!(d.coefficient(&Monomial::from_factors([(ModeId::scalar(1), 1, 1)])), c(6.0, 0.0));
        let v = p.evaluate_with(|_| (c(2.0, 0.0), c(0.5, 0.0)));
        assert_eq!(v, c(6.0, 0.0));
    }

    #[test]
    fn realified_is_real() {
        let p = Polynomial::from_terms(1, [(x(1).product(&e(2)), c(1.0, 2.0))]).unwrap();
        assert!(p.reality_defect() > 0.1);
        assert!(p.realified().reality_defect() < 1e-15);
    }
}
