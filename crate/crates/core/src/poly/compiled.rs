//! Flat evaluators for repeated evaluation of a fixed polynomial and its
//! gradient at many points.

use num_complex::Complex64;
use smallvec::SmallVec;
use std::collections::HashMap;

use super::mode::ModeId;
use super::polynomial::Polynomial;
use super::PolyError;

/// Dense numbering of a mode set. Slot `i` holds `xi` at `2i` and `eta` at
/// `2i + 1` in compiled terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeIndex {
    modes: Vec<ModeId>,
    pos: HashMap<ModeId, usize>,
}

impl ModeIndex {
    pub fn new(mut modes: Vec<ModeId>) -> Self {
        modes.sort();
        modes.dedup();
        let pos = modes.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        ModeIndex { modes, pos }
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn position(&self, m: &ModeId) -> Option<usize> {
        self.pos.get(m).copied()
    }
}

#[derive(Clone, Debug)]
struct Term {
    coeff: Complex64,
    /// (variable slot, exponent)
    vars: SmallVec<[(u32, u32); 6]>,
}

#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    n: usize,
    terms: Vec<Term>,
}

impl CompiledPolynomial {
    /// Fails if `f` mentions a mode outside `index`.
    pub fn new(f: &Polynomial, index: &ModeIndex) -> Result<Self, PolyError> {
        let mut terms = Vec::with_capacity(f.len());
        for (m, c) in f.terms() {
            let mut vars = SmallVec::new();
            for fac in m.factors() {
                let i = index
                    .position(&fac.mode)
                    .ok_or_else(|| PolyError::InvalidArgument(format!("mode {} not in index", fac.mode)))?;
                if fac.xi > 0 {
                    vars.push((2 * i as u32, fac.xi));
                }
                if fac.eta > 0 {
                    vars.push((2 * i as u32 + 1, fac.eta));
                }
            }
            terms.push(Term { coeff: *c, vars });
        }
        Ok(CompiledPolynomial { n: index.len(), terms })
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    fn var(xi: &[Complex64], eta: &[Complex64], v: u32) -> Complex64 {
        let i = (v / 2) as usize;
        if v % 2 == 0 {
            xi[i]
        } else {
            eta[i]
        }
    }

    pub fn value(&self, xi: &[Complex64], eta: &[Complex64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let mut v = t.coeff;
            for &(var, e) in &t.vars {
                v *= Self::var(xi, eta, var).powu(e);
            }
            total += v;
        }
        total
    }

    /// Overwrite `dxi[i] = df/dxi_i` and `deta[i] = df/deta_i`.
    pub fn gradient(&self, xi: &[Complex64], eta: &[Complex64], dxi: &mut [Complex64], deta: &mut [Complex64]) {
        let zero = Complex64::new(0.0, 0.0);
        dxi.iter_mut().for_each(|x| *x = zero);
        deta.iter_mut().for_each(|x| *x = zero);
        let mut pw: SmallVec<[Complex64; 6]> = SmallVec::new();
        let mut prefix: SmallVec<[Complex64; 7]> = SmallVec::new();
        for t in &self.terms {
            pw.clear();
            prefix.clear();
            prefix.push(t.coeff);
            for &(var, e) in &t.vars {
                let p = Self::var(xi, eta, var).powu(e);
                pw.push(p);
                let last = *prefix.last().unwrap();
                prefix.push(last * p);
            }
            let mut suffix = Complex64::new(1.0, 0.0);
            for k in (0..t.vars.len()).rev() {
                let (var, e) = t.vars[k];
                let x = Self::var(xi, eta, var);
                let d = prefix[k] * suffix * x.powu(e - 1) * e as f64;
                let i = (var / 2) as usize;
                if var % 2 == 0 {
                    dxi[i] += d;
                } else {
                    deta[i] += d;
                }
                suffix *= pw[k];
            }
        }
    }
}
