//! Monomials in the complex Birkhoff variables.

use smallvec::SmallVec;
use std::cmp::Ordering;
use std::fmt;

use super::mode::ModeId;
use super::PolyError;

/// Exponents of `xi_j` and `eta_j` for one mode.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Factor {
    pub mode: ModeId,
    pub xi: u32,
    pub eta: u32,
}

/// `prod_j xi_j^{k_j} eta_j^{l_j}` stored sparsely, sorted by mode, no zero
/// factors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    factors: SmallVec<[Factor; 4]>,
    degree: u32,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: SmallVec::new(), degree: 0 }
    }

    /// Build from arbitrary (mode, k, l) triples; repeated modes are merged.
    pub fn from_factors<I>(it: I) -> Self
    where
        I: IntoIterator<Item = (ModeId, u32, u32)>,
    {
        let mut v: SmallVec<[Factor; 4]> = SmallVec::new();
        for (mode, xi, eta) in it {
            v.push(Factor { mode, xi, eta });
        }
        v.sort_by(|a, b| a.mode.cmp(&b.mode));
        let mut out: SmallVec<[Factor; 4]> = SmallVec::new();
        for f in v {
            match out.last_mut() {
                Some(last) if last.mode == f.mode => {
                    last.xi += f.xi;
                    last.eta += f.eta;
                }
                _ => out.push(f),
            }
        }
        out.retain(|f| f.xi + f.eta > 0);
        let degree = out.iter().map(|f| f.xi + f.eta).sum();
        Monomial { factors: out, degree }
    }

    pub fn xi(mode: ModeId) -> Self {
        Self::from_factors([(mode, 1, 0)])
    }

    pub fn eta(mode: ModeId) -> Self {
        Self::from_factors([(mode, 0, 1)])
    }

    /// The action `xi_j eta_j`.
    pub fn action(mode: ModeId) -> Self {
        Self::from_factors([(mode, 1, 1)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    /// Dimension of the mode labels, None for the constant monomial.
    pub fn dim(&self) -> Option<usize> {
        self.factors.first().map(|f| f.mode.dim())
    }

    pub fn exponents(&self, mode: &ModeId) -> (u32, u32) {
        match self.factors.binary_search_by(|f| f.mode.cmp(mode)) {
            Ok(i) => (self.factors[i].xi, self.factors[i].eta),
            Err(_) => (0, 0),
        }
    }

    /// Number of factors with |j| > n.
    pub fn tail_degree(&self, n: u32) -> u32 {
        let n2 = (n as i64) * (n as i64);
        self.factors
            .iter()
            .filter(|f| f.mode.norm_sq() > n2)
            .map(|f| f.xi + f.eta)
            .sum()
    }

    /// `sum_j j (k_j - l_j)`
    pub fn momentum(&self) -> SmallVec<[i64; 2]> {
        let d = self.dim().unwrap_or(1);
        let mut p: SmallVec<[i64; 2]> = SmallVec::from_elem(0, d);
        for f in &self.factors {
            let w = f.xi as i64 - f.eta as i64;
            for (pc, &c) in p.iter_mut().zip(f.mode.coords()) {
                *pc += w * c as i64;
            }
        }
        p
    }

    pub fn has_zero_momentum(&self) -> bool {
        self.momentum().iter().all(|&c| c == 0)
    }

    /// True when `k = l`, i.e. a function of the actions alone.
    pub fn is_action_only(&self) -> bool {
        self.factors.iter().all(|f| f.xi == f.eta)
    }

    /// Swap the roles of `xi` and `eta`.
    pub fn conjugate(&self) -> Self {
        Monomial {
            factors: self
                .factors
                .iter()
                .map(|f| Factor { mode: f.mode.clone(), xi: f.eta, eta: f.xi })
                .collect(),
            degree: self.degree,
        }
    }

    /// The integer vector k - l, sparse.
    pub fn k_minus_l(&self) -> Vec<(ModeId, i64)> {
        self.factors
            .iter()
            .filter(|f| f.xi != f.eta)
            .map(|f| (f.mode.clone(), f.xi as i64 - f.eta as i64))
            .collect()
    }

    pub fn product(&self, other: &Monomial) -> Monomial {
        let mut out: SmallVec<[Factor; 4]> = SmallVec::with_capacity(self.factors.len() + other.factors.len());
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].mode < b[j].mode) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].mode < a[i].mode {
                out.push(b[j].clone());
                j += 1;
            } else {
                out.push(Factor { mode: a[i].mode.clone(), xi: a[i].xi + b[j].xi, eta: a[i].eta + b[j].eta });
                i += 1;
                j += 1;
            }
        }
        Monomial { factors: out, degree: self.degree + other.degree }
    }

    /// Lower the exponents at factor position `idx` by (dxi, deta).
    /// Caller guarantees the exponents are large enough.
    pub(crate) fn lowered_at(&self, idx: usize, dxi: u32, deta: u32) -> Monomial {
        let mut factors = self.factors.clone();
        factors[idx].xi -= dxi;
        factors[idx].eta -= deta;
        if factors[idx].xi + factors[idx].eta == 0 {
            factors.remove(idx);
        }
        Monomial { factors, degree: self.degree - dxi - deta }
    }

    /// Variables with multiplicity: (mode, is_xi).
    pub fn variables(&self) -> Vec<(ModeId, bool)> {
        let mut v = Vec::with_capacity(self.degree as usize);
        for f in &self.factors {
            for _ in 0..f.xi {
                v.push((f.mode.clone(), true));
            }
            for _ in 0..f.eta {
                v.push((f.mode.clone(), false));
            }
        }
        v
    }

    /// "| j:k j:k | j:l j:l" part of the text format.
    pub fn to_text(&self) -> String {
        let xs: Vec<String> = self.factors.iter().filter(|f| f.xi > 0).map(|f| format!("{}:{}", f.mode, f.xi)).collect();
        let es: Vec<String> = self.factors.iter().filter(|f| f.eta > 0).map(|f| format!("{}:{}", f.mode, f.eta)).collect();
        format!("| {} | {}", xs.join(" "), es.join(" "))
    }

    /// Inverse of the two exponent sections of `to_text`.
    pub fn parse_sections(xi: &str, eta: &str) -> Result<Monomial, PolyError> {
        let mut triples = Vec::new();
        for (sec, is_xi) in [(xi, true), (eta, false)] {
            for tok in sec.split_whitespace() {
                let (m, e) = tok
                    .rsplit_once(':')
                    .ok_or_else(|| PolyError::Parse(format!("bad factor `{tok}`")))?;
                let mode = ModeId::parse(m)?;
                let e: u32 = e.parse().map_err(|_| PolyError::Parse(format!("bad exponent `{tok}`")))?;
                triples.push(if is_xi { (mode, e, 0) } else { (mode, 0, e) });
            }
        }
        Ok(Monomial::from_factors(triples))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for fac in &self.factors {
            for (e, name) in [(fac.xi, "xi"), (fac.eta, "eta")] {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{name}[{}]", fac.mode)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
