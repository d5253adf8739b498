//! Mode labels, index domains and Sobolev-type weights.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;

use super::PolyError;

/// A Fourier/eigen-mode label: a scalar index in one dimension, a lattice
/// point in higher dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeId(SmallVec<[i32; 2]>);

impl ModeId {
    pub fn new(coords: &[i32]) -> Self {
        ModeId(SmallVec::from_slice(coords))
    }

    /// One-dimensional label.
    pub fn scalar(j: i32) -> Self {
        ModeId(SmallVec::from_slice(&[j]))
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|&c| (c as i64) * (c as i64)).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn negated(&self) -> Self {
        ModeId(self.0.iter().map(|c| -c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// First coordinate; the label itself in one dimension.
    pub fn first(&self) -> i32 {
        self.0[0]
    }

    /// Parse the textual form written by `Display` ("3", "-2", "1,0").
    pub fn parse(s: &str) -> Result<Self, PolyError> {
        let coords: Result<SmallVec<[i32; 2]>, _> =
            s.trim().split(',').map(|t| t.trim().parse::<i32>()).collect();
        match coords {
            Ok(c) if !c.is_empty() => Ok(ModeId(c)),
            _ => Err(PolyError::Parse(format!("bad mode label `{s}`"))),
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Which labels a model uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexDomain {
    /// j = 1, 2, ... (Dirichlet problems)
    Positive,
    /// j in Z minus {0} (coupled systems)
    NonzeroInteger,
    /// j in Z (periodic problems)
    Integer,
    /// k in Z^d
    Lattice(usize),
}

impl IndexDomain {
    pub fn dim(&self) -> usize {
        match self {
            IndexDomain::Lattice(d) => *d,
            _ => 1,
        }
    }

    pub fn contains(&self, m: &ModeId) -> bool {
        if m.dim() != self.dim() {
            return false;
        }
        match self {
            IndexDomain::Positive => m.first() >= 1,
            IndexDomain::NonzeroInteger => m.first() != 0,
            IndexDomain::Integer | IndexDomain::Lattice(_) => true,
        }
    }

    /// All labels with |j| <= jmax, in canonical order.
    pub fn modes_up_to(&self, jmax: u32) -> Vec<ModeId> {
        let j = jmax as i32;
        match self {
            IndexDomain::Positive => (1..=j).map(ModeId::scalar).collect(),
            IndexDomain::NonzeroInteger => (-j..=j).filter(|&i| i != 0).map(ModeId::scalar).collect(),
            IndexDomain::Integer => (-j..=j).map(ModeId::scalar).collect(),
            IndexDomain::Lattice(d) => {
                let mut out = Vec::new();
                let mut cur = vec![-j; *d];
                loop {
                    let m = ModeId::new(&cur);
                    if m.norm_sq() <= (j as i64) * (j as i64) {
                        out.push(m);
                    }
                    let mut k = 0;
                    loop {
                        if k == *d {
                            return out;
                        }
                        cur[k] += 1;
                        if cur[k] <= j {
                            break;
                        }
                        cur[k] = -j;
                        k += 1;
                    }
                }
            }
        }
    }
}

/// Mode weights entering the s-norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WeightScheme {
    /// (1 + |j|)^{2s}; well defined at j = 0.
    #[default]
    Shifted,
    /// max(|j|, 1)^{2s}
    Plain,
}

impl WeightScheme {
    pub fn weight(&self, m: &ModeId, s: f64) -> f64 {
        self.base(m).powf(2.0 * s)
    }

    /// The quantity raised to the power 2s.
    pub fn base(&self, m: &ModeId) -> f64 {
        match self {
            WeightScheme::Shifted => 1.0 + m.norm(),
            WeightScheme::Plain => m.norm().max(1.0),
        }
    }
}

/// (1 + |j|)^{2s}
pub fn weight(m: &ModeId, s: f64) -> f64 {
    WeightScheme::Shifted.weight(m, s)
}
