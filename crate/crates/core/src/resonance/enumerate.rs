//! Near-resonance enumeration by branch and bound.

use serde::Serialize;

use super::classify::Pattern;
use super::divisor::{compensated_dot, DivisorQuery};
use super::ResonanceError;
use crate::poly::ModeId;
use crate::spectra::FrequencyTable;

/// An integer vector k with |omega.k| at or below the query threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceHit {
    /// sorted by mode, no zero entries
    pub k: Vec<(ModeId, i64)>,
    /// signed omega.k
    pub value: f64,
    pub pattern: Pattern,
}

impl ResonanceHit {
    pub fn length(&self) -> i64 {
        self.k.iter().map(|(_, c)| c.abs()).sum()
    }

    pub fn tail_length(&self, n: u32) -> i64 {
        let n2 = (n as i64) * (n as i64);
        self.k.iter().filter(|(m, _)| m.norm_sq() > n2).map(|(_, c)| c.abs()).sum()
    }

    /// "j:k j:k ..." with lattice labels comma-joined.
    pub fn serialize_k(&self) -> String {
        self.k.iter().map(|(m, c)| format!("{m}:{c}")).collect::<Vec<_>>().join(" ")
    }

    pub fn negated(&self) -> Self {
        ResonanceHit { k: self.k.iter().map(|(m, c)| (m.clone(), -c)).collect(), value: -self.value, pattern: self.pattern }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    /// canonical order (lexicographic in the sparse vector)
    pub hits: Vec<ResonanceHit>,
    /// false when the node cap stopped the search early
    pub complete: bool,
    pub nodes: u64,
}

struct Slot {
    mode: ModeId,
    omega: f64,
    tail: bool,
}

fn slots(freqs: &FrequencyTable, q: &DivisorQuery) -> Vec<Slot> {
    let j2 = (q.jmax as i64) * (q.jmax as i64);
    let n2 = (q.n_cut as i64) * (q.n_cut as i64);
    let mut v: Vec<Slot> = freqs
        .iter()
        .filter(|(m, _)| m.norm_sq() <= j2)
        .map(|(m, w)| Slot { mode: m.clone(), omega: *w, tail: m.norm_sq() > n2 })
        .collect();
    v.sort_by(|a, b| b.omega.abs().total_cmp(&a.omega.abs()).then_with(|| a.mode.cmp(&b.mode)));
    v
}

struct Search<'a> {
    slots: &'a [Slot],
    thr: f64,
    slack: f64,
    cap: u64,
    nodes: u64,
    stack: Vec<(usize, i64)>,
    hits: Vec<ResonanceHit>,
    aborted: bool,
}

impl Search<'_> {
    fn record(&mut self) {
        let value = compensated_dot(self.stack.iter().map(|&(i, c)| (self.slots[i].omega, c)));
        if value.abs() <= self.thr {
            let mut k: Vec<(ModeId, i64)> = self.stack.iter().map(|&(i, c)| (self.slots[i].mode.clone(), c)).collect();
            k.sort();
            self.hits.push(ResonanceHit { k, value, pattern: Pattern::None });
        }
    }

    /// Extend the current vector with nonzero entries at slots >= start.
    fn go(&mut self, start: usize, sum: f64, budget: i64, tail_budget: i64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.cap {
            self.aborted = true;
            return;
        }
        if !self.stack.is_empty() {
            self.record();
        }
        if budget == 0 {
            return;
        }
        for i in start..self.slots.len() {
            let w = self.slots[i].omega;
            // slots are sorted by |omega|, so once even the full budget on
            // this slot cannot reach the window, no later slot can either
            if sum.abs() - budget as f64 * w.abs() > self.thr + self.slack {
                break;
            }
            let cap_here = if self.slots[i].tail { budget.min(tail_budget) } else { budget };
            for c in (-cap_here..=cap_here).filter(|&c| c != 0) {
                self.stack.push((i, c));
                let tb = if self.slots[i].tail { tail_budget - c.abs() } else { tail_budget };
                self.go(i + 1, sum + w * c as f64, budget - c.abs(), tb);
                self.stack.pop();
                if self.aborted {
                    return;
                }
            }
        }
    }
}

fn finish(mut hits: Vec<ResonanceHit>, complete: bool, nodes: u64) -> Enumeration {
    hits.sort_by(|a, b| a.k.cmp(&b.k));
    Enumeration { hits, complete, nodes }
}

/// All k with 0 < |k| <= r+2, at most two tail units (|j| > N), support in
/// |j| <= jmax and |omega.k| <= gamma/N^alpha.
pub fn enumerate_near_resonances(freqs: &FrequencyTable, q: &DivisorQuery) -> Result<Enumeration, ResonanceError> {
    q.validate()?;
    let slots = slots(freqs, q);
    let wmax = slots.first().map_or(0.0, |s| s.omega.abs());
    let mut s = Search {
        slots: &slots,
        thr: q.threshold(),
        slack: 1e-12 * (1.0 + wmax) * q.max_len() as f64,
        cap: q.node_cap,
        nodes: 0,
        stack: Vec::new(),
        hits: Vec::new(),
        aborted: false,
    };
    s.go(0, 0.0, q.max_len() as i64, 2);
    Ok(finish(s.hits, !s.aborted, s.nodes))
}

/// Reference enumeration without pruning; exponential, for small tables.
pub fn enumerate_exhaustive(freqs: &FrequencyTable, q: &DivisorQuery) -> Result<Enumeration, ResonanceError> {
    q.validate()?;
    let slots = slots(freqs, q);
    let thr = q.threshold();
    let mut hits = Vec::new();
    let mut k = vec![0i64; slots.len()];
    let mut nodes = 0u64;
    fn rec(i: usize, slots: &[Slot], k: &mut Vec<i64>, budget: i64, tail_budget: i64, thr: f64, hits: &mut Vec<ResonanceHit>, nodes: &mut u64) {
        *nodes += 1;
        if i == slots.len() {
            if k.iter().all(|&c| c == 0) {
                return;
            }
            let value = compensated_dot(slots.iter().zip(k.iter()).filter(|(_, &c)| c != 0).map(|(s, &c)| (s.omega, c)));
            if value.abs() <= thr {
                let mut kv: Vec<(ModeId, i64)> = slots.iter().zip(k.iter()).filter(|(_, &c)| c != 0).map(|(s, &c)| (s.mode.clone(), c)).collect();
                kv.sort();
                hits.push(ResonanceHit { k: kv, value, pattern: Pattern::None });
            }
            return;
        }
        let lim = if slots[i].tail { budget.min(tail_budget) } else { budget };
        for c in -lim..=lim {
            k[i] = c;
            let tb = if slots[i].tail { tail_budget - c.abs() } else { tail_budget };
            rec(i + 1, slots, k, budget - c.abs(), tb, thr, hits, nodes);
        }
        k[i] = 0;
    }
    rec(0, &slots, &mut k, q.max_len() as i64, 2, thr, &mut hits, &mut nodes);
    Ok(finish(hits, true, nodes))
}

/// Keep the hits whose divisor is within a smaller threshold.
pub fn filter_hits(hits: &[ResonanceHit], thr: f64) -> Vec<ResonanceHit> {
    hits.iter().filter(|h| h.value.abs() <= thr).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_spectrum_has_exact_resonance() {
        let t = FrequencyTable::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let q = DivisorQuery::new(1, 4, 0.01, 1.0, 4).unwrap();
        let e = enumerate_near_resonances(&t, &q).unwrap();
        assert!(e.complete);
        let want = vec![(ModeId::scalar(1), 1), (ModeId::scalar(2), 1), (ModeId::scalar(3), -1)];
        assert!(e.hits.iter().any(|h| h.k == want));
        assert!(e.hits.iter().all(|h| h.length() <= 3 && h.value == 0.0));
    }

    #[test]
    fn wild_frequencies_have_no_hits() {
        let w: Vec<f64> = (1..=5).map(|j| std::f64::consts::PI.powi(j)).collect();
        let t = FrequencyTable::from_values(&w).unwrap();
        let q = DivisorQuery::new(2, 5, 1e-3, 1.0, 5).unwrap();
        assert!(enumerate_near_resonances(&t, &q).unwrap().hits.is_empty());
        assert!(enumerate_exhaustive(&t, &q).unwrap().hits.is_empty());
    }

    #[test]
    fn node_cap_flags_incomplete() {
        let t = FrequencyTable::from_values(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let mut q = DivisorQuery::new(3, 6, 0.5, 1.0, 6).unwrap();
        q.node_cap = 10;
        let e = enumerate_near_resonances(&t, &q).unwrap();
        assert!(!e.complete);
    }

    #[test]
    fn tail_budget_respected() {
        let t = FrequencyTable::from_values(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let q = DivisorQuery::new(3, 2, 1.0, 1.0, 6).unwrap();
        let e = enumerate_near_resonances(&t, &q).unwrap();
        assert!(!e.hits.is_empty());
        assert!(e.hits.iter().all(|h| h.tail_length(2) <= 2 && h.length() <= 5));
    }
}
