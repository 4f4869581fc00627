//! Weighted communication cycles.
//!
//! A cycle on `n` vertices carries one positive conductance per edge; edge
//! `i` joins `v_i` and `v_{i+1 mod n}`. Everything on a cycle reduces to
//! prefix sums of the edge resistances `r_i = 1/c_i`: the directed arc
//! resistance `d(a, b)`, the pairwise effective resistance (two arcs in
//! parallel), the Kirchhoff index, and the cumulative-resistance discrepancy
//! that measures how far the resistance arclength is from uniform spacing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest cycle that admits a chord.
pub const MIN_VERTICES: usize = 4;

/// Unordered vertex pair stored as `(min, max)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Chord {
    pub p: usize,
    pub q: usize,
}

impl Chord {
    /// Canonical pair from two distinct vertices in either order.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::input(format!("chord endpoints must differ (got {a},{a})")));
        }
        Ok(Chord { p: a.min(b), q: a.max(b) })
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

/// Ring graph with strictly positive, finite edge conductances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CycleJson", into = "CycleJson")]
pub struct WeightedCycle {
    conductances: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CycleJson {
    n: usize,
    conductances: Vec<f64>,
}

impl TryFrom<CycleJson> for WeightedCycle {
    type Error = Error;

    fn try_from(raw: CycleJson) -> Result<Self> {
        if raw.n != raw.conductances.len() {
            return Err(Error::input(format!("n = {} but {} conductances were given", raw.n, raw.conductances.len())));
        }
        WeightedCycle::new(raw.conductances)
    }
}

impl From<WeightedCycle> for CycleJson {
    fn from(c: WeightedCycle) -> Self {
        CycleJson { n: c.conductances.len(), conductances: c.conductances }
    }
}

impl WeightedCycle {
    pub fn new(conductances: Vec<f64>) -> Result<Self> {
        if conductances.len() < MIN_VERTICES {
            return Err(Error::input(format!(
                "a weighted cycle needs at least {MIN_VERTICES} vertices, got {}",
                conductances.len()
            )));
        }
        if let Some((i, c)) = conductances.iter().enumerate().find(|(_, c)| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::input(format!("conductance c_{i} = {c} is not positive and finite")));
        }
        Ok(WeightedCycle { conductances })
    }

    /// Cycle with every conductance equal to `c`.
    pub fn uniform(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    /// Cycle with the given edge resistances.
    pub fn from_resistances(resistances: &[f64]) -> Result<Self> {
        Self::new(resistances.iter().map(|r| 1.0 / r).collect())
    }

    pub fn n(&self) -> usize {
        self.conductances.len()
    }

    pub fn conductances(&self) -> &[f64] {
        &self.conductances
    }

    pub fn max_conductance(&self) -> f64 {
        self.conductances.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn resistance_profile(&self) -> ResistanceProfile {
        ResistanceProfile::new(self)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(Error::input(format!("vertex {v} out of range for n = {}", self.n())));
        }
        Ok(())
    }

    /// Number of edges on the shorter way around between `a` and `b`.
    pub fn hop_distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        d.min(self.n() - d)
    }

    pub fn is_admissible(&self, chord: Chord) -> bool {
        chord.q < self.n() && chord.p < chord.q && self.hop_distance(chord.p, chord.q) >= 2
    }

    pub fn check_admissible(&self, chord: Chord) -> Result<()> {
        self.check_vertex(chord.q)?;
        if !self.is_admissible(chord) {
            return Err(Error::input(format!(
                "chord {{{chord}}} is not admissible on a cycle of {} vertices (endpoints adjacent)",
                self.n()
            )));
        }
        Ok(())
    }

    /// Directed arc resistance `d(a, b)`: resistance met walking forward
    /// from `a` to `b`.
    pub fn arc_resistance(&self, a: usize, b: usize) -> Result<f64> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        Ok(self.resistance_profile().arc(a, b))
    }

    /// Effective resistance between two distinct vertices.
    pub fn pair_resistance(&self, a: usize, b: usize) -> Result<f64> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(Error::input(format!("pair resistance needs distinct vertices (got {a},{a})")));
        }
        Ok(self.resistance_profile().pair(a, b))
    }

    /// Kirchhoff index from arc resistances, `(1/S) Σ_{u<v} d(u,v)(S - d(u,v))`.
    pub fn kirchhoff_index(&self) -> f64 {
        let prof = self.resistance_profile();
        let n = self.n();
        let total = prof.total;
        let mut acc = 0.0;
        for u in 0..n {
            let mut row = 0.0;
            for v in u + 1..n {
                let d = prof.prefix[v] - prof.prefix[u];
                row += d * (total - d);
            }
            acc += row;
        }
        acc / total
    }

    pub fn discrepancy(&self) -> DiscrepancyReport {
        DiscrepancyReport::new(&self.resistance_profile())
    }

    pub fn admissible_chords(&self) -> Vec<Chord> {
        admissible_chords(self.n())
    }
}

/// All nonadjacent unordered pairs of an `n`-cycle in lexicographic order.
///
/// Empty when `n < 4`; otherwise there are `n(n-3)/2` of them.
pub fn admissible_chords(n: usize) -> Vec<Chord> {
    if n < MIN_VERTICES {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n * (n - 3) / 2);
    for p in 0..n {
        // q = p+1 is adjacent; for p = 0 the pair (0, n-1) is adjacent too.
        let last = if p == 0 { n - 2 } else { n - 1 };
        for q in p + 2..=last {
            out.push(Chord { p, q });
        }
    }
    out
}

/// Resistances and cumulative resistance arclength of a cycle.
#[derive(Clone, Debug)]
pub struct ResistanceProfile {
    /// `r_i = 1/c_i`.
    pub resistances: Vec<f64>,
    /// `s_0 = 0`, `s_i = Σ_{k<i} r_k`, length `n + 1` with `s_n = S`.
    pub prefix: Vec<f64>,
    /// Total resistance `S`.
    pub total: f64,
    pub r_max: f64,
    pub r_mean: f64,
}

impl ResistanceProfile {
    pub fn new(cycle: &WeightedCycle) -> Self {
        let resistances: Vec<f64> = cycle.conductances().iter().map(|c| 1.0 / c).collect();
        let mut prefix = Vec::with_capacity(resistances.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for r in &resistances {
            acc += r;
            prefix.push(acc);
        }
        let total = acc;
        let r_max = resistances.iter().copied().fold(0.0, f64::max);
        let r_mean = total / resistances.len() as f64;
        ResistanceProfile { resistances, prefix, total, r_max, r_mean }
    }

    pub fn n(&self) -> usize {
        self.resistances.len()
    }

    /// Prefix sums over the cycle unrolled twice: `s̃_0 = 0`,
    /// `s̃_{k+1} = s̃_k + r_{k mod n}` for `k < 2n`.
    pub fn lifted_prefix(&self) -> Vec<f64> {
        let n = self.n();
        let mut lifted = Vec::with_capacity(2 * n + 1);
        lifted.push(0.0);
        let mut acc = 0.0;
        for k in 0..2 * n {
            acc += self.resistances[k % n];
            lifted.push(acc);
        }
        lifted
    }

    /// `d(a, b)`; indices are assumed valid.
    pub fn arc(&self, a: usize, b: usize) -> f64 {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Less => self.prefix[b] - self.prefix[a],
            Equal => 0.0,
            Greater => (self.total - self.prefix[a]) + self.prefix[b],
        }
    }

    /// `d(a,b) d(b,a) / S`; indices are assumed valid and distinct.
    pub fn pair(&self, a: usize, b: usize) -> f64 {
        self.arc(a, b) * self.arc(b, a) / self.total
    }

    /// Resistance distance along the cycle, `min(|s_p - s_q|, S - |s_p - s_q|)`.
    pub fn cycle_distance(&self, a: usize, b: usize) -> f64 {
        let d = (self.prefix[a] - self.prefix[b]).abs();
        d.min(self.total - d)
    }
}

/// How unevenly resistance is spread around the cycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    /// `max_{p, ℓ} |A_{p,ℓ} - ℓS/n|` over all cyclic windows.
    pub max_deviation: f64,
    /// `max_deviation / S`.
    pub relative_deviation: f64,
    /// `r_max / S`.
    pub eta: f64,
    /// `relative_deviation + eta`.
    pub delta_n: f64,
}

impl DiscrepancyReport {
    /// Double loop over every start vertex and window length.
    pub fn new(prof: &ResistanceProfile) -> Self {
        let n = prof.n();
        let lifted = prof.lifted_prefix();
        let step = prof.total / n as f64;
        let mut max_deviation: f64 = 0.0;
        for p in 0..n {
            let base = lifted[p];
            for len in 1..=n {
                let window = lifted[p + len] - base;
                max_deviation = max_deviation.max((window - len as f64 * step).abs());
            }
        }
        let relative_deviation = max_deviation / prof.total;
        let eta = prof.r_max / prof.total;
        DiscrepancyReport { max_deviation, relative_deviation, eta, delta_n: relative_deviation + eta }
    }
}
