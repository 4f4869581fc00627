//! Resistance-balanced candidate screening and baseline chord selectors.
//!
//! Screening needs no eigenvectors: for each vertex `i` it walks the cycle's
//! resistance arclength to the point half the total resistance away, keeps
//! the straddling vertex and its two neighbours (RBAPS), and with a
//! tolerance `τ > 0` also every vertex whose arc from `i` is within `τS/2`
//! of `S/2` (AW-RBAPS).

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cycle::{admissible_chords, Chord, WeightedCycle};
use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;

/// AW-RBAPS default window tolerance.
pub const DEFAULT_TAU: f64 = 0.1;
/// Default number of low-frequency modes used to rank candidates.
pub const DEFAULT_MODES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenConfig {
    pub tau: f64,
    pub m: usize,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        ScreenConfig { tau: DEFAULT_TAU, m: DEFAULT_MODES }
    }
}

impl ScreenConfig {
    pub fn new(tau: f64, m: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&tau) {
            return Err(Error::input(format!("tau must lie in [0, 1), got {tau}")));
        }
        if m == 0 {
            return Err(Error::input("mode count m must be at least 1"));
        }
        Ok(ScreenConfig { tau, m })
    }
}

/// Where a candidate set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum CandidateSource {
    Rbaps,
    AwRbaps,
    Full,
    Fiedler,
    Random,
}

/// Deduplicated, lexicographically ordered admissible pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    pub pairs: BTreeSet<Chord>,
    pub source: CandidateSource,
}

impl CandidateSet {
    pub fn full(cycle: &WeightedCycle) -> Self {
        CandidateSet { pairs: admissible_chords(cycle.n()).into_iter().collect(), source: CandidateSource::Full }
    }

    pub fn single(chord: Chord, source: CandidateSource) -> Self {
        CandidateSet { pairs: BTreeSet::from([chord]), source }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, chord: &Chord) -> bool {
        self.pairs.contains(chord)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Chord> {
        self.pairs.iter()
    }
}

/// RBAPS (`tau = 0`) or AW-RBAPS (`tau > 0`) candidate set.
pub fn screen(cycle: &WeightedCycle, tau: f64) -> Result<CandidateSet> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::input(format!("tau must be finite and nonnegative, got {tau}")));
    }
    let n = cycle.n();
    let prof = cycle.resistance_profile();
    let lifted = prof.lifted_prefix();
    let total = lifted[n];
    let mut pairs = BTreeSet::new();
    let mut add = |i: usize, k: usize| {
        let v = k % n;
        if cycle.hop_distance(i, v) >= 2 {
            pairs.insert(Chord { p: i.min(v), q: i.max(v) });
        }
    };
    let in_window = |i: usize, k: usize| (2.0 * (lifted[k] - lifted[i]) - total).abs() <= tau * total;

    for i in 0..n {
        let target = lifted[i] + 0.5 * total;
        // First lifted index in i+1..=i+n with s̃_k >= target; s̃_{i+n} = s̃_i + S always qualifies.
        let j = i + 1 + lifted[i + 1..=i + n].partition_point(|&s| s < target);
        let (first, last) = (i + 1, i + n - 1);
        for seed in [j.wrapping_sub(1), j, j + 1] {
            if seed < first || seed > last {
                continue;
            }
            add(i, seed);
            if tau > 0.0 {
                let mut k = seed;
                while k > first && in_window(i, k - 1) {
                    k -= 1;
                    add(i, k);
                }
                let mut k = seed;
                while k < last && in_window(i, k + 1) {
                    k += 1;
                    add(i, k);
                }
            }
        }
    }
    let source = if tau > 0.0 { CandidateSource::AwRbaps } else { CandidateSource::Rbaps };
    Ok(CandidateSet { pairs, source })
}

/// Max–min endpoints of the Fiedler vector, or the admissible pair with the
/// largest squared Fiedler gap when those endpoints are adjacent.
pub fn fiedler_baseline(spec: &SpectralDecomposition, cycle: &WeightedCycle) -> Result<Chord> {
    if spec.n() != cycle.n() {
        return Err(Error::input(format!("cycle has {} vertices, spectrum has {}", cycle.n(), spec.n())));
    }
    let u = spec.fiedler_vector();
    let (mut lo, mut hi) = (0, 0);
    for (i, &x) in u.iter().enumerate() {
        if x < u[lo] {
            lo = i;
        }
        if x > u[hi] {
            hi = i;
        }
    }
    if lo != hi {
        let chord = Chord::new(lo, hi)?;
        if cycle.is_admissible(chord) {
            return Ok(chord);
        }
    }
    let gap = |c: &Chord| {
        let d = u[c.p] - u[c.q];
        d * d
    };
    admissible_chords(cycle.n())
        .into_iter()
        .fold(None, |best: Option<(Chord, f64)>, c| {
            let g = gap(&c);
            match best {
                Some((_, bg)) if bg >= g => best,
                _ => Some((c, g)),
            }
        })
        .map(|(c, _)| c)
        .ok_or_else(|| Error::input("cycle has no admissible chord"))
}

/// A uniformly random admissible chord.
pub fn random_baseline<R: Rng + ?Sized>(cycle: &WeightedCycle, rng: &mut R) -> Chord {
    let n = cycle.n();
    // Rank-select into the lexicographic enumeration without materialising it.
    let mut idx = rng.random_range(0..n * (n - 3) / 2);
    for p in 0..n {
        let last = if p == 0 { n - 2 } else { n - 1 };
        let row = (last + 1).saturating_sub(p + 2);
        if idx < row {
            return Chord { p, q: p + 2 + idx };
        }
        idx -= row;
    }
    unreachable!("index within n(n-3)/2 always maps to a pair")
}

/// Maximiser of `score` over the candidates; the lexicographically smallest
/// pair wins ties.
pub fn select_best<F>(candidates: &CandidateSet, mut score: F) -> Result<Chord>
where
    F: FnMut(Chord) -> Result<f64>,
{
    let mut best: Option<(Chord, f64)> = None;
    for &c in candidates.iter() {
        let s = score(c)?;
        if best.is_none_or(|(_, bs)| s > bs) {
            best = Some((c, s));
        }
    }
    best.map(|(c, _)| c).ok_or_else(|| Error::input("cannot select from an empty candidate set"))
}
