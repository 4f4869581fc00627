//! Two-objective chord evaluation and Pareto-front metrics.
//!
//! Each chord is scored by its Kirchhoff-index improvement `I` and its
//! algebraic-connectivity gain `Δ` at the saturated budget. Coordinates are
//! normalised by the exhaustive single-objective optima so fronts from
//! different candidate sets are comparable.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::chord::{kirchhoff_improvement, ChordCandidate};
use crate::cycle::Chord;
use crate::error::{Error, Result};
use crate::screening::CandidateSet;
use crate::spectral::SpectralDecomposition;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub chord: Chord,
    pub raw_i: f64,
    pub raw_d: f64,
    pub norm_i: f64,
    pub norm_d: f64,
}

impl ObjectivePoint {
    /// Weak-and-strict dominance on the raw objectives.
    pub fn dominates(&self, other: &ObjectivePoint) -> bool {
        self.raw_i >= other.raw_i && self.raw_d >= other.raw_d && (self.raw_i > other.raw_i || self.raw_d > other.raw_d)
    }
}

/// Exhaustive single-objective optima `I*` and `Δ*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizers {
    pub i_star: f64,
    pub d_star: f64,
}

impl Normalizers {
    pub fn from_points(points: &[ObjectivePoint]) -> Self {
        let i_star = points.iter().map(|p| p.raw_i).fold(0.0, f64::max);
        let d_star = points.iter().map(|p| p.raw_d).fold(0.0, f64::max);
        Normalizers { i_star, d_star }
    }

    /// Both optima positive, so normalised coordinates, knee and hypervolume
    /// are meaningful.
    pub fn is_valid(&self) -> bool {
        self.i_star > 0.0 && self.d_star > 0.0
    }

    /// Divides by each positive optimum; a zero optimum leaves that axis raw.
    pub fn apply(&self, points: &mut [ObjectivePoint]) {
        for pt in points {
            pt.norm_i = if self.i_star > 0.0 { pt.raw_i / self.i_star } else { pt.raw_i };
            pt.norm_d = if self.d_star > 0.0 { pt.raw_d / self.d_star } else { pt.raw_d };
        }
    }
}

/// Raw objectives for each candidate at chord conductance `w`; the
/// normalised fields are copies of the raw ones until [`Normalizers::apply`].
pub fn evaluate_objectives<'a>(
    spec: &SpectralDecomposition,
    candidates: impl IntoIterator<Item = &'a Chord>,
    w: f64,
) -> Result<Vec<ObjectivePoint>> {
    candidates
        .into_iter()
        .map(|&chord| {
            let cand = ChordCandidate::new(chord, w)?;
            let raw_d = spec.exact_gain(chord, w)?;
            let raw_i = kirchhoff_improvement(spec, &cand)?;
            Ok(ObjectivePoint { chord, raw_i, raw_d, norm_i: raw_i, norm_d: raw_d })
        })
        .collect()
}

/// Nondominated points in descending `Δ` order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub efficient: Vec<ObjectivePoint>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.efficient.len()
    }

    pub fn is_empty(&self) -> bool {
        self.efficient.is_empty()
    }

    pub fn chords(&self) -> BTreeSet<Chord> {
        self.efficient.iter().map(|p| p.chord).collect()
    }

    /// Area dominated by the normalised front with reference point `(0, 0)`.
    pub fn hypervolume(&self) -> f64 {
        let mut pts: Vec<(f64, f64)> = self.efficient.iter().map(|p| (p.norm_i, p.norm_d)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        let mut area = 0.0;
        let mut prev_i = 0.0;
        for (i, d) in pts {
            if i > prev_i {
                area += (i - prev_i) * d.max(0.0);
                prev_i = i;
            }
        }
        area
    }
}

/// Record scan: sort by `Δ` descending (ties by `I` descending) and keep
/// each point that sets a new maximum of `I`.
pub fn extract_front(points: &[ObjectivePoint]) -> Result<ParetoFront> {
    if points.is_empty() {
        return Err(Error::input("cannot extract a Pareto front from no points"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| b.raw_d.total_cmp(&a.raw_d).then(b.raw_i.total_cmp(&a.raw_i)).then(a.chord.cmp(&b.chord)));
    let mut efficient: Vec<ObjectivePoint> = Vec::new();
    for pt in sorted {
        match efficient.last() {
            None => efficient.push(pt),
            Some(last) if pt.raw_i > last.raw_i => efficient.push(pt),
            // Exact objective duplicates of a record point are not dominated either.
            Some(last) if pt.raw_i == last.raw_i && pt.raw_d == last.raw_d => efficient.push(pt),
            Some(_) => {}
        }
    }
    Ok(ParetoFront { efficient })
}

/// Front point closest to the ideal `(1, 1)`; `None` when a normaliser is zero.
pub fn knee(front: &ParetoFront, norms: &Normalizers) -> Result<Option<Chord>> {
    if front.is_empty() {
        return Err(Error::input("knee of an empty front is undefined"));
    }
    if !norms.is_valid() {
        return Ok(None);
    }
    let dist = |p: &ObjectivePoint| ((1.0 - p.norm_i).powi(2) + (1.0 - p.norm_d).powi(2)).sqrt();
    Ok(front.efficient.iter().min_by(|a, b| dist(a).total_cmp(&dist(b)).then(a.chord.cmp(&b.chord))).map(|p| p.chord))
}

/// Share of exhaustive-front chords present in the screened candidate set.
pub fn coverage(full_front: &ParetoFront, screened: &CandidateSet) -> Option<f64> {
    if full_front.is_empty() {
        return None;
    }
    let hit = full_front.efficient.iter().filter(|p| screened.contains(&p.chord)).count();
    Some(hit as f64 / full_front.len() as f64)
}

/// Share of exhaustive-front chords that also lie on the screened front.
pub fn front_coverage(full_front: &ParetoFront, screened_front: &ParetoFront) -> Option<f64> {
    if full_front.is_empty() {
        return None;
    }
    let on_screened = screened_front.chords();
    let hit = full_front.efficient.iter().filter(|p| on_screened.contains(&p.chord)).count();
    Some(hit as f64 / full_front.len() as f64)
}

/// Additive ε-indicator of the screened front against the exhaustive one,
/// in normalised coordinates; infinite for an empty screened front.
pub fn epsilon_plus(full_front: &ParetoFront, screened_front: &ParetoFront) -> f64 {
    if screened_front.is_empty() {
        return f64::INFINITY;
    }
    full_front
        .efficient
        .iter()
        .map(|e| {
            screened_front
                .efficient
                .iter()
                .map(|s| (e.norm_i - s.norm_i).max(e.norm_d - s.norm_d).max(0.0))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `HV(screened) / HV(full)`; `None` when the exhaustive hypervolume is zero.
pub fn hypervolume_ratio(full_front: &ParetoFront, screened_front: &ParetoFront) -> Option<f64> {
    let full = full_front.hypervolume();
    (full > 0.0).then(|| screened_front.hypervolume() / full)
}

/// Pearson correlation; `None` when either sample has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Exhaustive and screened fronts of one instance with every comparison metric.
#[derive(Clone, Debug)]
pub struct ParetoAnalysis {
    pub points: Vec<ObjectivePoint>,
    pub normalizers: Normalizers,
    pub full_front: ParetoFront,
    pub screened_front: ParetoFront,
    pub knee: Option<Chord>,
    pub screened_knee: Option<Chord>,
    pub coverage: Option<f64>,
    pub front_coverage: Option<f64>,
    pub eps_plus: f64,
    pub hv_ratio: Option<f64>,
    pub candidate_ratio: f64,
    pub knee_captured: Option<bool>,
}

impl ParetoAnalysis {
    /// Scores every admissible chord once; the screened front reuses those scores.
    pub fn run(spec: &SpectralDecomposition, full: &CandidateSet, screened: &CandidateSet, w: f64) -> Result<Self> {
        if screened.is_empty() {
            return Err(Error::input("screened candidate set is empty"));
        }
        if let Some(c) = screened.iter().find(|c| !full.contains(c)) {
            return Err(Error::input(format!("screened pair {{{c}}} is not admissible")));
        }
        let mut points = evaluate_objectives(spec, full.iter(), w)?;
        let normalizers = Normalizers::from_points(&points);
        normalizers.apply(&mut points);
        let full_front = extract_front(&points)?;
        let screened_points: Vec<ObjectivePoint> =
            points.iter().filter(|p| screened.contains(&p.chord)).copied().collect();
        let screened_front = extract_front(&screened_points)?;

        let knee_chord = knee(&full_front, &normalizers)?;
        let screened_knee = knee(&screened_front, &normalizers)?;
        let valid = normalizers.is_valid();
        Ok(ParetoAnalysis {
            coverage: coverage(&full_front, screened),
            front_coverage: front_coverage(&full_front, &screened_front),
            eps_plus: epsilon_plus(&full_front, &screened_front),
            hv_ratio: if valid { hypervolume_ratio(&full_front, &screened_front) } else { None },
            candidate_ratio: screened.len() as f64 / full.len() as f64,
            knee_captured: knee_chord.map(|k| screened.contains(&k)),
            points,
            normalizers,
            full_front,
            screened_front,
            knee: knee_chord,
            screened_knee,
        })
    }

    pub fn report(&self) -> ParetoReport {
        let to_json = |f: &ParetoFront| {
            f.efficient
                .iter()
                .map(|p| FrontPoint { p: p.chord.p, q: p.chord.q, n_i: p.norm_i, n_d: p.norm_d })
                .collect()
        };
        ParetoReport {
            front: to_json(&self.screened_front),
            full_front: to_json(&self.full_front),
            knee: self.knee,
            screened_knee: self.screened_knee,
            hv_ratio: self.hv_ratio,
            eps_plus: self.eps_plus.is_finite().then_some(self.eps_plus),
            coverage: self.coverage,
            front_coverage: self.front_coverage,
            candidate_ratio: self.candidate_ratio,
            knee_captured: self.knee_captured,
            i_star: self.normalizers.i_star,
            d_star: self.normalizers.d_star,
            degenerate_gain_axis: self.normalizers.d_star <= 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub p: usize,
    pub q: usize,
    #[serde(rename = "nI")]
    pub n_i: f64,
    #[serde(rename = "nD")]
    pub n_d: f64,
}

/// JSON summary written by the `pareto` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoReport {
    /// Screened front.
    pub front: Vec<FrontPoint>,
    pub full_front: Vec<FrontPoint>,
    /// Knee of the exhaustive front.
    pub knee: Option<Chord>,
    pub screened_knee: Option<Chord>,
    pub hv_ratio: Option<f64>,
    pub eps_plus: Option<f64>,
    pub coverage: Option<f64>,
    pub front_coverage: Option<f64>,
    pub candidate_ratio: f64,
    pub knee_captured: Option<bool>,
    pub i_star: f64,
    pub d_star: f64,
    pub degenerate_gain_axis: bool,
}
