//! Exact single-chord updates of effective resistance and Kirchhoff index.
//!
//! With `G = L†` and `M = G²`, adding `{p, q}` with conductance `w` changes
//! every pairwise resistance by a Sherman–Morrison term, and the Kirchhoff
//! index drops by `w n Q / (1 + w R)` with `R = bᵀGb`, `Q = bᵀMb`. Scoring a
//! chord therefore needs only the four endpoint entries of `G` and `M`.

use serde::{Deserialize, Serialize};

use crate::cycle::Chord;
use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;

/// A chord location with its conductance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordCandidate {
    pub chord: Chord,
    pub w: f64,
}

impl ChordCandidate {
    pub fn new(chord: Chord, w: f64) -> Result<Self> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::input(format!("chord conductance must be finite and nonnegative, got {w}")));
        }
        Ok(ChordCandidate { chord, w })
    }

    fn check(&self, spec: &SpectralDecomposition) -> Result<()> {
        if self.chord.p == self.chord.q || self.chord.q >= spec.n() {
            return Err(Error::input(format!("pair {{{}}} is invalid for n = {}", self.chord, spec.n())));
        }
        Ok(())
    }
}

/// Everything the tools report about one chord.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordScore {
    pub p: usize,
    pub q: usize,
    pub w: f64,
    /// `λ_1(L + w b bᵀ) - λ_1(L)`.
    pub delta_exact: f64,
    /// Same gain restricted to the lowest `m` nontrivial modes.
    pub delta_lowfreq: f64,
    /// `K_f(L) - K_f(L + w b bᵀ)`.
    pub improvement: f64,
    /// `R_pq` before the chord.
    pub r_endpoint: f64,
    /// `R_pq` after the chord.
    pub r_endpoint_updated: f64,
}

/// Budget saturation: both objectives are monotone in `w`, so the full budget
/// is always used.
pub fn saturate_budget(budget: f64) -> Result<f64> {
    if !(budget >= 0.0 && budget.is_finite()) {
        return Err(Error::input(format!("budget must be finite and nonnegative, got {budget}")));
    }
    Ok(budget)
}

/// `R_pq(w) = R_pq / (1 + w R_pq)`.
pub fn endpoint_resistance_updated(spec: &SpectralDecomposition, cand: &ChordCandidate) -> Result<f64> {
    cand.check(spec)?;
    let r = spec.resistance(cand.chord.p, cand.chord.q);
    Ok(r / (1.0 + cand.w * r))
}

/// `R_uv(w) = R_uv - w (R_uq + R_vp - R_up - R_vq)² / (4 (1 + w R_pq))`.
pub fn pairwise_resistance_updated(
    spec: &SpectralDecomposition,
    cand: &ChordCandidate,
    u: usize,
    v: usize,
) -> Result<f64> {
    cand.check(spec)?;
    if u == v || u >= spec.n() || v >= spec.n() {
        return Err(Error::input(format!("pair ({u},{v}) is invalid for n = {}", spec.n())));
    }
    let (p, q) = (cand.chord.p, cand.chord.q);
    let r = |a: usize, b: usize| if a == b { 0.0 } else { spec.resistance(a, b) };
    let cross = r(u, q) + r(v, p) - r(u, p) - r(v, q);
    let r_pq = spec.resistance(p, q);
    Ok(r(u, v) - cand.w * cross * cross / (4.0 * (1.0 + cand.w * r_pq)))
}

/// Kirchhoff-index improvement `w n Q / (1 + w R)`.
pub fn kirchhoff_improvement(spec: &SpectralDecomposition, cand: &ChordCandidate) -> Result<f64> {
    cand.check(spec)?;
    let (p, q) = (cand.chord.p, cand.chord.q);
    let r = spec.resistance(p, q);
    let qf = spec.resistance_sq_form(p, q);
    Ok((cand.w * spec.n() as f64 * qf / (1.0 + cand.w * r)).max(0.0))
}

/// Exact gain, low-frequency gain, Kirchhoff improvement and endpoint
/// resistances for one chord.
pub fn score(spec: &SpectralDecomposition, cand: &ChordCandidate, modes: usize) -> Result<ChordScore> {
    cand.check(spec)?;
    let r_endpoint = spec.resistance(cand.chord.p, cand.chord.q);
    Ok(ChordScore {
        p: cand.chord.p,
        q: cand.chord.q,
        w: cand.w,
        delta_exact: spec.exact_gain(cand.chord, cand.w)?,
        delta_lowfreq: spec.lowfreq_gain(cand.chord, cand.w, modes.min(spec.n() - 1))?,
        improvement: kirchhoff_improvement(spec, cand)?,
        r_endpoint,
        r_endpoint_updated: endpoint_resistance_updated(spec, cand)?,
    })
}

/// How far a chord's gain falls short of the interlacing ceiling, with the
/// two-mode comparison bound evaluated when its hypotheses can be checked.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CeilingDeficit {
    /// `λ_2 - λ_1`.
    pub gamma: f64,
    pub gain: f64,
    /// `γ - Δ`.
    pub deficit: f64,
    pub beta1sq: f64,
    pub beta2sq: f64,
    /// `β_2² / β_1²`; infinite when `β_1 = 0`.
    pub epsilon: f64,
    pub t3plus: f64,
    /// `λ_2 / λ_3`, the tightest admissible spectral-gap ratio.
    pub rho0: f64,
    pub theta0: f64,
    /// `γ (1/w + T_{3+}/(1 - ρ_0))`, compared against `θ_0 β_1²`.
    pub dominance_lhs: f64,
    pub dominance_holds: bool,
    /// `γ ε / (1 - θ_0)`, present only when every hypothesis holds.
    pub bound_rhs: Option<f64>,
    pub bound_holds: Option<bool>,
}

/// Ceiling-deficit diagnostic for a chord and a user-chosen `θ_0 ∈ (0, 1)`.
pub fn ceiling_deficit_report(
    spec: &SpectralDecomposition,
    cand: &ChordCandidate,
    theta0: f64,
) -> Result<CeilingDeficit> {
    cand.check(spec)?;
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::input(format!("theta0 must lie in (0, 1), got {theta0}")));
    }
    if spec.is_degenerate() {
        return Err(Error::input("ceiling deficit needs λ_1 < λ_2; this spectrum is degenerate"));
    }
    if spec.n() < 4 {
        return Err(Error::input("ceiling deficit needs at least three nontrivial modes"));
    }
    let ev = spec.eigenvalues();
    let gamma = spec.ceiling();
    let gain = spec.exact_gain(cand.chord, cand.w)?;
    let jumps = spec.mode_jumps(cand.chord)?;
    let beta1sq = jumps.beta[0] * jumps.beta[0];
    let beta2sq = jumps.beta[1] * jumps.beta[1];
    let epsilon = if beta1sq > 0.0 { beta2sq / beta1sq } else { f64::INFINITY };
    let rho0 = ev[2] / ev[3];

    let gap_ok = rho0 < 1.0;
    let dominance_lhs =
        if gap_ok && cand.w > 0.0 { gamma * (1.0 / cand.w + jumps.t3plus / (1.0 - rho0)) } else { f64::INFINITY };
    let dominance_holds = beta1sq > 0.0 && dominance_lhs <= theta0 * beta1sq;
    let deficit = gamma - gain;
    let bound_rhs = dominance_holds.then(|| gamma * epsilon / (1.0 - theta0));
    // Slack covers rounding in γ - Δ when the bound itself is ~0.
    let slack = 1e-10 * ev[2];
    let bound_holds = bound_rhs.map(|b| deficit <= b + slack);
    Ok(CeilingDeficit {
        gamma,
        gain,
        deficit,
        beta1sq,
        beta2sq,
        epsilon,
        t3plus: jumps.t3plus,
        rho0,
        theta0,
        dominance_lhs,
        dominance_holds,
        bound_rhs,
        bound_holds,
    })
}
