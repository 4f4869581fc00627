//! Laplacian spectra and the rank-one chord update of `λ_1`.
//!
//! A [`SpectralDecomposition`] is computed once per instance with a dense
//! symmetric eigensolver and then shared by every chord query. Adding a chord
//! `{p, q}` of conductance `w` is the update `L + w b bᵀ` with
//! `b = e_p - e_q`; in the eigenbasis of `L` that is a diagonal matrix plus a
//! rank-one term with weights `β_k² = (u_{k,p} - u_{k,q})²`, so the new
//! algebraic connectivity comes from the secular equation in O(n) per chord.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::cycle::{Chord, WeightedCycle};
use crate::error::{Error, Result};
use crate::secular::smallest_root_offset;

/// Eigenvalues closer than this fraction of `λ_max` count as repeated.
pub const DEGENERACY_RTOL: f64 = 1e-11;

const EIGEN_MAX_ITER: usize = 10_000;

/// Dense Laplacian `L = D - A` of the cycle.
pub fn cycle_laplacian(cycle: &WeightedCycle) -> DMatrix<f64> {
    let n = cycle.n();
    let edges = cycle.conductances().iter().enumerate().map(|(i, &c)| (i, (i + 1) % n, c));
    laplacian_from_edges(n, edges)
}

/// Dense Laplacian of an undirected weighted graph given as an edge list.
pub fn laplacian_from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for (a, b, c) in edges {
        l[(a, a)] += c;
        l[(b, b)] += c;
        l[(a, b)] -= c;
        l[(b, a)] -= c;
    }
    l
}

/// Full eigendecomposition of a connected graph Laplacian. The pseudoinverse
/// `G = L†` and `M = G²` are formed on first use.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Column `k` is `u_k`.
    eigenvectors: DMatrix<f64>,
    /// Column `p` holds `(u_{0,p}, ..., u_{n-1,p})`, so chord jumps read contiguous memory.
    by_vertex: DMatrix<f64>,
    pinvs: OnceLock<(DMatrix<f64>, DMatrix<f64>)>,
}

impl SpectralDecomposition {
    pub fn of_cycle(cycle: &WeightedCycle) -> Result<Self> {
        Self::from_laplacian(&cycle_laplacian(cycle))
    }

    /// Decomposes a symmetric Laplacian of a connected graph.
    pub fn from_laplacian(laplacian: &DMatrix<f64>) -> Result<Self> {
        let n = laplacian.nrows();
        if n < 2 || laplacian.ncols() != n {
            return Err(Error::input(format!("expected a square Laplacian, got {}x{}", n, laplacian.ncols())));
        }
        let eig = SymmetricEigen::try_new(laplacian.clone(), f64::EPSILON, EIGEN_MAX_ITER).ok_or_else(|| {
            Error::computation(format!(
                "symmetric eigensolver did not converge within {EIGEN_MAX_ITER} iterations (n = {n}, ‖L‖_F = {:.6e})",
                laplacian.norm()
            ))
        })?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);

        let lambda_max = eigenvalues[n - 1];
        let null_tol = 1e-9 * lambda_max.abs().max(f64::MIN_POSITIVE);
        if eigenvalues[0].abs() > null_tol {
            return Err(Error::computation(format!(
                "smallest eigenvalue {:.3e} is not zero; input is not a Laplacian",
                eigenvalues[0]
            )));
        }
        if eigenvalues[1] <= null_tol {
            return Err(Error::input("graph is disconnected (repeated zero eigenvalue)"));
        }
        eigenvalues[0] = 0.0;
        eigenvectors.column_mut(0).fill(1.0 / (n as f64).sqrt());

        let by_vertex = eigenvectors.transpose();
        Ok(SpectralDecomposition { eigenvalues, eigenvectors, by_vertex, pinvs: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending, with `λ_0 = 0`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// `G = L†`.
    pub fn pinv(&self) -> &DMatrix<f64> {
        &self.pinvs().0
    }

    /// `M = G²`.
    pub fn pinv_sq(&self) -> &DMatrix<f64> {
        &self.pinvs().1
    }

    fn pinvs(&self) -> &(DMatrix<f64>, DMatrix<f64>) {
        self.pinvs.get_or_init(|| pseudoinverse_pair(&self.eigenvalues, &self.eigenvectors))
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn lambda2(&self) -> f64 {
        self.eigenvalues[2.min(self.n() - 1)]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.n() - 1]
    }

    /// Interlacing ceiling `γ = λ_2 - λ_1`.
    pub fn ceiling(&self) -> f64 {
        self.lambda2() - self.lambda1()
    }

    fn merge_tol(&self) -> f64 {
        DEGENERACY_RTOL * self.lambda_max()
    }

    /// True when `λ_1 = λ_2` up to rounding, as on uniform cycles.
    pub fn is_degenerate(&self) -> bool {
        self.n() > 2 && self.ceiling() <= self.merge_tol()
    }

    /// The solver's unit Fiedler vector `u_1`.
    pub fn fiedler_vector(&self) -> DVector<f64> {
        self.eigenvectors.column(1).into_owned()
    }

    /// Entry `u_{k,v}`.
    pub fn mode_value(&self, k: usize, v: usize) -> f64 {
        self.by_vertex[(k, v)]
    }

    fn check_pair(&self, chord: Chord) -> Result<()> {
        if chord.p == chord.q || chord.q >= self.n() {
            return Err(Error::input(format!("pair {{{chord}}} is invalid for n = {}", self.n())));
        }
        Ok(())
    }

    fn check_weight(w: f64) -> Result<()> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::input(format!("chord conductance must be finite and nonnegative, got {w}")));
        }
        Ok(())
    }

    /// `β_k² = (u_{k,p} - u_{k,q})²` for `k = 1..n-1` (index 0 of the result is `k = 1`).
    fn squared_jumps(&self, chord: Chord, modes: usize) -> Vec<f64> {
        let p = self.by_vertex.column(chord.p);
        let q = self.by_vertex.column(chord.q);
        (1..=modes)
            .map(|k| {
                let b = p[k] - q[k];
                b * b
            })
            .collect()
    }

    /// `R_pq = bᵀ G b`.
    pub fn resistance(&self, a: usize, b: usize) -> f64 {
        let g = self.pinv();
        g[(a, a)] + g[(b, b)] - 2.0 * g[(a, b)]
    }

    /// `Q_pq = bᵀ M b`.
    pub fn resistance_sq_form(&self, a: usize, b: usize) -> f64 {
        let m = self.pinv_sq();
        m[(a, a)] + m[(b, b)] - 2.0 * m[(a, b)]
    }

    /// `n tr(L†)`.
    pub fn kirchhoff_index(&self) -> f64 {
        let n = self.n() as f64;
        n * self.eigenvalues[1..].iter().map(|l| 1.0 / l).sum::<f64>()
    }

    /// `λ_1(L + w b bᵀ)` from the secular equation over all modes.
    pub fn lambda1_updated(&self, chord: Chord, w: f64) -> Result<f64> {
        Ok(self.lambda1() + self.gain_over_modes(chord, w, self.n() - 1)?)
    }

    /// Algebraic-connectivity gain `λ_1(L + w b bᵀ) - λ_1(L)`, within `[0, γ]`.
    pub fn exact_gain(&self, chord: Chord, w: f64) -> Result<f64> {
        self.check_pair(chord)?;
        Self::check_weight(w)?;
        if self.is_degenerate() {
            return Ok(0.0);
        }
        self.gain_over_modes(chord, w, self.n() - 1)
    }

    /// Gain predicted by the lowest `m` nontrivial modes:
    /// `λ_min(diag(λ_1..λ_m) + w a aᵀ) - λ_1` with `a_k = u_{k,p} - u_{k,q}`.
    pub fn lowfreq_gain(&self, chord: Chord, w: f64, m: usize) -> Result<f64> {
        if m == 0 || m >= self.n() {
            return Err(Error::input(format!("mode count m = {m} must lie in 1..={}", self.n() - 1)));
        }
        self.gain_over_modes(chord, w, m)
    }

    fn gain_over_modes(&self, chord: Chord, w: f64, modes: usize) -> Result<f64> {
        self.check_pair(chord)?;
        Self::check_weight(w)?;
        let poles = &self.eigenvalues[1..=modes];
        let weights = self.squared_jumps(chord, modes);
        let offset = smallest_root_offset(poles, &weights, w, self.merge_tol());
        // Interlacing caps the full-mode gain at the next eigenvalue; clip rounding only.
        let cap = if modes >= 2 { poles[1] - poles[0] } else { f64::INFINITY };
        Ok(offset.clamp(0.0, cap))
    }

    pub fn mode_jumps(&self, chord: Chord) -> Result<ModeJumps> {
        self.check_pair(chord)?;
        let p = self.by_vertex.column(chord.p);
        let q = self.by_vertex.column(chord.q);
        let beta: Vec<f64> = (1..self.n()).map(|k| p[k] - q[k]).collect();
        let t3plus = beta.iter().zip(&self.eigenvalues[1..]).skip(2).map(|(b, l)| b * b / l).sum();
        Ok(ModeJumps { beta, t3plus })
    }

    /// First `k` eigenvalues, for diagnostics.
    pub fn spectrum_head(&self, k: usize) -> &[f64] {
        &self.eigenvalues[..k.min(self.n())]
    }

    /// Least-squares sinusoid fit of the first two nontrivial modes in
    /// resistance arclength coordinates.
    pub fn fiedler_mode_fit(&self, cycle: &WeightedCycle) -> Result<FiedlerFit> {
        if cycle.n() != self.n() {
            return Err(Error::input(format!("cycle has {} vertices, spectrum has {}", cycle.n(), self.n())));
        }
        let n = self.n();
        let prof = cycle.resistance_profile();
        let angles: Vec<f64> = prof.prefix[..n].iter().map(|s| 2.0 * PI * s / prof.total).collect();
        let amp = (2.0 / n as f64).sqrt();
        let u1 = self.eigenvectors.column(1);
        let u2 = self.eigenvectors.column(2.min(n - 1));

        // Σ u_i sin(θ_i + φ) = a cos φ + b sin φ is maximal at φ = atan2(b, a);
        // any sign flip is absorbed by the phase.
        let (a, b) = angles.iter().zip(u1.iter()).fold((0.0, 0.0), |(a, b), (t, u)| (a + u * t.sin(), b + u * t.cos()));
        let phase = b.atan2(a).rem_euclid(2.0 * PI);
        let sign = 1.0;
        let sup = |v: &dyn Fn(usize) -> f64, model: &dyn Fn(f64) -> f64| {
            (0..n).map(|i| (v(i) - model(angles[i])).abs()).fold(0.0, f64::max)
        };
        let sine_error = sup(&|i| u1[i], &|t| sign * amp * (t + phase).sin());
        let cos_plus = sup(&|i| u2[i], &|t| amp * (t + phase).cos());
        let cos_minus = sup(&|i| u2[i], &|t| -amp * (t + phase).cos());
        let (cosine_sign, cosine_error) = if cos_plus <= cos_minus { (1.0, cos_plus) } else { (-1.0, cos_minus) };
        Ok(FiedlerFit {
            degenerate: self.is_degenerate(),
            phase,
            sign,
            sine_sup_error: sine_error,
            cosine_sign,
            cosine_sup_error: cosine_error,
            scaled_sine_error: sine_error * (n as f64).sqrt(),
        })
    }
}

fn pseudoinverse_pair(eigenvalues: &[f64], eigenvectors: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = eigenvalues.len();
    let nontrivial = eigenvectors.columns(1, n - 1);
    let mut scaled = nontrivial.into_owned();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col /= eigenvalues[k + 1];
    }
    let g = &scaled * nontrivial.transpose();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col /= eigenvalues[k + 1];
    }
    let m = &scaled * nontrivial.transpose();
    (g, m)
}

/// Projections of `b = e_p - e_q` onto the nontrivial modes.
#[derive(Clone, Debug, Serialize)]
pub struct ModeJumps {
    /// `β_k` for `k = 1..n-1`.
    pub beta: Vec<f64>,
    /// `Σ_{k>=3} β_k² / λ_k`.
    pub t3plus: f64,
}

impl ModeJumps {
    /// `Σ_k β_k² / λ_k`, which equals the effective resistance of the pair.
    pub fn modal_resistance(&self, spec: &SpectralDecomposition) -> f64 {
        self.beta.iter().zip(&spec.eigenvalues()[1..]).map(|(b, l)| b * b / l).sum()
    }
}

/// Sup-norm distance of `u_1` from `±√(2/n) sin(2π s_i/S + φ)` and of `u_2`
/// from `±√(2/n) cos(2π s_i/S + φ)` with the same phase.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiedlerFit {
    /// `λ_1 = λ_2` up to rounding; the eigensolver's basis of the shared
    /// eigenspace is arbitrary, so no fit quality should be asserted.
    pub degenerate: bool,
    pub phase: f64,
    pub sign: f64,
    pub sine_sup_error: f64,
    pub cosine_sign: f64,
    pub cosine_sup_error: f64,
    /// `sine_sup_error · √n`.
    pub scaled_sine_error: f64,
}
