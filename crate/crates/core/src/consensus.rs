//! Noisy first-order consensus `dξ = -Lξ dt + σ dW` on a cycle with an
//! optional chord.
//!
//! Only the disagreement component `ξ - mean(ξ)` is simulated. Two integrators
//! are available: Euler–Maruyama with projected noise increments, and exact
//! Ornstein–Uhlenbeck transitions in the Laplacian eigenbasis.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chord::ChordCandidate;
use crate::cycle::WeightedCycle;
use crate::error::{Error, Result};
use crate::spectral::{laplacian_from_edges, SpectralDecomposition};

/// Burn-in in units of the slowest relaxation time `1/λ_1`.
pub const BURN_IN_RELAXATION_TIMES: f64 = 10.0;

/// Sparse Laplacian stored as a weighted edge list.
#[derive(Clone, Debug)]
pub struct GraphLaplacian {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl GraphLaplacian {
    pub fn from_cycle(cycle: &WeightedCycle, chord: Option<&ChordCandidate>) -> Result<Self> {
        let n = cycle.n();
        let mut edges: Vec<(usize, usize, f64)> =
            cycle.conductances().iter().enumerate().map(|(i, &c)| (i, (i + 1) % n, c)).collect();
        if let Some(cand) = chord {
            cycle.check_admissible(cand.chord)?;
            if cand.w > 0.0 {
                edges.push((cand.chord.p, cand.chord.q, cand.w));
            }
        }
        Ok(GraphLaplacian { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn dense(&self) -> DMatrix<f64> {
        laplacian_from_edges(self.n, self.edges.iter().copied())
    }

    /// `out = L x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(a, b, c) in &self.edges {
            let f = c * (x[a] - x[b]);
            out[a] += f;
            out[b] -= f;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    EulerMaruyama,
    ExactOu,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub sigma: f64,
    pub dt: f64,
    /// Total simulated time including burn-in.
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Spacing of recorded snapshots; rounded to a whole number of steps.
    pub record_interval: f64,
    /// Discarded prefix; `None` means `10/λ_1`.
    pub burn_in: Option<f64>,
}

impl SimConfig {
    /// Checks the step size and horizon against the graph spectrum.
    pub fn validate(&self, lambda1: f64, lambda_max: f64, integrator: Integrator) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::input(format!("sigma must be finite and nonnegative, got {}", self.sigma)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::input(format!("dt must be positive, got {}", self.dt)));
        }
        if integrator == Integrator::EulerMaruyama && self.dt * lambda_max >= 2.0 {
            return Err(Error::input(format!(
                "dt = {} is unstable: dt * lambda_max = {} must stay below 2",
                self.dt,
                self.dt * lambda_max
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::input("need at least one path"));
        }
        if !(self.record_interval >= self.dt && self.record_interval.is_finite()) {
            return Err(Error::input("record_interval must be at least dt"));
        }
        let burn_in = self.burn_in_for(lambda1);
        if !(burn_in >= 0.0 && burn_in.is_finite()) {
            return Err(Error::input("burn_in must be finite and nonnegative"));
        }
        let min_horizon = BURN_IN_RELAXATION_TIMES / lambda1;
        if !(self.horizon >= min_horizon && self.horizon > burn_in && self.horizon.is_finite()) {
            return Err(Error::input(format!(
                "horizon {} must exceed the burn-in {burn_in} and be at least 10/lambda_1 = {min_horizon}",
                self.horizon
            )));
        }
        Ok(())
    }

    pub fn burn_in_for(&self, lambda1: f64) -> f64 {
        self.burn_in.unwrap_or(BURN_IN_RELAXATION_TIMES / lambda1)
    }

    fn steps_per_record(&self) -> usize {
        ((self.record_interval / self.dt).round() as usize).max(1)
    }
}

/// Recorded disagreement snapshots for every path.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub n: usize,
    pub sigma: f64,
    /// Snapshot times, shared by all paths.
    pub times: Vec<f64>,
    pub burn_in: f64,
    /// `paths[k]` holds `times.len()` snapshots of length `n`, concatenated.
    pub paths: Vec<Vec<f64>>,
}

impl Ensemble {
    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn snapshot(&self, path: usize, k: usize) -> &[f64] {
        &self.paths[path][k * self.n..(k + 1) * self.n]
    }

    /// Index of the first snapshot at or after the burn-in.
    pub fn tail_start(&self) -> usize {
        self.times.partition_point(|&t| t < self.burn_in)
    }

    pub fn tail_len(&self) -> usize {
        self.times.len() - self.tail_start()
    }
}

/// Per-path seed derived from the run seed with a splitmix64 finaliser.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn project(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Simulates `cfg.n_paths` trajectories from `initial` (projected onto the
/// disagreement subspace; zero when absent).
pub fn simulate(
    lap: &GraphLaplacian,
    cfg: &SimConfig,
    integrator: Integrator,
    initial: Option<&[f64]>,
) -> Result<Ensemble> {
    let n = lap.n();
    let spec = SpectralDecomposition::from_laplacian(&lap.dense())?;
    cfg.validate(spec.lambda1(), spec.lambda_max(), integrator)?;
    let mut start = match initial {
        Some(x) if x.len() != n => {
            return Err(Error::input(format!("initial state has {} entries, graph has {n}", x.len())))
        }
        Some(x) => x.to_vec(),
        None => vec![0.0; n],
    };
    project(&mut start);

    let steps_per_record = cfg.steps_per_record();
    let record_dt = steps_per_record as f64 * cfg.dt;
    let n_records = (cfg.horizon / record_dt).floor() as usize + 1;
    let times: Vec<f64> = (0..n_records).map(|k| k as f64 * record_dt).collect();

    let run_path = |k: usize| -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(cfg.seed, k as u64));
        match integrator {
            Integrator::EulerMaruyama => em_path(lap, cfg, &start, n_records, steps_per_record, &mut rng),
            Integrator::ExactOu => exact_path(&spec, cfg.sigma, record_dt, &start, n_records, &mut rng),
        }
    };
    let paths: Vec<Vec<f64>> = (0..cfg.n_paths).into_par_iter().map(run_path).collect();
    Ok(Ensemble { n, sigma: cfg.sigma, times, burn_in: cfg.burn_in_for(spec.lambda1()), paths })
}

fn em_path(
    lap: &GraphLaplacian,
    cfg: &SimConfig,
    start: &[f64],
    n_records: usize,
    steps_per_record: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = start.len();
    let mut out = Vec::with_capacity(n_records * n);
    let mut x = start.to_vec();
    let mut lx = vec![0.0; n];
    let mut z = vec![0.0; n];
    let noise = cfg.sigma * cfg.dt.sqrt();
    out.extend_from_slice(&x);
    for _ in 1..n_records {
        for _ in 0..steps_per_record {
            lap.apply(&x, &mut lx);
            if noise > 0.0 {
                z.iter_mut().for_each(|v| *v = StandardNormal.sample(rng));
                project(&mut z);
            }
            for i in 0..n {
                x[i] += -cfg.dt * lx[i] + noise * z[i];
            }
        }
        out.extend_from_slice(&x);
    }
    out
}

fn exact_path(
    spec: &SpectralDecomposition,
    sigma: f64,
    h: f64,
    start: &[f64],
    n_records: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = start.len();
    let u = spec.eigenvectors();
    let lam = spec.eigenvalues();
    // Modal coordinates of the nontrivial modes.
    let mut y: Vec<f64> = (1..n).map(|k| (0..n).map(|i| u[(i, k)] * start[i]).sum()).collect();
    let decay: Vec<f64> = lam[1..].iter().map(|l| (-l * h).exp()).collect();
    let spread: Vec<f64> = lam[1..].iter().map(|l| sigma * ((-(-2.0 * l * h).exp_m1()) / (2.0 * l)).sqrt()).collect();
    let mut out = Vec::with_capacity(n_records * n);
    let mut x = vec![0.0; n];
    for rec in 0..n_records {
        if rec > 0 {
            for k in 0..n - 1 {
                let z: f64 = StandardNormal.sample(rng);
                y[k] = decay[k] * y[k] + spread[k] * z;
            }
        }
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = (1..n).map(|k| u[(i, k)] * y[k - 1]).sum();
        }
        out.extend_from_slice(&x);
    }
    out
}

/// Ensemble estimate with its Monte Carlo standard error across paths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub tail_snapshots: usize,
    pub paths: usize,
    /// Fewer than two paths or fewer than ten tail snapshots.
    pub wide_interval: bool,
}

fn path_average(ens: &Ensemble, stat: impl Fn(&[f64]) -> f64 + Sync) -> Result<Estimate> {
    let start = ens.tail_start();
    let len = ens.tail_len();
    if len == 0 {
        return Err(Error::input("no snapshots after the burn-in"));
    }
    let per_path: Vec<f64> = (0..ens.n_paths())
        .map(|p| (start..ens.times.len()).map(|k| stat(ens.snapshot(p, k))).sum::<f64>() / len as f64)
        .collect();
    let m = per_path.len() as f64;
    let value = per_path.iter().sum::<f64>() / m;
    let stderr = if per_path.len() > 1 {
        let var = per_path.iter().map(|v| (v - value).powi(2)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(Estimate {
        value,
        stderr,
        tail_snapshots: len,
        paths: per_path.len(),
        wide_interval: per_path.len() < 2 || len < 10,
    })
}

/// Empirical coherence `(1/n) Σ_i (ξ_i - mean ξ)²` over the tail window.
pub fn estimate_coherence(ens: &Ensemble) -> Result<Estimate> {
    let n = ens.n as f64;
    path_average(ens, |x| {
        let mean = x.iter().sum::<f64>() / n;
        x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
    })
}

/// Empirical `E[(ξ_i - ξ_j)²]` over the tail window.
pub fn estimate_pair_variance(ens: &Ensemble, i: usize, j: usize) -> Result<Estimate> {
    if i == j || i >= ens.n || j >= ens.n {
        return Err(Error::input(format!("pair ({i},{j}) is invalid for n = {}", ens.n)));
    }
    path_average(ens, |x| (x[i] - x[j]).powi(2))
}

/// `σ² K_f / (2 n²)`.
pub fn coherence_prediction(spec: &SpectralDecomposition, sigma: f64) -> f64 {
    let n = spec.n() as f64;
    sigma * sigma * spec.kirchhoff_index() / (2.0 * n * n)
}

/// `σ² R_ij / 2`.
pub fn pair_variance_prediction(spec: &SpectralDecomposition, sigma: f64, i: usize, j: usize) -> f64 {
    0.5 * sigma * sigma * spec.resistance(i, j)
}
