//! Seeded Monte Carlo campaigns over random weighted cycles.
//!
//! Trial `t` of a campaign with master seed `s` draws everything from a
//! ChaCha8 stream seeded with `substream_seed(s, t)`: first the `n`
//! conductances, then (when requested) the random-baseline chord. Trials run
//! in parallel but results are collected in trial order, so every output file
//! is identical for any worker count.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::{Chord, WeightedCycle};
use crate::error::{Error, Result};
use crate::pareto::{pearson, ParetoAnalysis};
use crate::screening::{
    fiedler_baseline, random_baseline, screen, select_best, CandidateSet, DEFAULT_MODES, DEFAULT_TAU,
};
use crate::spectral::SpectralDecomposition;

pub use crate::consensus::substream_seed;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "RING_CHORD_THREADS";

/// How the chord conductance `ŵ` is chosen for each instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRule {
    /// `ŵ = conductance_hi`.
    #[default]
    RangeUpper,
    /// `ŵ = max_i c_i` of the sampled instance.
    MaxConductance,
    Fixed(f64),
}

impl BudgetRule {
    pub fn budget(&self, cfg: &CampaignConfig, cycle: &WeightedCycle) -> f64 {
        match *self {
            BudgetRule::RangeUpper => cfg.conductance_hi,
            BudgetRule::MaxConductance => cycle.max_conductance(),
            BudgetRule::Fixed(w) => w,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Random,
    Fiedler,
    Rbaps,
    AwRbaps,
    /// Exhaustive search; its normalised gain is 1 by construction.
    Full,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Fiedler => "fiedler",
            Strategy::Rbaps => "rbaps",
            Strategy::AwRbaps => "aw_rbaps",
            Strategy::Full => "full",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignMode {
    GainScreening,
    Correlation,
    Pareto,
}

fn default_tau() -> f64 {
    DEFAULT_TAU
}

fn default_m() -> usize {
    DEFAULT_MODES
}

fn default_strategies() -> Vec<Strategy> {
    vec![Strategy::Random, Strategy::Fiedler, Strategy::Rbaps, Strategy::AwRbaps]
}

fn default_batches() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub n: usize,
    pub conductance_lo: f64,
    pub conductance_hi: f64,
    #[serde(default)]
    pub budget_rule: BudgetRule,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_m")]
    pub m: usize,
    pub trials: usize,
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    pub mode: CampaignMode,
    /// Correlation mode: trials are split into this many consecutive batches.
    #[serde(default = "default_batches")]
    pub batches: usize,
    /// Pareto mode: also write `front_<seed>.json` per trial.
    #[serde(default)]
    pub write_fronts: bool,
}

impl CampaignConfig {
    /// Desk-scale defaults for `n = 200`, `c ~ U[1, 100]`, `ŵ = 100`.
    pub fn default_setting(mode: CampaignMode, trials: usize, master_seed: u64) -> Self {
        CampaignConfig {
            n: 200,
            conductance_lo: 1.0,
            conductance_hi: 100.0,
            budget_rule: BudgetRule::RangeUpper,
            tau: DEFAULT_TAU,
            m: DEFAULT_MODES,
            trials,
            master_seed: Some(master_seed),
            strategies: default_strategies(),
            mode,
            batches: 1,
            write_fronts: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < crate::cycle::MIN_VERTICES + 1 {
            return Err(Error::input(format!("n must be at least 5, got {}", self.n)));
        }
        check_range(self.conductance_lo, self.conductance_hi)?;
        if !(0.0..1.0).contains(&self.tau) {
            return Err(Error::input(format!("tau must lie in [0, 1), got {}", self.tau)));
        }
        if self.m == 0 {
            return Err(Error::input("m must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::input("trials must be at least 1"));
        }
        if self.batches == 0 || self.batches > self.trials {
            return Err(Error::input("batches must lie in 1..=trials"));
        }
        if let BudgetRule::Fixed(w) = self.budget_rule {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::input(format!("fixed budget must be positive, got {w}")));
            }
        }
        if self.mode == CampaignMode::GainScreening && self.strategies.is_empty() {
            return Err(Error::input("gain_screening needs at least one strategy"));
        }
        if self.master_seed.is_none() {
            return Err(Error::input("master_seed is required"));
        }
        Ok(())
    }

    fn seed(&self) -> u64 {
        self.master_seed.unwrap_or_default()
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        substream_seed(self.seed(), trial as u64)
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::input(format!("conductance range must satisfy 0 < lo <= hi < inf, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// Cycle with i.i.d. `U[lo, hi]` conductances.
pub fn generate_instance<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Result<WeightedCycle> {
    check_range(lo, hi)?;
    let c = (0..n).map(|_| if lo == hi { lo } else { rng.random_range(lo..=hi) }).collect();
    WeightedCycle::new(c)
}

/// Runs `f` on a pool capped by `RING_CHORD_THREADS` when set.
pub fn with_worker_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let threads: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
            if threads == 0 {
                return Err(Error::input(format!("{THREADS_ENV} must be positive")));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::computation(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

struct Instance {
    seed: u64,
    cycle: WeightedCycle,
    spec: SpectralDecomposition,
    w: f64,
    rng: ChaCha8Rng,
}

fn instance(cfg: &CampaignConfig, trial: usize) -> Result<Instance> {
    let seed = cfg.trial_seed(trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cycle = generate_instance(cfg.n, cfg.conductance_lo, cfg.conductance_hi, &mut rng)?;
    let spec = SpectralDecomposition::of_cycle(&cycle)?;
    let w = cfg.budget_rule.budget(cfg, &cycle);
    Ok(Instance { seed, cycle, spec, w, rng })
}

fn run_trials<T: Send>(cfg: &CampaignConfig, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    with_worker_pool(|| (0..cfg.trials).into_par_iter().map(&f).collect::<Result<Vec<T>>>())?
}

fn expect_mode(cfg: &CampaignConfig, mode: CampaignMode) -> Result<()> {
    cfg.validate()?;
    if cfg.mode != mode {
        return Err(Error::input(format!("campaign mode is {:?}, expected {mode:?}", cfg.mode)));
    }
    Ok(())
}

/// Sample mean, standard deviation, median and range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Aggregate {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let sd = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if count % 2 == 1 { sorted[count / 2] } else { 0.5 * (sorted[count / 2 - 1] + sorted[count / 2]) };
        Some(Aggregate { count, mean, sd, median, min: sorted[0], max: sorted[count - 1] })
    }
}

/// One row of `trials.csv` in gain-screening mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub trial: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub p: usize,
    pub q: usize,
    /// `Δ̂_m` of the chosen chord.
    pub lowfreq_gain: f64,
    /// `Δ̂_m / max Δ̂_m`; empty when the exhaustive maximum is zero.
    pub theta_hat: Option<f64>,
    pub candidates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainSummary {
    pub strategies: BTreeMap<String, Option<Aggregate>>,
    /// Trials whose exhaustive `max Δ̂_m` was zero.
    pub undefined_trials: usize,
}

/// Normalised low-frequency gain of each strategy on every trial.
pub fn run_gain_campaign(cfg: &CampaignConfig) -> Result<(Vec<GainRow>, GainSummary)> {
    expect_mode(cfg, CampaignMode::GainScreening)?;
    let per_trial = run_trials(cfg, |t| gain_trial(cfg, t))?;
    let rows: Vec<GainRow> = per_trial.into_iter().flatten().collect();
    let mut strategies = BTreeMap::new();
    for s in &cfg.strategies {
        let vals: Vec<f64> = rows.iter().filter(|r| r.strategy == *s).filter_map(|r| r.theta_hat).collect();
        strategies.insert(s.name().to_string(), Aggregate::of(&vals));
    }
    let undefined_trials =
        rows.iter().filter(|r| r.theta_hat.is_none() && Some(&r.strategy) == cfg.strategies.first()).count();
    Ok((rows, GainSummary { strategies, undefined_trials }))
}

fn gain_trial(cfg: &CampaignConfig, trial: usize) -> Result<Vec<GainRow>> {
    let Instance { seed, cycle, spec, w, mut rng } = instance(cfg, trial)?;
    let m = cfg.m.min(cfg.n - 1);
    let full = CandidateSet::full(&cycle);
    let scores: BTreeMap<Chord, f64> =
        full.iter().map(|&c| Ok((c, spec.lowfreq_gain(c, w, m)?))).collect::<Result<_>>()?;
    let best = scores.values().copied().fold(0.0, f64::max);
    let lookup = |c: Chord| Ok(scores[&c]);

    let mut rows = Vec::with_capacity(cfg.strategies.len());
    for &strategy in &cfg.strategies {
        let (chord, candidates) = match strategy {
            Strategy::Random => (random_baseline(&cycle, &mut rng), 1),
            Strategy::Fiedler => (fiedler_baseline(&spec, &cycle)?, 1),
            Strategy::Rbaps => {
                let set = screen(&cycle, 0.0)?;
                (select_best(&set, lookup)?, set.len())
            }
            Strategy::AwRbaps => {
                let set = screen(&cycle, cfg.tau)?;
                (select_best(&set, lookup)?, set.len())
            }
            Strategy::Full => (select_best(&full, lookup)?, full.len()),
        };
        let gain = scores[&chord];
        rows.push(GainRow {
            trial,
            seed,
            strategy,
            p: chord.p,
            q: chord.q,
            lowfreq_gain: gain,
            theta_hat: (best > 0.0).then(|| gain / best),
            candidates,
        });
    }
    Ok(rows)
}

/// One row of `trials.csv` in correlation mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub trial: usize,
    pub seed: u64,
    pub batch: usize,
    /// Pearson correlation between exact `Δ` and exact `I` over all admissible chords.
    pub pearson_r: Option<f64>,
    pub argmax_gain_p: usize,
    pub argmax_gain_q: usize,
    pub argmax_improvement_p: usize,
    pub argmax_improvement_q: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBatch {
    pub batch: usize,
    /// Correlation of the pooled `(Δ/Δ*, I/I*)` pairs, each instance scaled by its own optima.
    pub r: Option<f64>,
    /// Mean of the per-instance correlations.
    pub mean_instance_r: Option<f64>,
    /// Correlation of the pooled unscaled pairs.
    pub pooled_raw_r: Option<f64>,
    /// Instances with an undefined correlation (zero variance or zero optimum).
    pub undefined: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub batches: Vec<CorrelationBatch>,
    pub per_instance: Option<Aggregate>,
    /// Instances whose gain and improvement maximisers differ.
    pub distinct_maximisers: usize,
}

/// Exact gain and Kirchhoff improvement of every admissible chord.
pub fn exact_objectives(spec: &SpectralDecomposition, cycle: &WeightedCycle, w: f64) -> Result<Vec<(Chord, f64, f64)>> {
    let full = CandidateSet::full(cycle);
    crate::pareto::evaluate_objectives(spec, full.iter(), w)
        .map(|pts| pts.into_iter().map(|p| (p.chord, p.raw_d, p.raw_i)).collect())
}

/// Correlation of the two exact objectives, per instance and per batch.
pub fn run_correlation_campaign(cfg: &CampaignConfig) -> Result<(Vec<CorrelationRow>, CorrelationSummary)> {
    expect_mode(cfg, CampaignMode::Correlation)?;
    let batch_of = |t: usize| t * cfg.batches / cfg.trials;
    let per_trial = run_trials(cfg, |t| {
        let inst = instance(cfg, t)?;
        let obj = exact_objectives(&inst.spec, &inst.cycle, inst.w)?;
        let d: Vec<f64> = obj.iter().map(|o| o.1).collect();
        let i: Vec<f64> = obj.iter().map(|o| o.2).collect();
        let argmax = |k: usize| {
            obj.iter()
                .fold(None::<&(Chord, f64, f64)>, |best, o| {
                    let v = if k == 0 { o.1 } else { o.2 };
                    match best {
                        Some(b) if (if k == 0 { b.1 } else { b.2 }) >= v => best,
                        _ => Some(o),
                    }
                })
                .map(|o| o.0)
                .expect("at least one admissible chord")
        };
        let (g, k) = (argmax(0), argmax(1));
        let row = CorrelationRow {
            trial: t,
            seed: inst.seed,
            batch: batch_of(t),
            pearson_r: pearson(&d, &i),
            argmax_gain_p: g.p,
            argmax_gain_q: g.q,
            argmax_improvement_p: k.p,
            argmax_improvement_q: k.q,
        };
        Ok((row, d, i))
    })?;

    let mut batches = Vec::with_capacity(cfg.batches);
    for b in 0..cfg.batches {
        let members: Vec<&(CorrelationRow, Vec<f64>, Vec<f64>)> = per_trial.iter().filter(|x| x.0.batch == b).collect();
        let defined: Vec<_> = members.iter().filter(|x| x.0.pearson_r.is_some()).collect();
        let rs: Vec<f64> = defined.iter().filter_map(|x| x.0.pearson_r).collect();
        let scaled = |v: &[f64]| {
            let top = v.iter().copied().fold(0.0, f64::max);
            v.iter().map(|x| x / top).collect::<Vec<f64>>()
        };
        let norm_d: Vec<f64> = defined.iter().flat_map(|x| scaled(&x.1)).collect();
        let norm_i: Vec<f64> = defined.iter().flat_map(|x| scaled(&x.2)).collect();
        let raw_d: Vec<f64> = defined.iter().flat_map(|x| x.1.iter().copied()).collect();
        let raw_i: Vec<f64> = defined.iter().flat_map(|x| x.2.iter().copied()).collect();
        batches.push(CorrelationBatch {
            batch: b,
            r: pearson(&norm_d, &norm_i),
            mean_instance_r: Aggregate::of(&rs).map(|a| a.mean),
            pooled_raw_r: pearson(&raw_d, &raw_i),
            undefined: members.len() - rs.len(),
        });
    }
    let rows: Vec<CorrelationRow> = per_trial.into_iter().map(|x| x.0).collect();
    let all: Vec<f64> = rows.iter().filter_map(|r| r.pearson_r).collect();
    let distinct_maximisers = rows
        .iter()
        .filter(|r| (r.argmax_gain_p, r.argmax_gain_q) != (r.argmax_improvement_p, r.argmax_improvement_q))
        .count();
    Ok((rows, CorrelationSummary { batches, per_instance: Aggregate::of(&all), distinct_maximisers }))
}

/// One row of `trials.csv` in Pareto mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoRow {
    pub trial: usize,
    pub seed: u64,
    pub coverage: Option<f64>,
    pub front_coverage: Option<f64>,
    pub eps_plus: f64,
    pub hv_ratio: Option<f64>,
    pub candidate_ratio: f64,
    pub candidates: usize,
    pub full_front_size: usize,
    pub screened_front_size: usize,
    pub knee_captured: Option<bool>,
    /// Zero `Δ*` or `I*`: knee and hypervolume are undefined.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoSummary {
    pub coverage: Option<Aggregate>,
    pub eps_plus: Option<Aggregate>,
    pub hv_ratio: Option<Aggregate>,
    pub candidate_ratio: Option<Aggregate>,
    pub full_front_size: Option<Aggregate>,
    pub screened_front_size: Option<Aggregate>,
    pub fraction_full_coverage: f64,
    pub fraction_hv_at_least_099: f64,
    pub fraction_eps_at_most_001: f64,
    pub knee_capture_fraction: Option<f64>,
    /// Trials excluded from the hypervolume and knee aggregates.
    pub degenerate_trials: usize,
}

/// Pareto front of one campaign trial, as written to `front_<seed>.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFront {
    pub trial: usize,
    pub seed: u64,
    pub report: crate::pareto::ParetoReport,
}

/// AW-RBAPS screened fronts against exhaustive fronts.
pub fn run_pareto_campaign(cfg: &CampaignConfig) -> Result<(Vec<ParetoRow>, ParetoSummary, Vec<TrialFront>)> {
    run_pareto_campaign_with(cfg, |cycle| screen(cycle, cfg.tau))
}

/// As [`run_pareto_campaign`] with a caller-supplied screening rule.
pub fn run_pareto_campaign_with<F>(
    cfg: &CampaignConfig,
    screener: F,
) -> Result<(Vec<ParetoRow>, ParetoSummary, Vec<TrialFront>)>
where
    F: Fn(&WeightedCycle) -> Result<CandidateSet> + Sync + Send,
{
    expect_mode(cfg, CampaignMode::Pareto)?;
    let per_trial = run_trials(cfg, |t| {
        let inst = instance(cfg, t)?;
        let full = CandidateSet::full(&inst.cycle);
        let screened = screener(&inst.cycle)?;
        let a = ParetoAnalysis::run(&inst.spec, &full, &screened, inst.w)?;
        let row = ParetoRow {
            trial: t,
            seed: inst.seed,
            coverage: a.coverage,
            front_coverage: a.front_coverage,
            eps_plus: a.eps_plus,
            hv_ratio: a.hv_ratio,
            candidate_ratio: a.candidate_ratio,
            candidates: screened.len(),
            full_front_size: a.full_front.len(),
            screened_front_size: a.screened_front.len(),
            knee_captured: a.knee_captured,
            degenerate: !a.normalizers.is_valid(),
        };
        let front = cfg.write_fronts.then(|| TrialFront { trial: t, seed: inst.seed, report: a.report() });
        Ok((row, front))
    })?;
    let (rows, fronts): (Vec<ParetoRow>, Vec<Option<TrialFront>>) = per_trial.into_iter().unzip();
    let fronts: Vec<TrialFront> = fronts.into_iter().flatten().collect();

    let collect = |f: &dyn Fn(&ParetoRow) -> Option<f64>| -> Vec<f64> { rows.iter().filter_map(f).collect() };
    let cov = collect(&|r| r.coverage);
    let eps: Vec<f64> = collect(&|r| Some(r.eps_plus).filter(|e| e.is_finite()));
    let hv = collect(&|r| if r.degenerate { None } else { r.hv_ratio });
    let knees: Vec<bool> = rows.iter().filter(|r| !r.degenerate).filter_map(|r| r.knee_captured).collect();
    let frac = |k: usize, total: usize| if total == 0 { 0.0 } else { k as f64 / total as f64 };
    let summary = ParetoSummary {
        coverage: Aggregate::of(&cov),
        eps_plus: Aggregate::of(&eps),
        hv_ratio: Aggregate::of(&hv),
        candidate_ratio: Aggregate::of(&collect(&|r| Some(r.candidate_ratio))),
        full_front_size: Aggregate::of(&collect(&|r| Some(r.full_front_size as f64))),
        screened_front_size: Aggregate::of(&collect(&|r| Some(r.screened_front_size as f64))),
        fraction_full_coverage: frac(cov.iter().filter(|&&c| c == 1.0).count(), rows.len()),
        fraction_hv_at_least_099: frac(hv.iter().filter(|&&h| h >= 0.99).count(), hv.len()),
        fraction_eps_at_most_001: frac(rows.iter().filter(|r| r.eps_plus <= 1e-2).count(), rows.len()),
        knee_capture_fraction: (!knees.is_empty()).then(|| frac(knees.iter().filter(|&&k| k).count(), knees.len())),
        degenerate_trials: rows.iter().filter(|r| r.degenerate).count(),
    };
    Ok((rows, summary, fronts))
}

/// `summary.json`: the aggregates plus run metadata kept apart from results.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryFile<'a, S: Serialize> {
    pub config: &'a CampaignConfig,
    pub summary: S,
    pub meta: Meta,
}

/// Run metadata. It holds no timestamps or worker counts, so reruns compare equal.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed_scheme: &'static str,
}

impl Default for Meta {
    fn default() -> Self {
        Meta {
            tool: "ring-chord",
            version: env!("CARGO_PKG_VERSION"),
            seed_scheme: "trial t uses ChaCha8 seeded with splitmix64(master_seed, t)",
        }
    }
}

/// Runs the campaign selected by `cfg.mode` and writes `trials.csv`,
/// `summary.json` and, if requested, `front_<seed>.json` into `out`.
pub fn run_campaign_to_dir(cfg: &CampaignConfig, out: &Path) -> Result<()> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    match cfg.mode {
        CampaignMode::GainScreening => {
            let (rows, summary) = run_gain_campaign(cfg)?;
            write_csv(&out.join("trials.csv"), &rows)?;
            write_json(&out.join("summary.json"), &SummaryFile { config: cfg, summary, meta: Meta::default() })?;
        }
        CampaignMode::Correlation => {
            let (rows, summary) = run_correlation_campaign(cfg)?;
            write_csv(&out.join("trials.csv"), &rows)?;
            write_json(&out.join("summary.json"), &SummaryFile { config: cfg, summary, meta: Meta::default() })?;
        }
        CampaignMode::Pareto => {
            let (rows, summary, fronts) = run_pareto_campaign(cfg)?;
            write_csv(&out.join("trials.csv"), &rows)?;
            write_json(&out.join("summary.json"), &SummaryFile { config: cfg, summary, meta: Meta::default() })?;
            for f in &fronts {
                write_json(&out.join(format!("front_{}.json", f.seed)), f)?;
            }
        }
    }
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: CampaignMode) -> CampaignConfig {
        let mut c = CampaignConfig::default_setting(mode, 4, 11);
        c.n = 24;
        c
    }

    #[test]
    fn instance_generation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = generate_instance(6, 1.0, 1.0, &mut rng).unwrap();
        assert_eq!(u.conductances(), &[1.0; 6]);
        assert!(generate_instance(6, 2.0, 1.0, &mut rng).is_err());
        assert!(generate_instance(6, 0.0, 1.0, &mut rng).is_err());
        let a = generate_instance(9, 1.0, 100.0, &mut ChaCha8Rng::seed_from_u64(substream_seed(5, 3))).unwrap();
        let b = generate_instance(9, 1.0, 100.0, &mut ChaCha8Rng::seed_from_u64(substream_seed(5, 3))).unwrap();
        assert_eq!(a, b);
        assert!(a.conductances().iter().all(|&c| (1.0..=100.0).contains(&c)));
    }

    #[test]
    fn config_json_round_trip_and_rules() {
        let json = r#"{"n":30,"conductance_lo":1,"conductance_hi":100,"budget_rule":{"fixed":50},
                       "trials":3,"master_seed":7,"mode":"pareto"}"#;
        let cfg: CampaignConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.budget_rule, BudgetRule::Fixed(50.0));
        assert_eq!(cfg.tau, DEFAULT_TAU);
        assert_eq!(cfg.strategies.len(), 4);
        cfg.validate().unwrap();
        let back: CampaignConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<CampaignConfig>(r#"{"n":30,"bogus":1}"#).is_err());
        let mut no_seed = cfg.clone();
        no_seed.master_seed = None;
        assert!(no_seed.validate().is_err());
    }

    #[test]
    fn full_strategy_is_normalised_to_one() {
        let mut cfg = small(CampaignMode::GainScreening);
        cfg.strategies.push(Strategy::Full);
        let (rows, summary) = run_gain_campaign(&cfg).unwrap();
        assert_eq!(rows.len(), 4 * 5);
        for r in rows.iter().filter(|r| r.strategy == Strategy::Full) {
            assert_eq!(r.theta_hat, Some(1.0));
        }
        for r in &rows {
            let t = r.theta_hat.unwrap();
            assert!((0.0..=1.0).contains(&t));
        }
        assert_eq!(summary.strategies.len(), 5);
    }

    #[test]
    fn wrong_mode_rejected() {
        assert!(run_gain_campaign(&small(CampaignMode::Pareto)).is_err());
    }

    #[test]
    fn pareto_with_full_screen_is_exact() {
        let cfg = small(CampaignMode::Pareto);
        let (rows, summary, _) = run_pareto_campaign_with(&cfg, |c| Ok(CandidateSet::full(c))).unwrap();
        for r in &rows {
            assert_eq!(r.coverage, Some(1.0));
            assert_eq!(r.eps_plus, 0.0);
            assert_eq!(r.hv_ratio, Some(1.0));
            assert_eq!(r.candidate_ratio, 1.0);
        }
        assert_eq!(summary.fraction_full_coverage, 1.0);
    }

    #[test]
    fn aggregate_statistics() {
        let a = Aggregate::of(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(a.median, 2.5);
        assert_eq!(a.mean, 2.5);
        assert_eq!((a.min, a.max), (1.0, 4.0));
        assert!(Aggregate::of(&[]).is_none());
    }
}
