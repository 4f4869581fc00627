//! `ring-chord`: command-line front end for single-chord augmentation of
//! weighted cycles.
//!
//! Exit codes: 0 on success, 1 for invalid input (bad flags, malformed or
//! invalid JSON, inadmissible chords), 2 when a numerical computation fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::json;

use ring_chord::chord::{ceiling_deficit_report, score, ChordCandidate};
use ring_chord::consensus::{
    coherence_prediction, estimate_coherence, estimate_pair_variance, pair_variance_prediction, simulate,
    GraphLaplacian, Integrator, SimConfig,
};
use ring_chord::experiments::{generate_instance, run_campaign_to_dir, CampaignConfig};
use ring_chord::pareto::ParetoAnalysis;
use ring_chord::screening::{screen, CandidateSet, DEFAULT_MODES, DEFAULT_TAU};
use ring_chord::{Chord, Error, SpectralDecomposition, WeightedCycle};

const SCORE_FIELDS: &str = "\
Output fields:
  delta_exact         λ1(L + w b bᵀ) − λ1(L), smallest root of 1 + w Σ β_k²/(λ_k − μ) = 0, β_k = u_k,p − u_k,q
  delta_lowfreq       the same root using only modes 1..m
  improvement         K_f(L) − K_f(L + w b bᵀ) = w n Q / (1 + w R), Q = bᵀ(L†)²b
  r_endpoint          R_pq = bᵀ L† b = d(p,q) d(q,p) / S
  r_endpoint_updated  R_pq / (1 + w R_pq)";

const PARETO_FIELDS: &str = "\
Output fields (nI = I/I*, nD = Δ/Δ*, with I* and Δ* the exhaustive optima):
  front            nondominated screened chords, descending nD
  full_front       nondominated admissible chords
  knee             full-front chord minimising √((1 − nI)² + (1 − nD)²)
  hv_ratio         area dominated by the screened front / area dominated by the full front, reference (0,0)
  eps_plus         max over full-front e of min over screened-front e' of max(nI_e − nI_e', nD_e − nD_e', 0)
  coverage         |full front ∩ screened set| / |full front|
  front_coverage   |full front ∩ screened front| / |full front|
  candidate_ratio  |screened set| / (n(n − 3)/2)";

const SIMULATE_FIELDS: &str = "\
Output fields:
  H_hat, stderr        tail-window mean of (1/n) Σ_i (ξ_i − mean ξ)² and its standard error across paths
  predictions.H        σ² K_f / (2 n²)
  pair_hat             tail-window mean of (ξ_p − ξ_q)² for the chord endpoints (or --pair)
  predictions.pair     σ² R_pq / 2 on the simulated graph";

const DIAGNOSE_FIELDS: &str = "\
Output fields:
  discrepancy     D = max |s_{p+ℓ} − s_p − ℓS/n|, Δ = D/S, η = max r_i / S, δ_n = Δ + η
  spectrum_head   λ_0..λ_{k−1}
  fiedler_fit     sup-norm distance of u_1 (u_2) from ±√(2/n) sin (cos) of 2π s_i/S + φ
  ceiling_deficit γ = λ2 − λ1, deficit γ − Δ, ε = β2²/β1², ρ0 = λ2/λ3,
                  dominance test γ(1/w + Σ_{k≥3} β_k²/λ_k / (1 − ρ0)) ≤ θ0 β1², bound γε/(1 − θ0)";

#[derive(Parser)]
#[command(name = "ring-chord", version, about = "Single-chord augmentation of weighted cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a cycle with i.i.d. uniform conductances and print it as JSON.
    Gen(GenArgs),
    /// Score one chord: exact and low-frequency λ1 gain, Kirchhoff improvement, endpoint resistance.
    #[command(after_help = SCORE_FIELDS)]
    Score(ScoreArgs),
    /// Print the resistance-balanced candidate set (RBAPS for tau = 0, AW-RBAPS otherwise).
    Screen(ScreenArgs),
    /// Compare the screened Pareto front against the exhaustive one.
    #[command(after_help = PARETO_FIELDS)]
    Pareto(ParetoArgs),
    /// Simulate noisy consensus and compare with the resistance predictions.
    #[command(after_help = SIMULATE_FIELDS)]
    Simulate(SimulateArgs),
    /// Run a seeded Monte Carlo campaign and write trials.csv and summary.json.
    Campaign(CampaignArgs),
    /// Discrepancy, spectrum, sinusoid-fit residuals and ceiling-deficit report.
    #[command(after_help = DIAGNOSE_FIELDS)]
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    lo: f64,
    #[arg(long)]
    hi: f64,
    /// Random seed; drawn from the OS and echoed on stderr when absent.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Cycle JSON: {"n": .., "conductances": [..]}.
    #[arg(long)]
    input: PathBuf,
    /// Chord endpoints as p,q.
    #[arg(long)]
    chord: String,
    /// Chord conductance.
    #[arg(long)]
    w: f64,
    /// Number of low-frequency modes [default: 12, capped at n - 1].
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct ScreenArgs {
    #[arg(long)]
    input: PathBuf,
    /// Window tolerance; 0 gives RBAPS.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
}

#[derive(Args)]
struct ParetoArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    /// Chord conductance; defaults to the largest cycle conductance.
    #[arg(long)]
    w: Option<f64>,
    /// Also write every evaluated chord to this CSV file.
    #[arg(long)]
    points_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Optional chord as p,q,w.
    #[arg(long)]
    chord: Option<String>,
    /// Pair whose difference variance is reported, as i,j; defaults to the chord endpoints.
    #[arg(long)]
    pair: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Step size; defaults to min(1e-3, 0.5/λ_max).
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 32)]
    paths: usize,
    /// Total time; defaults to 200/λ1 (burn-in 10/λ1 included).
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Snapshot spacing; defaults to 0.1/λ1.
    #[arg(long)]
    record_interval: Option<f64>,
    /// Use exact Ornstein–Uhlenbeck transitions instead of Euler–Maruyama.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct CampaignArgs {
    /// Campaign JSON mirroring the configuration fields.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Master seed; overrides master_seed in the config. One of the two is required.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    chord: String,
    #[arg(long)]
    w: f64,
    /// Dominance margin θ0 in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    theta0: f64,
    /// Number of leading eigenvalues printed.
    #[arg(long, default_value_t = 8)]
    head: usize,
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_input_error() { 1 } else { 2 }, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Score(a) => cmd_score(a),
        Command::Screen(a) => cmd_screen(a),
        Command::Pareto(a) => cmd_pareto(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    }
}

fn print_json<T: Serialize + ?Sized>(value: &T) -> CliResult<()> {
    let s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{s}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Failure { code: 2, message: format!("cannot write output: {e}") })
        }
        _ => Ok(()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn parse_list(s: &str, what: &str, len: usize) -> CliResult<Vec<String>> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    if parts.len() != len {
        return Err(input_error(format!("{what} must have {len} comma-separated parts, got {s:?}")));
    }
    Ok(parts)
}

fn parse_index(s: &str) -> CliResult<usize> {
    s.parse().map_err(|_| input_error(format!("{s:?} is not a vertex index")))
}

fn parse_chord(s: &str) -> CliResult<Chord> {
    let parts = parse_list(s, "chord", 2)?;
    Ok(Chord::new(parse_index(&parts[0])?, parse_index(&parts[1])?)?)
}

fn admissible(cycle: &WeightedCycle, chord: Chord) -> CliResult<Chord> {
    cycle.check_admissible(chord)?;
    Ok(chord)
}

fn gen(a: GenArgs) -> CliResult<()> {
    let seed = match a.seed {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            eprintln!("seed: {s}");
            s
        }
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    print_json(&generate_instance(a.n, a.lo, a.hi, &mut rng)?)
}

fn cmd_score(a: ScoreArgs) -> CliResult<()> {
    let cycle: WeightedCycle = read_json(&a.input)?;
    let chord = admissible(&cycle, parse_chord(&a.chord)?)?;
    let m = a.m.unwrap_or(DEFAULT_MODES.min(cycle.n() - 1));
    if m == 0 || m >= cycle.n() {
        return Err(input_error(format!("m must lie in 1..={}", cycle.n() - 1)));
    }
    let spec = SpectralDecomposition::of_cycle(&cycle)?;
    print_json(&score(&spec, &ChordCandidate::new(chord, a.w)?, m)?)
}

fn cmd_screen(a: ScreenArgs) -> CliResult<()> {
    let cycle: WeightedCycle = read_json(&a.input)?;
    if !(0.0..1.0).contains(&a.tau) {
        return Err(input_error(format!("tau must lie in [0, 1), got {}", a.tau)));
    }
    let set = screen(&cycle, a.tau)?;
    let pairs: Vec<[usize; 2]> = set.iter().map(|c| [c.p, c.q]).collect();
    print_json(&json!({
        "source": set.source,
        "tau": a.tau,
        "count": set.len(),
        "admissible": cycle.n() * (cycle.n() - 3) / 2,
        "pairs": pairs,
    }))
}

fn cmd_pareto(a: ParetoArgs) -> CliResult<()> {
    let cycle: WeightedCycle = read_json(&a.input)?;
    if !(0.0..1.0).contains(&a.tau) {
        return Err(input_error(format!("tau must lie in [0, 1), got {}", a.tau)));
    }
    let w = a.w.unwrap_or_else(|| cycle.max_conductance());
    let spec = SpectralDecomposition::of_cycle(&cycle)?;
    let analysis = ParetoAnalysis::run(&spec, &CandidateSet::full(&cycle), &screen(&cycle, a.tau)?, w)?;
    if let Some(path) = &a.points_csv {
        write_points(path, &analysis).map_err(Failure::from)?;
    }
    print_json(&analysis.report())
}

fn write_points(path: &Path, a: &ParetoAnalysis) -> ring_chord::Result<()> {
    #[derive(Serialize)]
    struct Row {
        p: usize,
        q: usize,
        improvement: f64,
        gain: f64,
        n_i: f64,
        n_d: f64,
        on_full_front: bool,
        on_screened_front: bool,
    }
    let full = a.full_front.chords();
    let screened = a.screened_front.chords();
    let mut w = csv::Writer::from_path(path).map_err(Error::from)?;
    for p in &a.points {
        w.serialize(Row {
            p: p.chord.p,
            q: p.chord.q,
            improvement: p.raw_i,
            gain: p.raw_d,
            n_i: p.norm_i,
            n_d: p.norm_d,
            on_full_front: full.contains(&p.chord),
            on_screened_front: screened.contains(&p.chord),
        })
        .map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let cycle: WeightedCycle = read_json(&a.input)?;
    let chord = match &a.chord {
        Some(s) => {
            let parts = parse_list(s, "chord", 3)?;
            let c = admissible(&cycle, Chord::new(parse_index(&parts[0])?, parse_index(&parts[1])?)?)?;
            let w: f64 = parts[2].parse().map_err(|_| input_error(format!("{:?} is not a conductance", parts[2])))?;
            Some(ChordCandidate::new(c, w)?)
        }
        None => None,
    };
    let pair = match (&a.pair, &chord) {
        (Some(s), _) => {
            let parts = parse_list(s, "pair", 2)?;
            Some(Chord::new(parse_index(&parts[0])?, parse_index(&parts[1])?)?)
        }
        (None, Some(c)) => Some(c.chord),
        (None, None) => None,
    };
    if let Some(p) = pair {
        if p.q >= cycle.n() {
            return Err(input_error(format!("pair {{{p}}} is out of range for n = {}", cycle.n())));
        }
    }
    let lap = GraphLaplacian::from_cycle(&cycle, chord.as_ref())?;
    let spec = SpectralDecomposition::from_laplacian(&lap.dense())?;
    let (l1, lmax) = (spec.lambda1(), spec.lambda_max());
    let dt = a.dt.unwrap_or_else(|| 1e-3_f64.min(0.5 / lmax));
    let cfg = SimConfig {
        sigma: a.sigma,
        dt,
        horizon: a.horizon.unwrap_or(200.0 / l1),
        n_paths: a.paths,
        seed: a.seed,
        record_interval: a.record_interval.unwrap_or(0.1 / l1).max(dt),
        burn_in: None,
    };
    let integrator = if a.exact { Integrator::ExactOu } else { Integrator::EulerMaruyama };
    let ens = simulate(&lap, &cfg, integrator, None)?;
    let h = estimate_coherence(&ens)?;
    let pair_hat = pair.map(|p| estimate_pair_variance(&ens, p.p, p.q)).transpose()?;
    print_json(&json!({
        "H_hat": h.value,
        "stderr": h.stderr,
        "pair": pair.map(|p| [p.p, p.q]),
        "pair_hat": pair_hat.map(|e| e.value),
        "pair_stderr": pair_hat.map(|e| e.stderr),
        "predictions": {
            "H": coherence_prediction(&spec, a.sigma),
            "pair": pair.map(|p| pair_variance_prediction(&spec, a.sigma, p.p, p.q)),
        },
        "config": cfg,
        "integrator": integrator,
        "tail_snapshots": h.tail_snapshots,
        "wide_interval": h.wide_interval,
    }))
}

fn cmd_campaign(a: CampaignArgs) -> CliResult<()> {
    let mut cfg: CampaignConfig = read_json(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.master_seed = Some(seed);
    }
    if cfg.master_seed.is_none() {
        return Err(input_error("campaign needs --seed or master_seed in the config"));
    }
    run_campaign_to_dir(&cfg, &a.out)?;
    eprintln!("wrote {}", a.out.join("summary.json").display());
    Ok(())
}

fn cmd_diagnose(a: DiagnoseArgs) -> CliResult<()> {
    let cycle: WeightedCycle = read_json(&a.input)?;
    let chord = admissible(&cycle, parse_chord(&a.chord)?)?;
    let cand = ChordCandidate::new(chord, a.w)?;
    let spec = SpectralDecomposition::of_cycle(&cycle)?;
    let (deficit, deficit_error) = match ceiling_deficit_report(&spec, &cand, a.theta0) {
        Ok(r) => (Some(r), None),
        Err(e) if e.is_input_error() && spec.is_degenerate() => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    print_json(&json!({
        "discrepancy": cycle.discrepancy(),
        "spectrum_head": spec.spectrum_head(a.head),
        "fiedler_fit": spec.fiedler_mode_fit(&cycle)?,
        "ceiling_deficit": deficit,
        "ceiling_deficit_error": deficit_error,
    }))
}
