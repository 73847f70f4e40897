//! `ohg` — batch driver for Orlicz-space experiments on discrete
//! hypergroups.
//!
//! Every subcommand reads an optional JSON config (`--config`), merges
//! a few scalar flag overrides on top, runs one experiment and writes
//! its report under `--out`: a JSON envelope (also echoed to stdout)
//! and, where the result is a table, a CSV next to it. Reports are
//! byte-stable: rerunning with the same config reproduces them
//! exactly.
//!
//! Exit codes: 0 when the run's checks all passed, 1 when a report was
//! produced but a check failed (axiom violation, witness failure, Δ₂
//! refutation, Hölder slack exceeded, periodicity), 2 on errors, with
//! a machine-readable code in a JSON envelope on stderr.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use orlicz_hypergroup::counterexample::{
    self, BuildOptions, CounterexampleInstance, DivergenceRow,
};
use orlicz_hypergroup::hypergroup::{self, Aperiodicity, ValidationReport};
use orlicz_hypergroup::operators::{self, VanishVerdict};
use orlicz_hypergroup::orlicz::{self, NormKind};
use orlicz_hypergroup::schema::{
    self, fmt_f64, CexSummary, Envelope, ErrorEnvelope, ExperimentConfig, FunctionSpec,
    HypergroupSpec, WeightSpec, YoungSpec,
};
use orlicz_hypergroup::young::{
    self, Delta2Verdict, SearchParams, SeqBudgets, SeqVerdict, SequenceRule, SequenceWitness,
    SlopeReport, TailBoundMethod,
};
use orlicz_hypergroup::{DiscreteHypergroup, Error, Point, Result, Window, YoungFunction};

#[derive(Parser)]
#[command(
    name = "ohg",
    version,
    about = "Orlicz-space experiments on discrete hypergroups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config; flags override its scalar fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for report files.
    #[arg(long, global = true, default_value = "reports")]
    out: PathBuf,

    /// Tolerance override (Hölder slack, table tolerance).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Window radius for built-in carriers and probe sets.
    #[arg(long, global = true)]
    window: Option<i64>,

    /// Truncation / series horizon override.
    #[arg(long, global = true)]
    horizon: Option<u64>,

    /// Seed override for `random` function specs.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Young-function calculus.
    #[command(subcommand)]
    Young(YoungCmd),
    /// Hypergroup validation and structure queries.
    #[command(subcommand)]
    Hyper(HyperCmd),
    /// Modulars and norms of configured functions.
    #[command(subcommand)]
    Norm(NormCmd),
    /// The divergent-convolution counterexample.
    #[command(subcommand)]
    Cex(CexCmd),
    /// Compactness criterion for convolution operators.
    #[command(subcommand)]
    Opcrit(OpcritCmd),
}

#[derive(Subcommand)]
enum YoungCmd {
    /// Evaluate Φ(x).
    Eval {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long)]
        x: f64,
    },
    /// Evaluate the convex conjugate Ψ(x) numerically.
    Conjugate {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long)]
        x: f64,
    },
    /// Probe the Δ₂ condition.
    Delta2 {
        #[command(flatten)]
        phi: PhiArgs,
        /// Left edge of the "eventually" range.
        #[arg(long, default_value_t = 1e-8)]
        t0: f64,
    },
    /// Check the sequence condition for a pair (Φ₁, Φ₂).
    Seqcond {
        /// Exponent p of Φ₁ = |x|^p (ln(1+|x|))^γ.
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        gamma1: f64,
        #[arg(long)]
        p2: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        gamma2: f64,
        /// Witness sequences: `invsqrt` or `power:S` for α=β=n^{−S}.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Estimate the small-x slope lim Φ(x)/x.
    Slope {
        #[command(flatten)]
        phi: PhiArgs,
    },
}

#[derive(Subcommand)]
enum HyperCmd {
    /// Run the six axiom checks over the core window.
    Validate {
        /// `integers`, `cyclic:M` or `chebyshev`; omit to use the config.
        carrier: Option<String>,
    },
    /// Enumerate the center within the core window.
    Center { carrier: Option<String> },
    /// Scan for the separation index of a center element.
    Aperiodic {
        carrier: Option<String>,
        /// Candidate aperiodic element.
        #[arg(long)]
        a: Point,
        #[arg(long)]
        scan_bound: Option<u64>,
    },
}

#[derive(Subcommand)]
enum NormCmd {
    /// Modular ρ_Φ(f) in the weighted space.
    Modular,
    /// Luxemburg gauge norm.
    Luxemburg,
    /// Orlicz (dual) norm via the Amemiya formula.
    Orlicz,
    /// Hölder pairing Σ|fg|h against the bound 2‖f‖_Φ,w ‖g‖_Ψ,1/w.
    Holder,
}

#[derive(Subcommand)]
enum CexCmd {
    /// Construct the instance and report its certificates.
    Build,
    /// Build, then tabulate (f_M∗g_M)(x) against the proof's lower bound.
    Diverge,
}

#[derive(Subcommand)]
enum OpcritCmd {
    /// Profile F_g over the enumeration schedule and judge the tail.
    Profile {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum)]
        norm_kind: Option<NormKindArg>,
    },
    /// Finite-rank approximation gap outside a window of radius R.
    Gap {
        #[arg(long)]
        f_window: i64,
        #[arg(long, value_enum)]
        norm_kind: Option<NormKindArg>,
    },
}

/// Inline Young-function source; falls back to the config's `phi1`.
#[derive(Args)]
struct PhiArgs {
    /// Exponent p of Φ = |x|^p (ln(1+|x|))^γ.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Expression in x, e.g. "x^4 / (1 + x^2)".
    #[arg(long, conflicts_with_all = ["p", "gamma"])]
    expr: Option<String>,
}

impl PhiArgs {
    fn resolve(&self, fallback: &Option<YoungSpec>) -> Result<YoungFunction> {
        if let Some(expr) = &self.expr {
            return YoungFunction::custom(expr);
        }
        match self.p {
            Some(p) if self.gamma == 0.0 => YoungFunction::power(p),
            Some(p) => YoungFunction::power_log(p, self.gamma),
            None => schema::require(fallback, "phi1")?.build(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKindArg {
    Luxemburg,
    Amemiya,
}

impl From<NormKindArg> for NormKind {
    fn from(kind: NormKindArg) -> Self {
        match kind {
            NormKindArg::Luxemburg => NormKind::Luxemburg,
            NormKindArg::Amemiya => NormKind::Amemiya,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let label = command_label(&cli.command);
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let envelope = ErrorEnvelope::new(label, &err);
            match envelope.to_json_line() {
                Ok(line) => eprint!("{line}"),
                Err(_) => eprintln!("{{\"error_code\":\"{}\"}}", err.code()),
            }
            ExitCode::from(2)
        }
    }
}

fn command_label(command: &Command) -> &'static str {
    match command {
        Command::Young(YoungCmd::Eval { .. }) => "young eval",
        Command::Young(YoungCmd::Conjugate { .. }) => "young conjugate",
        Command::Young(YoungCmd::Delta2 { .. }) => "young delta2",
        Command::Young(YoungCmd::Seqcond { .. }) => "young seqcond",
        Command::Young(YoungCmd::Slope { .. }) => "young slope",
        Command::Hyper(HyperCmd::Validate { .. }) => "hyper validate",
        Command::Hyper(HyperCmd::Center { .. }) => "hyper center",
        Command::Hyper(HyperCmd::Aperiodic { .. }) => "hyper aperiodic",
        Command::Norm(NormCmd::Modular) => "norm modular",
        Command::Norm(NormCmd::Luxemburg) => "norm luxemburg",
        Command::Norm(NormCmd::Orlicz) => "norm orlicz",
        Command::Norm(NormCmd::Holder) => "norm holder",
        Command::Cex(CexCmd::Build) => "cex build",
        Command::Cex(CexCmd::Diverge) => "cex diverge",
        Command::Opcrit(OpcritCmd::Profile { .. }) => "opcrit profile",
        Command::Opcrit(OpcritCmd::Gap { .. }) => "opcrit gap",
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let config = effective_config(cli)?;
    match &cli.command {
        Command::Young(cmd) => run_young(cli, &config, cmd),
        Command::Hyper(cmd) => run_hyper(cli, &config, cmd),
        Command::Norm(cmd) => run_norm(cli, &config, cmd),
        Command::Cex(cmd) => run_cex(cli, &config, cmd),
        Command::Opcrit(cmd) => run_opcrit(cli, &config, cmd),
    }
}

/// Config file (or the documented default for `cex`) with flag
/// overrides folded in.
fn effective_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
        None => match cli.command {
            Command::Cex(_) => ExperimentConfig::default_cex(),
            _ => ExperimentConfig::default(),
        },
    };
    if let Some(horizon) = cli.horizon {
        config.horizon = Some(horizon);
    }
    if let Some(tol) = cli.tol {
        config.tol = Some(tol);
    }
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(seed) = config.seed {
        apply_seed(&mut config.f, seed);
        apply_seed(&mut config.g, seed);
    }
    Ok(config)
}

fn apply_seed(spec: &mut Option<FunctionSpec>, new_seed: u64) {
    if let Some(FunctionSpec::Random { seed, .. }) = spec {
        *seed = new_seed;
    }
}

// --- young ------------------------------------------------------------

#[derive(Serialize)]
struct EvalReport {
    family: String,
    x: f64,
    value: f64,
}

#[derive(Serialize)]
struct Delta2Report {
    family: String,
    t0: f64,
    in_delta2: bool,
    verdict: Delta2Verdict,
}

#[derive(Serialize)]
struct SeqcondEnvelope {
    phi1: String,
    phi2: String,
    witness: SequenceWitness,
    report: young::SeqConditionReport,
}

#[derive(Serialize)]
struct SlopeEnvelope {
    family: String,
    report: SlopeReport,
}

fn run_young(cli: &Cli, config: &ExperimentConfig, cmd: &YoungCmd) -> Result<bool> {
    match cmd {
        YoungCmd::Eval { phi, x } => {
            let phi = phi.resolve(&config.phi1)?;
            let report = EvalReport {
                family: phi.family().to_string(),
                x: *x,
                value: phi.eval(*x)?,
            };
            write_json(&cli.out, "young_eval", "young eval", &report)?;
            Ok(true)
        }
        YoungCmd::Conjugate { phi, x } => {
            let phi = phi.resolve(&config.phi1)?;
            let report = EvalReport {
                family: phi.family().to_string(),
                x: *x,
                value: young::complementary(&phi, *x, &SearchParams::default())?,
            };
            write_json(&cli.out, "young_conjugate", "young conjugate", &report)?;
            Ok(true)
        }
        YoungCmd::Delta2 { phi, t0 } => {
            let phi = phi.resolve(&config.phi1)?;
            let verdict = young::is_delta2(&phi, *t0, &SearchParams::delta2_default())?;
            let in_delta2 = matches!(verdict, Delta2Verdict::Certificate { .. });
            let report = Delta2Report {
                family: phi.family().to_string(),
                t0: *t0,
                in_delta2,
                verdict,
            };
            write_json(&cli.out, "young_delta2", "young delta2", &report)?;
            Ok(in_delta2)
        }
        YoungCmd::Seqcond {
            p1,
            gamma1,
            p2,
            gamma2,
            witness,
        } => {
            let phi1 = inline_or_config(*p1, *gamma1, &config.phi1, "phi1")?;
            let phi2 = inline_or_config(*p2, *gamma2, &config.phi2, "phi2")?;
            let witness = match witness {
                Some(name) => witness_from_str(name)?,
                None => config.witness.unwrap_or_default(),
            };
            let budgets = SeqBudgets {
                horizon: config.horizon.unwrap_or(1_000_000),
                ..SeqBudgets::default()
            };
            let report = young::check_sequence_condition(&phi1, &phi2, &witness, &budgets)?;
            let passed = report.verdict == SeqVerdict::Satisfied;
            let envelope = SeqcondEnvelope {
                phi1: phi1.family().to_string(),
                phi2: phi2.family().to_string(),
                witness,
                report,
            };
            write_json(&cli.out, "young_seqcond", "young seqcond", &envelope)?;
            Ok(passed)
        }
        YoungCmd::Slope { phi } => {
            let phi = phi.resolve(&config.phi1)?;
            let report = young::small_x_slope(&phi, &young::default_eps_grid())?;
            let envelope = SlopeEnvelope {
                family: phi.family().to_string(),
                report,
            };
            write_json(&cli.out, "young_slope", "young slope", &envelope)?;
            Ok(true)
        }
    }
}

fn inline_or_config(
    p: Option<f64>,
    gamma: f64,
    fallback: &Option<YoungSpec>,
    name: &str,
) -> Result<YoungFunction> {
    match p {
        Some(p) if gamma == 0.0 => YoungFunction::power(p),
        Some(p) => YoungFunction::power_log(p, gamma),
        None => schema::require(fallback, name)?.build(),
    }
}

fn witness_from_str(name: &str) -> Result<SequenceWitness> {
    if name == "invsqrt" {
        return Ok(SequenceWitness::inv_sqrt());
    }
    if let Some(rest) = name.strip_prefix("power:") {
        let s: f64 = rest.parse().map_err(|_| Error::Schema {
            detail: format!("bad witness exponent `{rest}`"),
        })?;
        return Ok(SequenceWitness {
            alpha: SequenceRule::InversePower { s },
            beta: SequenceRule::InversePower { s },
            tail_bound_method: TailBoundMethod::IntegralTest,
        });
    }
    Err(Error::Schema {
        detail: format!("unknown witness `{name}` (expected `invsqrt` or `power:S`)"),
    })
}

// --- hyper ------------------------------------------------------------

#[derive(Serialize)]
struct ValidateEnvelope {
    carrier: String,
    report: ValidationReport,
}

#[derive(Serialize)]
struct CenterReport {
    carrier: String,
    window: Window,
    center: Vec<Point>,
}

#[derive(Serialize)]
struct AperiodicReport {
    carrier: String,
    a: Point,
    probe_set: Vec<Point>,
    scan_bound: u64,
    result: Aperiodicity,
}

fn run_hyper(cli: &Cli, config: &ExperimentConfig, cmd: &HyperCmd) -> Result<bool> {
    match cmd {
        HyperCmd::Validate { carrier } => {
            let (label, h) = resolve_hypergroup(carrier, config, cli.window.unwrap_or(20))?;
            let window = clamped_window(&h, carrier.is_none().then_some(cli.window).flatten())?;
            let report = hypergroup::validate_axioms(&h, &window)?;
            let passed = report.all_passed;
            let envelope = ValidateEnvelope {
                carrier: label,
                report,
            };
            write_json(&cli.out, "hyper_validate", "hyper validate", &envelope)?;
            Ok(passed)
        }
        HyperCmd::Center { carrier } => {
            let (label, h) = resolve_hypergroup(carrier, config, cli.window.unwrap_or(20))?;
            let window = clamped_window(&h, carrier.is_none().then_some(cli.window).flatten())?;
            let report = CenterReport {
                carrier: label,
                window,
                center: hypergroup::center(&h, &window)?,
            };
            write_json(&cli.out, "hyper_center", "hyper center", &report)?;
            Ok(true)
        }
        HyperCmd::Aperiodic {
            carrier,
            a,
            scan_bound,
        } => {
            let scan = scan_bound.or(config.scan_bound).unwrap_or(200);
            let probe_radius = cli.window.unwrap_or(3).max(0);
            // The iterated translates aⁿE must stay inside the halo
            // for the whole scan.
            let radius = (a.unsigned_abs() as i64)
                .saturating_mul(scan as i64 + 1)
                .saturating_add(probe_radius + 2);
            let (label, h) = resolve_hypergroup(carrier, config, radius)?;
            let id = h.identity();
            let probe: BTreeSet<Point> = h
                .points_in(
                    id.saturating_sub(probe_radius),
                    id.saturating_add(probe_radius),
                )
                .into_iter()
                .collect();
            let result = hypergroup::is_aperiodic(&h, *a, &probe, scan)?;
            let passed = matches!(result, Aperiodicity::FoundN { .. });
            let report = AperiodicReport {
                carrier: label,
                a: *a,
                probe_set: probe.into_iter().collect(),
                scan_bound: scan,
                result,
            };
            write_json(&cli.out, "hyper_aperiodic", "hyper aperiodic", &report)?;
            Ok(passed)
        }
    }
}

fn resolve_hypergroup(
    carrier: &Option<String>,
    config: &ExperimentConfig,
    radius: i64,
) -> Result<(String, DiscreteHypergroup)> {
    match carrier {
        Some(name) => Ok((name.clone(), built_in_carrier(name, radius)?)),
        None => {
            let spec = schema::require(&config.hypergroup, "hypergroup")?;
            Ok((carrier_label(spec), spec.build()?))
        }
    }
}

fn built_in_carrier(name: &str, radius: i64) -> Result<DiscreteHypergroup> {
    if radius < 0 {
        return Err(Error::Schema {
            detail: format!("window radius must be nonnegative, got {radius}"),
        });
    }
    match name {
        "integers" => Ok(hypergroup::make_integers(Window::symmetric(
            radius, radius,
        )?)),
        "chebyshev" => hypergroup::make_chebyshev(Window::new(0, radius, radius)?),
        _ => match name.strip_prefix("cyclic:") {
            Some(m) => hypergroup::make_cyclic(m.parse().map_err(|_| Error::Schema {
                detail: format!("bad cyclic order `{m}`"),
            })?),
            None => Err(Error::Schema {
                detail: format!(
                    "unknown carrier `{name}` (expected integers, cyclic:M, chebyshev, \
                     or a config with a hypergroup section)"
                ),
            }),
        },
    }
}

fn carrier_label(spec: &HypergroupSpec) -> String {
    match spec {
        HypergroupSpec::Integers { .. } => "integers".into(),
        HypergroupSpec::Cyclic { m } => format!("cyclic:{m}"),
        HypergroupSpec::Chebyshev { .. } => "chebyshev".into(),
        HypergroupSpec::Table { .. } => "table".into(),
    }
}

/// Core window, optionally clamped to radius `r` around the identity
/// (used when the hypergroup came from a config table whose own window
/// is too wide for pairwise sweeps).
fn clamped_window(h: &DiscreteHypergroup, radius: Option<i64>) -> Result<Window> {
    let core = h.window();
    match radius {
        None => Ok(core),
        Some(r) => {
            let id = h.identity();
            Window::new(
                core.lo.max(id.saturating_sub(r)),
                core.hi.min(id.saturating_add(r)),
                core.halo,
            )
        }
    }
}

// --- norm ---------------------------------------------------------------

#[derive(Serialize)]
struct NormReport {
    quantity: String,
    weight: WeightSpec,
    value: f64,
}

#[derive(Serialize)]
struct HolderReport {
    pairing: f64,
    norm_f: f64,
    norm_g: f64,
    bound: f64,
    slack: f64,
    holds: bool,
}

fn run_norm(cli: &Cli, config: &ExperimentConfig, cmd: &NormCmd) -> Result<bool> {
    let h = schema::require(&config.hypergroup, "hypergroup")?.build()?;
    let phi = schema::require(&config.phi1, "phi1")?.build()?;
    let f = schema::require(&config.f, "f")?.build(&h)?;
    let weight_spec = config.weight.clone().unwrap_or(WeightSpec::One);
    let w = weight_spec.build();
    match cmd {
        NormCmd::Modular => {
            let report = NormReport {
                quantity: "modular".into(),
                weight: weight_spec,
                value: orlicz::modular(&phi, &h, &f, &w)?,
            };
            write_json(&cli.out, "norm_modular", "norm modular", &report)?;
            Ok(true)
        }
        NormCmd::Luxemburg => {
            let report = NormReport {
                quantity: "luxemburg".into(),
                weight: weight_spec,
                value: orlicz::luxemburg_norm(&phi, &h, &f, &w)?,
            };
            write_json(&cli.out, "norm_luxemburg", "norm luxemburg", &report)?;
            Ok(true)
        }
        NormCmd::Orlicz => {
            let report = NormReport {
                quantity: "orlicz".into(),
                weight: weight_spec,
                value: orlicz::orlicz_norm(&phi, &h, &f, &w)?,
            };
            write_json(&cli.out, "norm_orlicz", "norm orlicz", &report)?;
            Ok(true)
        }
        NormCmd::Holder => {
            let psi = schema::require(&config.phi2, "phi2")?.build()?;
            let g = schema::require(&config.g, "g")?.build(&h)?;
            let pairing = orlicz::holder_pairing(&h, &f, &g);
            let norm_f = orlicz::luxemburg_norm(&phi, &h, &f, &w)?;
            let norm_g = orlicz::luxemburg_norm(&psi, &h, &g, &w.reciprocal())?;
            let bound = 2.0 * norm_f * norm_g;
            let slack = config.tol.unwrap_or(1e-6);
            let report = HolderReport {
                pairing,
                norm_f,
                norm_g,
                bound,
                slack,
                holds: pairing <= bound + slack,
            };
            let holds = report.holds;
            write_json(&cli.out, "norm_holder", "norm holder", &report)?;
            Ok(holds)
        }
    }
}

// --- cex ----------------------------------------------------------------

#[derive(Serialize)]
struct DivergeReport {
    summary: CexSummary,
    rows: Vec<DivergenceRow>,
}

fn run_cex(cli: &Cli, config: &ExperimentConfig, cmd: &CexCmd) -> Result<bool> {
    let inst = build_instance(config)?;
    match cmd {
        CexCmd::Build => {
            let summary = CexSummary::from(&inst);
            write_json(&cli.out, "cex_build", "cex build", &summary)?;
            Ok(true)
        }
        CexCmd::Diverge => {
            let m_schedule = match &config.m_schedule {
                Some(schedule) => schedule.clone(),
                None => counterexample::default_m_schedule()
                    .into_iter()
                    .filter(|&m| m <= inst.horizon)
                    .collect(),
            };
            let x_grid = match &config.x_grid {
                Some(grid) => grid.clone(),
                None => inst.v.iter().copied().collect(),
            };
            let rows = counterexample::divergence_report(&inst, &x_grid, &m_schedule)?;
            write_csv(
                &cli.out,
                "cex_divergence",
                "M,x,value,lower_bound",
                rows.iter().map(|r| {
                    format!(
                        "{},{},{},{}",
                        r.m,
                        r.x,
                        fmt_f64(r.value),
                        fmt_f64(r.lower_bound)
                    )
                }),
            )?;
            let report = DivergeReport {
                summary: CexSummary::from(&inst),
                rows,
            };
            write_json(&cli.out, "cex_diverge", "cex diverge", &report)?;
            Ok(true)
        }
    }
}

fn build_instance(config: &ExperimentConfig) -> Result<CounterexampleInstance> {
    let h = schema::require(&config.hypergroup, "hypergroup")?.build()?;
    let a = *schema::require(&config.a, "a")?;
    let u: BTreeSet<Point> = schema::require(&config.neighborhood, "neighborhood")?
        .iter()
        .copied()
        .collect();
    let phi1 = schema::require(&config.phi1, "phi1")?.build()?;
    let phi2 = schema::require(&config.phi2, "phi2")?.build()?;
    let witness = config.witness.unwrap_or_default();
    let horizon = config.horizon.unwrap_or(10_000);
    let options = BuildOptions {
        scan_bound: config.scan_bound.unwrap_or(200),
        n_prime_override: config.n_prime_override,
        seq_budgets: SeqBudgets::default(),
    };
    counterexample::build(&h, a, &u, &phi1, &phi2, witness, horizon, &options)
}

// --- opcrit ---------------------------------------------------------------

#[derive(Serialize)]
struct ProfileReport {
    epsilon: f64,
    norm_kind: NormKind,
    windows: Vec<Window>,
    tail_sups: Vec<f64>,
    verdict: VanishVerdict,
}

#[derive(Serialize)]
struct GapReport {
    norm_kind: NormKind,
    f_window: Window,
    gap: f64,
}

fn run_opcrit(cli: &Cli, config: &ExperimentConfig, cmd: &OpcritCmd) -> Result<bool> {
    let h = schema::require(&config.hypergroup, "hypergroup")?.build()?;
    let phi = schema::require(&config.phi1, "phi1")?.build()?;
    let g = schema::require(&config.g, "g")?.build(&h)?;
    let w = config.weight.clone().unwrap_or(WeightSpec::One).build();
    orlicz::certify_submultiplicative(&h, &w, &h.window())?;
    match cmd {
        OpcritCmd::Profile { epsilon, norm_kind } => {
            let schedule = match &config.schedule {
                Some(windows) => windows
                    .iter()
                    .map(|w| Window::new(w.lo, w.hi, w.halo))
                    .collect::<Result<Vec<_>>>()?,
                None => default_schedule(&h)?,
            };
            let eps = epsilon.or(config.epsilon).unwrap_or(1e-6);
            let kind = norm_kind
                .map(NormKind::from)
                .or(config.norm_kind)
                .unwrap_or(NormKind::Amemiya);
            let profile = operators::criterion_profile(&h, &g, &phi, &w, &schedule, eps, kind)?;
            write_csv(
                &cli.out,
                "opcrit_profile",
                "x,F_g(x)",
                profile
                    .points
                    .iter()
                    .zip(&profile.values)
                    .map(|(x, v)| format!("{},{}", x, fmt_f64(*v))),
            )?;
            let report = ProfileReport {
                epsilon: profile.epsilon,
                norm_kind: profile.norm_kind,
                windows: profile.windows.clone(),
                tail_sups: profile.tail_sups.clone(),
                verdict: profile.verdict.clone(),
            };
            write_json(&cli.out, "opcrit_profile", "opcrit profile", &report)?;
            Ok(true)
        }
        OpcritCmd::Gap {
            f_window,
            norm_kind,
        } => {
            let f_win = clamped_window(&h, Some(*f_window))?;
            let f_win = Window::new(f_win.lo, f_win.hi, 0)?;
            let kind = norm_kind
                .map(NormKind::from)
                .or(config.norm_kind)
                .unwrap_or(NormKind::Amemiya);
            let report = GapReport {
                norm_kind: kind,
                f_window: f_win,
                gap: operators::finite_rank_gap(&h, &g, &phi, &w, &f_win, kind)?,
            };
            write_json(&cli.out, "opcrit_gap", "opcrit gap", &report)?;
            Ok(true)
        }
    }
}

/// Four nested windows around the identity. Finite carriers are
/// exhausted (the final tail is empty and vanishing is vacuous);
/// infinite truncations stop at half the core radius so the outer half
/// of the enumeration stays available as tail evidence.
fn default_schedule(h: &DiscreteHypergroup) -> Result<Vec<Window>> {
    let core = h.window();
    let id = h.identity();
    let r_max = (core.hi - id).max(id - core.lo);
    let r_top = if h.is_finite_carrier() {
        r_max
    } else {
        r_max / 2
    };
    let mut out: Vec<Window> = Vec::new();
    for num in 1..=4i64 {
        let r = r_top * num / 4;
        let window = Window::new(core.lo.max(id - r), core.hi.min(id + r), 0)?;
        if out.last() != Some(&window) {
            out.push(window);
        }
    }
    Ok(out)
}

// --- report files -----------------------------------------------------

fn write_json<T: Serialize>(out_dir: &Path, file: &str, command: &str, payload: &T) -> Result<()> {
    let line = Envelope::new(command, payload).to_json_line()?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(format!("{file}.json")), &line)?;
    print!("{line}");
    Ok(())
}

fn write_csv(
    out_dir: &Path,
    file: &str,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> Result<()> {
    let mut body = String::from(header);
    body.push('\n');
    for row in rows {
        body.push_str(&row);
        body.push('\n');
    }
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(format!("{file}.csv")), body)?;
    Ok(())
}
