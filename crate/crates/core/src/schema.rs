//! JSON config schemas and report envelopes.
//!
//! Configs are plain data: a spec names a built-in or carries the raw
//! material (expression source, structure-constant table, value pairs)
//! and `build` turns it into the live object, funneling every
//! validation error through [`Error`]. Reports go out wrapped in an
//! envelope that records the schema version and the command that
//! produced them; all floats are printed with 17 significant digits so
//! a report is byte-stable across runs and platforms.

use std::collections::BTreeSet;
use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::counterexample::CounterexampleInstance;
use crate::error::{Error, Result};
use crate::hypergroup::{self, DiscreteHypergroup, Point, TableSpec, Window};
use crate::orlicz::{OrliczFunction, Weight};
use crate::sample;
use crate::young::{SequenceWitness, YoungFunction};

pub const SCHEMA_VERSION: u32 = 1;

/// A Young function by family parameters or expression source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum YoungSpec {
    /// Φ(x) = |x|^p.
    Power { p: f64 },
    /// Φ(x) = |x|^p ln(1+|x|)^γ.
    PowerLog { p: f64, gamma: f64 },
    /// Arbitrary expression in `x`, certified at build time.
    Custom { expr: String },
}

impl YoungSpec {
    pub fn power(p: f64) -> Self {
        YoungSpec::Power { p }
    }

    pub fn build(&self) -> Result<YoungFunction> {
        match self {
            YoungSpec::Power { p } => YoungFunction::power(*p),
            YoungSpec::PowerLog { p, gamma } => YoungFunction::power_log(*p, *gamma),
            YoungSpec::Custom { expr } => YoungFunction::custom(expr),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    One,
    /// w(x) = e^{rate·|x|}.
    Exponential {
        rate: f64,
    },
    /// w(x) = (1+|x|)^degree.
    Polynomial {
        degree: f64,
    },
}

impl WeightSpec {
    pub fn build(&self) -> Weight {
        match self {
            WeightSpec::One => Weight::one(),
            WeightSpec::Exponential { rate } => Weight::exponential(*rate),
            WeightSpec::Polynomial { degree } => Weight::polynomial(*degree),
        }
    }
}

/// A hypergroup by built-in carrier name or explicit table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "carrier", rename_all = "snake_case")]
pub enum HypergroupSpec {
    Integers { window: Window },
    Cyclic { m: u64 },
    Chebyshev { window: Window },
    Table { spec: TableSpec },
}

impl HypergroupSpec {
    pub fn build(&self) -> Result<DiscreteHypergroup> {
        match self {
            // Derived Deserialize bypasses Window::new, so revalidate.
            HypergroupSpec::Integers { window } => Ok(hypergroup::make_integers(checked(*window)?)),
            HypergroupSpec::Cyclic { m } => hypergroup::make_cyclic(*m),
            HypergroupSpec::Chebyshev { window } => hypergroup::make_chebyshev(checked(*window)?),
            HypergroupSpec::Table { spec } => hypergroup::from_table(spec.clone()),
        }
    }
}

fn checked(window: Window) -> Result<Window> {
    Window::new(window.lo, window.hi, window.halo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionEntry {
    pub x: Point,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A finitely supported function: explicit values, an indicator, or a
/// seeded draw (the only randomness anywhere, and always explicit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Values {
        entries: Vec<FunctionEntry>,
    },
    Indicator {
        points: Vec<Point>,
    },
    Random {
        seed: u64,
        max_support: usize,
        #[serde(default)]
        complex: bool,
        /// Support window; defaults to the hypergroup's core window.
        #[serde(default)]
        window: Option<Window>,
    },
}

impl FunctionSpec {
    pub fn indicator(points: impl IntoIterator<Item = Point>) -> Self {
        FunctionSpec::Indicator {
            points: points.into_iter().collect(),
        }
    }

    pub fn build(&self, h: &DiscreteHypergroup) -> Result<OrliczFunction> {
        match self {
            FunctionSpec::Values { entries } => OrliczFunction::new(
                h,
                entries
                    .iter()
                    .map(|e| (e.x, Complex64::new(e.re, e.im)))
                    .collect::<Vec<_>>(),
            ),
            FunctionSpec::Indicator { points } => {
                let set: BTreeSet<Point> = points.iter().copied().collect();
                OrliczFunction::indicator(h, &set)
            }
            FunctionSpec::Random {
                seed,
                max_support,
                complex,
                window,
            } => {
                let w = match window {
                    Some(w) => checked(*w)?,
                    None => h.window(),
                };
                let mut rng = sample::seeded_rng(*seed);
                if *complex {
                    sample::random_complex_function(h, &mut rng, &w, *max_support)
                } else {
                    sample::random_real_function(h, &mut rng, &w, *max_support)
                }
            }
        }
    }
}

/// One config file drives every subcommand; each command reads the
/// sections it needs and rejects a config that lacks them. Unknown
/// fields are schema violations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub phi1: Option<YoungSpec>,
    pub phi2: Option<YoungSpec>,
    pub hypergroup: Option<HypergroupSpec>,
    pub weight: Option<WeightSpec>,
    pub f: Option<FunctionSpec>,
    pub g: Option<FunctionSpec>,
    pub witness: Option<SequenceWitness>,
    /// Candidate aperiodic center element for `cex`.
    pub a: Option<Point>,
    /// The neighborhood U of the counterexample construction.
    pub neighborhood: Option<Vec<Point>>,
    pub horizon: Option<u64>,
    pub scan_bound: Option<u64>,
    pub n_prime_override: Option<u64>,
    /// Truncation levels M for divergence reports.
    pub m_schedule: Option<Vec<u64>>,
    /// Evaluation points for divergence reports.
    pub x_grid: Option<Vec<Point>>,
    /// Nested enumeration windows for criterion profiles.
    pub schedule: Option<Vec<Window>>,
    pub epsilon: Option<f64>,
    pub norm_kind: Option<crate::orlicz::NormKind>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            phi1: None,
            phi2: None,
            hypergroup: None,
            weight: None,
            f: None,
            g: None,
            witness: None,
            a: None,
            neighborhood: None,
            horizon: None,
            scan_bound: None,
            n_prime_override: None,
            m_schedule: None,
            x_grid: None,
            schedule: None,
            epsilon: None,
            norm_kind: None,
            tol: None,
            seed: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(src: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(src).map_err(|e| Error::Schema {
            detail: e.to_string(),
        })?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema {
                detail: format!(
                    "unsupported schema_version {} (expected {})",
                    config.schema_version, SCHEMA_VERSION
                ),
            });
        }
        Ok(config)
    }

    /// The default divergence experiment: ℤ, a = 1, U = {−1,0,1},
    /// Φ₁ = Φ₂ = |x|³, α = β = n^{−1/2}, truncations up to M = 10⁴.
    ///
    /// N′ is pinned to 2, the classical choice; the certified tail
    /// arithmetic needs N′ = 5 to clear 1/λ(V), so reports built from
    /// this config carry `tails_certified = false`. Drop the override
    /// to get the fully certified instance instead.
    pub fn default_cex() -> Self {
        Self {
            hypergroup: Some(HypergroupSpec::Integers {
                window: Window::symmetric(30_000, 50).expect("static window"),
            }),
            phi1: Some(YoungSpec::power(3.0)),
            phi2: Some(YoungSpec::power(3.0)),
            witness: Some(SequenceWitness::inv_sqrt()),
            a: Some(1),
            neighborhood: Some(vec![-1, 0, 1]),
            horizon: Some(10_000),
            scan_bound: Some(200),
            n_prime_override: Some(2),
            m_schedule: Some(vec![100, 1_000, 10_000]),
            x_grid: Some(vec![0]),
            ..Self::default()
        }
    }
}

/// Pull a required config section or fail with a schema error.
pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
    section.as_ref().ok_or_else(|| Error::Schema {
        detail: format!("config section `{name}` is required for this command"),
    })
}

/// Everything reportable about a built counterexample instance except
/// the functions themselves (those go to CSV via the divergence rows).
#[derive(Debug, Clone, Serialize)]
pub struct CexSummary {
    pub a: Point,
    pub neighborhood: Vec<Point>,
    pub v: Vec<Point>,
    pub v_star_v: Vec<Point>,
    pub n_separation: u64,
    pub n_tail: u64,
    pub horizon: u64,
    pub haar_v: f64,
    pub haar_vv: f64,
    pub tail_bound_f: f64,
    pub tail_bound_g: f64,
    pub tails_certified: bool,
    pub modular_f: f64,
    pub modular_g: f64,
    pub f_support_len: usize,
    pub g_support_len: usize,
}

impl From<&CounterexampleInstance> for CexSummary {
    fn from(inst: &CounterexampleInstance) -> Self {
        Self {
            a: inst.a,
            neighborhood: inst.u.iter().copied().collect(),
            v: inst.v.iter().copied().collect(),
            v_star_v: inst.v_star_v.iter().copied().collect(),
            n_separation: inst.n_separation,
            n_tail: inst.n_tail,
            horizon: inst.horizon,
            haar_v: inst.haar_v,
            haar_vv: inst.haar_vv,
            tail_bound_f: inst.tail_bound_f,
            tail_bound_g: inst.tail_bound_g,
            tails_certified: inst.tails_certified,
            modular_f: inst.modular_f,
            modular_g: inst.modular_g,
            f_support_len: inst.f_m.support_len(),
            g_support_len: inst.g_m.support_len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub command: String,
    pub report: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: impl Into<String>, report: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            report,
        }
    }

    pub fn to_json_line(&self) -> Result<String> {
        to_json_line(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorEnvelope {
    pub schema_version: u32,
    pub command: String,
    pub error_code: String,
    pub message: String,
}

impl ErrorEnvelope {
    pub fn new(command: impl Into<String>, err: &Error) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            error_code: err.code().to_string(),
            message: err.to_string(),
        }
    }

    pub fn to_json_line(&self) -> Result<String> {
        to_json_line(self)
    }
}

/// 17 significant digits, enough to reproduce any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Compact JSON with a trailing newline; floats via [`fmt_f64`].
pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}
