//! Young-function calculus.
//!
//! A Young function is a convex even map Φ:ℝ→[0,∞) with Φ(0)=0 and
//! Φ(x)→∞. This module houses the `Φ_{p,γ}(x) = |x|^p ln(1+|x|)^γ`
//! family, custom expression-defined functions, numeric convex
//! conjugation, Δ₂ probing, the small-slope limit, and the sequence
//! condition for pairs.
//!
//! Construction always runs a sampled certificate (nonnegativity,
//! monotonicity and second differences on a log grid). A certificate is
//! numeric evidence, not a proof; every verdict type in this module is
//! labeled accordingly.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parallel;

const CERT_X_MIN: f64 = 1e-8;
const CERT_X_MAX: f64 = 1e6;
const CERT_GRID_POINTS: usize = 512;
const CERT_H_SCALES: usize = 8;
const CERT_REL_TOL: f64 = 1e-12;

/// Symbolic family tag carried alongside the evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Family {
    Power { p: f64 },
    PowerLog { p: f64, gamma: f64 },
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Power { p } => write!(f, "|x|^{p}"),
            Family::PowerLog { p, gamma } => write!(f, "|x|^{p} ln(1+|x|)^{gamma}"),
            Family::Custom => write!(f, "custom"),
        }
    }
}

#[derive(Clone)]
enum Evaluator {
    PowerLog { p: f64, gamma: f64 },
    Expr(Expr),
    Callable(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Evaluator {
    fn eval_abs(&self, ax: f64) -> f64 {
        match self {
            Evaluator::PowerLog { p, gamma } => {
                if ax == 0.0 {
                    return 0.0;
                }
                let base = ax.powf(*p);
                if *gamma == 0.0 {
                    base
                } else {
                    base * ax.ln_1p().powf(*gamma)
                }
            }
            Evaluator::Expr(e) => e.eval(ax),
            Evaluator::Callable(f) => f(ax),
        }
    }
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::PowerLog { p, gamma } => write!(f, "PowerLog({p},{gamma})"),
            Evaluator::Expr(e) => write!(f, "Expr({e:?})"),
            Evaluator::Callable(_) => write!(f, "Callable"),
        }
    }
}

/// Sampled second-difference evidence recorded at construction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvexityCertificate {
    pub x_min: f64,
    pub x_max: f64,
    pub grid_points: usize,
    pub h_scales: usize,
    /// min over samples of (Φ(x−h) − 2Φ(x) + Φ(x+h)) / max(1, Φ(x+h)).
    pub min_scaled_second_difference: f64,
    pub phi_at_x_max: f64,
}

/// A certified convex even cost function.
///
/// Evaluation is always through `|x|`, so evenness holds by
/// construction. Because the certificate also establishes Φ(0)=0,
/// monotonicity and Φ(x_max)>0, convexity forces Φ(x) ≥ Φ(x₀)·x/x₀ for
/// x ≥ x₀ at any x₀ with Φ(x₀)>0, hence Φ(x)→∞ on the certified class.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    family: Family,
    evaluator: Evaluator,
    certificate: ConvexityCertificate,
    omega: bool,
}

impl YoungFunction {
    /// Φ(x) = |x|^p, p ≥ 1.
    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidYoungParameter {
                detail: format!("power exponent p must be finite and >= 1, got {p}"),
            });
        }
        Self::certified(
            Family::Power { p },
            Evaluator::PowerLog { p, gamma: 0.0 },
            p > 2.0,
        )
    }

    /// Φ_{p,γ}(x) = |x|^p ln(1+|x|)^γ, p ≥ 1, γ ≥ 0.
    ///
    /// The returned function is flagged as an Ω-member when p+γ > 2 and
    /// the convexity certificate passes.
    pub fn power_log(p: f64, gamma: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidYoungParameter {
                detail: format!("power-log exponent p must be finite and >= 1, got {p}"),
            });
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidYoungParameter {
                detail: format!("power-log exponent gamma must be finite and >= 0, got {gamma}"),
            });
        }
        Self::certified(
            Family::PowerLog { p, gamma },
            Evaluator::PowerLog { p, gamma },
            p + gamma > 2.0,
        )
    }

    /// Parse an expression in the variable `x` (grammar: `+ - * / ^`,
    /// `ln`, `abs`, `exp`, parentheses) and certify it as a Young
    /// function. The expression is evaluated at |x| (even extension).
    pub fn custom(src: &str) -> Result<Self> {
        let expr = Expr::parse(src)?;
        Self::certified(Family::Custom, Evaluator::Expr(expr), false)
    }

    /// Wrap an arbitrary evaluator, certifying it on the sample grid.
    /// The closure is evaluated at |x| (even extension).
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::certified(Family::Custom, Evaluator::Callable(Arc::new(f)), false)
    }

    fn certified(family: Family, evaluator: Evaluator, omega_when_convex: bool) -> Result<Self> {
        let certificate = certify(&evaluator)?;
        Ok(Self {
            family,
            evaluator,
            certificate,
            omega: omega_when_convex,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn certificate(&self) -> &ConvexityCertificate {
        &self.certificate
    }

    /// Ω-membership: family member with p+γ > 2 whose convexity
    /// certificate passed. Always false for custom functions.
    pub fn is_omega_member(&self) -> bool {
        self.omega
    }

    /// Φ(|x|). Rejects non-finite input.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput { value: x });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Φ(|x|) without the finiteness check; callers guarantee finite x.
    #[inline]
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        self.evaluator.eval_abs(x.abs())
    }

    /// (p, γ) when the family has closed-form exponents.
    pub(crate) fn family_exponents(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Power { p } => Some((p, 0.0)),
            Family::PowerLog { p, gamma } => Some((p, gamma)),
            Family::Custom => None,
        }
    }
}

// The negated comparisons are load-bearing: a NaN evaluation must fall
// into the error branch, and `!(x <= eps)` catches it where `x > eps`
// would not.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn certify(evaluator: &Evaluator) -> Result<ConvexityCertificate> {
    let phi0 = evaluator.eval_abs(0.0);
    if !(phi0.abs() <= 1e-15) {
        return Err(Error::YoungCertificateViolation {
            detail: format!("phi(0) = {phi0}, expected 0"),
            x: 0.0,
        });
    }

    let grid = log_grid(CERT_X_MIN, CERT_X_MAX, CERT_GRID_POINTS);
    let mut prev = 0.0_f64;
    let mut prev_x = 0.0_f64;
    for &x in &grid {
        let v = evaluator.eval_abs(x);
        if v.is_nan() || v < 0.0 {
            return Err(Error::YoungCertificateViolation {
                detail: format!("phi({x}) = {v} is negative or NaN"),
                x,
            });
        }
        let decreasing = if prev.is_finite() {
            v < prev - CERT_REL_TOL * prev.abs().max(1.0)
        } else {
            v.is_finite() // dropped back from overflow
        };
        if decreasing {
            return Err(Error::YoungCertificateViolation {
                detail: format!("phi not nondecreasing: phi({prev_x}) = {prev} > phi({x}) = {v}"),
                x,
            });
        }
        prev = v;
        prev_x = x;
    }

    let mut min_scaled = f64::INFINITY;
    for &x in &grid {
        for j in 0..CERT_H_SCALES {
            // h spans x/16 .. 8x
            let h = x * (2.0_f64).powi(j as i32 - 4);
            let a = evaluator.eval_abs((x - h).abs());
            let b = evaluator.eval_abs(x);
            let c = evaluator.eval_abs(x + h);
            if !(a.is_finite() && b.is_finite() && c.is_finite()) {
                // overflow region; convexity untestable there
                continue;
            }
            let d2 = a - 2.0 * b + c;
            let scale = c.abs().max(1.0);
            let scaled = d2 / scale;
            if scaled < min_scaled {
                min_scaled = scaled;
            }
            if scaled < -CERT_REL_TOL {
                return Err(Error::ConvexityViolation {
                    x,
                    h,
                    second_difference: d2,
                });
            }
        }
    }

    let phi_at_x_max = evaluator.eval_abs(CERT_X_MAX);
    if !(phi_at_x_max > 0.0) {
        return Err(Error::YoungCertificateViolation {
            detail: format!("phi({CERT_X_MAX}) = {phi_at_x_max}; phi does not grow"),
            x: CERT_X_MAX,
        });
    }

    Ok(ConvexityCertificate {
        x_min: CERT_X_MIN,
        x_max: CERT_X_MAX,
        grid_points: CERT_GRID_POINTS,
        h_scales: CERT_H_SCALES,
        min_scaled_second_difference: min_scaled,
        phi_at_x_max,
    })
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > lo && points >= 2);
    let ratio = (hi / lo).ln();
    (0..points)
        .map(|i| lo * (ratio * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Grid bounds and refinement budget for scalar searches.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchParams {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub refine_iters: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            lo: 1e-9,
            hi: 1e9,
            points: 256,
            refine_iters: 120,
        }
    }
}

impl SearchParams {
    /// Default probe grid for Δ₂ ratio scans.
    pub fn delta2_default() -> Self {
        Self {
            lo: 1e-8,
            hi: 1e6,
            points: 512,
            refine_iters: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0 && self.hi > self.lo) {
            return Err(Error::InvalidSearchParams {
                detail: format!(
                    "need 0 < lo < hi finite, got lo={}, hi={}",
                    self.lo, self.hi
                ),
            });
        }
        if self.points < 8 {
            return Err(Error::InvalidSearchParams {
                detail: format!("need at least 8 grid points, got {}", self.points),
            });
        }
        Ok(())
    }
}

/// Complementary (convex conjugate) function Ψ(x) = sup_{y≥0} (y|x| − Φ(y)).
///
/// Coarse log-grid scan followed by ternary refinement; the objective
/// is concave in y for convex Φ, so the refined value is a lower bound
/// within the refinement tolerance of the true sup. If the objective is
/// still increasing at the right edge of the grid the sup is reported
/// as unbounded on the range.
pub fn complementary(phi: &YoungFunction, x: f64, search: &SearchParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFiniteInput { value: x });
    }
    conjugate_fn(|y| phi.eval_unchecked(y), x, search)
}

/// Conjugation core for a raw evaluator; used by [`complementary`] and
/// by bi-conjugation checks where the inner Ψ is itself numeric.
pub fn conjugate_fn(phi: impl Fn(f64) -> f64, x: f64, search: &SearchParams) -> Result<f64> {
    search.validate()?;
    let ax = x.abs();
    let objective = |y: f64| y * ax - phi(y);

    let mut ys = Vec::with_capacity(search.points + 1);
    ys.push(0.0);
    ys.extend(log_grid(search.lo, search.hi, search.points));

    let mut best_idx = 0usize;
    let mut best = 0.0_f64; // objective at y=0 is exactly 0
    for (i, &y) in ys.iter().enumerate().skip(1) {
        let v = objective(y);
        if v > best {
            best = v;
            best_idx = i;
        }
    }

    if best_idx == ys.len() - 1 {
        let edge = objective(search.hi);
        if edge > 0.0 && edge >= objective(search.hi * (1.0 - 1e-6)) {
            return Err(Error::UnboundedOnRange {
                y_max: search.hi,
                value: edge,
            });
        }
    }

    let mut lo = ys[best_idx.saturating_sub(1)];
    let mut hi = ys[(best_idx + 1).min(ys.len() - 1)];
    for _ in 0..search.refine_iters {
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if objective(m1) < objective(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok(best
        .max(objective(mid))
        .max(objective(lo))
        .max(objective(hi)))
}

/// Outcome of a Δ₂ probe: a numeric certificate (grid evidence, not a
/// proof) or a refutation with the growing per-decade ratio trend.
#[derive(Debug, Clone, Serialize)]
pub enum Delta2Verdict {
    Certificate {
        /// sup of Φ(2t)/Φ(t) over the probe grid.
        k_estimate: f64,
        /// Exact limit 2^p for the Power/PowerLog families.
        asymptotic_ratio: Option<f64>,
    },
    Refutation {
        /// (decade right edge, sup of ratio in decade), strictly
        /// growing toward the end of the grid.
        decade_sups: Vec<(f64, f64)>,
    },
}

/// Probe the Δ₂ condition Φ(2t) ≤ kΦ(t) on a log grid over
/// [max(t0, grid.lo), grid.hi].
///
/// The grid is truncated at the first t where Φ(t) or Φ(2t) overflows;
/// refutation requires the per-decade sups to keep growing (by more
/// than 5% per decade) across the last three decades.
pub fn is_delta2(phi: &YoungFunction, t0: f64, grid: &SearchParams) -> Result<Delta2Verdict> {
    grid.validate()?;
    if !t0.is_finite() || t0 < 0.0 {
        return Err(Error::InvalidSearchParams {
            detail: format!("t0 must be finite and >= 0, got {t0}"),
        });
    }
    let lo = grid.lo.max(t0);
    if lo >= grid.hi {
        return Err(Error::InvalidSearchParams {
            detail: format!("t0 = {t0} exceeds the grid upper bound {}", grid.hi),
        });
    }

    let mut ratios: Vec<(f64, f64)> = Vec::new();
    for t in log_grid(lo, grid.hi, grid.points) {
        let ph = phi.eval_unchecked(t);
        if !ph.is_finite() {
            break;
        }
        if ph == 0.0 {
            return Err(Error::DegenerateFunction { t });
        }
        let ph2 = phi.eval_unchecked(2.0 * t);
        if !ph2.is_finite() {
            break;
        }
        ratios.push((t, ph2 / ph));
    }
    if ratios.len() < 8 {
        return Err(Error::InvalidSearchParams {
            detail: "fewer than 8 finite ratio samples; shrink the grid".to_string(),
        });
    }

    let mut decade_sups: Vec<(f64, f64)> = Vec::new();
    let mut decade = f64::NEG_INFINITY;
    for &(t, r) in &ratios {
        let d = t.log10().floor();
        if d > decade || decade_sups.is_empty() {
            decade = d;
            decade_sups.push((t, r));
        } else {
            let last = decade_sups.last_mut().unwrap();
            last.0 = t;
            if r > last.1 {
                last.1 = r;
            }
        }
    }

    let n = decade_sups.len();
    if n >= 3 {
        let (_, a) = decade_sups[n - 3];
        let (_, b) = decade_sups[n - 2];
        let (_, c) = decade_sups[n - 1];
        if b > 1.05 * a && c > 1.05 * b {
            return Ok(Delta2Verdict::Refutation { decade_sups });
        }
    }

    let k_estimate = ratios.iter().map(|&(_, r)| r).fold(0.0_f64, f64::max);
    let asymptotic_ratio = phi.family_exponents().map(|(p, _)| (2.0_f64).powf(p));
    Ok(Delta2Verdict::Certificate {
        k_estimate,
        asymptotic_ratio,
    })
}

/// Verdict for lim_{x→0⁺} Φ(x)/x.
#[derive(Debug, Clone, Serialize)]
pub enum SlopeVerdict {
    Positive { limit_estimate: f64 },
    Zero,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    /// (x, Φ(x)/x) along the probe grid; the ratio is nonincreasing as
    /// x decreases for convex Φ with Φ(0)=0, so its infimum is the limit.
    pub samples: Vec<(f64, f64)>,
    pub verdict: SlopeVerdict,
}

/// Default decreasing probe grid 1e−1, 1e−2, …, 1e−12.
pub fn default_eps_grid() -> Vec<f64> {
    (1..=12).map(|k| 10.0_f64.powi(-k)).collect()
}

/// Estimate lim_{x→0⁺} Φ(x)/x along a decreasing grid.
pub fn small_x_slope(phi: &YoungFunction, eps_grid: &[f64]) -> Result<SlopeReport> {
    if eps_grid.len() < 3 {
        return Err(Error::InvalidSearchParams {
            detail: "eps grid needs at least 3 points".to_string(),
        });
    }
    for w in eps_grid.windows(2) {
        if !(w[1] > 0.0 && w[1] < w[0] && w[0].is_finite()) {
            return Err(Error::InvalidSearchParams {
                detail: "eps grid must be strictly decreasing and positive".to_string(),
            });
        }
    }

    let samples: Vec<(f64, f64)> = eps_grid
        .iter()
        .map(|&e| (e, phi.eval_unchecked(e) / e))
        .collect();
    let r_first = samples.first().unwrap().1;
    let r_prev = samples[samples.len() - 2].1;
    let r_last = samples.last().unwrap().1;

    let verdict = if r_last == 0.0 {
        SlopeVerdict::Zero
    } else if (r_prev - r_last).abs() <= 1e-6 * r_last {
        SlopeVerdict::Positive {
            limit_estimate: r_last,
        }
    } else if r_last <= 1e-3 * r_first {
        SlopeVerdict::Zero
    } else {
        SlopeVerdict::Inconclusive
    };
    Ok(SlopeReport { samples, verdict })
}

/// Closed-form term rule for witness sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceRule {
    /// α_n = n^{−s}.
    InversePower { s: f64 },
}

impl SequenceRule {
    #[inline]
    pub fn term(&self, n: u64) -> f64 {
        match self {
            SequenceRule::InversePower { s } => (n as f64).powf(-s),
        }
    }

    fn decay_exponent(&self) -> f64 {
        match self {
            SequenceRule::InversePower { s } => *s,
        }
    }
}

/// How tails are certified in sequence-condition checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBoundMethod {
    IntegralTest,
    PartialSumOnly,
}

/// The sequences (α_n), (β_n) of the sequence condition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SequenceWitness {
    pub alpha: SequenceRule,
    pub beta: SequenceRule,
    pub tail_bound_method: TailBoundMethod,
}

impl SequenceWitness {
    /// The default witness α_n = β_n = n^{−1/2} with integral-test tails.
    pub fn inv_sqrt() -> Self {
        Self {
            alpha: SequenceRule::InversePower { s: 0.5 },
            beta: SequenceRule::InversePower { s: 0.5 },
            tail_bound_method: TailBoundMethod::IntegralTest,
        }
    }
}

impl Default for SequenceWitness {
    fn default() -> Self {
        Self::inv_sqrt()
    }
}

/// Horizon and divergence target for sequence-condition checks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeqBudgets {
    pub horizon: u64,
    pub divergence_target: f64,
}

impl Default for SeqBudgets {
    fn default() -> Self {
        Self {
            horizon: 1_000_000,
            divergence_target: 1.0,
        }
    }
}

/// Certified status of one series in the condition.
#[derive(Debug, Clone, Serialize)]
pub enum TailStatus {
    /// Σ_{n>horizon} term ≤ tail_beyond_horizon (integral test).
    ConvergentTail {
        exponent: f64,
        tail_beyond_horizon: f64,
    },
    /// Series diverges; partial sum ≥ lower_bound_at_horizon, which
    /// grows without bound in the horizon.
    Divergent {
        exponent: f64,
        lower_bound_at_horizon: f64,
    },
    /// No certification available (partial sums only).
    Uncertified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SeqVerdict {
    Satisfied,
    WitnessFails { reason: String },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct SeqConditionReport {
    pub horizon: u64,
    /// Σ_{n≤M} Φ₁(α_n).
    pub s1_partial: f64,
    /// Σ_{n≤M} Φ₂(β_n).
    pub s2_partial: f64,
    /// Σ_{n≤M} α_n β_n.
    pub product_partial: f64,
    pub s1_tail: TailStatus,
    pub s2_tail: TailStatus,
    pub product_tail: TailStatus,
    pub divergence_target: f64,
    pub verdict: SeqVerdict,
}

/// Certified upper bound for Σ_{n≥from} Φ(rule(n)).
///
/// Uses ln(1+u) ≤ u to dominate Φ_{p,γ}(n^{−s}) by n^{−s(p+γ)}, then
/// the integral test. Needs a closed-form family and a summable
/// exponent; otherwise the tail cannot be certified.
pub fn certified_phi_tail(phi: &YoungFunction, rule: &SequenceRule, from: u64) -> Result<f64> {
    if from == 0 {
        return Err(Error::InvalidSearchParams {
            detail: "tail start index must be at least 1".to_string(),
        });
    }
    let s = rule.decay_exponent();
    if s < 0.0 {
        return Err(Error::MethodInapplicable {
            detail: "integral test needs nonincreasing terms".to_string(),
        });
    }
    let (p, g) = phi
        .family_exponents()
        .ok_or_else(|| Error::MethodInapplicable {
            detail: "no closed-form family exponents for tail certification".to_string(),
        })?;
    let q = s * (p + g);
    if q <= 1.0 {
        return Err(Error::TailBoundFailure {
            detail: format!("tail exponent q = {q} <= 1: the series diverges"),
        });
    }
    Ok(p_series_tail_bound(q, from))
}

/// Certified upper bound for Σ_{n≥from} n^{−q} when q > 1:
/// from^{−q} + ∫_from^∞ t^{−q} dt.
pub fn p_series_tail_bound(q: f64, from: u64) -> f64 {
    debug_assert!(q > 1.0 && from >= 1);
    let a = from as f64;
    a.powf(-q) + a.powf(1.0 - q) / (q - 1.0)
}

/// Certified lower bound for Σ_{n=from}^{to} n^{−q} (any q ≥ 0):
/// ∫_from^{to+1} t^{−q} dt, valid because the terms are nonincreasing.
pub fn p_series_partial_lower(q: f64, from: u64, to: u64) -> f64 {
    debug_assert!(from >= 1 && to >= from);
    let a = from as f64;
    let b = (to + 1) as f64;
    if (q - 1.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (b.powf(1.0 - q) - a.powf(1.0 - q)) / (1.0 - q)
    }
}

/// Check the sequence condition for (Φ₁, Φ₂) with the given witness:
/// ΣΦ₁(α_n) < ∞, ΣΦ₂(β_n) < ∞, Σα_nβ_n = ∞.
///
/// Partial sums are computed to the horizon; with `IntegralTest`, tails
/// are certified through the closed-form comparisons
/// ln(1+u) ≤ u and ln(1+u) ≥ u·ln2 for u ∈ [0,1], which reduce
/// Φ_{p,γ}(n^{−s}) to p-series with exponent q = s(p+γ). Satisfied
/// requires both tails certified convergent, the product series
/// certified divergent, and the product partial sum above the target
/// (so the verdict is monotone in the horizon).
pub fn check_sequence_condition(
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    witness: &SequenceWitness,
    budgets: &SeqBudgets,
) -> Result<SeqConditionReport> {
    let m = budgets.horizon;
    if m < 1 {
        return Err(Error::InvalidSearchParams {
            detail: "horizon must be at least 1".to_string(),
        });
    }

    let alpha = witness.alpha;
    let beta = witness.beta;
    let s1_partial = parallel::sum_indexed(1, m + 1, |n| phi1.eval_unchecked(alpha.term(n)));
    let s2_partial = parallel::sum_indexed(1, m + 1, |n| phi2.eval_unchecked(beta.term(n)));
    let product_partial = parallel::sum_indexed(1, m + 1, |n| alpha.term(n) * beta.term(n));

    if witness.tail_bound_method == TailBoundMethod::PartialSumOnly {
        return Ok(SeqConditionReport {
            horizon: m,
            s1_partial,
            s2_partial,
            product_partial,
            s1_tail: TailStatus::Uncertified,
            s2_tail: TailStatus::Uncertified,
            product_tail: TailStatus::Uncertified,
            divergence_target: budgets.divergence_target,
            verdict: SeqVerdict::Inconclusive {
                reason: "partial sums only; no certified tail bounds requested".to_string(),
            },
        });
    }

    for (name, rule) in [("alpha", alpha), ("beta", beta)] {
        if rule.decay_exponent() < 0.0 {
            return Err(Error::MethodInapplicable {
                detail: format!(
                    "{name} rule is nondecreasing; the integral test needs nonincreasing terms"
                ),
            });
        }
    }
    let (p1, g1) = phi1
        .family_exponents()
        .ok_or_else(|| Error::MethodInapplicable {
            detail: "phi1 has no closed-form family exponents for tail certification".to_string(),
        })?;
    let (p2, g2) = phi2
        .family_exponents()
        .ok_or_else(|| Error::MethodInapplicable {
            detail: "phi2 has no closed-form family exponents for tail certification".to_string(),
        })?;

    let series_status = |q: f64, gamma: f64| -> TailStatus {
        if q > 1.0 {
            TailStatus::ConvergentTail {
                exponent: q,
                tail_beyond_horizon: p_series_tail_bound(q, m + 1),
            }
        } else {
            let scale = (2.0_f64).ln().powf(gamma);
            TailStatus::Divergent {
                exponent: q,
                lower_bound_at_horizon: scale * p_series_partial_lower(q, 1, m),
            }
        }
    };

    let q1 = alpha.decay_exponent() * (p1 + g1);
    let q2 = beta.decay_exponent() * (p2 + g2);
    let r = alpha.decay_exponent() + beta.decay_exponent();
    let s1_tail = series_status(q1, g1);
    let s2_tail = series_status(q2, g2);
    let product_tail = series_status(r, 0.0);

    let verdict = if matches!(s1_tail, TailStatus::Divergent { .. }) {
        SeqVerdict::WitnessFails {
            reason: format!("sum of phi1(alpha_n) diverges (certified, exponent {q1} <= 1)"),
        }
    } else if matches!(s2_tail, TailStatus::Divergent { .. }) {
        SeqVerdict::WitnessFails {
            reason: format!("sum of phi2(beta_n) diverges (certified, exponent {q2} <= 1)"),
        }
    } else if matches!(product_tail, TailStatus::ConvergentTail { .. }) {
        SeqVerdict::WitnessFails {
            reason: format!("sum of alpha_n beta_n converges (certified, exponent {r} > 1)"),
        }
    } else if product_partial > budgets.divergence_target {
        SeqVerdict::Satisfied
    } else {
        SeqVerdict::Inconclusive {
            reason: format!(
                "product partial sum {product_partial} has not reached the divergence target {}",
                budgets.divergence_target
            ),
        }
    };

    Ok(SeqConditionReport {
        horizon: m,
        s1_partial,
        s2_partial,
        product_partial,
        s1_tail,
        s2_tail,
        product_tail,
        divergence_target: budgets.divergence_target,
        verdict,
    })
}

#[cfg(test)]
// Oracle constants keep their full recorded precision.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn eval_family_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_eq!(p2.eval(3.0).unwrap(), 9.0);
        let pl31 = YoungFunction::power_log(3.0, 1.0).unwrap();
        assert_eq!(pl31.eval(0.0).unwrap(), 0.0);
        let pl21 = YoungFunction::power_log(2.0, 1.0).unwrap();
        assert!((pl21.eval(1.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn eval_is_even_and_rejects_non_finite() {
        let phi = YoungFunction::power_log(2.0, 1.0).unwrap();
        for x in [0.3, 1.7, 42.0] {
            assert_eq!(phi.eval(x).unwrap(), phi.eval(-x).unwrap());
        }
        assert!(matches!(
            phi.eval(f64::NAN),
            Err(Error::NonFiniteInput { .. })
        ));
        assert!(matches!(
            phi.eval(f64::INFINITY),
            Err(Error::NonFiniteInput { .. })
        ));
    }

    #[test]
    fn omega_membership() {
        assert!(YoungFunction::power_log(3.0, 0.0)
            .unwrap()
            .is_omega_member());
        assert!(!YoungFunction::power_log(1.0, 0.0)
            .unwrap()
            .is_omega_member());
        assert!(YoungFunction::power_log(2.0, 1.0)
            .unwrap()
            .is_omega_member());
        assert!(matches!(
            YoungFunction::power_log(0.5, 0.0),
            Err(Error::InvalidYoungParameter { .. })
        ));
        assert!(matches!(
            YoungFunction::power_log(2.0, -1.0),
            Err(Error::InvalidYoungParameter { .. })
        ));
    }

    #[test]
    fn custom_certification() {
        // same function as PowerLog(2,1), via the expression grammar
        let c = YoungFunction::custom("x^2 * ln(1 + abs(x))").unwrap();
        let f = YoungFunction::power_log(2.0, 1.0).unwrap();
        for x in [0.1, 1.0, 7.5] {
            assert!((c.eval(x).unwrap() - f.eval(x).unwrap()).abs() < 1e-12);
        }
        // phi(0) != 0
        assert!(matches!(
            YoungFunction::custom("x^2 + 1"),
            Err(Error::YoungCertificateViolation { .. })
        ));
        // concave
        assert!(matches!(
            YoungFunction::custom("abs(x) / (1 + abs(x))"),
            Err(Error::ConvexityViolation { .. })
        ));
    }

    #[test]
    fn conjugate_examples() {
        let s = SearchParams::default();
        let p2 = YoungFunction::power(2.0).unwrap();
        assert!((complementary(&p2, 2.0, &s).unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(complementary(&p2, 0.0, &s).unwrap(), 0.0);

        let p3 = YoungFunction::power(3.0).unwrap();
        let expected = 2.0 / (3.0 * 3.0_f64.sqrt());
        assert!((complementary(&p3, 1.0, &s).unwrap() - expected).abs() < 1e-8);

        let p1 = YoungFunction::power(1.0).unwrap();
        assert!(matches!(
            complementary(&p1, 2.0, &s),
            Err(Error::UnboundedOnRange { .. })
        ));
        // |x|=1 sits on the boundary: objective is identically 0
        assert_eq!(complementary(&p1, 1.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn conjugate_is_order_reversing() {
        let s = SearchParams::default();
        let small = YoungFunction::power(2.0).unwrap();
        let big = YoungFunction::from_fn(|x| 2.0 * x * x).unwrap();
        for x in [0.5, 1.0, 3.0, 10.0] {
            let psi_small = complementary(&small, x, &s).unwrap();
            let psi_big = complementary(&big, x, &s).unwrap();
            assert!(psi_small >= psi_big - 1e-10);
        }
    }

    #[test]
    fn youngs_inequality_sampled() {
        let s = SearchParams::default();
        let phi = YoungFunction::power_log(2.0, 1.0).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let x = 0.05 * (i as f64 + 1.0) * (1.3_f64).powi(i);
                let y = 0.05 * (j as f64 + 1.0) * (1.3_f64).powi(j);
                let psi_y = complementary(&phi, y, &s).unwrap();
                assert!(
                    x * y <= phi.eval(x).unwrap() + psi_y + 1e-9,
                    "Young inequality violated at x={x}, y={y}"
                );
            }
        }
    }

    #[test]
    fn biconjugation_recovers_power() {
        let s = SearchParams::default();
        let phi = YoungFunction::power(2.0).unwrap();
        for x in [0.1, 1.0, 5.0, 10.0] {
            let psi_star = conjugate_fn(
                |y| conjugate_fn(|t| phi.eval_unchecked(t), y, &s).unwrap(),
                x,
                &s,
            )
            .unwrap();
            let rel = (psi_star - phi.eval_unchecked(x)).abs() / phi.eval_unchecked(x);
            assert!(rel < 1e-6, "biconjugate off by {rel} at x={x}");
        }
    }

    #[test]
    fn delta2_verdicts() {
        let grid = SearchParams::delta2_default();
        match is_delta2(&YoungFunction::power_log(3.0, 0.0).unwrap(), 0.0, &grid).unwrap() {
            Delta2Verdict::Certificate {
                k_estimate,
                asymptotic_ratio,
            } => {
                assert!((k_estimate - 8.0).abs() < 1e-9);
                assert_eq!(asymptotic_ratio, Some(8.0));
            }
            other => panic!("expected certificate, got {other:?}"),
        }
        match is_delta2(&YoungFunction::power_log(2.0, 1.0).unwrap(), 0.0, &grid).unwrap() {
            Delta2Verdict::Certificate {
                k_estimate,
                asymptotic_ratio,
            } => {
                assert!((4.0..=8.0 + 1e-9).contains(&k_estimate));
                assert_eq!(asymptotic_ratio, Some(4.0));
            }
            other => panic!("expected certificate, got {other:?}"),
        }
        let expy = YoungFunction::custom("exp(abs(x)) - 1").unwrap();
        assert!(matches!(
            is_delta2(&expy, 0.0, &grid).unwrap(),
            Delta2Verdict::Refutation { .. }
        ));
    }

    #[test]
    fn delta2_degenerate_function() {
        // relu(|x|-1)^2: a valid Young function that vanishes on [0,1]
        let flat = YoungFunction::custom("((abs(x) - 1 + abs(abs(x) - 1)) / 2)^2").unwrap();
        assert!(matches!(
            is_delta2(&flat, 0.0, &SearchParams::delta2_default()),
            Err(Error::DegenerateFunction { .. })
        ));
    }

    #[test]
    fn slope_verdicts() {
        let grid = default_eps_grid();
        let kinked = YoungFunction::custom("abs(x) + x^2").unwrap();
        match small_x_slope(&kinked, &grid).unwrap().verdict {
            SlopeVerdict::Positive { limit_estimate } => {
                assert!((limit_estimate - 1.0).abs() < 1e-6)
            }
            other => panic!("expected positive slope, got {other:?}"),
        }
        assert!(matches!(
            small_x_slope(&YoungFunction::power(2.0).unwrap(), &grid)
                .unwrap()
                .verdict,
            SlopeVerdict::Zero
        ));
        assert!(matches!(
            small_x_slope(&YoungFunction::power_log(3.0, 1.0).unwrap(), &grid)
                .unwrap()
                .verdict,
            SlopeVerdict::Zero
        ));
    }

    #[test]
    fn sequence_condition_verdicts() {
        let budgets = SeqBudgets {
            horizon: 10_000,
            divergence_target: 1.0,
        };
        let w = SequenceWitness::inv_sqrt();

        let p3 = YoungFunction::power(3.0).unwrap();
        let rep = check_sequence_condition(&p3, &p3, &w, &budgets).unwrap();
        assert_eq!(rep.verdict, SeqVerdict::Satisfied);
        // S1(10^4) = sum n^{-3/2} below zeta(3/2) = 2.612...
        assert!(rep.s1_partial < 2.612375348685488);
        assert!((rep.s1_partial - 2.59237584867298834).abs() < 1e-12);
        assert!((rep.product_partial - 9.78760603604438226).abs() < 1e-11);

        let p2 = YoungFunction::power(2.0).unwrap();
        assert!(matches!(
            check_sequence_condition(&p2, &p2, &w, &budgets)
                .unwrap()
                .verdict,
            SeqVerdict::WitnessFails { .. }
        ));

        let pl21 = YoungFunction::power_log(2.0, 1.0).unwrap();
        assert_eq!(
            check_sequence_condition(&pl21, &pl21, &w, &budgets)
                .unwrap()
                .verdict,
            SeqVerdict::Satisfied
        );

        // product converges when the witness decays too fast
        let fast = SequenceWitness {
            alpha: SequenceRule::InversePower { s: 1.0 },
            beta: SequenceRule::InversePower { s: 1.0 },
            tail_bound_method: TailBoundMethod::IntegralTest,
        };
        assert!(matches!(
            check_sequence_condition(&p3, &p3, &fast, &budgets)
                .unwrap()
                .verdict,
            SeqVerdict::WitnessFails { .. }
        ));
    }

    #[test]
    fn sequence_condition_monotone_in_horizon() {
        let p3 = YoungFunction::power(3.0).unwrap();
        let w = SequenceWitness::inv_sqrt();
        let mut satisfied_from = None;
        for m in [10u64, 100, 1000, 10_000] {
            let rep = check_sequence_condition(
                &p3,
                &p3,
                &w,
                &SeqBudgets {
                    horizon: m,
                    divergence_target: 1.0,
                },
            )
            .unwrap();
            if rep.verdict == SeqVerdict::Satisfied {
                satisfied_from.get_or_insert(m);
            } else {
                assert!(satisfied_from.is_none(), "verdict regressed at horizon {m}");
            }
        }
        assert!(satisfied_from.is_some());
    }

    #[test]
    fn sequence_condition_method_errors() {
        let p3 = YoungFunction::power(3.0).unwrap();
        let custom = YoungFunction::custom("x^2 * ln(1 + abs(x))").unwrap();
        let w = SequenceWitness::inv_sqrt();
        let budgets = SeqBudgets::default();
        assert!(matches!(
            check_sequence_condition(&custom, &p3, &w, &budgets),
            Err(Error::MethodInapplicable { .. })
        ));
        let growing = SequenceWitness {
            alpha: SequenceRule::InversePower { s: -0.5 },
            beta: SequenceRule::InversePower { s: 0.5 },
            tail_bound_method: TailBoundMethod::IntegralTest,
        };
        assert!(matches!(
            check_sequence_condition(&p3, &p3, &growing, &budgets),
            Err(Error::MethodInapplicable { .. })
        ));
        let partial_only = SequenceWitness {
            tail_bound_method: TailBoundMethod::PartialSumOnly,
            ..SequenceWitness::inv_sqrt()
        };
        let rep = check_sequence_condition(&p3, &p3, &partial_only, &budgets).unwrap();
        assert!(matches!(rep.verdict, SeqVerdict::Inconclusive { .. }));
        assert!(matches!(rep.s1_tail, TailStatus::Uncertified));
    }

    #[test]
    fn p_series_bounds_bracket_truth() {
        // sum_{n>=5} n^{-3/2} = 0.94137... (zeta tail)
        let upper = p_series_tail_bound(1.5, 5);
        assert!(upper > 0.941 && upper < 1.0, "upper = {upper}");
        // harmonic partial sum from 1 to 10^4 vs integral lower bound
        let lower = p_series_partial_lower(1.0, 1, 10_000);
        assert!(lower < 9.78760603604438226 && lower > 9.2);
    }
}
