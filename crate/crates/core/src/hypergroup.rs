//! Discrete hypergroups given by structure-constant tables.
//!
//! A discrete hypergroup is a countable carrier K with a convolution
//! sending each pair of points to a finitely supported probability
//! measure δ_x∗δ_y, an involution x ↦ x⁻, an identity e, and a
//! left-invariant Haar weight h. Carriers here are subsets of ℤ with an
//! explicit truncation window plus halo margin; every operation either
//! stays inside the halo or raises a boundary error, never truncating
//! silently.
//!
//! Center and aperiodicity verdicts are truncation-relative: the
//! mathematical definitions quantify over all of K, and the window is
//! all this artifact can inspect.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Carrier points are integers (built-in carriers use the natural
/// enumeration; user tables may use any labels they like).
pub type Point = i64;

/// Truncation window [lo, hi] with a halo margin on each side.
///
/// The core region is where functions live; the halo absorbs supports
/// of intermediate convolutions. Pairwise validation sweeps need
/// `halo >= hi - lo` so products of edge points stay inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Point,
    pub hi: Point,
    pub halo: Point,
}

impl Window {
    pub fn new(lo: Point, hi: Point, halo: Point) -> Result<Self> {
        if lo > hi || halo < 0 {
            return Err(Error::InvalidSearchParams {
                detail: format!(
                    "window needs lo <= hi and halo >= 0, got [{lo}, {hi}] halo {halo}"
                ),
            });
        }
        Ok(Self { lo, hi, halo })
    }

    /// [-radius, radius] with the given halo.
    pub fn symmetric(radius: Point, halo: Point) -> Result<Self> {
        Self::new(-radius, radius, halo)
    }

    pub fn contains(&self, x: Point) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_halo(&self, x: Point) -> bool {
        self.lo - self.halo <= x && x <= self.hi + self.halo
    }
}

/// Finitely supported complex measure on the carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    weights: BTreeMap<Point, Complex64>,
}

impl FiniteMeasure {
    pub fn zero() -> Self {
        Self {
            weights: BTreeMap::new(),
        }
    }

    pub fn dirac(x: Point) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(x, Complex64::new(1.0, 0.0));
        Self { weights }
    }

    /// Merge duplicate support points; exact-zero weights are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Point, Complex64)>) -> Self {
        let mut weights: BTreeMap<Point, Complex64> = BTreeMap::new();
        for (x, w) in pairs {
            *weights.entry(x).or_insert(Complex64::new(0.0, 0.0)) += w;
        }
        weights.retain(|_, w| w.re != 0.0 || w.im != 0.0);
        Self { weights }
    }

    pub fn from_real_pairs(pairs: impl IntoIterator<Item = (Point, f64)>) -> Self {
        Self::from_pairs(pairs.into_iter().map(|(x, w)| (x, Complex64::new(w, 0.0))))
    }

    pub fn support(&self) -> impl Iterator<Item = Point> + '_ {
        self.weights.keys().copied()
    }

    pub fn support_set(&self) -> BTreeSet<Point> {
        self.weights.keys().copied().collect()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, x: Point) -> Complex64 {
        self.weights
            .get(&x)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, Complex64)> + '_ {
        self.weights.iter().map(|(&x, &w)| (x, w))
    }

    pub fn total_mass(&self) -> Complex64 {
        self.weights.values().sum()
    }

    /// Total variation Σ|μ({x})|.
    pub fn total_variation(&self) -> f64 {
        self.weights.values().map(|w| w.norm()).sum()
    }

    /// Weighted total variation ‖μ‖_w = Σ|μ({x})| w(x).
    pub fn weighted_total_variation(&self, w: impl Fn(Point) -> f64) -> f64 {
        self.weights.iter().map(|(&x, v)| v.norm() * w(x)).sum()
    }

    /// Nonnegative real weights summing to 1 within 1e−12.
    pub fn is_probability(&self) -> bool {
        let mut sum = 0.0;
        for w in self.weights.values() {
            if w.im.abs() > 1e-12 || w.re < -1e-12 {
                return false;
            }
            sum += w.re;
        }
        (sum - 1.0).abs() <= 1e-12
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_pairs(self.iter().map(|(x, w)| (x, w * c)))
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::from_pairs(self.iter().chain(other.iter()))
    }

    /// μ⁻: support mapped through the involution, weights conjugated.
    pub fn involute(&self, h: &DiscreteHypergroup) -> Result<Self> {
        let mut pairs = Vec::with_capacity(self.weights.len());
        for (x, w) in self.iter() {
            pairs.push((h.inv(x)?, w.conj()));
        }
        Ok(Self::from_pairs(pairs))
    }

    /// Componentwise comparison over the union of supports.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let keys: BTreeSet<Point> = self.support().chain(other.support()).collect();
        keys.into_iter()
            .all(|x| (self.weight(x) - other.weight(x)).norm() <= tol)
    }
}

#[derive(Debug, Clone)]
struct Table {
    carrier: BTreeSet<Point>,
    rows: BTreeMap<(Point, Point), Vec<(Point, f64)>>,
    involution: BTreeMap<Point, Point>,
    identity: Point,
    haar: BTreeMap<Point, f64>,
}

#[derive(Debug, Clone)]
enum Kind {
    Integers,
    Cyclic { m: i64 },
    Chebyshev,
    Table(Table),
}

/// One convolution row of a user table: δ_x∗δ_y = Σ weights[i]·δ_support[i].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    pub x: Point,
    pub y: Point,
    pub support: Vec<Point>,
    pub weights: Vec<f64>,
}

/// User-supplied structure-constant table; see [`from_table`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableSpec {
    pub carrier: Vec<Point>,
    pub identity: Point,
    /// Pairs (x, x⁻); must be a bijection of the carrier.
    pub involution: Vec<(Point, Point)>,
    pub haar: Vec<(Point, f64)>,
    pub rows: Vec<TableRow>,
    /// Row-sum and axiom tolerance for floating-point tables.
    pub tol: f64,
}

impl TableSpec {
    /// The Chebyshev table restricted to carrier [0, max]: rows for all
    /// pairs with x + y ≤ max, dyadic weights. A worked example of the
    /// table format (and raw material for corruption tests).
    pub fn chebyshev(max: Point) -> Self {
        let carrier: Vec<Point> = (0..=max).collect();
        let mut rows = Vec::new();
        for x in 0..=max {
            for y in 0..=max {
                if x + y > max {
                    continue;
                }
                let row = if x == 0 {
                    TableRow {
                        x,
                        y,
                        support: vec![y],
                        weights: vec![1.0],
                    }
                } else if y == 0 {
                    TableRow {
                        x,
                        y,
                        support: vec![x],
                        weights: vec![1.0],
                    }
                } else if (x - y).abs() == x + y {
                    unreachable!("x, y >= 1 keeps the two support points distinct")
                } else {
                    TableRow {
                        x,
                        y,
                        support: vec![(x - y).abs(), x + y],
                        weights: vec![0.5, 0.5],
                    }
                };
                rows.push(row);
            }
        }
        TableSpec {
            carrier: carrier.clone(),
            identity: 0,
            involution: carrier.iter().map(|&x| (x, x)).collect(),
            haar: carrier
                .iter()
                .map(|&x| (x, if x == 0 { 1.0 } else { 2.0 }))
                .collect(),
            rows,
            tol: 1e-12,
        }
    }
}

/// Discrete hypergroup: carrier kind plus truncation window.
#[derive(Debug, Clone)]
pub struct DiscreteHypergroup {
    kind: Kind,
    window: Window,
}

/// ℤ with group convolution δ_x∗δ_y = δ_{x+y}, inv = −x, h ≡ 1.
pub fn make_integers(window: Window) -> DiscreteHypergroup {
    DiscreteHypergroup {
        kind: Kind::Integers,
        window,
    }
}

/// ℤ_m; the window is the whole carrier {0, …, m−1}.
pub fn make_cyclic(m: u64) -> Result<DiscreteHypergroup> {
    if m == 0 || m > i64::MAX as u64 {
        return Err(Error::InvalidTable {
            detail: format!("cyclic order must be in 1..=i64::MAX, got {m}"),
        });
    }
    let m = m as i64;
    Ok(DiscreteHypergroup {
        kind: Kind::Cyclic { m },
        window: Window {
            lo: 0,
            hi: m - 1,
            halo: 0,
        },
    })
}

/// Chebyshev polynomial hypergroup on ℕ₀:
/// δ_m∗δ_n = ½δ_{|m−n|} + ½δ_{m+n} for m,n ≥ 1, δ_0∗δ_n = δ_n,
/// involution = identity map, Haar weight h(0)=1, h(n)=2.
pub fn make_chebyshev(window: Window) -> Result<DiscreteHypergroup> {
    if window.lo < 0 {
        return Err(Error::InvalidTable {
            detail: format!(
                "chebyshev carrier is nonnegative; window.lo = {}",
                window.lo
            ),
        });
    }
    Ok(DiscreteHypergroup {
        kind: Kind::Chebyshev,
        window,
    })
}

/// Validate and wrap a user structure-constant table. The window is the
/// carrier's extent with no halo (the table is all there is).
///
/// Identity rows δ_e∗δ_x = δ_x = δ_x∗δ_e are synthesized when absent.
/// Axioms beyond per-row sanity are checked by [`validate_axioms`].
pub fn from_table(spec: TableSpec) -> Result<DiscreteHypergroup> {
    let carrier: BTreeSet<Point> = spec.carrier.iter().copied().collect();
    if carrier.len() != spec.carrier.len() {
        return Err(Error::InvalidTable {
            detail: "carrier has duplicate points".to_string(),
        });
    }
    if carrier.is_empty() {
        return Err(Error::InvalidTable {
            detail: "carrier is empty".to_string(),
        });
    }
    if !carrier.contains(&spec.identity) {
        return Err(Error::InvalidTable {
            detail: format!("identity {} not in carrier", spec.identity),
        });
    }
    if !(spec.tol.is_finite() && spec.tol >= 0.0) {
        return Err(Error::InvalidTable {
            detail: format!("tolerance must be finite and >= 0, got {}", spec.tol),
        });
    }

    let involution: BTreeMap<Point, Point> = spec.involution.iter().copied().collect();
    let image: BTreeSet<Point> = involution.values().copied().collect();
    if involution.len() != carrier.len()
        || !involution.keys().all(|x| carrier.contains(x))
        || image != carrier
    {
        return Err(Error::InvalidTable {
            detail: "involution is not a bijection of the carrier".to_string(),
        });
    }

    let haar: BTreeMap<Point, f64> = spec.haar.iter().copied().collect();
    for &x in &carrier {
        match haar.get(&x) {
            Some(&h) if h.is_finite() && h > 0.0 => {}
            Some(&h) => {
                return Err(Error::InvalidTable {
                    detail: format!("haar weight at {x} must be positive and finite, got {h}"),
                })
            }
            None => {
                return Err(Error::InvalidTable {
                    detail: format!("haar weight missing at {x}"),
                })
            }
        }
    }

    let mut rows: BTreeMap<(Point, Point), Vec<(Point, f64)>> = BTreeMap::new();
    for row in &spec.rows {
        if !carrier.contains(&row.x) || !carrier.contains(&row.y) {
            return Err(Error::InvalidTable {
                detail: format!(
                    "row ({}, {}) references points outside the carrier",
                    row.x, row.y
                ),
            });
        }
        if row.support.len() != row.weights.len() || row.support.is_empty() {
            return Err(Error::InvalidTable {
                detail: format!(
                    "row ({}, {}): support and weights must be nonempty and equal length",
                    row.x, row.y
                ),
            });
        }
        let distinct: BTreeSet<Point> = row.support.iter().copied().collect();
        if distinct.len() != row.support.len() {
            return Err(Error::InvalidTable {
                detail: format!("row ({}, {}): duplicate support points", row.x, row.y),
            });
        }
        let mut sum = 0.0;
        for (&t, &w) in row.support.iter().zip(&row.weights) {
            if !carrier.contains(&t) {
                return Err(Error::InvalidTable {
                    detail: format!(
                        "row ({}, {}): support point {t} outside the carrier",
                        row.x, row.y
                    ),
                });
            }
            if !w.is_finite() || w < -spec.tol {
                return Err(Error::InvalidTable {
                    detail: format!("row ({}, {}): weight {w} at {t} is negative", row.x, row.y),
                });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > spec.tol {
            return Err(Error::InvalidTable {
                detail: format!("row ({}, {}) sums to {sum}, not 1", row.x, row.y),
            });
        }
        let key = (row.x, row.y);
        if rows
            .insert(
                key,
                row.support
                    .iter()
                    .copied()
                    .zip(row.weights.iter().copied())
                    .collect(),
            )
            .is_some()
        {
            return Err(Error::InvalidTable {
                detail: format!("duplicate row for ({}, {})", row.x, row.y),
            });
        }
    }
    // synthesize identity rows so sparse tables stay usable
    for &x in &carrier {
        rows.entry((spec.identity, x))
            .or_insert_with(|| vec![(x, 1.0)]);
        rows.entry((x, spec.identity))
            .or_insert_with(|| vec![(x, 1.0)]);
    }

    let lo = *carrier.first().unwrap();
    let hi = *carrier.last().unwrap();
    Ok(DiscreteHypergroup {
        kind: Kind::Table(Table {
            carrier,
            rows,
            involution,
            identity: spec.identity,
            haar,
        }),
        window: Window { lo, hi, halo: 0 },
    })
}

impl DiscreteHypergroup {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn identity(&self) -> Point {
        match &self.kind {
            Kind::Integers | Kind::Cyclic { .. } | Kind::Chebyshev => 0,
            Kind::Table(t) => t.identity,
        }
    }

    pub fn carrier_contains(&self, x: Point) -> bool {
        match &self.kind {
            Kind::Integers => true,
            Kind::Cyclic { m } => 0 <= x && x < *m,
            Kind::Chebyshev => x >= 0,
            Kind::Table(t) => t.carrier.contains(&x),
        }
    }

    /// Point is inside the halo region and the carrier.
    pub fn in_halo(&self, x: Point) -> bool {
        self.carrier_contains(x)
            && match &self.kind {
                Kind::Cyclic { .. } | Kind::Table(..) => true, // finite carriers are their own halo
                _ => self.window.contains_halo(x),
            }
    }

    fn require_halo(&self, x: Point, role: &str) -> Result<()> {
        if self.in_halo(x) {
            Ok(())
        } else {
            Err(Error::HaloOverflow {
                detail: format!(
                    "{role} point {x} leaves the halo region of window [{}, {}] (halo {})",
                    self.window.lo, self.window.hi, self.window.halo
                ),
            })
        }
    }

    /// Carrier points in the window core, ascending.
    pub fn core_points(&self) -> Vec<Point> {
        self.points_in(self.window.lo, self.window.hi)
    }

    /// Carrier points in the halo region, ascending.
    pub fn halo_points(&self) -> Vec<Point> {
        self.points_in(
            self.window.lo - self.window.halo,
            self.window.hi + self.window.halo,
        )
    }

    pub fn points_in(&self, lo: Point, hi: Point) -> Vec<Point> {
        match &self.kind {
            Kind::Integers => (lo..=hi).collect(),
            Kind::Cyclic { m } => (0..*m).collect(),
            Kind::Chebyshev => (lo.max(0)..=hi).collect(),
            Kind::Table(t) => t.carrier.range(lo..=hi).copied().collect(),
        }
    }

    /// Finite carriers (ℤ_m, tables) have no notion of infinity.
    pub fn is_finite_carrier(&self) -> bool {
        matches!(self.kind, Kind::Cyclic { .. } | Kind::Table(..))
    }

    pub fn inv(&self, x: Point) -> Result<Point> {
        self.require_halo(x, "involution input")?;
        match &self.kind {
            Kind::Integers => Ok(-x),
            Kind::Cyclic { m } => Ok((m - x) % m),
            Kind::Chebyshev => Ok(x),
            Kind::Table(t) => Ok(t.involution[&x]),
        }
    }

    /// Haar weight h(x); x must be a carrier point.
    pub fn haar(&self, x: Point) -> f64 {
        match &self.kind {
            Kind::Integers | Kind::Cyclic { .. } => 1.0,
            Kind::Chebyshev => {
                if x == 0 {
                    1.0
                } else {
                    2.0
                }
            }
            Kind::Table(t) => *t
                .haar
                .get(&x)
                .unwrap_or_else(|| panic!("haar queried outside the carrier at {x}")),
        }
    }

    /// Haar mass λ(E) = Σ_{t∈E} h(t).
    pub fn haar_mass(&self, set: &BTreeSet<Point>) -> f64 {
        set.iter().map(|&t| self.haar(t)).sum()
    }

    /// Structure constants: the probability measure δ_x∗δ_y.
    pub fn conv(&self, x: Point, y: Point) -> Result<FiniteMeasure> {
        self.require_halo(x, "convolution input")?;
        self.require_halo(y, "convolution input")?;
        match &self.kind {
            Kind::Integers => {
                let s = x.checked_add(y).ok_or_else(|| Error::HaloOverflow {
                    detail: format!("integer overflow in {x} + {y}"),
                })?;
                self.require_halo(s, "convolution output")?;
                Ok(FiniteMeasure::dirac(s))
            }
            Kind::Cyclic { m } => Ok(FiniteMeasure::dirac((x + y).rem_euclid(*m))),
            Kind::Chebyshev => {
                if x == 0 {
                    return Ok(FiniteMeasure::dirac(y));
                }
                if y == 0 {
                    return Ok(FiniteMeasure::dirac(x));
                }
                let d = (x - y).abs();
                let s = x.checked_add(y).ok_or_else(|| Error::HaloOverflow {
                    detail: format!("integer overflow in {x} + {y}"),
                })?;
                self.require_halo(s, "convolution output")?;
                Ok(FiniteMeasure::from_real_pairs([(d, 0.5), (s, 0.5)]))
            }
            Kind::Table(t) => match t.rows.get(&(x, y)) {
                Some(row) => Ok(FiniteMeasure::from_real_pairs(row.iter().copied())),
                None => Err(Error::HaloOverflow {
                    detail: format!("table has no row for ({x}, {y})"),
                }),
            },
        }
    }
}

/// μ∗ν = Σ_{x,y} μ({x})ν({y})·(δ_x∗δ_y), the bilinear extension of the
/// structure constants.
pub fn convolve_measures(
    h: &DiscreteHypergroup,
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
) -> Result<FiniteMeasure> {
    let mut pairs: Vec<(Point, Complex64)> = Vec::new();
    for (x, wx) in mu.iter() {
        for (y, wy) in nu.iter() {
            let p = h.conv(x, y)?;
            let c = wx * wy;
            for (t, wt) in p.iter() {
                pairs.push((t, c * wt));
            }
        }
    }
    Ok(FiniteMeasure::from_pairs(pairs))
}

/// x∗F = ∪_{y∈F} supp(δ_x∗δ_y).
pub fn translate_set(
    h: &DiscreteHypergroup,
    x: Point,
    set: &BTreeSet<Point>,
) -> Result<BTreeSet<Point>> {
    let mut out = BTreeSet::new();
    for &y in set {
        out.extend(h.conv(x, y)?.support());
    }
    Ok(out)
}

/// E∗F = ∪_{t∈E} (t∗F).
pub fn set_star(
    h: &DiscreteHypergroup,
    e: &BTreeSet<Point>,
    f: &BTreeSet<Point>,
) -> Result<BTreeSet<Point>> {
    let mut out = BTreeSet::new();
    for &t in e {
        out.extend(translate_set(h, t, f)?);
    }
    Ok(out)
}

/// Pass/fail evidence for one axiom.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

impl AxiomCheck {
    fn pass(name: &'static str) -> Self {
        Self {
            name,
            passed: true,
            witness: None,
        }
    }

    fn fail(name: &'static str, witness: String) -> Self {
        Self {
            name,
            passed: false,
            witness: Some(witness),
        }
    }
}

/// Result of [`validate_axioms`]; `all_passed` covers the six axiom
/// checks, with commutativity reported separately as a flag.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub window: Window,
    pub probe_window: Vec<Point>,
    pub checks: Vec<AxiomCheck>,
    pub commutative: bool,
    pub all_passed: bool,
}

/// Up to six core points closest to the identity, for the cubic-cost
/// associativity and Haar sweeps.
fn probe_points(h: &DiscreteHypergroup, window: &Window) -> Vec<Point> {
    let e = h.identity();
    let mut pts: Vec<Point> = h
        .core_points()
        .into_iter()
        .filter(|x| window.contains(*x))
        .collect();
    pts.sort_by_key(|&x| ((x - e).abs(), x));
    pts.truncate(6);
    pts.sort_unstable();
    pts
}

/// Check the hypergroup axioms on the truncation:
///
/// 1. δ_x∗δ_y is a probability measure (all core pairs);
/// 2. identity law δ_e∗δ_x = δ_x = δ_x∗δ_e (all core points);
/// 3. involution: x⁻⁻ = x and (δ_x∗δ_y)⁻ = δ_{y⁻}∗δ_{x⁻} (all core pairs);
/// 4. e ∈ supp(δ_x∗δ_y) iff x = y⁻ (all core pairs);
/// 5. associativity of measure convolution, brute force over all
///    triples in a size-6 probe window around the identity;
/// 6. Haar left-invariance Σ_x h(x)·(δ_z∗δ_x)({t}) = h(t) over probe
///    pairs (z,t), contributors located through the adjoint relation
///    x ∈ supp(δ_{z⁻}∗δ_t).
///
/// Insufficient halo surfaces as a `HaloOverflow` error, not a silent
/// pass; pairwise sweeps need `halo >= hi - lo`.
pub fn validate_axioms(h: &DiscreteHypergroup, window: &Window) -> Result<ValidationReport> {
    let tol = match &h.kind {
        Kind::Table(_) => 1e-9,
        _ => 1e-12,
    };
    let core: Vec<Point> = h
        .core_points()
        .into_iter()
        .filter(|x| window.contains(*x))
        .collect();
    if core.is_empty() {
        return Err(Error::InvalidSearchParams {
            detail: "validation window contains no carrier points".to_string(),
        });
    }
    let e = h.identity();
    let mut checks = Vec::with_capacity(6);

    let mut probability = AxiomCheck::pass("probability");
    'prob: for &x in &core {
        for &y in &core {
            let p = h.conv(x, y)?;
            if !p.is_probability() {
                probability = AxiomCheck::fail(
                    "probability",
                    format!("conv({x}, {y}) has mass {}", p.total_mass()),
                );
                break 'prob;
            }
        }
    }
    checks.push(probability);

    let mut identity = AxiomCheck::pass("identity");
    for &x in &core {
        let left = h.conv(e, x)?;
        let right = h.conv(x, e)?;
        let expected = FiniteMeasure::dirac(x);
        if !left.approx_eq(&expected, tol) || !right.approx_eq(&expected, tol) {
            identity = AxiomCheck::fail("identity", format!("identity law fails at x = {x}"));
            break;
        }
    }
    checks.push(identity);

    let mut involution = AxiomCheck::pass("involution");
    'inv: for &x in &core {
        if h.inv(h.inv(x)?)? != x {
            involution = AxiomCheck::fail("involution", format!("inv(inv({x})) != {x}"));
            break;
        }
        for &y in &core {
            let lhs = h.conv(x, y)?.involute(h)?;
            let rhs = h.conv(h.inv(y)?, h.inv(x)?)?;
            if !lhs.approx_eq(&rhs, tol) {
                involution = AxiomCheck::fail(
                    "involution",
                    format!("(d_{x}*d_{y})^- != d_{}*d_{}", h.inv(y)?, h.inv(x)?),
                );
                break 'inv;
            }
        }
    }
    checks.push(involution);

    let mut identity_support = AxiomCheck::pass("identity_in_support");
    'supp: for &x in &core {
        for &y in &core {
            let has_e = h.conv(x, y)?.weight(e).norm() > tol;
            let should = x == h.inv(y)?;
            if has_e != should {
                identity_support = AxiomCheck::fail(
                    "identity_in_support",
                    format!("e in supp(d_{x}*d_{y}) is {has_e}, but x == inv(y) is {should}"),
                );
                break 'supp;
            }
        }
    }
    checks.push(identity_support);

    let probe = probe_points(h, window);

    let mut associativity = AxiomCheck::pass("associativity");
    'assoc: for &x in &probe {
        for &y in &probe {
            for &z in &probe {
                let xy = h.conv(x, y)?;
                let yz = h.conv(y, z)?;
                let lhs = convolve_measures(h, &xy, &FiniteMeasure::dirac(z))?;
                let rhs = convolve_measures(h, &FiniteMeasure::dirac(x), &yz)?;
                if !lhs.approx_eq(&rhs, tol) {
                    associativity = AxiomCheck::fail(
                        "associativity",
                        format!("(d_{x}*d_{y})*d_{z} != d_{x}*(d_{y}*d_{z})"),
                    );
                    break 'assoc;
                }
            }
        }
    }
    checks.push(associativity);

    let mut haar = AxiomCheck::pass("haar_invariance");
    'haar: for &z in &probe {
        for &t in &probe {
            let contributors = translate_set(h, h.inv(z)?, &BTreeSet::from([t]))?;
            let mut sum = 0.0;
            for &x in &contributors {
                sum += h.haar(x) * h.conv(z, x)?.weight(t).re;
            }
            let expected = h.haar(t);
            if (sum - expected).abs() > tol * expected.abs().max(1.0) {
                haar = AxiomCheck::fail(
                    "haar_invariance",
                    format!("sum_x h(x)(d_{z}*d_x)({{{t}}}) = {sum}, expected h({t}) = {expected}"),
                );
                break 'haar;
            }
        }
    }
    checks.push(haar);

    let mut commutative = true;
    'comm: for &x in &core {
        for &y in &core {
            if !h.conv(x, y)?.approx_eq(&h.conv(y, x)?, tol) {
                commutative = false;
                break 'comm;
            }
        }
    }

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        window: *window,
        probe_window: probe,
        checks,
        commutative,
        all_passed,
    })
}

/// Truncation-relative center: points x with |supp(δ_x∗δ_y)| = 1 for
/// every y in the window.
pub fn center(h: &DiscreteHypergroup, window: &Window) -> Result<Vec<Point>> {
    let core: Vec<Point> = h
        .core_points()
        .into_iter()
        .filter(|x| window.contains(*x))
        .collect();
    let mut out = Vec::new();
    'outer: for &x in &core {
        for &y in &core {
            if h.conv(x, y)?.support_len() != 1 {
                continue 'outer;
            }
        }
        out.push(x);
    }
    Ok(out)
}

fn require_central(h: &DiscreteHypergroup, a: Point, window: &Window) -> Result<()> {
    for y in h.core_points() {
        if !window.contains(y) {
            continue;
        }
        if h.conv(a, y)?.support_len() != 1 {
            return Err(Error::NotInCenter { x: a });
        }
    }
    Ok(())
}

/// Verdict of the aperiodicity scan, always truncation-relative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Aperiodicity {
    /// Smallest N ≤ n_max with E ∩ aⁿE = ∅ for every n in [N, n_max].
    FoundN { n: u64 },
    /// Some translate still meets E at n_max.
    NotWithinBound { scanned_to: u64 },
    /// aⁿE returned to E exactly; no N can exist.
    Periodic { period: u64 },
}

/// Scan E ∩ aⁿE for n = 1..=n_max, where a must be central so that the
/// iterated translates aⁿE = a∗(a∗(…∗E)) are well defined point sets.
pub fn is_aperiodic(
    h: &DiscreteHypergroup,
    a: Point,
    set: &BTreeSet<Point>,
    n_max: u64,
) -> Result<Aperiodicity> {
    if set.is_empty() || n_max == 0 {
        return Err(Error::InvalidNeighborhood {
            detail: "aperiodicity scan needs a nonempty set and n_max >= 1".to_string(),
        });
    }
    require_central(h, a, &h.window)?;

    let mut translated = set.clone();
    let mut last_hit = 0u64;
    for n in 1..=n_max {
        translated = translate_set(h, a, &translated)?;
        if translated == *set {
            return Ok(Aperiodicity::Periodic { period: n });
        }
        if translated.intersection(set).next().is_some() {
            last_hit = n;
        }
    }
    if last_hit == n_max {
        Ok(Aperiodicity::NotWithinBound { scanned_to: n_max })
    } else {
        Ok(Aperiodicity::FoundN { n: last_hit + 1 })
    }
}

/// Eq. λ(x∗E) = λ(E) for central x: compare Haar masses within
/// 1e−12·scale.
pub fn center_invariance_check(
    h: &DiscreteHypergroup,
    x: Point,
    set: &BTreeSet<Point>,
    window: &Window,
) -> Result<bool> {
    require_central(h, x, window)?;
    let translated = translate_set(h, x, set)?;
    let lhs = h.haar_mass(&translated);
    let rhs = h.haar_mass(set);
    Ok((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integers(radius: Point, halo: Point) -> DiscreteHypergroup {
        make_integers(Window::symmetric(radius, halo).unwrap())
    }

    fn chebyshev(hi: Point, halo: Point) -> DiscreteHypergroup {
        make_chebyshev(Window { lo: 0, hi, halo }).unwrap()
    }

    #[test]
    fn built_in_structure_constants() {
        let z = integers(10, 10);
        assert_eq!(z.conv(2, 3).unwrap(), FiniteMeasure::dirac(5));
        assert_eq!(z.inv(4).unwrap(), -4);
        assert_eq!(z.haar(7), 1.0);

        let ch = chebyshev(20, 20);
        let expected = FiniteMeasure::from_real_pairs([(0, 0.5), (2, 0.5)]);
        assert_eq!(ch.conv(1, 1).unwrap(), expected);
        assert_eq!(ch.conv(0, 5).unwrap(), FiniteMeasure::dirac(5));
        assert_eq!(ch.haar(0), 1.0);
        assert_eq!(ch.haar(3), 2.0);

        let c3 = make_cyclic(3).unwrap();
        assert_eq!(c3.conv(1, 2).unwrap(), FiniteMeasure::dirac(0));
        assert_eq!(c3.inv(1).unwrap(), 2);
    }

    #[test]
    fn halo_overflow_is_loud() {
        let z = integers(5, 0);
        assert!(matches!(z.conv(4, 3), Err(Error::HaloOverflow { .. })));
        let ch = chebyshev(10, 2);
        assert!(matches!(ch.conv(7, 7), Err(Error::HaloOverflow { .. })));
        assert!(matches!(ch.inv(-1), Err(Error::HaloOverflow { .. })));
    }

    #[test]
    fn measure_convolution_examples() {
        let z = integers(10, 10);
        let d3 = convolve_measures(&z, &FiniteMeasure::dirac(1), &FiniteMeasure::dirac(2)).unwrap();
        assert_eq!(d3, FiniteMeasure::dirac(3));

        let ch = chebyshev(20, 20);
        let mu = FiniteMeasure::from_real_pairs([(0, 0.5), (1, 0.5)]);
        let nu = FiniteMeasure::dirac(1);
        let out = convolve_measures(&ch, &mu, &nu).unwrap();
        let expected = FiniteMeasure::from_real_pairs([(1, 0.5), (0, 0.25), (2, 0.25)]);
        assert!(out.approx_eq(&expected, 1e-15));
        assert!(out.is_probability());

        // identity law on measures
        let e = FiniteMeasure::dirac(ch.identity());
        assert!(convolve_measures(&ch, &e, &mu)
            .unwrap()
            .approx_eq(&mu, 1e-15));
    }

    #[test]
    fn validation_passes_on_built_ins() {
        let z = integers(10, 10);
        let report = validate_axioms(&z, &z.window()).unwrap();
        assert!(report.all_passed, "{report:?}");
        assert!(report.commutative);

        let ch = chebyshev(20, 20);
        let report = validate_axioms(&ch, &ch.window()).unwrap();
        assert!(report.all_passed, "{report:?}");
        assert!(report.commutative);

        for m in 1..=12 {
            let c = make_cyclic(m).unwrap();
            let report = validate_axioms(&c, &c.window()).unwrap();
            assert!(report.all_passed, "cyclic {m}: {report:?}");
        }
    }

    #[test]
    fn corrupted_table_fails_with_witness() {
        let mut spec = TableSpec::chebyshev(20);
        for row in &mut spec.rows {
            if row.x == 1 && row.y == 1 {
                row.weights = vec![0.6, 0.4];
            }
        }
        let h = from_table(spec).unwrap(); // rows still sum to 1
                                           // pairs from [0, 10] have their products inside the table
        let report = validate_axioms(
            &h,
            &Window {
                lo: 0,
                hi: 10,
                halo: 0,
            },
        )
        .unwrap();
        assert!(!report.all_passed);
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        assert!(failed.contains(&"associativity"), "failed = {failed:?}");
        assert!(failed.contains(&"haar_invariance"), "failed = {failed:?}");
        for c in report.checks.iter().filter(|c| !c.passed) {
            assert!(c.witness.is_some());
        }
    }

    #[test]
    fn table_construction_rejections() {
        let mut bad_sum = TableSpec::chebyshev(6);
        bad_sum.rows[10].weights[0] += 0.25;
        assert!(matches!(
            from_table(bad_sum),
            Err(Error::InvalidTable { .. })
        ));

        let mut bad_inv = TableSpec::chebyshev(6);
        bad_inv.involution = (0..=6).map(|x| (x, 0)).collect();
        assert!(matches!(
            from_table(bad_inv),
            Err(Error::InvalidTable { .. })
        ));
    }

    #[test]
    fn table_matches_built_in_chebyshev() {
        let t = from_table(TableSpec::chebyshev(12)).unwrap();
        let ch = chebyshev(12, 12);
        for x in 0..=6 {
            for y in 0..=6 {
                assert!(t
                    .conv(x, y)
                    .unwrap()
                    .approx_eq(&ch.conv(x, y).unwrap(), 1e-15));
            }
        }
        // triple products from [0, 4] stay within the 12-point table
        let report = validate_axioms(
            &t,
            &Window {
                lo: 0,
                hi: 4,
                halo: 0,
            },
        )
        .unwrap();
        assert!(report.all_passed, "{report:?}");
    }

    #[test]
    fn center_examples() {
        let z = integers(10, 10);
        assert_eq!(center(&z, &z.window()).unwrap(), z.core_points());

        let ch = chebyshev(20, 20);
        assert_eq!(center(&ch, &ch.window()).unwrap(), vec![0]);

        let c3 = make_cyclic(3).unwrap();
        assert_eq!(center(&c3, &c3.window()).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn translate_and_star() {
        let z = integers(10, 10);
        let e: BTreeSet<Point> = [0, 1].into();
        assert_eq!(translate_set(&z, 3, &e).unwrap(), BTreeSet::from([3, 4]));

        let ch = chebyshev(20, 20);
        assert_eq!(
            translate_set(&ch, 1, &BTreeSet::from([1])).unwrap(),
            BTreeSet::from([0, 2])
        );
        let f: BTreeSet<Point> = [0, 1, 5].into();
        assert_eq!(translate_set(&ch, 0, &f).unwrap(), f);

        let u: BTreeSet<Point> = [0, 1].into();
        assert_eq!(set_star(&ch, &u, &u).unwrap(), BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn aperiodicity_examples() {
        let z = integers(40, 40);
        let e: BTreeSet<Point> = (-3..=3).collect();
        assert_eq!(
            is_aperiodic(&z, 1, &e, 20).unwrap(),
            Aperiodicity::FoundN { n: 7 }
        );
        assert_eq!(
            is_aperiodic(&z, 2, &BTreeSet::from([0, 1]), 15).unwrap(),
            Aperiodicity::FoundN { n: 1 }
        );

        let c5 = make_cyclic(5).unwrap();
        assert_eq!(
            is_aperiodic(&c5, 1, &BTreeSet::from([0]), 30).unwrap(),
            Aperiodicity::Periodic { period: 5 }
        );

        let ch = chebyshev(20, 20);
        assert!(matches!(
            is_aperiodic(&ch, 1, &BTreeSet::from([0, 1]), 10),
            Err(Error::NotInCenter { x: 1 })
        ));
    }

    #[test]
    fn center_invariance_examples() {
        let z = integers(10, 10);
        let e: BTreeSet<Point> = [0, 1, 2].into();
        assert!(center_invariance_check(&z, 5, &e, &z.window()).unwrap());

        let ch = chebyshev(20, 20);
        assert!(center_invariance_check(&ch, 0, &BTreeSet::from([0, 1, 5]), &ch.window()).unwrap());

        let c6 = make_cyclic(6).unwrap();
        assert!(center_invariance_check(&c6, 2, &BTreeSet::from([0, 1]), &c6.window()).unwrap());
    }

    #[test]
    fn probability_and_variation() {
        let mu = FiniteMeasure::from_real_pairs([(0, 0.5), (2, 0.5)]);
        assert!(mu.is_probability());
        let signed = FiniteMeasure::from_real_pairs([(0, -1.0), (3, 2.0)]);
        assert!(!signed.is_probability());
        assert_eq!(signed.total_variation(), 3.0);
        assert_eq!(signed.weighted_total_variation(|x| (x + 1) as f64), 9.0);
        assert_eq!(signed.total_mass(), Complex64::new(1.0, 0.0));
    }
}
