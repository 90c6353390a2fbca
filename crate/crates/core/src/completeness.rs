//! Cauchy and convergence notions for sequences, completeness evidence, and
//! the fixed-point-free Kannan map on a space that is not p-sequentially
//! complete.
//!
//! Every verdict here is numerical: a sequence is judged on the last quarter
//! of a finite horizon, and convergence only against explicit candidates.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::axioms::{tuples, CheckStrategy, PointSampler};
use crate::error::{Error, Result};
use crate::kannan::{check_kannan, KannanConstant, Mapping};
use crate::report::{Tally, VerificationReport};
use crate::spaces::{Point, Space, PAPER_EXAMPLE, PAPER_EXAMPLE_PUNCTURED};

pub const DEFAULT_HORIZON: usize = 256;
pub const MIN_HORIZON: usize = 16;
/// Fraction of `p(x, C_x)` that tail distances must stay under when choosing `n(x)`.
pub const THRESHOLD_FRACTION: f64 = 1.0 / 8.0;
/// Kannan constant of the counterexample map.
pub const COUNTEREXAMPLE_LAMBDA: f64 = 1.0 / 8.0;

const TAIL_TOLERANCE: f64 = 1e-12;
const MAX_SELECTOR_INDEX: usize = 1100;

#[derive(Clone)]
pub enum SequenceKind {
    /// `ratio^n`
    Geometric { ratio: f64 },
    /// `1 / n`
    Harmonic,
    /// `n / (n + 1)`
    Saturating,
    Constant(Point),
    /// `values[n - 1]`
    Values(Vec<f64>),
    Custom(Arc<dyn Fn(usize) -> Point + Send + Sync>),
}

/// A sequence `(x_n)_{n >= 1}` evaluated up to `horizon`.
#[derive(Clone)]
pub struct SequenceSpec {
    name: String,
    kind: SequenceKind,
    horizon: usize,
}

impl fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SequenceSpec({}, horizon {})", self.name, self.horizon)
    }
}

impl SequenceSpec {
    fn build(name: String, kind: SequenceKind, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Argument("sequence horizon must be positive".into()));
        }
        Ok(Self { name, kind, horizon })
    }

    pub fn geometric(ratio: f64, horizon: usize) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::Argument(format!("geometric ratio must be positive, got {ratio}")));
        }
        Self::build(format!("geometric({ratio})"), SequenceKind::Geometric { ratio }, horizon)
    }

    pub fn harmonic(horizon: usize) -> Result<Self> {
        Self::build("harmonic".into(), SequenceKind::Harmonic, horizon)
    }

    pub fn saturating(horizon: usize) -> Result<Self> {
        Self::build("saturating".into(), SequenceKind::Saturating, horizon)
    }

    pub fn constant(point: Point, horizon: usize) -> Result<Self> {
        Self::build(format!("constant({point})"), SequenceKind::Constant(point), horizon)
    }

    /// Explicit terms; the horizon is the number of values.
    pub fn values(values: Vec<f64>) -> Result<Self> {
        let horizon = values.len();
        Self::build("list".into(), SequenceKind::Values(values), horizon)
    }

    pub fn custom(
        name: impl Into<String>,
        horizon: usize,
        f: impl Fn(usize) -> Point + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::build(name.into(), SequenceKind::Custom(Arc::new(f)), horizon)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_horizon(mut self, horizon: usize) -> Result<Self> {
        if matches!(self.kind, SequenceKind::Values(_)) && horizon != self.horizon {
            return Err(Error::Argument("a value list fixes its own horizon".into()));
        }
        self.horizon = horizon;
        Ok(self)
    }

    /// `x_n` for `n >= 1`. Value lists have no terms past their end.
    pub fn term(&self, n: usize) -> Option<Point> {
        if n == 0 {
            return None;
        }
        Some(match &self.kind {
            SequenceKind::Geometric { ratio } => Point::Coord(ratio.powi(n as i32)),
            SequenceKind::Harmonic => Point::Coord(1.0 / n as f64),
            SequenceKind::Saturating => Point::Coord(n as f64 / (n as f64 + 1.0)),
            SequenceKind::Constant(p) => *p,
            SequenceKind::Values(v) => Point::Coord(*v.get(n - 1)?),
            SequenceKind::Custom(f) => f(n),
        })
    }

    /// Terms `x_1 ..= x_horizon`, all checked against the space.
    pub fn terms(&self, space: &Space) -> Result<Vec<Point>> {
        (1..=self.horizon)
            .map(|n| {
                let p = self.term(n).ok_or_else(|| Error::Argument(format!("no term {n} in {}", self.name)))?;
                if let (SequenceKind::Geometric { .. }, Point::Coord(x)) = (&self.kind, p) {
                    if x == 0.0 {
                        return Err(Error::Argument(format!(
                            "term {n} of {} underflows to 0; use a shorter horizon",
                            self.name
                        )));
                    }
                }
                space.check_point(p)
            })
            .collect()
    }
}

/// Parses `geometric:R`, `geometric(R)`, `harmonic`, `saturating`,
/// `list:a,b,c` or `list(a,b,c)`.
pub fn parse_sequence(text: &str, horizon: usize) -> Result<SequenceSpec> {
    let text = text.trim();
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => match text.split_once('(') {
            Some((n, a)) => (n, Some(a.strip_suffix(')').unwrap_or(a))),
            None => (text, None),
        },
    };
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number `{s}` in sequence `{text}`")))
    };
    match (name, arg) {
        ("geometric", Some(a)) => SequenceSpec::geometric(number(a)?, horizon),
        ("harmonic", None) => SequenceSpec::harmonic(horizon),
        ("saturating", None) => SequenceSpec::saturating(horizon),
        ("list", Some(a)) => SequenceSpec::values(a.split(',').map(number).collect::<Result<_>>()?),
        _ => Err(Error::Lookup {
            kind: "sequence",
            name: text.to_string(),
            available: vec![
                "geometric:R".into(),
                "harmonic".into(),
                "saturating".into(),
                "list:a,b,...".into(),
            ],
        }),
    }
}

/// `2^-n`, `1/n` and `n/(n+1)`.
pub fn default_family(horizon: usize) -> Result<Vec<SequenceSpec>> {
    Ok(vec![
        SequenceSpec::geometric(0.5, horizon)?,
        SequenceSpec::harmonic(horizon)?,
        SequenceSpec::saturating(horizon)?,
    ])
}

/// Every point of a finite space; a fixed grid for analytic spaces.
pub fn default_candidates(space: &Space) -> Vec<Point> {
    if space.is_finite() {
        return space.points();
    }
    [0.0, 1e-6, 1e-3, 0.1, 0.25, 0.5, 1.0, 2.0, 10.0, 100.0]
        .into_iter()
        .map(Point::Coord)
        .filter(|&p| space.contains(p))
        .collect()
}

/// Spread of a double-indexed family over the tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailVerdict {
    pub holds: bool,
    pub min: f64,
    pub max: f64,
    /// Midpoint of the tail range, the estimated limit.
    pub limit: f64,
}

impl TailVerdict {
    fn from_values(values: impl Iterator<Item = f64>, tolerance: f64) -> Self {
        let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Self {
            holds: max - min <= tolerance,
            min,
            max,
            limit: 0.5 * (min + max),
        }
    }

    /// The tail stays within tolerance of zero.
    pub fn limit_is_zero(&self, tolerance: f64) -> bool {
        self.holds && self.max <= tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceClassification {
    pub sequence: String,
    pub horizon: usize,
    pub tolerance: f64,
    /// `p(x_n, x_m)` over `n <= m` stabilizes.
    pub left_p_cauchy: TailVerdict,
    /// `p+(x_n, x_m)` over all `n, m` stabilizes.
    pub tau_p_plus_cauchy: TailVerdict,
    /// `p(x_n, x_m)` over `n < m` stabilizes. Auxiliary; not used as a completeness notion.
    pub strict_forward_limit: TailVerdict,
    /// First candidate `x` with `p(x, x_n) -> p(x, x)`.
    pub tau_p_convergent_to: Option<Point>,
    /// First candidate `x` with `p+(x_n, x) -> p+(x, x)`.
    pub tau_p_plus_convergent_to: Option<Point>,
    pub candidates_tested: usize,
}

pub fn classify_sequence(
    space: &Space,
    seq: &SequenceSpec,
    candidates: &[Point],
    tolerance: f64,
) -> Result<SequenceClassification> {
    let horizon = seq.horizon();
    if horizon < MIN_HORIZON {
        return Err(Error::Argument(format!("horizon {horizon} is below the minimum {MIN_HORIZON}")));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Argument(format!("tolerance must be positive, got {tolerance}")));
    }
    for &c in candidates {
        space.check_point(c)?;
    }
    let terms = seq.terms(space)?;
    let tail = &terms[horizon - horizon / 4..];

    let forward_pairs = || {
        tail.iter()
            .enumerate()
            .flat_map(move |(i, &a)| tail[i..].iter().map(move |&b| (a, b)))
    };
    let strict_pairs = || {
        tail.iter()
            .enumerate()
            .flat_map(move |(i, &a)| tail[i + 1..].iter().map(move |&b| (a, b)))
    };
    let left = TailVerdict::from_values(forward_pairs().map(|(a, b)| space.p(a, b)), tolerance);
    // p+ is symmetric, so n <= m covers every pair
    let plus = TailVerdict::from_values(forward_pairs().map(|(a, b)| space.p_plus(a, b)), tolerance);
    let strict = TailVerdict::from_values(strict_pairs().map(|(a, b)| space.p(a, b)), tolerance);

    let tau_p = candidates.iter().copied().find(|&x| {
        let pxx = space.p(x, x);
        tail.iter().all(|&xn| (space.p(x, xn) - pxx).abs() <= tolerance)
    });
    let tau_p_plus = candidates.iter().copied().find(|&x| {
        let pxx = space.p_plus(x, x);
        tail.iter().all(|&xn| (space.p_plus(xn, x) - pxx).abs() <= tolerance)
    });

    Ok(SequenceClassification {
        sequence: seq.name().to_string(),
        horizon,
        tolerance,
        left_p_cauchy: left,
        tau_p_plus_cauchy: plus,
        strict_forward_limit: strict,
        tau_p_convergent_to: tau_p,
        tau_p_plus_convergent_to: tau_p_plus,
        candidates_tested: candidates.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    /// every tau(p+)-Cauchy sequence is tau(p)-convergent
    PSequential,
    /// every left p-Cauchy sequence is tau(p)-convergent
    LeftPSequential,
    /// every left p-Cauchy sequence is tau(p+)-convergent
    Smyth,
}

impl Notion {
    pub const ALL: [Notion; 3] = [Notion::PSequential, Notion::LeftPSequential, Notion::Smyth];

    fn refutes(self, c: &SequenceClassification) -> bool {
        match self {
            Notion::PSequential => c.tau_p_plus_cauchy.holds && c.tau_p_convergent_to.is_none(),
            Notion::LeftPSequential => c.left_p_cauchy.holds && c.tau_p_convergent_to.is_none(),
            Notion::Smyth => c.left_p_cauchy.holds && c.tau_p_plus_convergent_to.is_none(),
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::PSequential => "p-sequentially complete",
            Notion::LeftPSequential => "left p-sequentially complete",
            Notion::Smyth => "Smyth complete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NotionEvidence {
    pub notion: Notion,
    /// Name of the first sequence that is Cauchy in the required sense but
    /// converges to none of the candidates.
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub space: String,
    pub notions: Vec<NotionEvidence>,
    pub sequences: Vec<SequenceClassification>,
    /// No candidates were supplied, so any Cauchy sequence counts as non-convergent.
    pub candidates_insufficient: bool,
    pub note: &'static str,
}

impl CompletenessReport {
    pub fn evidence(&self, notion: Notion) -> &NotionEvidence {
        self.notions.iter().find(|e| e.notion == notion).expect("every notion is reported")
    }

    pub fn counterexample_found(&self, notion: Notion) -> bool {
        self.evidence(notion).counterexample.is_some()
    }
}

pub fn probe_completeness(
    space: &Space,
    seqs: &[SequenceSpec],
    candidates: &[Point],
    tolerance: f64,
) -> Result<CompletenessReport> {
    if seqs.is_empty() {
        return Err(Error::Argument("completeness probe needs at least one sequence".into()));
    }
    let sequences = seqs
        .iter()
        .map(|s| classify_sequence(space, s, candidates, tolerance))
        .collect::<Result<Vec<_>>>()?;
    let notions = Notion::ALL
        .into_iter()
        .map(|notion| NotionEvidence {
            notion,
            counterexample: sequences.iter().find(|c| notion.refutes(c)).map(|c| c.sequence.clone()),
        })
        .collect();
    Ok(CompletenessReport {
        space: space.label().to_string(),
        notions,
        sequences,
        candidates_insufficient: candidates.is_empty(),
        note: "evidence over the tested sequences and candidates only; not a proof",
    })
}

/// Known completeness facts for the built-in spaces; `None` where unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompletenessFacts {
    pub p_sequential: Option<bool>,
    pub left_p_sequential: Option<bool>,
    pub smyth: Option<bool>,
}

pub fn builtin_completeness(name: &str) -> Option<CompletenessFacts> {
    match name {
        // every left p-Cauchy sequence tau(p)-converges to 0, since p(0, y) = 0
        PAPER_EXAMPLE => Some(CompletenessFacts {
            p_sequential: Some(true),
            left_p_sequential: Some(true),
            smyth: None,
        }),
        // 2^-n is tau(p+)-Cauchy with no tau(p)-limit. It still tau(p+)-converges
        // to every x > 0, since p+(x_n, x) -> 2x = p+(x, x), so Smyth is left open.
        PAPER_EXAMPLE_PUNCTURED => Some(CompletenessFacts {
            p_sequential: Some(false),
            left_p_sequential: Some(false),
            smyth: None,
        }),
        _ => None,
    }
}

/// The map `Tx = x_{n(x)}` built from a tau(p+)-Cauchy sequence that has
/// no tau(p)-limit.
///
/// `n(x)` is the smallest index whose tail bound on `p+(x_n, x_m)` is below
/// `threshold_fraction * p(x, C_x)`, where `C_x` is the sequence tail.
#[derive(Clone)]
pub struct CounterexampleMap {
    sequence: SequenceSpec,
    ratio: f64,
    threshold_fraction: f64,
    selector_offset: i64,
}

impl fmt::Debug for CounterexampleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CounterexampleMap")
            .field("sequence", &self.sequence.name())
            .field("threshold_fraction", &self.threshold_fraction)
            .field("selector_offset", &self.selector_offset)
            .finish()
    }
}

impl CounterexampleMap {
    pub fn sequence(&self) -> &SequenceSpec {
        &self.sequence
    }

    pub fn threshold_fraction(&self) -> f64 {
        self.threshold_fraction
    }

    /// Shifts `n(x)` by `offset` (clamped at 1). Used to show that a weaker
    /// selector breaks the Kannan bound.
    pub fn with_selector_offset(mut self, offset: i64) -> Self {
        self.selector_offset = offset;
        self
    }

    /// `p(x, C_x) = inf_n p(x, r^n)`: `x` when `x <= r`, otherwise `2x - r`.
    pub fn tail_infimum(&self, x: f64) -> f64 {
        if x <= self.ratio {
            x
        } else {
            2.0 * x - self.ratio
        }
    }

    /// Upper bound `4 r^N` on `p+(x_n, x_m)` for `n, m >= N`.
    pub fn tail_bound(&self, index: usize) -> f64 {
        4.0 * self.ratio.powi(index as i32)
    }

    /// `n(x)` before any selector offset.
    pub fn base_index(&self, x: f64) -> Option<usize> {
        if !x.is_finite() || x <= 0.0 {
            return None;
        }
        let target = self.threshold_fraction * self.tail_infimum(x);
        (1..=MAX_SELECTOR_INDEX).find(|&n| self.tail_bound(n) < target)
    }

    /// `n(x)` including the selector offset.
    pub fn index_for(&self, x: f64) -> Option<usize> {
        let n = self.base_index(x)? as i64 + self.selector_offset;
        Some(n.max(1) as usize)
    }

    pub fn image(&self, x: f64) -> Option<f64> {
        self.sequence.term(self.index_for(x)?)?.coord()
    }
}

/// Builds the fixed-point-free Kannan map from a geometric sequence on a
/// space carrying the distance `max(x - y, 0) + x`.
pub fn build_counterexample_map(space: &Space, seq: &SequenceSpec) -> Result<CounterexampleMap> {
    let ratio = match seq.kind() {
        SequenceKind::Geometric { ratio } if *ratio > 0.0 && *ratio < 1.0 => *ratio,
        _ => {
            return Err(Error::Construction(format!(
                "no closed form for p(x, C_x) along `{}`; need a geometric sequence with ratio in (0, 1)",
                seq.name()
            )))
        }
    };
    if !space.has_example_metric() {
        return Err(Error::Construction(format!(
            "no closed form for p(x, C_x) on `{}`",
            space.label()
        )));
    }
    let horizon = seq.horizon().max(MIN_HORIZON);
    let probe_seq = seq.clone().with_horizon(horizon)?;
    let class = classify_sequence(space, &probe_seq, &default_candidates(space), TAIL_TOLERANCE)?;
    if !class.tau_p_plus_cauchy.limit_is_zero(TAIL_TOLERANCE) {
        return Err(Error::Construction(format!(
            "`{}` is not tau(p+)-Cauchy with limit 0 at horizon {horizon}",
            seq.name()
        )));
    }
    if let Some(limit) = class.tau_p_convergent_to {
        return Err(Error::Construction(format!(
            "`{}` tau(p)-converges to {limit} in `{}`",
            seq.name(),
            space.label()
        )));
    }
    Ok(CounterexampleMap {
        sequence: probe_seq,
        ratio,
        threshold_fraction: THRESHOLD_FRACTION,
        selector_offset: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleAudit {
    pub report: VerificationReport,
    /// Smallest `p+(x, Tx)` over the sampled points.
    pub min_displacement: f64,
}

impl CounterexampleAudit {
    pub fn passed(&self) -> bool {
        self.report.passed() && self.min_displacement > 0.0
    }
}

const STREAM_AUDIT_POINTS: u64 = 21;
const STREAM_AUDIT_INDICES: u64 = 22;

/// Checks on samples that the map is Kannan with constant 1/8, moves every
/// point, and respects the selector inequality its construction relies on.
pub fn audit_counterexample(
    space: &Space,
    cmap: &CounterexampleMap,
    strategy: &CheckStrategy,
) -> Result<CounterexampleAudit> {
    let map = Mapping::Counterexample(cmap.clone());
    let lambda = KannanConstant::new(COUNTEREXAMPLE_LAMBDA)?;
    let mut report = VerificationReport::new(format!("counterexample map audit: {}", space.label()));
    report.absorb("i", check_kannan(space, &map, lambda, strategy)?);

    let points = tuples::<1>(space, strategy, STREAM_AUDIT_POINTS)?;
    let mut index_rng = PointSampler::new(space, strategy, STREAM_AUDIT_INDICES)?;
    let seq = cmap.sequence();
    let mut moved = Tally::new("ii:moves_every_point");
    let mut selector = Tally::new("iii:selector");
    let mut min_displacement = f64::INFINITY;
    for [x] in points {
        let tx = map.apply(space, x)?;
        let disp = space.p_plus(x, tx);
        min_displacement = min_displacement.min(disp);
        moved.record(disp > 0.0, &[x], 0.0, disp);

        let coord = x.coord().ok_or_else(|| Error::Argument("counterexample audit needs coordinates".into()))?;
        let n0 = cmap.index_for(coord).ok_or_else(|| Error::Mapping {
            map: map.name(),
            point: x.to_string(),
        })?;
        let bound = cmap.threshold_fraction() * cmap.tail_infimum(coord);
        let far = n0 + index_rng.rng().gen_range(0..=32);
        for (n, m) in [(n0, n0), (n0, far)] {
            let (xn, xm) = match (seq.term(n), seq.term(m)) {
                (Some(a), Some(b)) => (a, b),
                _ => continue,
            };
            let lhs = space.p_plus(xn, xm);
            selector.record(lhs < bound, &[x, Point::Index(n), Point::Index(m)], lhs, bound);
        }
    }
    report.push(moved);
    report.push(selector);
    Ok(CounterexampleAudit {
        report,
        min_displacement,
    })
}
