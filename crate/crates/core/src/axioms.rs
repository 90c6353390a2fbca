//! Axiom verification for partial quasi-metrics and partial metrics.
//!
//! Finite spaces can be checked exhaustively: every ordered pair for the
//! two-point axioms and every ordered triple for the triangle-type axiom.
//! Analytic spaces are checked on seeded samples. Inequalities are accepted
//! when `lhs <= rhs + slack`; equalities when `|lhs - rhs| <= slack`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::approx_eq;
use crate::report::{Tally, VerificationReport};
use crate::spaces::{Point, Space, Universe};

pub const DEFAULT_SLACK: f64 = 1e-9;
pub const DEFAULT_MARGIN: f64 = 1e-9;
pub const DEFAULT_UPPER_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize },
}

/// How tuples are chosen for a check, and the numerical tolerance applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckStrategy {
    pub mode: CheckMode,
    pub seed: u64,
    pub slack: f64,
    /// Offset applied to open interval endpoints when sampling.
    pub margin: f64,
    /// Upper end of the sampling window on unbounded domains.
    pub upper_cap: f64,
}

impl CheckStrategy {
    pub fn exhaustive() -> Self {
        Self {
            mode: CheckMode::Exhaustive,
            seed: 0,
            slack: DEFAULT_SLACK,
            margin: DEFAULT_MARGIN,
            upper_cap: DEFAULT_UPPER_CAP,
        }
    }

    pub fn sampled(samples: usize, seed: u64) -> Self {
        Self {
            mode: CheckMode::Sampled { samples },
            seed,
            ..Self::exhaustive()
        }
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_upper_cap(mut self, cap: f64) -> Self {
        self.upper_cap = cap;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        if !self.slack.is_finite() || self.slack < 0.0 {
            return Err(Error::Strategy(format!("slack must be non-negative, got {}", self.slack)));
        }
        match self.mode {
            CheckMode::Exhaustive if !space.is_finite() => Err(Error::Strategy(format!(
                "exhaustive checking needs a finite space; `{}` is analytic",
                space.label()
            ))),
            CheckMode::Sampled { samples: 0 } => {
                Err(Error::Argument("sample count must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Seeded uniform sampler over a space's universe.
///
/// Open endpoints are offset by the strategy margin; unbounded domains are
/// truncated at the strategy's upper cap.
pub struct PointSampler {
    rng: ChaCha8Rng,
    window: Window,
}

enum Window {
    Indices(usize),
    Range(f64, f64),
}

impl PointSampler {
    /// `stream` separates independent draws that share one seed.
    pub fn new(space: &Space, strategy: &CheckStrategy, stream: u64) -> Result<Self> {
        let window = match space.universe() {
            Universe::Finite { labels } => Window::Indices(labels.len()),
            Universe::Analytic { domain } => {
                let lo = if domain.lower_open { domain.lower + strategy.margin } else { domain.lower };
                let hi = if domain.upper.is_finite() {
                    let hi = if domain.upper_open { domain.upper - strategy.margin } else { domain.upper };
                    hi.min(strategy.upper_cap)
                } else {
                    strategy.upper_cap
                };
                if lo.is_nan() || hi.is_nan() || lo > hi || !domain.contains(lo) || !domain.contains(hi) {
                    return Err(Error::Strategy(format!(
                        "empty sampling window [{lo}, {hi}] for {domain}"
                    )));
                }
                Window::Range(lo, hi)
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);
        rng.set_stream(stream);
        Ok(Self { rng, window })
    }

    pub fn sample(&mut self) -> Point {
        match self.window {
            Window::Indices(n) => Point::Index(self.rng.gen_range(0..n)),
            Window::Range(lo, hi) => Point::Coord(self.rng.gen_range(lo..=hi)),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// All ordered `k`-tuples of a finite space in lexicographic order, or
/// `samples` seeded tuples.
pub(crate) fn tuples<const K: usize>(
    space: &Space,
    strategy: &CheckStrategy,
    stream: u64,
) -> Result<Vec<[Point; K]>> {
    strategy.validate(space)?;
    match strategy.mode {
        CheckMode::Exhaustive => {
            let n = space.len().unwrap_or(0);
            let total = n.pow(K as u32);
            Ok((0..total)
                .map(|mut code| {
                    let mut t = [Point::Index(0); K];
                    for slot in t.iter_mut().rev() {
                        *slot = Point::Index(code % n);
                        code /= n;
                    }
                    t
                })
                .collect())
        }
        CheckMode::Sampled { samples } => {
            let mut sampler = PointSampler::new(space, strategy, stream)?;
            Ok((0..samples)
                .map(|_| std::array::from_fn(|_| sampler.sample()))
                .collect())
        }
    }
}

// Stream ids keep each check's sample independent of which other checks run.
const STREAM_PAIRS: u64 = 1;
const STREAM_TRIPLES: u64 = 2;
const STREAM_SINGLES: u64 = 3;

/// Checks (1a), (1b), (2) and (3) of a partial quasi-metric.
pub fn check_axioms(space: &Space, strategy: &CheckStrategy) -> Result<VerificationReport> {
    let pairs = tuples::<2>(space, strategy, STREAM_PAIRS)?;
    let triples = tuples::<3>(space, strategy, STREAM_TRIPLES)?;
    let slack = strategy.slack;

    let mut t1a = Tally::new("1a");
    let mut t1b = Tally::new("1b");
    let mut t3 = Tally::new("3");
    for &[x, y] in &pairs {
        let (pxx, pyy, pxy, pyx) = (space.p(x, x), space.p(y, y), space.p(x, y), space.p(y, x));
        t1a.record(pxx <= pxy + slack, &[x, y], pxx, pxy);
        t1b.record(pxx <= pyx + slack, &[x, y], pxx, pyx);
        if x == y {
            t3.record(true, &[x, y], 0.0, 0.0);
        } else {
            // distinct points must be separated by one of the two self-distance gaps
            let separation = (pxx - pxy).abs().max((pyy - pyx).abs());
            let merged = approx_eq(pxx, pxy, slack) && approx_eq(pyy, pyx, slack);
            t3.record(!merged, &[x, y], slack, separation);
        }
    }

    let mut t2 = Tally::new("2");
    for &[x, y, z] in &triples {
        let lhs = space.p(x, z) + space.p(y, y);
        let rhs = space.p(x, y) + space.p(y, z);
        t2.record(lhs <= rhs + slack, &[x, y, z], lhs, rhs);
    }

    let mut report = VerificationReport::new(format!("partial quasi-metric axioms: {}", space.label()));
    report.push(t1a);
    report.push(t1b);
    report.push(t2);
    report.push(t3);
    Ok(report)
}

/// Checks (pm1)-(pm4) of a partial metric.
pub fn check_partial_metric(space: &Space, strategy: &CheckStrategy) -> Result<VerificationReport> {
    let pairs = tuples::<2>(space, strategy, STREAM_PAIRS)?;
    let triples = tuples::<3>(space, strategy, STREAM_TRIPLES)?;
    let slack = strategy.slack;

    let mut pm1 = Tally::new("pm1");
    let mut pm2 = Tally::new("pm2");
    let mut pm3 = Tally::new("pm3");
    for &[x, y] in &pairs {
        let (pxx, pyy, pxy, pyx) = (space.p(x, x), space.p(y, y), space.p(x, y), space.p(y, x));
        if x == y {
            pm1.record(true, &[x, y], 0.0, 0.0);
        } else {
            let merged = approx_eq(pxx, pxy, slack) && approx_eq(pxy, pyy, slack);
            let separation = (pxx - pxy).abs().max((pxy - pyy).abs());
            pm1.record(!merged, &[x, y], slack, separation);
        }
        pm2.record(pxx <= pxy + slack, &[x, y], pxx, pxy);
        pm3.record(approx_eq(pxy, pyx, slack), &[x, y], (pxy - pyx).abs(), slack);
    }

    let mut pm4 = Tally::new("pm4");
    for &[x, y, z] in &triples {
        let lhs = space.p(x, y) + space.p(z, z);
        let rhs = space.p(x, z) + space.p(z, y);
        pm4.record(lhs <= rhs + slack, &[x, y, z], lhs, rhs);
    }

    let mut report = VerificationReport::new(format!("partial metric axioms: {}", space.label()));
    report.push(pm1);
    report.push(pm2);
    report.push(pm3);
    report.push(pm4);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    QuasiMetric,
    PartialQuasiMetric,
    PartialMetric,
    LopsidedPartialQuasiMetric,
    Invalid,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::QuasiMetric => "quasi-metric",
            Structure::PartialQuasiMetric => "partial quasi-metric",
            Structure::PartialMetric => "partial metric",
            Structure::LopsidedPartialQuasiMetric => "lopsided partial quasi-metric",
            Structure::Invalid => "invalid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub structure: Structure,
    /// Axiom report extended with the symmetry ("4") and zero self-distance ("self0") checks.
    pub report: VerificationReport,
}

/// Classifies a space by the axioms it satisfies, its symmetry, and whether
/// all self-distances vanish.
///
/// A space with zero self-distances is labelled a quasi-metric even when it
/// is also symmetric.
pub fn classify_structure(space: &Space, strategy: &CheckStrategy) -> Result<Classification> {
    let mut report = check_axioms(space, strategy)?;
    let slack = strategy.slack;

    let mut sym = Tally::new("4");
    for &[x, y] in &tuples::<2>(space, strategy, STREAM_PAIRS)? {
        let (pxy, pyx) = (space.p(x, y), space.p(y, x));
        sym.record(approx_eq(pxy, pyx, slack), &[x, y], (pxy - pyx).abs(), slack);
    }
    let mut zero = Tally::new("self0");
    for &[x] in &tuples::<1>(space, strategy, STREAM_SINGLES)? {
        let pxx = space.p(x, x);
        zero.record(pxx <= slack, &[x], pxx, slack);
    }
    report.push(sym);
    report.push(zero);

    let ok = |id: &str| report.entry(id).is_some_and(|e| e.pass);
    let structure = if !(ok("1a") && ok("2") && ok("3")) {
        Structure::Invalid
    } else if !ok("1b") {
        Structure::LopsidedPartialQuasiMetric
    } else if ok("self0") {
        Structure::QuasiMetric
    } else if ok("4") {
        Structure::PartialMetric
    } else {
        Structure::PartialQuasiMetric
    };
    Ok(Classification { structure, report })
}

/// Checks that the conjugate is again a partial quasi-metric and that the
/// symmetrization is a partial metric. The space itself must pass
/// [`check_axioms`] under the same strategy.
pub fn check_derived_lemma(space: &Space, strategy: &CheckStrategy) -> Result<VerificationReport> {
    let base = check_axioms(space, strategy)?;
    if !base.passed() {
        let failing: Vec<&str> = base
            .entries
            .iter()
            .filter(|e| !e.pass)
            .map(|e| e.axiom.as_str())
            .collect();
        return Err(Error::Precondition(format!(
            "`{}` fails axiom(s) {}",
            space.label(),
            failing.join(", ")
        )));
    }
    let mut report = VerificationReport::new(format!("derived structures: {}", space.label()));
    report.absorb("conjugate", check_axioms(&space.conjugate(), strategy)?);
    report.absorb("plus", check_partial_metric(&space.symmetrize(), strategy)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{builtin_space, PAPER_EXAMPLE, PAPER_EXAMPLE_PUNCTURED};

    fn finite(m: &[&[f64]]) -> Space {
        Space::from_matrix(m.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn two_point_passes_exhaustively() {
        let s = finite(&[&[0.0, 1.0], &[2.0, 0.0]]);
        let r = check_axioms(&s, &CheckStrategy::exhaustive()).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.entry("1a").unwrap().checks, 4);
        assert_eq!(r.entry("1b").unwrap().checks, 4);
        assert_eq!(r.entry("2").unwrap().checks, 8);
    }

    #[test]
    fn exhaustive_counts_are_n_squared_and_cubed() {
        let s = finite(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0], &[2.0, 1.0, 0.0]]);
        let r = check_axioms(&s, &CheckStrategy::exhaustive()).unwrap();
        assert_eq!(r.entry("1a").unwrap().checks, 9);
        assert_eq!(r.entry("1b").unwrap().checks, 9);
        assert_eq!(r.entry("2").unwrap().checks, 27);
    }

    #[test]
    fn one_a_violation_witness() {
        let s = finite(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let r = check_axioms(&s, &CheckStrategy::exhaustive().with_slack(0.0)).unwrap();
        let e = r.entry("1a").unwrap();
        assert!(!e.pass);
        let w = e.worst.as_ref().unwrap();
        assert_eq!(w.points, vec![Point::Index(0), Point::Index(1)]);
        assert_eq!((w.lhs, w.rhs), (1.0, 0.0));
    }

    #[test]
    fn axiom_three_catches_merged_points() {
        let s = finite(&[&[0.0, 0.0], &[0.0, 0.0]]);
        let r = check_axioms(&s, &CheckStrategy::exhaustive()).unwrap();
        assert!(!r.entry("3").unwrap().pass);
        assert_eq!(r.entry("3").unwrap().violations, 2);
    }

    #[test]
    fn example_space_is_lopsided() {
        let s = builtin_space(PAPER_EXAMPLE).unwrap();
        let r = check_axioms(&s, &CheckStrategy::sampled(10_000, 42)).unwrap();
        for id in ["1a", "2", "3"] {
            assert!(r.entry(id).unwrap().pass, "{r}");
        }
        assert_eq!(r.entry("2").unwrap().checks, 10_000);
        // p(x, x) = x exceeds p(y, x) = y whenever x > y
        let e = r.entry("1b").unwrap();
        assert!(!e.pass);
        let w = e.worst.as_ref().unwrap();
        assert!(w.points[0].coord().unwrap() > w.points[1].coord().unwrap());
        assert_eq!(s.distance(Point::Coord(3.0), Point::Coord(3.0)).unwrap(), 3.0);
        assert_eq!(s.distance(Point::Coord(1.0), Point::Coord(3.0)).unwrap(), 1.0);
    }

    #[test]
    fn example_symmetrization_is_partial_metric() {
        let s = builtin_space(PAPER_EXAMPLE).unwrap().symmetrize();
        let r = check_partial_metric(&s, &CheckStrategy::sampled(10_000, 42)).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn exhaustive_on_analytic_is_strategy_error() {
        let s = builtin_space(PAPER_EXAMPLE).unwrap();
        assert!(matches!(check_axioms(&s, &CheckStrategy::exhaustive()), Err(Error::Strategy(_))));
        assert!(matches!(
            check_axioms(&s, &CheckStrategy::sampled(0, 1)),
            Err(Error::Argument(_))
        ));
        assert!(check_axioms(&s, &CheckStrategy::sampled(5, 1).with_slack(-1.0)).is_err());
    }

    #[test]
    fn punctured_sampler_never_draws_zero() {
        let s = builtin_space(PAPER_EXAMPLE_PUNCTURED).unwrap();
        let strategy = CheckStrategy::sampled(1, 7).with_upper_cap(1e-8);
        let mut sampler = PointSampler::new(&s, &strategy, 0).unwrap();
        for _ in 0..10_000 {
            let x = sampler.sample().coord().unwrap();
            assert!((1e-9..=1e-8).contains(&x));
        }
        let bad = CheckStrategy::sampled(1, 7).with_upper_cap(0.0);
        assert!(PointSampler::new(&s, &bad, 0).is_err());
    }

    #[test]
    fn classifications() {
        let s = builtin_space(PAPER_EXAMPLE).unwrap();
        let st = CheckStrategy::sampled(2_000, 42);
        assert_eq!(classify_structure(&s, &st).unwrap().structure, Structure::LopsidedPartialQuasiMetric);
        assert_eq!(classify_structure(&s.symmetrize(), &st).unwrap().structure, Structure::PartialMetric);

        let ex = CheckStrategy::exhaustive();
        let pqm = finite(&[&[1.0, 2.0], &[4.0, 2.0]]);
        assert_eq!(classify_structure(&pqm, &ex).unwrap().structure, Structure::PartialQuasiMetric);
        let metric = finite(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(classify_structure(&metric, &ex).unwrap().structure, Structure::QuasiMetric);
        let bad = finite(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(classify_structure(&bad, &ex).unwrap().structure, Structure::Invalid);
        // (1b) fails at (0, 1): p(0,0)=2 > p(1,0)=1; the rest hold.
        let lopsided = finite(&[&[2.0, 3.0], &[1.0, 0.0]]);
        assert_eq!(
            classify_structure(&lopsided, &ex).unwrap().structure,
            Structure::LopsidedPartialQuasiMetric
        );
    }

    #[test]
    fn derived_structures() {
        let s = finite(&[&[0.0, 1.0], &[2.0, 0.0]]);
        let r = check_derived_lemma(&s, &CheckStrategy::exhaustive()).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.entries.len(), 8);
        assert!(r.entry("plus:pm4").is_some());

        let paper = builtin_space(PAPER_EXAMPLE).unwrap();
        let err = check_derived_lemma(&paper, &CheckStrategy::sampled(5_000, 42)).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref m) if m.contains("1b")));

        let bad = finite(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            check_derived_lemma(&bad, &CheckStrategy::exhaustive()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn reports_are_deterministic() {
        let s = builtin_space(PAPER_EXAMPLE).unwrap();
        let st = CheckStrategy::sampled(3_000, 9);
        let a = serde_json::to_string(&check_axioms(&s, &st).unwrap()).unwrap();
        let b = serde_json::to_string(&check_axioms(&s, &st).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
