//! Self-maps of a space and the p-Kannan contraction condition
//! `p(Tx, Ty) <= lambda * (p(x, Tx) + p(y, Ty))` with `0 <= lambda < 1/4`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::axioms::{tuples, CheckStrategy};
use crate::completeness::{build_counterexample_map, CounterexampleMap, SequenceSpec};
use crate::error::{Error, Result};
use crate::numeric::{ceil_ratio, le_scaled};
use crate::report::{Tally, VerificationReport};
use crate::spaces::{Point, Space};

pub const EXAMPLE_MAP: &str = "example_map";
pub const COUNTEREXAMPLE_MAP: &str = "counterexample_map";
pub const NAMED_MAPS: [&str; 2] = [EXAMPLE_MAP, COUNTEREXAMPLE_MAP];

const STREAM_KANNAN_PAIRS: u64 = 11;

/// A self-map `T` on a space.
#[derive(Clone)]
pub enum Mapping {
    /// `table[i]` is the image of point `i` of a finite space.
    Table(Vec<usize>),
    /// `Tx = 0` on `[0, 1]`, `Tx = x / 8` on `(1, inf)`.
    ExampleMap,
    /// `Tx = x_{n(x)}` along a sequence converging nowhere in the space.
    Counterexample(CounterexampleMap),
    Custom {
        name: String,
        f: Arc<dyn Fn(Point) -> Point + Send + Sync>,
    },
}

impl fmt::Debug for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mapping::Table(t) => f.debug_tuple("Table").field(t).finish(),
            other => write!(f, "Mapping({})", other.name()),
        }
    }
}

impl Mapping {
    pub fn custom(name: impl Into<String>, f: impl Fn(Point) -> Point + Send + Sync + 'static) -> Self {
        Mapping::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        Mapping::custom("identity", |x| x)
    }

    pub fn name(&self) -> String {
        match self {
            Mapping::Table(t) => format!("table{t:?}"),
            Mapping::ExampleMap => EXAMPLE_MAP.to_string(),
            Mapping::Counterexample(c) => format!("{COUNTEREXAMPLE_MAP}({})", c.sequence().name()),
            Mapping::Custom { name, .. } => name.clone(),
        }
    }

    fn raw(&self, x: Point) -> Option<Point> {
        match self {
            Mapping::Table(t) => t.get(x.index()?).map(|&j| Point::Index(j)),
            Mapping::ExampleMap => {
                let x = x.coord()?;
                Some(Point::Coord(if x <= 1.0 { 0.0 } else { x / 8.0 }))
            }
            Mapping::Counterexample(c) => c.image(x.coord()?).map(Point::Coord),
            Mapping::Custom { f, .. } => Some(f(x)),
        }
    }

    /// `T x`, with both `x` and its image checked against the space.
    pub fn apply(&self, space: &Space, x: Point) -> Result<Point> {
        space.check_point(x)?;
        match self.raw(x) {
            Some(tx) if space.contains(tx) => Ok(tx),
            _ => Err(Error::Mapping {
                map: self.name(),
                point: x.to_string(),
            }),
        }
    }

    /// Checks a table map is total on a finite space.
    pub fn validate_for(&self, space: &Space) -> Result<()> {
        if let Mapping::Table(t) = self {
            let n = space.len().ok_or_else(|| {
                Error::Argument(format!("table map needs a finite space, `{}` is analytic", space.label()))
            })?;
            if t.len() != n {
                return Err(Error::Argument(format!("table has {} entries, space has {n} points", t.len())));
            }
            for (i, &j) in t.iter().enumerate() {
                if j >= n {
                    return Err(Error::Mapping {
                        map: self.name(),
                        point: format!("#{i}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Fixed points of a table map.
    pub fn table_fixed_points(&self) -> Vec<usize> {
        match self {
            Mapping::Table(t) => t.iter().enumerate().filter(|(i, &j)| *i == j).map(|(i, _)| i).collect(),
            _ => Vec::new(),
        }
    }
}

/// Mapping document for finite spaces: `table[i]` is the image index of point `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingDoc {
    pub table: Vec<usize>,
}

pub fn load_mapping(document: &str) -> Result<Mapping> {
    let doc: MappingDoc = serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Mapping::Table(doc.table))
}

/// Looks up one of the named maps. The counterexample map is built on the
/// given space from the default sequence `2^-n`.
pub fn named_mapping(name: &str, space: &Space) -> Result<Mapping> {
    match name {
        EXAMPLE_MAP => Ok(Mapping::ExampleMap),
        COUNTEREXAMPLE_MAP => {
            let seq = SequenceSpec::geometric(0.5, crate::completeness::DEFAULT_HORIZON)?;
            Ok(Mapping::Counterexample(build_counterexample_map(space, &seq)?))
        }
        _ => Err(Error::Lookup {
            kind: "map",
            name: name.to_string(),
            available: NAMED_MAPS.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

/// A Kannan constant in `[0, 1/4)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct KannanConstant(f64);

impl KannanConstant {
    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..0.25).contains(&lambda) {
            Ok(Self(lambda))
        } else {
            Err(Error::Constant(lambda))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Kannan constant of `T` with respect to the symmetrization, `2 * lambda`.
    pub fn gamma(self) -> f64 {
        2.0 * self.0
    }

    /// Per-step contraction factor of the displacements, `gamma / (1 - gamma)`.
    pub fn rate(self) -> f64 {
        let g = self.gamma();
        g / (1.0 - g)
    }
}

struct PairImage {
    x: Point,
    y: Point,
    tx: Point,
    ty: Point,
}

fn image_pairs(space: &Space, map: &Mapping, strategy: &CheckStrategy) -> Result<Vec<PairImage>> {
    map.validate_for(space)?;
    tuples::<2>(space, strategy, STREAM_KANNAN_PAIRS)?
        .into_iter()
        .map(|[x, y]| {
            Ok(PairImage {
                x,
                y,
                tx: map.apply(space, x)?,
                ty: map.apply(space, y)?,
            })
        })
        .collect()
}

/// Verifies the Kannan inequality on every (exhaustive) or sampled ordered pair.
pub fn check_kannan(
    space: &Space,
    map: &Mapping,
    constant: KannanConstant,
    strategy: &CheckStrategy,
) -> Result<VerificationReport> {
    let lambda = constant.get();
    let mut tally = Tally::new("kannan");
    for PairImage { x, y, tx, ty } in image_pairs(space, map, strategy)? {
        let lhs = space.p(tx, ty);
        let den = space.p(x, tx) + space.p(y, ty);
        tally.record(le_scaled(lhs, lambda, den, strategy.slack), &[x, y], lhs, lambda * den);
    }
    let mut report = VerificationReport::new(format!(
        "kannan condition: {} on {}, lambda = {lambda}",
        map.name(),
        space.label()
    ));
    report.push(tally);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaEstimate {
    Bounded {
        lambda_hat: f64,
        /// Pair attaining `lambda_hat`; absent when every pair was skipped.
        witness: Option<[Point; 2]>,
        pairs_used: usize,
        pairs_skipped: usize,
    },
    /// Some pair has a positive left side but a vanishing right side.
    Infeasible { witness: [Point; 2], numerator: f64 },
}

impl LambdaEstimate {
    pub fn lambda_hat(&self) -> Option<f64> {
        match self {
            LambdaEstimate::Bounded { lambda_hat, .. } => Some(*lambda_hat),
            LambdaEstimate::Infeasible { .. } => None,
        }
    }

    /// True when the estimate certifies a valid Kannan constant on the pair set.
    pub fn is_kannan(&self) -> bool {
        self.lambda_hat().is_some_and(|l| l < 0.25)
    }
}

/// Largest ratio `p(Tx, Ty) / (p(x, Tx) + p(y, Ty))` over the pair set,
/// rounded up so the estimate itself passes [`check_kannan`].
pub fn estimate_lambda(space: &Space, map: &Mapping, strategy: &CheckStrategy) -> Result<LambdaEstimate> {
    let slack = strategy.slack;
    let mut best: Option<(f64, [Point; 2])> = None;
    let (mut used, mut skipped) = (0, 0);
    for PairImage { x, y, tx, ty } in image_pairs(space, map, strategy)? {
        let num = space.p(tx, ty);
        let den = space.p(x, tx) + space.p(y, ty);
        if den <= slack {
            if num <= slack {
                skipped += 1;
                continue;
            }
            return Ok(LambdaEstimate::Infeasible {
                witness: [x, y],
                numerator: num,
            });
        }
        used += 1;
        let ratio = ceil_ratio(num, den);
        if best.is_none_or(|(b, _)| ratio > b) {
            best = Some((ratio, [x, y]));
        }
    }
    Ok(LambdaEstimate::Bounded {
        lambda_hat: best.map_or(0.0, |(b, _)| b),
        witness: best.map(|(_, w)| w),
        pairs_used: used,
        pairs_skipped: skipped,
    })
}

/// Verifies the two consequences of the Kannan condition for the
/// symmetrization, on the pair set used by [`check_kannan`]:
/// (a) `p+(Tx, Ty) <= 2 lambda (p(x, Tx) + p(y, Ty))`,
/// (b) `p+(Tx, Ty) <= gamma (p+(x, Tx) + p+(y, Ty))` with `gamma = 2 lambda`.
pub fn check_lemma2(
    space: &Space,
    map: &Mapping,
    constant: KannanConstant,
    strategy: &CheckStrategy,
) -> Result<VerificationReport> {
    let kannan = check_kannan(space, map, constant, strategy)?;
    if !kannan.passed() {
        return Err(Error::Dependency {
            report: Box::new(kannan),
        });
    }
    let gamma = constant.gamma();
    let slack = strategy.slack;
    let mut a = Tally::new("a");
    let mut b = Tally::new("b");
    for PairImage { x, y, tx, ty } in image_pairs(space, map, strategy)? {
        let lhs = space.p_plus(tx, ty);
        let den = space.p(x, tx) + space.p(y, ty);
        a.record(le_scaled(lhs, gamma, den, slack), &[x, y], lhs, gamma * den);
        let den_plus = space.p_plus(x, tx) + space.p_plus(y, ty);
        b.record(le_scaled(lhs, gamma, den_plus, slack), &[x, y], lhs, gamma * den_plus);
    }
    let mut report = VerificationReport::new(format!(
        "symmetrized kannan bounds: {} on {}, gamma = {gamma}",
        map.name(),
        space.label()
    ));
    report.push(a);
    report.push(b);
    Ok(report)
}
