//! Point universes carrying a (partial, quasi-) distance function, and the
//! structures derived from them: the conjugate, the symmetrization and balls.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the built-in space `p(x, y) = max(x - y, 0) + x` on `[0, inf)`.
pub const PAPER_EXAMPLE: &str = "paper_example";
/// Same distance on the punctured half-line `(0, inf)`.
pub const PAPER_EXAMPLE_PUNCTURED: &str = "paper_example_punctured";

pub const BUILTIN_SPACES: [&str; 2] = [PAPER_EXAMPLE, PAPER_EXAMPLE_PUNCTURED];

/// A validated distance value: finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct DistanceValue(f64);

impl DistanceValue {
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && value >= 0.0).then_some(Self(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<DistanceValue> for f64 {
    fn from(d: DistanceValue) -> f64 {
        d.0
    }
}

/// An element of a space: an index into a finite point list, or a real coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Index(usize),
    Coord(f64),
}

impl Point {
    pub fn index(self) -> Option<usize> {
        match self {
            Point::Index(i) => Some(i),
            Point::Coord(_) => None,
        }
    }

    pub fn coord(self) -> Option<f64> {
        match self {
            Point::Coord(x) => Some(x),
            Point::Index(_) => None,
        }
    }

    /// Total order used for deterministic witness tie-breaking.
    pub(crate) fn sort_key(self) -> (u8, f64) {
        match self {
            Point::Index(i) => (0, i as f64),
            Point::Coord(x) => (1, x),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "#{i}"),
            Point::Coord(x) => write!(f, "{x}"),
        }
    }
}

/// A real interval with open/closed endpoint flags. `upper` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub lower_open: bool,
    pub upper: f64,
    pub upper_open: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let above = if self.lower_open { x > self.lower } else { x >= self.lower };
        let below = if self.upper_open { x < self.upper } else { x <= self.upper };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lower_open { '(' } else { '[' };
        let r = if self.upper_open || self.upper.is_infinite() { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lower, self.upper)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Universe {
    Finite { labels: Vec<String> },
    Analytic { domain: Interval },
}

#[derive(Debug, Clone, PartialEq)]
enum Metric {
    Matrix(Vec<Vec<f64>>),
    /// max(x - y, 0) + x
    Example,
    Conjugate(Box<Metric>),
    Symmetrized(Box<Metric>),
}

impl Metric {
    fn eval(&self, x: Point, y: Point) -> f64 {
        match self {
            Metric::Matrix(m) => match (x, y) {
                (Point::Index(i), Point::Index(j)) => m[i][j],
                _ => unreachable!("points are validated before evaluation"),
            },
            Metric::Example => match (x, y) {
                (Point::Coord(a), Point::Coord(b)) => (a - b).max(0.0) + a,
                _ => unreachable!("points are validated before evaluation"),
            },
            Metric::Conjugate(inner) => inner.eval(y, x),
            Metric::Symmetrized(inner) => inner.eval(x, y) + inner.eval(y, x),
        }
    }
}

/// A point universe together with a distance function `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    label: String,
    universe: Universe,
    metric: Metric,
}

impl Space {
    /// Builds a finite space from labels and a distance matrix, validating
    /// shape and entries.
    pub fn finite(labels: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Parse("matrix not square".into()));
        }
        if labels.len() != n {
            return Err(Error::Parse(format!(
                "matrix side {n} does not match {} points",
                labels.len()
            )));
        }
        if n == 0 {
            return Err(Error::Parse("space has no points".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v.is_nan() {
                    return Err(Error::Parse(format!("NaN distance at ({i},{j})")));
                }
                if v < 0.0 {
                    return Err(Error::Parse(format!("negative distance at ({i},{j})")));
                }
                if !v.is_finite() {
                    return Err(Error::Parse(format!("infinite distance at ({i},{j})")));
                }
            }
        }
        Ok(Self {
            label: format!("finite({n})"),
            universe: Universe::Finite { labels },
            metric: Metric::Matrix(matrix),
        })
    }

    /// Finite space with labels `0..n`.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| i.to_string()).collect();
        Self::finite(labels, matrix)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.universe, Universe::Finite { .. })
    }

    /// Number of points of a finite space.
    pub fn len(&self) -> Option<usize> {
        match &self.universe {
            Universe::Finite { labels } => Some(labels.len()),
            Universe::Analytic { .. } => None,
        }
    }

    pub fn domain(&self) -> Option<Interval> {
        match &self.universe {
            Universe::Analytic { domain } => Some(*domain),
            Universe::Finite { .. } => None,
        }
    }

    /// All points of a finite space in index order; empty for analytic spaces.
    pub fn points(&self) -> Vec<Point> {
        (0..self.len().unwrap_or(0)).map(Point::Index).collect()
    }

    /// The distance matrix of a finite space.
    pub fn matrix(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.len()?;
        Some(
            (0..n)
                .map(|i| (0..n).map(|j| self.metric.eval(Point::Index(i), Point::Index(j))).collect())
                .collect(),
        )
    }

    pub fn contains(&self, x: Point) -> bool {
        match (&self.universe, x) {
            (Universe::Finite { labels }, Point::Index(i)) => i < labels.len(),
            (Universe::Analytic { domain }, Point::Coord(c)) => domain.contains(c),
            _ => false,
        }
    }

    pub fn check_point(&self, x: Point) -> Result<Point> {
        if self.contains(x) {
            Ok(x)
        } else {
            Err(Error::Domain {
                point: x.to_string(),
                space: self.label.clone(),
            })
        }
    }

    /// `p(x, y)`.
    pub fn distance(&self, x: Point, y: Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.metric.eval(x, y))
    }

    /// `p+(x, y) = p(x, y) + p(y, x)`.
    pub fn sym_distance(&self, x: Point, y: Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.metric.eval(x, y) + self.metric.eval(y, x))
    }

    /// Distance for points already known to lie in the universe.
    pub(crate) fn p(&self, x: Point, y: Point) -> f64 {
        self.metric.eval(x, y)
    }

    /// True when the distance is `max(x - y, 0) + x` on a sub-interval of the half-line.
    pub(crate) fn has_example_metric(&self) -> bool {
        self.metric == Metric::Example
    }

    pub(crate) fn p_plus(&self, x: Point, y: Point) -> f64 {
        self.metric.eval(x, y) + self.metric.eval(y, x)
    }

    /// The conjugate space with distance `(x, y) -> p(y, x)`.
    pub fn conjugate(&self) -> Space {
        let metric = match &self.metric {
            Metric::Matrix(m) => {
                let n = m.len();
                Metric::Matrix((0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect())
            }
            Metric::Conjugate(inner) => (**inner).clone(),
            other => Metric::Conjugate(Box::new(other.clone())),
        };
        Space {
            label: format!("{}^-1", self.label),
            universe: self.universe.clone(),
            metric,
        }
    }

    /// The symmetrization with distance `(x, y) -> p(x, y) + p(y, x)`.
    pub fn symmetrize(&self) -> Space {
        let metric = match &self.metric {
            Metric::Matrix(m) => {
                let n = m.len();
                Metric::Matrix(
                    (0..n)
                        .map(|i| (0..n).map(|j| m[i][j] + m[j][i]).collect())
                        .collect(),
                )
            }
            other => Metric::Symmetrized(Box::new(other.clone())),
        };
        Space {
            label: format!("{}^+", self.label),
            universe: self.universe.clone(),
            metric,
        }
    }

    /// Membership in the ball `{y : p(center, y) < radius + p(center, center)}`.
    pub fn ball_contains(&self, center: Point, radius: f64, candidate: Point) -> Result<bool> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::Argument(format!("ball radius must be positive, got {radius}")));
        }
        let reach = self.distance(center, candidate)?;
        Ok(reach < radius + self.p(center, center))
    }

    /// Finite-space document for this space, if finite.
    pub fn to_document(&self) -> Option<FiniteSpaceDoc> {
        match &self.universe {
            Universe::Finite { labels } => Some(FiniteSpaceDoc {
                points: labels.clone(),
                matrix: self.matrix()?,
            }),
            Universe::Analytic { .. } => None,
        }
    }
}

/// `p(x, y)` as a validated value.
pub fn eval_distance(space: &Space, x: Point, y: Point) -> Result<DistanceValue> {
    let d = space.distance(x, y)?;
    DistanceValue::new(d).ok_or_else(|| Error::Domain {
        point: format!("({x}, {y}) -> {d}"),
        space: space.label.clone(),
    })
}

/// On-disk form of a finite space: `matrix[i][j] = p(points[i], points[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpaceDoc {
    pub points: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl FiniteSpaceDoc {
    pub fn into_space(self) -> Result<Space> {
        Space::finite(self.points, self.matrix)
    }
}

/// Parses a finite-space document.
pub fn load_finite_space(document: &str) -> Result<Space> {
    let doc: FiniteSpaceDoc =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_space()
}

pub fn builtin_space(name: &str) -> Result<Space> {
    let (lower_open, label) = match name {
        PAPER_EXAMPLE => (false, PAPER_EXAMPLE),
        PAPER_EXAMPLE_PUNCTURED => (true, PAPER_EXAMPLE_PUNCTURED),
        _ => {
            return Err(Error::Lookup {
                kind: "space",
                name: name.to_string(),
                available: BUILTIN_SPACES.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    Ok(Space {
        label: label.to_string(),
        universe: Universe::Analytic {
            domain: Interval {
                lower: 0.0,
                lower_open,
                upper: f64::INFINITY,
                upper_open: true,
            },
        },
        metric: Metric::Example,
    })
}
