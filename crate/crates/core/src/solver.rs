//! Picard iteration for p-Kannan maps.
//!
//! The orbit `x_{n+1} = T x_n` is followed until the symmetrized step
//! `p+(x_n, x_{n+1})` drops below the tolerance and the reached point also
//! satisfies the fixed-point contract: `p+(z, Tz) <= tol` and `p(z, z) <= tol`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kannan::{KannanConstant, Mapping};
use crate::numeric::le_scaled;
use crate::spaces::{Point, Space};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub n: usize,
    pub point: Point,
    /// `p+(x_n, x_{n+1})`
    pub step_displacement: f64,
    /// `p(x_n, x_n)`
    pub self_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxIter,
    ExactFixedPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub steps: Vec<Step>,
    pub terminated_by: Termination,
}

impl IterationTrace {
    pub fn displacements(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.step_displacement)
    }

    pub fn total_displacement(&self) -> f64 {
        self.displacements().sum()
    }

    /// Rows `iter,point,step_p_plus,self_p` with a header line.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from("iter,point,step_p_plus,self_p\n");
        for s in &self.steps {
            let point = match s.point {
                Point::Index(i) => i.to_string(),
                Point::Coord(x) => x.to_string(),
            };
            let _ = writeln!(out, "{},{},{},{}", s.n, point, s.step_displacement, s.self_distance);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub point: Point,
    /// `p+(z, Tz)`
    pub residual: f64,
    /// `p(z, z)`
    pub self_distance: f64,
    /// Number of map applications along the orbit.
    pub iterations: usize,
    pub terminated_by: Termination,
}

/// Follows the orbit of `start` under `map`.
pub fn iterate(
    space: &Space,
    map: &Mapping,
    start: Point,
    tolerance: f64,
    max_iter: usize,
) -> Result<(IterationTrace, FixedPointResult)> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Argument(format!("tolerance must be positive, got {tolerance}")));
    }
    if max_iter == 0 {
        return Err(Error::Argument("max_iter must be positive".into()));
    }
    map.validate_for(space)?;
    let mut x = space.check_point(start)?;
    let mut steps = Vec::new();
    for n in 0..max_iter {
        let tx = map.apply(space, x)?;
        let disp = space.p_plus(x, tx);
        steps.push(Step {
            n,
            point: x,
            step_displacement: disp,
            self_distance: space.p(x, x),
        });
        if disp <= tolerance {
            let residual = space.p_plus(tx, map.apply(space, tx)?);
            let self_distance = space.p(tx, tx);
            if residual <= tolerance && self_distance <= tolerance {
                let terminated_by = if tx == x {
                    Termination::ExactFixedPoint
                } else {
                    Termination::Tolerance
                };
                let result = FixedPointResult {
                    point: tx,
                    residual,
                    self_distance,
                    iterations: n + 1,
                    terminated_by,
                };
                return Ok((IterationTrace { steps, terminated_by }, result));
            }
        }
        x = tx;
    }
    let last_displacement = steps.last().map_or(f64::NAN, |s| s.step_displacement);
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_displacement,
        trace: Box::new(IterationTrace {
            steps,
            terminated_by: Termination::MaxIter,
        }),
    })
}

/// `p+(z, Tz) <= tol` and `p(z, z) <= tol`.
pub fn verify_fixed_point(space: &Space, map: &Mapping, z: Point, tolerance: f64) -> Result<bool> {
    let tz = map.apply(space, z)?;
    Ok(space.p_plus(z, tz) <= tolerance && space.p(z, z) <= tolerance)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub passed: bool,
    /// `(start, fixed point)` for every start that converged, in input order.
    pub fixed_points: Vec<(Point, Point)>,
    /// Largest `p+` between two returned fixed points.
    pub max_spread: f64,
    pub failed_start: Option<Point>,
}

/// Iterates from every start and checks all limits coincide within tolerance under `p+`.
pub fn uniqueness_probe(
    space: &Space,
    map: &Mapping,
    starts: &[Point],
    tolerance: f64,
    max_iter: usize,
) -> Result<UniquenessReport> {
    if starts.is_empty() {
        return Err(Error::Argument("uniqueness probe needs at least one start".into()));
    }
    let mut fixed_points = Vec::with_capacity(starts.len());
    for &start in starts {
        match iterate(space, map, start, tolerance, max_iter) {
            Ok((_, r)) => fixed_points.push((start, r.point)),
            Err(Error::NonConvergence { .. }) => {
                return Ok(UniquenessReport {
                    passed: false,
                    fixed_points,
                    max_spread: f64::NAN,
                    failed_start: Some(start),
                })
            }
            Err(e) => return Err(e),
        }
    }
    let mut max_spread: f64 = 0.0;
    for (i, &(_, a)) in fixed_points.iter().enumerate() {
        for &(_, b) in &fixed_points[i + 1..] {
            max_spread = max_spread.max(space.p_plus(a, b));
        }
    }
    Ok(UniquenessReport {
        passed: max_spread <= tolerance,
        fixed_points,
        max_spread,
        failed_start: None,
    })
}

/// Checks `d_{n+1} <= r d_n + slack` for consecutive step displacements,
/// where `r = gamma / (1 - gamma)` and `gamma = 2 lambda`.
pub fn rate_bound_check(trace: &IterationTrace, constant: KannanConstant, slack: f64) -> Result<bool> {
    if trace.steps.len() < 2 {
        return Err(Error::Argument(format!(
            "rate check needs at least 2 steps, trace has {}",
            trace.steps.len()
        )));
    }
    let r = constant.rate();
    Ok(trace
        .steps
        .windows(2)
        .all(|w| le_scaled(w[1].step_displacement, r, w[0].step_displacement, slack)))
}
