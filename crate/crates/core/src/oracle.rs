//! Brute-force ground truth on small finite spaces.
//!
//! Every self-map of an `n`-point space is enumerated, its exact minimal
//! Kannan constant computed, and each Kannan map checked for a unique fixed
//! point with zero self-distance.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{check_axioms, CheckStrategy};
use crate::error::{Error, Result};
use crate::kannan::Mapping;
use crate::numeric::ceil_ratio;
use crate::spaces::{Point, Space};

pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// Lexicographic enumeration of all `n^n` tables, first entry most significant.
pub struct SelfMaps {
    n: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for SelfMaps {
    type Item = Mapping;

    fn next(&mut self) -> Option<Mapping> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for slot in succ.iter_mut().rev() {
            *slot += 1;
            if *slot < self.n {
                carried = false;
                break;
            }
            *slot = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(Mapping::Table(current))
    }
}

pub fn enumerate_self_maps(space: &Space, cap: usize) -> Result<SelfMaps> {
    let n = space
        .len()
        .ok_or_else(|| Error::Argument(format!("`{}` is not finite", space.label())))?;
    if n > cap {
        return Err(Error::Size { n, cap });
    }
    Ok(SelfMaps {
        n,
        next: Some(vec![0; n]),
    })
}

/// Decodes map number `code` (in enumeration order) into its table.
fn table_from_code(mut code: usize, n: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for slot in t.iter_mut().rev() {
        *slot = code % n;
        code /= n;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MinConstant {
    /// Smallest double `lambda` with `p(Tx, Ty) <= lambda (p(x, Tx) + p(y, Ty))`
    /// exactly on every pair.
    Exact { lambda_min: f64 },
    /// A pair with positive left side and zero right side.
    Infeasible { x: usize, y: usize },
}

impl MinConstant {
    pub fn lambda(&self) -> Option<f64> {
        match self {
            MinConstant::Exact { lambda_min } => Some(*lambda_min),
            MinConstant::Infeasible { .. } => None,
        }
    }

    pub fn is_kannan(&self) -> bool {
        self.lambda().is_some_and(|l| l < 0.25)
    }
}

fn min_constant_of_table(m: &[Vec<f64>], t: &[usize]) -> MinConstant {
    let n = t.len();
    let mut best: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let num = m[t[x]][t[y]];
            let den = m[x][t[x]] + m[y][t[y]];
            if den == 0.0 {
                if num > 0.0 {
                    return MinConstant::Infeasible { x, y };
                }
                continue;
            }
            best = best.max(ceil_ratio(num, den));
        }
    }
    MinConstant::Exact { lambda_min: best }
}

/// Exact minimal Kannan constant of a table map; 0/0 pairs count as 0.
pub fn min_kannan_constant(space: &Space, map: &Mapping) -> Result<MinConstant> {
    map.validate_for(space)?;
    let table = match map {
        Mapping::Table(t) => t,
        other => return Err(Error::Argument(format!("`{}` is not a table map", other.name()))),
    };
    let m = space.matrix().expect("validated as finite");
    Ok(min_constant_of_table(&m, table))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KannanMap {
    pub table: Vec<usize>,
    pub min_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub table: Vec<usize>,
    pub fixed_points: Vec<usize>,
    pub self_distances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteAudit {
    pub n: usize,
    pub maps_total: usize,
    pub kannan_maps: Vec<KannanMap>,
    /// Kannan maps without exactly one fixed point of zero self-distance.
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub n: usize,
    pub maps_total: usize,
    pub kannan_count: usize,
    pub violations: Vec<Violation>,
}

impl FiniteAudit {
    pub fn summary(&self) -> AuditSummary {
        AuditSummary {
            n: self.n,
            maps_total: self.maps_total,
            kannan_count: self.kannan_maps.len(),
            violations: self.violations.clone(),
        }
    }
}

/// Enumerates every self-map of a finite space satisfying the axioms
/// exactly, and checks every map with `lambda_min < 1/4` has exactly one
/// fixed point, of zero self-distance.
pub fn exhaustive_kannan_audit(space: &Space, cap: usize) -> Result<FiniteAudit> {
    let n = space
        .len()
        .ok_or_else(|| Error::Argument(format!("`{}` is not finite", space.label())))?;
    if n > cap {
        return Err(Error::Size { n, cap });
    }
    let axioms = check_axioms(space, &CheckStrategy::exhaustive().with_slack(0.0))?;
    if !axioms.passed() {
        return Err(Error::Dependency {
            report: Box::new(axioms),
        });
    }
    let m = space.matrix().expect("finite");
    let maps_total = n.pow(n as u32);

    // map codes follow enumeration order, so collecting in order keeps the merge deterministic
    let found: Vec<(KannanMap, Option<Violation>)> = (0..maps_total)
        .into_par_iter()
        .filter_map(|code| {
            let table = table_from_code(code, n);
            let lambda_min = min_constant_of_table(&m, &table).lambda().filter(|&l| l < 0.25)?;
            let fixed: Vec<usize> = (0..n).filter(|&i| table[i] == i).collect();
            let self_distances: Vec<f64> = fixed.iter().map(|&i| m[i][i]).collect();
            let ok = fixed.len() == 1 && self_distances[0] == 0.0;
            let violation = (!ok).then(|| Violation {
                table: table.clone(),
                fixed_points: fixed,
                self_distances,
            });
            Some((
                KannanMap {
                    table,
                    min_lambda: lambda_min,
                },
                violation,
            ))
        })
        .collect();

    let mut kannan_maps = Vec::with_capacity(found.len());
    let mut violations = Vec::new();
    for (k, v) in found {
        kannan_maps.push(k);
        violations.extend(v);
    }
    Ok(FiniteAudit {
        n,
        maps_total,
        kannan_maps,
        violations,
    })
}

/// Draws a random `n`-point space satisfying the partial quasi-metric axioms
/// exactly, by rejection.
///
/// Proposals have self-distances in `{0, 0, 1, 2}` and integer off-diagonal
/// entries at most 12 above the larger of the two self-distances, so all
/// sums involved in the checks are exact.
pub fn random_valid_space<R: Rng>(rng: &mut R, n: usize) -> Space {
    assert!(n >= 1, "a space needs at least one point");
    let exact = CheckStrategy::exhaustive().with_slack(0.0);
    loop {
        let diag: Vec<f64> = (0..n).map(|_| [0.0, 0.0, 1.0, 2.0][rng.gen_range(0..4)]).collect();
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            diag[i]
                        } else {
                            diag[i].max(diag[j]) + rng.gen_range(0..=12) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let space = Space::from_matrix(matrix).expect("proposals are well-formed");
        if check_axioms(&space, &exact).is_ok_and(|r| r.passed()) {
            return space.with_label(format!("random({n})"));
        }
    }
}

/// Point indices of a table map's fixed points, as points.
pub fn fixed_points(map: &Mapping) -> Vec<Point> {
    map.table_fixed_points().into_iter().map(Point::Index).collect()
}
