//! Finite discrete instances and hypothesis sets.
//!
//! An instance is a finite marginal over support points together with a
//! conditional label distribution at each point. Hypotheses are explicit
//! score tables over the support (one row per point), or the pointwise box
//! class: the product of per-point score boxes `[-L, L]^n`, which is
//! symmetric and complete up to the bound. Every expectation over a finite
//! instance is a finite sum and every infimum over an explicit list a finite
//! minimum, which is what makes the gap and bound computations exact.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::phi::{eval_loss, Family, SurrogateSpec, ZERO_SUM_TOL};

pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// One support point: marginal weight and conditional label distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportPoint {
    pub weight: f64,
    pub conditional: Vec<f64>,
}

/// Finite marginal with per-point conditionals.
///
/// Binary margin instances use `n = 2` with the convention that index 0 is
/// the positive class, so `conditional[0]` is the positive-class probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub n: usize,
    pub points: Vec<SupportPoint>,
}

impl DiscreteInstance {
    pub fn new(n: usize, points: Vec<SupportPoint>) -> Result<Self, Error> {
        let inst = DiscreteInstance {
            schema: Some(1),
            n,
            points,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Deterministic binary instance: one point per label entry.
    pub fn deterministic_binary(labels: &[bool]) -> Self {
        let w = 1.0 / labels.len() as f64;
        let points = labels
            .iter()
            .map(|&pos| SupportPoint {
                weight: w,
                conditional: if pos { vec![1.0, 0.0] } else { vec![0.0, 1.0] },
            })
            .collect();
        DiscreteInstance {
            schema: Some(1),
            n: 2,
            points,
        }
    }

    /// Deterministic multi-class instance with uniform weights.
    pub fn deterministic(n: usize, labels: &[usize]) -> Self {
        let w = 1.0 / labels.len() as f64;
        let points = labels
            .iter()
            .map(|&y| {
                let mut c = vec![0.0; n];
                c[y] = 1.0;
                SupportPoint {
                    weight: w,
                    conditional: c,
                }
            })
            .collect();
        DiscreteInstance {
            schema: Some(1),
            n,
            points,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 2 {
            return Err(Error::Schema(format!("n must be >= 2, got {}", self.n)));
        }
        if self.points.is_empty() {
            return Err(Error::Schema(
                "instance needs at least one support point".into(),
            ));
        }
        let wsum: f64 = self.points.iter().map(|p| p.weight).sum();
        if (wsum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Schema(format!("weights must sum to 1, got {wsum}")));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.weight <= 0.0 {
                return Err(Error::Schema(format!(
                    "point {i} has nonpositive weight {}",
                    p.weight
                )));
            }
            if p.conditional.len() != self.n {
                return Err(Error::Schema(format!(
                    "point {i} conditional has length {}, expected {}",
                    p.conditional.len(),
                    self.n
                )));
            }
            if p.conditional.iter().any(|&q| q < 0.0) {
                return Err(Error::Schema(format!(
                    "point {i} conditional has a negative entry"
                )));
            }
            let csum: f64 = p.conditional.iter().sum();
            if (csum - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(Error::Schema(format!(
                    "point {i} conditional sums to {csum}, expected 1"
                )));
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Whether every conditional is (numerically) a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.points.iter().all(|p| {
            p.conditional
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
                >= 1.0 - 1e-12
        })
    }

    /// The label carried by a deterministic point.
    pub fn point_label(&self, i: usize) -> usize {
        let c = &self.points[i].conditional;
        let mut best = 0;
        for (y, &q) in c.iter().enumerate() {
            if q >= c[best] {
                best = y;
            }
        }
        best
    }
}

/// A score table: one row of scores per support point. Margin-family tables
/// have a single column.
pub type ScoreTable = Vec<Vec<f64>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind")]
pub enum HypothesisSet {
    /// Finite list of score tables; all quantities are exact finite sums
    /// and minima over this list.
    #[serde(rename = "explicit-list")]
    ExplicitList {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        tables: Vec<ScoreTable>,
    },
    /// The product class of per-point boxes `[-lambda, lambda]^n`.
    #[serde(rename = "pointwise-box")]
    PointwiseBox {
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid_step: Option<f64>,
    },
}

impl HypothesisSet {
    pub fn explicit(tables: Vec<ScoreTable>) -> Self {
        HypothesisSet::ExplicitList {
            lambda: None,
            tables,
        }
    }

    pub fn validate(&self, instance: &DiscreteInstance, family: Family) -> Result<(), Error> {
        let cols = if family == Family::Margin {
            1
        } else {
            instance.n
        };
        match self {
            HypothesisSet::ExplicitList { lambda, tables } => {
                if tables.is_empty() {
                    return Err(Error::Precondition(
                        "explicit list needs at least one table".into(),
                    ));
                }
                for (k, table) in tables.iter().enumerate() {
                    if table.len() != instance.m() {
                        return Err(Error::Schema(format!(
                            "table {k} has {} rows, expected {}",
                            table.len(),
                            instance.m()
                        )));
                    }
                    for (i, row) in table.iter().enumerate() {
                        if row.len() != cols {
                            return Err(Error::Schema(format!(
                                "table {k} row {i} has {} scores, expected {cols}",
                                row.len()
                            )));
                        }
                        if let Some(l) = lambda {
                            if row.iter().any(|s| s.abs() > l + 1e-12) {
                                return Err(Error::Schema(format!(
                                    "table {k} row {i} exceeds the declared score bound {l}"
                                )));
                            }
                        }
                        if family == Family::Constrained {
                            let sum: f64 = row.iter().sum();
                            if sum.abs() > ZERO_SUM_TOL {
                                return Err(Error::Schema(format!(
                                    "table {k} row {i} violates the zero-sum constraint (sum {sum})"
                                )));
                            }
                        }
                    }
                }
                Ok(())
            }
            HypothesisSet::PointwiseBox { lambda, grid_step } => {
                if !lambda.is_finite() || *lambda <= 0.0 {
                    return Err(Error::Schema(format!(
                        "box bound must be positive, got {lambda}"
                    )));
                }
                if let Some(g) = grid_step {
                    if !g.is_finite() || *g <= 0.0 {
                        return Err(Error::Schema(format!(
                            "grid step must be positive, got {g}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Predicted label of a score row: argmax with ties resolved to the highest
/// index; binary rows predict the positive class (index 0) when the score is
/// nonnegative.
pub fn predicted_label(row: &[f64], family: Family) -> usize {
    if family == Family::Margin {
        return if row[0] >= 0.0 { 0 } else { 1 };
    }
    let mut best = 0;
    for (y, &s) in row.iter().enumerate() {
        if s >= row[best] {
            best = y;
        }
    }
    best
}

/// Conditional zero-one error of a score row at a point.
pub fn conditional_zero_one(row: &[f64], conditional: &[f64], family: Family) -> f64 {
    1.0 - conditional[predicted_label(row, family)]
}

/// Conditional surrogate error of a score row at a point:
/// `sum_y p(y) loss(row, y)`.
pub fn conditional_error(
    spec: &SurrogateSpec,
    row: &[f64],
    conditional: &[f64],
) -> Result<f64, Error> {
    let mut total = 0.0;
    for (y, &py) in conditional.iter().enumerate() {
        if py == 0.0 {
            continue;
        }
        total += py * eval_loss(spec, row, y)?;
    }
    Ok(total)
}

/// Expected surrogate loss of a table over the instance.
pub fn expected_error(
    spec: &SurrogateSpec,
    instance: &DiscreteInstance,
    table: &ScoreTable,
) -> Result<f64, Error> {
    let mut total = 0.0;
    for (p, row) in instance.points.iter().zip(table) {
        total += p.weight * conditional_error(spec, row, &p.conditional)?;
    }
    Ok(total)
}

/// Expected zero-one loss of a table over the instance.
pub fn expected_zero_one(instance: &DiscreteInstance, table: &ScoreTable, family: Family) -> f64 {
    instance
        .points
        .iter()
        .zip(table)
        .map(|(p, row)| p.weight * conditional_zero_one(row, &p.conditional, family))
        .sum()
}
