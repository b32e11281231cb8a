//! Closed-form parameter rules `n ↦ value` used to declare triangular arrays.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TablePoint {
    pub n: u64,
    pub value: f64,
}

/// A named schedule: `constant`, `linear` (`coef·n + offset`), `power`
/// (`coef·n^exp`) or an explicit `table` of `(n, value)` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Schedule {
    Constant {
        value: f64,
    },
    Linear {
        coef: f64,
        #[serde(default)]
        offset: f64,
    },
    Power {
        coef: f64,
        exp: f64,
    },
    Table {
        values: Vec<TablePoint>,
    },
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn power(coef: f64, exp: f64) -> Self {
        Schedule::Power { coef, exp }
    }

    /// `K_n = n`.
    pub fn identity() -> Self {
        Schedule::Linear {
            coef: 1.0,
            offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Schedule(format!("{name} must be finite, got {v}")))
            }
        };
        match self {
            Schedule::Constant { value } => finite("value", *value),
            Schedule::Linear { coef, offset } => {
                finite("coef", *coef)?;
                finite("offset", *offset)
            }
            Schedule::Power { coef, exp } => {
                finite("coef", *coef)?;
                finite("exp", *exp)
            }
            Schedule::Table { values } => {
                if values.is_empty() {
                    return Err(Error::Schedule("table has no values".into()));
                }
                for pt in values {
                    finite("table value", pt.value)?;
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, n: u64) -> Result<f64> {
        let v = match self {
            Schedule::Constant { value } => *value,
            Schedule::Linear { coef, offset } => coef * n as f64 + offset,
            Schedule::Power { coef, exp } => {
                if *exp == 0.0 {
                    *coef
                } else if *exp == 1.0 {
                    coef * n as f64
                } else if *exp == -1.0 {
                    coef / n as f64
                } else {
                    coef * (n as f64).powf(*exp)
                }
            }
            Schedule::Table { values } => values
                .iter()
                .find(|pt| pt.n == n)
                .map(|pt| pt.value)
                .ok_or_else(|| Error::Schedule(format!("table has no entry for n = {n}")))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Schedule(format!("value at n = {n} is not finite")))
        }
    }

    /// Evaluates a row-count schedule: the value rounded to the nearest integer, at least 1.
    pub fn eval_count(&self, n: u64) -> Result<u64> {
        let v = self.eval(n)?.round();
        if !(1.0..=1e15).contains(&v) {
            return Err(Error::Schedule(format!(
                "row count at n = {n} must lie in [1, 1e15], got {v}"
            )));
        }
        Ok(v as u64)
    }
}
