//! JSON matrix schema: `{"field": ..., "n": N, "entries": [[...], ...]}`.
//!
//! Entries are row-major over the full matrix. A real entry is a bare number
//! (a one-element array is also accepted); complex and quaternion entries
//! are arrays of 2 or 4 reals in component order.

use serde::{Deserialize, Serialize};

use super::{Field, Matrix, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Number(f64),
    Components(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: Field,
    pub n: usize,
    pub entries: Vec<Vec<ScalarJson>>,
}

impl ScalarJson {
    pub fn from_scalar<S: Scalar>(x: S) -> Self {
        if S::BETA == 1 {
            ScalarJson::Number(x.re())
        } else {
            ScalarJson::Components((0..S::BETA).map(|i| x.component(i)).collect())
        }
    }

    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        match self {
            ScalarJson::Number(x) if S::BETA == 1 => Ok(S::from_real(*x)),
            ScalarJson::Components(c) if c.len() == S::BETA => Ok(S::from_components(c)),
            _ => Err(Error::Dimension(format!(
                "{} entry needs {} component(s), got {self:?}",
                S::FIELD,
                S::BETA
            ))),
        }
    }
}

impl MatrixJson {
    pub fn from_matrix<S: Scalar>(m: &Matrix<S>) -> Self {
        Self {
            field: S::FIELD,
            n: m.rows(),
            entries: m
                .to_rows()
                .into_iter()
                .map(|row| row.into_iter().map(ScalarJson::from_scalar).collect())
                .collect(),
        }
    }

    pub fn to_matrix<S: Scalar>(&self) -> Result<Matrix<S>> {
        if self.field != S::FIELD {
            return Err(Error::FieldMismatch {
                expected: S::FIELD,
                found: self.field,
            });
        }
        if self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::Dimension(format!(
                "entries do not form a {0}x{0} matrix",
                self.n
            )));
        }
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(ScalarJson::to_scalar).collect::<Result<Vec<S>>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(&rows)
    }
}
