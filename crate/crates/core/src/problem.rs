//! JSON problem files: two observables, a state and the coefficient settings.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "dimension": 2,
//!   "observable_a": { "real": [[0, 1], [1, 0]] },
//!   "observable_b": { "real": [[0, 0], [0, 0]], "imag": [[0, -1], [1, 0]] },
//!   "state": { "type": "pure", "data": { "real": [1, 0] } },
//!   "basis": "computational",
//!   "construction": "basis"
//! }
//! ```
//!
//! Matrices are row-major; `imag` defaults to zero. An explicit basis is a
//! unitary matrix whose columns are the basis vectors. `sweep_state` is an
//! optional second vector used by custom sweeps.

use serde::{Deserialize, Serialize};

use crate::config::{BasisChoice, BoundConfig};
use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, HermitianMatrix, Matrix, C64};
use crate::quantum::{Basis, Construction, Observable, QuantumState};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexGrid {
    pub real: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexList {
    pub real: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum StateSpec {
    Pure(ComplexList),
    Density(ComplexGrid),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    Named(String),
    Explicit(ComplexGrid),
}

impl Default for BasisSpec {
    fn default() -> Self {
        Self::Named("computational".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub dimension: usize,
    pub observable_a: ComplexGrid,
    pub observable_b: ComplexGrid,
    pub state: StateSpec,
    #[serde(default)]
    pub basis: BasisSpec,
    #[serde(default = "default_construction")]
    pub construction: Construction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_state: Option<ComplexList>,
}

fn default_construction() -> Construction {
    Construction::Basis
}

/// A validated problem ready for the bound routines.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub a: Observable,
    pub b: Observable,
    pub state: QuantumState,
    pub config: BoundConfig,
    pub sweep_state: Option<ComplexVector>,
}

fn schema_err(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn list_to_vector(list: &ComplexList, n: usize, what: &str) -> Result<ComplexVector> {
    if list.real.len() != n {
        return Err(schema_err(format!("{what}.real has {} entries, expected {n}", list.real.len())));
    }
    let zeros = vec![0.0; n];
    let im = list.imag.as_ref().unwrap_or(&zeros);
    if im.len() != n {
        return Err(schema_err(format!("{what}.imag has {} entries, expected {n}", im.len())));
    }
    ComplexVector::from_parts(&list.real, im)
}

fn grid_to_matrix(grid: &ComplexGrid, n: usize, what: &str) -> Result<Matrix> {
    let check = |rows: &Vec<Vec<f64>>, part: &str| -> Result<()> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(schema_err(format!("{what}.{part} must be a {n}x{n} grid")));
        }
        Ok(())
    };
    check(&grid.real, "real")?;
    if let Some(im) = &grid.imag {
        check(im, "imag")?;
    }
    let rows = (0..n)
        .map(|i| (0..n).map(|j| C64::new(grid.real[i][j], grid.imag.as_ref().map_or(0.0, |im| im[i][j]))).collect())
        .collect();
    Matrix::from_rows(rows)
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| schema_err(format!("invalid problem file: {e}")))?;
        if file.schema != SCHEMA_VERSION {
            return Err(schema_err(format!("unsupported schema {}, expected {SCHEMA_VERSION}", file.schema)));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files are serializable")
    }

    pub fn validate(&self) -> Result<Problem> {
        let n = self.dimension;
        if n == 0 {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        let a = Observable::new(HermitianMatrix::new(grid_to_matrix(&self.observable_a, n, "observable_a")?)?)?;
        let b = Observable::new(HermitianMatrix::new(grid_to_matrix(&self.observable_b, n, "observable_b")?)?)?;
        let state = match &self.state {
            StateSpec::Pure(list) => QuantumState::pure(list_to_vector(list, n, "state.data")?)?,
            StateSpec::Density(grid) => {
                QuantumState::density(HermitianMatrix::new(grid_to_matrix(grid, n, "state.data")?)?)?
            }
        };
        let basis = match &self.basis {
            BasisSpec::Named(name) => match name.as_str() {
                "computational" => BasisChoice::Computational,
                "eigen_a" => BasisChoice::EigenA,
                "eigen_b" => BasisChoice::EigenB,
                other => return Err(schema_err(format!("unknown basis {other:?}"))),
            },
            BasisSpec::Explicit(grid) => {
                let m = grid_to_matrix(grid, n, "basis")?;
                BasisChoice::Explicit(Basis::explicit((0..n).map(|j| m.column(j)).collect())?)
            }
        };
        if self.construction == Construction::Supplied {
            return Err(schema_err("construction must be \"basis\" or \"fidelity\""));
        }
        let sweep_state = self.sweep_state.as_ref().map(|l| list_to_vector(l, n, "sweep_state")).transpose()?;
        Ok(Problem {
            a,
            b,
            state,
            config: BoundConfig { construction: self.construction, basis, pi2: None },
            sweep_state,
        })
    }
}

/// Parses and validates in one step.
pub fn load_problem(text: &str) -> Result<Problem> {
    ProblemFile::from_json(text)?.validate()
}
