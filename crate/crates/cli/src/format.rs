//! On-disk schemas. Complex data is stored as separate `re`/`im` arrays.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sepspec::{
    BipartiteDensityMatrix, Complex64, ComplexMatrix, ComplexVector, DecompositionCertificate,
    ProductTerm, SeparableDecomposition,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixData {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrixData {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |part: fn(&Complex64) -> f64| {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| part(&m[(r, c)])).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    /// Square matrix of side `dim`, or an invalid-input error naming the
    /// offending array.
    pub fn to_matrix(&self, dim: usize) -> Result<ComplexMatrix, CliError> {
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != dim || part.iter().any(|row| row.len() != dim) {
                return Err(CliError::invalid(format!(
                    "shape invariant violated: matrix.{name} must be {dim}x{dim}"
                )));
            }
        }
        Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
            Complex64::new(self.re[r][c], self.im[r][c])
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVectorData {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexVectorData {
    pub fn from_vector(v: &ComplexVector) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_vector(&self, len: usize, what: &str) -> Result<ComplexVector, CliError> {
        if self.re.len() != len || self.im.len() != len {
            return Err(CliError::invalid(format!(
                "dimension mismatch: {what} vectors must have length {len}"
            )));
        }
        Ok(ComplexVector::from_iterator(
            len,
            self.re
                .iter()
                .zip(&self.im)
                .map(|(&re, &im)| Complex64::new(re, im)),
        ))
    }
}

/// A bipartite `m⊗n` matrix. Also used for witness unitaries, which are
/// not states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub m: usize,
    pub n: usize,
    pub matrix: ComplexMatrixData,
}

impl StateFile {
    pub fn from_matrix(m: usize, n: usize, matrix: &ComplexMatrix) -> Self {
        Self {
            m,
            n,
            matrix: ComplexMatrixData::from_matrix(matrix),
        }
    }

    pub fn from_state(rho: &BipartiteDensityMatrix) -> Self {
        let (m, n) = rho.dims();
        Self::from_matrix(m, n, rho.matrix())
    }

    pub fn to_state(&self) -> Result<BipartiteDensityMatrix, CliError> {
        if self.m == 0 || self.n == 0 {
            return Err(CliError::invalid(
                "dimension invariant violated: m and n must be positive",
            ));
        }
        let matrix = self.matrix.to_matrix(self.m * self.n)?;
        Ok(BipartiteDensityMatrix::new(matrix, self.m, self.n)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermData {
    pub weight: f64,
    pub qubit: ComplexVectorData,
    pub qudit: ComplexVectorData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionMeta {
    pub t_star: f64,
    pub inequality_margin: f64,
    pub reconstruction_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub terms: Vec<TermData>,
    pub meta: DecompositionMeta,
}

impl DecompositionFile {
    pub fn new(d: &SeparableDecomposition, cert: &DecompositionCertificate) -> Self {
        Self {
            terms: d
                .terms
                .iter()
                .map(|t| TermData {
                    weight: t.weight,
                    qubit: ComplexVectorData::from_vector(&t.qubit),
                    qudit: ComplexVectorData::from_vector(&t.qudit),
                })
                .collect(),
            meta: DecompositionMeta {
                t_star: cert.t_star,
                inequality_margin: cert.inequality_margin,
                reconstruction_error: d.reconstruction_error,
            },
        }
    }

    /// Terms for a `2⊗n` state; vectors of any other length are rejected.
    pub fn to_decomposition(&self, n: usize) -> Result<SeparableDecomposition, CliError> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(ProductTerm {
                    weight: t.weight,
                    qubit: t.qubit.to_vector(2, "qubit")?,
                    qudit: t.qudit.to_vector(n, "qudit")?,
                })
            })
            .collect::<Result<_, CliError>>()?;
        Ok(SeparableDecomposition {
            terms,
            reconstruction_error: self.meta.reconstruction_error,
        })
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("malformed {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::failure(format!("cannot serialize: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
}
