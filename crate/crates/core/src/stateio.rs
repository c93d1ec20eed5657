//! Version-tagged JSON state files.
//!
//! ```json
//! {
//!   "format": "bipartite-density-matrix",
//!   "version": 1,
//!   "m": 2,
//!   "n": 3,
//!   "entries": [[0.5, 0.0], [0.0, 0.0], ...]
//! }
//! ```
//!
//! `entries` holds the `(mn)^2` matrix elements row-major as `[re, im]` pairs.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::DensityMatrix;

pub const FORMAT_TAG: &str = "bipartite-density-matrix";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub format: String,
    pub version: u32,
    pub m: usize,
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_matrix(m: usize, n: usize, mat: &ComplexMatrix) -> Self {
        Self {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            m,
            n,
            entries: mat.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self::from_matrix(rho.m(), rho.n(), rho.matrix())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.format != FORMAT_TAG {
            return Err(Error::Parse(format!("unknown format tag `{}`", file.format)));
        }
        if file.version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported version {}", file.version)));
        }
        Ok(file)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let dim = self.m * self.n;
        if self.entries.len() != dim * dim {
            return Err(Error::Parse(format!(
                "{} entries for a {} x {} state, expected {}",
                self.entries.len(),
                self.m,
                self.n,
                dim * dim
            )));
        }
        ComplexMatrix::from_vec(dim, dim, self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }

    /// Parses into a validated state; failures name the broken invariant.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.m, self.n, self.matrix()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::StateViolation;

    #[test]
    fn json_round_trip_is_exact() {
        let rho = crate::families::build(&crate::families::FamilySpec::rho1(5.0, 2.0), Default::default()).unwrap();
        let text = StateFile::from_state(&rho).to_json();
        let back = StateFile::parse(&text).unwrap().to_state().unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn rejects_wrong_tag_version_and_size() {
        let mut f = StateFile::from_state(&DensityMatrix::maximally_mixed(2, 2).unwrap());
        f.version = 7;
        assert!(matches!(StateFile::parse(&serde_json::to_string(&f).unwrap()), Err(Error::Parse(_))));
        f.version = 1;
        f.format = "other".into();
        assert!(matches!(StateFile::parse(&serde_json::to_string(&f).unwrap()), Err(Error::Parse(_))));
        f.format = FORMAT_TAG.into();
        f.entries.pop();
        assert!(matches!(f.to_state(), Err(Error::Parse(_))));
        assert!(matches!(StateFile::parse("{not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn trace_violation_names_residual() {
        let f = StateFile::from_matrix(2, 3, &ComplexMatrix::identity(6).scale(0.15));
        match f.to_state() {
            Err(Error::InvalidState(StateViolation::Trace { residual })) => assert!((residual - 0.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }
}
