//! Bundled exchange matrices used by the CLI and the test suites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk matrix format: `n` exchange rows followed by `m` coefficient
/// rows, each of length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    pub matrix: Vec<Vec<i64>>,
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix.len() != self.n + self.m {
            return Err(Error::Invalid(format!(
                "expected {} rows, found {}",
                self.n + self.m,
                self.matrix.len()
            )));
        }
        if self.matrix.iter().any(|r| r.len() != self.n) {
            return Err(Error::Invalid(format!("every row must have {} entries", self.n)));
        }
        Ok(())
    }

    pub fn exchange_matrix(&self) -> Vec<Vec<i64>> {
        self.matrix[..self.n].to_vec()
    }
}

const BUNDLED: &[(&str, &str)] = &[
    ("kronecker", include_str!("../fixtures/kronecker.json")),
    ("rank2-4-1", include_str!("../fixtures/rank2-4-1.json")),
    ("rank2-1-4", include_str!("../fixtures/rank2-1-4.json")),
    ("kronecker-t", include_str!("../fixtures/kronecker-t.json")),
    ("rank2-4-1-t", include_str!("../fixtures/rank2-4-1-t.json")),
    ("rank2-1-4-t", include_str!("../fixtures/rank2-1-4-t.json")),
    ("A2tilde", include_str!("../fixtures/A2tilde.json")),
    ("A3tilde", include_str!("../fixtures/A3tilde.json")),
    ("A3tilde-31", include_str!("../fixtures/A3tilde-31.json")),
    ("C2tilde", include_str!("../fixtures/C2tilde.json")),
    ("A4tilde-41", include_str!("../fixtures/A4tilde-41.json")),
];

pub fn names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled(name: &str) -> Option<MatrixFile> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| MatrixFile::parse(t).expect("bundled fixture is valid"))
}

/// Exchange matrix of a bundled fixture; panics on unknown names.
pub fn matrix(name: &str) -> Vec<Vec<i64>> {
    bundled(name).unwrap_or_else(|| panic!("unknown fixture {name}")).exchange_matrix()
}

/// The three rank-2 matrices with positive `b_12`.
pub const RANK2: [&str; 3] = ["kronecker", "rank2-4-1", "rank2-1-4"];
