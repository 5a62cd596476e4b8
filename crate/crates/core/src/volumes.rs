use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intrinsic volumes `V_0..V_d` with per-entry standard errors.
///
/// Exact computations carry all-zero `stderr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicVolumes {
    pub dim: usize,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl IntrinsicVolumes {
    pub fn exact(values: Vec<f64>) -> Self {
        let dim = values.len() - 1;
        IntrinsicVolumes {
            dim,
            stderr: vec![0.0; dim + 1],
            values,
        }
    }

    /// Intrinsic volumes of the empty set (all zero, including `V_0`).
    pub fn empty(dim: usize) -> Self {
        IntrinsicVolumes {
            dim,
            values: vec![0.0; dim + 1],
            stderr: vec![0.0; dim + 1],
        }
    }

    pub fn get(&self, k: usize) -> Result<f64> {
        self.values.get(k).copied().ok_or_else(|| {
            Error::Domain(format!(
                "V_{k} requested from a {}-dimensional body",
                self.dim
            ))
        })
    }

    pub fn err(&self, k: usize) -> Result<f64> {
        self.stderr.get(k).copied().ok_or_else(|| {
            Error::Domain(format!(
                "V_{k} requested from a {}-dimensional body",
                self.dim
            ))
        })
    }

    pub fn is_exact(&self) -> bool {
        self.stderr.iter().all(|&s| s == 0.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("intrinsic volumes serialize")
    }
}
