// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    /// An eigen- or singular-value solver did not produce a usable answer.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Integration lost Hermiticity; retry with the suggested step.
    #[error("integration unstable at t = {time}: Hermiticity residual {residual:e}; retry with step {suggested_step:e}")]
    Instability {
        time: f64,
        residual: f64,
        suggested_step: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        LabError::InvalidConfig(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(LabError::DimensionMismatch { expected, found })
        }
    }
}
