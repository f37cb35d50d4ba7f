//! Entanglement entropy of Gaussian fermionic states from correlation-matrix
//! eigenvalues.

use std::f64::consts::LN_2;

use thiserror::Error;

use crate::eigen::hermitian_eigenvalues;
use crate::lattice::{build_correlation_matrix, Beta, LatticeError, LatticeSpec};

/// Eigenvalues this far outside `[0, 1]` are treated as rounding noise.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Eigenvalues within this distance of 0 or 1 carry no entropy.
pub const PURE_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    /// The matrix deviates from its conjugate transpose.
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    /// QL iteration failed to deflate.
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    /// A correlation eigenvalue fell outside the physical range.
    #[error("eigenvalue {value} lies outside [0, 1]")]
    EigenvalueOutOfRange { value: f64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Von Neumann entropy in nats of a Gaussian state with correlation
/// eigenvalues `eigs`.
pub fn entanglement_entropy(eigs: &[f64]) -> Result<f64, EntropyError> {
    let mut total = 0.0;
    for &raw in eigs {
        if !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&raw) {
            return Err(EntropyError::EigenvalueOutOfRange { value: raw });
        }
        total += binary_entropy(raw.clamp(0.0, 1.0));
    }
    Ok(total)
}

/// `-c ln c - (1-c) ln(1-c)` with `0 ln 0 = 0`.
pub fn binary_entropy(c: f64) -> f64 {
    if c <= PURE_TOLERANCE || c >= 1.0 - PURE_TOLERANCE {
        return 0.0;
    }
    -(c * c.ln() + (1.0 - c) * (1.0 - c).ln())
}

/// Parameters that produced an [`EntropyPoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub n_sites: usize,
    pub n_a: usize,
    pub z_exponent: u32,
    pub mass: f64,
    pub beta: Beta,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyPoint {
    pub entropy: f64,
    pub params: PointParams,
    pub eigenvalues: Option<Vec<f64>>,
}

/// Builds the correlation matrix on `subsystem`, diagonalizes it and
/// evaluates the entropy.
pub fn entropy_of(
    spec: &LatticeSpec,
    beta: Beta,
    subsystem: &[usize],
) -> Result<EntropyPoint, EntropyError> {
    let matrix = build_correlation_matrix(spec, beta, subsystem)?;
    let eigs = hermitian_eigenvalues(&matrix)?;
    let entropy = entanglement_entropy(&eigs)?;
    Ok(EntropyPoint {
        entropy,
        params: PointParams {
            n_sites: spec.n_sites,
            n_a: subsystem.len(),
            z_exponent: spec.z_exponent,
            mass: spec.mass,
            beta,
            spacing: spec.spacing,
        },
        eigenvalues: Some(eigs),
    })
}

/// Volume-law ceiling `2 N_A ln 2`.
pub fn max_entropy(n_a: usize) -> f64 {
    2.0 * n_a as f64 * LN_2
}
