//! Entanglement entropy of free Lifshitz fermions on a periodic lattice.
//!
//! The correlation-matrix pipeline lives in [`lattice`], [`eigen`] and
//! [`entropy`]. [`oracle`] recomputes the same quantities by exact
//! diagonalization in Fock space for very small rings. [`thermal`] runs
//! parameter sweeps and fits the low- and high-temperature expansions,
//! [`cmera`] evaluates the continuous MERA construction and its emergent
//! metric, and [`table`] / [`plot`] serialize results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmera;
pub mod eigen;
pub mod entropy;
pub mod lattice;
pub mod oracle;
pub mod plot;
pub mod table;
pub mod thermal;

use thiserror::Error;

pub use cmera::CmeraError;
pub use entropy::{entanglement_entropy, entropy_of, EntropyError, EntropyPoint};
pub use lattice::{
    Beta, CorrelationMatrix, LatticeError, LatticeSpec, ModeGrid, ZeroModeConvention,
};
pub use oracle::OracleError;
pub use plot::PlotError;
pub use table::{SweepRow, SweepTable, TableError};
pub use thermal::{FitError, FitResult, ThermalError};

/// Any failure raised by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Cmera(#[from] CmeraError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Plot(#[from] PlotError),
}
