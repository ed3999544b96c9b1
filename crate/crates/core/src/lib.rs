//! Quasi-exactly solvable bound states of a particle near a point-like global
//! monopole threaded by an Aharonov-Bohm flux.
//!
//! The analytic side ([`heun`], [`spectra`]) builds polynomial solutions of
//! the biconfluent Heun equation and the parameter constraints they impose.
//! [`oracle`] is an independent finite-difference eigen-solver used to
//! certify every analytic level.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod heun;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod spectra;

pub use error::{Error, Result};
pub use heun::{ConstrainedParam, HeunParameters, HeunSolution, RadialParameters, RadialWavefunction};
pub use oracle::{OracleReport, RadialGrid, RadialSpectrum};
pub use model::{DefectGeometry, Family, FluxField, MolecularParams, PotentialSpec, QuantumNumbers};
pub use spectra::{Constraint, DegeneracyReport, SpectrumRecord};
