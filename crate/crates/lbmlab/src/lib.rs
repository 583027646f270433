//! Multiple-relaxation-time lattice Boltzmann laboratory.
//!
//! The crate bundles five cooperating pieces:
//!
//! - [`model`]: the catalog of DdQq schemes (D2Q5, D2Q9, D2Q13, D3Q15, D3Q19)
//!   with their velocity sets, orthogonal moment bases, equilibrium moments
//!   and relaxation vectors.
//! - [`kernel`]: the time-domain engine (collide in moment space, stream on a
//!   periodic lattice).
//! - [`dispersion`]: von Neumann analysis of the schemes: per-wavevector
//!   evolution matrices, eigenvalue spectra, hydrodynamic mode tracking and
//!   polynomial fits of the growth exponents in powers of k.
//! - [`theory`]: closed-form transport coefficients, anomalous-advection
//!   expressions and the tuning conditions that cancel them, with solvers.
//! - [`experiments`]: Gaussian dot / vortex advection runs, plane-wave
//!   advection measurements and a Fourier-space toy model, with quantitative
//!   anisotropy reports.
//!
//! The `lbmlab` binary exposes all of it behind config-file driven
//! subcommands; see the README for the grammar.

pub mod cli;
pub mod dispersion;
pub mod experiments;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod theory;

pub use model::{build_model, Model, ModelName};
