//! Bell-type inequalities and their quantum bounds.
//!
//! Classical inequalities are obtained as facets of correlation polytopes
//! ([`polytope`]). Substituting spin projectors for the probabilities yields a
//! Hermitian Bell operator ([`qops`]) whose extreme eigenvalues are the exact
//! quantum bounds for the chosen measurement directions ([`spectra`]). The
//! bounds are cross-checked against closed-form spectra and against random
//! density matrices ([`sampling`]); the maximally violating states are
//! analyzed in [`states`].

pub mod cli;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod polytope;
pub mod presets;
pub mod qops;
pub mod sampling;
pub mod schedule;
pub mod spectra;
pub mod states;

pub use error::{Error, Result};
pub use exec::Exec;
