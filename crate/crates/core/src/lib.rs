//! Boundary-projector construction of quasi-free Klein-Gordon states on a
//! circle Cauchy surface.
//!
//! The pipeline: a real-analytic metric family h_t(y)dy² is rotated to
//! imaginary time, the resulting elliptic operator gets a Dirichlet
//! realization K₀ on the slab (−T, T) × S¹, and the boundary projectors
//! C± = ∓γ± K₀⁻¹ γ* S₀ (conjugated by R) deliver the Cauchy-surface
//! covariances λ± = ±q C± of a pure quasi-free state. Closed-form
//! ultra-static oracles and a real-time frequency probe quantify how well
//! the discrete pair reproduces the exact projector, its positivity, its
//! purity, and the e^{−2Tε} negative-frequency law.

pub mod calderon;
pub mod discretize;
pub mod elliptic;
pub mod error;
pub mod evolve;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod quad;
pub mod state;

pub use error::{CoreError, Result};
