//! Coherent population transfer in degenerate n-state quantum systems.
//!
//! When every coupling `V_jk(t) = r_jk V(t)` shares one envelope and the
//! bare energies coincide, the amplitudes depend on time only through the
//! action `A(t) = ∫₀ᵗ V`. The dressed combinations `c_i = Σ_j x_ij a_j` then
//! evolve as pure phases `exp(-i z_i A)`, which gives closed forms for every
//! occupation probability and turns "complete transfer at `t₀`" into
//! conditions on `A(t₀)` and the coupling ratios.
//!
//! Module map:
//!
//! - [`pulse`]: envelopes `V(t)` and their action integral.
//! - [`coupling`]: relative strengths `r_jk`, diagonals and bare energies.
//! - [`dressed`]: eigen-rows, eigenvalues and the transfer matrix.
//! - [`analytic`]: amplitudes/probabilities from a dressed basis, plus the
//!   special-case formulas (flat top, leakage estimate, kicks).
//! - [`control`]: complete-transfer design families.
//! - [`numeric`]: RK4 reference integrator of the exact equations.

pub mod analytic;
pub mod control;
pub mod coupling;
pub mod dressed;
mod error;
pub mod numeric;
pub mod pulse;
pub mod quadrature;
pub mod trajectory;

pub use coupling::CouplingModel;
pub use dressed::DressedBasis;
pub use error::{Error, Result};
pub use pulse::Pulse;
pub use trajectory::Trajectory;

pub use num_complex::Complex64 as C64;
