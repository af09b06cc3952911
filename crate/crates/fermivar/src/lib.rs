//! Finite-mode laboratory for the variational quantization of fermionic fields.
//!
//! The crate realizes the functional Schrödinger picture at a finite number of
//! modes, where every functional becomes an element of a finite Grassmann
//! algebra and every field operator becomes a matrix.
//!
//! * [`grassmann`]: exact Grassmann arithmetic, Berezin integration, functional
//!   derivatives, duals and inner products.
//! * [`dirac`]: first-quantized Dirac Hamiltonians in momentum space and on a
//!   1+1D lattice, with spectral projectors.
//! * [`gaussian`]: Gaussian functional states, the `Q` propagation of the
//!   covariance, overlaps, Bogoliubov data and the Fock-space realization.
//! * [`fock`]: operators on the Grassmann space as column-applied quadratic
//!   forms in generators and derivatives.
//! * [`schwinger`]: pair production in a ramped constant electric field and the
//!   vacuum persistence probability.
//! * [`poincare`]: momentum, Hamiltonian and boost operators on a lattice and
//!   the realized subset of the Poincaré commutation relations.
//! * [`interaction`]: the nonlinear self-interaction functional and the linear
//!   quartic operator it is compared against.

pub mod dirac;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod grassmann;
pub mod interaction;
pub mod linalg;
pub mod poincare;
pub mod random;
pub mod schwinger;

pub use error::{Error, Result};
pub use num_complex::Complex64;
