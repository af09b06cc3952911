//! Seeded generators for random test instances.
//!
//! Every generator takes an explicit RNG so experiments are reproducible from
//! a single integer seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grassmann::GrassmannElement;
use crate::linalg::{c, CMatrix};

/// Deterministic RNG for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with independent uniform parts in `[-1, 1)`.
pub fn complex<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `rows × cols` matrix with entries from [`complex`].
pub fn matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex(rng))
}

/// Random Hermitian `n × n` matrix.
pub fn hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let a = matrix(rng, n, n);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Random unitary `n × n` matrix from the QR factor of a random matrix.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    matrix(rng, n, n).qr().q()
}

/// Random element with every monomial of the algebra present.
pub fn element<R: Rng>(rng: &mut R, n_modes: usize) -> GrassmannElement {
    let top = 1u64 << (2 * n_modes);
    GrassmannElement::from_terms(n_modes, (0..top).map(|m| (m, complex(rng))))
}

/// Random element restricted to monomials of even degree.
pub fn even_element<R: Rng>(rng: &mut R, n_modes: usize) -> GrassmannElement {
    let top = 1u64 << (2 * n_modes);
    GrassmannElement::from_terms(n_modes, (0..top).filter(|m| m.count_ones() % 2 == 0).map(|m| (m, complex(rng))))
}

/// Random element restricted to monomials of odd degree.
pub fn odd_element<R: Rng>(rng: &mut R, n_modes: usize) -> GrassmannElement {
    let top = 1u64 << (2 * n_modes);
    GrassmannElement::from_terms(n_modes, (0..top).filter(|m| m.count_ones() % 2 == 1).map(|m| (m, complex(rng))))
}
