//! Creation and annihilation operators on the Grassmann space.
//!
//! Per single-particle index `x`,
//! `a_x = (√λ/2)(u_x + (2/λ) ∂/∂u†_x)` and `a†_x = (√λ/2)(u†_x + (2/λ) ∂/∂u_x)`.
//! They satisfy the canonical anticommutation relations for every `λ > 0`
//! and are adjoint to each other in the monomial basis only at `λ = 2`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_lambda, vacuum_covariance};
use crate::dirac::ModeBasis;
use crate::error::{Error, Result};
use crate::fock::{self, ElemOp, LinearOp, Operator, QuadOp};
use crate::grassmann::{gaussian_element, GeneratorIndex, GrassmannElement};
use crate::linalg::{c, CMatrix};

/// Largest single-particle dimension for which the Fock realization is built.
pub const MAX_FOCK_DIM: usize = 8;

/// `a_x` in a `d`-mode algebra.
pub fn site_annihilator(d: usize, x: usize, lambda: f64) -> LinearOp {
    let mut op = LinearOp::zero(2 * d);
    let s = lambda.sqrt() / 2.0;
    op.push(ElemOp::mul(GeneratorIndex::field(x), d), c(s, 0.0));
    op.push(ElemOp::der(GeneratorIndex::conjugate(x), d), c(s * 2.0 / lambda, 0.0));
    op
}

/// `a†_x` in a `d`-mode algebra.
pub fn site_creator(d: usize, x: usize, lambda: f64) -> LinearOp {
    let mut op = LinearOp::zero(2 * d);
    let s = lambda.sqrt() / 2.0;
    op.push(ElemOp::mul(GeneratorIndex::conjugate(x), d), c(s, 0.0));
    op.push(ElemOp::der(GeneratorIndex::field(x), d), c(s * 2.0 / lambda, 0.0));
    op
}

/// `Σ_xy k_xy a†_x a_y` for a single-particle kernel `k`.
pub fn bilinear(kernel: &CMatrix, lambda: f64) -> QuadOp {
    let d = kernel.nrows();
    let creators: Vec<LinearOp> = (0..d).map(|x| site_creator(d, x, lambda)).collect();
    let annihilators: Vec<LinearOp> = (0..d).map(|y| site_annihilator(d, y, lambda)).collect();
    let mut out = QuadOp::zero(2 * d);
    for x in 0..d {
        for y in 0..d {
            let k = kernel[(x, y)];
            if k != Complex64::new(0.0, 0.0) {
                let term = creators[x].then_after(&annihilators[y]);
                out = QuadOp::combination(2 * d, &[(c(1.0, 0.0), &out), (k, &term)]);
            }
        }
    }
    out
}

/// Operator realization of a single-particle basis.
#[derive(Debug, Clone)]
pub struct FockRep {
    pub basis: ModeBasis,
    pub lambda: f64,
    /// `Ĥ = Σ_xy h_xy a†_x a_y`.
    pub hamiltonian: QuadOp,
    /// `a_n = Σ_y ψ̄_n(y) a_y` for each eigenmode.
    pub a_ops: Vec<LinearOp>,
    /// `a†_n = Σ_x ψ_n(x) a†_x` for each eigenmode.
    pub adag_ops: Vec<LinearOp>,
}

/// Defects of the operator identities, all zero up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockChecks {
    /// Largest `‖{a_m, a†_n} − δ_mn‖_F` over all pairs.
    pub anticommutator: f64,
    /// Largest `‖{a_m, a_n}‖_F` over all unordered pairs.
    pub annihilator_pairs: f64,
    /// `‖Ĥ − Σ E_n a†_n a_n‖_F`.
    pub hamiltonian: f64,
    /// `‖Ĥ Ψ₀ − E₀ Ψ₀‖ / ‖Ψ₀‖` for the Gaussian vacuum.
    pub vacuum_residual: f64,
}

/// Builds the creation, annihilation and Hamiltonian operators for `basis`.
pub fn build_fock(basis: &ModeBasis, lambda: f64) -> Result<FockRep> {
    check_lambda(lambda)?;
    let d = basis.dim();
    if d > MAX_FOCK_DIM {
        return Err(Error::Budget { what: "Fock single-particle dimension", value: d, limit: MAX_FOCK_DIM });
    }
    let sites_a: Vec<LinearOp> = (0..d).map(|y| site_annihilator(d, y, lambda)).collect();
    let sites_adag: Vec<LinearOp> = (0..d).map(|x| site_creator(d, x, lambda)).collect();
    let mut a_ops = Vec::with_capacity(d);
    let mut adag_ops = Vec::with_capacity(d);
    for n in 0..d {
        let weights_a: Vec<(Complex64, &LinearOp)> =
            (0..d).map(|y| (basis.vectors[(y, n)].conj(), &sites_a[y])).collect();
        let weights_adag: Vec<(Complex64, &LinearOp)> =
            (0..d).map(|x| (basis.vectors[(x, n)], &sites_adag[x])).collect();
        a_ops.push(LinearOp::combination(2 * d, &weights_a));
        adag_ops.push(LinearOp::combination(2 * d, &weights_adag));
    }
    Ok(FockRep { basis: basis.clone(), lambda, hamiltonian: bilinear(&basis.h, lambda), a_ops, adag_ops })
}

impl FockRep {
    /// Single-particle dimension `d`.
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Number of generators `2d`.
    pub fn n_generators(&self) -> usize {
        2 * self.dim()
    }

    /// `a†_n a_n`.
    pub fn number_op(&self, n: usize) -> QuadOp {
        self.adag_ops[n].then_after(&self.a_ops[n])
    }

    /// `Σ_n E_n a†_n a_n`.
    pub fn mode_sum_hamiltonian(&self) -> QuadOp {
        let numbers: Vec<QuadOp> = (0..self.dim()).map(|n| self.number_op(n)).collect();
        let parts: Vec<(Complex64, &QuadOp)> =
            numbers.iter().zip(&self.basis.energies).map(|(op, e)| (c(*e, 0.0), op)).collect();
        QuadOp::combination(self.n_generators(), &parts)
    }

    /// The Gaussian vacuum `exp(u† Ω₀ u)` with `Ω₀ = (λ/2)(P₋ − P₊)`.
    pub fn vacuum_state(&self) -> Result<GrassmannElement> {
        gaussian_element(&vacuum_covariance(&self.basis, self.lambda)?.omega)
    }

    /// Vacuum energy `Σ_{E_n < 0} E_n`; zero modes count as filled and add nothing.
    pub fn vacuum_energy(&self) -> f64 {
        self.basis.energies.iter().filter(|e| **e < 0.0).sum()
    }

    /// Evaluates every operator identity of the realization.
    pub fn checks(&self) -> Result<FockChecks> {
        let d = self.dim();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|m| (0..d).map(move |n| (m, n))).collect();
        let defects = pairs
            .par_iter()
            .map(|&(m, n)| {
                let delta = if m == n { 1.0 } else { 0.0 };
                let ac = fock::anticommutator_defect(&self.a_ops[m], &self.adag_ops[n], c(delta, 0.0))?;
                let aa = if m <= n {
                    fock::anticommutator_defect(&self.a_ops[m], &self.a_ops[n], c(0.0, 0.0))?
                } else {
                    0.0
                };
                Ok((ac, aa))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let anticommutator = defects.iter().fold(0.0f64, |acc, d| acc.max(d.0));
        let annihilator_pairs = defects.iter().fold(0.0f64, |acc, d| acc.max(d.1));
        let mode_sum = self.mode_sum_hamiltonian();
        let diff =
            QuadOp::combination(self.n_generators(), &[(c(1.0, 0.0), &self.hamiltonian), (c(-1.0, 0.0), &mode_sum)]);
        let hamiltonian = fock::frobenius_norm(&diff)?;
        let vacuum = self.vacuum_state()?;
        let image = fock::apply(&self.hamiltonian, &vacuum)?;
        let residual = &image - &vacuum.scale(c(self.vacuum_energy(), 0.0));
        let vacuum_residual = residual.coefficient_norm() / vacuum.coefficient_norm();
        Ok(FockChecks { anticommutator, annihilator_pairs, hamiltonian, vacuum_residual })
    }

    /// Dense Hamiltonian matrix; available for `d ≤ 5`.
    pub fn hamiltonian_matrix(&self) -> Result<CMatrix> {
        fock::to_dense(&self.hamiltonian as &dyn Operator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{eigenmodes, momentum_modes};
    use crate::fock::apply;

    #[test]
    fn single_positive_mode_vacuum_is_empty() {
        let basis = eigenmodes(&CMatrix::from_element(1, 1, c(1.0, 0.0))).unwrap();
        let rep = build_fock(&basis, 2.0).unwrap();
        let vacuum = rep.vacuum_state().unwrap();
        // exp(−u†u) = 1 + u·u† in canonical order.
        assert_eq!(vacuum.coefficient(0b11), c(1.0, 0.0));
        let number = apply(&rep.number_op(0), &vacuum).unwrap();
        assert!(number.coefficient_norm() < 1e-15);
    }

    #[test]
    fn vacuum_energy_of_two_band_mode() {
        let basis = momentum_modes(&[0.0], 1.0).unwrap();
        let rep = build_fock(&basis, 2.0).unwrap();
        assert_eq!(rep.vacuum_energy(), -1.0);
        let checks = rep.checks().unwrap();
        assert!(checks.vacuum_residual < 1e-14, "{checks:?}");
        assert!(checks.anticommutator < 1e-14 && checks.annihilator_pairs < 1e-14);
        assert!(checks.hamiltonian < 1e-13);
    }

    #[test]
    fn distinct_modes_anticommute() {
        let basis = momentum_modes(&[0.4], 0.7).unwrap();
        let rep = build_fock(&basis, 1.3).unwrap();
        let d = fock::anticommutator_defect(&rep.a_ops[0], &rep.adag_ops[1], c(0.0, 0.0)).unwrap();
        assert!(d < 1e-15);
    }

    #[test]
    fn budget_guard() {
        let basis = eigenmodes(&CMatrix::identity(9, 9)).unwrap();
        assert!(matches!(build_fock(&basis, 2.0), Err(Error::Budget { .. })));
        let small = eigenmodes(&CMatrix::identity(1, 1)).unwrap();
        assert!(build_fock(&small, -2.0).is_err());
    }
}
