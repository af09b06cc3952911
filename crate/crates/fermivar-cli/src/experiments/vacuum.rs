//! Fock-space operator identities and the vacuum energy on 1+1D lattices.

use fermivar::dirac::{eigenmodes, lattice_h_1p1};
use fermivar::fock;
use fermivar::gaussian::build_fock;

use super::Output;
use crate::config::VacuumParams;
use crate::record::Bound;
use crate::table::Table;

pub fn run(p: &VacuumParams, out: &mut Output) -> fermivar::Result<()> {
    let mut table = Table::new(
        "vacuum",
        &[
            "sites",
            "dim",
            "vacuum_energy",
            "half_abs_sum",
            "anticommutator",
            "annihilator_pairs",
            "hamiltonian",
            "vacuum_residual",
        ],
    );
    let bound = Bound::AtMost { limit: p.tolerance };
    for &n in &p.sites {
        let lattice = lattice_h_1p1(n, p.mass, p.spacing, p.scheme)?;
        let basis = eigenmodes(&lattice.h)?;
        let rep = build_fock(&basis, p.lambda)?;
        let checks = rep.checks()?;
        // Identity defects are measured against ‖1‖_F and the Hamiltonian against ‖Ĥ‖_F.
        let unit = f64::powf(2.0, rep.n_generators() as f64 / 2.0);
        let h_norm = fock::frobenius_norm(&rep.hamiltonian)?;
        let anticommutator = checks.anticommutator / unit;
        let pairs = checks.annihilator_pairs / unit;
        let hamiltonian = if h_norm > 0.0 { checks.hamiltonian / h_norm } else { checks.hamiltonian };
        let e0 = rep.vacuum_energy();
        let half = -0.5 * basis.energies.iter().map(|e| e.abs()).sum::<f64>();
        let r = &mut out.recorder;
        r.check(
            &format!("anticommutator[sites={n}]"),
            "largest ‖{a_m, a†_n} − δ_mn‖_F / ‖1‖_F",
            anticommutator,
            "relative",
            bound,
        );
        r.check(&format!("annihilator_pairs[sites={n}]"), "largest ‖{a_m, a_n}‖_F / ‖1‖_F", pairs, "relative", bound);
        r.check(&format!("mode_sum[sites={n}]"), "‖Ĥ − Σ E_n a†_n a_n‖_F / ‖Ĥ‖_F", hamiltonian, "relative", bound);
        r.check(
            &format!("vacuum_eigenvector[sites={n}]"),
            "‖ĤΨ₀ − E₀Ψ₀‖ / ‖Ψ₀‖ for the Gaussian vacuum",
            checks.vacuum_residual,
            "relative",
            bound,
        );
        r.check(
            &format!("vacuum_energy[sites={n}]"),
            "|E₀ + ½Σ|E_n||",
            (e0 - half).abs(),
            "energy",
            Bound::AtMost { limit: p.tolerance * half.abs().max(1.0) },
        );
        table.push(vec![
            n.into(),
            lattice.dim().into(),
            e0.into(),
            half.into(),
            anticommutator.into(),
            pairs.into(),
            hamiltonian.into(),
            checks.vacuum_residual.into(),
        ]);
    }
    out.table(table);
    Ok(())
}
