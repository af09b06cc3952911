//! The Grassmann oracle suite: Berezin integrals against independently
//! evaluated determinants, and algebraic identities on random elements.

use fermivar::grassmann::{
    berezin_integrate, derive, dual_functional, exp_even, gaussian_element, gaussian_integral, hermitian_conjugate,
    inner_product, ln_even, GeneratorIndex, GrassmannElement, QuadraticForm,
};
use fermivar::linalg::{c, identity, CMatrix};
use fermivar::{random, Complex64};

use super::{summarize, Output, Worst, SUMMARY_HEADERS};
use crate::config::SelftestParams;
use crate::table::Table;

/// Determinant by the permutation expansion, independent of any factorization.
pub fn leibniz_det(a: &CMatrix) -> Complex64 {
    fn expand(a: &CMatrix, row: usize, used: &mut Vec<bool>, sign: f64, acc: Complex64, out: &mut Complex64) {
        let n = a.nrows();
        if row == n {
            *out += acc * sign;
            return;
        }
        // Inversions contributed by choosing column `col` at this row.
        for col in 0..n {
            if used[col] {
                continue;
            }
            let inversions = used[col + 1..].iter().filter(|u| **u).count();
            used[col] = true;
            let s = if inversions % 2 == 0 { sign } else { -sign };
            expand(a, row + 1, used, s, acc * a[(row, col)], out);
            used[col] = false;
        }
    }
    let mut out = Complex64::new(0.0, 0.0);
    expand(a, 0, &mut vec![false; a.nrows()], 1.0, Complex64::new(1.0, 0.0), &mut out);
    out
}

pub fn run(p: &SelftestParams, seed: u64, out: &mut Output) -> fermivar::Result<()> {
    let mut rng = random::rng(seed);
    let mut table = Table::new("selftest", &SUMMARY_HEADERS);
    let tol = p.tolerance;

    let mut worst = Worst::default();
    for k in 0..p.gaussian_cases {
        let n = 1 + k % p.max_modes;
        let a = random::matrix(&mut rng, n, n);
        let value = gaussian_integral(&QuadraticForm::new(a.clone())?)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        worst.add((value - leibniz_det(&a) * sign).norm());
    }
    summarize(
        out,
        &mut table,
        "gaussian_integral",
        "∫ exp(u†Au) against (−1)^n det A by permutation expansion",
        worst,
        tol,
    );

    let mut worst = Worst::default();
    for n in 1..=p.max_norm_modes {
        for _ in 0..p.norm_cases {
            let omega = random::matrix(&mut rng, n, n);
            let psi = gaussian_element(&omega)?;
            let norm = inner_product(&psi, &psi)?;
            worst.add((norm - leibniz_det(&(identity(n) + omega.adjoint() * &omega))).norm());
        }
    }
    summarize(out, &mut table, "norm_identity", "⟨Ψ|Ψ⟩ against det(1 + Ω†Ω) for Ψ = exp(u†Ωu)", worst, tol);

    let mut worst = Worst::default();
    for n in 1..=p.max_norm_modes.min(3) {
        for _ in 0..p.norm_cases {
            let omega = random::matrix(&mut rng, n, n) + identity(n) * c(1.5, 0.0);
            let od = omega.adjoint();
            let Some(inv) = od.clone().try_inverse() else { continue };
            let expected = gaussian_element(&inv)?.scale(leibniz_det(&(-od)));
            worst.add(dual_functional(&gaussian_element(&omega)?)?.max_abs_diff(&expected));
        }
    }
    summarize(out, &mut table, "dual_gaussian", "dual of exp(u†Ωu) against det(−Ω†) exp(u†(Ω†)⁻¹u)", worst, tol);

    let n = p.property_modes;
    let generators: Vec<GeneratorIndex> = GeneratorIndex::all(n).collect();
    let mut anticommute = Worst::default();
    for &g in &generators {
        for &h in &generators {
            let (x, y) = (GrassmannElement::generator(n, g), GrassmannElement::generator(n, h));
            anticommute.add((&(&x * &y) + &(&y * &x)).coefficient_norm());
        }
    }
    summarize(out, &mut table, "generators_anticommute", "θᵢθⱼ + θⱼθᵢ over all generator pairs", anticommute, 0.0);

    let (mut assoc, mut leibniz, mut parts, mut conj, mut analytic) =
        (Worst::default(), Worst::default(), Worst::default(), Worst::default(), Worst::default());
    for _ in 0..p.property_cases {
        let a = random::element(&mut rng, n);
        let b = random::element(&mut rng, n);
        let d = random::element(&mut rng, n);
        assoc.add((&(&a * &b) * &d).max_abs_diff(&(&a * &(&b * &d))));
        let even = random::even_element(&mut rng, n);
        let odd = random::odd_element(&mut rng, n);
        let g = generators[(assoc.cases - 1) % generators.len()];
        for (x, sign) in [(&even, 1.0), (&odd, -1.0)] {
            let lhs = derive(&(x * &b), g);
            let rhs = &(&derive(x, g) * &b) + &(x * &derive(&b, g)).scale(c(sign, 0.0));
            leibniz.add(lhs.max_abs_diff(&rhs));
        }
        parts.add(berezin_integrate(&derive(&a, g)).norm());
        conj.add(hermitian_conjugate(&hermitian_conjugate(&a)).max_abs_diff(&a));
        let mut x = even.clone();
        x.add_term(0, c(1.3, 0.2));
        analytic.add(exp_even(&ln_even(&x)?)?.max_abs_diff(&x));
    }
    summarize(out, &mut table, "associativity", "(ab)c − a(bc) on random elements", assoc, tol);
    summarize(out, &mut table, "graded_leibniz", "∂(xb) = (∂x)b ± x∂b for even and odd x", leibniz, tol);
    summarize(out, &mut table, "integration_by_parts", "∫ ∂f = 0 on random elements", parts, tol);
    summarize(out, &mut table, "conjugation_involution", "(a†)† = a on random elements", conj, 0.0);
    summarize(out, &mut table, "exp_ln_round_trip", "exp(ln x) = x for even x with non-zero body", analytic, tol);
    out.table(table);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fermivar::linalg::det;

    #[test]
    fn permutation_expansion_matches_lu() {
        let mut rng = random::rng(0);
        for n in 1..=5 {
            let a = random::matrix(&mut rng, n, n);
            assert!((leibniz_det(&a) - det(&a)).norm() < 1e-12 * det(&a).norm().max(1.0));
        }
        let swap = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(leibniz_det(&swap), c(-1.0, 0.0));
    }

    #[test]
    fn suite_passes_at_small_size() {
        let p = SelftestParams { gaussian_cases: 12, norm_cases: 2, property_cases: 5, ..SelftestParams::default() };
        let mut out = Output::default();
        run(&p, 1, &mut out).unwrap();
        for m in out.recorder.metrics() {
            assert_eq!(m.verdict, crate::record::Verdict::Pass, "{m:?}");
        }
    }
}
