//! Poincaré relations on small SLAC lattices, the agreement of the split
//! Hamiltonian with the Fock construction, and covariance under
//! single-particle rotations.

use fermivar::dirac::{eigenmodes, lattice_h_1p1, Lattice, Scheme};
use fermivar::fock::{self, QuadOp};
use fermivar::gaussian::build_fock;
use fermivar::grassmann::{GeneratorIndex, GeneratorKind, GrassmannElement};
use fermivar::linalg::{self, c, CMatrix};
use fermivar::poincare::{
    build_boost_op, build_hamiltonian_split, build_momentum_op, commutator_report, momentum_from_kernel,
    relation_defect, split_kernel, Verdict,
};
use fermivar::random;

fn slac(n: usize) -> Lattice {
    lattice_h_1p1(n, 1.0, 1.0, Scheme::Slac).unwrap()
}

fn norm_of_difference(a: &QuadOp, b: &QuadOp) -> f64 {
    let diff = QuadOp::combination(a.n_generators, &[(c(1.0, 0.0), a), (c(-1.0, 0.0), b)]);
    fock::frobenius_norm(&diff).unwrap()
}

#[test]
fn exact_relations_and_tabulated_boost_defects() {
    for n in 2..=4 {
        let report = commutator_report(&slac(n), 2.0).unwrap();
        for row in &report.rows {
            println!("N={n} {:<7} {:<45} {:?} {:?} {:?}", row.id, row.relation, row.defect, row.tolerance, row.verdict);
        }
        for id in ["a", "b", "b1", "b2", "b3", "b4", "herm-H", "herm-P", "herm-K"] {
            let row = report.row(id).unwrap();
            assert_eq!(row.verdict, Verdict::Pass, "N={n} {id}: {row:?}");
        }
        for id in ["c", "d", "e", "h", "i"] {
            assert_eq!(report.row(id).unwrap().verdict, Verdict::NotRealized);
        }
        assert_eq!(report.row("f").unwrap().verdict, Verdict::Pass, "N={n}");
        assert_eq!(report.row("g").unwrap().verdict, Verdict::Pass, "N={n}");
    }
}

#[test]
fn momentum_commutes_with_itself() {
    let p = build_momentum_op(&slac(3)).unwrap();
    let zero = QuadOp::zero(p.n_generators);
    let (normalized, absolute) = relation_defect(&p, &p, &zero).unwrap();
    assert!(normalized < 1e-15 && absolute < 1e-13, "{normalized} {absolute}");
}

#[test]
fn split_hamiltonian_equals_the_fock_hamiltonian() {
    for lambda in [0.5, 2.0, 3.0] {
        for n in 2..=3 {
            let lat = slac(n);
            let split = build_hamiltonian_split(&lat, lambda).unwrap().assembled();
            let fock_h = build_fock(&eigenmodes(&lat.h).unwrap(), lambda).unwrap().hamiltonian;
            let scale = fock::frobenius_norm(&fock_h).unwrap();
            assert!(norm_of_difference(&split, &fock_h) <= 1e-14 * scale, "λ={lambda} N={n}");
        }
    }
}

#[test]
fn momentum_kills_the_vacuum() {
    let lat = slac(3);
    let vacuum = build_fock(&eigenmodes(&lat.h).unwrap(), 2.0).unwrap().vacuum_state().unwrap();
    let p = build_momentum_op(&lat).unwrap();
    let image = fock::apply(&p, &vacuum).unwrap();
    assert!(image.coefficient_norm() < 1e-12 * vacuum.coefficient_norm());
}

#[test]
fn wavepacket_prefers_one_sign() {
    // The sign preference is only visible once the lattice resolves a packet.
    let lat = lattice_h_1p1(32, 1.0, 1.0, Scheme::Slac).unwrap();
    let (plus, minus) = fermivar::poincare::wavepacket_sign_check(&lat);
    assert!(plus < 0.1, "{plus}");
    assert!(minus > 1.5, "{minus}");
}

/// Grassmann substitution `u → U u`, `u† → Ū u†` as a dense matrix on monomials.
fn induced_unitary(u: &CMatrix) -> CMatrix {
    let d = u.nrows();
    let generator = |g| GrassmannElement::generator(d, g);
    let images: Vec<GrassmannElement> = GeneratorIndex::all(d)
        .map(|g| {
            let x = g.mode;
            let mut image = GrassmannElement::zero(d);
            for y in 0..d {
                image = &image
                    + &if g.kind == GeneratorKind::Conjugate {
                        generator(GeneratorIndex::conjugate(y)).scale(u[(x, y)].conj())
                    } else {
                        generator(GeneratorIndex::field(y)).scale(u[(x, y)])
                    };
            }
            image
        })
        .collect();
    let dim = 1usize << (2 * d);
    let mut out = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        // Canonical order multiplies the generators by increasing bit.
        let mut product = GrassmannElement::one(d);
        for (bit, image) in images.iter().enumerate() {
            if j >> bit & 1 == 1 {
                product = &product * image;
            }
        }
        for (m, v) in product.terms() {
            out[(m as usize, j)] = v;
        }
    }
    out
}

#[test]
fn operators_are_covariant_under_single_particle_rotations() {
    let lat = slac(2);
    let mut rng = random::rng(5);
    let u = random::unitary(&mut rng, lat.dim());
    let gamma = induced_unitary(&u);
    let dim = gamma.nrows();
    assert!(linalg::max_abs_diff(&(gamma.adjoint() * &gamma), &linalg::identity(dim)) < 1e-12);
    // The substitution sends u_x to Σ U_xy u_y and ∂/∂u_x to Σ Ū_xy ∂/∂u_y, so kernels transform as k → U† k U.
    let rotate = |k: &CMatrix| u.adjoint() * k * &u;
    for lambda in [2.0, 0.7] {
        let kernels = [lat.h.clone(), lat.boost_kernel()];
        for k in &kernels {
            let original = fock::to_dense(&split_kernel(k, lambda).unwrap().assembled()).unwrap();
            let rotated = fock::to_dense(&split_kernel(&rotate(k), lambda).unwrap().assembled()).unwrap();
            let conjugated = &gamma * &original * gamma.adjoint();
            assert!(linalg::max_abs_diff(&conjugated, &rotated) < 1e-12, "λ={lambda}");
        }
        let p = fock::to_dense(&momentum_from_kernel(&lat.momentum)).unwrap();
        let p_rot = fock::to_dense(&momentum_from_kernel(&rotate(&lat.momentum))).unwrap();
        assert!(linalg::max_abs_diff(&(&gamma * &p * gamma.adjoint()), &p_rot) < 1e-12);
    }
}

#[test]
fn defects_are_unchanged_in_a_rotated_basis() {
    let lat = slac(3);
    let mut rng = random::rng(9);
    let u = random::unitary(&mut rng, lat.dim());
    let rotate = |k: &CMatrix| u.adjoint() * k * &u;
    let lambda = 2.0;
    let h = build_hamiltonian_split(&lat, lambda).unwrap().assembled();
    let p = build_momentum_op(&lat).unwrap();
    let k = build_boost_op(&lat, lambda, 0.0).unwrap();
    let h_r = split_kernel(&rotate(&lat.h), lambda).unwrap().assembled();
    let p_r = momentum_from_kernel(&rotate(&lat.momentum));
    let k_r = split_kernel(&rotate(&lat.boost_kernel()), lambda).unwrap().assembled();
    let pairs = [
        (relation_defect(&k, &p, &h.scaled(c(0.0, -1.0))), relation_defect(&k_r, &p_r, &h_r.scaled(c(0.0, -1.0)))),
        (relation_defect(&k, &h, &p.scaled(c(0.0, 1.0))), relation_defect(&k_r, &h_r, &p_r.scaled(c(0.0, 1.0)))),
        (
            relation_defect(&p, &h, &QuadOp::zero(p.n_generators)),
            relation_defect(&p_r, &h_r, &QuadOp::zero(p.n_generators)),
        ),
    ];
    for (a, b) in pairs {
        let (a, b) = (a.unwrap(), b.unwrap());
        assert!((a.0 - b.0).abs() <= 1e-10 * a.0 + 1e-15, "{a:?} vs {b:?}");
    }
}
