//! Second moments of the fluctuation functional, their small-step slope, the
//! vanishing of unpaired moments, and the Tsallis-to-Kullback-Leibler ratio.

use fermivar::gaussian::{fluctuation_expectation, tsallis_ratio};
use fermivar::grassmann::{expectation, gaussian_element, GeneratorIndex, GrassmannElement};
use fermivar::linalg::{self, c, CMatrix};
use fermivar::random;

use super::{Output, Worst};
use crate::config::FluctuationParams;
use crate::record::Bound;
use crate::table::Table;

/// Berezin value of `⟨ω ω†⟩` at one step; the closed form is used only for comparison.
fn oracle(h: &CMatrix, dt: f64) -> fermivar::Result<(CMatrix, f64)> {
    let r = fluctuation_expectation(h, dt)?;
    let defect = r.defect().unwrap_or(f64::NAN);
    let value = r.oracle.unwrap_or_else(|| CMatrix::from_element(h.nrows(), h.ncols(), c(f64::NAN, 0.0)));
    Ok((value, defect))
}

/// Extrapolates `g(Δt) = ⟨ωω†⟩/Δt`, even in `Δt`, from a halving sequence. Returns
/// the raw and extrapolated estimates at every level.
fn richardson(h: &CMatrix, dt0: f64, levels: usize) -> fermivar::Result<Vec<(f64, CMatrix, CMatrix)>> {
    let mut rows: Vec<Vec<CMatrix>> = Vec::with_capacity(levels);
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let dt = dt0 / f64::powi(2.0, k as i32);
        let raw = oracle(h, dt)?.0 * c(1.0 / dt, 0.0);
        let mut row = vec![raw.clone()];
        for j in 1..=k {
            let f = f64::powi(4.0, j as i32);
            let next = (&row[j - 1] * c(f, 0.0) - &rows[k - 1][j - 1]) * c(1.0 / (f - 1.0), 0.0);
            row.push(next);
        }
        out.push((dt, raw, row[k].clone()));
        rows.push(row);
    }
    Ok(out)
}

pub fn run(p: &FluctuationParams, seed: u64, out: &mut Output) -> fermivar::Result<()> {
    let mut rng = random::rng(seed);
    let hs: Vec<CMatrix> = p.modes.iter().map(|&d| random::hermitian(&mut rng, d)).collect();

    let mut moments = Table::new("fluctuation", &["modes", "dt", "defect"]);
    let mut worst = Worst::default();
    for (&d, h) in p.modes.iter().zip(&hs) {
        for &dt in &p.dt {
            let (_, defect) = oracle(h, dt)?;
            worst.add(defect);
            moments.push(vec![d.into(), dt.into(), defect.into()]);
        }
    }
    out.recorder.check(
        "second_moment",
        "largest |⟨ωω†⟩ − (−hΔt((hΔt)²+1)⁻¹)| from Berezin integration",
        worst.max,
        "absolute",
        Bound::AtMost { limit: p.moment_tolerance },
    );
    out.table(moments);

    let mut slope_table = Table::new("richardson", &["modes", "dt", "raw_error", "extrapolated_error"]);
    let mut slope = Worst::default();
    for (&d, h) in p.modes.iter().zip(&hs) {
        let target = -h;
        let levels = richardson(h, p.richardson_dt, p.richardson_levels)?;
        for (dt, raw, extrapolated) in &levels {
            let raw_err = linalg::max_abs_diff(raw, &target);
            let ext_err = linalg::max_abs_diff(extrapolated, &target);
            slope_table.push(vec![d.into(), (*dt).into(), raw_err.into(), ext_err.into()]);
        }
        let (_, _, best) = levels.last().expect("at least two levels");
        slope.add(linalg::max_abs_diff(best, &target));
    }
    out.recorder.check(
        "small_step_slope",
        "Richardson-extrapolated ⟨ωω†⟩/Δt at Δt → 0 against −h",
        slope.max,
        "absolute",
        Bound::AtMost { limit: p.slope_tolerance },
    );
    out.table(slope_table);

    let mut unpaired = Worst::default();
    for (&d, h) in p.modes.iter().zip(&hs) {
        let psi = gaussian_element(&(h * c(p.dt[0], 0.0)))?;
        let mut probes: Vec<Vec<GeneratorIndex>> = Vec::new();
        for j in 0..d {
            probes.push(vec![GeneratorIndex::field(j)]);
            probes.push(vec![GeneratorIndex::conjugate(j)]);
            for k in j + 1..d {
                probes.push(vec![GeneratorIndex::field(j), GeneratorIndex::field(k)]);
                probes.push(vec![GeneratorIndex::conjugate(j), GeneratorIndex::conjugate(k)]);
            }
        }
        for g in probes {
            unpaired.add(expectation(&psi, &GrassmannElement::product_of(d, c(1.0, 0.0), &g))?.norm());
        }
    }
    out.recorder.check(
        "unpaired_moments",
        "largest |⟨ω⟩|, |⟨ω†⟩|, |⟨ωω⟩|, |⟨ω†ω†⟩|",
        unpaired.max,
        "absolute",
        Bound::AtMost { limit: 0.0 },
    );

    let mut tsallis = Table::new("tsallis", &["alpha", "case", "ratio", "error"]);
    for &alpha in &p.tsallis_alpha {
        let mut worst = Worst::default();
        for case in 0..p.tsallis_cases {
            let rho = random::even_element(&mut rng, p.tsallis_modes);
            let h = random::hermitian(&mut rng, p.tsallis_modes);
            let r = tsallis_ratio(&rho, alpha, &h, p.tsallis_dt)?;
            let error = (r.ratio - alpha).abs();
            worst.add(error);
            tsallis.push(vec![alpha.into(), case.into(), r.ratio.into(), error.into()]);
        }
        out.recorder.check(
            &format!("tsallis_ratio[alpha={alpha}]"),
            "largest |Tsallis / Kullback-Leibler − α| over random densities",
            worst.max,
            "absolute",
            Bound::AtMost { limit: p.tsallis_tolerance },
        );
    }
    out.table(tsallis);
    Ok(())
}
