//! Pair creation over a transverse-momentum grid and the vacuum persistence
//! exponent.

use fermivar::schwinger::{persistence_probability, schwinger_closed_form, sweep, UNITARITY_TOL};

use super::Output;
use crate::config::SchwingerParams;
use crate::record::Bound;
use crate::table::Table;

/// Header of the sweep table.
pub const SWEEP_HEADERS: [&str; 9] =
    ["p_x", "p_y", "xi", "beta_sq_numeric", "beta_sq_analytic", "rel_err", "drift", "pz_spread", "normal_defect"];

pub fn run(p: &SchwingerParams, out: &mut Output) -> fermivar::Result<()> {
    let job = p.job()?;
    let result = sweep(&job)?;
    let mut table = Table::new("schwinger", &SWEEP_HEADERS);
    for m in &result.modes {
        table.push(vec![
            m.p_x.into(),
            m.p_y.into(),
            m.xi.into(),
            m.beta_sq_numeric.into(),
            m.beta_sq_analytic.into(),
            m.rel_err.into(),
            m.drift.into(),
            m.pz_spread.into(),
            m.normal_defect.into(),
        ]);
    }
    out.table(table);
    let s = &result.summary;
    let r = &mut out.recorder;
    r.info("modes", "transverse momenta evolved successfully", s.n_modes as f64, "count");
    r.check(
        "failed_modes",
        "transverse momenta whose evolution failed",
        s.failures.len() as f64,
        "count",
        Bound::AtMost { limit: 0.0 },
    );
    if !result.modes.is_empty() {
        r.check(
            "max_rel_err",
            "largest |numeric − e^{−πξ}| / e^{−πξ} over modes with 1 ≤ ξ ≤ 6",
            s.max_rel_err,
            "relative",
            Bound::AtMost { limit: p.rel_err_tolerance },
        );
        r.check(
            "max_drift",
            "largest relative change of |β|² between the two extraction times",
            s.max_drift,
            "relative",
            Bound::AtMost { limit: p.drift_tolerance },
        );
        r.info("max_pz_spread", "largest relative spread of |β|² across p_z", s.max_pz_spread, "relative");
        let normal = result.modes.iter().map(|m| m.normal_defect).fold(0.0, f64::max);
        r.check(
            "normalization",
            "largest ||α|² + |β|² − 1|",
            normal,
            "absolute",
            Bound::AtMost { limit: UNITARITY_TOL },
        );
        r.flag("monotone_in_xi", "|β|² strictly decreases with ξ", s.monotone_in_xi);
    }

    let persistence = persistence_probability(&job)?;
    let mut terms = Table::new("persistence", &["n", "quadrature", "error_estimate", "closed_form"]);
    for t in &persistence.terms {
        terms.push(vec![t.n.into(), t.quadrature.into(), t.error_estimate.into(), t.closed_form.into()]);
    }
    out.table(terms);
    let r = &mut out.recorder;
    r.info(
        "persistence_exponent",
        "ln of the vacuum persistence probability over the volume VT",
        persistence.exponent,
        "dimensionless",
    );
    r.info("persistence_probability", "vacuum persistence probability", persistence.probability, "probability");
    r.info(
        "persistence_quadrature_error",
        "sum of per-term full- vs half-node differences",
        persistence.quadrature_error,
        "absolute",
    );
    if persistence.closed_form_exponent.is_some() {
        let closed = schwinger_closed_form(p.mass, p.e_field, p.persistence.volume_time);
        let rel = (persistence.exponent - closed).abs() / closed.abs().max(f64::MIN_POSITIVE);
        r.check(
            "persistence_vs_closed_form",
            "relative difference of the quadrature exponent and Schwinger's series",
            rel,
            "relative",
            Bound::AtMost { limit: p.persistence_tolerance },
        );
    }
    Ok(())
}
