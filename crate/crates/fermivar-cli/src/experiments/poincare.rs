//! Lattice Poincaré relations and the site-count trend of the boost defects.

use fermivar::dirac::lattice_h_1p1;
use fermivar::poincare::{commutator_report, Verdict};

use super::Output;
use crate::config::PoincareParams;
use crate::record::Bound;
use crate::table::{Cell, Table};

/// Header of the relation table.
pub const HEADERS: [&str; 8] = ["relation", "sites", "defect", "tolerance", "verdict", "id", "absolute", "note"];

/// Row ids of the two boost relations whose defects must shrink with the lattice.
pub const BOOST_ROWS: [(&str, &str); 2] = [("g", "boost_momentum_monotone"), ("f", "boost_hamiltonian_monotone")];

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::NotRealized => "NOT-REALIZED",
        Verdict::Info => "INFO",
    }
}

pub fn run(p: &PoincareParams, out: &mut Output) -> fermivar::Result<()> {
    let mut table = Table::new("poincare", &HEADERS);
    let mut trends: Vec<Vec<f64>> = vec![Vec::new(); BOOST_ROWS.len()];
    let mut not_realized = 0usize;
    for &n in &p.sites {
        let lattice = lattice_h_1p1(n, p.mass, p.spacing, p.scheme)?;
        let report = commutator_report(&lattice, p.lambda)?;
        for row in &report.rows {
            table.push(vec![
                row.relation.as_str().into(),
                n.into(),
                row.defect.into(),
                row.tolerance.into(),
                verdict_name(row.verdict).into(),
                row.id.as_str().into(),
                row.absolute.into(),
                row.note.clone().map_or(Cell::Empty, Cell::Text),
            ]);
            let name = format!("{}[sites={n}]", row.id);
            let defect = row.defect.unwrap_or(f64::NAN);
            match (row.verdict, row.tolerance) {
                (Verdict::NotRealized, _) => not_realized += 1,
                (Verdict::Pass | Verdict::Fail, Some(limit)) => {
                    out.recorder.check(&name, &row.relation, defect, "normalized", Bound::AtMost { limit })
                }
                _ => out.recorder.info(&name, &row.relation, defect, "normalized"),
            }
        }
        for (k, (id, _)) in BOOST_ROWS.iter().enumerate() {
            trends[k].push(report.row(id).and_then(|r| r.defect).unwrap_or(f64::NAN));
        }
    }
    out.recorder.info(
        "not_realized",
        "relations outside the realized subset (angular momentum)",
        not_realized as f64,
        "count",
    );
    if p.sites.len() >= 2 {
        for (k, (id, name)) in BOOST_ROWS.iter().enumerate() {
            let decreasing = trends[k].windows(2).all(|w| w[1] < w[0]);
            out.recorder.flag(
                name,
                &format!("defect of relation {id} strictly decreases with the site count"),
                decreasing,
            );
        }
    }
    out.table(table);
    Ok(())
}
