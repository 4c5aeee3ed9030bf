//! CSV projections of the JSON documents. Floats carry 17 significant digits.

use std::fmt::Write;

use nlk_core::VerificationReport;

use crate::BubbleTable;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per check: `n,k,check,value,threshold,pass`; dimension-level checks
/// leave `k` empty.
pub fn verify_csv(reports: &[VerificationReport]) -> String {
    let mut s = String::from("n,k,check,value,threshold,pass\n");
    for r in reports {
        for c in &r.checks {
            let _ = writeln!(s, "{},,{},{},{},{}", r.dimension, c.name, num(c.value), num(c.threshold), c.pass);
        }
        for m in &r.modes {
            for c in &m.checks {
                let _ = writeln!(s, "{},{},{},{},{},{}", r.dimension, m.k, c.name, num(c.value), num(c.threshold), c.pass);
            }
        }
    }
    s
}

pub fn bubble_csv(tables: &[BubbleTable]) -> String {
    let mut s = String::from("n,r,u,du,exp_u,z0,psi0,psi1,mass,mass_target\n");
    for t in tables {
        for row in &t.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                t.dimension,
                num(row.r),
                num(row.u),
                num(row.du),
                num(row.exp_u),
                num(row.z0),
                num(row.psi0),
                num(row.psi1),
                num(t.mass),
                num(t.mass_target)
            );
        }
    }
    s
}
