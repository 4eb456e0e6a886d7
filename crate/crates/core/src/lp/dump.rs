use std::fmt::Write;

use super::simplex::{LinearProgram, Relation};

/// Render a program in CPLEX LP text format (objective, rows, bounds).
pub fn to_lp_format(lp: &LinearProgram) -> String {
    let mut out = String::new();
    let name = |j: usize| lp.var_names.get(j).cloned().unwrap_or_else(|| format!("v{j}"));
    let terms = |coeffs: &mut dyn Iterator<Item = (usize, f64)>| -> String {
        let mut s = String::new();
        for (j, a) in coeffs {
            if a == 0.0 {
                continue;
            }
            let sign = if a < 0.0 { '-' } else { '+' };
            let _ = write!(s, " {sign} {} {}", fmt_num(a.abs()), name(j));
        }
        if s.is_empty() {
            s.push_str(" 0");
        }
        s
    };
    out.push_str("\\ augmentation LP, flow form\nMinimize\n obj:");
    out.push_str(&terms(&mut lp.objective.iter().copied().enumerate()));
    out.push_str("\nSubject To\n");
    for (i, row) in lp.rows.iter().enumerate() {
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(
            out,
            " r{i}:{} {rel} {}",
            terms(&mut row.coeffs.iter().copied()),
            fmt_num(row.rhs)
        );
    }
    out.push_str("Bounds\n");
    for j in 0..lp.num_vars {
        let _ = writeln!(out, " {} >= 0", name(j));
    }
    out.push_str("End\n");
    out
}

fn fmt_num(v: f64) -> String {
    format!("{}", crate::harness::round_sig(v))
}
