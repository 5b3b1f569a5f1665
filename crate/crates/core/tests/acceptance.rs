//! Runs every validation criterion at its default tolerance and prints one
//! verdict line per criterion. Exits nonzero if any criterion fails or
//! overruns its time budget.

use chiral_scatter::validation::{run_validation, Tolerances};

fn main() {
    let report = run_validation(None, &Tolerances::default());
    let mut ok = true;
    for c in &report.criteria {
        let in_budget = c.elapsed_s <= c.runtime_budget_s;
        let verdict = if c.passed && in_budget { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {:<18} {verdict}  ({:.1} s, budget {})",
            c.id,
            c.name,
            c.elapsed_s,
            if c.runtime_budget_s.is_finite() { format!("{:.0} s", c.runtime_budget_s) } else { "none".into() },
        );
        if !c.passed || !in_budget {
            ok = false;
            for check in c.checks.iter().filter(|k| !k.passed) {
                let note = check.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
                println!("    {}: measured {:.6e}, bound {}{note}", check.name, check.measured, check.bound);
            }
        }
    }
    if !ok {
        std::process::exit(1);
    }
}
