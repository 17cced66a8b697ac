//! Plain-text rendering: one stable line per check result, indented
//! counterexample details, and cube diagnostics that point at the exact
//! cross-section line a centrality-style property lost.

use crate::checks::CheckLine;
use crate::cube::{lines, Cube};
use crate::partition::Partition;

/// `PASS <id> <context>` / `FAIL <id> <context>` per check, with failure
/// details indented underneath their line.
pub fn render_check_lines(checks: &[CheckLine]) -> String {
    let mut out = String::new();
    for c in checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict} {} {}\n", c.id, c.context));
        if let Some(detail) = &c.detail {
            for line in detail.lines() {
                out.push_str("    ");
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}

pub fn render_summary(checks: &[CheckLine]) -> String {
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        format!("{} checks passed", checks.len())
    } else {
        format!("{failed} of {} checks FAILED", checks.len())
    }
}

/// Every cross-section line of the cube in one direction, keyed by reduced
/// vertex index, with the pivot named and the pairs outside the partition
/// marked.
pub fn line_profile(c: &Cube, dir: usize, delta: &Partition) -> String {
    let ls = lines(c, dir);
    let pivot = ls.len() - 1;
    let parts: Vec<String> = ls
        .iter()
        .enumerate()
        .map(|(f, lp)| {
            let role = if f == pivot { " pivot" } else { "" };
            let mark = if lp.in_partition(delta) { "" } else { " VIOLATES" };
            format!("[{f}]{role} ({},{}){mark}", lp.lo, lp.hi)
        })
        .collect();
    format!("direction {dir}: {}", parts.join("  "))
}
