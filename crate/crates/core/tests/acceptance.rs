//! Runs every acceptance check at its stated time limit and prints one
//! line per check.

use std::io::Write;

use tgl_core::verify::{run_check, CHECK_COUNT};

#[test]
fn acceptance_suite() {
    // write to the real stdout so the lines show without --nocapture
    let mut out = std::io::stdout();
    let mut failures = Vec::new();
    for id in 1..=CHECK_COUNT {
        let r = run_check(id).expect("known check");
        let ok = r.passed && r.within_time();
        writeln!(
            out,
            "[{}] {:>2} {} ({} ms, limit {} ms): {}",
            if ok { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.elapsed_ms,
            r.time_limit_ms,
            r.detail
        )
        .expect("stdout");
        if !ok {
            failures.push(r.id);
        }
    }
    assert!(failures.is_empty(), "failed checks: {failures:?}");
}
