use std::io::Write;

use tricount::selftest::{run_all, SelftestOptions};

#[test]
fn acceptance() {
    let outcomes = run_all(&SelftestOptions::default());
    // written to the raw handle so the lines survive test-output capture
    let mut out = std::io::stdout().lock();
    for o in &outcomes {
        writeln!(
            out,
            "criterion {:>2} {} {} ({:.2?}{}) {}",
            o.id,
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.elapsed,
            o.limit
                .map(|l| format!(" / limit {l:.0?}"))
                .unwrap_or_default(),
            o.detail
        )
        .unwrap();
    }
    drop(out);
    let failed: Vec<u8> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

#[test]
fn flipped_zeta_breaks_dual_path() {
    let opts = SelftestOptions {
        flip_zeta2: true,
        ..Default::default()
    };
    let o = tricount::selftest::run_criterion(5, &opts).unwrap();
    assert!(!o.passed, "mutation survived: {}", o.detail);
}
