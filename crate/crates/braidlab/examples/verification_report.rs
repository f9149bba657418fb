//! Drives a verification suite through the library API and prints the
//! resulting report, the same path the `verify` binary takes.

use braidlab::report::{emit, EmitFormat};
use braidlab::suite::{run_suite, SuiteConfig, SuiteId, ALL_SUITES};

fn main() -> braidlab::Result<()> {
    println!("available suites:");
    for id in ALL_SUITES {
        println!("  {:<18} {}", id.name(), id.summary());
    }
    println!();

    let mut cfg = SuiteConfig::new(SuiteId::GridSanity);
    cfg.n_points = Some(64);
    cfg.seed = 11;
    let report = run_suite(&cfg)?;

    for r in report.records() {
        println!(
            "[{}] {:<22} {:<28} residual={:.3e} tol={:.1e}",
            if r.pass { "pass" } else { "FAIL" },
            r.anchor,
            r.check,
            r.residual,
            r.tolerance
        );
    }
    println!(
        "{}: {} records, all passed = {}",
        report.suite(),
        report.records().len(),
        report.passed()
    );

    // identical configurations serialize identically, runtimes aside
    let digest = report.content_digest();
    let again = run_suite(&cfg)?.content_digest();
    println!("stable digest: {digest} (rerun matches: {})", digest == again);

    let out = std::env::temp_dir().join("grid-sanity.json");
    emit(&report, EmitFormat::Json, &out)?;
    println!("report written to {}", out.display());
    Ok(())
}
