//! Runs one verification suite and writes its report.
//!
//! Settings resolve in three layers: suite defaults, then the config
//! file, then command-line flags. The report lands in --out, or in
//! $BRAIDLAB_OUT_DIR (falling back to the working directory) under
//! `<suite>.<ext>`. Exit status is zero exactly when every check passed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use braidlab::report::{emit, EmitFormat};
use braidlab::suite::{default_file_name, run_suite, SuiteConfig, SuiteId, ALL_SUITES};

#[derive(Parser)]
#[command(
    name = "verify",
    about = "Run a named verification suite and write its report",
    after_help = suite_listing()
)]
struct Cli {
    /// Suite name, e.g. lemma14 (see the listing below)
    suite: String,

    /// Config file with `key = value` lines; flags override it
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Grid points per axis
    #[arg(long, value_name = "N")]
    n_points: Option<String>,

    /// Grid window length
    #[arg(long, value_name = "L")]
    length: Option<String>,

    /// Grid mode: torus | windowed-line
    #[arg(long, value_name = "MODE")]
    mode: Option<String>,

    /// Smoothing strengths, comma- or space-separated
    #[arg(long, value_name = "LIST")]
    smooth_n_list: Option<String>,

    /// Quadrature rule: gh | trapezoid
    #[arg(long, value_name = "RULE")]
    quad_rule: Option<String>,

    /// Quadrature nodes per axis
    #[arg(long, value_name = "M")]
    quad_nodes: Option<String>,

    /// Trapezoid window half-width in kernel standard deviations
    #[arg(long, value_name = "R")]
    quad_radius: Option<String>,

    /// Seed for all randomized probes
    #[arg(long, value_name = "SEED")]
    seed: Option<String>,

    /// Multiplies every check tolerance
    #[arg(long, value_name = "S")]
    tolerance_scale: Option<String>,

    /// Object descriptor for the first leg
    #[arg(long, value_name = "DESC")]
    object_a: Option<String>,

    /// Object descriptor for the second leg
    #[arg(long, value_name = "DESC")]
    object_b: Option<String>,

    /// Object descriptor for the third leg
    #[arg(long, value_name = "DESC")]
    object_c: Option<String>,

    /// Report path; default $BRAIDLAB_OUT_DIR/<suite>.<ext>
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format: json | csv
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
}

fn suite_listing() -> String {
    let mut s = String::from("Suites:\n");
    for id in ALL_SUITES {
        s.push_str(&format!("  {:<18} {}\n", id.name(), id.summary()));
    }
    s
}

fn build_config(cli: &Cli) -> braidlab::Result<SuiteConfig> {
    let suite = SuiteId::parse(&cli.suite)?;
    let mut cfg = SuiteConfig::new(suite);
    if let Some(path) = &cli.config {
        cfg.load_file(path)?;
    }
    let flags: [(&str, &Option<String>); 12] = [
        ("n-points", &cli.n_points),
        ("length", &cli.length),
        ("mode", &cli.mode),
        ("smooth-n-list", &cli.smooth_n_list),
        ("quad-rule", &cli.quad_rule),
        ("quad-nodes", &cli.quad_nodes),
        ("quad-radius", &cli.quad_radius),
        ("seed", &cli.seed),
        ("tolerance-scale", &cli.tolerance_scale),
        ("object-a", &cli.object_a),
        ("object-b", &cli.object_b),
        ("object-c", &cli.object_c),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.apply_kv(key, v)?;
        }
    }
    if let Some(fmt) = &cli.format {
        cfg.format = EmitFormat::parse(fmt)?;
    }
    cfg.out = cli.out.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn out_path(cfg: &SuiteConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| {
        let dir = std::env::var_os("BRAIDLAB_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."));
        dir.join(default_file_name(cfg.suite, cfg.format))
    })
}

fn run(cli: &Cli) -> braidlab::Result<bool> {
    let cfg = build_config(cli)?;
    let report = run_suite(&cfg)?;
    for r in report.records() {
        let status = if r.pass { "pass" } else { "FAIL" };
        println!(
            "[{status}] {:<24} {:<32} residual={:.3e} tol={:.1e} ({:.0} ms) {}",
            r.anchor, r.check, r.residual, r.tolerance, r.runtime_ms, r.params
        );
    }
    let path = out_path(&cfg);
    emit(&report, cfg.format, &path)?;
    let failed = report.records().iter().filter(|r| !r.pass).count();
    if failed == 0 {
        println!(
            "suite {}: {} checks passed; report written to {}",
            report.suite(),
            report.records().len(),
            path.display()
        );
    } else {
        println!(
            "suite {}: {} of {} checks FAILED; report written to {}",
            report.suite(),
            failed,
            report.records().len(),
            path.display()
        );
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
