//! Check records and report emission.
//!
//! Every residual a suite measures lands in one [`CheckRecord`] carrying a
//! check-family `anchor` from the closed [`ANCHORS`] vocabulary, the
//! parameters that produced it, the residual, and the tolerance it was held
//! to. A [`Report`] is the full output of one suite run: config echo,
//! environment stamp, records, and an overall pass flag.
//!
//! Determinism contract: identical config and seed reproduce every residual
//! bit-for-bit. The JSON emitted for two such runs is byte-identical except
//! for the trailing `timing` object, which isolates the timestamp and the
//! measured runtimes; [`Report::stable_json`] is the document without that
//! object and [`Report::content_digest`] hashes it.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

/// Closed vocabulary of check-family anchors. A record whose anchor is not
/// listed here is refused, so every residual stays attributable to one of
/// the identities the lab verifies.
pub const ANCHORS: &[&str] = &[
    "lattice-arithmetic",
    "fourier-unitary",
    "fourier-fixed-point",
    "hermite-basis",
    "translation-group",
    "weyl-commutation",
    "function-embedding",
    "kernel-normalization",
    "partial-fourier-identity",
    "exchange-functions",
    "exchange-elements",
    "product-form",
    "injectivity-floor",
    "shear-weyl",
    "shear-intertwine",
    "nested-associativity",
    "convolution-algebra",
    "regular-representation",
    "transform-bridge",
    "crossed-isomorphism",
    "gauge-slice",
    "density-bridge",
    "degeneration",
    "convergence",
];

pub fn is_anchor(name: &str) -> bool {
    ANCHORS.contains(&name)
}

/// One measured residual. `pass` is derived, never set by hand:
/// pass if and only if residual <= tolerance (NaN fails).
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub anchor: String,
    pub check: String,
    pub params: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl CheckRecord {
    pub fn new(
        anchor: &str,
        check: impl Into<String>,
        params: impl Into<String>,
        residual: f64,
        tolerance: f64,
        runtime_ms: f64,
    ) -> Result<Self> {
        if !is_anchor(anchor) {
            return Err(Error::invalid(format!(
                "unknown check anchor '{anchor}'; the vocabulary is {}",
                ANCHORS.join(", ")
            )));
        }
        if !(tolerance > 0.0) {
            return Err(Error::invalid(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        let check = check.into();
        let params = params.into();
        for (field, value) in [("check", &check), ("params", &params)] {
            if value.contains(',') || value.contains('\n') {
                return Err(Error::invalid(format!(
                    "{field} string {value:?} may not contain commas or newlines (CSV rows)"
                )));
            }
        }
        let pass = residual <= tolerance;
        Ok(CheckRecord {
            anchor: anchor.to_string(),
            check,
            params,
            residual,
            tolerance,
            pass,
            runtime_ms,
        })
    }

    /// FNV-1a hash of the parameter string, printed as 16 hex digits.
    /// Stable across platforms, unlike the std hasher.
    pub fn param_hash(&self) -> String {
        format!("{:016x}", fnv1a(self.params.as_bytes()))
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Output of one suite run.
#[derive(Debug, Clone)]
pub struct Report {
    suite: String,
    config: BTreeMap<String, String>,
    environment: BTreeMap<String, String>,
    records: Vec<CheckRecord>,
    timestamp_utc: String,
}

#[derive(Serialize)]
struct StableDoc<'a> {
    suite: &'a str,
    config: &'a BTreeMap<String, String>,
    environment: &'a BTreeMap<String, String>,
    passed: bool,
    records: &'a [CheckRecord],
}

#[derive(Serialize)]
struct TimingDoc<'a> {
    timestamp_utc: &'a str,
    total_ms: f64,
    /// Index-aligned with `records`.
    record_ms: Vec<f64>,
}

#[derive(Serialize)]
struct FullDoc<'a> {
    #[serde(flatten)]
    stable: StableDoc<'a>,
    timing: TimingDoc<'a>,
}

impl Report {
    pub fn new(suite: impl Into<String>, config: BTreeMap<String, String>) -> Self {
        Report {
            suite: suite.into(),
            config,
            environment: environment_stamp(),
            records: Vec::new(),
            timestamp_utc: now_utc(),
        }
    }

    pub fn suite(&self) -> &str {
        &self.suite
    }

    pub fn config(&self) -> &BTreeMap<String, String> {
        &self.config
    }

    pub fn records(&self) -> &[CheckRecord] {
        &self.records
    }

    /// The only way records enter a report; keeps the pass flag derived.
    pub fn record(
        &mut self,
        anchor: &str,
        check: impl Into<String>,
        params: impl Into<String>,
        residual: f64,
        tolerance: f64,
        runtime_ms: f64,
    ) -> Result<()> {
        self.records.push(CheckRecord::new(
            anchor, check, params, residual, tolerance, runtime_ms,
        )?);
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    /// Record with the largest residual/tolerance ratio.
    pub fn worst(&self) -> Option<&CheckRecord> {
        self.records.iter().max_by(|a, b| {
            (a.residual / a.tolerance)
                .partial_cmp(&(b.residual / b.tolerance))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    /// The deterministic part of the JSON document: everything except the
    /// timing object. Two runs with identical config and seed emit
    /// identical bytes here.
    pub fn stable_json(&self) -> String {
        let doc = StableDoc {
            suite: &self.suite,
            config: &self.config,
            environment: &self.environment,
            passed: self.passed(),
            records: &self.records,
        };
        serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
    }

    pub fn to_json(&self) -> String {
        let doc = FullDoc {
            stable: StableDoc {
                suite: &self.suite,
                config: &self.config,
                environment: &self.environment,
                passed: self.passed(),
                records: &self.records,
            },
            timing: TimingDoc {
                timestamp_utc: &self.timestamp_utc,
                total_ms: self.records.iter().map(|r| r.runtime_ms).sum(),
                record_ms: self.records.iter().map(|r| r.runtime_ms).collect(),
            },
        };
        serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
    }

    /// Flat rows for convergence plotting, one per record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,param_hash,residual,tolerance,pass\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{}\n",
                self.suite,
                r.check,
                r.param_hash(),
                r.residual,
                r.tolerance,
                r.pass
            ));
        }
        out
    }

    /// FNV-1a digest of the stable document; equal digests mean the runs
    /// agreed on every residual bit-for-bit.
    pub fn content_digest(&self) -> String {
        format!("{:016x}", fnv1a(self.stable_json().as_bytes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Json,
    Csv,
}

impl EmitFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(EmitFormat::Json),
            "csv" => Ok(EmitFormat::Csv),
            other => Err(Error::parse(format!(
                "unknown report format '{other}' (expected json | csv)"
            ))),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            EmitFormat::Json => "json",
            EmitFormat::Csv => "csv",
        }
    }
}

impl std::fmt::Display for EmitFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.extension())
    }
}

/// Writes the report to `path` in the given format.
pub fn emit(report: &Report, format: EmitFormat, path: &Path) -> Result<()> {
    let body = match format {
        EmitFormat::Json => report.to_json(),
        EmitFormat::Csv => report.to_csv(),
    };
    let mut file = std::fs::File::create(path)?;
    file.write_all(body.as_bytes())?;
    Ok(())
}

fn environment_stamp() -> BTreeMap<String, String> {
    let mut env = BTreeMap::new();
    env.insert("package".into(), env!("CARGO_PKG_NAME").to_string());
    env.insert("version".into(), env!("CARGO_PKG_VERSION").to_string());
    env.insert("os".into(), std::env::consts::OS.to_string());
    env.insert("arch".into(), std::env::consts::ARCH.to_string());
    env.insert(
        "debug_assertions".into(),
        cfg!(debug_assertions).to_string(),
    );
    env
}

fn now_utc() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| "unknown".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        let mut cfg = BTreeMap::new();
        cfg.insert("n_points".to_string(), "64".to_string());
        cfg.insert("seed".to_string(), "7".to_string());
        let mut rep = Report::new("grid-sanity", cfg);
        rep.record(
            "fourier-unitary",
            "F*F = I",
            "n=64 length=20",
            3.2e-14,
            1e-10,
            1.5,
        )
        .unwrap();
        rep.record(
            "hermite-basis",
            "<h5|h3> = 0",
            "n=64 length=20 k=5",
            2.0e-9,
            1e-8,
            0.4,
        )
        .unwrap();
        rep
    }

    #[test]
    fn pass_flag_is_derived_from_the_tolerance() {
        let rec = CheckRecord::new("convergence", "ratio", "h=0.5", 0.5, 0.25, 1.0).unwrap();
        assert!(!rec.pass);
        let rec = CheckRecord::new("convergence", "ratio", "h=0.5", 0.25, 0.25, 1.0).unwrap();
        assert!(rec.pass);
        let rec = CheckRecord::new("convergence", "ratio", "h=0.5", f64::NAN, 0.25, 1.0).unwrap();
        assert!(!rec.pass);
    }

    #[test]
    fn unknown_anchors_and_bad_tolerances_are_refused() {
        assert!(CheckRecord::new("made-up", "c", "p", 0.0, 1.0, 0.0).is_err());
        assert!(CheckRecord::new("convergence", "c", "p", 0.0, 0.0, 0.0).is_err());
        assert!(CheckRecord::new("convergence", "a,b", "p", 0.0, 1.0, 0.0).is_err());
        assert!(ANCHORS.iter().all(|a| is_anchor(a)));
    }

    #[test]
    fn csv_rows_are_flat_and_one_per_record() {
        let rep = sample_report();
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "suite,check,param_hash,residual,tolerance,pass");
        for row in &lines[1..] {
            assert_eq!(row.split(',').count(), 6);
            assert!(row.starts_with("grid-sanity,"));
        }
        // Same params hash to the same 16 hex digits on every platform.
        assert_eq!(
            rep.records()[0].param_hash(),
            format!("{:016x}", fnv1a(b"n=64 length=20"))
        );
    }

    #[test]
    fn json_is_stable_modulo_the_timing_block() {
        let a = sample_report();
        let b = sample_report();
        assert_eq!(a.stable_json(), b.stable_json());
        assert_eq!(a.content_digest(), b.content_digest());
        let parsed: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(parsed["suite"], "grid-sanity");
        assert_eq!(parsed["records"].as_array().unwrap().len(), 2);
        assert!(parsed["timing"]["timestamp_utc"].is_string());
        assert_eq!(parsed["timing"]["record_ms"].as_array().unwrap().len(), 2);
        // Stable document carries no runtimes.
        let stable: serde_json::Value = serde_json::from_str(&a.stable_json()).unwrap();
        assert!(stable.get("timing").is_none());
        assert!(stable["records"][0].get("runtime_ms").is_none());
    }

    #[test]
    fn empty_report_is_valid_json_with_zero_records() {
        let rep = Report::new("weyl", BTreeMap::new());
        let parsed: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(parsed["records"].as_array().unwrap().len(), 0);
        assert_eq!(parsed["passed"], true);
        assert_eq!(rep.to_csv().lines().count(), 1);
    }

    #[test]
    fn emit_writes_the_chosen_format() {
        let dir = std::env::temp_dir().join("braidlab-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let rep = sample_report();
        let json_path = dir.join("out.json");
        emit(&rep, EmitFormat::Json, &json_path).unwrap();
        let body = std::fs::read_to_string(&json_path).unwrap();
        assert!(serde_json::from_str::<serde_json::Value>(&body).is_ok());
        let csv_path = dir.join("out.csv");
        emit(&rep, EmitFormat::Csv, &csv_path).unwrap();
        assert!(std::fs::read_to_string(&csv_path)
            .unwrap()
            .starts_with("suite,"));
        assert!(emit(&rep, EmitFormat::Json, Path::new("/nonexistent-dir/x.json")).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn worst_record_ranks_by_tolerance_ratio() {
        let rep = sample_report();
        // 2e-9 / 1e-8 = 0.2 beats 3.2e-14 / 1e-10.
        assert_eq!(rep.worst().unwrap().check, "<h5|h3> = 0");
    }
}
