//! Report rows and CSV output.

use std::fmt;
use std::io::Write;
use std::path::Path;

use anisohit::{Error, Result};

/// How an observed value is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// |observed − reference| ≤ tolerance.
    Within { reference: f64, tolerance: f64 },
    /// |observed / reference − 1| ≤ tolerance.
    Relative { reference: f64, tolerance: f64 },
    /// observed ≤ bound.
    AtMost(f64),
    /// observed ≥ bound.
    AtLeast(f64),
    /// bound ≤ observed ≤ upper.
    Between(f64, f64),
    /// Boolean verdict stored as 1/0; passes when it equals the expectation.
    Verdict(bool),
    /// Recorded for the plot data only.
    Info,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub params: String,
    pub observed: f64,
    pub check: Check,
}

impl ReportRow {
    pub fn new(
        experiment: impl Into<String>,
        params: impl Into<String>,
        observed: f64,
        check: Check,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            params: params.into(),
            observed,
            check,
        }
    }

    pub fn verdict(
        experiment: impl Into<String>,
        params: impl Into<String>,
        observed: bool,
        expected: bool,
    ) -> Self {
        Self::new(
            experiment,
            params,
            if observed { 1.0 } else { 0.0 },
            Check::Verdict(expected),
        )
    }

    pub fn pass(&self) -> bool {
        let x = self.observed;
        match self.check {
            Check::Within {
                reference,
                tolerance,
            } => (x - reference).abs() <= tolerance,
            Check::Relative {
                reference,
                tolerance,
            } => (x / reference - 1.0).abs() <= tolerance,
            Check::AtMost(b) => x <= b,
            Check::AtLeast(b) => x >= b,
            Check::Between(lo, hi) => lo <= x && x <= hi,
            Check::Verdict(expected) => (x == 1.0) == expected,
            Check::Info => true,
        }
    }

    /// (reference, tolerance) columns.
    fn reference_columns(&self) -> (String, String) {
        match self.check {
            Check::Within {
                reference,
                tolerance,
            } => (sig12(reference), sig12(tolerance)),
            Check::Relative {
                reference,
                tolerance,
            } => (sig12(reference), format!("rel {}", sig12(tolerance))),
            Check::AtMost(b) => (sig12(b), "upper bound".into()),
            Check::AtLeast(b) => (sig12(b), "lower bound".into()),
            Check::Between(lo, hi) => (format!("[{} {}]", sig12(lo), sig12(hi)), "interval".into()),
            Check::Verdict(e) => (if e { "1" } else { "0" }.into(), "exact".into()),
            Check::Info => (String::new(), String::new()),
        }
    }
}

impl fmt::Display for ReportRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.check == Check::Info {
            return write!(
                f,
                "INFO {:<30} {:<48} observed {}",
                self.experiment,
                self.params,
                sig12(self.observed)
            );
        }
        let (reference, tolerance) = self.reference_columns();
        write!(
            f,
            "{} {:<30} {:<48} observed {:<20} reference {} ({})",
            if self.pass() { "PASS" } else { "FAIL" },
            self.experiment,
            self.params,
            sig12(self.observed),
            reference,
            tolerance
        )
    }
}

/// Decimal rendering with 12 significant digits, trailing zeros removed
/// (`%.12g` style).
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

/// Writes the rows to `path` via a temporary file in the same directory, so a
/// failed run never leaves a partial report.
pub fn emit_csv(rows: &[ReportRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("no report rows to write".into()));
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = csv::Writer::from_writer(tmp.as_file_mut());
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record([
            "experiment",
            "params",
            "observed",
            "reference",
            "tolerance",
            "pass",
        ])
        .map_err(io)?;
        for row in rows {
            let (reference, tolerance) = row.reference_columns();
            let observed = sig12(row.observed);
            let pass = if row.pass() { "true" } else { "false" };
            w.write_record([
                row.experiment.as_str(),
                &row.params,
                &observed,
                &reference,
                &tolerance,
                pass,
            ])
            .map_err(io)?;
        }
        w.flush()?;
    }
    tmp.as_file_mut().flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0), "2");
        assert_eq!(sig12(-1234.5), "-1234.5");
        assert_eq!(sig12(1e-7), "1e-7");
        assert_eq!(sig12(2.0 / 3.0 * 1e15), "6.66666666667e14");
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(4.1649712426e-5), "4.1649712426e-5");
        assert_eq!(sig12(2.5e-4), "0.00025");
    }

    #[test]
    fn checks() {
        assert!(ReportRow::new(
            "a",
            "",
            1.05,
            Check::Within {
                reference: 1.0,
                tolerance: 0.1
            }
        )
        .pass());
        assert!(!ReportRow::new(
            "a",
            "",
            1.2,
            Check::Relative {
                reference: 1.0,
                tolerance: 0.1
            }
        )
        .pass());
        assert!(ReportRow::new("a", "", 3.0, Check::AtMost(50.0)).pass());
        assert!(!ReportRow::verdict("a", "", false, true).pass());
        assert!(!ReportRow::new("a", "", f64::NAN, Check::AtMost(1.0)).pass());
    }

    #[test]
    fn csv_round_trip_and_empty_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![ReportRow::new(
            "variance-ratio",
            "H=0.75, c=2",
            1.0 / 3.0,
            Check::AtMost(1.0),
        )];
        emit_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,params,observed,reference,tolerance,pass"
        );
        assert_eq!(
            lines.next().unwrap(),
            "variance-ratio,\"H=0.75, c=2\",0.333333333333,1,upper bound,true"
        );
        assert!(lines.next().is_none());
        assert!(emit_csv(&[], &path).is_err());
        assert!(emit_csv(&rows, &dir.path().join("missing/r.csv")).is_err());
    }
}
