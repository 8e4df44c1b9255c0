//! Result tables and their CSV / JSON encodings.
//!
//! Every report has the columns
//! `param,analytic,mc_estimate,ci_low,ci_high,trials,validity`; absent
//! values are empty in CSV and `null` in JSON. Floats carry 12 significant
//! digits and lines end in `\n`.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::{Error, Result};

pub const CSV_HEADER: &str = "param,analytic,mc_estimate,ci_low,ci_high,trials,validity";

/// Whether a row's low-SNR expression is inside its regime of validity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    /// Operating threshold below the validity limit.
    Valid,
    /// Operating threshold at or above the limit.
    OutOfRegime,
    /// No asymptotic expression involved.
    NotApplicable,
}

impl Validity {
    pub fn from_gamma(gamma: f64, threshold: f64) -> Self {
        if gamma < threshold {
            Validity::Valid
        } else {
            Validity::OutOfRegime
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Validity::Valid => "valid",
            Validity::OutOfRegime => "out_of_regime",
            Validity::NotApplicable => "n/a",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "valid" => Ok(Validity::Valid),
            "out_of_regime" => Ok(Validity::OutOfRegime),
            "n/a" => Ok(Validity::NotApplicable),
            _ => Err(Error::Config(format!("unknown validity `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub param: f64,
    pub analytic: Option<f64>,
    pub mc_estimate: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub trials: Option<u64>,
    pub validity: Validity,
}

impl Row {
    pub fn analytic(param: f64, value: f64, validity: Validity) -> Self {
        Self {
            param,
            analytic: Some(value),
            mc_estimate: None,
            ci_low: None,
            ci_high: None,
            trials: None,
            validity,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}` (csv|json)"))),
        }
    }
}

/// `x` with 12 significant digits, fixed-point for moderate exponents and
/// scientific otherwise, without trailing zeros.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn rounded(x: f64) -> f64 {
    format_sig12(x).parse().expect("formatted float parses")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig12).unwrap_or_default()
}

pub fn write_csv<W: Write>(table: &Table, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            format_sig12(r.param),
            opt(r.analytic),
            opt(r.mc_estimate),
            opt(r.ci_low),
            opt(r.ci_high),
            r.trials.map(|t| t.to_string()).unwrap_or_default(),
            r.validity.as_str()
        )?;
    }
    Ok(())
}

pub fn to_json(table: &Table) -> Value {
    let num = |x: Option<f64>| x.map_or(Value::Null, |v| json!(rounded(v)));
    Value::Array(
        table
            .rows
            .iter()
            .map(|r| {
                json!({
                    "param": rounded(r.param),
                    "analytic": num(r.analytic),
                    "mc_estimate": num(r.mc_estimate),
                    "ci_low": num(r.ci_low),
                    "ci_high": num(r.ci_high),
                    "trials": r.trials,
                    "validity": r.validity.as_str(),
                })
            })
            .collect(),
    )
}

pub fn write_report<W: Write>(table: &Table, format: Format, mut w: W) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(table, w),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &to_json(table))?;
            writeln!(w)
        }
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(table: &Table, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let io = |source| Error::Io {
                path: p.to_path_buf(),
                source,
            };
            let file = std::fs::File::create(p).map_err(io)?;
            let mut w = std::io::BufWriter::new(file);
            write_report(table, format, &mut w).map_err(io)?;
            w.flush().map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            write_report(table, format, stdout.lock()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

/// Reads back a CSV report.
pub fn parse_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Config("CSV report header mismatch".into()));
    }
    let field = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("bad number `{s}`")))
        }
    };
    let mut rows = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let [param, analytic, mc, lo, hi, trials, validity] = cols[..] else {
            return Err(Error::Config(format!("expected 7 columns in `{line}`")));
        };
        rows.push(Row {
            param: field(param)?.ok_or_else(|| Error::Config("empty param".into()))?,
            analytic: field(analytic)?,
            mc_estimate: field(mc)?,
            ci_low: field(lo)?,
            ci_high: field(hi)?,
            trials: if trials.is_empty() {
                None
            } else {
                Some(
                    trials
                        .parse()
                        .map_err(|_| Error::Config(format!("bad trial count `{trials}`")))?,
                )
            },
            validity: Validity::parse(validity)?,
        });
    }
    Ok(Table { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(2.0), "2");
        assert_eq!(format_sig12(-30.0), "-30");
        assert_eq!(format_sig12(0.1 + 0.2), "0.3");
        assert_eq!(format_sig12(1.5e-7), "1.5e-7");
        assert_eq!(format_sig12(0.99999999999999), "1");
        assert_eq!(format_sig12(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_sig12(0.0), "0");
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&Table::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn one_row_round_trip() {
        let t = Table {
            rows: vec![Row {
                param: 2.5,
                analytic: Some(0.4),
                mc_estimate: Some(0.41),
                ci_low: Some(0.39),
                ci_high: Some(0.43),
                trials: Some(1000),
                validity: Validity::Valid,
            }],
        };
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(!text.contains('\r'));
        assert_eq!(parse_csv(&text).unwrap(), t);
    }

    #[test]
    fn json_mirrors_columns() {
        let t = Table {
            rows: vec![Row::analytic(3.0, 1.0 / 3.0, Validity::NotApplicable)],
        };
        let v = to_json(&t);
        assert_eq!(v[0]["param"], json!(3.0));
        assert_eq!(v[0]["analytic"], json!(0.333333333333));
        assert_eq!(v[0]["mc_estimate"], Value::Null);
        assert_eq!(v[0]["validity"], json!("n/a"));
    }

    proptest! {
        #[test]
        fn csv_round_trip_at_12_digits(
            param in -1e3f64..1e3,
            analytic in proptest::option::of(1e-300f64..1e300),
            mc in proptest::option::of(0.0f64..1.0),
            trials in proptest::option::of(any::<u64>()),
        ) {
            let row = Row {
                param,
                analytic,
                mc_estimate: mc,
                ci_low: None,
                ci_high: mc,
                trials,
                validity: Validity::OutOfRegime,
            };
            let t = Table { rows: vec![row.clone()] };
            let mut buf = Vec::new();
            write_csv(&t, &mut buf).unwrap();
            let back = parse_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
            let r = &back.rows[0];
            let close = |a: f64, b: f64| (a - b).abs() <= 5e-12 * a.abs().max(b.abs());
            prop_assert!(close(r.param, param));
            prop_assert_eq!(r.analytic.is_some(), analytic.is_some());
            if let (Some(a), Some(b)) = (r.analytic, analytic) { prop_assert!(close(a, b)); }
            if let (Some(a), Some(b)) = (r.mc_estimate, mc) { prop_assert!(close(a, b)); }
            prop_assert_eq!(r.trials, trials);
            prop_assert_eq!(r.validity, Validity::OutOfRegime);
            // formatting is idempotent at 12 digits
            let mut again = Vec::new();
            write_csv(&back, &mut again).unwrap();
            prop_assert_eq!(again, buf);
        }
    }
}
