//! CSV and JSON rendering of reports.

use std::io::Write;
use std::str::FromStr;

use nltrace::verify::PropertyOutcome;
use nltrace::ExperimentReport;
use serde_json::{Map, Number, Value};

pub const REPORT_COLUMNS: [&str; 8] = [
    "n",
    "k",
    "weight",
    "value",
    "upper_bound",
    "lower_bound",
    "finite_n_bound",
    "verdict",
];

pub const VERIFY_COLUMNS: [&str; 3] = ["property", "status", "detail"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, positional for moderate exponents.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0000000000000000".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..=16).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let point = exp as usize + 1;
        if point >= digits.len() {
            format!("{digits}{}.0", "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    };
    format!("{sign}{body}")
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn report_cells(report: &ExperimentReport) -> Vec<[String; 8]> {
    let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    report
        .rows
        .iter()
        .map(|r| {
            [
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                r.k.to_string(),
                r.weight.clone(),
                format_number(r.value),
                opt(r.upper_bound),
                opt(r.lower_bound),
                opt(r.finite_n_bound),
                verdict(r.verdict).to_string(),
            ]
        })
        .collect()
}

fn write_csv<const N: usize>(out: &mut dyn Write, header: [&str; N], rows: &[[String; N]]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}

fn number(cell: &str) -> Value {
    Number::from_str(cell)
        .map(Value::Number)
        .unwrap_or_else(|_| Value::String(cell.into()))
}

fn write_json(out: &mut dyn Write, rows: Vec<Map<String, Value>>) -> std::io::Result<()> {
    let rows: Vec<Value> = rows.into_iter().map(Value::Object).collect();
    serde_json::to_writer_pretty(&mut *out, &Value::Array(rows))?;
    writeln!(out)
}

pub fn emit_report(report: &ExperimentReport, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    let cells = report_cells(report);
    match format {
        Format::Csv => write_csv(out, REPORT_COLUMNS, &cells),
        Format::Json => {
            let rows = cells
                .into_iter()
                .map(|row| {
                    REPORT_COLUMNS
                        .iter()
                        .zip(row)
                        .map(|(&key, cell)| {
                            let v = match key {
                                "weight" | "verdict" => Value::String(cell),
                                _ if cell.is_empty() => Value::Null,
                                _ => number(&cell),
                            };
                            (key.to_string(), v)
                        })
                        .collect()
                })
                .collect();
            write_json(out, rows)
        }
    }
}

pub fn emit_verify(outcomes: &[PropertyOutcome], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    let cells: Vec<[String; 3]> = outcomes
        .iter()
        .map(|o| [o.name.to_string(), verdict(o.passed).to_string(), o.detail.clone()])
        .collect();
    match format {
        Format::Csv => write_csv(out, VERIFY_COLUMNS, &cells),
        Format::Json => write_json(
            out,
            cells
                .into_iter()
                .map(|row| {
                    VERIFY_COLUMNS
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), Value::String(v)))
                        .collect()
                })
                .collect(),
        ),
    }
}
