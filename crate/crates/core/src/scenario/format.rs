//! CSV and JSON output.
//!
//! Numbers carry 12 significant digits in CSV and 17 in JSON, enough for
//! every `f64` to read back bit for bit. Non-finite values are written as
//! `inf`, `-inf` or `nan` (quoted in JSON).

use std::fmt::Write as _;
use std::str::FromStr;

use super::eval::{DensityRow, Evaluation, PlanOutcome, SweepAxis, SweepRow};
use super::{FutureTrials, PriorChoice, PriorParams};
use crate::error::{config, Error};
use crate::numerics::QuadratureSpec;

pub const CSV_DIGITS: usize = 12;
pub const JSON_DIGITS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(config(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_fraction(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn csv_num(v: f64) -> String {
    format_sig(v, CSV_DIGITS)
}

fn json_num(v: f64) -> String {
    let s = format_sig(v, JSON_DIGITS);
    if v.is_finite() {
        s
    } else {
        format!("\"{s}\"")
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

#[derive(Default)]
struct JsonObject {
    fields: Vec<String>,
}

impl JsonObject {
    fn raw(mut self, key: &str, value: String) -> Self {
        self.fields.push(format!("{}:{value}", json_str(key)));
        self
    }

    fn num(self, key: &str, v: f64) -> Self {
        self.raw(key, json_num(v))
    }

    fn int(self, key: &str, v: u64) -> Self {
        self.raw(key, v.to_string())
    }

    fn text(self, key: &str, v: &str) -> Self {
        self.raw(key, json_str(v))
    }

    fn flag(self, key: &str, v: bool) -> Self {
        self.raw(key, v.to_string())
    }

    fn future(self, key: &str, v: FutureTrials) -> Self {
        match v {
            FutureTrials::Count(n) => self.int(key, n),
            FutureTrials::Limit => self.text(key, "limit"),
        }
    }

    fn finish(self) -> String {
        format!("{{{}}}", self.fields.join(","))
    }
}

fn json_array(items: impl IntoIterator<Item = String>) -> String {
    let items: Vec<String> = items.into_iter().collect();
    if items.is_empty() {
        return "[]\n".into();
    }
    format!("[\n  {}\n]\n", items.join(",\n  "))
}

fn prior_json(params: &PriorParams) -> String {
    let mut obj = JsonObject::default();
    if let Some(f) = &params.family {
        obj = obj.text("family", f);
    }
    for (name, v) in params.set_scalars() {
        obj = obj.num(name, v);
    }
    if let Some(m) = &params.masses {
        obj = obj.raw("masses", format!("[{}]", m.iter().map(|v| json_num(*v)).collect::<Vec<_>>().join(",")));
    }
    obj.finish()
}

fn quadrature_json(q: &QuadratureSpec) -> String {
    JsonObject::default()
        .num("abs_tol", q.abs_tol)
        .num("rel_tol", q.rel_tol)
        .int("max_depth", u64::from(q.max_depth))
        .num("endpoint_eps", q.endpoint_eps)
        .finish()
}

/// Inputs and result of one `eval`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub prior: PriorChoice,
    pub n: u64,
    pub future: FutureTrials,
    pub quadrature: QuadratureSpec,
    pub evaluation: Evaluation,
}

pub fn eval_output(r: &EvalRecord, format: Format) -> String {
    let e = &r.evaluation;
    match format {
        Format::Csv => {
            let mut out = String::from("prior,n,N,value,method,clamped,diverged\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.prior.describe(),
                r.n,
                r.future,
                csv_num(e.value),
                e.method.as_str(),
                e.clamped,
                e.diverged
            );
            out
        }
        Format::Json => {
            let obj = JsonObject::default()
                .raw("prior", prior_json(&r.prior.to_params()))
                .text("description", &r.prior.describe())
                .int("n", r.n)
                .future("N", r.future)
                .raw("quadrature", quadrature_json(&r.quadrature))
                .num("value", e.value)
                .num("raw_value", e.raw_value)
                .text("method", e.method.as_str())
                .flag("clamped", e.clamped)
                .flag("diverged", e.diverged);
            obj.finish() + "\n"
        }
    }
}

pub fn sweep_output(axis: SweepAxis, rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("axis_name,axis_value,value,method,clamped,diverged\n");
            for row in rows {
                let e = &row.evaluation;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    axis.name(),
                    row.axis_value,
                    csv_num(e.value),
                    e.method.as_str(),
                    e.clamped,
                    e.diverged
                );
            }
            out
        }
        Format::Json => json_array(rows.iter().map(|row| {
            let e = &row.evaluation;
            JsonObject::default()
                .text("axis_name", axis.name())
                .int("axis_value", row.axis_value)
                .num("value", e.value)
                .text("method", e.method.as_str())
                .flag("clamped", e.clamped)
                .flag("diverged", e.diverged)
                .finish()
        })),
    }
}

/// Inputs and result of one `plan`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanRecord {
    pub prior: PriorChoice,
    pub future: FutureTrials,
    pub target: f64,
    pub outcome: PlanOutcome,
}

pub fn plan_output(r: &PlanRecord, format: Format) -> String {
    let (status, n, value, below) = match r.outcome {
        PlanOutcome::Found { n, value, below } => ("found", n, value, below),
        PlanOutcome::Unattainable { n_max, value } => ("unattainable", n_max, value, None),
    };
    match format {
        Format::Csv => {
            let mut out = String::from("prior,N,target,status,n,value\n");
            let _ = writeln!(
                out,
                "{},{},{},{status},{n},{}",
                r.prior.describe(),
                r.future,
                csv_num(r.target),
                csv_num(value)
            );
            out
        }
        Format::Json => {
            let mut obj = JsonObject::default()
                .raw("prior", prior_json(&r.prior.to_params()))
                .text("description", &r.prior.describe())
                .future("N", r.future)
                .num("target", r.target)
                .text("status", status)
                .int("n", n)
                .num("value", value);
            if let Some(b) = below {
                obj = obj.num("value_below", b);
            }
            obj.finish() + "\n"
        }
    }
}

pub fn density_output(rows: &[DensityRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("p,prior_density,posterior_density\n");
            for row in rows {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    csv_num(row.p),
                    csv_num(row.prior_density),
                    csv_num(row.posterior_density)
                );
            }
            out
        }
        Format::Json => json_array(rows.iter().map(|row| {
            JsonObject::default()
                .num("p", row.p)
                .num("prior_density", row.prior_density)
                .num("posterior_density", row.posterior_density)
                .finish()
        })),
    }
}
