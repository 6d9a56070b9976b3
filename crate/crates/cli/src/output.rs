//! Result records and their JSON-lines / CSV rendering.

use std::collections::BTreeMap;
use std::io::{self, Write};

use gzavg_core::exactmath::ExactRational;
use gzavg_core::{CyclotomicValue, Rational};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// An exact value: a rational, or an element of Q(ζ_order) by its
/// power-basis coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ExactValue {
    Rational(ExactRational),
    Cyclotomic { order: u64, coefficients: Vec<ExactRational> },
    None,
}

impl From<&Rational> for ExactValue {
    fn from(r: &Rational) -> Self {
        ExactValue::Rational(r.into())
    }
}

impl From<&CyclotomicValue> for ExactValue {
    fn from(c: &CyclotomicValue) -> Self {
        match c.as_rational() {
            Some(r) => ExactValue::Rational((&r).into()),
            None => ExactValue::Cyclotomic { order: c.order(), coefficients: c.coefficients().iter().map(Into::into).collect() },
        }
    }
}

impl ExactValue {
    fn csv_text(&self) -> String {
        match self {
            ExactValue::Rational(r) => rational_text(r),
            ExactValue::Cyclotomic { order, coefficients } => {
                let parts: Vec<String> = coefficients.iter().map(rational_text).collect();
                format!("[{}]@{order}", parts.join(","))
            }
            ExactValue::None => String::new(),
        }
    }
}

fn rational_text(r: &ExactRational) -> String {
    if r.den == "1" {
        r.num.clone()
    } else {
        format!("{}/{}", r.num, r.den)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub kind: String,
    pub params: BTreeMap<String, Value>,
    pub exact_value: ExactValue,
    pub flags: BTreeMap<String, Value>,
    pub narrative: Vec<String>,
    /// Position in the final ordering; not emitted.
    #[serde(skip)]
    pub sort_key: Vec<u64>,
}

impl Record {
    pub fn new(kind: &str, sort_key: Vec<u64>) -> Self {
        Record {
            kind: kind.to_string(),
            params: BTreeMap::new(),
            exact_value: ExactValue::None,
            flags: BTreeMap::new(),
            narrative: Vec::new(),
            sort_key,
        }
    }

    pub fn param(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.params.insert(name.to_string(), v.into());
        self
    }

    pub fn flag(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.flags.insert(name.to_string(), v.into());
        self
    }

    pub fn value(mut self, v: ExactValue) -> Self {
        self.exact_value = v;
        self
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.narrative.push(line.into());
        self
    }
}

/// Stable order: by sort key, then kind.
pub fn sort_records(records: &mut [Record]) {
    records.sort_by(|a, b| a.sort_key.cmp(&b.sort_key).then_with(|| a.kind.cmp(&b.kind)));
}

fn map_text(m: &BTreeMap<String, Value>) -> String {
    m.iter().map(|(k, v)| format!("{k}={}", v.to_string().trim_matches('"'))).collect::<Vec<_>>().join(";")
}

pub fn write_records(out: &mut impl Write, records: &[Record], format: OutputFormat) -> io::Result<()> {
    match format {
        OutputFormat::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["kind", "params", "exact_value", "flags", "narrative"])?;
            for r in records {
                w.write_record([
                    r.kind.clone(),
                    map_text(&r.params),
                    r.exact_value.csv_text(),
                    map_text(&r.flags),
                    r.narrative.join(" | "),
                ])?;
            }
            w.flush()?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gzavg_core::exactmath::{rat, root_of_unity};

    #[test]
    fn json_shape() {
        let r = Record::new("average", vec![1]).param("D", 3).flag("stable", true).value((&rat(-1, 5)).into()).note("x");
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"average","params":{"D":3},"exact_value":{"num":"-1","den":"5"},"flags":{"stable":true},"narrative":["x"]}"#
        );
    }

    #[test]
    fn cyclotomic_and_csv() {
        let z = root_of_unity(3, 1);
        let v = ExactValue::from(&z);
        assert!(matches!(v, ExactValue::Cyclotomic { order: 3, .. }));
        assert_eq!(v.csv_text(), "[0,1]@3");
        let rec = Record::new("k", vec![]).param("N", 5).value(v).note("a").note("b");
        let mut buf = Vec::new();
        write_records(&mut buf, &[rec], OutputFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "kind,params,exact_value,flags,narrative\nk,N=5,\"[0,1]@3\",,a | b\n");
    }
}
