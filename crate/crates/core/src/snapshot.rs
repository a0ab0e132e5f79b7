//! Canonical, byte-stable JSON encoding used for state snapshots.
//!
//! Object keys are sorted, there is no whitespace, and floating point numbers
//! are rendered with at most 9 significant digits so that equal states produce
//! byte-equal text regardless of platform formatting quirks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

/// A canonical JSON tree. Objects are key-sorted by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Canon {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Canon>),
    Obj(BTreeMap<String, Canon>),
}

impl Canon {
    pub fn obj<I, K>(entries: I) -> Canon
    where
        I: IntoIterator<Item = (K, Canon)>,
        K: Into<String>,
    {
        Canon::Obj(entries.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn str(s: impl Into<String>) -> Canon {
        Canon::Str(s.into())
    }

    pub fn ints<I: IntoIterator<Item = T>, T: Into<i64>>(items: I) -> Canon {
        Canon::Arr(items.into_iter().map(|v| Canon::Int(v.into())).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    pub fn write(&self, out: &mut String) {
        match self {
            Canon::Null => out.push_str("null"),
            Canon::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Canon::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Canon::Num(v) => out.push_str(&format_number(*v)),
            Canon::Str(s) => write_string(out, s),
            Canon::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Canon::Obj(map) => {
                out.push('{');
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_string(out, k);
                    out.push(':');
                    v.write(out);
                }
                out.push('}');
            }
        }
    }

    /// Converts parsed JSON back into canonical form. Integral numbers that fit
    /// an `i64` become [`Canon::Int`].
    pub fn from_json(value: &serde_json::Value) -> Canon {
        match value {
            serde_json::Value::Null => Canon::Null,
            serde_json::Value::Bool(b) => Canon::Bool(*b),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Canon::Int(i),
                None => Canon::Num(n.as_f64().unwrap_or(f64::NAN)),
            },
            serde_json::Value::String(s) => Canon::Str(s.clone()),
            serde_json::Value::Array(items) => Canon::Arr(items.iter().map(Canon::from_json).collect()),
            serde_json::Value::Object(map) => Canon::Obj(
                map.iter()
                    .map(|(k, v)| (k.clone(), Canon::from_json(v)))
                    .collect(),
            ),
        }
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Formats a float with at most 9 significant digits, `%g` style: plain
/// decimal notation for exponents in `[-5, 9)`, scientific otherwise.
/// Trailing zeros are trimmed and negative zero prints as `0`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "null".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "1e999" } else { "-1e999" }.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.8e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-5..9).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                for _ in digits.len()..int_len {
                    out.push('0');
                }
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        let _ = write!(out, "e{exp}");
    }
    out
}
