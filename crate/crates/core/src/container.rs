//! Header-plus-payload file container shared by model, translate-system and
//! action-system files.
//!
//! Layout:
//!
//! ```text
//! <header: one line of JSON>\n
//! <payload>
//! ```
//!
//! The header is a JSON object with a `payload` member
//! `{"encoding": "csv" | "binary", "values": N}`. With `csv` the payload is
//! `N` lines of the form `re,im\n`, each number printed in the shortest
//! form that parses back to the same `f64`. With `binary` it is exactly
//! `16 N` bytes: for each value the real part then the imaginary part as
//! little-endian IEEE-754 `f64`. Both encodings round-trip bit for bit.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    #[default]
    Csv,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadInfo {
    pub encoding: Encoding,
    pub values: usize,
}

/// Serializes `header` (which must be a JSON object) followed by the payload.
pub fn write(header: &impl Serialize, values: &[Complex64], encoding: Encoding) -> Result<Vec<u8>> {
    let mut head = serde_json::to_value(header)?;
    let obj = head
        .as_object_mut()
        .ok_or_else(|| Error::Contract("container header must be a JSON object".into()))?;
    obj.insert(
        "payload".into(),
        serde_json::to_value(PayloadInfo { encoding, values: values.len() })?,
    );
    let mut out = serde_json::to_vec(&head)?;
    out.push(b'\n');
    match encoding {
        Encoding::Csv => {
            let mut s = String::with_capacity(values.len() * 24);
            for z in values {
                writeln!(s, "{},{}", z.re, z.im).expect("writing to a String cannot fail");
            }
            out.extend_from_slice(s.as_bytes());
        }
        Encoding::Binary => {
            out.reserve(values.len() * 16);
            for z in values {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    Ok(out)
}

/// Splits a container into its JSON header and payload values.
pub fn read(bytes: &[u8]) -> Result<(Value, Vec<Complex64>)> {
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Parse("missing header line (no newline found)".into()))?;
    let header: Value = serde_json::from_slice(&bytes[..split])
        .map_err(|e| Error::Parse(format!("header is not valid JSON: {e}")))?;
    let info: PayloadInfo = header
        .get("payload")
        .cloned()
        .ok_or_else(|| Error::Parse("header has no `payload` member".into()))
        .and_then(|p| serde_json::from_value(p).map_err(|e| Error::Parse(format!("bad `payload` member: {e}"))))?;
    let body = &bytes[split + 1..];
    let values = match info.encoding {
        Encoding::Csv => parse_csv(body, info.values)?,
        Encoding::Binary => parse_binary(body, info.values)?,
    };
    Ok((header, values))
}

fn parse_csv(body: &[u8], expected: usize) -> Result<Vec<Complex64>> {
    let text = std::str::from_utf8(body).map_err(|e| Error::Parse(format!("csv payload is not UTF-8: {e}")))?;
    let mut out = Vec::with_capacity(expected);
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected `re,im`, got {line:?}")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {lineno}: bad number {s:?}: {e}")))
        };
        out.push(Complex64::new(parse(re)?, parse(im)?));
    }
    if out.len() != expected {
        return Err(Error::Parse(format!(
            "payload holds {} values but the header declares {expected}",
            out.len()
        )));
    }
    Ok(out)
}

fn parse_binary(body: &[u8], expected: usize) -> Result<Vec<Complex64>> {
    if body.len() != expected * 16 {
        return Err(Error::Parse(format!(
            "binary payload has {} bytes, expected {} ({} values)",
            body.len(),
            expected * 16,
            expected
        )));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect())
}

/// Deserializes a typed header out of the raw JSON.
pub fn header_as<T: for<'de> Deserialize<'de>>(header: &Value) -> Result<T> {
    serde_json::from_value(header.clone()).map_err(|e| Error::Parse(format!("bad header: {e}")))
}

/// Checks the `format` tag of a header.
pub fn expect_format(header: &Value, format: &str) -> Result<()> {
    match header.get("format").and_then(Value::as_str) {
        Some(f) if f == format => Ok(()),
        Some(f) => Err(Error::Parse(format!("expected a `{format}` file, found `{f}`"))),
        None => Err(Error::Parse("header has no `format` tag".into())),
    }
}
