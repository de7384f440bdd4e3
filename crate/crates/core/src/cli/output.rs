use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::experiments::ExperimentResult;

/// C `printf("%.15e")`: mantissa with 15 decimals, signed exponent with at
/// least two digits.
pub fn c_exp(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.15e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent in {:e} output");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}

pub fn to_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    let names: Vec<&str> = result.columns.iter().map(|(n, _)| n.as_str()).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for i in 0..result.rows() {
        let row: Vec<String> = result.columns.iter().map(|(_, v)| c_exp(v[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        write!(s, "{b:02x}").expect("writing to a String");
    }
    s
}

pub fn write_json(path: &Path, value: &impl Serialize) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_layout() {
        // Reference strings from C printf("%.15e").
        assert_eq!(c_exp(0.0), "0.000000000000000e+00");
        assert_eq!(c_exp(0.5), "5.000000000000000e-01");
        assert_eq!(c_exp(-1234.5), "-1.234500000000000e+03");
        assert_eq!(c_exp(1e-300), "1.000000000000000e-300");
        assert_eq!(c_exp(6.02214076e23), "6.022140760000000e+23");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = ExperimentResult::new("x", vec![("a".into(), vec![1.0, 2.0]), ("p_b".into(), vec![0.25, 0.5])]);
        let csv = to_csv(&r);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "a,p_b");
        assert_eq!(lines[2], "2.000000000000000e+00,5.000000000000000e-01");
    }
}
