//! Number and matrix formatting shared by the text reports.

use nalgebra::{DMatrix, DVector};

/// Integers print without a fractional part; other values print with ten
/// decimals and trailing zeros trimmed.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == v.trunc() && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let s = format!("{v:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn fmt_vec(v: &[f64]) -> String {
    format!(
        "({})",
        v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", ")
    )
}

pub fn fmt_dvec(v: &DVector<f64>) -> String {
    fmt_vec(v.as_slice())
}

/// One indented line per row, entries separated by spaces.
pub fn fmt_matrix(m: &DMatrix<f64>, indent: &str) -> String {
    let mut out = String::new();
    for r in m.row_iter() {
        out.push_str(indent);
        out.push_str(
            &r.iter()
                .map(|x| fmt_num(*x))
                .collect::<Vec<_>>()
                .join(" "),
        );
        out.push('\n');
    }
    out
}
