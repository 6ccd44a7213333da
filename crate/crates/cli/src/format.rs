//! Number and table rendering.

use serde::Serialize;

use crate::expr::ExprError;

/// Marks a failed row in CSV output.
pub const ERROR_TOKEN: &str = "error";

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped,
/// exponent form outside `[1e-5, 1e17)`.
pub fn g17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa.to_string()), exp.abs())
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn csv_table(rows: &[(f64, Result<f64, ExprError>)]) -> String {
    let mut out = String::from("x,value\n");
    for (x, r) in rows {
        let value = match r {
            Ok(v) => g17(*v),
            Err(_) => ERROR_TOKEN.to_string(),
        };
        out.push_str(&format!("{},{value}\n", g17(*x)));
    }
    out
}

#[derive(Serialize)]
struct Row {
    x: f64,
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn json_table(rows: &[(f64, Result<f64, ExprError>)]) -> String {
    let items: Vec<Row> = rows
        .iter()
        .map(|(x, r)| match r {
            Ok(v) if v.is_finite() => Row {
                x: *x,
                value: Some(*v),
                error: None,
            },
            Ok(v) => Row {
                x: *x,
                value: None,
                error: Some(format!("non-finite value {v}")),
            },
            Err(e) => Row {
                x: *x,
                value: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    serde_json::to_string_pretty(&items).expect("plain values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        assert_eq!(g17(5.0), "5");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(g17(0.0), "0");
    }

    #[test]
    fn roundtrips() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-9, 6.02e23, -7.25] {
            assert_eq!(g17(v).parse::<f64>().unwrap(), v);
        }
    }
}
