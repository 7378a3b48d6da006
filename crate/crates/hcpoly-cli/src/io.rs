//! Polynomial and point files.
//!
//! Coefficients travel as decimal strings so that a file means the same
//! polynomial at every precision.

use hcpoly::{BigFloat, Complex, Poly, PolyBig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Deserialize, Serialize)]
pub struct PolynomialFile {
    pub degree: usize,
    pub coeffs: Vec<[Value; 2]>,
}

fn component(v: &Value, field: &str, bits: u32) -> Result<BigFloat, CliError> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(CliError::usage(format!("{field}: expected a decimal string, found {other}"))),
    };
    let x = BigFloat::parse_decimal(&s, bits).map_err(|e| CliError::usage(format!("{field}: {e}")))?;
    if !x.to_f64().is_finite() {
        return Err(CliError::usage(format!("{field}: {s:?} is not a finite value")));
    }
    Ok(x)
}

pub fn parse_json(text: &str, what: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::usage(format!("{what}: malformed JSON at line {} column {}: {e}", e.line(), e.column())))
}

/// Read `text` as a [`PolynomialFile`], rounding each coefficient to `bits`.
pub fn parse_polynomial(text: &str, bits: u32) -> Result<PolyBig, CliError> {
    let file: PolynomialFile = serde_json::from_value(parse_json(text, "polynomial")?)
        .map_err(|e| CliError::usage(format!("polynomial: {e}")))?;
    if file.coeffs.len() != file.degree + 1 {
        return Err(CliError::usage(format!(
            "polynomial: degree {} needs {} coefficients but coeffs has {}",
            file.degree,
            file.degree + 1,
            file.coeffs.len()
        )));
    }
    let mut cs = Vec::with_capacity(file.coeffs.len());
    for (i, [re, im]) in file.coeffs.iter().enumerate() {
        cs.push(Complex::new(component(re, &format!("coeffs[{i}][0]"), bits)?, component(im, &format!("coeffs[{i}][1]"), bits)?));
    }
    Ok(Poly::new(cs))
}

/// Points as `[[re, im], …]` or `{"points": [[re, im], …]}`.
pub fn parse_points(text: &str, bits: u32) -> Result<Vec<Complex<BigFloat>>, CliError> {
    let v = parse_json(text, "points")?;
    let list = match &v {
        Value::Array(a) => a,
        Value::Object(o) => match o.get("points") {
            Some(Value::Array(a)) => a,
            _ => return Err(CliError::usage("points: object needs a \"points\" array")),
        },
        _ => return Err(CliError::usage("points: expected an array")),
    };
    list.iter()
        .enumerate()
        .map(|(i, p)| match p.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => Ok(Complex::new(component(re, &format!("points[{i}][0]"), bits)?, component(im, &format!("points[{i}][1]"), bits)?)),
            _ => Err(CliError::usage(format!("points[{i}]: expected [re, im]"))),
        })
        .collect()
}

/// Exact decimal rendering; parsing it back at the same precision is the identity.
pub fn polynomial_to_json(f: &PolyBig) -> Value {
    let coeffs: Vec<[String; 2]> = f.coeffs().iter().map(|c| [c.re.to_exact_decimal(), c.im.to_exact_decimal()]).collect();
    serde_json::json!({ "degree": f.deg(), "coeffs": coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_minus_x() {
        let f = parse_polynomial(r#"{"degree":1,"coeffs":[["1","0"],["−1","0"]]}"#, 64).unwrap();
        assert_eq!(f.to_f64().coeffs(), &[Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0)]);
    }

    #[test]
    fn degree_mismatch_names_both() {
        let e = parse_polynomial(r#"{"degree":3,"coeffs":[["1","0"],["2","0"]]}"#, 64).unwrap_err();
        assert!(e.message.contains("degree 3") && e.message.contains("has 2"), "{}", e.message);
        assert_eq!(e.code, 2);
    }

    #[test]
    fn malformed_and_non_finite() {
        let e = parse_polynomial("{\"degree\":1,\n\"coeffs\":[", 64).unwrap_err();
        assert!(e.message.contains("line 2"), "{}", e.message);
        let e = parse_polynomial(r#"{"degree":0,"coeffs":[["inf","0"]]}"#, 64).unwrap_err();
        assert!(e.message.contains("coeffs[0][0]"), "{}", e.message);
    }

    #[test]
    fn tenth_round_trips() {
        let f = parse_polynomial(r#"{"degree":0,"coeffs":[["0.1","0"]]}"#, 113).unwrap();
        let text = polynomial_to_json(&f).to_string();
        let g = parse_polynomial(&text, 113).unwrap();
        assert_eq!(f.coeffs()[0].re.to_exact_decimal(), g.coeffs()[0].re.to_exact_decimal());
        assert_eq!(polynomial_to_json(&g).to_string(), text);
    }

    #[test]
    fn points_forms() {
        assert_eq!(parse_points(r#"[["0.5","0"],[0,1]]"#, 64).unwrap().len(), 2);
        assert_eq!(parse_points(r#"{"points":[["0","0"]]}"#, 64).unwrap().len(), 1);
        assert!(parse_points(r#"[["0"]]"#, 64).is_err());
    }
}
