//! JSON wire formats with exact rationals encoded as "p/q" strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::gaussian::GaussianRational as Gq;
use super::laurent::LaurentPolynomial;
use super::poly::Poly;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RationalJson {
    pub num: Vec<[String; 2]>,
    pub den: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LaurentJson {
    pub coeffs: BTreeMap<String, String>,
    /// Imaginary parts, present only for non-real coefficients.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub imag: BTreeMap<String, String>,
}

fn poly_to_json(p: &Poly) -> Vec<[String; 2]> {
    p.coeffs().iter().map(Gq::to_strings).collect()
}

fn poly_from_json(v: &[[String; 2]]) -> Result<Poly> {
    Ok(Poly::new(v.iter().map(|[a, b]| Gq::from_strings(a, b)).collect::<Result<_>>()?))
}

pub fn rational_to_json(f: &RationalFunction) -> RationalJson {
    RationalJson { num: poly_to_json(f.num()), den: poly_to_json(f.den()) }
}

pub fn rational_from_json(j: &RationalJson) -> Result<RationalFunction> {
    RationalFunction::new(poly_from_json(&j.num)?, poly_from_json(&j.den)?)
}

pub fn laurent_to_json(l: &LaurentPolynomial) -> LaurentJson {
    let mut coeffs = BTreeMap::new();
    let mut imag = BTreeMap::new();
    for (k, c) in l.coeffs() {
        let [re, im] = c.to_strings();
        coeffs.insert(k.to_string(), re);
        if !c.is_real() {
            imag.insert(k.to_string(), im);
        }
    }
    LaurentJson { coeffs, imag }
}

pub fn laurent_from_json(j: &LaurentJson) -> Result<LaurentPolynomial> {
    let key = |k: &String| k.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent '{k}'")));
    let mut m: BTreeMap<i64, Gq> = BTreeMap::new();
    for (k, v) in &j.coeffs {
        *m.entry(key(k)?).or_default() += &Gq::from_strings(v, "0")?;
    }
    for (k, v) in &j.imag {
        *m.entry(key(k)?).or_default() += &Gq::from_strings("0", v)?;
    }
    Ok(LaurentPolynomial::new(m))
}

/// Accepts either an expression string or one of the JSON objects above.
pub fn rational_from_value(v: &serde_json::Value) -> Result<RationalFunction> {
    match v {
        serde_json::Value::String(s) => super::parse::parse_rational(s),
        serde_json::Value::Object(o) if o.contains_key("coeffs") => {
            let j: LaurentJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(laurent_from_json(&j)?.to_rational())
        }
        _ => {
            let j: RationalJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            rational_from_json(&j)
        }
    }
}

pub fn laurent_from_value(v: &serde_json::Value) -> Result<LaurentPolynomial> {
    let f = rational_from_value(v)?;
    LaurentPolynomial::from_rational(&f).ok_or_else(|| Error::Parse("not a Laurent polynomial".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_rational;

    #[test]
    fn rational_roundtrip() {
        let f = parse_rational("(z^2 + i/3)/(z - 1/2)").unwrap();
        let j = rational_to_json(&f);
        let text = serde_json::to_string(&j).unwrap();
        let back: RationalJson = serde_json::from_str(&text).unwrap();
        assert_eq!(rational_from_json(&back).unwrap(), f);
    }

    #[test]
    fn laurent_format() {
        let text = r#"{"coeffs": {"-2": "1/1", "3": "-5/2"}}"#;
        let j: LaurentJson = serde_json::from_str(text).unwrap();
        let l = laurent_from_json(&j).unwrap();
        assert_eq!(l.bidegree().unwrap(), (-2, 3));
        assert_eq!(laurent_to_json(&l), j);
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(laurent_from_value(&v).unwrap(), l);
    }
}
