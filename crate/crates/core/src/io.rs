//! Text formats: JSON for symbols, masks and pyramids; CSV for signals.
//! Every real is written at 17 significant digits so files round-trip
//! binary64 values exactly.

use crate::error::{Error, Result};
use crate::factorization::RefinementMask;
use crate::filterbank::{CoefficientPyramid, SpectralPyramid};
use crate::laurent::LaurentPolynomial;
use crate::symbols::SubdivisionSymbol;
use serde_json::{json, Map, Number, Value};
use std::fmt::Write as _;

/// `x` at 17 significant digits in scientific notation; parses back to the
/// same binary64 value.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A JSON number carrying `x` at 17 significant digits (`null` if not finite).
pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(fmt17(x).parse::<Number>().expect("formatted float is valid JSON"))
}

pub fn numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| number(x)).collect())
}

fn laurent_fields(order: usize, xi: f64, level: u32, p: &LaurentPolynomial) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("N".into(), json!(order));
    m.insert("xi".into(), number(xi));
    m.insert("level".into(), json!(level));
    m.insert("lo".into(), json!(p.lo()));
    m.insert("coeffs".into(), numbers(p.coeffs()));
    m
}

pub fn symbol_json(s: &SubdivisionSymbol) -> Value {
    let xi = s.xi().unwrap_or(f64::NAN);
    Value::Object(laurent_fields(s.order(), xi, s.level, &s.a))
}

pub fn mask_json(mask: &RefinementMask, factorization_residual: f64) -> Value {
    let mut m = laurent_fields(mask.order(), mask.context.xi(), mask.level(), &mask.g);
    m.insert("kind".into(), json!("mask"));
    m.insert("qmf_residual".into(), number(mask.qmf_residual()));
    m.insert("factorization_residual".into(), number(factorization_residual));
    Value::Object(m)
}

/// Header fields and coefficients of a symbol or mask object.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentRecord {
    pub order: usize,
    pub xi: f64,
    pub level: u32,
    pub poly: LaurentPolynomial,
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::parse(name, "missing"))
}

fn as_f64(v: &Value, name: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::parse(name, "expected a number"))
}

fn f64_field(v: &Value, name: &str) -> Result<f64> {
    as_f64(field(v, name)?, name)
}

fn u64_field(v: &Value, name: &str) -> Result<u64> {
    field(v, name)?
        .as_u64()
        .ok_or_else(|| Error::parse(name, "expected a non-negative integer"))
}

fn u32_field(v: &Value, name: &str) -> Result<u32> {
    u32::try_from(u64_field(v, name)?).map_err(|_| Error::parse(name, "out of range"))
}

fn f64_array(v: &Value, name: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::parse(name, "expected an array"))?
        .iter()
        .map(|x| as_f64(x, name))
        .collect()
}

pub fn parse_laurent_record(v: &Value) -> Result<LaurentRecord> {
    let lo = field(v, "lo")?
        .as_i64()
        .ok_or_else(|| Error::parse("lo", "expected an integer"))?;
    Ok(LaurentRecord {
        order: u64_field(v, "N")? as usize,
        xi: f64_field(v, "xi")?,
        level: u32_field(v, "level")?,
        poly: LaurentPolynomial::new(lo, f64_array(field(v, "coeffs")?, "coeffs")?),
    })
}

fn pyramid_body(p: &CoefficientPyramid) -> Value {
    json!({
        "length": p.length,
        "approx": numbers(&p.approx),
        "details": p.details.iter().map(|d| numbers(d)).collect::<Vec<_>>(),
    })
}

fn parse_pyramid_body(v: &Value, name: &str) -> Result<CoefficientPyramid> {
    let details = field(v, "details")?
        .as_array()
        .ok_or_else(|| Error::parse(format!("{name}.details"), "expected an array"))?
        .iter()
        .map(|d| f64_array(d, &format!("{name}.details")))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientPyramid {
        approx: f64_array(field(v, "approx")?, &format!("{name}.approx"))?,
        details,
        length: u64_field(v, "length")? as usize,
    })
}

/// Plan parameters stored next to a 1-D pyramid.
#[derive(Clone, Debug, PartialEq)]
pub struct PyramidFile {
    pub order: usize,
    pub xi: f64,
    pub base_level: u32,
    pub pyramid: CoefficientPyramid,
}

pub fn pyramid_json(f: &PyramidFile) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!("pyramid"));
    m.insert("N".into(), json!(f.order));
    m.insert("xi".into(), number(f.xi));
    m.insert("base_level".into(), json!(f.base_level));
    m.insert("depth".into(), json!(f.pyramid.depth()));
    if let Value::Object(body) = pyramid_body(&f.pyramid) {
        m.extend(body);
    }
    Value::Object(m)
}

/// `maxval` is the PGM depth the image was read with.
pub fn spectral_json(p: &SpectralPyramid, maxval: u16) -> Value {
    let rows: Vec<Value> = p
        .real
        .iter()
        .zip(&p.imag)
        .enumerate()
        .map(|(r, (re, im))| json!({"xi": r, "real": pyramid_body(re), "imag": pyramid_body(im)}))
        .collect();
    json!({
        "kind": "spectral_pyramid",
        "N": p.order,
        "base_level": p.base_level,
        "depth": p.depth,
        "width": p.width,
        "height": p.height,
        "maxval": maxval,
        "rows": rows,
    })
}

pub enum CoefficientFile {
    Signal(PyramidFile),
    Image { pyramid: SpectralPyramid, maxval: u16 },
}

pub fn parse_coefficients(text: &str) -> Result<CoefficientFile> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse("json", e.to_string()))?;
    let kind = field(&v, "kind")?
        .as_str()
        .ok_or_else(|| Error::parse("kind", "expected a string"))?;
    match kind {
        "pyramid" => {
            let pyramid = parse_pyramid_body(&v, "pyramid")?;
            let depth = u32_field(&v, "depth")?;
            if pyramid.depth() != depth {
                return Err(Error::parse("depth", format!("{depth} but {} detail bands", pyramid.depth())));
            }
            Ok(CoefficientFile::Signal(PyramidFile {
                order: u64_field(&v, "N")? as usize,
                xi: f64_field(&v, "xi")?,
                base_level: u32_field(&v, "base_level")?,
                pyramid,
            }))
        }
        "spectral_pyramid" => {
            let rows = field(&v, "rows")?
                .as_array()
                .ok_or_else(|| Error::parse("rows", "expected an array"))?;
            let mut real = Vec::with_capacity(rows.len());
            let mut imag = Vec::with_capacity(rows.len());
            for row in rows {
                real.push(parse_pyramid_body(field(row, "real")?, "real")?);
                imag.push(parse_pyramid_body(field(row, "imag")?, "imag")?);
            }
            let maxval = u16::try_from(u64_field(&v, "maxval")?).map_err(|_| Error::parse("maxval", "out of range"))?;
            Ok(CoefficientFile::Image {
                pyramid: SpectralPyramid {
                    width: u64_field(&v, "width")? as usize,
                    height: u64_field(&v, "height")? as usize,
                    order: u64_field(&v, "N")? as usize,
                    base_level: u32_field(&v, "base_level")?,
                    depth: u32_field(&v, "depth")?,
                    real,
                    imag,
                },
                maxval,
            })
        }
        other => Err(Error::parse("kind", format!("unknown kind {other:?}"))),
    }
}

/// Reads the value column of a one- or two-column CSV. A non-numeric first
/// line is taken as a header; blank lines are skipped.
pub fn parse_signal_csv(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cell = line.rsplit(',').next().unwrap_or("").trim();
        match cell.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::parse(
                    "value",
                    format!("line {}: cannot parse {cell:?} as a number", i + 1),
                ))
            }
        }
    }
    Ok(out)
}

/// CSV with header `index,value`.
pub fn signal_csv(values: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (i, &v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", fmt17(v));
    }
    out
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
