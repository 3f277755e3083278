//! JSON readers and writers for the on-disk formats.
//!
//! Matrices travel as `{"n": N, "re": [[...]], "im": [[...]]}`, row-major,
//! written with 17 significant digits so the stored values round-trip f64
//! exactly. Finite actions travel as `{"mul": [[...]], "act": [[...]],
//! "dist": [[...]]}` where distances are numbers (converted exactly from
//! their binary value) or `[num, den]` pairs for non-dyadic rationals.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::finite::{FiniteAction, FiniteGroup, FiniteMetricSpace, Rat};
use crate::linalg::ComplexMatrix;
use crate::torus::TorusPoint;

#[derive(Deserialize)]
struct MatrixJson {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Parse a matrix from its JSON representation.
pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let raw: MatrixJson = serde_json::from_str(text)?;
    if raw.re.len() != raw.n
        || raw.im.len() != raw.n
        || raw.re.iter().any(|row| row.len() != raw.n)
        || raw.im.iter().any(|row| row.len() != raw.n)
    {
        return Err(Error::InvalidInput(format!(
            "matrix arrays do not match declared dimension {}",
            raw.n
        )));
    }
    ComplexMatrix::new(nalgebra::DMatrix::from_fn(raw.n, raw.n, |i, j| {
        Complex64::new(raw.re[i][j], raw.im[i][j])
    }))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}

fn write_float_rows(out: &mut String, rows: &[Vec<f64>]) {
    out.push('[');
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push(']');
    }
    out.push(']');
}

/// Serialize a matrix with 17 significant digits per component.
pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let n = m.dim();
    let re: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).re).collect())
        .collect();
    let im: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).im).collect())
        .collect();
    let mut out = String::new();
    let _ = write!(out, "{{\"n\":{n},\"re\":");
    write_float_rows(&mut out, &re);
    out.push_str(",\"im\":");
    write_float_rows(&mut out, &im);
    out.push('}');
    out
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    Ok(std::fs::write(path, matrix_to_json(m))?)
}

/// Read a list of matrices: either a directory of `*.json` files (sorted by
/// name) or a single file holding a JSON array of matrix objects.
pub fn read_matrix_list(path: &Path) -> Result<Vec<ComplexMatrix>> {
    if path.is_dir() {
        let mut files: Vec<_> = std::fs::read_dir(path)?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::InvalidInput(format!(
                "no .json files in {}",
                path.display()
            )));
        }
        files.iter().map(|f| read_matrix(f)).collect()
    } else {
        let text = std::fs::read_to_string(path)?;
        let raws: Vec<serde_json::Value> = serde_json::from_str(&text)?;
        raws.iter()
            .map(|v| matrix_from_json(&v.to_string()))
            .collect()
    }
}

/// Read torus generators: a JSON array of coordinate arrays, all of one
/// dimension.
pub fn read_torus_points(path: &Path) -> Result<Vec<TorusPoint>> {
    let text = std::fs::read_to_string(path)?;
    let raw: Vec<Vec<f64>> = serde_json::from_str(&text)?;
    if raw.is_empty() {
        return Err(Error::InvalidInput("no torus points in file".into()));
    }
    raw.into_iter().map(TorusPoint::new).collect()
}

/// Exact conversion of an f64 to a rational. Every finite f64 is a dyadic
/// rational; values needing denominators beyond 2^40 are rejected as
/// unintended (write them as [num, den] instead).
fn f64_to_rat(v: f64) -> Result<Rat> {
    if !v.is_finite() {
        return Err(Error::NonFiniteEntry);
    }
    let mut num = v;
    let mut den: i128 = 1;
    let mut steps = 0;
    while num.fract() != 0.0 {
        num *= 2.0;
        den *= 2;
        steps += 1;
        if steps > 40 || num.abs() > 9e15 {
            return Err(Error::InvalidInput(format!(
                "distance {v} is not exactly representable; use [numerator, denominator]"
            )));
        }
    }
    Ok(Rat::new(num as i128, den))
}

fn value_to_rat(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::Number(_) => {
            let f = v.as_f64().ok_or(Error::NonFiniteEntry)?;
            f64_to_rat(f)
        }
        serde_json::Value::Array(parts) if parts.len() == 2 => {
            let num = parts[0]
                .as_i64()
                .ok_or_else(|| Error::InvalidInput("rational numerator must be an integer".into()))?;
            let den = parts[1]
                .as_i64()
                .ok_or_else(|| Error::InvalidInput("rational denominator must be an integer".into()))?;
            if den == 0 {
                return Err(Error::InvalidInput("zero denominator".into()));
            }
            Ok(Rat::new(num as i128, den as i128))
        }
        other => Err(Error::InvalidInput(format!(
            "expected number or [num, den], got {other}"
        ))),
    }
}

#[derive(Deserialize)]
struct ActionJson {
    mul: Vec<Vec<usize>>,
    act: Vec<Vec<usize>>,
    dist: Vec<Vec<serde_json::Value>>,
}

/// Read a finite action from its table file; all validation (group axioms,
/// metric axioms, faithfulness) runs on load.
pub fn read_finite_action(path: &Path) -> Result<FiniteAction> {
    let text = std::fs::read_to_string(path)?;
    let raw: ActionJson = serde_json::from_str(&text)?;
    let dist: Vec<Vec<Rat>> = raw
        .dist
        .iter()
        .map(|row| row.iter().map(value_to_rat).collect())
        .collect::<Result<_>>()?;
    FiniteAction::new(
        FiniteGroup::from_table(raw.mul)?,
        FiniteMetricSpace::new(dist)?,
        raw.act,
    )
}
