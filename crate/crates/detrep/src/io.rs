//! Serialization: polynomial text and JSON formats, representation and root
//! output, and the benchmark report schema.
//!
//! Text format for a bivariate polynomial (affine, x^i y^j):
//!
//! ```text
//! degree 2
//! 2 0 1.0
//! 0 2 1.0
//! 0 0 -5.0 0.0
//! ```
//!
//! The fourth number on a coefficient line is the optional imaginary part.
//! JSON format: `{"degree": n, "coeffs": [[i, j, re, im], ...]}`. Complex
//! numbers in all emitted JSON are `[re, im]` pairs.

use crate::builder::DetRep;
use crate::error::{Error, Result};
use crate::polycore::AffinePoly;
use crate::twopar::{RootFlag, RootSet};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Parses the whitespace text format.
pub fn parse_poly_text(input: &str) -> Result<AffinePoly> {
    let mut lines = input
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| invalid("empty polynomial file"))?;
    let mut hw = header.split_whitespace();
    match (hw.next(), hw.next(), hw.next()) {
        (Some("degree"), Some(d), None) => {
            let degree: usize = d
                .parse()
                .map_err(|_| invalid(format!("bad degree '{}'", d)))?;
            if degree == 0 {
                return Err(invalid("degree must be at least 1"));
            }
            let mut p = AffinePoly::zero(degree);
            for line in lines {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 && parts.len() != 4 {
                    return Err(invalid(format!(
                        "expected 'i j re [im]', got '{}'",
                        line
                    )));
                }
                let i: usize = parts[0]
                    .parse()
                    .map_err(|_| invalid(format!("bad exponent '{}'", parts[0])))?;
                let j: usize = parts[1]
                    .parse()
                    .map_err(|_| invalid(format!("bad exponent '{}'", parts[1])))?;
                if i + j > degree {
                    return Err(invalid(format!(
                        "monomial x^{} y^{} exceeds degree {}",
                        i, j, degree
                    )));
                }
                let re: f64 = parts[2]
                    .parse()
                    .map_err(|_| invalid(format!("bad coefficient '{}'", parts[2])))?;
                let im: f64 = if parts.len() == 4 {
                    parts[3]
                        .parse()
                        .map_err(|_| invalid(format!("bad coefficient '{}'", parts[3])))?
                } else {
                    0.0
                };
                p.set(i, j, C64::new(re, im));
            }
            Ok(p)
        }
        _ => Err(invalid(format!(
            "first line must be 'degree n', got '{}'",
            header
        ))),
    }
}

pub fn write_poly_text(p: &AffinePoly) -> String {
    let mut out = format!("degree {}\n", p.degree());
    for (i, j, a) in p.terms() {
        if a.norm() > 0.0 {
            out.push_str(&format!("{} {} {:?} {:?}\n", i, j, a.re, a.im));
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    degree: usize,
    coeffs: Vec<(usize, usize, f64, f64)>,
}

pub fn parse_poly_json(input: &str) -> Result<AffinePoly> {
    let raw: PolyJson =
        serde_json::from_str(input).map_err(|e| invalid(format!("bad JSON: {}", e)))?;
    if raw.degree == 0 {
        return Err(invalid("degree must be at least 1"));
    }
    let mut p = AffinePoly::zero(raw.degree);
    for (i, j, re, im) in raw.coeffs {
        if i + j > raw.degree {
            return Err(invalid(format!(
                "monomial x^{} y^{} exceeds degree {}",
                i, j, raw.degree
            )));
        }
        p.set(i, j, C64::new(re, im));
    }
    Ok(p)
}

pub fn write_poly_json(p: &AffinePoly) -> String {
    let coeffs = p
        .terms()
        .filter(|(_, _, a)| a.norm() > 0.0)
        .map(|(i, j, a)| (i, j, a.re, a.im))
        .collect();
    serde_json::to_string_pretty(&PolyJson {
        degree: p.degree(),
        coeffs,
    })
    .expect("static schema")
}

/// Parses either format: JSON when the first non-space byte is `{`.
pub fn parse_poly(input: &str) -> Result<AffinePoly> {
    if input.trim_start().starts_with('{') {
        parse_poly_json(input)
    } else {
        parse_poly_text(input)
    }
}

fn matrix_json(m: &Array2<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Serialize, Deserialize)]
pub struct RepJson {
    pub n: usize,
    pub residual: f64,
    /// Homogeneous triple: det(xA + yB + zC) = p(x, y, z).
    pub a: Vec<Vec<[f64; 2]>>,
    pub b: Vec<Vec<[f64; 2]>>,
    pub c: Vec<Vec<[f64; 2]>>,
    /// Affine triple: det(A1 + x B1 + y C1) = p(x, y).
    pub a1: Vec<Vec<[f64; 2]>>,
    pub b1: Vec<Vec<[f64; 2]>>,
    pub c1: Vec<Vec<[f64; 2]>>,
}

pub fn rep_to_json(rep: &DetRep, residual: f64) -> String {
    let (a1, b1, c1) = rep.affine_triple();
    let doc = RepJson {
        n: rep.n(),
        residual,
        a: matrix_json(&rep.a()),
        b: matrix_json(&rep.b()),
        c: matrix_json(&rep.c()),
        a1: matrix_json(&a1),
        b1: matrix_json(&b1),
        c1: matrix_json(&c1),
    };
    serde_json::to_string_pretty(&doc).expect("static schema")
}

fn matrix_from_json(n: usize, rows: &[Vec<[f64; 2]>]) -> Result<Array2<C64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(invalid("matrix dimensions do not match n"));
    }
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Loads a representation (homogeneous triple) back from its JSON document.
pub fn rep_from_json(input: &str) -> Result<DetRep> {
    let raw: RepJson =
        serde_json::from_str(input).map_err(|e| invalid(format!("bad rep JSON: {}", e)))?;
    let a = matrix_from_json(raw.n, &raw.a)?;
    let b = matrix_from_json(raw.n, &raw.b)?;
    let c = matrix_from_json(raw.n, &raw.c)?;
    DetRep::from_matrices(&a, &b, &c)
}

fn flag_name(f: RootFlag) -> &'static str {
    match f {
        RootFlag::Simple => "simple",
        RootFlag::Clustered => "clustered",
        RootFlag::Unreliable => "unreliable",
    }
}

#[derive(Serialize)]
struct RootJson {
    x: [f64; 2],
    y: [f64; 2],
    residual_p: f64,
    residual_q: f64,
    condition: f64,
    flag: &'static str,
}

#[derive(Serialize)]
struct RootSetJson {
    roots: Vec<RootJson>,
    spurious_dropped: usize,
}

pub fn roots_to_json(set: &RootSet) -> String {
    let roots = set
        .roots
        .iter()
        .enumerate()
        .map(|(k, &(x, y))| RootJson {
            x: [x.re, x.im],
            y: [y.re, y.im],
            residual_p: set.residuals[k].0,
            residual_q: set.residuals[k].1,
            condition: set.condition[k],
            flag: flag_name(set.flags[k]),
        })
        .collect();
    serde_json::to_string_pretty(&RootSetJson {
        roots,
        spurious_dropped: set.spurious_dropped,
    })
    .expect("static schema")
}
