//! Roots of univariate complex polynomials via the companion matrix, plus the
//! line-restriction roots `p(alpha,1,0)` and `p(beta,0,1)` used by every
//! construction.

use crate::error::{Error, Result};
use crate::lapack;
use crate::polycore::{HomoPoly, ONE, ZERO};
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Dense univariate polynomial, coefficients ascending: c0 + c1 x + ... + cd x^d.
#[derive(Debug, Clone)]
pub struct UnivarPoly {
    coeffs: Vec<C64>,
}

impl UnivarPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        UnivarPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Degree after dropping numerically-zero leading coefficients.
    pub fn trimmed_degree(&self) -> usize {
        let mut d = self.coeffs.len().saturating_sub(1);
        while d > 0 && self.coeffs[d].norm() == 0.0 {
            d -= 1;
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn evaluate(&self, x: C64) -> C64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative_at(&self, x: C64) -> C64 {
        let mut acc = ZERO;
        for (k, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + c * C64::new(k as f64, 0.0);
        }
        acc
    }
}

fn quadratic_roots(c0: C64, c1: C64, c2: C64) -> [C64; 2] {
    // sign-adapted to avoid cancellation in b + sgn*sqrt(disc)
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    let sgn = if (c1.conj() * disc).re < 0.0 { -1.0 } else { 1.0 };
    let q = -0.5 * (c1 + sgn * disc);
    let r1 = q / c2;
    let r2 = if q.norm() > 0.0 { c0 / q } else { ZERO };
    [r1, r2]
}

/// All `d` roots (with multiplicity) of a trimmed-degree-d polynomial.
///
/// Companion-matrix eigenvalues of the monic normalization followed by one
/// Newton polishing pass per root.
pub fn poly_roots(u: &UnivarPoly) -> Result<Vec<C64>> {
    if u.is_zero() {
        return Err(Error::DegenerateInput);
    }
    let d = u.trimmed_degree();
    if d == 0 {
        return Ok(vec![]);
    }
    let c = &u.coeffs()[..=d];
    let lead = c[d];
    let mut roots = match d {
        1 => vec![-c[0] / c[1]],
        2 => quadratic_roots(c[0], c[1], c[2]).to_vec(),
        _ => {
            let mut comp: Array2<C64> = Array2::zeros((d, d));
            for i in 1..d {
                comp[(i, i - 1)] = ONE;
            }
            for i in 0..d {
                comp[(i, d - 1)] = -c[i] / lead;
            }
            lapack::eigvals(&comp)?
        }
    };
    // one Newton step per root
    for r in roots.iter_mut() {
        let dp = u.derivative_at(*r);
        if dp.norm() > 1e-300 {
            let step = u.evaluate(*r) / dp;
            if step.norm() < 1.0 + r.norm() {
                *r -= step;
            }
        }
    }
    Ok(roots)
}

/// Coefficients of the restriction p(t, 1, 0) (ascending in t).
pub fn restriction_z0(p: &HomoPoly) -> UnivarPoly {
    let n = p.degree();
    UnivarPoly::new((0..=n).map(|i| p.coeff(i, n - i)).collect())
}

/// Coefficients of the restriction p(t, 0, 1) (ascending in t).
pub fn restriction_y0(p: &HomoPoly) -> UnivarPoly {
    let n = p.degree();
    UnivarPoly::new((0..=n).map(|i| p.coeff(i, 0)).collect())
}

/// Roots of p(alpha,1,0) and p(beta,0,1), both of length n.
///
/// Requires |a_n0| above 1e-12 * ||p||; the error tells the caller to rotate
/// coordinates first.
pub fn restriction_roots(p: &HomoPoly) -> Result<(Vec<C64>, Vec<C64>)> {
    let n = p.degree();
    let lead = p.coeff(n, 0);
    if lead.norm() <= 1e-12 * p.norm() {
        return Err(Error::NearZeroLeadingCoefficient);
    }
    let alpha = poly_roots(&restriction_z0(p))?;
    let beta = poly_roots(&restriction_y0(p))?;
    debug_assert_eq!(alpha.len(), n);
    debug_assert_eq!(beta.len(), n);
    Ok((alpha, beta))
}

/// Greedy nearest-neighbor matching distance between two root multisets.
#[cfg(test)]
pub fn match_roots(a: &[C64], b: &[C64]) -> f64 {
    let mut remaining: Vec<C64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for &x in a {
        let (k, d) = remaining
            .iter()
            .enumerate()
            .map(|(k, &y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        worst = worst.max(d);
        remaining.swap_remove(k);
    }
    worst
}
