//! The core reduction p_n - a_n0 prod(x - a_j y - b_j z) = yz q_{n-2}, its
//! tangent-line variant for a_n0 = 0, and the root-ordering policies used by
//! the constructions.

use crate::error::{Error, Result};
use crate::polycore::{HomoPoly, LinearForm, ProjectivePoint};
use crate::rootfind::{poly_roots, restriction_roots, UnivarPoly};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub enum LeadingTerm {
    /// a_n0, multiplying a product of n diagonal factors.
    Scalar(C64),
    /// The tangent form a_{n-1,1} y + a_{n-1,0} z, multiplying a product of
    /// n - 1 diagonal factors.
    TangentForm(LinearForm),
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    pub leading: LeadingTerm,
    pub q: HomoPoly,
}

impl Reduction {
    /// The subtracted product: leading term times the diagonal line factors.
    pub fn product_poly(&self) -> HomoPoly {
        let mut prod = match &self.leading {
            LeadingTerm::Scalar(a) => HomoPoly::constant(*a),
            LeadingTerm::TangentForm(l) => l.to_poly(),
        };
        for (&a, &b) in self.alpha.iter().zip(&self.beta) {
            prod = prod.mul(&LinearForm::line_factor(a, b).to_poly());
        }
        prod
    }
}

const DIVISION_TOL: f64 = 1e-7;

/// Divides `diff` by yz after checking that every y-free and z-free monomial
/// is numerically zero.
fn divide_by_yz(diff: &HomoPoly, scale: f64) -> Result<HomoPoly> {
    let n = diff.degree();
    let mut q = HomoPoly::zero(n - 2);
    for (i, j, c) in diff.terms() {
        let k = n - i - j;
        if j == 0 || k == 0 {
            if c.norm() > DIVISION_TOL * scale {
                return Err(Error::ReductionResidual);
            }
        } else {
            q.set(i, j - 1, c);
        }
    }
    Ok(q)
}

/// Reduction with a caller-supplied pairing/ordering of the roots.
pub fn reduce_with_roots(p: &HomoPoly, alpha: &[C64], beta: &[C64]) -> Result<Reduction> {
    let n = p.degree();
    let a_n0 = p.coeff(n, 0);
    let mut red = Reduction {
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        leading: LeadingTerm::Scalar(a_n0),
        q: HomoPoly::zero(n - 2),
    };
    let diff = p.sub(&red.product_poly());
    red.q = divide_by_yz(&diff, p.norm())?;
    Ok(red)
}

/// Standard reduction of Lemma-style form: alpha and beta from the line
/// restrictions, arbitrary pairing.
pub fn reduce(p: &HomoPoly) -> Result<Reduction> {
    let (alpha, beta) = restriction_roots(p)?;
    reduce_with_roots(p, &alpha, &beta)
}

/// Tangent-variant reduction for a_n0 = 0 with (1, 0, 0) a smooth point of
/// the curve and a tangent that is not a coordinate line.
pub fn reduce_tangent(p: &HomoPoly) -> Result<Reduction> {
    let n = p.degree();
    let scale = p.norm();
    let a_n0 = p.coeff(n, 0);
    if a_n0.norm() > 1e-8 * scale {
        return Err(Error::InvalidInput(
            "tangent reduction needs a vanishing leading coefficient".into(),
        ));
    }
    // gradient at (1,0,0) is (n a_n0, a_{n-1,1}, a_{n-1,0})
    let ty = p.coeff(n - 1, 1);
    let tz = p.coeff(n - 1, 0);
    if ty.norm() <= 1e-10 * scale && tz.norm() <= 1e-10 * scale {
        return Err(Error::SingularPoint);
    }
    if ty.norm() <= 1e-10 * scale || tz.norm() <= 1e-10 * scale {
        return Err(Error::TangentIsCoordinateLine);
    }
    // restrictions drop one degree: p(a,1,0) has leading coefficient
    // a_{n-1,1}, p(b,0,1) has leading coefficient a_{n-1,0}
    let alpha = poly_roots(&UnivarPoly::new(
        (0..n).map(|i| p.coeff(i, n - i)).collect(),
    ))?;
    let beta = poly_roots(&UnivarPoly::new((0..n).map(|i| p.coeff(i, 0)).collect()))?;
    if alpha.len() != n - 1 || beta.len() != n - 1 {
        return Err(Error::ReductionResidual);
    }
    let mut red = Reduction {
        alpha,
        beta,
        leading: LeadingTerm::TangentForm(LinearForm::new(C64::new(0.0, 0.0), ty, tz)),
        q: HomoPoly::zero(n - 2),
    };
    let diff = p.sub(&red.product_poly());
    red.q = divide_by_yz(&diff, scale)?;
    Ok(red)
}

/// Degree-2 reduction choosing the beta pairing with the smaller |q0|.
pub fn order_for_min_q0(p2: &HomoPoly) -> Result<Reduction> {
    let (alpha, beta) = restriction_roots(p2)?;
    let straight = reduce_with_roots(p2, &alpha, &beta)?;
    let swapped = reduce_with_roots(p2, &alpha, &[beta[1], beta[0]])?;
    if swapped.q.coeff(0, 0).norm() < straight.q.coeff(0, 0).norm() {
        Ok(swapped)
    } else {
        Ok(straight)
    }
}

/// Degree-3 reduction minimizing ||q1|| over the 6 pairings of beta against
/// a fixed alpha order; decomposable cubics end up with q1 near zero.
pub fn order_for_decomposable_cubic(p3: &HomoPoly) -> Result<Reduction> {
    let (alpha, beta) = restriction_roots(p3)?;
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut best: Option<Reduction> = None;
    for perm in perms {
        let b: Vec<C64> = perm.iter().map(|&k| beta[k]).collect();
        let red = reduce_with_roots(p3, &alpha, &b)?;
        let better = match &best {
            None => true,
            Some(r) => red.q.norm() < r.q.norm(),
        };
        if better {
            best = Some(red);
        }
    }
    Ok(best.unwrap())
}

/// Reorders a quartic reduction so the slot-3 roots have minimal modulus,
/// which keeps the variable shift x -> x + a3 y + b3 z well conditioned.
pub fn order_for_quartic(p4: &HomoPoly, red: &Reduction) -> Result<Reduction> {
    let pick_min = |v: &[C64]| -> Vec<C64> {
        let k = (0..v.len())
            .min_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
            .unwrap();
        let mut out: Vec<C64> = v
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &c)| c)
            .collect();
        out.insert(2, v[k]);
        out
    };
    let alpha = pick_min(&red.alpha);
    let beta = pick_min(&red.beta);
    reduce_with_roots(p4, &alpha, &beta)
}

/// The intersection point of the lines x - a3 y - b3 z = 0 and
/// x - a4 y - b4 z = 0.
pub fn intersection_34(a3: C64, b3: C64, a4: C64, b4: C64) -> ProjectivePoint {
    ProjectivePoint::new(a3 * b4 - a4 * b3, b4 - b3, a3 - a4)
}

fn place_pair(v: &[C64], i: usize, j: usize) -> Vec<C64> {
    let mut rest: Vec<C64> = v
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i && k != j)
        .map(|(_, &c)| c)
        .collect();
    rest.insert(2, v[i]);
    rest.insert(3, v[j]);
    rest
}

fn pair_ok(p5: &HomoPoly, a3: C64, b3: C64, a4: C64, b4: C64) -> bool {
    let ascale = 1.0 + a3.norm().max(a4.norm());
    let bscale = 1.0 + b3.norm().max(b4.norm());
    if (a3 - a4).norm() <= 1e-8 * ascale || (b3 - b4).norm() <= 1e-8 * bscale {
        return false;
    }
    let v = intersection_34(a3, b3, a4, b4).normalized();
    let val = p5.evaluate(v.x, v.y, v.z);
    val.norm() > 1e-8 * p5.norm()
}

/// Moves a valid (slot 3, slot 4) root pair into place for the quintic
/// construction: distinct alphas, distinct betas, and the line intersection
/// off the curve.
///
/// Joint permutations of the (alpha, beta) pairs are tried first (these keep
/// q3 unchanged); if none is valid the pairing itself is re-shuffled and q3
/// re-derived. Candidates are scanned in decreasing
/// |a_i - a_j| * |b_i - b_j| to keep the change of variables well
/// conditioned.
pub fn choose_pair_34(p5: &HomoPoly, red: &Reduction) -> Result<Reduction> {
    let n = red.alpha.len();
    debug_assert_eq!(n, 5);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let score = |&(i, j): &(usize, usize)| -> f64 {
        (red.alpha[i] - red.alpha[j]).norm() * (red.beta[i] - red.beta[j]).norm()
    };
    pairs.sort_by(|a, b| score(b).total_cmp(&score(a)));

    for &(i, j) in &pairs {
        if pair_ok(p5, red.alpha[i], red.beta[i], red.alpha[j], red.beta[j]) {
            let alpha = place_pair(&red.alpha, i, j);
            let beta = place_pair(&red.beta, i, j);
            return Ok(Reduction {
                alpha,
                beta,
                leading: red.leading.clone(),
                q: red.q.clone(),
            });
        }
    }
    // re-pair alpha against beta independently
    for &(i, j) in &pairs {
        for &(k, l) in &pairs {
            if !pair_ok(p5, red.alpha[i], red.beta[k], red.alpha[j], red.beta[l]) {
                continue;
            }
            let alpha = place_pair(&red.alpha, i, j);
            let mut beta_rest: Vec<C64> = red
                .beta
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k && m != l)
                .map(|(_, &c)| c)
                .collect();
            beta_rest.insert(2, red.beta[k]);
            beta_rest.insert(3, red.beta[l]);
            return reduce_with_roots(p5, &alpha, &beta_rest);
        }
    }
    Err(Error::NeedsRotation)
}
