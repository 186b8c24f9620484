//! Conics as symmetric quadratic forms: factorization of degenerate conics,
//! the degeneracy cubic of a pencil, and the search for decomposable members
//! q2 - mu * l1 * l2.

use crate::error::{Error, Result};
use crate::lapack;
use crate::polycore::{HomoPoly, LinearForm, ONE, ZERO};
use crate::rootfind::{poly_roots, UnivarPoly};
use ndarray::Array2;
use num_complex::Complex64 as C64;

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// A degree-2 polynomial together with its symmetric 3x3 matrix
/// representation p2(v) = v^T M v and the singular values of M.
#[derive(Debug, Clone)]
pub struct ConicForm {
    pub matrix: [[C64; 3]; 3],
    pub source: HomoPoly,
    singular_values: Vec<f64>,
}

impl ConicForm {
    /// Numerical rank of M relative to its largest singular value.
    pub fn rank(&self, tol: f64) -> usize {
        let s1 = self.singular_values[0];
        if s1 == 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > tol * s1).count()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// v^T M v.
    pub fn quadratic_form(&self, v: [C64; 3]) -> C64 {
        let mut acc = ZERO;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                acc += v[i] * m * v[j];
            }
        }
        acc
    }
}

/// Symmetric matrix of a conic: diagonal (a20, a02, a00), off-diagonal halves
/// of the mixed coefficients.
pub fn conic_matrix(p2: &HomoPoly) -> Result<ConicForm> {
    if p2.degree() != 2 {
        return Err(Error::InvalidInput(format!(
            "conic_matrix needs degree 2, got {}",
            p2.degree()
        )));
    }
    let h = C64::new(0.5, 0.0);
    let (a20, a02, a00) = (p2.coeff(2, 0), p2.coeff(0, 2), p2.coeff(0, 0));
    let (a11, a10, a01) = (p2.coeff(1, 1), p2.coeff(1, 0), p2.coeff(0, 1));
    let matrix = [
        [a20, h * a11, h * a10],
        [h * a11, a02, h * a01],
        [h * a10, h * a01, a00],
    ];
    let mut arr = Array2::zeros((3, 3));
    for i in 0..3 {
        for j in 0..3 {
            arr[(i, j)] = matrix[i][j];
        }
    }
    let singular_values = lapack::singular_values(&arr)?;
    Ok(ConicForm {
        matrix,
        source: p2.clone(),
        singular_values,
    })
}

fn permute_form(l: &LinearForm, perm: [usize; 3]) -> LinearForm {
    // the factored polynomial was permute_vars(p, perm); undoing the
    // permutation on a linear form sets d[j] = c[perm[j]]
    let c = [l.r, l.s, l.t];
    LinearForm::new(c[perm[0]], c[perm[1]], c[perm[2]])
}

/// Square-root shortcut for rank-1 conics: p2 = l^2 with the branch of each
/// coefficient fixed by the mixed terms.
fn rank1_sqrt(p2: &HomoPoly) -> Option<(LinearForm, LinearForm)> {
    let (a20, a02, a00) = (p2.coeff(2, 0), p2.coeff(0, 2), p2.coeff(0, 0));
    let (a11, a10, a01) = (p2.coeff(1, 1), p2.coeff(1, 0), p2.coeff(0, 1));
    let scale = p2.norm();
    let big = |c: C64| c.norm() > 1e-10 * scale;
    let (r, s, t);
    if big(a20) {
        r = a20.sqrt();
        s = a11 / (2.0 * r);
        t = a10 / (2.0 * r);
    } else if big(a02) {
        r = ZERO;
        s = a02.sqrt();
        t = a01 / (2.0 * s);
    } else if big(a00) {
        r = ZERO;
        s = ZERO;
        t = a00.sqrt();
    } else {
        return None;
    }
    let l = LinearForm::new(r, s, t);
    let residual = l.to_poly().mul(&l.to_poly()).sub(p2).norm();
    if residual <= 1e-8 * scale {
        Some((l, l))
    } else {
        None
    }
}

/// Splits a degenerate conic into two linear factors, p2 = l1 * l2.
///
/// When the diagonal coefficients (a00, a20, a02) are not all zero the
/// factors come from the two restriction-root pairs with the pairing fixed
/// by the yz coefficient; otherwise p2 = a10 xz + a01 yz + a11 xy with one
/// mixed coefficient forced to vanish by singularity, and permuting it into
/// the xz slot splits off the factor y directly.
pub fn factor_degenerate_conic(p2: &HomoPoly) -> Result<(LinearForm, LinearForm)> {
    factor_degenerate_conic_tol(p2, DEFAULT_RANK_TOL)
}

pub fn factor_degenerate_conic_tol(
    p2: &HomoPoly,
    rank_tol: f64,
) -> Result<(LinearForm, LinearForm)> {
    let scale = p2.norm();
    if scale == 0.0 {
        return Err(Error::ZeroConic);
    }
    let form = conic_matrix(p2)?;
    let rank = form.rank(rank_tol);
    if rank == 3 {
        return Err(Error::NotDecomposable);
    }
    if rank <= 1 {
        if let Some(pair) = rank1_sqrt(p2) {
            return Ok(pair);
        }
    }

    let diag = [p2.coeff(0, 0), p2.coeff(2, 0), p2.coeff(0, 2)];
    if diag.iter().any(|c| c.norm() > 1e-12 * scale) {
        // move the largest of the three square coefficients into the x^2 slot
        let squares = [p2.coeff(2, 0), p2.coeff(0, 2), p2.coeff(0, 0)];
        let best = (0..3)
            .max_by(|&a, &b| squares[a].norm().total_cmp(&squares[b].norm()))
            .unwrap();
        let perm = match best {
            0 => [0, 1, 2],
            1 => [1, 0, 2], // swap x and y
            _ => [2, 1, 0], // swap x and z
        };
        let q = p2.permute_vars(perm);
        let a20 = q.coeff(2, 0);
        let alpha = poly_roots(&UnivarPoly::new(vec![q.coeff(0, 2), q.coeff(1, 1), a20]))?;
        let mut beta = poly_roots(&UnivarPoly::new(vec![q.coeff(0, 0), q.coeff(1, 0), a20]))?;
        if alpha.len() != 2 || beta.len() != 2 {
            return Err(Error::NotDecomposable);
        }
        // the factorization a20 (x - a1 y - b1 z)(x - a2 y - b2 z) has
        // yz coefficient a20 (a1 b2 + a2 b1); pick the pairing matching a01
        let a01 = q.coeff(0, 1);
        let cross = (a01 - a20 * (alpha[0] * beta[1] + alpha[1] * beta[0])).norm();
        let same = (a01 - a20 * (alpha[0] * beta[0] + alpha[1] * beta[1])).norm();
        if same < cross {
            beta.swap(0, 1);
        }
        let l1 = LinearForm::line_factor(alpha[0], beta[0]).scale(a20);
        let l2 = LinearForm::line_factor(alpha[1], beta[1]);
        return Ok((permute_form(&l1, perm), permute_form(&l2, perm)));
    }

    // all squares vanish: p2 = a10 xz + a01 yz + a11 xy; singularity forces
    // one mixed coefficient to zero, permute it into the xz slot
    let mixed = [p2.coeff(1, 0), p2.coeff(1, 1), p2.coeff(0, 1)]; // xz, xy, yz
    let smallest = (0..3)
        .min_by(|&a, &b| mixed[a].norm().total_cmp(&mixed[b].norm()))
        .unwrap();
    let perm = match smallest {
        0 => [0, 1, 2],
        1 => [0, 2, 1], // xy -> xz: swap y and z
        _ => [1, 0, 2], // yz -> xz: swap x and y
    };
    let q = p2.permute_vars(perm);
    let l1 = LinearForm::new(ZERO, ONE, ZERO);
    let l2 = LinearForm::new(q.coeff(1, 1), ZERO, q.coeff(0, 1));
    Ok((permute_form(&l1, perm), permute_form(&l2, perm)))
}

fn det3(m: &[[C64; 3]; 3]) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn mat_norm(m: &[[C64; 3]; 3]) -> f64 {
    m.iter()
        .flatten()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Coefficients [c3, c2, c1, c0] of det(s X + t Y) = c3 s^3 + c2 s^2 t +
/// c1 s t^2 + c0 t^3, by exact column-replacement expansion.
fn pencil_cubic(x: &[[C64; 3]; 3], y: &[[C64; 3]; 3]) -> [C64; 4] {
    let pick = |cols: [&[[C64; 3]; 3]; 3]| -> C64 {
        let m: [[C64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i][j]));
        det3(&m)
    };
    let c3 = pick([x, x, x]);
    let c2 = pick([y, x, x]) + pick([x, y, x]) + pick([x, x, y]);
    let c1 = pick([x, y, y]) + pick([y, x, y]) + pick([y, y, x]);
    let c0 = pick([y, y, y]);
    [c3, c2, c1, c0]
}

/// Coefficients of det(s * 2Mp + t * 2Mq) as a cubic in (s, t), highest
/// s-power first.
pub fn pencil_degeneracy_cubic(p2: &ConicForm, q2: &ConicForm) -> [C64; 4] {
    let two = C64::new(2.0, 0.0);
    let x: [[C64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| two * p2.matrix[i][j]));
    let y: [[C64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| two * q2.matrix[i][j]));
    pencil_cubic(&x, &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilKind {
    /// Three distinct degenerate members (generic pencil).
    ThreeDistinct,
    /// Exactly two degenerate members, one of multiplicity two.
    RepeatedDegenerate,
    /// The degeneracy cubic is a nonzero perfect cube: a single degenerate
    /// member (tangency situation).
    SingleDegenerate,
    /// Every member of the pencil is degenerate.
    IdenticallyDegenerate,
}

#[derive(Debug, Clone)]
pub struct PencilClass {
    pub kind: PencilKind,
    pub degeneracy_cubic: [C64; 4],
    /// Projective (s, t) parameters of the degenerate members.
    pub roots: Vec<(C64, C64)>,
}

fn projective_distance(a: (C64, C64), b: (C64, C64)) -> f64 {
    let na = (a.0.norm_sqr() + a.1.norm_sqr()).sqrt();
    let nb = (b.0.norm_sqr() + b.1.norm_sqr()).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.0 * b.1 - b.0 * a.1).norm() / (na * nb)
}

/// Projective roots (s, t) of the homogeneous cubic c3 s^3 + ... + c0 t^3,
/// including roots at infinity (t = 0) for vanishing leading coefficients.
fn homogeneous_cubic_roots(cubic: &[C64; 4], scale: f64) -> Result<Vec<(C64, C64)>> {
    // polynomial in lambda = s / t, ascending
    let mut coeffs = vec![cubic[3], cubic[2], cubic[1], cubic[0]];
    let mut at_infinity = 0usize;
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= 1e-10 * scale {
        coeffs.pop();
        at_infinity += 1;
    }
    let u = UnivarPoly::new(coeffs);
    let mut roots: Vec<(C64, C64)> = if u.trimmed_degree() == 0 {
        vec![]
    } else {
        poly_roots(&u)?.into_iter().map(|l| (l, ONE)).collect()
    };
    for _ in 0..at_infinity {
        roots.push((ONE, ZERO));
    }
    Ok(roots)
}

const CLUSTER_TOL: f64 = 1e-6;

/// Classifies the pencil s p2 + t q2 by its degeneracy cubic.
pub fn classify_pencil(p2: &ConicForm, q2: &ConicForm) -> Result<PencilClass> {
    let degeneracy_cubic = pencil_degeneracy_cubic(p2, q2);
    let two = 2.0;
    let np = two * mat_norm(&p2.matrix);
    let nq = two * mat_norm(&q2.matrix);
    // each coefficient scales as |X|^k |Y|^(3-k)
    let scales = [np * np * np, np * np * nq, np * nq * nq, nq * nq * nq];
    let all_zero = degeneracy_cubic
        .iter()
        .zip(scales)
        .all(|(c, s)| c.norm() <= 1e-10 * s.max(f64::MIN_POSITIVE));
    if all_zero {
        return Ok(PencilClass {
            kind: PencilKind::IdenticallyDegenerate,
            degeneracy_cubic,
            roots: vec![],
        });
    }
    let scale = degeneracy_cubic
        .iter()
        .zip(scales)
        .map(|(c, s)| if s > 0.0 { c.norm() } else { 0.0 })
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let roots = homogeneous_cubic_roots(&degeneracy_cubic, scale)?;
    let mut close_pairs = 0;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if projective_distance(roots[i], roots[j]) < CLUSTER_TOL {
                close_pairs += 1;
            }
        }
    }
    let kind = match close_pairs {
        0 => PencilKind::ThreeDistinct,
        1 => PencilKind::RepeatedDegenerate,
        _ => PencilKind::SingleDegenerate,
    };
    Ok(PencilClass {
        kind,
        degeneracy_cubic,
        roots,
    })
}

/// All finite mu with q2 - mu * l1 * l2 decomposable.
///
/// The member at mu = infinity (the line pair itself) contributes a
/// structurally-zero leading coefficient which is deflated rather than
/// divided out; an empty result signals that the line pair is the only
/// degenerate member of the pencil (tangency obstruction).
pub fn find_mu(q2: &HomoPoly, line1: &LinearForm, line2: &LinearForm) -> Result<Vec<C64>> {
    let n = line1.to_poly().mul(&line2.to_poly());
    let qf = conic_matrix(q2)?;
    let nf = conic_matrix(&n)?;
    let two = C64::new(2.0, 0.0);
    let x: [[C64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| two * qf.matrix[i][j]));
    let y: [[C64; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| -two * nf.matrix[i][j]));
    let [c3, c2, c1, c0] = pencil_cubic(&x, &y);
    // det(2Mq + mu * (-2Mn)) as a polynomial in mu: [c3, c2, c1, c0]
    // ascending; the mu^3 coefficient is det(-2Mn) = 0 since the line pair
    // is degenerate
    let mut coeffs = vec![c3, c2, c1];
    debug_assert!(c0.norm() <= 1e-8 * (mat_norm(&y).powi(3)).max(f64::MIN_POSITIVE));
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Ok(vec![]);
    }
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= 1e-9 * scale {
        coeffs.pop();
    }
    let u = UnivarPoly::new(coeffs);
    if u.trimmed_degree() == 0 {
        return Ok(vec![]);
    }
    poly_roots(&u)
}
