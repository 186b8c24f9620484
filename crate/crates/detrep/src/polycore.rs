//! Homogeneous bivariate polynomials, evaluation, and projective changes of
//! coordinates.
//!
//! A degree-n form is stored as the dense coefficient triangle `a_{ij}` of
//! `x^i y^j z^{n-i-j}` for `i + j <= n`. Degrees in this crate never exceed 5,
//! so dense storage costs nothing. All scalars are complex doubles: roots of
//! the restriction polynomials are not necessarily real even for real input.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Homogeneous polynomial of degree `n` in (x, y, z).
#[derive(Debug, Clone, PartialEq)]
pub struct HomoPoly {
    degree: usize,
    coeffs: Vec<C64>,
}

/// Number of coefficients of a degree-n triangle.
pub fn triangle_len(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

impl HomoPoly {
    pub fn zero(degree: usize) -> Self {
        HomoPoly {
            degree,
            coeffs: vec![ZERO; triangle_len(degree)],
        }
    }

    pub fn new(degree: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != triangle_len(degree) {
            return Err(Error::InvalidInput(format!(
                "degree {} needs {} coefficients, got {}",
                degree,
                triangle_len(degree),
                coeffs.len()
            )));
        }
        Ok(HomoPoly { degree, coeffs })
    }

    pub fn constant(c: C64) -> Self {
        HomoPoly {
            degree: 0,
            coeffs: vec![c],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Index of a_{ij} inside the triangle, rows by increasing i.
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + j <= self.degree);
        // row i starts after rows 0..i of lengths (n+1), n, ...
        let n = self.degree;
        i * (n + 1) - i * (i.saturating_sub(1)) / 2 + j
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        self.coeffs[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let k = self.idx(i, j);
        self.coeffs[k] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: C64) {
        let k = self.idx(i, j);
        self.coeffs[k] += v;
    }

    /// Iterate (i, j, a_{ij}).
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let n = self.degree;
        (0..=n).flat_map(move |i| (0..=n - i).map(move |j| (i, j, self.coeff(i, j))))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every top-degree coefficient vanishes, i.e. the affine
    /// dehomogenization has degree < n.
    pub fn is_deficient(&self) -> bool {
        let n = self.degree;
        let scale = self.max_coeff();
        (0..=n).all(|i| self.coeff(i, n - i).norm() <= 1e-14 * scale)
    }

    pub fn evaluate(&self, x: C64, y: C64, z: C64) -> C64 {
        let n = self.degree;
        // power tables keep this O(n^2) instead of recomputing powi per term
        let mut xp = vec![ONE; n + 1];
        let mut yp = vec![ONE; n + 1];
        let mut zp = vec![ONE; n + 1];
        for k in 1..=n {
            xp[k] = xp[k - 1] * x;
            yp[k] = yp[k - 1] * y;
            zp[k] = zp[k - 1] * z;
        }
        let mut acc = ZERO;
        for (i, j, a) in self.terms() {
            if a != ZERO {
                acc += a * xp[i] * yp[j] * zp[n - i - j];
            }
        }
        acc
    }

    pub fn evaluate_at(&self, v: &ProjectivePoint) -> C64 {
        self.evaluate(v.x, v.y, v.z)
    }

    pub fn scale(&self, s: C64) -> HomoPoly {
        HomoPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &HomoPoly) -> HomoPoly {
        assert_eq!(self.degree, other.degree);
        HomoPoly {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &HomoPoly) -> HomoPoly {
        assert_eq!(self.degree, other.degree);
        HomoPoly {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &HomoPoly) -> HomoPoly {
        let mut out = HomoPoly::zero(self.degree + other.degree);
        for (i, j, a) in self.terms() {
            if a == ZERO {
                continue;
            }
            for (k, l, b) in other.terms() {
                if b != ZERO {
                    out.add_to(i + k, j + l, a * b);
                }
            }
        }
        out
    }

    /// `self` composed with the substitution `(x,y,z) -> T (x,y,z)`:
    /// the result satisfies `result(v) = self(T v)`.
    pub fn apply_transform(&self, t: &ProjectiveTransform) -> HomoPoly {
        let n = self.degree;
        let rows: Vec<LinearForm> = (0..3)
            .map(|r| LinearForm::new(t.matrix[r][0], t.matrix[r][1], t.matrix[r][2]))
            .collect();
        // powers of the three substituted linear forms
        let pow = |lf: &LinearForm| -> Vec<HomoPoly> {
            let base = lf.to_poly();
            let mut v = vec![HomoPoly::constant(ONE)];
            for k in 1..=n {
                v.push(v[k - 1].mul(&base));
            }
            v
        };
        let xp = pow(&rows[0]);
        let yp = pow(&rows[1]);
        let zp = pow(&rows[2]);
        let mut out = HomoPoly::zero(n);
        for (i, j, a) in self.terms() {
            if a == ZERO {
                continue;
            }
            let term = xp[i].mul(&yp[j]).mul(&zp[n - i - j]).scale(a);
            out = out.add(&term);
        }
        out
    }

    /// Permute variables: result(w0,w1,w2) = self(w_{perm[0]}, w_{perm[1]}, w_{perm[2]}).
    pub fn permute_vars(&self, perm: [usize; 3]) -> HomoPoly {
        let n = self.degree;
        let mut out = HomoPoly::zero(n);
        for (i, j, a) in self.terms() {
            if a == ZERO {
                continue;
            }
            let e = [i, j, n - i - j];
            let mut f = [0usize; 3];
            for v in 0..3 {
                f[perm[v]] += e[v];
            }
            out.add_to(f[0], f[1], a);
        }
        out
    }

    /// Affine slice `p(x, y, 1)`; exact coefficientwise inverse of `homogenize`.
    pub fn dehomogenize(&self) -> AffinePoly {
        let mut out = AffinePoly::zero(self.degree);
        for (i, j, a) in self.terms() {
            out.set(i, j, a);
        }
        out
    }
}

/// Bivariate polynomial `sum p_{ij} x^i y^j`, `i + j <= degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoly {
    degree: usize,
    coeffs: Vec<C64>,
}

impl AffinePoly {
    pub fn zero(degree: usize) -> Self {
        AffinePoly {
            degree,
            coeffs: vec![ZERO; triangle_len(degree)],
        }
    }

    pub fn new(degree: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != triangle_len(degree) {
            return Err(Error::InvalidInput(format!(
                "degree {} needs {} coefficients, got {}",
                degree,
                triangle_len(degree),
                coeffs.len()
            )));
        }
        Ok(AffinePoly { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let n = self.degree;
        i * (n + 1) - i * (i.saturating_sub(1)) / 2 + j
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        self.coeffs[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let k = self.idx(i, j);
        self.coeffs[k] = v;
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let n = self.degree;
        (0..=n).flat_map(move |i| (0..=n - i).map(move |j| (i, j, self.coeff(i, j))))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn evaluate(&self, x: C64, y: C64) -> C64 {
        let n = self.degree;
        let mut xp = vec![ONE; n + 1];
        let mut yp = vec![ONE; n + 1];
        for k in 1..=n {
            xp[k] = xp[k - 1] * x;
            yp[k] = yp[k - 1] * y;
        }
        let mut acc = ZERO;
        for (i, j, a) in self.terms() {
            if a != ZERO {
                acc += a * xp[i] * yp[j];
            }
        }
        acc
    }

    /// Partial derivatives (p_x, p_y) at a point; used by Newton polishing
    /// and the root condition number.
    pub fn gradient(&self, x: C64, y: C64) -> (C64, C64) {
        let n = self.degree;
        let mut xp = vec![ONE; n + 1];
        let mut yp = vec![ONE; n + 1];
        for k in 1..=n {
            xp[k] = xp[k - 1] * x;
            yp[k] = yp[k - 1] * y;
        }
        let mut dx = ZERO;
        let mut dy = ZERO;
        for (i, j, a) in self.terms() {
            if a == ZERO {
                continue;
            }
            if i > 0 {
                dx += a * C64::new(i as f64, 0.0) * xp[i - 1] * yp[j];
            }
            if j > 0 {
                dy += a * C64::new(j as f64, 0.0) * xp[i] * yp[j - 1];
            }
        }
        (dx, dy)
    }
}

/// `z^n p(x/z, y/z)`.
pub fn homogenize(q: &AffinePoly) -> Result<HomoPoly> {
    if q.degree == 0 || q.norm() == 0.0 {
        return Err(Error::DegenerateInput);
    }
    let mut out = HomoPoly::zero(q.degree);
    for (i, j, a) in q.terms() {
        out.set(i, j, a);
    }
    Ok(out)
}

/// Point of the complex projective plane; equality is modulo nonzero scaling.
#[derive(Debug, Clone, Copy)]
pub struct ProjectivePoint {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl ProjectivePoint {
    pub fn new(x: C64, y: C64, z: C64) -> Self {
        ProjectivePoint { x, y, z }
    }

    /// Scale so the largest-modulus coordinate is 1.
    pub fn normalized(&self) -> ProjectivePoint {
        let coords = [self.x, self.y, self.z];
        let (k, _) = coords
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        let d = coords[k];
        if d.norm() == 0.0 {
            return *self;
        }
        ProjectivePoint::new(self.x / d, self.y / d, self.z / d)
    }

    pub fn approx_eq(&self, other: &ProjectivePoint, tol: f64) -> bool {
        let a = self.normalized();
        let b = other.normalized();
        (a.x - b.x).norm() <= tol && (a.y - b.y).norm() <= tol && (a.z - b.z).norm() <= tol
    }
}

/// Invertible projective change of coordinates with cached inverse.
#[derive(Debug, Clone)]
pub struct ProjectiveTransform {
    pub matrix: [[C64; 3]; 3],
    pub inverse: [[C64; 3]; 3],
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

impl ProjectiveTransform {
    pub fn new(matrix: [[C64; 3]; 3]) -> Result<Self> {
        let d = det3(&matrix);
        let scale = mat_norm(&matrix);
        if d.norm() <= 1e-14 * scale.powi(3).max(f64::MIN_POSITIVE) {
            return Err(Error::SingularTransform);
        }
        // adjugate / det
        let m = &matrix;
        let cof = |r1: usize, r2: usize, c1: usize, c2: usize| {
            m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]
        };
        let inverse = [
            [cof(1, 2, 1, 2) / d, -cof(0, 2, 1, 2) / d, cof(0, 1, 1, 2) / d],
            [-cof(1, 2, 0, 2) / d, cof(0, 2, 0, 2) / d, -cof(0, 1, 0, 2) / d],
            [cof(1, 2, 0, 1) / d, -cof(0, 2, 0, 1) / d, cof(0, 1, 0, 1) / d],
        ];
        Ok(ProjectiveTransform { matrix, inverse })
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        ProjectiveTransform {
            matrix: m,
            inverse: m,
        }
    }

    pub fn inverted(&self) -> ProjectiveTransform {
        ProjectiveTransform {
            matrix: self.inverse,
            inverse: self.matrix,
        }
    }

    pub fn apply(&self, v: &ProjectivePoint) -> ProjectivePoint {
        let m = &self.matrix;
        ProjectivePoint::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    /// self AFTER other: (self ∘ other)(v) = self.matrix * other.matrix * v.
    pub fn compose(&self, other: &ProjectiveTransform) -> ProjectiveTransform {
        let mut m = [[ZERO; 3]; 3];
        let mut inv = [[ZERO; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                for k in 0..3 {
                    m[r][c] += self.matrix[r][k] * other.matrix[k][c];
                    inv[r][c] += other.inverse[r][k] * self.inverse[k][c];
                }
            }
        }
        ProjectiveTransform {
            matrix: m,
            inverse: inv,
        }
    }

    /// Rotation of (x, y) around z by angle phi.
    pub fn rotation_z(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let (cc, ss) = (C64::new(c, 0.0), C64::new(s, 0.0));
        ProjectiveTransform::new([[cc, ss, ZERO], [-ss, cc, ZERO], [ZERO, ZERO, ONE]]).unwrap()
    }

    /// Rotation of (y, z) around x by angle phi.
    pub fn rotation_x(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let (cc, ss) = (C64::new(c, 0.0), C64::new(s, 0.0));
        ProjectiveTransform::new([[ONE, ZERO, ZERO], [ZERO, cc, ss], [ZERO, -ss, cc]]).unwrap()
    }
}

/// Axis of a planar coordinate rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationAxis {
    XAxis,
    ZAxis,
}

/// Seeded pseudo-random rotation around the requested axis.
pub fn random_rotation(axis: RotationAxis, seed: u64) -> ProjectiveTransform {
    let mut rng = SplitMix64::new(seed);
    let phi = rng.next_f64() * std::f64::consts::TAU;
    match axis {
        RotationAxis::ZAxis => ProjectiveTransform::rotation_z(phi),
        RotationAxis::XAxis => ProjectiveTransform::rotation_x(phi),
    }
}

/// Seeded random real orthogonal 3x3 transform (Gram-Schmidt on Gaussian
/// columns). Used when |a_n0| is small relative to the largest coefficient.
pub fn random_orthogonal(seed: u64) -> ProjectiveTransform {
    let mut rng = SplitMix64::new(seed);
    loop {
        let mut cols = [[0.0f64; 3]; 3];
        for col in cols.iter_mut() {
            for x in col.iter_mut() {
                *x = rng.next_gaussian();
            }
        }
        let mut q = [[0.0f64; 3]; 3];
        let mut ok = true;
        for c in 0..3 {
            let mut v = cols[c];
            for p in 0..c {
                let dot: f64 = (0..3).map(|r| v[r] * q[p][r]).sum();
                for r in 0..3 {
                    v[r] -= dot * q[p][r];
                }
            }
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-6 {
                ok = false;
                break;
            }
            for r in 0..3 {
                q[c][r] = v[r] / n;
            }
        }
        if !ok {
            continue;
        }
        let m: [[C64; 3]; 3] = std::array::from_fn(|r| {
            std::array::from_fn(|c| C64::new(q[c][r], 0.0))
        });
        return ProjectiveTransform::new(m).unwrap();
    }
}

/// Homogeneous linear polynomial r x + s y + t z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearForm {
    pub r: C64,
    pub s: C64,
    pub t: C64,
}

impl LinearForm {
    pub fn new(r: C64, s: C64, t: C64) -> Self {
        LinearForm { r, s, t }
    }

    pub fn zero() -> Self {
        LinearForm::new(ZERO, ZERO, ZERO)
    }

    pub fn evaluate(&self, x: C64, y: C64, z: C64) -> C64 {
        self.r * x + self.s * y + self.t * z
    }

    pub fn to_poly(&self) -> HomoPoly {
        HomoPoly::new(1, vec![self.t, self.s, self.r]).unwrap()
    }

    pub fn scale(&self, c: C64) -> LinearForm {
        LinearForm::new(self.r * c, self.s * c, self.t * c)
    }

    pub fn norm(&self) -> f64 {
        (self.r.norm_sqr() + self.s.norm_sqr() + self.t.norm_sqr()).sqrt()
    }

    /// Diagonal factor `x - alpha y - beta z` used throughout the ansatz
    /// patterns.
    pub fn line_factor(alpha: C64, beta: C64) -> LinearForm {
        LinearForm::new(ONE, -alpha, -beta)
    }

    /// Coefficients after the substitution v -> M v (same convention as
    /// `HomoPoly::apply_transform`).
    pub fn substitute(&self, m: &[[C64; 3]; 3]) -> LinearForm {
        LinearForm::new(
            self.r * m[0][0] + self.s * m[1][0] + self.t * m[2][0],
            self.r * m[0][1] + self.s * m[1][1] + self.t * m[2][1],
            self.r * m[0][2] + self.s * m[1][2] + self.t * m[2][2],
        )
    }
}

/// n-th power of a linear form as a HomoPoly.
pub fn line_power(l: &LinearForm, n: usize) -> HomoPoly {
    let base = l.to_poly();
    let mut p = base.clone();
    for _ in 1..n {
        p = p.mul(&base);
    }
    p
}

/// Principal complex n-th root.
fn nth_root(c: C64, n: usize) -> C64 {
    if c.norm() == 0.0 {
        return ZERO;
    }
    c.powf(1.0 / n as f64)
}

/// Test whether `p` is the n-th power of a linear form: compute the residual
/// `p - (r x + s y + t z)^n` over the n-th-root branch choices and accept
/// when its coefficient norm drops below `tol * ||p||`.
///
/// The branch of the first nonzero extreme coefficient is pinned to the
/// principal root; the remaining two run over all unit-root multiples.
pub fn is_power_of_line(p: &HomoPoly, tol: f64) -> Option<LinearForm> {
    let n = p.degree();
    if n == 0 {
        return None;
    }
    let scale = p.norm();
    if scale == 0.0 {
        return None;
    }
    let a_x = p.coeff(n, 0);
    let a_y = p.coeff(0, n);
    let a_z = p.coeff(0, 0);
    let r0 = nth_root(a_x, n);
    let s0 = nth_root(a_y, n);
    let t0 = nth_root(a_z, n);
    let omega = C64::from_polar(1.0, std::f64::consts::TAU / n as f64);
    let units: Vec<C64> = (0..n).map(|k| omega.powu(k as u32)).collect();

    // pin the first nonzero root's branch; enumerate the other two
    let pinned = [r0, s0, t0]
        .iter()
        .position(|c| c.norm() > 0.0)?;

    let mut best: Option<(f64, LinearForm)> = None;
    for &u1 in &units {
        for &u2 in &units {
            let mut roots = [r0, s0, t0];
            let mut free = [u1, u2].into_iter();
            for (k, root) in roots.iter_mut().enumerate() {
                if k != pinned && root.norm() > 0.0 {
                    *root *= free.next().unwrap();
                }
            }
            let l = LinearForm::new(roots[0], roots[1], roots[2]);
            let res = p.sub(&line_power(&l, n)).norm();
            if best.as_ref().map_or(true, |(b, _)| res < *b) {
                best = Some((res, l));
            }
        }
    }
    let (res, l) = best?;
    if res <= tol * scale {
        Some(l)
    } else {
        None
    }
}
