//! Bivariate polynomial systems as two-parameter eigenvalue problems: the
//! operator-determinant (Delta) matrices of two determinantal
//! representations, the generalized eigensolve, Newton polishing, and the
//! accuracy metrics reported by the benchmark harness.

use crate::builder::{build, BuildOptions, DetRep};
use crate::error::{Error, Result};
use crate::lapack::{self, Lu};
use crate::polycore::{homogenize, AffinePoly, ZERO};
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Kronecker product: out[(i*p + k, j*q + l)] = a[(i, j)] * b[(k, l)].
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (m, n) = a.dim();
    let (p, q) = b.dim();
    let mut out = Array2::zeros((m * p, n * q));
    for i in 0..m {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Two-parameter eigenvalue problem assembled from two affine matrix triples
/// (A_i + x B_i + y C_i) w_i = 0.
#[derive(Debug, Clone)]
pub struct TwoParProblem {
    pub a1: Array2<C64>,
    pub b1: Array2<C64>,
    pub c1: Array2<C64>,
    pub a2: Array2<C64>,
    pub b2: Array2<C64>,
    pub c2: Array2<C64>,
    pub delta0: Array2<C64>,
    pub delta1: Array2<C64>,
    pub delta2: Array2<C64>,
}

/// Delta matrices from two affine triples:
/// Delta0 = B1 (x) C2 - C1 (x) B2, Delta1 = C1 (x) A2 - A1 (x) C2,
/// Delta2 = A1 (x) B2 - B1 (x) A2.
pub fn build_deltas_from_triples(
    (a1, b1, c1): (Array2<C64>, Array2<C64>, Array2<C64>),
    (a2, b2, c2): (Array2<C64>, Array2<C64>, Array2<C64>),
) -> TwoParProblem {
    let delta0 = &kron(&b1, &c2) - &kron(&c1, &b2);
    let delta1 = &kron(&c1, &a2) - &kron(&a1, &c2);
    let delta2 = &kron(&a1, &b2) - &kron(&b1, &a2);
    TwoParProblem {
        a1,
        b1,
        c1,
        a2,
        b2,
        c2,
        delta0,
        delta1,
        delta2,
    }
}

/// Delta matrices from two determinantal representations.
pub fn build_deltas(rep1: &DetRep, rep2: &DetRep) -> TwoParProblem {
    build_deltas_from_triples(rep1.affine_triple(), rep2.affine_triple())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootFlag {
    Simple,
    Clustered,
    Unreliable,
}

/// Roots of the system with per-root diagnostics.
#[derive(Debug, Clone, Default)]
pub struct RootSet {
    pub roots: Vec<(C64, C64)>,
    /// (|p|, |q|) at each root.
    pub residuals: Vec<(f64, f64)>,
    /// Spectral norm of the inverse Jacobian at each root
    /// (f64::INFINITY when the Jacobian is singular).
    pub condition: Vec<f64>,
    pub flags: Vec<RootFlag>,
    /// Eigenvalues discarded by the spurious-residual filter.
    pub spurious_dropped: usize,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Smallest singular value of the 2x2 Jacobian (closed form from the
/// eigenvalues of J^H J).
fn sigma_min_2x2(j: &[[C64; 2]; 2]) -> f64 {
    let g00 = j[0][0].norm_sqr() + j[1][0].norm_sqr();
    let g11 = j[0][1].norm_sqr() + j[1][1].norm_sqr();
    let g01 = j[0][0].conj() * j[0][1] + j[1][0].conj() * j[1][1];
    let tr = g00 + g11;
    let det = g00 * g11 - g01.norm_sqr();
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    (0.5 * (tr - disc)).max(0.0).sqrt()
}

fn jacobian(p: &AffinePoly, q: &AffinePoly, x: C64, y: C64) -> [[C64; 2]; 2] {
    let (px, py) = p.gradient(x, y);
    let (qx, qy) = q.gradient(x, y);
    [[px, py], [qx, qy]]
}

fn residual_pair(p: &AffinePoly, q: &AffinePoly, x: C64, y: C64) -> (f64, f64) {
    (p.evaluate(x, y).norm(), q.evaluate(x, y).norm())
}

/// Two damped Newton steps on (p, q); a step that increases the residual is
/// halved a few times and dropped if it never helps.
fn polish(p: &AffinePoly, q: &AffinePoly, mut x: C64, mut y: C64) -> (C64, C64) {
    for _ in 0..2 {
        let fv = (p.evaluate(x, y), q.evaluate(x, y));
        let j = jacobian(p, q, x, y);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.norm() < 1e-300 {
            break;
        }
        let dx = (fv.0 * j[1][1] - fv.1 * j[0][1]) / det;
        let dy = (j[0][0] * fv.1 - j[1][0] * fv.0) / det;
        let base = fv.0.norm().max(fv.1.norm());
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..4 {
            let (nx, ny) = (x - lam * dx, y - lam * dy);
            let (rp, rq) = residual_pair(p, q, nx, ny);
            if rp.max(rq) <= base {
                x = nx;
                y = ny;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, y)
}

/// Solves the Delta-matrix generalized eigenproblems of `prob` and polishes
/// the resulting (x, y) candidates on the original polynomials.
///
/// x-values are the eigenvalues of Delta0^{-1} Delta1 (computed through an LU
/// factorization of Delta0, never an explicit inverse); for each eigenvector
/// w the matching y is the Rayleigh-type quotient w* (Delta0^{-1} Delta2) w /
/// (w* w).
pub fn solve_two_param(
    prob: &TwoParProblem,
    p: &AffinePoly,
    q: &AffinePoly,
) -> Result<RootSet> {
    let sv = lapack::singular_values(&prob.delta0)?;
    let (smax, smin) = (
        sv.first().copied().unwrap_or(0.0),
        sv.last().copied().unwrap_or(0.0),
    );
    if smin <= 1e-10 * smax {
        return Err(Error::SingularDelta0);
    }
    let lu = Lu::factor(&prob.delta0)?;
    let g1 = lu.solve_mat(&prob.delta1);
    let g2 = lu.solve_mat(&prob.delta2);
    let (xs, vecs) = lapack::eig(&g1)?;
    let n = xs.len();

    let mut out = RootSet::default();
    for (k, &x0) in xs.iter().enumerate() {
        let w = vecs.column(k);
        let mut num = ZERO;
        let mut den = ZERO;
        // w* G2 w and w* w
        for i in 0..n {
            den += w[i].conj() * w[i];
            let mut gw = ZERO;
            for j in 0..n {
                gw += g2[(i, j)] * w[j];
            }
            num += w[i].conj() * gw;
        }
        let y0 = num / den;
        let (x, y) = polish(p, q, x0, y0);
        let (rp, rq) = residual_pair(p, q, x, y);
        let sj = sigma_min_2x2(&jacobian(p, q, x, y));
        out.roots.push((x, y));
        out.residuals.push((rp, rq));
        out.condition
            .push(if sj > 0.0 { 1.0 / sj } else { f64::INFINITY });
        out.flags.push(if sj > 0.0 {
            RootFlag::Simple
        } else {
            RootFlag::Unreliable
        });
    }
    flag_clusters(&mut out);
    Ok(out)
}

/// Marks root pairs closer than 1e-6 * scale as clustered.
fn flag_clusters(set: &mut RootSet) {
    let scale = 1.0
        + set
            .roots
            .iter()
            .map(|(x, y)| x.norm().max(y.norm()))
            .fold(0.0f64, f64::max);
    let tol = 1e-6 * scale;
    for i in 0..set.roots.len() {
        for j in i + 1..set.roots.len() {
            let d = (set.roots[i].0 - set.roots[j].0).norm()
                + (set.roots[i].1 - set.roots[j].1).norm();
            if d < tol {
                if set.flags[i] == RootFlag::Simple {
                    set.flags[i] = RootFlag::Clustered;
                }
                if set.flags[j] == RootFlag::Simple {
                    set.flags[j] = RootFlag::Clustered;
                }
            }
        }
    }
}

/// Both variants of the per-system accuracy number.
#[derive(Debug, Clone, Copy)]
pub struct AccuracyMetric {
    /// max over roots of max(|p|, |q|) * sigma_min(J): the printed
    /// condition-weighted residual.
    pub accuracy: f64,
    /// max over roots of max(|p|, |q|) * ||J^{-1}||: the classical forward
    /// error estimate.
    pub forward_error_estimate: f64,
    /// Roots with singular Jacobian, excluded from both maxima.
    pub unreliable_count: usize,
}

pub fn accuracy_metric(p: &AffinePoly, q: &AffinePoly, roots: &RootSet) -> AccuracyMetric {
    let mut acc: f64 = 0.0;
    let mut fwd: f64 = 0.0;
    let mut unreliable = 0;
    for (k, &(x, y)) in roots.roots.iter().enumerate() {
        let res = roots.residuals[k].0.max(roots.residuals[k].1);
        let sj = sigma_min_2x2(&jacobian(p, q, x, y));
        if sj <= 0.0 {
            unreliable += 1;
            continue;
        }
        acc = acc.max(res * sj);
        fwd = fwd.max(res / sj);
    }
    AccuracyMetric {
        accuracy: acc,
        forward_error_estimate: fwd,
        unreliable_count: unreliable,
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub build: BuildOptions,
    /// Residual threshold (relative to the coefficient scale) above which an
    /// eigenvalue is discarded as spurious.
    pub spurious_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            build: BuildOptions::default(),
            spurious_tol: 1e-4,
        }
    }
}

/// Affine triple of a polynomial: the trivial 1x1 triple for degree 1, a
/// determinantal representation otherwise.
fn triple_for(
    p: &AffinePoly,
    opts: &BuildOptions,
) -> Result<(Array2<C64>, Array2<C64>, Array2<C64>)> {
    match p.degree() {
        0 => Err(Error::DegenerateInput),
        1 => {
            let one = |v: C64| Array2::from_elem((1, 1), v);
            Ok((one(p.coeff(0, 0)), one(p.coeff(1, 0)), one(p.coeff(0, 1))))
        }
        _ => {
            let hp = homogenize(p)?;
            let rep = build(&hp, opts)?;
            Ok(rep.affine_triple())
        }
    }
}

/// End-to-end system solve: representations, Delta matrices, eigensolve,
/// polish, spurious filter.
pub fn solve_system(p: &AffinePoly, q: &AffinePoly, opts: &SolveOptions) -> Result<RootSet> {
    let t1 = triple_for(p, &opts.build)?;
    let t2 = triple_for(q, &opts.build)?;
    let prob = build_deltas_from_triples(t1, t2);
    let raw = solve_two_param(&prob, p, q)?;
    let scale = p.norm().max(q.norm());
    let tol = opts.spurious_tol * scale;
    let mut out = RootSet::default();
    for k in 0..raw.len() {
        let (rp, rq) = raw.residuals[k];
        if rp.max(rq) > tol {
            out.spurious_dropped += 1;
            continue;
        }
        out.roots.push(raw.roots[k]);
        out.residuals.push(raw.residuals[k]);
        out.condition.push(raw.condition[k]);
        out.flags.push(raw.flags[k]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::ONE;
    use crate::rng::SplitMix64;
    use crate::testutil::{c, random_affine};

    fn linear(a00: f64, a10: f64, a01: f64) -> AffinePoly {
        let mut p = AffinePoly::zero(1);
        p.set(0, 0, c(a00));
        p.set(1, 0, c(a10));
        p.set(0, 1, c(a01));
        p
    }

    #[test]
    fn kron_small_oracle() {
        let a = Array2::from_shape_vec((2, 2), vec![ONE, c(2.0), c(3.0), c(4.0)]).unwrap();
        let b = Array2::from_shape_vec((2, 2), vec![ZERO, ONE, c(5.0), c(6.0)]).unwrap();
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        assert_eq!(k[(2 * i + r, 2 * j + s)], a[(i, j)] * b[(r, s)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kronecker_quadruple_index_oracle() {
        // exact match of the assembled Deltas against the index formula for
        // all sizes up to 3x3, with integer matrices
        let mut rng = SplitMix64::new(41);
        let mut int_mat = |n: usize| {
            Array2::from_shape_fn((n, n), |_| c((rng.next_u64() % 19) as f64 - 9.0))
        };
        for n1 in 1..=3usize {
            for n2 in 1..=3usize {
                let (a1, b1, c1) = (int_mat(n1), int_mat(n1), int_mat(n1));
                let (a2, b2, c2) = (int_mat(n2), int_mat(n2), int_mat(n2));
                let prob = build_deltas_from_triples(
                    (a1.clone(), b1.clone(), c1.clone()),
                    (a2.clone(), b2.clone(), c2.clone()),
                );
                for i in 0..n1 {
                    for j in 0..n1 {
                        for k in 0..n2 {
                            for l in 0..n2 {
                                let (r, s) = (i * n2 + k, j * n2 + l);
                                assert_eq!(
                                    prob.delta0[(r, s)],
                                    b1[(i, j)] * c2[(k, l)] - c1[(i, j)] * b2[(k, l)]
                                );
                                assert_eq!(
                                    prob.delta1[(r, s)],
                                    c1[(i, j)] * a2[(k, l)] - a1[(i, j)] * c2[(k, l)]
                                );
                                assert_eq!(
                                    prob.delta2[(r, s)],
                                    a1[(i, j)] * b2[(k, l)] - b1[(i, j)] * a2[(k, l)]
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn swap_negates_deltas_up_to_permutation() {
        // swapping the two triples negates every Delta after conjugation by
        // the vec-permutation matrix P with P vec(X) = vec(X^T)
        let mut rng = SplitMix64::new(42);
        let mat = |rng: &mut SplitMix64, n: usize| {
            Array2::from_shape_fn((n, n), |_| rng.next_complex())
        };
        let (n1, n2) = (2usize, 3usize);
        let t1 = (mat(&mut rng, n1), mat(&mut rng, n1), mat(&mut rng, n1));
        let t2 = (mat(&mut rng, n2), mat(&mut rng, n2), mat(&mut rng, n2));
        let ab = build_deltas_from_triples(t1.clone(), t2.clone());
        let ba = build_deltas_from_triples(t2, t1);
        // permutation: row i*n2+k of ab corresponds to row k*n1+i of ba
        let m = n1 * n2;
        let perm: Vec<usize> = (0..m)
            .map(|r| {
                let (i, k) = (r / n2, r % n2);
                k * n1 + i
            })
            .collect();
        for (d_ab, d_ba) in [
            (&ab.delta0, &ba.delta0),
            (&ab.delta1, &ba.delta1),
            (&ab.delta2, &ba.delta2),
        ] {
            for r in 0..m {
                for s in 0..m {
                    let lhs = d_ab[(r, s)];
                    let rhs = -d_ba[(perm[r], perm[s])];
                    assert!((lhs - rhs).norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn cramer_linear_system() {
        // x - y = 0, x + y - 2 = 0 -> (1, 1); Deltas are scalars matching
        // Cramer's rule
        let p = linear(0.0, 1.0, -1.0);
        let q = linear(-2.0, 1.0, 1.0);
        let roots = solve_system(&p, &q, &SolveOptions::default()).unwrap();
        assert_eq!(roots.len(), 1);
        let (x, y) = roots.roots[0];
        assert!((x - ONE).norm() <= 1e-14);
        assert!((y - ONE).norm() <= 1e-14);
    }

    #[test]
    fn analytic_quadratic_system() {
        // x^2 + y^2 - 5 = 0, xy - 2 = 0 -> (1,2), (2,1), (-1,-2), (-2,-1)
        let mut p = AffinePoly::zero(2);
        p.set(2, 0, ONE);
        p.set(0, 2, ONE);
        p.set(0, 0, c(-5.0));
        let mut q = AffinePoly::zero(2);
        q.set(1, 1, ONE);
        q.set(0, 0, c(-2.0));
        let roots = solve_system(&p, &q, &SolveOptions::default()).unwrap();
        assert_eq!(roots.len(), 4);
        let expect = [
            (c(1.0), c(2.0)),
            (c(2.0), c(1.0)),
            (c(-1.0), c(-2.0)),
            (c(-2.0), c(-1.0)),
        ];
        for &(ex, ey) in &expect {
            let found = roots
                .roots
                .iter()
                .any(|&(x, y)| (x - ex).norm() + (y - ey).norm() <= 1e-8);
            assert!(found, "missing root ({}, {})", ex, ey);
        }
    }

    #[test]
    fn commuting_property() {
        // Delta0^{-1} Delta1 and Delta0^{-1} Delta2 commute for regular
        // random problems
        let mut rng = SplitMix64::new(43);
        for _ in 0..10 {
            let p = random_affine(2, &mut rng);
            let q = random_affine(2, &mut rng);
            let Ok(t1) = triple_for(&p, &BuildOptions::default()) else {
                continue;
            };
            let Ok(t2) = triple_for(&q, &BuildOptions::default()) else {
                continue;
            };
            let prob = build_deltas_from_triples(t1, t2);
            let Ok(lu) = Lu::factor(&prob.delta0) else {
                continue;
            };
            let g1 = lu.solve_mat(&prob.delta1);
            let g2 = lu.solve_mat(&prob.delta2);
            let comm = &g1.dot(&g2) - &g2.dot(&g1);
            let norm = |m: &Array2<C64>| m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let bound = 1e-8 * (1.0 + norm(&g1) * norm(&g2));
            assert!(norm(&comm) <= bound, "commutator {} > {}", norm(&comm), bound);
        }
    }

    #[test]
    fn bezout_counts_random_systems() {
        let mut rng = SplitMix64::new(44);
        let opts = SolveOptions::default();
        for (d1, d2) in [(2usize, 2usize), (2, 3), (3, 3)] {
            let mut failures = 0;
            for _ in 0..20 {
                let p = random_affine(d1, &mut rng);
                let q = random_affine(d2, &mut rng);
                match solve_system(&p, &q, &opts) {
                    Ok(roots) => {
                        if roots.len() != d1 * d2 {
                            failures += 1;
                            continue;
                        }
                        let scale = p.norm().max(q.norm());
                        for &(rp, rq) in &roots.residuals {
                            if rp.max(rq) > 1e-8 * scale {
                                failures += 1;
                                break;
                            }
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
            assert!(failures <= 1, "({}, {}): {} failures", d1, d2, failures);
        }
    }

    #[test]
    fn shared_component_is_singular() {
        // p = q shares a full component: Delta0 is singular
        let mut p = AffinePoly::zero(2);
        p.set(2, 0, ONE);
        p.set(0, 2, ONE);
        p.set(0, 0, c(-1.0));
        let err = solve_system(&p, &p.clone(), &SolveOptions::default());
        assert!(matches!(err, Err(Error::SingularDelta0)));
        let msg = format!("{}", Error::SingularDelta0);
        assert!(msg.to_lowercase().contains("staircase"));
    }

    #[test]
    fn accuracy_metric_exact_and_perturbed() {
        // system x^2 - y = 0, y - 1 = 0 with roots (+-1, 1); J has
        // sigma_min about 1
        let mut p = AffinePoly::zero(2);
        p.set(2, 0, ONE);
        p.set(0, 1, -ONE);
        let mut q = AffinePoly::zero(1);
        q.set(0, 1, ONE);
        q.set(0, 0, -ONE);
        let roots = solve_system(&p, &q, &SolveOptions::default()).unwrap();
        assert_eq!(roots.len(), 2);
        let m = accuracy_metric(&p, &q, &roots);
        assert!(m.accuracy <= 1e-12);
        // perturb each root by 1e-6 and recompute residuals: the forward
        // error estimate must be about 1e-6 (within a factor of 10)
        let mut perturbed = roots.clone();
        for k in 0..perturbed.len() {
            perturbed.roots[k].0 += c(1e-6);
            let (x, y) = perturbed.roots[k];
            perturbed.residuals[k] = residual_pair(&p, &q, x, y);
        }
        let mp = accuracy_metric(&p, &q, &perturbed);
        assert!(
            mp.forward_error_estimate >= 1e-7 && mp.forward_error_estimate <= 1e-5,
            "forward error {}",
            mp.forward_error_estimate
        );
    }

    #[test]
    fn clustered_double_root_flagged() {
        // p has a squared factor (x + y)^2: the double intersection with a
        // generic line shows up as a clustered pair
        let mut line = AffinePoly::zero(1);
        line.set(1, 0, ONE);
        line.set(0, 1, c(0.5));
        line.set(0, 0, c(-0.3));
        // p = (x + y - 1)^2
        let mut p = AffinePoly::zero(2);
        p.set(2, 0, ONE);
        p.set(1, 1, c(2.0));
        p.set(0, 2, ONE);
        p.set(1, 0, c(-2.0));
        p.set(0, 1, c(-2.0));
        p.set(0, 0, ONE);
        let mut opts = SolveOptions::default();
        opts.spurious_tol = 1e-2; // double roots polish poorly
        let roots = solve_system(&p, &line, &opts).unwrap();
        assert!(roots.len() >= 1);
        assert!(roots
            .flags
            .iter()
            .any(|f| *f == RootFlag::Clustered || *f == RootFlag::Unreliable));
    }

    #[test]
    fn sigma_min_matches_svd() {
        let mut rng = SplitMix64::new(45);
        for _ in 0..50 {
            let j = [
                [rng.next_complex(), rng.next_complex()],
                [rng.next_complex(), rng.next_complex()],
            ];
            let m = Array2::from_shape_vec((2, 2), vec![j[0][0], j[0][1], j[1][0], j[1][1]])
                .unwrap();
            let sv = lapack::singular_values(&m).unwrap();
            let expect = *sv.last().unwrap();
            assert!((sigma_min_2x2(&j) - expect).abs() <= 1e-12 * (1.0 + expect));
        }
    }
}
