//! Thin safe wrappers over the dense complex LAPACK kernels this crate needs:
//! zgeev (eigenvalues / right eigenvectors) and zgesvd (singular values).

use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64 as C64;

extern "C" {
    fn zgeev_(
        jobvl: *const u8,
        jobvr: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut C64,
        vl: *mut C64,
        ldvl: *const i32,
        vr: *mut C64,
        ldvr: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );

    fn zgesvd_(
        jobu: *const u8,
        jobvt: *const u8,
        m: *const i32,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        s: *mut f64,
        u: *mut C64,
        ldu: *const i32,
        vt: *mut C64,
        ldvt: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
}

fn to_col_major(a: &Array2<C64>) -> Vec<C64> {
    let (m, n) = a.dim();
    let mut v = Vec::with_capacity(m * n);
    for j in 0..n {
        for i in 0..m {
            v.push(a[(i, j)]);
        }
    }
    v
}

/// Eigenvalues and right eigenvectors (as matrix columns) of a square
/// complex matrix.
pub fn eig(a: &Array2<C64>) -> Result<(Vec<C64>, Array2<C64>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return Ok((vec![], Array2::zeros((0, 0))));
    }
    let ni = n as i32;
    let mut data = to_col_major(a);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut vr = vec![C64::new(0.0, 0.0); n * n];
    let mut vl = vec![C64::new(0.0, 0.0); 1];
    let mut rwork = vec![0.0f64; 2 * n];
    let mut info = 0i32;

    // workspace query
    let mut query = [C64::new(0.0, 0.0)];
    let neg1 = -1i32;
    unsafe {
        zgeev_(
            b"N".as_ptr(),
            b"V".as_ptr(),
            &ni,
            data.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            vl.as_mut_ptr(),
            &1,
            vr.as_mut_ptr(),
            &ni,
            query.as_mut_ptr(),
            &neg1,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigenFailure(info));
    }
    let lwork = query[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        zgeev_(
            b"N".as_ptr(),
            b"V".as_ptr(),
            &ni,
            data.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            vl.as_mut_ptr(),
            &1,
            vr.as_mut_ptr(),
            &ni,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigenFailure(info));
    }
    let mut vecs = Array2::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            vecs[(i, j)] = vr[j * n + i];
        }
    }
    Ok((w, vecs))
}

/// Eigenvalues only.
pub fn eigvals(a: &Array2<C64>) -> Result<Vec<C64>> {
    Ok(eig(a)?.0)
}

/// Singular values in descending order.
pub fn singular_values(a: &Array2<C64>) -> Result<Vec<f64>> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Ok(vec![]);
    }
    let (mi, ni) = (m as i32, n as i32);
    let mut data = to_col_major(a);
    let k = m.min(n);
    let mut s = vec![0.0f64; k];
    let mut u = [C64::new(0.0, 0.0)];
    let mut vt = [C64::new(0.0, 0.0)];
    let mut rwork = vec![0.0f64; 5 * k];
    let mut info = 0i32;
    let mut query = [C64::new(0.0, 0.0)];
    let neg1 = -1i32;
    unsafe {
        zgesvd_(
            b"N".as_ptr(),
            b"N".as_ptr(),
            &mi,
            &ni,
            data.as_mut_ptr(),
            &mi,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            &1,
            vt.as_mut_ptr(),
            &1,
            query.as_mut_ptr(),
            &neg1,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigenFailure(info));
    }
    let lwork = query[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        zgesvd_(
            b"N".as_ptr(),
            b"N".as_ptr(),
            &mi,
            &ni,
            data.as_mut_ptr(),
            &mi,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            &1,
            vt.as_mut_ptr(),
            &1,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigenFailure(info));
    }
    Ok(s)
}

/// Determinant by Gaussian elimination with partial pivoting; matrices here
/// are at most 25x25.
pub fn det(a: &Array2<C64>) -> C64 {
    let n = a.nrows();
    let mut m = a.clone();
    let mut d = C64::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[(r, col)].norm() > m[(piv, col)].norm() {
                piv = r;
            }
        }
        if m[(piv, col)].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != col {
            for c in 0..n {
                let tmp = m[(col, c)];
                m[(col, c)] = m[(piv, c)];
                m[(piv, c)] = tmp;
            }
            d = -d;
        }
        let p = m[(col, col)];
        d *= p;
        for r in col + 1..n {
            let f = m[(r, col)] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = m[(col, c)];
                m[(r, c)] -= f * v;
            }
        }
    }
    d
}

/// LU factorization with partial pivoting for repeated solves.
pub struct Lu {
    lu: Array2<C64>,
    piv: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Array2<C64>) -> Result<Lu> {
        let n = a.nrows();
        let mut m = a.clone();
        let mut piv = Vec::with_capacity(n);
        for col in 0..n {
            let mut p = col;
            for r in col + 1..n {
                if m[(r, col)].norm() > m[(p, col)].norm() {
                    p = r;
                }
            }
            if m[(p, col)].norm() == 0.0 {
                return Err(Error::SingularDelta0);
            }
            piv.push(p);
            if p != col {
                for c in 0..n {
                    let tmp = m[(col, c)];
                    m[(col, c)] = m[(p, c)];
                    m[(p, c)] = tmp;
                }
            }
            let d = m[(col, col)];
            for r in col + 1..n {
                let f = m[(r, col)] / d;
                m[(r, col)] = f;
                for c in col + 1..n {
                    let v = m[(col, c)];
                    m[(r, c)] -= f * v;
                }
            }
        }
        Ok(Lu { lu: m, piv })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = b.len();
        let mut x = b.to_vec();
        // the factorization swaps full rows (multiplier columns included), so
        // all pivots must be applied to the right-hand side before the clean
        // L solve
        for col in 0..n {
            x.swap(col, self.piv[col]);
        }
        for col in 0..n {
            for r in col + 1..n {
                let v = x[col];
                x[r] -= self.lu[(r, col)] * v;
            }
        }
        for col in (0..n).rev() {
            x[col] /= self.lu[(col, col)];
            for r in 0..col {
                let v = x[col];
                x[r] -= self.lu[(r, col)] * v;
            }
        }
        x
    }

    /// X with A X = B, column by column.
    pub fn solve_mat(&self, b: &Array2<C64>) -> Array2<C64> {
        let (n, k) = b.dim();
        let mut out = Array2::zeros((n, k));
        for j in 0..k {
            let col: Vec<C64> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}
