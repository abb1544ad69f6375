//! Dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// `exp(j * phase)`.
#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

/// `a^H b`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &CVector) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `A^H b` without materializing the adjoint.
pub fn adjoint_mul_vec(a: &CMatrix, b: &CVector) -> CVector {
    CVector::from_iterator(
        a.ncols(),
        a.column_iter().map(|col| {
            col.iter()
                .zip(b.iter())
                .map(|(x, y)| x.conj() * y)
                .sum::<C64>()
        }),
    )
}

/// `A^H A`.
pub fn gram(a: &CMatrix) -> CMatrix {
    a.adjoint() * a
}

/// Real 2n x 2n representation `[[Re G, -Im G], [Im G, Re G]]` of a complex n x n matrix.
pub fn real_embedding(g: &CMatrix) -> DMatrix<f64> {
    let (rows, cols) = g.shape();
    let mut out = DMatrix::<f64>::zeros(2 * rows, 2 * cols);
    for j in 0..cols {
        for i in 0..rows {
            let v = g[(i, j)];
            out[(i, j)] = v.re;
            out[(i, cols + j)] = -v.im;
            out[(rows + i, j)] = v.im;
            out[(rows + i, cols + j)] = v.re;
        }
    }
    out
}

/// Stacks `[Re v; Im v]`.
pub fn real_stack(v: &CVector) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

pub fn complex_unstack(v: &DVector<f64>) -> CVector {
    let n = v.len() / 2;
    CVector::from_fn(n, |i, _| C64::new(v[i], v[n + i]))
}

/// Orthonormalizes the columns in place with modified Gram-Schmidt.
/// Returns false when a column collapses below `tol` relative to its original norm.
pub fn orthonormalize_columns(m: &mut CMatrix, tol: f64) -> bool {
    let cols = m.ncols();
    for j in 0..cols {
        let original = m.column(j).norm();
        for k in 0..j {
            let proj: C64 = m
                .column(k)
                .iter()
                .zip(m.column(j).iter())
                .map(|(q, v)| q.conj() * v)
                .sum();
            let qk = m.column(k).clone_owned();
            let mut cj = m.column_mut(j);
            cj.axpy(-proj, &qk, C64::new(1.0, 0.0));
        }
        let norm = m.column(j).norm();
        if original == 0.0 || norm <= tol * original {
            return false;
        }
        m.column_mut(j).unscale_mut(norm);
    }
    true
}

/// Orthonormalizes the rows in place (so that `M M^H = I`).
pub fn orthonormalize_rows(m: &mut CMatrix, tol: f64) -> bool {
    let mut t = m.adjoint();
    let ok = orthonormalize_columns(&mut t, tol);
    *m = t.adjoint();
    ok
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_embedding_matches_complex_product() {
        let g = CMatrix::from_fn(3, 3, |i, j| {
            C64::new(i as f64 + 0.5 * j as f64, j as f64 - i as f64)
        });
        let v = CVector::from_fn(3, |i, _| C64::new(1.0 + i as f64, -0.3 * i as f64));
        let direct = &g * &v;
        let via_real = complex_unstack(&(real_embedding(&g) * real_stack(&v)));
        assert!((direct - via_real).norm() < 1e-12);
    }

    #[test]
    fn gram_schmidt_gives_orthonormal_columns() {
        let mut m = CMatrix::from_fn(6, 3, |i, j| {
            C64::new((i * 3 + j) as f64 % 5.0 + 1.0, (i + 2 * j) as f64 % 3.0)
        });
        assert!(orthonormalize_columns(&mut m, 1e-10));
        let g = gram(&m);
        assert!((g - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn adjoint_mul_matches_adjoint() {
        let a = CMatrix::from_fn(4, 2, |i, j| C64::new(i as f64, j as f64 + 1.0));
        let b = CVector::from_fn(4, |i, _| C64::new(0.5, i as f64));
        assert!((adjoint_mul_vec(&a, &b) - a.adjoint() * &b).norm() < 1e-12);
    }
}
