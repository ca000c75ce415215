//! Small dense complex linear-algebra helpers shared by the higher modules.
//!
//! Everything here works on `DMatrix<Complex<f64>>`; the sizes involved are
//! tiny (at most a few dozen rows), so clarity wins over blocking or reuse
//! of workspaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn det(m: &CMatrix) -> C64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return real(1.0);
    }
    m.clone().lu().determinant()
}

/// Singular values (descending) and the full `V^H` factor, `ncols x ncols`.
///
/// Wide matrices are padded with zero rows so the right factor is square.
fn svd_full_right(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (r, c) = m.shape();
    let padded = if r < c {
        let mut p = CMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    (svd.singular_values.iter().copied().collect(), v_t)
}

fn threshold(singular: &[f64], rel_tol: f64) -> f64 {
    let top = singular.first().copied().unwrap_or(0.0);
    rel_tol * top.max(f64::MIN_POSITIVE)
}

/// Numerical rank relative to the largest singular value.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let (s, _) = svd_full_right(m);
    let t = threshold(&s, rel_tol);
    s.iter().filter(|&&x| x > t).count()
}

/// Numerical rank with an absolute cut-off.
pub fn rank_abs(m: &CMatrix, abs_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let (s, _) = svd_full_right(m);
    s.iter().filter(|&&x| x > abs_tol).count()
}

/// Orthonormal (Hermitian) basis of the kernel, as columns.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    null_space_by(m, |s| threshold(s, rel_tol))
}

/// Kernel with singular values at or below `abs_tol` treated as zero.
pub fn null_space_abs(m: &CMatrix, abs_tol: f64) -> CMatrix {
    null_space_by(m, |_| abs_tol)
}

fn null_space_by(m: &CMatrix, cutoff: impl Fn(&[f64]) -> f64) -> CMatrix {
    let ncols = m.ncols();
    if m.nrows() == 0 {
        return CMatrix::identity(ncols, ncols);
    }
    let (s, v_t) = svd_full_right(m);
    let t = cutoff(&s);
    let rank = s.iter().filter(|&&x| x > t).count();
    let k = ncols - rank;
    let mut out = CMatrix::zeros(ncols, k);
    for (j, row) in (rank..ncols).enumerate() {
        for i in 0..ncols {
            out[(i, j)] = v_t[(row, i)].conj();
        }
    }
    out
}

/// Orthonormal basis of the Hermitian complement of the column space.
pub fn column_complement(m: &CMatrix, rel_tol: f64) -> CMatrix {
    null_space(&m.adjoint(), rel_tol)
}

/// Orthonormal basis of the column space.
pub fn column_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let complement = column_complement(m, rel_tol);
    if complement.ncols() == 0 {
        return CMatrix::identity(m.nrows(), m.nrows());
    }
    null_space(&complement.adjoint(), rel_tol)
}

/// Least-squares / minimum-norm solution of `m x = b`.
pub fn solve_min_norm(m: &CMatrix, b: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    svd.solve(b, 1e-13 * svd.singular_values.max().max(f64::MIN_POSITIVE))
        .expect("u and v_t were computed")
}

/// Distance between the column spans of `a` and `b`, measured as the
/// spectral norm of the difference of the orthogonal projectors.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix, rel_tol: f64) -> f64 {
    let qa = column_space(a, rel_tol);
    let qb = column_space(b, rel_tol);
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    let pa = &qa * qa.adjoint();
    let pb = &qb * qb.adjoint();
    let diff = pa - pb;
    diff.singular_values().max()
}

/// Pfaffian of an antisymmetric matrix by expansion along the first row.
pub fn pfaffian(m: &CMatrix) -> C64 {
    let n = m.nrows();
    if n == 0 {
        return real(1.0);
    }
    if n % 2 == 1 {
        return real(0.0);
    }
    let mut total = real(0.0);
    for j in 1..n {
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor = CMatrix::from_fn(n - 2, n - 2, |a, b| m[(keep[a], keep[b])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += m[(0, j)] * pfaffian(&minor) * sign;
    }
    total
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}
