//! Cyclic Jacobi kernels: two-sided for Hermitian eigenproblems and
//! one-sided (Hestenes) for the SVD. Both are deterministic for identical
//! input bits and accurate to a few ulps relative to the matrix norm at desk
//! scale.

use num_complex::Complex64;

use super::ComplexMatrix;

const MAX_SWEEPS: usize = 80;
// Squared column norms below this are left alone (avoids subnormal rotations).
const NEGLIGIBLE: f64 = 1e-290;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Unitary `J` (row-major 2x2) with `J* [[a, b], [conj b, d]] J` diagonal.
fn rotation(a: f64, d: f64, b: Complex64) -> [Complex64; 4] {
    let r = b.norm();
    let phase = Complex64::from_polar(1.0, b.arg());
    let theta = (d - a) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();
    [Complex64::new(c, 0.0), Complex64::new(s, 0.0), -pc * s, pc * c]
}

/// Right-multiplies columns `p`, `q` of `m` by the 2x2 unitary `j`.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, j: &[Complex64; 4]) {
    for k in 0..m.rows() {
        let xp = m[(k, p)];
        let xq = m[(k, q)];
        m[(k, p)] = xp * j[0] + xq * j[2];
        m[(k, q)] = xp * j[1] + xq * j[3];
    }
}

/// Left-multiplies rows `p`, `q` of `m` by `j*`.
fn rotate_rows_adjoint(m: &mut ComplexMatrix, p: usize, q: usize, j: &[Complex64; 4]) {
    for k in 0..m.cols() {
        let xp = m[(p, k)];
        let xq = m[(q, k)];
        m[(p, k)] = j[0].conj() * xp + j[2].conj() * xq;
        m[(q, k)] = j[1].conj() * xp + j[3].conj() * xq;
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues (unsorted, diagonal order) and eigenvector columns of a
/// Hermitian matrix.
pub(crate) fn hermitian(mut a: ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Option<ComplexMatrix>) {
    let n = a.rows();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let b = a[(p, q)];
                    if b == ZERO {
                        continue;
                    }
                    let j = rotation(a[(p, p)].re, a[(q, q)].re, b);
                    rotate_columns(&mut a, p, q, &j);
                    rotate_rows_adjoint(&mut a, p, q, &j);
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    a[(p, p)].im = 0.0;
                    a[(q, q)].im = 0.0;
                    if let Some(v) = v.as_mut() {
                        rotate_columns(v, p, q, &j);
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// One-sided Jacobi on the columns of `m`: returns `W = M V` with mutually
/// orthogonal columns and, when requested, the unitary `V` (cols x cols).
pub(crate) fn orthogonalize_columns(
    m: &ComplexMatrix,
    want_v: bool,
) -> (ComplexMatrix, Option<ComplexMatrix>) {
    let n = m.cols();
    let mut w = m.clone();
    let mut v = want_v.then(|| ComplexMatrix::identity(n));
    let mut norms: Vec<f64> = (0..n).map(|j| column_norm_sqr(&w, j)).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha < NEGLIGIBLE || beta < NEGLIGIBLE {
                    continue;
                }
                let mut gamma = ZERO;
                for k in 0..w.rows() {
                    gamma += w[(k, p)].conj() * w[(k, q)];
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let j = rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &j);
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, &j);
                }
                norms[p] = column_norm_sqr(&w, p);
                norms[q] = column_norm_sqr(&w, q);
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

pub(crate) fn column_norm_sqr(m: &ComplexMatrix, j: usize) -> f64 {
    (0..m.rows()).map(|k| m[(k, j)].norm_sqr()).sum()
}
