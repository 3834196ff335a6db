//! Small dense linear-algebra helpers on `&[f64]` slices.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add_to(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

/// Determinant of a row-major `k x k` matrix, destroying the input (LU with
/// partial pivoting). The empty matrix has determinant one.
pub fn det_in_place(m: &mut [f64], k: usize) -> f64 {
    debug_assert_eq!(m.len(), k * k);
    let mut det = 1.0;
    for col in 0..k {
        let mut piv = col;
        let mut best = math::abs(m[col * k + col]);
        for row in col + 1..k {
            let v = math::abs(m[row * k + col]);
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..k {
                m.swap(col * k + j, piv * k + j);
            }
            det = -det;
        }
        let d = m[col * k + col];
        det *= d;
        for row in col + 1..k {
            let f = m[row * k + col] / d;
            if f != 0.0 {
                for j in col + 1..k {
                    m[row * k + j] -= f * m[col * k + j];
                }
            }
        }
    }
    det
}

pub fn det(m: &[f64], k: usize) -> f64 {
    let mut tmp = m.to_vec();
    det_in_place(&mut tmp, k)
}

/// Solves `m x = rhs` for a row-major `k x k` matrix. Returns `None` when a
/// pivot vanishes exactly.
pub fn solve(m: &[f64], rhs: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..k {
        let mut piv = col;
        let mut best = math::abs(a[col * k + col]);
        for row in col + 1..k {
            let v = math::abs(a[row * k + col]);
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(col * k + j, piv * k + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * k + col];
        for row in col + 1..k {
            let f = a[row * k + col] / d;
            if f != 0.0 {
                for j in col..k {
                    a[row * k + j] -= f * a[col * k + j];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut s = b[row];
        for j in row + 1..k {
            s -= a[row * k + j] * x[j];
        }
        x[row] = s / a[row * k + row];
    }
    Some(x)
}

/// Gram matrix determinant of two lists of vectors: `det[a_i . b_j]`.
pub fn gram_det(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let k = a.len();
    debug_assert_eq!(k, b.len());
    let mut m = Vec::with_capacity(k * k);
    for ai in a {
        for bj in b {
            m.push(dot(ai, bj));
        }
    }
    det_in_place(&mut m, k)
}

/// Result of orthonormalizing a list of vectors.
pub struct Orthonormalized {
    pub frame: Vec<Vec<f64>>,
    /// Product of the residual norms, i.e. the k-volume of the parallelepiped.
    pub volume: f64,
    /// Smallest residual norm relative to the norm of its input vector.
    pub min_relative_residual: f64,
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// The frame spans the same space with the same orientation as the input;
/// `volume` is `|v_1 ^ ... ^ v_k|`.
pub fn gram_schmidt(vectors: &[Vec<f64>]) -> Orthonormalized {
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    let mut volume = 1.0;
    let mut min_rel = f64::INFINITY;
    for v in vectors {
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &frame {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let len = norm(&w);
        let input = norm(v);
        volume *= len;
        let rel = if input > 0.0 { len / input } else { 0.0 };
        if rel < min_rel {
            min_rel = rel;
        }
        if len > 0.0 {
            for x in w.iter_mut() {
                *x /= len;
            }
        }
        frame.push(w);
    }
    Orthonormalized {
        frame,
        volume,
        min_relative_residual: if vectors.is_empty() { 1.0 } else { min_rel },
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: usize = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}
