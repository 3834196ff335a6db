//! Dense exterior algebra over `R^n`, `1 <= n <= 12`.
//!
//! A k-vector is stored as `C(n, k)` coefficients over the basis
//! `e_{i_1} ^ ... ^ e_{i_k}`, `i_1 < ... < i_k`, in lexicographic order of the
//! index tuples. Index sets are handled internally as bit masks.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::math;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 12;

/// Relative tolerance used by [`Blade::contains`].
pub const SPAN_TOL: f64 = 1e-9;

/// Absolute threshold on the k-volume below which a frame is dependent.
pub const DEPENDENCE_TOL: f64 = 1e-12;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

/// Basis masks of `Lambda^k(R^n)` in lexicographic order of index tuples.
pub fn basis_masks(n: usize, k: usize) -> Vec<u16> {
    let mut out = Vec::with_capacity(linalg::binomial(n, k));
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.iter().fold(0u16, |m, &i| m | (1 << i)));
        // advance to the next tuple in lexicographic order
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of `mask` in [`basis_masks`]`(n, popcount(mask))`.
pub fn mask_rank(mask: u16, n: usize) -> usize {
    let k = mask.count_ones() as usize;
    let mut rank = 0;
    let mut start = 0;
    let mut j = 0;
    for i in 0..n {
        if mask & (1 << i) != 0 {
            for v in start..i {
                rank += linalg::binomial(n - 1 - v, k - 1 - j);
            }
            start = i + 1;
            j += 1;
        }
    }
    rank
}

/// Sign of `e_A ^ e_B = sign * e_{A u B}` for disjoint masks.
fn merge_sign(a: u16, b: u16) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 15 { 0 } else { a >> (j + 1) };
        swaps += above.count_ones();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// An element of `Lambda^k(R^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiVector {
    n: usize,
    k: usize,
    coeffs: Vec<f64>,
}

impl MultiVector {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        check_dim(n)?;
        if k > n {
            return Err(Error::GradeOverflow { k, l: 0, n });
        }
        Ok(Self {
            n,
            k,
            coeffs: vec![0.0; linalg::binomial(n, k)],
        })
    }

    pub fn from_coeffs(n: usize, k: usize, coeffs: Vec<f64>) -> Result<Self> {
        let mut out = Self::zero(n, k)?;
        if coeffs.len() != out.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: out.coeffs.len(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("multivector coefficients must be finite"));
        }
        out.coeffs = coeffs;
        Ok(out)
    }

    /// Grade-0 element; the 0-vectors are numbers.
    pub fn scalar(n: usize, value: f64) -> Result<Self> {
        Self::from_coeffs(n, 0, vec![value])
    }

    pub fn from_vector(v: &[f64]) -> Result<Self> {
        Self::from_coeffs(v.len(), 1, v.to_vec())
    }

    /// Basis vector `e_i` (zero-based index).
    pub fn basis_vector(n: usize, i: usize) -> Result<Self> {
        let mut out = Self::zero(n, 1)?;
        if i >= n {
            return Err(invalid("basis index out of range"));
        }
        out.coeffs[i] = 1.0;
        Ok(out)
    }

    /// Basis k-vector `e_{indices[0]} ^ ... ^ e_{indices[k-1]}` for strictly
    /// increasing zero-based indices.
    pub fn basis_blade(n: usize, indices: &[usize]) -> Result<Self> {
        let mut out = Self::zero(n, indices.len())?;
        let mut mask = 0u16;
        for (j, &i) in indices.iter().enumerate() {
            if i >= n || (j > 0 && indices[j - 1] >= i) {
                return Err(invalid("basis indices must be strictly increasing and < n"));
            }
            mask |= 1 << i;
        }
        out.coeffs[mask_rank(mask, n)] = 1.0;
        Ok(out)
    }

    /// `v_1 ^ ... ^ v_k`; coefficient at `S` is the `k x k` minor on rows `S`.
    pub fn wedge_of_vectors(n: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let k = vectors.len();
        let mut out = Self::zero(n, k)?;
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let mut minor = vec![0.0; k * k];
        for (pos, mask) in basis_masks(n, k).into_iter().enumerate() {
            let rows: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            for (r, &row) in rows.iter().enumerate() {
                for (c, v) in vectors.iter().enumerate() {
                    minor[r * k + c] = v[row];
                }
            }
            out.coeffs[pos] = linalg::det_in_place(&mut minor, k);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of the basis blade with the given increasing indices.
    pub fn coeff(&self, indices: &[usize]) -> f64 {
        let mask = indices.iter().fold(0u16, |m, &i| m | (1 << i));
        self.coeffs[mask_rank(mask, self.n)]
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    fn same_grade(&self, other: &Self) -> Result<()> {
        self.same_space(other)?;
        if self.k != other.k {
            return Err(Error::GradeMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grade(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { coeffs, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grade(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { coeffs, ..*self })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..*self
        }
    }

    /// Exterior product `self ^ other`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let (k, l, n) = (self.k, other.k, self.n);
        if k + l > n {
            return Err(Error::GradeOverflow { k, l, n });
        }
        let mut out = Self::zero(n, k + l)?;
        let ma = basis_masks(n, k);
        let mb = basis_masks(n, l);
        for (a, &am) in self.coeffs.iter().zip(&ma) {
            if *a == 0.0 {
                continue;
            }
            for (b, &bm) in other.coeffs.iter().zip(&mb) {
                if *b == 0.0 || am & bm != 0 {
                    continue;
                }
                out.coeffs[mask_rank(am | bm, n)] += merge_sign(am, bm) * a * b;
            }
        }
        Ok(out)
    }

    /// Left interior product `self _| other`: the unique `(k - l)`-vector with
    /// `w . (self _| other) = (self ^ w) . other` for every `w`.
    pub fn interior_left(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let (l, k, n) = (self.k, other.k, self.n);
        if l > k {
            return Err(Error::GradeMismatch {
                expected: k,
                found: l,
            });
        }
        let mut out = Self::zero(n, k - l)?;
        let ma = basis_masks(n, l);
        let mb = basis_masks(n, k);
        for (a, &am) in self.coeffs.iter().zip(&ma) {
            if *a == 0.0 {
                continue;
            }
            for (b, &bm) in other.coeffs.iter().zip(&mb) {
                if *b == 0.0 || am & bm != am {
                    continue;
                }
                let rest = bm ^ am;
                out.coeffs[mask_rank(rest, n)] += merge_sign(am, rest) * a * b;
            }
        }
        Ok(out)
    }

    /// Inner product of two k-vectors (Gram determinant on simple inputs).
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_grade(other)?;
        Ok(linalg::dot(&self.coeffs, &other.coeffs))
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.coeffs)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| math::abs(a - b))
            .fold(0.0, f64::max)
    }
}

/// A linear map `R^n -> R^n`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    n: usize,
    matrix: Vec<f64>,
}

impl LinearMap {
    pub fn new(n: usize, matrix: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if matrix.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: matrix.len(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(invalid("linear map entries must be finite"));
        }
        Ok(Self { n, matrix })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        Self::new(n, m)
    }

    /// Orthogonal projector onto the complement of `a` (`a != 0`).
    pub fn perp_projector(a: &[f64]) -> Result<Self> {
        let n = a.len();
        let nn = linalg::dot(a, a);
        if nn == 0.0 {
            return Err(invalid("cannot project away from the zero vector"));
        }
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = if i == j { 1.0 } else { 0.0 } - a[i] * a[j] / nn;
            }
        }
        Self::new(n, m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.n + col]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| linalg::dot(&self.matrix[i * self.n..(i + 1) * self.n], v))
            .collect()
    }

    /// Induced map on `Lambda^k`: `L(u_1 ^ ... ^ u_k) = L u_1 ^ ... ^ L u_k`.
    ///
    /// Coefficientwise `(L a)_T = sum_S det(L[T, S]) a_S`.
    pub fn push_forward(&self, a: &MultiVector) -> Result<MultiVector> {
        if a.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.n,
            });
        }
        let (n, k) = (self.n, a.k);
        let masks = basis_masks(n, k);
        let idx: Vec<Vec<usize>> = masks
            .iter()
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
            .collect();
        let mut out = MultiVector::zero(n, k)?;
        let mut minor = vec![0.0; k * k];
        for (s, cols) in idx.iter().enumerate() {
            let coeff = a.coeffs[s];
            if coeff == 0.0 {
                continue;
            }
            for (t, rows) in idx.iter().enumerate() {
                for (r, &row) in rows.iter().enumerate() {
                    for (c, &col) in cols.iter().enumerate() {
                        minor[r * k + c] = self.matrix[row * n + col];
                    }
                }
                out.coeffs[t] += coeff * linalg::det_in_place(&mut minor, k);
            }
        }
        Ok(out)
    }
}

/// A unit simple k-vector `sign * f_1 ^ ... ^ f_k` with an orthonormal frame.
///
/// For `k = 0` the blade is the number `sign` and its span is `{0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blade {
    n: usize,
    frame: Vec<Vec<f64>>,
    sign: f64,
}

impl Blade {
    /// Orthonormalizes `vectors` (modified Gram-Schmidt, one re-orthogonalization
    /// pass) and returns the unit blade together with `|v_1 ^ ... ^ v_k|`.
    pub fn from_frame(n: usize, vectors: &[Vec<f64>]) -> Result<(Self, f64)> {
        check_dim(n)?;
        if vectors.len() > n {
            return Err(Error::GradeOverflow {
                k: vectors.len(),
                l: 0,
                n,
            });
        }
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(invalid("frame vectors must be finite"));
            }
        }
        let o = linalg::gram_schmidt(vectors);
        if !(o.volume > DEPENDENCE_TOL) {
            return Err(Error::DegenerateFrame {
                magnitude: o.volume,
            });
        }
        Ok((
            Self {
                n,
                frame: o.frame,
                sign: 1.0,
            },
            o.volume,
        ))
    }

    /// Wraps a frame that is already orthonormal (checked to `1e-10`).
    pub fn from_orthonormal(n: usize, frame: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(n)?;
        for (i, u) in frame.iter().enumerate() {
            if u.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: u.len(),
                });
            }
            for (j, v) in frame.iter().enumerate().take(i + 1) {
                let target = if i == j { 1.0 } else { 0.0 };
                if math::abs(linalg::dot(u, v) - target) > 1e-10 {
                    return Err(invalid("frame is not orthonormal"));
                }
            }
        }
        Ok(Self {
            n,
            frame,
            sign: 1.0,
        })
    }

    pub(crate) fn from_orthonormal_unchecked(n: usize, frame: Vec<Vec<f64>>) -> Self {
        Self {
            n,
            frame,
            sign: 1.0,
        }
    }

    /// The grade-0 blade `+1` or `-1`.
    pub fn scalar(n: usize, positive: bool) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            frame: Vec::new(),
            sign: if positive { 1.0 } else { -1.0 },
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[Vec<f64>] {
        &self.frame
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// The same subspace with the opposite orientation.
    pub fn reversed(&self) -> Self {
        Self {
            sign: -self.sign,
            ..self.clone()
        }
    }

    /// Coefficient expansion of `sign * f_1 ^ ... ^ f_k`.
    pub fn to_multivector(&self) -> MultiVector {
        let mv = MultiVector::wedge_of_vectors(self.n, &self.frame)
            .expect("blade frame has consistent dimensions");
        mv.scale(self.sign)
    }

    /// Inner product of two blades of equal grade: `det[f_i . g_j]` with signs.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.grade() != other.grade() {
            return Err(Error::GradeMismatch {
                expected: self.grade(),
                found: other.grade(),
            });
        }
        Ok(self.sign * other.sign * linalg::gram_det(&self.frame, &other.frame))
    }

    /// `(P_w a, P_w^perp a)`, projections onto the span and its complement.
    pub fn project(&self, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut par = vec![0.0; self.n];
        for f in &self.frame {
            linalg::axpy(linalg::dot(a, f), f, &mut par);
        }
        let perp = linalg::sub(a, &par);
        (par, perp)
    }

    /// `|P_w a|^2`, without allocating.
    pub fn parallel_norm_sq(&self, a: &[f64]) -> f64 {
        self.frame.iter().map(|f| { let c = linalg::dot(a, f); c * c }).sum()
    }

    /// Whether `a` lies in the span: `|a ^ w| <= 1e-9 |a|`.
    pub fn contains(&self, a: &[f64]) -> bool {
        let an = linalg::norm(a);
        if an == 0.0 {
            return true;
        }
        // residual formed explicitly; |a|^2 - |P a|^2 cancels to ~1e-8
        let mut perp = a.to_vec();
        for f in &self.frame {
            let c = linalg::dot(a, f);
            perp.iter_mut().zip(f).for_each(|(p, x)| *p -= c * x);
        }
        linalg::norm(&perp) <= SPAN_TOL * an
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> MultiVector {
        MultiVector::basis_vector(n, i).unwrap()
    }

    #[test]
    fn lexicographic_basis_order() {
        let masks = basis_masks(4, 2);
        let tuples: Vec<Vec<usize>> = masks
            .iter()
            .map(|m| (0..4).filter(|i| m & (1 << i) != 0).collect())
            .collect();
        assert_eq!(
            tuples,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        for n in 1..=MAX_DIM {
            for k in 0..=n {
                for (pos, m) in basis_masks(n, k).into_iter().enumerate() {
                    assert_eq!(mask_rank(m, n), pos);
                }
            }
        }
    }

    #[test]
    fn wedge_of_basis_vectors() {
        let w = e(3, 0).wedge(&e(3, 1)).unwrap();
        assert_eq!(w.coeff(&[0, 1]), 1.0);
        assert_eq!(w.norm(), 1.0);
        let v = MultiVector::from_vector(&[0.3, -1.2, 2.0]).unwrap();
        assert_eq!(v.wedge(&v).unwrap().norm(), 0.0);
        // (e1 + e2) ^ e2 = e1 ^ e2
        let s = e(3, 0).add(&e(3, 1)).unwrap().wedge(&e(3, 1)).unwrap();
        assert_eq!(s.coeffs(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn wedge_rejects_bad_grades() {
        let a = MultiVector::basis_blade(3, &[0, 1]).unwrap();
        let b = MultiVector::basis_blade(3, &[1, 2]).unwrap();
        assert!(matches!(a.wedge(&b), Err(Error::GradeOverflow { .. })));
        let c = e(2, 0);
        assert!(matches!(a.wedge(&c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn interior_of_basis() {
        // e2 _| (e1 ^ e2) = -e1
        let w = MultiVector::basis_blade(2, &[0, 1]).unwrap();
        let r = e(2, 1).interior_left(&w).unwrap();
        assert_eq!(r.coeffs(), &[-1.0, 0.0]);
        // orthogonal vector contracts to zero
        let w3 = MultiVector::basis_blade(3, &[0, 1]).unwrap();
        assert_eq!(e(3, 2).interior_left(&w3).unwrap().norm(), 0.0);
        assert!(w3.interior_left(&e(3, 0)).is_err());
    }

    #[test]
    fn four_vector_worked_example() {
        // u2 _| (u1 ^ u2 ^ u3 ^ u4) = -u1 ^ u3 ^ u4 for an orthonormal frame
        let n = 5;
        let raw = vec![
            vec![1.0, 0.2, -0.3, 0.1, 0.5],
            vec![0.0, 1.0, 0.4, -0.2, 0.3],
            vec![0.3, 0.1, 1.0, 0.7, -0.1],
            vec![-0.2, 0.5, 0.1, 1.0, 0.6],
        ];
        let (b, _) = Blade::from_frame(n, &raw).unwrap();
        let u = b.frame();
        let omega = b.to_multivector();
        let u2 = MultiVector::from_vector(&u[1]).unwrap();
        let lhs = u2.interior_left(&omega).unwrap();
        let rhs = MultiVector::wedge_of_vectors(n, &[u[0].clone(), u[2].clone(), u[3].clone()])
            .unwrap()
            .scale(-1.0);
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn inner_products_of_basis_blades() {
        let a = MultiVector::basis_blade(3, &[0, 1]).unwrap();
        let b = MultiVector::basis_blade(3, &[0, 2]).unwrap();
        assert_eq!(a.inner(&a).unwrap(), 1.0);
        assert_eq!(a.inner(&b).unwrap(), 0.0);
        assert!(a.inner(&e(3, 0)).is_err());
    }

    #[test]
    fn blade_from_axis_box() {
        let (b, mag) = Blade::from_frame(3, &[vec![2.0, 0.0, 0.0], vec![0.0, 3.0, 0.0]]).unwrap();
        assert!((mag - 6.0).abs() < 1e-14);
        let mv = b.to_multivector();
        assert!((mv.coeff(&[0, 1]) - 1.0).abs() < 1e-15);
        let dep = Blade::from_frame(3, &[vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]);
        assert!(matches!(dep, Err(Error::DegenerateFrame { .. })));
    }

    #[test]
    fn rotation_preserves_top_grade() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let l = LinearMap::new(2, vec![c, -s, s, c]).unwrap();
        let w = MultiVector::basis_blade(2, &[0, 1]).unwrap();
        let out = l.push_forward(&w).unwrap();
        assert!((out.coeffs()[0] - 1.0).abs() < 1e-15);
        let id = LinearMap::identity(4).unwrap();
        let a = MultiVector::from_coeffs(4, 2, vec![1.0, -2.0, 0.5, 3.0, 0.0, 7.0]).unwrap();
        assert_eq!(id.push_forward(&a).unwrap(), a);
    }

    #[test]
    fn projections_and_membership() {
        let b = Blade::from_orthonormal(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let (par, perp) = b.project(&[1.0, 0.0, 1.0]);
        assert_eq!(par, vec![1.0, 0.0, 0.0]);
        assert_eq!(perp, vec![0.0, 0.0, 1.0]);
        let (_, perp) = b.project(&[0.3, -2.0, 0.0]);
        assert!(perp.iter().all(|x| *x == 0.0));
        assert!(b.contains(&[1.0, 0.0, 0.0]));
        assert!(!b.contains(&[0.0, 0.0, 1.0]));
        let s = Blade::scalar(3, false).unwrap();
        assert!(s.contains(&[0.0, 0.0, 0.0]));
        assert!(!s.contains(&[1.0, 0.0, 0.0]));
    }
}
