//! Dense complex linear algebra used by every other module: rank, null-space
//! bases, pseudo-inverses, orthonormalization and seeded Gaussian draws.
//!
//! SVDs are computed with `nalgebra`. Its decomposition is thin, so a wide
//! matrix is padded with zero rows to a square one whenever the full right
//! singular basis is required.

use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type ComplexVector = DVector<Complex64>;

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{})", self.rows(), self.cols())
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(Self(m))
        } else {
            Err(Error::InvalidInput("matrix contains non-finite entries".into()))
        }
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, data))
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<Complex64> = rows.iter().flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        Self::from_row_slice(r, c, &data)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self(&self.0 * &rhs.0))
    }

    pub fn mul_vec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if self.cols() != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to a vector of length {}",
                self.rows(),
                self.cols(),
                x.len()
            )));
        }
        Ok(&self.0 * x)
    }

    /// Leading `n` columns.
    pub fn leading_columns(&self, n: usize) -> Self {
        Self(self.0.columns(0, n.min(self.cols())).into_owned())
    }

    /// Horizontal concatenation; all blocks must share the row count `rows`.
    pub fn hstack(rows: usize, blocks: &[&ComplexMatrix]) -> Result<Self> {
        if let Some(b) = blocks.iter().find(|b| b.rows() != rows) {
            return Err(Error::DimensionMismatch(format!("block has {} rows, expected {rows}", b.rows())));
        }
        let cols = blocks.iter().map(|b| b.cols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            out.columns_mut(at, b.cols()).copy_from(&b.0);
            at += b.cols();
        }
        Ok(Self(out))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut s: Vec<f64> = self.0.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// `‖AᴴA − I‖₂`, the deviation of the columns from orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = &self.0.adjoint() * &self.0;
        let n = gram.nrows();
        Self(gram - DMatrix::identity(n, n)).spectral_norm()
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch, like the underlying `nalgebra` product.
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

fn ensure_finite(a: &ComplexMatrix) -> Result<()> {
    if a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix contains non-finite entries".into()))
    }
}

/// Relative rank threshold used when the caller passes `tol = 0`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Singular values sorted decreasing together with the matching right
/// singular vectors, completed to a full `cols × cols` unitary basis.
fn full_right_svd(a: &ComplexMatrix) -> (Vec<f64>, DMatrix<Complex64>) {
    let (m, n) = a.shape();
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.rows_mut(0, m).copy_from(&a.0);
        p
    } else {
        a.0.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let v = v_t.adjoint();
    let mut v_sorted = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        v_sorted.set_column(dst, &v.column(src));
    }
    let sorted: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    (sorted, v_sorted)
}

/// Number of singular values strictly above `tol × σ_max`.
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    ensure_finite(a)?;
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!("rank tolerance must be a finite nonnegative number, got {tol}")));
    }
    if a.is_empty() {
        return Ok(0);
    }
    let tol = if tol == 0.0 { default_rank_tol(a.rows(), a.cols()) } else { tol };
    let s = a.singular_values();
    let cutoff = tol * s[0];
    Ok(s.iter().filter(|&&x| x > cutoff).count())
}

/// Orthonormal basis of the right null space, one column per null direction.
pub fn null_space_basis(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_finite(a)?;
    let (m, n) = a.shape();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if m == 0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let (sigma, v) = full_right_svd(a);
    let cutoff = default_rank_tol(m, n) * sigma[0];
    let rank = sigma.iter().take(m.min(n)).filter(|&&x| x > cutoff).count();
    Ok(ComplexMatrix(v.columns(rank, n - rank).into_owned()))
}

/// Moore–Penrose pseudo-inverse via the SVD.
pub fn pseudo_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_finite(a)?;
    let (m, n) = a.shape();
    if a.is_empty() {
        return Ok(ComplexMatrix::zeros(n, m));
    }
    let svd = a.0.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma = &svd.singular_values;
    let s_max = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = default_rank_tol(m, n) * s_max;
    let mut inv_sigma_uh = u.adjoint();
    for (i, &s) in sigma.iter().enumerate() {
        let scale = if s > cutoff { 1.0 / s } else { 0.0 };
        inv_sigma_uh.row_mut(i).scale_mut(scale);
    }
    Ok(ComplexMatrix(v_t.adjoint() * inv_sigma_uh))
}

/// Orthonormal basis for the column space of a full-column-rank matrix
/// (thin QR). Fails if the columns are numerically dependent.
pub fn orthonormalize_columns(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_finite(a)?;
    let (m, n) = a.shape();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(m, 0));
    }
    if numerical_rank(a, 0.0)? < n {
        return Err(Error::InvalidInput(format!("{m}x{n} matrix does not have full column rank")));
    }
    Ok(ComplexMatrix(a.0.clone().qr().q()))
}

/// Solves `A x = b` for square invertible `A`.
pub fn solve_square(a: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector> {
    if a.rows() != a.cols() || a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "solve needs a square system, got {}x{} with rhs {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    if a.rows() == 0 {
        return Ok(ComplexVector::zeros(0));
    }
    a.0.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::InvalidInput("singular system".into()))
}

/// `log₂ det(I + ρ G Gᴴ)` through the singular values of `G`.
pub fn log2_det_identity_plus(g: &ComplexMatrix, rho: f64) -> f64 {
    g.singular_values().iter().map(|s| (1.0 + rho * s * s).log2()).sum()
}

/// `log₂ det` of a Hermitian positive-definite matrix (Cholesky).
pub fn log2_det_hpd(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("matrix is not Hermitian positive definite".into()))?;
    Ok(chol.l().diagonal().iter().map(|z| 2.0 * z.re.log2()).sum())
}

/// Deterministic generator for `(seed, stream)`. Distinct streams of the
/// same seed are independent, so one master seed can be split by purpose.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random-access child seed: the `index`-th word of stream `stream`.
pub fn child_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut rng = rng_for(seed, stream);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// i.i.d. CN(0, 1) entries drawn from `rng` in row-major order.
pub fn random_gaussian_from(rows: usize, cols: usize, rng: &mut impl RngCore) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = Complex64::new(re * scale, im * scale);
        }
    }
    ComplexMatrix(m)
}

/// i.i.d. circularly-symmetric complex Gaussian matrix, unit variance per
/// entry, deterministic in `seed`.
pub fn random_gaussian(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    random_gaussian_from(rows, cols, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_gaussian_vector(len: usize, rng: &mut impl RngCore) -> ComplexVector {
    let m = random_gaussian_from(len, 1, rng);
    m.0.column(0).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rank_of_identity_and_duplicated_row() {
        assert_eq!(numerical_rank(&ComplexMatrix::identity(3), 0.0).unwrap(), 3);
        let dup = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[1.0, 2.0]]).unwrap();
        assert_eq!(numerical_rank(&dup, 0.0).unwrap(), 1);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(0, 4), 0.0).unwrap(), 0);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3, 3), 0.0).unwrap(), 0);
    }

    #[test]
    fn rank_rejects_non_finite_and_bad_tol() {
        let bad = ComplexMatrix(DMatrix::from_element(2, 2, Complex64::new(f64::NAN, 0.0)));
        assert!(matches!(numerical_rank(&bad, 0.0), Err(Error::InvalidInput(_))));
        assert!(matches!(null_space_basis(&bad), Err(Error::InvalidInput(_))));
        assert!(numerical_rank(&ComplexMatrix::identity(2), -1.0).is_err());
        assert!(ComplexMatrix::from_row_slice(1, 1, &[Complex64::new(f64::INFINITY, 0.0)]).is_err());
    }

    #[test]
    fn rank_respects_explicit_tolerance() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1e-6]]).unwrap();
        assert_eq!(numerical_rank(&a, 0.0).unwrap(), 2);
        assert_eq!(numerical_rank(&a, 1e-3).unwrap(), 1);
    }

    #[test]
    fn null_space_of_zero_and_identity() {
        let n = null_space_basis(&ComplexMatrix::zeros(2, 3)).unwrap();
        assert_eq!(n.shape(), (3, 3));
        assert!(n.orthonormality_defect() < 1e-12);
        let n = null_space_basis(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(n.shape(), (3, 0));
        let n = null_space_basis(&ComplexMatrix::zeros(0, 2)).unwrap();
        assert_eq!(n.shape(), (2, 2));
    }

    #[test]
    fn null_space_of_random_wide_matrix() {
        let a = random_gaussian(2, 3, 11);
        let n = null_space_basis(&a).unwrap();
        assert_eq!(n.cols(), 1);
        assert!((&a * &n).spectral_norm() <= 1e-10 * a.spectral_norm());
        assert!((n.frobenius_norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pseudo_inverse_small_cases() {
        let i2 = ComplexMatrix::identity(2);
        let p = pseudo_inverse(&i2).unwrap();
        assert!(ComplexMatrix(p.0 - i2.0.clone()).spectral_norm() < 1e-15);

        let d = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]]).unwrap();
        let p = pseudo_inverse(&d).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.0]]).unwrap();
        assert!(ComplexMatrix(p.0 - want.0).spectral_norm() < 1e-15);

        let a = random_gaussian(4, 2, 3);
        let p = pseudo_inverse(&a).unwrap();
        let err = ComplexMatrix((&p * &a).0 - DMatrix::identity(2, 2)).spectral_norm();
        assert!(err < 1e-10, "A+A - I = {err}");
    }

    #[test]
    fn gaussian_shapes_and_determinism() {
        let e = random_gaussian(0, 3, 5);
        assert_eq!(e.shape(), (0, 3));
        assert_eq!(random_gaussian(3, 4, 9), random_gaussian(3, 4, 9));
        assert_ne!(random_gaussian(3, 4, 9), random_gaussian(3, 4, 10));
    }

    #[test]
    fn gaussian_moments() {
        let g = random_gaussian(1000, 1, 7);
        let n = 1000.0;
        let mean: Complex64 = g.0.iter().sum::<Complex64>() / n;
        assert!(mean.norm() <= 0.1, "mean {mean}");
        let var = g.0.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
        assert!((0.9..=1.1).contains(&var), "variance {var}");
        let re_var = g.0.iter().map(|z| (z.re - mean.re).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((0.4..=0.6).contains(&re_var), "real-part variance {re_var}");
    }

    #[test]
    fn child_seeds_are_stable_and_distinct() {
        assert_eq!(child_seed(1, 2, 3), child_seed(1, 2, 3));
        assert_ne!(child_seed(1, 2, 3), child_seed(1, 2, 4));
        assert_ne!(child_seed(1, 2, 3), child_seed(1, 3, 3));
    }

    #[test]
    fn orthonormalize_and_log_det() {
        let a = random_gaussian(4, 3, 1);
        let q = orthonormalize_columns(&a).unwrap();
        assert!(q.orthonormality_defect() < 1e-12);
        // Same column space: projecting A onto span(Q) is lossless.
        let proj = &(&q * &q.adjoint()) * &a;
        assert!(ComplexMatrix(proj.0 - a.0.clone()).spectral_norm() < 1e-12);

        let g = ComplexMatrix::from_row_slice(1, 1, &[c(2.0)]).unwrap();
        assert!((log2_det_identity_plus(&g, 3.0) - 13f64.log2()).abs() < 1e-12);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0), c(8.0)]));
        assert!((log2_det_hpd(&m).unwrap() - 4.0).abs() < 1e-12);
    }
}
