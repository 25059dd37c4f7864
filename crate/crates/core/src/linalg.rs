//! Small dense complex linear algebra for Gaussian likelihoods.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest accepted condition number of a matrix handed to [`HermitianFactor`].
pub const CONDITION_LIMIT: f64 = 1e12;

/// Cholesky factor `A = L L^H` of a Hermitian positive definite matrix,
/// stored row-major and packed for fast triangular solves.
#[derive(Debug, Clone)]
pub struct HermitianFactor {
    dim: usize,
    /// Strictly lower part, row `i` occupies `i * (i - 1) / 2 ..`.
    lower: Vec<Complex64>,
    inv_diag: Vec<f64>,
    logdet: f64,
}

impl HermitianFactor {
    pub fn new(a: &CMatrix) -> Result<Self> {
        let dim = a.nrows();
        if a.ncols() != dim || dim == 0 {
            return Err(Error::InvalidParameter("factorization needs a nonempty square matrix".into()));
        }
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if hermitian_defect(a) > 1e-10 * scale.max(1.0) {
            return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
        }
        let eig = nalgebra::SymmetricEigen::new(a.clone()).eigenvalues;
        let max = eig.max();
        let min = eig.min();
        if min <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {min:e}")));
        }
        let condition = max / min;
        if condition > CONDITION_LIMIT {
            return Err(Error::IllConditioned {
                condition,
                limit: CONDITION_LIMIT,
            });
        }
        let chol = nalgebra::Cholesky::new(a.clone())
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?;
        let l = chol.l();
        let mut lower = Vec::with_capacity(dim * (dim - 1) / 2);
        let mut inv_diag = Vec::with_capacity(dim);
        let mut logdet = 0.0;
        for i in 0..dim {
            for j in 0..i {
                lower.push(l[(i, j)]);
            }
            let d = l[(i, i)].re;
            inv_diag.push(1.0 / d);
            logdet += 2.0 * d.ln();
        }
        Ok(Self {
            dim,
            lower,
            inv_diag,
            logdet,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Natural log of `det A`.
    pub fn logdet(&self) -> f64 {
        self.logdet
    }

    /// `y^H A^{-1} y`, using `scratch` (resized as needed) for `L^{-1} y`.
    pub fn quad_form_inv(&self, y: &[Complex64], scratch: &mut Vec<Complex64>) -> f64 {
        debug_assert_eq!(y.len(), self.dim);
        scratch.clear();
        let mut acc = 0.0;
        let mut row = 0;
        for i in 0..self.dim {
            let mut s = y[i];
            for (l, z) in self.lower[row..row + i].iter().zip(scratch.iter()) {
                s -= l * z;
            }
            row += i;
            let z = s * self.inv_diag[i];
            acc += z.norm_sqr();
            scratch.push(z);
        }
        acc
    }

    /// `A^{-1} B` column by column.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let mut out = b.clone();
        for mut col in out.column_iter_mut() {
            // forward: L z = b
            let mut row = 0;
            for i in 0..self.dim {
                let mut s = col[i];
                for j in 0..i {
                    s -= self.lower[row + j] * col[j];
                }
                row += i;
                col[i] = s * self.inv_diag[i];
            }
            // backward: L^H x = z
            for i in (0..self.dim).rev() {
                let mut s = col[i];
                for j in i + 1..self.dim {
                    s -= self.lower[j * (j - 1) / 2 + i].conj() * col[j];
                }
                col[i] = s * self.inv_diag[i];
            }
        }
        out
    }
}

/// Largest `|A - A^H|` entry.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Log-density of `CN(0, Sigma)` at `y`, given a factor of `Sigma`.
pub fn complex_gaussian_logpdf(y: &[Complex64], factor: &HermitianFactor, scratch: &mut Vec<Complex64>) -> f64 {
    -factor.quad_form_inv(y, scratch) - factor.logdet() - y.len() as f64 * std::f64::consts::PI.ln()
}

/// Compact PSD square root: returns `F` (n x r) with `F F^H = A`, dropping
/// eigenvalues at or below `tol * max(1, lambda_max)` and clamping negatives.
pub fn psd_factor(a: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidParameter("PSD factor needs a square matrix".into()));
    }
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let lmax = eig.eigenvalues.max();
    let cutoff = tol * lmax.max(1.0);
    if eig.eigenvalues.iter().any(|&l| l < -1e3 * cutoff.max(f64::EPSILON)) {
        return Err(Error::NotPositiveDefinite(format!(
            "covariance has eigenvalue {:e}",
            eig.eigenvalues.min()
        )));
    }
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > cutoff).collect();
    let mut f = CMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let s = eig.eigenvalues[i].sqrt();
        for r in 0..n {
            f[(r, c)] = eig.eigenvectors[(r, i)] * s;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_hpd(n: usize, seed: u64) -> CMatrix {
        let mut rng = crate::rng::seeded(seed);
        let b = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        &b * b.adjoint() + CMatrix::identity(n, n) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn quad_form_and_logdet_match_dense() {
        let a = random_hpd(7, 3);
        let f = HermitianFactor::new(&a).unwrap();
        let y = CVector::from_fn(7, |i, _| Complex64::new(i as f64 * 0.3 - 1.0, 0.7 - i as f64 * 0.1));
        let inv = a.clone().try_inverse().unwrap();
        let dense = (y.adjoint() * &inv * &y)[(0, 0)].re;
        let mut scratch = Vec::new();
        assert!((f.quad_form_inv(y.as_slice(), &mut scratch) - dense).abs() < 1e-10 * dense.abs());
        let det = a.determinant();
        assert!((f.logdet() - det.re.ln()).abs() < 1e-10);
        let sol = f.solve(&CMatrix::identity(7, 7));
        assert!((sol - inv).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn rejects_indefinite_and_ill_conditioned() {
        let mut a = CMatrix::identity(3, 3);
        a[(2, 2)] = Complex64::new(-1.0, 0.0);
        assert!(matches!(HermitianFactor::new(&a), Err(Error::NotPositiveDefinite(_))));
        a[(2, 2)] = Complex64::new(1e-14, 0.0);
        assert!(matches!(HermitianFactor::new(&a), Err(Error::IllConditioned { .. })));
        let mut b = CMatrix::identity(2, 2);
        b[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(HermitianFactor::new(&b).is_err());
    }

    #[test]
    fn logpdf_scalar() {
        // CN(0, 2) at 0: -ln(2 pi)
        let a = CMatrix::from_element(1, 1, Complex64::new(2.0, 0.0));
        let f = HermitianFactor::new(&a).unwrap();
        let v = complex_gaussian_logpdf(&[Complex64::new(0.0, 0.0)], &f, &mut Vec::new());
        assert!((v + (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
    }

    #[test]
    fn psd_factor_reconstructs_rank_deficient() {
        let ones = CMatrix::from_element(5, 5, Complex64::new(1.0, 0.0));
        let f = psd_factor(&ones, 1e-10).unwrap();
        assert_eq!(f.ncols(), 1);
        assert!((&f * f.adjoint() - &ones).iter().all(|z| z.norm() < 1e-12));
        let a = random_hpd(6, 8);
        let g = psd_factor(&a, 1e-10).unwrap();
        assert!((&g * g.adjoint() - &a).iter().all(|z| z.norm() < 1e-10));
    }
}
