//! Dense real linear algebra used by the correlation measure.
//!
//! Everything positive definite goes through a Cholesky factor: determinants
//! are returned as natural logarithms so that products over many modes never
//! overflow. Hermitian problems are mapped onto the real symmetric embedding
//! `[[Re, -Im], [Im, Re]]`, whose spectrum is the Hermitian spectrum with every
//! eigenvalue doubled.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative pivot threshold for Cholesky, scaled by the largest diagonal entry.
pub const PD_RELATIVE_TOLERANCE: f64 = 1e-12;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// A real symmetric matrix. Symmetry is exact: construction averages the
/// matrix with its transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
        }
        let n = m.nrows();
        let mut s = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        Ok(SymMatrix(s))
    }

    /// Builds from `dim * dim` row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymMatrix(&self.0 * factor)
    }

    /// Principal submatrix on the given row/column indices, in the given order.
    pub fn principal_submatrix(&self, indices: &[usize]) -> SymMatrix {
        let k = indices.len();
        SymMatrix(DMatrix::from_fn(k, k, |i, j| self.0[(indices[i], indices[j])]))
    }

    /// Off-diagonal block with the given rows and columns.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.0[(rows[i], cols[j])])
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        self.0.diagonal().iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Standard symplectic form on `modes` modes: n copies of `[[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    pub modes: usize,
}

impl SymplecticForm {
    pub fn new(modes: usize) -> Self {
        SymplecticForm { modes }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        symplectic_form(self.modes)
    }
}

pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(2 * modes, 2 * modes);
    for j in 0..modes {
        d[(2 * j, 2 * j + 1)] = 1.0;
        d[(2 * j + 1, 2 * j)] = -1.0;
    }
    d
}

/// Lower Cholesky factor `L` with `m = L Lᵀ`.
pub fn cholesky_lower(m: &SymMatrix) -> Result<DMatrix<f64>> {
    let n = m.dim();
    let a = m.as_matrix();
    let threshold = PD_RELATIVE_TOLERANCE * m.max_abs_diagonal();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= threshold || d <= 0.0 {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Natural logarithm of the determinant of a positive definite matrix.
pub fn cholesky_logdet(m: &SymMatrix) -> Result<f64> {
    let l = cholesky_lower(m)?;
    Ok(2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// Solves `L X = B` for lower-triangular `L` by forward substitution.
fn forward_substitute(l: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    for c in 0..b.ncols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Inverse of a positive definite matrix through its Cholesky factor.
pub fn spd_inverse(m: &SymMatrix) -> Result<SymMatrix> {
    let l = cholesky_lower(m)?;
    let linv = forward_substitute(&l, &DMatrix::identity(m.dim(), m.dim()));
    SymMatrix::new(linv.transpose() * linv)
}

/// `D − Cᵀ A⁻¹ C` for the 2×2 block split of `m` at `split` (A is the
/// top-left `split × split` block).
pub fn schur_complement(m: &SymMatrix, split: usize) -> Result<SymMatrix> {
    let n = m.dim();
    if split == 0 || split >= n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            actual: split,
        });
    }
    let head: Vec<usize> = (0..split).collect();
    let tail: Vec<usize> = (split..n).collect();
    let a = m.principal_submatrix(&head);
    let c = m.block(&head, &tail);
    let d = m.principal_submatrix(&tail);
    let l = cholesky_lower(&a)?;
    // Y = L⁻¹ C, so Cᵀ A⁻¹ C = Yᵀ Y
    let y = forward_substitute(&l, &c);
    SymMatrix::new(d.into_matrix() - y.transpose() * y)
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn symmetric_eigen(m: &SymMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or(Error::NonConvergence)?;
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.dim(), m.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigenvalues in ascending order.
pub fn symmetric_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    symmetric_eigen(m).map(|(values, _)| values)
}

/// Ascending eigenvalues of the Hermitian matrix `re + i·im`.
pub fn hermitian_eigenvalues(re: &SymMatrix, im: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = re.dim();
    if im.nrows() != n || im.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: im.nrows().max(im.ncols()),
        });
    }
    let mut embed = DMatrix::<f64>::zeros(2 * n, 2 * n);
    embed.view_mut((0, 0), (n, n)).copy_from(re.as_matrix());
    embed.view_mut((n, n), (n, n)).copy_from(re.as_matrix());
    embed.view_mut((0, n), (n, n)).copy_from(&(-im));
    embed.view_mut((n, 0), (n, n)).copy_from(im);
    let doubled = symmetric_eigenvalues(&SymMatrix::new(embed)?)?;
    // every eigenvalue appears twice in the embedding
    Ok(doubled.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Smallest eigenvalue of the Hermitian matrix `re + i·im`.
pub fn hermitian_min_eigenvalue(re: &SymMatrix, im: &DMatrix<f64>) -> Result<f64> {
    Ok(hermitian_eigenvalues(re, im)?[0])
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &DMatrix<f64>) -> Result<f64> {
    let gram = SymMatrix::new(m.transpose() * m)?;
    let top = *symmetric_eigenvalues(&gram)?.last().unwrap_or(&0.0);
    Ok(top.max(0.0).sqrt())
}
