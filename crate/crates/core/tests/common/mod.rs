//! Test-only helpers: an independent determinant and seeded random matrices.
#![allow(dead_code)]

use gcm::linalg::SymMatrix;
use gcm::rng::stream_rng;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Determinant by cofactor expansion along the first row. Exponential cost,
/// shares no code with the library; keep to dim ≤ 8.
pub fn cofactor_det(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    match n {
        0 => 1.0,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => {
            let mut total = 0.0;
            for j in 0..n {
                if m[(0, j)] == 0.0 {
                    continue;
                }
                let minor = m.clone().remove_row(0).remove_column(j);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * m[(0, j)] * cofactor_det(&minor);
            }
            total
        }
    }
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    stream_rng(seed, stream)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// `GGᵀ + shift·I`: positive definite with eigenvalues ≥ `shift`.
pub fn random_pd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> SymMatrix {
    let g = random_matrix(rng, n, n);
    SymMatrix::new(&g * g.transpose() + DMatrix::identity(n, n) * shift).unwrap()
}

/// `GGᵀ` with `G` of shape n×rank: positive semidefinite, rank ≤ `rank`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> SymMatrix {
    let g = random_matrix(rng, n, rank);
    SymMatrix::new(&g * g.transpose()).unwrap()
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let s = SymMatrix::new(m.clone()).unwrap();
    gcm::linalg::symmetric_eigenvalues(&s).unwrap()[0]
}

pub fn inv(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().try_inverse().expect("invertible")
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
