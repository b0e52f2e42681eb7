mod common;

use common::*;
use gcm::linalg::{cholesky_logdet, hermitian_eigenvalues, schur_complement, spd_inverse, symmetric_eigen, SymMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn cofactor_oracle_sanity() {
    let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
    assert_eq!(cofactor_det(&m), 4.0);
    assert_eq!(cofactor_det(&DMatrix::identity(5, 5)), 1.0);
}

#[test]
fn schur_determinant_factorization_1000_matrices() {
    for t in 0..1000 {
        let mut r = rng(101, t);
        let n = r.random_range(2..=12);
        let split = r.random_range(1..n);
        let m = random_pd(&mut r, n, 0.1);
        let top: Vec<usize> = (0..split).collect();
        let factored = cholesky_logdet(&m.principal_submatrix(&top)).unwrap()
            + cholesky_logdet(&schur_complement(&m, split).unwrap()).unwrap();
        let direct = m.as_matrix().determinant();
        let rel = (factored.exp() - direct).abs() / direct.abs();
        assert!(rel <= 1e-9, "trial {t}: n={n} split={split} rel={rel:e}");
    }
}

#[test]
fn logdet_matches_cofactor_expansion() {
    for t in 0..300 {
        let mut r = rng(102, t);
        let n = r.random_range(1..=7);
        let m = random_pd(&mut r, n, 0.05);
        let oracle = cofactor_det(m.as_matrix());
        let got = cholesky_logdet(&m).unwrap();
        assert!(
            (got - oracle.ln()).abs() <= 1e-10 * (1.0 + oracle.ln().abs()),
            "trial {t}"
        );
    }
}

#[test]
fn equal_determinants_of_ordered_pair_force_equality() {
    for t in 0..200 {
        let mut r = rng(103, t);
        let n = r.random_range(1..=6);
        let b = random_pd(&mut r, n, 0.1);
        // A = B: equal determinants and zero difference
        let a = b.clone();
        assert!(close(cholesky_logdet(&a).unwrap(), cholesky_logdet(&b).unwrap(), 1e-12));
        assert_eq!((a.as_matrix() - b.as_matrix()).norm(), 0.0);
        // A = B + vvᵀ with v ≠ 0: strictly larger determinant
        let v = random_matrix(&mut r, n, 1);
        let bumped = SymMatrix::new(b.as_matrix() + &v * v.transpose()).unwrap();
        let gap = cholesky_logdet(&bumped).unwrap() - cholesky_logdet(&b).unwrap();
        assert!(gap > 0.0, "trial {t}: gap {gap:e}");
    }
}

#[test]
fn channel_contraction_quadratic_form() {
    // Kᵀ(KBKᵀ + M)⁻¹K ≤ B⁻¹
    for t in 0..500 {
        let mut r = rng(104, t);
        let n = r.random_range(1..=6);
        let b = random_pd(&mut r, n, 0.1);
        let m = random_psd(&mut r, n, n);
        let k = random_matrix(&mut r, n, n) * 2.0;
        let inner = &k * b.as_matrix() * k.transpose() + m.as_matrix();
        let diff = spd_inverse(&b).unwrap().into_matrix() - k.transpose() * inv(&inner) * &k;
        let scale = 1.0 + diff.norm();
        assert!(min_eigenvalue(&diff) >= -1e-9 * scale, "trial {t}");
    }
}

/// Blocks of a random positive definite 3×3-block matrix.
struct ThreeBlock {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    z: DMatrix<f64>,
}

impl ThreeBlock {
    fn random(r: &mut rand_chacha::ChaCha8Rng) -> Self {
        let (na, nb, nc) = (r.random_range(1..=3), r.random_range(1..=3), r.random_range(1..=3));
        let g = random_pd(r, na + nb + nc, 0.2).into_matrix();
        let blk = |r0: usize, c0: usize, h: usize, w: usize| g.view((r0, c0), (h, w)).into_owned();
        ThreeBlock {
            a: blk(0, 0, na, na),
            b: blk(na, na, nb, nb),
            c: blk(na + nb, na + nb, nc, nc),
            x: blk(0, na, na, nb),
            y: blk(na, na + nb, nb, nc),
            z: blk(0, na + nb, na, nc),
        }
    }

    fn assemble(&self) -> DMatrix<f64> {
        let (na, nb, nc) = (self.a.nrows(), self.b.nrows(), self.c.nrows());
        let n = na + nb + nc;
        let mut g = DMatrix::zeros(n, n);
        let mut put = |r0: usize, c0: usize, m: &DMatrix<f64>| {
            g.view_mut((r0, c0), m.shape()).copy_from(m);
            g.view_mut((c0, r0), (m.ncols(), m.nrows())).copy_from(&m.transpose());
        };
        put(0, 0, &self.a);
        put(na, na, &self.b);
        put(na + nb, na + nb, &self.c);
        put(0, na, &self.x);
        put(na, na + nb, &self.y);
        put(0, na + nb, &self.z);
        g
    }

    /// The four differences `lhs − rhs` whose positivity is asserted.
    fn differences(&self) -> [DMatrix<f64>; 4] {
        let hcat = |l: &DMatrix<f64>, r: &DMatrix<f64>| {
            let mut m = DMatrix::zeros(l.nrows(), l.ncols() + r.ncols());
            m.view_mut((0, 0), l.shape()).copy_from(l);
            m.view_mut((0, l.ncols()), r.shape()).copy_from(r);
            m
        };
        let square = |p: &DMatrix<f64>, q: &DMatrix<f64>, s: &DMatrix<f64>| {
            let top = hcat(p, q);
            let bottom = hcat(&q.transpose(), s);
            let mut m = DMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
            m.view_mut((0, 0), top.shape()).copy_from(&top);
            m.view_mut((top.nrows(), 0), bottom.shape()).copy_from(&bottom);
            m
        };
        let xz = hcat(&self.x, &self.z);
        let bc = square(&self.b, &self.y, &self.c);
        let left = &xz * inv(&bc) * xz.transpose();
        let zy = hcat(&self.z.transpose(), &self.y.transpose());
        let ab = square(&self.a, &self.x, &self.b);
        let right = &zy * inv(&ab) * zy.transpose();
        [
            &left - &self.x * inv(&self.b) * self.x.transpose(),
            &left - &self.z * inv(&self.c) * self.z.transpose(),
            &right - self.z.transpose() * inv(&self.a) * &self.z,
            &right - self.y.transpose() * inv(&self.b) * &self.y,
        ]
    }
}

#[test]
fn three_block_quadratic_form_inequalities() {
    for t in 0..500 {
        let mut r = rng(105, t);
        let blocks = ThreeBlock::random(&mut r);
        for (i, d) in blocks.differences().iter().enumerate() {
            assert!(
                min_eigenvalue(d) >= -1e-9,
                "trial {t} inequality {i}: {:e}",
                min_eigenvalue(d)
            );
        }
    }
}

/// Adds a doubling multiple of `I` to the chosen diagonal blocks until the
/// assembled matrix is safely positive definite.
fn repair(blocks: &mut ThreeBlock, grow: [bool; 3]) {
    let mut shift = 1e-6;
    while min_eigenvalue(&blocks.assemble()) <= 1e-6 {
        for (block, on) in [&mut blocks.a, &mut blocks.b, &mut blocks.c].into_iter().zip(grow) {
            if on {
                *block += DMatrix::identity(block.nrows(), block.nrows()) * shift;
            }
        }
        shift *= 2.0;
    }
}

fn tight(d: &DMatrix<f64>) -> bool {
    d.norm() <= 1e-9
}

#[test]
fn three_block_equality_conditions() {
    for t in 0..500 {
        let mut r = rng(106, t);
        let base = ThreeBlock::random(&mut r);

        // Z = X B⁻¹ Y: the first and fourth inequalities are tight
        let mut markov = ThreeBlock {
            z: &base.x * inv(&base.b) * &base.y,
            ..base
        };
        repair(&mut markov, [true, false, true]);
        let d = markov.differences();
        assert!(
            tight(&d[0]) && tight(&d[3]),
            "trial {t}: {:e} {:e}",
            d[0].norm(),
            d[3].norm()
        );

        // X = Z C⁻¹ Yᵀ: the second inequality is tight
        let base = ThreeBlock::random(&mut r);
        let mut second = ThreeBlock {
            x: &base.z * inv(&base.c) * base.y.transpose(),
            ..base
        };
        repair(&mut second, [true, true, false]);
        assert!(tight(&second.differences()[1]), "trial {t}");

        // Y = Xᵀ A⁻¹ Z: the third inequality is tight
        let base = ThreeBlock::random(&mut r);
        let mut third = ThreeBlock {
            y: base.x.transpose() * inv(&base.a) * &base.z,
            ..base
        };
        repair(&mut third, [false, true, true]);
        assert!(tight(&third.differences()[2]), "trial {t}");

        // away from Z = X B⁻¹ Y the first and fourth are strict
        let mut off = ThreeBlock::random(&mut r);
        off.z = &off.x * inv(&off.b) * &off.y + random_matrix(&mut r, off.z.nrows(), off.z.ncols()) * 0.05;
        repair(&mut off, [true, false, true]);
        let d = off.differences();
        assert!(!tight(&d[0]) && !tight(&d[3]), "trial {t}");
    }
}

#[test]
fn markov_condition_does_not_tighten_second_inequality() {
    // With Z = X B⁻¹ Y the second difference reduces to D(I − EEᵀ)Dᵀ in
    // normalized blocks, which vanishes only when D = 0.
    let mut strict = 0;
    for t in 0..100 {
        let mut r = rng(109, t);
        let base = ThreeBlock::random(&mut r);
        let mut markov = ThreeBlock {
            z: &base.x * inv(&base.b) * &base.y,
            ..base
        };
        repair(&mut markov, [true, false, true]);
        if markov.differences()[1].norm() > 1e-6 {
            strict += 1;
        }
    }
    assert_eq!(strict, 100);
}

#[test]
fn symmetric_eigen_residual() {
    for t in 0..200 {
        let mut r = rng(107, t);
        let n = r.random_range(1..=16);
        let g = random_matrix(&mut r, n, n);
        let s = SymMatrix::new(&g + g.transpose()).unwrap();
        let (vals, vecs) = symmetric_eigen(&s).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let residual = s.as_matrix() * &vecs - &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals));
        assert!(residual.norm() <= 1e-10 * (1.0 + s.as_matrix().norm()), "trial {t}");
    }
}

#[test]
fn hermitian_spectrum_moments() {
    for t in 0..100 {
        let mut r = rng(108, t);
        let n = r.random_range(1..=8);
        let g = random_matrix(&mut r, n, n);
        let h = random_matrix(&mut r, n, n);
        let re = SymMatrix::new(&g + g.transpose()).unwrap();
        let im = &h - h.transpose();
        let vals = hermitian_eigenvalues(&re, &im).unwrap();
        assert_eq!(vals.len(), n);
        // trace and Frobenius norm of H = Re + i·Im
        let trace: f64 = vals.iter().sum();
        let frob: f64 = vals.iter().map(|v| v * v).sum();
        assert!(close(trace, re.as_matrix().trace(), 1e-10 * (1.0 + trace.abs())));
        let expected = re.as_matrix().norm_squared() + im.norm_squared();
        assert!(close(frob, expected, 1e-9 * (1.0 + expected)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn logdet_is_additive_under_scaling(seed in any::<u64>(), n in 1usize..8, s in 0.1f64..10.0) {
        let m = random_pd(&mut rng(seed, 0), n, 0.1);
        let lhs = cholesky_logdet(&m.scaled(s)).unwrap();
        let rhs = cholesky_logdet(&m).unwrap() + n as f64 * s.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn spd_inverse_is_inverse(seed in any::<u64>(), n in 1usize..10) {
        let m = random_pd(&mut rng(seed, 1), n, 0.1);
        let product = m.as_matrix() * spd_inverse(&m).unwrap().as_matrix();
        prop_assert!((product - DMatrix::identity(n, n)).norm() <= 1e-9);
    }

    #[test]
    fn cholesky_rejects_indefinite(seed in any::<u64>(), n in 2usize..8) {
        let mut r = rng(seed, 2);
        let m = random_pd(&mut r, n, 0.1);
        let i = r.random_range(0..n);
        let mut bad = m.into_matrix();
        bad[(i, i)] = -1.0;
        let bad = SymMatrix::new(bad).unwrap();
        prop_assert!(cholesky_logdet(&bad).is_err());
    }
}
