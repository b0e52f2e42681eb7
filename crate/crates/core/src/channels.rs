//! Gaussian channels `Γ ↦ KΓKᵀ + M`, `d ↦ Kd + d̄` and Gaussian unitaries
//! (symplectic matrices), applied globally or to a single party.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gaussian::{quadrature_indices, PartitionedCovariance};
use crate::linalg::{self, symplectic_form, SymMatrix};
use crate::rng::stream_rng;

/// Minimum eigenvalue allowed for the noise matrix `M`.
pub const NOISE_PSD_TOLERANCE: f64 = 1e-10;
/// Minimum eigenvalue allowed for `M + i(Δ − KΔKᵀ)`.
pub const CP_TOLERANCE: f64 = 1e-9;
/// Maximum `‖SΔSᵀ − Δ‖_F` for a symplectic matrix.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    modes: usize,
    k: DMatrix<f64>,
    m: SymMatrix,
    dbar: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReport {
    /// Minimum eigenvalue of `M + i(Δ − KΔKᵀ)`; nonnegative for CP channels.
    pub cp_certificate: f64,
    /// `det M ≥ (det K − 1)²`, the single-mode validity inequality.
    pub det_condition: bool,
}

/// Evaluates both validity criteria without rejecting anything.
pub fn check_channel(k: &DMatrix<f64>, m: &SymMatrix) -> Result<ChannelReport> {
    let n2 = m.dim();
    if k.nrows() != n2 || k.ncols() != n2 || !n2.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: n2,
            actual: k.nrows().max(k.ncols()),
        });
    }
    let delta = symplectic_form(n2 / 2);
    let im = &delta - k * &delta * k.transpose();
    let cp_certificate = linalg::hermitian_min_eigenvalue(m, &im)?;
    let det_m = m.as_matrix().determinant();
    let det_k = k.determinant();
    let rhs = (det_k - 1.0) * (det_k - 1.0);
    let det_condition = det_m >= rhs - 1e-12 * rhs.abs().max(1.0);
    Ok(ChannelReport {
        cp_certificate,
        det_condition,
    })
}

impl GaussianChannel {
    /// Validates that `M ≥ 0` and that the channel is completely positive.
    pub fn new(k: DMatrix<f64>, m: DMatrix<f64>, dbar: DVector<f64>) -> Result<Self> {
        let n2 = k.nrows();
        if n2 == 0 || !n2.is_multiple_of(2) || k.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2.max(2),
                actual: k.ncols(),
            });
        }
        if m.nrows() != n2 || m.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                actual: m.nrows(),
            });
        }
        if dbar.len() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                actual: dbar.len(),
            });
        }
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * m.amax().max(1.0) {
            return Err(Error::InvalidChannel(format!(
                "noise matrix is not symmetric ({asym:e})"
            )));
        }
        let m = SymMatrix::new(m)?;
        let min_noise = linalg::symmetric_eigenvalues(&m)?[0];
        if min_noise < -NOISE_PSD_TOLERANCE {
            return Err(Error::InvalidChannel(format!(
                "noise matrix has eigenvalue {min_noise:e}"
            )));
        }
        let report = check_channel(&k, &m)?;
        if report.cp_certificate < -CP_TOLERANCE {
            return Err(Error::InvalidChannel(format!(
                "not completely positive: min eigenvalue of M + i(D - K D K^T) is {:e}",
                report.cp_certificate
            )));
        }
        Ok(GaussianChannel {
            modes: n2 / 2,
            k,
            m,
            dbar,
        })
    }

    pub fn identity(modes: usize) -> Self {
        let n2 = 2 * modes;
        GaussianChannel {
            modes,
            k: DMatrix::identity(n2, n2),
            m: SymMatrix::new(DMatrix::zeros(n2, n2)).expect("square"),
            dbar: DVector::zeros(n2),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn m(&self) -> &SymMatrix {
        &self.m
    }

    pub fn dbar(&self) -> &DVector<f64> {
        &self.dbar
    }

    pub fn report(&self) -> ChannelReport {
        check_channel(&self.k, &self.m).expect("dimensions validated on construction")
    }

    /// The channel `self ∘ first`: `(K₂K₁, K₂M₁K₂ᵀ + M₂, K₂d̄₁ + d̄₂)`.
    pub fn after(&self, first: &GaussianChannel) -> Result<GaussianChannel> {
        if self.modes != first.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                actual: first.modes,
            });
        }
        let k = &self.k * &first.k;
        let m = &self.k * first.m.as_matrix() * self.k.transpose() + self.m.as_matrix();
        let dbar = &self.k * &first.dbar + &self.dbar;
        let m = SymMatrix::new(m)?;
        Ok(GaussianChannel {
            modes: self.modes,
            k,
            m,
            dbar,
        })
    }
}

/// Random channel with `K` entries uniform in `[−1.5, 1.5]` and
/// `M = (‖KΔKᵀ − Δ‖₂ + noise_floor)·I`, which is always completely positive.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, modes: usize, noise_floor: f64) -> GaussianChannel {
    let n2 = 2 * modes;
    let k = DMatrix::from_fn(n2, n2, |_, _| rng.random_range(-1.5..=1.5));
    noise_bounded_channel(k, noise_floor)
}

/// Channel with the given `K` and the smallest isotropic noise that certifies
/// complete positivity, plus `noise_floor`.
pub fn noise_bounded_channel(k: DMatrix<f64>, noise_floor: f64) -> GaussianChannel {
    let n2 = k.nrows();
    let delta = symplectic_form(n2 / 2);
    let defect = &k * &delta * k.transpose() - &delta;
    let c = linalg::operator_norm(&defect).expect("finite matrix") + noise_floor;
    GaussianChannel {
        modes: n2 / 2,
        k,
        m: SymMatrix::identity(n2).scaled(c),
        dbar: DVector::zeros(n2),
    }
}

pub fn make_random_channel(modes: usize, seed: u64, noise_floor: f64) -> Result<GaussianChannel> {
    if modes == 0 {
        return Err(Error::InvalidParams("modes must be >= 1".into()));
    }
    Ok(random_channel(&mut stream_rng(seed, 0), modes, noise_floor))
}

/// Applies `channel` to the modes of `party` (or to all modes when `party`
/// is `None`).
pub fn apply_channel(
    state: &PartitionedCovariance,
    channel: &GaussianChannel,
    party: Option<usize>,
) -> Result<PartitionedCovariance> {
    let target = target_quadratures(state, party)?;
    if target.len() != 2 * channel.modes {
        return Err(Error::DimensionMismatch {
            expected: target.len() / 2,
            actual: channel.modes,
        });
    }
    let n2 = 2 * state.modes();
    let k_full = embed(n2, &target, channel.k(), true);
    let m_full = embed(n2, &target, channel.m().as_matrix(), false);
    let gamma = &k_full * state.cm().as_matrix() * k_full.transpose() + m_full;
    let out = PartitionedCovariance::new(SymMatrix::new(gamma)?, state.partition().clone())?;
    match state.displacement() {
        Some(d) => {
            let mut shift = DVector::zeros(n2);
            for (i, &row) in target.iter().enumerate() {
                shift[row] = channel.dbar()[i];
            }
            out.with_displacement(&k_full * d + shift)
        }
        None if channel.dbar().iter().any(|&v| v != 0.0) => {
            let mut shift = DVector::zeros(n2);
            for (i, &row) in target.iter().enumerate() {
                shift[row] = channel.dbar()[i];
            }
            out.with_displacement(shift)
        }
        None => Ok(out),
    }
}

fn target_quadratures(state: &PartitionedCovariance, party: Option<usize>) -> Result<Vec<usize>> {
    match party {
        None => Ok((0..2 * state.modes()).collect()),
        Some(p) if p < state.arity() => Ok(quadrature_indices(&state.partition()[p])),
        Some(p) => Err(Error::InvalidPartition(format!(
            "party {p} out of range 0..{}",
            state.arity()
        ))),
    }
}

/// Embeds `local` at rows/columns `target` of an `n × n` matrix that is the
/// identity (or zero) elsewhere.
fn embed(n: usize, target: &[usize], local: &DMatrix<f64>, identity_elsewhere: bool) -> DMatrix<f64> {
    let mut full = if identity_elsewhere {
        DMatrix::identity(n, n)
    } else {
        DMatrix::zeros(n, n)
    };
    for &i in target {
        full[(i, i)] = 0.0;
    }
    for (a, &i) in target.iter().enumerate() {
        for (b, &j) in target.iter().enumerate() {
            full[(i, j)] = local[(a, b)];
        }
    }
    full
}

/// A real matrix `S` with `SΔSᵀ = Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    modes: usize,
    s: DMatrix<f64>,
}

impl SymplecticTransform {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        let n2 = s.nrows();
        if n2 == 0 || !n2.is_multiple_of(2) || s.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2.max(2),
                actual: s.ncols(),
            });
        }
        let delta = symplectic_form(n2 / 2);
        let defect = (&s * &delta * s.transpose() - &delta).norm();
        if defect.is_nan() || defect > SYMPLECTIC_TOLERANCE {
            return Err(Error::NotSymplectic(defect));
        }
        Ok(SymplecticTransform { modes: n2 / 2, s })
    }

    pub fn identity(modes: usize) -> Self {
        SymplecticTransform {
            modes,
            s: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    /// `exp(ΔH)` with `H` symmetric, entries uniform in `[−mix_scale, mix_scale]`.
    pub fn random<R: Rng + ?Sized>(modes: usize, rng: &mut R, mix_scale: f64) -> Self {
        let n2 = 2 * modes;
        let mut h = DMatrix::zeros(n2, n2);
        for i in 0..n2 {
            for j in i..n2 {
                let v = if mix_scale > 0.0 {
                    rng.random_range(-mix_scale..=mix_scale)
                } else {
                    0.0
                };
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let s = (symplectic_form(modes) * h).exp();
        SymplecticTransform::new(s).expect("exp of a Hamiltonian matrix is symplectic")
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// `S⁻¹ = Δ⁻¹ Sᵀ Δ`.
    pub fn inverse(&self) -> Self {
        let delta = symplectic_form(self.modes);
        SymplecticTransform {
            modes: self.modes,
            s: delta.transpose() * self.s.transpose() * delta,
        }
    }

    /// Direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (2 * self.modes, 2 * other.modes);
        let mut s = DMatrix::zeros(n + m, n + m);
        s.view_mut((0, 0), (n, n)).copy_from(&self.s);
        s.view_mut((n, n), (m, m)).copy_from(&other.s);
        SymplecticTransform {
            modes: self.modes + other.modes,
            s,
        }
    }
}

/// `Γ ↦ SΓSᵀ`, `d ↦ Sd` on one party or on the whole state.
pub fn apply_symplectic(
    state: &PartitionedCovariance,
    transform: &SymplecticTransform,
    party: Option<usize>,
) -> Result<PartitionedCovariance> {
    let target = target_quadratures(state, party)?;
    if target.len() != 2 * transform.modes {
        return Err(Error::DimensionMismatch {
            expected: target.len() / 2,
            actual: transform.modes,
        });
    }
    let s_full = embed(2 * state.modes(), &target, transform.matrix(), true);
    let gamma = &s_full * state.cm().as_matrix() * s_full.transpose();
    let out = PartitionedCovariance::new(SymMatrix::new(gamma)?, state.partition().clone())?;
    match state.displacement() {
        Some(d) => out.with_displacement(&s_full * d),
        None => Ok(out),
    }
}

/// Applies an independent random symplectic to every party.
pub fn random_local_unitaries<R: Rng + ?Sized>(
    state: &PartitionedCovariance,
    rng: &mut R,
    mix_scale: f64,
) -> Result<PartitionedCovariance> {
    let mut out = state.clone();
    for p in 0..state.arity() {
        let s = SymplecticTransform::random(state.partition()[p].len(), rng, mix_scale);
        out = apply_symplectic(&out, &s, Some(p))?;
    }
    Ok(out)
}
