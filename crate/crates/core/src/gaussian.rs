//! Covariance-matrix representation of multipartite Gaussian states.
//!
//! Quadratures are interleaved, `(Q₁, P₁, …, Qₙ, Pₙ)`, and the vacuum has
//! covariance matrix `I`. A state is physical iff `Γ + iΔ ≥ 0`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::SymplecticTransform;
use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};
use crate::rng::stream_rng;

/// Lower bound on the minimum eigenvalue of `Γ + iΔ` for a physical state.
pub const PHYSICAL_TOLERANCE: f64 = 1e-9;

/// Ordered, disjoint, covering list of party mode sets.
pub type Partition = Vec<Vec<usize>>;

/// Checks that `partition` is a disjoint cover of `0..modes` by nonempty sets.
pub fn validate_partition(modes: usize, partition: &[Vec<usize>]) -> Result<()> {
    if partition.is_empty() {
        return Err(Error::InvalidPartition("no parties".into()));
    }
    let mut seen = vec![false; modes];
    for (p, party) in partition.iter().enumerate() {
        if party.is_empty() {
            return Err(Error::InvalidPartition(format!("party {p} is empty")));
        }
        for &m in party {
            if m >= modes {
                return Err(Error::InvalidPartition(format!("mode {m} out of range 0..{modes}")));
            }
            if seen[m] {
                return Err(Error::InvalidPartition(format!("mode {m} assigned twice")));
            }
            seen[m] = true;
        }
    }
    if let Some(m) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition(format!("mode {m} not assigned")));
    }
    Ok(())
}

/// Parties of the given sizes laid out contiguously.
pub fn contiguous_partition(sizes: &[usize]) -> Partition {
    let mut next = 0;
    sizes
        .iter()
        .map(|&s| {
            let party = (next..next + s).collect();
            next += s;
            party
        })
        .collect()
}

/// Quadrature row indices of the given modes.
pub fn quadrature_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedCovariance {
    modes: usize,
    cm: SymMatrix,
    partition: Partition,
    displacement: Option<DVector<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalityReport {
    pub physical: bool,
    pub min_eigenvalue: f64,
    /// `None` when the matrix is not positive definite.
    pub symplectic_eigenvalues: Option<Vec<f64>>,
}

impl PartitionedCovariance {
    pub fn new(cm: SymMatrix, partition: Partition) -> Result<Self> {
        if !cm.dim().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: cm.dim() + 1,
                actual: cm.dim(),
            });
        }
        let modes = cm.dim() / 2;
        validate_partition(modes, &partition)?;
        Ok(PartitionedCovariance {
            modes,
            cm,
            partition,
            displacement: None,
        })
    }

    pub fn with_displacement(mut self, d: DVector<f64>) -> Result<Self> {
        if d.len() != 2 * self.modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.modes,
                actual: d.len(),
            });
        }
        self.displacement = Some(d);
        Ok(self)
    }

    /// Same matrix under a different partition.
    pub fn with_partition(&self, partition: Partition) -> Result<Self> {
        validate_partition(self.modes, &partition)?;
        Ok(PartitionedCovariance {
            partition,
            ..self.clone()
        })
    }

    /// Vacuum on `modes` modes, one party per mode.
    pub fn vacuum(modes: usize) -> Self {
        let partition = (0..modes).map(|m| vec![m]).collect();
        PartitionedCovariance {
            modes,
            cm: SymMatrix::identity(2 * modes),
            partition,
            displacement: None,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cm(&self) -> &SymMatrix {
        &self.cm
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn displacement(&self) -> Option<&DVector<f64>> {
        self.displacement.as_ref()
    }

    pub fn arity(&self) -> usize {
        self.partition.len()
    }

    pub fn party_quadratures(&self, party: usize) -> Vec<usize> {
        quadrature_indices(&self.partition[party])
    }

    /// Reduced covariance matrix `A_jj` of one party.
    pub fn party_block(&self, party: usize) -> SymMatrix {
        self.cm.principal_submatrix(&self.party_quadratures(party))
    }

    /// Correlation block `A_pq`.
    pub fn cross_block(&self, p: usize, q: usize) -> DMatrix<f64> {
        self.cm.block(&self.party_quadratures(p), &self.party_quadratures(q))
    }

    /// True when the partition lists modes `0..n` in order.
    pub fn is_contiguous(&self) -> bool {
        self.partition.iter().flatten().copied().eq(0..self.modes)
    }

    pub fn is_physical(&self) -> PhysicalityReport {
        let delta = linalg::symplectic_form(self.modes);
        let min_eigenvalue = linalg::hermitian_min_eigenvalue(&self.cm, &delta).unwrap_or(f64::NAN);
        PhysicalityReport {
            physical: min_eigenvalue >= -PHYSICAL_TOLERANCE,
            min_eigenvalue,
            symplectic_eigenvalues: self.symplectic_eigenvalues().ok(),
        }
    }

    /// Moduli `ν₁ ≤ … ≤ νₙ` of the eigenvalues of `Δ⁻¹Γ`.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let l = linalg::cholesky_lower(&self.cm)?;
        let delta = linalg::symplectic_form(self.modes);
        // Δ Γ = Δ L Lᵀ is similar to the antisymmetric Lᵀ Δ L, whose Hermitian
        // counterpart i·Lᵀ Δ L has spectrum ±νⱼ.
        let antisym = l.transpose() * delta * &l;
        let zero = SymMatrix::new(DMatrix::zeros(2 * self.modes, 2 * self.modes))?;
        let spectrum = linalg::hermitian_eigenvalues(&zero, &antisym)?;
        Ok(spectrum[self.modes..].to_vec())
    }

    /// Principal submatrix on the selected parties. Modes keep their relative
    /// order; parties are renumbered by ascending original index.
    pub fn reduce(&self, parties: &[usize]) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut selected = parties.to_vec();
        selected.sort_unstable();
        selected.dedup();
        if let Some(&p) = selected.iter().find(|&&p| p >= self.arity()) {
            return Err(Error::InvalidPartition(format!(
                "party {p} out of range 0..{}",
                self.arity()
            )));
        }
        let mut kept: Vec<usize> = selected
            .iter()
            .flat_map(|&p| self.partition[p].iter().copied())
            .collect();
        kept.sort_unstable();
        let mut renumber = vec![usize::MAX; self.modes];
        for (new, &old) in kept.iter().enumerate() {
            renumber[old] = new;
        }
        let partition = selected
            .iter()
            .map(|&p| self.partition[p].iter().map(|&m| renumber[m]).collect())
            .collect();
        let quads = quadrature_indices(&kept);
        let displacement = self
            .displacement
            .as_ref()
            .map(|d| DVector::from_iterator(quads.len(), quads.iter().map(|&i| d[i])));
        Ok(PartitionedCovariance {
            modes: kept.len(),
            cm: self.cm.principal_submatrix(&quads),
            partition,
            displacement,
        })
    }

    /// Coarse-grains the partition: group `g` becomes the union of the listed
    /// parties. The matrix is untouched.
    pub fn merge_parties(&self, grouping: &[Vec<usize>]) -> Result<Self> {
        let k = self.arity();
        let mut seen = vec![false; k];
        for group in grouping {
            if group.is_empty() {
                return Err(Error::InvalidGrouping("empty group".into()));
            }
            for &p in group {
                if p >= k {
                    return Err(Error::InvalidGrouping(format!("party {p} out of range 0..{k}")));
                }
                if seen[p] {
                    return Err(Error::InvalidGrouping(format!("party {p} listed twice")));
                }
                seen[p] = true;
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidGrouping(format!("party {p} not covered")));
        }
        let partition = grouping
            .iter()
            .map(|group| {
                let mut modes: Vec<usize> = group.iter().flat_map(|&p| self.partition[p].iter().copied()).collect();
                modes.sort_unstable();
                modes
            })
            .collect();
        Ok(PartitionedCovariance {
            partition,
            ..self.clone()
        })
    }

    /// Reorders parties so that new party `i` is old party `perm[i]`. The
    /// result is laid out contiguously in the new party order.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let k = self.arity();
        if perm.len() != k {
            return Err(Error::InvalidPermutation(format!(
                "length {} for {k} parties",
                perm.len()
            )));
        }
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || seen[p] {
                return Err(Error::InvalidPermutation(format!("{perm:?}")));
            }
            seen[p] = true;
        }
        let order: Vec<usize> = perm.iter().flat_map(|&p| self.partition[p].iter().copied()).collect();
        let quads = quadrature_indices(&order);
        let sizes: Vec<usize> = perm.iter().map(|&p| self.partition[p].len()).collect();
        let displacement = self
            .displacement
            .as_ref()
            .map(|d| DVector::from_iterator(quads.len(), quads.iter().map(|&i| d[i])));
        Ok(PartitionedCovariance {
            modes: self.modes,
            cm: self.cm.principal_submatrix(&quads),
            partition: contiguous_partition(&sizes),
            displacement,
        })
    }

    /// Product state `self ⊗ other`: block-diagonal matrix, concatenated parties.
    pub fn tensor(&self, other: &Self) -> Self {
        let (n, m) = (2 * self.modes, 2 * other.modes);
        let mut cm = DMatrix::zeros(n + m, n + m);
        cm.view_mut((0, 0), (n, n)).copy_from(self.cm.as_matrix());
        cm.view_mut((n, n), (m, m)).copy_from(other.cm.as_matrix());
        let mut partition = self.partition.clone();
        partition.extend(
            other
                .partition
                .iter()
                .map(|p| p.iter().map(|&x| x + self.modes).collect()),
        );
        let displacement = match (&self.displacement, &other.displacement) {
            (None, None) => None,
            (a, b) => {
                let a = a.clone().unwrap_or_else(|| DVector::zeros(n));
                let b = b.clone().unwrap_or_else(|| DVector::zeros(m));
                Some(DVector::from_iterator(n + m, a.iter().chain(b.iter()).copied()))
            }
        };
        PartitionedCovariance {
            modes: self.modes + other.modes,
            cm: SymMatrix::new(cm).expect("block-diagonal of symmetric blocks"),
            partition,
            displacement,
        }
    }

    /// Standard-form parameters of a (1+1)-mode state, recovered from the
    /// local symplectic invariants `det A`, `det B`, `det C` and `det Γ`.
    pub fn standard_form(&self) -> Result<StandardFormParams> {
        if self.arity() != 2 || self.partition.iter().any(|p| p.len() != 1) {
            return Err(Error::InvalidPartition(
                "standard form needs two single-mode parties".into(),
            ));
        }
        let det_g = linalg::cholesky_logdet(&self.cm)?.exp();
        let det_a = det2(self.party_block(0).as_matrix());
        let det_b = det2(self.party_block(1).as_matrix());
        let det_c = det2(&self.cross_block(0, 1));
        let a = det_a.sqrt();
        let b = det_b.sqrt();
        let ab = a * b;
        // c² and d² are the roots of t² − s t + p with
        //   p = (det C)²,  (ab)² − ab·s + p = det Γ.
        let p = det_c * det_c;
        let s = (ab * ab + p - det_g) / ab;
        let tol = 1e-9 * (s * s).max(1.0);
        let disc = s * s - 4.0 * p;
        if disc < -tol {
            return Err(Error::NonPhysical(format!(
                "standard-form quadratic has no real roots ({disc:e})"
            )));
        }
        let root = disc.max(0.0).sqrt();
        let c_sq = 0.5 * (s + root);
        let d_sq = if c_sq > 0.0 { p / c_sq } else { 0.5 * (s - root) };
        if c_sq < -tol || d_sq < -tol {
            return Err(Error::NonPhysical(format!(
                "negative standard-form root ({c_sq:e}, {d_sq:e})"
            )));
        }
        let c = c_sq.max(0.0).sqrt();
        let d = d_sq.max(0.0).sqrt().copysign(if det_c < 0.0 { -1.0 } else { 1.0 });
        Ok(StandardFormParams { a, b, c, d })
    }
}

fn det2(m: &DMatrix<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Parameters of the (1+1)-mode standard form
/// `[[a,0,c,0],[0,a,0,d],[c,0,b,0],[0,d,0,b]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardFormParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl StandardFormParams {
    /// Validates `a, b ≥ 1` and `ab − 1 ≥ c², d²`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = StandardFormParams { a, b, c, d };
        if !(a >= 1.0 && b >= 1.0) {
            return Err(Error::InvalidParams(format!("a = {a}, b = {b} must be >= 1")));
        }
        // relative slack so boundary (pure) states such as c² = ab − 1 pass
        let slack = 1e-12 * a * b;
        if a * b - 1.0 < c * c - slack || a * b - 1.0 < d * d - slack {
            return Err(Error::InvalidParams(format!("ab - 1 must dominate c² and d² ({p:?})")));
        }
        Ok(p)
    }

    /// The two-mode standard-form state.
    pub fn to_state(&self) -> PartitionedCovariance {
        let StandardFormParams { a, b, c, d } = *self;
        #[rustfmt::skip]
        let entries = [
            a, 0.0, c, 0.0,
            0.0, a, 0.0, d,
            c, 0.0, b, 0.0,
            0.0, d, 0.0, b,
        ];
        let cm = SymMatrix::from_row_slice(4, &entries).expect("4x4");
        PartitionedCovariance::new(cm, vec![vec![0], vec![1]]).expect("two single-mode parties")
    }
}

/// Symmetric squeezed thermal state parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SstsParams {
    pub nbar: f64,
    pub mu: f64,
}

impl SstsParams {
    pub fn new(nbar: f64, mu: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::InvalidParams(format!("nbar = {nbar} must be >= 0")));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParams(format!("mu = {mu} must lie in [0, 1]")));
        }
        Ok(SstsParams { nbar, mu })
    }

    pub fn standard_form(&self) -> StandardFormParams {
        let a = 1.0 + 2.0 * self.nbar;
        let c = 2.0 * self.mu * (self.nbar * (1.0 + self.nbar)).sqrt();
        StandardFormParams { a, b: a, c, d: -c }
    }
}

pub fn make_ssts(p: &SstsParams) -> PartitionedCovariance {
    p.standard_form().to_state()
}

/// Single-mode mixedness factors of a pure state, plus vacuum padding modes
/// on the larger side.
#[derive(Debug, Clone, PartialEq)]
pub struct PureFactors {
    pub gammas: Vec<f64>,
    pub extra_modes: usize,
}

impl PureFactors {
    pub fn new(gammas: Vec<f64>, extra_modes: usize) -> Result<Self> {
        if let Some(&g) = gammas.iter().find(|&&g| g < 1.0 || !g.is_finite()) {
            return Err(Error::InvalidFactor(g));
        }
        if gammas.is_empty() {
            return Err(Error::InvalidParams("at least one mixedness factor required".into()));
        }
        Ok(PureFactors { gammas, extra_modes })
    }
}

/// Pure `(n + (n + extra))`-mode state in mode-wise decomposed form. Modes
/// `0..n` form the first party and mode `j` is paired with mode `n + j`; the
/// trailing `extra` modes are vacuum.
pub fn make_pure(f: &PureFactors) -> Result<PartitionedCovariance> {
    if let Some(&g) = f.gammas.iter().find(|&&g| g < 1.0 || !g.is_finite()) {
        return Err(Error::InvalidFactor(g));
    }
    let n = f.gammas.len();
    let total = 2 * n + f.extra_modes;
    let mut cm = DMatrix::<f64>::identity(2 * total, 2 * total);
    for (j, &g) in f.gammas.iter().enumerate() {
        let s = (g * g - 1.0).sqrt();
        let (qa, qb) = (2 * j, 2 * (n + j));
        for i in [qa, qa + 1, qb, qb + 1] {
            cm[(i, i)] = g;
        }
        cm[(qa, qb)] = s;
        cm[(qb, qa)] = s;
        cm[(qa + 1, qb + 1)] = -s;
        cm[(qb + 1, qa + 1)] = -s;
    }
    PartitionedCovariance::new(SymMatrix::new(cm)?, vec![(0..n).collect(), (n..total).collect()])
}

/// `S · diag(ν₁I₂, …, νₙI₂) · Sᵀ` with `νⱼ = 1 + |N(0,1)|` and `S` a random
/// symplectic matrix drawn from `rng`.
pub fn random_physical<R: Rng + ?Sized>(
    rng: &mut R,
    modes: usize,
    partition: Partition,
    mix_scale: f64,
) -> Result<PartitionedCovariance> {
    let nus: Vec<f64> = (0..modes)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            1.0 + z.abs()
        })
        .collect();
    let s = SymplecticTransform::random(modes, rng, mix_scale);
    let diag: Vec<f64> = nus.iter().flat_map(|&v| [v, v]).collect();
    let core = DMatrix::from_diagonal(&DVector::from_vec(diag));
    let cm = SymMatrix::new(s.matrix() * core * s.matrix().transpose())?;
    PartitionedCovariance::new(cm, partition)
}

/// Deterministic random physical state for a given seed.
pub fn make_random_physical(
    modes: usize,
    partition: Partition,
    seed: u64,
    mix_scale: f64,
) -> Result<PartitionedCovariance> {
    if modes == 0 {
        return Err(Error::InvalidParams("modes must be >= 1".into()));
    }
    validate_partition(modes, &partition)?;
    random_physical(&mut stream_rng(seed, 0), modes, partition, mix_scale)
}
