//! The correlation measure `M⁽ᵏ⁾ = 1 − det Γ / Πⱼ det Aⱼⱼ` and its closed
//! forms for standard-form, pure, locally channelled and symmetric squeezed
//! thermal states.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{PartitionedCovariance, PureFactors, SstsParams, StandardFormParams};
use crate::linalg::cholesky_logdet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub value: f64,
    pub logdet_full: f64,
    pub party_logdets: Vec<f64>,
    #[serde(rename = "arity")]
    pub partition_arity: usize,
    /// Set for single-party partitions, where the value is 0 by convention.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub single_party: bool,
}

impl MeasureReport {
    /// `1 − exp(logdet_full − Σ party_logdets)`.
    pub fn recompute(&self) -> f64 {
        let log_ratio = self.logdet_full - self.party_logdets.iter().sum::<f64>();
        -log_ratio.exp_m1()
    }
}

pub fn measure(state: &PartitionedCovariance) -> Result<MeasureReport> {
    let logdet_full = cholesky_logdet(state.cm())?;
    let party_logdets = (0..state.arity())
        .map(|p| cholesky_logdet(&state.party_block(p)))
        .collect::<Result<Vec<_>>>()?;
    let single_party = state.arity() < 2;
    let value = if single_party {
        0.0
    } else {
        let log_ratio = logdet_full - party_logdets.iter().sum::<f64>();
        -log_ratio.exp_m1()
    };
    Ok(MeasureReport {
        value,
        logdet_full,
        party_logdets,
        partition_arity: state.arity(),
        single_party,
    })
}

/// Bipartite value through the Schur complement of the first party:
/// `1 − det(B − CᵀA⁻¹C) / det B`.
pub fn measure_bipartite_schur(state: &PartitionedCovariance) -> Result<f64> {
    if state.arity() != 2 {
        return Err(Error::InvalidPartition(format!(
            "expected 2 parties, got {}",
            state.arity()
        )));
    }
    let mut order = state.party_quadratures(0);
    let split = order.len();
    order.extend(state.party_quadratures(1));
    let arranged = state.cm().principal_submatrix(&order);
    let schur = crate::linalg::schur_complement(&arranged, split)?;
    let log_ratio = cholesky_logdet(&schur)? - cholesky_logdet(&state.party_block(1))?;
    Ok(-log_ratio.exp_m1())
}

/// `1 − (ab − c²)(ab − d²) / (a²b²)`.
pub fn closed_form_two_mode(p: &StandardFormParams) -> f64 {
    let ab = p.a * p.b;
    1.0 - (ab - p.c * p.c) * (ab - p.d * p.d) / (ab * ab)
}

/// `1 − 1 / Πⱼ γⱼ⁴`.
pub fn closed_form_pure(f: &PureFactors) -> f64 {
    let log_prod: f64 = f.gammas.iter().map(|g| g.ln()).sum();
    -(-4.0 * log_prod).exp_m1()
}

/// Value after the single-mode channel `(K, M)` acts on the second mode of
/// the standard-form state `p`.
pub fn closed_form_channelled(p: &StandardFormParams, k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<f64> {
    if k.shape() != (2, 2) || m.shape() != (2, 2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: k.nrows().max(m.nrows()),
        });
    }
    if k.iter().all(|&v| v == 0.0) {
        // K = 0 replaces the mode by a fixed state: product output
        return Ok(0.0);
    }
    let (k11, k12, k21, k22) = (k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)]);
    let (m11, m12, m22) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let n1 = k11 * k11 * k22 * k22 + k12 * k12 * k21 * k21 - 2.0 * k11 * k12 * k21 * k22;
    let n2 = m22 * k11 * k11 + m11 * k21 * k21 - 2.0 * m12 * k11 * k21;
    let n3 = m22 * k12 * k12 + m11 * k22 * k22 - 2.0 * m12 * k12 * k22;
    let n4 = m11 * m22 - m12 * m12;
    let StandardFormParams { a, b, c, d } = *p;
    let (ab_c, ab_d) = (a * b - c * c, a * b - d * d);
    let numerator = ab_c * ab_d * n1 + a * ab_c * n2 + a * ab_d * n3 + a * a * n4;
    let denominator = a * a * b * b * n1 + a * a * b * (n2 + n3) + a * a * n4;
    if denominator.is_nan() || denominator.abs() <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateDenominator(denominator));
    }
    Ok(1.0 - numerator / denominator)
}

/// `1 − ((1+2n̄)² − 4μ²n̄(1+n̄))² / (1+2n̄)⁴`.
pub fn ssts_measure(p: &SstsParams) -> f64 {
    let a2 = (1.0 + 2.0 * p.nbar).powi(2);
    let x = p.mu * p.mu * p.nbar * (1.0 + p.nbar);
    1.0 - ((a2 - 4.0 * x) / a2).powi(2)
}

/// `1 − ((1+2n̄)² − 4μ²n̄(1+n̄))² / ((1+2n̄)² − 2μ²n̄(1+n̄))²`.
pub fn ssts_nf(p: &SstsParams) -> f64 {
    let a2 = (1.0 + 2.0 * p.nbar).powi(2);
    let x = p.mu * p.mu * p.nbar * (1.0 + p.nbar);
    1.0 - ((a2 - 4.0 * x) / (a2 - 2.0 * x)).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub nbar: f64,
    pub mu: f64,
    pub m: f64,
    pub nf: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub nbar_steps: usize,
    pub mu_steps: usize,
    /// Row-major: `cells[i * mu_steps + j]` has the i-th n̄ and j-th μ.
    pub cells: Vec<SweepCell>,
    pub max_diff: f64,
    pub argmax: usize,
}

impl SweepResult {
    pub fn argmax_cell(&self) -> &SweepCell {
        &self.cells[self.argmax]
    }

    /// CSV with header `nbar,mu,m,nf,diff`, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("nbar,mu,m,nf,diff\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                crate::io::fmt17(c.nbar),
                crate::io::fmt17(c.mu),
                crate::io::fmt17(c.m),
                crate::io::fmt17(c.nf),
                crate::io::fmt17(c.diff)
            ));
        }
        out
    }
}

fn grid_point(max: f64, steps: usize, i: usize) -> f64 {
    if steps == 1 {
        0.0
    } else if i + 1 == steps {
        max
    } else {
        max * i as f64 / (steps - 1) as f64
    }
}

/// Evaluates `M − N` on an inclusive rectangular grid over `[0, nbar_max] × [0, 1]`.
pub fn ssts_diff_sweep(nbar_max: f64, nbar_steps: usize, mu_steps: usize) -> Result<SweepResult> {
    if nbar_steps == 0 || mu_steps == 0 {
        return Err(Error::InvalidParams("step counts must be positive".into()));
    }
    if !(nbar_max >= 0.0 && nbar_max.is_finite()) {
        return Err(Error::InvalidParams(format!("nbar_max = {nbar_max} must be >= 0")));
    }
    let cells: Vec<SweepCell> = (0..nbar_steps * mu_steps)
        .into_par_iter()
        .map(|idx| {
            let nbar = grid_point(nbar_max, nbar_steps, idx / mu_steps);
            let mu = grid_point(1.0, mu_steps, idx % mu_steps);
            let p = SstsParams { nbar, mu };
            let (m, nf) = (ssts_measure(&p), ssts_nf(&p));
            SweepCell {
                nbar,
                mu,
                m,
                nf,
                diff: m - nf,
            }
        })
        .collect();
    let (argmax, max_diff) =
        cells.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |(bi, bv), (i, c)| if c.diff > bv { (i, c.diff) } else { (bi, bv) },
        );
    Ok(SweepResult {
        nbar_steps,
        mu_steps,
        cells,
        max_diff,
        argmax,
    })
}

/// Convenience: the bipartite measure between two parties of a state after
/// reduction, e.g. `pair_measure(s, 1, 2)` for `M(ρ_BC)`.
pub fn pair_measure(state: &PartitionedCovariance, p: usize, q: usize) -> Result<f64> {
    Ok(measure(&state.reduce(&[p, q])?)?.value)
}

/// Direct-determinant evaluation, for small matrices only.
pub fn measure_direct(state: &PartitionedCovariance) -> f64 {
    let full = state.cm().as_matrix().determinant();
    let parts: f64 = (0..state.arity())
        .map(|p| state.party_block(p).as_matrix().determinant())
        .product();
    1.0 - full / parts
}
