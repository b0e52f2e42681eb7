//! Randomized refutation suites for the structural properties of the measure.
//!
//! Each suite runs `trials` independent trials. Trial `t` draws from its own
//! stream `(seed, t)`, so results do not depend on thread scheduling. A trial
//! is a list of checks, each carrying a signed violation (positive is bad)
//! and the tolerance it must not exceed.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{apply_channel, random_channel, random_local_unitaries};
use crate::error::{Error, Result};
use crate::gaussian::{
    contiguous_partition, make_pure, random_physical, PartitionedCovariance, PureFactors, SstsParams,
    StandardFormParams,
};
use crate::io::StateFile;
use crate::linalg::{self, SymMatrix};
use crate::measure::{closed_form_channelled, closed_form_pure, closed_form_two_mode, measure, ssts_measure, ssts_nf};
use crate::rng::{derive_seed, stream_rng};

/// Symplectic mixing strength for random states.
pub const MIX_SCALE: f64 = 0.3;
/// Largest party size in random states.
pub const MAX_MODES_PER_PARTY: usize = 2;
/// Tolerance for inequalities between measure values.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Relative tolerance for "equal" (scaled by `1 + |value|`).
pub const EQUALITY_TOL: f64 = 1e-9;
/// Minimum gap for "strictly greater".
pub const STRICT_GAP: f64 = 1e-6;
/// Absolute tolerance for the monogamy equalities.
pub const MONOGAMY_EQUALITY: f64 = 1e-10;
/// Threshold below which a pairwise measure counts as zero.
pub const ZERO_MEASURE: f64 = 1e-8;

const REPAIR_START: f64 = 1e-6;
const REPAIR_MAX_DOUBLINGS: usize = 80;

pub const SUITES: &[&str] = &[
    "monotonicity",
    "hierarchy",
    "monogamy",
    "theorem11",
    "closed-forms",
    "corollary3",
    "axioms",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    pub trial: usize,
    pub check: String,
    pub violation: f64,
    pub tolerance: f64,
    pub states: Vec<StateFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationOutcome {
    pub suite_name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest check violation; 0 when every check held with margin.
    pub worst_violation: f64,
    pub seed: u64,
    pub details: Vec<FailureRecord>,
}

impl VerificationOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone)]
struct Check {
    name: String,
    violation: f64,
    tolerance: f64,
}

#[derive(Debug, Default)]
struct Trial {
    checks: Vec<Check>,
    states: Vec<PartitionedCovariance>,
}

impl Trial {
    fn record(&mut self, name: impl Into<String>, violation: f64, tolerance: f64) {
        let violation = if violation.is_nan() { f64::INFINITY } else { violation };
        self.checks.push(Check {
            name: name.into(),
            violation,
            tolerance,
        });
    }

    /// `lhs ≥ rhs` up to `tol`.
    fn at_least(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) {
        self.record(name, rhs - lhs, tol);
    }

    /// `|a − b| ≤ tol·(1 + |b|)`.
    fn equal(&mut self, name: impl Into<String>, a: f64, b: f64, tol: f64) {
        self.record(name, (a - b).abs(), tol * (1.0 + b.abs()));
    }

    /// `lhs − rhs ≥ STRICT_GAP`.
    fn strictly_greater(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        self.record(name, STRICT_GAP - (lhs - rhs), 0.0);
    }

    /// Both sides of an equivalence agree. When they disagree the violation
    /// is the distance of the offending side from its threshold.
    fn iff(&mut self, name: impl Into<String>, left: (bool, f64), right: (bool, f64)) {
        let violation = if left.0 == right.0 {
            0.0
        } else if left.0 {
            right.1
        } else {
            left.1
        };
        self.record(name, violation, 0.0);
    }

    fn keep(&mut self, state: &PartitionedCovariance) {
        self.states.push(state.clone());
    }
}

fn run_suite<F>(name: &str, trials: usize, seed: u64, body: F) -> VerificationOutcome
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<Trial> + Sync,
{
    let results: Vec<Result<Trial>> = (0..trials)
        .into_par_iter()
        .map(|t| body(&mut stream_rng(seed, t as u64), t))
        .collect();
    let mut failures = 0;
    let mut worst = 0.0_f64;
    let mut details = Vec::new();
    for (t, result) in results.into_iter().enumerate() {
        match result {
            Ok(trial) => {
                let mut failed = None;
                for c in &trial.checks {
                    worst = f64::max(worst, c.violation);
                    if c.violation > c.tolerance && failed.is_none() {
                        failed = Some(c.clone());
                    }
                }
                if let Some(c) = failed {
                    failures += 1;
                    details.push(FailureRecord {
                        trial: t,
                        check: c.name,
                        violation: c.violation,
                        tolerance: c.tolerance,
                        states: trial.states.iter().map(StateFile::from_state).collect(),
                    });
                }
            }
            Err(e) => {
                failures += 1;
                worst = f64::INFINITY;
                details.push(FailureRecord {
                    trial: t,
                    check: format!("error: {e}"),
                    violation: f64::INFINITY,
                    tolerance: 0.0,
                    states: Vec::new(),
                });
            }
        }
    }
    VerificationOutcome {
        suite_name: name.into(),
        trials,
        failures,
        worst_violation: worst,
        seed,
        details,
    }
}

fn random_sizes(rng: &mut ChaCha8Rng, parties: usize) -> Vec<usize> {
    (0..parties)
        .map(|_| rng.random_range(1..=MAX_MODES_PER_PARTY))
        .collect()
}

/// Correlated random state with `parties` contiguous parties of 1–2 modes.
pub fn random_state(rng: &mut ChaCha8Rng, parties: usize) -> Result<PartitionedCovariance> {
    let sizes = random_sizes(rng, parties);
    random_physical(rng, sizes.iter().sum(), contiguous_partition(&sizes), MIX_SCALE)
}

/// Product of independent random single-party states.
pub fn random_product_state(rng: &mut ChaCha8Rng, parties: usize) -> Result<PartitionedCovariance> {
    let mut state: Option<PartitionedCovariance> = None;
    for size in random_sizes(rng, parties) {
        let part = random_physical(rng, size, vec![(0..size).collect()], MIX_SCALE)?;
        state = Some(match state {
            None => part,
            Some(s) => s.tensor(&part),
        });
    }
    state.ok_or(Error::EmptySelection)
}

fn m(state: &PartitionedCovariance) -> Result<f64> {
    Ok(measure(state)?.value)
}

/// Measure of the reduced state on `parties`, each kept as its own party.
fn m_reduced(state: &PartitionedCovariance, parties: &[usize]) -> Result<f64> {
    m(&state.reduce(parties)?)
}

/// Measure of `state` under the coarse partition `groups` of its parties.
fn m_grouped(state: &PartitionedCovariance, groups: &[Vec<usize>]) -> Result<f64> {
    m(&state.merge_parties(groups)?)
}

/// All set partitions of `items`.
pub fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    match items.split_first() {
        None => vec![vec![]],
        Some((&first, rest)) => {
            let mut out = Vec::new();
            for partial in set_partitions(rest) {
                for i in 0..partial.len() {
                    let mut p = partial.clone();
                    p[i].insert(0, first);
                    out.push(p);
                }
                let mut p = partial;
                p.insert(0, vec![first]);
                out.push(p);
            }
            out
        }
    }
}

/// Nonempty subsets of `items`.
fn nonempty_subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (1u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------

/// Local channels applied party by party never increase the measure.
pub fn suite_monotonicity(trials: usize, seed: u64) -> VerificationOutcome {
    run_suite("monotonicity", trials, seed, |rng, _| {
        let mut trial = Trial::default();
        let k = rng.random_range(2..=4);
        let mut state = random_state(rng, k)?;
        trial.keep(&state);
        let mut before = m(&state)?;
        for p in 0..k {
            let floor = rng.random_range(0.01..0.5);
            let channel = random_channel(rng, state.partition()[p].len(), floor);
            state = apply_channel(&state, &channel, Some(p))?;
            let after = m(&state)?;
            trial.at_least(
                format!("nonincreasing after channel on party {p}"),
                before,
                after,
                INEQUALITY_TOL,
            );
            trial.at_least("nonnegative", after, 0.0, INEQUALITY_TOL);
            before = after;
        }
        trial.keep(&state);
        Ok(trial)
    })
}

/// Coarse-graining, reduction, party dropping and subgroup restriction never
/// increase the measure (4-party states).
pub fn suite_hierarchy(trials: usize, seed: u64) -> VerificationOutcome {
    run_suite("hierarchy", trials, seed, |rng, _| {
        let mut trial = Trial::default();
        let state = random_state(rng, 4)?;
        trial.keep(&state);
        let full = m(&state)?;
        let parties: Vec<usize> = (0..4).collect();
        let partitions: Vec<_> = set_partitions(&parties)
            .into_iter()
            .filter(|p| p.len() >= 2 && p.len() < 4)
            .collect();

        for groups in &partitions {
            let coarse = m_grouped(&state, groups)?;
            trial.at_least(format!("coarse-graining {groups:?}"), full, coarse, INEQUALITY_TOL);

            // restricting every group to a nonempty subset
            let choices: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| nonempty_subsets(g)).collect();
            let mut idx = vec![0; groups.len()];
            loop {
                let picked: Vec<&Vec<usize>> = choices.iter().zip(&idx).map(|(c, &i)| &c[i]).collect();
                if picked.iter().zip(groups).any(|(p, g)| p.len() < g.len()) {
                    let mut kept: Vec<usize> = picked.iter().flat_map(|p| p.iter().copied()).collect();
                    kept.sort_unstable();
                    let reduced = state.reduce(&kept)?;
                    let regroup: Vec<Vec<usize>> = picked
                        .iter()
                        .map(|p| p.iter().map(|x| kept.iter().position(|k| k == x).unwrap()).collect())
                        .collect();
                    let sub = m_grouped(&reduced, &regroup)?;
                    trial.at_least(
                        format!("subgroups {picked:?} of {groups:?}"),
                        coarse,
                        sub,
                        INEQUALITY_TOL,
                    );
                }
                let mut carry = 0;
                while carry < idx.len() {
                    idx[carry] += 1;
                    if idx[carry] < choices[carry].len() {
                        break;
                    }
                    idx[carry] = 0;
                    carry += 1;
                }
                if carry == idx.len() {
                    break;
                }
            }
        }

        for subset in nonempty_subsets(&parties)
            .into_iter()
            .filter(|s| s.len() >= 2 && s.len() < 4)
        {
            let part = m_reduced(&state, &subset)?;
            trial.at_least(format!("reduction to {subset:?}"), full, part, INEQUALITY_TOL);
            // appending an outside party to one member's group
            for &outside in parties.iter().filter(|p| !subset.contains(p)) {
                let mut kept = subset.clone();
                kept.push(outside);
                kept.sort_unstable();
                let reduced = state.reduce(&kept)?;
                let pos = |x: usize| kept.iter().position(|&k| k == x).unwrap();
                for &host in &subset {
                    let groups: Vec<Vec<usize>> = subset
                        .iter()
                        .map(|&q| {
                            if q == host {
                                vec![pos(q), pos(outside)]
                            } else {
                                vec![pos(q)]
                            }
                        })
                        .collect();
                    let extended = m_grouped(&reduced, &groups)?;
                    trial.at_least(
                        format!("party {outside} joined to {host} within {subset:?}"),
                        extended,
                        part,
                        INEQUALITY_TOL,
                    );
                }
            }
        }
        Ok(trial)
    })
}

/// Tripartite monogamy: `M⁽³⁾ = M(ρ_AB)` iff `M(ρ_AC) = M(ρ_BC) = 0`, and
/// `M⁽³⁾ = M(ρ_A|BC)` iff `M(ρ_BC) = 0`, on constructed and random states.
pub fn suite_monogamy(trials: usize, seed: u64) -> VerificationOutcome {
    run_suite("monogamy", trials, seed, |rng, _| {
        let mut trial = Trial::default();

        // C uncorrelated with AB
        let ab = random_state(rng, 2)?;
        let c = random_product_state(rng, 1)?;
        let complete = random_local_unitaries(&ab.tensor(&c), rng, MIX_SCALE)?;
        // B uncorrelated with C, both correlated with a two-mode A
        let nb = rng.random_range(1..=MAX_MODES_PER_PARTY);
        let a1b = random_physical(rng, 1 + nb, vec![vec![0], (1..1 + nb).collect()], MIX_SCALE)?;
        let nc = rng.random_range(1..=MAX_MODES_PER_PARTY);
        let a2c = random_physical(rng, 1 + nc, vec![vec![0], (1..1 + nc).collect()], MIX_SCALE)?;
        let joined = a1b.tensor(&a2c);
        let shift = a1b.modes();
        let tight = joined.with_partition(vec![
            vec![0, shift],
            (1..shift).collect(),
            (shift + 1..shift + 1 + nc).collect(),
        ])?;
        let tight = random_local_unitaries(&tight, rng, MIX_SCALE)?;
        let random = random_state(rng, 3)?;

        for (label, s) in [
            ("constructed-complete", &complete),
            ("constructed-tight", &tight),
            ("random", &random),
        ] {
            trial.keep(s);
            let m3 = m(s)?;
            let m_ab = m_reduced(s, &[0, 1])?;
            let m_ac = m_reduced(s, &[0, 2])?;
            let m_bc = m_reduced(s, &[1, 2])?;
            let m_a_bc = m_grouped(s, &[vec![0], vec![1, 2]])?;

            let gap_ab = m3 - m_ab;
            let eq_ab = gap_ab.abs() <= MONOGAMY_EQUALITY;
            let outside = m_ac.max(m_bc);
            trial.iff(
                format!("{label}: M3 = M(AB) iff M(AC) = M(BC) = 0"),
                (eq_ab, gap_ab.abs()),
                (outside <= ZERO_MEASURE, outside - ZERO_MEASURE),
            );

            let gap_bc = m3 - m_a_bc;
            let eq_bc = gap_bc.abs() <= MONOGAMY_EQUALITY;
            trial.iff(
                format!("{label}: M3 = M(A|BC) iff M(BC) = 0"),
                (eq_bc, gap_bc.abs()),
                (m_bc <= ZERO_MEASURE, m_bc - ZERO_MEASURE),
            );
            trial.at_least(format!("{label}: M3 >= M(AB)"), m3, m_ab, INEQUALITY_TOL);
            trial.at_least(format!("{label}: M3 >= M(A|BC)"), m3, m_a_bc, INEQUALITY_TOL);
        }
        // the constructions must land on the intended side of each equivalence
        trial.record(
            "constructed-complete has Y = Z = 0",
            m_reduced(&complete, &[0, 2])?.max(m_reduced(&complete, &[1, 2])?),
            1e-10,
        );
        trial.record("constructed-tight has Y = 0", m_reduced(&tight, &[1, 2])?, 1e-10);
        trial.record(
            "constructed-complete: M3 = M(AB)",
            (m(&complete)? - m_reduced(&complete, &[0, 1])?).abs(),
            MONOGAMY_EQUALITY,
        );
        trial.record(
            "constructed-tight: M3 = M(A|BC)",
            (m(&tight)? - m_grouped(&tight, &[vec![0], vec![1, 2]])?).abs(),
            MONOGAMY_EQUALITY,
        );
        Ok(trial)
    })
}

/// The worked six-mode example: three single-mode parties A, B, C.
pub fn example_state() -> PartitionedCovariance {
    let t = 1.0 / 3.0;
    #[rustfmt::skip]
    let entries = [
        2.0, 0.0, 1.0, 0.0, t, 0.0,
        0.0, 2.0, 0.0, 1.0, 0.0, t,
        1.0, 0.0, 3.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 3.0, 0.0, 1.0,
        t, 0.0, 1.0, 0.0, 2.0, 0.0,
        0.0, t, 0.0, 1.0, 0.0, 2.0,
    ];
    PartitionedCovariance::new(
        SymMatrix::from_row_slice(6, &entries).expect("6x6"),
        vec![vec![0], vec![1], vec![2]],
    )
    .expect("three single-mode parties")
}

/// `‖Z − X B⁻¹ Y‖_F` for the blocks of a three-party state.
pub fn markov_residual(state: &PartitionedCovariance) -> Result<f64> {
    let x = state.cross_block(0, 1);
    let y = state.cross_block(1, 2);
    let z = state.cross_block(0, 2);
    let b_inv = linalg::spd_inverse(&state.party_block(1))?;
    Ok((z - x * b_inv.as_matrix() * y).norm())
}

/// Replaces the A–C correlation block by `z` and inflates the A and C
/// diagonal blocks by `t·I` (t doubling from 1e-6) until the state is
/// physical. `X`, `B`, `Y` and `Z` are left untouched.
pub fn set_ac_block_and_repair(state: &PartitionedCovariance, z: &DMatrix<f64>) -> Result<PartitionedCovariance> {
    let qa = state.party_quadratures(0);
    let qc = state.party_quadratures(2);
    let mut base = state.cm().as_matrix().clone();
    for (i, &r) in qa.iter().enumerate() {
        for (j, &c) in qc.iter().enumerate() {
            base[(r, c)] = z[(i, j)];
            base[(c, r)] = z[(i, j)];
        }
    }
    let candidate = PartitionedCovariance::new(SymMatrix::new(base.clone())?, state.partition().clone())?;
    if candidate.is_physical().physical {
        return Ok(candidate);
    }
    let mut t = REPAIR_START;
    for _ in 0..REPAIR_MAX_DOUBLINGS {
        let mut g = base.clone();
        for &i in qa.iter().chain(&qc) {
            g[(i, i)] += t;
        }
        let candidate = PartitionedCovariance::new(SymMatrix::new(g)?, state.partition().clone())?;
        if candidate.is_physical().physical {
            return Ok(candidate);
        }
        t *= 2.0;
    }
    Err(Error::ConstructionFailed(format!("no physical repair up to t = {t:e}")))
}

/// `M(ρ_A|BC) ≥ M(ρ_AB)` with equality exactly on `Z = X B⁻¹ Y`.
pub fn suite_theorem11(trials: usize, seed: u64) -> VerificationOutcome {
    run_suite("theorem11", trials, seed, |rng, t| {
        let mut trial = Trial::default();
        let state = random_state(rng, 3)?;
        trial.keep(&state);
        let a_bc = |s: &PartitionedCovariance| m_grouped(s, &[vec![0], vec![1, 2]]);
        trial.at_least(
            "random: M(A|BC) >= M(AB)",
            a_bc(&state)?,
            m_reduced(&state, &[0, 1])?,
            INEQUALITY_TOL,
        );

        let x = state.cross_block(0, 1);
        let y = state.cross_block(1, 2);
        let b_inv = linalg::spd_inverse(&state.party_block(1))?;
        let markov_z = &x * b_inv.as_matrix() * &y;

        let on = set_ac_block_and_repair(&state, &markov_z)?;
        trial.keep(&on);
        trial.record(
            "constructed: Z = X B^-1 Y",
            markov_residual(&on)?,
            1e-12 * (1.0 + markov_z.norm()),
        );
        trial.equal(
            "constructed: M(A|BC) = M(AB)",
            a_bc(&on)?,
            m_reduced(&on, &[0, 1])?,
            EQUALITY_TOL,
        );

        let mut delta = DMatrix::from_fn(markov_z.nrows(), markov_z.ncols(), |_, _| rng.random_range(-1.0..1.0));
        delta *= 0.1 / delta.norm();
        let off = set_ac_block_and_repair(&state, &(&markov_z + delta))?;
        trial.keep(&off);
        trial.strictly_greater("perturbed: M(A|BC) > M(AB)", a_bc(&off)?, m_reduced(&off, &[0, 1])?);

        if t == 0 {
            // the fixed six-mode exhibit: equality without monogamy
            let ex = example_state();
            trial.record("exhibit: Z = X B^-1 Y", markov_residual(&ex)?, 1e-12);
            trial.equal(
                "exhibit: M(A|BC) = M(AB)",
                a_bc(&ex)?,
                m_reduced(&ex, &[0, 1])?,
                EQUALITY_TOL,
            );
            trial.record("exhibit: M(AC) > 0", ZERO_MEASURE - m_reduced(&ex, &[0, 2])?, 0.0);
            trial.record("exhibit: M(BC) > 0", ZERO_MEASURE - m_reduced(&ex, &[1, 2])?, 0.0);
        }
        Ok(trial)
    })
}

/// Random valid standard-form parameters.
pub fn random_standard_form(rng: &mut ChaCha8Rng) -> StandardFormParams {
    let a = rng.random_range(1.0..6.0);
    let b = rng.random_range(1.0..6.0);
    let r = (a * b - 1.0_f64).max(0.0).sqrt();
    let c = if r > 0.0 { rng.random_range(-r..=r) } else { 0.0 };
    let d = if r > 0.0 { rng.random_range(-r..=r) } else { 0.0 };
    StandardFormParams { a, b, c, d }
}

/// Closed forms against the general determinant route.
pub fn suite_closed_forms(trials: usize, seed: u64) -> VerificationOutcome {
    run_suite("closed-forms", trials, seed, |rng, _| {
        let mut trial = Trial::default();

        let p = random_standard_form(rng);
        let state = p.to_state();
        trial.keep(&state);
        trial.record(
            "two-mode closed form",
            (closed_form_two_mode(&p) - m(&state)?).abs(),
            1e-10,
        );

        let n = rng.random_range(1..=4);
        let gammas: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
        let f = PureFactors::new(gammas, rng.random_range(0..=2))?;
        let pure = random_local_unitaries(&make_pure(&f)?, rng, MIX_SCALE)?;
        trial.keep(&pure);
        trial.record("pure closed form", (closed_form_pure(&f) - m(&pure)?).abs(), 1e-10);

        let floor = rng.random_range(0.01..0.5);
        let channel = random_channel(rng, 1, floor);
        let after = apply_channel(&state, &channel, Some(1))?;
        let closed = closed_form_channelled(&p, channel.k(), channel.m().as_matrix())?;
        trial.record("channelled closed form", (closed - m(&after)?).abs(), 1e-9);

        let ssts = SstsParams::new(rng.random_range(0.0..50.0), rng.random_range(0.0..=1.0))?;
        let via_state = m(&crate::gaussian::make_ssts(&ssts))?;
        trial.record("ssts closed form", (ssts_measure(&ssts) - via_state).abs(), 1e-10);
        trial.at_least("ssts: M >= N", ssts_measure(&ssts), ssts_nf(&ssts), 1e-12);
        Ok(trial)
    })
}

/// `M⁽ᵏ⁾ ≥ (1/l) Σ_h M(ρ_{B_h})` with equality only at `M⁽ᵏ⁾ = 0`.
pub fn suite_corollary3(trials: usize, seed: u64) -> VerificationOutcome {
    run_suite("corollary3", trials, seed, |rng, t| {
        let mut trial = Trial::default();
        let k = rng.random_range(3..=4);
        let state = if t % 4 == 0 {
            random_product_state(rng, k)?
        } else {
            random_state(rng, k)?
        };
        trial.keep(&state);
        let parties: Vec<usize> = (0..k).collect();
        let candidates: Vec<_> = set_partitions(&parties)
            .into_iter()
            .filter(|p| p.len() >= 2 && p.len() < k)
            .collect();
        let groups = candidates[rng.random_range(0..candidates.len())].clone();
        let full = m(&state)?;
        let mut sum = 0.0;
        for g in &groups {
            sum += m_reduced(&state, g)?;
        }
        let mean = sum / groups.len() as f64;
        trial.at_least(format!("average over {groups:?}"), full, mean, INEQUALITY_TOL);
        if (full - mean).abs() <= INEQUALITY_TOL {
            trial.record(format!("equality over {groups:?} only at zero"), full, INEQUALITY_TOL);
        }
        Ok(trial)
    })
}

/// Range, zero-iff-product, permutation, ancilla and local-unitary invariance.
pub fn suite_axioms(trials: usize, seed: u64) -> VerificationOutcome {
    run_suite("axioms", trials, seed, |rng, _| {
        let mut trial = Trial::default();
        let k = rng.random_range(2..=4);
        let state = random_state(rng, k)?;
        trial.keep(&state);
        let value = m(&state)?;
        trial.at_least("range: M >= 0", value, 0.0, INEQUALITY_TOL);
        trial.record("range: M < 1", if value < 1.0 { value - 1.0 } else { 1.0 }, 0.0);

        let product = random_local_unitaries(&random_product_state(rng, k)?, rng, MIX_SCALE)?;
        trial.record("product state has M = 0", m(&product)?.abs(), 1e-10);
        let scale = state.cm().max_abs_diagonal();
        let mut off = 0.0_f64;
        for p in 0..k {
            for q in (p + 1)..k {
                off = off.max(state.cross_block(p, q).norm());
            }
        }
        if off > 1e-8 * scale {
            trial.record("correlated state has M > 0", 1e-10 - value, 0.0);
        }

        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(rng);
        trial.record(
            "permutation invariance",
            (m(&state.permute_parties(&perm)?)? - value).abs(),
            1e-10,
        );

        let ancilla = random_product_state(rng, 1)?;
        let with_ancilla = state.tensor(&ancilla);
        let mut groups: Vec<Vec<usize>> = (0..k).map(|p| vec![p]).collect();
        groups[k - 1].push(k);
        trial.record(
            "ancilla invariance",
            (m_grouped(&with_ancilla, &groups)? - value).abs(),
            1e-10,
        );

        let rotated = random_local_unitaries(&state, rng, MIX_SCALE)?;
        trial.record("local symplectic invariance", (m(&rotated)? - value).abs(), 1e-9);
        Ok(trial)
    })
}

/// Runs one suite by name.
pub fn run_named(name: &str, trials: usize, seed: u64) -> Option<VerificationOutcome> {
    let suite: fn(usize, u64) -> VerificationOutcome = match name {
        "monotonicity" => suite_monotonicity,
        "hierarchy" => suite_hierarchy,
        "monogamy" => suite_monogamy,
        "theorem11" => suite_theorem11,
        "closed-forms" => suite_closed_forms,
        "corollary3" => suite_corollary3,
        "axioms" => suite_axioms,
        _ => return None,
    };
    Some(suite(trials, seed))
}

/// Every suite, each with seed `derive_seed(seed, index)`. Zero trials runs
/// nothing.
pub fn run_all(trials_per_suite: usize, seed: u64) -> Vec<VerificationOutcome> {
    if trials_per_suite == 0 {
        return Vec::new();
    }
    SUITES
        .iter()
        .enumerate()
        .map(|(i, name)| run_named(name, trials_per_suite, derive_seed(seed, i as u64)).expect("known suite"))
        .collect()
}
