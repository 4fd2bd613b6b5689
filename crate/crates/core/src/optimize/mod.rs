//! Extremizing entanglement entropy over all mode redefinitions.
//!
//! The search runs over `U = exp(iH)` with `H` Hermitian, using Nelder–Mead
//! from a set of seeded starting points. Restart 0 always starts at the
//! identity, so the input state itself is a candidate.

mod simplex;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::entanglement::{entropy_bits, schmidt_spectrum, squared_singular_values, Partition};
use crate::error::{Error, Result};
use crate::fock::{enumerate_sector, Occupation, PureState};
use crate::transform::{
    apply_redefinition, exp_map, exp_map_slice, HermitianParams, ModeUnitary, RedefinitionPlan,
};

pub use simplex::{Minimum, NelderMead};

/// Largest parameter count accepted by [`optimize_entanglement`].
pub const MAX_PARAMETERS: usize = 144;
/// Allowed drift between the optimizer's value and a fresh re-evaluation.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Min => 1.0,
            Direction::Max => -1.0,
        }
    }

    /// Whether `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Min => a < b,
            Direction::Max => a > b,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Min => "min",
            Direction::Max => "max",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptConfig {
    pub direction: Direction,
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub simplex_tolerance: f64,
    pub step_scale: f64,
}

impl OptConfig {
    pub fn new(direction: Direction) -> Self {
        Self {
            direction,
            restarts: 24,
            seed: 0,
            max_iterations: 4000,
            simplex_tolerance: 1e-10,
            step_scale: 0.3,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Numerical("at least one restart is required".into()));
        }
        if !(self.simplex_tolerance > 0.0 && self.step_scale > 0.0) {
            return Err(Error::Numerical("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn simplex(&self) -> NelderMead {
        NelderMead {
            max_iterations: self.max_iterations,
            tolerance: self.simplex_tolerance,
            step_scale: self.step_scale,
        }
    }
}

/// Outcome of one seeded Nelder–Mead run.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    /// Entropy in ebits at the best vertex (not negated).
    pub entropy_bits: f64,
    pub params: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub direction: Direction,
    pub best_entropy_bits: f64,
    pub best_unitary: ModeUnitary,
    pub best_params: HermitianParams,
    pub best_restart: usize,
    pub per_restart_values: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

/// Where one dense amplitude lands in the block-diagonal coefficient matrix.
#[derive(Clone, Copy, Debug)]
struct Slot {
    block: usize,
    row: usize,
    col: usize,
}

/// `theta -> entropy(apply_redefinition(state, exp_map(theta)), partition)`
/// with all index bookkeeping precomputed.
///
/// For a state of definite photon number the coefficient matrix of every
/// redefinition is block diagonal in the side-A photon number, so the
/// spectrum is assembled from the blocks separately.
#[derive(Clone, Debug)]
pub struct EntropyObjective {
    plan: RedefinitionPlan,
    mode_count: usize,
    blocks: Vec<(usize, usize)>,
    /// `slots[n][idx]` for every sector `n` present in the support.
    slots: Vec<Vec<Slot>>,
}

fn rank_map(modes: usize, totals: impl Iterator<Item = u32>) -> BTreeMap<Occupation, (u32, usize)> {
    let mut out = BTreeMap::new();
    for t in totals {
        for (i, occ) in enumerate_sector(modes, t).into_iter().enumerate() {
            out.insert(occ, (t, i));
        }
    }
    out
}

impl EntropyObjective {
    pub fn new(state: &PureState, partition: &Partition) -> Result<Self> {
        if partition.mode_count() != state.mode_count() {
            return Err(Error::Partition(format!(
                "partition covers {} modes but the state has {}",
                partition.mode_count(),
                state.mode_count()
            )));
        }
        let plan = RedefinitionPlan::new(state);
        let (na, nb) = (partition.side_a().len(), partition.side_b().len());
        let max_total = state.max_total();
        let rows = rank_map(na, 0..=max_total);
        let cols = rank_map(nb, 0..=max_total);
        let definite = state.definite_total();

        let mut blocks = Vec::new();
        let mut offsets_a = BTreeMap::new();
        let mut offsets_b = BTreeMap::new();
        match definite {
            Some(total) => {
                for a in 0..=total {
                    blocks.push((
                        crate::fock::sector_dim(na, a),
                        crate::fock::sector_dim(nb, total - a),
                    ));
                }
            }
            None => {
                let (mut r, mut c) = (0, 0);
                for t in 0..=max_total {
                    offsets_a.insert(t, r);
                    offsets_b.insert(t, c);
                    r += crate::fock::sector_dim(na, t);
                    c += crate::fock::sector_dim(nb, t);
                }
                blocks.push((r, c));
            }
        }

        let mut slots = Vec::new();
        for (n, sector) in plan.sectors.iter().enumerate() {
            if !plan.totals.contains(&(n as u32)) {
                slots.push(Vec::new());
                continue;
            }
            let mut s = Vec::with_capacity(sector.occupations.len());
            for occ in &sector.occupations {
                let (ta, ra) = rows[&occ.restrict(partition.side_a())];
                let (tb, rb) = cols[&occ.restrict(partition.side_b())];
                s.push(match definite {
                    Some(_) => Slot {
                        block: ta as usize,
                        row: ra,
                        col: rb,
                    },
                    None => Slot {
                        block: 0,
                        row: offsets_a[&ta] + ra,
                        col: offsets_b[&tb] + rb,
                    },
                });
            }
            slots.push(s);
        }
        Ok(Self {
            plan,
            mode_count: state.mode_count(),
            blocks,
            slots,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.mode_count * self.mode_count
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Schmidt weights (unsorted, unclipped) of the state redefined by `u`.
    pub fn weights(&self, u: &ModeUnitary) -> Vec<f64> {
        let dense = self.plan.apply_dense(u);
        let mut mats: Vec<DMatrix<Complex64>> = self
            .blocks
            .iter()
            .map(|&(r, c)| DMatrix::zeros(r, c))
            .collect();
        for (amps, slots) in dense.iter().zip(&self.slots) {
            for (a, s) in amps.iter().zip(slots) {
                mats[s.block][(s.row, s.col)] = *a;
            }
        }
        let mut out = Vec::new();
        for m in mats {
            squared_singular_values(m, &mut out);
        }
        out
    }

    pub fn entropy_at(&self, theta: &[f64]) -> f64 {
        let u = exp_map_slice(self.mode_count, theta);
        let w: Vec<f64> = self
            .weights(&u)
            .into_iter()
            .map(|l| l.clamp(0.0, 1.0))
            .collect();
        entropy_bits(&w)
    }

    /// Starting point for restart `index`: zero for restart 0, otherwise
    /// uniform in `[-pi, pi]` from stream `index` of the seeded generator.
    pub fn start_point(&self, seed: u64, index: usize) -> Vec<f64> {
        let n = self.parameter_count();
        if index == 0 {
            return alloc::vec![0.0; n];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        (0..n)
            .map(|_| {
                let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                -PI + 2.0 * PI * unit
            })
            .collect()
    }

    /// Runs a single restart. Restarts are independent of each other.
    pub fn run_restart(&self, cfg: &OptConfig, index: usize) -> Result<RestartOutcome> {
        let sign = cfg.direction.sign();
        let x0 = self.start_point(cfg.seed, index);
        let m = cfg
            .simplex()
            .minimize(|theta| sign * self.entropy_at(theta), &x0)?;
        Ok(RestartOutcome {
            index,
            entropy_bits: sign * m.value,
            params: m.x,
            evaluations: m.evaluations,
            converged: m.converged,
        })
    }
}

/// Combines restart outcomes into a verified result. The winner is the best
/// value with ties going to the lowest restart index, so the merge does not
/// depend on the order restarts finished in.
pub fn merge_restarts(
    state: &PureState,
    partition: &Partition,
    cfg: &OptConfig,
    mut outcomes: Vec<RestartOutcome>,
) -> Result<OptResult> {
    outcomes.sort_by_key(|o| o.index);
    let Some(first) = outcomes.first() else {
        return Err(Error::Numerical("no restarts to merge".into()));
    };
    let mut best = first;
    for o in &outcomes[1..] {
        if cfg.direction.better(o.entropy_bits, best.entropy_bits) {
            best = o;
        }
    }
    let params = HermitianParams::new(state.mode_count(), best.params.clone())?;
    let unitary = exp_map(&params);
    let check = schmidt_spectrum(&apply_redefinition(state, &unitary)?, partition)?;
    if (check.entropy_bits - best.entropy_bits).abs() > VERIFY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "re-evaluated entropy {} differs from optimizer value {}",
            check.entropy_bits, best.entropy_bits
        )));
    }
    Ok(OptResult {
        direction: cfg.direction,
        best_entropy_bits: check.entropy_bits,
        best_unitary: unitary,
        best_params: params,
        best_restart: best.index,
        per_restart_values: outcomes.iter().map(|o| o.entropy_bits).collect(),
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
        converged: best.converged,
    })
}

/// Minimum or maximum entanglement entropy across `partition` over all
/// unitary redefinitions of the modes of `state`.
pub fn optimize_entanglement(
    state: &PureState,
    partition: &Partition,
    cfg: &OptConfig,
) -> Result<OptResult> {
    cfg.validate()?;
    let objective = EntropyObjective::new(state, partition)?;
    if objective.parameter_count() > MAX_PARAMETERS {
        return Err(Error::Dimension {
            expected: MAX_PARAMETERS,
            found: objective.parameter_count(),
        });
    }
    let outcomes = (0..cfg.restarts)
        .map(|k| objective.run_restart(cfg, k))
        .collect::<Result<Vec<_>>>()?;
    merge_restarts(state, partition, cfg, outcomes)
}
