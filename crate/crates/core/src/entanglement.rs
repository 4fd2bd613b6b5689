//! Bipartite Schmidt analysis across a mode partition.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{sector_dim, Occupation, PureState};

/// Schmidt coefficients above this count toward the numerical rank.
pub const RANK_THRESHOLD: f64 = 1e-10;
/// Negative squared singular values down to this are treated as rounding.
pub const CLIP_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of the Schmidt weights from unit sum.
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// Disjoint two-way split of the modes `0..M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl Partition {
    pub fn new(mut side_a: Vec<usize>, mut side_b: Vec<usize>, mode_count: usize) -> Result<Self> {
        side_a.sort_unstable();
        side_b.sort_unstable();
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::Partition("both sides must be non-empty".into()));
        }
        let mut seen = vec![false; mode_count];
        for &m in side_a.iter().chain(&side_b) {
            if m >= mode_count {
                return Err(Error::Partition(format!(
                    "mode {m} out of range for {mode_count} modes"
                )));
            }
            if seen[m] {
                return Err(Error::Partition(format!("mode {m} listed twice")));
            }
            seen[m] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Partition(format!(
                "mode {missing} is on neither side"
            )));
        }
        Ok(Self { side_a, side_b })
    }

    /// First `k` modes against the remaining `mode_count - k`.
    pub fn split_at(k: usize, mode_count: usize) -> Result<Self> {
        Self::new((0..k).collect(), (k..mode_count).collect(), mode_count)
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn mode_count(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    pub fn swapped(&self) -> Partition {
        Partition {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
        }
    }

    fn check(&self, state: &PureState) -> Result<()> {
        if self.mode_count() != state.mode_count() {
            return Err(Error::Partition(format!(
                "partition covers {} modes but the state has {}",
                self.mode_count(),
                state.mode_count()
            )));
        }
        Ok(())
    }
}

/// Amplitudes laid out as `rows x cols` with rows labelled by side-A
/// restrictions and columns by side-B restrictions.
#[derive(Clone, Debug)]
pub struct CoefficientMatrix {
    pub matrix: DMatrix<Complex64>,
    pub rows: Vec<Occupation>,
    pub cols: Vec<Occupation>,
}

pub fn coefficient_matrix(state: &PureState, partition: &Partition) -> Result<CoefficientMatrix> {
    partition.check(state)?;
    let mut rows = BTreeMap::new();
    let mut cols = BTreeMap::new();
    for occ in state.amplitudes().keys() {
        rows.insert(occ.restrict(&partition.side_a), 0usize);
        cols.insert(occ.restrict(&partition.side_b), 0usize);
    }
    for (i, v) in rows.values_mut().enumerate() {
        *v = i;
    }
    for (i, v) in cols.values_mut().enumerate() {
        *v = i;
    }
    let mut matrix = DMatrix::zeros(rows.len(), cols.len());
    for (occ, amp) in state.iter() {
        let r = rows[&occ.restrict(&partition.side_a)];
        let c = cols[&occ.restrict(&partition.side_b)];
        matrix[(r, c)] = *amp;
    }
    Ok(CoefficientMatrix {
        matrix,
        rows: rows.into_keys().collect(),
        cols: cols.into_keys().collect(),
    })
}

/// Schmidt weights and entanglement entropy of a bipartite pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    /// Descending, clipped to `[0, 1]`.
    pub lambdas: Vec<f64>,
    pub entropy_bits: f64,
    pub numerical_rank: usize,
}

impl SchmidtSpectrum {
    /// Builds the spectrum from raw squared singular values.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if sum.is_nan() || (sum - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::Numerical(format!(
                "Schmidt weights sum to {sum}, state is not normalized"
            )));
        }
        for w in weights.iter_mut() {
            if !w.is_finite() || *w < -CLIP_TOLERANCE {
                return Err(Error::Numerical(format!("Schmidt weight {w} out of range")));
            }
            *w = w.clamp(0.0, 1.0);
        }
        weights.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            entropy_bits: entropy_bits(&weights),
            numerical_rank: weights.iter().filter(|&&l| l > RANK_THRESHOLD).count(),
            lambdas: weights,
        })
    }
}

/// `-sum l log2 l` with `0 log 0 = 0`.
pub fn entropy_bits(lambdas: &[f64]) -> f64 {
    lambdas
        .iter()
        .filter(|&&l| l > 0.0)
        .fold(0.0, |acc, &l| acc - l * l.log2())
}

pub(crate) fn squared_singular_values(m: DMatrix<Complex64>, out: &mut Vec<f64>) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        out.push(m.iter().map(|z| z.norm_sqr()).sum());
        return;
    }
    out.extend(m.singular_values_unordered().iter().map(|s| s * s));
}

pub fn schmidt_spectrum(state: &PureState, partition: &Partition) -> Result<SchmidtSpectrum> {
    let c = coefficient_matrix(state, partition)?;
    let mut weights = Vec::new();
    squared_singular_values(c.matrix, &mut weights);
    SchmidtSpectrum::from_weights(weights)
}

/// Reduced density matrix of one side and the occupations labelling it.
pub fn reduced_density_matrix(
    state: &PureState,
    partition: &Partition,
    side: Side,
) -> Result<(DMatrix<Complex64>, Vec<Occupation>)> {
    let c = coefficient_matrix(state, partition)?;
    Ok(match side {
        Side::A => (&c.matrix * c.matrix.adjoint(), c.rows),
        Side::B => (c.matrix.transpose() * c.matrix.conjugate(), c.cols),
    })
}

/// Upper bound on the Schmidt rank of every mode redefinition of `state`.
///
/// Redefinitions keep each photon-number sector, so the coefficient matrix
/// of any redefinition has a block `(a, b)` of size
/// `dim(|A|, a) x dim(|B|, b)` only where `a + b` is a total present in
/// `state`. The rank is at most the cheapest set of row and column blocks
/// covering every such block. For a definite photon number `N` the blocks
/// form a matching and the bound is `sum_n min(dim(|A|, n), dim(|B|, N - n))`.
pub fn rank_bound(state: &PureState, partition: &Partition) -> Result<usize> {
    partition.check(state)?;
    let (a, b) = (partition.side_a.len(), partition.side_b.len());
    if let Some(total) = state.definite_total() {
        return Ok((0..=total)
            .map(|n| sector_dim(a, n).min(sector_dim(b, total - n)))
            .sum());
    }
    let totals: Vec<u32> = state.sector_weights().into_keys().collect();
    let top = state.max_total();
    let rows: Vec<usize> = (0..=top).map(|n| sector_dim(a, n)).collect();
    let cols: Vec<usize> = (0..=top).map(|n| sector_dim(b, n)).collect();
    let linked = |i: usize, j: usize| totals.contains(&((i + j) as u32));
    Ok(min_block_cover(&rows, &cols, linked))
}

/// Minimum total weight of row and column blocks covering every linked
/// `(row, col)` pair, computed as a maximum flow
/// `source -> row -> col -> sink` with block sizes as capacities.
fn min_block_cover(rows: &[usize], cols: &[usize], linked: impl Fn(usize, usize) -> bool) -> usize {
    let (r, c) = (rows.len(), cols.len());
    let n = r + c + 2;
    let (source, sink) = (n - 2, n - 1);
    let mut cap = vec![vec![0usize; n]; n];
    for (i, &w) in rows.iter().enumerate() {
        cap[source][i] = w;
        for j in 0..c {
            if linked(i, j) {
                cap[i][r + j] = usize::MAX;
            }
        }
    }
    for (j, &w) in cols.iter().enumerate() {
        cap[r + j][sink] = w;
    }
    let mut flow = 0usize;
    loop {
        // breadth-first augmenting path
        let mut prev = vec![usize::MAX; n];
        prev[source] = source;
        let mut queue = alloc::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return flow;
        }
        let mut push = usize::MAX;
        let mut v = sink;
        while v != source {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = sink;
        while v != source {
            let u = prev[v];
            cap[u][v] = cap[u][v].saturating_sub(push);
            cap[v][u] = cap[v][u].saturating_add(push);
            v = u;
        }
        flow += push;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{apply_redefinition, exp_map, HermitianParams};
    use core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell_like() -> PureState {
        PureState::uniform(2, [[0, 1], [1, 0]]).unwrap()
    }

    fn two_pairs() -> PureState {
        PureState::uniform(4, [[0, 1, 1, 0], [1, 0, 0, 1]]).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0], vec![1], 2).is_ok());
        assert!(Partition::new(vec![], vec![0, 1], 2).is_err());
        assert!(Partition::new(vec![0, 1], vec![1], 2).is_err());
        assert!(Partition::new(vec![0], vec![2], 3).is_err());
        assert!(Partition::new(vec![0], vec![5], 2).is_err());
        let p = Partition::new(vec![2, 0], vec![1], 3).unwrap();
        assert_eq!(p.side_a(), &[0, 2]);
        let s = PureState::basis([1, 0, 0, 0]);
        assert!(matches!(schmidt_spectrum(&s, &p), Err(Error::Partition(_))));
    }

    #[test]
    fn coefficient_matrix_examples() {
        let p = Partition::split_at(1, 2).unwrap();
        let cm = coefficient_matrix(&bell_like(), &p).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_eq!(cm.rows, vec![Occupation::from([1]), Occupation::from([0])]);
        assert!((cm.matrix[(0, 0)] - c(0.0)).norm() < 1e-15);
        assert!((cm.matrix[(0, 1)] - c(h)).norm() < 1e-15);
        assert!((cm.matrix[(1, 0)] - c(h)).norm() < 1e-15);

        let cm = coefficient_matrix(&PureState::basis([1, 1]), &p).unwrap();
        assert_eq!(cm.matrix.shape(), (1, 1));

        let cm = coefficient_matrix(&two_pairs(), &Partition::split_at(2, 4).unwrap()).unwrap();
        assert_eq!(
            cm.rows,
            vec![Occupation::from([1, 0]), Occupation::from([0, 1])]
        );
        assert_eq!(
            cm.cols,
            vec![Occupation::from([1, 0]), Occupation::from([0, 1])]
        );
        // (1,0)(0,1) and (0,1)(1,0) carry the amplitude
        assert!((cm.matrix[(0, 1)] - c(h)).norm() < 1e-15);
        assert!((cm.matrix[(1, 0)] - c(h)).norm() < 1e-15);
        assert_eq!(cm.matrix[(0, 0)], c(0.0));
        assert!((cm.matrix.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_examples() {
        let p = Partition::split_at(1, 2).unwrap();
        let s = schmidt_spectrum(&bell_like(), &p).unwrap();
        assert!((s.lambdas[0] - 0.5).abs() < 1e-12 && (s.lambdas[1] - 0.5).abs() < 1e-12);
        assert!((s.entropy_bits - 1.0).abs() < 1e-12);

        let s = schmidt_spectrum(&PureState::basis([1, 1]), &p).unwrap();
        assert_eq!(s.lambdas, vec![1.0]);
        assert_eq!(s.entropy_bits, 0.0);
        assert_eq!(s.numerical_rank, 1);

        let s = schmidt_spectrum(
            &PureState::uniform(2, [[1, 1], [2, 0], [0, 2]]).unwrap(),
            &p,
        )
        .unwrap();
        assert!(s.lambdas.iter().all(|l| (l - 1.0 / 3.0).abs() < 1e-12));
        assert!((s.entropy_bits - 3f64.log2()).abs() < 1e-12);

        let vac = PureState::from_terms(
            2,
            [
                ([0, 0], c(FRAC_1_SQRT_2)),
                ([2, 0], c(0.5)),
                ([0, 2], c(0.5)),
            ],
        )
        .unwrap();
        let s = schmidt_spectrum(&vac, &p).unwrap();
        let r = 3f64.sqrt() / 4.0;
        assert!((s.lambdas[0] - (0.5 + r)).abs() < 1e-12);
        assert!((s.lambdas[1] - (0.5 - r)).abs() < 1e-12);
        assert!((s.entropy_bits - 0.354579).abs() < 1e-6);
    }

    #[test]
    fn unnormalized_state_is_flagged() {
        let s = PureState::from_terms(2, [([1, 0], c(2.0))]).unwrap();
        let p = Partition::split_at(1, 2).unwrap();
        assert!(matches!(schmidt_spectrum(&s, &p), Err(Error::Numerical(_))));
        assert!(SchmidtSpectrum::from_weights(vec![1.0 + 1e-13, -1e-13]).is_ok());
        assert!(SchmidtSpectrum::from_weights(vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn density_matrix_examples() {
        let p = Partition::split_at(1, 2).unwrap();
        let (rho, idx) = reduced_density_matrix(&bell_like(), &p, Side::A).unwrap();
        assert_eq!(idx.len(), 2);
        assert!((rho[(0, 0)] - c(0.5)).norm() < 1e-12);
        assert!((rho[(1, 1)] - c(0.5)).norm() < 1e-12);
        assert!(rho[(0, 1)].norm() < 1e-12);

        let (rho, _) = reduced_density_matrix(&PureState::basis([1, 1]), &p, Side::B).unwrap();
        assert_eq!(rho.shape(), (1, 1));
        assert!((rho[(0, 0)] - c(1.0)).norm() < 1e-15);

        // single mode against three with weights 3/4 on |0> and 1/4 on |2>
        let s = PureState::from_terms(
            4,
            [([0, 1, 1, 0], c(0.75f64.sqrt())), ([2, 0, 0, 0], c(0.5))],
        )
        .unwrap();
        let (rho, idx) =
            reduced_density_matrix(&s, &Partition::split_at(1, 4).unwrap(), Side::A).unwrap();
        assert_eq!(idx, vec![Occupation::from([2]), Occupation::from([0])]);
        assert!((rho[(0, 0)] - c(0.25)).norm() < 1e-12);
        assert!((rho[(1, 1)] - c(0.75)).norm() < 1e-12);
    }

    #[test]
    fn rank_bound_examples() {
        let two = |m: usize| {
            let mut a = vec![0u32; 2 * m];
            a[0] = 1;
            a[2 * m - 1] = 1;
            PureState::basis(a)
        };
        let bound = |s: &PureState, k: usize| {
            rank_bound(s, &Partition::split_at(k, s.mode_count()).unwrap()).unwrap()
        };
        assert_eq!(bound(&two(1), 1), 3);
        assert_eq!(bound(&two(2), 2), 4);
        assert_eq!(bound(&two(3), 3), 5);
        for n in 1..=6 {
            assert_eq!(bound(&two(n), n), n + 2);
        }
        let four = PureState::uniform(4, [[0, 2, 2, 0], [2, 0, 0, 2], [1, 1, 1, 1]]).unwrap();
        assert_eq!(bound(&four, 2), 9);

        // totals {0, 2} on 1|1: blocks (0,0), (0,2), (1,1), (2,0) need three covers
        let mixed = PureState::uniform(2, [[0, 0], [1, 1]]).unwrap();
        assert_eq!(bound(&mixed, 1), 3);
        // totals {0, 1} on 1|1: rows 0 and 1 against columns 0 and 1, minus (1,1)
        let low = PureState::uniform(2, [[0, 0], [1, 0]]).unwrap();
        assert_eq!(bound(&low, 1), 2);
        // totals {1, 2} on 2|2: covering rows 0, columns 0 and one side with
        // one photon costs 1 + 1 + 2, below the sum 2 + 4 of the sector bounds
        let both = PureState::uniform(4, [[1, 0, 0, 0], [1, 0, 0, 1]]).unwrap();
        assert_eq!(bound(&both, 2), 4);
    }

    #[test]
    fn density_matrix_eigenvalues_match_spectrum() {
        let s = PureState::uniform(3, [[2, 0, 1], [0, 1, 2], [1, 1, 1]]).unwrap();
        let u = exp_map(
            &HermitianParams::new(3, (0..9).map(|i| 0.3 * i as f64 - 1.0).collect()).unwrap(),
        );
        let t = apply_redefinition(&s, &u).unwrap();
        let p = Partition::new(vec![1], vec![0, 2], 3).unwrap();
        let spectrum = schmidt_spectrum(&t, &p).unwrap();
        for side in [Side::A, Side::B] {
            let (rho, _) = reduced_density_matrix(&t, &p, side).unwrap();
            assert!((rho.trace() - c(1.0)).norm() < 1e-10);
            assert!((&rho - rho.adjoint()).camax() < 1e-12);
            let mut eig: Vec<f64> = rho.symmetric_eigenvalues().iter().copied().collect();
            eig.sort_by(|a, b| b.total_cmp(a));
            for (i, l) in spectrum.lambdas.iter().enumerate() {
                assert!((eig[i] - l).abs() < 1e-10);
            }
            assert!(eig[spectrum.lambdas.len()..]
                .iter()
                .all(|e| e.abs() < 1e-10));
        }
        let swapped = schmidt_spectrum(&t, &p.swapped()).unwrap();
        assert!((swapped.entropy_bits - spectrum.entropy_bits).abs() < 1e-12);
    }
}
