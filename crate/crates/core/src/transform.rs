//! Passive mode redefinitions.
//!
//! New creation operators are defined by `a'_k^dag = sum_j U[k][j] a_j^dag`.
//! Inverting, every old operator becomes `a_j^dag = sum_k conj(U[k][j]) a'_k^dag`;
//! substituting that into the creation polynomial of a state and
//! re-collecting monomials yields its amplitudes in the new basis.

use alloc::vec;
use alloc::vec::Vec;
use alloc::{collections::BTreeMap, format};

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{enumerate_sector, Occupation, PureState, PRUNE_THRESHOLD};

/// Default unitarity tolerance for [`ModeUnitary`] construction.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// An `M x M` unitary acting on mode creation operators.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    entries: DMatrix<Complex64>,
}

/// `max |U^dag U - I|` over all entries.
pub fn unitarity_residual(m: &DMatrix<Complex64>) -> f64 {
    let n = m.ncols();
    let g = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Wraps `entries` as a [`ModeUnitary`] if it is square and unitary within `tol`.
pub fn validate_unitary(entries: DMatrix<Complex64>, tol: f64) -> Result<ModeUnitary> {
    if entries.nrows() != entries.ncols() {
        return Err(Error::NotSquare {
            rows: entries.nrows(),
            cols: entries.ncols(),
        });
    }
    if entries.nrows() == 0 {
        return Err(Error::Dimension {
            expected: 1,
            found: 0,
        });
    }
    let residual = unitarity_residual(&entries);
    // NaN residuals must also be rejected
    if residual.is_nan() || residual > tol {
        return Err(Error::NotUnitary { residual, tol });
    }
    Ok(ModeUnitary { entries })
}

impl ModeUnitary {
    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    /// Builds from row vectors, rejecting ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        let entries = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        validate_unitary(entries, tol)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> ModeUnitary {
        ModeUnitary {
            entries: self.entries.adjoint(),
        }
    }

    /// Matrix product `self * rhs`: redefine by `rhs` first, then by `self`.
    pub fn compose(&self, rhs: &ModeUnitary) -> Result<ModeUnitary> {
        if self.dim() != rhs.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        Ok(ModeUnitary {
            entries: &self.entries * &rhs.entries,
        })
    }

    /// Block unitary that applies each `(modes, block)` pair on its own
    /// subset of modes and acts as the identity elsewhere.
    pub fn local(dim: usize, blocks: &[(&[usize], &ModeUnitary)]) -> Result<ModeUnitary> {
        let mut entries = DMatrix::<Complex64>::identity(dim, dim);
        let mut used = vec![false; dim];
        for (modes, block) in blocks {
            if modes.len() != block.dim() {
                return Err(Error::Dimension {
                    expected: modes.len(),
                    found: block.dim(),
                });
            }
            for &m in modes.iter() {
                if m >= dim || used[m] {
                    return Err(Error::Index(format!("mode {m} invalid or repeated")));
                }
                used[m] = true;
            }
            for (a, &ra) in modes.iter().enumerate() {
                for (b, &rb) in modes.iter().enumerate() {
                    entries[(ra, rb)] = block.get(a, b);
                }
            }
        }
        Ok(ModeUnitary { entries })
    }
}

/// Coordinates on the unitary group: `U = exp(iH)` with `H` Hermitian.
///
/// Layout: the `M` diagonal entries of `H`, then the real parts of the
/// strict upper triangle in row-major order, then the imaginary parts in the
/// same order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianParams {
    dim: usize,
    theta: Vec<f64>,
}

impl HermitianParams {
    pub fn new(dim: usize, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                found: theta.len(),
            });
        }
        Ok(Self { dim, theta })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            theta: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn hermitian(&self) -> DMatrix<Complex64> {
        hermitian_from(self.dim, &self.theta)
    }
}

fn hermitian_from(dim: usize, theta: &[f64]) -> DMatrix<Complex64> {
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex64::new(theta[i], 0.0);
    }
    let off = dim * (dim - 1) / 2;
    let mut k = 0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = Complex64::new(theta[dim + k], theta[dim + off + k]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 1;
        }
    }
    h
}

/// `exp(iH)` computed from the Hermitian eigendecomposition of `H`.
pub fn exp_map(params: &HermitianParams) -> ModeUnitary {
    exp_i_hermitian(params.hermitian())
}

pub(crate) fn exp_map_slice(dim: usize, theta: &[f64]) -> ModeUnitary {
    exp_i_hermitian(hermitian_from(dim, theta))
}

fn exp_i_hermitian(h: DMatrix<Complex64>) -> ModeUnitary {
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::new(lambda.cos(), lambda.sin());
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= phase;
        }
    }
    ModeUnitary {
        entries: scaled * v.adjoint(),
    }
}

/// Two-mode rotation on modes `i < j`:
/// `[[cos t, e^{i phi} sin t], [-e^{-i phi} sin t, cos t]]`, identity elsewhere.
pub fn beam_splitter(dim: usize, i: usize, j: usize, theta: f64, phi: f64) -> Result<ModeUnitary> {
    if !(i < j && j < dim) {
        return Err(Error::Index(format!(
            "beam splitter needs 0 <= i < j < {dim}, got i={i}, j={j}"
        )));
    }
    let (s, c) = (theta.sin(), theta.cos());
    let e = Complex64::new(phi.cos(), phi.sin());
    let mut entries = DMatrix::<Complex64>::identity(dim, dim);
    entries[(i, i)] = Complex64::new(c, 0.0);
    entries[(j, j)] = Complex64::new(c, 0.0);
    entries[(i, j)] = e * s;
    entries[(j, i)] = -e.conj() * s;
    Ok(ModeUnitary { entries })
}

/// Dense layout of one photon-number sector with creation-step lookups.
#[derive(Clone, Debug)]
pub(crate) struct SectorTable {
    pub(crate) occupations: Vec<Occupation>,
    /// `raise[idx * M + k]` is the index in the next sector of
    /// `occupations[idx]` with one more photon in mode `k`.
    raise: Vec<usize>,
    /// `sqrt(prod_k m_k!)` per occupation.
    sqrt_factorials: Vec<f64>,
}

/// Precomputed layout for rewriting one state under many unitaries.
#[derive(Clone, Debug)]
pub struct RedefinitionPlan {
    mode_count: usize,
    pub(crate) sectors: Vec<SectorTable>,
    terms: Vec<PlanTerm>,
    /// Totals present in the support.
    pub(crate) totals: Vec<u32>,
}

#[derive(Clone, Debug)]
struct PlanTerm {
    /// Old mode of each creation operator, with repetition.
    creations: Vec<usize>,
    /// `alpha / sqrt(prod n_j!)`.
    weight: Complex64,
}

impl RedefinitionPlan {
    pub fn new(state: &PureState) -> Self {
        let m = state.mode_count();
        let max_total = state.max_total();
        let occupations: Vec<Vec<Occupation>> =
            (0..=max_total).map(|n| enumerate_sector(m, n)).collect();
        let mut sectors = Vec::with_capacity(occupations.len());
        for (n, occs) in occupations.iter().enumerate() {
            let mut raise = Vec::new();
            if let Some(next) = occupations.get(n + 1) {
                let rank: BTreeMap<&Occupation, usize> =
                    next.iter().enumerate().map(|(i, o)| (o, i)).collect();
                raise.reserve(occs.len() * m);
                for occ in occs {
                    for k in 0..m {
                        let mut counts = occ.counts().to_vec();
                        counts[k] += 1;
                        raise.push(rank[&Occupation::new(counts)]);
                    }
                }
            }
            let sqrt_factorials = occs.iter().map(|o| o.factorial_product().sqrt()).collect();
            sectors.push(SectorTable {
                occupations: occs.clone(),
                raise,
                sqrt_factorials,
            });
        }
        let terms = state
            .iter()
            .map(|(occ, amp)| {
                let creations = occ
                    .counts()
                    .iter()
                    .enumerate()
                    .flat_map(|(j, &n)| core::iter::repeat_n(j, n as usize))
                    .collect();
                PlanTerm {
                    creations,
                    weight: amp / occ.factorial_product().sqrt(),
                }
            })
            .collect();
        let totals = state.sector_weights().keys().copied().collect();
        Self {
            mode_count: m,
            sectors,
            terms,
            totals,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Dense amplitudes per sector (`out[n][idx]`) of the redefined state.
    pub(crate) fn apply_dense(&self, u: &ModeUnitary) -> Vec<Vec<Complex64>> {
        let m = self.mode_count;
        // conj(U[k][j]) stored column-major per old mode j
        let mut columns = vec![Complex64::default(); m * m];
        for j in 0..m {
            for k in 0..m {
                columns[j * m + k] = u.entries[(k, j)].conj();
            }
        }
        let mut out: Vec<Vec<Complex64>> = self
            .sectors
            .iter()
            .map(|s| vec![Complex64::default(); s.occupations.len()])
            .collect();
        let mut poly = Vec::new();
        let mut next = Vec::new();
        for term in &self.terms {
            poly.clear();
            poly.push(term.weight);
            for (deg, &j) in term.creations.iter().enumerate() {
                let table = &self.sectors[deg];
                next.clear();
                next.resize(
                    self.sectors[deg + 1].occupations.len(),
                    Complex64::default(),
                );
                let col = &columns[j * m..(j + 1) * m];
                for (idx, &c) in poly.iter().enumerate() {
                    if c.re == 0.0 && c.im == 0.0 {
                        continue;
                    }
                    let targets = &table.raise[idx * m..(idx + 1) * m];
                    for (&t, &w) in targets.iter().zip(col) {
                        next[t] += c * w;
                    }
                }
                core::mem::swap(&mut poly, &mut next);
            }
            let total = term.creations.len();
            let sector = &self.sectors[total];
            for (acc, (&c, &f)) in out[total]
                .iter_mut()
                .zip(poly.iter().zip(&sector.sqrt_factorials))
            {
                *acc += c * f;
            }
        }
        out
    }

    pub fn apply(&self, u: &ModeUnitary) -> Result<PureState> {
        if u.dim() != self.mode_count {
            return Err(Error::Dimension {
                expected: self.mode_count,
                found: u.dim(),
            });
        }
        let dense = self.apply_dense(u);
        let terms = dense.into_iter().enumerate().flat_map(|(n, amps)| {
            let occs = &self.sectors[n].occupations;
            amps.into_iter()
                .enumerate()
                .filter(|(_, a)| a.norm() >= PRUNE_THRESHOLD)
                .map(move |(i, a)| (occs[i].clone(), a))
        });
        PureState::from_terms(self.mode_count, terms)
    }
}

/// Re-expresses `state` in the modes defined by `u`.
pub fn apply_redefinition(state: &PureState, u: &ModeUnitary) -> Result<PureState> {
    if u.dim() != state.mode_count() {
        return Err(Error::Dimension {
            expected: state.mode_count(),
            found: u.dim(),
        });
    }
    RedefinitionPlan::new(state).apply(u)
}
