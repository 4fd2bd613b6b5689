//! Occupation-number basis and sparse pure states.
//!
//! A [`PureState`] stores amplitudes keyed by [`Occupation`] in a
//! `BTreeMap`, so iteration always follows the canonical basis order:
//! lexicographic with the first mode most significant and larger counts
//! first, e.g. `(2,0) < (1,1) < (0,2)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Amplitudes with modulus below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Photon counts per mode, `|n_1 ... n_M>`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn vacuum(mode_count: usize) -> Self {
        Self(vec![0; mode_count])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    /// Total photon number.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Restriction of this occupation to the listed modes, in the listed order.
    pub fn restrict(&self, modes: &[usize]) -> Occupation {
        Occupation(modes.iter().map(|&m| self.0[m]).collect())
    }

    /// `prod_j n_j!` as a float.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for Occupation {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

impl Ord for Occupation {
    fn cmp(&self, other: &Self) -> Ordering {
        // descending lexicographic; shorter-is-smaller only matters across mode counts
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            match b.cmp(a) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Occupation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Number of ways to place `n` photons in `modes` modes, `C(n+M-1, M-1)`.
pub fn sector_dim(modes: usize, n: u32) -> usize {
    if modes == 0 {
        return usize::from(n == 0);
    }
    let n = n as usize;
    let k = (modes - 1).min(n);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n + modes - 1 - i) / (i + 1);
    }
    acc
}

/// All occupations of `mode_count` modes with `n` photons in total, canonically ordered.
pub fn enumerate_sector(mode_count: usize, n: u32) -> Vec<Occupation> {
    let mut out = Vec::with_capacity(sector_dim(mode_count, n));
    let mut counts = vec![0u32; mode_count];
    fill_sector(&mut counts, 0, n, &mut out);
    out
}

fn fill_sector(counts: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Occupation>) {
    if pos + 1 >= counts.len() {
        if let Some(last) = counts.last_mut() {
            *last = remaining;
            out.push(Occupation(counts.to_vec()));
        } else if remaining == 0 {
            out.push(Occupation(Vec::new()));
        }
        return;
    }
    for c in (0..=remaining).rev() {
        counts[pos] = c;
        fill_sector(counts, pos + 1, remaining - c, out);
    }
    counts[pos] = 0;
}

/// Sparse pure state over a fixed number of modes.
///
/// Stored states are not necessarily normalized; [`PureState::normalize`]
/// produces a unit-norm copy.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    mode_count: usize,
    amplitudes: BTreeMap<Occupation, Complex64>,
}

impl PureState {
    /// Builds a state from `(occupation, amplitude)` terms. Repeated
    /// occupations are summed and negligible amplitudes pruned; no
    /// normalization is applied.
    pub fn from_terms<I, O>(mode_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (O, Complex64)>,
        O: Into<Occupation>,
    {
        if mode_count == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        let mut amplitudes = BTreeMap::new();
        for (occ, amp) in terms {
            let occ = occ.into();
            if occ.mode_count() != mode_count {
                return Err(Error::Dimension {
                    expected: mode_count,
                    found: occ.mode_count(),
                });
            }
            *amplitudes.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        amplitudes.retain(|_, a: &mut Complex64| a.norm() >= PRUNE_THRESHOLD);
        Ok(Self {
            mode_count,
            amplitudes,
        })
    }

    /// Equal-weight superposition of the given occupations, normalized.
    pub fn uniform<I, O>(mode_count: usize, occupations: I) -> Result<Self>
    where
        I: IntoIterator<Item = O>,
        O: Into<Occupation>,
    {
        Self::from_terms(
            mode_count,
            occupations
                .into_iter()
                .map(|o| (o, Complex64::new(1.0, 0.0))),
        )?
        .normalize()
    }

    /// A single basis ket.
    pub fn basis(occupation: impl Into<Occupation>) -> Self {
        let occ = occupation.into();
        let mode_count = occ.mode_count();
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occ, Complex64::new(1.0, 0.0));
        Self {
            mode_count,
            amplitudes,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn amplitudes(&self) -> &BTreeMap<Occupation, Complex64> {
        &self.amplitudes
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Amplitude of a basis ket, zero when absent.
    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.amplitudes.get(occ).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest total photon number in the support.
    pub fn max_total(&self) -> u32 {
        self.amplitudes
            .keys()
            .map(Occupation::total)
            .max()
            .unwrap_or(0)
    }

    /// The photon number when the state lies in a single sector.
    pub fn definite_total(&self) -> Option<u32> {
        let mut totals = self.amplitudes.keys().map(Occupation::total);
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    /// Probability weight of each total-photon-number sector in the support.
    pub fn sector_weights(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (occ, amp) in &self.amplitudes {
            *out.entry(occ.total()).or_insert(0.0) += amp.norm_sqr();
        }
        out
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        if self.mode_count != other.mode_count {
            return Err(Error::Dimension {
                expected: self.mode_count,
                found: other.mode_count,
            });
        }
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(occ) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    /// Unit-norm copy, pruned after rescaling.
    pub fn normalize(&self) -> Result<PureState> {
        if self
            .amplitudes
            .values()
            .all(|a| a.norm() <= PRUNE_THRESHOLD)
        {
            return Err(Error::DegenerateState);
        }
        let norm = self.norm_sqr().sqrt();
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(o, a)| (o.clone(), a / norm))
            .filter(|(_, a)| a.norm() >= PRUNE_THRESHOLD)
            .collect();
        Ok(PureState {
            mode_count: self.mode_count,
            amplitudes,
        })
    }

    /// Copy multiplied by a global phase so that the first amplitude in
    /// canonical order is real and positive. Used for reporting only.
    pub fn canonical_phase(&self) -> PureState {
        let Some(first) = self.amplitudes.values().next() else {
            return self.clone();
        };
        let phase = first.conj() / first.norm();
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(o, a)| (o.clone(), a * phase))
            .collect();
        PureState {
            mode_count: self.mode_count,
            amplitudes,
        }
    }

    /// `1 - |<self|other>|`, zero when the states agree up to global phase.
    pub fn phase_distance(&self, other: &PureState) -> Result<f64> {
        Ok(1.0 - self.inner_product(other)?.norm())
    }

    /// Largest per-amplitude difference after canonicalizing both phases.
    pub fn max_amplitude_difference(&self, other: &PureState) -> Result<f64> {
        if self.mode_count != other.mode_count {
            return Err(Error::Dimension {
                expected: self.mode_count,
                found: other.mode_count,
            });
        }
        let a = self.canonical_phase();
        let b = other.canonical_phase();
        let mut worst: f64 = 0.0;
        for (occ, x) in &a.amplitudes {
            worst = worst.max((x - b.amplitude(occ)).norm());
        }
        for (occ, y) in &b.amplitudes {
            if !a.amplitudes.contains_key(occ) {
                worst = worst.max(y.norm());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn enumerate_two_modes_two_photons() {
        let s = enumerate_sector(2, 2);
        assert_eq!(s, vec![[2, 0].into(), [1, 1].into(), [0, 2].into()]);
    }

    #[test]
    fn enumerate_vacuum_and_counts() {
        assert_eq!(enumerate_sector(1, 0), vec![Occupation::from([0])]);
        assert_eq!(enumerate_sector(6, 2).len(), 21);
        for m in 1..=8usize {
            for n in 0..=6u32 {
                let expected = binomial(n as u64 + m as u64 - 1, m as u64 - 1) as usize;
                let sector = enumerate_sector(m, n);
                assert_eq!(sector.len(), expected, "M={m} n={n}");
                assert_eq!(sector_dim(m, n), expected);
                assert!(sector.windows(2).all(|w| w[0] < w[1]));
                assert!(sector.iter().all(|o| o.total() == n));
            }
        }
    }

    #[test]
    fn ordering_is_strict_total_on_sector() {
        let sector = enumerate_sector(3, 3);
        for a in &sector {
            for b in &sector {
                let ab = a.cmp(b);
                assert_eq!(ab, b.cmp(a).reverse());
                assert_eq!(ab == Ordering::Equal, a == b);
                for c in &sector {
                    if a < b && b < c {
                        assert!(a < c);
                    }
                }
            }
        }
    }

    #[test]
    fn sector_weight_examples() {
        let s = PureState::uniform(2, [[0, 1], [1, 0]]).unwrap();
        let w = s.sector_weights();
        assert_eq!(w.len(), 1);
        assert!((w[&1] - 1.0).abs() < 1e-12);

        let s = PureState::uniform(2, [[0, 0], [1, 1]]).unwrap();
        let w = s.sector_weights();
        assert!((w[&0] - 0.5).abs() < 1e-12);
        assert!((w[&2] - 0.5).abs() < 1e-12);

        let w = PureState::basis([1, 1]).sector_weights();
        assert_eq!(w[&2], 1.0);
    }

    #[test]
    fn inner_product_examples() {
        let s = PureState::uniform(2, [[2, 0], [0, 2]]).unwrap();
        assert!((s.inner_product(&s).unwrap() - c(1.0)).norm() < 1e-14);
        let a = PureState::basis([2, 0]);
        let b = PureState::basis([0, 2]);
        assert_eq!(a.inner_product(&b).unwrap(), c(0.0));
        let p = s.inner_product(&a).unwrap();
        assert!((p - c(core::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-14);
        let wrong = PureState::basis([1, 0, 0]);
        assert!(matches!(
            a.inner_product(&wrong),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let s = PureState::from_terms(2, [([1, 0], c(2.0))]).unwrap();
        assert_eq!(s.normalize().unwrap(), PureState::basis([1, 0]));

        let s = PureState::from_terms(2, [([2, 0], c(1.0)), ([0, 2], c(1.0))]).unwrap();
        let n = s.normalize().unwrap();
        for a in n.amplitudes().values() {
            assert!((a - c(core::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-15);
        }

        let s = PureState::from_terms(2, [([1, 0], c(1e-20))]).unwrap();
        assert_eq!(s.normalize(), Err(Error::DegenerateState));
    }

    #[test]
    fn mismatched_keys_rejected() {
        let r = PureState::from_terms(2, [(vec![1, 0], c(1.0)), (vec![0, 0, 1], c(1.0))]);
        assert!(matches!(r, Err(Error::Dimension { .. })));
    }

    fn arb_state() -> impl Strategy<Value = PureState> {
        (1usize..=4).prop_flat_map(|m| {
            proptest::collection::vec(
                (
                    proptest::collection::vec(0u32..4, m),
                    -1.0f64..1.0,
                    -1.0f64..1.0,
                ),
                1..8,
            )
            .prop_filter_map("nonzero", move |terms| {
                PureState::from_terms(
                    m,
                    terms
                        .into_iter()
                        .map(|(o, re, im)| (o, Complex64::new(re, im))),
                )
                .ok()?
                .normalize()
                .ok()
            })
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in arb_state()) {
            let twice = s.normalize().unwrap();
            for (occ, a) in s.iter() {
                prop_assert!((a - twice.amplitude(occ)).norm() < 1e-14);
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn sector_weights_sum_to_one(s in arb_state()) {
            let w = s.sector_weights();
            prop_assert!(w.values().all(|&v| v >= 0.0));
            prop_assert!((w.values().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn inner_product_conjugate_symmetric(a in arb_state(), b in arb_state()) {
            if a.mode_count() == b.mode_count() {
                let ab = a.inner_product(&b).unwrap();
                let ba = b.inner_product(&a).unwrap();
                prop_assert!((ab - ba.conj()).norm() < 1e-14);
            }
        }
    }
}
