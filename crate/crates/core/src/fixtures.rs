//! Reference states and mode redefinitions with known entanglement.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::fock::PureState;
use crate::transform::{ModeUnitary, UNITARY_TOLERANCE};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unitary(rows: Vec<Vec<Complex64>>) -> ModeUnitary {
    ModeUnitary::from_rows(&rows, UNITARY_TOLERANCE).expect("fixture matrices are unitary")
}

/// `(|01> + |10>)/sqrt 2`: one photon shared by two modes.
pub fn single_photon_pair() -> PureState {
    PureState::uniform(2, [[0, 1], [1, 0]]).expect("valid")
}

/// `(|20> + |02>)/sqrt 2`.
pub fn two_photon_pair() -> PureState {
    PureState::uniform(2, [[2, 0], [0, 2]]).expect("valid")
}

/// `(|11> + |20> + |02>)/sqrt 3`.
pub fn three_term_pair() -> PureState {
    PureState::uniform(2, [[1, 1], [2, 0], [0, 2]]).expect("valid")
}

/// Two photons in `2n` modes, `sum_k |1_k 1_{2n-1-k}> / sqrt n`: mode `k`
/// is paired with its mirror image.
pub fn mirrored_pairs(n: usize) -> PureState {
    let m = 2 * n;
    let occs = (0..n).map(|k| {
        let mut o = vec![0u32; m];
        o[k] = 1;
        o[m - 1 - k] = 1;
        o
    });
    PureState::uniform(m, occs).expect("valid")
}

/// `(|0220> + |2002> - |1111>)/sqrt 3`.
pub fn four_photon_state() -> PureState {
    let a = 1.0 / 3f64.sqrt();
    PureState::from_terms(
        4,
        [
            ([0, 2, 2, 0], c(a, 0.0)),
            ([2, 0, 0, 2], c(a, 0.0)),
            ([1, 1, 1, 1], c(-a, 0.0)),
        ],
    )
    .expect("valid")
}

/// `(|00> + |11>)/sqrt 2`, mixing photon numbers 0 and 2.
pub fn vacuum_pair() -> PureState {
    PureState::uniform(2, [[0, 0], [1, 1]]).expect("valid")
}

/// `(|00> + (|02> + |20>)/sqrt 2)/sqrt 2`.
pub fn vacuum_pair_rewritten() -> PureState {
    PureState::from_terms(
        2,
        [
            ([0, 0], c(FRAC_1_SQRT_2, 0.0)),
            ([0, 2], c(0.5, 0.0)),
            ([2, 0], c(0.5, 0.0)),
        ],
    )
    .expect("valid")
}

/// `a'_A = (a_A + a_B)/sqrt 2`, `a'_B = (a_A - a_B)/sqrt 2`.
pub fn sum_difference_modes() -> ModeUnitary {
    let h = FRAC_1_SQRT_2;
    unitary(vec![
        vec![c(h, 0.0), c(h, 0.0)],
        vec![c(h, 0.0), c(-h, 0.0)],
    ])
}

/// `a'_A = (a_A + x a_B)/sqrt 2`, `a'_B = (a_A - x a_B)/sqrt 2` for a unit-modulus `x`.
pub fn phased_sum_difference_modes(x: Complex64) -> ModeUnitary {
    let h = FRAC_1_SQRT_2;
    unitary(vec![vec![c(h, 0.0), x * h], vec![c(h, 0.0), -x * h]])
}

/// Circular modes `(a_A +- i a_B)/sqrt 2`.
pub fn circular_modes() -> ModeUnitary {
    phased_sum_difference_modes(c(0.0, 1.0))
}

/// The phase `x = sqrt(2/3) + i/sqrt(3)` that spreads `|20> + |02>` evenly
/// over three kets. Its square is `1/3 + 2 sqrt(2) i/3`.
pub fn spreading_phase() -> Complex64 {
    c((2.0f64 / 3.0).sqrt(), 1.0 / 3f64.sqrt())
}

/// Four-mode rotation mixing B with C and A with D by amplitudes
/// `x_pm = sqrt(1/2 +- sqrt(2)/4)`:
///
/// ```text
/// a'_A = x+ a_A - x- a_D      a'_B = x+ a_B - x- a_C
/// a'_C = x- a_B + x+ a_C      a'_D = x- a_A + x+ a_D
/// ```
pub fn cross_pair_rotation() -> ModeUnitary {
    let r = 2f64.sqrt() / 4.0;
    let p = (0.5 + r).sqrt();
    let m = (0.5 - r).sqrt();
    let z = c(0.0, 0.0);
    unitary(vec![
        vec![c(p, 0.0), z, z, c(-m, 0.0)],
        vec![z, c(p, 0.0), c(-m, 0.0), z],
        vec![z, c(m, 0.0), c(p, 0.0), z],
        vec![c(m, 0.0), z, z, c(p, 0.0)],
    ])
}
