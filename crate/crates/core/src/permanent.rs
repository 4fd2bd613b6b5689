//! Matrix permanents and the permanent formula for Fock-space matrix
//! elements of a mode unitary. These serve as an independent check on the
//! polynomial expansion in [`crate::transform`].

use alloc::vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::Occupation;
use crate::transform::ModeUnitary;

/// Largest matrix accepted by [`permanent`].
pub const MAX_PERMANENT_SIZE: usize = 16;

/// Permanent by Ryser's inclusion-exclusion formula, visiting column subsets
/// in Gray-code order so each step adds or removes a single column.
///
/// `perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij`
pub fn permanent(a: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::TooLarge {
            size: n,
            max: MAX_PERMANENT_SIZE,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut row_sums = vec![Complex64::default(); n];
    let mut total = Complex64::default();
    let mut gray: u32 = 0;
    for step in 1u32..(1 << n) {
        let next = step ^ (step >> 1);
        let flipped = (gray ^ next).trailing_zeros() as usize;
        let adding = next & (1 << flipped) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += a[(i, flipped)];
            } else {
                *s -= a[(i, flipped)];
            }
        }
        gray = next;
        let prod = row_sums
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s);
        if next.count_ones() % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

/// Amplitude of new-mode occupation `m` in the redefinition of old-mode
/// basis ket `n`:
///
/// `perm(V[m; n]) / sqrt(prod m_k! prod n_j!)` with `V = conj(U)`, where row
/// `k` of `V` is repeated `m_k` times and column `j` is repeated `n_j` times.
pub fn fock_matrix_element(u: &ModeUnitary, m: &Occupation, n: &Occupation) -> Result<Complex64> {
    let dim = u.dim();
    for occ in [m, n] {
        if occ.mode_count() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: occ.mode_count(),
            });
        }
    }
    if m.total() != n.total() {
        return Ok(Complex64::default());
    }
    let rows: alloc::vec::Vec<usize> = expand(m);
    let cols: alloc::vec::Vec<usize> = expand(n);
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        u.get(rows[r], cols[c]).conj()
    });
    let norm = (m.factorial_product() * n.factorial_product()).sqrt();
    Ok(permanent(&sub)? / norm)
}

fn expand(occ: &Occupation) -> alloc::vec::Vec<usize> {
    occ.counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| core::iter::repeat_n(i, c as usize))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{enumerate_sector, PureState};
    use crate::transform::{apply_redefinition, exp_map, HermitianParams};
    use core::f64::consts::FRAC_1_SQRT_2;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // sum over all permutations, for cross-checking Ryser
    fn brute_permanent(a: &DMatrix<Complex64>) -> Complex64 {
        fn rec(a: &DMatrix<Complex64>, row: usize, used: &mut [bool]) -> Complex64 {
            if row == a.nrows() {
                return c(1.0, 0.0);
            }
            let mut acc = c(0.0, 0.0);
            for j in 0..a.ncols() {
                if !used[j] {
                    used[j] = true;
                    acc += a[(row, j)] * rec(a, row + 1, used);
                    used[j] = false;
                }
            }
            acc
        }
        rec(a, 0, &mut vec![false; a.ncols()])
    }

    #[test]
    fn small_permanents() {
        let a = DMatrix::from_element(1, 1, c(0.3, -2.0));
        assert_eq!(permanent(&a).unwrap(), c(0.3, -2.0));
        let (p, q, r, s) = (c(1.0, 2.0), c(-0.5, 0.1), c(3.0, 0.0), c(0.0, -1.0));
        let a = DMatrix::from_row_slice(2, 2, &[p, q, r, s]);
        assert!((permanent(&a).unwrap() - (p * s + q * r)).norm() < 1e-14);
        let ones = DMatrix::from_element(3, 3, c(1.0, 0.0));
        assert!((permanent(&ones).unwrap() - c(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn permanent_errors() {
        assert!(matches!(
            permanent(&DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            permanent(&DMatrix::zeros(17, 17)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn all_ones_factorials() {
        let mut fact = 1.0;
        for n in 1..=8usize {
            fact *= n as f64;
            let ones = DMatrix::from_element(n, n, c(1.0, 0.0));
            assert!((permanent(&ones).unwrap().re - fact).abs() < 1e-9 * fact);
        }
    }

    #[test]
    fn fock_element_examples() {
        let id = ModeUnitary::identity(2);
        let m = Occupation::from([1, 1]);
        assert!((fock_matrix_element(&id, &m, &m).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let h = FRAC_1_SQRT_2;
        let u = ModeUnitary::from_rows(
            &[vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]],
            1e-12,
        )
        .unwrap();
        let e = fock_matrix_element(&u, &[1, 0].into(), &[0, 1].into()).unwrap();
        assert!((e - c(h, 0.0)).norm() < 1e-15);

        let via_expansion = apply_redefinition(&PureState::basis([2, 0]), &u).unwrap();
        let e = fock_matrix_element(&u, &[1, 1].into(), &[2, 0].into()).unwrap();
        assert!((e - via_expansion.amplitude(&[1, 1].into())).norm() < 1e-14);

        assert_eq!(
            fock_matrix_element(&u, &[1, 1].into(), &[1, 0].into()).unwrap(),
            c(0.0, 0.0)
        );
        assert!(fock_matrix_element(&u, &[1, 1, 0].into(), &[1, 0].into()).is_err());
    }

    proptest! {
        #[test]
        fn ryser_matches_brute_force(
            n in 1usize..=5,
            vals in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 25)
        ) {
            let a = DMatrix::from_fn(n, n, |i, j| {
                let (re, im) = vals[i * 5 + j];
                c(re, im)
            });
            prop_assert!((permanent(&a).unwrap() - brute_permanent(&a)).norm() < 1e-12);
        }

        #[test]
        fn expansion_matches_permanent_in_two_modes(theta in proptest::collection::vec(-3.0f64..3.0, 4)) {
            let u = exp_map(&HermitianParams::new(2, theta).unwrap());
            for total in 0..=3 {
                for n in enumerate_sector(2, total) {
                    let out = apply_redefinition(&PureState::basis(n.clone()), &u).unwrap();
                    for m in enumerate_sector(2, total) {
                        let e = fock_matrix_element(&u, &m, &n).unwrap();
                        prop_assert!((e - out.amplitude(&m)).norm() < 1e-12);
                    }
                }
            }
        }
    }
}
