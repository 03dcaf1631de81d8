//! Dense exact elimination.
//!
//! Pivots are chosen as the first nonzero entry in column order, so the
//! reduced echelon form (and therefore every reported basis) is unique.

use crate::error::{Error, Result};
use crate::par;
use crate::scalar::Field;

/// Reduced row-echelon basis of a row span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon<E> {
    pub ncols: usize,
    pub rows: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
}

impl<E> Echelon<E> {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

fn check_ragged<E>(rows: &[Vec<E>], ncols: usize) -> Result<()> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::RaggedRows { row: i, expected: ncols, found: r.len() });
        }
    }
    Ok(())
}

/// Reduced row-echelon form of the span of `rows`.
pub fn rref<F: Field>(field: &F, rows: Vec<Vec<F::Elem>>, ncols: usize) -> Result<Echelon<F::Elem>> {
    check_ragged(&rows, ncols)?;
    let mut rows = rows;
    let pivots = field.echelon(&mut rows, ncols, true);
    Ok(Echelon { ncols, rows, pivots })
}

pub fn rank<F: Field>(field: &F, rows: Vec<Vec<F::Elem>>, ncols: usize) -> Result<usize> {
    check_ragged(&rows, ncols)?;
    let mut rows = rows;
    Ok(field.echelon(&mut rows, ncols, false).len())
}

/// Right kernel of the matrix with the given rows, returned directly in
/// reduced row-echelon form.
///
/// Eliminating with the columns reversed makes every kernel vector read off
/// the free columns already have its leading 1 at its own free column and
/// zeros at all other free columns.
pub fn kernel<F: Field>(field: &F, rows: Vec<Vec<F::Elem>>, ncols: usize) -> Result<Echelon<F::Elem>> {
    check_ragged(&rows, ncols)?;
    let mut rev: Vec<Vec<F::Elem>> = rows
        .into_iter()
        .map(|mut r| {
            r.reverse();
            r
        })
        .collect();
    let pivots = field.echelon(&mut rev, ncols, true);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out_rows = Vec::new();
    let mut out_pivots = Vec::new();
    // Descending reversed index = ascending original index.
    for free in (0..ncols).rev().filter(|&c| !is_pivot[c]) {
        let mut w = vec![field.zero(); ncols];
        w[free] = field.one();
        for (k, &pc) in pivots.iter().enumerate() {
            let e = &rev[k][free];
            if !field.is_zero(e) {
                w[pc] = field.neg(e);
            }
        }
        w.reverse();
        out_pivots.push(ncols - 1 - free);
        out_rows.push(w);
    }
    Ok(Echelon { ncols, rows: out_rows, pivots: out_pivots })
}

/// Is `v` in the span of the RREF basis?
pub fn in_span<F: Field>(field: &F, basis: &Echelon<F::Elem>, v: &[F::Elem]) -> bool {
    let mut w = v.to_vec();
    field.reduce_against(&basis.rows, &basis.pivots, &mut w);
    w.iter().all(|x| field.is_zero(x))
}

pub(crate) fn generic_echelon<F: Field>(
    field: &F,
    rows: &mut Vec<Vec<F::Elem>>,
    ncols: usize,
    reduced: bool,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let Some(i) = (rank..rows.len()).find(|&i| !field.is_zero(&rows[i][col])) else {
            continue;
        };
        rows.swap(rank, i);
        let inv = field.inv(&rows[rank][col]).expect("pivot is nonzero");
        for x in rows[rank][col..].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let (top, bottom) = rows.split_at_mut(rank + 1);
        let (above, piv) = top.split_at_mut(rank);
        let piv = &piv[0];
        let update = |row: &mut Vec<F::Elem>| {
            let f = row[col].clone();
            if field.is_zero(&f) {
                return;
            }
            for j in col..ncols {
                if !field.is_zero(&piv[j]) {
                    row[j] = field.sub(&row[j], &field.mul(&f, &piv[j]));
                }
            }
        };
        bottom.iter_mut().for_each(&update);
        if reduced {
            above.iter_mut().for_each(&update);
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

pub(crate) fn generic_reduce<F: Field>(
    field: &F,
    basis: &[Vec<F::Elem>],
    pivots: &[usize],
    v: &mut [F::Elem],
) {
    for (row, &pc) in basis.iter().zip(pivots) {
        let f = v[pc].clone();
        if field.is_zero(&f) {
            continue;
        }
        for (x, b) in v.iter_mut().zip(row) {
            if !field.is_zero(b) {
                *x = field.sub(x, &field.mul(&f, b));
            }
        }
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut base = a % p;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// `row[j] += c * piv[j]` for `j >= from`, keeping entries below `2p^2`.
#[inline]
fn axpy_lazy(row: &mut [u64], piv: &[u64], c: u64, from: usize, two_p2: u64) {
    for (x, &b) in row[from..].iter_mut().zip(&piv[from..]) {
        let s = *x + c * b;
        *x = if s >= two_p2 { s - two_p2 } else { s };
    }
}

/// Elimination over GF(p), p < 2^31. Non-pivot entries are kept unreduced in
/// `[0, 2p^2)` and only reduced when read as multipliers, which removes the
/// division from the inner loop.
pub(crate) fn prime_echelon(p: u64, rows: &mut Vec<Vec<u64>>, ncols: usize, reduced: bool) -> Vec<usize> {
    let two_p2 = 2 * p * p;
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let mut found = None;
        for i in rank..rows.len() {
            let v = rows[i][col] % p;
            rows[i][col] = v;
            if v != 0 {
                found = Some(i);
                break;
            }
        }
        let Some(i) = found else { continue };
        rows.swap(rank, i);
        let inv = inv_mod(rows[rank][col], p);
        for x in rows[rank][col..].iter_mut() {
            *x = (*x % p) * inv % p;
        }
        let (top, bottom) = rows.split_at_mut(rank + 1);
        let piv = &top[rank];
        let work = bottom.len() * (ncols - col);
        par::for_each_row(bottom, work, |row| {
            let f = row[col] % p;
            if f != 0 {
                axpy_lazy(row, piv, p - f, col + 1, two_p2);
            }
            row[col] = 0;
        });
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    if reduced {
        for k in (0..rank).rev() {
            let pc = pivots[k];
            for x in rows[k][pc..].iter_mut() {
                *x %= p;
            }
            let (top, rest) = rows.split_at_mut(k);
            let piv = &rest[0];
            let work = top.len() * (ncols - pc);
            par::for_each_row(top, work, |row| {
                let f = row[pc] % p;
                if f != 0 {
                    axpy_lazy(row, piv, p - f, pc + 1, two_p2);
                }
                row[pc] = 0;
            });
        }
    }
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            *x %= p;
        }
    }
    pivots
}

pub(crate) fn prime_reduce(p: u64, basis: &[Vec<u64>], pivots: &[usize], v: &mut [u64]) {
    // Basis is reduced, so every multiplier is read off the original vector.
    let two_p2 = 2 * p * p;
    let coeffs: Vec<u64> = pivots.iter().map(|&pc| v[pc] % p).collect();
    for (row, c) in basis.iter().zip(coeffs) {
        if c != 0 {
            axpy_lazy(v, row, p - c, 0, two_p2);
        }
    }
    for x in v.iter_mut() {
        *x %= p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rationals, SeedStream};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn to_q(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect()
    }

    fn to_p(f: &PrimeField, rows: &[Vec<i64>]) -> Vec<Vec<u64>> {
        rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect()
    }

    #[test]
    fn proportional_rows_have_rank_one() {
        let f = PrimeField::default();
        let rows = to_p(&f, &[vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(rank(&f, rows.clone(), 3).unwrap(), 1);
        let e = rref(&f, rows, 3).unwrap();
        assert_eq!(e.pivots, vec![0]);
        assert_eq!(e.rows, vec![vec![1, 2, 3]]);
    }

    #[test]
    fn identity_is_fixed() {
        let f = PrimeField::default();
        let id: Vec<Vec<u64>> = (0..4).map(|i| (0..4).map(|j| u64::from(i == j)).collect()).collect();
        let e = rref(&f, id.clone(), 4).unwrap();
        assert_eq!(e.rows, id);
        assert_eq!(e.pivots, vec![0, 1, 2, 3]);
    }

    #[test]
    fn ragged_input_is_rejected() {
        let f = PrimeField::default();
        assert_eq!(
            rref(&f, vec![vec![1, 2], vec![1]], 2),
            Err(Error::RaggedRows { row: 1, expected: 2, found: 1 })
        );
    }

    #[test]
    fn kernel_of_zero_and_full_rank() {
        let f = PrimeField::default();
        assert_eq!(kernel(&f, vec![vec![0; 5]; 3], 5).unwrap().rank(), 5);
        let id: Vec<Vec<u64>> = (0..3).map(|i| (0..3).map(|j| u64::from(i == j)).collect()).collect();
        assert_eq!(kernel(&f, id, 3).unwrap().rank(), 0);
    }

    #[test]
    fn kernel_is_rref_and_annihilates() {
        let q = Rationals;
        let rows = to_q(&[vec![1, 2, 0, 1, 3], vec![0, 1, 1, 1, 0], vec![1, 3, 1, 2, 3]]);
        let k = kernel(&q, rows.clone(), 5).unwrap();
        assert_eq!(k.rank(), 3);
        // Kernel basis is its own reduced echelon form.
        assert_eq!(rref(&q, k.rows.clone(), 5).unwrap(), k);
        for v in &k.rows {
            for r in &rows {
                let dot: BigRational = r.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(num_traits::Zero::is_zero(&dot));
            }
        }
    }

    #[test]
    fn random_matrix_rank_agrees_across_backends() {
        let f = PrimeField::default();
        let mut s = SeedStream::new(5);
        let mut ints = Vec::new();
        for i in 0..20 {
            let row: Vec<i64> = if i % 4 == 3 {
                // dependent row: sum of the previous two
                let a: &Vec<i64> = &ints[i - 1];
                let b: &Vec<i64> = &ints[i - 2];
                a.iter().zip(b).map(|(x, y)| x + y).collect()
            } else {
                (0..30).map(|_| s.below(21) as i64 - 10).collect()
            };
            ints.push(row);
        }
        let rp = rank(&f, to_p(&f, &ints), 30).unwrap();
        let rq = rank(&Rationals, to_q(&ints), 30).unwrap();
        assert_eq!(rp, rq);
        assert_eq!(rp, 15);
    }

    proptest! {
        #[test]
        fn rref_is_idempotent_and_rank_nullity_holds(
            data in proptest::collection::vec(-3i64..4, 6 * 7),
            nrows in 1usize..7,
        ) {
            let ncols = 7;
            let ints: Vec<Vec<i64>> = data.chunks(ncols).take(nrows).map(|c| c.to_vec()).collect();
            let f = PrimeField::default();
            let e = rref(&f, to_p(&f, &ints), ncols).unwrap();
            prop_assert_eq!(&rref(&f, e.rows.clone(), ncols).unwrap(), &e);
            let k = kernel(&f, to_p(&f, &ints), ncols).unwrap();
            prop_assert_eq!(e.rank() + k.rank(), ncols);
            let eq = rref(&Rationals, to_q(&ints), ncols).unwrap();
            prop_assert_eq!(eq.rank(), e.rank());
            prop_assert_eq!(&eq.pivots, &e.pivots);
            for v in &k.rows {
                for r in &e.rows {
                    let dot = r.iter().zip(v).fold(0u64, |acc, (a, b)| f.add(&acc, &f.mul(a, b)));
                    prop_assert_eq!(dot, 0);
                }
            }
        }
    }
}
