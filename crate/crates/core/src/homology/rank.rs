//! Exact rank over the rationals by fraction-free sparse elimination.
//!
//! Columns are scaled to primitive integer vectors and eliminated against
//! each other with `a * v - b * pivot`, dividing each result by the gcd of
//! its entries. The pivot vector is the shortest remaining one and, within
//! it, the pivot position is the one shared by the fewest other vectors
//! (a cheap Markowitz criterion). Arithmetic runs in `i64` with overflow
//! checks and restarts in big integers if any product overflows.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::complex::SparseMatrix;

trait Scalar: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    /// `a * x - b * y`, or `None` on overflow.
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl Scalar for i64 {
    fn zero() -> i64 {
        0
    }

    fn is_zero(&self) -> bool {
        *self == 0
    }

    fn combine(a: &i64, x: &i64, b: &i64, y: &i64) -> Option<i64> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }

    fn gcd(&self, other: &i64) -> i64 {
        Integer::gcd(self, other)
    }

    fn div_exact(&self, d: &i64) -> i64 {
        self / d
    }

    fn is_unit(&self) -> bool {
        self.abs() == 1
    }
}

impl Scalar for BigInt {
    fn zero() -> BigInt {
        <BigInt as Zero>::zero()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn combine(a: &BigInt, x: &BigInt, b: &BigInt, y: &BigInt) -> Option<BigInt> {
        Some(a * x - b * y)
    }

    fn gcd(&self, other: &BigInt) -> BigInt {
        Integer::gcd(self, other)
    }

    fn div_exact(&self, d: &BigInt) -> BigInt {
        self / d
    }

    fn is_unit(&self) -> bool {
        self.abs() == BigInt::from(1)
    }
}

type SparseVec<S> = Vec<(usize, S)>;

/// Primitive integer columns of `m`: each column times the lcm of its
/// denominators, divided by the gcd of the resulting numerators.
fn integer_columns(m: &SparseMatrix) -> Vec<SparseVec<BigInt>> {
    (0..m.cols())
        .map(|c| {
            let col = m.column(c);
            let lcm = col.iter().fold(BigInt::from(1), |acc, (_, v)| acc.lcm(v.denom()));
            let mut ints: SparseVec<BigInt> = col.iter().map(|(r, v)| (*r, v.numer() * (&lcm / v.denom()))).collect();
            normalize(&mut ints);
            ints
        })
        .collect()
}

fn normalize<S: Scalar>(v: &mut SparseVec<S>) {
    let Some(first) = v.first() else { return };
    let mut g = first.1.clone();
    for (_, x) in v.iter().skip(1) {
        if g.is_unit() {
            return;
        }
        g = g.gcd(x);
    }
    if !g.is_unit() && !g.is_zero() {
        for (_, x) in v.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
}

/// `a * v - b * p` for sparse vectors sorted by index, with `a = p[pivot]`
/// and `b = v[pivot]`, so the pivot position cancels.
fn eliminate_one<S: Scalar>(v: &SparseVec<S>, p: &SparseVec<S>, a: &S, b: &S) -> Option<SparseVec<S>> {
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (0, 0);
    let zero = S::zero();
    while i < v.len() || j < p.len() {
        let vi = v.get(i).map(|e| e.0);
        let pj = p.get(j).map(|e| e.0);
        let (idx, val) = match (vi, pj) {
            (Some(x), Some(y)) if x == y => {
                let r = S::combine(a, &v[i].1, b, &p[j].1)?;
                i += 1;
                j += 1;
                (x, r)
            }
            (Some(x), Some(y)) if x < y => {
                let r = S::combine(a, &v[i].1, b, &zero)?;
                i += 1;
                (x, r)
            }
            (Some(x), None) => {
                let r = S::combine(a, &v[i].1, b, &zero)?;
                i += 1;
                (x, r)
            }
            (_, Some(y)) => {
                let r = S::combine(&zero, &zero, b, &p[j].1)?;
                j += 1;
                (y, r)
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((idx, val));
        }
    }
    normalize(&mut out);
    Some(out)
}

fn eliminate<S: Scalar>(mut vecs: Vec<SparseVec<S>>, nrows: usize) -> Option<usize> {
    let mut alive = vec![true; vecs.len()];
    let mut count = vec![0usize; nrows];
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); nrows];
    let mut heap = BinaryHeap::new();
    for (id, v) in vecs.iter().enumerate() {
        for (r, _) in v {
            count[*r] += 1;
            holders[*r].push(id);
        }
        heap.push(Reverse((v.len(), id)));
    }
    let mut rank = 0;
    while let Some(Reverse((len, id))) = heap.pop() {
        if !alive[id] || vecs[id].len() != len {
            continue;
        }
        alive[id] = false;
        if len == 0 {
            continue;
        }
        let pivot_vec = std::mem::take(&mut vecs[id]);
        for (r, _) in &pivot_vec {
            count[*r] -= 1;
        }
        let (pk, _) = pivot_vec
            .iter()
            .enumerate()
            .min_by_key(|(_, (r, _))| (count[*r], *r))
            .expect("nonempty pivot vector");
        let (prow, pval) = pivot_vec[pk].clone();
        rank += 1;
        let mut others = std::mem::take(&mut holders[prow]);
        others.sort_unstable();
        others.dedup();
        for other in others {
            if !alive[other] {
                continue;
            }
            let Ok(pos) = vecs[other].binary_search_by_key(&prow, |e| e.0) else { continue };
            let b = vecs[other][pos].1.clone();
            let updated = eliminate_one(&vecs[other], &pivot_vec, &pval, &b)?;
            for (r, _) in &vecs[other] {
                count[*r] -= 1;
            }
            for (r, _) in &updated {
                count[*r] += 1;
                holders[*r].push(other);
            }
            heap.push(Reverse((updated.len(), other)));
            vecs[other] = updated;
        }
    }
    Some(rank)
}

/// Rank of `m` over the rationals.
pub fn rank_exact(m: &SparseMatrix) -> usize {
    let big = integer_columns(m);
    let small: Option<Vec<SparseVec<i64>>> = big
        .iter()
        .map(|col| col.iter().map(|(r, v)| v.to_i64().map(|x| (*r, x))).collect())
        .collect();
    if let Some(small) = small {
        if let Some(r) = eliminate(small, m.rows()) {
            return r;
        }
    }
    eliminate(big, m.rows()).expect("big integer elimination cannot overflow")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{rational, Rational};

    #[test]
    fn zero_and_identity() {
        assert_eq!(rank_exact(&SparseMatrix::zeros(4, 5)), 0);
        assert_eq!(rank_exact(&SparseMatrix::zeros(0, 0)), 0);
        for k in 0..8 {
            let id = SparseMatrix::from_triplets(k, k, (0..k).map(|i| (i, i, rational(1, 1))));
            assert_eq!(rank_exact(&id), k);
        }
    }

    #[test]
    fn dependent_rational_columns() {
        let m = SparseMatrix::from_triplets(
            3,
            3,
            vec![
                (0, 0, rational(1, 2)),
                (1, 0, rational(1, 3)),
                (0, 1, rational(3, 1)),
                (1, 1, rational(2, 1)),
                (2, 2, rational(-7, 5)),
            ],
        );
        assert_eq!(rank_exact(&m), 2);
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let huge = Rational::from_integer(BigInt::from(i64::MAX / 3));
        let m = SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, huge.clone()), (1, 0, rational(1, 1)), (0, 1, rational(1, 1)), (1, 1, huge)],
        );
        assert_eq!(rank_exact(&m), 2);
    }
}
