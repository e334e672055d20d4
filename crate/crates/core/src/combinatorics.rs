//! Exact special-number sequences: Stirling numbers of the second kind,
//! their size-restricted variant, factorials and Bernoulli numbers.
//!
//! Every sequence is memoized in a process-wide cache guarded by a mutex and
//! grows on demand, so there is no fixed upper index.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn factorial(n: u64) -> BigUint {
    static CACHE: OnceLock<Mutex<Vec<BigUint>>> = OnceLock::new();
    let mut table = CACHE
        .get_or_init(|| Mutex::new(vec![BigUint::one()]))
        .lock()
        .expect("factorial cache poisoned");
    while table.len() as u64 <= n {
        let k = table.len() as u64;
        let next = &table[table.len() - 1] * k;
        table.push(next);
    }
    table[n as usize].clone()
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Rows `0..=m` of the Stirling triangle, `S(m, r) = r S(m-1, r) + S(m-1, r-1)`.
fn stirling_rows() -> &'static Mutex<Vec<Vec<BigUint>>> {
    static CACHE: OnceLock<Mutex<Vec<Vec<BigUint>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![vec![BigUint::one()]]))
}

/// `S(m, r)`: the number of partitions of an `m`-set into `r` nonempty blocks.
pub fn stirling2(m: u64, r: u64) -> BigUint {
    if r > m {
        return BigUint::zero();
    }
    let mut rows = stirling_rows().lock().expect("stirling cache poisoned");
    while rows.len() as u64 <= m {
        let prev = &rows[rows.len() - 1];
        let len = prev.len() + 1;
        let mut row = vec![BigUint::zero(); len];
        for (k, slot) in row.iter_mut().enumerate().skip(1) {
            let stay = prev.get(k).map(|s| s * k as u64).unwrap_or_default();
            *slot = stay + &prev[k - 1];
        }
        rows.push(row);
    }
    rows[m as usize][r as usize].clone()
}

pub fn bell(m: u64) -> BigUint {
    (0..=m).map(|r| stirling2(m, r)).sum()
}

/// Partitions of an `n`-set into `r` nonempty blocks, each of size at most
/// `max_block`.
///
/// Uses the recurrence obtained by removing the block that contains the last
/// element: `T(n, r) = sum_{j=0}^{max_block-1} C(n-1, j) T(n-1-j, r-1)`.
pub fn restricted_stirling2(n: u64, r: u64, max_block: u64) -> BigUint {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u64), BigUint>>> = OnceLock::new();
    if max_block == 0 {
        return if n == 0 && r == 0 { BigUint::one() } else { BigUint::zero() };
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    restricted_inner(n, r, max_block, cache)
}

fn restricted_inner(
    n: u64,
    r: u64,
    max_block: u64,
    cache: &Mutex<HashMap<(u64, u64, u64), BigUint>>,
) -> BigUint {
    if n == 0 {
        return if r == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if r == 0 || r > n || n > r * max_block {
        return BigUint::zero();
    }
    if let Some(v) = cache.lock().expect("restricted stirling cache poisoned").get(&(n, r, max_block)) {
        return v.clone();
    }
    let mut total = BigUint::zero();
    for j in 0..max_block.min(n) {
        let rest = restricted_inner(n - 1 - j, r - 1, max_block, cache);
        if !rest.is_zero() {
            total += binomial(n - 1, j) * rest;
        }
    }
    cache
        .lock()
        .expect("restricted stirling cache poisoned")
        .insert((n, r, max_block), total.clone());
    total
}

/// Closed form for partitions into blocks of size at most two: such a
/// partition with `r` blocks has exactly `n - r` pairs, giving
/// `prod_{i=0}^{n-r-1} C(n-2i, 2) / (n-r)!`.
pub fn pair_partition_count(n: u64, r: u64) -> BigUint {
    if r > n || 2 * r < n {
        return BigUint::zero();
    }
    let pairs = n - r;
    let mut prod = BigUint::one();
    for i in 0..pairs {
        prod *= binomial(n - 2 * i, 2);
    }
    let (q, rem) = prod.div_rem(&factorial(pairs));
    debug_assert!(rem.is_zero());
    q
}

/// The `g`-th Bernoulli number with the `t / (e^t - 1)` convention, so
/// `B_1 = -1/2` (not `+1/2`).
///
/// Evaluated through `B_g = sum_{l=0}^{g} (-1)^l l! / (l+1) S(g, l)`.
pub fn bernoulli(g: u64) -> Rational {
    static CACHE: OnceLock<Mutex<HashMap<u64, Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("bernoulli cache poisoned").get(&g) {
        return v.clone();
    }
    let mut acc = Rational::zero();
    for l in 0..=g {
        let s = stirling2(g, l);
        if s.is_zero() {
            continue;
        }
        let term = Rational::new(
            BigInt::from(factorial(l) * s),
            BigInt::from(l + 1),
        );
        if l % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    cache
        .lock()
        .expect("bernoulli cache poisoned")
        .insert(g, acc.clone());
    acc
}

/// Sign of a permutation given as images `perm[i]`.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Restricted growth strings: every set partition of `[m]` exactly once.
    fn all_partitions(m: usize) -> Vec<Vec<usize>> {
        fn go(i: usize, m: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
            if i == m {
                out.push(cur.clone());
                return;
            }
            for b in 0..=max {
                cur.push(b);
                go(i + 1, m, cur, max.max(b + 1), out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(0, m, &mut Vec::new(), 0, &mut out);
        out
    }

    fn block_sizes(p: &[usize]) -> Vec<usize> {
        let k = p.iter().map(|&b| b + 1).max().unwrap_or(0);
        let mut sizes = vec![0; k];
        for &b in p {
            sizes[b] += 1;
        }
        sizes
    }

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling2(0, 0), big(1));
        assert_eq!(stirling2(3, 0), big(0));
        assert_eq!(stirling2(2, 3), big(0));
        assert_eq!(stirling2(1, 1), big(1));
        assert_eq!(stirling2(2, 1), big(1));
        assert_eq!(stirling2(2, 2), big(1));
        assert_eq!(stirling2(4, 2), big(7));
    }

    #[test]
    fn stirling_matches_brute_force() {
        for m in 0..=8 {
            let parts = all_partitions(m);
            assert_eq!(bell(m as u64), big(parts.len() as u64));
            for r in 0..=m {
                let count = parts.iter().filter(|p| block_sizes(p).len() == r).count();
                assert_eq!(stirling2(m as u64, r as u64), big(count as u64), "S({m},{r})");
            }
        }
    }

    #[test]
    fn restricted_stirling_matches_brute_force() {
        assert_eq!(restricted_stirling2(3, 2, 2), big(3));
        assert_eq!(restricted_stirling2(4, 2, 2), big(3));
        for n in 0..=8u64 {
            let parts = all_partitions(n as usize);
            for r in 0..=n {
                for m in 1..=n.max(1) + 1 {
                    let count = parts
                        .iter()
                        .map(|p| block_sizes(p))
                        .filter(|s| s.len() as u64 == r && s.iter().all(|&x| x as u64 <= m))
                        .count();
                    let got = restricted_stirling2(n, r, m);
                    assert_eq!(got, big(count as u64), "S({n},{r})_<={m}");
                    let full = stirling2(n, r);
                    assert!(got <= full);
                    let equal_expected = m > n - r || full.is_zero();
                    assert_eq!(got == full, equal_expected, "n={n} r={r} m={m}");
                }
            }
        }
    }

    #[test]
    fn restricted_stirling_singleton_blocks() {
        for n in 0..7 {
            for r in 0..7 {
                let expect = if r == n { 1 } else { 0 };
                assert_eq!(restricted_stirling2(n, r, 1), big(expect));
            }
        }
    }

    #[test]
    fn pair_product_formula_matches_restricted() {
        for n in 0..=10 {
            for r in 0..=n {
                assert_eq!(pair_partition_count(n, r), restricted_stirling2(n, r, 2), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), rational(1, 1));
        assert_eq!(bernoulli(1), rational(-1, 2));
        assert_eq!(bernoulli(2), rational(1, 6));
        assert_eq!(bernoulli(3), rational(0, 1));
        assert_eq!(bernoulli(4), rational(-1, 30));
    }

    #[test]
    fn bernoulli_matches_recurrence() {
        // sum_{k=0}^{g} C(g+1, k) B_k = 0 for g >= 1
        let mut by_recurrence = vec![Rational::one()];
        for g in 1..=12u64 {
            let mut s = Rational::zero();
            for (k, b) in by_recurrence.iter().enumerate() {
                s += b * Rational::from_integer(BigInt::from(binomial(g + 1, k as u64)));
            }
            by_recurrence.push(-s / Rational::from_integer(BigInt::from(g + 1)));
        }
        for (g, b) in by_recurrence.iter().enumerate() {
            assert_eq!(&bernoulli(g as u64), b, "B_{g}");
        }
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(permutation_sign(&[]), 1);
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
        assert_eq!(permutation_sign(&[3, 2, 1, 0]), 1);
    }
}
