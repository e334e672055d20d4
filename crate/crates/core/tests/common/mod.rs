//! Slow, independent reference implementations used as test oracles.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use hassett_core::combinatorics::Rational;
use hassett_core::{StableGraph, WeightVector};
use num_traits::{One, Zero};

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn parity(perm: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Stability straight from the definition, in exact rationals.
pub fn stable_by_definition(g: &StableGraph, w: &WeightVector) -> bool {
    (0..g.num_vertices()).all(|v| {
        let mut val = 0i64;
        for &[a, b] in g.edges() {
            val += (a == v) as i64 + (b == v) as i64;
        }
        let mass = g
            .markings()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == v)
            .fold(Rational::zero(), |acc, (i, _)| acc + &w.entries()[i]);
        Rational::from_integer((2 * g.weight(v) as i64 - 2 + val).into()) + mass > Rational::zero()
    })
}

/// Isomorphism invariant by minimizing over every vertex relabeling.
pub fn brute_key(g: &StableGraph) -> Vec<usize> {
    let nv = g.num_vertices();
    let mut best: Option<Vec<usize>> = None;
    for p in permutations(nv) {
        let mut weights = vec![0usize; nv];
        for v in 0..nv {
            weights[p[v]] = g.weight(v) as usize;
        }
        let mut edges: Vec<[usize; 2]> = g
            .edges()
            .iter()
            .map(|&[a, b]| {
                let (x, y) = (p[a], p[b]);
                [x.min(y), x.max(y)]
            })
            .collect();
        edges.sort();
        let mut key = vec![nv];
        key.extend(weights);
        key.extend(g.markings().iter().map(|&v| p[v]));
        key.extend(edges.iter().flatten());
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.expect("at least one vertex")
}

fn multisets(pairs: &[[usize; 2]], k: usize, start: usize, acc: &mut Vec<[usize; 2]>, out: &mut Vec<Vec<[usize; 2]>>) {
    if acc.len() == k {
        out.push(acc.clone());
        return;
    }
    for i in start..pairs.len() {
        acc.push(pairs[i]);
        multisets(pairs, k, i, acc, out);
        acc.pop();
    }
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn connected(nv: usize, edges: &[[usize; 2]]) -> bool {
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &[a, b] in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Generate every labeled stable graph with `k` edges and sort them into
/// isomorphism classes by brute force; one representative per class.
pub fn labeled_classes(genus: u32, w: &WeightVector, k: usize) -> BTreeMap<Vec<usize>, StableGraph> {
    let n = w.len();
    let mut classes = BTreeMap::new();
    for nv in 1..=k + 1 {
        let b1 = k + 1 - nv;
        if b1 > genus as usize {
            continue;
        }
        let rest = genus - b1 as u32;
        let pairs: Vec<[usize; 2]> = (0..nv).flat_map(|a| (a..nv).map(move |b| [a, b])).collect();
        let mut edge_sets = Vec::new();
        multisets(&pairs, k, 0, &mut Vec::new(), &mut edge_sets);
        let weightings = compositions(rest, nv);
        for edges in edge_sets.iter().filter(|e| connected(nv, e)) {
            for weights in &weightings {
                let mut marking = vec![0usize; n];
                loop {
                    let g = StableGraph::new(weights.clone(), edges.clone(), marking.clone()).expect("valid labeled graph");
                    assert_eq!(g.genus(), genus);
                    if stable_by_definition(&g, w) {
                        classes.entry(brute_key(&g)).or_insert(g);
                    }
                    // next marking function in base nv
                    let mut i = 0;
                    while i < n && marking[i] == nv - 1 {
                        marking[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                    marking[i] += 1;
                }
            }
        }
    }
    classes
}

/// Half-edge automorphisms found by trying every edge permutation and every
/// choice of end swaps: `(count, some automorphism permutes edges oddly)`.
pub fn brute_automorphisms(g: &StableGraph) -> (u64, bool) {
    let ne = g.num_edges();
    let nv = g.num_vertices();
    if ne == 0 {
        return (1, false);
    }
    let mut count = 0;
    let mut odd = false;
    for perm in permutations(ne) {
        'flips: for flips in 0u32..(1 << ne) {
            let mut vmap = vec![usize::MAX; nv];
            for e in 0..ne {
                let src = g.edge(e);
                let mut dst = g.edge(perm[e]);
                if flips >> e & 1 == 1 {
                    dst.swap(0, 1);
                }
                for s in 0..2 {
                    if vmap[src[s]] == usize::MAX {
                        vmap[src[s]] = dst[s];
                    } else if vmap[src[s]] != dst[s] {
                        continue 'flips;
                    }
                }
            }
            let image: HashSet<usize> = vmap.iter().copied().collect();
            if image.len() != nv || image.contains(&usize::MAX) {
                continue;
            }
            if (0..nv).any(|v| g.weight(vmap[v]) != g.weight(v)) || g.markings().iter().any(|&v| vmap[v] != v) {
                continue;
            }
            count += 1;
            odd |= parity(&perm);
        }
    }
    (count, odd)
}

/// Order of the group generated by half-edge permutations.
pub fn generated_order(generators: &[Vec<usize>], size: usize) -> usize {
    let identity: Vec<usize> = (0..size).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for gen in generators {
            let y: Vec<usize> = x.iter().map(|&h| gen[h]).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen.len()
}

/// Rank over the rationals by plain dense Gaussian elimination.
pub fn dense_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = &rows[r][c] / &pivot;
                for j in c..ncols {
                    let delta = &factor * &rows[rank][j];
                    rows[r][j] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Every set partition of `0..n` as a list of blocks.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// Admissible partitions counted by listing all set partitions.
pub fn brute_admissible(w: &WeightVector, r: usize) -> u64 {
    set_partitions(w.len())
        .into_iter()
        .filter(|p| p.len() == r)
        .filter(|p| {
            p.iter().all(|block| block.iter().fold(Rational::zero(), |acc, &i| acc + &w.entries()[i]) <= Rational::one())
        })
        .count() as u64
}
