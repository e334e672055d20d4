//! Rational cellular chain complex of the moduli space and of subcomplexes
//! cut out by contraction-closed graph properties.
//!
//! The complex is augmented: the single-vertex graph with no edges spans
//! degree `-1`. A cell whose automorphisms permute its edges oddly equals its
//! own negative in rational chains and is left out of the basis. For a
//! non-degenerate `p`-cell with canonical edges `e_0 < ... < e_p`,
//!
//! ```text
//! d[G] = sum_i (-1)^i sgn(pi_i) [G / e_i]
//! ```
//!
//! where `pi_i` carries the edge order inherited by `G / e_i` onto the
//! canonical order of its representative; faces landing on degenerate cells
//! are dropped.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{permutation_sign, Rational};
use crate::enumeration::{enumerate_all, EnumerationOptions, Strata};
use crate::error::{Error, Result};
use crate::graphs::{canonical_representative, encode_canonical, StableGraph, WeightVector};

/// Which cells a (sub)complex keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubcomplexFilter {
    All,
    /// Graphs with a loop or a vertex of positive weight.
    LoopWeight,
    /// Graphs with a loop, a vertex of positive weight or a multiple edge.
    MultiLoopWeight,
    /// Faces of graphs that have a 1-end (the subcomplex generated by cells
    /// having the bridge graph as a vertex).
    BridgeQ,
    /// Faces of graphs all of whose edges are 1-ends.
    BridgeQ0,
}

impl SubcomplexFilter {
    pub const ALL: [SubcomplexFilter; 5] = [
        SubcomplexFilter::All,
        SubcomplexFilter::LoopWeight,
        SubcomplexFilter::MultiLoopWeight,
        SubcomplexFilter::BridgeQ,
        SubcomplexFilter::BridgeQ0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SubcomplexFilter::All => "all",
            SubcomplexFilter::LoopWeight => "lw",
            SubcomplexFilter::MultiLoopWeight => "mlw",
            SubcomplexFilter::BridgeQ => "q",
            SubcomplexFilter::BridgeQ0 => "q0",
        }
    }

    /// Cell-wise predicate, for filters defined by one.
    pub fn predicate(self, g: &StableGraph) -> Option<bool> {
        match self {
            SubcomplexFilter::All => Some(true),
            SubcomplexFilter::LoopWeight => Some(g.has_loop() || g.has_positive_weight()),
            SubcomplexFilter::MultiLoopWeight => Some(g.has_loop() || g.has_positive_weight() || g.has_multi_edge()),
            SubcomplexFilter::BridgeQ | SubcomplexFilter::BridgeQ0 => None,
        }
    }
}

impl fmt::Display for SubcomplexFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SubcomplexFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SubcomplexFilter::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse { what: "filter".into(), detail: format!("unknown filter {s:?}") })
    }
}

/// Sparse matrix with exact rational entries, stored by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, Rational)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    /// Build from `(row, col, value)` triplets; repeated positions add up.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, Rational)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            *acc[c].entry(r).or_insert_with(Rational::zero) += v;
        }
        let columns = acc
            .into_iter()
            .map(|col| col.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, c: usize) -> &[(usize, Rational)] {
        &self.columns[c]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.columns[c]
            .binary_search_by_key(&r, |(i, _)| *i)
            .map_or_else(|_| Rational::zero(), |k| self.columns[c][k].1.clone())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.columns.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows, "dimension mismatch");
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (k, v) in col {
                    for (r, u) in &self.columns[*k] {
                        *acc.entry(*r).or_insert_with(Rational::zero) += u * v;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseMatrix { rows: self.rows, columns }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// Text export: a `rows cols nnz` header, then one `row col num/den` line
    /// per nonzero entry, column-major.
    pub fn to_triplet_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols(), self.nnz());
        for (r, c, v) in self.triplets() {
            out.push_str(&format!("{} {} {}/{}\n", r, c, v.numer(), v.denom()));
        }
        out
    }

    pub fn from_triplet_text(text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse { what: "triplet matrix".into(), detail };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing header".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols, nnz] = header[..] else {
            return Err(bad("header must be `rows cols nnz`".into()));
        };
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [r, c, v] = parts[..] else {
                return Err(bad(format!("bad entry line {line:?}")));
            };
            let r: usize = r.parse().map_err(|_| bad(format!("bad row {r:?}")))?;
            let c: usize = c.parse().map_err(|_| bad(format!("bad column {c:?}")))?;
            let v: Rational = v.parse().map_err(|_| bad(format!("bad value {v:?}")))?;
            if r >= rows || c >= cols {
                return Err(bad(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            triplets.push((r, c, v));
        }
        if triplets.len() != nnz {
            return Err(bad(format!("header announces {nnz} entries, found {}", triplets.len())));
        }
        Ok(SparseMatrix::from_triplets(rows, cols, triplets))
    }
}

/// Augmented rational chain complex. Internally indexed by edge count `k`,
/// which is degree `k - 1`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub genus: u32,
    pub weights: WeightVector,
    pub filter: SubcomplexFilter,
    /// `bases[k]`: positions, within stratum `k`, of the kept non-degenerate
    /// cells.
    bases: Vec<Vec<usize>>,
    /// `boundaries[k]`: matrix of `C_{k-1} -> C_{k-2}`; entry 0 is empty.
    boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// Highest degree with a cell slot (`-1` for an empty space).
    pub fn top_degree(&self) -> isize {
        self.bases.len() as isize - 2
    }

    /// `rank C_p` for `p >= -1`.
    pub fn rank(&self, p: isize) -> usize {
        self.bases.get((p + 1) as usize).map_or(0, Vec::len)
    }

    /// Strata positions of the basis of `C_p`.
    pub fn basis(&self, p: isize) -> &[usize] {
        self.bases.get((p + 1) as usize).map_or(&[], |v| v.as_slice())
    }

    /// Matrix of `d_p : C_p -> C_{p-1}` for `p >= 0`.
    pub fn boundary(&self, p: isize) -> Option<&SparseMatrix> {
        if p < 0 {
            return None;
        }
        self.boundaries.get((p + 1) as usize)
    }

    pub fn boundaries(&self) -> impl Iterator<Item = (isize, &SparseMatrix)> {
        self.boundaries.iter().enumerate().skip(1).map(|(k, m)| (k as isize - 1, m))
    }

    /// Every composite `d_{p-1} d_p` vanishes exactly.
    pub fn check_boundary_squared(&self) -> std::result::Result<(), String> {
        for k in 2..self.boundaries.len() {
            let prod = self.boundaries[k - 1].mul(&self.boundaries[k]);
            if !prod.is_zero() {
                return Err(format!(
                    "d_{} d_{} has {} nonzero entries",
                    k as isize - 2,
                    k as isize - 1,
                    prod.nnz()
                ));
            }
        }
        Ok(())
    }

    /// Negate one nonzero entry of the highest nonzero boundary that has a
    /// neighbor to compose with; used to check that the `d^2 = 0` test can
    /// fail.
    pub fn with_flipped_entry(mut self) -> Self {
        let ks: Vec<usize> = (1..self.boundaries.len()).rev().collect();
        for k in ks {
            let composable = (k >= 2 && !self.boundaries[k - 1].is_zero())
                || (k + 1 < self.boundaries.len() && !self.boundaries[k + 1].is_zero());
            if let Some(col) = self.boundaries[k].columns.iter_mut().find(|c| !c.is_empty()) {
                if composable {
                    col[0].1 = -col[0].1.clone();
                    return self;
                }
            }
        }
        self
    }

    /// Rebuild with the basis of every degree reordered by `perm(k, len)`,
    /// returning a permutation of `0..len` for edge count `k`.
    pub fn permuted(&self, mut perm: impl FnMut(usize, usize) -> Vec<usize>) -> ChainComplex {
        let perms: Vec<Vec<usize>> = self.bases.iter().enumerate().map(|(k, b)| perm(k, b.len())).collect();
        let bases = self
            .bases
            .iter()
            .zip(&perms)
            .map(|(b, p)| {
                let mut nb = vec![0; b.len()];
                for (i, &x) in b.iter().enumerate() {
                    nb[p[i]] = x;
                }
                nb
            })
            .collect();
        let boundaries = self
            .boundaries
            .iter()
            .enumerate()
            .map(|(k, m)| {
                if k == 0 {
                    return m.clone();
                }
                let triplets = m.triplets().map(|(r, c, v)| (perms[k - 1][r], perms[k][c], v.clone()));
                SparseMatrix::from_triplets(m.rows(), m.cols(), triplets.collect::<Vec<_>>())
            })
            .collect();
        ChainComplex { genus: self.genus, weights: self.weights.clone(), filter: self.filter, bases, boundaries }
    }
}

/// Cells kept by `filter`, per stratum (degenerate cells included).
pub fn kept_cells(strata: &Strata, filter: SubcomplexFilter) -> Result<Vec<Vec<bool>>> {
    let levels = strata.levels();
    let mut kept: Vec<Vec<bool>> = match filter {
        SubcomplexFilter::All | SubcomplexFilter::LoopWeight | SubcomplexFilter::MultiLoopWeight => levels
            .iter()
            .map(|lvl| lvl.iter().map(|c| filter.predicate(&c.graph).expect("predicate filter")).collect())
            .collect(),
        SubcomplexFilter::BridgeQ | SubcomplexFilter::BridgeQ0 => {
            let mut kept: Vec<Vec<bool>> = levels
                .iter()
                .map(|lvl| {
                    lvl.iter()
                        .map(|c| {
                            let ends = c.graph.one_ends().len();
                            match filter {
                                SubcomplexFilter::BridgeQ => ends > 0,
                                _ => ends > 0 && ends == c.graph.num_edges(),
                            }
                        })
                        .collect()
                })
                .collect();
            for k in (1..levels.len()).rev() {
                for (i, cell) in levels[k].iter().enumerate() {
                    if !kept[k][i] {
                        continue;
                    }
                    for e in 0..k {
                        let c = cell.graph.contract_edge(e)?;
                        let j = strata.locate(&c).expect("contraction is enumerated");
                        kept[k - 1][j] = true;
                    }
                }
            }
            kept
        }
    };
    // augmentation
    if let Some(first) = kept.first_mut() {
        first.iter_mut().for_each(|k| *k = true);
    }
    check_closed(strata, filter, &kept)?;
    Ok(kept)
}

fn check_closed(strata: &Strata, filter: SubcomplexFilter, kept: &[Vec<bool>]) -> Result<()> {
    let levels = strata.levels();
    for k in 1..levels.len() {
        for (i, cell) in levels[k].iter().enumerate() {
            if !kept[k][i] {
                continue;
            }
            for e in 0..k {
                let c = cell.graph.contract_edge(e)?;
                let ok = strata.locate(&c).is_some_and(|j| kept[k - 1][j]);
                if !ok {
                    return Err(Error::FilterNotClosed {
                        filter: filter.name().into(),
                        detail: format!("contracting edge {e} of {:?} leaves the subcomplex", cell.graph),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Ranks of the chain groups, `ranks[k]` for edge count `k` (degree `k - 1`),
/// without assembling boundary matrices.
pub fn chain_ranks(strata: &Strata, filter: SubcomplexFilter) -> Result<Vec<usize>> {
    let kept = kept_cells(strata, filter)?;
    Ok(strata
        .levels()
        .iter()
        .zip(&kept)
        .map(|(lvl, keep)| lvl.iter().zip(keep).filter(|(c, &k)| k && !c.degenerate).count())
        .collect())
}

impl ChainComplex {
    pub fn build(strata: &Strata, filter: SubcomplexFilter) -> Result<ChainComplex> {
        let kept = kept_cells(strata, filter)?;
        let levels = strata.levels();
        let bases: Vec<Vec<usize>> = levels
            .iter()
            .zip(&kept)
            .map(|(lvl, keep)| (0..lvl.len()).filter(|&i| keep[i] && !lvl[i].degenerate).collect())
            .collect();
        let mut boundaries = vec![SparseMatrix::zeros(0, bases[0].len())];
        for k in 1..levels.len() {
            let mut row_of = vec![usize::MAX; levels[k - 1].len()];
            for (r, &i) in bases[k - 1].iter().enumerate() {
                row_of[i] = r;
            }
            let columns: Vec<Vec<(usize, usize, Rational)>> = bases[k]
                .par_iter()
                .enumerate()
                .map(|(col, &i)| face_terms(strata, &levels[k][i].graph, &row_of).into_iter().map(|(r, v)| (r, col, v)).collect())
                .collect();
            boundaries.push(SparseMatrix::from_triplets(bases[k - 1].len(), bases[k].len(), columns.into_iter().flatten().collect::<Vec<_>>()));
        }
        Ok(ChainComplex { genus: strata.genus, weights: strata.weights.clone(), filter, bases, boundaries })
    }
}

fn face_terms(strata: &Strata, g: &StableGraph, row_of: &[usize]) -> Vec<(usize, Rational)> {
    let k = g.num_edges();
    let mut terms: BTreeMap<usize, i64> = BTreeMap::new();
    for i in 0..k {
        let face = g.contract_edge(i).expect("edge in range");
        let rep = canonical_representative(&face);
        if rep.degenerate {
            continue;
        }
        let j = strata
            .locate_encoding(k - 1, &encode_canonical(&rep.graph))
            .expect("face is enumerated");
        let row = row_of[j];
        debug_assert!(row != usize::MAX, "face of a kept cell must be kept");
        let sign = if i % 2 == 0 { 1 } else { -1 } * permutation_sign(&rep.edge_position) as i64;
        *terms.entry(row).or_default() += sign;
    }
    terms
        .into_iter()
        .filter(|(_, v)| *v != 0)
        .map(|(r, v)| (r, Rational::from_integer(BigInt::from(v))))
        .collect()
}

/// Enumerate `(g, w)` and build the chain complex of the chosen subcomplex.
pub fn build_chain_complex(genus: u32, weights: &WeightVector, filter: SubcomplexFilter, opts: &EnumerationOptions) -> Result<ChainComplex> {
    let strata = enumerate_all(genus, weights, opts)?;
    ChainComplex::build(&strata, filter)
}

/// Unreduced Euler characteristic `1 + sum_{p >= -1} (-1)^p rank C_p`: the
/// alternating sum over the augmented complex is the reduced characteristic,
/// and the unreduced one is one more.
pub fn euler_from_cells(cc: &ChainComplex) -> i64 {
    1 + (-1..=cc.top_degree()).map(|p| sign(p) * cc.rank(p) as i64).sum::<i64>()
}

/// Same quantity from chain ranks indexed by edge count.
pub fn euler_from_ranks(ranks: &[usize]) -> i64 {
    1 + ranks.iter().enumerate().map(|(k, &r)| sign(k as isize - 1) * r as i64).sum::<i64>()
}

fn sign(p: isize) -> i64 {
    if p.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::rational;

    fn opts() -> EnumerationOptions {
        EnumerationOptions::default()
    }

    #[test]
    fn tetrahedron_complex() {
        let w = WeightVector::new(vec![rational(1, 4); 3]).unwrap();
        let cc = build_chain_complex(1, &w, SubcomplexFilter::All, &opts()).unwrap();
        assert_eq!((-1..=2).map(|p| cc.rank(p)).collect::<Vec<_>>(), vec![1, 1, 0, 1]);
        assert_eq!(euler_from_cells(&cc), 2);
        assert!(cc.check_boundary_squared().is_ok());
    }

    #[test]
    fn heavy_light_euler_values() {
        let w = WeightVector::heavy_light(2, 1).unwrap();
        let cc = build_chain_complex(1, &w, SubcomplexFilter::All, &opts()).unwrap();
        assert_eq!(euler_from_cells(&cc), 2);
        let w = WeightVector::heavy_light(3, 2).unwrap();
        let cc = build_chain_complex(0, &w, SubcomplexFilter::All, &opts()).unwrap();
        assert_eq!(euler_from_cells(&cc), -3);
    }

    #[test]
    fn empty_space_has_euler_zero() {
        let w = WeightVector::heavy_light(2, 1).unwrap();
        let cc = build_chain_complex(0, &w, SubcomplexFilter::All, &opts()).unwrap();
        assert_eq!(cc.top_degree(), -1);
        assert_eq!(euler_from_cells(&cc), 0);
    }

    #[test]
    fn flipped_entry_breaks_boundary_squared() {
        let cc = build_chain_complex(2, &WeightVector::ones(1).unwrap(), SubcomplexFilter::All, &opts()).unwrap();
        assert!(cc.check_boundary_squared().is_ok());
        assert!(cc.with_flipped_entry().check_boundary_squared().is_err());
    }

    #[test]
    fn subcomplex_ranks_are_nested() {
        let strata = enumerate_all(2, &WeightVector::ones(1).unwrap(), &opts()).unwrap();
        let all = chain_ranks(&strata, SubcomplexFilter::All).unwrap();
        let mlw = chain_ranks(&strata, SubcomplexFilter::MultiLoopWeight).unwrap();
        let lw = chain_ranks(&strata, SubcomplexFilter::LoopWeight).unwrap();
        for k in 0..all.len() {
            assert!(lw[k] <= mlw[k] && mlw[k] <= all[k]);
        }
    }

    #[test]
    fn bridge_q_equals_loop_weight_locus() {
        for (g, w) in [(2, WeightVector::ones(1).unwrap()), (2, WeightVector::ones(2).unwrap()), (1, WeightVector::ones(3).unwrap())] {
            let strata = enumerate_all(g, &w, &opts()).unwrap();
            assert_eq!(kept_cells(&strata, SubcomplexFilter::BridgeQ).unwrap(), kept_cells(&strata, SubcomplexFilter::LoopWeight).unwrap());
        }
    }

    #[test]
    fn triplet_text_round_trip() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(0, 0, rational(1, 1)), (1, 2, rational(-3, 2)), (1, 2, rational(1, 2))]);
        let text = m.to_triplet_text();
        assert_eq!(text, "2 3 2\n0 0 1/1\n1 2 -1/1\n");
        assert_eq!(SparseMatrix::from_triplet_text(&text).unwrap(), m);
        assert!(SparseMatrix::from_triplet_text("2 2 1\n5 0 1/1\n").is_err());
    }

    #[test]
    fn filter_names_parse() {
        for f in SubcomplexFilter::ALL {
            assert_eq!(f.name().parse::<SubcomplexFilter>().unwrap(), f);
        }
        assert!("nope".parse::<SubcomplexFilter>().is_err());
    }
}
