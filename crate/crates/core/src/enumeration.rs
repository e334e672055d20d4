//! Isomorphism classes of `w`-stable genus-`g` graphs, stratified by edge
//! count.
//!
//! Every graph with `k + 1` edges contracts to a stable graph with `k` edges,
//! so the stratum with `k + 1` edges is exactly the set of stable one-edge
//! uncontractions of the stratum with `k` edges. Starting from the single
//! vertex of weight `g` carrying every marking, each level is generated from
//! the previous one, deduplicated by canonical form and sorted by canonical
//! encoding.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{canonical_representative, canonicalize, encode_canonical, vertex_is_stable, CanonicalForm, GraphRecord, StableGraph, WeightVector};

/// One stratum of the moduli space: graphs with `edge_count` edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumIndex {
    pub genus: u32,
    pub weights: WeightVector,
    pub edge_count: usize,
}

impl StratumIndex {
    pub fn new(genus: u32, weights: WeightVector, edge_count: usize) -> Result<Self> {
        weights.check_genus(genus)?;
        let max = max_edge_count(genus, weights.len());
        if edge_count == 0 || edge_count > max {
            return Err(Error::InvalidStratum { edge_count, max });
        }
        Ok(StratumIndex { genus, weights, edge_count })
    }
}

/// `3g - 3 + n`, the largest possible edge count.
pub fn max_edge_count(genus: u32, n: usize) -> usize {
    (3 * genus as usize + n).saturating_sub(3)
}

/// An isomorphism class: its canonical representative and symmetry data.
/// A class with `p + 1` edges is a `p`-cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalCell {
    pub graph: StableGraph,
    pub encoding: Vec<u8>,
    pub aut_order: u64,
    /// Some automorphism permutes the edges oddly; such a cell carries no
    /// rational chain.
    pub degenerate: bool,
}

impl CanonicalCell {
    pub fn from_graph(g: &StableGraph) -> Self {
        let rep = canonical_representative(g);
        let encoding = canonicalize(&rep.graph).encoding;
        CanonicalCell { graph: rep.graph, encoding, aut_order: rep.aut_order, degenerate: rep.degenerate }
    }

    /// `graph` must already be a canonical representative.
    fn from_canonical(graph: StableGraph, aut_order: u64, degenerate: bool) -> Self {
        let encoding = encode_canonical(&graph);
        CanonicalCell { graph, encoding, aut_order, degenerate }
    }

    /// `|E| - 1`; the single-vertex graph sits in degree `-1`.
    pub fn dimension(&self) -> isize {
        self.graph.num_edges() as isize - 1
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        canonicalize(&self.graph)
    }

    pub fn record(&self) -> GraphRecord {
        let mut rec = GraphRecord::from(&self.graph);
        rec.aut_order = Some(self.aut_order);
        rec.edge_sign_degenerate = Some(self.degenerate);
        rec
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnumerationOptions {
    /// Worker threads; `0` uses the global rayon pool.
    pub workers: usize,
    /// Abort once more than this many classes have been produced.
    pub budget: Option<usize>,
}

/// All strata of one moduli space. `levels[k]` holds the classes with `k`
/// edges; `levels[0]` is the single vertex used for the augmentation.
#[derive(Clone, Debug)]
pub struct Strata {
    pub genus: u32,
    pub weights: WeightVector,
    levels: Vec<Vec<CanonicalCell>>,
}

impl Strata {
    /// Largest edge count present (0 when the space is empty).
    pub fn max_edges(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn stratum(&self, edge_count: usize) -> &[CanonicalCell] {
        self.levels.get(edge_count).map_or(&[], |v| v.as_slice())
    }

    pub fn levels(&self) -> &[Vec<CanonicalCell>] {
        &self.levels
    }

    /// Number of cells of positive edge count.
    pub fn cell_count(&self) -> usize {
        self.levels.iter().skip(1).map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.len() <= 1
    }

    /// Position of the class of `g` in its stratum.
    pub fn locate(&self, g: &StableGraph) -> Option<usize> {
        let level = self.levels.get(g.num_edges())?;
        let enc = canonicalize(g).encoding;
        level.binary_search_by(|c| c.encoding.cmp(&enc)).ok()
    }

    pub fn locate_encoding(&self, edge_count: usize, encoding: &[u8]) -> Option<usize> {
        let level = self.levels.get(edge_count)?;
        level.binary_search_by(|c| c.encoding.as_slice().cmp(encoding)).ok()
    }

    /// Every one-edge contraction of every listed graph is listed.
    pub fn check_closure(&self) -> std::result::Result<(), String> {
        for level in self.levels.iter().skip(1) {
            for cell in level {
                for e in 0..cell.graph.num_edges() {
                    let c = cell.graph.contract_edge(e).expect("edge in range");
                    if !c.is_stable(&self.weights) {
                        return Err(format!("contraction of edge {e} of {:?} is unstable", cell.graph));
                    }
                    if self.locate(&c).is_none() {
                        return Err(format!("contraction of edge {e} of {:?} is missing", cell.graph));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Classes with `idx.edge_count` edges, sorted by canonical encoding.
pub fn enumerate_stratum(idx: &StratumIndex, opts: &EnumerationOptions) -> Result<Vec<CanonicalCell>> {
    let strata = enumerate_up_to(idx.genus, &idx.weights, Some(idx.edge_count), opts)?;
    Ok(strata.stratum(idx.edge_count).to_vec())
}

/// Every stratum of the moduli space for `(g, w)`.
pub fn enumerate_all(genus: u32, weights: &WeightVector, opts: &EnumerationOptions) -> Result<Strata> {
    enumerate_up_to(genus, weights, None, opts)
}

fn enumerate_up_to(genus: u32, weights: &WeightVector, limit: Option<usize>, opts: &EnumerationOptions) -> Result<Strata> {
    weights.check_genus(genus)?;
    let run = || generate(genus, weights, limit, opts.budget);
    if opts.workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Hypothesis(format!("cannot start worker pool: {e}")))?
            .install(run)
    }
}

fn generate(genus: u32, weights: &WeightVector, limit: Option<usize>, budget: Option<usize>) -> Result<Strata> {
    let max = max_edge_count(genus, weights.len());
    let top = limit.unwrap_or(max).min(max);
    let point = StableGraph::point(genus, weights.len());
    let mut levels = vec![vec![CanonicalCell::from_graph(&point)]];
    let mut total = 0usize;
    for _ in 0..top {
        let prev = levels.last().expect("at least the point level");
        let found: HashMap<StableGraph, (u64, bool)> = prev
            .par_iter()
            .fold(HashMap::new, |mut acc, cell| {
                uncontractions(&cell.graph, weights, |g| {
                    let rep = canonical_representative(&g);
                    acc.entry(rep.graph).or_insert((rep.aut_order, rep.degenerate));
                });
                acc
            })
            .reduce(HashMap::new, |a, b| {
                let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                big.extend(small);
                big
            });
        if found.is_empty() {
            break;
        }
        total += found.len();
        if let Some(b) = budget {
            if total > b {
                return Err(Error::BudgetExceeded { budget: b, reached: total });
            }
        }
        let mut next: Vec<CanonicalCell> = found
            .into_par_iter()
            .map(|(g, (aut_order, degenerate))| CanonicalCell::from_canonical(g, aut_order, degenerate))
            .collect();
        next.par_sort_unstable_by(|a, b| a.encoding.cmp(&b.encoding));
        levels.push(next);
    }
    Ok(Strata { genus, weights: weights.clone(), levels })
}

/// Call `emit` on every stable graph obtained from `g` by one uncontraction:
/// a loop traded for one unit of vertex weight, or a vertex split in two by a
/// new edge with its half-edges, markings and weight distributed.
pub fn uncontractions(g: &StableGraph, weights: &WeightVector, mut emit: impl FnMut(StableGraph)) {
    let nv = g.num_vertices();
    let den = weights.denominator();
    for v in 0..nv {
        let h = g.weight(v);
        if h > 0 {
            let mut ws = g.weights().to_vec();
            ws[v] -= 1;
            let mut edges = g.edges().to_vec();
            edges.push([v, v]);
            emit(StableGraph::from_parts_unchecked(ws, edges, g.markings().to_vec()));
        }
        let halves: Vec<usize> = (0..2 * g.num_edges()).filter(|&x| g.half_edge_vertex(x) == v).collect();
        let marks: Vec<usize> = g.markings_at(v).collect();
        let (nh, nm) = (halves.len(), marks.len());
        for hmask in 0u64..(1 << nh) {
            let moved_halves = hmask.count_ones() as usize;
            for mmask in 0u64..(1 << nm) {
                let moved_mass: i64 = (0..nm).filter(|&j| mmask >> j & 1 == 1).map(|j| weights.scaled(marks[j])).sum();
                let stay_mass: i64 = marks.iter().map(|&i| weights.scaled(i)).sum::<i64>() - moved_mass;
                for a in 0..=h {
                    let b = h - a;
                    if !vertex_is_stable(a, nh - moved_halves + 1, stay_mass, den)
                        || !vertex_is_stable(b, moved_halves + 1, moved_mass, den)
                    {
                        continue;
                    }
                    let mut edges = g.edges().to_vec();
                    for (j, &x) in halves.iter().enumerate() {
                        if hmask >> j & 1 == 1 {
                            edges[x / 2][x % 2] = nv;
                        }
                    }
                    edges.push([v, nv]);
                    let mut ws = g.weights().to_vec();
                    ws[v] = a;
                    ws.push(b);
                    let mut markings = g.markings().to_vec();
                    for (j, &i) in marks.iter().enumerate() {
                        if mmask >> j & 1 == 1 {
                            markings[i] = nv;
                        }
                    }
                    emit(StableGraph::from_parts_unchecked(ws, edges, markings));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::rational;

    fn eps3() -> WeightVector {
        WeightVector::new(vec![rational(1, 4); 3]).unwrap()
    }

    fn sizes(s: &Strata) -> Vec<usize> {
        s.levels().iter().map(Vec::len).collect()
    }

    #[test]
    fn genus_one_three_light_points() {
        let s = enumerate_all(1, &eps3(), &EnumerationOptions::default()).unwrap();
        assert_eq!(sizes(&s), vec![1, 1, 3, 1]);
        assert!(s.check_closure().is_ok());
        let idx = StratumIndex::new(1, eps3(), 2).unwrap();
        assert_eq!(enumerate_stratum(&idx, &EnumerationOptions::default()).unwrap().len(), 3);
    }

    #[test]
    fn genus_zero_four_points() {
        let idx = StratumIndex::new(0, WeightVector::ones(4).unwrap(), 1).unwrap();
        let cells = enumerate_stratum(&idx, &EnumerationOptions::default()).unwrap();
        assert_eq!(cells.len(), 3);
        assert!(cells.iter().all(|c| !c.degenerate));
    }

    #[test]
    fn single_light_point_genus_one() {
        let w = WeightVector::new(vec![rational(1, 2)]).unwrap();
        let s = enumerate_all(1, &w, &EnumerationOptions::default()).unwrap();
        assert_eq!(sizes(&s), vec![1, 1]);
        assert_eq!(s.stratum(1)[0].graph.edges(), &[[0, 0]]);
    }

    #[test]
    fn rejects_unstable_pairs() {
        let w = WeightVector::ones(2).unwrap();
        assert!(matches!(
            enumerate_all(0, &w, &EnumerationOptions::default()),
            Err(Error::UnstableGenus { .. })
        ));
        assert!(StratumIndex::new(1, w.clone(), 0).is_err());
        assert!(StratumIndex::new(1, w, 3).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let opts = EnumerationOptions { workers: 1, budget: Some(3) };
        let err = enumerate_all(2, &WeightVector::ones(1).unwrap(), &opts).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 3, .. }));
    }

    #[test]
    fn empty_space() {
        let w = WeightVector::heavy_light(2, 1).unwrap();
        let s = enumerate_all(0, &w, &EnumerationOptions::default()).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.cell_count(), 0);
    }
}
