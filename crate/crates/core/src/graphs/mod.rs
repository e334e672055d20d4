//! Weighted marked multigraphs: the objects of the graph category whose
//! isomorphism classes index the cells of the tropical moduli space.

mod canon;
mod record;
mod weights;

pub use canon::{canonicalize, canonical_representative, encode_canonical, Automorphism, CanonicalForm, Representative};
pub use record::GraphRecord;
pub use weights::WeightVector;

use crate::error::{Error, Result};

/// A connected multigraph with vertex weights `h(v)` and a marking function
/// `[n] -> V`.
///
/// Edge `e` owns the half-edges `2e` (at `edges[e][0]`) and `2e + 1` (at
/// `edges[e][1]`), so a loop contributes two half-edges to its vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StableGraph {
    genus: u32,
    weights: Vec<u32>,
    edges: Vec<[usize; 2]>,
    markings: Vec<usize>,
}

impl StableGraph {
    pub fn new(weights: Vec<u32>, edges: Vec<[usize; 2]>, markings: Vec<usize>) -> Result<Self> {
        let nv = weights.len();
        if nv == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one vertex".into()));
        }
        if let Some(e) = edges.iter().position(|&[a, b]| a >= nv || b >= nv) {
            return Err(Error::InvalidGraph(format!("edge {e} has an endpoint out of range")));
        }
        if let Some(i) = markings.iter().position(|&v| v >= nv) {
            return Err(Error::InvalidGraph(format!("marking {} points at a missing vertex", i + 1)));
        }
        if !is_connected(nv, &edges) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        let b1 = edges.len() + 1 - nv;
        let genus = b1 as u32 + weights.iter().sum::<u32>();
        Ok(StableGraph { genus, weights, edges, markings })
    }

    /// One vertex of weight `genus` carrying all `n` markings.
    pub fn point(genus: u32, n: usize) -> Self {
        StableGraph { genus, weights: vec![genus], edges: Vec::new(), markings: vec![0; n] }
    }

    pub(crate) fn from_parts_unchecked(weights: Vec<u32>, edges: Vec<[usize; 2]>, markings: Vec<usize>) -> Self {
        let b1 = edges.len() + 1 - weights.len();
        let genus = b1 as u32 + weights.iter().sum::<u32>();
        StableGraph { genus, weights, edges, markings }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_markings(&self) -> usize {
        self.markings.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weights[v]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn markings(&self) -> &[usize] {
        &self.markings
    }

    pub fn first_betti(&self) -> usize {
        self.edges.len() + 1 - self.weights.len()
    }

    pub fn half_edge_vertex(&self, half_edge: usize) -> usize {
        self.edges[half_edge / 2][half_edge % 2]
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let [a, b] = self.edges[e];
        a == b
    }

    /// Number of half-edges at `v`.
    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().flatten().filter(|&&x| x == v).count()
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.num_vertices()];
        for &x in self.edges.iter().flatten() {
            val[x] += 1;
        }
        val
    }

    pub fn markings_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.markings.iter().enumerate().filter(move |&(_, &m)| m == v).map(|(i, _)| i)
    }

    pub fn has_loop(&self) -> bool {
        (0..self.num_edges()).any(|e| self.is_loop(e))
    }

    pub fn has_positive_weight(&self) -> bool {
        self.weights.iter().any(|&h| h > 0)
    }

    /// Two edges with the same pair of endpoints (two loops at one vertex
    /// count).
    pub fn has_multi_edge(&self) -> bool {
        let mut pairs: Vec<[usize; 2]> = self.edges.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
        pairs.sort_unstable();
        pairs.windows(2).any(|w| w[0] == w[1])
    }

    /// `2h(v) - 2 + val(v) + sum_{i in m^-1(v)} w_i > 0` at every vertex.
    pub fn is_stable(&self, w: &WeightVector) -> bool {
        assert_eq!(self.markings.len(), w.len(), "marking count differs from weight vector length");
        let val = self.valences();
        let mut mass = vec![0i64; self.num_vertices()];
        for (i, &v) in self.markings.iter().enumerate() {
            mass[v] += w.scaled(i);
        }
        (0..self.num_vertices())
            .all(|v| vertex_is_stable(self.weights[v], val[v], mass[v], w.denominator()))
    }

    /// Contract edge `e`: a loop is removed and its vertex weight increases by
    /// one; otherwise the endpoints are identified (the merged vertex takes
    /// the smaller index) and their weights and markings are combined.
    /// Remaining edges keep their relative order.
    pub fn contract_edge(&self, e: usize) -> Result<StableGraph> {
        if e >= self.num_edges() {
            return Err(Error::NoSuchEdge { edge: e, edges: self.num_edges() });
        }
        let mut keep = vec![true; self.num_edges()];
        keep[e] = false;
        Ok(self.contract_complement(&keep))
    }

    /// Contract every edge with `keep[e] == false`. Vertices of the result
    /// are the classes of vertices joined by contracted edges, numbered in
    /// order of their smallest member.
    pub fn contract_complement(&self, keep: &[bool]) -> StableGraph {
        let nv = self.num_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut extra = vec![0u32; nv];
        let mut contracted = Vec::new();
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if keep[e] {
                continue;
            }
            contracted.push(e);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                // closes a cycle among contracted edges: becomes weight
                extra[ra] += 1;
            } else {
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                parent[hi] = lo;
                extra[lo] += extra[hi];
                extra[hi] = 0;
            }
        }
        let mut index = vec![usize::MAX; nv];
        let mut weights = Vec::new();
        for v in 0..nv {
            let r = find(&mut parent, v);
            if index[r] == usize::MAX {
                index[r] = weights.len();
                weights.push(extra[r]);
            }
            index[v] = index[r];
        }
        for v in 0..nv {
            weights[index[v]] += self.weights[v];
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(e, _)| keep[e])
            .map(|(_, &[a, b])| [index[a], index[b]])
            .collect();
        let markings = self.markings.iter().map(|&v| index[v]).collect();
        let out = StableGraph::from_parts_unchecked(weights, edges, markings);
        debug_assert_eq!(out.genus, self.genus);
        out
    }

    /// Edges `e` such that contracting every other edge leaves the bridge
    /// graph: one non-loop edge between a weight-one unmarked vertex and a
    /// second vertex.
    pub fn one_ends(&self) -> Vec<usize> {
        (0..self.num_edges())
            .filter(|&e| {
                let mut keep = vec![false; self.num_edges()];
                keep[e] = true;
                self.contract_complement(&keep).is_bridge_graph()
            })
            .collect()
    }

    /// The graph `B`: two vertices joined by one edge, one of them of weight
    /// one with no markings.
    pub fn is_bridge_graph(&self) -> bool {
        if self.num_vertices() != 2 || self.num_edges() != 1 || self.is_loop(0) {
            return false;
        }
        (0..2).any(|v| self.weights[v] == 1 && self.markings_at(v).next().is_none())
    }

    /// Apply a relabeling: vertex `v` becomes `vertex_map[v]` and edge `e`
    /// moves to position `edge_map[e]`.
    pub fn relabeled(&self, vertex_map: &[usize], edge_map: &[usize]) -> StableGraph {
        let mut weights = vec![0; self.num_vertices()];
        for (v, &h) in self.weights.iter().enumerate() {
            weights[vertex_map[v]] = h;
        }
        let mut edges = vec![[0, 0]; self.num_edges()];
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            edges[edge_map[e]] = [vertex_map[a], vertex_map[b]];
        }
        let markings = self.markings.iter().map(|&v| vertex_map[v]).collect();
        StableGraph { genus: self.genus, weights, edges, markings }
    }
}

pub(crate) fn vertex_is_stable(h: u32, valence: usize, scaled_mass: i64, denominator: i64) -> bool {
    denominator * (2 * h as i64 - 2 + valence as i64) + scaled_mass > 0
}

fn is_connected(nv: usize, edges: &[[usize; 2]]) -> bool {
    let mut adj = vec![Vec::new(); nv];
    for &[a, b] in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
