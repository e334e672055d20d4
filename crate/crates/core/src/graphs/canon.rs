//! Canonical labeling of weighted marked multigraphs.
//!
//! Vertices start colored by `(h(v), markings at v, loops at v)` and are
//! refined by the multiset of `(neighbor color, edge multiplicity)` pairs
//! until the partition is equitable. Remaining ties are broken by
//! individualizing each vertex of the first non-singleton cell in turn; every
//! leaf of that search tree is a vertex ordering, and the lexicographically
//! least encoding over all leaves is the canonical one. Leaves reaching the
//! least encoding are exactly the orbit of one leaf under the vertex
//! automorphism group, which yields the group for free.

use std::collections::{BTreeMap, HashSet};

use crate::combinatorics::permutation_sign;

use super::StableGraph;

/// An automorphism acting on vertices and on half-edges (`2e`, `2e + 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Automorphism {
    pub vertices: Vec<usize>,
    pub half_edges: Vec<usize>,
}

impl Automorphism {
    pub fn identity(num_vertices: usize, num_edges: usize) -> Self {
        Automorphism { vertices: (0..num_vertices).collect(), half_edges: (0..2 * num_edges).collect() }
    }

    /// Induced permutation of edges.
    pub fn edges(&self) -> Vec<usize> {
        (0..self.half_edges.len() / 2).map(|e| self.half_edges[2 * e] / 2).collect()
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            vertices: other.vertices.iter().map(|&v| self.vertices[v]).collect(),
            half_edges: other.half_edges.iter().map(|&h| self.half_edges[h]).collect(),
        }
    }

    pub fn is_automorphism_of(&self, g: &StableGraph) -> bool {
        let vertices_ok = (0..g.num_vertices()).all(|v| g.weight(self.vertices[v]) == g.weight(v))
            && g.markings().iter().all(|&v| self.vertices[v] == v);
        let halves_ok = (0..2 * g.num_edges()).all(|h| {
            let image = self.half_edges[h];
            g.half_edge_vertex(image) == self.vertices[g.half_edge_vertex(h)]
                && self.half_edges[h ^ 1] == image ^ 1
        });
        vertices_ok && halves_ok
    }
}

/// Canonical data for one graph, expressed in the graph's own labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// Byte string equal for two graphs iff they are isomorphic.
    pub encoding: Vec<u8>,
    /// Canonical index of each vertex.
    pub vertex_position: Vec<usize>,
    /// Canonical index of each edge.
    pub edge_position: Vec<usize>,
    /// Generators of the automorphism group (vertex and half-edge action).
    pub generators: Vec<Automorphism>,
    /// Order of the automorphism group, loop flips included.
    pub aut_order: u64,
    /// Some automorphism permutes the edges oddly.
    pub edge_sign_degenerate: bool,
}

/// The canonical representative of an isomorphism class together with the
/// data needed by the enumerator and the boundary map.
#[derive(Clone, Debug)]
pub struct Representative {
    /// The input relabeled canonically; edges are `[lo, hi]` pairs in
    /// ascending order.
    pub graph: StableGraph,
    pub edge_position: Vec<usize>,
    pub aut_order: u64,
    pub degenerate: bool,
}

struct Search<'a> {
    g: &'a StableGraph,
    neighbors: Vec<Vec<(usize, u32)>>,
    best: Option<Vec<u8>>,
    best_leaves: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(g: &'a StableGraph) -> Self {
        let nv = g.num_vertices();
        let mut mult: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); nv];
        for &[a, b] in g.edges() {
            if a != b {
                *mult[a].entry(b).or_default() += 1;
                *mult[b].entry(a).or_default() += 1;
            }
        }
        let neighbors = mult.into_iter().map(|m| m.into_iter().collect()).collect();
        Search { g, neighbors, best: None, best_leaves: Vec::new() }
    }

    fn initial_colors(&self) -> Vec<u32> {
        let g = self.g;
        let mut loops = vec![0u32; g.num_vertices()];
        for &[a, b] in g.edges() {
            if a == b {
                loops[a] += 1;
            }
        }
        let keys: Vec<(u32, Vec<usize>, u32)> = (0..g.num_vertices())
            .map(|v| (g.weight(v), g.markings_at(v).collect(), loops[v]))
            .collect();
        rank(&keys)
    }

    fn refine(&self, colors: &mut Vec<u32>) {
        let mut count = distinct(colors);
        loop {
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..colors.len())
                .map(|v| {
                    let mut nb: Vec<(u32, u32)> = self.neighbors[v].iter().map(|&(u, m)| (colors[u], m)).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let next = rank(&sigs);
            let next_count = distinct(&next);
            *colors = next;
            if next_count == count {
                return;
            }
            count = next_count;
        }
    }

    fn run(&mut self, mut colors: Vec<u32>) {
        self.refine(&mut colors);
        let nv = colors.len();
        let mut sizes = vec![0usize; nv];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let Some(cell) = sizes.iter().position(|&s| s > 1) else {
            self.leaf(colors.iter().map(|&c| c as usize).collect());
            return;
        };
        let cell = cell as u32;
        let members: Vec<usize> = (0..nv).filter(|&v| colors[v] == cell).collect();
        for &v in &members {
            let individualized = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| if c > cell || (c == cell && u != v) { c + 1 } else { c })
                .collect();
            self.run(individualized);
        }
    }

    fn leaf(&mut self, position: Vec<usize>) {
        let enc = encode(self.g, &position);
        match &self.best {
            Some(b) if enc > *b => {}
            Some(b) if enc == *b => self.best_leaves.push(position),
            _ => {
                self.best = Some(enc);
                self.best_leaves.clear();
                self.best_leaves.push(position);
            }
        }
    }
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).expect("key present") as u32).collect()
}

fn distinct(colors: &[u32]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m as usize + 1)
}

fn push_varint(out: &mut Vec<u8>, mut x: usize) {
    loop {
        let byte = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn encode(g: &StableGraph, position: &[usize]) -> Vec<u8> {
    let nv = g.num_vertices();
    let mut out = Vec::with_capacity(3 + nv + g.num_markings() + 2 * g.num_edges());
    push_varint(&mut out, nv);
    push_varint(&mut out, g.num_edges());
    push_varint(&mut out, g.num_markings());
    let mut weights = vec![0; nv];
    for v in 0..nv {
        weights[position[v]] = g.weight(v);
    }
    for h in weights {
        push_varint(&mut out, h as usize);
    }
    for &v in g.markings() {
        push_varint(&mut out, position[v]);
    }
    let mut pairs: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&[a, b]| {
            let (x, y) = (position[a], position[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    pairs.sort_unstable();
    for (x, y) in pairs {
        push_varint(&mut out, x);
        push_varint(&mut out, y);
    }
    out
}

/// Encoding of a graph that is already canonically labeled.
pub fn encode_canonical(g: &StableGraph) -> Vec<u8> {
    let identity: Vec<usize> = (0..g.num_vertices()).collect();
    encode(g, &identity)
}

fn canonical_pair(position: &[usize], [a, b]: [usize; 2]) -> (usize, usize) {
    let (x, y) = (position[a], position[b]);
    (x.min(y), x.max(y))
}

fn edge_positions(g: &StableGraph, position: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.num_edges()).collect();
    order.sort_by_key(|&e| (canonical_pair(position, g.edge(e)), e));
    let mut edge_position = vec![0; g.num_edges()];
    for (i, &e) in order.iter().enumerate() {
        edge_position[e] = i;
    }
    edge_position
}

/// Edges grouped by unordered endpoint pair, each class sorted by index.
fn parallel_classes(g: &StableGraph) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut classes: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        classes.entry((a.min(b), a.max(b))).or_default().push(e);
    }
    classes
}

struct SearchOutcome {
    encoding: Vec<u8>,
    position: Vec<usize>,
    /// The whole vertex automorphism group, identity first.
    vertex_group: Vec<Vec<usize>>,
}

fn search(g: &StableGraph) -> SearchOutcome {
    let mut s = Search::new(g);
    let colors = s.initial_colors();
    s.run(colors);
    let encoding = s.best.take().expect("search reaches at least one leaf");
    let leaves = std::mem::take(&mut s.best_leaves);
    let position = leaves[0].clone();
    let mut inverse = vec![0; position.len()];
    for (v, &p) in position.iter().enumerate() {
        inverse[p] = v;
    }
    let vertex_group = leaves.iter().map(|leaf| leaf.iter().map(|&p| inverse[p]).collect()).collect();
    SearchOutcome { encoding, position, vertex_group }
}

fn kernel_order(classes: &BTreeMap<(usize, usize), Vec<usize>>) -> u64 {
    classes
        .iter()
        .map(|(&(a, b), es)| {
            let k = es.len() as u64;
            let perms: u64 = (1..=k).product();
            if a == b {
                perms * (1u64 << k)
            } else {
                perms
            }
        })
        .product()
}

fn is_degenerate(g: &StableGraph, classes: &BTreeMap<(usize, usize), Vec<usize>>, vertex_group: &[Vec<usize>]) -> bool {
    if classes.values().any(|es| es.len() > 1) {
        return true;
    }
    vertex_group.iter().any(|sigma| {
        let perm: Vec<usize> = g
            .edges()
            .iter()
            .map(|&[a, b]| {
                let (x, y) = (sigma[a], sigma[b]);
                classes[&(x.min(y), x.max(y))][0]
            })
            .collect();
        permutation_sign(&perm) < 0
    })
}

/// Lift a vertex automorphism to half-edges: the j-th edge of each parallel
/// class goes to the j-th edge of the image class.
fn lift(g: &StableGraph, classes: &BTreeMap<(usize, usize), Vec<usize>>, sigma: &[usize]) -> Automorphism {
    let mut half_edges = vec![0; 2 * g.num_edges()];
    for (&(a, b), es) in classes {
        let (x, y) = (sigma[a], sigma[b]);
        let targets = &classes[&(x.min(y), x.max(y))];
        for (&e, &f) in es.iter().zip(targets) {
            if a == b {
                half_edges[2 * e] = 2 * f;
                half_edges[2 * e + 1] = 2 * f + 1;
            } else {
                let first = sigma[g.edge(e)[0]];
                let (h0, h1) = if g.edge(f)[0] == first { (2 * f, 2 * f + 1) } else { (2 * f + 1, 2 * f) };
                half_edges[2 * e] = h0;
                half_edges[2 * e + 1] = h1;
            }
        }
    }
    Automorphism { vertices: sigma.to_vec(), half_edges }
}

fn vertex_closure(gens: &[Vec<usize>], n: usize) -> HashSet<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for s in gens {
            let y: Vec<usize> = x.iter().map(|&v| s[v]).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Full canonical data: encoding, canonical vertex and edge positions,
/// automorphism generators, group order and the odd-symmetry flag.
pub fn canonicalize(g: &StableGraph) -> CanonicalForm {
    let out = search(g);
    let classes = parallel_classes(g);
    let edge_position = edge_positions(g, &out.position);
    let aut_order = out.vertex_group.len() as u64 * kernel_order(&classes);
    let edge_sign_degenerate = is_degenerate(g, &classes, &out.vertex_group);

    let nv = g.num_vertices();
    let mut vertex_gens: Vec<Vec<usize>> = Vec::new();
    let mut closure = vertex_closure(&vertex_gens, nv);
    for sigma in &out.vertex_group {
        if !closure.contains(sigma) {
            vertex_gens.push(sigma.clone());
            closure = vertex_closure(&vertex_gens, nv);
        }
    }
    let mut generators: Vec<Automorphism> = vertex_gens.iter().map(|s| lift(g, &classes, s)).collect();
    let identity = Automorphism::identity(nv, g.num_edges());
    for (&(a, b), es) in &classes {
        for pair in es.windows(2) {
            let mut t = identity.clone();
            let (e, f) = (pair[0], pair[1]);
            if a == b || g.edge(e)[0] == g.edge(f)[0] {
                t.half_edges.swap(2 * e, 2 * f);
                t.half_edges.swap(2 * e + 1, 2 * f + 1);
            } else {
                t.half_edges[2 * e] = 2 * f + 1;
                t.half_edges[2 * f + 1] = 2 * e;
                t.half_edges[2 * e + 1] = 2 * f;
                t.half_edges[2 * f] = 2 * e + 1;
            }
            generators.push(t);
        }
        if a == b {
            for &e in es {
                let mut flip = identity.clone();
                flip.half_edges.swap(2 * e, 2 * e + 1);
                generators.push(flip);
            }
        }
    }

    CanonicalForm {
        encoding: out.encoding,
        vertex_position: out.position,
        edge_position,
        generators,
        aut_order,
        edge_sign_degenerate,
    }
}

/// Canonical representative plus the edge map from `g` onto it. Cheaper
/// than [`canonicalize`]: no generator set is extracted.
pub fn canonical_representative(g: &StableGraph) -> Representative {
    let out = search(g);
    let classes = parallel_classes(g);
    let edge_position = edge_positions(g, &out.position);
    let aut_order = out.vertex_group.len() as u64 * kernel_order(&classes);
    let degenerate = is_degenerate(g, &classes, &out.vertex_group);
    let relabeled = g.relabeled(&out.position, &edge_position);
    let edges = relabeled.edges().iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
    let graph = StableGraph::from_parts_unchecked(relabeled.weights().to_vec(), edges, relabeled.markings().to_vec());
    Representative { graph, edge_position, aut_order, degenerate }
}
