//! Small simple graphs as pair bitmasks, canonical forms, induced-subgraph
//! tests and enumeration of A-free graphs and flags.
//!
//! Vertices are `0..n` internally and `1..=n` on the JSON boundary. Pair
//! `{i, j}` with `i < j` has index `i·(2n−i−1)/2 + (j−i−1)`, so pairs are
//! numbered in lexicographic order `12, 13, …, 1n, 23, …`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::perm::Permutation;

/// Largest vertex count representable (55 pairs fit in a `u64`).
pub const MAX_VERTICES: usize = 11;
/// Largest vertex count accepted by [`canonical_form`].
pub const CANONICAL_LIMIT: usize = 10;

#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_of_index(n: usize, mut p: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if p < row {
            return (i, i + 1 + p);
        }
        p -= row;
    }
    panic!("pair index out of range")
}

/// All pairs of `0..n` in index order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// A simple graph on vertices `0..n`; bit `p` of `edges` is pair `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: u64,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices");
        Graph { n, edges: 0 }
    }

    /// Builds from 0-based edges, rejecting loops, duplicates and
    /// out-of-range vertices.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!("vertex count {n} outside 1..={MAX_VERTICES}")));
        }
        let mut g = Graph::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at {i}")));
            }
            if g.has_edge(i, j) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i},{j})")));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Builds from 1-based edges.
    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if edges.iter().any(|&(i, j)| i == 0 || j == 0) {
            return Err(Error::InvalidGraph("vertices are 1-based".into()));
        }
        let e: Vec<_> = edges.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
        Self::new(n, &e)
    }

    pub fn from_mask(n: usize, edges: u64) -> Self {
        assert!(n <= MAX_VERTICES);
        debug_assert!(pair_count(n) == 64 || edges >> pair_count(n) == 0);
        Graph { n, edges }
    }

    pub fn complete(n: usize) -> Self {
        let p = pair_count(n);
        Graph::from_mask(n, if p == 64 { u64::MAX } else { (1u64 << p) - 1 })
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = Graph::empty(a + b);
        for i in 0..a {
            for j in a..a + b {
                g.add_edge(i, j);
            }
        }
        g
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mask(&self) -> u64 {
        self.edges
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edges >> pair_index(self.n, i, j) & 1 == 1
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.edges |= 1 << pair_index(self.n, i, j);
    }

    pub fn edge_count(&self) -> usize {
        self.edges.count_ones() as usize
    }

    /// 0-based edges in pair order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        pairs(self.n).into_iter().filter(|&(i, j)| self.has_edge(i, j)).collect()
    }

    /// Neighbourhood bitmasks, one per vertex.
    pub fn adjacency(&self) -> Vec<u16> {
        let mut adj = vec![0u16; self.n];
        for (i, j) in self.edges() {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(|a| a.count_ones() as usize).collect()
    }

    /// Lexicographic key of the edge bitstring: smaller key means
    /// lexicographically smaller string (pair 0 most significant).
    pub fn lex_key(&self) -> u64 {
        let p = pair_count(self.n);
        if p == 0 {
            0
        } else {
            self.edges.reverse_bits() >> (64 - p)
        }
    }

    /// Relabels vertex `i` as `σ(i)`.
    pub fn permute(&self, sigma: &Permutation) -> Graph {
        assert_eq!(sigma.degree(), self.n);
        let mut g = Graph::empty(self.n);
        for (i, j) in self.edges() {
            g.add_edge(sigma.apply(i), sigma.apply(j));
        }
        g
    }

    /// Induced subgraph; new vertex `k` is old vertex `vs[k]`.
    pub fn induced(&self, vs: &[usize]) -> Graph {
        let mut g = Graph::empty(vs.len());
        for a in 0..vs.len() {
            for b in a + 1..vs.len() {
                if self.has_edge(vs[a], vs[b]) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Adds a vertex `n` adjacent to the vertices in `nbrs`.
    pub fn extend(&self, nbrs: u16) -> Graph {
        let mut g = Graph::empty(self.n + 1);
        for (i, j) in self.edges() {
            g.add_edge(i, j);
        }
        for v in 0..self.n {
            if nbrs >> v & 1 == 1 {
                g.add_edge(v, self.n);
            }
        }
        g
    }
}

/// Canonical isomorph: the relabeling with lexicographically smallest edge
/// bitstring.
pub fn canonical_form(g: &Graph) -> Result<Graph> {
    if g.n > CANONICAL_LIMIT {
        return Err(Error::Budget(format!("canonical form needs at most {CANONICAL_LIMIT} vertices, got {}", g.n)));
    }
    Ok(canonical_with_prefix(g, 0).0)
}

/// Canonical labeling keeping vertices `0..fixed` in place. Returns the
/// canonical graph and a permutation mapping `g` onto it.
pub fn canonical_with_prefix(g: &Graph, fixed: usize) -> (Graph, Permutation) {
    let n = g.n;
    let adj = g.adjacency();
    let mut cells: Vec<Vec<usize>> = (0..fixed).map(|v| vec![v]).collect();
    if fixed < n {
        cells.push((fixed..n).collect());
    }
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut order = Vec::with_capacity(n);
    search(&adj, n, cells, &mut order, 0, &mut best);
    let (_, order) = best.expect("search visits at least one leaf");
    // order[k] = old vertex at new position k
    let mut images = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        images[v] = k;
    }
    let sigma = Permutation::from_images(images).unwrap();
    (g.permute(&sigma), sigma)
}

/// Branch-and-bound over ordered partitions. `prefix` holds the bitstring
/// rows already fixed, most significant first, `order` the vertices placed.
fn search(
    adj: &[u16],
    n: usize,
    cells: Vec<Vec<usize>>,
    order: &mut Vec<usize>,
    prefix: u64,
    best: &mut Option<(u64, Vec<usize>)>,
) {
    let k = order.len();
    if k == n {
        if best.as_ref().is_none_or(|(b, _)| prefix < *b) {
            *best = Some((prefix, order.clone()));
        }
        return;
    }
    let first = &cells[0];
    // candidates for position k, one per twin class
    let mut cands: Vec<usize> = Vec::new();
    for &v in first {
        let twin = cands.iter().any(|&u| adj[u] & !(1 << v) == adj[v] & !(1 << u));
        if !twin {
            cands.push(v);
        }
    }
    // score each candidate by its row; keep the minimal ones
    let mut scored: Vec<(u64, usize)> = cands
        .iter()
        .map(|&v| {
            let mut row = 0u64;
            for (ci, c) in cells.iter().enumerate() {
                let members = c.iter().filter(|&&u| u != v || ci != 0);
                let (zeros, ones): (Vec<&usize>, Vec<&usize>) = members.partition(|&&u| adj[v] >> u & 1 == 0);
                row = row << zeros.len();
                for _ in 0..ones.len() {
                    row = row << 1 | 1;
                }
            }
            (row, v)
        })
        .collect();
    let min_row = scored.iter().map(|s| s.0).min().unwrap();
    scored.retain(|s| s.0 == min_row);
    let width = n - k - 1;
    let new_prefix = prefix << width | min_row;
    if let Some((b, _)) = best {
        // compare with the same number of leading rows of the best string
        let rest: usize = (k + 1..n).map(|r| n - r - 1).sum();
        if new_prefix > *b >> rest {
            return;
        }
    }
    for (_, v) in scored {
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len() + 1);
        for (ci, c) in cells.iter().enumerate() {
            let members: Vec<usize> = c.iter().copied().filter(|&u| u != v || ci != 0).collect();
            let (zeros, ones): (Vec<_>, Vec<_>) = members.into_iter().partition(|&u| adj[v] >> u & 1 == 0);
            if !zeros.is_empty() {
                next.push(zeros);
            }
            if !ones.is_empty() {
                next.push(ones);
            }
        }
        order.push(v);
        search(adj, n, next, order, new_prefix, best);
        order.pop();
    }
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> Result<bool> {
    if a.n != b.n || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// True iff some injective map embeds `a` into `g` as an induced subgraph.
pub fn contains_induced(g: &Graph, a: &Graph) -> bool {
    if a.n > g.n {
        return false;
    }
    let ga = g.adjacency();
    let aa = a.adjacency();
    let mut map = Vec::with_capacity(a.n);
    embed(&ga, &aa, &mut map, 0)
}

fn embed(ga: &[u16], aa: &[u16], map: &mut Vec<usize>, used: u16) -> bool {
    let k = map.len();
    if k == aa.len() {
        return true;
    }
    for v in 0..ga.len() {
        if used >> v & 1 == 1 {
            continue;
        }
        let ok = (0..k).all(|u| (aa[k] >> u & 1 == 1) == (ga[v] >> map[u] & 1 == 1));
        if ok {
            map.push(v);
            if embed(ga, aa, map, used | 1 << v) {
                return true;
            }
            map.pop();
        }
    }
    false
}

/// Host-size budget for [`enumerate_a_free`].
pub fn host_budget(a: &Graph) -> usize {
    if *a == Graph::complete(3) {
        8
    } else {
        7
    }
}

fn sort_graphs(v: &mut [Graph]) {
    v.sort_by_key(|g| (g.edge_count(), g.lex_key()));
}

/// One canonical representative per isomorphism class of A-free graphs on
/// `m` vertices, sorted by (edge count, bitstring).
pub fn enumerate_a_free(m: usize, a: &Graph) -> Result<Vec<Graph>> {
    if m > host_budget(a) {
        return Err(Error::Budget(format!("host size {m} exceeds {} for this forbidden graph", host_budget(a))));
    }
    if m == 0 {
        return Err(Error::Parameter("host size must be positive".into()));
    }
    let mut level = vec![Graph::empty(1)];
    if contains_induced(&level[0], a) {
        return Ok(Vec::new());
    }
    for _ in 1..m {
        level = extend_level(&level, a, 0);
    }
    sort_graphs(&mut level);
    Ok(level)
}

/// All one-vertex extensions of `level` that avoid `a`, deduplicated up to
/// isomorphisms fixing `0..fixed`.
fn extend_level(level: &[Graph], a: &Graph, fixed: usize) -> Vec<Graph> {
    let k = level[0].n;
    let per = 1u64 << k;
    let total = level.len() as u64 * per;
    let found: Vec<u64> = par::filter_map_range(total, |idx| {
        let g = level[(idx / per) as usize].extend((idx % per) as u16);
        // only copies through the new vertex can be new
        if contains_induced(&g, a) {
            return None;
        }
        Some(canonical_with_prefix(&g, fixed).0.edges)
    });
    let set: BTreeSet<u64> = found.into_iter().collect();
    set.into_iter().map(|e| Graph::from_mask(k + 1, e)).collect()
}

/// A fully labeled graph: vertex `k` carries label `k + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntersectionType {
    graph: Graph,
}

impl IntersectionType {
    pub fn new(graph: Graph) -> Self {
        IntersectionType { graph }
    }

    /// `labels[k]` is the 0-based vertex carrying label `k + 1`.
    pub fn with_labels(graph: Graph, labels: &[usize]) -> Result<Self> {
        let t = graph.vertex_count();
        if labels.len() != t {
            return Err(Error::LabelMismatch(format!("{} labels for {t} vertices", labels.len())));
        }
        let mut images = vec![usize::MAX; t];
        for (k, &v) in labels.iter().enumerate() {
            if v >= t || images[v] != usize::MAX {
                return Err(Error::LabelMismatch(format!("labels {labels:?} are not a bijection")));
            }
            images[v] = k;
        }
        let sigma = Permutation::from_images(images)?;
        Ok(IntersectionType { graph: graph.permute(&sigma) })
    }

    /// The single labeled vertex.
    pub fn vertex() -> Self {
        IntersectionType { graph: Graph::empty(1) }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn size(&self) -> usize {
        self.graph.vertex_count()
    }
}

/// A T-flag: vertices `0..t` are labeled and induce the type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Flag {
    graph: Graph,
    t: usize,
}

impl Flag {
    /// `embedding[k]` is the vertex of `graph` carrying label `k + 1`.
    pub fn new(graph: Graph, ty: &IntersectionType, embedding: &[usize]) -> Result<Self> {
        let f = graph.vertex_count();
        let t = ty.size();
        if embedding.len() != t || t > f {
            return Err(Error::LabelMismatch(format!("embedding of size {} for type of size {t}", embedding.len())));
        }
        let mut seen = vec![false; f];
        for &v in embedding {
            if v >= f || seen[v] {
                return Err(Error::NotInjective(format!("embedding {embedding:?}")));
            }
            seen[v] = true;
        }
        if graph.induced(embedding) != *ty.graph() {
            return Err(Error::LabelMismatch("labeled vertices do not induce the type".into()));
        }
        // move labeled vertices to the front
        let mut order: Vec<usize> = embedding.to_vec();
        order.extend((0..f).filter(|v| !seen[*v]));
        Ok(Flag { graph: graph.induced(&order), t })
    }

    pub(crate) fn from_normalized(graph: Graph, t: usize) -> Self {
        Flag { graph, t }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn type_size(&self) -> usize {
        self.t
    }

    pub fn size(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn type_graph(&self) -> IntersectionType {
        IntersectionType::new(self.graph.induced(&(0..self.t).collect::<Vec<_>>()))
    }

    /// Label `k + 1` sits on vertex `k`.
    pub fn embedding(&self) -> Vec<usize> {
        (0..self.t).collect()
    }

    /// Canonical representative under isomorphisms fixing labeled vertices.
    pub fn canonical(&self) -> Flag {
        Flag { graph: canonical_with_prefix(&self.graph, self.t).0, t: self.t }
    }

    pub fn is_isomorphic(&self, other: &Flag) -> bool {
        self.t == other.t && self.graph.n == other.graph.n && self.canonical() == other.canonical()
    }
}

/// One representative per flag-isomorphism class of A-free T-flags of
/// size `f`, sorted by (edge count, bitstring).
pub fn enumerate_flags(ty: &IntersectionType, f: usize, a: &Graph) -> Result<Vec<Flag>> {
    let t = ty.size();
    if f > 7 {
        return Err(Error::Budget(format!("flag size {f} exceeds 7")));
    }
    if t > f {
        return Err(Error::Parameter(format!("type size {t} exceeds flag size {f}")));
    }
    if contains_induced(ty.graph(), a) {
        return Err(Error::TypeNotAFree);
    }
    let mut level = vec![*ty.graph()];
    for _ in t..f {
        level = extend_level(&level, a, t);
        if level.is_empty() {
            return Ok(Vec::new());
        }
    }
    sort_graphs(&mut level);
    Ok(level.into_iter().map(|g| Flag::from_normalized(g, t)).collect())
}

/// Characteristic vector of a graph on `n` vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CharVector {
    n: usize,
    bits: u64,
}

impl CharVector {
    pub fn from_mask(n: usize, bits: u64) -> Self {
        CharVector { n, bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        pair_count(self.n)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, p: usize) -> u8 {
        (self.bits >> p & 1) as u8
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.len()).map(|p| self.get(p)).collect()
    }

    pub fn graph(&self) -> Graph {
        Graph::from_mask(self.n, self.bits)
    }
}

pub fn char_vector(g: &Graph, n: usize) -> Result<CharVector> {
    if g.n != n {
        return Err(Error::Dimension(format!("graph has {} vertices, expected {n}", g.n)));
    }
    Ok(CharVector { n, bits: g.edges })
}

/// Characteristic vectors of every labeled A-free graph on `n` vertices,
/// in increasing mask order.
pub fn labeled_a_free(n: usize, a: &Graph) -> Result<Vec<CharVector>> {
    if pair_count(n) > 21 {
        return Err(Error::Budget(format!("exhaustive labeled enumeration limited to n ≤ 7, got {n}")));
    }
    let total = 1u64 << pair_count(n);
    let is_k3 = *a == Graph::complete(3);
    let tri = if is_k3 { triangle_masks(n) } else { Vec::new() };
    Ok(par::filter_map_range(total, |m| {
        let free = if is_k3 {
            tri.iter().all(|t| m & t != *t)
        } else {
            !contains_induced(&Graph::from_mask(n, m), a)
        };
        free.then_some(CharVector { n, bits: m })
    }))
}

fn triangle_masks(n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push(1 << pair_index(n, i, j) | 1 << pair_index(n, i, k) | 1 << pair_index(n, j, k));
            }
        }
    }
    out
}

/// JSON form of a graph: 1-based edges.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<usize>>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson { n: g.n, edges: g.edges().into_iter().map(|(i, j)| [i + 1, j + 1]).collect(), labels: None }
    }
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<Graph> {
        for e in &self.edges {
            if e[0] >= e[1] {
                return Err(Error::InvalidGraph(format!("edge {e:?} must satisfy i < j")));
            }
        }
        let e: Vec<_> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_one_based(self.n, &e)
    }

    /// Reads an intersection type; missing labels mean the identity.
    pub fn to_type(&self) -> Result<IntersectionType> {
        let g = self.to_graph()?;
        match &self.labels {
            None => Ok(IntersectionType::new(g)),
            Some(l) => {
                if l.contains(&0) {
                    return Err(Error::LabelMismatch("labels are 1-based vertices".into()));
                }
                IntersectionType::with_labels(g, &l.iter().map(|v| v - 1).collect::<Vec<_>>())
            }
        }
    }

    pub fn from_type(t: &IntersectionType) -> Self {
        let mut j = GraphJson::from(t.graph());
        j.labels = Some((1..=t.size()).collect());
        j
    }

    pub fn from_flag(f: &Flag) -> Self {
        let mut j = GraphJson::from(f.graph());
        j.labels = Some((1..=f.type_size()).collect());
        j
    }
}
