//! Density polynomials of graphs and flags, and pair-density tables.
//!
//! Averages over injective maps are computed as group averages of a single
//! `p_h`: the maps `V(H) → [n]` form one orbit under `S_n`, and the maps
//! respecting a labeling `Θ` form one orbit under the pointwise stabilizer
//! of `Θ([t])`. Pair densities average both orders of the two flags.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, pair_index, Flag, Graph, GraphJson};
use crate::par;
use crate::perm::{PermGroup, Permutation};
use crate::poly::{monomial_orbit, pair_permutation, Monomial, MultilinearPoly};
use crate::rational::{self, Rational};

/// An injective labeling `Θ: [t] → [n]` (0-based values).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    n: usize,
    theta: Vec<usize>,
}

impl Labeling {
    pub fn new(n: usize, theta: Vec<usize>) -> Result<Self> {
        check_injective(&theta, n)?;
        Ok(Labeling { n, theta })
    }

    /// `Θ(k) = k`.
    pub fn identity(n: usize, t: usize) -> Self {
        Labeling { n, theta: (0..t).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.theta.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.theta
    }

    /// Vertices outside the image, increasing.
    pub fn free_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|v| !self.theta.contains(v)).collect()
    }

    /// The pointwise stabilizer of the image: permutations of the free vertices.
    pub fn stabilizer(&self) -> PermGroup {
        PermGroup::young(self.n, &[self.free_vertices()])
    }

    /// All labelings `[t] → [n]`.
    pub fn all(n: usize, t: usize) -> Vec<Labeling> {
        injections(t, n, 0).into_iter().map(|theta| Labeling { n, theta }).collect()
    }
}

fn check_injective(h: &[usize], n: usize) -> Result<()> {
    let mut used = 0u32;
    for &v in h {
        if v >= n || used >> v & 1 == 1 {
            return Err(Error::NotInjective(format!("{h:?} into [{n}]")));
        }
        used |= 1 << v;
    }
    Ok(())
}

/// All injective maps `[k] → [n]` avoiding the vertices in `avoid`, in
/// lexicographic order.
pub fn injections(k: usize, n: usize, avoid: u32) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(k: usize, n: usize, used: u32, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if used >> v & 1 == 0 {
                cur.push(v);
                rec(k, n, used | 1 << v, cur, out);
                cur.pop();
            }
        }
    }
    rec(k, n, avoid, &mut cur, &mut out);
    out
}

/// `p^h_G = Π_{edges} x_{h(i)h(j)} · Π_{non-edges} (1 − x_{h(i)h(j)})`.
pub fn p_h(g: &Graph, h: &[usize], n: usize) -> Result<MultilinearPoly> {
    if h.len() != g.vertex_count() {
        return Err(Error::Dimension(format!("map of length {} for a graph on {} vertices", h.len(), g.vertex_count())));
    }
    check_injective(h, n)?;
    let k = h.len();
    let mut edge_mask = 0u64;
    let mut non_edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let p = pair_index(n, h[a], h[b]);
            if g.has_edge(a, b) {
                edge_mask |= 1 << p;
            } else {
                non_edges.push(p);
            }
        }
    }
    // expand the (1 − x) factors: every subset S of non-edges with sign (−1)^|S|
    let mut p = MultilinearPoly::zero(n);
    for s in 0u64..1 << non_edges.len() {
        let mut m = edge_mask;
        for (bit, &q) in non_edges.iter().enumerate() {
            if s >> bit & 1 == 1 {
                m |= 1 << q;
            }
        }
        let sign = if s.count_ones() % 2 == 0 { 1 } else { -1 };
        p.add_term(Monomial(m), rational::int(sign));
    }
    Ok(p)
}

/// Induced density of `h` as a polynomial on `n` vertices: the probability
/// that a uniform random `m`-set induces a copy of `h`.
pub fn d_h(h: &Graph, n: usize) -> Result<MultilinearPoly> {
    if h.vertex_count() > n {
        return Err(Error::Budget(format!("graph on {} vertices does not fit in {n}", h.vertex_count())));
    }
    let id: Vec<usize> = (0..h.vertex_count()).collect();
    let c = rational::int(distinct_labelings(h, 0) as i64);
    Ok(p_h(h, &id, n)?.symmetrize_full().scale(&c))
}

/// Number of distinct graphs obtained by permuting the vertices
/// `fixed..m` of `g`, i.e. `(m − fixed)! / |Aut|` for label-fixing
/// automorphisms. Averaging `p_h` over injections counts each induced copy
/// `|Aut|` times; multiplying by this factor turns averages into
/// probabilities.
pub fn distinct_labelings(g: &Graph, fixed: usize) -> usize {
    let m = g.vertex_count();
    let tables: Vec<Vec<u8>> = (fixed..m.saturating_sub(1))
        .map(|i| pair_permutation(m, &Permutation::transposition(m, i, i + 1)))
        .collect();
    monomial_orbit(Monomial(g.mask()), &tables).len()
}

fn flag_factor(f: &Flag) -> Rational {
    rational::int(distinct_labelings(f.graph(), f.type_size()) as i64)
}

/// The edge density polynomial `C(n,2)⁻¹ Σ x_ij`.
pub fn edge_density(n: usize) -> MultilinearPoly {
    let w = Rational::new(BigInt::from(1), BigInt::from(pair_count(n)));
    MultilinearPoly::from_terms(n, (0..pair_count(n)).map(|p| (Monomial(1 << p), w.clone())))
}

/// Edge density of a graph.
pub fn graph_density(g: &Graph) -> Rational {
    let p = pair_count(g.vertex_count());
    if p == 0 {
        return Rational::zero();
    }
    rational::frac(g.edge_count() as i64, p as i64)
}

/// An embedding of `f` into `[n]` respecting `theta`: labeled vertices to
/// `Θ`, unlabeled ones to the smallest free vertices.
fn base_embedding(f: &Flag, theta: &Labeling) -> Vec<usize> {
    let mut h = theta.images().to_vec();
    h.extend(theta.free_vertices().into_iter().take(f.size() - f.type_size()));
    h
}

fn check_labeling(f: &Flag, theta: &Labeling) -> Result<()> {
    if theta.t() != f.type_size() {
        return Err(Error::LabelMismatch(format!("labeling of size {} for a flag of type size {}", theta.t(), f.type_size())));
    }
    if theta.n() < f.size() {
        return Err(Error::Parameter(format!("flag of size {} does not fit in {}", f.size(), theta.n())));
    }
    Ok(())
}

/// `d^Θ_F`: probability that `Θ` plus a random `(f−t)`-set induces `F`.
pub fn d_theta_f(f: &Flag, theta: &Labeling) -> Result<MultilinearPoly> {
    check_labeling(f, theta)?;
    let h = base_embedding(f, theta);
    Ok(p_h(f.graph(), &h, theta.n())?.symmetrize(&theta.stabilizer()).scale(&flag_factor(f)))
}

fn check_pair(f: &Flag, g: &Flag, n: usize) -> Result<()> {
    if f.type_size() != g.type_size() || f.type_graph() != g.type_graph() {
        return Err(Error::LabelMismatch("flags have different types".into()));
    }
    if f.size() != g.size() {
        return Err(Error::Parameter("flags have different sizes".into()));
    }
    let need = 2 * f.size() - f.type_size();
    if n < need {
        return Err(Error::Parameter(format!("n = {n} is below 2f − t = {need}")));
    }
    Ok(())
}

/// Symmetrized product `½(p_F^{h1} p_G^{h2} + p_G^{h1} p_F^{h2})` for the
/// base disjoint extensions `h1`, `h2` of `theta`, scaled so that the group
/// average is a probability.
fn base_pair(f: &Flag, g: &Flag, theta: &Labeling) -> Result<MultilinearPoly> {
    let n = theta.n();
    let t = f.type_size();
    let free = theta.free_vertices();
    let k = f.size() - t;
    let mut h1 = theta.images().to_vec();
    h1.extend(&free[..k]);
    let mut h2 = theta.images().to_vec();
    h2.extend(&free[k..2 * k]);
    let a = &p_h(f.graph(), &h1, n)? * &p_h(g.graph(), &h2, n)?;
    let b = &p_h(g.graph(), &h1, n)? * &p_h(f.graph(), &h2, n)?;
    let w = flag_factor(f) * flag_factor(g) * rational::frac(1, 2);
    Ok((&a + &b).scale(&w))
}

/// `d_{F,F'}` on `n` vertices.
pub fn d_pair(f: &Flag, g: &Flag, n: usize) -> Result<MultilinearPoly> {
    check_pair(f, g, n)?;
    let theta = Labeling::identity(n, f.type_size());
    Ok(base_pair(f, g, &theta)?.symmetrize_full())
}

/// `d^Θ_{F,F'}`: the pair density with the labeled vertices fixed by `Θ`.
pub fn d_theta_pair(f: &Flag, g: &Flag, theta: &Labeling) -> Result<MultilinearPoly> {
    check_labeling(f, theta)?;
    check_pair(f, g, theta.n())?;
    Ok(base_pair(f, g, theta)?.symmetrize(&theta.stabilizer()))
}

/// `err^Θ_{F,F'} = d^Θ_F d^Θ_{F'} − d^Θ_{F,F'}`.
pub fn err_poly(f: &Flag, g: &Flag, theta: &Labeling) -> Result<MultilinearPoly> {
    let prod = &d_theta_f(f, theta)? * &d_theta_f(g, theta)?;
    Ok(&prod - &d_theta_pair(f, g, theta)?)
}

/// `E_Θ` of a family of polynomials that is equivariant in `Θ`
/// (`q(σΘ) = σ·q(Θ)`): the full symmetrization of the identity-labeling value.
pub fn expectation_over_labelings(q_at_identity: &MultilinearPoly) -> MultilinearPoly {
    q_at_identity.symmetrize_full()
}

/// `vᵀ Q v` for a vector of polynomials.
pub fn quadratic_form(v: &[MultilinearPoly], q: &[Vec<Rational>]) -> MultilinearPoly {
    let n = v[0].n();
    let mut out = MultilinearPoly::zero(n);
    for i in 0..v.len() {
        for j in i..v.len() {
            let c = &q[i][j];
            if c.is_zero() {
                continue;
            }
            let w = if i == j { c.clone() } else { c * rational::int(2) };
            out.add_scaled(&(&v[i] * &v[j]), &w);
        }
    }
    out
}

/// `d_{F,F'}(1_H)` by counting embedding pairs into the host `h`.
pub fn pair_density_value(f: &Flag, g: &Flag, host: &Graph) -> Result<Rational> {
    let m = host.vertex_count();
    check_pair(f, g, m)?;
    let t = f.type_size();
    let k = f.size() - t;
    let mut hits: u64 = 0;
    let mut total: u64 = 0;
    for theta in injections(t, m, 0) {
        if host.induced(&theta) != *f.type_graph().graph() {
            total += count_extension_pairs(m, t, k);
            continue;
        }
        let used: u32 = theta.iter().fold(0, |a, &v| a | 1 << v);
        for e1 in injections(k, m, used) {
            let mut h1 = theta.clone();
            h1.extend(&e1);
            let sub1 = host.induced(&h1);
            let in_f = sub1 == *f.graph();
            let in_g = sub1 == *g.graph();
            let used2 = e1.iter().fold(used, |a, &v| a | 1 << v);
            for e2 in injections(k, m, used2) {
                total += 1;
                if !in_f && !in_g {
                    continue;
                }
                let mut h2 = theta.clone();
                h2.extend(&e2);
                let sub2 = host.induced(&h2);
                // both orders, weight ½ each
                hits += (in_f && sub2 == *g.graph()) as u64 + (in_g && sub2 == *f.graph()) as u64;
            }
        }
    }
    Ok(rational::frac(hits as i64, 2 * total as i64) * flag_factor(f) * flag_factor(g))
}

fn count_extension_pairs(m: usize, t: usize, k: usize) -> u64 {
    let fall = |a: usize, b: usize| (0..b).map(|i| (a - i) as u64).product::<u64>();
    fall(m - t, k) * fall(m - t - k, k)
}

/// Exact coefficients `d_{F,F'}(1_H)` for every flag pair and host.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDensityTable {
    pub flags: Vec<Flag>,
    pub hosts: Vec<Graph>,
    /// `entries[i][j][k] = d_{F_i,F_j}(1_{H_k})`.
    pub entries: Vec<Vec<Vec<Rational>>>,
}

pub fn pair_density_table(flags: &[Flag], hosts: &[Graph]) -> Result<PairDensityTable> {
    if flags.is_empty() || hosts.is_empty() {
        return Err(Error::Parameter("empty flag or host list".into()));
    }
    let f = &flags[0];
    let m = hosts[0].vertex_count();
    if m < 2 * f.size() - f.type_size() {
        return Err(Error::Parameter(format!("host size {m} is below 2f − t = {}", 2 * f.size() - f.type_size())));
    }
    let k = flags.len();
    let triples: Vec<(usize, usize, usize)> = (0..k)
        .flat_map(|i| (i..k).flat_map(move |j| (0..hosts.len()).map(move |h| (i, j, h))))
        .collect();
    let values = par::map(&triples, |&(i, j, h)| pair_density_value(&flags[i], &flags[j], &hosts[h]));
    let mut entries = vec![vec![vec![Rational::zero(); hosts.len()]; k]; k];
    for (&(i, j, h), v) in triples.iter().zip(values) {
        let v = v?;
        entries[j][i][h] = v.clone();
        entries[i][j][h] = v;
    }
    Ok(PairDensityTable { flags: flags.to_vec(), hosts: hosts.to_vec(), entries })
}

impl PairDensityTable {
    /// `a_H = Σ_{F,F'} Q_{F,F'} c[F,F'][H]`.
    pub fn contributions(&self, q: &[Vec<Rational>]) -> Vec<Rational> {
        (0..self.hosts.len())
            .map(|h| {
                let mut s = Rational::zero();
                for i in 0..self.flags.len() {
                    for j in 0..self.flags.len() {
                        s += &q[i][j] * &self.entries[i][j][h];
                    }
                }
                s
            })
            .collect()
    }

    pub fn to_json(&self) -> TableJson {
        let mut entries = Vec::new();
        for i in 0..self.flags.len() {
            for j in 0..self.flags.len() {
                for h in 0..self.hosts.len() {
                    entries.push(EntryJson { f: i, fp: j, h, value: rational::to_string(&self.entries[i][j][h]) });
                }
            }
        }
        TableJson {
            flags: self.flags.iter().map(GraphJson::from_flag).collect(),
            hosts: self.hosts.iter().map(GraphJson::from).collect(),
            entries,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EntryJson {
    #[serde(rename = "F")]
    pub f: usize,
    #[serde(rename = "Fp")]
    pub fp: usize,
    #[serde(rename = "H")]
    pub h: usize,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TableJson {
    pub flags: Vec<GraphJson>,
    pub hosts: Vec<GraphJson>,
    pub entries: Vec<EntryJson>,
}
