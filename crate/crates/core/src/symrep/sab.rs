//! Symmetry-adapted bases of the multilinear polynomials of degree ≤ d,
//! isotypic projections and the `Y_λ` matrices of the block SDP.
//!
//! For each `λ` the first tableau space `W_1` is the image of
//! `P_11 = (n_λ/n!) Σ_σ B(σ⁻¹)_11 σ` (seminormal `B`), orthogonalized
//! exactly. Companion spaces are reached through adjacent transpositions:
//! if column `k` of `B(s_i)` is `(1/r) e_k + c e_l`, then
//! `u_l = (s_i·u_k − u_k/r) / c`. Every block is rescaled to primitive
//! integer coefficients by one positive factor, so the representing
//! matrices keep the form `⊕ B'(σ) ⊗ I` with `B'` diagonally similar to `B`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::character::{character, class_size};
use super::partition::{partitions, Partition};
use super::tableau::Tableau;
use super::young::{row_times_sparse, YoungBasis};
use crate::error::{Error, Result};
use crate::graph::pair_count;
use crate::par;
use crate::perm::Permutation;
use crate::poly::{monomial_orbit, pair_permutation, permute_mask, Monomial, MultilinearPoly, PolyJson};
use crate::rational::{self, factorial, Rational};

/// All of `S_n` in breadth-first order from the identity (each element is
/// `s_i ∘ parent`), with variable tables and conjugacy classes.
#[derive(Debug)]
pub struct SymGroup {
    n: usize,
    elements: Vec<Permutation>,
    tables: Vec<Vec<u8>>,
    parent: Vec<(usize, usize)>,
    class: Vec<usize>,
    classes: Vec<Partition>,
}

impl SymGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n > 8 {
            return Err(Error::Budget(format!("explicit S_n limited to n ≤ 8, got {n}")));
        }
        let gens: Vec<Permutation> = (0..n.saturating_sub(1)).map(|i| Permutation::transposition(n, i, i + 1)).collect();
        let id = Permutation::identity(n);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut elements = vec![id];
        let mut parent = vec![(0, 0)];
        let mut head = 0;
        while head < elements.len() {
            for (i, g) in gens.iter().enumerate() {
                let q = g.compose(&elements[head]);
                if seen.insert(q.clone()) {
                    elements.push(q);
                    parent.push((head, i));
                }
            }
            head += 1;
        }
        let classes = partitions(n);
        let lookup: HashMap<Vec<usize>, usize> = classes.iter().enumerate().map(|(k, c)| (c.parts().to_vec(), k)).collect();
        let class = elements.iter().map(|e| lookup[&e.cycle_type()]).collect();
        let tables = elements.iter().map(|e| pair_permutation(n, e)).collect();
        Ok(SymGroup { n, elements, tables, parent, class, classes })
    }

    /// Shared instance per degree.
    pub fn cached(n: usize) -> Result<Arc<SymGroup>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SymGroup>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(g) = cache.lock().unwrap().get(&n) {
            return Ok(g.clone());
        }
        let g = Arc::new(SymGroup::new(n)?);
        cache.lock().unwrap().insert(n, g.clone());
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn tables(&self) -> &[Vec<u8>] {
        &self.tables
    }

    pub fn classes(&self) -> &[Partition] {
        &self.classes
    }

    pub fn class_of(&self, k: usize) -> usize {
        self.class[k]
    }

    /// `e_1ᵀ B(σ⁻¹)` for every element, in seminormal form.
    fn first_rows(&self, yb: &YoungBasis) -> Vec<Vec<Rational>> {
        let gens: Vec<_> = (0..self.n.saturating_sub(1)).map(|i| yb.seminormal_generator(i)).collect();
        let d = yb.dim();
        let mut rows = Vec::with_capacity(self.order());
        let mut e0 = vec![Rational::zero(); d];
        e0[0] = rational::one();
        rows.push(e0);
        // σ' = s_i∘σ gives B(σ'⁻¹) = B(σ⁻¹) B(s_i)
        for k in 1..self.order() {
            let (p, i) = self.parent[k];
            let r = row_times_sparse(&rows[p], &gens[i]);
            rows.push(r);
        }
        rows
    }
}

/// Common denominator form of a rational vector as `i128` numerators.
fn integerize(v: &[Rational]) -> Result<(Vec<i128>, BigInt)> {
    let mut l = BigInt::one();
    for c in v {
        l = l.lcm(c.denom());
    }
    let ints = v
        .iter()
        .map(|c| (c.numer() * (&l / c.denom())).to_i128())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Budget("coefficients exceed 128-bit accumulation".into()))?;
    Ok((ints, l))
}

/// Positive `s` with `p/s` integral and primitive for every `p` jointly.
fn common_content(polys: &[MultilinearPoly]) -> Rational {
    let mut l = BigInt::one();
    for p in polys {
        for c in p.terms().values() {
            l = l.lcm(c.denom());
        }
    }
    let mut g = BigInt::zero();
    for p in polys {
        for c in p.terms().values() {
            g = g.gcd(&(c.numer() * (&l / c.denom())));
        }
    }
    if g.is_zero() {
        return rational::one();
    }
    Rational::new(g.abs(), l)
}

/// Projection `(n_λ/n!) Σ_σ χ_λ(σ) σ·p` onto the isotypic component `V_λ`.
pub fn isotypic_projection(p: &MultilinearPoly, lambda: &Partition) -> Result<MultilinearPoly> {
    let n = p.n();
    if lambda.n() != n {
        return Err(Error::Parameter(format!("{lambda} is not a partition of {n}")));
    }
    let g = SymGroup::cached(n)?;
    isotypic_projection_with(&g, p, lambda)
}

pub fn isotypic_projection_with(g: &SymGroup, p: &MultilinearPoly, lambda: &Partition) -> Result<MultilinearPoly> {
    if p.is_zero() {
        return Ok(p.clone());
    }
    let chi: Vec<i128> = g.classes.iter().map(|c| character(lambda, c).map(i128::from)).collect::<Result<_>>()?;
    let coeffs: Vec<Rational> = p.terms().values().cloned().collect();
    let masks: Vec<u64> = p.terms().keys().map(|m| m.0).collect();
    let (ints, l) = integerize(&coeffs)?;
    let mut acc: HashMap<u64, i128> = HashMap::new();
    for (k, table) in g.tables.iter().enumerate() {
        let w = chi[g.class[k]];
        if w == 0 {
            continue;
        }
        for (m, a) in masks.iter().zip(&ints) {
            *acc.entry(permute_mask(*m, table)).or_insert(0) += w * a;
        }
    }
    let scale = Rational::new(BigInt::from(lambda.dimension()), BigInt::from(g.order()) * l);
    Ok(MultilinearPoly::from_terms(
        p.n(),
        acc.into_iter().filter(|(_, v)| *v != 0).map(|(m, v)| (Monomial(m), Rational::from_integer(BigInt::from(v)) * &scale)),
    ))
}

/// Average `(1/n!) Σ_σ σ·p`, computed from the explicit group.
pub fn group_average(g: &SymGroup, p: &MultilinearPoly) -> MultilinearPoly {
    let mut acc: HashMap<u64, Rational> = HashMap::new();
    for table in &g.tables {
        for (m, c) in p.terms() {
            *acc.entry(permute_mask(m.0, table)).or_insert_with(Rational::zero) += c;
        }
    }
    let w = Rational::new(BigInt::one(), BigInt::from(g.order()));
    MultilinearPoly::from_terms(p.n(), acc.into_iter().map(|(m, c)| (Monomial(m), c * &w)))
}

/// All squarefree monomials of degree ≤ `d` in `C(n,2)` variables, sorted.
pub fn monomials_up_to(n: usize, d: usize) -> Vec<Monomial> {
    let pc = pair_count(n);
    let mut out = vec![Monomial::ONE];
    fn rec(start: usize, left: usize, cur: u64, pc: usize, out: &mut Vec<Monomial>) {
        for p in start..pc {
            let m = cur | 1 << p;
            out.push(Monomial(m));
            if left > 1 {
                rec(p + 1, left - 1, m, pc, out);
            }
        }
    }
    if d > 0 {
        rec(0, d, 0, pc, &mut out);
    }
    out.sort();
    out
}

/// Orbits of monomials of degree ≤ `d` under `S_n`, in order of their
/// smallest element.
fn monomial_orbits(n: usize, d: usize) -> Vec<Vec<Monomial>> {
    let gens: Vec<Vec<u8>> = (0..n.saturating_sub(1)).map(|i| pair_permutation(n, &Permutation::transposition(n, i, i + 1))).collect();
    let mut done = HashSet::new();
    let mut out = Vec::new();
    for m in monomials_up_to(n, d) {
        if done.contains(&m) {
            continue;
        }
        let orbit = monomial_orbit(m, &gens);
        done.extend(orbit.iter().copied());
        out.push(orbit);
    }
    out
}

/// Multiplicity of `S^λ` in the permutation module on one monomial orbit.
fn orbit_multiplicity(lambda: &Partition, orbit: &[Monomial]) -> Result<usize> {
    let n = lambda.n();
    let mut acc = BigInt::zero();
    for c in partitions(n) {
        let rep = Permutation::with_cycle_type(c.parts());
        let table = pair_permutation(n, &rep);
        let fixed = orbit.iter().filter(|m| permute_mask(m.0, &table) == m.0).count();
        acc += BigInt::from(class_size(&c)) * character(lambda, &c)? * BigInt::from(fixed);
    }
    let (q, r) = acc.div_rem(&BigInt::from(factorial(n as u64)));
    debug_assert!(r.is_zero());
    Ok(q.to_usize().unwrap())
}

/// Basis polynomials for one `(λ, τ)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SabBlock {
    pub partition: Partition,
    pub tableau: Tableau,
    pub polys: Vec<MultilinearPoly>,
    pub norm2: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SabBasis {
    n: usize,
    d: usize,
    blocks: Vec<SabBlock>,
}

/// One basis element in `(λ, copy, tableau)` order.
#[derive(Clone, Copy, Debug)]
pub struct BasisEntry<'a> {
    pub partition: &'a Partition,
    pub copy: usize,
    pub tableau: usize,
    pub poly: &'a MultilinearPoly,
    pub norm2: &'a Rational,
}

impl SabBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn blocks(&self) -> &[SabBlock] {
        &self.blocks
    }

    /// Distinct partitions in block order.
    pub fn partitions(&self) -> Vec<Partition> {
        let mut out: Vec<Partition> = Vec::new();
        for b in &self.blocks {
            if out.last() != Some(&b.partition) {
                out.push(b.partition.clone());
            }
        }
        out
    }

    pub fn blocks_of(&self, lambda: &Partition) -> Vec<&SabBlock> {
        self.blocks.iter().filter(|b| &b.partition == lambda).collect()
    }

    pub fn multiplicity(&self, lambda: &Partition) -> usize {
        self.blocks_of(lambda).first().map_or(0, |b| b.polys.len())
    }

    /// Total number of basis polynomials.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.polys.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Basis ordered by partition, then copy `j`, then tableau `k`, so that
    /// representing matrices are `⊕_λ I_{m_λ} ⊗ B'_λ(σ)`.
    pub fn ordered(&self) -> Vec<BasisEntry<'_>> {
        let mut out = Vec::with_capacity(self.len());
        for lambda in self.partitions() {
            let bl = self.blocks_of(&lambda);
            let m = bl[0].polys.len();
            for j in 0..m {
                for (k, b) in bl.iter().enumerate() {
                    out.push(BasisEntry { partition: &b.partition, copy: j, tableau: k, poly: &b.polys[j], norm2: &b.norm2[j] });
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> SabJson {
        SabJson {
            n: self.n,
            d: self.d,
            blocks: self
                .blocks
                .iter()
                .map(|b| SabBlockJson {
                    partition: b.partition.clone(),
                    tableau: b.tableau.clone(),
                    polys: b.polys.iter().map(|p| p.to_json()).collect(),
                    norm2: b.norm2.iter().map(rational::to_string).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SabBlockJson {
    pub partition: Partition,
    pub tableau: Tableau,
    pub polys: Vec<PolyJson>,
    pub norm2: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SabJson {
    pub n: usize,
    pub d: usize,
    pub blocks: Vec<SabBlockJson>,
}

impl SabJson {
    pub fn to_basis(&self) -> Result<SabBasis> {
        let mut blocks = Vec::new();
        for b in &self.blocks {
            let polys = b.polys.iter().map(|p| p.to_poly()).collect::<Result<Vec<_>>>()?;
            let norm2 = b.norm2.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>()?;
            if polys.len() != norm2.len() || polys.iter().any(|p| p.n() != self.n) {
                return Err(Error::Parse("inconsistent basis block".into()));
            }
            blocks.push(SabBlock { partition: b.partition.clone(), tableau: b.tableau.clone(), polys, norm2 });
        }
        Ok(SabBasis { n: self.n, d: self.d, blocks })
    }
}

/// Symmetry-adapted basis restricted to the given partitions (all
/// partitions of `n` if the list is empty).
pub fn symmetry_adapted_basis(n: usize, d: usize, restrict_to: &[Partition]) -> Result<SabBasis> {
    if n > 7 || d > 2 {
        return Err(Error::Budget(format!("symmetry-adapted bases limited to n ≤ 7, d ≤ 2 (got n={n}, d={d})")));
    }
    if n < 2 {
        return Err(Error::Parameter("need at least two vertices".into()));
    }
    let mut lambdas: Vec<Partition> = if restrict_to.is_empty() { partitions(n) } else { restrict_to.to_vec() };
    if let Some(bad) = lambdas.iter().find(|l| l.n() != n) {
        return Err(Error::Parameter(format!("{bad} is not a partition of {n}")));
    }
    lambdas.sort_by(|a, b| b.cmp(a));
    lambdas.dedup();
    let g = SymGroup::cached(n)?;
    let orbits = monomial_orbits(n, d);
    let per: Vec<Result<Vec<SabBlock>>> = par::map(&lambdas, |l| lambda_blocks(&g, &orbits, l));
    let mut blocks = Vec::new();
    for b in per {
        blocks.extend(b?);
    }
    Ok(SabBasis { n, d, blocks })
}

fn lambda_blocks(g: &SymGroup, orbits: &[Vec<Monomial>], lambda: &Partition) -> Result<Vec<SabBlock>> {
    let n = g.n;
    let yb = YoungBasis::new(lambda)?;
    let mut first: Vec<MultilinearPoly> = Vec::new();
    let mults = orbits.iter().map(|o| orbit_multiplicity(lambda, o)).collect::<Result<Vec<_>>>()?;
    if mults.iter().any(|&m| m > 0) {
        let rows = g.first_rows(&yb);
        let a: Vec<Rational> = rows.iter().map(|r| r[0].clone()).collect();
        let (a, _) = integerize(&a)?;
        for (orbit, &want) in orbits.iter().zip(&mults) {
            let mut found: Vec<(MultilinearPoly, Rational)> = Vec::new();
            for m in orbit {
                if found.len() == want {
                    break;
                }
                let mut acc: HashMap<u64, i128> = HashMap::new();
                for (k, table) in g.tables.iter().enumerate() {
                    if a[k] != 0 {
                        *acc.entry(permute_mask(m.0, table)).or_insert(0) += a[k];
                    }
                }
                let mut v = MultilinearPoly::from_terms(
                    n,
                    acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (Monomial(m), Rational::from_integer(BigInt::from(c)))),
                );
                for (w, nw) in &found {
                    let c = v.inner(w) / nw;
                    v.add_scaled(w, &-c);
                }
                if !v.is_zero() {
                    let (v, _) = v.primitive();
                    let nv = v.norm2();
                    found.push((v, nv));
                }
            }
            if found.len() != want {
                return Err(Error::Verification(format!("projection for {lambda} reached rank {} of {want}", found.len())));
            }
            first.extend(found.into_iter().map(|(p, _)| p));
        }
    }
    let tabs = yb.tableaux();
    if first.is_empty() {
        return Ok(vec![SabBlock { partition: lambda.clone(), tableau: tabs[0].clone(), polys: vec![], norm2: vec![] }]);
    }
    let mut spaces: Vec<Option<Vec<MultilinearPoly>>> = vec![None; yb.dim()];
    spaces[0] = Some(first);
    let mut queue = vec![0usize];
    let gens: Vec<_> = (0..n - 1).map(|i| yb.seminormal_generator(i)).collect();
    while let Some(k) = queue.pop() {
        for (i, gen) in gens.iter().enumerate() {
            let col = &gen[k];
            if col.len() != 2 {
                continue;
            }
            let (_, inv_r) = col.iter().find(|(r, _)| *r == k).unwrap();
            let (l, c) = col.iter().find(|(r, _)| *r != k).unwrap();
            if spaces[*l].is_some() {
                continue;
            }
            let s = Permutation::transposition(n, i, i + 1);
            let src = spaces[k].as_ref().unwrap();
            let mut next: Vec<MultilinearPoly> = src
                .iter()
                .map(|u| {
                    let mut v = u.act(&s);
                    v.add_scaled(u, &-inv_r.clone());
                    v.scale(&c.recip())
                })
                .collect();
            let s = common_content(&next);
            next = next.iter().map(|p| p.scale(&s.recip())).collect();
            spaces[*l] = Some(next);
            queue.push(*l);
        }
    }
    Ok(spaces
        .into_iter()
        .zip(tabs)
        .map(|(polys, t)| {
            let polys = polys.expect("tableau graph is connected");
            let norm2 = polys.iter().map(|p| p.norm2()).collect();
            SabBlock { partition: lambda.clone(), tableau: t.clone(), polys, norm2 }
        })
        .collect())
}

/// Symmetric matrix of `S_n`-invariant polynomials `sym(y_τ y_τᵀ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct YMatrix {
    pub partition: Partition,
    pub entries: Vec<Vec<MultilinearPoly>>,
}

impl YMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// `⟨Q, Y⟩ = Σ_ij Q_ij Y_ij`.
    pub fn pair_with(&self, q: &[Vec<Rational>]) -> Result<MultilinearPoly> {
        let m = self.size();
        if q.len() != m || q.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension(format!("Q must be {m}×{m} for {}", self.partition)));
        }
        let n = self.entries[0][0].n();
        let mut out = MultilinearPoly::zero(n);
        for i in 0..m {
            for j in 0..m {
                if !q[i][j].is_zero() {
                    out.add_scaled(&self.entries[i][j], &q[i][j]);
                }
            }
        }
        Ok(out)
    }
}

/// `Y_λ` from the first tableau's block.
pub fn y_matrix(basis: &SabBasis, lambda: &Partition) -> Result<YMatrix> {
    y_matrix_at(basis, lambda, 0)
}

/// `Y_λ` from the block of tableau number `k`.
pub fn y_matrix_at(basis: &SabBasis, lambda: &Partition, k: usize) -> Result<YMatrix> {
    let blocks = basis.blocks_of(lambda);
    let b = blocks.get(k).ok_or_else(|| Error::Parameter(format!("no block {k} for {lambda}")))?;
    if b.polys.is_empty() {
        return Err(Error::Parameter(format!("block for {lambda} is empty")));
    }
    let y = &b.polys;
    let m = y.len();
    let idx: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let vals = par::map(&idx, |&(i, j)| (&y[i] * &y[j]).symmetrize_full());
    let mut entries = vec![vec![MultilinearPoly::zero(basis.n); m]; m];
    for ((i, j), v) in idx.into_iter().zip(vals) {
        entries[j][i] = v.clone();
        entries[i][j] = v;
    }
    Ok(YMatrix { partition: lambda.clone(), entries })
}

/// Coordinates of `p` in the ordered basis, using orthogonality; fails
/// if `p` is not in the span.
pub fn coordinates(basis: &SabBasis, p: &MultilinearPoly) -> Result<Vec<Rational>> {
    let ord = basis.ordered();
    let c: Vec<Rational> = ord.iter().map(|e| p.inner(e.poly) / e.norm2).collect();
    let mut back = MultilinearPoly::zero(p.n());
    for (e, ci) in ord.iter().zip(&c) {
        back.add_scaled(e.poly, ci);
    }
    if back != *p {
        return Err(Error::Dimension("polynomial is not in the span of the basis".into()));
    }
    Ok(c)
}

/// Matrix of `σ` acting on the ordered basis (column `c` holds the
/// coordinates of `σ·b_c`).
pub fn representing_matrix(basis: &SabBasis, sigma: &Permutation) -> Result<Vec<Vec<Rational>>> {
    let ord = basis.ordered();
    let cols = ord.iter().map(|e| coordinates(basis, &e.poly.act(sigma))).collect::<Result<Vec<_>>>()?;
    let d = ord.len();
    Ok((0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect())
}

/// Change of basis: rows indexed by `monomials_up_to(n, d)`, columns by the
/// ordered basis.
pub fn basis_matrix(basis: &SabBasis) -> (Vec<Monomial>, Vec<Vec<Rational>>) {
    let mons = monomials_up_to(basis.n, basis.d);
    let ord = basis.ordered();
    let m = mons.iter().map(|&mo| ord.iter().map(|e| e.poly.coeff(mo)).collect()).collect();
    (mons, m)
}

/// Permutation matrix of `σ` on `monomials` (column `c` has a one in the
/// row of `σ·m_c`).
pub fn monomial_action(n: usize, monomials: &[Monomial], sigma: &Permutation) -> Vec<Vec<Rational>> {
    let table = pair_permutation(n, sigma);
    let pos: HashMap<Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let d = monomials.len();
    let mut out = vec![vec![Rational::zero(); d]; d];
    for (c, m) in monomials.iter().enumerate() {
        out[pos[&Monomial(permute_mask(m.0, &table))]][c] = rational::one();
    }
    out
}

/// `(1/n!) Σ_σ P_σ X P_σᵀ` for a matrix indexed by `monomials`.
pub fn symmetrize_matrix(g: &SymGroup, monomials: &[Monomial], x: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let pos: HashMap<Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let d = monomials.len();
    let mut out = vec![vec![Rational::zero(); d]; d];
    for table in &g.tables {
        let img: Vec<usize> = monomials.iter().map(|m| pos[&Monomial(permute_mask(m.0, table))]).collect();
        for a in 0..d {
            for b in 0..d {
                out[img[a]][img[b]] += &x[a][b];
            }
        }
    }
    let w = Rational::new(BigInt::one(), BigInt::from(g.order()));
    for row in &mut out {
        for v in row.iter_mut() {
            *v *= &w;
        }
    }
    out
}

/// True iff `mat` (in the ordered basis) is `⊕_λ I_{m_λ} ⊗ B_λ` for some
/// `n_λ × n_λ` matrices `B_λ`.
pub fn has_repeated_block_form(basis: &SabBasis, mat: &[Vec<Rational>]) -> bool {
    let ord = basis.ordered();
    let first_of: HashMap<&Partition, usize> = {
        let mut h = HashMap::new();
        for (i, e) in ord.iter().enumerate() {
            h.entry(e.partition).or_insert(i);
        }
        h
    };
    for (r, er) in ord.iter().enumerate() {
        for (c, ec) in ord.iter().enumerate() {
            let v = &mat[r][c];
            if er.partition != ec.partition || er.copy != ec.copy {
                if !v.is_zero() {
                    return false;
                }
                continue;
            }
            let base = first_of[er.partition];
            if *v != mat[base + er.tableau][base + ec.tableau] {
                return false;
            }
        }
    }
    true
}

/// True iff `mat = Mᵀ X M` (ordered basis) has the commutant pattern:
/// zero across partitions and across tableaux, and within each `λ` the
/// `m_λ × m_λ` block at tableau `k` equals the one at tableau 0 times the
/// common norm ratio.
pub fn has_commutant_form(basis: &SabBasis, mat: &[Vec<Rational>]) -> bool {
    let ord = basis.ordered();
    let mut base: HashMap<(&Partition, usize, usize), usize> = HashMap::new();
    for (i, e) in ord.iter().enumerate() {
        base.insert((e.partition, e.copy, e.tableau), i);
    }
    for (r, er) in ord.iter().enumerate() {
        for (c, ec) in ord.iter().enumerate() {
            let v = &mat[r][c];
            if er.partition != ec.partition || er.tableau != ec.tableau {
                if !v.is_zero() {
                    return false;
                }
                continue;
            }
            let r0 = base[&(er.partition, er.copy, 0)];
            let c0 = base[&(ec.partition, ec.copy, 0)];
            let ratio = er.norm2 / ord[r0].norm2;
            if *v != &mat[r0][c0] * &ratio {
                return false;
            }
        }
    }
    true
}

/// `Mᵀ X M` for a change-of-basis matrix `m` (rows monomials).
pub fn congruence(m: &[Vec<Rational>], x: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let xm: Vec<Vec<Rational>> = (0..rows)
        .map(|a| (0..cols).map(|c| (0..rows).filter(|&b| !m[b][c].is_zero()).fold(Rational::zero(), |s, b| s + &x[a][b] * &m[b][c])).collect())
        .collect();
    (0..cols)
        .map(|r| (0..cols).map(|c| (0..rows).filter(|&a| !m[a][r].is_zero()).fold(Rational::zero(), |s, a| s + &m[a][r] * &xm[a][c])).collect())
        .collect()
}

/// Dimension of the span of the given polynomials.
pub fn rank(polys: &[MultilinearPoly]) -> usize {
    let mut found: Vec<(MultilinearPoly, Rational)> = Vec::new();
    for p in polys {
        let mut v = p.clone();
        for (w, nw) in &found {
            let c = v.inner(w) / nw;
            v.add_scaled(w, &-c);
        }
        if !v.is_zero() {
            let nv = v.norm2();
            found.push((v, nv));
        }
    }
    found.len()
}

/// Partitions `μ` for which `p` has a nonzero isotypic component.
pub fn isotypic_support(p: &MultilinearPoly) -> Result<BTreeSet<Partition>> {
    let g = SymGroup::cached(p.n())?;
    let mut out = BTreeSet::new();
    for l in partitions(p.n()) {
        if !isotypic_projection_with(&g, p, &l)?.is_zero() {
            out.insert(l);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pair_index;
    use crate::symrep::character::{multilinear_dimension, multiplicity};
    use crate::symrep::tableau::kostka;
    use crate::symrep::young::yor_matrices;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn edge_sum(n: usize) -> MultilinearPoly {
        let mut s = MultilinearPoly::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                s = &s + &MultilinearPoly::var(n, i, j);
            }
        }
        s
    }

    #[test]
    fn counts_match_dimension() {
        for n in 3..=6 {
            for d in 0..=2 {
                if n == 6 && d == 2 {
                    continue;
                }
                let b = symmetry_adapted_basis(n, d, &[]).unwrap();
                assert_eq!(b.len() as u64, multilinear_dimension(n, d));
                for l in partitions(n) {
                    assert_eq!(b.multiplicity(&l) as u64, multiplicity(&l, n, d).unwrap(), "n={n} d={d} {l}");
                    let nb = b.blocks_of(&l).len();
                    assert_eq!(nb as u64, if b.multiplicity(&l) > 0 { l.dimension() } else { 1 });
                }
            }
        }
    }

    #[test]
    fn trivial_block_is_constant_and_edge_sum() {
        for n in 4..=7 {
            let b = symmetry_adapted_basis(n, 1, &[Partition::trivial(n)]).unwrap();
            let polys = &b.blocks()[0].polys;
            assert_eq!(polys.len(), 2);
            assert_eq!(polys[0], MultilinearPoly::one(n));
            assert_eq!(polys[1], edge_sum(n));
            assert_eq!(b.blocks()[0].norm2[1], rational::int(pair_count(n) as i64));
        }
    }

    #[test]
    fn standard_block_matches_displayed_polynomial() {
        for n in 4..=7 {
            let b = symmetry_adapted_basis(n, 1, &[p(&[n - 1, 1])]).unwrap();
            let blk = b.blocks_of(&p(&[n - 1, 1]));
            assert_eq!(blk[0].tableau, Tableau::superstandard(&p(&[n - 1, 1])));
            // Σ_{i<j<n} x_ij − ((n−2)/2) Σ_i x_in, up to scale
            let mut want = MultilinearPoly::zero(n);
            let h = rational::frac(n as i64 - 2, 2);
            for i in 0..n - 1 {
                for j in i + 1..n - 1 {
                    want.add_term(Monomial::var(n, i, j), rational::one());
                }
                want.add_term(Monomial::var(n, i, n - 1), -h.clone());
            }
            let got = &blk[0].polys[0];
            let s = got.inner(&want) / want.norm2();
            assert_eq!(*got, want.scale(&s));
            let nb = (rational::binomial(n as u64 - 1, 2) as i64, (n as i64 - 1) * (n as i64 - 2).pow(2));
            assert_eq!(want.norm2(), rational::int(nb.0) + rational::frac(nb.1, 4));
        }
    }

    #[test]
    fn blocks_are_orthogonal_and_isotypic() {
        let b = symmetry_adapted_basis(5, 2, &[]).unwrap();
        let ord = b.ordered();
        for (i, a) in ord.iter().enumerate() {
            assert_eq!(a.poly.norm2(), *a.norm2);
            for c in ord.iter().skip(i + 1) {
                assert!(a.poly.inner(c.poly).is_zero());
            }
        }
        let g = SymGroup::cached(5).unwrap();
        for blk in b.blocks().iter().step_by(3) {
            for poly in &blk.polys {
                for l in partitions(5) {
                    let pr = isotypic_projection_with(&g, poly, &l).unwrap();
                    if l == blk.partition {
                        assert_eq!(pr, *poly);
                    } else {
                        assert!(pr.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn two_two_block_at_four() {
        let b = symmetry_adapted_basis(4, 1, &[]).unwrap();
        let l = p(&[2, 2]);
        assert_eq!(b.multiplicity(&l), 1);
        for blk in b.blocks_of(&l) {
            for other in b.blocks().iter().filter(|o| o.partition != l) {
                for q in &other.polys {
                    assert!(blk.polys[0].inner(q).is_zero());
                }
            }
        }
    }

    /// Seminormal vectors are joint eigenvectors of the Jucys–Murphy
    /// elements `X_j = Σ_{i<j} (i j)` with eigenvalue the content of `j`.
    #[test]
    fn jucys_murphy_eigenvalues() {
        for (n, d) in [(4, 2), (5, 1), (5, 2)] {
            let b = symmetry_adapted_basis(n, d, &[]).unwrap();
            for blk in b.blocks() {
                let contents = blk.tableau.contents();
                for u in &blk.polys {
                    for j in 1..n {
                        let mut x = MultilinearPoly::zero(n);
                        for i in 0..j {
                            x = &x + &u.act(&Permutation::transposition(n, i, j));
                        }
                        assert_eq!(x, u.scale(&rational::int(contents[j])), "{} {:?}", blk.partition, blk.tableau);
                    }
                }
            }
        }
    }

    #[test]
    fn representing_matrices_have_block_form() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for n in [4, 5] {
            let b = symmetry_adapted_basis(n, 1, &[]).unwrap();
            let (_, m) = basis_matrix(&b);
            let mons = monomials_up_to(n, 1);
            let dim = mons.len();
            let mf = DMatrix::from_fn(dim, dim, |r, c| rational::to_f64(&m[r][c]));
            let minv = mf.clone().try_inverse().unwrap();
            let norms: Vec<f64> = b.ordered().iter().map(|e| rational::to_f64(e.norm2).sqrt()).collect();
            for _ in 0..20 {
                let s = Permutation::random(n, &mut rng);
                let rep = representing_matrix(&b, &s).unwrap();
                assert!(has_repeated_block_form(&b, &rep));
                let pf = monomial_action(n, &mons, &s);
                let pf = DMatrix::from_fn(dim, dim, |r, c| rational::to_f64(&pf[r][c]));
                let fl = &minv * pf * &mf;
                for r in 0..dim {
                    for c in 0..dim {
                        assert!((fl[(r, c)] - rational::to_f64(&rep[r][c])).abs() < 1e-9);
                    }
                }
                // normalized columns give exactly Young's orthogonal form
                let ord = b.ordered();
                let mut start = 0;
                while start < dim {
                    let l = ord[start].partition;
                    let nl = l.dimension() as usize;
                    let y = yor_matrices(l, &s).unwrap();
                    for r in 0..nl {
                        for c in 0..nl {
                            let v = fl[(start + r, start + c)] * norms[start + r] / norms[start + c];
                            assert!((v - y[(r, c)]).abs() < 1e-9);
                        }
                    }
                    start += nl;
                }
            }
        }
    }

    #[test]
    fn symmetrized_matrix_has_commutant_form() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for n in [4, 5] {
            let b = symmetry_adapted_basis(n, 1, &[]).unwrap();
            let (mons, m) = basis_matrix(&b);
            let dim = mons.len();
            let mut x = vec![vec![Rational::zero(); dim]; dim];
            for r in 0..dim {
                for c in r..dim {
                    let v = rational::int(rng.random_range(-9..=9));
                    x[r][c] = v.clone();
                    x[c][r] = v;
                }
            }
            let g = SymGroup::cached(n).unwrap();
            let xs = symmetrize_matrix(&g, &mons, &x);
            for _ in 0..5 {
                let s = Permutation::random(n, &mut rng);
                let pm = monomial_action(n, &mons, &s);
                let lhs: Vec<Vec<Rational>> =
                    (0..dim).map(|r| (0..dim).map(|c| (0..dim).fold(Rational::zero(), |a, k| a + &pm[r][k] * &xs[k][c])).collect()).collect();
                let rhs: Vec<Vec<Rational>> =
                    (0..dim).map(|r| (0..dim).map(|c| (0..dim).fold(Rational::zero(), |a, k| a + &xs[r][k] * &pm[k][c])).collect()).collect();
                assert_eq!(lhs, rhs);
            }
            assert!(has_commutant_form(&b, &congruence(&m, &xs)));
            assert!(!has_commutant_form(&b, &congruence(&m, &x)));
        }
    }

    #[test]
    fn y_matrices() {
        let n = 5;
        let b = symmetry_adapted_basis(n, 1, &[Partition::trivial(n), p(&[4, 1])]).unwrap();
        let y0 = y_matrix(&b, &Partition::trivial(n)).unwrap();
        let s = edge_sum(n);
        assert_eq!(y0.entries[0][1], s);
        assert_eq!(y0.entries[1][1], &s * &s);
        let l = p(&[4, 1]);
        let y = y_matrix(&b, &l).unwrap();
        // (1/n) Σ_i p_{1,i}² with p_{1,i} the image under the transposition (i n)
        let pn = &b.blocks_of(&l)[0].polys[0];
        let mut avg = MultilinearPoly::zero(n);
        for i in 0..n {
            let q = if i == n - 1 { pn.clone() } else { pn.act(&Permutation::transposition(n, i, n - 1)) };
            avg.add_scaled(&(&q * &q), &rational::frac(1, n as i64));
        }
        assert_eq!(y.entries[0][0], avg);
        let blocks = b.blocks_of(&l);
        for k in 1..blocks.len() {
            let yk = y_matrix_at(&b, &l, k).unwrap();
            let ratio = &blocks[k].norm2[0] / &blocks[0].norm2[0];
            assert_eq!(yk.entries[0][0], y.entries[0][0].scale(&ratio));
        }
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for _ in 0..20 {
            let s = Permutation::random(n, &mut rng);
            assert!(y.entries[0][0].is_invariant_under(&s));
            assert!(y0.entries[1][1].is_invariant_under(&s));
        }
        assert!(y_matrix(&b, &p(&[3, 2])).is_err());
    }

    #[test]
    fn y_matrix_independent_of_tableau_degree_two() {
        let n = 5;
        let l = p(&[3, 2]);
        let b = symmetry_adapted_basis(n, 2, &[l.clone()]).unwrap();
        let blocks = b.blocks_of(&l);
        assert!(b.multiplicity(&l) >= 2);
        let y = y_matrix(&b, &l).unwrap();
        for k in [1, blocks.len() - 1] {
            let yk = y_matrix_at(&b, &l, k).unwrap();
            let ratio = &blocks[k].norm2[0] / &blocks[0].norm2[0];
            for i in 0..y.size() {
                assert_eq!(&blocks[k].norm2[i] / &blocks[0].norm2[i], ratio);
                for j in 0..y.size() {
                    assert_eq!(yk.entries[i][j], y.entries[i][j].scale(&ratio));
                }
            }
        }
    }

    #[test]
    fn cross_terms_vanish() {
        let n = 4;
        let b = symmetry_adapted_basis(n, 2, &[]).unwrap();
        let ord = b.ordered();
        for (i, a) in ord.iter().enumerate() {
            for c in ord.iter().skip(i + 1) {
                let s = (a.poly * c.poly).symmetrize_full();
                if a.partition != c.partition {
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn young_rule_on_hooks() {
        // R-invariants of V_μ at d = 1 have dimension m_μ · K_{μ,λ}
        for n in 4..=5 {
            for t in 0..n {
                let lam = Partition::hook(n, t);
                let tab = Tableau::superstandard(&lam);
                let rg = tab.row_group();
                let mons = monomials_up_to(n, 1);
                let avg: Vec<MultilinearPoly> =
                    mons.iter().map(|m| MultilinearPoly::from_terms(n, [(*m, rational::one())]).symmetrize(&rg)).collect();
                for mu in partitions(n) {
                    let proj: Vec<MultilinearPoly> = avg.iter().map(|a| isotypic_projection(a, &mu).unwrap()).collect();
                    let want = multiplicity(&mu, n, 1).unwrap() * kostka(&mu, &lam).unwrap();
                    assert_eq!(rank(&proj) as u64, want, "n={n} λ={lam} μ={mu}");
                }
            }
        }
    }

    #[test]
    fn projections_sum_to_identity() {
        let n = 5;
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        let mut q = MultilinearPoly::zero(n);
        for _ in 0..6 {
            let (i, j) = (rng.random_range(0..n - 1), n - 1);
            q.add_term(Monomial(1 << pair_index(n, i, j) | 1), rational::int(rng.random_range(1..5)));
        }
        let mut total = MultilinearPoly::zero(n);
        for l in partitions(n) {
            total = &total + &isotypic_projection(&q, &l).unwrap();
        }
        assert_eq!(total, q);
        assert_eq!(isotypic_support(&MultilinearPoly::one(n)).unwrap().into_iter().collect::<Vec<_>>(), vec![Partition::trivial(n)]);
    }

    #[test]
    fn json_round_trip() {
        let b = symmetry_adapted_basis(4, 1, &[]).unwrap();
        let j = serde_json::to_string(&b.to_json()).unwrap();
        let back: SabJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_basis().unwrap(), b);
        assert!(j.starts_with("{\"n\":4,\"d\":1,\"blocks\":[{\"partition\":[4],\"tableau\":[[1,2,3,4]]"));
    }

    #[test]
    fn group_average_matches_orbit_method() {
        let g = SymGroup::cached(5).unwrap();
        let mut q = MultilinearPoly::var(5, 0, 1);
        q.add_term(Monomial(0b1000_0000_11), rational::frac(2, 3));
        assert_eq!(group_average(&g, &q), q.symmetrize_full());
    }
}
