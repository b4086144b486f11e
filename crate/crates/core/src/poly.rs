//! Exact multilinear polynomials in the edge variables `x_ij`, kept in
//! normal form modulo `x_ij² = x_ij`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, pair_index, pair_of_index, CharVector};
use crate::perm::{PermGroup, Permutation};
use crate::rational::{self, Rational};

/// A squarefree monomial; bit `p` set means variable `p` divides it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(n: usize, i: usize, j: usize) -> Self {
        Monomial(1 << pair_index(n, i, j))
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    /// Product modulo `x² = x`.
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    /// Value at a 0/1 point: 1 iff every variable is set.
    #[inline]
    pub fn eval(self, bits: u64) -> bool {
        self.0 & !bits == 0
    }

    /// 0-based variable pairs in index order.
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        (0..64).filter(|p| self.0 >> p & 1 == 1).map(|p| pair_of_index(n, p)).collect()
    }
}

/// Graded lexicographic order on sorted variable-index lists.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 >> diff.trailing_zeros() & 1 == 1 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Image of each variable index under a vertex permutation.
pub fn pair_permutation(n: usize, sigma: &Permutation) -> Vec<u8> {
    (0..pair_count(n))
        .map(|p| {
            let (i, j) = pair_of_index(n, p);
            pair_index(n, sigma.apply(i), sigma.apply(j)) as u8
        })
        .collect()
}

#[inline]
pub fn permute_mask(mask: u64, table: &[u8]) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let p = m.trailing_zeros() as usize;
        out |= 1 << table[p];
        m &= m - 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPoly {
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultilinearPoly {
    pub fn zero(n: usize) -> Self {
        assert!(pair_count(n) <= 64);
        MultilinearPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, rational::one())
    }

    pub fn var(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::var(n, i, j), rational::one());
        p
    }

    /// `1 − x_ij`.
    pub fn one_minus_var(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::one(n);
        p.add_term(Monomial::var(n, i, j), -rational::one());
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &MultilinearPoly, s: &Rational) {
        self.check_n(other);
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(*m, c * s);
        }
    }

    pub fn scale(&self, s: &Rational) -> MultilinearPoly {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        MultilinearPoly { n: self.n, terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect() }
    }

    fn check_n(&self, other: &MultilinearPoly) {
        assert_eq!(self.n, other.n, "polynomials live in different rings");
    }

    /// Product reduced modulo `x² = x`.
    pub fn mul_poly(&self, other: &MultilinearPoly) -> MultilinearPoly {
        self.check_n(other);
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *acc.entry(a.mul(*b)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self::from_terms(self.n, acc)
    }

    pub fn evaluate(&self, v: &CharVector) -> Result<Rational> {
        if v.n() != self.n {
            return Err(Error::Dimension(format!("vector for n={} given to polynomial in n={}", v.n(), self.n)));
        }
        Ok(self.eval_bits(v.bits()))
    }

    pub fn eval_bits(&self, bits: u64) -> Rational {
        let mut s = Rational::zero();
        for (m, c) in &self.terms {
            if m.eval(bits) {
                s += c;
            }
        }
        s
    }

    /// `σ·p`: every `x_ij` becomes `x_σ(i)σ(j)`.
    pub fn act(&self, sigma: &Permutation) -> MultilinearPoly {
        assert_eq!(sigma.degree(), self.n);
        let table = pair_permutation(self.n, sigma);
        self.act_table(&table)
    }

    pub fn act_table(&self, table: &[u8]) -> MultilinearPoly {
        MultilinearPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (Monomial(permute_mask(m.0, table)), c.clone())).collect(),
        }
    }

    /// Average over the group generated by `group`, computed orbit by orbit:
    /// the average of `σ·m` over the group is uniform on the orbit of `m`.
    pub fn symmetrize(&self, group: &PermGroup) -> MultilinearPoly {
        assert_eq!(group.degree(), self.n);
        let tables: Vec<Vec<u8>> = group.generators().iter().map(|g| pair_permutation(self.n, g)).collect();
        let mut done: HashSet<Monomial> = HashSet::new();
        let mut out = Self::zero(self.n);
        for m in self.terms.keys() {
            if done.contains(m) {
                continue;
            }
            let orbit = monomial_orbit(*m, &tables);
            let total: Rational = orbit.iter().map(|o| self.coeff(*o)).fold(Rational::zero(), |a, b| a + b);
            let avg = total / Rational::from_integer(BigInt::from(orbit.len()));
            for o in orbit {
                out.add_term(o, avg.clone());
                done.insert(o);
            }
        }
        out
    }

    /// Symmetrization under the full symmetric group on the vertices.
    pub fn symmetrize_full(&self) -> MultilinearPoly {
        self.symmetrize(&PermGroup::symmetric(self.n))
    }

    /// `|G|⁻¹ Σ_{σ∈G} σ·p` over an explicit element list.
    pub fn symmetrize_elements(&self, elements: &[Permutation]) -> MultilinearPoly {
        let mut out = Self::zero(self.n);
        let w = Rational::new(BigInt::one(), BigInt::from(elements.len()));
        for s in elements {
            out.add_scaled(&self.act(s), &w);
        }
        out
    }

    pub fn is_invariant_under(&self, sigma: &Permutation) -> bool {
        self.act(sigma) == *self
    }

    /// Invariance under every generator, hence under the whole group.
    pub fn is_invariant(&self, group: &PermGroup) -> bool {
        group.generators().iter().all(|g| self.is_invariant_under(g))
    }

    /// Sum of coefficient products over common monomials.
    pub fn inner(&self, other: &MultilinearPoly) -> Rational {
        self.check_n(other);
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut s = Rational::zero();
        for (m, c) in &small.terms {
            if let Some(d) = large.terms.get(m) {
                s += c * d;
            }
        }
        s
    }

    pub fn norm2(&self) -> Rational {
        self.inner(self)
    }

    /// Clears denominators and common factors, making the leading
    /// coefficient (largest monomial) positive. Returns the primitive
    /// polynomial and the factor `s` with `self = s · result`.
    pub fn primitive(&self) -> (MultilinearPoly, Rational) {
        if self.is_zero() {
            return (self.clone(), Rational::one());
        }
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c.numer() * (&l / c.denom())));
        }
        let lead = self.terms.values().next_back().unwrap();
        if lead.is_negative() {
            g = -g;
        }
        let s = Rational::new(g, l);
        let inv = s.recip();
        (self.scale(&inv), s)
    }

    pub fn int_eval(&self) -> IntEval {
        IntEval::new(self)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    edges: m.pairs(self.n).into_iter().map(|(i, j)| [i + 1, j + 1]).collect(),
                    coeff: rational::to_string(c),
                })
                .collect(),
        }
    }
}

/// BFS orbit of a monomial under the generator tables, sorted.
pub fn monomial_orbit(m: Monomial, tables: &[Vec<u8>]) -> Vec<Monomial> {
    let mut seen: HashSet<u64> = HashSet::from([m.0]);
    let mut stack = vec![m.0];
    while let Some(x) = stack.pop() {
        for t in tables {
            let y = permute_mask(x, t);
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    let mut v: Vec<Monomial> = seen.into_iter().map(Monomial).collect();
    v.sort();
    v
}

/// True iff `p` and `q` have identical normal forms.
pub fn coeff_equal(p: &MultilinearPoly, q: &MultilinearPoly) -> bool {
    p.n == q.n && p.terms == q.terms
}

impl Add for &MultilinearPoly {
    type Output = MultilinearPoly;
    fn add(self, rhs: &MultilinearPoly) -> MultilinearPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &MultilinearPoly {
    type Output = MultilinearPoly;
    fn sub(self, rhs: &MultilinearPoly) -> MultilinearPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Mul for &MultilinearPoly {
    type Output = MultilinearPoly;
    fn mul(self, rhs: &MultilinearPoly) -> MultilinearPoly {
        self.mul_poly(rhs)
    }
}

impl Neg for &MultilinearPoly {
    type Output = MultilinearPoly;
    fn neg(self) -> MultilinearPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let s = rational::to_string(&c.abs());
            let sign = if c.is_negative() { "-" } else if k > 0 { "+" } else { "" };
            if k > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let vars: Vec<String> = m.pairs(self.n).iter().map(|(i, j)| format!("x{}_{}", i + 1, j + 1)).collect();
            if vars.is_empty() {
                write!(f, "{s}")?;
            } else if c.abs().is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{s}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A product of edge factors with repetitions allowed, before reduction.
#[derive(Clone, Debug, Default)]
pub struct RawPoly {
    pub n: usize,
    pub terms: Vec<(Vec<(usize, usize)>, Rational)>,
}

/// Normal form modulo `x_ij² − x_ij`.
pub fn reduce_boolean(p: &RawPoly) -> MultilinearPoly {
    let mut out = MultilinearPoly::zero(p.n);
    for (factors, c) in &p.terms {
        let m = factors.iter().fold(0u64, |acc, &(i, j)| acc | 1 << pair_index(p.n, i, j));
        out.add_term(Monomial(m), c.clone());
    }
    out
}

/// Integer form `Σ a_m m / D` for fast repeated evaluation at 0/1 points.
#[derive(Clone, Debug)]
pub struct IntEval {
    denom: BigInt,
    small: Option<Vec<(u64, i128)>>,
    big: Vec<(u64, BigInt)>,
}

impl IntEval {
    pub fn new(p: &MultilinearPoly) -> Self {
        let mut l = BigInt::one();
        for c in p.terms.values() {
            l = l.lcm(c.denom());
        }
        let big: Vec<(u64, BigInt)> = p.terms.iter().map(|(m, c)| (m.0, c.numer() * (&l / c.denom()))).collect();
        let fits = big.len() < 1 << 20 && big.iter().all(|(_, a)| a.bits() < 100);
        let small = fits.then(|| big.iter().map(|(m, a)| (*m, a.to_i128().unwrap())).collect());
        IntEval { denom: l, small, big }
    }

    /// Scaled value `D · p(bits)`.
    pub fn numerator(&self, bits: u64) -> BigInt {
        match &self.small {
            Some(v) => {
                let mut s: i128 = 0;
                for (m, a) in v {
                    if m & !bits == 0 {
                        s += a;
                    }
                }
                BigInt::from(s)
            }
            None => self.big.iter().filter(|(m, _)| m & !bits == 0).map(|(_, a)| a.clone()).sum(),
        }
    }

    pub fn is_zero_at(&self, bits: u64) -> bool {
        match &self.small {
            Some(v) => v.iter().filter(|(m, _)| m & !bits == 0).map(|(_, a)| a).sum::<i128>() == 0,
            None => self.numerator(bits).is_zero(),
        }
    }

    pub fn value(&self, bits: u64) -> Rational {
        Rational::new(self.numerator(bits), self.denom.clone())
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub edges: Vec<[usize; 2]>,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn to_poly(&self) -> Result<MultilinearPoly> {
        if pair_count(self.n) > 64 || self.n == 0 {
            return Err(Error::Parse(format!("unsupported n = {}", self.n)));
        }
        let mut p = MultilinearPoly::zero(self.n);
        for t in &self.terms {
            let mut m = 0u64;
            for e in &t.edges {
                if e[0] == 0 || e[0] >= e[1] || e[1] > self.n {
                    return Err(Error::Parse(format!("bad edge {e:?}")));
                }
                m |= 1 << pair_index(self.n, e[0] - 1, e[1] - 1);
            }
            p.add_term(Monomial(m), rational::parse(&t.coeff)?);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use rand::{Rng, SeedableRng};

    fn x(n: usize, i: usize, j: usize) -> MultilinearPoly {
        MultilinearPoly::var(n, i - 1, j - 1)
    }

    #[test]
    fn boolean_reduction_examples() {
        let sq = RawPoly { n: 3, terms: vec![(vec![(0, 1), (0, 1)], rational::one()), (vec![(0, 1)], -rational::one())] };
        assert!(reduce_boolean(&sq).is_zero());
        let om = MultilinearPoly::one_minus_var(3, 0, 1);
        assert_eq!(&om * &om, om);
        let r = RawPoly { n: 3, terms: vec![(vec![(0, 1), (0, 1), (0, 2)], rational::one())] };
        assert_eq!(reduce_boolean(&r), &x(3, 1, 2) * &x(3, 1, 3));
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial(0b011);
        let b = Monomial(0b101);
        let c = Monomial(0b100);
        assert!(c < a && a < b);
        assert!(Monomial::ONE < c);
    }

    #[test]
    fn action_composes() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let p = &(&x(5, 1, 2) * &x(5, 2, 4)) + &x(5, 3, 5).scale(&rational::frac(2, 3));
        for _ in 0..20 {
            let s = Permutation::random(5, &mut rng);
            let t = Permutation::random(5, &mut rng);
            assert_eq!(p.act(&s.compose(&t)), p.act(&t).act(&s));
        }
        let t12 = Permutation::transposition(3, 0, 1);
        assert_eq!(x(3, 1, 2).act(&t12), x(3, 1, 2));
    }

    #[test]
    fn orbit_symmetrization_matches_explicit_average() {
        let p = &(&x(4, 1, 2) * &x(4, 3, 4)) + &x(4, 1, 3).scale(&rational::int(5));
        let explicit = p.symmetrize_elements(&all_permutations(4));
        assert_eq!(p.symmetrize_full(), explicit);
        let g = PermGroup::young(4, &[vec![0, 1], vec![2, 3]]);
        assert_eq!(p.symmetrize(&g), p.symmetrize_elements(&g.elements(100).unwrap()));
        let s = x(3, 1, 2).symmetrize_full();
        let expect = (&(&x(3, 1, 2) + &x(3, 1, 3)) + &x(3, 2, 3)).scale(&rational::frac(1, 3));
        assert_eq!(s, expect);
    }

    #[test]
    fn evaluation_and_int_eval_agree() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let mut p = MultilinearPoly::zero(5);
        for _ in 0..30 {
            let m = rng.random::<u64>() & 0x3ff & rng.random::<u64>();
            p.add_term(Monomial(m), rational::frac(rng.random_range(-9..10), rng.random_range(1..7)));
        }
        let ie = p.int_eval();
        for bits in 0..1024u64 {
            assert_eq!(ie.value(bits), p.eval_bits(bits));
        }
    }

    #[test]
    fn primitive_scaling() {
        let p = &x(3, 1, 2).scale(&rational::frac(-2, 3)) + &MultilinearPoly::constant(3, rational::frac(4, 9));
        let (q, s) = p.primitive();
        assert_eq!(q.scale(&s), p);
        assert!(q.terms().values().all(|c| c.is_integer()));
    }

    #[test]
    fn json_round_trip() {
        let p = &x(4, 1, 2) - &(&x(4, 2, 3) * &x(4, 3, 4)).scale(&rational::frac(1, 6));
        let j = p.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back: PolyJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_poly().unwrap(), p);
        assert_eq!(format!("{p}"), "x1_2 - 1/6*x2_3*x3_4");
    }
}
