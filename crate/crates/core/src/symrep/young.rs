//! Young's seminormal and orthogonal forms over standard tableaux.
//!
//! For the adjacent transposition `s_i = (i, i+1)` and a standard tableau
//! `T` let `r = c(i+1) − c(i)` be the axial distance (contents `col − row`).
//! If `i`, `i+1` share a row, `s_i` fixes `e_T`; a column, it negates it.
//! Otherwise `T' = s_i T` is standard and on `(e_T, e_T')`, with `i` above
//! `i+1` in `T`,
//!
//! ```text
//! seminormal:  [[1/r, 1 − 1/r²], [1, −1/r]]
//! orthogonal:  [[1/r, √(1 − 1/r²)], [√(1 − 1/r²), −1/r]]
//! ```

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::partition::Partition;
use super::tableau::{standard_tableaux, Tableau};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rational::{self, Rational};

/// One column of a sparse generator matrix: `(row, value)` pairs.
type SparseCol<T> = Vec<(usize, T)>;

/// A generator acting on the tableau basis: for each tableau index `a`,
/// either a diagonal sign or a 2×2 coupling with `partner`.
#[derive(Clone, Debug)]
enum Move {
    Fix(i64),
    Pair { partner: usize, r: i64, upper: bool },
}

/// Standard tableaux of a shape together with the action of every
/// adjacent transposition.
#[derive(Clone, Debug)]
pub struct YoungBasis {
    shape: Partition,
    tableaux: Vec<Tableau>,
    moves: Vec<Vec<Move>>,
}

impl YoungBasis {
    pub fn new(shape: &Partition) -> Result<Self> {
        if shape.n() > 8 {
            return Err(Error::Budget(format!("Young forms limited to n ≤ 8, got {}", shape.n())));
        }
        let tableaux = standard_tableaux(shape);
        let index: HashMap<Vec<Vec<usize>>, usize> =
            tableaux.iter().enumerate().map(|(k, t)| (t.rows().to_vec(), k)).collect();
        let n = shape.n();
        let mut moves = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let s = Permutation::transposition(n, i, i + 1);
            let col: Vec<Move> = tableaux
                .iter()
                .map(|t| {
                    let pos = t.positions();
                    let (ra, ca) = pos[i];
                    let (rb, cb) = pos[i + 1];
                    if ra == rb {
                        Move::Fix(1)
                    } else if ca == cb {
                        Move::Fix(-1)
                    } else {
                        let r = (cb as i64 - rb as i64) - (ca as i64 - ra as i64);
                        let partner = index[t.permute(&s).rows()];
                        Move::Pair { partner, r, upper: ra < rb }
                    }
                })
                .collect();
            moves.push(col);
        }
        Ok(YoungBasis { shape: shape.clone(), tableaux, moves })
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn tableaux(&self) -> &[Tableau] {
        &self.tableaux
    }

    pub fn dim(&self) -> usize {
        self.tableaux.len()
    }

    /// Sparse columns of the seminormal matrix of `s_i`.
    pub fn seminormal_generator(&self, i: usize) -> Vec<SparseCol<Rational>> {
        self.moves[i]
            .iter()
            .enumerate()
            .map(|(a, m)| match *m {
                Move::Fix(s) => vec![(a, rational::int(s))],
                Move::Pair { partner, r, upper } => {
                    let inv = rational::frac(1, r);
                    let off = if upper { rational::one() } else { rational::one() - &inv * &inv };
                    vec![(a, inv), (partner, off)]
                }
            })
            .collect()
    }

    /// Dense seminormal matrix of any permutation.
    pub fn seminormal_matrix(&self, sigma: &Permutation) -> Vec<Vec<Rational>> {
        let d = self.dim();
        let mut m = identity_rat(d);
        for i in sigma.adjacent_word() {
            let g = self.seminormal_generator(i);
            m = mul_dense_sparse(&m, &g);
        }
        m
    }

    /// Exact orthogonal-form matrix of `s_i` with surd entries.
    pub fn orthogonal_generator(&self, i: usize) -> Vec<Vec<Surd>> {
        let d = self.dim();
        let mut m = vec![vec![Surd::zero(); d]; d];
        for (a, mv) in self.moves[i].iter().enumerate() {
            match *mv {
                Move::Fix(s) => m[a][a] = Surd::from_rational(rational::int(s)),
                Move::Pair { partner, r, .. } => {
                    let inv = rational::frac(1, r);
                    m[a][a] = Surd::from_rational(inv.clone());
                    m[partner][a] = Surd::sqrt(&(rational::one() - &inv * &inv));
                }
            }
        }
        m
    }

    /// Floating orthogonal-form matrix of any permutation.
    pub fn orthogonal_matrix(&self, sigma: &Permutation) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::<f64>::identity(d, d);
        for i in sigma.adjacent_word() {
            let g = DMatrix::from_fn(d, d, |r, c| self.orthogonal_generator(i)[r][c].to_f64());
            m *= g;
        }
        m
    }
}

/// Orthogonal matrix of `σ` in Young's orthogonal form.
pub fn yor_matrices(lambda: &Partition, sigma: &Permutation) -> Result<DMatrix<f64>> {
    if sigma.degree() != lambda.n() {
        return Err(Error::Dimension(format!("permutation of degree {} for {lambda}", sigma.degree())));
    }
    Ok(YoungBasis::new(lambda)?.orthogonal_matrix(sigma))
}

fn identity_rat(d: usize) -> Vec<Vec<Rational>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { rational::one() } else { Rational::zero() }).collect()).collect()
}

/// `m · g` where `g` is given by sparse columns.
fn mul_dense_sparse(m: &[Vec<Rational>], g: &[SparseCol<Rational>]) -> Vec<Vec<Rational>> {
    let d = g.len();
    let mut out = vec![vec![Rational::zero(); d]; m.len()];
    for (c, col) in g.iter().enumerate() {
        for (r, v) in col {
            for i in 0..m.len() {
                if !m[i][*r].is_zero() {
                    out[i][c] += &m[i][*r] * v;
                }
            }
        }
    }
    out
}

/// `row · g` for a row vector.
pub(crate) fn row_times_sparse(row: &[Rational], g: &[SparseCol<Rational>]) -> Vec<Rational> {
    g.iter()
        .map(|col| col.iter().fold(Rational::zero(), |acc, (r, v)| if row[*r].is_zero() { acc } else { acc + &row[*r] * v }))
        .collect()
}

/// An element `Σ c_s √s` of a multiquadratic field, `s` squarefree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    terms: BTreeMap<BigInt, Rational>,
}

impl Surd {
    pub fn zero() -> Self {
        Surd { terms: BTreeMap::new() }
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut s = Surd::zero();
        s.push(BigInt::one(), q);
        s
    }

    /// `√q` for a non-negative rational `q`.
    pub fn sqrt(q: &Rational) -> Self {
        assert!(!q.is_negative());
        if q.is_zero() {
            return Surd::zero();
        }
        // √(a/b) = √(ab)/b, then pull square factors out of ab
        let ab = q.numer() * q.denom();
        let (outside, free) = split_square(&ab);
        let mut s = Surd::zero();
        s.push(free, Rational::new(outside, q.denom().clone()));
        s
    }

    fn push(&mut self, radicand: BigInt, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(radicand.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(s, c)| rational::to_f64(c) * rational::to_f64(&Rational::from_integer(s.clone())).sqrt()).sum()
    }

    /// The rational value, if there is no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigInt::one()).cloned(),
            _ => None,
        }
    }
}

/// Writes `v = o² · f` with `f` squarefree (trial division; small inputs).
fn split_square(v: &BigInt) -> (BigInt, BigInt) {
    let mut rest = v.clone();
    let mut outside = BigInt::one();
    let mut free = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            outside *= &p;
        }
        if e % 2 == 1 {
            free *= &p;
        }
        p += 1;
    }
    free *= rest;
    (outside, free)
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.push(s.clone(), c.clone());
        }
        out
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (s1, c1) in &self.terms {
            for (s2, c2) in &rhs.terms {
                let g = s1.gcd(s2);
                let free = (s1 / &g) * (s2 / &g);
                out.push(free, c1 * c2 * Rational::from_integer(g));
            }
        }
        out
    }
}

pub fn surd_matmul(a: &[Vec<Surd>], b: &[Vec<Surd>]) -> Vec<Vec<Surd>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![Surd::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][l] * &b[l][j]);
                }
            }
        }
    }
    out
}
