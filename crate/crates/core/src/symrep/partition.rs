//! Integer partitions with lexicographic and dominance comparisons.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parts in non-increasing order. `Ord` is the lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.0
    }
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parameter(format!("{parts:?} is not a partition")));
        }
        Ok(Partition(parts))
    }

    /// The hook `(n − t, 1^t)`.
    pub fn hook(n: usize, t: usize) -> Self {
        assert!(t < n);
        let mut v = vec![n - t];
        v.extend(std::iter::repeat_n(1, t));
        Partition(v)
    }

    pub fn trivial(n: usize) -> Self {
        Partition(vec![n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.0.first().copied().unwrap_or(0);
        Partition((0..cols).map(|c| self.0.iter().filter(|&&r| r > c).count()).collect())
    }

    /// Number of standard tableaux, by the hook length formula.
    pub fn dimension(&self) -> u64 {
        let conj = self.conjugate();
        let num: u128 = (1..=self.n() as u128).product();
        let mut den: u128 = 1;
        for (r, &len) in self.0.iter().enumerate() {
            for c in 0..len {
                den *= ((len - c - 1) + (conj.0[c] - r - 1) + 1) as u128;
            }
        }
        (num / den) as u64
    }

    /// True dominance: every partial sum of `self` is at least that of `other`.
    pub fn dominates(&self, other: &Partition) -> bool {
        let mut a = 0;
        let mut b = 0;
        for k in 0..self.len().max(other.len()) {
            a += self.0.get(k).copied().unwrap_or(0);
            b += other.0.get(k).copied().unwrap_or(0);
            if a < b {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All partitions of `n` in descending lexicographic order.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Partitions of `n` lexicographically at least `(n − t, 1^t)`, descending.
pub fn partitions_lex_geq(n: usize, hook_t: usize) -> Result<Vec<Partition>> {
    if hook_t >= n {
        return Err(Error::Parameter(format!("hook size {hook_t} must be below n = {n}")));
    }
    let h = Partition::hook(n, hook_t);
    Ok(partitions(n).into_iter().filter(|p| *p >= h).collect())
}

/// `mu ⊵ lambda` in the sense used for flag supports: `mu` is
/// lexicographically at least `lambda` and has at most as many parts.
pub fn dominance_geq(mu: &Partition, lambda: &Partition) -> Result<bool> {
    if mu.n() != lambda.n() {
        return Err(Error::Parameter(format!("{mu} and {lambda} partition different integers")));
    }
    Ok(mu >= lambda && mu.len() <= lambda.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn counts_and_order() {
        let counts: Vec<usize> = (1..=9).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22, 30]);
        let five = partitions(5);
        assert_eq!(five[0], p(&[5]));
        assert_eq!(five[1], p(&[4, 1]));
        assert_eq!(five[2], p(&[3, 2]));
        assert!(five.windows(2).all(|w| w[0] > w[1]));
        assert!(Partition::new(vec![1, 2]).is_err());
    }

    #[test]
    fn lex_geq_examples() {
        assert_eq!(partitions_lex_geq(5, 1).unwrap(), vec![p(&[5]), p(&[4, 1])]);
        assert_eq!(partitions_lex_geq(7, 2).unwrap(), vec![p(&[7]), p(&[6, 1]), p(&[5, 2]), p(&[5, 1, 1])]);
        assert_eq!(partitions_lex_geq(20, 1).unwrap().len(), 2);
        // stable in n once n > 2t
        assert_eq!(partitions_lex_geq(9, 3).unwrap().len(), partitions_lex_geq(12, 3).unwrap().len());
    }

    #[test]
    fn dominance_on_hooks_is_lex() {
        for n in 2..=9 {
            for t in 0..n {
                let h = Partition::hook(n, t);
                for mu in partitions(n) {
                    assert_eq!(dominance_geq(&mu, &h).unwrap(), mu >= h, "n={n} t={t} mu={mu}");
                }
            }
        }
        assert!(dominance_geq(&p(&[6]), &p(&[2, 2, 1, 1])).unwrap());
        assert!(!dominance_geq(&p(&[4, 3]), &p(&[5, 1, 1])).unwrap());
    }

    #[test]
    fn dimensions() {
        assert_eq!(p(&[4, 1]).dimension(), 4);
        assert_eq!(p(&[3, 2]).dimension(), 5);
        assert_eq!(p(&[4, 2, 1]).dimension(), 35);
        for n in 1..=7 {
            let s: u64 = partitions(n).iter().map(|l| l.dimension().pow(2)).sum();
            assert_eq!(s, (1..=n as u64).product::<u64>());
        }
    }
}
