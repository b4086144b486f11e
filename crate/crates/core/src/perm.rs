//! Permutations of `{0, …, n−1}` and groups given by generators.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};

/// A permutation stored by images: `self.0[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::NotInjective(format!("{images:?} is not a permutation")));
            }
            seen[v] = true;
        }
        Ok(Permutation(images))
    }

    /// Parses 1-based images, as used in the JSON interfaces.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Parse("permutation images are 1-based".into()));
        }
        Self::from_images(images.iter().map(|v| v - 1).collect())
    }

    /// Swaps `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(a, b);
        Permutation(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, v)| i == *v).count()
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut c = s;
            while !seen[c] {
                seen[c] = true;
                c = self.0[c];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// A permutation whose cycles have the given lengths, filling
    /// consecutive points.
    pub fn with_cycle_type(cycles: &[usize]) -> Self {
        let n: usize = cycles.iter().sum();
        let mut v = vec![0; n];
        let mut start = 0;
        for &len in cycles {
            for k in 0..len {
                v[start + k] = start + (k + 1) % len;
            }
            start += len;
        }
        Permutation(v)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Permutation(v)
    }

    /// Writes the permutation as a word in adjacent transpositions
    /// `s_i = (i, i+1)` such that `self = s_{w[0]} ∘ s_{w[1]} ∘ …`.
    pub fn adjacent_word(&self) -> Vec<usize> {
        // bubble sort the image list; each swap at positions (i,i+1) of the
        // one-line notation corresponds to right multiplication by s_i.
        let mut a = self.0.clone();
        let mut word = Vec::new();
        let n = a.len();
        loop {
            let mut swapped = false;
            for i in 0..n.saturating_sub(1) {
                if a[i] > a[i + 1] {
                    a.swap(i, i + 1);
                    word.push(i);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        // self ∘ s_{k1} ∘ … ∘ s_{kr} = id, hence self = s_{kr} ∘ … ∘ s_{k1}
        word.reverse();
        word
    }
}

/// All permutations of `0..n` in lexicographic order of images.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation(cur.clone()));
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// A permutation group described by a generating set.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    order: Option<u128>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Self {
        PermGroup { degree, generators, order: None }
    }

    /// The full symmetric group, generated by adjacent transpositions.
    pub fn symmetric(n: usize) -> Self {
        let gens = (0..n.saturating_sub(1))
            .map(|i| Permutation::transposition(n, i, i + 1))
            .collect();
        PermGroup { degree: n, generators: gens, order: Some(crate::rational::factorial(n as u64) as u128) }
    }

    /// The Young subgroup permuting each block independently.
    pub fn young(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut gens = Vec::new();
        let mut order: u128 = 1;
        for b in blocks {
            for w in b.windows(2) {
                gens.push(Permutation::transposition(n, w[0], w[1]));
            }
            order *= crate::rational::factorial(b.len() as u64) as u128;
        }
        PermGroup { degree: n, generators: gens, order: Some(order) }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn known_order(&self) -> Option<u128> {
        self.order
    }

    /// Explicit element list by closure; refuses groups larger than `limit`.
    pub fn elements(&self, limit: usize) -> Result<Vec<Permutation>> {
        let id = Permutation::identity(self.degree);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        let mut out = Vec::new();
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = g.compose(&p);
                if seen.insert(q.clone()) {
                    if seen.len() > limit {
                        return Err(Error::Budget(format!("group has more than {limit} elements")));
                    }
                    queue.push_back(q);
                }
            }
            out.push(p);
        }
        out.sort();
        Ok(out)
    }
}
