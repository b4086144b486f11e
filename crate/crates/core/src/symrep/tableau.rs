//! Young tableaux, row groups and Kostka numbers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};

/// A filling of a Young diagram with `0..n` (shown 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tableau {
    rows: Vec<Vec<usize>>,
}

impl Tableau {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let shape: Vec<usize> = rows.iter().map(|r| r.len()).collect();
        Partition::new(shape)?;
        let n: usize = rows.iter().map(|r| r.len()).sum();
        let mut seen = vec![false; n];
        for &v in rows.iter().flatten() {
            if v >= n || seen[v] {
                return Err(Error::Parameter(format!("tableau {rows:?} is not filled with 0..{n}")));
            }
            seen[v] = true;
        }
        Ok(Tableau { rows })
    }

    /// Rows filled with consecutive values, left to right, top to bottom.
    pub fn superstandard(shape: &Partition) -> Self {
        let mut next = 0;
        let rows = shape
            .parts()
            .iter()
            .map(|&len| {
                let r: Vec<usize> = (next..next + len).collect();
                next += len;
                r
            })
            .collect();
        Tableau { rows }
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn shape(&self) -> Partition {
        Partition::new(self.rows.iter().map(|r| r.len()).collect()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// `(row, column)` of every value.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let mut pos = vec![(0, 0); self.n()];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                pos[v] = (r, c);
            }
        }
        pos
    }

    /// Content `column − row` of every value.
    pub fn contents(&self) -> Vec<i64> {
        self.positions().iter().map(|&(r, c)| c as i64 - r as i64).collect()
    }

    pub fn is_standard(&self) -> bool {
        let rows_ok = self.rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1]));
        let cols_ok = (1..self.rows.len()).all(|r| (0..self.rows[r].len()).all(|c| self.rows[r - 1][c] < self.rows[r][c]));
        rows_ok && cols_ok
    }

    /// Columns left to right, each read top to bottom.
    pub fn column_word(&self) -> Vec<usize> {
        let width = self.rows.first().map_or(0, |r| r.len());
        (0..width).flat_map(|c| self.rows.iter().filter_map(move |r| r.get(c).copied())).collect()
    }

    /// Replaces every entry `v` by `σ(v)`.
    pub fn permute(&self, sigma: &Permutation) -> Tableau {
        Tableau { rows: self.rows.iter().map(|r| r.iter().map(|&v| sigma.apply(v)).collect()).collect() }
    }

    /// Permutations preserving every row setwise.
    pub fn row_group(&self) -> PermGroup {
        PermGroup::young(self.n(), &self.rows)
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(|r| r.iter().map(|v| v + 1).collect()).collect()
    }
}

impl Serialize for Tableau {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tableau {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<usize>> = Vec::deserialize(d)?;
        if rows.iter().flatten().any(|&v| v == 0) {
            return Err(serde::de::Error::custom("tableau entries are 1-based"));
        }
        Tableau::new(rows.into_iter().map(|r| r.into_iter().map(|v| v - 1).collect()).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// All standard tableaux of a shape, in descending order of column word;
/// the row-superstandard tableau comes first.
pub fn standard_tableaux(shape: &Partition) -> Vec<Tableau> {
    let n = shape.n();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); shape.len()];
    fn rec(v: usize, n: usize, shape: &[usize], rows: &mut Vec<Vec<usize>>, out: &mut Vec<Tableau>) {
        if v == n {
            out.push(Tableau { rows: rows.clone() });
            return;
        }
        for r in 0..shape.len() {
            let len = rows[r].len();
            let fits = len < shape[r] && (r == 0 || rows[r - 1].len() > len);
            if fits {
                rows[r].push(v);
                rec(v + 1, n, shape, rows, out);
                rows[r].pop();
            }
        }
    }
    rec(0, n, shape.parts(), &mut rows, &mut out);
    out.sort_by_key(|t| std::cmp::Reverse(t.column_word()));
    out
}

/// Number of semistandard tableaux of shape `mu` and content `lambda`,
/// built one value at a time as a chain of horizontal strips.
pub fn kostka(mu: &Partition, lambda: &Partition) -> Result<u64> {
    if mu.n() != lambda.n() {
        return Err(Error::Parameter(format!("{mu} and {lambda} partition different integers")));
    }
    let mut memo = HashMap::new();
    Ok(strips(&vec![0; mu.len()], mu.parts(), lambda.parts(), &mut memo))
}

fn strips(cur: &[usize], target: &[usize], content: &[usize], memo: &mut HashMap<(Vec<usize>, usize), u64>) -> u64 {
    let Some((&k, rest)) = content.split_first() else {
        return (cur == target) as u64;
    };
    let key = (cur.to_vec(), content.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    // add a horizontal strip of size k: row r may grow up to the old length of row r−1
    let mut total = 0;
    let mut next = cur.to_vec();
    fn grow(
        r: usize,
        left: usize,
        cur: &[usize],
        next: &mut Vec<usize>,
        target: &[usize],
        rest: &[usize],
        memo: &mut HashMap<(Vec<usize>, usize), u64>,
        total: &mut u64,
    ) {
        if r == cur.len() {
            if left == 0 {
                *total += strips(next, target, rest, memo);
            }
            return;
        }
        let cap = if r == 0 { target[0] } else { cur[r - 1].min(target[r]) };
        let room = cap.saturating_sub(cur[r]);
        for add in 0..=room.min(left) {
            next[r] = cur[r] + add;
            grow(r + 1, left - add, cur, next, target, rest, memo, total);
        }
        next[r] = cur[r];
    }
    grow(0, k, cur, &mut next, target, rest, memo, &mut total);
    memo.insert(key, total);
    total
}

/// Explicit semistandard tableaux (values `0..lambda.len()`), for testing
/// the strip recursion on small cases.
pub fn semistandard_tableaux(mu: &Partition, lambda: &Partition) -> Vec<Vec<Vec<usize>>> {
    let cells: Vec<(usize, usize)> =
        mu.parts().iter().enumerate().flat_map(|(r, &len)| (0..len).map(move |c| (r, c))).collect();
    let mut fill: Vec<Vec<usize>> = mu.parts().iter().map(|&l| vec![usize::MAX; l]).collect();
    let mut left = lambda.parts().to_vec();
    let mut out = Vec::new();
    fn rec(k: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<usize>>, left: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if k == cells.len() {
            out.push(fill.clone());
            return;
        }
        let (r, c) = cells[k];
        for v in 0..left.len() {
            if left[v] == 0 {
                continue;
            }
            if c > 0 && fill[r][c - 1] > v {
                continue;
            }
            if r > 0 && fill[r - 1][c] >= v {
                continue;
            }
            left[v] -= 1;
            fill[r][c] = v;
            rec(k + 1, cells, fill, left, out);
            fill[r][c] = usize::MAX;
            left[v] += 1;
        }
    }
    rec(0, &cells, &mut fill, &mut left, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::super::partition::partitions;
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn standard_counts_and_order() {
        for n in 1..=7 {
            for l in partitions(n) {
                let ts = standard_tableaux(&l);
                assert_eq!(ts.len() as u64, l.dimension());
                assert!(ts.iter().all(|t| t.is_standard()));
                assert_eq!(ts[0], Tableau::superstandard(&l));
            }
        }
        let hook = standard_tableaux(&p(&[4, 1]));
        assert_eq!(hook[0].rows()[1], vec![4]);
    }

    #[test]
    fn row_group_order() {
        let t = Tableau::superstandard(&p(&[3, 2, 1]));
        let g = t.row_group();
        assert_eq!(g.elements(1000).unwrap().len(), 12);
        assert_eq!(g.known_order(), Some(12));
    }

    #[test]
    fn kostka_example_and_identity() {
        let lam = p(&[4, 2, 1]);
        let expect = [(vec![7], 1), (vec![6, 1], 2), (vec![5, 2], 2), (vec![5, 1, 1], 1), (vec![4, 3], 1), (vec![4, 2, 1], 1)];
        for mu in partitions(7) {
            let want = expect.iter().find(|(s, _)| *s == mu.parts()).map_or(0, |e| e.1);
            assert_eq!(kostka(&mu, &lam).unwrap(), want, "shape {mu}");
        }
        for n in 1..=7 {
            for mu in partitions(n) {
                assert_eq!(kostka(&mu, &mu).unwrap(), 1);
            }
        }
    }

    #[test]
    fn kostka_matches_explicit_fillings() {
        for n in 1..=6 {
            for mu in partitions(n) {
                for lam in partitions(n) {
                    assert_eq!(kostka(&mu, &lam).unwrap(), semistandard_tableaux(&mu, &lam).len() as u64);
                }
            }
        }
    }

    #[test]
    fn kostka_with_content_ones_counts_standard_tableaux() {
        for mu in partitions(6) {
            assert_eq!(kostka(&mu, &p(&[1; 6])).unwrap(), mu.dimension());
        }
    }

    #[test]
    fn json_is_one_based() {
        let t = Tableau::superstandard(&p(&[2, 1]));
        assert_eq!(serde_json::to_string(&t).unwrap(), "[[1,2],[3]]");
        let back: Tableau = serde_json::from_str("[[1,3],[2]]").unwrap();
        assert!(back.is_standard());
    }
}
