//! Irreducible characters of `S_n` (Murnaghan–Nakayama) and multiplicities
//! in the space of multilinear polynomials of bounded degree.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::partition::{partitions, Partition};
use crate::error::{Error, Result};
use crate::graph::{pair_count, pair_index};
use crate::perm::Permutation;
use crate::rational::factorial;

/// `χ_λ` on the class with the given cycle type, via rim-hook removal on
/// beta-sets.
pub fn character(lambda: &Partition, cycle_type: &Partition) -> Result<i64> {
    if lambda.n() != cycle_type.n() {
        return Err(Error::Parameter(format!("{lambda} and {cycle_type} partition different integers")));
    }
    if lambda.n() > 10 {
        return Err(Error::Budget(format!("characters limited to n ≤ 10, got {}", lambda.n())));
    }
    let l = lambda.len();
    let beta: Vec<usize> = lambda.parts().iter().enumerate().map(|(i, &p)| p + (l - 1 - i)).collect();
    let mut memo = HashMap::new();
    Ok(mn(beta, cycle_type.parts(), &mut memo))
}

fn mn(beta: Vec<usize>, cycles: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i64>) -> i64 {
    let Some((&r, rest)) = cycles.split_first() else {
        return 1;
    };
    let key = (beta.clone(), cycles.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for (k, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        // beads jumped over give the leg length
        let height = beta.iter().filter(|&&x| x > b - r && x < b).count();
        let sign = if height % 2 == 0 { 1 } else { -1 };
        let mut next = beta.clone();
        next[k] = b - r;
        next.sort_unstable_by(|a, b| b.cmp(a));
        total += sign * mn(next, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// `n! / z_ρ`.
pub fn class_size(cycle_type: &Partition) -> u64 {
    let n = cycle_type.n() as u64;
    let mut z: u64 = 1;
    let mut counts: HashMap<usize, u64> = HashMap::new();
    for &c in cycle_type.parts() {
        *counts.entry(c).or_insert(0) += 1;
    }
    for (c, m) in counts {
        z *= (c as u64).pow(m as u32) * factorial(m);
    }
    factorial(n) / z
}

/// Rows indexed by `partitions(n)` (λ), columns by `partitions(n)` (class).
pub fn character_table(n: usize) -> Result<Vec<Vec<i64>>> {
    let ps = partitions(n);
    ps.iter().map(|l| ps.iter().map(|c| character(l, c)).collect()).collect()
}

/// Number of squarefree monomials of degree ≤ `d` in the pair variables
/// that are fixed by `sigma`: unions of pair orbits of total size ≤ `d`.
pub fn fixed_monomials(sigma: &Permutation, d: usize) -> u64 {
    let n = sigma.degree();
    let pc = pair_count(n);
    let mut seen = vec![false; pc];
    let mut orbit_sizes = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = pair_index(n, i, j);
            if seen[p] {
                continue;
            }
            let (mut a, mut b) = (i, j);
            let mut len = 0;
            loop {
                let q = pair_index(n, a, b);
                if seen[q] {
                    break;
                }
                seen[q] = true;
                len += 1;
                a = sigma.apply(a);
                b = sigma.apply(b);
            }
            orbit_sizes.push(len);
        }
    }
    // ways[k] = number of orbit subsets of total size k
    let mut ways = vec![0u64; d + 1];
    ways[0] = 1;
    for s in orbit_sizes {
        for k in (s..=d).rev() {
            ways[k] += ways[k - s];
        }
    }
    ways.iter().sum()
}

/// Multiplicity of `S^λ` in the multilinear polynomials of degree ≤ `d`
/// in `C(n,2)` variables, by the character inner product.
pub fn multiplicity(lambda: &Partition, n: usize, d: usize) -> Result<u64> {
    if lambda.n() != n {
        return Err(Error::Parameter(format!("{lambda} is not a partition of {n}")));
    }
    if n > 8 || d > 2 {
        return Err(Error::Budget(format!("multiplicities limited to n ≤ 8, d ≤ 2 (got n={n}, d={d})")));
    }
    let mut acc = BigInt::zero();
    for ct in partitions(n) {
        let sigma = Permutation::with_cycle_type(ct.parts());
        let term = BigInt::from(class_size(&ct)) * character(lambda, &ct)? * BigInt::from(fixed_monomials(&sigma, d));
        acc += term;
    }
    let nf = BigInt::from(factorial(n as u64));
    debug_assert!((&acc % &nf).is_zero());
    Ok((acc / nf).to_u64().expect("multiplicity is a non-negative integer"))
}

/// Dimension of the multilinear polynomials of degree ≤ `d`.
pub fn multilinear_dimension(n: usize, d: usize) -> u64 {
    let e = pair_count(n) as u64;
    (0..=d as u64).map(|k| crate::rational::binomial(e, k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use crate::symrep::tableau::standard_tableaux;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn trivial_and_standard_characters() {
        for n in 2..=7 {
            for c in partitions(n) {
                assert_eq!(character(&Partition::trivial(n), &c).unwrap(), 1);
                let fixed = c.parts().iter().filter(|&&x| x == 1).count() as i64;
                assert_eq!(character(&p(&[n - 1, 1]), &c).unwrap(), fixed - 1);
            }
            let id = p(&vec![1; n]);
            for l in partitions(n) {
                assert_eq!(character(&l, &id).unwrap() as u64, standard_tableaux(&l).len() as u64);
            }
        }
    }

    #[test]
    fn orthogonality() {
        for n in 2..=7 {
            let ps = partitions(n);
            let table = character_table(n).unwrap();
            let nf = factorial(n as u64) as i64;
            for a in 0..ps.len() {
                for b in 0..ps.len() {
                    let s: i64 = (0..ps.len()).map(|c| class_size(&ps[c]) as i64 * table[a][c] * table[b][c]).sum();
                    assert_eq!(s, if a == b { nf } else { 0 });
                }
            }
        }
    }

    #[test]
    fn s4_table() {
        // classes (4), (3,1), (2,2), (2,1,1), (1^4)
        let t = character_table(4).unwrap();
        assert_eq!(t[1], vec![-1, 0, -1, 1, 3]);
        assert_eq!(t[2], vec![0, -1, 2, 0, 2]);
        assert_eq!(t[4], vec![-1, 1, 1, -1, 1]);
    }

    #[test]
    fn fixed_monomial_counts_by_brute_force() {
        use crate::poly::{pair_permutation, permute_mask};
        for n in 3..=5 {
            let pc = pair_count(n);
            for s in all_permutations(n) {
                let tab = pair_permutation(n, &s);
                for d in 0..=2 {
                    let brute = (0..1u64 << pc)
                        .filter(|m| m.count_ones() as usize <= d && permute_mask(*m, &tab) == *m)
                        .count() as u64;
                    assert_eq!(fixed_monomials(&s, d), brute);
                }
            }
        }
    }

    #[test]
    fn degree_one_multiplicities() {
        for n in 4..=8 {
            let total: u64 = partitions(n).iter().map(|l| l.dimension() * multiplicity(l, n, 1).unwrap()).sum();
            assert_eq!(total, 1 + pair_count(n) as u64);
            for l in partitions(n) {
                let m = multiplicity(&l, n, 1).unwrap();
                let want = match l.parts() {
                    [a] if *a == n => 2,
                    [a, 1] if *a == n - 1 => 1,
                    [a, 2] if *a == n - 2 => 1,
                    _ => 0,
                };
                assert_eq!(m, want, "n={n} λ={l}");
                assert_eq!(multiplicity(&l, n, 0).unwrap(), (l.len() == 1) as u64);
            }
        }
        assert!(multiplicity(&p(&[9]), 9, 1).is_err());
    }

    #[test]
    fn degree_two_dimension_count() {
        for n in 4..=7 {
            let total: u64 = partitions(n).iter().map(|l| l.dimension() * multiplicity(l, n, 2).unwrap()).sum();
            assert_eq!(total, multilinear_dimension(n, 2));
        }
    }
}
