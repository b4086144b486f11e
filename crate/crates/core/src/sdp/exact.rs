//! Exact rational matrix utilities: PSD decision by pivoted LDLᵀ and
//! small dense linear algebra.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type RatMatrix = Vec<Vec<Rational>>;

/// Outcome of a pivoted LDLᵀ factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct LdlReport {
    pub psd: bool,
    pub rank: usize,
    /// Pivots in elimination order (positive ones, then the failing one if any).
    pub pivots: Vec<Rational>,
}

fn check_square_symmetric(m: &[Vec<Rational>]) -> Result<()> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[i][j] != m[j][i] {
                return Err(Error::Asymmetric);
            }
        }
    }
    Ok(())
}

/// Symmetric LDLᵀ with diagonal pivoting (largest remaining diagonal first).
/// The matrix is PSD iff no pivot is negative and, once the largest
/// remaining diagonal is zero, the remaining block is entirely zero.
pub fn ldl_psd(m: &[Vec<Rational>]) -> Result<LdlReport> {
    check_square_symmetric(m)?;
    let mut a: RatMatrix = m.to_vec();
    let mut active: Vec<usize> = (0..a.len()).collect();
    let mut pivots = Vec::new();
    while !active.is_empty() {
        let (pos, &p) = active.iter().enumerate().max_by(|x, y| a[*x.1][*x.1].cmp(&a[*y.1][*y.1]).then(y.0.cmp(&x.0))).unwrap();
        let d = a[p][p].clone();
        if d.is_negative() {
            pivots.push(d);
            return Ok(LdlReport { psd: false, rank: pivots.len() - 1, pivots });
        }
        if d.is_zero() {
            let zero = active.iter().all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
            let rank = pivots.len();
            return Ok(LdlReport { psd: zero, rank, pivots });
        }
        active.remove(pos);
        let col: Vec<Rational> = active.iter().map(|&i| a[i][p].clone()).collect();
        for (x, &i) in active.iter().enumerate() {
            if col[x].is_zero() {
                continue;
            }
            let f = &col[x] / &d;
            for (y, &j) in active.iter().enumerate() {
                if !col[y].is_zero() {
                    let delta = &f * &col[y];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(d);
    }
    let rank = pivots.len();
    Ok(LdlReport { psd: true, rank, pivots })
}

/// Exact positive-semidefiniteness test.
pub fn check_psd_rational(m: &[Vec<Rational>]) -> Result<bool> {
    Ok(ldl_psd(m)?.psd)
}

pub fn to_f64(m: &[Vec<Rational>]) -> DMatrix<f64> {
    let r = m.len();
    let c = m.first().map_or(0, |x| x.len());
    DMatrix::from_fn(r, c, |i, j| rational::to_f64(&m[i][j]))
}

pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let delta = &f * &a[c][k];
                a[r][k] -= delta;
            }
        }
    }
    det
}

/// Result of reducing a linear system `A z = b` over the rationals.
#[derive(Clone, Debug)]
pub struct RowReduction {
    /// Indices of a maximal independent set of rows (in input order).
    pub independent: Vec<usize>,
    /// A row `r` with `A_r` in the span of earlier rows but `b_r` not.
    pub inconsistent: Option<usize>,
}

/// Greedy independent-row selection for `[A | b]`.
pub fn reduce_rows(a: &[Vec<Rational>], b: &[Rational]) -> RowReduction {
    let cols = a.first().map_or(0, |r| r.len());
    // echelon rows with pivot columns, augmented with the rhs
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut independent = Vec::new();
    let mut inconsistent = None;
    for (r, row) in a.iter().enumerate() {
        let mut v: Vec<Rational> = row.iter().cloned().chain(std::iter::once(b[r].clone())).collect();
        for (pc, e) in &basis {
            if v[*pc].is_zero() {
                continue;
            }
            let f = v[*pc].clone();
            for k in 0..=cols {
                if !e[k].is_zero() {
                    let delta = &f * &e[k];
                    v[k] -= delta;
                }
            }
        }
        match (0..cols).find(|&k| !v[k].is_zero()) {
            Some(pc) => {
                let inv = v[pc].recip();
                for x in v.iter_mut() {
                    *x *= &inv;
                }
                // keep the basis reduced in the new pivot column
                for (_, e) in basis.iter_mut() {
                    if !e[pc].is_zero() {
                        let f = e[pc].clone();
                        for k in 0..=cols {
                            if !v[k].is_zero() {
                                let delta = &f * &v[k];
                                e[k] -= delta;
                            }
                        }
                    }
                }
                basis.push((pc, v));
                independent.push(r);
            }
            None => {
                if !v[cols].is_zero() && inconsistent.is_none() {
                    inconsistent = Some(r);
                }
            }
        }
    }
    RowReduction { independent, inconsistent }
}

/// Solves `A z = b` for square invertible `A` exactly.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.len();
    let mut m: RatMatrix = a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain(std::iter::once(x.clone())).collect()).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero()).ok_or_else(|| Error::Dimension("singular system".into()))?;
        m.swap(p, c);
        let inv = m[c][c].recip();
        for k in c..=n {
            m[c][k] *= &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in c..=n {
                    let delta = &f * &m[c][k];
                    m[r][k] -= delta;
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : A x = 0}` for `A` with `cols` columns.
pub fn nullspace(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn m(v: &[&[i64]]) -> RatMatrix {
        v.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn psd_examples() {
        let q = vec![vec![frac(1, 2), frac(-1, 2)], vec![frac(-1, 2), frac(1, 2)]];
        let r = ldl_psd(&q).unwrap();
        assert!(r.psd);
        assert_eq!(r.rank, 1);
        assert!(!check_psd_rational(&m(&[&[0, 1], &[1, 0]])).unwrap());
        assert!(check_psd_rational(&m(&[&[0, 0], &[0, 0]])).unwrap());
        assert!(!check_psd_rational(&m(&[&[1, 2], &[2, 1]])).unwrap());
        assert!(matches!(check_psd_rational(&m(&[&[1, 2], &[3, 1]])), Err(Error::Asymmetric)));
        // zero diagonal with nonzero off-diagonal hidden behind a positive pivot
        assert!(!check_psd_rational(&m(&[&[1, 1, 0], &[1, 1, 1], &[0, 1, 0]])).unwrap());
    }

    #[test]
    fn psd_agrees_with_eigenvalues() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        for _ in 0..300 {
            let n = rng.random_range(1..5);
            let k = rng.random_range(1..=n);
            // B Bᵀ minus a small multiple of the identity, sometimes
            let b: Vec<Vec<i64>> = (0..n).map(|_| (0..k).map(|_| rng.random_range(-3..=3)).collect()).collect();
            let shift = if rng.random_bool(0.5) { 0 } else { rng.random_range(0..3) };
            let a: RatMatrix = (0..n)
                .map(|i| (0..n).map(|j| int((0..k).map(|l| b[i][l] * b[j][l]).sum::<i64>() - if i == j { shift } else { 0 })).collect())
                .collect();
            let eig = to_f64(&a).symmetric_eigenvalues();
            let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            let psd = check_psd_rational(&a).unwrap();
            if min > 1e-9 {
                assert!(psd);
            } else if min < -1e-9 {
                assert!(!psd);
            }
        }
    }

    #[test]
    fn determinant_and_solve() {
        let a = m(&[&[2, 1], &[1, 3]]);
        assert_eq!(determinant(&a), int(5));
        let x = solve(&a, &[int(1), int(2)]).unwrap();
        assert_eq!(x, vec![frac(1, 5), frac(3, 5)]);
    }

    #[test]
    fn nullspace_basis() {
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns, vec![vec![int(-1), int(1), int(0)]]);
        assert_eq!(nullspace(&[], 2).len(), 2);
    }

    #[test]
    fn row_reduction() {
        let a = m(&[&[1, 0], &[2, 0], &[0, 1], &[1, 1]]);
        let ok = reduce_rows(&a, &[int(1), int(2), int(3), int(4)]);
        assert_eq!(ok.independent, vec![0, 2]);
        assert!(ok.inconsistent.is_none());
        let bad = reduce_rows(&a, &[int(1), int(2), int(3), int(5)]);
        assert_eq!(bad.inconsistent, Some(3));
    }
}
