//! Bound programs with exact data:
//!
//! ```text
//! min γ  s.t.  γ = r_k + Σ_b ⟨A_kb, X_b⟩ (+ s_k)   for every row k,  X_b ⪰ 0
//! ```
//!
//! With `inequality` set, each row gets its own slack `s_k ≥ 0`, i.e. the
//! rows read `γ ≥ r_k + ⟨A_k, X⟩`. The free `γ` is eliminated with row 0
//! before the numeric solve; dependent rows are removed exactly.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Signed, Zero};

use super::exact::{self, RatMatrix};
use super::solver::{self, SdpProblem, SdpSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct BoundProgram {
    pub block_sizes: Vec<usize>,
    /// `rows[k][b]`, symmetric.
    pub rows: Vec<Vec<RatMatrix>>,
    pub r: Vec<Rational>,
    pub inequality: bool,
}

#[derive(Clone, Debug)]
pub struct ProgramSolution {
    pub gamma: f64,
    pub dual_gamma: f64,
    /// Blocks of the program (row slacks excluded).
    pub blocks: Vec<DMatrix<f64>>,
    pub raw: SdpSolution,
}

fn zeros(n: usize) -> RatMatrix {
    vec![vec![Rational::zero(); n]; n]
}

fn inner(a: &[Vec<Rational>], x: &[Vec<Rational>]) -> Rational {
    let mut s = Rational::zero();
    for (ra, rx) in a.iter().zip(x) {
        for (u, v) in ra.iter().zip(rx) {
            if !u.is_zero() && !v.is_zero() {
                s += u * v;
            }
        }
    }
    s
}

impl BoundProgram {
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || self.rows.len() != self.r.len() {
            return Err(Error::Dimension("bound program needs one right-hand side per row".into()));
        }
        for row in &self.rows {
            if row.len() != self.block_sizes.len() || row.iter().zip(&self.block_sizes).any(|(m, &s)| m.len() != s || m.iter().any(|r| r.len() != s)) {
                return Err(Error::Dimension("row blocks do not match block sizes".into()));
            }
        }
        Ok(())
    }

    /// Block sizes and rows with the per-row slacks appended.
    fn expanded(&self) -> (Vec<usize>, Vec<Vec<RatMatrix>>) {
        if !self.inequality {
            return (self.block_sizes.clone(), self.rows.clone());
        }
        let k = self.rows.len();
        let mut sizes = self.block_sizes.clone();
        sizes.extend(std::iter::repeat_n(1, k));
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut row = row.clone();
                for j in 0..k {
                    row.push(vec![vec![if i == j { rational::one() } else { Rational::zero() }]]);
                }
                row
            })
            .collect();
        (sizes, rows)
    }

    /// Upper-triangular coordinates `(block, i, j)`.
    fn coords(sizes: &[usize]) -> Vec<(usize, usize, usize)> {
        sizes.iter().enumerate().flat_map(|(b, &n)| (0..n).flat_map(move |i| (i..n).map(move |j| (b, i, j)))).collect()
    }

    fn vectorize_row(row: &[RatMatrix], coords: &[(usize, usize, usize)]) -> Vec<Rational> {
        coords.iter().map(|&(b, i, j)| if i == j { row[b][i][i].clone() } else { &row[b][i][j] + &row[b][j][i] }).collect()
    }

    /// Exact linear system `⟨A_k − A_0, X⟩ = r_0 − r_k` (or with `γ` fixed,
    /// `⟨A_k, X⟩ = γ − r_k`) restricted to independent rows.
    fn linear_system(&self, gamma: Option<&Rational>) -> Result<(Vec<usize>, Vec<Vec<RatMatrix>>, Vec<Rational>)> {
        let (sizes, rows) = self.expanded();
        let (mats, rhs): (Vec<Vec<RatMatrix>>, Vec<Rational>) = match gamma {
            None => (1..rows.len())
                .map(|k| {
                    let m = rows[k]
                        .iter()
                        .zip(&rows[0])
                        .map(|(a, a0)| a.iter().zip(a0).map(|(ra, r0)| ra.iter().zip(r0).map(|(x, y)| x - y).collect()).collect())
                        .collect();
                    (m, &self.r[0] - &self.r[k])
                })
                .unzip(),
            Some(g) => rows.iter().zip(&self.r).map(|(row, rk)| (row.clone(), g - rk)).unzip(),
        };
        let coords = Self::coords(&sizes);
        let vecs: Vec<Vec<Rational>> = mats.iter().map(|m| Self::vectorize_row(m, &coords)).collect();
        let red = exact::reduce_rows(&vecs, &rhs);
        if let Some(bad) = red.inconsistent {
            return Err(Error::Infeasible(format!("linear constraints are inconsistent (row {bad} is a dependent row with a different right-hand side)")));
        }
        let mats = red.independent.iter().map(|&i| mats[i].clone()).collect();
        let rhs = red.independent.iter().map(|&i| rhs[i].clone()).collect();
        Ok((sizes, mats, rhs))
    }

    fn to_problem(sizes: &[usize], c: Vec<DMatrix<f64>>, mats: &[Vec<RatMatrix>], rhs: &[Rational]) -> SdpProblem {
        SdpProblem {
            block_sizes: sizes.to_vec(),
            c,
            a: mats.iter().map(|row| row.iter().map(|m| exact::to_f64(m)).collect()).collect(),
            b: rhs.iter().map(rational::to_f64).collect(),
        }
    }

    /// Minimizes `γ`.
    pub fn solve(&self, opts: &SolverOptions) -> Result<ProgramSolution> {
        self.validate()?;
        let (sizes, mats, rhs) = self.linear_system(None)?;
        let (_, rows) = self.expanded();
        let c: Vec<DMatrix<f64>> = rows[0].iter().map(|m| exact::to_f64(m)).collect();
        let problem = Self::to_problem(&sizes, c, &mats, &rhs);
        let raw = solver::solve(&problem, opts)?;
        let r0 = rational::to_f64(&self.r[0]);
        Ok(ProgramSolution {
            gamma: raw.primal_obj + r0,
            dual_gamma: raw.dual_obj + r0,
            blocks: raw.x[..self.block_sizes.len()].to_vec(),
            raw,
        })
    }

    /// Finds a point with `γ` fixed, near the analytic center of the
    /// feasible set (zero objective).
    pub fn solve_at(&self, gamma: &Rational, opts: &SolverOptions) -> Result<ProgramSolution> {
        self.validate()?;
        let (sizes, mats, rhs) = self.linear_system(Some(gamma))?;
        let c = sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();
        let problem = Self::to_problem(&sizes, c, &mats, &rhs);
        let raw = solver::solve(&problem, opts)?;
        let g = rational::to_f64(gamma);
        Ok(ProgramSolution { gamma: g, dual_gamma: g, blocks: raw.x[..self.block_sizes.len()].to_vec(), raw })
    }

    /// `r_k + ⟨A_k, X⟩` for every row.
    pub fn row_values(&self, x: &[RatMatrix]) -> Vec<Rational> {
        self.rows
            .iter()
            .zip(&self.r)
            .map(|(row, rk)| row.iter().zip(x).fold(rk.clone(), |acc, (a, xb)| acc + inner(a, xb)))
            .collect()
    }

    /// Smallest valid `γ` for given blocks: the largest row value for an
    /// inequality program; the common row value (if any) otherwise.
    pub fn gamma_of(&self, x: &[RatMatrix]) -> Option<Rational> {
        let vals = self.row_values(x);
        if self.inequality {
            rational::max_of(&vals)
        } else {
            let first = vals[0].clone();
            vals.iter().all(|v| *v == first).then_some(first)
        }
    }

    /// Orthogonal projection (in upper-triangular coordinates) of rounded
    /// blocks onto the affine set of exact solutions. Only meaningful for
    /// equality programs.
    pub fn project(&self, x: &[RatMatrix], gamma: Option<&Rational>) -> Result<Vec<RatMatrix>> {
        let (sizes, mats, rhs) = self.linear_system(gamma)?;
        if sizes.len() != x.len() {
            return Err(Error::Dimension("projection expects all program blocks".into()));
        }
        project_affine(&sizes, &mats, &rhs, x)
    }

    /// Projection of the program blocks (slacks excluded) onto
    /// `{X : r_k + ⟨A_k, X⟩ = γ for k ∈ rows}`.
    pub fn project_onto_rows(&self, x: &[RatMatrix], rows: &[usize], gamma: &Rational) -> Result<Vec<RatMatrix>> {
        if x.len() != self.block_sizes.len() {
            return Err(Error::Dimension("projection expects the program blocks".into()));
        }
        let coords = Self::coords(&self.block_sizes);
        let mats: Vec<Vec<RatMatrix>> = rows.iter().map(|&k| self.rows[k].clone()).collect();
        let rhs: Vec<Rational> = rows.iter().map(|&k| gamma - &self.r[k]).collect();
        let vecs: Vec<Vec<Rational>> = mats.iter().map(|m| Self::vectorize_row(m, &coords)).collect();
        let red = exact::reduce_rows(&vecs, &rhs);
        if red.inconsistent.is_some() {
            return Err(Error::Rounding("binding rows are inconsistent at the snapped bound".into()));
        }
        let mats: Vec<Vec<RatMatrix>> = red.independent.iter().map(|&i| mats[i].clone()).collect();
        let rhs: Vec<Rational> = red.independent.iter().map(|&i| rhs[i].clone()).collect();
        project_affine(&self.block_sizes, &mats, &rhs, x)
    }

    /// Exact solution of the linear constraints when they determine every
    /// coordinate (only for equality programs).
    pub fn unique_solution(&self, gamma: Option<&Rational>) -> Result<Option<Vec<RatMatrix>>> {
        let (sizes, mats, rhs) = self.linear_system(gamma)?;
        let coords = Self::coords(&sizes);
        if self.inequality || mats.len() < coords.len() {
            return Ok(None);
        }
        let zero: Vec<RatMatrix> = sizes.iter().map(|&s| zeros(s)).collect();
        project_affine(&sizes, &mats, &rhs, &zero).map(Some)
    }

    /// Exact PSD blocks satisfying `rows` with equality at `gamma`, built from
    /// a numeric point: first in facially reduced coordinates (numerical
    /// kernels rationalized and kept exactly), then by plain rounding.
    /// Both candidates are projected exactly onto the rows.
    pub fn round_on_face(&self, blocks: &[DMatrix<f64>], rows: &[usize], gamma: &Rational, denom: u64) -> Result<Option<Vec<RatMatrix>>> {
        let u: Vec<RatMatrix> = blocks.iter().map(|x| face_basis(x, 1e-7, 1000)).collect();
        let reduced = self.restrict(&u);
        let r: Vec<RatMatrix> = blocks.iter().zip(&u).map(|(x, ub)| round_symmetric(&reduce_numeric(ub, x), denom, 1e-12)).collect();
        if let Ok(rp) = reduced.project_onto_rows(&r, rows, gamma) {
            if all_psd(&rp)? {
                return Ok(Some(u.iter().zip(&rp).map(|(ub, rb)| lift(ub, rb)).collect()));
            }
        }
        let base: Vec<RatMatrix> = blocks.iter().map(|x| round_symmetric(x, denom, 1e-12)).collect();
        if let Ok(q) = self.project_onto_rows(&base, rows, gamma) {
            if all_psd(&q)? {
                return Ok(Some(q));
            }
        }
        Ok(None)
    }

    /// Appends zero slacks or reads them back for an equality/inequality
    /// program, for use with [`BoundProgram::project`].
    pub fn expanded_blocks(&self, x: &[RatMatrix], slacks: &[Rational]) -> Vec<RatMatrix> {
        let mut out = x.to_vec();
        if self.inequality {
            out.extend(slacks.iter().map(|s| vec![vec![s.clone()]]));
        }
        out
    }
}

fn project_affine(sizes: &[usize], mats: &[Vec<RatMatrix>], rhs: &[Rational], x: &[RatMatrix]) -> Result<Vec<RatMatrix>> {
    let coords = BoundProgram::coords(sizes);
    let z: Vec<Rational> = coords.iter().map(|&(b, i, j)| x[b][i][j].clone()).collect();
    let a: Vec<Vec<Rational>> = mats.iter().map(|m| BoundProgram::vectorize_row(m, &coords)).collect();
    let dot = |u: &[Rational], v: &[Rational]| u.iter().zip(v).fold(Rational::zero(), |s, (p, q)| if p.is_zero() || q.is_zero() { s } else { s + p * q });
    let resid: Vec<Rational> = a.iter().zip(rhs).map(|(row, bk)| dot(row, &z) - bk).collect();
    let gram: Vec<Vec<Rational>> = a.iter().map(|ri| a.iter().map(|rj| dot(ri, rj)).collect()).collect();
    let w = exact::solve(&gram, &resid)?;
    let mut out: Vec<RatMatrix> = sizes.iter().map(|&s| zeros(s)).collect();
    for (c, &(b, i, j)) in coords.iter().enumerate() {
        let corr = a.iter().zip(&w).fold(Rational::zero(), |s, (row, wk)| if row[c].is_zero() { s } else { s + &row[c] * wk });
        let v = &z[c] - corr;
        out[b][j][i] = v.clone();
        out[b][i][j] = v;
    }
    Ok(out)
}

/// Rational basis `U` (columns, `n × r`) of the orthogonal complement of the
/// numerical kernel of `x`: eigenvectors with eigenvalue below
/// `tol · max(1, λ_max)` are rationalized through their echelon form.
pub fn face_basis(x: &DMatrix<f64>, tol: f64, denom: u64) -> RatMatrix {
    let n = x.nrows();
    if n == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new((x + x.transpose()) * 0.5);
    let top = eig.eigenvalues.iter().cloned().fold(1.0f64, f64::max);
    let kernel: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] < tol * top).collect();
    let cols: Vec<Vec<Rational>> = if kernel.is_empty() {
        (0..n).map(|i| (0..n).map(|j| if i == j { rational::one() } else { Rational::zero() }).collect()).collect()
    } else {
        // float echelon form of the kernel rows, then rationalize
        let mut k = DMatrix::from_fn(kernel.len(), n, |r, c| eig.eigenvectors[(c, kernel[r])]);
        let mut row = 0;
        for c in 0..n {
            if row == k.nrows() {
                break;
            }
            let p = (row..k.nrows()).max_by(|&a, &b| k[(a, c)].abs().total_cmp(&k[(b, c)].abs())).unwrap();
            if k[(p, c)].abs() < 1e-9 {
                continue;
            }
            k.swap_rows(p, row);
            let piv = k[(row, c)];
            for j in 0..n {
                k[(row, j)] /= piv;
            }
            for i in 0..k.nrows() {
                if i != row {
                    let f = k[(i, c)];
                    for j in 0..n {
                        k[(i, j)] -= f * k[(row, j)];
                    }
                }
            }
            row += 1;
        }
        let kr: RatMatrix = (0..row).map(|r| (0..n).map(|c| rational::approximate(k[(r, c)], denom)).collect()).collect();
        exact::nullspace(&kr, n)
    };
    // n × r with the basis vectors as columns
    (0..n).map(|i| cols.iter().map(|v| v[i].clone()).collect()).collect()
}

fn transpose(m: &[Vec<Rational>], rows: usize) -> RatMatrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| (0..rows).map(|i| m[i][j].clone()).collect()).collect()
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>], inner_dim: usize) -> RatMatrix {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|ra| {
            (0..cols)
                .map(|j| (0..inner_dim).fold(Rational::zero(), |s, k| if ra[k].is_zero() || b[k][j].is_zero() { s } else { s + &ra[k] * &b[k][j] }))
                .collect()
        })
        .collect()
}

/// `U R Uᵀ`.
pub fn lift(u: &[Vec<Rational>], r: &[Vec<Rational>]) -> RatMatrix {
    let n = u.len();
    let k = r.len();
    if k == 0 {
        return zeros(n);
    }
    let ur = mat_mul(u, r, k);
    mat_mul(&ur, &transpose(u, n), k)
}

/// Least-squares `R` with `U R Uᵀ ≈ X`.
pub fn reduce_numeric(u: &[Vec<Rational>], x: &DMatrix<f64>) -> DMatrix<f64> {
    let k = u.first().map_or(0, |r| r.len());
    if k == 0 {
        return DMatrix::zeros(0, 0);
    }
    let uf = exact::to_f64(u);
    let pinv = (uf.transpose() * &uf).try_inverse().expect("basis columns are independent") * uf.transpose();
    &pinv * x * pinv.transpose()
}

impl BoundProgram {
    /// The program in the coordinates `X_b = U_b R_b U_bᵀ`.
    pub fn restrict(&self, u: &[RatMatrix]) -> BoundProgram {
        let sizes: Vec<usize> = u.iter().map(|ub| ub.first().map_or(0, |r| r.len())).collect();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(u)
                    .map(|(a, ub)| {
                        let n = ub.len();
                        let ut = transpose(ub, n);
                        let ua = mat_mul(&ut, a, n);
                        mat_mul(&ua, ub, n)
                    })
                    .collect()
            })
            .collect();
        BoundProgram { block_sizes: sizes, rows, r: self.r.clone(), inequality: self.inequality }
    }
}

/// Rounds a symmetric float matrix: eigenvalues floored at `floor`, then
/// every entry replaced by its best rational approximation with
/// denominator at most `denom`.
pub fn round_symmetric(x: &DMatrix<f64>, denom: u64, floor: f64) -> RatMatrix {
    let n = x.nrows();
    if n == 0 {
        return Vec::new();
    }
    let sym = (x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lam = eig.eigenvalues.map(|v| v.max(floor));
    let rec = &eig.eigenvectors * DMatrix::from_diagonal(&lam) * eig.eigenvectors.transpose();
    let mut out = zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = rational::approximate(0.5 * (rec[(i, j)] + rec[(j, i)]), denom);
            out[j][i] = v.clone();
            out[i][j] = v;
        }
    }
    out
}

pub fn all_psd(blocks: &[RatMatrix]) -> Result<bool> {
    for b in blocks {
        if !exact::check_psd_rational(b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn min_diag_nonneg(blocks: &[RatMatrix]) -> bool {
    blocks.iter().all(|b| b.iter().enumerate().all(|(i, r)| !r[i].is_negative()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn scalar_bound() {
        // γ ≥ 1 + 0·X and γ ≥ 2 − X with X ≥ 0 → γ = 1 at X = 1
        let p = BoundProgram {
            block_sizes: vec![1],
            rows: vec![vec![vec![vec![int(0)]]], vec![vec![vec![int(-1)]]]],
            r: vec![int(1), int(2)],
            inequality: true,
        };
        let sol = p.solve(&SolverOptions::default()).unwrap();
        assert!((sol.gamma - 1.0).abs() < 1e-7);
        let x = vec![round_symmetric(&sol.blocks[0], 100, 0.0)];
        assert_eq!(p.gamma_of(&x), Some(int(1)));
    }

    #[test]
    fn single_row_bound() {
        let p = BoundProgram { block_sizes: vec![1], rows: vec![vec![vec![vec![int(0)]]]], r: vec![int(1)], inequality: true };
        let sol = p.solve(&SolverOptions::default()).unwrap();
        assert!((sol.gamma - 1.0).abs() < 1e-7);
    }

    #[test]
    fn projection_lands_on_constraints() {
        // equality: γ = X_00 + X_11, γ = 1 + X_01·2
        let r0 = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let r1 = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        let p = BoundProgram { block_sizes: vec![2], rows: vec![vec![r0], vec![r1]], r: vec![int(0), int(1)], inequality: false };
        let x = vec![vec![vec![frac(1, 2), frac(1, 3)], vec![frac(1, 3), frac(2, 3)]]];
        let y = p.project(&x, None).unwrap();
        let g = p.gamma_of(&y).unwrap();
        assert_eq!(p.row_values(&y), vec![g.clone(), g]);
        let fixed = p.project(&x, Some(&int(3))).unwrap();
        assert_eq!(p.row_values(&fixed), vec![int(3), int(3)]);
    }

    #[test]
    fn face_of_rank_one() {
        let x = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5 + 1e-12]);
        let u = face_basis(&x, 1e-7, 1000);
        assert_eq!(u, vec![vec![int(-1)], vec![int(1)]]);
        let r = reduce_numeric(&u, &x);
        assert!((r[(0, 0)] - 0.5).abs() < 1e-9);
        let q = lift(&u, &[vec![frac(1, 2)]]);
        assert_eq!(q, vec![vec![frac(1, 2), frac(-1, 2)], vec![frac(-1, 2), frac(1, 2)]]);
        let full = face_basis(&DMatrix::identity(2, 2), 1e-7, 1000);
        assert_eq!(full.len(), 2);
        assert_eq!(full[0].len(), 2);
    }

    #[test]
    fn inconsistent_rows_are_infeasible() {
        let z = vec![vec![int(0)]];
        let p = BoundProgram { block_sizes: vec![1], rows: vec![vec![z.clone()], vec![z]], r: vec![int(0), int(1)], inequality: false };
        assert!(matches!(p.solve(&SolverOptions::default()), Err(Error::Infeasible(_))));
    }
}
