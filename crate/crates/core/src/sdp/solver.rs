//! Dense primal-dual interior-point method for block-diagonal SDPs
//!
//! ```text
//! min ⟨C, X⟩  s.t.  ⟨A_k, X⟩ = b_k,  X ⪰ 0
//! max bᵀy     s.t.  C − Σ y_k A_k = S ⪰ 0
//! ```
//!
//! Infeasible start, Nesterov–Todd scaling, Mehrotra predictor-corrector.
//! When the main iteration fails, an elastic phase-1 problem decides
//! between infeasibility and plain non-convergence.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub block_sizes: Vec<usize>,
    pub c: Vec<DMatrix<f64>>,
    /// `a[k][b]`: constraint `k` restricted to block `b`.
    pub a: Vec<Vec<DMatrix<f64>>>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-9, max_iters: 100 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct IterationLog {
    pub iteration: usize,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// Complementarity `⟨X, S⟩`.
    pub gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub s: Vec<DMatrix<f64>>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub iterations: usize,
    pub history: Vec<IterationLog>,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        let nb = self.block_sizes.len();
        let dims_ok = |ms: &[DMatrix<f64>]| ms.len() == nb && ms.iter().zip(&self.block_sizes).all(|(m, &s)| m.nrows() == s && m.ncols() == s);
        if !dims_ok(&self.c) || self.a.len() != self.b.len() || !self.a.iter().all(|r| dims_ok(r)) {
            return Err(Error::Dimension("SDP data does not match the block sizes".into()));
        }
        let total: usize = self.block_sizes.iter().sum();
        let nontrivial: usize = self.block_sizes.iter().filter(|&&s| s > 1).sum();
        if nontrivial > 50 || self.b.len() > 200 || total > 600 {
            return Err(Error::Budget(format!(
                "SDP too large: PSD dimension {nontrivial}, {} constraints (limits 50, 200)",
                self.b.len()
            )));
        }
        Ok(())
    }

    fn a_op(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.b.len(), self.a.iter().map(|ak| ak.iter().zip(x).map(|(a, x)| a.dot(x)).sum::<f64>()))
    }

    fn at_op(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.block_sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();
        for (k, ak) in self.a.iter().enumerate() {
            if y[k] != 0.0 {
                for (o, a) in out.iter_mut().zip(ak) {
                    *o += a * y[k];
                }
            }
        }
        out
    }

    fn dim(&self) -> usize {
        self.block_sizes.iter().sum()
    }
}

fn dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn fro(a: &[DMatrix<f64>]) -> f64 {
    dot(a, a).sqrt()
}

/// Largest `α` with `X + α ΔX ⪰ 0`, given the Cholesky factor of `X`.
fn max_step(l: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let li = l.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(l.nrows(), l.ncols()));
    let m = &li * dx * li.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let min = SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        -1.0 / min
    } else {
        f64::INFINITY
    }
}

fn chol(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    sym.cholesky().map(|c| c.l())
}

struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    w: DMatrix<f64>,
    lambda: Vec<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Scaling> {
    let l = chol(x)?;
    let m = l.transpose() * s * &l;
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    if eig.eigenvalues.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|v| v.sqrt()).collect();
    let u = eig.eigenvectors;
    let n = lambda.len();
    let d_inv_half = DMatrix::from_fn(n, n, |i, j| if i == j { lambda[i].powf(-0.5) } else { 0.0 });
    let d_half = DMatrix::from_fn(n, n, |i, j| if i == j { lambda[i].sqrt() } else { 0.0 });
    let g = &l * &u * d_inv_half;
    let l_inv = l.try_inverse()?;
    let g_inv = d_half * u.transpose() * l_inv;
    let w = &g * g.transpose();
    Some(Scaling { g, g_inv, w, lambda })
}

/// Runs the interior-point method; falls back to phase-1 for diagnosis.
pub fn solve(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    problem.validate()?;
    match ipm(problem, opts) {
        Ok(sol) => Ok(sol),
        Err(Error::NotConverged(msg)) => {
            let phase1 = elastic_residual(problem, opts)?;
            let scale = 1.0 + problem.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if phase1 > 1e-6 * scale {
                Err(Error::Infeasible(format!("elastic phase-1 residual {phase1:.3e}")))
            } else {
                Err(Error::NotConverged(msg))
            }
        }
        Err(e) => Err(e),
    }
}

/// Optimal value of `min Σ(u + v) + ε tr X` s.t. `⟨A_k, X⟩ + u_k − v_k = b_k`.
fn elastic_residual(problem: &SdpProblem, opts: &SolverOptions) -> Result<f64> {
    let k = problem.b.len();
    let eps = 1e-8;
    let mut sizes = problem.block_sizes.clone();
    sizes.extend(std::iter::repeat_n(1, 2 * k));
    let mut c: Vec<DMatrix<f64>> = problem.block_sizes.iter().map(|&s| DMatrix::identity(s, s) * eps).collect();
    c.extend(std::iter::repeat_n(DMatrix::from_element(1, 1, 1.0), 2 * k));
    let a = (0..k)
        .map(|r| {
            let mut row = problem.a[r].clone();
            for j in 0..2 * k {
                let v = if j == r { 1.0 } else if j == k + r { -1.0 } else { 0.0 };
                row.push(DMatrix::from_element(1, 1, v));
            }
            row
        })
        .collect();
    let p1 = SdpProblem { block_sizes: sizes, c, a, b: problem.b.clone() };
    let opts = SolverOptions { tol: opts.tol.max(1e-9), max_iters: opts.max_iters.max(100) };
    match ipm(&p1, &opts) {
        Ok(sol) => Ok(sol.primal_obj.max(sol.dual_obj)),
        Err(Error::NotConverged(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn ipm(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    let m = p.b.len();
    let nb = p.block_sizes.len();
    let b = DVector::from_vec(p.b.clone());
    let norm_b = b.norm();
    let norm_c = fro(&p.c);
    let mut x: Vec<DMatrix<f64>> = Vec::with_capacity(nb);
    let mut s: Vec<DMatrix<f64>> = Vec::with_capacity(nb);
    for (j, &n) in p.block_sizes.iter().enumerate() {
        let nf = n as f64;
        let mut xi = 10.0f64.max(nf.sqrt());
        let mut eta = 10.0f64.max(nf.sqrt());
        for (k, ak) in p.a.iter().enumerate() {
            let na = ak[j].norm();
            xi = xi.max(nf * (1.0 + p.b[k].abs()) / (1.0 + na));
            eta = eta.max((1.0 + na) / nf.sqrt());
        }
        eta = eta.max((1.0 + p.c[j].norm()) / nf.sqrt());
        x.push(DMatrix::identity(n, n) * xi);
        s.push(DMatrix::identity(n, n) * eta);
    }
    let mut y = DVector::<f64>::zeros(m);
    let total = p.dim() as f64;
    let mut history = Vec::new();
    let mut best_stall = 0;
    for iter in 0..=opts.max_iters {
        let ax = p.a_op(&x);
        let rp = &b - &ax;
        let aty = p.at_op(&y);
        let rd: Vec<DMatrix<f64>> = (0..nb).map(|j| &p.c[j] - &aty[j] - &s[j]).collect();
        let gap = dot(&x, &s);
        let pobj = dot(&p.c, &x);
        let dobj = b.dot(&y);
        let pinf = rp.norm() / (1.0 + norm_b);
        let dinf = fro(&rd) / (1.0 + norm_c);
        history.push(IterationLog { iteration: iter, primal_obj: pobj, dual_obj: dobj, gap, primal_infeas: pinf, dual_infeas: dinf });
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol && relgap <= opts.tol {
            return Ok(SdpSolution {
                x,
                y: y.iter().cloned().collect(),
                s,
                primal_obj: pobj,
                dual_obj: dobj,
                gap,
                primal_infeas: pinf,
                dual_infeas: dinf,
                iterations: iter,
                history,
            });
        }
        if iter == opts.max_iters {
            break;
        }
        if !y.iter().all(|v| v.is_finite()) || y.amax() > 1e12 || x.iter().any(|xi| xi.amax() > 1e12) {
            return Err(Error::NotConverged(format!("iterates diverged after {iter} iterations")));
        }
        let mu = gap / total;
        let sc: Vec<Scaling> = (0..nb)
            .map(|j| nt_scaling(&x[j], &s[j]))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::NotConverged(format!("lost positive definiteness at iteration {iter}")))?;
        // Schur complement M_ij = Σ_b ⟨A_i, W A_j W⟩
        let waw: Vec<Vec<DMatrix<f64>>> = p.a.iter().map(|ak| (0..nb).map(|j| &sc[j].w * &ak[j] * &sc[j].w).collect()).collect();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for k in i..m {
                let v: f64 = (0..nb).map(|j| p.a[i][j].dot(&waw[k][j])).sum();
                schur[(i, k)] = v;
                schur[(k, i)] = v;
            }
        }
        // tiny diagonal shifts keep nearly singular Schur matrices factorable
        let top = (0..m).map(|i| schur[(i, i)].abs()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
        let chol_m = [0.0, 1e-14, 1e-12, 1e-10]
            .iter()
            .find_map(|&eps| (schur.clone() + DMatrix::<f64>::identity(m, m) * (eps * top)).cholesky());
        let lu_m = if chol_m.is_none() { Some(schur.clone().lu()) } else { None };
        let solve_m = |rhs: &DVector<f64>| -> Option<DVector<f64>> {
            match (&chol_m, &lu_m) {
                (Some(c), _) => Some(c.solve(rhs)),
                (None, Some(lu)) => lu.solve(rhs),
                _ => None,
            }
        };
        let wrdw: Vec<DMatrix<f64>> = (0..nb).map(|j| &sc[j].w * &rd[j] * &sc[j].w).collect();
        let a_wrdw = p.a_op(&wrdw);
        // direction for scaled complementarity right-hand side r (per block, in V coordinates)
        let direction = |r: &[DMatrix<f64>]| -> Option<(Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>)> {
            let rhat: Vec<DMatrix<f64>> = (0..nb)
                .map(|j| {
                    let lam = &sc[j].lambda;
                    let n = lam.len();
                    let h = DMatrix::from_fn(n, n, |a, c| r[j][(a, c)] / (lam[a] + lam[c]));
                    &sc[j].g * h * sc[j].g.transpose()
                })
                .collect();
            let rhs = &rp - p.a_op(&rhat) + &a_wrdw;
            let dy = solve_m(&rhs)?;
            let atdy = p.at_op(&dy);
            let ds: Vec<DMatrix<f64>> = (0..nb).map(|j| &rd[j] - &atdy[j]).collect();
            let dx: Vec<DMatrix<f64>> = (0..nb)
                .map(|j| {
                    let d = &rhat[j] - &sc[j].w * &ds[j] * &sc[j].w;
                    (&d + d.transpose()) * 0.5
                })
                .collect();
            Some((dx, dy, ds))
        };
        let lx: Vec<DMatrix<f64>> = x.iter().map(|xi| chol(xi).unwrap()).collect();
        let ls: Vec<DMatrix<f64>> = s.iter().map(|si| chol(si).unwrap()).collect();
        let steps = |dx: &[DMatrix<f64>], ds: &[DMatrix<f64>]| -> (f64, f64) {
            let ap = (0..nb).map(|j| max_step(&lx[j], &dx[j])).fold(f64::INFINITY, f64::min);
            let ad = (0..nb).map(|j| max_step(&ls[j], &ds[j])).fold(f64::INFINITY, f64::min);
            (ap, ad)
        };
        // predictor
        let r_aff: Vec<DMatrix<f64>> = sc
            .iter()
            .map(|c| {
                let n = c.lambda.len();
                DMatrix::from_fn(n, n, |a, b| if a == b { -2.0 * c.lambda[a] * c.lambda[a] } else { 0.0 })
            })
            .collect();
        let (dx_a, _, ds_a) = direction(&r_aff).ok_or_else(|| Error::NotConverged("singular Schur complement".into()))?;
        let (ap, ad) = steps(&dx_a, &ds_a);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let x_aff: Vec<DMatrix<f64>> = (0..nb).map(|j| &x[j] + &dx_a[j] * ap).collect();
        let s_aff: Vec<DMatrix<f64>> = (0..nb).map(|j| &s[j] + &ds_a[j] * ad).collect();
        let mu_aff = dot(&x_aff, &s_aff) / total;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        // corrector
        let r_cor: Vec<DMatrix<f64>> = (0..nb)
            .map(|j| {
                let c = &sc[j];
                let n = c.lambda.len();
                let dxt = &c.g_inv * &dx_a[j] * c.g_inv.transpose();
                let dst = c.g.transpose() * &ds_a[j] * &c.g;
                let cross = &dxt * &dst + &dst * &dxt;
                DMatrix::from_fn(n, n, |a, b| {
                    let base = if a == b { 2.0 * sigma * mu - 2.0 * c.lambda[a] * c.lambda[a] } else { 0.0 };
                    base - cross[(a, b)]
                })
            })
            .collect();
        let (dx, dy, ds) = direction(&r_cor).ok_or_else(|| Error::NotConverged("singular Schur complement".into()))?;
        let (ap, ad) = steps(&dx, &ds);
        let tau = 0.98;
        let (ap, ad) = ((tau * ap).min(1.0), (tau * ad).min(1.0));
        if ap < 1e-10 && ad < 1e-10 {
            best_stall += 1;
            if best_stall > 3 {
                return Err(Error::NotConverged(format!("step length collapsed at iteration {iter}")));
            }
        }
        for j in 0..nb {
            x[j] += &dx[j] * ap;
            s[j] += &ds[j] * ad;
            x[j] = (&x[j] + x[j].transpose()) * 0.5;
            s[j] = (&s[j] + s[j].transpose()) * 0.5;
        }
        y += dy * ad;
    }
    let last = history.last().copied().unwrap();
    Err(Error::NotConverged(format!(
        "{} iterations: gap {:.2e}, primal infeasibility {:.2e}, dual infeasibility {:.2e}",
        opts.max_iters, last.gap, last.primal_infeas, last.dual_infeas
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1(v: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, v)
    }

    #[test]
    fn scalar_lp() {
        // min x s.t. x = 1
        let p = SdpProblem { block_sizes: vec![1], c: vec![m1(1.0)], a: vec![vec![m1(1.0)]], b: vec![1.0] };
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert!((sol.primal_obj - 1.0).abs() < 1e-8);
        assert!(sol.gap <= 1e-9);
    }

    #[test]
    fn two_by_two() {
        // min ⟨C, X⟩, tr X = 1 → smallest eigenvalue of C
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let p = SdpProblem { block_sizes: vec![2], c: vec![c], a: vec![vec![DMatrix::identity(2, 2)]], b: vec![1.0] };
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert!((sol.primal_obj - 1.0).abs() < 1e-8);
        assert!((sol.dual_obj - 1.0).abs() < 1e-8);
        for h in &sol.history {
            if h.primal_infeas < 1e-10 && h.dual_infeas < 1e-10 {
                assert!(h.primal_obj >= h.dual_obj - 1e-12);
            }
        }
    }

    #[test]
    fn infeasible_detected() {
        // X ⪰ 0 with X_00 = −1
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let p = SdpProblem { block_sizes: vec![2], c: vec![DMatrix::identity(2, 2)], a: vec![vec![e]], b: vec![-1.0] };
        assert!(matches!(solve(&p, &SolverOptions::default()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn budget_enforced() {
        let n = 51;
        let p = SdpProblem { block_sizes: vec![n], c: vec![DMatrix::identity(n, n)], a: vec![], b: vec![] };
        assert!(matches!(solve(&p, &SolverOptions::default()), Err(Error::Budget(_))));
    }
}
