//! The symmetry-adapted block SDP restricted to a set of partitions.
//!
//! Feasibility: find `Q_λ ⪰ 0` with `target ≡ Σ_λ n_λ ⟨Q_λ, Y_λ⟩`.
//! Bound: minimize `γ` with `γ − target ≡ Σ_λ n_λ ⟨Q_λ, Y_λ⟩ + Σ_H c_H d_H`,
//! `c_H ≥ 0`, for the hosts `H` of a small fixed size.
//!
//! Both sides are S_n-invariant, so equality modulo the ideal is imposed by
//! evaluating at one graph per isomorphism class of A-free graphs on `n`
//! vertices.

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::SeedableRng;

use super::certificate::{Certificate, CertificateBlock, CertificateKind, GpMode, Setup};
use super::exact::RatMatrix;
use super::program::{self, BoundProgram, ProgramSolution};
use super::solver::SolverOptions;
use crate::error::{Error, Result};
use crate::flags::{d_h, d_theta_f, expectation_over_labelings, quadratic_form, Labeling};
use crate::graph::{enumerate_a_free, Flag, Graph, GraphJson};
use crate::perm::Permutation;
use crate::poly::MultilinearPoly;
use crate::rational::{self, Rational};
use crate::symrep::{partitions_lex_geq, symmetry_adapted_basis, y_matrix, Partition, SabBasis, YMatrix};

/// Default size of the hosts whose densities serve as nonnegative slack in
/// bound mode: edge and non-edge densities, i.e. `0 ≤ x_ij ≤ 1`.
pub const GP_HOST_SIZE: usize = 2;

#[derive(Clone, Debug)]
pub struct GpSdpInstance {
    pub forbidden: Graph,
    pub target: MultilinearPoly,
    pub hook_t: usize,
    pub degree: usize,
    pub mode: GpMode,
    /// Partitions with a nonempty block, in basis order.
    pub partitions: Vec<Partition>,
    pub y_matrices: Vec<YMatrix>,
    pub n_lambda: Vec<u64>,
    pub host_size: usize,
    pub hosts: Vec<Graph>,
    pub host_polys: Vec<MultilinearPoly>,
    /// One A-free graph per isomorphism class on `n` vertices.
    pub classes: Vec<Graph>,
}

/// Exact `S_n`-invariance: invariance under every adjacent transposition,
/// plus random permutation probes as a cross-check.
pub fn check_invariant(p: &MultilinearPoly) -> Result<()> {
    let n = p.n();
    for i in 0..n.saturating_sub(1) {
        if !p.is_invariant_under(&Permutation::transposition(n, i, i + 1)) {
            return Err(Error::NotInvariant(format!("not fixed by the transposition ({} {})", i + 1, i + 2)));
        }
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..10 {
        let s = Permutation::random(n, &mut rng);
        if !p.is_invariant_under(&s) {
            return Err(Error::NotInvariant(format!("not fixed by {:?}", s.images())));
        }
    }
    Ok(())
}

/// Uses the partitions lexicographically at least the hook `(n − t, 1^t)`.
pub fn assemble_gp_sdp(target: &MultilinearPoly, hook_t: usize, basis: &SabBasis, a: &Graph, mode: GpMode) -> Result<GpSdpInstance> {
    let lambdas = partitions_lex_geq(basis.n(), hook_t)?;
    assemble_gp_sdp_with(target, hook_t, &lambdas, basis, a, mode, GP_HOST_SIZE)
}

/// Uses exactly the given partitions, which must all be present in `basis`.
pub fn assemble_gp_sdp_with(
    target: &MultilinearPoly,
    hook_t: usize,
    lambdas: &[Partition],
    basis: &SabBasis,
    a: &Graph,
    mode: GpMode,
    host_size: usize,
) -> Result<GpSdpInstance> {
    let n = basis.n();
    if mode == GpMode::Bound && (host_size == 0 || host_size > n) {
        return Err(Error::Parameter(format!("slack host size {host_size} must lie in 1..={n}")));
    }
    if target.n() != n {
        return Err(Error::Dimension(format!("target on {} vertices, basis on {n}", target.n())));
    }
    check_invariant(target)?;
    let present = basis.partitions();
    let mut partitions = Vec::new();
    let mut y_matrices = Vec::new();
    let mut n_lambda = Vec::new();
    for l in lambdas {
        if !present.contains(l) {
            return Err(Error::Parameter(format!("basis has no block for {l}")));
        }
        if basis.multiplicity(l) == 0 {
            continue;
        }
        y_matrices.push(y_matrix(basis, l)?);
        n_lambda.push(l.dimension());
        partitions.push(l.clone());
    }
    let classes = enumerate_a_free(n, a)?;
    if classes.is_empty() {
        return Err(Error::Parameter(format!("no {n}-vertex graph avoids the forbidden graph")));
    }
    let (hosts, host_polys) = match mode {
        GpMode::Feasibility => (Vec::new(), Vec::new()),
        GpMode::Bound => {
            let hosts = enumerate_a_free(host_size, a)?;
            let polys = hosts.iter().map(|h| d_h(h, n)).collect::<Result<Vec<_>>>()?;
            (hosts, polys)
        }
    };
    Ok(GpSdpInstance {
        forbidden: *a,
        target: target.clone(),
        hook_t,
        degree: basis.d(),
        mode,
        partitions,
        y_matrices,
        n_lambda,
        host_size: if mode == GpMode::Bound { host_size } else { 0 },
        hosts,
        host_polys,
        classes,
    })
}

impl GpSdpInstance {
    pub fn n(&self) -> usize {
        self.target.n()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.y_matrices.iter().map(|y| y.size()).chain(self.hosts.iter().map(|_| 1)).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.partitions.iter().map(|p| p.to_string()).chain((0..self.hosts.len()).map(|k| format!("host{k}"))).collect()
    }

    fn row_at(&self, bits: u64) -> Vec<RatMatrix> {
        let mut row: Vec<RatMatrix> = self
            .y_matrices
            .iter()
            .zip(&self.n_lambda)
            .map(|(y, &w)| {
                let w = rational::int(w as i64);
                y.entries.iter().map(|r| r.iter().map(|p| p.eval_bits(bits) * &w).collect()).collect()
            })
            .collect();
        row.extend(self.host_polys.iter().map(|p| vec![vec![p.eval_bits(bits)]]));
        row
    }

    pub fn program(&self) -> BoundProgram {
        let mut rows = Vec::new();
        let mut r = Vec::new();
        for g in &self.classes {
            rows.push(self.row_at(g.mask()));
            let t = self.target.eval_bits(g.mask());
            r.push(match self.mode {
                GpMode::Feasibility => -t,
                GpMode::Bound => t,
            });
        }
        BoundProgram { block_sizes: self.block_sizes(), rows, r, inequality: false }
    }

    /// `Σ_λ n_λ ⟨Q_λ, Y_λ⟩ + Σ_H c_H d_H` as a polynomial.
    pub fn sos_polynomial(&self, blocks: &[RatMatrix]) -> Result<MultilinearPoly> {
        if blocks.len() != self.block_sizes().len() {
            return Err(Error::Dimension(format!("{} blocks given, {} expected", blocks.len(), self.block_sizes().len())));
        }
        let mut out = MultilinearPoly::zero(self.n());
        for ((y, &w), q) in self.y_matrices.iter().zip(&self.n_lambda).zip(blocks) {
            out.add_scaled(&y.pair_with(q)?, &rational::int(w as i64));
        }
        for (p, c) in self.host_polys.iter().zip(&blocks[self.y_matrices.len()..]) {
            out.add_scaled(p, &c[0][0]);
        }
        Ok(out)
    }

    pub fn setup(&self) -> Setup {
        Setup::Gp {
            forbidden: GraphJson::from(&self.forbidden),
            n: self.n(),
            degree: self.degree,
            hook_t: self.hook_t,
            partitions: self.partitions.clone(),
            mode: self.mode,
            host_size: self.host_size,
            target: self.target.to_json(),
        }
    }

    pub fn from_setup(setup: &Setup) -> Result<Self> {
        match setup {
            Setup::Gp { forbidden, n, degree, hook_t, partitions, mode, host_size, target } => {
                let a = forbidden.to_graph()?;
                let target = target.to_poly()?;
                if target.n() != *n {
                    return Err(Error::Dimension("target does not live on n vertices".into()));
                }
                let basis = symmetry_adapted_basis(*n, *degree, partitions)?;
                assemble_gp_sdp_with(&target, *hook_t, partitions, &basis, &a, *mode, *host_size)
            }
            Setup::Flag { .. } => Err(Error::Parameter("not a symmetric-program setup".into())),
        }
    }

    /// Minimizes `γ` (bound mode) or finds an interior feasible point.
    pub fn solve(&self, opts: &SolverOptions) -> Result<ProgramSolution> {
        let prog = self.program();
        match self.mode {
            GpMode::Bound => prog.solve(opts),
            GpMode::Feasibility => prog.solve_at(&Rational::zero(), opts),
        }
    }

    /// Solves with `γ` fixed (bound mode).
    pub fn solve_at(&self, gamma: &Rational, opts: &SolverOptions) -> Result<ProgramSolution> {
        self.program().solve_at(gamma, opts)
    }

    fn certificate(&self, blocks: Vec<RatMatrix>, bound: Rational) -> Certificate {
        Certificate {
            kind: CertificateKind::GpRestricted,
            bound,
            blocks: self.labels().into_iter().zip(blocks).map(|(label, matrix)| CertificateBlock { label, matrix }).collect(),
            setup: self.setup(),
        }
    }

    /// Exact certificate without a numeric solve, when the linear
    /// constraints pin down every entry.
    pub fn exact_certificate(&self, gamma: Option<&Rational>) -> Result<Option<Certificate>> {
        let prog = self.program();
        let g = match self.mode {
            GpMode::Feasibility => Some(Rational::zero()),
            GpMode::Bound => gamma.cloned(),
        };
        let Some(x) = prog.unique_solution(g.as_ref())? else {
            return Ok(None);
        };
        if !program::all_psd(&x)? {
            return Ok(None);
        }
        let bound = match g {
            Some(g) => g,
            None => prog.gamma_of(&x).ok_or_else(|| Error::Rounding("rows disagree after exact solve".into()))?,
        };
        Ok(Some(self.certificate(x, bound)))
    }
}

/// Rounds a numeric solution to an exact certificate.
///
/// Feasibility mode projects onto the exact constraints. Bound mode first
/// snaps `γ` to a nearby simple rational; failing that it backs off to
/// slightly larger `γ`, re-solves for an interior point there, and rounds
/// that point.
pub fn round_gp_solution(inst: &GpSdpInstance, sol: &ProgramSolution, denom: u64, opts: &SolverOptions) -> Result<Certificate> {
    let prog = inst.program();
    let all: Vec<usize> = (0..prog.rows.len()).collect();
    let attempt = |blocks: &[DMatrix<f64>], gamma: &Rational| -> Result<Option<Certificate>> {
        Ok(prog.round_on_face(blocks, &all, gamma, denom)?.map(|x| inst.certificate(x, gamma.clone())))
    };
    match inst.mode {
        GpMode::Feasibility => {
            if let Some(c) = inst.exact_certificate(None)? {
                return Ok(c);
            }
            let zero = Rational::zero();
            attempt(&sol.blocks, &zero)?.ok_or_else(|| Error::Rounding("no exact PSD point near the numeric solution".into()))
        }
        GpMode::Bound => {
            let snap = rational::approximate(sol.gamma, 1000);
            if (rational::to_f64(&snap) - sol.gamma).abs() <= 1e-7 {
                if let Some(c) = attempt(&sol.blocks, &snap)? {
                    return Ok(c);
                }
            }
            for delta in [1e-6, 1e-5, 1e-4, 1e-3] {
                let g = rational::approximate(sol.gamma + delta, 1_000_000);
                let Ok(inner) = inst.solve_at(&g, opts) else { continue };
                if let Some(c) = attempt(&inner.blocks, &g)? {
                    return Ok(c);
                }
            }
            Err(Error::Rounding(format!("no exact certificate within 1e-3 of the numeric bound {:.9}", sol.gamma)))
        }
    }
}

/// `E_Θ[vᵀ Q v]` with `v = (d^Θ_F)_F`: the polynomial a flag certificate
/// block asserts to be a sum of squares.
pub fn flag_sos_target(flags: &[Flag], q: &[Vec<Rational>], n: usize) -> Result<MultilinearPoly> {
    let t = flags.first().ok_or_else(|| Error::Parameter("no flags".into()))?.type_size();
    let theta = Labeling::identity(n, t);
    let v = flags.iter().map(|f| d_theta_f(f, &theta)).collect::<Result<Vec<_>>>()?;
    Ok(expectation_over_labelings(&quadratic_form(&v, q)))
}


#[cfg(test)]
mod bounds {
    use super::*;
    use crate::flags::{edge_density, graph_density};
    use crate::rational::frac;

    #[test]
    fn restriction_to_hook_partitions_loses_nothing() {
        let k3 = Graph::complete(3);
        let opts = SolverOptions::default();
        for n in 4..=6 {
            let all = symmetry_adapted_basis(n, 1, &[]).unwrap();
            for hs in [2, 3] {
                let hook = partitions_lex_geq(n, 1).unwrap();
                let restricted = assemble_gp_sdp_with(&edge_density(n), 1, &hook, &all, &k3, GpMode::Bound, hs).unwrap();
                let full = assemble_gp_sdp_with(&edge_density(n), 1, &all.partitions(), &all, &k3, GpMode::Bound, hs).unwrap();
                let a = restricted.solve(&opts).unwrap();
                let b = full.solve(&opts).unwrap();
                assert!(a.raw.gap <= 1e-9 && b.raw.gap <= 1e-9);
                assert!((a.gamma - b.gamma).abs() < 1e-6, "n={n} hs={hs}: {} vs {}", a.gamma, b.gamma);
            }
        }
    }

    #[test]
    fn edge_slack_alone_only_gives_the_trivial_bound() {
        let k3 = Graph::complete(3);
        let n = 5;
        let b = symmetry_adapted_basis(n, 1, &partitions_lex_geq(n, 1).unwrap()).unwrap();
        let inst = assemble_gp_sdp(&edge_density(n), 1, &b, &k3, GpMode::Bound).unwrap();
        let sol = inst.solve(&SolverOptions::default()).unwrap();
        let cert = round_gp_solution(&inst, &sol, 10_000, &SolverOptions::default()).unwrap();
        assert_eq!(cert.bound, rational::one());
    }

    /// With triple densities as slack the degree-one program certifies
    /// `e ≤ n²/4` in the form `Σ deg² ≥ 4e²/n`, i.e. density ≤ n / (2(n−1)).
    #[test]
    fn triple_slack_bound_is_degree_counting() {
        let k3 = Graph::complete(3);
        let opts = SolverOptions::default();
        for n in 4..=7 {
            let b = symmetry_adapted_basis(n, 1, &partitions_lex_geq(n, 1).unwrap()).unwrap();
            let inst = assemble_gp_sdp_with(&edge_density(n), 1, &b.partitions(), &b, &k3, GpMode::Bound, 3).unwrap();
            let sol = inst.solve(&opts).unwrap();
            let cert = round_gp_solution(&inst, &sol, 10_000, &opts).unwrap();
            let expected = frac(n as i64, 2 * (n as i64 - 1));
            assert_eq!(cert.bound, expected, "n={n}");
            let max = enumerate_a_free(n, &k3).unwrap().iter().map(graph_density).max().unwrap();
            assert!(max <= cert.bound);
            if n % 2 == 0 {
                assert_eq!(max, cert.bound);
            }
        }
    }
}
