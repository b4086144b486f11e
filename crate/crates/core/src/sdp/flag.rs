//! The flag-algebra SDP: minimize `α` subject to
//! `d(1_H) + Σ_{F,F'} Q_{F,F'} c[F,F'][H] ≤ α` for every host `H`, `Q ⪰ 0`.

use num_traits::Zero;

use super::certificate::{Certificate, CertificateBlock, CertificateKind, FamilyJson, Setup};
use super::exact::RatMatrix;
use super::program::{self, BoundProgram, ProgramSolution};
use super::solver::SolverOptions;
use crate::error::{Error, Result};
use crate::flags::{graph_density, pair_density_table, PairDensityTable};
use crate::graph::{enumerate_a_free, enumerate_flags, Flag, Graph, GraphJson, IntersectionType};
use crate::rational::{self, Rational};

/// One `(T, f)` block of the flag SDP.
#[derive(Clone, Debug)]
pub struct FlagFamily {
    pub ty: IntersectionType,
    pub f: usize,
    pub table: PairDensityTable,
}

impl FlagFamily {
    pub fn flags(&self) -> &[Flag] {
        &self.table.flags
    }

    pub fn label(&self) -> String {
        format!("T{},f{}", self.ty.size(), self.f)
    }
}

#[derive(Clone, Debug)]
pub struct FlagSdpInstance {
    pub forbidden: Graph,
    pub m: usize,
    pub hosts: Vec<Graph>,
    pub host_densities: Vec<Rational>,
    pub families: Vec<FlagFamily>,
}

pub fn assemble_flag_sdp(t: &IntersectionType, f: usize, m: usize, a: &Graph) -> Result<FlagSdpInstance> {
    assemble_flag_sdp_multi(&[(*t, f)], m, a)
}

/// Several `(T, f)` families sharing one host list; each contributes its
/// own PSD block.
pub fn assemble_flag_sdp_multi(families: &[(IntersectionType, usize)], m: usize, a: &Graph) -> Result<FlagSdpInstance> {
    if families.is_empty() {
        return Err(Error::Parameter("at least one (type, flag size) pair is required".into()));
    }
    for (t, f) in families {
        if m + t.size() < 2 * f {
            return Err(Error::Parameter(format!("host size {m} is below 2f − t = {}", 2 * f - t.size())));
        }
    }
    let hosts = enumerate_a_free(m, a)?;
    if hosts.is_empty() {
        return Err(Error::Parameter(format!("no {m}-vertex graph avoids the forbidden graph")));
    }
    let host_densities = hosts.iter().map(graph_density).collect();
    let mut out = Vec::new();
    for (t, f) in families {
        let flags = enumerate_flags(t, *f, a)?;
        if flags.is_empty() {
            return Err(Error::Parameter(format!("no flags of size {f} over the given type")));
        }
        let table = pair_density_table(&flags, &hosts)?;
        out.push(FlagFamily { ty: *t, f: *f, table });
    }
    Ok(FlagSdpInstance { forbidden: *a, m, hosts, host_densities, families: out })
}

impl FlagSdpInstance {
    pub fn flag_count(&self) -> usize {
        self.families.iter().map(|f| f.flags().len()).sum()
    }

    pub fn constraint_count(&self) -> usize {
        self.hosts.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.families.iter().map(|f| f.flags().len()).collect()
    }

    pub fn program(&self) -> BoundProgram {
        let rows = (0..self.hosts.len())
            .map(|h| {
                self.families
                    .iter()
                    .map(|fam| {
                        let k = fam.flags().len();
                        (0..k).map(|i| (0..k).map(|j| fam.table.entries[i][j][h].clone()).collect()).collect()
                    })
                    .collect()
            })
            .collect();
        BoundProgram { block_sizes: self.block_sizes(), rows, r: self.host_densities.clone(), inequality: true }
    }

    /// `a_H = Σ_blocks Σ_{F,F'} Q_{F,F'} c[F,F'][H]`.
    pub fn contributions(&self, q: &[RatMatrix]) -> Result<Vec<Rational>> {
        if q.len() != self.families.len() {
            return Err(Error::Dimension(format!("{} blocks given for {} families", q.len(), self.families.len())));
        }
        let mut a = vec![Rational::zero(); self.hosts.len()];
        for (fam, qb) in self.families.iter().zip(q) {
            let k = fam.flags().len();
            if qb.len() != k || qb.iter().any(|r| r.len() != k) {
                return Err(Error::Dimension(format!("block {} must be {k}×{k}", fam.label())));
            }
            for (ah, c) in a.iter_mut().zip(fam.table.contributions(qb)) {
                *ah += c;
            }
        }
        Ok(a)
    }

    /// `α = max_H (d(1_H) + a_H)`.
    pub fn bound_for(&self, q: &[RatMatrix]) -> Result<Rational> {
        let a = self.contributions(q)?;
        let vals: Vec<Rational> = self.host_densities.iter().zip(&a).map(|(d, x)| d + x).collect();
        Ok(rational::max_of(&vals).expect("hosts are nonempty"))
    }

    pub fn setup(&self) -> Setup {
        Setup::Flag {
            forbidden: GraphJson::from(&self.forbidden),
            host_size: self.m,
            families: self.families.iter().map(|f| FamilyJson { ty: GraphJson::from_type(&f.ty), f: f.f }).collect(),
        }
    }

    /// Rebuilds the instance a certificate refers to.
    pub fn from_setup(setup: &Setup) -> Result<Self> {
        match setup {
            Setup::Flag { forbidden, host_size, families } => {
                let a = forbidden.to_graph()?;
                let fams = families.iter().map(|f| Ok((f.ty.to_type()?, f.f))).collect::<Result<Vec<_>>>()?;
                assemble_flag_sdp_multi(&fams, *host_size, &a)
            }
            Setup::Gp { .. } => Err(Error::Parameter("not a flag setup".into())),
        }
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<ProgramSolution> {
        self.program().solve(opts)
    }

    pub fn certificate(&self, q: Vec<RatMatrix>) -> Result<Certificate> {
        let bound = self.bound_for(&q)?;
        Ok(Certificate {
            kind: CertificateKind::Flag,
            bound,
            blocks: self.families.iter().zip(q).map(|(f, m)| CertificateBlock { label: f.label(), matrix: m }).collect(),
            setup: self.setup(),
        })
    }
}

/// Rounds a numeric solution to an exact certificate.
///
/// First the bound is snapped to a nearby rational with a small
/// denominator and the rounded blocks are projected exactly onto the host
/// constraints that are tight at the numeric optimum; this recovers exact
/// optima such as `1/2`. Otherwise entries are rounded with denominators up
/// to `denom` and a growing multiple of the identity is added until the
/// blocks are PSD. The bound is always recomputed exactly.
pub fn round_flag_solution(inst: &FlagSdpInstance, sol: &ProgramSolution, denom: u64) -> Result<Certificate> {
    let base: Vec<RatMatrix> = sol.blocks.iter().map(|x| program::round_symmetric(x, denom, 1e-12)).collect();
    if let Some(c) = snapped(inst, sol, denom)? {
        return Ok(c);
    }
    let shifts = [0u64, 1, 10, 100, 1000];
    for &s in &shifts {
        let delta = Rational::new(s.into(), denom.into());
        let q: Vec<RatMatrix> = base
            .iter()
            .map(|b| {
                let mut b = b.clone();
                for (i, row) in b.iter_mut().enumerate() {
                    row[i] += &delta;
                }
                b
            })
            .collect();
        if program::all_psd(&q)? {
            return inst.certificate(q);
        }
    }
    let worst = sol.blocks.iter().map(|x| x.symmetric_eigenvalues().min()).fold(f64::INFINITY, f64::min);
    Err(Error::Rounding(format!("no PSD rounding with denominator ≤ {denom}; smallest eigenvalue of the numeric solution {worst:.3e}")))
}

fn snapped(inst: &FlagSdpInstance, sol: &ProgramSolution, denom: u64) -> Result<Option<Certificate>> {
    let target = rational::approximate(sol.gamma, 1000);
    if (rational::to_f64(&target) - sol.gamma).abs() > 1e-7 {
        return Ok(None);
    }
    let prog = inst.program();
    let xf: Vec<RatMatrix> = sol.blocks.iter().map(|x| program::round_symmetric(x, 1 << 40, f64::NEG_INFINITY)).collect();
    let tight: Vec<usize> = prog
        .row_values(&xf)
        .iter()
        .enumerate()
        .filter(|(_, v)| sol.gamma - rational::to_f64(v) < 1e-6)
        .map(|(k, _)| k)
        .collect();
    match prog.round_on_face(&sol.blocks, &tight, &target, denom)? {
        Some(q) if inst.bound_for(&q)? <= target => inst.certificate(q).map(Some),
        _ => Ok(None),
    }
}
