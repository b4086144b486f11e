//! Exact verification: identities modulo the A-free ideal, err bounds,
//! isotypic confinement, certificate checking and the worked Mantel example.
//!
//! Identities modulo the ideal are checked on its zero set, i.e. by
//! evaluation at the characteristic vector of every labeled A-free graph.

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::flags::{d_h, d_pair, edge_density, graph_density};
use crate::graph::{enumerate_a_free, enumerate_flags, labeled_a_free, pair_count, CharVector, Graph, IntersectionType};
use crate::par;
use crate::perm::Permutation;
use crate::poly::{coeff_equal, MultilinearPoly};
use crate::rational::{self, frac, int, serde_rational, Rational};
use crate::sdp::certificate::{Certificate, CertificateKind, GpMode};
use crate::sdp::exact::{self, RatMatrix};
use crate::sdp::flag::{round_flag_solution, FlagSdpInstance};
use crate::sdp::gp::{check_invariant, flag_sos_target, round_gp_solution, GpSdpInstance};
use crate::sdp::program::ProgramSolution;
use crate::sdp::solver::SolverOptions;
use crate::symrep::sab::{isotypic_support, rank};
use crate::symrep::{partitions_lex_geq, symmetry_adapted_basis, Partition};

/// Largest `n` for which the zero set of the ideal is enumerated.
pub fn ideal_budget(a: &Graph) -> usize {
    if *a == Graph::complete(3) {
        6
    } else {
        5
    }
}

/// Every labeled A-free graph on `n` vertices.
pub fn zero_set(n: usize, a: &Graph) -> Result<Vec<CharVector>> {
    let cap = ideal_budget(a);
    if n > cap {
        return Err(Error::Budget(format!("zero-set enumeration limited to n ≤ {cap} for this forbidden graph, got {n}")));
    }
    labeled_a_free(n, a)
}

fn values(p: &MultilinearPoly, zeros: &[CharVector]) -> Vec<Rational> {
    let ev = p.int_eval();
    par::map(zeros, |v| ev.value(v.bits()))
}

fn ser_cv<S: Serializer>(v: &CharVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_vec().serialize(s)
}

fn ser_opt_cv<S: Serializer>(v: &Option<CharVector>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.map(|c| c.to_vec()).serialize(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityMode {
    ExactCoefficient,
    ModIdeal,
}

#[derive(Clone, Debug)]
pub struct IdentityClaim {
    pub lhs: MultilinearPoly,
    pub rhs: MultilinearPoly,
    pub n: usize,
    pub forbidden: Graph,
    pub mode: IdentityMode,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub mode: IdentityMode,
    pub holds: bool,
    /// Zero-set points examined (mod-ideal mode).
    pub checked: usize,
    #[serde(serialize_with = "ser_opt_cv")]
    pub witness: Option<CharVector>,
}

pub fn verify_identity(claim: &IdentityClaim) -> Result<IdentityReport> {
    if claim.lhs.n() != claim.n || claim.rhs.n() != claim.n {
        return Err(Error::Dimension(format!("both sides must live on n = {} vertices", claim.n)));
    }
    match claim.mode {
        IdentityMode::ExactCoefficient => Ok(IdentityReport {
            n: claim.n,
            mode: claim.mode,
            holds: coeff_equal(&claim.lhs, &claim.rhs),
            checked: 0,
            witness: None,
        }),
        IdentityMode::ModIdeal => {
            let zeros = zero_set(claim.n, &claim.forbidden)?;
            let diff = (&claim.lhs - &claim.rhs).int_eval();
            let witness = par::find_first(&zeros, |v| (!diff.is_zero_at(v.bits())).then_some(*v));
            Ok(IdentityReport { n: claim.n, mode: claim.mode, holds: witness.is_none(), checked: zeros.len(), witness })
        }
    }
}

/// Size of an error polynomial on the zero set.
#[derive(Clone, Debug, Serialize)]
pub struct ErrReport {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub max_abs: Rational,
    #[serde(serialize_with = "ser_cv")]
    pub attained_at: CharVector,
    /// `n · max_abs`.
    #[serde(with = "serde_rational")]
    pub bound_constant: Rational,
    /// Largest signed value.
    #[serde(with = "serde_rational")]
    pub max_value: Rational,
}

pub fn err_report(err: &MultilinearPoly, zeros: &[CharVector]) -> Result<ErrReport> {
    let first = *zeros.first().ok_or_else(|| Error::Parameter("empty zero set".into()))?;
    let vals = values(err, zeros);
    let mut max_abs = Rational::zero();
    let mut at = first;
    let mut max_value = vals[0].clone();
    for (v, g) in vals.iter().zip(zeros) {
        if v.abs() > max_abs {
            max_abs = v.abs();
            at = *g;
        }
        if *v > max_value {
            max_value = v.clone();
        }
    }
    let n = err.n();
    Ok(ErrReport { n, bound_constant: &max_abs * int(n as i64), max_abs, attained_at: at, max_value })
}

fn k3() -> Graph {
    Graph::complete(3)
}

/// The explicit matrix of the short Mantel proof.
pub fn mantel_q() -> RatMatrix {
    vec![vec![frac(1, 2), frac(-1, 2)], vec![frac(-1, 2), frac(1, 2)]]
}

/// `E_Θ[(d^Θ_{F0}, d^Θ_{F1}) Q (d^Θ_{F0}, d^Θ_{F1})ᵀ]` for the Mantel `Q`.
pub fn mantel_sos(n: usize) -> Result<MultilinearPoly> {
    let flags = enumerate_flags(&IntersectionType::vertex(), 2, &k3())?;
    flag_sos_target(&flags, &mantel_q(), n)
}

#[derive(Clone, Debug, Serialize)]
pub struct MantelReport {
    pub n: usize,
    pub err: ErrReport,
    /// Every zero-set value of the sum of squares is nonnegative.
    pub sos_nonnegative: bool,
    /// `d ≡ ½d_{H0} + ⅙d_{H1} + ½d_{H2} − sos + err` on the zero set.
    pub chained_identity: bool,
    /// `d(1_G) ≤ ½ + err(1_G)` for every `G`.
    pub pointwise_bound: bool,
    #[serde(with = "serde_rational")]
    pub max_density: Rational,
    #[serde(with = "serde_rational")]
    pub half_plus_max_err: Rational,
    pub graphs_checked: usize,
    #[serde(serialize_with = "ser_opt_cv")]
    pub violation: Option<CharVector>,
    pub passed: bool,
}

/// Rebuilds the short sum-of-squares proof of Mantel's theorem on `n`
/// vertices and checks it on every labeled triangle-free graph.
pub fn verify_mantel_flag_sos(n: usize) -> Result<MantelReport> {
    if !(4..=6).contains(&n) {
        return Err(Error::Parameter(format!("the Mantel check needs 4 ≤ n ≤ 6, got {n}")));
    }
    let a = k3();
    let sos = mantel_sos(n)?;
    let hosts = enumerate_a_free(3, &a)?;
    let dh = hosts.iter().map(|h| d_h(h, n)).collect::<Result<Vec<_>>>()?;
    let lhs_coeffs = [frac(1, 2), frac(-1, 6), frac(-1, 6)];
    let mut lhs = MultilinearPoly::zero(n);
    for (p, c) in dh.iter().zip(&lhs_coeffs) {
        lhs.add_scaled(p, c);
    }
    let err = &sos - &lhs;
    // Σ_H (d(1_H) + a_H) d_H − sos + err
    let mut chain = &err - &sos;
    for ((p, c), h) in dh.iter().zip(&lhs_coeffs).zip(&hosts) {
        chain.add_scaled(p, &(c + graph_density(h)));
    }
    let d = edge_density(n);
    let zeros = zero_set(n, &a)?;
    let report = err_report(&err, &zeros)?;
    let ev_sos = sos.int_eval();
    let ev_err = err.int_eval();
    let ev_gap = (&d - &chain).int_eval();
    let half = frac(1, 2);
    struct Point {
        sos_ok: bool,
        chain_ok: bool,
        bound_ok: bool,
        density: Rational,
    }
    let pts = par::map(&zeros, |v| {
        let density = graph_density(&v.graph());
        Point {
            sos_ok: !ev_sos.value(v.bits()).is_negative(),
            chain_ok: ev_gap.is_zero_at(v.bits()),
            bound_ok: density <= &half + ev_err.value(v.bits()),
            density,
        }
    });
    let violation = zeros.iter().zip(&pts).find(|(_, p)| !(p.sos_ok && p.chain_ok && p.bound_ok)).map(|(v, _)| *v);
    let max_density = rational::max_of(pts.iter().map(|p| &p.density)).unwrap_or_default();
    let half_plus_max_err = &half + &report.max_value;
    let sos_nonnegative = pts.iter().all(|p| p.sos_ok);
    let chained_identity = pts.iter().all(|p| p.chain_ok);
    let pointwise_bound = pts.iter().all(|p| p.bound_ok);
    let passed = sos_nonnegative && chained_identity && pointwise_bound && max_density <= half_plus_max_err;
    Ok(MantelReport {
        n,
        err: report,
        sos_nonnegative,
        chained_identity,
        pointwise_bound,
        max_density,
        half_plus_max_err,
        graphs_checked: zeros.len(),
        violation,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetricMantelReport {
    pub n: usize,
    /// `(n−1)² f = ⟨Q_(n), Y_(n)⟩ + ⟨Q_(n−1,1), Y_(n−1,1)⟩`.
    pub scaled_identity: bool,
    /// `f = ⟨Q_(n)/(n−1)², Y_(n)⟩ + (n−1)⟨Q'_(n−1,1), Y_(n−1,1)⟩` with
    /// `Q'_(n−1,1) = [2(n−2)/(n(n−1)²)]`.
    pub weighted_identity: bool,
    /// The weighting `(n−1)` applied to the unscaled matrices. Informational:
    /// it is off by the factor `(n−1)²` on the trivial block.
    pub unscaled_weighting_holds: bool,
    /// `Q_(n)[0][1] / ‖Σ x_ij‖`, which must be rational.
    #[serde(with = "serde_rational")]
    pub off_diagonal_scaled: Rational,
    #[serde(with = "serde_rational")]
    pub det_q_n: Rational,
    pub q_n_psd: bool,
    pub q_n1_psd: bool,
    #[serde(with = "serde_rational")]
    pub q_n1: Rational,
    /// The computed symmetry-adapted basis spans the same polynomials.
    pub basis_matches: bool,
    pub passed: bool,
}

fn edge_sum(n: usize) -> MultilinearPoly {
    let mut s = MultilinearPoly::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            s.add_scaled(&MultilinearPoly::var(n, i, j), &Rational::one());
        }
    }
    s
}

/// `Σ_{i<j<n} x_ij − ((n−2)/2) Σ_{i<n} x_in` with the last vertex as `n`,
/// i.e. the unnormalized `p_{1,n}`.
fn hook_poly(n: usize) -> MultilinearPoly {
    let mut p = MultilinearPoly::zero(n);
    let w = frac(-(n as i64 - 2), 2);
    for i in 0..n {
        for j in i + 1..n {
            let c = if j == n - 1 { w.clone() } else { Rational::one() };
            p.add_scaled(&MultilinearPoly::var(n, i, j), &c);
        }
    }
    p
}

/// The worked symmetry-adapted proof for triangle-free graphs on `n`
/// vertices.
///
/// Basis polynomials are kept unnormalized and the normalizations move
/// into the Gram entries, so everything stays rational: with
/// `N₀ = C(n,2)` and `N₁ = n(n−1)(n−2)/4`,
/// `⟨Q_(n), Y_(n)⟩ = Q₀₀ + 2(Q₀₁/√N₀) s + (Q₁₁/N₀) s²` where `Q₀₁/√N₀` is
/// the negative square root of `Q₀₁²/N₀`, and
/// `⟨Q_(n−1,1), Y_(n−1,1)⟩ = Q/(nN₁) Σ_i u_i²`.
pub fn verify_symmetric_mantel(n: usize) -> Result<SymmetricMantelReport> {
    if !(4..=7).contains(&n) {
        return Err(Error::Parameter(format!("the worked symmetric proof is checked for 4 ≤ n ≤ 7, got {n}")));
    }
    let ni = n as i64;
    let m1 = int(ni - 1);
    let q00 = &m1 * &m1 / int(2);
    let q01_sq = int(2) * &m1 * &m1 * &m1 / int(ni);
    let q11 = int(4) * &m1 / int(ni);
    let q1 = int(2) * &m1 * int(ni - 2) / int(ni);
    let n0 = int(pair_count(n) as i64);

    let off = -rational::exact_sqrt(&(&q01_sq / &n0))
        .ok_or_else(|| Error::Verification("off-diagonal entry does not scale to a rational".into()))?;
    let det_q_n = &q00 * &q11 - &q01_sq;
    let congruent = vec![vec![q00.clone(), off.clone()], vec![off.clone(), &q11 / &n0]];
    let q_n_psd = exact::check_psd_rational(&congruent)?;
    let q_n1_psd = !q1.is_negative();

    let s = edge_sum(n);
    let u_n = hook_poly(n);
    let n1 = u_n.norm2();
    if n1 != int(ni * (ni - 1) * (ni - 2)) / int(4) {
        return Err(Error::Verification(format!("unexpected norm of the hook polynomial: {n1}")));
    }
    let mut u_sq = MultilinearPoly::zero(n);
    for i in 0..n {
        let u = if i == n - 1 { u_n.clone() } else { u_n.act(&Permutation::transposition(n, i, n - 1)) };
        u_sq.add_scaled(&(&u * &u), &Rational::one());
    }
    let y_hook = u_sq.scale(&(Rational::one() / (int(ni) * &n1)));
    let s_sq = &s * &s;
    let trivial_pair = |a: &Rational, b: &Rational, c: &Rational| {
        let mut p = MultilinearPoly::constant(n, a.clone());
        p.add_scaled(&s, &(int(2) * b));
        p.add_scaled(&s_sq, &(c / &n0));
        p
    };

    let f = mantel_sos(n)?;
    let sq = &m1 * &m1;

    let mut scaled = trivial_pair(&q00, &off, &q11);
    scaled.add_scaled(&y_hook, &q1);
    let scaled_identity = coeff_equal(&f.scale(&sq), &scaled);

    let mut weighted = trivial_pair(&(&q00 / &sq), &(&off / &sq), &(&q11 / &sq));
    let q1_weighted = int(2) * int(ni - 2) / (int(ni) * &sq);
    weighted.add_scaled(&y_hook, &(&m1 * &q1_weighted));
    let weighted_identity = coeff_equal(&f, &weighted);

    let mut unscaled = trivial_pair(&q00, &off, &q11);
    unscaled.add_scaled(&y_hook, &(&m1 * &q1));
    let unscaled_weighting_holds = coeff_equal(&f, &unscaled);

    let trivial = Partition::trivial(n);
    let hook = Partition::hook(n, 1);
    let basis = symmetry_adapted_basis(n, 1, &[trivial.clone(), hook.clone()])?;
    let triv_block = basis.blocks_of(&trivial);
    let hook_block = basis.blocks_of(&hook);
    let basis_matches = match (triv_block.first(), hook_block.first()) {
        (Some(t), Some(h)) => {
            let mut span = t.polys.clone();
            span.push(MultilinearPoly::one(n));
            span.push(s.clone());
            t.polys.len() == 2
                && rank(&span) == 2
                && h.polys.len() == 1
                && rank(&[h.polys[0].clone(), u_n.clone()]) == 1
        }
        _ => false,
    };

    let passed = scaled_identity && weighted_identity && det_q_n.is_zero() && q_n_psd && q_n1_psd && basis_matches;
    Ok(SymmetricMantelReport {
        n,
        scaled_identity,
        weighted_identity,
        unscaled_weighting_holds,
        off_diagonal_scaled: off,
        det_q_n,
        q_n_psd,
        q_n1_psd,
        q_n1: q1,
        basis_matches,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotypicReport {
    pub n: usize,
    pub hook_t: usize,
    pub support: Vec<Partition>,
    /// Components outside the partitions `≥_lex (n − t, 1^t)`.
    pub outside: Vec<Partition>,
    pub confined: bool,
}

/// Checks that `poly` has no isotypic component strictly below the hook
/// `(n − t, 1^t)` in lexicographic order.
pub fn verify_isotypic_membership(poly: &MultilinearPoly, hook_t: usize, n: usize, d: usize) -> Result<IsotypicReport> {
    if n > 6 || d > 2 {
        return Err(Error::Budget(format!("isotypic checks limited to n ≤ 6, d ≤ 2 (got n = {n}, d = {d})")));
    }
    if poly.n() != n {
        return Err(Error::Dimension(format!("polynomial on {} vertices, expected {n}", poly.n())));
    }
    if poly.degree() as usize > d {
        return Err(Error::Parameter(format!("polynomial of degree {} exceeds d = {d}", poly.degree())));
    }
    let allowed = partitions_lex_geq(n, hook_t)?;
    let support: Vec<Partition> = isotypic_support(poly)?.into_iter().collect();
    let outside: Vec<Partition> = support.iter().filter(|m| !allowed.contains(m)).cloned().collect();
    Ok(IsotypicReport { n, hook_t, confined: outside.is_empty(), support, outside })
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub n: usize,
    pub psd: bool,
    pub non_psd_block: Option<String>,
    #[serde(with = "serde_rational")]
    pub claimed_bound: Rational,
    #[serde(with = "serde_rational::vec")]
    pub contributions: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub recomputed_bound: Rational,
    /// Recomputed bound does not exceed the claimed one.
    pub bound_ok: bool,
    pub graphs_checked: usize,
    #[serde(with = "serde_rational")]
    pub max_density: Rational,
    #[serde(with = "serde_rational")]
    pub max_err: Rational,
    #[serde(serialize_with = "ser_opt_cv")]
    pub violation: Option<CharVector>,
    pub passed: bool,
}

impl DensityReport {
    fn rejected(n: usize, cert: &Certificate, block: String) -> Self {
        DensityReport {
            n,
            psd: false,
            non_psd_block: Some(block),
            claimed_bound: cert.bound.clone(),
            contributions: Vec::new(),
            recomputed_bound: cert.bound.clone(),
            bound_ok: false,
            graphs_checked: 0,
            max_density: Rational::zero(),
            max_err: Rational::zero(),
            violation: None,
            passed: false,
        }
    }
}

/// Smallest `n` on which a flag certificate can be evaluated.
pub fn default_check_size(inst: &FlagSdpInstance) -> usize {
    inst.families.iter().map(|f| 2 * f.f - f.ty.size()).chain([inst.m]).max().unwrap_or(inst.m)
}

/// Default evaluation size for certificate checks: the largest `n` whose
/// zero set is enumerated.
pub fn verification_size(inst: &FlagSdpInstance) -> Result<usize> {
    let lo = default_check_size(inst);
    let hi = ideal_budget(&inst.forbidden);
    if lo > hi {
        return Err(Error::Budget(format!("certificate check needs n ≥ {lo}, beyond the enumeration limit {hi}")));
    }
    Ok(hi)
}

/// Checks a flag certificate exactly.
///
/// Recomputes `a_H` and `α = max_H (d(1_H) + a_H)` from the blocks, then on
/// every labeled A-free graph `G` on `n` vertices checks
/// `Σ Q d_{F,F'}(1_G) = Σ_H a_H d_H(1_G)`, `sos(1_G) ≥ 0` and
/// `d(1_G) ≤ α + err(1_G)` where `err = sos − Σ Q d_{F,F'}`.
pub fn verify_density_bound(cert: &Certificate, n: Option<usize>) -> Result<DensityReport> {
    if cert.kind != CertificateKind::Flag {
        return Err(Error::Parameter("not a flag certificate".into()));
    }
    let inst = FlagSdpInstance::from_setup(&cert.setup)?;
    let n = match n {
        Some(n) => n,
        None => verification_size(&inst)?,
    };
    if n < default_check_size(&inst) {
        return Err(Error::Parameter(format!("n = {n} is below the host size or 2f − t")));
    }
    let q = cert.matrices();
    if q.len() != inst.families.len() {
        return Err(Error::Dimension(format!("{} blocks for {} families", q.len(), inst.families.len())));
    }
    if let Some(i) = cert.first_non_psd()? {
        return Ok(DensityReport::rejected(n, cert, cert.blocks[i].label.clone()));
    }
    let contributions = inst.contributions(&q)?;
    let recomputed_bound = inst.bound_for(&q)?;
    let zeros = zero_set(n, &inst.forbidden)?;

    let mut sos = MultilinearPoly::zero(n);
    let mut pairs = MultilinearPoly::zero(n);
    for (fam, qb) in inst.families.iter().zip(&q) {
        sos = &sos + &flag_sos_target(fam.flags(), qb, n)?;
        let fl = fam.flags();
        for i in 0..fl.len() {
            for j in i..fl.len() {
                if qb[i][j].is_zero() {
                    continue;
                }
                let w = if i == j { qb[i][j].clone() } else { int(2) * &qb[i][j] };
                pairs.add_scaled(&d_pair(&fl[i], &fl[j], n)?, &w);
            }
        }
    }
    let mut host_side = MultilinearPoly::zero(n);
    for (h, a) in inst.hosts.iter().zip(&contributions) {
        host_side.add_scaled(&d_h(h, n)?, a);
    }
    let err = &sos - &pairs;
    let ev_sos = sos.int_eval();
    let ev_err = err.int_eval();
    let ev_chain = (&pairs - &host_side).int_eval();
    let alpha = recomputed_bound.clone();
    let checks = par::map(&zeros, |v| {
        let e = ev_err.value(v.bits());
        let density = graph_density(&v.graph());
        let ok = ev_chain.is_zero_at(v.bits()) && !ev_sos.value(v.bits()).is_negative() && density <= &alpha + &e;
        (ok, density, e)
    });
    let violation = zeros.iter().zip(&checks).find(|(_, c)| !c.0).map(|(v, _)| *v);
    let max_density = rational::max_of(checks.iter().map(|c| &c.1)).unwrap_or_default();
    let max_err = rational::max_of(checks.iter().map(|c| &c.2)).unwrap_or_default();
    let bound_ok = recomputed_bound <= cert.bound;
    Ok(DensityReport {
        n,
        psd: true,
        non_psd_block: None,
        claimed_bound: cert.bound.clone(),
        contributions,
        recomputed_bound,
        bound_ok,
        graphs_checked: zeros.len(),
        max_density,
        max_err,
        passed: bound_ok && violation.is_none(),
        violation,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GpCertificateReport {
    pub n: usize,
    pub mode: GpMode,
    pub psd: bool,
    pub non_psd_block: Option<String>,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    /// Identity checked on labeled graphs (true) or on isomorphism classes
    /// after asserting invariance of both sides (false).
    pub labeled: bool,
    pub graphs_checked: usize,
    pub identity_holds: bool,
    pub witness: Option<Vec<[usize; 2]>>,
    pub passed: bool,
}

/// Checks a symmetry-adapted certificate: exact PSD blocks and the
/// identity `target ≡ Σ n_λ⟨Q_λ, Y_λ⟩` (feasibility) or
/// `bound − target ≡ Σ n_λ⟨Q_λ, Y_λ⟩ + Σ c_H d_H` (bound) modulo the ideal.
pub fn verify_gp_certificate(cert: &Certificate) -> Result<GpCertificateReport> {
    if cert.kind != CertificateKind::GpRestricted {
        return Err(Error::Parameter("not a symmetric-program certificate".into()));
    }
    let inst = GpSdpInstance::from_setup(&cert.setup)?;
    let n = inst.n();
    let q = cert.matrices();
    let mut report = GpCertificateReport {
        n,
        mode: inst.mode,
        psd: true,
        non_psd_block: None,
        bound: cert.bound.clone(),
        labeled: n <= ideal_budget(&inst.forbidden),
        graphs_checked: 0,
        identity_holds: false,
        witness: None,
        passed: false,
    };
    if let Some(i) = cert.first_non_psd()? {
        report.psd = false;
        report.non_psd_block = Some(cert.blocks[i].label.clone());
        return Ok(report);
    }
    let sos = inst.sos_polynomial(&q)?;
    let lhs = match inst.mode {
        GpMode::Feasibility => inst.target.clone(),
        GpMode::Bound => &MultilinearPoly::constant(n, cert.bound.clone()) - &inst.target,
    };
    let diff = (&lhs - &sos).int_eval();
    let witness = if report.labeled {
        let zeros = zero_set(n, &inst.forbidden)?;
        report.graphs_checked = zeros.len();
        par::find_first(&zeros, |v| (!diff.is_zero_at(v.bits())).then(|| v.graph()))
    } else {
        check_invariant(&lhs)?;
        check_invariant(&sos)?;
        report.graphs_checked = inst.classes.len();
        par::find_first(&inst.classes, |g| (!diff.is_zero_at(g.mask())).then_some(*g))
    };
    report.identity_holds = witness.is_none();
    report.witness = witness.map(|g| g.edges().into_iter().map(|(i, j)| [i + 1, j + 1]).collect());
    report.passed = report.identity_holds;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum CertificateReport {
    Flag(DensityReport),
    Gp(GpCertificateReport),
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        match self {
            CertificateReport::Flag(r) => r.passed,
            CertificateReport::Gp(r) => r.passed,
        }
    }
}

pub fn verify_certificate(cert: &Certificate, n: Option<usize>) -> Result<CertificateReport> {
    match cert.kind {
        CertificateKind::Flag => Ok(CertificateReport::Flag(verify_density_bound(cert, n)?)),
        CertificateKind::GpRestricted => Ok(CertificateReport::Gp(verify_gp_certificate(cert)?)),
    }
}

/// Rounds a flag solution and re-verifies it; nothing unverified escapes.
pub fn certify_flag(inst: &FlagSdpInstance, sol: &ProgramSolution, denom: u64) -> Result<(Certificate, DensityReport)> {
    let cert = round_flag_solution(inst, sol, denom)?;
    let n = verification_size(inst)?;
    let report = verify_density_bound(&cert, Some(n))?;
    if !report.passed {
        return Err(Error::Verification(format!("rounded certificate failed re-verification: {}", serde_json::to_string(&report)?)));
    }
    Ok((cert, report))
}

/// Rounds a symmetric-program solution and re-verifies it.
pub fn certify_gp(inst: &GpSdpInstance, sol: &ProgramSolution, denom: u64, opts: &SolverOptions) -> Result<(Certificate, GpCertificateReport)> {
    let cert = round_gp_solution(inst, sol, denom, opts)?;
    let report = verify_gp_certificate(&cert)?;
    if !report.passed {
        return Err(Error::Verification(format!("rounded certificate failed re-verification: {}", serde_json::to_string(&report)?)));
    }
    Ok((cert, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalReport {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub max_density: Rational,
    /// `⌊n²/4⌋ / C(n,2)`.
    #[serde(with = "serde_rational")]
    pub turan_value: Rational,
    pub bipartite_attains: bool,
    pub passed: bool,
}

/// Maximum edge density over labeled triangle-free graphs against the
/// balanced complete bipartite graph.
pub fn verify_extremal(n: usize) -> Result<ExtremalReport> {
    let zeros = zero_set(n, &k3())?;
    let max_density = rational::max_of(&par::map(&zeros, |v| graph_density(&v.graph()))).unwrap_or_default();
    let turan_value = frac((n * n / 4) as i64, pair_count(n).max(1) as i64);
    let kb = Graph::complete_bipartite(n / 2, n - n / 2);
    let bipartite_attains = zeros.iter().any(|v| v.bits() == kb.mask()) && graph_density(&kb) == max_density;
    Ok(ExtremalReport { n, passed: max_density == turan_value && bipartite_attains, max_density, turan_value, bipartite_attains })
}

/// Flips one symmetric entry pair of a certificate block by `delta`.
pub fn mutate(cert: &Certificate, block: usize, i: usize, j: usize, delta: &Rational) -> Certificate {
    let mut c = cert.clone();
    let m = &mut c.blocks[block].matrix;
    m[i][j] += delta;
    if i != j {
        m[j][i] += delta;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::d_theta_f;
    use crate::flags::Labeling;
    use crate::graph::Flag;
    use crate::sdp::certificate::{CertificateBlock, FamilyJson, Setup};
    use crate::graph::GraphJson;
    use rand::{Rng, SeedableRng};

    fn mantel_cert() -> Certificate {
        Certificate {
            kind: CertificateKind::Flag,
            bound: frac(1, 2),
            blocks: vec![CertificateBlock { label: "T1,f2".into(), matrix: mantel_q() }],
            setup: Setup::Flag {
                forbidden: GraphJson::from(&k3()),
                host_size: 3,
                families: vec![FamilyJson { ty: GraphJson::from_type(&IntersectionType::vertex()), f: 2 }],
            },
        }
    }

    fn hosts_d(n: usize) -> Vec<MultilinearPoly> {
        enumerate_a_free(3, &k3()).unwrap().iter().map(|h| d_h(h, n).unwrap()).collect()
    }

    fn claim(lhs: MultilinearPoly, rhs: MultilinearPoly, n: usize, mode: IdentityMode) -> IdentityClaim {
        IdentityClaim { lhs, rhs, n, forbidden: k3(), mode }
    }

    #[test]
    fn host_densities_sum_to_one_on_zero_set() {
        let n = 4;
        let d = hosts_d(n);
        let sum = &(&d[0] + &d[1]) + &d[2];
        let r = verify_identity(&claim(MultilinearPoly::one(n), sum.clone(), n, IdentityMode::ModIdeal)).unwrap();
        assert!(r.holds);
        assert!(r.checked > 0);
        // the triangle density is missing, so not as polynomials
        assert!(!verify_identity(&claim(MultilinearPoly::one(n), sum, n, IdentityMode::ExactCoefficient)).unwrap().holds);
    }

    #[test]
    fn edge_density_from_hosts() {
        for n in [4, 5] {
            let d = hosts_d(n);
            let mut rhs = d[1].scale(&frac(1, 3));
            rhs.add_scaled(&d[2], &frac(2, 3));
            assert!(verify_identity(&claim(edge_density(n), rhs.clone(), n, IdentityMode::ModIdeal)).unwrap().holds);
            assert!(!verify_identity(&claim(edge_density(n), rhs, n, IdentityMode::ExactCoefficient)).unwrap().holds);
        }
    }

    #[test]
    fn failing_identity_has_witness() {
        let n = 4;
        let r = verify_identity(&claim(edge_density(n), MultilinearPoly::zero(n), n, IdentityMode::ModIdeal)).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert!(w.bits() != 0);
    }

    #[test]
    fn mod_ideal_budget_enforced() {
        let n = 7;
        let c = claim(MultilinearPoly::one(n), MultilinearPoly::one(n), n, IdentityMode::ModIdeal);
        assert!(matches!(verify_identity(&c), Err(Error::Budget(_))));
        let mut c4 = claim(MultilinearPoly::one(6), MultilinearPoly::one(6), 6, IdentityMode::ModIdeal);
        c4.forbidden = Graph::complete(4);
        assert!(matches!(verify_identity(&c4), Err(Error::Budget(_))));
    }

    #[test]
    fn mantel_sos_checks() {
        for n in 4..=6 {
            let r = verify_mantel_flag_sos(n).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let r5 = verify_mantel_flag_sos(5).unwrap();
        assert_eq!(r5.max_density, frac(6, 10));
        assert!(r5.half_plus_max_err >= frac(6, 10));
        assert!(matches!(verify_mantel_flag_sos(3), Err(Error::Parameter(_))));
    }

    #[test]
    fn err_constant_stays_bounded() {
        let c: Vec<Rational> = (4..=6).map(|n| verify_mantel_flag_sos(n).unwrap().err.bound_constant).collect();
        for x in &c {
            assert!(*x <= &c[0] * int(2), "{c:?}");
        }
    }

    #[test]
    fn symmetric_mantel_identities() {
        for n in 4..=7 {
            let r = verify_symmetric_mantel(n).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.det_q_n.is_zero());
            assert_eq!(r.off_diagonal_scaled, frac(-2 * (n as i64 - 1), n as i64));
            assert!(!r.unscaled_weighting_holds);
        }
    }

    #[test]
    fn isotypic_membership() {
        let n = 5;
        let flags = enumerate_flags(&IntersectionType::vertex(), 2, &k3()).unwrap();
        let f1: &Flag = &flags[1];
        let p = d_theta_f(f1, &Labeling::identity(n, 1)).unwrap();
        let r = verify_isotypic_membership(&p, 1, n, 1).unwrap();
        assert!(r.confined, "{r:?}");
        let one = verify_isotypic_membership(&MultilinearPoly::one(n), 0, n, 1).unwrap();
        assert_eq!(one.support, vec![Partition::trivial(n)]);
        let x12 = verify_isotypic_membership(&MultilinearPoly::var(n, 0, 1), 0, n, 1).unwrap();
        assert!(!x12.confined);
        assert!(x12.outside.contains(&Partition::new(vec![n - 2, 2]).unwrap()));
    }

    #[test]
    fn mantel_certificate_verifies() {
        let r = verify_density_bound(&mantel_cert(), None).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.recomputed_bound, frac(1, 2));
        assert_eq!(r.contributions, vec![frac(1, 2), frac(-1, 6), frac(-1, 6)]);
        for n in [4, 5] {
            assert!(verify_density_bound(&mantel_cert(), Some(n)).unwrap().passed);
        }
    }

    #[test]
    fn zero_certificate_gives_two_thirds() {
        let mut c = mantel_cert();
        c.blocks[0].matrix = vec![vec![Rational::zero(); 2]; 2];
        c.bound = frac(2, 3);
        let r = verify_density_bound(&c, None).unwrap();
        assert!(r.passed);
        assert_eq!(r.recomputed_bound, frac(2, 3));
    }

    #[test]
    fn sign_flip_rejected_at_psd_stage() {
        let mut c = mantel_cert();
        c.blocks[0].matrix[0][0] = frac(-1, 2);
        let r = verify_density_bound(&c, None).unwrap();
        assert!(!r.psd && !r.passed);
    }

    #[test]
    fn mutations_are_caught() {
        let base = mantel_cert();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let i = rng.random_range(0..2);
            let j = rng.random_range(0..2);
            let delta = if rng.random_bool(0.5) { frac(1, 1000) } else { frac(-1, 1000) };
            let r = verify_density_bound(&mutate(&base, 0, i, j, &delta), None).unwrap();
            assert!(!r.passed, "mutation ({i},{j}) by {delta} slipped through");
        }
    }

    #[test]
    fn extremal_values() {
        for n in 4..=6 {
            let r = verify_extremal(n).unwrap();
            assert!(r.passed, "{r:?}");
        }
        assert_eq!(verify_extremal(5).unwrap().max_density, frac(3, 5));
    }
}
