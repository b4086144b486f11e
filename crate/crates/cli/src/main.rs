mod demo;
mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flagsos::flags::{d_h, edge_density, graph_density, pair_density_table};
use flagsos::graph::{enumerate_a_free, enumerate_flags, GraphJson};
use flagsos::poly::{MultilinearPoly, PolyJson};
use flagsos::rational;
use flagsos::sdp::{assemble_flag_sdp, assemble_gp_sdp_with, Certificate, GpMode, SolverOptions};
use flagsos::symrep::{partitions_lex_geq, symmetry_adapted_basis};
use flagsos::verify::{self, IdentityClaim, IdentityMode};
use flagsos::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::spec::{parse_partitions, ProblemSpec};

#[derive(Parser)]
#[command(name = "flagsos", version, about = "Exact sum-of-squares certificates for edge-density bounds in graphs avoiding a fixed subgraph")]
struct Cli {
    #[command(flatten)]
    global: Global,
    /// Run a preset end to end and compare against the known values.
    #[arg(long, value_enum)]
    demo: Option<Demo>,
    #[command(subcommand)]
    cmd: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Mantel,
}

#[derive(Args, Clone)]
struct Global {
    /// Problem description (JSON); inline flags override its fields.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Solver stopping tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Interior-point iteration limit.
    #[arg(long, global = true, default_value_t = 100)]
    max_iters: usize,
    /// Largest denominator used when rounding to rationals.
    #[arg(long, global = true, default_value_t = 10_000)]
    denom_bound: u64,
    /// Number of vertices for polynomial-level work.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Forbidden graph (graph JSON file).
    #[arg(long, global = true)]
    forbidden: Option<PathBuf>,
    /// Intersection type (graph JSON file with labels).
    #[arg(long = "type", global = true)]
    ty: Option<PathBuf>,
    /// Type size.
    #[arg(long, global = true)]
    t: Option<usize>,
    /// Flag size.
    #[arg(long, global = true)]
    f: Option<usize>,
    /// Host size.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Half-degree of the symmetric program.
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Partitions, e.g. "5;4,1".
    #[arg(long, global = true)]
    partitions: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List the hosts and flags of a problem.
    Enumerate,
    /// Pair densities of flags in every host.
    Table,
    /// Solve the flag SDP and emit a verified exact certificate.
    Solve,
    /// Symmetry-adapted program on n vertices.
    Gp(GpArgs),
    /// Exact checks.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
}

#[derive(Args)]
struct GpArgs {
    #[arg(long, value_enum, default_value = "feasibility")]
    mode: ModeArg,
    /// Size of the hosts used as nonnegative slack in bound mode.
    #[arg(long, default_value_t = flagsos::sdp::gp::GP_HOST_SIZE)]
    host_size: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Find a symmetric certificate for the flag sum of squares.
    Feasibility,
    /// Minimize an upper bound on the edge density directly.
    Bound,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check lhs ≡ rhs, or the standard host-density identities.
    Identity {
        #[arg(long)]
        lhs: Option<PathBuf>,
        #[arg(long)]
        rhs: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "mod-ideal")]
        mode: IdentityModeArg,
    },
    /// The short sum-of-squares proof for triangle-free graphs.
    Mantel,
    /// The worked symmetry-adapted proof for triangle-free graphs.
    Symmetric,
    /// Check a certificate file.
    Certificate {
        #[arg(long)]
        certificate: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum IdentityModeArg {
    ExactCoefficient,
    ModIdeal,
}

/// Command outcome: the JSON to print and whether every check passed.
struct Outcome {
    value: Value,
    passed: bool,
    /// Human-readable rendering printed instead of the JSON when no
    /// `--out` file is given.
    text: Option<String>,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, passed: true, text: None }
    }

    fn checked(value: Value, passed: bool) -> Self {
        Outcome { value, passed, text: None }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&s)?)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) => 2,
        Error::Infeasible(_) => 3,
        Error::Budget(_) | Error::NotConverged(_) => 4,
        _ => 1,
    }
}

impl Global {
    fn problem(&self) -> Result<ProblemSpec> {
        let mut s = match &self.spec {
            Some(p) => ProblemSpec::load(p)?,
            None => ProblemSpec::default(),
        };
        if let Some(p) = &self.forbidden {
            s.forbidden = read_json(p)?;
        }
        if let Some(p) = &self.ty {
            let ty: GraphJson = read_json(p)?;
            s.t = ty.n;
            s.ty = Some(ty);
        }
        if let Some(t) = self.t {
            s.t = t;
        }
        s.n = self.n.or(s.n);
        s.f = self.f.unwrap_or(s.f);
        s.m = self.m.unwrap_or(s.m);
        s.d = self.d.unwrap_or(s.d);
        if let Some(p) = &self.partitions {
            s.partitions = Some(parse_partitions(p)?);
        }
        Ok(s)
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iters: self.max_iters }
    }

    fn emit(&self, o: &Outcome) -> Result<()> {
        let mut s = serde_json::to_string_pretty(&o.value)?;
        s.push('\n');
        if let (Some(t), None) = (&o.text, &self.out) {
            print!("{t}");
            return Ok(());
        }
        match &self.out {
            Some(p) => std::fs::write(p, s).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
            None => {
                print!("{s}");
                Ok(())
            }
        }
    }
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    match threads {
        None => Ok(()),
        Some(0) => Err(Error::Parameter("--threads must be positive".into())),
        Some(1) => {
            flagsos::par::set_parallel(false);
            Ok(())
        }
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}"))),
    }
}

fn cmd_enumerate(g: &Global) -> Result<Outcome> {
    let s = g.problem()?;
    let a = s.forbidden()?;
    let ty = s.intersection_type()?;
    let hosts = enumerate_a_free(s.m, &a)?;
    let flags = if s.t <= s.f { enumerate_flags(&ty, s.f, &a)? } else { Vec::new() };
    Ok(Outcome::ok(json!({
        "forbidden": s.forbidden,
        "host_size": s.m,
        "hosts": hosts.len(),
        "host_list": hosts.iter().map(GraphJson::from).collect::<Vec<_>>(),
        "type": GraphJson::from_type(&ty),
        "flag_size": s.f,
        "flags": flags.len(),
        "flag_list": flags.iter().map(GraphJson::from_flag).collect::<Vec<_>>(),
    })))
}

fn cmd_table(g: &Global) -> Result<Outcome> {
    let s = g.problem()?;
    s.check_flag()?;
    let a = s.forbidden()?;
    let flags = enumerate_flags(&s.intersection_type()?, s.f, &a)?;
    let hosts = enumerate_a_free(s.m, &a)?;
    let table = pair_density_table(&flags, &hosts)?;
    Ok(Outcome::ok(to_value(&table.to_json())?))
}

fn cmd_solve(g: &Global) -> Result<Outcome> {
    let s = g.problem()?;
    s.check_flag()?;
    let a = s.forbidden()?;
    let inst = assemble_flag_sdp(&s.intersection_type()?, s.f, s.m, &a)?;
    let sol = inst.solve(&g.solver())?;
    let (cert, report) = verify::certify_flag(&inst, &sol, g.denom_bound)?;
    eprintln!(
        "numeric bound {:.9} (dual {:.9}, gap {:.2e}, {} iterations); exact bound {}; re-verified on {} graphs with {} vertices",
        sol.gamma,
        sol.dual_gamma,
        sol.raw.gap,
        sol.raw.iterations,
        rational::to_string(&cert.bound),
        report.graphs_checked,
        report.n
    );
    Ok(Outcome::ok(to_value(&cert)?))
}

fn cmd_gp(g: &Global, args: &GpArgs) -> Result<Outcome> {
    let s = g.problem()?;
    if let ModeArg::Feasibility = args.mode {
        s.check_gp()?;
    }
    let a = s.forbidden()?;
    let n = s.n.ok_or_else(|| Error::Parameter("gp needs --n".into()))?;
    let opts = g.solver();
    let lambdas = match s.partitions()? {
        Some(ps) => ps,
        None => partitions_lex_geq(n, s.t)?,
    };
    let mut out = serde_json::Map::new();
    let (target, mode) = match args.mode {
        ModeArg::Feasibility => {
            let inst = assemble_flag_sdp(&s.intersection_type()?, s.f, s.m, &a)?;
            let sol = inst.solve(&opts)?;
            let (flag_cert, _) = verify::certify_flag(&inst, &sol, g.denom_bound)?;
            let mut target = MultilinearPoly::zero(n);
            for (fam, blk) in inst.families.iter().zip(&flag_cert.blocks) {
                target = &target + &flagsos::sdp::flag_sos_target(fam.flags(), &blk.matrix, n)?;
            }
            out.insert("flag_bound".into(), json!(rational::to_string(&flag_cert.bound)));
            if n <= verify::ideal_budget(&a) && n >= verify::default_check_size(&inst) {
                let r = verify::verify_density_bound(&flag_cert, Some(n))?;
                out.insert("max_err".into(), json!(rational::to_string(&r.max_err)));
                out.insert("recovered_bound".into(), json!(rational::to_string(&(&flag_cert.bound + &r.max_err))));
            }
            (target, GpMode::Feasibility)
        }
        ModeArg::Bound => (edge_density(n), GpMode::Bound),
    };
    let basis = symmetry_adapted_basis(n, s.d, &lambdas)?;
    let inst = assemble_gp_sdp_with(&target, s.t, &lambdas, &basis, &a, mode, args.host_size)?;
    let blocks: Vec<Value> = inst
        .partitions
        .iter()
        .zip(&inst.y_matrices)
        .zip(&inst.n_lambda)
        .map(|((p, y), w)| json!({"partition": p.to_string(), "size": y.size(), "n_lambda": w}))
        .collect();
    out.insert("n".into(), json!(n));
    out.insert("degree".into(), json!(s.d));
    out.insert("mode".into(), to_value(&mode)?);
    out.insert("blocks".into(), Value::Array(blocks));
    let sol = inst.solve(&opts)?;
    let (cert, report) = verify::certify_gp(&inst, &sol, g.denom_bound, &opts)?;
    if mode == GpMode::Bound {
        out.insert("numeric_bound".into(), json!(sol.gamma));
        out.insert("bound".into(), json!(rational::to_string(&cert.bound)));
    }
    if a == flagsos::graph::Graph::complete(3) && s.t == 1 && s.f == 2 && s.d == 1 && (4..=7).contains(&n) {
        out.insert("worked_example".into(), to_value(&verify::verify_symmetric_mantel(n)?)?);
    }
    out.insert("certificate".into(), to_value(&cert)?);
    out.insert("verification".into(), to_value(&report)?);
    Ok(Outcome::checked(Value::Object(out), report.passed))
}

fn cmd_verify(g: &Global, what: &VerifyCmd) -> Result<Outcome> {
    match what {
        VerifyCmd::Identity { lhs, rhs, mode } => {
            let s = g.problem()?;
            let a = s.forbidden()?;
            let mode = match mode {
                IdentityModeArg::ExactCoefficient => IdentityMode::ExactCoefficient,
                IdentityModeArg::ModIdeal => IdentityMode::ModIdeal,
            };
            let claims: Vec<(String, IdentityClaim)> = match (lhs, rhs) {
                (Some(l), Some(r)) => {
                    let lhs = read_json::<PolyJson>(l)?.to_poly()?;
                    let rhs = read_json::<PolyJson>(r)?.to_poly()?;
                    let n = lhs.n();
                    vec![("lhs ≡ rhs".into(), IdentityClaim { lhs, rhs, n, forbidden: a, mode })]
                }
                (None, None) => {
                    let n = s.n.unwrap_or(s.m.max(4));
                    let hosts = enumerate_a_free(s.m, &a)?;
                    let mut total = MultilinearPoly::zero(n);
                    let mut weighted = MultilinearPoly::zero(n);
                    for h in &hosts {
                        let p = d_h(h, n)?;
                        total = &total + &p;
                        weighted.add_scaled(&p, &graph_density(h));
                    }
                    vec![
                        ("1 ≡ Σ_H d_H".into(), IdentityClaim { lhs: MultilinearPoly::one(n), rhs: total, n, forbidden: a, mode }),
                        ("d ≡ Σ_H d(1_H) d_H".into(), IdentityClaim { lhs: edge_density(n), rhs: weighted, n, forbidden: a, mode }),
                    ]
                }
                _ => return Err(Error::Parameter("give both --lhs and --rhs, or neither".into())),
            };
            let mut reports = Vec::new();
            let mut passed = true;
            for (name, c) in &claims {
                let r = verify::verify_identity(c)?;
                passed &= r.holds;
                reports.push(json!({"claim": name, "report": r}));
            }
            Ok(Outcome::checked(json!({"claims": reports, "passed": passed}), passed))
        }
        VerifyCmd::Mantel => {
            let ns: Vec<usize> = g.n.map(|n| vec![n]).unwrap_or_else(|| (4..=6).collect());
            let mut runs = Vec::new();
            let mut passed = true;
            for n in ns {
                let r = verify::verify_mantel_flag_sos(n)?;
                let x = verify::verify_extremal(n)?;
                passed &= r.passed && x.passed;
                runs.push(json!({"sos": r, "extremal": x}));
            }
            Ok(Outcome::checked(json!({"runs": runs, "passed": passed}), passed))
        }
        VerifyCmd::Symmetric => {
            let ns: Vec<usize> = g.n.map(|n| vec![n]).unwrap_or_else(|| (4..=7).collect());
            let reports = ns.into_iter().map(verify::verify_symmetric_mantel).collect::<Result<Vec<_>>>()?;
            let passed = reports.iter().all(|r| r.passed);
            Ok(Outcome::checked(json!({"runs": reports, "passed": passed}), passed))
        }
        VerifyCmd::Certificate { certificate } => {
            let s = std::fs::read_to_string(certificate).map_err(|e| Error::Parse(format!("{}: {e}", certificate.display())))?;
            let cert = Certificate::from_json(&s)?;
            let r = verify::verify_certificate(&cert, g.n)?;
            let passed = r.passed();
            Ok(Outcome::checked(json!({"report": r, "passed": passed}), passed))
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    set_threads(cli.global.threads)?;
    if let Some(Demo::Mantel) = cli.demo {
        return demo::mantel(&cli.global.solver(), cli.global.denom_bound);
    }
    let g = &cli.global;
    match &cli.cmd {
        None => Err(Error::Parameter("no subcommand given (try --help)".into())),
        Some(Command::Enumerate) => cmd_enumerate(g),
        Some(Command::Table) => cmd_table(g),
        Some(Command::Solve) => cmd_solve(g),
        Some(Command::Gp(a)) => cmd_gp(g, a),
        Some(Command::Verify { what }) => cmd_verify(g, what),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| cli.global.emit(&o).map(|_| o.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
