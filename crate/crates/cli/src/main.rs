use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tyangian::acceptance;
use tyangian::dynkin::{cartan_matrix, invast, longest_word, DynkinType, TypeSign};
use tyangian::kclass::longest_reflection_transform;
use tyangian::polarization::{build_instance, solve_with, Strategy};
use tyangian::ratfield::{RatFunc, Var, VerifyMode};
use tyangian::relations::{
    check_embedding, check_k_unitarity, check_reflection, check_rtt, check_s_constant_term, check_s_factorization,
    default_mode, run_suite, IdentityVerdict, RttVariant, Scenario,
};
use tyangian::rkmat::{r_bullet_sigma, yang_r, FlagPlacement, KMatrixKind, RkError};
use tyangian::tableaux::{
    charges, enumerate_flag_tableaux, enumerate_instanton_tableaux, expected_dimension, poincare_polynomial,
    so_component_report, InstantonKind,
};

#[derive(Parser)]
#[command(name = "tyangian", version, about = "Exact R/K-matrices, fixed-point tableaux and identity checks for twisted Yangians")]
struct Cli {
    /// Worker threads for the parallel parts (defaults to one per core).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cartan data of a simply-laced Dynkin type.
    Dynkin {
        #[command(subcommand)]
        cmd: DynkinCmd,
    },
    /// Reflection-functor transforms of tautological K-classes.
    Kclass {
        #[command(subcommand)]
        cmd: KclassCmd,
    },
    /// Torus-fixed points as tableaux.
    Tableaux {
        #[command(subcommand)]
        cmd: TableauxCmd,
    },
    /// R- and K-matrices over the rational-function field.
    Rkmat {
        #[command(subcommand)]
        cmd: RkmatCmd,
    },
    /// Check an identity for one scenario, or the whole battery for one ℓ.
    Verify(VerifyArgs),
    /// Induced-polarization consistency problems.
    Polarization {
        #[command(subcommand)]
        cmd: PolarizationCmd,
    },
    /// Batteries of checks.
    Suite {
        #[command(subcommand)]
        cmd: SuiteCmd,
    },
    /// Tables: Betti numbers as CSV, K-matrices and polarization verdicts as JSON.
    Table {
        #[command(subcommand)]
        cmd: TableCmd,
    },
}

#[derive(Subcommand)]
enum DynkinCmd {
    Info {
        #[arg(long = "type")]
        ty: DynkinType,
    },
}

#[derive(Subcommand)]
enum KclassCmd {
    /// The composite transform along a reduced word of the longest element.
    W0 {
        #[arg(long = "type")]
        ty: DynkinType,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Tableaux,
}

#[derive(Subcommand)]
enum TableauxCmd {
    /// Fixed-point count, tangent dimension and Poincaré polynomial.
    Betti {
        #[arg(long)]
        kind: InstantonKind,
        #[arg(long = "l", value_parser = clap::value_parser!(u8).range(1..=12))]
        ell: u8,
        #[arg(long)]
        w1: usize,
        /// Stream each tableau with its charges as JSON lines before the report.
        #[arg(long)]
        emit: Option<Emit>,
    },
    /// Fixed points of the flag family.
    Flag {
        #[arg(long = "l", value_parser = clap::value_parser!(u8).range(2..=12))]
        ell: u8,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        sign: TypeSign,
        /// Dimension vector, comma separated; all σ-compatible vectors if omitted.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        v: Option<Vec<i64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixName {
    K,
    Yang,
    RBulletSigma,
}

#[derive(Clone, Copy, ValueEnum)]
enum Placement {
    AntiDiagonal,
    Diagonal,
}

impl From<Placement> for FlagPlacement {
    fn from(p: Placement) -> FlagPlacement {
        match p {
            Placement::AntiDiagonal => FlagPlacement::AntiDiagonal,
            Placement::Diagonal => FlagPlacement::Diagonal,
        }
    }
}

#[derive(Subcommand)]
enum RkmatCmd {
    /// A matrix in the spectral variable `u`, entries in canonical form.
    Emit {
        #[arg(long, value_enum, default_value = "k")]
        matrix: MatrixName,
        /// K-matrix kind; required for `--matrix k`.
        #[arg(long, required_if_eq("matrix", "k"))]
        kind: Option<KMatrixKind>,
        #[arg(long = "l", value_parser = clap::value_parser!(u8).range(2..=16))]
        ell: u8,
        #[arg(long, value_enum, default_value = "anti-diagonal")]
        placement: Placement,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Reflection,
    KUnitarity,
    Rtt,
    SMatrix,
    Embedding,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Symbolic,
    Multipoint,
}

impl From<Mode> for VerifyMode {
    fn from(m: Mode) -> VerifyMode {
        match m {
            Mode::Symbolic => VerifyMode::Symbolic,
            Mode::Multipoint => VerifyMode::Multipoint,
        }
    }
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["scenario", "suite"]))]
struct VerifyArgs {
    #[arg(long)]
    scenario: Option<KMatrixKind>,
    #[arg(long, value_enum)]
    suite: Option<SuiteName>,
    #[arg(long = "l", value_parser = clap::value_parser!(u8).range(2..=16))]
    ell: u8,
    #[arg(long, value_enum, default_value = "reflection", conflicts_with = "suite")]
    identity: Identity,
    /// Number of sites for `rtt` and `s-matrix`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=2))]
    n: u8,
    /// One RTT relation (h5..h8); all four if omitted.
    #[arg(long)]
    variant: Option<RttVariant>,
    #[arg(long, value_enum, default_value = "anti-diagonal")]
    placement: Placement,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum PolarizationCmd {
    /// Decide whether a consistent choice of polarization exists.
    Solve {
        #[arg(long)]
        sign: TypeSign,
        #[arg(long = "l", value_parser = clap::value_parser!(u8).range(2..=8))]
        ell: u8,
        #[arg(long)]
        strategy: Option<Strategy>,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// The eleven acceptance criteria.
    Acceptance,
    /// YBE, unitarity, reflection, RTT and S-matrix checks for one ℓ.
    Identities {
        #[arg(long = "l", value_parser = clap::value_parser!(u8).range(2..=16))]
        ell: u8,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
}

#[derive(Subcommand)]
enum TableCmd {
    /// CSV rows `l,w1,dim,poincare` for 2 ≤ ℓ ≤ max-l and 0 ≤ w1 ≤ max-w1.
    Betti {
        #[arg(long)]
        kind: InstantonKind,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=8))]
        max_l: u8,
        #[arg(long)]
        max_w1: usize,
    },
    /// The K-matrix of one kind, as a JSON matrix.
    Kmatrix {
        #[arg(long)]
        kind: KMatrixKind,
        #[arg(long = "l", value_parser = clap::value_parser!(u8).range(2..=16))]
        ell: u8,
    },
    /// Verdicts for both signs and 2 ≤ ℓ ≤ max-l.
    Polarization {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=8))]
        max_l: u8,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

enum Output {
    Report { results: Value, passed: bool },
    Csv(String),
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn usage<E: std::fmt::Display>(flag: &str) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Usage(format!("{flag}: {e}"))
}

fn rk_usage(e: RkError) -> Failure {
    Failure::Usage(format!("--l: {e}"))
}

fn verdicts(vs: Vec<Result<IdentityVerdict, RkError>>) -> Output {
    let mut passed = true;
    let results = vs
        .into_iter()
        .map(|v| match v {
            Ok(v) => {
                passed &= v.as_expected();
                to_value(v)
            }
            Err(e) => {
                passed = false;
                json!({ "error": e.to_string() })
            }
        })
        .collect();
    Output::Report { results: Value::Array(results), passed }
}

fn report(results: Value) -> Result<Output, Failure> {
    Ok(Output::Report { results, passed: true })
}

fn run(cmd: Command) -> Result<Output, Failure> {
    match cmd {
        Command::Dynkin { cmd: DynkinCmd::Info { ty } } => {
            let c = cartan_matrix(ty);
            report(json!({
                "type": ty,
                "cartan": c.cartan,
                "coxeter": c.coxeter_number,
                "invast": invast(ty),
                "longestWordLength": c.positive_root_count,
                "longestWord": longest_word(ty),
            }))
        }
        Command::Kclass { cmd: KclassCmd::W0 { ty } } => {
            let entries = longest_reflection_transform(ty).map_err(|e| Failure::Verification(e.to_string()))?;
            report(json!({ "type": ty, "entries": entries }))
        }
        Command::Tableaux { cmd: TableauxCmd::Betti { kind, ell, w1, emit } } => {
            let ts = enumerate_instanton_tableaux(ell, w1);
            if emit.is_some() {
                for t in &ts {
                    let r = charges(t).map_err(|e| Failure::Verification(e.to_string()))?;
                    println!("{}", json!({ "tableau": t, "charges": r }));
                }
            }
            let p = poincare_polynomial(kind, ell, w1).map_err(usage("--w1"))?;
            let mut out = json!({
                "kind": kind,
                "ell": ell,
                "w1": w1,
                "count": ts.len(),
                "dimension": expected_dimension(kind, w1),
                "poincare": p.to_string(),
                "coefficients": p.0,
            });
            if kind == InstantonKind::So {
                let r = so_component_report(ell, w1).map_err(usage("--w1"))?;
                out["zeroChargeCount"] = json!(r.zero_charge_count);
                if let Some(sizes) = r.components {
                    out["components"] = json!(sizes.len());
                    out["componentSizes"] = json!(sizes);
                }
            }
            report(out)
        }
        Command::Tableaux { cmd: TableauxCmd::Flag { ell, w, sign, v } } => {
            let e = enumerate_flag_tableaux(ell, v.as_deref(), w, sign);
            report(json!({
                "ell": ell,
                "w": w,
                "sign": sign,
                "count": e.tableaux.len(),
                "tableaux": e.tableaux,
                "diagnostic": e.diagnostic,
            }))
        }
        Command::Rkmat { cmd: RkmatCmd::Emit { matrix, kind, ell, placement } } => {
            let ell = usize::from(ell);
            let u = RatFunc::var(Var::U);
            let m = match (matrix, kind) {
                (MatrixName::Yang, _) => yang_r(ell, &u),
                (MatrixName::RBulletSigma, _) => r_bullet_sigma(ell, &u),
                (MatrixName::K, Some(kind)) => Scenario::new(kind, ell).with_placement(placement.into()).k(&u),
                (MatrixName::K, None) => return Err(Failure::Usage("--kind is required for --matrix k".into())),
            }
            .map_err(rk_usage)?;
            report(to_value(m))
        }
        Command::Verify(args) => verify(args),
        Command::Polarization { cmd: PolarizationCmd::Solve { sign, ell, strategy } } => {
            let inst = build_instance(sign, ell).map_err(usage("--l"))?;
            report(to_value(solve_with(&inst, strategy.unwrap_or_else(|| Strategy::default_for(ell)))))
        }
        Command::Suite { cmd: SuiteCmd::Acceptance } => {
            let rs = acceptance::run_all();
            for r in &rs {
                eprintln!("{r}");
            }
            let passed = rs.iter().all(|r| r.passed);
            Ok(Output::Report { results: to_value(rs), passed })
        }
        Command::Suite { cmd: SuiteCmd::Identities { ell, mode } } => {
            Ok(verdicts(run_suite(usize::from(ell), mode.map(Into::into))))
        }
        Command::Table { cmd } => table(cmd),
    }
}

fn verify(a: VerifyArgs) -> Result<Output, Failure> {
    let ell = usize::from(a.ell);
    let mode = |dim: usize| a.mode.map_or_else(|| default_mode(dim), Into::into);
    let Some(kind) = a.scenario else {
        return Ok(verdicts(run_suite(ell, a.mode.map(Into::into))));
    };
    let s = Scenario::new(kind, ell).with_placement(a.placement.into());
    let n = usize::from(a.n);
    let vs = match a.identity {
        Identity::Reflection => vec![check_reflection(&s, mode(ell * ell))],
        Identity::KUnitarity => vec![check_k_unitarity(ell, &|x: &RatFunc| s.k(x), mode(ell))],
        Identity::Rtt => {
            let variants = a.variant.map_or(RttVariant::ALL.to_vec(), |v| vec![v]);
            variants.into_iter().map(|v| check_rtt(&s, n, v, mode(ell.pow(2 + a.n as u32)))).collect()
        }
        Identity::SMatrix => {
            vec![check_s_constant_term(&s, n), check_s_factorization(&s, n, mode(ell.pow(1 + a.n as u32)))]
        }
        Identity::Embedding => vec![check_embedding(&s, mode(ell.pow(3)))],
    };
    if let Some(Err(e)) = vs.iter().find(|v| v.is_err()) {
        return Err(rk_usage(e.clone()));
    }
    Ok(verdicts(vs))
}

fn table(cmd: TableCmd) -> Result<Output, Failure> {
    match cmd {
        TableCmd::Betti { kind, max_l, max_w1 } => {
            let mut csv = String::from("l,w1,dim,poincare\n");
            for ell in 2..=max_l {
                for w1 in 0..=max_w1 {
                    let p = poincare_polynomial(kind, ell, w1).map_err(usage("--max-w1"))?;
                    csv.push_str(&format!("{ell},{w1},{},{p}\n", expected_dimension(kind, w1)));
                }
            }
            Ok(Output::Csv(csv))
        }
        TableCmd::Kmatrix { kind, ell } => {
            let m = Scenario::new(kind, usize::from(ell)).k(&RatFunc::var(Var::U)).map_err(rk_usage)?;
            report(to_value(m))
        }
        TableCmd::Polarization { max_l } => {
            let mut rows = Vec::new();
            for sign in [TypeSign::Minus, TypeSign::Plus] {
                for ell in 2..=max_l {
                    let inst = build_instance(sign, ell).map_err(usage("--max-l"))?;
                    let r = solve_with(&inst, Strategy::default_for(ell));
                    rows.push(json!({ "sign": sign, "ell": ell, "verdict": r.outcome.verdict() }));
                }
            }
            report(Value::Array(rows))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(usize::from(n)).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    match run(cli.command) {
        Ok(Output::Csv(s)) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Ok(Output::Report { results, passed }) => {
            let out = json!({
                "command": argv,
                "results": results,
                "wallTimeMs": start.elapsed().as_millis() as u64,
                "toolVersion": env!("CARGO_PKG_VERSION"),
            });
            println!("{out}");
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
