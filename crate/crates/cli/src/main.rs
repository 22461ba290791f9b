use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hylosat::deciders::{decide_with, verify_witness, DecideError, Frame, Options, Route, Status, Verdict};
use hylosat::fol::{close_sentence, FolError, DEFAULT_CLAUSE_LIMIT};
use hylosat::formula::{normalize_with_map, print, rename_apart, Formula, FormulaError};
use hylosat::kripke::{check_finite, check_segmented, quotient, ModelError, ModelFile};
use hylosat::reductions::{encode_3sat, encode_folp, encode_ord, encode_qbf, parse_dimacs, parse_qbf, OrdInstance};

const FORMATS: &str = "\
Input formats:
  formula   <> [] down x. @#i @$x, atoms #nominal $statevar prop true false,
            connectives & | ! and parentheses; e.g. \"down x. <> @$x #i\".
  qbf       \"forall x. exists y. ((x & y) | (!x & !y))\"; negation on variables only.
  dimacs    standard 'p cnf V C' header, clauses of exactly three literals ending in 0.
  ord       {\"vertices\":[\"a\",\"b\"],\"successor\":[[\"a\",\"b\"]],\"s\":\"a\",\"t\":\"b\"}.
  folp      prenex FOL(<,P): \"forall x. exists y. (x < y & P(y))\", NNF matrix.
  model     {\"kind\":\"finite\",\"states\":3,\"nominals\":{\"i\":1},\"svars\":{},\"props\":{\"p\":[0,2]}}
            or {\"kind\":\"segmented\",\"segments\":[{\"type\":\"point\",\"nominals\":[\"i\"]},{\"type\":\"dense\"}]}.

Exit codes: 0 done, 2 parse error, 3 unsupported fragment or route,
4 resource limit (verdict unknown), 5 invalid model file.
HYLOSAT_QE_LIMIT overrides the clause ceiling of quantifier elimination.";

#[derive(Parser)]
#[command(name = "hylosat", version, about = "Satisfiability for monotone hybrid logic over linear orders and the naturals", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide satisfiability; prints a verdict as JSON.
    Decide {
        #[arg(long, value_enum)]
        frame: FrameArg,
        /// Procedure to use: auto, or one of the route names.
        #[arg(long, default_value = "auto")]
        route: String,
        /// Re-check the witness of a sat verdict with an independent checker.
        #[arg(long)]
        verify: bool,
        /// Print a short human-readable summary instead of JSON.
        #[arg(long)]
        pretty: bool,
        file: Option<PathBuf>,
    },
    /// Print the first-order sentence over (N,<) equivalent to satisfiability.
    Translate {
        #[arg(long, value_enum)]
        to: TargetArg,
        file: Option<PathBuf>,
    },
    /// Encode a source problem as a hybrid formula.
    Encode {
        #[arg(long, value_enum)]
        from: SourceArg,
        file: Option<PathBuf>,
    },
    /// Model-check a formula at a state of a model file.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        state: usize,
        file: Option<PathBuf>,
    },
    /// Collapse a finite model to its quotient for modal depth K.
    Quotient {
        #[arg(long = "m", value_name = "K")]
        m: usize,
        #[arg(long)]
        pretty: bool,
        model: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Nat,
    Lin,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Fol,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Qbf,
    Dimacs,
    Ord,
    Folp,
}

/// A failure with its exit code.
struct Failure(u8, String);

impl Failure {
    fn parse(msg: impl std::fmt::Display) -> Self {
        Failure(2, msg.to_string())
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        let code = match &e {
            DecideError::Formula(FormulaError::NotMonotone)
            | DecideError::WrongFragment { .. }
            | DecideError::Unsupported { .. } => 3,
            DecideError::Fol(FolError::ResourceLimit { .. }) => 4,
            DecideError::Model(_) => 5,
            _ => 2,
        };
        Failure(code, e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure(5, e.to_string())
    }
}

fn read_input(file: &Option<PathBuf>) -> Result<String, Failure> {
    match file {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Failure::parse(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(Failure::parse)?;
            Ok(s)
        }
    }
}

fn read_formula(file: &Option<PathBuf>) -> Result<Formula, Failure> {
    hylosat::parse(read_input(file)?.trim()).map_err(Failure::parse)
}

fn read_model(path: &PathBuf) -> Result<ModelFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(5, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure(5, format!("{}: {e}", path.display())))
}

fn qe_limit() -> Result<usize, Failure> {
    match std::env::var("HYLOSAT_QE_LIMIT") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::parse(format!("HYLOSAT_QE_LIMIT: not a number: {v:?}"))),
        Err(_) => Ok(DEFAULT_CLAUSE_LIMIT),
    }
}

fn summary(v: &Verdict) -> String {
    let status = match v.status {
        Status::Sat => "satisfiable",
        Status::Unsat => "unsatisfiable",
        Status::Unknown => "unknown (resource limit)",
    };
    let mut s = format!("{status} over {} via {}", v.frame, v.route);
    if let Some(w) = &v.witness {
        if let Some(n) = w.state {
            s.push_str(&format!("\n  at state {n}"));
        }
        for (name, map) in [("assignment", w.assignment.as_ref().map(|a| &a.0)), ("valuation", w.valuation.as_ref())] {
            if let Some(m) = map.filter(|m| !m.is_empty()) {
                let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}={v}")).collect();
                s.push_str(&format!("\n  {name}: {}", parts.join(", ")));
            }
        }
    }
    s
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Decide { frame, route, verify, pretty, file } => {
            let forced = match route.as_str() {
                "auto" => None,
                name => Some(Route::from_name(name).ok_or_else(|| Failure::parse(format!("unknown route {name:?}")))?),
            };
            let f = read_formula(&file)?;
            let frame = match frame {
                FrameArg::Nat => Frame::Nat,
                FrameArg::Lin => Frame::Lin,
            };
            let opts = Options { qe_limit: qe_limit()?, ..Options::default() };
            let v = decide_with(&f, frame, forced, &opts)?;
            if pretty {
                println!("{}", summary(&v));
            } else {
                println!("{}", serde_json::to_string(&v).expect("verdicts serialize"));
            }
            if verify && v.is_sat() {
                if !verify_witness(&f, &v)? {
                    return Err(Failure(1, "witness failed verification".into()));
                }
                eprintln!("witness verified");
            }
            Ok(if v.status == Status::Unknown { 4 } else { 0 })
        }
        Cmd::Translate { to: TargetArg::Fol, file } => {
            let f = read_formula(&file)?;
            let (g, _) = normalize_with_map(&f, true).map_err(|e| Failure(3, e.to_string()))?;
            let s = close_sentence(&rename_apart(&g)).map_err(|e| Failure(3, e.to_string()))?;
            println!("{s}");
            Ok(0)
        }
        Cmd::Encode { from, file } => {
            let text = read_input(&file)?;
            let f = match from {
                SourceArg::Qbf => encode_qbf(&parse_qbf(text.trim()).map_err(Failure::parse)?),
                SourceArg::Dimacs => encode_3sat(&parse_dimacs(&text).map_err(Failure::parse)?),
                SourceArg::Ord => {
                    let o = OrdInstance::from_json(&text).map_err(Failure::parse)?;
                    encode_ord(&o).map_err(Failure::parse)?
                }
                SourceArg::Folp => {
                    let phi = hylosat::fol::parse_fol(text.trim()).map_err(Failure::parse)?;
                    encode_folp(&phi).map_err(Failure::parse)?
                }
            };
            println!("{}", print(&f));
            Ok(0)
        }
        Cmd::Check { model, state, file } => {
            let m = read_model(&model)?;
            let f = read_formula(&file)?;
            let holds = match &m {
                ModelFile::Finite(m) => check_finite(m, state, &f)?,
                ModelFile::Segmented(m) => check_segmented(m, state, &f).map_err(|e| match e {
                    ModelError::UnsupportedOperator(_) => Failure(3, e.to_string()),
                    e => e.into(),
                })?,
            };
            println!("{holds}");
            Ok(0)
        }
        Cmd::Quotient { m, pretty, model } => {
            let ModelFile::Finite(fm) = read_model(&model)? else {
                return Err(Failure(5, "quotient needs a finite model".into()));
            };
            let q = quotient(&fm, m)?;
            let out = if pretty { serde_json::to_string_pretty(&q) } else { serde_json::to_string(&q) };
            println!("{}", out.expect("quotients serialize"));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("hylosat: {msg}");
            ExitCode::from(code)
        }
    }
}
