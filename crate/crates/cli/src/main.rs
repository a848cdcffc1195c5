//! Command-line front end for the instruction sequence toolkit.

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use inseq::cg::{rel_k, GotoMode};
use inseq::expressiveness::{
    construct_inseq_with, forward_only_build, gen_a_plus_n_thread, gen_c_tree, gen_cg_tree, gen_one_dir_thread,
    CounterSet, Polarity, Selection,
};
use inseq::machine::{behavior_at, Machine};
use inseq::translate::{Formalism, Program, Route};
use inseq::{Action, CgInSeq, ThreadSpec};

#[derive(Parser)]
#[command(name = "inseq", version, about = "Instruction sequences in PGA, C and Cg: behavior, equivalence and translations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and print it in canonical syntax.
    Parse {
        formalism: Lang,
        /// Program file, or `-` for standard input.
        file: String,
    },
    /// Extract the behavior of a program as a minimal thread specification.
    Behave {
        formalism: BehaveLang,
        file: String,
        /// `left`, `right` or a position.
        #[arg(long, default_value = "left", allow_hyphen_values = true)]
        from: String,
        /// Jump bound for `cg-rel`.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Decide whether two behaviors are bisimilar.
    ///
    /// Operands are `<fmt>:<file>[@<from>]` with fmt one of pga, c, cg, cgp,
    /// cp, c0, or `spec:<file>` for a thread specification.
    Equiv { left: String, right: String },
    /// Translate a program along a named route.
    Translate {
        route: String,
        file: String,
        /// Bound `k` (or `m` for to-program); defaults to the least admissible value.
        #[arg(long)]
        k: Option<usize>,
        /// Print a report on lengths and positions to standard error.
        #[arg(long)]
        report: bool,
    },
    /// Report reachability, exits, orphaned gotos and label relations.
    Analyze { formalism: AnalyzeLang, file: String },
    /// Bring a Cg program into label normal form.
    Lnf { file: String },
    /// Free label numbers in a Cg program, in the order given.
    Free {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<usize>,
    },
    /// Embed a Cg program so that gotos numbered up to k act as relative jumps.
    Rel {
        file: String,
        #[arg(long)]
        k: usize,
    },
    /// Build a C program for a thread using only the given jump counters.
    Construct {
        /// Thread specification file.
        file: String,
        /// Forward jump counters, e.g. `every 2 from 4 offset 0`.
        #[arg(long)]
        fwd: String,
        /// Backward jump counters; required unless --forward-only.
        #[arg(long)]
        bwd: Option<String>,
        /// Randomize counter selection with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Use only forward jumps (finite threads only).
        #[arg(long)]
        forward_only: bool,
        /// Test polarity for --forward-only.
        #[arg(long, value_enum, default_value = "pos")]
        polarity: PolarityArg,
    },
    /// Generate a thread family member or a tree gadget.
    Gen {
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "a")]
        action: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Lang {
    Pga,
    C,
    Cg,
    Cp,
    C0,
    Spec,
}

#[derive(Clone, Copy, ValueEnum)]
enum BehaveLang {
    Pga,
    C,
    Cg,
    CgRel,
    Cgp,
    Cp,
    C0,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeLang {
    C,
    Cg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarityArg {
    Pos,
    Neg,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    APlusN,
    OneDir,
    CTree,
    CgTree,
}

enum Failure {
    Usage(String),
    Precondition(String),
}

type Outcome = Result<Output, Failure>;

/// Text for standard output plus the exit status.
struct Output {
    text: String,
    status: u8,
}

impl Output {
    fn ok(text: impl Into<String>) -> Self {
        Output { text: text.into(), status: 0 }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn precondition(e: impl std::fmt::Display) -> Failure {
    Failure::Precondition(e.to_string())
}

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
    }
}

fn parse_in<T: std::str::FromStr>(path: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    let src = read_source(path)?;
    src.parse().map_err(|e| usage(format!("{path}:{e}")))
}

fn read_program(formalism: Formalism, path: &str) -> Result<Program, Failure> {
    let src = read_source(path)?;
    formalism.parse_program(&src).map_err(|e| usage(format!("{path}:{e}")))
}

fn line(s: impl std::fmt::Display) -> String {
    let s = s.to_string();
    format!("{}\n", s.trim_end_matches('\n'))
}

#[derive(Clone, Copy)]
enum From {
    Left,
    Right,
    At(i64),
}

fn parse_from(s: &str) -> Result<From, Failure> {
    match s {
        "left" => Ok(From::Left),
        "right" => Ok(From::Right),
        _ => s
            .parse()
            .map(From::At)
            .map_err(|_| usage(format!("--from expects `left`, `right` or an integer position, got `{s}`"))),
    }
}

fn extract<M: Machine + ?Sized>(m: &M, from: From) -> ThreadSpec {
    let at = match from {
        From::Left => 1,
        From::Right => m.len() as i64,
        From::At(i) => {
            if !m.in_range(i) {
                eprintln!("note: position {i} is outside 1..={}; the behavior there is D", m.len());
            }
            i
        }
    };
    behavior_at(m, at)
}

fn program_behavior(p: &Program, from: From, mode: GotoMode) -> Result<ThreadSpec, Failure> {
    Ok(match p {
        Program::Pga(t) => {
            if !matches!(from, From::Left) {
                return Err(usage("PGA terms only have a left behavior"));
            }
            t.behavior()
        }
        Program::C(x) => extract(x, from),
        Program::Cg(x) => extract(&x.with_mode(mode), from),
        Program::Cp(x) => extract(x, from),
        Program::C0(x) => extract(x, from),
    })
}

fn cmd_parse(lang: Lang, file: &str) -> Outcome {
    let text = match lang {
        Lang::Spec => parse_in::<ThreadSpec>(file)?.to_string(),
        Lang::Pga => read_program(Formalism::Pga, file)?.to_string(),
        Lang::C => read_program(Formalism::C, file)?.to_string(),
        Lang::Cg => read_program(Formalism::Cg, file)?.to_string(),
        Lang::Cp => read_program(Formalism::Cp, file)?.to_string(),
        Lang::C0 => read_program(Formalism::C0, file)?.to_string(),
    };
    Ok(Output::ok(line(text)))
}

fn cmd_behave(lang: BehaveLang, file: &str, from: &str, k: Option<usize>) -> Outcome {
    let from = parse_from(from)?;
    let (formalism, mode) = match lang {
        BehaveLang::Pga => (Formalism::Pga, GotoMode::Directional),
        BehaveLang::C => (Formalism::C, GotoMode::Directional),
        BehaveLang::Cg => (Formalism::Cg, GotoMode::Directional),
        BehaveLang::CgRel => {
            let k = k.ok_or_else(|| usage("cg-rel needs --k"))?;
            (Formalism::Cg, GotoMode::Relative(k))
        }
        BehaveLang::Cgp => (Formalism::Cg, GotoMode::General),
        BehaveLang::Cp => (Formalism::Cp, GotoMode::Directional),
        BehaveLang::C0 => (Formalism::C0, GotoMode::Directional),
    };
    let p = read_program(formalism, file)?;
    Ok(Output::ok(line(program_behavior(&p, from, mode)?.minimize())))
}

fn operand_behavior(spec: &str) -> Result<ThreadSpec, Failure> {
    let (fmt, rest) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("operand `{spec}` must look like <fmt>:<file>[@<from>]")))?;
    if fmt == "spec" {
        return parse_in::<ThreadSpec>(rest);
    }
    let (path, from) = match rest.rsplit_once('@') {
        Some((p, f)) => (p, parse_from(f)?),
        None => (rest, From::Left),
    };
    let (formalism, mode) = match fmt {
        "cgp" => (Formalism::Cg, GotoMode::General),
        other => (other.parse::<Formalism>().map_err(usage)?, GotoMode::Directional),
    };
    program_behavior(&read_program(formalism, path)?, from, mode)
}

fn cmd_equiv(a: &str, b: &str) -> Outcome {
    let (p, q) = (operand_behavior(a)?, operand_behavior(b)?);
    match p.distinguish(&q) {
        None => Ok(Output::ok("EQUIVALENT\n")),
        Some(d) => {
            let replies: Vec<String> =
                d.replies.iter().map(|(a, r)| format!("{a}={}", if *r { "T" } else { "F" })).collect();
            let path = if replies.is_empty() { "(none)".to_string() } else { replies.join(",") };
            Ok(Output {
                text: format!(
                    "NOT EQUIVALENT\ndistinguishing replies (depth {}): {path}\nleft continues with {}, right with {}\n",
                    d.replies.len(),
                    d.left,
                    d.right
                ),
                status: 1,
            })
        }
    }
}

fn cmd_translate(route: &str, file: &str, k: Option<usize>, report: bool) -> Outcome {
    let route: Route = route.parse().map_err(usage)?;
    let input = read_program(route.input(), file)?;
    let (out, rep) = route.apply(&input, k).map_err(precondition)?;
    if report {
        eprintln!("{rep}");
    }
    Ok(Output::ok(line(out)))
}

fn list<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn cmd_analyze(lang: AnalyzeLang, file: &str) -> Outcome {
    let mut out = String::new();
    match lang {
        AnalyzeLang::C => {
            let Program::C(x) = read_program(Formalism::C, file)? else { unreachable!() };
            out += &format!("length: {}\n", x.len());
            out += &format!("reachable from 1: {}\n", list(x.reachable(1)));
            out += &format!("exit positions: {}\n", list(x.exits()));
        }
        AnalyzeLang::Cg => {
            let Program::Cg(x) = read_program(Formalism::Cg, file)? else { unreachable!() };
            let rel = x.label_relations();
            out += &format!("length: {}\n", x.len());
            out += &format!("reachable from 1: {}\n", list(x.reachable(1)));
            out += &format!("exit positions: {}\n", list(x.exits()));
            out += &format!("orphaned gotos: {}\n", list(x.orphaned()));
            let classes: Vec<String> = rel.classes.iter().map(|c| list(c)).collect();
            out += &format!("lgr classes: {}\n", if classes.is_empty() { "none".into() } else { classes.join(" ") });
            out += &format!("label normal form: {}\n", if rel.is_lnf() { "yes" } else { "no" });
        }
    }
    Ok(Output::ok(out))
}

fn read_cg(file: &str) -> Result<CgInSeq, Failure> {
    parse_in::<CgInSeq>(file)
}

fn cmd_construct(
    file: &str,
    fwd: &str,
    bwd: Option<&str>,
    seed: Option<u64>,
    forward_only: bool,
    polarity: PolarityArg,
) -> Outcome {
    let p: ThreadSpec = parse_in(file)?;
    let fwd: CounterSet = fwd.parse().map_err(usage)?;
    let x = if forward_only {
        let pol = match polarity {
            PolarityArg::Pos => Polarity::Pos,
            PolarityArg::Neg => Polarity::Neg,
        };
        forward_only_build(&p, &fwd, pol).map_err(precondition)?
    } else {
        let bwd: CounterSet = bwd.ok_or_else(|| usage("--bwd is required unless --forward-only"))?.parse().map_err(usage)?;
        let sel = seed.map_or(Selection::Least, Selection::Seeded);
        construct_inseq_with(&p, &fwd, &bwd, sel)
    };
    Ok(Output::ok(line(x)))
}

fn cmd_gen(kind: GenKind, n: usize, action: &str) -> Outcome {
    if n == 0 {
        return Err(precondition("--n must be at least 1"));
    }
    let a = Action::new(action).map_err(usage)?;
    let text = match kind {
        GenKind::APlusN => gen_a_plus_n_thread(&a, n).minimize().to_string(),
        GenKind::OneDir => gen_one_dir_thread(&a, n).minimize().to_string(),
        GenKind::CTree => gen_c_tree(&a, n).to_string(),
        GenKind::CgTree => gen_cg_tree(&a, n).to_string(),
    };
    Ok(Output::ok(line(text)))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Parse { formalism, file } => cmd_parse(formalism, &file),
        Command::Behave { formalism, file, from, k } => cmd_behave(formalism, &file, &from, k),
        Command::Equiv { left, right } => cmd_equiv(&left, &right),
        Command::Translate { route, file, k, report } => cmd_translate(&route, &file, k, report),
        Command::Analyze { formalism, file } => cmd_analyze(formalism, &file),
        Command::Lnf { file } => Ok(Output::ok(line(read_cg(&file)?.to_lnf()))),
        Command::Free { file, labels } => Ok(Output::ok(line(read_cg(&file)?.free_seq(&labels)))),
        Command::Rel { file, k } => Ok(Output::ok(line(rel_k(&read_cg(&file)?, k).map_err(precondition)?))),
        Command::Construct { file, fwd, bwd, seed, forward_only, polarity } => {
            cmd_construct(&file, &fwd, bwd.as_deref(), seed, forward_only, polarity)
        }
        Command::Gen { kind, n, action } => cmd_gen(kind, n, &action),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.status)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
