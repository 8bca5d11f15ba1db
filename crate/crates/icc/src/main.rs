use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use icc_core::ast::{ctx_translate, type_translate, Term, TypingContext};
use icc_core::dynamics::source_step_candidates;
use icc_core::elab::{elaborate_expr, elaborate_program, ElaboratedProgram, ProgramError};
use icc_core::metatheory::{fuzz, simulate_star, FuzzConfig, MetaError};
use icc_core::subtyping::subtype;
use icc_core::surface::{parse_target, read_expr, read_program, read_type, DesugaredProgram, ParseError, SurfaceError};
use icc_core::target::{target_eval_with, target_typecheck, target_typecheck_against, EvalOutcome};

const STACK_SIZE: usize = 1 << 30;

#[derive(Parser, Debug)]
#[command(name = "icc", version, about = "Elaborating compiler for intersection and union types with merges")]
struct Cli {
    /// Do not load the primitive prelude.
    #[arg(long, global = true)]
    no_prelude: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Typecheck a program and print the type of each declaration.
    Check { file: PathBuf },
    /// Elaborate a program and write the target term.
    Elab {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Elaborate and evaluate a program.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        #[arg(long)]
        trace: bool,
    },
    /// Decide A <: B and print the coercion.
    Subtype { source: String, target: String },
    /// Print the source reduction candidates of an expression.
    Srcstep {
        expr: String,
        #[arg(long)]
        split: bool,
    },
    /// Run a program in the target, simulating every step in the source.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Fuzz soundness and consistency on random core terms.
    Fuzz {
        #[arg(long, default_value = "1..6", value_parser = parse_sizes)]
        sizes: RangeInclusive<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// `N` or `LO..HI`, both inclusive and positive.
fn parse_sizes(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad size `{}`: {}", t, e));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo == 0 || hi < lo {
        return Err(format!("sizes must be a nonempty range of positive sizes, got `{}`", s));
    }
    Ok(lo..=hi)
}

enum Failure {
    Type(String),
    Usage(String),
    Timeout(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Type(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Timeout(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Type(m) | Failure::Usage(m) | Failure::Timeout(m) | Failure::Internal(m) => m,
        }
    }
}

type Outcome = Result<String, Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn surface_failure(file: &str, e: &SurfaceError) -> Failure {
    let msg = match e {
        SurfaceError::Parse(ParseError { pos, message }) => format!("{}:{}: error: {}", file, pos, message),
        SurfaceError::Desugar(d) => format!("{}:{}: error: {}", file, e.pos(), d),
    };
    Failure::Type(msg)
}

fn program_failure(file: &str, e: &ProgramError) -> Failure {
    Failure::Type(format!("{}:{}", file, e))
}

fn load(path: &Path, prelude: bool) -> Result<DesugaredProgram, Failure> {
    let src = read_file(path)?;
    read_program(&src, prelude).map_err(|e| surface_failure(&path.display().to_string(), &e))
}

fn elaborate(path: &Path, prelude: bool) -> Result<ElaboratedProgram, Failure> {
    let p = load(path, prelude)?;
    elaborate_program(&p).map_err(|e| program_failure(&path.display().to_string(), &e))
}

fn cmd_check(file: &Path, prelude: bool) -> Outcome {
    let prog = elaborate(file, prelude)?;
    let mut out = String::new();
    for d in &prog.decls {
        writeln!(out, "val {} : {}", d.name, d.ty).unwrap();
    }
    Ok(out)
}

/// Typechecks each binding of the reparsed `let` chain against the
/// translated type of its declaration.
fn recheck(prog: &ElaboratedProgram, mut m: &Term) -> Result<(), String> {
    let mut ctx = TypingContext::new();
    for d in &prog.decls {
        let Term::Let(x, bound, body) = m else { return Err(format!("expected a binding of {}", d.name)) };
        target_typecheck_against(&ctx_translate(&ctx), bound, &type_translate(&d.ty)).map_err(|e| e.to_string())?;
        ctx.push(x.clone(), d.ty.clone());
        m = body;
    }
    target_typecheck(&ctx_translate(&ctx), m).map(|_| ()).map_err(|e| e.to_string())
}

fn cmd_elab(file: &Path, output: Option<&Path>, prelude: bool) -> Outcome {
    let prog = elaborate(file, prelude)?;
    let text = format!("{}\n", prog.target);
    let reparsed = parse_target(&text).map_err(|e| Failure::Internal(format!("target does not reparse: {}", e)))?;
    recheck(&prog, &reparsed).map_err(|e| Failure::Internal(format!("target does not typecheck: {}", e)))?;
    match output {
        Some(p) => write_file(p, &text).map(|_| String::new()),
        None => Ok(text),
    }
}

fn cmd_run(file: &Path, max_steps: usize, trace: bool, prelude: bool) -> Outcome {
    let prog = elaborate(file, prelude)?;
    let mut lines = String::new();
    let outcome = target_eval_with(&prog.target, max_steps, |k, rule, m| {
        if trace {
            writeln!(lines, "{}: {}: {}", k, rule, m).unwrap();
        }
    });
    let mut out = lines;
    out.push_str(outcome.output());
    match outcome {
        EvalOutcome::Value { value, .. } => {
            if value != Term::Unit {
                writeln!(out, "{}", value).unwrap();
            }
            Ok(out)
        }
        EvalOutcome::OutOfFuel { steps, .. } => {
            print!("{}", out);
            Err(Failure::Timeout(format!("timeout after {} steps", steps)))
        }
        EvalOutcome::Stuck { term, reason, .. } => {
            print!("{}", out);
            Err(Failure::Internal(format!("stuck: {}: {}", reason, term)))
        }
    }
}

fn cmd_subtype(a: &str, b: &str) -> Outcome {
    let parse = |s: &str| read_type(s).map_err(|e| surface_failure("<type>", &e));
    let (a, b) = (parse(a)?, parse(b)?);
    match subtype(&a, &b) {
        Ok(c) => Ok(format!("{}\n", c)),
        Err(_) => Err(Failure::Type("NOT A SUBTYPE".into())),
    }
}

fn cmd_srcstep(src: &str, split: bool) -> Outcome {
    let e = read_expr(src, false).map_err(|e| surface_failure("<expr>", &e))?;
    let mut out = String::new();
    for s in source_step_candidates(&e, split) {
        writeln!(out, "{}", s).unwrap();
    }
    Ok(out)
}

fn meta_failure(e: MetaError) -> Failure {
    match e {
        MetaError::Timeout(n) => Failure::Timeout(format!("timeout after {} steps", n)),
        e => Failure::Internal(format!("{}", e)),
    }
}

fn cmd_simulate(file: &Path, max_steps: usize, emit: Option<&Path>) -> Outcome {
    let p = load(file, false)?;
    let d = elaborate_expr(&p.to_expr()).map_err(|e| Failure::Type(format!("{}: error: {}", file.display(), e)))?;
    let star = simulate_star(&d, max_steps).map_err(meta_failure)?;
    if let Some(path) = emit {
        let mut text = String::new();
        for r in &star.steps {
            writeln!(text, "TGT: {}: {}", r.rule, r.after).unwrap();
            for s in &r.source_steps {
                writeln!(text, "SRC: {}", s).unwrap();
            }
        }
        for s in &star.final_steps {
            writeln!(text, "SRC: {}", s).unwrap();
        }
        write_file(path, &text)?;
    }
    Ok(format!(
        "target steps = {}\nsource steps = {}\nvalue = {}\n",
        star.steps.len(),
        star.trace().len(),
        star.value
    ))
}

fn cmd_fuzz(cfg: FuzzConfig, report: Option<&Path>) -> Outcome {
    let r = fuzz(&cfg);
    let text = r.to_string();
    if let Some(p) = report {
        write_file(p, &text)?;
    }
    if r.failures.is_empty() {
        Ok(text)
    } else {
        print!("{}", text);
        Err(Failure::Internal(format!("{} failures", r.failures.len())))
    }
}

fn dispatch(cli: Cli) -> Outcome {
    let prelude = !cli.no_prelude;
    match cli.command {
        Command::Check { file } => cmd_check(&file, prelude),
        Command::Elab { file, output } => cmd_elab(&file, output.as_deref(), prelude),
        Command::Run { file, max_steps, trace } => cmd_run(&file, max_steps as usize, trace, prelude),
        Command::Subtype { source, target } => cmd_subtype(&source, &target),
        Command::Srcstep { expr, split } => cmd_srcstep(&expr, split),
        Command::Simulate { file, max_steps, emit_trace } => {
            cmd_simulate(&file, max_steps as usize, emit_trace.as_deref())
        }
        Command::Fuzz { sizes, count, seed, max_steps, report } => {
            cmd_fuzz(FuzzConfig { sizes, count, seed, max_steps: max_steps as usize }, report.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // deep terms arise from unrolling fix, so work on a large stack
    let worker = std::thread::Builder::new().stack_size(STACK_SIZE).spawn(move || dispatch(cli));
    let outcome = match worker {
        Ok(h) => h.join().unwrap_or_else(|_| Err(Failure::Internal("internal error".into()))),
        Err(e) => Err(Failure::Internal(format!("cannot start worker: {}", e))),
    };
    match outcome {
        Ok(out) => {
            print!("{}", out);
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Type(m) if m == "NOT A SUBTYPE" => println!("{}", m),
                _ => eprintln!("{}", f.message()),
            }
            ExitCode::from(f.code())
        }
    }
}
