//! The `crefl` command line.
//!
//! Exit codes: 0 success, 1 ill-typed input, 2 parse or usage error,
//! 3 cycle detected, 4 fuel exhausted, 5 a checked property was violated.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::constructions::{
    build_f, build_g, build_gamma, build_isfalse, build_liar, verify_scr_blocks, NamedConstruction,
    Witness, CYCLE_FUEL, LIAR_FUEL,
};
use crate::lab::report::{render_jsonl, render_text};
use crate::lab::{run_census, EnumConfig, JoinConfig};
use crate::reduction::{normalize, Reach, Verdict};
use crate::syntax::{parse_term, parse_term_spanned, ParseError, SourceSpan};
use crate::typing::{typecheck, Judgment};
use crate::{CrType, System, Term, TypeLang};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ILL_TYPED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CYCLE: i32 = 3;
pub const EXIT_FUEL: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "crefl",
    version,
    about = "Combinatory ReFLect and its stratified variant"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemArg {
    Cr,
    Scr,
}

impl From<SystemArg> for System {
    fn from(s: SystemArg) -> System {
        match s {
            SystemArg::Cr => System::Cr,
            SystemArg::Scr => System::Scr,
        }
    }
}

#[derive(Args, Debug)]
struct Input {
    /// Type system the term is read in.
    #[arg(long, value_enum)]
    system: SystemArg,
    /// The term; read from standard input when absent or `-`.
    term: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a term and print it in canonical form.
    Parse {
        #[command(flatten)]
        input: Input,
        /// Print the syntax tree instead.
        #[arg(long)]
        ast: bool,
    },
    /// Infer the type of a term.
    Typecheck {
        #[command(flatten)]
        input: Input,
    },
    /// Reduce a well-typed term with the leftmost-outermost strategy.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Print every state, not just the last.
        #[arg(long)]
        trace: bool,
        /// With --trace, print at most this many states.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Build and check one of the self-referential constructions.
    Demo {
        #[arg(value_enum)]
        which: DemoArg,
        /// Predicate for `diagonal`, a CR term of type term -> bool.
        #[arg(long)]
        psi: Option<String>,
        /// Fuel for `liar`.
        #[arg(long, default_value_t = LIAR_FUEL)]
        fuel: usize,
        /// Type depth for `scr-blocks`.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Enumerate every well-typed term up to a size and check it.
    Census {
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long, default_value_t = 8)]
        size: usize,
        /// Maximum depth of type subscripts.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Steps allowed on each side of a joinability peak.
        #[arg(long, default_value_t = 8)]
        join_depth: usize,
        /// Largest term checked for joinability.
        #[arg(long, default_value_t = 6)]
        join_size: usize,
        #[arg(long)]
        no_join: bool,
        /// Largest term checked for the print/parse round trip; 0 skips it.
        #[arg(long, default_value_t = 6)]
        roundtrip_size: usize,
        /// Leave `true`, `false` and `not` out of the enumeration.
        #[arg(long)]
        no_plumbing: bool,
        /// Skip the seeded diagonal terms.
        #[arg(long)]
        no_seeds: bool,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Omit timings, making the output reproducible.
        #[arg(long)]
        no_timings: bool,
        /// Also write census.txt and census.jsonl into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reprint terms in canonical form, one per line; blank lines and
    /// lines starting with `#` pass through.
    Fmt {
        #[arg(long, value_enum)]
        system: SystemArg,
        /// File to format; standard input when absent or `-`.
        file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DemoArg {
    /// f, g and the cycle of g <<g>>.
    Nonterm,
    /// The diagonal Γ for a predicate Ψ, with Γ ⇒* Ψ <<Γ>>.
    Diagonal,
    /// Γ for Ψ = isfalse, which has no boolean value.
    Liar,
    /// Exhaustive SCR annotation search over the diagonal skeletons.
    ScrBlocks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Jsonl,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Run the command line `args` (program name first) and return the exit
/// code.
pub fn run(
    args: impl IntoIterator<Item = String>,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        out: stdout,
        err: stderr,
    };
    let result = match cli.command {
        Command::Parse { input, ast } => {
            with_system(&input, &mut io, |src, io| cmd_parse(src, ast, io))
        }
        Command::Typecheck { input } => with_system(&input, &mut io, cmd_typecheck),
        Command::Reduce {
            input,
            fuel,
            trace,
            limit,
        } => with_system(&input, &mut io, |src, io| {
            cmd_reduce(src, fuel, trace, limit, io)
        }),
        Command::Demo {
            which,
            psi,
            fuel,
            depth,
        } => cmd_demo(which, psi.as_deref(), fuel, depth, &mut io),
        Command::Census {
            system,
            size,
            depth,
            fuel,
            join_depth,
            join_size,
            no_join,
            roundtrip_size,
            no_plumbing,
            no_seeds,
            format,
            no_timings,
            out,
        } => {
            if size == 0 {
                let _ = writeln!(io.err, "error: --size must be at least 1");
                return EXIT_USAGE;
            }
            let config = EnumConfig {
                system: system.into(),
                max_term_size: size,
                max_type_depth: depth,
                fuel,
                include_plumbing_constants: !no_plumbing,
                seed_pathological: !no_seeds,
                joinability: (!no_join).then_some(JoinConfig {
                    max_size: join_size,
                    depth: join_depth,
                }),
                roundtrip_max_size: roundtrip_size,
            };
            cmd_census(&config, format, !no_timings, out, &mut io)
        }
        Command::Fmt { system, file } => cmd_fmt(system.into(), file, &mut io),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(io.err, "error: {e}");
        EXIT_USAGE
    })
}

fn read_input(term: &Option<String>, io: &mut Io<'_>) -> std::io::Result<String> {
    match term.as_deref() {
        Some(src) if src != "-" => Ok(src.to_string()),
        _ => {
            let mut buf = String::new();
            io.stdin.read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

/// Dispatch on the system, handing the command the raw source.
fn with_system(
    input: &Input,
    io: &mut Io<'_>,
    cmd: impl FnOnce(Source<'_>, &mut Io<'_>) -> std::io::Result<i32>,
) -> std::io::Result<i32> {
    let text = read_input(&input.term, io)?;
    let source = Source {
        text: &text,
        system: input.system.into(),
    };
    cmd(source, io)
}

struct Source<'a> {
    text: &'a str,
    system: System,
}

/// The source line holding `span`, with carets under it.
fn underline(src: &str, span: SourceSpan) -> String {
    let chars: Vec<char> = src.chars().collect();
    let start = span.start.min(chars.len());
    let line_start = chars[..start]
        .iter()
        .rposition(|&c| c == '\n')
        .map_or(0, |i| i + 1);
    let line_end = chars[start..]
        .iter()
        .position(|&c| c == '\n')
        .map_or(chars.len(), |i| start + i);
    let line: String = chars[line_start..line_end].iter().collect();
    let width = span
        .end
        .saturating_sub(span.start)
        .max(1)
        .min(line_end.max(start + 1) - start);
    format!(
        "  {line}\n  {}{}",
        " ".repeat(start - line_start),
        "^".repeat(width)
    )
}

fn report_parse_error(src: &str, e: &ParseError, io: &mut Io<'_>) -> std::io::Result<i32> {
    writeln!(io.err, "{e}")?;
    writeln!(io.err, "{}", underline(src, e.span))?;
    Ok(EXIT_USAGE)
}

fn cmd_parse(src: Source<'_>, ast: bool, io: &mut Io<'_>) -> std::io::Result<i32> {
    fn go<T: TypeLang>(text: &str, ast: bool, io: &mut Io<'_>) -> std::io::Result<i32> {
        match parse_term::<T>(text) {
            Ok(t) if ast => writeln!(io.out, "{t:?}").map(|_| EXIT_OK),
            Ok(t) => writeln!(io.out, "{t}").map(|_| EXIT_OK),
            Err(e) => report_parse_error(text, &e, io),
        }
    }
    match src.system {
        System::Cr => go::<CrType>(src.text, ast, io),
        System::Scr => go::<crate::ScrType>(src.text, ast, io),
    }
}

/// Parse and type check, reporting failures. `Ok(Err(code))` means the
/// command should stop with `code`.
fn checked<T: TypeLang>(text: &str, io: &mut Io<'_>) -> std::io::Result<Result<(Term<T>, T), i32>> {
    let parsed = match parse_term_spanned::<T>(text) {
        Ok(p) => p,
        Err(e) => return report_parse_error(text, &e, io).map(Err),
    };
    match typecheck(&parsed.term) {
        Judgment::WellTyped(ty) => Ok(Ok((parsed.term, ty))),
        Judgment::IllTyped(e) => {
            writeln!(io.err, "ill-typed: {}", e.render_with_spans(&parsed.spans))?;
            writeln!(io.err, "{}", underline(text, parsed.spans.lookup(&e.path)))?;
            Ok(Err(EXIT_ILL_TYPED))
        }
    }
}

fn cmd_typecheck(src: Source<'_>, io: &mut Io<'_>) -> std::io::Result<i32> {
    fn go<T: TypeLang>(text: &str, io: &mut Io<'_>) -> std::io::Result<i32> {
        match checked::<T>(text, io)? {
            Ok((t, ty)) => writeln!(io.out, "{t} : {ty}").map(|_| EXIT_OK),
            Err(code) => Ok(code),
        }
    }
    match src.system {
        System::Cr => go::<CrType>(src.text, io),
        System::Scr => go::<crate::ScrType>(src.text, io),
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Normalized => EXIT_OK,
        Verdict::CycleDetected { .. } => EXIT_CYCLE,
        Verdict::FuelExhausted => EXIT_FUEL,
    }
}

fn cmd_reduce(
    src: Source<'_>,
    fuel: usize,
    trace: bool,
    limit: Option<usize>,
    io: &mut Io<'_>,
) -> std::io::Result<i32> {
    fn go<T: TypeLang>(
        text: &str,
        fuel: usize,
        show_trace: bool,
        limit: Option<usize>,
        io: &mut Io<'_>,
    ) -> std::io::Result<i32> {
        let (t, _) = match checked::<T>(text, io)? {
            Ok(ok) => ok,
            Err(code) => return Ok(code),
        };
        let trace = normalize(&t, fuel);
        if show_trace {
            writeln!(io.out, "{}", trace.render(limit))?;
        } else {
            writeln!(io.out, "{}", trace.last())?;
            if let Some(reason) = trace.stuck() {
                writeln!(io.out, "stuck: {reason}")?;
            }
            writeln!(
                io.out,
                "verdict: {} after {} steps",
                trace.verdict(),
                trace.steps_used()
            )?;
        }
        Ok(verdict_code(trace.verdict()))
    }
    match src.system {
        System::Cr => go::<CrType>(src.text, fuel, trace, limit, io),
        System::Scr => go::<crate::ScrType>(src.text, fuel, trace, limit, io),
    }
}

fn print_construction(c: &NamedConstruction, io: &mut Io<'_>) -> std::io::Result<()> {
    writeln!(io.out, "{} = {}", c.name, c.term)?;
    writeln!(io.out, "  {} : {}", c.name, c.claimed_type)?;
    for e in &c.evidence {
        let mark = if e.verified { "ok  " } else { "FAIL" };
        let detail = match &e.witness {
            Witness::Judgment(_) => String::new(),
            Witness::Trace(t) => format!("   [{} after {} steps]", t.verdict(), t.steps_used()),
            Witness::Reach(Reach::Reached(path)) => format!("   [{} steps]", path.len() - 1),
            Witness::Reach(Reach::NotReached { visited, .. }) => {
                format!("   [not found among {visited} states]")
            }
        };
        writeln!(io.out, "  {mark} {}{detail}", e.claim)?;
    }
    Ok(())
}

fn construction_result(
    built: Result<NamedConstruction, crate::constructions::ConstructionError>,
    io: &mut Io<'_>,
) -> std::io::Result<bool> {
    match built {
        Ok(c) => print_construction(&c, io).map(|_| true),
        Err(crate::constructions::ConstructionError::Unverified(c)) => {
            print_construction(&c, io)?;
            Ok(false)
        }
        Err(e) => writeln!(io.err, "error: {e}").map(|_| false),
    }
}

fn cmd_demo(
    which: DemoArg,
    psi: Option<&str>,
    fuel: usize,
    depth: usize,
    io: &mut Io<'_>,
) -> std::io::Result<i32> {
    let ok = match which {
        DemoArg::Nonterm => {
            let f = construction_result(build_f(), io)?;
            let g = construction_result(build_g(), io)?;
            if let Ok(c) = build_g() {
                let gg = c.term.to(c.term.quoted());
                writeln!(io.out, "{}", normalize(&gg, CYCLE_FUEL).render(None))?;
            }
            f && g
        }
        DemoArg::Diagonal => {
            let psi = match psi {
                None => crate::constructions::isfalse_term(),
                Some(src) => match parse_term::<CrType>(src) {
                    Ok(t) => t,
                    Err(e) => return report_parse_error(src, &e, io),
                },
            };
            match build_gamma(&psi) {
                Err(e @ crate::constructions::ConstructionError::NotAPredicate { .. }) => {
                    writeln!(io.err, "error: {e}")?;
                    return Ok(EXIT_ILL_TYPED);
                }
                built => construction_result(built, io)?,
            }
        }
        DemoArg::Liar => {
            let isfalse = construction_result(build_isfalse(), io)?;
            let liar = construction_result(crate::with_deep_stack(|| build_liar(fuel)), io)?;
            isfalse && liar
        }
        DemoArg::ScrBlocks => {
            let report = verify_scr_blocks(depth);
            write!(io.out, "{report}")?;
            report.banned_accepted() == 0
        }
    };
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_census(
    config: &EnumConfig,
    format: FormatArg,
    timings: bool,
    out: Option<PathBuf>,
    io: &mut Io<'_>,
) -> std::io::Result<i32> {
    let report = crate::with_deep_stack(|| run_census(config));
    let text = render_text(&report, timings);
    let jsonl = render_jsonl(&report, timings);
    match format {
        FormatArg::Text => write!(io.out, "{text}")?,
        FormatArg::Jsonl => write!(io.out, "{jsonl}")?,
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("census.txt"), &text)?;
        std::fs::write(dir.join("census.jsonl"), &jsonl)?;
    }
    let scr_property = config.system == System::Cr || report.all_normalized();
    Ok(if report.is_clean() && scr_property {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_fmt(system: System, file: Option<PathBuf>, io: &mut Io<'_>) -> std::io::Result<i32> {
    let text = match file {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)?,
        _ => {
            let mut buf = String::new();
            io.stdin.read_to_string(&mut buf)?;
            buf
        }
    };
    let mut formatted = String::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            formatted.push_str(line);
        } else {
            let printed = match system {
                System::Cr => parse_term::<CrType>(trimmed).map(|t| t.to_string()),
                System::Scr => parse_term::<crate::ScrType>(trimmed).map(|t| t.to_string()),
            };
            match printed {
                Ok(p) => formatted.push_str(&p),
                Err(e) => {
                    write!(io.err, "line {}: ", i + 1)?;
                    return report_parse_error(trimmed, &e, io);
                }
            }
        }
        formatted.push('\n');
    }
    write!(io.out, "{formatted}")?;
    Ok(EXIT_OK)
}
