//! `gpdkit`: check, build and compare finite groupoid actions described in `.gpd` files.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or the
//! input does not parse, and 2 on a usage error.

mod report;
mod verbs;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpdkit_core::dsl::{self, Document, Model, EXAMPLE_DOCUMENTS};
use serde_json::json;

use report::Report;

#[derive(Parser)]
#[command(name = "gpdkit", version, about = "Finite groupoids, self-similar actions and Fell bundles")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Validate every block of a document.
    Check { file: PathBuf },
    /// Build Zappa-Szép products of every action and Fell action.
    Product {
        file: PathBuf,
        /// Also write the product groupoids as a document.
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
    },
    /// Build orbit groupoids and, for two-sided pairs, the induced actions.
    Quotient { file: PathBuf },
    /// Build and verify the groupoid equivalence of every action or pair.
    Equiv { file: PathBuf },
    /// Verify Fell bundles, Fell actions and the imprimitivity bimodule.
    Fell { file: PathBuf },
    /// Summarize groupoid algebras and compare product against orbit groupoid.
    Algebra { file: PathBuf },
    /// Check star-commuting systems and their periodicity witness.
    Dr {
        file: PathBuf,
        /// Degree bound of the groupoid window; defaults to the order of T.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Check a built-in document, or print it with --emit.
    Example {
        /// One of s4, semidirect, skew, dr-z6, crossed; omit to list them.
        name: Option<String>,
        /// Print the document instead of checking it.
        #[arg(long)]
        emit: bool,
        /// Write the emitted document here instead of stdout.
        #[arg(short, long, value_name = "PATH", requires = "emit")]
        output: Option<PathBuf>,
    },
}

/// Terminates with exit status 2.
struct Usage(String);

fn threads_from_env() -> Result<(), Usage> {
    let Ok(v) = std::env::var("GPDKIT_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Usage(format!("GPDKIT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Usage(format!("cannot size the thread pool: {e}")))
}

fn read(path: &Path) -> Result<String, Usage> {
    let bytes = std::fs::read(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    String::from_utf8(bytes).map_err(|_| Usage(format!("{}: not UTF-8", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Usage> {
    std::fs::write(path, text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

/// Parses and elaborates, or reports the diagnostic as a failed run.
fn load(verb: &'static str, origin: &str, text: &str) -> Result<Model, Box<Report>> {
    let mut r = Report::new(verb, text.as_bytes());
    let diag = match dsl::parse(text) {
        Ok(doc) => match dsl::elaborate(&doc) {
            Ok(m) => return Ok(m),
            Err(d) => d,
        },
        Err(d) => d,
    };
    eprintln!("{origin}:{diag}");
    r.push("input", gpdkit_core::CheckResult::fail(diag.kind.to_string(), 0, gpdkit_core::Witness::new(vec![], diag.to_string())));
    r.insert("diagnostic", serde_json::to_value(&diag).expect("plain data"));
    Err(Box::new(r))
}

fn finish(r: &Report) -> u8 {
    println!("{}", serde_json::to_string_pretty(&r.to_json()).expect("serializable"));
    if r.is_ok() {
        0
    } else {
        1
    }
}

fn run_file(verb: &'static str, path: &Path, f: impl FnOnce(&Model, &mut Report) -> Result<(), Usage>) -> Result<u8, Usage> {
    let text = read(path)?;
    run_text(verb, &path.display().to_string(), &text, f)
}

fn run_text(verb: &'static str, origin: &str, text: &str, f: impl FnOnce(&Model, &mut Report) -> Result<(), Usage>) -> Result<u8, Usage> {
    let m = match load(verb, origin, text) {
        Ok(m) => m,
        Err(r) => return Ok(finish(&r)),
    };
    let mut r = Report::new(verb, text.as_bytes());
    f(&m, &mut r)?;
    Ok(finish(&r))
}

fn example(name: Option<String>, emit: bool, output: Option<PathBuf>) -> Result<u8, Usage> {
    let Some(name) = name else {
        println!("{}", serde_json::to_string_pretty(&json!({ "examples": EXAMPLE_DOCUMENTS })).expect("serializable"));
        return Ok(0);
    };
    let doc: Document = dsl::example_document(&name)
        .ok_or_else(|| Usage(format!("unknown example `{name}`; expected one of {}", EXAMPLE_DOCUMENTS.join(", "))))?;
    let text = dsl::print(&doc);
    if emit {
        match output {
            Some(p) => write(&p, &text)?,
            None => print!("{text}"),
        }
        return Ok(0);
    }
    run_text("example", &name, &text, |m, r| {
        r.insert("example", json!(name));
        verbs::check(m, r);
        Ok(())
    })
}

fn run(cli: Cli) -> Result<u8, Usage> {
    threads_from_env()?;
    match cli.verb {
        Verb::Check { file } => run_file("check", &file, |m, r| {
            verbs::check(m, r);
            verbs::freeness(m, r);
            Ok(())
        }),
        Verb::Product { file, emit } => run_file("product", &file, |m, r| {
            if let Some(doc) = verbs::product(m, r, emit.is_some()) {
                write(emit.as_deref().expect("emit requested"), &dsl::print(&doc))?;
            }
            Ok(())
        }),
        Verb::Quotient { file } => run_file("quotient", &file, |m, r| {
            verbs::quotient(m, r);
            Ok(())
        }),
        Verb::Equiv { file } => run_file("equiv", &file, |m, r| {
            verbs::equiv(m, r);
            Ok(())
        }),
        Verb::Fell { file } => run_file("fell", &file, |m, r| {
            verbs::fell(m, r);
            Ok(())
        }),
        Verb::Algebra { file } => run_file("algebra", &file, |m, r| {
            verbs::algebra(m, r);
            Ok(())
        }),
        Verb::Dr { file, window } => run_file("dr", &file, |m, r| {
            verbs::dr(m, r, window);
            Ok(())
        }),
        Verb::Example { name, emit, output } => example(name, emit, output),
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
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("gpdkit: {msg}");
            ExitCode::from(2)
        }
    }
}
