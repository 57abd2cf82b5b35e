//! Command-line front end. [`run`] parses arguments, dispatches and maps
//! outcomes to exit codes: 0 on success with every bound check passing, 1 on
//! a bound or validation failure, 2 on malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use bsll_core::count::{self, CountOptions, CACHE_ENV};
use bsll_core::covering::make_loop_base;
use bsll_core::gog::{GogRecord, GraphOfGroups};
use bsll_core::pc::MatrixA;
use bsll_core::tree::universal_ball;
use bsll_core::{Error, Limits};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bsll",
    version,
    about = "Count overlattices of the loop lattice in the 2p-regular tree"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Largest vertex-group order to build.
    #[arg(long)]
    max_order: Option<usize>,
}

impl Common {
    fn options(&self) -> CountOptions {
        let mut limits = Limits::default();
        if let Some(m) = self.max_order {
            limits.max_order = m;
        }
        CountOptions {
            jobs: self.jobs,
            limits,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate coverings for n = p^k and bracket the number of overlattices.
    Count {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Result cache directory (default: $BSLL_CACHE).
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// List the commutator matrices with their verdicts.
    Matrices {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "faithful_only")]
        consistent_only: bool,
        #[arg(long)]
        faithful_only: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Describe one matrix and its coverings.
    Example {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: usize,
        /// JSON file `{p, k, rows}`.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        u: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the explicit lower-bound family.
    Family {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Print a ball of the universal cover of the loop base.
    Ball {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        radius: usize,
        #[arg(long, value_enum, default_value_t = BallFormat::Tree)]
        format: BallFormat,
        #[arg(long, default_value_t = bsll_core::tree::DEFAULT_MAX_BALL_VERTICES)]
        max_vertices: usize,
    },
    /// Validate a graph of groups and decide faithfulness.
    Faithful {
        #[arg(long)]
        gog: PathBuf,
        #[arg(long, default_value_t = bsll_core::group::DEFAULT_MAX_ORDER)]
        max_order: usize,
    },
    /// Run the built-in invariant suites on small parameters.
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BallFormat {
    Tree,
    Json,
}

/// A finished command: the document to print and the exit code.
struct Outcome {
    document: String,
    out: Option<PathBuf>,
    code: i32,
}

impl Outcome {
    fn json(value: &impl Serialize, ok: bool) -> Result<Self, Error> {
        Ok(Outcome {
            document: serde_json::to_string_pretty(value)? + "\n",
            out: None,
            code: if ok { EXIT_OK } else { EXIT_FAILED },
        })
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotPrime(_)
        | Error::InvalidInput(_)
        | Error::InvalidMatrix(_)
        | Error::InvalidTable(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::CapExceeded { .. } => EXIT_MALFORMED,
        _ => EXIT_FAILED,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn dispatch(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Count {
            p,
            k,
            out,
            cache,
            common,
        } => {
            let cache = cache.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
            let report = count::count_cached(p, k, &common.options(), cache.as_deref())?;
            let mut o = Outcome::json(&report, report.bounds_ok.all)?;
            o.out = out;
            Ok(o)
        }
        Command::Matrices {
            p,
            k,
            consistent_only,
            faithful_only,
            common,
        } => {
            let mut rows = count::summarize_matrices(p, k, &common.options())?;
            if consistent_only {
                rows.retain(|r| r.consistent);
            }
            if faithful_only {
                rows.retain(|r| r.faithful == Some(true));
            }
            Outcome::json(&rows, true)
        }
        Command::Example {
            p,
            k,
            matrix,
            u,
            common,
        } => {
            let a: MatrixA = read_json(&matrix)?;
            if a.p() != p || a.k() != k {
                return Err(Error::InvalidInput(format!(
                    "matrix file has p = {}, k = {}, expected p = {p}, k = {k}",
                    a.p(),
                    a.k()
                )));
            }
            let report = count::describe_example(&a, u, &common.options().limits)?;
            let ok = report.consistent && report.coverings.iter().all(|c| c.violations.is_empty());
            Outcome::json(&report, ok)
        }
        Command::Family { p, k, common } => {
            let report = count::lower_bound_family(p, k, &common.options())?;
            Outcome::json(&report, report.bound_ok)
        }
        Command::Ball {
            p,
            radius,
            format,
            max_vertices,
        } => {
            let base = make_loop_base(p)?.edge_indexed()?;
            let ball = universal_ball(&base, 0, radius, max_vertices)?;
            match format {
                BallFormat::Tree => Ok(Outcome {
                    document: ball.to_text(),
                    out: None,
                    code: EXIT_OK,
                }),
                BallFormat::Json => {
                    #[derive(Serialize)]
                    struct BallDoc<'a> {
                        radius: usize,
                        vertex_count: usize,
                        degree_profile: std::collections::BTreeMap<usize, usize>,
                        vertices: &'a [bsll_core::tree::BallVertex],
                    }
                    Outcome::json(
                        &BallDoc {
                            radius,
                            vertex_count: ball.len(),
                            degree_profile: ball.degree_profile(),
                            vertices: &ball.vertices,
                        },
                        true,
                    )
                }
            }
        }
        Command::Faithful { gog, max_order } => {
            let record: GogRecord = read_json(&gog)?;
            let gog = GraphOfGroups::from_record(record)?;
            #[derive(Serialize)]
            struct FaithfulDoc {
                violations: Vec<bsll_core::gog::GogViolation>,
                faithful: Option<bool>,
                witness: Option<bsll_core::gog::EdgeSubgroupFamily>,
            }
            let violations = gog.validate();
            if !violations.is_empty() {
                return Outcome::json(
                    &FaithfulDoc {
                        violations,
                        faithful: None,
                        witness: None,
                    },
                    false,
                );
            }
            let verdict = gog.is_faithful(max_order)?;
            Outcome::json(
                &FaithfulDoc {
                    violations,
                    faithful: Some(verdict.faithful),
                    witness: verdict.witness,
                },
                true,
            )
        }
        Command::Selftest => {
            let report = count::selftest();
            Outcome::json(&report, report.passed)
        }
    }
}

/// Runs the tool with explicit streams; returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() {
                EXIT_MALFORMED
            } else {
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => {
            let written = match &outcome.out {
                Some(path) => std::fs::write(path, &outcome.document),
                None => stdout.write_all(outcome.document.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILED;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::NotPrime(_) = e {
                let _ = writeln!(
                    stderr,
                    "only prime-power sheet counts n = p^k are supported; pass a prime p"
                );
            }
            exit_code_for(&e)
        }
    }
}

/// Runs the tool on the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
