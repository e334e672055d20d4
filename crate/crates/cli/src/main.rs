//! `hassett`: enumerate strata, compute homology and Euler characteristics,
//! reproduce the heavy/light table and run the invariant suite.

mod output;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hassett_core::complex::{build_chain_complex, SubcomplexFilter};
use hassett_core::enumeration::{enumerate_all, EnumerationOptions};
use hassett_core::formulas::{euler_heavy_light, euler_report, parse_weight_spec, EulerMethod, TopWeightPolicy, WeightSpec};
use hassett_core::homology::betti_numbers;
use hassett_core::Error;

use output::{Format, Rendered};

/// Exit status for invalid input.
const EXIT_VALIDATION: u8 = 2;
/// Exit status when two computations of the same quantity disagree.
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "hassett", version, about = "Tropical moduli spaces of weighted stable curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the isomorphism classes of stable graphs, stratum by stratum.
    Enumerate {
        #[command(flatten)]
        weights: WeightArgs,
        /// Only print the stratum with this many edges.
        #[arg(long)]
        stratum: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Euler characteristic from cell counts, from the closed forms, or both.
    Euler {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Rational Betti numbers of the complex or one of its subcomplexes.
    Homology {
        #[command(flatten)]
        weights: WeightArgs,
        /// all, lw, mlw, q or q0.
        #[arg(long, default_value = "all")]
        filter: SubcomplexFilter,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Heavy/light Euler characteristics for a grid of (g, n, m).
    Table {
        /// Genera to include.
        #[arg(long, value_delimiter = ',', default_values_t = [0u32, 1, 2, 3])]
        genera: Vec<u32>,
        /// Largest number of light points.
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        /// Compare with the embedded reference table; exit 3 on mismatch.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the invariant suite over a matrix of (g, w).
    Verify {
        #[arg(long, default_value_t = 2)]
        max_genus: u32,
        /// Skip spaces whose top cells have more edges than this.
        #[arg(long, default_value_t = 8)]
        max_edges: usize,
        /// Largest number of markings tried per genus.
        #[arg(long, default_value_t = 5)]
        max_markings: usize,
        /// Flip the sign of one boundary entry before checking (harness self-test).
        #[arg(long)]
        inject_sign_flip: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug)]
struct WeightArgs {
    /// Genus.
    #[arg(long)]
    g: u32,
    /// Weight vector, e.g. "1^3,eps^2" or "1,1,1/2,1/3".
    #[arg(long, conflicts_with_all = ["n", "m"])]
    w: Option<String>,
    /// Number of heavy (weight 1) points.
    #[arg(long, requires = "m")]
    n: Option<usize>,
    /// Number of light points.
    #[arg(long, requires = "n")]
    m: Option<usize>,
    /// Read --n/--m as the heavy/light vector (1^n, eps^m); implied by --n/--m.
    #[arg(long)]
    heavy_light: bool,
}

impl WeightArgs {
    fn spec(&self) -> Result<WeightSpec, Error> {
        match (&self.w, self.n, self.m) {
            (Some(w), _, _) => parse_weight_spec(w),
            (None, Some(n), Some(m)) => WeightSpec::heavy_light(n, m),
            _ => Err(Error::Parse { what: "weights".into(), detail: "give --w or --n and --m".into() }),
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Abort once this many cells have been enumerated.
    #[arg(long, env = "HASSETT_BUDGET")]
    budget: Option<usize>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn options(&self) -> EnumerationOptions {
        EnumerationOptions { workers: self.workers, budget: self.budget }
    }

    fn policy(&self) -> TopWeightPolicy {
        let mut policy = TopWeightPolicy { workers: self.workers, ..TopWeightPolicy::default() };
        if self.budget.is_some() {
            policy.delta_budget = self.budget;
        }
        policy
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Direct,
    Formula,
    Both,
}

impl From<MethodArg> for EulerMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => EulerMethod::Direct,
            MethodArg::Formula => EulerMethod::Formula,
            MethodArg::Both => EulerMethod::Both,
        }
    }
}

/// Result of one subcommand: what to print and whether it signals a mismatch.
struct Outcome {
    rendered: Rendered,
    mismatch: Option<String>,
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Enumerate { weights, stratum, run } => {
            let spec = weights.spec()?;
            let strata = enumerate_all(weights.g, &spec.weights, &run.options())?;
            if let Some(k) = stratum {
                if k == 0 || k > strata.max_edges().max(1) {
                    return Err(Error::InvalidStratum { edge_count: k, max: strata.max_edges() });
                }
            }
            Ok(Outcome { rendered: output::enumeration(&spec, &strata, stratum, run.format), mismatch: None })
        }
        Command::Euler { weights, method, run } => {
            let spec = weights.spec()?;
            let report = euler_report(weights.g, &spec, method.into(), &run.options(), &run.policy())?;
            let mismatch = match report.agree {
                Some(false) => Some(format!(
                    "direct {} and formula {} disagree",
                    report.direct.unwrap_or_default(),
                    report.formula.clone().unwrap_or_default()
                )),
                _ => None,
            };
            Ok(Outcome { rendered: output::euler(&report, run.format), mismatch })
        }
        Command::Homology { weights, filter, run } => {
            let spec = weights.spec()?;
            let cc = build_chain_complex(weights.g, &spec.weights, filter, &run.options())?;
            let profile = betti_numbers(&cc);
            Ok(Outcome { rendered: output::homology(&profile, run.format), mismatch: None })
        }
        Command::Table { genera, max_m, check, run } => {
            let mut rows = Vec::new();
            for &g in &genera {
                for n in table_rows(g) {
                    let values = (1..=max_m)
                        .map(|m| match euler_heavy_light(g, n, m) {
                            Ok(v) => Ok(Some(v)),
                            Err(Error::UnstableGenus { .. }) | Err(Error::HeavyLightOutOfRange { .. }) => Ok(None),
                            Err(e) => Err(e),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    rows.push(output::TableRow { genus: g, n, values });
                }
            }
            let mismatches = if check { output::check_table(&rows) } else { Vec::new() };
            let mismatch = (!mismatches.is_empty()).then(|| mismatches.join("; "));
            Ok(Outcome { rendered: output::table(&rows, check.then_some(&mismatches), run.format), mismatch })
        }
        Command::Verify { max_genus, max_edges, max_markings, inject_sign_flip, run } => {
            let config = verify::Config {
                max_genus,
                max_edges,
                max_markings,
                inject_sign_flip,
                seed: run.seed,
                options: run.options(),
                policy: run.policy(),
            };
            let report = verify::run(&config)?;
            let mismatch = report.first_failure().map(|c| format!("g = {}, w = ({}), check {}: {}", c.genus, c.weights, c.check, c.detail));
            Ok(Outcome { rendered: output::verification(&report, run.format), mismatch })
        }
    }
}

/// Heavy counts shown for genus `g`: the four smallest with `n > g`, and
/// `n >= 2` in genus 0.
fn table_rows(g: u32) -> std::ops::RangeInclusive<usize> {
    let first = (g as usize + 1).max(2);
    first..=first + 3
}

fn is_validation(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidWeights(_)
            | Error::UnstableGenus { .. }
            | Error::InvalidGraph(_)
            | Error::InvalidStratum { .. }
            | Error::HeavyLightOutOfRange { .. }
            | Error::ClosedFormOutOfRange { .. }
            | Error::Parse { .. }
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.rendered);
            match outcome.mismatch {
                Some(msg) => {
                    eprintln!("mismatch: {msg}");
                    ExitCode::from(EXIT_MISMATCH)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if is_validation(&e) {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
