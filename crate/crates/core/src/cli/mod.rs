//! Command-line front end.
//!
//! [`run`] does all the work on in-memory text so it can be tested without
//! spawning processes; the binary only parses arguments, reads the input,
//! and forwards the [`Outcome`].
//!
//! Exit codes: `0` success, `1` invalid network or infeasible result, `2`
//! malformed input or usage error, `3` oracle limits exceeded.

mod render;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::heuristic::{greedy_solve, upper_bounds, validate_assignment};
use crate::maxflow::{decompose_cut_paths, max_flow};
use crate::netmodel::{export_dot, parse_network, parse_unchecked, Network, ParseError};
use crate::oracle::{gap_report, optimal_value, OracleError, OracleLimits};
use crate::tableaux::initialize;

pub use render::{parse_structured, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Human,
    Structured,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "mcflow",
    version,
    about = "Multicommodity max flow by colored path selection"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Human, global = true)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct InputArg {
    /// Network file, or `-` for standard input.
    #[arg(default_value = "-")]
    pub input: String,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct LimitArgs {
    /// Maximum number of simple paths enumerated per commodity.
    #[arg(long, default_value_t = 64)]
    pub max_paths: usize,
    /// Maximum number of branch-and-bound nodes.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_candidates: u64,
}

impl From<LimitArgs> for OracleLimits {
    fn from(l: LimitArgs) -> Self {
        OracleLimits {
            max_paths: l.max_paths,
            max_candidates: l.max_candidates,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the network for structural problems.
    Validate(InputArg),
    /// Single-commodity max flow, min cut, and path decomposition.
    Maxflow {
        #[command(flatten)]
        input: InputArg,
        /// 1-based commodity index; all commodities when omitted.
        #[arg(long)]
        commodity: Option<usize>,
    },
    /// Print the colored path tables.
    Tables(InputArg),
    /// Run the greedy selection and report the multicommodity flow.
    Solve(InputArg),
    /// Inclusion–exclusion bound over the per-commodity min cuts.
    Bound(InputArg),
    /// Exact integral optimum by exhaustive search.
    Oracle {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Compare heuristic value, bounds, and the exact optimum.
    Gap {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Graphviz export.
    Export {
        #[command(flatten)]
        input: InputArg,
        /// Label edges with the greedy solution's flow.
        #[arg(long)]
        assignment: bool,
    },
}

impl Command {
    pub fn input_path(&self) -> &str {
        match self {
            Command::Validate(i) | Command::Tables(i) | Command::Solve(i) | Command::Bound(i) => {
                &i.input
            }
            Command::Maxflow { input, .. }
            | Command::Oracle { input, .. }
            | Command::Gap { input, .. }
            | Command::Export { input, .. } => &input.input,
        }
    }
}

/// Exit code plus what goes to standard output and standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

fn parse_error(e: ParseError) -> Outcome {
    let code = if e.kind.is_structural() {
        EXIT_INVALID
    } else {
        EXIT_USAGE
    };
    Outcome::fail(code, e)
}

fn oracle_error(e: OracleError) -> Outcome {
    match e {
        OracleError::TooManyPaths { .. } | OracleError::Truncated { .. } => {
            Outcome::fail(EXIT_TRUNCATED, e)
        }
        other => Outcome::fail(EXIT_INVALID, other),
    }
}

/// Runs one command against the network text `input`.
pub fn run(config: &RunConfig, input: &str) -> Outcome {
    let format = config.format;
    if let Command::Validate(_) = config.command {
        return match parse_unchecked(input) {
            Err(e) => Outcome::fail(EXIT_USAGE, e),
            Ok(net) => {
                let violations = net.validate();
                if violations.is_empty() {
                    Outcome::ok(render::validation(&net, format))
                } else {
                    let mut o =
                        Outcome::fail(EXIT_INVALID, format!("{} violation(s)", violations.len()));
                    for v in &violations {
                        o.stderr.push_str(&format!("  {v}\n"));
                    }
                    o
                }
            }
        };
    }

    let net = match parse_network(input) {
        Ok(net) => net,
        Err(e) => return parse_error(e),
    };
    match &config.command {
        Command::Validate(_) => unreachable!(),
        Command::Maxflow { commodity, .. } => run_maxflow(&net, *commodity, format),
        Command::Tables(_) => match initialize(&net) {
            Ok(bundle) => Outcome::ok(render::tables(&net, &bundle, format)),
            Err(e) => Outcome::fail(EXIT_INVALID, e),
        },
        Command::Solve(_) => run_solve(&net, format),
        Command::Bound(_) => match initialize(&net) {
            Ok(bundle) => Outcome::ok(render::bound(&net, &bundle, format)),
            Err(e) => Outcome::fail(EXIT_INVALID, e),
        },
        Command::Oracle { limits, .. } => match optimal_value(&net, (*limits).into()) {
            Ok(r) => {
                let stdout = render::oracle(&net, &r, format);
                if r.truncated {
                    Outcome {
                        code: EXIT_TRUNCATED,
                        stdout,
                        stderr: format!(
                            "error: search truncated after {} nodes; optimum not proven\n",
                            r.explored
                        ),
                    }
                } else {
                    Outcome::ok(stdout)
                }
            }
            Err(e) => oracle_error(e),
        },
        Command::Gap { limits, .. } => match gap_report(&net, (*limits).into()) {
            Ok(g) => Outcome::ok(render::gap(&g, format)),
            Err(e) => oracle_error(e),
        },
        Command::Export { assignment, .. } => {
            let solved = if *assignment {
                match initialize(&net).map(|mut b| greedy_solve(&mut b)) {
                    Ok(Ok(a)) => Some(a),
                    Ok(Err(e)) => return Outcome::fail(EXIT_INVALID, e),
                    Err(e) => return Outcome::fail(EXIT_INVALID, e),
                }
            } else {
                None
            };
            match export_dot(&net, solved.as_ref()) {
                Ok(dot) => Outcome::ok(dot),
                Err(e) => Outcome::fail(EXIT_INVALID, e),
            }
        }
    }
}

fn run_maxflow(net: &Network, commodity: Option<usize>, format: OutputFormat) -> Outcome {
    let selected: Vec<_> = match commodity {
        Some(i) => match net.commodity(i) {
            Some(c) => vec![c.clone()],
            None => {
                return Outcome::fail(
                    EXIT_USAGE,
                    format!(
                        "commodity {i} does not exist (network has {})",
                        net.commodity_count()
                    ),
                )
            }
        },
        None => net.commodities().to_vec(),
    };
    let mut results = Vec::new();
    for c in selected {
        let mf = match max_flow(net, c.source, c.sink) {
            Ok(mf) => mf,
            Err(e) => return Outcome::fail(EXIT_INVALID, format!("commodity {}: {e}", c.index)),
        };
        let paths = match decompose_cut_paths(net, &mf.flow) {
            Ok(p) => p,
            Err(e) => return Outcome::fail(EXIT_INVALID, format!("commodity {}: {e}", c.index)),
        };
        results.push((c, mf, paths));
    }
    Outcome::ok(render::maxflow(net, &results, format))
}

fn run_solve(net: &Network, format: OutputFormat) -> Outcome {
    let mut bundle = match initialize(net) {
        Ok(b) => b,
        Err(e) => return Outcome::fail(EXIT_INVALID, e),
    };
    let initial = bundle.clone();
    let bounds = upper_bounds(net, &bundle);
    let assignment = match greedy_solve(&mut bundle) {
        Ok(a) => a,
        Err(e) => return Outcome::fail(EXIT_INVALID, e),
    };
    let violations = match validate_assignment(net, &assignment) {
        Ok(v) => v,
        Err(e) => return Outcome::fail(EXIT_INVALID, e),
    };
    let stdout = render::solve(net, &initial, &assignment, &bounds, &violations, format);
    if violations.is_empty() {
        Outcome::ok(stdout)
    } else {
        let mut o = Outcome::fail(EXIT_INVALID, "assignment is infeasible");
        o.stdout = stdout;
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::fixtures::WORKED_TEXT;

    fn config(args: &[&str]) -> RunConfig {
        let mut full = vec!["mcflow"];
        full.extend_from_slice(args);
        RunConfig::try_parse_from(full).unwrap()
    }

    #[test]
    fn solve_structured_on_worked_example() {
        let out = run(&config(&["solve", "--format", "structured"]), WORKED_TEXT);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let report = parse_structured(&out.stdout).unwrap();
        assert_eq!(report.get("total"), Some("25"));
        assert_eq!(report.all("shipment"), vec!["P1.1 5", "P2.1 10", "P2.2 10"]);
        assert_eq!(report.all("discarded"), vec!["P1.2"]);
        assert_eq!(
            report.all("card"),
            vec!["P1.1 1", "P1.2 3", "P2.1 2", "P2.2 2"]
        );
        assert_eq!(report.all("commodity_value"), vec!["1 5", "2 20"]);
    }

    #[test]
    fn maxflow_single_commodity() {
        let out = run(
            &config(&["maxflow", "--commodity", "1", "--format", "structured"]),
            WORKED_TEXT,
        );
        assert_eq!(out.code, 0);
        let report = parse_structured(&out.stdout).unwrap();
        assert_eq!(report.get("value"), Some("15"));
        assert_eq!(report.get("cut_capacity"), Some("15"));
    }

    #[test]
    fn maxflow_unknown_commodity_is_usage_error() {
        let out = run(&config(&["maxflow", "--commodity", "3"]), WORKED_TEXT);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("commodity 3"));
    }

    #[test]
    fn negative_capacity_exits_2_with_line() {
        let out = run(
            &config(&["validate"]),
            "node s\nnode t\nedge s t -1\ncommodity s t\n",
        );
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("line 3"), "{}", out.stderr);
    }

    #[test]
    fn structural_problems_exit_1() {
        let text = "node s\nnode t\nedge s t 1\ncommodity t t\n";
        let out = run(&config(&["validate"]), text);
        assert_eq!(out.code, EXIT_INVALID);
        assert!(out.stderr.contains("source equals sink"));
        let out = run(&config(&["solve"]), text);
        assert_eq!(out.code, EXIT_INVALID);
        assert!(out.stderr.contains("line 4"));
    }

    #[test]
    fn oracle_truncation_exits_3() {
        let out = run(&config(&["oracle", "--max-candidates", "2"]), WORKED_TEXT);
        assert_eq!(out.code, EXIT_TRUNCATED);
        let out = run(&config(&["gap", "--max-paths", "1"]), WORKED_TEXT);
        assert_eq!(out.code, EXIT_TRUNCATED);
    }

    #[test]
    fn human_tables_use_bitableau_layout() {
        let out = run(&config(&["tables"]), WORKED_TEXT);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("| Red Green"), "{}", out.stdout);
        assert!(out.stdout.contains("P1.2"));
    }
}
