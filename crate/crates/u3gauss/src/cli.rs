//! Command-line front end. Every subcommand is a thin wrapper over the
//! library; with identical flags the output is byte-identical across runs.
//!
//! Exit codes: 0 on success, 1 on a domain failure (non-convergence, failed
//! verification, missing rule), 2 on usage errors. Diagnostics go to stderr;
//! stdout carries only data.

use crate::moments::{coefficient_strings, display_value, moment_table};
use crate::product::u3_product_rule;
use crate::rule::{
    builtin, load, rule_name, save, verify_with_tol, CubatureRule, PointRule, Provenance,
    RuleError, RuleFile, VerificationReport, BUILTIN_ALIASES, VERIFY_TOL,
};
use crate::search::{
    enumerate_structures, enumerate_structures_general3d, first_minima, first_minima_general3d,
    lp_lower_bound, minima_indices, RuleStructure, StructureSolution,
};
use crate::star::{
    assemble, classify, render_star, render_star_latex, rule_from_solution, solve, solve_collect,
    SolveConfig, SolveOutcome,
};
use crate::symmetry::count_class_types;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::f64::consts::PI;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(
    name = "u3gauss",
    version,
    about = "Gauss cubature rules on the unit sphere",
    max_term_width = 100
)]
struct Cli {
    /// Seed for the solver's random restarts.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Tolerance override (verification error bound, solver residual).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Suppress informational notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Output style; `machine` guarantees the documented column layouts.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count the class types of fully symmetric point sets in dimension n.
    Classes {
        #[arg(long)]
        n: u32,
        /// Print one line per dimension 1..=n.
        #[arg(long)]
        upto: bool,
    },
    /// Enumerate feasible rule structures for degree 2m+1.
    Search {
        #[arg(long)]
        m: u32,
        /// Bound on K3, K5 and K6 during the exhaustive search.
        #[arg(long, default_value_t = 20)]
        kbound: u32,
        /// Report every solution with N up to this bound
        /// (default: the first five consecutive minima).
        #[arg(long)]
        nmax: Option<u64>,
        /// Use the thirteen general 3D consistency conditions instead of the
        /// four surface conditions.
        #[arg(long)]
        general3d: bool,
    },
    /// The LP relaxation lower bound on the point count.
    Lowerbound {
        #[arg(long)]
        m: u32,
    },
    /// Exact monomial moments over the sphere, up to total half-degree m.
    Moments {
        #[arg(long)]
        m: u32,
    },
    /// Print the moment system for a structure.
    Star {
        #[arg(long)]
        m: u32,
        #[arg(long, value_parser = parse_structure)]
        structure: Structure6,
        /// Emit LaTeX instead of plain text.
        #[arg(long)]
        latex: bool,
    },
    /// Solve the moment system for a structure by multi-start damped least
    /// squares.
    Solve {
        #[arg(long)]
        m: u32,
        #[arg(long, value_parser = parse_structure)]
        structure: Structure6,
        #[arg(long, default_value_t = 100)]
        restarts: u32,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: u32,
        /// Keep up to this many distinct converged solutions.
        #[arg(long)]
        collect: Option<usize>,
        /// Write the (best) solved rule to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a rule's exactness against the moments.
    Verify {
        /// Rule file path, or bundled:KEY (e.g. bundled:m5).
        #[arg(long)]
        rule: String,
        /// Degree to test at (default: the degree stored with the rule).
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Construct the 2m²-point product rule of degree 2m-1.
    Product {
        #[arg(long)]
        m: usize,
        /// Write the points to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a rule to a built-in integrand.
    Integrate {
        /// Rule file path, or bundled:KEY.
        #[arg(long)]
        rule: String,
        /// One of: constant, exp, monomial.
        #[arg(long)]
        function: String,
        /// Exponents a,b,c for the monomial integrand.
        #[arg(long, value_parser = parse_exponents)]
        exponents: Option<Exponents>,
    },
    /// Work with the bundled reference rules.
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
}

#[derive(Debug, Subcommand)]
enum RulesAction {
    /// One line per bundled rule: alias, name, points, degree, good.
    List,
    /// Write every bundled rule as a rule file.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Target directory (created if missing).
    #[arg(long)]
    dir: PathBuf,
}

type Structure6 = [u32; 6];
type Exponents = [u32; 3];

fn parse_structure(text: &str) -> Result<Structure6, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 6 {
        return Err(format!(
            "expected six comma-separated counts K1,K2,K3,K4,K5,K6, got {}",
            parts.len()
        ));
    }
    let mut counts = [0u32; 6];
    for (slot, part) in counts.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("invalid count {part:?}"))?;
    }
    Ok(counts)
}

fn parse_exponents(text: &str) -> Result<Exponents, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three exponents a,b,c, got {}", parts.len()));
    }
    let mut exponents = [0u32; 3];
    for (slot, part) in exponents.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("invalid exponent {part:?}"))?;
    }
    Ok(exponents)
}

/// A subcommand failure that maps to exit code 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Run the command line. Returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Classes { n, upto } => {
            let start = if *upto { 1 } else { *n };
            for dimension in start..=*n {
                println!("{dimension} {}", count_class_types(dimension));
            }
            Ok(())
        }

        Command::Search {
            m,
            kbound,
            nmax,
            general3d,
        } => {
            let solutions = match (nmax, general3d) {
                (Some(n_max), false) => enumerate_structures(*m, *kbound, *n_max),
                (Some(n_max), true) => enumerate_structures_general3d(*m, *kbound, *n_max),
                (None, false) => first_minima(*m, *kbound, 5),
                (None, true) => first_minima_general3d(*m, *kbound, 5),
            };
            for s in &solutions {
                print_structure_line(*m, s);
            }
            Ok(())
        }

        Command::Lowerbound { m } => {
            let lp = lp_lower_bound(*m)?;
            let k = &lp.fractional_k[1..];
            println!(
                "{m} {} {} {} {} {} {} {}",
                trim_float(lp.n_lb),
                trim_float(k[0]),
                trim_float(k[1]),
                trim_float(k[2]),
                trim_float(k[3]),
                trim_float(k[4]),
                trim_float(k[5]),
            );
            Ok(())
        }

        Command::Moments { m } => {
            let table = moment_table(*m);
            for (triple, moment) in table.iter() {
                match cli.format {
                    Format::Machine => {
                        let (num, den) = coefficient_strings(moment);
                        println!("{} {} {} {num} {den}", triple[0], triple[1], triple[2]);
                    }
                    Format::Text => {
                        println!(
                            "{} {} {}  {}",
                            triple[0],
                            triple[1],
                            triple[2],
                            display_value(moment)
                        );
                    }
                }
            }
            Ok(())
        }

        Command::Star {
            m,
            structure,
            latex,
        } => {
            let system = assemble(*m, RuleStructure::u3(*structure))?;
            if *latex {
                print!("{}", render_star_latex(&system));
            } else {
                println!("{}", render_star(&system));
            }
            Ok(())
        }

        Command::Solve {
            m,
            structure,
            restarts,
            max_iterations,
            collect,
            out,
        } => {
            let structure = RuleStructure::u3(*structure);
            let system = assemble(*m, structure)?;
            let config = SolveConfig {
                seed: cli.seed,
                restarts: *restarts,
                max_iterations: *max_iterations,
                residual_tol: cli.tol.unwrap_or(1e-12),
                ..SolveConfig::default()
            };
            let name = solved_rule_name(*m, &structure);

            let outcomes = match collect {
                Some(k) => solve_collect(&system, &config, *k),
                None => vec![solve(&system, &config)],
            };
            if outcomes.is_empty() {
                return Err(Failure(format!(
                    "no converged solution within {} restarts",
                    config.restarts
                )));
            }

            let mut best_converged = false;
            for (index, outcome) in outcomes.iter().enumerate() {
                if index > 0 {
                    println!();
                }
                print_solution(&system, outcome, &name);
                best_converged |= outcome.converged;
            }

            if let Some(path) = out {
                let best = &outcomes[0];
                let mut rule = rule_from_solution(&system, &best.best_x, Provenance::Solved)?;
                rule.set_name(name.clone());
                save(&RuleFile::Generator(rule), path)?;
                if !cli.quiet {
                    eprintln!("wrote {}", path.display());
                }
            }

            if best_converged {
                Ok(())
            } else {
                Err(Failure(format!(
                    "solver did not reach the residual tolerance within {} restarts (best {:.3e})",
                    config.restarts, outcomes[0].best_residual_norm
                )))
            }
        }

        Command::Verify { rule, degree } => {
            let (label, file) = load_rule_spec(rule)?;
            let tolerance = cli.tol.unwrap_or(VERIFY_TOL);
            let (points, default_degree) = match &file {
                RuleFile::Generator(r) => (r.expand(), Some(r.degree())),
                RuleFile::Points { rule, degree, .. } => (rule.clone(), *degree),
            };
            let degree = degree.or(default_degree).ok_or(Failure(
                "this point rule carries no degree; pass --degree".into(),
            ))?;
            let report = verify_with_tol(&points, degree, tolerance);
            print_report(&label, &report);
            if report.passes {
                Ok(())
            } else {
                Err(Failure(format!("verification failed for {label}")))
            }
        }

        Command::Product { m, out } => {
            if *m == 0 {
                return Err(Failure("m must be at least 1".into()));
            }
            let rule = u3_product_rule(*m);
            let degree = (2 * m - 1) as u32;
            println!(
                "{m} {} {} {}",
                rule.len(),
                degree,
                number(rule.weight_sum())
            );
            match out {
                Some(path) => {
                    save(
                        &RuleFile::Points {
                            rule,
                            name: Some(format!("U3:product-{degree}-{m}")),
                            degree: Some(degree),
                        },
                        path,
                    )?;
                    if !cli.quiet {
                        eprintln!("wrote {}", path.display());
                    }
                }
                None => {
                    for (p, w) in rule.points().iter().zip(rule.weights()) {
                        println!("{} {} {} {}", number(p[0]), number(p[1]), number(p[2]), number(*w));
                    }
                }
            }
            Ok(())
        }

        Command::Integrate {
            rule,
            function,
            exponents,
        } => {
            let (_, file) = load_rule_spec(rule)?;
            let points = match &file {
                RuleFile::Generator(r) => r.expand(),
                RuleFile::Points { rule, .. } => rule.clone(),
            };
            let (value, exact) = integrate_builtin(&points, function, exponents)?;
            println!("integral {}", number(value));
            if let Some(exact) = exact {
                println!("exact {}", number(exact));
                println!("error {}", number((value - exact).abs()));
            }
            Ok(())
        }

        Command::Rules { action } => match action {
            RulesAction::List => {
                for alias in BUILTIN_ALIASES {
                    let rule = builtin(alias).expect("alias table is complete");
                    let good = classify(&rule, cli.tol.unwrap_or(1e-10)).good();
                    println!(
                        "{alias} {} {} {} {good}",
                        rule.name(),
                        rule.structure().cost(),
                        rule.degree()
                    );
                }
                Ok(())
            }
            RulesAction::Export(args) => {
                std::fs::create_dir_all(&args.dir).map_err(RuleError::Io)?;
                for alias in BUILTIN_ALIASES {
                    let rule = builtin(alias).expect("alias table is complete");
                    let path = args.dir.join(format!("{alias}.json"));
                    save(&RuleFile::Generator(rule), &path)?;
                    println!("{alias} {}", path.display());
                }
                Ok(())
            }
        },
    }
}

fn print_structure_line(m: u32, s: &StructureSolution) {
    let k = s.structure.u3_counts();
    println!(
        "{m} {} {} {} {} {} {} {} {} {} {}",
        s.minimum_index, s.lexical_index, s.n, k[0], k[1], k[2], k[3], k[4], k[5], s.v
    );
}

/// Shortest losslessly-parsed decimal for small LP values (they are exact
/// multiples of 1/6 here, so Display round-trips).
fn trim_float(x: f64) -> String {
    format!("{x}")
}

fn solved_rule_name(m: u32, structure: &RuleStructure) -> String {
    match minima_indices(m, structure) {
        Some((i, j)) => rule_name(m, structure, i, j),
        None => format!("U3:{}-0.0({})-{}", 2 * m + 1, structure, structure.cost()),
    }
}

fn print_solution(system: &crate::star::StarSystem, outcome: &SolveOutcome, name: &str) {
    println!("rule {name}");
    println!(
        "converged {} residual {} restart {}",
        outcome.converged,
        number(outcome.best_residual_norm),
        outcome.restart_index
    );
    for (variable, value) in system.variable_names().iter().zip(&outcome.best_x) {
        println!("{variable} {}", number(*value));
    }
    match rule_from_solution(system, &outcome.best_x, Provenance::Solved) {
        Ok(rule) => {
            let report = classify(&rule, 1e-10);
            print!(
                "good {} min_weight {} max_norm_deviation {}",
                report.good(),
                number(report.min_weight),
                number(report.max_norm_deviation)
            );
            match &report.offending_weight {
                Some((name, value)) => println!(" offending {name}={}", number(*value)),
                None => println!(),
            }
        }
        Err(e) => println!("good false degenerate {e}"),
    }
}

fn print_report(label: &str, report: &VerificationReport) {
    println!("rule {label}");
    println!("degree {}", report.claimed_degree);
    println!("max_even_error {}", number(report.max_even_error));
    println!("max_odd_error {}", number(report.max_odd_error));
    println!("min_weight {}", number(report.weight_min));
    println!("max_norm_deviation {}", number(report.max_norm_deviation));
    println!("tolerance {}", number(report.tolerance));
    println!("result {}", if report.passes { "PASS" } else { "FAIL" });
}

fn load_rule_spec(spec: &str) -> Result<(String, RuleFile), Failure> {
    if let Some(key) = spec.strip_prefix("bundled:") {
        let rule: CubatureRule = builtin(key)
            .ok_or_else(|| Failure(format!("no bundled rule named {key:?}")))?;
        let label = rule.name().to_string();
        return Ok((label, RuleFile::Generator(rule)));
    }
    let path = std::path::Path::new(spec);
    let file = load(path)?;
    let label = file.name().unwrap_or(spec).to_string();
    Ok((label, file))
}

fn integrate_builtin(
    points: &PointRule,
    function: &str,
    exponents: &Option<Exponents>,
) -> Result<(f64, Option<f64>), Failure> {
    match function {
        "constant" => {
            let value = points.integrate(|_| 1.0)?;
            Ok((value, Some(4.0 * PI)))
        }
        "exp" => {
            let value = points.integrate(|p| (p[0] + p[1] + p[2]).exp())?;
            Ok((value, None))
        }
        "monomial" => {
            let [a, b, c] =
                exponents.ok_or(Failure("monomial requires --exponents a,b,c".into()))?;
            let value = points.integrate(|p| {
                p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
            })?;
            Ok((
                value,
                Some(crate::moments::monomial_integral_f64(a, b, c)),
            ))
        }
        other => Err(Failure(format!(
            "unknown function {other:?}; available: constant, exp, monomial"
        ))),
    }
}
