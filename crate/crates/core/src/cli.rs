//! Command-line front end. `pqm` forwards its arguments to [`run`].
//!
//! Exit codes: 0 when every check in the report passes, 1 when a check
//! fails (the report is still written), 2 for usage or input errors.
//! Reports go to the output stream, diagnostics to the error stream.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::axioms::{check_axioms, check_derived_lemma, classify_structure, CheckStrategy};
use crate::completeness::{
    audit_counterexample, build_counterexample_map, builtin_completeness, classify_sequence, default_candidates,
    default_family, parse_sequence, probe_completeness, Notion, SequenceSpec,
};
use crate::error::Error;
use crate::kannan::{check_kannan, estimate_lambda, load_mapping, named_mapping, KannanConstant, Mapping};
use crate::oracle::{exhaustive_kannan_audit, random_valid_space, DEFAULT_ENUMERATION_CAP};
use crate::solver::{iterate, DEFAULT_MAX_ITER};
use crate::spaces::{builtin_space, load_finite_space, Point, Space, BUILTIN_SPACES, PAPER_EXAMPLE_PUNCTURED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Structured,
    Delimited,
}

#[derive(Debug, Parser)]
#[command(name = "pqm", version, about = "Partial quasi-metric spaces and Kannan fixed points")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub slack: f64,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 256)]
    pub horizon: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the partial quasi-metric axioms and classify the space.
    Axioms { space: String },
    /// Check that the conjugate and the symmetrization have the expected structure.
    Derived { space: String },
    /// Check the Kannan condition for a constant, or estimate the smallest constant.
    Kannan {
        space: String,
        map: String,
        #[arg(long, conflicts_with = "estimate")]
        lambda: Option<f64>,
        #[arg(long)]
        estimate: bool,
    },
    /// Run Picard iteration to a fixed point.
    Solve {
        space: String,
        map: String,
        #[arg(long)]
        start: String,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Classify a sequence against the Cauchy and convergence notions.
    ClassifySeq {
        space: String,
        #[arg(long)]
        seq: String,
        /// Comma-separated candidate limits.
        #[arg(long, default_value = "")]
        candidates: String,
    },
    /// Look for sequences refuting each completeness notion.
    Probe { space: String },
    /// Build and audit the fixed-point-free Kannan map on the punctured space.
    ConverseDemo,
    /// Enumerate every self-map of a small finite space and audit the Kannan ones.
    Oracle {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        space: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Precondition(_) | Error::Dependency { .. } | Error::NonConvergence { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// A finished command: the report document, its human rendering, and whether every check passed.
struct Outcome {
    document: serde_json::Value,
    human: String,
    passed: bool,
    delimited: Option<String>,
}

impl Outcome {
    fn new(document: impl Serialize, human: String, passed: bool) -> Result<Self, Failure> {
        Ok(Outcome {
            document: serde_json::to_value(document).map_err(|e| usage(e.to_string()))?,
            human,
            passed,
            delimited: None,
        })
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let written = match cli.format {
                OutputFormat::Human => write!(out, "{}", outcome.human),
                OutputFormat::Structured => {
                    let doc = serde_json::json!({
                        "command": command_name(&cli.command),
                        "passed": outcome.passed,
                        "result": outcome.document,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json values serialize"))
                }
                OutputFormat::Delimited => match &outcome.delimited {
                    Some(text) => write!(out, "{text}"),
                    None => {
                        let _ = writeln!(err, "error: delimited output is only available for `solve`");
                        return 2;
                    }
                },
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            if outcome.passed {
                0
            } else {
                let _ = writeln!(err, "check failed");
                1
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Axioms { .. } => "axioms",
        Command::Derived { .. } => "derived",
        Command::Kannan { .. } => "kannan",
        Command::Solve { .. } => "solve",
        Command::ClassifySeq { .. } => "classify-seq",
        Command::Probe { .. } => "probe",
        Command::ConverseDemo => "converse-demo",
        Command::Oracle { .. } => "oracle",
    }
}

/// A built-in name, or a path to a finite-space document.
pub fn resolve_space(arg: &str) -> Result<Space, Error> {
    if BUILTIN_SPACES.contains(&arg) {
        return builtin_space(arg);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return builtin_space(arg);
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{arg}: {e}")))?;
    Ok(load_finite_space(&text)?.with_label(arg))
}

/// A named map, or a path to a mapping document.
pub fn resolve_map(arg: &str, space: &Space) -> Result<Mapping, Error> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{arg}: {e}")))?;
        let map = load_mapping(&text)?;
        map.validate_for(space)?;
        return Ok(map);
    }
    named_mapping(arg, space)
}

/// An index or label for finite spaces, a coordinate for analytic ones.
pub fn parse_point(text: &str, space: &Space) -> Result<Point, Error> {
    let text = text.trim();
    let point = match space.universe() {
        crate::spaces::Universe::Finite { labels } => match text.parse::<usize>() {
            Ok(i) => Point::Index(i),
            Err(_) => Point::Index(
                labels
                    .iter()
                    .position(|l| l == text)
                    .ok_or_else(|| Error::Parse(format!("unknown point `{text}`")))?,
            ),
        },
        crate::spaces::Universe::Analytic { .. } => Point::Coord(
            text.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad coordinate `{text}`")))?,
        ),
    };
    space.check_point(point)
}

fn strategy_for(cli: &Cli, space: &Space) -> CheckStrategy {
    let base = if space.is_finite() {
        CheckStrategy::exhaustive()
    } else {
        CheckStrategy::sampled(cli.samples, cli.seed)
    };
    CheckStrategy { seed: cli.seed, ..base }.with_slack(cli.slack)
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    positive("tolerance", cli.tolerance)?;
    if !(cli.slack >= 0.0 && cli.slack.is_finite()) {
        return Err(usage(format!("--slack must be non-negative, got {}", cli.slack)));
    }
    if cli.samples == 0 || cli.horizon == 0 {
        return Err(usage("--samples and --horizon must be positive"));
    }

    match &cli.command {
        Command::Axioms { space } => {
            let space = resolve_space(space)?;
            let class = classify_structure(&space, &strategy_for(cli, &space))?;
            let axioms_passed = ["1a", "1b", "2", "3"]
                .iter()
                .all(|id| class.report.entry(id).is_some_and(|e| e.pass));
            let human = format!("{}structure: {}\n", class.report, class.structure);
            Outcome::new(&class, human, axioms_passed)
        }
        Command::Derived { space } => {
            let space = resolve_space(space)?;
            let strategy = strategy_for(cli, &space);
            match check_derived_lemma(&space, &strategy) {
                Ok(report) => Outcome::new(&report, report.to_string(), report.passed()),
                Err(Error::Precondition(message)) => {
                    let base = check_axioms(&space, &strategy)?;
                    let doc = serde_json::json!({ "precondition_failed": message, "axioms": base });
                    Outcome::new(doc, format!("precondition failed: {message}\n{base}"), false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Kannan {
            space,
            map,
            lambda,
            estimate,
        } => {
            let space = resolve_space(space)?;
            let map = resolve_map(map, &space)?;
            let strategy = strategy_for(cli, &space);
            match (lambda, estimate) {
                (Some(l), _) => {
                    let report = check_kannan(&space, &map, KannanConstant::new(*l)?, &strategy)?;
                    Outcome::new(&report, report.to_string(), report.passed())
                }
                (None, _) => {
                    let est = estimate_lambda(&space, &map, &strategy)?;
                    let human = match est.lambda_hat() {
                        Some(l) => format!("lambda_hat = {l} ({})\n", if est.is_kannan() { "kannan" } else { "not kannan" }),
                        None => "infeasible: positive left side with zero right side\n".to_string(),
                    };
                    Outcome::new(&est, human, est.is_kannan())
                }
            }
        }
        Command::Solve {
            space,
            map,
            start,
            trace,
            max_iter,
        } => {
            let space = resolve_space(space)?;
            let map = resolve_map(map, &space)?;
            let start = parse_point(start, &space)?;
            let (tr, result) = match iterate(&space, &map, start, cli.tolerance, *max_iter) {
                Ok(ok) => ok,
                Err(Error::NonConvergence { trace: t, .. }) if trace.is_some() => {
                    write_trace(trace.as_deref(), &t.to_delimited())?;
                    return Err(usage("no fixed point reached; trace written").into_check());
                }
                Err(e) => return Err(e.into()),
            };
            let csv = tr.to_delimited();
            write_trace(trace.as_deref(), &csv)?;
            let human = format!(
                "fixed point {} after {} iterations (residual {:e}, self-distance {:e}, {:?})\n",
                result.point, result.iterations, result.residual, result.self_distance, result.terminated_by
            );
            let mut outcome = Outcome::new(&result, human, true)?;
            outcome.delimited = Some(csv);
            Ok(outcome)
        }
        Command::ClassifySeq { space, seq, candidates } => {
            let space = resolve_space(space)?;
            let seq = parse_sequence(seq, cli.horizon)?;
            let candidates = candidates
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_point(s, &space))
                .collect::<Result<Vec<_>, _>>()?;
            let class = classify_sequence(&space, &seq, &candidates, cli.tolerance)?;
            let human = serde_json::to_string_pretty(&class).map_err(|e| usage(e.to_string()))? + "\n";
            Outcome::new(&class, human, true)
        }
        Command::Probe { space } => {
            let name = space.clone();
            let space = resolve_space(space)?;
            let family = default_family(cli.horizon)?;
            let report = probe_completeness(&space, &family, &default_candidates(&space), cli.tolerance)?;
            // a counterexample against a known-complete space is a failed check
            let consistent = builtin_completeness(&name).is_none_or(|facts| {
                let contradicts = |known: Option<bool>, notion| known == Some(true) && report.counterexample_found(notion);
                !(contradicts(facts.p_sequential, Notion::PSequential)
                    || contradicts(facts.left_p_sequential, Notion::LeftPSequential)
                    || contradicts(facts.smyth, Notion::Smyth))
            });
            let mut human = format!("completeness evidence for {} ({})\n", report.space, report.note);
            for e in &report.notions {
                match &e.counterexample {
                    Some(s) => human += &format!("  {:<30} counterexample: {s}\n", e.notion.to_string()),
                    None => human += &format!("  {:<30} no counterexample found\n", e.notion.to_string()),
                }
            }
            Outcome::new(&report, human, consistent)
        }
        Command::ConverseDemo => {
            let space = builtin_space(PAPER_EXAMPLE_PUNCTURED)?;
            let seq = SequenceSpec::geometric(0.5, cli.horizon)?;
            let cmap = build_counterexample_map(&space, &seq)?;
            let strategy = CheckStrategy::sampled(cli.samples, cli.seed)
                .with_slack(cli.slack)
                .with_upper_cap(1e3);
            let audit = audit_counterexample(&space, &cmap, &strategy)?;
            let human = format!("{}min p+(x, Tx) over samples: {:e}\n", audit.report, audit.min_displacement);
            let passed = audit.passed();
            Outcome::new(&audit, human, passed)
        }
        Command::Oracle { n, space } => {
            let space = match (n, space) {
                (_, Some(path)) => {
                    let s = resolve_space(&path.to_string_lossy())?;
                    if let Some(n) = n {
                        if s.len() != Some(*n) {
                            return Err(usage(format!("--n {n} does not match the {}-point space file", s.len().unwrap_or(0))));
                        }
                    }
                    s
                }
                (Some(n), None) => {
                    if *n == 0 || *n > DEFAULT_ENUMERATION_CAP {
                        return Err(usage(format!("--n must be in 1..={DEFAULT_ENUMERATION_CAP}")));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    rng.set_stream(99);
                    random_valid_space(&mut rng, *n)
                }
                (None, None) => return Err(usage("oracle needs --n or --space")),
            };
            let audit = exhaustive_kannan_audit(&space, DEFAULT_ENUMERATION_CAP)?;
            let summary = audit.summary();
            let human = format!(
                "n = {}, maps = {}, kannan maps = {}, violations = {}\n",
                summary.n,
                summary.maps_total,
                summary.kannan_count,
                summary.violations.len()
            );
            let passed = summary.violations.is_empty();
            Outcome::new(&summary, human, passed)
        }
    }
}

impl Failure {
    fn into_check(mut self) -> Self {
        self.code = 1;
        self
    }
}

fn write_trace(path: Option<&Path>, csv: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, csv).map_err(|e| usage(format!("cannot write trace {}: {e}", p.display())))?;
    }
    Ok(())
}
