//! Command-line surface for the hyperclock toolkit: formula parsing and
//! negation, trace checking, grid-bounded verification over interval- and
//! point-based automata, flow-logic compilation, the point-to-interval
//! reduction, and replay of the bundled security-property corpus.
//!
//! Exit codes: 0 when the property holds (or all corpus entries reproduce),
//! 1 when it fails, 2 on any input error. All verdict output is deterministic
//! JSON; wall-clock timings go to stderr.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperclock::automaton::{Execution, TimedAutomaton};
use hyperclock::engine::{
    replay_point_witness, replay_witness, verify, verify_point, GridBudget, GridProvider, Route,
    Verdict, VerdictKind,
};
use hyperclock::formula::{parse_fragment, HcmtlFormula, PathVar};
use hyperclock::mso::{
    emit_automaton_formula, scale_automaton, scale_formula, scaling_factor, serialize_mso,
    translate_hcmtl,
};
use hyperclock::pointwise::{build_interval_automaton, PointExecution, PointTimedAutomaton};
use hyperclock::semantics::{sat_interval, sat_point, Anchor, Environment, NoRuns};
use hyperclock::timecore::{Rational, TimeBound};

#[derive(Parser)]
#[command(name = "hyperclock", version, about = "Hyper metric temporal logic toolkit")]
struct Cli {
    /// Number of worker threads for run enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Grid granularity k: endpoints are multiples of 1/k.
    #[arg(long, default_value_t = 1)]
    granularity: u64,
    /// Maximum number of transitions per enumerated run.
    #[arg(long, default_value_t = 4)]
    max_transitions: usize,
    /// Time horizon N (a rational, e.g. "5" or "9/2").
    #[arg(long)]
    horizon: String,
}

impl BudgetArgs {
    fn build(&self) -> Result<GridBudget> {
        let horizon: Rational = self
            .horizon
            .parse()
            .map_err(|e| anyhow!("invalid --horizon {:?}: {}", self.horizon, e))?;
        Ok(GridBudget {
            granularity: self.granularity,
            max_transitions: self.max_transitions,
            horizon,
        })
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum RouteArg {
    Direct,
    Reduce,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and echo its normalized form.
    Parse {
        /// Formula text, or @FILE to read it from a file.
        formula: String,
    },
    /// Print the negation-normal-form negation of a formula.
    Negate {
        /// Formula text, or @FILE to read it from a file.
        formula: String,
    },
    /// Evaluate a formula over a recorded environment at a given time.
    CheckTrace {
        /// Environment JSON file (interval or point mode).
        env: PathBuf,
        /// Formula text, or @FILE to read it from a file.
        formula: String,
        /// Evaluation time (rational).
        #[arg(long)]
        at: String,
        /// Anchor path variable (defaults to no anchor).
        #[arg(long)]
        anchor: Option<String>,
        /// Automaton JSON supplying state labels (and runs for quantifiers).
        #[arg(long)]
        automaton: PathBuf,
        /// Enable quantifier evaluation with this grid granularity.
        #[arg(long)]
        granularity: Option<u64>,
        /// Transition bound for quantifier evaluation.
        #[arg(long)]
        max_transitions: Option<usize>,
    },
    /// Decide a sentence over an interval-based automaton on the grid.
    Verify {
        /// Automaton JSON file.
        automaton: PathBuf,
        /// Sentence text, or @FILE to read it from a file.
        formula: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Decide a sentence over a point-based automaton on the grid.
    VerifyPoint {
        /// Point automaton JSON file.
        automaton: PathBuf,
        /// Sentence text, or @FILE to read it from a file.
        formula: String,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Which route's verdict to report (both are computed and compared).
        #[arg(long, value_enum, default_value_t = RouteArg::Direct)]
        route: RouteArg,
    },
    /// Compile an automaton (and optionally a formula) to flow-logic text.
    ToMso {
        /// Automaton JSON file.
        #[arg(long)]
        automaton: PathBuf,
        /// Formula text, or @FILE to read it from a file.
        #[arg(long)]
        formula: Option<String>,
        /// Time horizon N before scaling.
        #[arg(long)]
        horizon: String,
    },
    /// Emit the interval simulation of a point automaton and the transformed
    /// formula.
    Point2interval {
        /// Point automaton JSON file.
        automaton: PathBuf,
        /// Formula text, or @FILE to read it from a file.
        #[arg(long)]
        formula: Option<String>,
    },
    /// Operations over the bundled security-property corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Replay every corpus entry and compare against the frozen verdicts.
    Run {
        /// Corpus directory containing index.json.
        #[arg(long, default_value = "corpus")]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon_pool(jobs) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn rayon_pool(jobs: usize) -> Result<()> {
    hyperclock::engine::configure_threads(jobs).map_err(|e| anyhow!("--jobs: {e}"))
}

/// Resolve "@path" arguments to file contents; otherwise use the text as is.
fn formula_text(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        Ok(fs::read_to_string(path)
            .with_context(|| format!("reading formula file {path}"))?
            .trim()
            .to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn parse_formula(arg: &str) -> Result<HcmtlFormula> {
    let text = formula_text(arg)?;
    parse_fragment(&text).map_err(|e| anyhow!("formula: {e}"))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {} {}", what, path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {} {}", what, path.display()))
}

fn load_automaton(path: &Path) -> Result<TimedAutomaton> {
    let a: TimedAutomaton = load_json(path, "automaton")?;
    a.validate()
        .with_context(|| format!("validating automaton {}", path.display()))?;
    Ok(a)
}

fn load_point_automaton(path: &Path) -> Result<PointTimedAutomaton> {
    let b: PointTimedAutomaton = load_json(path, "point automaton")?;
    b.validate()
        .with_context(|| format!("validating point automaton {}", path.display()))?;
    Ok(b)
}

fn print_verdict(v: &Verdict) -> Result<u8> {
    println!("{}", serde_json::to_string_pretty(v)?);
    eprintln!("wall: {} ms", v.wall.as_millis());
    Ok(match v.verdict {
        VerdictKind::Holds | VerdictKind::HoldsOnGrid => 0,
        VerdictKind::Fails | VerdictKind::FailsWithWitness => 1,
    })
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Parse { formula } => {
            let f = parse_formula(&formula)?;
            println!("{f}");
            let free = f.free_vars();
            if free.is_empty() {
                println!("sentence");
            } else {
                let names: Vec<String> = free.iter().map(|v| v.0.clone()).collect();
                println!("free: {}", names.join(" "));
            }
            Ok(0)
        }
        Command::Negate { formula } => {
            let f = parse_formula(&formula)?;
            println!("{}", f.negate());
            Ok(0)
        }
        Command::CheckTrace {
            env,
            formula,
            at,
            anchor,
            automaton,
            granularity,
            max_transitions,
        } => {
            let f = parse_formula(&formula)?;
            let t: Rational = at
                .parse()
                .map_err(|e| anyhow!("invalid --at {at:?}: {e}"))?;
            let anchor = match anchor {
                None => Anchor::Epsilon,
                Some(v) => Anchor::Var(PathVar(v)),
            };
            let environment: Environment = load_json(&env, "environment")?;
            let budget = match (granularity, max_transitions) {
                (Some(k), Some(d)) => Some((k, d)),
                (None, None) => None,
                _ => bail!("--granularity and --max-transitions must be given together"),
            };
            let sat = match &environment {
                Environment::Interval { horizon, paths } => {
                    let a = load_automaton(&automaton)?;
                    let paths: BTreeMap<PathVar, Execution> = paths
                        .iter()
                        .map(|(k, v)| (PathVar(k.clone()), v.clone()))
                        .collect();
                    eval_with_provider_interval(&a, &paths, &t, &anchor, &f, horizon, budget)?
                }
                Environment::Point { horizon, paths } => {
                    let b = load_point_automaton(&automaton)?;
                    let paths: BTreeMap<PathVar, PointExecution> = paths
                        .iter()
                        .map(|(k, v)| (PathVar(k.clone()), v.clone()))
                        .collect();
                    eval_with_provider_point(&b, &paths, &t, &anchor, &f, horizon, budget)?
                }
            };
            println!("{sat}");
            Ok(if sat { 0 } else { 1 })
        }
        Command::Verify {
            automaton,
            formula,
            budget,
        } => {
            let a = load_automaton(&automaton)?;
            let f = parse_formula(&formula)?;
            let budget = budget.build()?;
            let v = verify(&a, &f, &budget).map_err(|e| anyhow!("verify: {e}"))?;
            print_verdict(&v)
        }
        Command::VerifyPoint {
            automaton,
            formula,
            budget,
            route,
        } => {
            let b = load_point_automaton(&automaton)?;
            let f = parse_formula(&formula)?;
            let budget = budget.build()?;
            let route = match route {
                RouteArg::Direct => Route::Direct,
                RouteArg::Reduce => Route::Reduce,
            };
            let v = verify_point(&b, &f, &budget, route).map_err(|e| anyhow!("verify-point: {e}"))?;
            print_verdict(&v)
        }
        Command::ToMso {
            automaton,
            formula,
            horizon,
        } => {
            let a = load_automaton(&automaton)?;
            let f = formula.as_deref().map(parse_formula).transpose()?;
            let horizon: Rational = horizon
                .parse()
                .map_err(|e| anyhow!("invalid --horizon {horizon:?}: {e}"))?;
            let factor = scaling_factor(&a, f.as_ref(), &horizon);
            let scaled_a = scale_automaton(&a, &factor);
            let scaled_horizon = &horizon * &factor;
            let mut out = serde_json::Map::new();
            out.insert(
                "manifest".into(),
                serde_json::json!({
                    "factor": factor.to_string(),
                    "horizon": scaled_horizon.to_string(),
                }),
            );
            let phi_a = emit_automaton_formula(&scaled_a, None)
                .map_err(|e| anyhow!("compiling automaton: {e}"))?;
            out.insert("automatonFormula".into(), serialize_mso(&phi_a).into());
            if let Some(f) = &f {
                let scaled_f = scale_formula(f, &factor);
                let tr = translate_hcmtl(&scaled_f, &scaled_a)
                    .map_err(|e| anyhow!("compiling formula: {e}"))?;
                let formulas: Vec<serde_json::Value> =
                    tr.formulas.iter().map(|m| serialize_mso(m).into()).collect();
                out.insert(
                    "translation".into(),
                    serde_json::json!({ "freeVar": tr.free_var, "formulas": formulas }),
                );
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Object(out))?
            );
            Ok(0)
        }
        Command::Point2interval { automaton, formula } => {
            let b = load_point_automaton(&automaton)?;
            let a = build_interval_automaton(&b);
            let mut out = serde_json::Map::new();
            out.insert("automaton".into(), serde_json::to_value(&a)?);
            if let Some(formula) = formula {
                let f = parse_formula(&formula)?;
                let scope = f.free_vars();
                out.insert("formula".into(), f.point_to_interval(&scope).to_string().into());
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Object(out))?
            );
            Ok(0)
        }
        Command::Corpus {
            action: CorpusAction::Run { dir },
        } => corpus_run(&dir),
    }
}

fn eval_with_provider_interval(
    a: &TimedAutomaton,
    paths: &BTreeMap<PathVar, Execution>,
    t: &Rational,
    anchor: &Anchor,
    f: &HcmtlFormula,
    horizon: &TimeBound,
    budget: Option<(u64, usize)>,
) -> Result<bool> {
    let sat = match budget {
        None => sat_interval(a, paths, t, anchor, f, horizon, &NoRuns),
        Some((k, d)) => {
            let n = horizon
                .finite()
                .ok_or_else(|| anyhow!("quantifier evaluation needs a finite horizon"))?;
            let gb = GridBudget {
                granularity: k,
                max_transitions: d,
                horizon: n.clone(),
            };
            let provider = GridProvider::new(&gb);
            sat_interval(a, paths, t, anchor, f, horizon, &provider)
        }
    };
    sat.map_err(|e| anyhow!("evaluation: {e}"))
}

fn eval_with_provider_point(
    b: &PointTimedAutomaton,
    paths: &BTreeMap<PathVar, PointExecution>,
    t: &Rational,
    anchor: &Anchor,
    f: &HcmtlFormula,
    horizon: &TimeBound,
    budget: Option<(u64, usize)>,
) -> Result<bool> {
    let sat = match budget {
        None => sat_point(b, paths, t, anchor, f, horizon, &NoRuns),
        Some((k, d)) => {
            let n = horizon
                .finite()
                .ok_or_else(|| anyhow!("quantifier evaluation needs a finite horizon"))?;
            let gb = GridBudget {
                granularity: k,
                max_transitions: d,
                horizon: n.clone(),
            };
            let provider = GridProvider::new(&gb);
            sat_point(b, paths, t, anchor, f, horizon, &provider)
        }
    };
    sat.map_err(|e| anyhow!("evaluation: {e}"))
}

#[derive(serde::Deserialize)]
struct CorpusIndexEntry {
    name: String,
    #[allow(dead_code)]
    note: String,
    formula: String,
    budget: GridBudget,
    models: Vec<CorpusModel>,
}

#[derive(serde::Deserialize)]
struct CorpusModel {
    file: String,
    expected: String,
}

fn corpus_run(dir: &Path) -> Result<u8> {
    let entries: Vec<CorpusIndexEntry> = load_json(&dir.join("index.json"), "corpus index")?;
    let mut failures = 0usize;
    for entry in &entries {
        let formula_path = dir.join(&entry.formula);
        let text = fs::read_to_string(&formula_path)
            .with_context(|| format!("reading formula {}", formula_path.display()))?;
        let f = parse_fragment(text.trim()).map_err(|e| {
            anyhow!("formula {}: {}", formula_path.display(), e)
        })?;
        for model in &entry.models {
            let path = dir.join(&model.file);
            let a = load_automaton(&path)?;
            let v = verify(&a, &f, &entry.budget)
                .map_err(|e| anyhow!("verify {}: {}", path.display(), e))?;
            let got = serde_json::to_value(&v.verdict)?
                .as_str()
                .unwrap_or_default()
                .to_string();
            let mut ok = got == model.expected;
            let mut detail = String::new();
            if ok && v.verdict == VerdictKind::FailsWithWitness {
                match &v.witness {
                    Some(w) => {
                        let confirmed = replay_witness(&a, &f, w, &entry.budget)
                            .map_err(|e| anyhow!("replay {}: {}", path.display(), e))?;
                        if confirmed {
                            detail = ", witness replayed".into();
                        } else {
                            ok = false;
                            detail = ", witness replay FAILED".into();
                        }
                    }
                    None => {
                        ok = false;
                        detail = ", witness missing".into();
                    }
                }
            }
            let status = if ok { "ok" } else { "MISMATCH" };
            println!(
                "{}: {} -> {} (expected {}){} ... {}",
                entry.name, model.file, got, model.expected, detail, status
            );
            if !ok {
                failures += 1;
            }
        }
    }
    if failures == 0 {
        println!("corpus: {} entries reproduced", entries.len());
        Ok(0)
    } else {
        println!("corpus: {failures} mismatches");
        Ok(1)
    }
}

// Keep point-mode replay reachable for external tooling parity; corpus
// entries are interval-mode only.
#[allow(dead_code)]
fn replay_point(
    b: &PointTimedAutomaton,
    f: &HcmtlFormula,
    w: &Environment,
    budget: &GridBudget,
) -> Result<bool> {
    replay_point_witness(b, f, w, budget).map_err(|e| anyhow!("replay: {e}"))
}
