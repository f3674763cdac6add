//! Command-line front end.
//!
//! Exit codes: 0 on convergence or success, 1 on input errors, 2 when the iteration budget runs
//! out before the bounds meet.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::bec::{best_exit, classify_state, find_mbecs};
use crate::bvi::{bvi_with, Arithmetic, BviResult, IterationRecord, Mode, RunConfig, Termination};
use crate::graph::find_mecs;
use crate::model::{compute_winning_region, normalize, parse_csg, Csg, NormalizedCsg, StateRef};
use crate::rational::{parse_rational, to_decimal, to_fraction, Rational};
use crate::valuation::{parse_valuation, Provenance, Valuation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "csgbvi", version, about = "Bounded value iteration for concurrent stochastic reachability games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bracket the value of every state.
    Solve(SolveArgs),
    /// Print end components, the surely-losing region and action counts.
    Inspect {
        model: PathBuf,
    },
    /// Report the maximal bloated end components under a valuation, as JSON.
    Becs {
        model: PathBuf,
        /// Valuation file, or `init` for the initial upper bound.
        valuation: String,
    },
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    model: PathBuf,
    /// Precision, as a fraction, integer or decimal.
    #[arg(long, default_value = "1/1000000")]
    epsilon: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Bvi)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: u64,
    #[arg(long, value_enum, default_value_t = OutputArg::Text)]
    output: OutputArg,
    /// Write one JSON object per iteration to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ArithmeticArg::Exact)]
    arithmetic: ArithmeticArg,
    #[arg(long, value_enum, default_value_t = TerminationArg::AllStates)]
    termination: TerminationArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Bvi,
    LowerOnly,
    Naive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputArg {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ArithmeticArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TerminationArg {
    AllStates,
    Initial,
}

/// Input problem reported on stderr with exit code 1.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> InputError {
        InputError(e.to_string())
    }
}

pub fn run() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(&args, out),
        Command::Inspect { model } => inspect(&model, out).map(|_| EXIT_OK),
        Command::Becs { model, valuation } => becs(&model, &valuation, out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn load(path: &Path) -> Result<NormalizedCsg, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let g = parse_csg(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Ok(normalize(&g))
}

fn names(g: &Csg, set: &BTreeSet<usize>) -> Vec<String> {
    set.iter().map(|&s| g.name(s).to_string()).collect()
}

fn brace(names: &[String]) -> String {
    format!("{{{}}}", names.join(", "))
}

/// Value of an original state under a valuation of the normalized game.
fn original_value(g: &NormalizedCsg, v: &[Rational], s: usize) -> Rational {
    match &g.state_map()[s] {
        StateRef::State(i) => v[*i].clone(),
        StateRef::Target => Rational::one(),
        StateRef::Losing => Rational::zero(),
        StateRef::Fixed(x) => x.clone(),
    }
}

fn by_name(g: &Csg, v: &[Rational]) -> Value {
    let map: Map<String, Value> = (0..g.num_states())
        .map(|s| (g.name(s).to_string(), Value::String(to_fraction(&v[s]))))
        .collect();
    Value::Object(map)
}

fn trace_line(g: &NormalizedCsg, rec: &IterationRecord) -> Value {
    let deflations: Vec<Value> = rec
        .deflations
        .iter()
        .map(|d| {
            json!({
                "mec": names(g, &d.mec),
                "bec": names(g, &d.bec),
                "best_exit_value": to_fraction(&d.best_exit_value),
                "best_exits": names(g, &d.best_exits),
                "upper_after": by_name(g, &d.upper_after),
            })
        })
        .collect();
    json!({
        "iteration": rec.iteration,
        "lower": by_name(g, &rec.lower),
        "upper_pre": by_name(g, &rec.upper_pre),
        "upper": by_name(g, &rec.upper),
        "deflations": deflations,
    })
}

fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let epsilon = parse_rational(&args.epsilon)?;
    if epsilon <= Rational::zero() {
        return Err(InputError(format!("epsilon must be positive, got {}", args.epsilon)));
    }
    let g = load(&args.model)?;
    let cfg = RunConfig {
        epsilon,
        mode: match args.mode {
            ModeArg::Bvi => Mode::Bvi,
            ModeArg::LowerOnly => Mode::LowerOnly,
            ModeArg::Naive => Mode::Naive,
        },
        max_iters: args.max_iters,
        arithmetic: match args.arithmetic {
            ArithmeticArg::Exact => Arithmetic::Exact,
            ArithmeticArg::Float => Arithmetic::Float,
        },
        termination: match args.termination {
            TerminationArg::AllStates => Termination::AllStates,
            TerminationArg::Initial => Termination::Initial,
        },
    };
    let mut trace = match &args.trace {
        Some(path) => Some(BufWriter::new(
            File::create(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?,
        )),
        None => None,
    };
    let mut trace_error: Option<io::Error> = None;
    let result = bvi_with(&g, &cfg, |rec| {
        if let (Some(w), None) = (trace.as_mut(), trace_error.as_ref()) {
            if let Err(e) = writeln!(w, "{}", trace_line(&g, rec)) {
                trace_error = Some(e);
            }
        }
    })?;
    if let Some(mut w) = trace {
        if let Some(e) = trace_error.take().or_else(|| w.flush().err()) {
            return Err(InputError(format!("writing trace: {e}")));
        }
    }
    let report = match args.output {
        OutputArg::Text => text_report(&g, &result),
        OutputArg::Json => format!("{:#}\n", json_report(&g, &cfg, &result)),
        OutputArg::Csv => csv_report(&g, &result),
    };
    out.write_all(report.as_bytes())?;
    Ok(if result.converged { EXIT_OK } else { EXIT_BUDGET })
}

fn show(r: &Rational) -> String {
    format!("{} ({})", to_fraction(r), to_decimal(r, 12))
}

fn text_report(g: &NormalizedCsg, r: &BviResult) -> String {
    let orig = g.original();
    let mut s = String::new();
    s.push_str(&format!("converged: {}\n", r.converged));
    s.push_str(&format!("iterations: {}\n", r.iterations));
    s.push_str(&format!("epsilon: {}\n", show(&r.epsilon)));
    let width = orig.names().iter().map(|n| n.len()).max().unwrap_or(0);
    for st in 0..orig.num_states() {
        let lo = original_value(g, r.lower.values(), st);
        let hi = original_value(g, r.upper.values(), st);
        s.push_str(&format!("{:width$}  [{}, {}]\n", orig.name(st), show(&lo), show(&hi)));
    }
    s
}

fn json_report(g: &NormalizedCsg, cfg: &RunConfig, r: &BviResult) -> Value {
    let orig = g.original();
    let states: Vec<Value> = (0..orig.num_states())
        .map(|st| {
            json!({
                "state": orig.name(st),
                "lower": to_fraction(&original_value(g, r.lower.values(), st)),
                "upper": to_fraction(&original_value(g, r.upper.values(), st)),
            })
        })
        .collect();
    json!({
        "converged": r.converged,
        "iterations": r.iterations,
        "epsilon": to_fraction(&r.epsilon),
        "mode": match cfg.mode { Mode::Bvi => "bvi", Mode::LowerOnly => "lower-only", Mode::Naive => "naive" },
        "termination": match cfg.termination { Termination::AllStates => "all-states", Termination::Initial => "initial" },
        "states": states,
    })
}

/// One row per iteration and original state: `iteration,state,lower,upper`.
fn csv_report(g: &NormalizedCsg, r: &BviResult) -> String {
    let orig = g.original();
    let mut s = String::from("iteration,state,lower,upper\n");
    for rec in &r.trace {
        for st in 0..orig.num_states() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                rec.iteration,
                csv_field(orig.name(st)),
                to_fraction(&original_value(g, &rec.lower, st)),
                to_fraction(&original_value(g, &rec.upper, st)),
            ));
        }
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn inspect(path: &Path, out: &mut dyn Write) -> Result<(), InputError> {
    let g = load(path)?;
    let orig = g.original();
    let mecs = find_mecs(&g, &g.inner_states());
    let w = compute_winning_region(orig);
    let mut s = String::new();
    s.push_str(&format!("states: {}\n", orig.num_states()));
    s.push_str(&format!("initial: {}\n", orig.name(orig.initial())));
    s.push_str(&format!("targets: {}\n", brace(&names(orig, orig.targets()))));
    let fixed: Vec<String> = orig
        .fixed_values()
        .iter()
        .map(|(st, v)| format!("{} = {}", orig.name(*st), to_fraction(v)))
        .collect();
    s.push_str(&format!("fixed: {}\n", brace(&fixed)));
    s.push_str(&format!("W: {}\n", brace(&names(orig, &w))));
    if mecs.is_empty() {
        s.push_str("MECs: none\n");
    } else {
        let list: Vec<String> = mecs.iter().map(|m| brace(&names(&g, m))).collect();
        s.push_str(&format!("MECs: [{}]\n", list.join(", ")));
    }
    s.push_str("actions:\n");
    for st in 0..orig.num_states() {
        s.push_str(&format!(
            "  {}: {} x {}\n",
            orig.name(st),
            orig.actions_r(st).len(),
            orig.actions_s(st).len()
        ));
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn becs(path: &Path, valuation: &str, out: &mut dyn Write) -> Result<(), InputError> {
    let g = load(path)?;
    let v = if valuation == "init" {
        Valuation::upper_init(&g, Provenance::ValidUpper)
    } else {
        let text = std::fs::read_to_string(valuation).map_err(|e| InputError(format!("{valuation}: {e}")))?;
        parse_valuation(&g, &text).map_err(|e| InputError(format!("{valuation}: {e}")))?
    };
    let action_names = |list: &[String], set: &BTreeSet<usize>| -> Vec<String> {
        set.iter().map(|&i| list[i].clone()).collect()
    };
    let mut report = Vec::new();
    for mec in find_mecs(&g, &g.inner_states()) {
        let mut mbecs = Vec::new();
        for x in find_mbecs(&g, &mec, &v)? {
            let (value, exits) = best_exit(&g, &x, &v)?;
            let mut states = Vec::new();
            for &st in &x {
                let c = classify_state(&g, &x, &v, st)?;
                let (rows, cols) = (g.actions_r(st), g.actions_s(st));
                states.push(json!({
                    "state": g.name(st),
                    "value": to_fraction(&c.value),
                    "hazard_supports": c.hazard_supports.iter().map(|h| action_names(rows, h)).collect::<Vec<_>>(),
                    "hazard_actions": action_names(rows, &c.hazard_actions),
                    "trap_columns": action_names(cols, &c.trap_columns),
                    "deflating_rows": action_names(rows, &c.deflating_rows),
                    "exit_value": to_fraction(&c.exit_value),
                }));
            }
            mbecs.push(json!({
                "states": names(&g, &x),
                "best_exit_value": to_fraction(&value),
                "best_exits": names(&g, &exits),
                "classification": states,
            }));
        }
        report.push(json!({ "mec": names(&g, &mec), "mbecs": mbecs }));
    }
    let doc = json!({ "valuation": by_name(&g, v.values()), "mecs": report });
    writeln!(out, "{doc:#}")?;
    Ok(())
}
