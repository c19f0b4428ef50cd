//! The `fmu` command line. Every subcommand produces a text rendering and a
//! JSON document; `--json` selects the latter.
//!
//! Exit codes: 0 on success, 1 when an equivalence check is refuted, 2 on
//! usage, parse, type or budget errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::analysis::{
    build_chain, exact_distribution, phi_lower, prob_bounds, red_set, solve_exact, xi_distribution, Distribution,
    Effort, Stratified,
};
use crate::corpus;
use crate::equiv::{ciu_approx, EquivOptions, Verdict};
use crate::prob::Prob;
use crate::semantics::{sample_run, Config, RunOutcome, Step, StepKind};
use crate::syntax::{parse_term, parse_type, pretty, pretty_context, pretty_type, Term, Type};
use crate::typecheck::typecheck;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fmu", version, about = "Probabilistic lambda calculus: run, analyse and compare programs")]
pub struct Cli {
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Default budgets, either a scale factor (`4`) or `nodes=N,cuff=N,iters=N`.
    #[arg(long, env = "FMU_EFFORT", global = true, hide_env_values = true)]
    effort: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a program and print it back in concrete syntax.
    Parse { file: PathBuf },
    /// Typecheck a program.
    Check {
        file: PathBuf,
        #[arg(long = "type")]
        ty: Option<String>,
    },
    /// Print the weighted successor tree.
    Step {
        file: PathBuf,
        #[arg(short = 'n', default_value_t = 1)]
        depth: usize,
    },
    /// Sample one execution.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
    },
    /// Termination probability: bounds by default.
    Prob {
        file: PathBuf,
        #[arg(long, conflicts_with = "iters")]
        exact: bool,
        /// Report the iterate Φⁿ(⊥) instead.
        #[arg(long)]
        iters: Option<usize>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Stratified termination probability Ψᵏ(⊥).
    Strat {
        file: PathBuf,
        #[arg(short = 'k')]
        k: Option<usize>,
    },
    /// Distribution over final values.
    Dist {
        file: PathBuf,
        #[arg(long, conflicts_with = "fuel")]
        exact: bool,
        /// Report the iterate Ξⁿ(⊥) instead.
        #[arg(long)]
        fuel: Option<usize>,
        #[command(flatten)]
        budget: Budget,
    },
    /// The set of paths ending in the first choice or unfold-fold.
    Red { file: PathBuf },
    /// Write the reachable chain in Graphviz format.
    Graph {
        file: PathBuf,
        #[arg(long)]
        dot: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// CIU approximation testing of two programs at a type.
    Ciu {
        lhs: PathBuf,
        rhs: PathBuf,
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        budget: Budget,
        /// Test both directions.
        #[arg(long)]
        both: bool,
    },
    /// The built-in program corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Args, Debug)]
struct Budget {
    /// Node budget per explored chain.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum CorpusAction {
    List,
    /// Write a program in concrete syntax, e.g. `emit vn 1 3 -o vn13.fmu`.
    Emit {
        name: String,
        params: Vec<String>,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

/// A finished command: text for humans, JSON for tools.
struct Report {
    text: String,
    result: Value,
    code: i32,
}

impl Report {
    fn ok(text: String, result: Value) -> Self {
        Report { text, result, code: EXIT_OK }
    }
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError(msg.into()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let (name, input) = describe(&cli.command);
    let outcome = parse_effort(cli.effort.as_deref()).and_then(|effort| dispatch(&cli.command, effort));
    match outcome {
        Ok(report) => {
            if cli.json {
                let doc = json!({ "command": name, "input": input, "result": report.result });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serialisable"));
            } else {
                let _ = write!(out, "{}", report.text);
            }
            report.code
        }
        Err(CliError(msg)) => {
            if cli.json {
                let doc = json!({ "command": name, "input": input, "error": msg });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serialisable"));
            }
            let _ = writeln!(err, "fmu {name}: {msg}");
            EXIT_ERROR
        }
    }
}

fn parse_effort(spec: Option<&str>) -> Result<Effort, CliError> {
    let Some(spec) = spec.map(str::trim).filter(|s| !s.is_empty()) else {
        return Ok(Effort::default());
    };
    if let Ok(f) = spec.parse::<usize>() {
        if f == 0 {
            return fail("FMU_EFFORT scale must be positive");
        }
        return Ok(Effort::default().scaled(f));
    }
    let mut e = Effort::default();
    for part in spec.split(',') {
        let Some((k, v)) = part.split_once('=') else {
            return fail(format!("bad FMU_EFFORT entry `{part}`"));
        };
        let v: usize = v.trim().parse().map_err(|_| CliError(format!("bad FMU_EFFORT value `{part}`")))?;
        if v == 0 {
            return fail(format!("FMU_EFFORT `{part}` must be positive"));
        }
        match k.trim() {
            "nodes" => e.nodes = v,
            "cuff" => e.cuff = v,
            "iters" => e.iterations = v,
            other => return fail(format!("unknown FMU_EFFORT key `{other}`")),
        }
    }
    Ok(e)
}

fn describe(c: &Command) -> (&'static str, Value) {
    let p = |f: &Path| Value::String(f.display().to_string());
    match c {
        Command::Parse { file } => ("parse", p(file)),
        Command::Check { file, .. } => ("check", p(file)),
        Command::Step { file, .. } => ("step", p(file)),
        Command::Run { file, .. } => ("run", p(file)),
        Command::Prob { file, .. } => ("prob", p(file)),
        Command::Strat { file, .. } => ("strat", p(file)),
        Command::Dist { file, .. } => ("dist", p(file)),
        Command::Red { file } => ("red", p(file)),
        Command::Graph { file, .. } => ("graph", p(file)),
        Command::Ciu { lhs, rhs, .. } => ("ciu", json!([p(lhs), p(rhs)])),
        Command::Corpus { action: CorpusAction::List } => ("corpus", json!("list")),
        Command::Corpus { action: CorpusAction::Emit { name, params, .. } } => {
            ("corpus", json!({ "name": name, "params": params }))
        }
    }
}

fn load(path: &Path) -> Result<Term, CliError> {
    let src = fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    let t = parse_term(&src).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    if !t.is_closed() {
        let free: Vec<String> = t.free_vars().iter().map(|v| v.to_string()).collect();
        return fail(format!("{}: free variables {}", path.display(), free.join(", ")));
    }
    Ok(t)
}

fn config(path: &Path) -> Result<Config, CliError> {
    Ok(Config::new(load(path)?.erase()))
}

fn nodes(b: &Budget, effort: &Effort) -> usize {
    b.budget.map_or(effort.nodes, |n| n as usize)
}

fn rat(p: &Prob) -> Value {
    Value::String(p.to_string())
}

fn dist_json(d: &Distribution) -> Value {
    Value::Array(
        d.sorted_printed()
            .into_iter()
            .map(|(v, p)| json!({ "value": v, "prob": p.to_string() }))
            .collect(),
    )
}

fn dist_text(d: &Distribution) -> String {
    let mut s = String::new();
    for (v, p) in d.sorted_printed() {
        s.push_str(&format!("{p}\t{v}\n"));
    }
    s.push_str(&format!("mass {}\n", d.mass()));
    s
}

fn kind_name(k: StepKind) -> &'static str {
    match k {
        StepKind::Choice => "choice",
        StepKind::UnfoldFold => "unfold-fold",
        StepKind::Other => "other",
    }
}

fn dispatch(cmd: &Command, effort: Effort) -> Result<Report, CliError> {
    match cmd {
        Command::Parse { file } => {
            let t = load(file)?;
            let printed = pretty(&t);
            Ok(Report::ok(format!("{printed}\n"), json!({ "term": printed })))
        }
        Command::Check { file, ty } => {
            let t = load(file)?;
            let expected = ty.as_deref().map(parse_type).transpose()?;
            let got = typecheck(&t, expected.as_ref())?;
            let printed = pretty_type(&got);
            Ok(Report::ok(format!("{printed}\n"), json!({ "type": printed })))
        }
        Command::Step { file, depth } => {
            let c = config(file)?;
            let mut text = String::new();
            let tree = step_tree(&c, *depth, 0, &Prob::one(), &mut text);
            Ok(Report::ok(text, tree))
        }
        Command::Run { file, seed, fuel } => {
            let c = config(file)?;
            let (outcome, steps) = sample_run(&c, *seed, *fuel);
            let (status, at) = match outcome {
                RunOutcome::Terminated(c) => ("value", c),
                RunOutcome::StuckAt(c) => ("stuck", c),
                RunOutcome::FuelExhausted(c) => ("out of fuel", c),
            };
            Ok(Report::ok(
                format!("{status} after {steps} steps: {at}\n"),
                json!({ "status": status, "steps": steps, "config": at.to_string() }),
            ))
        }
        Command::Prob {
            file,
            exact,
            iters,
            budget,
        } => {
            let c = config(file)?;
            let n = nodes(budget, &effort);
            if let Some(k) = iters {
                let p = phi_lower(&c, *k, n);
                return Ok(Report::ok(
                    format!("{p}\t~ {}\n", p.to_decimal(12)),
                    json!({ "iterations": k, "lower": rat(&p) }),
                ));
            }
            if *exact {
                let g = build_chain(&c, n);
                let Ok(v) = solve_exact(&g) else {
                    return fail(format!("chain not closed within {n} nodes; rerun without --exact for bounds"));
                };
                let p = &v[0];
                return Ok(Report::ok(format!("{p}\n"), json!({ "lower": rat(p), "upper": rat(p), "exact": true })));
            }
            let b = prob_bounds(&c, n);
            let text = if b.exact {
                format!("{}\n", b.lower)
            } else {
                format!(
                    "[{}, {}]\t~ [{}, {}] after {} nodes\n",
                    b.lower,
                    b.upper,
                    b.lower.to_decimal(9),
                    b.upper.to_decimal(9),
                    b.nodes
                )
            };
            Ok(Report::ok(
                text,
                json!({ "lower": rat(&b.lower), "upper": rat(&b.upper), "exact": b.exact }),
            ))
        }
        Command::Strat { file, k } => {
            let c = config(file)?;
            let k = k.unwrap_or(effort.iterations);
            let p = Stratified::new(effort.cuff).psi(&c, k)?;
            Ok(Report::ok(
                format!("{p}\t~ {}\n", p.to_decimal(12)),
                json!({ "k": k, "lower": rat(&p) }),
            ))
        }
        Command::Dist {
            file,
            exact,
            fuel,
            budget,
        } => {
            let c = config(file)?;
            let n = nodes(budget, &effort);
            let (d, is_exact) = match fuel {
                Some(k) => (xi_distribution(&c, *k, n), false),
                None => {
                    let g = build_chain(&c, n);
                    match exact_distribution(&g) {
                        Ok(d) => (d, true),
                        Err(_) if *exact => return fail(format!("chain not closed within {n} nodes")),
                        // Lower bound on every value.
                        Err(_) => (xi_distribution(&c, effort.iterations, n), false),
                    }
                }
            };
            let mut text = dist_text(&d);
            if !is_exact {
                text.push_str("(lower bound)\n");
            }
            Ok(Report::ok(
                text,
                json!({ "distribution": dist_json(&d), "mass": rat(&d.mass()), "exact": is_exact }),
            ))
        }
        Command::Red { file } => {
            let c = config(file)?;
            let paths = red_set(&c, effort.cuff)?;
            let mut text = String::new();
            let mut arr = Vec::new();
            for p in &paths {
                text.push_str(&format!(
                    "{}\t{}\t{} steps\t{}\n",
                    p.weight,
                    kind_name(p.kind),
                    p.configs.len() - 1,
                    p.last()
                ));
                arr.push(json!({
                    "weight": rat(&p.weight),
                    "kind": kind_name(p.kind),
                    "length": p.configs.len() - 1,
                    "target": p.last().to_string(),
                }));
            }
            if paths.is_empty() {
                text.push_str("empty\n");
            }
            Ok(Report::ok(text, json!({ "paths": arr })))
        }
        Command::Graph { file, dot, budget } => {
            let c = config(file)?;
            let g = build_chain(&c, nodes(budget, &effort));
            fs::write(dot, g.to_dot()).map_err(|e| CliError(format!("{}: {e}", dot.display())))?;
            Ok(Report::ok(
                format!("{} nodes, {} edges, complete: {}\n", g.len(), g.edge_count(), g.complete()),
                json!({ "nodes": g.len(), "edges": g.edge_count(), "complete": g.complete(), "dot": dot.display().to_string() }),
            ))
        }
        Command::Ciu {
            lhs,
            rhs,
            ty,
            depth,
            budget,
            both,
        } => {
            let (l, r) = (load(lhs)?, load(rhs)?);
            let ty: Type = parse_type(ty)?;
            let opts = EquivOptions {
                depth: depth.unwrap_or(EquivOptions::default().depth),
                nodes: nodes(budget, &effort),
                ..EquivOptions::default()
            };
            let mut verdicts = vec![("lhs <= rhs", ciu_approx(&l, &r, &ty, &opts)?)];
            if *both {
                verdicts.push(("rhs <= lhs", ciu_approx(&r, &l, &ty, &opts)?));
            }
            let refuted = verdicts.iter().any(|(_, v)| v.is_refutation());
            let mut text = String::new();
            let mut arr = Vec::new();
            for (dir, v) in &verdicts {
                text.push_str(&format!("{dir}: {}\n", verdict_text(v)));
                let mut j = verdict_json(v);
                j["direction"] = json!(dir);
                arr.push(j);
            }
            Ok(Report {
                text,
                result: json!({ "type": pretty_type(&ty), "verdicts": arr }),
                code: if refuted { EXIT_REFUTED } else { EXIT_OK },
            })
        }
        Command::Corpus { action } => corpus_cmd(action),
    }
}

fn step_tree(c: &Config, depth: usize, indent: usize, weight: &Prob, text: &mut String) -> Value {
    let pad = "  ".repeat(indent);
    let step = c.step();
    let status = match &step {
        Step::Value => "value",
        Step::Stuck => "stuck",
        Step::Steps(_) => "live",
    };
    text.push_str(&format!("{pad}{weight}\t{c}"));
    if status != "live" {
        text.push_str(&format!("\t[{status}]"));
    }
    text.push('\n');
    let mut node = json!({ "config": c.to_string(), "weight": rat(weight), "status": status });
    if let (Step::Steps(succ), true) = (step, depth > 0) {
        let children: Vec<Value> = succ
            .iter()
            .map(|s| {
                let mut child = step_tree(&s.target, depth - 1, indent + 1, &s.weight, text);
                child["kind"] = json!(kind_name(s.kind));
                child
            })
            .collect();
        node["successors"] = Value::Array(children);
    }
    node
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Holds { contexts, depth, nodes } => {
            format!("holds on {contexts} contexts (depth {depth}, {nodes} nodes each)")
        }
        Verdict::Distinguished { context, lower, upper } => format!(
            "distinguished by {}\n  left  >= {lower} ~ {}\n  right <= {upper} ~ {}",
            pretty_context(context),
            lower.to_decimal(9),
            upper.to_decimal(9)
        ),
        Verdict::Inconclusive { context, left, right } => format!(
            "inconclusive at {}: left in [{}, {}], right in [{}, {}]",
            pretty_context(context),
            left.lower,
            left.upper,
            right.lower,
            right.upper
        ),
        Verdict::Differ {
            context,
            value,
            left,
            right,
        } => format!(
            "differ under {} at {}: {left} vs {right}",
            pretty_context(context),
            pretty(value)
        ),
    }
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Holds { contexts, depth, nodes } => {
            json!({ "verdict": "holds", "contexts": contexts, "depth": depth, "nodes": nodes })
        }
        Verdict::Distinguished { context, lower, upper } => json!({
            "verdict": "distinguished",
            "context": pretty_context(context),
            "lower": rat(lower),
            "upper": rat(upper),
        }),
        Verdict::Inconclusive { context, left, right } => json!({
            "verdict": "inconclusive",
            "context": pretty_context(context),
            "left": { "lower": rat(&left.lower), "upper": rat(&left.upper) },
            "right": { "lower": rat(&right.lower), "upper": rat(&right.upper) },
        }),
        Verdict::Differ {
            context,
            value,
            left,
            right,
        } => json!({
            "verdict": "differ",
            "context": pretty_context(context),
            "value": pretty(value),
            "left": rat(left),
            "right": rat(right),
        }),
    }
}

fn corpus_cmd(action: &CorpusAction) -> Result<Report, CliError> {
    match action {
        CorpusAction::List => {
            let mut text = String::new();
            let mut arr = Vec::new();
            for p in corpus::catalogue() {
                let ty = pretty_type(&p.ty);
                text.push_str(&format!("{}\t{ty}\n", p.label()));
                arr.push(json!({ "name": p.name, "label": p.label(), "type": ty }));
            }
            text.push_str("parameterised: er K N, tr K N, vn K N, er-seq Q1 Q2 ...\n");
            Ok(Report::ok(text, json!({ "programs": arr })))
        }
        CorpusAction::Emit { name, params, out } => {
            let p = corpus::lookup(name, params)?;
            let src = format!("# {} : {}\n{}\n", p.label(), pretty_type(&p.ty), pretty(&p.term));
            let result = json!({ "label": p.label(), "type": pretty_type(&p.ty), "term": pretty(&p.term) });
            match out {
                Some(path) => {
                    fs::write(path, &src).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
                    Ok(Report::ok(format!("wrote {}\n", path.display()), result))
                }
                None => Ok(Report::ok(src, result)),
            }
        }
    }
}
