//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cayley::{build_ball, CayleyBall};
use crate::constants::{derive_paper_constants, desk_constants, ConstantLedger, Parameters, Rational};
use crate::digraph::{build_digraph, digraph_components, export_dot, spanning_data};
use crate::ends::{ends_of_pair, filtered_ends, BoundedSearchOracle, Filtered, FoldingOracle, GwpOracle};
use crate::error::{Error, Result};
use crate::input::{parse_input, InputFile};
use crate::presentation::{GroupPresentation, Word};
use crate::splittings::{crossings_search, split_decision, Conclusion, CrossingsResult, SplitInputs, SplitMode};
use crate::subgroup::SubgroupContext;
use crate::annulus::build_cover;

pub const SCHEMA_VERSION: u32 = 1;

const VERTEX_BUDGET: usize = 1 << 25;

#[derive(Parser, Debug)]
#[command(name = "hypsplit", version, about = "Ends and splittings of quasiconvex subgroups of hyperbolic groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Print the constant ledger.
    Constants,
    /// e(G,H) over a ladder of (r,K,R) triples.
    Ends,
    /// The adjacency digraph of the cover at the identity.
    Digraph,
    /// Growing-cover semi-decision of finite filtered ends.
    Filtered,
    /// Search for crossings of H-almost invariant sets.
    Crossings,
    /// Two-track splitting decision.
    Split,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Ends => "ends",
            Command::Digraph => "digraph",
            Command::Filtered => "filtered",
            Command::Crossings => "crossings",
            Command::Split => "split",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Desk,
    Paper,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleArg {
    Folding,
    Bounded,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// Input file.
    #[arg(global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long = "r", global = true)]
    pub r: Option<u32>,
    #[arg(long = "K", global = true)]
    pub k: Option<u32>,
    #[arg(long = "R", global = true)]
    pub big_r: Option<u32>,
    #[arg(long, global = true)]
    pub ball_radius: Option<usize>,
    /// Steps: ladder rungs (ends), generations (filtered), elements g
    /// (crossings), slices (split), path steps (digraph).
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[arg(long, global = true)]
    pub pad: Option<u32>,
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the digraph in DOT format here.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub oracle: Option<OracleArg>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// Exit codes.
pub mod exit {
    pub const DECIDED: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const UNKNOWN: i32 = 3;
    pub const RADIUS: i32 = 4;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InsufficientRadius { .. } => exit::RADIUS,
        Error::BudgetExhausted(_) | Error::CombinatorialBlowup(_) | Error::StrategyNotVerified(_) => exit::UNKNOWN,
        _ => exit::INPUT,
    }
}

struct Outcome {
    code: i32,
    report: Value,
    text: String,
}

struct Setup {
    input: InputFile,
    presentation: Arc<GroupPresentation>,
    ledger: ConstantLedger,
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn setup(opts: &Options) -> Result<Setup> {
    let path = opts.input.as_ref().ok_or_else(|| Error::Domain("missing input file".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let input = parse_input(&text)?;
    let s = &input.settings;
    let params = Parameters {
        delta: s.delta.map_or(0, i64::from),
        q: s.q.map_or(0, i64::from),
        lambda: s.lambda.unwrap_or(Rational::from_integer(1)),
        epsilon: s.epsilon.unwrap_or(Rational::from_integer(0)),
        n: s.n.map_or(2, i64::from),
        a: s.a.unwrap_or(Rational::from_integer(2)),
        k1: s.k1.unwrap_or(Rational::from_integer(1)),
        k2: s.k2.unwrap_or(Rational::from_integer(1)),
        eta: s.eta.map(i64::from),
    };
    let mode = match (opts.mode, s.mode.as_deref()) {
        (Some(m), _) => m,
        (None, Some("paper")) => ModeArg::Paper,
        (None, Some("desk") | None) => ModeArg::Desk,
        (None, Some(other)) => return Err(Error::Domain(format!("unknown mode {other:?}"))),
    };
    let ledger = match mode {
        ModeArg::Paper => derive_paper_constants(&params)?,
        ModeArg::Desk => {
            let r = opts.r.or(s.r).unwrap_or(1);
            let k = opts.k.or(s.k).unwrap_or(r.max(1));
            let big_r = opts.big_r.or(s.big_r).unwrap_or(k + 1);
            desk_constants(&params, r.into(), k.into(), big_r.into())?
        }
    };
    let presentation = Arc::new(input.presentation.clone());
    Ok(Setup {
        input,
        presentation,
        ledger,
    })
}

fn subgroup(st: &Setup) -> Result<SubgroupContext> {
    let gens = st
        .input
        .subgroup
        .clone()
        .ok_or_else(|| Error::Domain("the input has no [subgroup] section".into()))?;
    let s = &st.input.settings;
    SubgroupContext::new(
        Arc::clone(&st.presentation),
        gens,
        s.q.map_or(0, i64::from),
        s.lambda.unwrap_or(Rational::from_integer(1)),
        s.epsilon.unwrap_or(Rational::from_integer(0)),
    )
}

fn ball(st: &Setup, opts: &Options, needed: usize) -> Result<CayleyBall> {
    let radius = opts.ball_radius.or(st.input.settings.ball_radius).unwrap_or(needed);
    if radius < needed {
        return Err(Error::radius("ball", needed, radius));
    }
    let b = build_ball(Arc::clone(&st.presentation), radius, VERTEX_BUDGET)?;
    if !b.is_complete() {
        return Err(Error::radius("ball within the vertex budget", radius, b.radius()));
    }
    Ok(b)
}

fn oracle(st: &Setup, opts: &Options) -> Result<Box<dyn GwpOracle>> {
    let choice = match (opts.oracle, st.input.settings.oracle.as_deref()) {
        (Some(o), _) => o,
        (None, Some("bounded")) => OracleArg::Bounded,
        (None, Some("folding") | None) => OracleArg::Folding,
        (None, Some(other)) => return Err(Error::Domain(format!("unknown oracle {other:?}"))),
    };
    Ok(match choice {
        OracleArg::Folding => Box::new(FoldingOracle),
        OracleArg::Bounded => Box::new(BoundedSearchOracle::default()),
    })
}

fn words(p: &GroupPresentation, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| p.format(w)).collect()
}

fn cmd_constants(st: &Setup) -> Result<Outcome> {
    let l = &st.ledger;
    Ok(Outcome {
        code: exit::DECIDED,
        report: json!({}),
        text: format!("r = {}\nK = {}\nR = {}\nC = {}\nM = {}\n", l.r, l.k, l.big_r, l.c, l.m),
    })
}

fn cmd_ends(st: &Setup, opts: &Options) -> Result<Outcome> {
    let ctx = subgroup(st)?;
    let c = &st.ledger;
    let mut ladder: Vec<(usize, usize, usize)> = match &st.input.settings.ladder {
        Some(l) => l.iter().map(|&(r, k, big_r)| (r as usize, k as usize, big_r as usize)).collect(),
        None => crate::ends::default_ladder(c),
    };
    if let Some(n) = opts.budget {
        ladder.truncate(n.max(1));
    }
    let top = ladder.iter().map(|t| t.2).max().unwrap_or(0).max(c.big_r());
    let b = ball(st, opts, 2 * ctx.l() + top)?;
    let mut report = ends_of_pair(&b, &ctx, c, &ladder)?;
    let oracle = oracle(st, opts)?;
    report.filtered = match filtered_ends(&b, &ctx, c, 4, oracle.as_ref()) {
        Ok(f) => f.filtered,
        Err(Error::InsufficientRadius { .. }) => Filtered::BudgetExhausted,
        Err(e) => return Err(e),
    };
    let mut text = String::new();
    for rung in &report.stabilization {
        text.push_str(&format!("(r,K,R) = ({},{},{}): e_pair {}\n", rung.r, rung.k, rung.big_r, rung.e_pair));
    }
    match report.e_pair {
        Some(e) => text.push_str(&format!("e(G,H) = {e} (stabilized)\n")),
        None => text.push_str("e(G,H): not stabilized\n"),
    }
    text.push_str(&format!("finite index: {}\nfiltered: {:?}\n", report.finite_index, report.filtered));
    Ok(Outcome {
        code: if report.stabilized { exit::DECIDED } else { exit::UNKNOWN },
        report: serde_json::to_value(&report).expect("serializable"),
        text,
    })
}

fn cmd_digraph(st: &Setup, opts: &Options) -> Result<Outcome> {
    let ctx = subgroup(st)?;
    let c = &st.ledger;
    let b = ball(st, opts, 2 * ctx.l() + c.big_r())?;
    let f = build_cover(&b, &ctx, c, 0)?;
    let d = build_digraph(&f, &ctx, &b)?;
    let dot = export_dot(&d, &st.presentation);
    if let Some(path) = &opts.dot {
        std::fs::write(path, &dot).map_err(|e| io_error(path, e))?;
    }
    let comps = digraph_components(&d);
    let mut seen = Vec::new();
    let mut summaries = Vec::new();
    for v in 0..d.vertex_count() {
        if seen.contains(&comps[v]) {
            continue;
        }
        seen.push(comps[v]);
        let data = spanning_data(&d, v);
        let k: Vec<String> = data.k_gens.iter().map(|y| st.presentation.format(&ctx.element(y.clone()).word())).collect();
        summaries.push(json!({ "base": v, "k_gens": k }));
    }
    let report = json!({
        "vertices": d.vertex_count(),
        "marked": d.marks.iter().filter(|&&m| m).count(),
        "labels": d.labels.iter().map(|h| st.presentation.format(&h.word())).collect::<Vec<_>>(),
        "edges": d.edges.len(),
        "components": seen.len(),
        "cover": f.summary(),
        "summaries": summaries,
    });
    let text = if opts.dot.is_some() {
        format!("{} vertices, {} edges, {} components\n", d.vertex_count(), d.edges.len(), seen.len())
    } else {
        dot
    };
    Ok(Outcome {
        code: exit::DECIDED,
        report,
        text,
    })
}

fn cmd_filtered(st: &Setup, opts: &Options) -> Result<Outcome> {
    let ctx = subgroup(st)?;
    let c = &st.ledger;
    let b = ball(st, opts, 2 * ctx.l() + c.big_r() + ctx.l())?;
    let oracle = oracle(st, opts)?;
    let report = filtered_ends(&b, &ctx, c, opts.budget.unwrap_or(4), oracle.as_ref())?;
    let code = match report.filtered {
        Filtered::Finite(_) if report.exact => exit::DECIDED,
        _ => exit::UNKNOWN,
    };
    Ok(Outcome {
        code,
        text: format!("filtered ends: {:?} (exact: {})\n", report.filtered, report.exact),
        report: serde_json::to_value(&report).expect("serializable"),
    })
}

fn pad(st: &Setup, opts: &Options) -> usize {
    opts.pad.or(st.input.settings.pad).unwrap_or(1) as usize
}

fn cmd_crossings(st: &Setup, opts: &Options) -> Result<Outcome> {
    let ctx = subgroup(st)?;
    let c = &st.ledger;
    let b = ball(st, opts, 2 * ctx.l() + c.big_r())?;
    let scan = b.radius().saturating_sub(1).max(2 * ctx.l() + c.big_r());
    let report = crossings_search(&b, &ctx, c, scan.min(b.radius()), 2, pad(st, opts), opts.budget.unwrap_or(64))?;
    let code = match report.result {
        CrossingsResult::BudgetExhausted => exit::UNKNOWN,
        _ => exit::DECIDED,
    };
    let certified = report.progress.iter().filter(|p| p.certificate.is_some()).count();
    Ok(Outcome {
        code,
        text: format!(
            "{:?}: {certified} of {} classes crossed after {} elements\n",
            report.result,
            report.progress.len(),
            report.elements_tried
        ),
        report: serde_json::to_value(&report).expect("serializable"),
    })
}

fn cmd_split(st: &Setup, opts: &Options) -> Result<Outcome> {
    let ctx = subgroup(st)?;
    let c = &st.ledger;
    let s = &st.input.settings;
    let mode: SplitMode = s
        .lonely
        .as_deref()
        .ok_or_else(|| Error::Domain("split needs 'lonely' in [constants]: finite-filtered, lonely or not-lonely".into()))?
        .parse()?;
    let p = &st.presentation;
    let comm_element = s.comm_element.as_deref().map(|w| p.word(w)).transpose()?;
    let finite_index_subgroup = s
        .finite_index_subgroup
        .as_ref()
        .map(|ws| ws.iter().map(|w| p.word(w)).collect::<Result<Vec<_>>>())
        .transpose()?;
    let b = ball(st, opts, 2 * ctx.l() + c.big_r() + ctx.l())?;
    let inputs = SplitInputs {
        mode,
        candidates: st.input.candidates.clone(),
        comm_element,
        finite_index_subgroup,
        pad: pad(st, opts),
        scan_radius: b.radius() - 1,
        g_radius: 2,
        budget: opts.budget.unwrap_or(8),
        slice: 8,
    };
    let oracle = oracle(st, opts)?;
    let report = split_decision(&b, &ctx, c, &inputs, oracle.as_ref())?;
    let code = match report.conclusion {
        Conclusion::BudgetExhausted => exit::UNKNOWN,
        _ => exit::DECIDED,
    };
    Ok(Outcome {
        code,
        text: format!("{:?} after {} slices\n", report.conclusion, report.slices),
        report: serde_json::to_value(&report).expect("serializable"),
    })
}

fn dispatch(cli: &Cli) -> Result<(Setup, Outcome)> {
    let st = setup(&cli.opts)?;
    let out = match cli.command {
        Command::Constants => cmd_constants(&st)?,
        Command::Ends => cmd_ends(&st, &cli.opts)?,
        Command::Digraph => cmd_digraph(&st, &cli.opts)?,
        Command::Filtered => cmd_filtered(&st, &cli.opts)?,
        Command::Crossings => cmd_crossings(&st, &cli.opts)?,
        Command::Split => cmd_split(&st, &cli.opts)?,
    };
    Ok((st, out))
}

fn envelope(cli: &Cli, st: &Setup, out: &Outcome) -> Value {
    let subgroup = st.input.subgroup.as_ref().map(|ws| words(&st.presentation, ws));
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": cli.command.name(),
        "group": st.presentation.name(),
        "subgroup": subgroup,
        "seed": cli.opts.seed,
        "exit_code": out.code,
        "constants": st.ledger,
        "report": out.report,
    })
}

/// Run one command, writing its output to `out`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::DECIDED };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let work = || dispatch(&cli);
    let result = match cli.opts.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(Error::Domain(e.to_string())),
        },
        None => work(),
    };
    match result {
        Ok((st, o)) => {
            let written = if cli.opts.json {
                let v = envelope(&cli, &st, &o);
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))
            } else {
                write!(out, "{}", o.text)
            };
            if written.is_err() {
                return exit::INPUT;
            }
            o.code
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.opts.json {
                let v = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": cli.command.name(),
                    "error": e.to_string(),
                    "exit_code": code,
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"));
            }
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}
