//! Command-line front end for the invsemi library: word trees, budgeted
//! closures, two-counter machines, their presentation encodings, run grids,
//! and machine-vs-encoding agreement sweeps.
//!
//! Exit codes: 0 for a definitive answer, 2 when a semidecision ran out of
//! budget (Unknown, StepLimit, Unresolved), 1 for errors and disagreements.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use invsemi::grid::{self, Agreement, StepCheck};
use invsemi::munn::munn_tree;
use invsemi::machine::{CounterMachine, RunVerdict};
use invsemi::stephen::{self, Budget, ClosureStatus, EqVerdict};
use invsemi::{
    batch, build_grid, encode_amalgam, encode_core, encode_tape, Presentation, Word,
};
use serde_json::json;
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "invsemi",
    version,
    about = "Workbench for inverse-semigroup presentations, two-counter machines, and their run-grid encodings",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the tree automaton of a word over a free alphabet
    Munn {
        /// presentation file; only its `letters` line is used
        alphabet: PathBuf,
        /// the word, e.g. "x y' x"
        word: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Decide whether two words are equal modulo a presentation
    Eq {
        presentation: PathBuf,
        u: String,
        v: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Saturate a word's automaton under a presentation within a budget
    Close {
        presentation: PathBuf,
        word: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Two-counter machine tools
    #[command(subcommand)]
    Cm(CmCmd),
    /// Encode a normalized two-counter machine as presentations
    Encode {
        machine: PathBuf,
        /// which presentation to print
        #[arg(long, value_enum, default_value_t = Part::Amalgam)]
        part: Part,
        /// print the input word for counters M N instead of a presentation
        #[arg(long, num_args = 2, value_names = ["M", "N"])]
        word_mn: Option<Vec<u64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build the run grid of a machine input; optionally verify one step
    Grid {
        machine: PathBuf,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        /// number of machine steps the grid unrolls
        #[arg(long)]
        k: usize,
        /// check that one saturation step turns grid k-1 into grid k
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare machine runs against the zero test on the encoding
    Agree {
        machine: PathBuf,
        /// a number or an end-exclusive range A..B
        #[arg(long, value_parser = parse_span)]
        m: Span,
        /// a number or an end-exclusive range A..B
        #[arg(long, value_parser = parse_span)]
        n: Span,
        /// machine step bound per input
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// worker threads for sweeps (default: one per core)
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand)]
enum CmCmd {
    /// Report the structural flags of a machine
    Check { machine: PathBuf },
    /// Run a machine on the given counters
    Run {
        machine: PathBuf,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rewrite a machine into the alternating, zero-move-free normal form
    Normalize {
        machine: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Part {
    Amalgam,
    Side1,
    Side2,
    Core,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Dot,
    JsonLines,
}

#[derive(Args)]
struct BudgetArgs {
    /// closure round budget
    #[arg(long, default_value_t = 1000)]
    max_rounds: usize,
    /// closure vertex budget
    #[arg(long, default_value_t = 100_000)]
    max_vertices: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget> {
        if self.max_rounds == 0 || self.max_vertices == 0 {
            bail!("budgets must be positive");
        }
        Ok(Budget { max_rounds: self.max_rounds, max_vertices: self.max_vertices })
    }
}

#[derive(Args)]
struct OutputArgs {
    /// write the report to a file instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl OutputArgs {
    fn emit(&self, content: &str) -> Result<()> {
        match &self.output {
            Some(p) => fs::write(p, content)
                .with_context(|| format!("cannot write {}", p.display()))?,
            None => print!("{content}"),
        }
        Ok(())
    }
}

/// A single value `7` or an end-exclusive range `0..4`.
#[derive(Clone)]
struct Span(Vec<u64>);

fn parse_span(s: &str) -> Result<Span, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
        if a >= b {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Span((a..b).collect()))
    } else {
        let v: u64 = s.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
        Ok(Span(vec![v]))
    }
}

fn read_presentation(path: &PathBuf) -> Result<Presentation> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Presentation::parse(&text).with_context(|| format!("{}: bad presentation", path.display()))
}

fn read_machine(path: &PathBuf) -> Result<CounterMachine> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    CounterMachine::parse(&text).with_context(|| format!("{}: bad machine", path.display()))
}

fn parse_word(pres: &Presentation, text: &str) -> Result<Word> {
    pres.alphabet.parse_word(text).with_context(|| format!("bad word {text:?}"))
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Munn { alphabet, word, out } => cmd_munn(&alphabet, &word, &out),
        Cmd::Eq { presentation, u, v, budget, out } => {
            cmd_eq(&presentation, &u, &v, &budget.budget()?, &out)
        }
        Cmd::Close { presentation, word, budget, out } => {
            cmd_close(&presentation, &word, &budget.budget()?, &out)
        }
        Cmd::Cm(sub) => match sub {
            CmCmd::Check { machine } => cmd_cm_check(&machine),
            CmCmd::Run { machine, m, n, steps, out } => cmd_cm_run(&machine, m, n, steps, &out),
            CmCmd::Normalize { machine, out } => cmd_cm_normalize(&machine, &out),
        },
        Cmd::Encode { machine, part, word_mn, out } => {
            cmd_encode(&machine, part, word_mn.as_deref(), &out)
        }
        Cmd::Grid { machine, m, n, k, verify, budget, out } => {
            cmd_grid(&machine, m, n, k, verify, &budget.budget()?, &out)
        }
        Cmd::Agree { machine, m, n, steps, jobs, budget, out } => {
            cmd_agree(&machine, &m.0, &n.0, steps, jobs, &budget.budget()?, &out)
        }
    }
}

fn cmd_munn(alphabet: &PathBuf, word: &str, out: &OutputArgs) -> Result<i32> {
    let pres = read_presentation(alphabet)?;
    let w = parse_word(&pres, word)?;
    let tree = munn_tree(pres.alphabet.len(), w.letters());
    let report = match out.format {
        Format::Dot => tree.export_dot(&pres.alphabet),
        Format::Text => format!(
            "word: {}\nvertices: {}\nedges: {}\nroots: {} -> {}\n",
            pres.alphabet.display_word(w.letters()),
            tree.vertex_count(),
            tree.positive_edge_count(),
            tree.initial(),
            tree.final_vertex()
        ),
        Format::JsonLines => format!(
            "{}\n",
            json!({
                "word": pres.alphabet.display_word(w.letters()),
                "vertices": tree.vertex_count(),
                "edges": tree.positive_edge_count(),
                "initial": tree.initial(),
                "final": tree.final_vertex(),
            })
        ),
    };
    out.emit(&report)?;
    Ok(0)
}

fn cmd_eq(path: &PathBuf, u: &str, v: &str, budget: &Budget, out: &OutputArgs) -> Result<i32> {
    let pres = read_presentation(path)?;
    let u = parse_word(&pres, u)?;
    let v = parse_word(&pres, v)?;
    let verdict = stephen::eq(&pres, u.letters(), v.letters(), budget);
    let side = |w: &Word| {
        let c = stephen::close(&pres, w.letters(), budget);
        (c.status, c.rounds_used, c.automaton.vertex_count())
    };
    let (us, ur, uv) = side(&u);
    let (vs, vr, vv) = side(&v);
    let report = match out.format {
        Format::JsonLines => format!(
            "{}\n",
            json!({
                "verdict": format!("{verdict:?}"),
                "lhs": {"status": format!("{us:?}"), "rounds": ur, "vertices": uv},
                "rhs": {"status": format!("{vs:?}"), "rounds": vr, "vertices": vv},
            })
        ),
        _ => format!(
            "{verdict:?}\nlhs closure: {us:?} after {ur} rounds, {uv} vertices\nrhs closure: {vs:?} after {vr} rounds, {vv} vertices\n"
        ),
    };
    out.emit(&report)?;
    Ok(if verdict == EqVerdict::Unknown { 2 } else { 0 })
}

fn cmd_close(path: &PathBuf, word: &str, budget: &Budget, out: &OutputArgs) -> Result<i32> {
    let pres = read_presentation(path)?;
    let w = parse_word(&pres, word)?;
    let closed = stephen::close(&pres, w.letters(), budget);
    let report = match out.format {
        Format::Dot => closed.automaton.export_dot(&pres.alphabet),
        Format::Text => format!(
            "status: {:?}\nrounds: {}\nvertices: {}\nedges: {}\n",
            closed.status,
            closed.rounds_used,
            closed.automaton.vertex_count(),
            closed.automaton.positive_edge_count()
        ),
        Format::JsonLines => format!(
            "{}\n",
            json!({
                "status": format!("{:?}", closed.status),
                "rounds": closed.rounds_used,
                "vertices": closed.automaton.vertex_count(),
                "edges": closed.automaton.positive_edge_count(),
            })
        ),
    };
    out.emit(&report)?;
    Ok(if closed.status == ClosureStatus::Closed { 0 } else { 2 })
}

fn cmd_cm_check(path: &PathBuf) -> Result<i32> {
    let m = read_machine(path)?;
    let c = m.check();
    println!(
        "deterministic: {}\nreversible: {}\nalternating: {}\nzero-free: {}",
        c.deterministic, c.reversible, c.alternating, c.zero_free
    );
    Ok(0)
}

fn cmd_cm_run(path: &PathBuf, m: u64, n: u64, steps: usize, out: &OutputArgs) -> Result<i32> {
    let machine = read_machine(path)?;
    if machine.tapes != 2 {
        bail!("expected a two-tape machine, this one has {}", machine.tapes);
    }
    let outcome = machine.run(&[m, n], steps);
    let mut report = String::new();
    for (i, cfg) in outcome.trace.iter().enumerate() {
        match out.format {
            Format::JsonLines => report.push_str(&format!(
                "{}\n",
                json!({"step": i, "state": machine.states[cfg.state], "counters": cfg.counters})
            )),
            _ => report.push_str(&format!(
                "step {i}: {} {:?}\n",
                machine.states[cfg.state], cfg.counters
            )),
        }
    }
    match out.format {
        Format::JsonLines => {
            report.push_str(&format!("{}\n", json!({"verdict": format!("{:?}", outcome.verdict)})))
        }
        _ => report.push_str(&format!("verdict: {:?}\n", outcome.verdict)),
    }
    out.emit(&report)?;
    Ok(match outcome.verdict {
        RunVerdict::Accepted { .. } | RunVerdict::Halted { .. } => 0,
        RunVerdict::StepLimit => 2,
        RunVerdict::Nondet { .. } => 1,
    })
}

fn cmd_cm_normalize(path: &PathBuf, out: &OutputArgs) -> Result<i32> {
    let m = read_machine(path)?;
    let norm = m.normalize().context("normalization failed")?;
    out.emit(&norm.to_string())?;
    Ok(0)
}

fn cmd_encode(
    path: &PathBuf,
    part: Part,
    word_mn: Option<&[u64]>,
    out: &OutputArgs,
) -> Result<i32> {
    let m = read_machine(path)?;
    if let Some(mn) = word_mn {
        let am = encode_amalgam(&m)?;
        let w = am.word_mn(&m, mn[0], mn[1]);
        out.emit(&format!("{}\n", am.presentation.alphabet.display_word(w.letters())))?;
        return Ok(0);
    }
    let pres = match part {
        Part::Amalgam => encode_amalgam(&m)?.presentation,
        Part::Side1 => encode_tape(&m, 1)?.presentation,
        Part::Side2 => encode_tape(&m, 2)?.presentation,
        Part::Core => encode_core(&m)?.presentation,
    };
    out.emit(&pres.to_string())?;
    Ok(0)
}

fn cmd_grid(
    path: &PathBuf,
    m: u64,
    n: u64,
    k: usize,
    verify: bool,
    budget: &Budget,
    out: &OutputArgs,
) -> Result<i32> {
    let machine = read_machine(path)?;
    let am = encode_amalgam(&machine)?;
    let built = build_grid(&machine, &am, m, n, k);
    let g = &built.grid;
    let report = match out.format {
        Format::Dot => g.export_dot(&am.presentation.alphabet),
        Format::Text => format!(
            "rows: {}\ncolumns: {} + {}\nvertices: {}\nstopped early: {}\n",
            g.rows,
            g.wc,
            g.wd,
            g.automaton.vertex_count(),
            match built.stopped_at {
                Some(r) => format!("after row {r}"),
                None => "no".into(),
            }
        ),
        Format::JsonLines => format!(
            "{}\n",
            json!({
                "rows": g.rows,
                "wc": g.wc,
                "wd": g.wd,
                "vertices": g.automaton.vertex_count(),
                "stopped_at": built.stopped_at,
            })
        ),
    };
    out.emit(&report)?;
    if verify {
        match grid::verify_inductive_step(&machine, &am, m, n, k, budget) {
            StepCheck::Verified => {
                eprintln!("step {k}: verified");
                Ok(0)
            }
            StepCheck::Failed(why) => {
                eprintln!("step {k}: FAILED: {why}");
                Ok(1)
            }
        }
    } else {
        Ok(0)
    }
}

fn cmd_agree(
    path: &PathBuf,
    ms: &[u64],
    ns: &[u64],
    steps: usize,
    jobs: Option<usize>,
    budget: &Budget,
    out: &OutputArgs,
) -> Result<i32> {
    if let Some(j) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("cannot size the worker pool")?;
    }
    let machine = read_machine(path)?;
    let am = encode_amalgam(&machine)?;
    let inputs: Vec<(u64, u64)> =
        ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect();
    let results = batch::agree_sweep(&machine, &am, &inputs, steps, budget);
    let mut report = String::new();
    let (mut disagreed, mut unresolved) = (false, false);
    for ((m, n), r) in inputs.iter().zip(&results) {
        let (verdict, detail) = match r {
            Ok(Agreement::Agrees) => ("agree", String::new()),
            Ok(Agreement::Disagrees(why)) => {
                disagreed = true;
                ("DISAGREE", why.clone())
            }
            Ok(Agreement::Unresolved(why)) => {
                unresolved = true;
                ("unresolved", why.clone())
            }
            Err(e) => {
                disagreed = true;
                ("ERROR", e.to_string())
            }
        };
        match out.format {
            Format::JsonLines => report.push_str(&format!(
                "{}\n",
                json!({"m": m, "n": n, "verdict": verdict, "detail": detail})
            )),
            _ => {
                if detail.is_empty() {
                    report.push_str(&format!("({m}, {n}): {verdict}\n"));
                } else {
                    report.push_str(&format!("({m}, {n}): {verdict}: {detail}\n"));
                }
            }
        }
    }
    out.emit(&report)?;
    Ok(if disagreed {
        1
    } else if unresolved {
        2
    } else {
        0
    })
}
