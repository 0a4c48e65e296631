//! Row-by-row automaton pictures of a bounded machine run, and mechanical
//! checks that they match what saturation produces.
//!
//! The picture for `k` steps from input `(m, n)` stacks `k+1` rows. Row `i`
//! holds two horizontal words: the left counter (`z1` then `a1`-edges, padded
//! to the maximal value the counter ever takes) and the right counter
//! (mirrored, `a2`-edges then `z2` pointing back toward the final root), tied
//! together by a state edge placed at the head positions of configuration
//! `i`. Consecutive rows are connected by parallel `t1`/`t2` edges in every
//! column. Row 0 carries the initial and final roots, so the input word reads
//! from the initial root to the final one along row 0.

use crate::alphabet::{Alphabet, Letter, SLetter};
use crate::automaton::{InverseAutomaton, VertexId};
use crate::encode::EncodedAmalgam;
use crate::machine::{Config, CounterMachine, RunVerdict};
use crate::presentation::FamilyTag;
use crate::stephen::{self, Budget, ClosureStatus, ZeroCheckError, ZeroVerdict};
use std::fmt::Write as _;

/// Which lattice point a grid vertex is: left part `C(row, column)` or right
/// part `D(row, column)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridCoord {
    C(usize, usize),
    D(usize, usize),
}

/// A built grid with its coordinate system and the underlying run.
#[derive(Clone, Debug)]
pub struct GridAutomaton {
    pub automaton: InverseAutomaton,
    /// row count, one more than the number of steps taken
    pub rows: usize,
    /// left columns: maximal first counter value plus 2
    pub wc: usize,
    /// right columns: maximal second counter value plus 2
    pub wd: usize,
    /// machine configuration of each row
    pub configs: Vec<Config>,
}

impl GridAutomaton {
    pub fn c(&self, i: usize, j: usize) -> VertexId {
        debug_assert!(i < self.rows && j < self.wc);
        (i * (self.wc + self.wd) + j) as VertexId
    }

    pub fn d(&self, i: usize, l: usize) -> VertexId {
        debug_assert!(i < self.rows && l < self.wd);
        (i * (self.wc + self.wd) + self.wc + l) as VertexId
    }

    pub fn locate(&self, v: VertexId) -> GridCoord {
        let stride = self.wc + self.wd;
        let (row, off) = (v as usize / stride, v as usize % stride);
        if off < self.wc {
            GridCoord::C(row, off)
        } else {
            GridCoord::D(row, off - self.wc)
        }
    }

    /// Steps taken by the underlying run.
    pub fn k(&self) -> usize {
        self.rows - 1
    }

    /// DOT rendering with one rank per row, so layout engines draw the grid
    /// as built.
    pub fn export_dot(&self, alphabet: &Alphabet) -> String {
        let mut out = String::from("digraph grid {\n  rankdir=BT;\n  node [shape=circle];\n");
        let name = |v: VertexId| match self.locate(v) {
            GridCoord::C(i, j) => format!("c_{i}_{j}"),
            GridCoord::D(i, l) => format!("d_{i}_{l}"),
        };
        let _ = writeln!(out, "  {} [shape=doublecircle];", name(self.automaton.initial()));
        let _ = writeln!(out, "  {} [style=filled];", name(self.automaton.final_vertex()));
        for i in 0..self.rows {
            let mut line = String::from("  { rank=same;");
            for j in 0..self.wc {
                let _ = write!(line, " {};", name(self.c(i, j)));
            }
            for l in 0..self.wd {
                let _ = write!(line, " {};", name(self.d(i, l)));
            }
            out.push_str(&line);
            out.push_str(" }\n");
        }
        for v in 0..self.automaton.vertex_count() as VertexId {
            for (x, q) in self.automaton.edges_from(v) {
                if x.is_positive() {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [label=\"{}\"];",
                        name(v),
                        name(q),
                        alphabet.name(x.letter())
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// A grid plus whether the run supplied fewer rows than requested.
#[derive(Clone, Debug)]
pub struct GridOutcome {
    pub grid: GridAutomaton,
    /// `Some(j)`: the run stopped after step `j < k`, so the grid has only
    /// `j+1` rows
    pub stopped_at: Option<usize>,
}

/// Builds the `k`-step grid for input `(m, n)`. When the run stops earlier
/// (accepts or gets stuck), the grid for the steps actually taken is returned
/// with `stopped_at` set.
pub fn build_grid(
    machine: &CounterMachine,
    am: &EncodedAmalgam,
    m: u64,
    n: u64,
    k: usize,
) -> GridOutcome {
    assert_eq!(machine.states.len(), am.sides[0].states.len(), "amalgam built from another machine");
    let run = machine.run(&[m, n], k);
    match run.verdict {
        RunVerdict::Nondet { .. } => unreachable!("amalgam encoding requires a deterministic machine"),
        RunVerdict::Accepted { .. } | RunVerdict::Halted { .. } | RunVerdict::StepLimit => {}
    }
    let configs = run.trace;
    let rows = configs.len();
    let stopped_at = if rows < k + 1 { Some(rows - 1) } else { None };

    let mp = configs.iter().map(|c| c.counters[0]).max().unwrap() as usize;
    let np = configs.iter().map(|c| c.counters[1]).max().unwrap() as usize;
    let (wc, wd) = (mp + 2, np + 2);
    let grid = GridAutomaton {
        automaton: InverseAutomaton::complete_singleton(0),
        rows,
        wc,
        wd,
        configs,
    };

    let s1 = &am.sides[0];
    let s2 = &am.sides[1];
    let mut edges: Vec<(VertexId, SLetter, VertexId)> = Vec::new();
    for i in 0..rows {
        edges.push((grid.c(i, 0), SLetter::pos(s1.z), grid.c(i, 1)));
        for j in 1..=mp {
            edges.push((grid.c(i, j), SLetter::pos(s1.a), grid.c(i, j + 1)));
        }
        edges.push((grid.d(i, 1), SLetter::pos(s2.z), grid.d(i, 0)));
        for l in 1..=np {
            edges.push((grid.d(i, l + 1), SLetter::pos(s2.a), grid.d(i, l)));
        }
        let cfg = &grid.configs[i];
        let (cm, cn) = (cfg.counters[0] as usize, cfg.counters[1] as usize);
        edges.push((grid.c(i, cm + 1), SLetter::pos(s1.states[cfg.state]), grid.d(i, cn + 1)));
        edges.push((grid.c(i, cm + 1), SLetter::pos(s2.states[cfg.state]), grid.d(i, cn + 1)));
        if i > 0 {
            for j in 0..wc {
                edges.push((grid.c(i - 1, j), SLetter::pos(s1.t), grid.c(i, j)));
                edges.push((grid.c(i - 1, j), SLetter::pos(s2.t), grid.c(i, j)));
            }
            for l in 0..wd {
                edges.push((grid.d(i - 1, l), SLetter::pos(s1.t), grid.d(i, l)));
                edges.push((grid.d(i - 1, l), SLetter::pos(s2.t), grid.d(i, l)));
            }
        }
    }
    let automaton = InverseAutomaton::from_edges(
        am.presentation.alphabet.len(),
        rows * (wc + wd),
        &edges,
        grid.c(0, 0),
        grid.d(0, 0),
    )
    .expect("grid edges are deterministic by construction");
    GridOutcome { grid: GridAutomaton { automaton, ..grid }, stopped_at }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepCheck {
    Verified,
    Failed(String),
}

/// Checks one saturation step against the grid: on the `k-1`-row grid exactly
/// one instruction relation fires, it is the relation of the machine's next
/// step, and applying it plus the commuting and identification relations
/// reproduces the `k`-row grid.
pub fn verify_inductive_step(
    machine: &CounterMachine,
    am: &EncodedAmalgam,
    m: u64,
    n: u64,
    k: usize,
    budget: &Budget,
) -> StepCheck {
    if k == 0 {
        return StepCheck::Failed("step check needs k >= 1".into());
    }
    let prev = build_grid(machine, am, m, n, k - 1);
    if prev.stopped_at.is_some() {
        return StepCheck::Failed(format!("run stops before step {}", k - 1));
    }
    let target = build_grid(machine, am, m, n, k);
    if target.stopped_at.is_some() {
        return StepCheck::Failed(format!("run stops before step {k}"));
    }

    let instruction_rels = am
        .presentation
        .indices_with_tags(&[FamilyTag::Test, FamilyTag::Writing, FamilyTag::Erasing]);
    let instances =
        stephen::detect_instances(&am.presentation, Some(&instruction_rels), &prev.grid.automaton);
    if instances.len() != 1 {
        return StepCheck::Failed(format!(
            "expected exactly one instruction instance on the {}-row grid, found {}",
            k,
            instances.len()
        ));
    }
    let inst = instances[0];
    if inst.reversed {
        return StepCheck::Failed("instance fired backwards: rhs traced without lhs".into());
    }
    let top = &prev.grid.configs[k - 1];
    let applicable = machine.applicable_instructions(top);
    if applicable.len() != 1 {
        return StepCheck::Failed(format!(
            "machine is not deterministic at row {}: {:?}",
            k - 1,
            applicable
        ));
    }
    if am.origins[inst.relation] != Some(applicable[0]) {
        return StepCheck::Failed(format!(
            "instance came from relation {} of instruction {:?}, expected instruction {}",
            inst.relation, am.origins[inst.relation], applicable[0]
        ));
    }

    let applied = stephen::apply_instances(&am.presentation, &prev.grid.automaton, &instances);
    let glue = am
        .presentation
        .indices_with_tags(&[FamilyTag::Commuting, FamilyTag::Amalgam]);
    let closed = stephen::close_automaton(&am.presentation, Some(&glue), applied, budget);
    if closed.status != ClosureStatus::Closed {
        return StepCheck::Failed(format!(
            "commuting/identification saturation did not settle within {} rounds",
            closed.rounds_used
        ));
    }
    if !closed.automaton.iso(&target.grid.automaton) {
        return StepCheck::Failed(format!(
            "saturation result has {} vertices, grid has {}; not isomorphic",
            closed.automaton.vertex_count(),
            target.grid.automaton.vertex_count()
        ));
    }
    StepCheck::Verified
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Agreement {
    Agrees,
    Disagrees(String),
    Unresolved(String),
}

/// Cross-checks the machine run, the zero test over the amalgam, and the grid
/// construction on one input.
///
/// An accepted run must make the input word vanish. A stuck run must leave it
/// nonzero, with the closure isomorphic to the final grid. A run that is
/// still going at the step bound must not be contradicted by a resolved zero
/// answer, and the grid step checks must hold as far as sampled.
pub fn closure_agrees(
    machine: &CounterMachine,
    am: &EncodedAmalgam,
    m: u64,
    n: u64,
    max_steps: usize,
    budget: &Budget,
) -> Result<Agreement, ZeroCheckError> {
    let w = am.word_mn(machine, m, n);
    let zero = stephen::is_zero(&am.presentation, am.zero(), w.letters(), budget)?;
    let run = machine.run(&[m, n], max_steps);
    let agreement = match run.verdict {
        RunVerdict::Accepted { steps } => match zero.verdict {
            ZeroVerdict::Zero => Agreement::Agrees,
            ZeroVerdict::NotZero => Agreement::Disagrees(format!(
                "accepted in {steps} steps but the word is provably nonzero"
            )),
            ZeroVerdict::Unknown => {
                Agreement::Unresolved("accepted but the zero test ran out of budget".into())
            }
        },
        RunVerdict::Halted { steps } => match zero.verdict {
            ZeroVerdict::Zero => Agreement::Disagrees(format!(
                "stuck after {steps} steps but the word vanishes"
            )),
            ZeroVerdict::NotZero => {
                let built = build_grid(machine, am, m, n, steps);
                if built.grid.automaton.iso(&zero.closure.automaton) {
                    Agreement::Agrees
                } else {
                    Agreement::Disagrees(format!(
                        "closure has {} vertices but the {}-row grid has {}",
                        zero.closure.automaton.vertex_count(),
                        steps + 1,
                        built.grid.automaton.vertex_count()
                    ))
                }
            }
            ZeroVerdict::Unknown => {
                Agreement::Unresolved("stuck run but the zero test ran out of budget".into())
            }
        },
        RunVerdict::StepLimit => match zero.verdict {
            ZeroVerdict::Zero => Agreement::Disagrees(format!(
                "zero test vanishes but the run is still going after {max_steps} steps"
            )),
            ZeroVerdict::NotZero | ZeroVerdict::Unknown => {
                let mut ks = vec![1, max_steps / 2, max_steps];
                ks.retain(|&k| k >= 1);
                ks.dedup();
                for k in ks {
                    if let StepCheck::Failed(why) = verify_inductive_step(machine, am, m, n, k, budget)
                    {
                        return Ok(Agreement::Disagrees(format!("grid step {k}: {why}")));
                    }
                }
                if zero.verdict == ZeroVerdict::NotZero {
                    Agreement::Agrees
                } else {
                    Agreement::Unresolved(format!(
                        "undecided: step limit {max_steps} and zero-test budget both exhausted"
                    ))
                }
            }
        },
        RunVerdict::Nondet { at } => {
            Agreement::Unresolved(format!("machine is nondeterministic at step {at}"))
        }
    };
    Ok(agreement)
}

/// Every row move climbs exactly one row: the heights from [`check_potential`]
/// over both `t` letters, which exist on any grid.
pub fn row_potential(am: &EncodedAmalgam, grid: &GridAutomaton) -> Option<Vec<i64>> {
    let y: Vec<Letter> = vec![am.sides[0].t, am.sides[1].t];
    stephen::check_potential(&grid.automaton, &y)
}
