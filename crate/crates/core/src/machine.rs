//! Two-counter machines with partial tests, and the normal form used by the
//! amalgam encoding.
//!
//! An instruction `(p, i, x, q)` moves from state `p` to `q` acting on tape
//! `i`: `a` passes iff the counter is positive, `b` iff it is zero, `+`
//! increments, `-` decrements (only applicable when positive), `0` does
//! nothing. Normalization rewrites a deterministic reversible machine into an
//! equivalent one that is alternating (consecutive instructions switch tapes)
//! and free of `0` actions, which the relation families of the encoding
//! require.
//!
//! ```text
//! states i p f
//! initial i
//! final f
//! tapes 2
//! ins i 1 + p
//! ins p 2 + f
//! ```

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Action {
    /// `a`: pass iff counter > 0
    TestPos,
    /// `b`: pass iff counter = 0
    TestZero,
    /// `+`
    Inc,
    /// `-`: applicable iff counter > 0
    Dec,
    /// `0`: no test, no change
    Stay,
}

impl Action {
    pub fn as_char(self) -> char {
        match self {
            Action::TestPos => 'a',
            Action::TestZero => 'b',
            Action::Inc => '+',
            Action::Dec => '-',
            Action::Stay => '0',
        }
    }

    pub fn from_char(c: char) -> Option<Action> {
        Some(match c {
            'a' => Action::TestPos,
            'b' => Action::TestZero,
            '+' => Action::Inc,
            '-' => Action::Dec,
            '0' => Action::Stay,
            _ => return None,
        })
    }

    pub fn is_test(self) -> bool {
        matches!(self, Action::TestPos | Action::TestZero)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Instruction {
    pub from: usize,
    /// 1-based tape index
    pub tape: u8,
    pub action: Action,
    pub to: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CounterMachine {
    pub states: Vec<String>,
    pub initial: usize,
    pub final_: usize,
    pub tapes: u8,
    pub instructions: Vec<Instruction>,
}

/// Syntactic well-formedness flags; all four must hold for the encoding.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MachineCheck {
    /// no two distinct instructions are simultaneously applicable
    pub deterministic: bool,
    /// no two distinct instructions can end a step in the same configuration
    pub reversible: bool,
    /// no instruction can follow another acting on the same tape
    pub alternating: bool,
    /// no `0` actions
    pub zero_free: bool,
}

impl MachineCheck {
    pub fn all(&self) -> bool {
        self.deterministic && self.reversible && self.alternating && self.zero_free
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub state: usize,
    pub counters: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunVerdict {
    /// reached the final state
    Accepted { steps: usize },
    /// no instruction applicable before reaching the final state
    Halted { steps: usize },
    /// step budget ran out
    StepLimit,
    /// several instructions applicable at step `at`
    Nondet { at: usize },
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub verdict: RunVerdict,
    /// configurations visited, starting with the initial one
    pub trace: Vec<Config>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimVerdict {
    Agree,
    Disagree,
    Unresolved,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("rewriting did not stabilize after {0} passes; machine is likely not reversible")]
    DidNotStabilize(usize),
    #[error("normalized machine failed its own checks: {0:?}")]
    PostCheckFailed(MachineCheck),
}

fn overlap(a: &Instruction, b: &Instruction, end_a: usize, end_b: usize) -> bool {
    end_a == end_b
        && (a.tape != b.tape
            || a.action == b.action
            || !a.action.is_test()
            || !b.action.is_test())
}

impl CounterMachine {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn check(&self) -> MachineCheck {
        let ins = &self.instructions;
        let mut deterministic = true;
        let mut reversible = true;
        let mut alternating = true;
        let mut zero_free = true;
        for (i, a) in ins.iter().enumerate() {
            if a.action == Action::Stay {
                zero_free = false;
            }
            for b in &ins[i + 1..] {
                if overlap(a, b, a.from, b.from) {
                    deterministic = false;
                }
                if overlap(a, b, a.to, b.to) {
                    reversible = false;
                }
            }
            // self-composition counts: a same-tape loop breaks alternation
            for b in ins {
                if a.to == b.from && a.tape == b.tape {
                    alternating = false;
                }
            }
        }
        MachineCheck { deterministic, reversible, alternating, zero_free }
    }

    fn applicable(&self, ins: &Instruction, counters: &[u64]) -> bool {
        let c = counters[ins.tape as usize - 1];
        match ins.action {
            Action::TestPos | Action::Dec => c > 0,
            Action::TestZero => c == 0,
            Action::Inc | Action::Stay => true,
        }
    }

    /// Indices of all instructions applicable in the given configuration.
    /// A deterministic machine yields at most one.
    pub fn applicable_instructions(&self, cfg: &Config) -> Vec<usize> {
        self.instructions
            .iter()
            .enumerate()
            .filter(|(_, i)| i.from == cfg.state && self.applicable(i, &cfg.counters))
            .map(|(i, _)| i)
            .collect()
    }

    /// Runs from the initial state on the given counters, stopping at the
    /// final state.
    pub fn run(&self, counters: &[u64], max_steps: usize) -> RunOutcome {
        assert_eq!(counters.len(), self.tapes as usize);
        let mut cfg = Config { state: self.initial, counters: counters.to_vec() };
        let mut trace = vec![cfg.clone()];
        for step in 0..=max_steps {
            if cfg.state == self.final_ {
                return RunOutcome { verdict: RunVerdict::Accepted { steps: step }, trace };
            }
            if step == max_steps {
                break;
            }
            let mut chosen: Option<&Instruction> = None;
            for ins in self.instructions.iter().filter(|i| i.from == cfg.state) {
                if self.applicable(ins, &cfg.counters) {
                    if chosen.is_some() {
                        return RunOutcome { verdict: RunVerdict::Nondet { at: step }, trace };
                    }
                    chosen = Some(ins);
                }
            }
            let Some(ins) = chosen else {
                return RunOutcome { verdict: RunVerdict::Halted { steps: step }, trace };
            };
            let c = &mut cfg.counters[ins.tape as usize - 1];
            match ins.action {
                Action::Inc => *c += 1,
                Action::Dec => *c -= 1,
                _ => {}
            }
            cfg.state = ins.to;
            trace.push(cfg.clone());
        }
        RunOutcome { verdict: RunVerdict::StepLimit, trace }
    }

    /// Replaces every instruction that can follow another one on the same
    /// tape by a detour over a fresh state, entered by a `0` action on the
    /// other tape. Only meaningful for 2-tape machines.
    pub fn make_alternating(&self) -> Result<CounterMachine, NormalizeError> {
        assert_eq!(self.tapes, 2, "alternation is defined for 2-tape machines");
        let mut m = self.clone();
        let cap = 2 * self.states.len() + 4;
        for _pass in 0..cap {
            // a reversible machine has a single incoming tape per state, so
            // each state needs fixing at most once
            let clash = m.instructions.iter().find_map(|a| {
                m.instructions
                    .iter()
                    .any(|b| a.to == b.from && a.tape == b.tape)
                    .then_some((a.to, a.tape))
            });
            let Some((q, tape)) = clash else {
                return Ok(m);
            };
            let other = 3 - tape;
            let moved: Vec<Instruction> =
                m.instructions.iter().filter(|j| j.from == q && j.tape == tape).copied().collect();
            m.instructions.retain(|j| !(j.from == q && j.tape == tape));
            let dummy_name = if moved.len() > 1 {
                // one shared detour state keeps the test pair deterministic
                format!("{}@{}", m.states[q], tape)
            } else {
                let j = moved[0];
                format!("{}@{}{}{}", m.states[q], tape, j.action.as_char(), m.states[j.to])
            };
            m.states.push(dummy_name);
            let d = m.states.len() - 1;
            m.instructions.push(Instruction { from: q, tape: other, action: Action::Stay, to: d });
            for j in moved {
                m.instructions.push(Instruction { from: d, tape, action: j.action, to: j.to });
            }
        }
        Err(NormalizeError::DidNotStabilize(cap))
    }

    /// Splits every `0` action into the two complementary tests.
    pub fn remove_zero_moves(&self) -> CounterMachine {
        let mut m = self.clone();
        m.instructions = m
            .instructions
            .iter()
            .flat_map(|j| {
                if j.action == Action::Stay {
                    vec![
                        Instruction { action: Action::TestPos, ..*j },
                        Instruction { action: Action::TestZero, ..*j },
                    ]
                } else {
                    vec![*j]
                }
            })
            .collect();
        m
    }

    /// Alternation rewrite followed by `0` elimination; the result must pass
    /// all four checks.
    pub fn normalize(&self) -> Result<CounterMachine, NormalizeError> {
        let m = self.make_alternating()?.remove_zero_moves();
        let chk = m.check();
        if chk.all() {
            Ok(m)
        } else {
            Err(NormalizeError::PostCheckFailed(chk))
        }
    }
}

/// Compares a run of `original` against `derived` on the same input, mapping
/// `derived` states back by name and ignoring configurations in states that
/// `original` does not have. `Agree` means both runs resolved with the same
/// kind of verdict and identical projected traces.
pub fn simulates(
    original: &CounterMachine,
    derived: &CounterMachine,
    counters: &[u64],
    max_steps: usize,
) -> SimVerdict {
    let ro = original.run(counters, max_steps);
    // a detour adds at most one extra step per original step
    let rd = derived.run(counters, 2 * max_steps + 2);
    let orig: Vec<(usize, &[u64])> =
        ro.trace.iter().map(|c| (c.state, c.counters.as_slice())).collect();
    let proj: Vec<(usize, &[u64])> = rd
        .trace
        .iter()
        .filter_map(|c| {
            original.state_index(&derived.states[c.state]).map(|i| (i, c.counters.as_slice()))
        })
        .collect();
    let resolved =
        |v: &RunVerdict| matches!(v, RunVerdict::Accepted { .. } | RunVerdict::Halted { .. });
    if resolved(&ro.verdict) && resolved(&rd.verdict) {
        let same_kind = matches!(
            (&ro.verdict, &rd.verdict),
            (RunVerdict::Accepted { .. }, RunVerdict::Accepted { .. })
                | (RunVerdict::Halted { .. }, RunVerdict::Halted { .. })
        );
        if same_kind && proj == orig {
            SimVerdict::Agree
        } else {
            SimVerdict::Disagree
        }
    } else {
        let n = proj.len().min(orig.len());
        if proj[..n] == orig[..n] {
            SimVerdict::Unresolved
        } else {
            SimVerdict::Disagree
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct MachineParseError {
    pub line: usize,
    pub kind: MachineParseErrorKind,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MachineParseErrorKind {
    #[error("duplicate {0} directive")]
    Duplicate(&'static str),
    #[error("missing {0} directive")]
    Missing(&'static str),
    #[error("state {0:?} is not declared")]
    UnknownState(String),
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("bad tape index {0:?}")]
    BadTape(String),
    #[error("bad action {0:?}; expected one of a b + - 0")]
    BadAction(String),
    #[error("unrecognized directive {0:?}")]
    BadDirective(String),
    #[error("malformed line: {0}")]
    Malformed(&'static str),
}

impl CounterMachine {
    pub fn parse(text: &str) -> Result<CounterMachine, MachineParseError> {
        use MachineParseErrorKind as K;
        let mut states: Option<Vec<String>> = None;
        let mut by_name: HashMap<String, usize> = HashMap::new();
        let mut initial: Option<usize> = None;
        let mut final_: Option<usize> = None;
        let mut tapes: Option<u8> = None;
        let mut instructions = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let at = |kind: K| MachineParseError { line, kind };
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let lookup = |name: &str, by_name: &HashMap<String, usize>| {
                by_name.get(name).copied().ok_or_else(|| at(K::UnknownState(name.to_string())))
            };
            match toks[0] {
                "states" => {
                    if states.is_some() {
                        return Err(at(K::Duplicate("states")));
                    }
                    let mut v = Vec::new();
                    for name in &toks[1..] {
                        if by_name.insert(name.to_string(), v.len()).is_some() {
                            return Err(at(K::DuplicateState(name.to_string())));
                        }
                        v.push(name.to_string());
                    }
                    if v.is_empty() {
                        return Err(at(K::Malformed("states line declares no states")));
                    }
                    states = Some(v);
                }
                "initial" | "final" => {
                    let slot = if toks[0] == "initial" { &mut initial } else { &mut final_ };
                    if slot.is_some() {
                        return Err(at(K::Duplicate(if toks[0] == "initial" {
                            "initial"
                        } else {
                            "final"
                        })));
                    }
                    if toks.len() != 2 {
                        return Err(at(K::Malformed("expected exactly one state name")));
                    }
                    *slot = Some(lookup(toks[1], &by_name)?);
                }
                "tapes" => {
                    if tapes.is_some() {
                        return Err(at(K::Duplicate("tapes")));
                    }
                    if toks.len() != 2 {
                        return Err(at(K::Malformed("expected a tape count")));
                    }
                    let n: u8 = toks[1].parse().map_err(|_| at(K::BadTape(toks[1].into())))?;
                    if n == 0 {
                        return Err(at(K::BadTape(toks[1].into())));
                    }
                    tapes = Some(n);
                }
                "ins" => {
                    if toks.len() != 5 {
                        return Err(at(K::Malformed("expected: ins FROM TAPE ACTION TO")));
                    }
                    let k = tapes.ok_or_else(|| at(K::Missing("tapes")))?;
                    let from = lookup(toks[1], &by_name)?;
                    let tape: u8 = toks[2].parse().map_err(|_| at(K::BadTape(toks[2].into())))?;
                    if tape == 0 || tape > k {
                        return Err(at(K::BadTape(toks[2].into())));
                    }
                    let mut chars = toks[3].chars();
                    let action = match (chars.next().and_then(Action::from_char), chars.next()) {
                        (Some(a), None) => a,
                        _ => return Err(at(K::BadAction(toks[3].into()))),
                    };
                    let to = lookup(toks[4], &by_name)?;
                    instructions.push(Instruction { from, tape, action, to });
                }
                other => return Err(at(K::BadDirective(other.to_string()))),
            }
        }
        let missing = |f: &'static str| MachineParseError { line: 0, kind: K::Missing(f) };
        Ok(CounterMachine {
            states: states.ok_or_else(|| missing("states"))?,
            initial: initial.ok_or_else(|| missing("initial"))?,
            final_: final_.ok_or_else(|| missing("final"))?,
            tapes: tapes.ok_or_else(|| missing("tapes"))?,
            instructions,
        })
    }
}

impl fmt::Display for CounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "states")?;
        for s in &self.states {
            write!(f, " {s}")?;
        }
        writeln!(f)?;
        writeln!(f, "initial {}", self.states[self.initial])?;
        writeln!(f, "final {}", self.states[self.final_])?;
        writeln!(f, "tapes {}", self.tapes)?;
        for j in &self.instructions {
            writeln!(
                f,
                "ins {} {} {} {}",
                self.states[j.from],
                j.tape,
                j.action.as_char(),
                self.states[j.to]
            )?;
        }
        Ok(())
    }
}
