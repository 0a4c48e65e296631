//! Encoding a normalized 2-counter machine into inverse-semigroup
//! presentations.
//!
//! Each tape becomes a one-sided presentation over letters `z a t` plus one
//! letter per machine state; instructions turn into short rewriting relations
//! and a finiteness family makes the final-state letter absorbing, so that
//! letter is the zero of the tape semigroup. The two tape presentations are
//! joined over a common core (states plus `t`) by identification relations,
//! giving the amalgam in which the word for input `(m, n)` collapses to zero
//! exactly when the machine accepts.
//!
//! Letter names are side-suffixed (`z1`, `a2`, states as `p_1`), so machine
//! state names can never collide with the fixed letters. The standalone core
//! uses plain state names and therefore rejects states named `t`.

use crate::alphabet::{Alphabet, Letter, SLetter, Word};
use crate::machine::{Action, CounterMachine, MachineCheck};
use crate::presentation::{FamilyTag, Presentation, Relation};
use crate::stephen::{self, Budget, EqVerdict};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("machine must pass all checks before encoding: {0:?}")]
    NotNormal(MachineCheck),
    #[error("encoding requires exactly 2 tapes, machine has {0}")]
    NotTwoTape(u8),
    #[error("state name {0:?} cannot be used as a letter here")]
    BadStateName(String),
}

/// Letter indices of one side's alphabet inside some enclosing alphabet.
#[derive(Clone, Debug)]
pub struct SideLetters {
    pub z: Letter,
    pub a: Letter,
    pub t: Letter,
    /// indexed like the machine's state list
    pub states: Vec<Letter>,
    /// the absorbing letter: the final state's letter on this side
    pub f: Letter,
}

impl SideLetters {
    fn names(m: &CounterMachine, side: u8) -> Vec<String> {
        let mut v = vec![format!("z{side}"), format!("a{side}"), format!("t{side}")];
        v.extend(m.states.iter().map(|s| format!("{s}_{side}")));
        v
    }

    fn at(base: usize, nstates: usize, final_: usize) -> SideLetters {
        let states: Vec<Letter> = (0..nstates).map(|q| Letter((base + 3 + q) as u16)).collect();
        let f = states[final_];
        SideLetters {
            z: Letter(base as u16),
            a: Letter((base + 1) as u16),
            t: Letter((base + 2) as u16),
            states,
            f,
        }
    }

    /// all signed letters of this side, in letter-code order
    fn signed(&self) -> Vec<SLetter> {
        let mut v = Vec::new();
        for l in [self.z, self.a, self.t].into_iter().chain(self.states.iter().copied()) {
            v.push(SLetter::pos(l));
            v.push(SLetter::neg(l));
        }
        v
    }
}

/// A single tape presentation together with instruction provenance.
#[derive(Clone, Debug)]
pub struct TapeEncoding {
    pub presentation: Presentation,
    /// per relation: the instruction it encodes, if any
    pub origins: Vec<Option<usize>>,
    pub letters: SideLetters,
}

/// The full two-tape amalgam.
#[derive(Clone, Debug)]
pub struct EncodedAmalgam {
    pub presentation: Presentation,
    pub origins: Vec<Option<usize>>,
    pub sides: [SideLetters; 2],
}

/// The common core: states and `t`, with every state product absorbed.
#[derive(Clone, Debug)]
pub struct CoreEncoding {
    pub presentation: Presentation,
    pub states: Vec<Letter>,
    pub t: Letter,
    /// the final state's letter, the zero of the core
    pub f: Letter,
}

fn require_normal(m: &CounterMachine) -> Result<(), EncodeError> {
    if m.tapes != 2 {
        return Err(EncodeError::NotTwoTape(m.tapes));
    }
    let chk = m.check();
    if !chk.all() {
        return Err(EncodeError::NotNormal(chk));
    }
    Ok(())
}

fn rel(lhs: Vec<SLetter>, rhs: Vec<SLetter>, tag: FamilyTag) -> Relation {
    Relation { lhs: Word::new(lhs), rhs: Word::new(rhs), tag: Some(tag) }
}

/// Relations of one tape: commutation of `t` with `z` and `a`, one family
/// per instruction on this tape, then the finiteness family.
fn tape_relations(
    m: &CounterMachine,
    sl: &SideLetters,
    side: u8,
    out: &mut Vec<Relation>,
    origins: &mut Vec<Option<usize>>,
) {
    let t = SLetter::pos(sl.t);
    let ti = SLetter::neg(sl.t);
    let a = SLetter::pos(sl.a);
    let z = SLetter::pos(sl.z);
    let mut push = |r: Relation, origin: Option<usize>, out: &mut Vec<Relation>| {
        out.push(r);
        origins.push(origin);
    };

    for x in [z, SLetter::neg(sl.z), a, SLetter::neg(sl.a)] {
        push(rel(vec![t, x], vec![x, t], FamilyTag::Commuting), None, out);
    }

    for (idx, ins) in m.instructions.iter().enumerate() {
        if ins.tape != side {
            continue;
        }
        let p = SLetter::pos(sl.states[ins.from]);
        let q = SLetter::pos(sl.states[ins.to]);
        match (ins.action, side) {
            (Action::TestPos | Action::TestZero, 1) => {
                let s = if ins.action == Action::TestPos { a } else { z };
                push(rel(vec![s, p], vec![s, t, q, ti], FamilyTag::Test), Some(idx), out);
            }
            (Action::TestPos | Action::TestZero, 2) => {
                let s = if ins.action == Action::TestPos { a } else { z };
                push(rel(vec![p, s], vec![t, q, ti, s], FamilyTag::Test), Some(idx), out);
            }
            (Action::Inc, 1) => {
                for s in [z, a] {
                    push(rel(vec![s, p], vec![s, t, a, q, ti], FamilyTag::Writing), Some(idx), out);
                }
            }
            (Action::Inc, 2) => {
                for s in [z, a] {
                    push(rel(vec![p, s], vec![t, q, a, ti, s], FamilyTag::Writing), Some(idx), out);
                }
            }
            (Action::Dec, 1) => {
                for s in [z, a] {
                    push(rel(vec![s, a, p], vec![s, t, q, ti], FamilyTag::Erasing), Some(idx), out);
                }
            }
            (Action::Dec, 2) => {
                for s in [z, a] {
                    push(rel(vec![p, a, s], vec![t, q, ti, s], FamilyTag::Erasing), Some(idx), out);
                }
            }
            (Action::Stay, _) => unreachable!("normalized machines have no 0 actions"),
            _ => unreachable!("side is 1 or 2"),
        }
    }

    let f = SLetter::pos(sl.f);
    let all = sl.signed();
    for &x in &all {
        push(rel(vec![f, x], vec![f], FamilyTag::Finiteness), None, out);
        push(rel(vec![x, f], vec![f], FamilyTag::Finiteness), None, out);
    }
    for &qs in &sl.states {
        let q = SLetter::pos(qs);
        // a state letter followed (side 1) or preceded (side 2) by anything
        // except its own undo or a row move is absorbed; keeping t out of the
        // excluded pair would zero out every instruction relation's rhs
        for &x in all.iter().filter(|&&x| x != q.inverse() && x.letter() != sl.t) {
            let lhs = if side == 1 { vec![q, x] } else { vec![x, q] };
            push(rel(lhs, vec![f], FamilyTag::Finiteness), None, out);
        }
    }
    for &ps in &sl.states {
        for &qs in sl.states.iter().filter(|&&qs| qs != ps) {
            let lhs = if side == 1 {
                vec![SLetter::neg(ps), SLetter::pos(qs)]
            } else {
                vec![SLetter::pos(ps), SLetter::neg(qs)]
            };
            push(rel(lhs, vec![f], FamilyTag::Finiteness), None, out);
        }
    }
    push(rel(vec![a, SLetter::neg(sl.z)], vec![f], FamilyTag::Finiteness), None, out);
    push(rel(vec![SLetter::neg(sl.z), a], vec![f], FamilyTag::Finiteness), None, out);
}

pub fn encode_tape(m: &CounterMachine, side: u8) -> Result<TapeEncoding, EncodeError> {
    assert!(side == 1 || side == 2, "side must be 1 or 2");
    require_normal(m)?;
    let alphabet = Alphabet::new(SideLetters::names(m, side))
        .expect("side-suffixed names are always valid");
    let letters = SideLetters::at(0, m.states.len(), m.final_);
    let mut relations = Vec::new();
    let mut origins = Vec::new();
    tape_relations(m, &letters, side, &mut relations, &mut origins);
    Ok(TapeEncoding {
        presentation: Presentation::new(alphabet, relations),
        origins,
        letters,
    })
}

pub fn encode_amalgam(m: &CounterMachine) -> Result<EncodedAmalgam, EncodeError> {
    require_normal(m)?;
    let mut names = SideLetters::names(m, 1);
    names.extend(SideLetters::names(m, 2));
    let alphabet = Alphabet::new(names).expect("side-suffixed names are always valid");
    let nstates = m.states.len();
    let side1 = SideLetters::at(0, nstates, m.final_);
    let side2 = SideLetters::at(nstates + 3, nstates, m.final_);
    let mut relations = Vec::new();
    let mut origins = Vec::new();
    tape_relations(m, &side1, 1, &mut relations, &mut origins);
    tape_relations(m, &side2, 2, &mut relations, &mut origins);
    // identify the two copies of the core
    for q in 0..nstates {
        relations.push(rel(
            vec![SLetter::pos(side1.states[q])],
            vec![SLetter::pos(side2.states[q])],
            FamilyTag::Amalgam,
        ));
        origins.push(None);
    }
    relations.push(rel(vec![SLetter::pos(side1.t)], vec![SLetter::pos(side2.t)], FamilyTag::Amalgam));
    origins.push(None);
    Ok(EncodedAmalgam {
        presentation: Presentation::new(alphabet, relations),
        origins,
        sides: [side1, side2],
    })
}

impl EncodedAmalgam {
    /// The word whose vanishing encodes acceptance of `(m, n)`: `z1 a1^m ι_1
    /// a2^n z2` with `ι` the machine's initial state.
    pub fn word_mn(&self, machine: &CounterMachine, m: u64, n: u64) -> Word {
        let s1 = &self.sides[0];
        let s2 = &self.sides[1];
        let mut w = Vec::with_capacity(m as usize + n as usize + 3);
        w.push(SLetter::pos(s1.z));
        w.extend(std::iter::repeat(SLetter::pos(s1.a)).take(m as usize));
        w.push(SLetter::pos(s1.states[machine.initial]));
        w.extend(std::iter::repeat(SLetter::pos(s2.a)).take(n as usize));
        w.push(SLetter::pos(s2.z));
        Word::new(w)
    }

    /// The zero of the amalgam as a one-letter word (side 1's copy).
    pub fn zero(&self) -> Letter {
        self.sides[0].f
    }
}

pub fn encode_core(m: &CounterMachine) -> Result<CoreEncoding, EncodeError> {
    require_normal(m)?;
    for s in &m.states {
        if s == "t" || !crate::alphabet::valid_letter_name(s) {
            return Err(EncodeError::BadStateName(s.clone()));
        }
    }
    let mut names: Vec<String> = m.states.clone();
    names.push("t".into());
    let alphabet = Alphabet::new(names).expect("names were checked above");
    let nstates = m.states.len();
    let states: Vec<Letter> = (0..nstates).map(|q| Letter(q as u16)).collect();
    let t = Letter(nstates as u16);
    let f = states[m.final_];
    let fp = SLetter::pos(f);
    let mut all = Vec::new();
    for l in states.iter().copied().chain([t]) {
        all.push(SLetter::pos(l));
        all.push(SLetter::neg(l));
    }
    let mut relations = Vec::new();
    for &x in &all {
        relations.push(rel(vec![fp, x], vec![fp], FamilyTag::Finiteness));
        relations.push(rel(vec![x, fp], vec![fp], FamilyTag::Finiteness));
    }
    // all state products vanish, as do mixed pairs of distinct states
    for &p in &states {
        for &q in &states {
            relations.push(rel(vec![SLetter::pos(p), SLetter::pos(q)], vec![fp], FamilyTag::Finiteness));
        }
    }
    for &p in &states {
        for &q in states.iter().filter(|&&q| q != p) {
            relations.push(rel(vec![SLetter::pos(p), SLetter::neg(q)], vec![fp], FamilyTag::Finiteness));
            relations.push(rel(vec![SLetter::neg(p), SLetter::pos(q)], vec![fp], FamilyTag::Finiteness));
        }
    }
    Ok(CoreEncoding { presentation: Presentation::new(alphabet, relations), states, t, f })
}

impl CoreEncoding {
    /// Image of a core word in the amalgam, through the chosen side (0 or 1).
    pub fn omega(&self, am: &EncodedAmalgam, side: usize, w: &[SLetter]) -> Word {
        let sl = &am.sides[side];
        let map = |l: Letter| if l == self.t { sl.t } else { sl.states[l.0 as usize] };
        Word::new(
            w.iter()
                .map(|x| {
                    let l = map(x.letter());
                    if x.is_positive() {
                        SLetter::pos(l)
                    } else {
                        SLetter::neg(l)
                    }
                })
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    Consistent,
    Inconsistent,
    Unresolved,
}

/// Compares equality of two core words with equality of their images in the
/// amalgam. A resolved disagreement is reported as `Inconsistent`; any
/// budget-limited `Unknown` on either side leaves the probe `Unresolved`.
pub fn embedding_probe(
    core: &CoreEncoding,
    am: &EncodedAmalgam,
    u: &[SLetter],
    v: &[SLetter],
    budget: &Budget,
) -> ProbeVerdict {
    let in_core = stephen::eq(&core.presentation, u, v, budget);
    let wu = core.omega(am, 0, u);
    let wv = core.omega(am, 0, v);
    let in_am = stephen::eq(&am.presentation, wu.letters(), wv.letters(), budget);
    match (in_core, in_am) {
        (EqVerdict::Equal, EqVerdict::Equal) | (EqVerdict::NotEqual, EqVerdict::NotEqual) => {
            ProbeVerdict::Consistent
        }
        (EqVerdict::Equal, EqVerdict::NotEqual) | (EqVerdict::NotEqual, EqVerdict::Equal) => {
            ProbeVerdict::Inconsistent
        }
        _ => ProbeVerdict::Unresolved,
    }
}
