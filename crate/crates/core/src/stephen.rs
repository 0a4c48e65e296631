//! Saturation of word automata against a presentation.
//!
//! Each round detects every missing relation instance against the frozen
//! automaton: a path labelled by one side of a relation whose other side does
//! not run between the same pair of vertices. All detected instances are
//! grafted as fresh paths, then a single fold restores determinism. The loop
//! stops when no instances remain (`Closed`) or a budget runs out.
//!
//! The language of the closed automaton of `w` consists exactly of the words
//! lying above `w` in the natural partial order, which is what makes the
//! acceptance tests in [`eq`] and [`is_zero`] sound.

use crate::alphabet::{Letter, SLetter};
use crate::automaton::{InverseAutomaton, PendingAutomaton, VertexId};
use crate::munn::munn_tree;
use crate::presentation::Presentation;
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_rounds: usize,
    pub max_vertices: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_rounds: 1000, max_vertices: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureStatus {
    /// No relation instances remain; the automaton is the full closure.
    Closed,
    /// A budget ran out first; the automaton is an intermediate stage.
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct ClosureOutcome {
    pub status: ClosureStatus,
    pub automaton: InverseAutomaton,
    pub rounds_used: usize,
}

/// A missing relation instance: one side of `relation` runs `source ->
/// target` but the other side does not. `reversed` says the path read the
/// right-hand side (so the left-hand side is what gets grafted).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instance {
    pub relation: usize,
    pub reversed: bool,
    pub source: VertexId,
    pub target: VertexId,
}

/// Per-round progress report for observers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundInfo {
    pub round: usize,
    /// vertex count before this round's grafts
    pub vertices: usize,
    pub instances: usize,
}

/// Relation sides compiled for detection: both directions of every relation,
/// with graft words interned so duplicate relations are scanned once.
struct Compiled {
    width: usize,
    dirs: Vec<Dir>,
}

struct Dir {
    rel: u32,
    reversed: bool,
    u: Vec<SLetter>,
    v: Vec<SLetter>,
    v_id: u32,
}

impl Compiled {
    fn build(pres: &Presentation, subset: Option<&[usize]>) -> Compiled {
        let width = pres.alphabet.len() * 2;
        let mut word_ids: HashMap<Vec<SLetter>, u32> = HashMap::new();
        let intern = |w: &[SLetter], ids: &mut HashMap<Vec<SLetter>, u32>| -> u32 {
            let next = ids.len() as u32;
            *ids.entry(w.to_vec()).or_insert(next)
        };
        let mut seen: HashSet<(u32, u32)> = HashSet::new();
        let mut dirs = Vec::new();
        let indices: Vec<usize> = match subset {
            Some(s) => s.to_vec(),
            None => (0..pres.relations.len()).collect(),
        };
        for i in indices {
            let r = &pres.relations[i];
            if r.lhs == r.rhs {
                continue;
            }
            debug_assert!(!r.lhs.letters().is_empty() && !r.rhs.letters().is_empty());
            let lid = intern(r.lhs.letters(), &mut word_ids);
            let rid = intern(r.rhs.letters(), &mut word_ids);
            let both = [
                (r.lhs.letters(), r.rhs.letters(), lid, rid, false),
                (r.rhs.letters(), r.lhs.letters(), rid, lid, true),
            ];
            for (u, v, uid, vid, reversed) in both {
                if seen.insert((uid, vid)) {
                    dirs.push(Dir {
                        rel: i as u32,
                        reversed,
                        u: u.to_vec(),
                        v: v.to_vec(),
                        v_id: vid,
                    });
                }
            }
        }
        Compiled { width, dirs }
    }

    fn detect(&self, a: &InverseAutomaton) -> Vec<Instance> {
        let n = a.vertex_count();
        // group vertices by outgoing letter so each direction only traces
        // from vertices that can read its first letter
        let mut starts: Vec<Vec<VertexId>> = vec![Vec::new(); self.width];
        for v in 0..n as VertexId {
            for (x, _) in a.edges_from(v) {
                starts[x.code()].push(v);
            }
        }
        let mut dedup: HashSet<(VertexId, VertexId, u32)> = HashSet::new();
        let mut out = Vec::new();
        for d in &self.dirs {
            for &p in &starts[d.u[0].code()] {
                self.check_at(a, d, p, &mut dedup, &mut out);
            }
        }
        out
    }

    /// Instances whose traced side visits a vertex of `dirty`. Sound as a full
    /// scan after a round that applied every instance it detected: a satisfied
    /// instance survives both grafting and folding, so anything newly missing
    /// must run through a vertex whose neighbourhood just changed.
    fn detect_near(&self, a: &InverseAutomaton, dirty: &[VertexId]) -> Vec<Instance> {
        let mut dedup: HashSet<(VertexId, VertexId, u32)> = HashSet::new();
        let mut out = Vec::new();
        // stamp[p] == di+1 marks p as an already-tried source for direction di;
        // a plain array beats a hash set here since this runs every round
        let mut stamp = vec![0u32; a.vertex_count()];
        for (di, d) in self.dirs.iter().enumerate() {
            let mark = di as u32 + 1;
            for &v in dirty {
                // v could sit at any position along the traced side; the
                // automaton is deterministic both ways, so undoing the prefix
                // before each position pins down one candidate source
                for i in 0..=d.u.len() {
                    let mut p = v;
                    let mut ok = true;
                    for j in (0..i).rev() {
                        match a.step(p, d.u[j].inverse()) {
                            Some(prev) => p = prev,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok && stamp[p as usize] != mark {
                        stamp[p as usize] = mark;
                        self.check_at(a, d, p, &mut dedup, &mut out);
                    }
                }
            }
        }
        out
    }

    fn check_at(
        &self,
        a: &InverseAutomaton,
        d: &Dir,
        p: VertexId,
        dedup: &mut HashSet<(VertexId, VertexId, u32)>,
        out: &mut Vec<Instance>,
    ) {
        if let Some(q) = a.trace_from(p, &d.u) {
            if a.trace_from(p, &d.v) != Some(q) && dedup.insert((p, q, d.v_id)) {
                out.push(Instance {
                    relation: d.rel as usize,
                    reversed: d.reversed,
                    source: p,
                    target: q,
                });
            }
        }
    }
}

fn graft_word<'a>(pres: &'a Presentation, inst: &Instance) -> &'a [SLetter] {
    let r = &pres.relations[inst.relation];
    if inst.reversed {
        r.lhs.letters()
    } else {
        r.rhs.letters()
    }
}

fn apply_all(pres: &Presentation, a: &InverseAutomaton, instances: &[Instance]) -> InverseAutomaton {
    apply_all_tracked(pres, a, instances).0
}

/// Applies and folds, returning the vertices of the result whose
/// neighbourhood differs from `a`: graft attachment points and path interiors
/// plus every vertex that absorbed another during the fold.
fn apply_all_tracked(
    pres: &Presentation,
    a: &InverseAutomaton,
    instances: &[Instance],
) -> (InverseAutomaton, Vec<VertexId>) {
    let mut p = PendingAutomaton::from_automaton(a);
    let mut touched: Vec<VertexId> = Vec::new();
    for inst in instances {
        touched.push(inst.source);
        touched.push(inst.target);
        p.graft_path(inst.source, graft_word(pres, inst), inst.target);
    }
    let grafted = p.vertex_count();
    touched.extend(a.vertex_count() as VertexId..grafted as VertexId);
    // `a` was already folded, so only graft-touched lists can be unclean
    let (folded, map) = p.fold_with_map_from(&touched);
    let mut dirty = vec![false; folded.vertex_count()];
    for t in touched {
        dirty[map[t as usize] as usize] = true;
    }
    let mut preimages = vec![0u32; folded.vertex_count()];
    for &m in &map {
        preimages[m as usize] += 1;
        if preimages[m as usize] > 1 {
            dirty[m as usize] = true;
        }
    }
    let dirty = (0..folded.vertex_count() as VertexId).filter(|&v| dirty[v as usize]).collect();
    (folded, dirty)
}

/// All missing instances of the selected relations against `a`, deduplicated
/// by grafted content.
pub fn detect_instances(
    pres: &Presentation,
    subset: Option<&[usize]>,
    a: &InverseAutomaton,
) -> Vec<Instance> {
    Compiled::build(pres, subset).detect(a)
}

/// Grafts the given instances and folds.
pub fn apply_instances(
    pres: &Presentation,
    a: &InverseAutomaton,
    instances: &[Instance],
) -> InverseAutomaton {
    apply_all(pres, a, instances)
}

struct ClosureRun<'a> {
    pres: &'a Presentation,
    compiled: &'a Compiled,
    budget: Budget,
    a: InverseAutomaton,
    rounds_used: usize,
    status: Option<ClosureStatus>,
    /// vertices changed by the previous round; `None` forces a full scan
    dirty: Option<Vec<VertexId>>,
}

impl<'a> ClosureRun<'a> {
    fn new(
        pres: &'a Presentation,
        compiled: &'a Compiled,
        start: InverseAutomaton,
        budget: Budget,
    ) -> Self {
        ClosureRun { pres, compiled, budget, a: start, rounds_used: 0, status: None, dirty: None }
    }

    /// Settles the status if it is decidable, otherwise runs one round.
    fn advance(&mut self, observer: &mut dyn FnMut(RoundInfo)) {
        if self.status.is_some() {
            return;
        }
        // a complete one-vertex automaton satisfies every instance already
        if self.a.is_complete_singleton() {
            self.status = Some(ClosureStatus::Closed);
            return;
        }
        // a wide dirty set makes the position walks cost more than rescanning
        let instances = match &self.dirty {
            Some(d) if d.len() * 4 < self.a.vertex_count() => {
                self.compiled.detect_near(&self.a, d)
            }
            _ => self.compiled.detect(&self.a),
        };
        if instances.is_empty() {
            self.status = Some(ClosureStatus::Closed);
            return;
        }
        if self.rounds_used >= self.budget.max_rounds
            || self.a.vertex_count() > self.budget.max_vertices
        {
            self.status = Some(ClosureStatus::BudgetExhausted);
            return;
        }
        self.rounds_used += 1;
        observer(RoundInfo {
            round: self.rounds_used,
            vertices: self.a.vertex_count(),
            instances: instances.len(),
        });
        let (folded, dirty) = apply_all_tracked(self.pres, &self.a, &instances);
        self.a = folded;
        self.dirty = Some(dirty);
    }

    fn finish(mut self, observer: &mut dyn FnMut(RoundInfo)) -> ClosureOutcome {
        while self.status.is_none() {
            self.advance(observer);
        }
        ClosureOutcome {
            status: self.status.unwrap(),
            automaton: self.a,
            rounds_used: self.rounds_used,
        }
    }
}

/// Saturates an arbitrary starting automaton against the selected relations.
pub fn close_automaton(
    pres: &Presentation,
    subset: Option<&[usize]>,
    start: InverseAutomaton,
    budget: &Budget,
) -> ClosureOutcome {
    let compiled = Compiled::build(pres, subset);
    ClosureRun::new(pres, &compiled, start, *budget).finish(&mut |_| {})
}

/// The closure of the word automaton of `w`.
pub fn close(pres: &Presentation, w: &[SLetter], budget: &Budget) -> ClosureOutcome {
    close_automaton(pres, None, munn_tree(pres.alphabet.len(), w), budget)
}

/// Like [`close`] but reporting each round to `observer`.
pub fn close_observed(
    pres: &Presentation,
    w: &[SLetter],
    budget: &Budget,
    observer: &mut dyn FnMut(RoundInfo),
) -> ClosureOutcome {
    let compiled = Compiled::build(pres, None);
    ClosureRun::new(pres, &compiled, munn_tree(pres.alphabet.len(), w), *budget).finish(observer)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqVerdict {
    Equal,
    NotEqual,
    Unknown,
}

/// Decides equality of `u` and `v` in the presented inverse semigroup, as far
/// as the budget allows.
///
/// The two closures are advanced in lockstep. Cross-acceptance at any stage
/// proves equality (intermediate languages only grow toward the closure
/// language). A finished closure that rejects the other word refutes it.
pub fn eq(pres: &Presentation, u: &[SLetter], v: &[SLetter], budget: &Budget) -> EqVerdict {
    let letters = pres.alphabet.len();
    let compiled = Compiled::build(pres, None);
    let mut ru = ClosureRun::new(pres, &compiled, munn_tree(letters, u), *budget);
    let mut rv = ClosureRun::new(pres, &compiled, munn_tree(letters, v), *budget);
    let mut sink = |_: RoundInfo| {};
    loop {
        if ru.a.accepts(v) && rv.a.accepts(u) {
            return EqVerdict::Equal;
        }
        if ru.status == Some(ClosureStatus::Closed) && !ru.a.accepts(v) {
            return EqVerdict::NotEqual;
        }
        if rv.status == Some(ClosureStatus::Closed) && !rv.a.accepts(u) {
            return EqVerdict::NotEqual;
        }
        if ru.status.is_some() && rv.status.is_some() {
            return EqVerdict::Unknown;
        }
        ru.advance(&mut sink);
        rv.advance(&mut sink);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroVerdict {
    Zero,
    NotZero,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct ZeroOutcome {
    pub verdict: ZeroVerdict,
    /// closure of the word under test, available for further inspection
    pub closure: ClosureOutcome,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ZeroCheckError {
    /// The designated letter could not be certified as a zero element: its
    /// own closure must collapse to the complete one-vertex automaton.
    #[error("letter {0:?} not certified as a zero within budget")]
    Uncertified(String),
}

/// Tests whether `w` equals the zero element designated by `zero`.
///
/// First certifies the letter: its closure must collapse to the complete
/// one-vertex automaton, which accepts every word and therefore lies below
/// everything. Then `w` is zero exactly when its own closure collapses the
/// same way.
pub fn is_zero(
    pres: &Presentation,
    zero: Letter,
    w: &[SLetter],
    budget: &Budget,
) -> Result<ZeroOutcome, ZeroCheckError> {
    let zw = [SLetter::pos(zero)];
    let cert = close(pres, &zw, budget);
    if !(cert.status == ClosureStatus::Closed && cert.automaton.is_complete_singleton()) {
        return Err(ZeroCheckError::Uncertified(pres.alphabet.name(zero).to_string()));
    }
    let closure = close(pres, w, budget);
    let verdict = match closure.status {
        ClosureStatus::Closed if closure.automaton.is_complete_singleton() => ZeroVerdict::Zero,
        ClosureStatus::Closed => ZeroVerdict::NotZero,
        ClosureStatus::BudgetExhausted => ZeroVerdict::Unknown,
    };
    Ok(ZeroOutcome { verdict, closure })
}

/// Sum over `w` of +1 for each positive and -1 for each negative occurrence
/// of a letter from `y`.
pub fn sigma(y: &[Letter], w: &[SLetter]) -> i64 {
    w.iter()
        .map(|x| match (y.contains(&x.letter()), x.is_positive()) {
            (false, _) => 0,
            (true, true) => 1,
            (true, false) => -1,
        })
        .sum()
}

/// Assigns each vertex a height so that every edge labelled by a letter from
/// `y` climbs by +1 (or descends by -1 for its inverse) and all other edges
/// stay level. Returns `None` when no consistent assignment exists, which
/// happens exactly when some loop has nonzero letter sum over `y`.
pub fn check_potential(a: &InverseAutomaton, y: &[Letter]) -> Option<Vec<i64>> {
    const UNSET: i64 = i64::MIN;
    let mut h = vec![UNSET; a.vertex_count()];
    h[a.initial() as usize] = 0;
    let mut stack = vec![a.initial()];
    while let Some(v) = stack.pop() {
        for (x, q) in a.edges_from(v) {
            let step = match (y.contains(&x.letter()), x.is_positive()) {
                (false, _) => 0,
                (true, true) => 1,
                (true, false) => -1,
            };
            let hq = h[v as usize] + step;
            if h[q as usize] == UNSET {
                h[q as usize] = hq;
                stack.push(q);
            } else if h[q as usize] != hq {
                return None;
            }
        }
    }
    Some(h)
}
