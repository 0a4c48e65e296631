//! Birooted involutive automata over a doubled alphabet, and folding.
//!
//! [`InverseAutomaton`] is deterministic by construction: transitions live in
//! a flat `vertices x signed-letters` table. [`PendingAutomaton`] is the
//! multi-edge form used while grafting; [`PendingAutomaton::fold`] merges
//! equal-labelled edges out of a common vertex (in both orientations) until
//! the result is deterministic again.

use crate::alphabet::{Alphabet, SLetter};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use std::collections::VecDeque;
use std::fmt::Write as _;
use thiserror::Error;

pub type VertexId = u32;

const ABSENT: u32 = u32::MAX;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("edges {0} -{2:?}-> {1} and {0} -{2:?}-> {3} clash; automaton not deterministic")]
    NotDeterministic(VertexId, VertexId, SLetter, VertexId),
    #[error("vertex {0} out of range")]
    BadVertex(VertexId),
}

/// Deterministic involutive automaton with distinguished initial/final roots.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InverseAutomaton {
    letters: usize,
    vertices: usize,
    table: Vec<u32>,
    initial: VertexId,
    final_: VertexId,
}

impl InverseAutomaton {
    /// Builds directly from an edge list; each `(p, x, q)` also installs the
    /// reverse edge `(q, x', p)`. Fails on a determinism clash.
    pub fn from_edges(
        letters: usize,
        vertices: usize,
        edges: &[(VertexId, SLetter, VertexId)],
        initial: VertexId,
        final_: VertexId,
    ) -> Result<Self, AutomatonError> {
        let width = letters * 2;
        let mut table = vec![ABSENT; vertices * width];
        let put = |table: &mut Vec<u32>, p: VertexId, x: SLetter, q: VertexId| {
            if p as usize >= vertices {
                return Err(AutomatonError::BadVertex(p));
            }
            if q as usize >= vertices {
                return Err(AutomatonError::BadVertex(q));
            }
            let slot = &mut table[p as usize * width + x.code()];
            if *slot != ABSENT && *slot != q {
                return Err(AutomatonError::NotDeterministic(p, *slot, x, q));
            }
            *slot = q;
            Ok(())
        };
        for &(p, x, q) in edges {
            put(&mut table, p, x, q)?;
            put(&mut table, q, x.inverse(), p)?;
        }
        if initial as usize >= vertices {
            return Err(AutomatonError::BadVertex(initial));
        }
        if final_ as usize >= vertices {
            return Err(AutomatonError::BadVertex(final_));
        }
        Ok(InverseAutomaton { letters, vertices, table, initial, final_ })
    }

    /// The one-vertex automaton with a loop for every signed letter.
    pub fn complete_singleton(letters: usize) -> Self {
        InverseAutomaton { letters, vertices: 1, table: vec![0; letters * 2], initial: 0, final_: 0 }
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn initial(&self) -> VertexId {
        self.initial
    }

    pub fn final_vertex(&self) -> VertexId {
        self.final_
    }

    #[inline]
    pub fn step(&self, v: VertexId, x: SLetter) -> Option<VertexId> {
        let t = self.table[v as usize * self.letters * 2 + x.code()];
        if t == ABSENT {
            None
        } else {
            Some(t)
        }
    }

    /// Follows `w` from `v`; `None` as soon as an edge is missing.
    pub fn trace_from(&self, v: VertexId, w: &[SLetter]) -> Option<VertexId> {
        let width = self.letters * 2;
        let mut cur = v as usize;
        for &x in w {
            let t = self.table[cur * width + x.code()];
            if t == ABSENT {
                return None;
            }
            cur = t as usize;
        }
        Some(cur as VertexId)
    }

    pub fn trace(&self, w: &[SLetter]) -> Option<VertexId> {
        self.trace_from(self.initial, w)
    }

    pub fn accepts(&self, w: &[SLetter]) -> bool {
        self.trace(w) == Some(self.final_)
    }

    pub fn edges_from(&self, v: VertexId) -> impl Iterator<Item = (SLetter, VertexId)> + '_ {
        let width = self.letters * 2;
        let base = v as usize * width;
        (0..width).filter_map(move |c| {
            let t = self.table[base + c];
            if t == ABSENT {
                None
            } else {
                Some((SLetter::from_code(c), t))
            }
        })
    }

    /// For each signed-letter code, the vertices that have an outgoing edge
    /// with that letter, in ascending order. One sequential pass over the
    /// transition table; lets callers that scan "all vertices where a trace of
    /// `w` could start" visit only the vertices with a `w[0]`-edge.
    pub fn out_edge_index(&self) -> Vec<Vec<VertexId>> {
        let width = self.letters * 2;
        let mut idx = vec![Vec::new(); width];
        for v in 0..self.vertices {
            let base = v * width;
            for (c, slot) in idx.iter_mut().enumerate() {
                if self.table[base + c] != ABSENT {
                    slot.push(v as VertexId);
                }
            }
        }
        idx
    }

    /// Number of positive-letter edges (each involutive pair counted once).
    pub fn positive_edge_count(&self) -> usize {
        let mut n = 0;
        for v in 0..self.vertices as VertexId {
            n += self.edges_from(v).filter(|(x, _)| x.is_positive()).count();
        }
        n
    }

    /// Complete one-vertex automaton: every signed letter loops.
    pub fn is_complete_singleton(&self) -> bool {
        self.vertices == 1 && self.table.iter().all(|&t| t == 0)
    }

    /// BFS numbering from the initial root, expanding edges in signed-letter
    /// order. Two automata are isomorphic as birooted labelled graphs iff
    /// their canonical forms are equal. Panics if some vertex is unreachable
    /// (inverse automata are connected by invariant).
    pub fn canonical_form(&self) -> CanonicalForm {
        let n = self.vertices;
        let mut renum = vec![ABSENT; n];
        let mut order = Vec::with_capacity(n);
        renum[self.initial as usize] = 0;
        order.push(self.initial);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for (_, q) in self.edges_from(v) {
                if renum[q as usize] == ABSENT {
                    renum[q as usize] = order.len() as u32;
                    order.push(q);
                }
            }
        }
        assert_eq!(order.len(), n, "automaton is not connected");
        let mut edges = Vec::new();
        for (new_v, &old_v) in order.iter().enumerate() {
            for (x, q) in self.edges_from(old_v) {
                edges.push((new_v as u32, x, renum[q as usize]));
            }
        }
        CanonicalForm {
            letters: self.letters,
            vertices: n,
            edges,
            final_: renum[self.final_ as usize],
        }
    }

    /// Birooted labelled-graph isomorphism.
    pub fn iso(&self, other: &InverseAutomaton) -> bool {
        self.letters == other.letters
            && self.vertices == other.vertices
            && self.canonical_form() == other.canonical_form()
    }

    /// Checks that `map` (indexed by this automaton's vertices) is a
    /// root-preserving morphism into `other`.
    pub fn maps_into(&self, other: &InverseAutomaton, map: &[VertexId]) -> bool {
        if map.len() != self.vertices {
            return false;
        }
        if map[self.initial as usize] != other.initial
            || map[self.final_ as usize] != other.final_
        {
            return false;
        }
        for v in 0..self.vertices as VertexId {
            for (x, q) in self.edges_from(v) {
                if other.step(map[v as usize], x) != Some(map[q as usize]) {
                    return false;
                }
            }
        }
        true
    }

    /// GraphViz export: positive-letter edges only, canonical numbering, the
    /// initial root double-circled and the final root filled. Byte output is
    /// stable for isomorphic inputs.
    pub fn export_dot(&self, alphabet: &Alphabet) -> String {
        let cf = self.canonical_form();
        let mut out = String::new();
        out.push_str("digraph inverse_automaton {\n");
        out.push_str("  rankdir=LR;\n");
        out.push_str("  node [shape=circle];\n");
        for v in 0..cf.vertices as u32 {
            let mut attrs = Vec::new();
            if v == 0 {
                attrs.push("shape=doublecircle");
            }
            if v == cf.final_ {
                attrs.push("style=filled");
                attrs.push("fillcolor=gray85");
            }
            if attrs.is_empty() {
                writeln!(out, "  {};", v).unwrap();
            } else {
                writeln!(out, "  {} [{}];", v, attrs.join(", ")).unwrap();
            }
        }
        for &(p, x, q) in cf.edges.iter().filter(|(_, x, _)| x.is_positive()) {
            writeln!(out, "  {} -> {} [label=\"{}\"];", p, q, alphabet.name(x.letter())).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Canonical presentation of a birooted automaton; equality is isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalForm {
    pub letters: usize,
    pub vertices: usize,
    /// All signed edges under the canonical numbering, sorted by source then
    /// letter (BFS emission order).
    pub edges: Vec<(u32, SLetter, u32)>,
    pub final_: u32,
}

/// Multi-edge involutive automaton; the mutable form used for grafting.
#[derive(Clone, Debug)]
pub struct PendingAutomaton {
    letters: usize,
    adj: Vec<Vec<(SLetter, VertexId)>>,
    initial: VertexId,
    final_: VertexId,
}

impl PendingAutomaton {
    pub fn new(letters: usize, vertices: usize, initial: VertexId, final_: VertexId) -> Self {
        PendingAutomaton { letters, adj: vec![Vec::new(); vertices], initial, final_ }
    }

    /// The linear automaton of a word: vertices `0..=|w|`, initial 0, final `|w|`.
    pub fn linear(letters: usize, w: &[SLetter]) -> Self {
        let mut a = PendingAutomaton::new(letters, w.len() + 1, 0, w.len() as VertexId);
        for (i, &x) in w.iter().enumerate() {
            a.add_edge(i as VertexId, x, (i + 1) as VertexId);
        }
        a
    }

    pub fn from_automaton(a: &InverseAutomaton) -> Self {
        let mut adj = vec![Vec::new(); a.vertices];
        for v in 0..a.vertices as VertexId {
            for (x, q) in a.edges_from(v) {
                adj[v as usize].push((x, q));
            }
        }
        PendingAutomaton { letters: a.letters, adj, initial: a.initial, final_: a.final_ }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn initial(&self) -> VertexId {
        self.initial
    }

    pub fn final_vertex(&self) -> VertexId {
        self.final_
    }

    pub fn set_initial(&mut self, v: VertexId) {
        assert!((v as usize) < self.adj.len());
        self.initial = v;
    }

    pub fn set_final(&mut self, v: VertexId) {
        assert!((v as usize) < self.adj.len());
        self.final_ = v;
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        (self.adj.len() - 1) as VertexId
    }

    /// Adds `p -x-> q` together with its reverse `q -x'-> p`.
    pub fn add_edge(&mut self, p: VertexId, x: SLetter, q: VertexId) {
        self.adj[p as usize].push((x, q));
        self.adj[q as usize].push((x.inverse(), p));
    }

    /// Grafts a fresh path labelled `w` from `p` to `q`; interior vertices are new.
    pub fn graft_path(&mut self, p: VertexId, w: &[SLetter], q: VertexId) {
        debug_assert!(!w.is_empty());
        let mut cur = p;
        for &x in &w[..w.len() - 1] {
            let next = self.add_vertex();
            self.add_edge(cur, x, next);
            cur = next;
        }
        self.add_edge(cur, w[w.len() - 1], q);
    }

    pub fn fold(self) -> InverseAutomaton {
        self.fold_impl(None).0
    }

    /// Folding with a randomized processing order; confluence means the
    /// canonical form of the result does not depend on the seed.
    pub fn fold_seeded(self, seed: u64) -> InverseAutomaton {
        self.fold_impl(Some(seed)).0
    }

    /// Folds and also reports where every vertex went: `map[v]` is the folded
    /// automaton's vertex holding `v`'s class.
    pub fn fold_with_map(self) -> (InverseAutomaton, Vec<VertexId>) {
        self.fold_impl(None)
    }

    /// Like `fold_with_map`, but only rescans from `queue_seeds` outward.
    /// Sound when every vertex outside the seeds already has a clash-free,
    /// duplicate-free list, e.g. when this graph is a folded automaton plus
    /// some grafts and the seeds cover every vertex the grafts touched.
    pub fn fold_with_map_from(self, queue_seeds: &[VertexId]) -> (InverseAutomaton, Vec<VertexId>) {
        self.fold_impl_queued(None, Some(queue_seeds))
    }

    fn fold_impl(self, seed: Option<u64>) -> (InverseAutomaton, Vec<VertexId>) {
        self.fold_impl_queued(seed, None)
    }

    fn fold_impl_queued(
        mut self,
        seed: Option<u64>,
        queue_seeds: Option<&[VertexId]>,
    ) -> (InverseAutomaton, Vec<VertexId>) {
        let n = self.adj.len();
        let width = self.letters * 2;
        let mut parent: Vec<u32> = (0..n as u32).collect();
        let mut rank: Vec<u8> = vec![0; n];

        fn find(parent: &mut [u32], mut v: u32) -> u32 {
            while parent[v as usize] != v {
                let g = parent[parent[v as usize] as usize];
                parent[v as usize] = g;
                v = g;
            }
            v
        }

        let mut order: Vec<u32> = match queue_seeds {
            Some(seeds) => seeds.to_vec(),
            None => (0..n as u32).collect(),
        };
        if let Some(s) = seed {
            let mut rng = rand::rngs::StdRng::seed_from_u64(s);
            order.shuffle(&mut rng);
            for list in self.adj.iter_mut() {
                list.shuffle(&mut rng);
            }
        }
        let mut queue: VecDeque<u32> = order.into();

        // Per-scan scratch map letter -> position in `clean`, generation-stamped
        // so it clears in O(1) between scans.
        let mut mark: Vec<u32> = vec![0; width];
        let mut pos: Vec<u32> = vec![0; width];
        let mut gen: u32 = 0;

        // Each pop rescans one class list: duplicates are dropped, clashes
        // union the two targets inline (appending the absorbed class's list to
        // the survivor and re-enqueueing it). Unions total at most n-1, so the
        // loop terminates; when the queue drains every class list is
        // duplicate-free and clash-free.
        while let Some(v0) = queue.pop_front() {
            let v = find(&mut parent, v0);
            let list = std::mem::take(&mut self.adj[v as usize]);
            if list.is_empty() {
                continue;
            }
            gen += 1;
            let mut clean: Vec<(SLetter, u32)> = Vec::with_capacity(list.len().min(width));
            for &(x, q0) in &list {
                let mut q = find(&mut parent, q0);
                let c = x.code();
                if mark[c] == gen {
                    let idx = pos[c] as usize;
                    let q1 = find(&mut parent, clean[idx].1);
                    if q1 == q {
                        clean[idx].1 = q;
                        continue;
                    }
                    // clash: fold the two targets together
                    let (keep, absorb) = if rank[q as usize] >= rank[q1 as usize] {
                        (q, q1)
                    } else {
                        (q1, q)
                    };
                    if rank[keep as usize] == rank[absorb as usize] {
                        rank[keep as usize] += 1;
                    }
                    parent[absorb as usize] = keep;
                    let absorbed = std::mem::take(&mut self.adj[absorb as usize]);
                    self.adj[keep as usize].extend(absorbed);
                    queue.push_back(keep);
                    q = keep;
                    clean[idx].1 = keep;
                } else {
                    mark[c] = gen;
                    pos[c] = clean.len() as u32;
                    clean.push((x, q));
                }
            }
            // v itself may have been absorbed by an inline union.
            let v_now = find(&mut parent, v);
            if self.adj[v_now as usize].is_empty() {
                self.adj[v_now as usize] = clean;
            } else {
                // merged-in edges have not been scanned against `clean` yet
                self.adj[v_now as usize].extend(clean);
                queue.push_back(v_now);
            }
        }

        // Compact representatives in ascending order; a fold with no merges
        // keeps the original numbering.
        let mut newid = vec![ABSENT; n];
        let mut count: u32 = 0;
        for v in 0..n as u32 {
            if find(&mut parent, v) == v {
                newid[v as usize] = count;
                count += 1;
            }
        }
        let mut table = vec![ABSENT; count as usize * width];
        for v in 0..n as u32 {
            if find(&mut parent, v) != v {
                continue;
            }
            let base = newid[v as usize] as usize * width;
            for &(x, q0) in &self.adj[v as usize] {
                let q = newid[find(&mut parent, q0) as usize];
                let slot = &mut table[base + x.code()];
                debug_assert!(*slot == ABSENT || *slot == q, "fold left a clash behind");
                *slot = q;
            }
        }
        let initial = newid[find(&mut parent, self.initial) as usize];
        let final_ = newid[find(&mut parent, self.final_) as usize];
        let map: Vec<VertexId> =
            (0..n as u32).map(|v| newid[find(&mut parent, v) as usize]).collect();
        (
            InverseAutomaton {
                letters: self.letters,
                vertices: count as usize,
                table,
                initial,
                final_,
            },
            map,
        )
    }
}
