//! Shared helpers for the integration suites: a bounded rewriting oracle for
//! free inverse-semigroup equality, random generators, and independently
//! derived relation-count formulas.

#![allow(dead_code)]

use invsemi::alphabet::{Letter, SLetter};
use invsemi::machine::{Action, CounterMachine, Instruction};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashMap;

pub const HALT1: &str = "states i f\ninitial i\nfinal f\ntapes 2\nins i 1 + f\n";
pub const STRAIGHT: &str =
    "states i p f\ninitial i\nfinal f\ntapes 2\nins i 1 + p\nins p 2 + f\n";
pub const LOOP2: &str = "states i p f\ninitial i\nfinal f\ntapes 2\nins i 1 + p\nins p 2 + i\n";
pub const DEC: &str = "states i p f\ninitial i\nfinal f\ntapes 2\nins i 1 - p\nins p 2 + f\n";

/// Equality oracle for the free inverse semigroup on two generators, built by
/// exhaustive rewriting: every word up to `cap` letters is joined with every
/// word one triple-deletion, triple-insertion or idempotent-factor swap away,
/// all within the cap, and classes are read off a union-find.
///
/// Words are coded over `u8` exactly like `SLetter`: `2*letter + sign`.
pub struct VagnerOracle {
    ids: HashMap<Vec<u8>, u32>,
    parent: Vec<u32>,
}

fn is_inverse_pair(u: &[u8], v: &[u8]) -> bool {
    u.len() == v.len() && u.iter().zip(v.iter().rev()).all(|(a, b)| a ^ 1 == *b)
}

/// `w` is literally `u u'` for some `u`.
fn is_idempotent_shape(w: &[u8]) -> bool {
    w.len() % 2 == 0 && !w.is_empty() && {
        let h = w.len() / 2;
        is_inverse_pair(&w[..h], &w[h..])
    }
}

impl VagnerOracle {
    pub fn build(cap: usize) -> VagnerOracle {
        let mut ids: HashMap<Vec<u8>, u32> = HashMap::new();
        let mut words: Vec<Vec<u8>> = Vec::new();
        for len in 1..=cap {
            let mut w = vec![0u8; len];
            loop {
                ids.insert(w.clone(), words.len() as u32);
                words.push(w.clone());
                let mut pos = len;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    if w[pos] < 3 {
                        w[pos] += 1;
                        break;
                    }
                    w[pos] = 0;
                }
                if w.iter().all(|&c| c == 0) {
                    break;
                }
            }
        }

        let mut parent: Vec<u32> = (0..words.len() as u32).collect();
        fn find(parent: &mut [u32], mut i: u32) -> u32 {
            while parent[i as usize] != i {
                parent[i as usize] = parent[parent[i as usize] as usize];
                i = parent[i as usize];
            }
            i
        }
        let union = |parent: &mut Vec<u32>, a: u32, b: u32| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                parent[ra as usize] = rb;
            }
        };

        for id in 0..words.len() as u32 {
            let w = words[id as usize].clone();
            let n = w.len();
            let mut joined: Vec<Vec<u8>> = Vec::new();
            // u u' u -> u
            for k in 1..=n / 3 {
                for i in 0..=n - 3 * k {
                    if is_inverse_pair(&w[i..i + k], &w[i + k..i + 2 * k])
                        && w[i + 2 * k..i + 3 * k] == w[i..i + k]
                    {
                        let mut img = w[..i + k].to_vec();
                        img.extend_from_slice(&w[i + 3 * k..]);
                        joined.push(img);
                    }
                }
            }
            // u -> u u' u, capped
            for k in 1..=(cap.saturating_sub(n) / 2).min(n) {
                for i in 0..=n - k {
                    let u = &w[i..i + k];
                    let mut img = w[..i + k].to_vec();
                    img.extend(u.iter().rev().map(|c| c ^ 1));
                    img.extend_from_slice(&w[i..]);
                    joined.push(img);
                }
            }
            // (u u')(v v') -> (v v')(u u')
            for i in 0..n {
                for mid in (i + 2..n).step_by(2) {
                    if !is_idempotent_shape(&w[i..mid]) {
                        continue;
                    }
                    for end in (mid + 2..=n).step_by(2) {
                        if is_idempotent_shape(&w[mid..end]) {
                            let mut img = w[..i].to_vec();
                            img.extend_from_slice(&w[mid..end]);
                            img.extend_from_slice(&w[i..mid]);
                            img.extend_from_slice(&w[end..]);
                            joined.push(img);
                        }
                    }
                }
            }
            for img in joined {
                let other = ids[&img];
                union(&mut parent, id, other);
            }
        }
        VagnerOracle { ids, parent }
    }

    fn root(&mut self, w: &[u8]) -> u32 {
        let mut i = self.ids[w];
        while self.parent[i as usize] != i {
            self.parent[i as usize] = self.parent[self.parent[i as usize] as usize];
            i = self.parent[i as usize];
        }
        i
    }

    pub fn eq(&mut self, u: &[SLetter], v: &[SLetter]) -> bool {
        let cu: Vec<u8> = u.iter().map(|s| s.code() as u8).collect();
        let cv: Vec<u8> = v.iter().map(|s| s.code() as u8).collect();
        self.root(&cu) == self.root(&cv)
    }
}

/// All signed words of exactly `len` letters over a 2-letter alphabet.
pub fn all_words_2(len: usize) -> Vec<Vec<SLetter>> {
    let mut out = Vec::new();
    let mut w = vec![0u8; len];
    loop {
        out.push(w.iter().map(|&c| decode(c)).collect());
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if w[pos] < 3 {
                w[pos] += 1;
                break;
            }
            w[pos] = 0;
        }
    }
}

fn decode(c: u8) -> SLetter {
    let l = Letter(c as u16 / 2);
    if c % 2 == 0 {
        SLetter::pos(l)
    } else {
        SLetter::neg(l)
    }
}

pub fn random_word(rng: &mut impl Rng, letters: usize, max_len: usize) -> Vec<SLetter> {
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| {
            let l = Letter(rng.random_range(0..letters as u16));
            if rng.random_bool(0.5) {
                SLetter::pos(l)
            } else {
                SLetter::neg(l)
            }
        })
        .collect()
}

/// A connected involutive edge list, possibly nondeterministic, with roots.
pub struct RawGraph {
    pub letters: usize,
    pub vertices: usize,
    pub edges: Vec<(u32, SLetter, u32)>,
    pub initial: u32,
    pub final_: u32,
}

pub fn random_graph(rng: &mut impl Rng, max_vertices: usize) -> RawGraph {
    let vertices = rng.random_range(2..=max_vertices);
    let letters = rng.random_range(1..=3usize);
    let rand_sletter = |rng: &mut dyn rand::RngCore| {
        let l = Letter(rng.random_range(0..letters as u16));
        if rng.random_bool(0.5) {
            SLetter::pos(l)
        } else {
            SLetter::neg(l)
        }
    };
    let mut edges = Vec::new();
    for v in 1..vertices as u32 {
        let p = rng.random_range(0..v);
        edges.push((p, rand_sletter(rng), v));
    }
    for _ in 0..rng.random_range(0..=2 * vertices) {
        let p = rng.random_range(0..vertices as u32);
        let q = rng.random_range(0..vertices as u32);
        edges.push((p, rand_sletter(rng), q));
    }
    RawGraph {
        letters,
        vertices,
        edges,
        initial: rng.random_range(0..vertices as u32),
        final_: rng.random_range(0..vertices as u32),
    }
}

pub fn shuffled<T: Clone>(rng: &mut impl Rng, xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.shuffle(rng);
    v
}

/// Rejection-samples a deterministic and reversible two-counter machine. The
/// other two normal-form flags are left to chance so normalization has work
/// to do.
pub fn random_det_rev_machine(
    rng: &mut impl Rng,
    max_states: usize,
    max_instructions: usize,
) -> CounterMachine {
    for _ in 0..1_000_000 {
        let ns = rng.random_range(2..=max_states);
        let n_ins = rng.random_range(1..=max_instructions);
        let m = CounterMachine {
            states: (0..ns).map(|i| format!("s{i}")).collect(),
            initial: 0,
            final_: ns - 1,
            tapes: 2,
            instructions: (0..n_ins)
                .map(|_| Instruction {
                    from: rng.random_range(0..ns),
                    tape: rng.random_range(1..=2) as u8,
                    action: match rng.random_range(0..10) {
                        0 | 1 => Action::TestPos,
                        2 | 3 => Action::TestZero,
                        4 | 5 | 6 => Action::Inc,
                        7 | 8 => Action::Dec,
                        _ => Action::Stay,
                    },
                    to: rng.random_range(0..ns),
                })
                .collect(),
        };
        let chk = m.check();
        if chk.deterministic && chk.reversible {
            return m;
        }
    }
    panic!("rejection sampling failed to find a deterministic reversible machine");
}

pub struct ExpectedCounts {
    pub side: [usize; 2],
    pub amalgam: usize,
    pub core: usize,
}

/// Relation counts computed directly from the machine shape, independent of
/// the encoder: per side 4 commuting relations, one relation per test and two
/// per increment or decrement on that tape, and the absorption block
/// `2|X~| + |Q|(|X~|-3) + |Q|(|Q|-1) + 2` where `|X~|` counts signed side
/// letters. The joint presentation adds the two tapes plus `1 + |Q|`
/// identifications; the common core has `2|X~_U| + |Q|^2 + 2|Q|(|Q|-1)`.
pub fn expected_counts(m: &CounterMachine) -> ExpectedCounts {
    let q = m.states.len();
    let signed = 2 * (3 + q);
    let absorption = 2 * signed + q * (signed - 3) + q * (q - 1) + 2;
    let side = |tape: u8| -> usize {
        let ins: usize = m
            .instructions
            .iter()
            .filter(|i| i.tape == tape)
            .map(|i| match i.action {
                Action::TestPos | Action::TestZero => 1,
                Action::Inc | Action::Dec => 2,
                Action::Stay => panic!("count formulas need a normalized machine"),
            })
            .sum();
        4 + ins + absorption
    };
    let side = [side(1), side(2)];
    let signed_u = 2 * (q + 1);
    ExpectedCounts {
        side,
        amalgam: side[0] + side[1] + 1 + q,
        core: 2 * signed_u + q * q + 2 * q * (q - 1),
    }
}
