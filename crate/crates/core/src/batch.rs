//! Sweeps over many words or inputs at once. With the `parallel` feature the
//! work is spread over a rayon pool; the `_seq` variants always run on the
//! calling thread and back the benchmarks.

use crate::alphabet::{Letter, SLetter};
use crate::encode::EncodedAmalgam;
use crate::grid::{self, Agreement};
use crate::machine::CounterMachine;
use crate::presentation::Presentation;
use crate::stephen::{self, Budget, ClosureOutcome, ZeroCheckError, ZeroOutcome};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn close_words_seq(
    pres: &Presentation,
    words: &[Vec<SLetter>],
    budget: &Budget,
) -> Vec<ClosureOutcome> {
    words.iter().map(|w| stephen::close(pres, w, budget)).collect()
}

pub fn close_words(pres: &Presentation, words: &[Vec<SLetter>], budget: &Budget) -> Vec<ClosureOutcome> {
    #[cfg(feature = "parallel")]
    {
        words.par_iter().map(|w| stephen::close(pres, w, budget)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        close_words_seq(pres, words, budget)
    }
}

pub fn zero_sweep_seq(
    pres: &Presentation,
    zero: Letter,
    jobs: &[(Vec<SLetter>, Budget)],
) -> Vec<Result<ZeroOutcome, ZeroCheckError>> {
    jobs.iter().map(|(w, b)| stephen::is_zero(pres, zero, w, b)).collect()
}

/// Runs `is_zero` for each word and budget pair, spread over the pool.
pub fn zero_sweep(
    pres: &Presentation,
    zero: Letter,
    jobs: &[(Vec<SLetter>, Budget)],
) -> Vec<Result<ZeroOutcome, ZeroCheckError>> {
    #[cfg(feature = "parallel")]
    {
        jobs.par_iter().map(|(w, b)| stephen::is_zero(pres, zero, w, b)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        zero_sweep_seq(pres, zero, jobs)
    }
}

pub fn agree_sweep_seq(
    machine: &CounterMachine,
    am: &EncodedAmalgam,
    inputs: &[(u64, u64)],
    max_steps: usize,
    budget: &Budget,
) -> Vec<Result<Agreement, ZeroCheckError>> {
    inputs
        .iter()
        .map(|&(m, n)| grid::closure_agrees(machine, am, m, n, max_steps, budget))
        .collect()
}

pub fn agree_sweep(
    machine: &CounterMachine,
    am: &EncodedAmalgam,
    inputs: &[(u64, u64)],
    max_steps: usize,
    budget: &Budget,
) -> Vec<Result<Agreement, ZeroCheckError>> {
    #[cfg(feature = "parallel")]
    {
        inputs
            .par_iter()
            .map(|&(m, n)| grid::closure_agrees(machine, am, m, n, max_steps, budget))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        agree_sweep_seq(machine, am, inputs, max_steps, budget)
    }
}
