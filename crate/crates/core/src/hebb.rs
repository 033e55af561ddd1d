//! Generalized Hebbian learning of logical clauses.
//!
//! Each clause defines an environment of events: its satisfying assignments.
//! Presenting an event to an order-n Hebb rule increments, for every
//! nonempty subset T of the clause's atoms, the weight `w_T` by the learning
//! rate times the product of the participating spins.
//!
//! With the rate `1/2^n` per arity-n clause, summing the rule over all
//! 2^n - 1 satisfying assignments reproduces the compiled cost weights
//! exactly: over all 2^n assignments the spin products sum to zero, so the
//! satisfying ones sum to minus the violating product, which is `2^n` times
//! the negated cost coefficient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dyadic::DyadicRational;
use crate::energy::{Monomial, WeightSet};
use crate::logic::{Clause, LogicProgram};

/// One clause-satisfying assignment presented to the learner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    head: u32,
    /// (atom index, spin), ascending by atom index.
    assignment: Vec<(u32, i8)>,
}

impl Event {
    pub fn head(&self) -> u32 {
        self.head
    }

    pub fn assignment(&self) -> &[(u32, i8)] {
        &self.assignment
    }

    /// Arity of the originating clause.
    pub fn arity(&self) -> usize {
        self.assignment.len()
    }

    /// Satisfying means not the violating assignment: the head is true or
    /// some body atom is false.
    pub fn satisfies_clause(&self) -> bool {
        self.assignment
            .iter()
            .any(|&(atom, spin)| if atom == self.head { spin == 1 } else { spin == -1 })
    }
}

/// Per-arity learning rates; the default `1/2^n` is the unique uniform
/// schedule under which exhaustive learning equals compiled weights.
#[derive(Debug, Clone)]
pub struct LearningSchedule {
    scale: DyadicRational,
}

impl LearningSchedule {
    /// Rates scaled by a positive factor. Rescaling all rates rescales all
    /// learned weights by the same factor, which the sign dynamics ignore.
    pub fn scaled(scale: DyadicRational) -> Self {
        assert!(scale.signum() > 0, "learning rates must be positive");
        LearningSchedule { scale }
    }

    /// Rate for an arity-n clause.
    pub fn rate(&self, arity: usize) -> DyadicRational {
        self.scale.div_pow2(arity as u32)
    }
}

impl Default for LearningSchedule {
    fn default() -> Self {
        LearningSchedule { scale: DyadicRational::ONE }
    }
}

const MAX_EVENT_ARITY: usize = 48;

/// Builds the assignment whose code has bit j set iff the j-th clause atom
/// (ascending index order) is false.
fn event_from_code(clause: &Clause, atoms: &[u32], code: u64) -> Event {
    let assignment = atoms
        .iter()
        .enumerate()
        .map(|(j, &atom)| (atom, if code >> j & 1 == 1 { -1 } else { 1 }))
        .collect();
    Event { head: clause.head(), assignment }
}

/// The code of the violating assignment: head false, body true.
fn violating_code(clause: &Clause, atoms: &[u32]) -> u64 {
    let head_pos = atoms.binary_search(&clause.head()).expect("head is a clause atom");
    1u64 << head_pos
}

/// All 2^n - 1 satisfying assignments of the clause, in binary counting
/// order over its atoms (ascending index, all-true first).
pub fn clause_events(clause: &Clause) -> Vec<Event> {
    let n = clause.arity();
    assert!(n <= MAX_EVENT_ARITY, "clause arity {n} too large to enumerate events");
    let atoms = clause.sorted_atoms();
    let skip = violating_code(clause, &atoms);
    (0..1u64 << n)
        .filter(|&code| code != skip)
        .map(|code| event_from_code(clause, &atoms, code))
        .collect()
}

/// One Hebbian increment: for every nonempty subset T of the event's atoms,
/// `w_T += rate(n) * prod_{i in T} assignment(i)`. The constant term is
/// never touched.
pub fn apply_hebb(mut weights: WeightSet, event: &Event, schedule: &LearningSchedule) -> WeightSet {
    let n = event.arity();
    let rate = schedule.rate(n);
    apply_scaled_hebb(&mut weights, event, rate);
    weights
}

fn apply_scaled_hebb(weights: &mut WeightSet, event: &Event, rate: DyadicRational) {
    let n = event.arity();
    debug_assert!(event.satisfies_clause(), "learning events must satisfy their clause");
    for mask in 1u64..1u64 << n {
        let mut indices = Vec::with_capacity(mask.count_ones() as usize);
        let mut prod = 1i8;
        for (j, &(atom, spin)) in event.assignment().iter().enumerate() {
            if mask >> j & 1 == 1 {
                indices.push(atom);
                prod *= spin;
            }
        }
        let delta = if prod > 0 { rate } else { -rate };
        weights.add_weight(Monomial::new(indices), delta);
    }
}

/// Applies the Hebb rule once per event of every clause, with the default
/// `1/2^n` rates. The result equals the nonconstant part of the compiled
/// cost weights exactly; the constant term stays zero.
pub fn learn_exhaustive(program: &LogicProgram) -> WeightSet {
    learn_exhaustive_with(program, &LearningSchedule::default())
}

/// Exhaustive learning under an explicit rate schedule.
pub fn learn_exhaustive_with(program: &LogicProgram, schedule: &LearningSchedule) -> WeightSet {
    let mut weights = WeightSet::zero(program.num_atoms());
    for clause in program.clauses() {
        let rate = schedule.rate(clause.arity());
        for event in clause_events(clause) {
            apply_scaled_hebb(&mut weights, &event, rate);
        }
    }
    weights
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LearnError {
    #[error("sampled learning needs at least one event")]
    NoEvents,
}

/// Stochastic learning: each step draws a clause uniformly, then one of its
/// satisfying assignments uniformly, and applies the Hebb rule with the
/// per-step rate `rate(n) * (2^n - 1)`. That correction makes the expected
/// weight after M steps equal `M / num_clauses` times the exhaustive weights
/// under the same schedule, whatever mix of arities the program has.
/// Deterministic given the seed. An empty program learns nothing.
pub fn learn_sampled(
    program: &LogicProgram,
    num_events: usize,
    schedule: &LearningSchedule,
    seed: u64,
) -> Result<WeightSet, LearnError> {
    if num_events == 0 {
        return Err(LearnError::NoEvents);
    }
    let mut weights = WeightSet::zero(program.num_atoms());
    if program.clauses().is_empty() {
        return Ok(weights);
    }
    struct Sampler {
        atoms: Vec<u32>,
        skip: u64,
        rate: DyadicRational,
    }
    let samplers: Vec<Sampler> = program
        .clauses()
        .iter()
        .map(|clause| {
            let n = clause.arity();
            assert!(n <= MAX_EVENT_ARITY, "clause arity {n} too large to sample events");
            let atoms = clause.sorted_atoms();
            let skip = violating_code(clause, &atoms);
            let satisfying = DyadicRational::from_int((1i128 << n) - 1);
            Sampler { atoms, skip, rate: schedule.rate(n) * satisfying }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..num_events {
        let which = rng.gen_range(0..program.clauses().len());
        let clause = &program.clauses()[which];
        let sampler = &samplers[which];
        let n = clause.arity();
        let draw = rng.gen_range(0..(1u64 << n) - 1);
        let code = if draw < sampler.skip { draw } else { draw + 1 };
        let event = event_from_code(clause, &sampler.atoms, code);
        apply_scaled_hebb(&mut weights, &event, sampler.rate);
    }
    Ok(weights)
}
