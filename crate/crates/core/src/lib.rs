//! Logic programming on higher-order Hopfield networks.
//!
//! This crate compiles propositional definite-clause programs into synaptic
//! weights by expanding the program's inconsistency cost over bipolar spins,
//! derives the same weights independently by generalized Hebbian learning
//! over clause-satisfying events, relaxes both networks with asynchronous
//! zero-temperature dynamics, and measures whether the two routes agree:
//! identical stable states, global-minima ratio one, Hamming distance zero.
//!
//! The pipeline is exact end to end. Clause costs, weights, energies, and
//! fields are dyadic rationals; floating point appears only when emitting
//! CSV and SVG artifacts.

pub mod dyadic;
pub mod dynamics;
pub mod energy;
pub mod experiment;
pub mod hebb;
pub mod logic;
pub mod plot;

pub use dyadic::{DyadicRational, Rational};
pub use dynamics::{
    default_tolerance, is_global, random_state, relax, sweep, update_neuron, RelaxationResult,
};
pub use energy::{
    clause_cost, compile_program, cost_to_weights, program_cost, to_tensor_convention,
    CostPolynomial, Monomial, TensorWeights, WeightSet,
};
pub use experiment::{
    derive_seed, distance_to_nearest_model, run_experiment, run_trial, write_csv,
    ExperimentConfig, HebbMode, MetricsRow, SweepParam, TrialOutcome,
};
pub use hebb::{
    apply_hebb, clause_events, learn_exhaustive, learn_exhaustive_with, learn_sampled, Event,
    LearningSchedule,
};
pub use logic::{
    count_violations, enumerate_models, format_program, generate_random_program, is_violated,
    parse_program, Atom, Clause, LogicProgram, NetworkState, ParseError,
};
pub use plot::{render_plot, Metric};
