//! Asynchronous zero-temperature spin dynamics over higher-order weights.
//!
//! Each update aligns one spin with the sign of its local field; a zero
//! field retains the current spin, so every flip strictly lowers the energy
//! by `2|h_i|` and relaxation always terminates at a state no full sweep can
//! change. Positive rescaling of the weights never alters a trajectory.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{DyadicRational, Rational};
use crate::energy::{CostPolynomial, WeightSet};
use crate::logic::NetworkState;

/// Outcome of one relaxation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxationResult {
    pub final_state: NetworkState,
    pub final_energy: DyadicRational,
    /// Sweeps performed, counting the closing zero-flip sweep.
    pub sweeps_used: usize,
    pub total_flips: usize,
    /// True iff the last sweep performed zero flips.
    pub stable: bool,
    /// Energy after each sweep; non-increasing.
    pub energy_trace: Vec<DyadicRational>,
}

/// Uniform random bipolar state; deterministic given the seed.
pub fn random_state(num_atoms: usize, seed: u64) -> NetworkState {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    NetworkState::new((0..num_atoms).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())
}

/// One asynchronous update: spin i aligns with sign(h_i), retaining its
/// value on a zero field. Returns the new state and whether it flipped.
pub fn update_neuron(
    weights: &WeightSet,
    state: &NetworkState,
    atom: usize,
) -> (NetworkState, bool) {
    let h = weights.local_field(state, atom);
    let target = match h.signum() {
        1 => 1,
        -1 => -1,
        _ => state.spin(atom),
    };
    if target == state.spin(atom) {
        (state.clone(), false)
    } else {
        let mut next = state.clone();
        next.set(atom, target);
        (next, true)
    }
}

/// A full asynchronous pass in the given update order, each update seeing
/// the effects of the previous ones. Returns the new state and flip count.
pub fn sweep(
    weights: &WeightSet,
    state: &NetworkState,
    order: &[usize],
) -> (NetworkState, usize) {
    debug_assert!(is_permutation(order, state.len()));
    let mut current = state.clone();
    let mut flips = 0;
    for &i in order {
        let (next, flipped) = update_neuron(weights, &current, i);
        current = next;
        flips += usize::from(flipped);
    }
    (current, flips)
}

fn is_permutation(order: &[usize], len: usize) -> bool {
    let mut seen = vec![false; len];
    order.len() == len
        && order.iter().all(|&i| {
            if i < len && !seen[i] {
                seen[i] = true;
                true
            } else {
                false
            }
        })
}

/// Per-atom view of the weight terms, so a local field touches only the
/// monomials that actually contain the atom.
struct FieldIndex {
    terms: Vec<(Vec<u32>, DyadicRational)>,
    by_atom: Vec<Vec<u32>>,
}

impl FieldIndex {
    fn new(weights: &WeightSet) -> Self {
        let mut terms = Vec::with_capacity(weights.weights().len());
        let mut by_atom = vec![Vec::new(); weights.num_atoms()];
        for (m, &w) in weights.weights() {
            let id = terms.len() as u32;
            for &a in m.atoms() {
                by_atom[a as usize].push(id);
            }
            terms.push((m.atoms().to_vec(), w));
        }
        FieldIndex { terms, by_atom }
    }

    fn local_field(&self, state: &NetworkState, atom: usize) -> DyadicRational {
        let mut h = DyadicRational::ZERO;
        for &id in &self.by_atom[atom] {
            let (atoms, w) = &self.terms[id as usize];
            let mut prod = 1i8;
            for &j in atoms {
                if j as usize != atom {
                    prod *= state.spin(j as usize);
                }
            }
            h += if prod > 0 { *w } else { -*w };
        }
        h
    }
}

/// Relaxation: repeated sweeps with a fresh seeded random permutation each
/// time, until a sweep flips nothing or `max_sweeps` is reached. Records the
/// energy after every sweep. Deterministic given the initial state and seed.
pub fn relax(
    weights: &WeightSet,
    initial: &NetworkState,
    max_sweeps: usize,
    seed: u64,
) -> RelaxationResult {
    assert!(max_sweeps >= 1, "at least one sweep is required");
    assert_eq!(initial.len(), weights.num_atoms(), "state length must match universe");
    let index = FieldIndex::new(weights);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..weights.num_atoms()).collect();
    let mut state = initial.clone();
    let mut energy_trace = Vec::new();
    let mut total_flips = 0;
    let mut stable = false;
    let mut sweeps_used = 0;

    for _ in 0..max_sweeps {
        order.shuffle(&mut rng);
        let mut flips = 0;
        for &i in &order {
            let h = index.local_field(&state, i);
            let target = match h.signum() {
                1 => 1,
                -1 => -1,
                _ => state.spin(i),
            };
            if target != state.spin(i) {
                state.set(i, target);
                flips += 1;
            }
        }
        sweeps_used += 1;
        total_flips += flips;
        energy_trace.push(weights.energy(&state));
        if flips == 0 {
            stable = true;
            break;
        }
    }

    RelaxationResult {
        final_energy: *energy_trace.last().expect("at least one sweep ran"),
        final_state: state,
        sweeps_used,
        total_flips,
        stable,
        energy_trace,
    }
}

/// Global-minimum test: the exact cost at the state is at most `tolerance`.
/// With the default tolerance of 1/1000 this accepts exactly the states
/// violating zero clauses, since costs are integers.
pub fn is_global(cost: &CostPolynomial, state: &NetworkState, tolerance: &Rational) -> bool {
    cost.evaluate(state).to_rational() <= *tolerance
}

/// The tolerance used throughout: 1/1000.
pub fn default_tolerance() -> Rational {
    Rational::new(1, 1000)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{compile_program, program_cost};
    use crate::logic::parse_program;

    const EXAMPLE_PROGRAM: &str = "A <- B, C.\nD <- B.\nC.\n";

    fn state(spins: &[i8]) -> NetworkState {
        NetworkState::new(spins.to_vec())
    }

    #[test]
    fn random_state_shape_and_determinism() {
        let s = random_state(4, 11);
        assert_eq!(s.len(), 4);
        assert!(s.spins().iter().all(|&v| v == 1 || v == -1));
        assert_eq!(s, random_state(4, 11));
        let one = random_state(1, 5);
        assert!(one.spin(0) == 1 || one.spin(0) == -1);
    }

    #[test]
    fn update_flips_false_fact() {
        let p = parse_program("C.").unwrap();
        let ws = compile_program(&p);
        let (next, flipped) = update_neuron(&ws, &state(&[-1]), 0);
        assert!(flipped);
        assert_eq!(next.spin(0), 1);
    }

    #[test]
    fn zero_field_retains_spin() {
        let ws = WeightSet::zero(2);
        let s = state(&[-1, 1]);
        let (next, flipped) = update_neuron(&ws, &s, 0);
        assert!(!flipped);
        assert_eq!(next, s);
    }

    #[test]
    fn aligned_spin_does_not_flip() {
        let p = parse_program(EXAMPLE_PROGRAM).unwrap();
        let ws = compile_program(&p);
        // h_A = 1/2 > 0 at the all-true state
        let (next, flipped) = update_neuron(&ws, &state(&[1, 1, 1, 1]), 0);
        assert!(!flipped);
        assert_eq!(next.spin(0), 1);
    }

    #[test]
    fn sweep_on_zero_weights_is_identity() {
        let ws = WeightSet::zero(3);
        let s = state(&[1, -1, 1]);
        let (next, flips) = sweep(&ws, &s, &[2, 0, 1]);
        assert_eq!(next, s);
        assert_eq!(flips, 0);
    }

    #[test]
    fn sweep_fixes_false_fact() {
        let p = parse_program("C.").unwrap();
        let ws = compile_program(&p);
        let (next, flips) = sweep(&ws, &state(&[-1]), &[0]);
        assert_eq!(next, state(&[1]));
        assert_eq!(flips, 1);
        let (again, flips) = sweep(&ws, &next, &[0]);
        assert_eq!(again, next);
        assert_eq!(flips, 0);
    }

    #[test]
    fn indexed_field_matches_naive_field() {
        let p = parse_program(EXAMPLE_PROGRAM).unwrap();
        let ws = compile_program(&p);
        let index = FieldIndex::new(&ws);
        for mask in 0..16u32 {
            let s = state(
                &(0..4)
                    .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
                    .collect::<Vec<i8>>(),
            );
            for i in 0..4 {
                assert_eq!(index.local_field(&s, i), ws.local_field(&s, i));
            }
        }
    }

    #[test]
    fn relax_example_program_reaches_a_model() {
        let p = parse_program(EXAMPLE_PROGRAM).unwrap();
        let ws = compile_program(&p);
        for seed in 0..20 {
            let s0 = random_state(4, seed);
            let result = relax(&ws, &s0, 100, seed.wrapping_add(991));
            assert!(result.stable);
            assert_eq!(result.final_energy, DyadicRational::ZERO);
            assert_eq!(result.final_state.spin(2), 1, "every model has C true");
        }
    }

    #[test]
    fn relax_on_zero_weights_stops_after_one_sweep() {
        let ws = WeightSet::zero(5);
        let s0 = random_state(5, 3);
        let result = relax(&ws, &s0, 100, 17);
        assert!(result.stable);
        assert_eq!(result.sweeps_used, 1);
        assert_eq!(result.total_flips, 0);
        assert_eq!(result.final_state, s0);
        assert_eq!(result.energy_trace, vec![DyadicRational::ZERO]);
    }

    #[test]
    fn energy_trace_is_non_increasing() {
        let p = parse_program(EXAMPLE_PROGRAM).unwrap();
        let ws = compile_program(&p);
        for seed in 0..50 {
            let s0 = random_state(4, seed);
            let result = relax(&ws, &s0, 100, seed ^ 0xabcd);
            for pair in result.energy_trace.windows(2) {
                assert!(pair[1] <= pair[0], "energy rose within a relaxation");
            }
        }
    }

    #[test]
    fn positive_scaling_preserves_trajectories() {
        let p = parse_program(EXAMPLE_PROGRAM).unwrap();
        let ws = compile_program(&p);
        let scaled = ws.scaled(DyadicRational::from_int(7));
        for seed in 0..20 {
            let s0 = random_state(4, seed);
            let a = relax(&ws, &s0, 100, seed.wrapping_mul(31));
            let b = relax(&scaled, &s0, 100, seed.wrapping_mul(31));
            assert_eq!(a.final_state, b.final_state);
            assert_eq!(a.sweeps_used, b.sweeps_used);
            assert_eq!(a.total_flips, b.total_flips);
            let seven = DyadicRational::from_int(7);
            for (ea, eb) in a.energy_trace.iter().zip(&b.energy_trace) {
                assert_eq!(*ea * seven, *eb);
            }
        }
    }

    #[test]
    fn global_test_uses_exact_cost() {
        let p = parse_program(EXAMPLE_PROGRAM).unwrap();
        let cost = program_cost(&p);
        let tol = default_tolerance();
        assert!(is_global(&cost, &state(&[1, 1, 1, 1]), &tol));
        assert!(!is_global(&cost, &state(&[-1, -1, -1, -1]), &tol));
        let empty = CostPolynomial::zero();
        assert!(is_global(&empty, &state(&[1, 1, 1, 1]), &Rational::from_integer(0)));
    }
}
