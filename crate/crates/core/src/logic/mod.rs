//! Propositional definite-clause logic programs and their bipolar semantics.
//!
//! A program is a set of clauses `head <- b1, .., bk.` over a universe of
//! atoms. Truth values live on spins: `+1` is true, `-1` is false. A clause
//! has exactly one assignment of its own atoms that falsifies it (head false,
//! body all true), which is what both the cost compiler and the event-based
//! learner are built around.

mod parser;

pub use parser::{parse_program, ParseError, ParseErrorKind};

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A propositional atom: a name plus its 0-based index in the program's
/// atom universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub name: String,
    pub index: u32,
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A definite clause `head <- body`, stored as atom indices. All atoms in
/// a clause are pairwise distinct so that the derived weights stay
/// zero-diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    head: u32,
    body: Vec<u32>,
}

impl Clause {
    pub fn new(head: u32, body: Vec<u32>) -> Result<Self, ProgramError> {
        let clause = Clause { head, body };
        let mut seen = std::collections::BTreeSet::new();
        for atom in clause.atoms() {
            if !seen.insert(atom) {
                return Err(ProgramError::DuplicateAtomInClause { index: atom });
            }
        }
        Ok(clause)
    }

    pub fn head(&self) -> u32 {
        self.head
    }

    pub fn body(&self) -> &[u32] {
        &self.body
    }

    /// Head count (1) + body length.
    pub fn arity(&self) -> usize {
        1 + self.body.len()
    }

    /// All clause atoms, head first.
    pub fn atoms(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(self.head).chain(self.body.iter().copied())
    }

    /// Clause atoms in ascending index order.
    pub fn sorted_atoms(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.atoms().collect();
        v.sort_unstable();
        v
    }

    /// The spin atom `i` takes in this clause's unique violating assignment:
    /// `-1` for the head, `+1` for body atoms.
    pub fn violating_spin(&self, atom: u32) -> i8 {
        if atom == self.head {
            -1
        } else {
            1
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("atom index {index} occurs more than once in a clause")]
    DuplicateAtomInClause { index: u32 },
    #[error("clause mentions atom index {index} but the universe has {num_atoms} atoms")]
    AtomOutOfRange { index: u32, num_atoms: usize },
    #[error("atom name `{0}` is not a valid identifier")]
    BadAtomName(String),
    #[error("atom names must be unique; `{0}` is declared twice")]
    DuplicateAtomName(String),
    #[error("clause arity {arity} exceeds the universe of {num_atoms} atoms")]
    ArityExceedsUniverse { arity: usize, num_atoms: usize },
}

/// A definite logic program: an atom universe (possibly larger than the set
/// of atoms mentioned in clauses) plus a clause list in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicProgram {
    atoms: Vec<Atom>,
    clauses: Vec<Clause>,
}

impl LogicProgram {
    pub fn new(atoms: Vec<Atom>, clauses: Vec<Clause>) -> Result<Self, ProgramError> {
        let mut names = std::collections::BTreeSet::new();
        for (i, atom) in atoms.iter().enumerate() {
            if !is_valid_atom_name(&atom.name) {
                return Err(ProgramError::BadAtomName(atom.name.clone()));
            }
            if atom.index as usize != i {
                return Err(ProgramError::AtomOutOfRange {
                    index: atom.index,
                    num_atoms: atoms.len(),
                });
            }
            if !names.insert(atom.name.clone()) {
                return Err(ProgramError::DuplicateAtomName(atom.name.clone()));
            }
        }
        for clause in &clauses {
            for atom in clause.atoms() {
                if atom as usize >= atoms.len() {
                    return Err(ProgramError::AtomOutOfRange {
                        index: atom,
                        num_atoms: atoms.len(),
                    });
                }
            }
        }
        Ok(LogicProgram { atoms, clauses })
    }

    /// Number of neurons in the network, i.e. the size of the atom universe.
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn atom_name(&self, index: u32) -> &str {
        &self.atoms[index as usize].name
    }
}

/// A bipolar network state: one spin in {-1, +1} per atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetworkState(Vec<i8>);

impl NetworkState {
    pub fn new(spins: Vec<i8>) -> Self {
        assert!(
            spins.iter().all(|&s| s == 1 || s == -1),
            "spins must be exactly -1 or +1"
        );
        NetworkState(spins)
    }

    /// All-true state; a model of every definite program.
    pub fn all_true(len: usize) -> Self {
        NetworkState(vec![1; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spin(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn set(&mut self, i: usize, spin: i8) {
        assert!(spin == 1 || spin == -1);
        self.0[i] = spin;
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.0[i] = -s.0[i];
        s
    }

    /// Number of differing spins.
    pub fn hamming(&self, other: &NetworkState) -> usize {
        assert_eq!(self.len(), other.len(), "states must have equal length");
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for NetworkState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", if s > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

/// Renders a program in the clause grammar; `parse_program` inverts this.
pub fn format_program(program: &LogicProgram) -> String {
    let mut out = String::new();
    for clause in program.clauses() {
        out.push_str(program.atom_name(clause.head()));
        if !clause.body().is_empty() {
            out.push_str(" <- ");
            let body: Vec<&str> = clause.body().iter().map(|&b| program.atom_name(b)).collect();
            out.push_str(&body.join(", "));
        }
        out.push_str(".\n");
    }
    out
}

/// True iff the state falsifies the clause: head spin -1 and every body
/// spin +1 (the clause's unique violating assignment).
pub fn is_violated(clause: &Clause, state: &NetworkState) -> bool {
    state.spin(clause.head() as usize) == -1
        && clause.body().iter().all(|&b| state.spin(b as usize) == 1)
}

/// Number of violated clauses; zero exactly when the state is a model.
pub fn count_violations(program: &LogicProgram, state: &NetworkState) -> usize {
    assert_eq!(state.len(), program.num_atoms(), "state length must equal universe size");
    program.clauses().iter().filter(|c| is_violated(c, state)).count()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("universe of {0} atoms is too large to enumerate (limit {MAX_ENUMERATION_ATOMS})")]
    UniverseTooLarge(usize),
}

/// Brute-force model enumeration guard.
pub const MAX_ENUMERATION_ATOMS: usize = 20;

/// All models of the program, by exhaustive enumeration of the 2^NN states.
/// States come back in ascending bitmask order (bit i set means atom i true).
pub fn enumerate_models(program: &LogicProgram) -> Result<Vec<NetworkState>, EnumerateError> {
    let nn = program.num_atoms();
    if nn > MAX_ENUMERATION_ATOMS {
        return Err(EnumerateError::UniverseTooLarge(nn));
    }
    let mut models = Vec::new();
    for mask in 0u32..(1u32 << nn) {
        let spins: Vec<i8> = (0..nn).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
        let state = NetworkState::new(spins);
        if count_violations(program, &state) == 0 {
            models.push(state);
        }
    }
    Ok(models)
}

/// Generates a random definite program: for every `(arity, count)` entry,
/// `count` clauses whose atoms are drawn uniformly without replacement from
/// a universe of `num_atoms` atoms named `X0..`, with the head uniform among
/// the drawn atoms. Deterministic given the seed.
pub fn generate_random_program(
    num_atoms: usize,
    clause_counts: &BTreeMap<usize, usize>,
    seed: u64,
) -> Result<LogicProgram, ProgramError> {
    for (&arity, &count) in clause_counts {
        if count > 0 && (arity == 0 || arity > num_atoms) {
            return Err(ProgramError::ArityExceedsUniverse { arity, num_atoms });
        }
    }
    let atoms: Vec<Atom> = (0..num_atoms)
        .map(|i| Atom { name: format!("X{i}"), index: i as u32 })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<u32> = (0..num_atoms as u32).collect();
    let mut clauses = Vec::new();
    for (&arity, &count) in clause_counts {
        for _ in 0..count {
            let (drawn, _) = pool.partial_shuffle(&mut rng, arity);
            let mut picked = drawn.to_vec();
            let head_pos = rng.gen_range(0..arity);
            let head = picked.remove(head_pos);
            clauses.push(Clause::new(head, picked).expect("drawn atoms are distinct"));
        }
    }
    LogicProgram::new(atoms, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE_PROGRAM: &str = "A <- B, C.\nD <- B.\nC.\n";

    fn example() -> LogicProgram {
        parse_program(EXAMPLE_PROGRAM).unwrap()
    }

    fn state(spins: &[i8]) -> NetworkState {
        NetworkState::new(spins.to_vec())
    }

    #[test]
    fn format_single_fact() {
        let p = parse_program("C.").unwrap();
        assert_eq!(format_program(&p), "C.\n");
    }

    #[test]
    fn format_empty_program() {
        let p = parse_program("").unwrap();
        assert_eq!(format_program(&p), "");
    }

    #[test]
    fn round_trip_example_program() {
        let p = example();
        assert_eq!(format_program(&p), EXAMPLE_PROGRAM);
        assert_eq!(parse_program(&format_program(&p)).unwrap(), p);
    }

    #[test]
    fn violating_assignment_detected() {
        let p = example();
        let c = &p.clauses()[0]; // A <- B, C.
        assert!(is_violated(c, &state(&[-1, 1, 1, 1])));
        assert!(!is_violated(c, &state(&[1, 1, 1, 1])));
    }

    #[test]
    fn fact_violated_when_false() {
        let p = parse_program("C.").unwrap();
        assert!(is_violated(&p.clauses()[0], &state(&[-1])));
        assert!(!is_violated(&p.clauses()[0], &state(&[1])));
    }

    #[test]
    fn violation_counts() {
        let p = example();
        assert_eq!(count_violations(&p, &state(&[1, 1, 1, 1])), 0);
        // all false: only the fact C. is violated
        assert_eq!(count_violations(&p, &state(&[-1, -1, -1, -1])), 1);
        // D false with B true violates D <- B only
        assert_eq!(count_violations(&p, &state(&[1, 1, 1, -1])), 1);
    }

    #[test]
    fn models_of_single_fact() {
        let p = parse_program("C.").unwrap();
        assert_eq!(enumerate_models(&p).unwrap(), vec![state(&[1])]);
    }

    #[test]
    fn models_of_example_program() {
        // By hand: C is forced true. With B true, both A and D are forced
        // true (one model); with B false, A and D are free (four models).
        let p = example();
        let models = enumerate_models(&p).unwrap();
        assert_eq!(models.len(), 5);
        for m in &models {
            assert_eq!(m.spin(2), 1, "every model has C true");
            assert_eq!(count_violations(&p, m), 0);
        }
        assert!(models.contains(&state(&[1, 1, 1, 1])));
    }

    #[test]
    fn models_of_empty_program_over_two_atoms() {
        let p = parse_program("% only a comment\n").unwrap();
        assert_eq!(p.num_atoms(), 0);
        let atoms = vec![
            Atom { name: "P".into(), index: 0 },
            Atom { name: "Q".into(), index: 1 },
        ];
        let p = LogicProgram::new(atoms, vec![]).unwrap();
        assert_eq!(enumerate_models(&p).unwrap().len(), 4);
    }

    #[test]
    fn enumeration_guard() {
        let atoms: Vec<Atom> = (0..21)
            .map(|i| Atom { name: format!("X{i}"), index: i })
            .collect();
        let p = LogicProgram::new(atoms, vec![]).unwrap();
        assert_eq!(enumerate_models(&p), Err(EnumerateError::UniverseTooLarge(21)));
    }

    #[test]
    fn generated_program_shape() {
        let counts = BTreeMap::from([(1, 1), (2, 1), (3, 1)]);
        let p = generate_random_program(4, &counts, 7).unwrap();
        assert_eq!(p.num_atoms(), 4);
        let mut arities: Vec<usize> = p.clauses().iter().map(|c| c.arity()).collect();
        arities.sort_unstable();
        assert_eq!(arities, vec![1, 2, 3]);
        for c in p.clauses() {
            let mut atoms: Vec<u32> = c.atoms().collect();
            atoms.sort_unstable();
            atoms.dedup();
            assert_eq!(atoms.len(), c.arity(), "clause atoms are distinct");
        }
    }

    #[test]
    fn generated_program_counts_at_scale() {
        let counts = BTreeMap::from([(3, 10)]);
        let p = generate_random_program(40, &counts, 123).unwrap();
        assert_eq!(p.num_atoms(), 40);
        assert_eq!(p.clauses().len(), 10);
        assert!(p.clauses().iter().all(|c| c.arity() == 3));
    }

    #[test]
    fn generation_is_deterministic() {
        let counts = BTreeMap::from([(2, 3), (3, 2)]);
        let a = generate_random_program(10, &counts, 99).unwrap();
        let b = generate_random_program(10, &counts, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generation_rejects_oversized_arity() {
        let counts = BTreeMap::from([(3, 1)]);
        assert_eq!(
            generate_random_program(2, &counts, 0),
            Err(ProgramError::ArityExceedsUniverse { arity: 3, num_atoms: 2 })
        );
    }

    #[test]
    fn all_true_models_every_generated_program() {
        let counts = BTreeMap::from([(1, 2), (2, 2), (3, 2)]);
        for seed in 0..50 {
            let p = generate_random_program(8, &counts, seed).unwrap();
            assert_eq!(count_violations(&p, &NetworkState::all_true(8)), 0);
        }
    }

    #[test]
    fn clause_rejects_duplicate_atom() {
        assert!(Clause::new(0, vec![1, 1]).is_err());
        assert!(Clause::new(0, vec![0]).is_err());
        assert!(Clause::new(0, vec![1, 2]).is_ok());
    }
}
