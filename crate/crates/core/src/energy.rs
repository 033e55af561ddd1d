//! Compiles a logic program into higher-order synaptic weights by expanding
//! its inconsistency cost as a multilinear polynomial over bipolar spins.
//!
//! A clause of arity n contributes the product of n affine factors
//! `(1 + s*_i S_i)/2`, where `s*_i` is atom i's spin in the clause's unique
//! violating assignment. The product evaluates to 1 exactly on that
//! assignment and 0 on the other 2^n - 1, so the program cost equals the
//! violated-clause count at every state. Matching the cost against the
//! network energy `E = const - sum_T w_T prod_{i in T} S_i` gives the
//! weights: `w_T` is the negated cost coefficient of monomial T.
//!
//! All arithmetic is exact dyadic; nothing here touches floating point.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::dyadic::{DyadicRational, Rational};
use crate::logic::{Clause, LogicProgram, NetworkState};

/// A multilinear monomial: a strictly increasing set of atom indices.
/// `S_i^2 = 1` on spins, so repeated indices never occur. The empty monomial
/// is the constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn empty() -> Self {
        Monomial(Vec::new())
    }

    /// Builds from arbitrary distinct indices; sorts them.
    pub fn new(mut indices: Vec<u32>) -> Self {
        indices.sort_unstable();
        for pair in indices.windows(2) {
            assert!(pair[0] != pair[1], "monomial indices must be distinct");
        }
        Monomial(indices)
    }

    /// The monomial extended by one atom not already present.
    pub fn with_atom(&self, atom: u32) -> Self {
        let pos = self.0.partition_point(|&a| a < atom);
        assert!(self.0.get(pos) != Some(&atom), "atom already in monomial");
        let mut v = self.0.clone();
        v.insert(pos, atom);
        Monomial(v)
    }

    /// Interaction order (number of participating neurons).
    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn atoms(&self) -> &[u32] {
        &self.0
    }

    pub fn contains(&self, atom: u32) -> bool {
        self.0.binary_search(&atom).is_ok()
    }

    /// Product of the state's spins over this monomial (1 for the empty one).
    pub fn eval(&self, state: &NetworkState) -> i8 {
        let mut p = 1i8;
        for &i in &self.0 {
            p *= state.spin(i as usize);
        }
        p
    }
}

/// Ascending order, then lexicographic index sets: the canonical listing
/// order of the weights file format.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse multilinear polynomial over bipolar spins with exact dyadic
/// coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CostPolynomial {
    terms: BTreeMap<Monomial, DyadicRational>,
}

impl CostPolynomial {
    pub fn zero() -> Self {
        CostPolynomial::default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &DyadicRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: &Monomial) -> DyadicRational {
        self.terms.get(monomial).copied().unwrap_or(DyadicRational::ZERO)
    }

    pub fn add_term(&mut self, monomial: Monomial, coefficient: DyadicRational) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(monomial);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coefficient);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = *o.get() + coefficient;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &CostPolynomial) {
        for (m, &c) in other.terms() {
            self.add_term(m.clone(), c);
        }
    }

    /// Exact value at a bipolar state.
    pub fn evaluate(&self, state: &NetworkState) -> DyadicRational {
        let mut total = DyadicRational::ZERO;
        for (m, &c) in &self.terms {
            total += if m.eval(state) > 0 { c } else { -c };
        }
        total
    }
}

/// The inconsistency cost of one clause: expands
/// `prod_{i in clause} (1 + s*_i S_i)/2` multilinearly. The coefficient of
/// each subset T of the clause's atoms is `(1/2^n) * prod_{i in T} s*_i`.
pub fn clause_cost(clause: &Clause) -> CostPolynomial {
    // Fold one affine factor at a time; the intermediate polynomial over k
    // atoms has exactly 2^k terms.
    let mut terms: Vec<(Monomial, DyadicRational)> =
        vec![(Monomial::empty(), DyadicRational::ONE)];
    for atom in clause.atoms() {
        let sign = clause.violating_spin(atom);
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (m, c) in terms {
            let half = c.div_pow2(1);
            let signed = if sign > 0 { half } else { -half };
            next.push((m.clone(), half));
            next.push((m.with_atom(atom), signed));
        }
        terms = next;
    }
    let mut poly = CostPolynomial::zero();
    for (m, c) in terms {
        poly.add_term(m, c);
    }
    poly
}

/// Termwise sum of the clause costs; evaluates to the violated-clause count
/// at every state. The empty program yields the identically zero polynomial.
pub fn program_cost(program: &LogicProgram) -> CostPolynomial {
    let mut poly = CostPolynomial::zero();
    for clause in program.clauses() {
        poly.add_assign(&clause_cost(clause));
    }
    poly
}

/// Synaptic weights in canonical monomial-coefficient form: the network
/// energy is `constant - sum_T w_T prod_{i in T} S_i`. Symmetry and the
/// zero diagonal are structural because keys are unordered distinct-index
/// sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSet {
    weights: BTreeMap<Monomial, DyadicRational>,
    constant: DyadicRational,
    num_atoms: usize,
}

impl WeightSet {
    pub fn zero(num_atoms: usize) -> Self {
        WeightSet {
            weights: BTreeMap::new(),
            constant: DyadicRational::ZERO,
            num_atoms,
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn constant(&self) -> DyadicRational {
        self.constant
    }

    pub fn set_constant(&mut self, constant: DyadicRational) {
        self.constant = constant;
    }

    /// Highest interaction order present (0 when no weights).
    pub fn max_order(&self) -> usize {
        self.weights.keys().next_back().map_or(0, |m| m.order())
    }

    pub fn weights(&self) -> &BTreeMap<Monomial, DyadicRational> {
        &self.weights
    }

    pub fn weight(&self, monomial: &Monomial) -> DyadicRational {
        self.weights.get(monomial).copied().unwrap_or(DyadicRational::ZERO)
    }

    /// Accumulates `delta` into `w_T`; zero results are dropped.
    pub fn add_weight(&mut self, monomial: Monomial, delta: DyadicRational) {
        assert!(monomial.order() > 0, "the constant term is not a weight");
        if delta.is_zero() {
            return;
        }
        match self.weights.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(delta);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = *o.get() + delta;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Every weight and the constant multiplied by `factor`. Positive factors
    /// leave the sign dynamics untouched.
    pub fn scaled(&self, factor: DyadicRational) -> WeightSet {
        let mut out = WeightSet::zero(self.num_atoms);
        out.constant = self.constant * factor;
        for (m, &w) in &self.weights {
            out.add_weight(m.clone(), w * factor);
        }
        out
    }

    /// `E(s) = constant - sum_T w_T prod_{i in T} s_i`.
    pub fn energy(&self, state: &NetworkState) -> DyadicRational {
        assert_eq!(state.len(), self.num_atoms, "state length must match universe");
        let mut e = self.constant;
        for (m, &w) in &self.weights {
            e += if m.eval(state) > 0 { -w } else { w };
        }
        e
    }

    /// Local field `h_i = sum_{T contains i} w_T prod_{j in T, j != i} s_j`.
    /// Flipping spin i changes the energy by `-h_i * (new - old)`.
    pub fn local_field(&self, state: &NetworkState, atom: usize) -> DyadicRational {
        assert!(atom < self.num_atoms, "atom index out of range");
        let mut h = DyadicRational::ZERO;
        for (m, &w) in &self.weights {
            if !m.contains(atom as u32) {
                continue;
            }
            let mut prod = 1i8;
            for &j in m.atoms() {
                if j as usize != atom {
                    prod *= state.spin(j as usize);
                }
            }
            h += if prod > 0 { w } else { -w };
        }
        h
    }

    /// Renders the deterministic weights file: a `const` line followed by one
    /// line per weight (`n idx_1 .. idx_n num/den`), ascending order then
    /// lexicographic index sets.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("const {}\n", self.constant);
        for (m, w) in &self.weights {
            out.push_str(&m.order().to_string());
            for a in m.atoms() {
                out.push(' ');
                out.push_str(&a.to_string());
            }
            out.push(' ');
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the weights file format. The universe size is taken to be
    /// `max index + 1` unless a larger `num_atoms` is supplied.
    pub fn parse(text: &str, num_atoms: Option<usize>) -> Result<WeightSet, WeightsFileError> {
        let mut constant = DyadicRational::ZERO;
        let mut weights: BTreeMap<Monomial, DyadicRational> = BTreeMap::new();
        let mut max_index: Option<u32> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let first = fields.next().expect("non-empty line has a field");
            let err = |msg: &str| WeightsFileError {
                line: lineno + 1,
                message: msg.to_string(),
            };
            if first == "const" {
                let value = fields.next().ok_or_else(|| err("missing constant value"))?;
                if fields.next().is_some() {
                    return Err(err("trailing fields after constant"));
                }
                constant = value.parse().map_err(|e| err(&format!("{e}")))?;
                continue;
            }
            let order: usize = first.parse().map_err(|_| err("expected an order or `const`"))?;
            if order == 0 {
                return Err(err("weight order must be at least 1"));
            }
            let mut indices = Vec::with_capacity(order);
            for _ in 0..order {
                let idx = fields.next().ok_or_else(|| err("missing atom index"))?;
                indices.push(idx.parse::<u32>().map_err(|_| err("bad atom index"))?);
            }
            let value = fields.next().ok_or_else(|| err("missing weight value"))?;
            if fields.next().is_some() {
                return Err(err("trailing fields after weight value"));
            }
            let value: DyadicRational = value.parse().map_err(|e| err(&format!("{e}")))?;
            let mut sorted = indices.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != order {
                return Err(err("repeated atom index in weight"));
            }
            max_index = max_index.max(sorted.last().copied());
            if weights.insert(Monomial::new(indices), value).is_some() {
                return Err(err("duplicate weight entry"));
            }
        }
        let needed = max_index.map_or(0, |m| m as usize + 1);
        let num_atoms = match num_atoms {
            Some(n) if n >= needed => n,
            Some(n) => {
                return Err(WeightsFileError {
                    line: 0,
                    message: format!("weights mention atom index >= universe size {n}"),
                })
            }
            None => needed,
        };
        weights.retain(|_, w| !w.is_zero());
        Ok(WeightSet { weights, constant, num_atoms })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("weights file line {line}: {message}")]
pub struct WeightsFileError {
    pub line: usize,
    pub message: String,
}

/// Extracts weights from a cost polynomial: `w_T = -(coefficient of T)` for
/// nonempty T and `constant = coefficient of the empty monomial`, so that
/// the energy of the weight set equals the polynomial at every state.
pub fn cost_to_weights(cost: &CostPolynomial, num_atoms: usize) -> WeightSet {
    let mut ws = WeightSet::zero(num_atoms);
    for (m, &c) in cost.terms() {
        if m.order() == 0 {
            ws.constant = c;
        } else {
            ws.add_weight(m.clone(), -c);
        }
    }
    ws
}

/// `cost_to_weights(program_cost(p))` with the universe size filled in.
pub fn compile_program(program: &LogicProgram) -> WeightSet {
    cost_to_weights(&program_cost(program), program.num_atoms())
}

/// Synaptic strengths in the per-order tensor convention, where the energy
/// is written with a `1/n` prefactor on sums over ordered distinct index
/// tuples: `J^(n)_T = w_T / (n-1)!`. Identity for orders 1 and 2, a halving
/// at order 3. Values are exact rationals since `(n-1)!` need not be a power
/// of two. Reporting only; the monomial form is canonical everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorWeights {
    entries: BTreeMap<Monomial, Rational>,
    num_atoms: usize,
}

impl TensorWeights {
    pub fn entries(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.entries.iter()
    }

    pub fn strength(&self, monomial: &Monomial) -> Rational {
        self.entries
            .get(monomial)
            .cloned()
            .unwrap_or_else(|| Rational::from_integer(0))
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }
}

/// Converts canonical weights to the per-order tensor convention.
pub fn to_tensor_convention(weights: &WeightSet) -> TensorWeights {
    let mut entries = BTreeMap::new();
    for (m, w) in weights.weights() {
        let mut factorial = Rational::from_integer(1);
        for k in 2..m.order() as i128 {
            factorial *= Rational::from_integer(k);
        }
        entries.insert(m.clone(), w.to_rational() / factorial);
    }
    TensorWeights { entries, num_atoms: weights.num_atoms() }
}

/// Space-separated atom indices, e.g. `0 1 2`.
impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in self.atoms() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
            first = false;
        }
        Ok(())
    }
}
