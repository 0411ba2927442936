//! Weighted graphings: finite families of edges, each realized by a partial
//! measure-preserving map from a source set to its image.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::realizers::{Membership, Microcosm, Realizer};
use crate::scalar::Scalar;
use crate::space::{refinement_atoms, MeasurableSet};

/// Word-length bound used when validating against finitely generated
/// microcosms.
pub const DEFAULT_WORD_BOUND: usize = 16;

/// An element of a weight monoid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weight<S> {
    /// Elements of the trivial and probability monoids.
    Scalar(S),
    /// Index into a presented monoid's element list.
    Element(usize),
}

impl<S: Scalar> Weight<S> {
    pub fn one() -> Self {
        Weight::Scalar(S::one())
    }

    pub fn prob(p: S) -> Self {
        Weight::Scalar(p)
    }

    pub fn as_scalar(&self) -> Option<&S> {
        match self {
            Weight::Scalar(s) => Some(s),
            Weight::Element(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Weight::Scalar(s) => json!(s.to_pq()),
            Weight::Element(e) => json!({ "element": e }),
        }
    }
}

impl<S: Scalar> fmt::Display for Weight<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Scalar(s) => write!(f, "{}", s.to_pq()),
            Weight::Element(e) => write!(f, "#{e}"),
        }
    }
}

/// The monoid edge weights are drawn from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightMonoid {
    /// Only the unit.
    Trivial,
    /// Rationals in `[0,1]` under multiplication.
    Probabilities,
    /// A finite monoid given by its multiplication table.
    Generic { names: Vec<String>, table: Vec<Vec<usize>>, unit: usize },
}

impl WeightMonoid {
    /// A presented monoid; checks closure, the unit laws and associativity.
    pub fn generic(names: Vec<String>, table: Vec<Vec<usize>>, unit: usize) -> Result<Self> {
        let n = names.len();
        let bad = |m: &str| Err(Error::Precondition(format!("weight monoid: {m}")));
        if unit >= n || table.len() != n || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return bad("table must be square over the listed elements");
        }
        for a in 0..n {
            if table[unit][a] != a || table[a][unit] != a {
                return bad("unit law fails");
            }
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("not associative");
                    }
                }
            }
        }
        Ok(WeightMonoid::Generic { names, table, unit })
    }

    pub fn name(&self) -> String {
        match self {
            WeightMonoid::Trivial => "trivial".into(),
            WeightMonoid::Probabilities => "probabilities".into(),
            WeightMonoid::Generic { names, .. } => format!("generic{names:?}"),
        }
    }

    pub fn unit<S: Scalar>(&self) -> Weight<S> {
        match self {
            WeightMonoid::Generic { unit, .. } => Weight::Element(*unit),
            _ => Weight::one(),
        }
    }

    pub fn is_unit<S: Scalar>(&self, w: &Weight<S>) -> bool {
        *w == self.unit()
    }

    pub fn contains<S: Scalar>(&self, w: &Weight<S>) -> bool {
        match (self, w) {
            (WeightMonoid::Trivial, Weight::Scalar(s)) => s.is_one(),
            (WeightMonoid::Probabilities, Weight::Scalar(s)) => *s >= S::zero() && *s <= S::one(),
            (WeightMonoid::Generic { names, .. }, Weight::Element(e)) => *e < names.len(),
            _ => false,
        }
    }

    pub fn mul<S: Scalar>(&self, a: &Weight<S>, b: &Weight<S>) -> Weight<S> {
        match (self, a, b) {
            (WeightMonoid::Generic { table, .. }, Weight::Element(x), Weight::Element(y)) => {
                Weight::Element(table[*x][*y])
            }
            (_, Weight::Scalar(x), Weight::Scalar(y)) => Weight::Scalar(x.clone() * y.clone()),
            _ => panic!("multiplying weights from different monoids"),
        }
    }

    /// Common monoid when one embeds in the other (`Trivial ⊂ Probabilities`).
    pub fn join(&self, other: &WeightMonoid) -> Result<WeightMonoid> {
        use WeightMonoid::*;
        match (self, other) {
            (a, b) if a == b => Ok(a.clone()),
            (Trivial, Probabilities) | (Probabilities, Trivial) => Ok(Probabilities),
            _ => Err(Error::WeightMismatch { left: self.name(), right: other.name() }),
        }
    }
}

/// A weighted edge; its target is always derived from source and realizer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge<S> {
    pub weight: Weight<S>,
    pub source: MeasurableSet<S>,
    pub realizer: Realizer<S>,
}

impl<S: Scalar> Edge<S> {
    pub fn new(weight: Weight<S>, source: MeasurableSet<S>, realizer: Realizer<S>) -> Self {
        Edge { weight, source, realizer }
    }

    pub fn unit(source: MeasurableSet<S>, realizer: Realizer<S>) -> Self {
        Edge::new(Weight::one(), source, realizer)
    }

    pub fn target(&self) -> Result<MeasurableSet<S>> {
        self.realizer.apply(&self.source)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "weight": self.weight.to_json(),
            "source": self.source.to_json(),
            "realizer": self.realizer.to_text(),
        })
    }
}

/// Determinism class, strongest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Deterministic,
    NonDeterministic,
    Probabilistic,
    General,
}

impl Class {
    pub fn is_non_deterministic(self) -> bool {
        matches!(self, Class::Deterministic | Class::NonDeterministic)
    }

    /// Unit weights are probabilities, so deterministic graphings qualify.
    pub fn is_probabilistic(self) -> bool {
        matches!(self, Class::Deterministic | Class::Probabilistic)
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Class::Deterministic => "deterministic",
            Class::NonDeterministic => "non-deterministic",
            Class::Probabilistic => "probabilistic",
            Class::General => "general",
        };
        f.write_str(s)
    }
}

/// A problem found by [`Graphing::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    SourceNotInCarrier { edge: usize },
    TargetNotInCarrier { edge: usize },
    OutsideDomain { edge: usize },
    NotInMicrocosm { edge: usize, membership: Membership },
    WeightNotInMonoid { edge: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SourceNotInCarrier { edge } => write!(f, "edge {edge}: source not in carrier"),
            Violation::TargetNotInCarrier { edge } => write!(f, "edge {edge}: target not in carrier"),
            Violation::OutsideDomain { edge } => write!(f, "edge {edge}: source outside realizer domain"),
            Violation::NotInMicrocosm { edge, .. } => write!(f, "edge {edge}: realizer not in microcosm"),
            Violation::WeightNotInMonoid { edge } => write!(f, "edge {edge}: weight not in monoid"),
        }
    }
}

type LevelSets<S> = BTreeMap<(Realizer<S>, Weight<S>), Vec<MeasurableSet<S>>>;

/// One entry of [`Graphing::canonical_form`]: the points where exactly
/// `multiplicity` edges carry this realizer and weight.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CanonicalEdge<S> {
    pub realizer: Realizer<S>,
    pub weight: Weight<S>,
    pub multiplicity: usize,
    pub source: MeasurableSet<S>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graphing<S> {
    pub weights: WeightMonoid,
    pub microcosm: Microcosm<S>,
    pub carrier: MeasurableSet<S>,
    pub edges: Vec<Edge<S>>,
}

impl<S: Scalar> Graphing<S> {
    pub fn new(weights: WeightMonoid, microcosm: Microcosm<S>, carrier: MeasurableSet<S>) -> Self {
        Graphing { weights, microcosm, carrier, edges: Vec::new() }
    }

    pub fn empty() -> Self {
        Self::new(WeightMonoid::Trivial, Microcosm::M1, MeasurableSet::empty())
    }

    pub fn with_edge(mut self, edge: Edge<S>) -> Self {
        self.edges.push(edge);
        self
    }

    pub fn push(&mut self, edge: Edge<S>) {
        self.edges.push(edge);
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        self.validate_with_bound(DEFAULT_WORD_BOUND)
    }

    pub fn validate_with_bound(&self, bound: usize) -> std::result::Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !self.weights.contains(&e.weight) {
                out.push(Violation::WeightNotInMonoid { edge: i });
            }
            if !e.source.is_subset(&self.carrier) {
                out.push(Violation::SourceNotInCarrier { edge: i });
            }
            if !e.source.is_subset(&e.realizer.domain_of(&e.source)) {
                out.push(Violation::OutsideDomain { edge: i });
            } else if !e.target().expect("inside domain").is_subset(&self.carrier) {
                out.push(Violation::TargetNotInCarrier { edge: i });
            }
            let membership = self.microcosm.contains(&e.realizer, bound);
            if !membership.is_member() {
                out.push(Violation::NotInMicrocosm { edge: i, membership });
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn classify(&self) -> Class {
        let all_unit = self.edges.iter().all(|e| self.weights.is_unit(&e.weight));
        if all_unit {
            let disjoint = (0..self.edges.len())
                .all(|i| (i + 1..self.edges.len()).all(|j| !self.edges[i].source.meets(&self.edges[j].source)));
            return if disjoint { Class::Deterministic } else { Class::NonDeterministic };
        }
        let probs: Option<Vec<&S>> = self.edges.iter().map(|e| e.weight.as_scalar()).collect();
        let Some(probs) = probs else {
            return Class::General;
        };
        if probs.iter().any(|p| **p < S::zero() || **p > S::one()) {
            return Class::General;
        }
        let sources: Vec<MeasurableSet<S>> = self.edges.iter().map(|e| e.source.clone()).collect();
        let within_one = refinement_atoms(&sources)
            .iter()
            .all(|atom| atom.members.iter().fold(S::zero(), |acc, &m| acc + probs[m].clone()) <= S::one());
        if within_one {
            Class::Probabilistic
        } else {
            Class::General
        }
    }

    /// Sum of the measures of the edge sources.
    pub fn cost(&self) -> S {
        self.edges.iter().fold(S::zero(), |acc, e| acc + e.source.measure())
    }

    pub fn disjoint_union(&self, other: &Graphing<S>) -> Result<Graphing<S>> {
        if self.carrier.meets(&other.carrier) {
            return Err(Error::OverlappingCarriers);
        }
        let weights = self.weights.join(&other.weights)?;
        let microcosm = if other.edges.is_empty() {
            self.microcosm.clone()
        } else if self.edges.is_empty() {
            other.microcosm.clone()
        } else {
            self.microcosm.join(&other.microcosm)
        };
        Ok(Graphing {
            weights,
            microcosm,
            carrier: self.carrier.union(&other.carrier),
            edges: self.edges.iter().chain(&other.edges).cloned().collect(),
        })
    }

    /// A form invariant under splitting or merging edges with equal realizer
    /// and weight: for each such class, the multiplicity function over
    /// points, as level sets.
    pub fn canonical_form(&self) -> Vec<CanonicalEdge<S>> {
        let mut groups: LevelSets<S> = BTreeMap::new();
        for e in &self.edges {
            if !e.source.is_empty() {
                groups.entry((e.realizer.clone(), e.weight.clone())).or_default().push(e.source.clone());
            }
        }
        let mut out = Vec::new();
        for ((realizer, weight), sources) in groups {
            let mut by_count: BTreeMap<usize, MeasurableSet<S>> = BTreeMap::new();
            for atom in refinement_atoms(&sources) {
                let slot = by_count.entry(atom.members.len()).or_default();
                *slot = slot.union(&atom.set);
            }
            for (multiplicity, source) in by_count {
                out.push(CanonicalEdge { realizer: realizer.clone(), weight: weight.clone(), multiplicity, source });
            }
        }
        out.sort();
        out
    }

    /// Same edges and carrier up to [`Graphing::canonical_form`].
    pub fn canonically_equal(&self, other: &Graphing<S>) -> bool {
        self.carrier == other.carrier && self.canonical_form() == other.canonical_form()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "weights": self.weights.name(),
            "microcosm": self.microcosm.name(),
            "carrier": self.carrier.to_json(),
            "edges": self.edges.iter().map(Edge::to_json).collect::<Vec<_>>(),
        })
    }

    /// DOT graph with one node per cell. Edges realized with a coordinate
    /// permutation are dashed; edges listed in `bold` are drawn bold.
    pub fn to_dot(&self, title: &str, name: &dyn Fn(i64) -> String, bold: &BTreeSet<usize>) -> String {
        let mut out = format!("digraph \"{title}\" {{\n  rankdir=LR;\n");
        for cell in self.carrier.cells() {
            out.push_str(&format!("  c{} [label=\"{}\"];\n", dot_id(cell), name(cell)));
        }
        for (i, e) in self.edges.iter().enumerate() {
            let mut pairs = BTreeSet::new();
            for cell in e.source.cells() {
                pairs.insert((cell, cell + e.realizer.shift_by()));
            }
            for (from, to) in pairs {
                let mut attrs = vec![format!("label=\"e{i} w={}\"", e.weight)];
                if !e.realizer.perm().is_identity() {
                    attrs.push("style=dashed".into());
                }
                if bold.contains(&i) {
                    attrs.push("penwidth=3".into());
                    attrs.push("bold=true".into());
                }
                out.push_str(&format!("  c{} -> c{} [{}];\n", dot_id(from), dot_id(to), attrs.join(", ")));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn dot_id(cell: i64) -> String {
    if cell < 0 {
        format!("m{}", -cell)
    } else {
        cell.to_string()
    }
}
