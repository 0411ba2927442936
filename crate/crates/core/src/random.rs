//! Seeded random instances for property experiments.
//!
//! Generators draw dyadic boxes and affine permutation maps that keep every
//! image inside the carrier, so instances always validate.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::encodings::{Action, ActionKind, MachineSpec, Mode, Move};
use crate::error::Result;
use crate::execution::{plug, Budget};
use crate::graphing::{Class, Edge, Graphing, Weight, WeightMonoid};
use crate::realizers::{Microcosm, Perm, Realizer};
use crate::scalar::Scalar;
use crate::space::{Interval, MeasurableSet, RationalBox};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random coordinate-1 piece `[k/2^l, (k+1)/2^l)` of `cell`.
fn pieces<S: Scalar>(rng: &mut impl Rng, cell: i64) -> Vec<(RationalBox<S>, i64, i64)> {
    let level = rng.gen_range(0..=2u32);
    let d = 1i64 << level;
    (0..d).map(|k| (RationalBox::unit(cell).with(1, Interval::frac(k, k + 1, d)), k, d)).collect()
}

/// A map from the piece `[k/d, (k+1)/d)` of `cell` into one of `cells`.
fn random_realizer<S: Scalar>(rng: &mut impl Rng, cell: i64, k: i64, d: i64, cells: &[i64]) -> Realizer<S> {
    let target = *cells.choose(rng).expect("nonempty carrier");
    let shift = target - cell;
    match rng.gen_range(0..4) {
        0 => Realizer::new(shift, Perm::transposition(1, 2), []),
        1 if d > 1 => {
            let to = rng.gen_range(0..d);
            Realizer::new(shift, Perm::identity(), [(1, S::frac(to - k, d))])
        }
        _ => Realizer::shift(shift),
    }
}

fn weights_for<S: Scalar>(rng: &mut impl Rng, class: Class) -> Vec<S> {
    let one = || vec![S::one()];
    match class {
        Class::Deterministic => one(),
        Class::NonDeterministic => {
            if rng.gen_bool(0.3) {
                vec![S::one(), S::one()]
            } else {
                one()
            }
        }
        _ => {
            let table = [(1, 1, 0, 1), (1, 2, 0, 1), (1, 2, 1, 2), (1, 3, 1, 2), (1, 4, 3, 4), (2, 3, 1, 4)];
            let (a, b, c, e) = *table.choose(rng).expect("nonempty");
            let mut w = vec![S::frac(a, b)];
            if c != 0 {
                w.push(S::frac(c, e));
            }
            w
        }
    }
}

/// Random graphing of the given class with carrier the unit cells `cells`.
pub fn random_graphing<S: Scalar>(rng: &mut impl Rng, class: Class, cells: &[i64]) -> Graphing<S> {
    let monoid = if class == Class::Probabilistic { WeightMonoid::Probabilities } else { WeightMonoid::Trivial };
    let mut g = Graphing::new(monoid, Microcosm::Macrocosm, MeasurableSet::unit_cells(cells.iter().copied()));
    for &cell in cells {
        for (b, k, d) in pieces::<S>(rng, cell) {
            if rng.gen_bool(0.2) {
                continue;
            }
            for w in weights_for::<S>(rng, class) {
                let r = random_realizer(rng, cell, k, d, cells);
                g.push(Edge::new(Weight::Scalar(w), MeasurableSet::from_box(b.clone()), r));
            }
        }
    }
    g
}

fn class_preserved(input: Class, output: Class) -> bool {
    match input {
        Class::Deterministic => output == Class::Deterministic,
        Class::NonDeterministic => output.is_non_deterministic(),
        Class::Probabilistic => output.is_probabilistic(),
        Class::General => true,
    }
}

/// Small budget: random instances that need more are skipped as unclean.
pub fn experiment_budget() -> Budget {
    Budget { max_steps: 64, max_states: 20_000 }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub kind: String,
    pub seed: u64,
    /// Instances with clean diagnostics that were checked.
    pub checked: usize,
    pub passed: usize,
    /// Instances drawn but discarded for unclean diagnostics.
    pub discarded: usize,
    pub failures: Vec<usize>,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty() && self.passed == self.checked
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "seed": self.seed,
            "checked": self.checked,
            "passed": self.passed,
            "discarded": self.discarded,
            "failures": self.failures,
        })
    }
}

/// Plug `n` clean random pairs of `class` and check that the result keeps
/// the class. Gives up after `20 * n` draws.
pub fn closure_experiment<S: Scalar>(seed: u64, n: usize, class: Class) -> Result<PropertyReport> {
    let mut rng = rng(seed);
    let mut report = PropertyReport {
        kind: format!("closure/{class}"),
        seed,
        checked: 0,
        passed: 0,
        discarded: 0,
        failures: Vec::new(),
    };
    let mut draws = 0;
    while report.checked < n && draws < 20 * n {
        draws += 1;
        let f = random_graphing::<S>(&mut rng, class, &[0, 1, 2]);
        let g = random_graphing::<S>(&mut rng, class, &[1, 2, 3]);
        debug_assert!(class_preserved(class, f.classify()) && class_preserved(class, g.classify()));
        let exec = plug(&f, &g, None, experiment_budget())?;
        if !exec.diagnostics.is_clean() {
            report.discarded += 1;
            continue;
        }
        if class_preserved(class, exec.graphing.classify()) && exec.graphing.validate().is_ok() {
            report.passed += 1;
        } else {
            report.failures.push(report.checked);
        }
        report.checked += 1;
    }
    Ok(report)
}

/// `(f ⊡ g) ⊡ h` against `f ⊡ (g ⊡ h)` on `n` clean random triples with
/// chained cuts.
pub fn associativity_experiment<S: Scalar>(seed: u64, n: usize) -> Result<PropertyReport> {
    let mut rng = rng(seed);
    let mut report =
        PropertyReport { kind: "associativity".into(), seed, checked: 0, passed: 0, discarded: 0, failures: Vec::new() };
    let classes = [Class::Deterministic, Class::NonDeterministic, Class::Probabilistic];
    let mut draws = 0;
    while report.checked < n && draws < 20 * n {
        draws += 1;
        let class = *classes.choose(&mut rng).expect("nonempty");
        let f = random_graphing::<S>(&mut rng, class, &[0, 1, 2]);
        let g = random_graphing::<S>(&mut rng, class, &[1, 2, 3, 4]);
        let h = random_graphing::<S>(&mut rng, class, &[3, 4, 5]);
        let budget = experiment_budget();
        let fg = plug(&f, &g, None, budget)?;
        let gh = plug(&g, &h, None, budget)?;
        if !fg.diagnostics.is_clean() || !gh.diagnostics.is_clean() {
            report.discarded += 1;
            continue;
        }
        let left = plug(&fg.graphing, &h, None, budget)?;
        let right = plug(&f, &gh.graphing, None, budget)?;
        if !left.diagnostics.is_clean() || !right.diagnostics.is_clean() {
            report.discarded += 1;
            continue;
        }
        if left.graphing.canonically_equal(&right.graphing) {
            report.passed += 1;
        } else {
            report.failures.push(report.checked);
        }
        report.checked += 1;
    }
    Ok(report)
}

/// Random machine over `{0, 1}`. Probabilistic machines only move forward
/// without swaps from state to a later state or halt, so their runs are
/// acyclic apart from the wrap-around at `⋆`, which always halts.
pub fn random_machine<S: Scalar>(rng: &mut impl Rng, heads: u32, states: usize, mode: Mode, two_way: bool) -> MachineSpec<S> {
    let names: Vec<String> = (0..states).map(|q| format!("q{q}")).collect();
    let mut transitions: BTreeMap<(usize, usize), Vec<Action<S>>> = BTreeMap::new();
    let kind = |rng: &mut dyn rand::RngCore|  -> (ActionKind, Option<u32>) {
        let swap = if heads >= 2 && rng.gen_bool(0.3) { Some(rng.gen_range(2..=heads)) } else { None };
        match rng.gen_range(0..10) {
            0 => (ActionKind::Accept, swap),
            1 => (ActionKind::Reject, None),
            r => {
                let dir = if two_way && r >= 7 { Move::Retreat } else { Move::Advance };
                (ActionKind::Move { dir, next: rng.gen_range(0..states) }, swap)
            }
        }
    };
    for q in 0..states {
        for s in 0..3 {
            match mode {
                Mode::Det => {
                    if rng.gen_bool(0.85) {
                        let (kind, swap) = kind(rng);
                        transitions.insert((q, s), vec![Action { weight: S::one(), kind, swap }]);
                    }
                }
                Mode::NonDet => {
                    let k = rng.gen_range(0..=2);
                    let actions = (0..k)
                        .map(|_| {
                            let (kind, swap) = kind(rng);
                            Action { weight: S::one(), kind, swap }
                        })
                        .collect::<Vec<_>>();
                    if !actions.is_empty() {
                        transitions.insert((q, s), actions);
                    }
                }
                Mode::Prob => {
                    let mut actions = Vec::new();
                    if s == 0 {
                        actions.push(Action { weight: S::one(), kind: ActionKind::Reject, swap: None });
                    } else {
                        let split = [(1, 2), (1, 3), (2, 3), (1, 4), (1, 1)];
                        let (a, b) = *split.choose(rng).expect("nonempty");
                        let p = S::frac(a, b);
                        let rest = S::one() - p.clone();
                        let forward = |rng: &mut dyn rand::RngCore| ActionKind::Move {
                            dir: Move::Advance,
                            next: rng.gen_range(q..states),
                        };
                        actions.push(Action { weight: p, kind: forward(rng), swap: None });
                        if !rest.is_zero() {
                            let kind = if rng.gen_bool(0.5) { ActionKind::Accept } else { forward(rng) };
                            actions.push(Action { weight: rest, kind, swap: None });
                        }
                    }
                    transitions.insert((q, s), actions);
                }
            }
        }
    }
    MachineSpec {
        name: format!("random-{mode}-{heads}h-{states}s"),
        alphabet: vec!['0', '1'],
        heads,
        states: names,
        mode,
        two_way,
        transitions,
    }
}
