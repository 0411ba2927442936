//! Execution of two graphings along a cut, alternating cycles and their
//! measurement, and test-based acceptance.
//!
//! `plug(f, g)` follows every point that starts outside the cut through
//! alternating edges of `f` and `g` while it stays inside the cut; each
//! maximal path becomes one edge of the result, realized by the composite
//! map and weighted by the ordered product of the step weights. Mass that is
//! still inside the cut when the budget runs out, or that provably cycles,
//! is reported in [`Diagnostics`] rather than dropped silently.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graphing::{Edge, Graphing, Weight, WeightMonoid};
use crate::realizers::{Microcosm, Realizer};
use crate::scalar::{Extended, Scalar};
use crate::space::MeasurableSet;

/// Which operand an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    F,
    G,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::F => Side::G,
            Side::G => Side::F,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::F => "F",
            Side::G => "G",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub side: Side,
    pub edge: usize,
}

/// A maximal alternating path; `domain` is where it starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingPath<S> {
    pub steps: Vec<Step>,
    pub realizer: Realizer<S>,
    pub domain: MeasurableSet<S>,
    pub weight: Weight<S>,
}

/// A closed alternating path, stored in its least rotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingCycle<S> {
    pub steps: Vec<Step>,
    pub support: MeasurableSet<S>,
    pub weight: Weight<S>,
}

/// Mass that did not resolve into a result edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrandedMass<S> {
    /// Starting points (outside the cut) of the stranded mass.
    pub origin: MeasurableSet<S>,
    pub weight: Weight<S>,
    pub steps: Vec<Step>,
}

/// A detected repetition: the mass re-enters the same edge inside the set of
/// points that will follow the same loop again.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopingMass<S> {
    pub stranded: StrandedMass<S>,
    /// Product of the weights around the loop.
    pub loop_weight: Weight<S>,
    /// Loops of unit weight trap their mass forever.
    pub trapped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics<S> {
    /// Still inside the cut after `max_steps`.
    pub partial: Vec<StrandedMass<S>>,
    pub looping: Vec<LoopingMass<S>>,
    /// Points stuck inside the cut with no continuing edge, by origin.
    pub dead: MeasurableSet<S>,
    /// The same mass, one entry per path prefix that got stuck.
    pub stuck: Vec<StrandedMass<S>>,
    /// The global path budget ran out; unexplored states went to `partial`.
    pub exhausted: bool,
}

impl<S: Scalar> Default for Diagnostics<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Diagnostics<S> {
    pub fn new() -> Self {
        Diagnostics { partial: Vec::new(), looping: Vec::new(), dead: MeasurableSet::empty(), stuck: Vec::new(), exhausted: false }
    }

    /// No partial or looping mass and the search completed.
    pub fn is_clean(&self) -> bool {
        self.partial.is_empty() && self.looping.is_empty() && !self.exhausted
    }

    /// Stranded mass that might still reach a verdict region: partial mass
    /// and loops that leak weight.
    pub fn unresolved(&self) -> impl Iterator<Item = &StrandedMass<S>> {
        self.partial.iter().chain(self.looping.iter().filter(|l| !l.trapped).map(|l| &l.stranded))
    }
}

/// Search limits for [`plug`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of edges on one path.
    pub max_steps: usize,
    /// Maximum number of search states overall.
    pub max_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps: 10_000, max_states: 2_000_000 }
    }
}

impl Budget {
    pub fn steps(max_steps: usize) -> Self {
        Budget { max_steps, ..Budget::default() }
    }
}

/// Result of [`plug`]: the execution graphing, one path per result edge,
/// and diagnostics.
#[derive(Clone, Debug)]
pub struct Execution<S> {
    pub graphing: Graphing<S>,
    pub paths: Vec<AlternatingPath<S>>,
    pub diagnostics: Diagnostics<S>,
}

impl<S: Scalar> Execution<S> {
    /// One JSON object per maximal path, with the set occupied after each
    /// step, followed by one object per unresolved or stuck trace.
    pub fn trace_json(&self, f: &Graphing<S>, g: &Graphing<S>) -> Vec<Value> {
        let step_json = |s: &Step| json!({ "side": s.side.to_string(), "edge": s.edge });
        let mut out: Vec<Value> = self
            .paths
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let sets = replay(f, g, p).unwrap_or_default();
                let steps: Vec<Value> = p
                    .steps
                    .iter()
                    .zip(&sets)
                    .map(|(s, set)| {
                        let mut v = step_json(s);
                        v["image"] = set.to_json();
                        v
                    })
                    .collect();
                json!({
                    "kind": "path",
                    "path": i,
                    "domain": p.domain.to_json(),
                    "realizer": p.realizer.to_text(),
                    "weight": p.weight.to_json(),
                    "steps": steps,
                })
            })
            .collect();
        let stranded = |kind: &str, m: &StrandedMass<S>| {
            json!({
                "kind": kind,
                "origin": m.origin.to_json(),
                "weight": m.weight.to_json(),
                "steps": m.steps.iter().map(step_json).collect::<Vec<_>>(),
            })
        };
        out.extend(self.diagnostics.stuck.iter().map(|m| stranded("stuck", m)));
        out.extend(self.diagnostics.partial.iter().map(|m| stranded("partial", m)));
        out.extend(self.diagnostics.looping.iter().map(|l| {
            let mut v = stranded("looping", &l.stranded);
            v["loop_weight"] = l.loop_weight.to_json();
            v["trapped"] = json!(l.trapped);
            v
        }));
        out
    }
}

fn side_graph<'a, S>(f: &'a Graphing<S>, g: &'a Graphing<S>, side: Side) -> &'a Graphing<S> {
    match side {
        Side::F => f,
        Side::G => g,
    }
}

/// Images of the path's domain after each step, recomputed from the operands.
pub fn replay<S: Scalar>(f: &Graphing<S>, g: &Graphing<S>, path: &AlternatingPath<S>) -> Result<Vec<MeasurableSet<S>>> {
    let mut current = path.domain.clone();
    let mut out = Vec::with_capacity(path.steps.len());
    for step in &path.steps {
        let edge = &side_graph(f, g, step.side).edges[step.edge];
        if !current.is_subset(&edge.source) {
            return Err(Error::Precondition(format!("path leaves the source of {}{}", step.side, step.edge)));
        }
        current = edge.realizer.apply(&current)?;
        out.push(current.clone());
    }
    Ok(out)
}

fn cell_index<S: Scalar>(g: &Graphing<S>) -> BTreeMap<i64, Vec<usize>> {
    let mut idx: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, e) in g.edges.iter().enumerate() {
        for c in e.source.cells() {
            idx.entry(c).or_default().push(i);
        }
    }
    idx
}

fn candidates(index: &BTreeMap<i64, Vec<usize>>, set: &MeasurableSet<impl Scalar>) -> Vec<usize> {
    let mut out: BTreeSet<usize> = BTreeSet::new();
    for c in set.cells() {
        if let Some(v) = index.get(&c) {
            out.extend(v);
        }
    }
    out.into_iter().collect()
}

fn combined_microcosm<S: Scalar>(f: &Graphing<S>, g: &Graphing<S>) -> Microcosm<S> {
    if g.edges.is_empty() {
        f.microcosm.clone()
    } else if f.edges.is_empty() {
        g.microcosm.clone()
    } else {
        f.microcosm.join(&g.microcosm)
    }
}

#[derive(Clone)]
struct Trail<S> {
    step: Step,
    // the part that entered this step, and the composite before it
    entered: MeasurableSet<S>,
    before: Realizer<S>,
    // weight of this step's edge
    weight: Weight<S>,
}

struct State<S> {
    trail: Vec<Trail<S>>,
    image: MeasurableSet<S>,
    realizer: Realizer<S>,
    weight: Weight<S>,
}

impl<S: Scalar> State<S> {
    fn steps(&self) -> Vec<Step> {
        self.trail.iter().map(|t| t.step).collect()
    }

    fn origin_of(&self, set: &MeasurableSet<S>) -> MeasurableSet<S> {
        self.realizer.inverse().apply(set).expect("preimage of an image")
    }
}

/// Execution `f ⊡ g` along `cut` (default: the intersection of carriers).
pub fn plug<S: Scalar>(
    f: &Graphing<S>,
    g: &Graphing<S>,
    cut: Option<&MeasurableSet<S>>,
    budget: Budget,
) -> Result<Execution<S>> {
    plug_from(f, g, cut, None, budget)
}

/// [`plug`] restricted to paths starting in `origin`: the result is the
/// restriction of the full execution to `origin`.
pub fn plug_from<S: Scalar>(
    f: &Graphing<S>,
    g: &Graphing<S>,
    cut: Option<&MeasurableSet<S>>,
    origin: Option<&MeasurableSet<S>>,
    budget: Budget,
) -> Result<Execution<S>> {
    let weights = f.weights.join(&g.weights)?;
    let cut = cut.cloned().unwrap_or_else(|| f.carrier.intersect(&g.carrier));
    let index = [cell_index(f), cell_index(g)];
    let index_of = |side: Side| match side {
        Side::F => &index[0],
        Side::G => &index[1],
    };

    let mut paths = Vec::new();
    let mut diagnostics = Diagnostics::new();
    let mut visited_states = 0usize;

    for side in [Side::F, Side::G] {
        for (ei, edge) in side_graph(f, g, side).edges.iter().enumerate() {
            let mut start = edge.source.subtract(&cut);
            if let Some(o) = origin {
                start = start.intersect(o);
            }
            if start.is_empty() {
                continue;
            }
            let mut stack = vec![State {
                trail: vec![Trail {
                    step: Step { side, edge: ei },
                    entered: start.clone(),
                    before: Realizer::identity(),
                    weight: edge.weight.clone(),
                }],
                image: edge.realizer.apply(&start)?,
                realizer: edge.realizer.clone(),
                weight: edge.weight.clone(),
            }];
            while let Some(state) = stack.pop() {
                visited_states += 1;
                let outside = state.image.subtract(&cut);
                if !outside.is_empty() {
                    paths.push(AlternatingPath {
                        steps: state.steps(),
                        realizer: state.realizer.clone(),
                        domain: state.origin_of(&outside),
                        weight: state.weight.clone(),
                    });
                }
                let inside = state.image.intersect(&cut);
                if inside.is_empty() {
                    continue;
                }
                if state.trail.len() >= budget.max_steps || visited_states >= budget.max_states {
                    diagnostics.exhausted |= visited_states >= budget.max_states;
                    diagnostics.partial.push(StrandedMass {
                        origin: state.origin_of(&inside),
                        weight: state.weight.clone(),
                        steps: state.steps(),
                    });
                    continue;
                }
                let next_side = state.trail.last().expect("nonempty trail").step.side.other();
                let other = side_graph(f, g, next_side);
                let mut covered = MeasurableSet::empty();
                let mut children = Vec::new();
                for ni in candidates(index_of(next_side), &inside) {
                    let next = &other.edges[ni];
                    let part = inside.intersect(&next.source);
                    if part.is_empty() {
                        continue;
                    }
                    covered = covered.union(&part);
                    let step = Step { side: next_side, edge: ni };
                    let new_weight = weights.mul(&state.weight, &next.weight);
                    if let Some(looped) = detect_loop(&state, step, &part, &weights) {
                        diagnostics.looping.push(looped);
                        continue;
                    }
                    let mut trail = state.trail.clone();
                    trail.push(Trail {
                        step,
                        entered: part.clone(),
                        before: state.realizer.clone(),
                        weight: next.weight.clone(),
                    });
                    children.push(State {
                        trail,
                        image: next.realizer.apply(&part)?,
                        realizer: state.realizer.then(&next.realizer),
                        weight: new_weight,
                    });
                }
                let stuck = inside.subtract(&covered);
                if !stuck.is_empty() {
                    let origin = state.origin_of(&stuck);
                    diagnostics.dead = diagnostics.dead.union(&origin);
                    diagnostics.stuck.push(StrandedMass { origin, weight: state.weight.clone(), steps: state.steps() });
                }
                // reversed so the first candidate edge is explored first
                stack.extend(children.into_iter().rev());
            }
        }
    }

    let carrier = f.carrier.union(&g.carrier).subtract(&cut);
    let mut graphing = Graphing::new(weights, combined_microcosm(f, g), carrier);
    for p in &paths {
        graphing.push(Edge::new(p.weight.clone(), p.domain.clone(), p.realizer.clone()));
    }
    Ok(Execution { graphing, paths, diagnostics })
}

/// The part entering `step` repeats an earlier visit to the same edge and
/// lies inside the set of points that will run the same loop again.
fn detect_loop<S: Scalar>(
    state: &State<S>,
    step: Step,
    part: &MeasurableSet<S>,
    weights: &WeightMonoid,
) -> Option<LoopingMass<S>> {
    for (k, earlier) in state.trail.iter().enumerate().filter(|(_, t)| t.step == step) {
        // map from the earlier entry to the current one
        let segment = earlier.before.inverse().then(&state.realizer);
        let Ok(back) = segment.inverse().apply(part) else { continue };
        if part.is_subset(&back) && back.is_subset(&earlier.entered) {
            let loop_weight = state.trail[k..].iter().fold(weights.unit(), |w, t| weights.mul(&w, &t.weight));
            let trapped = weights.is_unit(&loop_weight);
            let mut steps = state.steps();
            steps.push(step);
            return Some(LoopingMass {
                stranded: StrandedMass { origin: state.origin_of(part), weight: state.weight.clone(), steps },
                loop_weight,
                trapped,
            });
        }
    }
    None
}

// ---------------------------------------------------------------------------
// cycles and measurement

/// Least rotation of a step sequence.
fn least_rotation(steps: &[Step]) -> Vec<Step> {
    (0..steps.len())
        .map(|r| steps[r..].iter().chain(&steps[..r]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

fn is_primitive(steps: &[Step]) -> bool {
    let n = steps.len();
    (1..n).filter(|d| n.is_multiple_of(*d)).all(|d| (0..n).any(|i| steps[i] != steps[(i + d) % n]))
}

/// Cycle search result; `truncated` is set when some branch was still
/// extendable at `max_len`.
#[derive(Clone, Debug)]
pub struct CycleSet<S> {
    pub cycles: Vec<AlternatingCycle<S>>,
    pub truncated: bool,
}

/// Primitive alternating cycles of length at most `max_len` whose support
/// (the points the cycle returns to themselves) is nonempty. Cycles are
/// listed once, in their least rotation, sorted by step sequence.
pub fn cycles<S: Scalar>(f: &Graphing<S>, g: &Graphing<S>, cut: Option<&MeasurableSet<S>>, max_len: usize) -> Result<CycleSet<S>> {
    let weights = f.weights.join(&g.weights)?;
    let cut = cut.cloned().unwrap_or_else(|| f.carrier.intersect(&g.carrier));
    let index = [cell_index(f), cell_index(g)];
    let mut found: BTreeMap<Vec<Step>, AlternatingCycle<S>> = BTreeMap::new();
    let mut truncated = false;

    for side in [Side::F, Side::G] {
        for (ei, edge) in side_graph(f, g, side).edges.iter().enumerate() {
            let start = edge.source.intersect(&cut);
            if start.is_empty() || max_len == 0 {
                continue;
            }
            // (steps, image, composite, weight)
            let mut stack = vec![(
                vec![Step { side, edge: ei }],
                edge.realizer.apply(&start)?.intersect(&cut),
                edge.realizer.clone(),
                edge.weight.clone(),
            )];
            while let Some((steps, image, realizer, weight)) = stack.pop() {
                if image.is_empty() {
                    continue;
                }
                if steps.len() % 2 == 0 && realizer.is_identity() {
                    let support = image.intersect(&start);
                    if !support.is_empty() && is_primitive(&steps) && least_rotation(&steps) == steps {
                        found.entry(steps.clone()).or_insert(AlternatingCycle {
                            steps: steps.clone(),
                            support,
                            weight: weight.clone(),
                        });
                    }
                }
                let next_side = steps.last().expect("nonempty").side.other();
                let idx = if next_side == Side::F { &index[0] } else { &index[1] };
                let other = side_graph(f, g, next_side);
                for ni in candidates(idx, &image).into_iter().rev() {
                    let next = &other.edges[ni];
                    let part = image.intersect(&next.source);
                    if part.is_empty() {
                        continue;
                    }
                    if steps.len() >= max_len {
                        truncated = true;
                        break;
                    }
                    let mut s2 = steps.clone();
                    s2.push(Step { side: next_side, edge: ni });
                    stack.push((
                        s2,
                        next.realizer.apply(&part)?.intersect(&cut),
                        realizer.then(&next.realizer),
                        weights.mul(&weight, &next.weight),
                    ));
                }
            }
        }
    }
    Ok(CycleSet { cycles: found.into_values().collect(), truncated })
}

/// Map from weights to extended nonnegative reals used by [`measurement`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasurementMap<S> {
    /// Same value for every weight.
    Constant(Extended<S>),
    /// `m(w) = w` on scalar weights.
    Identity,
    /// Explicit values, with a default for unlisted weights.
    Table { entries: Vec<(Weight<S>, Extended<S>)>, default: Extended<S> },
}

impl<S: Scalar> MeasurementMap<S> {
    pub fn eval(&self, w: &Weight<S>) -> Extended<S> {
        match self {
            MeasurementMap::Constant(v) => v.clone(),
            MeasurementMap::Identity => match w {
                Weight::Scalar(s) => Extended::Finite(s.clone()),
                Weight::Element(_) => Extended::Infinite,
            },
            MeasurementMap::Table { entries, default } => {
                entries.iter().find(|(k, _)| k == w).map(|(_, v)| v.clone()).unwrap_or_else(|| default.clone())
            }
        }
    }
}

/// `Σ_cycles λ(support) · m(weight)` over the cycles of length `<= max_len`.
pub fn measurement<S: Scalar>(f: &Graphing<S>, g: &Graphing<S>, m: &MeasurementMap<S>, max_len: usize) -> Result<Extended<S>> {
    let found = cycles(f, g, None, max_len)?;
    Ok(found
        .cycles
        .iter()
        .fold(Extended::zero(), |acc, c| acc.add(&m.eval(&c.weight).scale(&c.support.measure()))))
}

// ---------------------------------------------------------------------------
// tests and verdicts

/// Acceptance criterion applied to an execution against a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Test<S> {
    /// The whole start region is carried into the accept region.
    Det,
    /// Some branch reaches accept.
    Nl,
    /// No branch reaches reject.
    CoNl,
    /// Normalized accept mass strictly exceeds the cutpoint.
    Prob(S),
}

impl<S: Scalar> Test<S> {
    pub fn prob(cutpoint: S) -> Result<Self> {
        if cutpoint < S::zero() || cutpoint >= S::one() {
            return Err(Error::Precondition(format!("cutpoint {} outside [0,1)", cutpoint.to_pq())));
        }
        Ok(Test::Prob(cutpoint))
    }

    pub fn name(&self) -> String {
        match self {
            Test::Det => "det".into(),
            Test::Nl => "nl".into(),
            Test::CoNl => "conl".into(),
            Test::Prob(c) => format!("prob({})", c.to_pq()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Accept,
    Reject,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// Named regions of an execution result: where the token starts, and the
/// two answer regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regions<S> {
    pub start: MeasurableSet<S>,
    pub accept: MeasurableSet<S>,
    pub reject: MeasurableSet<S>,
}

/// Masses behind a verdict, normalized by the start region's measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome<S> {
    pub verdict: Verdict,
    pub accept_mass: S,
    pub reject_mass: S,
    pub unresolved_mass: S,
    /// Result edges that carry start mass into the accept region.
    pub accepting_edges: Vec<usize>,
    pub rejecting_edges: Vec<usize>,
}

fn scalar_weight<S: Scalar>(w: &Weight<S>) -> Result<S> {
    w.as_scalar()
        .cloned()
        .ok_or_else(|| Error::Precondition("tests need scalar weights".into()))
}

/// Apply a test to an execution result.
pub fn evaluate_test<S: Scalar>(exec: &Execution<S>, regions: &Regions<S>, test: &Test<S>) -> Result<Outcome<S>> {
    if regions.start.is_empty() {
        return Err(Error::MissingRegion("start".into()));
    }
    if regions.accept.is_empty() {
        return Err(Error::MissingRegion("accept".into()));
    }
    if regions.reject.is_empty() {
        return Err(Error::MissingRegion("reject".into()));
    }
    let full = regions.start.measure();
    let mut accept = S::zero();
    let mut reject = S::zero();
    let mut accepting_edges = Vec::new();
    let mut rejecting_edges = Vec::new();
    for (i, e) in exec.graphing.edges.iter().enumerate() {
        let from = e.source.intersect(&regions.start);
        if from.is_empty() {
            continue;
        }
        let w = scalar_weight(&e.weight)?;
        let image = e.realizer.apply(&from)?;
        let a = image.intersect(&regions.accept);
        if !a.is_empty() {
            accept = accept + w.clone() * a.measure();
            accepting_edges.push(i);
        }
        let r = image.intersect(&regions.reject);
        if !r.is_empty() {
            reject = reject + w * r.measure();
            rejecting_edges.push(i);
        }
    }
    let mut unresolved = S::zero();
    for m in exec.diagnostics.unresolved() {
        let o = m.origin.intersect(&regions.start);
        if !o.is_empty() {
            unresolved = unresolved + scalar_weight(&m.weight)? * o.measure();
        }
    }
    let (accept, reject, unresolved) = (accept / full.clone(), reject / full.clone(), unresolved / full);
    let open = !unresolved.is_zero();

    let verdict = match test {
        Test::Det => {
            if accept.is_one() && rejecting_edges.is_empty() {
                Verdict::Accept
            } else if open && accept.clone() + unresolved.clone() >= S::one() && rejecting_edges.is_empty() {
                Verdict::Undetermined
            } else {
                Verdict::Reject
            }
        }
        Test::Nl => {
            if !accepting_edges.is_empty() {
                Verdict::Accept
            } else if open {
                Verdict::Undetermined
            } else {
                Verdict::Reject
            }
        }
        Test::CoNl => {
            if !rejecting_edges.is_empty() {
                Verdict::Reject
            } else if open {
                Verdict::Undetermined
            } else {
                Verdict::Accept
            }
        }
        Test::Prob(c) => {
            if accept > *c {
                Verdict::Accept
            } else if open && accept.clone() + unresolved.clone() > *c {
                Verdict::Undetermined
            } else {
                Verdict::Reject
            }
        }
    };
    Ok(Outcome {
        verdict,
        accept_mass: accept,
        reject_mass: reject,
        unresolved_mass: unresolved,
        accepting_edges,
        rejecting_edges,
    })
}
