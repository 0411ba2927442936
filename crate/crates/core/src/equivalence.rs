//! Orbit equivalence, compilation between microcosms, and cost.
//!
//! Agreement of two realizers on a positive-measure region is decided by
//! exact equality of their (shift, permutation, offsets) triples, which is
//! sound for affine permutation maps.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_integer::binomial;
use serde_json::{json, Value};

use crate::encodings::{encode_machine, language, MachineSpec};
use crate::error::{Error, Result};
use crate::execution::{Budget, Test};
use crate::graphing::{Edge, Graphing, WeightMonoid};
use crate::realizers::{Microcosm, Realizer};
use crate::scalar::Scalar;
use crate::space::{Coord, Interval, MeasurableSet, Point, RationalBox};

/// One letter of a φ-word: a generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(generator: usize) -> Self {
        Letter { generator, inverse: false }
    }

    fn realizer<S: Scalar>(&self, gens: &[Realizer<S>]) -> Realizer<S> {
        if self.inverse {
            gens[self.generator].inverse()
        } else {
            gens[self.generator].clone()
        }
    }
}

/// `g1^±1 g2^±1 …` read left to right, with the exact set of points of
/// `within` along which every step is defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiWord<S> {
    pub letters: Vec<Letter>,
    pub realizer: Realizer<S>,
    pub domain: MeasurableSet<S>,
}

impl<S: Scalar> PhiWord<S> {
    pub fn empty(within: &MeasurableSet<S>) -> Self {
        PhiWord { letters: Vec::new(), realizer: Realizer::identity(), domain: within.clone() }
    }

    /// Extend by one letter, shrinking the domain to where the step is defined.
    pub fn push(&self, letter: Letter, gens: &[Realizer<S>]) -> Result<Self> {
        let g = letter.realizer(gens);
        let image = self.realizer.apply(&self.domain)?;
        let ok = g.domain_of(&image);
        let domain = self.realizer.inverse().apply(&ok)?;
        let mut letters = self.letters.clone();
        letters.push(letter);
        Ok(PhiWord { letters, realizer: self.realizer.then(&g), domain })
    }

    pub fn to_text(&self) -> String {
        if self.letters.is_empty() {
            return "ε".into();
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| if l.inverse { format!("g{}^-1", l.generator) } else { format!("g{}", l.generator) })
            .collect();
        parts.join(" ")
    }
}

fn alphabet(n: usize, positive_only: bool) -> Vec<Letter> {
    (0..n)
        .flat_map(|g| {
            let mut v = vec![Letter::pos(g)];
            if !positive_only {
                v.push(Letter { generator: g, inverse: true });
            }
            v
        })
        .collect()
}

/// All φ-words of length at most `k` with nonempty domain inside `within`,
/// one per distinct (composite, domain), shortest first.
pub fn phi_words<S: Scalar>(
    gens: &[Realizer<S>],
    k: usize,
    positive_only: bool,
    within: &MeasurableSet<S>,
) -> Result<Vec<PhiWord<S>>> {
    let letters = alphabet(gens.len(), positive_only);
    let root = PhiWord::empty(within);
    let mut seen: HashSet<(Realizer<S>, MeasurableSet<S>)> = HashSet::from([(root.realizer.clone(), root.domain.clone())]);
    let mut out = vec![root.clone()];
    let mut layer = vec![root];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                let x = w.push(l, gens)?;
                if x.domain.is_empty() || !seen.insert((x.realizer.clone(), x.domain.clone())) {
                    continue;
                }
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

/// Points reachable from `p` by at most `k` letters.
pub fn orbit<S: Scalar>(p: &Point<S>, gens: &[Realizer<S>], k: usize, positive_only: bool) -> BTreeSet<Point<S>> {
    let letters: Vec<Realizer<S>> = alphabet(gens.len(), positive_only).iter().map(|l| l.realizer(gens)).collect();
    let mut seen = BTreeSet::from([p.clone()]);
    let mut queue = VecDeque::from([(p.clone(), 0)]);
    while let Some((x, d)) = queue.pop_front() {
        if d == k {
            continue;
        }
        for r in &letters {
            if let Some(y) = r.apply_point(&x) {
                if seen.insert(y.clone()) {
                    queue.push_back((y, d + 1));
                }
            }
        }
    }
    seen
}

// ---------------------------------------------------------------------------
// compilation

/// One part of a compilation: on `part`, the target map equals `word`
/// (followed by `theta` in the up-to-Θ mode).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPart<S> {
    pub part: MeasurableSet<S>,
    pub word: Vec<usize>,
    pub theta: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilationWitness<S> {
    pub parts: Vec<WitnessPart<S>>,
}

impl<S: Scalar> CompilationWitness<S> {
    /// The whole of `domain` handled by one word.
    pub fn single(domain: MeasurableSet<S>, word: Vec<usize>) -> Self {
        CompilationWitness { parts: vec![WitnessPart { part: domain, word, theta: Vec::new() }] }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.parts
                .iter()
                .map(|p| json!({"part": p.part.to_json(), "word": p.word, "theta": p.theta}))
                .collect(),
        )
    }
}

/// Answer of a bounded compilability search; negatives hold only up to the bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compilation<S> {
    Witness(CompilationWitness<S>),
    NotWithin { max_word_len: usize, max_parts: usize },
}

impl<S> Compilation<S> {
    pub fn is_witness(&self) -> bool {
        matches!(self, Compilation::Witness(_))
    }
}

/// Bounded search for a piecewise decomposition of `target` on `domain`
/// into positive words over `gens`.
pub fn is_compilable_on<S: Scalar>(
    target: &Realizer<S>,
    domain: &MeasurableSet<S>,
    gens: &[Realizer<S>],
    max_word_len: usize,
    max_parts: usize,
) -> Result<Compilation<S>> {
    is_compilable_up_to(target, domain, gens, &[], max_word_len, max_parts)
}

/// [`is_compilable_on`] for the target restricted to its domain in cell 0.
pub fn is_compilable<S: Scalar>(
    target: &Realizer<S>,
    gens: &[Realizer<S>],
    max_word_len: usize,
    max_parts: usize,
) -> Result<Compilation<S>> {
    let domain = target.domain_of(&MeasurableSet::unit_cell(0));
    is_compilable_on(target, &domain, gens, max_word_len, max_parts)
}

/// Compilation up to `theta`: on each part some word over `gens` equals the
/// target followed by a positive word over `theta`.
pub fn is_compilable_up_to<S: Scalar>(
    target: &Realizer<S>,
    domain: &MeasurableSet<S>,
    gens: &[Realizer<S>],
    theta: &[Realizer<S>],
    max_word_len: usize,
    max_parts: usize,
) -> Result<Compilation<S>> {
    let negative = Compilation::NotWithin { max_word_len, max_parts };
    if max_word_len == 0 && !target.is_identity() {
        return Ok(negative);
    }
    let image = target.apply(domain)?;
    let thetas = phi_words(theta, max_word_len, true, &image)?;
    let words = phi_words(gens, max_word_len, true, domain)?;
    let mut remaining = domain.clone();
    let mut parts = Vec::new();
    'cover: for t in &thetas {
        let goal = target.then(&t.realizer);
        let t_domain = target.inverse().apply(&t.domain)?;
        for w in words.iter().filter(|w| w.realizer == goal) {
            let part = remaining.intersect(&w.domain).intersect(&t_domain);
            if part.is_empty() {
                continue;
            }
            remaining = remaining.subtract(&part);
            parts.push(WitnessPart {
                part,
                word: w.letters.iter().map(|l| l.generator).collect(),
                theta: t.letters.iter().map(|l| l.generator).collect(),
            });
            if remaining.is_empty() {
                break 'cover;
            }
        }
    }
    if !remaining.is_empty() || parts.len() > max_parts {
        return Ok(negative);
    }
    Ok(Compilation::Witness(CompilationWitness { parts }))
}

/// Result of [`compile_graphing`]: the new graphing and, per new edge, the
/// original edge index and certificate word.
#[derive(Clone, Debug)]
pub struct Compiled<S> {
    pub graphing: Graphing<S>,
    pub certificates: Vec<(usize, Vec<usize>)>,
}

/// Replace every edge by one edge per witness part, realized by the part's
/// word over the target generators.
pub fn compile_graphing<S: Scalar>(
    g: &Graphing<S>,
    witnesses: &[CompilationWitness<S>],
    target: &Microcosm<S>,
) -> Result<Compiled<S>> {
    let gens = target
        .generators()
        .ok_or_else(|| Error::Precondition(format!("{} has no finite generator list", target.name())))?;
    if witnesses.len() != g.edges.len() {
        return Err(Error::Precondition(format!("{} witnesses for {} edges", witnesses.len(), g.edges.len())));
    }
    let bad = |edge: usize, part: usize, reason: &str| Error::InvalidWitness { edge, part, reason: reason.into() };
    let mut out = Graphing::new(g.weights.clone(), target.clone(), g.carrier.clone());
    let mut certificates = Vec::new();
    for (i, (e, w)) in g.edges.iter().zip(witnesses).enumerate() {
        let mut covered = MeasurableSet::empty();
        for (k, p) in w.parts.iter().enumerate() {
            if !p.theta.is_empty() {
                return Err(bad(i, k, "parts compiled up to theta change the map"));
            }
            if p.word.iter().any(|&l| l >= gens.len()) {
                return Err(bad(i, k, "word uses an unknown generator"));
            }
            if covered.meets(&p.part) {
                return Err(bad(i, k, "parts overlap"));
            }
            covered = covered.union(&p.part);
            let mut word = PhiWord::empty(&p.part);
            for &l in &p.word {
                word = word.push(Letter::pos(l), &gens)?;
            }
            if word.domain != p.part {
                return Err(bad(i, k, "word undefined on part of the piece"));
            }
            if word.realizer != e.realizer {
                return Err(bad(i, k, "word and edge disagree"));
            }
            out.push(Edge::new(e.weight.clone(), p.part.clone(), word.realizer));
            certificates.push((i, p.word.clone()));
        }
        if covered != e.source {
            return Err(bad(i, w.parts.len(), "parts do not partition the edge source"));
        }
    }
    Ok(Compiled { graphing: out, certificates })
}

/// Split every part of `w` into halves along coordinate `coord`.
pub fn split_witness<S: Scalar>(w: &CompilationWitness<S>, coord: Coord) -> CompilationWitness<S> {
    let halves = [Interval::frac(0, 1, 2), Interval::frac(1, 2, 2)];
    let parts = w
        .parts
        .iter()
        .flat_map(|p| {
            halves.iter().filter_map(move |h| {
                let cells = p.part.cells().into_iter().map(|c| RationalBox::unit(c).with(coord, h.clone()));
                let piece = p.part.intersect(&MeasurableSet::from_boxes(cells));
                (!piece.is_empty()).then(|| WitnessPart { part: piece, word: p.word.clone(), theta: p.theta.clone() })
            })
        })
        .collect();
    CompilationWitness { parts }
}

/// Witnesses for every edge of `g` over `gens`, or the first edge that has
/// none within the bounds.
pub fn witnesses_for<S: Scalar>(
    g: &Graphing<S>,
    gens: &[Realizer<S>],
    max_word_len: usize,
    max_parts: usize,
) -> Result<std::result::Result<Vec<CompilationWitness<S>>, usize>> {
    let mut out = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        match is_compilable_on(&e.realizer, &e.source, gens, max_word_len, max_parts)? {
            Compilation::Witness(w) => out.push(w),
            Compilation::NotWithin { .. } => return Ok(Err(i)),
        }
    }
    Ok(Ok(out))
}

/// A machine graphing recompiled into the generators of `m_heads`.
#[derive(Clone, Debug)]
pub struct CompileReport<S> {
    pub machine: String,
    pub max_len: usize,
    pub edges_before: usize,
    pub edges_after: usize,
    pub cost_before: S,
    pub cost_after: S,
    /// Cost after also halving every part along coordinate 2.
    pub cost_split: S,
    pub language_before: Vec<String>,
    pub language_after: Vec<String>,
}

impl<S: Scalar> CompileReport<S> {
    pub fn languages_equal(&self) -> bool {
        self.language_before == self.language_after
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "compile",
            "machine": self.machine,
            "max_len": self.max_len,
            "edges_before": self.edges_before,
            "edges_after": self.edges_after,
            "cost_before": self.cost_before.to_pq(),
            "cost_after": self.cost_after.to_pq(),
            "cost_split": self.cost_split.to_pq(),
            "language_before": self.language_before,
            "language_after": self.language_after,
            "languages_equal": self.languages_equal(),
        })
    }
}

/// Decompose every edge of the machine into words over `τ_1, τ_-1, s_2 .. s_i`
/// and compare languages before and after.
pub fn compile_experiment<S: Scalar>(
    spec: &MachineSpec<S>,
    test: &Test<S>,
    max_len: usize,
    budget: Budget,
) -> Result<CompileReport<S>> {
    let layout = spec.layout()?;
    let g = encode_machine(spec, &layout)?;
    let gens = Microcosm::<S>::m(spec.heads).generators().expect("finite");
    let longest = g.edges.iter().map(|e| e.realizer.shift_by().unsigned_abs() as usize + 1).max().unwrap_or(1);
    let witnesses = witnesses_for(&g, &gens, longest, 1)?
        .map_err(|i| Error::Precondition(format!("edge {i} has no word of length <= {longest}")))?;
    let target = Microcosm::FinitelyGenerated(gens);
    let compiled = compile_graphing(&g, &witnesses, &target)?;
    if let Err(v) = compiled.graphing.validate_with_bound(longest) {
        return Err(Error::Precondition(format!("compiled graphing invalid: {v:?}")));
    }
    let split: Vec<_> = witnesses.iter().map(|w| split_witness(w, 2)).collect();
    let split = compile_graphing(&g, &split, &target)?;
    let rows = spec.states.len();
    let one_way = !spec.two_way;
    let before = language(&g, &layout, test, max_len, one_way, rows, budget)?;
    let after = language(&compiled.graphing, &layout, test, max_len, one_way, rows, budget)?;
    Ok(CompileReport {
        machine: spec.name.clone(),
        max_len,
        edges_before: g.edges.len(),
        edges_after: compiled.graphing.edges.len(),
        cost_before: g.cost(),
        cost_after: compiled.graphing.cost(),
        cost_split: split.graphing.cost(),
        language_before: before.accepted,
        language_after: after.accepted,
    })
}

// ---------------------------------------------------------------------------
// treeings

/// `1 - 1/i!`, the cost of the free action of the symmetric group `S_i`.
pub fn fixed_cost<S: Scalar>(i: u32) -> S {
    let fact = (1..=i as i64).product::<i64>();
    S::one() - S::frac(1, fact)
}

/// Probability that `m` uniform points are pairwise separated by dyadic
/// cells within `r` refinement levels, by splitting on the first level.
fn separated<S: Scalar>(m: u32, r: u32, memo: &mut BTreeMap<(u32, u32), S>) -> S {
    if m <= 1 {
        return S::one();
    }
    if r == 0 {
        return S::zero();
    }
    if let Some(v) = memo.get(&(m, r)) {
        return v.clone();
    }
    let mut total = S::zero();
    for k in 0..=m {
        let ways = S::from_int(binomial(m as i64, k as i64));
        total = total + ways * separated(k, r - 1, memo) * separated(m - k, r - 1, memo);
    }
    let v = total / S::from_int(1i64 << m);
    memo.insert((m, r), v.clone());
    v
}

/// Cost of the depth-truncated treeing and the exact total of the series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeingCost<S> {
    pub i: u32,
    pub depth: u32,
    pub partial: S,
    pub total: S,
}

impl<S: Scalar> TreeingCost<S> {
    pub fn to_json(&self) -> Value {
        json!({"kind": "cost", "i": self.i, "depth": self.depth, "partial": self.partial.to_pq(), "total": self.total.to_pq()})
    }
}

pub fn treeing_cost<S: Scalar>(i: u32, depth: u32) -> Result<TreeingCost<S>> {
    if i < 2 {
        return Err(Error::Precondition("treeings need i >= 2".into()));
    }
    let total = fixed_cost::<S>(i);
    let partial = total.clone() * separated(i, depth, &mut BTreeMap::new());
    Ok(TreeingCost { i, depth, partial, total })
}

/// Spanning tree of orderings of `1..=i` under the moves "exchange the
/// labels 1 and j", rooted at the sorted ordering; maps each non-root
/// ordering to the `j` leading towards the root.
fn ordering_tree(i: u32) -> BTreeMap<Vec<Coord>, Coord> {
    let root: Vec<Coord> = (1..=i).collect();
    let swap = |o: &[Coord], j: Coord| -> Vec<Coord> {
        o.iter().map(|&c| if c == 1 { j } else if c == j { 1 } else { c }).collect()
    };
    let mut parent = BTreeMap::new();
    let mut seen = BTreeSet::from([root.clone()]);
    let mut queue = VecDeque::from([root]);
    while let Some(o) = queue.pop_front() {
        for j in 2..=i {
            let child = swap(&o, j);
            if seen.insert(child.clone()) {
                parent.insert(child.clone(), j);
                queue.push_back(child);
            }
        }
    }
    parent
}

/// Boxes of `[0,1)^i` in cell 0 on which all coordinates sit in distinct
/// dyadic cells of level at most `depth`, each with the coordinate order
/// holding on the whole box.
pub fn separated_boxes<S: Scalar>(i: u32, depth: u32) -> Vec<(RationalBox<S>, Vec<Coord>)> {
    // a group is a set of coordinates sharing one dyadic interval
    type Group<S> = (Vec<Coord>, Interval<S>);
    fn go<S: Scalar>(groups: Vec<Group<S>>, left: u32, out: &mut Vec<(RationalBox<S>, Vec<Coord>)>) {
        if groups.iter().all(|(g, _)| g.len() == 1) {
            let b = RationalBox::new(0, groups.iter().map(|(g, iv)| (g[0], iv.clone())));
            out.push((b, groups.iter().map(|(g, _)| g[0]).collect()));
            return;
        }
        if left == 0 {
            return;
        }
        // refine every tied group by one level, all combinations at once
        let mut options: Vec<Vec<Vec<Group<S>>>> = Vec::new();
        for (g, iv) in &groups {
            if g.len() == 1 {
                options.push(vec![vec![(g.clone(), iv.clone())]]);
                continue;
            }
            let mid = (iv.lo().clone() + iv.hi().clone()) / S::from_int(2);
            let lower = Interval::new(iv.lo().clone(), mid.clone()).expect("nonempty half");
            let upper = Interval::new(mid, iv.hi().clone()).expect("nonempty half");
            let mut choices = Vec::new();
            for mask in 0u32..(1 << g.len()) {
                let lo: Vec<Coord> = g.iter().enumerate().filter(|(k, _)| mask & (1 << k) == 0).map(|(_, &c)| c).collect();
                let hi: Vec<Coord> = g.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &c)| c).collect();
                let mut split = Vec::new();
                if !lo.is_empty() {
                    split.push((lo, lower.clone()));
                }
                if !hi.is_empty() {
                    split.push((hi, upper.clone()));
                }
                choices.push(split);
            }
            options.push(choices);
        }
        let mut combos: Vec<Vec<Group<S>>> = vec![Vec::new()];
        for choices in options {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |c| {
                        let mut v = prefix.clone();
                        v.extend(c.iter().cloned());
                        v
                    })
                })
                .collect();
        }
        for c in combos {
            go(c, left - 1, out);
        }
    }
    let mut out = Vec::new();
    go(vec![((1..=i).collect(), Interval::unit())], depth, &mut out);
    out
}

/// Depth-truncated treeing of the coordinate-permutation action of `S_i`
/// on `[0,1)^i`: every separated box whose coordinate order is not the
/// sorted one gets an edge `(1 j)` one step closer to the sorted order.
pub fn treeing<S: Scalar>(i: u32, depth: u32) -> Result<Graphing<S>> {
    if i < 2 {
        return Err(Error::Precondition("treeings need i >= 2".into()));
    }
    let tree = ordering_tree(i);
    let mut g = Graphing::new(WeightMonoid::Trivial, Microcosm::m(i), MeasurableSet::unit_cell(0));
    for (b, order) in separated_boxes::<S>(i, depth) {
        if let Some(&j) = tree.get(&order) {
            g.push(Edge::unit(MeasurableSet::from_box(b), Realizer::head_swap(j)));
        }
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// separation

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport<S> {
    pub i: u32,
    pub j: u32,
    pub cost_i: S,
    pub cost_j: S,
    /// Search for `s_j` among words over the generators of `m_i`.
    pub compilation: Compilation<S>,
}

impl<S: Scalar> SeparationReport<S> {
    /// Costs differ and no compilation was found within the bounds.
    pub fn consistent(&self) -> bool {
        self.cost_i != self.cost_j && !self.compilation.is_witness()
    }

    pub fn to_json(&self) -> Value {
        let search = match &self.compilation {
            Compilation::Witness(w) => json!({"found": true, "witness": w.to_json()}),
            Compilation::NotWithin { max_word_len, max_parts } => {
                json!({"found": false, "max_word_len": max_word_len, "max_parts": max_parts})
            }
        };
        json!({
            "kind": "separation",
            "note": "bounded consistency check, not a proof",
            "i": self.i,
            "j": self.j,
            "cost_i": self.cost_i.to_pq(),
            "cost_j": self.cost_j.to_pq(),
            "s_j_in_m_i": search,
            "consistent": self.consistent(),
        })
    }
}

pub fn separation_experiment<S: Scalar>(i: u32, j: u32, max_word_len: usize, max_parts: usize) -> Result<SeparationReport<S>> {
    if i < 2 || j <= i {
        return Err(Error::Precondition(format!("separation needs 2 <= i < j, got ({i}, {j})")));
    }
    let gens = Microcosm::<S>::m(i).generators().expect("finite");
    let target = Realizer::head_swap(j);
    Ok(SeparationReport {
        i,
        j,
        cost_i: treeing_cost::<S>(i, 0)?.total,
        cost_j: treeing_cost::<S>(j, 0)?.total,
        compilation: is_compilable(&target, &gens, max_word_len, max_parts)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::Ratio;

    type Q = Ratio<BigInt>;

    fn q(a: i64, b: i64) -> Q {
        Q::frac(a, b)
    }

    fn cube() -> MeasurableSet<Q> {
        MeasurableSet::unit_cell(0)
    }

    #[test]
    fn phi_words_examples() {
        let ws = phi_words::<Q>(&[Realizer::shift(1)], 0, true, &cube()).unwrap();
        assert_eq!(ws.len(), 1);
        assert!(ws[0].realizer.is_identity());

        let ws = phi_words::<Q>(&[Realizer::head_swap(2)], 2, true, &cube()).unwrap();
        assert_eq!(ws.len(), 2);

        let ws = phi_words::<Q>(&[Realizer::shift(1)], 3, true, &cube()).unwrap();
        let shifts: Vec<i64> = ws.iter().map(|w| w.realizer.shift_by()).collect();
        assert_eq!(shifts, vec![0, 1, 2, 3]);
    }

    #[test]
    fn phi_word_domains_track_offsets() {
        let half = Realizer::offset(1, q(1, 2));
        let ws = phi_words::<Q>(&[half], 2, true, &cube()).unwrap();
        assert_eq!(ws.len(), 2, "a second +1/2 step leaves the cube");
        assert_eq!(ws[1].domain.measure(), q(1, 2));
    }

    #[test]
    fn orbit_examples() {
        let p = Point::new(0, [(1, q(1, 4)), (2, q(3, 4))]);
        let o = orbit(&p, &[Realizer::head_swap(2)], 1, false);
        assert_eq!(o, BTreeSet::from([p.clone(), Point::new(0, [(1, q(3, 4)), (2, q(1, 4))])]));
        assert_eq!(orbit::<Q>(&p, &[], 5, false), BTreeSet::from([p.clone()]));

        let p = Point::new(0, [(1, q(1, 4))]);
        let cells = |o: BTreeSet<Point<Q>>| o.iter().map(|x| x.cell).collect::<Vec<_>>();
        assert_eq!(cells(orbit(&p, &[Realizer::shift(1)], 2, true)), vec![0, 1, 2]);
        assert_eq!(cells(orbit(&p, &[Realizer::shift(1)], 2, false)), vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn compilability_examples() {
        let c = is_compilable::<Q>(&Realizer::shift(2), &[Realizer::shift(1)], 2, 1).unwrap();
        let Compilation::Witness(w) = c else { panic!("shift 2 compiles") };
        assert_eq!(w.parts.len(), 1);
        assert_eq!(w.parts[0].word, vec![0, 0]);

        let c = is_compilable::<Q>(&Realizer::head_swap(2), &[Realizer::shift(1), Realizer::shift(-1)], 6, 8).unwrap();
        assert!(!c.is_witness());

        let c = is_compilable::<Q>(&Realizer::identity(), &[Realizer::shift(3)], 0, 1).unwrap();
        assert!(c.is_witness());
    }

    #[test]
    fn piecewise_compilation_needs_several_parts() {
        // +1/4 on [0,3/4): "+1/2 -1/4" works below 1/2, "-1/4 +1/2" above 1/4
        let gens = vec![Realizer::offset(1, q(1, 2)), Realizer::offset(1, q(-1, 4))];
        let target = Realizer::offset(1, q(1, 4));
        let c = is_compilable(&target, &gens, 2, 2).unwrap();
        let Compilation::Witness(w) = c else { panic!("two parts suffice") };
        assert_eq!(w.parts.len(), 2);
        assert_eq!(w.parts[0].part.measure() + w.parts[1].part.measure(), q(3, 4));
        assert!(!is_compilable(&target, &gens, 2, 1).unwrap().is_witness());
    }

    #[test]
    fn compile_identity_witness_keeps_graphing() {
        let src = MeasurableSet::from_box(RationalBox::unit(0).with(1, Interval::frac(0, 1, 2)));
        let g = Graphing::<Q>::new(WeightMonoid::Trivial, Microcosm::M1, MeasurableSet::unit_cells([0, 1, 2]))
            .with_edge(Edge::unit(src.clone(), Realizer::shift(2)));
        let target = Microcosm::FinitelyGenerated(vec![Realizer::shift(2)]);
        let out = compile_graphing(&g, &[CompilationWitness::single(src.clone(), vec![0])], &target).unwrap();
        assert!(out.graphing.canonically_equal(&g));

        let halves = CompilationWitness {
            parts: vec![
                WitnessPart { part: src.intersect(&MeasurableSet::from_box(RationalBox::unit(0).with(2, Interval::frac(0, 1, 2)))), word: vec![0], theta: vec![] },
                WitnessPart { part: src.intersect(&MeasurableSet::from_box(RationalBox::unit(0).with(2, Interval::frac(1, 2, 2)))), word: vec![0], theta: vec![] },
            ],
        };
        let out = compile_graphing(&g, &[halves], &target).unwrap();
        assert_eq!(out.graphing.edges.len(), 2);
        assert_eq!(out.graphing.cost(), g.cost());

        let wrong = CompilationWitness::single(src, vec![0, 0]);
        assert!(matches!(compile_graphing(&g, &[wrong], &target), Err(Error::InvalidWitness { edge: 0, part: 0, .. })));
    }

    #[test]
    fn split_witness_halves_parts() {
        let w = CompilationWitness::single(cube(), vec![0]);
        let s = split_witness(&w, 2);
        assert_eq!(s.parts.len(), 2);
        assert_eq!(s.parts[0].part.measure(), q(1, 2));
    }

    /// Probability that `m` points fall in distinct cells among `2^d`.
    fn distinct_cells(m: u32, d: u32) -> Q {
        let cells = Q::from_int(1i64 << d);
        (0..m).fold(Q::from_int(1), |acc, k| acc * (Q::from_int(1) - Q::from_int(k as i64) / cells.clone()))
    }

    #[test]
    fn treeing_cost_matches_direct_formula() {
        for i in 2..=4 {
            for d in 0..=8 {
                let t = treeing_cost::<Q>(i, d).unwrap();
                assert_eq!(t.partial, fixed_cost::<Q>(i) * distinct_cells(i, d), "i={i} d={d}");
            }
        }
        assert_eq!(treeing_cost::<Q>(2, 4).unwrap().partial, q(15, 32));
        assert_eq!(treeing_cost::<Q>(3, 1).unwrap().total, q(5, 6));
    }

    #[test]
    fn materialized_treeing_has_the_series_cost() {
        for (i, depth) in [(2, 1), (2, 5), (3, 1), (3, 3), (4, 2)] {
            let g = treeing::<Q>(i, depth).unwrap();
            assert!(g.validate().is_ok());
            assert_eq!(g.classify(), crate::graphing::Class::Deterministic);
            assert_eq!(g.cost(), treeing_cost::<Q>(i, depth).unwrap().partial, "i={i} depth={depth}");
        }
    }

    #[test]
    fn treeing_edges_land_in_separated_boxes() {
        let g = treeing::<Q>(3, 2).unwrap();
        let support: MeasurableSet<Q> =
            MeasurableSet::from_boxes(separated_boxes::<Q>(3, 2).into_iter().map(|(b, _)| b));
        for e in &g.edges {
            assert!(e.target().unwrap().is_subset(&support));
        }
    }

    #[test]
    fn separation_examples() {
        let r = separation_experiment::<Q>(2, 3, 6, 8).unwrap();
        assert_eq!((r.cost_i.clone(), r.cost_j.clone()), (q(1, 2), q(5, 6)));
        assert!(r.consistent());
        assert!(separation_experiment::<Q>(2, 2, 6, 8).is_err());
        let r = separation_experiment::<Q>(3, 4, 4, 8).unwrap();
        assert!(r.consistent());
        assert_eq!((r.cost_i, r.cost_j), (q(5, 6), q(23, 24)));
    }
}
