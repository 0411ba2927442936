//! The measure space `Z × [0,1)^N` and its finite box algebra.
//!
//! A [`MeasurableSet`] is a finite union of half-open rational boxes, each
//! pinned to a single integer cell. Sets are always kept in a canonical form:
//! the boxes are pairwise disjoint, sorted, and produced by a coordinate-wise
//! sweep that merges neighbouring slabs with identical cross-sections, so two
//! sets are equal as point sets exactly when their box lists are equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index of a coordinate of the Hilbert cube, starting at 1.
pub type Coord = u32;

/// Half-open interval `[lo, hi)` with `0 <= lo < hi <= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval<S> {
    lo: S,
    hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Result<Self> {
        if lo < S::zero() || hi > S::one() || lo >= hi {
            return Err(Error::InvalidInterval { lo: lo.to_pq(), hi: hi.to_pq() });
        }
        Ok(Interval { lo, hi })
    }

    /// Shorthand for `[a/d, b/d)`; panics if the interval is invalid.
    pub fn frac(a: i64, b: i64, d: i64) -> Self {
        Self::new(S::frac(a, d), S::frac(b, d)).expect("valid interval")
    }

    pub fn unit() -> Self {
        Interval { lo: S::zero(), hi: S::one() }
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn len(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_unit(&self) -> bool {
        self.lo.is_zero() && self.hi.is_one()
    }

    pub fn contains_point(&self, x: &S) -> bool {
        &self.lo <= x && x < &self.hi
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// Translate by `offset`, clipped to `[0,1)`. `None` if nothing survives.
    pub fn translate_clipped(&self, offset: &S) -> Option<Self> {
        let lo = (self.lo.clone() + offset.clone()).max(S::zero());
        let hi = (self.hi.clone() + offset.clone()).min(S::one());
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// Exact translation; `None` if the image leaves `[0,1)`.
    pub fn translate(&self, offset: &S) -> Option<Self> {
        let lo = self.lo.clone() + offset.clone();
        let hi = self.hi.clone() + offset.clone();
        (lo >= S::zero() && hi <= S::one()).then_some(Interval { lo, hi })
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo.to_pq(), self.hi.to_pq())
    }
}

/// One cell of `Z` times a product of intervals. Unlisted coordinates are the
/// full unit interval; a canonical box never lists a unit interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalBox<S> {
    cell: i64,
    coords: BTreeMap<Coord, Interval<S>>,
}

impl<S: Scalar> RationalBox<S> {
    /// The whole unit cube sitting over `cell`.
    pub fn unit(cell: i64) -> Self {
        RationalBox { cell, coords: BTreeMap::new() }
    }

    pub fn new(cell: i64, coords: impl IntoIterator<Item = (Coord, Interval<S>)>) -> Self {
        let coords = coords.into_iter().filter(|(_, iv)| !iv.is_unit()).collect();
        RationalBox { cell, coords }
    }

    pub fn with(mut self, coord: Coord, interval: Interval<S>) -> Self {
        assert!(coord >= 1, "coordinates are 1-based");
        if interval.is_unit() {
            self.coords.remove(&coord);
        } else {
            self.coords.insert(coord, interval);
        }
        self
    }

    pub fn cell(&self) -> i64 {
        self.cell
    }

    pub fn coords(&self) -> &BTreeMap<Coord, Interval<S>> {
        &self.coords
    }

    pub fn interval(&self, coord: Coord) -> Interval<S> {
        self.coords.get(&coord).cloned().unwrap_or_else(Interval::unit)
    }

    pub fn measure(&self) -> S {
        self.coords.values().fold(S::one(), |acc, iv| acc * iv.len())
    }

    pub(crate) fn with_cell(mut self, cell: i64) -> Self {
        self.cell = cell;
        self
    }

    pub(crate) fn from_parts(cell: i64, coords: BTreeMap<Coord, Interval<S>>) -> Self {
        RationalBox::new(cell, coords)
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        if self.cell != other.cell {
            return None;
        }
        let mut coords = self.coords.clone();
        for (c, iv) in &other.coords {
            let merged = match coords.get(c) {
                Some(mine) => mine.intersect(iv)?,
                None => iv.clone(),
            };
            coords.insert(*c, merged);
        }
        Some(RationalBox { cell: self.cell, coords })
    }

    /// `self \ other` as disjoint boxes.
    pub fn subtract(&self, other: &Self) -> Vec<Self> {
        if self.intersect(other).is_none() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut rest = self.clone();
        for (c, cut) in &other.coords {
            let mine = rest.interval(*c);
            if mine.lo < cut.lo {
                let below = Interval { lo: mine.lo.clone(), hi: cut.lo.clone().min(mine.hi.clone()) };
                out.push(rest.clone().with(*c, below));
            }
            if cut.hi < mine.hi {
                let above = Interval { lo: cut.hi.clone().max(mine.lo.clone()), hi: mine.hi.clone() };
                out.push(rest.clone().with(*c, above));
            }
            let middle = mine.intersect(cut).expect("boxes intersect");
            rest = rest.with(*c, middle);
        }
        out
    }

    pub fn contains_point(&self, p: &Point<S>) -> bool {
        self.cell == p.cell && self.coords.iter().all(|(c, iv)| iv.contains_point(&p.coord(*c)))
    }

    pub fn to_json(&self) -> Value {
        let coords: serde_json::Map<String, Value> = self
            .coords
            .iter()
            .map(|(c, iv)| (c.to_string(), json!([iv.lo.to_pq(), iv.hi.to_pq()])))
            .collect();
        json!({ "cell": self.cell, "coords": coords })
    }
}

impl<S: Scalar> fmt::Display for RationalBox<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{cell {}", self.cell)?;
        for (c, iv) in &self.coords {
            write!(f, ", x{c} in {iv}")?;
        }
        write!(f, "}}")
    }
}

/// Canonical finite union of pairwise-disjoint boxes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurableSet<S> {
    boxes: Vec<RationalBox<S>>,
}

impl<S: Scalar> Default for MeasurableSet<S> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<S: Scalar> MeasurableSet<S> {
    pub fn empty() -> Self {
        MeasurableSet { boxes: Vec::new() }
    }

    /// Union of arbitrary (possibly overlapping) boxes, canonicalized.
    pub fn from_boxes(boxes: impl IntoIterator<Item = RationalBox<S>>) -> Self {
        MeasurableSet { boxes: canonicalize(boxes) }
    }

    pub fn from_box(b: RationalBox<S>) -> Self {
        MeasurableSet { boxes: vec![b] }
    }

    pub fn unit_cell(cell: i64) -> Self {
        Self::from_box(RationalBox::unit(cell))
    }

    /// Full unit cubes over each listed cell.
    pub fn unit_cells(cells: impl IntoIterator<Item = i64>) -> Self {
        Self::from_boxes(cells.into_iter().map(RationalBox::unit))
    }

    pub fn boxes(&self) -> &[RationalBox<S>] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn cells(&self) -> BTreeSet<i64> {
        self.boxes.iter().map(|b| b.cell).collect()
    }

    pub fn measure(&self) -> S {
        self.boxes.iter().fold(S::zero(), |acc, b| acc + b.measure())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                if let Some(x) = a.intersect(b) {
                    out.push(x);
                }
            }
        }
        Self::from_boxes(out)
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_boxes(self.boxes.iter().chain(&other.boxes).cloned())
    }

    pub fn subtract(&self, other: &Self) -> Self {
        let mut pieces = self.boxes.clone();
        for b in &other.boxes {
            pieces = pieces.iter().flat_map(|p| p.subtract(b)).collect();
            if pieces.is_empty() {
                break;
            }
        }
        Self::from_boxes(pieces)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.subtract(other).is_empty()
    }

    pub fn meets(&self, other: &Self) -> bool {
        self.boxes.iter().any(|a| other.boxes.iter().any(|b| a.intersect(b).is_some()))
    }

    pub fn contains_point(&self, p: &Point<S>) -> bool {
        self.boxes.iter().any(|b| b.contains_point(p))
    }

    /// Same set with every box moved by `delta` cells.
    pub fn shift_cells(&self, delta: i64) -> Self {
        MeasurableSet {
            boxes: self.boxes.iter().map(|b| b.clone().with_cell(b.cell + delta)).collect(),
        }
    }

    /// Restricted to the boxes sitting over `cell`.
    pub fn in_cell(&self, cell: i64) -> Self {
        MeasurableSet { boxes: self.boxes.iter().filter(|b| b.cell == cell).cloned().collect() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.boxes.iter().map(RationalBox::to_json).collect())
    }
}

impl<S: Scalar> fmt::Display for MeasurableSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxes.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.boxes.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(" u "))
    }
}

/// Pieces of a common refinement: each atom is the set of points lying in
/// exactly the input sets listed in `members`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom<S> {
    pub set: MeasurableSet<S>,
    pub members: Vec<usize>,
}

/// Partition of the union of `sets` into atoms of constant membership, in
/// canonical order of their first box.
pub fn refinement_atoms<S: Scalar>(sets: &[MeasurableSet<S>]) -> Vec<Atom<S>> {
    let mut atoms: Vec<Atom<S>> = Vec::new();
    for (idx, s) in sets.iter().enumerate() {
        let mut next = Vec::with_capacity(atoms.len() * 2 + 1);
        let mut fresh = s.clone();
        for atom in atoms {
            let inside = atom.set.intersect(s);
            if inside.is_empty() {
                next.push(atom);
                continue;
            }
            fresh = fresh.subtract(&inside);
            let outside = atom.set.subtract(s);
            if !outside.is_empty() {
                next.push(Atom { set: outside, members: atom.members.clone() });
            }
            let mut members = atom.members;
            members.push(idx);
            next.push(Atom { set: inside, members });
        }
        if !fresh.is_empty() {
            next.push(Atom { set: fresh, members: vec![idx] });
        }
        atoms = next;
    }
    atoms.sort_by(|a, b| a.set.boxes.first().cmp(&b.set.boxes.first()));
    atoms
}

/// Finite box partition of the union of `sets` such that every input set is
/// a union of its boxes.
pub fn common_refinement<S: Scalar>(sets: &[MeasurableSet<S>]) -> Vec<RationalBox<S>> {
    let mut boxes: Vec<RationalBox<S>> =
        refinement_atoms(sets).into_iter().flat_map(|a| a.set.boxes).collect();
    boxes.sort();
    boxes
}

/// A point of `Z × [0,1)^N` with finitely many nonzero coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point<S> {
    pub cell: i64,
    coords: BTreeMap<Coord, S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(cell: i64, coords: impl IntoIterator<Item = (Coord, S)>) -> Self {
        let coords = coords.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        Point { cell, coords }
    }

    pub fn coord(&self, c: Coord) -> S {
        self.coords.get(&c).cloned().unwrap_or_else(S::zero)
    }

    pub fn coords(&self) -> &BTreeMap<Coord, S> {
        &self.coords
    }

    pub fn to_json(&self) -> Value {
        let coords: serde_json::Map<String, Value> =
            self.coords.iter().map(|(c, x)| (c.to_string(), json!(x.to_pq()))).collect();
        json!({ "cell": self.cell, "coords": coords })
    }
}

impl<S: Scalar> fmt::Display for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.cell)?;
        for (c, x) in &self.coords {
            write!(f, ", x{c}={}", x.to_pq())?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// canonical form

type CoordMap<S> = BTreeMap<Coord, Interval<S>>;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node<S> {
    Empty,
    Full,
    Split { coord: Coord, pieces: Vec<(Interval<S>, Node<S>)> },
}

fn canonicalize<S: Scalar>(boxes: impl IntoIterator<Item = RationalBox<S>>) -> Vec<RationalBox<S>> {
    let mut by_cell: BTreeMap<i64, Vec<CoordMap<S>>> = BTreeMap::new();
    for b in boxes {
        by_cell.entry(b.cell).or_default().push(b.coords);
    }
    let mut out = Vec::new();
    for (cell, items) in by_cell {
        let node = sweep(items);
        let mut flat = Vec::new();
        flatten(&node, &mut BTreeMap::new(), &mut flat);
        out.extend(flat.into_iter().map(|coords| RationalBox { cell, coords }));
    }
    out.sort();
    out
}

/// Sweep along the smallest constrained coordinate, recurse on the
/// cross-sections and merge neighbouring slabs whose cross-sections agree.
fn sweep<S: Scalar>(items: Vec<CoordMap<S>>) -> Node<S> {
    if items.is_empty() {
        return Node::Empty;
    }
    if items.iter().any(|m| m.is_empty()) {
        return Node::Full;
    }
    let coord = items.iter().filter_map(|m| m.keys().next().copied()).min().expect("nonempty maps");

    let mut cuts: BTreeSet<S> = BTreeSet::new();
    cuts.insert(S::zero());
    cuts.insert(S::one());
    for m in &items {
        if let Some(iv) = m.get(&coord) {
            cuts.insert(iv.lo.clone());
            cuts.insert(iv.hi.clone());
        }
    }
    let cuts: Vec<S> = cuts.into_iter().collect();

    let mut pieces: Vec<(Interval<S>, Node<S>)> = Vec::new();
    for w in cuts.windows(2) {
        let slab = Interval { lo: w[0].clone(), hi: w[1].clone() };
        let section: Vec<CoordMap<S>> = items
            .iter()
            .filter(|m| m.get(&coord).is_none_or(|iv| iv.contains(&slab)))
            .map(|m| {
                let mut rest = m.clone();
                rest.remove(&coord);
                rest
            })
            .collect();
        let child = sweep(section);
        match pieces.last_mut() {
            Some((prev, node)) if *node == child => prev.hi = slab.hi,
            _ => pieces.push((slab, child)),
        }
    }
    pieces.retain(|(_, n)| *n != Node::Empty);
    match pieces.len() {
        0 => Node::Empty,
        1 if pieces[0].0.is_unit() => pieces.pop().expect("one piece").1,
        _ => Node::Split { coord, pieces },
    }
}

fn flatten<S: Scalar>(node: &Node<S>, prefix: &mut CoordMap<S>, out: &mut Vec<CoordMap<S>>) {
    match node {
        Node::Empty => {}
        Node::Full => out.push(prefix.clone()),
        Node::Split { coord, pieces } => {
            for (iv, child) in pieces {
                prefix.insert(*coord, iv.clone());
                flatten(child, prefix, out);
                prefix.remove(coord);
            }
        }
    }
}
