//! Partial measure-preserving maps of `Z × [0,1)^N` and the microcosms they
//! belong to.
//!
//! A [`Realizer`] acts on a point `(n, x)` by permuting coordinates, then
//! adding per-coordinate offsets, then shifting the integer cell:
//! output coordinate `π(i)` is `x_i + c_{π(i)}` and the cell is `n + k`.
//! The map is only defined where every offset coordinate stays in `[0,1)`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{Coord, Interval, MeasurableSet, Point, RationalBox};

/// A finitely supported permutation of the coordinate indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    // i ↦ π(i), fixed points omitted
    map: BTreeMap<Coord, Coord>,
}

impl Perm {
    pub fn identity() -> Self {
        Perm::default()
    }

    pub fn transposition(a: Coord, b: Coord) -> Self {
        let mut map = BTreeMap::new();
        if a != b {
            map.insert(a, b);
            map.insert(b, a);
        }
        Perm { map }
    }

    /// From explicit images; panics if `images` is not a bijection.
    pub fn from_images(images: impl IntoIterator<Item = (Coord, Coord)>) -> Self {
        let map: BTreeMap<Coord, Coord> = images.into_iter().filter(|(a, b)| a != b).collect();
        let mut targets: Vec<Coord> = map.values().copied().collect();
        targets.sort_unstable();
        let sources: Vec<Coord> = map.keys().copied().collect();
        assert_eq!(targets, sources, "not a permutation");
        Perm { map }
    }

    pub fn image(&self, i: Coord) -> Coord {
        self.map.get(&i).copied().unwrap_or(i)
    }

    pub fn preimage(&self, j: Coord) -> Coord {
        self.map.iter().find(|(_, &v)| v == j).map(|(&k, _)| k).unwrap_or(j)
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Largest moved coordinate, 0 for the identity.
    pub fn max_moved(&self) -> Coord {
        self.map.keys().next_back().copied().unwrap_or(0)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Perm) -> Perm {
        let mut keys: Vec<Coord> = self.map.keys().chain(then.map.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        Perm::from_images(keys.into_iter().map(|i| (i, then.image(self.image(i)))))
    }

    pub fn inverse(&self) -> Perm {
        Perm { map: self.map.iter().map(|(&a, &b)| (b, a)).collect() }
    }

    /// Disjoint cycles, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<Coord>> {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for &start in self.map.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            seen.push(start);
            let mut next = self.image(start);
            while next != start {
                cycle.push(next);
                seen.push(next);
                next = self.image(next);
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        for c in self.cycles() {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Integer shift, coordinate permutation and rational offsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Realizer<S> {
    shift: i64,
    perm: Perm,
    // keyed by output coordinate, zeros omitted
    offsets: BTreeMap<Coord, S>,
}

impl<S: Scalar> Default for Realizer<S> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<S: Scalar> Realizer<S> {
    pub fn identity() -> Self {
        Realizer { shift: 0, perm: Perm::identity(), offsets: BTreeMap::new() }
    }

    pub fn new(shift: i64, perm: Perm, offsets: impl IntoIterator<Item = (Coord, S)>) -> Self {
        let offsets = offsets.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Realizer { shift, perm, offsets }
    }

    /// Translation `τ_k` of the integer cell.
    pub fn shift(k: i64) -> Self {
        Realizer { shift: k, ..Self::identity() }
    }

    /// The head swap `s_j`, i.e. the transposition of coordinates 1 and `j`.
    pub fn head_swap(j: Coord) -> Self {
        Realizer { perm: Perm::transposition(1, j), ..Self::identity() }
    }

    pub fn offset(coord: Coord, c: S) -> Self {
        Self::new(0, Perm::identity(), [(coord, c)])
    }

    pub fn shift_by(&self) -> i64 {
        self.shift
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    pub fn offsets(&self) -> &BTreeMap<Coord, S> {
        &self.offsets
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.perm.is_identity() && self.offsets.is_empty()
    }

    /// The map "first `self`, then `then`".
    pub fn then(&self, then: &Realizer<S>) -> Realizer<S> {
        let perm = self.perm.then(&then.perm);
        let mut offsets: BTreeMap<Coord, S> = then.offsets.clone();
        for (&j, c) in &self.offsets {
            let entry = offsets.entry(then.perm.image(j)).or_insert_with(S::zero);
            *entry = entry.clone() + c.clone();
        }
        Realizer::new(self.shift + then.shift, perm, offsets)
    }

    pub fn inverse(&self) -> Realizer<S> {
        let perm = self.perm.inverse();
        // x_i = y_{π(i)} - c_{π(i)}: output coordinate i of the inverse gets -c_{π(i)}
        let offsets = self.offsets.iter().map(|(&j, c)| (self.perm.preimage(j), -c.clone()));
        Realizer::new(-self.shift, perm, offsets)
    }

    /// Image of one box; errors if some coordinate would leave `[0,1)`.
    pub fn apply_box(&self, b: &RationalBox<S>, box_index: usize) -> Result<RationalBox<S>> {
        let mut coords: BTreeMap<Coord, Interval<S>> = BTreeMap::new();
        for (&i, iv) in b.coords() {
            coords.insert(self.perm.image(i), iv.clone());
        }
        for (&j, c) in &self.offsets {
            let iv = coords.get(&j).cloned().unwrap_or_else(Interval::unit);
            let moved = iv
                .translate(c)
                .ok_or(Error::DomainViolation { box_index, coord: self.perm.preimage(j) })?;
            coords.insert(j, moved);
        }
        Ok(RationalBox::from_parts(b.cell() + self.shift, coords))
    }

    pub fn apply(&self, s: &MeasurableSet<S>) -> Result<MeasurableSet<S>> {
        let boxes = s
            .boxes()
            .iter()
            .enumerate()
            .map(|(i, b)| self.apply_box(b, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasurableSet::from_boxes(boxes))
    }

    pub fn apply_point(&self, p: &Point<S>) -> Option<Point<S>> {
        let mut coords: BTreeMap<Coord, S> =
            p.coords().iter().map(|(&i, x)| (self.perm.image(i), x.clone())).collect();
        for (&j, c) in &self.offsets {
            let x = coords.get(&j).cloned().unwrap_or_else(S::zero) + c.clone();
            if x < S::zero() || x >= S::one() {
                return None;
            }
            coords.insert(j, x);
        }
        Some(Point::new(p.cell + self.shift, coords))
    }

    /// Input-coordinate constraints under which the offsets stay in range;
    /// `None` when some offset has magnitude at least 1.
    fn domain_box(&self) -> Option<BTreeMap<Coord, Interval<S>>> {
        let mut out = BTreeMap::new();
        for (&j, c) in &self.offsets {
            let lo = (-c.clone()).max(S::zero());
            let hi = (S::one() - c.clone()).min(S::one());
            if lo >= hi {
                return None;
            }
            out.insert(self.perm.preimage(j), Interval::new(lo, hi).expect("checked bounds"));
        }
        Some(out)
    }

    /// Largest subset of `within` on which the map is defined.
    pub fn domain_of(&self, within: &MeasurableSet<S>) -> MeasurableSet<S> {
        let Some(constraint) = self.domain_box() else {
            return MeasurableSet::empty();
        };
        if constraint.is_empty() {
            return within.clone();
        }
        let boxes = within.boxes().iter().filter_map(|b| {
            let dom = RationalBox::new(b.cell(), constraint.clone());
            b.intersect(&dom)
        });
        MeasurableSet::from_boxes(boxes)
    }

    /// `shift=k; perm=(a b); offsets=j:p/q,...`
    pub fn to_text(&self) -> String {
        let offs: Vec<String> = self.offsets.iter().map(|(j, c)| format!("{j}:{}", c.to_pq())).collect();
        format!("shift={}; perm={}; offsets={}", self.shift, self.perm, offs.join(","))
    }

    pub fn parse_text(text: &str) -> Option<Self> {
        let mut shift = 0;
        let mut perm = Perm::identity();
        let mut offsets = Vec::new();
        for field in text.split(';') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let (key, value) = field.split_once('=')?;
            let value = value.trim();
            match key.trim() {
                "shift" => shift = value.parse().ok()?,
                "perm" => {
                    for cycle in value.split(')') {
                        let cycle = cycle.trim().trim_start_matches('(');
                        let elems: Vec<Coord> =
                            cycle.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().ok()?;
                        if elems.len() < 2 {
                            continue;
                        }
                        let mut images = BTreeMap::new();
                        for (k, &e) in elems.iter().enumerate() {
                            images.insert(e, elems[(k + 1) % elems.len()]);
                        }
                        perm = perm.then(&Perm::from_images(images));
                    }
                }
                "offsets" => {
                    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let (j, c) = item.split_once(':')?;
                        offsets.push((j.trim().parse().ok()?, S::parse_pq(c)?));
                    }
                }
                _ => return None,
            }
        }
        Some(Realizer::new(shift, perm, offsets))
    }
}

impl<S: Scalar> fmt::Display for Realizer<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Composite of a word over `generators`, read left to right.
pub fn compose_word<S: Scalar>(generators: &[Realizer<S>], word: &[usize]) -> Realizer<S> {
    word.iter().fold(Realizer::identity(), |acc, &g| acc.then(&generators[g]))
}

/// A set of realizers closed under composition and containing the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Microcosm<S> {
    /// Translations of the integer cell.
    M1,
    /// Translations plus the head swaps `s_2 .. s_i`.
    Mi(u32),
    /// Union of all `Mi`.
    MInfinity,
    /// Every realizer.
    Macrocosm,
    /// Monoid generated by an explicit list.
    FinitelyGenerated(Vec<Realizer<S>>),
}

/// Outcome of a membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// A member; for finitely generated microcosms, the certifying word.
    Member(Option<Vec<usize>>),
    NotMember,
    /// No word up to the bound produced the realizer.
    NotFoundWithin(usize),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

impl<S: Scalar> Microcosm<S> {
    /// `m_i`, normalising `Mi(1)` to `M1`.
    pub fn m(i: u32) -> Self {
        if i <= 1 {
            Microcosm::M1
        } else {
            Microcosm::Mi(i)
        }
    }

    pub fn name(&self) -> String {
        match self {
            Microcosm::M1 => "m1".into(),
            Microcosm::Mi(i) => format!("m{i}"),
            Microcosm::MInfinity => "m_inf".into(),
            Microcosm::Macrocosm => "macrocosm".into(),
            Microcosm::FinitelyGenerated(g) => format!("fg[{}]", g.len()),
        }
    }

    /// Monoid generators of `m_i` for finite `i`: `τ_1`, `τ_-1`, `s_2 .. s_i`.
    pub fn generators(&self) -> Option<Vec<Realizer<S>>> {
        let heads = match self {
            Microcosm::M1 => 1,
            Microcosm::Mi(i) => *i,
            Microcosm::FinitelyGenerated(g) => return Some(g.clone()),
            _ => return None,
        };
        let mut gens = vec![Realizer::shift(1), Realizer::shift(-1)];
        gens.extend((2..=heads).map(Realizer::head_swap));
        Some(gens)
    }

    /// Exact for the named microcosms; a bounded word search otherwise.
    pub fn contains(&self, r: &Realizer<S>, bound: usize) -> Membership {
        let yes = |b: bool| if b { Membership::Member(None) } else { Membership::NotMember };
        match self {
            Microcosm::M1 => yes(r.offsets.is_empty() && r.perm.is_identity()),
            Microcosm::Mi(i) => yes(r.offsets.is_empty() && r.perm.max_moved() <= *i),
            Microcosm::MInfinity => yes(r.offsets.is_empty()),
            Microcosm::Macrocosm => Membership::Member(None),
            Microcosm::FinitelyGenerated(gens) => match find_word(gens, r, bound) {
                Some(w) => Membership::Member(Some(w)),
                None => Membership::NotFoundWithin(bound),
            },
        }
    }

    /// Smallest microcosm of this family containing both.
    pub fn join(&self, other: &Self) -> Self {
        use Microcosm::*;
        let rank = |m: &Self| match m {
            M1 => Some(1),
            Mi(i) => Some(*i),
            _ => None,
        };
        match (self, other) {
            (Macrocosm, _) | (_, Macrocosm) => Macrocosm,
            (a, b) if a == b => a.clone(),
            (FinitelyGenerated(a), FinitelyGenerated(b)) => {
                let mut g = a.clone();
                g.extend(b.iter().filter(|r| !a.contains(r)).cloned());
                FinitelyGenerated(g)
            }
            (FinitelyGenerated(_), MInfinity) | (MInfinity, FinitelyGenerated(_)) => Macrocosm,
            (FinitelyGenerated(a), m) | (m, FinitelyGenerated(a)) => {
                let mut g = a.clone();
                g.extend(m.generators().expect("finite m_i").into_iter().filter(|r| !a.contains(r)));
                FinitelyGenerated(g)
            }
            (MInfinity, _) | (_, MInfinity) => MInfinity,
            (a, b) => Microcosm::m(rank(a).expect("m_i").max(rank(b).expect("m_i"))),
        }
    }
}

/// Shortest positive word over `generators` composing to `target`, searched
/// breadth-first over distinct composites up to length `bound`.
pub fn find_word<S: Scalar>(generators: &[Realizer<S>], target: &Realizer<S>, bound: usize) -> Option<Vec<usize>> {
    let mut seen: HashMap<Realizer<S>, Vec<usize>> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(Realizer::identity(), Vec::new());
    queue.push_back(Realizer::identity());
    while let Some(r) = queue.pop_front() {
        let word = seen[&r].clone();
        if &r == target {
            return Some(word);
        }
        if word.len() == bound {
            continue;
        }
        for (g, gen) in generators.iter().enumerate() {
            let next = r.then(gen);
            if !seen.contains_key(&next) {
                let mut w = word.clone();
                w.push(g);
                seen.insert(next.clone(), w);
                queue.push_back(next);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::Ratio;
    use proptest::prelude::*;

    type Q = Ratio<BigInt>;
    type R = Realizer<Q>;
    type Set = MeasurableSet<Q>;

    fn q(a: i64, b: i64) -> Q {
        Q::frac(a, b)
    }

    fn set(cell: i64, coords: &[(Coord, (i64, i64, i64))]) -> Set {
        Set::from_box(RationalBox::new(cell, coords.iter().map(|&(c, (a, b, d))| (c, Interval::frac(a, b, d)))))
    }

    #[test]
    fn apply_examples() {
        let s = set(3, &[(1, (0, 1, 2))]);
        assert_eq!(R::identity().apply(&s).unwrap(), s);
        assert_eq!(R::shift(2).apply(&s).unwrap(), set(5, &[(1, (0, 1, 2))]));
        let sq = set(0, &[(1, (0, 1, 2)), (2, (1, 2, 2))]);
        assert_eq!(R::head_swap(2).apply(&sq).unwrap(), set(0, &[(1, (1, 2, 2)), (2, (0, 1, 2))]));
    }

    #[test]
    fn apply_reports_domain_violation() {
        let r = R::offset(1, q(1, 2));
        let s = set(0, &[(2, (0, 1, 2))]);
        assert_eq!(r.apply(&s), Err(Error::DomainViolation { box_index: 0, coord: 1 }));
    }

    #[test]
    fn compose_examples() {
        let r = R::new(4, Perm::transposition(2, 5), [(1, q(1, 3))]);
        assert_eq!(r.then(&R::identity()), r);
        assert!(R::shift(1).then(&R::shift(-1)).is_identity());
        assert!(R::head_swap(2).then(&R::head_swap(2)).is_identity());
    }

    #[test]
    fn invert_examples() {
        assert!(R::identity().inverse().is_identity());
        assert_eq!(R::shift(3).inverse(), R::shift(-3));
        assert_eq!(R::offset(1, q(1, 3)).inverse(), R::offset(1, q(-1, 3)));
    }

    #[test]
    fn domain_examples() {
        let within = Set::unit_cell(0);
        assert_eq!(R::identity().domain_of(&within), within);
        assert_eq!(R::offset(1, q(1, 2)).domain_of(&within), set(0, &[(1, (0, 1, 2))]));
        assert!(R::offset(1, q(1, 1)).domain_of(&within).is_empty());
        // an offset on output coordinate 2 fed by input coordinate 1 constrains input 1
        let r = R::new(0, Perm::transposition(1, 2), [(2, q(1, 4))]);
        assert_eq!(r.domain_of(&within), set(0, &[(1, (0, 3, 4))]));
    }

    #[test]
    fn membership_examples() {
        assert!(Microcosm::<Q>::M1.contains(&R::shift(5), 0).is_member());
        assert_eq!(Microcosm::<Q>::Mi(2).contains(&R::head_swap(3), 0), Membership::NotMember);
        let word_edge = R::new(1, Perm::identity(), [(1, q(1, 3))]);
        for i in 1..6 {
            assert!(!Microcosm::m(i).contains(&word_edge, 0).is_member());
        }
        assert!(!Microcosm::MInfinity.contains(&word_edge, 0).is_member());
        assert!(Microcosm::Macrocosm.contains(&word_edge, 0).is_member());
        assert!(!Microcosm::<Q>::M1.contains(&R::head_swap(2), 0).is_member());
    }

    #[test]
    fn finitely_generated_search() {
        let fg = Microcosm::FinitelyGenerated(vec![R::shift(1), R::shift(-1)]);
        assert_eq!(fg.contains(&R::shift(-3), 5), Membership::Member(Some(vec![1, 1, 1])));
        assert_eq!(fg.contains(&R::shift(4), 3), Membership::NotFoundWithin(3));
        assert_eq!(fg.contains(&R::identity(), 0), Membership::Member(Some(vec![])));
    }

    #[test]
    fn join_of_microcosms() {
        assert_eq!(Microcosm::<Q>::M1.join(&Microcosm::Mi(3)), Microcosm::Mi(3));
        assert_eq!(Microcosm::<Q>::Mi(2).join(&Microcosm::Macrocosm), Microcosm::Macrocosm);
        let fg = Microcosm::FinitelyGenerated(vec![R::shift(2)]);
        match fg.join(&Microcosm::M1) {
            Microcosm::FinitelyGenerated(g) => assert_eq!(g.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn text_round_trip() {
        let r = R::new(-2, Perm::transposition(1, 3).then(&Perm::transposition(2, 4)), [(1, q(1, 3)), (4, q(-1, 2))]);
        assert_eq!(r.to_text(), "shift=-2; perm=(1 3)(2 4); offsets=1:1/3,4:-1/2");
        assert_eq!(R::parse_text(&r.to_text()), Some(r));
        assert_eq!(R::parse_text("shift=0; perm=(); offsets="), Some(R::identity()));
        let three = Perm::from_images([(1, 2), (2, 3), (3, 1)]);
        let r3 = R::new(0, three, Vec::<(Coord, Q)>::new());
        assert_eq!(R::parse_text(&r3.to_text()), Some(r3));
    }

    fn arb_perm(n: Coord) -> impl Strategy<Value = Perm> {
        Just((1..=n).collect::<Vec<Coord>>()).prop_shuffle().prop_map(|v| {
            Perm::from_images(v.into_iter().enumerate().map(|(i, x)| (i as Coord + 1, x)))
        })
    }

    fn arb_realizer() -> impl Strategy<Value = R> {
        let offset = (1u32..4, -3i64..4).prop_map(|(c, k)| (c, q(k, 4)));
        (-3i64..4, arb_perm(3), proptest::collection::vec(offset, 0..2))
            .prop_map(|(k, p, offs)| R::new(k, p, offs))
    }

    fn arb_mi_member(i: Coord) -> impl Strategy<Value = R> {
        (-4i64..5, arb_perm(i)).prop_map(|(k, p)| R::new(k, p, Vec::<(Coord, Q)>::new()))
    }

    fn arb_small_set() -> impl Strategy<Value = Set> {
        let b = (0i64..2, 0i64..4, 1i64..5, 0i64..4, 1i64..5).prop_filter_map("valid", |(cell, a, la, c, lc)| {
            (a + la <= 4 && c + lc <= 4).then(|| {
                RationalBox::unit(cell).with(1, Interval::frac(a, a + la, 4)).with(3, Interval::frac(c, c + lc, 4))
            })
        });
        proptest::collection::vec(b, 0..3).prop_map(Set::from_boxes)
    }

    proptest! {
        #[test]
        fn measure_preserved(r in arb_realizer(), s in arb_small_set()) {
            let dom = r.domain_of(&s);
            let img = r.apply(&dom).unwrap();
            prop_assert_eq!(img.measure(), dom.measure());
        }

        #[test]
        fn composition_matches_sequential_application(a in arb_realizer(), b in arb_realizer(), s in arb_small_set()) {
            let d = a.domain_of(&s);
            let mid = a.apply(&d).unwrap();
            let d2 = b.domain_of(&mid);
            let sequential = b.apply(&d2).unwrap();
            let back = a.inverse().apply(&d2).unwrap();
            let composite = a.then(&b).apply(&back).unwrap();
            prop_assert_eq!(composite, sequential);
        }

        #[test]
        fn inverse_undoes(r in arb_realizer(), s in arb_small_set()) {
            let d = r.domain_of(&s);
            let there = r.apply(&d).unwrap();
            prop_assert_eq!(r.inverse().apply(&there).unwrap(), d);
        }

        #[test]
        fn point_action_agrees_with_box_action(r in arb_realizer(), x1 in 0i64..8, x3 in 0i64..8) {
            let p = Point::new(0, [(1, q(x1, 8)), (3, q(x3, 8))]);
            let tiny = Set::from_box(RationalBox::unit(0).with(1, Interval::frac(x1, x1 + 1, 8)).with(2, Interval::frac(0, 1, 8)).with(3, Interval::frac(x3, x3 + 1, 8)));
            let dom = r.domain_of(&tiny);
            match r.apply_point(&p) {
                Some(img) => prop_assert!(r.apply(&dom).unwrap().contains_point(&img)),
                None => prop_assert!(!dom.contains_point(&p)),
            }
        }

        #[test]
        fn mi_is_a_group(a in arb_mi_member(3), b in arb_mi_member(3), c in arb_mi_member(3)) {
            let m = Microcosm::<Q>::Mi(3);
            prop_assert!(m.contains(&a.then(&b), 0).is_member());
            prop_assert!(m.contains(&a.inverse(), 0).is_member());
            prop_assert!(a.then(&a.inverse()).is_identity());
            prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
            prop_assert_eq!(a.then(&R::identity()), a);
        }
    }
}
