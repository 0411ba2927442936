//! From words and multihead automata to graphings.
//!
//! Every symbol `s` of `Σ ∪ {⋆}` owns two unit cells per state row, `s·In`
//! and `s·Out`; each row also has `accept` and `reject` cells and, for
//! machines with more than one head, two probe cells. Coordinate 1 carries
//! the address of the active head, coordinates `2..=i` the parked heads.
//!
//! A word `w` of length `n` slices coordinate 1 into `n + 1` equal pieces,
//! one per position of the cyclic word `⋆w`. Its graphing links `s_p·Out` at
//! slice `p` to `s_{p+1}·In` at slice `p+1` (and back, for two-way words).
//! A token sitting in `s·In` of row `q` at slice `p` means: the active head
//! reads `s` at position `p` and the control is in state `q`. A token in
//! `s·Out` arrived there by moving backwards.
//!
//! A head swap leaves the machine not knowing what the new active head
//! reads, so swapping moves go through a probe cell: the word answers a
//! token in the advance probe at slice `p` by sending it to `s_{p+1}·In` at
//! slice `p+1`, and one in the retreat probe to `s_{p-1}·Out` at slice `p-1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::execution::{evaluate_test, plug_from, Budget, Execution, Outcome, Regions, Test, Verdict};
use crate::graphing::{Edge, Graphing, Weight, WeightMonoid};
use crate::realizers::{Microcosm, Realizer};
use crate::scalar::Scalar;
use crate::space::{Coord, Interval, MeasurableSet, RationalBox};

/// The end marker `⋆`, written `*` in machine files.
pub const STAR: char = '*';

/// A named region of one state row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    /// `s·In` for symbol index `s` (0 is `⋆`).
    In(usize),
    Out(usize),
    ProbeAdvance,
    ProbeRetreat,
    Accept,
    Reject,
}

/// Assignment of integer cells to ports and rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeLayout {
    alphabet: Vec<char>,
    heads: u32,
    row_stride: i64,
}

impl TapeLayout {
    pub fn new(alphabet: &[char], heads: u32) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &c in alphabet {
            if c == STAR || c == '⋆' || c.is_whitespace() || c == ',' || !seen.insert(c) {
                return Err(Error::InvalidMachine(format!("bad alphabet symbol {c:?}")));
            }
        }
        if heads == 0 {
            return Err(Error::InvalidMachine("need at least one head".into()));
        }
        let row_stride = 2 * (alphabet.len() as i64 + 1) + 4;
        Ok(TapeLayout { alphabet: alphabet.to_vec(), heads, row_stride })
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn heads(&self) -> u32 {
        self.heads
    }

    pub fn row_stride(&self) -> i64 {
        self.row_stride
    }

    /// Number of symbols including `⋆`.
    pub fn symbols(&self) -> usize {
        self.alphabet.len() + 1
    }

    /// Symbol index of `c` (`⋆` is 0).
    pub fn symbol(&self, c: char) -> Result<usize> {
        if c == STAR || c == '⋆' {
            return Ok(0);
        }
        self.alphabet.iter().position(|&a| a == c).map(|i| i + 1).ok_or(Error::UnknownSymbol(c))
    }

    pub fn symbol_char(&self, s: usize) -> char {
        if s == 0 {
            STAR
        } else {
            self.alphabet[s - 1]
        }
    }

    fn port_offset(&self, port: Port) -> i64 {
        let k = self.symbols() as i64;
        match port {
            Port::In(s) => 2 * s as i64,
            Port::Out(s) => 2 * s as i64 + 1,
            Port::ProbeAdvance => 2 * k,
            Port::ProbeRetreat => 2 * k + 1,
            Port::Accept => 2 * k + 2,
            Port::Reject => 2 * k + 3,
        }
    }

    pub fn cell(&self, port: Port, row: usize) -> i64 {
        row as i64 * self.row_stride + self.port_offset(port)
    }

    /// Inverse of [`TapeLayout::cell`] on nonnegative cells.
    pub fn port_of(&self, cell: i64) -> Option<(Port, usize)> {
        if cell < 0 {
            return None;
        }
        let row = (cell / self.row_stride) as usize;
        let off = cell % self.row_stride;
        let k = self.symbols() as i64;
        let port = match off {
            o if o < 2 * k && o % 2 == 0 => Port::In((o / 2) as usize),
            o if o < 2 * k => Port::Out((o / 2) as usize),
            o if o == 2 * k => Port::ProbeAdvance,
            o if o == 2 * k + 1 => Port::ProbeRetreat,
            o if o == 2 * k + 2 => Port::Accept,
            _ => Port::Reject,
        };
        Some((port, row))
    }

    /// Figure-style label such as `0i`, `⋆o`, `accept`, suffixed by the row name.
    pub fn cell_name(&self, cell: i64, rows: &[String]) -> String {
        let Some((port, row)) = self.port_of(cell) else {
            return format!("cell{cell}");
        };
        let sym = |s: usize| if s == 0 { '⋆' } else { self.symbol_char(s) };
        let base = match port {
            Port::In(s) => format!("{}i", sym(s)),
            Port::Out(s) => format!("{}o", sym(s)),
            Port::ProbeAdvance => "probe+".into(),
            Port::ProbeRetreat => "probe-".into(),
            Port::Accept => "accept".into(),
            Port::Reject => "reject".into(),
        };
        match rows.get(row) {
            Some(name) => format!("{base}@{name}"),
            None => format!("{base}@r{row}"),
        }
    }

    fn uses_probes(&self) -> bool {
        self.heads >= 2
    }

    fn row_ports(&self) -> Vec<Port> {
        let mut ports: Vec<Port> = (0..self.symbols()).flat_map(|s| [Port::In(s), Port::Out(s)]).collect();
        if self.uses_probes() {
            ports.extend([Port::ProbeAdvance, Port::ProbeRetreat]);
        }
        ports
    }

    /// Accept region the token starts from: every head address in slice 0.
    pub fn start_region<S: Scalar>(&self, word_len: usize) -> MeasurableSet<S> {
        let slices = word_len as i64 + 1;
        let mut b = RationalBox::unit(self.cell(Port::Accept, 0));
        for c in 1..=self.heads {
            b = b.with(c, Interval::frac(0, 1, slices));
        }
        MeasurableSet::from_box(b)
    }

    pub fn regions<S: Scalar>(&self, word_len: usize) -> Regions<S> {
        Regions {
            start: self.start_region(word_len),
            accept: MeasurableSet::unit_cell(self.cell(Port::Accept, 0)),
            reject: MeasurableSet::unit_cell(self.cell(Port::Reject, 0)),
        }
    }
}

// ---------------------------------------------------------------------------
// machine specifications

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Det,
    NonDet,
    Prob,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Det => "det",
            Mode::NonDet => "nondet",
            Mode::Prob => "prob",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Advance,
    Retreat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionKind {
    /// Optionally swap heads, move the (new) active head, change state.
    Move { dir: Move, next: usize },
    Accept,
    Reject,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action<S> {
    pub weight: S,
    pub kind: ActionKind,
    /// Swap the active head with head `j` before moving.
    pub swap: Option<u32>,
}

/// A multihead automaton over the cyclic word `⋆w`.
///
/// Runs start with every head on `⋆` and the first head advancing once.
/// A `(state, symbol)` pair with no action halts without accepting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineSpec<S> {
    pub name: String,
    pub alphabet: Vec<char>,
    pub heads: u32,
    /// The first state is initial.
    pub states: Vec<String>,
    pub mode: Mode,
    pub two_way: bool,
    /// Keyed by `(state index, symbol index)`.
    pub transitions: BTreeMap<(usize, usize), Vec<Action<S>>>,
}

impl<S: Scalar> MachineSpec<S> {
    pub fn layout(&self) -> Result<TapeLayout> {
        TapeLayout::new(&self.alphabet, self.heads)
    }

    pub fn actions(&self, state: usize, symbol: usize) -> &[Action<S>] {
        self.transitions.get(&(state, symbol)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMachine(format!("{}: {m}", self.name)));
        self.layout()?;
        if self.states.is_empty() {
            return bad("no states".into());
        }
        for (&(q, s), actions) in &self.transitions {
            if q >= self.states.len() || s > self.alphabet.len() {
                return bad(format!("transition key ({q}, {s}) out of range"));
            }
            let here = format!("{}, {}", self.states[q], if s == 0 { STAR } else { self.alphabet[s - 1] });
            if self.mode == Mode::Det && actions.len() > 1 {
                return bad(format!("{here}: deterministic machines allow one action"));
            }
            let mut total = S::zero();
            for a in actions {
                if a.weight < S::zero() || a.weight > S::one() {
                    return bad(format!("{here}: weight outside [0,1]"));
                }
                if self.mode != Mode::Prob && !a.weight.is_one() {
                    return bad(format!("{here}: weights must be 1 unless mode is prob"));
                }
                total = total + a.weight.clone();
                if let ActionKind::Move { dir, next } = a.kind {
                    if dir == Move::Retreat && !self.two_way {
                        return bad(format!("{here}: retreat needs twoway"));
                    }
                    if next >= self.states.len() {
                        return bad(format!("{here}: unknown next state"));
                    }
                }
                if let Some(j) = a.swap {
                    if j < 2 || j > self.heads {
                        return bad(format!("{here}: swap {j} outside 2..={}", self.heads));
                    }
                }
            }
            if self.mode == Mode::Prob && total > S::one() {
                return bad(format!("{here}: weights sum above 1"));
            }
        }
        Ok(())
    }

    /// Parse the line-oriented machine format; see the crate README.
    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line: usize, m: &str| Error::Parse { line, message: m.to_string() };
        let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut rules: Vec<(usize, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.contains("->") {
                rules.push((line_no, line.to_string()));
            } else if let Some((k, v)) = line.split_once(':') {
                let key = k.trim().to_lowercase();
                if !["name", "alphabet", "heads", "states", "mode", "twoway"].contains(&key.as_str()) {
                    return Err(perr(line_no, &format!("unknown header {key:?}")));
                }
                if header.insert(key.clone(), (line_no, v.trim().to_string())).is_some() {
                    return Err(perr(line_no, &format!("duplicate header {key:?}")));
                }
            } else {
                return Err(perr(line_no, "expected `key: value` or a transition `state, symbol -> action`"));
            }
        }
        let get = |k: &str| header.get(k).cloned().ok_or_else(|| perr(0, &format!("missing header `{k}:`")));
        let split = |v: &str| v.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(String::from).collect::<Vec<_>>();

        let name = header.get("name").map(|(_, v)| v.clone()).unwrap_or_else(|| "machine".into());
        let (al, alphabet_text) = get("alphabet")?;
        let mut alphabet = Vec::new();
        for tok in split(&alphabet_text) {
            let mut chars = tok.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => alphabet.push(c),
                _ => return Err(perr(al, &format!("alphabet symbols are single characters, got {tok:?}"))),
            }
        }
        let (hl, heads_text) = get("heads")?;
        let heads: u32 = heads_text.parse().map_err(|_| perr(hl, "heads must be a positive integer"))?;
        let (sl, states_text) = get("states")?;
        let states = split(&states_text);
        if states.is_empty() {
            return Err(perr(sl, "at least one state"));
        }
        let (ml, mode_text) = get("mode")?;
        let mode = match mode_text.as_str() {
            "det" => Mode::Det,
            "nondet" => Mode::NonDet,
            "prob" => Mode::Prob,
            _ => return Err(perr(ml, "mode is det, nondet or prob")),
        };
        let (tl, tw) = get("twoway")?;
        let two_way = match tw.as_str() {
            "true" | "yes" => true,
            "false" | "no" => false,
            _ => return Err(perr(tl, "twoway is true or false")),
        };
        let layout = TapeLayout::new(&alphabet, heads).map_err(|e| perr(al, &e.to_string()))?;

        let mut transitions: BTreeMap<(usize, usize), Vec<Action<S>>> = BTreeMap::new();
        for (line_no, line) in rules {
            let (lhs, rhs) = line.split_once("->").expect("contains arrow");
            let (st, sym) = lhs.split_once(',').ok_or_else(|| perr(line_no, "left side is `state, symbol`"))?;
            let q = states
                .iter()
                .position(|s| s == st.trim())
                .ok_or_else(|| perr(line_no, &format!("unknown state {:?}", st.trim())))?;
            let sym = sym.trim();
            let mut chars = sym.chars();
            let s = match (chars.next(), chars.next()) {
                (Some(c), None) => layout.symbol(c).map_err(|e| perr(line_no, &e.to_string()))?,
                _ => return Err(perr(line_no, &format!("symbol must be one character, got {sym:?}"))),
            };
            let toks: Vec<&str> = rhs.split_whitespace().collect();
            let mut k = 0;
            let mut weight = S::one();
            if let Some(w) = toks.first().and_then(|t| S::parse_pq(t)) {
                weight = w;
                k = 1;
            }
            let verb = *toks.get(k).ok_or_else(|| perr(line_no, "missing action"))?;
            k += 1;
            let mut swap = None;
            let mut next = q;
            let mut saw_goto = false;
            while k < toks.len() {
                match toks[k] {
                    "swap" => {
                        let j = toks.get(k + 1).and_then(|t| t.parse().ok()).ok_or_else(|| perr(line_no, "swap needs a head number"))?;
                        swap = Some(j);
                        k += 2;
                    }
                    "goto" => {
                        let name = toks.get(k + 1).ok_or_else(|| perr(line_no, "goto needs a state"))?;
                        next = states.iter().position(|s| s == name).ok_or_else(|| perr(line_no, &format!("unknown state {name:?}")))?;
                        saw_goto = true;
                        k += 2;
                    }
                    other => return Err(perr(line_no, &format!("unexpected token {other:?}"))),
                }
            }
            let kind = match verb {
                "advance" => ActionKind::Move { dir: Move::Advance, next },
                "retreat" => ActionKind::Move { dir: Move::Retreat, next },
                "accept" | "reject" if saw_goto => return Err(perr(line_no, "terminal actions take no goto")),
                "accept" => ActionKind::Accept,
                "reject" => ActionKind::Reject,
                other => return Err(perr(line_no, &format!("unknown action {other:?}"))),
            };
            transitions.entry((q, s)).or_default().push(Action { weight, kind, swap });
        }
        let spec = MachineSpec { name, alphabet, heads, states, mode, two_way, transitions };
        spec.check().map_err(|e| perr(0, &e.to_string()))?;
        Ok(spec)
    }

    /// Text in the format accepted by [`MachineSpec::parse`].
    pub fn to_text(&self) -> String {
        let alphabet: Vec<String> = self.alphabet.iter().map(|c| c.to_string()).collect();
        let mut out = format!(
            "name: {}\nalphabet: {}\nheads: {}\nstates: {}\nmode: {}\ntwoway: {}\n",
            self.name,
            alphabet.join(" "),
            self.heads,
            self.states.join(" "),
            self.mode,
            self.two_way
        );
        for (&(q, s), actions) in &self.transitions {
            for a in actions {
                let sym = if s == 0 { STAR } else { self.alphabet[s - 1] };
                let mut rhs = String::new();
                if !a.weight.is_one() {
                    rhs.push_str(&format!("{} ", a.weight.to_pq()));
                }
                rhs.push_str(match a.kind {
                    ActionKind::Move { dir: Move::Advance, .. } => "advance",
                    ActionKind::Move { dir: Move::Retreat, .. } => "retreat",
                    ActionKind::Accept => "accept",
                    ActionKind::Reject => "reject",
                });
                if let Some(j) = a.swap {
                    rhs.push_str(&format!(" swap {j}"));
                }
                if let ActionKind::Move { next, .. } = a.kind {
                    if next != q {
                        rhs.push_str(&format!(" goto {}", self.states[next]));
                    }
                }
                out.push_str(&format!("{}, {} -> {}\n", self.states[q], sym, rhs));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// encoders

/// A word's graphing together with the regions tests look at.
#[derive(Clone, Debug)]
pub struct WordEncoding<S> {
    pub word: String,
    pub rows: usize,
    pub one_way: bool,
    pub graphing: Graphing<S>,
    pub regions: Regions<S>,
}

fn slice<S: Scalar>(cell: i64, p: usize, slices: usize) -> MeasurableSet<S> {
    MeasurableSet::from_box(RationalBox::unit(cell).with(1, Interval::frac(p as i64, p as i64 + 1, slices as i64)))
}

fn slice_move<S: Scalar>(from_cell: i64, from: usize, to_cell: i64, to: usize, slices: usize) -> Realizer<S> {
    let offset = S::frac(to as i64 - from as i64, slices as i64);
    Realizer::new(to_cell - from_cell, Default::default(), [(1 as Coord, offset)])
}

/// Graphing of the cyclic word `⋆w`, copied on `rows` state rows.
pub fn encode_word<S: Scalar>(word: &str, layout: &TapeLayout, rows: usize, one_way: bool) -> Result<WordEncoding<S>> {
    if rows == 0 {
        return Err(Error::Precondition("need at least one state row".into()));
    }
    let mut symbols = vec![0usize];
    for c in word.chars() {
        let s = layout.symbol(c)?;
        if s == 0 {
            return Err(Error::UnknownSymbol(c));
        }
        symbols.push(s);
    }
    let slices = symbols.len();
    let next = |p: usize| (p + 1) % slices;
    let prev = |p: usize| (p + slices - 1) % slices;

    let mut carrier_cells = Vec::new();
    for r in 0..rows {
        carrier_cells.extend(layout.row_ports().into_iter().map(|port| layout.cell(port, r)));
    }
    let mut g = Graphing::new(WeightMonoid::Trivial, Microcosm::Macrocosm, MeasurableSet::unit_cells(carrier_cells));

    for r in 0..rows {
        let mut forward = Vec::new();
        for p in 0..slices {
            let from = layout.cell(Port::Out(symbols[p]), r);
            let to = layout.cell(Port::In(symbols[next(p)]), r);
            forward.push(Edge::unit(slice(from, p, slices), slice_move(from, p, to, next(p), slices)));
        }
        let backward: Vec<Edge<S>> = if one_way {
            Vec::new()
        } else {
            forward
                .iter()
                .map(|e| Edge::unit(e.target().expect("in range"), e.realizer.inverse()))
                .collect()
        };
        g.edges.extend(forward);
        g.edges.extend(backward);
        if layout.uses_probes() {
            let probe = layout.cell(Port::ProbeAdvance, r);
            for p in 0..slices {
                let to = layout.cell(Port::In(symbols[next(p)]), r);
                g.push(Edge::unit(slice(probe, p, slices), slice_move(probe, p, to, next(p), slices)));
            }
            if !one_way {
                let probe = layout.cell(Port::ProbeRetreat, r);
                for p in 0..slices {
                    let to = layout.cell(Port::Out(symbols[prev(p)]), r);
                    g.push(Edge::unit(slice(probe, p, slices), slice_move(probe, p, to, prev(p), slices)));
                }
            }
        }
    }
    Ok(WordEncoding { word: word.to_string(), rows, one_way, graphing: g, regions: layout.regions(slices - 1) })
}

/// Graphing of a machine, declared in `m_heads`.
pub fn encode_machine<S: Scalar>(spec: &MachineSpec<S>, layout: &TapeLayout) -> Result<Graphing<S>> {
    spec.check()?;
    let rows = spec.states.len();
    let mut carrier_cells = Vec::new();
    for r in 0..rows {
        carrier_cells.extend(layout.row_ports().into_iter().map(|port| layout.cell(port, r)));
        carrier_cells.push(layout.cell(Port::Accept, r));
        carrier_cells.push(layout.cell(Port::Reject, r));
    }
    let weights = if spec.mode == Mode::Prob { WeightMonoid::Probabilities } else { WeightMonoid::Trivial };
    let mut g = Graphing::new(weights, Microcosm::m(spec.heads), MeasurableSet::unit_cells(carrier_cells));

    // "what is your first symbol?"
    let accept0 = layout.cell(Port::Accept, 0);
    let star_out = layout.cell(Port::Out(0), 0);
    g.push(Edge::unit(MeasurableSet::unit_cell(accept0), Realizer::shift(star_out - accept0)));

    for (&(q, s), actions) in &spec.transitions {
        let mut sources = vec![Port::In(s)];
        if spec.two_way {
            sources.push(Port::Out(s));
        }
        for src_port in sources {
            let src = layout.cell(src_port, q);
            for a in actions {
                let dst = match (a.kind, a.swap) {
                    (ActionKind::Accept, _) => layout.cell(Port::Accept, 0),
                    (ActionKind::Reject, _) => layout.cell(Port::Reject, 0),
                    (ActionKind::Move { dir: Move::Advance, next }, None) => layout.cell(Port::Out(s), next),
                    (ActionKind::Move { dir: Move::Retreat, next }, None) => layout.cell(Port::In(s), next),
                    (ActionKind::Move { dir: Move::Advance, next }, Some(_)) => layout.cell(Port::ProbeAdvance, next),
                    (ActionKind::Move { dir: Move::Retreat, next }, Some(_)) => layout.cell(Port::ProbeRetreat, next),
                };
                let mut realizer = Realizer::shift(dst - src);
                if let Some(j) = a.swap {
                    realizer = Realizer::head_swap(j).then(&realizer);
                }
                g.push(Edge::new(Weight::Scalar(a.weight.clone()), MeasurableSet::unit_cell(src), realizer));
            }
        }
    }
    Ok(g)
}

/// Boolean reading of a deterministic execution result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolResult {
    True,
    False,
    Other,
}

/// `True` when the whole start region is carried into accept and nothing
/// into reject; `False` for the mirror situation.
pub fn classify_result<S: Scalar>(exec: &Execution<S>, regions: &Regions<S>) -> Result<BoolResult> {
    let o = evaluate_test(exec, regions, &Test::Det)?;
    Ok(if o.accept_mass.is_one() && o.rejecting_edges.is_empty() {
        BoolResult::True
    } else if o.reject_mass.is_one() && o.accepting_edges.is_empty() {
        BoolResult::False
    } else {
        BoolResult::Other
    })
}

/// Plug a machine graphing against the encoding of `word` and apply `test`.
pub fn run_word<S: Scalar>(
    machine: &Graphing<S>,
    layout: &TapeLayout,
    rows: usize,
    word: &str,
    one_way: bool,
    test: &Test<S>,
    budget: Budget,
) -> Result<(WordEncoding<S>, Execution<S>, Outcome<S>)> {
    let enc = encode_word(word, layout, rows, one_way)?;
    let exec = plug_from(machine, &enc.graphing, None, Some(&enc.regions.start), budget)?;
    let outcome = evaluate_test(&exec, &enc.regions, test)?;
    Ok((enc, exec, outcome))
}

/// Words of length `0..=max_len` in length-then-lexicographic order
/// (lexicographic with respect to the alphabet order).
pub fn words_up_to(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for &c in alphabet {
                let mut x = w.clone();
                x.push(c);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Per-word verdicts of a program graphing.
#[derive(Clone, Debug)]
pub struct LanguageReport<S> {
    pub accepted: Vec<String>,
    pub undetermined: Vec<String>,
    pub outcomes: Vec<(String, Outcome<S>)>,
}

/// All words up to `max_len` accepted by `machine` under `test`.
#[allow(clippy::too_many_arguments)]
pub fn language<S: Scalar>(
    machine: &Graphing<S>,
    layout: &TapeLayout,
    test: &Test<S>,
    max_len: usize,
    one_way: bool,
    rows: usize,
    budget: Budget,
) -> Result<LanguageReport<S>> {
    let mut report = LanguageReport { accepted: Vec::new(), undetermined: Vec::new(), outcomes: Vec::new() };
    for w in words_up_to(layout.alphabet(), max_len) {
        let (_, _, outcome) = run_word(machine, layout, rows, &w, one_way, test, budget)?;
        match outcome.verdict {
            Verdict::Accept => report.accepted.push(w.clone()),
            Verdict::Undetermined => report.undetermined.push(w.clone()),
            Verdict::Reject => {}
        }
        report.outcomes.push((w, outcome));
    }
    Ok(report)
}

/// DOT rendering of a computation: both graphings over the shared cells,
/// permutation edges dashed and the edges of accepting paths in bold.
pub fn computation_dot<S: Scalar>(
    spec: &MachineSpec<S>,
    layout: &TapeLayout,
    machine: &Graphing<S>,
    word: &WordEncoding<S>,
    exec: &Execution<S>,
    outcome: &Outcome<S>,
) -> String {
    let mut bold: BTreeSet<(char, usize)> = BTreeSet::new();
    if outcome.verdict == Verdict::Accept {
        for &i in &outcome.accepting_edges {
            for st in &exec.paths[i].steps {
                let side = if st.side == crate::execution::Side::F { 'm' } else { 'w' };
                bold.insert((side, st.edge));
            }
        }
    }
    let mut out = format!("digraph \"{} on *{}\" {{\n  rankdir=LR;\n", spec.name, word.word);
    let cells: BTreeSet<i64> = machine.carrier.cells().union(&word.graphing.carrier.cells()).copied().collect();
    for c in &cells {
        out.push_str(&format!("  c{c} [label=\"{}\"];\n", layout.cell_name(*c, &spec.states)));
    }
    for (tag, g) in [('m', machine), ('w', &word.graphing)] {
        for (i, e) in g.edges.iter().enumerate() {
            let mut pairs = BTreeSet::new();
            for b in e.source.boxes() {
                pairs.insert((b.cell(), b.cell() + e.realizer.shift_by()));
            }
            for (from, to) in pairs {
                let mut attrs = vec![format!("label=\"{tag}{i}\"")];
                attrs.push(if tag == 'm' { "color=black".into() } else { "color=gray40".into() });
                if !e.realizer.perm().is_identity() {
                    attrs.push("style=dashed".into());
                }
                if bold.contains(&(tag, i)) {
                    attrs.push("penwidth=3".into());
                    attrs.push("bold=true".into());
                }
                out.push_str(&format!("  c{from} -> c{to} [{}];\n", attrs.join(", ")));
            }
        }
    }
    out.push_str("}\n");
    out
}
