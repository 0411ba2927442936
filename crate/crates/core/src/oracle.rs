//! Direct simulation of multihead automata, independent of graphings.
//!
//! Positions on the cyclic word `⋆w` run over `0..=n`, position 0 being `⋆`.
//! `pos[0]` is the active head. A swap with head `j` exchanges `pos[0]` and
//! `pos[j-1]` before the move.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::encodings::{words_up_to, ActionKind, MachineSpec, Move, TapeLayout};
use crate::error::{Error, Result};
use crate::execution::Test;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub state: usize,
    pub pos: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Next {
    Go(Config),
    Accept,
    Reject,
}

/// A word prepared for simulation.
#[derive(Clone, Debug)]
pub struct Tape {
    symbols: Vec<usize>,
}

impl Tape {
    pub fn new(layout: &TapeLayout, word: &str) -> Result<Self> {
        let mut symbols = vec![0];
        for c in word.chars() {
            match layout.symbol(c)? {
                0 => return Err(Error::UnknownSymbol(c)),
                s => symbols.push(s),
            }
        }
        Ok(Tape { symbols })
    }

    fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn initial(&self, heads: u32) -> Config {
        let mut pos = vec![0; heads as usize];
        pos[0] = 1 % self.len();
        Config { state: 0, pos }
    }

    /// Weighted successors; empty when the machine is stuck.
    pub fn successors<S: Scalar>(&self, spec: &MachineSpec<S>, c: &Config) -> Vec<(S, Next)> {
        let read = self.symbols[c.pos[0]];
        let n1 = self.len();
        spec.actions(c.state, read)
            .iter()
            .map(|a| {
                let next = match a.kind {
                    ActionKind::Accept => Next::Accept,
                    ActionKind::Reject => Next::Reject,
                    ActionKind::Move { dir, next } => {
                        let mut pos = c.pos.clone();
                        if let Some(j) = a.swap {
                            pos.swap(0, j as usize - 1);
                        }
                        pos[0] = match dir {
                            Move::Advance => (pos[0] + 1) % n1,
                            Move::Retreat => (pos[0] + n1 - 1) % n1,
                        };
                        Next::Go(Config { state: next, pos })
                    }
                };
                (a.weight.clone(), next)
            })
            .collect()
    }
}

fn tape_for<S: Scalar>(spec: &MachineSpec<S>, word: &str) -> Result<Tape> {
    spec.check()?;
    Tape::new(&spec.layout()?, word)
}

/// Deterministic run: accept iff the run reaches an accepting action.
/// Getting stuck, rejecting and revisiting a configuration all reject.
pub fn dfa_accepts<S: Scalar>(spec: &MachineSpec<S>, word: &str) -> Result<bool> {
    let tape = tape_for(spec, word)?;
    let mut seen = BTreeSet::new();
    let mut c = tape.initial(spec.heads);
    loop {
        if !seen.insert(c.clone()) {
            return Ok(false);
        }
        let succ = tape.successors(spec, &c);
        match succ.as_slice() {
            [] => return Ok(false),
            [(_, Next::Accept)] => return Ok(true),
            [(_, Next::Reject)] => return Ok(false),
            [(_, Next::Go(d))] => c = d.clone(),
            _ => return Err(Error::InvalidMachine("nondeterministic step in a deterministic run".into())),
        }
    }
}

/// Which terminal actions are reachable from the initial configuration.
pub fn reachable_verdicts<S: Scalar>(spec: &MachineSpec<S>, word: &str) -> Result<(bool, bool)> {
    let tape = tape_for(spec, word)?;
    let start = tape.initial(spec.heads);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let (mut acc, mut rej) = (false, false);
    while let Some(c) = queue.pop_front() {
        for (w, next) in tape.successors(spec, &c) {
            if w.is_zero() {
                continue;
            }
            match next {
                Next::Accept => acc = true,
                Next::Reject => rej = true,
                Next::Go(d) => {
                    if seen.insert(d.clone()) {
                        queue.push_back(d);
                    }
                }
            }
        }
    }
    Ok((acc, rej))
}

/// Some run accepts.
pub fn nfa_accepts<S: Scalar>(spec: &MachineSpec<S>, word: &str) -> Result<bool> {
    Ok(reachable_verdicts(spec, word)?.0)
}

/// No run rejects.
pub fn co_nfa_accepts<S: Scalar>(spec: &MachineSpec<S>, word: &str) -> Result<bool> {
    Ok(!reachable_verdicts(spec, word)?.1)
}

/// Exact probabilities of halting by accepting, halting by rejecting
/// (explicitly or by getting stuck), and never halting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halting<S> {
    pub accept: S,
    pub reject: S,
    pub diverge: S,
}

pub fn pfa_probabilities<S: Scalar>(spec: &MachineSpec<S>, word: &str) -> Result<Halting<S>> {
    let tape = tape_for(spec, word)?;
    let start = tape.initial(spec.heads);
    let mut index: BTreeMap<Config, usize> = BTreeMap::from([(start.clone(), 0)]);
    let mut configs = vec![start];
    let mut succ: Vec<Vec<(S, Next)>> = Vec::new();
    let mut i = 0;
    while i < configs.len() {
        let s = tape.successors(spec, &configs[i]);
        for (_, n) in &s {
            if let Next::Go(d) = n {
                if !index.contains_key(d) {
                    index.insert(d.clone(), configs.len());
                    configs.push(d.clone());
                }
            }
        }
        succ.push(s);
        i += 1;
    }
    let weight_into = |target: &Next| -> Vec<S> {
        succ.iter()
            .map(|s| s.iter().filter(|(_, n)| n == target).fold(S::zero(), |t, (w, _)| t + w.clone()))
            .collect()
    };
    // getting stuck halts without accepting, so the missing weight counts as rejection
    let deficit = succ.iter().map(|s| S::one() - s.iter().fold(S::zero(), |t, (w, _)| t + w.clone()));
    let into_reject = weight_into(&Next::Reject).into_iter().zip(deficit).map(|(r, d)| r + d).collect();
    let accept = absorption(&succ, &index, weight_into(&Next::Accept))?;
    let reject = absorption(&succ, &index, into_reject)?;
    let diverge = S::one() - accept.clone() - reject.clone();
    Ok(Halting { accept, reject, diverge })
}

/// Probability, from configuration 0, of eventually leaving through
/// `direct[k]` at some configuration `k`.
fn absorption<S: Scalar>(succ: &[Vec<(S, Next)>], index: &BTreeMap<Config, usize>, direct: Vec<S>) -> Result<S> {
    let mut live: Vec<bool> = direct.iter().map(|d| !d.is_zero()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for (k, s) in succ.iter().enumerate() {
            if !live[k] && s.iter().any(|(w, n)| !w.is_zero() && matches!(n, Next::Go(d) if live[index[d]])) {
                live[k] = true;
                changed = true;
            }
        }
    }
    if !live[0] {
        return Ok(S::zero());
    }
    // restricted to configurations that can still leave, I - P is invertible
    let vars: Vec<usize> = (0..succ.len()).filter(|&k| live[k]).collect();
    let var_of: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(v, &k)| (k, v)).collect();
    let m = vars.len();
    let mut a = vec![vec![S::zero(); m]; m];
    let mut b = vec![S::zero(); m];
    for (v, &k) in vars.iter().enumerate() {
        a[v][v] = S::one();
        b[v] = direct[k].clone();
        for (w, n) in &succ[k] {
            if let Next::Go(d) = n {
                if let Some(&u) = var_of.get(&index[d]) {
                    a[v][u] = a[v][u].clone() - w.clone();
                }
            }
        }
    }
    Ok(solve(a, b)?[var_of[&0]].clone())
}

/// Gauss-Jordan elimination over an exact field.
pub fn solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Result<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = x.clone() / p.clone();
        }
        b[col] = b[col].clone() / p;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            let pivot_row = a[col].clone();
            for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x = x.clone() - p.clone() * f.clone();
            }
            b[r] = b[r].clone() - b[col].clone() * f;
        }
    }
    Ok(b)
}

/// Verdict of `test` on `word`, computed by simulation.
pub fn oracle_accepts<S: Scalar>(spec: &MachineSpec<S>, test: &Test<S>, word: &str) -> Result<bool> {
    match test {
        Test::Det => dfa_accepts(spec, word),
        Test::Nl => nfa_accepts(spec, word),
        Test::CoNl => co_nfa_accepts(spec, word),
        Test::Prob(c) => Ok(pfa_probabilities(spec, word)?.accept > *c),
    }
}

/// Accepted words of length at most `max_len`, in the order of
/// [`words_up_to`].
pub fn oracle_language<S: Scalar>(spec: &MachineSpec<S>, test: &Test<S>, max_len: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for w in words_up_to(&spec.alphabet, max_len) {
        if oracle_accepts(spec, test, &w)? {
            out.push(w);
        }
    }
    Ok(out)
}
