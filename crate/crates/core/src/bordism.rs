//! Layered monoidal words in the generators C, L, R, T, Id, Swap, a rewrite
//! engine for the cylinder and torus relations, and evaluation through a
//! theory (V, λ, ρ).
//!
//! Rewriting works on the wiring graph of a word: Id and Swap become plain
//! wires, every other atom becomes a node with ordered ports. A rule edits the
//! graph and the result is re-layered into a word.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::exact::GaussRat;
use crate::moduli::Sign;
use crate::realization::TheoryData;
use crate::report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    C,
    L,
    R,
    T,
    Id,
    Swap,
}

impl Kind {
    /// (inputs, outputs).
    pub fn arity(self) -> (usize, usize) {
        match self {
            Kind::C | Kind::Id => (1, 1),
            Kind::L => (2, 0),
            Kind::R => (0, 2),
            Kind::T => (0, 0),
            Kind::Swap => (2, 2),
        }
    }

    pub fn has_tau(self) -> bool {
        !matches!(self, Kind::Id | Kind::Swap)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BordismError {
    #[error("{kind:?} requires im(tau) {bound}, got {tau}")]
    BadTau {
        kind: Kind,
        tau: String,
        bound: &'static str,
    },
    #[error("{0:?} takes no parameter")]
    UnexpectedTau(Kind),
    #[error("{0:?} requires a parameter")]
    MissingTau(Kind),
    #[error("arity error at layer {layer}: expected {expected} strands, found {found}")]
    Arity {
        layer: usize,
        expected: usize,
        found: usize,
    },
    #[error("mixed spin tags in one word")]
    MixedSpin,
    #[error("rule {rule} has no match{}", if *.index > 0 { format!(" with index {}", .index) } else { String::new() })]
    NoMatch { rule: Rule, index: usize },
    #[error("step budget {0} exceeded")]
    Budget(usize),
    #[error("dense view needs {need} entries, bound is {bound}")]
    TooLarge { need: u128, bound: u128 },
    #[error("word file: {0}")]
    Format(String),
}

/// A generator with its parameter; tau has re ∈ [0, 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    kind: Kind,
    tau: Option<GaussRat>,
    spin: Option<Sign>,
}

impl Atom {
    pub fn new(
        kind: Kind,
        tau: Option<GaussRat>,
        spin: Option<Sign>,
    ) -> Result<Self, BordismError> {
        let tau = match (kind.has_tau(), tau) {
            (false, Some(_)) => return Err(BordismError::UnexpectedTau(kind)),
            (true, None) => return Err(BordismError::MissingTau(kind)),
            (false, None) => None,
            (true, Some(t)) => {
                let strict = matches!(kind, Kind::R | Kind::T);
                let ok = if strict {
                    t.im > Zero::zero()
                } else {
                    t.im >= Zero::zero()
                };
                if !ok {
                    let bound = if strict { "> 0" } else { ">= 0" };
                    return Err(BordismError::BadTau {
                        kind,
                        tau: t.to_string(),
                        bound,
                    });
                }
                Some(t.reduce_mod_one())
            }
        };
        Ok(Self { kind, tau, spin })
    }

    pub fn param(kind: Kind, tau: GaussRat) -> Result<Self, BordismError> {
        Self::new(kind, Some(tau), None)
    }

    pub fn id() -> Self {
        Self {
            kind: Kind::Id,
            tau: None,
            spin: None,
        }
    }

    pub fn swap() -> Self {
        Self {
            kind: Kind::Swap,
            tau: None,
            spin: None,
        }
    }

    pub fn with_spin(mut self, s: Option<Sign>) -> Self {
        self.spin = s;
        self
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn tau(&self) -> Option<&GaussRat> {
        self.tau.as_ref()
    }

    pub fn spin(&self) -> Option<Sign> {
        self.spin
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(s) = self.spin {
            write!(f, "[{}]", s.symbol())?;
        }
        if let Some(t) = &self.tau {
            write!(f, "({t})")?;
        }
        Ok(())
    }
}

/// Layers are listed in application order; each layer is a tensor list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BordWord {
    pub in_arity: usize,
    pub out_arity: usize,
    pub layers: Vec<Vec<Atom>>,
}

impl BordWord {
    pub fn new(in_arity: usize, out_arity: usize, layers: Vec<Vec<Atom>>) -> Self {
        Self {
            in_arity,
            out_arity,
            layers,
        }
    }

    /// Infers out_arity from the layers; fails on the first mismatch.
    pub fn from_layers(in_arity: usize, layers: Vec<Vec<Atom>>) -> Result<Self, BordismError> {
        let mut cur = in_arity;
        for (i, layer) in layers.iter().enumerate() {
            cur = layer_out(layer, cur, i)?;
        }
        let w = Self {
            in_arity,
            out_arity: cur,
            layers,
        };
        typecheck(&w)?;
        Ok(w)
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.layers.iter().flatten()
    }

    pub fn to_file(&self) -> WordFile {
        WordFile {
            in_arity: self.in_arity,
            out_arity: Some(self.out_arity),
            layers: self
                .layers
                .iter()
                .map(|l| {
                    l.iter()
                        .map(|a| AtomFile {
                            kind: a.kind,
                            tau: a.tau.as_ref().map(ToString::to_string),
                            spin: a.spin.map(|s| s.symbol().to_string()),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_file(f: &WordFile) -> Result<Self, BordismError> {
        let mut layers = Vec::with_capacity(f.layers.len());
        for l in &f.layers {
            let mut atoms = Vec::with_capacity(l.len());
            for a in l {
                let tau = match &a.tau {
                    Some(s) => Some(
                        GaussRat::from_str(s).map_err(|e| BordismError::Format(e.to_string()))?,
                    ),
                    None => None,
                };
                let spin = match a.spin.as_deref() {
                    None => None,
                    Some(s) => {
                        let mut cs = s.chars();
                        match (cs.next().and_then(Sign::parse), cs.next()) {
                            (Some(sg), None) => Some(sg),
                            _ => return Err(BordismError::Format(format!("bad spin tag {s:?}"))),
                        }
                    }
                };
                atoms.push(Atom::new(a.kind, tau, spin)?);
            }
            layers.push(atoms);
        }
        match f.out_arity {
            Some(out) => {
                let w = Self::new(f.in_arity, out, layers);
                typecheck(&w)?;
                Ok(w)
            }
            None => Self::from_layers(f.in_arity, layers),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("word files serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, BordismError> {
        let f: WordFile =
            serde_json::from_str(text).map_err(|e| BordismError::Format(e.to_string()))?;
        Self::from_file(&f)
    }
}

impl fmt::Display for BordWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{} ", self.in_arity, self.out_arity)?;
        if self.layers.is_empty() {
            return f.write_str("[]");
        }
        for (i, l) in self.layers.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            let parts: Vec<String> = l.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", parts.join("⊗"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomFile {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordFile {
    pub in_arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_arity: Option<usize>,
    pub layers: Vec<Vec<AtomFile>>,
}

fn layer_out(layer: &[Atom], cur: usize, i: usize) -> Result<usize, BordismError> {
    let (ins, outs) = layer.iter().fold((0, 0), |(a, b), at| {
        let (x, y) = at.kind.arity();
        (a + x, b + y)
    });
    if ins != cur {
        return Err(BordismError::Arity {
            layer: i,
            expected: cur,
            found: ins,
        });
    }
    Ok(outs)
}

/// `(in_arity, out_arity)` if every interface matches and spin tags agree.
/// A trailing mismatch with out_arity is reported at layer `layers.len()`.
pub fn typecheck(w: &BordWord) -> Result<(usize, usize), BordismError> {
    let mut cur = w.in_arity;
    for (i, layer) in w.layers.iter().enumerate() {
        cur = layer_out(layer, cur, i)?;
    }
    if cur != w.out_arity {
        return Err(BordismError::Arity {
            layer: w.layers.len(),
            expected: w.out_arity,
            found: cur,
        });
    }
    let spins: BTreeSet<Sign> = w.atoms().filter_map(|a| a.spin).collect();
    if spins.len() > 1 {
        return Err(BordismError::MixedSpin);
    }
    Ok((w.in_arity, w.out_arity))
}

/// Sum of all parameters, reduced mod 1.
pub fn tau_sum(w: &BordWord) -> GaussRat {
    w.atoms()
        .filter_map(|a| a.tau.clone())
        .fold(GaussRat::zero(), |acc, t| acc + t)
        .reduce_mod_one()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::R1,
        Rule::R2,
        Rule::R3,
        Rule::R4,
        Rule::R5,
        Rule::R6,
        Rule::R7,
        Rule::R8,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            Rule::R1 => "L∘σ → L",
            Rule::R2 => "σ∘R → R",
            Rule::R3 => "(id⊗L⊗id)(R⊗R) → R",
            Rule::R4 => "R and L sharing one strand → C",
            Rule::R5 => "L∘(C⊗id) → L",
            Rule::R6 => "L∘R → T",
            Rule::R7 => "C∘C → C",
            Rule::R8 => "(C⊗id)∘R → R",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Rule {
    type Err = BordismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| BordismError::Format(format!("unknown rule {s:?}")))
    }
}

// ---------------------------------------------------------------------------
// Wiring graph

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Src {
    Input(usize),
    Out(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Dst {
    Output(usize),
    In(usize, usize),
}

#[derive(Clone, Debug)]
struct Node {
    kind: Kind,
    tau: GaussRat,
    spin: Option<Sign>,
}

/// `fwd` and `back` are mutually inverse bijections between sources and
/// destinations; the node graph is acyclic.
#[derive(Clone, Debug)]
struct Graph {
    in_arity: usize,
    out_arity: usize,
    nodes: Vec<Option<Node>>,
    fwd: BTreeMap<Src, Dst>,
    back: BTreeMap<Dst, Src>,
}

impl Graph {
    fn from_word(w: &BordWord) -> Self {
        let mut g = Graph {
            in_arity: w.in_arity,
            out_arity: w.out_arity,
            nodes: Vec::new(),
            fwd: BTreeMap::new(),
            back: BTreeMap::new(),
        };
        let mut cur: Vec<Src> = (0..w.in_arity).map(Src::Input).collect();
        for layer in &w.layers {
            let mut next = Vec::new();
            let mut off = 0;
            for a in layer {
                let (ni, no) = a.kind.arity();
                let ins = &cur[off..off + ni];
                match a.kind {
                    Kind::Id => next.push(ins[0]),
                    Kind::Swap => next.extend([ins[1], ins[0]]),
                    _ => {
                        let n = g.nodes.len();
                        g.nodes.push(Some(Node {
                            kind: a.kind,
                            tau: a.tau.clone().expect("parametrized atom"),
                            spin: a.spin,
                        }));
                        for (p, s) in ins.iter().enumerate() {
                            g.connect(*s, Dst::In(n, p));
                        }
                        next.extend((0..no).map(|p| Src::Out(n, p)));
                    }
                }
                off += ni;
            }
            cur = next;
        }
        for (j, s) in cur.into_iter().enumerate() {
            g.connect(s, Dst::Output(j));
        }
        g
    }

    fn connect(&mut self, s: Src, d: Dst) {
        self.fwd.insert(s, d);
        self.back.insert(d, s);
    }

    fn node(&self, n: usize) -> &Node {
        self.nodes[n].as_ref().expect("live node")
    }

    fn kind(&self, n: usize) -> Kind {
        self.node(n).kind
    }

    fn live(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|_| i))
    }

    fn out_dst(&self, n: usize, p: usize) -> Dst {
        self.fwd[&Src::Out(n, p)]
    }

    fn in_src(&self, n: usize, p: usize) -> Src {
        self.back[&Dst::In(n, p)]
    }

    fn drop_wires(&mut self, n: usize) {
        let (ni, no) = self.kind(n).arity();
        for p in 0..ni {
            if let Some(s) = self.back.remove(&Dst::In(n, p)) {
                self.fwd.remove(&s);
            }
        }
        for p in 0..no {
            if let Some(d) = self.fwd.remove(&Src::Out(n, p)) {
                self.back.remove(&d);
            }
        }
    }

    /// Drops node `n` with its wires.
    fn remove(&mut self, n: usize) {
        self.drop_wires(n);
        self.nodes[n] = None;
    }

    fn merged(&self, kind: Kind, parts: &[usize]) -> Node {
        let tau = parts
            .iter()
            .fold(GaussRat::zero(), |acc, &n| acc + self.node(n).tau.clone())
            .reduce_mod_one();
        let spin = parts.iter().find_map(|&n| self.node(n).spin);
        Node { kind, tau, spin }
    }

    /// Whether the node owning `s` lies downstream of `d`.
    fn reaches(&self, d: Dst, s: Src) -> bool {
        let Src::Out(target, _) = s else { return false };
        let mut stack = vec![d];
        let mut seen = BTreeSet::new();
        while let Some(d) = stack.pop() {
            let Dst::In(n, _) = d else { continue };
            if n == target {
                return true;
            }
            if !seen.insert(n) {
                continue;
            }
            for p in 0..self.kind(n).arity().1 {
                stack.push(self.out_dst(n, p));
            }
        }
        false
    }

    fn matches(&self, rule: Rule) -> Vec<Match> {
        let mut out = Vec::new();
        for n in self.live() {
            let kind = self.kind(n);
            match (rule, kind) {
                (Rule::R1, Kind::L) => {
                    if self.in_src(n, 0) > self.in_src(n, 1) {
                        out.push(Match::FlipL(n));
                    }
                }
                (Rule::R2, Kind::R) => {
                    if self.out_dst(n, 0) > self.out_dst(n, 1) {
                        out.push(Match::FlipR(n));
                    }
                }
                (Rule::R3, Kind::L) => {
                    if let (Src::Out(ra, xa), Src::Out(rb, xb)) =
                        (self.in_src(n, 0), self.in_src(n, 1))
                    {
                        if ra != rb && self.kind(ra) == Kind::R && self.kind(rb) == Kind::R {
                            out.push(Match::Additive {
                                l: n,
                                ra,
                                xa,
                                rb,
                                xb,
                            });
                        }
                    }
                }
                (Rule::R4, Kind::R) => {
                    for x in 0..2 {
                        let Dst::In(l, y) = self.out_dst(n, x) else {
                            continue;
                        };
                        if self.kind(l) != Kind::L {
                            continue;
                        }
                        let other = self.out_dst(n, 1 - x);
                        if matches!(other, Dst::In(l2, _) if l2 == l) {
                            continue;
                        }
                        if !self.reaches(other, self.in_src(l, 1 - y)) {
                            out.push(Match::Cylinder { r: n, x, l, y });
                        }
                    }
                }
                (Rule::R5, Kind::C) => {
                    if let Dst::In(l, y) = self.out_dst(n, 0) {
                        if self.kind(l) == Kind::L {
                            out.push(Match::AbsorbL { c: n, l, y });
                        }
                    }
                }
                (Rule::R6, Kind::R) => {
                    if let (Dst::In(a, _), Dst::In(b, _)) = (self.out_dst(n, 0), self.out_dst(n, 1))
                    {
                        if a == b && self.kind(a) == Kind::L {
                            out.push(Match::Torus { r: n, l: a });
                        }
                    }
                }
                (Rule::R7, Kind::C) => {
                    if let Dst::In(c2, _) = self.out_dst(n, 0) {
                        if self.kind(c2) == Kind::C {
                            out.push(Match::Compose { c1: n, c2 });
                        }
                    }
                }
                (Rule::R8, Kind::R) => {
                    for x in 0..2 {
                        if let Dst::In(c, _) = self.out_dst(n, x) {
                            if self.kind(c) == Kind::C {
                                out.push(Match::AbsorbR { r: n, x, c });
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn apply(&mut self, m: Match) {
        match m {
            Match::FlipL(n) => {
                let (s0, s1) = (self.in_src(n, 0), self.in_src(n, 1));
                self.connect(s0, Dst::In(n, 1));
                self.connect(s1, Dst::In(n, 0));
            }
            Match::FlipR(n) => {
                let (d0, d1) = (self.out_dst(n, 0), self.out_dst(n, 1));
                self.connect(Src::Out(n, 0), d1);
                self.connect(Src::Out(n, 1), d0);
            }
            Match::Additive { l, ra, xa, rb, xb } => {
                let (da, db) = (self.out_dst(ra, 1 - xa), self.out_dst(rb, 1 - xb));
                let node = self.merged(Kind::R, &[ra, rb, l]);
                self.remove(l);
                self.remove(rb);
                self.drop_wires(ra);
                self.nodes[ra] = Some(node);
                self.connect(Src::Out(ra, 0), da);
                self.connect(Src::Out(ra, 1), db);
            }
            Match::Cylinder { r, x, l, y } => {
                let (s, d) = (self.in_src(l, 1 - y), self.out_dst(r, 1 - x));
                let node = self.merged(Kind::C, &[r, l]);
                self.remove(l);
                self.drop_wires(r);
                self.nodes[r] = Some(node);
                self.connect(s, Dst::In(r, 0));
                self.connect(Src::Out(r, 0), d);
            }
            Match::AbsorbL { c, l, y } => {
                let s = self.in_src(c, 0);
                let node = self.merged(Kind::L, &[c, l]);
                self.remove(c);
                self.nodes[l] = Some(node);
                self.connect(s, Dst::In(l, y));
            }
            Match::Torus { r, l } => {
                let node = self.merged(Kind::T, &[r, l]);
                self.remove(l);
                self.drop_wires(r);
                self.nodes[r] = Some(node);
            }
            Match::Compose { c1, c2 } => {
                let (s, d) = (self.in_src(c1, 0), self.out_dst(c2, 0));
                let node = self.merged(Kind::C, &[c1, c2]);
                self.remove(c2);
                self.drop_wires(c1);
                self.nodes[c1] = Some(node);
                self.connect(s, Dst::In(c1, 0));
                self.connect(Src::Out(c1, 0), d);
            }
            Match::AbsorbR { r, x, c } => {
                let d = self.out_dst(c, 0);
                let node = self.merged(Kind::R, &[r, c]);
                self.remove(c);
                self.nodes[r] = Some(node);
                self.connect(Src::Out(r, x), d);
            }
        }
    }

    /// Re-layers by node depth, inserting odd-even transposition layers of
    /// swaps wherever strands must be permuted.
    fn to_word(&self) -> BordWord {
        let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
        let order: Vec<usize> = self.live().collect();
        fn depth_of(g: &Graph, n: usize, memo: &mut BTreeMap<usize, usize>) -> usize {
            if let Some(&d) = memo.get(&n) {
                return d;
            }
            let mut d = 0;
            for p in 0..g.kind(n).arity().0 {
                if let Src::Out(m, _) = g.in_src(n, p) {
                    d = d.max(depth_of(g, m, memo) + 1);
                }
            }
            memo.insert(n, d);
            d
        }
        let mut by_depth: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &n in &order {
            by_depth
                .entry(depth_of(self, n, &mut depth))
                .or_default()
                .push(n);
        }

        let mut layers = Vec::new();
        let mut cur: Vec<Src> = (0..self.in_arity).map(Src::Input).collect();
        for nodes in by_depth.values() {
            let needed: Vec<Src> = nodes
                .iter()
                .flat_map(|&n| (0..self.kind(n).arity().0).map(move |p| (n, p)))
                .map(|(n, p)| self.in_src(n, p))
                .collect();
            let needed_set: BTreeSet<Src> = needed.iter().copied().collect();
            let rest: Vec<Src> = cur
                .iter()
                .copied()
                .filter(|s| !needed_set.contains(s))
                .collect();
            let target: Vec<Src> = needed.iter().chain(rest.iter()).copied().collect();
            permute(&mut layers, &cur, &target);
            let mut layer: Vec<Atom> = nodes
                .iter()
                .map(|&n| {
                    let nd = self.node(n);
                    Atom {
                        kind: nd.kind,
                        tau: Some(nd.tau.clone()),
                        spin: nd.spin,
                    }
                })
                .collect();
            layer.extend(rest.iter().map(|_| Atom::id()));
            layers.push(layer);
            cur = nodes
                .iter()
                .flat_map(|&n| (0..self.kind(n).arity().1).map(move |p| Src::Out(n, p)))
                .chain(rest)
                .collect();
        }
        let target: Vec<Src> = (0..self.out_arity)
            .map(|j| self.back[&Dst::Output(j)])
            .collect();
        permute(&mut layers, &cur, &target);
        if layers.is_empty() && self.in_arity > 0 {
            layers.push(vec![Atom::id(); self.in_arity]);
        }
        BordWord {
            in_arity: self.in_arity,
            out_arity: self.out_arity,
            layers,
        }
    }

    /// Connected components over nodes and boundary points.
    fn components(&self) -> usize {
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
        enum Owner {
            In(usize),
            Out(usize),
            Node(usize),
        }
        let src_owner = |s: Src| match s {
            Src::Input(i) => Owner::In(i),
            Src::Out(n, _) => Owner::Node(n),
        };
        let dst_owner = |d: Dst| match d {
            Dst::Output(j) => Owner::Out(j),
            Dst::In(n, _) => Owner::Node(n),
        };
        let mut owners: Vec<Owner> = (0..self.in_arity).map(Owner::In).collect();
        owners.extend((0..self.out_arity).map(Owner::Out));
        owners.extend(self.live().map(Owner::Node));
        let index: BTreeMap<Owner, usize> =
            owners.iter().enumerate().map(|(i, o)| (*o, i)).collect();
        let mut parent: Vec<usize> = (0..owners.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (s, d) in &self.fwd {
            let (a, b) = (
                find(&mut parent, index[&src_owner(*s)]),
                find(&mut parent, index[&dst_owner(*d)]),
            );
            parent[a] = b;
        }
        (0..owners.len())
            .filter(|&i| find(&mut parent, i) == i)
            .count()
    }
}

/// Appends swap layers carrying the ordering `from` to `to`.
fn permute(layers: &mut Vec<Vec<Atom>>, from: &[Src], to: &[Src]) {
    let pos: BTreeMap<Src, usize> = to.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut p: Vec<usize> = from.iter().map(|s| pos[s]).collect();
    let n = p.len();
    let mut round = 0;
    while p.windows(2).any(|w| w[0] > w[1]) {
        let mut layer = Vec::new();
        let mut i = 0;
        if round % 2 == 1 && n > 0 {
            layer.push(Atom::id());
            i = 1;
        }
        while i < n {
            if i + 1 < n && p[i] > p[i + 1] {
                p.swap(i, i + 1);
                layer.push(Atom::swap());
                i += 2;
            } else {
                layer.push(Atom::id());
                i += 1;
            }
        }
        if layer.iter().any(|a| a.kind == Kind::Swap) {
            layers.push(layer);
        }
        round += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Match {
    FlipL(usize),
    FlipR(usize),
    Additive {
        l: usize,
        ra: usize,
        xa: usize,
        rb: usize,
        xb: usize,
    },
    Cylinder {
        r: usize,
        x: usize,
        l: usize,
        y: usize,
    },
    AbsorbL {
        c: usize,
        l: usize,
        y: usize,
    },
    Torus {
        r: usize,
        l: usize,
    },
    Compose {
        c1: usize,
        c2: usize,
    },
    AbsorbR {
        r: usize,
        x: usize,
        c: usize,
    },
}

impl Match {
    fn anchor(self) -> usize {
        match self {
            Match::FlipL(n) | Match::FlipR(n) => n,
            Match::Additive { l, ra, rb, .. } => l.min(ra).min(rb),
            Match::Cylinder { r, l, .. } | Match::Torus { r, l } => r.min(l),
            Match::AbsorbL { c, l, .. } => c.min(l),
            Match::Compose { c1, c2 } => c1.min(c2),
            Match::AbsorbR { r, c, .. } => r.min(c),
        }
    }
}

/// Number of places where `rule` applies.
pub fn match_count(w: &BordWord, rule: Rule) -> Result<usize, BordismError> {
    typecheck(w)?;
    Ok(Graph::from_word(w).matches(rule).len())
}

/// Applies `rule` at its `index`-th match (matches ordered by node position).
pub fn rewrite_at(w: &BordWord, rule: Rule, index: usize) -> Result<BordWord, BordismError> {
    typecheck(w)?;
    let mut g = Graph::from_word(w);
    let m = *g
        .matches(rule)
        .get(index)
        .ok_or(BordismError::NoMatch { rule, index })?;
    g.apply(m);
    Ok(g.to_word())
}

/// Applies `rule` at its leftmost match.
pub fn rewrite_step(w: &BordWord, rule: Rule) -> Result<BordWord, BordismError> {
    rewrite_at(w, rule, 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub word: BordWord,
    pub steps: Vec<Rule>,
}

/// Contracting rules (R3–R8) are applied leftmost first; port canonicalization
/// (R1, R2) runs once nothing contracts. Budget: 10 steps per atom.
pub fn normalize(w: &BordWord) -> Result<Normalized, BordismError> {
    typecheck(w)?;
    let budget = 10 * w.len();
    let mut g = Graph::from_word(w);
    let mut steps = Vec::new();
    let contracting = [Rule::R3, Rule::R4, Rule::R5, Rule::R6, Rule::R7, Rule::R8];
    loop {
        let pick = |rules: &[Rule]| {
            rules
                .iter()
                .flat_map(|&r| g.matches(r).into_iter().map(move |m| (m.anchor(), r, m)))
                .min_by_key(|(a, r, _)| (*a, *r))
        };
        let Some((_, rule, m)) = pick(&contracting).or_else(|| pick(&[Rule::R1, Rule::R2])) else {
            break;
        };
        if steps.len() >= budget {
            return Err(BordismError::Budget(budget));
        }
        g.apply(m);
        steps.push(rule);
    }
    Ok(Normalized {
        word: g.to_word(),
        steps,
    })
}

/// Connected components of the wiring, counting bare strands.
pub fn component_count(w: &BordWord) -> Result<usize, BordismError> {
    typecheck(w)?;
    Ok(Graph::from_word(w).components())
}

// ---------------------------------------------------------------------------
// Evaluation

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum End {
    Input(usize),
    Output(usize),
}

/// An open strand between two boundary points. Its operator on block k is
/// multiplication by exp(k · log_unit), the product of the q^k met on the way.
#[derive(Clone, Debug, PartialEq)]
pub struct Strand {
    pub ends: (End, End),
    pub log_unit: Complex64,
}

/// The value of a word as a Brauer-type diagram: open strands with block
/// weights and a scalar from closed components. `log_scalar` is `None` when the
/// scalar vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub in_arity: usize,
    pub out_arity: usize,
    pub strands: Vec<Strand>,
    pub log_scalar: Option<Complex64>,
    blocks: Vec<(i64, BigUint)>,
}

fn log_unit(tau: &GaussRat) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI) * tau.to_complex()
}

/// log Σ a_k exp(k u), computed with a shifted maximum.
fn log_loop(blocks: &[(i64, BigUint)], u: Complex64) -> Option<Complex64> {
    let terms: Vec<Complex64> = blocks
        .iter()
        .map(|(k, a)| Complex64::new(a.to_f64().expect("finite").ln(), 0.0) + u * (*k as f64))
        .collect();
    let m = terms.iter().map(|t| t.re).fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return None;
    }
    let s: Complex64 = terms.iter().map(|t| (t - m).exp()).sum();
    if s.norm() == 0.0 {
        return None;
    }
    Some(s.ln() + m)
}

pub fn evaluate(w: &BordWord, th: &TheoryData) -> Result<Evaluation, BordismError> {
    typecheck(w)?;
    let g = Graph::from_word(w);
    let blocks: Vec<(i64, BigUint)> = th.blocks().map(|(k, a)| (k, a.clone())).collect();

    #[derive(Clone, Copy)]
    enum Point {
        Boundary(End),
        Port(usize, bool, usize),
    }
    let from_src = |s: Src| match s {
        Src::Input(i) => Point::Boundary(End::Input(i)),
        Src::Out(n, p) => Point::Port(n, true, p),
    };
    let from_dst = |d: Dst| match d {
        Dst::Output(j) => Point::Boundary(End::Output(j)),
        Dst::In(n, p) => Point::Port(n, false, p),
    };
    // Across the wire attached to a point.
    let across = |pt: Point| match pt {
        Point::Boundary(End::Input(i)) => from_dst(g.fwd[&Src::Input(i)]),
        Point::Boundary(End::Output(j)) => from_src(g.back[&Dst::Output(j)]),
        Point::Port(n, true, p) => from_dst(g.fwd[&Src::Out(n, p)]),
        Point::Port(n, false, p) => from_src(g.back[&Dst::In(n, p)]),
    };
    // The other port of a two-port node.
    let through = |n: usize, out: bool, p: usize| match g.kind(n) {
        Kind::C => Point::Port(n, !out, 0),
        Kind::L | Kind::R => Point::Port(n, out, 1 - p),
        k => unreachable!("{k:?} has no ports"),
    };

    let mut seen = BTreeSet::new();
    let mut strands = Vec::new();
    let ends: Vec<End> = (0..g.in_arity)
        .map(End::Input)
        .chain((0..g.out_arity).map(End::Output))
        .collect();
    let mut used_ends = BTreeSet::new();
    for &e in &ends {
        if used_ends.contains(&e) {
            continue;
        }
        let mut u = Complex64::zero();
        let mut pt = across(Point::Boundary(e));
        let last = loop {
            match pt {
                Point::Boundary(b) => break b,
                Point::Port(n, out, p) => {
                    seen.insert(n);
                    u += log_unit(&g.node(n).tau);
                    pt = across(through(n, out, p));
                }
            }
        };
        used_ends.insert(e);
        used_ends.insert(last);
        strands.push(Strand {
            ends: (e.min(last), e.max(last)),
            log_unit: u,
        });
    }

    let mut log_scalar = Some(Complex64::zero());
    let mut add_loop = |u: Complex64| {
        log_scalar = match (log_scalar, log_loop(&blocks, u)) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
    };
    for n in g.live() {
        if seen.contains(&n) {
            continue;
        }
        if g.kind(n) == Kind::T {
            add_loop(log_unit(&g.node(n).tau));
            continue;
        }
        let start = match g.kind(n) {
            Kind::R => Point::Port(n, true, 0),
            _ => Point::Port(n, false, 0),
        };
        let mut u = Complex64::zero();
        let mut pt = start;
        loop {
            let Point::Port(m, out, p) = pt else {
                unreachable!("closed loops avoid the boundary")
            };
            if !seen.insert(m) {
                break;
            }
            u += log_unit(&g.node(m).tau);
            pt = across(through(m, out, p));
        }
        add_loop(u);
    }
    strands.sort_by_key(|s| s.ends);
    Ok(Evaluation {
        in_arity: g.in_arity,
        out_arity: g.out_arity,
        strands,
        log_scalar,
        blocks,
    })
}

impl Evaluation {
    pub fn scalar(&self) -> Complex64 {
        self.log_scalar.map_or(Complex64::zero(), Complex64::exp)
    }

    /// Largest relative deviation over strand weights (per block) and the
    /// scalar; infinite when the diagrams differ in shape.
    pub fn deviation(&self, o: &Self) -> f64 {
        if self.in_arity != o.in_arity
            || self.out_arity != o.out_arity
            || self.strands.len() != o.strands.len()
            || self.blocks != o.blocks
        {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for (a, b) in self.strands.iter().zip(&o.strands) {
            if a.ends != b.ends {
                return f64::INFINITY;
            }
            let du = a.log_unit - b.log_unit;
            for (k, _) in &self.blocks {
                dev = dev.max(((du * *k as f64).exp() - 1.0).norm());
            }
        }
        match (self.log_scalar, o.log_scalar) {
            (None, None) => dev,
            (Some(a), Some(b)) => dev.max(((a - b).exp() - 1.0).norm()),
            _ => f64::INFINITY,
        }
    }

    /// Dense matrix V^{⊗in} → V^{⊗out}; rows index outputs, columns inputs,
    /// first tensor factor most significant. Refuses beyond `bound` entries.
    pub fn to_dense(&self, bound: u128) -> Result<Vec<Vec<Complex64>>, BordismError> {
        let mut basis_block = Vec::new();
        for (k, a) in &self.blocks {
            let a = a.to_usize().ok_or(BordismError::TooLarge {
                need: u128::MAX,
                bound,
            })?;
            basis_block.extend(std::iter::repeat_n(*k, a));
        }
        let d = basis_block.len() as u128;
        let need = d
            .checked_pow((self.in_arity + self.out_arity) as u32)
            .unwrap_or(u128::MAX);
        if need > bound {
            return Err(BordismError::TooLarge { need, bound });
        }
        let d = d as usize;
        let rows = d.pow(self.out_arity as u32);
        let cols = d.pow(self.in_arity as u32);
        let digits = |mut x: usize, n: usize| {
            let mut v = vec![0; n];
            for i in (0..n).rev() {
                v[i] = x % d;
                x /= d;
            }
            v
        };
        let scalar = self.scalar();
        let mut m = vec![vec![Complex64::zero(); cols]; rows];
        for (r, row) in m.iter_mut().enumerate() {
            let outs = digits(r, self.out_arity);
            for (c, entry) in row.iter_mut().enumerate() {
                let ins = digits(c, self.in_arity);
                let mut v = scalar;
                for s in &self.strands {
                    let idx = |e: End| match e {
                        End::Input(i) => ins[i],
                        End::Output(j) => outs[j],
                    };
                    let (a, b) = (idx(s.ends.0), idx(s.ends.1));
                    if a != b {
                        v = Complex64::zero();
                        break;
                    }
                    v *= (s.log_unit * basis_block[a] as f64).exp();
                }
                *entry = v;
            }
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// Random words and the invariance check

/// τ with re ∈ {0, 1/12, …, 11/12} and im ∈ {4/5, 17/20, …, 2}.
pub fn random_tau<R: Rng + ?Sized>(rng: &mut R) -> GaussRat {
    GaussRat::from_ratios((rng.gen_range(0..12), 12), (rng.gen_range(16..=40), 20))
}

/// A well-typed word with 1..=max_layers layers and at most four strands
/// between layers. All atoms carry the same spin tag (possibly none).
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, max_layers: usize) -> BordWord {
    const WIDTH: usize = 4;
    let spin = [None, Some(Sign::Plus), Some(Sign::Minus)][rng.gen_range(0..3)];
    let in_arity = rng.gen_range(0..=2);
    let mut cur = in_arity;
    let mut layers = Vec::new();
    let n_layers = rng.gen_range(1..=max_layers.max(1));
    let atom = |rng: &mut R, k: Kind| {
        let tau = k.has_tau().then(|| random_tau(rng));
        Atom::new(k, tau, spin).expect("sampled parameters satisfy the constraints")
    };
    for _ in 0..n_layers {
        let mut layer = Vec::new();
        let mut rem = cur;
        let mut width = 0;
        while rem > 0 {
            let k = if rem >= 2 {
                [Kind::C, Kind::Id, Kind::L, Kind::Swap, Kind::C][rng.gen_range(0..5)]
            } else {
                [Kind::C, Kind::Id, Kind::C][rng.gen_range(0..3)]
            };
            let (i, o) = k.arity();
            rem -= i;
            width += o;
            layer.push(atom(rng, k));
        }
        if width + 2 <= WIDTH && (layer.is_empty() || rng.gen_bool(0.35)) {
            let at = rng.gen_range(0..=layer.len());
            layer.insert(at, atom(rng, Kind::R));
            width += 2;
        } else if layer.is_empty() || rng.gen_bool(0.1) {
            let at = rng.gen_range(0..=layer.len());
            layer.insert(at, atom(rng, Kind::T));
        }
        layers.push(layer);
        cur = width;
    }
    BordWord {
        in_arity,
        out_arity: cur,
        layers,
    }
}

/// Seeded words: normalize terminates, preserves the τ-sum, collapses
/// connected words to one atom, and leaves evaluate unchanged; single rule
/// steps at random matches leave evaluate unchanged as well.
pub fn invariance_report<R: Rng + ?Sized>(
    th: &TheoryData,
    rng: &mut R,
    words: usize,
    max_layers: usize,
    tol: f64,
) -> Report {
    let mut max_dev: f64 = 0.0;
    let mut failures = Vec::new();
    let mut rule_hits: BTreeMap<String, usize> = BTreeMap::new();
    let mut total_steps = 0;
    for i in 0..words {
        let w = random_word(rng, max_layers);
        let nf = match normalize(&w) {
            Ok(n) => n,
            Err(e) => {
                failures.push(json!({"word": i, "error": e.to_string()}));
                continue;
            }
        };
        total_steps += nf.steps.len();
        let mut problems = Vec::new();
        if tau_sum(&nf.word) != tau_sum(&w) {
            problems.push("tau sum changed".to_string());
        }
        if component_count(&w).ok() == Some(1) && !w.is_empty() {
            let nodes = nf.word.atoms().filter(|a| a.kind.has_tau()).count();
            if nodes != 1 {
                problems.push(format!("connected word left {nodes} atoms"));
            }
        }
        let ew = evaluate(&w, th).expect("typechecked");
        let dev = ew.deviation(&evaluate(&nf.word, th).expect("normal forms typecheck"));
        max_dev = max_dev.max(dev);
        for rule in Rule::ALL {
            let count = match_count(&w, rule).expect("typechecked");
            if count == 0 {
                continue;
            }
            let idx = rng.gen_range(0..count);
            let stepped = rewrite_at(&w, rule, idx).expect("match exists");
            let d = ew.deviation(&evaluate(&stepped, th).expect("rewrites typecheck"));
            max_dev = max_dev.max(d);
            *rule_hits.entry(rule.to_string()).or_default() += 1;
            if d.is_nan() || d > tol {
                problems.push(format!("{rule} at match {idx}: deviation {d:.3e}"));
            }
        }
        if dev.is_nan() || dev > tol {
            problems.push(format!("normal form deviation {dev:.3e}"));
        }
        if !problems.is_empty() {
            failures.push(json!({"word": i, "text": w.to_string(), "problems": problems}));
        }
    }
    let details = json!({
        "words": words,
        "max_layers": max_layers,
        "normalize_steps": total_steps,
        "rule_steps_checked": rule_hits,
        "failures": failures,
    });
    let mut r = Report::numeric(
        "bordism-invariance",
        tol,
        if max_dev.is_nan() {
            f64::INFINITY
        } else {
            max_dev
        },
        details,
    );
    if !failures.is_empty() {
        r = r.with_status(crate::report::Status::Fail);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tau(re: (i64, i64), im: (i64, i64)) -> GaussRat {
        GaussRat::from_ratios(re, im)
    }

    fn at(k: Kind, re: (i64, i64), im: (i64, i64)) -> Atom {
        Atom::param(k, tau(re, im)).unwrap()
    }

    fn small_theory() -> TheoryData {
        TheoryData::new(1, 1, vec![1u32.into(), 2u32.into(), 1u32.into()])
    }

    #[test]
    fn typecheck_examples() {
        let rl = BordWord::new(
            0,
            0,
            vec![
                vec![at(Kind::R, (0, 1), (1, 1))],
                vec![at(Kind::L, (1, 3), (0, 1))],
            ],
        );
        assert_eq!(typecheck(&rl), Ok((0, 0)));
        let lr = BordWord::new(
            0,
            2,
            vec![
                vec![at(Kind::L, (0, 1), (1, 1))],
                vec![at(Kind::R, (0, 1), (1, 1))],
            ],
        );
        assert_eq!(
            typecheck(&lr),
            Err(BordismError::Arity {
                layer: 0,
                expected: 0,
                found: 2
            })
        );
        let c = BordWord::new(1, 1, vec![vec![at(Kind::C, (0, 1), (1, 1))]]);
        assert_eq!(typecheck(&c), Ok((1, 1)));
    }

    #[test]
    fn atom_constraints() {
        assert!(Atom::param(Kind::R, tau((0, 1), (0, 1))).is_err());
        assert!(Atom::param(Kind::T, tau((0, 1), (0, 1))).is_err());
        assert!(Atom::param(Kind::C, tau((0, 1), (0, 1))).is_ok());
        assert!(Atom::param(Kind::L, tau((1, 2), (-1, 1))).is_err());
        assert_eq!(
            at(Kind::C, (7, 3), (1, 1)).tau().unwrap(),
            &tau((1, 3), (1, 1))
        );
        assert!(Atom::new(Kind::Id, Some(tau((0, 1), (1, 1))), None).is_err());
    }

    #[test]
    fn mixed_spins_are_ill_typed() {
        let w = BordWord::new(
            1,
            1,
            vec![
                vec![at(Kind::C, (0, 1), (1, 1)).with_spin(Some(Sign::Plus))],
                vec![at(Kind::C, (0, 1), (1, 1)).with_spin(Some(Sign::Minus))],
            ],
        );
        assert_eq!(typecheck(&w), Err(BordismError::MixedSpin));
    }

    #[test]
    fn step_examples() {
        let l = at(Kind::L, (1, 4), (1, 2));
        let w = BordWord::new(2, 0, vec![vec![Atom::swap()], vec![l.clone()]]);
        assert_eq!(
            rewrite_step(&w, Rule::R1).unwrap(),
            BordWord::new(2, 0, vec![vec![l]])
        );

        let w = BordWord::new(
            1,
            1,
            vec![
                vec![at(Kind::C, (1, 2), (1, 1))],
                vec![at(Kind::C, (2, 3), (1, 3))],
            ],
        );
        let want = BordWord::new(1, 1, vec![vec![at(Kind::C, (1, 6), (4, 3))]]);
        assert_eq!(rewrite_step(&w, Rule::R7).unwrap(), want);

        let snake = BordWord::new(
            1,
            1,
            vec![
                vec![at(Kind::R, (1, 5), (1, 1)), Atom::id()],
                vec![Atom::id(), at(Kind::L, (0, 1), (0, 1))],
            ],
        );
        let want = BordWord::new(1, 1, vec![vec![at(Kind::C, (1, 5), (1, 1))]]);
        assert_eq!(rewrite_step(&snake, Rule::R4).unwrap(), want);
        assert!(matches!(
            rewrite_step(&snake, Rule::R6),
            Err(BordismError::NoMatch { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let w = BordWord::new(
            0,
            0,
            vec![
                vec![at(Kind::R, (1, 2), (1, 1))],
                vec![at(Kind::L, (2, 3), (1, 2))],
            ],
        );
        let nf = normalize(&w).unwrap().word;
        assert_eq!(
            nf,
            BordWord::new(0, 0, vec![vec![at(Kind::T, (1, 6), (3, 2))]])
        );

        let w = BordWord::new(
            1,
            1,
            vec![
                vec![at(Kind::C, (1, 2), (1, 1))],
                vec![at(Kind::C, (1, 3), (0, 1))],
                vec![at(Kind::C, (1, 4), (1, 5))],
            ],
        );
        let nf = normalize(&w).unwrap();
        assert_eq!(nf.steps, vec![Rule::R7, Rule::R7]);
        assert_eq!(
            nf.word,
            BordWord::new(1, 1, vec![vec![at(Kind::C, (1, 12), (6, 5))]])
        );

        let w = BordWord::new(
            0,
            2,
            vec![
                vec![at(Kind::R, (0, 1), (1, 1)), at(Kind::R, (1, 2), (1, 1))],
                vec![Atom::id(), at(Kind::L, (1, 3), (1, 1)), Atom::id()],
            ],
        );
        let nf = normalize(&w).unwrap().word;
        assert_eq!(
            nf,
            BordWord::new(0, 2, vec![vec![at(Kind::R, (5, 6), (3, 1))]])
        );
    }

    #[test]
    fn disconnected_words_normalize_componentwise() {
        let w = BordWord::new(
            1,
            1,
            vec![
                vec![at(Kind::C, (0, 1), (1, 1)), at(Kind::R, (0, 1), (1, 1))],
                vec![Atom::id(), at(Kind::L, (0, 1), (1, 1))],
            ],
        );
        assert_eq!(component_count(&w).unwrap(), 2);
        let nf = normalize(&w).unwrap().word;
        let kinds: Vec<Kind> = nf
            .atoms()
            .filter(|a| a.kind().has_tau())
            .map(Atom::kind)
            .collect();
        assert_eq!(kinds, vec![Kind::C, Kind::T]);
    }

    #[test]
    fn closed_torus_matches_partition() {
        let th = small_theory();
        let t = tau((1, 7), (1, 1));
        let w = BordWord::new(
            0,
            0,
            vec![
                vec![Atom::param(Kind::R, t.clone()).unwrap()],
                vec![at(Kind::L, (0, 1), (0, 1))],
            ],
        );
        let q = log_unit(&t).exp();
        let want = q.inv() + 2.0 + q;
        let got = evaluate(&w, &th).unwrap().scalar();
        assert!((got - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn cylinder_is_multiplication_by_q_k() {
        let th = small_theory();
        let t = tau((1, 3), (1, 2));
        let w = BordWord::new(1, 1, vec![vec![Atom::param(Kind::C, t.clone()).unwrap()]]);
        let m = evaluate(&w, &th).unwrap().to_dense(1 << 10).unwrap();
        let q = log_unit(&t).exp();
        let diag = [
            q.inv(),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            q,
        ];
        for (i, row) in m.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let want = if i == j { diag[i] } else { Complex64::zero() };
                assert!((x - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let w = random_word(&mut rng, 6);
            assert_eq!(BordWord::from_json(&w.to_json()).unwrap(), w);
        }
        let text = r#"{"in_arity":1,"layers":[[{"kind":"C","tau":"1/2+1 i","spin":"+"}]]}"#;
        let w = BordWord::from_json(text).unwrap();
        assert_eq!(w.out_arity, 1);
        assert!(
            BordWord::from_json(r#"{"in_arity":0,"layers":[[{"kind":"R","tau":"0"}]]}"#).is_err()
        );
    }

    #[test]
    fn random_words_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = invariance_report(&small_theory(), &mut rng, 40, 12, 1e-9);
        assert!(r.status.is_pass(), "{}", serde_json::to_string(&r).unwrap());
    }
}
