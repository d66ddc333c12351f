//! The super Euclidean group law on S-points over a finite Grassmann
//! algebra, graded eigenblock models, and the odd square roots B that force
//! sdim V_{a,b} = 0 for b ≠ 0.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::exact::{parse_rational, rational_to_string, rel_dev, GaussRat};
use crate::qseries::QSeries;
use crate::report::Report;

/// Σ c_S θ_S over subsets S of {θ₁, …, θ_n}, encoded as bitmasks.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GrassmannElt {
    terms: BTreeMap<u32, GaussRat>,
}

/// (−1)^{#{(i, j) : i ∈ a, j ∈ b, i > j}}, the sign of θ_a θ_b → θ_{a∪b}.
fn reorder_sign(a: u32, b: u32) -> i64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl GrassmannElt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: GaussRat) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(mask: u32, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mask, c);
        }
        Self { terms }
    }

    /// The generator θ_i (1-based).
    pub fn theta(i: u32) -> Self {
        assert!((1..=32).contains(&i));
        Self::monomial(1 << (i - 1), GaussRat::from_ints(1, 0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<u32, GaussRat> {
        &self.terms
    }

    /// Coefficient of the empty monomial.
    pub fn reduced(&self) -> GaussRat {
        self.terms.get(&0).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// `Some(0)` if all monomials are even, `Some(1)` if all are odd; zero is
    /// both and reports `Some(0)`.
    pub fn parity(&self) -> Option<u32> {
        let mut ps = self.terms.keys().map(|m| m.count_ones() % 2);
        let first = ps.next().unwrap_or(0);
        ps.all(|p| p == first).then_some(first)
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Some(0)
    }

    pub fn is_odd(&self) -> bool {
        self.is_zero() || self.parity() == Some(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            let e = terms.entry(*m).or_insert_with(GaussRat::zero);
            *e = &*e + c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Self { terms }
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if ma & mb != 0 {
                    continue;
                }
                let c = &(ca * cb) * &GaussRat::from_ints(reorder_sign(*ma, *mb), 0);
                out = out.add(&Self::monomial(ma | mb, c));
            }
        }
        out
    }
}

impl fmt::Debug for GrassmannElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GrassmannElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let gens: Vec<String> = (0..32)
                    .filter(|i| m & (1 << i) != 0)
                    .map(|i| format!("θ{}", i + 1))
                    .collect();
                if gens.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c}){}", gens.join(""))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SusyError {
    #[error("{0} must be even")]
    NotEven(&'static str),
    #[error("theta must be odd")]
    NotOdd,
    #[error("reduced parts of tau and tau_bar must be complex conjugates")]
    NotConjugate,
    #[error("malformed model file: {0}")]
    Format(String),
}

/// An S-point (τ, τ̄, θ) of the super Euclidean plane.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperPoint {
    pub tau: GrassmannElt,
    pub tau_bar: GrassmannElt,
    pub theta: GrassmannElt,
}

impl SuperPoint {
    pub fn new(
        tau: GrassmannElt,
        tau_bar: GrassmannElt,
        theta: GrassmannElt,
    ) -> Result<Self, SusyError> {
        if !tau.is_even() {
            return Err(SusyError::NotEven("tau"));
        }
        if !tau_bar.is_even() {
            return Err(SusyError::NotEven("tau_bar"));
        }
        if !theta.is_odd() {
            return Err(SusyError::NotOdd);
        }
        if tau.reduced().conj() != tau_bar.reduced() {
            return Err(SusyError::NotConjugate);
        }
        Ok(Self {
            tau,
            tau_bar,
            theta,
        })
    }
}

/// (τ₁ + τ₂, τ̄₁ + τ̄₂ + θ₁θ₂, θ₁ + θ₂).
pub fn super_mul(p1: &SuperPoint, p2: &SuperPoint) -> Result<SuperPoint, SusyError> {
    SuperPoint::new(
        p1.tau.add(&p2.tau),
        p1.tau_bar.add(&p2.tau_bar).add(&p1.theta.mul(&p2.theta)),
        p1.theta.add(&p2.theta),
    )
}

/// Polynomial in the symbol ϖ = 2πi with Gaussian-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PiPoly(Vec<GaussRat>);

impl PiPoly {
    pub fn new(mut c: Vec<GaussRat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        PiPoly(c)
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::new(vec![c])
    }

    /// c·ϖ.
    pub fn linear(c: GaussRat) -> Self {
        Self::new(vec![GaussRat::zero(), c])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(GaussRat::zero);
                    let b = o.0.get(i).cloned().unwrap_or_else(GaussRat::zero);
                    &a + &b
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::default();
        }
        let mut out = vec![GaussRat::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn to_complex(&self) -> Complex64 {
        let w = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c.to_complex())
    }
}

/// Key of a generalized eigenblock: eigenvalue e^{2πi(aτ − bτ̄)}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub a: i64,
    pub b: BigRational,
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, rational_to_string(&self.b))
    }
}

/// Even|odd dimensions of each V_{a,b}.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct BlockModel {
    pub blocks: BTreeMap<BlockKey, (u64, u64)>,
}

impl BlockModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_block(mut self, a: i64, b: Rational64, even: u64, odd: u64) -> Self {
        let key = BlockKey {
            a,
            b: BigRational::new((*b.numer()).into(), (*b.denom()).into()),
        };
        self.blocks.insert(key, (even, odd));
        self
    }

    /// sdim = even − odd.
    pub fn sdim(&self, key: &BlockKey) -> i64 {
        let (p, q) = self.blocks[key];
        p as i64 - q as i64
    }

    pub fn to_json(&self) -> String {
        let blocks: Vec<ModelBlock> = self
            .blocks
            .iter()
            .map(|(k, (p, q))| ModelBlock {
                a: k.a,
                b: rational_to_string(&k.b),
                even: *p,
                odd: *q,
            })
            .collect();
        serde_json::to_string_pretty(&ModelFile { blocks }).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, SusyError> {
        let f: ModelFile =
            serde_json::from_str(text).map_err(|e| SusyError::Format(e.to_string()))?;
        let mut m = BlockModel::new();
        for b in f.blocks {
            let key = BlockKey {
                a: b.a,
                b: parse_rational(&b.b).map_err(|e| SusyError::Format(e.to_string()))?,
            };
            if m.blocks.insert(key.clone(), (b.even, b.odd)).is_some() {
                return Err(SusyError::Format(format!("duplicate block {key}")));
            }
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelBlock {
    a: i64,
    b: String,
    even: u64,
    odd: u64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    blocks: Vec<ModelBlock>,
}

/// μ_{a,b}(τ) = e^{2πi(aτ − bτ̄)} at a reduced point τ.
pub fn mu(key: &BlockKey, tau: Complex64) -> Complex64 {
    let b = key.b.to_f64().unwrap_or(f64::NAN);
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    (two_pi_i * (tau * key.a as f64 - tau.conj() * b)).exp()
}

/// Square matrix over ℤ[ϖ] ⊗ ℚ(i) on the even-then-odd basis of one block.
pub type PiMatrix = Vec<Vec<PiPoly>>;

/// Skips zero entries; B₀ has at most one nonzero entry per row.
fn pi_mat_mul(a: &PiMatrix, b: &PiMatrix) -> PiMatrix {
    let n = a.len();
    let mut out = vec![vec![PiPoly::default(); n]; n];
    for (i, row) in a.iter().enumerate() {
        for (l, x) in row.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b[l].iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                out[i][j] = out[i][j].add(&x.mul(y));
            }
        }
    }
    out
}

/// A(τ) = μ·Id and B(τ) = μ·B₀ on each block.
#[derive(Clone, Debug, PartialEq)]
pub struct SemigroupPair {
    pub model: BlockModel,
    pub b0: BTreeMap<BlockKey, PiMatrix>,
}

impl SemigroupPair {
    /// Replaces B₀ on one block.
    pub fn with_b0(mut self, key: &BlockKey, m: PiMatrix) -> Self {
        self.b0.insert(key.clone(), m);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Obstruction {
    pub block: String,
    pub even: u64,
    pub odd: u64,
}

/// For every b ≠ 0 block, B₀ = (0 Id; bϖ·Id 0) on (p|p); b = 0 blocks get
/// B₀ = 0. Blocks with b ≠ 0 and p ≠ q admit no invertible odd B₀.
pub fn build_pair(m: &BlockModel) -> Result<SemigroupPair, Vec<Obstruction>> {
    let mut obstructions = Vec::new();
    let mut b0 = BTreeMap::new();
    for (key, &(p, q)) in &m.blocks {
        let n = (p + q) as usize;
        let mut mat = vec![vec![PiPoly::default(); n]; n];
        if !key.b.is_zero() {
            if p != q {
                obstructions.push(Obstruction {
                    block: key.to_string(),
                    even: p,
                    odd: q,
                });
                continue;
            }
            let p = p as usize;
            let bw = PiPoly::linear(GaussRat::real(key.b.clone()));
            for i in 0..p {
                mat[i][p + i] = PiPoly::constant(GaussRat::from_ints(1, 0));
                mat[p + i][i] = bw.clone();
            }
        }
        b0.insert(key.clone(), mat);
    }
    if obstructions.is_empty() {
        Ok(SemigroupPair {
            model: m.clone(),
            b0,
        })
    } else {
        Err(obstructions)
    }
}

fn is_block_odd(m: &PiMatrix, p: usize) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, x)| x.is_zero() || ((i < p) != (j < p)))
    })
}

/// The three relations A·A = A, A·B = B·A = B and B·B = −∂A/∂τ̄ per block.
/// The last reduces to B₀² = bϖ·Id and is checked exactly; the first two
/// numerically at pairs of samples.
pub fn check_relations(sp: &SemigroupPair, samples: &[Complex64], tol: f64) -> Vec<Report> {
    let mut dev_a = 0.0f64;
    let mut dev_b = 0.0f64;
    for key in sp.model.blocks.keys() {
        let b0 = &sp.b0[key];
        for &t1 in samples {
            for &t2 in samples {
                let (m1, m2, m12) = (mu(key, t1), mu(key, t2), mu(key, t1 + t2));
                dev_a = dev_a.max(rel_dev(m1 * m2, m12, 1e-300));
                for row in b0 {
                    for x in row.iter().filter(|x| !x.is_zero()) {
                        let v = x.to_complex();
                        let target = m12 * v;
                        dev_b = dev_b.max(rel_dev(m1 * (m2 * v), target, 1e-300));
                        dev_b = dev_b.max(rel_dev((m1 * v) * m2, target, 1e-300));
                    }
                }
            }
        }
    }
    let mut bad_square = Vec::new();
    let mut not_odd = Vec::new();
    for (key, &(p, q)) in &sp.model.blocks {
        let b0 = &sp.b0[key];
        let n = (p + q) as usize;
        if !is_block_odd(b0, p as usize) {
            not_odd.push(key.to_string());
        }
        let sq = pi_mat_mul(b0, b0);
        let bw = PiPoly::linear(GaussRat::real(key.b.clone()));
        let ok = (0..n).all(|i| {
            (0..n).all(|j| {
                sq[i][j]
                    == if i == j {
                        bw.clone()
                    } else {
                        PiPoly::default()
                    }
            })
        });
        if !ok {
            bad_square.push(key.to_string());
        }
    }
    vec![
        Report::numeric("susy-semigroup-A", tol, dev_a, json!({})),
        Report::numeric("susy-AB-commute", tol, dev_b, json!({})),
        Report::exact(
            "susy-B-odd",
            not_odd.is_empty(),
            json!({ "failing_blocks": not_odd }),
        ),
        Report::exact(
            "susy-B-square",
            bad_square.is_empty(),
            json!({ "failing_blocks": bad_square }),
        ),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Holomorphic,
    NotSupersymmetrizable {
        /// (block, sdim): the term sdim · q^a q̄^b.
        residue: Vec<(String, i64)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionQexp {
    /// Σ_a sdim V_{a,0} q^a.
    pub series: QSeries<BigInt>,
    pub verdict: Verdict,
}

/// Z = Σ μ_{a,b} sdim V_{a,b}: holomorphic iff every b ≠ 0 block has sdim 0.
pub fn partition_qexp(m: &BlockModel) -> PartitionQexp {
    let top = m.blocks.keys().map(|k| k.a).max().unwrap_or(0);
    let prec = Rational64::from_integer(top + 1);
    let series = QSeries::from_terms(
        1,
        prec,
        m.blocks
            .keys()
            .filter(|k| k.b.is_zero())
            .map(|k| (k.a, BigInt::from(m.sdim(k)))),
    );
    let residue: Vec<(String, i64)> = m
        .blocks
        .keys()
        .filter(|k| !k.b.is_zero() && m.sdim(k) != 0)
        .map(|k| (k.to_string(), m.sdim(k)))
        .collect();
    let verdict = if residue.is_empty() {
        Verdict::Holomorphic
    } else {
        Verdict::NotSupersymmetrizable { residue }
    };
    PartitionQexp { series, verdict }
}

/// str A(τ) as Σ μ_{a,b}(τ) sdim V_{a,b}.
pub fn supertrace_blockwise(m: &BlockModel, tau: Complex64) -> Complex64 {
    m.blocks.keys().map(|k| mu(k, tau) * m.sdim(k) as f64).sum()
}

/// str A(τ) from the explicit diagonal matrix and grading operator.
pub fn supertrace_dense(m: &BlockModel, tau: Complex64) -> Complex64 {
    let mut diag = Vec::new();
    let mut grading = Vec::new();
    for (k, &(p, q)) in &m.blocks {
        let v = mu(k, tau);
        for _ in 0..p {
            diag.push(v);
            grading.push(1.0);
        }
        for _ in 0..q {
            diag.push(v);
            grading.push(-1.0);
        }
    }
    diag.iter().zip(&grading).map(|(d, g)| d * g).sum()
}

/// The model {(−1,0): 1|0, (0,0): 744|0, (0,1): 3|3}.
pub fn demo_model() -> BlockModel {
    BlockModel::new()
        .with_block(-1, Rational64::from_integer(0), 1, 0)
        .with_block(0, Rational64::from_integer(0), 744, 0)
        .with_block(0, Rational64::from_integer(1), 3, 3)
}

/// Lowest exponent of a holomorphic partition function; `None` for zero.
pub fn pole_order(p: &PartitionQexp) -> Option<i64> {
    p.series.valuation().map(|v| (-v.to_integer()).max(0))
}

/// One to five blocks with a ∈ [−2, 3] and b ∈ {0, 1/2, 1, 3/2, 2}; each
/// b ≠ 0 block is balanced (p|p) with probability 1/2.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R) -> BlockModel {
    let mut m = BlockModel::new();
    for _ in 0..rng.gen_range(1..=5) {
        let a = rng.gen_range(-2..=3);
        let b = Rational64::new(rng.gen_range(0..=4), 2);
        let even = rng.gen_range(0..=4);
        let odd = if b != Rational64::from_integer(0) && rng.gen_bool(0.5) {
            even
        } else {
            rng.gen_range(0..=4)
        };
        m = m.with_block(a, b, even, odd);
    }
    m
}

/// build_pair succeeds iff every b ≠ 0 block has sdim 0; built pairs satisfy
/// the relations; partition functions of built pairs are holomorphic with
/// pole order bounded by the most negative a.
pub fn cancellation_report<R: Rng + ?Sized>(
    rng: &mut R,
    models: usize,
    samples: &[Complex64],
    tol: f64,
) -> Report {
    let mut built = 0;
    let mut obstructed = 0;
    let mut failures = Vec::new();
    let mut max_dev = 0.0f64;
    for i in 0..models {
        let m = random_model(rng);
        let balanced = m.blocks.keys().all(|k| k.b.is_zero() || m.sdim(k) == 0);
        let p = partition_qexp(&m);
        match build_pair(&m) {
            Ok(sp) => {
                built += 1;
                if !balanced {
                    failures.push(json!({"model": i, "problem": "built an unbalanced model"}));
                }
                for r in check_relations(&sp, samples, tol) {
                    if let crate::report::Tolerance::Numeric { max_deviation, .. } = r.tolerance {
                        max_dev = max_dev.max(max_deviation);
                    }
                    if !r.status.is_pass() {
                        failures.push(json!({"model": i, "problem": r.check}));
                    }
                }
                let min_a = m.blocks.keys().map(|k| k.a).min().unwrap_or(0);
                if p.verdict != Verdict::Holomorphic {
                    failures.push(json!({"model": i, "problem": "not holomorphic"}));
                }
                if pole_order(&p).is_some_and(|o| o > (-min_a).max(0)) {
                    failures.push(json!({"model": i, "problem": "pole beyond the lowest block"}));
                }
            }
            Err(obs) => {
                obstructed += 1;
                if balanced || obs.is_empty() {
                    failures
                        .push(json!({"model": i, "problem": "obstruction on a balanced model"}));
                }
                if p.verdict == Verdict::Holomorphic {
                    failures.push(
                        json!({"model": i, "problem": "obstructed model reported holomorphic"}),
                    );
                }
            }
        }
    }
    let details =
        json!({"models": models, "built": built, "obstructed": obstructed, "failures": failures});
    let ok = failures.is_empty();
    Report::numeric("susy-cancellation", tol, max_dev, details).with_status(
        if ok && max_dev <= tol {
            crate::report::Status::Pass
        } else {
            crate::report::Status::Fail
        },
    )
}

fn random_grassmann<R: Rng + ?Sized>(rng: &mut R, parity: u32) -> GrassmannElt {
    let mut x = GrassmannElt::zero();
    for mask in 0u32..8 {
        if mask.count_ones() % 2 == parity && mask != 0 && rng.gen_bool(0.7) {
            let c = GaussRat::from_ratios(
                (rng.gen_range(-5..=5), rng.gen_range(1..=4)),
                (rng.gen_range(-5..=5), rng.gen_range(1..=4)),
            );
            x = x.add(&GrassmannElt::monomial(mask, c));
        }
    }
    x
}

/// Associativity of the super group law on random points over Λ[θ1, θ2, θ3],
/// and τ̄(p₁p₂) − τ̄(p₂p₁) = 2θ₁θ₂ for p_i = (0, 0, θ_i). Exact.
pub fn group_law_report<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> Report {
    let mut bad = 0;
    for _ in 0..trials {
        let pts: Vec<SuperPoint> = (0..3)
            .map(|_| {
                let t =
                    GaussRat::from_ratios((rng.gen_range(-9..=9), 4), (rng.gen_range(1..=9), 4));
                let tau = GrassmannElt::scalar(t.clone()).add(&random_grassmann(rng, 0));
                let tau_bar = GrassmannElt::scalar(t.conj()).add(&random_grassmann(rng, 0));
                SuperPoint::new(tau, tau_bar, random_grassmann(rng, 1))
                    .expect("sampled with the right parities")
            })
            .collect();
        let left =
            super_mul(&super_mul(&pts[0], &pts[1]).expect("closed"), &pts[2]).expect("closed");
        let right =
            super_mul(&pts[0], &super_mul(&pts[1], &pts[2]).expect("closed")).expect("closed");
        if left != right {
            bad += 1;
        }
    }
    let odd_point = |i| {
        SuperPoint::new(
            GrassmannElt::zero(),
            GrassmannElt::zero(),
            GrassmannElt::theta(i),
        )
        .expect("valid")
    };
    let (p1, p2) = (odd_point(1), odd_point(2));
    let comm = super_mul(&p1, &p2)
        .expect("closed")
        .tau_bar
        .sub(&super_mul(&p2, &p1).expect("closed").tau_bar);
    let want = GrassmannElt::theta(1)
        .mul(&GrassmannElt::theta(2))
        .add(&GrassmannElt::theta(1).mul(&GrassmannElt::theta(2)));
    let comm_ok = comm == want;
    Report::exact(
        "susy-group-law",
        bad == 0 && comm_ok,
        json!({"trials": trials, "non_associative": bad, "commutator": comm.to_string(), "commutator_ok": comm_ok}),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64) -> GaussRat {
        GaussRat::from_ints(re, 0)
    }

    fn point(tau: GaussRat, extra_bar: GrassmannElt, theta: GrassmannElt) -> SuperPoint {
        let tau_bar = GrassmannElt::scalar(tau.conj()).add(&extra_bar);
        SuperPoint::new(GrassmannElt::scalar(tau), tau_bar, theta).unwrap()
    }

    #[test]
    fn grassmann_signs() {
        let (t1, t2) = (GrassmannElt::theta(1), GrassmannElt::theta(2));
        assert_eq!(t1.mul(&t2), t2.mul(&t1).neg());
        assert!(t1.mul(&t1).is_zero());
        let t3 = GrassmannElt::theta(3);
        assert_eq!(t1.mul(&t2).mul(&t3), t1.mul(&t2.mul(&t3)));
        assert_eq!(t3.mul(&t1).mul(&t2), t1.mul(&t2).mul(&t3));
        assert_eq!(t2.mul(&t1).mul(&t3).parity(), Some(1));
    }

    #[test]
    fn reduced_group_law_is_addition() {
        let p1 = point(
            GaussRat::from_ints(1, 2),
            GrassmannElt::zero(),
            GrassmannElt::zero(),
        );
        let p2 = point(
            GaussRat::from_ratios((1, 3), (1, 1)),
            GrassmannElt::zero(),
            GrassmannElt::zero(),
        );
        let p = super_mul(&p1, &p2).unwrap();
        assert_eq!(p.tau.reduced(), GaussRat::from_ratios((4, 3), (3, 1)));
        assert_eq!(p.tau_bar.reduced(), GaussRat::from_ratios((4, 3), (-3, 1)));
        assert!(p.theta.is_zero());
    }

    #[test]
    fn point_validation() {
        let bad = SuperPoint::new(
            GrassmannElt::theta(1),
            GrassmannElt::zero(),
            GrassmannElt::zero(),
        );
        assert_eq!(bad, Err(SusyError::NotEven("tau")));
        let bad = SuperPoint::new(
            GrassmannElt::scalar(GaussRat::i()),
            GrassmannElt::scalar(GaussRat::i()),
            GrassmannElt::zero(),
        );
        assert_eq!(bad, Err(SusyError::NotConjugate));
        let bad = SuperPoint::new(
            GrassmannElt::zero(),
            GrassmannElt::zero(),
            GrassmannElt::scalar(g(1)),
        );
        assert_eq!(bad, Err(SusyError::NotOdd));
    }

    #[test]
    fn build_pair_examples() {
        let m = BlockModel::new().with_block(0, Rational64::from_integer(1), 1, 1);
        let sp = build_pair(&m).unwrap();
        let reports = check_relations(
            &sp,
            &[Complex64::new(0.1, 1.0), Complex64::new(-0.2, 0.7)],
            1e-10,
        );
        assert!(reports.iter().all(|r| r.status.is_pass()), "{reports:?}");

        let m = BlockModel::new().with_block(2, Rational64::from_integer(1), 2, 1);
        let obs = build_pair(&m).unwrap_err();
        assert_eq!(obs.len(), 1);

        let m = BlockModel::new().with_block(3, Rational64::from_integer(0), 2, 5);
        let sp = build_pair(&m).unwrap();
        assert!(sp
            .b0
            .values()
            .all(|b| b.iter().flatten().all(PiPoly::is_zero)));
        let reports = check_relations(&sp, &[Complex64::new(0.1, 1.0)], 1e-10);
        assert!(reports.iter().all(|r| r.status.is_pass()));
    }

    #[test]
    fn wrong_square_fails_exactly() {
        let m = BlockModel::new().with_block(0, Rational64::from_integer(1), 1, 1);
        let key = m.blocks.keys().next().unwrap().clone();
        let one = PiPoly::constant(g(1));
        let bad = vec![
            vec![PiPoly::default(), one.clone()],
            vec![one, PiPoly::default()],
        ];
        let sp = build_pair(&m).unwrap().with_b0(&key, bad);
        let reports = check_relations(&sp, &[Complex64::new(0.1, 1.0)], 1e-10);
        let sq = reports.iter().find(|r| r.check == "susy-B-square").unwrap();
        assert!(!sq.status.is_pass());
    }

    #[test]
    fn partition_examples() {
        let p = partition_qexp(&demo_model());
        assert_eq!(p.verdict, Verdict::Holomorphic);
        assert_eq!(p.series.coeff_int(-1), Some(BigInt::from(1)));
        assert_eq!(p.series.coeff_int(0), Some(BigInt::from(744)));
        assert_eq!(pole_order(&p), Some(1));

        let m = BlockModel::new().with_block(0, Rational64::new(1, 2), 2, 1);
        let p = partition_qexp(&m);
        assert_eq!(
            p.verdict,
            Verdict::NotSupersymmetrizable {
                residue: vec![("(0, 1/2)".into(), 1)]
            }
        );

        let p = partition_qexp(&BlockModel::new());
        assert!(p.series.is_empty());
        assert_eq!(p.verdict, Verdict::Holomorphic);
    }

    #[test]
    fn supertrace_two_ways() {
        let m = demo_model().with_block(2, Rational64::new(1, 3), 4, 1);
        for tau in [Complex64::new(0.1, 1.1), Complex64::new(-0.4, 0.8)] {
            let (a, b) = (supertrace_blockwise(&m, tau), supertrace_dense(&m, tau));
            assert!(rel_dev(a, b, 1e-300) < 1e-10);
        }
    }

    #[test]
    fn model_json_round_trip() {
        let m = demo_model().with_block(1, Rational64::new(-3, 4), 0, 2);
        assert_eq!(BlockModel::from_json(&m.to_json()).unwrap(), m);
        assert!(BlockModel::from_json(r#"{"blocks":[{"a":0,"b":"x","even":1,"odd":0}]}"#).is_err());
    }
}
