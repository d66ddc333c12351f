//! Field-theory data (V, λ, ρ) realizing an integral q-series with
//! nonnegative coefficients, with V = ⊕_k V_k and V_k = ℂ^{a_k}.
//!
//! Blocks are kept symbolic: a block operator is either a scalar multiple of
//! the identity or an explicit small matrix, so dimensions like 196884 never
//! get materialized.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::clifford::Parity;
use crate::exact::{rel_dev, GaussRat, Scalar};
use crate::moduli::{
    check_section_equivariance, PointedTorus, SectorSection, Sign, SpinStructure, SL2Z,
};
use crate::qseries::{AnySeries, QSeries};
use crate::report::{Report, Status};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RealizationError {
    #[error("coefficient of q^{exponent} is {value}; dimensions must be nonnegative")]
    NegativeCoefficient { exponent: String, value: String },
    #[error("term q^{0} has a non-integer exponent")]
    FractionalExponent(String),
    #[error("series must have an integral truncation order, got {0}")]
    FractionalPrec(String),
    #[error("malformed theory file: {0}")]
    Format(String),
}

/// One graded sector: dims a_k for k = −pole ..= trunc, a common parity, and
/// optional explicit copairing matrices on small blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryData {
    pole: i64,
    trunc: i64,
    dims: Vec<BigUint>,
    pub grading: Parity,
    copairing: BTreeMap<i64, Vec<Vec<GaussRat>>>,
}

impl TheoryData {
    pub fn new(pole: i64, trunc: i64, dims: Vec<BigUint>) -> Self {
        assert!(
            pole >= 0 && trunc >= -pole,
            "window must satisfy trunc >= -pole >= ..."
        );
        assert_eq!(
            dims.len() as i64,
            trunc + pole + 1,
            "one dimension per k in the window"
        );
        Self {
            pole,
            trunc,
            dims,
            grading: Parity::Even,
            copairing: BTreeMap::new(),
        }
    }

    pub fn pole(&self) -> i64 {
        self.pole
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn dims(&self) -> &[BigUint] {
        &self.dims
    }

    /// a_k, zero outside the window.
    pub fn dim(&self, k: i64) -> BigUint {
        if k < -self.pole || k > self.trunc {
            return BigUint::zero();
        }
        self.dims[(k + self.pole) as usize].clone()
    }

    /// Nonzero blocks `(k, a_k)`.
    pub fn blocks(&self) -> impl Iterator<Item = (i64, &BigUint)> + '_ {
        self.dims
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(move |(i, d)| (i as i64 - self.pole, d))
    }

    /// Replaces the copairing on block k by Σ m_ij e_i ⊗ e_j (a test hook for
    /// non-canonical data).
    pub fn with_copairing_block(mut self, k: i64, m: Vec<Vec<GaussRat>>) -> Self {
        let n = self.dim(k).to_usize().expect("explicit blocks are small");
        assert!(
            m.len() == n && m.iter().all(|row| row.len() == n),
            "matrix must be a_k × a_k"
        );
        self.copairing.insert(k, m);
        self
    }

    pub fn with_grading(mut self, g: Parity) -> Self {
        self.grading = g;
        self
    }

    /// Total dimension of the truncated V.
    pub fn total_dim(&self) -> BigUint {
        self.dims.iter().sum()
    }
}

/// Reads a_k off an integer-exponent series with nonnegative coefficients.
pub fn build_from_series(f: &QSeries<BigInt>) -> Result<TheoryData, RealizationError> {
    if !f.prec().is_integer() {
        return Err(RealizationError::FractionalPrec(f.prec().to_string()));
    }
    for (e, c) in f.terms() {
        if !e.is_integer() {
            return Err(RealizationError::FractionalExponent(e.to_string()));
        }
        if c < &BigInt::zero() {
            return Err(RealizationError::NegativeCoefficient {
                exponent: e.to_string(),
                value: c.to_string(),
            });
        }
    }
    let trunc = f.prec().to_integer() - 1;
    let pole = f.valuation().map_or(0, |v| (-v.to_integer()).max(0));
    let trunc = trunc.max(-pole);
    let dims = (-pole..=trunc)
        .map(|k| {
            f.coeff_int(k)
                .map(|c| c.to_biguint().expect("checked nonnegative"))
                .unwrap_or_default()
        })
        .collect();
    Ok(TheoryData::new(pole, trunc, dims))
}

/// A block operator or block tensor: `s·Id` or an explicit matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockMatrix<S> {
    Scalar(S),
    Dense(Vec<Vec<S>>),
}

impl<S: Scalar> BlockMatrix<S> {
    fn scale(&self, s: &S) -> Self {
        match self {
            BlockMatrix::Scalar(a) => BlockMatrix::Scalar(a.clone() * s.clone()),
            BlockMatrix::Dense(m) => BlockMatrix::Dense(
                m.iter()
                    .map(|r| r.iter().map(|x| x.clone() * s.clone()).collect())
                    .collect(),
            ),
        }
    }

    fn to_dense(&self, n: usize) -> Vec<Vec<S>> {
        match self {
            BlockMatrix::Dense(m) => m.clone(),
            BlockMatrix::Scalar(a) => (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { a.clone() } else { S::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (BlockMatrix::Scalar(a), _) => o.scale(a),
            (_, BlockMatrix::Scalar(b)) => self.scale(b),
            (BlockMatrix::Dense(a), BlockMatrix::Dense(b)) => {
                let n = a.len();
                BlockMatrix::Dense(
                    (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| {
                                    (0..n).fold(S::zero(), |acc, l| {
                                        acc + a[i][l].clone() * b[l][j].clone()
                                    })
                                })
                                .collect()
                        })
                        .collect(),
                )
            }
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            BlockMatrix::Scalar(_) => self.clone(),
            BlockMatrix::Dense(m) => {
                let n = m.len();
                BlockMatrix::Dense(
                    (0..n)
                        .map(|i| (0..n).map(|j| m[j][i].clone()).collect())
                        .collect(),
                )
            }
        }
    }

    /// Equality as operators on a block of dimension `n`.
    pub fn same_as(&self, o: &Self, n: usize) -> bool {
        match (self, o) {
            (BlockMatrix::Scalar(a), BlockMatrix::Scalar(b)) => a == b,
            _ => self.to_dense(n) == o.to_dense(n),
        }
    }

    /// Max relative entrywise deviation as operators on a block of size `n`.
    pub fn deviation(&self, o: &Self, n: usize) -> f64 {
        match (self, o) {
            (BlockMatrix::Scalar(a), BlockMatrix::Scalar(b)) => {
                rel_dev(a.to_complex(), b.to_complex(), 1e-300)
            }
            _ => {
                let (x, y) = (self.to_dense(n), o.to_dense(n));
                let mut dev = 0.0f64;
                for (rx, ry) in x.iter().zip(&y) {
                    for (a, b) in rx.iter().zip(ry) {
                        dev = dev.max(rel_dev(a.to_complex(), b.to_complex(), 1e-300));
                    }
                }
                dev
            }
        }
    }
}

/// Block-diagonal data indexed by k.
#[derive(Clone, Debug, PartialEq)]
pub struct Blocks<S> {
    pub blocks: BTreeMap<i64, BlockMatrix<S>>,
}

fn block_size(th: &TheoryData, k: i64) -> usize {
    th.dim(k).to_usize().unwrap_or(usize::MAX)
}

impl<S: Scalar> Blocks<S> {
    pub fn get(&self, k: i64) -> Option<&BlockMatrix<S>> {
        self.blocks.get(&k)
    }

    fn zip_with(
        &self,
        o: &Self,
        f: impl Fn(&BlockMatrix<S>, &BlockMatrix<S>) -> BlockMatrix<S>,
    ) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|(k, a)| (*k, f(a, &o.blocks[k])))
                .collect(),
        }
    }

    pub fn same_as(&self, o: &Self, th: &TheoryData) -> bool {
        self.blocks.len() == o.blocks.len()
            && self.blocks.iter().all(|(k, a)| {
                o.blocks
                    .get(k)
                    .is_some_and(|b| a.same_as(b, block_size(th, *k)))
            })
    }

    pub fn deviation(&self, o: &Self, th: &TheoryData) -> f64 {
        self.blocks
            .iter()
            .map(|(k, a)| {
                o.blocks
                    .get(k)
                    .map_or(f64::INFINITY, |b| a.deviation(b, block_size(th, *k)))
            })
            .fold(0.0, f64::max)
    }
}

/// ρ(q) = Σ_k q^k Σ_i e_i ⊗ e_i, stored per block as the coefficient matrix.
pub fn rho<S: Scalar + FromGauss>(th: &TheoryData, q: &S) -> Blocks<S> {
    let blocks = th
        .blocks()
        .map(|(k, _)| {
            let qk = q.powi(k).expect("q must be nonzero");
            let b = match th.copairing.get(&k) {
                Some(m) => BlockMatrix::Dense(
                    m.iter()
                        .map(|r| r.iter().map(|x| S::from_gauss(x) * qk.clone()).collect())
                        .collect(),
                ),
                None => BlockMatrix::Scalar(qk),
            };
            (k, b)
        })
        .collect();
    Blocks { blocks }
}

/// Scalars that contain the Gaussian rationals.
pub trait FromGauss {
    fn from_gauss(x: &GaussRat) -> Self;
}

impl FromGauss for GaussRat {
    fn from_gauss(x: &GaussRat) -> Self {
        x.clone()
    }
}

impl FromGauss for Complex64 {
    fn from_gauss(x: &GaussRat) -> Self {
        x.to_complex()
    }
}

/// A(q) = (id ⊗ λ)(ρ(q) ⊗ id); with λ(e_i, e_j) = δ_ij this is the matrix of
/// ρ(q) acting on each block.
pub fn a_operator<S: Scalar + FromGauss>(th: &TheoryData, q: &S) -> Blocks<S> {
    rho(th, q)
}

/// (id ⊗ λ ⊗ id)(ρ₁ ⊗ ρ₂).
pub fn glue<S: Scalar>(r1: &Blocks<S>, r2: &Blocks<S>) -> Blocks<S> {
    r1.zip_with(r2, |a, b| a.mul(b))
}

/// (A₁ ⊗ A₂)(ρ) = A₁ ρ A₂ᵀ blockwise.
pub fn apply_pair<S: Scalar>(a1: &Blocks<S>, a2: &Blocks<S>, r: &Blocks<S>) -> Blocks<S> {
    Blocks {
        blocks: r
            .blocks
            .iter()
            .map(|(k, m)| (*k, a1.blocks[k].mul(m).mul(&a2.blocks[k].transpose())))
            .collect(),
    }
}

/// A vector in the truncated V: block k ↦ sparse coordinates.
pub type BlockVector<S> = BTreeMap<i64, BTreeMap<usize, S>>;

/// λ(v, w) = Σ_k ⟨v̄_k, w_k⟩ with the Hermitian product antilinear in its first
/// slot, hence Σ v_i w_i: bilinear.
pub fn lambda_pair<S: Scalar>(th: &TheoryData, v: &BlockVector<S>, w: &BlockVector<S>) -> S {
    let mut acc = S::zero();
    for (k, vk) in v {
        let n = th.dim(*k);
        let Some(wk) = w.get(k) else { continue };
        for (i, x) in vk {
            assert!(BigUint::from(*i) < n, "coordinate {i} outside block {k}");
            if let Some(y) = wk.get(i) {
                acc = acc + x.conj().conj() * y.clone();
            }
        }
    }
    acc
}

/// Σ_k ±a_k q^k, the supertrace of A blockwise (sign from the grading).
pub fn partition(th: &TheoryData) -> QSeries<BigInt> {
    let sign = BigInt::from(th.grading.sign());
    QSeries::from_terms(
        1,
        Rational64::from_integer(th.trunc + 1),
        th.blocks()
            .map(|(k, d)| (k, BigInt::from(d.clone()) * &sign)),
    )
}

/// Σ_k a_k q^k regardless of grading.
pub fn trace_partition(th: &TheoryData) -> QSeries<BigInt> {
    QSeries::from_terms(
        1,
        Rational64::from_integer(th.trunc + 1),
        th.blocks().map(|(k, d)| (k, BigInt::from(d.clone()))),
    )
}

/// V⁺ and V⁻ with the grading-flip switch on V⁺.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinTheoryData {
    pub plus_sector: TheoryData,
    pub minus_sector: TheoryData,
    pub flip_plus: bool,
}

impl SpinTheoryData {
    /// Both sectors all-even with dims from `th`.
    pub fn uniform(th: TheoryData) -> Self {
        Self {
            plus_sector: th.clone(),
            minus_sector: th,
            flip_plus: false,
        }
    }

    fn effective_plus(&self) -> TheoryData {
        let mut p = self.plus_sector.clone();
        if self.flip_plus {
            p.grading = p.grading.flip();
        }
        p
    }
}

/// s₂ selects V^{s₂}; s₁ = + inserts the grading involution (supertrace),
/// s₁ = − omits it (trace).
pub fn spin_partition(sth: &SpinTheoryData, s: SpinStructure) -> QSeries<BigInt> {
    let sector = match s.s2 {
        Sign::Plus => sth.effective_plus(),
        Sign::Minus => sth.minus_sector.clone(),
    };
    match s.s1 {
        Sign::Plus => partition(&sector),
        Sign::Minus => trace_partition(&sector),
    }
}

/// The four sector partition functions as a weight-0 section.
pub fn spin_section(sth: &SpinTheoryData) -> SectorSection {
    SectorSection::new(
        Rational64::from_integer(0),
        SpinStructure::ALL
            .iter()
            .map(|&s| (s, AnySeries::Int(spin_partition(sth, s))))
            .collect(),
    )
}

/// Gaussian-rational sample points in the punctured unit disk.
fn exact_q_samples() -> Vec<GaussRat> {
    vec![
        GaussRat::from_ratios((1, 3), (1, 5)),
        GaussRat::from_ratios((-1, 2), (1, 7)),
        GaussRat::from_ratios((0, 1), (-2, 3)),
    ]
}

/// Condition (a): λ and every block of ρ are symmetric.
pub fn check_symmetry(th: &TheoryData) -> Report {
    let q = &exact_q_samples()[0];
    let r = rho(th, q);
    let asym: Vec<i64> = r
        .blocks
        .iter()
        .filter(|(k, m)| !m.same_as(&m.transpose(), block_size(th, **k)))
        .map(|(k, _)| *k)
        .collect();
    Report::exact(
        "condition-a-symmetry",
        asym.is_empty(),
        json!({ "asymmetric_blocks": asym }),
    )
}

/// Condition (b): gluing ρ(q₁) with ρ(q₂) along λ gives ρ(q₁q₂); A is a
/// semigroup; (A(q₁) ⊗ A(q₂))ρ(q) = ρ(q q₁ q₂). All exact.
pub fn check_gluing(th: &TheoryData) -> Report {
    let qs = exact_q_samples();
    let mut failures = Vec::new();
    for (i, q1) in qs.iter().enumerate() {
        for (j, q2) in qs.iter().enumerate() {
            let q12 = q1 * q2;
            if !glue(&rho(th, q1), &rho(th, q2)).same_as(&rho(th, &q12), th) {
                failures.push(format!("glue({i},{j})"));
            }
            if !a_operator(th, q1)
                .mul_blocks(&a_operator(th, q2))
                .same_as(&a_operator(th, &q12), th)
            {
                failures.push(format!("semigroup({i},{j})"));
            }
            let q = &qs[(i + j) % qs.len()];
            let lhs = apply_pair(&a_operator(th, q1), &a_operator(th, q2), &rho(th, q));
            if !lhs.same_as(&rho(th, &(q * &q12)), th) {
                failures.push(format!("translate({i},{j})"));
            }
        }
    }
    Report::exact(
        "condition-b-gluing",
        failures.is_empty(),
        json!({ "failures": failures }),
    )
}

impl<S: Scalar> Blocks<S> {
    pub fn mul_blocks(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a.mul(b))
    }
}

/// Condition (c): as τ = x + iy approaches the real axis, A(τ) converges
/// blockwise to the circle action e^{2πikx}, which is 1-periodic.
pub fn check_boundary_action(th: &TheoryData, tol: f64) -> Report {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let xs = [0.1, 0.37, 0.8];
    let ys = [1e-3, 1e-6, 1e-9];
    let mut last = 0.0f64;
    let mut monotone = true;
    for y in ys {
        let mut dev = 0.0f64;
        for x in xs {
            let q = (two_pi_i * Complex64::new(x, y)).exp();
            let boundary = (two_pi_i * x).exp();
            let shifted = (two_pi_i * (x + 1.0)).exp();
            let a = a_operator(th, &q);
            let circle = a_operator(th, &boundary);
            let periodic = a_operator(th, &shifted);
            dev = dev
                .max(a.deviation(&circle, th))
                .max(circle.deviation(&periodic, th));
        }
        if y < ys[0] && dev > last {
            monotone = false;
        }
        last = dev;
    }
    let status = Status::from_bool(monotone && last <= tol);
    Report::numeric(
        "condition-c-boundary-action",
        tol,
        last,
        json!({ "monotone": monotone, "im_tau": ys }),
    )
    .with_status(status)
}

/// Condition (d): the section τ ↦ λ(ρ(τ)) is equivariant under S and T.
pub fn check_equivariance(section: &SectorSection, samples: &[PointedTorus], tol: f64) -> Report {
    let reports: Vec<_> = [SL2Z::s(), SL2Z::t()]
        .iter()
        .map(|m| check_section_equivariance(section, m, samples, tol))
        .collect();
    let dev = reports.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let status = Status::combine(reports.iter().map(|r| r.status));
    Report::numeric(
        "condition-d-equivariance",
        tol,
        dev,
        serde_json::to_value(&reports).expect("serializable"),
    )
    .with_status(status)
}

/// Conditions (a)–(d) for a single-sector theory (all spin sectors equal).
pub fn verify_conditions(th: &TheoryData, samples: &[PointedTorus], tol: f64) -> Vec<Report> {
    let section = SectorSection::uniform(AnySeries::Int(partition(th)));
    vec![
        check_symmetry(th),
        check_gluing(th),
        check_boundary_action(th, tol),
        check_equivariance(&section, samples, tol),
    ]
}

/// Conditions (a)–(c) on both sectors and (d) on the four-sector section.
pub fn verify_spin_conditions(
    sth: &SpinTheoryData,
    samples: &[PointedTorus],
    tol: f64,
) -> Vec<Report> {
    let mut out = Vec::new();
    for (name, th) in [("plus", &sth.plus_sector), ("minus", &sth.minus_sector)] {
        for mut r in [
            check_symmetry(th),
            check_gluing(th),
            check_boundary_action(th, tol),
        ] {
            r.check = format!("{}/{name}", r.check);
            out.push(r);
        }
    }
    out.push(check_equivariance(&spin_section(sth), samples, tol));
    out
}

/// On-disk form of a spin theory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryFile {
    pub pole: i64,
    pub trunc: i64,
    pub dims: Vec<String>,
    pub sectors: BTreeMap<String, String>,
    pub flip_plus: bool,
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn parse_parity(s: &str) -> Result<Parity, RealizationError> {
    match s {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => Err(RealizationError::Format(format!(
            "grading must be even or odd, got `{other}`"
        ))),
    }
}

impl SpinTheoryData {
    /// Both sectors must share dims to fit the file format.
    pub fn to_file(&self) -> Option<TheoryFile> {
        let (p, m) = (&self.plus_sector, &self.minus_sector);
        if p.dims != m.dims
            || p.pole != m.pole
            || !p.copairing.is_empty()
            || !m.copairing.is_empty()
        {
            return None;
        }
        Some(TheoryFile {
            pole: p.pole,
            trunc: p.trunc,
            dims: p.dims.iter().map(|d| d.to_string()).collect(),
            sectors: [
                ("+".to_string(), parity_name(p.grading).to_string()),
                ("-".to_string(), parity_name(m.grading).to_string()),
            ]
            .into_iter()
            .collect(),
            flip_plus: self.flip_plus,
        })
    }

    pub fn from_file(f: &TheoryFile) -> Result<Self, RealizationError> {
        if f.pole < 0 || f.trunc < -f.pole || f.dims.len() as i64 != f.trunc + f.pole + 1 {
            return Err(RealizationError::Format(format!(
                "need {} dims for the window [-{}, {}], got {}",
                f.trunc + f.pole + 1,
                f.pole,
                f.trunc,
                f.dims.len()
            )));
        }
        let dims = f
            .dims
            .iter()
            .map(|d| {
                d.trim()
                    .parse::<BigUint>()
                    .map_err(|_| RealizationError::Format(format!("bad dimension `{d}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let grading = |key: &str| -> Result<Parity, RealizationError> {
            f.sectors
                .get(key)
                .map_or(Ok(Parity::Even), |s| parse_parity(s))
        };
        let base = TheoryData::new(f.pole, f.trunc, dims);
        Ok(Self {
            plus_sector: base.clone().with_grading(grading("+")?),
            minus_sector: base.with_grading(grading("-")?),
            flip_plus: f.flip_plus,
        })
    }

    pub fn to_json(&self) -> Option<String> {
        self.to_file()
            .map(|f| serde_json::to_string_pretty(&f).expect("serializable"))
    }

    pub fn from_json(text: &str) -> Result<Self, RealizationError> {
        let f: TheoryFile =
            serde_json::from_str(text).map_err(|e| RealizationError::Format(e.to_string()))?;
        Self::from_file(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::j_function;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn constant_series() {
        let th = build_from_series(&QSeries::one(r(5))).unwrap();
        assert_eq!(th.pole(), 0);
        assert_eq!(th.trunc(), 4);
        assert_eq!(th.dim(0), BigUint::from(1u32));
        assert_eq!(th.blocks().count(), 1);
        let rho1 = rho(&th, &GaussRat::from_ratios((1, 3), (0, 1)));
        assert_eq!(
            rho1.get(0),
            Some(&BlockMatrix::Scalar(GaussRat::from_ints(1, 0)))
        );
    }

    #[test]
    fn j_dims() {
        let th = build_from_series(&j_function(9)).unwrap();
        assert_eq!(th.dim(-1), BigUint::from(1u32));
        assert_eq!(th.dim(0), BigUint::from(744u32));
        assert_eq!(th.dim(1), BigUint::from(196884u32));
        let q = Complex64::new(0.01, 0.02);
        let a = a_operator(&th, &q);
        assert_eq!(a.get(1), Some(&BlockMatrix::Scalar(q)));
    }

    #[test]
    fn rejects_negative_coefficients() {
        let f = j_function(3).scale(&BigInt::from(-1));
        let err = build_from_series(&f).unwrap_err();
        assert!(
            matches!(err, RealizationError::NegativeCoefficient { ref exponent, .. } if exponent == "-1")
        );
    }

    #[test]
    fn lambda_is_bilinear_and_orthonormal() {
        let th = TheoryData::new(0, 0, vec![BigUint::from(3u32)]);
        let e = |i: usize, c: GaussRat| -> BlockVector<GaussRat> {
            BTreeMap::from([(0, BTreeMap::from([(i, c)]))])
        };
        let one = GaussRat::from_ints(1, 0);
        assert_eq!(
            lambda_pair(&th, &e(0, one.clone()), &e(0, one.clone())),
            one
        );
        assert_eq!(
            lambda_pair(&th, &e(0, one.clone()), &e(1, one.clone())),
            GaussRat::from_ints(0, 0)
        );
        assert_eq!(
            lambda_pair(&th, &e(0, GaussRat::from_ints(2, 1)), &e(0, one.clone())),
            GaussRat::from_ints(2, 1)
        );
    }

    #[test]
    fn a_operator_semigroup_and_identity_block() {
        let th = build_from_series(&j_function(4)).unwrap();
        let a1 = a_operator(&th, &GaussRat::from_ratios((1, 10), (0, 1)));
        let a2 = a_operator(&th, &GaussRat::from_ratios((1, 5), (0, 1)));
        let a12 = a_operator(&th, &GaussRat::from_ratios((1, 50), (0, 1)));
        assert!(a1.mul_blocks(&a2).same_as(&a12, &th));
        assert_eq!(
            a1.get(0),
            Some(&BlockMatrix::Scalar(GaussRat::from_ints(1, 0)))
        );
    }

    #[test]
    fn asymmetric_fixture_fails_symmetry() {
        let th = TheoryData::new(0, 1, vec![BigUint::from(1u32), BigUint::from(2u32)]);
        let m = vec![
            vec![GaussRat::from_ints(1, 0), GaussRat::from_ints(1, 0)],
            vec![GaussRat::from_ints(0, 0), GaussRat::from_ints(1, 0)],
        ];
        let bad = th.clone().with_copairing_block(1, m);
        assert_eq!(check_symmetry(&th).status, Status::Pass);
        assert_eq!(check_symmetry(&bad).status, Status::Fail);
    }

    #[test]
    fn spin_sign_mechanism() {
        let f = j_function(6);
        let mut sth = SpinTheoryData::uniform(build_from_series(&f).unwrap());
        for s in SpinStructure::ALL {
            assert_eq!(spin_partition(&sth, s), f);
        }
        sth.flip_plus = true;
        let neg = f.scale(&BigInt::from(-1));
        for s in SpinStructure::ALL {
            let want = if s == SpinStructure::PP { &neg } else { &f };
            assert_eq!(&spin_partition(&sth, s), want);
        }
    }

    #[test]
    fn theory_file_round_trip() {
        let mut sth = SpinTheoryData::uniform(build_from_series(&j_function(3)).unwrap());
        sth.flip_plus = true;
        let back = SpinTheoryData::from_json(&sth.to_json().unwrap()).unwrap();
        assert_eq!(back, sth);
        assert!(SpinTheoryData::from_json(
            r#"{"pole":1,"trunc":1,"dims":["1"],"sectors":{},"flip_plus":false}"#
        )
        .is_err());
    }
}
