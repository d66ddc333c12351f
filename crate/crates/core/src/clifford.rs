//! Clifford algebras on the hyperbolic planes H(ℂ_m), their Fock modules,
//! the operators b_m, the four sector series of the free-fermion theory and
//! the T/S periodicity certificate.
//!
//! Scalars are polynomials in a formal symbol x standing for q^m.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::moduli::{
    check_section_equivariance, default_samples, root_of_unity_ratio, PointedTorus, SectorSection,
    Sign, SpinStructure, SL2Z,
};
use crate::qseries::{AnySeries, QSeries};
use crate::report::Status;

/// Polynomial in x with rational coefficients; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(
            c.iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect(),
        )
    }

    pub fn constant(v: i64) -> Self {
        Self::from_ints(&[v])
    }

    /// The symbol x.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.0.iter().map(|c| c * r).collect())
    }

    /// Substitute x ↦ q^m; requires integer coefficients.
    pub fn to_qseries(&self, m: Rational64, prec: Rational64) -> Option<QSeries<BigInt>> {
        let denom = *m.denom();
        let step = *m.numer();
        let terms = self
            .0
            .iter()
            .enumerate()
            .map(|(i, c)| c.is_integer().then(|| (i as i64 * step, c.to_integer())))
            .collect::<Option<Vec<_>>>()?;
        Some(QSeries::from_terms(denom, prec, terms))
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Self::constant(1)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
                        + o.0.get(i).cloned().unwrap_or_else(BigRational::zero)
                })
                .collect(),
        )
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.into_iter().map(|c| -c).collect())
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        self + (-o)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Which isotropic generator kills the vacuum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Generator {
    E,
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// A choice of Clifford relation sign σ in `xy + yx = 2σ·ω(x, y)` with
/// ω(e, f) = 1, vacuum annihilator, and vacuum parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Convention {
    pub sigma: i64,
    pub annihilator: Generator,
    pub vacuum: Parity,
}

impl Convention {
    /// σ = −1, e·v₀ = 0, v₀ odd.
    pub const ADOPTED: Convention = Convention {
        sigma: -1,
        annihilator: Generator::E,
        vacuum: Parity::Odd,
    };

    pub fn all() -> Vec<Convention> {
        let mut v = Vec::new();
        for sigma in [1, -1] {
            for annihilator in [Generator::E, Generator::F] {
                for vacuum in [Parity::Even, Parity::Odd] {
                    v.push(Convention {
                        sigma,
                        annihilator,
                        vacuum,
                    });
                }
            }
        }
        v
    }

    /// Graded-module isomorphism invariant: σ and the parity of ker e.
    pub fn iso_class(&self) -> (i64, Parity) {
        let ker_e = match self.annihilator {
            Generator::E => self.vacuum,
            Generator::F => self.vacuum.flip(),
        };
        (self.sigma, ker_e)
    }
}

/// a·1 + b·e + c·f + d·ef in Cl(H(ℂ_m)) for a fixed relation sign.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElt {
    pub sigma: i64,
    pub coords: [Poly; 4],
}

impl CliffordElt {
    fn basis(sigma: i64, i: usize) -> Self {
        let mut coords: [Poly; 4] = Default::default();
        coords[i] = Poly::one();
        Self { sigma, coords }
    }

    pub fn one(sigma: i64) -> Self {
        Self::basis(sigma, 0)
    }
    pub fn e(sigma: i64) -> Self {
        Self::basis(sigma, 1)
    }
    pub fn f(sigma: i64) -> Self {
        Self::basis(sigma, 2)
    }
    pub fn ef(sigma: i64) -> Self {
        Self::basis(sigma, 3)
    }

    pub fn scale(&self, p: &Poly) -> Self {
        Self {
            sigma: self.sigma,
            coords: self.coords.clone().map(|c| c * p.clone()),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.sigma, o.sigma);
        Self {
            sigma: self.sigma,
            coords: std::array::from_fn(|i| self.coords[i].clone() + o.coords[i].clone()),
        }
    }

    /// Product of basis elements i·j as coordinates on {1, e, f, ef}.
    fn basis_product(sigma: i64, i: usize, j: usize) -> [i64; 4] {
        let s2 = 2 * sigma;
        match (i, j) {
            (0, k) | (k, 0) => {
                let mut v = [0; 4];
                v[k] = 1;
                v
            }
            (1, 1) | (2, 2) | (1, 3) | (3, 2) => [0; 4],
            (1, 2) => [0, 0, 0, 1],
            (2, 1) => [s2, 0, 0, -1],
            (2, 3) => [0, 0, s2, 0],
            (3, 1) => [0, s2, 0, 0],
            (3, 3) => [0, 0, 0, s2],
            _ => unreachable!("basis indices are below 4"),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.sigma, o.sigma);
        let mut coords: [Poly; 4] = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                if self.coords[i].is_zero() || o.coords[j].is_zero() {
                    continue;
                }
                let p = self.coords[i].clone() * o.coords[j].clone();
                for (k, &c) in Self::basis_product(self.sigma, i, j).iter().enumerate() {
                    if c != 0 {
                        coords[k] = coords[k].clone() + p.clone() * Poly::constant(c);
                    }
                }
            }
        }
        Self {
            sigma: self.sigma,
            coords,
        }
    }
}

/// 2×2 matrix over polynomials, acting on the basis (v₀, v₁).
pub type Mat2 = [[Poly; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone()
        })
    })
}

fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].clone() + b[i][j].clone()))
}

fn mat_scale(a: &Mat2, p: &Poly) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].clone() * p.clone()))
}

fn mat_from(entries: [[i64; 2]; 2]) -> Mat2 {
    entries.map(|row| row.map(Poly::constant))
}

/// The 1|1-dimensional Fock module: v₀ is the vacuum, v₁ the other generator
/// applied to it.
#[derive(Clone, Debug, PartialEq)]
pub struct FockModule {
    pub convention: Convention,
    pub e: Mat2,
    pub f: Mat2,
}

impl FockModule {
    pub fn new(convention: Convention) -> Self {
        let s2 = 2 * convention.sigma;
        // columns are images of v0, v1; entry [row][col]
        let kill = mat_from([[0, s2], [0, 0]]);
        let raise = mat_from([[0, 0], [1, 0]]);
        let (e, f) = match convention.annihilator {
            Generator::E => (kill, raise),
            Generator::F => (raise, kill),
        };
        Self { convention, e, f }
    }

    pub fn parities(&self) -> [Parity; 2] {
        [self.convention.vacuum, self.convention.vacuum.flip()]
    }

    pub fn represent(&self, x: &CliffordElt) -> Mat2 {
        let basis = [
            mat_from([[1, 0], [0, 1]]),
            self.e.clone(),
            self.f.clone(),
            mat_mul(&self.e, &self.f),
        ];
        let mut acc = mat_from([[0, 0], [0, 0]]);
        for (b, c) in basis.iter().zip(&x.coords) {
            if !c.is_zero() {
                acc = mat_add(&acc, &mat_scale(b, c));
            }
        }
        acc
    }

    /// e² = 0, f² = 0 and ef + fe = 2σ on the module.
    pub fn clifford_relations_hold(&self) -> bool {
        let zero = mat_from([[0, 0], [0, 0]]);
        let s2 = 2 * self.convention.sigma;
        let anti = mat_add(&mat_mul(&self.e, &self.f), &mat_mul(&self.f, &self.e));
        mat_mul(&self.e, &self.e) == zero
            && mat_mul(&self.f, &self.f) == zero
            && anti == mat_from([[s2, 0], [0, s2]])
    }

    /// e and f are odd: they swap the two parity lines.
    pub fn generators_are_odd(&self) -> bool {
        [&self.e, &self.f]
            .iter()
            .all(|m| m[0][0].is_zero() && m[1][1].is_zero())
    }

    pub fn supertrace(&self, m: &Mat2) -> Poly {
        let [p0, p1] = self.parities();
        m[0][0].clone() * Poly::constant(p0.sign()) + m[1][1].clone() * Poly::constant(p1.sign())
    }

    pub fn trace(&self, m: &Mat2) -> Poly {
        m[0][0].clone() + m[1][1].clone()
    }
}

/// b = 1 + (1 − x)·ef/2 in the algebra with relation sign σ.
pub fn b_element(sigma: i64) -> CliffordElt {
    let half = BigRational::new(1.into(), 2.into());
    let coeff = (Poly::one() - Poly::x()).scale(&half);
    CliffordElt::one(sigma).add(&CliffordElt::ef(sigma).scale(&coeff))
}

/// b_m on the module, with its supertrace and trace.
#[derive(Clone, Debug, PartialEq)]
pub struct BOperator {
    pub m: Rational64,
    pub matrix: Mat2,
    pub parities: [Parity; 2],
    pub supertrace: Poly,
    pub trace: Poly,
}

impl BOperator {
    pub fn is_diagonal(&self) -> bool {
        self.matrix[0][1].is_zero() && self.matrix[1][0].is_zero()
    }
}

pub fn b_operator_with(m: Rational64, convention: Convention) -> BOperator {
    assert!(
        m > Rational64::from_integer(0),
        "mode index must be positive"
    );
    let module = FockModule::new(convention);
    let matrix = module.represent(&b_element(convention.sigma));
    BOperator {
        m,
        supertrace: module.supertrace(&matrix),
        trace: module.trace(&matrix),
        parities: module.parities(),
        matrix,
    }
}

/// b_m under the adopted convention.
pub fn b_operator(m: Rational64) -> BOperator {
    b_operator_with(m, Convention::ADOPTED)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConventionVerdict {
    pub convention: Convention,
    pub iso_class: (i64, Parity),
    pub relations_hold: bool,
    pub supertrace: String,
    pub trace: String,
    pub pass: bool,
}

/// Runs all eight conventions and checks which give str b = 1 − x and
/// tr b = 1 + x.
pub fn convention_oracle() -> Vec<ConventionVerdict> {
    let want_str = Poly::from_ints(&[1, -1]);
    let want_tr = Poly::from_ints(&[1, 1]);
    Convention::all()
        .into_iter()
        .map(|c| {
            let module = FockModule::new(c);
            let b = b_operator_with(Rational64::from_integer(1), c);
            let relations_hold = module.clifford_relations_hold() && module.generators_are_odd();
            ConventionVerdict {
                convention: c,
                iso_class: c.iso_class(),
                relations_hold,
                supertrace: b.supertrace.to_string(),
                trace: b.trace.to_string(),
                pass: relations_hold && b.supertrace == want_str && b.trace == want_tr,
            }
        })
        .collect()
}

/// Isomorphism classes of conventions that pass the oracle.
pub fn passing_classes(verdicts: &[ConventionVerdict]) -> Vec<(i64, Parity)> {
    let mut classes: BTreeMap<(i64, Parity), bool> = BTreeMap::new();
    for v in verdicts {
        let e = classes.entry(v.iso_class).or_insert(true);
        *e &= v.pass;
    }
    classes
        .into_iter()
        .filter(|(_, ok)| *ok)
        .map(|(k, _)| k)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SectorError {
    #[error("degree must be a positive even integer, got {0}")]
    BadDegree(u32),
    #[error(
        "cutoff {cutoff} omits mode {mode}, which contributes below the requested order {prec}"
    )]
    InsufficientCutoff {
        cutoff: Rational64,
        mode: Rational64,
        prec: Rational64,
    },
}

/// Truncated sector partition function of the degree-n free-fermion theory.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorSeries {
    pub spin: SpinStructure,
    pub n: u32,
    pub cutoff: Rational64,
    pub series: QSeries<BigInt>,
}

/// Prefactor exponent: n/24 for s₂ = +, −n/48 for s₂ = −.
pub fn sector_prefactor(s: SpinStructure, n: u32) -> Rational64 {
    match s.s2 {
        Sign::Plus => Rational64::new(n as i64, 24),
        Sign::Minus => Rational64::new(-(n as i64), 48),
    }
}

/// `q^{pre} · z · ∏_{m ≤ M} (str or tr of b_m)^n` over q^{1/48}, where the
/// modes are m ∈ ℕ for s₂ = + and m ∈ ℕ₀ + 1/2 for s₂ = −, s₁ = + takes the
/// supertrace and s₁ = − the trace, and z = 2^{n/2} is the zero-mode trace
/// for (−, +) and 1 otherwise.
pub fn sector_series(
    s: SpinStructure,
    n: u32,
    cutoff: Rational64,
    prec: Rational64,
) -> Result<SectorSeries, SectorError> {
    if n == 0 || n % 2 == 1 {
        return Err(SectorError::BadDegree(n));
    }
    let pre = sector_prefactor(s, n);
    let inner_prec = prec - pre;
    let first = match s.s2 {
        Sign::Plus => Rational64::from_integer(1),
        Sign::Minus => Rational64::new(1, 2),
    };
    let last_kept = ((cutoff - first).floor()) + first;
    let omitted = if cutoff >= first {
        last_kept + 1
    } else {
        first
    };
    if omitted < inner_prec {
        return Err(SectorError::InsufficientCutoff {
            cutoff,
            mode: omitted,
            prec,
        });
    }
    let mut product = QSeries::one(inner_prec).with_denom(48);
    let mut m = first;
    while m <= cutoff && m < inner_prec {
        let b = b_operator(m);
        let factor = match s.s1 {
            Sign::Plus => &b.supertrace,
            Sign::Minus => &b.trace,
        };
        let factor = factor
            .to_qseries(m, inner_prec)
            .expect("b_m traces have integer coefficients");
        product = product.mul_series(&factor);
        m += 1;
    }
    let mut series = product.pow(n).shift(pre);
    if s == SpinStructure::MP {
        series = series.scale(&(BigInt::from(2).pow(n / 2)));
    }
    Ok(SectorSeries {
        spin: s,
        n,
        cutoff,
        series: series.with_denom(48),
    })
}

/// All four sectors as a section with weight n/2 on the ++ sector.
pub fn periodicity_section(
    n: u32,
    cutoff: Rational64,
    prec: Rational64,
) -> Result<SectorSection, SectorError> {
    let mut sectors = BTreeMap::new();
    for s in SpinStructure::ALL {
        sectors.insert(s, AnySeries::Int(sector_series(s, n, cutoff, prec)?.series));
    }
    Ok(SectorSection::new(Rational64::new(n as i64, 2), sectors))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TCheck {
    /// t(sector) is compared with `target`.
    pub sector: String,
    pub target: String,
    /// Exact ratio as `zeta48^j`, or absent if not a root of unity.
    pub ratio: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SCheck {
    pub sector: String,
    pub target: String,
    pub deviation: Option<f64>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicityCertificate {
    pub n: u32,
    pub cutoff: String,
    pub prec: String,
    pub t_checks: Vec<TCheck>,
    pub s_tol: f64,
    pub s_checks: Vec<SCheck>,
    pub pass: bool,
}

fn rat_str(r: Rational64) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact T-checks via `t_transform` and numeric S-checks at `samples`.
pub fn periodicity_certificate_at(
    n: u32,
    cutoff: Rational64,
    prec: Rational64,
    samples: &[PointedTorus],
    tol: f64,
) -> Result<PeriodicityCertificate, SectorError> {
    let section = periodicity_section(n, cutoff, prec)?;
    let pairs = [
        (SpinStructure::PM, SpinStructure::MM),
        (SpinStructure::MM, SpinStructure::PM),
        (SpinStructure::MP, SpinStructure::MP),
        (SpinStructure::PP, SpinStructure::PP),
    ];
    let t_checks = pairs
        .iter()
        .map(|&(s, target)| {
            let a = section
                .get(s)
                .to_cyc()
                .expect("integer series embed")
                .t_transform()
                .expect("denominator 48");
            let b = section.get(target).to_cyc().expect("integer series embed");
            let j = root_of_unity_ratio(&a, &b);
            TCheck {
                sector: s.to_string(),
                target: target.to_string(),
                ratio: j.map(|j| format!("zeta48^{j}")),
                pass: j == Some(0),
            }
        })
        .collect::<Vec<_>>();
    let s_report = check_section_equivariance(&section, &SL2Z::s(), samples, tol);
    let s_checks = s_report
        .sectors
        .iter()
        .map(|c| SCheck {
            sector: c.sector.clone(),
            target: c.target.clone(),
            deviation: c.deviation,
            status: c.status,
        })
        .collect::<Vec<_>>();
    let pass = t_checks.iter().all(|t| t.pass) && s_checks.iter().all(|s| s.status.is_pass());
    Ok(PeriodicityCertificate {
        n,
        cutoff: rat_str(cutoff),
        prec: rat_str(prec),
        t_checks,
        s_tol: tol,
        s_checks,
        pass,
    })
}

pub fn periodicity_certificate(
    n: u32,
    cutoff: Rational64,
    prec: Rational64,
) -> Result<PeriodicityCertificate, SectorError> {
    periodicity_certificate_at(n, cutoff, prec, &default_samples(), 1e-6)
}

/// Exponent j of the T-check ratio ζ₄₈^j for the given sector, if any.
pub fn t_ratio_exponent(cert: &PeriodicityCertificate, sector: &str) -> Option<i64> {
    let t = cert.t_checks.iter().find(|t| t.sector == sector)?;
    t.ratio
        .as_ref()?
        .strip_prefix("zeta48^")?
        .parse::<i64>()
        .ok()
}

/// Numeric value of a polynomial at x = 1.
pub fn poly_at_one(p: &Poly) -> BigRational {
    p.eval(&BigRational::one())
}

/// Convenience: the integer value of a polynomial at x = 1, if integral.
pub fn poly_at_one_int(p: &Poly) -> Option<i64> {
    let v = poly_at_one(p);
    v.is_integer().then(|| v.to_integer().to_i64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn exactly_one_isomorphism_class_passes() {
        let verdicts = convention_oracle();
        assert_eq!(verdicts.len(), 8);
        assert!(verdicts.iter().all(|v| v.relations_hold));
        let passing: Vec<_> = verdicts
            .iter()
            .filter(|v| v.pass)
            .map(|v| v.convention)
            .collect();
        assert_eq!(passing.len(), 2);
        assert_eq!(passing_classes(&verdicts), vec![(-1, Parity::Odd)]);
        assert!(passing.contains(&Convention::ADOPTED));
    }

    #[test]
    fn adopted_b_has_spectrum_x_and_one() {
        let b = b_operator(r(3));
        assert!(b.is_diagonal());
        assert_eq!(b.matrix[0][0], Poly::x());
        assert_eq!(b.matrix[1][1], Poly::one());
        assert_eq!(b.supertrace, Poly::from_ints(&[1, -1]));
        assert_eq!(b.trace, Poly::from_ints(&[1, 1]));
        assert_eq!(poly_at_one_int(&b.supertrace), Some(0));
        assert_eq!(poly_at_one_int(&b.trace), Some(2));
        assert_eq!(poly_at_one_int(&b.matrix[0][0]), Some(1));
    }

    #[test]
    fn naive_sign_gives_two_minus_x() {
        let c = Convention {
            sigma: 1,
            annihilator: Generator::E,
            vacuum: Parity::Odd,
        };
        let b = b_operator_with(r(1), c);
        assert_eq!(b.matrix[0][0], Poly::from_ints(&[2, -1]));
    }

    #[test]
    fn clifford_algebra_is_associative() {
        for sigma in [1, -1] {
            let basis = [
                CliffordElt::one(sigma),
                CliffordElt::e(sigma),
                CliffordElt::f(sigma),
                CliffordElt::ef(sigma),
            ];
            for a in &basis {
                for b in &basis {
                    for c in &basis {
                        assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
                    }
                }
            }
            assert_eq!(
                CliffordElt::e(sigma).mul(&CliffordElt::f(sigma)),
                CliffordElt::ef(sigma)
            );
        }
    }

    #[test]
    fn sector_leading_terms() {
        let s = sector_series(SpinStructure::PM, 24, r(25), r(10)).unwrap();
        assert_eq!(s.series.valuation(), Some(Rational64::new(-1, 2)));
        let pp = sector_series(SpinStructure::PP, 48, r(25), r(20)).unwrap();
        assert_eq!(pp.series.valuation(), Some(r(2)));
        assert_eq!(pp.series.prec(), r(20));
    }

    #[test]
    fn insufficient_cutoff_is_rejected() {
        assert!(matches!(
            sector_series(SpinStructure::PP, 2, r(3), r(10)),
            Err(SectorError::InsufficientCutoff { .. })
        ));
        assert_eq!(
            sector_series(SpinStructure::PP, 3, r(3), r(1)),
            Err(SectorError::BadDegree(3))
        );
    }

    #[test]
    fn t_check_ratios() {
        let c24 = periodicity_certificate(24, r(25), r(20)).unwrap();
        assert!(!c24.pass);
        assert_eq!(t_ratio_exponent(&c24, "+-"), Some(24));
        assert_eq!(t_ratio_exponent(&c24, "--"), Some(24));
        assert_eq!(t_ratio_exponent(&c24, "-+"), Some(0));
        let c2 = periodicity_certificate(2, r(25), r(10)).unwrap();
        assert_eq!(t_ratio_exponent(&c2, "+-"), Some(46));
    }
}
