//! Truncated Laurent series in fractional powers of q with exact coefficients.
//!
//! A [`QSeries`] stores the coefficients of `q^(k/N)` for a fixed positive
//! denominator `N`, together with a rational truncation order `prec`: every
//! exponent at or beyond `prec` is unknown. Arithmetic propagates `prec`
//! conservatively, so no operation ever reports a term it cannot know.

mod cyclotomic;
mod format;

pub use cyclotomic::{CycInt, CYC_DEGREE, CYC_ORDER};
pub use format::{AnySeries, SeriesFile, SeriesFormatError};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("leading coefficient {0} is not a unit")]
    NonUnitLeading(String),
    #[error("cannot invert a series with no known nonzero term")]
    ZeroSeries,
    #[error("exponent scale factor must be positive, got {0}")]
    BadScale(Rational64),
    #[error("ring mismatch: no embedding between {0} and {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("denominator {0} does not divide 48")]
    DenomNotDividing48(i64),
    #[error("coefficient {0} does not lie in the target ring")]
    NotRepresentable(String),
}

/// Coefficient ring of a series, as recorded in the series file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingTag {
    Int,
    Rat,
    Cyc48,
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RingTag::Int => "int",
            RingTag::Rat => "rat",
            RingTag::Cyc48 => "cyc48",
        })
    }
}

/// Exact coefficient rings a [`QSeries`] may carry.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const TAG: RingTag;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn from_int(n: &BigInt) -> Self;
    fn try_inv(&self) -> Option<Self>;
    fn to_complex(&self) -> Complex64;
}

impl Ring for BigInt {
    const TAG: RingTag = RingTag::Int;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_int(n: &BigInt) -> Self {
        n.clone()
    }
    fn try_inv(&self) -> Option<Self> {
        (self.abs().is_one()).then(|| self.clone())
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Ring for BigRational {
    const TAG: RingTag = RingTag::Rat;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_int(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn try_inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Ring for CycInt {
    const TAG: RingTag = RingTag::Cyc48;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_int(n: &BigInt) -> Self {
        CycInt::from_int(n.clone())
    }
    /// Only roots of unity (which include ±1) are inverted; other units of
    /// ℤ[ζ₄₈] are reported as non-units.
    fn try_inv(&self) -> Option<Self> {
        self.as_root_of_unity().map(|k| CycInt::zeta_pow(-k))
    }
    fn to_complex(&self) -> Complex64 {
        CycInt::to_complex(self)
    }
}

/// `ceil(prec * denom)`: keys `k` with `k < limit` are known.
fn key_limit(prec: Rational64, denom: i64) -> i64 {
    (prec * Rational64::from_integer(denom)).ceil().to_integer()
}

/// Truncated Laurent series `Σ c_k q^(k/denom) + O(q^prec)`.
#[derive(Clone, PartialEq)]
pub struct QSeries<C> {
    denom: i64,
    terms: BTreeMap<i64, C>,
    prec: Rational64,
}

impl<C: Ring> QSeries<C> {
    /// The zero series `O(q^prec)` over `q^(1/denom)`.
    pub fn zero(denom: i64, prec: Rational64) -> Self {
        assert!(denom > 0, "series denominator must be positive");
        Self {
            denom,
            terms: BTreeMap::new(),
            prec,
        }
    }

    pub fn from_terms(
        denom: i64,
        prec: Rational64,
        terms: impl IntoIterator<Item = (i64, C)>,
    ) -> Self {
        let mut s = Self::zero(denom, prec);
        let limit = key_limit(prec, denom);
        for (k, c) in terms {
            if k < limit && !c.is_zero() {
                let entry = s.terms.entry(k).or_insert_with(C::zero);
                *entry = entry.add(&c);
                if entry.is_zero() {
                    s.terms.remove(&k);
                }
            }
        }
        s
    }

    /// Dense integer-exponent constructor: `coeffs[i]` multiplies `q^(start + i)`.
    pub fn from_coeffs(start: i64, prec: i64, coeffs: impl IntoIterator<Item = C>) -> Self {
        Self::from_terms(
            1,
            Rational64::from_integer(prec),
            coeffs
                .into_iter()
                .enumerate()
                .map(|(i, c)| (start + i as i64, c)),
        )
    }

    pub fn monomial(exponent: Rational64, coeff: C, prec: Rational64) -> Self {
        let denom = *exponent.denom();
        Self::from_terms(denom, prec, [(*exponent.numer(), coeff)])
    }

    pub fn constant(coeff: C, prec: Rational64) -> Self {
        Self::from_terms(1, prec, [(0, coeff)])
    }

    pub fn one(prec: Rational64) -> Self {
        Self::constant(C::one(), prec)
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn prec(&self) -> Rational64 {
        self.prec
    }

    pub fn ring(&self) -> RingTag {
        C::TAG
    }

    /// Raw `(k, coefficient)` pairs, meaning `coefficient * q^(k/denom)`.
    pub fn raw_terms(&self) -> &BTreeMap<i64, C> {
        &self.terms
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational64, &C)> + '_ {
        self.terms
            .iter()
            .map(move |(&k, c)| (Rational64::new(k, self.denom), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `q^exponent`, or `None` if the exponent lies at or
    /// beyond the truncation order.
    pub fn coeff(&self, exponent: Rational64) -> Option<C> {
        if exponent >= self.prec {
            return None;
        }
        let scaled = exponent * Rational64::from_integer(self.denom);
        if !scaled.is_integer() {
            return Some(C::zero());
        }
        Some(
            self.terms
                .get(&scaled.to_integer())
                .cloned()
                .unwrap_or_else(C::zero),
        )
    }

    /// Coefficient of the integer power `q^n`.
    pub fn coeff_int(&self, n: i64) -> Option<C> {
        self.coeff(Rational64::from_integer(n))
    }

    /// Lowest exponent with a nonzero known coefficient.
    pub fn valuation(&self) -> Option<Rational64> {
        self.terms
            .keys()
            .next()
            .map(|&k| Rational64::new(k, self.denom))
    }

    /// Valuation, or `prec` for a series with no known nonzero term.
    fn effective_valuation(&self) -> Rational64 {
        self.valuation().unwrap_or(self.prec)
    }

    /// Re-express over `q^(1/new_denom)`; `new_denom` must be a multiple of
    /// the current denominator.
    pub fn with_denom(&self, new_denom: i64) -> Self {
        assert!(
            new_denom % self.denom == 0,
            "denominator {new_denom} is not a multiple of {}",
            self.denom
        );
        let f = new_denom / self.denom;
        Self {
            denom: new_denom,
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k * f, c.clone()))
                .collect(),
            prec: self.prec,
        }
    }

    /// Forget every term at or beyond `prec` (which may only decrease).
    pub fn truncate(&self, prec: Rational64) -> Self {
        let prec = prec.min(self.prec);
        Self::from_terms(
            self.denom,
            prec,
            self.terms.iter().map(|(&k, c)| (k, c.clone())),
        )
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let n = a.denom.lcm(&b.denom);
        (a.with_denom(n), b.with_denom(n))
    }

    /// Sum, truncated at the smaller of the two precisions.
    pub fn add_series(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let prec = a.prec.min(b.prec);
        Self::from_terms(a.denom, prec, a.terms.into_iter().chain(b.terms))
    }

    /// Product. The result precision is `min(pa + vb, pb + va)`, clipped to
    /// `min(pa, pb)`, where `v` is the valuation.
    pub fn mul_series(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let prec = [
            a.prec,
            b.prec,
            a.prec + b.effective_valuation(),
            b.prec + a.effective_valuation(),
        ]
        .into_iter()
        .min()
        .unwrap();
        let limit = key_limit(prec, a.denom);
        let mut out: BTreeMap<i64, C> = BTreeMap::new();
        for (&ka, ca) in &a.terms {
            for (&kb, cb) in &b.terms {
                let k = ka + kb;
                if k >= limit {
                    break;
                }
                let p = ca.mul(cb);
                let e = out.entry(k).or_insert_with(C::zero);
                *e = e.add(&p);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self {
            denom: a.denom,
            terms: out,
            prec,
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(
            self.denom,
            self.prec,
            self.terms.iter().map(|(&k, v)| (k, v.mul(c))),
        )
    }

    /// Multiply by `q^exponent`; the precision shifts along.
    pub fn shift(&self, exponent: Rational64) -> Self {
        let n = self.denom.lcm(exponent.denom());
        let s = self.with_denom(n);
        let dk = (exponent * Rational64::from_integer(n)).to_integer();
        Self {
            denom: n,
            terms: s.terms.into_iter().map(|(k, c)| (k + dk, c)).collect(),
            prec: self.prec + exponent,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            return Self::one(self.prec - self.effective_valuation()).with_denom(self.denom);
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = n;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul_series(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul_series(&base);
        }
        result.expect("n > 0")
    }

    /// Multiplicative inverse. Requires the lowest known coefficient to be a
    /// unit; the result is known up to `prec - 2 * valuation`.
    pub fn inv(&self) -> Result<Self, QSeriesError> {
        let (&kv, lead) = self.terms.iter().next().ok_or(QSeriesError::ZeroSeries)?;
        let lead_inv = lead
            .try_inv()
            .ok_or_else(|| QSeriesError::NonUnitLeading(lead.to_string()))?;
        let v = Rational64::new(kv, self.denom);
        let prec = self.prec - v - v;
        let limit = key_limit(prec, self.denom);
        // result keys run from -kv up to limit - 1
        let count = (limit + kv).max(0) as usize;
        let b: Vec<C> = (0..count as i64)
            .map(|i| self.terms.get(&(kv + i)).cloned().unwrap_or_else(C::zero))
            .collect();
        let mut d: Vec<C> = Vec::with_capacity(count);
        for n in 0..count {
            if n == 0 {
                d.push(lead_inv.clone());
                continue;
            }
            let mut acc = C::zero();
            for i in 1..=n {
                if !b[i].is_zero() && !d[n - i].is_zero() {
                    acc = acc.add(&b[i].mul(&d[n - i]));
                }
            }
            d.push(acc.mul(&lead_inv).neg());
        }
        Ok(Self::from_terms(
            self.denom,
            prec,
            d.into_iter().enumerate().map(|(n, c)| (n as i64 - kv, c)),
        ))
    }

    /// Substitute `q -> q^r` for a positive rational `r`: every exponent `e`
    /// becomes `r * e` and the denominator is multiplied by `denom(r)`.
    pub fn scale_exponent(&self, r: Rational64) -> Result<Self, QSeriesError> {
        if r <= Rational64::from_integer(0) {
            return Err(QSeriesError::BadScale(r));
        }
        let (u, v) = (*r.numer(), *r.denom());
        Ok(Self {
            denom: self.denom * v,
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k * u, c.clone()))
                .collect(),
            prec: self.prec * r,
        })
    }

    pub fn map_ring<D: Ring>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        QSeries::from_terms(
            self.denom,
            self.prec,
            self.terms.iter().map(|(&k, c)| (k, f(c))),
        )
    }

    /// Numerical value at `tau`, summing `c * exp(2πi tau e)` over known terms.
    pub fn eval(&self, tau: Complex64) -> Complex64 {
        self.eval_with_tail(tau).0
    }

    /// Value at `tau` together with the largest term magnitude among exponents
    /// in `[prec - 1, prec)`, a proxy for the truncation error.
    pub fn eval_with_tail(&self, tau: Complex64) -> (Complex64, f64) {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let tail_from = key_limit(self.prec - Rational64::from_integer(1), self.denom);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut tail = 0.0f64;
        for (&k, c) in &self.terms {
            let e = k as f64 / self.denom as f64;
            let t = c.to_complex() * (two_pi_i * tau * e).exp();
            if k >= tail_from {
                tail = tail.max(t.norm());
            }
            acc += t;
        }
        (acc, tail)
    }

    /// True when every stored exponent is an integer.
    pub fn has_integer_exponents(&self) -> bool {
        self.terms.keys().all(|k| k % self.denom == 0)
    }

    /// Equality of the known coefficients below `prec`, ignoring the stored
    /// truncation orders.
    pub fn agrees_below(&self, other: &Self, prec: Rational64) -> bool {
        let (a, b) = Self::common(&self.truncate(prec), &other.truncate(prec));
        a.terms == b.terms
    }
}

impl QSeries<BigInt> {
    pub fn to_cyc(&self) -> QSeries<CycInt> {
        self.map_ring(|c| CycInt::from_int(c.clone()))
    }

    pub fn to_rat(&self) -> QSeries<BigRational> {
        self.map_ring(|c| BigRational::from_integer(c.clone()))
    }

    /// Exact division by an integer; fails if some coefficient is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Result<Self, QSeriesError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (&k, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !Zero::is_zero(&r) {
                return Err(QSeriesError::NotRepresentable(format!("{c}/{d}")));
            }
            terms.push((k, q));
        }
        Ok(Self::from_terms(self.denom, self.prec, terms))
    }
}

impl QSeries<CycInt> {
    /// The substitution τ ↦ τ+1 on a series in `q^(1/48)`: the coefficient of
    /// `q^(k/48)` is multiplied by ζ₄₈^k.
    pub fn t_transform(&self) -> Result<Self, QSeriesError> {
        if CYC_ORDER % self.denom != 0 {
            return Err(QSeriesError::DenomNotDividing48(self.denom));
        }
        let s = self.with_denom(CYC_ORDER);
        Ok(Self::from_terms(
            CYC_ORDER,
            s.prec,
            s.terms.iter().map(|(&k, c)| (k, c * &CycInt::zeta_pow(k))),
        ))
    }

    /// Back to integer coefficients when every coefficient is rational.
    pub fn to_int(&self) -> Option<QSeries<BigInt>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (&k, c) in &self.terms {
            terms.push((k, c.as_integer()?.clone()));
        }
        Some(QSeries::from_terms(self.denom, self.prec, terms))
    }
}

impl<C: Ring> fmt::Debug for QSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Ring> fmt::Display for QSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let exp = if e.is_integer() {
                e.to_integer().to_string()
            } else {
                e.to_string()
            };
            write!(f, "({c})*q^{exp}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.prec)
    }
}

impl<'a, C: Ring> Add<&'a QSeries<C>> for &'a QSeries<C> {
    type Output = QSeries<C>;
    fn add(self, o: &QSeries<C>) -> QSeries<C> {
        self.add_series(o)
    }
}

impl<'a, C: Ring> Sub<&'a QSeries<C>> for &'a QSeries<C> {
    type Output = QSeries<C>;
    fn sub(self, o: &QSeries<C>) -> QSeries<C> {
        self.add_series(&-o)
    }
}

impl<'a, C: Ring> Mul<&'a QSeries<C>> for &'a QSeries<C> {
    type Output = QSeries<C>;
    fn mul(self, o: &QSeries<C>) -> QSeries<C> {
        self.mul_series(o)
    }
}

impl<C: Ring> Neg for &QSeries<C> {
    type Output = QSeries<C>;
    fn neg(self) -> QSeries<C> {
        QSeries {
            denom: self.denom,
            terms: self.terms.iter().map(|(&k, c)| (k, c.neg())).collect(),
            prec: self.prec,
        }
    }
}
