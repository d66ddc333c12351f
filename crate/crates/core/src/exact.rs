//! Exact scalar types shared across modules: Gaussian rationals and a
//! small `Scalar` abstraction so the same block algebra can run exactly
//! (over ℚ(i)) or numerically (over `Complex64`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{input}`: {reason}")]
pub struct ParseExactError {
    pub input: String,
    pub reason: String,
}

impl ParseExactError {
    fn new(input: &str, reason: impl Into<String>) -> Self {
        Self {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}

/// Parse `"p/q"`, `"p"` or a decimal like `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseExactError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseExactError::new(s, "empty"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| ParseExactError::new(s, "bad numerator"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| ParseExactError::new(s, "bad denominator"))?;
        if d.is_zero() {
            return Err(ParseExactError::new(s, "zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ip_abs = ip.trim().trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_abs.is_empty() {
            BigInt::zero()
        } else {
            ip_abs
                .parse()
                .map_err(|_| ParseExactError::new(s, "bad integer part"))?
        };
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(ParseExactError::new(s, "bad fractional part"));
        }
        let frac: BigInt = if fp.is_empty() {
            BigInt::zero()
        } else {
            fp.parse().unwrap()
        };
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let mag = BigRational::new(whole * &scale + frac, scale);
        return Ok(if neg { -mag } else { mag });
    }
    let n: BigInt = t
        .parse()
        .map_err(|_| ParseExactError::new(s, "not a rational"))?;
    Ok(BigRational::from_integer(n))
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact element of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn from_ratios(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        )
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            k >>= 1;
        }
        Some(acc)
    }

    /// Reduce the real part into `[0, 1)`.
    pub fn reduce_mod_one(&self) -> Self {
        let fl = self.re.floor();
        Self::new(&self.re - fl, self.im.clone())
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        &self + &o
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        &self - &o
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        &self * &o
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl fmt::Display for GaussRat {
    /// Formats as `re+im i`, e.g. `1/3+5/4 i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{}{}{} i",
            rational_to_string(&self.re),
            sign,
            rational_to_string(&self.im.abs())
        )
    }
}

impl FromStr for GaussRat {
    type Err = ParseExactError;

    /// Accepts `a+b i`, `a-b i`, `a`, `b i`, with `a`, `b` of the form `p/q`,
    /// `p` or a finite decimal. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(ParseExactError::new(s, "empty"));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussRat::real(parse_rational(&t)?));
        };
        // split at the last sign that is not the leading character
        let split = body
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (re_s, im_s) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im_s {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other.trim_start_matches('+'))?,
        };
        Ok(GaussRat::new(parse_rational(re_s)?, im))
    }
}

/// Field-like scalars used by the block algebra of realized theories.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn conj(&self) -> Self;
    /// Integer power; `None` when a negative power of zero is requested.
    fn powi(&self, e: i64) -> Option<Self>;
    fn from_u64(n: u64) -> Self;
    fn to_complex(&self) -> Complex64;
}

impl Scalar for GaussRat {
    fn conj(&self) -> Self {
        GaussRat::conj(self)
    }
    fn powi(&self, e: i64) -> Option<Self> {
        self.pow(e)
    }
    fn from_u64(n: u64) -> Self {
        GaussRat::real(BigRational::from_integer(n.into()))
    }
    fn to_complex(&self) -> Complex64 {
        GaussRat::to_complex(self)
    }
}

impl Scalar for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn powi(&self, e: i64) -> Option<Self> {
        if e < 0 && self.norm() == 0.0 {
            return None;
        }
        Some(Complex64::powi(self, e as i32))
    }
    fn from_u64(n: u64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

/// Relative deviation `|a-b| / max(|a|, |b|)`, with values below `floor`
/// in magnitude treated as zero.
pub fn rel_dev(a: Complex64, b: Complex64, floor: f64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale <= floor {
        return 0.0;
    }
    (a - b).norm() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_gaussian_rationals() {
        let t: GaussRat = "1/3+5/4 i".parse().unwrap();
        assert_eq!(t, GaussRat::from_ratios((1, 3), (5, 4)));
        let t: GaussRat = "-1/2-2i".parse().unwrap();
        assert_eq!(t, GaussRat::from_ratios((-1, 2), (-2, 1)));
        let t: GaussRat = "i".parse().unwrap();
        assert_eq!(t, GaussRat::i());
        let t: GaussRat = "0.25".parse().unwrap();
        assert_eq!(t, GaussRat::from_ratios((1, 4), (0, 1)));
        let t: GaussRat = "0.1+1.2i".parse().unwrap();
        assert_eq!(t, GaussRat::from_ratios((1, 10), (6, 5)));
        assert!("1/0+i".parse::<GaussRat>().is_err());
        assert!("abc".parse::<GaussRat>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["1/3+5/4 i", "0-7 i", "-2/5+1 i"] {
            let g: GaussRat = s.parse().unwrap();
            assert_eq!(g.to_string().parse::<GaussRat>().unwrap(), g);
        }
    }

    #[test]
    fn inverse_and_powers() {
        let z = GaussRat::from_ratios((1, 2), (1, 3));
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, GaussRat::one());
        assert_eq!(z.pow(-3).unwrap(), w.pow(3).unwrap());
        assert_eq!(GaussRat::i().pow(4).unwrap(), GaussRat::one());
        assert!(GaussRat::zero().pow(-1).is_none());
    }

    #[test]
    fn reduce_mod_one_keeps_fractional_part() {
        let z = GaussRat::from_ratios((-7, 3), (1, 1));
        assert_eq!(z.reduce_mod_one(), GaussRat::from_ratios((2, 3), (1, 1)));
    }
}
