//! Ring-tagged series and the JSON series file format:
//!
//! ```json
//! { "denom": 24, "prec": "121/24", "ring": "int",
//!   "terms": [[1, "1"], [25, "-1"]] }
//! ```
//!
//! `cyc48` coefficients are arrays of 16 decimal strings (coefficients of
//! 1, ζ, …, ζ¹⁵ with ζ = e^{2πi/48}).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CycInt, QSeries, QSeriesError, Ring, RingTag, CYC_DEGREE};
use crate::exact::{parse_rational, rational_to_string};

/// A series over one of the three supported coefficient rings.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySeries {
    Int(QSeries<BigInt>),
    Rat(QSeries<BigRational>),
    Cyc(QSeries<CycInt>),
}

impl From<QSeries<BigInt>> for AnySeries {
    fn from(s: QSeries<BigInt>) -> Self {
        AnySeries::Int(s)
    }
}

impl From<QSeries<BigRational>> for AnySeries {
    fn from(s: QSeries<BigRational>) -> Self {
        AnySeries::Rat(s)
    }
}

impl From<QSeries<CycInt>> for AnySeries {
    fn from(s: QSeries<CycInt>) -> Self {
        AnySeries::Cyc(s)
    }
}

impl AnySeries {
    pub fn ring(&self) -> RingTag {
        match self {
            AnySeries::Int(_) => RingTag::Int,
            AnySeries::Rat(_) => RingTag::Rat,
            AnySeries::Cyc(_) => RingTag::Cyc48,
        }
    }

    pub fn denom(&self) -> i64 {
        match self {
            AnySeries::Int(s) => s.denom(),
            AnySeries::Rat(s) => s.denom(),
            AnySeries::Cyc(s) => s.denom(),
        }
    }

    pub fn prec(&self) -> Rational64 {
        match self {
            AnySeries::Int(s) => s.prec(),
            AnySeries::Rat(s) => s.prec(),
            AnySeries::Cyc(s) => s.prec(),
        }
    }

    pub fn eval_with_tail(&self, tau: Complex64) -> (Complex64, f64) {
        match self {
            AnySeries::Int(s) => s.eval_with_tail(tau),
            AnySeries::Rat(s) => s.eval_with_tail(tau),
            AnySeries::Cyc(s) => s.eval_with_tail(tau),
        }
    }

    /// Promote into ℤ[ζ₄₈]; rational series with non-integral coefficients
    /// have no such embedding.
    pub fn to_cyc(&self) -> Result<QSeries<CycInt>, QSeriesError> {
        match self {
            AnySeries::Int(s) => Ok(s.to_cyc()),
            AnySeries::Cyc(s) => Ok(s.clone()),
            AnySeries::Rat(s) => {
                let mut terms = Vec::new();
                for (&k, c) in s.raw_terms() {
                    if !c.is_integer() {
                        return Err(QSeriesError::RingMismatch(RingTag::Rat, RingTag::Cyc48));
                    }
                    terms.push((k, CycInt::from_int(c.to_integer())));
                }
                Ok(QSeries::from_terms(s.denom(), s.prec(), terms))
            }
        }
    }

    /// Bring two series to a common ring: ℤ embeds in both ℚ and ℤ[ζ₄₈];
    /// ℚ and ℤ[ζ₄₈] have no common embedding here.
    fn unify(&self, other: &Self) -> Result<(AnySeries, AnySeries), QSeriesError> {
        use AnySeries::*;
        Ok(match (self, other) {
            (Int(_), Int(_)) | (Rat(_), Rat(_)) | (Cyc(_), Cyc(_)) => (self.clone(), other.clone()),
            (Int(a), Rat(_)) => (Rat(a.to_rat()), other.clone()),
            (Rat(_), Int(b)) => (self.clone(), Rat(b.to_rat())),
            (Int(a), Cyc(_)) => (Cyc(a.to_cyc()), other.clone()),
            (Cyc(_), Int(b)) => (self.clone(), Cyc(b.to_cyc())),
            (Rat(_), Cyc(_)) | (Cyc(_), Rat(_)) => {
                return Err(QSeriesError::RingMismatch(self.ring(), other.ring()))
            }
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<AnySeries, QSeriesError> {
        use AnySeries::*;
        Ok(match self.unify(other)? {
            (Int(a), Int(b)) => Int(&a + &b),
            (Rat(a), Rat(b)) => Rat(&a + &b),
            (Cyc(a), Cyc(b)) => Cyc(&a + &b),
            _ => unreachable!("unify returns matching rings"),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<AnySeries, QSeriesError> {
        use AnySeries::*;
        Ok(match self.unify(other)? {
            (Int(a), Int(b)) => Int(&a * &b),
            (Rat(a), Rat(b)) => Rat(&a * &b),
            (Cyc(a), Cyc(b)) => Cyc(&a * &b),
            _ => unreachable!("unify returns matching rings"),
        })
    }

    pub fn to_file(&self) -> SeriesFile {
        fn terms_of<C: Ring>(s: &QSeries<C>, enc: impl Fn(&C) -> Value) -> Vec<(i64, Value)> {
            s.raw_terms().iter().map(|(&k, c)| (k, enc(c))).collect()
        }
        let terms = match self {
            AnySeries::Int(s) => terms_of(s, |c| Value::String(c.to_string())),
            AnySeries::Rat(s) => terms_of(s, |c| Value::String(rational_to_string(c))),
            AnySeries::Cyc(s) => terms_of(s, |c| {
                Value::Array(
                    c.coeffs()
                        .iter()
                        .map(|x| Value::String(x.to_string()))
                        .collect(),
                )
            }),
        };
        let p = self.prec();
        SeriesFile {
            denom: self.denom(),
            prec: if p.is_integer() {
                p.to_integer().to_string()
            } else {
                format!("{}/{}", p.numer(), p.denom())
            },
            ring: self.ring().to_string(),
            terms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("series file serializes")
    }

    pub fn from_json(text: &str) -> Result<AnySeries, SeriesFormatError> {
        let file: SeriesFile =
            serde_json::from_str(text).map_err(|e| SeriesFormatError(e.to_string()))?;
        file.try_into()
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("malformed series file: {0}")]
pub struct SeriesFormatError(pub String);

/// On-disk representation of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub denom: i64,
    pub prec: String,
    pub ring: String,
    pub terms: Vec<(i64, Value)>,
}

fn parse_int(v: &Value) -> Result<BigInt, SeriesFormatError> {
    match v {
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| SeriesFormatError(format!("bad integer `{s}`"))),
        Value::Number(n) if n.is_i64() => Ok(BigInt::from(n.as_i64().unwrap())),
        other => Err(SeriesFormatError(format!(
            "expected integer string, got {other}"
        ))),
    }
}

impl TryFrom<SeriesFile> for AnySeries {
    type Error = SeriesFormatError;

    fn try_from(f: SeriesFile) -> Result<Self, Self::Error> {
        if f.denom <= 0 {
            return Err(SeriesFormatError(format!(
                "denominator must be positive, got {}",
                f.denom
            )));
        }
        let p = parse_rational(&f.prec).map_err(|e| SeriesFormatError(e.to_string()))?;
        let prec = Rational64::new(
            i64::try_from(p.numer()).map_err(|_| SeriesFormatError("prec out of range".into()))?,
            i64::try_from(p.denom()).map_err(|_| SeriesFormatError("prec out of range".into()))?,
        );
        match f.ring.as_str() {
            "int" => {
                let terms = f
                    .terms
                    .iter()
                    .map(|(k, v)| Ok((*k, parse_int(v)?)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(AnySeries::Int(QSeries::from_terms(f.denom, prec, terms)))
            }
            "rat" => {
                let terms = f
                    .terms
                    .iter()
                    .map(|(k, v)| {
                        let s = v.as_str().ok_or_else(|| {
                            SeriesFormatError(format!("expected rational string, got {v}"))
                        })?;
                        Ok((
                            *k,
                            parse_rational(s).map_err(|e| SeriesFormatError(e.to_string()))?,
                        ))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(AnySeries::Rat(QSeries::from_terms(f.denom, prec, terms)))
            }
            "cyc48" => {
                let terms =
                    f.terms
                        .iter()
                        .map(|(k, v)| {
                            let arr = v.as_array().filter(|a| a.len() == CYC_DEGREE).ok_or_else(
                                || SeriesFormatError(format!("expected 16-array, got {v}")),
                            )?;
                            let cs = arr.iter().map(parse_int).collect::<Result<Vec<_>, _>>()?;
                            Ok((*k, CycInt::from_poly(&cs)))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                Ok(AnySeries::Cyc(QSeries::from_terms(f.denom, prec, terms)))
            }
            other => Err(SeriesFormatError(format!("unknown ring `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_and_cyclotomic_do_not_mix() {
        let a = AnySeries::Rat(QSeries::one(Rational64::from_integer(3)));
        let b = AnySeries::Cyc(QSeries::one(Rational64::from_integer(3)));
        assert_eq!(
            a.try_add(&b),
            Err(QSeriesError::RingMismatch(RingTag::Rat, RingTag::Cyc48))
        );
        let c = AnySeries::Int(QSeries::one(Rational64::from_integer(3)));
        assert_eq!(c.try_mul(&b).unwrap().ring(), RingTag::Cyc48);
        assert_eq!(c.try_add(&a).unwrap().ring(), RingTag::Rat);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(AnySeries::from_json(r#"{"denom":0,"prec":"1","ring":"int","terms":[]}"#).is_err());
        assert!(
            AnySeries::from_json(r#"{"denom":1,"prec":"1","ring":"real","terms":[]}"#).is_err()
        );
        assert!(AnySeries::from_json(
            r#"{"denom":1,"prec":"1","ring":"cyc48","terms":[[0,["1"]]]}"#
        )
        .is_err());
        assert!(
            AnySeries::from_json(r#"{"denom":1,"prec":"1/0","ring":"int","terms":[]}"#).is_err()
        );
    }

    #[test]
    fn reads_documented_example() {
        let s = AnySeries::from_json(
            r#"{"denom":24,"prec":"121/24","ring":"int","terms":[[1,"1"],[25,"-1"]]}"#,
        )
        .unwrap();
        let AnySeries::Int(s) = s else { panic!("ring") };
        assert_eq!(s.coeff(Rational64::new(25, 24)), Some(BigInt::from(-1)));
    }

    fn arb_series() -> impl Strategy<Value = AnySeries> {
        let denom = prop_oneof![Just(1i64), Just(2), Just(24), Just(48)];
        (
            denom,
            1i64..20,
            prop::collection::vec((-30i64..60, -1000i64..1000), 0..12),
            any::<bool>(),
        )
            .prop_map(|(d, p, terms, cyc)| {
                let prec = Rational64::new(p, 2);
                let s = QSeries::from_terms(
                    d,
                    prec,
                    terms.into_iter().map(|(k, c)| (k, BigInt::from(c))),
                );
                if cyc {
                    let t = s.to_cyc();
                    let twisted = &t
                        * &QSeries::monomial(
                            Rational64::from_integer(0),
                            CycInt::zeta_pow(5),
                            prec,
                        );
                    AnySeries::Cyc(twisted)
                } else {
                    AnySeries::Int(s)
                }
            })
    }

    proptest! {
        #[test]
        fn json_round_trip(s in arb_series()) {
            let back = AnySeries::from_json(&s.to_json()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
