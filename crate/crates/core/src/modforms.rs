//! Eisenstein series, the discriminant, j and the Dedekind eta function as
//! exact integer q-series.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::qseries::QSeries;

pub type IntSeries = QSeries<BigInt>;

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// σ_k(n) = Σ_{d | n} d^k.
pub fn sigma(k: u32, n: u64) -> BigInt {
    assert!(n >= 1, "sigma is defined for n >= 1");
    let mut total = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                total += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    total
}

fn eisenstein(prec: i64, k: u32, factor: i64) -> IntSeries {
    assert!(prec >= 1, "Eisenstein series need prec >= 1");
    let coeffs = (0..prec).map(|n| {
        if n == 0 {
            BigInt::one()
        } else {
            sigma(k, n as u64) * factor
        }
    });
    QSeries::from_coeffs(0, prec, coeffs)
}

/// c₄ = 1 + 240 Σ σ₃(k) q^k, known below `q^prec`.
pub fn c4(prec: i64) -> IntSeries {
    eisenstein(prec, 3, 240)
}

/// c₆ = 1 − 504 Σ σ₅(k) q^k, known below `q^prec`.
pub fn c6(prec: i64) -> IntSeries {
    eisenstein(prec, 5, -504)
}

/// ∏_{m ∈ start + ℕ₀, m < prec} (1 + sign·q^m)^power over the denominator of
/// `start`. `start` must be positive.
pub fn product_series(start: Rational64, sign: i64, power: u32, prec: Rational64) -> IntSeries {
    assert!(start > r(0), "product must start at a positive exponent");
    assert!(sign == 1 || sign == -1);
    let denom = *start.denom();
    let mut acc = IntSeries::one(prec).with_denom(denom);
    let mut m = start;
    while m < prec {
        let factor = QSeries::from_terms(
            denom,
            prec,
            [
                (0, BigInt::one()),
                (*(m * r(denom)).numer(), BigInt::from(sign)),
            ],
        );
        acc = acc.mul_series(&factor);
        m += r(1);
    }
    acc.pow(power)
}

/// η = q^{1/24} ∏_{m≥1} (1 − q^m), over q^{1/24}, known below `q^prec`.
pub fn eta(prec: Rational64) -> IntSeries {
    let shift = Rational64::new(1, 24);
    assert!(prec >= shift, "eta needs prec >= 1/24");
    product_series(r(1), -1, 1, prec - shift)
        .with_denom(24)
        .shift(shift)
}

/// q ∏ (1 − q^m)^24, the product form of Δ.
fn delta_product(prec: i64) -> IntSeries {
    product_series(r(1), -1, 24, r(prec - 1)).shift(r(1))
}

/// Δ = (c₄³ − c₆²)/1728, cross-checked against the product formula.
///
/// Panics if the two routes disagree or the quotient is not integral; either
/// indicates an arithmetic bug.
pub fn delta(prec: i64) -> IntSeries {
    assert!(prec >= 1, "delta needs prec >= 1");
    let a = c4(prec).pow(3);
    let b = c6(prec).pow(2);
    let d = (&a - &b)
        .div_exact(&BigInt::from(1728))
        .expect("c4^3 - c6^2 is divisible by 1728");
    assert_eq!(
        d,
        delta_product(prec),
        "Eisenstein and product routes to delta disagree"
    );
    d
}

/// Δ⁻¹, known below `q^prec`.
pub fn delta_inv(prec: i64) -> IntSeries {
    assert!(prec >= -1, "delta_inv needs prec >= -1");
    delta(prec + 2)
        .inv()
        .expect("delta has unit leading coefficient")
}

/// j = c₄³/Δ, known below `q^prec`.
pub fn j_function(prec: i64) -> IntSeries {
    c4(prec + 1).pow(3).mul_series(&delta_inv(prec))
}

/// f = Σ c_n jⁿ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularFunctionSpec {
    pub j_poly: Vec<BigInt>,
}

impl ModularFunctionSpec {
    pub fn new(j_poly: Vec<BigInt>) -> Self {
        Self { j_poly }
    }

    /// Parses a comma-separated coefficient list such as `"0,1"`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let j_poly = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<BigInt>()
                    .map_err(|_| format!("bad integer coefficient `{}`", s.trim()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { j_poly })
    }

    /// Highest n with c_n ≠ 0, which is also the pole order; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.j_poly.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }
}

/// Σ c_n jⁿ as an exact Laurent series known below `q^prec`.
pub fn eval_mf_spec(spec: &ModularFunctionSpec, prec: i64) -> IntSeries {
    let Some(d) = spec.degree() else {
        return IntSeries::zero(1, r(prec));
    };
    let j = j_function(prec + d.max(1) as i64 - 1);
    let mut acc = IntSeries::zero(1, r(prec));
    let mut power = IntSeries::one(r(prec + d as i64));
    for c in spec.j_poly.iter().take(d + 1) {
        if !c.is_zero() {
            acc = acc.add_series(&power.scale(c));
        }
        power = power.mul_series(&j);
    }
    acc.truncate(r(prec))
}

/// True when every coefficient is ≥ 0.
pub fn is_nonnegative(s: &IntSeries) -> bool {
    s.raw_terms().values().all(|c| !c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn coeffs(s: &IntSeries, from: i64, to: i64) -> Vec<BigInt> {
        (from..to)
            .map(|n| s.coeff_int(n).expect("within prec"))
            .collect()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(3, 1), BigInt::from(1));
        assert_eq!(sigma(3, 2), BigInt::from(9));
        assert_eq!(sigma(5, 2), BigInt::from(33));
        assert_eq!(sigma(1, 12), BigInt::from(28));
    }

    #[test]
    fn eisenstein_leading_terms() {
        assert_eq!(coeffs(&c4(3), 0, 3), ints(&[1, 240, 2160]));
        assert_eq!(coeffs(&c6(2), 0, 2), ints(&[1, -504]));
    }

    #[test]
    fn delta_and_inverse() {
        assert_eq!(coeffs(&delta(4), 0, 4), ints(&[0, 1, -24, 252]));
        let di = delta_inv(3);
        assert_eq!(di.valuation(), Some(r(-1)));
        assert_eq!(coeffs(&di, -1, 3), ints(&[1, 24, 324, 3200]));
        let one = delta(10).mul_series(&delta_inv(10));
        assert!(one.agrees_below(&IntSeries::one(r(8)), r(8)));
    }

    #[test]
    fn j_leading_terms() {
        let j = j_function(2);
        assert_eq!(j.prec(), r(2));
        assert_eq!(coeffs(&j, -1, 2), ints(&[1, 744, 196884]));
    }

    #[test]
    fn eta_leading_terms() {
        let e = eta(r(3));
        assert_eq!(e.denom(), 24);
        assert_eq!(e.valuation(), Some(Rational64::new(1, 24)));
        assert_eq!(e.coeff(Rational64::new(25, 24)), Some(BigInt::from(-1)));
        assert_eq!(e.coeff(Rational64::new(49, 24)), Some(BigInt::from(-1)));
        assert_eq!(e.coeff(Rational64::new(73, 24)), None);
    }

    #[test]
    fn eta_24_is_delta() {
        let e24 = eta(r(12)).pow(24);
        assert!(e24.agrees_below(&delta(12), r(12)));
    }

    #[test]
    fn mf_spec_evaluation() {
        let zero = eval_mf_spec(&ModularFunctionSpec::parse("0").unwrap(), 5);
        assert!(zero.is_empty());
        let j = eval_mf_spec(&ModularFunctionSpec::parse("0,1").unwrap(), 5);
        assert_eq!(j, j_function(5));
        let k = eval_mf_spec(&ModularFunctionSpec::parse("744,-1").unwrap(), 5);
        assert_eq!(k.coeff_int(0), Some(BigInt::zero()));
        assert_eq!(k.coeff_int(-1), Some(BigInt::from(-1)));
        let j2 = eval_mf_spec(&ModularFunctionSpec::parse("0,0,1").unwrap(), 3);
        assert_eq!(j2.prec(), r(3));
        assert_eq!(j2.valuation(), Some(r(-2)));
        assert_eq!(coeffs(&j2, -2, 1), ints(&[1, 1488, 744 * 744 + 2 * 196884]));
    }
}
