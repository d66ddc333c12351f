//! Cyclotomic integers ℤ[ζ₄₈] = ℤ[x]/Φ₄₈(x), Φ₄₈(x) = x¹⁶ − x⁸ + 1.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

/// Degree of Φ₄₈.
pub const CYC_DEGREE: usize = 16;
/// Order of the root of unity ζ₄₈.
pub const CYC_ORDER: i64 = 48;

/// An element of ℤ[ζ₄₈], stored as the 16 coefficients of its canonical
/// representative of degree < 16.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    coeffs: [BigInt; CYC_DEGREE],
}

impl CycInt {
    pub fn from_int(n: impl Into<BigInt>) -> Self {
        let mut c = Self::zero();
        c.coeffs[0] = n.into();
        c
    }

    /// Builds an element from an arbitrary-length coefficient list, reducing
    /// modulo Φ₄₈.
    pub fn from_poly(poly: &[BigInt]) -> Self {
        let mut work: Vec<BigInt> = poly.to_vec();
        reduce_in_place(&mut work);
        let mut c = Self::zero();
        for (i, v) in work.into_iter().enumerate().take(CYC_DEGREE) {
            c.coeffs[i] = v;
        }
        c
    }

    /// ζ₄₈^k for any integer k.
    pub fn zeta_pow(k: i64) -> Self {
        let e = k.rem_euclid(CYC_ORDER) as usize;
        let mut poly = vec![BigInt::zero(); e + 1];
        poly[e] = BigInt::one();
        Self::from_poly(&poly)
    }

    pub fn coeffs(&self) -> &[BigInt; CYC_DEGREE] {
        &self.coeffs
    }

    /// `Some(n)` when the element lies in the rational subring ℤ.
    pub fn as_integer(&self) -> Option<&BigInt> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// `Some(k)` with `self == ζ^k` (k in 0..48).
    pub fn as_root_of_unity(&self) -> Option<i64> {
        (0..CYC_ORDER).find(|&k| *self == Self::zeta_pow(k))
    }

    pub fn to_complex(&self) -> Complex64 {
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / CYC_ORDER as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += p * c.to_f64().unwrap_or(f64::NAN);
            p *= zeta;
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= k;
        }
        out
    }
}

/// Reduce with x¹⁶ ≡ x⁸ − 1, from the top down.
fn reduce_in_place(work: &mut Vec<BigInt>) {
    while work.len() > CYC_DEGREE {
        let top = work.len() - 1;
        let c = work.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let shift = top - CYC_DEGREE;
        work[shift + 8] += &c;
        work[shift] -= c;
    }
}

impl Zero for CycInt {
    fn zero() -> Self {
        Self {
            coeffs: std::array::from_fn(|_| BigInt::zero()),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for CycInt {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl<'a> Add<&'a CycInt> for &'a CycInt {
    type Output = CycInt;
    fn add(self, o: &CycInt) -> CycInt {
        CycInt {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] + &o.coeffs[i]),
        }
    }
}

impl Add for CycInt {
    type Output = CycInt;
    fn add(self, o: CycInt) -> CycInt {
        &self + &o
    }
}

impl<'a> Sub<&'a CycInt> for &'a CycInt {
    type Output = CycInt;
    fn sub(self, o: &CycInt) -> CycInt {
        CycInt {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] - &o.coeffs[i]),
        }
    }
}

impl Neg for CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt {
            coeffs: self.coeffs.map(|c| -c),
        }
    }
}

impl<'a> Mul<&'a CycInt> for &'a CycInt {
    type Output = CycInt;
    fn mul(self, o: &CycInt) -> CycInt {
        let mut work = vec![BigInt::zero(); 2 * CYC_DEGREE - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    work[i + j] += a * b;
                }
            }
        }
        CycInt::from_poly(&work)
    }
}

impl Mul for CycInt {
    type Output = CycInt;
    fn mul(self, o: CycInt) -> CycInt {
        &self * &o
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt({self})")
    }
}

impl fmt::Display for CycInt {
    /// Polynomial notation in `z` = ζ₄₈, e.g. `1 - z^8`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &BigInt::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag}*z")?,
                (_, true) => write!(f, "z^{i}")?,
                (_, false) => write!(f, "{mag}*z^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_48_is_one_and_zeta_24_is_minus_one() {
        assert_eq!(CycInt::zeta_pow(48), CycInt::one());
        assert_eq!(CycInt::zeta_pow(24), CycInt::from_int(-1));
        assert_eq!(CycInt::zeta_pow(-24), CycInt::from_int(-1));
        // x^24 = x^8 * x^16 ≡ x^8 (x^8 - 1) = x^16 - x^8 ≡ -1
        let mut x24 = vec![BigInt::zero(); 25];
        x24[24] = BigInt::one();
        assert_eq!(CycInt::from_poly(&x24), CycInt::from_int(-1));
    }

    #[test]
    fn zeta_powers_multiply() {
        for a in -50..50 {
            for b in [-7, 0, 3, 31, 47] {
                assert_eq!(
                    CycInt::zeta_pow(a) * CycInt::zeta_pow(b),
                    CycInt::zeta_pow(a + b)
                );
            }
        }
    }

    #[test]
    fn primitive_root_identification() {
        assert_eq!(CycInt::zeta_pow(-2).as_root_of_unity(), Some(46));
        assert_eq!(CycInt::from_int(2).as_root_of_unity(), None);
    }

    #[test]
    fn complex_embedding_matches() {
        let z = CycInt::zeta_pow(5);
        let expect = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 5.0 / 48.0);
        assert!((z.to_complex() - expect).norm() < 1e-12);
        let w = &CycInt::zeta_pow(20) * &CycInt::from_int(3);
        let expect = Complex64::from_polar(3.0, 2.0 * std::f64::consts::PI * 20.0 / 48.0);
        assert!((w.to_complex() - expect).norm() < 1e-12);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(CycInt::zeta_pow(16).to_string(), "-1 + z^8");
        assert_eq!(CycInt::from_int(-1).to_string(), "-1");
    }
}
