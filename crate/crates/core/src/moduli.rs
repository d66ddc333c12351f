//! SL₂(ℤ) acting on pointed tori and on spin structures, and equivariance
//! checks for four-sector partition sections.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{rel_dev, GaussRat};
use crate::qseries::{AnySeries, CycInt, QSeries, SeriesFile, CYC_ORDER};
use crate::report::Status;

/// An integer matrix (a b; c d) with ad − bc = 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SL2Z {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl SL2Z {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Option<Self> {
        let m = Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        };
        (&m.a * &m.d - &m.b * &m.c == BigInt::one()).then_some(m)
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1).unwrap()
    }

    /// S = (0 −1; 1 0).
    pub fn s() -> Self {
        Self::new(0, -1, 1, 0).unwrap()
    }

    /// T = (1 1; 0 1).
    pub fn t() -> Self {
        Self::new(1, 1, 0, 1).unwrap()
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    /// A random element with lower row entries bounded by `bound` in absolute
    /// value (the upper row is then shifted by a random multiple of it).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Self {
        assert!(bound >= 1);
        loop {
            let c: i64 = rng.gen_range(-bound..=bound);
            let d: i64 = rng.gen_range(-bound..=bound);
            let g = BigInt::from(c).extended_gcd(&BigInt::from(d));
            if !g.gcd.is_one() {
                continue;
            }
            // x c + y d = 1, so (a, b) = (y, −x) gives ad − bc = 1
            let t: i64 = rng.gen_range(-bound..=bound);
            let a = g.y + BigInt::from(t * c);
            let b = -g.x + BigInt::from(t * d);
            return Self::new(a, b, c, d).expect("constructed with determinant 1");
        }
    }

    /// A random word of the given length in S, T and T⁻¹.
    pub fn random_word<R: Rng + ?Sized>(rng: &mut R, len: usize) -> (Vec<char>, Self) {
        let mut word = Vec::with_capacity(len);
        let mut m = Self::identity();
        for _ in 0..len {
            let (ch, g) = match rng.gen_range(0..3) {
                0 => ('S', Self::s()),
                1 => ('T', Self::t()),
                _ => ('t', Self::t().inverse()),
            };
            word.push(ch);
            m = m.mul(&g);
        }
        (word, m)
    }

    fn cd_f64(&self) -> (f64, f64) {
        (
            self.c.to_f64().unwrap_or(f64::NAN),
            self.d.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Möbius action on a complex point.
    pub fn mobius(&self, tau: Complex64) -> Complex64 {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        (tau * f(&self.a) + f(&self.b)) / (tau * f(&self.c) + f(&self.d))
    }

    /// Exact Möbius action on a Gaussian rational in the upper half-plane.
    pub fn mobius_exact(&self, tau: &GaussRat) -> GaussRat {
        let g = |x: &BigInt| GaussRat::real(x.clone().into());
        let num = &(tau * &g(&self.a)) + &g(&self.b);
        let den = &(tau * &g(&self.c)) + &g(&self.d);
        &num * &den
            .inv()
            .expect("c tau + d is nonzero on the upper half-plane")
    }

    /// cτ + d.
    pub fn automorphy(&self, tau: Complex64) -> Complex64 {
        let (c, d) = self.cd_f64();
        tau * c + d
    }
}

impl fmt::Display for SL2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for SL2Z {
    type Err = String;

    /// Parses `a,b,c,d`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<BigInt>()
                    .map_err(|_| format!("bad matrix entry `{}`", p.trim()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let [a, b, c, d]: [BigInt; 4] = parts
            .try_into()
            .map_err(|_| "matrix needs four entries a,b,c,d".to_string())?;
        Self::new(a, b, c, d).ok_or_else(|| "matrix must have determinant 1".to_string())
    }
}

/// A torus of scale ℓ with modular parameter τ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointedTorus {
    pub ell: f64,
    pub tau: Complex64,
}

impl PointedTorus {
    pub fn new(ell: f64, tau: Complex64) -> Option<Self> {
        (ell > 0.0 && tau.im > 0.0).then_some(Self { ell, tau })
    }
}

/// (ℓ, τ) ↦ (ℓ|cτ+d|, (aτ+b)/(cτ+d)).
pub fn act_torus(m: &SL2Z, t: &PointedTorus) -> PointedTorus {
    PointedTorus {
        ell: t.ell * m.automorphy(t.tau).norm(),
        tau: m.mobius(t.tau),
    }
}

/// One boundary condition, identified with ℤ/2 via + ↦ 0, − ↦ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(b: u8) -> Self {
        if b & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn parse(c: char) -> Option<Self> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinStructure {
    pub s1: Sign,
    pub s2: Sign,
}

impl SpinStructure {
    pub const PP: Self = Self {
        s1: Sign::Plus,
        s2: Sign::Plus,
    };
    pub const PM: Self = Self {
        s1: Sign::Plus,
        s2: Sign::Minus,
    };
    pub const MP: Self = Self {
        s1: Sign::Minus,
        s2: Sign::Plus,
    };
    pub const MM: Self = Self {
        s1: Sign::Minus,
        s2: Sign::Minus,
    };

    pub const ALL: [Self; 4] = [Self::PP, Self::PM, Self::MP, Self::MM];

    pub fn new(s1: Sign, s2: Sign) -> Self {
        Self { s1, s2 }
    }
}

impl fmt::Display for SpinStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.s1.symbol(), self.s2.symbol())
    }
}

impl FromStr for SpinStructure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let cs: Vec<char> = s.chars().collect();
        match cs.as_slice() {
            [a, b] => Ok(Self::new(
                Sign::parse(*a).ok_or_else(|| format!("bad spin structure `{s}`"))?,
                Sign::parse(*b).ok_or_else(|| format!("bad spin structure `{s}`"))?,
            )),
            _ => Err(format!("bad spin structure `{s}`")),
        }
    }
}

fn parity(x: &BigInt) -> u8 {
    if x.is_odd() {
        1
    } else {
        0
    }
}

/// (s₁, s₂)ᵀ ↦ A·(s₁, s₂)ᵀ over ℤ/2.
pub fn act_spin(m: &SL2Z, s: SpinStructure) -> SpinStructure {
    let (x, y) = (s.s1.bit(), s.s2.bit());
    let [a, b, c, d] = m.entries().map(parity);
    SpinStructure::new(Sign::from_bit(a * x + b * y), Sign::from_bit(c * x + d * y))
}

/// Orbits of the four spin structures under the closure of {S, T}.
pub fn spin_orbits() -> Vec<BTreeSet<SpinStructure>> {
    let gens = [SL2Z::s(), SL2Z::t()];
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for s in SpinStructure::ALL {
        if seen.contains(&s) {
            continue;
        }
        let mut orbit = BTreeSet::from([s]);
        let mut frontier = vec![s];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = act_spin(g, x);
                if orbit.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen.extend(orbit.iter().copied());
        orbits.push(orbit);
    }
    orbits
}

pub fn in_gamma0_2(m: &SL2Z) -> bool {
    m.c.is_even()
}

pub fn stabilizes_minus_plus(m: &SL2Z) -> bool {
    act_spin(m, SpinStructure::MP) == SpinStructure::MP
}

/// Four sector series with the modular weight carried by the ++ sector; the
/// other sectors have weight 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorSection {
    pub weight: Rational64,
    pub sectors: BTreeMap<SpinStructure, AnySeries>,
}

#[derive(Serialize, Deserialize)]
struct SectionFile {
    weight: String,
    sectors: BTreeMap<String, SeriesFile>,
}

impl SectorSection {
    pub fn new(weight: Rational64, sectors: BTreeMap<SpinStructure, AnySeries>) -> Self {
        assert!(sectors.len() == 4, "a section has four sectors");
        Self { weight, sectors }
    }

    /// All four sectors equal to `f`, weight 0.
    pub fn uniform(f: AnySeries) -> Self {
        Self::new(
            Rational64::from_integer(0),
            SpinStructure::ALL.iter().map(|&s| (s, f.clone())).collect(),
        )
    }

    pub fn weight_of(&self, s: SpinStructure) -> Rational64 {
        if s == SpinStructure::PP {
            self.weight
        } else {
            Rational64::from_integer(0)
        }
    }

    pub fn get(&self, s: SpinStructure) -> &AnySeries {
        &self.sectors[&s]
    }

    pub fn to_json(&self) -> String {
        let w = self.weight;
        let file = SectionFile {
            weight: format!("{}/{}", w.numer(), w.denom()),
            sectors: self
                .sectors
                .iter()
                .map(|(s, f)| (s.to_string(), f.to_file()))
                .collect(),
        };
        serde_json::to_string(&file).expect("section serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let file: SectionFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let w = crate::exact::parse_rational(&file.weight).map_err(|e| e.to_string())?;
        let weight = Rational64::new(
            w.numer().to_i64().ok_or("weight out of range")?,
            w.denom().to_i64().ok_or("weight out of range")?,
        );
        let mut sectors = BTreeMap::new();
        for (k, v) in file.sectors {
            let s: SpinStructure = k.parse()?;
            sectors.insert(s, AnySeries::try_from(v).map_err(|e| e.to_string())?);
        }
        if sectors.len() != 4 {
            return Err("a section file needs all four sectors ++, +-, -+, --".into());
        }
        Ok(Self { weight, sectors })
    }
}

/// Default sample points for numeric equivariance checks.
pub fn default_samples() -> Vec<PointedTorus> {
    [(0.1, 1.2), (-0.3, 0.9), (0.45, 1.05)]
        .iter()
        .map(|&(x, y)| PointedTorus::new(1.0, Complex64::new(x, y)).unwrap())
        .collect()
}

/// `Some(j)` with `a = ζ₄₈^j · b` as series known below the smaller precision.
pub fn root_of_unity_ratio(a: &QSeries<CycInt>, b: &QSeries<CycInt>) -> Option<i64> {
    let p = a.prec().min(b.prec());
    (0..CYC_ORDER).find(|&j| {
        let scaled = b.scale(&CycInt::zeta_pow(j));
        a.agrees_below(&scaled, p)
    })
}

/// Result for one source sector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorCheck {
    pub sector: String,
    pub target: String,
    /// Max relative deviation over the samples; `None` if evaluation was rejected.
    pub deviation: Option<f64>,
    /// Exact ratio lhs/rhs as a power of ζ₄₈, from the series route.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_ratio: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub check: String,
    pub generator: String,
    pub tol: f64,
    pub deviation: f64,
    pub status: Status,
    pub sectors: Vec<SectorCheck>,
}

/// Compares `sec[A·s](A·τ)` with `(cτ+d)^{w(s)} · sec[s](τ)` at each sample.
///
/// An evaluation whose truncation tail exceeds `tol` relative to its value is
/// rejected with status `error`. When `c = 0` the identity is also checked
/// exactly on the series via `t_transform`, and any non-unit ratio fails the
/// sector.
pub fn check_section_equivariance(
    sec: &SectorSection,
    m: &SL2Z,
    samples: &[PointedTorus],
    tol: f64,
) -> EquivarianceReport {
    let mut sectors = Vec::new();
    for s in SpinStructure::ALL {
        let target = act_spin(m, s);
        let w = sec.weight_of(s);
        let mut dev = 0.0f64;
        let mut rejected = None;
        for t in samples {
            let image = m.mobius(t.tau);
            let (lhs, lt) = sec.get(target).eval_with_tail(image);
            let (base, rt) = sec.get(s).eval_with_tail(t.tau);
            let factor = cocycle(m.automorphy(t.tau), w);
            let rhs = factor * base;
            for (v, tail) in [(lhs, lt), (base, rt)] {
                if tail > tol * v.norm().max(f64::MIN_POSITIVE) && tail > tol {
                    rejected = Some(format!(
                        "series truncation does not converge at tau = {:.4}{:+.4}i (tail {tail:.3e})",
                        image.re, image.im
                    ));
                }
            }
            dev = dev.max(rel_dev(lhs, rhs, 1e-300));
        }
        let exact = exact_t_check(sec, m, s, target);
        let status = if rejected.is_some() {
            Status::Error
        } else if dev <= tol
            && exact
                .as_ref()
                .is_none_or(|r| r.as_ref().is_some_and(|j| *j == 0))
        {
            Status::Pass
        } else {
            Status::Fail
        };
        let exact_ratio = exact.map(|r| match r {
            Some(j) => format!("zeta48^{j}"),
            None => "not a root of unity".to_string(),
        });
        sectors.push(SectorCheck {
            sector: s.to_string(),
            target: target.to_string(),
            deviation: rejected.is_none().then_some(dev),
            exact_ratio,
            status,
            message: rejected,
        });
    }
    let status = Status::combine(sectors.iter().map(|c| c.status));
    let deviation = sectors
        .iter()
        .filter_map(|c| c.deviation)
        .fold(0.0, f64::max);
    EquivarianceReport {
        check: "section-equivariance".into(),
        generator: m.to_string(),
        tol,
        deviation,
        status,
        sectors,
    }
}

/// z^w on the principal branch.
fn cocycle(z: Complex64, w: Rational64) -> Complex64 {
    if w.is_integer() {
        z.powi(w.to_integer() as i32)
    } else {
        z.powf(*w.numer() as f64 / *w.denom() as f64)
    }
}

/// For `c = 0` the matrix is ±Tᵏ; compares `tᵏ(sec[A·s])` with `d^w·sec[s]`.
/// Outer `None`: not applicable; inner `None`: no root-of-unity ratio.
fn exact_t_check(
    sec: &SectorSection,
    m: &SL2Z,
    s: SpinStructure,
    target: SpinStructure,
) -> Option<Option<i64>> {
    let [_, b, c, d] = m.entries();
    if !c.is_zero() {
        return None;
    }
    let w = sec.weight_of(s);
    let sign_flip = d.is_negative();
    if sign_flip && !w.is_integer() {
        return None;
    }
    let k = (b * d)
        .mod_floor(&BigInt::from(CYC_ORDER))
        .to_i64()
        .unwrap();
    let lhs = sec.get(target).to_cyc().ok()?;
    let mut shifted = lhs;
    for _ in 0..k {
        shifted = shifted.t_transform().ok()?;
    }
    let mut rhs = sec.get(s).to_cyc().ok()?;
    if sign_flip && w.to_integer().is_odd() {
        rhs = rhs.scale(&CycInt::from_int(-1));
    }
    Some(root_of_unity_ratio(&shifted, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_action_examples() {
        let t = PointedTorus::new(2.5, Complex64::new(0.3, 0.7)).unwrap();
        assert_eq!(act_torus(&SL2Z::identity(), &t), t);
        let i = PointedTorus::new(1.5, Complex64::new(0.0, 1.0)).unwrap();
        let si = act_torus(&SL2Z::s(), &i);
        assert!((si.tau - i.tau).norm() < 1e-15 && (si.ell - 1.5).abs() < 1e-15);
        let tt = act_torus(&SL2Z::t(), &t);
        assert!((tt.tau - Complex64::new(1.3, 0.7)).norm() < 1e-15 && tt.ell == 2.5);
    }

    #[test]
    fn spin_action_examples() {
        for m in [SL2Z::s(), SL2Z::t(), SL2Z::new(1, 0, 2, 1).unwrap()] {
            assert_eq!(act_spin(&m, SpinStructure::PP), SpinStructure::PP);
        }
        assert_eq!(act_spin(&SL2Z::t(), SpinStructure::PM), SpinStructure::MM);
        assert_eq!(act_spin(&SL2Z::s(), SpinStructure::MP), SpinStructure::PM);
    }

    #[test]
    fn orbits() {
        let o = spin_orbits();
        assert_eq!(o.len(), 2);
        assert_eq!(o[0], BTreeSet::from([SpinStructure::PP]));
        assert_eq!(
            o[1],
            BTreeSet::from([SpinStructure::PM, SpinStructure::MP, SpinStructure::MM])
        );
    }

    #[test]
    fn gamma0_2_examples() {
        let cases = [
            (SL2Z::t(), true),
            (SL2Z::s(), false),
            (SL2Z::new(1, 0, 2, 1).unwrap(), true),
        ];
        for (m, expect) in cases {
            assert_eq!(in_gamma0_2(&m), expect);
            assert_eq!(stabilizes_minus_plus(&m), expect);
        }
    }

    #[test]
    fn parses_matrices() {
        assert_eq!("0,-1,1,0".parse::<SL2Z>().unwrap(), SL2Z::s());
        assert!("1,1,1,1".parse::<SL2Z>().is_err());
        assert!("1,2,3".parse::<SL2Z>().is_err());
    }

    #[test]
    fn constant_section_is_equivariant() {
        let one = AnySeries::Int(QSeries::one(Rational64::from_integer(25)));
        let sec = SectorSection::uniform(one);
        for m in [SL2Z::s(), SL2Z::t(), SL2Z::new(2, 1, 1, 1).unwrap()] {
            let r = check_section_equivariance(&sec, &m, &default_samples(), 1e-6);
            assert_eq!(r.status, Status::Pass, "{r:?}");
            assert_eq!(r.deviation, 0.0);
        }
    }

    #[test]
    fn section_json_round_trip() {
        let one = AnySeries::Int(QSeries::one(Rational64::from_integer(3)));
        let sec = SectorSection::uniform(one);
        assert_eq!(SectorSection::from_json(&sec.to_json()).unwrap(), sec);
    }
}
