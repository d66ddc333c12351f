use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eftlab::exact::GaussRat;
use eftlab::moduli::{
    act_spin, act_torus, in_gamma0_2, stabilizes_minus_plus, PointedTorus, SpinStructure, SL2Z,
};
use eftlab::qseries::{CycInt, QSeries};
use eftlab::susy::{super_mul, GrassmannElt, SuperPoint};

type IntSeries = QSeries<BigInt>;

fn series(denom: i64, start: i64, coeffs: Vec<i64>, extra: i64) -> IntSeries {
    let top = start + coeffs.len() as i64 + extra;
    QSeries::from_terms(
        denom,
        Rational64::new(top, denom),
        coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (start + i as i64, BigInt::from(c))),
    )
}

fn arb_series(denoms: &'static [i64]) -> impl Strategy<Value = IntSeries> {
    (
        prop::sample::select(denoms),
        -4i64..4,
        prop::collection::vec(-30i64..30, 0..10),
        0i64..4,
    )
        .prop_map(|(d, s, c, e)| series(d, s, c, e))
}

fn min_prec(xs: &[&IntSeries]) -> Rational64 {
    xs.iter().map(|s| s.prec()).min().unwrap()
}

fn matrix(seed: u64) -> SL2Z {
    SL2Z::random(&mut ChaCha8Rng::seed_from_u64(seed), 12)
}

fn grassmann(terms: Vec<(u32, i64, i64)>) -> GrassmannElt {
    terms
        .into_iter()
        .fold(GrassmannElt::zero(), |acc, (m, re, im)| {
            acc.add(&GrassmannElt::monomial(m, GaussRat::from_ints(re, im)))
        })
}

fn arb_grassmann() -> impl Strategy<Value = GrassmannElt> {
    prop::collection::vec((0u32..8, -4i64..5, -4i64..5), 0..6).prop_map(grassmann)
}

fn homogeneous(parity: u32) -> impl Strategy<Value = GrassmannElt> {
    prop::collection::vec((0u32..8, -4i64..5, -4i64..5), 0..6).prop_map(move |t| {
        grassmann(
            t.into_iter()
                .filter(|(m, _, _)| m.count_ones() % 2 == parity)
                .collect(),
        )
    })
}

fn arb_point() -> impl Strategy<Value = SuperPoint> {
    (homogeneous(0), homogeneous(0), homogeneous(1)).prop_map(|(t, tb, th)| {
        let tb = tb
            .sub(&GrassmannElt::scalar(tb.reduced()))
            .add(&GrassmannElt::scalar(t.reduced().conj()));
        SuperPoint::new(t, tb, th).expect("a valid point")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn series_product_commutes(a in arb_series(&[1, 2, 3]), b in arb_series(&[1, 2, 3])) {
        prop_assert_eq!(a.mul_series(&b), b.mul_series(&a));
    }

    #[test]
    fn series_product_associates(
        a in arb_series(&[1, 2]), b in arb_series(&[1, 3]), c in arb_series(&[1, 2]),
    ) {
        let l = a.mul_series(&b).mul_series(&c);
        let r = a.mul_series(&b.mul_series(&c));
        prop_assert!(l.agrees_below(&r, min_prec(&[&l, &r])));
    }

    #[test]
    fn series_product_distributes(a in arb_series(&[1, 2]), b in arb_series(&[1, 2]), c in arb_series(&[1, 2])) {
        let l = a.mul_series(&b.add_series(&c));
        let r = a.mul_series(&b).add_series(&a.mul_series(&c));
        prop_assert!(l.agrees_below(&r, min_prec(&[&l, &r])));
    }

    #[test]
    fn series_inverse(lead in prop::sample::select(vec![-1i64, 1]), v in -3i64..3, rest in prop::collection::vec(-9i64..9, 0..12)) {
        let mut c = vec![lead];
        c.extend(rest);
        let a = series(1, v, c, 0);
        let inv = a.inv().unwrap();
        prop_assert_eq!(inv.prec(), a.prec() - Rational64::from_integer(2 * v));
        let p = a.mul_series(&inv);
        prop_assert!(p.agrees_below(&IntSeries::one(p.prec()), p.prec()));
    }

    #[test]
    fn t_transform_is_multiplicative(a in arb_series(&[1, 2, 3, 4, 6, 8, 12, 16, 24, 48]), b in arb_series(&[1, 3, 16, 48])) {
        let (a, b) = (a.to_cyc(), b.to_cyc());
        let lhs = a.mul_series(&b).t_transform().unwrap();
        let rhs = a.t_transform().unwrap().mul_series(&b.t_transform().unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn t_transform_has_order_dividing_48(a in arb_series(&[1, 2, 3, 8, 16, 24, 48])) {
        let c = a.to_cyc();
        let mut x = c.clone();
        for _ in 0..48 {
            x = x.t_transform().unwrap();
        }
        prop_assert_eq!(x, c.with_denom(48));
        // Integer exponents are fixed by a single application.
        if a.has_integer_exponents() {
            prop_assert_eq!(c.t_transform().unwrap(), c.with_denom(48));
        }
    }

    #[test]
    fn torus_action_is_left(s1: u64, s2: u64, x in -2.0f64..2.0, y in 0.2f64..3.0, ell in 0.1f64..5.0) {
        let (m1, m2) = (matrix(s1), matrix(s2));
        let t = PointedTorus::new(ell, Complex64::new(x, y)).unwrap();
        let lhs = act_torus(&m1.mul(&m2), &t);
        let rhs = act_torus(&m1, &act_torus(&m2, &t));
        let scale = 1.0 + lhs.tau.norm();
        prop_assert!((lhs.tau - rhs.tau).norm() <= 1e-8 * scale);
        prop_assert!((lhs.ell - rhs.ell).abs() <= 1e-8 * lhs.ell.max(1.0));
        prop_assert!(lhs.tau.im > 0.0);
    }

    #[test]
    fn torus_action_exact(s1: u64, s2: u64, re in -20i64..20, im in 1i64..20, den in 1i64..7) {
        let (m1, m2) = (matrix(s1), matrix(s2));
        let tau = GaussRat::from_ratios((re, den), (im, den));
        let lhs = m1.mul(&m2).mobius_exact(&tau);
        prop_assert_eq!(lhs.clone(), m1.mobius_exact(&m2.mobius_exact(&tau)));
        prop_assert!(lhs.to_complex().im > 0.0);
    }

    #[test]
    fn spin_action_is_left(s1: u64, s2: u64, idx in 0usize..4) {
        let (m1, m2) = (matrix(s1), matrix(s2));
        let s = SpinStructure::ALL[idx];
        prop_assert_eq!(act_spin(&m1.mul(&m2), s), act_spin(&m1, act_spin(&m2, s)));
        prop_assert_eq!(act_spin(&SL2Z::identity(), s), s);
    }

    #[test]
    fn minus_plus_stabilizer_is_gamma0_2(s: u64) {
        let m = matrix(s);
        prop_assert_eq!(stabilizes_minus_plus(&m), in_gamma0_2(&m));
    }

    #[test]
    fn grassmann_ring_axioms(x in arb_grassmann(), y in arb_grassmann(), z in arb_grassmann()) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
    }

    #[test]
    fn grassmann_supercommutes(
        (px, x) in (0u32..2).prop_flat_map(|p| (Just(p), homogeneous(p))),
        (py, y) in (0u32..2).prop_flat_map(|p| (Just(p), homogeneous(p))),
    ) {
        let yx = y.mul(&x);
        let expected = if px * py == 1 { yx.neg() } else { yx };
        prop_assert_eq!(x.mul(&y), expected);
    }

    #[test]
    fn super_group_law_associates(a in arb_point(), b in arb_point(), c in arb_point()) {
        let l = super_mul(&super_mul(&a, &b).unwrap(), &c).unwrap();
        let r = super_mul(&a, &super_mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}

#[test]
fn zeta_48_has_order_48() {
    assert_eq!(CycInt::zeta_pow(48), CycInt::zeta_pow(0));
    assert_eq!(
        &CycInt::zeta_pow(24) * &CycInt::zeta_pow(24),
        CycInt::zeta_pow(0)
    );
}
