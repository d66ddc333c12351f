//! Dense-matrix oracle for word evaluation: every atom becomes an explicit
//! matrix on V^{⊗n} in the homogeneous basis with diagonal copairing, layers are
//! Kronecker products, and the word is the ordered product of its layers.

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eftlab::bordism::{self, Atom, BordWord, Kind};
use eftlab::exact::GaussRat;
use eftlab::realization::{partition, TheoryData};
use eftlab::suite::j_theory;

type Mat = Vec<Vec<Complex64>>;

fn theory(pole: i64, dims: &[u32]) -> TheoryData {
    TheoryData::new(
        pole,
        dims.len() as i64 - pole - 1,
        dims.iter().map(|&d| BigUint::from(d)).collect(),
    )
}

/// Four basis vectors in blocks -1, 0, 0, 1.
fn small_theory() -> TheoryData {
    theory(1, &[1, 2, 1])
}

/// Two basis vectors in blocks -1 and 1; rewritten words can be wide.
fn tiny_theory() -> TheoryData {
    theory(1, &[1, 0, 1])
}

/// The block label k of each basis vector.
fn basis(th: &TheoryData) -> Vec<i64> {
    th.blocks()
        .flat_map(|(k, a)| std::iter::repeat_n(k, a.try_into().unwrap()))
        .collect()
}

fn q_pow(tau: &GaussRat, k: i64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau.to_complex() * k as f64).exp()
}

fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Complex64::new(0.0, 0.0); c]; r]
}

fn atom_matrix(a: &Atom, ks: &[i64]) -> Mat {
    let d = ks.len();
    let one = Complex64::new(1.0, 0.0);
    match a.kind() {
        Kind::Id => {
            let mut m = zeros(d, d);
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = one;
            }
            m
        }
        Kind::Swap => {
            let mut m = zeros(d * d, d * d);
            for i in 0..d {
                for j in 0..d {
                    m[j * d + i][i * d + j] = one;
                }
            }
            m
        }
        Kind::C => {
            let mut m = zeros(d, d);
            for (i, &k) in ks.iter().enumerate() {
                m[i][i] = q_pow(a.tau().unwrap(), k);
            }
            m
        }
        Kind::R => {
            let mut m = zeros(d * d, 1);
            for (i, &k) in ks.iter().enumerate() {
                m[i * d + i][0] = q_pow(a.tau().unwrap(), k);
            }
            m
        }
        Kind::L => {
            let mut m = zeros(1, d * d);
            for (i, &k) in ks.iter().enumerate() {
                m[0][i * d + i] = q_pow(a.tau().unwrap(), k);
            }
            m
        }
        Kind::T => vec![vec![ks.iter().map(|&k| q_pow(a.tau().unwrap(), k)).sum()]],
    }
}

fn kron(a: &Mat, b: &Mat) -> Mat {
    let (br, bc) = (b.len(), b[0].len());
    let mut m = zeros(a.len() * br, a[0].len() * bc);
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            for (k, brow) in b.iter().enumerate() {
                for (l, &y) in brow.iter().enumerate() {
                    m[i * br + k][j * bc + l] = x * y;
                }
            }
        }
    }
    m
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut m = zeros(a.len(), b[0].len());
    for (i, row) in a.iter().enumerate() {
        for (k, &x) in row.iter().enumerate() {
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &y) in b[k].iter().enumerate() {
                m[i][j] += x * y;
            }
        }
    }
    m
}

fn oracle(w: &BordWord, th: &TheoryData) -> Mat {
    let ks = basis(th);
    let d = ks.len();
    let mut acc: Mat = zeros(d.pow(w.in_arity as u32), d.pow(w.in_arity as u32));
    for (i, row) in acc.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    for layer in &w.layers {
        let m = layer
            .iter()
            .fold(vec![vec![Complex64::new(1.0, 0.0)]], |m, a| {
                kron(&m, &atom_matrix(a, &ks))
            });
        acc = matmul(&m, &acc);
    }
    acc
}

fn rel_gap(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(
        (a.len(), a[0].len()),
        (b.len(), b[0].len()),
        "shapes differ"
    );
    let scale = a.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

#[test]
fn evaluation_matches_dense_oracle_on_random_words() {
    let th = small_theory();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let w = bordism::random_word(&mut rng, 8);
        let expected = oracle(&w, &th);
        let got = bordism::evaluate(&w, &th)
            .unwrap()
            .to_dense(1 << 20)
            .unwrap();
        let gap = rel_gap(&expected, &got);
        assert!(gap < 1e-9, "{w}: gap {gap}");

        let nf = bordism::normalize(&w).unwrap().word;
        let gap = rel_gap(&expected, &oracle(&nf, &th));
        assert!(gap < 1e-9, "{w} vs normal form {nf}: gap {gap}");
    }
}

#[test]
fn every_rule_step_preserves_the_dense_value() {
    let th = tiny_theory();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut steps = 0;
    for _ in 0..60 {
        let w = bordism::random_word(&mut rng, 8);
        let base = oracle(&w, &th);
        for rule in bordism::Rule::ALL {
            for i in 0..bordism::match_count(&w, rule).unwrap() {
                let v = bordism::rewrite_at(&w, rule, i).unwrap();
                let gap = rel_gap(&base, &oracle(&v, &th));
                assert!(gap < 1e-9, "{rule} at {i} on {w}: gap {gap}");
                steps += 1;
            }
        }
    }
    assert!(steps > 50, "too few rule matches exercised: {steps}");
}

#[test]
fn closed_torus_is_the_truncated_partition_function() {
    let th = j_theory(8);
    let z = partition(&th);
    for (re, im) in [(0, 1), (1, 2), (5, 3)] {
        let tau = GaussRat::from_ratios((re, 12), (im * 10 + 8, 10));
        let w = BordWord::from_layers(
            0,
            vec![
                vec![Atom::param(Kind::R, tau.clone()).unwrap()],
                vec![Atom::param(Kind::L, GaussRat::from_ints(0, 0)).unwrap()],
            ],
        )
        .unwrap();
        let got = bordism::evaluate(&w, &th).unwrap().scalar();
        let want = z.eval(tau.to_complex());
        assert!(
            (got - want).norm() <= 1e-9 * want.norm(),
            "{tau}: {got} vs {want}"
        );
    }
}

#[test]
fn dense_view_respects_the_bound() {
    let th = small_theory();
    let tau = GaussRat::from_ints(0, 1);
    let w = BordWord::from_layers(1, vec![vec![Atom::param(Kind::C, tau).unwrap()]]).unwrap();
    let e = bordism::evaluate(&w, &th).unwrap();
    assert!(e.to_dense(15).is_err());
    assert_eq!(e.to_dense(16).unwrap().len(), 4);
}
