//! Named verification checks and the suites that bundle them.
//!
//! Every check is a pure function of its parameters (and of a seeded RNG where
//! it samples), so suite output is reproducible. Suites fan out over rayon and
//! keep the declared report order.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bordism;
use crate::clifford::{self, passing_classes, Poly};
use crate::exact::{rel_dev, GaussRat};
use crate::modforms::{c4, c6, delta, delta_inv, eta, is_nonnegative, j_function, IntSeries};
use crate::moduli::{
    act_spin, act_torus, check_section_equivariance, default_samples, in_gamma0_2, spin_orbits,
    stabilizes_minus_plus, PointedTorus, SectorSection, SpinStructure, SL2Z,
};
use crate::qseries::{AnySeries, QSeries};
use crate::realization::{
    self, build_from_series, partition, spin_partition, SpinTheoryData, TheoryData,
};
use crate::report::{Report, Status};
use crate::susy;

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Config {
    /// Series order for the modular-form checks; equivariance runs at prec + 5.
    pub prec: i64,
    pub cutoff: i64,
    pub trunc: i64,
    pub tol: f64,
    pub seed: u64,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            prec: 20,
            cutoff: 25,
            trunc: 20,
            tol: 1e-6,
            seed: 0,
            timings: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), String> {
        if self.prec < 1 {
            return Err(format!("--prec must be at least 1, got {}", self.prec));
        }
        if self.cutoff < 1 {
            return Err(format!("--cutoff must be at least 1, got {}", self.cutoff));
        }
        if self.trunc < 0 {
            return Err(format!("--trunc must be nonnegative, got {}", self.trunc));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(format!("--tol must be a positive number, got {}", self.tol));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Modforms,
    Relations,
    Realization,
    Moduli,
    Susy,
    Periodicity,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Modforms,
        Suite::Relations,
        Suite::Realization,
        Suite::Moduli,
        Suite::Susy,
        Suite::Periodicity,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Modforms => "modforms",
            Suite::Relations => "relations",
            Suite::Realization => "realization",
            Suite::Moduli => "moduli",
            Suite::Susy => "susy",
            Suite::Periodicity => "periodicity",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.to_string() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

type Check = Box<dyn Fn(&Config) -> Vec<Report> + Send + Sync>;

fn checks(s: Suite) -> Vec<Check> {
    match s {
        Suite::Modforms => vec![
            Box::new(|c| vec![ring_relation(c.prec)]),
            Box::new(|c| vec![delta_inv_report(c.prec)]),
            Box::new(|c| vec![j_report(c.prec)]),
            Box::new(|c| vec![eta48_report(c.prec)]),
        ],
        Suite::Relations => vec![Box::new(|c| {
            let th = j_theory(c.trunc);
            vec![bordism::invariance_report(&th, &mut c.rng(7), 50, 12, 1e-9)]
        })],
        Suite::Realization => vec![
            Box::new(|c| realization_roundtrip(c.trunc, c.prec + 5, c.tol)),
            Box::new(|c| vec![spin_flip_report(c.prec + 5, c.tol)]),
        ],
        Suite::Moduli => vec![
            Box::new(|c| moduli_actions(&mut c.rng(3), 100, 1000)),
            Box::new(|_| vec![spin_orbit_report()]),
            Box::new(|c| j_equivariance(c.prec + 5, c.tol)),
        ],
        Suite::Susy => vec![
            Box::new(|c| {
                let samples: Vec<Complex64> = default_samples().iter().map(|p| p.tau).collect();
                vec![susy::cancellation_report(
                    &mut c.rng(5),
                    1000,
                    &samples,
                    1e-9,
                )]
            }),
            Box::new(|c| vec![susy::group_law_report(&mut c.rng(6), 200)]),
            Box::new(|_| vec![susy_demo_report()]),
        ],
        Suite::Periodicity => vec![
            Box::new(|_| vec![clifford_report(50)]),
            Box::new(|c| vec![eta48_report(c.prec)]),
            Box::new(|c| periodicity_pin(r(c.cutoff), r(c.prec), c.tol)),
        ],
        Suite::All => Suite::EACH.into_iter().flat_map(checks).collect(),
    }
}

/// Runs a suite on the current rayon pool; report order is fixed by the suite.
pub fn run_suite(s: Suite, cfg: &Config) -> Vec<Report> {
    let list = checks(s);
    let groups: Vec<Vec<Report>> = list
        .par_iter()
        .map(|check| {
            let start = Instant::now();
            let mut reports = check(cfg);
            if cfg.timings {
                let ms = start.elapsed().as_millis() as u64;
                for rep in &mut reports {
                    rep.runtime_ms = Some(ms);
                }
            }
            reports
        })
        .collect();
    groups.into_iter().flatten().collect()
}

/// A rayon pool honoring `EFTLAB_THREADS` (unset or 0: rayon's default).
pub fn thread_pool_from_env() -> Result<rayon::ThreadPool, String> {
    let n = match std::env::var("EFTLAB_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("EFTLAB_THREADS must be a nonnegative integer, got {v:?}"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Modular forms

/// c₄³ − c₆² − 1728Δ vanishes through q^(order).
pub fn ring_relation(order: i64) -> Report {
    let prec = order + 1;
    let lhs = &(&c4(prec).pow(3) - &c6(prec).pow(2)) - &delta(prec).scale(&BigInt::from(1728));
    let known = lhs.prec() >= r(prec);
    let nonzero = lhs.terms().count();
    Report::exact(
        "modforms-ring-relation",
        known && nonzero == 0,
        json!({"through_order": order, "nonzero_terms": nonzero, "known_below": lhs.prec().to_string()}),
    )
}

/// Integer and rational inverses of Δ agree, and the coefficients are
/// nonnegative, through q^(order).
pub fn delta_inv_report(order: i64) -> Report {
    let int = delta_inv(order + 1);
    let rat = delta(order + 3)
        .to_rat()
        .inv()
        .expect("unit leading coefficient");
    let integral = rat.agrees_below(&int.to_rat(), r(order + 1));
    let nonneg = is_nonnegative(&int);
    let head: Vec<String> = (-1..=2)
        .map(|k| int.coeff_int(k).unwrap_or_default().to_string())
        .collect();
    Report::exact(
        "modforms-delta-inv",
        integral && nonneg && int.prec() >= r(order + 1),
        json!({"through_order": order, "integral": integral, "nonnegative": nonneg, "head": head}),
    )
}

/// j computed over ℚ has integer coefficients through q^(order) and begins
/// q⁻¹ + 744 + 196884q.
pub fn j_report(order: i64) -> Report {
    let j = j_function(order + 1);
    let rat = c4(order + 2)
        .to_rat()
        .pow(3)
        .mul_series(&delta(order + 3).to_rat().inv().expect("unit"));
    let integral = rat.agrees_below(&j.to_rat(), r(order + 1));
    let head: Vec<BigInt> = (-1..=1)
        .map(|k| j.coeff_int(k).unwrap_or_default())
        .collect();
    let head_ok = head == [BigInt::from(1), BigInt::from(744), BigInt::from(196884)];
    Report::exact(
        "modforms-j-integrality",
        integral && head_ok && j.prec() >= r(order + 1),
        json!({"through_order": order, "integral": integral, "head": head.iter().map(ToString::to_string).collect::<Vec<_>>()}),
    )
}

/// η⁴⁸ = Δ² through q^(order).
pub fn eta48_report(order: i64) -> Report {
    let p = r(order + 1);
    let e = eta(p).pow(48);
    let d = delta(order + 1).pow(2);
    let ok = e.prec() >= p && d.prec() >= p && e.agrees_below(&d.with_denom(e.denom()), p);
    Report::exact("modforms-eta48-delta2", ok, json!({"through_order": order}))
}

// ---------------------------------------------------------------------------
// Clifford and periodicity

/// The convention oracle admits one isomorphism class, and under it
/// str b_m = 1 − q^m and tr b_m = 1 + q^m for m ∈ {1/2, 1, …, max_m}.
pub fn clifford_report(max_m: i64) -> Report {
    let verdicts = clifford::convention_oracle();
    let classes = passing_classes(&verdicts);
    let (one_minus, one_plus) = (Poly::from_ints(&[1, -1]), Poly::from_ints(&[1, 1]));
    let mut bad = Vec::new();
    for twice in 1..=2 * max_m {
        let m = Rational64::new(twice, 2);
        let b = clifford::b_operator(m);
        let prec = m + r(1);
        let series_ok = |p: &Poly, sign: i64| {
            let want =
                QSeries::from_terms(2, prec, [(0, BigInt::one()), (twice, BigInt::from(sign))]);
            p.to_qseries(m, prec)
                .is_some_and(|s| s.with_denom(2) == want)
        };
        if b.supertrace != one_minus
            || b.trace != one_plus
            || !series_ok(&b.supertrace, -1)
            || !series_ok(&b.trace, 1)
        {
            bad.push(m.to_string());
        }
    }
    let limit = clifford::b_operator(r(1));
    let at_one = (
        clifford::poly_at_one_int(&limit.supertrace),
        clifford::poly_at_one_int(&limit.trace),
    );
    Report::exact(
        "clifford-identities",
        classes.len() == 1 && bad.is_empty() && at_one == (Some(0), Some(2)),
        json!({
            "passing_conventions": verdicts.iter().filter(|v| v.pass).map(|v| v.convention).collect::<Vec<_>>(),
            "passing_classes": classes.len(),
            "modes_checked": 2 * max_m,
            "failing_modes": bad,
        }),
    )
}

/// n = 24 fails with T-ratio −1 = ζ₄₈²⁴ on +− and −−; n = 48 passes.
pub fn periodicity_pin(cutoff: Rational64, prec: Rational64, tol: f64) -> Vec<Report> {
    let samples = default_samples();
    let run = |n| clifford::periodicity_certificate_at(n, cutoff, prec, &samples, tol);
    let mut out = Vec::new();
    match run(24) {
        Ok(c) => {
            let ratios = (
                clifford::t_ratio_exponent(&c, "+-"),
                clifford::t_ratio_exponent(&c, "--"),
            );
            let ok = !c.pass && ratios == (Some(24), Some(24));
            out.push(Report::exact(
                "periodicity-n24-fails",
                ok,
                json!({"certificate": c, "ratio_plus_minus": "zeta48^24 = -1"}),
            ));
        }
        Err(e) => out.push(Report::error("periodicity-n24-fails", e.to_string())),
    }
    match run(48) {
        Ok(c) => {
            let dev = c
                .s_checks
                .iter()
                .filter_map(|s| s.deviation)
                .fold(0.0, f64::max);
            out.push(
                Report::numeric(
                    "periodicity-n48-passes",
                    tol,
                    dev,
                    json!({"certificate": c}),
                )
                .with_status(Status::from_bool(c.pass && dev <= tol)),
            );
        }
        Err(e) => out.push(Report::error("periodicity-n48-passes", e.to_string())),
    }
    out
}

// ---------------------------------------------------------------------------
// Realization

/// The theory built from j, known below q^(trunc + 1).
pub fn j_theory(trunc: i64) -> TheoryData {
    build_from_series(&j_function(trunc + 1)).expect("j has nonnegative coefficients")
}

/// 1, j and j² as series known below q^prec.
fn sample_functions(prec: i64) -> Vec<(&'static str, IntSeries)> {
    let j = j_function(prec + 1);
    vec![
        ("1", IntSeries::one(r(prec))),
        ("j", j.truncate(r(prec))),
        ("j^2", j.mul_series(&j).truncate(r(prec))),
    ]
}

/// For f ∈ {1, j, j²}: partition∘build_from_series is the identity at
/// trunc, conditions (a), (b) hold exactly, and (d) holds at equivariance
/// precision `eq_prec`.
pub fn realization_roundtrip(trunc: i64, eq_prec: i64, tol: f64) -> Vec<Report> {
    let samples = default_samples();
    let small = sample_functions(trunc + 1);
    let large = sample_functions(eq_prec);
    let mut out = Vec::new();
    for ((name, f), (_, big)) in small.iter().zip(&large) {
        let check = |rep: Report| Report {
            check: format!("realization[{name}]/{}", rep.check),
            ..rep
        };
        let th = match build_from_series(f) {
            Ok(t) => t,
            Err(e) => {
                out.push(Report::error(
                    format!("realization[{name}]/build"),
                    e.to_string(),
                ));
                continue;
            }
        };
        let round = partition(&th);
        out.push(check(Report::exact(
            "round-trip",
            round == *f,
            json!({"trunc": trunc}),
        )));
        out.push(check(realization::check_symmetry(&th)));
        out.push(check(realization::check_gluing(&th)));
        let section = match build_from_series(big) {
            Ok(t) => SectorSection::uniform(AnySeries::Int(partition(&t))),
            Err(e) => {
                out.push(Report::error(
                    format!("realization[{name}]/build-large"),
                    e.to_string(),
                ));
                continue;
            }
        };
        out.push(check(realization::check_equivariance(
            &section, &samples, tol,
        )));
    }
    out
}

/// The all-even spin theory of j has four equal sector partitions; flipping
/// V⁺ negates exactly the ++ sector and keeps the section equivariant.
pub fn spin_flip_report(prec: i64, tol: f64) -> Report {
    let th = build_from_series(&j_function(prec)).expect("j has nonnegative coefficients");
    let mut sth = SpinTheoryData::uniform(th);
    let plain: Vec<IntSeries> = SpinStructure::ALL
        .iter()
        .map(|&s| spin_partition(&sth, s))
        .collect();
    let equal = plain.iter().all(|p| *p == plain[0]);
    sth.flip_plus = true;
    let flipped: Vec<IntSeries> = SpinStructure::ALL
        .iter()
        .map(|&s| spin_partition(&sth, s))
        .collect();
    let negated_only_pp = SpinStructure::ALL
        .iter()
        .zip(plain.iter().zip(&flipped))
        .all(|(&s, (a, b))| {
            if s == SpinStructure::PP {
                *b == a.scale(&BigInt::from(-1))
            } else {
                a == b
            }
        });
    let eq =
        realization::check_equivariance(&realization::spin_section(&sth), &default_samples(), tol);
    let dev = match eq.tolerance {
        crate::report::Tolerance::Numeric { max_deviation, .. } => max_deviation,
        crate::report::Tolerance::Exact => 0.0,
    };
    let ok = equal && negated_only_pp && eq.status.is_pass();
    Report::numeric(
        "realization-spin-flip",
        tol,
        dev,
        json!({"sectors_equal": equal, "flip_negates_only_pp": negated_only_pp, "equivariance": eq.status}),
    )
    .with_status(Status::from_bool(ok))
}

// ---------------------------------------------------------------------------
// Moduli

/// act_torus is a left action on `torus_trials` composites: exactly in τ
/// (Gaussian-rational Möbius action, im τ stays positive) and within 1e−12 in
/// ℓ. act_spin is a left action exactly on `spin_trials` composites, and the
/// stabilizer of −+ is Γ₀(2) on `spin_trials` random matrices.
pub fn moduli_actions<R: Rng + ?Sized>(
    rng: &mut R,
    torus_trials: usize,
    spin_trials: usize,
) -> Vec<Report> {
    let mut tau_bad = 0;
    let mut ell_dev = 0.0f64;
    for _ in 0..torus_trials {
        let (a, b) = (SL2Z::random(rng, 6), SL2Z::random(rng, 6));
        let ab = a.mul(&b);
        let tau = GaussRat::from_ratios((rng.gen_range(-8..=8), 8), (rng.gen_range(1..=16), 8));
        let lhs = ab.mobius_exact(&tau);
        let rhs = a.mobius_exact(&b.mobius_exact(&tau));
        if lhs != rhs || lhs.im <= Zero::zero() {
            tau_bad += 1;
        }
        let t = PointedTorus::new(rng.gen_range(0.5..2.0), tau.to_complex())
            .expect("upper half-plane point");
        let (l1, l2) = (
            act_torus(&ab, &t).ell,
            act_torus(&a, &act_torus(&b, &t)).ell,
        );
        ell_dev = ell_dev.max((l1 - l2).abs() / l1.abs());
    }
    let mut spin_bad = 0;
    let mut stab_bad = 0;
    for _ in 0..spin_trials {
        let (a, b) = (SL2Z::random(rng, 50), SL2Z::random(rng, 50));
        for s in SpinStructure::ALL {
            if act_spin(&a.mul(&b), s) != act_spin(&a, act_spin(&b, s)) {
                spin_bad += 1;
            }
        }
        if stabilizes_minus_plus(&a) != in_gamma0_2(&a) {
            stab_bad += 1;
        }
    }
    vec![
        Report::exact(
            "moduli-torus-left-action-tau",
            tau_bad == 0,
            json!({"composites": torus_trials, "violations": tau_bad}),
        ),
        Report::numeric(
            "moduli-torus-left-action-ell",
            1e-12,
            ell_dev,
            json!({"composites": torus_trials}),
        ),
        Report::exact(
            "moduli-spin-left-action",
            spin_bad == 0,
            json!({"composites": spin_trials, "violations": spin_bad}),
        ),
        Report::exact(
            "moduli-gamma0-2-stabilizer",
            stab_bad == 0,
            json!({"matrices": spin_trials, "mismatches": stab_bad}),
        ),
    ]
}

/// Orbits of SL₂(ℤ) on spin structures are {++} and {+−, −+, −−}.
pub fn spin_orbit_report() -> Report {
    let orbits = spin_orbits();
    let mut shown: Vec<Vec<String>> = orbits
        .iter()
        .map(|o| o.iter().map(ToString::to_string).collect())
        .collect();
    shown.sort_by_key(Vec::len);
    let ok = shown.len() == 2 && shown[0] == ["++"] && shown[1].len() == 3;
    Report::exact("moduli-spin-orbits", ok, json!({"orbits": shown}))
}

/// j and j² as uniform sections are S- and T-invariant at the default samples.
pub fn j_equivariance(prec: i64, tol: f64) -> Vec<Report> {
    let j = j_function(prec);
    let samples = default_samples();
    [("j", j.clone()), ("j^2", j.mul_series(&j))]
        .into_iter()
        .flat_map(|(name, f)| {
            let section = SectorSection::uniform(AnySeries::Int(f));
            let samples = &samples;
            [("S", SL2Z::s()), ("T", SL2Z::t())]
                .into_iter()
                .map(move |(g, m)| {
                    let rep = check_section_equivariance(&section, &m, samples, tol);
                    Report::numeric(
                        format!("moduli-equivariance[{name},{g}]"),
                        tol,
                        rep.deviation,
                        serde_json::to_value(&rep).expect("serializable"),
                    )
                    .with_status(rep.status)
                })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Susy

/// The demo model builds, satisfies the relations and has Z = q⁻¹ + 744.
pub fn susy_demo_report() -> Report {
    let m = susy::demo_model();
    let samples: Vec<Complex64> = default_samples().iter().map(|p| p.tau).collect();
    let Ok(sp) = susy::build_pair(&m) else {
        return Report::exact(
            "susy-demo",
            false,
            json!({"error": "demo model obstructed"}),
        );
    };
    let rel = susy::check_relations(&sp, &samples, 1e-9);
    let p = susy::partition_qexp(&m);
    let coeffs = (p.series.coeff_int(-1), p.series.coeff_int(0));
    let ok = rel.iter().all(|x| x.status.is_pass())
        && p.verdict == susy::Verdict::Holomorphic
        && coeffs == (Some(BigInt::one()), Some(BigInt::from(744)));
    let blockwise_vs_dense = samples
        .iter()
        .map(|&t| {
            rel_dev(
                susy::supertrace_blockwise(&m, t),
                susy::supertrace_dense(&m, t),
                1e-300,
            )
        })
        .fold(0.0, f64::max);
    Report::exact(
        "susy-demo",
        ok && blockwise_vs_dense < 1e-12,
        json!({"series": p.series.terms().map(|(e, c)| (e.to_string(), c.to_string())).collect::<Vec<_>>(),
               "relations": rel.iter().map(|x| (x.check.clone(), x.status)).collect::<Vec<_>>()}),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(Config::default().validate().is_ok());
        assert!(Config {
            tol: 0.0,
            ..Config::default()
        }
        .validate()
        .is_err());
        assert!(Config {
            prec: 0,
            ..Config::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn modforms_suite_passes_at_small_order() {
        let cfg = Config {
            prec: 8,
            ..Config::default()
        };
        let reps = run_suite(Suite::Modforms, &cfg);
        assert_eq!(reps.len(), 4);
        assert!(reps.iter().all(|r| r.status.is_pass()), "{reps:?}");
    }

    #[test]
    fn suites_are_deterministic() {
        let cfg = Config {
            prec: 6,
            trunc: 4,
            ..Config::default()
        };
        let a = serde_json::to_string(&run_suite(Suite::Susy, &cfg)).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::Susy, &cfg)).unwrap();
        assert_eq!(a, b);
    }
}
