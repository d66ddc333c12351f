//! The ten acceptance criteria, each run at its stated tolerance and time
//! budget. Prints one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eftlab::moduli::default_samples;
use eftlab::report::Report;
use eftlab::suite;
use eftlab::susy;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Vec<Report>,
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(0);
    r.set_stream(stream);
    r
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn c1() -> Vec<Report> {
    vec![suite::ring_relation(50)]
}

fn c2() -> Vec<Report> {
    vec![suite::delta_inv_report(30), suite::j_report(20)]
}

fn c3() -> Vec<Report> {
    let mut out = vec![suite::eta48_report(20)];
    out.extend(suite::periodicity_pin(r(25), r(20), 1e-6));
    out
}

fn c4() -> Vec<Report> {
    vec![suite::clifford_report(50)]
}

fn c5() -> Vec<Report> {
    suite::realization_roundtrip(10, 25, 1e-6)
}

fn c6() -> Vec<Report> {
    vec![suite::spin_flip_report(25, 1e-6)]
}

fn c7() -> Vec<Report> {
    vec![eftlab::bordism::invariance_report(
        &suite::j_theory(8),
        &mut rng(7),
        50,
        12,
        1e-9,
    )]
}

fn c8() -> Vec<Report> {
    let samples: Vec<Complex64> = default_samples().iter().map(|p| p.tau).collect();
    vec![susy::cancellation_report(&mut rng(5), 1000, &samples, 1e-9)]
}

fn c9() -> Vec<Report> {
    vec![susy::group_law_report(&mut rng(6), 200)]
}

fn c10() -> Vec<Report> {
    suite::moduli_actions(&mut rng(3), 100, 1000)
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        name: "ring relation to q^50",
        budget: Duration::from_secs(1),
        run: c1,
    },
    Criterion {
        id: 2,
        name: "delta^-1 and j integrality",
        budget: Duration::from_secs(1),
        run: c2,
    },
    Criterion {
        id: 3,
        name: "periodicity pin n=24/48",
        budget: Duration::from_secs(10),
        run: c3,
    },
    Criterion {
        id: 4,
        name: "Clifford per-factor identities",
        budget: Duration::from_secs(1),
        run: c4,
    },
    Criterion {
        id: 5,
        name: "realization round trip",
        budget: Duration::from_secs(5),
        run: c5,
    },
    Criterion {
        id: 6,
        name: "spin sign mechanism",
        budget: Duration::from_secs(5),
        run: c6,
    },
    Criterion {
        id: 7,
        name: "rewrite soundness",
        budget: Duration::from_secs(20),
        run: c7,
    },
    Criterion {
        id: 8,
        name: "supersymmetric cancellation",
        budget: Duration::from_secs(5),
        run: c8,
    },
    Criterion {
        id: 9,
        name: "super group law",
        budget: Duration::from_secs(1),
        run: c9,
    },
    Criterion {
        id: 10,
        name: "moduli left actions",
        budget: Duration::from_secs(2),
        run: c10,
    },
];

fn main() {
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let reports = (c.run)();
        let elapsed = start.elapsed();
        let checks_ok = !reports.is_empty() && reports.iter().all(|r| r.status.is_pass());
        let in_budget = elapsed <= c.budget;
        let verdict = if checks_ok && in_budget {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "{verdict} criterion {:>2}: {} ({} ms, budget {} ms)",
            c.id,
            c.name,
            elapsed.as_millis(),
            c.budget.as_millis()
        );
        for rep in &reports {
            println!("    {}", rep.summary());
        }
        if !in_budget {
            println!("    over time budget");
        }
        if verdict == "FAIL" {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", CRITERIA.len());
}
