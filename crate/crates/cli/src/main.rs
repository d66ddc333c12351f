use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

use eftlab::bordism::{self, BordWord};
use eftlab::clifford;
use eftlab::modforms::{self, ModularFunctionSpec};
use eftlab::moduli::{self, SectorSection, SL2Z};
use eftlab::qseries::AnySeries;
use eftlab::realization::{self, SpinTheoryData};
use eftlab::report::Report;
use eftlab::suite::{self, Config, Suite};
use eftlab::susy::{self, BlockModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "eftlab",
    version,
    about = "Exact checks for 2d Euclidean field theory data"
)]
struct Cli {
    /// Series order.
    #[arg(long, global = true, default_value_t = 20)]
    prec: i64,
    /// Mode cutoff M for sector products.
    #[arg(long, global = true, default_value_t = 25)]
    cutoff: i64,
    /// Truncation K of theory windows.
    #[arg(long, global = true, default_value_t = 20)]
    trunc: i64,
    /// Tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Record per-check wall time (makes output nondeterministic).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Modular form q-expansions.
    Modforms {
        #[command(subcommand)]
        cmd: ModformsCmd,
    },
    /// SL2(Z) actions on tori and spin structures.
    Moduli {
        #[command(subcommand)]
        cmd: ModuliCmd,
    },
    /// Rewriting of bordism words.
    Bordism {
        #[command(subcommand)]
        cmd: BordismCmd,
    },
    /// Theories realized from modular functions.
    Theory {
        #[command(subcommand)]
        cmd: TheoryCmd,
    },
    /// Supersymmetric block models.
    Susy {
        #[command(subcommand)]
        cmd: SusyCmd,
    },
    /// Periodicity certificate for the degree-n free fermion theory.
    Periodicity {
        #[arg(long)]
        n: u32,
    },
    /// Run a verification suite.
    Suite {
        #[arg(default_value = "all")]
        name: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    C4,
    C6,
    Delta,
    DeltaInv,
    J,
    Eta,
}

#[derive(Subcommand)]
enum ModformsCmd {
    /// Print a series in the series file format, known below q^prec.
    Show {
        #[arg(long, value_enum)]
        form: Form,
    },
}

#[derive(Subcommand)]
enum ModuliCmd {
    /// Orbits of SL2(Z) on the four spin structures.
    OrbitSpin,
    /// Check a sector section against one matrix at the default samples.
    CheckEquivariance {
        #[arg(long, value_name = "FILE")]
        section: PathBuf,
        #[arg(long, value_name = "a,b,c,d")]
        matrix: String,
    },
}

#[derive(Subcommand)]
enum BordismCmd {
    /// Normalize a word file.
    Normalize {
        #[arg(long, value_name = "FILE")]
        word: PathBuf,
    },
    /// Random words: normalization and rule steps leave evaluation unchanged.
    CheckInvariance {
        #[arg(long, value_name = "FILE")]
        theory: PathBuf,
        #[arg(long, default_value_t = 50)]
        words: usize,
    },
}

#[derive(Subcommand)]
enum TheoryCmd {
    /// Build a theory from f = Σ c_n j^n.
    Build {
        #[arg(long, value_name = "c0,c1,...")]
        from_j_poly: String,
        /// Negate the ++ sector via the grading flip on V⁺.
        #[arg(long)]
        flip_plus: bool,
    },
    /// Check conditions (a)-(d) on a theory file.
    Verify {
        #[arg(long, value_name = "FILE")]
        theory: PathBuf,
    },
}

#[derive(Subcommand)]
enum SusyCmd {
    /// Relations and partition function of a fixed model.
    Demo,
    /// Relations and partition function of a model file.
    Check {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

/// What a command produced: printable text or JSON, and whether all checks passed.
struct Outcome {
    text: String,
    json: Value,
    pass: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn reports_outcome(reports: Vec<Report>) -> Outcome {
    let pass = reports.iter().all(|r| r.status.is_pass());
    let mut lines: Vec<String> = reports.iter().map(Report::summary).collect();
    let failed = reports.iter().filter(|r| !r.status.is_pass()).count();
    lines.push(format!(
        "{} passed, {} failed",
        reports.len() - failed,
        failed
    ));
    Outcome {
        text: lines.join("\n"),
        json: serde_json::to_value(&reports).expect("reports serialize"),
        pass,
    }
}

fn config(cli: &Cli) -> Result<Config, Failure> {
    let cfg = Config {
        prec: cli.prec,
        cutoff: cli.cutoff,
        trunc: cli.trunc,
        tol: cli.tol,
        seed: cli.seed,
        timings: cli.timings,
    };
    cfg.validate().map_err(Failure::Usage)?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = config(cli)?;
    match &cli.cmd {
        Cmd::Modforms {
            cmd: ModformsCmd::Show { form },
        } => {
            let p = cli.prec;
            let s = match form {
                Form::C4 => modforms::c4(p),
                Form::C6 => modforms::c6(p),
                Form::Delta => modforms::delta(p),
                Form::DeltaInv => modforms::delta_inv(p),
                Form::J => modforms::j_function(p),
                Form::Eta => modforms::eta(Rational64::from_integer(p)),
            };
            let text = AnySeries::Int(s).to_json();
            let json = serde_json::from_str(&text).expect("series files are JSON");
            Ok(Outcome {
                text,
                json,
                pass: true,
            })
        }
        Cmd::Moduli {
            cmd: ModuliCmd::OrbitSpin,
        } => {
            let orbits: Vec<Vec<String>> = moduli::spin_orbits()
                .iter()
                .map(|o| o.iter().map(ToString::to_string).collect())
                .collect();
            let text = orbits
                .iter()
                .map(|o| format!("{{{}}}", o.join(", ")))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome {
                text,
                json: json!({ "orbits": orbits }),
                pass: true,
            })
        }
        Cmd::Moduli {
            cmd: ModuliCmd::CheckEquivariance { section, matrix },
        } => {
            let sec = SectorSection::from_json(&read(section)?).map_err(Failure::Usage)?;
            let m: SL2Z = matrix.parse().map_err(Failure::Usage)?;
            let rep =
                moduli::check_section_equivariance(&sec, &m, &moduli::default_samples(), cli.tol);
            let mut lines = vec![format!(
                "{} {} under {} (max deviation {:.3e}, tol {:.1e})",
                rep.status, rep.check, rep.generator, rep.deviation, rep.tol
            )];
            for c in &rep.sectors {
                let how = match (&c.exact_ratio, c.deviation) {
                    (Some(r), _) => format!("ratio {r}"),
                    (None, Some(d)) => format!("deviation {d:.3e}"),
                    (None, None) => c.message.clone().unwrap_or_default(),
                };
                lines.push(format!(
                    "  {} -> {}: {} ({how})",
                    c.sector, c.target, c.status
                ));
            }
            Ok(Outcome {
                text: lines.join("\n"),
                json: serde_json::to_value(&rep).expect("serializable"),
                pass: rep.status.is_pass(),
            })
        }
        Cmd::Bordism {
            cmd: BordismCmd::Normalize { word },
        } => {
            let w = BordWord::from_json(&read(word)?).map_err(usage)?;
            let nf = bordism::normalize(&w).map_err(usage)?;
            let steps: Vec<String> = nf.steps.iter().map(ToString::to_string).collect();
            let text = format!(
                "input:  {w}\nnormal: {}\nsteps:  {}\ntau sum: {}",
                nf.word,
                if steps.is_empty() {
                    "none".to_string()
                } else {
                    steps.join(" ")
                },
                bordism::tau_sum(&nf.word)
            );
            let word_json: Value = serde_json::to_value(nf.word.to_file()).expect("serializable");
            Ok(Outcome {
                text,
                json: json!({ "normal_form": word_json, "steps": steps }),
                pass: true,
            })
        }
        Cmd::Bordism {
            cmd: BordismCmd::CheckInvariance { theory, words },
        } => {
            let sth = SpinTheoryData::from_json(&read(theory)?).map_err(usage)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            Ok(reports_outcome(vec![bordism::invariance_report(
                &sth.plus_sector,
                &mut rng,
                *words,
                12,
                1e-9,
            )]))
        }
        Cmd::Theory {
            cmd:
                TheoryCmd::Build {
                    from_j_poly,
                    flip_plus,
                },
        } => {
            let spec = ModularFunctionSpec::parse(from_j_poly).map_err(Failure::Usage)?;
            let f = modforms::eval_mf_spec(&spec, cfg.trunc + 1);
            let th = realization::build_from_series(&f).map_err(usage)?;
            let mut sth = SpinTheoryData::uniform(th);
            sth.flip_plus = *flip_plus;
            let text = sth.to_json().expect("uniform theories fit the file format");
            let json = serde_json::from_str(&text).expect("theory files are JSON");
            Ok(Outcome {
                text,
                json,
                pass: true,
            })
        }
        Cmd::Theory {
            cmd: TheoryCmd::Verify { theory },
        } => {
            let sth = SpinTheoryData::from_json(&read(theory)?).map_err(usage)?;
            Ok(reports_outcome(realization::verify_spin_conditions(
                &sth,
                &moduli::default_samples(),
                cli.tol,
            )))
        }
        Cmd::Susy { cmd } => {
            let model = match cmd {
                SusyCmd::Demo => susy::demo_model(),
                SusyCmd::Check { model } => BlockModel::from_json(&read(model)?).map_err(usage)?,
            };
            Ok(reports_outcome(susy_reports(&model, cli.tol)))
        }
        Cmd::Periodicity { n } => {
            let cert = clifford::periodicity_certificate_at(
                *n,
                Rational64::from_integer(cli.cutoff),
                Rational64::from_integer(cli.prec),
                &moduli::default_samples(),
                cli.tol,
            )
            .map_err(usage)?;
            let mut lines = vec![format!(
                "periodicity n={} cutoff={} prec={}",
                cert.n, cert.cutoff, cert.prec
            )];
            for t in &cert.t_checks {
                let ratio = t
                    .ratio
                    .clone()
                    .unwrap_or_else(|| "not a root of unity".into());
                lines.push(format!(
                    "  T: t({}) vs {}: {} (ratio {ratio})",
                    t.sector,
                    t.target,
                    if t.pass { "pass" } else { "fail" }
                ));
            }
            for s in &cert.s_checks {
                let dev = s
                    .deviation
                    .map_or("n/a".to_string(), |d| format!("{d:.3e}"));
                lines.push(format!(
                    "  S: {} vs {}: {} (deviation {dev}, tol {:.1e})",
                    s.sector, s.target, s.status, cert.s_tol
                ));
            }
            lines.push(format!(
                "overall: {}",
                if cert.pass { "pass" } else { "fail" }
            ));
            Ok(Outcome {
                text: lines.join("\n"),
                json: serde_json::to_value(&cert).expect("serializable"),
                pass: cert.pass,
            })
        }
        Cmd::Suite { name } => {
            let s: Suite = name.parse().map_err(Failure::Usage)?;
            let pool = suite::thread_pool_from_env().map_err(Failure::Usage)?;
            Ok(reports_outcome(pool.install(|| suite::run_suite(s, &cfg))))
        }
    }
}

fn susy_reports(model: &BlockModel, tol: f64) -> Vec<Report> {
    let samples: Vec<_> = moduli::default_samples().iter().map(|p| p.tau).collect();
    let p = susy::partition_qexp(model);
    let series: Vec<(String, String)> = p
        .series
        .terms()
        .map(|(e, c)| (e.to_string(), c.to_string()))
        .collect();
    let mut out = match susy::build_pair(model) {
        Ok(sp) => susy::check_relations(&sp, &samples, tol),
        Err(obs) => vec![Report::exact(
            "susy-build-pair",
            false,
            json!({ "obstructions": obs }),
        )],
    };
    let holomorphic = p.verdict == susy::Verdict::Holomorphic;
    out.push(Report::exact(
        "susy-partition-holomorphic",
        holomorphic,
        json!({ "verdict": p.verdict, "series": series, "pole_order": susy::pole_order(&p) }),
    ));
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Io(m) => m,
            };
            eprintln!("error: {msg}");
            return ExitCode::from(f.code());
        }
    };
    let mut body = if cli.json {
        serde_json::to_string_pretty(&outcome.json).expect("serializable")
    } else {
        outcome.text
    };
    body.push('\n');
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{body}"),
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
