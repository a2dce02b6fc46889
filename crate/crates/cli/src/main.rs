use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use lowdeg::boolfn::{fourier_degree, lowdeg_distance_lower_bound, parseval_tail};
use lowdeg::constructions::{
    build_block_function, derive_seed, farness_certificate, rng_from_seed, sample_family, DistributionMode,
    DistributionParams, FarnessMode,
};
use lowdeg::io;
use lowdeg::oracle::{brute_force_min_distance, ORACLE_MAX_ARITY};
use lowdeg::protocol::{compile_and_run, AcceptAll, AdaptiveWalkTester, DerivativeTester, Tester, Verdict};
use lowdeg::reduction::{classify_h, combine_h, families_from_block_instance};
use lowdeg::verify::{parse_range_list, run_grid, GridConfig};
use lowdeg::yao::{coverage_report, estimate_tester_error, QueryPlan};

/// Exact checks on low-degree testing lower-bound constructions.
#[derive(Parser)]
#[command(name = "lowdeg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Positive,
    Negative,
}

#[derive(Clone, Copy, ValueEnum)]
enum TesterKind {
    Derivative,
    Adaptive,
    AcceptAll,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decision {
    Accept,
    Reject,
}

#[derive(Clone, Copy, ValueEnum)]
enum Certify {
    Prop2,
    Prop3,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification grid and write its report.
    Verify {
        /// Grid config file; without it the full default grid runs.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory receiving report.csv and report.json.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Format printed to stdout.
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Write the exact Fourier spectrum of a function file as CSV.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the Fourier degree of a function file.
    Degree {
        #[arg(long)]
        input: PathBuf,
    },
    /// Tail weight above degree d and the distance lower bound it gives.
    Distance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: usize,
        /// Also compute the exact distance by brute force (n ≤ 4).
        #[arg(long)]
        oracle: bool,
    },
    /// Build a block function from a family file or a random distribution.
    Construct {
        #[arg(long, conflicts_with = "mode")]
        family: Option<PathBuf>,
        #[arg(long, value_enum, requires_all = ["n", "k", "l"])]
        mode: Option<Mode>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Function file to write; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the family file.
        #[arg(long)]
        family_output: Option<PathBuf>,
        /// Print a farness certificate row for this degree parameter.
        #[arg(long, value_enum, requires = "m")]
        certify: Option<Certify>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Map a block DISJ instance to h = f·g·χ and classify it.
    EmbedDisj {
        #[arg(long)]
        input: PathBuf,
        /// Ambient arity; the degree parameter is n - m.
        #[arg(long)]
        n: usize,
        /// Function file for h; skipped when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Verdict JSON file; stdout when absent.
        #[arg(long)]
        verdict: Option<PathBuf>,
    },
    /// Run a tester through the two-party protocol on f and g.
    SimulateProtocol {
        #[arg(long, value_enum, default_value = "derivative")]
        tester: TesterKind,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        l: usize,
        /// Degree parameter of the derivative tester.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Walk length of the adaptive tester.
        #[arg(long, default_value_t = 16)]
        steps: usize,
        /// Seed list such as `0..99` or `1,5,9`.
        #[arg(long, default_value = "0..9")]
        seeds: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Coverage, analytic floor and Monte Carlo error of a random query plan.
    ExperimentYao {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "accept")]
        decision: Decision,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    let text = if text.ends_with('\n') { text.to_owned() } else { format!("{text}\n") };
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_function(path: &Path) -> anyhow::Result<lowdeg::BooleanFunction> {
    io::function_from_json(&read(path)?).with_context(|| path.display().to_string())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Verify { config, output_dir, seed, format } => {
            let mut cfg = match &config {
                Some(p) => GridConfig::parse(&read(p)?).with_context(|| p.display().to_string())?,
                None => GridConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = run_grid(&cfg);
            if let Some(dir) = &output_dir {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                emit(Some(&dir.join("report.csv")), &report.to_csv())?;
                emit(Some(&dir.join("report.json")), &report.to_json())?;
            }
            match format {
                Format::Csv => emit(None, &report.to_csv())?,
                Format::Json => emit(None, &report.to_json())?,
            }
            let s = &report.summary;
            eprintln!("seed {}: {} pass, {} fail, {} skip, {} info", report.seed, s.pass, s.fail, s.skip, s.info);
            Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Transform { input, output } => {
            let f = load_function(&input)?;
            emit(output.as_deref(), &io::spectrum_to_csv(&f.walsh_hadamard()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Degree { input } => {
            let f = load_function(&input)?;
            emit(None, &fourier_degree(&f.walsh_hadamard())?.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Distance { input, d, oracle } => {
            let f = load_function(&input)?;
            let spec = f.walsh_hadamard();
            let mut out = json!({
                "n": f.arity(),
                "d": d,
                "tail": parseval_tail(&spec, d)?,
                "distance_lower_bound": lowdeg_distance_lower_bound(&spec, d)?,
            });
            if oracle {
                if f.arity() > ORACLE_MAX_ARITY {
                    bail!("brute-force distance needs n ≤ {ORACLE_MAX_ARITY}");
                }
                out["oracle_min"] = json!(brute_force_min_distance(&f, d)?);
            }
            emit(None, &out.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Construct { family, mode, n, k, l, seed, output, family_output, certify, m } => {
            let fam = match (family, mode) {
                (Some(p), _) => io::family_from_json(&read(&p)?).with_context(|| p.display().to_string())?,
                (None, Some(mode)) => {
                    let params = DistributionParams {
                        n: n.expect("required by clap"),
                        k: k.expect("required by clap"),
                        l: l.expect("required by clap"),
                        mode: match mode {
                            Mode::Positive => DistributionMode::Positive,
                            Mode::Negative => DistributionMode::Negative,
                        },
                        seed,
                    };
                    sample_family(&params)?.family
                }
                (None, None) => bail!("give --family or --mode with --n, --k, --l"),
            };
            let f = build_block_function(&fam)?;
            emit(output.as_deref(), &io::function_to_json(&f))?;
            if let Some(p) = family_output {
                emit(Some(&p), &io::family_to_json(&fam))?;
            }
            if let (Some(c), Some(m)) = (certify, m) {
                let mode = match c {
                    Certify::Prop2 => FarnessMode::Prop2,
                    Certify::Prop3 => FarnessMode::Prop3,
                };
                let cert = farness_certificate(&fam, m, mode)?;
                let oracle = (fam.arity() <= ORACLE_MAX_ARITY)
                    .then(|| brute_force_min_distance(&f, cert.degree_threshold))
                    .transpose()?;
                let text = format!("{}\n{}", io::CERTIFICATE_CSV_HEADER, io::certificate_csv_row(&cert, oracle));
                if output.is_none() {
                    eprintln!("{text}");
                } else {
                    emit(None, &text)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::EmbedDisj { input, n, output, verdict } => {
            let inst = io::instance_from_json(&read(&input)?).with_context(|| input.display().to_string())?;
            let blocks = inst.l_blocks();
            if !blocks.is_power_of_two() {
                bail!("l_blocks = {blocks} is not a power of two");
            }
            let l = blocks.trailing_zeros() as usize;
            let Some(k) = n.checked_sub(inst.m()) else {
                bail!("n = {n} is smaller than the block length {}", inst.m());
            };
            let ci = families_from_block_instance(&inst, n, k, l)?;
            let v = classify_h(&ci)?;
            if let Some(p) = output {
                emit(Some(&p), &io::function_to_json(&combine_h(&ci)?))?;
            }
            let out = json!({
                "classification": v.classification.to_string(),
                "degree": v.degree,
                "tail": v.tail,
                "n": n,
                "k": k,
                "l": l,
            });
            emit(verdict.as_deref(), &out.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SimulateProtocol { tester, f, g, l, k, rounds, steps, seeds, output } => {
            let (f, g) = (load_function(&f)?, load_function(&g)?);
            let n = f.arity();
            let tester: Box<dyn Tester> = match tester {
                TesterKind::Derivative => Box::new(DerivativeTester::new(n, k, rounds)?),
                TesterKind::Adaptive => Box::new(AdaptiveWalkTester::new(n, steps)),
                TesterKind::AcceptAll => Box::new(AcceptAll::new(n)),
            };
            let seeds = parse_range_list(&seeds).map_err(anyhow::Error::msg).context("--seeds")?;
            let mut csv = String::from("seed,queries,bits,verdict\n");
            for seed in seeds {
                let t = compile_and_run(tester.as_ref(), &f, &g, l, seed as u64)?;
                csv.push_str(&format!("{},{},{},{}\n", t.seed, t.queries_made, t.bits_exchanged, t.verdict));
            }
            emit(output.as_deref(), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExperimentYao { n, k, l, d, samples, seed, decision } => {
            let params = DistributionParams { n, k, l, mode: DistributionMode::Negative, seed };
            params.validate()?;
            if !params.minimax_admissible() {
                bail!("needs l ≤ k/2 - 1");
            }
            let plan = QueryPlan::random(n, d, &mut rng_from_seed(derive_seed(seed, 0)))?;
            let cov = coverage_report(&plan, l)?;
            let verdict = match decision {
                Decision::Accept => Verdict::Accept,
                Decision::Reject => Verdict::Reject,
            };
            let est = estimate_tester_error(&plan, &move |_: &[i8]| verdict, &params, samples, derive_seed(seed, 1))?;
            let out = json!({
                "n": n,
                "k": k,
                "l": l,
                "d": d,
                "seed": seed,
                "samples": samples,
                "covered": cov.covered_prefixes.len(),
                "analytic_floor": cov.undistinguished_mass,
                "mc_estimate": est.estimate,
                "ci95": [est.ci95.0, est.ci95.1],
            });
            emit(None, &out.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
