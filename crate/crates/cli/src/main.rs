//! Command-line driver: quasi-norms of spline files, pathology runs with
//! CSV and SVG output, and the full verification suite.
//!
//! Exit codes: 0 pass, 2 usage or configuration error, 3 construction
//! infeasible, 4 verification failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quasisobolev::constructions::plateau;
use quasisobolev::corpus::bspline;
use quasisobolev::experiments::{
    beta_run, douady_run, iso_run, psi_run, section_run, PathologyRun,
};
use quasisobolev::sequences::FundamentalSeq;
use quasisobolev::suite::{run_suite, ExperimentConfig, BETA_DEPTHS, DOUADY_EXPONENT, PSI_INDICES};
use quasisobolev::{sobolev_quasinorm, Error, PiecewisePoly, QuasiNormParams};

const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_FAILED: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "quasisobolev",
    version,
    about = "Sobolev quasi-norm lab for 0 < p < 1"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Exponent(s) p in (0, 1), comma separated
    #[arg(long = "p", global = true, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Sobolev order(s), comma separated
    #[arg(long = "k", global = true, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Probed depths, increasing, comma separated
    #[arg(long, global = true, value_delimiter = ',', num_args = 0..)]
    depths: Option<Vec<usize>>,
    /// Final-distance threshold for verdicts
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Output directory for CSV and SVG files
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON experiment configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized corpus draws
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sobolev quasi-norm of a piecewise polynomial JSON file
    Norm {
        /// `{"breakpoints": [...], "pieces": [[...], ...]}`
        file: PathBuf,
    },
    /// Probe one construction over the configured depths
    Pathology {
        name: Pathology,
        /// Input function (JSON) replacing the default one
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Full verification matrix
    Suite,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Pathology {
    Douady,
    Psi,
    Beta,
    DeltaSection,
    IsoRoundtrip,
}

impl Pathology {
    fn as_str(self) -> &'static str {
        match self {
            Pathology::Douady => "douady",
            Pathology::Psi => "psi",
            Pathology::Beta => "beta",
            Pathology::DeltaSection => "delta-section",
            Pathology::IsoRoundtrip => "iso-roundtrip",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetUnreachable { .. }
        | Error::LadderTooShallow { .. }
        | Error::ToleranceNotMet { .. } => EXIT_INFEASIBLE,
        Error::NotCauchy { .. } | Error::MeanNotZero { .. } => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Usage errors dominate infeasibility, which dominates failed verdicts.
fn worse(a: u8, b: u8) -> u8 {
    let rank = |c: u8| match c {
        EXIT_USAGE => 3,
        EXIT_INFEASIBLE => 2,
        EXIT_FAILED => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

fn load_config(cli: &Cli, command: &str) -> Result<ExperimentConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut c = ExperimentConfig::from_json(&text)?;
            c.command = command.into();
            c
        }
        None if command == "suite" => ExperimentConfig::default(),
        None => ExperimentConfig {
            command: command.into(),
            p_values: vec![0.5],
            k_values: vec![1],
            ..ExperimentConfig::default()
        },
    };
    if let Some(p) = &cli.p {
        config.p_values = p.clone();
    }
    if let Some(k) = &cli.k {
        config.k_values = k.clone();
    }
    if let Some(d) = &cli.depths {
        config.depths = Some(d.clone());
    }
    if let Some(t) = cli.threshold {
        config.threshold = t;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn read_poly(path: &PathBuf) -> Result<PiecewisePoly, Error> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    PiecewisePoly::from_json(&text)
}

fn cmd_norm(cli: &Cli, file: &PathBuf) -> Result<ExitCode, Error> {
    let p = match cli.p.as_deref() {
        Some([p]) => *p,
        None => 0.5,
        Some(_) => return Err(Error::InvalidParams("norm takes a single --p".into())),
    };
    let k = match cli.k.as_deref() {
        Some([k]) => *k,
        None => 0,
        Some(_) => return Err(Error::InvalidParams("norm takes a single --k".into())),
    };
    let f = read_poly(file)?;
    let r = sobolev_quasinorm(&f, &QuasiNormParams::new(p, k)?)?;
    println!(
        "value = {:e}, p_power = {:e}, err_bound = {:e}",
        r.value, r.p_power, r.err_bound
    );
    println!("{}", r.to_json());
    Ok(ExitCode::SUCCESS)
}

/// Default input of the section for order `k`: smooth enough for `W^{k-1,p}`.
fn section_input(k: usize) -> Result<PiecewisePoly, Error> {
    match k {
        1 => Ok(plateau()),
        2 => Ok(PiecewisePoly::hat(0.0, 2.0, 1.0)),
        _ => bspline(&(0..=k).map(|i| i as f64).collect::<Vec<_>>(), 1.0),
    }
}

fn pathology_run(
    name: Pathology,
    input: Option<&PiecewisePoly>,
    p: f64,
    k: usize,
    config: &ExperimentConfig,
) -> Result<PathologyRun, Error> {
    let hat = || {
        input
            .cloned()
            .unwrap_or_else(|| PiecewisePoly::hat(0.0, 2.0, 1.0))
    };
    match name {
        Pathology::Douady => douady_run(
            p,
            DOUADY_EXPONENT,
            &config.probe()?.depths,
            config.threshold,
        ),
        Pathology::Psi => psi_run(p, k, &config.depths_or(&PSI_INDICES)),
        Pathology::Beta => beta_run(
            &hat(),
            "u",
            p,
            k,
            &config.depths_or(&BETA_DEPTHS),
            config.threshold,
        ),
        Pathology::DeltaSection => {
            let g = match input {
                Some(g) => g.clone(),
                None => section_input(k)?,
            };
            let seq = FundamentalSeq::constant("g", g, k - 1, QuasiNormParams::new(p, k - 1)?);
            section_run(&seq, k, &config.probe()?)
        }
        Pathology::IsoRoundtrip => {
            let params = QuasiNormParams::new(p, 0)?;
            let g = FundamentalSeq::constant("g", hat(), 0, params);
            iso_run(
                &g,
                &FundamentalSeq::zero(k - 1, params),
                k,
                &config.probe()?,
            )
        }
    }
}

fn cmd_pathology(cli: &Cli, name: Pathology, input: &Option<PathBuf>) -> Result<ExitCode, Error> {
    let config = load_config(cli, name.as_str())?;
    let input = input.as_ref().map(read_poly).transpose()?;
    let ks: &[usize] = if name == Pathology::Douady {
        &[1]
    } else {
        &config.k_values
    };
    let mut code = 0;
    for &p in &config.p_values {
        for &k in ks {
            let stem = match name {
                Pathology::Douady => format!("douady_p{p}"),
                _ => format!("{}_p{p}_k{k}", name.as_str()),
            };
            let run = match pathology_run(name, input.as_ref(), p, k, &config) {
                Ok(run) => run,
                Err(Error::Io(msg)) => return Err(Error::Io(msg)),
                Err(e) => {
                    eprintln!("error: {stem}: {e}");
                    let c = match e {
                        Error::InsufficientSmoothness { .. } | Error::OrderZero => EXIT_FAILED,
                        _ => exit_code(&e),
                    };
                    code = worse(code, c);
                    continue;
                }
            };
            for s in &run.series {
                println!("# {} {}", run.name, s.name);
                print!("{}", s.to_csv());
            }
            for path in run.write(&config.out_dir, &stem)? {
                println!("wrote {}", path.display());
            }
            println!("{}", run.verdict_line());
            if !run.verdict() {
                code = worse(code, EXIT_FAILED);
            }
        }
    }
    Ok(ExitCode::from(code))
}

fn cmd_suite(cli: &Cli) -> Result<ExitCode, Error> {
    let config = load_config(cli, "suite")?;
    let summary = run_suite(&config)?;
    print!("{}", summary.table());
    let failed = summary.rows.iter().filter(|r| !r.pass).count();
    println!(
        "{} checks, {} failed; {} files under {}",
        summary.rows.len(),
        failed,
        summary.files.len(),
        config.out_dir.display()
    );
    Ok(if summary.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Norm { file } => cmd_norm(&cli, file),
        Command::Pathology { name, input } => cmd_pathology(&cli, *name, input),
        Command::Suite => cmd_suite(&cli),
    };
    result.unwrap_or_else(|e| fail(&e))
}
