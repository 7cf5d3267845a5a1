use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hopf_submersions::classify;
use hopf_submersions::fibrations::{build, hopf::pi9_polynomial};
use hopf_submersions::report::Tolerances;
use hopf_submersions::verify::{self, file_stem, Format, RunConfig};

#[derive(Parser)]
#[command(name = "hopfsub", version, about = "Verify the structure identities of Hopf pseudo-Riemannian submersions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Markdown,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Markdown => Format::Markdown,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite and write one report per fibration.
    Verify {
        /// Fibration id such as pi3, pi_H or pi_H[2,1]; repeatable; `all` selects every default instance.
        #[arg(long = "fibration", default_value = "all")]
        fibrations: Vec<String>,
        #[arg(long, default_value_t = verify::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        /// Tolerance override `id=value`; repeatable.
        #[arg(long = "tol")]
        tol: Vec<String>,
        /// Also run the nested-derivative identities.
        #[arg(long)]
        expensive: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        /// Directory receiving the report files; reports go to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the catalog of submersions.
    Catalog {
        #[arg(long, value_enum, default_value = "markdown")]
        format: OutFormat,
    },
    /// Compare the explicit polynomial form of pi9 with the algebra product.
    CheckPi9 {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
}

fn run_verify(cfg: RunConfig, out: Option<PathBuf>) -> Result<bool> {
    let reports = verify::run(&cfg)?;
    if let Some(dir) = &out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut all = true;
    for r in &reports {
        let text = cfg.format.render(r);
        match &out {
            Some(dir) => {
                let path = dir.join(format!("{}.{}", file_stem(&r.fibration), cfg.format.extension()));
                fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
            }
            None => println!("{text}"),
        }
        let failed: Vec<&str> = r.failures().iter().map(|c| c.id.as_str()).collect();
        if failed.is_empty() {
            eprintln!("{}: pass ({} checks)", r.fibration, r.checks.len());
        } else {
            eprintln!("{}: FAIL {}", r.fibration, failed.join(", "));
            all = false;
        }
    }
    eprintln!("seed {}", cfg.seed);
    Ok(all)
}

fn check_pi9(samples: usize, seed: u64) -> Result<bool> {
    if samples == 0 {
        bail!("at least one sample is required");
    }
    let f = build::<f64>("pi9", &[])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = f.sample_point(&mut rng);
        let d = (pi9_polynomial(&p) - f.eval(&p)).amax() / p.norm_squared();
        worst = worst.max(d);
    }
    let tol = Tolerances::default().get("pi9.polynomial");
    let pass = worst <= tol;
    println!(
        "pi9.polynomial: {samples} points, worst {worst:.3e}, tolerance {tol:.1e}, {}",
        if pass { "pass" } else { "FAIL" }
    );
    Ok(pass)
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let ok = match cli.command {
        Command::Verify {
            fibrations,
            samples,
            seed,
            tol,
            expensive,
            format,
            out,
        } => {
            let mut tolerances = Tolerances::default();
            for t in &tol {
                tolerances.apply_override(t)?;
            }
            let cfg = RunConfig {
                fibrations,
                samples,
                seed,
                tolerances,
                format: format.into(),
                expensive,
            };
            run_verify(cfg, out)?
        }
        Command::Catalog { format } => {
            match format {
                OutFormat::Json => println!("{}", classify::to_json(&classify::catalog())),
                OutFormat::Markdown => print!("{}", classify::to_markdown(&classify::catalog())),
            }
            true
        }
        Command::CheckPi9 { samples, seed } => check_pi9(samples, seed)?,
    };
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
