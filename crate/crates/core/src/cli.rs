//! Command-line interface.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::career::{simulate_career, Career};
use crate::error::Error;
use crate::evidence::{log_bayes_factor_with, AisConfig, ConstantEvidenceMethod, EvidenceReport};
use crate::hazard::HazardParams;
use crate::model::ModelKind;
use crate::predictive::{default_x_max, predictive_pmf, render_table};
use crate::rng;
use crate::sampler::{
    effective_sample_size, run_chain, summarize, ChainConfig, NamedQuery, Pairing, PosteriorSamples,
    PosteriorSummary,
};

#[derive(Debug, Parser)]
#[command(name = "cricket-hazard", version, about = "Bayesian hazard models for batting scores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the posterior of a career with Metropolis-Hastings.
    Fit(FitArgs),
    /// Print summaries and diagnostics of a samples file.
    Summarize(SummarizeArgs),
    /// Estimate both models' evidence and the log Bayes factor.
    Evidence(EvidenceArgs),
    /// Probability that a named comparison holds between two players.
    Compare(CompareArgs),
    /// Write the posterior-predictive hazard table.
    Predict(PredictArgs),
    /// Write a synthetic career drawn from given hazard parameters.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Varying,
    Constant,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Varying => ModelKind::Varying,
            ModelArg::Constant => ModelKind::Constant,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "varying")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 200_000)]
    pub iters: u64,
    #[arg(long, default_value_t = 20_000)]
    pub burn: u64,
    #[arg(long, default_value_t = 10)]
    pub thin: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[arg(long)]
    pub samples: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvidenceArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "ais-runs", default_value_t = 100)]
    pub ais_runs: usize,
    #[arg(long, default_value_t = 1000)]
    pub temps: usize,
    /// Also estimate the constant model by AIS instead of quadrature.
    #[arg(long)]
    pub constant_ais: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PairingArg {
    Shuffle,
    Cross,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long = "samples-a")]
    pub samples_a: PathBuf,
    #[arg(long = "samples-b")]
    pub samples_b: PathBuf,
    #[arg(long)]
    pub query: String,
    #[arg(long, value_enum, default_value = "shuffle")]
    pub pairing: PairingArg,
    /// Seed for the shuffles used by index pairing.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long)]
    pub xmax: Option<u32>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub mu1: f64,
    #[arg(long)]
    pub mu2: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub ell: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "notout-rate", default_value_t = 0.0)]
    pub notout_rate: f64,
    #[arg(long)]
    pub out: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

fn format_summary(player: &str, summary: &PosteriorSummary) -> String {
    let names = summary.kind.param_names();
    let mut out = String::new();
    let _ = writeln!(out, "player\t{}", names.join("\t"));
    let cells: Vec<String> = summary
        .means
        .iter()
        .zip(&summary.sds)
        .map(|(m, s)| format!("{m:.1} ± {s:.1}"))
        .collect();
    let _ = writeln!(out, "{player}\t{}", cells.join("\t"));
    if names.len() > 1 {
        let _ = writeln!(out, "correlation");
        for (name, row) in names.iter().zip(&summary.correlation) {
            let cells: Vec<String> = row.iter().map(|r| format!("{r:+.3}")).collect();
            let _ = writeln!(out, "  {name}\t{}", cells.join("\t"));
        }
        let _ = writeln!(out, "max |correlation|\t{:.3}", summary.max_abs_correlation());
    }
    out
}

pub fn cmd_fit(args: &FitArgs) -> anyhow::Result<String> {
    let career = Career::load(&args.data)?;
    let config = ChainConfig::new(args.iters, args.burn, args.thin, args.seed)?;
    let samples = run_chain(&career, args.model.into(), &config);
    samples.save(&args.out)?;
    let summary = summarize(&samples)?;
    let stats = career.summary();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} innings, {} not out, average {}",
        stats.innings,
        stats.not_outs,
        stats.average.map_or("n/a".to_string(), |a| format!("{a:.2}"))
    );
    let _ = writeln!(
        out,
        "# {} model, {} draws, acceptance {:.3}",
        samples.kind(),
        samples.len(),
        samples.acceptance_rate
    );
    out.push_str(&format_summary(&career.player_id, &summary));
    Ok(out)
}

pub fn cmd_summarize(args: &SummarizeArgs) -> anyhow::Result<String> {
    let samples = PosteriorSamples::load(&args.samples)?;
    let summary = summarize(&samples)?;
    let mut out = format_summary(&samples.metadata.player, &summary);
    let _ = writeln!(out, "draws\t{}", samples.len());
    let _ = writeln!(out, "acceptance\t{:.3}", samples.acceptance_rate);
    if samples.len() >= 10 {
        let ess: Vec<String> = (0..samples.dim())
            .map(|j| effective_sample_size(&samples, j).map(|e| format!("{e:.0}")))
            .collect::<Result<_, _>>()?;
        let _ = writeln!(out, "ess\t{}", ess.join("\t"));
    }
    Ok(out)
}

pub fn cmd_evidence(args: &EvidenceArgs) -> anyhow::Result<String> {
    let career = Career::load(&args.data)?;
    let config = AisConfig::new(args.ais_runs, args.temps, 4.0, 3, args.seed)?;
    let method = if args.constant_ais {
        ConstantEvidenceMethod::Ais
    } else {
        ConstantEvidenceMethod::Quadrature
    };
    let bf = log_bayes_factor_with(&career, &config, method);
    let report = EvidenceReport::new(career.player_id.clone(), &config, &bf);
    if let Some(path) = &args.out {
        write_file(path, &report.to_text())?;
    }
    let mut out = String::new();
    let _ = writeln!(out, "player\t{}", report.player);
    let _ = writeln!(
        out,
        "log Z (varying, ais)\t{:.2} ± {:.2}",
        report.log_z, report.log_z_se
    );
    let _ = writeln!(
        out,
        "log Z0 (constant, {})\t{:.2} ± {:.2}",
        report.z0_method, report.log_z0, report.log_z0_se
    );
    let _ = writeln!(
        out,
        "log Z/Z0\t{:.2} ± {:.2}",
        report.log_bf, report.log_bf_se
    );
    Ok(out)
}

pub fn cmd_compare(args: &CompareArgs) -> anyhow::Result<String> {
    let query: NamedQuery = args.query.parse()?;
    let a = PosteriorSamples::load(&args.samples_a)?;
    let b = PosteriorSamples::load(&args.samples_b)?;
    let pairing = match args.pairing {
        PairingArg::Shuffle => Pairing::Shuffled { seed: args.seed },
        PairingArg::Cross => Pairing::CrossProduct,
    };
    let r = query.evaluate(&[&a, &b], pairing)?;
    Ok(format!(
        "{}({}, {})\t{:.4}\npairs\t{}\n",
        query.name(),
        a.metadata.player,
        b.metadata.player,
        r.probability,
        r.pairs
    ))
}

pub fn cmd_predict(args: &PredictArgs) -> anyhow::Result<String> {
    let samples = PosteriorSamples::load(&args.samples)?;
    let (x_max, note) = match args.xmax {
        Some(0) => bail!("--xmax must be positive"),
        Some(x) => (x, "from --xmax"),
        None => (
            default_x_max(samples.metadata.max_observed_score),
            "default: max(200, 3 x largest observed score)",
        ),
    };
    let dist = predictive_pmf(&samples, x_max)?;
    let table = render_table(&samples, &dist, note);
    write_file(&args.out, &table)?;
    Ok(format!(
        "wrote {} rows to {}\n",
        dist.hazard().len(),
        args.out.display()
    ))
}

pub fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<String> {
    let params = HazardParams::new(args.mu1, args.mu2, args.tau, args.ell)?;
    let mut rng = rng::stream(args.seed);
    let player = args
        .out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let career = simulate_career(&params, args.n, args.notout_rate, player, &mut rng)?;
    let header = format!(
        "# simulated: mu1={} mu2={} tau={} ell={} n={} seed={} notout_rate={}\n",
        args.mu1, args.mu2, args.tau, args.ell, args.n, args.seed, args.notout_rate
    );
    write_file(&args.out, &(header + &career.render()))?;
    Ok(format!("wrote {} innings to {}\n", args.n, args.out.display()))
}

pub fn run(cli: &Cli) -> anyhow::Result<String> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(a).context("fit failed"),
        Command::Summarize(a) => cmd_summarize(a).context("summarize failed"),
        Command::Evidence(a) => cmd_evidence(a).context("evidence failed"),
        Command::Compare(a) => cmd_compare(a).context("compare failed"),
        Command::Predict(a) => cmd_predict(a).context("predict failed"),
        Command::Simulate(a) => cmd_simulate(a).context("simulate failed"),
    }
}

/// Parses `argv`, runs the command, and writes its report to stdout.
/// Diagnostics go to stderr; the return value is the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(report.as_bytes());
            0
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
