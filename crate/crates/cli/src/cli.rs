use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use confboost_core::synth::{case_table, CaseTableSpec};

use crate::config::{Kappa, MinConfidence, MinSupport, PipelineConfig};
use crate::error::{CliError, Result};
use crate::pipeline::{analyze_stage, bin_stage, mine_stage, report, run_pipeline, OutDir};

#[derive(Debug, Parser)]
#[command(
    name = "confboost",
    version,
    about = "Bin case data, mine target-constrained rules and score indicators by rule pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bin, mine and analyze in one go.
    Run(StageArgs),
    /// Bin the input CSVs into binned.csv and store.json.
    Bin(StageArgs),
    /// Mine store.json into frequent.jsonl and rules.jsonl.
    Mine(StageArgs),
    /// Score indicators from rules.jsonl into indicators.json and plotdata.json.
    Analyze(StageArgs),
    /// Print indicators.json as a table.
    Report(ReportArgs),
    /// Write a synthetic case table, TSH history and config.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StageArgs {
    /// Pipeline config (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Cases CSV, overriding the config.
    #[arg(long)]
    pub cases: Option<PathBuf>,
    /// TSH history CSV, overriding the config.
    #[arg(long)]
    pub tsh: Option<PathBuf>,
    /// Minimum joint count, or a fraction of the rows (e.g. 0.006 or 10/1673).
    #[arg(long, value_parser = parse::<MinSupport>)]
    pub min_support: Option<MinSupport>,
    /// Minimum confidence in [0, 1], or `beta-squared`.
    #[arg(long, value_parser = parse::<MinConfidence>)]
    pub min_confidence: Option<MinConfidence>,
    /// Largest antecedent size to mine.
    #[arg(long)]
    pub max_k: Option<usize>,
    /// Leave out the empty-antecedent rule.
    #[arg(long)]
    pub no_baseline: bool,
    /// Pair filter threshold on |ln CR|: a number, `printed` (0.223) or `ln-inv-0.95`.
    #[arg(long, value_parser = parse::<Kappa>)]
    pub kappa: Option<Kappa>,
    #[arg(long)]
    pub pic_threshold: Option<f64>,
    #[arg(long)]
    pub acb_threshold: Option<f64>,
    /// Most swarm points kept per indicator.
    #[arg(long)]
    pub swarm_cap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Only the first N rows.
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DemoSize {
    /// 437 rows.
    Small,
    /// 2091 rows, 1673 retained.
    Study,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    /// Directory for cases.csv, tsh.csv and config.json.
    #[arg(long, default_value = "demo")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "small")]
    pub size: DemoSize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse<T: std::str::FromStr<Err = CliError>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

impl StageArgs {
    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(c) = &self.cases {
            cfg.cases = Some(std::path::absolute(c).map_err(|e| CliError::file(c, e))?);
        }
        if let Some(t) = &self.tsh {
            cfg.tsh = Some(std::path::absolute(t).map_err(|e| CliError::file(t, e))?);
        }
        if let Some(v) = self.min_support {
            cfg.miner.min_support = v;
        }
        if let Some(v) = self.min_confidence {
            cfg.miner.min_confidence = v;
        }
        if self.max_k.is_some() {
            cfg.miner.max_k = self.max_k;
        }
        if self.no_baseline {
            cfg.miner.include_baseline = false;
        }
        if let Some(v) = self.kappa {
            cfg.analysis.kappa = v;
        }
        if let Some(v) = self.pic_threshold {
            cfg.analysis.pic_threshold = v;
        }
        if let Some(v) = self.acb_threshold {
            cfg.analysis.acb_threshold = v;
        }
        if let Some(v) = self.swarm_cap {
            cfg.analysis.swarm_cap = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        Ok(cfg)
    }
}

fn with_jobs<T>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match jobs {
        None => f(),
        Some(0) => Err(CliError::Input("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(f),
    }
}

pub fn write_demo(args: &DemoArgs) -> Result<()> {
    let spec = match args.size {
        DemoSize::Small => CaseTableSpec::demo(args.seed),
        DemoSize::Study => CaseTableSpec::study_sized(args.seed),
    };
    let data = case_table(&spec);
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::file(&args.out, e))?;
    let internal = |e: confboost_core::binning::BinningError| CliError::Internal(e.to_string());
    let mut cases = Vec::new();
    data.write_cases(&mut cases).map_err(internal)?;
    let mut tsh = Vec::new();
    data.write_tsh(&mut tsh).map_err(internal)?;
    let mut cfg = PipelineConfig::from_binning(data.config);
    cfg.cases = Some("cases.csv".into());
    cfg.tsh = Some("tsh.csv".into());
    cfg.seed = args.seed;
    for (name, bytes) in [
        ("cases.csv", cases),
        ("tsh.csv", tsh),
        ("config.json", serde_json::to_vec_pretty(&cfg).map_err(|e| CliError::Internal(e.to_string()))?),
    ] {
        crate::artifacts::write(&args.out.join(name), &bytes)?;
    }
    Ok(())
}

pub fn execute<W: Write>(cli: Cli, stdout: &mut W) -> Result<()> {
    match cli.command {
        Command::Run(a) => {
            let cfg = a.pipeline_config()?;
            with_jobs(a.jobs, || run_pipeline(&cfg, &OutDir::new(&a.out)).map(|_| ()))
        }
        Command::Bin(a) => {
            let cfg = a.pipeline_config()?;
            with_jobs(a.jobs, || bin_stage(&cfg, &OutDir::new(&a.out)).map(|_| ()))
        }
        Command::Mine(a) => {
            let cfg = a.pipeline_config()?;
            with_jobs(a.jobs, || mine_stage(&cfg, &OutDir::new(&a.out)).map(|_| ()))
        }
        Command::Analyze(a) => {
            let cfg = a.pipeline_config()?;
            with_jobs(a.jobs, || analyze_stage(&cfg, &OutDir::new(&a.out)).map(|_| ()))
        }
        Command::Report(a) => report(&OutDir::new(&a.out), a.top, stdout),
        Command::Demo(a) => write_demo(&a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T, W>(args: I, stdout: &mut W) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Input(e.to_string()))?;
    execute(cli, stdout)
}
