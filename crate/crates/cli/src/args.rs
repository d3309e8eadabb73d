use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use forecastability::analytics::TriageStat;
use forecastability::domain::{Frequency, QuantileMethod, RunConfig};
use forecastability::ingest::PanelFormat;
use forecastability::synth::SynthKind;

#[derive(Debug, Parser)]
#[command(name = "forecastability", version, about = "Horizon-specific forecastability diagnostics")]
pub struct Cli {
    /// Worker threads (default: FORECASTABILITY_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the feasibility gates; writes survivors.csv and rejects.csv.
    Gates(PipelineArgs),
    /// Compute AMI profiles of the survivors; writes ami_profiles.csv.
    Ami(PipelineArgs),
    /// Rolling-origin evaluation of the survivors; writes smape.csv and smape_mean.csv.
    Evaluate(PipelineArgs),
    /// Spearman validation; writes validation.csv, validation_summary.csv and heatmap.csv.
    Validate(PipelineArgs),
    /// Tercile triage labels; writes triage.csv.
    Triage(PipelineArgs),
    /// Tercile and strata tables plus report.md.
    Report(PipelineArgs),
    /// Write a synthetic panel in long format.
    Synth(SynthArgs),
    /// gates, ami, evaluate, validate, triage and report in sequence.
    RunAll(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    M4,
    Long,
}

impl From<FormatArg> for PanelFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::M4 => PanelFormat::M4Wide,
            FormatArg::Long => PanelFormat::Long,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantileArg {
    Linear,
    NearestRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TriageStatArg {
    Mean,
    AtH,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Panel file (needed by gates, ami, evaluate and run-all).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// M4 test split whose observations are appended to each training series.
    #[arg(long, value_name = "PATH")]
    pub with_test: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "m4")]
    pub format: FormatArg,

    #[arg(long)]
    pub frequency: Frequency,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    /// Comma-separated probe names.
    #[arg(long, value_delimiter = ',', default_value = "seasonal-naive,ets")]
    pub models: Vec<String>,

    #[arg(long, default_value_t = 10)]
    pub rolls: usize,

    #[arg(long, default_value_t = 1)]
    pub roll_step: usize,

    /// KSG neighbour count.
    #[arg(long, default_value_t = 8)]
    pub k: usize,

    #[arg(long, default_value_t = 0.05)]
    pub scale_floor_quantile: f64,

    #[arg(long, value_enum, default_value = "linear")]
    pub quantile_method: QuantileArg,

    /// Uniform jitter amplitude for KSG ties (off by default).
    #[arg(long)]
    pub ksg_jitter: Option<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Per-series AMI summary used for triage.
    #[arg(long, value_enum, default_value = "mean")]
    pub triage_stat: TriageStatArg,

    /// Horizon used with `--triage-stat at-h`.
    #[arg(long, default_value_t = 1)]
    pub triage_h: usize,
}

impl PipelineArgs {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            rolls: self.rolls,
            roll_step: self.roll_step,
            k_neighbors: self.k,
            scale_floor_quantile: self.scale_floor_quantile,
            quantile_method: match self.quantile_method {
                QuantileArg::Linear => QuantileMethod::Linear,
                QuantileArg::NearestRank => QuantileMethod::NearestRank,
            },
            ksg_jitter: self.ksg_jitter,
            seed: self.seed,
        }
    }

    pub fn triage_stat(&self) -> TriageStat {
        match self.triage_stat {
            TriageStatArg::Mean => TriageStat::Mean,
            TriageStatArg::AtH => TriageStat::AtHorizon(self.triage_h),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    WhiteNoise,
    Ar1,
    SeasonalSine,
    TrendPlusNoise,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,

    /// AR(1) coefficient.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub phi: f64,

    /// Period of the seasonal sine.
    #[arg(long, default_value_t = 12)]
    pub m: usize,

    /// Signal-to-noise variance ratio.
    #[arg(long, default_value_t = 10.0)]
    pub snr: f64,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub slope: f64,

    #[arg(long)]
    pub len: usize,

    #[arg(long, default_value_t = 1)]
    pub count: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub level: f64,

    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    #[arg(long, default_value = "S")]
    pub id_prefix: String,

    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
}

impl SynthArgs {
    pub fn kind(&self) -> SynthKind {
        match self.kind {
            KindArg::WhiteNoise => SynthKind::WhiteNoise,
            KindArg::Ar1 => SynthKind::Ar1 { phi: self.phi },
            KindArg::SeasonalSine => SynthKind::SeasonalSine { m: self.m, snr: self.snr },
            KindArg::TrendPlusNoise => SynthKind::TrendPlusNoise {
                slope: self.slope,
                snr: self.snr,
            },
        }
    }
}
