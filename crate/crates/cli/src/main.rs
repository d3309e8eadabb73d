mod args;
mod manifest;
mod report;
mod stages;

use std::process::ExitCode;

use clap::Parser;
use forecastability::ingest::{write_long_panel, ResultStore};
use forecastability::synth::{generate, SynthSpec};
use log::error;

use args::{Cli, Command, PipelineArgs, SynthArgs};
use manifest::{Manifest, MANIFEST};
use stages::{CliError, Outcome};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("FORECASTABILITY_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("FORECASTABILITY_THREADS must be a positive integer, got `{v}`"))),
        _ => Ok(None),
    }
}

fn pipeline(
    name: &str,
    args: &PipelineArgs,
    stage: fn(&PipelineArgs, &ResultStore) -> Result<Outcome, CliError>,
) -> Result<Outcome, CliError> {
    args.run_config()
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let store = ResultStore::create(&args.out)?;
    let outcome = stage(args, &store)?;
    let io = |source| CliError::Io {
        path: store.path(MANIFEST),
        source,
    };
    let mut manifest = Manifest::for_pipeline(name, args).map_err(io)?;
    manifest.record_outputs(store.dir()).map_err(io)?;
    manifest.write(&store.path(MANIFEST)).map_err(io)?;
    Ok(outcome)
}

fn synth(args: &SynthArgs) -> Result<Outcome, CliError> {
    let mut spec = SynthSpec::new(args.kind(), args.len, args.count, args.seed);
    spec.level = args.level;
    spec.scale = args.scale;
    spec.id_prefix = args.id_prefix.clone();
    let panel = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    write_long_panel(&args.out, &panel)?;
    let mut manifest = Manifest::for_synth(args);
    let digest = manifest::sha256_file(&args.out).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    manifest.outputs.insert(args.out.display().to_string(), digest);
    let mut sidecar = args.out.clone().into_os_string();
    sidecar.push(".manifest.json");
    manifest.write(sidecar.as_ref()).map_err(|source| CliError::Io {
        path: sidecar.into(),
        source,
    })?;
    Ok(Outcome::Complete)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Gates(a) => pipeline("gates", a, stages::gates),
        Command::Ami(a) => pipeline("ami", a, stages::ami),
        Command::Evaluate(a) => pipeline("evaluate", a, stages::evaluate),
        Command::Validate(a) => pipeline("validate", a, stages::validate_stage),
        Command::Triage(a) => pipeline("triage", a, stages::triage_stage),
        Command::Report(a) => pipeline("report", a, stages::report_stage),
        Command::RunAll(a) => pipeline("run-all", a, stages::run_all),
        Command::Synth(a) => synth(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => {
            error!("finished with partial failures; see warnings above");
            ExitCode::from(EXIT_PARTIAL)
        }
        Err(e @ CliError::Usage(_)) => {
            error!("{e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
