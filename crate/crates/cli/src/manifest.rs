use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use forecastability::analytics::TriageStat;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{PipelineArgs, SynthArgs};

pub const MANIFEST: &str = "run_manifest.json";

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub settings: BTreeMap<String, String>,
    /// sha256 of each input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    /// sha256 of each result file, keyed by file name.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

impl Manifest {
    fn new(command: &str) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            settings: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    fn set(&mut self, key: &str, value: impl ToString) {
        self.settings.insert(key.to_string(), value.to_string());
    }

    pub fn for_pipeline(command: &str, args: &PipelineArgs) -> std::io::Result<Self> {
        let mut m = Manifest::new(command);
        let config = args.run_config();
        m.set("format", format!("{:?}", args.format).to_lowercase());
        m.set("frequency", args.frequency);
        m.set("models", args.models.join(","));
        m.set("rolls", config.rolls);
        m.set("roll_step", config.roll_step);
        m.set("k_neighbors", config.k_neighbors);
        m.set("scale_floor_quantile", config.scale_floor_quantile);
        m.set("quantile_method", config.quantile_method.as_str());
        m.set("ksg_jitter", config.ksg_jitter.map_or("off".to_string(), |j| j.to_string()));
        m.set("seed", config.seed);
        m.set(
            "triage_stat",
            match args.triage_stat() {
                TriageStat::Mean => "mean".to_string(),
                TriageStat::AtHorizon(h) => format!("at-h:{h}"),
            },
        );
        for path in args.input.iter().chain(&args.with_test) {
            m.inputs.insert(path.display().to_string(), sha256_file(path)?);
        }
        Ok(m)
    }

    pub fn for_synth(args: &SynthArgs) -> Self {
        let mut m = Manifest::new("synth");
        m.set("kind", format!("{:?}", args.kind()));
        m.set("len", args.len);
        m.set("count", args.count);
        m.set("seed", args.seed);
        m.set("level", args.level);
        m.set("scale", args.scale);
        m.set("id_prefix", &args.id_prefix);
        m
    }

    /// Records digests of every regular file in `dir` other than the manifest.
    pub fn record_outputs(&mut self, dir: &Path) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if entry.file_type()?.is_file() && name != MANIFEST {
                self.outputs.insert(name, sha256_file(&entry.path())?);
            }
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(path, text)
    }
}
