//! Run configuration: a plain-text key-value/table file with
//! environment-variable interpolation for secrets.
//!
//! ```text
//! seed = 42
//! workers = 4
//!
//! [endpoint.ppl]
//! base_url = http://127.0.0.1:9000
//! model_id = ref-small
//! auth_token = ${SCORER_TOKEN}
//! max_in_flight = 4
//! ```
//!
//! `#` starts a comment; values are trimmed; `${VAR}` expands from the
//! environment (empty when unset, so secrets never need to live on disk).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use deteval_core::scorer::{HttpScorerClient, RetryPolicy, ScorerEndpoint};

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    /// Top-level (unsectioned) keys.
    root: BTreeMap<String, String>,
    /// Section name -> keys.
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

fn interpolate_env(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    let mut rest = value;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        match after.find('}') {
            Some(end) => {
                let var = &after[..end];
                out.push_str(&std::env::var(var).unwrap_or_default());
                rest = &after[end + 1..];
            }
            None => {
                out.push_str(&rest[start..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&content).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(content: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        let mut section: Option<String> = None;
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    bail!("line {}: unterminated section header", lineno + 1);
                };
                section = Some(name.trim().to_string());
                config.sections.entry(section.clone().unwrap()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value", lineno + 1);
            };
            let key = key.trim().to_string();
            let value = interpolate_env(value.trim());
            match &section {
                Some(name) => {
                    config
                        .sections
                        .get_mut(name)
                        .expect("section entry exists")
                        .insert(key, value);
                }
                None => {
                    config.root.insert(key, value);
                }
            }
        }
        Ok(config)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.root.get(key).map(String::as_str)
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .with_context(|| format!("config key {key} = {v:?} is not an integer"))
            })
            .transpose()
    }

    pub fn section(&self, name: &str) -> Option<&BTreeMap<String, String>> {
        self.sections.get(name)
    }

    /// Build the endpoint declared as `[endpoint.<name>]`.
    pub fn endpoint(&self, name: &str) -> Result<ScorerEndpoint> {
        let section_name = format!("endpoint.{name}");
        let Some(section) = self.section(&section_name) else {
            bail!("config has no [{section_name}] section");
        };
        let base_url = section
            .get("base_url")
            .with_context(|| format!("[{section_name}] needs base_url"))?
            .clone();
        let model_id = section
            .get("model_id")
            .with_context(|| format!("[{section_name}] needs model_id"))?
            .clone();
        let mut endpoint = ScorerEndpoint::new(base_url, model_id);
        if let Some(token) = section.get("auth_token") {
            if !token.is_empty() {
                endpoint.auth_token = Some(token.clone());
            }
        }
        if let Some(timeout) = section.get("timeout_secs") {
            endpoint.timeout_secs = timeout
                .parse()
                .with_context(|| format!("[{section_name}] timeout_secs = {timeout:?}"))?;
        }
        if let Some(mif) = section.get("max_in_flight") {
            endpoint.max_in_flight = mif
                .parse()
                .with_context(|| format!("[{section_name}] max_in_flight = {mif:?}"))?;
        }
        Ok(endpoint)
    }

    pub fn client(&self, name: &str) -> Result<HttpScorerClient> {
        let endpoint = self.endpoint(name)?;
        let section = self.section(&format!("endpoint.{name}"));
        let mut retry = RetryPolicy::default();
        if let Some(section) = section {
            if let Some(attempts) = section.get("retry_attempts") {
                retry.max_attempts = attempts
                    .parse()
                    .with_context(|| format!("retry_attempts = {attempts:?}"))?;
            }
            if let Some(base_ms) = section.get("retry_base_ms") {
                retry.base_delay = std::time::Duration::from_millis(
                    base_ms
                        .parse()
                        .with_context(|| format!("retry_base_ms = {base_ms:?}"))?,
                );
            }
        }
        Ok(HttpScorerClient::new(endpoint, retry)?)
    }
}

/// Global settings after merging the config file with command-line flags
/// (flags win).
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: RunConfig,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Settings {
    pub fn resolve(
        config_path: Option<&Path>,
        seed: Option<u64>,
        workers: Option<usize>,
        out_dir: Option<&Path>,
    ) -> Result<Self> {
        let config = match config_path {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let seed = match seed {
            Some(s) => s,
            None => config.get_u64("seed")?.unwrap_or(42),
        };
        let workers = match workers {
            Some(w) => w,
            None => match config.get_u64("workers")? {
                Some(w) => w as usize,
                None => std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(4),
            },
        };
        let out_dir = out_dir
            .map(Path::to_path_buf)
            .or_else(|| config.get("out_dir").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("deteval-out"));
        std::fs::create_dir_all(&out_dir)
            .with_context(|| format!("creating output dir {}", out_dir.display()))?;
        Ok(Settings {
            config,
            seed,
            workers,
            out_dir,
        })
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}
