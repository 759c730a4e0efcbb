//! Pipeline configuration: a flat TOML file, overridden by `ARCHIVELINK_*`
//! environment variables, overridden in turn by command-line flags.
//!
//! Relative paths in the file resolve against the file's directory; relative
//! paths from the environment or flags resolve against the working directory.

use std::path::{Path, PathBuf};
use std::time::Duration;

use archivelink::archive::{
    ArchiveBackend, BackendKind, DEFAULT_BACKOFF, DEFAULT_RATE_LIMIT, DEFAULT_RETRIES,
};
use serde::Deserialize;

use crate::error::CliError;

pub const ENV_PREFIX: &str = "ARCHIVELINK_";
pub const DEFAULT_WORKERS: usize = 4;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub software: Option<PathBuf>,
    pub publications: Option<PathBuf>,
    pub fixture: Option<PathBuf>,
    pub cdx_endpoint: Option<String>,
    pub replay_endpoint: Option<String>,
    pub offline: Option<bool>,
    pub cache_dir: Option<PathBuf>,
    pub rate_limit: Option<f64>,
    pub retries: Option<u32>,
    pub backoff_ms: Option<u64>,
    pub workers: Option<usize>,
    pub lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub keep_all_statuses: Option<bool>,
}

impl Layer {
    pub fn from_file(path: &Path) -> Result<Layer, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| archivelink::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut layer: Layer = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut layer.software,
            &mut layer.publications,
            &mut layer.fixture,
            &mut layer.cache_dir,
            &mut layer.lexicon,
            &mut layer.rules,
            &mut layer.out,
        ] {
            if let Some(rel) = p.as_mut() {
                if rel.is_relative() {
                    *rel = base.join(&*rel);
                }
            }
        }
        Ok(layer)
    }

    /// Reads `ARCHIVELINK_<FIELD>` variables through `lookup`.
    pub fn from_env(lookup: impl Fn(&str) -> Option<String>) -> Result<Layer, CliError> {
        let var = |name: &str| lookup(&format!("{ENV_PREFIX}{name}")).filter(|v| !v.is_empty());
        fn parse<T: std::str::FromStr>(
            name: &str,
            v: Option<String>,
        ) -> Result<Option<T>, CliError> {
            v.map(|s| {
                s.parse().map_err(|_| {
                    CliError::Config(format!("{ENV_PREFIX}{name}: cannot parse {s:?}"))
                })
            })
            .transpose()
        }
        Ok(Layer {
            software: var("SOFTWARE").map(PathBuf::from),
            publications: var("PUBLICATIONS").map(PathBuf::from),
            fixture: var("FIXTURE").map(PathBuf::from),
            cdx_endpoint: var("CDX_ENDPOINT"),
            replay_endpoint: var("REPLAY_ENDPOINT"),
            offline: parse("OFFLINE", var("OFFLINE"))?,
            cache_dir: var("CACHE_DIR").map(PathBuf::from),
            rate_limit: parse("RATE_LIMIT", var("RATE_LIMIT"))?,
            retries: parse("RETRIES", var("RETRIES"))?,
            backoff_ms: parse("BACKOFF_MS", var("BACKOFF_MS"))?,
            workers: parse("WORKERS", var("WORKERS"))?,
            lexicon: var("LEXICON").map(PathBuf::from),
            rules: var("RULES").map(PathBuf::from),
            out: var("OUT").map(PathBuf::from),
            keep_all_statuses: parse("KEEP_ALL_STATUSES", var("KEEP_ALL_STATUSES"))?,
        })
    }

    /// Fields set in `over` replace those in `self`. A fixture in `over`
    /// clears a remote endpoint from `self` and vice versa.
    pub fn overlay(mut self, over: Layer) -> Layer {
        if over.fixture.is_some() {
            self.cdx_endpoint = None;
            self.replay_endpoint = None;
        }
        if over.cdx_endpoint.is_some() {
            self.fixture = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            software,
            publications,
            fixture,
            cdx_endpoint,
            replay_endpoint,
            offline,
            cache_dir,
            rate_limit,
            retries,
            backoff_ms,
            workers,
            lexicon,
            rules,
            out,
            keep_all_statuses
        );
        self
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub software: PathBuf,
    pub publications: PathBuf,
    pub backend: Option<ArchiveBackend>,
    pub workers: usize,
    pub lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub out: PathBuf,
    pub keep_all_statuses: bool,
}

impl PipelineConfig {
    pub fn resolve(layer: Layer) -> Result<PipelineConfig, CliError> {
        let required = |v: Option<PathBuf>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("`{name}` is not set")))
        };
        let out = layer.out.clone().unwrap_or_else(|| PathBuf::from("out"));
        let backend = match (&layer.fixture, &layer.cdx_endpoint) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "both `fixture` and `cdx_endpoint` are set; configure exactly one backend"
                        .into(),
                ))
            }
            (Some(dir), None) => Some(BackendKind::Fixture { dir: dir.clone() }),
            (None, Some(endpoint)) => Some(BackendKind::Remote {
                endpoint: endpoint.clone(),
                replay: layer
                    .replay_endpoint
                    .clone()
                    .unwrap_or_else(|| endpoint.clone()),
            }),
            (None, None) => None,
        }
        .map(|kind| ArchiveBackend {
            kind,
            rate_limit: layer.rate_limit.unwrap_or(DEFAULT_RATE_LIMIT),
            cache_dir: Some(
                layer
                    .cache_dir
                    .clone()
                    .unwrap_or_else(|| out.join(".cache")),
            ),
            offline: layer.offline.unwrap_or(false),
            retries: layer.retries.unwrap_or(DEFAULT_RETRIES),
            backoff: layer
                .backoff_ms
                .map(Duration::from_millis)
                .unwrap_or(DEFAULT_BACKOFF),
        });
        if let Some(rate) = layer.rate_limit {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(CliError::Config(format!(
                    "rate_limit must be positive, got {rate}"
                )));
            }
        }
        let workers = layer.workers.unwrap_or(DEFAULT_WORKERS);
        if workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        Ok(PipelineConfig {
            software: required(layer.software, "software")?,
            publications: required(layer.publications, "publications")?,
            backend,
            workers,
            lexicon: layer.lexicon,
            rules: layer.rules,
            out,
            keep_all_statuses: layer.keep_all_statuses.unwrap_or(false),
        })
    }

    pub fn backend(&self) -> Result<&ArchiveBackend, CliError> {
        self.backend.as_ref().ok_or_else(|| {
            CliError::Config("no archive backend: set `fixture` or `cdx_endpoint`".into())
        })
    }
}
