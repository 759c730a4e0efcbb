//! Capture lookup and body retrieval against a remote CDX/replay service or a
//! local fixture directory, with a content-addressed disk cache.
//!
//! Remote protocol:
//! - `GET {endpoint}/cdx/search/cdx?url={url}&output=text[&from=YYYY&to=YYYY]`
//! - `GET {replay}/web/{timestamp}id_/{original}` for the unrewritten body
//!
//! Fixture layout: `{dir}/captures.cdx` plus
//! `{dir}/bodies/{urlkey with '/' replaced by '_'}/{timestamp}.html`.
//!
//! Cache layout: `{cache}/queries/{sha256(query)}.cdx` and
//! `{cache}/bodies/{sha256(urlkey timestamp digest)}.bin`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, OnceLock};
use std::thread;
use std::time::{Duration, Instant};

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use sha2::{Digest, Sha256};

use super::cdx::{parse_cdx, Capture};
use super::surt::canonicalize_url;
use super::timemap::TimeMap;
use crate::error::{Error, Result};
use crate::fsutil::write_bytes_atomic;

/// Everything except RFC 3986 unreserved characters is escaped.
const QUERY_VALUE: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~');

pub const DEFAULT_RATE_LIMIT: f64 = 1.0;
pub const DEFAULT_RETRIES: u32 = 3;
pub const DEFAULT_BACKOFF: Duration = Duration::from_secs(1);
const BODY_LIMIT: u64 = 64 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq)]
pub enum BackendKind {
    Remote { endpoint: String, replay: String },
    Fixture { dir: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveBackend {
    pub kind: BackendKind,
    /// Maximum requests per second sent to a remote archive.
    pub rate_limit: f64,
    pub cache_dir: Option<PathBuf>,
    /// Serve remote lookups from the cache only; a miss is a network error.
    pub offline: bool,
    pub retries: u32,
    /// First retry delay; doubles on each further attempt.
    pub backoff: Duration,
}

impl ArchiveBackend {
    pub fn fixture(dir: impl Into<PathBuf>) -> Self {
        Self::with_kind(BackendKind::Fixture { dir: dir.into() })
    }

    pub fn remote(endpoint: impl Into<String>, replay: impl Into<String>) -> Self {
        Self::with_kind(BackendKind::Remote {
            endpoint: endpoint.into(),
            replay: replay.into(),
        })
    }

    fn with_kind(kind: BackendKind) -> Self {
        ArchiveBackend {
            kind,
            rate_limit: DEFAULT_RATE_LIMIT,
            cache_dir: None,
            offline: false,
            retries: DEFAULT_RETRIES,
            backoff: DEFAULT_BACKOFF,
        }
    }

    pub fn with_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }
}

/// The CDX query URL for `url`, optionally bounded to a range of years.
pub fn cdx_query_url(
    endpoint: &str,
    url: &str,
    from_year: Option<i32>,
    to_year: Option<i32>,
) -> String {
    let mut q = format!(
        "{}/cdx/search/cdx?url={}&output=text",
        endpoint.trim_end_matches('/'),
        utf8_percent_encode(url, QUERY_VALUE)
    );
    if let Some(from) = from_year {
        q.push_str(&format!("&from={from:04}"));
    }
    if let Some(to) = to_year {
        q.push_str(&format!("&to={to:04}"));
    }
    q
}

/// The raw-body replay URL for a capture.
pub fn replay_url(replay: &str, capture: &Capture) -> String {
    format!(
        "{}/web/{}id_/{}",
        replay.trim_end_matches('/'),
        capture.timestamp,
        capture.original
    )
}

/// Relative path of a capture body inside a fixture directory.
pub fn fixture_body_path(capture: &Capture) -> PathBuf {
    Path::new("bodies")
        .join(capture.urlkey.replace('/', "_"))
        .join(format!("{}.html", capture.timestamp))
}

#[derive(Debug, Default)]
pub struct ClientStats {
    pub cache_hits: AtomicU64,
    pub backend_reads: AtomicU64,
    pub http_requests: AtomicU64,
}

struct RateLimiter {
    interval: Duration,
    next: Mutex<Instant>,
}

impl RateLimiter {
    fn new(per_second: f64) -> Self {
        RateLimiter {
            interval: Duration::from_secs_f64(1.0 / per_second),
            next: Mutex::new(Instant::now()),
        }
    }

    fn acquire(&self) {
        let wait = {
            let mut next = self.next.lock().expect("rate limiter poisoned");
            let now = Instant::now();
            let slot = (*next).max(now);
            *next = slot + self.interval;
            slot - now
        };
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }
}

struct FixtureIndex {
    fingerprint: String,
    by_key: HashMap<String, Vec<Capture>>,
}

impl FixtureIndex {
    fn load(dir: &Path) -> std::result::Result<Self, String> {
        let path = dir.join("captures.cdx");
        let text = fs::read_to_string(&path)
            .map_err(|e| format!("fixture index {}: {e}", path.display()))?;
        let mut by_key: HashMap<String, Vec<Capture>> = HashMap::new();
        for capture in parse_cdx(&text).map_err(|e| format!("{}: {e}", path.display()))? {
            by_key
                .entry(capture.urlkey.clone())
                .or_default()
                .push(capture);
        }
        Ok(FixtureIndex {
            fingerprint: hex::encode(Sha256::digest(text.as_bytes())),
            by_key,
        })
    }
}

/// A backend plus its runtime state. Safe to share between worker threads.
pub struct ArchiveClient {
    backend: ArchiveBackend,
    limiter: RateLimiter,
    agent: ureq::Agent,
    fixture: OnceLock<std::result::Result<FixtureIndex, String>>,
    stats: ClientStats,
}

enum Fetched {
    Body(Vec<u8>),
    NotFound,
}

impl ArchiveClient {
    pub fn new(backend: ArchiveBackend) -> Result<Self> {
        if !(backend.rate_limit > 0.0 && backend.rate_limit.is_finite()) {
            return Err(Error::Validation(format!(
                "rate limit must be positive, got {}",
                backend.rate_limit
            )));
        }
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(60)))
            .user_agent(concat!("archivelink/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        Ok(ArchiveClient {
            limiter: RateLimiter::new(backend.rate_limit),
            backend,
            agent,
            fixture: OnceLock::new(),
            stats: ClientStats::default(),
        })
    }

    pub fn backend(&self) -> &ArchiveBackend {
        &self.backend
    }

    pub fn stats(&self) -> &ClientStats {
        &self.stats
    }

    /// All captures of `url`'s urlkey, optionally limited to an inclusive
    /// range of years. An uncaptured URL yields an empty timemap.
    pub fn query_captures(
        &self,
        url: &str,
        from_year: Option<i32>,
        to_year: Option<i32>,
    ) -> Result<TimeMap> {
        let key = canonicalize_url(url)?;
        match &self.backend.kind {
            BackendKind::Fixture { dir } => {
                let index = self.fixture_index(dir)?;
                let query = format!(
                    "fixture:{}?url={}&from={:?}&to={:?}",
                    index.fingerprint, key, from_year, to_year
                );
                let text = self.cached_query(&query, || {
                    let captures = index
                        .by_key
                        .get(&key)
                        .map(Vec::as_slice)
                        .unwrap_or_default();
                    let tm = TimeMap::new([key.clone()], captures.to_vec())
                        .within_years(from_year, to_year);
                    Ok(cdx_text(tm.captures()))
                })?;
                Ok(TimeMap::new([key], parse_cdx(&text)?))
            }
            BackendKind::Remote { endpoint, .. } => {
                let query = cdx_query_url(endpoint, url, from_year, to_year);
                let text = self.cached_query(&query, || match self.http_get(&query)? {
                    Fetched::Body(bytes) => String::from_utf8(bytes).map_err(|_| Error::Network {
                        url: query.clone(),
                        reason: "CDX response is not UTF-8".into(),
                    }),
                    Fetched::NotFound => {
                        Err(Error::Backend(format!("CDX endpoint not found: {query}")))
                    }
                })?;
                let captures = parse_cdx(&text)?;
                Ok(TimeMap::new([key], captures).within_years(from_year, to_year))
            }
        }
    }

    /// The archived body of `capture`, exactly as stored.
    pub fn fetch_capture_body(&self, capture: &Capture) -> Result<Vec<u8>> {
        let cache_path = self.backend.cache_dir.as_ref().map(|dir| {
            let id = format!(
                "{} {} {}",
                capture.urlkey, capture.timestamp, capture.digest
            );
            dir.join("bodies").join(format!("{}.bin", sha256_hex(&id)))
        });
        if let Some(path) = &cache_path {
            if let Ok(bytes) = fs::read(path) {
                self.stats.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(bytes);
            }
        }

        let bytes = match &self.backend.kind {
            BackendKind::Fixture { dir } => {
                let path = dir.join(fixture_body_path(capture));
                self.stats.backend_reads.fetch_add(1, Ordering::Relaxed);
                match fs::read(&path) {
                    Ok(bytes) => bytes,
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                        return Err(Error::NotFound(format!("no body at {}", path.display())))
                    }
                    Err(e) => return Err(Error::io(path, e)),
                }
            }
            BackendKind::Remote { replay, .. } => {
                let url = replay_url(replay, capture);
                if self.backend.offline {
                    return Err(offline_miss(&url));
                }
                match self.http_get(&url)? {
                    Fetched::Body(bytes) => bytes,
                    Fetched::NotFound => return Err(Error::NotFound(url)),
                }
            }
        };
        if let Some(path) = &cache_path {
            write_bytes_atomic(path, &bytes)?;
        }
        Ok(bytes)
    }

    fn fixture_index(&self, dir: &Path) -> Result<&FixtureIndex> {
        self.fixture
            .get_or_init(|| {
                if !dir.is_dir() {
                    return Err(format!(
                        "fixture directory {} does not exist",
                        dir.display()
                    ));
                }
                FixtureIndex::load(dir)
            })
            .as_ref()
            .map_err(|e| Error::Backend(e.clone()))
    }

    fn cached_query(&self, query: &str, fetch: impl FnOnce() -> Result<String>) -> Result<String> {
        let path = self.backend.cache_dir.as_ref().map(|dir| {
            dir.join("queries")
                .join(format!("{}.cdx", sha256_hex(query)))
        });
        if let Some(path) = &path {
            if let Ok(text) = fs::read_to_string(path) {
                self.stats.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(text);
            }
        }
        if self.backend.offline && matches!(self.backend.kind, BackendKind::Remote { .. }) {
            return Err(offline_miss(query));
        }
        self.stats.backend_reads.fetch_add(1, Ordering::Relaxed);
        let text = fetch()?;
        if let Some(path) = &path {
            write_bytes_atomic(path, text.as_bytes())?;
        }
        Ok(text)
    }

    fn http_get(&self, url: &str) -> Result<Fetched> {
        let mut last_error = String::new();
        for attempt in 0..=self.backend.retries {
            if attempt > 0 {
                thread::sleep(self.backend.backoff * 2u32.saturating_pow(attempt - 1));
            }
            self.limiter.acquire();
            self.stats.http_requests.fetch_add(1, Ordering::Relaxed);
            match self.agent.get(url).call() {
                Ok(mut response) => {
                    let status = response.status().as_u16();
                    match status {
                        200..=299 => {
                            match response
                                .body_mut()
                                .with_config()
                                .limit(BODY_LIMIT)
                                .read_to_vec()
                            {
                                Ok(bytes) => return Ok(Fetched::Body(bytes)),
                                Err(e) => last_error = e.to_string(),
                            }
                        }
                        404 | 410 => return Ok(Fetched::NotFound),
                        429 | 500..=599 => last_error = format!("HTTP {status}"),
                        _ => return Err(Error::Backend(format!("HTTP {status} for {url}"))),
                    }
                }
                Err(e) => last_error = e.to_string(),
            }
            log::debug!("GET {url} attempt {} failed: {last_error}", attempt + 1);
        }
        Err(Error::Network {
            url: url.to_string(),
            reason: format!("{last_error} (after {} attempts)", self.backend.retries + 1),
        })
    }
}

fn offline_miss(url: &str) -> Error {
    Error::Network {
        url: url.to_string(),
        reason: "offline and not in cache".into(),
    }
}

fn cdx_text(captures: &[Capture]) -> String {
    let mut out = String::new();
    for c in captures {
        out.push_str(&c.to_cdx_line());
        out.push('\n');
    }
    out
}

fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}
