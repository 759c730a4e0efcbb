//! Web-archive access: urlkeys, CDX captures, TimeMaps and the client.

mod cdx;
mod client;
mod stub;
mod surt;
mod timemap;

pub use cdx::{parse_cdx, parse_cdx_line, Capture, Timestamp};
pub use client::{
    cdx_query_url, fixture_body_path, replay_url, ArchiveBackend, ArchiveClient, BackendKind,
    ClientStats, DEFAULT_BACKOFF, DEFAULT_RATE_LIMIT, DEFAULT_RETRIES,
};
pub use stub::FixtureServer;
pub use surt::canonicalize_url;
pub use timemap::{parse_timemap_linkformat, TimeMap};
