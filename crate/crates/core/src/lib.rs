//! Links software records and the publications that cite them to captures of
//! the software's homepage in a web archive.
//!
//! The pipeline stages are independent modules:
//!
//! - [`catalog`]: software/publication records and the top-cited publication
//! - [`mention`]: trigger-term mention candidates in publication text
//! - [`archive`]: urlkeys, CDX captures, TimeMaps, remote/fixture client
//! - [`linker`]: archival status relative to the top publication year
//! - [`classify`]: information categories found on an archived page
//! - [`report`]: per-year and per-category aggregates

pub mod archive;
pub mod catalog;
pub mod classify;
mod error;
mod fsutil;
pub mod linker;
pub mod mention;
pub mod report;

pub use archive::{ArchiveBackend, ArchiveClient, Capture, TimeMap, Timestamp};
pub use catalog::{load_catalog, top_publication, CatalogIndex, PublicationRecord, SoftwareRecord};
pub use classify::{ContentProfile, RuleSet};
pub use error::{Error, Result};
pub use linker::{link_software, LinkOptions, LinkResult, LinkStatus};
pub use mention::{find_mentions, tokenize, Mention, TriggerLexicon};
pub use report::{CategoryStats, YearlyStats};
