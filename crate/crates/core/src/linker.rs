//! Archival status of each software relative to the year of its top-cited
//! publication, and whether the page changed after that year.
//!
//! Status is the strictest that applies:
//! `past_archived` if some usable capture falls in the top year,
//! `archived` if any usable capture exists, else `not_archived`.
//! Years are UTC calendar years of the capture timestamp.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archive::{canonicalize_url, ArchiveClient, Capture, TimeMap, Timestamp};
use crate::catalog::{top_publication, CatalogIndex, SoftwareRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkStatus {
    NotArchived,
    Archived,
    PastArchived,
}

impl LinkStatus {
    pub fn is_archived(self) -> bool {
        self != LinkStatus::NotArchived
    }
}

/// Identifies a capture within a software's merged timemap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub timestamp: Timestamp,
    pub digest: String,
}

impl From<&Capture> for Witness {
    fn from(c: &Capture) -> Self {
        Witness {
            timestamp: c.timestamp.clone(),
            digest: c.digest.clone(),
        }
    }
}

impl Witness {
    pub fn matches(&self, c: &Capture) -> bool {
        self.timestamp == c.timestamp && self.digest == c.digest
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkResult {
    pub software_id: String,
    pub top_publication_id: String,
    pub top_year: i32,
    pub status: LinkStatus,
    pub changed: bool,
    pub witness_in_year: Option<Witness>,
    pub witness_later: Option<Witness>,
    pub total_captures: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkOptions {
    /// Treat every capture as a witness, not just 200/absent statuses.
    pub keep_all_statuses: bool,
}

/// Captures with status 200 or no recorded status (e.g. revisit records).
pub fn ok_captures(tm: &TimeMap) -> TimeMap {
    tm.filter(|c| matches!(c.statuscode, None | Some(200)))
}

pub fn classify_archival(tm: &TimeMap, top_year: i32) -> LinkStatus {
    if tm.captures().iter().any(|c| c.year() == top_year) {
        LinkStatus::PastArchived
    } else if !tm.is_empty() {
        LinkStatus::Archived
    } else {
        LinkStatus::NotArchived
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeVerdict {
    pub changed: bool,
    /// Last capture within the top year.
    pub in_year: Capture,
    /// Earliest strictly later capture whose digest differs from `in_year`.
    pub later: Option<Capture>,
}

pub fn detect_change(tm: &TimeMap, top_year: i32) -> Result<ChangeVerdict> {
    let in_year = tm
        .captures()
        .iter()
        .rev()
        .find(|c| c.year() == top_year)
        .ok_or(Error::NoCaptureInYear(top_year))?;
    let later = tm
        .captures()
        .iter()
        .find(|c| c.timestamp > in_year.timestamp && c.digest != in_year.digest)
        .cloned();
    Ok(ChangeVerdict {
        changed: later.is_some(),
        in_year: in_year.clone(),
        later,
    })
}

/// Unbounded captures of every URL of `sw`, merged and status-filtered.
pub fn merged_timemap(
    sw: &SoftwareRecord,
    client: &ArchiveClient,
    options: LinkOptions,
) -> Result<TimeMap> {
    let mut seen = BTreeSet::new();
    let mut merged = TimeMap::default();
    for url in &sw.urls {
        if !seen.insert(canonicalize_url(url)?) {
            continue;
        }
        merged = merged.merge(client.query_captures(url, None, None)?);
    }
    Ok(if options.keep_all_statuses {
        merged
    } else {
        ok_captures(&merged)
    })
}

/// Builds a [`LinkResult`] from an already merged, filtered timemap.
pub fn link_from_timemap(
    software_id: &str,
    top_publication_id: &str,
    top_year: i32,
    tm: &TimeMap,
) -> LinkResult {
    let status = classify_archival(tm, top_year);
    let mut result = LinkResult {
        software_id: software_id.to_string(),
        top_publication_id: top_publication_id.to_string(),
        top_year,
        status,
        changed: false,
        witness_in_year: None,
        witness_later: None,
        total_captures: tm.len(),
    };
    if status == LinkStatus::PastArchived {
        let verdict =
            detect_change(tm, top_year).expect("past_archived implies an in-year capture");
        result.changed = verdict.changed;
        result.witness_in_year = Some(Witness::from(&verdict.in_year));
        result.witness_later = verdict.later.as_ref().map(Witness::from);
    }
    result
}

pub fn link_software(
    sw: &SoftwareRecord,
    index: &CatalogIndex,
    client: &ArchiveClient,
    options: LinkOptions,
) -> Result<LinkResult> {
    let run = || {
        let top = top_publication(sw, index)?;
        let tm = merged_timemap(sw, client, options)?;
        Ok(link_from_timemap(&sw.id, &top.id, top.year, &tm))
    };
    run().map_err(|e: Error| e.for_software(&sw.id))
}

/// Links every software of the catalog on a pool of `workers` threads.
/// Results come back in catalog order.
pub fn link_all(
    index: &CatalogIndex,
    client: &ArchiveClient,
    options: LinkOptions,
    workers: usize,
) -> Result<Vec<Result<LinkResult>>> {
    let softwares: Vec<&SoftwareRecord> = index.softwares().collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        softwares
            .par_iter()
            .map(|sw| link_software(sw, index, client, options))
            .collect()
    }))
}
