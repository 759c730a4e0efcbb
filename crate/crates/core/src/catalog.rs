//! Software/publication catalog: JSON-lines loading, validation and indexing.
//!
//! The catalog is two JSON-lines files. Each software line names its homepage
//! URLs (current first, replaced ones after) and the ids of the publications
//! that mention it. Loading validates everything up front, so downstream
//! stages can index into the catalog without re-checking.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use url::Url;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftwareRecord {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub urls: Vec<String>,
    pub publication_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub id: String,
    pub title: String,
    #[serde(default, rename = "abstract")]
    pub abstract_text: String,
    #[serde(default)]
    pub references: Vec<String>,
    pub year: i32,
    pub citations: u64,
}

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

/// Validated catalog. Iteration follows input file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CatalogIndex {
    softwares: IndexMap<String, SoftwareRecord>,
    publications: IndexMap<String, PublicationRecord>,
}

impl CatalogIndex {
    /// Builds an index from in-memory records, applying the same validation
    /// as [`load_catalog`].
    pub fn from_records(
        softwares: Vec<SoftwareRecord>,
        publications: Vec<PublicationRecord>,
    ) -> Result<Self> {
        let mut index = CatalogIndex::default();
        for publication in publications {
            validate_publication(&publication)?;
            if index.publications.contains_key(&publication.id) {
                return Err(Error::Validation(format!(
                    "duplicate publication id {:?}",
                    publication.id
                )));
            }
            index
                .publications
                .insert(publication.id.clone(), publication);
        }
        for software in softwares {
            validate_software(&software)?;
            if index.softwares.contains_key(&software.id) {
                return Err(Error::Validation(format!(
                    "duplicate software id {:?}",
                    software.id
                )));
            }
            if let Some(missing) = software
                .publication_ids
                .iter()
                .find(|id| !index.publications.contains_key(*id))
            {
                return Err(Error::Validation(format!(
                    "software {:?} references unknown publication {:?}",
                    software.id, missing
                )));
            }
            index.softwares.insert(software.id.clone(), software);
        }
        Ok(index)
    }

    pub fn software(&self, id: &str) -> Option<&SoftwareRecord> {
        self.softwares.get(id)
    }

    pub fn publication(&self, id: &str) -> Option<&PublicationRecord> {
        self.publications.get(id)
    }

    pub fn softwares(&self) -> impl ExactSizeIterator<Item = &SoftwareRecord> {
        self.softwares.values()
    }

    pub fn publications(&self) -> impl ExactSizeIterator<Item = &PublicationRecord> {
        self.publications.values()
    }

    pub fn software_count(&self) -> usize {
        self.softwares.len()
    }

    pub fn publication_count(&self) -> usize {
        self.publications.len()
    }

    /// Writes the catalog back out as the two JSON-lines files it was loaded from.
    pub fn write_jsonl(&self, software_path: &Path, publications_path: &Path) -> Result<()> {
        write_lines(software_path, self.softwares.values())?;
        write_lines(publications_path, self.publications.values())
    }
}

/// Loads and validates a catalog from its two JSON-lines files.
pub fn load_catalog(software_path: &Path, publications_path: &Path) -> Result<CatalogIndex> {
    let publications = read_lines::<PublicationRecord>(publications_path)?;
    let softwares = read_lines::<SoftwareRecord>(software_path)?;
    CatalogIndex::from_records(softwares, publications)
}

/// The highest-cited publication of `sw`.
///
/// Ties go to the earliest year, then to the lexicographically smallest id.
pub fn top_publication<'a>(
    sw: &SoftwareRecord,
    index: &'a CatalogIndex,
) -> Result<&'a PublicationRecord> {
    let mut best: Option<&PublicationRecord> = None;
    for id in &sw.publication_ids {
        let candidate = index.publication(id).ok_or_else(|| {
            Error::Validation(format!(
                "software {:?} references unknown publication {:?}",
                sw.id, id
            ))
        })?;
        best = match best {
            Some(current) if !outranks(candidate, current) => Some(current),
            _ => Some(candidate),
        };
    }
    best.ok_or_else(|| Error::EmptyPublications(sw.id.clone()))
}

fn outranks(a: &PublicationRecord, b: &PublicationRecord) -> bool {
    (
        a.citations,
        std::cmp::Reverse(a.year),
        std::cmp::Reverse(&a.id),
    ) > (
        b.citations,
        std::cmp::Reverse(b.year),
        std::cmp::Reverse(&b.id),
    )
}

fn validate_software(sw: &SoftwareRecord) -> Result<()> {
    if sw.id.is_empty() {
        return Err(Error::Validation(format!(
            "software {:?} has an empty id",
            sw.name
        )));
    }
    for raw in &sw.urls {
        check_http_url(raw).map_err(|reason| {
            Error::Validation(format!(
                "software {:?} has bad URL {:?}: {}",
                sw.id, raw, reason
            ))
        })?;
    }
    Ok(())
}

fn validate_publication(publication: &PublicationRecord) -> Result<()> {
    if publication.id.is_empty() {
        return Err(Error::Validation(format!(
            "publication {:?} has an empty id",
            publication.title
        )));
    }
    if !(MIN_YEAR..=MAX_YEAR).contains(&publication.year) {
        return Err(Error::Validation(format!(
            "publication {:?} has year {} outside {}..={}",
            publication.id, publication.year, MIN_YEAR, MAX_YEAR
        )));
    }
    Ok(())
}

pub(crate) fn check_http_url(raw: &str) -> std::result::Result<Url, String> {
    let parsed = Url::parse(raw).map_err(|e| e.to_string())?;
    match parsed.scheme() {
        "http" | "https" if parsed.host_str().is_some_and(|h| !h.is_empty()) => Ok(parsed),
        "http" | "https" => Err("missing host".to_string()),
        other => Err(format!("unsupported scheme {other:?}")),
    }
}

/// Reads one JSON object per non-blank line.
pub fn read_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Writes one compact JSON object per line, atomically.
pub fn write_lines<'a, T, I>(path: &Path, items: I) -> Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    crate::fsutil::write_atomic(path, |w| {
        let mut w = BufWriter::new(w);
        for item in items {
            serde_json::to_writer(&mut w, item).map_err(std::io::Error::other)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    })
}
