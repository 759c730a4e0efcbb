//! Captures and the space-separated CDX line format.
//!
//! Lines carry seven fields in order:
//! `urlkey timestamp original mimetype statuscode digest length`, with `-`
//! standing for an absent statuscode or length. Extra trailing fields are ignored.

use std::fmt;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 14-digit `YYYYMMDDhhmmss` UTC timestamp.
///
/// Ordering is lexicographic, which for fixed-width digits is chronological.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Timestamp(String);

impl Timestamp {
    pub fn parse(s: &str) -> Result<Self> {
        Self::validate(s).map(|_| Timestamp(s.to_string()))
    }

    fn validate(s: &str) -> Result<NaiveDateTime> {
        let bad = |reason: &str| Error::Validation(format!("bad timestamp {s:?}: {reason}"));
        if s.len() != 14 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected 14 digits"));
        }
        NaiveDateTime::parse_from_str(s, "%Y%m%d%H%M%S").map_err(|e| bad(&e.to_string()))
    }

    pub fn from_datetime(dt: NaiveDateTime) -> Self {
        Timestamp(dt.format("%Y%m%d%H%M%S").to_string())
    }

    pub fn year(&self) -> i32 {
        // Validated as 14 digits on construction.
        self.0[..4].parse().expect("validated timestamp")
    }

    pub fn datetime(&self) -> NaiveDateTime {
        Self::validate(&self.0).expect("validated timestamp")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Timestamp {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::validate(&s)?;
        Ok(Timestamp(s))
    }
}

impl From<Timestamp> for String {
    fn from(t: Timestamp) -> String {
        t.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Capture {
    pub urlkey: String,
    pub timestamp: Timestamp,
    pub original: String,
    pub mimetype: String,
    pub statuscode: Option<u16>,
    pub digest: String,
    pub length: Option<u64>,
}

impl Capture {
    pub fn year(&self) -> i32 {
        self.timestamp.year()
    }

    /// Sort key: timestamp, then digest, then the remaining identity fields.
    pub(crate) fn order_key(&self) -> (&Timestamp, &str, &str, &str) {
        (&self.timestamp, &self.digest, &self.urlkey, &self.original)
    }

    /// Formats the capture as a seven-field CDX line (no newline).
    pub fn to_cdx_line(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".to_string());
        format!(
            "{} {} {} {} {} {} {}",
            self.urlkey,
            self.timestamp,
            self.original,
            self.mimetype,
            opt(self.statuscode.map(|s| s.to_string())),
            self.digest,
            opt(self.length.map(|l| l.to_string())),
        )
    }
}

pub fn parse_cdx_line(line: &str) -> Result<Capture> {
    let malformed = |reason: String| Error::MalformedCdx {
        line: line.to_string(),
        reason,
    };
    let fields: Vec<&str> = line.split_ascii_whitespace().collect();
    if fields.len() < 7 {
        return Err(malformed(format!(
            "expected 7 fields, found {}",
            fields.len()
        )));
    }
    let timestamp = Timestamp::parse(fields[1]).map_err(|e| malformed(e.to_string()))?;
    let statuscode = match fields[4] {
        "-" => None,
        s => Some(
            s.parse::<u16>()
                .map_err(|_| malformed(format!("bad statuscode {s:?}")))?,
        ),
    };
    let length = match fields[6] {
        "-" => None,
        s => Some(
            s.parse::<u64>()
                .map_err(|_| malformed(format!("bad length {s:?}")))?,
        ),
    };
    if fields[5] == "-" {
        return Err(malformed("missing digest".into()));
    }
    Ok(Capture {
        urlkey: fields[0].to_string(),
        timestamp,
        original: fields[2].to_string(),
        mimetype: fields[3].to_string(),
        statuscode,
        digest: fields[5].to_string(),
        length,
    })
}

/// Parses every non-blank line of a CDX document.
pub fn parse_cdx(text: &str) -> Result<Vec<Capture>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_cdx_line)
        .collect()
}
