use std::collections::BTreeSet;

use chrono::DateTime;

use super::cdx::{Capture, Timestamp};
use crate::error::{Error, Result};

/// Captures of one or more urlkeys, sorted ascending by timestamp (ties by digest).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TimeMap {
    urlkeys: BTreeSet<String>,
    captures: Vec<Capture>,
}

impl TimeMap {
    pub fn new(urlkeys: impl IntoIterator<Item = String>, mut captures: Vec<Capture>) -> Self {
        let mut urlkeys: BTreeSet<String> = urlkeys.into_iter().collect();
        urlkeys.extend(captures.iter().map(|c| c.urlkey.clone()));
        captures.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        TimeMap { urlkeys, captures }
    }

    pub fn empty(urlkey: impl Into<String>) -> Self {
        TimeMap::new([urlkey.into()], Vec::new())
    }

    pub fn urlkeys(&self) -> &BTreeSet<String> {
        &self.urlkeys
    }

    pub fn captures(&self) -> &[Capture] {
        &self.captures
    }

    pub fn into_captures(self) -> Vec<Capture> {
        self.captures
    }

    pub fn len(&self) -> usize {
        self.captures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.captures.is_empty()
    }

    /// Union of two timemaps; the result stays sorted.
    pub fn merge(mut self, other: TimeMap) -> TimeMap {
        self.urlkeys.extend(other.urlkeys);
        self.captures.extend(other.captures);
        self.captures
            .sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        self
    }

    /// Keeps captures matching `keep`; order is preserved.
    pub fn filter(&self, mut keep: impl FnMut(&Capture) -> bool) -> TimeMap {
        TimeMap {
            urlkeys: self.urlkeys.clone(),
            captures: self.captures.iter().filter(|c| keep(c)).cloned().collect(),
        }
    }

    /// Captures whose year lies within the inclusive bounds.
    pub fn within_years(&self, from: Option<i32>, to: Option<i32>) -> TimeMap {
        self.filter(|c| {
            let y = c.year();
            from.is_none_or(|f| y >= f) && to.is_none_or(|t| y <= t)
        })
    }

    pub fn is_sorted(&self) -> bool {
        self.captures
            .windows(2)
            .all(|w| w[0].order_key() <= w[1].order_key())
    }
}

/// Converts an `application/link-format` TimeMap into captures of `urlkey`.
///
/// Every entry whose `rel` includes `memento` becomes a capture. Link-format
/// carries no digest, so one is synthesized as `TM-{timestamp}`; the
/// `original` URL comes from the `rel="original"` entry when present.
pub fn parse_timemap_linkformat(body: &str, urlkey: &str) -> Result<TimeMap> {
    let links = parse_links(body)?;
    let original = links
        .iter()
        .find(|l| l.has_rel("original"))
        .map(|l| l.target.clone());

    let mut captures = Vec::new();
    for link in links.iter().filter(|l| l.has_rel("memento")) {
        let datetime = link.param("datetime").ok_or_else(|| Error::LinkFormat {
            offset: link.offset,
            reason: format!("memento <{}> has no datetime", link.target),
        })?;
        let parsed = DateTime::parse_from_rfc2822(datetime).map_err(|e| Error::LinkFormat {
            offset: link.offset,
            reason: format!("bad datetime {datetime:?}: {e}"),
        })?;
        let timestamp = Timestamp::from_datetime(parsed.naive_utc());
        captures.push(Capture {
            urlkey: urlkey.to_string(),
            digest: format!("TM-{timestamp}"),
            timestamp,
            original: original.clone().unwrap_or_else(|| link.target.clone()),
            mimetype: link.param("type").unwrap_or("-").to_string(),
            statuscode: None,
            length: None,
        });
    }
    Ok(TimeMap::new([urlkey.to_string()], captures))
}

struct Link {
    offset: usize,
    target: String,
    params: Vec<(String, String)>,
}

impl Link {
    fn param(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    fn has_rel(&self, rel: &str) -> bool {
        self.param("rel").is_some_and(|v| {
            v.split_ascii_whitespace()
                .any(|r| r.eq_ignore_ascii_case(rel))
        })
    }
}

fn parse_links(body: &str) -> Result<Vec<Link>> {
    let bytes = body.as_bytes();
    let err = |offset: usize, reason: &str| Error::LinkFormat {
        offset,
        reason: reason.to_string(),
    };
    let skip_ws = |mut i: usize| {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        i
    };

    let mut links = Vec::new();
    let mut i = 0;
    loop {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b',') {
            i += 1;
        }
        if i >= bytes.len() {
            break;
        }
        if bytes[i] != b'<' {
            return Err(err(i, "expected '<'"));
        }
        let start = i;
        let close = body[i..]
            .find('>')
            .ok_or_else(|| err(i, "missing closing angle bracket"))?;
        let target = body[i + 1..i + close].trim().to_string();
        if target.contains('<') {
            return Err(err(i, "missing closing angle bracket"));
        }
        i += close + 1;

        let mut params = Vec::new();
        loop {
            i = skip_ws(i);
            if i >= bytes.len() || bytes[i] == b',' {
                break;
            }
            if bytes[i] != b';' {
                return Err(err(i, "expected ';' or ','"));
            }
            i = skip_ws(i + 1);
            let name_start = i;
            while i < bytes.len()
                && !matches!(bytes[i], b'=' | b';' | b',')
                && !bytes[i].is_ascii_whitespace()
            {
                i += 1;
            }
            let name = body[name_start..i].to_string();
            if name.is_empty() {
                return Err(err(i, "empty parameter name"));
            }
            i = skip_ws(i);
            let value = if i < bytes.len() && bytes[i] == b'=' {
                i = skip_ws(i + 1);
                if i < bytes.len() && bytes[i] == b'"' {
                    let end = body[i + 1..]
                        .find('"')
                        .ok_or_else(|| err(i, "unterminated quoted value"))?;
                    let v = body[i + 1..i + 1 + end].to_string();
                    i += end + 2;
                    v
                } else {
                    let v_start = i;
                    while i < bytes.len()
                        && !matches!(bytes[i], b';' | b',')
                        && !bytes[i].is_ascii_whitespace()
                    {
                        i += 1;
                    }
                    body[v_start..i].to_string()
                }
            } else {
                String::new()
            };
            params.push((name, value));
        }
        links.push(Link {
            offset: start,
            target,
            params,
        });
    }
    Ok(links)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"<http://example.org/>; rel="original",
<http://web.archive.org/web/timemap/link/http://example.org/>; rel="self"; type="application/link-format"; from="Thu, 14 Feb 2013 12:00:00 GMT",
<http://web.archive.org/web/20150601000000/http://example.org/>; rel="last memento"; datetime="Mon, 01 Jun 2015 00:00:00 GMT",
<http://web.archive.org/web/20130214120000/http://example.org/>; rel="first memento"; datetime="Thu, 14 Feb 2013 12:00:00 GMT"
"#;

    #[test]
    fn two_mementos_sorted() {
        let tm = parse_timemap_linkformat(TWO, "org,example)/").unwrap();
        let stamps: Vec<&str> = tm.captures().iter().map(|c| c.timestamp.as_str()).collect();
        assert_eq!(stamps, ["20130214120000", "20150601000000"]);
        assert_eq!(tm.captures()[0].digest, "TM-20130214120000");
        assert_eq!(tm.captures()[0].original, "http://example.org/");
        assert_eq!(tm.captures()[0].statuscode, None);
    }

    #[test]
    fn no_mementos() {
        let body = r#"<http://example.org/>; rel="original", <http://a/timemap>; rel="self""#;
        assert!(parse_timemap_linkformat(body, "org,example)/")
            .unwrap()
            .is_empty());
        assert!(parse_timemap_linkformat("", "k").unwrap().is_empty());
    }

    #[test]
    fn malformed_bodies() {
        for body in [
            r#"<http://example.org/; rel="original""#,
            r#"<http://a/>; rel="memento"; datetime="Thu, 14 Feb 2013"#,
            r#"<http://a/>; rel="memento""#,
            r#"<http://a/>; rel="memento"; datetime="yesterday""#,
            r#"http://a/; rel="memento""#,
            r#"<http://a/> junk"#,
        ] {
            assert!(
                matches!(
                    parse_timemap_linkformat(body, "k"),
                    Err(Error::LinkFormat { .. })
                ),
                "{body}"
            );
        }
    }

    #[test]
    fn offsets_in_timezones_normalize_to_utc() {
        let body = r#"<http://a/m>; rel="memento"; datetime="Sat, 01 Jan 2000 01:30:00 +0200""#;
        let tm = parse_timemap_linkformat(body, "k").unwrap();
        assert_eq!(tm.captures()[0].timestamp.as_str(), "19991231233000");
    }
}
