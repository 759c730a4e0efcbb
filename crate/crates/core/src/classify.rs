//! Heuristic profile of what an archived software homepage offers.
//!
//! Link text and heading text are matched against per-category keywords;
//! link targets against per-category href patterns. Keywords match at the
//! start of a word (`git` matches "GitHub" but not "digital"). An href
//! pattern starting with `.` is a suffix of the target's path; any other href
//! pattern is a plain substring of the whole target. Matching is case-insensitive.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use scraper::{Html, Selector};
use serde::{Deserialize, Serialize};
use url::Url;

use crate::archive::ArchiveClient;
use crate::catalog::{CatalogIndex, SoftwareRecord};
use crate::error::{Error, Result};
use crate::linker::{merged_timemap, LinkOptions, LinkResult, LinkStatus};

const DEFAULT_RULES: &str = include_str!("../rules/default.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Documentation,
    Publications,
    Downloads,
    OpenSource,
    UpdatesNews,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Documentation,
        Category::Publications,
        Category::Downloads,
        Category::OpenSource,
        Category::UpdatesNews,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Documentation => "documentation",
            Category::Publications => "publications",
            Category::Downloads => "downloads",
            Category::OpenSource => "open_source",
            Category::UpdatesNews => "updates_news",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentProfile {
    pub documentation: bool,
    pub publications: bool,
    pub downloads: bool,
    pub open_source: bool,
    pub updates_news: bool,
}

impl ContentProfile {
    pub fn get(&self, category: Category) -> bool {
        match category {
            Category::Documentation => self.documentation,
            Category::Publications => self.publications,
            Category::Downloads => self.downloads,
            Category::OpenSource => self.open_source,
            Category::UpdatesNews => self.updates_news,
        }
    }

    pub fn set(&mut self, category: Category, value: bool) {
        match category {
            Category::Documentation => self.documentation = value,
            Category::Publications => self.publications = value,
            Category::Downloads => self.downloads = value,
            Category::OpenSource => self.open_source = value,
            Category::UpdatesNews => self.updates_news = value,
        }
    }
}

/// One output line of the classify stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftwareProfile {
    pub software_id: String,
    #[serde(flatten)]
    pub profile: ContentProfile,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRule {
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub hrefs: Vec<String>,
}

impl CategoryRule {
    fn is_empty(&self) -> bool {
        self.keywords.is_empty() && self.hrefs.is_empty()
    }

    fn matches_text(&self, lowercase_text: &str) -> bool {
        self.keywords.iter().any(|k| starts_word(lowercase_text, k))
    }

    fn matches_href(&self, lowercase_href: &str) -> bool {
        let path_part = lowercase_href
            .split(['?', '#'])
            .next()
            .unwrap_or(lowercase_href);
        self.hrefs.iter().any(|p| {
            if p.starts_with('.') {
                path_part.ends_with(p.as_str())
            } else {
                lowercase_href.contains(p.as_str())
            }
        })
    }
}

fn starts_word(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    haystack.match_indices(needle).any(|(i, _)| {
        haystack[..i]
            .chars()
            .next_back()
            .is_none_or(|c| !c.is_alphanumeric())
    })
}

/// Patterns for all five categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    rules: BTreeMap<Category, CategoryRule>,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::from_json(DEFAULT_RULES).expect("bundled ruleset is valid")
    }
}

impl RuleSet {
    /// Patterns are lowercased; every category needs at least one.
    pub fn new(rules: BTreeMap<Category, CategoryRule>) -> Result<Self> {
        let mut normalized = BTreeMap::new();
        for category in Category::ALL {
            let rule = rules.get(&category).cloned().unwrap_or_default();
            let lower = |v: Vec<String>| -> Vec<String> {
                v.into_iter()
                    .map(|s| s.trim().to_lowercase())
                    .filter(|s| !s.is_empty())
                    .collect()
            };
            let rule = CategoryRule {
                keywords: lower(rule.keywords),
                hrefs: lower(rule.hrefs),
            };
            if rule.is_empty() {
                return Err(Error::Validation(format!(
                    "ruleset has no patterns for {}",
                    category.as_str()
                )));
            }
            normalized.insert(category, rule);
        }
        Ok(RuleSet { rules: normalized })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rules: BTreeMap<Category, CategoryRule> =
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("ruleset: {e}")))?;
        RuleSet::new(rules)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RuleSet::from_json(&text).map_err(|e| match e {
            Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn rule(&self, category: Category) -> &CategoryRule {
        &self.rules[&category]
    }

    pub fn rule_mut(&mut self, category: Category) -> &mut CategoryRule {
        self.rules
            .get_mut(&category)
            .expect("all categories present")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageLink {
    pub href: String,
    pub text: String,
}

/// Anchors with an `href`, resolved against `base_url`, in document order.
///
/// Parsing is tolerant; unresolvable targets are skipped.
pub fn extract_links(html: &[u8], base_url: &str) -> Vec<PageLink> {
    let Ok(base) = Url::parse(base_url) else {
        return Vec::new();
    };
    let doc = Html::parse_document(&String::from_utf8_lossy(html));
    let anchors = Selector::parse("a[href]").expect("static selector");
    doc.select(&anchors)
        .filter_map(|a| {
            let href = a.value().attr("href")?.trim();
            let resolved = base.join(href).ok()?;
            Some(PageLink {
                href: resolved.to_string(),
                text: normalize_ws(a.text()),
            })
        })
        .collect()
}

fn headings(doc: &Html) -> Vec<String> {
    let selector = Selector::parse("h1, h2, h3, h4, h5, h6").expect("static selector");
    doc.select(&selector)
        .map(|h| normalize_ws(h.text()))
        .collect()
}

fn normalize_ws<'a>(parts: impl Iterator<Item = &'a str>) -> String {
    let joined: String = parts.collect();
    joined.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn classify(html: &[u8], base_url: &str, rules: &RuleSet) -> ContentProfile {
    let links = extract_links(html, base_url);
    let doc = Html::parse_document(&String::from_utf8_lossy(html));
    let heading_text: Vec<String> = headings(&doc)
        .into_iter()
        .map(|h| h.to_lowercase())
        .collect();
    let link_text: Vec<(String, String)> = links
        .iter()
        .map(|l| (l.text.to_lowercase(), l.href.to_lowercase()))
        .collect();

    let mut profile = ContentProfile::default();
    for category in Category::ALL {
        let rule = rules.rule(category);
        let hit = link_text
            .iter()
            .any(|(text, href)| rule.matches_text(text) || rule.matches_href(href))
            || heading_text.iter().any(|h| rule.matches_text(h));
        profile.set(category, hit);
    }
    profile
}

/// Classifies the archived landing page behind a link result.
///
/// The page is the in-year witness when there is one, otherwise the latest
/// usable capture. Returns `None` for unarchived software and when the body
/// cannot be retrieved; the latter is logged, not propagated.
pub fn profile_software(
    result: &LinkResult,
    sw: &SoftwareRecord,
    client: &ArchiveClient,
    options: LinkOptions,
    rules: &RuleSet,
) -> Option<ContentProfile> {
    if result.status == LinkStatus::NotArchived {
        return None;
    }
    let tm = match merged_timemap(sw, client, options) {
        Ok(tm) => tm,
        Err(e) => {
            log::warn!("software {}: capture lookup failed: {e}", sw.id);
            return None;
        }
    };
    let witness = result
        .witness_in_year
        .as_ref()
        .and_then(|w| tm.captures().iter().find(|c| w.matches(c)))
        .or_else(|| tm.captures().last());
    let Some(capture) = witness else {
        log::warn!("software {}: no capture to profile", sw.id);
        return None;
    };
    match client.fetch_capture_body(capture) {
        Ok(body) => Some(classify(&body, &capture.original, rules)),
        Err(e) => {
            log::warn!("software {}: body unavailable: {e}", sw.id);
            None
        }
    }
}

/// Profiles every result on a pool of `workers` threads, in input order.
/// Results whose software is not in the catalog are skipped with a warning.
pub fn profile_all(
    results: &[LinkResult],
    index: &CatalogIndex,
    client: &ArchiveClient,
    options: LinkOptions,
    rules: &RuleSet,
    workers: usize,
) -> Result<Vec<SoftwareProfile>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("worker pool: {e}")))?;
    let profiles: Vec<Option<SoftwareProfile>> = pool.install(|| {
        results
            .par_iter()
            .map(|r| {
                let Some(sw) = index.software(&r.software_id) else {
                    log::warn!("link result for unknown software {:?}", r.software_id);
                    return None;
                };
                profile_software(r, sw, client, options, rules).map(|profile| SoftwareProfile {
                    software_id: r.software_id.clone(),
                    profile,
                })
            })
            .collect()
    });
    Ok(profiles.into_iter().flatten().collect())
}
