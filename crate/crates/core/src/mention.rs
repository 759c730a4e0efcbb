//! Candidate software mentions in publication text.
//!
//! A mention is a token equal to a known software name or alias with a
//! trigger term ("solver", "software", ...) no more than `window` tokens away.
//! All candidates are emitted; nothing here tries to tell a real mention from
//! a coincidental one.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogIndex, PublicationRecord};
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 5;

pub const DEFAULT_TRIGGERS: &[&str] = &[
    "solver", "program", "software", "package", "library", "tool", "system", "code",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerLexicon {
    terms: BTreeSet<String>,
    window: usize,
}

impl Default for TriggerLexicon {
    fn default() -> Self {
        TriggerLexicon {
            terms: DEFAULT_TRIGGERS.iter().map(|t| t.to_string()).collect(),
            window: DEFAULT_WINDOW,
        }
    }
}

impl TriggerLexicon {
    /// Terms are lowercased; the set must be nonempty and `window >= 1`.
    pub fn new<I, S>(terms: I, window: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let terms: BTreeSet<String> = terms
            .into_iter()
            .map(|t| t.as_ref().trim().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        if terms.is_empty() {
            return Err(Error::Validation("trigger lexicon has no terms".into()));
        }
        if window == 0 {
            return Err(Error::Validation(
                "trigger window must be at least 1".into(),
            ));
        }
        Ok(TriggerLexicon { terms, window })
    }

    /// Reads `{"terms": [...], "window": n}`.
    pub fn load(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            terms: Vec<String>,
            #[serde(default = "default_window")]
            window: usize,
        }
        fn default_window() -> usize {
            DEFAULT_WINDOW
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: Raw = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        TriggerLexicon::new(raw.terms, raw.window)
    }

    pub fn terms(&self) -> &BTreeSet<String> {
        &self.terms
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn contains(&self, lowercase_token: &str) -> bool {
        self.terms.contains(lowercase_token)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Title,
    Abstract,
    References,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub publication_id: String,
    pub software_name: String,
    pub matched_alias: String,
    pub field: Field,
    pub trigger: String,
    pub token_offset: usize,
}

/// Splits on Unicode whitespace and trims punctuation from both ends of each
/// token. `+` is kept so names like `C++` survive; inner characters are untouched.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split_whitespace()
        .map(|raw| raw.trim_matches(|c: char| !c.is_alphanumeric() && c != '+'))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Maps every lowercased name and alias to the software's display name.
///
/// When two softwares share an alias the first in catalog order wins.
pub fn name_table(index: &CatalogIndex) -> HashMap<String, String> {
    let mut names = HashMap::new();
    for sw in index.softwares() {
        for alias in std::iter::once(&sw.name).chain(&sw.aliases) {
            let key = alias.trim().to_lowercase();
            if !key.is_empty() {
                names.entry(key).or_insert_with(|| sw.name.clone());
            }
        }
    }
    names
}

/// Scans title, abstract and references (in that order) for name tokens with
/// a trigger term nearby.
///
/// Reference lines are tokenized one at a time so the window never spans two
/// references; `token_offset` counts tokens across the whole field.
pub fn find_mentions(
    publication: &PublicationRecord,
    names: &HashMap<String, String>,
    lexicon: &TriggerLexicon,
) -> Vec<Mention> {
    let mut out = Vec::new();
    scan(
        publication,
        Field::Title,
        [publication.title.as_str()],
        names,
        lexicon,
        &mut out,
    );
    scan(
        publication,
        Field::Abstract,
        [publication.abstract_text.as_str()],
        names,
        lexicon,
        &mut out,
    );
    scan(
        publication,
        Field::References,
        publication.references.iter().map(String::as_str),
        names,
        lexicon,
        &mut out,
    );
    out
}

fn scan<'a>(
    publication: &PublicationRecord,
    field: Field,
    segments: impl IntoIterator<Item = &'a str>,
    names: &HashMap<String, String>,
    lexicon: &TriggerLexicon,
    out: &mut Vec<Mention>,
) {
    let mut base = 0;
    for segment in segments {
        let tokens: Vec<String> = tokenize(segment)
            .into_iter()
            .map(str::to_lowercase)
            .collect();
        for (i, token) in tokens.iter().enumerate() {
            let Some(name) = names.get(token) else {
                continue;
            };
            if let Some(trigger) = nearest_trigger(&tokens, i, lexicon) {
                out.push(Mention {
                    publication_id: publication.id.clone(),
                    software_name: name.clone(),
                    matched_alias: token.clone(),
                    field,
                    trigger: trigger.to_string(),
                    token_offset: base + i,
                });
            }
        }
        base += tokens.len();
    }
}

// Closest trigger on either side; the left one wins at equal distance.
fn nearest_trigger<'t>(
    tokens: &'t [String],
    at: usize,
    lexicon: &TriggerLexicon,
) -> Option<&'t str> {
    (1..=lexicon.window()).find_map(|d| {
        let left = at.checked_sub(d).map(|j| &tokens[j]);
        let right = tokens.get(at + d);
        left.filter(|t| lexicon.contains(t))
            .or(right.filter(|t| lexicon.contains(t)))
            .map(String::as_str)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn publication(title: &str, abstract_text: &str, references: &[&str]) -> PublicationRecord {
        PublicationRecord {
            id: "p1".into(),
            title: title.into(),
            abstract_text: abstract_text.into(),
            references: references.iter().map(|s| s.to_string()).collect(),
            year: 2013,
            citations: 1,
        }
    }

    fn names(pairs: &[(&str, &str)]) -> HashMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn lexicon(window: usize) -> TriggerLexicon {
        TriggerLexicon::new(DEFAULT_TRIGGERS, window).unwrap()
    }

    #[test]
    fn tokenize_strips_outer_punctuation() {
        assert_eq!(
            tokenize("the Singular solver."),
            ["the", "Singular", "solver"]
        );
        assert_eq!(tokenize(""), Vec::<&str>::new());
        assert_eq!(tokenize("C++ library (v2.0)"), ["C++", "library", "v2.0"]);
        assert_eq!(
            tokenize("CPLEX, Gurobi; -- x-ray"),
            ["CPLEX", "Gurobi", "x-ray"]
        );
        assert_eq!(
            tokenize("tab\tand\u{2003}em-space\nnewline"),
            ["tab", "and", "em-space", "newline"]
        );
    }

    #[test]
    fn default_lexicon_has_required_terms() {
        let lex = TriggerLexicon::default();
        for t in [
            "solver", "program", "software", "package", "library", "tool", "system", "code",
        ] {
            assert!(lex.contains(t));
        }
        assert_eq!(lex.window(), 5);
    }

    #[test]
    fn lexicon_validation() {
        assert!(TriggerLexicon::new(Vec::<String>::new(), 3).is_err());
        assert!(TriggerLexicon::new(["solver"], 0).is_err());
        let lex = TriggerLexicon::new(["  Solver "], 1).unwrap();
        assert!(lex.contains("solver"));
    }

    #[test]
    fn title_mention_with_trigger() {
        let p = publication("The Singular software for polynomial computations", "", &[]);
        let found = find_mentions(&p, &names(&[("singular", "Singular")]), &lexicon(3));
        assert_eq!(
            found,
            vec![Mention {
                publication_id: "p1".into(),
                software_name: "Singular".into(),
                matched_alias: "singular".into(),
                field: Field::Title,
                trigger: "software".into(),
                token_offset: 1,
            }]
        );
    }

    #[test]
    fn no_trigger_nearby_means_no_mention() {
        let p = publication("", "singular value decomposition", &[]);
        assert!(find_mentions(&p, &names(&[("singular", "Singular")]), &lexicon(3)).is_empty());
    }

    #[test]
    fn empty_fields_yield_nothing() {
        let p = publication("", "", &[]);
        assert!(find_mentions(&p, &names(&[("singular", "Singular")]), &lexicon(3)).is_empty());
    }

    #[test]
    fn window_is_inclusive() {
        let n = names(&[("gap", "GAP")]);
        // distance exactly 2
        let p = publication("GAP a solver", "", &[]);
        assert_eq!(find_mentions(&p, &n, &lexicon(2)).len(), 1);
        assert!(find_mentions(&p, &n, &lexicon(1)).is_empty());
    }

    #[test]
    fn references_do_not_share_a_window() {
        let n = names(&[("magma", "Magma")]);
        let p = publication(
            "",
            "",
            &["Bosma et al. The Magma", "algebra system. J. Symb. Comp."],
        );
        assert!(find_mentions(&p, &n, &lexicon(3)).is_empty());
        let p = publication("", "", &["Smith, intro.", "The Magma algebra system"]);
        let found = find_mentions(&p, &n, &lexicon(3));
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].field, Field::References);
        assert_eq!(found[0].token_offset, 3);
    }

    #[test]
    fn order_is_title_abstract_references() {
        let n = names(&[("maple", "Maple"), ("gap", "GAP")]);
        let p = publication(
            "Maple software",
            "we used the GAP system and Maple package",
            &["GAP program"],
        );
        let mentions = find_mentions(&p, &n, &lexicon(2));
        let found: Vec<(Field, &str, usize)> = mentions
            .iter()
            .map(|m| (m.field, m.software_name.as_str(), m.token_offset))
            .collect();
        assert_eq!(
            found,
            vec![
                (Field::Title, "Maple", 0),
                (Field::Abstract, "GAP", 3),
                (Field::Abstract, "Maple", 6),
                (Field::References, "GAP", 0),
            ]
        );
    }

    #[test]
    fn nearest_trigger_reported() {
        let n = names(&[("lapack", "LAPACK")]);
        let p = publication("a library then LAPACK code", "", &[]);
        let found = find_mentions(&p, &n, &lexicon(5));
        assert_eq!(found[0].trigger, "code");
    }
}
