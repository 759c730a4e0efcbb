use std::fs;

use archivelink::archive::{fixture_body_path, parse_cdx};
use archivelink::classify::{classify, extract_links, profile_software, Category, RuleSet};
use archivelink::linker::{link_software, LinkOptions};
use archivelink::{ArchiveBackend, ArchiveClient, CatalogIndex, PublicationRecord, SoftwareRecord};
use proptest::prelude::*;

const BASE: &str = "http://solver.example.org/a/b/";

#[test]
fn default_rules_examples() {
    let rules = RuleSet::default();
    let html = br#"<html><body>
        <h2>What's New</h2>
        <a href="manual.pdf">User Manual</a>
        <a href="https://github.com/x/solver">Code</a>
        <a href="../dl/solver-2.1.tar.gz?mirror=1">Get it</a>
        <a href="/digital">Digital library</a>
    </body></html>"#;
    let p = classify(html, BASE, &rules);
    assert!(p.documentation);
    assert!(!p.publications);
    assert!(p.downloads);
    assert!(p.open_source);
    assert!(p.updates_news);

    let links = extract_links(html, BASE);
    assert_eq!(links[0].href, "http://solver.example.org/a/b/manual.pdf");
    assert_eq!(links[0].text, "User Manual");
    assert_eq!(
        links[2].href,
        "http://solver.example.org/a/dl/solver-2.1.tar.gz?mirror=1"
    );
}

#[test]
fn word_start_and_suffix_matching() {
    let rules = RuleSet::default();
    assert!(!classify(br#"<a href="/x">Digital</a>"#, BASE, &rules).open_source);
    assert!(classify(br#"<a href="/x">Git repository</a>"#, BASE, &rules).open_source);
    assert!(!classify(br#"<a href="/file.zip.html">x</a>"#, BASE, &rules).downloads);
    assert!(classify(br#"<a href="/file.ZIP#top">x</a>"#, BASE, &rules).downloads);
    assert_eq!(
        classify(b"\xff\xfe not html at all", BASE, &rules),
        Default::default()
    );
}

#[test]
fn ruleset_validation() {
    assert!(RuleSet::from_json("{}").is_err());
    let mut json: serde_json::Value =
        serde_json::from_str(include_str!("../rules/default.json")).unwrap();
    json["updates_news"]["keywords"] = serde_json::json!([]);
    assert!(RuleSet::from_json(&json.to_string()).is_err());
    json["updates_news"]["keywords"] = serde_json::json!(["NEWS"]);
    let rules = RuleSet::from_json(&json.to_string()).unwrap();
    assert_eq!(rules.rule(Category::UpdatesNews).keywords, ["news"]);
}

fn arb_page() -> impl Strategy<Value = String> {
    let text = prop::sample::select(vec![
        "Manual",
        "Downloads",
        "Source Code",
        "News",
        "Papers",
        "home",
        "About us",
        "Digital",
        "FAQ",
        "contact",
        "Release Notes",
        "gitlab",
    ]);
    let href = prop::sample::select(vec![
        "index.html",
        "/pub/a.pdf",
        "https://doi.org/10.1/x",
        "x.zip",
        "https://github.com/a/b",
        "?q=1",
        "#top",
        "../v1.tar.gz",
        "mailto:a@b.org",
    ]);
    prop::collection::vec((text, href, any::<bool>()), 0..8).prop_map(|items| {
        let body: String = items
            .into_iter()
            .map(|(t, h, heading)| {
                if heading {
                    format!("<h3>{t}</h3>")
                } else {
                    format!("<a href=\"{h}\">{t}</a>")
                }
            })
            .collect();
        format!("<html><body>{body}</body></html>")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn adding_patterns_never_removes_flags(page in arb_page(), cat in 0usize..5, extra in "[a-z]{1,6}") {
        let base = RuleSet::default();
        let mut more = base.clone();
        let category = Category::ALL[cat];
        more.rule_mut(category).keywords.push(extra.clone());
        more.rule_mut(category).hrefs.push(extra);
        let before = classify(page.as_bytes(), BASE, &base);
        let after = classify(page.as_bytes(), BASE, &more);
        for c in Category::ALL {
            prop_assert!(!before.get(c) || after.get(c));
        }
    }

    #[test]
    fn link_text_case_does_not_matter(page in arb_page()) {
        let rules = RuleSet::default();
        let upper = page.replace("<html><body>", "").replace("</body></html>", "");
        // Uppercase only the visible text, not the markup or hrefs.
        let mut out = String::new();
        let mut in_tag = false;
        for ch in upper.chars() {
            match ch {
                '<' => { in_tag = true; out.push(ch) }
                '>' => { in_tag = false; out.push(ch) }
                _ if in_tag => out.push(ch),
                _ => out.extend(ch.to_uppercase()),
            }
        }
        prop_assert_eq!(classify(page.as_bytes(), BASE, &rules), classify(out.as_bytes(), BASE, &rules));
    }
}

fn one_software_catalog() -> CatalogIndex {
    CatalogIndex::from_records(
        vec![SoftwareRecord {
            id: "s1".into(),
            name: "Solver".into(),
            aliases: vec![],
            urls: vec!["http://solver.example.org/".into()],
            publication_ids: vec!["p1".into()],
        }],
        vec![PublicationRecord {
            id: "p1".into(),
            title: "t".into(),
            abstract_text: String::new(),
            references: vec![],
            year: 2010,
            citations: 3,
        }],
    )
    .unwrap()
}

#[test]
fn profile_uses_in_year_witness_and_tolerates_missing_bodies() {
    let cdx = "\
org,example,solver)/ 20100505000000 http://solver.example.org/ text/html 200 OLD 10
org,example,solver)/ 20150505000000 http://solver.example.org/ text/html 200 NEW 10
";
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("captures.cdx"), cdx).unwrap();
    let caps = parse_cdx(cdx).unwrap();
    let write = |i: usize, body: &str| {
        let path = dir.path().join(fixture_body_path(&caps[i]));
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, body).unwrap();
    };
    write(1, r#"<a href="s.zip">download</a>"#);

    let index = one_software_catalog();
    let sw = index.software("s1").unwrap();
    let client = ArchiveClient::new(ArchiveBackend::fixture(dir.path())).unwrap();
    let opts = LinkOptions::default();
    let result = link_software(sw, &index, &client, opts).unwrap();
    assert!(result.witness_in_year.is_some());
    assert_eq!(
        profile_software(&result, sw, &client, opts, &RuleSet::default()),
        None
    );

    write(0, r#"<a href="manual.html">Manual</a>"#);
    let profile = profile_software(&result, sw, &client, opts, &RuleSet::default()).unwrap();
    assert!(profile.documentation);
    assert!(!profile.downloads);

    let mut later_only = result.clone();
    later_only.witness_in_year = None;
    let profile = profile_software(&later_only, sw, &client, opts, &RuleSet::default()).unwrap();
    assert!(profile.downloads);
    assert!(!profile.documentation);
}
