use std::path::{Path, PathBuf};

use archivelink::catalog::{load_catalog, read_lines, write_lines};
use archivelink::classify::{profile_all, RuleSet, SoftwareProfile};
use archivelink::linker::{link_all, LinkOptions, LinkResult, LinkStatus};
use archivelink::mention::{find_mentions, name_table, TriggerLexicon};
use archivelink::report::{
    aggregate_categories, aggregate_yearly, emit_categories, emit_yearly, OutputFormat,
};
use archivelink::ArchiveClient;

use crate::config::PipelineConfig;
use crate::error::CliError;

pub const MENTIONS_FILE: &str = "mentions.jsonl";
pub const LINKS_FILE: &str = "links.jsonl";
pub const PROFILES_FILE: &str = "profiles.jsonl";
pub const YEARLY_CSV: &str = "yearly.csv";
pub const YEARLY_JSON: &str = "yearly.json";
pub const PLOTDATA_CSV: &str = "plotdata.csv";
pub const CATEGORIES_CSV: &str = "categories.csv";
pub const CATEGORIES_JSON: &str = "categories.json";

pub fn mine(cfg: &PipelineConfig) -> Result<(), CliError> {
    let index = load_catalog(&cfg.software, &cfg.publications)?;
    let lexicon = match &cfg.lexicon {
        Some(path) => TriggerLexicon::load(path)?,
        None => TriggerLexicon::default(),
    };
    let names = name_table(&index);
    let mentions: Vec<_> = index
        .publications()
        .flat_map(|p| find_mentions(p, &names, &lexicon))
        .collect();
    let path = cfg.out.join(MENTIONS_FILE);
    write_lines(&path, &mentions)?;
    println!(
        "{} mentions in {} publications -> {}",
        mentions.len(),
        index.publication_count(),
        path.display()
    );
    Ok(())
}

pub fn link(cfg: &PipelineConfig) -> Result<(), CliError> {
    let index = load_catalog(&cfg.software, &cfg.publications)?;
    let client = ArchiveClient::new(cfg.backend()?.clone())?;
    let options = link_options(cfg);

    let mut results = Vec::new();
    let mut backend_failures = 0;
    let mut last_backend_error = None;
    for outcome in link_all(&index, &client, options, cfg.workers)? {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => {
                log::warn!("{e}");
                if e.is_backend_failure() {
                    backend_failures += 1;
                    last_backend_error = Some(e.to_string());
                }
            }
        }
    }
    if results.is_empty() && backend_failures > 0 {
        return Err(CliError::BackendUnreachable(
            last_backend_error.unwrap_or_default(),
        ));
    }

    let path = cfg.out.join(LINKS_FILE);
    write_lines(&path, &results)?;
    let count = |s: LinkStatus| results.iter().filter(|r| r.status == s).count();
    println!(
        "{} of {} softwares linked ({} archived, {} past archived, {} changed) -> {}",
        results.len(),
        index.software_count(),
        count(LinkStatus::Archived) + count(LinkStatus::PastArchived),
        count(LinkStatus::PastArchived),
        results.iter().filter(|r| r.changed).count(),
        path.display()
    );
    Ok(())
}

pub fn classify(cfg: &PipelineConfig) -> Result<(), CliError> {
    let index = load_catalog(&cfg.software, &cfg.publications)?;
    let results: Vec<LinkResult> = read_stage_output(&cfg.out, LINKS_FILE, "link")?;
    let rules = match &cfg.rules {
        Some(path) => RuleSet::load(path)?,
        None => RuleSet::default(),
    };
    let client = ArchiveClient::new(cfg.backend()?.clone())?;
    let profiles = profile_all(
        &results,
        &index,
        &client,
        link_options(cfg),
        &rules,
        cfg.workers,
    )?;
    let path = cfg.out.join(PROFILES_FILE);
    write_lines(&path, &profiles)?;
    let archived = results.iter().filter(|r| r.status.is_archived()).count();
    println!(
        "{} of {} archived softwares profiled -> {}",
        profiles.len(),
        archived,
        path.display()
    );
    Ok(())
}

pub fn report(cfg: &PipelineConfig) -> Result<(), CliError> {
    let results: Vec<LinkResult> = read_stage_output(&cfg.out, LINKS_FILE, "link")?;
    let profiles: Vec<SoftwareProfile> = read_stage_output(&cfg.out, PROFILES_FILE, "classify")?;
    let yearly = aggregate_yearly(&results);
    let categories = aggregate_categories(&profiles, &results);

    emit_yearly(&yearly, OutputFormat::Csv, &cfg.out.join(YEARLY_CSV))?;
    emit_yearly(&yearly, OutputFormat::Json, &cfg.out.join(YEARLY_JSON))?;
    emit_yearly(&yearly, OutputFormat::PlotData, &cfg.out.join(PLOTDATA_CSV))?;
    emit_categories(
        &categories,
        OutputFormat::Csv,
        &cfg.out.join(CATEGORIES_CSV),
    )?;
    emit_categories(
        &categories,
        OutputFormat::Json,
        &cfg.out.join(CATEGORIES_JSON),
    )?;

    println!("year  total  archived  past_archived  past_changed");
    for y in &yearly {
        println!(
            "{:<5} {:>5}  {:>8}  {:>13}  {:>12}",
            y.year, y.total, y.archived, y.past_archived, y.past_changed
        );
    }
    println!();
    println!(
        "{:<14} {:>5}  {:>9}  {:>9}",
        "category", "count", "of all", "of profiled"
    );
    for c in &categories {
        println!(
            "{:<14} {:>5}  {:>9.4}  {:>9.4}",
            c.category.as_str(),
            c.count,
            c.fraction_all,
            c.fraction_profiled
        );
    }
    Ok(())
}

fn link_options(cfg: &PipelineConfig) -> LinkOptions {
    LinkOptions {
        keep_all_statuses: cfg.keep_all_statuses,
    }
}

fn read_stage_output<T: serde::de::DeserializeOwned>(
    out: &Path,
    file: &str,
    stage: &'static str,
) -> Result<Vec<T>, CliError> {
    let path: PathBuf = out.join(file);
    if !path.is_file() {
        return Err(CliError::MissingStageOutput { path, stage });
    }
    Ok(read_lines(&path)?)
}
