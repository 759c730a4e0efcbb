//! Per-year archival statistics and per-category content fractions.
//!
//! Fractions are rounded half-to-even at four decimals from exact integer
//! ratios, so serialized output is identical across runs and platforms.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{Category, SoftwareProfile};
use crate::error::{Error, Result};
use crate::fsutil::write_bytes_atomic;
use crate::linker::{LinkResult, LinkStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearlyStats {
    pub year: i32,
    pub total: u64,
    pub archived: u64,
    pub past_archived: u64,
    pub past_changed: u64,
}

impl YearlyStats {
    fn empty(year: i32) -> Self {
        YearlyStats {
            year,
            total: 0,
            archived: 0,
            past_archived: 0,
            past_changed: 0,
        }
    }

    /// `past_changed <= past_archived <= archived <= total`
    pub fn is_consistent(&self) -> bool {
        self.past_changed <= self.past_archived
            && self.past_archived <= self.archived
            && self.archived <= self.total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub category: Category,
    pub count: u64,
    pub denom_all: u64,
    pub denom_profiled: u64,
    pub fraction_all: f64,
    pub fraction_profiled: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    PlotData,
}

/// One row per distinct top year, ascending.
pub fn aggregate_yearly(results: &[LinkResult]) -> Vec<YearlyStats> {
    let mut by_year: BTreeMap<i32, YearlyStats> = BTreeMap::new();
    for r in results {
        let row = by_year
            .entry(r.top_year)
            .or_insert_with(|| YearlyStats::empty(r.top_year));
        row.total += 1;
        if r.status.is_archived() {
            row.archived += 1;
        }
        if r.status == LinkStatus::PastArchived {
            row.past_archived += 1;
            if r.changed {
                row.past_changed += 1;
            }
        }
    }
    by_year.into_values().collect()
}

/// Five rows in category order. `denom_all` counts every link result,
/// `denom_profiled` only the softwares that got a profile.
pub fn aggregate_categories(
    profiles: &[SoftwareProfile],
    results: &[LinkResult],
) -> Vec<CategoryStats> {
    let denom_all = results.len() as u64;
    let denom_profiled = profiles.len() as u64;
    Category::ALL
        .iter()
        .map(|&category| {
            let count = profiles.iter().filter(|p| p.profile.get(category)).count() as u64;
            CategoryStats {
                category,
                count,
                denom_all,
                denom_profiled,
                fraction_all: rounded_fraction(count, denom_all),
                fraction_profiled: rounded_fraction(count, denom_profiled),
            }
        })
        .collect()
}

/// `num / den` rounded half-to-even to four decimals; `0.0000` when `den == 0`.
pub fn format_fraction(num: u64, den: u64) -> String {
    if den == 0 {
        return "0.0000".to_string();
    }
    let scaled = num as u128 * 10_000;
    let den = den as u128;
    let mut q = scaled / den;
    let r = scaled % den;
    if 2 * r > den || (2 * r == den && q % 2 == 1) {
        q += 1;
    }
    format!("{}.{:04}", q / 10_000, q % 10_000)
}

pub fn rounded_fraction(num: u64, den: u64) -> f64 {
    format_fraction(num, den)
        .parse()
        .expect("formatted fraction parses")
}

#[derive(Serialize, Deserialize)]
struct CategoryRow {
    category: Category,
    count: u64,
    denom_all: u64,
    denom_profiled: u64,
    fraction_all: String,
    fraction_profiled: String,
}

#[derive(Serialize)]
struct PlotRow {
    year: i32,
    frac_archived: String,
    frac_past_archived: String,
    frac_past_changed: String,
}

pub fn render_yearly(stats: &[YearlyStats], format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => to_csv(stats.iter()),
        OutputFormat::PlotData => to_csv(stats.iter().map(|s| PlotRow {
            year: s.year,
            frac_archived: format_fraction(s.archived, s.total),
            frac_past_archived: format_fraction(s.past_archived, s.total),
            frac_past_changed: format_fraction(s.past_changed, s.total),
        })),
        OutputFormat::Json => to_json(stats),
    }
}

pub fn render_categories(stats: &[CategoryStats], format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => to_csv(stats.iter().map(|s| CategoryRow {
            category: s.category,
            count: s.count,
            denom_all: s.denom_all,
            denom_profiled: s.denom_profiled,
            fraction_all: format_fraction(s.count, s.denom_all),
            fraction_profiled: format_fraction(s.count, s.denom_profiled),
        })),
        OutputFormat::Json => to_json(stats),
        OutputFormat::PlotData => Err(Error::Validation(
            "plot data is only defined for yearly statistics".into(),
        )),
    }
}

pub fn emit_yearly(stats: &[YearlyStats], format: OutputFormat, path: &Path) -> Result<()> {
    write_bytes_atomic(path, &render_yearly(stats, format)?)
}

pub fn emit_categories(stats: &[CategoryStats], format: OutputFormat, path: &Path) -> Result<()> {
    write_bytes_atomic(path, &render_categories(stats, format)?)
}

pub fn parse_yearly_csv(bytes: &[u8]) -> Result<Vec<YearlyStats>> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Validation(format!("yearly csv: {e}")))
}

pub fn parse_categories_csv(bytes: &[u8]) -> Result<Vec<CategoryStats>> {
    let rows: Vec<CategoryRow> = csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Validation(format!("categories csv: {e}")))?;
    rows.into_iter()
        .map(|r| {
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Validation(format!("categories csv: bad fraction {s:?}")))
            };
            Ok(CategoryStats {
                category: r.category,
                count: r.count,
                denom_all: r.denom_all,
                denom_profiled: r.denom_profiled,
                fraction_all: parse(&r.fraction_all)?,
                fraction_profiled: parse(&r.fraction_profiled)?,
            })
        })
        .collect()
}

fn to_csv<T: Serialize>(rows: impl Iterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Validation(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::Validation(format!("csv: {e}")))
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out =
        serde_json::to_vec_pretty(value).map_err(|e| Error::Validation(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}
