//! CSV tables derived from a ledger.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use kwise_core::constructions::{balanced_linked_cubes_size, janzer_size, series_k_minus_one_size};
use serde::Serialize;
use serde_json::Value;

use crate::ledger::{LedgerRecord, SCHEMA_VERSION};

pub const F_TABLE: &str = "f_values.csv";
pub const CONSTRUCT_TABLE: &str = "constructions.csv";
pub const THRESHOLD_TABLE: &str = "maximality_threshold.csv";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportSummary {
    pub records: usize,
    pub skipped: usize,
    pub f_rows: usize,
    pub construct_rows: usize,
    pub threshold_rows: usize,
    /// Smallest `n` from which every recorded balanced linked-cubes verdict
    /// at k = 3 is maximal.
    pub maximal_from: Option<u64>,
}

/// Reads the JSONL ledger, skipping lines that do not parse as records.
/// Equal keys with different results are an error.
pub fn read_ledger(text: &str) -> Result<(Vec<LedgerRecord>, usize)> {
    let mut skipped = 0;
    let mut seen: BTreeMap<(String, String, u64), Value> = BTreeMap::new();
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = match serde_json::from_str::<LedgerRecord>(line) {
            Ok(r) if r.schema_version == SCHEMA_VERSION => r,
            _ => {
                skipped += 1;
                continue;
            }
        };
        let key = record.key();
        match seen.get(&key) {
            Some(prev) if *prev != record.result => {
                bail!("integrity error: line {} repeats command {} with a different result", lineno + 1, key.0)
            }
            Some(_) => continue,
            None => {
                seen.insert(key, record.result.clone());
                records.push(record);
            }
        }
    }
    Ok((records, skipped))
}

fn u(v: &Value) -> Option<u64> {
    v.as_u64()
}

fn cell(v: Option<impl ToString>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, header: &[&str], mut rows: Vec<Vec<String>>) -> Result<usize> {
    rows.sort();
    rows.dedup();
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in &rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(rows.len())
}

/// Writes the three tables into `dir` and summarises what went in.
pub fn build_report(ledger: &Path, dir: &Path) -> Result<ReportSummary> {
    let text = fs::read_to_string(ledger).with_context(|| format!("reading {}", ledger.display()))?;
    let (records, skipped) = read_ledger(&text)?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut f_rows = Vec::new();
    let mut construct_rows = Vec::new();
    let mut threshold: BTreeMap<u64, bool> = BTreeMap::new();
    let mut threshold_rows = Vec::new();
    for r in &records {
        let res = &r.result;
        match r.command.as_str() {
            "search-min" => {
                let (Some(n), Some(k)) = (u(&res["n"]), u(&res["k"])) else { continue };
                let (nn, kk) = (n as usize, k as usize);
                f_rows.push(vec![
                    n.to_string(),
                    k.to_string(),
                    res["mode"].as_str().unwrap_or_default().to_string(),
                    cell(u(&res["f"])),
                    cell(res["optimal"].as_bool()),
                    cell(u(&res["lower_bound"])),
                    cell(balanced_linked_cubes_size(nn).ok()),
                    cell(series_k_minus_one_size(nn, kk).ok()),
                    cell(janzer_size(nn, kk).ok()),
                ]);
            }
            "construct" => {
                let kind = res["construction"].as_str().unwrap_or_default();
                if kind == "bounds" {
                    continue;
                }
                let Some(n) = u(&res["n"]) else { continue };
                construct_rows.push(vec![
                    n.to_string(),
                    cell(u(&res["size"])),
                    cell(u(&res["formula"])),
                    kind.to_string(),
                ]);
                let balanced = res["balanced"].as_bool() == Some(true);
                if kind == "linked-cubes" && u(&res["check_k"]) == Some(3) && balanced {
                    if let Some(m) = res["maximal"].as_bool() {
                        threshold.insert(n, m);
                        threshold_rows.push(vec![
                            n.to_string(),
                            m.to_string(),
                            cell(res["kwise"].as_bool()),
                            res["addable_witness"].as_str().unwrap_or_default().to_string(),
                        ]);
                    }
                }
            }
            _ => {}
        }
    }
    let maximal_from = threshold
        .keys()
        .copied()
        .find(|&n| threshold.range(n..).all(|(_, &m)| m));

    let f_header =
        ["n", "k", "mode", "f", "optimal", "lower_bound", "linked_cubes_formula", "series_k_minus_one", "janzer"];
    Ok(ReportSummary {
        records: records.len(),
        skipped,
        f_rows: write_csv(&dir.join(F_TABLE), &f_header, f_rows)?,
        construct_rows: write_csv(&dir.join(CONSTRUCT_TABLE), &["n", "size", "formula", "construction"], construct_rows)?,
        threshold_rows: write_csv(
            &dir.join(THRESHOLD_TABLE),
            &["n", "maximal", "kwise", "addable_witness"],
            threshold_rows,
        )?,
        maximal_from,
    })
}
