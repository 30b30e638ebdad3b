use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::generator::{Manifest, MANIFEST_FILE};
use crate::io::read_shard;

/// Outcome of [`validate_dir`]; `problems` is empty for a sound dataset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub shards: usize,
    pub records: usize,
    pub floats: usize,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    Ok(serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?)
}

/// Reads every shard listed in the manifest and checks record counts, cell
/// dimensions, value accounting and all pair invariants.
pub fn validate_dir(dir: &Path) -> Result<ValidationReport> {
    let manifest = read_manifest(dir)?;
    let cap = manifest.config.value_cap;
    let len = manifest.config.series_len;
    let mut report = ValidationReport::default();
    let mut listed = BTreeSet::new();
    for cell in &manifest.cells {
        listed.insert(cell.shard.clone());
        let path = dir.join(&cell.shard);
        let mut reader = match read_shard(&path) {
            Ok(r) => r,
            Err(e) => {
                report.problems.push(format!("{}: {e}", cell.shard));
                continue;
            }
        };
        report.shards += 1;
        let mut expected_floats = 0;
        for (i, pair) in reader.by_ref().enumerate() {
            let pair = match pair {
                Ok(p) => p,
                Err(e) => {
                    report.problems.push(e.to_string());
                    break;
                }
            };
            let tag = format!("{} record {i}", cell.shard);
            if (pair.m(), pair.n(), pair.len()) != (cell.m, cell.n, len) {
                report.problems.push(format!(
                    "{tag}: shape ({}, {}, {}) but cell is ({}, {}, {len})",
                    pair.m(),
                    pair.n(),
                    pair.len(),
                    cell.m,
                    cell.n
                ));
            }
            if let Err(why) = pair.check_invariants(cap, 1e-6, 1e-6) {
                report.problems.push(format!("{tag}: {why}"));
            }
            expected_floats += (pair.m() + pair.n()) * pair.len();
        }
        if reader.records() != cell.pairs {
            report
                .problems
                .push(format!("{}: {} records, manifest says {}", cell.shard, reader.records(), cell.pairs));
        }
        if reader.float_count() != expected_floats || reader.float_count() != cell.points {
            report.problems.push(format!(
                "{}: {} values read, manifest says {}",
                cell.shard,
                reader.float_count(),
                cell.points
            ));
        }
        report.records += reader.records();
        report.floats += reader.float_count();
    }
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if name.ends_with(".s2sh") && !listed.contains(&name) {
            report.problems.push(format!("{name}: shard not listed in the manifest"));
        }
    }
    if report.records != manifest.total_pairs {
        report.problems.push(format!(
            "{} records in total, manifest says {}",
            report.records, manifest.total_pairs
        ));
    }
    Ok(report)
}
