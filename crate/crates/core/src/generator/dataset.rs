use std::fs;
use std::path::Path;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_pair, GenConfig, SeedPath};
use crate::error::{Error, Result};
use crate::io::ShardWriter;
use crate::rng::cell_stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub m: usize,
    pub n: usize,
    pub shard: String,
    pub pairs: usize,
    /// Draw indices consumed, including failed ones.
    pub draws: u64,
    pub rejections: usize,
    pub failures: usize,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u16,
    pub master_seed: u64,
    pub config: GenConfig,
    pub total_pairs: usize,
    pub total_points: usize,
    pub cells: Vec<CellSummary>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn shard_file_name(m: usize, n: usize) -> String {
    format!("m{m:02}_n{n:02}.s2sh")
}

/// Pair count for every `(m, n)` cell, row-major. A total budget is spread
/// as evenly as possible with earlier cells taking the remainder.
pub fn cell_counts(cfg: &GenConfig) -> Vec<(usize, usize, usize)> {
    let cells = cfg.m_max * cfg.n_max;
    let (base, extra) = match (cfg.pairs_per_cell, cfg.total_pairs) {
        (_, Some(total)) => (total / cells, total % cells),
        (Some(per), None) => (per, 0),
        (None, None) => (GenConfig::DEFAULT_PAIRS_PER_CELL, 0),
    };
    let mut out = Vec::with_capacity(cells);
    for m in 1..=cfg.m_max {
        for n in 1..=cfg.n_max {
            let idx = (m - 1) * cfg.n_max + (n - 1);
            out.push((m, n, base + usize::from(idx < extra)));
        }
    }
    out
}

/// Generates every cell in parallel, one shard per cell, and writes
/// `manifest.json` next to the shards. Output is identical for any worker
/// count because each draw seeds its own stream from `(seed, m, n, draw)`.
pub fn generate_dataset(cfg: &GenConfig, workers: usize, out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    if workers == 0 {
        return Err(Error::arg("workers must be at least 1"));
    }
    fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let counts = cell_counts(cfg);
    let cells = pool.install(|| {
        counts
            .par_iter()
            .map(|&(m, n, count)| generate_cell(cfg, m, n, count, out_dir))
            .collect::<Result<Vec<_>>>()
    })?;
    let manifest = Manifest {
        format: "S2SH".into(),
        version: crate::io::SHARD_VERSION,
        master_seed: cfg.seed,
        config: cfg.clone(),
        total_pairs: cells.iter().map(|c| c.pairs).sum(),
        total_points: cells.iter().map(|c| c.points).sum(),
        cells,
    };
    fs::write(out_dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    info!(
        "wrote {} pairs ({} points) to {}",
        manifest.total_pairs,
        manifest.total_points,
        out_dir.display()
    );
    Ok(manifest)
}

fn generate_cell(cfg: &GenConfig, m: usize, n: usize, count: usize, out_dir: &Path) -> Result<CellSummary> {
    let shard = shard_file_name(m, n);
    let mut writer = ShardWriter::create(&out_dir.join(&shard))?;
    let max_failures = 1000 + 10 * count;
    let mut summary = CellSummary {
        m,
        n,
        shard,
        pairs: 0,
        draws: 0,
        rejections: 0,
        failures: 0,
        points: 0,
    };
    while summary.pairs < count {
        let draw = summary.draws;
        summary.draws += 1;
        let mut rng = cell_stream(cfg.seed, m, n, draw);
        match generate_pair(m, n, cfg, &mut rng) {
            Ok(mut pair) => {
                if let Some(p) = pair.provenance.as_mut() {
                    summary.rejections += p.rejections;
                    p.seed_path = Some(SeedPath {
                        master_seed: cfg.seed,
                        m,
                        n,
                        draw,
                    });
                }
                writer.write_pair(&pair)?;
                summary.pairs += 1;
                summary.points += (m + n) * cfg.series_len;
            }
            Err(Error::GenerationFailed { attempts, last_reason }) => {
                summary.rejections += attempts;
                summary.failures += 1;
                warn!("cell ({m}, {n}) draw {draw}: gave up after {attempts} candidates ({last_reason})");
                if summary.failures > max_failures {
                    return Err(Error::GenerationFailed { attempts, last_reason });
                }
            }
            Err(e) => return Err(e),
        }
    }
    writer.finish()?;
    Ok(summary)
}
