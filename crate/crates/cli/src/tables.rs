//! CSV front ends for the stats, radviz and preinterp commands.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use symseries::generator::SeriesPair;
use symseries::imputeprep::{pre_interpolate, MaskedSeries};
use symseries::io::{read_manifest, read_shard};
use symseries::rng::stream;
use symseries::stats::{profile_series_with, radviz_project, StatsOptions, StatsProfile};

pub const STATS_HEADER: [&str; 10] = [
    "shard",
    "record",
    "channel",
    "adf_stat",
    "adf_p",
    "forecastability",
    "fft_mean",
    "perm_entropy",
    "seasonality",
    "mk_trend",
];

/// Shards in manifest order when a manifest exists, otherwise sorted by name.
fn shard_names(dir: &Path) -> Result<Vec<String>> {
    if let Ok(m) = read_manifest(dir) {
        return Ok(m.cells.into_iter().map(|c| c.shard).collect());
    }
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if name.ends_with(".s2sh") {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

fn channel_ids(pair: &SeriesPair) -> impl Iterator<Item = String> {
    (1..=pair.m()).map(|i| format!("x{i}")).chain((1..=pair.n()).map(|k| format!("y{k}")))
}

pub fn write_stats(dir: &Path, out: &Path, opts: &StatsOptions) -> Result<usize> {
    let mut w = csv::Writer::from_path(out).with_context(|| format!("creating {}", out.display()))?;
    w.write_record(STATS_HEADER)?;
    let mut rows = 0;
    for shard in shard_names(dir)? {
        let pairs: Vec<SeriesPair> = read_shard(&dir.join(&shard))?.collect::<symseries::Result<_>>()?;
        let profiles: Vec<Vec<StatsProfile>> = pairs
            .par_iter()
            .map(|p| p.channels().map(|c| profile_series_with(c, opts)).collect::<symseries::Result<_>>())
            .collect::<symseries::Result<_>>()?;
        for (record, (pair, profs)) in pairs.iter().zip(&profiles).enumerate() {
            for (channel, p) in channel_ids(pair).zip(profs) {
                w.write_record([
                    shard.clone(),
                    record.to_string(),
                    channel,
                    p.adf_stat.to_string(),
                    p.adf_p.to_string(),
                    p.forecastability.to_string(),
                    p.fft_mean.to_string(),
                    p.perm_entropy.to_string(),
                    p.seasonality.to_string(),
                    p.mk_trend.to_string(),
                ])?;
                rows += 1;
            }
        }
    }
    w.flush()?;
    Ok(rows)
}

pub fn write_radviz(input: &Path, out: &Path) -> Result<usize> {
    let mut r = csv::Reader::from_path(input).with_context(|| format!("opening {}", input.display()))?;
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != STATS_HEADER {
        bail!("{} does not have the stats header", input.display());
    }
    let mut keys = Vec::new();
    let mut profiles = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .with_context(|| format!("row {}: column {} is not a number", line + 2, STATS_HEADER[i]))
        };
        let mk: i8 = rec[9]
            .parse()
            .with_context(|| format!("row {}: mk_trend is not -1, 0 or 1", line + 2))?;
        profiles.push(StatsProfile {
            adf_stat: num(3)?,
            adf_p: num(4)?,
            forecastability: num(5)?,
            fft_mean: num(6)?,
            perm_entropy: num(7)?,
            seasonality: num(8)?,
            mk_trend: mk,
            flags: Default::default(),
        });
        keys.push([rec[0].to_string(), rec[1].to_string(), rec[2].to_string()]);
    }
    let points = radviz_project(&profiles)?;
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["shard", "record", "channel", "x", "y"])?;
    for (k, p) in keys.iter().zip(&points) {
        w.write_record([k[0].as_str(), &k[1], &k[2], &p.x.to_string(), &p.y.to_string()])?;
    }
    w.flush()?;
    Ok(points.len())
}

/// Each column is one series; empty fields are missing. The output repeats
/// every column filled in, followed by `<name>_missing` flags.
pub fn write_preinterp(input: &Path, out: &Path, ratio: f64, seed: u64) -> Result<usize> {
    let mut r = csv::Reader::from_path(input).with_context(|| format!("opening {}", input.display()))?;
    let names: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if names.is_empty() {
        bail!("{} has no columns", input.display());
    }
    let mut columns: BTreeMap<usize, Vec<Option<f64>>> = (0..names.len()).map(|i| (i, Vec::new())).collect();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        for (i, field) in rec.iter().enumerate() {
            let v = match field.trim() {
                "" => None,
                s => Some(
                    s.parse::<f64>()
                        .with_context(|| format!("row {}, column {}: `{s}` is not a number", line + 2, names[i]))?,
                ),
            };
            columns.get_mut(&i).expect("known column").push(v);
        }
    }
    let mut rng = stream(seed);
    let mut filled = Vec::with_capacity(names.len());
    let mut masks = Vec::with_capacity(names.len());
    let mut count = 0;
    for (i, values) in columns.into_values().enumerate() {
        let mut ms = MaskedSeries::from_observed(values);
        if ratio > 0.0 {
            ms = ms.mask_more(ratio, &mut rng)?;
        }
        count += ms.missing_count();
        filled.push(pre_interpolate(&ms).with_context(|| format!("column {}", names[i]))?);
        masks.push(ms.miss_mask);
    }
    let mut w = csv::Writer::from_path(out)?;
    let mut header = names.clone();
    header.extend(names.iter().map(|n| format!("{n}_missing")));
    w.write_record(&header)?;
    for t in 0..filled[0].len() {
        let mut row: Vec<String> = filled.iter().map(|c| c[t].to_string()).collect();
        row.extend(masks.iter().map(|m| u8::from(m[t]).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(count)
}
