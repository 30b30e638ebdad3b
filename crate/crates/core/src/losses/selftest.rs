//! Invariant and oracle checks for the loss functions, runnable outside the
//! test harness. Each oracle recomputes its loss from the definition in the
//! most direct way (no max-shift, no shared helpers).

use rand::Rng;
use rand_distr::StandardNormal;

use super::*;
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelftestReport {
    pub checks: Vec<SelftestCheck>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: &'static str, outcome: std::result::Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(SelftestCheck { name, passed, detail });
    }
}

type Outcome = std::result::Result<String, String>;

const ORACLE_TOL: f64 = 1e-12;

fn close(name: &str, got: f64, want: f64, tol: f64) -> std::result::Result<f64, String> {
    let err = (got - want).abs();
    if err <= tol {
        Ok(err)
    } else {
        Err(format!("{name}: got {got}, expected {want} (|diff| {err:e} > {tol:e})"))
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn gaussian_rows<R: Rng>(rows: usize, dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect()
}

fn random_distribution<R: Rng>(width: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..width).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

fn random_mask<R: Rng>(len: usize, rng: &mut R) -> Vec<usize> {
    let k = rng.random_range(1..=len);
    rand::seq::index::sample(rng, len, k).into_vec()
}

fn oracle_mtm(p: &[Vec<f64>], q: &[Vec<f64>], mask: &[usize]) -> f64 {
    let mut diffs = Vec::new();
    for &j in mask {
        for t in 0..p[j].len() {
            diffs.push((p[j][t] - q[j][t]).powi(2));
        }
    }
    diffs.iter().sum::<f64>() / diffs.len() as f64
}

fn oracle_mlm(y: &[Vec<f64>], p: &[Vec<f64>], mask: &[usize]) -> f64 {
    let mut total = 0.0;
    for &j in mask {
        total += -y[j].iter().zip(&p[j]).map(|(a, b)| a * b.ln()).filter(|v| v.is_finite()).sum::<f64>();
    }
    total / mask.len() as f64
}

fn oracle_similarity(a: &[Vec<f64>], d: &[Vec<f64>], tau: f64) -> Vec<Vec<f64>> {
    a.iter()
        .map(|ai| {
            let e: Vec<f64> = d
                .iter()
                .map(|dj| (ai.iter().zip(dj).map(|(x, y)| x * y).sum::<f64>() / tau).exp())
                .collect();
            let z: f64 = e.iter().sum();
            e.iter().map(|v| v / z).collect()
        })
        .collect()
}

fn oracle_contrastive(p1: &[Vec<f64>], p2: &[Vec<f64>], pos: &[usize]) -> f64 {
    let b = pos.len() as f64;
    let h1: f64 = pos.iter().enumerate().map(|(i, &k)| -p1[i][k].ln()).sum::<f64>() / b;
    let h2: f64 = pos.iter().enumerate().map(|(i, &k)| -p2[i][k].ln()).sum::<f64>() / b;
    (h1 + h2) / 2.0
}

fn oracle_kl(q: &[f64], p: &[f64]) -> f64 {
    let cross: f64 = q.iter().zip(p).map(|(a, b)| -a * b.ln()).sum();
    let ent: f64 = q.iter().map(|a| -a * a.ln()).sum();
    cross - ent
}

fn softmax_rows(report: &mut SelftestReport, cases: usize, rng: &mut Stream) {
    let outcome = (|| -> Outcome {
        let mut worst = 0.0f64;
        for _ in 0..cases {
            let width = rng.random_range(1..=64);
            let scale = 10f64.powf(rng.random_range(-2.0..3.0));
            let logits: Vec<f64> = (0..width).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let total: f64 = softmax(&logits).iter().sum();
            worst = worst.max(close("softmax row sum", total, 1.0, 1e-9)?);
            let shift = rng.random_range(-50.0..50.0);
            let shifted: Vec<f64> = logits.iter().map(|l| l + shift).collect();
            for (a, b) in softmax(&logits).iter().zip(softmax(&shifted)) {
                close("softmax shift invariance", *a, b, 1e-9)?;
            }
        }
        Ok(format!("{cases} rows, max |sum - 1| = {worst:e}"))
    })();
    report.record("softmax rows sum to one", outcome);
}

fn uniform_contrastive(report: &mut SelftestReport) {
    let outcome = (|| -> Outcome {
        for m in [2usize, 8, 64] {
            // Identical anchors and dictionary entries: every similarity ties.
            let rows = EmbeddingBatch::normalized(vec![vec![1.0, 2.0, -0.5]; m]).map_err(s)?;
            let p = softmax_similarity(&rows, &rows, 0.07).map_err(s)?;
            let pos: Vec<usize> = (0..m).collect();
            let l = contrastive_loss(&p, &p, &pos).map_err(s)?;
            close(&format!("uniform contrastive, M={m}"), l, (m as f64).ln(), 1e-9)?;
        }
        Ok("M in {2, 8, 64} give ln M".into())
    })();
    report.record("uniform similarity contrastive loss is ln M", outcome);
}

fn kl_self(report: &mut SelftestReport, cases: usize, rng: &mut Stream) {
    let outcome = (|| -> Outcome {
        for _ in 0..cases {
            let q = random_distribution(rng.random_range(1..=32), rng);
            let kl = kl_divergence(&q, &q).map_err(s)?;
            if kl != 0.0 {
                return Err(format!("KL(q, q) = {kl}"));
            }
        }
        Ok(format!("{cases} distributions"))
    })();
    report.record("KL(q, q) is zero", outcome);
}

fn total_exact(report: &mut SelftestReport, cfg: &SimilarityConfig) {
    let outcome = (|| -> Outcome {
        let l = total_loss(1.0, 2.0, 3.0, 4.0, 0.6).map_err(s)?;
        if l != 6.4 {
            return Err(format!("total_loss(1, 2, 3, 4, 0.6) = {l:?}"));
        }
        let (lo, hi) = (total_loss(1.0, 2.0, 3.0, 4.0, 0.0).map_err(s)?, total_loss(1.0, 2.0, 3.0, 4.0, 1.0).map_err(s)?);
        let mid = total_loss(1.0, 2.0, 3.0, 4.0, cfg.alpha).map_err(s)?;
        close("affine in alpha", mid, lo + cfg.alpha * (hi - lo), 1e-12)?;
        Ok("6.4 exactly; affine in alpha".into())
    })();
    report.record("total loss weighting", outcome);
}

fn oracle_fixtures(report: &mut SelftestReport, cfg: &SimilarityConfig, cases: usize, rng: &mut Stream) {
    let outcome = (|| -> Outcome {
        let mut worst = 0.0f64;
        for _ in 0..cases {
            let patches = rng.random_range(1..=24);
            let plen = rng.random_range(1..=16);
            let p = gaussian_rows(patches, plen, rng);
            let q = gaussian_rows(patches, plen, rng);
            let mask = random_mask(patches, rng);
            worst = worst.max(close("mtm", mtm_loss(&p, &q, &mask).map_err(s)?, oracle_mtm(&p, &q, &mask), ORACLE_TOL)?);

            let vocab = rng.random_range(2..=20);
            let y: Vec<Vec<f64>> = (0..patches)
                .map(|_| {
                    let hot = rng.random_range(0..vocab);
                    (0..vocab).map(|k| if k == hot { 1.0 } else { 0.0 }).collect()
                })
                .collect();
            let probs: Vec<Vec<f64>> = (0..patches).map(|_| random_distribution(vocab, rng)).collect();
            worst = worst.max(close("mlm", mlm_loss(&y, &probs, &mask).map_err(s)?, oracle_mlm(&y, &probs, &mask), ORACLE_TOL)?);

            let b = rng.random_range(1..=16);
            let dim = rng.random_range(2..=12);
            let t = EmbeddingBatch::normalized(gaussian_rows(b, dim, rng)).map_err(s)?;
            let sy = EmbeddingBatch::normalized(gaussian_rows(b, dim, rng)).map_err(s)?;
            let p_t2s = softmax_similarity(&t, &sy, cfg.tau).map_err(s)?;
            let p_s2t = softmax_similarity(&sy, &t, cfg.tau).map_err(s)?;
            for (got, want) in [
                (&p_t2s, oracle_similarity(t.rows(), sy.rows(), cfg.tau)),
                (&p_s2t, oracle_similarity(sy.rows(), t.rows(), cfg.tau)),
            ] {
                for (gr, wr) in got.iter().zip(&want) {
                    for (g, w) in gr.iter().zip(wr) {
                        worst = worst.max(close("softmax similarity", *g, *w, ORACLE_TOL)?);
                    }
                }
            }
            let pos: Vec<usize> = (0..b).collect();
            let l = contrastive_loss(&p_t2s, &p_s2t, &pos).map_err(s)?;
            if l < 0.0 {
                return Err(format!("negative contrastive loss {l}"));
            }
            let want = oracle_contrastive(&p_t2s, &p_s2t, &pos);
            worst = worst.max(close("contrastive", l, want, ORACLE_TOL * want.abs().max(1.0))?);

            let q_t2s: Vec<Vec<f64>> = (0..b).map(|_| random_distribution(b, rng)).collect();
            let q_s2t: Vec<Vec<f64>> = (0..b).map(|_| random_distribution(b, rng)).collect();
            let d = momentum_distill_loss(&q_t2s, &q_s2t, &p_t2s, &p_s2t).map_err(s)?;
            if d < 0.0 {
                return Err(format!("negative distillation loss {d}"));
            }
            let mut want = 0.0;
            for i in 0..b {
                want += oracle_kl(&q_t2s[i], &p_t2s[i]) + oracle_kl(&q_s2t[i], &p_s2t[i]);
            }
            want /= 2.0 * b as f64;
            worst = worst.max(close("distillation", d, want, ORACLE_TOL * want.abs().max(1.0))?);
        }
        Ok(format!("{cases} random fixtures per loss, max |diff| = {worst:e}"))
    })();
    report.record("losses match brute-force oracles", outcome);
}

fn ema_cases(report: &mut SelftestReport, cfg: &SimilarityConfig, rng: &mut Stream) {
    let outcome = (|| -> Outcome {
        let online: Vec<f64> = (0..32).map(|_| rng.sample(StandardNormal)).collect();
        let momentum: Vec<f64> = (0..32).map(|_| rng.sample(StandardNormal)).collect();
        if ema_update(&online, &momentum, 1.0).map_err(s)? != momentum {
            return Err("m_ema = 1 changed the momentum parameters".into());
        }
        if ema_update(&online, &momentum, 0.0).map_err(s)? != online {
            return Err("m_ema = 0 did not copy the online parameters".into());
        }
        if ema_update(&[0.0], &[2.0], 0.5).map_err(s)? != vec![1.0] {
            return Err("m_ema = 0.5 on ([0], [2]) did not give [1]".into());
        }
        let got = ema_update(&online, &momentum, cfg.m_ema).map_err(s)?;
        for i in 0..online.len() {
            close("ema", got[i], cfg.m_ema * momentum[i] + (1.0 - cfg.m_ema) * online[i], ORACLE_TOL)?;
        }
        Ok("boundary and configured coefficients".into())
    })();
    report.record("EMA update", outcome);
}

/// Runs every check with `cases` random fixtures each.
pub fn run_selftest(cfg: &SimilarityConfig, cases: usize, seed: u64) -> SelftestReport {
    let mut report = SelftestReport::default();
    if let Err(e) = cfg.validate() {
        report.record("configuration", Err(e.to_string()));
        return report;
    }
    let mut rng = stream(seed);
    softmax_rows(&mut report, cases, &mut rng);
    uniform_contrastive(&mut report);
    kl_self(&mut report, cases, &mut rng);
    total_exact(&mut report, cfg);
    oracle_fixtures(&mut report, cfg, cases, &mut rng);
    ema_cases(&mut report, cfg, &mut rng);
    report
}
