//! Greedy versus brute-force comparison on random products.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::brute_force_with_budget;
use crate::error::Result;
use crate::random::{generate_random_product, RandomSpec};
use crate::synthesis::{minimum_cost_accepting_lasso_with, MidpointRule};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub budget: Duration,
    pub seed: u64,
    pub soft_count: usize,
    pub weight_probability: f64,
    pub rule: MidpointRule,
    /// Run trials on all cores; results are still reduced in trial order.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sizes: vec![100],
            trials: 100,
            budget: crate::baseline::DEFAULT_BUDGET,
            seed: 0,
            soft_count: 10,
            weight_probability: 0.2,
            rule: MidpointRule::Leader,
            parallel: true,
        }
    }
}

/// Seed of trial `trial` at size `size`; independent of the midpoint rule so
/// that runs with different rules see the same instances.
pub fn trial_seed(base: u64, size: usize, trial: usize) -> u64 {
    let mix = |mut z: u64| {
        // splitmix64
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    mix(mix(mix(base) ^ size as u64) ^ trial as u64)
}

/// Outcome of one random instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub size: usize,
    pub trial: usize,
    pub seed: u64,
    pub product_states: usize,
    pub greedy_ms: f64,
    pub greedy_len: Option<usize>,
    pub satisfied: Option<usize>,
    pub brute_ms: f64,
    pub brute_len: Option<usize>,
    pub brute_timed_out: bool,
    /// Whether both planners found lassos of the same cost (or both found none).
    pub cost_equal: bool,
}

impl TrialRecord {
    /// Greedy length over brute-force length, when brute force completed
    /// and a lasso exists.
    pub fn ratio(&self) -> Option<f64> {
        match (self.greedy_len, self.brute_len, self.brute_timed_out) {
            (Some(g), Some(b), false) => Some(g as f64 / b as f64),
            _ => None,
        }
    }
}

/// Per-size aggregate. Brute-force averages and ratios only cover
/// instances brute force finished within its budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub format: u32,
    pub size: usize,
    pub trials: usize,
    pub greedy_avg_ms: f64,
    pub greedy_avg_len: Option<f64>,
    pub brute_successes: usize,
    pub brute_avg_ms: Option<f64>,
    pub brute_avg_len: Option<f64>,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    pub ratio_avg: Option<f64>,
    pub avg_satisfied: Option<f64>,
}

pub fn run_trial(config: &ExperimentConfig, size: usize, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(config.seed, size, trial);
    let spec = RandomSpec {
        weight_probability: config.weight_probability,
        ..RandomSpec::sparse(size, config.soft_count, seed)
    };
    let p = generate_random_product(&spec)?;

    let t = Instant::now();
    let greedy = minimum_cost_accepting_lasso_with(&p, config.rule);
    let greedy_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let brute = brute_force_with_budget(&p, Some(config.budget));
    let brute_ms = t.elapsed().as_secs_f64() * 1e3;

    let cost_equal = match (&greedy, &brute.lasso) {
        (Some(g), Some(b)) => g.cost == b.cost,
        (None, None) => true,
        _ => brute.timed_out,
    };
    Ok(TrialRecord {
        size,
        trial,
        seed,
        product_states: p.state_count(),
        greedy_ms,
        greedy_len: greedy.as_ref().map(|l| l.len()),
        satisfied: greedy.as_ref().map(|l| l.satisfied().len()),
        brute_ms,
        brute_len: if brute.timed_out {
            None
        } else {
            brute.lasso.as_ref().map(|l| l.len())
        },
        brute_timed_out: brute.timed_out,
        cost_equal,
    })
}

pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let jobs: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&s| (0..config.trials).map(move |t| (s, t)))
        .collect();
    if config.parallel {
        jobs.par_iter().map(|&(s, t)| run_trial(config, s, t)).collect()
    } else {
        jobs.iter().map(|&(s, t)| run_trial(config, s, t)).collect()
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn summarize(sizes: &[usize], records: &[TrialRecord]) -> Vec<ExperimentRow> {
    sizes
        .iter()
        .map(|&size| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.size == size).collect();
            let done: Vec<&TrialRecord> = rs.iter().copied().filter(|r| !r.brute_timed_out).collect();
            let ratios: Vec<f64> = rs.iter().filter_map(|r| r.ratio()).collect();
            ExperimentRow {
                format: 1,
                size,
                trials: rs.len(),
                greedy_avg_ms: mean(rs.iter().map(|r| r.greedy_ms)).unwrap_or(0.0),
                greedy_avg_len: mean(rs.iter().filter_map(|r| r.greedy_len).map(|l| l as f64)),
                brute_successes: done.len(),
                brute_avg_ms: mean(done.iter().map(|r| r.brute_ms)),
                brute_avg_len: mean(done.iter().filter_map(|r| r.brute_len).map(|l| l as f64)),
                ratio_min: ratios.iter().copied().reduce(f64::min),
                ratio_max: ratios.iter().copied().reduce(f64::max),
                ratio_avg: mean(ratios.iter().copied()),
                avg_satisfied: mean(rs.iter().filter_map(|r| r.satisfied).map(|s| s as f64)),
            }
        })
        .collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<(Vec<ExperimentRow>, Vec<TrialRecord>)> {
    let records = run_trials(config)?;
    Ok((summarize(&config.sizes, &records), records))
}

pub fn write_rows_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    if rows.is_empty() {
        w.write_record([
            "format",
            "size",
            "trials",
            "greedy_avg_ms",
            "greedy_avg_len",
            "brute_successes",
            "brute_avg_ms",
            "brute_avg_len",
            "ratio_min",
            "ratio_max",
            "ratio_avg",
            "avg_satisfied",
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct HistogramBin {
    format: u32,
    size: usize,
    ratio_from: f64,
    ratio_to: f64,
    count: usize,
}

/// Ratio histogram, one row per size and bin of width `bin`, starting at 1.
pub fn write_histogram_tsv<W: Write>(records: &[TrialRecord], sizes: &[usize], bin: f64, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(out);
    for &size in sizes {
        let ratios: Vec<f64> = records
            .iter()
            .filter(|r| r.size == size)
            .filter_map(|r| r.ratio())
            .collect();
        let top = ratios.iter().copied().fold(1.0, f64::max);
        let bins = ((top - 1.0) / bin).floor() as usize + 1;
        for k in 0..bins {
            let from = 1.0 + k as f64 * bin;
            let to = from + bin;
            w.serialize(HistogramBin {
                format: 1,
                size,
                ratio_from: from,
                ratio_to: to,
                count: ratios.iter().filter(|&&r| r >= from && r < to).count(),
            })
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            sizes: vec![20],
            trials: 6,
            budget: Duration::from_secs(30),
            soft_count: 3,
            parallel: false,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn zero_trials_give_empty_rows() {
        let config = ExperimentConfig { trials: 0, ..small() };
        let (rows, recs) = run_experiment(&config).unwrap();
        assert!(recs.is_empty());
        assert_eq!(rows[0].trials, 0);
        assert!(rows[0].ratio_avg.is_none());
    }

    #[test]
    fn small_run_is_consistent_and_deterministic() {
        let (rows, recs) = run_experiment(&small()).unwrap();
        assert!(recs.iter().all(|r| r.cost_equal));
        assert!(recs.iter().filter_map(TrialRecord::ratio).all(|x| x >= 1.0));
        let (_, again) = run_experiment(&ExperimentConfig {
            parallel: true,
            ..small()
        })
        .unwrap();
        let lens = |rs: &[TrialRecord]| rs.iter().map(|r| (r.greedy_len, r.brute_len)).collect::<Vec<_>>();
        assert_eq!(lens(&recs), lens(&again));
        let mut csv = Vec::new();
        write_rows_csv(&rows, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("format,size,trials,"));
        let mut tsv = Vec::new();
        write_histogram_tsv(&recs, &[20], 0.25, &mut tsv).unwrap();
        assert!(String::from_utf8(tsv).unwrap().starts_with("format\tsize\t"));
    }
}
