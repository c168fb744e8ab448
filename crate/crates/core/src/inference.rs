//! Order-statistic significance tests on sampled diagrams.
//!
//! For rank `i`, `O_i` is the `i`-th largest persistence of a diagram (zero
//! when the diagram is smaller). The sampled values give an empirical null
//! distribution; the original diagram's `O_i` is significant when it lies
//! above the one-sided interval `[0, Ô_i + a_i]`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::PersistenceDiagram;
use crate::sampler::SampleSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderStatSample {
    /// 1-based.
    pub rank: usize,
    pub values: Vec<f64>,
}

/// `O_1 >= ... >= O_max_rank` for one diagram, zero-padded.
pub fn ranked_persistences(d: &PersistenceDiagram, max_rank: usize) -> Vec<f64> {
    let mut p = d.sorted_persistences();
    p.resize(max_rank, 0.0);
    p.truncate(max_rank);
    p
}

pub fn order_statistics(samples: &SampleSet, max_rank: usize) -> Result<Vec<OrderStatSample>> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut out: Vec<OrderStatSample> = (1..=max_rank)
        .map(|rank| OrderStatSample {
            rank,
            values: Vec::with_capacity(samples.len()),
        })
        .collect();
    for d in samples.iter_diagrams() {
        for (o, v) in out.iter_mut().zip(ranked_persistences(d, max_rank)) {
            o.values.push(v);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneSidedInterval {
    pub estimate: f64,
    pub a: f64,
    pub upper: f64,
}

/// `a = inf{a >= 0 : #{v >= o_org + a} / N <= alpha}` over the empirical
/// distribution. With `m = floor(alpha N)` the constraint holds exactly when
/// `o_org + a` exceeds the `(m+1)`-th largest value, so the infimum is
/// `max(0, v_(m+1) - o_org)` (not attained when positive).
pub fn one_sided_ci(sample: &OrderStatSample, o_org: f64, alpha: f64) -> Result<OneSidedInterval> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha = {alpha} must lie in (0, 1]"
        )));
    }
    let n = sample.values.len();
    if n == 0 {
        return Err(Error::EmptySampleSet);
    }
    let estimate = sample.values.iter().sum::<f64>() / n as f64;
    // Counts are integers; the slack absorbs alpha * N landing a hair below one.
    let m = (alpha * n as f64 + 1e-9).floor() as usize;
    let a = if m >= n {
        0.0
    } else {
        let mut sorted = sample.values.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        (sorted[m] - o_org).max(0.0)
    };
    Ok(OneSidedInterval {
        estimate,
        a,
        upper: estimate + a,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    pub original: f64,
    pub estimate: f64,
    pub a: f64,
    pub ci_upper: f64,
    pub p_value: f64,
    pub significant: bool,
    pub tested: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    pub alpha: f64,
    pub n_samples: usize,
    pub ranks: Vec<RankResult>,
}

impl InferenceReport {
    /// Ranks declared significant, in order.
    pub fn significant_ranks(&self) -> Vec<usize> {
        self.ranks
            .iter()
            .filter(|r| r.tested && r.significant)
            .map(|r| r.rank)
            .collect()
    }

    /// Number of leading significant ranks.
    pub fn detected(&self) -> usize {
        self.ranks.iter().take_while(|r| r.significant).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,original,estimate,a,ci_upper,p_value,significant,tested\n");
        for r in &self.ranks {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.rank, r.original, r.estimate, r.a, r.ci_upper, r.p_value, r.significant, r.tested
            );
        }
        s
    }

    pub fn to_pretty(&self) -> String {
        let mut s = format!("N = {} samples, alpha = {}\n", self.n_samples, self.alpha);
        let _ = writeln!(
            s,
            "{:>4}  {:>10}  {:>10}  {:>10}  {:>11}",
            "rank", "original", "CI upper", "P_i", "significant"
        );
        for r in &self.ranks {
            let verdict = match (r.tested, r.significant) {
                (false, _) => "untested",
                (true, true) => "yes",
                (true, false) => "no",
            };
            let _ = writeln!(
                s,
                "{:>4}  {:>10.4}  {:>10.4}  {:>10.4}  {:>11}",
                r.rank, r.original, r.ci_upper, r.p_value, verdict
            );
        }
        s
    }
}

/// Test ranks `1..=max_rank` in order, stopping after the first rank whose
/// original value falls inside its interval. Untested ranks still carry their
/// interval and `P_i` for reference.
pub fn sequential_test(
    samples: &SampleSet,
    original: &PersistenceDiagram,
    alpha: f64,
    max_rank: usize,
) -> Result<InferenceReport> {
    if original.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    let stats = order_statistics(samples, max_rank)?;
    let orig = ranked_persistences(original, max_rank);
    let n = samples.len();
    let mut testing = true;
    let mut ranks = Vec::with_capacity(max_rank);
    for (stat, &o) in stats.iter().zip(&orig) {
        let ci = one_sided_ci(stat, o, alpha)?;
        let exceed = stat.values.iter().filter(|&&v| v > o).count();
        let significant = o > ci.upper;
        ranks.push(RankResult {
            rank: stat.rank,
            original: o,
            estimate: ci.estimate,
            a: ci.a,
            ci_upper: ci.upper,
            p_value: exceed as f64 / n as f64,
            significant: testing && significant,
            tested: testing,
        });
        if testing && !significant {
            testing = false;
        }
    }
    Ok(InferenceReport {
        alpha,
        n_samples: n,
        ranks,
    })
}
