//! Disorder-averaged studies: one independent field per trial, exact endpoint
//! law per field, and aggregate diagnostics over the batch.

use std::sync::Arc;
use std::time::Instant;

use pamlab_core::path::PathClassifier;
use pamlab_core::polymer::comparator_with_stats;
use pamlab_core::rng::{derive_seed, stream, PATH_STREAM};
use pamlab_core::stats::{endpoint_limit_cdf_1d, ks_distance, median, wilson_interval};
use pamlab_core::{
    endpoint_law, enumerate_ball, estimate_event_probability, final_front, forward_recursion, gap_diagnostics,
    localization_mass, modified_field_stats, order_statistics, sample_pareto_field, BallIndex, EndpointLaw,
    Error, WalkKernel,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format::{f17, f17_opt, f17_vec, nullable};

/// Balls above this many sites are refused per trial.
pub const MAX_TRIAL_SITES: usize = 1 << 25;

/// Parameters of a batch.
#[derive(Clone, Debug)]
pub struct TrialConfig {
    pub alpha: f64,
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub kernel: WalkKernel,
    /// Path samples per field for the event-C estimate; `0` skips it.
    pub path_samples: usize,
}

impl TrialConfig {
    pub fn new(alpha: f64, d: usize, n: usize, trials: usize, master_seed: u64) -> pamlab_core::Result<Self> {
        Ok(TrialConfig {
            alpha,
            d,
            n,
            trials,
            master_seed,
            kernel: WalkKernel::uniform(d)?,
            path_samples: 0,
        })
    }

    pub fn validate(&self) -> pamlab_core::Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(invalid("alpha", format!("must be a positive finite number, got {}", self.alpha)));
        }
        if !(1..=3).contains(&self.d) {
            return Err(Error::UnsupportedDimension(self.d));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1".into()));
        }
        if self.kernel.dim() != self.d {
            return Err(invalid("kernel", format!("has dimension {}, expected {}", self.kernel.dim(), self.d)));
        }
        if self.path_samples > 0 && self.path_samples < pamlab_core::path::MIN_EVENT_SAMPLES {
            return Err(invalid(
                "samples",
                format!("must be at least {}", pamlab_core::path::MIN_EVENT_SAMPLES),
            ));
        }
        if self.path_samples > 0 && self.n < 3 {
            return Err(invalid("N", "event C needs N >= 3".into()));
        }
        Ok(())
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

/// Gap observables of one field at radius `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    /// `X(1) - X(2)`.
    #[serde(serialize_with = "f17", deserialize_with = "nullable")]
    pub x12: f64,
    /// `Z(1) - Z(2)`.
    #[serde(serialize_with = "f17", deserialize_with = "nullable")]
    pub z12: f64,
    #[serde(serialize_with = "f17_opt")]
    pub z13: Option<f64>,
    /// `N (Z(1) - Z(2))`.
    #[serde(serialize_with = "f17", deserialize_with = "nullable")]
    pub n_times_z12: f64,
    /// `(Z(1) - Z(2)) / N^{d/alpha}`.
    #[serde(serialize_with = "f17_opt")]
    pub z12_scaled: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventCEstimate {
    #[serde(serialize_with = "f17", deserialize_with = "nullable")]
    pub estimate: f64,
    #[serde(serialize_with = "f17", deserialize_with = "nullable")]
    pub ci_low: f64,
    #[serde(serialize_with = "f17", deserialize_with = "nullable")]
    pub ci_high: f64,
    pub samples: usize,
}

/// One field, one line of output. Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    #[serde(serialize_with = "f17")]
    pub alpha: f64,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(serialize_with = "f17")]
    pub p_w: f64,
    #[serde(serialize_with = "f17")]
    pub p_z1: f64,
    #[serde(serialize_with = "f17")]
    pub p_z2: f64,
    #[serde(serialize_with = "f17")]
    pub two_point_mass: f64,
    pub w: Vec<i32>,
    pub z1: Vec<i32>,
    pub z2: Vec<i32>,
    #[serde(rename = "w_over_N", serialize_with = "f17_vec")]
    pub w_over_n: Vec<f64>,
    pub w_equals_z1: bool,
    pub w_in_top_two: bool,
    pub ties_detected: bool,
    #[serde(serialize_with = "f17")]
    pub log_u: f64,
    pub gap_stats: GapStats,
    /// Reach-and-stick comparator agrees with `w` (`d = 1` only).
    pub comparator_agrees: Option<bool>,
    #[serde(rename = "event_C_estimate")]
    pub event_c_estimate: Option<EventCEstimate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
}

impl TrialRecord {
    /// The record's own consistency conditions.
    pub fn check_invariants(&self) -> Result<(), String> {
        let tol = 1e-12;
        for (name, p) in [
            ("p_w", self.p_w),
            ("p_z1", self.p_z1),
            ("p_z2", self.p_z2),
            ("two_point_mass", self.two_point_mass),
        ] {
            if !(-tol..=1.0 + tol).contains(&p) {
                return Err(format!("trial {}: {} = {} outside [0, 1]", self.trial, name, p));
            }
        }
        if self.two_point_mass + tol < self.p_z1.max(self.p_z2) {
            return Err(format!("trial {}: two_point_mass below max(p_z1, p_z2)", self.trial));
        }
        if self.p_w + tol < self.p_z1.max(self.p_z2) {
            return Err(format!("trial {}: p_w is not the largest endpoint mass", self.trial));
        }
        Ok(())
    }

    /// Drops wall-clock data.
    pub fn canonicalize(&mut self) {
        self.runtime_ms = None;
    }
}

/// A trial that could not be completed.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialFailure {
    pub trial: u64,
    pub seed: u64,
    pub error: Error,
}

impl std::fmt::Display for TrialFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "trial {} (seed {}): {}", self.trial, self.seed, self.error)
    }
}

pub type TrialOutcome = Result<TrialRecord, TrialFailure>;

fn shared_ball(d: usize, n: usize) -> pamlab_core::Result<Arc<BallIndex>> {
    let sites = pamlab_core::lattice::ball_cardinality(d, n as u64).unwrap_or(u128::MAX);
    if sites > MAX_TRIAL_SITES as u128 {
        return Err(Error::Capacity {
            what: "ball sites per trial",
            requested: sites,
            limit: MAX_TRIAL_SITES as u128,
        });
    }
    Ok(Arc::new(enumerate_ball(d, n)?))
}

/// Runs `f(i)` for `i in 0..count` on at most `threads` workers and returns
/// the results in index order.
pub fn ordered_parallel<T: Send>(count: usize, threads: Option<usize>, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    let run = || (0..count).into_par_iter().map(&f).collect();
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

/// One record per trial, in trial order whatever the schedule. Trial `i`
/// uses the field seed `derive_seed(master_seed, i)`.
pub fn run_trials(cfg: &TrialConfig, threads: Option<usize>) -> pamlab_core::Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let ball = shared_ball(cfg.d, cfg.n);
    Ok(ordered_parallel(cfg.trials, threads, |i| {
        let seed = derive_seed(cfg.master_seed, i as u64);
        let fail = |error| TrialFailure {
            trial: i as u64,
            seed,
            error,
        };
        let ball = ball.clone().map_err(fail)?;
        run_trial(cfg, i as u64, seed, ball).map_err(fail)
    }))
}

fn run_trial(cfg: &TrialConfig, trial: u64, seed: u64, ball: Arc<BallIndex>) -> pamlab_core::Result<TrialRecord> {
    let started = Instant::now();
    let n = cfg.n;
    let field = sample_pareto_field(seed, cfg.alpha, ball.clone())?;
    let (law, event_c_estimate) = if cfg.path_samples > 0 {
        let fronts = forward_recursion(&field, &cfg.kernel, n)?;
        let law = endpoint_law(&fronts)?;
        let modified = modified_field_stats(&field, n)?;
        let mut classifier = PathClassifier::new(&field, &modified, &law)?;
        let mut rng = stream(seed, PATH_STREAM);
        let mut err = None;
        let est = estimate_event_probability(
            &fronts,
            &field,
            &cfg.kernel,
            |p| match classifier.classify(p) {
                Ok(f) => f.in_c,
                Err(e) => {
                    err.get_or_insert(e);
                    false
                }
            },
            cfg.path_samples,
            &mut rng,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        let c = EventCEstimate {
            estimate: est.estimate,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            samples: est.samples,
        };
        (law, Some(c))
    } else {
        let front = final_front(&field, &cfg.kernel, n)?;
        (EndpointLaw::from_log_weights(ball, n, front, field.fingerprint())?, None)
    };
    let modified = modified_field_stats(&field, n)?;
    let order = order_statistics(&field, n)?;
    let mass = localization_mass(&law, &modified)?;
    let gap_stats = if order.len() >= 2 {
        let g = gap_diagnostics(&order, &modified, 1)?;
        GapStats {
            x12: g.x_gaps[0],
            z12: g.z12,
            z13: g.z13,
            n_times_z12: g.n_times_z12,
            z12_scaled: g.z12_scaled,
        }
    } else {
        GapStats {
            x12: f64::NAN,
            z12: f64::NAN,
            z13: None,
            n_times_z12: f64::NAN,
            z12_scaled: None,
        }
    };
    let comparator_agrees = if cfg.d == 1 {
        Some(comparator_with_stats(&field, n, &cfg.kernel, &modified)?.choice == mass.w)
    } else {
        None
    };
    let scale = n.max(1) as f64;
    Ok(TrialRecord {
        trial,
        seed,
        alpha: cfg.alpha,
        d: cfg.d,
        n,
        p_w: mass.p_w,
        p_z1: mass.p_z1,
        p_z2: mass.p_z2,
        two_point_mass: mass.two_point_mass,
        w: mass.w.coords().to_vec(),
        z1: mass.z1.coords().to_vec(),
        z2: mass.z2.coords().to_vec(),
        w_over_n: mass.w.coords().iter().map(|&c| c as f64 / scale).collect(),
        w_equals_z1: mass.w_is_z1,
        w_in_top_two: mass.w_in_top_two,
        ties_detected: law.ties_detected() || order.ties_detected() || modified.ties_detected(),
        log_u: law.log_u(),
        gap_stats,
        comparator_agrees,
        event_c_estimate,
        runtime_ms: Some(started.elapsed().as_secs_f64() * 1e3),
    })
}

/// Aggregates of a homogeneous batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchSummary {
    #[serde(serialize_with = "f17")]
    pub alpha: f64,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub records: usize,
    #[serde(serialize_with = "f17")]
    pub median_p_w: f64,
    #[serde(serialize_with = "f17")]
    pub min_p_w: f64,
    #[serde(serialize_with = "f17")]
    pub mean_two_point_mass: f64,
    #[serde(serialize_with = "f17")]
    pub median_two_point_mass: f64,
    #[serde(serialize_with = "f17")]
    pub fraction_w_equals_z1: f64,
    #[serde(serialize_with = "f17")]
    pub fraction_w_in_top_two: f64,
    #[serde(serialize_with = "f17_opt")]
    pub fraction_comparator_agrees: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    pub median_event_c: Option<f64>,
    #[serde(serialize_with = "f17")]
    pub median_n_times_z12: f64,
    pub ties_detected: usize,
}

fn check_common(records: &[TrialRecord], min: usize) -> pamlab_core::Result<(f64, usize, usize)> {
    if records.len() < min {
        return Err(invalid("records", format!("need at least {}, got {}", min, records.len())));
    }
    let r0 = &records[0];
    if records.iter().any(|r| r.alpha != r0.alpha || r.d != r0.d || r.n != r0.n) {
        return Err(invalid("records", "mixed (alpha, d, N) in one batch".into()));
    }
    Ok((r0.alpha, r0.d, r0.n))
}

fn fraction(records: &[TrialRecord], pred: impl Fn(&TrialRecord) -> bool) -> f64 {
    records.iter().filter(|r| pred(r)).count() as f64 / records.len() as f64
}

pub fn summarize(records: &[TrialRecord]) -> pamlab_core::Result<BatchSummary> {
    let (alpha, d, n) = check_common(records, 1)?;
    let col = |f: fn(&TrialRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
    let p_w = col(|r| r.p_w);
    let tpm = col(|r| r.two_point_mass);
    let comparator: Vec<bool> = records.iter().filter_map(|r| r.comparator_agrees).collect();
    let event_c: Vec<f64> = records
        .iter()
        .filter_map(|r| r.event_c_estimate.as_ref().map(|e| e.estimate))
        .collect();
    Ok(BatchSummary {
        alpha,
        d,
        n,
        records: records.len(),
        median_p_w: median(&p_w).unwrap_or(f64::NAN),
        min_p_w: p_w.iter().cloned().fold(f64::INFINITY, f64::min),
        mean_two_point_mass: tpm.iter().sum::<f64>() / tpm.len() as f64,
        median_two_point_mass: median(&tpm).unwrap_or(f64::NAN),
        fraction_w_equals_z1: fraction(records, |r| r.w_equals_z1),
        fraction_w_in_top_two: fraction(records, |r| r.w_in_top_two),
        fraction_comparator_agrees: (!comparator.is_empty())
            .then(|| comparator.iter().filter(|&&b| b).count() as f64 / comparator.len() as f64),
        median_event_c: median(&event_c),
        median_n_times_z12: median(&col(|r| r.gap_stats.n_times_z12)).unwrap_or(f64::NAN),
        ties_detected: records.iter().filter(|r| r.ties_detected).count(),
    })
}

/// KS comparison of the empirical law of `w/N` with the `d = 1` limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndpointTest {
    #[serde(serialize_with = "f17")]
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub records_used: usize,
    pub excluded_ties: usize,
    #[serde(serialize_with = "f17")]
    pub ks: f64,
    #[serde(serialize_with = "f17")]
    pub threshold: f64,
    pub pass: bool,
}

pub fn endpoint_distribution_test(records: &[TrialRecord], threshold: f64) -> pamlab_core::Result<EndpointTest> {
    let (alpha, d, n) = check_common(records, 100)?;
    if d != 1 {
        return Err(invalid("d", "the analytic endpoint CDF is implemented for d = 1".into()));
    }
    let kept: Vec<f64> = records
        .iter()
        .filter(|r| !r.ties_detected)
        .map(|r| r.w_over_n[0])
        .collect();
    let ks = ks_distance(&kept, |x| endpoint_limit_cdf_1d(x, alpha))?;
    Ok(EndpointTest {
        alpha,
        n,
        records_used: kept.len(),
        excluded_ties: records.len() - kept.len(),
        ks,
        threshold,
        pass: ks < threshold,
    })
}

/// How often `w = z(1)`, and `w in {z(1), z(2)}`, with Wilson intervals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Z1Frequency {
    pub records: usize,
    pub z1_hits: usize,
    #[serde(serialize_with = "f17")]
    pub z1_fraction: f64,
    #[serde(serialize_with = "f17")]
    pub z1_ci_low: f64,
    #[serde(serialize_with = "f17")]
    pub z1_ci_high: f64,
    pub top_two_hits: usize,
    #[serde(serialize_with = "f17")]
    pub top_two_fraction: f64,
    #[serde(serialize_with = "f17")]
    pub top_two_ci_low: f64,
    #[serde(serialize_with = "f17")]
    pub top_two_ci_high: f64,
}

pub fn w_equals_z1_frequency(records: &[TrialRecord]) -> pamlab_core::Result<Z1Frequency> {
    if records.len() < 100 {
        return Err(invalid("records", format!("need at least 100, got {}", records.len())));
    }
    let n = records.len();
    let z1 = records.iter().filter(|r| r.w_equals_z1).count();
    let top = records.iter().filter(|r| r.w_in_top_two).count();
    let (a, b) = wilson_interval(z1, n);
    let (c, e) = wilson_interval(top, n);
    Ok(Z1Frequency {
        records: n,
        z1_hits: z1,
        z1_fraction: z1 as f64 / n as f64,
        z1_ci_low: a,
        z1_ci_high: b,
        top_two_hits: top,
        top_two_fraction: top as f64 / n as f64,
        top_two_ci_low: c,
        top_two_ci_high: e,
    })
}

pub const HISTOGRAM_BINS: usize = 50;

/// Counts of `w/N` (first coordinate) in equal bins on `[-1, 1]`; `1` goes
/// to the last bin.
pub fn w_over_n_histogram(records: &[TrialRecord], bins: usize) -> Vec<(f64, f64, u64)> {
    let width = 2.0 / bins as f64;
    let mut counts = vec![0u64; bins];
    for r in records {
        let x = r.w_over_n[0];
        let b = (((x + 1.0) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (-1.0 + i as f64 * width, -1.0 + (i + 1) as f64 * width, c))
        .collect()
}

/// `Z(1) - Z(2)` at radius `N`, no polymer computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRecord {
    pub trial: u64,
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(serialize_with = "f17")]
    pub z12: f64,
    #[serde(serialize_with = "f17")]
    pub n_times_z12: f64,
    pub ties_detected: bool,
}

/// Field-only batch for the gap-scaling study; trial `i` uses the same seed
/// as in [`run_trials`], so fields are nested across `N`.
pub fn gap_trials(
    alpha: f64,
    d: usize,
    n: usize,
    trials: usize,
    master_seed: u64,
    threads: Option<usize>,
) -> pamlab_core::Result<Vec<GapRecord>> {
    let ball = shared_ball(d, n)?;
    ordered_parallel(trials, threads, |i| {
        let seed = derive_seed(master_seed, i as u64);
        let field = sample_pareto_field(seed, alpha, ball.clone())?;
        let m = modified_field_stats(&field, n)?;
        let z12 = m.value(1) - m.value(2);
        Ok(GapRecord {
            trial: i as u64,
            seed,
            n,
            z12,
            n_times_z12: n as f64 * z12,
            ties_detected: m.ties_detected(),
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trial_is_reproducible() {
        let cfg = TrialConfig::new(2.0, 1, 50, 1, 42).unwrap();
        let mut a = run_trials(&cfg, Some(1)).unwrap().remove(0).unwrap();
        let mut b = run_trials(&cfg, Some(1)).unwrap().remove(0).unwrap();
        a.canonicalize();
        b.canonicalize();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        a.check_invariants().unwrap();
    }

    #[test]
    fn capacity_failure_is_per_trial() {
        let cfg = TrialConfig::new(1.0, 3, 400, 3, 1).unwrap();
        let out = run_trials(&cfg, Some(1)).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|o| matches!(o, Err(TrialFailure { error: Error::Capacity { .. }, .. }))));
    }

    #[test]
    fn rejects_zero_trials() {
        let cfg = TrialConfig::new(2.0, 1, 50, 0, 42).unwrap();
        let e = run_trials(&cfg, None).unwrap_err();
        assert!(e.to_string().contains("trials"));
    }

    #[test]
    fn histogram_edges() {
        let mut r = run_trials(&TrialConfig::new(2.0, 1, 10, 1, 3).unwrap(), Some(1)).unwrap().remove(0).unwrap();
        let mut rs = Vec::new();
        for x in [-1.0, -0.99, 0.0, 1.0] {
            r.w_over_n = vec![x];
            rs.push(r.clone());
        }
        let h = w_over_n_histogram(&rs, 50);
        assert_eq!(h.len(), 50);
        assert_eq!(h[0].2, 2);
        assert_eq!(h[25].2, 1);
        assert_eq!(h[49].2, 1);
        assert!((h[49].1 - 1.0).abs() < 1e-12);
    }
}
