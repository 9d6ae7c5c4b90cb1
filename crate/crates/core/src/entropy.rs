//! Partition entropy, refined-partition entropy series and KS-entropy estimates.
//!
//! Entropies are in nats. A series records `H[n]`, the entropy of the
//! partition generated by the itineraries `A_{i0} ∩ T_τ⁻¹A_{i1} ∩ … ∩ T_τ⁻ⁿA_{in}`,
//! together with the linear-growth cap `(n+1)·log M`.

use std::io::Write;

use serde::Serialize;

use crate::dynamics::MapSystem;
use crate::error::{Error, Result};
use crate::measure::{refinement_stats, sample_stratified, sample_uniform, DepthStats, DEFAULT_SHARDS};
use crate::phase_space::Partition;

/// Entropy rates below this are reported as non-chaotic.
pub const NON_CHAOTIC_RATE: f64 = 0.02;

/// Default fraction of the sample count above which a depth is flagged as
/// sample-exhausted.
pub const DEFAULT_EXHAUSTION_FRACTION: f64 = 0.1;

/// `−Σ wᵢ log wᵢ` with `0·log 0 = 0`.
pub fn partition_entropy(weights: &[f64]) -> Result<f64> {
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::NotNormalized { sum });
    }
    Ok(weights.iter().filter(|&&w| w > 0.0).map(|&w| -w * w.ln()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOptions {
    pub miller_madow: bool,
    pub exhaustion_fraction: f64,
    pub shards: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions { miller_madow: false, exhaustion_fraction: DEFAULT_EXHAUSTION_FRACTION, shards: DEFAULT_SHARDS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropySeries {
    pub stride: usize,
    pub cells: usize,
    pub total_samples: usize,
    pub h: Vec<f64>,
    pub bound: Vec<f64>,
    pub distinct: Vec<usize>,
    pub std_err: Vec<f64>,
    /// Depths where the distinct-itinerary count exceeds the exhaustion fraction.
    pub exhausted: Vec<bool>,
    pub miller_madow: bool,
}

impl EntropySeries {
    /// A series from known values, with no sampling error.
    pub fn from_values(h: Vec<f64>, stride: usize, cells: usize) -> Self {
        let n = h.len();
        EntropySeries {
            stride,
            cells,
            total_samples: 0,
            bound: cap_line(n, cells),
            distinct: vec![0; n],
            std_err: vec![0.0; n],
            exhausted: vec![false; n],
            h,
            miller_madow: false,
        }
    }

    fn from_stats(stats: Vec<DepthStats>, stride: usize, cells: usize, samples: usize, opts: &EntropyOptions) -> Self {
        let n = stats.len();
        let limit = opts.exhaustion_fraction * samples as f64;
        let h = stats
            .iter()
            .map(|s| {
                if opts.miller_madow {
                    s.entropy + (s.distinct as f64 - 1.0) / (2.0 * samples as f64)
                } else {
                    s.entropy
                }
            })
            .collect();
        EntropySeries {
            stride,
            cells,
            total_samples: samples,
            h,
            bound: cap_line(n, cells),
            distinct: stats.iter().map(|s| s.distinct).collect(),
            std_err: stats.iter().map(|s| s.std_err).collect(),
            exhausted: stats.iter().map(|s| s.distinct as f64 > limit).collect(),
            miller_madow: opts.miller_madow,
        }
    }

    pub fn n_max(&self) -> usize {
        self.h.len().saturating_sub(1)
    }

    /// `H[n] − H[n−1]`, with `H[−1] = 0`.
    pub fn increments(&self) -> Vec<f64> {
        (0..self.h.len()).map(|n| if n == 0 { self.h[0] } else { self.h[n] - self.h[n - 1] }).collect()
    }

    /// Largest per-depth standard error.
    pub fn mc_error(&self) -> f64 {
        self.std_err.iter().copied().fold(0.0, f64::max)
    }

    /// Last depth before the first exhausted one, if any depth is clean.
    pub fn last_clean_depth(&self) -> Option<usize> {
        match self.exhausted.iter().position(|&e| e) {
            Some(0) => None,
            Some(k) => Some(k - 1),
            None => Some(self.n_max()),
        }
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "n,H,bound,increment")?;
        for (n, inc) in self.increments().iter().enumerate() {
            writeln!(w, "{n},{},{},{inc}", self.h[n], self.bound[n])?;
        }
        Ok(())
    }

    /// Whitespace-separated `n H` columns for plotting tools.
    pub fn write_plot(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# n H")?;
        for (n, h) in self.h.iter().enumerate() {
            writeln!(w, "{n} {h}")?;
        }
        Ok(())
    }
}

fn cap_line(n: usize, cells: usize) -> Vec<f64> {
    let log_m = (cells as f64).ln();
    (0..n).map(|k| (k + 1) as f64 * log_m).collect()
}

fn check_series_args(n_max: usize, stride: usize) -> Result<()> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    Ok(())
}

/// `H[n]` for `n = 0..=n_max` from one set of uniform samples.
pub fn entropy_series(
    map: &MapSystem,
    partition: &Partition,
    n_max: usize,
    stride: usize,
    n_samples: usize,
    rng_seed: u64,
) -> Result<EntropySeries> {
    entropy_series_with(map, partition, n_max, stride, n_samples, rng_seed, &EntropyOptions::default())
}

pub fn entropy_series_with(
    map: &MapSystem,
    partition: &Partition,
    n_max: usize,
    stride: usize,
    n_samples: usize,
    rng_seed: u64,
    opts: &EntropyOptions,
) -> Result<EntropySeries> {
    check_series_args(n_max, stride)?;
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let points = sample_uniform(partition.region(), n_samples, rng_seed, opts.shards);
    let stats = refinement_stats(map, partition, points, n_max, stride)?;
    Ok(EntropySeries::from_stats(stats, stride, partition.len(), n_samples, opts))
}

/// Entropy series of a coarse partition seeded with exactly one point per
/// cell of a fine grid.
///
/// With `M` fine cells the series cannot exceed `log M`, so it saturates once
/// the coarse itineraries have resolved the grain.
pub fn grained_entropy_series(
    map: &MapSystem,
    coarse: &Partition,
    grains: &Partition,
    n_max: usize,
    stride: usize,
    rng_seed: u64,
) -> Result<EntropySeries> {
    check_series_args(n_max, stride)?;
    let points = sample_stratified(grains, rng_seed);
    let stats = refinement_stats(map, coarse, points, n_max, stride)?;
    Ok(EntropySeries::from_stats(stats, stride, coarse.len(), grains.len(), &EntropyOptions::default()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KsMethod {
    SlopeFit,
    IncrementAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitWindow {
    /// The last three depths before sample exhaustion.
    Auto,
    Range(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsEstimate {
    pub h_ks_tau: f64,
    pub h_ks: f64,
    pub std_err: f64,
    pub stride: usize,
    pub method: KsMethod,
    pub fit_window: [usize; 2],
    /// Set when an exhausted depth falls inside the window.
    pub warning: Option<String>,
}

pub fn resolve_window(series: &EntropySeries, window: FitWindow) -> Result<(usize, usize)> {
    let (lo, hi) = match window {
        FitWindow::Auto => {
            let hi = series.last_clean_depth().ok_or(Error::WindowTooShort { lo: 0, hi: 0 })?;
            (hi.saturating_sub(2), hi)
        }
        FitWindow::Range(lo, hi) => (lo, hi),
    };
    if hi > series.n_max() {
        return Err(Error::InvalidArgument(format!("fit window ends at {hi} beyond depth {}", series.n_max())));
    }
    if hi < lo + 2 {
        return Err(Error::WindowTooShort { lo, hi });
    }
    Ok((lo, hi))
}

/// Entropy rate from the series over a fit window, divided by the stride.
pub fn ks_estimate(series: &EntropySeries, method: KsMethod, fit_window: FitWindow) -> Result<KsEstimate> {
    let (lo, hi) = resolve_window(series, fit_window)?;
    let h = &series.h;
    let se = &series.std_err;
    let (rate, err) = match method {
        KsMethod::IncrementAverage => {
            let span = (hi - lo) as f64;
            ((h[hi] - h[lo]) / span, (se[hi].powi(2) + se[lo].powi(2)).sqrt() / span)
        }
        KsMethod::SlopeFit => {
            let xs: Vec<f64> = (lo..=hi).map(|n| n as f64).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let sxx: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
            let w: Vec<f64> = xs.iter().map(|x| (x - mean) / sxx).collect();
            let slope = (lo..=hi).zip(&w).map(|(n, wi)| wi * h[n]).sum();
            let var: f64 = (lo..=hi).zip(&w).map(|(n, wi)| (wi * se[n]).powi(2)).sum();
            (slope, var.sqrt())
        }
    };
    let tau = series.stride as f64;
    let warning = series.exhausted[lo..=hi]
        .iter()
        .any(|&e| e)
        .then(|| format!("sample exhaustion inside fit window [{lo}, {hi}]; estimate biased low"));
    Ok(KsEstimate {
        h_ks_tau: rate,
        h_ks: rate / tau,
        std_err: err / tau,
        stride: series.stride,
        method,
        fit_window: [lo, hi],
        warning,
    })
}

/// Smallest `n` with `H[n+1] − H[n] ≤ threshold_fraction · rate`.
///
/// `reference_rate` is a per-`T_τ`-step entropy rate. When absent, the
/// increment-average estimate over the automatic window is used.
pub fn saturation_depth(series: &EntropySeries, threshold_fraction: f64, reference_rate: Option<f64>) -> Result<usize> {
    let rate = match reference_rate {
        Some(r) => r,
        None => ks_estimate(series, KsMethod::IncrementAverage, FitWindow::Auto)?.h_ks_tau,
    };
    let threshold = threshold_fraction * rate;
    series.h.windows(2).position(|w| w[1] - w[0] <= threshold).ok_or(Error::NoSaturation)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub h_ks: f64,
    pub std_err: f64,
    pub q_param: f64,
    pub stride: usize,
    pub bound_value: f64,
    pub satisfied: bool,
    pub slack: f64,
    /// `log q / h_ks`; absent for non-chaotic runs.
    pub log_timescale: Option<f64>,
    pub chaotic: bool,
}

impl BoundReport {
    pub fn evaluate(h_ks: f64, std_err: f64, partition: &Partition, stride: usize) -> Self {
        let q = partition.quasiclassical_parameter();
        let bound_value = q.ln() / stride as f64;
        let chaotic = h_ks >= NON_CHAOTIC_RATE;
        BoundReport {
            h_ks,
            std_err,
            q_param: q,
            stride,
            bound_value,
            satisfied: h_ks <= bound_value + 3.0 * std_err,
            slack: bound_value - h_ks,
            log_timescale: chaotic.then(|| q.ln() / h_ks),
            chaotic,
        }
    }

    /// One-line summary, e.g. `h_KS=0.692 bound=6.93 satisfied=true tau_log=10.0`.
    pub fn summary(&self) -> String {
        let tau = match self.log_timescale {
            Some(t) => format!("{t:.1}"),
            None => "inf (non-chaotic)".to_string(),
        };
        format!("h_KS={:.3} bound={:.3} satisfied={} tau_log={tau}", self.h_ks, self.bound_value, self.satisfied)
    }
}

/// Graininess bound check for an estimate on `partition`.
pub fn bound_report(estimate: &KsEstimate, partition: &Partition) -> BoundReport {
    BoundReport::evaluate(estimate.h_ks, estimate.std_err, partition, estimate.stride)
}
