//! Monte Carlo measures of itinerary sets.
//!
//! The measure of `A_{i0} ∩ T⁻¹A_{i1} ∩ … ∩ T⁻ⁿA_{in}` equals the probability
//! that a point drawn from normalized Lebesgue measure on the region visits
//! `A_{i0}, A_{i1}, …` along its forward orbit. Points are drawn in shards:
//! shard `s` owns a ChaCha8 generator seeded with the run seed and switched to
//! stream `s`, so a `(seed, shards)` pair always reproduces the same samples no
//! matter how many threads run them.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{MapSystem, Point};
use crate::error::{Error, Result};
use crate::phase_space::{CellId, Partition, Region};

/// Shard count used when none is given.
pub const DEFAULT_SHARDS: usize = 16;

/// The generator for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

fn shard_sizes(total: usize, shards: usize) -> Vec<usize> {
    let shards = shards.max(1);
    (0..shards).map(|s| total / shards + usize::from(s < total % shards)).collect()
}

/// Uniform samples on `region`, concatenated in shard order.
pub fn sample_uniform(region: &Region, n_samples: usize, seed: u64, shards: usize) -> Vec<Point> {
    shard_sizes(n_samples, shards)
        .into_par_iter()
        .enumerate()
        .flat_map_iter(|(s, size)| {
            let mut rng = shard_rng(seed, s);
            let region = *region;
            (0..size).map(move |_| uniform_point(&region, &mut rng))
        })
        .collect()
}

#[inline]
pub(crate) fn uniform_point(region: &Region, rng: &mut impl Rng) -> Point {
    Point::new(
        region.q_min() + rng.random::<f64>() * region.width(),
        region.p_min() + rng.random::<f64>() * region.height(),
    )
}

/// One point drawn uniformly inside each cell of `partition`, in cell order.
pub fn sample_stratified(partition: &Partition, seed: u64) -> Vec<Point> {
    let mut rng = shard_rng(seed, 0);
    (0..partition.len())
        .map(|i| {
            let (q0, p0) = partition.cell_origin(CellId(i as u32));
            Point::new(q0 + rng.random::<f64>() * partition.dq(), p0 + rng.random::<f64>() * partition.dp())
        })
        .collect()
}

/// Symbol of `x` in `partition`, failing if the orbit has left the region.
#[inline]
pub(crate) fn symbol(partition: &Partition, x: Point) -> Result<CellId> {
    if partition.region().contains(x.q, x.p) {
        Ok(partition.cell_index_unchecked(x.q, x.p))
    } else {
        Err(Error::OrbitEscape { q: x.q, p: x.p })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Itinerary {
    pub symbols: Vec<CellId>,
    pub stride: usize,
}

impl Itinerary {
    /// Dash-joined cell indices, e.g. `3-0-2`.
    pub fn label(&self) -> String {
        join_symbols(self.symbols.iter().map(|c| c.0))
    }
}

fn join_symbols(symbols: impl Iterator<Item = u32>) -> String {
    symbols.map(|s| s.to_string()).collect::<Vec<_>>().join("-")
}

/// `symbols[j] = cell_index(T^{j·stride} x)` for `j = 0..=n`.
pub fn itinerary_of(map: &MapSystem, partition: &Partition, x: Point, n: usize, stride: usize) -> Result<Itinerary> {
    partition.cell_index(x.q, x.p)?;
    let orbit = map.orbit(x, n, stride)?;
    let symbols = orbit.into_iter().map(|y| symbol(partition, y)).collect::<Result<_>>()?;
    Ok(Itinerary { symbols, stride })
}

/// Packed itinerary: `bits` per symbol in a `u128` when it fits, otherwise the
/// symbols as little-endian byte groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ItineraryKey {
    Packed(u128),
    Bytes(Box<[u8]>),
}

impl ItineraryKey {
    pub fn encode(symbols: &[CellId], bits: u32) -> Self {
        if symbols.len() as u64 * bits as u64 <= 128 {
            let mut key = 0u128;
            for (j, s) in symbols.iter().enumerate() {
                key |= (s.0 as u128) << (j as u32 * bits);
            }
            ItineraryKey::Packed(key)
        } else {
            let width = bits.div_ceil(8) as usize;
            let mut bytes = Vec::with_capacity(symbols.len() * width);
            for s in symbols {
                bytes.extend_from_slice(&s.0.to_le_bytes()[..width]);
            }
            ItineraryKey::Bytes(bytes.into_boxed_slice())
        }
    }

    pub fn decode(&self, len: usize, bits: u32) -> Vec<CellId> {
        match self {
            ItineraryKey::Packed(key) => {
                let mask = if bits >= 32 { u32::MAX as u128 } else { (1u128 << bits) - 1 };
                (0..len).map(|j| CellId(((key >> (j as u32 * bits)) & mask) as u32)).collect()
            }
            ItineraryKey::Bytes(bytes) => {
                let width = bits.div_ceil(8) as usize;
                bytes
                    .chunks(width)
                    .map(|c| {
                        let mut buf = [0u8; 4];
                        buf[..width].copy_from_slice(c);
                        CellId(u32::from_le_bytes(buf))
                    })
                    .collect()
            }
        }
    }
}

/// Empirical distribution of depth-`n` itineraries.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    depth: usize,
    stride: usize,
    counts: HashMap<ItineraryKey, u64>,
    total_samples: u64,
    partition: Partition,
}

#[derive(Debug, Clone, Serialize)]
pub struct JointSidecar<'a> {
    pub depth: usize,
    pub stride: usize,
    pub total_samples: u64,
    pub partition: &'a Partition,
    pub distinct_itineraries: usize,
}

impl JointDistribution {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn total_samples(&self) -> u64 {
        self.total_samples
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Count for a specific itinerary (zero when never observed).
    pub fn count(&self, symbols: &[CellId]) -> u64 {
        let key = ItineraryKey::encode(symbols, self.partition.bits_per_symbol());
        self.counts.get(&key).copied().unwrap_or(0)
    }

    /// `(itinerary, count)` pairs sorted lexicographically by symbol sequence.
    pub fn entries(&self) -> Vec<(Vec<CellId>, u64)> {
        let bits = self.partition.bits_per_symbol();
        let mut out: Vec<_> = self.counts.iter().map(|(k, &c)| (k.decode(self.depth + 1, bits), c)).collect();
        out.sort_unstable();
        out
    }

    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.values().copied()
    }

    /// Frequencies `count / total`; they sum to one up to rounding.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total_samples as f64;
        self.counts.values().map(|&c| c as f64 / n).collect()
    }

    /// Distribution of the symbol at `lag`, as cell frequencies.
    pub fn marginal(&self, lag: usize) -> Result<Vec<f64>> {
        if lag > self.depth {
            return Err(Error::InvalidArgument(format!("lag {lag} exceeds depth {}", self.depth)));
        }
        let mut out = vec![0.0; self.partition.len()];
        let bits = self.partition.bits_per_symbol();
        for (k, &c) in &self.counts {
            out[k.decode(self.depth + 1, bits)[lag].index()] += c as f64;
        }
        let n = self.total_samples as f64;
        out.iter_mut().for_each(|v| *v /= n);
        Ok(out)
    }

    /// Measure of the set of points whose lag-0 cell satisfies `pred`.
    pub fn measure_of_cellset(&self, pred: impl Fn(CellId) -> bool) -> f64 {
        let bits = self.partition.bits_per_symbol();
        let hits: u64 = self
            .counts
            .iter()
            .filter(|(k, _)| pred(k.decode(1, bits)[0]))
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.total_samples as f64
    }

    fn merge(mut self, other: JointDistribution) -> JointDistribution {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total_samples += other.total_samples;
        self
    }

    /// CSV with header `itinerary,count`, rows sorted by itinerary.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "itinerary,count")?;
        for (symbols, count) in self.entries() {
            writeln!(w, "{},{count}", join_symbols(symbols.iter().map(|c| c.0)))?;
        }
        Ok(())
    }

    pub fn sidecar(&self) -> JointSidecar<'_> {
        JointSidecar {
            depth: self.depth,
            stride: self.stride,
            total_samples: self.total_samples,
            partition: &self.partition,
            distinct_itineraries: self.distinct(),
        }
    }
}

/// Free-function form of [`JointDistribution::measure_of_cellset`].
pub fn measure_of_cellset(distribution: &JointDistribution, pred: impl Fn(CellId) -> bool) -> f64 {
    distribution.measure_of_cellset(pred)
}

/// Itinerary histogram of `n_samples` uniform points, sharded over
/// [`DEFAULT_SHARDS`] generators.
pub fn sample_joint(
    map: &MapSystem,
    partition: &Partition,
    n: usize,
    stride: usize,
    n_samples: usize,
    rng_seed: u64,
) -> Result<JointDistribution> {
    sample_joint_sharded(map, partition, n, stride, n_samples, rng_seed, DEFAULT_SHARDS)
}

pub fn sample_joint_sharded(
    map: &MapSystem,
    partition: &Partition,
    n: usize,
    stride: usize,
    n_samples: usize,
    rng_seed: u64,
    shards: usize,
) -> Result<JointDistribution> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    let bits = partition.bits_per_symbol();
    let empty = || JointDistribution {
        depth: n,
        stride,
        counts: HashMap::new(),
        total_samples: 0,
        partition: partition.clone(),
    };
    let parts = shard_sizes(n_samples, shards)
        .into_par_iter()
        .enumerate()
        .map(|(s, size)| -> Result<JointDistribution> {
            let mut rng = shard_rng(rng_seed, s);
            let mut dist = empty();
            let mut symbols = Vec::with_capacity(n + 1);
            for _ in 0..size {
                let mut x = uniform_point(partition.region(), &mut rng);
                symbols.clear();
                symbols.push(symbol(partition, x)?);
                for _ in 0..n {
                    x = map.iterate(x, stride);
                    symbols.push(symbol(partition, x)?);
                }
                *dist.counts.entry(ItineraryKey::encode(&symbols, bits)).or_insert(0) += 1;
            }
            dist.total_samples = size as u64;
            Ok(dist)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(empty(), JointDistribution::merge))
}

/// Per-depth statistics of the refined partition over one fixed sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthStats {
    pub depth: usize,
    pub distinct: usize,
    /// Naive plug-in entropy in nats.
    pub entropy: f64,
    /// Standard error of the plug-in entropy, `sqrt((Σ p ln²p − H²) / N)`.
    pub std_err: f64,
}

/// Statistics of `∨_{j=0}^{n} T_τ^{-j} Q` for every `n` in `0..=n_max`.
///
/// All depths share the same starting points. Refined cells are tracked as
/// integer class labels: at each depth the pair (previous label, new symbol)
/// is sorted and relabelled, which identifies itineraries exactly without
/// materializing them.
pub fn refinement_stats(
    map: &MapSystem,
    partition: &Partition,
    points: Vec<Point>,
    n_max: usize,
    stride: usize,
) -> Result<Vec<DepthStats>> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    if points.len() > u32::MAX as usize {
        return Err(Error::InvalidArgument("too many samples for 32-bit class labels".into()));
    }
    let n = points.len();
    let mut points = points;
    let mut labels = vec![0u32; n];
    let mut keyed: Vec<(u64, u32)> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n_max + 1);
    for depth in 0..=n_max {
        if depth > 0 {
            points.par_iter_mut().for_each(|x| *x = map.iterate(*x, stride));
        }
        keyed.clear();
        keyed.par_extend(points.par_iter().zip(labels.par_iter()).enumerate().map(|(i, (x, &l))| {
            let s = match symbol(partition, *x) {
                Ok(c) => c.0,
                Err(_) => u32::MAX,
            };
            (((l as u64) << 32) | s as u64, i as u32)
        }));
        if let Some(bad) = keyed.par_iter().find_first(|(k, _)| (*k as u32) == u32::MAX) {
            let x = points[bad.1 as usize];
            return Err(Error::OrbitEscape { q: x.q, p: x.p });
        }
        keyed.par_sort_unstable();

        let mut class = 0u32;
        let mut run = 0u64;
        let mut sum_plogp = 0.0;
        let mut sum_plog2p = 0.0;
        let total = n as f64;
        let mut flush = |run: u64| {
            let p = run as f64 / total;
            let lp = p.ln();
            sum_plogp += p * lp;
            sum_plog2p += p * lp * lp;
        };
        for i in 0..n {
            if i > 0 && keyed[i].0 != keyed[i - 1].0 {
                flush(run);
                run = 0;
                class += 1;
            }
            run += 1;
            labels[keyed[i].1 as usize] = class;
        }
        flush(run);
        let entropy = -sum_plogp;
        let var = (sum_plog2p - entropy * entropy).max(0.0) / total;
        out.push(DepthStats { depth, distinct: class as usize + 1, entropy, std_err: var.sqrt() });
    }
    Ok(out)
}
