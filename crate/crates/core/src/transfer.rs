//! Ulam discretization of the Frobenius–Perron operator, invariant densities,
//! mixing correlations and finite-time factorization residuals.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{MapSystem, Point};
use crate::error::{Error, Result};
use crate::measure::{shard_rng, symbol, uniform_point, DEFAULT_SHARDS};
use crate::phase_space::{CellId, CellSet, Partition};

/// How sample points are placed inside each cell when building an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UlamSampling {
    /// `samples_per_cell` uniform points; cell `i` draws from stream `i`.
    Random { samples_per_cell: usize, seed: u64 },
    /// The `per_axis × per_axis` corner lattice of each cell.
    Lattice { per_axis: usize },
}

/// Row-stochastic Ulam matrix, stored as sorted sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct UlamOperator {
    partition: Partition,
    samples_per_cell: usize,
    rows: Vec<Vec<(u32, f64)>>,
}

pub fn build_ulam(map: &MapSystem, partition: &Partition, samples_per_cell: usize, rng_seed: u64) -> Result<UlamOperator> {
    UlamOperator::build(map, partition, UlamSampling::Random { samples_per_cell, seed: rng_seed })
}

impl UlamOperator {
    pub fn build(map: &MapSystem, partition: &Partition, sampling: UlamSampling) -> Result<Self> {
        let samples_per_cell = match sampling {
            UlamSampling::Random { samples_per_cell, .. } => samples_per_cell,
            UlamSampling::Lattice { per_axis } => per_axis * per_axis,
        };
        if samples_per_cell < 100 {
            return Err(Error::InvalidArgument(format!("need at least 100 samples per cell, got {samples_per_cell}")));
        }
        let (dq, dp) = (partition.dq(), partition.dp());
        let rows = (0..partition.len())
            .into_par_iter()
            .map(|i| -> Result<Vec<(u32, f64)>> {
                let (q0, p0) = partition.cell_origin(CellId(i as u32));
                let mut hits: BTreeMap<u32, usize> = BTreeMap::new();
                let mut record = |x: Point| -> Result<()> {
                    *hits.entry(symbol(partition, map.step(x))?.0).or_insert(0) += 1;
                    Ok(())
                };
                match sampling {
                    UlamSampling::Random { seed, .. } => {
                        let mut rng = shard_rng(seed, i);
                        for _ in 0..samples_per_cell {
                            record(Point::new(q0 + rng.random::<f64>() * dq, p0 + rng.random::<f64>() * dp))?;
                        }
                    }
                    UlamSampling::Lattice { per_axis } => {
                        let s = per_axis as f64;
                        for a in 0..per_axis {
                            for b in 0..per_axis {
                                record(Point::new(q0 + a as f64 * dq / s, p0 + b as f64 * dp / s))?;
                            }
                        }
                    }
                }
                let total = samples_per_cell as f64;
                Ok(hits.into_iter().map(|(j, c)| (j, c as f64 / total)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UlamOperator { partition: partition.clone(), samples_per_cell, rows })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn samples_per_cell(&self) -> usize {
        self.samples_per_cell
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().find(|(c, _)| *c as usize == j).map_or(0.0, |(_, v)| *v)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|(_, v)| v).sum()).collect()
    }

    /// Push a density forward one step: `f'_j = Σ_i f_i P_ij`.
    pub fn apply(&self, density: &Density) -> Density {
        Density { weights: self.push(&density.weights) }
    }

    fn push(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for (fi, row) in f.iter().zip(&self.rows) {
            for &(j, v) in row {
                out[j as usize] += fi * v;
            }
        }
        out
    }

    /// Action on observables: `(P g)_i = Σ_j P_ij g_j`.
    pub fn pull(&self, g: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().map(|&(j, v)| v * g[j as usize]).sum()).collect()
    }

    /// `self · other` as sparse matrices.
    pub fn compose(&self, other: &UlamOperator) -> UlamOperator {
        let rows = self
            .rows
            .par_iter()
            .map(|row| {
                let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
                for &(k, a) in row {
                    for &(j, b) in &other.rows[k as usize] {
                        *acc.entry(j).or_insert(0.0) += a * b;
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        UlamOperator { partition: self.partition.clone(), samples_per_cell: self.samples_per_cell, rows }
    }

    pub fn power(&self, k: usize) -> UlamOperator {
        let identity = UlamOperator {
            partition: self.partition.clone(),
            samples_per_cell: self.samples_per_cell,
            rows: (0..self.dim()).map(|i| vec![(i as u32, 1.0)]).collect(),
        };
        (0..k).fold(identity, |acc, _| acc.compose(self))
    }

    /// `‖P f − f‖₁`.
    pub fn residual(&self, density: &Density) -> f64 {
        l1(&self.push(&density.weights), &density.weights)
    }

    /// Sparse triplets with header `row,col,value`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "row,col,value")?;
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                writeln!(w, "{i},{j},{v}")?;
            }
        }
        Ok(())
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Cell masses of a density against the reference measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Density {
    weights: Vec<f64>,
}

impl Density {
    pub fn uniform(m: usize) -> Self {
        Density { weights: vec![1.0 / m as f64; m] }
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Density { weights: weights.into_iter().map(|w| w / sum).collect() })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn l1_distance(&self, other: &Density) -> f64 {
        l1(&self.weights, &other.weights)
    }

    /// Distance to the uniform density.
    pub fn uniformity_error(&self) -> f64 {
        self.l1_distance(&Density::uniform(self.weights.len()))
    }

    pub fn measure(&self, set: &CellSet) -> f64 {
        set.indices().map(|i| self.weights[i]).sum()
    }
}

/// Power iteration on densities from the uniform start until the L1 change
/// falls below `tolerance`.
pub fn fixed_density(operator: &UlamOperator, tolerance: f64, max_iters: usize) -> Result<Density> {
    let mut f = Density::uniform(operator.dim()).weights;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        let mut next = operator.push(&f);
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        residual = l1(&next, &f);
        f = next;
        if residual < tolerance {
            return Ok(Density { weights: f });
        }
    }
    Err(Error::NonConvergence { iters: max_iters, residual })
}

/// Modulus of the second eigenvalue of the operator, by power iteration on
/// the complement of the fixed density.
pub fn second_eigenvalue_modulus(operator: &UlamOperator, fixed: &Density, iters: usize, rng_seed: u64) -> f64 {
    let m = operator.dim();
    let mut rng = shard_rng(rng_seed, 0);
    let deflate = |v: &mut Vec<f64>| {
        let s: f64 = v.iter().sum();
        v.iter_mut().zip(&fixed.weights).for_each(|(x, f)| *x -= s * f);
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v: Vec<f64> = (0..m).map(|_| rng.random::<f64>() - 0.5).collect();
    deflate(&mut v);
    let burn_in = iters / 2;
    let mut log_growth = 0.0;
    for k in 0..iters {
        let n0 = norm(&v);
        if n0 == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= n0);
        v = operator.push(&v);
        deflate(&mut v);
        if k >= burn_in {
            let n1 = norm(&v);
            if n1 == 0.0 {
                return 0.0;
            }
            log_growth += n1.ln();
        }
    }
    (log_growth / (iters - burn_in).max(1) as f64).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSeries {
    pub set_a: Vec<usize>,
    pub set_b: Vec<usize>,
    pub times: Vec<usize>,
    pub values: Vec<f64>,
    /// Binomial standard error of each estimate.
    pub std_err: Vec<f64>,
    pub n_samples: usize,
}

impl CorrelationSeries {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t,C")?;
        for (t, c) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t},{c}")?;
        }
        Ok(())
    }

    /// Largest `|C(t)|` over `t ≥ from`.
    pub fn max_abs_from(&self, from: usize) -> f64 {
        self.times.iter().zip(&self.values).filter(|(t, _)| **t >= from).map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }
}

fn check_sets(sets: &[&CellSet], partition: &Partition) -> Result<()> {
    for s in sets {
        if s.is_empty() {
            return Err(Error::InvalidArgument("cell sets must be nonempty".into()));
        }
        if s.len_partition() != partition.len() {
            return Err(Error::InvalidArgument("cell set built for a different partition".into()));
        }
    }
    Ok(())
}

/// Per-shard uniform samples folded by `visit`, which sees each start point.
fn sharded_counts<F>(partition: &Partition, n_samples: usize, rng_seed: u64, len: usize, visit: F) -> Result<Vec<u64>>
where
    F: Fn(Point, &mut [u64]) -> Result<()> + Sync,
{
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let shards = DEFAULT_SHARDS;
    let parts = (0..shards)
        .into_par_iter()
        .map(|s| -> Result<Vec<u64>> {
            let size = n_samples / shards + usize::from(s < n_samples % shards);
            let mut rng = shard_rng(rng_seed, s);
            let mut counts = vec![0u64; len];
            for _ in 0..size {
                visit(uniform_point(partition.region(), &mut rng), &mut counts)?;
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(vec![0u64; len], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    }))
}

/// `μ(T_tA ∩ B) − μ(A)μ(B)` for `t = 0..=t_max` from one sample set.
pub fn correlation_series(
    map: &MapSystem,
    partition: &Partition,
    set_a: &CellSet,
    set_b: &CellSet,
    t_max: usize,
    n_samples: usize,
    rng_seed: u64,
) -> Result<CorrelationSeries> {
    check_sets(&[set_a, set_b], partition)?;
    let counts = sharded_counts(partition, n_samples, rng_seed, t_max + 1, |mut x, counts| {
        if !set_a.contains(symbol(partition, x)?) {
            return Ok(());
        }
        for (t, c) in counts.iter_mut().enumerate() {
            if t > 0 {
                x = map.step(x);
            }
            if set_b.contains(symbol(partition, x)?) {
                *c += 1;
            }
        }
        Ok(())
    })?;
    let n = n_samples as f64;
    let product = set_a.measure() * set_b.measure();
    Ok(CorrelationSeries {
        set_a: set_a.indices().collect(),
        set_b: set_b.indices().collect(),
        times: (0..=t_max).collect(),
        values: counts.iter().map(|&c| c as f64 / n - product).collect(),
        std_err: counts.iter().map(|&c| binomial_se(c as f64 / n, n)).collect(),
        n_samples,
    })
}

fn binomial_se(p: f64, n: f64) -> f64 {
    (p * (1.0 - p) / n).sqrt()
}

/// Monte Carlo estimate of `μ(T_tA ∩ B) − μ(A)μ(B)`.
pub fn mixing_correlation(
    map: &MapSystem,
    partition: &Partition,
    set_a: &CellSet,
    set_b: &CellSet,
    t: usize,
    n_samples: usize,
    rng_seed: u64,
) -> Result<f64> {
    Ok(correlation_series(map, partition, set_a, set_b, t, n_samples, rng_seed)?.values[t])
}

/// The same correlation computed from the Ulam matrix under the uniform
/// reference measure: `Σ_{i∈A} (Pᵗ 1_B)_i / M − μ(A)μ(B)`.
pub fn ulam_correlation(operator: &UlamOperator, set_a: &CellSet, set_b: &CellSet, t: usize) -> f64 {
    let m = operator.dim();
    let mut g: Vec<f64> = (0..m).map(|j| if set_b.contains(CellId(j as u32)) { 1.0 } else { 0.0 }).collect();
    for _ in 0..t {
        g = operator.pull(&g);
    }
    set_a.indices().map(|i| g[i]).sum::<f64>() / m as f64 - set_a.measure() * set_b.measure()
}

fn product_indicator(map: &MapSystem, partition: &Partition, sets: &[CellSet], t_gap: usize, mut x: Point) -> Result<bool> {
    for (k, set) in sets.iter().enumerate() {
        if k > 0 {
            x = map.iterate(x, t_gap);
        }
        if !set.contains(symbol(partition, x)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_factor_sets(partition: &Partition, sets: &[CellSet]) -> Result<()> {
    if sets.len() < 2 {
        return Err(Error::InvalidArgument("factorization needs at least two sets".into()));
    }
    check_sets(&sets.iter().collect::<Vec<_>>(), partition)
}

/// `|μ(A1 ∩ T⁻ᵗA2 ∩ … ∩ T⁻⁽ᵏ⁻¹⁾ᵗAk) − Π μ(Ai)|` under the uniform density.
pub fn factorization_residual(
    map: &MapSystem,
    partition: &Partition,
    cell_sets: &[CellSet],
    t_gap: usize,
    n_samples: usize,
    rng_seed: u64,
) -> Result<f64> {
    check_factor_sets(partition, cell_sets)?;
    let hits = sharded_counts(partition, n_samples, rng_seed, 1, |x, c| {
        if product_indicator(map, partition, cell_sets, t_gap, x)? {
            c[0] += 1;
        }
        Ok(())
    })?[0];
    let product: f64 = cell_sets.iter().map(CellSet::measure).product();
    Ok((hits as f64 / n_samples as f64 - product).abs())
}

/// Factorization residual against a cell-averaged invariant density, with
/// start points drawn from it by rejection.
pub fn factorization_residual_with_density(
    map: &MapSystem,
    partition: &Partition,
    density: &Density,
    cell_sets: &[CellSet],
    t_gap: usize,
    n_samples: usize,
    rng_seed: u64,
) -> Result<f64> {
    check_factor_sets(partition, cell_sets)?;
    if density.weights.len() != partition.len() {
        return Err(Error::InvalidArgument("density and partition sizes differ".into()));
    }
    let peak = density.weights.iter().copied().fold(0.0, f64::max);
    let shards = DEFAULT_SHARDS;
    let hits: u64 = (0..shards)
        .into_par_iter()
        .map(|s| -> Result<u64> {
            let size = n_samples / shards + usize::from(s < n_samples % shards);
            let mut rng = shard_rng(rng_seed, s);
            let mut hits = 0;
            let mut accepted = 0;
            while accepted < size {
                let x = uniform_point(partition.region(), &mut rng);
                let w = density.weights[symbol(partition, x)?.index()];
                if rng.random::<f64>() * peak >= w {
                    continue;
                }
                accepted += 1;
                if product_indicator(map, partition, cell_sets, t_gap, x)? {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let product: f64 = cell_sets.iter().map(|s| density.measure(s)).product();
    Ok((hits as f64 / n_samples as f64 - product).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(p: f64, n: usize) -> f64 {
        (p * (1.0 - p) / n as f64).sqrt()
    }

    #[test]
    fn identity_operator() {
        let grid = Partition::unit(3, 3).unwrap();
        let op = build_ulam(&MapSystem::rotation(0.0), &grid, 100, 1).unwrap();
        for i in 0..9 {
            assert_eq!(op.row(i), &[(i as u32, 1.0)]);
        }
        let f = fixed_density(&op, 1e-12, 10).unwrap();
        assert!(f.uniformity_error() < 1e-15);
    }

    #[test]
    fn doubling_two_cells() {
        let halves = Partition::unit(2, 1).unwrap();
        let n = 100_000;
        let op = build_ulam(&MapSystem::doubling(), &halves, n, 4).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((op.entry(i, j) - 0.5).abs() < 3.0 * sigma(0.5, n));
            }
        }
        let f = fixed_density(&op, 1e-12, 1000).unwrap();
        assert!((f.weights()[0] - 0.5).abs() < 1e-2);
    }

    #[test]
    fn baker_rows_split_in_two() {
        let grid = Partition::unit(2, 2).unwrap();
        let op = build_ulam(&MapSystem::baker(), &grid, 100_000, 2).unwrap();
        for i in 0..4 {
            assert_eq!(op.row(i).len(), 2);
            for &(_, v) in op.row(i) {
                assert!((v - 0.5).abs() < 0.01);
            }
        }
    }

    #[test]
    fn row_stochastic_under_powers() {
        let grid = Partition::unit(4, 4).unwrap();
        let op = build_ulam(&MapSystem::standard(0.9), &grid, 500, 8).unwrap();
        for k in [1, 2, 8] {
            for s in op.power(k).row_sums() {
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lattice_cat_operator_is_doubly_stochastic() {
        let grid = Partition::unit(8, 8).unwrap();
        let op = UlamOperator::build(&MapSystem::cat(), &grid, UlamSampling::Lattice { per_axis: 16 }).unwrap();
        let f = fixed_density(&op, 1e-10, 100).unwrap();
        assert!(f.uniformity_error() < 1e-12);
        assert!(op.residual(&f) < 2e-10);
    }

    #[test]
    fn too_few_samples_rejected() {
        let grid = Partition::unit(2, 2).unwrap();
        assert!(build_ulam(&MapSystem::cat(), &grid, 99, 1).is_err());
    }

    #[test]
    fn non_convergence_reports_residual() {
        // rotation by a quarter permutes columns cyclically, so a non-uniform
        // start never settles; the uniform start is already fixed.
        let grid = Partition::unit(4, 1).unwrap();
        let op = UlamOperator::build(&MapSystem::rotation(0.25), &grid, UlamSampling::Lattice { per_axis: 10 }).unwrap();
        assert!(fixed_density(&op, 1e-12, 5).is_ok());
        let err = fixed_density(&op, 1e-12, 0).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iters: 0, .. }));
    }

    #[test]
    fn spectral_gap_orders_maps() {
        let grid = Partition::unit(8, 8).unwrap();
        let lattice = UlamSampling::Lattice { per_axis: 16 };
        let cat = UlamOperator::build(&MapSystem::cat(), &grid, lattice).unwrap();
        let rot = UlamOperator::build(&MapSystem::rotation(0.125), &grid, lattice).unwrap();
        let u = Density::uniform(64);
        let l_cat = second_eigenvalue_modulus(&cat, &u, 200, 1);
        let l_rot = second_eigenvalue_modulus(&rot, &u, 200, 1);
        assert!(l_cat < 0.9, "{l_cat}");
        assert!((l_rot - 1.0).abs() < 1e-9, "{l_rot}");
    }

    #[test]
    fn correlation_examples() {
        let grid = Partition::unit(8, 8).unwrap();
        let left = CellSet::left_half(&grid);
        let bottom = CellSet::bottom_half(&grid);
        let c0 = mixing_correlation(&MapSystem::cat(), &grid, &left, &left, 0, 10_000, 1).unwrap();
        assert!((c0 - 0.25).abs() < 3.0 * sigma(0.5, 10_000));

        let n = 400_000;
        let c = mixing_correlation(&MapSystem::baker(), &grid, &left, &bottom, 10, n, 3).unwrap();
        assert!(c.abs() < 3.0 * sigma(0.25, n));

        let s = correlation_series(&MapSystem::rotation(0.618_033_988_75), &grid, &left, &left, 50, 50_000, 5).unwrap();
        assert!(s.max_abs_from(1) > 0.05);

        let single = correlation_series(&MapSystem::cat(), &grid, &left, &bottom, 0, 5_000, 9).unwrap();
        assert_eq!(single.values.len(), 1);
        assert_eq!(single.values[0], mixing_correlation(&MapSystem::cat(), &grid, &left, &bottom, 0, 5_000, 9).unwrap());
    }

    #[test]
    fn ulam_correlation_matches_monte_carlo() {
        let grid = Partition::unit(8, 8).unwrap();
        let map = MapSystem::baker();
        let left = CellSet::left_half(&grid);
        let bottom = CellSet::bottom_half(&grid);
        let op = build_ulam(&map, &grid, 20_000, 6).unwrap();
        let n = 200_000;
        let mc = correlation_series(&map, &grid, &left, &bottom, 10, n, 6).unwrap();
        for t in 0..=10 {
            let u = ulam_correlation(&op, &left, &bottom, t);
            let tol = 3.0 * (mc.std_err[t] + sigma(0.5, 20_000 * 32));
            assert!((u - mc.values[t]).abs() < tol, "t={t} ulam={u} mc={}", mc.values[t]);
        }
    }

    #[test]
    fn factorization_examples() {
        let grid = Partition::unit(8, 8).unwrap();
        let left = CellSet::left_half(&grid);
        let bottom = CellSet::bottom_half(&grid);
        let r0 = factorization_residual(&MapSystem::baker(), &grid, &[left.clone(), left.clone()], 0, 20_000, 1).unwrap();
        assert!((r0 - 0.25).abs() < 3.0 * sigma(0.5, 20_000));

        let sets = [bottom.clone(), left.clone(), bottom.clone()];
        let r = factorization_residual(&MapSystem::baker(), &grid, &sets, 10, 200_000, 2).unwrap();
        assert!(r < 0.01);
        let rot = factorization_residual(&MapSystem::rotation(0.618_033_988_75), &grid, &sets, 10, 200_000, 2).unwrap();
        assert!(rot > 0.05);

        assert!(factorization_residual(&MapSystem::baker(), &grid, &[left], 1, 10, 1).is_err());
    }

    #[test]
    fn density_weighted_factorization_agrees_with_uniform() {
        let grid = Partition::unit(4, 4).unwrap();
        let sets = [CellSet::left_half(&grid), CellSet::bottom_half(&grid)];
        let u = Density::uniform(16);
        let r = factorization_residual_with_density(&MapSystem::baker(), &grid, &u, &sets, 8, 100_000, 3).unwrap();
        assert!(r < 0.01);
        let bad = Density::from_weights(vec![0.5, 0.5]).unwrap();
        assert!(factorization_residual_with_density(&MapSystem::baker(), &grid, &bad, &sets, 8, 10, 3).is_err());
    }

    #[test]
    fn csv_layouts() {
        let grid = Partition::unit(2, 1).unwrap();
        let op = UlamOperator::build(&MapSystem::doubling(), &grid, UlamSampling::Lattice { per_axis: 10 }).unwrap();
        let mut buf = Vec::new();
        op.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("row,col,value"));
        assert_eq!(text.lines().nth(1), Some("0,0,0.5"));
    }
}
