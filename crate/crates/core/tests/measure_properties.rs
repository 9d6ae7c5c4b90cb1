use grainy::dynamics::MapSystem;
use grainy::measure::sample_joint;
use grainy::phase_space::{CellId, Partition};

fn sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn baker_two_by_two_transitions() {
    // the next row of a baker orbit is its current column, so only 8 of the
    // 16 depth-1 itineraries carry mass, each 1/8
    let grid = Partition::unit(2, 2).unwrap();
    let n = 1_000_000;
    let dist = sample_joint(&MapSystem::baker(), &grid, 1, 1, n, 11).unwrap();
    assert_eq!(dist.distinct(), 8);
    for (symbols, count) in dist.entries() {
        let (_, col) = grid.row_col(symbols[0]);
        let (next_row, _) = grid.row_col(symbols[1]);
        assert_eq!(next_row, col);
        assert!((count as f64 / n as f64 - 0.125).abs() < 4.0 * sigma(0.125, n));
    }
}

#[test]
fn doubling_matches_dyadic_oracle() {
    // every depth-3 itinerary of the doubling map is one dyadic interval of
    // length 1/16
    let halves = Partition::unit(2, 1).unwrap();
    let n = 1_000_000;
    let dist = sample_joint(&MapSystem::doubling(), &halves, 3, 1, n, 12).unwrap();
    assert_eq!(dist.distinct(), 16);
    for k in 0..16u32 {
        let symbols: Vec<CellId> = (0..4).map(|j| CellId((k >> (3 - j)) & 1)).collect();
        let freq = dist.count(&symbols) as f64 / n as f64;
        assert!((freq - 1.0 / 16.0).abs() < 4.0 * sigma(1.0 / 16.0, n), "{k}: {freq}");
    }
}

#[test]
fn lag_marginals_are_uniform() {
    let grid = Partition::unit(4, 4).unwrap();
    let n = 400_000;
    for map in [MapSystem::cat(), MapSystem::baker(), MapSystem::standard(2.0)] {
        let dist = sample_joint(&map, &grid, 3, 1, n, 13).unwrap();
        for lag in 0..=3 {
            for m in dist.marginal(lag).unwrap() {
                assert!((m - 1.0 / 16.0).abs() < 4.0 * sigma(1.0 / 16.0, n), "{map} lag {lag}: {m}");
            }
        }
        assert!(dist.marginal(4).is_err());
    }
}

#[test]
fn distinct_count_bounded() {
    for (cells, n, samples) in [(2usize, 6usize, 5_000usize), (9, 2, 200_000), (16, 3, 1_000)] {
        let grid = Partition::unit(cells, 1.max(cells / 2)).unwrap();
        let dist = sample_joint(&MapSystem::cat(), &grid, n, 1, samples, 14).unwrap();
        let cap = (grid.len() as f64).powi(n as i32 + 1).min(samples as f64);
        assert!(dist.distinct() as f64 <= cap);
        assert_eq!(dist.counts().sum::<u64>(), samples as u64);
    }
}

#[test]
fn standard_error_shrinks_with_sample_size() {
    let grid = Partition::unit(2, 2).unwrap();
    let rms = |n: usize| {
        let errs: Vec<f64> = (0..16)
            .map(|s| {
                let d = sample_joint(&MapSystem::cat(), &grid, 0, 1, n, 100 + s).unwrap();
                d.count(&[CellId(0)]) as f64 / n as f64 - 0.25
            })
            .collect();
        (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt()
    };
    let ratio = rms(10_000) / rms(40_000);
    assert!(ratio > 1.3 && ratio < 3.2, "quadrupling samples changed rms error by {ratio}");
}

#[test]
fn long_itineraries_fall_back_to_byte_keys() {
    let grid = Partition::unit(32, 32).unwrap();
    let dist = sample_joint(&MapSystem::rotation(0.0), &grid, 20, 1, 2_000, 15).unwrap();
    assert!(dist.distinct() <= 1024);
    for (symbols, _) in dist.entries() {
        assert_eq!(symbols.len(), 21);
        assert!(symbols.iter().all(|&s| s == symbols[0]));
    }
}
