//! Bounded phase-space regions and their grained partitions.
//!
//! A [`Region`] is an axis-aligned rectangle Ω = [q_min, q_max) × [p_min, p_max).
//! A [`Partition`] cuts it into `cells_q × cells_p` congruent half-open cells of
//! area `h_cell`, so that `M · h_cell = μ(Ω)` holds by construction. The ratio
//! `μ(Ω) / h_cell` is the quasiclassical parameter `q`, which equals `M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
}

impl Region {
    pub fn new(q_min: f64, q_max: f64, p_min: f64, p_max: f64) -> Result<Self> {
        check_axis("q", q_min, q_max)?;
        check_axis("p", p_min, p_max)?;
        let region = Region { q_min, q_max, p_min, p_max };
        if !region.area().is_finite() || region.area() <= 0.0 {
            return Err(Error::DegenerateBounds { axis: "area", min: 0.0, max: region.area() });
        }
        Ok(region)
    }

    /// The unit square [0,1)², the natural domain of every catalogue map.
    pub fn unit_square() -> Self {
        Region { q_min: 0.0, q_max: 1.0, p_min: 0.0, p_max: 1.0 }
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }
    pub fn q_max(&self) -> f64 {
        self.q_max
    }
    pub fn p_min(&self) -> f64 {
        self.p_min
    }
    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn width(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn height(&self) -> f64 {
        self.p_max - self.p_min
    }

    /// Lebesgue measure μ(Ω).
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Half-open membership test.
    pub fn contains(&self, q: f64, p: f64) -> bool {
        q >= self.q_min && q < self.q_max && p >= self.p_min && p < self.p_max
    }
}

fn check_axis(axis: &'static str, min: f64, max: f64) -> Result<()> {
    if !min.is_finite() || !max.is_finite() || max - min <= 0.0 {
        return Err(Error::DegenerateBounds { axis, min, max });
    }
    Ok(())
}

/// Index of a cell in row-major order: `index = row * cells_q + col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellId(pub u32);

impl CellId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Uniform grid partition of a [`Region`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionSpec", into = "PartitionSpec")]
pub struct Partition {
    region: Region,
    cells_q: usize,
    cells_p: usize,
}

/// Wire form of a partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PartitionSpec {
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
    cells_q: usize,
    cells_p: usize,
}

impl TryFrom<PartitionSpec> for Partition {
    type Error = Error;

    fn try_from(s: PartitionSpec) -> Result<Self> {
        let region = Region::new(s.q_min, s.q_max, s.p_min, s.p_max)?;
        Partition::new(region, s.cells_q, s.cells_p)
    }
}

impl From<Partition> for PartitionSpec {
    fn from(p: Partition) -> Self {
        PartitionSpec {
            q_min: p.region.q_min,
            q_max: p.region.q_max,
            p_min: p.region.p_min,
            p_max: p.region.p_max,
            cells_q: p.cells_q,
            cells_p: p.cells_p,
        }
    }
}

impl Partition {
    pub fn new(region: Region, cells_q: usize, cells_p: usize) -> Result<Self> {
        if cells_q == 0 || cells_p == 0 {
            return Err(Error::ZeroCells { cells_q, cells_p });
        }
        if cells_q.checked_mul(cells_p).is_none_or(|m| m > u32::MAX as usize) {
            return Err(Error::InvalidArgument(format!(
                "{cells_q}x{cells_p} cells do not fit a 32-bit cell index"
            )));
        }
        Ok(Partition { region, cells_q, cells_p })
    }

    /// Square grid on the unit square.
    pub fn unit(cells_q: usize, cells_p: usize) -> Result<Self> {
        Partition::new(Region::unit_square(), cells_q, cells_p)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn cells_q(&self) -> usize {
        self.cells_q
    }

    pub fn cells_p(&self) -> usize {
        self.cells_p
    }

    /// Number of cells `M`.
    pub fn len(&self) -> usize {
        self.cells_q * self.cells_p
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell area `h = μ(Ω) / M`.
    pub fn h_cell(&self) -> f64 {
        self.region.area() / self.len() as f64
    }

    pub fn dq(&self) -> f64 {
        self.region.width() / self.cells_q as f64
    }

    pub fn dp(&self) -> f64 {
        self.region.height() / self.cells_p as f64
    }

    /// `q = μ(Ω) / h`, which is `M` for every uniform grid.
    pub fn quasiclassical_parameter(&self) -> f64 {
        self.len() as f64
    }

    /// Bits needed to store one cell index.
    pub fn bits_per_symbol(&self) -> u32 {
        let m = self.len() as u64;
        if m <= 1 {
            1
        } else {
            64 - (m - 1).leading_zeros()
        }
    }

    pub fn cell_index(&self, q: f64, p: f64) -> Result<CellId> {
        if !self.region.contains(q, p) {
            return Err(Error::OutOfRegion { q, p });
        }
        Ok(self.cell_index_unchecked(q, p))
    }

    /// Same as [`Partition::cell_index`] for points already known to be inside.
    #[inline]
    pub(crate) fn cell_index_unchecked(&self, q: f64, p: f64) -> CellId {
        let col = (((q - self.region.q_min) / self.dq()) as usize).min(self.cells_q - 1);
        let row = (((p - self.region.p_min) / self.dp()) as usize).min(self.cells_p - 1);
        CellId((row * self.cells_q + col) as u32)
    }

    pub fn row_col(&self, cell: CellId) -> (usize, usize) {
        (cell.index() / self.cells_q, cell.index() % self.cells_q)
    }

    pub fn cell_of(&self, row: usize, col: usize) -> CellId {
        CellId((row * self.cells_q + col) as u32)
    }

    /// Lower-left corner of a cell.
    pub fn cell_origin(&self, cell: CellId) -> (f64, f64) {
        let (row, col) = self.row_col(cell);
        (
            self.region.q_min + col as f64 * self.dq(),
            self.region.p_min + row as f64 * self.dp(),
        )
    }
}

/// A union of partition cells, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSet {
    mask: Vec<bool>,
}

impl CellSet {
    pub fn from_indices(partition: &Partition, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; partition.len()];
        for c in cells {
            if c >= mask.len() {
                return Err(Error::InvalidArgument(format!("cell {c} outside a partition of {} cells", mask.len())));
            }
            mask[c] = true;
        }
        Ok(CellSet { mask })
    }

    /// Cells whose `(row, col)` satisfy the predicate.
    pub fn from_predicate(partition: &Partition, pred: impl Fn(usize, usize) -> bool) -> Self {
        let mask = (0..partition.len())
            .map(|i| pred(i / partition.cells_q(), i % partition.cells_q()))
            .collect();
        CellSet { mask }
    }

    pub fn all(partition: &Partition) -> Self {
        CellSet { mask: vec![true; partition.len()] }
    }

    /// Cells in the left half of the grid (`col < cells_q / 2`).
    pub fn left_half(partition: &Partition) -> Self {
        let half = partition.cells_q() / 2;
        Self::from_predicate(partition, |_, col| col < half)
    }

    /// Cells in the bottom half of the grid (`row < cells_p / 2`).
    pub fn bottom_half(partition: &Partition) -> Self {
        let half = partition.cells_p() / 2;
        Self::from_predicate(partition, |row, _| row < half)
    }

    #[inline]
    pub fn contains(&self, cell: CellId) -> bool {
        self.mask[cell.index()]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn len_partition(&self) -> usize {
        self.mask.len()
    }

    /// Normalized measure μ(A) / μ(Ω).
    pub fn measure(&self) -> f64 {
        self.count() as f64 / self.mask.len() as f64
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }
}
