//! Finite-dimensional quantum phase space on the torus.
//!
//! States live in `C^N` with position basis `|0⟩ … |N−1⟩`, so the effective
//! Planck cell is `h_eff = 1/N`. The discrete Wigner function uses the odd-N
//! kernel
//!
//! ```text
//! W(q, p) = (1/N) Σ_y ρ_{q+y, q−y} ω^{−2py},   ω = e^{2πi/N},
//! ```
//!
//! which sums to one, has the position diagonal as its `p`-marginal, and pairs
//! with the Weyl symbol `Õ(q,p) = Σ_y O_{q+y,q−y} ω^{−2py}` to give `Tr(ρO)`
//! exactly.

use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dynamics::{MapKind, MapSystem};
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Eigenphases closer than this are treated as one degenerate block.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn hermiticity_error(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `ω^k` for `k = 0..n`.
fn roots_of_unity(n: usize) -> Vec<C64> {
    (0..n).map(|k| Complex::from_polar(1.0, TAU * k as f64 / n as f64)).collect()
}

#[derive(Debug, Clone)]
pub struct QuantumSystem {
    dim: usize,
    propagator: CMatrix,
    eigvecs: CMatrix,
    eigvals: Vec<C64>,
    classical: Option<MapSystem>,
}

impl QuantumSystem {
    /// Wrap a unitary propagator and diagonalize it.
    pub fn new(propagator: CMatrix) -> Result<Self> {
        let n = propagator.nrows();
        if n == 0 || propagator.ncols() != n {
            return Err(Error::InvalidArgument("propagator must be a nonempty square matrix".into()));
        }
        let defect = frobenius(&(propagator.adjoint() * &propagator - CMatrix::identity(n, n)));
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!("propagator is not unitary (‖U†U − I‖ = {defect:e})")));
        }
        let schur = propagator.clone().try_schur(1e-14, 10_000).ok_or(Error::Eigensolver)?;
        let (q, t) = schur.unpack();
        let eigvals = (0..n).map(|i| t[(i, i)]).collect();
        Ok(QuantumSystem { dim: n, propagator, eigvecs: q, eigvals, classical: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h_eff(&self) -> f64 {
        1.0 / self.dim as f64
    }

    pub fn propagator(&self) -> &CMatrix {
        &self.propagator
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigvals
    }

    /// Unitary eigenbasis, one eigenvector per column.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigvecs
    }

    pub fn classical_counterpart(&self) -> Option<&MapSystem> {
        self.classical.as_ref()
    }

    /// Smallest `P ≤ max_period` with `U^P` proportional to the identity.
    pub fn quantum_period(&self, max_period: usize) -> Option<usize> {
        let base = self.eigvals[0];
        let mut ratios: Vec<C64> = self.eigvals.iter().map(|l| l / base).collect();
        let step = ratios.clone();
        for p in 1..=max_period {
            if ratios.iter().all(|r| (r - Complex::new(1.0, 0.0)).norm() < 1e-8) {
                return Some(p);
            }
            ratios.iter_mut().zip(&step).for_each(|(r, s)| *r *= s);
        }
        None
    }

    /// Labels grouping eigenvalues whose phases lie within `tol` of each other.
    pub fn degenerate_blocks(&self, tol: f64) -> Vec<usize> {
        let n = self.dim;
        let phase = |i: usize| self.eigvals[i].arg().rem_euclid(TAU);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| phase(a).total_cmp(&phase(b)));
        let mut labels = vec![0; n];
        let mut block = 0;
        for w in 1..n {
            if phase(order[w]) - phase(order[w - 1]) > tol {
                block += 1;
            }
            labels[order[w]] = block;
        }
        // close the circle: the last block touches the first across 2π
        if n > 1 && block > 0 && phase(order[0]) + TAU - phase(order[n - 1]) <= tol {
            for l in labels.iter_mut() {
                if *l == block {
                    *l = 0;
                }
            }
        }
        labels
    }
}

/// The quantized Arnold cat map `(q, p) ↦ (2q + p, q + p)` on `Z_N`:
/// `U_{jk} = N^{-1/2} ω^{(N+1)/2 · (2k² − 2jk + j²)}`.
pub fn quantized_cat(n: usize) -> Result<QuantumSystem> {
    if n % 2 == 0 {
        return Err(Error::EvenDimension(n));
    }
    if n < 3 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 3, got {n}")));
    }
    let omega = roots_of_unity(n);
    let inv2 = (n as u64 + 1) / 2;
    let m = n as u64;
    let norm = 1.0 / (n as f64).sqrt();
    let u = CMatrix::from_fn(n, n, |j, k| {
        let (j, k) = (j as u64, k as u64);
        let quad = (2 * k * k + j * j + 2 * (m - 1) * j * k % m) % m;
        omega[((inv2 * quad) % m) as usize] * norm
    });
    let mut sys = QuantumSystem::new(u)?;
    sys.classical = Some(MapSystem::cat());
    Ok(sys)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::InvalidArgument("density matrix must be a nonempty square matrix".into()));
        }
        let herm = hermiticity_error(&matrix);
        if herm > 1e-12 {
            return Err(Error::InvalidArgument(format!("density matrix not Hermitian (error {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("density matrix trace {tr} is not 1")));
        }
        let min = matrix.clone().symmetric_eigenvalues().min();
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(DensityOperator { matrix })
    }

    fn unchecked(matrix: CMatrix) -> Self {
        DensityOperator { matrix }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::unchecked(CMatrix::identity(n, n).scale(1.0 / n as f64))
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("state vector must be nonzero".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self::unchecked(&v * v.adjoint()))
    }

    /// Position eigenstate `|k⟩⟨k|`.
    pub fn position(n: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        m[(k % n, k % n)] = Complex::new(1.0, 0.0);
        Self::unchecked(m)
    }

    pub fn random_pure(n: usize, rng: &mut impl Rng) -> Self {
        Self::pure(&gaussian_vector(n, rng)).expect("gaussian vector is nonzero")
    }

    /// `G G† / Tr(G G†)` for an `n × rank` complex Gaussian `G`.
    pub fn random_mixed(n: usize, rank: usize, rng: &mut impl Rng) -> Self {
        let g = CMatrix::from_fn(n, rank.max(1), |_, _| gaussian(rng));
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        let mut m = m.unscale(tr);
        symmetrize(&mut m);
        Self::unchecked(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    /// `Tr(ρO)`, real part.
    pub fn expectation(&self, observable: &Observable) -> f64 {
        (&self.matrix * &observable.matrix).trace().re
    }
}

fn symmetrize(m: &mut CMatrix) {
    let h = (m.clone() + m.adjoint()).scale(0.5);
    *m = h;
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_vector(n: usize, rng: &mut impl Rng) -> DVector<C64> {
    DVector::from_fn(n, |_, _| gaussian(rng))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidArgument("observable must be square".into()));
        }
        let herm = hermiticity_error(&matrix);
        if herm > 1e-12 {
            return Err(Error::InvalidArgument(format!("observable not Hermitian (error {herm:e})")));
        }
        Ok(Observable { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Observable { matrix: CMatrix::identity(n, n) }
    }

    pub fn zero(n: usize) -> Self {
        Observable { matrix: CMatrix::zeros(n, n) }
    }

    /// Projector onto positions `lo..hi`.
    pub fn position_window(n: usize, lo: usize, hi: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for k in lo..hi.min(n) {
            m[(k, k)] = Complex::new(1.0, 0.0);
        }
        Observable { matrix: m }
    }

    /// `(A + A†)/2` with complex Gaussian `A`.
    pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> Self {
        let a = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
        let mut m = a;
        symmetrize(&mut m);
        Observable { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

fn check_dims(system: &QuantumSystem, rho: &DensityOperator) -> Result<()> {
    if rho.dim() != system.dim {
        return Err(Error::InvalidArgument(format!("state has dimension {}, system {}", rho.dim(), system.dim)));
    }
    Ok(())
}

/// `Uᵗ ρ U†ᵗ`.
pub fn evolve(system: &QuantumSystem, rho: &DensityOperator, t_steps: usize) -> DensityOperator {
    let u = &system.propagator;
    let mut m = rho.matrix.clone();
    for _ in 0..t_steps {
        m = u * m * u.adjoint();
    }
    DensityOperator::unchecked(m)
}

/// Dephase `rho0` in the propagator eigenbasis, keeping only blocks within
/// degenerate eigenspaces.
pub fn stationary_state(system: &QuantumSystem, rho0: &DensityOperator) -> Result<DensityOperator> {
    stationary_state_with_tolerance(system, rho0, DEFAULT_DEGENERACY_TOL)
}

pub fn stationary_state_with_tolerance(system: &QuantumSystem, rho0: &DensityOperator, tol: f64) -> Result<DensityOperator> {
    check_dims(system, rho0)?;
    let v = &system.eigvecs;
    let labels = system.degenerate_blocks(tol);
    let mut inner = v.adjoint() * &rho0.matrix * v;
    for i in 0..system.dim {
        for j in 0..system.dim {
            if labels[i] != labels[j] {
                inner[(i, j)] = Complex::new(0.0, 0.0);
            }
        }
    }
    let mut m = v * inner * v.adjoint();
    symmetrize(&mut m);
    Ok(DensityOperator::unchecked(m))
}

/// `‖UρU† − ρ‖_F`.
pub fn check_stationarity(system: &QuantumSystem, rho: &DensityOperator) -> f64 {
    let u = &system.propagator;
    frobenius(&(u * &rho.matrix * u.adjoint() - &rho.matrix))
}

/// `Tr(ρ(t)O) − Tr(ρ*O)` with `ρ*` the dephased `rho0`.
pub fn quantum_correlation(system: &QuantumSystem, rho0: &DensityOperator, observable: &Observable, t_steps: usize) -> Result<f64> {
    let star = stationary_state(system, rho0)?;
    Ok(evolve(system, rho0, t_steps).expectation(observable) - star.expectation(observable))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumCorrelationSweep {
    pub dim: usize,
    pub times: Vec<usize>,
    pub values: Vec<f64>,
    /// Mean of `|C(t)|` over `t ≥ 1`.
    pub mean_abs: f64,
    /// Root-mean-square of `C(t)` over `t ≥ 1`.
    pub fluctuation: f64,
}

impl QuantumCorrelationSweep {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t,C")?;
        for (t, c) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t},{c}")?;
        }
        Ok(())
    }
}

/// `C(t)` for `t = 0..=t_max`, evaluated in the eigenbasis.
pub fn correlation_sweep(
    system: &QuantumSystem,
    rho0: &DensityOperator,
    observable: &Observable,
    t_max: usize,
) -> Result<QuantumCorrelationSweep> {
    check_dims(system, rho0)?;
    let v = &system.eigvecs;
    let r = v.adjoint() * &rho0.matrix * v;
    let o = v.adjoint() * &observable.matrix * v;
    let star = stationary_state(system, rho0)?.expectation(observable);
    let n = system.dim;
    let lambda = &system.eigvals;
    let mut phase_i = vec![Complex::new(1.0, 0.0); n];
    let mut values = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            for (p, l) in phase_i.iter_mut().zip(lambda) {
                *p *= l;
            }
        }
        let mut acc = Complex::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += phase_i[i] * phase_i[j].conj() * r[(i, j)] * o[(j, i)];
            }
        }
        values.push(acc.re - star);
    }
    let tail = &values[1.min(values.len())..];
    let k = tail.len().max(1) as f64;
    Ok(QuantumCorrelationSweep {
        dim: n,
        times: (0..=t_max).collect(),
        mean_abs: tail.iter().map(|c| c.abs()).sum::<f64>() / k,
        fluctuation: (tail.iter().map(|c| c * c).sum::<f64>() / k).sqrt(),
        values,
    })
}

/// Real function on the `Z_N × Z_N` lattice, indexed `(q, p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerGrid {
    n: usize,
    values: Vec<f64>,
}

impl WignerGrid {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize, p: usize) -> f64 {
        self.values[(q % self.n) * self.n + p % self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `Σ_p W(q, p)` for each `q`.
    pub fn position_marginal(&self) -> Vec<f64> {
        self.values.chunks(self.n).map(|row| row.iter().sum()).collect()
    }

    pub fn max_abs_difference(&self, other: &WignerGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "q_index,p_index,value")?;
        for q in 0..self.n {
            for p in 0..self.n {
                writeln!(w, "{q},{p},{}", self.get(q, p))?;
            }
        }
        Ok(())
    }
}

/// `Σ_y M_{q+y,q−y} ω^{−2py}` over the lattice, scaled by `scale`.
fn phase_space_transform(m: &CMatrix, scale: f64) -> Result<WignerGrid> {
    let n = m.nrows();
    if n % 2 == 0 {
        return Err(Error::EvenDimension(n));
    }
    let omega = roots_of_unity(n);
    let mut values = vec![0.0; n * n];
    for q in 0..n {
        let diag: Vec<C64> = (0..n).map(|y| m[((q + y) % n, (q + n - y) % n)]).collect();
        for p in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for (y, d) in diag.iter().enumerate() {
                let k = (2 * p * y) % n;
                acc += d * omega[(n - k) % n];
            }
            values[q * n + p] = acc.re * scale;
        }
    }
    Ok(WignerGrid { n, values })
}

pub fn discrete_wigner(rho: &DensityOperator) -> Result<WignerGrid> {
    phase_space_transform(&rho.matrix, 1.0 / rho.dim() as f64)
}

pub fn weyl_symbol(observable: &Observable) -> Result<WignerGrid> {
    phase_space_transform(&observable.matrix, 1.0)
}

/// `Σ_{q,p} W_ρ(q,p) Õ(q,p)`, equal to `Tr(ρO)`.
pub fn expectation_wigner(rho: &DensityOperator, observable: &Observable) -> Result<f64> {
    if rho.dim() != observable.matrix.nrows() {
        return Err(Error::InvalidArgument("state and observable dimensions differ".into()));
    }
    let w = discrete_wigner(rho)?;
    let o = weyl_symbol(observable)?;
    Ok(w.values.iter().zip(&o.values).map(|(a, b)| a * b).sum())
}

/// Integer matrix by which `map` permutes the `Z_N × Z_N` lattice.
pub fn lattice_permutation(map: &MapSystem) -> Result<[[usize; 2]; 2]> {
    match map.kind() {
        MapKind::Cat => Ok([[2, 1], [1, 1]]),
        MapKind::Rotation { alpha } if alpha == 0.0 => Ok([[1, 0], [0, 1]]),
        _ => Err(Error::GridMismatch(map.to_string())),
    }
}

fn lattice_image(a: &[[usize; 2]; 2], q: usize, p: usize, n: usize) -> (usize, usize) {
    ((a[0][0] * q + a[0][1] * p) % n, (a[1][0] * q + a[1][1] * p) % n)
}

/// `max |W_{UρU†}(T x) − W_ρ(x)|` over the lattice.
pub fn wigner_transport_residual(system: &QuantumSystem, rho: &DensityOperator, classical_map: &MapSystem) -> Result<f64> {
    check_dims(system, rho)?;
    let a = lattice_permutation(classical_map)?;
    let n = system.dim;
    let before = discrete_wigner(rho)?;
    let after = discrete_wigner(&evolve(system, rho, 1))?;
    let mut worst: f64 = 0.0;
    for q in 0..n {
        for p in 0..n {
            let (q2, p2) = lattice_image(&a, q, p, n);
            worst = worst.max((after.get(q2, p2) - before.get(q, p)).abs());
        }
    }
    Ok(worst)
}

/// `max |W_ρ(T⁻¹x) − W_ρ(x)|`: zero when `W_ρ` is a fixed point of the
/// classical transport.
pub fn classical_invariance_residual(rho: &DensityOperator, classical_map: &MapSystem) -> Result<f64> {
    let a = lattice_permutation(classical_map)?;
    let w = discrete_wigner(rho)?;
    let n = w.n;
    let mut worst: f64 = 0.0;
    for q in 0..n {
        for p in 0..n {
            let (q2, p2) = lattice_image(&a, q, p, n);
            worst = worst.max((w.get(q2, p2) - w.get(q, p)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::shard_rng;

    #[test]
    fn cat_propagator_is_unitary() {
        for n in [3, 5, 15, 31] {
            let sys = quantized_cat(n).unwrap();
            let u = sys.propagator();
            assert!(frobenius(&(u.adjoint() * u - CMatrix::identity(n, n))) < 1e-10);
            assert_eq!(sys.h_eff() * n as f64, 1.0);
        }
        let det = quantized_cat(3).unwrap().propagator().determinant();
        assert!((det.norm() - 1.0).abs() < 1e-10);
        assert!(matches!(quantized_cat(4), Err(Error::EvenDimension(4))));
        assert!(quantized_cat(1).is_err());
    }

    #[test]
    fn evolve_preserves_invariants() {
        let sys = quantized_cat(15).unwrap();
        let mixed = DensityOperator::maximally_mixed(15);
        assert!(frobenius(&(evolve(&sys, &mixed, 7).matrix - mixed.matrix())) < 1e-12);
        let pos = DensityOperator::position(15, 3);
        assert_eq!(evolve(&sys, &pos, 0), pos);
        let out = evolve(&sys, &pos, 1);
        assert!((out.trace().re - 1.0).abs() < 1e-10);
        assert!((out.purity() - 1.0).abs() < 1e-10);
        assert!(out.hermiticity_error() < 1e-10);
    }

    #[test]
    fn stationary_examples() {
        let sys = quantized_cat(31).unwrap();
        let mixed = DensityOperator::maximally_mixed(31);
        let star = stationary_state(&sys, &mixed).unwrap();
        assert!(frobenius(&(star.matrix() - mixed.matrix())) < 1e-12);
        assert!(check_stationarity(&sys, &mixed) < 1e-12);

        let v = sys.eigenvectors().column(0).into_owned();
        let eig = DensityOperator::pure(&v).unwrap();
        let star = stationary_state(&sys, &eig).unwrap();
        assert!(frobenius(&(star.matrix() - eig.matrix())) < 1e-10);

        let mut rng = shard_rng(5, 0);
        let psi = DensityOperator::random_pure(31, &mut rng);
        let star = stationary_state(&sys, &psi).unwrap();
        assert!(check_stationarity(&sys, &star) < 1e-10);
        assert!(check_stationarity(&sys, &psi) > 1e-2);
        assert!(DensityOperator::new(star.matrix().clone()).is_ok());
    }

    #[test]
    fn degenerate_blocks_close_across_branch_cut() {
        let phases = [-std::f64::consts::PI + 1e-12, std::f64::consts::PI - 1e-12, 1.0];
        let u = CMatrix::from_diagonal(&DVector::from_iterator(3, phases.iter().map(|&t| Complex::from_polar(1.0, t))));
        let sys = QuantumSystem::new(u).unwrap();
        let labels = sys.degenerate_blocks(1e-9);
        assert_eq!(labels[0], labels[1]);
        assert_ne!(labels[0], labels[2]);
    }

    #[test]
    fn correlation_examples() {
        let sys = quantized_cat(15).unwrap();
        let mut rng = shard_rng(2, 0);
        let rho = DensityOperator::random_pure(15, &mut rng);
        for t in [0, 1, 5] {
            assert!(quantum_correlation(&sys, &rho, &Observable::identity(15), t).unwrap().abs() < 1e-12);
        }
        let star = stationary_state(&sys, &rho).unwrap();
        let obs = Observable::position_window(15, 0, 7);
        for t in [0, 3, 9] {
            assert!(quantum_correlation(&sys, &star, &obs, t).unwrap().abs() < 1e-10);
        }
        let sweep = correlation_sweep(&sys, &rho, &obs, 10).unwrap();
        for t in [0, 4, 10] {
            let direct = quantum_correlation(&sys, &rho, &obs, t).unwrap();
            assert!((sweep.values[t] - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn wigner_examples() {
        let n = 15;
        let flat = discrete_wigner(&DensityOperator::maximally_mixed(n)).unwrap();
        assert!(flat.values().iter().all(|&v| (v - 1.0 / (n * n) as f64).abs() < 1e-14));
        assert!((flat.total() - 1.0).abs() < 1e-10);

        let pos = discrete_wigner(&DensityOperator::position(n, 4)).unwrap();
        for q in 0..n {
            for p in 0..n {
                let expected = if q == 4 { 1.0 / n as f64 } else { 0.0 };
                assert!((pos.get(q, p) - expected).abs() < 1e-12);
            }
        }

        let mut rng = shard_rng(3, 0);
        let rho = DensityOperator::random_mixed(n, 3, &mut rng);
        let w = discrete_wigner(&rho).unwrap();
        for (q, m) in w.position_marginal().iter().enumerate() {
            assert!((m - rho.matrix()[(q, q)].re).abs() < 1e-10);
        }
        assert!(matches!(discrete_wigner(&DensityOperator::maximally_mixed(4)), Err(Error::EvenDimension(4))));
    }

    #[test]
    fn wigner_pairing_examples() {
        let n = 15;
        let mixed = DensityOperator::maximally_mixed(n);
        assert!((expectation_wigner(&mixed, &Observable::identity(n)).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = shard_rng(4, 0);
        let rho = DensityOperator::random_pure(n, &mut rng);
        assert_eq!(expectation_wigner(&rho, &Observable::zero(n)).unwrap(), 0.0);
        let obs = Observable::random_hermitian(n, &mut rng);
        assert!((expectation_wigner(&rho, &obs).unwrap() - rho.expectation(&obs)).abs() < 1e-10);
    }

    #[test]
    fn wigner_transport_is_exact_for_cat() {
        let sys = quantized_cat(31).unwrap();
        let cat = MapSystem::cat();
        let mixed = DensityOperator::maximally_mixed(31);
        assert!(wigner_transport_residual(&sys, &mixed, &cat).unwrap() < 1e-12);
        let mut rng = shard_rng(6, 0);
        let psi = DensityOperator::random_pure(31, &mut rng);
        assert!(wigner_transport_residual(&sys, &psi, &cat).unwrap() < 1e-10);
        let star = stationary_state(&sys, &psi).unwrap();
        assert!(classical_invariance_residual(&star, &cat).unwrap() < 1e-10);
        assert!(classical_invariance_residual(&psi, &cat).unwrap() > 1e-3);
        assert!(matches!(wigner_transport_residual(&sys, &psi, &MapSystem::baker()), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let mut m = CMatrix::identity(3, 3).scale(0.5);
        assert!(DensityOperator::new(m.clone()).is_err());
        m[(0, 0)] = Complex::new(-0.5, 0.0);
        m[(1, 1)] = Complex::new(1.0, 0.0);
        assert!(DensityOperator::new(m).is_err());
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 1)] = Complex::new(0.0, 1.0);
        assert!(Observable::new(h).is_err());
        assert!(QuantumSystem::new(CMatrix::identity(3, 3).scale(2.0)).is_err());
    }
}
