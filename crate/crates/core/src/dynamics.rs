//! Catalogue of measure-preserving maps on the unit square.
//!
//! Every map acts on `[0,1)²`. The one-dimensional doubling map acts on `q`
//! only and carries `p` along unchanged, so it can share the 2-D partition
//! machinery with `cells_p = 1`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub q: f64,
    pub p: f64,
}

impl Point {
    pub const fn new(q: f64, p: f64) -> Self {
        Point { q, p }
    }
}

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// `x mod 1` folded into `[0, 1)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    /// `(q, p) -> (2q mod 1, (p + floor(2q)) / 2)`
    Baker,
    /// Arnold cat map `(q, p) -> (2q + p, q + p) mod 1`.
    Cat,
    /// Chirikov standard map on the torus with kick strength `k`.
    Standard { k: f64 },
    /// Rigid rotation `q -> q + alpha`; the non-mixing control.
    Rotation { alpha: f64 },
    /// `q -> 2q mod 1`, with `p` passive.
    Doubling,
}

/// A named map from the catalogue.
///
/// Parses from and prints as the CLI spelling: `baker`, `cat`,
/// `standard:K=<real>`, `rotation:alpha=<real>`, `doubling`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSystem {
    kind: MapKind,
}

impl MapSystem {
    pub fn new(kind: MapKind) -> Self {
        MapSystem { kind }
    }

    pub fn baker() -> Self {
        Self::new(MapKind::Baker)
    }

    pub fn cat() -> Self {
        Self::new(MapKind::Cat)
    }

    pub fn standard(k: f64) -> Self {
        Self::new(MapKind::Standard { k })
    }

    pub fn rotation(alpha: f64) -> Self {
        Self::new(MapKind::Rotation { alpha })
    }

    pub fn doubling() -> Self {
        Self::new(MapKind::Doubling)
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MapKind::Baker => "baker",
            MapKind::Cat => "cat",
            MapKind::Standard { .. } => "standard",
            MapKind::Rotation { .. } => "rotation",
            MapKind::Doubling => "doubling",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self.kind {
            MapKind::Standard { k } => vec![k],
            MapKind::Rotation { alpha } => vec![alpha],
            _ => Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            MapKind::Doubling => 1,
            _ => 2,
        }
    }

    fn check_domain(&self, x: Point) -> Result<()> {
        let inside = |v: f64| (0.0..1.0).contains(&v);
        let ok = if self.dimension() == 1 { inside(x.q) && x.p.is_finite() } else { inside(x.q) && inside(x.p) };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain { map: self.to_string(), q: x.q, p: x.p })
        }
    }

    /// One forward step.
    pub fn apply(&self, x: Point) -> Result<Point> {
        self.check_domain(x)?;
        Ok(self.step(x))
    }

    /// One forward step without the domain check.
    #[inline]
    pub fn step(&self, x: Point) -> Point {
        match self.kind {
            MapKind::Baker => {
                let f = (2.0 * x.q).floor();
                Point::new(2.0 * x.q - f, (x.p + f) * 0.5)
            }
            MapKind::Cat => Point::new(wrap(2.0 * x.q + x.p), wrap(x.q + x.p)),
            MapKind::Standard { k } => {
                let p = wrap(x.p + k / TAU * (TAU * x.q).sin());
                Point::new(wrap(x.q + p), p)
            }
            MapKind::Rotation { alpha } => Point::new(wrap(x.q + alpha), x.p),
            MapKind::Doubling => Point::new(wrap(2.0 * x.q), x.p),
        }
    }

    /// `T^k x`.
    #[inline]
    pub fn iterate(&self, mut x: Point, k: usize) -> Point {
        for _ in 0..k {
            x = self.step(x);
        }
        x
    }

    /// Local Jacobian at `x`, in `(q, p)` coordinates.
    pub fn jacobian(&self, x: Point) -> Result<Mat2> {
        self.check_domain(x)?;
        match self.kind {
            MapKind::Baker | MapKind::Doubling if x.q == 0.5 => {
                Err(Error::UndefinedDerivative { map: self.to_string(), q: x.q, p: x.p })
            }
            MapKind::Baker => Ok([[2.0, 0.0], [0.0, 0.5]]),
            MapKind::Doubling => Ok([[2.0, 0.0], [0.0, 1.0]]),
            MapKind::Cat => Ok([[2.0, 1.0], [1.0, 1.0]]),
            MapKind::Standard { k } => {
                let c = k * (TAU * x.q).cos();
                Ok([[1.0 + c, 1.0], [c, 1.0]])
            }
            MapKind::Rotation { .. } => Ok(IDENTITY),
        }
    }

    /// Advance a tangent frame: the point moves by one step and the
    /// accumulated Jacobian is premultiplied by the local one.
    pub fn tangent_step(&self, frame: &TangentFrame) -> Result<TangentFrame> {
        let local = self.jacobian(frame.point)?;
        Ok(TangentFrame { point: self.step(frame.point), jacobian: mat_mul(&local, &frame.jacobian) })
    }

    /// `[x, T^s x, T^{2s} x, ..., T^{ns} x]`.
    pub fn orbit(&self, x: Point, n: usize, stride: usize) -> Result<Vec<Point>> {
        if stride == 0 {
            return Err(Error::InvalidArgument("stride must be at least 1".into()));
        }
        self.check_domain(x)?;
        let mut out = Vec::with_capacity(n + 1);
        let mut cur = x;
        out.push(cur);
        for _ in 0..n {
            cur = self.iterate(cur, stride);
            out.push(cur);
        }
        Ok(out)
    }
}

impl fmt::Display for MapSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MapKind::Standard { k } => write!(f, "standard:K={k}"),
            MapKind::Rotation { alpha } => write!(f, "rotation:alpha={alpha}"),
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for MapSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MapSpec(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let param = |key: &str| -> Result<f64> {
            let (k, v) = arg.and_then(|a| a.split_once('=')).ok_or_else(bad)?;
            if !k.trim().eq_ignore_ascii_case(key) {
                return Err(bad());
            }
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        match (name, arg) {
            ("baker", None) => Ok(Self::baker()),
            ("cat", None) => Ok(Self::cat()),
            ("doubling", None) => Ok(Self::doubling()),
            ("standard", Some(_)) => Ok(Self::standard(param("K")?)),
            ("rotation", Some(_)) => Ok(Self::rotation(param("alpha")?)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for MapSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MapSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentFrame {
    pub point: Point,
    pub jacobian: Mat2,
}

impl TangentFrame {
    pub fn at(point: Point) -> Self {
        TangentFrame { point, jacobian: IDENTITY }
    }
}

/// Restarts allowed in a row before [`lyapunov_max`] gives up.
pub const MAX_RESTARTS: usize = 10;

/// Largest Lyapunov exponent in nats per step.
///
/// A tangent vector is pushed through the local Jacobians and renormalized
/// after every step. When the orbit lands on a discontinuity (baker and
/// doubling at `q = 1/2`, which finite-precision binary-shift orbits always
/// reach eventually) the orbit is restarted from a perturbed point and the
/// accumulated growth is kept.
pub fn lyapunov_max(map: &MapSystem, seed_point: Point, n_steps: usize, rng_seed: u64) -> Result<f64> {
    if n_steps < 1000 {
        return Err(Error::InvalidArgument(format!("lyapunov_max needs at least 1000 steps, got {n_steps}")));
    }
    map.check_domain(seed_point)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let angle: f64 = rng.random::<f64>() * TAU;
    let mut v = [angle.cos(), angle.sin()];
    let mut x = seed_point;
    let mut log_growth = 0.0;
    let mut streak = 0;
    let mut done = 0;
    while done < n_steps {
        let jac = match map.jacobian(x) {
            Ok(j) => j,
            Err(Error::UndefinedDerivative { .. }) => {
                streak += 1;
                if streak > MAX_RESTARTS {
                    return Err(Error::RestartsExhausted { restarts: MAX_RESTARTS });
                }
                x = perturb(map, x, &mut rng);
                continue;
            }
            Err(e) => return Err(e),
        };
        streak = 0;
        let w = [jac[0][0] * v[0] + jac[0][1] * v[1], jac[1][0] * v[0] + jac[1][1] * v[1]];
        let norm = w[0].hypot(w[1]);
        log_growth += norm.ln();
        v = [w[0] / norm, w[1] / norm];
        x = map.step(x);
        done += 1;
    }
    Ok(log_growth / n_steps as f64)
}

fn perturb(map: &MapSystem, x: Point, rng: &mut ChaCha8Rng) -> Point {
    let jitter = |v: f64, rng: &mut ChaCha8Rng| wrap(v + (rng.random::<f64>() - 0.5) * 1e-3);
    let q = jitter(x.q, rng);
    let p = if map.dimension() == 1 { x.p } else { jitter(x.p, rng) };
    Point::new(q, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn apply_examples() {
        assert_eq!(MapSystem::cat().apply(Point::new(0.0, 0.0)).unwrap(), Point::new(0.0, 0.0));
        assert_relative_eq!(MapSystem::doubling().apply(Point::new(0.3, 0.0)).unwrap().q, 0.6);
        // hand-evaluated: floor(0.5) = 0, so (2 * 0.25, 0.5 / 2)
        assert_eq!(MapSystem::baker().apply(Point::new(0.25, 0.5)).unwrap(), Point::new(0.5, 0.25));
        assert_eq!(MapSystem::baker().apply(Point::new(0.75, 0.5)).unwrap(), Point::new(0.5, 0.75));
    }

    #[test]
    fn domain_errors() {
        for map in [MapSystem::cat(), MapSystem::baker(), MapSystem::rotation(0.3)] {
            assert!(matches!(map.apply(Point::new(f64::NAN, 0.2)), Err(Error::Domain { .. })));
            assert!(map.apply(Point::new(1.0, 0.2)).is_err());
            assert!(map.apply(Point::new(0.2, -0.1)).is_err());
        }
        assert!(MapSystem::doubling().apply(Point::new(0.2, 7.0)).is_ok());
    }

    #[test]
    fn tangent_examples() {
        let f = MapSystem::cat().tangent_step(&TangentFrame::at(Point::new(0.3, 0.7))).unwrap();
        assert_eq!(f.jacobian, [[2.0, 1.0], [1.0, 1.0]]);
        let f = MapSystem::rotation(0.1).tangent_step(&TangentFrame::at(Point::new(0.3, 0.7))).unwrap();
        assert_eq!(f.jacobian, IDENTITY);
        let f = MapSystem::doubling().tangent_step(&TangentFrame::at(Point::new(0.3, 0.0))).unwrap();
        assert_eq!(f.jacobian[0][0], 2.0);
        assert_relative_eq!(f.point.q, 0.6);
        assert!(matches!(
            MapSystem::baker().tangent_step(&TangentFrame::at(Point::new(0.5, 0.2))),
            Err(Error::UndefinedDerivative { .. })
        ));
    }

    #[test]
    fn tangent_accumulates() {
        let cat = MapSystem::cat();
        let mut f = TangentFrame::at(Point::new(0.1, 0.2));
        for _ in 0..3 {
            f = cat.tangent_step(&f).unwrap();
        }
        // [[2,1],[1,1]]^3
        assert_eq!(f.jacobian, [[13.0, 8.0], [8.0, 5.0]]);
    }

    #[test]
    fn unit_determinant_for_area_preserving_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let maps = [MapSystem::baker(), MapSystem::cat(), MapSystem::standard(0.97), MapSystem::standard(6.0), MapSystem::rotation(0.3)];
        for map in maps {
            for _ in 0..10_000 {
                let x = Point::new(rng.random(), rng.random());
                if let Ok(j) = map.jacobian(x) {
                    assert!((det(&j).abs() - 1.0).abs() <= 1e-10, "{map} at {x:?}");
                }
            }
        }
    }

    #[test]
    fn cat_period_three_at_half() {
        let cat = MapSystem::cat();
        let x = Point::new(0.5, 0.5);
        assert_ne!(cat.iterate(x, 1), x);
        assert_ne!(cat.iterate(x, 2), x);
        assert_eq!(cat.iterate(x, 3), x);
    }

    #[test]
    fn orbit_examples() {
        let x = Point::new(0.1, 0.4);
        assert_eq!(MapSystem::cat().orbit(x, 0, 1).unwrap(), vec![x]);
        assert_eq!(MapSystem::rotation(0.0).orbit(x, 5, 1).unwrap(), vec![x; 6]);
        let qs: Vec<f64> = MapSystem::doubling().orbit(x, 3, 1).unwrap().iter().map(|y| y.q).collect();
        for (a, b) in qs.iter().zip([0.1, 0.2, 0.4, 0.8]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let strided = MapSystem::doubling().orbit(x, 2, 2).unwrap();
        assert_relative_eq!(strided[1].q, 0.4, epsilon = 1e-15);
        assert!(MapSystem::cat().orbit(x, 2, 0).is_err());
    }

    #[test]
    fn lyapunov_oracles() {
        let golden = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        let seed = Point::new(0.1234, 0.5678);
        let cat = lyapunov_max(&MapSystem::cat(), seed, 10_000, 1).unwrap();
        assert!((cat - golden).abs() / golden < 0.01, "{cat}");
        let dbl = lyapunov_max(&MapSystem::doubling(), seed, 10_000, 1).unwrap();
        assert!((dbl - 2f64.ln()).abs() / 2f64.ln() < 0.01, "{dbl}");
        let baker = lyapunov_max(&MapSystem::baker(), seed, 10_000, 1).unwrap();
        assert!((baker - 2f64.ln()).abs() / 2f64.ln() < 0.01, "{baker}");
        let rot = lyapunov_max(&MapSystem::rotation(0.618), seed, 10_000, 1).unwrap();
        assert!(rot.abs() < 1e-3);
    }

    #[test]
    fn lyapunov_seed_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for map in [MapSystem::cat(), MapSystem::baker(), MapSystem::doubling()] {
            let base = lyapunov_max(&map, Point::new(0.3, 0.3), 5000, 0).unwrap();
            for s in 0..5 {
                let x = Point::new(rng.random(), rng.random());
                let l = lyapunov_max(&map, x, 5000, s).unwrap();
                assert!((l - base).abs() / base < 0.01, "{map}: {l} vs {base}");
            }
        }
    }

    #[test]
    fn lyapunov_rejects_short_runs() {
        assert!(lyapunov_max(&MapSystem::cat(), Point::new(0.1, 0.1), 999, 0).is_err());
    }

    #[test]
    fn map_spec_round_trip() {
        for s in ["baker", "cat", "doubling", "standard:K=0.97", "rotation:alpha=0.618"] {
            let m: MapSystem = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert_eq!("standard:k=2".parse::<MapSystem>().unwrap(), MapSystem::standard(2.0));
        for bad in ["", "tent", "standard", "rotation:beta=1", "rotation:alpha=x", "cat:K=1", "standard:K=inf"] {
            assert!(bad.parse::<MapSystem>().is_err(), "{bad}");
        }
        let json = serde_json::to_string(&MapSystem::rotation(0.25)).unwrap();
        assert_eq!(json, "\"rotation:alpha=0.25\"");
    }

    #[test]
    fn metadata() {
        assert_eq!(MapSystem::standard(1.5).params(), vec![1.5]);
        assert_eq!(MapSystem::doubling().dimension(), 1);
        assert_eq!(MapSystem::cat().dimension(), 2);
        assert_eq!(MapSystem::rotation(0.2).name(), "rotation");
    }
}
