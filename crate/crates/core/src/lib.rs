//! Coarse-grained phase space, Kolmogorov–Sinai entropy estimation and
//! quantum-classical mixing checks on the unit torus.

pub mod cli;
pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod measure;
pub mod phase_space;
pub mod quantum;
pub mod transfer;

pub use dynamics::{lyapunov_max, MapKind, MapSystem, Point};
pub use entropy::{bound_report, entropy_series, ks_estimate, BoundReport, EntropySeries, FitWindow, KsEstimate, KsMethod};
pub use error::{Error, Result};
pub use measure::{itinerary_of, sample_joint, Itinerary, JointDistribution};
pub use phase_space::{CellId, CellSet, Partition, Region};
pub use quantum::{quantized_cat, DensityOperator, Observable, QuantumSystem, WignerGrid};
pub use transfer::{build_ulam, fixed_density, CorrelationSeries, Density, UlamOperator, UlamSampling};
