//! Numerical tools for firm non-expansive maps on weak metric spaces.
//!
//! A weak metric satisfies `delta(x, x) = 0` and the triangle inequality but
//! need not be symmetric or separate points. On such spaces this crate
//! samples and checks the axioms, certifies or refutes firmness of a map,
//! estimates minimal displacement, escape rate and asymptotic step sizes
//! along orbits, and builds metric functionals from orbit anchors.
//!
//! ```
//! use firmlab::{MapDescriptor, Point, SpaceDescriptor};
//! use firmlab::asymptotics::{iterate_orbit, rho_estimate};
//!
//! let line = SpaceDescriptor::real_line_abs();
//! let t = MapDescriptor::abs_plus_one(&line).unwrap();
//! let trace = iterate_orbit(&line, &t, &Point::scalar(-3.0), 10_000, 1).unwrap();
//! assert!((rho_estimate(&trace).unwrap().value - 1.0).abs() < 1e-3);
//! ```

pub mod asymptotics;
pub mod checks;
mod error;
pub mod firmness;
pub mod functionals;
pub mod mappings;
pub mod metric;
mod point;
pub mod sampler;
pub mod spaces;

pub use checks::{
    check_nonexpansive, check_nonexpansive_on, check_weak_metric_axioms, check_weak_metric_axioms_on, AxiomReport,
    AxiomViolation, NonexpansiveReport,
};
pub use error::{Error, Result};
pub use mappings::{images_of, krasnoselskii_average, MapDescriptor, MapKind, PiecewiseLinear1D, SelfMap, VirtualPair};
pub use metric::{SpaceDescriptor, SpaceKind, WeakMetric};
pub use point::Point;
pub use sampler::{Pair, Region, Sampler, Scheme};
pub use spaces::{AsymNorm1D, LpExponent, LpNorm, PolyhedralAsymNorm, PositivityReport};
