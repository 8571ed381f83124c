//! Hutchinson attractors of generalized contractions, the Wasserstein-1
//! lift of function systems to measure spaces, and Katětov extensions
//! that realize fractals inside finite approximations of the Urysohn
//! space.
//!
//! Everything is generic over [`Scalar`]: exact rationals for table
//! spaces, `f64`/`f32` for the Euclidean affine backend.

pub mod hutchinson;
pub mod io;
pub mod katetov;
pub mod maps;
pub mod measure;
pub mod metric;
pub mod moduli;
pub mod rng;
pub mod scalar;

pub use hutchinson::{
    chaos_game, code_diameter, code_point, hutchinson_image, hyperspace_contraction_report,
    iterate_to_attractor, AttractorRun, Code, HutchinsonError, IfSystem,
};
pub use katetov::{
    build_urysohn_approx, extend_map, extend_system, katetov_from_map, realize_point, KatetovError,
    KatetovFunction,
};
pub use maps::{coords, AffineMap, Coords, PointMap, TableMap};
pub use measure::{
    coupling_pushforward, dirac, pushforward, verify_measure_contraction, wasserstein1,
    DiscreteMeasure, MeasureError, TransportPlan,
};
pub use metric::{
    hausdorff_distance, set_image, validate_metric, CompactSet, EuclideanSpace, FiniteMetricSpace,
    MetricError, MetricSpace,
};
pub use scalar::{parse_rational, Rational, Scalar};

/// Table space with exact rational distances.
pub type RationalSpace = FiniteMetricSpace<Rational>;
/// Table space with `f64` distances.
pub type FloatSpace = FiniteMetricSpace<f64>;
/// Euclidean plane/line/space on `f64` coordinates.
pub type Euclidean = EuclideanSpace<f64>;
/// Euclidean space on exact rational coordinates.
pub type RationalEuclidean = EuclideanSpace<Rational>;
