//! Exact invariants of polarized metrized graphs.
//!
//! A weighted multigraph is read as an electrical network (edge `e` a wire of
//! resistance `l(e)`) and as a metric space. On top of the discrete layer
//! (Laplacian, pseudo-inverse Green's function, effective resistance, spanning
//! tree count) the crate computes the canonical and admissible measures, the
//! admissible Green's function, the invariants tau, eta and epsilon, the
//! combinatorial Deligne pairing, and the exact leading coefficients that
//! govern how the Faltings delta-invariant, the Arakelov metric and the
//! Arakelov-Green's function degenerate along a semistable family.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere in the library. All values are immutable after
//! construction and every operation is a pure function of its inputs.

pub mod rational;
pub mod sampling;

pub mod graph;

pub mod metrized;

pub mod admissible;
pub mod check;
pub mod degeneration;

pub mod pairing;

pub use admissible::{AdmissibleMeasure, PolarizationError, PolarizedMetrizedGraph};
pub use check::{verify_identities, IdentityCheck, IdentityReport};
pub use degeneration::{
    arakelov_asymptotics, delta_asymptotics, desingularize, lear_coefficients, limit_measure,
    polarized_graph_of, split_edge_resistance, split_edge_resistance_closed_form, ArakelovReport,
    AsymptoticsReport, FiberError, LearReport, NodalFiberSpec, Node,
};
pub use pairing::{
    admissible_of_point, curvature, intersection, omega_a, AdmissibleBundle, BundleLabel,
    CompactifiedDivisor,
};
pub use metrized::{
    Current, MetrizedGraph, PiecewiseQuadratic, Point, PointError, QuadPoly, SubdivisionMap,
};
pub use graph::{
    build_graph, GraphError, GreenTable, LaplacianMatrix, VertexDivisor, WeightedMultigraph,
};
pub use rational::{decimal_string, parse_rational, rat, ExtendedRational, Rat};
pub use sampling::{random_fiber, random_point, random_polarized_graph, random_potential};
