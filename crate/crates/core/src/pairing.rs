//! Pairing layer: compactified divisors, the combinatorial Deligne
//! intersection pairing, curvature forms, and the admissible bundles
//! attached to a point and to the polarization.
//!
//! A compactified divisor is a vertex divisor together with a function on
//! the graph; two of them pair through
//! `(D + f, E + g) = g(D) + f(E) - integral of g against Laplacian(f)`,
//! which is symmetric and bilinear. Only this rational coefficient is
//! modeled; the part of a Deligne pairing living on the base is out of
//! scope. A bundle is admissible when its curvature `dirac_D - Laplacian(f)`
//! is a rational multiple of the admissible measure.

use num::Zero;

use crate::admissible::PolarizedMetrizedGraph;
use crate::graph::{VertexDivisor, VertexId};
use crate::metrized::{Current, PiecewiseQuadratic};
use crate::rational::Rat;

/// Vertex divisor `D` together with a continuous piecewise-quadratic
/// potential `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactifiedDivisor {
    pub divisor: VertexDivisor,
    pub potential: PiecewiseQuadratic,
}

impl CompactifiedDivisor {
    pub fn new(divisor: VertexDivisor, potential: PiecewiseQuadratic) -> Self {
        CompactifiedDivisor { divisor, potential }
    }

    /// The tensor product: divisors and potentials add.
    pub fn tensor(&self, other: &CompactifiedDivisor) -> CompactifiedDivisor {
        CompactifiedDivisor {
            divisor: self.divisor.plus(&other.divisor),
            potential: self.potential.plus(&other.potential),
        }
    }
}

/// How an admissible bundle arose. Purely informational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleLabel {
    /// `O(P)` made admissible, specializing to the recorded vertex.
    Point(VertexId),
    /// The relative dualizing sheaf made admissible.
    Canonical,
    /// Any other admissible combination.
    Generic,
}

/// Compactified divisor whose curvature is a rational multiple of the
/// admissible measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleBundle {
    pub base: CompactifiedDivisor,
    pub label: BundleLabel,
}

impl AdmissibleBundle {
    pub fn tensor(&self, other: &AdmissibleBundle) -> AdmissibleBundle {
        AdmissibleBundle {
            base: self.base.tensor(&other.base),
            label: BundleLabel::Generic,
        }
    }
}

/// The pairing `(D + f, E + g) = g(D) + f(E) - integral of g Laplacian(f)`.
/// Symmetric and bilinear; the symmetry is equivalent to integration by
/// parts for the graph Laplacian.
pub fn intersection(
    p: &PolarizedMetrizedGraph,
    a: &CompactifiedDivisor,
    b: &CompactifiedDivisor,
) -> Rat {
    let graph = p.graph();
    let g_of_d = a
        .divisor
        .iter()
        .fold(Rat::zero(), |acc, (v, c)| acc + c * b.potential.vertex_value(*v));
    let f_of_e = b
        .divisor
        .iter()
        .fold(Rat::zero(), |acc, (v, c)| acc + c * a.potential.vertex_value(*v));
    let laplacian_f = graph.laplacian_of(&a.potential);
    g_of_d + f_of_e - graph.integrate(&b.potential, &laplacian_f)
}

/// The curvature current `dirac_D - Laplacian(f)`; total mass `deg D`.
pub fn curvature(p: &PolarizedMetrizedGraph, a: &CompactifiedDivisor) -> Current {
    let graph = p.graph();
    Current::from_divisor(graph, &a.divisor).minus(&graph.laplacian_of(&a.potential))
}

/// The admissible bundle of a point: `dirac_x + g(x, .)`. Its curvature is
/// the admissible measure.
pub fn admissible_of_point(p: &PolarizedMetrizedGraph, x: VertexId) -> AdmissibleBundle {
    AdmissibleBundle {
        base: CompactifiedDivisor::new(VertexDivisor::point(x), p.green_function(x)),
        label: BundleLabel::Point(x),
    }
}

/// The admissible canonical bundle: `dirac_K + (c + g(K, .))`. Its curvature
/// is `(2h - 2)` times the admissible measure, and its self-pairing is
/// `-epsilon`.
pub fn omega_a(p: &PolarizedMetrizedGraph) -> AdmissibleBundle {
    let potential = p
        .green_function_divisor(p.canonical_divisor())
        .shifted(&p.c_constant());
    AdmissibleBundle {
        base: CompactifiedDivisor::new(p.canonical_divisor().clone(), potential),
        label: BundleLabel::Canonical,
    }
}
