//! Seeded random generators for polarized graphs, nodal fibers, points and
//! potentials. The self-check command and the test suites draw from these;
//! every generator is deterministic in the caller's RNG.

use std::collections::BTreeMap;

use rand::Rng;

use crate::admissible::PolarizedMetrizedGraph;
use crate::degeneration::{NodalFiberSpec, Node};
use crate::graph::{build_graph, VertexDivisor};
use crate::metrized::{MetrizedGraph, PiecewiseQuadratic, Point, QuadPoly};
use crate::rational::{rat, Rat};

fn random_length(rng: &mut impl Rng) -> Rat {
    rat(rng.gen_range(1..=20), rng.gen_range(1..=20))
}

/// Random connected multigraph on at most 8 vertices with at most 14 edges
/// (loops and parallel edges allowed), rational edge lengths with numerator
/// and denominator up to 20, and a random admissible integral polarization.
///
/// Vertices of valence below 2 receive genus at least 1, which makes the
/// canonical divisor effective; the total genus is then automatically at
/// least 1 (a tree on two or more vertices has at least two leaves, an
/// isolated vertex carries genus, and anything else has a cycle).
pub fn random_polarized_graph(rng: &mut impl Rng) -> PolarizedMetrizedGraph {
    let n = rng.gen_range(1..=8);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v, random_length(rng)));
    }
    let extra = rng.gen_range(0..=(14 - edges.len()).min(7));
    for _ in 0..extra {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n), random_length(rng)));
    }
    let model = build_graph(n, edges).expect("grown from a spanning tree");

    let valences = model.valences();
    let mut genera = Vec::with_capacity(n);
    for v in 0..n {
        let floor: i64 = if valences[v] < 2 { 1 } else { 0 };
        genera.push(floor + [0, 0, 0, 1, 1, 2][rng.gen_range(0..6)]);
    }
    let genus = model.betti_number() as i64 + genera.iter().sum::<i64>();
    let mut canonical = VertexDivisor::zero();
    for v in 0..n {
        canonical.add_at(v, &rat(valences[v] as i64 - 2 + 2 * genera[v], 1));
    }
    PolarizedMetrizedGraph::new(MetrizedGraph::new(model), canonical, genus)
        .expect("the polarization is admissible by construction")
}

/// Random point of the graph: a vertex about a third of the time, otherwise
/// an interior point of a random edge at a rational fraction of its length.
pub fn random_point(rng: &mut impl Rng, graph: &MetrizedGraph) -> Point {
    let model = graph.model();
    if model.edges().is_empty() || rng.gen_range(0..3) == 0 {
        return Point::AtVertex(rng.gen_range(0..model.vertex_count()));
    }
    let e = rng.gen_range(0..model.edges().len());
    let den = rng.gen_range(2..=7);
    let s = rat(rng.gen_range(1..den), den) * &model.edge(e).length;
    graph.point_on_edge(e, s).expect("the fraction is interior")
}

/// Random continuous piecewise-quadratic function: random rational vertex
/// values and a random curvature on each edge, with the linear coefficient
/// solved for continuity.
pub fn random_potential(rng: &mut impl Rng, graph: &MetrizedGraph) -> PiecewiseQuadratic {
    let model = graph.model();
    let values: Vec<Rat> = (0..model.vertex_count())
        .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
        .collect();
    let polys = model
        .edges()
        .iter()
        .map(|e| {
            let c2 = rat(rng.gen_range(-6..=6), rng.gen_range(1..=4));
            let c0 = values[e.minus].clone();
            let c1 = (&values[e.plus] - &c0 - &c2 * &e.length * &e.length) / &e.length;
            QuadPoly { c0, c1, c2 }
        })
        .collect();
    PiecewiseQuadratic::new(graph, values, polys)
}

/// Random semistable fiber: at most 4 components joined along at most 6
/// nodes of multiplicity up to 5, grown from a spanning tree so the dual
/// graph is connected, with genera floored as in `random_polarized_graph`
/// and sections `P` and `Q` on random components.
pub fn random_fiber(rng: &mut impl Rng) -> NodalFiberSpec {
    let n = rng.gen_range(1..=4);
    let mut nodes = Vec::new();
    for v in 1..n {
        nodes.push(Node {
            a: rng.gen_range(0..v),
            b: v,
            multiplicity: rng.gen_range(1..=5),
        });
    }
    for _ in 0..rng.gen_range(0..=3) {
        nodes.push(Node {
            a: rng.gen_range(0..n),
            b: rng.gen_range(0..n),
            multiplicity: rng.gen_range(1..=5),
        });
    }
    let mut valence = vec![0usize; n];
    for node in &nodes {
        valence[node.a] += 1;
        valence[node.b] += 1;
    }
    let genera = (0..n)
        .map(|v| {
            let floor: u32 = if valence[v] < 2 { 1 } else { 0 };
            floor + [0, 0, 1][rng.gen_range(0..3)]
        })
        .collect();
    let mut sections = BTreeMap::new();
    sections.insert("P".to_string(), rng.gen_range(0..n));
    sections.insert("Q".to_string(), rng.gen_range(0..n));
    NodalFiberSpec {
        genera,
        nodes,
        sections,
    }
}
