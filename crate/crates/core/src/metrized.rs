//! Metrized layer: the metric space realization of a weighted graph, points
//! on edges, piecewise-quadratic functions, currents, the Laplacian, the
//! canonical measure, and the invariants tau and eta.
//!
//! Conventions. A point interior to edge `e` is addressed by its arc-length
//! distance `s` from the tail `e.minus`, `0 < s < l(e)`; endpoint positions
//! are always represented as vertices. Every function this crate integrates
//! is piecewise quadratic and every measure has degree <= 2 polynomial
//! densities plus finitely many atoms, so all integrals are closed-form
//! rational expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{Edge, EdgeId, GreenTable, UnionFind, VertexDivisor, VertexId, WeightedMultigraph};
use crate::rational::{ExtendedRational, Rat};

/// Location on the metric space: a vertex, or an interior point of an edge at
/// arc-length distance `s` from the edge's tail.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Point {
    AtVertex(VertexId),
    OnEdge { edge: EdgeId, s: Rat },
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PointError {
    #[error("vertex {vertex} does not exist")]
    UnknownVertex { vertex: VertexId },
    #[error("edge {edge} does not exist")]
    UnknownEdge { edge: EdgeId },
    #[error("position {s} lies outside [0, {length}] on edge {edge}")]
    OutsideEdge { edge: EdgeId, s: Rat, length: Rat },
}

/// Polynomial `c0 + c1 s + c2 s^2` on one edge, `s` the distance from the
/// tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadPoly {
    pub c0: Rat,
    pub c1: Rat,
    pub c2: Rat,
}

impl QuadPoly {
    pub fn zero() -> Self {
        QuadPoly {
            c0: Rat::zero(),
            c1: Rat::zero(),
            c2: Rat::zero(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        QuadPoly {
            c0: c,
            c1: Rat::zero(),
            c2: Rat::zero(),
        }
    }

    /// The line through `(0, v0)` and `(len, v1)`.
    pub fn line_between(v0: &Rat, v1: &Rat, len: &Rat) -> Self {
        QuadPoly {
            c0: v0.clone(),
            c1: (v1 - v0) / len,
            c2: Rat::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero() && self.c2.is_zero()
    }

    pub fn eval(&self, s: &Rat) -> Rat {
        &self.c0 + s * (&self.c1 + s * &self.c2)
    }

    /// Derivative `c1 + 2 c2 s`.
    pub fn deriv(&self, s: &Rat) -> Rat {
        &self.c1 + s * &self.c2 * Rat::from_integer(2.into())
    }

    /// Exact integral over `[0, len]`.
    pub fn integral(&self, len: &Rat) -> Rat {
        let l2 = len * len;
        let l3 = &l2 * len;
        &self.c0 * len + &self.c1 * l2 / Rat::from_integer(2.into())
            + &self.c2 * l3 / Rat::from_integer(3.into())
    }

    /// Exact integral of the degree <= 4 product `self * other` over
    /// `[0, len]`.
    pub fn product_integral(&self, other: &QuadPoly, len: &Rat) -> Rat {
        let coeffs = [
            &self.c0 * &other.c0,
            &self.c0 * &other.c1 + &self.c1 * &other.c0,
            &self.c0 * &other.c2 + &self.c1 * &other.c1 + &self.c2 * &other.c0,
            &self.c1 * &other.c2 + &self.c2 * &other.c1,
            &self.c2 * &other.c2,
        ];
        let mut acc = Rat::zero();
        let mut power = len.clone();
        for (k, c) in coeffs.into_iter().enumerate() {
            acc += c * &power / Rat::from_integer(((k + 1) as i64).into());
            power *= len;
        }
        acc
    }

    pub fn plus(&self, other: &QuadPoly) -> QuadPoly {
        QuadPoly {
            c0: &self.c0 + &other.c0,
            c1: &self.c1 + &other.c1,
            c2: &self.c2 + &other.c2,
        }
    }

    pub fn scaled(&self, factor: &Rat) -> QuadPoly {
        QuadPoly {
            c0: &self.c0 * factor,
            c1: &self.c1 * factor,
            c2: &self.c2 * factor,
        }
    }
}

/// Continuous piecewise-quadratic function: one polynomial per edge plus the
/// vertex values. Construction asserts exact continuity at both ends of every
/// edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseQuadratic {
    vertex_values: Vec<Rat>,
    edge_polys: Vec<QuadPoly>,
}

impl PiecewiseQuadratic {
    pub fn new(
        graph: &MetrizedGraph,
        vertex_values: Vec<Rat>,
        edge_polys: Vec<QuadPoly>,
    ) -> Self {
        let model = graph.model();
        assert_eq!(vertex_values.len(), model.vertex_count());
        assert_eq!(edge_polys.len(), model.edges().len());
        for (e, poly) in model.edges().iter().zip(&edge_polys) {
            assert_eq!(
                poly.eval(&Rat::zero()),
                vertex_values[e.minus],
                "discontinuity at edge tail"
            );
            assert_eq!(
                poly.eval(&e.length),
                vertex_values[e.plus],
                "discontinuity at edge head"
            );
        }
        PiecewiseQuadratic {
            vertex_values,
            edge_polys,
        }
    }

    pub fn constant(graph: &MetrizedGraph, c: Rat) -> Self {
        let model = graph.model();
        PiecewiseQuadratic {
            vertex_values: vec![c.clone(); model.vertex_count()],
            edge_polys: vec![QuadPoly::constant(c); model.edges().len()],
        }
    }

    pub fn vertex_value(&self, v: VertexId) -> &Rat {
        &self.vertex_values[v]
    }

    pub fn poly(&self, e: EdgeId) -> &QuadPoly {
        &self.edge_polys[e]
    }

    pub fn value_at(&self, p: &Point) -> Rat {
        match p {
            Point::AtVertex(v) => self.vertex_values[*v].clone(),
            Point::OnEdge { edge, s } => self.edge_polys[*edge].eval(s),
        }
    }

    pub fn plus(&self, other: &PiecewiseQuadratic) -> PiecewiseQuadratic {
        PiecewiseQuadratic {
            vertex_values: self
                .vertex_values
                .iter()
                .zip(&other.vertex_values)
                .map(|(a, b)| a + b)
                .collect(),
            edge_polys: self
                .edge_polys
                .iter()
                .zip(&other.edge_polys)
                .map(|(a, b)| a.plus(b))
                .collect(),
        }
    }

    pub fn minus(&self, other: &PiecewiseQuadratic) -> PiecewiseQuadratic {
        self.plus(&other.scaled(&-Rat::one()))
    }

    pub fn scaled(&self, factor: &Rat) -> PiecewiseQuadratic {
        PiecewiseQuadratic {
            vertex_values: self.vertex_values.iter().map(|v| v * factor).collect(),
            edge_polys: self.edge_polys.iter().map(|p| p.scaled(factor)).collect(),
        }
    }

    pub fn shifted(&self, offset: &Rat) -> PiecewiseQuadratic {
        PiecewiseQuadratic {
            vertex_values: self.vertex_values.iter().map(|v| v + offset).collect(),
            edge_polys: self
                .edge_polys
                .iter()
                .map(|p| QuadPoly {
                    c0: &p.c0 + offset,
                    c1: p.c1.clone(),
                    c2: p.c2.clone(),
                })
                .collect(),
        }
    }
}

/// Measure with finitely many atoms and a degree <= 2 density per edge.
/// Atoms are kept in canonical form: points normalized, duplicates merged,
/// zero masses dropped, so equality is meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Current {
    atoms: BTreeMap<Point, Rat>,
    densities: Vec<QuadPoly>,
}

impl Current {
    pub fn zero(graph: &MetrizedGraph) -> Self {
        Current {
            atoms: BTreeMap::new(),
            densities: vec![QuadPoly::zero(); graph.model().edges().len()],
        }
    }

    pub fn new(graph: &MetrizedGraph, atoms: Vec<(Point, Rat)>, densities: Vec<QuadPoly>) -> Self {
        assert_eq!(densities.len(), graph.model().edges().len());
        let mut current = Current {
            atoms: BTreeMap::new(),
            densities,
        };
        for (p, mass) in atoms {
            current.add_atom(p, &mass);
        }
        current
    }

    pub fn dirac(graph: &MetrizedGraph, p: Point) -> Self {
        let mut current = Current::zero(graph);
        current.add_atom(p, &Rat::one());
        current
    }

    pub fn from_divisor(graph: &MetrizedGraph, d: &VertexDivisor) -> Self {
        let mut current = Current::zero(graph);
        for (v, c) in d.iter() {
            current.add_atom(Point::AtVertex(*v), c);
        }
        current
    }

    pub fn add_atom(&mut self, p: Point, mass: &Rat) {
        if mass.is_zero() {
            return;
        }
        let entry = self.atoms.entry(p).or_insert_with(Rat::zero);
        *entry += mass;
        if entry.is_zero() {
            let dead: Vec<Point> = self
                .atoms
                .iter()
                .filter(|(_, m)| m.is_zero())
                .map(|(p, _)| p.clone())
                .collect();
            for p in dead {
                self.atoms.remove(&p);
            }
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Point, &Rat)> {
        self.atoms.iter()
    }

    pub fn atom_at(&self, p: &Point) -> Rat {
        self.atoms.get(p).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn density(&self, e: EdgeId) -> &QuadPoly {
        &self.densities[e]
    }

    pub fn plus(&self, other: &Current) -> Current {
        assert_eq!(self.densities.len(), other.densities.len());
        let mut out = self.clone();
        for (p, mass) in other.atoms() {
            out.add_atom(p.clone(), mass);
        }
        for (d, o) in out.densities.iter_mut().zip(&other.densities) {
            *d = d.plus(o);
        }
        out
    }

    pub fn scaled(&self, factor: &Rat) -> Current {
        if factor.is_zero() {
            return Current {
                atoms: BTreeMap::new(),
                densities: vec![QuadPoly::zero(); self.densities.len()],
            };
        }
        Current {
            atoms: self
                .atoms
                .iter()
                .map(|(p, m)| (p.clone(), m * factor))
                .collect(),
            densities: self.densities.iter().map(|d| d.scaled(factor)).collect(),
        }
    }

    pub fn minus(&self, other: &Current) -> Current {
        self.plus(&other.scaled(&-Rat::one()))
    }

    /// Total mass: atoms plus the integrals of the densities.
    pub fn total_mass(&self, graph: &MetrizedGraph) -> Rat {
        let mut acc = self.atoms.values().fold(Rat::zero(), |a, m| a + m);
        for (e, d) in graph.model().edges().iter().zip(&self.densities) {
            acc += d.integral(&e.length);
        }
        acc
    }
}

/// Result of promoting points to vertices: where each requested point went,
/// and the new edge ids of each old edge's segments in tail-to-head order.
#[derive(Clone, Debug)]
pub struct SubdivisionMap {
    pub point_vertex: Vec<VertexId>,
    pub edge_segments: Vec<Vec<EdgeId>>,
}

/// The metric space of a weighted multigraph. Wraps the model and caches its
/// Green table; all point-level operations reduce to vertex operations after
/// subdivision.
#[derive(Debug)]
pub struct MetrizedGraph {
    model: WeightedMultigraph,
    green: OnceLock<GreenTable>,
}

impl Clone for MetrizedGraph {
    fn clone(&self) -> Self {
        MetrizedGraph {
            model: self.model.clone(),
            green: self.green.clone(),
        }
    }
}

impl PartialEq for MetrizedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.model == other.model
    }
}

impl Eq for MetrizedGraph {}

impl From<WeightedMultigraph> for MetrizedGraph {
    fn from(model: WeightedMultigraph) -> Self {
        MetrizedGraph::new(model)
    }
}

impl MetrizedGraph {
    pub fn new(model: WeightedMultigraph) -> Self {
        MetrizedGraph {
            model,
            green: OnceLock::new(),
        }
    }

    pub fn model(&self) -> &WeightedMultigraph {
        &self.model
    }

    /// Green table of the model, computed once on first use.
    pub fn green(&self) -> &GreenTable {
        self.green.get_or_init(|| GreenTable::new(&self.model))
    }

    /// Validated vertex position.
    pub fn point_at_vertex(&self, v: VertexId) -> Result<Point, PointError> {
        if v >= self.model.vertex_count() {
            return Err(PointError::UnknownVertex { vertex: v });
        }
        Ok(Point::AtVertex(v))
    }

    /// Validated, normalized position on an edge: `s = 0` and `s = l(e)`
    /// become the endpoint vertices.
    pub fn point_on_edge(&self, e: EdgeId, s: Rat) -> Result<Point, PointError> {
        let edge = match self.model.edges().get(e) {
            Some(edge) => edge,
            None => return Err(PointError::UnknownEdge { edge: e }),
        };
        if s.is_negative() || s > edge.length {
            return Err(PointError::OutsideEdge {
                edge: e,
                s,
                length: edge.length.clone(),
            });
        }
        if s.is_zero() {
            Ok(Point::AtVertex(edge.minus))
        } else if s == edge.length {
            Ok(Point::AtVertex(edge.plus))
        } else {
            Ok(Point::OnEdge { edge: e, s })
        }
    }

    fn assert_point(&self, p: &Point) {
        match p {
            Point::AtVertex(v) => assert!(*v < self.model.vertex_count(), "unknown vertex"),
            Point::OnEdge { edge, s } => {
                let e = &self.model.edges()[*edge];
                assert!(
                    s.is_positive() && *s < e.length,
                    "point not in the open edge"
                );
            }
        }
    }

    /// Isometric model with the given points promoted to vertices. Old vertex
    /// ids are unchanged; new vertices are appended in (edge, position)
    /// order; edges are renumbered in the order reported by the map.
    pub fn subdivide_at(&self, points: &[Point]) -> (MetrizedGraph, SubdivisionMap) {
        for p in points {
            self.assert_point(p);
        }
        let model = &self.model;
        let mut cuts: Vec<BTreeSet<Rat>> = vec![BTreeSet::new(); model.edges().len()];
        for p in points {
            if let Point::OnEdge { edge, s } = p {
                cuts[*edge].insert(s.clone());
            }
        }
        let mut next_vertex = model.vertex_count();
        let mut cut_vertex: BTreeMap<(EdgeId, Rat), VertexId> = BTreeMap::new();
        for (e, edge_cuts) in cuts.iter().enumerate() {
            for s in edge_cuts {
                cut_vertex.insert((e, s.clone()), next_vertex);
                next_vertex += 1;
            }
        }
        let mut edges = Vec::new();
        let mut edge_segments = vec![Vec::new(); model.edges().len()];
        for (e, edge) in model.edges().iter().enumerate() {
            if cuts[e].is_empty() {
                edge_segments[e].push(edges.len());
                edges.push(edge.clone());
                continue;
            }
            let mut prev_vertex = edge.minus;
            let mut prev_s = Rat::zero();
            for s in &cuts[e] {
                let v = cut_vertex[&(e, s.clone())];
                edge_segments[e].push(edges.len());
                edges.push(Edge {
                    minus: prev_vertex,
                    plus: v,
                    length: s - &prev_s,
                });
                prev_vertex = v;
                prev_s = s.clone();
            }
            edge_segments[e].push(edges.len());
            edges.push(Edge {
                minus: prev_vertex,
                plus: edge.plus,
                length: &edge.length - &prev_s,
            });
        }
        let refined = WeightedMultigraph::from_parts_unchecked(next_vertex, edges);
        let point_vertex = points
            .iter()
            .map(|p| match p {
                Point::AtVertex(v) => *v,
                Point::OnEdge { edge, s } => cut_vertex[&(*edge, s.clone())],
            })
            .collect();
        (
            MetrizedGraph::new(refined),
            SubdivisionMap {
                point_vertex,
                edge_segments,
            },
        )
    }

    /// Effective resistance between two points of the metric space.
    pub fn resistance(&self, x: &Point, y: &Point) -> Rat {
        let (refined, map) = self.subdivide_at(&[x.clone(), y.clone()]);
        refined
            .green()
            .resistance(map.point_vertex[0], map.point_vertex[1])
    }

    /// Resistance between the endpoints of `e` with the open edge removed;
    /// infinite exactly when `e` is a bridge.
    pub fn bridge_resistance(&self, e: EdgeId) -> ExtendedRational {
        let model = &self.model;
        let edge = &model.edges()[e];
        if edge.minus == edge.plus {
            return ExtendedRational::Finite(Rat::zero());
        }
        let mut uf = UnionFind::new(model.vertex_count());
        for (i, other) in model.edges().iter().enumerate() {
            if i != e {
                uf.union(other.minus, other.plus);
            }
        }
        if uf.find(edge.minus) != uf.find(edge.plus) {
            return ExtendedRational::Infinite;
        }
        // restrict to the component of the endpoints; other components are
        // irrelevant to the resistance
        let root = uf.find(edge.minus);
        let mut relabel: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for v in 0..model.vertex_count() {
            if uf.find(v) == root {
                let next = relabel.len();
                relabel.insert(v, next);
            }
        }
        let edges: Vec<Edge> = model
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, other)| *i != e && relabel.contains_key(&other.minus))
            .map(|(_, other)| Edge {
                minus: relabel[&other.minus],
                plus: relabel[&other.plus],
                length: other.length.clone(),
            })
            .collect();
        let component = WeightedMultigraph::from_parts_unchecked(relabel.len(), edges);
        ExtendedRational::Finite(
            GreenTable::new(&component).resistance(relabel[&edge.minus], relabel[&edge.plus]),
        )
    }

    /// Foster coefficient `F(e) = l(e)/(l(e) + r(e))`, evaluated as
    /// `1 - r(e-, e+)/l(e)` from the cached Green table; the two expressions
    /// agree by the parallel law. Zero exactly on bridges, one exactly on
    /// loops.
    pub fn foster_coefficient(&self, e: EdgeId) -> Rat {
        let edge = &self.model.edges()[e];
        Rat::one() - self.green().resistance(edge.minus, edge.plus) / &edge.length
    }

    /// The canonical measure: atoms `-(1/2)(valence(x) - 2)` and constant
    /// densities `F(e)/l(e)`. Total mass 1.
    pub fn canonical_measure(&self) -> Current {
        let model = &self.model;
        let half = Rat::new(1.into(), 2.into());
        let mut atoms = Vec::new();
        for (v, val) in model.valences().into_iter().enumerate() {
            let mass = -&half * Rat::from_integer((val as i64 - 2).into());
            atoms.push((Point::AtVertex(v), mass));
        }
        let densities = model
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| QuadPoly::constant(self.foster_coefficient(e) / &edge.length))
            .collect();
        Current::new(self, atoms, densities)
    }

    /// The function `y -> r(x, y)` for a vertex `x`. On an edge from `m` to
    /// `p` the restriction is
    /// `r(x,m)(l-s)/l + r(x,p) s/l + F(e) s (l-s)/l`.
    pub fn resistance_function(&self, x: VertexId) -> PiecewiseQuadratic {
        let model = &self.model;
        let table = self.green();
        let vertex_values: Vec<Rat> = (0..model.vertex_count())
            .map(|v| table.resistance(x, v))
            .collect();
        let edge_polys = model
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                let foster = self.foster_coefficient(e);
                let rm = &vertex_values[edge.minus];
                let rp = &vertex_values[edge.plus];
                QuadPoly {
                    c0: rm.clone(),
                    c1: (rp - rm) / &edge.length + &foster,
                    c2: -foster / &edge.length,
                }
            })
            .collect();
        PiecewiseQuadratic::new(self, vertex_values, edge_polys)
    }

    /// `resistance_function` based at an arbitrary point: the graph is first
    /// subdivided at `x`, and the function lives on the returned refinement.
    pub fn resistance_function_at(&self, x: &Point) -> (MetrizedGraph, VertexId, PiecewiseQuadratic) {
        let (refined, map) = self.subdivide_at(std::slice::from_ref(x));
        let base = map.point_vertex[0];
        let f = refined.resistance_function(base);
        (refined, base, f)
    }

    /// The Laplacian of a continuous piecewise-quadratic function: atom
    /// `-sum of outgoing one-sided derivatives` at each vertex and density
    /// `-f''` on each edge. Total mass is always zero.
    pub fn laplacian_of(&self, f: &PiecewiseQuadratic) -> Current {
        let model = &self.model;
        let mut atom_masses = vec![Rat::zero(); model.vertex_count()];
        let mut densities = Vec::with_capacity(model.edges().len());
        for (e, edge) in model.edges().iter().enumerate() {
            let poly = f.poly(e);
            atom_masses[edge.minus] -= poly.deriv(&Rat::zero());
            atom_masses[edge.plus] += poly.deriv(&edge.length);
            densities.push(QuadPoly::constant(
                -&poly.c2 * Rat::from_integer(2.into()),
            ));
        }
        let atoms = atom_masses
            .into_iter()
            .enumerate()
            .map(|(v, mass)| (Point::AtVertex(v), mass))
            .collect();
        Current::new(self, atoms, densities)
    }

    /// Exact integral of a piecewise-quadratic function against a current.
    /// Atoms at edge-interior points are evaluated through the edge
    /// polynomial of `f`.
    pub fn integrate(&self, f: &PiecewiseQuadratic, m: &Current) -> Rat {
        let mut acc = Rat::zero();
        for (p, mass) in m.atoms() {
            acc += mass * f.value_at(p);
        }
        for (e, edge) in self.model.edges().iter().enumerate() {
            acc += f.poly(e).product_integral(m.density(e), &edge.length);
        }
        acc
    }

    /// The tau invariant `(1/2) integral of r(x, .) against the canonical
    /// measure`, independent of the base point `x`.
    pub fn tau(&self) -> Rat {
        let mu = self.canonical_measure();
        let half = Rat::new(1.into(), 2.into());
        let tau = &half * self.integrate(&self.resistance_function(0), &mu);
        #[cfg(debug_assertions)]
        if self.model.vertex_count() > 1 {
            let other = &half * self.integrate(&self.resistance_function(1), &mu);
            debug_assert_eq!(tau, other, "tau must not depend on the base point");
        }
        tau
    }

    /// Contribution of edge `e` to `(1/2) integral of r(x, .)` against the
    /// continuous part of the canonical measure:
    /// `4 tau_cts(x, e) = F(e)(r(x,e-) + r(x,e+) + F(e) l(e)/3)`.
    /// For `x` interior to an edge the graph is subdivided at `x` first and
    /// the segment contributions are summed; the canonical measure's
    /// continuous part is invariant under subdivision, so the value is
    /// model-independent.
    pub fn tau_cts(&self, x: &Point, e: EdgeId) -> Rat {
        assert!(e < self.model.edges().len(), "unknown edge");
        self.assert_point(x);
        let (refined, map) = self.subdivide_at(std::slice::from_ref(x));
        let base = map.point_vertex[0];
        let table = refined.green();
        let quarter = Rat::new(1.into(), 4.into());
        let third = Rat::new(1.into(), 3.into());
        let mut acc = Rat::zero();
        for &seg in &map.edge_segments[e] {
            let edge = &refined.model().edges()[seg];
            let foster = refined.foster_coefficient(seg);
            let r_minus = table.resistance(base, edge.minus);
            let r_plus = table.resistance(base, edge.plus);
            acc += &quarter * &foster * (r_minus + r_plus + &foster * &edge.length * &third);
        }
        acc
    }

    /// `eta(e) = (1/3) F(e)^2 l(e)`. Tied to the model's vertex set: the same
    /// metric space presented with extra valence-two vertices has a different
    /// eta.
    pub fn eta_edge(&self, e: EdgeId) -> Rat {
        let edge = &self.model.edges()[e];
        let foster = self.foster_coefficient(e);
        &foster * &foster * &edge.length / Rat::from_integer(3.into())
    }

    /// `eta = sum of eta(e)` over the model's edges.
    pub fn eta(&self) -> Rat {
        (0..self.model.edges().len()).fold(Rat::zero(), |acc, e| acc + self.eta_edge(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::rational::rat;

    fn metr(g: WeightedMultigraph) -> MetrizedGraph {
        MetrizedGraph::new(g)
    }

    fn unit_loop() -> MetrizedGraph {
        metr(build_graph(1, vec![(0, 0, rat(1, 1))]).unwrap())
    }

    fn unit_bridge() -> MetrizedGraph {
        metr(build_graph(2, vec![(0, 1, rat(1, 1))]).unwrap())
    }

    fn banana() -> MetrizedGraph {
        metr(build_graph(2, vec![(0, 1, rat(1, 1)), (0, 1, rat(1, 1))]).unwrap())
    }

    #[test]
    fn point_normalization() {
        let g = unit_bridge();
        assert_eq!(g.point_on_edge(0, rat(0, 1)).unwrap(), Point::AtVertex(0));
        assert_eq!(g.point_on_edge(0, rat(1, 1)).unwrap(), Point::AtVertex(1));
        assert_eq!(
            g.point_on_edge(0, rat(1, 3)).unwrap(),
            Point::OnEdge {
                edge: 0,
                s: rat(1, 3)
            }
        );
        assert!(matches!(
            g.point_on_edge(0, rat(3, 2)),
            Err(PointError::OutsideEdge { .. })
        ));
        assert!(matches!(
            g.point_on_edge(7, rat(1, 2)),
            Err(PointError::UnknownEdge { .. })
        ));
    }

    #[test]
    fn subdivision_examples() {
        let (sub, map) = unit_loop().subdivide_at(&[Point::OnEdge {
            edge: 0,
            s: rat(1, 2),
        }]);
        assert_eq!(sub.model().vertex_count(), 2);
        assert_eq!(sub.model().edges().len(), 2);
        assert_eq!(map.point_vertex, vec![1]);
        assert_eq!(sub.model().edges()[0].length, rat(1, 2));
        assert_eq!(sub.model().edges()[1].length, rat(1, 2));

        let (same, _) = unit_bridge().subdivide_at(&[Point::AtVertex(1)]);
        assert_eq!(same.model(), unit_bridge().model());

        let (path, map) = unit_bridge().subdivide_at(&[Point::OnEdge {
            edge: 0,
            s: rat(1, 3),
        }]);
        assert_eq!(map.point_vertex, vec![2]);
        assert_eq!(path.model().edges()[0].length, rat(1, 3));
        assert_eq!(path.model().edges()[1].length, rat(2, 3));
    }

    #[test]
    fn resistance_on_circle() {
        let g = unit_loop();
        let v = Point::AtVertex(0);
        let p = |s: Rat| Point::OnEdge { edge: 0, s };
        // r(v, s) = s(1-s) on the unit circle
        assert_eq!(g.resistance(&v, &p(rat(1, 4))), rat(3, 16));
        assert_eq!(g.resistance(&v, &p(rat(1, 2))), rat(1, 4));
        assert!(g.resistance(&p(rat(1, 3)), &p(rat(1, 3))).is_zero());
        // circle of length 5, arc distance 2 from the vertex
        let c5 = metr(build_graph(1, vec![(0, 0, rat(5, 1))]).unwrap());
        assert_eq!(
            c5.resistance(&Point::AtVertex(0), &Point::OnEdge { edge: 0, s: rat(2, 1) }),
            rat(6, 5)
        );
    }

    #[test]
    fn bridge_resistance_examples() {
        assert_eq!(
            unit_loop().bridge_resistance(0),
            ExtendedRational::Finite(rat(0, 1))
        );
        assert!(unit_bridge().bridge_resistance(0).is_infinite());
        assert_eq!(
            banana().bridge_resistance(0),
            ExtendedRational::Finite(rat(1, 1))
        );
    }

    #[test]
    fn foster_examples() {
        assert_eq!(unit_loop().foster_coefficient(0), rat(1, 1));
        assert!(unit_bridge().foster_coefficient(0).is_zero());
        assert_eq!(banana().foster_coefficient(0), rat(1, 2));
    }

    #[test]
    fn canonical_measure_examples() {
        let one = rat(1, 1);
        let g = unit_loop();
        let mu = g.canonical_measure();
        assert!(mu.atom_at(&Point::AtVertex(0)).is_zero());
        assert_eq!(*mu.density(0), QuadPoly::constant(one.clone()));
        assert_eq!(mu.total_mass(&g), one);

        let g = unit_bridge();
        let mu = g.canonical_measure();
        assert_eq!(mu.atom_at(&Point::AtVertex(0)), rat(1, 2));
        assert_eq!(mu.atom_at(&Point::AtVertex(1)), rat(1, 2));
        assert!(mu.density(0).is_zero());
        assert_eq!(mu.total_mass(&g), one);

        let g = banana();
        let mu = g.canonical_measure();
        assert!(mu.atom_at(&Point::AtVertex(0)).is_zero());
        assert_eq!(*mu.density(0), QuadPoly::constant(rat(1, 2)));
        assert_eq!(mu.total_mass(&g), one);
    }

    #[test]
    fn resistance_function_examples() {
        let g = unit_loop();
        let f = g.resistance_function(0);
        // s(1 - s) on the loop
        assert_eq!(
            *f.poly(0),
            QuadPoly {
                c0: rat(0, 1),
                c1: rat(1, 1),
                c2: rat(-1, 1)
            }
        );
        let g = unit_bridge();
        let f = g.resistance_function(0);
        assert_eq!(
            *f.poly(0),
            QuadPoly {
                c0: rat(0, 1),
                c1: rat(1, 1),
                c2: rat(0, 1)
            }
        );
        assert_eq!(*f.vertex_value(1), rat(1, 1));
    }

    #[test]
    fn resistance_function_matches_pointwise_resistance() {
        let g = metr(
            build_graph(
                3,
                vec![
                    (0, 1, rat(1, 2)),
                    (1, 2, rat(3, 1)),
                    (2, 0, rat(5, 4)),
                    (1, 1, rat(2, 1)),
                ],
            )
            .unwrap(),
        );
        let f = g.resistance_function(2);
        for e in 0..4 {
            let len = g.model().edges()[e].length.clone();
            for k in 1..4 {
                let s = &len * rat(k, 4);
                let p = g.point_on_edge(e, s.clone()).unwrap();
                assert_eq!(f.poly(e).eval(&s), g.resistance(&Point::AtVertex(2), &p));
            }
        }
    }

    #[test]
    fn laplacian_of_examples() {
        let g = unit_loop();
        let constant = PiecewiseQuadratic::constant(&g, rat(7, 3));
        assert_eq!(g.laplacian_of(&constant), Current::zero(&g));

        // f = r(v, .)/2 = s(1-s)/2: atom -1 at the vertex, density +1
        let f = g.resistance_function(0).scaled(&rat(1, 2));
        let lap = g.laplacian_of(&f);
        assert_eq!(lap.atom_at(&Point::AtVertex(0)), rat(-1, 1));
        assert_eq!(*lap.density(0), QuadPoly::constant(rat(1, 1)));
        assert!(lap.total_mass(&g).is_zero());

        // linear function of slope 1 on a bridge
        let g = unit_bridge();
        let f = PiecewiseQuadratic::new(
            &g,
            vec![rat(0, 1), rat(1, 1)],
            vec![QuadPoly {
                c0: rat(0, 1),
                c1: rat(1, 1),
                c2: rat(0, 1),
            }],
        );
        let lap = g.laplacian_of(&f);
        assert_eq!(lap.atom_at(&Point::AtVertex(0)), rat(-1, 1));
        assert_eq!(lap.atom_at(&Point::AtVertex(1)), rat(1, 1));
        assert!(lap.density(0).is_zero());
    }

    #[test]
    fn integrate_examples() {
        let g = unit_loop();
        let one = PiecewiseQuadratic::constant(&g, rat(1, 1));
        assert_eq!(g.integrate(&one, &g.canonical_measure()), rat(1, 1));
        let zero = PiecewiseQuadratic::constant(&g, rat(0, 1));
        assert!(g.integrate(&zero, &g.canonical_measure()).is_zero());
        // s(1-s) against density 1
        let f = g.resistance_function(0);
        let lebesgue = Current::new(&g, vec![], vec![QuadPoly::constant(rat(1, 1))]);
        assert_eq!(g.integrate(&f, &lebesgue), rat(1, 6));
    }

    #[test]
    fn tau_examples() {
        // circle of length 5: tau = 5/12
        let c5 = metr(build_graph(1, vec![(0, 0, rat(5, 1))]).unwrap());
        assert_eq!(c5.tau(), rat(5, 12));
        // bridge of length 3: tau = 3/4
        let b3 = metr(build_graph(2, vec![(0, 1, rat(3, 1))]).unwrap());
        assert_eq!(b3.tau(), rat(3, 4));
        // banana: same metric space as the circle of length 2
        assert_eq!(banana().tau(), rat(1, 6));
    }

    #[test]
    fn tau_cts_examples() {
        let g = unit_bridge();
        assert!(g.tau_cts(&Point::AtVertex(0), 0).is_zero());
        let g = unit_loop();
        assert_eq!(g.tau_cts(&Point::AtVertex(0), 0), rat(1, 12));
        let g = banana();
        assert_eq!(g.tau_cts(&Point::AtVertex(0), 0), rat(1, 12));
    }

    #[test]
    fn eta_examples() {
        assert_eq!(unit_loop().eta(), rat(1, 3));
        assert!(unit_bridge().eta().is_zero());
        assert_eq!(banana().eta(), rat(1, 6));
        let tree = metr(build_graph(3, vec![(0, 1, rat(2, 1)), (1, 2, rat(7, 2))]).unwrap());
        assert!(tree.eta().is_zero());
    }

    #[test]
    fn tau_invariant_under_subdivision() {
        let g = metr(
            build_graph(
                3,
                vec![(0, 1, rat(1, 2)), (1, 2, rat(3, 1)), (2, 0, rat(5, 4))],
            )
            .unwrap(),
        );
        let (sub, _) = g.subdivide_at(&[
            Point::OnEdge {
                edge: 1,
                s: rat(1, 3),
            },
            Point::OnEdge {
                edge: 2,
                s: rat(1, 1),
            },
        ]);
        assert_eq!(g.tau(), sub.tau());
        assert_eq!(g.canonical_measure().total_mass(&g), rat(1, 1));
        assert_eq!(sub.canonical_measure().total_mass(&sub), rat(1, 1));
    }
}
