//! Admissible layer: a metrized graph polarized by an integer divisor of
//! degree `2h - 2`, Zhang's admissible measure, the admissible Green's
//! function, the constant `c`, and the epsilon invariant.
//!
//! The Green's function is the unique solution of
//! `Laplacian_y g(x, y) = dirac_x - mu` with `integral of g(x, .) against mu`
//! zero. It is evaluated through the resistance form
//!
//! `g(x,y) = -r(x,y)/2 + phi(x)/2 + phi(y)/2 - (double integral of r)/2`
//!
//! with `phi(z)` the integral of `r(z, .)` against `mu`. The form is a
//! reconstruction from the two defining properties; both are verified
//! exactly by the identity suite and the property tests, which makes the
//! choice self-certifying.

use std::sync::OnceLock;

use num::{One, Zero};
use thiserror::Error;

use crate::graph::{VertexDivisor, VertexId};
use crate::metrized::{Current, MetrizedGraph, PiecewiseQuadratic, Point, SubdivisionMap};
use crate::rational::Rat;

/// Metrized graph together with an integer divisor `K` of degree `2h - 2`
/// and the genus `h >= 1`. Models the dual graph of a semistable curve,
/// where `K(x) = valence(x) - 2 + 2 genus(x)`.
#[derive(Debug)]
pub struct PolarizedMetrizedGraph {
    graph: MetrizedGraph,
    canonical: VertexDivisor,
    genus: i64,
    tau_cache: OnceLock<Rat>,
    phi_cache: OnceLock<PiecewiseQuadratic>,
    double_integral_cache: OnceLock<Rat>,
}

impl Clone for PolarizedMetrizedGraph {
    fn clone(&self) -> Self {
        PolarizedMetrizedGraph {
            graph: self.graph.clone(),
            canonical: self.canonical.clone(),
            genus: self.genus,
            tau_cache: self.tau_cache.clone(),
            phi_cache: self.phi_cache.clone(),
            double_integral_cache: self.double_integral_cache.clone(),
        }
    }
}

impl PartialEq for PolarizedMetrizedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph && self.canonical == other.canonical && self.genus == other.genus
    }
}

impl Eq for PolarizedMetrizedGraph {}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PolarizationError {
    #[error("genus must be at least 1, got {genus}")]
    GenusTooSmall { genus: i64 },
    #[error("polarization divisor must have integer coefficients")]
    NonIntegralDivisor,
    #[error("polarization divisor references undeclared vertex {vertex}")]
    UnknownVertex { vertex: VertexId },
    #[error("polarization divisor has degree {degree}, genus {genus} requires {required}")]
    DegreeMismatch {
        degree: Rat,
        genus: i64,
        required: i64,
    },
}

/// Zhang's admissible measure `(1/2h)(dirac_K + 2 mu_can)`, a probability
/// measure on the metric space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleMeasure {
    current: Current,
}

impl AdmissibleMeasure {
    pub fn current(&self) -> &Current {
        &self.current
    }

    pub fn into_current(self) -> Current {
        self.current
    }
}

impl PolarizedMetrizedGraph {
    pub fn new(
        graph: MetrizedGraph,
        canonical: VertexDivisor,
        genus: i64,
    ) -> Result<Self, PolarizationError> {
        if genus < 1 {
            return Err(PolarizationError::GenusTooSmall { genus });
        }
        if !canonical.is_integral() {
            return Err(PolarizationError::NonIntegralDivisor);
        }
        for (v, _) in canonical.iter() {
            if *v >= graph.model().vertex_count() {
                return Err(PolarizationError::UnknownVertex { vertex: *v });
            }
        }
        let required = 2 * genus - 2;
        let degree = canonical.degree();
        if degree != Rat::from_integer(required.into()) {
            return Err(PolarizationError::DegreeMismatch {
                degree,
                genus,
                required,
            });
        }
        Ok(PolarizedMetrizedGraph {
            graph,
            canonical,
            genus,
            tau_cache: OnceLock::new(),
            phi_cache: OnceLock::new(),
            double_integral_cache: OnceLock::new(),
        })
    }

    pub fn graph(&self) -> &MetrizedGraph {
        &self.graph
    }

    pub fn canonical_divisor(&self) -> &VertexDivisor {
        &self.canonical
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    fn genus_rat(&self) -> Rat {
        Rat::from_integer(self.genus.into())
    }

    /// Tau invariant of the underlying metric space, cached.
    pub fn tau(&self) -> Rat {
        self.tau_cache.get_or_init(|| self.graph.tau()).clone()
    }

    /// The admissible measure `(1/2h)(dirac_K + 2 mu_can)`; total mass 1.
    pub fn admissible_measure(&self) -> AdmissibleMeasure {
        let two_h = self.genus_rat() * Rat::from_integer(2.into());
        let current = Current::from_divisor(&self.graph, &self.canonical)
            .plus(&self.graph.canonical_measure().scaled(&Rat::from_integer(2.into())))
            .scaled(&two_h.recip());
        debug_assert!(current.total_mass(&self.graph).is_one());
        AdmissibleMeasure { current }
    }

    /// The function `z -> integral of r(z, .) against mu`, which equals
    /// `(r(z, K) + 4 tau)/2h`. Piecewise quadratic; cached.
    fn phi(&self) -> &PiecewiseQuadratic {
        self.phi_cache.get_or_init(|| {
            let four_tau = self.tau() * Rat::from_integer(4.into());
            let mut acc = PiecewiseQuadratic::constant(&self.graph, four_tau);
            for (v, c) in self.canonical.iter() {
                acc = acc.plus(&self.graph.resistance_function(*v).scaled(c));
            }
            let half_h_inv = (self.genus_rat() * Rat::from_integer(2.into())).recip();
            acc.scaled(&half_h_inv)
        })
    }

    /// The double integral of `r` against `mu (x) mu`, cached.
    fn double_integral(&self) -> Rat {
        self.double_integral_cache
            .get_or_init(|| {
                self.graph
                    .integrate(self.phi(), self.admissible_measure().current())
            })
            .clone()
    }

    /// Admissible Green's function between two vertices of the model.
    pub fn green_vertex(&self, x: VertexId, y: VertexId) -> Rat {
        let half = Rat::new(1.into(), 2.into());
        let phi = self.phi();
        (phi.vertex_value(x) + phi.vertex_value(y)
            - self.graph.green().resistance(x, y)
            - self.double_integral())
            * half
    }

    /// Bilinear extension of the Green's function to vertex divisors.
    pub fn green_bilinear_divisors(&self, d: &VertexDivisor, e: &VertexDivisor) -> Rat {
        let mut acc = Rat::zero();
        for (x, dx) in d.iter() {
            for (y, ey) in e.iter() {
                acc += dx * ey * self.green_vertex(*x, *y);
            }
        }
        acc
    }

    /// Admissible Green's function between two arbitrary points, evaluated
    /// on the refinement at `x` and `y`. Symmetric; invariant under any
    /// further subdivision.
    pub fn green_admissible(&self, x: &Point, y: &Point) -> Rat {
        match (x, y) {
            (Point::AtVertex(a), Point::AtVertex(b)) => self.green_vertex(*a, *b),
            _ => {
                let (refined, map) = self.subdivide_at(&[x.clone(), y.clone()]);
                refined.green_vertex(map.point_vertex[0], map.point_vertex[1])
            }
        }
    }

    /// The function `y -> g(x, y)` for a vertex `x`: the resistance form
    /// assembled as a piecewise quadratic. Its Laplacian is
    /// `dirac_x - mu` and its integral against `mu` is zero, both exactly.
    pub fn green_function(&self, x: VertexId) -> PiecewiseQuadratic {
        let half = Rat::new(1.into(), 2.into());
        let phi = self.phi();
        let offset = (phi.vertex_value(x) - self.double_integral()) * &half;
        self.graph
            .resistance_function(x)
            .scaled(&-&half)
            .plus(&phi.scaled(&half))
            .shifted(&offset)
    }

    /// The function `y -> g(D, y)` for a vertex divisor `D`, extended
    /// linearly from `green_function`.
    pub fn green_function_divisor(&self, d: &VertexDivisor) -> PiecewiseQuadratic {
        let mut acc = PiecewiseQuadratic::constant(&self.graph, Rat::zero());
        for (v, c) in d.iter() {
            acc = acc.plus(&self.green_function(*v).scaled(c));
        }
        acc
    }

    /// `green_function` based at an arbitrary point: the polarized graph is
    /// first refined at `x`, and the function lives on the returned
    /// refinement.
    pub fn green_function_at(
        &self,
        x: &Point,
    ) -> (PolarizedMetrizedGraph, VertexId, PiecewiseQuadratic) {
        let (refined, map) = self.subdivide_at(std::slice::from_ref(x));
        let base = map.point_vertex[0];
        let f = refined.green_function(base);
        (refined, base, f)
    }

    /// The function `y -> g(y, y)`, the diagonal of the Green's function:
    /// `phi - (double integral)/2`.
    pub fn green_diagonal(&self) -> PiecewiseQuadratic {
        let half = Rat::new(1.into(), 2.into());
        self.phi().shifted(&-(self.double_integral() * half))
    }

    /// The constant `c` with `c + g(x,x) + g(K,x) = 0` for every point `x`.
    pub fn c_constant(&self) -> Rat {
        let c = self.c_constant_at(0);
        #[cfg(debug_assertions)]
        if self.graph.model().vertex_count() > 1 {
            debug_assert_eq!(
                c,
                self.c_constant_at(1),
                "c must not depend on the base point"
            );
        }
        c
    }

    fn c_constant_at(&self, x: VertexId) -> Rat {
        -self.green_vertex(x, x) - self.green_bilinear_divisors(&self.canonical, &VertexDivisor::point(x))
    }

    /// The epsilon invariant, evaluated as
    /// `4(h-1)(g(x,x) + g(K,x)) - g(K,K)` at the first vertex. Agrees with
    /// [`Self::epsilon_integral`] and [`Self::epsilon_mori`] exactly.
    pub fn epsilon(&self) -> Rat {
        let x = VertexDivisor::point(0);
        let four_h_minus_4 = Rat::from_integer((4 * (self.genus - 1)).into());
        four_h_minus_4
            * (self.green_vertex(0, 0) + self.green_bilinear_divisors(&self.canonical, &x))
            - self.green_bilinear_divisors(&self.canonical, &self.canonical)
    }

    /// Epsilon by its defining integral:
    /// `integral of g(y,y) against (2h-2) mu + dirac_K`.
    pub fn epsilon_integral(&self) -> Rat {
        let weight = self
            .admissible_measure()
            .current()
            .scaled(&Rat::from_integer((2 * self.genus - 2).into()))
            .plus(&Current::from_divisor(&self.graph, &self.canonical));
        self.graph.integrate(&self.green_diagonal(), &weight)
    }

    /// Epsilon through the Green's function against `K` alone:
    /// `2h g(x, K) + r(x, K)` at the first vertex.
    pub fn epsilon_mori(&self) -> Rat {
        let x = VertexDivisor::point(0);
        let table = self.graph.green();
        let r_x_k = self
            .canonical
            .iter()
            .fold(Rat::zero(), |acc, (v, c)| acc + c * table.resistance(0, *v));
        self.genus_rat() * Rat::from_integer(2.into())
            * self.green_bilinear_divisors(&x, &self.canonical)
            + r_x_k
    }

    /// Refinement with the given points promoted to vertices. The
    /// polarization is unchanged: old vertex ids are stable and new vertices
    /// carry no polarization mass.
    pub fn subdivide_at(&self, points: &[Point]) -> (PolarizedMetrizedGraph, SubdivisionMap) {
        let (refined, map) = self.graph.subdivide_at(points);
        let polarized = PolarizedMetrizedGraph::new(refined, self.canonical.clone(), self.genus)
            .expect("subdivision preserves the polarization invariants");
        (polarized, map)
    }

    /// Same polarization on the graph with every length multiplied by
    /// `factor > 0`.
    pub fn scale_lengths(&self, factor: &Rat) -> PolarizedMetrizedGraph {
        PolarizedMetrizedGraph::new(
            MetrizedGraph::new(self.graph.model().scale_lengths(factor)),
            self.canonical.clone(),
            self.genus,
        )
        .expect("scaling preserves the polarization invariants")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::rational::rat;
    use num::Signed;

    fn polarized(
        vertex_count: usize,
        edges: Vec<(usize, usize, Rat)>,
        k: Vec<(usize, i64)>,
        genus: i64,
    ) -> PolarizedMetrizedGraph {
        let graph = MetrizedGraph::new(build_graph(vertex_count, edges).unwrap());
        let canonical =
            VertexDivisor::from_pairs(k.into_iter().map(|(v, c)| (v, rat(c, 1))));
        PolarizedMetrizedGraph::new(graph, canonical, genus).unwrap()
    }

    /// Unit loop with trivial polarization: genus 1, K = 0.
    fn loop_genus_one() -> PolarizedMetrizedGraph {
        polarized(1, vec![(0, 0, rat(1, 1))], vec![], 1)
    }

    /// Unit loop on a component of geometric genus `h - 1`: K = (2h-2) v.
    fn loop_genus(h: i64) -> PolarizedMetrizedGraph {
        polarized(1, vec![(0, 0, rat(1, 1))], vec![(0, 2 * h - 2)], h)
    }

    /// Unit bridge between components of geometric genera `i` and `h - i`.
    fn bridge_genera(i: i64, h: i64) -> PolarizedMetrizedGraph {
        polarized(
            2,
            vec![(0, 1, rat(1, 1))],
            vec![(0, 2 * i - 1), (1, 2 * (h - i) - 1)],
            h,
        )
    }

    #[test]
    fn construction_validates() {
        let graph = || MetrizedGraph::new(build_graph(1, vec![(0, 0, rat(1, 1))]).unwrap());
        assert!(matches!(
            PolarizedMetrizedGraph::new(graph(), VertexDivisor::zero(), 0),
            Err(PolarizationError::GenusTooSmall { .. })
        ));
        assert!(matches!(
            PolarizedMetrizedGraph::new(
                graph(),
                VertexDivisor::from_pairs([(0, rat(1, 2))]),
                1
            ),
            Err(PolarizationError::NonIntegralDivisor)
        ));
        assert!(matches!(
            PolarizedMetrizedGraph::new(graph(), VertexDivisor::point(0), 1),
            Err(PolarizationError::DegreeMismatch { .. })
        ));
        assert!(matches!(
            PolarizedMetrizedGraph::new(
                graph(),
                VertexDivisor::from_pairs([(5, rat(1, 1)), (0, rat(-1, 1))]),
                1
            ),
            Err(PolarizationError::UnknownVertex { vertex: 5 })
        ));
    }

    #[test]
    fn admissible_measure_examples() {
        // genus one: mu = mu_can
        let p = loop_genus_one();
        let mu = p.admissible_measure();
        assert_eq!(*mu.current(), p.graph().canonical_measure());

        // bridge with genera (1,1): mass 1/2 at each vertex
        let p = bridge_genera(1, 2);
        let mu = p.admissible_measure();
        assert_eq!(mu.current().atom_at(&Point::AtVertex(0)), rat(1, 2));
        assert_eq!(mu.current().atom_at(&Point::AtVertex(1)), rat(1, 2));
        assert_eq!(mu.current().total_mass(p.graph()), rat(1, 1));

        // loop with vertex genus q: atom q/(q+1), density 1/(q+1)
        let p = loop_genus(3);
        let mu = p.admissible_measure();
        assert_eq!(mu.current().atom_at(&Point::AtVertex(0)), rat(2, 3));
        assert_eq!(
            *mu.current().density(0),
            crate::metrized::QuadPoly::constant(rat(1, 3))
        );
        assert_eq!(mu.current().total_mass(p.graph()), rat(1, 1));
    }

    #[test]
    fn green_examples_genus_one_loop() {
        let p = loop_genus_one();
        assert_eq!(p.green_vertex(0, 0), rat(1, 12));
        // g at arc distance d from the vertex: 1/12 - d(1-d)/2
        let q = Point::OnEdge {
            edge: 0,
            s: rat(1, 2),
        };
        assert_eq!(
            p.green_admissible(&Point::AtVertex(0), &q),
            rat(1, 12) - rat(1, 8)
        );
        let q = Point::OnEdge {
            edge: 0,
            s: rat(1, 4),
        };
        assert_eq!(
            p.green_admissible(&Point::AtVertex(0), &q),
            rat(1, 12) - rat(3, 32)
        );
    }

    #[test]
    fn green_examples_bridge() {
        // two components of genera (i, h-i): g(a,a) = (h-i)^2/h^2,
        // g(a,b) = -i(h-i)/h^2
        for h in 2..=5i64 {
            for i in 1..h {
                let p = bridge_genera(i, h);
                assert_eq!(p.green_vertex(0, 0), rat((h - i) * (h - i), h * h));
                assert_eq!(p.green_vertex(0, 1), rat(-i * (h - i), h * h));
                assert_eq!(p.green_vertex(1, 1), rat(i * i, h * h));
            }
        }
    }

    #[test]
    fn green_examples_loop_higher_genus() {
        // loop with K = (2h-2) at the vertex: g(v,v) = 1/(12 h^2)
        for h in 1..=6i64 {
            let p = loop_genus(h);
            assert_eq!(p.green_vertex(0, 0), rat(1, 12 * h * h));
        }
    }

    #[test]
    fn green_function_defining_properties() {
        let p = polarized(
            3,
            vec![
                (0, 1, rat(1, 2)),
                (1, 2, rat(3, 1)),
                (2, 0, rat(5, 4)),
                (0, 0, rat(2, 1)),
            ],
            vec![(0, 2), (1, 1), (2, 1)],
            3,
        );
        let mu = p.admissible_measure();
        for x in 0..3 {
            let g = p.green_function(x);
            // Laplacian of g(x, .) is dirac_x - mu
            let expected = Current::dirac(p.graph(), Point::AtVertex(x)).minus(mu.current());
            assert_eq!(p.graph().laplacian_of(&g), expected);
            // normalization: integral of g(x, .) against mu vanishes
            assert!(p.graph().integrate(&g, mu.current()).is_zero());
        }
    }

    #[test]
    fn green_symmetric_at_interior_points() {
        let p = polarized(
            2,
            vec![(0, 1, rat(2, 1)), (0, 1, rat(3, 1))],
            vec![(0, 1), (1, 1)],
            2,
        );
        let x = Point::OnEdge {
            edge: 0,
            s: rat(1, 3),
        };
        let y = Point::OnEdge {
            edge: 1,
            s: rat(5, 2),
        };
        assert_eq!(p.green_admissible(&x, &y), p.green_admissible(&y, &x));
        assert_eq!(
            p.green_admissible(&x, &Point::AtVertex(1)),
            p.green_admissible(&Point::AtVertex(1), &x)
        );
    }

    #[test]
    fn c_constant_examples() {
        assert_eq!(loop_genus_one().c_constant(), rat(-1, 12));
        // c + g(x,x) + g(K,x) = 0 at interior points as well
        let p = bridge_genera(1, 2);
        let c = p.c_constant();
        for k in 1..4 {
            let x = Point::OnEdge {
                edge: 0,
                s: rat(k, 4),
            };
            let (refined, map) = p.subdivide_at(std::slice::from_ref(&x));
            let v = map.point_vertex[0];
            let g_xx = refined.green_vertex(v, v);
            let g_kx = refined
                .green_bilinear_divisors(refined.canonical_divisor(), &VertexDivisor::point(v));
            assert!((c.clone() + g_xx + g_kx).is_zero());
        }
    }

    #[test]
    fn epsilon_closed_forms() {
        // one loop, vertex genus h-1: epsilon = (h-1)/3h
        for h in 1..=10i64 {
            let p = loop_genus(h);
            assert_eq!(p.epsilon(), rat(h - 1, 3 * h));
        }
        // one bridge, genera (i, h-i): epsilon = -1 + 4i(h-i)/h
        for h in 2..=10i64 {
            for i in 1..h {
                let p = bridge_genera(i, h);
                assert_eq!(p.epsilon(), rat(-h + 4 * i * (h - i), h));
            }
        }
        // genus one: epsilon = 0
        assert!(loop_genus_one().epsilon().is_zero());
    }

    #[test]
    fn epsilon_routes_agree() {
        let p = polarized(
            3,
            vec![
                (0, 1, rat(1, 2)),
                (1, 2, rat(3, 1)),
                (2, 0, rat(5, 4)),
                (1, 1, rat(7, 3)),
            ],
            vec![(0, 1), (1, 3)],
            3,
        );
        let eps = p.epsilon();
        assert_eq!(eps, p.epsilon_integral());
        assert_eq!(eps, p.epsilon_mori());
        assert!(eps.is_positive());
    }

    #[test]
    fn epsilon_scales_with_lengths() {
        let p = bridge_genera(2, 3);
        let scaled = p.scale_lengths(&rat(7, 2));
        assert_eq!(scaled.epsilon(), p.epsilon() * rat(7, 2));
    }

    #[test]
    fn point_graph_is_degenerate_but_valid() {
        let p = polarized(1, vec![], vec![(0, 4)], 3);
        assert!(p.epsilon().is_zero());
        assert!(p.epsilon_integral().is_zero());
        assert!(p.epsilon_mori().is_zero());
        assert!(p.tau().is_zero());
        assert!(p.green_vertex(0, 0).is_zero());
        assert!(p.c_constant().is_zero());
        assert_eq!(
            p.admissible_measure().current().atom_at(&Point::AtVertex(0)),
            rat(1, 1)
        );
    }
}
