//! Degeneration layer: from the combinatorial description of a semistable
//! special fiber to its polarized dual graph, the exact leading coefficients
//! of the delta-invariant, Arakelov metric and Arakelov-Green's asymptotics,
//! and the boundary coefficients of the extended Deligne pairings.
//!
//! A fiber is described by its irreducible components (with geometric
//! genera), its nodes (with local multiplicities), and named sections. The
//! dual graph has one vertex per component and one edge of length equal to
//! the multiplicity per node; the polarization is
//! `K(x) = valence(x) - 2 + 2 genus(x)` and the total genus is
//! `h = betti + sum of genera`.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::admissible::PolarizedMetrizedGraph;
use crate::graph::{build_graph, GraphError, GreenTable, VertexDivisor, VertexId};
use crate::metrized::{Current, MetrizedGraph, Point, QuadPoly};
use crate::rational::Rat;

/// Node joining two components (which coincide for a self-node), with the
/// local multiplicity of the smoothing parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub a: usize,
    pub b: usize,
    pub multiplicity: u32,
}

/// Combinatorial description of a nodal special fiber: geometric genus per
/// component, nodes, and named sections pointing at the component their
/// smooth locus meets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalFiberSpec {
    pub genera: Vec<u32>,
    pub nodes: Vec<Node>,
    pub sections: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FiberError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("node {node} references undeclared component {component}")]
    UnknownComponent { node: usize, component: usize },
    #[error("node {node} has multiplicity 0")]
    ZeroMultiplicity { node: usize },
    #[error("component {component} is a genus-0 component meeting the rest of the fiber only {valence} time(s); not semistable")]
    NonSemistable { component: usize, valence: usize },
    #[error("fiber has total genus 0")]
    GenusZero,
    #[error("section {name:?} is not declared")]
    MissingSection { name: String },
    #[error("section {name:?} targets undeclared component {component}")]
    DanglingSection { name: String, component: usize },
    #[error("the two sections must be distinct, both are {name:?}")]
    CoincidentSections { name: String },
    #[error("node {node} does not exist")]
    UnknownNode { node: usize },
    #[error("component {vertex} does not exist")]
    UnknownVertex { vertex: usize },
    #[error("split lengths must be positive")]
    NonPositiveSplit,
}

impl NodalFiberSpec {
    fn validate(&self) -> Result<(), FiberError> {
        for (i, node) in self.nodes.iter().enumerate() {
            for c in [node.a, node.b] {
                if c >= self.genera.len() {
                    return Err(FiberError::UnknownComponent { node: i, component: c });
                }
            }
            if node.multiplicity == 0 {
                return Err(FiberError::ZeroMultiplicity { node: i });
            }
        }
        for (name, target) in &self.sections {
            if *target >= self.genera.len() {
                return Err(FiberError::DanglingSection {
                    name: name.clone(),
                    component: *target,
                });
            }
        }
        Ok(())
    }

    fn section(&self, name: &str) -> Result<VertexId, FiberError> {
        self.sections
            .get(name)
            .copied()
            .ok_or_else(|| FiberError::MissingSection {
                name: name.to_string(),
            })
    }
}

/// The polarized dual graph: one vertex per component, one edge of length
/// `multiplicity` per node, `K(x) = valence(x) - 2 + 2 genus(x)`, total
/// genus `h = betti + sum of genera`. Rejects fibers with `K(x) < 0` (not
/// semistable) and fibers of total genus 0.
pub fn polarized_graph_of(fiber: &NodalFiberSpec) -> Result<PolarizedMetrizedGraph, FiberError> {
    fiber.validate()?;
    let edges = fiber
        .nodes
        .iter()
        .map(|n| (n.a, n.b, Rat::from_integer(i64::from(n.multiplicity).into())))
        .collect();
    let model = build_graph(fiber.genera.len(), edges)?;
    let genus_sum: i64 = fiber.genera.iter().map(|q| i64::from(*q)).sum();
    let total_genus = model.betti_number() as i64 + genus_sum;
    if total_genus == 0 {
        return Err(FiberError::GenusZero);
    }
    let valences = model.valences();
    let mut canonical = VertexDivisor::zero();
    for (v, q) in fiber.genera.iter().enumerate() {
        let k = valences[v] as i64 - 2 + 2 * i64::from(*q);
        if k < 0 {
            return Err(FiberError::NonSemistable {
                component: v,
                valence: valences[v],
            });
        }
        canonical.add_at(v, &Rat::from_integer(k.into()));
    }
    Ok(
        PolarizedMetrizedGraph::new(MetrizedGraph::new(model), canonical, total_genus)
            .expect("dual graph polarization is admissible by construction"),
    )
}

/// Replaces every node of multiplicity `n > 1` by a chain of `n - 1` new
/// genus-0 components joined by `n` nodes of multiplicity 1. The dual graphs
/// before and after are isometric, so every metric invariant is unchanged.
/// Fibers with unit multiplicities come back as given.
pub fn desingularize(fiber: &NodalFiberSpec) -> NodalFiberSpec {
    let mut genera = fiber.genera.clone();
    let mut nodes = Vec::new();
    for node in &fiber.nodes {
        if node.multiplicity == 1 {
            nodes.push(node.clone());
            continue;
        }
        let mut previous = node.a;
        for _ in 1..node.multiplicity {
            let fresh = genera.len();
            genera.push(0);
            nodes.push(Node {
                a: previous,
                b: fresh,
                multiplicity: 1,
            });
            previous = fresh;
        }
        nodes.push(Node {
            a: previous,
            b: node.b,
            multiplicity: 1,
        });
    }
    NodalFiberSpec {
        genera,
        nodes,
        sections: fiber.sections.clone(),
    }
}

/// Boundary coefficients of the extended pairings. Values are present when
/// the sections they depend on were requested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearReport {
    /// Self-pairing of the admissible canonical bundle: `-epsilon`.
    pub omega_omega: Rat,
    /// Pairing of a point bundle with the canonical bundle: `-g(x,x)`.
    pub p_omega: Option<Rat>,
    /// Pairing of two point bundles: `g(x,y)`.
    pub pq: Option<Rat>,
    /// Self-pairing of `(2h-2) x - K`: `-g((2h-2)x - K, (2h-2)x - K)`.
    pub kappa: Option<Rat>,
    /// Coefficient of the boundary divisor in the pulled-back diagonal:
    /// `-r(x,y)`.
    pub delta_b: Option<Rat>,
    /// Extension of the squared delta-pairing: `-(4h g(x,x) + epsilon)`.
    pub delta_pb_sq: Option<Rat>,
    /// Pairing the extensions instead of extending the pairing picks up the
    /// eta invariant of the unit-multiplicity model:
    /// `-(4h g(x,x) + epsilon - eta)`.
    pub delta_pb_sq_of_lears: Option<Rat>,
}

/// Exact boundary coefficients for the fiber, at the sections named by `p`
/// and `q`.
pub fn lear_coefficients(
    fiber: &NodalFiberSpec,
    p: Option<&str>,
    q: Option<&str>,
) -> Result<LearReport, FiberError> {
    let pol = polarized_graph_of(fiber)?;
    let epsilon = pol.epsilon();
    let x = p.map(|name| fiber.section(name)).transpose()?;
    let y = q.map(|name| fiber.section(name)).transpose()?;

    let mut report = LearReport {
        omega_omega: -&epsilon,
        p_omega: None,
        pq: None,
        kappa: None,
        delta_b: None,
        delta_pb_sq: None,
        delta_pb_sq_of_lears: None,
    };
    if let Some(x) = x {
        let g_xx = pol.green_vertex(x, x);
        let four_h = Rat::from_integer((4 * pol.genus()).into());
        let two_h_minus_2 = Rat::from_integer((2 * pol.genus() - 2).into());
        let difference = VertexDivisor::point(x)
            .scaled(&two_h_minus_2)
            .minus(pol.canonical_divisor());
        report.p_omega = Some(-&g_xx);
        report.kappa = Some(-pol.green_bilinear_divisors(&difference, &difference));
        let delta_pb_sq = -(&four_h * &g_xx + &epsilon);
        // eta of the model in which all multiplicities are 1
        let eta = polarized_graph_of(&desingularize(fiber))?.graph().eta();
        report.delta_pb_sq_of_lears = Some(&delta_pb_sq + &eta);
        report.delta_pb_sq = Some(delta_pb_sq);
        if let Some(y) = y {
            report.pq = Some(pol.green_vertex(x, y));
            report.delta_b = Some(-pol.graph().green().resistance(x, y));
        }
    }
    Ok(report)
}

/// Leading data of the delta-invariant degeneration: the slope
/// `delta + epsilon` of the `-log|t|` term, plus the Betti number and
/// weighted spanning tree count that control the remaining log-log growth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticsReport {
    pub delta_slope: Rat,
    pub betti: usize,
    pub tree_constant: Rat,
    pub note: String,
}

/// Slope report for the fiber. `delta` is the volume of the dual graph, the
/// sum of the node multiplicities.
pub fn delta_asymptotics(fiber: &NodalFiberSpec) -> Result<AsymptoticsReport, FiberError> {
    let pol = polarized_graph_of(fiber)?;
    let model = pol.graph().model();
    let delta = model.total_length();
    let delta_slope = &delta + pol.epsilon();
    let betti = model.betti_number();
    let note = if betti == 0 {
        "dual graph is a tree; the period determinant stays bounded".to_string()
    } else {
        format!(
            "betti number {}; the log of the period determinant grows like {} log(-log|t|)",
            betti, betti
        )
    };
    debug_assert!(
        delta.is_zero() || delta_slope.is_positive(),
        "singular fibers must have positive slope"
    );
    Ok(AsymptoticsReport {
        delta_slope,
        betti,
        tree_constant: model.weighted_tree_count(),
        note,
    })
}

/// Leading coefficients of the Arakelov data along the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArakelovReport {
    /// The metric `log ||dz(P)||` degenerates with slope `-g(x,x)`.
    pub metric_slope: Rat,
    /// The Green's function of two sections degenerates with slope
    /// `g(x,y)`; present when a second section was given.
    pub green_slope: Option<Rat>,
}

/// Arakelov slopes at the section named `p` and optionally against `q`. The
/// two section names must differ; they may target the same component.
pub fn arakelov_asymptotics(
    fiber: &NodalFiberSpec,
    p: &str,
    q: Option<&str>,
) -> Result<ArakelovReport, FiberError> {
    let pol = polarized_graph_of(fiber)?;
    let x = fiber.section(p)?;
    let green_slope = match q {
        Some(name) if name == p => {
            return Err(FiberError::CoincidentSections {
                name: name.to_string(),
            })
        }
        Some(name) => Some(pol.green_vertex(x, fiber.section(name)?)),
        None => None,
    };
    Ok(ArakelovReport {
        metric_slope: -pol.green_vertex(x, x),
        green_slope,
    })
}

/// Resistance `r(x, y)` in the graph where every original edge has length
/// `a + b` and the edge of `node` is replaced by the path `w - y - z` with
/// lengths `a` at `w = node.a` and `b` at `z = node.b`; `y` is the new
/// vertex. Computed directly on that graph.
pub fn split_edge_resistance(
    fiber: &NodalFiberSpec,
    node: usize,
    a: &Rat,
    b: &Rat,
    x: VertexId,
) -> Result<Rat, FiberError> {
    fiber.validate()?;
    let split = fiber.nodes.get(node).ok_or(FiberError::UnknownNode { node })?;
    if !a.is_positive() || !b.is_positive() {
        return Err(FiberError::NonPositiveSplit);
    }
    let joint = a + b;
    let fresh = fiber.genera.len();
    let mut edges = Vec::with_capacity(fiber.nodes.len() + 1);
    for (i, n) in fiber.nodes.iter().enumerate() {
        if i == node {
            edges.push((split.a, fresh, a.clone()));
            edges.push((fresh, split.b, b.clone()));
        } else {
            edges.push((n.a, n.b, joint.clone()));
        }
    }
    if x >= fiber.genera.len() {
        return Err(FiberError::UnknownVertex { vertex: x });
    }
    let graph = build_graph(fiber.genera.len() + 1, edges)?;
    Ok(GreenTable::new(&graph).resistance(x, fresh))
}

/// The same resistance through the closed form
/// `a r(x, z) + b r(x, w) + F(e) a b / (a + b)`
/// with `r` and `F` computed on the model in which every edge has length 1.
pub fn split_edge_resistance_closed_form(
    fiber: &NodalFiberSpec,
    node: usize,
    a: &Rat,
    b: &Rat,
    x: VertexId,
) -> Result<Rat, FiberError> {
    fiber.validate()?;
    let split = fiber.nodes.get(node).ok_or(FiberError::UnknownNode { node })?;
    if !a.is_positive() || !b.is_positive() {
        return Err(FiberError::NonPositiveSplit);
    }
    if x >= fiber.genera.len() {
        return Err(FiberError::UnknownVertex { vertex: x });
    }
    let edges = fiber
        .nodes
        .iter()
        .map(|n| (n.a, n.b, Rat::one()))
        .collect();
    let unit = MetrizedGraph::new(build_graph(fiber.genera.len(), edges)?);
    let table = unit.green();
    let foster = unit.foster_coefficient(node);
    Ok(a * table.resistance(x, split.b)
        + b * table.resistance(x, split.a)
        + foster * a * b / (a + b))
}

/// The weak limit of the Arakelov measures along the family:
/// `(1/h)(sum of genus(x) dirac_x + F(e) uniform probability on e)`.
/// Coincides with the admissible measure of the polarized dual graph.
pub fn limit_measure(fiber: &NodalFiberSpec) -> Result<Current, FiberError> {
    let pol = polarized_graph_of(fiber)?;
    let graph = pol.graph();
    let h_inv = Rat::from_integer(pol.genus().into()).recip();
    let atoms = fiber
        .genera
        .iter()
        .enumerate()
        .map(|(v, q)| {
            (
                Point::AtVertex(v),
                Rat::from_integer(i64::from(*q).into()) * &h_inv,
            )
        })
        .collect();
    let densities = graph
        .model()
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            QuadPoly::constant(graph.foster_coefficient(e) * &h_inv / &edge.length)
        })
        .collect();
    Ok(Current::new(graph, atoms, densities))
}
