//! Exact self-verification. Every invariant the crate computes satisfies a
//! web of identities; each check here recomputes one of them along two
//! independent routes and records the residual. All arithmetic is rational,
//! so a correct implementation produces a residual of exactly zero, not
//! merely a small one.

use num::{One, Signed, Zero};
use rand::Rng;

use crate::admissible::PolarizedMetrizedGraph;
use crate::graph::{VertexDivisor, VertexId};
use crate::metrized::{Current, Point};
use crate::pairing::{admissible_of_point, intersection, omega_a, CompactifiedDivisor};
use crate::rational::{rat, Rat};
use crate::sampling::{random_point, random_potential};

/// One verified identity: its name, the exact residual between the two
/// routes, and whether it vanished.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: Rat,
    pub pass: bool,
}

/// The outcome of a verification run.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &'static str, residual: Rat) {
        let pass = residual.is_zero();
        self.checks.push(IdentityCheck {
            name,
            residual,
            pass,
        });
    }
}

/// Total variation style norm of a current: the absolute atom masses plus
/// the absolute density coefficients. Zero exactly when the current is.
fn current_norm(c: &Current, edge_count: usize) -> Rat {
    let mut acc = c.atoms().fold(Rat::zero(), |acc, (_, m)| acc + m.abs());
    for e in 0..edge_count {
        let d = c.density(e);
        acc += d.c0.abs() + d.c1.abs() + d.c2.abs();
    }
    acc
}

/// `r(x, D) = sum of D(y) r(x, y)` over the support of `D`.
fn resistance_against(p: &PolarizedMetrizedGraph, x: VertexId, d: &VertexDivisor) -> Rat {
    let table = p.graph().green();
    d.iter()
        .fold(Rat::zero(), |acc, (y, c)| acc + c * table.resistance(x, *y))
}

/// Runs the whole identity suite on one polarized graph, drawing base
/// points, divisors and potentials from the RNG. Returns the residual of
/// every check; `all_pass` on the report demands that each one is exactly
/// zero.
pub fn verify_identities(p: &PolarizedMetrizedGraph, rng: &mut impl Rng) -> IdentityReport {
    let graph = p.graph();
    let model = graph.model();
    let n = model.vertex_count();
    let edge_count = model.edges().len();
    let one = Rat::one();
    let half = rat(1, 2);

    let vx = rng.gen_range(0..n);
    let vy = rng.gen_range(0..n);
    let px = random_point(rng, graph);
    let py = random_point(rng, graph);

    let mut report = IdentityReport { checks: Vec::new() };

    // masses
    let mu_can = graph.canonical_measure();
    report.push(
        "canonical measure has mass 1",
        mu_can.total_mass(graph) - &one,
    );
    let mu = p.admissible_measure();
    report.push(
        "admissible measure has mass 1",
        mu.current().total_mass(graph) - &one,
    );

    // Foster coefficients
    let foster_sum = (0..edge_count).fold(Rat::zero(), |acc, e| acc + graph.foster_coefficient(e));
    report.push(
        "Foster coefficients sum to the Betti number",
        foster_sum - rat(model.betti_number() as i64, 1),
    );
    let mut foster_residual = Rat::zero();
    for (e, edge) in model.edges().iter().enumerate() {
        let through_deletion = match graph.bridge_resistance(e).finite() {
            Some(r) => &edge.length / (&edge.length + r),
            None => Rat::zero(),
        };
        foster_residual += (graph.foster_coefficient(e) - through_deletion).abs();
    }
    report.push(
        "Foster coefficient agrees with the deleted-edge resistance",
        foster_residual,
    );

    // the resistance function solves the canonical Poisson equation
    let r_fn = graph.resistance_function(vx);
    let lap_half = graph.laplacian_of(&r_fn).scaled(&half);
    let target = mu_can.minus(&Current::dirac(graph, Point::AtVertex(vx)));
    report.push(
        "half the Laplacian of r(x, .) is the canonical measure minus dirac_x",
        current_norm(&lap_half.minus(&target), edge_count),
    );

    // tau from an arbitrary base point, possibly interior
    let (refined_graph, _, refined_r) = graph.resistance_function_at(&px);
    let refined_mu_can = refined_graph.canonical_measure();
    let tau_at_px = &half * refined_graph.integrate(&refined_r, &refined_mu_can);
    report.push("tau is independent of the base point", tau_at_px - p.tau());

    // the per-edge closed form against direct integration of r(x, .)
    // over the continuous part of the canonical measure
    let atom_part = refined_mu_can
        .atoms()
        .fold(Rat::zero(), |acc, (q, m)| acc + m * refined_r.value_at(q));
    let continuous =
        &half * (refined_graph.integrate(&refined_r, &refined_mu_can) - atom_part);
    let cts_sum = (0..edge_count).fold(Rat::zero(), |acc, e| acc + graph.tau_cts(&px, e));
    report.push(
        "edge contributions of tau match the integral route",
        cts_sum - continuous,
    );

    // epsilon
    let epsilon = p.epsilon();
    report.push(
        "epsilon agrees along its three routes",
        (&epsilon - p.epsilon_integral()).abs() + (&epsilon - p.epsilon_mori()).abs(),
    );
    report.push(
        "epsilon is nonnegative",
        if epsilon.is_negative() {
            -&epsilon
        } else {
            Rat::zero()
        },
    );

    // 2 r(x, K) + 4 tau = 4 h g(x, x) + epsilon
    let four_h = rat(4 * p.genus(), 1);
    report.push(
        "the tau, resistance and epsilon closed relation",
        rat(2, 1) * resistance_against(p, vx, p.canonical_divisor()) + rat(4, 1) * p.tau()
            - (&four_h * p.green_vertex(vx, vx) + &epsilon),
    );

    // c is a constant function of the point
    let (c_refined, c_base, c_green) = p.green_function_at(&px);
    let g_k_at_px = c_refined
        .canonical_divisor()
        .iter()
        .fold(Rat::zero(), |acc, (v, k)| acc + k * c_green.vertex_value(*v));
    report.push(
        "the canonical Green's constant is point independent",
        p.c_constant() - (-c_green.vertex_value(c_base) - g_k_at_px),
    );

    // defining properties of the admissible Green's function
    let g_fn = p.green_function(vx);
    let lap_g = graph.laplacian_of(&g_fn);
    let g_target = Current::dirac(graph, Point::AtVertex(vx)).minus(mu.current());
    report.push(
        "the Laplacian of g(x, .) is dirac_x minus the admissible measure",
        current_norm(&lap_g.minus(&g_target), edge_count),
    );
    report.push(
        "g(x, .) integrates to zero against the admissible measure",
        graph.integrate(&g_fn, mu.current()),
    );
    report.push(
        "the Green's function is symmetric",
        p.green_admissible(&px, &py) - p.green_admissible(&py, &px),
    );
    report.push(
        "resistance decomposes through the Green's function",
        graph.resistance(&px, &py)
            - (p.green_admissible(&px, &px) - rat(2, 1) * p.green_admissible(&px, &py)
                + p.green_admissible(&py, &py)),
    );

    // on degree-zero divisors the Green's pairing is pure resistance
    let d = VertexDivisor::point(rng.gen_range(0..n)).minus(&VertexDivisor::point(vy));
    let e = VertexDivisor::point(rng.gen_range(0..n)).minus(&VertexDivisor::point(vx));
    let mut r_bilinear = Rat::zero();
    for (a, ca) in d.iter() {
        for (b, cb) in e.iter() {
            r_bilinear += ca * cb * graph.green().resistance(*a, *b);
        }
    }
    report.push(
        "degree-zero pairing is minus half the resistance form",
        p.green_bilinear_divisors(&d, &e) + &half * r_bilinear,
    );

    // pairing layer
    let bundle_x = admissible_of_point(p, vx);
    let bundle_y = admissible_of_point(p, vy);
    let omega = omega_a(p);
    report.push(
        "point bundles pair to the Green's value",
        intersection(p, &bundle_x.base, &bundle_y.base) - p.green_vertex(vx, vy),
    );
    report.push(
        "the canonical self-pairing is minus epsilon",
        intersection(p, &omega.base, &omega.base) + &epsilon,
    );
    report.push(
        "adjunction pairing vanishes",
        intersection(p, &bundle_x.base, &omega.tensor(&bundle_x).base),
    );

    // symmetry of the pairing and of the Dirichlet form on random data
    let f = random_potential(rng, graph);
    let g = random_potential(rng, graph);
    let a = CompactifiedDivisor::new(d, f.clone());
    let b = CompactifiedDivisor::new(e, g.clone());
    report.push(
        "the pairing is symmetric",
        intersection(p, &a, &b) - intersection(p, &b, &a),
    );
    report.push(
        "integration by parts holds",
        graph.integrate(&f, &graph.laplacian_of(&g))
            - graph.integrate(&g, &graph.laplacian_of(&f)),
    );

    // scaling the metric scales the length invariants
    let lambda = rat(rng.gen_range(1..=9), rng.gen_range(1..=9));
    let scaled = p.scale_lengths(&lambda);
    report.push(
        "epsilon, tau and eta scale linearly with the metric",
        (scaled.epsilon() - &lambda * &epsilon).abs()
            + (scaled.tau() - &lambda * p.tau()).abs()
            + (scaled.graph().eta() - &lambda * graph.eta()).abs(),
    );

    report
}
