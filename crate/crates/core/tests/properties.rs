//! Structural laws of the resistance and invariant layers on generated
//! inputs: electrical reduction rules, metric properties, subdivision
//! invariance, and a brute-force spanning tree oracle.

use arakgraph::{build_graph, random_point, random_polarized_graph, rat, GreenTable, Rat};
use num::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_length() -> impl Strategy<Value = Rat> {
    (1i64..=20, 1i64..=20).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_edges_add_resistances(a in arb_length(), b in arb_length(), c in arb_length()) {
        let g = build_graph(4, vec![(0, 1, a.clone()), (1, 2, b.clone()), (2, 3, c.clone())]).unwrap();
        let table = GreenTable::new(&g);
        prop_assert_eq!(table.resistance(0, 3), &a + &b + &c);
        prop_assert_eq!(table.resistance(0, 2), &a + &b);
    }

    #[test]
    fn parallel_edges_add_conductances(lengths in prop::collection::vec(arb_length(), 2..=5)) {
        let g = build_graph(
            2,
            lengths.iter().map(|l| (0, 1, l.clone())).collect(),
        )
        .unwrap();
        let conductance = lengths.iter().fold(Rat::zero(), |acc, l| acc + l.recip());
        prop_assert_eq!(GreenTable::new(&g).resistance(0, 1), conductance.recip());
    }

    #[test]
    fn resistance_scales_with_the_metric(seed in 0u64..1 << 48, num in 1i64..=9, den in 1i64..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polarized_graph(&mut rng);
        let lambda = rat(num, den);
        let scaled = p.scale_lengths(&lambda);
        let n = p.graph().model().vertex_count();
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        prop_assert_eq!(
            scaled.graph().green().resistance(x, y),
            lambda * p.graph().green().resistance(x, y)
        );
    }
}

#[test]
fn resistance_is_a_metric_with_the_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..25 {
        let p = random_polarized_graph(&mut rng);
        let graph = p.graph();
        let x = random_point(&mut rng, graph);
        let y = random_point(&mut rng, graph);
        let z = random_point(&mut rng, graph);
        let xy = graph.resistance(&x, &y);
        let yz = graph.resistance(&y, &z);
        let xz = graph.resistance(&x, &z);
        assert!(!xy.is_negative());
        assert!(xz <= &xy + &yz);
        assert_eq!(graph.resistance(&x, &x), Rat::zero());
        assert_eq!(xy, graph.resistance(&y, &x));
    }
}

#[test]
fn invariants_survive_subdivision() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..15 {
        let p = random_polarized_graph(&mut rng);
        let cut = random_point(&mut rng, p.graph());
        let (refined, _) = p.subdivide_at(std::slice::from_ref(&cut));
        assert_eq!(refined.genus(), p.genus());
        assert_eq!(refined.epsilon(), p.epsilon());
        assert_eq!(refined.tau(), p.tau());
        let n = p.graph().model().vertex_count();
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        // original vertex ids are stable in the refinement
        assert_eq!(refined.green_vertex(x, y), p.green_vertex(x, y));
        assert_eq!(
            refined.graph().green().resistance(x, y),
            p.graph().green().resistance(x, y)
        );
    }
}

#[test]
fn tree_count_matches_brute_force_enumeration() {
    struct Probe {
        vertices: usize,
        edges: Vec<(usize, usize, Rat)>,
    }
    let probes = vec![
        Probe {
            vertices: 3,
            edges: vec![
                (0, 1, rat(1, 2)),
                (1, 2, rat(2, 3)),
                (2, 0, rat(3, 1)),
                (0, 1, rat(5, 4)),
            ],
        },
        Probe {
            vertices: 4,
            edges: vec![
                (0, 1, rat(1, 1)),
                (1, 2, rat(1, 2)),
                (2, 3, rat(1, 3)),
                (3, 0, rat(1, 4)),
                (0, 2, rat(2, 1)),
                (1, 1, rat(7, 2)),
            ],
        },
        Probe {
            vertices: 2,
            edges: vec![(0, 1, rat(2, 5)), (0, 1, rat(5, 2)), (0, 0, rat(1, 1))],
        },
        Probe {
            vertices: 1,
            edges: vec![(0, 0, rat(3, 7))],
        },
    ];
    for probe in probes {
        let g = build_graph(probe.vertices, probe.edges.clone()).unwrap();
        let mut expected = Rat::zero();
        let e = probe.edges.len();
        for mask in 0u32..1 << e {
            if mask.count_ones() as usize != probe.vertices - 1 {
                continue;
            }
            let mut parent: Vec<usize> = (0..probe.vertices).collect();
            fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
                while parent[v] != v {
                    parent[v] = parent[parent[v]];
                    v = parent[v];
                }
                v
            }
            let mut acyclic = true;
            let mut weight = Rat::one();
            for (i, (a, b, l)) in probe.edges.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    continue;
                }
                let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
                if ra == rb {
                    acyclic = false;
                    break;
                }
                parent[ra] = rb;
                weight *= l.recip();
            }
            if acyclic {
                expected += weight;
            }
        }
        assert_eq!(g.weighted_tree_count(), expected);
    }
}

#[test]
fn pseudo_inverse_solves_the_poisson_problem_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let p = random_polarized_graph(&mut rng);
        let model = p.graph().model();
        let n = model.vertex_count();
        let lap = model.laplacian();
        let table = p.graph().green();
        // L (G b) = b for any zero-sum b, up to the constant kernel
        let b: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-5..=5), 1)).collect();
        let mean = b.iter().fold(Rat::zero(), |acc, c| acc + c) / rat(n as i64, 1);
        let b: Vec<Rat> = b.into_iter().map(|c| c - &mean).collect();
        let gb: Vec<Rat> = (0..n)
            .map(|i| {
                (0..n).fold(Rat::zero(), |acc, j| acc + table.value(i, j) * &b[j])
            })
            .collect();
        assert_eq!(lap.apply(&gb), b);
    }
}
