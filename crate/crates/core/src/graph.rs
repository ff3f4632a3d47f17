//! Discrete layer: weighted multigraphs, the vertex Laplacian, its
//! pseudo-inverse, effective resistance between vertices, and the weighted
//! spanning tree count.
//!
//! Conventions. Vertices are `0..vertex_count`. Every edge carries a fixed
//! orientation `minus -> plus`; nothing downstream depends on the choice.
//! Loops and parallel edges are allowed. A loop contributes nothing to the
//! Laplacian (the potential difference across it vanishes) but counts twice
//! towards the valence of its vertex. Edge lengths are resistances, so
//! parallel edges add conductances `1/l`.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rat;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Oriented weighted edge. `length` is strictly positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub minus: VertexId,
    pub plus: VertexId,
    pub length: Rat,
}

/// Connected weighted multigraph with at least one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedMultigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge {edge} has non-positive length")]
    NonPositiveLength { edge: EdgeId },
    #[error("edge {edge} references undeclared vertex {vertex}")]
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
}

/// Validates and builds a graph from raw lists. Vertices and edges keep their
/// declaration order, so every downstream output is reproducible.
pub fn build_graph(
    vertex_count: usize,
    edges: Vec<(VertexId, VertexId, Rat)>,
) -> Result<WeightedMultigraph, GraphError> {
    if vertex_count == 0 {
        return Err(GraphError::NoVertices);
    }
    for (i, (a, b, len)) in edges.iter().enumerate() {
        for v in [a, b] {
            if *v >= vertex_count {
                return Err(GraphError::DanglingEndpoint { edge: i, vertex: *v });
            }
        }
        if !len.is_positive() {
            return Err(GraphError::NonPositiveLength { edge: i });
        }
    }
    let edges: Vec<Edge> = edges
        .into_iter()
        .map(|(minus, plus, length)| Edge { minus, plus, length })
        .collect();
    if !connected(vertex_count, &edges) {
        return Err(GraphError::Disconnected);
    }
    Ok(WeightedMultigraph { vertex_count, edges })
}

fn connected(vertex_count: usize, edges: &[Edge]) -> bool {
    let mut uf = UnionFind::new(vertex_count);
    for e in edges {
        uf.union(e.minus, e.plus);
    }
    (1..vertex_count).all(|v| uf.find(v) == uf.find(0))
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

impl WeightedMultigraph {
    /// Internal constructor for graphs produced by subdivision or edge
    /// deletion, where validity is guaranteed by construction.
    pub(crate) fn from_parts_unchecked(vertex_count: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(vertex_count > 0);
        debug_assert!(edges
            .iter()
            .all(|e| e.minus < vertex_count && e.plus < vertex_count && e.length.is_positive()));
        debug_assert!(connected(vertex_count, &edges));
        WeightedMultigraph { vertex_count, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    /// Number of edge ends at each vertex; a loop counts twice.
    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0usize; self.vertex_count];
        for e in &self.edges {
            val[e.minus] += 1;
            val[e.plus] += 1;
        }
        val
    }

    /// First Betti number `|E| - |V| + 1` of a connected graph.
    pub fn betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    /// Total length, the volume of the associated metric space.
    pub fn total_length(&self) -> Rat {
        self.edges
            .iter()
            .fold(Rat::zero(), |acc, e| acc + &e.length)
    }

    /// Same topology with every length multiplied by `factor > 0`.
    pub fn scale_lengths(&self, factor: &Rat) -> WeightedMultigraph {
        assert!(factor.is_positive(), "scale factor must be positive");
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                minus: e.minus,
                plus: e.plus,
                length: &e.length * factor,
            })
            .collect();
        WeightedMultigraph {
            vertex_count: self.vertex_count,
            edges,
        }
    }

    /// The vertex Laplacian `L`: diagonal entry at `x` sums `1/l(e)` over
    /// non-loop edges at `x`, entry `(x,y)` sums `-1/l(e)` over edges joining
    /// `x` and `y`. Symmetric, zero row sums, independent of orientations.
    pub fn laplacian(&self) -> LaplacianMatrix {
        let n = self.vertex_count;
        let mut entries = vec![vec![Rat::zero(); n]; n];
        for e in &self.edges {
            if e.minus == e.plus {
                continue;
            }
            let c = e.length.recip();
            entries[e.minus][e.minus] += &c;
            entries[e.plus][e.plus] += &c;
            entries[e.minus][e.plus] -= &c;
            entries[e.plus][e.minus] -= &c;
        }
        LaplacianMatrix { entries }
    }

    /// Sum over spanning trees of the product of edge conductances `1/l(e)`,
    /// computed as a cofactor of the Laplacian. The one-vertex graph has the
    /// empty tree, count 1.
    pub fn weighted_tree_count(&self) -> Rat {
        let lap = self.laplacian();
        let n = self.vertex_count;
        if n == 1 {
            return Rat::one();
        }
        let minor: Vec<Vec<Rat>> = (1..n)
            .map(|i| lap.entries[i][1..].to_vec())
            .collect();
        determinant(minor)
    }
}

/// Exact vertex Laplacian of a connected multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaplacianMatrix {
    entries: Vec<Vec<Rat>>,
}

impl LaplacianMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, x: VertexId, y: VertexId) -> &Rat {
        &self.entries[x][y]
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.entries
    }

    /// Matrix-vector product `L f` for a vertex function `f`.
    pub fn apply(&self, f: &[Rat]) -> Vec<Rat> {
        assert_eq!(f.len(), self.dim());
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(f)
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

/// Full table of the Laplacian pseudo-inverse: `value(x,y)` is the Green's
/// function `gbar(x,y) = L+(x,y)` of the graph.
///
/// Computed by one exact inversion: for connected graphs `L + J/n` is
/// invertible (`J` the all-ones matrix) and its inverse is `L+ + J/n`, which
/// yields the whole table at the cost of a single elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreenTable {
    values: Vec<Vec<Rat>>,
}

impl GreenTable {
    pub fn new(graph: &WeightedMultigraph) -> Self {
        let n = graph.vertex_count();
        let shift = Rat::new(1.into(), (n as i64).into());
        let lap = graph.laplacian();
        let mut m = lap.entries;
        for row in m.iter_mut() {
            for entry in row.iter_mut() {
                *entry += &shift;
            }
        }
        let mut values = invert(m).expect("shifted Laplacian of a connected graph is invertible");
        for row in values.iter_mut() {
            for entry in row.iter_mut() {
                *entry -= &shift;
            }
        }
        GreenTable { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, x: VertexId, y: VertexId) -> &Rat {
        &self.values[x][y]
    }

    /// Bilinear extension `sum D(x) E(y) gbar(x,y)` to vertex divisors.
    pub fn bilinear(&self, d: &VertexDivisor, e: &VertexDivisor) -> Rat {
        let mut acc = Rat::zero();
        for (x, dx) in d.iter() {
            for (y, ey) in e.iter() {
                acc += dx * ey * &self.values[*x][*y];
            }
        }
        acc
    }

    /// Effective resistance `r(x,y) = gbar(x-y, x-y)`.
    pub fn resistance(&self, x: VertexId, y: VertexId) -> Rat {
        &self.values[x][x] - &self.values[x][y] - &self.values[y][x] + &self.values[y][y]
    }
}

/// Green's function `gbar(x,y)` between two vertices. Convenience wrapper;
/// batch users should hold a [`GreenTable`].
pub fn green_pseudoinverse(graph: &WeightedMultigraph, x: VertexId, y: VertexId) -> Rat {
    GreenTable::new(graph).value(x, y).clone()
}

/// Bilinear Green's pairing of two vertex divisors.
pub fn green_bilinear(graph: &WeightedMultigraph, d: &VertexDivisor, e: &VertexDivisor) -> Rat {
    GreenTable::new(graph).bilinear(d, e)
}

/// Effective resistance between two vertices.
pub fn effective_resistance_vertices(
    graph: &WeightedMultigraph,
    x: VertexId,
    y: VertexId,
) -> Rat {
    GreenTable::new(graph).resistance(x, y)
}

/// Finitely supported rational divisor on the vertex set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexDivisor {
    coeffs: BTreeMap<VertexId, Rat>,
}

impl VertexDivisor {
    pub fn zero() -> Self {
        VertexDivisor::default()
    }

    pub fn point(v: VertexId) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, Rat::one());
        VertexDivisor { coeffs }
    }

    pub fn from_pairs<I: IntoIterator<Item = (VertexId, Rat)>>(pairs: I) -> Self {
        let mut div = VertexDivisor::zero();
        for (v, c) in pairs {
            div.add_at(v, &c);
        }
        div
    }

    /// Coefficient at `v`, zero off the support.
    pub fn coeff(&self, v: VertexId) -> Rat {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_at(&mut self, v: VertexId, c: &Rat) {
        let entry = self.coeffs.entry(v).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &Rat)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Rat {
        self.coeffs.values().fold(Rat::zero(), |acc, c| acc + c)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn scaled(&self, factor: &Rat) -> VertexDivisor {
        if factor.is_zero() {
            return VertexDivisor::zero();
        }
        VertexDivisor {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (*v, c * factor))
                .collect(),
        }
    }

    pub fn plus(&self, other: &VertexDivisor) -> VertexDivisor {
        let mut out = self.clone();
        for (v, c) in other.iter() {
            out.add_at(*v, c);
        }
        out
    }

    pub fn minus(&self, other: &VertexDivisor) -> VertexDivisor {
        self.plus(&other.scaled(&-Rat::one()))
    }
}

/// Exact inverse by Gauss-Jordan elimination with row pivoting, `None` for a
/// singular matrix.
fn invert(mut m: Vec<Vec<Rat>>) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for j in 0..n {
            m[col][j] /= &pivot;
            inv[col][j] /= &pivot;
        }
        for row in 0..n {
            if row == col || m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone();
            for j in 0..n {
                let t = &m[col][j] * &factor;
                m[row][j] -= t;
                let t = &inv[col][j] * &factor;
                inv[row][j] -= t;
            }
        }
    }
    Some(inv)
}

/// Exact determinant by elimination with row pivoting. The empty matrix has
/// determinant 1.
fn determinant(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot_row = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(r) => r,
            None => return Rat::zero(),
        };
        if pivot_row != col {
            m.swap(col, pivot_row);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &pivot;
            for j in col..n {
                let t = &m[col][j] * &factor;
                m[row][j] -= t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn unit_loop() -> WeightedMultigraph {
        build_graph(1, vec![(0, 0, rat(1, 1))]).unwrap()
    }

    fn banana() -> WeightedMultigraph {
        build_graph(2, vec![(0, 1, rat(1, 1)), (0, 1, rat(1, 1))]).unwrap()
    }

    fn single_edge(len: Rat) -> WeightedMultigraph {
        build_graph(2, vec![(0, 1, len)]).unwrap()
    }

    #[test]
    fn build_validates() {
        assert!(unit_loop().betti_number() == 1);
        assert_eq!(banana().betti_number(), 1);
        assert_eq!(
            build_graph(2, vec![]),
            Err(GraphError::Disconnected)
        );
        assert_eq!(build_graph(0, vec![]), Err(GraphError::NoVertices));
        assert_eq!(
            build_graph(2, vec![(0, 2, rat(1, 1))]),
            Err(GraphError::DanglingEndpoint { edge: 0, vertex: 2 })
        );
        assert_eq!(
            build_graph(2, vec![(0, 1, rat(0, 1))]),
            Err(GraphError::NonPositiveLength { edge: 0 })
        );
    }

    #[test]
    fn laplacian_examples() {
        let lap = unit_loop().laplacian();
        assert_eq!(lap.dim(), 1);
        assert!(lap.entry(0, 0).is_zero());

        let lap = single_edge(rat(1, 2)).laplacian();
        assert_eq!(*lap.entry(0, 0), rat(2, 1));
        assert_eq!(*lap.entry(0, 1), rat(-2, 1));

        let lap = banana().laplacian();
        assert_eq!(*lap.entry(0, 0), rat(2, 1));
        assert_eq!(*lap.entry(0, 1), rat(-2, 1));
        assert_eq!(*lap.entry(1, 1), rat(2, 1));
    }

    #[test]
    fn laplacian_row_sums_vanish() {
        let g = build_graph(
            3,
            vec![
                (0, 1, rat(2, 3)),
                (1, 2, rat(5, 7)),
                (2, 0, rat(1, 2)),
                (1, 1, rat(9, 4)),
            ],
        )
        .unwrap();
        let lap = g.laplacian();
        for x in 0..3 {
            let sum: Rat = (0..3).map(|y| lap.entry(x, y).clone()).sum();
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn green_pseudoinverse_examples() {
        assert!(green_pseudoinverse(&unit_loop(), 0, 0).is_zero());
        let g = single_edge(rat(1, 1));
        assert_eq!(green_pseudoinverse(&g, 0, 0), rat(1, 4));
        assert_eq!(green_pseudoinverse(&g, 0, 1), rat(-1, 4));
    }

    #[test]
    fn green_table_satisfies_pseudoinverse_axioms() {
        let g = build_graph(
            4,
            vec![
                (0, 1, rat(1, 2)),
                (1, 2, rat(3, 1)),
                (2, 3, rat(4, 5)),
                (3, 0, rat(7, 3)),
                (1, 3, rat(2, 7)),
                (2, 2, rat(5, 1)),
            ],
        )
        .unwrap();
        let lap = g.laplacian();
        let table = GreenTable::new(&g);
        let n = g.vertex_count();
        // L L+ L = L and row sums of L+ vanish
        for x in 0..n {
            let col: Vec<Rat> = (0..n).map(|y| table.value(y, x).clone()).collect();
            let lcol = lap.apply(&col);
            let llcol = lap.apply(&lcol);
            for y in 0..n {
                assert_eq!(llcol[y], *lap.entry(y, x));
            }
            let row_sum: Rat = (0..n).map(|y| table.value(x, y).clone()).sum();
            assert!(row_sum.is_zero());
            for y in 0..n {
                assert_eq!(table.value(x, y), table.value(y, x));
            }
        }
    }

    #[test]
    fn resistance_examples() {
        let series = build_graph(3, vec![(0, 1, rat(2, 1)), (1, 2, rat(3, 1))]).unwrap();
        assert_eq!(effective_resistance_vertices(&series, 0, 2), rat(5, 1));
        assert!(effective_resistance_vertices(&series, 1, 1).is_zero());
        assert_eq!(effective_resistance_vertices(&banana(), 0, 1), rat(1, 2));
    }

    #[test]
    fn green_bilinear_difference_gives_resistance() {
        let d = VertexDivisor::point(0).minus(&VertexDivisor::point(1));
        assert_eq!(green_bilinear(&single_edge(rat(1, 1)), &d, &d), rat(1, 1));
        assert_eq!(green_bilinear(&banana(), &d, &d), rat(1, 2));
        assert!(green_bilinear(&banana(), &d, &VertexDivisor::zero()).is_zero());
    }

    #[test]
    fn tree_count_examples() {
        assert_eq!(single_edge(rat(5, 1)).weighted_tree_count(), rat(1, 5));
        assert_eq!(banana().weighted_tree_count(), rat(2, 1));
        assert_eq!(unit_loop().weighted_tree_count(), rat(1, 1));
    }

    #[test]
    fn orientation_flip_keeps_laplacian() {
        let edges = vec![
            (0, 1, rat(2, 3)),
            (1, 2, rat(5, 7)),
            (2, 0, rat(1, 2)),
        ];
        let flipped: Vec<_> = edges.iter().map(|(a, b, l)| (*b, *a, l.clone())).collect();
        let g = build_graph(3, edges).unwrap();
        let h = build_graph(3, flipped).unwrap();
        assert_eq!(g.laplacian(), h.laplacian());
    }

    #[test]
    fn divisor_arithmetic() {
        let d = VertexDivisor::from_pairs([(0, rat(2, 1)), (3, rat(-1, 2))]);
        assert_eq!(d.degree(), rat(3, 2));
        assert_eq!(d.coeff(1), rat(0, 1));
        let e = d.minus(&d);
        assert!(e.is_zero());
        assert!(!d.is_integral());
        assert!(VertexDivisor::point(2).is_integral());
    }
}
