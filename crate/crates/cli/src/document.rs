//! Graph document ingestion and emission. A document is a JSON object with
//! `vertices`, `edges`, optional `sections`, and optional `polarization`.
//! Without a polarization the document describes a nodal fiber: vertex
//! `genus` fields are component genera and lengths are node multiplicities
//! (positive integers). With a polarization it describes a metrized graph
//! directly: lengths are positive rationals, written as integers or `"p/q"`
//! strings, and the canonical divisor is given per vertex.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use arakgraph::{
    build_graph, desingularize, parse_rational, polarized_graph_of, rat, MetrizedGraph,
    NodalFiberSpec, Node, PolarizedMetrizedGraph, VertexDivisor,
};

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    vertices: Vec<RawVertex>,
    edges: Vec<RawEdge>,
    #[serde(default)]
    sections: BTreeMap<String, Id>,
    #[serde(default)]
    polarization: Option<BTreeMap<String, i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    id: Id,
    #[serde(default)]
    genus: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: Id,
    from: Id,
    to: Id,
    length: RawLength,
}

/// Vertex and edge ids may be JSON strings or integers; both are kept in
/// textual form.
#[derive(Deserialize)]
#[serde(untagged)]
enum Id {
    Text(String),
    Number(i64),
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Id::Text(s) => f.write_str(s),
            Id::Number(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawLength {
    Integer(i64),
    Text(String),
}

/// Name tables mapping document ids to the dense indices of the library
/// model, in document order.
pub struct NameMaps {
    pub vertex_names: Vec<String>,
    pub vertex_index: BTreeMap<String, usize>,
    pub edge_names: Vec<String>,
    pub edge_index: BTreeMap<String, usize>,
}

pub struct ParsedInput {
    /// Present when the document described a nodal fiber rather than a
    /// polarized graph directly.
    pub fiber: Option<NodalFiberSpec>,
    /// The polarized metrized graph behind the document; for a fiber this
    /// is its dual graph with the induced polarization.
    pub graph: PolarizedMetrizedGraph,
    pub names: NameMaps,
}

impl ParsedInput {
    pub fn fiber(&self) -> Result<&NodalFiberSpec, CliError> {
        self.fiber.as_ref().ok_or_else(|| {
            CliError::Semantic(
                "this command needs a fiber document; the file carries an explicit polarization"
                    .to_string(),
            )
        })
    }
}

pub fn parse_document(text: &str) -> Result<ParsedInput, CliError> {
    let raw: RawDocument =
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    if raw.vertices.is_empty() {
        return Err(CliError::Semantic("document declares no vertices".into()));
    }

    let mut vertex_names = Vec::with_capacity(raw.vertices.len());
    let mut vertex_index = BTreeMap::new();
    for v in &raw.vertices {
        let name = v.id.to_string();
        if vertex_index.insert(name.clone(), vertex_names.len()).is_some() {
            return Err(CliError::Semantic(format!("duplicate vertex id {name:?}")));
        }
        vertex_names.push(name);
    }
    let mut edge_names = Vec::with_capacity(raw.edges.len());
    let mut edge_index = BTreeMap::new();
    let mut endpoints = Vec::with_capacity(raw.edges.len());
    for e in &raw.edges {
        let name = e.id.to_string();
        if edge_index.insert(name.clone(), edge_names.len()).is_some() {
            return Err(CliError::Semantic(format!("duplicate edge id {name:?}")));
        }
        edge_names.push(name.clone());
        let from = *vertex_index.get(&e.from.to_string()).ok_or_else(|| {
            CliError::Semantic(format!(
                "edge {name:?} starts at unknown vertex {:?}",
                e.from.to_string()
            ))
        })?;
        let to = *vertex_index.get(&e.to.to_string()).ok_or_else(|| {
            CliError::Semantic(format!(
                "edge {name:?} ends at unknown vertex {:?}",
                e.to.to_string()
            ))
        })?;
        endpoints.push((from, to));
    }

    let mut sections = BTreeMap::new();
    for (name, target) in &raw.sections {
        let vertex = *vertex_index.get(&target.to_string()).ok_or_else(|| {
            CliError::Semantic(format!(
                "section {name:?} targets unknown vertex {:?}",
                target.to_string()
            ))
        })?;
        sections.insert(name.clone(), vertex);
    }

    let (fiber, graph) = match raw.polarization {
        Some(polarization) => {
            if raw.vertices.iter().any(|v| v.genus.is_some()) {
                return Err(CliError::Semantic(
                    "give either component genera (fiber document) or a polarization \
                     (metrized graph document), not both"
                        .into(),
                ));
            }
            let mut lengths = Vec::with_capacity(raw.edges.len());
            for (e, raw_edge) in raw.edges.iter().enumerate() {
                let length = match &raw_edge.length {
                    RawLength::Integer(n) => rat(*n, 1),
                    RawLength::Text(s) => parse_rational(s).map_err(|err| {
                        CliError::Semantic(format!("edge {:?}: bad length: {err}", edge_names[e]))
                    })?,
                };
                lengths.push(length);
            }
            let mut divisor = VertexDivisor::zero();
            let mut degree = 0i64;
            for (id, coefficient) in &polarization {
                let vertex = *vertex_index.get(id).ok_or_else(|| {
                    CliError::Semantic(format!("polarization names unknown vertex {id:?}"))
                })?;
                divisor.add_at(vertex, &rat(*coefficient, 1));
                degree += coefficient;
            }
            if degree % 2 != 0 {
                return Err(CliError::Semantic(format!(
                    "polarization degree {degree} is odd; it must be 2h-2"
                )));
            }
            let genus = degree / 2 + 1;
            let edges = endpoints
                .iter()
                .zip(lengths)
                .map(|((a, b), l)| (*a, *b, l))
                .collect();
            let model = build_graph(raw.vertices.len(), edges).map_err(CliError::semantic)?;
            let p = PolarizedMetrizedGraph::new(MetrizedGraph::new(model), divisor, genus)
                .map_err(CliError::semantic)?;
            (None, p)
        }
        None => {
            let genera = raw.vertices.iter().map(|v| v.genus.unwrap_or(0)).collect();
            let mut nodes = Vec::with_capacity(raw.edges.len());
            for (e, raw_edge) in raw.edges.iter().enumerate() {
                let multiplicity = match &raw_edge.length {
                    RawLength::Integer(n) if *n > 0 && *n <= i64::from(u32::MAX) => *n as u32,
                    RawLength::Integer(n) => {
                        return Err(CliError::Semantic(format!(
                            "edge {:?}: multiplicity {n} is not a positive integer",
                            edge_names[e]
                        )))
                    }
                    RawLength::Text(s) => {
                        return Err(CliError::Semantic(format!(
                            "edge {:?}: fiber documents take integer multiplicities, got {s:?}; \
                             add a polarization for rational lengths",
                            edge_names[e]
                        )))
                    }
                };
                let (a, b) = endpoints[e];
                nodes.push(Node { a, b, multiplicity });
            }
            let fiber = NodalFiberSpec {
                genera,
                nodes,
                sections,
            };
            let graph = polarized_graph_of(&fiber).map_err(CliError::semantic)?;
            (Some(fiber), graph)
        }
    };

    Ok(ParsedInput {
        fiber,
        graph,
        names: NameMaps {
            vertex_names,
            vertex_index,
            edge_names,
            edge_index,
        },
    })
}

fn claim(base: String, taken: &mut BTreeSet<String>) -> String {
    let mut name = base;
    while !taken.insert(name.clone()) {
        name.push('_');
    }
    name
}

/// Emits the desingularization of `fiber` as a document. Every node of
/// multiplicity `n > 1` becomes a chain of `n` unit nodes through `n - 1`
/// fresh genus-zero components; the walk order matches the library model,
/// so parsing the output yields the desingularized fiber index for index.
/// Fresh names derive from the resolved edge: components `E.v1, E.v2, ...`
/// and nodes `E.1, ..., E.n`, disambiguated with underscores if taken.
pub fn render_desingularized_document(fiber: &NodalFiberSpec, names: &NameMaps) -> String {
    let mut vertex_names = names.vertex_names.clone();
    let mut vertices_taken: BTreeSet<String> = vertex_names.iter().cloned().collect();
    let mut edges_taken: BTreeSet<String> = BTreeSet::new();
    let mut genera = fiber.genera.clone();
    let mut records: Vec<(String, usize, usize)> = Vec::new();

    for (e, node) in fiber.nodes.iter().enumerate() {
        let base = &names.edge_names[e];
        if node.multiplicity == 1 {
            records.push((claim(base.clone(), &mut edges_taken), node.a, node.b));
            continue;
        }
        let mut previous = node.a;
        for k in 1..node.multiplicity {
            let fresh = vertex_names.len();
            vertex_names.push(claim(format!("{base}.v{k}"), &mut vertices_taken));
            genera.push(0);
            records.push((claim(format!("{base}.{k}"), &mut edges_taken), previous, fresh));
            previous = fresh;
        }
        records.push((
            claim(format!("{base}.{}", node.multiplicity), &mut edges_taken),
            previous,
            node.b,
        ));
    }

    debug_assert_eq!(
        desingularize(fiber),
        NodalFiberSpec {
            genera: genera.clone(),
            nodes: records
                .iter()
                .map(|(_, a, b)| Node { a: *a, b: *b, multiplicity: 1 })
                .collect(),
            sections: fiber.sections.clone(),
        },
        "the emitted chains must match the library desingularization"
    );

    let vertices: Vec<Value> = vertex_names
        .iter()
        .enumerate()
        .map(|(v, name)| {
            let mut object = Map::new();
            object.insert("id".into(), json!(name));
            if genera[v] > 0 {
                object.insert("genus".into(), json!(genera[v]));
            }
            Value::Object(object)
        })
        .collect();
    let edges: Vec<Value> = records
        .iter()
        .map(|(name, a, b)| {
            json!({
                "id": name,
                "from": vertex_names[*a],
                "to": vertex_names[*b],
                "length": 1,
            })
        })
        .collect();
    let mut document = Map::new();
    document.insert("vertices".into(), Value::Array(vertices));
    document.insert("edges".into(), Value::Array(edges));
    if !fiber.sections.is_empty() {
        let sections: Map<String, Value> = fiber
            .sections
            .iter()
            .map(|(name, v)| (name.clone(), json!(vertex_names[*v])))
            .collect();
        document.insert("sections".into(), Value::Object(sections));
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(document)).unwrap();
    text.push('\n');
    text
}
