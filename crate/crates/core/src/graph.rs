//! Directed graph storage with deterministic adjacency.
//!
//! Vertices are dense integer handles. Every adjacency list is kept sorted by
//! neighbour id so that iteration order (and with it every tie-break in the
//! planners) is reproducible across runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extended non-negative edge / path cost. `f64::INFINITY` marks infeasibility.
pub type Cost = f64;

/// Positive infinity, the "no path" / "blocked edge" sentinel.
pub const INF: Cost = f64::INFINITY;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Index of an edge in insertion order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
}

impl Edge {
    pub fn new(source: usize, target: usize) -> Self {
        Edge { source: VertexId(source), target: VertexId(target) }
    }

    pub fn reversed(self) -> Self {
        Edge { source: self.target, target: self.source }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

/// Checks that `w` is a legal true edge weight: strictly positive, possibly infinite.
pub fn validate_weight(edge: Edge, weight: Cost) -> Result<()> {
    if weight.is_nan() || weight <= 0.0 {
        return Err(Error::InvalidWeight { edge, weight });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct GraphData {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

/// Directed graph with sorted successor and predecessor lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphData", into = "GraphData")]
pub struct Graph {
    edges: Vec<Edge>,
    succ: Vec<Vec<(VertexId, EdgeId)>>,
    pred: Vec<Vec<(VertexId, EdgeId)>>,
}

impl From<Graph> for GraphData {
    fn from(g: Graph) -> Self {
        GraphData {
            vertex_count: g.vertex_count(),
            edges: g.edges.iter().map(|e| (e.source.0, e.target.0)).collect(),
        }
    }
}

impl TryFrom<GraphData> for Graph {
    type Error = Error;

    fn try_from(data: GraphData) -> Result<Self> {
        let mut g = Graph::with_vertices(data.vertex_count);
        for (s, t) in data.edges {
            g.add_edge(VertexId(s), VertexId(t))?;
        }
        Ok(g)
    }
}

impl Graph {
    pub fn with_vertices(n: usize) -> Self {
        Graph { edges: Vec::new(), succ: vec![Vec::new(); n], pred: vec![Vec::new(); n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.succ.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        VertexId(self.succ.len() - 1)
    }

    /// Adds the directed edge `source -> target`. Self-loops and duplicates are rejected.
    pub fn add_edge(&mut self, source: VertexId, target: VertexId) -> Result<EdgeId> {
        let edge = Edge { source, target };
        if !self.contains(source) {
            return Err(Error::UnknownVertex(source));
        }
        if !self.contains(target) {
            return Err(Error::UnknownVertex(target));
        }
        if source == target {
            return Err(Error::InvalidParameter(format!("self-loop {edge}")));
        }
        let out = &mut self.succ[source.0];
        let pos = match out.binary_search_by_key(&target, |&(v, _)| v) {
            Ok(_) => return Err(Error::InvalidParameter(format!("duplicate edge {edge}"))),
            Err(pos) => pos,
        };
        let id = EdgeId(self.edges.len());
        out.insert(pos, (target, id));
        let inc = &mut self.pred[target.0];
        let pos = inc.binary_search_by_key(&source, |&(v, _)| v).unwrap_err();
        inc.insert(pos, (source, id));
        self.edges.push(edge);
        Ok(id)
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, source: VertexId, target: VertexId) -> Option<EdgeId> {
        let out = self.succ.get(source.0)?;
        out.binary_search_by_key(&target, |&(v, _)| v).ok().map(|i| out[i].1)
    }

    pub fn require_edge(&self, edge: Edge) -> Result<EdgeId> {
        self.edge_id(edge.source, edge.target).ok_or(Error::UnknownEdge(edge))
    }

    /// Outgoing `(target, edge)` pairs in ascending target order.
    pub fn out_edges(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.succ[v.0]
    }

    /// Incoming `(source, edge)` pairs in ascending source order.
    pub fn in_edges(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.pred[v.0]
    }

    pub fn succ(&self, v: VertexId) -> Vec<VertexId> {
        self.succ[v.0].iter().map(|&(u, _)| u).collect()
    }

    pub fn pred(&self, v: VertexId) -> Vec<VertexId> {
        self.pred[v.0].iter().map(|&(u, _)| u).collect()
    }
}

/// Serde helpers that encode `+inf` as the string `"inf"` (JSON has no infinity).
pub mod serde_cost {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::Cost;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(c: &Cost, s: S) -> Result<S::Ok, S::Error> {
        if c.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*c)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Cost, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(de::Error::custom(format!("expected number or \"inf\", got {t:?}"))),
        }
    }

    pub mod vec {
        use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        use super::super::Cost;

        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "super")] Cost);

        pub fn serialize<S: Serializer>(v: &[Cost], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for c in v {
                if c.is_infinite() {
                    seq.serialize_element("inf")?;
                } else {
                    seq.serialize_element(c)?;
                }
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Cost>, D::Error> {
            let raw: Vec<Wrapped> = Vec::deserialize(d)?;
            Ok(raw.into_iter().map(|w| w.0).collect())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeChange {
    pub edge: Edge,
    /// New true weight of the edge.
    #[serde(with = "serde_cost")]
    pub weight: Cost,
}

/// A set of edges whose true weights changed between two epochs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChangeBatch {
    pub changes: Vec<EdgeChange>,
}

impl ChangeBatch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, edge: Edge, weight: Cost) {
        self.changes.push(EdgeChange { edge, weight });
    }

    pub fn len(&self) -> usize {
        self.changes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EdgeChange> {
        self.changes.iter()
    }
}

impl FromIterator<(Edge, Cost)> for ChangeBatch {
    fn from_iter<I: IntoIterator<Item = (Edge, Cost)>>(iter: I) -> Self {
        ChangeBatch { changes: iter.into_iter().map(|(edge, weight)| EdgeChange { edge, weight }).collect() }
    }
}
