//! Planar graphs given by rotation systems.
//!
//! A graph file is line oriented. Vertices, edges and the counterclockwise
//! rotation at every vertex of positive degree are declared explicitly; the
//! embedding is never inferred.
//!
//! ```text
//! vertex a vplus slope 1/1
//! vertex b slope 1/1
//! edge e a b slope -1/1
//! rotation a: e.t
//! rotation b: e.h
//! ```

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::surgery::Slope;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("self-loop: edge `{0}` has the same tail and head")]
    SelfLoop(String),
    #[error("dart {0} is listed in more than one rotation position")]
    DartRepeated(String),
    #[error("dart {0} is missing from every rotation")]
    DartMissing(String),
    #[error("dart {dart} appears in the rotation of `{vertex}` but is not incident to it")]
    DartMisplaced { dart: String, vertex: String },
    #[error("duplicate {kind} id `{id}`")]
    Duplicate { kind: &'static str, id: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("component containing `{vertex}` has genus {genus} ({faces} faces); the embedding is not spherical")]
    NonPlanar {
        vertex: String,
        genus: i64,
        faces: usize,
    },
}

/// Which end of an edge a dart sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Tail,
    Head,
}

/// A half-edge: an edge index together with one of its ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: usize,
    pub end: End,
}

impl Dart {
    pub fn twin(self) -> Dart {
        Dart {
            edge: self.edge,
            end: match self.end {
                End::Tail => End::Head,
                End::Head => End::Tail,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    /// Darts at this vertex in counterclockwise order.
    pub rotation: Vec<Dart>,
    pub vplus: bool,
    pub slope: Option<Slope>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub slope: Option<Slope>,
}

/// A finite graph with a combinatorial embedding.
///
/// Vertices and edges are stored sorted by id (numeric ids compare
/// numerically), so "lowest id" and "lowest index" coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// An undirected cycle `v1, e1, v2, e2, ..., vk, ek` with `ei` joining
/// `vi` and `v(i+1)`. The exponent of `ei` is `-1` exactly when `ei` is
/// oriented from `vi` to `v(i+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedCycle {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub exponents: Vec<i32>,
}

impl OrientedCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentFaces {
    /// Lowest vertex of the component.
    pub root: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceReport {
    pub components: Vec<ComponentFaces>,
}

impl FaceReport {
    pub fn is_spherical(&self) -> bool {
        self.components.iter().all(|c| c.genus == 0)
    }
}

/// Orders ids numerically when both are integers, otherwise lexicographically,
/// with numeric ids first.
pub fn compare_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<i128>(), b.parse::<i128>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

fn valid_id(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Raw declarations, prior to validation.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    vertices: Vec<(String, bool, Option<Slope>)>,
    edges: Vec<(String, String, String, Option<Slope>)>,
    rotations: Vec<(String, Vec<(String, End)>)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: &str, vplus: bool, slope: Option<Slope>) -> &mut Self {
        self.vertices.push((id.to_string(), vplus, slope));
        self
    }

    pub fn edge(&mut self, id: &str, tail: &str, head: &str, slope: Option<Slope>) -> &mut Self {
        self.edges
            .push((id.to_string(), tail.to_string(), head.to_string(), slope));
        self
    }

    pub fn rotation(&mut self, vertex: &str, darts: &[(&str, End)]) -> &mut Self {
        self.rotations.push((
            vertex.to_string(),
            darts.iter().map(|(e, end)| (e.to_string(), *end)).collect(),
        ));
        self
    }

    pub fn build(&self) -> Result<PlanarGraph, GraphError> {
        let mut vdecl = self.vertices.clone();
        vdecl.sort_by(|a, b| compare_ids(&a.0, &b.0));
        for w in vdecl.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GraphError::Duplicate {
                    kind: "vertex",
                    id: w[0].0.clone(),
                });
            }
        }
        let vindex: HashMap<&str, usize> = vdecl
            .iter()
            .enumerate()
            .map(|(i, v)| (v.0.as_str(), i))
            .collect();

        let mut edecl = self.edges.clone();
        edecl.sort_by(|a, b| compare_ids(&a.0, &b.0));
        for w in edecl.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GraphError::Duplicate {
                    kind: "edge",
                    id: w[0].0.clone(),
                });
            }
        }
        let mut edges = Vec::with_capacity(edecl.len());
        for (id, t, h, slope) in &edecl {
            let tail = *vindex
                .get(t.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(t.clone()))?;
            let head = *vindex
                .get(h.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(h.clone()))?;
            if tail == head {
                return Err(GraphError::SelfLoop(id.clone()));
            }
            edges.push(Edge {
                id: id.clone(),
                tail,
                head,
                slope: *slope,
            });
        }
        let eindex: HashMap<&str, usize> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.as_str(), i))
            .collect();

        let mut rotations: Vec<Option<Vec<Dart>>> = vec![None; vdecl.len()];
        let mut seen: HashMap<Dart, ()> = HashMap::new();
        for (vid, darts) in &self.rotations {
            let v = *vindex
                .get(vid.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(vid.clone()))?;
            if rotations[v].is_some() {
                return Err(GraphError::Duplicate {
                    kind: "rotation",
                    id: vid.clone(),
                });
            }
            let mut rot = Vec::with_capacity(darts.len());
            for (eid, end) in darts {
                let e = *eindex
                    .get(eid.as_str())
                    .ok_or_else(|| GraphError::UnknownEdge(eid.clone()))?;
                let dart = Dart { edge: e, end: *end };
                let name = dart_name(&edges[e].id, *end);
                let at = match end {
                    End::Tail => edges[e].tail,
                    End::Head => edges[e].head,
                };
                if at != v {
                    return Err(GraphError::DartMisplaced {
                        dart: name,
                        vertex: vid.clone(),
                    });
                }
                if seen.insert(dart, ()).is_some() {
                    return Err(GraphError::DartRepeated(name));
                }
                rot.push(dart);
            }
            rotations[v] = Some(rot);
        }
        for (e, edge) in edges.iter().enumerate() {
            for end in [End::Tail, End::Head] {
                if !seen.contains_key(&Dart { edge: e, end }) {
                    return Err(GraphError::DartMissing(dart_name(&edge.id, end)));
                }
            }
        }
        let vertices = vdecl
            .into_iter()
            .zip(rotations)
            .map(|((id, vplus, slope), rot)| Vertex {
                id,
                rotation: rot.unwrap_or_default(),
                vplus,
                slope,
            })
            .collect();
        Ok(PlanarGraph { vertices, edges })
    }
}

fn dart_name(edge: &str, end: End) -> String {
    match end {
        End::Tail => format!("{edge}.t"),
        End::Head => format!("{edge}.h"),
    }
}

impl PlanarGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].rotation.len()
    }

    /// The vertex a dart is attached to.
    pub fn dart_vertex(&self, d: Dart) -> usize {
        let e = &self.edges[d.edge];
        match d.end {
            End::Tail => e.tail,
            End::Head => e.head,
        }
    }

    /// The endpoint of `e` other than `v`.
    pub fn opposite(&self, e: usize, v: usize) -> usize {
        let edge = &self.edges[e];
        if edge.tail == v {
            edge.head
        } else {
            edge.tail
        }
    }

    /// Sign convention at a vertex: `-1` if `v` is the head of `e`, `+1` if the tail.
    pub fn vertex_sign(&self, v: usize, e: usize) -> i32 {
        if self.edges[e].head == v {
            -1
        } else {
            1
        }
    }

    /// Incident edges of `v` in counterclockwise order.
    pub fn rotation_edges(&self, v: usize) -> Vec<usize> {
        self.vertices[v].rotation.iter().map(|d| d.edge).collect()
    }

    pub fn vplus(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.vertices[v].vplus)
            .collect()
    }

    /// Connected components as sorted vertex lists, ordered by lowest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![];
            let mut queue = VecDeque::from([start]);
            comp[start] = id;
            while let Some(v) = queue.pop_front() {
                members.push(v);
                for d in &self.vertices[v].rotation {
                    let w = self.opposite(d.edge, v);
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Traces the faces of the rotation system and reports the genus of every
    /// component.
    pub fn face_report(&self) -> FaceReport {
        // position of every dart inside its vertex rotation
        let mut pos: HashMap<Dart, (usize, usize)> = HashMap::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            for (i, d) in vert.rotation.iter().enumerate() {
                pos.insert(*d, (v, i));
            }
        }
        let mut visited: HashMap<Dart, bool> = HashMap::new();
        let mut components = Vec::new();
        for members in self.components() {
            let mut faces = 0usize;
            let mut edges = 0usize;
            for &v in &members {
                edges += self.vertices[v].rotation.len();
            }
            edges /= 2;
            if edges == 0 {
                faces = 1;
            } else {
                for &v in &members {
                    for &d in &self.vertices[v].rotation {
                        if visited.contains_key(&d) {
                            continue;
                        }
                        faces += 1;
                        let mut cur = d;
                        loop {
                            visited.insert(cur, true);
                            // leave along `cur`, arrive at its twin, turn to the next dart
                            let (w, i) = pos[&cur.twin()];
                            let rot = &self.vertices[w].rotation;
                            cur = rot[(i + 1) % rot.len()];
                            if cur == d {
                                break;
                            }
                        }
                    }
                }
            }
            let chi = members.len() as i64 - edges as i64 + faces as i64;
            components.push(ComponentFaces {
                root: members[0],
                vertices: members.len(),
                edges,
                faces,
                genus: (2 - chi) / 2,
            });
        }
        FaceReport { components }
    }

    /// Succeeds with the face report iff every component is spherical.
    pub fn validate_embedding(&self) -> Result<FaceReport, GraphError> {
        let report = self.face_report();
        if let Some(c) = report.components.iter().find(|c| c.genus != 0) {
            return Err(GraphError::NonPlanar {
                vertex: self.vertices[c.root].id.clone(),
                genus: c.genus,
                faces: c.faces,
            });
        }
        Ok(report)
    }

    /// Fundamental cycles of a breadth-first spanning forest grown from the
    /// lowest vertex of each component, scanning incident edges by edge index.
    pub fn cycle_basis(&self) -> Vec<OrientedCycle> {
        let n = self.vertices.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut tree_edge = vec![false; self.edges.len()];
        for root in 0..n {
            if depth[root] != usize::MAX {
                continue;
            }
            depth[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                let mut inc = self.rotation_edges(v);
                inc.sort_unstable();
                for e in inc {
                    let w = self.opposite(e, v);
                    if depth[w] == usize::MAX {
                        depth[w] = depth[v] + 1;
                        parent[w] = Some((v, e));
                        tree_edge[e] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut cycles = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if tree_edge[e] {
                continue;
            }
            // walk t -> h along e, then back to t through the tree
            let (t, h) = (edge.tail, edge.head);
            let mut up_h = vec![h];
            let mut up_t = vec![t];
            let (mut a, mut b) = (h, t);
            while a != b {
                if depth[a] >= depth[b] {
                    a = parent[a].expect("non-root").0;
                    up_h.push(a);
                } else {
                    b = parent[b].expect("non-root").0;
                    up_t.push(b);
                }
            }
            // up_h: h .. lca, up_t: t .. lca
            let mut verts = up_h.clone();
            for &v in up_t.iter().rev().skip(1) {
                verts.push(v);
            }
            // verts: h, ..., lca, ..., t ; cycle vertices: t, h, ..., (before t)
            let mut vertices = vec![t];
            vertices.extend(verts[..verts.len() - 1].iter().copied());
            let k = vertices.len();
            let mut edges = Vec::with_capacity(k);
            let mut exponents = Vec::with_capacity(k);
            for i in 0..k {
                let vi = vertices[i];
                let vn = vertices[(i + 1) % k];
                let ei = if i == 0 {
                    e
                } else if depth[vi] > depth[vn] {
                    parent[vi].unwrap().1
                } else {
                    parent[vn].unwrap().1
                };
                edges.push(ei);
                let oriented_forward = self.edges[ei].tail == vi && self.edges[ei].head == vn;
                exponents.push(if oriented_forward { -1 } else { 1 });
            }
            cycles.push(OrientedCycle {
                vertices,
                edges,
                exponents,
            });
        }
        cycles
    }

    /// For every component (ordered by lowest vertex), whether it contains a
    /// vertex of the marked set.
    pub fn coverage(&self, marked: &[usize]) -> Vec<bool> {
        self.components()
            .iter()
            .map(|c| c.iter().any(|v| marked.contains(v)))
            .collect()
    }

    pub fn vplus_coverage(&self) -> Vec<bool> {
        self.coverage(&self.vplus())
    }

    /// Replaces the V+ marks.
    pub fn with_vplus(&self, vplus: &[usize]) -> PlanarGraph {
        let mut g = self.clone();
        for (i, v) in g.vertices.iter_mut().enumerate() {
            v.vplus = vplus.contains(&i);
        }
        g
    }

    /// Content hash of the canonical serialization.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

impl fmt::Display for PlanarGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            write!(f, "vertex {}", v.id)?;
            if v.vplus {
                write!(f, " vplus")?;
            }
            if let Some(s) = v.slope {
                write!(f, " slope {s}")?;
            }
            writeln!(f)?;
        }
        for e in &self.edges {
            write!(
                f,
                "edge {} {} {}",
                e.id, self.vertices[e.tail].id, self.vertices[e.head].id
            )?;
            if let Some(s) = e.slope {
                write!(f, " slope {s}")?;
            }
            writeln!(f)?;
        }
        for v in &self.vertices {
            if v.rotation.is_empty() {
                continue;
            }
            write!(f, "rotation {}:", v.id)?;
            for d in &v.rotation {
                write!(f, " {}", dart_name(&self.edges[d.edge].id, d.end))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for PlanarGraph {
    type Err = GraphError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_graph(text)
    }
}

struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Tokens<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut start = None;
        for (i, c) in text.char_indices() {
            if c.is_whitespace() {
                if let Some(s) = start.take() {
                    items.push((s, &text[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            items.push((s, &text[s..]));
        }
        Tokens { line, items, at: 0 }
    }

    fn err(&self, column: usize, message: impl Into<String>) -> GraphError {
        GraphError::Syntax {
            line: self.line,
            column: column + 1,
            message: message.into(),
        }
    }

    fn end_column(&self) -> usize {
        self.items.last().map(|(c, s)| c + s.len()).unwrap_or(0)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), GraphError> {
        let item = self
            .items
            .get(self.at)
            .copied()
            .ok_or_else(|| self.err(self.end_column(), format!("expected {what}")))?;
        self.at += 1;
        Ok(item)
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.at).copied()
    }

    fn id(&mut self, what: &str) -> Result<&'a str, GraphError> {
        let (col, s) = self.next(what)?;
        if !valid_id(s) {
            return Err(self.err(col, format!("invalid {what} `{s}`")));
        }
        Ok(s)
    }

    fn slope(&mut self) -> Result<Slope, GraphError> {
        let (col, s) = self.next("slope p/q")?;
        s.parse::<Slope>()
            .map_err(|e| self.err(col, format!("invalid slope `{s}`: {e}")))
    }

    fn finish(&self) -> Result<(), GraphError> {
        match self.peek() {
            Some((col, s)) => Err(self.err(col, format!("unexpected `{s}`"))),
            None => Ok(()),
        }
    }
}

/// Parses the line-oriented graph format.
pub fn parse_graph(text: &str) -> Result<PlanarGraph, GraphError> {
    let mut b = GraphBuilder::new();
    for (n, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut t = Tokens::new(n + 1, content);
        let Some((col, kw)) = t.peek() else { continue };
        t.at += 1;
        match kw {
            "vertex" => {
                let id = t.id("vertex id")?;
                let mut vplus = false;
                let mut slope = None;
                while let Some((c, s)) = t.peek() {
                    t.at += 1;
                    match s {
                        "vplus" if !vplus => vplus = true,
                        "slope" if slope.is_none() => slope = Some(t.slope()?),
                        _ => return Err(t.err(c, format!("unexpected `{s}`"))),
                    }
                }
                b.vertex(id, vplus, slope);
            }
            "edge" => {
                let id = t.id("edge id")?;
                let tail = t.id("tail vertex")?;
                let head = t.id("head vertex")?;
                let mut slope = None;
                if let Some((c, s)) = t.peek() {
                    t.at += 1;
                    if s != "slope" {
                        return Err(t.err(c, format!("unexpected `{s}`")));
                    }
                    slope = Some(t.slope()?);
                }
                t.finish()?;
                b.edge(id, tail, head, slope);
            }
            "rotation" => {
                let (c, s) = t.next("vertex id")?;
                let vid = s
                    .strip_suffix(':')
                    .ok_or_else(|| t.err(c + s.len(), "expected `:` after rotation vertex"))?;
                if !valid_id(vid) {
                    return Err(t.err(c, format!("invalid vertex id `{vid}`")));
                }
                let mut darts = Vec::new();
                while let Some((c, s)) = t.peek() {
                    t.at += 1;
                    let (e, end) = s
                        .rsplit_once('.')
                        .ok_or_else(|| t.err(c, format!("expected <edge>.<t|h>, got `{s}`")))?;
                    let end = match end {
                        "t" => End::Tail,
                        "h" => End::Head,
                        _ => return Err(t.err(c + e.len() + 1, "dart end must be `t` or `h`")),
                    };
                    if !valid_id(e) {
                        return Err(t.err(c, format!("invalid edge id `{e}`")));
                    }
                    darts.push((e, end));
                }
                b.rotation(vid, &darts);
            }
            other => return Err(t.err(col, format!("unknown record `{other}`"))),
        }
    }
    b.build()
}
