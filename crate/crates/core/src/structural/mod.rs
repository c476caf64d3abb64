//! Exhaustive case analysis showing that no proper left total preorder on a
//! chainmail link group detects negative edge slopes and positive vertex
//! slopes.
//!
//! Every preorder induces one sign class on each edge longitude. For each
//! of the `3^|E|` assignments the engine either finds a directed cycle in
//! the tilde graph or propagates residue membership through every vertex.

mod trace;

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::PlanarGraph;
use crate::orderability::SignClass;

pub use trace::{check_trace, check_trace_text, TraceError};

/// Sign class of every edge longitude, indexed by edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeStateMap(pub Vec<SignClass>);

impl EdgeStateMap {
    /// Digit `i` (most significant first) is edge `i`: 0 RES, 1 POS, 2 NEG.
    pub fn from_index(edges: usize, mut index: u64) -> Self {
        let mut states = vec![SignClass::Res; edges];
        for slot in states.iter_mut().rev() {
            *slot = match index % 3 {
                0 => SignClass::Res,
                1 => SignClass::Pos,
                _ => SignClass::Neg,
            };
            index /= 3;
        }
        EdgeStateMap(states)
    }

    pub fn index(&self) -> u64 {
        self.0.iter().fold(0, |acc, s| acc * 3 + digit(*s))
    }

    /// The ternary digit string, or `-` for a graph without edges.
    pub fn ternary(&self) -> String {
        if self.0.is_empty() {
            return "-".to_string();
        }
        self.0.iter().map(|s| char::from(b'0' + digit(*s) as u8)).collect()
    }

    pub fn parse_ternary(text: &str, edges: usize) -> Option<Self> {
        if text == "-" {
            return (edges == 0).then(|| EdgeStateMap(Vec::new()));
        }
        if text.len() != edges {
            return None;
        }
        text.chars()
            .map(|c| match c {
                '0' => Some(SignClass::Res),
                '1' => Some(SignClass::Pos),
                '2' => Some(SignClass::Neg),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(EdgeStateMap)
    }
}

fn digit(s: SignClass) -> u64 {
    match s {
        SignClass::Res => 0,
        SignClass::Pos => 1,
        SignClass::Neg => 2,
    }
}

/// Directed graph on the vertices; arcs are `(from, to, edge)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeGraph {
    pub vertices: usize,
    pub arcs: Vec<(usize, usize, usize)>,
}

impl TildeGraph {
    pub fn isolated(&self) -> Vec<bool> {
        let mut iso = vec![true; self.vertices];
        for &(a, b, _) in &self.arcs {
            iso[a] = false;
            iso[b] = false;
        }
        iso
    }

    pub fn reversed(&self) -> TildeGraph {
        TildeGraph {
            vertices: self.vertices,
            arcs: self.arcs.iter().map(|&(a, b, e)| (b, a, e)).collect(),
        }
    }

    /// Predecessors of every vertex, sorted.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![BTreeSet::new(); self.vertices];
        for &(a, b, _) in &self.arcs {
            preds[b].insert(a);
        }
        preds.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Kahn's algorithm, lowest vertex first. Returns the order, or the
    /// vertices left over when a cycle blocks it.
    pub fn topological_order(&self) -> Result<Vec<usize>, Vec<usize>> {
        let mut indeg = vec![0usize; self.vertices];
        let mut out = vec![Vec::new(); self.vertices];
        for &(a, b, _) in &self.arcs {
            indeg[b] += 1;
            out[a].push(b);
        }
        let mut ready: BTreeSet<usize> = (0..self.vertices).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.vertices);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if order.len() == self.vertices {
            Ok(order)
        } else {
            Err((0..self.vertices).filter(|&v| indeg[v] > 0).collect())
        }
    }

    /// A simple directed cycle as `(vertex, outgoing edge)` pairs, found by
    /// walking backwards from the lowest blocked vertex.
    fn find_cycle(&self, blocked: &[usize]) -> Vec<(usize, usize)> {
        let live: BTreeSet<usize> = blocked.iter().copied().collect();
        let mut into: Vec<Option<(usize, usize)>> = vec![None; self.vertices];
        for &(a, b, e) in &self.arcs {
            if live.contains(&a) && live.contains(&b) {
                let better = match into[b] {
                    None => true,
                    Some((_, f)) => e < f,
                };
                if better {
                    into[b] = Some((a, e));
                }
            }
        }
        let mut seen = vec![usize::MAX; self.vertices];
        let mut path = Vec::new();
        let mut v = blocked[0];
        while seen[v] == usize::MAX {
            seen[v] = path.len();
            let (a, e) = into[v].expect("blocked vertex has a live predecessor");
            path.push((a, e));
            v = a;
        }
        // path[i] is the arc into the i-th visited vertex; cut the loop and
        // reverse it into forward direction
        let mut cycle: Vec<(usize, usize)> = path[seen[v]..].to_vec();
        cycle.reverse();
        cycle
    }
}

/// Arcs per the sign of each edge longitude: POS points tail to head, NEG
/// head to tail, RES edges are absent.
pub fn build_tilde(g: &PlanarGraph, st: &EdgeStateMap) -> TildeGraph {
    let arcs = g
        .edges()
        .iter()
        .enumerate()
        .filter_map(|(i, e)| match st.0[i] {
            SignClass::Pos => Some((e.tail, e.head, i)),
            SignClass::Neg => Some((e.head, e.tail, i)),
            SignClass::Res => None,
        })
        .collect();
    TildeGraph {
        vertices: g.vertices().len(),
        arcs,
    }
}

/// What the propagation established at one vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SStatus {
    /// Bounded above by a power of the longitude; holds once every predecessor
    /// has `s23`. Records the predecessors consumed.
    pub s1: Option<Vec<usize>>,
    /// Bounded below, and every vertex meridian at most one. Requires `s1`
    /// and either membership in V+ or an arc at the vertex.
    pub s23: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureStep {
    /// Established by both passes.
    Seed(usize),
    /// An isolated vertex reached across an edge from the closure.
    Edge { vertex: usize, edge: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueProof {
    pub order: Vec<usize>,
    pub forward: Vec<SStatus>,
    pub mirror_order: Vec<usize>,
    pub mirror: Vec<SStatus>,
    pub closure: Vec<ClosureStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseOutcome {
    /// A directed cycle, as `(vertex, edge to the next vertex)` pairs.
    Cycle(Vec<(usize, usize)>),
    Residue(ResidueProof),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub states: EdgeStateMap,
    pub outcome: CaseOutcome,
}

/// A case whose closure stopped short of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survivor {
    pub states: EdgeStateMap,
    pub proof: ResidueProof,
    pub missing: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub graph: String,
    pub vplus: Vec<usize>,
    pub origin: usize,
    /// The reduction to a conjugate preorder, stated once for all cases.
    pub preamble: String,
    pub cases: Vec<Case>,
}

pub const PREAMBLE: &str = "replacing the preorder by a conjugate moves the single-pair detection at the origin onto its listed meridian-longitude pair";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructuralError {
    #[error("component containing vertex `{0}` has no vertex in V+")]
    Uncovered(String),
    #[error("origin vertex `{0}` is not in V+")]
    OriginOutside(String),
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("component containing `{vertex}` has genus {genus}")]
    NonPlanar { vertex: String, genus: i64 },
    #[error("case {} survived: closure misses {} vertices", .0.states.ternary(), .0.missing.len())]
    Survived(Box<Survivor>),
    #[error("could not build a worker pool: {0}")]
    Pool(String),
}

fn pass(t: &TildeGraph, order: &[usize], vplus: &[bool], isolated: &[bool]) -> Vec<SStatus> {
    let preds = t.predecessors();
    let mut table = vec![SStatus::default(); t.vertices];
    for &v in order {
        if preds[v].iter().all(|&u| table[u].s23) {
            table[v].s1 = Some(preds[v].clone());
            table[v].s23 = vplus[v] || !isolated[v];
        }
    }
    table
}

/// Seeds, then a breadth-first flood across edges into isolated vertices,
/// scanning vertices and their rotations in index order.
fn closure(g: &PlanarGraph, seeds: &[bool], isolated: &[bool]) -> (Vec<ClosureStep>, Vec<bool>) {
    let n = g.vertices().len();
    let mut inside = seeds.to_vec();
    let mut steps: Vec<ClosureStep> = (0..n).filter(|&v| seeds[v]).map(ClosureStep::Seed).collect();
    let mut frontier: Vec<usize> = (0..n).filter(|&v| seeds[v]).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            let mut incident = g.rotation_edges(v);
            incident.sort_unstable();
            incident.dedup();
            for e in incident {
                let w = g.opposite(e, v);
                if !inside[w] && isolated[w] {
                    inside[w] = true;
                    steps.push(ClosureStep::Edge { vertex: w, edge: e });
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    (steps, inside)
}

/// Runs one case. `Err` carries a surviving case.
pub fn analyze_case(g: &PlanarGraph, vplus: &[usize], st: &EdgeStateMap) -> Result<CaseOutcome, Box<Survivor>> {
    let t = build_tilde(g, st);
    let order = match t.topological_order() {
        Ok(o) => o,
        Err(blocked) => return Ok(CaseOutcome::Cycle(t.find_cycle(&blocked))),
    };
    let n = t.vertices;
    let mut marks = vec![false; n];
    for &v in vplus {
        marks[v] = true;
    }
    let isolated = t.isolated();
    let forward = pass(&t, &order, &marks, &isolated);
    let r = t.reversed();
    let mirror_order = r.topological_order().expect("reversal keeps acyclicity");
    let mirror = pass(&r, &mirror_order, &marks, &isolated);
    let seeds: Vec<bool> = (0..n).map(|v| forward[v].s23 && mirror[v].s23).collect();
    let (steps, inside) = closure(g, &seeds, &isolated);
    let proof = ResidueProof {
        order,
        forward,
        mirror_order,
        mirror,
        closure: steps,
    };
    let missing: Vec<usize> = (0..n).filter(|&v| !inside[v]).collect();
    if missing.is_empty() {
        Ok(CaseOutcome::Residue(proof))
    } else {
        Err(Box::new(Survivor {
            states: st.clone(),
            proof,
            missing,
        }))
    }
}

pub(crate) fn check_preconditions(g: &PlanarGraph, vplus: &[usize], origin: usize) -> Result<(), StructuralError> {
    let n = g.vertices().len();
    if let Some(&v) = vplus.iter().chain([&origin]).find(|&&v| v >= n) {
        return Err(StructuralError::UnknownVertex(v));
    }
    let report = g.face_report();
    if let Some(c) = report.components.iter().find(|c| c.genus != 0) {
        return Err(StructuralError::NonPlanar {
            vertex: g.vertex(c.root).id.clone(),
            genus: c.genus,
        });
    }
    for (comp, covered) in g.components().iter().zip(g.coverage(vplus)) {
        if !covered {
            return Err(StructuralError::Uncovered(g.vertex(comp[0]).id.clone()));
        }
    }
    if !vplus.contains(&origin) {
        return Err(StructuralError::OriginOutside(g.vertex(origin).id.clone()));
    }
    Ok(())
}

/// Analyzes all `3^|E|` cases on `jobs` worker threads and assembles them in
/// case order.
pub fn prove_non_detection(
    g: &PlanarGraph,
    vplus: &[usize],
    origin: usize,
    jobs: usize,
) -> Result<ProofTrace, StructuralError> {
    check_preconditions(g, vplus, origin)?;
    let mut vplus = vplus.to_vec();
    vplus.sort_unstable();
    vplus.dedup();
    let edges = g.edges().len();
    let total = 3u64.pow(edges as u32);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| StructuralError::Pool(e.to_string()))?;
    let results: Vec<Result<Case, Box<Survivor>>> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|k| {
                let st = EdgeStateMap::from_index(edges, k);
                analyze_case(g, &vplus, &st).map(|outcome| Case { states: st, outcome })
            })
            .collect()
    });
    let mut cases = Vec::with_capacity(results.len());
    for r in results {
        cases.push(r.map_err(StructuralError::Survived)?);
    }
    Ok(ProofTrace {
        graph: g.content_hash(),
        vplus,
        origin,
        preamble: PREAMBLE.to_string(),
        cases,
    })
}
