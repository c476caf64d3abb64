//! Text form of proof traces and the checker.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::{
    build_tilde, check_preconditions, pass, Case, CaseOutcome, ClosureStep, EdgeStateMap, ProofTrace,
    ResidueProof, SStatus, StructuralError, TildeGraph,
};
use crate::graph::PlanarGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("trace is for graph {found}, expected {expected}")]
    GraphMismatch { expected: String, found: String },
    #[error(transparent)]
    Preconditions(#[from] StructuralError),
    #[error("expected {expected} cases, found {found}")]
    Incomplete { expected: u64, found: usize },
    #[error("case {position} has index {found}, expected {expected}")]
    OutOfOrder {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("case {case}: {reason}")]
    Invalid { case: String, reason: String },
}

fn invalid(st: &EdgeStateMap, reason: impl Into<String>) -> TraceError {
    TraceError::Invalid {
        case: st.ternary(),
        reason: reason.into(),
    }
}

/// Checks a trace against the graph without trusting any of the engine's
/// intermediate results.
pub fn check_trace(g: &PlanarGraph, t: &ProofTrace) -> Result<(), TraceError> {
    let hash = g.content_hash();
    if t.graph != hash {
        return Err(TraceError::GraphMismatch {
            expected: hash,
            found: t.graph.clone(),
        });
    }
    check_preconditions(g, &t.vplus, t.origin)?;
    let edges = g.edges().len();
    let expected = 3u64.pow(edges as u32);
    if t.cases.len() as u64 != expected {
        return Err(TraceError::Incomplete {
            expected,
            found: t.cases.len(),
        });
    }
    let mut vplus = vec![false; g.vertices().len()];
    for &v in &t.vplus {
        vplus[v] = true;
    }
    for (k, case) in t.cases.iter().enumerate() {
        let want = EdgeStateMap::from_index(edges, k as u64);
        if case.states != want {
            return Err(TraceError::OutOfOrder {
                position: k,
                expected: want.ternary(),
                found: case.states.ternary(),
            });
        }
        check_case(g, &vplus, case)?;
    }
    Ok(())
}

fn check_case(g: &PlanarGraph, vplus: &[bool], case: &Case) -> Result<(), TraceError> {
    let st = &case.states;
    let t = build_tilde(g, st);
    match &case.outcome {
        CaseOutcome::Cycle(cycle) => check_cycle(&t, cycle).map_err(|r| invalid(st, r)),
        CaseOutcome::Residue(proof) => check_residue(g, &t, vplus, proof).map_err(|r| invalid(st, r)),
    }
}

fn check_cycle(t: &TildeGraph, cycle: &[(usize, usize)]) -> Result<(), String> {
    if cycle.len() < 2 {
        return Err("a directed cycle needs at least two vertices".into());
    }
    let mut seen = HashSet::new();
    for (i, &(v, e)) in cycle.iter().enumerate() {
        if !seen.insert(v) {
            return Err(format!("vertex {v} repeats in the cycle"));
        }
        let next = cycle[(i + 1) % cycle.len()].0;
        if !t.arcs.contains(&(v, next, e)) {
            return Err(format!("no arc {v} -> {next} along edge {e}"));
        }
    }
    Ok(())
}

fn check_order(t: &TildeGraph, order: &[usize]) -> Result<Vec<usize>, String> {
    let n = t.vertices;
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err("order is not a permutation of the vertices".into());
        }
        pos[v] = i;
    }
    if order.len() != n {
        return Err("order is not a permutation of the vertices".into());
    }
    for &(a, b, e) in &t.arcs {
        if pos[a] > pos[b] {
            return Err(format!("arc along edge {e} runs against the order"));
        }
    }
    Ok(pos)
}

fn check_table(t: &TildeGraph, order: &[usize], table: &[SStatus], vplus: &[bool]) -> Result<(), String> {
    let pos = check_order(t, order)?;
    if table.len() != t.vertices {
        return Err("status table has the wrong size".into());
    }
    let preds = t.predecessors();
    let isolated = t.isolated();
    for (v, s) in table.iter().enumerate() {
        if let Some(consumed) = &s.s1 {
            if *consumed != preds[v] {
                return Err(format!("vertex {v} consumes the wrong predecessors"));
            }
            if let Some(&u) = consumed.iter().find(|&&u| !table[u].s23 || pos[u] >= pos[v]) {
                return Err(format!("vertex {v} uses predecessor {u} before it is established"));
            }
        }
        if s.s23 && (s.s1.is_none() || !(vplus[v] || !isolated[v])) {
            return Err(format!("vertex {v} lifts without its side conditions"));
        }
    }
    Ok(())
}

fn check_residue(g: &PlanarGraph, t: &TildeGraph, vplus: &[bool], p: &ResidueProof) -> Result<(), String> {
    check_table(t, &p.order, &p.forward, vplus).map_err(|e| format!("forward pass: {e}"))?;
    let r = t.reversed();
    check_table(&r, &p.mirror_order, &p.mirror, vplus).map_err(|e| format!("mirror pass: {e}"))?;
    let n = t.vertices;
    let isolated = t.isolated();
    let mut inside = vec![false; n];
    for step in &p.closure {
        match *step {
            ClosureStep::Seed(v) => {
                if v >= n || !(p.forward[v].s23 && p.mirror[v].s23) {
                    return Err(format!("seed {v} is not established by both passes"));
                }
                inside[v] = true;
            }
            ClosureStep::Edge { vertex, edge } => {
                if vertex >= n || edge >= g.edges().len() {
                    return Err("closure step out of range".into());
                }
                let e = g.edge(edge);
                if e.tail != vertex && e.head != vertex {
                    return Err(format!("edge {edge} does not meet vertex {vertex}"));
                }
                if !inside[g.opposite(edge, vertex)] {
                    return Err(format!("edge {edge} does not start in the closure"));
                }
                if !isolated[vertex] {
                    return Err(format!("vertex {vertex} is not isolated"));
                }
                inside[vertex] = true;
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| !inside[v]) {
        return Err(format!("closure misses vertex {v}"));
    }
    Ok(())
}

impl ProofTrace {
    pub fn to_text(&self, g: &PlanarGraph) -> String {
        TraceText { t: self, g }.to_string()
    }

    /// Parses a trace. Status tables are rebuilt by running the propagation
    /// rules along the recorded orders; [`check_trace`] then validates them.
    pub fn parse(g: &PlanarGraph, text: &str) -> Result<ProofTrace, TraceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, message: &str| TraceError::Malformed {
            line,
            message: message.to_string(),
        };
        let vertex = |line: usize, id: &str| g.vertex_index(id).ok_or_else(|| bad(line, &format!("unknown vertex `{id}`")));
        let edge = |line: usize, id: &str| g.edge_index(id).ok_or_else(|| bad(line, &format!("unknown edge `{id}`")));

        let mut header = |key: &str| -> Result<(usize, Vec<&str>), TraceError> {
            let (n, l) = lines.next().ok_or_else(|| bad(0, &format!("missing `{key}` line")))?;
            let mut it = l.split_whitespace();
            if it.next() != Some(key) {
                return Err(bad(n, &format!("expected `{key}`")));
            }
            Ok((n, it.collect()))
        };
        let (n, graph) = header("trace")?;
        let [graph] = graph[..] else {
            return Err(bad(n, "expected one graph hash"));
        };
        let (n, vp) = header("vplus")?;
        let vplus = vp.iter().map(|id| vertex(n, id)).collect::<Result<Vec<_>, _>>()?;
        let (n, o) = header("origin")?;
        let [o] = o[..] else {
            return Err(bad(n, "expected one origin vertex"));
        };
        let origin = vertex(n, o)?;
        let (_, note) = header("note")?;
        let preamble = note.join(" ");

        let mut marks = vec![false; g.vertices().len()];
        for &v in &vplus {
            marks[v] = true;
        }
        let mut cases = Vec::new();
        let mut ended = false;
        for (n, l) in lines {
            if ended {
                return Err(bad(n, "text after `end`"));
            }
            let mut words = l.split_whitespace();
            match words.next() {
                Some("end") => {
                    let count: usize = words
                        .next()
                        .and_then(|c| c.parse().ok())
                        .ok_or_else(|| bad(n, "expected a case count"))?;
                    if count != cases.len() {
                        return Err(bad(n, "case count does not match"));
                    }
                    ended = true;
                    continue;
                }
                Some("case") => {}
                _ => return Err(bad(n, "expected `case` or `end`")),
            }
            let st = words
                .next()
                .and_then(|s| EdgeStateMap::parse_ternary(s, g.edges().len()))
                .ok_or_else(|| bad(n, "bad case index"))?;
            let rest: Vec<&str> = words.collect();
            let outcome = match rest.split_first() {
                Some((&"cycle", items)) => {
                    if items.len() % 2 != 0 {
                        return Err(bad(n, "cycle needs vertex-edge pairs"));
                    }
                    let cycle = items
                        .chunks(2)
                        .map(|c| Ok((vertex(n, c[0])?, edge(n, c[1])?)))
                        .collect::<Result<Vec<_>, TraceError>>()?;
                    CaseOutcome::Cycle(cycle)
                }
                Some((&"residue", items)) => {
                    let parts: Vec<&[&str]> = items.split(|s| *s == ";").collect();
                    let [order, mirror_order, closure] = parts[..] else {
                        return Err(bad(n, "residue needs order ; mirror order ; closure"));
                    };
                    let ids = |xs: &[&str]| xs.iter().map(|id| vertex(n, id)).collect::<Result<Vec<_>, _>>();
                    let order = ids(order)?;
                    let mirror_order = ids(mirror_order)?;
                    let closure = closure
                        .iter()
                        .map(|tok| match tok.split_once('+') {
                            Some((v, e)) => Ok(ClosureStep::Edge {
                                vertex: vertex(n, v)?,
                                edge: edge(n, e)?,
                            }),
                            None => Ok(ClosureStep::Seed(vertex(n, tok)?)),
                        })
                        .collect::<Result<Vec<_>, TraceError>>()?;
                    let t = build_tilde(g, &st);
                    let isolated = t.isolated();
                    let forward = pass(&t, &order, &marks, &isolated);
                    let mirror = pass(&t.reversed(), &mirror_order, &marks, &isolated);
                    CaseOutcome::Residue(ResidueProof {
                        order,
                        forward,
                        mirror_order,
                        mirror,
                        closure,
                    })
                }
                _ => return Err(bad(n, "expected `cycle` or `residue`")),
            };
            cases.push(Case { states: st, outcome });
        }
        if !ended {
            return Err(bad(0, "missing `end` line"));
        }
        Ok(ProofTrace {
            graph: graph.to_string(),
            vplus,
            origin,
            preamble,
            cases,
        })
    }
}

/// Parses and checks in one step.
pub fn check_trace_text(g: &PlanarGraph, text: &str) -> Result<(), TraceError> {
    check_trace(g, &ProofTrace::parse(g, text)?)
}

struct TraceText<'a> {
    t: &'a ProofTrace,
    g: &'a PlanarGraph,
}

impl fmt::Display for TraceText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (t, g) = (self.t, self.g);
        let v = |i: usize| g.vertex(i).id.as_str();
        let e = |i: usize| g.edge(i).id.as_str();
        writeln!(f, "trace {}", t.graph)?;
        write!(f, "vplus")?;
        for &x in &t.vplus {
            write!(f, " {}", v(x))?;
        }
        writeln!(f)?;
        writeln!(f, "origin {}", v(t.origin))?;
        writeln!(f, "note {}", t.preamble)?;
        for case in &t.cases {
            write!(f, "case {}", case.states.ternary())?;
            match &case.outcome {
                CaseOutcome::Cycle(c) => {
                    write!(f, " cycle")?;
                    for &(x, y) in c {
                        write!(f, " {} {}", v(x), e(y))?;
                    }
                }
                CaseOutcome::Residue(p) => {
                    write!(f, " residue")?;
                    for &x in &p.order {
                        write!(f, " {}", v(x))?;
                    }
                    write!(f, " ;")?;
                    for &x in &p.mirror_order {
                        write!(f, " {}", v(x))?;
                    }
                    write!(f, " ;")?;
                    for s in &p.closure {
                        match *s {
                            ClosureStep::Seed(x) => write!(f, " {}", v(x))?,
                            ClosureStep::Edge { vertex, edge } => write!(f, " {}+{}", v(vertex), e(edge))?,
                        }
                    }
                }
            }
            writeln!(f)?;
        }
        writeln!(f, "end {}", t.cases.len())
    }
}
