//! End-to-end run on a slope-annotated graph: structural proof, fact
//! calculus down to the closed manifold, homology, and an optional
//! independent refutation of the filled presentation.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::calculus::fact::{
    apply_fill, conclude_non_lo, fact_from_trace, replay, strengthen_weak_to_strong, trace_hash, Direction,
    Entry, FactStore, NonDetectionFact, Verdict,
};
use crate::graph::{compare_ids, PlanarGraph};
use crate::homology::{h1_invariants, H1};
use crate::orderability::{check_refutation, refute, Budget, ConstraintSet, Outcome};
use crate::presentation::Presentation;
use crate::structural::{check_trace, prove_non_detection, CaseOutcome, ProofTrace, StructuralError};
use crate::surgery::Slope;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("internal contradiction failure: {0}")]
    Internal(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_) => 2,
            PipelineError::Internal(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub jobs: usize,
    /// Also search for a refutation of the filled presentation.
    pub cross_check: Option<Budget>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            jobs: 1,
            cross_check: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub vplus: Vec<usize>,
    pub origin: usize,
    pub trace: ProofTrace,
    pub trace_text: String,
    pub facts: FactStore,
    pub verdict: Verdict,
    pub filled: Presentation,
    pub h1: H1,
    pub refutation: Option<Outcome>,
    pub report: String,
}

/// The V+ set and origin implied by the slopes, after checking every slope
/// against its sign requirement.
pub fn validate_slopes(g: &PlanarGraph) -> Result<(Vec<usize>, usize), PipelineError> {
    let report = g.face_report();
    if let Some(c) = report.components.iter().find(|c| c.genus != 0) {
        return Err(PipelineError::Validation(format!(
            "component containing vertex `{}` has genus {}; the graph must be planar",
            g.vertex(c.root).id,
            c.genus
        )));
    }
    for e in g.edges() {
        match e.slope {
            None => {
                return Err(PipelineError::Validation(format!(
                    "edge `{}` has no slope; condition (a) needs a negative slope",
                    e.id
                )))
            }
            Some(s) if s.is_infinite() || s.sign() >= 0 => {
                return Err(PipelineError::Validation(format!(
                    "edge `{}` has slope {s}, condition (a) requires a negative slope",
                    e.id
                )))
            }
            Some(_) => {}
        }
    }
    let mut vplus = Vec::new();
    for (i, v) in g.vertices().iter().enumerate() {
        match v.slope {
            None => {
                return Err(PipelineError::Validation(format!(
                    "vertex `{}` has no slope; conditions (b)-(d) need 0 or a positive slope",
                    v.id
                )))
            }
            Some(s) if s == Slope::ZERO => {}
            Some(s) if !s.is_infinite() && s.sign() > 0 => vplus.push(i),
            Some(s) => {
                return Err(PipelineError::Validation(format!(
                    "vertex `{}` has slope {s}, conditions (b)-(d) require 0 or a positive slope",
                    v.id
                )))
            }
        }
    }
    for (comp, covered) in g.components().iter().zip(g.coverage(&vplus)) {
        if !covered {
            return Err(PipelineError::Validation(format!(
                "component containing vertex `{}` has no positive-slope vertex; every component needs one and condition (d) needs an origin",
                g.vertex(comp[0]).id
            )));
        }
    }
    let origin = *vplus
        .iter()
        .min_by(|&&a, &&b| compare_ids(&g.vertex(a).id, &g.vertex(b).id))
        .expect("covered graph has a positive vertex");
    Ok((vplus, origin))
}

fn internal(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Internal(e.to_string())
}

pub fn run_pipeline(g: &PlanarGraph, opts: PipelineOptions) -> Result<PipelineRun, PipelineError> {
    let (vplus, origin) = validate_slopes(g)?;
    let trace = prove_non_detection(g, &vplus, origin, opts.jobs).map_err(|e| match e {
        StructuralError::Survived(_) => internal(e),
        e => PipelineError::Validation(e.to_string()),
    })?;
    check_trace(g, &trace).map_err(internal)?;
    let trace_text = trace.to_text(g);

    let mut store = FactStore::new();
    let mut fact: Arc<NonDetectionFact> = Arc::new(fact_from_trace(g, &trace).map_err(internal)?);
    store.push(fact.clone());
    let slopes = component_slopes(g);
    for (c, s) in &slopes {
        if let Some(Entry::Strong(_)) = fact.spec.get(c) {
            continue;
        }
        fact = Arc::new(strengthen_weak_to_strong(&fact, c, *s).map_err(internal)?);
        store.push(fact.clone());
    }
    for (c, _) in &slopes {
        fact = apply_fill(&fact, c, Direction::Quotient).map_err(internal)?;
        store.push(fact.clone());
    }
    for f in store.facts() {
        replay(f).map_err(internal)?;
    }
    let verdict = conclude_non_lo(&fact).map_err(internal)?;
    let filled = (*fact.presentation).clone();
    let h1 = h1_invariants(&filled);

    let refutation = match opts.cross_check {
        None => None,
        Some(budget) => {
            let c = ConstraintSet::from_ledger(&filled, budget.conj_len);
            let out = refute(&filled, &c, budget).map_err(internal)?;
            if let Outcome::Refuted(r) = &out {
                check_refutation(&filled, &c, r).map_err(internal)?;
            }
            Some(out)
        }
    };

    let report = render_report(g, &vplus, origin, &trace, &trace_text, &store, &verdict, &filled, &h1, &refutation);
    Ok(PipelineRun {
        vplus,
        origin,
        trace,
        trace_text,
        facts: store,
        verdict,
        filled,
        h1,
        refutation,
        report,
    })
}

/// Slopes by peripheral component, vertices first, then edges.
fn component_slopes(g: &PlanarGraph) -> Vec<(String, Slope)> {
    let mut out: Vec<(String, Slope)> = g
        .vertices()
        .iter()
        .filter_map(|v| v.slope.map(|s| (format!("v:{}", v.id), s)))
        .collect();
    out.extend(g.edges().iter().filter_map(|e| e.slope.map(|s| (format!("e:{}", e.id), s))));
    out
}

#[allow(clippy::too_many_arguments)]
fn render_report(
    g: &PlanarGraph,
    vplus: &[usize],
    origin: usize,
    trace: &ProofTrace,
    trace_text: &str,
    store: &FactStore,
    verdict: &Verdict,
    filled: &Presentation,
    h1: &H1,
    refutation: &Option<Outcome>,
) -> String {
    let mut r = String::new();
    let ids = |vs: &[usize]| vs.iter().map(|&v| g.vertex(v).id.clone()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(r, "graph {}", g.content_hash());
    let _ = writeln!(
        r,
        "vertices {} edges {} components {}",
        g.vertices().len(),
        g.edges().len(),
        g.components().len()
    );
    let _ = writeln!(r, "vplus {}", ids(vplus));
    let _ = writeln!(r, "origin {}", g.vertex(origin).id);
    let slopes: Vec<String> = component_slopes(g).iter().map(|(c, s)| format!("{c} {s}")).collect();
    let _ = writeln!(r, "slopes {}", slopes.join(", "));
    let cycles = trace
        .cases
        .iter()
        .filter(|c| matches!(c.outcome, CaseOutcome::Cycle(_)))
        .count();
    let _ = writeln!(
        r,
        "cases {} (cycle {}, residue {}), all contradicted",
        trace.cases.len(),
        cycles,
        trace.cases.len() - cycles
    );
    let _ = writeln!(r, "trace {} checked", trace_hash(g, trace));
    debug_assert_eq!(trace.to_text(g), trace_text);
    let _ = writeln!(r, "facts {} replayed", store.facts().len());
    let _ = writeln!(
        r,
        "filled presentation {}: {} generators, {} relators",
        filled.content_hash(),
        filled.generators().len(),
        filled.relators().len()
    );
    match &h1.order {
        Some(n) => {
            let _ = writeln!(r, "|H1| = {n}");
        }
        None => {
            let _ = writeln!(r, "|H1| = infinite (betti {})", h1.betti);
        }
    }
    let torsion: Vec<String> = h1.torsion.iter().map(|t| t.to_string()).collect();
    let _ = writeln!(
        r,
        "H1 torsion {}",
        if torsion.is_empty() { "-".to_string() } else { torsion.join(" ") }
    );
    let zeros: Vec<&str> = g
        .vertices()
        .iter()
        .filter(|v| v.slope == Some(Slope::ZERO))
        .map(|v| v.id.as_str())
        .collect();
    if !zeros.is_empty() {
        let kind = if h1.is_finite() {
            "H1 is still finite here"
        } else {
            "H1 is infinite, so the result is not a rational homology sphere"
        };
        let _ = writeln!(r, "note: slope 0 at vertices {}; {kind}", zeros.join(" "));
    }
    let _ = write!(r, "{verdict}");
    match refutation {
        None => {}
        Some(Outcome::Refuted(cert)) => {
            let _ = writeln!(
                r,
                "refuter: confirmed at radius {} with {} certificate nodes, certificate checked",
                cert.radius,
                cert.size()
            );
        }
        Some(Outcome::Unknown(u)) => {
            let _ = writeln!(r, "refuter: unknown ({:?} at radius {})", u.reason, u.radius);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    const P2: &str = "vertex 1 slope 1/1\nvertex 2 slope 1/1\nedge e 1 2 slope -1/1\nrotation 1: e.t\nrotation 2: e.h\n";

    #[test]
    fn p2_pipeline() {
        let g = parse_graph(P2).unwrap();
        let run = run_pipeline(&g, PipelineOptions::default()).unwrap();
        assert!(run.report.contains("|H1| = 3\n"));
        assert!(run.report.contains("verdict non-LO"));
        assert_eq!(run.origin, 0);
        assert_eq!(run.facts.facts().len(), 1 + 3 + 3);
        assert!(run.filled.peripheral().is_empty());
    }

    #[test]
    fn cross_check_confirms() {
        let g = parse_graph(P2).unwrap();
        let opts = PipelineOptions {
            jobs: 1,
            cross_check: Some(Budget {
                radius: 4,
                max_nodes: 1_000_000,
                conj_len: 0,
            }),
        };
        let run = run_pipeline(&g, opts).unwrap();
        assert!(matches!(run.refutation, Some(Outcome::Refuted(_))));
        assert!(run.report.contains("refuter: confirmed"));
    }

    #[test]
    fn validation_names_conditions() {
        let bad_edge = P2.replace("-1/1", "1/1");
        let e = run_pipeline(&parse_graph(&bad_edge).unwrap(), PipelineOptions::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("condition (a)"));
        assert!(e.to_string().contains("edge `e`"));

        let negative_vertex = P2.replace("vertex 2 slope 1/1", "vertex 2 slope -2/1");
        let e = run_pipeline(&parse_graph(&negative_vertex).unwrap(), PipelineOptions::default()).unwrap_err();
        assert!(e.to_string().contains("vertex `2`"));

        let zeros = P2.replace("slope 1/1", "slope 0/1");
        let e = run_pipeline(&parse_graph(&zeros).unwrap(), PipelineOptions::default()).unwrap_err();
        assert!(e.to_string().contains("no positive-slope vertex"));

        let missing = P2.replace(" slope -1/1", "");
        assert!(run_pipeline(&parse_graph(&missing).unwrap(), PipelineOptions::default()).is_err());
    }

    #[test]
    fn zero_vertex_slope() {
        let g = parse_graph(&P2.replace("vertex 2 slope 1/1", "vertex 2 slope 0/1")).unwrap();
        let run = run_pipeline(&g, PipelineOptions::default()).unwrap();
        assert_eq!(run.vplus, vec![0]);
        assert!(run.report.contains("verdict non-LO"));
        assert!(run.report.contains("note: slope 0 at vertices 2; H1 is still finite here"));
        // the zero framing does not force positive rank
        assert!(run.report.contains("|H1| = 1\n"));
        // strong zero is already in the base fact
        assert_eq!(run.facts.facts().len(), 1 + 2 + 3);
    }

    #[test]
    fn lens_space() {
        let g = parse_graph("vertex o slope 3/2\n").unwrap();
        let run = run_pipeline(&g, PipelineOptions::default()).unwrap();
        assert!(run.report.contains("|H1| = 3\n"));
    }
}
