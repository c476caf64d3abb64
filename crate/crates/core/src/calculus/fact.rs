//! Facts of the form "no proper left total preorder satisfies these boundary
//! conditions", and the rules that transport them along fillings and gluings.

use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::slopeset::SlopeSet;
use crate::graph::PlanarGraph;
use crate::presentation::{chainmail_presentation, Presentation, PresentationError};
use crate::structural::{check_trace, ProofTrace, TraceError};
use crate::surgery::{dehn_fill, splice, unfill, Slope, SurgeryError};

/// A boundary condition on one peripheral component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    /// Some slope of the set is weakly detected with respect to every
    /// conjugate of the peripheral pair.
    WeakAll(SlopeSet),
    /// Some slope of the set is weakly detected with respect to the listed
    /// pair itself.
    WeakSingle(SlopeSet),
    /// The slope is strongly detected.
    Strong(Slope),
}

impl Entry {
    pub fn kind(&self) -> &'static str {
        match self {
            Entry::WeakAll(_) => "weak-all",
            Entry::WeakSingle(_) => "weak-single",
            Entry::Strong(_) => "strong",
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::WeakAll(s) | Entry::WeakSingle(s) => write!(f, "{} {s}", self.kind()),
            Entry::Strong(s) => write!(f, "strong {s}"),
        }
    }
}

/// One entry per peripheral component, in the presentation's order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundarySpec(pub Vec<(String, Entry)>);

impl BoundarySpec {
    pub fn get(&self, component: &str) -> Option<&Entry> {
        self.0.iter().find(|(c, _)| c == component).map(|(_, e)| e)
    }

    pub fn position(&self, component: &str) -> Option<usize> {
        self.0.iter().position(|(c, _)| c == component)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    fn single(&self) -> Option<&str> {
        self.0
            .iter()
            .find(|(_, e)| matches!(e, Entry::WeakSingle(_)))
            .map(|(c, _)| c.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// From the group to its filling.
    Quotient,
    /// From a filling back to the unfilled group.
    Unquotient,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Quotient => "quotient",
            Direction::Unquotient => "unquotient",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Base {
        graph: Arc<PlanarGraph>,
        trace: Arc<ProofTrace>,
    },
    Strengthen {
        premise: Arc<NonDetectionFact>,
        component: String,
        slope: Slope,
    },
    Fill {
        premise: Arc<NonDetectionFact>,
        component: String,
        direction: Direction,
    },
    Glue {
        first: Arc<NonDetectionFact>,
        c1: String,
        second: Arc<NonDetectionFact>,
        c2: String,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Base { graph, trace } => write!(
                f,
                "(base graph {} trace {})",
                graph.content_hash(),
                trace_hash(graph, trace)
            ),
            Provenance::Strengthen {
                premise,
                component,
                slope,
            } => write!(f, "(strengthen {component} {slope} {})", premise.provenance),
            Provenance::Fill {
                premise,
                component,
                direction,
            } => write!(f, "(fill {direction} {component} {})", premise.provenance),
            Provenance::Glue { first, c1, second, c2 } => {
                write!(f, "(glue {c1} {c2} {} {})", first.provenance, second.provenance)
            }
        }
    }
}

pub fn trace_hash(g: &PlanarGraph, t: &ProofTrace) -> String {
    hex::encode(&Sha256::digest(t.to_text(g).as_bytes())[..8])
}

/// No proper left total preorder on the group of `presentation` satisfies
/// every entry of `spec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonDetectionFact {
    pub presentation: Arc<Presentation>,
    pub hash: String,
    pub spec: BoundarySpec,
    pub provenance: Provenance,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("invalid trace: {0}")]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("no entry for component `{0}`")]
    UnknownComponent(String),
    #[error("slope {slope} is not in the set {set} at `{component}`")]
    SlopeOutside {
        component: String,
        slope: Slope,
        set: Box<SlopeSet>,
    },
    #[error("entry at `{component}` is {found}, expected {expected}")]
    WrongKind {
        component: String,
        found: &'static str,
        expected: &'static str,
    },
    #[error("component `{0}` is not in the filling ledger")]
    LedgerMismatch(String),
    #[error("the second fact has no single-pair entry away from `{0}`")]
    NoDistinguished(String),
    #[error("{first} and {second} do not cover the projective line")]
    NotCovering { first: Box<SlopeSet>, second: Box<SlopeSet> },
    #[error("{0} boundary entries remain")]
    Unfilled(usize),
    #[error("replay produced a different fact:\n{expected}\nversus\n{found}")]
    Replay { expected: String, found: String },
    #[error("boundary entries do not match the peripheral components")]
    Malformed,
}

impl NonDetectionFact {
    fn new(presentation: Presentation, spec: BoundarySpec, provenance: Provenance) -> Result<Self, CalculusError> {
        let ids: Vec<&str> = presentation.peripheral().iter().map(|c| c.id.as_str()).collect();
        let spec_ids: Vec<&str> = spec.0.iter().map(|(c, _)| c.as_str()).collect();
        let singles = spec.0.iter().filter(|(_, e)| matches!(e, Entry::WeakSingle(_))).count();
        if ids != spec_ids || singles > 1 {
            return Err(CalculusError::Malformed);
        }
        Ok(NonDetectionFact {
            hash: presentation.content_hash(),
            presentation: Arc::new(presentation),
            spec,
            provenance,
        })
    }

    fn entry(&self, component: &str) -> Result<&Entry, CalculusError> {
        self.spec
            .get(component)
            .ok_or_else(|| CalculusError::UnknownComponent(component.to_string()))
    }

    /// The store record: hash, entries, provenance.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for NonDetectionFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fact {}", self.hash)?;
        for (c, e) in &self.spec.0 {
            writeln!(f, "entry {c} {e}")?;
        }
        writeln!(f, "proof {}", self.provenance)?;
        writeln!(f, "end")
    }
}

/// The base fact of a checked trace: negative slopes on edge loops, positive
/// slopes on V+ vertex loops (single-pair at the origin), and strong
/// detection of the zero slope on the other vertex loops.
pub fn fact_from_trace(g: &PlanarGraph, trace: &ProofTrace) -> Result<NonDetectionFact, CalculusError> {
    check_trace(g, trace)?;
    let p = chainmail_presentation(g)?;
    let spec = p
        .peripheral()
        .iter()
        .map(|c| {
            let entry = if let Some(id) = c.id.strip_prefix("e:") {
                debug_assert!(g.edge_index(id).is_some());
                Entry::WeakAll(SlopeSet::negative())
            } else {
                let id = c.id.strip_prefix("v:").unwrap_or(&c.id);
                let v = g.vertex_index(id).expect("component of a graph vertex");
                if v == trace.origin {
                    Entry::WeakSingle(SlopeSet::positive())
                } else if trace.vplus.contains(&v) {
                    Entry::WeakAll(SlopeSet::positive())
                } else {
                    Entry::Strong(Slope::ZERO)
                }
            };
            (c.id.clone(), entry)
        })
        .collect();
    NonDetectionFact::new(
        p,
        BoundarySpec(spec),
        Provenance::Base {
            graph: Arc::new(g.clone()),
            trace: Arc::new(trace.clone()),
        },
    )
}

/// A strongly detected slope is weakly detected with respect to every
/// conjugate pair, so a weak entry may be narrowed to one of its slopes.
pub fn strengthen_weak_to_strong(
    f: &Arc<NonDetectionFact>,
    component: &str,
    slope: Slope,
) -> Result<NonDetectionFact, CalculusError> {
    let set = match f.entry(component)? {
        Entry::WeakAll(s) | Entry::WeakSingle(s) => s,
        e => {
            return Err(CalculusError::WrongKind {
                component: component.to_string(),
                found: e.kind(),
                expected: "weak-all or weak-single",
            })
        }
    };
    if !set.contains(slope) {
        return Err(CalculusError::SlopeOutside {
            component: component.to_string(),
            slope,
            set: Box::new(set.clone()),
        });
    }
    let mut spec = f.spec.clone();
    let i = spec.position(component).expect("entry exists");
    spec.0[i].1 = Entry::Strong(slope);
    NonDetectionFact::new(
        (*f.presentation).clone(),
        spec,
        Provenance::Strengthen {
            premise: f.clone(),
            component: component.to_string(),
            slope,
        },
    )
}

/// Moves a fact between a group and its filling along a strongly detected
/// slope. Unquotienting a fact that was just quotiented at the same
/// component returns the premise.
pub fn apply_fill(
    f: &Arc<NonDetectionFact>,
    component: &str,
    direction: Direction,
) -> Result<Arc<NonDetectionFact>, CalculusError> {
    match direction {
        Direction::Quotient => {
            let slope = match f.entry(component)? {
                Entry::Strong(s) => *s,
                e => {
                    return Err(CalculusError::WrongKind {
                        component: component.to_string(),
                        found: e.kind(),
                        expected: "strong",
                    })
                }
            };
            let p = dehn_fill(&f.presentation, component, slope)?;
            let mut spec = f.spec.clone();
            spec.0.retain(|(c, _)| c != component);
            Ok(Arc::new(NonDetectionFact::new(
                p,
                spec,
                Provenance::Fill {
                    premise: f.clone(),
                    component: component.to_string(),
                    direction,
                },
            )?))
        }
        Direction::Unquotient => {
            if let Provenance::Fill {
                premise,
                component: c,
                direction: Direction::Quotient,
            } = &f.provenance
            {
                if c == component {
                    return Ok(premise.clone());
                }
            }
            let (p, slope) = unfill(&f.presentation, component).map_err(|e| match e {
                SurgeryError::NotFilled(c) => CalculusError::LedgerMismatch(c),
                e => e.into(),
            })?;
            let at = p.component_position(component).expect("restored component");
            let mut spec = f.spec.clone();
            spec.0.insert(at, (component.to_string(), Entry::Strong(slope)));
            Ok(Arc::new(NonDetectionFact::new(
                p,
                spec,
                Provenance::Fill {
                    premise: f.clone(),
                    component: component.to_string(),
                    direction,
                },
            )?))
        }
    }
}

/// Glues the single-pair component `c1` of the first fact to the
/// all-conjugates component `c2` of the second. The slope sets at the two
/// components must cover the projective line.
pub fn apply_glue(
    f1: &Arc<NonDetectionFact>,
    c1: &str,
    f2: &Arc<NonDetectionFact>,
    c2: &str,
) -> Result<NonDetectionFact, CalculusError> {
    let d10 = match f1.entry(c1)? {
        Entry::WeakSingle(s) => s,
        e => {
            return Err(CalculusError::WrongKind {
                component: c1.to_string(),
                found: e.kind(),
                expected: "weak-single",
            })
        }
    };
    let d21 = match f2.entry(c2)? {
        Entry::WeakAll(s) => s,
        e => {
            return Err(CalculusError::WrongKind {
                component: c2.to_string(),
                found: e.kind(),
                expected: "weak-all",
            })
        }
    };
    if f2.spec.single().is_none() {
        return Err(CalculusError::NoDistinguished(c2.to_string()));
    }
    if !d10.union(d21).covers_projective_line() {
        return Err(CalculusError::NotCovering {
            first: Box::new(d10.clone()),
            second: Box::new(d21.clone()),
        });
    }
    let second = (*f2.presentation).clone();
    let p = splice(&f1.presentation, c1, &second, c2)?;
    let mut spec = Vec::new();
    for (c, e) in f1.spec.0.iter().filter(|(c, _)| c != c1) {
        spec.push((format!("a/{c}"), e.clone()));
    }
    for (c, e) in f2.spec.0.iter().filter(|(c, _)| c != c2) {
        spec.push((format!("b/{c}"), e.clone()));
    }
    NonDetectionFact::new(
        p,
        BoundarySpec(spec),
        Provenance::Glue {
            first: f1.clone(),
            c1: c1.to_string(),
            second: f2.clone(),
            c2: c2.to_string(),
        },
    )
}

/// The conclusion drawn from a fact with no boundary conditions left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub presentation: String,
    pub provenance: String,
}

impl Verdict {
    pub const STATEMENTS: [&'static str; 3] = [
        "no proper left total preorder",
        "no left-orderable quotient",
        "fundamental group not left-orderable",
    ];
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict non-LO for presentation {}", self.presentation)?;
        for s in Verdict::STATEMENTS {
            writeln!(f, "  {s}")?;
        }
        writeln!(f, "proof {}", self.provenance)
    }
}

/// A group with no proper left total preorder has no left-orderable
/// quotient: a left order on a nontrivial quotient would pull back to a
/// proper preorder. In particular the group is not left-orderable.
pub fn conclude_non_lo(f: &NonDetectionFact) -> Result<Verdict, CalculusError> {
    if !f.spec.is_empty() {
        return Err(CalculusError::Unfilled(f.spec.len()));
    }
    Ok(Verdict {
        presentation: f.hash.clone(),
        provenance: f.provenance.to_string(),
    })
}

/// Re-runs every rule from the base traces and compares the result with `f`.
pub fn replay(f: &NonDetectionFact) -> Result<Arc<NonDetectionFact>, CalculusError> {
    let again = match &f.provenance {
        Provenance::Base { graph, trace } => Arc::new(fact_from_trace(graph, trace)?),
        Provenance::Strengthen {
            premise,
            component,
            slope,
        } => Arc::new(strengthen_weak_to_strong(&replay(premise)?, component, *slope)?),
        Provenance::Fill {
            premise,
            component,
            direction,
        } => {
            let premise = replay(premise)?;
            // a collapsed round trip has the premise's own provenance
            apply_fill(&premise, component, *direction)?
        }
        Provenance::Glue { first, c1, second, c2 } => Arc::new(apply_glue(&replay(first)?, c1, &replay(second)?, c2)?),
    };
    let (expected, found) = (f.to_text(), again.to_text());
    if expected != found {
        return Err(CalculusError::Replay { expected, found });
    }
    Ok(again)
}

/// Append-only sequence of facts.
#[derive(Debug, Clone, Default)]
pub struct FactStore {
    facts: Vec<Arc<NonDetectionFact>>,
}

impl FactStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, f: Arc<NonDetectionFact>) -> usize {
        self.facts.push(f);
        self.facts.len() - 1
    }

    pub fn facts(&self) -> &[Arc<NonDetectionFact>] {
        &self.facts
    }

    pub fn to_text(&self) -> String {
        self.facts.iter().map(|f| f.to_text()).collect()
    }
}

/// A fact record read back from a store file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactRecord {
    pub hash: String,
    pub spec: BoundarySpec,
    pub proof: String,
}

impl fmt::Display for FactRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fact {}", self.hash)?;
        for (c, e) in &self.spec.0 {
            writeln!(f, "entry {c} {e}")?;
        }
        writeln!(f, "proof {}", self.proof)?;
        writeln!(f, "end")
    }
}

pub fn parse_fact_store(text: &str) -> Result<Vec<FactRecord>, String> {
    let mut out = Vec::new();
    let mut cur: Option<FactRecord> = None;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| format!("line {}: {m}", n + 1);
        let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
        match (kw, cur.as_mut()) {
            ("fact", None) => {
                cur = Some(FactRecord {
                    hash: rest.to_string(),
                    spec: BoundarySpec::default(),
                    proof: String::new(),
                })
            }
            ("entry", Some(r)) => {
                let mut parts = rest.splitn(3, ' ');
                let (Some(c), Some(kind), Some(value)) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(err("entry needs component, kind and value"));
                };
                let entry = match kind {
                    "weak-all" => Entry::WeakAll(value.parse().map_err(|e| err(&format!("{e}")))?),
                    "weak-single" => Entry::WeakSingle(value.parse().map_err(|e| err(&format!("{e}")))?),
                    "strong" => Entry::Strong(value.parse().map_err(|e| err(&format!("{e}")))?),
                    _ => return Err(err("unknown entry kind")),
                };
                r.spec.0.push((c.to_string(), entry));
            }
            ("proof", Some(r)) => r.proof = rest.to_string(),
            ("end", Some(_)) => out.push(cur.take().expect("open record")),
            _ => return Err(err("unexpected line")),
        }
    }
    if cur.is_some() {
        return Err("unterminated fact".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structural::prove_non_detection;

    fn base(g: &PlanarGraph, vplus: &[usize], origin: usize) -> Arc<NonDetectionFact> {
        let t = prove_non_detection(g, vplus, origin, 1).unwrap();
        Arc::new(fact_from_trace(g, &t).unwrap())
    }

    fn slope(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn p2_base_fact() {
        let f = base(&fixtures::p2(), &[0, 1], 0);
        assert_eq!(
            f.spec.0,
            vec![
                ("v:1".to_string(), Entry::WeakSingle(SlopeSet::positive())),
                ("v:2".to_string(), Entry::WeakAll(SlopeSet::positive())),
                ("e:e".to_string(), Entry::WeakAll(SlopeSet::negative())),
            ]
        );
        let text = f.to_text();
        assert!(text.contains("entry e:e weak-all (-inf,0)\n"));
        let records = parse_fact_store(&text).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].to_string(), text);
    }

    #[test]
    fn vertices_outside_vplus_are_strong_zero() {
        let f = base(&fixtures::p2(), &[1], 1);
        assert_eq!(f.spec.get("v:1"), Some(&Entry::Strong(Slope::ZERO)));
        assert_eq!(f.spec.get("v:2"), Some(&Entry::WeakSingle(SlopeSet::positive())));
        let k4 = base(&fixtures::k4(), &[0], 0);
        assert_eq!(k4.spec.len(), 10);
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let g = fixtures::p2();
        let mut t = prove_non_detection(&g, &[0, 1], 0, 1).unwrap();
        t.cases.pop();
        assert!(matches!(fact_from_trace(&g, &t), Err(CalculusError::Trace(_))));
    }

    #[test]
    fn strengthening() {
        let f = base(&fixtures::p2(), &[0, 1], 0);
        let s = strengthen_weak_to_strong(&f, "e:e", slope(-1, 1)).unwrap();
        assert_eq!(s.spec.get("e:e"), Some(&Entry::Strong(slope(-1, 1))));
        assert!(matches!(
            strengthen_weak_to_strong(&f, "v:2", slope(-1, 1)),
            Err(CalculusError::SlopeOutside { .. })
        ));
        let s = strengthen_weak_to_strong(&f, "v:1", slope(1, 1)).unwrap();
        assert_eq!(s.spec.get("v:1"), Some(&Entry::Strong(slope(1, 1))));
        let s = Arc::new(s);
        assert!(matches!(
            strengthen_weak_to_strong(&s, "v:1", slope(1, 1)),
            Err(CalculusError::WrongKind { .. })
        ));
        assert!(matches!(
            strengthen_weak_to_strong(&f, "v:9", slope(1, 1)),
            Err(CalculusError::UnknownComponent(_))
        ));
    }

    fn strong_p2() -> Arc<NonDetectionFact> {
        let mut f = base(&fixtures::p2(), &[0, 1], 0);
        for (c, s) in [("v:1", slope(1, 1)), ("v:2", slope(1, 1)), ("e:e", slope(-1, 1))] {
            f = Arc::new(strengthen_weak_to_strong(&f, c, s).unwrap());
        }
        f
    }

    #[test]
    fn filling_and_conclusion() {
        let f = strong_p2();
        let one = apply_fill(&f, "e:e", Direction::Quotient).unwrap();
        assert_eq!(one.spec.len(), 2);
        assert_eq!(one.presentation.ledger().len(), 1);
        assert!(matches!(conclude_non_lo(&one), Err(CalculusError::Unfilled(2))));
        let two = apply_fill(&one, "v:1", Direction::Quotient).unwrap();
        let all = apply_fill(&two, "v:2", Direction::Quotient).unwrap();
        let v = conclude_non_lo(&all).unwrap();
        assert!(v.to_string().starts_with("verdict non-LO"));
        assert!(v.provenance.starts_with("(fill quotient v:2 (fill quotient v:1"));
        assert_eq!(replay(&all).unwrap().to_text(), all.to_text());
    }

    #[test]
    fn fill_order_does_not_matter() {
        let f = strong_p2();
        let a = apply_fill(&apply_fill(&f, "v:1", Direction::Quotient).unwrap(), "e:e", Direction::Quotient).unwrap();
        let b = apply_fill(&apply_fill(&f, "e:e", Direction::Quotient).unwrap(), "v:1", Direction::Quotient).unwrap();
        assert_eq!(a.spec, b.spec);
    }

    #[test]
    fn fill_round_trips() {
        let f = strong_p2();
        let q = apply_fill(&f, "v:2", Direction::Quotient).unwrap();
        let back = apply_fill(&q, "v:2", Direction::Unquotient).unwrap();
        assert_eq!(*back, *f);

        // unquotient away from a fresh quotient keeps its own provenance
        let q2 = apply_fill(&q, "e:e", Direction::Quotient).unwrap();
        let u = apply_fill(&q2, "v:2", Direction::Unquotient).unwrap();
        assert_eq!(u.spec.get("v:2"), Some(&Entry::Strong(slope(1, 1))));
        assert_eq!(u.spec.len(), 2);
        assert_eq!(replay(&u).unwrap().to_text(), u.to_text());

        assert!(matches!(
            apply_fill(&f, "v:2", Direction::Unquotient),
            Err(CalculusError::LedgerMismatch(_))
        ));
        let weak = base(&fixtures::p2(), &[0, 1], 0);
        assert!(matches!(
            apply_fill(&weak, "e:e", Direction::Quotient),
            Err(CalculusError::WrongKind { .. })
        ));
    }

    #[test]
    fn gluing_needs_cover() {
        let f = base(&fixtures::p2(), &[0, 1], 0);
        assert!(matches!(
            apply_glue(&f, "v:1", &f, "e:e"),
            Err(CalculusError::NotCovering { .. })
        ));
        assert!(matches!(
            apply_glue(&f, "v:2", &f, "e:e"),
            Err(CalculusError::WrongKind { .. })
        ));
    }

    #[test]
    fn gluing_with_full_set() {
        let f = base(&fixtures::p2(), &[0, 1], 0);
        let mut spec = f.spec.clone();
        spec.0[0].1 = Entry::WeakSingle(SlopeSet::all());
        // a hand-made premise; only the gluing rule is under test here
        let full = Arc::new(NonDetectionFact {
            spec,
            ..(*f).clone()
        });
        let g = apply_glue(&full, "v:1", &f, "e:e").unwrap();
        let ids: Vec<&str> = g.spec.0.iter().map(|(c, _)| c.as_str()).collect();
        assert_eq!(ids, ["a/v:2", "a/e:e", "b/v:1", "b/v:2"]);
        assert_eq!(g.spec.single(), Some("b/v:1"));
        assert_eq!(g.presentation.generators().len(), 8);
    }

    #[test]
    fn base_facts_alone_never_glue() {
        // positive and negative sets both miss 0 and infinity
        let f = base(&fixtures::p2(), &[0, 1], 0);
        let t = base(&fixtures::triangle(), &[0], 0);
        assert!(matches!(
            apply_glue(&t, "v:1", &f, "e:e"),
            Err(CalculusError::NotCovering { .. })
        ));
        assert!(matches!(
            apply_glue(&t, "v:1", &f, "v:2"),
            Err(CalculusError::NotCovering { .. })
        ));
    }
}
