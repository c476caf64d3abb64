//! Chainmail link presentations, Dehn filling and splicing, and certified
//! proofs that alternating surgeries have non-left-orderable groups.

pub mod calculus;
pub mod fixtures;
pub mod graph;
pub mod homology;
pub mod orderability;
pub mod pipeline;
pub mod presentation;
pub mod structural;
pub mod surgery;

pub use calculus::slopeset::SlopeSet;
pub use graph::{parse_graph, GraphError, PlanarGraph};
pub use calculus::fact::{
    apply_fill, apply_glue, conclude_non_lo, fact_from_trace, replay, strengthen_weak_to_strong, BoundarySpec,
    CalculusError, Direction, Entry, FactStore, NonDetectionFact, Verdict,
};
pub use homology::{h1_invariants, smith_normal_form, IntMatrix, H1};
pub use presentation::{chainmail_presentation, Presentation, PresentationError, Word};
pub use surgery::{dehn_fill, splice, unfill, Slope, SurgeryError};
pub use orderability::{check_refutation, refute, Budget, ConstraintSet, Outcome, Refutation, SignClass};
pub use pipeline::{run_pipeline, PipelineError, PipelineOptions, PipelineRun};
pub use structural::{check_trace, prove_non_detection, EdgeStateMap, ProofTrace, StructuralError};
