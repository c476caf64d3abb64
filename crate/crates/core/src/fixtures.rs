//! Small graphs used throughout the tests, benches and documentation.

use crate::graph::{parse_graph, PlanarGraph};

/// Two vertices joined by one edge.
pub const P2: &str = "\
vertex 1
vertex 2
edge e 1 2
rotation 1: e.t
rotation 2: e.h
";

/// A cyclically oriented triangle.
pub const TRIANGLE: &str = "\
vertex 1
vertex 2
vertex 3
edge e1 1 2
edge e2 2 3
edge e3 3 1
rotation 1: e1.t e3.h
rotation 2: e2.t e1.h
rotation 3: e3.t e2.h
";

/// The complete graph on four vertices drawn as a triangle (1, 2, 3) around
/// a center vertex 4.
pub const K4: &str = "\
vertex 1
vertex 2
vertex 3
vertex 4
edge e1 1 2
edge e2 2 3
edge e3 3 1
edge e4 4 1
edge e5 4 2
edge e6 4 3
rotation 1: e1.t e4.h e3.h
rotation 2: e2.t e5.h e1.h
rotation 3: e3.t e6.h e2.h
rotation 4: e4.t e5.t e6.t
";

/// A single vertex without edges (an unknot component).
pub const ISOLATED: &str = "vertex o\n";

pub fn p2() -> PlanarGraph {
    parse_graph(P2).expect("fixture")
}

pub fn triangle() -> PlanarGraph {
    parse_graph(TRIANGLE).expect("fixture")
}

pub fn k4() -> PlanarGraph {
    parse_graph(K4).expect("fixture")
}

pub fn isolated() -> PlanarGraph {
    parse_graph(ISOLATED).expect("fixture")
}
