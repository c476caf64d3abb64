#![allow(dead_code)]

use chainmail_core::graph::{End, GraphBuilder, PlanarGraph};
use chainmail_core::Slope;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Pt = (i64, i64);

fn cross(o: Pt, a: Pt, b: Pt) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(p: Pt, a: Pt, b: Pt) -> bool {
    cross(a, b, p) == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

/// Whether two segments share a point other than a common endpoint.
fn clash(a: Pt, b: Pt, c: Pt, d: Pt) -> bool {
    let shared = [a, b].iter().filter(|p| **p == c || **p == d).count();
    if shared == 2 {
        return true;
    }
    if shared == 1 {
        // collinear overlap beyond the shared endpoint
        let (s, x, y) = if a == c || a == d {
            (a, b, if a == c { d } else { c })
        } else {
            (b, a, if b == c { d } else { c })
        };
        return cross(s, x, y) == 0 && ((x.0 - s.0) * (y.0 - s.0) + (x.1 - s.1) * (y.1 - s.1)) > 0;
    }
    let (d1, d2) = (cross(c, d, a), cross(c, d, b));
    let (d3, d4) = (cross(a, b, c), cross(a, b, d));
    if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)) {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// A straight-line drawing with at most `max_vertices` vertices and
/// `max_edges` edges; rotations follow the angles of the drawing.
pub fn random_graph(seed: u64, max_vertices: usize, max_edges: usize) -> PlanarGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_vertices);
    let mut pts: Vec<Pt> = Vec::new();
    while pts.len() < n {
        let p = (rng.gen_range(0..12), rng.gen_range(0..12));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    for i in (1..pairs.len()).rev() {
        let j = rng.gen_range(0..=i);
        pairs.swap(i, j);
    }
    let target = rng.gen_range(0..=max_edges);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (a, b) in pairs {
        if edges.len() >= target {
            break;
        }
        let blocked = (0..n).any(|v| v != a && v != b && on_segment(pts[v], pts[a], pts[b]))
            || edges.iter().any(|&(c, d)| clash(pts[a], pts[b], pts[c], pts[d]));
        if !blocked {
            edges.push(if rng.gen_bool(0.5) { (a, b) } else { (b, a) });
        }
    }
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.vertex(&format!("{}", v + 1), false, None);
    }
    let names: Vec<String> = (0..edges.len()).map(|i| format!("e{}", i + 1)).collect();
    for (i, &(t, h)) in edges.iter().enumerate() {
        b.edge(&names[i], &format!("{}", t + 1), &format!("{}", h + 1), None);
    }
    for v in 0..n {
        let mut darts: Vec<(f64, usize, End)> = Vec::new();
        for (i, &(t, h)) in edges.iter().enumerate() {
            if t == v || h == v {
                let (end, other) = if t == v { (End::Tail, h) } else { (End::Head, t) };
                let angle = ((pts[other].1 - pts[v].1) as f64).atan2((pts[other].0 - pts[v].0) as f64);
                darts.push((angle, i, end));
            }
        }
        darts.sort_by(|x, y| x.0.total_cmp(&y.0));
        if !darts.is_empty() {
            let list: Vec<(&str, End)> = darts.iter().map(|&(_, i, e)| (names[i].as_str(), e)).collect();
            b.rotation(&format!("{}", v + 1), &list);
        }
    }
    b.build().expect("drawing is a valid graph")
}

/// Seeds `0..count` with at most 8 vertices and `max_edges` edges.
pub fn corpus(count: u64, max_edges: usize) -> Vec<PlanarGraph> {
    (0..count).map(|s| random_graph(0x5eed + s, 8, max_edges)).collect()
}

/// Alternating slopes: negative on edges, positive on most vertices, and 0
/// on some vertices while every component keeps a positive one.
pub fn with_alternating_slopes(g: &PlanarGraph, seed: u64) -> PlanarGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    let comps = g.components();
    let keep: Vec<usize> = comps.iter().map(|c| c[rng.gen_range(0..c.len())]).collect();
    let slope =|rng: &mut ChaCha8Rng, sign: i64| loop {
        let p = rng.gen_range(1..=5);
        let q = rng.gen_range(1..=3);
        if let Ok(s) = Slope::reduced(sign * p, q) {
            return s;
        }
    };
    for (i, v) in g.vertices().iter().enumerate() {
        let s = if !keep.contains(&i) && rng.gen_bool(0.25) {
            Slope::ZERO
        } else {
            slope(&mut rng, 1)
        };
        b.vertex(&v.id, false, Some(s));
    }
    for e in g.edges() {
        let s = slope(&mut rng, -1);
        b.edge(&e.id, &g.vertex(e.tail).id, &g.vertex(e.head).id, Some(s));
    }
    for v in g.vertices() {
        if !v.rotation.is_empty() {
            let list: Vec<(&str, End)> = v
                .rotation
                .iter()
                .map(|d| (g.edge(d.edge).id.as_str(), d.end))
                .collect();
            b.rotation(&v.id, &list);
        }
    }
    b.build().expect("same graph")
}

/// One V+ vertex per component: the lowest index in each.
pub fn minimal_vplus(g: &PlanarGraph) -> Vec<usize> {
    g.components().iter().map(|c| c[0]).collect()
}

/// Fraction-free determinant.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn abs_is_one(x: &BigInt) -> bool {
    x.abs().is_one()
}
