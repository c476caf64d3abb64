use std::collections::HashMap;

use super::{PeripheralComponent, Presentation, PresentationError, Word};
use crate::graph::PlanarGraph;

/// Link group presentation of the flat fully augmented chainmail link of `g`.
///
/// Generators, in order: `mu[e]`, `lam[e]` per edge; `mu[v,e]` per vertex in
/// rotation order; `m[v]` per isolated vertex. Relators, in order: vertex
/// relators, edge relators, one relator per basis cycle, and the peripheral
/// commutator `[mu[e], lam[e]]` per edge.
pub fn chainmail_presentation(g: &PlanarGraph) -> Result<Presentation, PresentationError> {
    g.validate_embedding()?;
    let mut names: Vec<String> = Vec::new();
    let mut mu_e = Vec::new();
    let mut lam_e = Vec::new();
    for e in g.edges() {
        mu_e.push(names.len());
        names.push(format!("mu[{}]", e.id));
        lam_e.push(names.len());
        names.push(format!("lam[{}]", e.id));
    }
    let mut mu_ve: HashMap<(usize, usize), usize> = HashMap::new();
    let mut isolated: HashMap<usize, usize> = HashMap::new();
    for (v, vert) in g.vertices().iter().enumerate() {
        if vert.rotation.is_empty() {
            isolated.insert(v, names.len());
            names.push(format!("m[{}]", vert.id));
            continue;
        }
        for d in &vert.rotation {
            mu_ve.insert((v, d.edge), names.len());
            names.push(format!("mu[{},{}]", vert.id, g.edge(d.edge).id));
        }
    }
    let gen = Word::generator;
    let pow = Word::power;

    let mut relators = Vec::new();
    let mut peripheral = Vec::new();
    for (v, vert) in g.vertices().iter().enumerate() {
        let id = format!("v:{}", vert.id);
        if let Some(&m) = isolated.get(&v) {
            peripheral.push(PeripheralComponent::new(id, gen(m), Word::identity()));
            continue;
        }
        let edges = g.rotation_edges(v);
        let k = edges.len();
        let signs: Vec<i32> = edges.iter().map(|&e| g.vertex_sign(v, e)).collect();
        for i in 0..k {
            let (e, s) = (edges[i], signs[i]);
            let x = gen(mu_ve[&(v, e)]);
            let next = gen(mu_ve[&(v, edges[(i + 1) % k])]);
            let conj = pow(mu_e[e], s).conjugate(&next);
            relators.push(x.mul(&conj.inverse()));
        }
        let rotated: Vec<(Word, Word)> = (0..k)
            .map(|i| {
                let lon = Word::from_syllables(
                    (0..k).map(|j| (mu_e[edges[(i + j) % k]], signs[(i + j) % k])),
                );
                (gen(mu_ve[&(v, edges[i])]), lon)
            })
            .collect();
        let mut comp = PeripheralComponent::new(id, rotated[0].0.clone(), rotated[0].1.clone());
        comp.rotated = rotated;
        peripheral.push(comp);
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let (v1, v2) = (edge.tail, edge.head);
        relators.push(Word::from_syllables([
            (mu_ve[&(v2, e)], 1),
            (lam_e[e], 1),
            (mu_e[e], -1),
            (mu_ve[&(v1, e)], -1),
            (mu_e[e], 1),
        ]));
    }
    for cycle in g.cycle_basis() {
        relators.push(Word::from_syllables(
            cycle
                .edges
                .iter()
                .zip(&cycle.exponents)
                .map(|(&e, &s)| (lam_e[e], s)),
        ));
    }
    for e in 0..g.edges().len() {
        relators.push(Word::commutator(&gen(mu_e[e]), &gen(lam_e[e])));
    }
    for (e, edge) in g.edges().iter().enumerate() {
        peripheral.push(PeripheralComponent::new(
            format!("e:{}", edge.id),
            gen(mu_e[e]),
            gen(lam_e[e]),
        ));
    }
    Presentation::new(names, relators, peripheral)
}
