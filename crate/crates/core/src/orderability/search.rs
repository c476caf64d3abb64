//! Depth-first search over sign classes with unit propagation and
//! certificate extraction.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::certificate::{CertNode, Refutation, Rule};
use super::universe::{conjugacy_key, word_order, Universe};
use super::{ConstraintSet, SignClass};
use crate::presentation::{Letter, Presentation, Word};

/// Search limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest ball radius tried; radii are tried from 1 upwards.
    pub radius: usize,
    /// Decision nodes allowed per radius.
    pub max_nodes: usize,
    /// Conjugator length used when detection constraints are instantiated.
    pub conj_len: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            radius: 3,
            max_nodes: 1_000_000,
            conj_len: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// An assignment of every word satisfied every rule.
    Survived,
    /// The node limit was hit.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub reason: StopReason,
    pub radius: usize,
    /// The surviving assignment, or the partial one at the budget stop.
    pub assignment: Vec<(Word, SignClass)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Refuted(Refutation),
    Unknown(Unknown),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefuteError {
    #[error("constraints were built for presentation {expected}, got {actual}")]
    Mismatch { expected: String, actual: String },
}

/// Searches for a certificate that no proper left total preorder of `p`
/// satisfies `c`.
pub fn refute(p: &Presentation, c: &ConstraintSet, budget: Budget) -> Result<Outcome, RefuteError> {
    let hash = p.content_hash();
    if let Some(h) = &c.presentation {
        if *h != hash {
            return Err(RefuteError::Mismatch {
                expected: h.clone(),
                actual: hash,
            });
        }
    }
    let mut last = None;
    for radius in 1..=budget.radius.max(1) {
        let result = std::thread::scope(|s| {
            std::thread::Builder::new()
                .stack_size(1 << 28)
                .spawn_scoped(s, || run(p, c, radius, budget.max_nodes))
                .expect("spawn search thread")
                .join()
                .expect("search thread panicked")
        });
        match result {
            Ok(mut r) => {
                r.presentation = hash;
                return Ok(Outcome::Refuted(r));
            }
            Err(u) => last = Some(u),
        }
    }
    Ok(Outcome::Unknown(last.expect("at least one radius")))
}

#[derive(Debug, Clone, Copy)]
enum Reason {
    None,
    Decision,
    Identity,
    Relator(u32),
    Residue(u32),
    /// The consequent `z` satisfies `a b z = 1`.
    Triple(u32, u32),
    /// The consequent equals the word by one relator substitution.
    Equal(u32, u32),
}

struct Conflict {
    rule: Rule,
    antecedents: Vec<u32>,
}

enum Stop {
    Survived,
    Budget,
}

struct Search<'a> {
    p: &'a Presentation,
    c: &'a ConstraintSet,
    u: Universe,
    rep: Vec<u32>,
    cls: Vec<Option<SignClass>>,
    reason: Vec<Reason>,
    consequent: Vec<u32>,
    marked: Vec<bool>,
    trail: Vec<u32>,
    queue: VecDeque<u32>,
    eq: Vec<Vec<(u32, u32)>>,
    weak_words: Vec<Vec<u32>>,
    weak_watch: Vec<Vec<u32>>,
    residue_words: Vec<u32>,
    witnesses: Vec<u32>,
    is_witness: Vec<bool>,
    order: Vec<u32>,
    nodes: usize,
    max_nodes: usize,
    cert: Vec<CertNode>,
    stack: Vec<(u32, u32)>,
    triples: Vec<(u32, u32)>,
}

fn run(p: &Presentation, c: &ConstraintSet, radius: usize, max_nodes: usize) -> Result<Refutation, Unknown> {
    let extra: Vec<Vec<Letter>> = p
        .relators()
        .iter()
        .map(Word::letters)
        .chain(c.words().map(Word::letters))
        .collect();
    let u = Universe::new(p.generators().len(), radius, &extra);
    let n = u.len();
    let rep: Vec<u32> = (0..n as u32)
        .map(|w| {
            let v = u.inv[w as usize];
            if word_order(&u.words[v as usize], &u.words[w as usize]).is_lt() {
                v
            } else {
                w
            }
        })
        .collect();
    let mut order: Vec<u32> = (0..n as u32).filter(|&w| rep[w as usize] == w).collect();
    order.sort_by(|&a, &b| word_order(&u.words[a as usize], &u.words[b as usize]));

    let rel_letters: Vec<Vec<Letter>> = p.relators().iter().map(Word::letters).collect();
    let mut eq = vec![Vec::new(); n];
    for (a, b, r) in u.substitutions(&rel_letters) {
        eq[a as usize].push((b, r as u32));
        eq[b as usize].push((a, r as u32));
    }
    let lookup = |w: &Word| u.get(&w.letters()).expect("constraint word in universe");
    let weak_words: Vec<Vec<u32>> = c.weak.iter().map(|f| f.words.iter().map(lookup).collect()).collect();
    let mut weak_watch = vec![Vec::new(); n];
    for (k, ws) in weak_words.iter().enumerate() {
        for &w in ws {
            let r = rep[w as usize] as usize;
            if weak_watch[r].last() != Some(&(k as u32)) {
                weak_watch[r].push(k as u32);
            }
        }
    }
    let residue_words = c.residue.iter().map(lookup).collect();
    let witnesses: Vec<u32> = c.witnesses.iter().map(lookup).collect();
    let mut is_witness = vec![false; n];
    for &w in &witnesses {
        is_witness[rep[w as usize] as usize] = true;
    }
    let mut s = Search {
        p,
        c,
        rep,
        cls: vec![None; n],
        reason: vec![Reason::None; n],
        consequent: vec![0; n],
        marked: vec![false; n],
        trail: Vec::new(),
        queue: VecDeque::new(),
        eq,
        weak_words,
        weak_watch,
        residue_words,
        witnesses,
        is_witness,
        order,
        nodes: 0,
        max_nodes,
        cert: Vec::new(),
        stack: Vec::new(),
        triples: Vec::new(),
        u,
    };
    match s.root() {
        Ok(root) => Ok(Refutation {
            presentation: String::new(),
            radius,
            nodes: s.cert,
            root,
        }),
        Err(stop) => Err(Unknown {
            reason: match stop {
                Stop::Survived => StopReason::Survived,
                Stop::Budget => StopReason::Budget,
            },
            radius,
            assignment: s.assignment(),
        }),
    }
}

impl Search<'_> {
    fn class(&self, w: u32) -> Option<SignClass> {
        let r = self.rep[w as usize];
        self.cls[r as usize].map(|c| if r == w { c } else { c.flip() })
    }

    fn word(&self, w: u32) -> Word {
        Word::from_letters(&self.u.words[w as usize])
    }

    fn assignment(&self) -> Vec<(Word, SignClass)> {
        self.order
            .iter()
            .filter_map(|&w| self.class(w).map(|c| (self.word(w), c)))
            .collect()
    }

    fn rule_of(&self, reason: Reason, w: u32) -> Rule {
        match reason {
            Reason::Triple(a, b) => Rule::Product(self.word(a), self.word(b), self.word(w)),
            Reason::Equal(a, r) => Rule::Equal(self.word(a), self.word(w), r as usize),
            Reason::Relator(r) => Rule::Relator(self.word(w), r as usize),
            Reason::Residue(k) => Rule::Residue(k as usize),
            Reason::Identity | Reason::Decision | Reason::None => {
                unreachable!("no rule behind this assignment")
            }
        }
    }

    fn antecedents(reason: Reason) -> impl Iterator<Item = u32> {
        let (a, b) = match reason {
            Reason::Triple(a, b) => (Some(a), Some(b)),
            Reason::Equal(a, _) => (Some(a), None),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }

    fn assign(&mut self, w: u32, c: SignClass, reason: Reason) -> Result<(), Conflict> {
        let r = self.rep[w as usize];
        let cr = if r == w { c } else { c.flip() };
        match self.cls[r as usize] {
            Some(x) if x == cr => Ok(()),
            Some(_) => Err(Conflict {
                rule: self.rule_of(reason, w),
                antecedents: Self::antecedents(reason).chain([w]).collect(),
            }),
            None => {
                self.cls[r as usize] = Some(cr);
                self.reason[r as usize] = reason;
                self.consequent[r as usize] = w;
                self.trail.push(r);
                self.queue.push_back(w);
                Ok(())
            }
        }
    }

    fn propagate(&mut self) -> Result<(), Conflict> {
        while let Some(w) = self.queue.pop_front() {
            for x in [w, self.u.inv[w as usize]] {
                if self.u.words[x as usize].is_empty() {
                    continue;
                }
                let cx = self.class(x).expect("assigned");
                let mut triples = std::mem::take(&mut self.triples);
                triples.clear();
                self.u.for_each_triple(x, &mut self.stack, |y, z| triples.push((y, z)));
                let mut result = Ok(());
                for &(y, z) in &triples {
                    match (self.class(y), self.class(z)) {
                        (Some(cy), _) => {
                            if let Some(pr) = cx.product(cy) {
                                result = self.assign(z, pr.flip(), Reason::Triple(x, y));
                            }
                        }
                        (None, Some(cz)) => {
                            if let Some(pr) = cz.product(cx) {
                                result = self.assign(y, pr.flip(), Reason::Triple(z, x));
                            }
                        }
                        (None, None) => {}
                    }
                    if result.is_err() {
                        break;
                    }
                }
                self.triples = triples;
                result?;
                for i in 0..self.eq[x as usize].len() {
                    let (v, r) = self.eq[x as usize][i];
                    self.assign(v, cx, Reason::Equal(x, r))?;
                }
            }
            let r = self.rep[w as usize] as usize;
            for i in 0..self.weak_watch[r].len() {
                let k = self.weak_watch[r][i] as usize;
                self.check_weak(k)?;
            }
            if self.is_witness[r] {
                self.check_proper()?;
            }
        }
        Ok(())
    }

    fn check_weak(&self, k: usize) -> Result<(), Conflict> {
        let f = &self.c.weak[k];
        let words = &self.weak_words[k];
        let mut antecedents = Vec::new();
        for line in &f.lines {
            // first nonnegative and first negative point per side
            let mut seen: [[Option<u32>; 2]; 2] = [[None; 2]; 2];
            for (i, &side) in line.side.iter().enumerate() {
                if side == 0 {
                    continue;
                }
                if let Some(c) = self.class(words[i]) {
                    let slot = &mut seen[(side > 0) as usize][c.nonnegative() as usize];
                    slot.get_or_insert(words[i]);
                }
            }
            match seen.iter().find(|s| s[0].is_some() && s[1].is_some()) {
                Some(s) => antecedents.extend([s[0].unwrap(), s[1].unwrap()]),
                None => return Ok(()),
            }
        }
        Err(Conflict {
            rule: Rule::Weak(k),
            antecedents,
        })
    }

    fn check_proper(&self) -> Result<(), Conflict> {
        if self
            .witnesses
            .iter()
            .all(|&w| self.class(w) == Some(SignClass::Res))
        {
            return Err(Conflict {
                rule: Rule::Proper,
                antecedents: self.witnesses.clone(),
            });
        }
        Ok(())
    }

    fn mark(&mut self, words: impl IntoIterator<Item = u32>) {
        let mut todo: Vec<u32> = words.into_iter().collect();
        while let Some(w) = todo.pop() {
            let r = self.rep[w as usize] as usize;
            if self.marked[r] || self.cls[r].is_none() {
                continue;
            }
            self.marked[r] = true;
            todo.extend(Self::antecedents(self.reason[r]));
        }
    }

    fn leaf(&mut self, conflict: Conflict) -> usize {
        self.mark(conflict.antecedents);
        self.push(CertNode::Leaf(conflict.rule))
    }

    fn push(&mut self, node: CertNode) -> usize {
        self.cert.push(node);
        self.cert.len() - 1
    }

    /// Wraps `inner` in one forced branch per marked, rule-derived trail
    /// entry in `from..`, innermost last.
    fn chain(&mut self, from: usize, mut inner: usize) -> usize {
        for i in (from..self.trail.len()).rev() {
            let r = self.trail[i] as usize;
            if !self.marked[r] {
                continue;
            }
            let reason = self.reason[r];
            if matches!(reason, Reason::Identity | Reason::Decision) {
                continue;
            }
            let w = self.consequent[r];
            let c = self.class(w).expect("assigned");
            let rule = self.rule_of(reason, w);
            let mut children = Vec::with_capacity(3);
            for k in SignClass::ALL {
                let child = if k == c {
                    inner
                } else {
                    self.push(CertNode::Leaf(rule.clone()))
                };
                children.push((k, child));
            }
            inner = self.push(CertNode::Branch {
                word: self.word(w),
                children,
            });
        }
        inner
    }

    fn undo(&mut self, to: usize) {
        for r in self.trail.drain(to..) {
            let r = r as usize;
            self.cls[r] = None;
            self.marked[r] = false;
            self.reason[r] = Reason::None;
        }
        self.queue.clear();
    }

    fn root(&mut self) -> Result<usize, Stop> {
        let mut keys: HashMap<Vec<Letter>, u32> = HashMap::new();
        for (i, r) in self.p.relators().iter().enumerate() {
            keys.entry(conjugacy_key(&r.letters())).or_insert(i as u32);
        }
        let mut initial: Result<(), Conflict> = Ok(());
        for w in 0..self.u.len() as u32 {
            let letters = &self.u.words[w as usize];
            let reason = if letters.is_empty() {
                Reason::Identity
            } else if let Some(&r) = keys.get(&conjugacy_key(letters)) {
                Reason::Relator(r)
            } else {
                continue;
            };
            initial = initial.and_then(|_| self.assign(w, SignClass::Res, reason));
        }
        for k in 0..self.residue_words.len() {
            let w = self.residue_words[k];
            initial = initial.and_then(|_| self.assign(w, SignClass::Res, Reason::Residue(k as u32)));
        }
        let initial = initial.and_then(|_| self.check_proper()).and_then(|_| self.propagate());
        let inner = match initial {
            Err(conflict) => self.leaf(conflict),
            Ok(()) => self.solve(0)?,
        };
        Ok(self.chain(0, inner))
    }

    fn solve(&mut self, mut pos: usize) -> Result<usize, Stop> {
        while pos < self.order.len() && self.cls[self.order[pos] as usize].is_some() {
            pos += 1;
        }
        let Some(&d) = self.order.get(pos) else {
            return Err(Stop::Survived);
        };
        let mut children = Vec::with_capacity(3);
        for k in SignClass::ALL {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Stop::Budget);
            }
            let start = self.trail.len();
            let outcome = self
                .assign(d, k, Reason::Decision)
                .and_then(|_| self.propagate());
            let inner = match outcome {
                Err(conflict) => self.leaf(conflict),
                Ok(()) => match self.solve(pos + 1) {
                    Ok(n) => n,
                    Err(stop) => {
                        if matches!(stop, Stop::Budget) {
                            self.undo(start);
                        }
                        return Err(stop);
                    }
                },
            };
            let node = self.chain(start + 1, inner);
            let used = self.marked[d as usize];
            self.undo(start);
            if !used {
                return Ok(node);
            }
            children.push((k, node));
        }
        Ok(self.push(CertNode::Branch {
            word: self.word(d),
            children,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderability::{check_refutation, check_refutation_text, CertNode};

    fn pres(text: &str) -> Presentation {
        text.parse().unwrap()
    }

    fn budget(radius: usize) -> Budget {
        Budget {
            radius,
            max_nodes: 100_000,
            conj_len: 0,
        }
    }

    fn refuted(p: &Presentation, radius: usize) -> Refutation {
        let c = ConstraintSet::new(p);
        match refute(p, &c, budget(radius)).unwrap() {
            Outcome::Refuted(r) => r,
            Outcome::Unknown(u) => panic!("not refuted: {:?}", u.reason),
        }
    }

    #[test]
    fn cyclic_group_of_order_three() {
        let p = pres("gen a\nrel a^3\n");
        let r = refuted(&p, 3);
        let c = ConstraintSet::new(&p);
        assert_eq!(check_refutation(&p, &c, &r), Ok(()));
        let text = r.to_text(&p);
        assert_eq!(check_refutation_text(&p, &c, &text), Ok(()));
    }

    #[test]
    fn orderable_groups_survive() {
        for text in ["gen a\n", "gen a\ngen b\nrel a b a^-1 b^-1\n", "gen a\ngen b\n"] {
            let p = pres(text);
            let c = ConstraintSet::new(&p);
            for r in 1..=3 {
                match refute(&p, &c, budget(r)).unwrap() {
                    Outcome::Unknown(u) => {
                        assert_eq!(u.reason, StopReason::Survived);
                        assert!(u.assignment.iter().any(|(_, k)| *k != SignClass::Res));
                    }
                    Outcome::Refuted(_) => panic!("refuted an orderable group"),
                }
            }
        }
    }

    #[test]
    fn tampering_is_detected() {
        let p = pres("gen a\nrel a^3\n");
        let c = ConstraintSet::new(&p);
        let r = refuted(&p, 3);
        let text = r.to_text(&p);
        let first_leaf = text.lines().position(|l| l.starts_with("contradiction")).unwrap();
        let cut: String = text
            .lines()
            .enumerate()
            .filter(|(i, _)| *i != first_leaf)
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        assert!(check_refutation_text(&p, &c, &cut).is_err());

        let mut two = r.clone();
        if let CertNode::Branch { children, .. } = &mut two.nodes[two.root] {
            children.pop();
        }
        assert!(check_refutation(&p, &c, &two).is_err());

        // a leaf citing a rule that holds on its path
        let mut wrong = r.clone();
        let leaf = wrong
            .nodes
            .iter()
            .position(|n| matches!(n, CertNode::Leaf(Rule::Product(..))))
            .unwrap();
        wrong.nodes[leaf] = CertNode::Leaf(Rule::Relator(Word::generator(0), 0));
        assert!(check_refutation(&p, &c, &wrong).is_err());
    }

    #[test]
    fn residue_constraints_are_used() {
        // Z with a forced RES generator is improper
        let p = pres("gen a\n");
        let mut c = ConstraintSet::new(&p);
        c.residue.push(Word::generator(0));
        let Outcome::Refuted(r) = refute(&p, &c, budget(1)).unwrap() else {
            panic!()
        };
        assert_eq!(check_refutation(&p, &c, &r), Ok(()));
        assert!(r.leaves().iter().any(|l| **l == Rule::Proper));
        // the same certificate fails against weaker constraints
        assert!(check_refutation(&p, &ConstraintSet::new(&p), &r).is_err());
    }

    #[test]
    fn weak_constraints_are_used() {
        // Z^2 where mu is forced RES and only slope infinity may be detected:
        // a preorder with mu RES detects slope infinity only if lambda is RES too
        let p = pres("gen m\ngen l\nrel m l m^-1 l^-1\n");
        let mut c = ConstraintSet::new(&p);
        c.residue.push(Word::generator(1));
        let frag = crate::orderability::instantiate_weak_detection(
            &Word::generator(0),
            &Word::generator(1),
            &crate::calculus::slopeset::SlopeSet::point(crate::surgery::Slope::INFINITY),
            &[Word::identity()],
            1,
        )
        .unwrap();
        c.extend(frag);
        let Outcome::Refuted(r) = refute(&p, &c, budget(2)).unwrap() else {
            panic!()
        };
        assert_eq!(check_refutation(&p, &c, &r), Ok(()));
        assert!(r.leaves().iter().any(|l| matches!(l, Rule::Weak(0))));
    }

    #[test]
    fn monotone_in_radius() {
        let p = pres("gen a\nrel a^5\n");
        let c = ConstraintSet::new(&p);
        let first = (1..=5)
            .find(|&r| run(&p, &c, r, 100_000).is_ok())
            .unwrap();
        for r in first..=5 {
            assert!(run(&p, &c, r, 100_000).is_ok());
        }
    }

    #[test]
    fn mismatched_constraints() {
        let p = pres("gen a\n");
        let q = pres("gen b\n");
        assert!(matches!(
            refute(&p, &ConstraintSet::new(&q), budget(1)),
            Err(RefuteError::Mismatch { .. })
        ));
    }
}
