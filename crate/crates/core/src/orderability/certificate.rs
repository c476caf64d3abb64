//! Refutation certificates: a text format and a checker that trusts nothing
//! from the search.
//!
//! ```text
//! refutation <presentation-hash> radius <r>
//! branch [a]
//! class RES
//! contradiction proper
//! class POS
//! contradiction product [a] [a] [a^-2]
//! ...
//! ```
//!
//! Children follow their branch in pre-order, each introduced by a `class`
//! record. Words are bracketed; `[1]` is the identity.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{ConstraintSet, SignClass};
use crate::presentation::{invert_letters, is_relator_conjugate, reduce_letters, Letter, Presentation, Word};

/// A rule instance that some path assignment violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// `x y z = 1` freely, and the three classes cannot multiply to RES.
    Product(Word, Word, Word),
    /// The word is a conjugate of relator `i` (or its inverse) but not RES.
    Relator(Word, usize),
    /// `u^-1 v` is a conjugate of relator `i`, and the classes differ.
    Equal(Word, Word, usize),
    /// Residue constraint `k` does not hold.
    Residue(usize),
    /// Every admissible line of weak fragment `k` is violated.
    Weak(usize),
    /// Every properness witness is RES.
    Proper,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertNode {
    Branch {
        word: Word,
        children: Vec<(SignClass, usize)>,
    },
    Leaf(Rule),
}

/// A decision tree stored as an arena; `root` indexes `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub presentation: String,
    pub radius: usize,
    pub nodes: Vec<CertNode>,
    pub root: usize,
}

impl Refutation {
    /// Number of nodes reachable from the root.
    pub fn size(&self) -> usize {
        let mut count = 0;
        let mut todo = vec![self.root];
        while let Some(n) = todo.pop() {
            count += 1;
            if let CertNode::Branch { children, .. } = &self.nodes[n] {
                todo.extend(children.iter().map(|c| c.1));
            }
        }
        count
    }

    pub fn leaves(&self) -> Vec<&Rule> {
        let mut out = Vec::new();
        let mut todo = vec![self.root];
        while let Some(n) = todo.pop() {
            match &self.nodes[n] {
                CertNode::Branch { children, .. } => todo.extend(children.iter().rev().map(|c| c.1)),
                CertNode::Leaf(r) => out.push(r),
            }
        }
        out
    }

    pub fn to_text(&self, p: &Presentation) -> String {
        let show = |w: &Word| format!("[{}]", p.show(w));
        let mut out = format!("refutation {} radius {}\n", self.presentation, self.radius);
        enum Item {
            Node(usize),
            Class(SignClass),
        }
        let mut todo = vec![Item::Node(self.root)];
        while let Some(item) = todo.pop() {
            match item {
                Item::Class(c) => {
                    let _ = writeln!(out, "class {c}");
                }
                Item::Node(n) => match &self.nodes[n] {
                    CertNode::Branch { word, children } => {
                        let _ = writeln!(out, "branch {}", show(word));
                        for &(c, child) in children.iter().rev() {
                            todo.push(Item::Node(child));
                            todo.push(Item::Class(c));
                        }
                    }
                    CertNode::Leaf(rule) => {
                        let text = match rule {
                            Rule::Product(x, y, z) => format!("product {} {} {}", show(x), show(y), show(z)),
                            Rule::Relator(w, i) => format!("relator {} {i}", show(w)),
                            Rule::Equal(u, v, i) => format!("equal {} {} {i}", show(u), show(v)),
                            Rule::Residue(k) => format!("residue {k}"),
                            Rule::Weak(k) => format!("weak {k}"),
                            Rule::Proper => "proper".to_string(),
                        };
                        let _ = writeln!(out, "contradiction {text}");
                    }
                },
            }
        }
        out
    }

    /// Parses the text format; every branch takes exactly three children.
    pub fn parse(p: &Presentation, text: &str) -> Result<Refutation, String> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or("empty certificate")?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (presentation, radius) = match h[..] {
            ["refutation", hash, "radius", r] => (
                hash.to_string(),
                r.parse().map_err(|_| "bad radius".to_string())?,
            ),
            _ => return Err(format!("bad header `{header}`")),
        };
        let mut nodes: Vec<CertNode> = Vec::new();
        // open branches: (node index, pending class for the next child)
        let mut open: Vec<(usize, Option<SignClass>)> = Vec::new();
        let mut root = None;
        for (n, line) in lines {
            let err = |m: &str| format!("line {n}: {m}");
            let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
            if kw == "class" {
                let c: SignClass = rest.trim().parse().map_err(|e: String| err(&e))?;
                match open.last_mut() {
                    Some((_, pending @ None)) => *pending = Some(c),
                    _ => return Err(err("unexpected class record")),
                }
                continue;
            }
            let node = match kw {
                "branch" => {
                    let words = bracketed(rest).map_err(|e| err(&e))?;
                    let [w] = &words[..] else {
                        return Err(err("branch takes one word"));
                    };
                    CertNode::Branch {
                        word: parse_word(p, w).map_err(|e| err(&e))?,
                        children: Vec::new(),
                    }
                }
                "contradiction" => CertNode::Leaf(parse_rule(p, rest).map_err(|e| err(&e))?),
                _ => return Err(err(&format!("unknown record `{kw}`"))),
            };
            let id = nodes.len();
            let is_branch = matches!(node, CertNode::Branch { .. });
            nodes.push(node);
            match open.last_mut() {
                None if root.is_none() => root = Some(id),
                None => return Err(err("content after the root is complete")),
                Some((parent, pending)) => {
                    let c = pending.take().ok_or_else(|| err("child without class record"))?;
                    let parent = *parent;
                    if let CertNode::Branch { children, .. } = &mut nodes[parent] {
                        children.push((c, id));
                    }
                }
            }
            if is_branch {
                open.push((id, None));
            }
            // close every branch that now has three children
            while let Some(&(top, None)) = open.last() {
                match &nodes[top] {
                    CertNode::Branch { children, .. } if children.len() == 3 => {
                        open.pop();
                    }
                    _ => break,
                }
            }
        }
        if !open.is_empty() {
            return Err("certificate ends inside a branch".into());
        }
        Ok(Refutation {
            presentation,
            radius,
            nodes,
            root: root.ok_or("no root")?,
        })
    }
}

fn bracketed(text: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => {
                if depth == 0 {
                    start = i + 1;
                }
                depth += 1;
            }
            ']' => {
                depth = depth.checked_sub(1).ok_or("unbalanced `]`")?;
                if depth == 0 {
                    out.push(&text[start..i]);
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced `[`".into());
    }
    Ok(out)
}

fn parse_word(p: &Presentation, text: &str) -> Result<Word, String> {
    p.parse_word(text).map_err(|e| e.to_string())
}

fn parse_rule(p: &Presentation, text: &str) -> Result<Rule, String> {
    let (name, rest) = text.split_once(' ').unwrap_or((text, ""));
    let words = || -> Result<Vec<Word>, String> {
        bracketed(rest)?.into_iter().map(|w| parse_word(p, w)).collect()
    };
    // trailing integer after the last bracket
    let index = || -> Result<usize, String> {
        rest.rsplit(']')
            .next()
            .unwrap_or(rest)
            .trim()
            .parse()
            .map_err(|_| format!("bad index in `{text}`"))
    };
    Ok(match name {
        "product" => match &words()?[..] {
            [x, y, z] => Rule::Product(x.clone(), y.clone(), z.clone()),
            _ => return Err("product takes three words".into()),
        },
        "relator" => match &words()?[..] {
            [w] => Rule::Relator(w.clone(), index()?),
            _ => return Err("relator takes one word".into()),
        },
        "equal" => match &words()?[..] {
            [u, v] => Rule::Equal(u.clone(), v.clone(), index()?),
            _ => return Err("equal takes two words".into()),
        },
        "residue" => Rule::Residue(index()?),
        "weak" => Rule::Weak(index()?),
        "proper" if rest.trim().is_empty() => Rule::Proper,
        _ => return Err(format!("unknown rule `{text}`")),
    })
}

/// Class combinations that some preorder realizes on `x, y, z` with
/// `x y z = 1`: the three cannot all be `>= 1` with one strictly, nor all
/// `<= 1` with one strictly.
fn realizable(a: SignClass, b: SignClass, c: SignClass) -> bool {
    use SignClass::*;
    let all = [a, b, c];
    let up = all.iter().all(|&s| s != Neg) && all.contains(&Pos);
    let down = all.iter().all(|&s| s != Pos) && all.contains(&Neg);
    !up && !down
}

struct Path {
    classes: HashMap<Vec<Letter>, SignClass>,
}

impl Path {
    fn get(&self, w: &[Letter]) -> Option<SignClass> {
        if w.is_empty() {
            return Some(SignClass::Res);
        }
        if let Some(&c) = self.classes.get(w) {
            return Some(c);
        }
        self.classes.get(&invert_letters(w)).map(|c| match c {
            SignClass::Pos => SignClass::Neg,
            SignClass::Neg => SignClass::Pos,
            SignClass::Res => SignClass::Res,
        })
    }

    fn class(&self, w: &Word) -> Result<SignClass, String> {
        self.get(&w.letters()).ok_or_else(|| "word without a class on the path".to_string())
    }
}

fn violated_leaf(p: &Presentation, c: &ConstraintSet, path: &Path, rule: &Rule) -> Result<(), String> {
    let rel = |i: usize| -> Result<Vec<Letter>, String> {
        p.relators().get(i).map(Word::letters).ok_or(format!("no relator {i}"))
    };
    match rule {
        Rule::Product(x, y, z) => {
            let mut all = x.letters();
            all.extend(y.letters());
            all.extend(z.letters());
            reduce_letters(&mut all);
            if !all.is_empty() {
                return Err("product operands do not multiply to 1".into());
            }
            if realizable(path.class(x)?, path.class(y)?, path.class(z)?) {
                return Err("product classes are consistent".into());
            }
        }
        Rule::Relator(w, i) => {
            if !is_relator_conjugate(&w.letters(), &rel(*i)?) {
                return Err(format!("word is not a conjugate of relator {i}"));
            }
            if path.class(w)? == SignClass::Res {
                return Err("relator word is RES".into());
            }
        }
        Rule::Equal(u, v, i) => {
            let mut d = invert_letters(&u.letters());
            d.extend(v.letters());
            if !is_relator_conjugate(&d, &rel(*i)?) {
                return Err(format!("words do not differ by relator {i}"));
            }
            if path.class(u)? == path.class(v)? {
                return Err("equal words have equal classes".into());
            }
        }
        Rule::Residue(k) => {
            let w = c.residue.get(*k).ok_or(format!("no residue constraint {k}"))?;
            if path.class(w)? == SignClass::Res {
                return Err("residue constraint holds".into());
            }
        }
        Rule::Weak(k) => {
            let f = c.weak.get(*k).ok_or(format!("no weak constraint {k}"))?;
            for line in &f.lines {
                let mut sides = [[false; 2]; 2];
                for (i, &side) in line.side.iter().enumerate() {
                    if side == 0 {
                        continue;
                    }
                    if let Some(cl) = path.get(&f.words[i].letters()) {
                        sides[usize::from(side > 0)][usize::from(cl == SignClass::Neg)] = true;
                    }
                }
                if !sides.iter().any(|s| s[0] && s[1]) {
                    return Err(format!("weak constraint {k} has an unviolated line"));
                }
            }
        }
        Rule::Proper => {
            for w in &c.witnesses {
                if path.class(w)? != SignClass::Res {
                    return Err("a properness witness is not RES".into());
                }
            }
        }
    }
    Ok(())
}

/// Verifies a certificate: every branch offers each class exactly once on a
/// word not yet classified, and every leaf's rule is violated by the
/// classes on its path.
pub fn check_refutation(p: &Presentation, c: &ConstraintSet, cert: &Refutation) -> Result<(), String> {
    if cert.presentation != p.content_hash() {
        return Err("certificate is for a different presentation".into());
    }
    if let Some(h) = &c.presentation {
        if *h != cert.presentation {
            return Err("constraints are for a different presentation".into());
        }
    }
    let mut path = Path {
        classes: HashMap::new(),
    };
    enum Step {
        Enter(usize),
        Assign(Vec<Letter>, SignClass),
        Unassign(Vec<Letter>),
    }
    let mut todo = vec![Step::Enter(cert.root)];
    let mut visited = vec![false; cert.nodes.len()];
    while let Some(step) = todo.pop() {
        match step {
            Step::Assign(w, k) => {
                path.classes.insert(w, k);
            }
            Step::Unassign(w) => {
                path.classes.remove(&w);
            }
            Step::Enter(n) => {
                let node = cert.nodes.get(n).ok_or(format!("node {n} missing"))?;
                if std::mem::replace(&mut visited[n], true) {
                    return Err(format!("node {n} reached twice"));
                }
                match node {
                    CertNode::Leaf(rule) => {
                        violated_leaf(p, c, &path, rule).map_err(|e| format!("node {n}: {e}"))?;
                    }
                    CertNode::Branch { word, children } => {
                        let letters = word.letters();
                        if path.get(&letters).is_some() {
                            return Err(format!("node {n}: branch on a classified word"));
                        }
                        let mut classes: Vec<SignClass> = children.iter().map(|c| c.0).collect();
                        classes.sort();
                        if classes != [SignClass::Pos, SignClass::Neg, SignClass::Res] {
                            return Err(format!("node {n}: branch does not cover all three classes"));
                        }
                        for &(k, child) in children.iter().rev() {
                            todo.push(Step::Unassign(letters.clone()));
                            todo.push(Step::Enter(child));
                            todo.push(Step::Assign(letters.clone(), k));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Parses then checks.
pub fn check_refutation_text(p: &Presentation, c: &ConstraintSet, text: &str) -> Result<(), String> {
    let cert = Refutation::parse(p, text)?;
    check_refutation(p, c, &cert)
}
