//! Finitely presented groups with a peripheral system.

mod chainmail;
mod word;

pub use chainmail::chainmail_presentation;
pub use word::{
    cyclic_core, invert_letters, letter, letter_generator, reduce_letters, Letter, Word,
    WordDisplay,
};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::GraphError;
use crate::homology::IntMatrix;
use crate::surgery::Slope;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("word references generator index {0} outside the presentation")]
    GeneratorOutOfRange(usize),
    #[error("unknown peripheral component `{0}`")]
    UnknownComponent(String),
    #[error("duplicate peripheral component `{0}`")]
    DuplicateComponent(String),
    #[error("component `{0}` has no rotated family (degree 0 or not a vertex loop)")]
    NoRotatedFamily(String),
    #[error("no relator rewrites `{0}`")]
    NoMatchingRelator(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One boundary torus: a meridian/longitude pair of commuting words.
///
/// Vertex loops of positive degree also carry their rotated family of pairs
/// `(mu[v,e_i], mu[e_i]^s_i ... mu[e_(i-1)]^s_(i-1))`; the first member of the
/// family is the designated pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeripheralComponent {
    pub id: String,
    pub meridian: Word,
    pub longitude: Word,
    pub rotated: Vec<(Word, Word)>,
}

impl PeripheralComponent {
    pub fn new(id: impl Into<String>, meridian: Word, longitude: Word) -> Self {
        PeripheralComponent {
            id: id.into(),
            meridian,
            longitude,
            rotated: Vec::new(),
        }
    }

    /// `meridian^p * longitude^q`
    pub fn slope_word(&self, slope: Slope) -> Word {
        self.meridian
            .pow(slope.p())
            .mul(&self.longitude.pow(slope.q()))
    }

    fn map_generators(&self, f: impl Fn(usize) -> usize + Copy) -> Self {
        PeripheralComponent {
            id: self.id.clone(),
            meridian: self.meridian.map_generators(f),
            longitude: self.longitude.map_generators(f),
            rotated: self
                .rotated
                .iter()
                .map(|(m, l)| (m.map_generators(f), l.map_generators(f)))
                .collect(),
        }
    }
}

/// A filled component: what was removed, and where the filling relator went.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillRecord {
    pub component: PeripheralComponent,
    pub slope: Slope,
    /// Index the component occupied in the peripheral list.
    pub position: usize,
    /// Index of the filling relator.
    pub relator: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
    peripheral: Vec<PeripheralComponent>,
    ledger: Vec<FillRecord>,
}

/// Generator names: a letter followed by anything but whitespace and `^`,
/// with balanced square brackets (certificates bracket whole words).
pub fn valid_generator_name(name: &str) -> bool {
    let mut chars = name.chars();
    let mut depth = 0i32;
    let balanced = name.chars().all(|c| {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        depth >= 0
    }) && depth == 0;
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && balanced
        && name.chars().all(|c| !c.is_whitespace() && c != '^')
        && !matches!(name, "meridian" | "longitude")
}

impl Presentation {
    pub fn new(
        generators: Vec<String>,
        relators: Vec<Word>,
        peripheral: Vec<PeripheralComponent>,
    ) -> Result<Self, PresentationError> {
        Presentation::with_ledger(generators, relators, peripheral, Vec::new())
    }

    pub fn with_ledger(
        generators: Vec<String>,
        relators: Vec<Word>,
        peripheral: Vec<PeripheralComponent>,
        ledger: Vec<FillRecord>,
    ) -> Result<Self, PresentationError> {
        let mut seen = HashMap::new();
        for g in &generators {
            if !valid_generator_name(g) {
                return Err(PresentationError::InvalidName(g.clone()));
            }
            if seen.insert(g.as_str(), ()).is_some() {
                return Err(PresentationError::DuplicateGenerator(g.clone()));
            }
        }
        let n = generators.len();
        let check = |w: &Word| match w.generators().find(|&g| g >= n) {
            Some(g) => Err(PresentationError::GeneratorOutOfRange(g)),
            None => Ok(()),
        };
        relators.iter().try_for_each(check)?;
        let mut ids = HashMap::new();
        for c in peripheral.iter().chain(ledger.iter().map(|r| &r.component)) {
            if ids.insert(c.id.as_str(), ()).is_some() {
                return Err(PresentationError::DuplicateComponent(c.id.clone()));
            }
            check(&c.meridian)?;
            check(&c.longitude)?;
            for (m, l) in &c.rotated {
                check(m)?;
                check(l)?;
            }
        }
        Ok(Presentation {
            generators,
            relators,
            peripheral,
            ledger,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn peripheral(&self) -> &[PeripheralComponent] {
        &self.peripheral
    }

    pub fn ledger(&self) -> &[FillRecord] {
        &self.ledger
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn component(&self, id: &str) -> Option<&PeripheralComponent> {
        self.peripheral.iter().find(|c| c.id == id)
    }

    pub fn component_position(&self, id: &str) -> Option<usize> {
        self.peripheral.iter().position(|c| c.id == id)
    }

    pub fn show<'a>(&'a self, w: &'a Word) -> WordDisplay<'a> {
        w.display(&self.generators)
    }

    /// Parses a word in `name^k` syntax against this presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word, PresentationError> {
        let index: HashMap<&str, usize> = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.as_str(), i))
            .collect();
        parse_word_with(&index, text.split_whitespace())
            .map_err(|m| PresentationError::Syntax { line: 0, message: m })
    }

    /// Entry `(r, g)` is the total exponent of generator `g` in relator `r`.
    pub fn abelianization_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.relators.len(), self.generators.len());
        for (r, w) in self.relators.iter().enumerate() {
            for &(g, k) in w.syllables() {
                m.add_to(r, g, k as i64);
            }
        }
        m
    }

    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_string().as_bytes());
        hex::encode(&digest[..8])
    }

    pub(crate) fn parts(
        &self,
    ) -> (
        &[String],
        &[Word],
        &[PeripheralComponent],
        &[FillRecord],
    ) {
        (&self.generators, &self.relators, &self.peripheral, &self.ledger)
    }

    /// Same presentation with every generator renamed through `prefix`.
    pub(crate) fn prefixed(&self, prefix: &str) -> Presentation {
        let rename = |id: &str| format!("{prefix}{id}");
        Presentation {
            generators: self.generators.iter().map(|g| rename(g)).collect(),
            relators: self.relators.clone(),
            peripheral: self
                .peripheral
                .iter()
                .map(|c| PeripheralComponent {
                    id: rename(&c.id),
                    ..c.clone()
                })
                .collect(),
            ledger: self
                .ledger
                .iter()
                .map(|r| FillRecord {
                    component: PeripheralComponent {
                        id: rename(&r.component.id),
                        ..r.component.clone()
                    },
                    ..r.clone()
                })
                .collect(),
        }
    }

    pub(crate) fn shifted(&self, gen_offset: usize, rel_offset: usize) -> (Vec<Word>, Vec<PeripheralComponent>, Vec<FillRecord>) {
        let f = |g: usize| g + gen_offset;
        (
            self.relators.iter().map(|w| w.map_generators(f)).collect(),
            self.peripheral.iter().map(|c| c.map_generators(f)).collect(),
            self.ledger
                .iter()
                .map(|r| FillRecord {
                    component: r.component.map_generators(f),
                    slope: r.slope,
                    position: r.position,
                    relator: r.relator + rel_offset,
                })
                .collect(),
        )
    }

    /// The chain of vertex-relator substitutions rewriting
    /// `longitude * meridian * longitude^-1` back to the meridian.
    pub fn derive_peripheral_commutation(
        &self,
        component: &str,
    ) -> Result<Derivation, PresentationError> {
        let c = self
            .component(component)
            .ok_or_else(|| PresentationError::UnknownComponent(component.to_string()))?;
        if c.rotated.is_empty() {
            return Err(PresentationError::NoRotatedFamily(component.to_string()));
        }
        let k = c.rotated.len();
        let factors: Vec<(usize, i32)> = c.longitude.syllables().to_vec();
        debug_assert_eq!(factors.len(), k);
        let x = |i: usize| c.rotated[i % k].0.clone();
        let start = c.longitude.mul(&c.meridian).mul(&c.longitude.inverse());
        let mut current = start.clone();
        let mut steps = Vec::with_capacity(k);
        for j in (0..k).rev() {
            let (m, s) = factors[j];
            let mj = Word::power(m, s);
            let replaced = mj.conjugate(&x(j + 1));
            let replacement = x(j);
            let witness = replaced.mul(&replacement.inverse()).letters();
            let relator = (0..self.relators.len())
                .find(|&r| is_relator_conjugate(&witness, &self.relators[r].letters()))
                .ok_or_else(|| {
                    PresentationError::NoMatchingRelator(self.show(&replaced).to_string())
                })?;
            let letters = current.letters();
            let position = j;
            let result = {
                let mut l = letters[..position].to_vec();
                l.extend(replacement.letters());
                l.extend_from_slice(&letters[position + replaced.len()..]);
                Word::from_letters(&l)
            };
            steps.push(DerivationStep {
                relator,
                position,
                replaced,
                replacement,
                result: result.clone(),
            });
            current = result;
        }
        Ok(Derivation {
            start,
            target: c.meridian.clone(),
            steps,
        })
    }
}

/// True iff `word` is freely a conjugate of `relator` or of its inverse.
pub fn is_relator_conjugate(word: &[Letter], relator: &[Letter]) -> bool {
    let mut w = word.to_vec();
    reduce_letters(&mut w);
    let mut r = relator.to_vec();
    reduce_letters(&mut r);
    let a = cyclic_core(&w);
    let b = cyclic_core(&r);
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let binv = invert_letters(b);
    is_rotation(a, b) || is_rotation(a, &binv)
}

fn is_rotation(a: &[Letter], b: &[Letter]) -> bool {
    let n = a.len();
    (0..n).any(|s| (0..n).all(|i| a[i] == b[(i + s) % n]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub relator: usize,
    /// Letter offset of the replaced segment in the current word.
    pub position: usize,
    pub replaced: Word,
    pub replacement: Word,
    pub result: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub start: Word,
    pub target: Word,
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    /// Re-verifies every step: the segment occurs at the stated offset, it
    /// differs from its replacement by a conjugate of the cited relator, and
    /// the free reduction matches.
    pub fn check(&self, p: &Presentation) -> bool {
        let mut current = self.start.letters();
        for step in &self.steps {
            let Some(rel) = p.relators().get(step.relator) else {
                return false;
            };
            let seg = step.replaced.letters();
            if current.len() < step.position + seg.len()
                || current[step.position..step.position + seg.len()] != seg[..]
            {
                return false;
            }
            let mut witness = seg.clone();
            witness.extend(invert_letters(&step.replacement.letters()));
            if !is_relator_conjugate(&witness, &rel.letters()) {
                return false;
            }
            let mut next = current[..step.position].to_vec();
            next.extend(step.replacement.letters());
            next.extend_from_slice(&current[step.position + seg.len()..]);
            reduce_letters(&mut next);
            if next != step.result.letters() {
                return false;
            }
            current = next;
        }
        current == self.target.letters()
    }
}

fn parse_word_with<'a>(
    index: &HashMap<&str, usize>,
    tokens: impl Iterator<Item = &'a str>,
) -> Result<Word, String> {
    let tokens: Vec<&str> = tokens.collect();
    if tokens == ["1"] {
        return Ok(Word::identity());
    }
    let mut syl = Vec::with_capacity(tokens.len());
    for t in tokens {
        let (name, k) = match t.split_once('^') {
            Some((n, e)) => {
                let k: i32 = e.parse().map_err(|_| format!("bad exponent in `{t}`"))?;
                if k == 0 {
                    return Err(format!("zero exponent in `{t}`"));
                }
                (n, k)
            }
            None => (t, 1),
        };
        let g = *index
            .get(name)
            .ok_or_else(|| format!("unknown generator `{name}`"))?;
        syl.push((g, k));
    }
    Ok(Word::from_syllables(syl))
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = &self.generators;
        for g in names {
            writeln!(f, "gen {g}")?;
        }
        for r in &self.relators {
            writeln!(f, "rel {}", r.display(names))?;
        }
        let component = |f: &mut fmt::Formatter<'_>, c: &PeripheralComponent| -> fmt::Result {
            for (m, l) in &c.rotated {
                writeln!(
                    f,
                    "rotated {} meridian {} longitude {}",
                    c.id,
                    m.display(names),
                    l.display(names)
                )?;
            }
            Ok(())
        };
        for c in &self.peripheral {
            writeln!(
                f,
                "periph {} meridian {} longitude {}",
                c.id,
                c.meridian.display(names),
                c.longitude.display(names)
            )?;
            component(f, c)?;
        }
        for r in &self.ledger {
            let c = &r.component;
            writeln!(
                f,
                "filled {} {} relator {} position {} meridian {} longitude {}",
                c.id,
                r.slope,
                r.relator,
                r.position,
                c.meridian.display(names),
                c.longitude.display(names)
            )?;
            component(f, c)?;
        }
        Ok(())
    }
}

impl FromStr for Presentation {
    type Err = PresentationError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_presentation(text)
    }
}

/// Parses the presentation file format.
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let mut generators: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut relators = Vec::new();
    let mut peripheral: Vec<PeripheralComponent> = Vec::new();
    let mut ledger: Vec<FillRecord> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let syntax = |message: String| PresentationError::Syntax { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let kw = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        let idx: HashMap<&str, usize> = index.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let word = |ts: &[&str]| parse_word_with(&idx, ts.iter().copied()).map_err(syntax);
        // splits `<id> ... meridian <w> longitude <w>`
        let pair = |ts: &[&str]| -> Result<(Word, Word), PresentationError> {
            let m = ts.iter().position(|t| *t == "meridian");
            let l = ts.iter().position(|t| *t == "longitude");
            match (m, l) {
                (Some(0), Some(l)) if l > 1 => Ok((word(&ts[1..l])?, word(&ts[l + 1..])?)),
                _ => Err(syntax("expected `meridian <word> longitude <word>`".into())),
            }
        };
        match kw {
            "gen" => {
                let [name] = rest[..] else {
                    return Err(syntax("expected `gen <name>`".into()));
                };
                if !valid_generator_name(name) {
                    return Err(PresentationError::InvalidName(name.to_string()));
                }
                if index.insert(name.to_string(), generators.len()).is_some() {
                    return Err(PresentationError::DuplicateGenerator(name.to_string()));
                }
                generators.push(name.to_string());
            }
            "rel" => relators.push(word(&rest)?),
            "periph" => {
                let Some((&id, tail)) = rest.split_first() else {
                    return Err(syntax("expected component id".into()));
                };
                let (meridian, longitude) = pair(tail)?;
                peripheral.push(PeripheralComponent::new(id, meridian, longitude));
            }
            "rotated" => {
                let Some((&id, tail)) = rest.split_first() else {
                    return Err(syntax("expected component id".into()));
                };
                let p = pair(tail)?;
                let target = peripheral
                    .iter_mut()
                    .rev()
                    .chain(ledger.iter_mut().rev().map(|r| &mut r.component))
                    .find(|c| c.id == id)
                    .ok_or_else(|| PresentationError::UnknownComponent(id.to_string()))?;
                target.rotated.push(p);
            }
            "filled" => {
                // filled <id> <p/q> relator <i> position <j> meridian .. longitude ..
                if rest.len() < 6 || rest[2] != "relator" || rest[4] != "position" {
                    return Err(syntax(
                        "expected `filled <id> <p/q> relator <i> position <j> meridian <w> longitude <w>`"
                            .into(),
                    ));
                }
                let slope: Slope = rest[1]
                    .parse()
                    .map_err(|e| syntax(format!("bad slope: {e}")))?;
                let relator = rest[3]
                    .parse()
                    .map_err(|_| syntax("bad relator index".into()))?;
                let position = rest[5]
                    .parse()
                    .map_err(|_| syntax("bad position".into()))?;
                let (meridian, longitude) = pair(&rest[6..])?;
                ledger.push(FillRecord {
                    component: PeripheralComponent::new(rest[0], meridian, longitude),
                    slope,
                    position,
                    relator,
                });
            }
            other => return Err(syntax(format!("unknown record `{other}`"))),
        }
    }
    Presentation::with_ledger(generators, relators, peripheral, ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn file_round_trip() {
        let p = chainmail_presentation(&fixtures::k4()).unwrap();
        let text = p.to_string();
        let q: Presentation = text.parse().unwrap();
        assert_eq!(p, q);
        assert_eq!(q.to_string(), text);
    }

    #[test]
    fn rejects_unknown_generator() {
        let err = parse_presentation("gen a\nrel a b\n").unwrap_err();
        assert!(matches!(err, PresentationError::Syntax { line: 2, .. }));
    }

    #[test]
    fn abelianization_rows() {
        let p = chainmail_presentation(&fixtures::p2()).unwrap();
        let m = p.abelianization_matrix();
        // relator order: two vertex relators, edge relator, commutator
        let g = |n: &str| p.generator_index(n).unwrap();
        let edge_row = 2;
        assert_eq!(m.get_i64(edge_row, g("mu[2,e]")), 1);
        assert_eq!(m.get_i64(edge_row, g("lam[e]")), 1);
        assert_eq!(m.get_i64(edge_row, g("mu[1,e]")), -1);
        assert_eq!(m.get_i64(edge_row, g("mu[e]")), 0);
        for c in 0..p.generators().len() {
            assert_eq!(m.get_i64(3, c), 0);
        }
    }

    #[test]
    fn cycle_row_of_triangle() {
        let p = chainmail_presentation(&fixtures::triangle()).unwrap();
        let m = p.abelianization_matrix();
        // 6 vertex relators, 3 edge relators, then the cycle relator
        let row = 9;
        for (i, name) in p.generators().iter().enumerate() {
            let v = m.get_i64(row, i);
            if name.starts_with("lam[") {
                assert_eq!(v.abs(), 1);
            } else {
                assert_eq!(v, 0);
            }
        }
    }

    #[test]
    fn peripheral_derivations() {
        for (g, v, steps) in [
            (fixtures::p2(), "v:1", 1),
            (fixtures::k4(), "v:4", 3),
            (fixtures::triangle(), "v:2", 2),
        ] {
            let p = chainmail_presentation(&g).unwrap();
            let d = p.derive_peripheral_commutation(v).unwrap();
            assert_eq!(d.steps.len(), steps);
            assert!(d.check(&p));
        }
    }

    #[test]
    fn tampered_derivation_fails() {
        let p = chainmail_presentation(&fixtures::k4()).unwrap();
        let mut d = p.derive_peripheral_commutation("v:1").unwrap();
        d.steps[1].relator = (d.steps[1].relator + 1) % p.relators().len();
        assert!(!d.check(&p));
        let mut d = p.derive_peripheral_commutation("v:1").unwrap();
        d.steps.pop();
        assert!(!d.check(&p));
    }

    #[test]
    fn isolated_vertex_has_no_derivation() {
        let p = chainmail_presentation(&fixtures::isolated()).unwrap();
        assert!(matches!(
            p.derive_peripheral_commutation("v:o"),
            Err(PresentationError::NoRotatedFamily(_))
        ));
    }
}
