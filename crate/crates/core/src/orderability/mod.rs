//! Left total preorders seen through the sign classes of finitely many
//! words, detection constraints, and a certifying refutation search.

mod certificate;
mod search;
mod universe;

pub use certificate::{check_refutation, check_refutation_text, CertNode, Refutation, Rule};
pub use search::{refute, Budget, Outcome, RefuteError, StopReason, Unknown};
pub use universe::ball;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::calculus::slopeset::{Q, SlopeSet};
use crate::presentation::{FillRecord, Presentation, Word};
use crate::surgery::Slope;

/// Sign of a group element under a left total preorder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignClass {
    /// `g >= 1` and not `g <= 1`
    Pos,
    /// `g <= 1` and not `g >= 1`
    Neg,
    /// the residue group: `g <= 1` and `g >= 1`
    Res,
}

impl SignClass {
    pub const ALL: [SignClass; 3] = [SignClass::Res, SignClass::Pos, SignClass::Neg];

    pub fn flip(self) -> SignClass {
        match self {
            SignClass::Pos => SignClass::Neg,
            SignClass::Neg => SignClass::Pos,
            SignClass::Res => SignClass::Res,
        }
    }

    /// Class of `g h` from the classes of `g` and `h`; `None` for mixed
    /// strict signs.
    pub fn product(self, other: SignClass) -> Option<SignClass> {
        use SignClass::*;
        match (self, other) {
            (Res, x) | (x, Res) => Some(x),
            (Pos, Pos) => Some(Pos),
            (Neg, Neg) => Some(Neg),
            _ => None,
        }
    }

    /// `g >= 1`
    pub fn nonnegative(self) -> bool {
        self != SignClass::Neg
    }
}

impl fmt::Display for SignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignClass::Pos => "POS",
            SignClass::Neg => "NEG",
            SignClass::Res => "RES",
        })
    }
}

impl FromStr for SignClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "POS" => Ok(SignClass::Pos),
            "NEG" => Ok(SignClass::Neg),
            "RES" => Ok(SignClass::Res),
            _ => Err(format!("unknown class `{s}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectionError {
    #[error("empty slope set")]
    EmptySlopeSet,
    #[error("box size must be at least 1")]
    EmptyBox,
    #[error("sign map is not inverse-symmetric at ({0}, {1})")]
    Asymmetric(i64, i64),
    #[error("sign map is missing the point ({0}, {1})")]
    Missing(i64, i64),
    #[error("no line separates the sign map")]
    Inconsistent,
}

/// The points of `[-n, n]^2` other than the origin, row by row.
pub fn box_points(n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in -n..=n {
        for q in -n..=n {
            if (p, q) != (0, 0) {
                out.push((p, q));
            }
        }
    }
    out
}

/// Which slopes a line through the origin realizes, for a fixed box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineSlopes {
    /// Exactly one slope through box points.
    Critical(Slope),
    /// Every slope strictly between two consecutive critical values.
    Arc(Option<Q>, Option<Q>),
}

impl LineSlopes {
    pub fn as_set(&self) -> SlopeSet {
        use crate::calculus::slopeset::Bound;
        match self {
            LineSlopes::Critical(s) => SlopeSet::point(*s),
            LineSlopes::Arc(lo, hi) => SlopeSet::interval(
                lo.map_or(Bound::Unbounded, Bound::Open),
                hi.map_or(Bound::Unbounded, Bound::Open),
            ),
        }
    }
}

/// A line through the origin and the side of it every box point lies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub slopes: LineSlopes,
    /// `-1`, `0` or `1` per box point.
    pub side: Vec<i8>,
}

/// One representative line per combinatorial type in the box, in increasing
/// slope order with infinity last.
pub fn box_lines(n: i64) -> Vec<Line> {
    let points = box_points(n);
    let mut values: Vec<Q> = points
        .iter()
        .filter(|&&(_, q)| q != 0)
        .map(|&(p, q)| Q::new(p as i128, q as i128))
        .collect();
    values.sort();
    values.dedup();
    let side_of = |x: i128, y: i128| -> Vec<i8> {
        points
            .iter()
            .map(|&(p, q)| (p as i128 * y - q as i128 * x).signum() as i8)
            .collect()
    };
    let dir = |v: Q| (*v.numer(), *v.denom());
    let mut lines = Vec::new();
    let arc = |lo: Option<Q>, hi: Option<Q>| {
        let sample = match (lo, hi) {
            (None, Some(b)) => b - Q::one(),
            (Some(a), None) => a + Q::one(),
            (Some(a), Some(b)) => (a + b) / Q::from_integer(2),
            (None, None) => Q::zero(),
        };
        let (x, y) = dir(sample);
        Line {
            slopes: LineSlopes::Arc(lo, hi),
            side: side_of(x, y),
        }
    };
    lines.push(arc(None, values.first().copied()));
    for (i, v) in values.iter().enumerate() {
        let (x, y) = dir(*v);
        lines.push(Line {
            slopes: LineSlopes::Critical(Slope::new(x as i64, y as i64).expect("nonzero")),
            side: side_of(x, y),
        });
        lines.push(arc(Some(*v), values.get(i + 1).copied()));
    }
    lines.push(Line {
        slopes: LineSlopes::Critical(Slope::INFINITY),
        side: side_of(1, 0),
    });
    lines
}

/// Whether some open side of `line` holds both a nonnegative and a negative
/// point. Unknown classes are ignored.
pub fn line_violated(line: &Line, class: impl Fn(usize) -> Option<SignClass>) -> bool {
    let mut seen = [[false; 2]; 2];
    for (i, &s) in line.side.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some(c) = class(i) {
            seen[(s > 0) as usize][c.nonnegative() as usize] = true;
        }
    }
    seen.iter().any(|s| s[0] && s[1])
}

/// Result of reading a slope off the signs of a peripheral lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Z2Detection {
    AllResidue,
    Slopes(SlopeSet),
}

/// The slopes of all lines compatible with the sign map on `[-n, n]^2`.
pub fn detect_slope_z2(
    signs: &HashMap<(i64, i64), SignClass>,
    n: i64,
) -> Result<Z2Detection, DetectionError> {
    if n < 1 {
        return Err(DetectionError::EmptyBox);
    }
    let points = box_points(n);
    let mut classes = Vec::with_capacity(points.len());
    for &(p, q) in &points {
        let c = *signs.get(&(p, q)).ok_or(DetectionError::Missing(p, q))?;
        let d = *signs.get(&(-p, -q)).ok_or(DetectionError::Missing(-p, -q))?;
        if d != c.flip() {
            return Err(DetectionError::Asymmetric(p, q));
        }
        classes.push(c);
    }
    if classes.iter().all(|&c| c == SignClass::Res) {
        return Ok(Z2Detection::AllResidue);
    }
    let mut out = SlopeSet::empty();
    for line in box_lines(n) {
        if !line_violated(&line, |i| Some(classes[i])) {
            out = out.union(&line.slopes.as_set());
        }
    }
    if out.is_empty() {
        return Err(DetectionError::Inconsistent);
    }
    Ok(Z2Detection::Slopes(out))
}

/// Weak detection of some slope in `slopes` with respect to the conjugated
/// pair `(c mer c^-1, c lon c^-1)`, restricted to a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakFragment {
    pub meridian: Word,
    pub longitude: Word,
    pub conjugator: Word,
    pub n: i64,
    pub slopes: SlopeSet,
    pub points: Vec<(i64, i64)>,
    /// `c mer^p lon^q c^-1` per point.
    pub words: Vec<Word>,
    /// Lines whose slope lies in `slopes`; at least one must be unviolated.
    pub lines: Vec<Line>,
}

impl WeakFragment {
    pub fn violated(&self, class: impl Fn(usize) -> Option<SignClass>) -> bool {
        self.lines.iter().all(|l| line_violated(l, &class))
    }
}

/// What a refutation has to contradict.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    /// Content hash of the presentation the constraints speak about.
    pub presentation: Option<String>,
    /// Words whose class must be RES.
    pub residue: Vec<Word>,
    pub weak: Vec<WeakFragment>,
    /// Properness: at least one must be non-RES.
    pub witnesses: Vec<Word>,
}

impl ConstraintSet {
    /// No detection constraints; properness witnessed by the generators.
    pub fn new(p: &Presentation) -> Self {
        ConstraintSet {
            presentation: Some(p.content_hash()),
            residue: Vec::new(),
            weak: Vec::new(),
            witnesses: (0..p.generators().len()).map(Word::generator).collect(),
        }
    }

    pub fn extend(&mut self, fragment: ConstraintSet) {
        self.residue.extend(fragment.residue);
        self.weak.extend(fragment.weak);
        self.witnesses.extend(fragment.witnesses);
    }

    /// Strong detection of every filled slope, for all conjugators up to
    /// `conj_len`.
    pub fn from_ledger(p: &Presentation, conj_len: usize) -> Self {
        let mut c = ConstraintSet::new(p);
        let conj = conjugators(p.generators().len(), conj_len);
        for FillRecord { component, slope, .. } in p.ledger() {
            c.extend(instantiate_strong_detection(
                &component.meridian,
                &component.longitude,
                *slope,
                &conj,
            ));
        }
        c
    }

    /// Every word a constraint mentions.
    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.residue
            .iter()
            .chain(self.weak.iter().flat_map(|f| f.words.iter()))
            .chain(self.witnesses.iter())
    }
}

/// All reduced words of length at most `len`, shortest first.
pub fn conjugators(generators: usize, len: usize) -> Vec<Word> {
    ball(generators, len)
        .iter()
        .map(|l| Word::from_letters(l))
        .collect()
}

pub fn instantiate_weak_detection(
    mer: &Word,
    lon: &Word,
    slopes: &SlopeSet,
    conjugators: &[Word],
    n: i64,
) -> Result<ConstraintSet, DetectionError> {
    if slopes.is_empty() {
        return Err(DetectionError::EmptySlopeSet);
    }
    if n < 1 {
        return Err(DetectionError::EmptyBox);
    }
    let mut out = ConstraintSet::default();
    if slopes.covers_projective_line() {
        return Ok(out);
    }
    let points = box_points(n);
    let lines: Vec<Line> = box_lines(n)
        .into_iter()
        .filter(|l| !l.slopes.as_set().intersection(slopes).is_empty())
        .collect();
    for c in conjugators {
        let words = points
            .iter()
            .map(|&(p, q)| c.conjugate(&mer.pow(p).mul(&lon.pow(q))))
            .collect();
        out.weak.push(WeakFragment {
            meridian: mer.clone(),
            longitude: lon.clone(),
            conjugator: c.clone(),
            n,
            slopes: slopes.clone(),
            points: points.clone(),
            words,
            lines: lines.clone(),
        });
    }
    Ok(out)
}

pub fn instantiate_strong_detection(
    mer: &Word,
    lon: &Word,
    s: Slope,
    conjugators: &[Word],
) -> ConstraintSet {
    let core = mer.pow(s.p()).mul(&lon.pow(s.q()));
    ConstraintSet {
        residue: conjugators.iter().map(|c| c.conjugate(&core)).collect(),
        ..ConstraintSet::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_map(n: i64, f: impl Fn(i64, i64) -> SignClass) -> HashMap<(i64, i64), SignClass> {
        box_points(n).into_iter().map(|(p, q)| ((p, q), f(p, q))).collect()
    }

    #[test]
    fn product_table() {
        use SignClass::*;
        assert_eq!(Pos.product(Res), Some(Pos));
        assert_eq!(Res.product(Neg), Some(Neg));
        assert_eq!(Res.product(Res), Some(Res));
        assert_eq!(Pos.product(Neg), None);
        for a in SignClass::ALL {
            for b in SignClass::ALL {
                assert_eq!(a.flip().product(b.flip()), a.product(b).map(SignClass::flip));
            }
        }
    }

    #[test]
    fn all_residue() {
        let m = sign_map(3, |_, _| SignClass::Res);
        assert_eq!(detect_slope_z2(&m, 3).unwrap(), Z2Detection::AllResidue);
    }

    #[test]
    fn lexicographic_detects_longitude() {
        let m = sign_map(3, |p, q| {
            if p > 0 || (p == 0 && q > 0) {
                SignClass::Pos
            } else {
                SignClass::Neg
            }
        });
        let Z2Detection::Slopes(s) = detect_slope_z2(&m, 3).unwrap() else {
            panic!()
        };
        // the box cannot separate slopes in [-1/3, 0]
        assert_eq!(s.to_string(), "[-1/3,0]");
        assert!(s.contains(Slope::ZERO));
    }

    #[test]
    fn linear_functional_detects_kernel() {
        let m = sign_map(3, |p, q| match (p + 2 * q).signum() {
            1 => SignClass::Pos,
            -1 => SignClass::Neg,
            _ => SignClass::Res,
        });
        let Z2Detection::Slopes(s) = detect_slope_z2(&m, 3).unwrap() else {
            panic!()
        };
        assert_eq!(s, SlopeSet::point(Slope::new(2, -1).unwrap()));
    }

    #[test]
    fn inconsistent_sign_map() {
        // positive on both axes' positive halves but negative on the diagonal
        let m = sign_map(1, |p, q| {
            let s = if (p, q) == (1, 1) || (p, q) == (-1, -1) { -1 } else { 1 };
            let base = if p > 0 || (p == 0 && q > 0) { 1 } else { -1 };
            if base * s > 0 {
                SignClass::Pos
            } else {
                SignClass::Neg
            }
        });
        assert_eq!(detect_slope_z2(&m, 1), Err(DetectionError::Inconsistent));
        let mut bad = sign_map(1, |_, _| SignClass::Pos);
        bad.insert((0, 1), SignClass::Pos);
        assert!(matches!(detect_slope_z2(&bad, 1), Err(DetectionError::Asymmetric(..))));
    }

    #[test]
    fn negative_slopes_relate_lambda_and_mu() {
        // pair order (lambda, mu): lambda is the meridian of the pair
        let (lam, mu) = (Word::generator(0), Word::generator(1));
        let c = instantiate_weak_detection(&lam, &mu, &SlopeSet::negative(), &[Word::identity()], 1).unwrap();
        let f = &c.weak[0];
        let idx = |p, q| f.points.iter().position(|&x| x == (p, q)).unwrap();
        let (il, im) = (idx(1, 0), idx(0, 1));
        assert_eq!(f.words[il], lam);
        assert_eq!(f.words[im], mu);
        // lambda POS with mu NEG violates every admissible line
        let classes = |i: usize| {
            if i == il {
                Some(SignClass::Pos)
            } else if i == im {
                Some(SignClass::Neg)
            } else {
                None
            }
        };
        assert!(f.violated(classes));
        let ok = |i: usize| if i == il || i == im { Some(SignClass::Pos) } else { None };
        assert!(!f.violated(ok));
    }

    #[test]
    fn longitude_direction_fragment() {
        let (m, l) = (Word::generator(0), Word::generator(1));
        let c = instantiate_weak_detection(&m, &l, &SlopeSet::point(Slope::ZERO), &[Word::identity()], 1).unwrap();
        let f = &c.weak[0];
        assert_eq!(f.lines.len(), 1);
        // the sign of mu fixes the sign of every mu lambda^k
        let mu = f.points.iter().position(|&x| x == (1, 0)).unwrap();
        let mul = f.points.iter().position(|&x| x == (1, -1)).unwrap();
        assert!(f.violated(|i| [(mu, SignClass::Pos), (mul, SignClass::Neg)]
            .iter()
            .find(|x| x.0 == i)
            .map(|x| x.1)));
    }

    #[test]
    fn full_line_is_vacuous() {
        let (m, l) = (Word::generator(0), Word::generator(1));
        let c = instantiate_weak_detection(&m, &l, &SlopeSet::all(), &[Word::identity()], 2).unwrap();
        assert!(c.weak.is_empty());
        assert!(matches!(
            instantiate_weak_detection(&m, &l, &SlopeSet::empty(), &[], 2),
            Err(DetectionError::EmptySlopeSet)
        ));
    }

    #[test]
    fn strong_detection_words() {
        let (m, l) = (Word::generator(0), Word::generator(1));
        let c = instantiate_strong_detection(&m, &l, Slope::ZERO, &[Word::identity()]);
        assert_eq!(c.residue, vec![l.clone()]);
        let c = instantiate_strong_detection(&m, &l, Slope::INFINITY, &[Word::identity()]);
        assert_eq!(c.residue, vec![m.clone()]);
        let conj = [Word::identity(), m.clone(), l.clone()];
        assert_eq!(instantiate_strong_detection(&m, &l, Slope::ZERO, &conj).residue.len(), 3);
    }
}
