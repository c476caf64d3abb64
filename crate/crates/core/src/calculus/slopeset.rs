//! Finite unions of intervals on the projective line.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::surgery::Slope;

pub type Q = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed slope set `{0}`")]
pub struct SlopeSetParseError(pub String);

/// One side of an interval on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Unbounded,
    Open(Q),
    Closed(Q),
}

/// A subset of `R ∪ {∞}` that is a finite union of intervals.
///
/// Stored as cells: sorted cut points, whether each cut point belongs to the
/// set, and whether each open gap between consecutive cuts does. The form is
/// canonical because cuts that separate nothing are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlopeSet {
    cuts: Vec<Q>,
    points: Vec<bool>,
    gaps: Vec<bool>,
    infinity: bool,
}

impl SlopeSet {
    pub fn empty() -> Self {
        SlopeSet {
            cuts: Vec::new(),
            points: Vec::new(),
            gaps: vec![false],
            infinity: false,
        }
    }

    /// The whole projective line.
    pub fn all() -> Self {
        SlopeSet {
            cuts: Vec::new(),
            points: Vec::new(),
            gaps: vec![true],
            infinity: true,
        }
    }

    /// `(-inf, 0)`
    pub fn negative() -> Self {
        SlopeSet::interval(Bound::Unbounded, Bound::Open(Q::zero()))
    }

    /// `(0, inf)`
    pub fn positive() -> Self {
        SlopeSet::interval(Bound::Open(Q::zero()), Bound::Unbounded)
    }

    pub fn infinity() -> Self {
        SlopeSet {
            infinity: true,
            ..SlopeSet::empty()
        }
    }

    pub fn point(s: Slope) -> Self {
        match s.value() {
            None => SlopeSet::infinity(),
            Some(v) => SlopeSet::interval(Bound::Closed(v), Bound::Closed(v)),
        }
    }

    /// A real interval; empty when the bounds cross.
    pub fn interval(lo: Bound, hi: Bound) -> Self {
        let mut cuts = Vec::new();
        let mut points = Vec::new();
        let mut gaps = vec![matches!(lo, Bound::Unbounded)];
        let lo_v = bound_value(lo);
        let hi_v = bound_value(hi);
        if let (Some(a), Some(b)) = (lo_v, hi_v) {
            if a > b || (a == b && !(matches!(lo, Bound::Closed(_)) && matches!(hi, Bound::Closed(_)))) {
                return SlopeSet::empty();
            }
            if a == b {
                return SlopeSet {
                    cuts: vec![a],
                    points: vec![true],
                    gaps: vec![false, false],
                    infinity: false,
                };
            }
        }
        if let Some(a) = lo_v {
            cuts.push(a);
            points.push(matches!(lo, Bound::Closed(_)));
            gaps.push(true);
        }
        if let Some(b) = hi_v {
            cuts.push(b);
            points.push(matches!(hi, Bound::Closed(_)));
            gaps.push(false);
        }
        SlopeSet {
            cuts,
            points,
            gaps,
            infinity: false,
        }
        .canonical()
    }

    pub fn contains_value(&self, x: &Q) -> bool {
        match self.cuts.binary_search(x) {
            Ok(i) => self.points[i],
            Err(i) => self.gaps[i],
        }
    }

    pub fn contains(&self, s: Slope) -> bool {
        match s.value() {
            None => self.infinity,
            Some(v) => self.contains_value(&v),
        }
    }

    pub fn contains_infinity(&self) -> bool {
        self.infinity
    }

    pub fn is_empty(&self) -> bool {
        !self.infinity && self.cuts.is_empty() && !self.gaps[0]
    }

    /// True iff the set is the whole projective line.
    pub fn covers_projective_line(&self) -> bool {
        self.infinity && self.cuts.is_empty() && self.gaps[0]
    }

    pub fn union(&self, other: &SlopeSet) -> SlopeSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &SlopeSet) -> SlopeSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn complement(&self) -> SlopeSet {
        SlopeSet {
            cuts: self.cuts.clone(),
            points: self.points.iter().map(|b| !b).collect(),
            gaps: self.gaps.iter().map(|b| !b).collect(),
            infinity: !self.infinity,
        }
    }

    pub fn is_subset(&self, other: &SlopeSet) -> bool {
        self.intersection(&other.complement()).is_empty()
    }

    /// Whether the set meets the open real interval `(lo, hi)`; `None` is
    /// unbounded on that side.
    pub fn meets_open(&self, lo: Option<Q>, hi: Option<Q>) -> bool {
        let lo = lo.map_or(Bound::Unbounded, Bound::Open);
        let hi = hi.map_or(Bound::Unbounded, Bound::Open);
        !self.intersection(&SlopeSet::interval(lo, hi)).is_empty()
    }

    fn combine(&self, other: &SlopeSet, op: impl Fn(bool, bool) -> bool) -> SlopeSet {
        let mut cuts: Vec<Q> = self.cuts.iter().chain(&other.cuts).copied().collect();
        cuts.sort();
        cuts.dedup();
        let points = cuts
            .iter()
            .map(|c| op(self.contains_value(c), other.contains_value(c)))
            .collect();
        let mut gaps = Vec::with_capacity(cuts.len() + 1);
        for i in 0..=cuts.len() {
            let sample = gap_sample(&cuts, i);
            gaps.push(op(self.contains_value(&sample), other.contains_value(&sample)));
        }
        SlopeSet {
            cuts,
            points,
            gaps,
            infinity: op(self.infinity, other.infinity),
        }
        .canonical()
    }

    fn canonical(mut self) -> SlopeSet {
        let mut i = 0;
        while i < self.cuts.len() {
            if self.points[i] == self.gaps[i] && self.gaps[i] == self.gaps[i + 1] {
                self.cuts.remove(i);
                self.points.remove(i);
                self.gaps.remove(i + 1);
            } else {
                i += 1;
            }
        }
        self
    }

    /// Maximal real intervals, in increasing order.
    pub fn intervals(&self) -> Vec<(Bound, Bound)> {
        let mut out = Vec::new();
        let mut start: Option<Bound> = self.gaps[0].then_some(Bound::Unbounded);
        for (i, c) in self.cuts.iter().enumerate() {
            let (p, right) = (self.points[i], self.gaps[i + 1]);
            match start {
                Some(s) => {
                    if !p {
                        out.push((s, Bound::Open(*c)));
                        start = right.then_some(Bound::Open(*c));
                    } else if !right {
                        out.push((s, Bound::Closed(*c)));
                        start = None;
                    }
                }
                None => {
                    if p {
                        if right {
                            start = Some(Bound::Closed(*c));
                        } else {
                            out.push((Bound::Closed(*c), Bound::Closed(*c)));
                        }
                    } else if right {
                        start = Some(Bound::Open(*c));
                    }
                }
            }
        }
        if let Some(s) = start {
            out.push((s, Bound::Unbounded));
        }
        out
    }
}

fn bound_value(b: Bound) -> Option<Q> {
    match b {
        Bound::Unbounded => None,
        Bound::Open(v) | Bound::Closed(v) => Some(v),
    }
}

/// A rational strictly inside gap `i` of `cuts`.
fn gap_sample(cuts: &[Q], i: usize) -> Q {
    match (i.checked_sub(1).map(|j| cuts[j]), cuts.get(i)) {
        (None, None) => Q::zero(),
        (None, Some(b)) => b - Q::one(),
        (Some(a), None) => a + Q::one(),
        (Some(a), Some(b)) => (a + b) / Q::from_integer(2),
    }
}

fn show_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse_q(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((a, b)) => {
            let n: i128 = a.parse().ok()?;
            let d: i128 = b.parse().ok()?;
            (d != 0).then(|| Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for SlopeSet {
    /// `(-inf,0) u [1,2) u {3} u inf`, `empty`, or `all`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.covers_projective_line() {
            return write!(f, "all");
        }
        if self.is_empty() {
            return write!(f, "empty");
        }
        let mut parts = Vec::new();
        for (lo, hi) in self.intervals() {
            parts.push(match (lo, hi) {
                (Bound::Closed(a), Bound::Closed(b)) if a == b => format!("{{{}}}", show_q(&a)),
                _ => {
                    let l = match lo {
                        Bound::Unbounded => "(-inf".to_string(),
                        Bound::Open(a) => format!("({}", show_q(&a)),
                        Bound::Closed(a) => format!("[{}", show_q(&a)),
                    };
                    let r = match hi {
                        Bound::Unbounded => "inf)".to_string(),
                        Bound::Open(b) => format!("{})", show_q(&b)),
                        Bound::Closed(b) => format!("{}]", show_q(&b)),
                    };
                    format!("{l},{r}")
                }
            });
        }
        if self.infinity {
            parts.push("inf".to_string());
        }
        write!(f, "{}", parts.join(" u "))
    }
}

impl FromStr for SlopeSet {
    type Err = SlopeSetParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SlopeSetParseError(s.to_string());
        let s = s.trim();
        match s {
            "all" => return Ok(SlopeSet::all()),
            "empty" => return Ok(SlopeSet::empty()),
            _ => {}
        }
        let mut out = SlopeSet::empty();
        for part in s.split(" u ").map(str::trim) {
            let piece = if part == "inf" {
                SlopeSet::infinity()
            } else if let Some(inner) = part.strip_prefix('{').and_then(|p| p.strip_suffix('}')) {
                let v = parse_q(inner).ok_or_else(err)?;
                SlopeSet::interval(Bound::Closed(v), Bound::Closed(v))
            } else {
                let (l, r) = part.split_once(',').ok_or_else(err)?;
                let lo = match l {
                    "(-inf" => Bound::Unbounded,
                    _ if l.starts_with('(') => Bound::Open(parse_q(&l[1..]).ok_or_else(err)?),
                    _ if l.starts_with('[') => Bound::Closed(parse_q(&l[1..]).ok_or_else(err)?),
                    _ => return Err(err()),
                };
                let body = &r[..r.len().saturating_sub(1)];
                let hi = match r {
                    "inf)" => Bound::Unbounded,
                    _ if r.ends_with(')') => Bound::Open(parse_q(body).ok_or_else(err)?),
                    _ if r.ends_with(']') => Bound::Closed(parse_q(body).ok_or_else(err)?),
                    _ => return Err(err()),
                };
                SlopeSet::interval(lo, hi)
            };
            out = out.union(&piece);
        }
        Ok(out)
    }
}
