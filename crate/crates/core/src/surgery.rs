//! Slopes, Dehn filling and splicing of presentations.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

use crate::presentation::{FillRecord, Presentation, PresentationError, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("slope 0/0 is not a projective point")]
    ZeroSlope,
    #[error("slope {0}/{1} is not reduced")]
    Unreduced(i64, i64),
    #[error("malformed slope `{0}`")]
    Malformed(String),
    #[error("unknown peripheral component `{0}`")]
    UnknownComponent(String),
    #[error("component `{0}` has no filling ledger entry")]
    NotFilled(String),
    #[error("cannot splice a presentation with itself")]
    SameInstance,
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// A projective pair `[p:q]` acting as `meridian^p longitude^q`.
///
/// Always reduced: `gcd(|p|, |q|) = 1`, `q >= 0`, and `[1:0]` for infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };
    pub const ZERO: Slope = Slope { p: 0, q: 1 };

    /// Normalizes an arbitrary nonzero pair.
    pub fn new(p: i64, q: i64) -> Result<Slope, SurgeryError> {
        if p == 0 && q == 0 {
            return Err(SurgeryError::ZeroSlope);
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    /// Accepts only pairs already in lowest terms (sign normalization allowed).
    pub fn reduced(p: i64, q: i64) -> Result<Slope, SurgeryError> {
        let s = Slope::new(p, q)?;
        if s.p.abs() != p.abs() || s.q.abs() != q.abs() {
            return Err(SurgeryError::Unreduced(p, q));
        }
        Ok(s)
    }

    pub fn p(self) -> i64 {
        self.p
    }

    pub fn q(self) -> i64 {
        self.q
    }

    pub fn is_infinite(self) -> bool {
        self.q == 0
    }

    /// `p/q`, or `None` at infinity.
    pub fn value(self) -> Option<Ratio<i128>> {
        (self.q != 0).then(|| Ratio::new(self.p as i128, self.q as i128))
    }

    /// Sign of `p*q`: positive, zero (the longitude) or negative. Infinity is 0.
    pub fn sign(self) -> i32 {
        (self.p.signum() * self.q.signum()) as i32
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = SurgeryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| SurgeryError::Malformed(s.to_string()))?;
        let p: i64 = p.parse().map_err(|_| SurgeryError::Malformed(s.to_string()))?;
        let q: i64 = q.parse().map_err(|_| SurgeryError::Malformed(s.to_string()))?;
        Slope::new(p, q)
    }
}

/// Adds `meridian^p longitude^q` for `component` and moves the component to
/// the filling ledger.
pub fn dehn_fill(
    pres: &Presentation,
    component: &str,
    slope: Slope,
) -> Result<Presentation, SurgeryError> {
    let position = pres
        .component_position(component)
        .ok_or_else(|| SurgeryError::UnknownComponent(component.to_string()))?;
    let (gens, rels, periph, ledger) = pres.parts();
    let comp = periph[position].clone();
    let mut relators = rels.to_vec();
    relators.push(comp.slope_word(slope));
    let mut peripheral = periph.to_vec();
    peripheral.remove(position);
    let mut ledger = ledger.to_vec();
    ledger.push(FillRecord {
        component: comp,
        slope,
        position,
        relator: relators.len() - 1,
    });
    Ok(Presentation::with_ledger(
        gens.to_vec(),
        relators,
        peripheral,
        ledger,
    )?)
}

/// Inverse of [`dehn_fill`]: removes the filling relator and restores the
/// component at its original position.
pub fn unfill(pres: &Presentation, component: &str) -> Result<(Presentation, Slope), SurgeryError> {
    let (gens, rels, periph, ledger) = pres.parts();
    let at = ledger
        .iter()
        .rposition(|r| r.component.id == component)
        .ok_or_else(|| SurgeryError::NotFilled(component.to_string()))?;
    let record = ledger[at].clone();
    let mut relators = rels.to_vec();
    relators.remove(record.relator);
    let mut peripheral = periph.to_vec();
    peripheral.insert(record.position.min(peripheral.len()), record.component.clone());
    let ledger: Vec<FillRecord> = ledger
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != at)
        .map(|(_, r)| {
            let mut r = r.clone();
            if r.relator > record.relator {
                r.relator -= 1;
            }
            r
        })
        .collect();
    Ok((
        Presentation::with_ledger(gens.to_vec(), relators, peripheral, ledger)?,
        record.slope,
    ))
}

/// Glues `c1` of `p1` to `c2` of `p2`, identifying meridians and longitudes.
///
/// Generators and components of the pieces are prefixed with `a/` and `b/`.
pub fn splice(
    p1: &Presentation,
    c1: &str,
    p2: &Presentation,
    c2: &str,
) -> Result<Presentation, SurgeryError> {
    if std::ptr::eq(p1, p2) {
        return Err(SurgeryError::SameInstance);
    }
    let i1 = p1
        .component_position(c1)
        .ok_or_else(|| SurgeryError::UnknownComponent(c1.to_string()))?;
    let i2 = p2
        .component_position(c2)
        .ok_or_else(|| SurgeryError::UnknownComponent(c2.to_string()))?;
    let a = p1.prefixed("a/");
    let b = p2.prefixed("b/");
    let offset = a.generators().len();
    let (b_rels, b_periph, b_ledger) = b.shifted(offset, a.relators().len());

    let mut generators = a.generators().to_vec();
    generators.extend_from_slice(b.generators());
    let mut relators = a.relators().to_vec();
    relators.extend(b_rels);
    let g1 = &a.peripheral()[i1];
    let g2 = &b_periph[i2];
    relators.push(g1.meridian.inverse().mul(&g2.meridian));
    relators.push(g1.longitude.inverse().mul(&g2.longitude));

    let mut peripheral: Vec<_> = a
        .peripheral()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != i1)
        .map(|(_, c)| c.clone())
        .collect();
    peripheral.extend(
        b_periph
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != i2)
            .map(|(_, c)| c.clone()),
    );
    let mut ledger = a.ledger().to_vec();
    ledger.extend(b_ledger);
    Ok(Presentation::with_ledger(
        generators, relators, peripheral, ledger,
    )?)
}

/// Convenience for tests and the pipeline: fills every listed component.
pub fn fill_all(
    pres: &Presentation,
    fills: &[(String, Slope)],
) -> Result<Presentation, SurgeryError> {
    let mut p = pres.clone();
    for (c, s) in fills {
        p = dehn_fill(&p, c, *s)?;
    }
    Ok(p)
}

/// The filling word of a ledger entry, recomputed from the stored component.
pub fn filling_word(record: &FillRecord) -> Word {
    record.component.slope_word(record.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::homology::h1_invariants;
    use crate::presentation::chainmail_presentation;

    #[test]
    fn slope_normal_form() {
        assert_eq!(Slope::new(2, -4).unwrap(), Slope::new(-1, 2).unwrap());
        assert_eq!(Slope::new(-3, 0).unwrap(), Slope::INFINITY);
        assert!(Slope::new(0, 0).is_err());
        assert!(matches!(Slope::reduced(2, 4), Err(SurgeryError::Unreduced(2, 4))));
        assert_eq!("-1/1".parse::<Slope>().unwrap().sign(), -1);
        assert_eq!(Slope::ZERO.sign(), 0);
        assert_eq!(Slope::new(3, 2).unwrap().to_string(), "3/2");
    }

    #[test]
    fn meridian_filling_of_unknot_is_trivial() {
        let p = chainmail_presentation(&fixtures::isolated()).unwrap();
        let f = dehn_fill(&p, "v:o", Slope::INFINITY).unwrap();
        assert_eq!(p.show(&f.relators()[0]).to_string(), "m[o]");
        assert!(f.peripheral().is_empty());
        assert_eq!(h1_invariants(&f).order, Some(1u32.into()));
    }

    #[test]
    fn lens_filling() {
        let p = chainmail_presentation(&fixtures::isolated()).unwrap();
        let f = dehn_fill(&p, "v:o", Slope::new(3, 2).unwrap()).unwrap();
        assert_eq!(f.show(&f.relators()[0]).to_string(), "m[o]^3");
        assert_eq!(h1_invariants(&f).order, Some(3u32.into()));
        assert_eq!(f.ledger()[0].slope.to_string(), "3/2");
    }

    #[test]
    fn edge_filling_relator() {
        let p = chainmail_presentation(&fixtures::p2()).unwrap();
        let f = dehn_fill(&p, "e:e", Slope::new(-1, 1).unwrap()).unwrap();
        assert_eq!(f.show(f.relators().last().unwrap()).to_string(), "mu[e]^-1 lam[e]");
        assert!(matches!(
            dehn_fill(&p, "e:zzz", Slope::ZERO),
            Err(SurgeryError::UnknownComponent(_))
        ));
    }

    #[test]
    fn unfill_restores() {
        let p = chainmail_presentation(&fixtures::k4()).unwrap();
        let f = dehn_fill(&p, "v:3", Slope::new(2, 1).unwrap()).unwrap();
        let f2 = dehn_fill(&f, "e:e2", Slope::new(-1, 3).unwrap()).unwrap();
        let (back, s) = unfill(&f2, "e:e2").unwrap();
        assert_eq!(s, Slope::new(-1, 3).unwrap());
        assert_eq!(back, f);
        let (orig, _) = unfill(&back, "v:3").unwrap();
        assert_eq!(orig, p);
        let text = f2.to_string();
        assert_eq!(text.parse::<Presentation>().unwrap(), f2);
    }

    #[test]
    fn splice_counts_and_symmetry() {
        let p = chainmail_presentation(&fixtures::p2()).unwrap();
        let q = p.clone();
        let s = splice(&p, "e:e", &q, "e:e").unwrap();
        assert_eq!(s.generators().len(), 8);
        assert_eq!(s.relators().len(), 10);
        assert_eq!(s.peripheral().len(), 4);
        let t = splice(&q, "e:e", &p, "e:e").unwrap();
        assert_eq!(h1_invariants(&s), h1_invariants(&t));
        assert!(matches!(splice(&p, "e:e", &p, "e:e"), Err(SurgeryError::SameInstance)));
    }

    #[test]
    fn splice_vertex_uses_designated_pair() {
        let p = chainmail_presentation(&fixtures::triangle()).unwrap();
        let q = chainmail_presentation(&fixtures::p2()).unwrap();
        let s = splice(&p, "v:1", &q, "e:e").unwrap();
        let n = s.relators().len();
        assert_eq!(
            s.show(&s.relators()[n - 2]).to_string(),
            "a/mu[1,e1]^-1 b/mu[e]"
        );
        assert_eq!(
            s.show(&s.relators()[n - 1]).to_string(),
            "a/mu[e3] a/mu[e1]^-1 b/lam[e]"
        );
    }
}
