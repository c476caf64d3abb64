use std::fmt;

/// A single letter `g^±1`, encoded as `±(g + 1)`.
pub type Letter = i32;

#[inline]
pub fn letter(generator: usize, positive: bool) -> Letter {
    let l = generator as i32 + 1;
    if positive {
        l
    } else {
        -l
    }
}

#[inline]
pub fn letter_generator(l: Letter) -> usize {
    (l.unsigned_abs() - 1) as usize
}

/// Freely reduces a letter sequence in place.
pub fn reduce_letters(letters: &mut Vec<Letter>) {
    let mut out = 0usize;
    for i in 0..letters.len() {
        let l = letters[i];
        if out > 0 && letters[out - 1] == -l {
            out -= 1;
        } else {
            letters[out] = l;
            out += 1;
        }
    }
    letters.truncate(out);
}

/// Inverse of a letter sequence.
pub fn invert_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| -l).collect()
}

/// Strips matching letters from both ends; returns the cyclically reduced core.
pub fn cyclic_core(letters: &[Letter]) -> &[Letter] {
    let (mut a, mut b) = (0, letters.len());
    while b >= a + 2 && letters[a] == -letters[b - 1] {
        a += 1;
        b -= 1;
    }
    &letters[a..b]
}

/// A freely reduced word in syllable form: `(generator, nonzero exponent)`
/// with distinct generators in adjacent syllables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    syllables: Vec<(usize, i32)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(g: usize) -> Self {
        Word {
            syllables: vec![(g, 1)],
        }
    }

    pub fn power(g: usize, k: i32) -> Self {
        Word::from_syllables([(g, k)])
    }

    /// Builds a word from arbitrary syllables, reducing as it goes.
    pub fn from_syllables(items: impl IntoIterator<Item = (usize, i32)>) -> Self {
        let mut syllables: Vec<(usize, i32)> = Vec::new();
        for (g, k) in items {
            if k == 0 {
                continue;
            }
            match syllables.last_mut() {
                Some((h, e)) if *h == g => {
                    *e += k;
                    if *e == 0 {
                        syllables.pop();
                    }
                }
                _ => syllables.push((g, k)),
            }
        }
        Word { syllables }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        Word::from_syllables(
            letters
                .iter()
                .map(|&l| (letter_generator(l), l.signum())),
        )
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, k) in &self.syllables {
            let l = letter(g, k > 0);
            out.extend(std::iter::repeat_n(l, k.unsigned_abs() as usize));
        }
        out
    }

    pub fn syllables(&self) -> &[(usize, i32)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.syllables
            .iter()
            .map(|(_, k)| k.unsigned_abs() as usize)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self.syllables.iter().rev().map(|&(g, k)| (g, -k)).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_syllables(self.syllables.iter().chain(other.syllables.iter()).copied())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `self * other * self^-1`
    pub fn conjugate(&self, other: &Word) -> Word {
        self.mul(other).mul(&self.inverse())
    }

    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Total exponent of every generator.
    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.syllables
            .iter()
            .filter(|(h, _)| *h == g)
            .map(|&(_, k)| k as i64)
            .sum()
    }

    pub fn generators(&self) -> impl Iterator<Item = usize> + '_ {
        self.syllables.iter().map(|(g, _)| *g)
    }

    pub fn map_generators(&self, f: impl Fn(usize) -> usize) -> Word {
        Word::from_syllables(self.syllables.iter().map(|&(g, k)| (f(g), k)))
    }

    /// Renders with the given generator names, `1` for the identity.
    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (i, &(g, k)) in self.word.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.names[g])?;
            if k != 1 {
                write!(f, "^{k}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_letters() -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec((0usize..3, any::<bool>()), 0..24)
            .prop_map(|v| v.into_iter().map(|(g, s)| letter(g, s)).collect())
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent_and_shrinks(ls in arb_letters()) {
            let mut once = ls.clone();
            reduce_letters(&mut once);
            prop_assert!(once.len() <= ls.len());
            let mut twice = once.clone();
            reduce_letters(&mut twice);
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(Word::from_letters(&ls).letters(), once);
        }

        #[test]
        fn multiplication_associates(a in arb_letters(), b in arb_letters(), c in arb_letters()) {
            let (a, b, c) = (Word::from_letters(&a), Word::from_letters(&b), Word::from_letters(&c));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert!(a.mul(&a.inverse()).is_identity());
        }
    }

    #[test]
    fn cyclic_core_strips_conjugation() {
        let w = [1, 2, -3, -1];
        assert_eq!(cyclic_core(&w), &[2, -3]);
        assert_eq!(cyclic_core(&[1, -1]), &[] as &[Letter]);
        assert_eq!(cyclic_core(&[2]), &[2]);
    }

    #[test]
    fn display_uses_exponents() {
        let names = vec!["a".to_string(), "b".to_string()];
        let w = Word::from_syllables([(0, 2), (1, -1), (0, 1)]);
        assert_eq!(w.display(&names).to_string(), "a^2 b^-1 a");
        assert_eq!(Word::identity().display(&names).to_string(), "1");
    }
}
