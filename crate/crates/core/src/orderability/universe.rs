//! The finite word universe a search runs over.

use std::collections::HashMap;

use crate::presentation::{cyclic_core, invert_letters, letter, reduce_letters, Letter};

const NONE: u32 = u32::MAX;

/// Sort key of a letter: generator first, positive before negative.
pub(crate) fn letter_key(l: Letter) -> u32 {
    let g = l.unsigned_abs() - 1;
    2 * g + u32::from(l < 0)
}

/// Length, then lexicographic by [`letter_key`].
pub(crate) fn word_order(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().map(|&l| letter_key(l)).cmp(b.iter().map(|&l| letter_key(l))))
}

/// All reduced words of length at most `radius`, in [`word_order`].
pub fn ball(generators: usize, radius: usize) -> Vec<Vec<Letter>> {
    let alphabet: Vec<Letter> = (0..generators)
        .flat_map(|g| [letter(g, true), letter(g, false)])
        .collect();
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &alphabet {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut v: Vec<Letter> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Lexicographically least rotation of the cyclic core of a word or of its
/// inverse; equal keys mean conjugate up to inversion.
pub(crate) fn conjugacy_key(w: &[Letter]) -> Vec<Letter> {
    let core = cyclic_core(w).to_vec();
    let inv = invert_letters(&core);
    let best = |c: &[Letter]| -> Vec<Letter> {
        (0..c.len().max(1))
            .map(|s| {
                let mut r = c[s.min(c.len())..].to_vec();
                r.extend_from_slice(&c[..s.min(c.len())]);
                r
            })
            .min_by(|a, b| a.iter().map(|&l| letter_key(l)).cmp(b.iter().map(|&l| letter_key(l))))
            .unwrap_or_default()
    };
    let (a, b) = (best(&core), best(&inv));
    if a.iter().map(|&l| letter_key(l)).le(b.iter().map(|&l| letter_key(l))) {
        a
    } else {
        b
    }
}

/// An inverse-closed set of reduced words with a prefix trie for product
/// enumeration.
pub(crate) struct Universe {
    pub words: Vec<Vec<Letter>>,
    pub index: HashMap<Vec<Letter>, u32>,
    pub inv: Vec<u32>,
    pub max_len: usize,
    children: Vec<Vec<(Letter, u32)>>,
    terminal: Vec<u32>,
}

impl Universe {
    pub fn new(generators: usize, radius: usize, extra: &[Vec<Letter>]) -> Self {
        let mut words = ball(generators, radius);
        let mut index: HashMap<Vec<Letter>, u32> = HashMap::with_capacity(words.len() * 2);
        for (i, w) in words.iter().enumerate() {
            index.insert(w.clone(), i as u32);
        }
        let mut pending: Vec<Vec<Letter>> = Vec::new();
        for e in extra {
            let mut w = e.clone();
            reduce_letters(&mut w);
            let wi = invert_letters(&w);
            pending.push(w);
            pending.push(wi);
        }
        pending.sort_by(|a, b| word_order(a, b));
        for w in pending {
            if !index.contains_key(&w) {
                index.insert(w.clone(), words.len() as u32);
                words.push(w);
            }
        }
        let inv = words
            .iter()
            .map(|w| index[&invert_letters(w)])
            .collect();
        let max_len = words.iter().map(Vec::len).max().unwrap_or(0);
        let mut u = Universe {
            words,
            index,
            inv,
            max_len,
            children: vec![Vec::new()],
            terminal: vec![NONE],
        };
        for i in 0..u.words.len() {
            let mut node = 0u32;
            for k in 0..u.words[i].len() {
                let l = u.words[i][k];
                node = match u.child(node, l) {
                    Some(c) => c,
                    None => {
                        let c = u.children.len() as u32;
                        u.children.push(Vec::new());
                        u.terminal.push(NONE);
                        let list = &mut u.children[node as usize];
                        let pos = list.partition_point(|(m, _)| *m < l);
                        list.insert(pos, (l, c));
                        c
                    }
                };
            }
            u.terminal[node as usize] = i as u32;
        }
        u
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn get(&self, w: &[Letter]) -> Option<u32> {
        self.index.get(w).copied()
    }

    fn child(&self, node: u32, l: Letter) -> Option<u32> {
        let list = &self.children[node as usize];
        list.binary_search_by(|(m, _)| m.cmp(&l)).ok().map(|i| list[i].1)
    }

    fn walk(&self, letters: impl IntoIterator<Item = Letter>) -> Option<u32> {
        let mut node = 0;
        for l in letters {
            node = self.child(node, l)?;
        }
        Some(node)
    }

    /// Calls `f(y, z)` for every pair of words with `x y z = 1` freely.
    pub fn for_each_triple(&self, x: u32, stack: &mut Vec<(u32, u32)>, mut f: impl FnMut(u32, u32)) {
        let xs = &self.words[x as usize];
        let n = xs.len();
        for t in 0..=n {
            let a = &xs[..n - t];
            let Some(n1) = self.walk(xs[n - t..].iter().rev().map(|l| -l)) else {
                continue;
            };
            let Some(n2) = self.walk(a.iter().copied()) else {
                continue;
            };
            stack.clear();
            stack.push((n1, n2));
            while let Some((p, q)) = stack.pop() {
                let (wy, wz) = (self.terminal[p as usize], self.terminal[q as usize]);
                if wy != NONE && wz != NONE {
                    f(wy, self.inv[wz as usize]);
                }
                let (lp, lq) = (&self.children[p as usize], &self.children[q as usize]);
                let (mut i, mut j) = (0, 0);
                while i < lp.len() && j < lq.len() {
                    match lp[i].0.cmp(&lq[j].0) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            stack.push((lp[i].1, lq[j].1));
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
        }
    }

    /// Pairs `(u, v, relator)` where `v` arises from `u` by replacing one
    /// segment with the complementary part of a cyclic permutation of a
    /// relator or its inverse. Each unordered pair is reported once per
    /// relator.
    pub fn substitutions(&self, relators: &[Vec<Letter>]) -> Vec<(u32, u32, usize)> {
        let mut rotations: Vec<(usize, Vec<Letter>)> = Vec::new();
        for (i, r) in relators.iter().enumerate() {
            let core = cyclic_core(r).to_vec();
            if core.is_empty() {
                continue;
            }
            for base in [core.clone(), invert_letters(&core)] {
                for s in 0..base.len() {
                    let mut rot = base[s..].to_vec();
                    rot.extend_from_slice(&base[..s]);
                    rotations.push((i, rot));
                }
            }
        }
        let mut out = Vec::new();
        let mut buf: Vec<Letter> = Vec::new();
        for (ui, u) in self.words.iter().enumerate() {
            let n = u.len();
            for i in 0..=n {
                for (ri, rot) in &rotations {
                    let l = rot.len();
                    // left junction must not cancel; that case is another rotation
                    if i > 0 && u[i - 1] == rot[l - 1] {
                        continue;
                    }
                    let mut m = 0;
                    while m < l && i + m < n && u[i + m] == rot[m] {
                        m += 1;
                    }
                    if m < l && n + l - 2 * m > self.max_len {
                        continue;
                    }
                    buf.clear();
                    buf.extend_from_slice(&u[..i]);
                    buf.extend(rot[m..].iter().rev().map(|x| -x));
                    buf.extend_from_slice(&u[i + m..]);
                    if m == l {
                        reduce_letters(&mut buf);
                    }
                    if let Some(vi) = self.get(&buf) {
                        if (vi as usize) > ui {
                            out.push((ui as u32, vi, *ri));
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(1, 3).len(), 7);
        assert_eq!(ball(2, 2).len(), 1 + 4 + 12);
        let b = ball(2, 2);
        assert!(b.windows(2).all(|w| word_order(&w[0], &w[1]).is_lt()));
    }

    #[test]
    fn triples_cover_products() {
        let u = Universe::new(2, 2, &[]);
        let mut stack = Vec::new();
        for x in 0..u.len() as u32 {
            u.for_each_triple(x, &mut stack, |y, z| {
                let mut all = u.words[x as usize].clone();
                all.extend(&u.words[y as usize]);
                all.extend(&u.words[z as usize]);
                reduce_letters(&mut all);
                assert!(all.is_empty());
            });
        }
        // a * a = (a^-2)^-1
        let a = u.get(&[1]).unwrap();
        let mut found = false;
        u.for_each_triple(a, &mut stack, |y, z| {
            found |= u.words[y as usize] == [1] && u.words[z as usize] == [-1, -1];
        });
        assert!(found);
    }

    #[test]
    fn substitution_pairs() {
        // <a | a^3>: a^2 ~ a^-1
        let u = Universe::new(1, 2, &[]);
        let subs = u.substitutions(&[vec![1, 1, 1]]);
        let a2 = u.get(&[1, 1]).unwrap();
        let ai = u.get(&[-1]).unwrap();
        assert!(subs.contains(&(a2.min(ai), a2.max(ai), 0)));
    }

    #[test]
    fn conjugacy_keys() {
        assert_eq!(conjugacy_key(&[2, 1, -2]), conjugacy_key(&[1]));
        assert_eq!(conjugacy_key(&[1, 2]), conjugacy_key(&[-1, -2]));
        assert_ne!(conjugacy_key(&[1, 2]), conjugacy_key(&[1, -2]));
    }
}
