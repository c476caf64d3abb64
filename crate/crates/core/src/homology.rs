//! Exact integer matrices, Smith normal form, and first homology.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::presentation::Presentation;

/// Dense matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    /// Entry as `i64`; panics when it does not fit.
    pub fn get_i64(&self, r: usize, c: usize) -> i64 {
        self.get(r, c).to_i64().expect("entry exceeds i64")
    }

    pub fn set(&mut self, r: usize, c: usize, x: BigInt) {
        self.data[r * self.cols + c] = x;
    }

    pub fn add_to(&mut self, r: usize, c: usize, x: i64) {
        self.data[r * self.cols + c] += x;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.get(k, j);
                    out.data[i * other.cols + j] += prod;
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let x = k * &self.data[src * self.cols + j];
            self.data[dst * self.cols + j] += x;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let x = k * &self.data[i * self.cols + src];
            self.data[i * self.cols + dst] += x;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = x;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// `u * a * v = s`, with `u` and `v` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// The diagonal of `s`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block, lowest row then column
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = s.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, s, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = s.get(i, t).div_floor(&pivot);
                if !q.is_zero() {
                    let k = -q;
                    s.add_row(i, t, &k);
                    u.add_row(i, t, &k);
                }
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = s.get(t, j).div_floor(&pivot);
                if !q.is_zero() {
                    let k = -q;
                    s.add_col(j, t, &k);
                    v.add_col(j, t, &k);
                }
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s.get(i, j).is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => {
                    if pivot.is_negative() {
                        s.negate_row(t);
                        u.negate_row(t);
                    }
                    break;
                }
            }
        }
    }
    finish(u, s, v)
}

fn finish(u: IntMatrix, s: IntMatrix, v: IntMatrix) -> SmithForm {
    SmithForm { u, s, v }
}

/// Invariants of the abelianization of a presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1 {
    pub generators: usize,
    pub relators: usize,
    pub factors: Vec<BigInt>,
    pub betti: usize,
    pub torsion: Vec<BigInt>,
    /// `None` when infinite.
    pub order: Option<BigInt>,
}

impl H1 {
    pub fn is_finite(&self) -> bool {
        self.betti == 0
    }
}

pub fn h1_invariants(p: &Presentation) -> H1 {
    h1_of_matrix(&p.abelianization_matrix())
}

pub fn h1_of_matrix(a: &IntMatrix) -> H1 {
    let snf = smith_normal_form(a);
    let factors: Vec<BigInt> = snf.diagonal().into_iter().filter(|d| !d.is_zero()).collect();
    let betti = a.cols - factors.len();
    let torsion: Vec<BigInt> = factors.iter().filter(|d| !d.is_one()).cloned().collect();
    let order = (betti == 0).then(|| torsion.iter().fold(BigInt::one(), |acc, d| acc * d));
    H1 {
        generators: a.cols,
        relators: a.rows,
        factors,
        betti,
        torsion,
        order,
    }
}

impl fmt::Display for H1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
            }
        };
        writeln!(f, "matrix {}x{}", self.relators, self.generators)?;
        writeln!(f, "factors {}", join(&self.factors))?;
        writeln!(f, "betti {}", self.betti)?;
        writeln!(f, "torsion {}", join(&self.torsion))?;
        match &self.order {
            Some(o) => writeln!(f, "order {o}"),
            None => writeln!(f, "order infinite"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::presentation::chainmail_presentation;
    use crate::surgery::{dehn_fill, Slope};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Fraction-free elimination, used only as an oracle here.
    fn bareiss(a: &IntMatrix) -> BigInt {
        let n = a.rows();
        let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j).clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let x = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = x / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    fn check(a: &IntMatrix) {
        let f = smith_normal_form(a);
        assert_eq!(f.u.mul(a).mul(&f.v), f.s);
        assert!(f.s.is_diagonal());
        assert!(bareiss(&f.u).abs().is_one());
        assert!(bareiss(&f.v).abs().is_one());
        let d = f.diagonal();
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn small_examples() {
        let id = IntMatrix::identity(2);
        let f = smith_normal_form(&id);
        assert_eq!(f.s, id);
        assert_eq!(f.u, id);
        assert_eq!(f.v, id);
        let z = IntMatrix::zeros(2, 3);
        assert_eq!(smith_normal_form(&z).s, z);
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(smith_normal_form(&a).s, IntMatrix::from_rows(&[vec![2, 0], vec![0, 4]]));
        check(&a);
    }

    #[test]
    fn random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            check(&IntMatrix::from_rows(&rows));
        }
    }

    #[test]
    fn k4_unfilled_is_free() {
        let h = h1_invariants(&chainmail_presentation(&fixtures::k4()).unwrap());
        assert_eq!(h.betti, 10);
        assert!(h.torsion.is_empty());
        assert_eq!(h.order, None);
    }

    #[test]
    fn p2_filled_order_three() {
        let p = chainmail_presentation(&fixtures::p2()).unwrap();
        let one = Slope::new(1, 1).unwrap();
        let p = dehn_fill(&p, "v:1", one).unwrap();
        let p = dehn_fill(&p, "v:2", one).unwrap();
        let p = dehn_fill(&p, "e:e", Slope::new(-1, 1).unwrap()).unwrap();
        let h = h1_invariants(&p);
        assert_eq!(h.order, Some(BigInt::from(3)));
        assert!(h.to_string().contains("order 3"));
        let framing = IntMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, -1], vec![1, -1, -1]]);
        assert_eq!(bareiss(&framing).abs(), BigInt::from(3));
    }
}
