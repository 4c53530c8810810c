//! Locally constant functions on `X = {1..n}^∞`, stored as a value per cylinder of a fixed
//! depth. Words are 0-based letter slices, most significant letter first.

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct CylFun {
    n: usize,
    depth: usize,
    table: Vec<C64>,
}

/// Index of `word` among words of its length.
pub fn word_index(n: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &l| acc * n + l)
}

/// Inverse of [`word_index`].
pub fn index_word(n: usize, depth: usize, mut idx: usize) -> Vec<usize> {
    let mut w = vec![0; depth];
    for slot in w.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    w
}

/// All words of length `k`, in index order.
pub fn words(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(k as u32)).map(move |i| index_word(n, k, i))
}

impl CylFun {
    pub fn new(n: usize, depth: usize, table: Vec<C64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("alphabet size {n} < 2")));
        }
        if table.len() != n.pow(depth as u32) {
            return Err(Error::ShapeMismatch(format!("{} values for depth {depth} over {n} letters", table.len())));
        }
        Ok(Self { n, depth, table })
    }

    pub fn constant(n: usize, z: C64) -> Self {
        Self { n, depth: 0, table: vec![z] }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, C64::new(0.0, 0.0))
    }

    /// `1_{X_a}`.
    pub fn indicator(n: usize, word: &[usize]) -> Self {
        let mut f = Self { n, depth: word.len(), table: vec![C64::new(0.0, 0.0); n.pow(word.len() as u32)] };
        f.table[word_index(n, word)] = C64::new(1.0, 0.0);
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn table(&self) -> &[C64] {
        &self.table
    }

    /// Value on any point of `X_w`, `|w| ≥ depth`.
    pub fn value_at(&self, word: &[usize]) -> C64 {
        self.table[word_index(self.n, &word[..self.depth])]
    }

    /// The same function at depth `d ≥ self.depth`.
    pub fn refine(&self, d: usize) -> CylFun {
        assert!(d >= self.depth, "refine to a smaller depth");
        let k = self.n.pow((d - self.depth) as u32);
        let table = (0..self.table.len() * k).map(|i| self.table[i / k]).collect();
        CylFun { n: self.n, depth: d, table }
    }

    /// Minimal-depth representative.
    pub fn canonical(&self) -> CylFun {
        let mut f = self.clone();
        while f.depth > 0 && f.table.chunks(f.n).all(|c| c.iter().all(|z| *z == c[0])) {
            f.table = f.table.chunks(f.n).map(|c| c[0]).collect();
            f.depth -= 1;
        }
        f
    }

    fn aligned(&self, other: &CylFun) -> Result<(CylFun, CylFun)> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch(format!("alphabets {} and {}", self.n, other.n)));
        }
        let d = self.depth.max(other.depth);
        Ok((self.refine(d), other.refine(d)))
    }

    fn zip(&self, other: &CylFun, op: impl Fn(C64, C64) -> C64) -> Result<CylFun> {
        let (a, b) = self.aligned(other)?;
        let table = a.table.iter().zip(&b.table).map(|(x, y)| op(*x, *y)).collect();
        Ok(CylFun { n: a.n, depth: a.depth, table })
    }

    pub fn add(&self, other: &CylFun) -> Result<CylFun> {
        self.zip(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &CylFun) -> Result<CylFun> {
        self.zip(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &CylFun) -> Result<CylFun> {
        self.zip(other, |x, y| x * y)
    }

    pub fn scale(&self, z: C64) -> CylFun {
        CylFun { n: self.n, depth: self.depth, table: self.table.iter().map(|x| x * z).collect() }
    }

    /// Pointwise conjugate (the involution of `C(X)`).
    pub fn conj(&self) -> CylFun {
        CylFun { n: self.n, depth: self.depth, table: self.table.iter().map(|x| x.conj()).collect() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.table.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CylFun) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }

    /// Adds `z` on the cylinder `X_w`, `|w| ≤ depth`.
    pub fn add_on_cylinder(&mut self, word: &[usize], z: C64) {
        assert!(word.len() <= self.depth, "cylinder finer than the table");
        let span = self.n.pow((self.depth - word.len()) as u32);
        let start = word_index(self.n, word) * span;
        for x in &mut self.table[start..start + span] {
            *x += z;
        }
    }

    /// Largest value outside `X_w`, after refining to at least `|w|`.
    pub fn leakage_outside(&self, word: &[usize]) -> f64 {
        let f = self.refine(self.depth.max(word.len()));
        let span = f.n.pow((f.depth - word.len()) as u32);
        let start = word_index(f.n, word) * span;
        f.table
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < start || *i >= start + span)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: C64 = C64 { re: 1.0, im: 0.0 };

    #[test]
    fn cylinders_of_each_length_partition_x() {
        for n in 2..=3 {
            for k in 0..=4 {
                let mut acc = CylFun::zero(n);
                for w in words(n, k) {
                    acc = acc.add(&CylFun::indicator(n, &w)).unwrap();
                }
                assert_eq!(acc.canonical(), CylFun::constant(n, ONE));
            }
        }
    }

    #[test]
    fn indicator_products_follow_prefixes() {
        let n = 3;
        let a = CylFun::indicator(n, &[0, 2, 1]);
        let b = CylFun::indicator(n, &[0, 2]);
        let c = CylFun::indicator(n, &[1]);
        assert_eq!(a.mul(&b).unwrap().canonical(), a.canonical());
        assert_eq!(a.mul(&c).unwrap().sup_norm(), 0.0);
        assert_eq!(a.sup_norm(), 1.0);
        assert!(a.add(&CylFun::zero(2)).is_err());
    }

    #[test]
    fn refinement_preserves_values_and_canonical_form() {
        let f = CylFun::new(2, 2, vec![ONE, ONE * 2.0, ONE * 3.0, ONE * 3.0]).unwrap();
        let g = f.refine(5);
        for w in words(2, 5) {
            assert_eq!(g.value_at(&w), f.value_at(&w));
        }
        assert_eq!(g.canonical(), f);
        assert_eq!(f.leakage_outside(&[0]), 3.0);
        let mut h = CylFun::zero(2).refine(3);
        h.add_on_cylinder(&[1], ONE);
        assert_eq!(h.canonical(), CylFun::indicator(2, &[1]));
    }
}
