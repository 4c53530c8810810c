//! Free-group elements as partial homeomorphisms of `X`: `g = ab⁻¹` sends `bμ ↦ aμ`.

use crate::error::{Error, Result};
use crate::group::Elem;

use super::cylinder::{index_word, word_index, CylFun};

/// A free-group element together with its decomposition `g = ab⁻¹` (`a`, `b` positive or
/// empty), or `None` when `g` is not of that form and its domain is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSymbol {
    elem: Elem,
    split: Option<(Vec<usize>, Vec<usize>)>,
}

impl PartialSymbol {
    /// Letters of the reduced word must lie in `1..=n` up to sign.
    pub fn new(elem: &Elem, n: usize) -> Result<Self> {
        let Elem::Free(w) = elem else {
            return Err(Error::InvalidArgument(format!("{elem:?} is not a free-group element")));
        };
        if w.iter().any(|l| l.unsigned_abs() as usize > n || *l == 0) {
            return Err(Error::InvalidArgument(format!("letter outside 1..={n} in {w:?}")));
        }
        let cut = w.iter().position(|&l| l < 0).unwrap_or(w.len());
        let split = if w[cut..].iter().all(|&l| l < 0) {
            let a = w[..cut].iter().map(|&l| l as usize - 1).collect();
            let b = w[cut..].iter().rev().map(|&l| (-l) as usize - 1).collect();
            Some((a, b))
        } else {
            None
        };
        Ok(Self { elem: elem.clone(), split })
    }

    pub fn elem(&self) -> &Elem {
        &self.elem
    }

    pub fn has_domain(&self) -> bool {
        self.split.is_some()
    }

    /// `(a, b)` with `g = ab⁻¹`.
    pub fn split(&self) -> Option<(&[usize], &[usize])> {
        self.split.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    fn require(&self) -> Result<(&[usize], &[usize])> {
        self.split().ok_or_else(|| Error::DomainViolation(format!("{:?} has zero domain", self.elem)))
    }

    /// `1_g = 1_{X_a}` (zero when the domain is zero).
    pub fn range_unit(&self, n: usize) -> CylFun {
        match self.split() {
            Some((a, _)) => CylFun::indicator(n, a),
            None => CylFun::zero(n),
        }
    }

    /// `1_{g⁻¹} = 1_{X_b}`.
    pub fn source_unit(&self, n: usize) -> CylFun {
        match self.split() {
            Some((_, b)) => CylFun::indicator(n, b),
            None => CylFun::zero(n),
        }
    }
}

/// `α_g(f) = f ∘ θ_g⁻¹` for `f` supported in `X_b`.
pub fn theta_apply(g: &PartialSymbol, f: &CylFun) -> Result<CylFun> {
    let (a, b) = g.require()?;
    let leak = f.leakage_outside(b);
    if leak > 1e-12 {
        return Err(Error::DomainViolation(format!("function is {leak:.3e} outside the source cylinder")));
    }
    let n = f.n();
    let d = f.depth().max(b.len());
    let f = f.refine(d);
    let tail = d - b.len();
    let out_depth = a.len() + tail;
    let mut table = vec![crate::linalg::ZERO; n.pow(out_depth as u32)];
    for m in 0..n.pow(tail as u32) {
        let mu = index_word(n, tail, m);
        let src: Vec<usize> = b.iter().chain(&mu).copied().collect();
        let dst: Vec<usize> = a.iter().chain(&mu).copied().collect();
        table[word_index(n, &dst)] = f.table()[word_index(n, &src)];
    }
    Ok(CylFun::new(n, out_depth, table)?.canonical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupCtx;
    use crate::linalg::{ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sym(ctx: &GroupCtx, w: &str) -> PartialSymbol {
        PartialSymbol::new(&ctx.parse(w).unwrap(), ctx.free_rank().unwrap()).unwrap()
    }

    #[test]
    fn decomposition() {
        let ctx = GroupCtx::free(2).unwrap();
        assert_eq!(sym(&ctx, "abBA").split(), Some((&[][..], &[][..])));
        assert_eq!(sym(&ctx, "aB").split(), Some((&[0][..], &[1][..])));
        assert_eq!(sym(&ctx, "abAB").split(), Some((&[0, 1][..], &[1, 0][..])));
        assert_eq!(sym(&ctx, "Aba").split(), None);
        assert_eq!(sym(&ctx, "BA").split(), Some((&[][..], &[0, 1][..])));
        assert!(PartialSymbol::new(&Elem::Free(vec![3]), 2).is_err());
    }

    #[test]
    fn relabels_prefixes() {
        let ctx = GroupCtx::free(2).unwrap();
        let g = sym(&ctx, "aB");
        assert_eq!(theta_apply(&g, &CylFun::indicator(2, &[1])).unwrap(), CylFun::indicator(2, &[0]));
        let f = CylFun::indicator(2, &[1, 1, 0]);
        assert_eq!(theta_apply(&g, &f).unwrap(), CylFun::indicator(2, &[0, 1, 0]));
        assert!(matches!(theta_apply(&g, &CylFun::indicator(2, &[0])), Err(Error::DomainViolation(_))));
        assert!(theta_apply(&sym(&ctx, "aBa"), &CylFun::zero(2)).is_err());
        let e = sym(&ctx, "e");
        let h = CylFun::new(2, 2, vec![ONE, ZERO, ONE * 3.0, ONE]).unwrap();
        assert_eq!(theta_apply(&e, &h).unwrap(), h);
    }

    #[test]
    fn composition_where_defined() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ctx = GroupCtx::free(2).unwrap();
        let pool = ctx.ball(3);
        let mut checked = 0;
        for _ in 0..400 {
            let g = sym(&ctx, &ctx.format(&pool[rng.gen_range(0..pool.len())]));
            let h = sym(&ctx, &ctx.format(&pool[rng.gen_range(0..pool.len())]));
            let Some((_, bh)) = h.split() else { continue };
            let mut f = CylFun::zero(2).refine(bh.len() + 2);
            for w in super::super::cylinder::words(2, 2) {
                let word: Vec<usize> = bh.iter().chain(&w).copied().collect();
                f.add_on_cylinder(&word, crate::linalg::random_complex(&mut rng));
            }
            let inner = theta_apply(&h, &f).unwrap();
            let Ok(lhs) = theta_apply(&g, &inner) else { continue };
            let gh = sym(&ctx, &ctx.format(&ctx.op(g.elem(), h.elem())));
            let rhs = theta_apply(&gh, &f).unwrap();
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
            checked += 1;
        }
        assert!(checked > 50);
    }
}
