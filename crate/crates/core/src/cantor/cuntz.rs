//! The witnesses `ξ_i(h) = i^{-1/2}·1_{X_h}` for positive `h` with `|h| ≤ i`, and the
//! defects `‖1_g − Σ_h ξ_i(h) α_g(1_{g⁻¹} ξ_i(g⁻¹h))‖_∞`.

use crate::ap::ApProblem;
use crate::error::{Error, Result};
use crate::group::{Elem, GroupCtx};
use crate::linalg::C64;
use crate::report::ValidationReport;

use super::cylinder::{words, CylFun};
use super::symbol::{theta_apply, PartialSymbol};

/// `ξ_i` over `n` letters; values are stored implicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CuntzWitness {
    pub n: usize,
    pub i: usize,
}

pub fn xi_witness(i: usize, n: usize) -> Result<CuntzWitness> {
    if i == 0 {
        return Err(Error::InvalidArgument("ξ_i needs i ≥ 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("alphabet size {n} < 2")));
    }
    Ok(CuntzWitness { n, i })
}

impl CuntzWitness {
    /// Number of positive words of length `1..=i`.
    pub fn support_size(&self) -> usize {
        (1..=self.i).map(|k| self.n.pow(k as u32)).sum()
    }

    fn coeff(&self) -> f64 {
        1.0 / (self.i as f64).sqrt()
    }

    /// `ξ_i(h)`; zero off the support.
    pub fn value(&self, h: &Elem) -> CylFun {
        match h {
            Elem::Free(w) if !w.is_empty() && w.len() <= self.i && w.iter().all(|&l| l > 0) => {
                let word: Vec<usize> = w.iter().map(|&l| l as usize - 1).collect();
                CylFun::indicator(self.n, &word).scale(C64::new(self.coeff(), 0.0))
            }
            _ => CylFun::zero(self.n),
        }
    }

    /// `Σ_h ξ_i(h)* ξ_i(h)` at depth `i`.
    pub fn inner(&self) -> CylFun {
        let mut acc = CylFun::zero(self.n).refine(self.i);
        let w = C64::new(1.0 / self.i as f64, 0.0);
        for k in 1..=self.i {
            for word in words(self.n, k) {
                acc.add_on_cylinder(&word, w);
            }
        }
        acc
    }

    /// `‖Σ_h ξ_i(h)* ξ_i(h)‖_∞`.
    pub fn bound(&self) -> f64 {
        self.inner().sup_norm()
    }
}

fn symbol(g: &Elem, n: usize) -> Result<(PartialSymbol, Vec<usize>, Vec<usize>)> {
    let s = PartialSymbol::new(g, n)?;
    let (a, b) = s.split().ok_or_else(|| Error::DomainViolation(format!("{g:?} has zero domain")))?;
    let (a, b) = (a.to_vec(), b.to_vec());
    Ok((s, a, b))
}

fn common_prefix_extension(x: &[usize], y: &[usize]) -> Option<Vec<usize>> {
    let k = x.len().min(y.len());
    if x[..k] != y[..k] {
        return None;
    }
    Some(if x.len() >= y.len() { x.to_vec() } else { y.to_vec() })
}

/// Defect of `ξ_i` at `g = ab⁻¹` with target `1_g`, summed cylinder by cylinder.
///
/// Only `h = g·p` with `p` positive contribute; each term is `i^{-1}` times the indicator
/// of a single cylinder, accumulated on a table of depth `i + |a| + |b|`.
pub fn cuntz_defect_fast(w: &CuntzWitness, g: &Elem) -> Result<f64> {
    let (_, a, b) = symbol(g, w.n)?;
    let n = w.n;
    let depth = w.i + a.len() + b.len();
    let mut acc = CylFun::zero(n).refine(depth);
    let coeff = C64::new(1.0 / w.i as f64, 0.0);
    for k in 1..=w.i {
        for p in words(n, k) {
            // h = a b⁻¹ p is positive exactly when p extends b
            let Some(q) = p.strip_prefix(b.as_slice()) else { continue };
            let h: Vec<usize> = a.iter().chain(q).copied().collect();
            if h.is_empty() || h.len() > w.i {
                continue;
            }
            // α_g(1_{X_p} 1_{X_b}) = 1_{X_{aq}}, then multiplied by 1_{X_h}
            let image: Vec<usize> = a.iter().chain(q).copied().collect();
            if let Some(c) = common_prefix_extension(&h, &image) {
                acc.add_on_cylinder(&c, coeff);
            }
        }
    }
    let target = CylFun::indicator(n, &a);
    Ok(target.sub(&acc)?.sup_norm())
}

/// The same defect by summing `ξ_i(h) α_g(1_{g⁻¹} ξ_i(g⁻¹h))` over every `h` in `ball(i)`
/// with dense cylinder arithmetic and the generic [`theta_apply`].
pub fn cuntz_defect_bruteforce(w: &CuntzWitness, g: &Elem) -> Result<f64> {
    let ctx = GroupCtx::free(w.n)?;
    let (sym, a, _) = symbol(g, w.n)?;
    let ginv = ctx.inverse(g);
    let src = sym.source_unit(w.n);
    let mut acc = CylFun::zero(w.n);
    for h in ctx.ball(w.i) {
        let xh = w.value(&h);
        if xh.sup_norm() == 0.0 {
            continue;
        }
        let inner = src.mul(&w.value(&ctx.op(&ginv, &h)))?;
        acc = acc.add(&xh.mul(&theta_apply(&sym, &inner)?)?)?;
    }
    Ok(CylFun::indicator(w.n, &a).sub(&acc)?.sup_norm())
}

/// Closed form `|1 − c/i|`, `c = #{k ≥ 0 : 1 ≤ |a|+k ≤ i, 1 ≤ |b|+k ≤ i}`. Equals `|g|/i`
/// for positive `g` with `|g| ≤ i`.
pub fn cuntz_predicted(g: &Elem, n: usize, i: usize) -> Result<f64> {
    let (_, a, b) = symbol(g, n)?;
    let lo = 1usize.saturating_sub(a.len()).max(1usize.saturating_sub(b.len()));
    let hi = i as i64 - a.len().max(b.len()) as i64;
    let count = (hi - lo as i64 + 1).max(0) as f64;
    Ok((1.0 - count / i as f64).abs())
}

/// `ξ_1, ..., ξ_imax` against targets `1_g`.
pub struct CuntzFamily {
    pub n: usize,
    pub imax: usize,
    pub targets: Vec<Elem>,
    ctx: GroupCtx,
}

impl CuntzFamily {
    pub fn new(n: usize, imax: usize, targets: Vec<Elem>) -> Result<Self> {
        let ctx = GroupCtx::free(n)?;
        for g in &targets {
            symbol(g, n)?;
        }
        Ok(Self { n, imax, targets, ctx })
    }
}

impl ApProblem for CuntzFamily {
    fn len(&self) -> usize {
        self.imax
    }

    fn index_label(&self, i: usize) -> String {
        (i + 1).to_string()
    }

    fn targets(&self) -> Vec<(String, String)> {
        self.targets.iter().map(|g| (self.ctx.format(g), format!("1_{}", self.ctx.format(g)))).collect()
    }

    fn bound(&self, i: usize) -> Result<f64> {
        Ok(xi_witness(i + 1, self.n)?.bound())
    }

    fn defect(&self, i: usize, target: usize) -> Result<f64> {
        cuntz_defect_fast(&xi_witness(i + 1, self.n)?, &self.targets[target])
    }
}

/// Partial-action axioms for `θ` on `ball(radius)`: `α_e = id`, the unit identity
/// `α_g(1_{g⁻¹} 1_h) = 1_g 1_{gh}`, and `α_g α_h = α_{gh}` on `α_h⁻¹(D_h ∩ D_{g⁻¹})`
/// tested on the unit of that ideal.
pub fn validate_cylinder_action(n: usize, radius: usize) -> Result<ValidationReport> {
    let ctx = GroupCtx::free(n)?;
    let ball = ctx.ball(radius);
    let syms: Vec<PartialSymbol> = ball.iter().map(|g| PartialSymbol::new(g, n)).collect::<Result<_>>()?;
    let mut report = ValidationReport::new(1e-12);
    let probe = CylFun::new(n, 2, (0..n * n).map(|k| C64::new(k as f64, 1.0)).collect())?;
    let e = PartialSymbol::new(&ctx.id(), n)?;
    report.record("α_e = id", || "e".into(), theta_apply(&e, &probe)?.max_abs_diff(&probe)?);
    for (g, sg) in ball.iter().zip(&syms) {
        for (h, sh) in ball.iter().zip(&syms) {
            let gh = PartialSymbol::new(&ctx.op(g, h), n)?;
            let witness = || format!("g={}, h={}", ctx.format(g), ctx.format(h));
            let rhs = sg.range_unit(n).mul(&gh.range_unit(n))?;
            let lhs = if sg.has_domain() {
                theta_apply(sg, &sg.source_unit(n).mul(&sh.range_unit(n))?)?
            } else {
                CylFun::zero(n)
            };
            report.record("unit identity", witness, lhs.max_abs_diff(&rhs)?);

            if !sh.has_domain() {
                continue;
            }
            // α_h⁻¹(D_h ∩ D_{g⁻¹}) has unit α_{h⁻¹}(1_h 1_{g⁻¹})
            let hinv = PartialSymbol::new(&ctx.inverse(h), n)?;
            let f = theta_apply(&hinv, &sh.range_unit(n).mul(&sg.source_unit(n))?)?;
            if f.sup_norm() == 0.0 {
                continue;
            }
            let lhs = theta_apply(sg, &theta_apply(sh, &f)?)?;
            let rhs = theta_apply(&gh, &f);
            match rhs {
                Ok(rhs) => report.record("composition", witness, lhs.max_abs_diff(&rhs)?),
                Err(_) => report.fail("composition", witness()),
            }
        }
    }
    Ok(report)
}
