//! The transformation groupoid `X ⋊_θ F_n`, coarsened to cylinders.
//!
//! An arrow is `(x, g)` with `x ∈ X_b` for `g = ab⁻¹`, source `x` and range `g·x`.
//! At depth `d` the point `x = bμν` is replaced by the cylinder `X_{bμ}` with `|μ| = d`, so
//! every `g` in the ball contributes `n^d` arrows and `(X_{bμ}, g)` has range `X_{aμ}`.
//! Products `(x,s)·(y,t) = (y, st)` are taken when `x = t·y`, i.e. when the cylinders match.

use crate::error::Result;
use crate::group::{Elem, GroupCtx};
use crate::report::ValidationReport;

use super::cylinder::words;
use super::symbol::PartialSymbol;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arrow {
    pub source: Vec<usize>,
    pub g: Elem,
    pub range: Vec<usize>,
}

impl Arrow {
    pub fn is_unit(&self) -> bool {
        matches!(&self.g, Elem::Free(w) if w.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct GroupoidTable {
    pub n: usize,
    pub depth: usize,
    pub radius: usize,
    pub arrows: Vec<Arrow>,
    ctx: GroupCtx,
}

pub fn spectral_groupoid(n: usize, depth: usize, radius: usize) -> Result<GroupoidTable> {
    let ctx = GroupCtx::free(n)?;
    let mut arrows = Vec::new();
    for g in ctx.ball(radius) {
        let sym = PartialSymbol::new(&g, n)?;
        let Some((a, b)) = sym.split() else { continue };
        for mu in words(n, depth) {
            arrows.push(Arrow {
                source: b.iter().chain(&mu).copied().collect(),
                g: g.clone(),
                range: a.iter().chain(&mu).copied().collect(),
            });
        }
    }
    Ok(GroupoidTable { n, depth, radius, arrows, ctx })
}

impl GroupoidTable {
    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    pub fn units(&self) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter().filter(|a| a.is_unit())
    }

    pub fn unit_at(&self, x: &[usize]) -> Arrow {
        Arrow { source: x.to_vec(), g: self.ctx.id(), range: x.to_vec() }
    }

    /// `(x, g)⁻¹ = (g·x, g⁻¹)`.
    pub fn inverse(&self, a: &Arrow) -> Arrow {
        Arrow { source: a.range.clone(), g: self.ctx.inverse(&a.g), range: a.source.clone() }
    }

    /// `γ·η`, defined when `s(γ) = r(η)`.
    pub fn compose(&self, gamma: &Arrow, eta: &Arrow) -> Option<Arrow> {
        (gamma.source == eta.range).then(|| Arrow {
            source: eta.source.clone(),
            g: self.ctx.op(&gamma.g, &eta.g),
            range: gamma.range.clone(),
        })
    }

    /// `θ_g` maps the source cylinder onto the range cylinder.
    pub fn is_valid(&self, a: &Arrow) -> bool {
        let Ok(sym) = PartialSymbol::new(&a.g, self.n) else { return false };
        let Some((pa, pb)) = sym.split() else { return false };
        match a.source.strip_prefix(pb) {
            Some(mu) => a.range.len() == pa.len() + mu.len() && a.range.starts_with(pa) && a.range.ends_with(mu),
            None => false,
        }
    }

    /// Exhaustive axiom checks over the table (composable pairs and triples only).
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(0.0);
        let bit = |ok: bool| if ok { 0.0 } else { 1.0 };
        let show = |a: &Arrow| format!("({:?}, {})", a.source, self.ctx.format(&a.g));
        for a in &self.arrows {
            report.record("arrow", || show(a), bit(self.is_valid(a)));
            let inv = self.inverse(a);
            report.record("inverse is an arrow", || show(a), bit(self.is_valid(&inv)));
            report.record("inversion involutive", || show(a), bit(self.inverse(&inv) == *a));
            report.record("s(γ⁻¹) = r(γ)", || show(a), bit(inv.source == a.range));
            let left = self.compose(a, &inv);
            report.record("γγ⁻¹ = r(γ)", || show(a), bit(left == Some(self.unit_at(&a.range))));
            let right = self.compose(&inv, a);
            report.record("γ⁻¹γ = s(γ)", || show(a), bit(right == Some(self.unit_at(&a.source))));
            let unit_law = self.compose(a, &self.unit_at(&a.source)) == Some(a.clone())
                && self.compose(&self.unit_at(&a.range), a) == Some(a.clone());
            report.record("unit laws", || show(a), bit(unit_law));
        }
        for a in &self.arrows {
            for b in self.arrows.iter().filter(|b| b.range == a.source) {
                let ab = self.compose(a, b).expect("composable");
                report.record("composite is an arrow", || format!("{} {}", show(a), show(b)), bit(self.is_valid(&ab)));
                for c in self.arrows.iter().filter(|c| c.range == b.source) {
                    let lhs = self.compose(&ab, c);
                    let rhs = self.compose(b, c).and_then(|bc| self.compose(a, &bc));
                    report.record(
                        "associativity",
                        || format!("{} {} {}", show(a), show(b), show(c)),
                        bit(lhs.is_some() && lhs == rhs),
                    );
                }
            }
        }
        report
    }
}
