use std::collections::BTreeMap;
use std::sync::Arc;

use super::{FdAlgebra, FdElement, Ideal, IdealIso};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupCtx};
use crate::report::ValidationReport;

/// How the family `t ↦ α_t` is stored.
#[derive(Clone, Debug)]
pub enum ActionData {
    /// Explicit isomorphisms; missing elements act by the zero map. With `window = Some(R)`
    /// (infinite groups) the table is only authoritative on `ball(R)`.
    Table { maps: BTreeMap<Elem, IdealIso>, window: Option<usize> },
    /// One isomorphism per generator. Free groups compose along the reduced word (the
    /// semi-saturated extension); lattices require commuting automorphisms.
    Generated(Vec<IdealIso>),
    /// Restriction of another partial action to an ideal, re-indexed into that ideal.
    Restricted { base: Arc<CPartialAction>, ideal: Ideal },
}

/// A C*-partial action `{α_t: A_{t⁻¹} → A_t}` of a discrete group on an [`FdAlgebra`].
#[derive(Clone, Debug)]
pub struct CPartialAction {
    ctx: GroupCtx,
    algebra: FdAlgebra,
    data: ActionData,
}

impl CPartialAction {
    pub fn from_table(ctx: GroupCtx, algebra: FdAlgebra, maps: BTreeMap<Elem, IdealIso>) -> Result<Self> {
        if !ctx.is_finite() {
            return Err(Error::Unsupported("unbounded tables over infinite groups; use windowed_table".into()));
        }
        Self::checked_table(ctx, algebra, maps, None)
    }

    /// A table known only on `ball(radius)` of an infinite group.
    pub fn windowed_table(
        ctx: GroupCtx,
        algebra: FdAlgebra,
        maps: BTreeMap<Elem, IdealIso>,
        radius: usize,
    ) -> Result<Self> {
        let window = if ctx.is_finite() { None } else { Some(radius) };
        Self::checked_table(ctx, algebra, maps, window)
    }

    fn checked_table(
        ctx: GroupCtx,
        algebra: FdAlgebra,
        maps: BTreeMap<Elem, IdealIso>,
        window: Option<usize>,
    ) -> Result<Self> {
        for (t, iso) in &maps {
            ctx.check(t)?;
            check_iso(&algebra, iso)?;
        }
        Ok(Self { ctx, algebra, data: ActionData::Table { maps, window } })
    }

    pub fn generated(ctx: GroupCtx, algebra: FdAlgebra, generators: Vec<IdealIso>) -> Result<Self> {
        let expected = match (ctx.free_rank(), ctx.lattice_dim()) {
            (Some(n), _) => n,
            (_, Some(d)) => {
                let full = algebra.full_ideal();
                if generators.iter().any(|g| g.source() != &full || g.target() != &full) {
                    return Err(Error::Unsupported("lattice generators must be global automorphisms".into()));
                }
                d
            }
            _ => return Err(Error::Unsupported("generated actions need a free group or a lattice".into())),
        };
        if generators.len() != expected {
            return Err(Error::InvalidArgument(format!("expected {expected} generators, got {}", generators.len())));
        }
        for g in &generators {
            check_iso(&algebra, g)?;
        }
        Ok(Self { ctx, algebra, data: ActionData::Generated(generators) })
    }

    /// The partial action with `A_e = A` and every other domain zero.
    pub fn trivial(ctx: GroupCtx, algebra: FdAlgebra) -> Self {
        let mut maps = BTreeMap::new();
        maps.insert(ctx.id(), IdealIso::identity_on(&algebra, &algebra.full_ideal()));
        Self { ctx, algebra, data: ActionData::Table { maps, window: None } }
    }

    /// The global action by identity automorphisms (its semidirect bundle is the group bundle).
    pub fn identity_global(ctx: GroupCtx, algebra: FdAlgebra) -> Self {
        let id = IdealIso::identity_on(&algebra, &algebra.full_ideal());
        let data = if ctx.is_finite() {
            ActionData::Table { maps: ctx.ball(0).into_iter().map(|t| (t, id.clone())).collect(), window: None }
        } else {
            let count = ctx.free_rank().or(ctx.lattice_dim()).unwrap_or(0);
            ActionData::Generated(vec![id; count])
        };
        Self { ctx, algebra, data }
    }

    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn data(&self) -> &ActionData {
        &self.data
    }

    /// Whether `α_t` is determined by the stored data.
    pub fn is_known(&self, t: &Elem) -> bool {
        match &self.data {
            ActionData::Table { window: Some(r), .. } => self.ctx.word_length(t) <= *r,
            ActionData::Restricted { base, .. } => base.is_known(t),
            _ => true,
        }
    }

    /// `α_t`. Outside the known window of a windowed table this is the zero map.
    pub fn alpha(&self, t: &Elem) -> IdealIso {
        match &self.data {
            ActionData::Table { maps, .. } => maps.get(t).cloned().unwrap_or_else(IdealIso::zero),
            ActionData::Generated(gens) => match t {
                Elem::Free(word) => {
                    let mut acc = IdealIso::identity_on(&self.algebra, &self.algebra.full_ideal());
                    for &l in word.iter().rev() {
                        let g = &gens[l.unsigned_abs() as usize - 1];
                        let step = if l > 0 { g.clone() } else { g.inverse() };
                        acc = step.compose(&acc);
                    }
                    acc
                }
                Elem::Lattice(v) => {
                    let mut acc = IdealIso::identity_on(&self.algebra, &self.algebra.full_ideal());
                    for (i, &k) in v.iter().enumerate() {
                        let g = if k >= 0 { gens[i].clone() } else { gens[i].inverse() };
                        for _ in 0..k.unsigned_abs() {
                            acc = g.compose(&acc);
                        }
                    }
                    acc
                }
                Elem::Finite(_) => IdealIso::zero(),
            },
            ActionData::Restricted { base, ideal } => {
                let full = base.alpha(t);
                let map: Vec<_> = full
                    .entries()
                    .iter()
                    .filter(|(j, k, _)| ideal.contains(*j) && ideal.contains(*k))
                    .cloned()
                    .collect();
                let inner = IdealIso::new(base.algebra(), map).expect("restriction of a valid isomorphism");
                inner.reindex_within(ideal).expect("restricted blocks lie in the ideal")
            }
        }
    }

    /// The domain `A_t` (target of `α_t`).
    pub fn domain(&self, t: &Elem) -> Ideal {
        self.alpha(t).target().clone()
    }

    /// `α_t(x)`, rejecting `x ∉ A_{t⁻¹}`.
    pub fn apply(&self, t: &Elem, x: &FdElement) -> Result<FdElement> {
        self.ctx.check(t)?;
        self.algebra.check(x)?;
        self.alpha(t).apply_checked(x, 1e-12)
    }

    /// Group elements on which to check the action: the whole group if finite, else `ball(radius)`.
    pub fn window(&self, radius: usize) -> Vec<Elem> {
        self.ctx.ball(radius).into_iter().filter(|t| self.is_known(t)).collect()
    }

    /// Axioms (i)–(iii) of a partial action over `window(radius)²` plus the unit identity
    /// `α_t(1_{t⁻¹}1_s) = 1_t 1_{ts}`; every violated instance is reported.
    pub fn validate(&self, radius: usize) -> ValidationReport {
        validate_partial_action(self, radius, 1e-10)
    }

    /// `σ|_J`: domains `J_t = J ∩ α_t(A_{t⁻¹} ∩ J)`, as an action on `J` itself.
    pub fn restrict(&self, ideal: &Ideal) -> Result<CPartialAction> {
        if !self.algebra.contains_ideal(ideal) {
            return Err(Error::ShapeMismatch(format!("ideal {ideal} not in {}", self.algebra)));
        }
        let sub = ideal.as_algebra(&self.algebra);
        let data = if self.ctx.is_finite() {
            let base = Arc::new(self.clone());
            let tmp = CPartialAction {
                ctx: self.ctx.clone(),
                algebra: sub.clone(),
                data: ActionData::Restricted { base, ideal: ideal.clone() },
            };
            let maps = self.ctx.ball(0).into_iter().map(|t| {
                let a = tmp.alpha(&t);
                (t, a)
            });
            ActionData::Table { maps: maps.filter(|(_, a)| !a.source().is_zero()).collect(), window: None }
        } else {
            ActionData::Restricted { base: Arc::new(self.clone()), ideal: ideal.clone() }
        };
        Ok(CPartialAction { ctx: self.ctx.clone(), algebra: sub, data })
    }

    /// `α` restricted to the center `Z(A) ≅ C^m`.
    pub fn center_restriction(&self) -> CPartialAction {
        let algebra = self.algebra.center();
        let data = match &self.data {
            ActionData::Table { maps, window } => ActionData::Table {
                maps: maps.iter().map(|(t, a)| (t.clone(), a.on_center())).collect(),
                window: *window,
            },
            ActionData::Generated(gens) => ActionData::Generated(gens.iter().map(IdealIso::on_center).collect()),
            ActionData::Restricted { base, ideal } => {
                ActionData::Restricted { base: Arc::new(base.center_restriction()), ideal: ideal.clone() }
            }
        };
        CPartialAction { ctx: self.ctx.clone(), algebra, data }
    }

    /// Explicit table of `α_t` over `window(radius)`, dropping zero maps.
    pub fn tabulate(&self, radius: usize) -> CPartialAction {
        let maps = self
            .window(radius)
            .into_iter()
            .map(|t| {
                let a = self.alpha(&t);
                (t, a)
            })
            .filter(|(_, a)| !a.source().is_zero())
            .collect();
        let window = if self.ctx.is_finite() { None } else { Some(radius) };
        CPartialAction { ctx: self.ctx.clone(), algebra: self.algebra.clone(), data: ActionData::Table { maps, window } }
    }

    /// Largest conjugation mismatch between two actions over a window; `None` when some
    /// block map differs.
    pub fn distance(&self, other: &CPartialAction, radius: usize) -> Option<f64> {
        if self.algebra != other.algebra {
            return None;
        }
        let mut worst: f64 = 0.0;
        for t in self.window(radius) {
            if !other.is_known(&t) {
                continue;
            }
            worst = worst.max(self.alpha(&t).distance(&other.alpha(&t))?);
        }
        Some(worst)
    }
}

fn check_iso(algebra: &FdAlgebra, iso: &IdealIso) -> Result<()> {
    for (j, k, u) in iso.entries() {
        if *j >= algebra.block_count() || *k >= algebra.block_count() || u.nrows() != algebra.block_dim(*j) {
            return Err(Error::ShapeMismatch(format!("isomorphism block {j}->{k} does not fit {algebra}")));
        }
    }
    Ok(())
}

pub(crate) fn validate_partial_action(pa: &CPartialAction, radius: usize, tol: f64) -> ValidationReport {
    let ctx = pa.ctx();
    let alg = pa.algebra();
    let mut report = ValidationReport::new(tol);
    let window = pa.window(radius);
    let fmt = |t: &Elem| ctx.format(t);
    let alphas: BTreeMap<Elem, IdealIso> = window.iter().map(|t| (t.clone(), pa.alpha(t))).collect();
    let lookup = |t: &Elem| -> Option<IdealIso> {
        alphas.get(t).cloned().or_else(|| pa.is_known(t).then(|| pa.alpha(t)))
    };

    let e = ctx.id();
    let alpha_e = pa.alpha(&e);
    if alpha_e.source() != &alg.full_ideal() || alpha_e.target() != &alg.full_ideal() {
        report.fail("(i) identity", format!("A_e = {} is not the whole algebra", alpha_e.target()));
    } else {
        let worst = alpha_e
            .entries()
            .iter()
            .map(|(j, k, u)| {
                if j != k {
                    f64::INFINITY
                } else {
                    crate::linalg::phase_distance(u, &crate::linalg::Mat::identity(u.nrows(), u.ncols()))
                }
            })
            .fold(0.0, f64::max);
        report.record("(i) identity", || "alpha_e".to_string(), worst);
    }

    for t in &window {
        let at = &alphas[t];
        let tinv = ctx.inverse(t);
        if let Some(ainv) = lookup(&tinv) {
            if at.source() != ainv.target() {
                report.fail(
                    "domain consistency",
                    format!("t={}: source {} != A_(t^-1) {}", fmt(t), at.source(), ainv.target()),
                );
            } else {
                report.record("domain consistency", || fmt(t), 0.0);
            }
        }
    }

    for t in &window {
        let at = &alphas[t];
        for s in &window {
            let ts = ctx.op(t, s);
            let Some(a_ts) = lookup(&ts) else { continue };
            let a_s = &alphas[s];
            // (ii) α_t(A_{t⁻¹} ∩ A_s) ⊆ A_t ∩ A_{ts}
            let dom = at.source().intersect(a_s.target());
            let image = at.restrict_source(&dom);
            let allowed = at.target().intersect(a_ts.target());
            if image.target().is_subset(&allowed) {
                report.record("(ii) domains", || format!("t={}, s={}", fmt(t), fmt(s)), 0.0);
            } else {
                report.fail(
                    "(ii) domains",
                    format!("t={}, s={}: image {} not in {}", fmt(t), fmt(s), image.target(), allowed),
                );
            }
            // unit identity α_t(1_{t⁻¹}1_s) = 1_t 1_{ts}
            let lhs = at.apply(&FdElement::unit_of(alg, &dom));
            let rhs = FdElement::unit_of(alg, &allowed);
            report.record("unit identity", || format!("t={}, s={}", fmt(t), fmt(s)), lhs.max_abs_diff(&rhs));
        }
    }

    for s in &window {
        let a_s = &alphas[s];
        for t in &window {
            let st = ctx.op(s, t);
            let Some(a_st) = lookup(&st) else { continue };
            let composite = a_s.compose(&alphas[t]);
            let witness = || format!("s={}, t={}, st={}", fmt(s), fmt(t), fmt(&st));
            if !composite.source().is_subset(a_st.source()) {
                report.fail("(iii) composition", format!("{}: domain of a_s a_t exceeds A_((st)^-1)", witness()));
                continue;
            }
            match a_st.restrict_source(composite.source()).distance(&composite) {
                Some(d) => report.record("(iii) composition", witness, d),
                None => report.fail("(iii) composition", format!("{}: block maps differ", witness())),
            }
        }
    }
    report
}
