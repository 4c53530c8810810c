//! Approximation-property witnesses `a: G → B_e`, their bounds and defects, and the
//! convexification of a weighted list of witnesses into a single one.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fdalg::{CPartialAction, FdAlgebra, FdElement};
use crate::fellbundle::FellBundle;
use crate::group::{Elem, GroupCtx};
use crate::linalg::{Vector, C64};

/// A finitely supported function `G → B_e`.
#[derive(Clone, Debug, PartialEq)]
pub struct APWitness {
    values: BTreeMap<Elem, FdElement>,
}

impl APWitness {
    pub fn new(values: BTreeMap<Elem, FdElement>) -> Self {
        Self { values }
    }

    pub fn zero() -> Self {
        Self { values: BTreeMap::new() }
    }

    pub fn values(&self) -> &BTreeMap<Elem, FdElement> {
        &self.values
    }

    pub fn get(&self, r: &Elem) -> Option<&FdElement> {
        self.values.get(r)
    }

    pub fn support(&self) -> impl Iterator<Item = &Elem> {
        self.values.keys()
    }

    /// `⟨a, a⟩ = Σ_r a(r)* a(r)`.
    pub fn inner(&self, alg: &FdAlgebra) -> FdElement {
        let mut acc = FdElement::zero(alg);
        for x in self.values.values() {
            acc.add_assign(&x.adjoint().mul(x));
        }
        acc
    }

    /// Right translate `s ↦ a(s r⁻¹)`, supported on `supp(a)·r`.
    pub fn translate(&self, ctx: &GroupCtx, r: &Elem) -> APWitness {
        Self { values: self.values.iter().map(|(s, x)| (ctx.op(s, r), x.clone())).collect() }
    }
}

/// `‖Σ_r a(r)* a(r)‖`.
pub fn witness_bound(alg: &FdAlgebra, a: &APWitness) -> f64 {
    a.inner(alg).norm()
}

/// `Σ_r a(tr)* b a(r) ∈ B_t`, products taken in the bundle.
pub fn ap_sum(bundle: &FellBundle, a: &APWitness, t: &Elem, b: &Vector) -> Result<Vector> {
    bundle.check_fiber(t, b)?;
    let ctx = bundle.ctx();
    let mut acc = Vector::zeros(b.len());
    for (r, ar) in a.values() {
        if let Some(atr) = a.get(&ctx.op(t, r)) {
            acc += bundle.unit_right(t, &bundle.unit_left(&atr.adjoint(), t, b), ar);
        }
    }
    Ok(acc)
}

/// `‖b − Σ_r a(tr)* b a(r)‖`.
pub fn ap_defect(bundle: &FellBundle, a: &APWitness, t: &Elem, b: &Vector) -> Result<f64> {
    let s = ap_sum(bundle, a, t, b)?;
    bundle.fiber_norm(t, &(b - s))
}

/// `‖b − Σ_s a(ts)* α_t(α_{t⁻¹}(b) a(s))‖` for `b ∈ A_t`, computed from the partial action alone.
pub fn ap_defect_partial(pa: &CPartialAction, a: &APWitness, t: &Elem, b: &FdElement) -> Result<f64> {
    let ctx = pa.ctx();
    ctx.check(t)?;
    pa.algebra().check(b)?;
    let domain = pa.domain(t);
    if !b.in_ideal(&domain, 1e-12) {
        return Err(Error::DomainViolation(format!("b is not in A_{}", ctx.format(t))));
    }
    let alpha_t = pa.alpha(t);
    let alpha_tinv = pa.alpha(&ctx.inverse(t));
    let pulled = alpha_tinv.apply(b);
    let mut acc = FdElement::zero(pa.algebra());
    for (s, as_) in a.values() {
        if let Some(ats) = a.get(&ctx.op(t, s)) {
            acc.add_assign(&ats.adjoint().mul(&alpha_t.apply(&pulled.mul(as_))));
        }
    }
    Ok(b.sub(&acc).norm())
}

/// `a(r) = |G|^{-1/2}·1` on a finite group.
pub fn uniform_witness(ctx: &GroupCtx, alg: &FdAlgebra) -> Result<APWitness> {
    let n = ctx.order().ok_or_else(|| Error::Unsupported(format!("uniform witness over infinite group {ctx}")))?;
    let x = FdElement::scalar(alg, C64::new((n as f64).powf(-0.5), 0.0));
    Ok(APWitness::new(ctx.ball(0).into_iter().map(|r| (r, x.clone())).collect()))
}

/// Normalized indicator of the box `{0..N-1}^d` on `ℤ^d`; the whole group when finite.
pub fn folner_witness(ctx: &GroupCtx, alg: &FdAlgebra, n: usize) -> Result<APWitness> {
    if ctx.is_finite() {
        return uniform_witness(ctx, alg);
    }
    let d = ctx.lattice_dim().ok_or_else(|| Error::Unsupported(format!("Følner witness over {ctx}")))?;
    if n == 0 {
        return Err(Error::InvalidArgument("Følner box side must be positive".into()));
    }
    let count = n.pow(d as u32);
    let x = FdElement::scalar(alg, C64::new((count as f64).powf(-0.5), 0.0));
    let mut values = BTreeMap::new();
    for idx in 0..count {
        let mut rest = idx;
        let v: Vec<i64> = (0..d)
            .map(|_| {
                let c = (rest % n) as i64;
                rest /= n;
                c
            })
            .collect();
        values.insert(Elem::Lattice(v), x.clone());
    }
    Ok(APWitness::new(values))
}

/// Output of [`convexify`].
#[derive(Clone, Debug)]
pub struct ConvexCertificate {
    pub translates: Vec<Elem>,
    /// `‖⟨ã,ã⟩ − Σ_k λ_k ⟨a_k,a_k⟩‖`.
    pub inner_residual: f64,
    /// Per target, `max |Σ_s ã(ts)* b ã(s) − Σ_k λ_k Σ_s a_k(ts)* b a_k(s)|`.
    pub sum_residuals: Vec<f64>,
    pub input_bounds: Vec<f64>,
    pub output_bound: f64,
}

/// Combines witnesses `a_k` with weights `λ_k` into `ã(s) = Σ_k λ_k^{1/2} a_k(s r_k⁻¹)`,
/// choosing `r_k` greedily in `ball(radius)` so that the sets `F′r_k` are pairwise
/// disjoint, where `F′ = F ∪ t_1⁻¹F ∪ ... ∪ t_n⁻¹F` and `F` is the union of the supports.
pub fn convexify(
    bundle: &FellBundle,
    witnesses: &[(APWitness, f64)],
    targets: &[(Elem, Vector)],
    radius: usize,
) -> Result<(APWitness, ConvexCertificate)> {
    let ctx = bundle.ctx();
    if ctx.is_finite() {
        return Err(Error::Unsupported("convexification needs an infinite group".into()));
    }
    if witnesses.is_empty() {
        return Err(Error::InvalidArgument("no witnesses".into()));
    }
    let total: f64 = witnesses.iter().map(|(_, l)| *l).sum();
    if witnesses.iter().any(|(_, l)| !(*l >= 0.0)) || total > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("weights must be nonnegative with sum ≤ 1 (sum {total})")));
    }
    let alg = bundle.unit_algebra();
    let f: BTreeSet<Elem> = witnesses.iter().flat_map(|(a, _)| a.support().cloned()).collect();
    let mut f_prime = f.clone();
    for (t, _) in targets {
        let tinv = ctx.inverse(t);
        f_prime.extend(f.iter().map(|x| ctx.op(&tinv, x)));
    }

    let mut used: BTreeSet<Elem> = BTreeSet::new();
    let mut translates = Vec::with_capacity(witnesses.len());
    for r in ctx.ball(radius) {
        if translates.len() == witnesses.len() {
            break;
        }
        let moved: Vec<Elem> = f_prime.iter().map(|x| ctx.op(x, &r)).collect();
        if moved.iter().all(|x| !used.contains(x)) {
            used.extend(moved);
            translates.push(r);
        }
    }
    if translates.len() < witnesses.len() {
        return Err(Error::SearchExhausted { radius, found: translates.len(), needed: witnesses.len() });
    }

    let mut values: BTreeMap<Elem, FdElement> = BTreeMap::new();
    for ((a, lambda), r) in witnesses.iter().zip(&translates) {
        let w = C64::new(lambda.sqrt(), 0.0);
        for (s, x) in a.translate(ctx, r).values {
            let x = x.scale(w);
            values.entry(s).and_modify(|acc| acc.add_assign(&x)).or_insert(x);
        }
    }
    let combined = APWitness::new(values);

    let mut expected = FdElement::zero(alg);
    for (a, lambda) in witnesses {
        expected.add_assign(&a.inner(alg).scale(C64::new(*lambda, 0.0)));
    }
    let inner_residual = combined.inner(alg).max_abs_diff(&expected);
    let mut sum_residuals = Vec::with_capacity(targets.len());
    for (t, b) in targets {
        let mut want = Vector::zeros(b.len());
        for (a, lambda) in witnesses {
            want += ap_sum(bundle, a, t, b)? * C64::new(*lambda, 0.0);
        }
        let got = ap_sum(bundle, &combined, t, b)?;
        sum_residuals.push((got - want).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let cert = ConvexCertificate {
        translates,
        inner_residual,
        sum_residuals,
        input_bounds: witnesses.iter().map(|(a, _)| witness_bound(alg, a)).collect(),
        output_bound: witness_bound(alg, &combined),
    };
    Ok((combined, cert))
}

/// Heuristic weight fitter: projected gradient descent on
/// `Σ_j ‖b_j − Σ_k λ_k S_k(t_j, b_j)‖²` over `{λ ≥ 0, Σλ ≤ 1}`, with `S_k` the
/// [`ap_sum`] of witness `k`. Deterministic; no optimality guarantee.
pub fn fit_weights(
    bundle: &FellBundle,
    witnesses: &[APWitness],
    targets: &[(Elem, Vector)],
    iterations: usize,
) -> Result<Vec<f64>> {
    let m = witnesses.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    // stack every target into one real least-squares problem  min ‖y − Xλ‖²
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut y = Vec::new();
    for (t, b) in targets {
        for (k, a) in witnesses.iter().enumerate() {
            let s = ap_sum(bundle, a, t, b)?;
            cols[k].extend(s.iter().flat_map(|z| [z.re, z.im]));
        }
        y.extend(b.iter().flat_map(|z| [z.re, z.im]));
    }
    let gram: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| dot(&cols[i], &cols[j])).collect()).collect();
    let rhs: Vec<f64> = (0..m).map(|i| dot(&cols[i], &y)).collect();
    let lipschitz = gram.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max).max(1e-12);
    let mut lambda = vec![1.0 / m as f64; m];
    for _ in 0..iterations {
        let grad: Vec<f64> = (0..m).map(|i| dot(&gram[i], &lambda) - rhs[i]).collect();
        let step: Vec<f64> = lambda.iter().zip(&grad).map(|(l, g)| l - g / lipschitz).collect();
        lambda = project_capped_simplex(&step);
    }
    Ok(lambda)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean projection onto `{λ ≥ 0, Σλ ≤ 1}`.
fn project_capped_simplex(v: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= 1.0 {
        return clipped;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        cum += x;
        let cand = (cum - 1.0) / (i + 1) as f64;
        if x - cand > 0.0 {
            theta = cand;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// An indexed witness family evaluated against a fixed list of labeled targets.
pub trait ApProblem: Sync {
    fn len(&self) -> usize;
    /// Label of family member `i` (used in reports).
    fn index_label(&self, i: usize) -> String;
    fn targets(&self) -> Vec<(String, String)>;
    fn bound(&self, i: usize) -> Result<f64>;
    fn defect(&self, i: usize, target: usize) -> Result<f64>;
}

/// A list of witnesses over one bundle.
pub struct BundleFamily<'a> {
    pub bundle: &'a FellBundle,
    pub witnesses: Vec<APWitness>,
    /// `(t, b, label)`.
    pub targets: Vec<(Elem, Vector, String)>,
}

impl ApProblem for BundleFamily<'_> {
    fn len(&self) -> usize {
        self.witnesses.len()
    }

    fn index_label(&self, i: usize) -> String {
        i.to_string()
    }

    fn targets(&self) -> Vec<(String, String)> {
        self.targets.iter().map(|(t, _, l)| (self.bundle.ctx().format(t), l.clone())).collect()
    }

    fn bound(&self, i: usize) -> Result<f64> {
        Ok(witness_bound(self.bundle.unit_algebra(), &self.witnesses[i]))
    }

    fn defect(&self, i: usize, target: usize) -> Result<f64> {
        let (t, b, _) = &self.targets[target];
        ap_defect(self.bundle, &self.witnesses[i], t, b)
    }
}

/// Fiber basis vectors over `ball(radius)` (restricted to the bundle window), labeled
/// `t:k`. Empty fibers contribute nothing.
pub fn basis_targets(bundle: &FellBundle, radius: usize) -> Vec<(Elem, Vector, String)> {
    let ctx = bundle.ctx();
    let mut out = Vec::new();
    for t in ctx.ball(radius) {
        for (k, v) in bundle.fiber_basis(&t).into_iter().enumerate() {
            out.push((t.clone(), v, format!("{}:{k}", ctx.format(&t))));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectRow {
    pub index: String,
    pub t: String,
    pub target: String,
    pub bound: f64,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetVerdict {
    pub t: String,
    pub target: String,
    pub final_defect: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApCertificate {
    pub rows: Vec<DefectRow>,
    pub verdicts: Vec<TargetVerdict>,
    pub max_bound: f64,
    pub pass: bool,
}

/// Evaluates every `(i, target)` defect. A target passes when its defect at the last
/// index is `≤ tol`; the family passes when every target passes and every bound is
/// `≤ bound_cap`. Rows are ordered by index, then target, independently of threading.
pub fn ap_certify(problem: &dyn ApProblem, tol: f64, bound_cap: f64) -> Result<ApCertificate> {
    let targets = problem.targets();
    let bounds: Vec<f64> = (0..problem.len()).into_par_iter().map(|i| problem.bound(i)).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..problem.len()).flat_map(|i| (0..targets.len()).map(move |j| (i, j))).collect();
    let defects: Vec<f64> = pairs.par_iter().map(|&(i, j)| problem.defect(i, j)).collect::<Result<_>>()?;
    let rows: Vec<DefectRow> = pairs
        .iter()
        .zip(&defects)
        .map(|(&(i, j), &d)| DefectRow {
            index: problem.index_label(i),
            t: targets[j].0.clone(),
            target: targets[j].1.clone(),
            bound: bounds[i],
            defect: d,
        })
        .collect();
    let last = problem.len().checked_sub(1);
    let verdicts: Vec<TargetVerdict> = targets
        .iter()
        .enumerate()
        .map(|(j, (t, l))| {
            let final_defect = last.map_or(f64::INFINITY, |i| defects[i * targets.len() + j]);
            TargetVerdict { t: t.clone(), target: l.clone(), final_defect, pass: final_defect <= tol }
        })
        .collect();
    let max_bound = bounds.iter().cloned().fold(0.0, f64::max);
    let pass = last.is_some() && verdicts.iter().all(|v| v.pass) && max_bound <= bound_cap;
    Ok(ApCertificate { rows, verdicts, max_bound, pass })
}
