//! Partial actions induced by a bundle on `Z(B_e)` and on the spectrum of a commutative
//! `B_e`, and restriction to finite subgroups.

use std::collections::BTreeMap;

use super::{FellBundle, TensorData};
use crate::error::{Error, Result};
use crate::fdalg::{CPartialAction, FdAlgebra, FdElement, Ideal, IdealIso};
use crate::group::{Elem, GroupCtx};
use crate::linalg::{self, Mat, Vector};

const SUPPORT_TOL: f64 = 1e-12;
const SOLVE_TOL: f64 = 1e-9;

/// Point maps `θ_t: X_{t⁻¹} → X_t` on the spectrum `{0..m}` of `B_e ≅ C^m` together with
/// the induced C*-partial action `α_t(f) = f∘θ_{t⁻¹}`.
#[derive(Clone, Debug)]
pub struct SpectralAction {
    pub theta: BTreeMap<Elem, Vec<(usize, usize)>>,
    pub action: CPartialAction,
}

impl SpectralAction {
    /// `θ_t(x)`, if `x ∈ X_{t⁻¹}`.
    pub fn apply(&self, t: &Elem, x: usize) -> Option<usize> {
        self.theta.get(t)?.iter().find(|(j, _)| *j == x).map(|(_, k)| *k)
    }
}

impl FellBundle {
    /// Blocks of `B_e` met by `span B_t B_t*`.
    fn left_support(&self, t: &Elem) -> Ideal {
        let tinv = self.ctx.inverse(t);
        let mut acc = FdElement::zero(&self.unit);
        for b in self.fiber_basis(t) {
            let bstar = self.star(t, &b);
            acc.add_assign(&self.to_unit(&self.mul(t, &b, &tinv, &bstar)));
        }
        let blocks = (0..self.unit.block_count()).filter(|&j| linalg::max_abs(acc.block(j)) > SUPPORT_TOL).collect();
        Ideal::new(blocks)
    }

    fn central_window_action(&self, radius: usize, maps: BTreeMap<Elem, IdealIso>) -> Result<CPartialAction> {
        let center = self.unit.center();
        if self.ctx.is_finite() {
            CPartialAction::from_table(self.ctx.clone(), center, maps)
        } else {
            CPartialAction::windowed_table(self.ctx.clone(), center, maps, radius)
        }
    }

    /// `σ_t`: for each block projection `p_j` of `Z(I_{t⁻¹})`, solves `m·p_j = y·m` for all
    /// `m` in a basis of `B_t` with `y ∈ Z(I_t)`, where `I_t = span B_t B_t*`.
    pub fn central_partial_action(&self, radius: usize) -> Result<CPartialAction> {
        let mut maps = BTreeMap::new();
        let center = self.unit.center();
        let mut supports: BTreeMap<Elem, Ideal> = BTreeMap::new();
        let mut support = |t: &Elem| supports.entry(t.clone()).or_insert_with(|| self.left_support(t)).clone();
        for t in self.window(radius) {
            let source = support(&self.ctx.inverse(&t));
            let target = support(&t);
            if source.blocks().len() != target.blocks().len() {
                return Err(Error::Inconsistent(format!(
                    "I_t and I_t⁻¹ have different block counts at t={}",
                    self.ctx.format(&t)
                )));
            }
            if target.is_zero() {
                continue;
            }
            let basis = self.fiber_basis(&t);
            let rows = basis.len() * self.fiber_dim(&t);
            let mut lhs = Mat::zeros(rows, target.blocks().len());
            for (c, &k) in target.blocks().iter().enumerate() {
                let pk = FdElement::block_unit(&self.unit, k);
                let col: Vec<_> = basis.iter().flat_map(|m| self.unit_left(&pk, &t, m).iter().copied().collect::<Vec<_>>()).collect();
                lhs.set_column(c, &Vector::from_vec(col));
            }
            let svd = lhs.clone().svd(true, true);
            let mut entries = Vec::new();
            for &j in source.blocks() {
                let pj = FdElement::block_unit(&self.unit, j);
                let rhs: Vec<_> = basis.iter().flat_map(|m| self.unit_right(&t, m, &pj).iter().copied().collect::<Vec<_>>()).collect();
                let rhs = Vector::from_vec(rhs);
                let c = svd.solve(&rhs, 1e-12).map_err(|e| Error::Inconsistent(e.to_string()))?;
                let residual = linalg::vec_max_abs(&(&lhs * &c - &rhs));
                let wit = || format!("t={}, block {j}", self.ctx.format(&t));
                if residual > SOLVE_TOL {
                    return Err(Error::Inconsistent(format!("no central solution at {} (residual {residual:.3e})", wit())));
                }
                let hits: Vec<usize> = (0..c.len()).filter(|&i| (c[i] - linalg::ONE).norm() < 1e-8).collect();
                let rest = (0..c.len()).filter(|i| !hits.contains(i)).map(|i| c[i].norm()).fold(0.0, f64::max);
                if hits.len() != 1 || rest > 1e-8 {
                    return Err(Error::Inconsistent(format!("image of p_j is not a block projection at {}", wit())));
                }
                entries.push((j, target.blocks()[hits[0]], Mat::identity(1, 1)));
            }
            maps.insert(t, IdealIso::new(&center, entries).map_err(|e| Error::Inconsistent(e.to_string()))?);
        }
        self.central_window_action(radius, maps)
    }

    /// Point maps from `f·b = b·f'` with `f, f'` characteristic functions of points: `x`
    /// lies in `X_{t⁻¹}` when `B_t·p_x ≠ 0`, and `θ_t(x)` is the unique `y` with
    /// `p_y·b·p_x = b·p_x` for all `b ∈ B_t`.
    pub fn spectral_partial_action(&self, radius: usize) -> Result<SpectralAction> {
        if !self.unit.is_commutative() {
            return Err(Error::Unsupported(format!("spectral partial action of non-commutative {}", self.unit)));
        }
        let m = self.unit.block_count();
        let points: Vec<FdElement> = (0..m).map(|j| FdElement::block_unit(&self.unit, j)).collect();
        let mut theta = BTreeMap::new();
        let mut maps = BTreeMap::new();
        let alg = FdAlgebra::commutative(m);
        for t in self.window(radius) {
            let basis = self.fiber_basis(&t);
            let mut pairs = Vec::new();
            for (x, px) in points.iter().enumerate() {
                let cut: Vec<Vector> = basis.iter().map(|b| self.unit_right(&t, b, px)).collect();
                if cut.iter().all(|v| linalg::vec_max_abs(v) <= SUPPORT_TOL) {
                    continue;
                }
                let fixed: Vec<usize> = (0..m)
                    .filter(|&y| cut.iter().all(|v| super::vec_diff(&self.unit_left(&points[y], &t, v), v) <= SOLVE_TOL))
                    .collect();
                if fixed.len() != 1 {
                    return Err(Error::Inconsistent(format!(
                        "point {x} has {} candidate images at t={}",
                        fixed.len(),
                        self.ctx.format(&t)
                    )));
                }
                pairs.push((x, fixed[0]));
            }
            let entries = pairs.iter().map(|&(x, y)| (x, y, Mat::identity(1, 1))).collect();
            maps.insert(t.clone(), IdealIso::new(&alg, entries).map_err(|e| Error::Inconsistent(e.to_string()))?);
            theta.insert(t, pairs);
        }
        let action = self.central_window_action(radius, maps)?;
        Ok(SpectralAction { theta, action })
    }

    /// The bundle `{B_t}_{t∈H}` over a finite subgroup `H`, as a bundle over a new finite
    /// group whose elements are `H` in ball order.
    pub fn restrict_to_subgroup(&self, subgroup: &[Elem]) -> Result<FellBundle> {
        let mut elems: Vec<Elem> = subgroup.to_vec();
        for t in &elems {
            self.ctx.check(t)?;
        }
        elems.sort_by(|a, b| self.ctx.ball_cmp(a, b));
        elems.dedup();
        let index: BTreeMap<&Elem, usize> = elems.iter().enumerate().map(|(i, t)| (t, i)).collect();
        if !index.contains_key(&self.ctx.id()) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        let mut table = Vec::with_capacity(elems.len());
        for s in &elems {
            let mut row = Vec::with_capacity(elems.len());
            for t in &elems {
                let st = self.ctx.op(s, t);
                let i = *index
                    .get(&st)
                    .ok_or_else(|| Error::NotSubgroup(format!("{} not in subset", self.ctx.format(&st))))?;
                row.push(i);
            }
            table.push(row);
        }
        let names: Vec<String> = elems.iter().map(|t| self.ctx.format(t)).collect();
        let ctx = GroupCtx::from_table(format!("{{{}}}", names.join(",")), table)?;
        let dims: Vec<usize> = elems.iter().map(|t| self.fiber_dim(t)).collect();
        let mul = elems
            .iter()
            .enumerate()
            .map(|(si, s)| {
                elems
                    .iter()
                    .enumerate()
                    .map(|(ti, t)| {
                        let st = self.ctx.op(s, t);
                        let mut m = Mat::zeros(self.fiber_dim(&st), dims[si] * dims[ti]);
                        for i in 0..dims[si] {
                            for j in 0..dims[ti] {
                                let p = self.mul(s, &super::basis_vector(dims[si], i), t, &super::basis_vector(dims[ti], j));
                                m.set_column(i * dims[ti] + j, &p);
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        let star = elems
            .iter()
            .enumerate()
            .map(|(ti, t)| {
                let mut m = Mat::zeros(self.fiber_dim(&self.ctx.inverse(t)), dims[ti]);
                for i in 0..dims[ti] {
                    m.set_column(i, &self.star(t, &super::basis_vector(dims[ti], i)));
                }
                m
            })
            .collect();
        FellBundle::from_tensors(ctx, self.unit.clone(), TensorData { dims, mul, star })
    }
}
