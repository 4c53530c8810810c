//! Fell bundles with finite-dimensional fibers.
//!
//! A bundle is either built from a (twisted) partial action, with fibers `B_t = A_t δ_t`
//! in flattened block coordinates of `A_t`, or given by explicit structure tensors over a
//! finite group. Fiber elements are coordinate vectors in the fiber's chosen basis; the
//! unit fiber uses the flattened coordinates of its [`FdAlgebra`].

mod derived;
mod sections;
mod twist;

pub use derived::SpectralAction;
pub use sections::Section;
pub use twist::{phase_unit, scalar_cocycle, Twist, TwistedAction};

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fdalg::{CPartialAction, FdAlgebra, FdElement, Ideal};
use crate::group::{Elem, GroupCtx};
use crate::linalg::{self, Mat, Vector};
use crate::report::ValidationReport;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// Structure tensors of a bundle over a finite group, indexed by element index.
///
/// `mul[s][t]` is the `d_{st} × (d_s d_t)` matrix sending `a ⊗ b` (index `i·d_t + j`) to
/// `ab`; `star[t]` is the `d_{t⁻¹} × d_t` matrix with `b* = star[t]·conj(b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorData {
    pub dims: Vec<usize>,
    pub mul: Vec<Vec<Mat>>,
    pub star: Vec<Mat>,
}

#[derive(Clone, Debug)]
enum Structure {
    Twisted(TwistedAction),
    Tensor(Arc<TensorData>),
}

#[derive(Clone, Debug)]
pub struct FellBundle {
    id: u64,
    ctx: GroupCtx,
    unit: FdAlgebra,
    structure: Structure,
}

impl FellBundle {
    /// The semidirect product bundle `{A_t δ_t}` of a partial action, after validating the
    /// action on `window(radius)`.
    pub fn make_semidirect(pa: CPartialAction, radius: usize) -> Result<Self> {
        let report = pa.validate(radius);
        if !report.passed() {
            return Err(Error::InvalidAction(Box::new(report)));
        }
        Ok(Self::from_twisted_unchecked(TwistedAction::untwisted(pa)))
    }

    /// The bundle of a twisted partial action, after checking conditions (1)–(5).
    pub fn make_twisted(action: TwistedAction, radius: usize) -> Result<Self> {
        let report = action.validate(radius);
        if !report.passed() {
            return Err(Error::InvalidTwist(Box::new(report)));
        }
        Ok(Self::from_twisted_unchecked(action))
    }

    /// `B_t = B_e = A` for every `t`, with the product of `A`.
    pub fn group_bundle(ctx: GroupCtx, algebra: FdAlgebra) -> Self {
        Self::from_twisted_unchecked(TwistedAction::untwisted(CPartialAction::identity_global(ctx, algebra)))
    }

    fn from_twisted_unchecked(action: TwistedAction) -> Self {
        Self {
            id: fresh_id(),
            ctx: action.base().ctx().clone(),
            unit: action.algebra().clone(),
            structure: Structure::Twisted(action),
        }
    }

    /// A bundle over a finite group from raw structure tensors. Only shapes are checked
    /// here; the axioms are the business of [`FellBundle::validate`].
    pub fn from_tensors(ctx: GroupCtx, unit: FdAlgebra, data: TensorData) -> Result<Self> {
        let n = ctx
            .order()
            .ok_or_else(|| Error::Unsupported("structure tensors over an infinite group".into()))?;
        let table = ctx.finite_table().expect("finite");
        let e = table.identity();
        let inv = |t: usize| match ctx.inverse(&Elem::Finite(t)) {
            Elem::Finite(i) => i,
            _ => unreachable!(),
        };
        let d = &data.dims;
        if d.len() != n || data.mul.len() != n || data.star.len() != n {
            return Err(Error::ShapeMismatch(format!("tensor data for {n} group elements expected")));
        }
        if d[e] != unit.dim() {
            return Err(Error::ShapeMismatch(format!("unit fiber has dim {} but {unit} has dim {}", d[e], unit.dim())));
        }
        for s in 0..n {
            if data.mul[s].len() != n {
                return Err(Error::ShapeMismatch(format!("mul row {s} has wrong length")));
            }
            for t in 0..n {
                let m = &data.mul[s][t];
                let st = table.table()[s][t];
                if m.nrows() != d[st] || m.ncols() != d[s] * d[t] {
                    return Err(Error::ShapeMismatch(format!("mul[{s}][{t}] is {}x{}", m.nrows(), m.ncols())));
                }
            }
            let st = &data.star[s];
            if st.nrows() != d[inv(s)] || st.ncols() != d[s] {
                return Err(Error::ShapeMismatch(format!("star[{s}] is {}x{}", st.nrows(), st.ncols())));
            }
        }
        Ok(Self { id: fresh_id(), ctx, unit, structure: Structure::Tensor(Arc::new(data)) })
    }

    /// Structure tensors of this bundle (finite groups only).
    pub fn tensor_data(&self) -> Result<TensorData> {
        let n = self
            .ctx
            .order()
            .ok_or_else(|| Error::Unsupported(format!("structure tensors over {}", self.ctx)))?;
        if let Structure::Tensor(data) = &self.structure {
            return Ok((**data).clone());
        }
        let elems: Vec<Elem> = (0..n).map(Elem::Finite).collect();
        let dims: Vec<usize> = elems.iter().map(|t| self.fiber_dim(t)).collect();
        let mut mul = Vec::with_capacity(n);
        for (si, s) in elems.iter().enumerate() {
            let mut row = Vec::with_capacity(n);
            for (ti, t) in elems.iter().enumerate() {
                let st = self.ctx.op(s, t);
                let mut m = Mat::zeros(self.fiber_dim(&st), dims[si] * dims[ti]);
                for i in 0..dims[si] {
                    let a = basis_vector(dims[si], i);
                    for j in 0..dims[ti] {
                        let b = basis_vector(dims[ti], j);
                        m.set_column(i * dims[ti] + j, &self.mul(s, &a, t, &b));
                    }
                }
                row.push(m);
            }
            mul.push(row);
        }
        let star = elems
            .iter()
            .enumerate()
            .map(|(ti, t)| {
                let mut m = Mat::zeros(self.fiber_dim(&self.ctx.inverse(t)), dims[ti]);
                for i in 0..dims[ti] {
                    m.set_column(i, &self.star(t, &basis_vector(dims[ti], i)));
                }
                m
            })
            .collect();
        Ok(TensorData { dims, mul, star })
    }

    /// Identity of the bundle; sections and kernels remember it.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    /// `B_e` as a C*-algebra.
    pub fn unit_algebra(&self) -> &FdAlgebra {
        &self.unit
    }

    /// The underlying (twisted) action, when the bundle was built from one.
    pub fn twisted_action(&self) -> Option<&TwistedAction> {
        match &self.structure {
            Structure::Twisted(tw) => Some(tw),
            Structure::Tensor(_) => None,
        }
    }

    /// The ideal `A_t` carrying the fiber, for bundles built from an action.
    pub fn fiber_ideal(&self, t: &Elem) -> Option<Ideal> {
        self.twisted_action().map(|tw| tw.domain(t))
    }

    fn tensor_index(&self, t: &Elem) -> usize {
        match t {
            Elem::Finite(i) => *i,
            _ => panic!("tensor bundle over a non-finite element"),
        }
    }

    pub fn fiber_dim(&self, t: &Elem) -> usize {
        match &self.structure {
            Structure::Twisted(tw) => self.unit.ideal_dim(&tw.domain(t)),
            Structure::Tensor(data) => data.dims[self.tensor_index(t)],
        }
    }

    /// Elements on which the bundle is known: the group if finite, else `ball(radius)`.
    pub fn window(&self, radius: usize) -> Vec<Elem> {
        match &self.structure {
            Structure::Twisted(tw) => tw.base().window(radius),
            Structure::Tensor(_) => self.ctx.ball(radius),
        }
    }

    pub fn check_fiber(&self, t: &Elem, b: &Vector) -> Result<()> {
        self.ctx.check(t)?;
        let d = self.fiber_dim(t);
        if b.len() != d {
            return Err(Error::ShapeMismatch(format!("vector of length {} in fiber {} of dim {d}", b.len(), self.ctx.format(t))));
        }
        Ok(())
    }

    /// `A_t`-element represented by a fiber vector (bundles built from actions).
    pub fn embed(&self, t: &Elem, b: &Vector) -> Option<FdElement> {
        let ideal = self.fiber_ideal(t)?;
        FdElement::from_flat(&self.unit, &ideal, b).ok()
    }

    /// Fiber vector of an element of `A_t`; components outside `A_t` are dropped.
    pub fn project(&self, t: &Elem, x: &FdElement) -> Option<Vector> {
        Some(x.flatten_on(&self.fiber_ideal(t)?))
    }

    pub fn to_unit(&self, b: &Vector) -> FdElement {
        FdElement::from_flat(&self.unit, &self.unit.full_ideal(), b).expect("unit fiber coordinates")
    }

    pub fn from_unit(&self, x: &FdElement) -> Vector {
        x.flatten_on(&self.unit.full_ideal())
    }

    /// Product `B_s × B_t → B_{st}`. For twisted actions this is
    /// `(aδ_s)(bδ_t) = γ_s(γ_s⁻¹(a)b)ω(s,t)δ_{st}`, with the twist on the right.
    pub fn mul(&self, s: &Elem, a: &Vector, t: &Elem, b: &Vector) -> Vector {
        match &self.structure {
            Structure::Twisted(tw) => {
                let st = self.ctx.op(s, t);
                let x = self.embed(s, a).expect("fiber shape");
                let y = self.embed(t, b).expect("fiber shape");
                let g = tw.gamma(s);
                let mut z = g.apply(&g.inverse().apply(&x).mul(&y));
                if !tw.is_trivial() {
                    z = z.mul(&tw.omega(s, t));
                }
                self.project(&st, &z).expect("twisted bundle")
            }
            Structure::Tensor(data) => {
                let (si, ti) = (self.tensor_index(s), self.tensor_index(t));
                let (ds, dt) = (data.dims[si], data.dims[ti]);
                assert!(a.len() == ds && b.len() == dt, "fiber shape");
                let kron = Vector::from_fn(ds * dt, |k, _| a[k / dt.max(1)] * b[k % dt.max(1)]);
                &data.mul[si][ti] * kron
            }
        }
    }

    /// Involution `B_t → B_{t⁻¹}`: `(aδ_t)* = ω(t⁻¹,t)*γ_{t⁻¹}(a*)δ_{t⁻¹}`.
    pub fn star(&self, t: &Elem, b: &Vector) -> Vector {
        let tinv = self.ctx.inverse(t);
        match &self.structure {
            Structure::Twisted(tw) => {
                let x = self.embed(t, b).expect("fiber shape");
                let mut y = tw.gamma(&tinv).apply(&x.adjoint());
                if !tw.is_trivial() {
                    y = tw.omega(&tinv, t).adjoint().mul(&y);
                }
                self.project(&tinv, &y).expect("twisted bundle")
            }
            Structure::Tensor(data) => &data.star[self.tensor_index(t)] * b.map(|z| z.conj()),
        }
    }

    /// `b* b ∈ B_e`.
    pub fn star_mul(&self, t: &Elem, b: &Vector) -> FdElement {
        let tinv = self.ctx.inverse(t);
        self.to_unit(&self.mul(&tinv, &self.star(t, b), t, b))
    }

    /// `‖b‖ = ‖b*b‖^{1/2}`.
    pub fn fiber_norm(&self, t: &Elem, b: &Vector) -> Result<f64> {
        self.check_fiber(t, b)?;
        Ok(self.norm_unchecked(t, b))
    }

    pub(crate) fn norm_unchecked(&self, t: &Elem, b: &Vector) -> f64 {
        if b.is_empty() {
            return 0.0;
        }
        self.star_mul(t, b).norm().sqrt()
    }

    /// Left and right multiplication by `B_e`.
    pub fn unit_left(&self, a: &FdElement, t: &Elem, b: &Vector) -> Vector {
        self.mul(&self.ctx.id(), &self.from_unit(a), t, b)
    }

    pub fn unit_right(&self, t: &Elem, b: &Vector, a: &FdElement) -> Vector {
        self.mul(t, b, &self.ctx.id(), &self.from_unit(a))
    }

    pub fn random_fiber<R: Rng + ?Sized>(&self, t: &Elem, rng: &mut R) -> Vector {
        Vector::from_fn(self.fiber_dim(t), |_, _| linalg::random_complex(rng))
    }

    /// Fiber basis `{e_i}` of `B_t`.
    pub fn fiber_basis(&self, t: &Elem) -> Vec<Vector> {
        let d = self.fiber_dim(t);
        (0..d).map(|i| basis_vector(d, i)).collect()
    }

    /// Samples fibers from `window(radius)` and records the worst violation of each
    /// axiom: associativity, `(ab)* = b*a*`, `a** = a`, `‖ab‖ ≤ ‖a‖‖b‖`, the C*-identity
    /// (as `‖aa*‖ = ‖a*a‖`, and `‖a*a‖ = ‖a‖²` against the algebra norm when the fiber
    /// sits in an algebra), positivity of `a*a`, and agreement of the unit fiber with `B_e`.
    pub fn validate(&self, radius: usize, samples: usize, seed: u64) -> ValidationReport {
        let tol = 1e-10;
        let mut report = ValidationReport::new(tol);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let window = self.window(radius);
        let fmt = |x: &Elem| self.ctx.format(x);
        let e = self.ctx.id();
        for _ in 0..samples {
            let r = &window[rng.gen_range(0..window.len())];
            let s = &window[rng.gen_range(0..window.len())];
            let t = &window[rng.gen_range(0..window.len())];
            let a = self.random_fiber(r, &mut rng);
            let b = self.random_fiber(s, &mut rng);
            let c = self.random_fiber(t, &mut rng);
            let rs = self.ctx.op(r, s);
            let st = self.ctx.op(s, t);
            let sinv = self.ctx.inverse(s);
            let rinv = self.ctx.inverse(r);

            let left = self.mul(&rs, &self.mul(r, &a, s, &b), t, &c);
            let right = self.mul(r, &a, &st, &self.mul(s, &b, t, &c));
            let wit = || format!("r={}, s={}, t={}", fmt(r), fmt(s), fmt(t));
            report.record("associativity", wit, vec_diff(&left, &right));

            let ab = self.mul(r, &a, s, &b);
            let lhs = self.star(&rs, &ab);
            let rhs = self.mul(&sinv, &self.star(s, &b), &rinv, &self.star(r, &a));
            report.record("(ab)* = b*a*", || format!("r={}, s={}", fmt(r), fmt(s)), vec_diff(&lhs, &rhs));

            let twice = self.star(&rinv, &self.star(r, &a));
            report.record("a** = a", || format!("r={}", fmt(r)), vec_diff(&twice, &a));

            let (na, nb, nab) = (self.norm_unchecked(r, &a), self.norm_unchecked(s, &b), self.norm_unchecked(&rs, &ab));
            report.record("submultiplicativity", || format!("r={}, s={}", fmt(r), fmt(s)), (nab - na * nb).max(0.0));

            let aa = self.star_mul(r, &a);
            let a_star = self.star(r, &a);
            let aa_rev = self.to_unit(&self.mul(r, &a, &rinv, &a_star));
            let mut cstar = (aa.norm() - aa_rev.norm()).abs();
            if let Some(x) = self.embed(r, &a) {
                cstar = cstar.max((aa.norm() - x.norm().powi(2)).abs());
            }
            report.record("C*-identity", || format!("r={}", fmt(r)), cstar);
            report.record("positivity of a*a", || format!("r={}", fmt(r)), aa.positivity_defect());

            let x = self.unit.random_element(&mut rng);
            let y = self.unit.random_element(&mut rng);
            let prod = self.to_unit(&self.mul(&e, &self.from_unit(&x), &e, &self.from_unit(&y)));
            report.record("unit fiber product", || "e".into(), prod.max_abs_diff(&x.mul(&y)));
        }
        report
    }
}

pub(crate) fn basis_vector(d: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(d);
    v[i] = linalg::ONE;
    v
}

pub(crate) fn vec_diff(a: &Vector, b: &Vector) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    linalg::vec_max_abs(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdalg::IdealIso;
    use crate::linalg::C64;
    use std::collections::BTreeMap;

    fn f(i: usize) -> Elem {
        Elem::Finite(i)
    }

    fn scalar(z: C64) -> Vector {
        Vector::from_vec(vec![z])
    }

    #[test]
    fn group_bundle_of_z2_multiplies_scalars() {
        let b = FellBundle::group_bundle(GroupCtx::cyclic(2).unwrap(), FdAlgebra::commutative(1));
        let p = b.mul(&f(1), &scalar(C64::new(2.0, 0.0)), &f(1), &scalar(C64::new(0.0, 3.0)));
        assert_eq!(p, scalar(C64::new(0.0, 6.0)));
        assert!(b.validate(0, 200, 1).passed());
    }

    #[test]
    fn trivial_partial_action_has_zero_fibers_off_e() {
        let pa = CPartialAction::trivial(GroupCtx::cyclic(3).unwrap(), FdAlgebra::commutative(1));
        let b = FellBundle::make_semidirect(pa, 0).unwrap();
        assert_eq!(b.fiber_dim(&f(0)), 1);
        assert_eq!(b.fiber_dim(&f(1)), 0);
        assert_eq!(b.fiber_dim(&f(2)), 0);
        assert!(b.validate(0, 200, 2).passed());
    }

    #[test]
    fn sign_twist_squares_the_generator_to_minus_one() {
        let ctx = GroupCtx::cyclic(2).unwrap();
        let base = CPartialAction::identity_global(ctx, FdAlgebra::commutative(1));
        let table = scalar_cocycle(&base, [(f(1), f(1), C64::new(-1.0, 0.0))]);
        let b = FellBundle::make_twisted(TwistedAction::new(base, Twist::Cocycle(table)), 0).unwrap();
        let one = scalar(linalg::ONE);
        assert_eq!(b.mul(&f(1), &one, &f(1), &one), scalar(C64::new(-1.0, 0.0)));
        assert!(b.validate(0, 300, 3).passed(), "{}", b.validate(0, 300, 3));
        // (δ_1)* = -δ_1, so δ_1 is anti-self-adjoint with spectrum {±i}.
        assert_eq!(b.star(&f(1), &one), scalar(C64::new(-1.0, 0.0)));
    }

    #[test]
    fn broken_cocycle_is_rejected_naming_condition_five() {
        let ctx = GroupCtx::cyclic(3).unwrap();
        let base = CPartialAction::identity_global(ctx, FdAlgebra::commutative(1));
        let table = scalar_cocycle(&base, [(f(1), f(1), C64::new(0.0, 1.0))]);
        match FellBundle::make_twisted(TwistedAction::new(base, Twist::Cocycle(table)), 0) {
            Err(Error::InvalidTwist(report)) => assert!(report.failed_checks().contains(&"condition (5)")),
            other => panic!("expected twist error, got {other:?}"),
        }
    }

    #[test]
    fn semidirect_fiber_norm_is_algebra_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = GroupCtx::cyclic(2).unwrap();
        let alg = FdAlgebra::new(vec![2, 2]).unwrap();
        let u = linalg::random_unitary(2, &mut rng);
        let mut maps = BTreeMap::new();
        maps.insert(f(0), IdealIso::identity_on(&alg, &alg.full_ideal()));
        maps.insert(f(1), IdealIso::new(&alg, vec![(0, 1, u.clone()), (1, 0, u.adjoint())]).unwrap());
        let pa = CPartialAction::from_table(ctx, alg.clone(), maps).unwrap();
        let b = FellBundle::make_semidirect(pa, 0).unwrap();
        for _ in 0..20 {
            let x = alg.random_element(&mut rng);
            let v = b.project(&f(1), &x).unwrap();
            assert!((b.fiber_norm(&f(1), &v).unwrap() - x.norm()).abs() < 1e-10);
            let z = C64::new(0.3, -1.2);
            let scaled = b.fiber_norm(&f(1), &(&v * z)).unwrap();
            assert!((scaled - z.norm() * x.norm()).abs() < 1e-10);
        }
        assert_eq!(b.fiber_norm(&f(1), &Vector::zeros(8)).unwrap(), 0.0);
        assert!(matches!(b.fiber_norm(&f(1), &Vector::zeros(3)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn corrupted_structure_tensor_fails_associativity() {
        let b = FellBundle::group_bundle(GroupCtx::symmetric(3).unwrap(), FdAlgebra::commutative(1));
        assert!(b.validate(0, 300, 4).passed());
        let mut data = b.tensor_data().unwrap();
        data.mul[1][2][(0, 0)] *= C64::new(1.5, 0.0);
        let broken = FellBundle::from_tensors(b.ctx().clone(), b.unit_algebra().clone(), data).unwrap();
        let report = broken.validate(0, 400, 4);
        assert!(report.failed_checks().contains(&"associativity"), "{report}");
    }

    #[test]
    fn tensor_round_trip_preserves_products() {
        let pa = CPartialAction::trivial(GroupCtx::cyclic(2).unwrap(), FdAlgebra::new(vec![2]).unwrap());
        let b = FellBundle::make_semidirect(pa, 0).unwrap();
        let t = FellBundle::from_tensors(b.ctx().clone(), b.unit_algebra().clone(), b.tensor_data().unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = b.random_fiber(&f(0), &mut rng);
        let y = b.random_fiber(&f(0), &mut rng);
        assert!(vec_diff(&b.mul(&f(0), &x, &f(0), &y), &t.mul(&f(0), &x, &f(0), &y)) < 1e-12);
        assert!(vec_diff(&b.star(&f(0), &x), &t.star(&f(0), &x)) < 1e-12);
    }
}
