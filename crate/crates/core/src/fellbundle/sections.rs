//! Finitely supported sections `t ↦ f(t) ∈ B_t`.

use std::collections::BTreeMap;

use rand::Rng;

use super::{vec_diff, FellBundle};
use crate::error::{Error, Result};
use crate::fdalg::FdElement;
use crate::group::Elem;
use crate::linalg::{Vector, C64};

/// A finitely supported section of one particular bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    bundle: u64,
    values: BTreeMap<Elem, Vector>,
}

impl Section {
    pub fn bundle_id(&self) -> u64 {
        self.bundle
    }

    pub fn values(&self) -> &BTreeMap<Elem, Vector> {
        &self.values
    }

    pub fn support(&self) -> impl Iterator<Item = &Elem> {
        self.values.keys()
    }

    pub fn get(&self, t: &Elem) -> Option<&Vector> {
        self.values.get(t)
    }

    fn same_bundle(&self, other: &Section) -> Result<()> {
        if self.bundle != other.bundle {
            return Err(Error::BundleMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        self.same_bundle(other)?;
        let mut values = self.values.clone();
        for (t, v) in &other.values {
            values.entry(t.clone()).and_modify(|x| *x += v).or_insert_with(|| v.clone());
        }
        Ok(Section { bundle: self.bundle, values })
    }

    pub fn scale(&self, z: C64) -> Section {
        Section { bundle: self.bundle, values: self.values.iter().map(|(t, v)| (t.clone(), v * z)).collect() }
    }

    pub fn sub(&self, other: &Section) -> Result<Section> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Largest coordinate difference, treating missing entries as zero.
    pub fn max_abs_diff(&self, other: &Section) -> f64 {
        if self.bundle != other.bundle {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for t in self.values.keys().chain(other.values.keys()) {
            let d = match (self.values.get(t), other.values.get(t)) {
                (Some(a), Some(b)) => vec_diff(a, b),
                (Some(a), None) | (None, Some(a)) => a.iter().map(|z| z.norm()).fold(0.0, f64::max),
                (None, None) => 0.0,
            };
            worst = worst.max(d);
        }
        worst
    }
}

impl FellBundle {
    pub fn section(&self, values: BTreeMap<Elem, Vector>) -> Result<Section> {
        for (t, v) in &values {
            self.check_fiber(t, v)?;
        }
        Ok(Section { bundle: self.id, values })
    }

    pub fn zero_section(&self) -> Section {
        Section { bundle: self.id, values: BTreeMap::new() }
    }

    /// `b δ_t`.
    pub fn delta(&self, t: &Elem, b: Vector) -> Result<Section> {
        self.section([(t.clone(), b)].into_iter().collect())
    }

    pub fn random_section<R: Rng + ?Sized>(&self, support: &[Elem], rng: &mut R) -> Section {
        let values = support.iter().map(|t| (t.clone(), self.random_fiber(t, rng))).collect();
        Section { bundle: self.id, values }
    }

    fn owns(&self, f: &Section) -> Result<()> {
        if f.bundle != self.id {
            return Err(Error::BundleMismatch);
        }
        Ok(())
    }

    /// `⟨f, g⟩ = Σ_t f(t)* g(t) ∈ B_e`.
    pub fn l2_inner(&self, f: &Section, g: &Section) -> Result<FdElement> {
        self.owns(f)?;
        self.owns(g)?;
        let mut acc = FdElement::zero(&self.unit);
        for (t, a) in &f.values {
            if let Some(b) = g.values.get(t) {
                let tinv = self.ctx.inverse(t);
                acc.add_assign(&self.to_unit(&self.mul(&tinv, &self.star(t, a), t, b)));
            }
        }
        Ok(acc)
    }

    /// `(f * g)(t) = Σ_s f(s) g(s⁻¹t)`.
    pub fn l1_conv(&self, f: &Section, g: &Section) -> Result<Section> {
        self.owns(f)?;
        self.owns(g)?;
        let mut values: BTreeMap<Elem, Vector> = BTreeMap::new();
        for (s, a) in &f.values {
            for (u, b) in &g.values {
                let t = self.ctx.op(s, u);
                let p = self.mul(s, a, u, b);
                values.entry(t).and_modify(|x| *x += &p).or_insert(p);
            }
        }
        Ok(Section { bundle: self.id, values })
    }

    /// `f*(t) = f(t⁻¹)*`.
    pub fn sec_star(&self, f: &Section) -> Result<Section> {
        self.owns(f)?;
        let values = f.values.iter().map(|(t, a)| (self.ctx.inverse(t), self.star(t, a))).collect();
        Ok(Section { bundle: self.id, values })
    }

    /// `(Λ_b g)(s) = b g(t⁻¹s)` for `b ∈ B_t`.
    pub fn regular_rep(&self, t: &Elem, b: &Vector, g: &Section) -> Result<Section> {
        self.check_fiber(t, b)?;
        self.l1_conv(&self.delta(t, b.clone())?, g)
    }

    /// `E(f) = f(e)`.
    pub fn canonical_expectation(&self, f: &Section) -> Result<FdElement> {
        self.owns(f)?;
        Ok(match f.values.get(&self.ctx.id()) {
            Some(v) => self.to_unit(v),
            None => FdElement::zero(&self.unit),
        })
    }

    /// Pointwise `a · f · b` for `a, b ∈ B_e`.
    pub fn unit_bimodule(&self, a: &FdElement, f: &Section, b: &FdElement) -> Result<Section> {
        self.owns(f)?;
        let values = f
            .values
            .iter()
            .map(|(t, v)| (t.clone(), self.unit_right(t, &self.unit_left(a, t, v), b)))
            .collect();
        Ok(Section { bundle: self.id, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdalg::{CPartialAction, FdAlgebra};
    use crate::group::GroupCtx;
    use crate::linalg::{self, Mat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn semidirect_s3() -> FellBundle {
        let ctx = GroupCtx::symmetric(3).unwrap();
        FellBundle::make_semidirect(CPartialAction::trivial(ctx, FdAlgebra::new(vec![1, 2]).unwrap()), 0).unwrap()
    }

    #[test]
    fn regular_rep_of_z3_generator_is_the_cyclic_shift() {
        let b = FellBundle::group_bundle(GroupCtx::cyclic(3).unwrap(), FdAlgebra::commutative(1));
        let one = Vector::from_vec(vec![linalg::ONE]);
        let mut m = Mat::zeros(3, 3);
        for col in 0..3 {
            let g = b.delta(&Elem::Finite(col), one.clone()).unwrap();
            let out = b.regular_rep(&Elem::Finite(1), &one, &g).unwrap();
            for (t, v) in out.values() {
                if let Elem::Finite(row) = t {
                    m[(*row, col)] = v[0];
                }
            }
        }
        let shift = Mat::from_fn(3, 3, |r, c| if r == (c + 1) % 3 { linalg::ONE } else { linalg::ZERO });
        assert_eq!(m, shift);
    }

    #[test]
    fn convolution_star_and_inner_product_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ctx = GroupCtx::cyclic(4).unwrap();
        let b = FellBundle::group_bundle(ctx.clone(), FdAlgebra::new(vec![2, 1]).unwrap());
        let all = ctx.ball(0);
        for _ in 0..20 {
            let f = b.random_section(&all[..3], &mut rng);
            let g = b.random_section(&all[1..], &mut rng);
            let lhs = b.sec_star(&b.l1_conv(&f, &g).unwrap()).unwrap();
            let rhs = b.l1_conv(&b.sec_star(&g).unwrap(), &b.sec_star(&f).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
            assert!(b.l2_inner(&f, &f).unwrap().positivity_defect() < 1e-10);
            // E(f* * f) = ⟨f, f⟩
            let e = b.canonical_expectation(&b.l1_conv(&b.sec_star(&f).unwrap(), &f).unwrap()).unwrap();
            assert!(e.max_abs_diff(&b.l2_inner(&f, &f).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn delta_sections_multiply_fiberwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = semidirect_s3();
        let e = b.ctx().id();
        let x = b.random_fiber(&e, &mut rng);
        let y = b.random_fiber(&e, &mut rng);
        let conv = b.l1_conv(&b.delta(&e, x.clone()).unwrap(), &b.delta(&e, y.clone()).unwrap()).unwrap();
        assert!(vec_diff(conv.get(&e).unwrap(), &b.mul(&e, &x, &e, &y)) < 1e-14);
        assert_eq!(conv.values().len(), 1);
    }

    #[test]
    fn expectation_is_bimodular_and_kills_off_diagonal_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = GroupCtx::cyclic(3).unwrap();
        let b = FellBundle::group_bundle(ctx.clone(), FdAlgebra::new(vec![2]).unwrap());
        let off = b.random_section(&[Elem::Finite(1), Elem::Finite(2)], &mut rng);
        assert!(b.canonical_expectation(&off).unwrap().max_abs() == 0.0);
        let f = b.random_section(&ctx.ball(0), &mut rng);
        let x = b.unit_algebra().random_element(&mut rng);
        let y = b.unit_algebra().random_element(&mut rng);
        let lhs = b.canonical_expectation(&b.unit_bimodule(&x, &f, &y).unwrap()).unwrap();
        let rhs = x.mul(&b.canonical_expectation(&f).unwrap()).mul(&y);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let unit = b.delta(&ctx.id(), b.from_unit(&FdElement::identity(b.unit_algebra()))).unwrap();
        assert!(b.l1_conv(&unit, &f).unwrap().max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn sections_of_different_bundles_do_not_mix() {
        let a = semidirect_s3();
        let b = semidirect_s3();
        assert!(matches!(a.l2_inner(&a.zero_section(), &b.zero_section()), Err(Error::BundleMismatch)));
    }
}
