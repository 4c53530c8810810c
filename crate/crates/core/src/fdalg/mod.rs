//! Finite-dimensional C*-algebras `M_{d_1} ⊕ ... ⊕ M_{d_m}`, their ideals and the
//! *-isomorphisms between ideals.
//!
//! Every closed two-sided ideal of such an algebra is a sum of full blocks, and every
//! *-isomorphism between two ideals is a block bijection composed with unitary
//! conjugations. Both facts are used as the storage format, so units of ideals and
//! compositions of isomorphisms are exact.

mod action;
mod globalize;

pub use action::{ActionData, CPartialAction};
pub use globalize::{globalize_finite, orbit_span_rank, BlockEmbedding, Globalization};

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector, C64, ONE};

/// Block dimensions `[d_1, ..., d_m]`; the empty list is the zero algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FdAlgebra {
    blocks: Vec<usize>,
}

impl FdAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("block dimensions must be positive".into()));
        }
        Ok(Self { blocks })
    }

    /// `C^m`.
    pub fn commutative(m: usize) -> Self {
        Self { blocks: vec![1; m] }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dim(&self, j: usize) -> usize {
        self.blocks[j]
    }

    /// Complex dimension `Σ d_j²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|d| d * d).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&d| d == 1)
    }

    pub fn full_ideal(&self) -> Ideal {
        Ideal::new((0..self.blocks.len()).collect())
    }

    /// Complex dimension of an ideal.
    pub fn ideal_dim(&self, ideal: &Ideal) -> usize {
        ideal.blocks().iter().map(|&j| self.blocks[j] * self.blocks[j]).sum()
    }

    pub fn contains_ideal(&self, ideal: &Ideal) -> bool {
        ideal.blocks().iter().all(|&j| j < self.blocks.len())
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn op_norm(&self, x: &FdElement) -> Result<f64> {
        self.check(x)?;
        Ok(x.norm())
    }

    pub fn check(&self, x: &FdElement) -> Result<()> {
        if x.shape_matches(self) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("element with blocks {:?} in algebra {:?}", x.dims(), self.blocks)))
        }
    }

    /// The block-unit projections; they span the center.
    pub fn center_basis(&self) -> Vec<FdElement> {
        (0..self.blocks.len()).map(|j| FdElement::block_unit(self, j)).collect()
    }

    /// The commutative algebra `Z(A) ≅ C^m`.
    pub fn center(&self) -> FdAlgebra {
        FdAlgebra::commutative(self.blocks.len())
    }

    /// Matrix-unit basis of an ideal, in flattening order.
    pub fn ideal_basis(&self, ideal: &Ideal) -> Vec<FdElement> {
        let mut out = Vec::new();
        for &j in ideal.blocks() {
            let d = self.blocks[j];
            for r in 0..d {
                for c in 0..d {
                    let mut x = FdElement::zero(self);
                    x.blocks[j][(r, c)] = ONE;
                    out.push(x);
                }
            }
        }
        out
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FdElement {
        FdElement { blocks: self.blocks.iter().map(|&d| linalg::random_matrix(d, d, rng)).collect() }
    }

    pub fn random_in_ideal<R: Rng + ?Sized>(&self, ideal: &Ideal, rng: &mut R) -> FdElement {
        self.random_element(rng).cut(ideal)
    }

    /// A random unitary of the ideal (zero outside it).
    pub fn random_unitary_in<R: Rng + ?Sized>(&self, ideal: &Ideal, rng: &mut R) -> FdElement {
        let mut x = FdElement::zero(self);
        for &j in ideal.blocks() {
            x.blocks[j] = linalg::random_unitary(self.blocks[j], rng);
        }
        x
    }
}

impl fmt::Display for FdAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.blocks.iter().map(|&d| if d == 1 { "C".to_string() } else { format!("M{d}") }).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// One complex matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct FdElement {
    blocks: Vec<Mat>,
}

impl FdElement {
    pub fn zero(alg: &FdAlgebra) -> Self {
        Self { blocks: alg.blocks.iter().map(|&d| Mat::zeros(d, d)).collect() }
    }

    pub fn identity(alg: &FdAlgebra) -> Self {
        Self { blocks: alg.blocks.iter().map(|&d| Mat::identity(d, d)).collect() }
    }

    /// Unit `1_I` of an ideal.
    pub fn unit_of(alg: &FdAlgebra, ideal: &Ideal) -> Self {
        Self::identity(alg).cut(ideal)
    }

    pub fn block_unit(alg: &FdAlgebra, j: usize) -> Self {
        let mut x = Self::zero(alg);
        let d = alg.blocks[j];
        x.blocks[j] = Mat::identity(d, d);
        x
    }

    pub fn from_blocks(alg: &FdAlgebra, blocks: Vec<Mat>) -> Result<Self> {
        let x = Self { blocks };
        alg.check(&x)?;
        Ok(x)
    }

    pub fn scalar(alg: &FdAlgebra, z: C64) -> Self {
        Self::identity(alg).scale(z)
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &Mat {
        &self.blocks[j]
    }

    pub fn block_mut(&mut self, j: usize) -> &mut Mat {
        &mut self.blocks[j]
    }

    fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    fn shape_matches(&self, alg: &FdAlgebra) -> bool {
        self.blocks.len() == alg.blocks.len()
            && self.blocks.iter().zip(&alg.blocks).all(|(b, &d)| b.nrows() == d && b.ncols() == d)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect() }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b;
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { blocks: self.blocks.iter().map(|a| a * z).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self { blocks: self.blocks.iter().map(|a| a.adjoint()).collect() }
    }

    /// C*-norm (largest singular value over blocks).
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.blocks.len() != other.blocks.len() {
            return f64::INFINITY;
        }
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| linalg::max_abs_diff(a, b)).fold(0.0, f64::max)
    }

    /// Zeroes every block outside the ideal (multiplication by its unit).
    pub fn cut(&self, ideal: &Ideal) -> Self {
        let mut out = self.clone();
        for (j, b) in out.blocks.iter_mut().enumerate() {
            if !ideal.contains(j) {
                b.fill(C64::new(0.0, 0.0));
            }
        }
        out
    }

    /// Largest entry outside the ideal.
    pub fn leakage(&self, ideal: &Ideal) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(j, _)| !ideal.contains(*j))
            .map(|(_, b)| linalg::max_abs(b))
            .fold(0.0, f64::max)
    }

    pub fn in_ideal(&self, ideal: &Ideal, tol: f64) -> bool {
        self.leakage(ideal) <= tol
    }

    /// Coordinates on the blocks of `ideal`, block-major and row-major within a block.
    pub fn flatten_on(&self, ideal: &Ideal) -> Vector {
        let mut out = Vec::new();
        for &j in ideal.blocks() {
            let b = &self.blocks[j];
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    out.push(b[(r, c)]);
                }
            }
        }
        Vector::from_vec(out)
    }

    /// Inverse of [`FdElement::flatten_on`].
    pub fn from_flat(alg: &FdAlgebra, ideal: &Ideal, v: &Vector) -> Result<Self> {
        let expected = alg.ideal_dim(ideal);
        if v.len() != expected {
            return Err(Error::ShapeMismatch(format!("flat vector of length {} for ideal of dim {expected}", v.len())));
        }
        let mut x = Self::zero(alg);
        let mut k = 0;
        for &j in ideal.blocks() {
            let d = alg.blocks[j];
            for r in 0..d {
                for c in 0..d {
                    x.blocks[j][(r, c)] = v[k];
                    k += 1;
                }
            }
        }
        Ok(x)
    }

    /// Hermitian and positive semidefinite in every block, up to `tol`.
    pub fn positivity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let herm = linalg::max_abs_diff(b, &b.adjoint());
                let neg = (-linalg::min_eigenvalue_hermitian(b)).max(0.0);
                herm.max(neg)
            })
            .fold(0.0, f64::max)
    }
}

/// An ideal, stored as the sorted set of blocks it contains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ideal {
    blocks: Vec<usize>,
}

impl Ideal {
    pub fn new(mut blocks: Vec<usize>) -> Self {
        blocks.sort_unstable();
        blocks.dedup();
        Self { blocks }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.blocks.binary_search(&j).is_ok()
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self { blocks: self.blocks.iter().copied().filter(|&j| other.contains(j)).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.blocks.iter().chain(&other.blocks).copied().collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.blocks.iter().all(|&j| other.contains(j))
    }

    /// Position of each block of `self` inside `outer` (used to re-index into `outer`
    /// viewed as an algebra of its own).
    pub fn reindex_within(&self, outer: &Self) -> Option<Self> {
        self.blocks.iter().map(|j| outer.blocks.binary_search(j).ok()).collect::<Option<Vec<_>>>().map(Self::new)
    }

    /// The subalgebra `J` as an algebra of its own.
    pub fn as_algebra(&self, alg: &FdAlgebra) -> FdAlgebra {
        FdAlgebra { blocks: self.blocks.iter().map(|&j| alg.blocks[j]).collect() }
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|j| j.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A *-isomorphism between ideals: `a_j ↦ U_j a_j U_j*` placed in block `φ(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealIso {
    source: Ideal,
    target: Ideal,
    /// `(j, φ(j), U_j)` sorted by `j`.
    map: Vec<(usize, usize, Mat)>,
}

impl IdealIso {
    pub fn new(alg: &FdAlgebra, mut map: Vec<(usize, usize, Mat)>) -> Result<Self> {
        map.sort_by_key(|m| m.0);
        let source = Ideal::new(map.iter().map(|m| m.0).collect());
        let target = Ideal::new(map.iter().map(|m| m.1).collect());
        if source.blocks.len() != map.len() || target.blocks.len() != map.len() {
            return Err(Error::InvalidArgument("block map is not a bijection".into()));
        }
        for (j, k, u) in &map {
            if *j >= alg.block_count() || *k >= alg.block_count() {
                return Err(Error::ShapeMismatch(format!("block {j}->{k} outside algebra {alg}")));
            }
            let d = alg.block_dim(*j);
            if alg.block_dim(*k) != d || u.nrows() != d || u.ncols() != d {
                return Err(Error::ShapeMismatch(format!("block {j}->{k} has incompatible dimensions")));
            }
            if linalg::unitarity_defect(u) > 1e-9 {
                return Err(Error::InvalidArgument(format!("matrix for block {j} is not unitary")));
            }
        }
        Ok(Self { source, target, map })
    }

    pub fn identity_on(alg: &FdAlgebra, ideal: &Ideal) -> Self {
        let map = ideal.blocks().iter().map(|&j| (j, j, Mat::identity(alg.block_dim(j), alg.block_dim(j)))).collect();
        Self { source: ideal.clone(), target: ideal.clone(), map }
    }

    pub fn zero() -> Self {
        Self { source: Ideal::zero(), target: Ideal::zero(), map: Vec::new() }
    }

    pub fn source(&self) -> &Ideal {
        &self.source
    }

    pub fn target(&self) -> &Ideal {
        &self.target
    }

    pub fn entries(&self) -> &[(usize, usize, Mat)] {
        &self.map
    }

    pub fn block_image(&self, j: usize) -> Option<usize> {
        self.map.iter().find(|m| m.0 == j).map(|m| m.1)
    }

    pub fn unitary(&self, j: usize) -> Option<&Mat> {
        self.map.iter().find(|m| m.0 == j).map(|m| &m.2)
    }

    /// Image of `x`; components of `x` outside the source are ignored.
    pub fn apply(&self, x: &FdElement) -> FdElement {
        let mut out = FdElement { blocks: x.blocks.iter().map(|b| Mat::zeros(b.nrows(), b.ncols())).collect() };
        for (j, k, u) in &self.map {
            out.blocks[*k] = u * &x.blocks[*j] * u.adjoint();
        }
        out
    }

    /// Image of `x`, rejecting elements not supported in the source.
    pub fn apply_checked(&self, x: &FdElement, tol: f64) -> Result<FdElement> {
        let leak = x.leakage(&self.source);
        if leak > tol {
            return Err(Error::DomainViolation(format!("element leaks {leak:.3e} outside {}", self.source)));
        }
        Ok(self.apply(x))
    }

    pub fn inverse(&self) -> Self {
        let mut map: Vec<_> = self.map.iter().map(|(j, k, u)| (*k, *j, u.adjoint())).collect();
        map.sort_by_key(|m| m.0);
        Self { source: self.target.clone(), target: self.source.clone(), map }
    }

    /// `self ∘ other`, defined on `other⁻¹(target(other) ∩ source(self))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut map = Vec::new();
        for (j, k, u) in &other.map {
            if let Some((_, l, v)) = self.map.iter().find(|m| m.0 == *k) {
                map.push((*j, *l, v * u));
            }
        }
        let source = Ideal::new(map.iter().map(|m| m.0).collect());
        let target = Ideal::new(map.iter().map(|m| m.1).collect());
        Self { source, target, map }
    }

    /// Restriction to `source ∩ ideal`.
    pub fn restrict_source(&self, ideal: &Ideal) -> Self {
        let map: Vec<_> = self.map.iter().filter(|m| ideal.contains(m.0)).cloned().collect();
        let source = Ideal::new(map.iter().map(|m| m.0).collect());
        let target = Ideal::new(map.iter().map(|m| m.1).collect());
        Self { source, target, map }
    }

    /// Conjugation-level distance: `None` if the block maps differ, else the worst
    /// phase-invariant unitary mismatch.
    pub fn distance(&self, other: &Self) -> Option<f64> {
        if self.map.len() != other.map.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for ((j, k, u), (j2, k2, v)) in self.map.iter().zip(&other.map) {
            if j != j2 || k != k2 {
                return None;
            }
            worst = worst.max(linalg::phase_distance(u, v));
        }
        Some(worst)
    }

    /// Same block map and conjugations as the identity on its source.
    pub fn is_identity(&self, tol: f64) -> bool {
        self.map.iter().all(|(j, k, u)| j == k && linalg::phase_distance(u, &Mat::identity(u.nrows(), u.ncols())) <= tol)
    }

    /// The same map re-indexed into a sub-algebra `J` (both ideals must lie in `J`).
    pub fn reindex_within(&self, outer: &Ideal) -> Option<Self> {
        let pos = |j: &usize| outer.blocks().binary_search(j).ok();
        let map: Option<Vec<_>> = self.map.iter().map(|(j, k, u)| Some((pos(j)?, pos(k)?, u.clone()))).collect();
        let map = map?;
        Some(Self {
            source: Ideal::new(map.iter().map(|m| m.0).collect()),
            target: Ideal::new(map.iter().map(|m| m.1).collect()),
            map,
        })
    }

    /// Post-composition with `Ad(u)` for a unitary `u` of the target ideal.
    pub fn conjugated_by(&self, u: &FdElement) -> Self {
        let map = self.map.iter().map(|(j, k, v)| (*j, *k, u.block(*k) * v)).collect();
        Self { source: self.source.clone(), target: self.target.clone(), map }
    }

    /// The induced map on centers: block permutation with trivial unitaries.
    pub fn on_center(&self) -> Self {
        let one = Mat::identity(1, 1);
        let map = self.map.iter().map(|(j, k, _)| (*j, *k, one.clone())).collect();
        Self { source: self.source.clone(), target: self.target.clone(), map }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn op_norm_examples() {
        let alg = FdAlgebra::new(vec![1, 2]).unwrap();
        assert!((alg.op_norm(&FdElement::identity(&alg)).unwrap() - 1.0).abs() < 1e-12);
        let single = FdAlgebra::new(vec![2]).unwrap();
        let mut x = FdElement::zero(&single);
        x.block_mut(0)[(0, 0)] = C64::new(3.0, 0.0);
        x.block_mut(0)[(1, 1)] = C64::new(-4.0, 0.0);
        assert!((single.op_norm(&x).unwrap() - 4.0).abs() < 1e-12);
        assert!(single.op_norm(&FdElement::identity(&alg)).is_err());
    }

    #[test]
    fn c_star_identity_and_submultiplicativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for alg in [FdAlgebra::new(vec![1, 2]).unwrap(), FdAlgebra::new(vec![3]).unwrap(), FdAlgebra::commutative(3)] {
            for _ in 0..1000 {
                let x = alg.random_element(&mut rng);
                let y = alg.random_element(&mut rng);
                let n = x.norm();
                assert!((x.adjoint().mul(&x).norm() - n * n).abs() <= 1e-10 * (1.0 + n * n));
                assert!(x.mul(&y).norm() <= n * y.norm() + 1e-10);
            }
        }
    }

    #[test]
    fn center_basis_examples() {
        assert_eq!(FdAlgebra::commutative(3).center_basis().len(), 3);
        let m2 = FdAlgebra::new(vec![2]).unwrap();
        let basis = m2.center_basis();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], FdElement::identity(&m2));
        assert_eq!(FdAlgebra::new(vec![1, 2]).unwrap().center_basis().len(), 2);
    }

    #[test]
    fn iso_composition_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let alg = FdAlgebra::new(vec![2, 2, 1]).unwrap();
        let u = linalg::random_unitary(2, &mut rng);
        let v = linalg::random_unitary(2, &mut rng);
        let f = IdealIso::new(&alg, vec![(0, 1, u)]).unwrap();
        let g = IdealIso::new(&alg, vec![(1, 0, v)]).unwrap();
        let x = alg.random_in_ideal(&Ideal::new(vec![0]), &mut rng);
        let gf = g.compose(&f);
        assert!(gf.apply(&x).max_abs_diff(&g.apply(&f.apply(&x))) < 1e-12);
        assert!(f.inverse().apply(&f.apply(&x)).max_abs_diff(&x) < 1e-12);
        // *-homomorphism on samples
        let y = alg.random_in_ideal(&Ideal::new(vec![0]), &mut rng);
        assert!(f.apply(&x.mul(&y)).max_abs_diff(&f.apply(&x).mul(&f.apply(&y))) < 1e-12);
        assert!(f.apply(&x.adjoint()).max_abs_diff(&f.apply(&x).adjoint()) < 1e-12);
        assert!(f.apply_checked(&FdElement::identity(&alg), 1e-12).is_err());
    }

    #[test]
    fn iso_rejects_dimension_mismatch() {
        let alg = FdAlgebra::new(vec![2, 1]).unwrap();
        assert!(IdealIso::new(&alg, vec![(0, 1, Mat::identity(2, 2))]).is_err());
    }

    #[test]
    fn flatten_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let alg = FdAlgebra::new(vec![1, 2, 3]).unwrap();
        let ideal = Ideal::new(vec![0, 2]);
        let x = alg.random_in_ideal(&ideal, &mut rng);
        let v = x.flatten_on(&ideal);
        assert_eq!(v.len(), 10);
        assert_eq!(FdElement::from_flat(&alg, &ideal, &v).unwrap(), x);
    }
}
