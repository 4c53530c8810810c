//! Kernels `k(s,t) ∈ B_{st⁻¹}` with finite support, the matrix algebras `M_F(B)` and the
//! canonical action `β_t(k)(r,s) = k(rt, st)`.
//!
//! The product is `h*k(r,s) = Σ_t k(r,t) h(t,s)`, so the representation
//! `π(k)f(s) = Σ_t k(s,t) f(t)` on sections reverses products: `π(h*k) = π(k)π(h)`, and
//! `(h*k)* = k* * h*`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fdalg::FdElement;
use crate::fellbundle::{FellBundle, Section};
use crate::group::Elem;
use crate::linalg::{self, Mat, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    bundle: u64,
    entries: BTreeMap<(Elem, Elem), Vector>,
}

impl Kernel {
    pub fn bundle_id(&self) -> u64 {
        self.bundle
    }

    pub fn entries(&self) -> &BTreeMap<(Elem, Elem), Vector> {
        &self.entries
    }

    pub fn get(&self, s: &Elem, t: &Elem) -> Option<&Vector> {
        self.entries.get(&(s.clone(), t.clone()))
    }

    /// Largest coordinate difference, missing entries read as zero.
    pub fn max_abs_diff(&self, other: &Kernel) -> f64 {
        if self.bundle != other.bundle {
            return f64::INFINITY;
        }
        let keys: BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|k| match (self.entries.get(k), other.entries.get(k)) {
                (Some(a), Some(b)) => linalg::vec_max_abs(&(a - b)),
                (Some(a), None) | (None, Some(a)) => linalg::vec_max_abs(a),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Rows and columns met by the support.
    pub fn support_elements(&self) -> BTreeSet<Elem> {
        self.entries.keys().flat_map(|(s, t)| [s.clone(), t.clone()]).collect()
    }

    pub fn is_supported_in(&self, window: &WindowF) -> bool {
        self.entries.keys().all(|(s, t)| window.contains(s) && window.contains(t))
    }

    /// `1_F k 1_F`.
    pub fn compress(&self, window: &WindowF) -> Kernel {
        let entries = self
            .entries
            .iter()
            .filter(|((s, t), _)| window.contains(s) && window.contains(t))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Kernel { bundle: self.bundle, entries }
    }
}

/// Ordered finite set `F = {t_1, ..., t_n}` of distinct group elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowF {
    elems: Vec<Elem>,
}

impl WindowF {
    pub fn new(elems: Vec<Elem>) -> Result<Self> {
        let distinct: BTreeSet<&Elem> = elems.iter().collect();
        if distinct.len() != elems.len() {
            return Err(Error::InvalidArgument("window has repeated elements".into()));
        }
        Ok(Self { elems })
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, t: &Elem) -> bool {
        self.elems.contains(t)
    }

    pub fn position(&self, t: &Elem) -> Option<usize> {
        self.elems.iter().position(|x| x == t)
    }
}

fn owns(b: &FellBundle, k: &Kernel) -> Result<()> {
    if b.id() != k.bundle {
        return Err(Error::BundleMismatch);
    }
    Ok(())
}

fn entry_fiber(b: &FellBundle, s: &Elem, t: &Elem) -> Elem {
    b.ctx().op(s, &b.ctx().inverse(t))
}

pub fn kernel(b: &FellBundle, entries: BTreeMap<(Elem, Elem), Vector>) -> Result<Kernel> {
    for ((s, t), v) in &entries {
        b.ctx().check(t)?;
        b.check_fiber(&entry_fiber(b, s, t), v)?;
    }
    Ok(Kernel { bundle: b.id(), entries })
}

pub fn zero_kernel(b: &FellBundle) -> Kernel {
    Kernel { bundle: b.id(), entries: BTreeMap::new() }
}

/// A single entry `x` at `(s, t)`, with `x ∈ B_{st⁻¹}`.
pub fn single_entry(b: &FellBundle, s: &Elem, t: &Elem, x: Vector) -> Result<Kernel> {
    kernel(b, [((s.clone(), t.clone()), x)].into_iter().collect())
}

/// The unit of `B_e` on the diagonal of `F`.
pub fn diagonal_unit(b: &FellBundle, window: &WindowF) -> Kernel {
    let one = b.from_unit(&FdElement::identity(b.unit_algebra()));
    let entries = window.elems().iter().map(|t| ((t.clone(), t.clone()), one.clone())).collect();
    Kernel { bundle: b.id(), entries }
}

/// Random entries on a random fraction `density` of `F × F`.
pub fn random_kernel<R: Rng + ?Sized>(b: &FellBundle, window: &WindowF, density: f64, rng: &mut R) -> Kernel {
    let mut entries = BTreeMap::new();
    for s in window.elems() {
        for t in window.elems() {
            if rng.gen_bool(density) {
                entries.insert((s.clone(), t.clone()), b.random_fiber(&entry_fiber(b, s, t), rng));
            }
        }
    }
    Kernel { bundle: b.id(), entries }
}

/// `(h*k)(r,s) = Σ_t k(r,t) h(t,s)`.
pub fn k_mul(b: &FellBundle, h: &Kernel, k: &Kernel) -> Result<Kernel> {
    owns(b, h)?;
    owns(b, k)?;
    let mut by_row: BTreeMap<&Elem, Vec<(&Elem, &Vector)>> = BTreeMap::new();
    for ((t, s), v) in &h.entries {
        by_row.entry(t).or_default().push((s, v));
    }
    let mut entries: BTreeMap<(Elem, Elem), Vector> = BTreeMap::new();
    for ((r, t), x) in &k.entries {
        let Some(row) = by_row.get(t) else { continue };
        let rt = entry_fiber(b, r, t);
        for (s, y) in row {
            let p = b.mul(&rt, x, &entry_fiber(b, t, s), y);
            entries.entry((r.clone(), (*s).clone())).and_modify(|acc| *acc += &p).or_insert(p);
        }
    }
    Ok(Kernel { bundle: b.id(), entries })
}

/// `k*(r,s) = k(s,r)*`.
pub fn k_star(b: &FellBundle, k: &Kernel) -> Result<Kernel> {
    owns(b, k)?;
    let entries = k
        .entries
        .iter()
        .map(|((s, r), v)| ((r.clone(), s.clone()), b.star(&entry_fiber(b, s, r), v)))
        .collect();
    Ok(Kernel { bundle: b.id(), entries })
}

/// `‖k‖₂ = (Σ ‖k(s,t)‖²)^{1/2}`.
pub fn norm2(b: &FellBundle, k: &Kernel) -> Result<f64> {
    owns(b, k)?;
    Ok(k.entries
        .iter()
        .map(|((s, t), v)| b.norm_unchecked(&entry_fiber(b, s, t), v).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// `β_t(k)(r,s) = k(rt, st)`.
pub fn beta_act(b: &FellBundle, t: &Elem, k: &Kernel) -> Result<Kernel> {
    owns(b, k)?;
    b.ctx().check(t)?;
    let tinv = b.ctx().inverse(t);
    let entries = k
        .entries
        .iter()
        .map(|((x, y), v)| ((b.ctx().op(x, &tinv), b.ctx().op(y, &tinv)), v.clone()))
        .collect();
    Ok(Kernel { bundle: b.id(), entries })
}

/// `k_{ξ,η}(s,t) = ξ(s) η(t)*`.
pub fn rank_one(b: &FellBundle, xi: &Section, eta: &Section) -> Result<Kernel> {
    if xi.bundle_id() != b.id() || eta.bundle_id() != b.id() {
        return Err(Error::BundleMismatch);
    }
    let mut entries = BTreeMap::new();
    for (s, x) in xi.values() {
        for (t, y) in eta.values() {
            let tinv = b.ctx().inverse(t);
            entries.insert((s.clone(), t.clone()), b.mul(s, x, &tinv, &b.star(t, y)));
        }
    }
    Ok(Kernel { bundle: b.id(), entries })
}

/// `π(k)f(s) = Σ_t k(s,t) f(t)`.
pub fn pi_apply(b: &FellBundle, k: &Kernel, f: &Section) -> Result<Section> {
    owns(b, k)?;
    if f.bundle_id() != b.id() {
        return Err(Error::BundleMismatch);
    }
    let mut values: BTreeMap<Elem, Vector> = BTreeMap::new();
    for ((s, t), x) in &k.entries {
        if let Some(y) = f.get(t) {
            let p = b.mul(&entry_fiber(b, s, t), x, t, y);
            values.entry(s.clone()).and_modify(|acc| *acc += &p).or_insert(p);
        }
    }
    b.section(values)
}

/// `k` as an `n × n` matrix over fibers, entry `(i,j)` in `B_{t_i t_j⁻¹}` (zero vectors
/// where `k` vanishes).
pub fn to_mf(b: &FellBundle, k: &Kernel, window: &WindowF) -> Result<Vec<Vec<Vector>>> {
    owns(b, k)?;
    if !k.is_supported_in(window) {
        return Err(Error::OutsideWindow(format!("support meets {} rows/cols outside F", k.support_elements().len())));
    }
    Ok(window
        .elems()
        .iter()
        .map(|s| {
            window
                .elems()
                .iter()
                .map(|t| k.get(s, t).cloned().unwrap_or_else(|| Vector::zeros(b.fiber_dim(&entry_fiber(b, s, t)))))
                .collect()
        })
        .collect())
}

/// `dim M_F(B) = Σ_{i,j} dim B_{t_i t_j⁻¹}`.
pub fn mf_dim(b: &FellBundle, window: &WindowF) -> usize {
    let w = window.elems();
    w.iter().flat_map(|s| w.iter().map(move |t| (s, t))).map(|(s, t)| b.fiber_dim(&entry_fiber(b, s, t))).sum()
}

/// Operator norm of `π(k)` on sections supported in `F`, completed to a Hilbert space
/// through the block representation of `B_e`.
///
/// The vectors `e_α ⊗ h_{j,r}` (fiber basis vector times standard basis vector of block
/// `j`) span the space; their Gram matrix splits over `j` with entries
/// `(e_α* e_α')_j[r, r']`. The norm is computed on the range of the Gram matrix.
pub fn mf_embed_norm(b: &FellBundle, k: &Kernel, window: &WindowF) -> Result<f64> {
    to_mf(b, k, window)?;
    let ctx = b.ctx();
    // (element, basis index) pairs spanning ℓ²(B)|_F
    let mut span: Vec<(usize, usize)> = Vec::new();
    for (i, s) in window.elems().iter().enumerate() {
        for a in 0..b.fiber_dim(s) {
            span.push((i, a));
        }
    }
    let n = span.len();
    if n == 0 {
        return Ok(0.0);
    }
    let offset: Vec<usize> = {
        let mut acc = 0;
        window
            .elems()
            .iter()
            .map(|s| {
                let o = acc;
                acc += b.fiber_dim(s);
                o
            })
            .collect()
    };

    // π(k) on fiber coordinates: column (t, α') holds the coordinates of π(k) e_{t,α'}.
    let mut m = Mat::zeros(n, n);
    for (col, &(j, a)) in span.iter().enumerate() {
        let t = &window.elems()[j];
        let e = crate::fellbundle::basis_vector(b.fiber_dim(t), a);
        for (i, s) in window.elems().iter().enumerate() {
            if let Some(x) = k.get(s, t) {
                let v = b.mul(&entry_fiber(b, s, t), x, t, &e);
                for (c, z) in v.iter().enumerate() {
                    m[(offset[i] + c, col)] += *z;
                }
            }
        }
    }

    // Inner products ⟨e_α, e_α'⟩ ∈ B_e (zero across different elements).
    let mut gram_blocks: Vec<Vec<Vec<FdElement>>> = Vec::new();
    for s in window.elems() {
        let d = b.fiber_dim(s);
        let sinv = ctx.inverse(s);
        let basis = b.fiber_basis(s);
        let stars: Vec<Vector> = basis.iter().map(|x| b.star(s, x)).collect();
        let mut rows = Vec::with_capacity(d);
        for x in &stars {
            rows.push(basis.iter().map(|y| b.to_unit(&b.mul(&sinv, x, s, y))).collect());
        }
        gram_blocks.push(rows);
    }

    let mut best: f64 = 0.0;
    for (j, &dj) in b.unit_algebra().blocks().iter().enumerate() {
        let size = n * dj;
        let idx = |p: usize, r: usize| p * dj + r;
        let mut g = Mat::zeros(size, size);
        for (p, &(i, a)) in span.iter().enumerate() {
            for (q, &(i2, a2)) in span.iter().enumerate() {
                if i != i2 {
                    continue;
                }
                let blk = gram_blocks[i][a][a2].block(j);
                for r in 0..dj {
                    for c in 0..dj {
                        g[(idx(p, r), idx(q, c))] = blk[(r, c)];
                    }
                }
            }
        }
        let t = Mat::from_fn(size, size, |row, col| {
            if row % dj == col % dj {
                m[(row / dj, col / dj)]
            } else {
                linalg::ZERO
            }
        });
        let eig = linalg::hermitian_part(&g).symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        if top <= 0.0 {
            continue;
        }
        let keep: Vec<usize> = (0..size).filter(|&i| eig.eigenvalues[i] > 1e-12 * top.max(1.0)).collect();
        let p = Mat::from_fn(size, keep.len(), |row, c| {
            let i = keep[c];
            eig.eigenvectors[(row, i)] / eig.eigenvalues[i].sqrt()
        });
        let h = p.adjoint() * t.adjoint() * &g * &t * &p;
        best = best.max(linalg::max_eigenvalue_hermitian(&linalg::hermitian_part(&h)).max(0.0));
    }
    Ok(best.sqrt())
}

/// A sub-bundle `N ⊆ B` with fiberwise idempotents `P_g: B_g → N_g`.
#[derive(Clone, Debug)]
pub enum SubBundle {
    /// `N = B`, `P = id`.
    Whole,
    /// `N_e = B_e`, `N_g = 0` otherwise.
    UnitFiber,
    /// `N_g = B_g` for `g` in a subgroup, zero elsewhere.
    Subgroup(BTreeSet<Elem>),
    /// Explicit projections in fiber coordinates; missing elements project to zero.
    Linear(BTreeMap<Elem, Mat>),
}

impl SubBundle {
    pub fn project(&self, g: &Elem, v: &Vector) -> Vector {
        match self {
            SubBundle::Whole => v.clone(),
            SubBundle::UnitFiber => match g {
                Elem::Free(w) if w.is_empty() => v.clone(),
                Elem::Lattice(x) if x.iter().all(|&c| c == 0) => v.clone(),
                Elem::Finite(_) => panic!("UnitFiber needs the bundle's identity; use project_in"),
                _ => Vector::zeros(v.len()),
            },
            SubBundle::Subgroup(h) => {
                if h.contains(g) {
                    v.clone()
                } else {
                    Vector::zeros(v.len())
                }
            }
            SubBundle::Linear(maps) => match maps.get(g) {
                Some(p) => p * v,
                None => Vector::zeros(v.len()),
            },
        }
    }

    /// `P_g(v)` with the identity taken from the bundle.
    pub fn project_in(&self, b: &FellBundle, g: &Elem, v: &Vector) -> Vector {
        match self {
            SubBundle::UnitFiber => {
                if b.ctx().is_id(g) {
                    v.clone()
                } else {
                    Vector::zeros(v.len())
                }
            }
            _ => self.project(g, v),
        }
    }

    /// Largest violation of `P_{gh}(ba) = P_g(b)a` and `P_{hg}(ab) = aP_g(b)` over random
    /// `b ∈ B_g` and `a ∈ N_h`, `g, h` drawn from `window(radius)`. Also checks `P_g² = P_g`.
    pub fn bimodule_defect(&self, b: &FellBundle, radius: usize, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let window = b.window(radius);
        let ctx = b.ctx();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let g = &window[rng.gen_range(0..window.len())];
            let h = &window[rng.gen_range(0..window.len())];
            let x = b.random_fiber(g, &mut rng);
            let a = self.project_in(b, h, &b.random_fiber(h, &mut rng));
            let px = self.project_in(b, g, &x);
            let gh = ctx.op(g, h);
            let hg = ctx.op(h, g);
            let right = self.project_in(b, &gh, &b.mul(g, &x, h, &a)) - b.mul(g, &px, h, &a);
            let left = self.project_in(b, &hg, &b.mul(h, &a, g, &x)) - b.mul(h, &a, g, &px);
            let idem = self.project_in(b, g, &px) - &px;
            worst = worst.max(linalg::vec_max_abs(&right)).max(linalg::vec_max_abs(&left)).max(linalg::vec_max_abs(&idem));
        }
        worst
    }

    /// Rejects expectations violating the bimodule law on samples.
    pub fn check(&self, b: &FellBundle, radius: usize, samples: usize, seed: u64) -> Result<()> {
        let defect = self.bimodule_defect(b, radius, samples, seed);
        if defect > 1e-10 {
            return Err(Error::BimoduleViolation(format!("max residual {defect:.3e}")));
        }
        Ok(())
    }
}

/// `P_F(k)`: `P` applied entrywise on `F × F`, entries outside `F × F` dropped.
pub fn cond_expectation_pf(b: &FellBundle, sub: &SubBundle, k: &Kernel, window: &WindowF) -> Result<Kernel> {
    owns(b, k)?;
    let entries = k
        .compress(window)
        .entries
        .into_iter()
        .map(|((s, t), v)| {
            let p = sub.project_in(b, &entry_fiber(b, &s, &t), &v);
            ((s, t), p)
        })
        .collect();
    Ok(Kernel { bundle: b.id(), entries })
}
