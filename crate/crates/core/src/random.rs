//! Seeded generators of random algebras, partial actions, twists and witnesses.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fdalg::{CPartialAction, FdAlgebra, FdElement, Ideal, IdealIso};
use crate::fellbundle::{Twist, TwistedAction};
use crate::group::{Elem, GroupCtx};
use crate::linalg::{self, Mat};

/// `m` blocks of dimension at most `max_dim`.
pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R, max_blocks: usize, max_dim: usize) -> FdAlgebra {
    let m = rng.gen_range(1..=max_blocks.max(1));
    FdAlgebra::new((0..m).map(|_| rng.gen_range(1..=max_dim.max(1))).collect()).expect("positive dims")
}

/// A global action of a finite group on `⊕_{x∈X} M_{d(x)}` where `X` is a union of one or
/// two coset spaces `G/⟨h⟩`; block `x` goes to `g·x` with unitary `W_{gx} W_x*`.
pub fn random_global_finite<R: Rng + ?Sized>(ctx: &GroupCtx, rng: &mut R) -> CPartialAction {
    let table = ctx.finite_table().expect("finite group");
    let n = table.order();
    // blocks are (orbit, coset) pairs
    let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut dims = Vec::new();
    for orbit in 0..rng.gen_range(1..=2) {
        let h = rng.gen_range(0..n);
        let mut sub = vec![table.identity()];
        let mut x = h;
        while x != table.identity() {
            sub.push(x);
            x = table.table()[x][h];
        }
        let d = rng.gen_range(1..=2);
        for g in 0..n {
            let coset = left_coset(table.table(), g, &sub);
            if !blocks.contains(&(orbit, coset.clone())) {
                blocks.push((orbit, coset));
                dims.push(d);
            }
        }
    }
    let alg = FdAlgebra::new(dims.clone()).expect("positive dims");
    let w: Vec<Mat> = dims.iter().map(|&d| linalg::random_unitary(d, rng)).collect();
    let mut maps = BTreeMap::new();
    for g in 0..n {
        let entries = blocks
            .iter()
            .enumerate()
            .map(|(x, (orbit, coset))| {
                let moved = (*orbit, left_coset(table.table(), g, coset));
                let y = blocks.iter().position(|b| *b == moved).expect("cosets are permuted");
                (x, y, &w[y] * w[x].adjoint())
            })
            .collect();
        maps.insert(Elem::Finite(g), IdealIso::new(&alg, entries).expect("dimension-preserving"));
    }
    CPartialAction::from_table(ctx.clone(), alg, maps).expect("finite table")
}

fn left_coset(table: &[Vec<usize>], g: usize, set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().map(|&k| table[g][k]).collect();
    out.sort_unstable();
    out
}

/// Restriction of [`random_global_finite`] to a random non-zero ideal.
pub fn random_partial_finite<R: Rng + ?Sized>(ctx: &GroupCtx, rng: &mut R) -> CPartialAction {
    let global = random_global_finite(ctx, rng);
    let m = global.algebra().block_count();
    let mut blocks: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.6)).collect();
    if blocks.is_empty() {
        blocks.push(rng.gen_range(0..m));
    }
    global.restrict(&Ideal::new(blocks)).expect("ideal of the algebra")
}

/// A random partial isomorphism between ideals: a dimension-preserving block permutation
/// restricted to a random subset, with random unitaries.
pub fn random_ideal_iso<R: Rng + ?Sized>(alg: &FdAlgebra, rng: &mut R, keep: f64) -> IdealIso {
    let m = alg.block_count();
    let mut image: Vec<usize> = (0..m).collect();
    let mut by_dim: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in 0..m {
        by_dim.entry(alg.block_dim(j)).or_default().push(j);
    }
    for class in by_dim.values() {
        let mut shuffled = class.clone();
        shuffled.shuffle(rng);
        for (j, k) in class.iter().zip(shuffled) {
            image[*j] = k;
        }
    }
    let mut entries = Vec::new();
    for j in 0..m {
        if rng.gen_bool(keep) {
            entries.push((j, image[j], linalg::random_unitary(alg.block_dim(j), rng)));
        }
    }
    IdealIso::new(alg, entries).expect("dimension-preserving")
}

/// A partial action of a free group given by random partial isomorphisms on the generators.
pub fn random_free_action<R: Rng + ?Sized>(ctx: &GroupCtx, alg: &FdAlgebra, rng: &mut R) -> CPartialAction {
    let rank = ctx.free_rank().expect("free group");
    let gens = (0..rank).map(|_| random_ideal_iso(alg, rng, 0.7)).collect();
    CPartialAction::generated(ctx.clone(), alg.clone(), gens).expect("generator shapes")
}

/// An exterior twist by random unitaries `u_t ∈ A_t` for `t ≠ e` in the window.
pub fn random_exterior_twist<R: Rng + ?Sized>(pa: &CPartialAction, radius: usize, rng: &mut R) -> TwistedAction {
    let ctx = pa.ctx();
    let alg = pa.algebra();
    let units = pa
        .window(radius)
        .into_iter()
        .filter(|t| !ctx.is_id(t))
        .map(|t| {
            let u = alg.random_unitary_in(&pa.domain(&t), rng);
            (t, u)
        })
        .collect();
    TwistedAction::new(pa.clone(), Twist::Exterior(units))
}

/// Random values in `alg` on the given support.
pub fn random_witness_values<R: Rng + ?Sized>(
    alg: &FdAlgebra,
    support: &[Elem],
    rng: &mut R,
) -> BTreeMap<Elem, FdElement> {
    support.iter().map(|t| (t.clone(), alg.random_element(rng))).collect()
}

/// A random subset of `elems` of size between 1 and `max`, in the input order.
pub fn random_subset<R: Rng + ?Sized>(elems: &[Elem], max: usize, rng: &mut R) -> Vec<Elem> {
    let k = rng.gen_range(1..=max.min(elems.len()).max(1));
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, elems.len(), k).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| elems[i].clone()).collect()
}
