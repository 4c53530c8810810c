//! Enveloping (global) actions of partial actions of finite groups.
//!
//! The partial action embeds into `⊕_{t∈G} A` through `ι(x)(t) = α_{t⁻¹}(1_t x)`; the
//! envelope `N` is the *-algebra generated by the translates of `ι(A)`. Each translate of
//! a block of `A` is a diagonal copy of a matrix algebra spread over a set of blocks of
//! `⊕_t A`, so `N` splits into one matrix block per atom of the Boolean algebra those
//! sets generate. Finite dimension makes the linear orbit equal to `N`, no closure needed.

use std::collections::BTreeMap;

use super::{CPartialAction, FdAlgebra, FdElement, Ideal, IdealIso};
use crate::error::{Error, Result};
use crate::group::Elem;
use crate::linalg::{self, Mat, Vector};
use crate::report::ValidationReport;

/// An injective *-homomorphism sending block `j` diagonally into several target blocks,
/// `x_j ↦ Y x_j Y*` in each.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockEmbedding {
    domain: FdAlgebra,
    codomain: FdAlgebra,
    images: Vec<Vec<(usize, Mat)>>,
}

impl BlockEmbedding {
    pub fn domain(&self) -> &FdAlgebra {
        &self.domain
    }

    pub fn codomain(&self) -> &FdAlgebra {
        &self.codomain
    }

    /// Target blocks (with conjugating unitaries) of domain block `j`.
    pub fn images(&self, j: usize) -> &[(usize, Mat)] {
        &self.images[j]
    }

    pub fn apply(&self, x: &FdElement) -> FdElement {
        let mut out = FdElement::zero(&self.codomain);
        for (j, targets) in self.images.iter().enumerate() {
            for (k, y) in targets {
                *out.block_mut(*k) += y * x.block(j) * y.adjoint();
            }
        }
        out
    }

    pub fn is_injective(&self) -> bool {
        self.images.iter().all(|t| !t.is_empty())
    }
}

/// Global action on the envelope `N` together with the embedding `ι: A → N`.
#[derive(Clone, Debug)]
pub struct Globalization {
    pub envelope: CPartialAction,
    pub iota: BlockEmbedding,
    /// `ι(A)` as an ideal of `N`.
    pub image: Ideal,
    /// For each block of `N`, its diagonal placement `(t, k, V)` inside `⊕_{t∈G} A`.
    pub placement: Vec<Vec<(usize, usize, Mat)>>,
}

type BigBlock = (usize, usize);

/// Builds the enveloping global action of a partial action of a finite group.
pub fn globalize_finite(pa: &CPartialAction) -> Result<Globalization> {
    let ctx = pa.ctx();
    let table = ctx
        .finite_table()
        .ok_or_else(|| Error::Unsupported(format!("globalization over infinite group {ctx}")))?;
    let report = pa.validate(0);
    if !report.passed() {
        return Err(Error::InvalidAction(Box::new(report)));
    }
    let n = table.order();
    let alg = pa.algebra();
    let m = alg.block_count();
    let alphas: Vec<IdealIso> = (0..n).map(|t| pa.alpha(&Elem::Finite(t))).collect();
    let inverse = |t: usize| match ctx.inverse(&Elem::Finite(t)) {
        Elem::Finite(i) => i,
        _ => unreachable!(),
    };
    let e = table.identity();

    // Translate s of the diagonal embedding of block j: (s·u, φ_{u⁻¹}(j)) for j ∈ A_u.
    let mut embeddings: Vec<BTreeMap<BigBlock, Mat>> = Vec::with_capacity(m * n);
    for j in 0..m {
        for s in 0..n {
            let mut placed = BTreeMap::new();
            for u in 0..n {
                if !alphas[u].target().contains(j) {
                    continue;
                }
                let back = &alphas[inverse(u)];
                let k = back.block_image(j).ok_or_else(|| {
                    Error::Inconsistent(format!("block {j} in A_{u} but not in the source of its inverse map"))
                })?;
                placed.insert((table.table()[s][u], k), back.unitary(j).expect("mapped block").clone());
            }
            embeddings.push(placed);
        }
    }
    let embedding_id = |j: usize, s: usize| j * n + s;

    let mut membership: BTreeMap<BigBlock, Vec<usize>> = BTreeMap::new();
    for (id, placed) in embeddings.iter().enumerate() {
        for b in placed.keys() {
            membership.entry(*b).or_default().push(id);
        }
    }
    let mut atoms_by_key: BTreeMap<Vec<usize>, Vec<BigBlock>> = BTreeMap::new();
    for (b, ids) in &membership {
        atoms_by_key.entry(ids.clone()).or_default().push(*b);
    }
    let mut atoms: Vec<(Vec<usize>, Vec<BigBlock>)> = atoms_by_key.into_iter().collect();
    atoms.sort_by_key(|(_, blocks)| blocks[0]);

    let mut atom_of: BTreeMap<BigBlock, usize> = BTreeMap::new();
    let mut placement = Vec::with_capacity(atoms.len());
    let mut dims = Vec::with_capacity(atoms.len());
    for (index, (members, blocks)) in atoms.iter().enumerate() {
        let reference = &embeddings[members[0]];
        let place: Vec<(usize, usize, Mat)> = blocks.iter().map(|b| (b.0, b.1, reference[b].clone())).collect();
        let b0 = blocks[0];
        for &other in &members[1..] {
            let theirs = &embeddings[other];
            let relative = reference[&b0].adjoint() * &theirs[&b0];
            for b in blocks {
                if linalg::phase_distance(&(&reference[b] * &relative), &theirs[b]) > 1e-8 {
                    return Err(Error::Inconsistent(format!("translates disagree on block (t={}, k={})", b.0, b.1)));
                }
            }
        }
        for b in blocks {
            atom_of.insert(*b, index);
        }
        dims.push(alg.block_dim(b0.1));
        placement.push(place);
    }
    let envelope_alg = FdAlgebra::new(dims)?;

    let mut maps = BTreeMap::new();
    for s in 0..n {
        let mut entries = Vec::with_capacity(atoms.len());
        for (index, place) in placement.iter().enumerate() {
            let (t0, k0, v0) = &place[0];
            let moved = (table.table()[s][*t0], *k0);
            let target = atom_of[&moved];
            for (t, k, _) in place {
                if atom_of.get(&(table.table()[s][*t], *k)) != Some(&target) {
                    return Err(Error::Inconsistent(format!("translation by {s} splits envelope block {index}")));
                }
            }
            let v_target = &placement[target].iter().find(|p| (p.0, p.1) == moved).expect("block in atom").2;
            entries.push((index, target, v_target.adjoint() * v0));
        }
        maps.insert(Elem::Finite(s), IdealIso::new(&envelope_alg, entries)?);
    }
    let envelope = CPartialAction::from_table(ctx.clone(), envelope_alg.clone(), maps)?;

    let mut images = Vec::with_capacity(m);
    let mut image_blocks = Vec::new();
    for j in 0..m {
        let placed = &embeddings[embedding_id(j, e)];
        let mut targets: Vec<(usize, Mat)> = Vec::new();
        for (b, u) in placed {
            let atom = atom_of[b];
            if targets.iter().any(|(a, _)| *a == atom) {
                continue;
            }
            let v = &placement[atom].iter().find(|p| (p.0, p.1) == *b).expect("block in atom").2;
            targets.push((atom, v.adjoint() * u));
            image_blocks.push(atom);
        }
        images.push(targets);
    }
    let iota = BlockEmbedding { domain: alg.clone(), codomain: envelope_alg, images };
    Ok(Globalization { envelope, iota, image: Ideal::new(image_blocks), placement })
}

impl Globalization {
    /// Checks the defining properties of an enveloping action against the input `pa`:
    /// the envelope is a global action, `ι` is an injective *-homomorphism onto an ideal,
    /// restricting the envelope to `ι(A)` gives back `pa`, and the translates of `ι(A)`
    /// span `N` (rank computed from the defining formula for `ι`).
    pub fn verify(&self, pa: &CPartialAction) -> ValidationReport {
        let tol = 1e-10;
        let mut report = ValidationReport::new(tol);
        let ctx = pa.ctx();
        report.merge(self.envelope.validate(0));
        let full = self.envelope.algebra().full_ideal();
        for t in ctx.ball(0) {
            let a = self.envelope.alpha(&t);
            if a.source() != &full || a.target() != &full {
                report.fail("global", format!("t={} acts on a proper ideal", ctx.format(&t)));
            } else {
                report.record("global", || ctx.format(&t), 0.0);
            }
        }

        if !self.iota.is_injective() {
            report.fail("iota injective", "some block of A has no image".into());
        }
        let single: Option<Vec<usize>> =
            (0..pa.algebra().block_count()).map(|j| (self.iota.images(j).len() == 1).then(|| self.iota.images(j)[0].0)).collect();
        let Some(single) = single else {
            report.fail("iota ideal", "a block of A spreads over several blocks of N".into());
            return report;
        };
        report.record("iota ideal", || "image blocks".into(), 0.0);

        let restricted = match self.envelope.restrict(&self.image) {
            Ok(r) => r,
            Err(err) => {
                report.fail("restriction round-trip", err.to_string());
                return report;
            }
        };
        let pos = |atom: usize| self.image.blocks().binary_search(&atom).expect("image block");
        for t in ctx.ball(0) {
            let input = pa.alpha(&t);
            let got = restricted.alpha(&t);
            let mut entries = Vec::new();
            for (j, k, u) in input.entries() {
                let yj = &self.iota.images(*j)[0].1;
                let yk = &self.iota.images(*k)[0].1;
                entries.push((pos(single[*j]), pos(single[*k]), yk * u * yj.adjoint()));
            }
            let expected = IdealIso::new(restricted.algebra(), entries);
            let witness = || format!("t={}", ctx.format(&t));
            match expected.ok().and_then(|x| got.distance(&x)) {
                Some(d) => report.record("restriction round-trip", witness, d),
                None => report.fail("restriction round-trip", format!("{}: block maps differ", witness())),
            }
        }

        let rank = orbit_span_rank(pa).unwrap_or(0);
        let dim = self.envelope.algebra().dim();
        if rank == dim {
            report.record("orbit span", || format!("rank {rank} = dim N"), 0.0);
        } else {
            report.fail("orbit span", format!("rank {rank} != dim N = {dim}"));
        }
        report
    }

    /// Realizes an element of `N` inside `⊕_{t∈G} A`, as one element of `A` per `t`.
    pub fn realize(&self, y: &FdElement, pa: &CPartialAction) -> Vec<FdElement> {
        let n = pa.ctx().order().unwrap_or(0);
        let mut out = vec![FdElement::zero(pa.algebra()); n];
        for (atom, place) in self.placement.iter().enumerate() {
            for (t, k, v) in place {
                *out[*t].block_mut(*k) += v * y.block(atom) * v.adjoint();
            }
        }
        out
    }
}

/// Dimension of `span{τ_s(ι(x)) : s ∈ G, x ∈ A}` inside `⊕_{t∈G} A`, computed straight
/// from `ι(x)(t) = α_{t⁻¹}(1_t x)` and `τ_s(f)(t) = f(s⁻¹t)`.
pub fn orbit_span_rank(pa: &CPartialAction) -> Result<usize> {
    let ctx = pa.ctx();
    if !ctx.is_finite() {
        return Err(Error::Unsupported(format!("orbit span over infinite group {ctx}")));
    }
    let alg = pa.algebra();
    let group = ctx.ball(0);
    let full = alg.full_ideal();
    let iota = |x: &FdElement| -> Vec<FdElement> {
        group
            .iter()
            .map(|t| {
                let unit = FdElement::unit_of(alg, &pa.domain(t));
                pa.alpha(&ctx.inverse(t)).apply(&unit.mul(x))
            })
            .collect()
    };
    let position: BTreeMap<&Elem, usize> = group.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut vectors = Vec::new();
    for x in alg.ideal_basis(&full) {
        let f = iota(&x);
        for s in &group {
            let sinv = ctx.inverse(s);
            let mut coords = Vec::with_capacity(group.len() * alg.dim());
            for t in &group {
                let value = &f[position[&ctx.op(&sinv, t)]];
                coords.extend(value.flatten_on(&full).iter().copied());
            }
            vectors.push(Vector::from_vec(coords));
        }
    }
    Ok(linalg::rank(&vectors, 1e-9))
}
