//! Discrete groups: finite multiplication tables, free groups and integer lattices.
//!
//! Elements are plain values ([`Elem`]) that are only meaningful together with the
//! [`GroupCtx`] that produced them. Free-group words are kept reduced at all times,
//! so structural equality of [`Elem`]s is equality in the group.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    /// Index into a finite multiplication table.
    Finite(usize),
    /// Reduced word; letter `k > 0` is generator `k`, `-k` its inverse.
    Free(Vec<i32>),
    /// Integer vector.
    Lattice(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    name: String,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteTable {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Finite(Arc<FiniteTable>),
    Free { rank: usize },
    Lattice { dim: usize },
}

/// A discrete group the rest of the crate is parameterized over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCtx {
    kind: Kind,
}

impl fmt::Display for GroupCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Finite(t) => write!(f, "{} (order {})", t.name, t.order()),
            Kind::Free { rank } => write!(f, "F_{rank}"),
            Kind::Lattice { dim } => write!(f, "Z^{dim}"),
        }
    }
}

impl GroupCtx {
    /// Builds a finite group from a Cayley table, verifying the group axioms exhaustively.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!("row {i} has length {} (expected {n})", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidTable(format!("entry {bad} in row {i} out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::InvalidTable(format!("element {a} has no inverse")))?;
            inverses[a] = inv;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidTable(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(Self { kind: Kind::Finite(Arc::new(FiniteTable { name: name.into(), table, identity, inverses })) })
    }

    /// The cyclic group of order `m`, element `k` is the residue `k`.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("cyclic group of order 0".into()));
        }
        let table = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        Self::from_table(format!("Z_{m}"), table)
    }

    /// The symmetric group on `n` letters; elements are permutations in lexicographic order,
    /// the product is composition `(ab)(i) = a(b(i))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::InvalidArgument(format!("symmetric group S_{n} not supported (1 <= n <= 5)")));
        }
        let perms = permutations(n);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed under composition");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index(&b.iter().map(|&i| a[i]).collect())).collect())
            .collect();
        Self::from_table(format!("S_{n}"), table)
    }

    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidArgument("free group of rank 0".into()));
        }
        Ok(Self { kind: Kind::Free { rank } })
    }

    pub fn lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("lattice of dimension 0".into()));
        }
        Ok(Self { kind: Kind::Lattice { dim } })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, Kind::Finite(_))
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            Kind::Finite(t) => Some(t.order()),
            _ => None,
        }
    }

    pub fn finite_table(&self) -> Option<&FiniteTable> {
        match &self.kind {
            Kind::Finite(t) => Some(t),
            _ => None,
        }
    }

    pub fn free_rank(&self) -> Option<usize> {
        match self.kind {
            Kind::Free { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn lattice_dim(&self) -> Option<usize> {
        match self.kind {
            Kind::Lattice { dim } => Some(dim),
            _ => None,
        }
    }

    pub fn contains(&self, a: &Elem) -> bool {
        match (&self.kind, a) {
            (Kind::Finite(t), Elem::Finite(i)) => *i < t.order(),
            (Kind::Free { rank }, Elem::Free(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *rank)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (Kind::Lattice { dim }, Elem::Lattice(v)) => v.len() == *dim,
            _ => false,
        }
    }

    pub fn check(&self, a: &Elem) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::ContextMismatch { elem: format!("{a:?}"), ctx: self.to_string() })
        }
    }

    pub fn id(&self) -> Elem {
        match &self.kind {
            Kind::Finite(t) => Elem::Finite(t.identity),
            Kind::Free { .. } => Elem::Free(Vec::new()),
            Kind::Lattice { dim } => Elem::Lattice(vec![0; *dim]),
        }
    }

    pub fn is_id(&self, a: &Elem) -> bool {
        match (&self.kind, a) {
            (Kind::Finite(t), Elem::Finite(i)) => *i == t.identity,
            (_, Elem::Free(w)) => w.is_empty(),
            (_, Elem::Lattice(v)) => v.iter().all(|&x| x == 0),
            _ => false,
        }
    }

    /// Checked group product.
    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.op(a, b))
    }

    /// Checked inverse.
    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        self.check(a)?;
        Ok(self.inverse(a))
    }

    /// Product of elements already known to belong to this group.
    pub fn op(&self, a: &Elem, b: &Elem) -> Elem {
        debug_assert!(self.contains(a) && self.contains(b), "{a:?} * {b:?} in {self}");
        match (&self.kind, a, b) {
            (Kind::Finite(t), Elem::Finite(i), Elem::Finite(j)) => Elem::Finite(t.table[*i][*j]),
            (Kind::Free { .. }, Elem::Free(x), Elem::Free(y)) => Elem::Free(reduce_concat(x, y)),
            (Kind::Lattice { .. }, Elem::Lattice(x), Elem::Lattice(y)) => {
                Elem::Lattice(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            _ => panic!("element kind does not match group {self}"),
        }
    }

    pub fn inverse(&self, a: &Elem) -> Elem {
        match (&self.kind, a) {
            (Kind::Finite(t), Elem::Finite(i)) => Elem::Finite(t.inverses[*i]),
            (Kind::Free { .. }, Elem::Free(w)) => Elem::Free(w.iter().rev().map(|l| -l).collect()),
            (Kind::Lattice { .. }, Elem::Lattice(v)) => Elem::Lattice(v.iter().map(|x| -x).collect()),
            _ => panic!("element kind does not match group {self}"),
        }
    }

    /// Word length with respect to the standard generators (`±e_i` for lattices, letters
    /// for free groups). Finite groups use the whole group as generating set.
    pub fn word_length(&self, a: &Elem) -> usize {
        match a {
            Elem::Finite(_) => usize::from(!self.is_id(a)),
            Elem::Free(w) => w.len(),
            Elem::Lattice(v) => v.iter().map(|x| x.unsigned_abs() as usize).sum(),
        }
    }

    /// Membership in the positive cone: a nonempty word in positive generators only.
    pub fn is_positive(&self, a: &Elem) -> Result<bool> {
        match (&self.kind, a) {
            (Kind::Free { .. }, Elem::Free(w)) => {
                self.check(a)?;
                Ok(!w.is_empty() && w.iter().all(|&l| l > 0))
            }
            (Kind::Free { .. }, _) => Err(Error::ContextMismatch { elem: format!("{a:?}"), ctx: self.to_string() }),
            _ => Err(Error::Unsupported(format!("positive cone of {self}"))),
        }
    }

    /// All elements of word length at most `radius`, ordered by length then
    /// lexicographically. Finite groups return every element (identity first).
    pub fn ball(&self, radius: usize) -> Vec<Elem> {
        match &self.kind {
            Kind::Finite(t) => {
                let mut out = vec![Elem::Finite(t.identity)];
                out.extend((0..t.order()).filter(|&i| i != t.identity).map(Elem::Finite));
                out
            }
            Kind::Free { rank } => {
                let letters: Vec<i32> = (1..=*rank as i32).flat_map(|k| [k, -k]).collect();
                let mut out = vec![Elem::Free(Vec::new())];
                let mut layer: Vec<Vec<i32>> = vec![Vec::new()];
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for w in &layer {
                        for &l in &letters {
                            if w.last() != Some(&-l) {
                                let mut v = w.clone();
                                v.push(l);
                                next.push(v);
                            }
                        }
                    }
                    out.extend(next.iter().cloned().map(Elem::Free));
                    layer = next;
                }
                out
            }
            Kind::Lattice { dim } => {
                let mut out = Vec::new();
                for len in 0..=radius {
                    let mut shell = Vec::new();
                    lattice_shell(*dim, len as i64, &mut Vec::new(), &mut shell);
                    shell.sort();
                    out.extend(shell.into_iter().map(Elem::Lattice));
                }
                out
            }
        }
    }

    /// Ordering used by [`GroupCtx::ball`].
    pub fn ball_cmp(&self, a: &Elem, b: &Elem) -> Ordering {
        self.word_length(a).cmp(&self.word_length(b)).then_with(|| match (a, b) {
            (Elem::Free(x), Elem::Free(y)) => {
                let key = |l: &i32| 2 * (l.unsigned_abs() as i64 - 1) + i64::from(*l < 0);
                x.iter().map(key).cmp(y.iter().map(key))
            }
            _ => {
                if self.is_id(a) != self.is_id(b) {
                    self.is_id(b).cmp(&self.is_id(a))
                } else {
                    a.cmp(b)
                }
            }
        })
    }

    /// Human-readable element notation: finite indices, free words over `a,b,c,...` with
    /// capitals for inverses (`e` for the identity), lattice vectors as `(x,y)`.
    pub fn format(&self, a: &Elem) -> String {
        match a {
            Elem::Finite(i) => i.to_string(),
            Elem::Free(w) if w.is_empty() => "e".into(),
            Elem::Free(w) => w.iter().map(|&l| letter_char(l)).collect(),
            Elem::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("({})", parts.join(","))
            }
        }
    }

    /// Inverse of [`GroupCtx::format`].
    pub fn parse(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse element '{s}' of {self}"));
        let elem = match &self.kind {
            Kind::Finite(_) => Elem::Finite(s.parse().map_err(|_| bad())?),
            Kind::Free { .. } => {
                if s == "e" || s.is_empty() {
                    Elem::Free(Vec::new())
                } else {
                    let letters: Option<Vec<i32>> = s.chars().map(char_letter).collect();
                    Elem::Free(reduce_concat(&[], &letters.ok_or_else(bad)?))
                }
            }
            Kind::Lattice { .. } => {
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let v: std::result::Result<Vec<i64>, _> =
                    inner.split(',').map(|p| p.trim().parse::<i64>()).collect();
                Elem::Lattice(v.map_err(|_| bad())?)
            }
        };
        self.check(&elem)?;
        Ok(elem)
    }
}

fn letter_char(l: i32) -> char {
    let base = if l > 0 { b'a' } else { b'A' };
    (base + (l.unsigned_abs() as u8 - 1)) as char
}

fn char_letter(c: char) -> Option<i32> {
    match c {
        'a'..='z' if c != 'e' => Some(i32::from(c as u8 - b'a') + 1),
        'A'..='Z' if c != 'E' => Some(-(i32::from(c as u8 - b'A') + 1)),
        _ => None,
    }
}

fn reduce_concat(x: &[i32], y: &[i32]) -> Vec<i32> {
    let mut out = x.to_vec();
    for &l in y {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn lattice_shell(dim: usize, remaining: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if prefix.len() == dim - 1 {
        for last in if remaining == 0 { vec![0] } else { vec![-remaining, remaining] } {
            let mut v = prefix.clone();
            v.push(last);
            out.push(v);
        }
        return;
    }
    for x in -remaining..=remaining {
        prefix.push(x);
        lattice_shell(dim, remaining - x.abs(), prefix, out);
        prefix.pop();
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
