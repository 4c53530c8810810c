//! JSON configuration: named groups, algebras, partial actions, twists, bundles and
//! witness families. Complex numbers are `[re, im]`; matrices are lists of rows.

use std::collections::BTreeMap;
use std::path::Path;

use fellap::ap::APWitness;
use fellap::fellbundle::{scalar_cocycle, Twist, TwistedAction};
use fellap::linalg::{Mat, C64};
use fellap::{CPartialAction, FdAlgebra, FdElement, FellBundle, GroupCtx, Ideal, IdealIso};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// A real number written either as a JSON number or as a decimal string.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(transparent)]
pub struct Num(pub f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(x) => Ok(Num(x)),
            Raw::S(s) => s.trim().parse().map(Num).map_err(|_| serde::de::Error::custom(format!("bad number '{s}'"))),
        }
    }
}

pub type Complex = [Num; 2];
pub type MatrixSpec = Vec<Vec<Complex>>;

fn c64(z: &Complex) -> C64 {
    C64::new(z[0].0, z[1].0)
}

/// `[source block, target block, unitary]`.
pub type IsoEntry = (usize, usize, MatrixSpec);

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub groups: BTreeMap<String, GroupSpec>,
    #[serde(default)]
    pub algebras: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub actions: BTreeMap<String, ActionSpec>,
    #[serde(default)]
    pub twists: BTreeMap<String, TwistSpec>,
    #[serde(default)]
    pub bundles: BTreeMap<String, BundleSpec>,
    #[serde(default)]
    pub witnesses: BTreeMap<String, FamilySpec>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic { order: usize },
    Symmetric { degree: usize },
    Free { rank: usize },
    Lattice { dim: usize },
    /// Cayley table of a finite group.
    Finite { table: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ActionSpec {
    Trivial { group: String, algebra: String },
    Identity { group: String, algebra: String },
    Table {
        group: String,
        algebra: String,
        #[serde(default)]
        window: Option<usize>,
        maps: BTreeMap<String, Vec<IsoEntry>>,
    },
    Generated { group: String, algebra: String, generators: Vec<Vec<IsoEntry>> },
    Random {
        group: String,
        #[serde(default)]
        algebra: Option<String>,
        seed: u64,
    },
    Restrict { action: String, ideal: Vec<usize> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub action: String,
    /// Scalar cocycle values `[s, t, [re, im]]`.
    #[serde(default)]
    pub omega: Vec<(String, String, Complex)>,
    /// Explicit unitaries `[s, t, element]`.
    #[serde(default)]
    pub cocycle: Vec<(String, String, Value)>,
    /// Exterior unitaries `[t, element]`.
    #[serde(default)]
    pub exterior: Vec<(String, Value)>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum TwistRef {
    Named(String),
    Inline(TwistSpec),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    #[serde(default)]
    pub semidirect: Option<String>,
    #[serde(default)]
    pub twisted: Option<TwistRef>,
    /// Algebra ref; the group comes from `group`.
    #[serde(default, rename = "group-bundle")]
    pub group_bundle: Option<String>,
    #[serde(default)]
    pub group: Option<String>,
    /// Window radius for infinite groups.
    #[serde(default)]
    pub radius: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub bundle: String,
    /// One map `element -> value` per family member.
    pub members: Vec<BTreeMap<String, Value>>,
}

/// A parsed config with its source hash.
pub struct Config {
    pub file: ConfigFile,
    pub sha256: String,
}

fn err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn core_err(context: &str, e: fellap::Error) -> CliError {
    match e {
        fellap::Error::Unsupported(m) => CliError::Unsupported(format!("{context}: {m}")),
        fellap::Error::InvalidAction(r) | fellap::Error::InvalidTwist(r) => {
            CliError::Validation(format!("{context}: {r}"))
        }
        other => CliError::Config(format!("{context}: {other}")),
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        let file: ConfigFile =
            serde_json::from_slice(&bytes).map_err(|e| err(format!("{}: {e}", path.display())))?;
        let config = Config { file, sha256: hex(&Sha256::digest(&bytes)) };
        config.check_refs()?;
        Ok(config)
    }

    /// Rejects dangling references anywhere in the document.
    fn check_refs(&self) -> Result<(), CliError> {
        let f = &self.file;
        let group = |r: &str, ctx: &str| {
            if f.groups.contains_key(r) {
                Ok(())
            } else {
                Err(err(format!("{ctx}: unknown group '{r}'")))
            }
        };
        let algebra = |r: &str, ctx: &str| {
            if f.algebras.contains_key(r) {
                Ok(())
            } else {
                Err(err(format!("{ctx}: unknown algebra '{r}'")))
            }
        };
        let action = |r: &str, ctx: &str| {
            if f.actions.contains_key(r) {
                Ok(())
            } else {
                Err(err(format!("{ctx}: unknown action '{r}'")))
            }
        };
        for (name, a) in &f.actions {
            let ctx = format!("action '{name}'");
            match a {
                ActionSpec::Trivial { group: g, algebra: x }
                | ActionSpec::Identity { group: g, algebra: x }
                | ActionSpec::Table { group: g, algebra: x, .. }
                | ActionSpec::Generated { group: g, algebra: x, .. } => {
                    group(g, &ctx)?;
                    algebra(x, &ctx)?;
                }
                ActionSpec::Random { group: g, algebra: x, .. } => {
                    group(g, &ctx)?;
                    if let Some(x) = x {
                        algebra(x, &ctx)?;
                    }
                }
                ActionSpec::Restrict { action: r, .. } => action(r, &ctx)?,
            }
        }
        for (name, t) in &f.twists {
            action(&t.action, &format!("twist '{name}'"))?;
        }
        for (name, b) in &f.bundles {
            let ctx = format!("bundle '{name}'");
            let set = [b.semidirect.is_some(), b.twisted.is_some(), b.group_bundle.is_some()];
            if set.iter().filter(|x| **x).count() != 1 {
                return Err(err(format!("{ctx}: exactly one of semidirect, twisted, group-bundle is required")));
            }
            if let Some(r) = &b.semidirect {
                action(r, &ctx)?;
            }
            match &b.twisted {
                Some(TwistRef::Named(r)) if !f.twists.contains_key(r) => {
                    return Err(err(format!("{ctx}: unknown twist '{r}'")))
                }
                Some(TwistRef::Inline(t)) => action(&t.action, &ctx)?,
                _ => {}
            }
            if let Some(a) = &b.group_bundle {
                algebra(a, &ctx)?;
                match &b.group {
                    Some(g) => group(g, &ctx)?,
                    None => return Err(err(format!("{ctx}: group-bundle needs a group"))),
                }
            } else if b.group.is_some() {
                return Err(err(format!("{ctx}: group is only used with group-bundle")));
            }
        }
        for (name, w) in &f.witnesses {
            if !f.bundles.contains_key(&w.bundle) {
                return Err(err(format!("witness family '{name}': unknown bundle '{}'", w.bundle)));
            }
        }
        Ok(())
    }

    pub fn group(&self, name: &str) -> Result<GroupCtx, CliError> {
        let spec = self.file.groups.get(name).ok_or_else(|| err(format!("unknown group '{name}'")))?;
        let g = match spec {
            GroupSpec::Cyclic { order } => GroupCtx::cyclic(*order),
            GroupSpec::Symmetric { degree } => GroupCtx::symmetric(*degree),
            GroupSpec::Free { rank } => GroupCtx::free(*rank),
            GroupSpec::Lattice { dim } => GroupCtx::lattice(*dim),
            GroupSpec::Finite { table } => GroupCtx::from_table(name, table.clone()),
        };
        g.map_err(|e| core_err(&format!("group '{name}'"), e))
    }

    pub fn algebra(&self, name: &str) -> Result<FdAlgebra, CliError> {
        let dims = self.file.algebras.get(name).ok_or_else(|| err(format!("unknown algebra '{name}'")))?;
        FdAlgebra::new(dims.clone()).map_err(|e| core_err(&format!("algebra '{name}'"), e))
    }

    pub fn action(&self, name: &str) -> Result<CPartialAction, CliError> {
        let spec = self.file.actions.get(name).ok_or_else(|| err(format!("unknown action '{name}'")))?;
        let ctx_s = format!("action '{name}'");
        let wrap = |e| core_err(&ctx_s, e);
        Ok(match spec {
            ActionSpec::Trivial { group, algebra } => CPartialAction::trivial(self.group(group)?, self.algebra(algebra)?),
            ActionSpec::Identity { group, algebra } => {
                CPartialAction::identity_global(self.group(group)?, self.algebra(algebra)?)
            }
            ActionSpec::Table { group, algebra, window, maps } => {
                let ctx = self.group(group)?;
                let alg = self.algebra(algebra)?;
                let mut parsed = BTreeMap::new();
                for (t, entries) in maps {
                    let t = ctx.parse(t).map_err(wrap)?;
                    parsed.insert(t, iso(&alg, entries).map_err(|e| err(format!("{ctx_s}: {e}")))?);
                }
                parsed.entry(ctx.id()).or_insert_with(|| IdealIso::identity_on(&alg, &alg.full_ideal()));
                match window {
                    Some(r) => CPartialAction::windowed_table(ctx, alg, parsed, *r).map_err(wrap)?,
                    None => CPartialAction::from_table(ctx, alg, parsed).map_err(wrap)?,
                }
            }
            ActionSpec::Generated { group, algebra, generators } => {
                let ctx = self.group(group)?;
                let alg = self.algebra(algebra)?;
                let gens = generators
                    .iter()
                    .map(|g| iso(&alg, g).map_err(|e| err(format!("{ctx_s}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                CPartialAction::generated(ctx, alg, gens).map_err(wrap)?
            }
            ActionSpec::Random { group, algebra, seed } => {
                let ctx = self.group(group)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                if ctx.is_finite() {
                    fellap::random::random_partial_finite(&ctx, &mut rng)
                } else if ctx.free_rank().is_some() {
                    let alg = match algebra {
                        Some(a) => self.algebra(a)?,
                        None => return Err(err(format!("{ctx_s}: random free-group actions need an algebra"))),
                    };
                    fellap::random::random_free_action(&ctx, &alg, &mut rng)
                } else {
                    return Err(CliError::Unsupported(format!("{ctx_s}: random actions over {ctx}")));
                }
            }
            ActionSpec::Restrict { action, ideal } => {
                self.action(action)?.restrict(&Ideal::new(ideal.clone())).map_err(wrap)?
            }
        })
    }

    pub fn twist(&self, name: &str) -> Result<TwistedAction, CliError> {
        let spec = self.file.twists.get(name).ok_or_else(|| err(format!("unknown twist '{name}'")))?;
        self.build_twist(spec, &format!("twist '{name}'"))
    }

    fn build_twist(&self, spec: &TwistSpec, ctx_s: &str) -> Result<TwistedAction, CliError> {
        let base = self.action(&spec.action)?;
        let ctx = base.ctx().clone();
        let alg = base.algebra().clone();
        let parse = |s: &str| ctx.parse(s).map_err(|e| core_err(ctx_s, e));
        let kinds = [!spec.omega.is_empty(), !spec.cocycle.is_empty(), !spec.exterior.is_empty()];
        if kinds.iter().filter(|x| **x).count() > 1 {
            return Err(err(format!("{ctx_s}: use only one of omega, cocycle, exterior")));
        }
        let twist = if !spec.omega.is_empty() {
            let mut pairs = Vec::new();
            for (s, t, z) in &spec.omega {
                pairs.push((parse(s)?, parse(t)?, c64(z)));
            }
            Twist::Cocycle(scalar_cocycle(&base, pairs))
        } else if !spec.cocycle.is_empty() {
            let mut table = BTreeMap::new();
            for (s, t, v) in &spec.cocycle {
                table.insert((parse(s)?, parse(t)?), element(&alg, v).map_err(|e| err(format!("{ctx_s}: {e}")))?);
            }
            Twist::Cocycle(table)
        } else if !spec.exterior.is_empty() {
            let mut units = BTreeMap::new();
            for (t, v) in &spec.exterior {
                units.insert(parse(t)?, element(&alg, v).map_err(|e| err(format!("{ctx_s}: {e}")))?);
            }
            Twist::Exterior(units)
        } else {
            Twist::Trivial
        };
        Ok(TwistedAction::new(base, twist))
    }

    /// The ingredients of a bundle and its window radius, before construction.
    pub fn bundle_source(&self, name: &str) -> Result<(BundleSource, usize), CliError> {
        let spec = self.file.bundles.get(name).ok_or_else(|| err(format!("unknown bundle '{name}'")))?;
        let radius = spec.radius.unwrap_or(2);
        let src = if let Some(a) = &spec.semidirect {
            BundleSource::Semidirect(self.action(a)?)
        } else if let Some(t) = &spec.twisted {
            BundleSource::Twisted(match t {
                TwistRef::Named(n) => self.twist(n)?,
                TwistRef::Inline(s) => self.build_twist(s, &format!("bundle '{name}'"))?,
            })
        } else {
            let a = spec.group_bundle.as_ref().expect("checked at load");
            let g = spec.group.as_ref().expect("checked at load");
            BundleSource::Group(self.group(g)?, self.algebra(a)?)
        };
        Ok((src, radius))
    }

    pub fn bundle(&self, name: &str) -> Result<FellBundle, CliError> {
        let (src, radius) = self.bundle_source(name)?;
        src.build(radius).map_err(|e| core_err(&format!("bundle '{name}'"), e))
    }

    pub fn bundle_radius(&self, name: &str) -> usize {
        self.file.bundles.get(name).and_then(|b| b.radius).unwrap_or(2)
    }

    /// Family members as witnesses over `bundle`.
    pub fn family(&self, name: &str, bundle: &FellBundle) -> Result<Vec<APWitness>, CliError> {
        let spec = self.file.witnesses.get(name).ok_or_else(|| err(format!("unknown witness family '{name}'")))?;
        let alg = bundle.unit_algebra();
        spec.members
            .iter()
            .map(|m| {
                let mut values = BTreeMap::new();
                for (t, v) in m {
                    let t = bundle.ctx().parse(t).map_err(|e| core_err(name, e))?;
                    values.insert(t, element(alg, v).map_err(|e| err(format!("family '{name}': {e}")))?);
                }
                Ok(APWitness::new(values))
            })
            .collect()
    }
}

pub enum BundleSource {
    Semidirect(CPartialAction),
    Twisted(TwistedAction),
    Group(GroupCtx, FdAlgebra),
}

impl BundleSource {
    pub fn build(self, radius: usize) -> fellap::Result<FellBundle> {
        match self {
            BundleSource::Semidirect(pa) => FellBundle::make_semidirect(pa, radius),
            BundleSource::Twisted(tw) => FellBundle::make_twisted(tw, radius),
            BundleSource::Group(g, a) => Ok(FellBundle::group_bundle(g, a)),
        }
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn matrix(rows: &MatrixSpec) -> Result<Mat, String> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!("matrix with {n} rows is not square"));
    }
    Ok(Mat::from_fn(n, n, |i, j| c64(&rows[i][j])))
}

pub fn matrix_spec(m: &Mat) -> MatrixSpec {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [Num(m[(i, j)].re), Num(m[(i, j)].im)]).collect()).collect()
}

fn iso(alg: &FdAlgebra, entries: &[IsoEntry]) -> Result<IdealIso, String> {
    let parsed = entries
        .iter()
        .map(|(j, k, m)| Ok((*j, *k, matrix(m)?)))
        .collect::<Result<Vec<_>, String>>()?;
    IdealIso::new(alg, parsed).map_err(|e| e.to_string())
}

/// `[re, im]` is a scalar multiple of the unit; otherwise a list of block matrices.
pub fn element(alg: &FdAlgebra, v: &Value) -> Result<FdElement, String> {
    if let Ok(z) = serde_json::from_value::<Complex>(v.clone()) {
        return Ok(FdElement::scalar(alg, c64(&z)));
    }
    let blocks: Vec<MatrixSpec> =
        serde_json::from_value(v.clone()).map_err(|e| format!("element is neither [re, im] nor a block list: {e}"))?;
    let mats = blocks.iter().map(matrix).collect::<Result<Vec<_>, _>>()?;
    FdElement::from_blocks(alg, mats).map_err(|e| e.to_string())
}

/// Table form of an action over a finite group, for writing back into a config.
pub fn action_table(pa: &CPartialAction) -> Option<BTreeMap<String, Vec<IsoEntry>>> {
    let ctx = pa.ctx();
    ctx.order()?;
    let mut maps = BTreeMap::new();
    for t in ctx.ball(0) {
        let a = pa.alpha(&t);
        if a.source().is_zero() {
            continue;
        }
        let entries = a.entries().iter().map(|(j, k, u)| (*j, *k, matrix_spec(u))).collect();
        maps.insert(ctx.format(&t), entries);
    }
    Some(maps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Config, CliError> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        let c = Config { file, sha256: String::new() };
        c.check_refs()?;
        Ok(c)
    }

    #[test]
    fn numbers_as_strings_or_literals() {
        let z: Complex = serde_json::from_str(r#"["0.5", -1]"#).unwrap();
        assert_eq!(c64(&z), C64::new(0.5, -1.0));
        assert!(serde_json::from_str::<Complex>(r#"["half", 0]"#).is_err());
    }

    #[test]
    fn elements_from_scalars_and_blocks() {
        let alg = FdAlgebra::new(vec![1, 2]).unwrap();
        let s = element(&alg, &serde_json::json!([2, 0])).unwrap();
        assert_eq!(s, FdElement::scalar(&alg, C64::new(2.0, 0.0)));
        let b = element(&alg, &serde_json::json!([[[[1, 0]]], [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]])).unwrap();
        assert_eq!(b.block(1)[(0, 1)], C64::new(1.0, 0.0));
        assert!(element(&alg, &serde_json::json!([[[[1, 0]]]])).is_err());
    }

    #[test]
    fn dangling_refs_are_config_errors() {
        let r = parse(r#"{"twists": {"w": {"action": "none"}}}"#);
        assert!(matches!(r, Err(CliError::Config(m)) if m.contains("none")));
        let r = parse(r#"{"groups": {"g": {"kind": "cyclic", "order": 2}}, "algebras": {"c": [1]},
            "bundles": {"b": {"group-bundle": "c"}}}"#);
        assert!(matches!(r, Err(CliError::Config(_))));
    }

    #[test]
    fn tables_default_the_identity_entry() {
        let c = parse(
            r#"{"groups": {"g": {"kind": "cyclic", "order": 2}}, "algebras": {"c2": [1, 1]},
            "actions": {"s": {"kind": "table", "group": "g", "algebra": "c2",
                "maps": {"1": [[0, 1, [[[1, 0]]]], [1, 0, [[[1, 0]]]]]}}}}"#,
        )
        .unwrap();
        let pa = c.action("s").unwrap();
        assert!(pa.validate(0).passed());
        let table = action_table(&pa).unwrap();
        assert_eq!(table.len(), 2);
    }

    #[test]
    fn infinite_random_lattice_action_is_unsupported() {
        let c = parse(
            r#"{"groups": {"z": {"kind": "lattice", "dim": 1}},
            "actions": {"r": {"kind": "random", "group": "z", "seed": 1}}}"#,
        )
        .unwrap();
        assert!(matches!(c.action("r"), Err(CliError::Unsupported(_))));
    }
}
