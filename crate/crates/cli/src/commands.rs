use std::collections::BTreeMap;
use std::path::Path;

use fellap::ap::{ap_certify, basis_targets, folner_witness, uniform_witness, ApCertificate, ApProblem, BundleFamily};
use fellap::cantor::{cuntz_defect_fast, cuntz_predicted, spectral_groupoid, xi_witness, CuntzFamily};
use fellap::fdalg::globalize_finite;
use fellap::kernels::{beta_act, k_mul, k_star, mf_dim, mf_embed_norm, norm2, random_kernel, WindowF};
use fellap::linalg::Vector;
use fellap::{Elem, FellBundle, GroupCtx, ValidationReport};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{core_err, matrix_spec, ActionSpec, BundleSource, Config};
use crate::output::{emit, num, Provenance, Table};
use crate::{Cli, CliError, Command};

struct Run<'a> {
    cli: &'a Cli,
    config: Option<Config>,
}

impl Run<'_> {
    fn config(&self) -> Result<&Config, CliError> {
        self.config.as_ref().ok_or_else(|| CliError::Config("this command needs --config".into()))
    }

    fn provenance(&self, refs: String, params: String) -> Provenance {
        Provenance {
            refs,
            params,
            seed: self.cli.seed,
            config_sha256: self.config.as_ref().map_or_else(|| "none".into(), |c| c.sha256.clone()),
        }
    }

    fn finish(&self, table: &Table, prov: Provenance, summary: &[String], pass: bool) -> Result<bool, CliError> {
        emit(&table.to_csv(&prov)?, self.cli.out.as_deref())?;
        let echo: Vec<String> = std::env::args().skip(1).collect();
        eprintln!("fellap {}", echo.join(" "));
        eprintln!("config sha256: {}", prov.config_sha256);
        eprintln!("seed: {}", prov.seed);
        eprintln!("rows: {}", table.rows.len());
        for line in summary {
            eprintln!("{line}");
        }
        eprintln!("result: {}", if pass { "pass" } else { "FAIL" });
        Ok(pass)
    }
}

pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let config = cli.config.as_deref().map(Config::load).transpose()?;
    let run = Run { cli, config };
    match &cli.command {
        Command::Validate { target, radius, samples } => validate(&run, target, *radius, *samples),
        Command::Globalize { action, emit_config } => globalize(&run, action, emit_config.as_deref()),
        Command::ApCheck { bundle, witness, targets, cap } => ap_check(&run, bundle, witness, targets.as_deref(), *cap),
        Command::Kernels { bundle, window, samples } => kernels(&run, bundle, *window, *samples),
        Command::CuntzAp { n, imax, targets } => cuntz_ap(&run, *n, *imax, targets),
        Command::Groupoid { n, depth, radius } => groupoid(&run, *n, *depth, *radius),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Action,
    Twist,
    Bundle,
}

fn resolve(config: &Config, target: &str) -> Result<(Kind, String), CliError> {
    let f = &config.file;
    let prefixed = [("action:", Kind::Action), ("twist:", Kind::Twist), ("bundle:", Kind::Bundle)];
    for (p, k) in prefixed {
        if let Some(name) = target.strip_prefix(p) {
            let known = match k {
                Kind::Action => f.actions.contains_key(name),
                Kind::Twist => f.twists.contains_key(name),
                Kind::Bundle => f.bundles.contains_key(name),
            };
            return if known {
                Ok((k, name.to_string()))
            } else {
                Err(CliError::Config(format!("unknown ref '{target}'")))
            };
        }
    }
    let mut hits = Vec::new();
    if f.actions.contains_key(target) {
        hits.push(Kind::Action);
    }
    if f.twists.contains_key(target) {
        hits.push(Kind::Twist);
    }
    if f.bundles.contains_key(target) {
        hits.push(Kind::Bundle);
    }
    match hits.as_slice() {
        [k] => Ok((*k, target.to_string())),
        [] => Err(CliError::Config(format!("unknown ref '{target}'"))),
        _ => Err(CliError::Config(format!("ref '{target}' is ambiguous; prefix it with action:, twist: or bundle:"))),
    }
}

fn report_rows(table: &mut Table, target: &str, report: &ValidationReport) {
    for (check, c) in &report.checks {
        table.push(vec![
            target.to_string(),
            check.clone(),
            c.instances.to_string(),
            num(c.max_violation),
            c.worst_witness.clone(),
            if c.max_violation > report.tolerance { "fail" } else { "pass" }.to_string(),
        ]);
    }
}

fn validate(run: &Run, target: &str, radius: usize, samples: usize) -> Result<bool, CliError> {
    let config = run.config()?;
    let (kind, name) = resolve(config, target)?;
    let mut report = ValidationReport::new(run.cli.tol.unwrap_or(1e-10));
    match kind {
        Kind::Action => report.merge(config.action(&name)?.validate(radius)),
        Kind::Twist => report.merge(config.twist(&name)?.validate(radius)),
        Kind::Bundle => {
            let (src, window) = config.bundle_source(&name)?;
            let r = radius.min(window);
            let pre = match &src {
                BundleSource::Semidirect(pa) => Some(pa.validate(r)),
                BundleSource::Twisted(tw) => Some(tw.validate(r)),
                BundleSource::Group(..) => None,
            };
            let ok = pre.as_ref().is_none_or(|p| p.passed());
            if let Some(p) = pre {
                report.merge(p);
            }
            if ok {
                let b = src.build(window).map_err(|e| core_err(&format!("bundle '{name}'"), e))?;
                report.merge(b.validate(r, samples, run.cli.seed));
            }
        }
    }
    let mut table = Table::new(&["target", "check", "instances", "max_violation", "worst_witness", "status"]);
    report_rows(&mut table, target, &report);
    let mut summary = vec![format!("target: {target} ({kind:?})"), format!("max violation: {}", num(report.max_violation()))];
    for check in report.failed_checks() {
        let c = &report.checks[check];
        summary.push(format!("failed: {check}, violation {} at {}", num(c.max_violation), c.worst_witness));
    }
    let prov = run.provenance(target.to_string(), format!("radius={radius};samples={samples}"));
    run.finish(&table, prov, &summary, report.passed())
}

/// The group ref an action is defined over, following restrictions.
fn action_group(config: &Config, name: &str) -> Option<String> {
    match config.file.actions.get(name)? {
        ActionSpec::Trivial { group, .. }
        | ActionSpec::Identity { group, .. }
        | ActionSpec::Table { group, .. }
        | ActionSpec::Generated { group, .. }
        | ActionSpec::Random { group, .. } => Some(group.clone()),
        ActionSpec::Restrict { action, .. } => action_group(config, action),
    }
}

fn globalize(run: &Run, name: &str, emit_config: Option<&Path>) -> Result<bool, CliError> {
    let config = run.config()?;
    let pa = config.action(name)?;
    let g = globalize_finite(&pa).map_err(|e| core_err(&format!("action '{name}'"), e))?;
    let report = g.verify(&pa);
    let ctx = pa.ctx();
    let mut table = Table::new(&["t", "block", "image_block", "block_dim", "unitary"]);
    for t in ctx.ball(0) {
        let alpha = g.envelope.alpha(&t);
        for (j, k, u) in alpha.entries() {
            let json = serde_json::to_string(&matrix_spec(u)).map_err(|e| CliError::Io(e.to_string()))?;
            table.push(vec![ctx.format(&t), j.to_string(), k.to_string(), u.nrows().to_string(), json]);
        }
    }
    let blocks = g.envelope.algebra().blocks().to_vec();
    let mut summary = vec![
        format!("envelope blocks: {blocks:?} (dim {})", g.envelope.algebra().dim()),
        format!("image of A: blocks {:?}", g.image.blocks()),
        format!("verification: {report}"),
    ];
    if let Some(path) = emit_config {
        let mut file = config.file.clone();
        let env_name = format!("{name}-envelope");
        let group = action_group(config, name).expect("action exists");
        let maps = crate::config::action_table(&g.envelope).expect("finite group");
        file.algebras.insert(env_name.clone(), blocks);
        file.actions.insert(env_name.clone(), ActionSpec::Table { group, algebra: env_name.clone(), window: None, maps });
        let text = serde_json::to_string_pretty(&file).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        summary.push(format!("global action written as '{env_name}' to {}", path.display()));
    }
    let prov = run.provenance(name.to_string(), String::new());
    run.finish(&table, prov, &summary, report.passed())
}

fn parse_usize(s: &str, what: &str) -> Result<usize, CliError> {
    s.parse().map_err(|_| CliError::Config(format!("{what}: expected a non-negative integer, got '{s}'")))
}

fn split_list(s: &str, seps: &[char]) -> Vec<String> {
    s.split(seps).map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect()
}

fn bundle_targets(b: &FellBundle, spec: &str, default_radius: usize) -> Result<Vec<(Elem, Vector, String)>, CliError> {
    if spec == "basis" {
        return Ok(basis_targets(b, default_radius));
    }
    if let Some(r) = spec.strip_prefix("basis:") {
        return Ok(basis_targets(b, parse_usize(r, "targets")?));
    }
    let mut out = Vec::new();
    for part in split_list(spec, &[';']) {
        let t = b.ctx().parse(&part).map_err(|e| core_err("targets", e))?;
        for (k, v) in b.fiber_basis(&t).into_iter().enumerate() {
            out.push((t.clone(), v, format!("{}:{k}", b.ctx().format(&t))));
        }
    }
    Ok(out)
}

fn ap_check(run: &Run, bundle: &str, witness: &str, targets: Option<&str>, cap: f64) -> Result<bool, CliError> {
    let tol = run.cli.tol.unwrap_or(1e-10);
    let cert: ApCertificate;
    let refs;
    if let Some(n) = bundle.strip_prefix("builtin:cantor:") {
        let n = parse_usize(n, "bundle")?;
        let i = witness
            .strip_prefix("builtin:cuntz:")
            .ok_or_else(|| CliError::Config("the Cantor bundle takes --witness builtin:cuntz:I".into()))?;
        let i = parse_usize(i, "witness")?;
        let ctx = GroupCtx::free(n).map_err(|e| core_err("bundle", e))?;
        let words = split_list(targets.unwrap_or("a"), &[';', ',']);
        let elems = words.iter().map(|w| ctx.parse(w)).collect::<Result<Vec<_>, _>>().map_err(|e| core_err("targets", e))?;
        let fam = CuntzFamily::new(n, i, elems).map_err(|e| core_err("targets", e))?;
        cert = ap_certify(&fam, tol, cap).map_err(|e| core_err("ap-check", e))?;
        refs = format!("{bundle} {witness}");
    } else {
        let config = run.config()?;
        let b = config.bundle(bundle)?;
        let alg = b.unit_algebra();
        let mut labels = None;
        let witnesses = if witness == "builtin:uniform" {
            vec![uniform_witness(b.ctx(), alg).map_err(|e| core_err("witness", e))?]
        } else if let Some(n) = witness.strip_prefix("builtin:folner:") {
            let n = parse_usize(n, "witness")?;
            labels = Some((1..=n).map(|k| k.to_string()).collect());
            (1..=n).map(|k| folner_witness(b.ctx(), alg, k)).collect::<Result<_, _>>().map_err(|e| core_err("witness", e))?
        } else if witness.starts_with("builtin:") {
            return Err(CliError::Config(format!("witness '{witness}' does not apply to bundle '{bundle}'")));
        } else {
            let fam_bundle = config.file.witnesses.get(witness).map(|f| f.bundle.as_str());
            if fam_bundle.is_some_and(|fb| fb != bundle) {
                return Err(CliError::Config(format!("witness family '{witness}' is over another bundle")));
            }
            config.family(witness, &b)?
        };
        let default_radius = if b.ctx().is_finite() { 0 } else { config.bundle_radius(bundle).min(1) };
        let spec = targets.unwrap_or("basis");
        let inner = BundleFamily { bundle: &b, witnesses, targets: bundle_targets(&b, spec, default_radius)? };
        let fam = Labeled { labels: labels.unwrap_or_else(|| (0..inner.len()).map(|i| i.to_string()).collect()), inner };
        cert = ap_certify(&fam, tol, cap).map_err(|e| core_err("ap-check", e))?;
        refs = format!("{bundle} {witness}");
    }
    let mut table = Table::new(&["index", "t", "target", "bound", "defect"]);
    for r in &cert.rows {
        table.push(vec![r.index.clone(), r.t.clone(), r.target.clone(), num(r.bound), num(r.defect)]);
    }
    let mut summary = vec![format!("max bound: {} (cap {})", num(cert.max_bound), num(cap))];
    for v in &cert.verdicts {
        summary.push(format!(
            "target {} at t={}: final defect {} {}",
            v.target,
            v.t,
            num(v.final_defect),
            if v.pass { "<= tol" } else { "> tol" }
        ));
    }
    let params = format!("targets={};tol={};cap={}", targets.unwrap_or("default"), num(tol), num(cap));
    run.finish(&table, run.provenance(refs, params), &summary, cert.pass)
}

/// A bundle family whose indices are reported under custom labels (box sizes for Følner).
struct Labeled<'a> {
    inner: BundleFamily<'a>,
    labels: Vec<String>,
}

impl ApProblem for Labeled<'_> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn index_label(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    fn targets(&self) -> Vec<(String, String)> {
        self.inner.targets()
    }

    fn bound(&self, i: usize) -> fellap::Result<f64> {
        self.inner.bound(i)
    }

    fn defect(&self, i: usize, target: usize) -> fellap::Result<f64> {
        self.inner.defect(i, target)
    }
}

fn kernels(run: &Run, bundle: &str, window: usize, samples: usize) -> Result<bool, CliError> {
    let tol = run.cli.tol.unwrap_or(1e-10);
    let config = run.config()?;
    let b = config.bundle(bundle)?;
    let ctx = b.ctx().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(run.cli.seed);
    let shifts = ctx.ball(1);
    let mut table = Table::new(&[
        "window_radius",
        "window_size",
        "dim_mf",
        "sample",
        "norm2",
        "mf_norm",
        "beta_mul_residual",
        "beta_star_residual",
        "beta_comp_residual",
    ]);
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let core = |e| core_err("kernels", e);
    for r in 0..=window {
        let w = WindowF::new(ctx.ball(r)).map_err(core)?;
        let dim = mf_dim(&b, &w);
        for k in 0..samples {
            let h = random_kernel(&b, &w, 0.6, &mut rng);
            let x = random_kernel(&b, &w, 0.6, &mut rng);
            let s = &shifts[rng.gen_range(0..shifts.len())];
            let t = &shifts[rng.gen_range(0..shifts.len())];
            let mul_res = beta_act(&b, s, &k_mul(&b, &h, &x).map_err(core)?)
                .map_err(core)?
                .max_abs_diff(&k_mul(&b, &beta_act(&b, s, &h).map_err(core)?, &beta_act(&b, s, &x).map_err(core)?).map_err(core)?);
            let star_res = beta_act(&b, s, &k_star(&b, &x).map_err(core)?)
                .map_err(core)?
                .max_abs_diff(&k_star(&b, &beta_act(&b, s, &x).map_err(core)?).map_err(core)?);
            let comp_res = beta_act(&b, s, &beta_act(&b, t, &x).map_err(core)?)
                .map_err(core)?
                .max_abs_diff(&beta_act(&b, &ctx.op(s, t), &x).map_err(core)?);
            let mf = mf_embed_norm(&b, &x, &w).map_err(core)?;
            // The same kernel compressed to the previous window must not grow in norm.
            if r > 0 {
                let inner = WindowF::new(ctx.ball(r - 1)).map_err(core)?;
                let small = mf_embed_norm(&b, &x.compress(&inner), &inner).map_err(core)?;
                monotone &= small <= mf + 1e-8;
            }
            worst = worst.max(mul_res).max(star_res).max(comp_res);
            table.push(vec![
                r.to_string(),
                w.len().to_string(),
                dim.to_string(),
                k.to_string(),
                num(norm2(&b, &x).map_err(core)?),
                num(mf),
                num(mul_res),
                num(star_res),
                num(comp_res),
            ]);
        }
    }
    let summary = vec![
        format!("max beta residual: {}", num(worst)),
        format!("compression monotone: {monotone}"),
    ];
    let pass = worst <= tol && monotone;
    let params = format!("window={window};samples={samples};tol={}", num(tol));
    run.finish(&table, run.provenance(bundle.to_string(), params), &summary, pass)
}

fn cuntz_ap(run: &Run, n: usize, imax: usize, targets: &str) -> Result<bool, CliError> {
    let tol = run.cli.tol.unwrap_or(1e-12);
    let ctx = GroupCtx::free(n).map_err(|e| core_err("cuntz-ap", e))?;
    let words = split_list(targets, &[',', ';']);
    let elems = words.iter().map(|w| ctx.parse(w)).collect::<Result<Vec<_>, _>>().map_err(|e| core_err("targets", e))?;
    let mut table = Table::new(&["i", "target", "defect", "predicted", "residual"]);
    let mut worst: f64 = 0.0;
    let mut per_target: BTreeMap<String, f64> = BTreeMap::new();
    for i in 1..=imax {
        let w = xi_witness(i, n).map_err(|e| core_err("cuntz-ap", e))?;
        for g in &elems {
            let d = cuntz_defect_fast(&w, g).map_err(|e| core_err("targets", e))?;
            let p = cuntz_predicted(g, n, i).map_err(|e| core_err("targets", e))?;
            let res = (d - p).abs();
            worst = worst.max(res);
            per_target.insert(ctx.format(g), d);
            table.push(vec![i.to_string(), ctx.format(g), num(d), num(p), num(res)]);
        }
    }
    let mut summary = vec![format!("max residual: {}", num(worst))];
    for (g, d) in &per_target {
        summary.push(format!("target {g}: defect {} at i={imax}", num(*d)));
    }
    let params = format!("n={n};imax={imax};targets={targets};tol={}", num(tol));
    run.finish(&table, run.provenance(format!("builtin:cantor:{n}"), params), &summary, worst <= tol)
}

fn letters(word: &[usize]) -> String {
    word.iter().map(|&k| char::from(b'a' + k as u8)).collect()
}

fn groupoid(run: &Run, n: usize, depth: usize, radius: usize) -> Result<bool, CliError> {
    let t = spectral_groupoid(n, depth, radius).map_err(|e| core_err("groupoid", e))?;
    let report = t.validate();
    let mut table = Table::new(&["source", "g", "range", "unit"]);
    for a in &t.arrows {
        table.push(vec![letters(&a.source), t.ctx().format(&a.g), letters(&a.range), a.is_unit().to_string()]);
    }
    let summary = vec![
        format!("arrows: {}", t.arrows.len()),
        format!("units: {}", t.units().count()),
        format!("axioms: {report}"),
    ];
    let params = format!("n={n};depth={depth};radius={radius}");
    run.finish(&table, run.provenance(format!("builtin:cantor:{n}"), params), &summary, report.passed())
}
