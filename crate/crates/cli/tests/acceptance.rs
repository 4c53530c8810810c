//! Acceptance suite. Runs without the libtest harness so that every criterion prints its
//! own pass/fail line; the process exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use fellap::ap::{ap_defect, ap_defect_partial, convexify, folner_witness, uniform_witness, APWitness};
use fellap::cantor::{cuntz_defect_bruteforce, cuntz_defect_fast, xi_witness};
use fellap::fdalg::{globalize_finite, orbit_span_rank};
use fellap::kernels::*;
use fellap::linalg::{Mat, Vector, C64};
use fellap::random::{
    random_exterior_twist, random_free_action, random_partial_finite, random_subset, random_witness_values,
};
use fellap::{CPartialAction, Elem, FdAlgebra, FdElement, FellBundle, GroupCtx, Ideal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn finite_groups() -> Vec<GroupCtx> {
    let mut v: Vec<GroupCtx> = (2..=6).map(|m| GroupCtx::cyclic(m).unwrap()).collect();
    v.push(GroupCtx::symmetric(3).unwrap());
    v
}

fn f2() -> GroupCtx {
    GroupCtx::free(2).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit(alg: &FdAlgebra, ideal: &Ideal) -> FdElement {
    FdElement::unit_of(alg, ideal)
}

fn fell_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let groups = finite_groups();
    let alg_f2 = FdAlgebra::new(vec![1, 2]).unwrap();
    let mut worst: f64 = 0.0;
    let mut counts = [0usize; 2];
    for k in 0..1000 {
        let which = k % (groups.len() + 1);
        let twisted = (k / (groups.len() + 1)) % 2 == 1;
        let (bundle, radius) = if which < groups.len() {
            let pa = random_partial_finite(&groups[which], &mut rng);
            let b = if twisted {
                FellBundle::make_twisted(random_exterior_twist(&pa, 0, &mut rng), 0)
            } else {
                FellBundle::make_semidirect(pa, 0)
            };
            (b, 0)
        } else {
            let pa = random_free_action(&f2(), &alg_f2, &mut rng);
            let b = if twisted {
                FellBundle::make_twisted(random_exterior_twist(&pa, 2, &mut rng), 2)
            } else {
                FellBundle::make_semidirect(pa, 2)
            };
            (b, 2)
        };
        let bundle = bundle.map_err(|e| format!("bundle {k} rejected: {e}"))?;
        let report = bundle.validate(radius, 12, k as u64);
        check(report.passed(), || format!("bundle {k}: {report}"))?;
        worst = worst.max(report.max_violation());
        counts[twisted as usize] += 1;
    }
    let elapsed = start.elapsed();
    check(worst <= 1e-10, || format!("max residual {worst:e}"))?;
    check(elapsed <= Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} semidirect + {} twisted bundles, max residual {worst:.2e}, {:.1}s",
        counts[0],
        counts[1],
        elapsed.as_secs_f64()
    ))
}

fn globalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let groups = finite_groups();
    let mut worst: f64 = 0.0;
    let mut unit_checks = 0;
    for k in 0..200 {
        let ctx = &groups[k % groups.len()];
        let pa = random_partial_finite(ctx, &mut rng);
        let alg = pa.algebra();
        let g = globalize_finite(&pa).map_err(|e| format!("instance {k}: {e}"))?;
        let report = g.verify(&pa);
        check(report.passed(), || format!("instance {k}: {report}"))?;
        let rt = &report.checks["restriction round-trip"];
        check(rt.instances == ctx.order().unwrap(), || format!("instance {k}: round-trip covered {} elements", rt.instances))?;
        worst = worst.max(rt.max_violation);
        let rank = orbit_span_rank(&pa).map_err(|e| e.to_string())?;
        check(rank == g.envelope.algebra().dim(), || format!("instance {k}: span rank {rank}"))?;

        // ι intertwines α_t and σ_t on A_{t⁻¹}
        for t in ctx.ball(0) {
            let x = alg.random_in_ideal(&pa.domain(&ctx.inverse(&t)), &mut rng);
            let lhs = g.iota.apply(&pa.apply(&t, &x).unwrap());
            let rhs = g.envelope.apply(&t, &g.iota.apply(&x)).unwrap();
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        // γ_t(1_{t⁻¹}1_s) = 1_t 1_{ts}, every pair
        for t in ctx.ball(0) {
            let tinv = ctx.inverse(&t);
            for s in ctx.ball(0) {
                let lhs = pa.alpha(&t).apply(&unit(alg, &pa.domain(&tinv)).mul(&unit(alg, &pa.domain(&s))));
                let rhs = unit(alg, &pa.domain(&t)).mul(&unit(alg, &pa.domain(&ctx.op(&t, &s))));
                worst = worst.max(lhs.max_abs_diff(&rhs));
                unit_checks += 1;
            }
        }
    }
    check(worst <= 1e-10, || format!("max residual {worst:e}"))?;
    Ok(format!("200 actions, {unit_checks} unit identities, max residual {worst:.2e}"))
}

/// `Σ_j c_j 1_{d_j}` for `c` in the center algebra (one coordinate per block).
fn embed_center(alg: &FdAlgebra, c: &FdElement) -> FdElement {
    let blocks = (0..alg.block_count()).map(|j| Mat::identity(alg.block_dim(j), alg.block_dim(j)) * c.block(j)[(0, 0)]).collect();
    FdElement::from_blocks(alg, blocks).unwrap()
}

fn central_action() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let groups = finite_groups();
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let ctx = &groups[k % groups.len()];
        let pa = random_partial_finite(ctx, &mut rng);
        let alg = pa.algebra().clone();
        let b = FellBundle::make_semidirect(pa.clone(), 0).unwrap();
        let sigma = b.central_partial_action(0).map_err(|e| format!("instance {k}: {e}"))?;
        let center = pa.center_restriction();
        let z = sigma.algebra();
        check(z.blocks().len() == alg.block_count(), || format!("instance {k}: center has wrong size"))?;
        for t in ctx.ball(0) {
            let d = sigma.alpha(&t).distance(&center.alpha(&t));
            let d = d.ok_or_else(|| format!("instance {k}: block maps differ at {}", ctx.format(&t)))?;
            worst = worst.max(d);
            // σ_t agrees with α_t on central elements of A_{t⁻¹}
            let c = z.random_in_ideal(&sigma.domain(&ctx.inverse(&t)), &mut rng);
            let lhs = pa.apply(&t, &embed_center(&alg, &c)).unwrap();
            let rhs = embed_center(&alg, &sigma.apply(&t, &c).unwrap());
            worst = worst.max(lhs.max_abs_diff(&rhs));
            for s in ctx.ball(0) {
                let p = |x: &Elem| unit(z, &sigma.domain(x));
                let lhs = sigma.alpha(&t).apply(&p(&ctx.inverse(&t)).mul(&p(&s)));
                let rhs = p(&t).mul(&p(&ctx.op(&t, &s)));
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
        }
    }
    check(worst <= 1e-10, || format!("max residual {worst:e}"))?;
    Ok(format!("200 bundles, max residual {worst:.2e}"))
}

fn kernel_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ctx = f2();
    let alg = FdAlgebra::new(vec![1, 2]).unwrap();
    let pool = ctx.ball(2);
    let mut worst: f64 = 0.0;
    let mut max_window = 0;
    let mut bundles = Vec::new();
    for _ in 0..5 {
        bundles.push(FellBundle::make_semidirect(random_free_action(&ctx, &alg, &mut rng), 4).unwrap());
    }
    let z4 = GroupCtx::cyclic(4).unwrap();
    let finite = FellBundle::make_semidirect(random_partial_finite(&z4, &mut rng), 0).unwrap();
    for k in 0..500 {
        let (b, elems) = if k % 5 == 4 {
            (&finite, z4.ball(0))
        } else {
            let n = rng.gen_range(2..=12);
            (&bundles[k % 4], random_subset(&pool, n, &mut rng))
        };
        let ctx = b.ctx();
        let w = WindowF::new(elems).unwrap();
        max_window = max_window.max(w.len());
        let h = random_kernel(b, &w, 0.5, &mut rng);
        let kk = random_kernel(b, &w, 0.5, &mut rng);
        let shifts = ctx.ball(1);
        let s = &shifts[rng.gen_range(0..shifts.len())];
        let t = &shifts[rng.gen_range(0..shifts.len())];
        let beta = |g: &Elem, x: &Kernel| beta_act(b, g, x).unwrap();
        let mul = |x: &Kernel, y: &Kernel| k_mul(b, x, y).unwrap();
        let star = |x: &Kernel| k_star(b, x).unwrap();
        worst = worst.max(beta(s, &beta(t, &kk)).max_abs_diff(&beta(&ctx.op(s, t), &kk)));
        worst = worst.max(beta(s, &mul(&h, &kk)).max_abs_diff(&mul(&beta(s, &h), &beta(s, &kk))));
        worst = worst.max(beta(s, &star(&kk)).max_abs_diff(&star(&beta(s, &kk))));

        let f = b.random_section(w.elems(), &mut rng);
        let lhs = pi_apply(b, &mul(&h, &kk), &f).unwrap();
        let rhs = pi_apply(b, &kk, &pi_apply(b, &h, &f).unwrap()).unwrap();
        worst = worst.max(lhs.max_abs_diff(&rhs));

        let [xi, eta, mu, nu] = [(); 4].map(|_| b.random_section(&random_subset(w.elems(), 4, &mut rng), &mut rng));
        let lhs = mul(&rank_one(b, &mu, &nu).unwrap(), &rank_one(b, &xi, &eta).unwrap());
        let inner = b.l2_inner(&eta, &mu).unwrap();
        let shifted: BTreeMap<Elem, Vector> = xi.values().iter().map(|(r, v)| (r.clone(), b.unit_right(r, v, &inner))).collect();
        let rhs = rank_one(b, &b.section(shifted).unwrap(), &nu).unwrap();
        worst = worst.max(lhs.max_abs_diff(&rhs));

        if w.len() > 1 {
            let small = WindowF::new(w.elems()[..w.len() / 2].to_vec()).unwrap();
            let big_norm = mf_embed_norm(b, &kk, &w).unwrap();
            let small_norm = mf_embed_norm(b, &kk.compress(&small), &small).unwrap();
            check(small_norm <= big_norm + 1e-9, || format!("kernel {k}: {small_norm} > {big_norm} after compression"))?;
            let only_small = random_kernel(b, &small, 0.7, &mut rng);
            let a = mf_embed_norm(b, &only_small, &small).unwrap();
            let c = mf_embed_norm(b, &only_small, &w).unwrap();
            check((a - c).abs() <= 1e-9, || format!("kernel {k}: norm changes under nesting ({a} vs {c})"))?;
        }
    }
    check(worst <= 1e-10, || format!("max residual {worst:e}"))?;
    Ok(format!("500 kernels, windows up to |F| = {max_window}, max residual {worst:.2e}"))
}

fn ap_exact_values() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_uniform: f64 = 0.0;
    let mut targets = 0;
    for ctx in finite_groups() {
        for twisted in [false, true] {
            let pa = random_partial_finite(&ctx, &mut rng);
            let b = if twisted {
                FellBundle::make_twisted(random_exterior_twist(&pa, 0, &mut rng), 0).unwrap()
            } else {
                FellBundle::make_semidirect(pa, 0).unwrap()
            };
            let a = uniform_witness(&ctx, b.unit_algebra()).unwrap();
            for t in ctx.ball(0) {
                for v in b.fiber_basis(&t) {
                    worst_uniform = worst_uniform.max(ap_defect(&b, &a, &t, &v).unwrap());
                    targets += 1;
                }
            }
        }
    }
    check(worst_uniform <= 1e-12, || format!("uniform defect {worst_uniform:e}"))?;

    let z = GroupCtx::lattice(1).unwrap();
    let alg = FdAlgebra::new(vec![2]).unwrap();
    let b = FellBundle::group_bundle(z.clone(), alg.clone());
    let mut worst_folner: f64 = 0.0;
    for n in 1..=64usize {
        let a = folner_witness(&z, &alg, n).unwrap();
        for t in -(n as i64)..=(n as i64) {
            let te = Elem::Lattice(vec![t]);
            let x = b.random_fiber(&te, &mut rng);
            let norm = alg.op_norm(&b.to_unit(&x)).unwrap();
            let expected = t.unsigned_abs() as f64 / n as f64 * norm;
            worst_folner = worst_folner.max((ap_defect(&b, &a, &te, &x).unwrap() - expected).abs());
        }
    }
    check(worst_folner <= 1e-12, || format!("Følner deviation {worst_folner:e}"))?;
    Ok(format!("uniform: {targets} targets, max defect {worst_uniform:.2e}; Følner N ≤ 64: max deviation {worst_folner:.2e}"))
}

fn cuntz_law() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in [2, 3] {
        let ctx = GroupCtx::free(n).unwrap();
        let positive: Vec<Elem> = ctx.ball(2).into_iter().filter(|g| ctx.is_positive(g).unwrap()).collect();
        for g in &positive {
            let len = ctx.word_length(g);
            for i in len.max(1)..=10 {
                let w = xi_witness(i, n).unwrap();
                let d = cuntz_defect_fast(&w, g).unwrap();
                worst = worst.max((d - len as f64 / i as f64).abs());
                if i <= 4 {
                    worst = worst.max((d - cuntz_defect_bruteforce(&w, g).unwrap()).abs());
                }
                cases += 1;
            }
        }
        for i in 1..=10 {
            worst = worst.max((xi_witness(i, n).unwrap().bound() - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    check(elapsed <= Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases} (g, i) cases, max deviation {worst:.2e}, {:.1}s", elapsed.as_secs_f64()))
}

fn convexifier() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ctx = f2();
    let alg = FdAlgebra::new(vec![1, 2]).unwrap();
    let pool = ctx.ball(1);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let b = FellBundle::make_semidirect(random_free_action(&ctx, &alg, &mut rng), 2).unwrap();
        let m = rng.gen_range(1..=3);
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum::<f64>() * rng.gen_range(1.0..1.5);
        let ws: Vec<(APWitness, f64)> = raw
            .iter()
            .map(|l| (APWitness::new(random_witness_values(&alg, &random_subset(&pool, 3, &mut rng), &mut rng)), l / total))
            .collect();
        let targets: Vec<(Elem, Vector)> = random_subset(&pool, 2, &mut rng)
            .into_iter()
            .map(|t| {
                let v = b.random_fiber(&t, &mut rng);
                (t, v)
            })
            .collect();
        let (_, cert) = convexify(&b, &ws, &targets, 6).map_err(|e| format!("list {k}: {e}"))?;
        check(cert.translates.iter().all(|r| ctx.word_length(r) <= 6), || format!("list {k}: translate outside ball(6)"))?;
        // disjointness of the translated supports, recomputed here
        let mut seen = BTreeSet::new();
        for ((a, _), r) in ws.iter().zip(&cert.translates) {
            for s in a.translate(&ctx, r).support() {
                check(seen.insert(s.clone()), || format!("list {k}: translated supports overlap"))?;
            }
        }
        worst = worst.max(cert.inner_residual);
        worst = cert.sum_residuals.iter().cloned().fold(worst, f64::max);
        let max_in = cert.input_bounds.iter().cloned().fold(0.0, f64::max);
        check(cert.output_bound <= max_in + 1e-12, || format!("list {k}: output bound {} > {max_in}", cert.output_bound))?;
    }
    check(worst <= 1e-12, || format!("max residual {worst:e}"))?;
    Ok(format!("100 lists, max identity residual {worst:.2e}"))
}

fn conditional_expectation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let z4 = GroupCtx::cyclic(4).unwrap();
    let sub_group = FellBundle::group_bundle(z4.clone(), FdAlgebra::new(vec![1, 2]).unwrap());
    let h: BTreeSet<Elem> = [Elem::Finite(0), Elem::Finite(2)].into_iter().collect();
    let f2b = FellBundle::make_semidirect(random_free_action(&f2(), &FdAlgebra::new(vec![1, 2]).unwrap(), &mut rng), 2).unwrap();
    let z3 = GroupCtx::cyclic(3).unwrap();
    let m2 = FellBundle::group_bundle(z3.clone(), FdAlgebra::new(vec![2]).unwrap());
    // diagonal part of M_2 on the unit fiber
    let mut diag = Mat::zeros(4, 4);
    diag[(0, 0)] = C64::new(1.0, 0.0);
    diag[(3, 3)] = C64::new(1.0, 0.0);
    let fixtures: Vec<(&str, &FellBundle, SubBundle, Vec<Elem>, usize)> = vec![
        ("subgroup of Z_4", &sub_group, SubBundle::Subgroup(h), z4.ball(0), 0),
        ("unit fiber over F_2", &f2b, SubBundle::UnitFiber, f2().ball(2), 2),
        ("diagonal of M_2 over Z_3", &m2, SubBundle::Linear([(z3.id(), diag)].into_iter().collect()), z3.ball(0), 0),
    ];
    let mut worst_bimodule: f64 = 0.0;
    let mut count = 0;
    for (name, b, sub, pool, radius) in &fixtures {
        let d = sub.bimodule_defect(b, *radius, 300, 9);
        worst_bimodule = worst_bimodule.max(d);
        for k in 0..67 {
            if count == 200 {
                break;
            }
            count += 1;
            let w = WindowF::new(random_subset(pool, 8, &mut rng)).unwrap();
            let kk = random_kernel(b, &w, 0.8, &mut rng);
            let p = cond_expectation_pf(b, sub, &kk, &w).unwrap();
            let pp = cond_expectation_pf(b, sub, &p, &w).unwrap();
            check(pp == p, || format!("{name}, kernel {k}: P_F is not idempotent"))?;
            let (np, nk) = (mf_embed_norm(b, &p, &w).unwrap(), mf_embed_norm(b, &kk, &w).unwrap());
            check(np <= nk + 1e-8, || format!("{name}, kernel {k}: ‖P(k)‖ = {np} > ‖k‖ = {nk}"))?;
        }
    }
    check(worst_bimodule <= 1e-10, || format!("bimodule residual {worst_bimodule:e}"))?;
    Ok(format!("{count} kernels over 3 fixtures, bimodule residual {worst_bimodule:.2e}"))
}

fn cross_module() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let groups = finite_groups();
    let mut worst: f64 = 0.0;
    for k in 0..300 {
        let ctx = &groups[k % groups.len()];
        let pa: CPartialAction = random_partial_finite(ctx, &mut rng);
        let b = FellBundle::make_semidirect(pa.clone(), 0).unwrap();
        let support = random_subset(&ctx.ball(0), 4, &mut rng);
        let a = APWitness::new(random_witness_values(pa.algebra(), &support, &mut rng));
        let all = ctx.ball(0);
        let t = &all[rng.gen_range(0..all.len())];
        let x = pa.algebra().random_in_ideal(&pa.domain(t), &mut rng);
        let v = b.project(t, &x).unwrap();
        let d1 = ap_defect_partial(&pa, &a, t, &x).unwrap();
        let d2 = ap_defect(&b, &a, t, &v).unwrap();
        worst = worst.max((d1 - d2).abs());
        // zero witness: the defect is the norm of b
        let d0 = ap_defect_partial(&pa, &APWitness::zero(), t, &x).unwrap();
        worst = worst.max((d0 - pa.algebra().op_norm(&x).unwrap()).abs());
    }
    check(worst <= 1e-10, || format!("max disagreement {worst:e}"))?;
    Ok(format!("300 instances, max disagreement {worst:.2e}"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_fellap");
    let configs = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: Vec<Vec<String>> = vec![
        vec!["--config", "f2.json", "validate", "semidirect", "--radius", "2", "--seed", "11"],
        vec!["--config", "z3.json", "validate", "corrupted"],
        vec!["--config", "z3.json", "globalize", "swap"],
        vec!["--config", "s3.json", "ap-check", "--bundle", "semidirect", "--witness", "builtin:uniform"],
        vec!["--config", "z.json", "ap-check", "--bundle", "line", "--witness", "builtin:folner:8", "--targets", "1;-2"],
        vec!["--config", "f2.json", "kernels", "--bundle", "semidirect", "--window", "1", "--seed", "5"],
        vec!["cuntz-ap", "--n", "3", "--imax", "6", "--targets", "a,bc,aB"],
        vec!["ap-check", "--bundle", "builtin:cantor:2", "--witness", "builtin:cuntz:5", "--targets", "a;ab"],
        vec!["groupoid", "--n", "2", "--depth", "2", "--radius", "1"],
    ]
    .into_iter()
    .map(|r| r.into_iter().map(|s| if s.ends_with(".json") { format!("{configs}/{s}") } else { s.to_string() }).collect())
    .collect();
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("run{k}-{rep}.csv"));
            let status = Command::new(bin)
                .args(args)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            check(status.status.code().is_some(), || format!("{args:?} was killed"))?;
            outputs.push(std::fs::read(&out).map_err(|e| format!("{args:?}: {e}"))?);
        }
        check(outputs[0] == outputs[1], || format!("{args:?} differs between runs"))?;
        check(!outputs[0].is_empty(), || format!("{args:?} produced no CSV"))?;
    }
    Ok(format!("{} commands, byte-identical over two runs each", runs.len()))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("Fell-axiom suite", fell_axioms),
        ("globalization round-trip", globalization),
        ("central partial action", central_action),
        ("kernel algebra", kernel_algebra),
        ("AP exact values", ap_exact_values),
        ("Cuntz defect law", cuntz_law),
        ("convexifier contract", convexifier),
        ("conditional expectation P_F", conditional_expectation),
        ("partial vs bundle defect", cross_module),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
