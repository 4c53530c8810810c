use fellap::ap::ap_certify;
use fellap::cantor::*;
use fellap::GroupCtx;

#[test]
fn positive_words_have_defect_length_over_i() {
    for n in 2..=3 {
        let ctx = GroupCtx::free(n).unwrap();
        for g in ctx.ball(2).into_iter().filter(|g| ctx.is_positive(g).unwrap()) {
            let len = ctx.word_length(&g);
            let mut last = f64::INFINITY;
            for i in len..=10 {
                let d = cuntz_defect_fast(&xi_witness(i, n).unwrap(), &g).unwrap();
                assert!((d - len as f64 / i as f64).abs() < 1e-12);
                assert!(d <= last);
                last = d;
            }
        }
    }
}

#[test]
fn bruteforce_oracle_on_mixed_words() {
    let ctx = GroupCtx::free(2).unwrap();
    for g in ctx.ball(3) {
        let sym = PartialSymbol::new(&g, 2).unwrap();
        for i in 1..=3 {
            let w = xi_witness(i, 2).unwrap();
            if !sym.has_domain() {
                assert!(cuntz_defect_fast(&w, &g).is_err());
                continue;
            }
            let fast = cuntz_defect_fast(&w, &g).unwrap();
            let slow = cuntz_defect_bruteforce(&w, &g).unwrap();
            assert!((fast - slow).abs() < 1e-12, "{} i={i}", ctx.format(&g));
            assert!((fast - cuntz_predicted(&g, 2, i).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn generator_trace_through_certification() {
    let ctx = GroupCtx::free(3).unwrap();
    let fam = CuntzFamily::new(3, 8, vec![ctx.parse("c").unwrap()]).unwrap();
    let cert = ap_certify(&fam, 0.2, 1.0 + 1e-12).unwrap();
    for (k, row) in cert.rows.iter().enumerate() {
        assert!((row.defect - 1.0 / (k + 1) as f64).abs() < 1e-12);
        assert!((row.bound - 1.0).abs() < 1e-12);
    }
    assert!(cert.pass);
}

#[test]
fn groupoid_tables_satisfy_the_axioms() {
    for (n, d, r) in [(2, 0, 2), (2, 2, 1), (3, 1, 2)] {
        let t = spectral_groupoid(n, d, r).unwrap();
        assert!(t.validate().passed());
        assert_eq!(t.units().count(), n.pow(d as u32));
    }
    assert!(validate_cylinder_action(3, 2).unwrap().passed());
}
