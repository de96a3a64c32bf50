mod common;

use cartan_eds::pfaffian::*;
use cartan_eds::{EdsError, Form, PfaffianSystem};
use common::*;

const SEC30A: [&str; 3] = ["dx1 + x4*dx5", "dx2", "dx3"];
const SIX_A: [&str; 3] = ["dx1 + x4*dx5", "dx2 + x5*dx6", "dx3"];
const SIX_C: [&str; 3] = ["dx1 + x4*dx5", "dx2 + x5*dx6", "dx3 + x6*dx4"];

#[test]
fn frobenius_examples() {
    assert!(is_integrable_frobenius(&sys(&chart(2), &["dx1", "dx2"])));
    assert!(!is_integrable_frobenius(&sys(&chart(3), &["dx3 + x2*dx1"])));
    assert!(!is_integrable_frobenius(&sys(&chart(5), &SEC30A)));
}

#[test]
fn reduce_mod_system_examples() {
    let c = chart(5);
    let two = |s| form_k(&c, s, 2);
    let p = sys(&c, &["dx2", "dx3"]);
    assert!(reduce_mod_system(&two("dx2^dx3"), &p).unwrap().is_zero);

    let p = sys(&c, &SEC30A);
    let r = reduce_mod_system(&two("dx4^dx5"), &p).unwrap();
    assert!(!r.is_zero);
    assert!(!two("dx4^dx5").wedge(&p.wedge_all()).unwrap().is_zero());

    let p = sys(&c, &["dx1 + x4*dx5", "dx2", "dx3 + x5*dx1"]);
    let omega = two("dx5^dx1");
    assert!(reduce_mod_system(&omega, &p).unwrap().is_zero);
    assert!(omega.wedge(&p.wedge_all()).unwrap().is_zero());
}

#[test]
fn reduce_mod_dependent_system_is_error() {
    let c = chart(2);
    let p = sys(&c, &["dx1", "x1*dx1"]);
    assert_eq!(
        reduce_mod_system(&form_k(&c, "dx1^dx2", 2), &p).unwrap_err(),
        EdsError::RankDeficient { rank: 1, count: 2 }
    );
}

#[test]
fn derived_system_examples() {
    let c = chart(5);
    let p = sys(&c, &SEC30A);
    let d = derived_system(&p).unwrap();
    assert!(same_span(d.generators(), &[form(&c, "dx2"), form(&c, "dx3")]));
    assert_eq!(d.rank(), wedge_derived_rank(&c, p.generators()));
    assert!(is_integrable_frobenius(&d));

    let c6 = chart(6);
    let p = sys(&c6, &SIX_C);
    let d = derived_system(&p).unwrap();
    assert_eq!(d.rank(), 0);
    assert_eq!(wedge_derived_rank(&c6, p.generators()), 0);

    let c2 = chart(2);
    let p = sys(&c2, &["dx1", "dx2"]);
    assert!(derived_system(&p).unwrap().same_span(&p));
}

#[test]
fn derived_generators_are_sections_of_the_system() {
    let c = chart(6);
    for gens in [&SIX_A[..], &SIX_C[..]] {
        let p = sys(&c, gens);
        for g in derived_system(&p).unwrap().generators() {
            assert!(p.contains(g));
            assert!(reduce_mod_system(&g.d(), &p).unwrap().is_zero);
        }
    }
}

#[test]
fn derived_flag_examples() {
    let c4 = chart(4);
    let engel = sys(&c4, &["dx2 + x3*dx1", "dx3 + x4*dx1"]);
    let flag = derived_flag(&engel).unwrap();
    assert_eq!(flag.ranks(), vec![2, 1, 0]);
    assert!(!flag.terminal_integrable);
    // Stage ranks by the wedge test.
    assert_eq!(wedge_derived_rank(&c4, engel.generators()), 1);
    assert_eq!(wedge_derived_rank(&c4, flag.stages[1].generators()), 0);

    let c6 = chart(6);
    let flag = derived_flag(&sys(&c6, &SIX_A)).unwrap();
    assert_eq!(flag.ranks(), vec![3, 1, 1]);
    assert!(flag.terminal_integrable);
    assert!(same_span(flag.stages[1].generators(), &[form(&c6, "dx3")]));

    let flag = derived_flag(&sys(&chart(1), &["dx1"])).unwrap();
    assert_eq!(flag.ranks(), vec![1, 1]);
    assert!(flag.terminal_integrable);
}

#[test]
fn derived_flag_honours_cancellation() {
    let token = cartan_eds::CancelToken::new();
    token.cancel();
    let p = sys(&chart(4), &["dx2 + x3*dx1", "dx3 + x4*dx1"]);
    assert_eq!(derived_flag_with(&p, &token).unwrap_err(), EdsError::Cancelled);
}

#[test]
fn characteristic_system_examples() {
    let c3 = chart(3);
    let ch = cauchy_characteristic_system(&sys(&c3, &["dx3 + x2*dx1"])).unwrap();
    assert_eq!(ch.rank(), 3);

    let c2 = chart(2);
    let p = sys(&c2, &["dx1", "dx2"]);
    assert!(cauchy_characteristic_system(&p).unwrap().same_span(&p));

    let c5 = chart(5);
    let ch = cauchy_characteristic_system(&sys(&c5, &SEC30A)).unwrap();
    assert_eq!(ch.rank(), 5);
    // Contractions of dω¹ = dx4∧dx5 with ∂x4 and ∂x5 − x4∂x1.
    let dw = form_k(&c5, "dx4^dx5", 2);
    let a = dw.interior(&field(&c5, "@x4")).unwrap();
    let b = dw.interior(&field(&c5, "@x5 - x4*@x1")).unwrap();
    let mut expected: Vec<Form> = SEC30A.iter().map(|g| form(&c5, g)).collect();
    expected.push(a);
    expected.push(b);
    assert!(same_span(ch.generators(), &expected));
}

#[test]
fn cartan_class_examples() {
    let cases: [(usize, &[&str], usize); 3] = [
        (3, &["dx3 + x2*dx1"], 3),
        (5, &["dx5 + x4*dx3 + x2*dx1"], 5),
        (2, &["dx1", "dx2"], 2),
    ];
    for (n, gens, class) in cases {
        let c = chart(n);
        let p = sys(&c, gens);
        assert_eq!(cartan_class(&p).unwrap(), class, "{gens:?}");
        let pt = generic_point(&p).unwrap();
        assert_eq!(class_at_point(&p, &pt), class, "{gens:?}");
    }
}

#[test]
fn darboux_class_examples() {
    let c3 = chart(3);
    let w = form(&c3, "dx3 + x2*dx1");
    assert_eq!(darboux_class(&w, None).unwrap(), 3);
    assert_eq!(wedge_power_index(&w), 1);

    let c = named("x1 x2 p1 p2");
    let w = form(&c, "p1*dx1 + p2*dx2");
    assert_eq!(darboux_class(&w, None).unwrap(), 4);
    // ω∧dω ≠ 0, ω∧(dω)² = 0 and (dω)² ≠ 0.
    assert!(!w.wedge(&w.d()).unwrap().is_zero());
    assert!(w.wedge(&w.d().wedge_power(2)).unwrap().is_zero());
    assert!(!w.d().wedge_power(2).is_zero());

    assert_eq!(darboux_class(&Form::dx(&chart(1), 0), None).unwrap(), 1);
}

#[test]
fn darboux_class_pointwise() {
    let c = named("x1 x2 p1 p2");
    let w = form(&c, "p1*dx1 + p2*dx2");
    assert_eq!(darboux_class(&w, Some(&point(&c, &[(2, 1)]))).unwrap(), 4);
    assert_eq!(
        darboux_class(&w, Some(&point(&c, &[]))),
        Err(EdsError::VanishingAtPoint)
    );
    assert_eq!(darboux_class(&Form::zero(&c, 1), None), Err(EdsError::VanishingForm));
}

#[test]
fn gender_examples() {
    assert_eq!(gender(&sys(&chart(2), &["dx1", "dx2"])).unwrap(), 0);

    let c3 = chart(3);
    let w = form(&c3, "dx3 + x2*dx1");
    assert_eq!(gender(&sys(&c3, &["dx3 + x2*dx1"])).unwrap(), 1);
    assert_eq!(wedge_power_index(&w), 1);

    let c5 = chart(5);
    let w = form(&c5, "dx5 + x4*dx3 + x2*dx1");
    assert_eq!(gender(&sys(&c5, &["dx5 + x4*dx3 + x2*dx1"])).unwrap(), 2);
    assert_eq!(wedge_power_index(&w), 2);
}

#[test]
fn section_gender_modulo_system_and_null_system() {
    let c = chart(5);
    let p = sys(&c, &SEC30A);
    let w = form(&c, "dx1 + x4*dx5 + x2*dx3");
    assert_eq!(form_gender(&w, &p).unwrap(), 1);
    assert_eq!(form_gender(&w, &PfaffianSystem::empty(&c)).unwrap(), 2);
}

#[test]
fn polar_space_examples() {
    let c = chart(5);
    let p = sys(&c, &SEC30A);
    let origin = point(&c, &[]);
    let sigma = polar_space(&p, &origin, &[]).unwrap();
    assert_eq!(sigma.len(), 2);

    let e = vec![vector(&c, &[(3, 1)])];
    let polar = polar_space(&p, &origin, &e).unwrap();
    assert_eq!(polar.len(), 1);
    assert_eq!(cartan_eds::linalg::rank([polar.clone(), e.clone()].concat(), 5), 1);
    // dω¹(∂x4, ∂x5) = 1 rules out the other direction.
    let dw = form_k(&c, "dx4^dx5", 2);
    assert_eq!(two_form_on(&dw, &e[0], &vector(&c, &[(4, 1)])), q(1, 1));

    let ci = chart(5);
    let pi = sys(&ci, &["dx1", "dx2"]);
    let e = vec![vector(&ci, &[(2, 1)]), vector(&ci, &[(3, 1)])];
    assert_eq!(polar_space(&pi, &point(&ci, &[]), &e).unwrap().len(), 3);
}

#[test]
fn polar_space_rejects_bad_elements() {
    let c = chart(5);
    let p = sys(&c, &SEC30A);
    let origin = point(&c, &[]);
    let outside = vec![vector(&c, &[(0, 1)])];
    assert_eq!(
        polar_space(&p, &origin, &outside),
        Err(EdsError::NotInAnnihilator { index: 0 })
    );
    let not_integral = vec![vector(&c, &[(3, 1)]), vector(&c, &[(4, 1)])];
    assert_eq!(
        polar_space(&p, &origin, &not_integral),
        Err(EdsError::NotIntegral(0, 1))
    );
}

#[test]
fn character_examples() {
    let c5 = chart(5);
    let r = character_chain(&sys(&c5, &SEC30A), &point(&c5, &[]), ChainStrategy::Generic).unwrap();
    assert_eq!(r.rho_k, 1);
    assert_eq!(r.character, 1);

    let c6 = chart(6);
    let r = character_chain(&sys(&c6, &SIX_A), &point(&c6, &[]), ChainStrategy::Generic).unwrap();
    assert_eq!(r.character, 2);

    let r = character_chain(&sys(&c5, &["dx1", "dx2"]), &point(&c5, &[]), ChainStrategy::Generic).unwrap();
    assert_eq!(r.rho_k, 3);
    assert_eq!(r.character, 0);
}

#[test]
fn character_chain_invariants_hold_for_every_strategy() {
    let c6 = chart(6);
    let origin = point(&c6, &[]);
    for gens in [&SIX_A[..], &SIX_C[..]] {
        let p = sys(&c6, gens);
        for s in [
            ChainStrategy::Generic,
            ChainStrategy::FirstBasis,
            ChainStrategy::SeededRandom(7),
        ] {
            let r = character_chain(&p, &origin, s).unwrap();
            assert!(r.rho_k <= 6 - 3);
            assert!(r.enlarged_characters.windows(2).all(|w| w[0] >= w[1]));
            for (e, polar) in r.chain.iter().zip(&r.polar_spaces) {
                let both = [e.clone(), polar.clone()].concat();
                assert_eq!(cartan_eds::linalg::rank(both, 6), polar.len());
            }
        }
    }
}

#[test]
fn seeded_strategy_is_reproducible() {
    let c6 = chart(6);
    let p = sys(&c6, &SIX_A);
    let pt = sample_point(&c6, 1);
    let a = character_chain(&p, &pt, ChainStrategy::SeededRandom(11)).unwrap();
    let b = character_chain(&p, &pt, ChainStrategy::SeededRandom(11)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn character_two_examples() {
    let c6 = chart(6);
    let origin = point(&c6, &[]);
    let a = character_two_report(&sys(&c6, &SIX_A), &origin).unwrap();
    assert_eq!(a.character, 2);
    assert_eq!(a.derived_rank_drop, 2);
    assert!(!a.singular);

    let b = character_two_report(&sys(&c6, &SIX_C), &origin).unwrap();
    assert_eq!(b.character, 2);
    assert!(b.null_characteristics);
    assert_eq!(b.derived_rank_drop, 3);
    assert!(b.singular);
}

#[test]
fn singularity_scan_examples() {
    let c3 = chart(3);
    let p = sys(&c3, &["dx3 + x2*dx1"]);
    let pts = [point(&c3, &[]), point(&c3, &[(1, 1)])];
    let (generic, rows) = singularity_scan(&p, &pts).unwrap();
    assert_eq!(generic.class, 3);
    for row in &rows {
        assert!(!row.flagged);
        assert_eq!(row.outcome.as_ref().unwrap().class, 3);
    }

    let c1 = chart(1);
    let p = sys(&c1, &["x1*dx1"]);
    let (generic, rows) = singularity_scan(&p, &[point(&c1, &[])]).unwrap();
    assert_eq!(generic.rank, 1);
    assert_eq!(rows[0].outcome.as_ref().unwrap().rank, 0);
    assert!(rows[0].flagged);

    let (_, rows) = singularity_scan(&p, &[]).unwrap();
    assert!(rows.is_empty());
}

#[test]
fn scan_continues_past_poles() {
    let c2 = chart(2);
    let p = sys(&c2, &["dx1 + dx2/x1"]);
    let (_, rows) = singularity_scan(&p, &[point(&c2, &[]), point(&c2, &[(0, 1)])]).unwrap();
    assert_eq!(rows[0].outcome, Err(EdsError::Pole));
    assert!(rows[0].flagged);
    assert!(rows[1].outcome.is_ok());
}
