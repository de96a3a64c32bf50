//! Randomized property checks shared by the property and acceptance suites.

use super::*;
use cartan_eds::contact::{
    cauchy_char_field, hamiltonian_of_field, jacobi_bracket, lagrange_bracket, lie_field_from_hamiltonian,
    prolong_vector_field, restrict_system, total_derivative, ContactChart, Hamiltonian, PdeSystem,
};
use cartan_eds::formlang::{parse_document, render_document, SystemDocument};
use cartan_eds::linalg::{self, generic_rank};
use cartan_eds::pfaffian::{cartan_class, cartan_class_at, derived_system, is_integrable_frobenius};
use cartan_eds::poly::Poly;
use cartan_eds::{Chart, Form, PfaffianSystem, PointAssignment, RationalFunction, VectorField};
use num::{BigInt, BigRational};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x00ca_97a2),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Run `test` on `cases` values of `strategy` from the fixed seed.
fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    TestRunner::new(config(cases))
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

/// Monomials as lists of variable indices, so `deg` bounds the total degree.
type RawPoly = Vec<(i64, Vec<usize>)>;

fn raw_poly(nvars: usize, deg: usize, terms: usize) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0..nvars, 0..=deg)), 0..=terms)
}

fn to_rf(nvars: usize, raw: &RawPoly) -> RationalFunction {
    let terms = raw.iter().map(|(c, vars)| {
        let mut e = vec![0u32; nvars];
        for &v in vars {
            e[v] += 1;
        }
        (e, BigRational::from_integer(BigInt::from(*c)))
    });
    RationalFunction::from_poly(Poly::from_terms(nvars, terms))
}

/// Map variable indices through `vars` before building.
fn to_rf_on(nvars: usize, vars: &[usize], raw: &RawPoly) -> RationalFunction {
    let mapped: RawPoly = raw
        .iter()
        .map(|(c, vs)| (*c, vs.iter().map(|&v| vars[v % vars.len()]).collect()))
        .collect();
    to_rf(nvars, &mapped)
}

type RawForm = Vec<(u64, RawPoly)>;

fn raw_form(n: usize, deg: usize) -> impl Strategy<Value = RawForm> {
    prop::collection::vec((0u64..(1u64 << n), raw_poly(n, deg, 3)), 0..=5)
}

fn to_form(c: &Chart, k: usize, raw: &RawForm) -> Form {
    let terms = raw
        .iter()
        .filter(|(m, _)| m.count_ones() as usize == k)
        .map(|(m, p)| (*m, to_rf(c.dim(), p)));
    Form::from_terms(c, k, terms)
}

fn raw_field(n: usize, deg: usize) -> impl Strategy<Value = Vec<RawPoly>> {
    prop::collection::vec(raw_poly(n, deg, 3), n)
}

fn to_field(c: &Chart, raw: &[RawPoly]) -> VectorField {
    VectorField::new(c, raw.iter().map(|p| to_rf(c.dim(), p)).collect()).unwrap()
}

fn small_point(c: &Chart, values: &[i64]) -> PointAssignment {
    PointAssignment::new(c, values.iter().take(c.dim()).map(|&v| q(v, 1)).collect()).unwrap()
}

fn sign(k: usize) -> BigRational {
    if k.is_multiple_of(2) {
        q(1, 1)
    } else {
        q(-1, 1)
    }
}

// ------------------------------------------------------------ exterior calculus

pub fn d_squared_is_zero() -> Result<(), String> {
    run(
        500,
        (3usize..=6).prop_flat_map(|n| (Just(n), 0usize..=2, raw_form(n, 3))),
        |(n, k, raw)| {
            let c = chart(n);
            let a = to_form(&c, k, &raw);
            prop_assert!(a.d().d().is_zero());
            Ok(())
        },
    )
}

pub fn leibniz_rule_for_d() -> Result<(), String> {
    run(
        128,
        (3usize..=5).prop_flat_map(|n| (Just(n), 0usize..=2, 0usize..=2, raw_form(n, 2), raw_form(n, 2))),
        |(n, ka, kb, ra, rb)| {
            let c = chart(n);
            let a = to_form(&c, ka, &ra);
            let b = to_form(&c, kb, &rb);
            let lhs = a.wedge(&b).unwrap().d();
            let rhs = a
                .d()
                .wedge(&b)
                .unwrap()
                .add(&a.wedge(&b.d()).unwrap().scale_q(&sign(ka)))
                .unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )
}

pub fn leibniz_rule_for_interior() -> Result<(), String> {
    run(
        128,
        (3usize..=5).prop_flat_map(|n| {
            (
                Just(n),
                1usize..=2,
                1usize..=2,
                raw_form(n, 2),
                raw_form(n, 2),
                raw_field(n, 1),
            )
        }),
        |(n, ka, kb, ra, rb, rv)| {
            let c = chart(n);
            let a = to_form(&c, ka, &ra);
            let b = to_form(&c, kb, &rb);
            let v = to_field(&c, &rv);
            let lhs = a.wedge(&b).unwrap().interior(&v).unwrap();
            let rhs = a
                .interior(&v)
                .unwrap()
                .wedge(&b)
                .unwrap()
                .add(&a.wedge(&b.interior(&v).unwrap()).unwrap().scale_q(&sign(ka)))
                .unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )
}

pub fn wedge_is_associative_and_graded_commutative() -> Result<(), String> {
    run(
        128,
        (3usize..=6).prop_flat_map(|n| {
            (
                Just(n),
                prop::array::uniform3(0usize..=2),
                prop::array::uniform3(raw_form(n, 2)),
            )
        }),
        |(n, ks, raws)| {
            let c = chart(n);
            let [a, b, e] = [0, 1, 2].map(|i| to_form(&c, ks[i], &raws[i]));
            let left = a.wedge(&b).unwrap().wedge(&e).unwrap();
            let right = a.wedge(&b.wedge(&e).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let ab = a.wedge(&b).unwrap();
            let ba = b.wedge(&a).unwrap().scale_q(&sign(ks[0] * ks[1]));
            prop_assert_eq!(ab, ba);
            Ok(())
        },
    )
}

pub fn interior_lie_commutator() -> Result<(), String> {
    run(
        128,
        (3usize..=5).prop_flat_map(|n| (Just(n), 1usize..=2, raw_form(n, 2), raw_field(n, 1), raw_field(n, 1))),
        |(n, k, ra, rv, rw)| {
            let c = chart(n);
            let a = to_form(&c, k, &ra);
            let v = to_field(&c, &rv);
            let w = to_field(&c, &rw);
            // θ(w) i(v) − i(v) θ(w) = i([w, v])
            let lhs = a
                .interior(&v)
                .unwrap()
                .lie(&w)
                .unwrap()
                .sub(&a.lie(&w).unwrap().interior(&v).unwrap())
                .unwrap();
            let rhs = a.interior(&w.bracket(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )
}

pub fn generic_rank_bounds_pointwise_rank() -> Result<(), String> {
    run(
        128,
        (3usize..=5).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(raw_form(n, 1), 1..=4),
                prop::collection::vec(-2i64..=2, n),
            )
        }),
        |(n, raws, pt)| {
            let c = chart(n);
            let rows: Vec<Form> = raws.iter().map(|r| to_form(&c, 1, r)).collect();
            let cert = generic_rank(&rows).unwrap();
            let p = small_point(&c, &pt);
            let m: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|f| f.components().iter().map(|x| p.eval(x).unwrap()).collect())
                .collect();
            let at = linalg::rank(m, n);
            prop_assert!(at <= cert.rank);
            if cert.regular_at(p.values()) {
                prop_assert_eq!(at, cert.rank);
            }
            Ok(())
        },
    )
}

// ------------------------------------------------------------ contact calculus

fn contact_poly(n: usize) -> impl Strategy<Value = RawPoly> {
    raw_poly(2 * n + 1, 2, 4)
}

fn ham(cc: &ContactChart, raw: &RawPoly) -> Hamiltonian {
    Hamiltonian::new(cc, to_rf(cc.chart().dim(), raw)).unwrap()
}

fn hamiltonian_pair() -> impl Strategy<Value = (usize, RawPoly, RawPoly)> {
    (1usize..=2).prop_flat_map(|n| (Just(n), contact_poly(n), contact_poly(n)))
}

fn hamiltonian_triple() -> impl Strategy<Value = (usize, [RawPoly; 3])> {
    (1usize..=2).prop_flat_map(|n| (Just(n), prop::array::uniform3(contact_poly(n))))
}

pub fn hamiltonian_field_satisfies_contract() -> Result<(), String> {
    run(
        200,
        (1usize..=2).prop_flat_map(|n| (Just(n), contact_poly(n))),
        |(n, raw)| {
            let cc = ContactChart::new(n, 1).unwrap();
            let h = ham(&cc, &raw);
            let xi = lie_field_from_hamiltonian(&h);
            let w = cc.contact_form();
            prop_assert_eq!(w.pair(&xi).unwrap(), h.f.clone());
            let df = Form::function(cc.chart(), h.f.clone()).d();
            let lhs = df.add(&w.d().interior(&xi).unwrap()).unwrap().wedge(&w).unwrap();
            prop_assert!(lhs.is_zero());
            Ok(())
        },
    )
}

pub fn brackets_are_antisymmetric() -> Result<(), String> {
    run(128, hamiltonian_pair(), |(n, rf, rg)| {
        let cc = ContactChart::new(n, 1).unwrap();
        let (f, g) = (ham(&cc, &rf), ham(&cc, &rg));
        prop_assert_eq!(
            lagrange_bracket(&f, &g).unwrap(),
            lagrange_bracket(&g, &f).unwrap().neg()
        );
        prop_assert_eq!(jacobi_bracket(&f, &g).unwrap(), jacobi_bracket(&g, &f).unwrap().neg());
        Ok(())
    })
}

pub fn lagrange_bracket_satisfies_jacobi_identity() -> Result<(), String> {
    run(128, hamiltonian_triple(), |(n, raws)| {
        let cc = ContactChart::new(n, 1).unwrap();
        let [f, g, h] = raws.map(|r| ham(&cc, &r));
        let br = |a: &Hamiltonian, b: &Hamiltonian| Hamiltonian::new(&cc, lagrange_bracket(a, b).unwrap()).unwrap();
        let t1 = lagrange_bracket(&f, &br(&g, &h)).unwrap();
        let t2 = lagrange_bracket(&g, &br(&h, &f)).unwrap();
        let t3 = lagrange_bracket(&h, &br(&f, &g)).unwrap();
        prop_assert!(t1.add(&t2).add(&t3).is_zero());
        Ok(())
    })
}

pub fn jacobi_bracket_satisfies_jacobi_identity_without_y() -> Result<(), String> {
    run(128, hamiltonian_triple(), |(n, raws)| {
        let cc = ContactChart::new(n, 1).unwrap();
        // Variables drawn from everything except y.
        let vars: Vec<usize> = (0..cc.chart().dim()).filter(|&v| v != cc.y()).collect();
        let [f, g, h] = raws.map(|r| Hamiltonian::new(&cc, to_rf_on(cc.chart().dim(), &vars, &r)).unwrap());
        let br = |a: &Hamiltonian, b: &Hamiltonian| Hamiltonian::new(&cc, jacobi_bracket(a, b).unwrap()).unwrap();
        let t1 = jacobi_bracket(&f, &br(&g, &h)).unwrap();
        let t2 = jacobi_bracket(&g, &br(&h, &f)).unwrap();
        let t3 = jacobi_bracket(&h, &br(&f, &g)).unwrap();
        prop_assert!(t1.add(&t2).add(&t3).is_zero());
        prop_assert_eq!(jacobi_bracket(&f, &g).unwrap(), lagrange_bracket(&f, &g).unwrap());
        Ok(())
    })
}

pub fn commutator_hamiltonian_is_lagrange_bracket() -> Result<(), String> {
    run(128, hamiltonian_pair(), |(n, rf, rg)| {
        let cc = ContactChart::new(n, 1).unwrap();
        let (f, g) = (ham(&cc, &rf), ham(&cc, &rg));
        let comm = lie_field_from_hamiltonian(&f)
            .bracket(&lie_field_from_hamiltonian(&g))
            .unwrap();
        prop_assert_eq!(
            cc.contact_form().pair(&comm).unwrap(),
            lagrange_bracket(&f, &g).unwrap()
        );
        Ok(())
    })
}

pub fn prolongation_preserves_brackets() -> Result<(), String> {
    run(
        128,
        (1usize..=2).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(raw_poly(n + 1, 2, 3), n + 1),
                prop::collection::vec(raw_poly(n + 1, 2, 3), n + 1),
            )
        }),
        |(n, ra, rb)| {
            let cc = ContactChart::new(n, 1).unwrap();
            let dim = cc.chart().dim();
            let base: Vec<usize> = (0..n).map(|i| cc.x(i)).chain([cc.y()]).collect();
            let lift =
                |raw: &[RawPoly]| -> Vec<RationalFunction> { raw.iter().map(|p| to_rf_on(dim, &base, p)).collect() };
            let (a, b) = (lift(&ra), lift(&rb));
            let as_field = |c: &[RationalFunction]| {
                let mut comps = vec![cc.chart().zero_fn(); dim];
                for (k, &v) in base.iter().enumerate() {
                    comps[v] = c[k].clone();
                }
                VectorField::new(cc.chart(), comps).unwrap()
            };
            let base_bracket = as_field(&a).bracket(&as_field(&b)).unwrap();
            let ab: Vec<RationalFunction> = base.iter().map(|&v| base_bracket.component(v).clone()).collect();
            let pa = prolong_vector_field(&cc, &a[..n], &a[n]).unwrap();
            let pb = prolong_vector_field(&cc, &b[..n], &b[n]).unwrap();
            let pab = prolong_vector_field(&cc, &ab[..n], &ab[n]).unwrap();
            prop_assert_eq!(pa.bracket(&pb).unwrap(), pab);
            Ok(())
        },
    )
}

pub fn prolonged_hamiltonians_are_semilinear() -> Result<(), String> {
    run(
        128,
        (1usize..=2).prop_flat_map(|n| (Just(n), prop::collection::vec(raw_poly(n + 1, 2, 3), n + 1))),
        |(n, ra)| {
            let cc = ContactChart::new(n, 1).unwrap();
            let dim = cc.chart().dim();
            let base: Vec<usize> = (0..n).map(|i| cc.x(i)).chain([cc.y()]).collect();
            let a: Vec<RationalFunction> = ra.iter().map(|p| to_rf_on(dim, &base, p)).collect();
            let xi = prolong_vector_field(&cc, &a[..n], &a[n]).unwrap();
            let (h, is_lie) = hamiltonian_of_field(&cc, &xi).unwrap();
            prop_assert!(is_lie);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!(h.f.derivative(cc.p1(i)).derivative(cc.p1(j)).is_zero());
                }
            }
            Ok(())
        },
    )
}

pub fn characteristic_field_annihilates_contact_form_and_df() -> Result<(), String> {
    run(
        128,
        (1usize..=2).prop_flat_map(|n| (Just(n), contact_poly(n))),
        |(n, raw)| {
            let cc = ContactChart::new(n, 1).unwrap();
            let h = ham(&cc, &raw);
            let Ok(v) = cauchy_char_field(&h) else {
                return Ok(());
            };
            prop_assert!(cc.contact_form().pair(&v).unwrap().is_zero());
            prop_assert!(Form::function(cc.chart(), h.f.clone()).d().pair(&v).unwrap().is_zero());
            // It differs from the Hamiltonian field by a multiple of ∂y.
            let xi = lie_field_from_hamiltonian(&h);
            let diff = v.add(&xi).unwrap();
            for k in 0..cc.chart().dim() {
                if k != cc.y() {
                    prop_assert!(diff.component(k).is_zero());
                }
            }
            Ok(())
        },
    )
}

pub fn total_derivatives_commute() -> Result<(), String> {
    run(
        128,
        (1usize..=3).prop_flat_map(|n| (Just(n), contact_poly(n), 0..n, 0..n)),
        |(n, raw, i, j)| {
            let cc = ContactChart::new(n, 1).unwrap();
            let f = to_rf(cc.chart().dim(), &raw);
            let (c1, di) = total_derivative(&cc, &f, i).unwrap();
            let (_, dji) = total_derivative(&c1, &di, j).unwrap();
            let (c2, dj) = total_derivative(&cc, &f, j).unwrap();
            let (_, dij) = total_derivative(&c2, &dj, i).unwrap();
            prop_assert_eq!(dji, dij);
            Ok(())
        },
    )
}

pub fn restricted_class_matches_formula_for_one_equation() -> Result<(), String> {
    run(
        128,
        (2usize..=3).prop_flat_map(|n| (Just(n), contact_poly(n))),
        |(n, raw)| {
            let cc = ContactChart::new(n, 1).unwrap();
            let dim = cc.chart().dim();
            let vars: Vec<usize> = (0..dim).filter(|&v| v != cc.p1(0)).collect();
            let g = to_rf_on(dim, &vars, &raw);
            let s = PdeSystem::from_graph(&cc, vec![(0, g)]).unwrap();
            let r = restrict_system(&s).unwrap();
            prop_assert_eq!(cartan_class(&r).unwrap(), 2 * (n - 1) + 1);
            Ok(())
        },
    )
}

pub fn restricted_class_matches_formula_for_two_equations() -> Result<(), String> {
    run(
        128,
        (2usize..=3).prop_flat_map(|n| (Just(n), raw_poly(n, 3, 4))),
        |(n, raw)| {
            let cc = ContactChart::new(n, 1).unwrap();
            let dim = cc.chart().dim();
            let xs: Vec<usize> = (0..n).map(|i| cc.x(i)).collect();
            // Gradient of a potential in the base variables: an integrable pair.
            let u = to_rf_on(dim, &xs, &raw);
            let eqs = vec![(0, u.derivative(cc.x(0))), (1, u.derivative(cc.x(1)))];
            let s = PdeSystem::from_graph(&cc, eqs).unwrap();
            let r = restrict_system(&s).unwrap();
            prop_assert_eq!(cartan_class(&r).unwrap(), 2 * (n - 2) + 1);
            Ok(())
        },
    )
}

// ------------------------------------------------------------ Pfaffian systems

/// Generator `j` is `dx_j + Σ_{i ≥ r} c_ij dx_i`, so the list is independent.
fn echelon_system() -> impl Strategy<Value = (usize, usize, Vec<Vec<RawPoly>>)> {
    (3usize..=5).prop_flat_map(|n| (Just(n), 1..n)).prop_flat_map(|(n, r)| {
        (
            Just(n),
            Just(r),
            prop::collection::vec(prop::collection::vec(raw_poly(n, 1, 2), n - r), r),
        )
    })
}

fn build_echelon(n: usize, r: usize, raw: &[Vec<RawPoly>]) -> PfaffianSystem {
    let c = chart(n);
    let gens = raw
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let mut comps = vec![c.zero_fn(); n];
            comps[j] = c.one_fn();
            for (k, p) in row.iter().enumerate() {
                comps[r + k] = to_rf(n, p);
            }
            Form::from_components(&c, &comps)
        })
        .collect();
    PfaffianSystem::new(&c, gens).unwrap()
}

pub fn frobenius_iff_derived_fixpoint() -> Result<(), String> {
    run(128, echelon_system(), |(n, r, raw)| {
        let p = build_echelon(n, r, &raw);
        let d = derived_system(&p).unwrap();
        prop_assert_eq!(is_integrable_frobenius(&p), d.rank() == p.rank());
        prop_assert_eq!(d.rank(), wedge_derived_rank(p.chart(), p.generators()));
        Ok(())
    })
}

pub fn derived_system_is_contained() -> Result<(), String> {
    run(128, echelon_system(), |(n, r, raw)| {
        let p = build_echelon(n, r, &raw);
        let d = derived_system(&p).unwrap();
        for g in d.generators() {
            prop_assert!(p.contains(g));
        }
        Ok(())
    })
}

pub fn rank_one_class_is_odd() -> Result<(), String> {
    run(
        128,
        (3usize..=5).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(raw_poly(n, 1, 3), n),
                prop::collection::vec(-2i64..=2, n),
            )
        }),
        |(n, raw, pt)| {
            let c = chart(n);
            let w = Form::from_components(&c, &raw.iter().map(|p| to_rf(n, p)).collect::<Vec<_>>());
            prop_assume!(!w.is_zero());
            let p = PfaffianSystem::new(&c, vec![w.clone()]).unwrap();
            let at = small_point(&c, &pt);
            prop_assume!(!w.evaluate(&at).unwrap().is_zero());
            let k = cartan_class_at(&p, &at).unwrap();
            prop_assert_eq!(k % 2, 1);
            prop_assert_eq!(k, class_at_point(&p, &at));
            Ok(())
        },
    )
}

// ------------------------------------------------------------ text format

const NAMES: [&str; 8] = ["x1", "x2", "y", "p1", "u", "v_2", "t", "z9"];

#[derive(Clone, Debug)]
struct RawDoc {
    n: usize,
    systems: Vec<Vec<RawForm>>,
    functions: Vec<(RawPoly, RawPoly)>,
    points: Vec<Vec<(i64, i64)>>,
    fields: Vec<Vec<RawPoly>>,
}

fn raw_doc() -> impl Strategy<Value = RawDoc> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(raw_form(n, 2), 1..=3), 0..=2),
            prop::collection::vec((raw_poly(n, 2, 3), raw_poly(n, 1, 2)), 0..=2),
            prop::collection::vec(prop::collection::vec((-9i64..=9, 1i64..=5), n), 0..=2),
            prop::collection::vec(raw_field(n, 1), 0..=2),
        )
            .prop_map(move |(systems, functions, points, fields)| RawDoc {
                n,
                systems,
                functions,
                points,
                fields,
            })
    })
}

fn build_doc(raw: &RawDoc) -> SystemDocument {
    let c = Chart::new(NAMES[..raw.n].iter().copied()).unwrap();
    let mut doc = SystemDocument::new(c.clone());
    for (k, forms) in raw.systems.iter().enumerate() {
        let gens: Vec<Form> = forms
            .iter()
            .map(|f| to_form(&c, 1, f))
            .filter(|f| !f.is_zero())
            .collect();
        doc.systems.push((format!("S{k}"), gens));
    }
    for (k, (num, den)) in raw.functions.iter().enumerate() {
        let d = to_rf(raw.n, den);
        let f = to_rf(raw.n, num);
        let f = if d.is_zero() { f } else { f.div(&d).unwrap() };
        doc.functions.push((format!("f{k}"), f));
    }
    for (k, vals) in raw.points.iter().enumerate() {
        let v = vals.iter().map(|&(a, b)| q(a, b)).collect();
        doc.points
            .push((format!("pt{k}"), PointAssignment::new(&c, v).unwrap()));
    }
    for (k, f) in raw.fields.iter().enumerate() {
        doc.fields.push((format!("V{k}"), to_field(&c, f)));
    }
    doc
}

pub fn parse_inverts_render() -> Result<(), String> {
    run(200, raw_doc(), |raw| {
        let doc = build_doc(&raw);
        let text = render_document(&doc);
        let back = parse_document(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(render_document(&back), text.clone());
        prop_assert_eq!(render_document(&doc), text);
        Ok(())
    })
}

pub fn parse_errors_point_inside_input() -> Result<(), String> {
    run(
        200,
        (
            raw_doc(),
            any::<prop::sample::Index>(),
            prop::sample::select(vec!['$', '?', '!', ',', ';']),
        ),
        |(raw, at, junk)| {
            let text = render_document(&build_doc(&raw));
            let chars: Vec<char> = text.chars().collect();
            let pos = at.index(chars.len() + 1);
            let mut bad: String = chars[..pos].iter().collect();
            bad.push(junk);
            bad.extend(&chars[pos..]);
            let err = parse_document(&bad).unwrap_err();
            let (line, col) = err.position();
            let lines: Vec<&str> = bad.split('\n').collect();
            prop_assert!(line >= 1 && line <= lines.len(), "line {} of {}", line, lines.len());
            prop_assert!(col >= 1 && col <= lines[line - 1].chars().count() + 1);
            Ok(())
        },
    )
}

/// Every property with its name, in suite order.
pub type Check = fn() -> Result<(), String>;

pub const ALL: &[(&str, Check)] = &[
    ("d_squared_is_zero", d_squared_is_zero),
    ("leibniz_rule_for_d", leibniz_rule_for_d),
    ("leibniz_rule_for_interior", leibniz_rule_for_interior),
    (
        "wedge_is_associative_and_graded_commutative",
        wedge_is_associative_and_graded_commutative,
    ),
    ("interior_lie_commutator", interior_lie_commutator),
    ("generic_rank_bounds_pointwise_rank", generic_rank_bounds_pointwise_rank),
    (
        "hamiltonian_field_satisfies_contract",
        hamiltonian_field_satisfies_contract,
    ),
    ("brackets_are_antisymmetric", brackets_are_antisymmetric),
    (
        "lagrange_bracket_satisfies_jacobi_identity",
        lagrange_bracket_satisfies_jacobi_identity,
    ),
    (
        "jacobi_bracket_satisfies_jacobi_identity_without_y",
        jacobi_bracket_satisfies_jacobi_identity_without_y,
    ),
    (
        "commutator_hamiltonian_is_lagrange_bracket",
        commutator_hamiltonian_is_lagrange_bracket,
    ),
    ("prolongation_preserves_brackets", prolongation_preserves_brackets),
    (
        "prolonged_hamiltonians_are_semilinear",
        prolonged_hamiltonians_are_semilinear,
    ),
    (
        "characteristic_field_annihilates_contact_form_and_df",
        characteristic_field_annihilates_contact_form_and_df,
    ),
    ("total_derivatives_commute", total_derivatives_commute),
    (
        "restricted_class_matches_formula_for_one_equation",
        restricted_class_matches_formula_for_one_equation,
    ),
    (
        "restricted_class_matches_formula_for_two_equations",
        restricted_class_matches_formula_for_two_equations,
    ),
    ("frobenius_iff_derived_fixpoint", frobenius_iff_derived_fixpoint),
    ("derived_system_is_contained", derived_system_is_contained),
    ("rank_one_class_is_odd", rank_one_class_is_odd),
    ("parse_inverts_render", parse_inverts_render),
    ("parse_errors_point_inside_input", parse_errors_point_inside_input),
];
