#![allow(dead_code)]

use cartan_eds::exterior::mask_indices;
use cartan_eds::formlang::{parse_field, parse_form, parse_function};
use cartan_eds::linalg;
use cartan_eds::rational::RationalFunction;
use cartan_eds::{Chart, Form, PfaffianSystem, PointAssignment, VectorField};
use num::{BigInt, BigRational, Zero};

pub fn chart(n: usize) -> Chart {
    Chart::standard(n)
}

pub fn named(names: &str) -> Chart {
    Chart::new(names.split_whitespace()).unwrap()
}

pub fn form(c: &Chart, s: &str) -> Form {
    parse_form(c, s, 1).unwrap()
}

pub fn form_k(c: &Chart, s: &str, k: usize) -> Form {
    parse_form(c, s, k).unwrap()
}

pub fn func(c: &Chart, s: &str) -> RationalFunction {
    parse_function(c, s).unwrap()
}

pub fn field(c: &Chart, s: &str) -> VectorField {
    parse_field(c, s).unwrap()
}

pub fn sys(c: &Chart, gens: &[&str]) -> PfaffianSystem {
    PfaffianSystem::new(c, gens.iter().map(|g| form(c, g)).collect()).unwrap()
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn point(c: &Chart, values: &[(usize, i64)]) -> PointAssignment {
    let mut v = vec![BigRational::zero(); c.dim()];
    for (i, x) in values {
        v[*i] = q(*x, 1);
    }
    PointAssignment::new(c, v).unwrap()
}

pub fn vector(c: &Chart, values: &[(usize, i64)]) -> Vec<BigRational> {
    point(c, values).values().to_vec()
}

/// Rank over the function field of forms of equal degree.
pub fn rank_of(forms: &[Form]) -> usize {
    let (cols, m) = linalg::form_matrix(forms);
    linalg::rank(m, cols.len())
}

pub fn same_span(a: &[Form], b: &[Form]) -> bool {
    let mut all = a.to_vec();
    all.extend(b.iter().cloned());
    let r = rank_of(&all);
    r == rank_of(a) && r == rank_of(b)
}

pub fn wedge_all(c: &Chart, forms: &[Form]) -> Form {
    forms
        .iter()
        .fold(Form::function(c, c.one_fn()), |acc, f| acc.wedge(f).unwrap())
}

/// Rank of the derived system computed through wedge products:
/// `r − rank{dω^i ∧ ω^1 ∧ … ∧ ω^r}`.
pub fn wedge_derived_rank(c: &Chart, gens: &[Form]) -> usize {
    if gens.is_empty() {
        return 0;
    }
    let top = wedge_all(c, gens);
    let rows: Vec<Form> = gens.iter().map(|g| g.d().wedge(&top).unwrap()).collect();
    if rows.iter().all(Form::is_zero) {
        return gens.len();
    }
    gens.len() - rank_of(&rows)
}

/// Lie derivative of a 1-form from the coordinate formula
/// `(θ_v α)_j = Σ_i v^i ∂_i α_j + α_i ∂_j v^i`.
pub fn lie_one_form(v: &VectorField, a: &Form) -> Form {
    let c = a.chart();
    let n = c.dim();
    let alpha = a.components();
    let comps: Vec<RationalFunction> = (0..n)
        .map(|j| {
            let mut acc = c.zero_fn();
            for i in 0..n {
                acc = acc.add(&v.component(i).mul(&alpha[j].derivative(i)));
                acc = acc.add(&alpha[i].mul(&v.component(i).derivative(j)));
            }
            acc
        })
        .collect();
    Form::from_components(c, &comps)
}

/// Evaluate a constant-coefficient 2-form on a pair of vectors.
pub fn two_form_on(b: &Form, v: &[BigRational], w: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (mask, coef) in b.terms() {
        let c = coef.constant_value().unwrap();
        let ix = mask_indices(mask);
        acc += c * (&v[ix[0]] * &w[ix[1]] - &v[ix[1]] * &w[ix[0]]);
    }
    acc
}

/// Cartan class at a point from the characteristic-space definition:
/// `n − dim{v ∈ Σ : dω^i(v, w) = 0 ∀ w ∈ Σ, ∀ i}`.
pub fn class_at_point(p: &PfaffianSystem, pt: &PointAssignment) -> usize {
    let c = p.chart();
    let n = c.dim();
    let rows: Vec<Vec<BigRational>> = p
        .generators()
        .iter()
        .map(|g| {
            g.evaluate(pt)
                .unwrap()
                .components()
                .iter()
                .map(|x| x.constant_value().unwrap())
                .collect()
        })
        .collect();
    let sigma = linalg::kernel_q(rows.clone(), n);
    let dws: Vec<Form> = p.generators().iter().map(|g| g.d().evaluate(pt).unwrap()).collect();
    // Unknowns: coefficients a of v = Σ a_k sigma_k.
    let k = sigma.len();
    let mut eqs: Vec<Vec<BigRational>> = Vec::new();
    for b in &dws {
        for w in &sigma {
            eqs.push(sigma.iter().map(|s| two_form_on(b, s, w)).collect());
        }
    }
    let dim = if k == 0 { 0 } else { k - linalg::rank(eqs, k) };
    n - dim
}

/// Largest `k` with `ω ∧ (dω)^k ≠ 0`.
pub fn wedge_power_index(w: &Form) -> usize {
    let dw = w.d();
    let mut k = 0;
    loop {
        let next = w.wedge(&dw.wedge_power(k + 1)).unwrap();
        if next.is_zero() {
            return k;
        }
        k += 1;
    }
}
pub mod props;
