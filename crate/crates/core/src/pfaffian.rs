//! Structural invariants of Pfaffian systems.

use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cancel::CancelToken;
use crate::error::EdsError;
use crate::exterior::{Chart, Form, PointAssignment, VectorField};
use crate::linalg::{self, RankCertificate};
use crate::rational::RationalFunction;

/// A finite list of 1-form generators on a chart, with its generic rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfaffianSystem {
    chart: Chart,
    generators: Vec<Form>,
    certificate: RankCertificate,
}

impl PfaffianSystem {
    pub fn new(chart: &Chart, generators: Vec<Form>) -> Result<Self, EdsError> {
        for g in &generators {
            if g.chart() != chart {
                return Err(EdsError::ChartMismatch);
            }
            if g.degree() != 1 {
                return Err(EdsError::DegreeMismatch {
                    expected: 1,
                    found: g.degree(),
                });
            }
        }
        let certificate = linalg::generic_rank(&generators)?;
        Ok(PfaffianSystem {
            chart: chart.clone(),
            generators,
            certificate,
        })
    }

    pub fn empty(chart: &Chart) -> Self {
        Self::new(chart, vec![]).expect("empty system")
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn generators(&self) -> &[Form] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.certificate.rank
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn certificate(&self) -> &RankCertificate {
        &self.certificate
    }

    pub fn is_independent(&self) -> bool {
        self.rank() == self.generators.len()
    }

    fn require_independent(&self) -> Result<(), EdsError> {
        if self.is_independent() {
            Ok(())
        } else {
            Err(EdsError::RankDeficient {
                rank: self.rank(),
                count: self.generators.len(),
            })
        }
    }

    /// The subsystem of a maximal generically independent set of generators.
    pub fn reduced(&self) -> PfaffianSystem {
        if self.is_independent() {
            return self.clone();
        }
        let keep = linalg::independent_subset(&self.generators);
        let gens = keep.into_iter().map(|i| self.generators[i].clone()).collect();
        PfaffianSystem::new(&self.chart, gens).expect("subset of valid generators")
    }

    /// Rank of the generators evaluated at a point.
    pub fn rank_at(&self, p: &PointAssignment) -> Result<usize, EdsError> {
        let rows: Vec<Form> = self
            .generators
            .iter()
            .map(|g| g.evaluate(p))
            .collect::<Result<_, _>>()?;
        Ok(linalg::constant_rank(&rows))
    }

    /// Whether the generators span the same module over the function field.
    pub fn same_span(&self, other: &PfaffianSystem) -> bool {
        if self.chart != other.chart || self.rank() != other.rank() {
            return false;
        }
        let mut all = self.generators.clone();
        all.extend(other.generators.iter().cloned());
        let (cols, m) = linalg::form_matrix(&all);
        linalg::rank(m, cols.len()) == self.rank()
    }

    /// Whether `form` lies in the span of the generators over the function field.
    pub fn contains(&self, form: &Form) -> bool {
        let mut all = self.generators.clone();
        all.push(form.clone());
        let (cols, m) = linalg::form_matrix(&all);
        linalg::rank(m, cols.len()) == self.rank()
    }

    /// Wedge product of all generators (the 0-form 1 for an empty system).
    pub fn wedge_all(&self) -> Form {
        let mut acc = Form::function(&self.chart, self.chart.one_fn());
        for g in &self.generators {
            acc = acc.wedge(g).expect("same chart");
        }
        acc
    }

    pub fn render(&self) -> Vec<String> {
        self.generators.iter().map(Form::render).collect()
    }
}

/// Rewrites forms modulo an independent Pfaffian system.
///
/// The generator matrix is put in reduced echelon form; each pivot differential
/// `dx_c` is then replaced by the combination of free differentials it equals
/// modulo the system.
#[derive(Clone, Debug)]
pub struct Reducer {
    chart: Chart,
    pivots: Vec<usize>,
    images: Vec<Form>,
}

impl Reducer {
    pub fn new(p: &PfaffianSystem) -> Result<Self, EdsError> {
        p.require_independent()?;
        let chart = p.chart().clone();
        let n = chart.dim();
        let ech = linalg::rref(linalg::one_form_matrix(p.generators()), n);
        let mut images: Vec<Form> = (0..n).map(|j| Form::dx(&chart, j)).collect();
        for (row, &c) in ech.rows.iter().zip(&ech.pivots) {
            let mut img = Form::zero(&chart, 1);
            for (j, a) in row.iter().enumerate() {
                if j != c && !a.is_zero() {
                    img = img.sub(&Form::dx(&chart, j).scale(a))?;
                }
            }
            images[c] = img;
        }
        Ok(Reducer {
            chart,
            pivots: ech.pivots,
            images,
        })
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates whose differentials complete the generators to a coframe.
    pub fn free_coordinates(&self) -> Vec<usize> {
        (0..self.chart.dim()).filter(|j| !self.pivots.contains(j)).collect()
    }

    pub fn reduce(&self, form: &Form) -> Result<Form, EdsError> {
        if form.chart() != &self.chart {
            return Err(EdsError::ChartMismatch);
        }
        form.map_differentials(&self.images)
    }
}

/// A form reduced modulo a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub form: Form,
    pub is_zero: bool,
}

pub fn reduce_mod_system(form: &Form, p: &PfaffianSystem) -> Result<Reduction, EdsError> {
    let r = Reducer::new(p)?.reduce(form)?;
    Ok(Reduction {
        is_zero: r.is_zero(),
        form: r,
    })
}

/// Frobenius test: `dω^i ∧ ω^1 ∧ … ∧ ω^r = 0` for every generator.
pub fn is_integrable_frobenius(p: &PfaffianSystem) -> bool {
    let p = p.reduced();
    let top = p.wedge_all();
    p.generators()
        .iter()
        .all(|g| g.d().wedge(&top).expect("same chart").is_zero())
}

/// The derived system `{ω ∈ P : dω ≡ 0 mod P}`.
pub fn derived_system(p: &PfaffianSystem) -> Result<PfaffianSystem, EdsError> {
    p.require_independent()?;
    let chart = p.chart();
    let r = p.generators().len();
    if r == 0 {
        return Ok(p.clone());
    }
    let red = Reducer::new(p)?;
    let reduced: Vec<Form> = p
        .generators()
        .iter()
        .map(|g| red.reduce(&g.d()))
        .collect::<Result<_, _>>()?;
    let (cols, m) = linalg::form_matrix(&reduced);
    if cols.is_empty() {
        return Ok(p.clone());
    }
    // Left kernel: f with Σ f_i row_i = 0.
    let transposed: Vec<Vec<RationalFunction>> = (0..cols.len())
        .map(|c| (0..r).map(|i| m[i][c].clone()).collect())
        .collect();
    let kernel = linalg::kernel_rf(transposed, r, chart.dim());
    let mut gens = Vec::with_capacity(kernel.len());
    for f in kernel {
        let f = linalg::clear_denominators(&f);
        let mut g = Form::zero(chart, 1);
        for (fi, w) in f.iter().zip(p.generators()) {
            if !fi.is_zero() {
                g = g.add(&w.scale(fi))?;
            }
        }
        gens.push(g);
    }
    PfaffianSystem::new(chart, gens)
}

/// Successive derived systems down to an integrable or null stage.
#[derive(Clone, Debug)]
pub struct DerivedFlag {
    pub stages: Vec<PfaffianSystem>,
    /// True when the flag ends in a nonzero integrable system.
    pub terminal_integrable: bool,
}

impl DerivedFlag {
    pub fn ranks(&self) -> Vec<usize> {
        self.stages.iter().map(PfaffianSystem::rank).collect()
    }

    /// Frobenius verdict for each stage.
    pub fn integrability(&self) -> Vec<bool> {
        self.stages.iter().map(is_integrable_frobenius).collect()
    }
}

pub fn derived_flag(p: &PfaffianSystem) -> Result<DerivedFlag, EdsError> {
    derived_flag_with(p, &CancelToken::new())
}

/// Stages are listed until the rank stops dropping; a nonzero fixpoint is
/// listed twice, the null system once.
pub fn derived_flag_with(p: &PfaffianSystem, cancel: &CancelToken) -> Result<DerivedFlag, EdsError> {
    let mut stages = vec![p.clone()];
    if p.rank() == 0 {
        return Ok(DerivedFlag {
            stages,
            terminal_integrable: false,
        });
    }
    loop {
        cancel.check()?;
        let last = stages.last().unwrap();
        let next = derived_system(last)?;
        let stop = next.rank() == last.rank() || next.rank() == 0;
        let terminal_integrable = next.rank() > 0;
        stages.push(next);
        if stop {
            return Ok(DerivedFlag {
                stages,
                terminal_integrable,
            });
        }
    }
}

/// Basis of the annihilator of the generators over the function field.
pub fn annihilator(p: &PfaffianSystem) -> Vec<VectorField> {
    let chart = p.chart();
    linalg::kernel_rf(linalg::one_form_matrix(p.generators()), chart.dim(), chart.dim())
        .into_iter()
        .map(|v| VectorField::new(chart, linalg::clear_denominators(&v)).expect("right length"))
        .collect()
}

/// Generators plus all `i(w)dω^i` for `w` in the annihilator, reduced to an
/// independent list.
pub fn cauchy_characteristic_system(p: &PfaffianSystem) -> Result<PfaffianSystem, EdsError> {
    p.require_independent()?;
    let chart = p.chart();
    let ann = annihilator(p);
    let mut all: Vec<Form> = p.generators().to_vec();
    for g in p.generators() {
        let dg = g.d();
        if dg.is_zero() {
            continue;
        }
        for w in &ann {
            let c = dg.interior(w)?;
            if !c.is_zero() {
                let comps = linalg::clear_denominators(&c.components());
                all.push(Form::from_components(chart, &comps));
            }
        }
    }
    let keep = linalg::independent_subset(&all);
    PfaffianSystem::new(chart, keep.into_iter().map(|i| all[i].clone()).collect())
}

/// The system plus every 1-form `θ` with `θ ∧ dω ≡ 0 mod P` for all `ω` in `P`,
/// taken in the free differentials of the reducer.
pub fn covariant_system(p: &PfaffianSystem) -> Result<PfaffianSystem, EdsError> {
    let red = Reducer::new(p)?;
    let chart = p.chart();
    let free = red.free_coordinates();
    let k = free.len();
    let mut eqs: Vec<Vec<RationalFunction>> = Vec::new();
    for g in p.generators() {
        let sigma = red.reduce(&g.d())?;
        if sigma.is_zero() {
            continue;
        }
        let rows = free
            .iter()
            .map(|&f| Form::dx(chart, f).wedge(&sigma))
            .collect::<Result<Vec<_>, _>>()?;
        let (cols, m) = linalg::form_matrix(&rows);
        eqs.extend((0..cols.len()).map(|j| (0..k).map(|a| m[a][j].clone()).collect::<Vec<_>>()));
    }
    let mut all = p.generators().to_vec();
    for c in linalg::kernel_rf(eqs, k, chart.dim()) {
        let mut comps = vec![chart.zero_fn(); chart.dim()];
        for (a, &f) in free.iter().enumerate() {
            comps[f] = c[a].clone();
        }
        all.push(Form::from_components(chart, &linalg::clear_denominators(&comps)));
    }
    let keep = linalg::independent_subset(&all);
    PfaffianSystem::new(chart, keep.into_iter().map(|i| all[i].clone()).collect())
}

pub fn cartan_class(p: &PfaffianSystem) -> Result<usize, EdsError> {
    Ok(cauchy_characteristic_system(p)?.rank())
}

/// Class of the system computed from the generators evaluated at a point.
pub fn cartan_class_at(p: &PfaffianSystem, point: &PointAssignment) -> Result<usize, EdsError> {
    let data = PointData::new(p, point)?;
    let mut rows: Vec<Vec<BigRational>> = data.rows.clone();
    for b in &data.bilinear {
        for w in &data.sigma {
            rows.push(contract_functional(b, w, data.n));
        }
    }
    Ok(linalg::rank(rows, data.n))
}

/// Darboux class of a 1-form, generically or at a point.
pub fn darboux_class(omega: &Form, point: Option<&PointAssignment>) -> Result<usize, EdsError> {
    if omega.degree() != 1 {
        return Err(EdsError::DegreeMismatch {
            expected: 1,
            found: omega.degree(),
        });
    }
    let (w, dw) = match point {
        None => {
            if omega.is_zero() {
                return Err(EdsError::VanishingForm);
            }
            (omega.clone(), omega.d())
        }
        Some(p) => {
            let w = omega.evaluate(p)?;
            if w.is_zero() {
                return Err(EdsError::VanishingAtPoint);
            }
            (w, omega.d().evaluate(p)?)
        }
    };
    let mut p = 0;
    let mut power = Form::function(w.chart(), w.chart().one_fn());
    loop {
        let next = power.wedge(&dw)?;
        if w.wedge(&next)?.is_zero() {
            // ω ∧ (dω)^{p+1} = 0; `next` is (dω)^{p+1}.
            return Ok(if next.is_zero() { 2 * p + 1 } else { 2 * p + 2 });
        }
        power = next;
        p += 1;
    }
}

fn fresh_names(chart: &Chart, count: usize) -> Vec<String> {
    let mut prefix = String::from("t");
    loop {
        let names: Vec<String> = (1..=count).map(|i| format!("{prefix}{i}")).collect();
        if names.iter().all(|n| chart.index_of(n).is_none()) {
            return names;
        }
        prefix.push('_');
    }
}

/// Smallest `h` with `(dω)^{h+1} ≡ 0` modulo the system (which may be empty).
pub fn form_gender(omega: &Form, p: &PfaffianSystem) -> Result<usize, EdsError> {
    let red = Reducer::new(p)?;
    let r = red.reduce(&omega.d())?;
    Ok(power_index(&r))
}

fn power_index(two_form: &Form) -> usize {
    let mut h = 0;
    let mut power = two_form.clone();
    while !power.is_zero() {
        h += 1;
        power = power.wedge(two_form).expect("same chart");
    }
    h
}

/// Gender of the system, using a generic section `Σ t_i ω^i` with formal parameters.
pub fn gender(p: &PfaffianSystem) -> Result<usize, EdsError> {
    p.require_independent()?;
    let r = p.generators().len();
    if r == 0 {
        return Ok(0);
    }
    let chart = p.chart();
    let n = chart.dim();
    let ext = chart.extended(fresh_names(chart, r))?;
    let map: Vec<usize> = (0..n).collect();
    let lifted: Vec<Form> = p.generators().iter().map(|g| g.remap(&ext, &map)).collect();
    let mut section = Form::zero(&ext, 2);
    for (i, g) in lifted.iter().enumerate() {
        section = section.add(&g.d().scale(&ext.coordinate(n + i)))?;
    }
    let lp = PfaffianSystem::new(&ext, lifted)?;
    let red = Reducer::new(&lp)?.reduce(&section)?;
    Ok(power_index(&red))
}

/// Evaluated data of a system at a point.
struct PointData {
    n: usize,
    rows: Vec<Vec<BigRational>>,
    bilinear: Vec<Form>,
    sigma: Vec<Vec<BigRational>>,
}

impl PointData {
    fn new(p: &PfaffianSystem, point: &PointAssignment) -> Result<Self, EdsError> {
        if point.chart() != p.chart() {
            return Err(EdsError::ChartMismatch);
        }
        let n = p.dim();
        let rows = linalg::evaluate_matrix(&linalg::one_form_matrix(p.generators()), point.values())?;
        let bilinear = p
            .generators()
            .iter()
            .map(|g| g.d().evaluate(point))
            .collect::<Result<Vec<_>, _>>()?;
        let sigma = linalg::kernel_q(rows.clone(), n);
        Ok(PointData {
            n,
            rows,
            bilinear,
            sigma,
        })
    }

    fn rank(&self) -> usize {
        self.n - self.sigma.len()
    }

    fn polar(&self, e: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
        let mut rows = self.rows.clone();
        for b in &self.bilinear {
            for v in e {
                rows.push(contract_functional(b, v, self.n));
            }
        }
        linalg::kernel_q(rows, self.n)
    }
}

/// Linear functional `w ↦ B(v, w)` of a constant 2-form `B`.
fn contract_functional(b: &Form, v: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut row = vec![BigRational::zero(); n];
    for (mask, c) in b.terms() {
        let c = c.constant_value().expect("evaluated form");
        let idx = crate::exterior::mask_indices(mask);
        let (j, k) = (idx[0], idx[1]);
        row[k] += &c * &v[j];
        row[j] -= &c * &v[k];
    }
    row
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Polar space of an integral element `e` at a point.
pub fn polar_space(
    p: &PfaffianSystem,
    point: &PointAssignment,
    e: &[Vec<BigRational>],
) -> Result<Vec<Vec<BigRational>>, EdsError> {
    let data = PointData::new(p, point)?;
    for (i, v) in e.iter().enumerate() {
        if v.len() != data.n {
            return Err(EdsError::Invalid(format!("vector {i} has wrong length")));
        }
        if data.rows.iter().any(|r| !dot(r, v).is_zero()) {
            return Err(EdsError::NotInAnnihilator { index: i });
        }
    }
    for (i, v) in e.iter().enumerate() {
        for (j, w) in e.iter().enumerate().skip(i + 1) {
            if data
                .bilinear
                .iter()
                .any(|b| !dot(&contract_functional(b, v, data.n), w).is_zero())
            {
                return Err(EdsError::NotIntegral(i, j));
            }
        }
    }
    Ok(data.polar(e))
}

/// How the next vector of an integral-element chain is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainStrategy {
    /// Among the echelon basis of the polar space and fixed generic combinations
    /// of it, take the first vector whose polar space is smallest.
    Generic,
    /// The first echelon basis vector of the polar space outside the element.
    FirstBasis,
    /// Random small rational combinations from a seeded generator.
    SeededRandom(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterReport {
    pub point: PointAssignment,
    pub strategy: ChainStrategy,
    /// Basis of `E_j` for `j = 1, …, ρ`; `chain[j-1]` has `j` vectors.
    pub chain: Vec<Vec<Vec<BigRational>>>,
    /// Basis of the polar space `Ẽ_j` for each chain element.
    pub polar_spaces: Vec<Vec<Vec<BigRational>>>,
    pub rho_k: usize,
    /// `s_j = dim Ẽ_j`.
    pub enlarged_characters: Vec<usize>,
    pub character: usize,
}

fn in_span(basis: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    let n = v.len();
    let before = linalg::rank(basis.to_vec(), n);
    let mut with = basis.to_vec();
    with.push(v.to_vec());
    linalg::rank(with, n) == before
}

fn combine(basis: &[Vec<BigRational>], coeffs: &[BigRational]) -> Vec<BigRational> {
    let n = basis[0].len();
    let mut v = vec![BigRational::zero(); n];
    for (b, c) in basis.iter().zip(coeffs) {
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi += c * bi;
        }
    }
    v
}

pub fn character_chain(
    p: &PfaffianSystem,
    point: &PointAssignment,
    strategy: ChainStrategy,
) -> Result<CharacterReport, EdsError> {
    character_chain_with(p, point, strategy, &CancelToken::new())
}

pub fn character_chain_with(
    p: &PfaffianSystem,
    point: &PointAssignment,
    strategy: ChainStrategy,
    cancel: &CancelToken,
) -> Result<CharacterReport, EdsError> {
    let data = PointData::new(p, point)?;
    let r = p.generators().len();
    if data.rank() < r {
        return Err(EdsError::DependentAtPoint {
            rank: data.rank(),
            expected: r,
        });
    }
    let mut rng = match strategy {
        ChainStrategy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut e: Vec<Vec<BigRational>> = Vec::new();
    let mut polar = data.sigma.clone();
    let mut report = CharacterReport {
        point: point.clone(),
        strategy,
        chain: vec![],
        polar_spaces: vec![],
        rho_k: 0,
        enlarged_characters: vec![],
        character: 0,
    };
    while polar.len() > e.len() {
        cancel.check()?;
        let v = match strategy {
            ChainStrategy::FirstBasis => polar.iter().find(|b| !in_span(&e, b)).cloned().unwrap(),
            ChainStrategy::Generic => {
                let k = polar.len();
                let mut candidates: Vec<Vec<BigRational>> = polar.clone();
                for t in 1..=(2 * k + 2) as i64 {
                    let coeffs: Vec<BigRational> = (0..k)
                        .map(|i| BigRational::from_integer(BigInt::from(t).pow(i as u32)))
                        .collect();
                    candidates.push(combine(&polar, &coeffs));
                }
                let mut best: Option<(usize, Vec<BigRational>)> = None;
                for c in candidates {
                    if in_span(&e, &c) {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2.push(c.clone());
                    let dim = data.polar(&e2).len();
                    if best.as_ref().is_none_or(|(d, _)| dim < *d) {
                        best = Some((dim, c));
                    }
                }
                best.expect("polar space exceeds the element").1
            }
            ChainStrategy::SeededRandom(_) => {
                let rng = rng.as_mut().unwrap();
                loop {
                    let coeffs: Vec<BigRational> = (0..polar.len())
                        .map(|_| {
                            BigRational::new(
                                BigInt::from(rng.gen_range(-9i64..=9)),
                                BigInt::from(rng.gen_range(1i64..=4)),
                            )
                        })
                        .collect();
                    let c = combine(&polar, &coeffs);
                    if !in_span(&e, &c) {
                        break c;
                    }
                }
            }
        };
        e.push(v);
        polar = data.polar(&e);
        report.chain.push(e.clone());
        report.enlarged_characters.push(polar.len());
        report.polar_spaces.push(polar.clone());
    }
    report.rho_k = e.len();
    report.character = data.n - r - report.rho_k;
    Ok(report)
}

/// Derived-rank drop and singularity verdict for character-two systems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterTwoReport {
    pub character: usize,
    pub null_characteristics: bool,
    pub derived_rank_drop: usize,
    /// Drop of three or more for a character-two system with null characteristics.
    pub singular: bool,
}

pub fn character_two_report(p: &PfaffianSystem, point: &PointAssignment) -> Result<CharacterTwoReport, EdsError> {
    let ch = character_chain(p, point, ChainStrategy::Generic)?;
    let class = cartan_class(p)?;
    let drop = p.rank() - derived_system(p)?.rank();
    let null_characteristics = class == p.dim();
    Ok(CharacterTwoReport {
        character: ch.character,
        null_characteristics,
        derived_rank_drop: drop,
        singular: ch.character == 2 && null_characteristics && drop >= 3,
    })
}

/// A deterministic sequence of rational points used as generic sample points.
pub fn sample_point(chart: &Chart, k: usize) -> PointAssignment {
    let vals = (0..chart.dim())
        .map(|j| {
            let num = 3 + 5 * j as i64 + 7 * k as i64;
            let den = 2 + ((j + k) % 3) as i64;
            BigRational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect();
    PointAssignment::new(chart, vals).expect("dimension matches")
}

/// First sample point where the generators attain their generic rank and no
/// coefficient has a pole.
pub fn generic_point(p: &PfaffianSystem) -> Result<PointAssignment, EdsError> {
    for k in 0..32 {
        let pt = sample_point(p.chart(), k);
        if p.certificate().regular_at(pt.values()) && PointData::new(p, &pt).is_ok() {
            return Ok(pt);
        }
    }
    Err(EdsError::Invalid("no regular sample point found".into()))
}

/// Character at the first regular sample point, using the generic strategy.
pub fn generic_character(p: &PfaffianSystem) -> Result<usize, EdsError> {
    let pt = generic_point(p)?;
    Ok(character_chain(&p.reduced(), &pt, ChainStrategy::Generic)?.character)
}

/// One row of a singularity scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub point: PointAssignment,
    pub outcome: Result<PointInvariants, EdsError>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointInvariants {
    pub rank: usize,
    pub class: usize,
    /// `None` when the generators are dependent at the point.
    pub character: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericInvariants {
    pub rank: usize,
    pub class: usize,
    pub character: usize,
}

pub fn generic_invariants(p: &PfaffianSystem) -> Result<GenericInvariants, EdsError> {
    let red = p.reduced();
    Ok(GenericInvariants {
        rank: p.rank(),
        class: cartan_class(&red)?,
        character: generic_character(&red)?,
    })
}

pub fn point_invariants(p: &PfaffianSystem, point: &PointAssignment) -> Result<PointInvariants, EdsError> {
    let red = p.reduced();
    let rank = red.rank_at(point)?;
    let class = cartan_class_at(&red, point)?;
    let character = match character_chain(&red, point, ChainStrategy::Generic) {
        Ok(c) => Some(c.character),
        Err(EdsError::DependentAtPoint { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(PointInvariants { rank, class, character })
}

/// Pointwise invariants at each point, flagged where they differ from the generic values.
pub fn singularity_scan(
    p: &PfaffianSystem,
    points: &[PointAssignment],
) -> Result<(GenericInvariants, Vec<ScanRow>), EdsError> {
    singularity_scan_with(p, points, &CancelToken::new())
}

pub fn singularity_scan_with(
    p: &PfaffianSystem,
    points: &[PointAssignment],
    cancel: &CancelToken,
) -> Result<(GenericInvariants, Vec<ScanRow>), EdsError> {
    let generic = generic_invariants(p)?;
    let mut rows = Vec::with_capacity(points.len());
    for pt in points {
        cancel.check()?;
        let outcome = point_invariants(p, pt);
        let flagged = match &outcome {
            Ok(inv) => {
                inv.rank != generic.rank || inv.class != generic.class || inv.character != Some(generic.character)
            }
            Err(_) => true,
        };
        rows.push(ScanRow {
            point: pt.clone(),
            outcome,
            flagged,
        });
    }
    Ok((generic, rows))
}
