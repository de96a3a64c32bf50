//! Contact geometry on jet charts and first-order PDE systems.
//!
//! Coordinates of a first-order chart are `x1 … xn, y, p1 … pn`; the contact
//! form is `ω = dy − Σ p_i dx^i`.

use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::EdsError;
use crate::exterior::{Chart, Form, PointAssignment, VectorField};
use crate::linalg;
use crate::pfaffian::PfaffianSystem;
use crate::rational::RationalFunction;

/// Jet chart with coordinates `x`, `y` and symmetric derivative coordinates
/// `p_J` for nondecreasing multi-indices `J` with `1 ≤ |J| ≤ order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactChart {
    n: usize,
    order: usize,
    chart: Chart,
    /// Multi-index (0-based, sorted) of each `p` coordinate, in chart order.
    jets: Vec<Vec<usize>>,
}

fn multi_indices(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, len, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, len, 0, &mut Vec::new(), &mut out);
    out
}

fn jet_name(n: usize, j: &[usize]) -> String {
    if n < 10 {
        let digits: String = j.iter().map(|i| char::from(b'1' + *i as u8)).collect();
        format!("p{digits}")
    } else {
        let parts: Vec<String> = j.iter().map(|i| (i + 1).to_string()).collect();
        format!("p_{}", parts.join("_"))
    }
}

impl ContactChart {
    pub fn new(n: usize, order: usize) -> Result<Self, EdsError> {
        if n == 0 || order == 0 {
            return Err(EdsError::Invalid("contact chart needs n >= 1 and order >= 1".into()));
        }
        let jets: Vec<Vec<usize>> = (1..=order).flat_map(|k| multi_indices(n, k)).collect();
        let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        names.push("y".into());
        names.extend(jets.iter().map(|j| jet_name(n, j)));
        Ok(ContactChart {
            n,
            order,
            chart: Chart::new(names)?,
            jets,
        })
    }

    /// Recognize a chart laid out as `x1 … xn, y, p1 … pn`.
    pub fn from_chart(chart: &Chart) -> Result<Self, EdsError> {
        let d = chart.dim();
        if d < 3 || !(d - 1).is_multiple_of(2) {
            return Err(EdsError::NotContactChart(format!("dimension {d} is not 2n+1")));
        }
        let cc = ContactChart::new((d - 1) / 2, 1)?;
        if cc.chart.names() != chart.names() {
            return Err(EdsError::NotContactChart(format!(
                "expected coordinates {}",
                cc.chart.names().join(" ")
            )));
        }
        Ok(cc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn x(&self, i: usize) -> usize {
        i
    }

    pub fn y(&self) -> usize {
        self.n
    }

    /// Chart index of `p_J`, for a multi-index in any order.
    pub fn p(&self, j: &[usize]) -> Option<usize> {
        let mut s = j.to_vec();
        s.sort_unstable();
        self.jets.iter().position(|k| *k == s).map(|k| self.n + 1 + k)
    }

    /// First-order `p_i`.
    pub fn p1(&self, i: usize) -> usize {
        self.n + 1 + i
    }

    /// Multi-index of a chart coordinate, if it is a `p` coordinate.
    pub fn jet_of(&self, idx: usize) -> Option<&[usize]> {
        idx.checked_sub(self.n + 1)
            .and_then(|k| self.jets.get(k))
            .map(|v| v.as_slice())
    }

    pub fn is_fibre(&self, idx: usize) -> bool {
        idx > self.n
    }

    fn var(&self, idx: usize) -> RationalFunction {
        self.chart.coordinate(idx)
    }

    /// `ω = dy − Σ p_i dx^i`.
    pub fn contact_form(&self) -> Form {
        let mut w = Form::dx(&self.chart, self.y());
        for i in 0..self.n {
            w = w
                .sub(&Form::dx(&self.chart, i).scale(&self.var(self.p1(i))))
                .expect("same chart");
        }
        w
    }

    fn require_first_order(&self) -> Result<(), EdsError> {
        if self.order == 1 {
            Ok(())
        } else {
            Err(EdsError::NotContactChart("a first-order chart is required".into()))
        }
    }
}

/// Contact system of order `k` in `n` independent variables.
pub fn build_contact_system(n: usize, k: usize) -> Result<(ContactChart, PfaffianSystem), EdsError> {
    let cc = ContactChart::new(n, k)?;
    let chart = cc.chart.clone();
    let mut gens = vec![cc.contact_form()];
    for len in 1..k {
        for j in multi_indices(n, len) {
            let mut w = Form::dx(&chart, cc.p(&j).unwrap());
            for m in 0..n {
                let mut jm = j.clone();
                jm.push(m);
                let pjm = cc.p(&jm).unwrap();
                w = w.sub(&Form::dx(&chart, m).scale(&cc.var(pjm)))?;
            }
            gens.push(w);
        }
    }
    let sys = PfaffianSystem::new(&chart, gens)?;
    Ok((cc, sys))
}

/// Total derivative `D_i f`, living on the chart of one order higher.
pub fn total_derivative(
    cc: &ContactChart,
    f: &RationalFunction,
    i: usize,
) -> Result<(ContactChart, RationalFunction), EdsError> {
    if i >= cc.n {
        return Err(EdsError::Invalid(format!("index {} out of range 1..={}", i + 1, cc.n)));
    }
    let up = ContactChart::new(cc.n, cc.order + 1)?;
    let map: Vec<usize> = (0..cc.chart.dim()).collect();
    let g = f.remap(up.chart.dim(), &map);
    let mut acc = g.derivative(up.x(i));
    let fy = g.derivative(up.y());
    if !fy.is_zero() {
        acc = acc.add(&fy.mul(&up.var(up.p1(i))));
    }
    for (k, jet) in cc.jets.iter().enumerate() {
        let idx = cc.n + 1 + k;
        let fp = g.derivative(idx);
        if fp.is_zero() {
            continue;
        }
        let mut ji = jet.clone();
        ji.push(i);
        acc = acc.add(&fp.mul(&up.var(up.p(&ji).unwrap())));
    }
    Ok((up, acc))
}

/// A scalar function on a first-order contact chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hamiltonian {
    pub chart: ContactChart,
    pub f: RationalFunction,
}

impl Hamiltonian {
    pub fn new(chart: &ContactChart, f: RationalFunction) -> Result<Self, EdsError> {
        chart.require_first_order()?;
        if f.nvars() != chart.chart.dim() {
            return Err(EdsError::ChartMismatch);
        }
        Ok(Hamiltonian {
            chart: chart.clone(),
            f,
        })
    }

    fn d(&self, idx: usize) -> RationalFunction {
        self.f.derivative(idx)
    }

    /// `f_{x^i} + p_i f_y`.
    fn total(&self, i: usize) -> RationalFunction {
        let cc = &self.chart;
        self.d(cc.x(i)).add(&cc.var(cc.p1(i)).mul(&self.d(cc.y())))
    }
}

/// The contact vector field with Hamiltonian `f`:
/// `ξ = −Σ f_{p_i} ∂x^i + (f − Σ p_i f_{p_i}) ∂y + Σ (f_{x^i} + p_i f_y) ∂p_i`.
pub fn lie_field_from_hamiltonian(h: &Hamiltonian) -> VectorField {
    let cc = &h.chart;
    let chart = &cc.chart;
    let mut comps = vec![chart.zero_fn(); chart.dim()];
    let mut ycomp = h.f.clone();
    for i in 0..cc.n {
        let fp = h.d(cc.p1(i));
        comps[cc.x(i)] = fp.neg();
        ycomp = ycomp.sub(&cc.var(cc.p1(i)).mul(&fp));
        comps[cc.p1(i)] = h.total(i);
    }
    comps[cc.y()] = ycomp;
    VectorField::new(chart, comps).expect("component count")
}

/// Hamiltonian `⟨ξ, ω⟩` and whether `ξ` preserves the contact system.
pub fn hamiltonian_of_field(cc: &ContactChart, xi: &VectorField) -> Result<(Hamiltonian, bool), EdsError> {
    cc.require_first_order()?;
    let omega = cc.contact_form();
    let f = omega.pair(xi)?;
    let is_lie = omega.lie(xi)?.wedge(&omega)?.is_zero();
    Ok((Hamiltonian::new(cc, f)?, is_lie))
}

/// Lift of the base field `Σ a^i ∂x^i + b ∂y` to a contact vector field.
pub fn prolong_vector_field(
    cc: &ContactChart,
    a: &[RationalFunction],
    b: &RationalFunction,
) -> Result<VectorField, EdsError> {
    cc.require_first_order()?;
    if a.len() != cc.n {
        return Err(EdsError::Invalid(format!("expected {} x-components", cc.n)));
    }
    let fibre: Vec<usize> = (0..cc.n).map(|i| cc.p1(i)).collect();
    for (i, c) in a.iter().enumerate() {
        if fibre.iter().any(|&v| c.uses_var(v)) {
            return Err(EdsError::NotBaseField(cc.chart.name(cc.x(i)).to_string()));
        }
    }
    if fibre.iter().any(|&v| b.uses_var(v)) {
        return Err(EdsError::NotBaseField("y".into()));
    }
    let mut f = b.clone();
    for (i, c) in a.iter().enumerate() {
        f = f.sub(&cc.var(cc.p1(i)).mul(c));
    }
    Ok(lie_field_from_hamiltonian(&Hamiltonian::new(cc, f)?))
}

fn same_chart(f: &Hamiltonian, g: &Hamiltonian) -> Result<(), EdsError> {
    if f.chart == g.chart {
        Ok(())
    } else {
        Err(EdsError::ChartMismatch)
    }
}

/// Jacobi bracket `{f, g} = Σ g_{p_i}(f_{x^i} + p_i f_y) − Σ f_{p_i}(g_{x^i} + p_i g_y)`,
/// normalized so that `{f, g} = ξ_f g − f g_y`.
pub fn jacobi_bracket(f: &Hamiltonian, g: &Hamiltonian) -> Result<RationalFunction, EdsError> {
    same_chart(f, g)?;
    let cc = &f.chart;
    let mut acc = cc.chart.zero_fn();
    for i in 0..cc.n {
        let p = cc.p1(i);
        acc = acc.add(&g.d(p).mul(&f.total(i)));
        acc = acc.sub(&f.d(p).mul(&g.total(i)));
    }
    Ok(acc)
}

/// Lagrange bracket `[f, g] = {f, g} + f g_y − g f_y`, the Hamiltonian of `[ξ_f, ξ_g]`.
pub fn lagrange_bracket(f: &Hamiltonian, g: &Hamiltonian) -> Result<RationalFunction, EdsError> {
    let j = jacobi_bracket(f, g)?;
    let y = f.chart.y();
    Ok(j.add(&f.f.mul(&g.d(y))).sub(&g.f.mul(&f.d(y))))
}

/// Characteristic field of a single equation `F = 0`:
/// `Σ F_{p_i} ∂x^i + (Σ p_i F_{p_i}) ∂y − Σ (F_{x^i} + p_i F_y) ∂p_i`.
pub fn cauchy_char_field(h: &Hamiltonian) -> Result<VectorField, EdsError> {
    let cc = &h.chart;
    let chart = &cc.chart;
    let df = Form::function(chart, h.f.clone()).d();
    if df.wedge(&cc.contact_form())?.is_zero() {
        return Err(EdsError::Irregular);
    }
    let mut comps = vec![chart.zero_fn(); chart.dim()];
    let mut ycomp = chart.zero_fn();
    for i in 0..cc.n {
        let fp = h.d(cc.p1(i));
        ycomp = ycomp.add(&cc.var(cc.p1(i)).mul(&fp));
        comps[cc.x(i)] = fp;
        comps[cc.p1(i)] = h.total(i).neg();
    }
    comps[cc.y()] = ycomp;
    VectorField::new(chart, comps)
}

/// A system of scalar first-order equations `F_α = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdeSystem {
    pub chart: ContactChart,
    pub equations: Vec<RationalFunction>,
    /// `(i, g)` meaning `p_i = g`, when every equation is solved for a distinct `p`.
    pub graph: Option<Vec<(usize, RationalFunction)>>,
}

impl PdeSystem {
    /// Build from `lhs = rhs` pairs, recognizing graph form when possible.
    pub fn new(cc: &ContactChart, equations: Vec<(RationalFunction, RationalFunction)>) -> Result<Self, EdsError> {
        cc.require_first_order()?;
        let graph = detect_graph(cc, &equations);
        let eqs: Vec<RationalFunction> = equations.iter().map(|(l, r)| l.sub(r)).collect();
        let sys = PdeSystem {
            chart: cc.clone(),
            equations: eqs,
            graph,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Build from solved equations `p_i = g`.
    pub fn from_graph(cc: &ContactChart, solved: Vec<(usize, RationalFunction)>) -> Result<Self, EdsError> {
        let eqs = solved
            .iter()
            .map(|(i, g)| (cc.var(cc.p1(*i)), g.clone()))
            .collect::<Vec<_>>();
        let sys = Self::new(cc, eqs)?;
        if sys.graph.is_none() {
            return Err(EdsError::NotGraphForm(
                "solved indices must be distinct and right sides free of solved p's".into(),
            ));
        }
        Ok(sys)
    }

    fn validate(&self) -> Result<(), EdsError> {
        let q = self.equations.len();
        if q > self.chart.n + 1 {
            return Err(EdsError::Invalid(format!("{q} equations exceed n + 1")));
        }
        let chart = &self.chart.chart;
        let dfs: Vec<Form> = self
            .equations
            .iter()
            .map(|f| Form::function(chart, f.clone()).d())
            .collect();
        let r = linalg::generic_rank(&dfs)?.rank;
        if r < q {
            return Err(EdsError::RankDeficient { rank: r, count: q });
        }
        Ok(())
    }

    pub fn hamiltonians(&self) -> Vec<Hamiltonian> {
        self.equations
            .iter()
            .map(|f| Hamiltonian {
                chart: self.chart.clone(),
                f: f.clone(),
            })
            .collect()
    }

    /// Substitute the graph form into a function on the chart.
    pub fn restrict_function(&self, f: &RationalFunction) -> Result<RationalFunction, EdsError> {
        let graph = self
            .graph
            .as_ref()
            .ok_or(EdsError::NotGraphForm("no solved form".into()))?;
        let chart = &self.chart.chart;
        let mut vals: Vec<RationalFunction> = (0..chart.dim()).map(|i| chart.coordinate(i)).collect();
        for (i, g) in graph {
            vals[self.chart.p1(*i)] = g.clone();
        }
        f.compose(&vals, chart.dim())
    }
}

fn detect_graph(
    cc: &ContactChart,
    eqs: &[(RationalFunction, RationalFunction)],
) -> Option<Vec<(usize, RationalFunction)>> {
    let mut solved = Vec::new();
    for (lhs, rhs) in eqs {
        let i = (0..cc.n).find(|&i| *lhs == cc.var(cc.p1(i)))?;
        if solved.iter().any(|(k, _)| *k == i) {
            return None;
        }
        solved.push((i, rhs.clone()));
    }
    for (_, g) in &solved {
        if solved.iter().any(|(k, _)| g.uses_var(cc.p1(*k))) {
            return None;
        }
    }
    Some(solved)
}

/// Residue of a failing bracket pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Residue {
    /// `[F_α, F_β]` restricted to the equation locus via the graph form.
    Exact(RationalFunction),
    /// Nonzero value at the sample point with the given index.
    AtPoint { point: usize, value: BigRational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub alpha: usize,
    pub beta: usize,
    pub residue: Residue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegrabilityVerdict {
    Integrable,
    /// Sample-point check found nothing; not a proof.
    NoObstructionFound {
        points: usize,
    },
    Obstructed(Vec<Obstruction>),
}

impl IntegrabilityVerdict {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, IntegrabilityVerdict::Obstructed(_))
    }
}

fn bracket_table(s: &PdeSystem) -> Result<Vec<(usize, usize, RationalFunction)>, EdsError> {
    let hs = s.hamiltonians();
    let q = hs.len();
    let pairs: Vec<(usize, usize)> = (0..q).flat_map(|a| (a + 1..q).map(move |b| (a, b))).collect();
    pairs
        .par_iter()
        .map(|&(a, b)| lagrange_bracket(&hs[a], &hs[b]).map(|v| (a, b, v)))
        .collect()
}

/// Bracket test `[F_α, F_β]|S = 0` for all pairs, exactly via the graph form
/// or by refutation at sample points on the locus.
pub fn integrability_check(
    s: &PdeSystem,
    points: Option<&[PointAssignment]>,
) -> Result<IntegrabilityVerdict, EdsError> {
    let table = bracket_table(s)?;
    if s.graph.is_some() {
        let mut obs = Vec::new();
        for (a, b, v) in table {
            let r = s.restrict_function(&v)?;
            if !r.is_zero() {
                obs.push(Obstruction {
                    alpha: a,
                    beta: b,
                    residue: Residue::Exact(r),
                });
            }
        }
        return Ok(if obs.is_empty() {
            IntegrabilityVerdict::Integrable
        } else {
            IntegrabilityVerdict::Obstructed(obs)
        });
    }
    let points = points.ok_or(EdsError::NoRestriction)?;
    for (k, pt) in points.iter().enumerate() {
        if pt.chart() != s.chart.chart() {
            return Err(EdsError::ChartMismatch);
        }
        for f in &s.equations {
            if !pt.eval(f)?.is_zero() {
                return Err(EdsError::PointOffLocus(k));
            }
        }
    }
    let mut obs = Vec::new();
    for (a, b, v) in table {
        for (k, pt) in points.iter().enumerate() {
            let val = pt.eval(&v)?;
            if !val.is_zero() {
                obs.push(Obstruction {
                    alpha: a,
                    beta: b,
                    residue: Residue::AtPoint { point: k, value: val },
                });
                break;
            }
        }
    }
    Ok(if obs.is_empty() {
        IntegrabilityVerdict::NoObstructionFound { points: points.len() }
    } else {
        IntegrabilityVerdict::Obstructed(obs)
    })
}

/// Random points on a graph-form locus: free coordinates get small rationals,
/// solved `p`'s are computed from the graph.
pub fn sample_points_on(s: &PdeSystem, count: usize, seed: u64) -> Result<Vec<PointAssignment>, EdsError> {
    let graph = s
        .graph
        .as_ref()
        .ok_or(EdsError::NotGraphForm("no solved form".into()))?;
    let chart = s.chart.chart();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(EdsError::Invalid("could not find regular points on the locus".into()));
        }
        let mut vals: Vec<BigRational> = (0..chart.dim())
            .map(|_| {
                BigRational::new(
                    BigInt::from(rng.gen_range(-6i64..=6)),
                    BigInt::from(rng.gen_range(1i64..=3)),
                )
            })
            .collect();
        let mut ok = true;
        for (i, g) in graph {
            match g.evaluate(&vals) {
                Ok(v) => vals[s.chart.p1(*i)] = v,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            out.push(PointAssignment::new(chart, vals)?);
        }
    }
    Ok(out)
}

/// Contact system pulled back to the locus of a graph-form system, on the
/// chart of the remaining coordinates.
pub fn restrict_system(s: &PdeSystem) -> Result<PfaffianSystem, EdsError> {
    let graph = s
        .graph
        .as_ref()
        .ok_or(EdsError::NotGraphForm("no solved form".into()))?;
    let cc = &s.chart;
    let chart = cc.chart();
    let solved: Vec<usize> = graph.iter().map(|(i, _)| cc.p1(*i)).collect();
    let keep: Vec<usize> = (0..chart.dim()).filter(|i| !solved.contains(i)).collect();
    let target = Chart::new(keep.iter().map(|&i| chart.name(i).to_string()))?;
    let map: Vec<usize> = (0..chart.dim())
        .map(|i| keep.iter().position(|&k| k == i).unwrap_or(0))
        .collect();
    let mut bindings: Vec<RationalFunction> = (0..chart.dim())
        .map(|i| match keep.iter().position(|&k| k == i) {
            Some(j) => target.coordinate(j),
            None => target.zero_fn(),
        })
        .collect();
    for (i, g) in graph {
        bindings[cc.p1(*i)] = g.remap(target.dim(), &map);
    }
    let w = cc.contact_form().substitute(&target, &bindings)?;
    PfaffianSystem::new(&target, vec![w])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessVerdict {
    pub complete: bool,
    /// Pairs whose commutator leaves the span of the fields.
    pub failing: Vec<(usize, usize)>,
    pub fields: Vec<VectorField>,
}

/// Check that the fields `ξ_{f_i} − f_i ∂y` span an involutive distribution,
/// given that all Jacobi brackets `{f_i, f_j}` vanish.
pub fn complete_system_check(fs: &[Hamiltonian]) -> Result<CompletenessVerdict, EdsError> {
    let Some(first) = fs.first() else {
        return Ok(CompletenessVerdict {
            complete: true,
            failing: vec![],
            fields: vec![],
        });
    };
    let cc = &first.chart;
    for (i, f) in fs.iter().enumerate() {
        for (j, g) in fs.iter().enumerate().skip(i + 1) {
            let b = jacobi_bracket(f, g)?;
            if !b.is_zero() {
                return Err(EdsError::BracketHypothesis(i + 1, j + 1, cc.chart.render_fn(&b)));
            }
        }
    }
    let dy = VectorField::partial(&cc.chart, cc.y());
    let fields: Vec<VectorField> = fs
        .iter()
        .map(|h| lie_field_from_hamiltonian(h).sub(&dy.scale(&h.f)))
        .collect::<Result<_, _>>()?;
    let dim = cc.chart.dim();
    let base: Vec<Vec<RationalFunction>> = fields.iter().map(|v| v.components().to_vec()).collect();
    let base_rank = linalg::rank(base.clone(), dim);
    let mut failing = Vec::new();
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let c = fields[i].bracket(&fields[j])?;
            let mut m = base.clone();
            m.push(c.components().to_vec());
            if linalg::rank(m, dim) > base_rank {
                failing.push((i, j));
            }
        }
    }
    Ok(CompletenessVerdict {
        complete: failing.is_empty(),
        failing,
        fields,
    })
}

/// Expansion of each `dω^i` in the wedge basis of a coframe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceTable {
    pub chart: Chart,
    /// Coframe: the generators followed by the complement forms.
    pub coframe: Vec<Form>,
    pub labels: Vec<String>,
    /// Indices into `coframe` dropped from the expansions.
    pub modulo: Vec<usize>,
    /// For each generator, terms `(a, b, c)` meaning `c · θ_a ∧ θ_b` with `a < b`.
    pub rows: Vec<Vec<(usize, usize, RationalFunction)>>,
}

impl CongruenceTable {
    pub fn render_row(&self, i: usize) -> String {
        let terms = &self.rows[i];
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (a, b, c)) in terms.iter().enumerate() {
            let basis = format!("{}^{}", self.labels[*a], self.labels[*b]);
            let s = self.chart.render_fn(c);
            let (neg, body) = if c.is_one() {
                (false, None)
            } else if c.neg().is_one() {
                (true, None)
            } else if s.starts_with('-') {
                (true, Some(self.chart.render_fn(&c.neg())))
            } else {
                (false, Some(s))
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if let Some(b) = body {
                if b.contains(' ') {
                    out.push_str(&format!("({b})*"));
                } else {
                    out.push_str(&format!("{b}*"));
                }
            }
            out.push_str(&basis);
        }
        out
    }

    /// Re-expand row `i` in coordinates (exact inverse of the rewrite when nothing is dropped).
    pub fn expand_row(&self, i: usize) -> Result<Form, EdsError> {
        let mut acc = Form::zero(&self.chart, 2);
        for (a, b, c) in &self.rows[i] {
            acc = acc.add(&self.coframe[*a].wedge(&self.coframe[*b])?.scale(c))?;
        }
        Ok(acc)
    }
}

/// Rewrite each `dω^i` in the coframe `generators ∪ complement`, dropping
/// terms that contain a generator listed in `modulo`.
pub fn structure_congruences(
    p: &PfaffianSystem,
    modulo: &[usize],
    complement: &[Form],
) -> Result<CongruenceTable, EdsError> {
    let chart = p.chart().clone();
    let n = chart.dim();
    let mut coframe: Vec<Form> = p.generators().to_vec();
    coframe.extend(complement.iter().cloned());
    for f in complement {
        if f.chart() != &chart {
            return Err(EdsError::ChartMismatch);
        }
    }
    let r = linalg::generic_rank(&coframe)?.rank;
    if coframe.len() != n || r != n {
        return Err(EdsError::NotCoframe { rank: r, dim: n });
    }
    for &m in modulo {
        if m >= p.generators().len() {
            return Err(EdsError::Invalid(format!("modulo index {} is not a generator", m + 1)));
        }
    }
    // Invert the coframe matrix: dx_j = Σ_a inv[j][a] θ_a.
    let a = linalg::one_form_matrix(&coframe);
    let mut aug: Vec<Vec<RationalFunction>> = Vec::with_capacity(n);
    for (j, row) in a.iter().enumerate() {
        let mut r = row.clone();
        r.extend((0..n).map(|k| if k == j { chart.one_fn() } else { chart.zero_fn() }));
        aug.push(r);
    }
    // Columns of A^T: solve A^T-based system by reducing [A | I] gives A^{-1} on the right.
    let ech = linalg::rref(aug, 2 * n);
    let inv: Vec<Vec<RationalFunction>> = ech.rows.iter().map(|r| r[n..].to_vec()).collect();
    // θ = A dx, so dx = A^{-1} θ: dx_j = Σ_a inv[j][a] θ_a.
    let images: Vec<Form> = (0..n).map(|j| Form::from_components(&chart, &inv[j])).collect();
    let mut rows = Vec::new();
    for g in p.generators() {
        let e = g.d().map_differentials(&images)?;
        let mut terms = Vec::new();
        for (mask, c) in e.terms() {
            let idx = crate::exterior::mask_indices(mask);
            if idx.iter().any(|i| modulo.contains(i)) {
                continue;
            }
            terms.push((idx[0], idx[1], c.clone()));
        }
        rows.push(terms);
    }
    let labels = coframe
        .iter()
        .enumerate()
        .map(|(k, f)| {
            if k < p.generators().len() {
                format!("w{}", k + 1)
            } else if f.num_terms() == 1 && f.terms().next().unwrap().1.is_one() {
                f.render()
            } else {
                format!("th{}", k + 1 - p.generators().len())
            }
        })
        .collect();
    Ok(CongruenceTable {
        chart,
        coframe,
        labels,
        modulo: modulo.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_layout() {
        let cc = ContactChart::new(2, 2).unwrap();
        assert_eq!(cc.chart().names().join(" "), "x1 x2 y p1 p2 p11 p12 p22");
        assert_eq!(cc.p(&[1, 0]), cc.p(&[0, 1]));
        let c1 = ContactChart::new(2, 1).unwrap();
        assert_eq!(ContactChart::from_chart(c1.chart()).unwrap(), c1);
        assert!(ContactChart::from_chart(&Chart::standard(5)).is_err());
    }

    #[test]
    fn contact_form_renders() {
        let cc = ContactChart::new(2, 1).unwrap();
        assert_eq!(cc.contact_form().render(), "-p1*dx1 - p2*dx2 + dy");
    }
}
