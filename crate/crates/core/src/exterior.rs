//! Exterior calculus over rational-function coefficients.
//!
//! A [`Form`] stores its terms keyed by a bitmask of the (strictly increasing)
//! coordinate multi-index, so charts are limited to 64 coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigRational, One, Zero};

use crate::error::EdsError;
use crate::rational::RationalFunction;

pub const MAX_DIM: usize = 64;

/// Ordered coordinate names of a chart.
#[derive(Clone, Debug)]
pub struct Chart {
    names: Arc<[String]>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.names, &other.names) || self.names == other.names
    }
}

impl Eq for Chart {}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, EdsError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(EdsError::InvalidChart("a chart needs at least one coordinate".into()));
        }
        if names.len() > MAX_DIM {
            return Err(EdsError::InvalidChart(format!("more than {MAX_DIM} coordinates")));
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(EdsError::InvalidChart(format!("bad coordinate name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(EdsError::InvalidChart(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Chart { names: names.into() })
    }

    /// Chart `x1, …, xn`.
    pub fn standard(n: usize) -> Self {
        Chart::new((1..=n).map(|i| format!("x{i}"))).expect("standard chart")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coordinate(&self, i: usize) -> RationalFunction {
        RationalFunction::var(self.dim(), i)
    }

    pub fn constant(&self, c: BigRational) -> RationalFunction {
        RationalFunction::constant(self.dim(), c)
    }

    pub fn zero_fn(&self) -> RationalFunction {
        RationalFunction::zero(self.dim())
    }

    pub fn one_fn(&self) -> RationalFunction {
        RationalFunction::one(self.dim())
    }

    /// This chart followed by `extra` further coordinates.
    pub fn extended<S: Into<String>>(&self, extra: impl IntoIterator<Item = S>) -> Result<Chart, EdsError> {
        let mut names: Vec<String> = self.names.to_vec();
        names.extend(extra.into_iter().map(Into::into));
        Chart::new(names)
    }

    pub fn render_fn(&self, f: &RationalFunction) -> String {
        f.render(&self.names)
    }

    fn check(&self, other: &Chart) -> Result<(), EdsError> {
        if self == other {
            Ok(())
        } else {
            Err(EdsError::ChartMismatch)
        }
    }
}

pub fn mask_indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out.push(i);
        m &= m - 1;
    }
    out
}

pub fn indices_mask(idx: &[usize]) -> u64 {
    idx.iter().fold(0, |m, &i| m | (1u64 << i))
}

/// Sign of `dx_a ∧ dx_b` relative to the sorted product; `None` if they overlap.
pub fn wedge_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    // Count inversions: pairs (i in a, j in b) with i > j.
    let mut inv = 0u32;
    let mut m = a;
    while m != 0 {
        let i = m.trailing_zeros();
        inv += (b & ((1u64 << i) - 1)).count_ones();
        m &= m - 1;
    }
    Some(inv % 2 == 1)
}

/// A homogeneous differential form with rational-function coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Form {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<u64, RationalFunction>,
}

impl Form {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Form {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn function(chart: &Chart, f: RationalFunction) -> Self {
        let mut form = Self::zero(chart, 0);
        if !f.is_zero() {
            form.terms.insert(0, f);
        }
        form
    }

    /// The coordinate differential `dx_i`.
    pub fn dx(chart: &Chart, i: usize) -> Self {
        Self::monomial(chart, &[i], chart.one_fn())
    }

    /// `c · dx_{i1} ∧ … ∧ dx_{ik}` for any ordering of the indices.
    pub fn monomial(chart: &Chart, idx: &[usize], c: RationalFunction) -> Self {
        let mut f = Self::zero(chart, idx.len());
        let mut sorted = idx.to_vec();
        // Sort while tracking permutation parity.
        let mut odd = false;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) || c.is_zero() {
            return f;
        }
        let c = if odd { c.neg() } else { c };
        f.terms.insert(indices_mask(&sorted), c);
        f
    }

    /// A 1-form from its component list.
    pub fn from_components(chart: &Chart, comps: &[RationalFunction]) -> Self {
        assert_eq!(comps.len(), chart.dim());
        let mut f = Self::zero(chart, 1);
        for (i, c) in comps.iter().enumerate() {
            if !c.is_zero() {
                f.terms.insert(1u64 << i, c.clone());
            }
        }
        f
    }

    pub fn from_terms(chart: &Chart, degree: usize, terms: impl IntoIterator<Item = (u64, RationalFunction)>) -> Self {
        let mut f = Self::zero(chart, degree);
        for (m, c) in terms {
            assert_eq!(
                m.count_ones() as usize,
                degree,
                "multi-index length differs from degree"
            );
            f.add_term(m, c);
        }
        f
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &RationalFunction)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mask: u64) -> RationalFunction {
        self.terms.get(&mask).cloned().unwrap_or_else(|| self.chart.zero_fn())
    }

    /// Scalar value of a 0-form.
    pub fn scalar(&self) -> RationalFunction {
        self.coefficient(0)
    }

    /// Components of a 1-form along `dx_0, …, dx_{n-1}`.
    pub fn components(&self) -> Vec<RationalFunction> {
        (0..self.chart.dim()).map(|i| self.coefficient(1u64 << i)).collect()
    }

    fn add_term(&mut self, m: u64, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        match self.terms.get(&m) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn same_shape(&self, other: &Form) -> Result<(), EdsError> {
        self.chart.check(&other.chart)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(EdsError::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form, EdsError> {
        self.same_shape(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(*m, c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, other: &Form) -> Result<Form, EdsError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        Form {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn scale(&self, f: &RationalFunction) -> Form {
        if f.is_zero() {
            return Form::zero(&self.chart, self.degree);
        }
        let mut r = Form::zero(&self.chart, self.degree);
        for (m, c) in &self.terms {
            r.add_term(*m, c.mul(f));
        }
        r
    }

    pub fn scale_q(&self, q: &BigRational) -> Form {
        self.scale(&self.chart.constant(q.clone()))
    }

    pub fn wedge(&self, other: &Form) -> Result<Form, EdsError> {
        self.chart.check(&other.chart)?;
        let degree = self.degree + other.degree;
        let mut r = Form::zero(&self.chart, degree);
        if degree > self.chart.dim() {
            return Ok(r);
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(neg) = wedge_sign(*ma, *mb) {
                    let c = ca.mul(cb);
                    r.add_term(ma | mb, if neg { c.neg() } else { c });
                }
            }
        }
        Ok(r)
    }

    /// `self ∧ self ∧ … ∧ self` (`k` factors); the 0-form 1 for `k = 0`.
    pub fn wedge_power(&self, k: usize) -> Form {
        let mut r = Form::function(&self.chart, self.chart.one_fn());
        for _ in 0..k {
            r = r.wedge(self).expect("same chart");
            if r.is_zero() {
                break;
            }
        }
        r
    }

    pub fn d(&self) -> Form {
        let n = self.chart.dim();
        let mut r = Form::zero(&self.chart, self.degree + 1);
        for (m, c) in &self.terms {
            for j in 0..n {
                if m & (1u64 << j) != 0 {
                    continue;
                }
                let dc = c.derivative(j);
                if dc.is_zero() {
                    continue;
                }
                let neg = (m & ((1u64 << j) - 1)).count_ones() % 2 == 1;
                r.add_term(m | (1u64 << j), if neg { dc.neg() } else { dc });
            }
        }
        r
    }

    /// Interior product `i(v) self`.
    pub fn interior(&self, v: &VectorField) -> Result<Form, EdsError> {
        self.chart.check(&v.chart)?;
        if self.degree == 0 {
            return Err(EdsError::ContractZeroForm);
        }
        let mut r = Form::zero(&self.chart, self.degree - 1);
        for (m, c) in &self.terms {
            for (pos, i) in mask_indices(*m).into_iter().enumerate() {
                let vi = &v.comps[i];
                if vi.is_zero() {
                    continue;
                }
                let t = c.mul(vi);
                r.add_term(m & !(1u64 << i), if pos % 2 == 1 { t.neg() } else { t });
            }
        }
        Ok(r)
    }

    /// Lie derivative `θ(v) self = i(v) d self + d i(v) self`.
    pub fn lie(&self, v: &VectorField) -> Result<Form, EdsError> {
        self.chart.check(&v.chart)?;
        let a = self.d().interior(v)?;
        if self.degree == 0 {
            return Ok(a);
        }
        a.add(&self.interior(v)?.d())
    }

    /// Pairing of a 1-form with a vector field.
    pub fn pair(&self, v: &VectorField) -> Result<RationalFunction, EdsError> {
        if self.degree != 1 {
            return Err(EdsError::DegreeMismatch {
                expected: 1,
                found: self.degree,
            });
        }
        Ok(self.interior(v)?.scalar())
    }

    /// Replace each `dx_j` by `images[j]` (1-forms on the target chart) and each
    /// coefficient by `coeff_map(c)`.
    fn transform(
        &self,
        target: &Chart,
        images: &[Form],
        coeff_map: impl Fn(&RationalFunction) -> Result<RationalFunction, EdsError>,
    ) -> Result<Form, EdsError> {
        let mut r = Form::zero(target, self.degree);
        for (m, c) in &self.terms {
            let c2 = coeff_map(c)?;
            if c2.is_zero() {
                continue;
            }
            let mut t = Form::function(target, c2);
            for i in mask_indices(*m) {
                t = t.wedge(&images[i])?;
                if t.is_zero() {
                    break;
                }
            }
            r = r.add(&t)?;
        }
        Ok(r)
    }

    /// Rewrite with `dx_j ↦ images[j]`, coefficients unchanged.
    pub fn map_differentials(&self, images: &[Form]) -> Result<Form, EdsError> {
        assert_eq!(images.len(), self.chart.dim());
        self.transform(&self.chart, images, |c| Ok(c.clone()))
    }

    /// Pullback along `x_j = bindings[j]`, with bindings living on `target`.
    pub fn substitute(&self, target: &Chart, bindings: &[RationalFunction]) -> Result<Form, EdsError> {
        if bindings.len() != self.chart.dim() {
            return Err(EdsError::Invalid(format!(
                "expected {} bindings, got {}",
                self.chart.dim(),
                bindings.len()
            )));
        }
        let images: Vec<Form> = bindings.iter().map(|b| Form::function(target, b.clone()).d()).collect();
        let tdim = target.dim();
        self.transform(target, &images, |c| c.compose(bindings, tdim))
    }

    /// Coefficients evaluated at the point, as a constant-coefficient form.
    pub fn evaluate(&self, p: &PointAssignment) -> Result<Form, EdsError> {
        self.chart.check(&p.chart)?;
        let mut r = Form::zero(&self.chart, self.degree);
        for (m, c) in &self.terms {
            let v = c.evaluate(&p.values)?;
            r.add_term(*m, self.chart.constant(v));
        }
        Ok(r)
    }

    /// Re-embed into a chart whose coordinate `i` is `map[i]` of the target.
    pub fn remap(&self, target: &Chart, map: &[usize]) -> Form {
        let mut r = Form::zero(target, self.degree);
        for (m, c) in &self.terms {
            let idx: Vec<usize> = mask_indices(*m).into_iter().map(|i| map[i]).collect();
            let t = Form::monomial(target, &idx, c.remap(target.dim(), map));
            for (m2, c2) in t.terms {
                r.add_term(m2, c2);
            }
        }
        r
    }

    /// Value on vectors given by exact components (a constant-coefficient evaluation).
    pub fn apply_constant(&self, vectors: &[Vec<BigRational>]) -> Result<BigRational, EdsError> {
        if vectors.len() != self.degree {
            return Err(EdsError::DegreeMismatch {
                expected: self.degree,
                found: vectors.len(),
            });
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let c = c
                .constant_value()
                .ok_or_else(|| EdsError::Invalid("form is not constant".into()))?;
            let idx = mask_indices(*m);
            acc += c * det_columns(&idx, vectors);
        }
        Ok(acc)
    }

    /// Render in the text syntax, e.g. `dx1 + x4*dx5`.
    pub fn render(&self) -> String {
        if self.degree == 0 {
            return self.chart.render_fn(&self.scalar());
        }
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let basis = mask_indices(*m)
                .into_iter()
                .map(|i| format!("d{}", self.chart.name(i)))
                .collect::<Vec<_>>()
                .join("^");
            let (neg, body) = coefficient_text(&self.chart, c);
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match body {
                None => out.push_str(&basis),
                Some(b) => {
                    out.push_str(&b);
                    out.push('*');
                    out.push_str(&basis);
                }
            }
        }
        out
    }
}

/// Sign and text of a coefficient in front of a basis element; `None` text means unit.
fn coefficient_text(chart: &Chart, c: &RationalFunction) -> (bool, Option<String>) {
    if c.is_one() {
        return (false, None);
    }
    if c.neg().is_one() {
        return (true, None);
    }
    let s = chart.render_fn(c);
    let (neg, s) = if s.starts_with('-') {
        (true, chart.render_fn(&c.neg()))
    } else {
        (false, s)
    };
    if s.contains(' ') {
        (neg, Some(format!("({s})")))
    } else {
        (neg, Some(s))
    }
}

#[allow(clippy::needless_range_loop)]
fn det_columns(idx: &[usize], vectors: &[Vec<BigRational>]) -> BigRational {
    let k = idx.len();
    let mut m: Vec<Vec<BigRational>> = (0..k)
        .map(|r| (0..k).map(|c| vectors[c][idx[r]].clone()).collect())
        .collect();
    let mut det = BigRational::one();
    for col in 0..k {
        let Some(p) = (col..k).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det *= &piv;
        for r in col + 1..k {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &piv;
            for c in col..k {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A vector field given by its components along `∂/∂x_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    chart: Chart,
    comps: Vec<RationalFunction>,
}

impl VectorField {
    pub fn new(chart: &Chart, comps: Vec<RationalFunction>) -> Result<Self, EdsError> {
        if comps.len() != chart.dim() {
            return Err(EdsError::Invalid(format!(
                "vector field needs {} components, got {}",
                chart.dim(),
                comps.len()
            )));
        }
        Ok(VectorField {
            chart: chart.clone(),
            comps,
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        VectorField {
            chart: chart.clone(),
            comps: vec![chart.zero_fn(); chart.dim()],
        }
    }

    /// The coordinate field `∂/∂x_i`.
    pub fn partial(chart: &Chart, i: usize) -> Self {
        let mut v = Self::zero(chart);
        v.comps[i] = chart.one_fn();
        v
    }

    pub fn from_constants(chart: &Chart, values: &[BigRational]) -> Self {
        VectorField {
            chart: chart.clone(),
            comps: values.iter().map(|q| chart.constant(q.clone())).collect(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &RationalFunction {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self, EdsError> {
        self.chart.check(&other.chart)?;
        Ok(VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, EdsError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, f: &RationalFunction) -> Self {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|c| c.mul(f)).collect(),
        }
    }

    /// Directional derivative `v(f)`.
    pub fn apply(&self, f: &RationalFunction) -> RationalFunction {
        let mut acc = self.chart.zero_fn();
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() || !f.uses_var(i) {
                continue;
            }
            acc = acc.add(&c.mul(&f.derivative(i)));
        }
        acc
    }

    /// Commutator `[self, other]`.
    pub fn bracket(&self, other: &Self) -> Result<Self, EdsError> {
        self.chart.check(&other.chart)?;
        let comps = (0..self.chart.dim())
            .map(|i| self.apply(&other.comps[i]).sub(&other.apply(&self.comps[i])))
            .collect();
        Ok(VectorField {
            chart: self.chart.clone(),
            comps,
        })
    }

    pub fn evaluate(&self, p: &PointAssignment) -> Result<Vec<BigRational>, EdsError> {
        self.chart.check(&p.chart)?;
        self.comps.iter().map(|c| c.evaluate(&p.values)).collect()
    }

    /// Render as `c1*@x1 + …`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis = format!("@{}", self.chart.name(i));
            let (neg, body) = coefficient_text(&self.chart, c);
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if let Some(b) = body {
                out.push_str(&b);
                out.push('*');
            }
            out.push_str(&basis);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// An exact point of a chart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointAssignment {
    chart: Chart,
    values: Vec<BigRational>,
}

impl PointAssignment {
    pub fn new(chart: &Chart, values: Vec<BigRational>) -> Result<Self, EdsError> {
        if values.len() != chart.dim() {
            return Err(EdsError::Invalid(format!(
                "point needs {} values, got {}",
                chart.dim(),
                values.len()
            )));
        }
        Ok(PointAssignment {
            chart: chart.clone(),
            values,
        })
    }

    pub fn origin(chart: &Chart) -> Self {
        PointAssignment {
            chart: chart.clone(),
            values: vec![BigRational::zero(); chart.dim()],
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn eval(&self, f: &RationalFunction) -> Result<BigRational, EdsError> {
        f.evaluate(&self.values)
    }

    pub fn render(&self) -> String {
        self.chart
            .names()
            .iter()
            .zip(&self.values)
            .map(|(n, v)| format!("{n}={}", crate::poly::render_rational(v)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}
