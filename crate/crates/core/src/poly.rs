//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are keyed by exponent vectors of fixed length `nvars`; the map order
//! is lexicographic with variable 0 most significant, so the last key is the
//! lex-leading monomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exps: Monomial, c: BigRational) -> Self {
        let nvars = exps.len();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().iter().all(|&e| e == 0),
            _ => false,
        }
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value().is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Coefficient of the constant monomial.
    pub fn constant_value(&self) -> BigRational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn lead(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn lead_coeff(&self) -> BigRational {
        self.lead().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m[var] > 0)
    }

    /// Indices of the variables that occur with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.uses_var(v)).collect()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "polynomial arity mismatch");
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "polynomial arity mismatch");
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if self.is_constant() {
            return other.scale(&self.constant_value());
        }
        if other.is_constant() {
            return self.scale(&other.constant_value());
        }
        let mut r = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                r.add_term(m, c1 * c2);
            }
        }
        r
    }

    fn mul_monomial(&self, m: &[u32], c: &BigRational) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.iter().zip(m).map(|(a, b)| a + b).collect(), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one(self.nvars);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[var] > 0 {
                let mut m2 = m.clone();
                let k = m2[var];
                m2[var] -= 1;
                r.add_term(m2, c * BigRational::from_integer(BigInt::from(k)));
            }
        }
        r
    }

    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= num::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-embed into a ring with `new_nvars` variables; variable `i` becomes `map[i]`.
    pub fn remap(&self, new_nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let mut r = Poly::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut m2 = vec![0; new_nvars];
            for (i, &e) in m.iter().enumerate() {
                m2[map[i]] += e;
            }
            r.add_term(m2, c.clone());
        }
        r
    }

    /// Append `extra` variables after the existing ones.
    pub fn extend(&self, extra: usize) -> Poly {
        let map: Vec<usize> = (0..self.nvars).collect();
        self.remap(self.nvars + extra, &map)
    }

    /// Rational content: the positive rational c with `self / c` integral and primitive.
    pub fn content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Integral primitive representative with positive lex-leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lead_coeff().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Scale so that the lex-leading coefficient is one.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead_coeff().recip())
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_monomial(&self) -> Monomial {
        let mut mins = vec![u32::MAX; self.nvars];
        for m in self.terms.keys() {
            for (a, &b) in mins.iter_mut().zip(m) {
                *a = (*a).min(b);
            }
        }
        if self.is_zero() {
            mins.iter_mut().for_each(|a| *a = 0);
        }
        mins
    }

    fn div_by_monomial(&self, m: &[u32]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.iter().zip(m).map(|(a, b)| a - b).collect(), v.clone()))
                .collect(),
        }
    }

    /// Exact division. Returns `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if divisor.is_constant() {
            return Some(self.scale(&divisor.constant_value().recip()));
        }
        if divisor.is_monomial() {
            let (dm, dc) = divisor.lead().unwrap();
            if self.terms.keys().all(|m| m.iter().zip(dm).all(|(a, b)| a >= b)) {
                let mut r = self.div_by_monomial(dm);
                r = r.scale(&dc.recip());
                return Some(r);
            }
            return None;
        }
        let (lm, lc) = divisor.lead().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.lead().map(|(m, c)| (m.clone(), c.clone())) {
            if !rm.iter().zip(&lm).all(|(a, b)| a >= b) {
                return None;
            }
            let qm: Monomial = rm.iter().zip(&lm).map(|(a, b)| a - b).collect();
            let qc = rc / &lc;
            rem = rem.sub(&divisor.mul_monomial(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Coefficients as a polynomial in `var`: entry k multiplies `var^k`.
    fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let k = m[var] as usize;
            let mut m2 = m.clone();
            m2[var] = 0;
            out[k].add_term(m2, c.clone());
        }
        out
    }

    fn from_coeffs_in(var: usize, nvars: usize, coeffs: &[Poly]) -> Poly {
        let mut r = Poly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut m2 = m.clone();
                m2[var] += k as u32;
                r.add_term(m2, v.clone());
            }
        }
        r
    }

    /// Greatest common divisor, normalized to be integral, primitive and with
    /// positive lex-leading coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "polynomial arity mismatch");
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one(self.nvars);
        }
        // Monomial factor shared by both.
        let ma = self.min_monomial();
        let mb = other.min_monomial();
        let mg: Monomial = ma.iter().zip(&mb).map(|(a, b)| *a.min(b)).collect();
        if self.is_monomial() || other.is_monomial() {
            return Poly::monomial(mg, BigRational::one());
        }
        let a = self.div_by_monomial(&ma).primitive();
        let b = other.div_by_monomial(&mb).primitive();
        let g = gcd_no_monomial(&a, &b);
        g.mul_monomial(&mg, &BigRational::one()).primitive()
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        let g = self.gcd(other);
        self.div_exact(&g).expect("gcd divides").mul(other).primitive()
    }

    /// Render with the given variable names, monomials in descending graded-lex order.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms_grlex().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let is_unit_monomial = m.iter().all(|&e| e == 0);
            let mon = render_monomial(m, names);
            if is_unit_monomial {
                out.push_str(&render_rational(&abs));
            } else if abs.is_one() {
                out.push_str(&mon);
            } else {
                let _ = write!(out, "{}*{}", render_rational(&abs), mon);
            }
        }
        out
    }

    /// Terms sorted by descending total degree, ties broken by descending lex.
    pub fn sorted_terms_grlex(&self) -> Vec<(&Monomial, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| grlex_cmp(b, a));
        v
    }
}

pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

fn render_monomial(m: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

pub fn render_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// gcd of two primitive polynomials with no monomial factor.
fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    let nvars = a.nvars;
    if a.is_constant() || b.is_constant() {
        return Poly::one(nvars);
    }
    if a == b {
        return a.primitive();
    }
    // Cheap divisibility checks catch the common cancellation cases.
    if b.num_terms() <= a.num_terms() && a.div_exact(b).is_some() {
        return b.primitive();
    }
    if a.num_terms() <= b.num_terms() && b.div_exact(a).is_some() {
        return a.primitive();
    }
    let sa = a.support_vars();
    let sb = b.support_vars();
    // A variable present in only one argument: the gcd lives in its content.
    for &v in &sa {
        if !sb.contains(&v) {
            let c = content_in(a, v);
            return c.gcd(b);
        }
    }
    for &v in &sb {
        if !sa.contains(&v) {
            let c = content_in(b, v);
            return a.gcd(&c);
        }
    }
    let var = sa[0];
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let cont = ca.gcd(&cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = univariate_prs_gcd(&pa, &pb, var);
    g.mul(&cont).primitive()
}

/// gcd of the coefficients of `p` viewed as a polynomial in `var`.
fn content_in(p: &Poly, var: usize) -> Poly {
    let mut g = Poly::zero(p.nvars);
    for c in p.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.primitive() } else { g.gcd(&c) };
        if g.is_constant() {
            return Poly::one(p.nvars);
        }
    }
    g
}

fn primitive_part_in(p: &Poly, var: usize) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, var);
    p.div_exact(&c).expect("content divides").primitive()
}

/// Primitive polynomial remainder sequence in `var`.
fn univariate_prs_gcd(a: &Poly, b: &Poly, var: usize) -> Poly {
    let (mut f, mut g) = if a.degree_in(var) >= b.degree_in(var) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    loop {
        if g.is_zero() {
            return primitive_part_in(&f, var);
        }
        if g.degree_in(var) == 0 {
            return Poly::one(a.nvars);
        }
        let r = pseudo_remainder(&f, &g, var);
        f = g;
        g = primitive_part_in(&r, var);
    }
}

fn pseudo_remainder(f: &Poly, g: &Poly, var: usize) -> Poly {
    let nvars = f.nvars;
    let dg = g.degree_in(var) as usize;
    let gc = g.coeffs_in(var);
    let lg = gc[dg].clone();
    let mut r = f.coeffs_in(var);
    while r.len() > dg && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        // r <- lg * r - lr * var^(dr-dg) * g
        for c in r.iter_mut() {
            *c = c.mul(&lg);
        }
        let shift = dr - dg;
        for (k, gk) in gc.iter().enumerate() {
            let t = gk.mul(&lr);
            r[k + shift] = r[k + shift].sub(&t);
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        while r.last().map(|c| c.is_zero()).unwrap_or(false) {
            r.pop();
        }
    }
    Poly::from_coeffs_in(var, nvars, &r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn arithmetic_basics() {
        let p = x(0).add(&x(1)); // x0 + x1
        let sq = p.mul(&p);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.sub(&sq), Poly::zero(3));
        assert_eq!(sq.derivative(0), p.scale(&q(2)));
    }

    #[test]
    fn exact_division() {
        let a = x(0).add(&x(1));
        let b = x(0).sub(&x(2));
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&x(1)), None);
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let common = x(0).mul(&x(1)).add(&Poly::from_int(3, 1)); // x0 x1 + 1
        let a = common.mul(&x(2).add(&Poly::from_int(3, 2)));
        let b = common.mul(&x(0).sub(&x(2)));
        let g = a.gcd(&b);
        assert_eq!(g, common.primitive());
    }

    #[test]
    fn gcd_with_monomials_and_constants() {
        let a = x(0).mul(&x(0)).mul(&x(1));
        let b = x(0).mul(&x(2)).add(&x(0).mul(&x(1)));
        assert_eq!(a.gcd(&b), x(0));
        assert_eq!(a.gcd(&Poly::from_int(3, 5)), Poly::one(3));
        assert_eq!(Poly::zero(3).gcd(&b.scale(&q(-2))), b.primitive());
    }

    #[test]
    fn gcd_coprime() {
        let a = x(0).add(&x(1));
        let b = x(0).sub(&x(1));
        assert!(a.gcd(&b).is_one());
    }

    #[test]
    fn render_grlex() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let p = x(0).mul(&x(1)).add(&x(2)).sub(&Poly::from_int(3, 2));
        assert_eq!(p.render(&names), "a*b + c - 2");
        let half = Poly::constant(3, BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(half.mul(&x(0).pow(2)).render(&names), "-1/2*a^2");
    }
}
