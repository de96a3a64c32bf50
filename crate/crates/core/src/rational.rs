//! Exact multivariate rational functions in canonical form.

use std::fmt;

use num::{BigInt, BigRational, Zero};

use crate::error::EdsError;
use crate::poly::Poly;

/// A quotient `num / den` of polynomials over ℚ.
///
/// Canonical form: `gcd(num, den) = 1` and `den` has lex-leading coefficient
/// one, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn zero(nvars: usize) -> Self {
        RationalFunction {
            num: Poly::zero(nvars),
            den: Poly::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Poly::one(nvars))
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::from_poly(Poly::from_int(nvars, c))
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::from_poly(Poly::constant(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_poly(Poly::var(nvars, i))
    }

    pub fn from_poly(p: Poly) -> Self {
        let nvars = p.nvars();
        RationalFunction {
            num: p,
            den: Poly::one(nvars),
        }
    }

    /// Build `num / den`, reducing to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self, EdsError> {
        if den.is_zero() {
            return Err(EdsError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        let nvars = num.nvars();
        if num.is_zero() {
            return Self::zero(nvars);
        }
        if den.is_constant() {
            let c = den.constant_value();
            return RationalFunction {
                num: num.scale(&c.recip()),
                den: Poly::one(nvars),
            };
        }
        let g = num.gcd(&den);
        let (n, d) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = d.lead_coeff().recip();
        RationalFunction {
            num: n.scale(&lc),
            den: d.scale(&lc),
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        self.is_constant().then(|| self.num.constant_value())
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.num.uses_var(v) || self.den.uses_var(v)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::normalize(self.num.add(&other.num), self.den.clone());
        }
        let n = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::normalize(n, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars());
        }
        if self.is_polynomial() && other.is_polynomial() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        Self::normalize(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self, EdsError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self, EdsError> {
        if other.is_zero() {
            return Err(EdsError::DivisionByZero);
        }
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, EdsError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RationalFunction {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Partial derivative by the quotient rule.
    pub fn derivative(&self, var: usize) -> Self {
        if self.is_polynomial() {
            let c = self.den.constant_value().recip();
            return Self::from_poly(self.num.derivative(var).scale(&c));
        }
        let n = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        Self::normalize(n, self.den.mul(&self.den))
    }

    /// Evaluate at an exact point; fails when the denominator vanishes there.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational, EdsError> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            return Err(EdsError::Pole);
        }
        Ok(self.num.evaluate(point) / d)
    }

    pub fn remap(&self, new_nvars: usize, map: &[usize]) -> Self {
        RationalFunction {
            num: self.num.remap(new_nvars, map),
            den: self.den.remap(new_nvars, map),
        }
    }

    pub fn extend(&self, extra: usize) -> Self {
        RationalFunction {
            num: self.num.extend(extra),
            den: self.den.extend(extra),
        }
    }

    /// Substitute each variable `i` by `values[i]`, all living in a common target ring.
    pub fn compose(&self, values: &[RationalFunction], target: usize) -> Result<Self, EdsError> {
        let n = compose_poly(&self.num, values, target);
        let d = compose_poly(&self.den, values, target);
        let d = d?;
        if d.is_zero() {
            return Err(EdsError::DivisionByZero);
        }
        n?.div(&d)
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_polynomial() {
            return self.num.render(names);
        }
        let mut n = self.num.render(names);
        if self.num.num_terms() > 1 {
            n = format!("({n})");
        }
        let mut d = self.den.render(names);
        if d.contains(' ') || d.contains('*') {
            d = format!("({d})");
        }
        format!("{n}/{d}")
    }
}

fn compose_poly(p: &Poly, values: &[RationalFunction], target: usize) -> Result<RationalFunction, EdsError> {
    let mut acc = RationalFunction::zero(target);
    for (m, c) in p.terms() {
        let mut t = RationalFunction::constant(target, c.clone());
        for (v, &e) in m.iter().enumerate() {
            if e > 0 {
                t = t.mul(&values[v].pow(e as i64)?);
            }
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars()).map(|i| format!("x{}", i + 1)).collect();
        f.write_str(&self.render(&names))
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
