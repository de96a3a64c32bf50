//! Linear algebra over ℚ and over the rational-function field.

use num::{BigRational, One, Zero};

use crate::error::EdsError;
use crate::exterior::Form;
use crate::poly::Poly;
use crate::rational::RationalFunction;

/// Field operations needed by elimination.
pub trait FieldElem: Clone {
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, other: &Self) -> Self;
    fn sub_elem(&self, other: &Self) -> Self;
    fn mul_elem(&self, other: &Self) -> Self;
    fn div_elem(&self, other: &Self) -> Self;
    fn neg_elem(&self) -> Self;
}

impl FieldElem for BigRational {
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_elem(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self * other
    }
    fn div_elem(&self, other: &Self) -> Self {
        self / other
    }
    fn neg_elem(&self) -> Self {
        -self.clone()
    }
}

impl FieldElem for RationalFunction {
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_elem(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn div_elem(&self, other: &Self) -> Self {
        self.div(other).expect("pivot is nonzero")
    }
    fn neg_elem(&self) -> Self {
        self.neg()
    }
}

/// Reduced row echelon form: the nonzero rows plus their pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<T> {
    pub rows: Vec<Vec<T>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl<T: FieldElem> Rref<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Basis of the right kernel, one vector per free column (that entry set to one).
    pub fn kernel(&self, zero: &T, one: &T) -> Vec<Vec<T>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![zero.clone(); self.ncols];
                v[f] = one.clone();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = row[f].neg_elem();
                }
                v
            })
            .collect()
    }
}

/// Gauss-Jordan elimination; pivot = first column with a nonzero entry, first such row.
#[allow(clippy::needless_range_loop)]
pub fn rref<T: FieldElem>(mut m: Vec<Vec<T>>, ncols: usize) -> Rref<T> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero_elem()) else {
            continue;
        };
        m.swap(r, p);
        let inv_piv = m[r][c].clone();
        let row: Vec<T> = m[r]
            .iter()
            .map(|x| {
                if x.is_zero_elem() {
                    x.clone()
                } else {
                    x.div_elem(&inv_piv)
                }
            })
            .collect();
        m[r] = row;
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero_elem() {
                continue;
            }
            let f = m[i][c].clone();
            for k in c..ncols {
                if m[r][k].is_zero_elem() {
                    continue;
                }
                let t = f.mul_elem(&m[r][k]);
                m[i][k] = m[i][k].sub_elem(&t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Rref { rows: m, pivots, ncols }
}

pub fn rank<T: FieldElem>(m: Vec<Vec<T>>, ncols: usize) -> usize {
    rref(m, ncols).rank()
}

/// Right-kernel basis of `m` over ℚ.
pub fn kernel_q(m: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    rref(m, ncols).kernel(&BigRational::zero(), &BigRational::one())
}

/// Right-kernel basis over the function field.
pub fn kernel_rf(m: Vec<Vec<RationalFunction>>, ncols: usize, nvars: usize) -> Vec<Vec<RationalFunction>> {
    rref(m, ncols).kernel(&RationalFunction::zero(nvars), &RationalFunction::one(nvars))
}

/// Whether `v` lies in the row span of an RREF.
pub fn in_span_q(r: &Rref<BigRational>, v: &[BigRational]) -> bool {
    let mut rows = r.rows.clone();
    rows.push(v.to_vec());
    rank(rows, r.ncols) == r.rank()
}

/// Multiply a vector of rational functions by the lcm of its denominators and
/// divide by the gcd of the resulting numerators.
pub fn clear_denominators(v: &[RationalFunction]) -> Vec<RationalFunction> {
    let Some(first) = v.iter().find(|c| !c.is_zero()) else {
        return v.to_vec();
    };
    let nvars = first.nvars();
    let mut l = Poly::one(nvars);
    for c in v.iter().filter(|c| !c.is_zero()) {
        l = l.lcm(c.denom());
    }
    let lr = RationalFunction::from_poly(l);
    let scaled: Vec<RationalFunction> = v.iter().map(|c| c.mul(&lr)).collect();
    let mut g = Poly::zero(nvars);
    for c in scaled.iter().filter(|c| !c.is_zero()) {
        g = g.gcd(c.numer());
    }
    let mut gr = RationalFunction::from_poly(g);
    // Make the first nonzero entry have positive lex-leading coefficient.
    let lead = scaled.iter().find(|c| !c.is_zero()).unwrap();
    if lead.numer().lead_coeff() < BigRational::zero() {
        gr = gr.neg();
    }
    scaled.iter().map(|c| c.div(&gr).expect("gcd nonzero")).collect()
}

/// Coefficient matrix of 1-forms (rows) along `dx_0 … dx_{n-1}`.
pub fn one_form_matrix(rows: &[Form]) -> Vec<Vec<RationalFunction>> {
    rows.iter().map(|f| f.components()).collect()
}

/// Coefficient matrix of equal-degree forms; columns are the multi-index masks.
pub fn form_matrix(rows: &[Form]) -> (Vec<u64>, Vec<Vec<RationalFunction>>) {
    let mut cols: Vec<u64> = rows.iter().flat_map(|f| f.terms().map(|(m, _)| m)).collect();
    cols.sort_unstable();
    cols.dedup();
    let m = rows
        .iter()
        .map(|f| cols.iter().map(|&c| f.coefficient(c)).collect())
        .collect();
    (cols, m)
}

/// Generic rank with its fraction-free elimination certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    /// Multi-index masks of the pivot columns, in elimination order.
    pub pivot_columns: Vec<u64>,
    /// Original row index chosen at each step.
    pub pivot_rows: Vec<usize>,
    /// Successive pivots of the Bareiss elimination; the last is a maximal
    /// nonvanishing minor, and all are nonzero polynomials.
    pub pivot_minors: Vec<Poly>,
}

impl RankCertificate {
    /// True when every pivot minor is nonzero at the point.
    pub fn regular_at(&self, point: &[BigRational]) -> bool {
        self.pivot_minors.iter().all(|m| !m.evaluate(point).is_zero())
    }
}

/// Fraction-free (Bareiss) elimination of equal-degree forms.
pub fn generic_rank(rows: &[Form]) -> Result<RankCertificate, EdsError> {
    if let Some(first) = rows.first() {
        for r in rows {
            if r.chart() != first.chart() {
                return Err(EdsError::ChartMismatch);
            }
            if r.degree() != first.degree() {
                return Err(EdsError::DegreeMismatch {
                    expected: first.degree(),
                    found: r.degree(),
                });
            }
        }
    }
    let (cols, m) = form_matrix(rows);
    let nvars = rows.first().map(|f| f.chart().dim()).unwrap_or(1);
    Ok(bareiss(&m, &cols, nvars))
}

/// Bareiss elimination on a rational-function matrix with denominators cleared row-wise.
#[allow(clippy::needless_range_loop)]
pub fn bareiss(m: &[Vec<RationalFunction>], cols: &[u64], nvars: usize) -> RankCertificate {
    let ncols = cols.len();
    let mut a: Vec<Vec<Poly>> = m
        .iter()
        .map(|row| {
            let mut l = Poly::one(nvars);
            for c in row.iter().filter(|c| !c.is_zero()) {
                l = l.lcm(c.denom());
            }
            row.iter()
                .map(|c| c.numer().mul(&l.div_exact(c.denom()).expect("lcm is a multiple")))
                .collect()
        })
        .collect();
    let mut row_ids: Vec<usize> = (0..a.len()).collect();
    let mut prev = Poly::one(nvars);
    let mut cert = RankCertificate {
        rank: 0,
        pivot_columns: vec![],
        pivot_rows: vec![],
        pivot_minors: vec![],
    };
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        row_ids.swap(r, p);
        let piv = a[r][c].clone();
        for i in r + 1..a.len() {
            let aic = a[i][c].clone();
            for k in c..ncols {
                let t = piv.mul(&a[i][k]).sub(&aic.mul(&a[r][k]));
                a[i][k] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        cert.pivot_columns.push(cols[c]);
        cert.pivot_rows.push(row_ids[r]);
        cert.pivot_minors.push(piv.clone());
        prev = piv;
        r += 1;
    }
    cert.rank = r;
    cert
}

/// Rank over ℚ of forms with constant coefficients.
pub fn constant_rank(rows: &[Form]) -> usize {
    let (cols, m) = form_matrix(rows);
    let q: Vec<Vec<BigRational>> = m
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|c| c.constant_value().expect("constant coefficient"))
                .collect()
        })
        .collect();
    rank(q, cols.len())
}

/// Indices of a maximal generically independent subfamily, chosen greedily in order.
pub fn independent_subset(rows: &[Form]) -> Vec<usize> {
    let mut keep: Vec<usize> = Vec::new();
    let mut current: Vec<Form> = Vec::new();
    let mut rank_now = 0;
    for (i, f) in rows.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        current.push(f.clone());
        let (cols, m) = form_matrix(&current);
        let r = rank(m, cols.len());
        if r > rank_now {
            rank_now = r;
            keep.push(i);
        } else {
            current.pop();
        }
    }
    keep
}

/// Evaluate a 1-form matrix at exact coordinates.
pub fn evaluate_matrix(m: &[Vec<RationalFunction>], point: &[BigRational]) -> Result<Vec<Vec<BigRational>>, EdsError> {
    m.iter()
        .map(|row| row.iter().map(|c| c.evaluate(point)).collect())
        .collect()
}

/// Basis of the pointwise annihilator `{v : <v, w_p> = 0}` of 1-forms.
pub fn kernel_at_point(rows: &[Form], p: &crate::exterior::PointAssignment) -> Result<Vec<Vec<BigRational>>, EdsError> {
    let n = p.chart().dim();
    for r in rows {
        if r.chart() != p.chart() {
            return Err(EdsError::ChartMismatch);
        }
        if r.degree() != 1 {
            return Err(EdsError::DegreeMismatch {
                expected: 1,
                found: r.degree(),
            });
        }
    }
    let m = evaluate_matrix(&one_form_matrix(rows), p.values())?;
    Ok(kernel_q(m, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{Chart, PointAssignment, VectorField};
    use crate::rational::int;

    #[test]
    fn generic_rank_examples() {
        let c = Chart::standard(5);
        let dx = |i| Form::dx(&c, i);
        assert_eq!(generic_rank(&[dx(0), dx(1), dx(2)]).unwrap().rank, 3);
        let x1 = c.coordinate(0);
        assert_eq!(generic_rank(&[dx(0), dx(0).scale(&x1)]).unwrap().rank, 1);
        let w1 = dx(0).add(&dx(4).scale(&c.coordinate(3))).unwrap();
        let cert = generic_rank(&[w1, dx(1), dx(2), dx(3), dx(4)]).unwrap();
        assert_eq!(cert.rank, 5);
        assert_eq!(cert.pivot_minors.len(), 5);
    }

    #[test]
    fn pivot_minor_locates_singularity() {
        let c = Chart::standard(2);
        let x1 = c.coordinate(0);
        let cert = generic_rank(&[Form::dx(&c, 0).scale(&x1)]).unwrap();
        assert_eq!(cert.rank, 1);
        assert!(!cert.regular_at(&[int(0), int(1)]));
        assert!(cert.regular_at(&[int(3), int(1)]));
    }

    #[test]
    fn kernel_at_point_examples() {
        let c = Chart::standard(5);
        let dx = |i| Form::dx(&c, i);
        let o = PointAssignment::origin(&c);
        assert_eq!(kernel_at_point(&[dx(1), dx(2)], &o).unwrap().len(), 3);
        assert_eq!(kernel_at_point(&[], &o).unwrap().len(), 5);
        let w1 = dx(0).add(&dx(4).scale(&c.coordinate(3))).unwrap();
        let k = kernel_at_point(&[w1.clone(), dx(1), dx(2)], &o).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            let vf = VectorField::from_constants(&c, v);
            assert!(w1.evaluate(&o).unwrap().pair(&vf).unwrap().is_zero());
            assert!(v[1].is_zero() && v[2].is_zero() && v[0].is_zero());
        }
    }

    #[test]
    fn clear_denominators_makes_primitive() {
        let c = Chart::standard(2);
        let x = c.coordinate(0);
        let v = vec![c.one_fn().div(&x).unwrap(), c.constant(int(2))];
        let w = clear_denominators(&v);
        assert_eq!(w[0], c.one_fn());
        assert_eq!(w[1], x.scale(&int(2)));
    }
}
