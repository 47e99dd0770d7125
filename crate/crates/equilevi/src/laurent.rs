//! Laurent polynomials in one variable, and square matrices of them. These
//! are the natural home for transition matrices on the two-chart cover of the
//! line: the substitution z -> 1/z stays inside the ring and invertibility is
//! the statement det = c * z^k.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::linalg::Mat;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Sparse Laurent polynomial: exponent -> nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Scalar>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, Scalar::one())
    }

    pub fn monomial(exp: i64, coeff: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn from_poly(p: &Poly) -> Self {
        let mut terms = BTreeMap::new();
        for (i, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                terms.insert(i as i64, c.clone());
            }
        }
        LaurentPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut out = LaurentPoly::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, exp: i64, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Scalar::zero);
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> Scalar {
        self.terms.get(&exp).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest exponent with nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Largest exponent with nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// True when this is c * z^k for a single k (and nonzero c).
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (e, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, x)| (e, x.mul(c))).collect(),
        }
    }

    pub fn shift(&self, by: i64) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (e + by, c.clone())).collect(),
        }
    }

    /// Exact division; errors when the quotient is not a Laurent polynomial.
    pub fn div_exact(&self, other: &LaurentPoly) -> Result<LaurentPoly, Error> {
        if other.is_zero() {
            return Err(Error::ZeroInput);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero());
        }
        // shift both to ordinary polynomials and divide there
        let sa = self.min_exp().unwrap();
        let sb = other.min_exp().unwrap();
        let pa = self.shift(-sa).to_poly().expect("shifted to nonneg exponents");
        let pb = other.shift(-sb).to_poly().expect("shifted to nonneg exponents");
        let (q, r) = pa.divrem(&pb)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact Laurent division".into()));
        }
        Ok(LaurentPoly::from_poly(&q).shift(sa - sb))
    }

    /// As an ordinary polynomial, when no negative exponents occur.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.min_exp().map_or(false, |e| e < 0) {
            return None;
        }
        let deg = self.max_exp().unwrap_or(0).max(0) as usize;
        let mut coeffs = vec![Scalar::zero(); deg + 1];
        for (&e, c) in &self.terms {
            coeffs[e as usize] = c.clone();
        }
        Some(Poly::from_coeffs(coeffs))
    }

    /// Substitute z -> 1/z (negate every exponent).
    pub fn invert_var(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Evaluate at a nonzero point.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar, Error> {
        let mut acc = Scalar::zero();
        let x_inv = if self.min_exp().map_or(false, |e| e < 0) {
            Some(x.inv()?)
        } else {
            None
        };
        for (&e, c) in &self.terms {
            let p = if e >= 0 {
                x.pow(e as u32)
            } else {
                x_inv.as_ref().unwrap().pow((-e) as u32)
            };
            acc = acc.add(&c.mul(&p));
        }
        Ok(acc)
    }

    pub fn to_string_repr(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = vec![];
        for (&e, c) in &self.terms {
            let cs = c.to_string_repr();
            let term = match e {
                0 => cs,
                1 => format!("({cs})*{var}"),
                _ => format!("({cs})*{var}^{e}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// Square matrix of Laurent polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMatrix {
    pub n: usize,
    pub entries: Vec<Vec<LaurentPoly>>,
}

impl LaurentMatrix {
    pub fn new(entries: Vec<Vec<LaurentPoly>>) -> Result<Self, Error> {
        let n = entries.len();
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch("matrix is not square".into()));
        }
        Ok(LaurentMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { LaurentPoly::one() } else { LaurentPoly::zero() })
                    .collect()
            })
            .collect();
        LaurentMatrix { n, entries }
    }

    /// diag(z^{a_1}, ..., z^{a_n}).
    pub fn diag_powers(exps: &[i64]) -> Self {
        let n = exps.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            LaurentPoly::monomial(exps[i], Scalar::one())
                        } else {
                            LaurentPoly::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        LaurentMatrix { n, entries }
    }

    pub fn from_scalar_mat(m: &Mat) -> Self {
        let n = m.len();
        let entries = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| LaurentPoly::monomial(0, c.clone()))
                    .collect()
            })
            .collect();
        LaurentMatrix { n, entries }
    }

    pub fn mul(&self, other: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.n, other.n, "matrix product shape mismatch");
        let n = self.n;
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = LaurentPoly::zero();
                        for k in 0..n {
                            acc = acc.add(&self.entries[i][k].mul(&other.entries[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        LaurentMatrix { n, entries }
    }

    pub fn add(&self, other: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.add(b)).collect())
            .collect();
        LaurentMatrix { n: self.n, entries }
    }

    pub fn sub(&self, other: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.sub(b)).collect())
            .collect();
        LaurentMatrix { n: self.n, entries }
    }

    pub fn scale(&self, c: &Scalar) -> LaurentMatrix {
        LaurentMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.scale(c)).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    pub fn det(&self) -> LaurentPoly {
        det_rec(&self.entries)
    }

    /// det must be a unit c * z^k; returns (c, k) or an error.
    pub fn unit_det(&self) -> Result<(Scalar, i64), Error> {
        let d = self.det();
        if !d.is_unit() {
            return Err(Error::NotABundle(format!(
                "determinant {} is not a unit",
                d.to_string_repr("z")
            )));
        }
        let (e, c) = d.terms().next().map(|(e, c)| (e, c.clone())).unwrap();
        Ok((c, e))
    }

    /// Inverse over Laurent polynomials; requires a unit determinant.
    pub fn inverse(&self) -> Result<LaurentMatrix, Error> {
        let (c, k) = self.unit_det()?;
        let det_inv = LaurentPoly::monomial(-k, c.inv()?);
        let n = self.n;
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let minor: Vec<Vec<LaurentPoly>> = (0..n)
                            .filter(|&r| r != j)
                            .map(|r| {
                                (0..n)
                                    .filter(|&col| col != i)
                                    .map(|col| self.entries[r][col].clone())
                                    .collect()
                            })
                            .collect();
                        let mut cof = det_rec(&minor);
                        if (i + j) % 2 == 1 {
                            cof = cof.neg();
                        }
                        cof.mul(&det_inv)
                    })
                    .collect()
            })
            .collect();
        Ok(LaurentMatrix { n, entries })
    }

    /// Substitute z -> 1/z in every entry.
    pub fn invert_var(&self) -> LaurentMatrix {
        LaurentMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.invert_var()).collect())
                .collect(),
        }
    }

    /// Evaluate at a nonzero point.
    pub fn eval(&self, x: &Scalar) -> Result<Mat, Error> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.eval(x)).collect())
            .collect()
    }

    /// Largest exponent appearing in any entry (None for the zero matrix).
    pub fn max_exp(&self) -> Option<i64> {
        self.entries.iter().flatten().filter_map(|e| e.max_exp()).max()
    }

    /// Smallest exponent appearing in any entry.
    pub fn min_exp(&self) -> Option<i64> {
        self.entries.iter().flatten().filter_map(|e| e.min_exp()).min()
    }
}

fn det_rec(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    match n {
        0 => LaurentPoly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = LaurentPoly::zero();
            for (j, pivot) in m[0].iter().enumerate() {
                if pivot.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<LaurentPoly>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| m[i][c].clone())
                            .collect()
                    })
                    .collect();
                let term = pivot.mul(&det_rec(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|&(e, c)| (e, Scalar::from_int(c))))
    }

    #[test]
    fn arithmetic_with_negative_exponents() {
        let a = lp(&[(-1, 1), (1, 1)]); // z^-1 + z
        let b = lp(&[(1, 1)]); // z
        assert_eq!(a.mul(&b), lp(&[(0, 1), (2, 1)]));
        assert_eq!(a.invert_var(), a);
        let x = Scalar::from_int(2);
        // 1/2 + 2 = 5/2
        let v = a.eval(&x).unwrap();
        assert_eq!(v, Scalar::from_rat(crate::scalar::rat(5, 2)));
    }

    #[test]
    fn division_exact_and_inexact() {
        let a = lp(&[(-1, 1), (1, 1)]); // z^-1(1 + z^2)
        let b = lp(&[(-1, 1)]);
        assert_eq!(a.div_exact(&b).unwrap(), lp(&[(0, 1), (2, 1)]));
        let c = lp(&[(0, 1), (1, 1)]); // 1 + z
        assert!(a.div_exact(&c).is_err());
    }

    #[test]
    fn unit_determinant_and_inverse() {
        // [[z, 1], [0, z^-1]] has det 1
        let m = LaurentMatrix::new(vec![
            vec![lp(&[(1, 1)]), lp(&[(0, 1)])],
            vec![LaurentPoly::zero(), lp(&[(-1, 1)])],
        ])
        .unwrap();
        let (c, k) = m.unit_det().unwrap();
        assert!(c.is_one());
        assert_eq!(k, 0);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), LaurentMatrix::identity(2));
    }

    #[test]
    fn non_unit_determinant_rejected() {
        // [[z, 0], [0, z + 1]] has det z^2 + z, not a unit
        let m = LaurentMatrix::new(vec![
            vec![lp(&[(1, 1)]), LaurentPoly::zero()],
            vec![LaurentPoly::zero(), lp(&[(0, 1), (1, 1)])],
        ])
        .unwrap();
        assert!(m.unit_det().is_err());
    }

    #[test]
    fn diag_powers_round_trip() {
        let d = LaurentMatrix::diag_powers(&[2, -1]);
        let inv = d.inverse().unwrap();
        assert_eq!(inv, LaurentMatrix::diag_powers(&[-2, 1]));
    }
}
