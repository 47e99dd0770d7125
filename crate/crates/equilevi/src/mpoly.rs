//! Sparse Laurent polynomials in the three named variables (t, s, z).
//! Used to check one-parameter group laws symbolically: t and s are the two
//! group parameters, z the chart coordinate. Exponents may be negative.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::laurent::LaurentPoly;
use crate::scalar::Scalar;

pub const VAR_T: usize = 0;
pub const VAR_S: usize = 1;
pub const VAR_Z: usize = 2;

const VAR_NAMES: [&str; 3] = ["t", "s", "z"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MPoly {
    terms: BTreeMap<[i64; 3], Scalar>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::monomial([0, 0, 0], Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        MPoly::monomial([0, 0, 0], c)
    }

    pub fn var(v: usize) -> Self {
        let mut exps = [0i64; 3];
        exps[v] = 1;
        MPoly::monomial(exps, Scalar::one())
    }

    pub fn monomial(exps: [i64; 3], coeff: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        MPoly { terms }
    }

    /// Lift a Laurent polynomial in z.
    pub fn from_z_laurent(p: &LaurentPoly) -> Self {
        MPoly {
            terms: p.terms().map(|(e, c)| ([0, 0, e], c.clone())).collect(),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([i64; 3], Scalar)>) -> Self {
        let mut out = MPoly::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, exps: [i64; 3], coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(Scalar::zero);
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64; 3], &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(&e, c)| (e, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &other.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                out.add_term(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(&e, x)| (e, x.mul(c))).collect(),
        }
    }

    /// Substitute `var -> coeff * t^a s^b z^c`.
    pub fn monomial_subst(&self, var: usize, exps: [i64; 3], coeff: &Scalar) -> Result<MPoly, Error> {
        let mut out = MPoly::zero();
        for (&e, c) in &self.terms {
            let k = e[var];
            if coeff.is_zero() && k != 0 {
                if k < 0 {
                    return Err(Error::ZeroInput);
                }
                continue;
            }
            let factor = if k >= 0 {
                coeff.pow(k as u32)
            } else {
                coeff.inv()?.pow((-k) as u32)
            };
            let mut ne = e;
            ne[var] = 0;
            for (axis, item) in ne.iter_mut().enumerate() {
                *item += exps[axis] * k;
            }
            out.add_term(ne, c.mul(&factor));
        }
        Ok(out)
    }

    /// Substitute `var -> var + other_var`; needs nonnegative exponents in var.
    pub fn shift_subst(&self, var: usize, other_var: usize) -> Result<MPoly, Error> {
        let mut out = MPoly::zero();
        for (&e, c) in &self.terms {
            let k = e[var];
            if k < 0 {
                return Err(Error::InvalidAction(format!(
                    "additive substitution into {} with negative exponent",
                    VAR_NAMES[var]
                )));
            }
            // (x + y)^k by the binomial theorem
            let mut binom = Scalar::one();
            for j in 0..=k {
                let mut ne = e;
                ne[var] = k - j;
                ne[other_var] += j;
                out.add_term(ne, c.mul(&binom));
                // next binomial coefficient C(k, j+1)
                if j < k {
                    let num = Scalar::from_int(k - j);
                    let den = Scalar::from_int(j + 1);
                    binom = binom.mul(&num).div(&den).expect("nonzero index");
                }
            }
        }
        Ok(out)
    }

    /// Substitute a numeric value for a variable (must be nonzero when
    /// negative exponents of it occur).
    pub fn eval_var(&self, var: usize, x: &Scalar) -> Result<MPoly, Error> {
        let mut out = MPoly::zero();
        for (&e, c) in &self.terms {
            let k = e[var];
            let factor = if k >= 0 {
                x.pow(k as u32)
            } else {
                x.inv()?.pow((-k) as u32)
            };
            let mut ne = e;
            ne[var] = 0;
            out.add_term(ne, c.mul(&factor));
        }
        Ok(out)
    }

    /// Rename a variable (exponents transfer; target axis must be unused).
    pub fn rename_var(&self, from: usize, to: usize) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| {
                    assert!(from == to || e[to] == 0, "rename target in use");
                    let mut ne = e;
                    ne[to] = e[from];
                    if from != to {
                        ne[from] = 0;
                    }
                    (ne, c.clone())
                })
                .collect(),
        }
    }

    /// Group the terms by the exponent of one variable.
    pub fn coeffs_in(&self, var: usize) -> BTreeMap<i64, MPoly> {
        let mut out: BTreeMap<i64, MPoly> = BTreeMap::new();
        for (&e, c) in &self.terms {
            let k = e[var];
            let mut ne = e;
            ne[var] = 0;
            out.entry(k).or_default().add_term(ne, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Only the variable `var` occurs: extract it as a Laurent polynomial.
    pub fn as_laurent_in(&self, var: usize) -> Option<LaurentPoly> {
        let mut terms = vec![];
        for (&e, c) in &self.terms {
            for (axis, &exp) in e.iter().enumerate() {
                if axis != var && exp != 0 {
                    return None;
                }
            }
            terms.push((e[var], c.clone()));
        }
        Some(LaurentPoly::from_terms(terms))
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&[0, 0, 0]) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn to_string_repr(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = vec![];
        for (&e, c) in &self.terms {
            let mut term = format!("({})", c.to_string_repr());
            for (axis, &exp) in e.iter().enumerate() {
                match exp {
                    0 => {}
                    1 => term.push_str(&format!("*{}", VAR_NAMES[axis])),
                    _ => term.push_str(&format!("*{}^{}", VAR_NAMES[axis], exp)),
                }
            }
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// Square matrix of three-variable Laurent polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct MPolyMatrix {
    pub n: usize,
    pub entries: Vec<Vec<MPoly>>,
}

impl MPolyMatrix {
    pub fn new(entries: Vec<Vec<MPoly>>) -> Result<Self, Error> {
        let n = entries.len();
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch("matrix is not square".into()));
        }
        Ok(MPolyMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { MPoly::one() } else { MPoly::zero() })
                    .collect()
            })
            .collect();
        MPolyMatrix { n, entries }
    }

    pub fn mul(&self, other: &MPolyMatrix) -> MPolyMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = MPoly::zero();
                        for k in 0..n {
                            acc = acc.add(&self.entries[i][k].mul(&other.entries[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        MPolyMatrix { n, entries }
    }

    pub fn sub(&self, other: &MPolyMatrix) -> MPolyMatrix {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.sub(b)).collect())
            .collect();
        MPolyMatrix { n: self.n, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    pub fn map_entries(&self, f: impl Fn(&MPoly) -> Result<MPoly, Error>) -> Result<MPolyMatrix, Error> {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(&f).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MPolyMatrix { n: self.n, entries })
    }

    pub fn det(&self) -> MPoly {
        det_rec(&self.entries)
    }
}

fn det_rec(m: &[Vec<MPoly>]) -> MPoly {
    let n = m.len();
    match n {
        0 => MPoly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = MPoly::zero();
            for (j, pivot) in m[0].iter().enumerate() {
                if pivot.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MPoly>> = (1..n)
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

    fn t() -> MPoly {
        MPoly::var(VAR_T)
    }
    fn z() -> MPoly {
        MPoly::var(VAR_Z)
    }

    #[test]
    fn multiplicative_group_law() {
        // f(t, z) = t^2 z; substituting t -> t s should equal t^2 s^2 z
        let f = t().mul(&t()).mul(&z());
        let g = f
            .monomial_subst(VAR_T, [1, 1, 0], &Scalar::one())
            .unwrap();
        let expect = MPoly::monomial([2, 2, 1], Scalar::one());
        assert_eq!(g, expect);
    }

    #[test]
    fn additive_group_law() {
        // (t + s)^2 = t^2 + 2ts + s^2
        let f = t().mul(&t());
        let g = f.shift_subst(VAR_T, VAR_S).unwrap();
        let expect = MPoly::from_terms([
            ([2, 0, 0], Scalar::from_int(1)),
            ([1, 1, 0], Scalar::from_int(2)),
            ([0, 2, 0], Scalar::from_int(1)),
        ]);
        assert_eq!(g, expect);
    }

    #[test]
    fn negative_exponent_substitution() {
        // t^-1, substitute t -> 2: 1/2
        let f = MPoly::monomial([-1, 0, 0], Scalar::one());
        let g = f.eval_var(VAR_T, &Scalar::from_int(2)).unwrap();
        assert_eq!(
            g.as_constant().unwrap(),
            Scalar::from_rat(crate::scalar::rat(1, 2))
        );
        // substitute t -> 0 in t^-1 fails
        assert!(f.eval_var(VAR_T, &Scalar::zero()).is_err());
    }

    #[test]
    fn coefficient_extraction() {
        // t z + 2 t^2 + 3
        let f = MPoly::from_terms([
            ([1, 0, 1], Scalar::from_int(1)),
            ([2, 0, 0], Scalar::from_int(2)),
            ([0, 0, 0], Scalar::from_int(3)),
        ]);
        let by_t = f.coeffs_in(VAR_T);
        assert_eq!(by_t.len(), 3);
        assert_eq!(by_t[&1], z());
        assert_eq!(by_t[&2].as_constant().unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn z_to_scaled_z() {
        // z^2 with z -> s^3 z gives s^6 z^2
        let f = z().mul(&z());
        let g = f
            .monomial_subst(VAR_Z, [0, 3, 1], &Scalar::one())
            .unwrap();
        assert_eq!(g, MPoly::monomial([0, 6, 2], Scalar::one()));
    }
}
