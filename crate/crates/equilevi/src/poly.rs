//! Dense univariate polynomials over cyclotomic scalars, with squarefree
//! decomposition (Yun) and root splitting by bounded candidate search.

use std::fmt;

use crate::error::Error;
use crate::scalar::{euler_phi, Rat, Scalar};
use num::bigint::BigInt;
use num::{One, Signed, Zero};

/// Coefficients in ascending degree, trailing zeros trimmed; zero = empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Poly { coeffs: vec![c] }.trimmed()
    }

    pub fn x() -> Self {
        Poly { coeffs: vec![Scalar::zero(), Scalar::one()] }
    }

    /// Monic linear factor x - r.
    pub fn linear(r: &Scalar) -> Self {
        Poly { coeffs: vec![r.neg(), Scalar::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<Scalar>) -> Self {
        Poly { coeffs }.trimmed()
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly { coeffs: out }.trimmed()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly { coeffs: out }.trimmed()
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }.trimmed()
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn divrem(&self, other: &Poly) -> Result<(Poly, Poly), Error> {
        if other.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut rem = self.clone();
        let db = other.degree().unwrap();
        let lead_inv = other.leading().unwrap().inv()?;
        let mut quot = vec![
            Scalar::zero();
            self.coeffs.len().saturating_sub(other.coeffs.len()) + 1
        ];
        while let Some(dr) = rem.degree() {
            if dr < db {
                break;
            }
            let c = rem.leading().unwrap().mul(&lead_inv);
            quot[dr - db] = c.clone();
            let mut sub = vec![Scalar::zero(); dr - db];
            sub.push(c);
            rem = rem.sub(&other.mul(&Poly { coeffs: sub }));
        }
        Ok((Poly { coeffs: quot }.trimmed(), rem))
    }

    pub fn div_exact(&self, other: &Poly) -> Result<Poly, Error> {
        let (q, r) = self.divrem(other)?;
        if !r.is_zero() {
            return Err(Error::Internal("division was not exact".into()));
        }
        Ok(q)
    }

    pub fn monic(&self) -> Result<Poly, Error> {
        let lead = self.leading().ok_or(Error::ZeroInput)?;
        Ok(self.scale(&lead.inv()?))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, Error> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(Poly::zero())
        } else {
            a.monic()
        }
    }

    /// Extended gcd: returns (g, u, v) with u*self + v*other = g, g monic.
    pub fn ext_gcd(&self, other: &Poly) -> Result<(Poly, Poly, Poly), Error> {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut u0 = Poly::one();
        let mut u1 = Poly::zero();
        let mut v0 = Poly::zero();
        let mut v1 = Poly::one();
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let u2 = u0.sub(&q.mul(&u1));
            let v2 = v0.sub(&q.mul(&v1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = u2;
            v0 = v1;
            v1 = v2;
        }
        if r0.is_zero() {
            return Ok((Poly::zero(), Poly::zero(), Poly::zero()));
        }
        let c = r0.leading().unwrap().inv()?;
        Ok((r0.scale(&c), u0.scale(&c), v0.scale(&c)))
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&Scalar::from_int(i as i64)))
            .collect();
        Poly { coeffs }.trimmed()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// All coefficients rational?
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_rational())
    }

    pub fn to_string_repr(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string_repr();
            let term = match i {
                0 => cs,
                1 if c.is_one() => var.to_string(),
                1 => format!("({cs})*{var}"),
                _ if c.is_one() => format!("{var}^{i}"),
                _ => format!("({cs})*{var}^{i}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_repr("t"))
    }
}

// ---------------------------------------------------------------------------
// squarefree decomposition (Yun)

/// Decomposes a nonzero polynomial into pairwise-coprime squarefree factors
/// with multiplicities; the product of factor^multiplicity recovers the input
/// up to its leading coefficient. Factors are monic.
pub fn squarefree_split(p: &Poly) -> Result<Vec<(Poly, usize)>, Error> {
    if p.is_zero() {
        return Err(Error::ZeroInput);
    }
    let f = p.monic()?;
    if f.degree() == Some(0) {
        return Ok(vec![]);
    }
    let df = f.derivative();
    let mut out = vec![];
    let g = f.gcd(&df)?;
    let mut w = f.div_exact(&g)?;
    let mut y = df.div_exact(&g)?;
    let mut i = 1usize;
    loop {
        let z = y.sub(&w.derivative());
        if z.is_zero() {
            if w.degree() != Some(0) {
                out.push((w.monic()?, i));
            }
            break;
        }
        let fac = w.gcd(&z)?;
        if fac.degree() != Some(0) {
            out.push((fac.clone(), i));
        }
        w = w.div_exact(&fac)?;
        y = z.div_exact(&fac)?;
        i += 1;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// bounded root search

/// Search limits for exact root splitting.
#[derive(Debug, Clone, Copy)]
pub struct SplitBudget {
    /// Bound on numerator/denominator magnitude of the rational multiplier in
    /// cyclotomic candidates q * zeta_m^j.
    pub height: u32,
    /// Largest conductor m scanned for roots of unity.
    pub conductor_max: u32,
}

impl Default for SplitBudget {
    fn default() -> Self {
        SplitBudget { height: 6, conductor_max: 24 }
    }
}

/// Outcome of `split_roots`: exact roots with multiplicities plus monic
/// factors on which the bounded search found nothing.
#[derive(Debug, Clone)]
pub struct RootSplit {
    pub roots: Vec<(Scalar, usize)>,
    pub unsplit: Vec<Poly>,
}

impl RootSplit {
    pub fn fully_split(&self) -> bool {
        self.unsplit.is_empty()
    }

    /// Re-expands roots and unsplit factors; must reproduce the monic input.
    pub fn expand(&self) -> Poly {
        let mut p = Poly::one();
        for (r, m) in &self.roots {
            p = p.mul(&Poly::linear(r).pow(*m));
        }
        for u in &self.unsplit {
            p = p.mul(u);
        }
        p
    }
}

/// Splits off all roots of a monic polynomial that lie in the bounded
/// candidate family: rationals (complete, by the rational root theorem) and
/// rational multiples of roots of unity up to the conductor bound. Unsplit
/// factors are a legal outcome, not an error.
pub fn split_roots(p: &Poly, budget: SplitBudget) -> Result<RootSplit, Error> {
    if p.is_zero() {
        return Err(Error::ZeroInput);
    }
    let parts = squarefree_split(p)?;
    let mut roots: Vec<(Scalar, usize)> = vec![];
    let mut unsplit = vec![];
    for (factor, mult) in parts {
        let mut rem = factor;
        // rational roots, complete
        loop {
            if rem.degree() == Some(0) {
                break;
            }
            match find_rational_root(&rem) {
                Some(r) => {
                    rem = rem.div_exact(&Poly::linear(&r))?;
                    roots.push((r, mult));
                }
                None => break,
            }
        }
        // rational multiples of roots of unity
        'scan: loop {
            if rem.degree() == Some(0) {
                break;
            }
            for m in 3..=budget.conductor_max {
                for j in 1..m {
                    if num::integer::gcd(j, m) != 1 {
                        continue;
                    }
                    let z = Scalar::zeta(m).pow(j);
                    for q in rational_candidates(budget.height) {
                        let cand = Scalar::from_rat(q).mul(&z);
                        if rem.eval(&cand).is_zero() {
                            rem = rem.div_exact(&Poly::linear(&cand))?;
                            roots.push((cand, mult));
                            continue 'scan;
                        }
                    }
                }
            }
            break;
        }
        if rem.degree().map_or(false, |d| d >= 1) {
            unsplit.push(rem.monic()?);
        }
    }
    roots.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));
    Ok(RootSplit { roots, unsplit })
}

fn rational_candidates(height: u32) -> Vec<Rat> {
    let mut out = vec![];
    for den in 1..=height as i64 {
        for num in 1..=height as i64 {
            if num::integer::gcd(num, den) != 1 {
                continue;
            }
            out.push(Rat::new(BigInt::from(num), BigInt::from(den)));
            out.push(Rat::new(BigInt::from(-num), BigInt::from(den)));
        }
    }
    out
}

/// One rational root of a polynomial with rational coefficients, if any.
/// Complete: clears denominators and enumerates divisors per the rational
/// root theorem. Returns None when coefficients are not all rational.
fn find_rational_root(p: &Poly) -> Option<Scalar> {
    if !p.is_rational() || p.is_zero() {
        return None;
    }
    let rats: Vec<Rat> = p.coeffs().iter().map(|c| c.as_rational().unwrap()).collect();
    // common denominator
    let mut denom = BigInt::one();
    for c in &rats {
        denom = num::integer::lcm(denom, c.denom().clone());
    }
    let ints: Vec<BigInt> = rats.iter().map(|c| (c * Rat::from(denom.clone())).to_integer()).collect();
    if Scalar::zero() == p.eval(&Scalar::zero()) {
        return Some(Scalar::zero());
    }
    // strip zero constant coefficient handled above; here constant != 0
    let lead = ints.last().unwrap().clone();
    let cons = ints[0].clone();
    let lead_divs = small_divisors(&lead);
    let cons_divs = small_divisors(&cons);
    for a in &cons_divs {
        for b in &lead_divs {
            if num::integer::gcd(a.clone(), b.clone()) != BigInt::one() {
                continue;
            }
            for sign in [1i64, -1] {
                let cand = Scalar::from_rat(Rat::new(a * BigInt::from(sign), b.clone()));
                if p.eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Positive divisors; falls back to trial division, fine at desk scale.
fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = vec![];
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
        // guard: divisor scan on huge numbers is out of scope
        if out.len() > 4096 {
            break;
        }
    }
    out.sort();
    out
}

/// Convenience: conductor needed to see every root that appeared; used when
/// reporting which field a decomposition lives in.
pub fn conductor_of_roots(roots: &[(Scalar, usize)]) -> u32 {
    roots
        .iter()
        .map(|(r, _)| r.conductor())
        .fold(1, num::integer::lcm)
}

/// Degree check helper used by property tests.
pub fn degree_is_additive(p: &Poly, q: &Poly) -> bool {
    match (p.degree(), q.degree()) {
        (Some(a), Some(b)) => p.mul(q).degree() == Some(a + b),
        _ => p.mul(q).is_zero(),
    }
}

pub fn phi_degree(m: u32) -> usize {
    euler_phi(m) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_ints(coeffs)
    }

    #[test]
    fn squarefree_examples() {
        // t^2 - 2t + 1 = (t-1)^2
        let out = squarefree_split(&p(&[1, -2, 1])).unwrap();
        assert_eq!(out, vec![(p(&[-1, 1]), 2)]);
        // t^2 - 1 already squarefree
        let out = squarefree_split(&p(&[-1, 0, 1])).unwrap();
        assert_eq!(out, vec![(p(&[-1, 0, 1]), 1)]);
        // t^3 - t^2 = t^2 (t-1); verify by expanding the product
        let out = squarefree_split(&p(&[0, 0, -1, 1])).unwrap();
        let mut expansion = Poly::one();
        for (f, m) in &out {
            expansion = expansion.mul(&f.pow(*m));
        }
        assert_eq!(expansion, p(&[0, 0, -1, 1]));
        assert_eq!(out.len(), 2);
        assert!(out.contains(&(p(&[0, 1]), 2)));
        assert!(out.contains(&(p(&[-1, 1]), 1)));
    }

    #[test]
    fn squarefree_zero_rejected() {
        assert!(matches!(squarefree_split(&Poly::zero()), Err(Error::ZeroInput)));
    }

    #[test]
    fn split_roots_examples() {
        let b4 = SplitBudget { height: 6, conductor_max: 4 };
        // t^2 - 1 -> {1, -1}
        let out = split_roots(&p(&[-1, 0, 1]), b4).unwrap();
        assert!(out.fully_split());
        let roots: Vec<Scalar> = out.roots.iter().map(|(r, _)| r.clone()).collect();
        assert!(roots.contains(&Scalar::from_int(1)));
        assert!(roots.contains(&Scalar::from_int(-1)));
        // t^2 + 1 with conductor bound >= 4 -> {zeta_4, -zeta_4}
        let out = split_roots(&p(&[1, 0, 1]), b4).unwrap();
        assert!(out.fully_split());
        let z4 = Scalar::zeta(4);
        let roots: Vec<Scalar> = out.roots.iter().map(|(r, _)| r.clone()).collect();
        assert!(roots.contains(&z4));
        assert!(roots.contains(&z4.neg()));
        // t^2 - 2 with conductor bound 4 -> unsplit
        let out = split_roots(&p(&[-2, 0, 1]), b4).unwrap();
        assert!(out.roots.is_empty());
        assert_eq!(out.unsplit, vec![p(&[-2, 0, 1])]);
    }

    #[test]
    fn split_roots_reexpansion_exact() {
        let cases = [
            p(&[-6, 11, -6, 1]),        // (t-1)(t-2)(t-3)
            p(&[0, 0, -1, 1]),          // t^2 (t-1)
            p(&[1, 0, 1]),              // t^2 + 1
            p(&[-2, 0, 1]),             // t^2 - 2, stays unsplit
            p(&[2, -5, 4, -1]).neg(),   // -(...) non-monic input
            p(&[-4, 0, 0, 0, 1]),       // t^4 - 4 = (t^2-2)(t^2+2)
        ];
        for c in cases {
            let out = split_roots(&c, SplitBudget::default()).unwrap();
            assert_eq!(out.expand(), c.monic().unwrap(), "re-expansion failed for {c}");
        }
    }

    #[test]
    fn rational_roots_with_denominators() {
        // (2t - 1)(t + 3) = 2t^2 + 5t - 3
        let out = split_roots(&p(&[-3, 5, 2]), SplitBudget::default()).unwrap();
        assert!(out.fully_split());
        let roots: Vec<Scalar> = out.roots.iter().map(|(r, _)| r.clone()).collect();
        assert!(roots.contains(&Scalar::from_rat(crate::scalar::rat(1, 2))));
        assert!(roots.contains(&Scalar::from_int(-3)));
    }

    #[test]
    fn degree_additivity_and_gcd_monic() {
        let a = p(&[1, 2, 3]);
        let b = p(&[-5, 0, 0, 7]);
        assert!(degree_is_additive(&a, &b));
        let g = a.mul(&b).gcd(&b).unwrap();
        assert_eq!(g.leading().unwrap(), &Scalar::one());
        assert_eq!(g, b.monic().unwrap());
    }

    #[test]
    fn ext_gcd_identity() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[2, 1]);
        let (g, u, v) = a.ext_gcd(&b).unwrap();
        assert_eq!(u.mul(&a).add(&v.mul(&b)), g);
    }
}
