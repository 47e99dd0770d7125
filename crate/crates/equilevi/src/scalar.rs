//! Exact scalars: elements of cyclotomic number fields Q(zeta_m).
//!
//! A `Scalar` is a polynomial in zeta_m with rational coefficients, reduced
//! modulo the m-th cyclotomic polynomial. Conductor 1 is plain Q. Arithmetic
//! between different conductors goes through the embedding into Q(zeta_lcm);
//! elements that turn out rational are normalized back down to conductor 1.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::error::Error;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// rational polynomial helpers (dense, used only for cyclotomic machinery)

fn rp_trim(p: &mut Vec<Rat>) {
    while p.len() > 0 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

fn rp_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    rp_trim(&mut out);
    out
}

/// Division with remainder; divisor must be nonzero.
fn rp_divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem: Vec<Rat> = a.to_vec();
    rp_trim(&mut rem);
    let db = b.len() - 1;
    let lead = b.last().unwrap().clone();
    if rem.len() <= db {
        return (vec![], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - db];
    while rem.len() > db {
        let dr = rem.len() - 1;
        let c = rem.last().unwrap() / &lead;
        quot[dr - db] = c.clone();
        for i in 0..=db {
            let v = &b[i] * &c;
            rem[dr - db + i] -= v;
        }
        rp_trim(&mut rem);
        if rem.len() > db && rem.len() - 1 == dr {
            unreachable!("degree did not drop in division");
        }
    }
    rp_trim(&mut quot);
    (quot, rem)
}

// ---------------------------------------------------------------------------
// cyclotomic polynomials

pub fn euler_phi(m: u32) -> u32 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn cyclo_cache() -> &'static Mutex<HashMap<u32, Vec<Rat>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Rat>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Monic m-th cyclotomic polynomial as a dense coefficient vector.
pub fn cyclotomic_polynomial(m: u32) -> Vec<Rat> {
    assert!(m >= 1);
    if let Some(p) = cyclo_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by the product of Phi_d over proper divisors d of m.
    let phi = if m == 1 {
        vec![-Rat::one(), Rat::one()]
    } else {
        let mut num = vec![Rat::zero(); m as usize + 1];
        num[0] = -Rat::one();
        num[m as usize] = Rat::one();
        let mut den = vec![Rat::one()];
        for d in 1..m {
            if m % d == 0 {
                den = rp_mul(&den, &cyclotomic_polynomial(d));
            }
        }
        let (q, r) = rp_divrem(&num, &den);
        assert!(r.is_empty(), "cyclotomic division must be exact");
        q
    };
    cyclo_cache().lock().unwrap().insert(m, phi.clone());
    phi
}

// ---------------------------------------------------------------------------
// Scalar

/// An element of Q(zeta_m), stored in the power basis modulo Phi_m.
#[derive(Debug, Clone)]
pub struct Scalar {
    conductor: u32,
    /// Length equals phi(conductor).
    coeffs: Vec<Rat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { conductor: 1, coeffs: vec![Rat::zero()] }
    }

    pub fn one() -> Self {
        Scalar { conductor: 1, coeffs: vec![Rat::one()] }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { conductor: 1, coeffs: vec![rat_int(n)] }
    }

    pub fn from_rat(q: Rat) -> Self {
        Scalar { conductor: 1, coeffs: vec![q] }
    }

    /// Primitive m-th root of unity.
    pub fn zeta(m: u32) -> Self {
        assert!(m >= 1);
        if m == 1 {
            return Scalar::one();
        }
        if m == 2 {
            return Scalar::from_int(-1);
        }
        let deg = euler_phi(m) as usize;
        let mut coeffs = vec![Rat::zero(); deg];
        coeffs[1] = Rat::one();
        Scalar { conductor: m, coeffs }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.is_rational() && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1 || self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn normalize(mut self) -> Self {
        if self.conductor > 1 && self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            self = Scalar { conductor: 1, coeffs: vec![self.coeffs[0].clone()] };
        }
        self
    }

    /// Builds an element from an arbitrary-length power-basis polynomial in
    /// zeta_m, reducing modulo Phi_m.
    fn reduce(m: u32, raw: Vec<Rat>) -> Self {
        let phi = cyclotomic_polynomial(m);
        let (_, r) = rp_divrem(&raw, &phi);
        let deg = phi.len() - 1;
        let mut coeffs = r;
        coeffs.resize(deg.max(1), Rat::zero());
        Scalar { conductor: m, coeffs }.normalize()
    }

    /// Ring embedding into Q(zeta_target); `target` must be a multiple of the
    /// current conductor.
    pub fn promote(&self, target: u32) -> Self {
        assert!(target % self.conductor == 0, "promotion needs divisibility");
        if target == self.conductor {
            return self.clone();
        }
        let step = (target / self.conductor) as usize;
        let max_deg = (self.coeffs.len() - 1) * step;
        let mut raw = vec![Rat::zero(); max_deg + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] += c;
        }
        Scalar::reduce(target, raw)
    }

    fn common(a: &Scalar, b: &Scalar) -> (Scalar, Scalar, u32) {
        let m = num::integer::lcm(a.conductor, b.conductor);
        (a.promote(m), b.promote(m), m)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let (a, b, m) = Scalar::common(self, other);
        // promotion may hand back a rational in short form; pad both sides
        let width = a.coeffs.len().max(b.coeffs.len());
        let mut coeffs = a.coeffs.clone();
        coeffs.resize(width, Rat::zero());
        for (i, y) in b.coeffs.iter().enumerate() {
            coeffs[i] += y;
        }
        Scalar { conductor: m, coeffs }.normalize()
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let (a, b, m) = Scalar::common(self, other);
        if m == 1 {
            return Scalar::from_rat(&a.coeffs[0] * &b.coeffs[0]);
        }
        Scalar::reduce(m, rp_mul(&a.coeffs, &b.coeffs))
    }

    /// Multiplicative inverse; the result is verified to satisfy x * x^-1 = 1.
    pub fn inv(&self) -> Result<Scalar, Error> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Scalar::from_rat(q.recip()));
        }
        // extended Euclid: u * self + v * Phi_m = gcd = const
        let m = self.conductor;
        let phi = cyclotomic_polynomial(m);
        let mut r0: Vec<Rat> = phi.clone();
        let mut r1: Vec<Rat> = self.coeffs.clone();
        rp_trim(&mut r1);
        let mut u0: Vec<Rat> = vec![];
        let mut u1: Vec<Rat> = vec![Rat::one()];
        while !r1.is_empty() {
            let (q, r) = rp_divrem(&r0, &r1);
            let mut u2 = u0.clone();
            let qu = rp_mul(&q, &u1);
            if u2.len() < qu.len() {
                u2.resize(qu.len(), Rat::zero());
            }
            for (i, c) in qu.iter().enumerate() {
                u2[i] -= c;
            }
            rp_trim(&mut u2);
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = u2;
        }
        // r0 is a nonzero constant gcd (Phi_m has no root in the field, the
        // element is nonzero of degree < deg Phi_m)
        if r0.len() != 1 {
            return Err(Error::Internal(format!(
                "gcd with cyclotomic polynomial not constant (conductor {m})"
            )));
        }
        let c = r0[0].clone();
        let inv_coeffs: Vec<Rat> = u0.iter().map(|x| x / &c).collect();
        let result = Scalar::reduce(m, inv_coeffs);
        let check = self.mul(&result);
        if !check.is_one() {
            return Err(Error::Internal("inverse verification failed".into()));
        }
        Ok(result)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, Error> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut out = Scalar::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Deterministic comparison key for report ordering. Not a numeric order.
    pub fn sort_key(&self) -> (u32, Vec<(BigInt, BigInt)>) {
        (
            self.conductor,
            self.coeffs
                .iter()
                .map(|c| (c.numer().clone(), c.denom().clone()))
                .collect(),
        )
    }

    // -- serialization -----------------------------------------------------

    pub fn to_string_repr(&self) -> String {
        if let Some(q) = self.as_rational() {
            fmt_rat(&q)
        } else {
            let parts: Vec<String> = self.coeffs.iter().map(fmt_rat).collect();
            format!("[{}; {}]", self.conductor, parts.join(", "))
        }
    }

    pub fn parse(s: &str) -> Result<Scalar, Error> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix('[') {
            let body = body
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse(format!("unterminated scalar: {s}")))?;
            let (m_part, rest) = body
                .split_once(';')
                .ok_or_else(|| Error::Parse(format!("missing conductor: {s}")))?;
            let m: u32 = m_part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad conductor: {s}")))?;
            if m == 0 {
                return Err(Error::Parse("conductor must be positive".into()));
            }
            let coeffs: Result<Vec<Rat>, Error> =
                rest.split(',').map(|t| parse_rat(t.trim())).collect();
            let coeffs = coeffs?;
            let deg = euler_phi(m) as usize;
            if coeffs.len() != deg.max(1) {
                return Err(Error::Parse(format!(
                    "expected {} coefficients for conductor {}, got {}",
                    deg.max(1),
                    m,
                    coeffs.len()
                )));
            }
            Ok(Scalar { conductor: m, coeffs }.normalize())
        } else {
            Ok(Scalar::from_rat(parse_rat(s)?))
        }
    }
}

fn fmt_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational: {s}")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational: {s}")))?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rat::new(num, den))
    } else {
        let num: BigInt = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer: {s}")))?;
        Ok(Rat::from(num))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for Scalar {}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_repr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_scalar(rng: &mut ChaCha20Rng, m: u32) -> Scalar {
        let deg = euler_phi(m) as usize;
        let mut s = Scalar::zero();
        let z = Scalar::zeta(m);
        for i in 0..deg {
            let c = Scalar::from_rat(rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
            s = s.add(&c.mul(&z.pow(i as u32)));
        }
        s
    }

    #[test]
    fn cyclotomic_polynomials_known() {
        let as_i64 = |v: Vec<Rat>| -> Vec<i64> {
            v.iter().map(|c| c.to_integer().try_into().unwrap()).collect()
        };
        assert_eq!(as_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(2)), vec![1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(3)), vec![1, 1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_orders() {
        for m in [1u32, 2, 3, 4, 5, 6, 8, 12] {
            let z = Scalar::zeta(m);
            assert!(z.pow(m).is_one(), "zeta_{m}^{m} != 1");
            for k in 1..m {
                assert!(!z.pow(k).is_one(), "zeta_{m}^{k} == 1 prematurely");
            }
        }
    }

    #[test]
    fn field_axioms_randomized() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..40 {
            let m = [1u32, 3, 4, 6, 8][rng.gen_range(0..5)];
            let a = random_scalar(&mut rng, m);
            let b = random_scalar(&mut rng, m);
            let c = random_scalar(&mut rng, 4);
            // associativity and distributivity
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            // inverses
            if !a.is_zero() {
                assert!(a.inv().unwrap().mul(&a).is_one());
            }
        }
    }

    #[test]
    fn promotion_is_ring_compatible() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for _ in 0..25 {
            let a = random_scalar(&mut rng, 4);
            let b = random_scalar(&mut rng, 4);
            let prod = a.mul(&b).promote(12);
            let prod2 = a.promote(12).mul(&b.promote(12));
            assert_eq!(prod, prod2);
            let sum = a.add(&b).promote(12);
            assert_eq!(sum, a.promote(12).add(&b.promote(12)));
        }
    }

    #[test]
    fn mixed_conductor_arithmetic() {
        // zeta_3 * zeta_4 = zeta_12^7
        let z3 = Scalar::zeta(3);
        let z4 = Scalar::zeta(4);
        let z12 = Scalar::zeta(12);
        assert_eq!(z3.mul(&z4), z12.pow(7));
        // 2 zeta_4^2 = -2 should normalize to a rational
        let v = Scalar::from_int(2).mul(&z4.pow(2));
        assert_eq!(v.as_rational(), Some(rat_int(-2)));
    }

    #[test]
    fn string_round_trip() {
        for s in ["3", "-5/7", "[4; 1/2, -3]", "[8; 0, 1, 0, -2/3]"] {
            let v = Scalar::parse(s).unwrap();
            let v2 = Scalar::parse(&v.to_string_repr()).unwrap();
            assert_eq!(v, v2);
        }
        assert!(Scalar::parse("[4; 1]").is_err());
        assert!(Scalar::parse("1/0").is_err());
    }
}
