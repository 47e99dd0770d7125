//! Rational functions in one variable over exact scalars, plus small matrix
//! helpers over them. These carry Möbius-transported lift matrices in the
//! equivariance checks, where plain polynomials are not closed under the
//! substitutions involved.

use crate::error::Error;
use crate::linalg;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// num/den with den monic and gcd(num, den) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut rf = RatFunc { num, den };
        rf.reduce()?;
        Ok(rf)
    }

    fn reduce(&mut self) -> Result<(), Error> {
        if self.num.is_zero() {
            self.den = Poly::one();
            return Ok(());
        }
        let g = self.num.gcd(&self.den)?;
        if g.degree().map_or(false, |d| d >= 1) {
            self.num = self.num.div_exact(&g)?;
            self.den = self.den.div_exact(&g)?;
        }
        let lead_inv = self.den.leading().unwrap().inv()?;
        self.den = self.den.scale(&lead_inv);
        self.num = self.num.scale(&lead_inv);
        // keep den monic: rescale num by the old leading coefficient instead
        // (num and den were both scaled, so den is monic and the value kept)
        Ok(())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn constant(c: Scalar) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_polynomial(&self) -> Option<Poly> {
        if self.is_polynomial() {
            // den is monic constant = 1
            Some(self.num.clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn inv(&self) -> Result<RatFunc, Error> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, Error> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn regular_at(&self, x: &Scalar) -> bool {
        !self.den.eval(x).is_zero()
    }

    pub fn eval(&self, x: &Scalar) -> Result<Scalar, Error> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Internal(format!(
                "pole at evaluation point {}",
                x.to_string_repr()
            )));
        }
        self.num.eval(x).div(&d)
    }

    /// Substitute the variable by another rational function.
    pub fn compose(&self, arg: &RatFunc) -> RatFunc {
        let n = compose_poly(&self.num, arg);
        let d = compose_poly(&self.den, arg);
        // den is nonzero as a polynomial; composition with a nonconstant or
        // suitable argument stays nonzero because den has finitely many roots
        n.div(&d).expect("composed denominator vanished identically")
    }

    /// Substitute z -> 1/w, returning a rational function in w.
    pub fn reciprocal_subst(&self) -> RatFunc {
        let inv = RatFunc::new(Poly::one(), Poly::x()).unwrap();
        self.compose(&inv)
    }
}

/// p(arg) for a polynomial p and rational argument, by Horner.
pub fn compose_poly(p: &Poly, arg: &RatFunc) -> RatFunc {
    let mut acc = RatFunc::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(arg).add(&RatFunc::constant(c.clone()));
    }
    acc
}

// ---------------------------------------------------------------------------
// matrices of rational functions

pub type RatMat = Vec<Vec<RatFunc>>;

pub fn rm_identity(n: usize) -> RatMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() })
                .collect()
        })
        .collect()
}

pub fn rm_mul(a: &RatMat, b: &RatMat) -> RatMat {
    let n = a.len();
    let inner = b.len();
    let cols = if inner > 0 { b[0].len() } else { 0 };
    (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut acc = RatFunc::zero();
                    for (k, bk) in b.iter().enumerate().take(inner) {
                        acc = acc.add(&a[i][k].mul(&bk[j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn rm_sub(a: &RatMat, b: &RatMat) -> RatMat {
    a.iter()
        .zip(b.iter())
        .map(|(ra, rb)| ra.iter().zip(rb.iter()).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

pub fn rm_is_zero(a: &RatMat) -> bool {
    a.iter().flatten().all(|x| x.is_zero())
}

pub fn rm_det(a: &RatMat) -> RatFunc {
    let n = a.len();
    match n {
        0 => RatFunc::one(),
        1 => a[0][0].clone(),
        _ => {
            let mut acc = RatFunc::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: RatMat = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| a[i][c].clone())
                            .collect()
                    })
                    .collect();
                let term = a[0][j].mul(&rm_det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

pub fn rm_inv(a: &RatMat) -> Result<RatMat, Error> {
    let n = a.len();
    let det = rm_det(a);
    if det.is_zero() {
        return Err(Error::ShapeMismatch("singular rational matrix".into()));
    }
    let det_inv = det.inv()?;
    let mut out = rm_identity(n);
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            // adjugate: cofactor of (j, i)
            let minor: RatMat = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| a[r][c].clone())
                        .collect()
                })
                .collect();
            let mut cof = rm_det(&minor);
            if (i + j) % 2 == 1 {
                cof = cof.neg();
            }
            *slot = cof.mul(&det_inv);
        }
    }
    Ok(out)
}

/// Compose every entry with the same rational argument.
pub fn rm_compose(a: &RatMat, arg: &RatFunc) -> RatMat {
    a.iter()
        .map(|row| row.iter().map(|e| e.compose(arg)).collect())
        .collect()
}

/// Evaluate a rational matrix at a point; fails on a pole.
pub fn rm_eval(a: &RatMat, x: &Scalar) -> Result<linalg::Mat, Error> {
    a.iter()
        .map(|row| row.iter().map(|e| e.eval(x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn z() -> RatFunc {
        RatFunc::from_poly(Poly::x())
    }

    #[test]
    fn reduction_and_equality() {
        // (z^2 - 1)/(z - 1) == z + 1
        let n = Poly::from_ints(&[-1, 0, 1]);
        let d = Poly::from_ints(&[-1, 1]);
        let f = RatFunc::new(n, d).unwrap();
        assert_eq!(f, RatFunc::from_poly(Poly::from_ints(&[1, 1])));
        assert!(f.is_polynomial());
    }

    #[test]
    fn field_operations() {
        let f = RatFunc::new(Poly::one(), Poly::from_ints(&[0, 1])).unwrap(); // 1/z
        let g = z();
        assert_eq!(f.mul(&g), RatFunc::one());
        assert_eq!(f.inv().unwrap(), g);
        let s = f.add(&g); // 1/z + z = (1 + z^2)/z
        assert_eq!(s.num(), &Poly::from_ints(&[1, 0, 1]));
        assert_eq!(s.den(), &Poly::from_ints(&[0, 1]));
    }

    #[test]
    fn composition_with_mobius() {
        // f(z) = z^2 composed with (z+1)/(z-1)
        let f = RatFunc::from_poly(Poly::from_ints(&[0, 0, 1]));
        let arg = RatFunc::new(Poly::from_ints(&[1, 1]), Poly::from_ints(&[-1, 1])).unwrap();
        let c = f.compose(&arg);
        let x = Scalar::from_int(3);
        let direct = arg.eval(&x).unwrap().mul(&arg.eval(&x).unwrap());
        assert_eq!(c.eval(&x).unwrap(), direct);
    }

    #[test]
    fn matrix_inverse() {
        let a: RatMat = vec![
            vec![z(), RatFunc::one()],
            vec![RatFunc::zero(), RatFunc::one()],
        ];
        let inv = rm_inv(&a).unwrap();
        assert!(rm_is_zero(&rm_sub(&rm_mul(&a, &inv), &rm_identity(2))));
    }
}
