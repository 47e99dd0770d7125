//! Global endomorphisms of a split bundle as a finite-dimensional associative
//! algebra: evaluation maps, constant characteristic polynomials, the
//! Jordan–Chevalley decomposition by Newton iteration inside the algebra, a
//! complete system of spectral idempotents, and the radical via the trace
//! form of the regular representation.

use crate::error::Error;
use crate::linalg::{self, Mat};
use crate::poly::{self, Poly, SplitBudget};
use crate::scalar::Scalar;

/// An endomorphism of diag(z^{a_1}, ..., z^{a_n}) in split coordinates:
/// entry (i,j) is a polynomial in z of degree at most a_i - a_j (zero when
/// that is negative). These bounds are exactly what extends over both charts.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalEndo {
    exps: Vec<i64>,
    blocks: Vec<Vec<Poly>>,
}

/// A point of the line, named by the chart it lives in.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartPoint {
    Near(Scalar),
    Far(Scalar),
}

impl GlobalEndo {
    pub fn new(exps: Vec<i64>, blocks: Vec<Vec<Poly>>) -> Result<Self, Error> {
        let n = exps.len();
        if blocks.len() != n || blocks.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("endomorphism grid shape".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let bound = exps[i] - exps[j];
                match blocks[i][j].degree() {
                    None => {}
                    Some(d) if (d as i64) <= bound => {}
                    Some(d) => {
                        return Err(Error::ShapeMismatch(format!(
                            "entry ({i},{j}) has degree {d}, bound is {bound}"
                        )))
                    }
                }
            }
        }
        Ok(GlobalEndo { exps, blocks })
    }

    pub fn zero(exps: &[i64]) -> Self {
        let n = exps.len();
        GlobalEndo {
            exps: exps.to_vec(),
            blocks: vec![vec![Poly::zero(); n]; n],
        }
    }

    pub fn identity(exps: &[i64]) -> Self {
        let n = exps.len();
        let mut e = GlobalEndo::zero(exps);
        for i in 0..n {
            e.blocks[i][i] = Poly::one();
        }
        e
    }

    pub fn scalar(exps: &[i64], c: &Scalar) -> Self {
        let mut e = GlobalEndo::identity(exps);
        for i in 0..exps.len() {
            e.blocks[i][i] = Poly::constant(c.clone());
        }
        e
    }

    pub fn n(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn blocks(&self) -> &Vec<Vec<Poly>> {
        &self.blocks
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.blocks[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &GlobalEndo) -> GlobalEndo {
        assert_eq!(self.exps, other.exps);
        GlobalEndo {
            exps: self.exps.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.add(b)).collect())
                .collect(),
        }
    }

    pub fn sub(&self, other: &GlobalEndo) -> GlobalEndo {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GlobalEndo {
        GlobalEndo {
            exps: self.exps.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|r| r.iter().map(|p| p.neg()).collect())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> GlobalEndo {
        GlobalEndo {
            exps: self.exps.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|r| r.iter().map(|p| p.scale(c)).collect())
                .collect(),
        }
    }

    /// Composition; the degree bounds are stable under products.
    pub fn mul(&self, other: &GlobalEndo) -> GlobalEndo {
        assert_eq!(self.exps, other.exps);
        let n = self.n();
        let mut blocks = vec![vec![Poly::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if self.blocks[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let term = self.blocks[i][k].mul(&other.blocks[k][j]);
                    blocks[i][j] = blocks[i][j].add(&term);
                }
            }
        }
        GlobalEndo { exps: self.exps.clone(), blocks }
    }

    pub fn pow(&self, e: usize) -> GlobalEndo {
        let mut out = GlobalEndo::identity(&self.exps);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// The far-chart matrix: entry (i,j) is w^{a_i - a_j} * block_{ij}(1/w),
    /// polynomial in w by the degree bounds.
    pub fn far_blocks(&self) -> Vec<Vec<Poly>> {
        let n = self.n();
        let mut out = vec![vec![Poly::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let p = &self.blocks[i][j];
                if p.is_zero() {
                    continue;
                }
                let shift = self.exps[i] - self.exps[j];
                let mut coeffs = vec![Scalar::zero(); shift as usize + 1];
                for (k, c) in p.coeffs().iter().enumerate() {
                    coeffs[shift as usize - k] = c.clone();
                }
                out[i][j] = Poly::from_coeffs(coeffs);
            }
        }
        out
    }

    /// Nilpotency is a fiberwise condition checked globally: sigma^n = 0.
    pub fn is_nilpotent(&self) -> bool {
        self.pow(self.n()).is_zero()
    }
}

/// Evaluation of the endomorphism at a point, in the frame of that chart.
pub fn evaluate_at(sigma: &GlobalEndo, x: &ChartPoint) -> Mat {
    match x {
        ChartPoint::Near(z) => sigma
            .blocks
            .iter()
            .map(|row| row.iter().map(|p| p.eval(z)).collect())
            .collect(),
        ChartPoint::Far(w) => sigma
            .far_blocks()
            .iter()
            .map(|row| row.iter().map(|p| p.eval(w)).collect())
            .collect(),
    }
}

/// Evaluate a one-variable polynomial on an endomorphism, with a designated
/// unit standing in for 1 (pass the identity, or a corner idempotent).
pub fn apply_poly(p: &Poly, sigma: &GlobalEndo, unit: &GlobalEndo) -> GlobalEndo {
    let mut acc = GlobalEndo::zero(sigma.exps());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(sigma).add(&unit.scale(c));
    }
    acc
}

/// The algebra of all global endomorphisms of a fixed split type, with the
/// elementary basis z^k E_ij (0 <= k <= a_i - a_j).
#[derive(Debug, Clone)]
pub struct EndAlgebra {
    exps: Vec<i64>,
    index: Vec<(usize, usize, usize)>, // (i, j, k) per basis slot
}

impl EndAlgebra {
    pub fn new(exps: &[i64]) -> Self {
        let n = exps.len();
        let mut index = vec![];
        for i in 0..n {
            for j in 0..n {
                let bound = exps[i] - exps[j];
                if bound < 0 {
                    continue;
                }
                for k in 0..=bound as usize {
                    index.push((i, j, k));
                }
            }
        }
        EndAlgebra { exps: exps.to_vec(), index }
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn basis(&self) -> Vec<GlobalEndo> {
        self.index
            .iter()
            .map(|&(i, j, k)| {
                let mut e = GlobalEndo::zero(&self.exps);
                let mut coeffs = vec![Scalar::zero(); k + 1];
                coeffs[k] = Scalar::one();
                e.blocks[i][j] = Poly::from_coeffs(coeffs);
                e
            })
            .collect()
    }

    pub fn to_coords(&self, sigma: &GlobalEndo) -> Vec<Scalar> {
        self.index
            .iter()
            .map(|&(i, j, k)| sigma.blocks[i][j].coeff(k))
            .collect()
    }

    pub fn from_coords(&self, coords: &[Scalar]) -> GlobalEndo {
        let mut e = GlobalEndo::zero(&self.exps);
        for (slot, &(i, j, k)) in self.index.iter().enumerate() {
            if coords[slot].is_zero() {
                continue;
            }
            let mut coeffs = e.blocks[i][j].coeffs().to_vec();
            if coeffs.len() < k + 1 {
                coeffs.resize(k + 1, Scalar::zero());
            }
            coeffs[k] = coords[slot].clone();
            e.blocks[i][j] = Poly::from_coeffs(coeffs);
        }
        e
    }
}

pub fn end_algebra(exps: &[i64]) -> EndAlgebra {
    EndAlgebra::new(exps)
}

/// Characteristic polynomial of a scalar matrix, det(tI - m), by cofactor
/// expansion over polynomials in t.
pub fn char_poly_mat(m: &Mat) -> Poly {
    let n = m.len();
    let grid: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Poly::x().sub(&Poly::constant(m[i][j].clone()))
                    } else {
                        Poly::constant(m[i][j].clone()).neg()
                    }
                })
                .collect()
        })
        .collect();
    det_poly(&grid)
}

fn det_poly(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    match n {
        0 => Poly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Poly::zero();
            for (j, pivot) in m[0].iter().enumerate() {
                if pivot.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| m[i][c].clone())
                            .collect()
                    })
                    .collect();
                let term = pivot.mul(&det_poly(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// The sample points of the constancy certificate: four near-chart points and
/// the origin of the far chart, extended until the count exceeds the largest
/// possible coefficient degree.
pub fn certificate_points(sigma: &GlobalEndo) -> Vec<ChartPoint> {
    let mut pts = vec![
        ChartPoint::Near(Scalar::from_int(0)),
        ChartPoint::Near(Scalar::from_int(1)),
        ChartPoint::Near(Scalar::from_int(-1)),
        ChartPoint::Near(Scalar::from_int(2)),
        ChartPoint::Far(Scalar::from_int(0)),
    ];
    // enough extra near-chart points to pin down any coefficient polynomial
    let max_deg = sigma
        .blocks
        .iter()
        .flatten()
        .filter_map(|p| p.degree())
        .max()
        .unwrap_or(0);
    let needed = sigma.n() * max_deg + 1;
    let mut next = 3i64;
    while pts.len() < needed + 1 {
        pts.push(ChartPoint::Near(Scalar::from_int(next)));
        next += 1;
    }
    pts
}

/// Characteristic polynomial at the base point, with the constancy
/// certificate replayed: it must agree at every sample point (the sample set
/// is large enough that agreement implies constancy in z).
pub fn char_poly(sigma: &GlobalEndo) -> Result<(Poly, Vec<ChartPoint>), Error> {
    let pts = certificate_points(sigma);
    let base = char_poly_mat(&evaluate_at(sigma, &pts[0]));
    for p in &pts[1..] {
        let other = char_poly_mat(&evaluate_at(sigma, p));
        if other != base {
            return Err(Error::Internal(format!(
                "characteristic polynomial varies across the line: {} vs {}",
                base.to_string_repr("t"),
                other.to_string_repr("t")
            )));
        }
    }
    Ok((base, pts))
}

/// sigma = semisimple + nilpotent with both parts polynomials in sigma.
/// Newton iteration on the squarefree part of the characteristic polynomial;
/// requires the spectrum to split over the current field.
pub fn jordan_chevalley(
    sigma: &GlobalEndo,
    budget: SplitBudget,
) -> Result<(GlobalEndo, GlobalEndo), Error> {
    let (chi, _) = char_poly(sigma)?;
    let roots = poly::split_roots(&chi, budget)?;
    if !roots.fully_split() {
        return Err(Error::UnsplitSpectrum(
            roots
                .unsplit
                .iter()
                .map(|p| p.to_string_repr("t"))
                .collect(),
        ));
    }
    // q = product of (t - lambda) over the distinct eigenvalues
    let mut q = Poly::one();
    for (lam, _) in &roots.roots {
        q = q.mul(&Poly::linear(lam));
    }
    let qd = q.derivative();
    let (g, u, v) = q.ext_gcd(&qd)?;
    if !g.is_constant() || g.is_zero() {
        return Err(Error::Internal("squarefree part not squarefree".into()));
    }
    let ginv = g.coeff(0).inv()?;
    let u = u.scale(&ginv);
    let v = v.scale(&ginv); // u*q + v*qd = 1
    let id = GlobalEndo::identity(sigma.exps());
    let n = sigma.n();
    let mut x = sigma.clone();
    for _ in 0..=n {
        let qx = apply_poly(&q, &x, &id);
        if qx.is_zero() {
            let nil = sigma.sub(&x);
            if !nil.is_nilpotent() {
                return Err(Error::Internal("nilpotent part is not nilpotent".into()));
            }
            if !x.mul(&nil).eq(&nil.mul(&x)) {
                return Err(Error::Internal("decomposition parts do not commute".into()));
            }
            return Ok((x, nil));
        }
        // invert qd(x): qd(x) * v(x) = 1 - u(x) q(x), and u(x) q(x) is
        // nilpotent, so a finite geometric series finishes the job
        let uq = apply_poly(&u, &x, &id).mul(&qx);
        if !uq.is_nilpotent() {
            return Err(Error::Internal("expected nilpotent correction".into()));
        }
        let mut series = GlobalEndo::identity(sigma.exps());
        let mut power = GlobalEndo::identity(sigma.exps());
        for _ in 0..n {
            power = power.mul(&uq);
            if power.is_zero() {
                break;
            }
            series = series.add(&power);
        }
        let qd_inv = apply_poly(&v, &x, &id).mul(&series);
        x = x.sub(&qx.mul(&qd_inv));
    }
    Err(Error::Internal("Newton iteration did not converge".into()))
}

/// Complete orthogonal idempotent system of a semisimple element with split
/// constant spectrum, by Lagrange interpolation at the eigenvalues. Returned
/// in eigenvalue sort-key order, paired with the eigenvalues.
pub fn spectral_idempotents(
    sigma_s: &GlobalEndo,
    budget: SplitBudget,
) -> Result<Vec<(Scalar, GlobalEndo)>, Error> {
    let (chi, _) = char_poly(sigma_s)?;
    let roots = poly::split_roots(&chi, budget)?;
    if !roots.fully_split() {
        return Err(Error::UnsplitSpectrum(
            roots
                .unsplit
                .iter()
                .map(|p| p.to_string_repr("t"))
                .collect(),
        ));
    }
    let id = GlobalEndo::identity(sigma_s.exps());
    let eigen: Vec<Scalar> = roots.roots.iter().map(|(r, _)| r.clone()).collect();
    let mut out = vec![];
    for (idx, lam) in eigen.iter().enumerate() {
        let mut pi = id.clone();
        for (jdx, mu) in eigen.iter().enumerate() {
            if jdx == idx {
                continue;
            }
            let denom = lam.sub(mu).inv()?;
            let factor = sigma_s.sub(&GlobalEndo::scalar(sigma_s.exps(), mu)).scale(&denom);
            pi = pi.mul(&factor);
        }
        out.push((lam.clone(), pi));
    }
    // replay the defining identities exactly
    let mut total = GlobalEndo::zero(sigma_s.exps());
    for (i, (_, pi)) in out.iter().enumerate() {
        for (j, (_, pj)) in out.iter().enumerate() {
            let prod = pi.mul(pj);
            let want = if i == j { pi.clone() } else { GlobalEndo::zero(sigma_s.exps()) };
            if prod != want {
                return Err(Error::Internal("idempotent system not orthogonal".into()));
            }
        }
        total = total.add(pi);
    }
    if total != id {
        return Err(Error::NonIdempotent("spectral system incomplete".into()));
    }
    Ok(out)
}

/// A linear subspace of the endomorphism algebra closed under products,
/// presented by a basis in full-algebra coordinates.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    pub algebra: EndAlgebra,
    pub basis: Vec<GlobalEndo>,
}

impl Subalgebra {
    pub fn new(algebra: EndAlgebra, elements: &[GlobalEndo]) -> Result<Self, Error> {
        let vectors: Vec<Vec<Scalar>> =
            elements.iter().map(|e| algebra.to_coords(e)).collect();
        let span = linalg::span_basis(&vectors);
        let basis: Vec<GlobalEndo> = span.iter().map(|v| algebra.from_coords(v)).collect();
        let out = Subalgebra { algebra, basis };
        out.check_closed()?;
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn coords(&self) -> Vec<Vec<Scalar>> {
        self.basis
            .iter()
            .map(|b| self.algebra.to_coords(b))
            .collect()
    }

    /// Coordinates of an element in the subalgebra basis, if it lies inside.
    pub fn member_coords(&self, e: &GlobalEndo) -> Option<Vec<Scalar>> {
        linalg::coords_in_span(&self.coords(), &self.algebra.to_coords(e))
    }

    pub fn contains(&self, e: &GlobalEndo) -> bool {
        self.member_coords(e).is_some()
    }

    fn check_closed(&self) -> Result<(), Error> {
        for a in &self.basis {
            for b in &self.basis {
                if !self.contains(&a.mul(b)) {
                    return Err(Error::InvalidDecomposition(
                        "span is not closed under products".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Matrix of left multiplication by e on the subalgebra, in its basis.
    pub fn left_mul_matrix(&self, e: &GlobalEndo) -> Result<Mat, Error> {
        let d = self.dim();
        let mut cols: Vec<Vec<Scalar>> = vec![];
        for b in &self.basis {
            let prod = e.mul(b);
            let c = self.member_coords(&prod).ok_or_else(|| {
                Error::InvalidDecomposition("left multiplication leaves the span".into())
            })?;
            cols.push(c);
        }
        let mut m = linalg::zeros(d, d);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..d {
                m[i][j] = col[i].clone();
            }
        }
        Ok(m)
    }
}

/// Radical of a product-closed subspace: the kernel of the trace form of the
/// regular representation (Dickson's criterion, valid in characteristic 0).
pub fn radical(sub: &Subalgebra) -> Result<Vec<GlobalEndo>, Error> {
    let d = sub.dim();
    if d == 0 {
        return Ok(vec![]);
    }
    let left: Vec<Mat> = sub
        .basis
        .iter()
        .map(|b| sub.left_mul_matrix(b))
        .collect::<Result<Vec<_>, _>>()?;
    // bilinear form B(x, y) = tr(L_x L_y)
    let mut form = linalg::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let prod = linalg::mat_mul(&left[i], &left[j]);
            let mut tr = Scalar::zero();
            for (k, row) in prod.iter().enumerate() {
                tr = tr.add(&row[k]);
            }
            form[i][j] = tr;
        }
    }
    let kernel = linalg::nullspace(&form);
    let out: Vec<GlobalEndo> = kernel
        .iter()
        .map(|v| {
            let mut acc = GlobalEndo::zero(sub.algebra.exps());
            for (c, b) in v.iter().zip(&sub.basis) {
                acc = acc.add(&b.scale(c));
            }
            acc
        })
        .collect();
    // every radical element is nilpotent in char 0; replay that
    for r in &out {
        if !r.is_nilpotent() {
            return Err(Error::Internal("radical element is not nilpotent".into()));
        }
    }
    Ok(out)
}

/// Minimal polynomial of sigma relative to a unit element (identity of the
/// ambient or a corner): the first monic dependency among unit, sigma,
/// sigma^2, ...
pub fn min_poly(
    sigma: &GlobalEndo,
    unit: &GlobalEndo,
    algebra: &EndAlgebra,
) -> Result<Poly, Error> {
    let mut powers: Vec<GlobalEndo> = vec![unit.clone()];
    let mut vectors: Vec<Vec<Scalar>> = vec![algebra.to_coords(unit)];
    loop {
        let next = powers.last().unwrap().mul(sigma);
        let v = algebra.to_coords(&next);
        if let Some(coords) = linalg::coords_in_span(&vectors, &v) {
            // next = sum coords_k * sigma^k, so the minimal polynomial is
            // t^m - sum coords_k t^k
            let m = powers.len();
            let mut coeffs = vec![Scalar::zero(); m + 1];
            for (k, c) in coords.iter().enumerate() {
                coeffs[k] = c.neg();
            }
            coeffs[m] = Scalar::one();
            return Ok(Poly::from_coeffs(coeffs));
        }
        vectors.push(v);
        powers.push(next);
        if powers.len() > algebra.dim() + 1 {
            return Err(Error::Internal("minimal polynomial search ran away".into()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn endo(exps: &[i64], grid: &[&[&[i64]]]) -> GlobalEndo {
        let blocks = grid
            .iter()
            .map(|row| row.iter().map(|c| Poly::from_ints(c)).collect())
            .collect();
        GlobalEndo::new(exps.to_vec(), blocks).unwrap()
    }

    #[test]
    fn dimension_closed_form() {
        assert_eq!(end_algebra(&[0, 0]).dim(), 4);
        assert_eq!(end_algebra(&[1, 0]).dim(), 4);
        assert_eq!(end_algebra(&[2, 0]).dim(), 5);
        assert_eq!(end_algebra(&[1, 0, -1]).dim(), 1 + 2 + 3 + 1 + 2 + 1);
    }

    #[test]
    fn degree_bounds_enforced() {
        // z in the (2,1) slot of type (1,0) breaks the bound
        let bad = GlobalEndo::new(
            vec![0, 1],
            vec![
                vec![Poly::zero(), Poly::zero()],
                vec![Poly::zero(), Poly::zero()],
            ],
        );
        assert!(bad.is_ok());
        let bad = GlobalEndo::new(
            vec![0, 1],
            vec![
                vec![Poly::zero(), Poly::from_ints(&[0, 1])],
                vec![Poly::zero(), Poly::zero()],
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn evaluation_is_homomorphism() {
        let a = endo(&[1, 0], &[&[&[1], &[0, 3]], &[&[], &[5]]]);
        let b = endo(&[1, 0], &[&[&[2], &[1, 1]], &[&[], &[1]]]);
        for x in [
            ChartPoint::Near(Scalar::from_int(0)),
            ChartPoint::Near(Scalar::from_int(2)),
            ChartPoint::Far(Scalar::from_int(0)),
            ChartPoint::Far(Scalar::from_int(3)),
        ] {
            let lhs = evaluate_at(&a.mul(&b), &x);
            let rhs = linalg::mat_mul(&evaluate_at(&a, &x), &evaluate_at(&b, &x));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn char_poly_constant_and_triangular() {
        // identity, rank 2: (t-1)^2
        let id = GlobalEndo::identity(&[1, 0]);
        let (chi, _) = char_poly(&id).unwrap();
        assert_eq!(chi, Poly::from_ints(&[1, -2, 1]));
        // strictly lower block with entry z: t^2
        let nil = endo(&[1, 0], &[&[&[], &[0, 1]], &[&[], &[]]]);
        let (chi, _) = char_poly(&nil).unwrap();
        assert_eq!(chi, Poly::from_ints(&[0, 0, 1]));
        // [[1, z], [0, 2]]: (t-1)(t-2)
        let tri = endo(&[1, 0], &[&[&[1], &[0, 1]], &[&[], &[2]]]);
        let (chi, _) = char_poly(&tri).unwrap();
        assert_eq!(chi, Poly::from_ints(&[2, -3, 1]));
    }

    #[test]
    fn jordan_chevalley_cases() {
        let budget = SplitBudget::default();
        // semisimple diagonal: (sigma, 0)
        let diag = endo(&[1, 0], &[&[&[3], &[]], &[&[], &[7]]]);
        let (s, n) = jordan_chevalley(&diag, budget).unwrap();
        assert_eq!(s, diag);
        assert!(n.is_zero());
        // strictly lower block nilpotent: (0, sigma)
        let nil = endo(&[1, 0], &[&[&[], &[1, 1]], &[&[], &[]]]);
        let (s, n) = jordan_chevalley(&nil, budget).unwrap();
        assert!(s.is_zero());
        assert_eq!(n, nil);
        // unipotent [[1, z], [0, 1]]: (identity, rest)
        let uni = endo(&[1, 0], &[&[&[1], &[0, 1]], &[&[], &[1]]]);
        let (s, n) = jordan_chevalley(&uni, budget).unwrap();
        assert_eq!(s, GlobalEndo::identity(&[1, 0]));
        assert_eq!(n, uni.sub(&GlobalEndo::identity(&[1, 0])));
        // mixed: [[1, z], [0, 2]] is semisimple (distinct eigenvalues)
        let tri = endo(&[1, 0], &[&[&[1], &[0, 1]], &[&[], &[2]]]);
        let (s, n) = jordan_chevalley(&tri, budget).unwrap();
        assert!(n.is_zero());
        assert_eq!(s, tri);
    }

    #[test]
    fn spectral_idempotents_triangular() {
        let budget = SplitBudget::default();
        let tri = endo(&[1, 0], &[&[&[1], &[0, 1]], &[&[], &[2]]]);
        let pis = spectral_idempotents(&tri, budget).unwrap();
        assert_eq!(pis.len(), 2);
        for (_, pi) in &pis {
            // constant rank 1 at sample points in both charts
            for x in [
                ChartPoint::Near(Scalar::from_int(0)),
                ChartPoint::Near(Scalar::from_int(5)),
                ChartPoint::Far(Scalar::from_int(0)),
            ] {
                assert_eq!(linalg::rank(&evaluate_at(pi, &x)), 1);
            }
        }
    }

    #[test]
    fn unsplit_spectrum_reported() {
        // [[0, 2...]] companion-style element with char poly t^2 - 2
        let e = endo(&[0, 0], &[&[&[], &[2]], &[&[1], &[]]]);
        let (chi, _) = char_poly(&e).unwrap();
        assert_eq!(chi, Poly::from_ints(&[-2, 0, 1]));
        let small = SplitBudget { height: 2, conductor_max: 4 };
        match jordan_chevalley(&e, small) {
            Err(Error::UnsplitSpectrum(fs)) => assert_eq!(fs.len(), 1),
            other => panic!("expected unsplit spectrum, got {other:?}"),
        }
    }

    #[test]
    fn radical_of_type_1_0() {
        let alg = end_algebra(&[1, 0]);
        let sub = Subalgebra::new(alg.clone(), &alg.basis()).unwrap();
        let rad = radical(&sub).unwrap();
        // the Hom(O(0), O(1)) block: span{E12, z E12}, dimension 2
        assert_eq!(rad.len(), 2);
        for r in &rad {
            assert!(r.is_nilpotent());
            assert!(r.blocks()[1][0].is_zero());
            assert!(r.blocks()[0][0].is_zero());
            assert!(r.blocks()[1][1].is_zero());
        }
    }

    #[test]
    fn radical_of_matrix_algebra_is_zero() {
        let alg = end_algebra(&[0, 0]);
        let sub = Subalgebra::new(alg.clone(), &alg.basis()).unwrap();
        assert!(radical(&sub).unwrap().is_empty());
    }

    #[test]
    fn radical_of_identity_plus_nilpotent() {
        let alg = end_algebra(&[1, 0]);
        let id = GlobalEndo::identity(&[1, 0]);
        let nil = endo(&[1, 0], &[&[&[], &[0, 1]], &[&[], &[]]]);
        let sub = Subalgebra::new(alg, &[id, nil.clone()]).unwrap();
        let rad = radical(&sub).unwrap();
        assert_eq!(rad.len(), 1);
    }

    #[test]
    fn radical_products_vanish() {
        let alg = end_algebra(&[2, 0]);
        let sub = Subalgebra::new(alg.clone(), &alg.basis()).unwrap();
        let rad = radical(&sub).unwrap();
        assert!(!rad.is_empty());
        let mut prod = GlobalEndo::identity(&[2, 0]);
        for _ in 0..sub.dim() {
            prod = prod.mul(&rad[0]);
        }
        assert!(prod.is_zero());
    }

    #[test]
    fn min_poly_examples() {
        let alg = end_algebra(&[0, 0]);
        let id = GlobalEndo::identity(&[0, 0]);
        let e11 = endo(&[0, 0], &[&[&[1], &[]], &[&[], &[]]]);
        let p = min_poly(&e11, &id, &alg).unwrap();
        assert_eq!(p, Poly::from_ints(&[0, -1, 1])); // t^2 - t
        let p = min_poly(&id, &id, &alg).unwrap();
        assert_eq!(p, Poly::from_ints(&[-1, 1])); // t - 1
    }
}
