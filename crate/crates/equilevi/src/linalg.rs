//! Dense linear algebra over exact scalars: reduced row echelon form,
//! nullspaces, solves and inverses. Sizes here are tiny (dimension of a
//! section space or an endomorphism algebra), so Gaussian elimination over
//! the field is the right tool.

use crate::error::Error;
use crate::scalar::Scalar;

pub type Mat = Vec<Vec<Scalar>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![Scalar::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    m
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let rows = a.len();
    let inner = if rows > 0 { a[0].len() } else { 0 };
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    assert_eq!(inner, b.len(), "matrix product shape mismatch");
    let mut out = zeros(rows, cols);
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

pub fn mat_vec(a: &Mat, v: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .map(|row| {
            let mut acc = Scalar::zero();
            for (c, x) in row.iter().zip(v.iter()) {
                acc = acc.add(&c.mul(x));
            }
            acc
        })
        .collect()
}

/// In-place reduced row echelon form; returns pivot column indices.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot nonzero");
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = f.mul(&m[r][j]);
                    m[i][j] = m[i][j].sub(&sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Mat) -> usize {
    let mut c = m.clone();
    rref(&mut c).len()
}

/// Basis of the right nullspace of `m` (rows = equations).
pub fn nullspace(m: &Mat) -> Vec<Vec<Scalar>> {
    let cols = if m.is_empty() { return vec![] } else { m[0].len() };
    let mut red = m.clone();
    let pivots = rref(&mut red);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = vec![];
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(); cols];
        v[free] = Scalar::one();
        for (row_idx, &pc) in pivots.iter().enumerate() {
            v[pc] = red[row_idx][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Solves A x = b; None when inconsistent. For underdetermined systems an
/// arbitrary (deterministic) solution is returned.
pub fn solve(a: &Mat, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    assert_eq!(rows, b.len());
    let mut aug: Mat = a
        .iter()
        .zip(b.iter())
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![Scalar::zero(); cols];
    for (row_idx, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row_idx][cols].clone();
    }
    Some(x)
}

pub fn invert(m: &Mat) -> Result<Mat, Error> {
    let n = m.len();
    let mut aug: Mat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "inverse of non-square matrix");
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Scalar::one() } else { Scalar::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    // every pivot must land in the left block; a singular matrix still
    // collects n pivots by spilling into the adjoined identity columns
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return Err(Error::ShapeMismatch("matrix is singular".into()));
    }
    Ok(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Row-reduces the given vectors and returns a basis of their span.
pub fn span_basis(vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    if vectors.is_empty() {
        return vec![];
    }
    let mut m: Mat = vectors.to_vec();
    let pivots = rref(&mut m);
    m.truncate(pivots.len());
    m
}

/// Coordinates of `v` in the span of `basis` (rows), if it lies there.
pub fn coords_in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> Option<Vec<Scalar>> {
    if basis.is_empty() {
        return if v.iter().all(|c| c.is_zero()) { Some(vec![]) } else { None };
    }
    let cols = basis.len();
    let rows = v.len();
    let a: Mat = (0..rows)
        .map(|i| (0..cols).map(|j| basis[j][i].clone()).collect())
        .collect();
    let x = solve(&a, v)?;
    // consistency: verify exactly (solve on underdetermined systems is lax)
    let mut check = vec![Scalar::zero(); rows];
    for (j, c) in x.iter().enumerate() {
        for i in 0..rows {
            check[i] = check[i].add(&c.mul(&basis[j][i]));
        }
    }
    if check.iter().zip(v.iter()).all(|(a, b)| a == b) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn invert_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = invert(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
    }

    #[test]
    fn invert_rejects_singular() {
        assert!(invert(&m(&[&[0, 0], &[-3, 2]])).is_err());
        assert!(invert(&m(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn nullspace_dimensions() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(mat_vec(&a, &v).iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[0, 1]]);
        let x = solve(&a, &[Scalar::from_int(3), Scalar::from_int(1)]).unwrap();
        assert_eq!(x, vec![Scalar::from_int(2), Scalar::from_int(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &[Scalar::from_int(0), Scalar::from_int(1)]).is_none());
    }

    #[test]
    fn rational_pivots() {
        let a: Mat = vec![vec![Scalar::from_rat(rat(1, 2)), Scalar::from_int(1)],
                          vec![Scalar::from_int(1), Scalar::from_int(3)]];
        assert_eq!(rank(&a), 2);
    }

    #[test]
    fn coords_in_span_checks_membership() {
        let basis = vec![
            vec![Scalar::from_int(1), Scalar::from_int(0), Scalar::from_int(1)],
            vec![Scalar::from_int(0), Scalar::from_int(1), Scalar::from_int(0)],
        ];
        let inside = vec![Scalar::from_int(2), Scalar::from_int(-1), Scalar::from_int(2)];
        assert_eq!(
            coords_in_span(&basis, &inside).unwrap(),
            vec![Scalar::from_int(2), Scalar::from_int(-1)]
        );
        let outside = vec![Scalar::from_int(1), Scalar::from_int(0), Scalar::from_int(0)];
        assert!(coords_in_span(&basis, &outside).is_none());
    }
}
