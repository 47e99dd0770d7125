//! Structure of the automorphism group of a split bundle: the unipotent
//! radical of strictly degree-raising endomorphisms, the reductive quotient
//! (one GL(m_d) per distinct splitting degree), the projection psi onto the
//! quotient, and the classification of how a one-parameter group acts on the
//! quotient.

use crate::endo::{EndAlgebra, GlobalEndo};
use crate::equivariant::{self, GammaStructure};
use crate::error::Error;
use crate::linalg::{self, Mat};
use crate::scalar::Scalar;

/// The radical / quotient split of the endomorphism algebra of a split
/// bundle: radical = blocks raising the degree strictly, quotient = the
/// constant block-diagonal part, a product of GL(m_d) over distinct degrees.
#[derive(Debug, Clone)]
pub struct LeviQuotientData {
    pub exps: Vec<i64>,
    /// (degree, multiplicity), degrees descending.
    pub distinct_degrees: Vec<(i64, usize)>,
    pub radical_basis: Vec<GlobalEndo>,
    pub quotient_basis: Vec<GlobalEndo>,
}

impl LeviQuotientData {
    pub fn radical_dim(&self) -> usize {
        self.radical_basis.len()
    }

    pub fn quotient_dim(&self) -> usize {
        self.quotient_basis.len()
    }
}

pub fn levi_quotient(algebra: &EndAlgebra) -> Result<LeviQuotientData, Error> {
    let exps = algebra.exps().to_vec();
    let mut distinct_degrees: Vec<(i64, usize)> = vec![];
    for &a in &exps {
        match distinct_degrees.iter_mut().find(|(d, _)| *d == a) {
            Some((_, m)) => *m += 1,
            None => distinct_degrees.push((a, 1)),
        }
    }
    distinct_degrees.sort_unstable_by(|x, y| y.0.cmp(&x.0));
    let mut radical_basis = vec![];
    let mut quotient_basis = vec![];
    for b in algebra.basis() {
        // each basis element lives in a single block (i, j)
        let (i, j) = block_of(&b).ok_or_else(|| Error::Internal("empty basis element".into()))?;
        if exps[i] > exps[j] {
            radical_basis.push(b);
        } else if exps[i] == exps[j] {
            quotient_basis.push(b);
        } else {
            return Err(Error::Internal("degree-lowering basis element".into()));
        }
    }
    let sq: usize = distinct_degrees.iter().map(|(_, m)| m * m).sum();
    if radical_basis.len() + sq != algebra.dim() || quotient_basis.len() != sq {
        return Err(Error::Internal("radical/quotient dimensions do not add up".into()));
    }
    // radical elements must be nilpotent
    for r in &radical_basis {
        if !r.is_nilpotent() {
            return Err(Error::Internal("radical element is not nilpotent".into()));
        }
    }
    Ok(LeviQuotientData {
        exps,
        distinct_degrees,
        radical_basis,
        quotient_basis,
    })
}

fn block_of(sigma: &GlobalEndo) -> Option<(usize, usize)> {
    let n = sigma.n();
    for i in 0..n {
        for j in 0..n {
            if !sigma.entry(i, j).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Projection onto the Levi quotient: keep the same-degree diagonal blocks
/// (which are constant by the degree bounds), drop the radical part.
pub fn psi(sigma: &GlobalEndo) -> GlobalEndo {
    let exps = sigma.exps();
    let n = sigma.n();
    let blocks = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if exps[i] == exps[j] {
                        sigma.entry(i, j).clone()
                    } else {
                        crate::poly::Poly::zero()
                    }
                })
                .collect()
        })
        .collect();
    GlobalEndo::new(exps.to_vec(), blocks).expect("projection keeps degree bounds")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Trivial,
    TorusFactoring,
    NontrivialNonTorus,
    HypothesisNotMet,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Trivial => "trivial",
            Verdict::TorusFactoring => "torus-factoring",
            Verdict::NontrivialNonTorus => "nontrivial-non-torus",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ActionClassification {
    pub verdict: Verdict,
    pub evidence: Vec<String>,
}

/// How the group acts on the Levi quotient through psi. Finite groups fall
/// outside the hypothesis (the statement needs a connected group). The
/// multiplicative group is itself a torus, so its action always factors
/// through one; weights are reported when the induced map is diagonal on
/// the block basis. The additive group has no nontrivial torus quotient, so
/// a nontrivial induced action cannot factor through a torus.
pub fn classify_action_on_levi_quotient(
    l: &LeviQuotientData,
    gamma: &GammaStructure,
) -> Result<ActionClassification, Error> {
    match gamma {
        GammaStructure::Finite { elements, .. } => Ok(ActionClassification {
            verdict: Verdict::HypothesisNotMet,
            evidence: vec![format!(
                "group of order {} is finite, not connected",
                elements.len()
            )],
        }),
        GammaStructure::OneParamMult { .. } => {
            let m2 = induced_matrix(l, gamma, &Scalar::from_int(2))?;
            let m3 = induced_matrix(l, gamma, &Scalar::from_int(3))?;
            let mut evidence = vec![];
            match (diagonal_weights(&m2, 2), diagonal_weights(&m3, 3)) {
                (Some(w2), Some(w3)) if w2 == w3 => {
                    evidence.push(format!("weights on the quotient basis: {:?}", w2));
                }
                _ => {
                    evidence.push(
                        "induced map not diagonal on the block basis; group is a torus".into(),
                    );
                }
            }
            Ok(ActionClassification {
                verdict: Verdict::TorusFactoring,
                evidence,
            })
        }
        GammaStructure::OneParamAdd { lift, .. } => {
            // the induced-map entries are polynomial in t of bounded degree;
            // identity at enough sample parameters decides triviality exactly
            let n = l.exps.len() as i64;
            let dt = lift
                .entries
                .iter()
                .flatten()
                .flat_map(|p| p.terms().map(|(e, _)| e[crate::mpoly::VAR_T]))
                .max()
                .unwrap_or(0);
            let spread = l.exps.iter().max().unwrap_or(&0) - l.exps.iter().min().unwrap_or(&0);
            let samples = (n * dt + spread + 2).max(3);
            let k = l.quotient_dim();
            for s in 1..=samples {
                let t0 = Scalar::from_int(s);
                let m = induced_matrix(l, gamma, &t0)?;
                for (col, b) in l.quotient_basis.iter().enumerate() {
                    let want = quotient_coords(l, b)?;
                    let got: Vec<Scalar> = (0..k).map(|r| m[r][col].clone()).collect();
                    if got != want {
                        let (i, j) = block_of(b).unwrap();
                        return Ok(ActionClassification {
                            verdict: Verdict::NontrivialNonTorus,
                            evidence: vec![format!(
                                "block basis element ({i},{j}) is moved at t = {s}"
                            )],
                        });
                    }
                }
            }
            Ok(ActionClassification {
                verdict: Verdict::Trivial,
                evidence: vec![format!(
                    "induced map is the identity at {samples} parameters, \
                     exceeding its degree bound"
                )],
            })
        }
    }
}

/// Matrix of psi(act_t(.)) on the quotient basis at a parameter value.
fn induced_matrix(
    l: &LeviQuotientData,
    gamma: &GammaStructure,
    t0: &Scalar,
) -> Result<Mat, Error> {
    let k = l.quotient_dim();
    let mut m = vec![vec![Scalar::zero(); k]; k];
    for (col, b) in l.quotient_basis.iter().enumerate() {
        let moved = psi(&equivariant::act_param(gamma, t0, b)?);
        let coords = quotient_coords(l, &moved)?;
        for r in 0..k {
            m[r][col] = coords[r].clone();
        }
    }
    Ok(m)
}

/// Coordinates of a quotient element in the block basis.
fn quotient_coords(l: &LeviQuotientData, sigma: &GlobalEndo) -> Result<Vec<Scalar>, Error> {
    let vectors: Vec<Vec<Scalar>> = l
        .quotient_basis
        .iter()
        .map(|b| vectorize(b))
        .collect();
    linalg::coords_in_span(&vectors, &vectorize(sigma))
        .ok_or_else(|| Error::Internal("projection left the quotient".into()))
}

fn vectorize(sigma: &GlobalEndo) -> Vec<Scalar> {
    let n = sigma.n();
    let mut v = vec![];
    for i in 0..n {
        for j in 0..n {
            let p = sigma.entry(i, j);
            let d = p.degree().unwrap_or(0);
            for c in 0..=d {
                v.push(p.coeff(c));
            }
        }
    }
    v
}

/// Integer weights if the matrix is diagonal with entries base^w.
fn diagonal_weights(m: &Mat, base: i64) -> Option<Vec<i64>> {
    let k = m.len();
    let mut weights = vec![];
    for i in 0..k {
        for j in 0..k {
            if i != j && !m[i][j].is_zero() {
                return None;
            }
        }
        let v = &m[i][i];
        let mut found = None;
        for w in -24..=24i64 {
            let candidate = if w >= 0 {
                Scalar::from_int(base).pow(w as u32)
            } else {
                Scalar::from_int(base).pow((-w) as u32).inv().ok()?
            };
            if *v == candidate {
                found = Some(w);
                break;
            }
        }
        weights.push(found?);
    }
    Some(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::end_algebra;
    use crate::mpoly::{MPoly, MPolyMatrix, VAR_T};

    #[test]
    fn balanced_type_has_no_radical() {
        let l = levi_quotient(&end_algebra(&[0, 0])).unwrap();
        assert_eq!(l.radical_dim(), 0);
        assert_eq!(l.quotient_dim(), 4);
        assert_eq!(l.distinct_degrees, vec![(0, 2)]);
    }

    #[test]
    fn mixed_type_radical_count() {
        let l = levi_quotient(&end_algebra(&[1, 0])).unwrap();
        assert_eq!(l.radical_dim(), 2);
        assert_eq!(l.quotient_dim(), 2);
        assert_eq!(l.distinct_degrees, vec![(1, 1), (0, 1)]);
    }

    #[test]
    fn repeated_degree_type() {
        let l = levi_quotient(&end_algebra(&[2, 1, 1])).unwrap();
        assert_eq!(l.radical_dim(), 4);
        assert_eq!(l.quotient_dim(), 5);
        assert_eq!(l.distinct_degrees, vec![(2, 1), (1, 2)]);
    }

    #[test]
    fn psi_multiplicative_on_units() {
        use crate::poly::Poly;
        // two units of End(O(1) + O): invertible diagonal plus radical junk
        let u = GlobalEndo::new(
            vec![1, 0],
            vec![
                vec![Poly::from_ints(&[2]), Poly::from_ints(&[1, 3])],
                vec![Poly::zero(), Poly::from_ints(&[5])],
            ],
        )
        .unwrap();
        let v = GlobalEndo::new(
            vec![1, 0],
            vec![
                vec![Poly::from_ints(&[7]), Poly::from_ints(&[0, -2])],
                vec![Poly::zero(), Poly::from_ints(&[1])],
            ],
        )
        .unwrap();
        assert!(psi(&u.mul(&v)).eq(&psi(&u).mul(&psi(&v))));
    }

    #[test]
    fn finite_group_outside_hypothesis() {
        let l = levi_quotient(&end_algebra(&[0, 0])).unwrap();
        let c = classify_action_on_levi_quotient(&l, &GammaStructure::trivial(2)).unwrap();
        assert_eq!(c.verdict, Verdict::HypothesisNotMet);
    }

    #[test]
    fn multiplicative_diagonal_lift_factors_through_torus() {
        let mut lift = MPolyMatrix::identity(2);
        lift.entries[0][0] = MPoly::var(VAR_T);
        let g = GammaStructure::OneParamMult { q: 0, lift };
        let l = levi_quotient(&end_algebra(&[0, 0])).unwrap();
        let c = classify_action_on_levi_quotient(&l, &g).unwrap();
        assert_eq!(c.verdict, Verdict::TorusFactoring);
        assert!(c.evidence[0].contains("weights"));
    }

    #[test]
    fn multiplicative_base_scaling_on_mixed_type() {
        let lift = MPolyMatrix::identity(2);
        let g = GammaStructure::OneParamMult { q: 1, lift };
        let l = levi_quotient(&end_algebra(&[1, 0])).unwrap();
        let c = classify_action_on_levi_quotient(&l, &g).unwrap();
        assert_eq!(c.verdict, Verdict::TorusFactoring);
    }

    #[test]
    fn unipotent_lift_is_nontrivial_non_torus() {
        let mut lift = MPolyMatrix::identity(2);
        lift.entries[0][1] = MPoly::var(VAR_T);
        let g = GammaStructure::OneParamAdd { moves_base: false, lift };
        let l = levi_quotient(&end_algebra(&[0, 0])).unwrap();
        let c = classify_action_on_levi_quotient(&l, &g).unwrap();
        assert_eq!(c.verdict, Verdict::NontrivialNonTorus);
    }

    #[test]
    fn trivial_additive_lift_acts_trivially() {
        let lift = MPolyMatrix::identity(2);
        let g = GammaStructure::OneParamAdd { moves_base: true, lift };
        let l = levi_quotient(&end_algebra(&[0, 0])).unwrap();
        let c = classify_action_on_levi_quotient(&l, &g).unwrap();
        assert_eq!(c.verdict, Verdict::Trivial);
    }
}
