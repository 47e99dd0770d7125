//! Reductions of the structure group to block Levi subgroups, represented as
//! complete orthogonal idempotent systems in the algebra of global
//! endomorphisms. The centerpiece is the seeded search for a finest
//! group-fixed decomposition, together with the certificates that make its
//! output checkable: equivariance, per-summand indecomposability, and
//! uniqueness up to an intertwining unit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::bundle::{split_type_via_sections, subbundle_from_idempotent, SplitType};
use crate::endo::{
    self, evaluate_at, jordan_chevalley, spectral_idempotents, ChartPoint, EndAlgebra,
    GlobalEndo, Subalgebra,
};
use crate::equivariant::{self, GammaStructure};
use crate::error::Error;
use crate::linalg::{self, Mat};
use crate::poly::SplitBudget;
use crate::scalar::Scalar;

/// A complete orthogonal system of global idempotents, i.e. a direct-sum
/// decomposition of the bundle — the computational form of a reduction of
/// structure group to a block Levi subgroup.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub idempotents: Vec<GlobalEndo>,
    pub summand_types: Vec<SplitType>,
    pub gamma_fixed: bool,
    pub labels: Vec<String>,
}

impl Decomposition {
    /// Validates the system exactly (idempotence, orthogonality,
    /// completeness), computes each summand's splitting type through its
    /// image subbundle, and checks the type multisets add up to the ambient
    /// type. `gamma` absent means the trivial group.
    pub fn new(
        exps: &[i64],
        idempotents: Vec<GlobalEndo>,
        gamma: Option<&GammaStructure>,
    ) -> Result<Self, Error> {
        if idempotents.is_empty() {
            return Err(Error::InvalidDecomposition("no idempotents".into()));
        }
        let mut total = GlobalEndo::zero(exps);
        for (i, p) in idempotents.iter().enumerate() {
            if p.exps() != exps {
                return Err(Error::ShapeMismatch("idempotent ambient type".into()));
            }
            if p.is_zero() {
                return Err(Error::InvalidDecomposition(format!("summand {i} is zero")));
            }
            if !p.mul(p).eq(p) {
                return Err(Error::NonIdempotent(format!("summand {i}")));
            }
            for (j, q) in idempotents.iter().enumerate() {
                if i != j && !p.mul(q).is_zero() {
                    return Err(Error::InvalidDecomposition(format!(
                        "summands {i} and {j} are not orthogonal"
                    )));
                }
            }
            total = total.add(p);
        }
        if !total.eq(&GlobalEndo::identity(exps)) {
            return Err(Error::InvalidDecomposition("system is not complete".into()));
        }
        let mut summand_types = vec![];
        for p in &idempotents {
            let sub = subbundle_from_idempotent(exps, p.blocks())?;
            summand_types.push(split_type_via_sections(&sub.transition)?);
        }
        let mut all: Vec<i64> = summand_types
            .iter()
            .flat_map(|t| t.exps().to_vec())
            .collect();
        all.sort_unstable_by(|a, b| b.cmp(a));
        let mut ambient = exps.to_vec();
        ambient.sort_unstable_by(|a, b| b.cmp(a));
        if all != ambient {
            return Err(Error::Internal(
                "summand types do not add up to the ambient type".into(),
            ));
        }
        let gamma_fixed = match gamma {
            None => true,
            Some(g) => {
                let mut ok = true;
                for p in &idempotents {
                    if !equivariant::is_fixed(g, p)? {
                        ok = false;
                    }
                }
                ok
            }
        };
        let labels = (0..idempotents.len()).map(|i| format!("summand-{i}")).collect();
        let mut d = Decomposition {
            idempotents,
            summand_types,
            gamma_fixed,
            labels,
        };
        d.sort_canonical();
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.idempotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idempotents.is_empty()
    }

    /// Summand ranks, largest first.
    pub fn partition(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.summand_types.iter().map(|t| t.rank()).collect();
        p.sort_unstable_by(|a, b| b.cmp(a));
        p
    }

    /// Deterministic ordering: by rank, then splitting type, then a stable
    /// key derived from the idempotent entries.
    fn sort_canonical(&mut self) {
        let mut order: Vec<usize> = (0..self.idempotents.len()).collect();
        let keys: Vec<(usize, Vec<i64>, String)> = self
            .idempotents
            .iter()
            .zip(&self.summand_types)
            .map(|(p, t)| {
                (
                    t.rank(),
                    t.exps().to_vec(),
                    format!("{:?}", p.blocks()),
                )
            })
            .collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        self.idempotents = order.iter().map(|&i| self.idempotents[i].clone()).collect();
        self.summand_types = order.iter().map(|&i| self.summand_types[i].clone()).collect();
        self.labels = (0..order.len()).map(|i| format!("summand-{i}")).collect();
    }
}

/// Equivariance certificate for a decomposition: the identity
/// C(z) pi(z) = pi(phi(z)) C(z) replayed for every idempotent and every
/// group element (symbolically in the parameter for connected groups).
#[derive(Debug, Clone)]
pub struct EquivarianceCert {
    pub equivariant: bool,
    pub failing: Vec<usize>,
}

pub fn check_equivariant(
    d: &Decomposition,
    gamma: &GammaStructure,
) -> Result<EquivarianceCert, Error> {
    let mut failing = vec![];
    for (i, p) in d.idempotents.iter().enumerate() {
        if !equivariant::is_fixed(gamma, p)? {
            failing.push(i);
        }
    }
    Ok(EquivarianceCert {
        equivariant: failing.is_empty(),
        failing,
    })
}

/// Splits the bundle along the spectral idempotents of a fixed generator.
/// The generator must be fixed by the group and have fully split spectrum.
pub fn reduction_from_generator(
    sigma: &GlobalEndo,
    gamma: &GammaStructure,
    budget: SplitBudget,
) -> Result<Decomposition, Error> {
    if !equivariant::is_fixed(gamma, sigma)? {
        return Err(Error::InvalidAction("generator is not fixed by the group".into()));
    }
    let (sigma_s, _) = jordan_chevalley(sigma, budget)?;
    let parts = spectral_idempotents(&sigma_s, budget)?;
    let idems: Vec<GlobalEndo> = parts.into_iter().map(|(_, p)| p).collect();
    Decomposition::new(sigma.exps(), idems, Some(gamma))
}

/// Per-summand minimality evidence: the corner of the fixed subalgebra at
/// the summand's idempotent, modulo its radical, must be one-dimensional.
/// `conditional` marks corners whose spectra refused to split within the
/// budget, so a finer fixed idempotent over a larger field is not excluded.
#[derive(Debug, Clone)]
pub struct IndecomposableCert {
    pub summand: usize,
    pub corner_dim: usize,
    pub radical_dim: usize,
    pub certified: bool,
    pub conditional: bool,
}

/// The corner pi * Fix * pi of the fixed subalgebra, as a spanning set.
fn fixed_corner(
    algebra: &EndAlgebra,
    fixed: &[GlobalEndo],
    pi: &GlobalEndo,
) -> Vec<GlobalEndo> {
    let mut vectors: Vec<Vec<Scalar>> = vec![];
    let mut elems: Vec<GlobalEndo> = vec![];
    for f in fixed {
        let c = pi.mul(f).mul(pi);
        if c.is_zero() {
            continue;
        }
        let v = algebra.to_coords(&c);
        if linalg::coords_in_span(&vectors, &v).is_none() {
            vectors.push(v);
            elems.push(c);
        }
    }
    elems
}

pub fn indecomposable_certificate(
    d: &Decomposition,
    i: usize,
    algebra: &EndAlgebra,
    gamma: &GammaStructure,
) -> Result<IndecomposableCert, Error> {
    let fixed = equivariant::fixed_subalgebra(algebra, gamma)?;
    corner_certificate(algebra, &fixed, &d.idempotents[i], i)
}

fn corner_certificate(
    algebra: &EndAlgebra,
    fixed: &[GlobalEndo],
    pi: &GlobalEndo,
    index: usize,
) -> Result<IndecomposableCert, Error> {
    let corner = fixed_corner(algebra, fixed, pi);
    let sub = Subalgebra::new(algebra.clone(), &corner)?;
    let rad = endo::radical(&sub)?;
    let quotient = sub.dim() - rad.len();
    Ok(IndecomposableCert {
        summand: index,
        corner_dim: sub.dim(),
        radical_dim: rad.len(),
        certified: quotient == 1,
        conditional: false,
    })
}

/// Result of the maximal-torus search: the decomposition, one
/// indecomposability certificate per summand, and any characteristic-
/// polynomial factors the bounded root search could not split (the
/// decomposition is then the finest reachable over the working field and the
/// affected certificates are conditional).
#[derive(Debug, Clone)]
pub struct TorusReduction {
    pub decomposition: Decomposition,
    pub certificates: Vec<IndecomposableCert>,
    pub unsplit: Vec<String>,
    pub seed: u64,
}

/// Finest group-fixed decomposition, by repeatedly splitting summands along
/// spectral idempotents of elements of the fixed subalgebra. The candidate
/// schedule is deterministic given the seed: corner images of the fixed
/// basis, then pairwise sums, then seeded random integer combinations with
/// coefficients bounded by `coeff_bound`.
pub fn maximal_torus_decomposition(
    algebra: &EndAlgebra,
    gamma: &GammaStructure,
    seed: u64,
    budget: SplitBudget,
    coeff_bound: i64,
) -> Result<TorusReduction, Error> {
    let exps = algebra.exps().to_vec();
    let fixed = equivariant::fixed_subalgebra(algebra, gamma)?;
    if fixed.is_empty() {
        return Err(Error::Internal("fixed subalgebra lost the identity".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut work: Vec<GlobalEndo> = vec![GlobalEndo::identity(&exps)];
    let mut done: Vec<GlobalEndo> = vec![];
    let mut unsplit: Vec<String> = vec![];
    let mut conditional_flags: Vec<bool> = vec![];
    while let Some(pi) = work.pop() {
        let corner = fixed_corner(algebra, &fixed, &pi);
        let sub = Subalgebra::new(algebra.clone(), &corner)?;
        let rad = endo::radical(&sub)?;
        if sub.dim() - rad.len() == 1 {
            done.push(pi);
            conditional_flags.push(false);
            continue;
        }
        let mut split_found = false;
        let mut saw_unsplit = false;
        let candidates = candidate_schedule(&corner, coeff_bound, &mut rng);
        for sigma in candidates {
            match try_split(&pi, &sigma, budget) {
                Ok(Some(parts)) => {
                    work.extend(parts);
                    split_found = true;
                    break;
                }
                Ok(None) => {}
                Err(Error::UnsplitSpectrum(factors)) => {
                    saw_unsplit = true;
                    for f in factors {
                        if !unsplit.contains(&f) {
                            unsplit.push(f);
                        }
                    }
                }
                Err(e) => return Err(e),
            }
        }
        if !split_found {
            if saw_unsplit {
                // finest reachable over the working field; certificate for
                // this summand will be conditional
                done.push(pi);
                conditional_flags.push(true);
            } else {
                return Err(Error::Internal(
                    "corner algebra is decomposable but no candidate split it".into(),
                ));
            }
        }
    }
    let decomposition = Decomposition::new(&exps, done.clone(), Some(gamma))?;
    if !decomposition.gamma_fixed {
        return Err(Error::Internal(
            "search produced an idempotent not fixed by the group".into(),
        ));
    }
    // re-derive certificates in the decomposition's canonical order
    let mut certificates = vec![];
    for (i, pi) in decomposition.idempotents.iter().enumerate() {
        let mut cert = corner_certificate(algebra, &fixed, pi, i)?;
        let was_conditional = done
            .iter()
            .zip(&conditional_flags)
            .any(|(p, &c)| c && p.eq(pi));
        if !cert.certified && was_conditional {
            cert.conditional = true;
        }
        if !cert.certified && !cert.conditional {
            return Err(Error::Internal(
                "terminal summand without indecomposability certificate".into(),
            ));
        }
        certificates.push(cert);
    }
    Ok(TorusReduction {
        decomposition,
        certificates,
        unsplit,
        seed,
    })
}

/// Deterministic candidate list for splitting a corner: single basis
/// elements, pairwise sums, then 64 random integer combinations.
fn candidate_schedule(
    corner: &[GlobalEndo],
    coeff_bound: i64,
    rng: &mut ChaCha20Rng,
) -> Vec<GlobalEndo> {
    let mut out: Vec<GlobalEndo> = corner.to_vec();
    for i in 0..corner.len() {
        for j in (i + 1)..corner.len() {
            out.push(corner[i].add(&corner[j]));
        }
    }
    let b = coeff_bound.max(1);
    for _ in 0..64 {
        let mut acc = GlobalEndo::zero(corner[0].exps());
        for c in corner {
            let k: i64 = rng.gen_range(-b..=b);
            if k != 0 {
                acc = acc.add(&c.scale(&Scalar::from_int(k)));
            }
        }
        if !acc.is_zero() {
            out.push(acc);
        }
    }
    out
}

/// Attempt to refine `pi` along the spectral idempotents of `sigma`
/// (an element of the corner at pi). Returns the refined pieces if there
/// are at least two, None if sigma does not separate anything.
fn try_split(
    pi: &GlobalEndo,
    sigma: &GlobalEndo,
    budget: SplitBudget,
) -> Result<Option<Vec<GlobalEndo>>, Error> {
    let (sigma_s, _) = jordan_chevalley(sigma, budget)?;
    let spectral = spectral_idempotents(&sigma_s, budget)?;
    let mut parts = vec![];
    for (_, p) in spectral {
        let piece = pi.mul(&p);
        if !piece.eq(&p.mul(pi)) {
            return Err(Error::Internal("spectral idempotent does not commute".into()));
        }
        if !piece.is_zero() {
            parts.push(piece);
        }
    }
    if parts.len() >= 2 {
        Ok(Some(parts))
    } else {
        Ok(None)
    }
}

/// The conjugacy-class data of the Levi subgroup attached to a
/// decomposition: the rank partition and a constant frame that
/// simultaneously diagonalizes the idempotents at the base point z = 0.
#[derive(Debug, Clone)]
pub struct LeviClass {
    pub partition: Vec<usize>,
    pub base_point_frame: Mat,
}

pub fn canonical_levi(d: &Decomposition) -> Result<LeviClass, Error> {
    let base = ChartPoint::Near(Scalar::zero());
    let n = d.idempotents[0].n();
    let mut columns: Vec<Vec<Scalar>> = vec![];
    let mut block_sizes = vec![];
    for p in &d.idempotents {
        let m = evaluate_at(p, &base);
        // image basis: independent columns of the evaluated idempotent
        let cols: Vec<Vec<Scalar>> = (0..n).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect();
        let basis = linalg::span_basis(&cols);
        block_sizes.push(basis.len());
        columns.extend(basis);
    }
    if columns.len() != n {
        return Err(Error::Internal("base point frame is not square".into()));
    }
    let frame: Mat = (0..n)
        .map(|i| (0..n).map(|j| columns[j][i].clone()).collect())
        .collect();
    let frame_inv = linalg::invert(&frame)
        .map_err(|_| Error::Internal("base point frame is singular".into()))?;
    // conjugation must give 0/1 diagonal matrices with the right block sizes
    let mut offset = 0usize;
    for (p, &size) in d.idempotents.iter().zip(&block_sizes) {
        let m = evaluate_at(p, &base);
        let conj = linalg::mat_mul(&linalg::mat_mul(&frame_inv, &m), &frame);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j && i >= offset && i < offset + size {
                    Scalar::one()
                } else {
                    Scalar::zero()
                };
                if conj[i][j] != want {
                    return Err(Error::Internal(
                        "frame does not diagonalize the torus".into(),
                    ));
                }
            }
        }
        offset += size;
    }
    Ok(LeviClass {
        partition: d.partition(),
        base_point_frame: frame,
    })
}

/// Injectivity of evaluation on the torus {sum lambda_i pi_i}: the
/// evaluated idempotents must be linearly independent at every sample
/// point. Returns the points checked.
pub fn torus_injectivity(d: &Decomposition) -> Result<Vec<ChartPoint>, Error> {
    let pts = vec![
        ChartPoint::Near(Scalar::zero()),
        ChartPoint::Near(Scalar::one()),
        ChartPoint::Near(Scalar::from_int(-1)),
        ChartPoint::Near(Scalar::from_int(2)),
        ChartPoint::Far(Scalar::zero()),
    ];
    for pt in &pts {
        let rows: Mat = d
            .idempotents
            .iter()
            .map(|p| {
                evaluate_at(p, pt)
                    .into_iter()
                    .flatten()
                    .collect::<Vec<Scalar>>()
            })
            .collect();
        if linalg::rank(&rows) != d.len() {
            return Err(Error::Internal(format!(
                "evaluation map on the torus is not injective at {pt:?}"
            )));
        }
    }
    Ok(pts)
}

/// An intertwining unit between two fixed maximal-torus decompositions:
/// tau with tau pi_i tau^{-1} = pi'_{match(i)}, found by Krull–Schmidt
/// matching inside the fixed subalgebra.
#[derive(Debug, Clone)]
pub struct Intertwiner {
    pub tau: GlobalEndo,
    pub tau_inv: GlobalEndo,
    pub matching: Vec<usize>,
}

pub fn intertwiner(
    d1: &Decomposition,
    d2: &Decomposition,
    algebra: &EndAlgebra,
    gamma: &GammaStructure,
    seed: u64,
) -> Result<Intertwiner, Error> {
    if d1.len() != d2.len() {
        return Err(Error::InvalidDecomposition(
            "decompositions have different summand counts".into(),
        ));
    }
    let mut t1: Vec<Vec<i64>> = d1.summand_types.iter().map(|t| t.exps().to_vec()).collect();
    let mut t2: Vec<Vec<i64>> = d2.summand_types.iter().map(|t| t.exps().to_vec()).collect();
    t1.sort();
    t2.sort();
    if t1 != t2 {
        return Err(Error::InvalidDecomposition(
            "summand type multisets differ".into(),
        ));
    }
    let fixed = equivariant::fixed_subalgebra(algebra, gamma)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let k = d1.len();
    // links[i][j] = Some((u, v)) with v u = pi_i, u v = pi'_j
    let mut links: Vec<Vec<Option<(GlobalEndo, GlobalEndo)>>> = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if d1.summand_types[i] != d2.summand_types[j] {
                continue;
            }
            links[i][j] = find_link(
                algebra,
                &fixed,
                &d1.idempotents[i],
                &d2.idempotents[j],
                &mut rng,
            )?;
        }
    }
    // bipartite matching by augmenting paths; summands that literally
    // coincide are paired first so identical inputs get the identity
    let mut match_of_j: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        for j in 0..k {
            if match_of_j[j].is_none()
                && links[i][j].is_some()
                && d1.idempotents[i].eq(&d2.idempotents[j])
            {
                match_of_j[j] = Some(i);
                break;
            }
        }
    }
    fn augment(
        i: usize,
        links: &[Vec<Option<(GlobalEndo, GlobalEndo)>>],
        seen: &mut [bool],
        match_of_j: &mut [Option<usize>],
    ) -> bool {
        for j in 0..links[i].len() {
            if links[i][j].is_some() && !seen[j] {
                seen[j] = true;
                if match_of_j[j].is_none()
                    || augment(match_of_j[j].unwrap(), links, seen, match_of_j)
                {
                    match_of_j[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..k {
        if match_of_j.iter().any(|m| *m == Some(i)) {
            continue;
        }
        let mut seen = vec![false; k];
        // protect pre-paired columns from being rewired
        for (j, m) in match_of_j.iter().enumerate() {
            if let Some(mi) = m {
                if d1.idempotents[*mi].eq(&d2.idempotents[j]) {
                    seen[j] = true;
                }
            }
        }
        if !augment(i, &links, &mut seen, &mut match_of_j) {
            // retry without the identity preference
            match_of_j = vec![None; k];
            for i2 in 0..k {
                let mut seen2 = vec![false; k];
                if !augment(i2, &links, &mut seen2, &mut match_of_j) {
                    return Err(Error::Internal(
                        "no intertwiner matching between certified decompositions".into(),
                    ));
                }
            }
            break;
        }
    }
    let mut matching = vec![0usize; k];
    for (j, &mi) in match_of_j.iter().enumerate() {
        matching[mi.unwrap()] = j;
    }
    let exps = algebra.exps();
    let mut tau = GlobalEndo::zero(exps);
    let mut tau_inv = GlobalEndo::zero(exps);
    for i in 0..k {
        let (u, v) = links[i][matching[i]].clone().unwrap();
        tau = tau.add(&u);
        tau_inv = tau_inv.add(&v);
    }
    let id = GlobalEndo::identity(exps);
    if !tau.mul(&tau_inv).eq(&id) || !tau_inv.mul(&tau).eq(&id) {
        return Err(Error::Internal("intertwiner is not a unit".into()));
    }
    for i in 0..k {
        let lhs = tau.mul(&d1.idempotents[i]).mul(&tau_inv);
        if !lhs.eq(&d2.idempotents[matching[i]]) {
            return Err(Error::Internal("intertwiner does not conjugate the system".into()));
        }
    }
    if !equivariant::is_fixed(gamma, &tau)? {
        return Err(Error::Internal("intertwiner is not fixed by the group".into()));
    }
    Ok(Intertwiner {
        tau,
        tau_inv,
        matching,
    })
}

/// Search pi'_j Fix pi_i for u invertible between the summands: u together
/// with a two-sided inverse v solving v u = pi_i, u v = pi'_j. The v-side
/// is linear in v, so each candidate u costs one linear solve.
fn find_link(
    algebra: &EndAlgebra,
    fixed: &[GlobalEndo],
    pi: &GlobalEndo,
    pi2: &GlobalEndo,
    rng: &mut ChaCha20Rng,
) -> Result<Option<(GlobalEndo, GlobalEndo)>, Error> {
    let space_u = hom_space(algebra, fixed, pi2, pi); // pi'_j Fix pi_i
    let space_v = hom_space(algebra, fixed, pi, pi2);
    if space_u.is_empty() || space_v.is_empty() {
        return Ok(None);
    }
    let mut candidates: Vec<GlobalEndo> = space_u.clone();
    for i in 0..space_u.len() {
        for j in (i + 1)..space_u.len() {
            candidates.push(space_u[i].add(&space_u[j]));
        }
    }
    for _ in 0..32 {
        let mut acc = GlobalEndo::zero(algebra.exps());
        for b in &space_u {
            let c: i64 = rng.gen_range(-5..=5);
            if c != 0 {
                acc = acc.add(&b.scale(&Scalar::from_int(c)));
            }
        }
        if !acc.is_zero() {
            candidates.push(acc);
        }
    }
    for u in candidates {
        if let Some(v) = solve_inverse(algebra, &space_v, &u, pi, pi2) {
            return Ok(Some((u, v)));
        }
    }
    Ok(None)
}

/// Span of {pi_left f pi_right : f in fixed}.
fn hom_space(
    algebra: &EndAlgebra,
    fixed: &[GlobalEndo],
    pi_left: &GlobalEndo,
    pi_right: &GlobalEndo,
) -> Vec<GlobalEndo> {
    let mut vectors: Vec<Vec<Scalar>> = vec![];
    let mut elems = vec![];
    for f in fixed {
        let c = pi_left.mul(f).mul(pi_right);
        if c.is_zero() {
            continue;
        }
        let v = algebra.to_coords(&c);
        if linalg::coords_in_span(&vectors, &v).is_none() {
            vectors.push(v);
            elems.push(c);
        }
    }
    elems
}

/// Solve v u = pi and u v = pi2 for v in the given span.
fn solve_inverse(
    algebra: &EndAlgebra,
    space_v: &[GlobalEndo],
    u: &GlobalEndo,
    pi: &GlobalEndo,
    pi2: &GlobalEndo,
) -> Option<GlobalEndo> {
    let dim = algebra.dim();
    let mut a: Mat = vec![vec![Scalar::zero(); space_v.len()]; 2 * dim];
    for (col, b) in space_v.iter().enumerate() {
        let vu = algebra.to_coords(&b.mul(u));
        let uv = algebra.to_coords(&u.mul(b));
        for r in 0..dim {
            a[r][col] = vu[r].clone();
            a[dim + r][col] = uv[r].clone();
        }
    }
    let mut rhs = algebra.to_coords(pi);
    rhs.extend(algebra.to_coords(pi2));
    let x = linalg::solve(&a, &rhs)?;
    let mut v = GlobalEndo::zero(algebra.exps());
    for (c, b) in x.iter().zip(space_v) {
        v = v.add(&b.scale(c));
    }
    Some(v)
}

/// Conjugate every idempotent by a unit of the algebra. The inverse is
/// found by a linear solve and verified two-sided.
pub fn conjugate_decomposition(
    g: &GlobalEndo,
    d: &Decomposition,
    algebra: &EndAlgebra,
    gamma: Option<&GammaStructure>,
) -> Result<Decomposition, Error> {
    let dim = algebra.dim();
    let basis = algebra.basis();
    let mut a: Mat = vec![vec![Scalar::zero(); dim]; dim];
    for (col, b) in basis.iter().enumerate() {
        let gb = algebra.to_coords(&g.mul(b));
        for r in 0..dim {
            a[r][col] = gb[r].clone();
        }
    }
    let id = GlobalEndo::identity(algebra.exps());
    let x = linalg::solve(&a, &algebra.to_coords(&id))
        .ok_or_else(|| Error::InvalidDecomposition("conjugating element is not a unit".into()))?;
    let mut g_inv = GlobalEndo::zero(algebra.exps());
    for (c, b) in x.iter().zip(&basis) {
        g_inv = g_inv.add(&b.scale(c));
    }
    if !g.mul(&g_inv).eq(&id) || !g_inv.mul(g).eq(&id) {
        return Err(Error::InvalidDecomposition(
            "conjugating element is not a two-sided unit".into(),
        ));
    }
    let idems: Vec<GlobalEndo> = d
        .idempotents
        .iter()
        .map(|p| g.mul(p).mul(&g_inv))
        .collect();
    Decomposition::new(algebra.exps(), idems, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::end_algebra;
    use crate::equivariant::{finite_closure, Mobius};
    use crate::poly::Poly;
    use crate::ratfunc::{self, RatFunc};

    fn const_mat(rows: &[&[i64]]) -> Vec<Vec<RatFunc>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|&x| RatFunc::constant(Scalar::from_int(x)))
                    .collect()
            })
            .collect()
    }

    fn swap_group() -> GammaStructure {
        finite_closure(
            vec![(Mobius::identity(), const_mat(&[&[0, 1], &[1, 0]]))],
            8,
        )
        .unwrap()
    }

    fn order_eight_group() -> GammaStructure {
        finite_closure(
            vec![
                (Mobius::identity(), const_mat(&[&[0, 1], &[1, 0]])),
                (Mobius::identity(), const_mat(&[&[1, 0], &[0, -1]])),
            ],
            16,
        )
        .unwrap()
    }

    fn coordinate_projectors(exps: &[i64]) -> Decomposition {
        let n = exps.len();
        let idems: Vec<GlobalEndo> = (0..n)
            .map(|i| {
                let blocks = (0..n)
                    .map(|r| {
                        (0..n)
                            .map(|c| {
                                if r == i && c == i {
                                    Poly::one()
                                } else {
                                    Poly::zero()
                                }
                            })
                            .collect()
                    })
                    .collect();
                GlobalEndo::new(exps.to_vec(), blocks).unwrap()
            })
            .collect();
        Decomposition::new(exps, idems, None).unwrap()
    }

    #[test]
    fn order_eight_has_eight_elements() {
        let GammaStructure::Finite { elements, .. } = order_eight_group() else {
            unreachable!()
        };
        assert_eq!(elements.len(), 8);
    }

    #[test]
    fn trivial_group_fixes_any_decomposition() {
        let d = coordinate_projectors(&[0, 0]);
        let cert = check_equivariant(&d, &GammaStructure::trivial(2)).unwrap();
        assert!(cert.equivariant);
    }

    #[test]
    fn swap_moves_coordinate_projectors() {
        let d = coordinate_projectors(&[0, 0]);
        let cert = check_equivariant(&d, &swap_group()).unwrap();
        assert!(!cert.equivariant);
        assert_eq!(cert.failing.len(), 2);
    }

    #[test]
    fn eigenprojectors_of_swap_are_fixed() {
        // projectors onto span(e1 + e2) and span(e1 - e2)
        let half = Scalar::from_rat(crate::scalar::rat(1, 2));
        let p_plus = GlobalEndo::new(
            vec![0, 0],
            vec![
                vec![Poly::constant(half.clone()), Poly::constant(half.clone())],
                vec![Poly::constant(half.clone()), Poly::constant(half.clone())],
            ],
        )
        .unwrap();
        let p_minus = GlobalEndo::identity(&[0, 0]).sub(&p_plus);
        let d = Decomposition::new(&[0, 0], vec![p_plus, p_minus], Some(&swap_group())).unwrap();
        assert!(d.gamma_fixed);
        let cert = check_equivariant(&d, &swap_group()).unwrap();
        assert!(cert.equivariant);
    }

    #[test]
    fn generator_reduction_constant_diagonal() {
        let sigma = GlobalEndo::new(
            vec![0, 0],
            vec![
                vec![Poly::from_ints(&[1]), Poly::zero()],
                vec![Poly::zero(), Poly::from_ints(&[2])],
            ],
        )
        .unwrap();
        let d = reduction_from_generator(&sigma, &GammaStructure::trivial(2), SplitBudget::default())
            .unwrap();
        assert_eq!(d.partition(), vec![1, 1]);
    }

    #[test]
    fn generator_reduction_scalar_is_single_block() {
        let sigma = GlobalEndo::scalar(&[1, 0], &Scalar::from_int(3));
        let d = reduction_from_generator(&sigma, &GammaStructure::trivial(2), SplitBudget::default())
            .unwrap();
        assert_eq!(d.partition(), vec![2]);
    }

    #[test]
    fn generator_reduction_triangular_on_mixed_type() {
        // [[1, z], [0, 2]] on O(1) + O: rank-1 summands of types {1} and {0}
        let sigma = GlobalEndo::new(
            vec![1, 0],
            vec![
                vec![Poly::from_ints(&[1]), Poly::from_ints(&[0, 1])],
                vec![Poly::zero(), Poly::from_ints(&[2])],
            ],
        )
        .unwrap();
        let d = reduction_from_generator(&sigma, &GammaStructure::trivial(2), SplitBudget::default())
            .unwrap();
        assert_eq!(d.partition(), vec![1, 1]);
        let mut types: Vec<Vec<i64>> =
            d.summand_types.iter().map(|t| t.exps().to_vec()).collect();
        types.sort();
        assert_eq!(types, vec![vec![0], vec![1]]);
    }

    #[test]
    fn torus_decomposition_trivial_group_full_splitting() {
        for exps in [vec![0, 0], vec![1, 0], vec![2, 1, 1]] {
            let alg = end_algebra(&exps);
            let red = maximal_torus_decomposition(
                &alg,
                &GammaStructure::trivial(exps.len()),
                0,
                SplitBudget::default(),
                5,
            )
            .unwrap();
            assert_eq!(red.decomposition.partition(), vec![1; exps.len()]);
            assert!(red.unsplit.is_empty());
            assert!(red.certificates.iter().all(|c| c.certified));
        }
    }

    #[test]
    fn torus_decomposition_swap_two_lines() {
        let alg = end_algebra(&[0, 0]);
        let red =
            maximal_torus_decomposition(&alg, &swap_group(), 0, SplitBudget::default(), 5)
                .unwrap();
        assert_eq!(red.decomposition.partition(), vec![1, 1]);
        assert!(red.decomposition.gamma_fixed);
    }

    #[test]
    fn torus_decomposition_order_eight_is_rigid() {
        let alg = end_algebra(&[0, 0]);
        let red = maximal_torus_decomposition(
            &alg,
            &order_eight_group(),
            0,
            SplitBudget::default(),
            5,
        )
        .unwrap();
        assert_eq!(red.decomposition.partition(), vec![2]);
        assert!(red.certificates[0].certified);
        assert_eq!(red.certificates[0].corner_dim, 1);
    }

    #[test]
    fn whole_bundle_block_not_certified_for_trivial_group() {
        let alg = end_algebra(&[0, 0]);
        let d = Decomposition::new(&[0, 0], vec![GlobalEndo::identity(&[0, 0])], None).unwrap();
        let cert =
            indecomposable_certificate(&d, 0, &alg, &GammaStructure::trivial(2)).unwrap();
        assert!(!cert.certified);
        assert_eq!(cert.corner_dim, 4);
    }

    #[test]
    fn canonical_levi_of_swap_decomposition() {
        let alg = end_algebra(&[0, 0]);
        let red =
            maximal_torus_decomposition(&alg, &swap_group(), 0, SplitBudget::default(), 5)
                .unwrap();
        let levi = canonical_levi(&red.decomposition).unwrap();
        assert_eq!(levi.partition, vec![1, 1]);
    }

    #[test]
    fn torus_injectivity_on_coordinate_system() {
        let d = coordinate_projectors(&[1, 0]);
        assert!(torus_injectivity(&d).is_ok());
    }

    #[test]
    fn intertwiner_identity_case() {
        let alg = end_algebra(&[0, 0]);
        let d = coordinate_projectors(&[0, 0]);
        let tw = intertwiner(&d, &d, &alg, &GammaStructure::trivial(2), 0).unwrap();
        assert_eq!(tw.matching, vec![0, 1]);
    }

    #[test]
    fn intertwiner_between_coordinate_and_eigen_systems() {
        let exps = vec![1, 1];
        let alg = end_algebra(&exps);
        let d1 = coordinate_projectors(&exps);
        let half = Scalar::from_rat(crate::scalar::rat(1, 2));
        let p_plus = GlobalEndo::new(
            exps.clone(),
            vec![
                vec![Poly::constant(half.clone()), Poly::constant(half.clone())],
                vec![Poly::constant(half.clone()), Poly::constant(half.clone())],
            ],
        )
        .unwrap();
        let p_minus = GlobalEndo::identity(&exps).sub(&p_plus);
        let d2 = Decomposition::new(&exps, vec![p_plus, p_minus], None).unwrap();
        let tw = intertwiner(&d1, &d2, &alg, &GammaStructure::trivial(2), 0).unwrap();
        for i in 0..2 {
            let lhs = tw.tau.mul(&d1.idempotents[i]).mul(&tw.tau_inv);
            assert!(lhs.eq(&d2.idempotents[tw.matching[i]]));
        }
    }

    #[test]
    fn two_seeds_agree_up_to_intertwiner() {
        let alg = end_algebra(&[1, 0, 0]);
        let g = GammaStructure::trivial(3);
        let r1 = maximal_torus_decomposition(&alg, &g, 1, SplitBudget::default(), 5).unwrap();
        let r2 = maximal_torus_decomposition(&alg, &g, 2, SplitBudget::default(), 5).unwrap();
        let tw = intertwiner(&r1.decomposition, &r2.decomposition, &alg, &g, 0).unwrap();
        assert_eq!(tw.matching.len(), 3);
    }

    #[test]
    fn conjugation_by_identity_is_noop() {
        let alg = end_algebra(&[0, 0]);
        let d = coordinate_projectors(&[0, 0]);
        let d2 =
            conjugate_decomposition(&GlobalEndo::identity(&[0, 0]), &d, &alg, None).unwrap();
        assert_eq!(d2.len(), 2);
        for (p, q) in d.idempotents.iter().zip(&d2.idempotents) {
            assert!(p.eq(q));
        }
    }

    #[test]
    fn conjugation_by_non_fixed_unit_breaks_equivariance() {
        let alg = end_algebra(&[0, 0]);
        let g = swap_group();
        let red =
            maximal_torus_decomposition(&alg, &g, 0, SplitBudget::default(), 5).unwrap();
        let unit = GlobalEndo::new(
            vec![0, 0],
            vec![
                vec![Poly::from_ints(&[1]), Poly::zero()],
                vec![Poly::zero(), Poly::from_ints(&[2])],
            ],
        )
        .unwrap();
        let d2 = conjugate_decomposition(&unit, &red.decomposition, &alg, Some(&g)).unwrap();
        assert!(!d2.gamma_fixed);
        let cert = check_equivariant(&d2, &g).unwrap();
        assert!(!cert.equivariant);
    }

    #[test]
    fn merging_summands_is_splittable() {
        // refinement monotonicity, seen from the other side: the union of two
        // rank-1 summands of the trivial-group run admits a splitting
        // idempotent (namely either one of them)
        let alg = end_algebra(&[1, 0]);
        let g = GammaStructure::trivial(2);
        let red = maximal_torus_decomposition(&alg, &g, 0, SplitBudget::default(), 5).unwrap();
        let merged = red.decomposition.idempotents[0].add(&red.decomposition.idempotents[1]);
        assert!(merged.mul(&merged).eq(&merged));
        let fixed = equivariant::fixed_subalgebra(&alg, &g).unwrap();
        let corner = fixed_corner(&alg, &fixed, &merged);
        let sub = Subalgebra::new(alg.clone(), &corner).unwrap();
        let rad = endo::radical(&sub).unwrap();
        assert!(sub.dim() - rad.len() > 1);
    }

    #[test]
    fn unsplit_spectrum_reported_not_fatal() {
        // a group whose fixed algebra forces an unsplit quadratic: conjugate
        // the swap by [[1,1],[0,1]]... simpler: group generated by
        // [[1,2],[1,0]] has eigenvalues 1 ± sqrt(3)? Use a direct fixed
        // element instead: trivial group, but a tight budget cannot split a
        // generic element — exercised at the reduction_from_generator level.
        let sigma = GlobalEndo::new(
            vec![0, 0],
            vec![
                vec![Poly::from_ints(&[0]), Poly::from_ints(&[2])],
                vec![Poly::from_ints(&[1]), Poly::from_ints(&[0])],
            ],
        )
        .unwrap();
        let tight = SplitBudget { height: 1, conductor_max: 3 };
        let err = reduction_from_generator(&sigma, &GammaStructure::trivial(2), tight)
            .unwrap_err();
        assert!(matches!(err, Error::UnsplitSpectrum(_)));
    }

    #[test]
    fn partition_invariant_under_fixed_conjugation() {
        let alg = end_algebra(&[0, 0]);
        let g = swap_group();
        let red = maximal_torus_decomposition(&alg, &g, 0, SplitBudget::default(), 5).unwrap();
        // a fixed unit: 2 * identity + swap (eigenvalues 3, 1 — invertible)
        let swap = GlobalEndo::new(
            vec![0, 0],
            vec![
                vec![Poly::zero(), Poly::one()],
                vec![Poly::one(), Poly::zero()],
            ],
        )
        .unwrap();
        let unit = GlobalEndo::scalar(&[0, 0], &Scalar::from_int(2)).add(&swap);
        let d2 = conjugate_decomposition(&unit, &red.decomposition, &alg, Some(&g)).unwrap();
        assert!(d2.gamma_fixed);
        assert_eq!(d2.partition(), red.decomposition.partition());
    }

    #[test]
    fn rm_helpers_available() {
        // keep the import shape honest
        let m = ratfunc::rm_identity(2);
        assert!(ratfunc::rm_is_zero(&ratfunc::rm_sub(&m, &m)));
    }
}
