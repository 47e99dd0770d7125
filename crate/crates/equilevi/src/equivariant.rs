//! Group actions on the line lifted to a split bundle: finite groups given by
//! a full element table with rational lift matrices, and the two
//! one-parameter families (multiplicative and additive), handled symbolically
//! in the parameter. Everything is validated by replaying the defining
//! identities exactly; validation failures are reported, not panicked.

use crate::endo::{EndAlgebra, GlobalEndo};
use crate::error::Error;
use crate::laurent::LaurentPoly;
use crate::linalg;
use crate::mpoly::{MPoly, MPolyMatrix, VAR_S, VAR_T, VAR_Z};
use crate::poly::Poly;
use crate::ratfunc::{self, compose_poly, RatFunc, RatMat};
use crate::scalar::Scalar;

/// A fractional-linear map z -> (a z + b)/(c z + d), determinant nonzero.
#[derive(Debug, Clone)]
pub struct Mobius {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl Mobius {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self, Error> {
        let det = a.mul(&d).sub(&b.mul(&c));
        if det.is_zero() {
            return Err(Error::InvalidAction("degenerate fractional-linear map".into()));
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity() -> Self {
        Mobius {
            a: Scalar::one(),
            b: Scalar::zero(),
            c: Scalar::zero(),
            d: Scalar::one(),
        }
    }

    pub fn scaling(factor: Scalar) -> Result<Self, Error> {
        Mobius::new(factor, Scalar::zero(), Scalar::zero(), Scalar::one())
    }

    pub fn compose(&self, other: &Mobius) -> Mobius {
        // matrix product: (self o other)
        Mobius {
            a: self.a.mul(&other.a).add(&self.b.mul(&other.c)),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.d)),
            c: self.c.mul(&other.a).add(&self.d.mul(&other.c)),
            d: self.c.mul(&other.b).add(&self.d.mul(&other.d)),
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        }
    }

    /// Equality as maps (projective equality of the matrices).
    pub fn same_map(&self, other: &Mobius) -> bool {
        let cross = |x: &Scalar, y: &Scalar, u: &Scalar, v: &Scalar| {
            x.mul(v).sub(&y.mul(u)).is_zero()
        };
        cross(&self.a, &other.a, &self.b, &other.b)
            && cross(&self.a, &other.a, &self.c, &other.c)
            && cross(&self.a, &other.a, &self.d, &other.d)
            && cross(&self.b, &other.b, &self.c, &other.c)
            && cross(&self.b, &other.b, &self.d, &other.d)
            && cross(&self.c, &other.c, &self.d, &other.d)
    }

    pub fn is_identity(&self) -> bool {
        self.same_map(&Mobius::identity())
    }

    /// As a rational function of the chart coordinate.
    pub fn as_ratfunc(&self) -> RatFunc {
        let num = Poly::from_coeffs(vec![self.b.clone(), self.a.clone()]);
        let den = Poly::from_coeffs(vec![self.d.clone(), self.c.clone()]);
        RatFunc::new(num, den).expect("nonzero denominator row")
    }

    /// Image of a point, reported in whichever chart contains it.
    pub fn apply(&self, x: &crate::endo::ChartPoint) -> crate::endo::ChartPoint {
        use crate::endo::ChartPoint;
        let (num, den) = match x {
            ChartPoint::Near(z) => (
                self.a.mul(z).add(&self.b),
                self.c.mul(z).add(&self.d),
            ),
            ChartPoint::Far(w) => (
                self.a.add(&self.b.mul(w)),
                self.c.add(&self.d.mul(w)),
            ),
        };
        if den.is_zero() {
            ChartPoint::Far(Scalar::zero())
        } else {
            let v = num.div(&den).expect("nonzero denominator");
            ChartPoint::Near(v)
        }
    }
}

/// One element of a finite acting group: base map plus the chart-0 lift,
/// a square matrix of rational functions of z.
#[derive(Debug, Clone)]
pub struct FiniteElement {
    pub label: String,
    pub mobius: Mobius,
    pub lift: RatMat,
}

/// The group data. Finite groups carry a complete multiplication table
/// (table[i][j] = index of element_i * element_j). One-parameter kinds carry
/// a single symbolic lift in the variables (t, z).
#[derive(Debug, Clone)]
pub enum GammaStructure {
    Finite {
        elements: Vec<FiniteElement>,
        table: Vec<Vec<usize>>,
    },
    /// phi_t(z) = t^q z; lift entries polynomial in z, Laurent in t.
    OneParamMult { q: i64, lift: MPolyMatrix },
    /// phi_t(z) = z + t when `moves_base`, else the base action is trivial;
    /// lift entries polynomial in t and z.
    OneParamAdd { moves_base: bool, lift: MPolyMatrix },
}

impl GammaStructure {
    pub fn rank(&self) -> usize {
        match self {
            GammaStructure::Finite { elements, .. } => {
                elements.first().map_or(0, |e| e.lift.len())
            }
            GammaStructure::OneParamMult { lift, .. } => lift.n,
            GammaStructure::OneParamAdd { lift, .. } => lift.n,
        }
    }

    pub fn trivial(n: usize) -> Self {
        GammaStructure::Finite {
            elements: vec![FiniteElement {
                label: "e".into(),
                mobius: Mobius::identity(),
                lift: ratfunc::rm_identity(n),
            }],
            table: vec![vec![0]],
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GammaStructure::Finite { .. })
    }
}

/// Outcome of `validate_action`: a list of failed identities, empty on
/// success. Hard shape errors still surface as Err.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every defining identity of the action against the split type
/// `exps` (lifts are given in split coordinates on chart 0):
/// identity element, table closure, the cocycle law
/// C_{gh}(z) = C_g(phi_h(z)) C_h(z), and regularity + invertibility of the
/// lift transported to the far chart through diag(z^{a_i}).
pub fn validate_action(exps: &[i64], gamma: &GammaStructure) -> Result<ValidationReport, Error> {
    let n = exps.len();
    if gamma.rank() != n {
        return Err(Error::ShapeMismatch(format!(
            "lift rank {} vs bundle rank {}",
            gamma.rank(),
            n
        )));
    }
    let mut rep = ValidationReport::default();
    match gamma {
        GammaStructure::Finite { elements, table } => {
            validate_finite(exps, elements, table, &mut rep)?;
        }
        GammaStructure::OneParamMult { q, lift } => {
            validate_one_param(exps, lift, OneParamKind::Mult(*q), &mut rep)?;
        }
        GammaStructure::OneParamAdd { moves_base, lift } => {
            validate_one_param(exps, lift, OneParamKind::Add(*moves_base), &mut rep)?;
        }
    }
    Ok(rep)
}

fn validate_finite(
    exps: &[i64],
    elements: &[FiniteElement],
    table: &[Vec<usize>],
    rep: &mut ValidationReport,
) -> Result<(), Error> {
    let n = exps.len();
    let m = elements.len();
    if table.len() != m || table.iter().any(|r| r.len() != m) {
        return Err(Error::ShapeMismatch("multiplication table shape".into()));
    }
    if table.iter().flatten().any(|&k| k >= m) {
        return Err(Error::ShapeMismatch("table index out of range".into()));
    }
    for e in elements {
        if e.lift.len() != n || e.lift.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!("lift shape for {}", e.label)));
        }
    }
    // identity element: identity map and identity lift
    let id_idx = (0..m).find(|&i| {
        elements[i].mobius.is_identity()
            && ratfunc::rm_is_zero(&ratfunc::rm_sub(
                &elements[i].lift,
                &ratfunc::rm_identity(n),
            ))
    });
    let Some(id_idx) = id_idx else {
        rep.failures.push("no identity element with identity lift".into());
        return Ok(());
    };
    for i in 0..m {
        if table[id_idx][i] != i || table[i][id_idx] != i {
            rep.failures
                .push(format!("identity row/column broken at {}", elements[i].label));
        }
    }
    // Latin square (each element appears once per row and column)
    for i in 0..m {
        let mut row: Vec<usize> = table[i].clone();
        let mut col: Vec<usize> = (0..m).map(|r| table[r][i]).collect();
        row.sort_unstable();
        col.sort_unstable();
        if row != (0..m).collect::<Vec<_>>() || col != (0..m).collect::<Vec<_>>() {
            rep.failures
                .push(format!("table row/column at {} is not a permutation", elements[i].label));
        }
    }
    // base maps compose per the table
    for i in 0..m {
        for j in 0..m {
            let composed = elements[i].mobius.compose(&elements[j].mobius);
            if !composed.same_map(&elements[table[i][j]].mobius) {
                rep.failures.push(format!(
                    "base maps: {} * {} != {}",
                    elements[i].label,
                    elements[j].label,
                    elements[table[i][j]].label
                ));
            }
        }
    }
    // cocycle law C_{gh}(z) = C_g(phi_h(z)) C_h(z)
    for i in 0..m {
        for j in 0..m {
            let phi_j = elements[j].mobius.as_ratfunc();
            let ci_at = ratfunc::rm_compose(&elements[i].lift, &phi_j);
            let lhs = ratfunc::rm_mul(&ci_at, &elements[j].lift);
            let rhs = &elements[table[i][j]].lift;
            if !ratfunc::rm_is_zero(&ratfunc::rm_sub(&lhs, rhs)) {
                rep.failures.push(format!(
                    "cocycle law fails for ({}, {})",
                    elements[i].label, elements[j].label
                ));
            }
        }
    }
    // chart coverage: each element must be regular and invertible wherever a
    // chart frame is responsible for it
    for e in elements {
        frame_regularity(exps, e, rep)?;
    }
    Ok(())
}

/// Regularity of one finite element in all four chart frames. The chart-0
/// frame must be fine at every finite z except phi^{-1}(infinity); the points
/// it misses are checked in the transported frames pointwise.
fn frame_regularity(
    exps: &[i64],
    e: &FiniteElement,
    rep: &mut ValidationReport,
) -> Result<(), Error> {
    let det = ratfunc::rm_det(&e.lift);
    if det.is_zero() {
        rep.failures
            .push(format!("lift of {} is singular", e.label));
        return Ok(());
    }
    // allowed singular point of the chart-0 frame: z with phi(z) = infinity,
    // i.e. the root of cz + d
    let pole = if e.mobius.c.is_zero() {
        None
    } else {
        Some(e.mobius.d.div(&e.mobius.c)?.neg())
    };
    let only_allowed = |p: &Poly| -> bool {
        // all roots of p at the allowed point: p == lead * (z - pole)^deg
        match p.degree() {
            None | Some(0) => true,
            Some(d) => match &pole {
                None => false,
                Some(r) => {
                    let lin = Poly::linear(r);
                    let model = lin.pow(d).scale(p.leading().unwrap());
                    *p == model
                }
            },
        }
    };
    for (i, row) in e.lift.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if !only_allowed(entry.den()) {
                rep.failures.push(format!(
                    "lift of {} has a pole at a finite in-chart point (entry {i},{j})",
                    e.label
                ));
            }
        }
    }
    if !only_allowed(det.num()) || !only_allowed(det.den()) {
        rep.failures.push(format!(
            "lift of {} degenerates at a finite in-chart point",
            e.label
        ));
    }
    // far-chart frames, checked pointwise at the points they own
    let n = exps.len();
    let d_of = |arg: &RatFunc| -> RatMat {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i != j {
                            return RatFunc::zero();
                        }
                        let k = exps[i];
                        if k >= 0 {
                            let mut p = RatFunc::one();
                            for _ in 0..k {
                                p = p.mul(arg);
                            }
                            p
                        } else {
                            let mut p = RatFunc::one();
                            let inv = arg.inv().expect("nonzero chart coordinate");
                            for _ in 0..-k {
                                p = p.mul(&inv);
                            }
                            p
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let w = RatFunc::from_poly(Poly::x());
    let inv_w = w.inv()?;
    let phi = e.mobius.as_ratfunc();
    let phi_far = phi.compose(&inv_w); // phi(1/w) as function of w
    let check_at = |mat: &RatMat, pt: &Scalar, what: &str, rep: &mut ValidationReport| {
        for row in mat {
            for entry in row {
                if !entry.regular_at(pt) {
                    rep.failures
                        .push(format!("{} frame of {} has a pole", what, e.label));
                    return;
                }
            }
        }
        let ev = ratfunc::rm_eval(mat, pt).expect("regular entries");
        if linalg::invert(&ev).is_err() {
            rep.failures
                .push(format!("{} frame of {} is singular", what, e.label));
        }
    };
    // source = infinity (w = 0)
    let c_far_src = ratfunc::rm_compose(&e.lift, &inv_w);
    let d_far = d_of(&inv_w);
    if e.mobius.c.is_zero() {
        // phi(inf) = inf: frame infinity -> infinity
        let d_target_inv = ratfunc::rm_inv(&d_of(&phi_far))?;
        let b = ratfunc::rm_mul(&ratfunc::rm_mul(&d_target_inv, &c_far_src), &d_far);
        check_at(&b, &Scalar::zero(), "far-to-far", rep);
    } else {
        // phi(inf) = a/c, finite: frame infinity -> near chart
        let m1 = ratfunc::rm_mul(&c_far_src, &d_far);
        check_at(&m1, &Scalar::zero(), "far-to-near", rep);
    }
    // source finite with phi(source) = infinity
    if let Some(p) = pole {
        let d_target_inv = ratfunc::rm_inv(&d_of(&phi.inv()?))?;
        let m2 = ratfunc::rm_mul(&d_target_inv, &e.lift);
        check_at(&m2, &p, "near-to-far", rep);
    }
    Ok(())
}

enum OneParamKind {
    Mult(i64),
    Add(bool),
}

fn validate_one_param(
    exps: &[i64],
    lift: &MPolyMatrix,
    kind: OneParamKind,
    rep: &mut ValidationReport,
) -> Result<(), Error> {
    let n = exps.len();
    if lift.n != n {
        return Err(Error::ShapeMismatch("one-parameter lift rank".into()));
    }
    // entries use only the variables (t, z), polynomial in z
    for (i, row) in lift.entries.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            for (exp, _) in entry.terms() {
                if exp[VAR_S] != 0 {
                    return Err(Error::ShapeMismatch(format!(
                        "lift entry ({i},{j}) uses a reserved variable"
                    )));
                }
                if exp[VAR_Z] < 0 {
                    rep.failures
                        .push(format!("lift entry ({i},{j}) is not polynomial in z"));
                }
                if matches!(kind, OneParamKind::Add(_)) && exp[VAR_T] < 0 {
                    rep.failures
                        .push(format!("lift entry ({i},{j}) is not polynomial in t"));
                }
            }
        }
    }
    if !rep.failures.is_empty() {
        return Ok(());
    }
    // identity parameter gives the identity lift
    let id_val = match kind {
        OneParamKind::Mult(_) => Scalar::one(),
        OneParamKind::Add(_) => Scalar::zero(),
    };
    let at_id = lift.map_entries(|p| p.eval_var(VAR_T, &id_val))?;
    let id_ok = (0..n).all(|i| {
        (0..n).all(|j| {
            let want = if i == j { MPoly::one() } else { MPoly::zero() };
            at_id.entries[i][j] == want
        })
    });
    if !id_ok {
        rep.failures.push("lift at the identity parameter is not the identity".into());
    }
    // parameter law: C_{t*s}(z) = C_t(phi_s(z)) C_s(z), resp. t+s
    let c_s = lift.map_entries(|p| Ok(p.rename_var(VAR_T, VAR_S)))?;
    let (lhs, c_t_moved) = match kind {
        OneParamKind::Mult(q) => {
            let lhs = lift.map_entries(|p| p.monomial_subst(VAR_T, [1, 1, 0], &Scalar::one()))?;
            let moved =
                lift.map_entries(|p| p.monomial_subst(VAR_Z, [0, q, 1], &Scalar::one()))?;
            (lhs, moved)
        }
        OneParamKind::Add(moves_base) => {
            let lhs = lift.map_entries(|p| p.shift_subst(VAR_T, VAR_S))?;
            let moved = if moves_base {
                lift.map_entries(|p| p.shift_subst(VAR_Z, VAR_S))?
            } else {
                lift.clone()
            };
            (lhs, moved)
        }
    };
    let rhs = c_t_moved.mul(&c_s);
    if !lhs.sub(&rhs).is_zero() {
        rep.failures.push("parameter law fails symbolically".into());
    }
    // invertibility for every parameter and chart-0 point: the determinant
    // must be free of z, and a unit in t (monomial for the multiplicative
    // kind, constant for the additive kind)
    let det = lift.det();
    let mut det_ok = !det.is_zero();
    let mut seen: Vec<[i64; 3]> = vec![];
    for (exp, _) in det.terms() {
        if exp[VAR_Z] != 0 {
            det_ok = false;
        }
        if matches!(kind, OneParamKind::Add(_)) && exp[VAR_T] != 0 {
            det_ok = false;
        }
        seen.push(*exp);
    }
    if matches!(kind, OneParamKind::Mult(_)) && seen.len() > 1 {
        det_ok = false; // must be c * t^k
    }
    if !det_ok {
        rep.failures
            .push("lift determinant is not a unit for all (t, z)".into());
    }
    // far-chart regularity: per t-coefficient, deg_z of entry (i,j) at most
    // a_i - a_j, and the top-coefficient matrix is invertible for all t
    let mut top = MPolyMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let entry = &lift.entries[i][j];
            let bound = exps[i] - exps[j];
            let mut topc = MPoly::zero();
            let mut bad = false;
            for (exp, c) in entry.terms() {
                if exp[VAR_Z] > bound {
                    bad = true;
                } else if exp[VAR_Z] == bound {
                    let mut e2 = *exp;
                    e2[VAR_Z] = 0;
                    topc = topc.add(&MPoly::monomial(e2, c.clone()));
                }
            }
            if bad {
                rep.failures.push(format!(
                    "entry ({i},{j}) breaks the far-chart degree bound"
                ));
            }
            top.entries[i][j] = topc;
        }
    }
    if rep.failures.is_empty() {
        let top_det = top.det();
        let mut ok = !top_det.is_zero();
        let terms: Vec<[i64; 3]> = top_det.terms().map(|(e, _)| *e).collect();
        for e in &terms {
            if e[VAR_Z] != 0 || e[VAR_S] != 0 {
                ok = false;
            }
            if matches!(kind, OneParamKind::Add(_)) && e[VAR_T] != 0 {
                ok = false;
            }
        }
        if matches!(kind, OneParamKind::Mult(_)) && terms.len() > 1 {
            ok = false;
        }
        if !ok {
            rep.failures
                .push("transported lift is singular at the far chart origin".into());
        }
    }
    Ok(())
}

/// The action of one finite element on a global endomorphism:
/// (g . sigma)(z) = C(u) sigma(u) C(u)^{-1} with u = phi^{-1}(z).
pub fn act_finite(e: &FiniteElement, sigma: &GlobalEndo) -> Result<GlobalEndo, Error> {
    let u = e.mobius.inverse().as_ratfunc();
    let n = sigma.n();
    let c_at_u = ratfunc::rm_compose(&e.lift, &u);
    let c_inv = ratfunc::rm_inv(&c_at_u)?;
    let sigma_at_u: RatMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| compose_poly(sigma.entry(i, j), &u))
                .collect()
        })
        .collect();
    let out = ratfunc::rm_mul(&ratfunc::rm_mul(&c_at_u, &sigma_at_u), &c_inv);
    ratmat_to_endo(sigma.exps(), &out)
}

/// The action of a one-parameter element at a concrete parameter value.
pub fn act_param(
    gamma: &GammaStructure,
    t0: &Scalar,
    sigma: &GlobalEndo,
) -> Result<GlobalEndo, Error> {
    let (lift, u): (RatMat, RatFunc) = match gamma {
        GammaStructure::OneParamMult { q, lift } => {
            if t0.is_zero() {
                return Err(Error::InvalidAction("parameter zero is not in the group".into()));
            }
            let c = mpoly_matrix_at(lift, t0)?;
            // u = phi^{-1}(z) = t0^{-q} z
            let factor = if *q >= 0 {
                t0.inv()?.pow(*q as u32)
            } else {
                t0.pow((-*q) as u32)
            };
            let u = RatFunc::from_poly(Poly::from_coeffs(vec![Scalar::zero(), factor]));
            (c, u)
        }
        GammaStructure::OneParamAdd { moves_base, lift } => {
            let c = mpoly_matrix_at(lift, t0)?;
            let u = if *moves_base {
                RatFunc::from_poly(Poly::from_coeffs(vec![t0.neg(), Scalar::one()]))
            } else {
                RatFunc::from_poly(Poly::x())
            };
            (c, u)
        }
        GammaStructure::Finite { .. } => {
            return Err(Error::InvalidAction(
                "parameter action on a finite group".into(),
            ))
        }
    };
    let n = sigma.n();
    let c_at_u = ratfunc::rm_compose(&lift, &u);
    let c_inv = ratfunc::rm_inv(&c_at_u)?;
    let sigma_at_u: RatMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| compose_poly(sigma.entry(i, j), &u))
                .collect()
        })
        .collect();
    let out = ratfunc::rm_mul(&ratfunc::rm_mul(&c_at_u, &sigma_at_u), &c_inv);
    ratmat_to_endo(sigma.exps(), &out)
}

fn mpoly_matrix_at(lift: &MPolyMatrix, t0: &Scalar) -> Result<RatMat, Error> {
    lift.entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| {
                    let at = p.eval_var(VAR_T, t0)?;
                    let lp = at.as_laurent_in(VAR_Z).ok_or_else(|| {
                        Error::Internal("unexpected variable in evaluated lift".into())
                    })?;
                    Ok(laurent_to_rf(&lp))
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect()
}

fn laurent_to_rf(lp: &LaurentPoly) -> RatFunc {
    let shift = lp.min_exp().unwrap_or(0).min(0);
    let num = lp.shift(-shift).to_poly().expect("nonnegative exponents");
    let mut den = Poly::one();
    for _ in 0..(-shift) {
        den = den.mul(&Poly::x());
    }
    RatFunc::new(num, den).expect("nonzero denominator")
}

fn ratmat_to_endo(exps: &[i64], m: &RatMat) -> Result<GlobalEndo, Error> {
    let blocks: Vec<Vec<Poly>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    e.as_polynomial().ok_or_else(|| {
                        Error::InvalidAction(
                            "action result is not a global endomorphism".into(),
                        )
                    })
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    GlobalEndo::new(exps.to_vec(), blocks)
}

/// Close a set of generators (base map + lift) into a full finite group
/// structure with multiplication table. Bails out past `max_order`.
pub fn finite_closure(
    gens: Vec<(Mobius, RatMat)>,
    max_order: usize,
) -> Result<GammaStructure, Error> {
    let n = gens
        .first()
        .map(|(_, l)| l.len())
        .ok_or_else(|| Error::InvalidAction("no generators".into()))?;
    let same = |a: &(Mobius, RatMat), b: &(Mobius, RatMat)| -> bool {
        a.0.same_map(&b.0) && ratfunc::rm_is_zero(&ratfunc::rm_sub(&a.1, &b.1))
    };
    let compose = |a: &(Mobius, RatMat), b: &(Mobius, RatMat)| -> (Mobius, RatMat) {
        let phi = a.0.compose(&b.0);
        let lift = ratfunc::rm_mul(&ratfunc::rm_compose(&a.1, &b.0.as_ratfunc()), &b.1);
        (phi, lift)
    };
    let mut elems: Vec<(Mobius, RatMat)> = vec![(Mobius::identity(), ratfunc::rm_identity(n))];
    for g in &gens {
        if !elems.iter().any(|e| same(e, g)) {
            elems.push(g.clone());
        }
    }
    // close under products
    loop {
        let mut added = false;
        let snapshot = elems.clone();
        for a in &snapshot {
            for b in &snapshot {
                let p = compose(a, b);
                if !elems.iter().any(|e| same(e, &p)) {
                    elems.push(p);
                    added = true;
                    if elems.len() > max_order {
                        return Err(Error::InvalidAction(format!(
                            "group closure exceeds {max_order} elements"
                        )));
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    let m = elems.len();
    let mut table = vec![vec![0usize; m]; m];
    for i in 0..m {
        for j in 0..m {
            let p = compose(&elems[i], &elems[j]);
            table[i][j] = elems
                .iter()
                .position(|e| same(e, &p))
                .ok_or_else(|| Error::Internal("closure is not closed".into()))?;
        }
    }
    let elements = elems
        .into_iter()
        .enumerate()
        .map(|(k, (mobius, lift))| FiniteElement {
            label: format!("g{k}"),
            mobius,
            lift,
        })
        .collect();
    Ok(GammaStructure::Finite { elements, table })
}

/// Whether a single endomorphism is fixed by the whole group, via the linear
/// invariance identity C(z) sigma(z) = sigma(phi(z)) C(z).
pub fn is_fixed(gamma: &GammaStructure, sigma: &GlobalEndo) -> Result<bool, Error> {
    match gamma {
        GammaStructure::Finite { elements, .. } => Ok(elements
            .iter()
            .all(|e| ratfunc::rm_is_zero(&finite_invariance_residual(e, sigma)))),
        GammaStructure::OneParamMult { q, lift } => {
            Ok(one_param_residual(lift, sigma, &OneParamKind::Mult(*q))?.is_zero())
        }
        GammaStructure::OneParamAdd { moves_base, lift } => {
            Ok(one_param_residual(lift, sigma, &OneParamKind::Add(*moves_base))?.is_zero())
        }
    }
}

/// Basis of the fixed subalgebra of the endomorphism algebra. Fixedness is
/// the linear identity C(z) sigma(z) = sigma(phi(z)) C(z) — no inverses —
/// imposed for every group element (finite kind) or symbolically in the
/// parameter (one-parameter kinds, where it characterizes invariance under
/// the connected group).
pub fn fixed_subalgebra(
    algebra: &EndAlgebra,
    gamma: &GammaStructure,
) -> Result<Vec<GlobalEndo>, Error> {
    let basis = algebra.basis();
    let dim = basis.len();
    let mut rows: Vec<Vec<Scalar>> = vec![];
    match gamma {
        GammaStructure::Finite { elements, .. } => {
            for e in elements {
                if e.mobius.is_identity()
                    && ratfunc::rm_is_zero(&ratfunc::rm_sub(
                        &e.lift,
                        &ratfunc::rm_identity(algebra.exps().len()),
                    ))
                {
                    continue;
                }
                let residuals: Vec<RatMat> = basis
                    .iter()
                    .map(|b| finite_invariance_residual(e, b))
                    .collect();
                append_rational_constraints(&residuals, dim, &mut rows)?;
            }
        }
        GammaStructure::OneParamMult { q, lift } => {
            let residuals: Vec<MPolyMatrix> = basis
                .iter()
                .map(|b| one_param_residual(lift, b, &OneParamKind::Mult(*q)))
                .collect::<Result<Vec<_>, _>>()?;
            append_mpoly_constraints(&residuals, dim, &mut rows);
        }
        GammaStructure::OneParamAdd { moves_base, lift } => {
            let residuals: Vec<MPolyMatrix> = basis
                .iter()
                .map(|b| one_param_residual(lift, b, &OneParamKind::Add(*moves_base)))
                .collect::<Result<Vec<_>, _>>()?;
            append_mpoly_constraints(&residuals, dim, &mut rows);
        }
    }
    let coords = if rows.is_empty() {
        let mut all = vec![];
        for i in 0..dim {
            let mut v = vec![Scalar::zero(); dim];
            v[i] = Scalar::one();
            all.push(v);
        }
        all
    } else {
        linalg::nullspace(&rows)
    };
    let fixed: Vec<GlobalEndo> = coords
        .iter()
        .map(|v| {
            let mut acc = GlobalEndo::zero(algebra.exps());
            for (c, b) in v.iter().zip(&basis) {
                acc = acc.add(&b.scale(c));
            }
            acc
        })
        .collect();
    Ok(fixed)
}

/// C(z) sigma(z) - sigma(phi(z)) C(z) as a rational matrix.
fn finite_invariance_residual(e: &FiniteElement, sigma: &GlobalEndo) -> RatMat {
    let n = sigma.n();
    let phi = e.mobius.as_ratfunc();
    let sigma_rm: RatMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| RatFunc::from_poly(sigma.entry(i, j).clone()))
                .collect()
        })
        .collect();
    let sigma_phi: RatMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| compose_poly(sigma.entry(i, j), &phi))
                .collect()
        })
        .collect();
    ratfunc::rm_sub(
        &ratfunc::rm_mul(&e.lift, &sigma_rm),
        &ratfunc::rm_mul(&sigma_phi, &e.lift),
    )
}

/// C_t(z) sigma(z) - sigma(phi_t(z)) C_t(z) in the symbolic parameter.
fn one_param_residual(
    lift: &MPolyMatrix,
    sigma: &GlobalEndo,
    kind: &OneParamKind,
) -> Result<MPolyMatrix, Error> {
    let n = sigma.n();
    let sigma_mp = MPolyMatrix::new(
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| MPoly::from_z_laurent(&LaurentPoly::from_poly(sigma.entry(i, j))))
                    .collect()
            })
            .collect(),
    )?;
    // sigma(phi_t(z)): z -> t^q z, resp. z -> z + t
    let sigma_moved = match kind {
        OneParamKind::Mult(q) => {
            sigma_mp.map_entries(|p| p.monomial_subst(VAR_Z, [*q, 0, 1], &Scalar::one()))?
        }
        OneParamKind::Add(moves) => {
            if *moves {
                sigma_mp.map_entries(|p| p.shift_subst(VAR_Z, VAR_T))?
            } else {
                sigma_mp.clone()
            }
        }
    };
    let lhs = lift.mul(&sigma_mp);
    let rhs = sigma_moved.mul(lift);
    Ok(lhs.sub(&rhs))
}

/// Turn per-basis rational residual matrices into scalar constraint rows:
/// an element sum x_k b_k is fixed iff every numerator coefficient of the
/// combined residual vanishes.
fn append_rational_constraints(
    residuals: &[RatMat],
    dim: usize,
    rows: &mut Vec<Vec<Scalar>>,
) -> Result<(), Error> {
    if residuals.is_empty() {
        return Ok(());
    }
    let n = residuals[0].len();
    for i in 0..n {
        for j in 0..n {
            // common denominator across the basis for this entry
            let mut common = Poly::one();
            for r in residuals {
                let den = r[i][j].den();
                let g = common.gcd(den)?;
                common = common.mul(&den.div_exact(&g)?);
            }
            let nums: Vec<Poly> = residuals
                .iter()
                .map(|r| {
                    let scale = common.div_exact(r[i][j].den())?;
                    Ok(r[i][j].num().mul(&scale))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let max_deg = nums.iter().filter_map(|p| p.degree()).max();
            let Some(max_deg) = max_deg else { continue };
            for c in 0..=max_deg {
                let row: Vec<Scalar> = (0..dim).map(|k| nums[k].coeff(c)).collect();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    Ok(())
}

fn append_mpoly_constraints(residuals: &[MPolyMatrix], dim: usize, rows: &mut Vec<Vec<Scalar>>) {
    if residuals.is_empty() {
        return;
    }
    let n = residuals[0].n;
    for i in 0..n {
        for j in 0..n {
            // collect every monomial exponent appearing in any residual
            let mut exps: Vec<[i64; 3]> = vec![];
            for r in residuals {
                for (e, _) in r.entries[i][j].terms() {
                    if !exps.contains(e) {
                        exps.push(*e);
                    }
                }
            }
            exps.sort_unstable();
            for e in exps {
                let row: Vec<Scalar> = residuals
                    .iter()
                    .map(|r| {
                        r.entries[i][j]
                            .terms()
                            .find(|(ex, _)| **ex == e)
                            .map(|(_, c)| c.clone())
                            .unwrap_or_else(Scalar::zero)
                    })
                    .collect();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let _ = dim;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::end_algebra;

    fn const_lift(rows: &[&[i64]]) -> RatMat {
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|&x| RatFunc::constant(Scalar::from_int(x)))
                    .collect()
            })
            .collect()
    }

    fn z2_swap_on_trivial() -> GammaStructure {
        GammaStructure::Finite {
            elements: vec![
                FiniteElement {
                    label: "e".into(),
                    mobius: Mobius::identity(),
                    lift: const_lift(&[&[1, 0], &[0, 1]]),
                },
                FiniteElement {
                    label: "s".into(),
                    mobius: Mobius::new(
                        Scalar::from_int(-1),
                        Scalar::zero(),
                        Scalar::zero(),
                        Scalar::one(),
                    )
                    .unwrap(),
                    lift: const_lift(&[&[0, 1], &[1, 0]]),
                },
            ],
            table: vec![vec![0, 1], vec![1, 0]],
        }
    }

    #[test]
    fn swap_action_is_valid() {
        let rep = validate_action(&[0, 0], &z2_swap_on_trivial()).unwrap();
        assert!(rep.is_valid(), "{:?}", rep.failures);
    }

    #[test]
    fn broken_involution_rejected() {
        let mut g = z2_swap_on_trivial();
        if let GammaStructure::Finite { elements, .. } = &mut g {
            elements[1].lift = const_lift(&[&[1, 1], &[0, 1]]);
        }
        let rep = validate_action(&[0, 0], &g).unwrap();
        assert!(!rep.is_valid());
        assert!(rep.failures.iter().any(|f| f.contains("cocycle")));
    }

    #[test]
    fn swap_acts_on_diagonal() {
        let g = z2_swap_on_trivial();
        let GammaStructure::Finite { elements, .. } = &g else { unreachable!() };
        let sigma = GlobalEndo::new(
            vec![0, 0],
            vec![
                vec![Poly::from_ints(&[3]), Poly::zero()],
                vec![Poly::zero(), Poly::from_ints(&[5])],
            ],
        )
        .unwrap();
        let moved = act_finite(&elements[1], &sigma).unwrap();
        assert_eq!(moved.entry(0, 0), &Poly::from_ints(&[5]));
        assert_eq!(moved.entry(1, 1), &Poly::from_ints(&[3]));
    }

    #[test]
    fn identity_acts_trivially() {
        let g = z2_swap_on_trivial();
        let GammaStructure::Finite { elements, .. } = &g else { unreachable!() };
        let alg = end_algebra(&[0, 0]);
        for b in alg.basis() {
            assert_eq!(act_finite(&elements[0], &b).unwrap(), b);
        }
    }

    #[test]
    fn fixed_subalgebra_of_swap() {
        let alg = end_algebra(&[0, 0]);
        let fixed = fixed_subalgebra(&alg, &z2_swap_on_trivial()).unwrap();
        assert_eq!(fixed.len(), 2);
        // identity and the swap matrix span the fixed space
        let id = GlobalEndo::identity(&[0, 0]);
        let vectors: Vec<Vec<Scalar>> = fixed.iter().map(|f| alg.to_coords(f)).collect();
        assert!(linalg::coords_in_span(&vectors, &alg.to_coords(&id)).is_some());
    }

    #[test]
    fn trivial_group_fixes_everything() {
        let alg = end_algebra(&[1, 0]);
        let fixed = fixed_subalgebra(&alg, &GammaStructure::trivial(2)).unwrap();
        assert_eq!(fixed.len(), alg.dim());
    }

    #[test]
    fn one_param_mult_scaling_valid() {
        // C_t = diag(1, 1) on type (1, 0) with phi_t(z) = t z
        let lift = MPolyMatrix::identity(2);
        let g = GammaStructure::OneParamMult { q: 1, lift };
        let rep = validate_action(&[1, 0], &g).unwrap();
        assert!(rep.is_valid(), "{:?}", rep.failures);
    }

    #[test]
    fn one_param_mult_weighted_lift() {
        // C_t = diag(t, 1) with trivial base: a torus inside the gauge group
        let mut lift = MPolyMatrix::identity(2);
        lift.entries[0][0] = MPoly::var(VAR_T);
        let g = GammaStructure::OneParamMult { q: 0, lift };
        let rep = validate_action(&[0, 0], &g).unwrap();
        assert!(rep.is_valid(), "{:?}", rep.failures);
        // fixed subalgebra: diagonal matrices only
        let alg = end_algebra(&[0, 0]);
        let fixed = fixed_subalgebra(&alg, &g).unwrap();
        assert_eq!(fixed.len(), 2);
    }

    #[test]
    fn one_param_add_unipotent() {
        // C_t = [[1, t], [0, 1]] with trivial base on O + O
        let mut lift = MPolyMatrix::identity(2);
        lift.entries[0][1] = MPoly::var(VAR_T);
        let g = GammaStructure::OneParamAdd { moves_base: false, lift };
        let rep = validate_action(&[0, 0], &g).unwrap();
        assert!(rep.is_valid(), "{:?}", rep.failures);
        let alg = end_algebra(&[0, 0]);
        let fixed = fixed_subalgebra(&alg, &g).unwrap();
        // centralizer of the unipotent: span{identity, E12}
        assert_eq!(fixed.len(), 2);
    }

    #[test]
    fn one_param_broken_law_rejected() {
        // C_t = [[1, t^2], [0, 1]] fails C_{t+s} = C_t C_s
        let mut lift = MPolyMatrix::identity(2);
        lift.entries[0][1] = MPoly::var(VAR_T).mul(&MPoly::var(VAR_T));
        let g = GammaStructure::OneParamAdd { moves_base: false, lift };
        let rep = validate_action(&[0, 0], &g).unwrap();
        assert!(!rep.is_valid());
    }

    #[test]
    fn group_action_law_on_table() {
        let g = z2_swap_on_trivial();
        let GammaStructure::Finite { elements, table } = &g else { unreachable!() };
        let alg = end_algebra(&[0, 0]);
        for b in alg.basis() {
            for i in 0..2 {
                for j in 0..2 {
                    let lhs = act_finite(&elements[table[i][j]], &b).unwrap();
                    let rhs =
                        act_finite(&elements[i], &act_finite(&elements[j], &b).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn char_poly_preserved_by_action() {
        use crate::endo::char_poly;
        let g = z2_swap_on_trivial();
        let GammaStructure::Finite { elements, .. } = &g else { unreachable!() };
        let sigma = GlobalEndo::new(
            vec![0, 0],
            vec![
                vec![Poly::from_ints(&[1]), Poly::from_ints(&[2])],
                vec![Poly::from_ints(&[0]), Poly::from_ints(&[4])],
            ],
        )
        .unwrap();
        let moved = act_finite(&elements[1], &sigma).unwrap();
        assert_eq!(char_poly(&sigma).unwrap().0, char_poly(&moved).unwrap().0);
    }

    #[test]
    fn mobius_on_points() {
        use crate::endo::ChartPoint;
        // z -> 1/z swaps the charts
        let inv = Mobius::new(Scalar::zero(), Scalar::one(), Scalar::one(), Scalar::zero())
            .unwrap();
        assert_eq!(
            inv.apply(&ChartPoint::Near(Scalar::from_int(2))),
            ChartPoint::Near(Scalar::from_rat(crate::scalar::rat(1, 2)))
        );
        assert_eq!(
            inv.apply(&ChartPoint::Near(Scalar::zero())),
            ChartPoint::Far(Scalar::zero())
        );
    }
}
