//! End-to-end pipelines behind the command surface, and the reports they
//! emit. Reports are canonical JSON (sorted keys, scalars as strings) and
//! embed enough witness data for `verify` to replay every certificate with
//! exact arithmetic and no re-search.

use serde_json::{json, Map, Value};

use crate::bundle::{birkhoff_split, SplitBundle};
use crate::endo::{end_algebra, EndAlgebra, GlobalEndo};
use crate::equivariant::{self, FiniteElement, GammaStructure};
use crate::error::Error;
use crate::instance::{self, Instance};
use crate::laurent::{LaurentMatrix, LaurentPoly};
use crate::levi::{self, Decomposition, TorusReduction};
use crate::mpoly::{MPoly, MPolyMatrix, VAR_T, VAR_Z};
use crate::poly::{Poly, SplitBudget};
use crate::quotients;
use crate::ratfunc::{self, RatFunc, RatMat};
use crate::scalar::Scalar;

/// A finished run: the report plus the process exit code it implies.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Value,
    pub exit_code: i32,
}

pub fn canonical_string(report: &Value) -> String {
    // serde_json maps are ordered; pretty output is canonical per input
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn budget_of(inst: &Instance) -> SplitBudget {
    SplitBudget {
        height: 6,
        conductor_max: inst.options.conductor_max,
    }
}

// ---------------------------------------------------------------------------
// frame transport: group lifts are specified in the bundle's own chart-0
// frame; the algebra work happens in the split frame s -> left(z) s

fn laurent_to_rf(lp: &LaurentPoly) -> RatFunc {
    let shift = lp.min_exp().unwrap_or(0).min(0);
    let num = lp.shift(-shift).to_poly().expect("nonnegative exponents");
    let mut den = Poly::one();
    for _ in 0..(-shift) {
        den = den.mul(&Poly::x());
    }
    RatFunc::new(num, den).expect("nonzero denominator")
}

fn laurent_matrix_to_ratmat(m: &LaurentMatrix) -> RatMat {
    m.entries
        .iter()
        .map(|row| row.iter().map(laurent_to_rf).collect())
        .collect()
}

/// Inverse of a z-polynomial matrix with constant nonzero determinant,
/// again polynomial: adjugate over the scalar determinant.
fn poly_matrix_inverse_mp(m: &MPolyMatrix) -> Result<MPolyMatrix, Error> {
    let det = m
        .det()
        .as_constant()
        .ok_or_else(|| Error::Internal("witness determinant is not constant".into()))?;
    let det_inv = det.inv()?;
    let n = m.n;
    let mut adj = vec![vec![MPoly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            // cofactor C_ji for the adjugate
            let minor: Vec<Vec<MPoly>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| m.entries[r][c].clone())
                        .collect()
                })
                .collect();
            let md = MPolyMatrix::new(minor)?.det();
            let sign = if (i + j) % 2 == 0 {
                Scalar::one()
            } else {
                Scalar::from_int(-1)
            };
            adj[i][j] = md.scale(&sign.mul(&det_inv));
        }
    }
    MPolyMatrix::new(adj)
}

fn laurent_matrix_to_mp(m: &LaurentMatrix) -> Result<MPolyMatrix, Error> {
    let entries = m
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    if e.min_exp().map_or(false, |x| x < 0) {
                        return Err(Error::Internal("witness has negative exponents".into()));
                    }
                    Ok(MPoly::from_z_laurent(e))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    MPolyMatrix::new(entries)
}

/// Rewrites the lifts into the split frame: C^(z) = left(phi(z)) C(z)
/// left(z)^{-1}. The left witness is z-polynomial with constant unit
/// determinant, so everything stays polynomial.
pub fn gamma_in_split_frame(
    gamma: &GammaStructure,
    split: &SplitBundle,
) -> Result<GammaStructure, Error> {
    let left_rm = laurent_matrix_to_ratmat(&split.left);
    let left_inv_rm = ratfunc::rm_inv(&left_rm)?;
    match gamma {
        GammaStructure::Finite { elements, table } => {
            let elements = elements
                .iter()
                .map(|e| {
                    let left_phi = ratfunc::rm_compose(&left_rm, &e.mobius.as_ratfunc());
                    let lift =
                        ratfunc::rm_mul(&ratfunc::rm_mul(&left_phi, &e.lift), &left_inv_rm);
                    Ok(FiniteElement {
                        label: e.label.clone(),
                        mobius: e.mobius.clone(),
                        lift,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(GammaStructure::Finite {
                elements,
                table: table.clone(),
            })
        }
        GammaStructure::OneParamMult { q, lift } => {
            let left_mp = laurent_matrix_to_mp(&split.left)?;
            let left_inv = poly_matrix_inverse_mp(&left_mp)?;
            // left(t^q z)
            let left_phi =
                left_mp.map_entries(|p| p.monomial_subst(VAR_Z, [*q, 0, 1], &Scalar::one()))?;
            let lift = left_phi.mul(lift).mul(&left_inv);
            Ok(GammaStructure::OneParamMult { q: *q, lift })
        }
        GammaStructure::OneParamAdd { moves_base, lift } => {
            let left_mp = laurent_matrix_to_mp(&split.left)?;
            let left_inv = poly_matrix_inverse_mp(&left_mp)?;
            let left_phi = if *moves_base {
                left_mp.map_entries(|p| p.shift_subst(VAR_Z, VAR_T))?
            } else {
                left_mp
            };
            let lift = left_phi.mul(lift).mul(&left_inv);
            Ok(GammaStructure::OneParamAdd {
                moves_base: *moves_base,
                lift,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// endomorphism serialization: block grids of coefficient lists

pub fn endo_to_json(sigma: &GlobalEndo) -> Value {
    Value::Array(
        sigma
            .blocks()
            .iter()
            .map(|row| Value::Array(row.iter().map(instance::poly_to_json).collect()))
            .collect(),
    )
}

pub fn endo_from_json(exps: &[i64], v: &Value) -> Result<GlobalEndo, Error> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("endomorphism must be a block grid".into()))?;
    let blocks = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("endomorphism row must be an array".into()))?
                .iter()
                .map(instance::poly_from_json)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    GlobalEndo::new(exps.to_vec(), blocks)
}

// ---------------------------------------------------------------------------
// split

pub fn run_split(inst: &Instance) -> Result<RunOutcome, Error> {
    let split = birkhoff_split(&inst.bundle)?;
    split.verify()?;
    let report = json!({
        "command": "split",
        "instance": inst.name,
        "rank": inst.bundle.rank(),
        "degree": inst.bundle.degree(),
        "type": split.split_type.exps(),
        "witness": {
            "left": instance::laurent_matrix_to_json(&split.left),
            "right": instance::laurent_matrix_to_json(&split.right),
        },
        "verified": true,
    });
    Ok(RunOutcome {
        report,
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// aut: validate the action and report the fixed subalgebra

pub fn run_aut(inst: &Instance) -> Result<RunOutcome, Error> {
    let split = birkhoff_split(&inst.bundle)?;
    let gamma = inst
        .gamma
        .clone()
        .unwrap_or_else(|| GammaStructure::trivial(inst.bundle.rank()));
    let gamma = gamma_in_split_frame(&gamma, &split)?;
    let exps = split.split_type.exps().to_vec();
    let validation = equivariant::validate_action(&exps, &gamma)?;
    let mut report = Map::new();
    report.insert("command".into(), json!("aut"));
    report.insert("instance".into(), json!(inst.name));
    report.insert("type".into(), json!(exps));
    report.insert("valid".into(), json!(validation.is_valid()));
    report.insert("failures".into(), json!(validation.failures));
    let exit_code = if validation.is_valid() {
        let algebra = end_algebra(&exps);
        let fixed = equivariant::fixed_subalgebra(&algebra, &gamma)?;
        report.insert("algebra_dimension".into(), json!(algebra.dim()));
        report.insert("fixed_dimension".into(), json!(fixed.len()));
        report.insert(
            "fixed_basis".into(),
            Value::Array(fixed.iter().map(endo_to_json).collect()),
        );
        0
    } else {
        1
    };
    Ok(RunOutcome {
        report: Value::Object(report),
        exit_code,
    })
}

// ---------------------------------------------------------------------------
// reduce

pub struct ReducePipeline {
    pub split: SplitBundle,
    pub gamma: GammaStructure,
    pub algebra: EndAlgebra,
    pub reduction: TorusReduction,
}

pub fn reduce_pipeline(inst: &Instance) -> Result<ReducePipeline, Error> {
    let split = birkhoff_split(&inst.bundle)?;
    let gamma = inst
        .gamma
        .clone()
        .unwrap_or_else(|| GammaStructure::trivial(inst.bundle.rank()));
    let gamma = gamma_in_split_frame(&gamma, &split)?;
    let exps = split.split_type.exps().to_vec();
    let validation = equivariant::validate_action(&exps, &gamma)?;
    if !validation.is_valid() {
        return Err(Error::InvalidAction(validation.failures.join("; ")));
    }
    let algebra = end_algebra(&exps);
    let reduction = levi::maximal_torus_decomposition(
        &algebra,
        &gamma,
        inst.options.seed,
        budget_of(inst),
        inst.options.coeff_bound,
    )?;
    Ok(ReducePipeline {
        split,
        gamma,
        algebra,
        reduction,
    })
}

pub fn run_reduce(inst: &Instance) -> Result<RunOutcome, Error> {
    let p = reduce_pipeline(inst)?;
    let d = &p.reduction.decomposition;
    let levi_class = levi::canonical_levi(d)?;
    let injectivity = levi::torus_injectivity(d)?;
    let partition = d.partition();
    let n = inst.bundle.rank();
    let certificates = json!({
        "equivariance": d.gamma_fixed,
        "indecomposable": p.reduction.certificates.iter().map(|c| json!({
            "summand": c.summand,
            "corner_dim": c.corner_dim,
            "radical_dim": c.radical_dim,
            "certified": c.certified,
            "conditional": c.conditional,
        })).collect::<Vec<_>>(),
        "torus_injectivity_points": injectivity.len(),
    });
    let report = json!({
        "command": "reduce",
        "instance": inst.name,
        "seed": p.reduction.seed,
        "type": p.split.split_type.exps(),
        "partition": partition,
        "summand_types": d.summand_types.iter().map(|t| t.exps().to_vec()).collect::<Vec<_>>(),
        "idempotents": d.idempotents.iter().map(endo_to_json).collect::<Vec<_>>(),
        "base_point_frame": levi_class.base_point_frame.iter().map(|row| {
            row.iter().map(|s| s.to_string_repr()).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "certificates": certificates,
        "unsplit_factors": p.reduction.unsplit,
    });
    // a single full-rank block on a rank >= 2 bundle is a verified negative:
    // no proper equivariant reduction exists
    let exit_code = if partition == vec![n] && n >= 2 { 1 } else { 0 };
    Ok(RunOutcome {
        report,
        exit_code,
    })
}

// ---------------------------------------------------------------------------
// compare

pub fn run_compare(
    inst: &Instance,
    report_a: &Value,
    report_b: &Value,
) -> Result<RunOutcome, Error> {
    let split = birkhoff_split(&inst.bundle)?;
    let gamma = inst
        .gamma
        .clone()
        .unwrap_or_else(|| GammaStructure::trivial(inst.bundle.rank()));
    let gamma = gamma_in_split_frame(&gamma, &split)?;
    let exps = split.split_type.exps().to_vec();
    let da = decomposition_from_report(&exps, report_a, Some(&gamma))?;
    let db = decomposition_from_report(&exps, report_b, Some(&gamma))?;
    let mut ta: Vec<Vec<i64>> = da.summand_types.iter().map(|t| t.exps().to_vec()).collect();
    let mut tb: Vec<Vec<i64>> = db.summand_types.iter().map(|t| t.exps().to_vec()).collect();
    ta.sort();
    tb.sort();
    if ta != tb {
        return Ok(RunOutcome {
            report: json!({
                "command": "compare",
                "instance": inst.name,
                "equivalent": false,
                "reason": "summand type multisets differ",
            }),
            exit_code: 1,
        });
    }
    let algebra = end_algebra(&exps);
    let tw = levi::intertwiner(&da, &db, &algebra, &gamma, inst.options.seed)?;
    let report = json!({
        "command": "compare",
        "instance": inst.name,
        "equivalent": true,
        "matching": tw.matching,
        "tau": endo_to_json(&tw.tau),
        "tau_inverse": endo_to_json(&tw.tau_inv),
        "verified": true,
    });
    Ok(RunOutcome {
        report,
        exit_code: 0,
    })
}

fn decomposition_from_report(
    exps: &[i64],
    report: &Value,
    gamma: Option<&GammaStructure>,
) -> Result<Decomposition, Error> {
    let obj = report
        .as_object()
        .ok_or_else(|| Error::Parse("report must be an object".into()))?;
    let idems_v = obj
        .get("idempotents")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Parse("report has no idempotents".into()))?;
    let idems = idems_v
        .iter()
        .map(|v| endo_from_json(exps, v))
        .collect::<Result<Vec<_>, _>>()?;
    Decomposition::new(exps, idems, gamma)
}

// ---------------------------------------------------------------------------
// quotient

pub fn run_quotient(inst: &Instance) -> Result<RunOutcome, Error> {
    let split = birkhoff_split(&inst.bundle)?;
    let gamma = inst
        .gamma
        .clone()
        .unwrap_or_else(|| GammaStructure::trivial(inst.bundle.rank()));
    let gamma = gamma_in_split_frame(&gamma, &split)?;
    let exps = split.split_type.exps().to_vec();
    let validation = equivariant::validate_action(&exps, &gamma)?;
    if !validation.is_valid() {
        return Err(Error::InvalidAction(validation.failures.join("; ")));
    }
    let algebra = end_algebra(&exps);
    let lq = quotients::levi_quotient(&algebra)?;
    let classification = quotients::classify_action_on_levi_quotient(&lq, &gamma)?;
    let report = json!({
        "command": "quotient",
        "instance": inst.name,
        "type": exps,
        "distinct_degrees": lq.distinct_degrees.iter().map(|(d, m)| json!([d, m])).collect::<Vec<_>>(),
        "radical_dimension": lq.radical_dim(),
        "quotient_dimension": lq.quotient_dim(),
        "verdict": classification.verdict.as_str(),
        "evidence": classification.evidence,
    });
    Ok(RunOutcome {
        report,
        exit_code: 0,
    })
}

// ---------------------------------------------------------------------------
// verify: replay the certificates in a report against the instance, with no
// re-search

pub fn run_verify(inst: &Instance, report: &Value) -> Result<RunOutcome, Error> {
    let obj = report
        .as_object()
        .ok_or_else(|| Error::Parse("report must be an object".into()))?;
    let command = obj
        .get("command")
        .and_then(|c| c.as_str())
        .ok_or_else(|| Error::Parse("report has no command field".into()))?;
    let mut checks: Vec<(String, bool)> = vec![];
    match command {
        "split" => {
            let claimed: Vec<i64> = exps_from(obj, "type")?;
            let left = instance::laurent_matrix_from_json(
                obj.get("witness")
                    .and_then(|w| w.get("left"))
                    .ok_or_else(|| Error::Parse("split report missing witness.left".into()))?,
            )?;
            let right = instance::laurent_matrix_from_json(
                obj.get("witness")
                    .and_then(|w| w.get("right"))
                    .ok_or_else(|| Error::Parse("split report missing witness.right".into()))?,
            )?;
            let sb = SplitBundle {
                bundle: inst.bundle.clone(),
                split_type: crate::bundle::SplitType::new(claimed),
                left,
                right,
            };
            checks.push(("factorization witness".into(), sb.verify().is_ok()));
        }
        "reduce" => {
            let split = birkhoff_split(&inst.bundle)?;
            let gamma = inst
                .gamma
                .clone()
                .unwrap_or_else(|| GammaStructure::trivial(inst.bundle.rank()));
            let gamma = gamma_in_split_frame(&gamma, &split)?;
            let exps = split.split_type.exps().to_vec();
            let claimed: Vec<i64> = exps_from(obj, "type")?;
            checks.push(("splitting type".into(), claimed == exps));
            match decomposition_from_report(&exps, report, Some(&gamma)) {
                Ok(d) => {
                    checks.push(("idempotent system".into(), true));
                    let claimed_partition: Vec<usize> = obj
                        .get("partition")
                        .and_then(|p| p.as_array())
                        .map(|a| {
                            a.iter()
                                .filter_map(|x| x.as_u64().map(|u| u as usize))
                                .collect()
                        })
                        .unwrap_or_default();
                    checks.push(("partition".into(), claimed_partition == d.partition()));
                    let claimed_equivariant = obj
                        .get("certificates")
                        .and_then(|c| c.get("equivariance"))
                        .and_then(|e| e.as_bool())
                        .unwrap_or(false);
                    let cert = levi::check_equivariant(&d, &gamma)?;
                    checks.push(("equivariance".into(), cert.equivariant == claimed_equivariant && cert.equivariant));
                    checks.push(("torus injectivity".into(), levi::torus_injectivity(&d).is_ok()));
                }
                Err(_) => checks.push(("idempotent system".into(), false)),
            }
        }
        "aut" => {
            let out = run_aut(inst)?;
            let same = out.report.get("valid") == obj.get("valid");
            checks.push(("action validation".into(), same));
        }
        other => {
            return Err(Error::Parse(format!(
                "verification not supported for {other:?} reports"
            )))
        }
    }
    let ok = checks.iter().all(|(_, b)| *b);
    let report = json!({
        "command": "verify",
        "instance": inst.name,
        "verified": ok,
        "checks": checks.iter().map(|(name, b)| json!({"check": name, "pass": b})).collect::<Vec<_>>(),
    });
    Ok(RunOutcome {
        report,
        exit_code: if ok { 0 } else { 1 },
    })
}

fn exps_from(obj: &Map<String, Value>, key: &str) -> Result<Vec<i64>, Error> {
    obj.get(key)
        .and_then(|v| v.as_array())
        .map(|a| a.iter().filter_map(|x| x.as_i64()).collect())
        .ok_or_else(|| Error::Parse(format!("report missing {key}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance_from(text: &str) -> Instance {
        Instance::parse(text).unwrap()
    }

    const DIAG_INSTANCE: &str = r#"{
        "name": "diag",
        "bundle": { "transition": [[{"2":"1"},{}],[{},{"-1":"1"}]] }
    }"#;

    const SWAP_INSTANCE: &str = r#"{
        "name": "swap",
        "bundle": { "transition": [[{"0":"1"},{}],[{},{"0":"1"}]] },
        "gamma": { "kind": "finite", "generators": [
            { "lift": [[["0"],["1"]],[["1"],["0"]]] }
        ]}
    }"#;

    #[test]
    fn split_report_and_verify() {
        let inst = instance_from(DIAG_INSTANCE);
        let out = run_split(&inst).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["type"], json!([2, -1]));
        let v = run_verify(&inst, &out.report).unwrap();
        assert_eq!(v.exit_code, 0);
    }

    #[test]
    fn reports_are_byte_identical_per_seed() {
        let inst = instance_from(SWAP_INSTANCE);
        let a = canonical_string(&run_reduce(&inst).unwrap().report);
        let b = canonical_string(&run_reduce(&inst).unwrap().report);
        assert_eq!(a, b);
    }

    #[test]
    fn reduce_swap_and_verify_replay() {
        let inst = instance_from(SWAP_INSTANCE);
        let out = run_reduce(&inst).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["partition"], json!([1, 1]));
        let v = run_verify(&inst, &out.report).unwrap();
        assert_eq!(v.exit_code, 0, "{}", canonical_string(&v.report));
    }

    #[test]
    fn tampered_report_fails_verification() {
        let inst = instance_from(SWAP_INSTANCE);
        let out = run_reduce(&inst).unwrap();
        let mut bad = out.report.clone();
        bad["idempotents"][0][0][0] = json!(["7"]);
        let v = run_verify(&inst, &bad).unwrap();
        assert_eq!(v.exit_code, 1);
    }

    #[test]
    fn aut_report_swap() {
        let inst = instance_from(SWAP_INSTANCE);
        let out = run_aut(&inst).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["fixed_dimension"], json!(2));
    }

    #[test]
    fn compare_identical_reductions() {
        let inst = instance_from(SWAP_INSTANCE);
        let out = run_reduce(&inst).unwrap();
        let cmp = run_compare(&inst, &out.report, &out.report).unwrap();
        assert_eq!(cmp.exit_code, 0);
        assert_eq!(cmp.report["equivalent"], json!(true));
    }

    #[test]
    fn quotient_report_on_mixed_type() {
        let inst = instance_from(DIAG_INSTANCE);
        let out = run_quotient(&inst).unwrap();
        assert_eq!(out.report["radical_dimension"], json!(4));
        assert_eq!(out.report["verdict"], json!("hypothesis-not-met"));
    }

    #[test]
    fn gamma_transport_through_nontrivial_witness() {
        // the trivial bundle presented through the shear A = [[1, z],[0,1]]:
        // T = A(z)^{-1} A(1/z) = [[1, 1/z - z],[0,1]], and the swap written
        // in that frame: A^{-1} [[0,1],[1,0]] A = [[-z, 1-z^2],[1, z]]
        let text = r#"{
            "name": "swap-sheared",
            "bundle": { "transition": [[{"0":"1"},{"-1":"1","1":"-1"}],[{},{"0":"1"}]] },
            "gamma": { "kind": "finite", "generators": [
                { "lift": [[["0","-1"],["1","0","-1"]],[["1"],["0","1"]]] }
            ]}
        }"#;
        let inst = instance_from(text);
        // transport through the splitting witness must recover a constant
        // conjugate of the swap: valid action, two fixed line summands
        let out = run_reduce(&inst).unwrap();
        assert_eq!(out.report["partition"], json!([1, 1]));
    }

    #[test]
    fn negative_reduction_exit_code() {
        let text = r#"{
            "name": "order-eight",
            "bundle": { "transition": [[{"0":"1"},{}],[{},{"0":"1"}]] },
            "gamma": { "kind": "finite", "generators": [
                { "lift": [[["0"],["1"]],[["1"],["0"]]] },
                { "lift": [[["1"],["0"]],[["0"],["-1"]]] }
            ]}
        }"#;
        let inst = instance_from(text);
        let out = run_reduce(&inst).unwrap();
        assert_eq!(out.report["partition"], json!([2]));
        assert_eq!(out.exit_code, 1);
    }
}
