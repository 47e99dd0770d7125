//! A two-element group swapping the factors of O + O: validate the action,
//! compute the fixed subalgebra, and reduce to the two eigenlines.

use equilevi::endo::end_algebra;
use equilevi::equivariant::{finite_closure, fixed_subalgebra, validate_action, Mobius};
use equilevi::levi::{canonical_levi, check_equivariant, maximal_torus_decomposition};
use equilevi::poly::SplitBudget;
use equilevi::ratfunc::RatFunc;
use equilevi::Scalar;

fn main() {
    let swap = vec![
        vec![RatFunc::zero(), RatFunc::one()],
        vec![RatFunc::one(), RatFunc::zero()],
    ];
    let gamma = finite_closure(vec![(Mobius::identity(), swap)], 8).unwrap();

    let exps = [0i64, 0];
    let report = validate_action(&exps, &gamma).unwrap();
    println!("action valid: {}", report.is_valid());

    let algebra = end_algebra(&exps);
    let fixed = fixed_subalgebra(&algebra, &gamma).unwrap();
    println!("dim End = {}, dim fixed = {}", algebra.dim(), fixed.len());

    let red = maximal_torus_decomposition(&algebra, &gamma, 0, SplitBudget::default(), 5)
        .unwrap();
    println!("partition: {:?}", red.decomposition.partition());
    for (i, t) in red.decomposition.summand_types.iter().enumerate() {
        println!("  summand {i}: type {:?}", t.exps());
    }

    let cert = check_equivariant(&red.decomposition, &gamma).unwrap();
    println!("equivariance certificate: {}", cert.equivariant);

    let levi = canonical_levi(&red.decomposition).unwrap();
    println!("Levi partition {:?}", levi.partition);
    let frame: Vec<Vec<String>> = levi
        .base_point_frame
        .iter()
        .map(|r| r.iter().map(Scalar::to_string_repr).collect())
        .collect();
    println!("base point frame (columns = eigenlines): {frame:?}");
}
