//! The rigid case: the dihedral group of order 8 generated by the swap and
//! diag(1,-1) leaves only scalar endomorphisms fixed, so the trivial rank-2
//! bundle admits no proper equivariant reduction — while forgetting the
//! group splits it into two lines.

use equilevi::endo::end_algebra;
use equilevi::equivariant::{finite_closure, fixed_subalgebra, GammaStructure, Mobius};
use equilevi::levi::maximal_torus_decomposition;
use equilevi::poly::SplitBudget;
use equilevi::ratfunc::RatFunc;
use equilevi::Scalar;

fn cmat(rows: &[&[i64]]) -> Vec<Vec<RatFunc>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|&x| RatFunc::constant(Scalar::from_int(x)))
                .collect()
        })
        .collect()
}

fn main() {
    let gamma = finite_closure(
        vec![
            (Mobius::identity(), cmat(&[&[0, 1], &[1, 0]])),
            (Mobius::identity(), cmat(&[&[1, 0], &[0, -1]])),
        ],
        16,
    )
    .unwrap();
    let GammaStructure::Finite { elements, .. } = &gamma else { unreachable!() };
    println!("group closure has {} elements", elements.len());

    let exps = [0i64, 0];
    let algebra = end_algebra(&exps);
    let fixed = fixed_subalgebra(&algebra, &gamma).unwrap();
    println!("fixed subalgebra dimension: {} (scalars only)", fixed.len());

    // with the group: a single indecomposable block
    let with_group =
        maximal_torus_decomposition(&algebra, &gamma, 0, SplitBudget::default(), 5).unwrap();
    println!("equivariant partition: {:?}", with_group.decomposition.partition());
    let cert = &with_group.certificates[0];
    println!(
        "indecomposability certificate: corner dim {} mod radical dim {} => certified {}",
        cert.corner_dim, cert.radical_dim, cert.certified
    );

    // without the group: full line splitting
    let trivial = GammaStructure::trivial(2);
    let without =
        maximal_torus_decomposition(&algebra, &trivial, 0, SplitBudget::default(), 5).unwrap();
    println!("non-equivariant partition: {:?}", without.decomposition.partition());
}
