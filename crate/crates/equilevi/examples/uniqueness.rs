//! Uniqueness of the canonical reduction: two different seeds may find
//! different idempotent systems, but an intertwining unit conjugates one
//! onto the other exactly, matching summands one for one.

use equilevi::endo::end_algebra;
use equilevi::equivariant::GammaStructure;
use equilevi::levi::{intertwiner, maximal_torus_decomposition};
use equilevi::poly::SplitBudget;

fn main() {
    let exps = [1i64, 0, 0];
    let algebra = end_algebra(&exps);
    let gamma = GammaStructure::trivial(3);

    let r1 = maximal_torus_decomposition(&algebra, &gamma, 11, SplitBudget::default(), 5)
        .unwrap();
    let r2 = maximal_torus_decomposition(&algebra, &gamma, 99, SplitBudget::default(), 5)
        .unwrap();
    println!("seed 11 partition: {:?}", r1.decomposition.partition());
    println!("seed 99 partition: {:?}", r2.decomposition.partition());

    let tw = intertwiner(&r1.decomposition, &r2.decomposition, &algebra, &gamma, 0)
        .unwrap();
    println!("matching: {:?}", tw.matching);
    for (i, &j) in tw.matching.iter().enumerate() {
        let lhs = tw.tau.mul(&r1.decomposition.idempotents[i]).mul(&tw.tau_inv);
        let ok = lhs.eq(&r2.decomposition.idempotents[j]);
        println!("  tau pi_{i} tau^-1 = pi'_{j}: {ok}");
    }
}
