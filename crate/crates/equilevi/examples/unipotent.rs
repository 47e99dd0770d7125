//! The additive group with the unipotent lift [[1, t], [0, 1]] on O + O:
//! no equivariant splitting exists, and the induced action on the Levi
//! quotient is nontrivial without factoring through any torus.

use equilevi::endo::end_algebra;
use equilevi::equivariant::{fixed_subalgebra, validate_action, GammaStructure};
use equilevi::levi::maximal_torus_decomposition;
use equilevi::mpoly::{MPoly, MPolyMatrix, VAR_T};
use equilevi::poly::SplitBudget;
use equilevi::quotients::{classify_action_on_levi_quotient, levi_quotient};

fn main() {
    let mut lift = MPolyMatrix::identity(2);
    lift.entries[0][1] = MPoly::var(VAR_T);
    let gamma = GammaStructure::OneParamAdd {
        moves_base: false,
        lift,
    };
    let exps = [0i64, 0];
    let report = validate_action(&exps, &gamma).unwrap();
    println!("action valid: {}", report.is_valid());

    let algebra = end_algebra(&exps);
    let fixed = fixed_subalgebra(&algebra, &gamma).unwrap();
    println!(
        "fixed subalgebra dim {} (identity and the nilpotent E12)",
        fixed.len()
    );

    let red = maximal_torus_decomposition(&algebra, &gamma, 0, SplitBudget::default(), 5)
        .unwrap();
    println!("equivariant partition: {:?}", red.decomposition.partition());

    let lq = levi_quotient(&algebra).unwrap();
    let c = classify_action_on_levi_quotient(&lq, &gamma).unwrap();
    println!("quotient action verdict: {}", c.verdict.as_str());
    for e in &c.evidence {
        println!("  evidence: {e}");
    }
    println!("consequence: the {:?} reduction reachable without the group", vec![1, 1]);
    println!("is not reachable equivariantly; the group obstructs it.");
}
