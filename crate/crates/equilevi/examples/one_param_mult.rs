//! The multiplicative group acting by z -> t z on O(1) + O with the
//! identity lift: the equivariant reduction keeps the line summands, and
//! the induced action on the Levi quotient factors through a torus.

use equilevi::endo::end_algebra;
use equilevi::equivariant::{validate_action, GammaStructure};
use equilevi::levi::maximal_torus_decomposition;
use equilevi::mpoly::MPolyMatrix;
use equilevi::poly::SplitBudget;
use equilevi::quotients::{classify_action_on_levi_quotient, levi_quotient};

fn main() {
    let gamma = GammaStructure::OneParamMult {
        q: 1,
        lift: MPolyMatrix::identity(2),
    };
    let exps = [1i64, 0];
    let report = validate_action(&exps, &gamma).unwrap();
    println!("action valid: {} (checked symbolically in t)", report.is_valid());

    let algebra = end_algebra(&exps);
    let red = maximal_torus_decomposition(&algebra, &gamma, 0, SplitBudget::default(), 5)
        .unwrap();
    println!("equivariant partition: {:?}", red.decomposition.partition());
    for (i, t) in red.decomposition.summand_types.iter().enumerate() {
        println!("  fixed line summand {i}: type {:?}", t.exps());
    }

    let lq = levi_quotient(&algebra).unwrap();
    println!(
        "radical dim {}, quotient dim {} over degrees {:?}",
        lq.radical_dim(),
        lq.quotient_dim(),
        lq.distinct_degrees
    );
    let c = classify_action_on_levi_quotient(&lq, &gamma).unwrap();
    println!("quotient action verdict: {}", c.verdict.as_str());
    for e in &c.evidence {
        println!("  evidence: {e}");
    }
}
