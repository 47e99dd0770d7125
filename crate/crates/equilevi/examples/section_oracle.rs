//! The independent splitting-type oracle: count global sections of twists
//! and read the type off the second difference of t -> h^0(E(t)).

use equilevi::bundle::{h0, split_type_via_sections, birkhoff_split};
use equilevi::laurent::{LaurentMatrix, LaurentPoly};
use equilevi::{BundleDesc, Scalar};

fn main() {
    // extension presentation [[1, z], [0, z^2]] of O(1) + O(1)... or is it?
    let one = Scalar::one;
    let t = LaurentMatrix::new(vec![
        vec![LaurentPoly::monomial(0, one()), LaurentPoly::monomial(1, one())],
        vec![LaurentPoly::zero(), LaurentPoly::monomial(2, one())],
    ])
    .unwrap();
    let bundle = BundleDesc::new(t).unwrap();

    for twist in -3..=2 {
        println!("h0(E({twist})) = {}", h0(&bundle, twist).unwrap());
    }

    let oracle = split_type_via_sections(&bundle).unwrap();
    println!("type from section counts:  {:?}", oracle.exps());

    let split = birkhoff_split(&bundle).unwrap();
    println!("type from factorization:   {:?}", split.split_type.exps());
    assert_eq!(oracle, split.split_type);
    println!("the two independent routes agree");
}
