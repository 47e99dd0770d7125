//! Factor a transition matrix into split form and replay the witness
//! identity left(z) * T(z) * right(1/z) = diag(z^{a_i}).

use equilevi::bundle::birkhoff_split;
use equilevi::laurent::{LaurentMatrix, LaurentPoly};
use equilevi::{BundleDesc, Scalar};

fn main() {
    // T = [[z^2 + 1/z, 1], [1/z^2, 1/z]], an unimodular presentation of
    // O(2) + O(-1) hiding the splitting behind off-diagonal junk
    let one = Scalar::one;
    let t = LaurentMatrix::new(vec![
        vec![
            LaurentPoly::from_terms([(2, one()), (-1, one())]),
            LaurentPoly::monomial(0, one()),
        ],
        vec![
            LaurentPoly::monomial(-2, one()),
            LaurentPoly::monomial(-1, one()),
        ],
    ])
    .unwrap();
    let bundle = BundleDesc::new(t).unwrap();
    println!("rank {}, degree {}", bundle.rank(), bundle.degree());

    let split = birkhoff_split(&bundle).unwrap();
    println!("splitting type: {:?}", split.split_type.exps());

    // the witness is self-checking; verify() replays the factorization
    split.verify().unwrap();
    println!("witness identity replayed exactly");

    let product = split
        .left
        .mul(bundle.transition())
        .mul(&split.right.invert_var());
    println!(
        "left * T * right(1/z) = diag? {}",
        product == LaurentMatrix::diag_powers(split.split_type.exps())
    );
}
