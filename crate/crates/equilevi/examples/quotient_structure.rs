//! The unipotent radical / Levi quotient structure of End(E) for a split
//! bundle: strictly degree-raising blocks form the radical, the constant
//! block-diagonal part is a product of GL(m_d) over distinct degrees.

use equilevi::endo::{end_algebra, GlobalEndo};
use equilevi::quotients::{levi_quotient, psi};
use equilevi::poly::Poly;

fn main() {
    for exps in [vec![0, 0], vec![1, 0], vec![2, 1, 1]] {
        let algebra = end_algebra(&exps);
        let lq = levi_quotient(&algebra).unwrap();
        println!(
            "type {:?}: dim End = {}, radical = {}, quotient = {} = sum of m_d^2 over {:?}",
            exps,
            algebra.dim(),
            lq.radical_dim(),
            lq.quotient_dim(),
            lq.distinct_degrees
        );
    }

    // psi is multiplicative on units: block-diagonal constant terms compose
    let u = GlobalEndo::new(
        vec![1, 0],
        vec![
            vec![Poly::from_ints(&[2]), Poly::from_ints(&[1, 3])],
            vec![Poly::zero(), Poly::from_ints(&[5])],
        ],
    )
    .unwrap();
    let v = GlobalEndo::new(
        vec![1, 0],
        vec![
            vec![Poly::from_ints(&[7]), Poly::from_ints(&[0, -2])],
            vec![Poly::zero(), Poly::from_ints(&[1])],
        ],
    )
    .unwrap();
    println!(
        "psi(uv) == psi(u) psi(v): {}",
        psi(&u.mul(&v)).eq(&psi(&u).mul(&psi(&v)))
    );
}
