use hopf_submersions::algebra::{AlgebraElement, AlgebraTag};
use hopf_submersions::scalar::Sign;
use num_rational::Ratio;
use proptest::prelude::*;

type Q = Ratio<i64>;

const TAGS: [AlgebraTag; 6] = [
    AlgebraTag::C,
    AlgebraTag::A,
    AlgebraTag::H,
    AlgebraTag::B,
    AlgebraTag::O,
    AlgebraTag::Oprime,
];

fn element(tag: AlgebraTag, raw: &[(i64, i64)]) -> AlgebraElement<Q> {
    let coeffs = raw[..tag.dim()].iter().map(|&(n, d)| Q::new(n, d)).collect();
    AlgebraElement::new(tag, coeffs).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-9i64..=9, 1i64..=4), 8)
}

proptest! {
    #[test]
    fn norm_is_multiplicative(t in 0usize..6, a in coeffs(), b in coeffs()) {
        let tag = TAGS[t];
        let (x, y) = (element(tag, &a), element(tag, &b));
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(xy.norm_form(), x.norm_form() * y.norm_form());
    }

    #[test]
    fn table_agrees_with_doubling(t in 0usize..6, a in coeffs(), b in coeffs()) {
        let tag = TAGS[t];
        let (x, y) = (element(tag, &a), element(tag, &b));
        prop_assert_eq!(x.mul(&y).unwrap(), x.mul_recursive(&y).unwrap());
    }

    #[test]
    fn conjugation_reverses_products(t in 0usize..6, a in coeffs(), b in coeffs()) {
        let tag = TAGS[t];
        let (x, y) = (element(tag, &a), element(tag, &b));
        prop_assert_eq!(x.mul(&y).unwrap().conj(), y.conj().mul(&x.conj()).unwrap());
    }

    #[test]
    fn alternative_laws(t in 0usize..6, a in coeffs(), b in coeffs()) {
        let tag = TAGS[t];
        let (x, y) = (element(tag, &a), element(tag, &b));
        let xx = x.mul(&x).unwrap();
        prop_assert_eq!(x.mul(&x.mul(&y).unwrap()).unwrap(), xx.mul(&y).unwrap());
        let yy = y.mul(&y).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap().mul(&y).unwrap(), x.mul(&yy).unwrap());
    }

    #[test]
    fn conjugate_product_is_the_norm(t in 0usize..6, a in coeffs()) {
        let tag = TAGS[t];
        let x = element(tag, &a);
        let n = AlgebraElement::one(tag).scale(x.norm_form());
        prop_assert_eq!(x.conj().mul(&x).unwrap(), n.clone());
        prop_assert_eq!(x.mul(&x.conj()).unwrap(), n);
    }
}

#[test]
fn norm_signatures() {
    for (tag, negatives) in TAGS.iter().zip([0, 1, 0, 2, 0, 4]) {
        let count = tag.norm_diagonal().iter().filter(|s| **s == Sign::Minus).count();
        assert_eq!(count, negatives, "{}", tag.name());
    }
}

#[test]
fn squares_of_imaginary_units() {
    for tag in TAGS {
        for i in 1..tag.dim() {
            let e = AlgebraElement::<i64>::basis(tag, i);
            let sq = e.mul(&e).unwrap();
            // e_i² = -N(e_i)
            assert_eq!(sq, AlgebraElement::one(tag).scale(-e.norm_form()), "{} e{i}", tag.name());
        }
    }
}

#[test]
fn octonions_are_not_associative() {
    let e = |i| AlgebraElement::<i64>::basis(AlgebraTag::O, i);
    let left = e(1).mul(&e(2)).unwrap().mul(&e(4)).unwrap();
    let right = e(1).mul(&e(2).mul(&e(4)).unwrap()).unwrap();
    assert_eq!(left, right.scale(-1));
}

#[test]
fn mismatched_algebras_are_rejected() {
    let x = AlgebraElement::<i64>::one(AlgebraTag::C);
    let y = AlgebraElement::<i64>::one(AlgebraTag::A);
    assert!(x.mul(&y).is_err());
    assert!(AlgebraElement::new(AlgebraTag::H, vec![1i64; 3]).is_err());
}
