use phigal_core::semilinear::{K0Elem, K0Matrix, Scalar};
use proptest::prelude::*;

fn elem(f: u32) -> impl Strategy<Value = K0Elem> {
    (-9i64..=9, -9i64..=9, 1i64..=4).prop_map(move |(a, b, d)| {
        let im = if f == 2 { Scalar::ratio(b, d) } else { Scalar::zero() };
        K0Elem::new(Scalar::ratio(a, d), im)
    })
}

fn matrix(f: u32) -> impl Strategy<Value = K0Matrix> {
    (elem(f), elem(f), elem(f), elem(f), 0..f)
        .prop_map(move |(a, b, c, d, t)| K0Matrix::new([[a, b], [c, d]], t, f))
}

fn gauss() -> impl Strategy<Value = K0Matrix> {
    matrix(2)
}

proptest! {
    #[test]
    fn compose_is_associative(a in gauss(), b in gauss(), c in gauss()) {
        let l = a.compose(&b).compose(&c);
        let r = a.compose(&b.compose(&c));
        prop_assert!(l.equals(&r));
        prop_assert_eq!(l.twist, (a.twist + b.twist + c.twist) % 2);
    }

    #[test]
    fn det_is_twisted_multiplicative(a in gauss(), b in gauss()) {
        let lhs = a.compose(&b).det();
        let rhs = a.det().mul(&b.det().sigma_pow(a.twist));
        prop_assert!(lhs.equals(&rhs));
    }

    #[test]
    fn inverse_composes_to_identity(a in gauss()) {
        prop_assume!(a.is_invertible());
        let ai = a.inverse().unwrap();
        prop_assert!(a.compose(&ai).is_identity());
        prop_assert!(ai.compose(&a).is_identity());
    }

    #[test]
    fn sigma_is_a_field_automorphism(x in elem(2), y in elem(2)) {
        prop_assert!(x.mul(&y).conj().equals(&x.conj().mul(&y.conj())));
        prop_assert!(x.add(&y).sigma_pow(1).equals(&x.sigma_pow(1).add(&y.sigma_pow(1))));
        prop_assert!(x.sigma_pow(2).equals(&x));
    }

    #[test]
    fn entry_text_round_trips(a in gauss()) {
        let back = K0Matrix::from_text(&a.entries_text(), a.twist, 2).unwrap();
        prop_assert!(back.equals(&a));
    }
}
