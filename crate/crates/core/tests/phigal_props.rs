use phigal_core::phigal::{
    canonical_module, check_conditions, classify, conjugate, is_admissible, is_isomorphic,
    twist_unramified, ClassLabel, ProjParam,
};
use phigal_core::semilinear::{K0Elem, K0Matrix, Scalar};
use proptest::prelude::*;

fn param() -> impl Strategy<Value = ProjParam> {
    prop_oneof![
        1 => Just(ProjParam::Infinity),
        8 => (-80i64..=80, 1i64..=15).prop_map(|(n, d)| ProjParam::ratio(n, d)),
    ]
}

/// A label from one of the projective rows.
fn p1_label() -> impl Strategy<Value = ClassLabel> {
    (0usize..14, param()).prop_map(|(k, t)| match k {
        0 => ClassLabel::dpc4(t),
        1 => ClassLabel::dpcng(3, t),
        2 => ClassLabel::dpcng(6, t),
        k => {
            let i = ((k - 3) % 5) as i64 + 1;
            ClassLabel::dpc12(i, ((k - 3) / 5 % 2) as i64, t)
        }
    })
}

fn dc_label() -> impl Strategy<Value = ClassLabel> {
    (1u32..=2, -3i64..=3, param()).prop_map(|(e, a, t)| ClassLabel::dc(e, a, t))
}

fn conjugator(f: u32, v: &[(i64, i64)]) -> K0Matrix {
    let e = |(a, b): (i64, i64)| K0Elem::new(Scalar::int(a), Scalar::int(if f == 2 { b } else { 0 }));
    K0Matrix::linear([[e(v[0]), e(v[1])], [e(v[2]), e(v[3])]], f)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn p1_rows_classify_to_their_parameter(l in p1_label()) {
        let m = canonical_module(&l).unwrap();
        prop_assert!(check_conditions(&m).unwrap().all_pass());
        prop_assert!(is_admissible(&m).unwrap().admissible);
        let c = classify(&m).unwrap();
        prop_assert!(c.same_class(&l), "{} classified as {}", l, c);
    }

    #[test]
    fn dc_admissible_unless_ordinary_at_infinity(l in dc_label()) {
        let m = canonical_module(&l).unwrap();
        let adm = is_admissible(&m).unwrap().admissible;
        let boundary = l.is_ordinary() && l.param.as_ref().is_some_and(|p| p.is_infinity());
        prop_assert_eq!(adm, !boundary, "{}", l);
        if adm {
            let c = classify(&m).unwrap();
            // Supersingular filtrations collapse to 0, ordinary finite ones to 0 or 1.
            let p = c.param.clone().unwrap();
            prop_assert!(p.is_zero() || p.equals(&ProjParam::int(1)));
            prop_assert_eq!(c.trace, l.trace);
        }
    }

    #[test]
    fn conjugation_preserves_class(
        l in p1_label(),
        v in proptest::collection::vec((-6i64..=6, -6i64..=6), 4),
    ) {
        let m = canonical_module(&l).unwrap();
        let x = conjugator(m.base.f(), &v);
        prop_assume!(x.is_invertible());
        let moved = conjugate(&m, &x).unwrap();
        prop_assert!(is_isomorphic(&m, &moved).unwrap().is_some());
        prop_assert!(is_isomorphic(&moved, &m).unwrap().is_some());
        prop_assert!(classify(&moved).unwrap().same_class(&l));
    }

    #[test]
    fn distinct_parameters_are_not_isomorphic(l in p1_label(), t in param()) {
        let other = l.with_param(t.clone());
        let a = canonical_module(&l).unwrap();
        let b = canonical_module(&other).unwrap();
        let same = l.param.as_ref().unwrap().equals(&t);
        prop_assert_eq!(is_isomorphic(&a, &b).unwrap().is_some(), same);
    }

    #[test]
    fn unramified_twist_is_an_involution(l in p1_label()) {
        let m = canonical_module(&l).unwrap();
        let t = twist_unramified(&m).unwrap();
        let tr = |d| check_conditions(d).unwrap().trace;
        prop_assert_eq!(tr(&t).map(|x| -x), tr(&m));
        let back = twist_unramified(&t).unwrap();
        prop_assert!(is_isomorphic(&m, &back).unwrap().is_some());
    }
}
