use phigal_core::ec_char3::{automorphism_group, BaseField, CurveF3q};
use phigal_core::gf9::F9;
use proptest::prelude::*;

fn f9() -> impl Strategy<Value = F9> {
    (0i64..3, 0i64..3).prop_map(|(a, b)| F9::new(a, b))
}

fn f3() -> impl Strategy<Value = F9> {
    (0i64..3).prop_map(|a| F9::new(a, 0))
}

fn curve(field: BaseField) -> impl Strategy<Value = CurveF3q> {
    let c = match field {
        BaseField::F3 => f3().boxed(),
        BaseField::F9 => f9().boxed(),
    };
    [c.clone(), c.clone(), c.clone(), c.clone(), c]
        .prop_filter_map("singular", move |a| CurveF3q::new(field, a).ok())
}

fn any_curve() -> impl Strategy<Value = CurveF3q> {
    prop_oneof![curve(BaseField::F3), curve(BaseField::F9)]
}

proptest! {
    #[test]
    fn f9_is_a_field(x in f9(), y in f9(), z in f9()) {
        prop_assert_eq!(x.mul(y.add(z)), x.mul(y).add(x.mul(z)));
        prop_assert_eq!(x.mul(y).mul(z), x.mul(y.mul(z)));
        if !x.is_zero() {
            prop_assert_eq!(x.mul(x.inv().unwrap()), F9::ONE);
        }
        prop_assert_eq!(x.frobenius().frobenius(), x);
        prop_assert_eq!(x.mul(y).frobenius(), x.frobenius().mul(y.frobenius()));
    }

    #[test]
    fn hasse_bound(e in any_curve()) {
        let q = e.field().q();
        let a = e.frobenius_trace();
        prop_assert!(a * a <= 4 * q);
        if e.field() == BaseField::F3 {
            prop_assert!(a.abs() <= 3);
        }
    }

    #[test]
    fn twist_negates_trace(e in any_curve()) {
        let t = e.quadratic_twist();
        prop_assert_eq!(t.frobenius_trace(), -e.frobenius_trace());
        prop_assert_eq!(t.is_supersingular(), e.is_supersingular());
        prop_assert_eq!(t.quadratic_twist().point_count(), e.point_count());
        prop_assert_eq!(t.j_invariant(), e.j_invariant());
    }

    #[test]
    fn automorphisms_form_a_group(e in curve(BaseField::F3)) {
        let g = automorphism_group(&e);
        prop_assert!(g.is_group());
        prop_assert!(g.order() >= 2);
        for s in &g.elements {
            prop_assert_eq!(s.transform(&e), e.coefficients());
            let inv = s.inverse();
            prop_assert_eq!(s.compose(&inv), phigal_core::ec_char3::Substitution::IDENTITY);
        }
    }

    #[test]
    fn automorphisms_permute_points(e in any_curve()) {
        let g = automorphism_group(&e);
        let els = e.field().elements();
        let pts: Vec<(F9, F9)> = els
            .iter()
            .flat_map(|&x| els.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| e.contains(x, y))
            .collect();
        prop_assert_eq!(pts.len() as i64 + 1, e.point_count());
        for s in &g.elements {
            for &(x, y) in &pts {
                let (x2, y2) = s.apply_point(x, y);
                prop_assert!(e.contains(x2, y2));
            }
        }
    }
}
