use std::sync::Arc;

use num_rational::Ratio;

use super::*;
use crate::local_fields::{catalog, FieldElement};
use crate::semilinear::{K0Elem, K0Matrix};

fn lab(s: &str) -> ClassLabel {
    s.parse().unwrap()
}

fn module(s: &str) -> FilteredModule {
    canonical_module(&lab(s)).unwrap()
}

fn base(s: &str) -> Arc<PhiGalModule> {
    canonical_base(&lab(s)).unwrap()
}

/// `x` lies in Q3 (all coordinates but the constant real one vanish).
fn is_q3(x: &FieldElement) -> bool {
    let c = x.coords();
    c[0].im.is_zero() && c[1..].iter().all(|q| q.is_zero())
}

#[test]
fn canonical_matrices_match_the_constructions() {
    let d = base("Dc(1;-3;0)");
    assert!(d.phi().equals(&K0Matrix::from_ints([[0, -3], [1, 3]], 0, 1)));
    let fil = &module("Dc(1;-3;0)").fil;
    assert!(fil[0].is_zero() && !fil[1].is_zero());

    let t3 = base("Dpcng(3;0;0)").generator_matrix("t3").unwrap().clone();
    let z = K0Elem::zeta4();
    let expect = K0Matrix::new(
        [
            [K0Elem::ratio(-1, 2), z.scale(&crate::semilinear::Scalar::ratio(3, 2))],
            [z.scale(&crate::semilinear::Scalar::ratio(1, 2)), K0Elem::ratio(-1, 2)],
        ],
        0,
        2,
    );
    assert!(t3.equals(&expect));

    let d12 = base("Dpc(12;0;3;1;0)");
    let t3 = d12.generator_matrix("t3").unwrap();
    assert!(t3.m[0][1].equals(&K0Elem::ratio(3, 2)));
    assert!(t3.m[1][0].equals(&K0Elem::ratio(-1, 2)));
    let t4 = d12.generator_matrix("t4").unwrap();
    assert!(t4.equals(&K0Matrix::diag(z.clone(), z.inv().unwrap(), 0, 2)));
}

#[test]
fn conditions_on_canonical_and_broken_modules() {
    let r = check_conditions(&module("Dc(1;0;0)")).unwrap();
    assert!(r.all_pass());
    assert_eq!(r.char_poly, Some(["3".to_string(), "0".into(), "1".into()]));
    let r = check_conditions(&module("Dpc(4;0;7)")).unwrap();
    assert!(r.all_pass());
    assert_eq!(r.trace, Some(0));

    // A quadratic action by diag(1, -1) has determinant -1.
    let d = PhiGalModule::new(
        "Q3(sqrt3)",
        K0Matrix::from_ints([[1, 0], [0, 3]], 0, 1),
        vec![("t2".into(), K0Matrix::from_ints([[1, 0], [0, -1]], 0, 1))],
    )
    .unwrap();
    let field = d.field().clone();
    let m = FilteredModule::new(Arc::new(d), [field.zero(), field.one()]).unwrap();
    let r = check_conditions(&m).unwrap();
    assert!(!r.cond3);
}

#[test]
fn newton_and_hodge_numbers() {
    let m = module("Dc(1;1;0)");
    assert_eq!(t_newton(&m.base), Ratio::from_integer(1));
    assert_eq!(t_hodge(&m), 1);
    // Tate twist: phi scaled by 3.
    let d = &m.base;
    let twisted = d.with_phi(d.phi().compose(&K0Matrix::from_ints([[3, 0], [0, 3]], 0, 1))).unwrap();
    assert_eq!(t_newton(&twisted), Ratio::from_integer(3));
}

#[test]
fn stable_lines_examples() {
    let lines = stable_lines(&base("Dc(1;1;0)")).unwrap();
    let mut tn: Vec<_> = lines.iter().map(|l| l.t_n).collect();
    tn.sort();
    assert_eq!(tn, vec![Ratio::from_integer(0), Ratio::from_integer(1)]);
    for l in &lines {
        let axis = if l.t_n == Ratio::from_integer(0) { 1 } else { 0 };
        assert!(l.vector[axis].is_zero());
    }
    assert!(stable_lines(&base("Dc(1;0;0)")).unwrap().is_empty());
    assert!(stable_lines(&base("Dpc(4;0;0)")).unwrap().is_empty());
}

#[test]
fn admissibility_boundary() {
    assert!(is_admissible(&module("Dc(1;1;1)")).unwrap().admissible);
    assert!(!is_admissible(&module("Dc(1;1;inf)")).unwrap().admissible);
    for a in ["0", "inf", "-5/3"] {
        assert!(is_admissible(&module(&format!("Dc(1;0;{a})"))).unwrap().admissible);
    }
}

#[test]
fn fixed_planes() {
    let [v1, v2] = base("Dpc(4;0;0)").fixed_plane().unwrap();
    let field = catalog().get("Q3(zeta4,pi4)").unwrap().field();
    let pi = field.pi();
    assert!(v1[1].is_zero() && v2[0].is_zero());
    assert!(is_q3(&v1[0].mul(&pi)));
    assert!(is_q3(&v2[1].div(&pi).unwrap()));

    let [v1, v2] = base("Dc(2;1;0)").fixed_plane().unwrap();
    let pi = catalog().get("Q3(sqrt3)").unwrap().field().pi();
    assert!(v1[1].is_zero() && v2[0].is_zero());
    assert!(!is_q3(&v1[0]) && is_q3(&v1[0].div(&pi).unwrap()));
    assert!(is_q3(&v2[1].div(&pi).unwrap()));

    let [v1, v2] = base("Dc(1;1;0)").fixed_plane().unwrap();
    assert!(v1[1].is_zero() && v2[0].is_zero());
}

#[test]
fn filtration_from_point_shapes() {
    let m = module("Dpc(4;0;5)");
    let field = m.field().clone();
    let pi = field.pi();
    // Fil = (5 pi^-1 e1 + pi e2) up to a Q3 multiple.
    let ratio = m.fil[0].mul(&pi).div(&m.fil[1].div(&pi).unwrap()).unwrap();
    assert!(ratio.agrees_to(&field.int(5), 20));
    let a = module("Dpcng(3;0;0)");
    let b = module("Dpcng(3;0;inf)");
    assert!(is_isomorphic(&a, &b).unwrap().is_none());
}

#[test]
fn weil_trace_examples() {
    for a in [-2i64, 1, 3] {
        let d = base(&format!("Dc(1;{a};0)"));
        let t = weil_traces(&d, 6).unwrap();
        let one = t.iter().find(|w| w.element == "1" && w.exponent == 1).unwrap();
        let expect = crate::semilinear::Scalar::ratio(-a, 3).to_text();
        assert_eq!(one.trace.as_deref(), Some(expect.as_str()));
    }
    let t = weil_traces(&base("Dpc(4;0;0)"), 6).unwrap();
    assert!(t.iter().any(|w| w.element == "t4" && w.exponent == 0 && w.trace.as_deref() == Some("0")));
    let t = weil_traces(&base("Dpcng(3;0;0)"), 6).unwrap();
    assert!(t.iter().any(|w| w.element == "t3" && w.exponent == 0 && w.trace.as_deref() == Some("-1")));
    assert!(t.iter().all(|w| w.is_rational()));
}

#[test]
fn membership_examples() {
    let field = catalog().get("Lng-closure").unwrap().field();
    assert!(!membership_check("M3na".parse().unwrap(), &field.zero()).unwrap());
    let field = catalog().get("K3").unwrap().field();
    assert!(!membership_check("M12(3,0)".parse().unwrap(), &field.zero()).unwrap());

    let slope = |s: &str| module(s).slope().unwrap();
    assert!(membership_check("M3a".parse().unwrap(), &slope("Dpcg(3;0,1)")).unwrap());
    assert!(membership_check("M6a".parse().unwrap(), &slope("Dpcg(6;3,-1)")).unwrap());
    for t in ["0", "2", "-7/4"] {
        assert!(membership_check("M3na".parse().unwrap(), &slope(&format!("Dpcng(3;0;{t})"))).unwrap());
        assert!(membership_check("M6na".parse().unwrap(), &slope(&format!("Dpcng(6;0;{t})"))).unwrap());
        for (i, eps) in [(1, 0), (3, 1), (5, 0)] {
            let set = format!("M12({i},{eps})").parse().unwrap();
            let s = slope(&format!("Dpc(12;0;{i};{eps};{t})"));
            assert!(membership_check(set, &s).unwrap(), "M12({i},{eps}) at {t}");
        }
    }
    // The two sign patterns give disjoint sets.
    let s = slope("Dpc(12;0;2;0;1)");
    assert!(!membership_check("M12(2,1)".parse().unwrap(), &s).unwrap());
}

#[test]
fn isomorphism_examples() {
    let x = is_isomorphic(&module("Dc(1;0;5)"), &module("Dc(1;0;0)")).unwrap();
    assert!(x.is_some());
    assert!(is_isomorphic(&module("Dc(1;-3;0)"), &module("Dc(1;3;0)")).unwrap().is_none());
    assert!(is_isomorphic(&module("Dpc(4;0;2)"), &module("Dpc(4;0;3)")).unwrap().is_none());
    let w = is_isomorphic(&module("Dpc(4;0;2)"), &module("Dpc(4;0;2)")).unwrap().unwrap();
    assert!(w.m[0][1].is_zero() && w.m[1][0].is_zero() && w.m[0][0].equals(&w.m[1][1]));
    assert!(matches!(
        is_isomorphic(&module("Dc(1;0;0)"), &module("Dc(2;0;0)")),
        Err(PhiGalError::WrongField { .. })
    ));
}

#[test]
fn classify_examples() {
    assert_eq!(classify(&module("Dc(1;2;7)")).unwrap().to_string(), "Dc(1;2;1)");
    assert_eq!(classify(&module("Dc(1;-3;5)")).unwrap().to_string(), "Dc(1;-3;0)");
    assert_eq!(classify(&module("Dpc(12;0;3;1;1/2)")).unwrap().to_string(), "Dpc(12;0;3;1;1/2)");
    assert!(matches!(classify(&module("Dc(2;-1;inf)")), Err(PhiGalError::Unclassifiable(_))));
    assert_eq!(classify_unfiltered(&base("Dpcg(6;0,-1)")).unwrap().to_string(), "Dpcg(6;0,-1)");
}

#[test]
fn twists() {
    let m = module("Dc(1;2;1)");
    let r = twist_ramified(&m).unwrap();
    assert!(is_isomorphic(&r, &module("Dc(2;2;1)")).unwrap().is_some());
    let u = twist_unramified(&module("Dpc(12;0;4;0;3)")).unwrap();
    assert!(is_isomorphic(&u, &module("Dpc(12;0;4;1;3)")).unwrap().is_some());
    let uu = twist_unramified(&twist_unramified(&m).unwrap()).unwrap();
    assert!(is_isomorphic(&uu, &m).unwrap().is_some());
    assert!(matches!(
        twist_ramified(&module("Dpc(4;0;0)")),
        Err(PhiGalError::CatalogMiss(_))
    ));
    assert_eq!(ramified_partner("Lg").unwrap(), "Lg(sqrt3)");
}

#[test]
fn module_file_round_trip() {
    for s in ["Dc(2;-1;1)", "Dpcng(3;0;4)", "Dpcg(3;3,-2)"] {
        let m = module(s);
        let file = ModuleFile::from_module(&m);
        let back = ModuleFile::parse(&file.to_json()).unwrap().to_module().unwrap();
        assert!(is_isomorphic(&m, &back).unwrap().is_some(), "{s}");
    }
    let mut file = ModuleFile::from_module(&module("Dc(1;0;0)"));
    file.phi[0][1] = "3+".into();
    assert!(matches!(file.to_module(), Err(PhiGalError::Semilinear(_))));
}

#[test]
fn module_validation() {
    // phi must commute with the Galois action.
    let bad = PhiGalModule::new(
        "Q3(zeta4,pi4)",
        K0Matrix::from_ints([[0, -3], [1, 1]], 1, 2),
        base("Dpc(4;0;0)").galois().to_vec(),
    );
    assert!(matches!(bad, Err(PhiGalError::InvalidModule(_))));
    let missing = PhiGalModule::new("Q3(sqrt3)", K0Matrix::from_ints([[0, -3], [1, 0]], 0, 1), vec![]);
    assert!(missing.is_err());
}
