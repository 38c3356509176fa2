use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use serde::Serialize;

use super::module::{k0_in_field, same_line, FilteredModule, PhiGalModule};
use super::PhiGalError;
use crate::padic::Valuation;
use crate::semilinear::{
    char_poly, coordinates_in, fixed_space, to_rational, K0Elem, K0Matrix, K0Vector, Scalar,
};

/// Window `|n| <= 6` for the rationality check on Weil traces.
pub const DEFAULT_WEIL_WINDOW: i64 = 6;

fn rat_text(r: &BigRational) -> String {
    Scalar::Exact(r.clone()).to_text()
}

#[derive(Clone, Debug, Serialize)]
pub struct WeilTrace {
    /// Group element as a word in the generators (`1` for the identity).
    pub element: String,
    pub exponent: i64,
    /// Recognized rational trace, if any.
    pub trace: Option<String>,
    /// Raw trace in K0 text form.
    pub raw: String,
}

impl WeilTrace {
    pub fn is_rational(&self) -> bool {
        self.trace.is_some()
    }
}

/// Traces of `g o phi^-n` for every group element `g` and every `n` with
/// `n = m(g) mod f`, `|n| <= n_max`.
pub fn weil_traces(d: &PhiGalModule, n_max: i64) -> Result<Vec<WeilTrace>, PhiGalError> {
    let f = d.f() as i64;
    let mut powers = std::collections::HashMap::new();
    for n in -n_max..=n_max {
        powers.insert(n, d.phi().pow(-n)?);
    }
    let mut out = Vec::new();
    for (idx, el) in d.group().elements().iter().enumerate() {
        let g = d.element_matrix(idx);
        let m = el.automorphism.unramified_exponent() as i64;
        for n in -n_max..=n_max {
            if (n - m).rem_euclid(f) != 0 {
                continue;
            }
            let w = g.compose(&powers[&n]);
            debug_assert_eq!(w.twist, 0);
            let tr = w.trace();
            let rational = if tr.im.is_zero() { to_rational(&tr.re) } else { None };
            out.push(WeilTrace {
                element: el.word.clone(),
                exponent: n,
                trace: rational.as_ref().map(rat_text),
                raw: tr.to_text(),
            });
        }
    }
    Ok(out)
}

/// Newton number `v3(det phi)`.
pub fn t_newton(d: &PhiGalModule) -> Ratio<i64> {
    match d.phi().det().val() {
        Valuation::Finite(v) => v,
        Valuation::Infinity => Ratio::from_integer(i64::MAX),
    }
}

/// Hodge number of a Hodge-Tate (0,1) filtration: `Fil^1` is a line in degree 1.
pub fn t_hodge(_d: &FilteredModule) -> i64 {
    1
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionsReport {
    /// Char poly of phi on D0 as `[c0, c1, 1]` (for `X^2 + c1 X + c0`).
    pub char_poly: Option<[String; 3]>,
    pub trace: Option<i64>,
    pub cond1: bool,
    pub weil_window: i64,
    pub weil_checked: usize,
    pub weil_failures: Vec<String>,
    pub cond2: bool,
    pub det_phi: String,
    pub generator_dets: Vec<(String, String)>,
    pub cond3: bool,
    pub cond4: bool,
}

impl ConditionsReport {
    pub fn all_pass(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3 && self.cond4
    }
}

/// Q3-basis of the unramified descent D0 = D^w (all of D when f = 1).
/// Two vectors for any genuine descent datum.
pub fn descent_basis(d: &PhiGalModule) -> Vec<K0Vector> {
    let lifts: Vec<K0Matrix> = d
        .galois()
        .iter()
        .filter(|(name, _)| {
            d.group()
                .generator_automorphism(name)
                .is_some_and(|a| a.unramified_exponent() % 2 == 1)
        })
        .map(|(_, m)| m.clone())
        .take(1)
        .collect();
    if d.f() == 2 && lifts.is_empty() {
        return Vec::new();
    }
    fixed_space(&lifts, d.f(), d.policy())
}

/// Frobenius on D0, in the basis from [`descent_basis`].
fn phi_on_descent(d: &PhiGalModule) -> Option<K0Matrix> {
    let f = d.f();
    let policy = d.policy();
    let basis = descent_basis(d);
    if basis.len() != 2 {
        return None;
    }
    let mut cols = Vec::new();
    for v in &basis {
        cols.push(coordinates_in(&basis, &d.phi().apply(v), f, policy)?);
    }
    let m = [
        [K0Elem::real(cols[0][0].clone()), K0Elem::real(cols[1][0].clone())],
        [K0Elem::real(cols[0][1].clone()), K0Elem::real(cols[1][1].clone())],
    ];
    Some(K0Matrix::linear(m, 1))
}

/// Integral trace of Frobenius on D0, when it has one.
pub(crate) fn phi_on_descent_trace(d: &PhiGalModule) -> Option<i64> {
    let cp = char_poly(&phi_on_descent(d)?).ok()?;
    integral(&cp[1])
}

fn integral(r: &BigRational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

/// Conditions (1)-(4): char poly on D0, rational Weil traces, determinant
/// `K0{-1}`, and a Galois-stable Hodge-Tate (0,1) line.
pub fn check_conditions(dm: &FilteredModule) -> Result<ConditionsReport, PhiGalError> {
    check_conditions_window(dm, DEFAULT_WEIL_WINDOW)
}

/// As [`check_conditions`], with condition (2) checked for |n| <= `window`.
pub fn check_conditions_window(
    dm: &FilteredModule,
    window: i64,
) -> Result<ConditionsReport, PhiGalError> {
    let d = &*dm.base;
    let f = d.f();
    let (char_poly_text, trace, cond1) = match phi_on_descent(d).map(|m| char_poly(&m)) {
        Some(Ok(cp)) => {
            let a = integral(&cp[1]);
            let three = BigRational::from_integer(BigInt::from(3));
            let ok = cp[0] == three && a.is_some_and(|a| a * a <= 12);
            (Some(cp.clone().map(|c| rat_text(&c))), a, ok)
        }
        _ => (None, None, false),
    };

    let traces = weil_traces(d, window)?;
    let weil_failures: Vec<String> = traces
        .iter()
        .filter(|t| !t.is_rational())
        .map(|t| format!("{} at n = {}: {}", t.element, t.exponent, t.raw))
        .collect();

    let det_phi = d.phi().det();
    let third = Scalar::ratio(1, 3);
    let lambda = det_phi.scale(&third);
    let mut maps = vec![K0Matrix::diag(lambda.clone(), lambda, 1, f)];
    let mut generator_dets = Vec::new();
    for (name, m) in d.galois() {
        let dg = m.det();
        generator_dets.push((name.clone(), dg.to_text()));
        maps.push(K0Matrix::diag(dg.clone(), dg, m.twist, f));
    }
    let cond3 = fixed_space(&maps, f, d.policy()).len() == 2;

    let nonzero = !(dm.fil[0].is_zero() && dm.fil[1].is_zero());
    let cond4 = nonzero && d.line_is_stable(&dm.fil)?;

    Ok(ConditionsReport {
        char_poly: char_poly_text,
        trace,
        cond1,
        weil_window: window,
        weil_checked: traces.len(),
        cond2: weil_failures.is_empty(),
        weil_failures,
        det_phi: det_phi.to_text(),
        generator_dets,
        cond3,
        cond4,
    })
}

/// A K0-line stable under phi and the Galois action.
#[derive(Clone, Debug)]
pub struct StableLine {
    pub vector: K0Vector,
    /// Slope: valuation of the phi^f eigenvalue divided by f.
    pub t_n: Ratio<i64>,
}

fn k0_negligible(x: &K0Elem, reference: Valuation, bound: u32) -> bool {
    match (x.val(), reference) {
        (Valuation::Infinity, _) => true,
        (_, Valuation::Infinity) => false,
        (Valuation::Finite(v), Valuation::Finite(r)) => v >= r + Ratio::from_integer(bound as i64),
    }
}

fn vec_val(v: &K0Vector) -> Valuation {
    v[0].val().min(v[1].val())
}

fn k0_proportional(a: &K0Vector, b: &K0Vector, bound: u32) -> bool {
    let det = a[0].mul(&b[1]).sub(&a[1].mul(&b[0]));
    let scale = match (vec_val(a), vec_val(b)) {
        (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x + y),
        _ => return false,
    };
    k0_negligible(&det, scale, bound)
}

/// Every K0-line stable under phi and all Galois generators.
///
/// Candidates are eigenlines of the linear map `phi^f`; they are then
/// filtered for phi- and Galois-stability.
pub fn stable_lines(d: &PhiGalModule) -> Result<Vec<StableLine>, PhiGalError> {
    let f = d.f();
    let bound = d.policy().min_acceptable;
    let mut p = d.phi().clone();
    for _ in 1..f {
        p = p.compose(d.phi());
    }
    let scale = p
        .m
        .iter()
        .flatten()
        .map(K0Elem::val)
        .min()
        .unwrap_or(Valuation::Infinity);
    let neg = |x: &K0Elem| k0_negligible(x, scale, bound);
    if neg(&p.m[0][1]) && neg(&p.m[1][0]) && neg(&p.m[0][0].sub(&p.m[1][1])) {
        let c = &p.m[0][0];
        let even = matches!(c.val(), Valuation::Finite(v) if v.is_integer() && v.to_integer() % 2 == 0);
        if f == 2 && !even {
            return Ok(Vec::new());
        }
        return Err(PhiGalError::InfiniteStableFamily);
    }
    let tr = p.trace();
    let det = p.det();
    let disc = tr.mul(&tr).sub(&det.scale(&Scalar::int(4)));
    let half = Scalar::ratio(1, 2);
    let roots: Vec<K0Elem> = if k0_negligible(&disc, tr.val().min(det.val()), bound) {
        vec![tr.scale(&half)]
    } else {
        let Some(s) = disc.to_qp2().sqrt() else { return Ok(Vec::new()) };
        let s = K0Elem::from_qp2(&s);
        if f == 1 && !s.im.is_zero() {
            return Ok(Vec::new());
        }
        vec![tr.add(&s).scale(&half), tr.sub(&s).scale(&half)]
    };
    let mut out = Vec::new();
    for lambda in roots {
        let n = [
            [p.m[0][0].sub(&lambda), p.m[0][1].clone()],
            [p.m[1][0].clone(), p.m[1][1].sub(&lambda)],
        ];
        let row_val = |r: &[K0Elem; 2]| r[0].val().min(r[1].val());
        let row = if row_val(&n[0]) <= row_val(&n[1]) { &n[0] } else { &n[1] };
        let v: K0Vector = [row[1].neg(), row[0].clone()];
        if matches!(vec_val(&v), Valuation::Infinity) {
            continue;
        }
        let stable = k0_proportional(&d.phi().apply(&v), &v, bound)
            && d.galois().iter().all(|(_, g)| k0_proportional(&g.apply(&v), &v, bound));
        if stable {
            let t_n = match lambda.val() {
                Valuation::Finite(x) => x / Ratio::from_integer(f as i64),
                Valuation::Infinity => continue,
            };
            out.push(StableLine { vector: v, t_n });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LineCheck {
    pub line: [String; 2],
    pub t_n: String,
    pub t_h: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub t_n: String,
    pub t_h: i64,
    pub lines: Vec<LineCheck>,
    pub admissible: bool,
}

/// Weak admissibility: `t_N = t_H`, and `t_H(D') <= t_N(D')` for every stable line.
pub fn is_admissible(dm: &FilteredModule) -> Result<AdmissibilityReport, PhiGalError> {
    let d = &*dm.base;
    let t_n = t_newton(d);
    let t_h = t_hodge(dm);
    let field = d.field();
    let mut lines = Vec::new();
    for l in stable_lines(d)? {
        let vk = [k0_in_field(field, &l.vector[0]), k0_in_field(field, &l.vector[1])];
        let in_fil = same_line(&vk, &dm.fil, d.policy().min_acceptable);
        let th = i64::from(in_fil);
        lines.push(LineCheck {
            line: [l.vector[0].to_text(), l.vector[1].to_text()],
            t_n: l.t_n.to_string(),
            t_h: th,
            ok: Ratio::from_integer(th) <= l.t_n,
        });
    }
    let admissible = t_n == Ratio::from_integer(t_h) && lines.iter().all(|l| l.ok);
    Ok(AdmissibilityReport {
        t_n: t_n.to_string(),
        t_h,
        lines,
        admissible,
    })
}
