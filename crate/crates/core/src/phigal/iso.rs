use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::conditions::{check_conditions, is_admissible, phi_on_descent_trace};
use super::label::{abelian_mus, canonical_base, canonical_module, ClassLabel, Kind};
use super::module::{
    apply_linear, det2, flatten_field, min_valuation, negligible, FilteredModule, KVector,
    PhiGalModule, ProjParam,
};
use super::PhiGalError;
use crate::padic::Valuation;
use crate::semilinear::{
    combine_matrices, equivariant_solution_space, nullspace, to_rational, K0Matrix, Scalar,
};

fn constraints(
    d: &PhiGalModule,
    d2: &PhiGalModule,
) -> Result<Vec<(K0Matrix, K0Matrix)>, PhiGalError> {
    if d.field_label() != d2.field_label() {
        return Err(PhiGalError::WrongField {
            expected: d.field_label().to_string(),
            found: d2.field_label().to_string(),
        });
    }
    let mut out = vec![(d.phi().clone(), d2.phi().clone())];
    for (name, m) in d.galois() {
        let m2 = d2
            .generator_matrix(name)
            .ok_or_else(|| PhiGalError::InvalidModule(format!("missing generator {name}")))?;
        out.push((m.clone(), m2.clone()));
    }
    Ok(out)
}

fn is_invertible(m: &K0Matrix, bound: u32) -> bool {
    let scale = m
        .m
        .iter()
        .flatten()
        .map(|x| x.val())
        .min()
        .unwrap_or(Valuation::Infinity);
    match (m.det().val(), scale) {
        (Valuation::Finite(d), Valuation::Finite(s)) => {
            d < s + s + num_rational::Ratio::from_integer(bound as i64)
        }
        _ => false,
    }
}

/// An invertible element of the Q3-span of `basis`, if one exists.
///
/// Tries the basis vectors and their sum, then seeded random integer
/// combinations. The determinant is a nonzero polynomial of degree at most 4
/// on the span when any invertible element exists, so a failed search over
/// 40 draws from [-50, 50] is wrong with probability below 1e-60.
fn find_invertible(basis: &[K0Matrix], f: u32, bound: u32) -> Option<K0Matrix> {
    if basis.is_empty() {
        return None;
    }
    let mut tries: Vec<Vec<Scalar>> = (0..basis.len())
        .map(|i| {
            (0..basis.len())
                .map(|j| Scalar::int(i64::from(i == j)))
                .collect()
        })
        .collect();
    tries.push(vec![Scalar::one(); basis.len()]);
    let mut rng = StdRng::seed_from_u64(0x3_1415);
    for _ in 0..40 {
        tries.push((0..basis.len()).map(|_| Scalar::int(rng.gen_range(-50..=50))).collect());
    }
    tries
        .iter()
        .map(|c| combine_matrices(basis, c, f))
        .find(|m| is_invertible(m, bound))
}

/// Transport of structure along an invertible K0-linear `x`: the module
/// `x D` with `phi' = x phi x^-1`, `g' = x g x^-1` and `Fil' = x Fil`.
/// `x` is then an isomorphism `d -> conjugate(d, x)`.
pub fn conjugate(d: &FilteredModule, x: &K0Matrix) -> Result<FilteredModule, PhiGalError> {
    if x.twist != 0 {
        return Err(PhiGalError::InvalidModule("conjugating matrix must be K0-linear".into()));
    }
    let xi = x.inverse()?;
    let base = &*d.base;
    let along = |m: &K0Matrix| x.compose(m).compose(&xi);
    let galois = base.galois().iter().map(|(n, m)| (n.clone(), along(m))).collect();
    let moved = PhiGalModule::new(base.field_label(), along(base.phi()), galois)?;
    let fil = apply_linear(base.field(), x, &d.fil);
    FilteredModule::new(Arc::new(moved), fil)
}

/// An isomorphism of the underlying (phi, Gal)-modules `d -> d2`.
pub fn unfiltered_isomorphism(
    d: &PhiGalModule,
    d2: &PhiGalModule,
) -> Result<Option<K0Matrix>, PhiGalError> {
    let space = equivariant_solution_space(&constraints(d, d2)?, d.f(), d.policy())?;
    Ok(find_invertible(&space.basis, d.f(), d.policy().min_acceptable))
}

/// An isomorphism of filtered modules `d -> d2`, as its matrix, if one exists.
pub fn is_isomorphic(
    d: &FilteredModule,
    d2: &FilteredModule,
) -> Result<Option<K0Matrix>, PhiGalError> {
    let base = &*d.base;
    let space = equivariant_solution_space(&constraints(base, &d2.base)?, base.f(), base.policy())?;
    Ok(isomorphism_within(&space.basis, d, d2))
}

/// Intertwiners `d.base -> d2.base`, as a Q3-basis.
pub(crate) fn intertwiners(
    d: &PhiGalModule,
    d2: &PhiGalModule,
) -> Result<Vec<K0Matrix>, PhiGalError> {
    Ok(equivariant_solution_space(&constraints(d, d2)?, d.f(), d.policy())?.basis)
}

/// Filtered isomorphism chosen from the span of precomputed intertwiners.
pub(crate) fn isomorphism_within(
    space: &[K0Matrix],
    d: &FilteredModule,
    d2: &FilteredModule,
) -> Option<K0Matrix> {
    if space.is_empty() {
        return None;
    }
    let base = &*d.base;
    let bound = base.policy().min_acceptable;
    // X(Fil) lies in Fil' iff det[X fil, fil'] = 0, linear in X.
    let field = base.field();
    let cols: Vec<Vec<Scalar>> = space
        .iter()
        .map(|x| flatten_field(&det2(&apply_linear(field, x, &d.fil), &d2.fil)))
        .collect();
    let rows: Vec<Vec<Scalar>> = (0..cols[0].len())
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let kernel = nullspace(rows, space.len(), bound);
    let sub: Vec<K0Matrix> = kernel
        .iter()
        .map(|c| combine_matrices(space, c, base.f()))
        .collect();
    find_invertible(&sub, base.f(), bound)
}

fn candidates(d: &PhiGalModule) -> Result<Vec<ClassLabel>, PhiGalError> {
    let label = d.field_label();
    let zero = ProjParam::int(0);
    let trace = || {
        phi_on_descent_trace(d).ok_or_else(|| {
            PhiGalError::Unclassifiable("Frobenius on D0 has no integral trace".into())
        })
    };
    Ok(match label {
        "Q3" => vec![ClassLabel::dc(1, trace()?, zero)],
        "Q3(sqrt3)" => vec![ClassLabel::dc(2, trace()?, zero)],
        "Q3(zeta4,pi4)" => vec![ClassLabel::dpc4(zero)],
        "Lng-closure" => vec![ClassLabel::dpcng(3, zero)],
        "Lng-closure(sqrt3)" => vec![ClassLabel::dpcng(6, zero)],
        "Lg" | "Lg(sqrt3)" => {
            let e = if label == "Lg" { 3 } else { 6 };
            let a = trace()?;
            let mus = abelian_mus(a);
            if mus.is_empty() {
                return Err(PhiGalError::Unclassifiable(format!(
                    "abelian wild module with trace {a} not divisible by 3"
                )));
            }
            mus.iter().map(|&mu| ClassLabel::dpcg(e, a, mu)).collect()
        }
        k if k.starts_with('K') => {
            let i: i64 = k[1..].parse().unwrap_or(0);
            if !(1..=5).contains(&i) {
                return Err(PhiGalError::Unclassifiable(format!(
                    "degree 12 modules are classified over K1..K5, not {k}"
                )));
            }
            vec![ClassLabel::dpc12(i, 0, zero.clone()), ClassLabel::dpc12(i, 1, zero)]
        }
        other => {
            return Err(PhiGalError::Unclassifiable(format!("no classification row for {other}")))
        }
    })
}

fn locate(d: &PhiGalModule) -> Result<(ClassLabel, Arc<PhiGalModule>, K0Matrix), PhiGalError> {
    for cand in candidates(d)? {
        let Ok(base) = canonical_base(&cand) else { continue };
        if let Some(x) = unfiltered_isomorphism(d, &base)? {
            return Ok((cand.family(), base, x));
        }
    }
    Err(PhiGalError::Unclassifiable(
        "not isomorphic to any canonical module of its row".into(),
    ))
}

/// The family label (no filtration parameter) of an unfiltered module.
pub fn classify_unfiltered(d: &PhiGalModule) -> Result<ClassLabel, PhiGalError> {
    Ok(locate(d)?.0)
}

/// Point `t` of P^1(Q3) with `Fil = line(t0 v1 + t1 v2)` in the fixed-plane basis.
fn plane_point(base: &PhiGalModule, fil: &KVector) -> Result<ProjParam, PhiGalError> {
    let bound = base.policy().min_acceptable;
    let [v1, v2] = base.fixed_plane()?;
    let d1 = det2(&v1, fil);
    let d2 = det2(&v2, fil);
    let scale = |v: &KVector| match (min_valuation(v), min_valuation(fil)) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
        _ => Valuation::Infinity,
    };
    if negligible(&d1, scale(&v1), bound) {
        return Ok(ProjParam::Infinity);
    }
    let t = d2.neg().div(&d1)?;
    let tv = t.valuation();
    let coords = t.coords();
    let rational_part = coords[0].re;
    let stray = coords[0].im.val().min(
        coords[1..]
            .iter()
            .map(|c| c.val())
            .min()
            .unwrap_or(Valuation::Infinity),
    );
    let ok = match (stray, tv) {
        (Valuation::Infinity, _) | (_, Valuation::Infinity) => true,
        (Valuation::Finite(s), Valuation::Finite(v)) => {
            s >= v + num_rational::Ratio::from_integer(bound as i64)
        }
    };
    if !ok {
        return Err(PhiGalError::Unclassifiable(
            "filtration line does not meet the Galois-fixed plane".into(),
        ));
    }
    let s = Scalar::Approx(rational_part);
    Ok(match to_rational(&s) {
        Some(r) => ProjParam::Rational(r),
        None => ProjParam::Padic(rational_part),
    })
}

/// Name the isomorphism class of an admissible module satisfying (1)-(4).
///
/// The unfiltered part is matched against the canonical modules of its row by
/// solving the intertwining equations; the filtration is carried across and
/// normalized the way the row's classification prescribes (collapsed to 0 or
/// {0, 1} for the tame rows, dropped for the abelian wild rows, read off as a
/// fixed-plane point elsewhere). The result is checked by an explicit
/// isomorphism to the canonical module.
pub fn classify(d: &FilteredModule) -> Result<ClassLabel, PhiGalError> {
    let report = check_conditions(d)?;
    if !report.all_pass() {
        return Err(PhiGalError::Unclassifiable(format!(
            "conditions (1)-(4): {} {} {} {}",
            report.cond1, report.cond2, report.cond3, report.cond4
        )));
    }
    if !is_admissible(d)?.admissible {
        return Err(PhiGalError::Unclassifiable("module is not admissible".into()));
    }
    let (family, base, x) = locate(&d.base)?;
    let bound = base.policy().min_acceptable;
    let fil = apply_linear(base.field(), &x, &d.fil);
    let label = match family.kind {
        Kind::Dpcg => family,
        Kind::Dc if !family.is_ordinary() => family.with_param(ProjParam::int(0)),
        Kind::Dc => {
            let scale = min_valuation(&fil);
            if negligible(&fil[1], scale, bound) {
                return Err(PhiGalError::Unclassifiable("ordinary filtration at infinity".into()));
            }
            let alpha = if negligible(&fil[0], scale, bound) { 0 } else { 1 };
            family.with_param(ProjParam::int(alpha))
        }
        _ => family.with_param(plane_point(&base, &fil)?),
    };
    let canonical = canonical_module(&label)?;
    if is_isomorphic(d, &canonical)?.is_none() {
        return Err(PhiGalError::Unclassifiable(format!(
            "normal form {label} is not isomorphic to the input"
        )));
    }
    Ok(label)
}
