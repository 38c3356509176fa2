use std::sync::Arc;

use super::module::{FilteredModule, KVector, PhiGalModule};
use super::PhiGalError;
use crate::local_fields::{catalog, find_roots_in_field, int_poly, FieldElement, TowerField};
use crate::padic::PrecisionPolicy;
use crate::semilinear::{K0Elem, K0Matrix};

/// Twist by the unramified quadratic character: phi becomes -phi.
///
/// On the Dpc(12) rows this exchanges the two epsilon classes.
pub fn twist_unramified(d: &FilteredModule) -> Result<FilteredModule, PhiGalError> {
    let phi = d.base.phi().compose(&K0Matrix::scalar(K0Elem::int(-1), d.base.f()));
    let base = d.base.with_phi(phi)?;
    FilteredModule::new(Arc::new(base), d.fil.clone())
}

/// Catalog field obtained by adjoining sqrt(3), for the rows where that is a
/// catalog field.
pub fn ramified_partner(label: &str) -> Result<String, PhiGalError> {
    match label {
        "Q3" => Ok("Q3(sqrt3)".into()),
        "Lg" => Ok("Lg(sqrt3)".into()),
        "Lng-closure" => Ok("Lng-closure(sqrt3)".into()),
        other => Err(PhiGalError::CatalogMiss(other.to_string())),
    }
}

fn embed(target: &Arc<TowerField>, r: &FieldElement, x: &FieldElement) -> FieldElement {
    let mut acc = target.zero();
    let mut pow = target.one();
    for c in x.coords() {
        acc = acc.add(&pow.scale(c));
        pow = pow.mul(r);
    }
    acc
}

/// Twist by the quadratic character cutting out K(sqrt3)/K, viewed as a
/// module over the larger field.
///
/// Each generator g' of the new group acts by `chi(g') * D(h)` where `h` is
/// its restriction to K and `chi(g') = g'(sqrt3)/sqrt3`. The restriction is
/// found by matching images of a uniformizer of K embedded into K(sqrt3).
pub fn twist_ramified(d: &FilteredModule) -> Result<FilteredModule, PhiGalError> {
    let base = &*d.base;
    let partner = ramified_partner(base.field_label())?;
    let entry = catalog().get(&partner)?;
    let big = entry.field();
    let big_group = entry.group()?;
    let small = base.field();
    let policy = PrecisionPolicy::default();
    let bound = i64::from(policy.min_acceptable);
    let f = base.f();
    if big.unramified_degree() != f {
        return Err(PhiGalError::CatalogMiss(partner));
    }

    let roots = find_roots_in_field(&big, &int_poly(&big, small.eisenstein()), &policy)?;
    let r = roots
        .into_iter()
        .next()
        .ok_or_else(|| PhiGalError::CatalogMiss(format!("{partner}: no embedding")))?;
    let sqrt3 = find_roots_in_field(&big, &int_poly(&big, &[-3, 0, 1]), &policy)?
        .into_iter()
        .next()
        .ok_or_else(|| PhiGalError::CatalogMiss(format!("{partner}: no sqrt(3)")))?;

    let small_group = base.group();
    let mut galois = Vec::new();
    for name in big_group.generator_names() {
        let g = big_group.generator_automorphism(name).expect("generator");
        let image = g.apply(&r)?;
        let u = g.unramified_exponent() % f;
        let h = small_group
            .elements()
            .iter()
            .position(|el| {
                el.automorphism.unramified_exponent() % f == u
                    && embed(&big, &r, el.automorphism.image_of_pi()).agrees_to(&image, bound)
            })
            .ok_or_else(|| PhiGalError::InvalidModule(format!("no restriction of {name}")))?;
        let chi = g.apply(&sqrt3)?.div(&sqrt3)?;
        let sign = if chi.agrees_to(&big.one(), bound) { 1 } else { -1 };
        let m = base.element_matrix(h);
        galois.push((name.clone(), m.compose(&K0Matrix::scalar(K0Elem::int(sign), f))));
    }
    let twisted = PhiGalModule::new(&partner, base.phi().clone(), galois)?;
    let fil: KVector = [embed(&big, &r, &d.fil[0]), embed(&big, &r, &d.fil[1])];
    FilteredModule::new(Arc::new(twisted), fil)
}
