use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::module::{FilteredModule, KVector, PhiGalModule};
use super::PhiGalError;
use crate::local_fields::{catalog, FieldElement, TowerField};
use crate::semilinear::{to_rational, K0Elem, K0Matrix, Scalar};

pub const MODULE_SCHEMA: &str = "phigal-module/1";

/// On-disk form of a filtered module. See `docs/module-format.md`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleFile {
    pub schema: String,
    pub field_label: String,
    /// Label of the catalog entry whose generators the `galois` keys name.
    pub group_presentation_ref: String,
    pub phi: [[String; 2]; 2],
    pub galois: BTreeMap<String, [[String; 2]; 2]>,
    /// Coordinates of a generator of Fil^1 in the basis 1, pi, ..., pi^(e-1);
    /// each coordinate is an element of the unramified part, written like a
    /// matrix entry.
    pub fil: [Vec<String>; 2],
}

fn tidy(s: &Scalar) -> Scalar {
    match s {
        Scalar::Approx(_) => to_rational(s).map(Scalar::Exact).unwrap_or_else(|| s.clone()),
        exact => exact.clone(),
    }
}

fn coord_text(x: &FieldElement) -> Vec<String> {
    x.coords()
        .iter()
        .map(|c| {
            let k = K0Elem::from_qp2(c);
            K0Elem::new(tidy(&k.re), tidy(&k.im)).to_text()
        })
        .collect()
}

fn parse_coords(field: &Arc<TowerField>, which: &str, items: &[String]) -> Result<FieldElement, PhiGalError> {
    let e = field.ramification_index() as usize;
    if items.len() > e {
        return Err(PhiGalError::Parse(format!(
            "fil {which} has {} coordinates, field has e = {e}",
            items.len()
        )));
    }
    let mut coords = Vec::with_capacity(e);
    for (k, s) in items.iter().enumerate() {
        let v = K0Elem::parse_text(s).map_err(|pos| {
            PhiGalError::Parse(format!("fil {which}[{k}]: bad value {s:?} at position {pos}"))
        })?;
        if field.unramified_degree() == 1 && !v.is_rational() {
            return Err(PhiGalError::Parse(format!("fil {which}[{k}]: {s:?} is not in Q3")));
        }
        coords.push(v.to_qp2());
    }
    while coords.len() < e {
        coords.push(K0Elem::zero().to_qp2());
    }
    Ok(FieldElement::new(field, coords))
}

impl ModuleFile {
    pub fn from_module(d: &FilteredModule) -> Self {
        let base = &*d.base;
        ModuleFile {
            schema: MODULE_SCHEMA.into(),
            field_label: base.field_label().into(),
            group_presentation_ref: base.field_label().into(),
            phi: base.phi().entries_text(),
            galois: base
                .galois()
                .iter()
                .map(|(n, m)| (n.clone(), m.entries_text()))
                .collect(),
            fil: [coord_text(&d.fil[0]), coord_text(&d.fil[1])],
        }
    }

    /// Builds and validates the module. Twists of the Galois matrices come
    /// from the catalog presentation; phi is always sigma-semilinear.
    pub fn to_module(&self) -> Result<FilteredModule, PhiGalError> {
        if self.schema != MODULE_SCHEMA {
            return Err(PhiGalError::Parse(format!(
                "schema {:?}, expected {MODULE_SCHEMA:?}",
                self.schema
            )));
        }
        if self.group_presentation_ref != self.field_label {
            return Err(PhiGalError::Parse(format!(
                "group_presentation_ref {:?} does not match field_label {:?}",
                self.group_presentation_ref, self.field_label
            )));
        }
        let entry = catalog().get(&self.field_label)?;
        let field = entry.field();
        let group = entry.group()?;
        let f = field.unramified_degree();
        let phi = K0Matrix::from_text(&self.phi, 1 % f, f)?;
        let mut galois = Vec::new();
        for (name, rows) in &self.galois {
            let auto = group
                .generator_automorphism(name)
                .ok_or_else(|| PhiGalError::Parse(format!("unknown generator {name:?}")))?;
            let m = K0Matrix::from_text(rows, auto.unramified_exponent() % f, f)?;
            galois.push((name.clone(), m));
        }
        let base = PhiGalModule::new(&self.field_label, phi, galois)?;
        let fil: KVector = [
            parse_coords(&field, "x", &self.fil[0])?,
            parse_coords(&field, "y", &self.fil[1])?,
        ];
        FilteredModule::new(Arc::new(base), fil)
    }

    pub fn parse(json: &str) -> Result<Self, PhiGalError> {
        serde_json::from_str(json).map_err(|e| PhiGalError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("module file serializes")
    }
}
