use std::sync::Arc;

use super::{FieldElement, LocalFieldError, Qp2, TowerField};
use crate::gf9::F9;
use crate::padic::{newton_cap, PrecisionPolicy};

pub fn poly_eval(coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = x.field().zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

pub fn poly_derivative(coeffs: &[FieldElement]) -> Vec<FieldElement> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale(&Qp2::from_i64(i as i64)))
        .collect()
}

/// Coefficients of `f(r + Y)`.
fn taylor_shift(coeffs: &[FieldElement], r: &FieldElement) -> Vec<FieldElement> {
    let mut c = coeffs.to_vec();
    let n = c.len() - 1;
    for i in 0..n {
        for j in (i..n).rev() {
            c[j] = c[j].add(&r.mul(&c[j + 1]));
        }
    }
    c
}

fn residue_poly_eval(p: &[F9], x: F9) -> F9 {
    p.iter().rev().fold(F9::ZERO, |acc, &c| acc.mul(x).add(c))
}

fn residue_poly_derivative(p: &[F9]) -> Vec<F9> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c.mul(F9::from_f3(i as i64)))
        .collect()
}

pub fn int_poly(field: &Arc<TowerField>, coeffs: &[i64]) -> Vec<FieldElement> {
    coeffs.iter().map(|&c| field.int(c)).collect()
}

struct Search<'a> {
    field: Arc<TowerField>,
    f: &'a [FieldElement],
    df: Vec<FieldElement>,
    policy: PrecisionPolicy,
    max_depth: i64,
    roots: Vec<FieldElement>,
}

impl Search<'_> {
    fn newton(&self, seed: FieldElement) -> Result<FieldElement, LocalFieldError> {
        let cap = 2 * newton_cap(&self.policy);
        let mut x = seed;
        for _ in 0..cap {
            let fx = poly_eval(self.f, &x);
            if fx.is_zero() {
                return Ok(x);
            }
            let dfx = poly_eval(&self.df, &x);
            let step = fx.div(&dfx)?;
            if step.is_zero() {
                return Ok(x);
            }
            x = x.sub(&step);
        }
        let fx = poly_eval(self.f, &x);
        if fx.is_zero() {
            Ok(x)
        } else {
            Err(LocalFieldError::PrecisionExhausted(format!(
                "Newton lift stalled in {}",
                self.field.label()
            )))
        }
    }

    /// Roots of the form `r + pi^k Y` with Y integral.
    fn descend(&mut self, r: FieldElement, k: i64) -> Result<(), LocalFieldError> {
        if k > self.max_depth {
            return Err(LocalFieldError::PrecisionExhausted(format!(
                "root search in {} exceeded depth {}",
                self.field.label(),
                self.max_depth
            )));
        }
        let field = Arc::clone(&self.field);
        let shifted = taylor_shift(self.f, &r);
        let pik = field.pi_pow(k);
        let mut scale = field.one();
        let mut h = Vec::with_capacity(shifted.len());
        for c in &shifted {
            h.push(c.mul(&scale));
            scale = scale.mul(&pik);
        }
        let c = h
            .iter()
            .filter_map(FieldElement::pi_valuation)
            .min()
            .ok_or_else(|| {
                LocalFieldError::PrecisionExhausted("all shifted coefficients vanish".into())
            })?;
        let norm = field.pi_pow(-c);
        let reduced: Vec<F9> = h
            .iter()
            .map(|x| {
                let y = x.mul(&norm);
                if y.pi_valuation().map_or(true, |v| v > 0) {
                    F9::ZERO
                } else {
                    y.residue()
                }
            })
            .collect();
        let dreduced = residue_poly_derivative(&reduced);
        for rho in field.residues().collect::<Vec<_>>() {
            if !residue_poly_eval(&reduced, rho).is_zero() {
                continue;
            }
            let next = r.add(&FieldElement::from_qp2(&field, Qp2::lift(rho)).mul(&pik));
            if !residue_poly_eval(&dreduced, rho).is_zero() {
                let root = self.newton(next)?;
                self.roots.push(root);
            } else {
                self.descend(next, k + 1)?;
            }
        }
        Ok(())
    }
}

/// All roots in `field` of a monic polynomial with integral coefficients.
///
/// Roots come back in lexicographic order of their pi-adic digit expansions,
/// digits ordered by index `a + 3b`.
pub fn find_roots_in_field(
    field: &Arc<TowerField>,
    coeffs: &[FieldElement],
    policy: &PrecisionPolicy,
) -> Result<Vec<FieldElement>, LocalFieldError> {
    if coeffs.len() < 2 {
        return Ok(Vec::new());
    }
    if coeffs.iter().any(|c| !c.same_field(&field.zero())) {
        return Err(LocalFieldError::FieldMismatch);
    }
    let mut search = Search {
        field: Arc::clone(field),
        f: coeffs,
        df: poly_derivative(coeffs),
        policy: *policy,
        max_depth: field.ramification_index() as i64 * policy.working_precision as i64 / 2,
        roots: Vec::new(),
    };
    search.descend(field.zero(), 0)?;
    let roots = search.roots;
    let bound = policy.min_acceptable as i64;
    for root in &roots {
        let value = poly_eval(coeffs, root);
        if !value.agrees_to(&field.zero(), bound) {
            return Err(LocalFieldError::PrecisionExhausted(format!(
                "root residual {} below {bound}",
                value.valuation()
            )));
        }
    }
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            if a.agrees_to(b, bound) {
                return Err(LocalFieldError::PrecisionExhausted(
                    "two roots agree to working precision".into(),
                ));
            }
        }
    }
    Ok(roots)
}
