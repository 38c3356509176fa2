use super::{PadicError, PadicNumber, PrecisionPolicy, Valuation};

/// Newton step budget: quadratic convergence plus a margin.
pub fn newton_cap(policy: &PrecisionPolicy) -> u32 {
    2 * (32 - policy.working_precision.max(1).leading_zeros()) + 8
}

/// Horner evaluation; coefficients in ascending degree.
pub fn poly_eval(coeffs: &[PadicNumber], x: &PadicNumber) -> PadicNumber {
    coeffs
        .iter()
        .rev()
        .fold(PadicNumber::exact_zero(), |acc, c| acc.mul(x).add(c))
}

pub fn poly_derivative(coeffs: &[PadicNumber]) -> Vec<PadicNumber> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul(&PadicNumber::from_i64(i as i64)))
        .collect()
}

fn val_int(x: &PadicNumber) -> Option<i64> {
    match x.val() {
        Valuation::Finite(r) => Some(r.to_integer()),
        Valuation::Infinity => None,
    }
}

/// Lift `seed` to a root of `f` by Newton iteration.
///
/// Requires `v(f(seed)) > 2 v(f'(seed))`. The result is truncated to the
/// precision the iteration actually certifies, i.e. `v(f(r)) - v(f'(r))`.
pub fn hensel_root(
    f: &[PadicNumber],
    seed: &PadicNumber,
    policy: &PrecisionPolicy,
) -> Result<PadicNumber, PadicError> {
    let df = poly_derivative(f);
    let f0 = poly_eval(f, seed);
    let d0 = poly_eval(&df, seed);
    let vd = match val_int(&d0) {
        Some(v) => v,
        None => {
            return Err(PadicError::HenselPreconditionViolated {
                value: f0.val().to_string(),
                derivative: "inf".into(),
            })
        }
    };
    let vf = f0.val_or_bound();
    if vf <= 2 * vd {
        return Err(PadicError::HenselPreconditionViolated {
            value: f0.val().to_string(),
            derivative: vd.to_string(),
        });
    }
    let cap = newton_cap(policy);
    let target = policy.working_precision as i64;
    let mut r = *seed;
    for _ in 0..cap {
        let fr = poly_eval(f, &r);
        let dr = poly_eval(&df, &r);
        let vdr = val_int(&dr).ok_or(PadicError::InversionOfZero)?;
        if fr.is_zero() || fr.val_or_bound() - vdr >= target {
            let certified = fr.val_or_bound() - vdr;
            return Ok(r.truncate_abs(certified));
        }
        r = r.sub(&fr.div(&dr)?);
    }
    Err(PadicError::NonConvergence(cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(c: &[i64]) -> Vec<PadicNumber> {
        c.iter().map(|&x| PadicNumber::from_i64(x)).collect()
    }

    #[test]
    fn root_of_x2_minus_4_near_one_is_minus_two() {
        let p = PrecisionPolicy::default();
        let r = hensel_root(&ints(&[-4, 0, 1]), &PadicNumber::from_i64(1), &p).unwrap();
        assert!(r.equal_to_precision(&PadicNumber::from_i64(-2)));
        assert!(r.abs_precision() >= p.min_acceptable as i64);
    }

    #[test]
    fn sqrt_seven_mod_243() {
        let p = PrecisionPolicy::default();
        let r = hensel_root(&ints(&[-7, 0, 1]), &PadicNumber::from_i64(1), &p).unwrap();
        let low = r.truncate_abs(5);
        assert_eq!(low.unit(), 175);
        assert_eq!((175u64 * 175) % 243, 7);
    }

    #[test]
    fn inseparable_reduction_is_rejected() {
        let p = PrecisionPolicy::default();
        let err = hensel_root(&ints(&[1, 1, 1]), &PadicNumber::from_i64(1), &p).unwrap_err();
        assert!(matches!(err, PadicError::HenselPreconditionViolated { .. }));
    }

    #[test]
    fn cap_matches_policy() {
        assert_eq!(newton_cap(&PrecisionPolicy::default()), 2 * 6 + 8);
    }
}
