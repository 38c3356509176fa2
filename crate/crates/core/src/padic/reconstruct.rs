use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::{PadicNumber, POW3};

/// Recover `a/b` with `|a|, |b| <= height_bound`, `3 ∤ b`, congruent to `x`
/// at its full precision. Returns `None` when no such fraction exists.
///
/// Uses the half-extended Euclidean algorithm on the unit part. Uniqueness
/// needs `2 * height_bound^2 < 3^precision`; callers are expected to keep the
/// bound well inside that.
pub fn rational_reconstruct(x: &PadicNumber, height_bound: u64) -> Option<BigRational> {
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let n = x.precision();
    let m = POW3[n as usize] as i128;
    let bound = height_bound as i128;
    let (mut r0, mut r1) = (m, x.unit() as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if s1 == 0 || s1.abs() > bound || s1 % 3 == 0 {
        return None;
    }
    let (mut a, mut b) = (r1, s1);
    if b < 0 {
        a = -a;
        b = -b;
    }
    if a.gcd(&b) != 1 {
        return None;
    }
    // a ≡ b·u (mod 3^n) must hold exactly; the Euclid invariant guarantees it.
    debug_assert_eq!((a - b * x.unit() as i128).rem_euclid(m), 0);
    let v = x.val_or_bound();
    let three = BigInt::from(3);
    let (mut num, mut den) = (BigInt::from(a), BigInt::from(b));
    if v >= 0 {
        num *= three.pow(v as u32);
    } else {
        den *= three.pow((-v) as u32);
    }
    let r = BigRational::new(num, den);
    if r.numer().magnitude() > &BigInt::from(height_bound).magnitude().clone()
        || r.denom().magnitude() > &BigInt::from(height_bound).magnitude().clone()
    {
        return None;
    }
    Some(r)
}
