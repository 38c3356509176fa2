use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};

use super::PadicError;

/// The residue characteristic. Everything in this crate is hardwired to it.
pub const PRIME: u64 = 3;

/// Largest number of base-3 unit digits a [`PadicNumber`] can carry; 3^40 fits in a `u64`.
pub const MAX_PRECISION: u32 = 40;

/// Absolute precision used for zeros that are known exactly.
const EXACT_ZERO_ABS: i64 = 1 << 40;

pub(crate) const POW3: [u64; 41] = {
    let mut t = [1u64; 41];
    let mut i = 1;
    while i < 41 {
        t[i] = t[i - 1] * 3;
        i += 1;
    }
    t
};

/// A valuation normalized by v(3) = 1. Ramified elements have fractional values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Ratio<i64>),
    Infinity,
}

impl Valuation {
    pub fn int(v: i64) -> Self {
        Valuation::Finite(Ratio::from_integer(v))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinity)
    }

    pub fn finite(&self) -> Option<Ratio<i64>> {
        match self {
            Valuation::Finite(r) => Some(*r),
            Valuation::Infinity => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
            (Valuation::Infinity, _) => Ordering::Greater,
            (_, Valuation::Infinity) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Infinity => write!(f, "inf"),
            Valuation::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Valuation::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// A truncated 3-adic number `3^valuation * unit + O(3^(valuation + precision))`.
///
/// Zero is only known to some absolute precision: a zero-flagged value with
/// `valuation = v` and `precision = n` stands for `O(3^(v + n))`. Equality is
/// congruence at the shared precision, see [`PadicNumber::equal_to_precision`].
#[derive(Clone, Copy, Debug)]
pub struct PadicNumber {
    valuation: i64,
    unit: u64,
    precision: u32,
    zero: bool,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// Inverse of a unit modulo 3^n.
pub(crate) fn inv_mod_pow3(u: u64, n: u32) -> u64 {
    let m = POW3[n as usize] as i128;
    let (g, s, _) = ext_gcd(u as i128, m);
    debug_assert_eq!(g, 1);
    s.rem_euclid(m) as u64
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl PadicNumber {
    /// Canonical form of `3^valuation * raw` with `precision` unit digits.
    ///
    /// A raw value divisible by `3^precision` is treated as zero to that precision.
    pub fn normalize(valuation: i64, raw: i128, precision: u32) -> Self {
        assert!(precision >= 1, "precision must be at least 1");
        let precision = precision.min(MAX_PRECISION);
        let m = POW3[precision as usize] as i128;
        if raw.rem_euclid(m) == 0 {
            return Self::zero_to(valuation + precision as i64);
        }
        let mut raw = raw;
        let mut v = valuation;
        while raw % 3 == 0 {
            raw /= 3;
            v += 1;
        }
        PadicNumber {
            valuation: v,
            unit: raw.rem_euclid(m) as u64,
            precision,
            zero: false,
        }
    }

    /// `O(3^abs)`.
    pub fn zero_to(abs: i64) -> Self {
        PadicNumber {
            valuation: abs,
            unit: 0,
            precision: 0,
            zero: true,
        }
    }

    pub fn exact_zero() -> Self {
        Self::zero_to(EXACT_ZERO_ABS)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    /// An integer carried at full precision (zero is exact).
    pub fn from_i64(n: i64) -> Self {
        if n == 0 {
            Self::exact_zero()
        } else {
            Self::normalize(0, n as i128, MAX_PRECISION)
        }
    }

    pub fn from_bigint(n: &BigInt, precision: u32) -> Self {
        if n.is_zero() {
            return Self::exact_zero();
        }
        let mut n = n.clone();
        let mut v = 0i64;
        let three = BigInt::from(3);
        while (&n % &three).is_zero() {
            n /= &three;
            v += 1;
        }
        let precision = precision.min(MAX_PRECISION);
        let m = BigInt::from(POW3[precision as usize]);
        let unit = n.mod_floor(&m).to_u64().expect("reduced below 3^40");
        PadicNumber {
            valuation: v,
            unit,
            precision,
            zero: false,
        }
    }

    pub fn from_rational(r: &BigRational, precision: u32) -> Self {
        if r.is_zero() {
            return Self::exact_zero();
        }
        let num = Self::from_bigint(r.numer(), precision);
        let den = Self::from_bigint(r.denom(), precision);
        num.div(&den).expect("denominator is nonzero")
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// True for zeros that carry no precision bound (exact integers, embedding padding).
    pub fn is_exact_zero(&self) -> bool {
        self.zero && self.valuation >= EXACT_ZERO_ABS / 2
    }

    /// Raw valuation field; for zeros this is the absolute precision.
    pub fn valuation_raw(&self) -> i64 {
        self.valuation
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Exponent `a` such that the value is known modulo `3^a`.
    pub fn abs_precision(&self) -> i64 {
        self.valuation + self.precision as i64
    }

    pub fn val(&self) -> Valuation {
        if self.zero {
            Valuation::Infinity
        } else {
            Valuation::int(self.valuation)
        }
    }

    /// Valuation, with zero reported at its absolute precision bound.
    pub fn val_or_bound(&self) -> i64 {
        self.valuation
    }

    /// Leading base-3 digit of the unit part (0 for zero).
    pub fn residue_digit(&self) -> u8 {
        if self.zero {
            0
        } else {
            (self.unit % 3) as u8
        }
    }

    /// Reduce the absolute precision to at most `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if self.zero {
            return Self::zero_to(self.valuation.min(abs));
        }
        if abs <= self.valuation {
            return Self::zero_to(abs);
        }
        let p = (self.precision as i64).min(abs - self.valuation) as u32;
        PadicNumber {
            valuation: self.valuation,
            unit: self.unit % POW3[p as usize],
            precision: p,
            zero: false,
        }
    }

    pub fn neg(&self) -> Self {
        if self.zero {
            return *self;
        }
        let m = POW3[self.precision as usize];
        PadicNumber {
            unit: (m - self.unit) % m,
            ..*self
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.zero {
            return other.truncate_abs(self.abs_precision());
        }
        if other.zero {
            return self.truncate_abs(other.abs_precision());
        }
        let abs = self.abs_precision().min(other.abs_precision());
        let vmin = self.valuation.min(other.valuation);
        if abs <= vmin {
            return Self::zero_to(abs);
        }
        let n = (abs - vmin) as u32;
        debug_assert!(n <= MAX_PRECISION);
        let m = POW3[n as usize] as u128;
        let term = |x: &Self| -> u128 {
            let shift = (x.valuation - vmin) as u32;
            if shift >= n {
                0
            } else {
                (x.unit as u128 * POW3[shift as usize] as u128) % m
            }
        };
        let mut raw = (term(self) + term(other)) % m;
        if raw == 0 {
            return Self::zero_to(abs);
        }
        let mut v = vmin;
        while raw % 3 == 0 {
            raw /= 3;
            v += 1;
        }
        Self::normalize(v, raw as i128, (abs - v) as u32)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self.zero, other.zero) {
            (true, true) => {
                Self::zero_to(self.valuation.saturating_add(other.valuation).min(EXACT_ZERO_ABS))
            }
            (true, false) => {
                Self::zero_to((self.valuation + other.valuation).min(EXACT_ZERO_ABS))
            }
            (false, true) => {
                Self::zero_to((self.valuation + other.valuation).min(EXACT_ZERO_ABS))
            }
            (false, false) => {
                let p = self.precision.min(other.precision);
                let m = POW3[p as usize];
                PadicNumber {
                    valuation: self.valuation + other.valuation,
                    unit: mulmod(self.unit % m, other.unit % m, m),
                    precision: p,
                    zero: false,
                }
            }
        }
    }

    /// Multiplicative inverse; no precision is lost.
    pub fn inv(&self) -> Result<Self, PadicError> {
        if self.zero {
            return Err(PadicError::InversionOfZero);
        }
        Ok(PadicNumber {
            valuation: -self.valuation,
            unit: inv_mod_pow3(self.unit, self.precision),
            precision: self.precision,
            zero: false,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, PadicError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn mul_pow3(&self, k: i64) -> Self {
        if self.is_exact_zero() {
            return *self;
        }
        PadicNumber {
            valuation: self.valuation + k,
            ..*self
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = *self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Congruence at the shared precision.
    pub fn equal_to_precision(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Base-3 digits of the unit part, least significant first.
    pub fn digits(&self) -> Vec<u8> {
        let mut u = self.unit;
        (0..self.precision)
            .map(|_| {
                let d = (u % 3) as u8;
                u /= 3;
                d
            })
            .collect()
    }

    /// Signed integer representative of the unit part in (-3^n/2, 3^n/2].
    pub fn unit_symmetric(&self) -> i128 {
        let m = POW3[self.precision as usize] as i128;
        let u = self.unit as i128;
        if 2 * u > m {
            u - m
        } else {
            u
        }
    }

    /// The integer `3^valuation * unit` if the valuation is nonnegative, as a BigRational otherwise.
    pub fn to_rational_truncated(&self) -> BigRational {
        if self.zero {
            return BigRational::zero();
        }
        let u = BigInt::from(self.unit_symmetric());
        let p = BigInt::from(3).pow(self.valuation.unsigned_abs() as u32);
        if self.valuation >= 0 {
            BigRational::from_integer(u * p)
        } else {
            BigRational::new(u, p)
        }
    }

    /// Digit-string form `p3[v=<valuation>;n=<precision>]<digits, most significant first>`.
    pub fn to_digit_string(&self) -> String {
        if self.zero {
            if self.is_exact_zero() {
                return "0".to_string();
            }
            return format!("p3[o={}]", self.valuation);
        }
        let ds: String = self
            .digits()
            .iter()
            .rev()
            .map(|d| char::from(b'0' + d))
            .collect();
        format!("p3[v={}]{}", self.valuation, ds)
    }

    /// Parse the output of [`PadicNumber::to_digit_string`].
    pub fn parse_digit_string(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "0" {
            return Some(Self::exact_zero());
        }
        let rest = s.strip_prefix("p3[")?;
        let close = rest.find(']')?;
        let (head, digits) = (&rest[..close], &rest[close + 1..]);
        if let Some(o) = head.strip_prefix("o=") {
            if !digits.is_empty() {
                return None;
            }
            return Some(Self::zero_to(o.parse().ok()?));
        }
        let v: i64 = head.strip_prefix("v=")?.parse().ok()?;
        if digits.is_empty() || digits.len() > MAX_PRECISION as usize {
            return None;
        }
        let mut raw: i128 = 0;
        for c in digits.chars() {
            let d = c.to_digit(3)? as i128;
            raw = raw * 3 + d;
        }
        if raw % 3 == 0 {
            return None;
        }
        Some(Self::normalize(v, raw, digits.len() as u32))
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            if self.is_exact_zero() {
                return write!(f, "0");
            }
            return write!(f, "O(3^{})", self.valuation);
        }
        let u = self.unit_symmetric();
        let small = u.abs() < 10_000;
        let body = if small {
            u.to_string()
        } else {
            self.to_digit_string()
        };
        if self.valuation == 0 {
            write!(f, "{body} + O(3^{})", self.abs_precision())
        } else {
            write!(f, "3^{}*{body} + O(3^{})", self.valuation, self.abs_precision())
        }
    }
}

/// Exponent of 3 in a nonzero big integer.
pub(crate) fn v3_bigint(n: &BigInt) -> i64 {
    let three = BigInt::from(3);
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && (&n % &three).is_zero() {
        n /= &three;
        v += 1;
    }
    v
}

/// 3-adic valuation of a rational number.
pub fn val_rational(r: &BigRational) -> Valuation {
    if r.is_zero() {
        Valuation::Infinity
    } else {
        Valuation::int(v3_bigint(r.numer()) - v3_bigint(r.denom()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_strips_threes() {
        let x = PadicNumber::normalize(0, 9, 5);
        assert_eq!((x.valuation_raw(), x.unit(), x.precision()), (2, 1, 5));
        let y = PadicNumber::normalize(1, 6, 5);
        assert_eq!((y.valuation_raw(), y.unit(), y.precision()), (2, 2, 5));
    }

    #[test]
    fn normalize_zero_keeps_absolute_bound() {
        let z = PadicNumber::normalize(0, 0, 5);
        assert!(z.is_zero());
        assert_eq!(z.abs_precision(), 5);
        assert_eq!(z.to_string(), "O(3^5)");
    }

    #[test]
    fn inverse_of_two() {
        let x = PadicNumber::normalize(0, 2, 5);
        assert_eq!(x.inv().unwrap().unit(), 122);
        let three = PadicNumber::normalize(0, 3, 5);
        assert_eq!(three.inv().unwrap().valuation_raw(), -1);
        assert!(matches!(
            PadicNumber::zero_to(5).inv(),
            Err(PadicError::InversionOfZero)
        ));
    }

    #[test]
    fn cancellation_loses_digits() {
        let a = PadicNumber::normalize(0, 1 + 81, 10);
        let b = PadicNumber::normalize(0, 1, 10);
        let d = a.sub(&b);
        assert_eq!(d.valuation_raw(), 4);
        assert_eq!(d.abs_precision(), 10);
    }

    #[test]
    fn digit_string_round_trip() {
        for x in [
            PadicNumber::from_i64(-7),
            PadicNumber::normalize(-2, 5, 12),
            PadicNumber::zero_to(17),
            PadicNumber::exact_zero(),
        ] {
            let s = x.to_digit_string();
            let y = PadicNumber::parse_digit_string(&s).unwrap();
            assert_eq!(y.to_digit_string(), s);
        }
        assert!(PadicNumber::parse_digit_string("p3[v=0]120").is_none());
    }

    fn small_nonzero() -> impl Strategy<Value = i64> {
        (-1_000_000i64..1_000_000).prop_filter("nonzero", |x| *x != 0)
    }

    proptest! {
        #[test]
        fn valuation_is_multiplicative(a in small_nonzero(), b in small_nonzero()) {
            let x = PadicNumber::from_i64(a);
            let y = PadicNumber::from_i64(b);
            let vx = x.val_or_bound();
            let vy = y.val_or_bound();
            prop_assert_eq!(x.mul(&y).val_or_bound(), vx + vy);
            prop_assert_eq!(vx, v3_bigint(&BigInt::from(a)));
        }

        #[test]
        fn inverse_is_involutive(a in small_nonzero(), n in 1u32..=40) {
            let x = PadicNumber::normalize(0, a as i128, n);
            prop_assume!(!x.is_zero());
            let back = x.inv().unwrap().inv().unwrap();
            prop_assert!(back.equal_to_precision(&x));
            prop_assert!(x.mul(&x.inv().unwrap()).equal_to_precision(&PadicNumber::one()));
        }

        #[test]
        fn addition_matches_integers(a in -1_000_000_000i64..1_000_000_000, b in -1_000_000_000i64..1_000_000_000) {
            let s = PadicNumber::from_i64(a).add(&PadicNumber::from_i64(b));
            prop_assert!(s.equal_to_precision(&PadicNumber::from_i64(a + b)));
        }

        #[test]
        fn reconstruct_inverts_embedding(a in -1000i64..1000, b in 1i64..1000) {
            let r = BigRational::new(BigInt::from(a), BigInt::from(b));
            let x = PadicNumber::from_rational(&r, 40);
            prop_assert_eq!(super::super::rational_reconstruct(&x, 1000), Some(r));
        }
    }
}
