use std::fmt;

use num_rational::Ratio;

use crate::gf9::F9;
use crate::padic::{PadicError, PadicNumber, Valuation};

/// An element `re + im*zeta4` of the unramified quadratic extension of Q3.
///
/// Elements of Q3 itself carry an exact-zero `im`.
#[derive(Clone, Copy, Debug)]
pub struct Qp2 {
    pub re: PadicNumber,
    pub im: PadicNumber,
}

impl Qp2 {
    pub fn new(re: PadicNumber, im: PadicNumber) -> Self {
        Qp2 { re, im }
    }

    pub fn from_padic(re: PadicNumber) -> Self {
        Qp2 {
            re,
            im: PadicNumber::exact_zero(),
        }
    }

    pub fn from_i64(a: i64) -> Self {
        Self::from_padic(PadicNumber::from_i64(a))
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Qp2::new(PadicNumber::from_i64(a), PadicNumber::from_i64(b))
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn zeta4() -> Self {
        Self::from_ints(0, 1)
    }

    /// Small-integer lift of a residue.
    pub fn lift(r: F9) -> Self {
        let (a, b) = r.signed_parts();
        Self::from_ints(a, b)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn val(&self) -> Valuation {
        self.re.val().min(self.im.val())
    }

    /// Integer valuation, `None` for zero.
    pub fn val_int(&self) -> Option<i64> {
        self.val().finite().map(|r: Ratio<i64>| r.to_integer())
    }

    /// Smallest absolute precision among the two coordinates.
    pub fn abs_precision(&self) -> i64 {
        self.re.abs_precision().min(self.im.abs_precision())
    }

    pub fn residue(&self) -> F9 {
        let d = |x: &PadicNumber| {
            if x.is_zero() || x.valuation_raw() > 0 {
                0
            } else {
                assert!(x.valuation_raw() == 0, "residue of a non-integral value");
                x.residue_digit() as i64
            }
        };
        F9::new(d(&self.re), d(&self.im))
    }

    pub fn add(&self, o: &Self) -> Self {
        Qp2::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Qp2::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        Qp2::new(self.re.neg(), self.im.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Qp2::new(re, im)
    }

    pub fn scale(&self, c: &PadicNumber) -> Self {
        Qp2::new(self.re.mul(c), self.im.mul(c))
    }

    pub fn mul_pow3(&self, k: i64) -> Self {
        Qp2::new(self.re.mul_pow3(k), self.im.mul_pow3(k))
    }

    /// The Frobenius `zeta4 -> -zeta4`.
    pub fn conj(&self) -> Self {
        Qp2::new(self.re, self.im.neg())
    }

    pub fn sigma_pow(&self, m: u32) -> Self {
        if m % 2 == 1 {
            self.conj()
        } else {
            *self
        }
    }

    pub fn norm(&self) -> PadicNumber {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        let n = self.norm().inv()?;
        Ok(self.conj().scale(&n))
    }

    pub fn div(&self, o: &Self) -> Result<Self, PadicError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let (mut base, mut acc) = (*self, Qp2::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn equal_to_precision(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    pub fn truncate_abs(&self, abs: i64) -> Self {
        Qp2::new(self.re.truncate_abs(abs), self.im.truncate_abs(abs))
    }

    /// A square root, if one exists. Roots are normalized so that the residue of
    /// the unit part has the smaller digit index of the two candidates.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(*self);
        }
        let v = self.val_int()?;
        if v % 2 != 0 {
            return None;
        }
        let u = self.mul_pow3(-v);
        let r = u.residue();
        let root = F9::all()
            .filter(|s| !s.is_zero() && s.mul(*s) == r)
            .min_by_key(|s| s.index())?;
        let half = PadicNumber::from_i64(2).inv().ok()?;
        let mut y = Qp2::lift(root);
        for _ in 0..12 {
            let next = y.add(&u.div(&y).ok()?).scale(&half);
            if next.equal_to_precision(&y) {
                y = next;
                break;
            }
            y = next;
        }
        if !y.mul(&y).equal_to_precision(&u) {
            return None;
        }
        Some(y.mul_pow3(v / 2))
    }
}

impl fmt::Display for Qp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_exact_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_exact_zero() {
            write!(f, "({})*i", self.im)
        } else {
            write!(f, "({}) + ({})*i", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_squared_is_minus_one() {
        let z = Qp2::zeta4();
        assert!(z.mul(&z).equal_to_precision(&Qp2::from_i64(-1)));
        assert!(z.inv().unwrap().equal_to_precision(&z.neg()));
    }

    #[test]
    fn square_roots() {
        let r = Qp2::from_i64(-1).sqrt().unwrap();
        assert!(r.mul(&r).equal_to_precision(&Qp2::from_i64(-1)));
        assert!(Qp2::from_i64(3).sqrt().is_none());
        let s = Qp2::from_i64(-27 * 3).sqrt().unwrap();
        assert_eq!(s.val_int(), Some(2));
        // every unit of Qp2 is a square times a unit, and 1 + 3x is a square
        let t = Qp2::from_ints(1, 3).sqrt().unwrap();
        assert!(t.mul(&t).equal_to_precision(&Qp2::from_ints(1, 3)));
    }
}
