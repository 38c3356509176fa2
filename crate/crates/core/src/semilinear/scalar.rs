use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::local_fields::Qp2;
use crate::padic::{val_rational, PadicNumber, Valuation, MAX_PRECISION};

/// A Q3 scalar: exact rational when possible, truncated 3-adic otherwise.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx(PadicNumber),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(rat(n, d))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_padic(&self) -> PadicNumber {
        match self {
            Scalar::Exact(r) => PadicNumber::from_rational(r, MAX_PRECISION),
            Scalar::Approx(p) => *p,
        }
    }

    /// Exact zero, or a 3-adic value that is zero to its precision.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(p) => p.is_zero(),
        }
    }

    /// Zero, or so divisible by 3 that it cannot be told apart from zero.
    pub fn is_negligible(&self, bound: u32) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(p) => p.is_zero() || p.valuation_raw() >= bound as i64,
        }
    }

    pub fn val(&self) -> Valuation {
        match self {
            Scalar::Exact(r) => val_rational(r),
            Scalar::Approx(p) => p.val(),
        }
    }

    fn binop(
        &self,
        o: &Self,
        exact: impl Fn(&BigRational, &BigRational) -> BigRational,
        approx: impl Fn(&PadicNumber, &PadicNumber) -> PadicNumber,
    ) -> Self {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            _ => Scalar::Approx(approx(&self.to_padic(), &o.to_padic())),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if let Scalar::Exact(a) = self {
            if a.is_zero() {
                return o.clone();
            }
        }
        if let Scalar::Exact(b) = o {
            if b.is_zero() {
                return self.clone();
            }
        }
        self.binop(o, |a, b| a + b, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Approx(p) => Scalar::Approx(p.neg()),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let exact_zero = |s: &Scalar| matches!(s, Scalar::Exact(r) if r.is_zero());
        if exact_zero(self) || exact_zero(o) {
            return Scalar::zero();
        }
        self.binop(o, |a, b| a * b, |a, b| a.mul(b))
    }

    pub fn inv(&self) -> Option<Self> {
        match self {
            Scalar::Exact(a) if a.is_zero() => None,
            Scalar::Exact(a) => Some(Scalar::Exact(a.recip())),
            Scalar::Approx(p) => p.inv().ok().map(Scalar::Approx),
        }
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    /// String form: `p/q` when exact, the 3-adic digit string otherwise.
    pub fn to_text(&self) -> String {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(p) => p.to_digit_string(),
        }
    }

    pub fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.starts_with("p3[") {
            return PadicNumber::parse_digit_string(s).map(Scalar::Approx);
        }
        if s.is_empty() {
            return None;
        }
        let valid = |t: &str| {
            let t = t.strip_prefix('-').unwrap_or(t);
            !t.is_empty() && t.chars().all(|c| c.is_ascii_digit())
        };
        match s.split_once('/') {
            Some((n, d)) if valid(n) && valid(d) && !d.starts_with('-') => {
                let n: BigInt = n.parse().ok()?;
                let d: BigInt = d.parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(Scalar::Exact(BigRational::new(n, d)))
            }
            None if valid(s) => Some(Scalar::Exact(BigRational::from_integer(s.parse().ok()?))),
            _ => None,
        }
    }

    pub fn is_negative_exact(&self) -> bool {
        matches!(self, Scalar::Exact(r) if r.is_negative())
    }

    /// Congruence at shared precision (exact equality when both are exact).
    pub fn equals(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(_) => write!(f, "{}", self.to_text()),
            Scalar::Approx(p) => write!(f, "{p}"),
        }
    }
}

/// An element `re + im*zeta4` of K0 = Q3 or Q3(zeta4).
#[derive(Clone, Debug)]
pub struct K0Elem {
    pub re: Scalar,
    pub im: Scalar,
}

impl K0Elem {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        K0Elem { re, im }
    }

    pub fn real(re: Scalar) -> Self {
        K0Elem::new(re, Scalar::zero())
    }

    pub fn int(n: i64) -> Self {
        Self::real(Scalar::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::real(Scalar::ratio(n, d))
    }

    pub fn gauss(a: (i64, i64), b: (i64, i64)) -> Self {
        K0Elem::new(Scalar::ratio(a.0, a.1), Scalar::ratio(b.0, b.1))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn zeta4() -> Self {
        K0Elem::new(Scalar::zero(), Scalar::one())
    }

    pub fn from_qp2(x: &Qp2) -> Self {
        let conv = |p: &PadicNumber| {
            if p.is_exact_zero() {
                Scalar::zero()
            } else {
                Scalar::Approx(*p)
            }
        };
        K0Elem::new(conv(&x.re), conv(&x.im))
    }

    pub fn to_qp2(&self) -> Qp2 {
        let conv = |s: &Scalar| match s {
            Scalar::Exact(r) if r.is_zero() => PadicNumber::exact_zero(),
            _ => s.to_padic(),
        };
        Qp2::new(conv(&self.re), conv(&self.im))
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        K0Elem::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        K0Elem::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        K0Elem::new(self.re.neg(), self.im.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        K0Elem::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        K0Elem::new(self.re.mul(c), self.im.mul(c))
    }

    pub fn conj(&self) -> Self {
        K0Elem::new(self.re.clone(), self.im.neg())
    }

    pub fn sigma_pow(&self, m: u32) -> Self {
        if m % 2 == 1 {
            self.conj()
        } else {
            self.clone()
        }
    }

    pub fn norm(&self) -> Scalar {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm().inv()?;
        Some(self.conj().scale(&n))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    pub fn val(&self) -> Valuation {
        self.re.val().min(self.im.val())
    }

    pub fn equals(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// `a+b*i` text form; parts are `p/q` or 3-adic digit strings.
    pub fn to_text(&self) -> String {
        if self.im.is_zero() && self.im.is_exact() {
            return self.re.to_text();
        }
        let im = self.im.to_text();
        if self.re.is_zero() && self.re.is_exact() {
            return format!("{im}*i");
        }
        if let Some(rest) = im.strip_prefix('-') {
            format!("{}-{rest}*i", self.re.to_text())
        } else {
            format!("{}+{im}*i", self.re.to_text())
        }
    }

    /// Parse `a`, `b*i`, `i`, `-i`, `a+b*i`, `a-b*i`; returns the byte offset of the
    /// first offending character on failure.
    pub fn parse_text(s: &str) -> Result<Self, usize> {
        let bytes = s.as_bytes();
        let mut split = None;
        let mut depth = 0i32;
        for (i, &c) in bytes.iter().enumerate() {
            match c {
                b'[' => depth += 1,
                b']' => depth -= 1,
                b'+' | b'-' if depth == 0 && i > 0 && bytes[i - 1] != b'/' => split = Some(i),
                _ => {}
            }
        }
        let parse_im = |t: &str, offset: usize| -> Result<Scalar, usize> {
            let body = t.trim().strip_suffix('i').ok_or(offset + t.len())?;
            let body = body.trim();
            if body.is_empty() || body == "+" {
                return Ok(Scalar::one());
            }
            if body == "-" {
                return Ok(Scalar::int(-1));
            }
            let body = body.strip_suffix('*').ok_or(offset + body.len())?;
            let body = body.strip_prefix('+').unwrap_or(body);
            Scalar::parse_text(body).ok_or(offset)
        };
        let t = s.trim();
        if t.is_empty() {
            return Err(0);
        }
        match split {
            Some(i) if s[i..].trim_end().ends_with('i') => {
                let re = Scalar::parse_text(&s[..i]).ok_or(0usize)?;
                let im = parse_im(&s[i..], i)?;
                Ok(K0Elem::new(re, im))
            }
            _ if t.ends_with('i') => Ok(K0Elem::new(Scalar::zero(), parse_im(t, 0)?)),
            _ => Scalar::parse_text(t).map(K0Elem::real).ok_or(0),
        }
    }
}

impl fmt::Display for K0Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
