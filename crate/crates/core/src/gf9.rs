//! The residue fields F3 and F9 = F3[t]/(t^2 + 1).
//!
//! `t` reduces the unramified root of unity `zeta4`, so residues of
//! `a + b*zeta4` are simply `(a mod 3, b mod 3)`.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct F9 {
    a: u8,
    b: u8,
}

impl F9 {
    pub const ZERO: F9 = F9 { a: 0, b: 0 };
    pub const ONE: F9 = F9 { a: 1, b: 0 };
    pub const T: F9 = F9 { a: 0, b: 1 };

    pub fn new(a: i64, b: i64) -> Self {
        F9 {
            a: a.rem_euclid(3) as u8,
            b: b.rem_euclid(3) as u8,
        }
    }

    pub fn from_f3(a: i64) -> Self {
        Self::new(a, 0)
    }

    /// The element with index `a + 3b`; indices run 0..9.
    pub fn from_index(i: usize) -> Self {
        Self::new((i % 3) as i64, (i / 3) as i64)
    }

    pub fn index(&self) -> usize {
        self.a as usize + 3 * self.b as usize
    }

    pub fn a(&self) -> u8 {
        self.a
    }

    pub fn b(&self) -> u8 {
        self.b
    }

    /// Symmetric representatives in {-1, 0, 1}.
    pub fn signed_parts(&self) -> (i64, i64) {
        let s = |x: u8| if x == 2 { -1 } else { x as i64 };
        (s(self.a), s(self.b))
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn in_f3(&self) -> bool {
        self.b == 0
    }

    pub fn all() -> impl Iterator<Item = F9> {
        (0..9).map(F9::from_index)
    }

    pub fn all_f3() -> impl Iterator<Item = F9> {
        (0..3).map(F9::from_index)
    }

    pub fn add(self, o: F9) -> F9 {
        F9::new((self.a + o.a) as i64, (self.b + o.b) as i64)
    }

    pub fn sub(self, o: F9) -> F9 {
        F9::new(self.a as i64 - o.a as i64, self.b as i64 - o.b as i64)
    }

    pub fn neg(self) -> F9 {
        F9::new(-(self.a as i64), -(self.b as i64))
    }

    pub fn mul(self, o: F9) -> F9 {
        let (a, b, c, d) = (self.a as i64, self.b as i64, o.a as i64, o.b as i64);
        F9::new(a * c - b * d, a * d + b * c)
    }

    pub fn pow(self, mut e: u32) -> F9 {
        let (mut base, mut acc) = (self, F9::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Option<F9> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(7))
        }
    }

    /// x -> x^3, i.e. t -> -t.
    pub fn frobenius(self) -> F9 {
        F9::new(self.a as i64, -(self.b as i64))
    }

    pub fn is_square(self) -> bool {
        self.is_zero() || self.pow(4) == F9::ONE
    }
}

impl fmt::Display for F9 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}*t"),
            (a, b) => write!(f, "{a}+{b}*t"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseF9Error(pub String);

impl fmt::Display for ParseF9Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse F9 element: {}", self.0)
    }
}

impl std::error::Error for ParseF9Error {}

impl FromStr for F9 {
    type Err = ParseF9Error;

    /// Accepts `a`, `b*t`, `t`, `a+b*t`, `a-t` with small integer `a`, `b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseF9Error(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, c) in compact.char_indices() {
            if (c == '+' || c == '-') && i > 0 {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let (mut a, mut b) = (0i64, 0i64);
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term.strip_prefix('+').unwrap_or(term)),
            };
            if body.is_empty() {
                return Err(err());
            }
            if let Some(coef) = body.strip_suffix('t') {
                let c: i64 = match coef.strip_suffix('*') {
                    Some(n) => n.parse().map_err(|_| err())?,
                    None if coef.is_empty() => 1,
                    None => return Err(err()),
                };
                b += sign * c;
            } else {
                let c: i64 = body.parse().map_err(|_| err())?;
                a += sign * c;
            }
        }
        Ok(F9::new(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_squared_is_minus_one() {
        assert_eq!(F9::T.mul(F9::T), F9::new(-1, 0));
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_order_8() {
        let gen = F9::new(1, 1);
        let orders: Vec<u32> = (1..=8).filter(|&k| gen.pow(k) == F9::ONE).collect();
        assert_eq!(orders, vec![8]);
        for x in F9::all().filter(|x| !x.is_zero()) {
            assert_eq!(x.mul(x.inv().unwrap()), F9::ONE);
        }
    }

    #[test]
    fn frobenius_is_cubing() {
        for x in F9::all() {
            assert_eq!(x.frobenius(), x.pow(3));
        }
    }

    #[test]
    fn half_the_units_are_squares() {
        assert_eq!(F9::all().filter(|x| !x.is_zero() && x.is_square()).count(), 4);
        assert!(F9::new(-1, 0).is_square());
    }

    #[test]
    fn parse_round_trip() {
        for x in F9::all() {
            assert_eq!(x.to_string().parse::<F9>().unwrap(), x);
        }
        assert_eq!("1-t".parse::<F9>().unwrap(), F9::new(1, -1));
        assert!("1+*t".parse::<F9>().is_err());
    }
}
