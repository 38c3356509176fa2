use std::fmt;

use serde::Serialize;

use super::EcError;
use crate::gf9::F9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BaseField {
    F3,
    F9,
}

impl BaseField {
    pub fn q(self) -> i64 {
        match self {
            BaseField::F3 => 3,
            BaseField::F9 => 9,
        }
    }

    /// Degree over F3.
    pub fn degree(self) -> u32 {
        match self {
            BaseField::F3 => 1,
            BaseField::F9 => 2,
        }
    }

    pub fn from_degree(s: u32) -> Option<Self> {
        match s {
            1 => Some(BaseField::F3),
            2 => Some(BaseField::F9),
            _ => None,
        }
    }

    pub fn elements(self) -> Vec<F9> {
        match self {
            BaseField::F3 => F9::all_f3().collect(),
            BaseField::F9 => F9::all().collect(),
        }
    }

    pub fn contains(self, x: F9) -> bool {
        self == BaseField::F9 || x.in_f3()
    }

    /// First non-square, used for quadratic twists.
    pub fn non_square(self) -> F9 {
        self.elements()
            .into_iter()
            .find(|x| !x.is_zero() && x.pow(((self.q() - 1) / 2) as u32) != F9::ONE)
            .expect("finite fields of odd order have non-squares")
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseField::F3 => "F3",
            BaseField::F9 => "F9",
        })
    }
}

pub(crate) fn c(n: i64) -> F9 {
    F9::from_f3(n)
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over F3 or F9.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurveF3q {
    field: BaseField,
    a: [F9; 5],
}

impl CurveF3q {
    /// Coefficients in the order `[a1, a2, a3, a4, a6]`.
    pub fn new(field: BaseField, a: [F9; 5]) -> Result<Self, EcError> {
        if let Some(x) = a.iter().find(|x| !field.contains(**x)) {
            return Err(EcError::NotInBaseField(x.to_string(), field));
        }
        let e = CurveF3q { field, a };
        if e.discriminant().is_zero() {
            return Err(EcError::Singular(e.to_string()));
        }
        Ok(e)
    }

    /// `y^2 = x^3 + a2 x^2 + a4 x + a6` with integer coefficients.
    pub fn short(field: BaseField, a2: i64, a4: i64, a6: i64) -> Result<Self, EcError> {
        Self::new(field, [F9::ZERO, c(a2), F9::ZERO, c(a4), c(a6)])
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn coefficients(&self) -> [F9; 5] {
        self.a
    }

    fn b_invariants(&self) -> [F9; 4] {
        let [a1, a2, a3, a4, a6] = self.a;
        let b2 = a1.mul(a1).add(c(4).mul(a2));
        let b4 = c(2).mul(a4).add(a1.mul(a3));
        let b6 = a3.mul(a3).add(c(4).mul(a6));
        let b8 = a1
            .mul(a1)
            .mul(a6)
            .add(c(4).mul(a2).mul(a6))
            .sub(a1.mul(a3).mul(a4))
            .add(a2.mul(a3).mul(a3))
            .sub(a4.mul(a4));
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> F9 {
        let [b2, b4, b6, b8] = self.b_invariants();
        c(-1)
            .mul(b2.mul(b2).mul(b8))
            .sub(c(8).mul(b4.pow(3)))
            .sub(c(27).mul(b6.mul(b6)))
            .add(c(9).mul(b2).mul(b4).mul(b6))
    }

    /// `j = c4^3 / Delta`; in characteristic 3, `c4 = b2^2`.
    pub fn j_invariant(&self) -> F9 {
        let b2 = self.b_invariants()[0];
        b2.pow(6).mul(self.discriminant().inv().expect("smooth"))
    }

    pub fn contains(&self, x: F9, y: F9) -> bool {
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = y.mul(y).add(a1.mul(x).mul(y)).add(a3.mul(y));
        let rhs = x.pow(3).add(a2.mul(x).mul(x)).add(a4.mul(x)).add(a6);
        lhs == rhs
    }

    /// Affine points plus the point at infinity, by exhaustion.
    pub fn point_count(&self) -> i64 {
        let els = self.field.elements();
        let affine = els
            .iter()
            .flat_map(|&x| els.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| self.contains(x, y))
            .count();
        affine as i64 + 1
    }

    /// `q + 1 - #E(F_q)`.
    pub fn frobenius_trace(&self) -> i64 {
        let a = self.field.q() + 1 - self.point_count();
        assert!(a * a <= 4 * self.field.q(), "Hasse bound violated for {self}");
        a
    }

    pub fn is_supersingular(&self) -> bool {
        self.frobenius_trace() % 3 == 0
    }

    pub fn base_change(&self, field: BaseField) -> Self {
        if field.degree() < self.field.degree() {
            panic!("cannot descend {self} to {field}");
        }
        CurveF3q { field, a: self.a }
    }

    /// Nontrivial quadratic twist: complete the square, then
    /// `y^2 = x^3 + d a2 x^2 + d^2 a4 x + d^3 a6` for a non-square `d`.
    pub fn quadratic_twist(&self) -> Self {
        let [b2, b4, b6, _] = self.b_invariants();
        let quarter = c(4).inv().expect("4 is a unit");
        let half = c(2).inv().expect("2 is a unit");
        let (a2, a4, a6) = (b2.mul(quarter), b4.mul(half), b6.mul(quarter));
        let d = self.field.non_square();
        let a = [F9::ZERO, d.mul(a2), F9::ZERO, d.pow(2).mul(a4), d.pow(3).mul(a6)];
        CurveF3q::new(self.field, a).expect("twists of smooth curves are smooth")
    }

    /// Parses coefficient lists `a4,a6` (short form `y^2 = x^3 + a4 x + a6`),
    /// `a2,a4,a6`, or `a1,a2,a3,a4,a6`; entries are F9 elements like `1+t`.
    pub fn parse(field: BaseField, coeffs: &str) -> Result<Self, EcError> {
        let parsed: Result<Vec<F9>, _> = coeffs.split(',').map(|s| s.trim().parse::<F9>()).collect();
        let v = parsed.map_err(|e| EcError::Parse(e.to_string()))?;
        let z = F9::ZERO;
        let a = match v.as_slice() {
            [a4, a6] => [z, z, z, *a4, *a6],
            [a2, a4, a6] => [z, *a2, z, *a4, *a6],
            [a1, a2, a3, a4, a6] => [*a1, *a2, *a3, *a4, *a6],
            _ => {
                return Err(EcError::Parse(format!(
                    "expected 2, 3 or 5 coefficients, got {}",
                    v.len()
                )))
            }
        };
        Self::new(field, a)
    }
}

fn term(out: &mut String, coef: F9, mono: &str) {
    if coef.is_zero() {
        return;
    }
    let (sign, body) = match coef.signed_parts() {
        (-1, 0) => (" - ", String::new()),
        (1, 0) => (" + ", String::new()),
        _ => (" + ", format!("({coef})")),
    };
    out.push_str(sign);
    if mono.is_empty() {
        out.push_str(if body.is_empty() { "1" } else { &body });
    } else {
        out.push_str(&body);
        out.push_str(mono);
    }
}

impl fmt::Display for CurveF3q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = self.a;
        let mut lhs = String::from("y^2");
        term(&mut lhs, a1, "xy");
        term(&mut lhs, a3, "y");
        let mut rhs = String::from("x^3");
        term(&mut rhs, a2, "x^2");
        term(&mut rhs, a4, "x");
        term(&mut rhs, a6, "");
        write!(f, "{lhs} = {rhs} over {}", self.field)
    }
}
