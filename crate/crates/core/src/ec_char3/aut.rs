use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::curve::{c, BaseField, CurveF3q};
use crate::gf9::F9;

/// Coordinate change `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    pub u: F9,
    pub r: F9,
    pub s: F9,
    pub t: F9,
}

impl Substitution {
    pub const IDENTITY: Substitution = Substitution { u: F9::ONE, r: F9::ZERO, s: F9::ZERO, t: F9::ZERO };

    pub fn new(u: F9, r: F9, s: F9, t: F9) -> Self {
        assert!(!u.is_zero(), "u must be a unit");
        Substitution { u, r, s, t }
    }

    /// `self o other`: apply `other` first.
    pub fn compose(&self, o: &Self) -> Self {
        let u2 = self.u.mul(self.u);
        Substitution {
            u: self.u.mul(o.u),
            r: self.r.add(u2.mul(o.r)),
            s: self.s.add(self.u.mul(o.s)),
            t: self.t.add(u2.mul(self.u).mul(o.t)).add(u2.mul(self.s).mul(o.r)),
        }
    }

    pub fn inverse(&self) -> Self {
        let ui = self.u.inv().expect("unit");
        let ui2 = ui.mul(ui);
        Substitution {
            u: ui,
            r: self.r.neg().mul(ui2),
            s: self.s.neg().mul(ui),
            t: self.r.mul(self.s).sub(self.t).mul(ui2).mul(ui),
        }
    }

    /// Coefficient-wise Frobenius `x -> x^3`.
    pub fn frobenius(&self) -> Self {
        Substitution {
            u: self.u.frobenius(),
            r: self.r.frobenius(),
            s: self.s.frobenius(),
            t: self.t.frobenius(),
        }
    }

    pub fn defined_over_f3(&self) -> bool {
        [self.u, self.r, self.s, self.t].iter().all(|x| x.in_f3())
    }

    /// Coefficients of the transformed equation.
    pub fn transform(&self, e: &CurveF3q) -> [F9; 5] {
        let [a1, a2, a3, a4, a6] = e.coefficients();
        let Substitution { u, r, s, t } = *self;
        let ui = u.inv().expect("unit");
        let a1n = a1.add(c(2).mul(s));
        let a2n = a2.sub(s.mul(a1)).add(c(3).mul(r)).sub(s.mul(s));
        let a3n = a3.add(r.mul(a1)).add(c(2).mul(t));
        let a4n = a4
            .sub(s.mul(a3))
            .add(c(2).mul(r).mul(a2))
            .sub(t.add(r.mul(s)).mul(a1))
            .add(c(3).mul(r).mul(r))
            .sub(c(2).mul(s).mul(t));
        let a6n = a6
            .add(r.mul(a4))
            .add(r.mul(r).mul(a2))
            .add(r.pow(3))
            .sub(t.mul(a3))
            .sub(t.mul(t))
            .sub(r.mul(t).mul(a1));
        [
            a1n.mul(ui),
            a2n.mul(ui.pow(2)),
            a3n.mul(ui.pow(3)),
            a4n.mul(ui.pow(4)),
            a6n.mul(ui.pow(6)),
        ]
    }

    /// Image of an affine point under the automorphism `(x', y') -> (x, y)`.
    pub fn apply_point(&self, x: F9, y: F9) -> (F9, F9) {
        let u2 = self.u.mul(self.u);
        let xn = u2.mul(x).add(self.r);
        let yn = u2.mul(self.u).mul(y).add(self.s.mul(u2).mul(x)).add(self.t);
        (xn, yn)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u={}, r={}, s={}, t={})", self.u, self.r, self.s, self.t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    C1,
    C2,
    C3,
    C6,
    /// Z/3 x| Z/4, the automorphism group of the j = 0 curve over F9.
    Z3xZ4,
    Other(String),
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::C1 => f.write_str("C1"),
            Shape::C2 => f.write_str("C2"),
            Shape::C3 => f.write_str("C3"),
            Shape::C6 => f.write_str("C6"),
            Shape::Z3xZ4 => f.write_str("Z3:Z4"),
            Shape::Other(s) => f.write_str(s),
        }
    }
}

/// Automorphisms of a curve over its base field with their composition table.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub curve: CurveF3q,
    pub elements: Vec<Substitution>,
    /// `table[i][j]` is the index of `elements[i] o elements[j]`.
    pub table: Vec<Vec<usize>>,
    pub shape: Shape,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &Substitution) -> Option<usize> {
        self.elements.iter().position(|x| x == g)
    }

    pub fn identity(&self) -> usize {
        self.index_of(&Substitution::IDENTITY).expect("identity is an automorphism")
    }

    pub fn element_order(&self, i: usize) -> usize {
        let id = self.identity();
        let mut k = 1;
        let mut x = i;
        while x != id {
            x = self.table[x][i];
            k += 1;
        }
        k
    }

    /// Indices of the elements of 3-power order, when they form the unique
    /// 3-Sylow subgroup.
    pub fn unique_sylow3(&self) -> Option<Vec<usize>> {
        let n = self.order();
        let mut p3 = 1;
        while n % (p3 * 3) == 0 {
            p3 *= 3;
        }
        let elems: Vec<usize> = (0..n)
            .filter(|&i| is_power_of_3(self.element_order(i)))
            .collect();
        (elems.len() == p3).then_some(elems)
    }

    /// Closure, identity and inverses, from the table.
    pub fn is_group(&self) -> bool {
        let n = self.order();
        let id = self.identity();
        self.table.iter().all(|row| row.len() == n && row.iter().all(|&k| k < n))
            && (0..n).all(|i| (0..n).any(|j| self.table[i][j] == id))
    }

    pub fn order_profile(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for i in 0..self.order() {
            *out.entry(self.element_order(i)).or_insert(0) += 1;
        }
        out
    }
}

fn is_power_of_3(mut n: usize) -> bool {
    if n == 0 {
        return false;
    }
    while n % 3 == 0 {
        n /= 3;
    }
    n == 1
}

fn shape_of(n: usize, profile: &BTreeMap<usize, usize>) -> Shape {
    let max = profile.keys().max().copied().unwrap_or(1);
    match n {
        1 => Shape::C1,
        2 => Shape::C2,
        3 => Shape::C3,
        6 if max == 6 => Shape::C6,
        12 if profile == &BTreeMap::from([(1, 1), (2, 1), (3, 2), (4, 6), (6, 2)]) => Shape::Z3xZ4,
        _ => Shape::Other(format!("order {n}, element orders {profile:?}")),
    }
}

/// All `(u, r, s, t)` over the curve's base field that fix its equation.
pub fn automorphism_group(e: &CurveF3q) -> AutGroup {
    automorphism_group_over(e, e.field())
}

/// Automorphisms defined over `field`, which must contain the curve's field.
pub fn automorphism_group_over(e: &CurveF3q, field: BaseField) -> AutGroup {
    let e = e.base_change(field);
    let els = field.elements();
    let target = e.coefficients();
    let mut elements = Vec::new();
    for &u in els.iter().filter(|u| !u.is_zero()) {
        for &r in &els {
            for &s in &els {
                for &t in &els {
                    let g = Substitution { u, r, s, t };
                    if g.transform(&e) == target {
                        elements.push(g);
                    }
                }
            }
        }
    }
    elements.sort();
    let n = elements.len();
    let table: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| {
            elements
                .iter()
                .map(|b| {
                    let ab = a.compose(b);
                    elements.iter().position(|x| *x == ab).expect("automorphisms compose")
                })
                .collect()
        })
        .collect();
    let mut group = AutGroup { curve: e, elements, table, shape: Shape::C1 };
    group.shape = shape_of(n, &group.order_profile());
    group
}
