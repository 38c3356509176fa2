use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;

use super::{LocalFieldError, Qp2};
use crate::gf9::F9;
use crate::padic::{PadicNumber, Valuation};

/// A finite extension of Q3 given as an Eisenstein stage over Q3 or Q3(zeta4).
///
/// The Eisenstein polynomial has integer coefficients; when `f = 2` the
/// unramified stage is `Q3[X]/(X^2 + 1)`.
#[derive(Debug, Clone)]
pub struct TowerField {
    label: String,
    f: u32,
    e: u32,
    eisenstein: Vec<i64>,
    eis: Vec<Qp2>,
}

impl PartialEq for TowerField {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
            && self.f == other.f
            && self.eisenstein == other.eisenstein
    }
}

impl Eq for TowerField {}

pub(crate) fn is_eisenstein(coeffs: &[i64]) -> bool {
    let n = coeffs.len();
    n >= 2
        && coeffs[n - 1] == 1
        && coeffs[0] % 3 == 0
        && coeffs[0] % 9 != 0
        && coeffs[1..n - 1].iter().all(|c| c % 3 == 0)
}

impl TowerField {
    /// `eisenstein` holds ascending coefficients of a monic Eisenstein polynomial.
    pub fn new(label: &str, f: u32, eisenstein: Vec<i64>) -> Result<Arc<Self>, LocalFieldError> {
        if !(f == 1 || f == 2) {
            return Err(LocalFieldError::InvalidField(format!(
                "{label}: unramified degree {f} not supported"
            )));
        }
        if !is_eisenstein(&eisenstein) {
            return Err(LocalFieldError::InvalidField(format!(
                "{label}: polynomial is not Eisenstein"
            )));
        }
        let e = (eisenstein.len() - 1) as u32;
        let eis = eisenstein.iter().map(|&c| Qp2::from_i64(c)).collect();
        Ok(Arc::new(TowerField {
            label: label.to_string(),
            f,
            e,
            eisenstein,
            eis,
        }))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn unramified_degree(&self) -> u32 {
        self.f
    }

    pub fn ramification_index(&self) -> u32 {
        self.e
    }

    pub fn degree(&self) -> u32 {
        self.e * self.f
    }

    pub fn eisenstein(&self) -> &[i64] {
        &self.eisenstein
    }

    /// Size of the residue field.
    pub fn residue_size(&self) -> usize {
        if self.f == 2 {
            9
        } else {
            3
        }
    }

    pub fn residues(&self) -> impl Iterator<Item = F9> {
        (0..self.residue_size()).map(F9::from_index)
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement::from_qp2(self, Qp2::zero())
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        FieldElement::from_qp2(self, Qp2::one())
    }

    pub fn int(self: &Arc<Self>, n: i64) -> FieldElement {
        FieldElement::from_qp2(self, Qp2::from_i64(n))
    }

    pub fn zeta4(self: &Arc<Self>) -> FieldElement {
        assert_eq!(self.f, 2, "zeta4 lives only in f = 2 towers");
        FieldElement::from_qp2(self, Qp2::zeta4())
    }

    /// The uniformizer, i.e. the class of X.
    pub fn pi(self: &Arc<Self>) -> FieldElement {
        let e = self.e as usize;
        if e == 1 {
            return FieldElement::from_qp2(self, self.eis[0].neg());
        }
        let mut coords = vec![Qp2::zero(); e];
        coords[1] = Qp2::one();
        FieldElement::new(self, coords)
    }

    /// `pi^-1 = -(pi^(e-1) + c_(e-1) pi^(e-2) + ... + c_1) / c_0`.
    pub fn pi_inv(self: &Arc<Self>) -> FieldElement {
        let e = self.e as usize;
        let c0 = self.eis[0].re;
        let inv_c0 = c0.inv().expect("Eisenstein constant is nonzero").neg();
        let coords = (0..e)
            .map(|j| self.eis[j + 1].scale(&inv_c0))
            .collect();
        FieldElement::new(self, coords)
    }

    pub fn pi_pow(self: &Arc<Self>, k: i64) -> FieldElement {
        if k >= 0 {
            self.pi().pow(k as u32)
        } else {
            self.pi_inv().pow((-k) as u32)
        }
    }
}

impl fmt::Display for TowerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (e={}, f={})", self.label, self.e, self.f)
    }
}

/// An element `sum_i coords[i] * pi^i` of a [`TowerField`], coordinates in Q3(zeta4).
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Arc<TowerField>,
    coords: Vec<Qp2>,
}

impl FieldElement {
    pub fn new(field: &Arc<TowerField>, coords: Vec<Qp2>) -> Self {
        assert_eq!(coords.len(), field.e as usize, "coordinate count must equal e");
        if field.f == 1 {
            debug_assert!(coords.iter().all(|c| c.im.is_zero()));
        }
        FieldElement {
            field: Arc::clone(field),
            coords,
        }
    }

    pub fn from_qp2(field: &Arc<TowerField>, c: Qp2) -> Self {
        let mut coords = vec![Qp2::zero(); field.e as usize];
        coords[0] = c;
        FieldElement::new(field, coords)
    }

    pub fn from_padic(field: &Arc<TowerField>, c: PadicNumber) -> Self {
        Self::from_qp2(field, Qp2::from_padic(c))
    }

    pub fn field(&self) -> &Arc<TowerField> {
        &self.field
    }

    pub fn coords(&self) -> &[Qp2] {
        &self.coords
    }

    /// Coordinates as the `e x f` array over the basis `pi^i zeta4^j`.
    pub fn coord_array(&self) -> Vec<Vec<PadicNumber>> {
        self.coords
            .iter()
            .map(|c| {
                if self.field.f == 2 {
                    vec![c.re, c.im]
                } else {
                    vec![c.re]
                }
            })
            .collect()
    }

    pub fn same_field(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }

    fn check(&self, other: &Self) {
        assert!(
            self.same_field(other),
            "field mismatch: {} vs {}",
            self.field.label,
            other.field.label
        );
    }

    /// Valuation normalized by v(3) = 1: min over i of v(coords[i]) + i/e.
    pub fn valuation(&self) -> Valuation {
        let e = self.field.e as i64;
        self.coords
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.val_int().map(|v| v * e + i as i64))
            .min()
            .map(|n| Valuation::Finite(Ratio::new(n, e)))
            .unwrap_or(Valuation::Infinity)
    }

    /// The valuation if it is certified, otherwise the precision bound the
    /// element is known to vanish to.
    pub fn valuation_bound(&self) -> Ratio<i64> {
        let e = self.field.e as i64;
        match self.valuation() {
            Valuation::Finite(v) => v,
            Valuation::Infinity => Ratio::new(self.pi_precision(), e),
        }
    }

    /// Valuation in units of `v(pi) = 1`.
    pub fn pi_valuation(&self) -> Option<i64> {
        let e = self.field.e as i64;
        self.coords
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.val_int().map(|v| v * e + i as i64))
            .min()
    }

    /// Absolute precision in units of `v(pi) = 1`.
    pub fn pi_precision(&self) -> i64 {
        let e = self.field.e as i64;
        self.coords
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs_precision().saturating_mul(e).saturating_add(i as i64))
            .min()
            .unwrap_or(i64::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// True when `self - other` has valuation at least `bound` (or is zero to precision).
    pub fn agrees_to(&self, other: &Self, bound: i64) -> bool {
        match self.sub(other).valuation() {
            Valuation::Infinity => true,
            Valuation::Finite(v) => v >= Ratio::from_integer(bound),
        }
    }

    pub fn residue(&self) -> F9 {
        self.coords[0].residue()
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let coords = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a.add(b))
            .collect();
        FieldElement::new(&self.field, coords)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        FieldElement::new(&self.field, self.coords.iter().map(Qp2::neg).collect())
    }

    pub fn scale(&self, c: &Qp2) -> Self {
        FieldElement::new(&self.field, self.coords.iter().map(|x| x.mul(c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let e = self.field.e as usize;
        let mut prod = vec![Qp2::zero(); 2 * e - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.re.is_exact_zero() && a.im.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                prod[i + j] = prod[i + j].add(&a.mul(b));
            }
        }
        let eis = &self.field.eis;
        for k in (e..2 * e - 1).rev() {
            let c = prod[k];
            prod[k] = Qp2::zero();
            for i in 0..e {
                prod[k - e + i] = prod[k - e + i].sub(&c.mul(&eis[i]));
            }
        }
        prod.truncate(e);
        FieldElement::new(&self.field, prod)
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Apply the unramified Frobenius `m` times coordinatewise.
    pub fn sigma_pow(&self, m: u32) -> Self {
        FieldElement::new(
            &self.field,
            self.coords.iter().map(|c| c.sigma_pow(m)).collect(),
        )
    }

    pub fn inv(&self) -> Result<Self, LocalFieldError> {
        let k = self.pi_valuation().ok_or(LocalFieldError::InversionOfZero)?;
        let field = Arc::clone(&self.field);
        let u = self.mul(&field.pi_pow(-k));
        let r = u.residue();
        let r_inv = r.inv().ok_or(LocalFieldError::InversionOfZero)?;
        let mut y = FieldElement::from_qp2(&field, Qp2::lift(r_inv));
        let two = field.int(2);
        for _ in 0..16 {
            let err = field.one().sub(&u.mul(&y));
            if err.is_zero() {
                break;
            }
            y = y.mul(&two.sub(&u.mul(&y)));
        }
        Ok(y.mul(&field.pi_pow(-k)))
    }

    pub fn div(&self, o: &Self) -> Result<Self, LocalFieldError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn truncate_pi(&self, abs_pi: i64) -> Self {
        let e = self.field.e as i64;
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let abs = (abs_pi - i as i64 + e - 1).div_euclid(e);
                c.truncate_abs(abs)
            })
            .collect();
        FieldElement::new(&self.field, coords)
    }

    /// Lexicographic key of the pi-adic digits (digit index a + 3b), used for canonical ordering.
    pub fn digit_key(&self, len: usize) -> Vec<usize> {
        let field = Arc::clone(&self.field);
        let pi_inv = field.pi_inv();
        let mut x = self.clone();
        let mut key = Vec::with_capacity(len);
        for _ in 0..len {
            if x.is_zero() {
                key.push(0);
                continue;
            }
            let d = x.residue();
            key.push(d.index());
            x = x.sub(&FieldElement::from_qp2(&field, Qp2::lift(d))).mul(&pi_inv);
        }
        key
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.re.is_exact_zero() && c.im.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "[{c}]*pi")?,
                _ => write!(f, "[{c}]*pi^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
