use std::fmt;

use super::scalar::{K0Elem, Scalar};
use super::SemilinearError;

/// A sigma^twist-semilinear endomorphism of K0^2: `v -> M * sigma^twist(v)`.
///
/// Columns hold the images of the standard basis vectors. `f` is the degree of K0
/// over Q3 (1 or 2); twists are taken modulo `f`.
#[derive(Clone, Debug)]
pub struct K0Matrix {
    pub m: [[K0Elem; 2]; 2],
    pub twist: u32,
    pub f: u32,
}

pub type K0Vector = [K0Elem; 2];

impl K0Matrix {
    pub fn new(m: [[K0Elem; 2]; 2], twist: u32, f: u32) -> Self {
        assert!(f == 1 || f == 2, "K0 has degree 1 or 2 over Q3");
        K0Matrix {
            m,
            twist: twist % f,
            f,
        }
    }

    pub fn from_ints(rows: [[i64; 2]; 2], twist: u32, f: u32) -> Self {
        Self::new(rows.map(|r| r.map(K0Elem::int)), twist, f)
    }

    pub fn linear(m: [[K0Elem; 2]; 2], f: u32) -> Self {
        Self::new(m, 0, f)
    }

    pub fn diag(a: K0Elem, b: K0Elem, twist: u32, f: u32) -> Self {
        Self::new([[a, K0Elem::zero()], [K0Elem::zero(), b]], twist, f)
    }

    pub fn scalar(c: K0Elem, f: u32) -> Self {
        Self::diag(c.clone(), c, 0, f)
    }

    pub fn identity(f: u32) -> Self {
        Self::scalar(K0Elem::one(), f)
    }

    pub fn zero(f: u32) -> Self {
        Self::scalar(K0Elem::zero(), f)
    }

    pub fn entry(&self, i: usize, j: usize) -> &K0Elem {
        &self.m[i][j]
    }

    pub fn is_exact(&self) -> bool {
        self.m.iter().flatten().all(K0Elem::is_exact)
    }

    fn map_entries(&self, g: impl Fn(&K0Elem) -> K0Elem) -> [[K0Elem; 2]; 2] {
        [
            [g(&self.m[0][0]), g(&self.m[0][1])],
            [g(&self.m[1][0]), g(&self.m[1][1])],
        ]
    }

    /// Entrywise sigma^k.
    pub fn sigma_pow(&self, k: u32) -> Self {
        Self::new(self.map_entries(|x| x.sigma_pow(k)), self.twist, self.f)
    }

    fn matmul(a: &[[K0Elem; 2]; 2], b: &[[K0Elem; 2]; 2]) -> [[K0Elem; 2]; 2] {
        let e = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }

    /// `(A, a) o (B, b) = (A * sigma^a(B), a + b)`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.f, other.f, "matrices over different K0");
        let sb = other.sigma_pow(self.twist);
        Self::new(Self::matmul(&self.m, &sb.m), self.twist + other.twist, self.f)
    }

    pub fn add(&self, other: &Self) -> Result<Self, SemilinearError> {
        if self.twist != other.twist {
            return Err(SemilinearError::TwistMismatch(self.twist, other.twist));
        }
        let m = [
            [self.m[0][0].add(&other.m[0][0]), self.m[0][1].add(&other.m[0][1])],
            [self.m[1][0].add(&other.m[1][0]), self.m[1][1].add(&other.m[1][1])],
        ];
        Ok(Self::new(m, self.twist, self.f))
    }

    pub fn scale(&self, c: &K0Elem) -> Self {
        Self::new(self.map_entries(|x| x.mul(c)), self.twist, self.f)
    }

    pub fn scale_q3(&self, c: &Scalar) -> Self {
        Self::new(self.map_entries(|x| x.scale(c)), self.twist, self.f)
    }

    pub fn det(&self) -> K0Elem {
        self.m[0][0]
            .mul(&self.m[1][1])
            .sub(&self.m[0][1].mul(&self.m[1][0]))
    }

    pub fn trace(&self) -> K0Elem {
        self.m[0][0].add(&self.m[1][1])
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Self, SemilinearError> {
        let d = self.det().inv().ok_or(SemilinearError::Singular)?;
        let adj = [
            [self.m[1][1].clone(), self.m[0][1].neg()],
            [self.m[1][0].neg(), self.m[0][0].clone()],
        ];
        let lin = Self::new(adj, 0, self.f).scale(&d);
        // (M, t)^-1 = (sigma^-t(M^-1), -t); sigma has order f so -t = t here.
        let back = (self.f - self.twist) % self.f;
        let mut inv = lin.sigma_pow(back);
        inv.twist = back;
        Ok(inv)
    }

    pub fn pow(&self, n: i64) -> Result<Self, SemilinearError> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::identity(self.f);
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose(&base);
        }
        Ok(acc)
    }

    pub fn apply(&self, v: &K0Vector) -> K0Vector {
        let w = [v[0].sigma_pow(self.twist), v[1].sigma_pow(self.twist)];
        [
            self.m[0][0].mul(&w[0]).add(&self.m[0][1].mul(&w[1])),
            self.m[1][0].mul(&w[0]).add(&self.m[1][1].mul(&w[1])),
        ]
    }

    /// Same twist and entrywise equality (to shared precision for approximations).
    pub fn equals(&self, other: &Self) -> bool {
        self.twist == other.twist
            && self.f == other.f
            && self
                .m
                .iter()
                .flatten()
                .zip(other.m.iter().flatten())
                .all(|(a, b)| a.equals(b))
    }

    pub fn is_identity(&self) -> bool {
        self.equals(&Self::identity(self.f))
    }

    pub fn entries_text(&self) -> [[String; 2]; 2] {
        self.map_entries(|x| x.clone()).map(|r| r.map(|x| x.to_text()))
    }

    pub fn from_text(rows: &[[String; 2]; 2], twist: u32, f: u32) -> Result<Self, SemilinearError> {
        let mut out = Vec::with_capacity(4);
        for (i, row) in rows.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                let x = K0Elem::parse_text(s).map_err(|pos| SemilinearError::Parse {
                    entry: (i, j),
                    position: pos,
                    text: s.clone(),
                })?;
                if f == 1 && !x.im.is_zero() {
                    return Err(SemilinearError::Parse {
                        entry: (i, j),
                        position: 0,
                        text: s.clone(),
                    });
                }
                out.push(x);
            }
        }
        let mut it = out.into_iter();
        let mut next = || it.next().expect("four entries");
        Ok(Self::new([[next(), next()], [next(), next()]], twist, f))
    }
}

impl fmt::Display for K0Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.entries_text();
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            t[0][0], t[0][1], t[1][0], t[1][1]
        )?;
        if self.twist != 0 {
            write!(f, " sigma^{}", self.twist)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_zeta_squared_is_minus_identity() {
        let z = K0Elem::zeta4();
        let m = K0Matrix::diag(z.clone(), z.inv().unwrap(), 0, 2);
        assert!(m.compose(&m).equals(&K0Matrix::scalar(K0Elem::int(-1), 2)));
    }

    #[test]
    fn semilinear_composition_and_inverse() {
        let a = K0Matrix::new(
            [[K0Elem::zeta4(), K0Elem::one()], [K0Elem::zero(), K0Elem::int(2)]],
            1,
            2,
        );
        let v = [K0Elem::gauss((1, 1), (2, 1)), K0Elem::gauss((0, 1), (-1, 3))];
        let aa = a.compose(&a);
        assert_eq!(aa.twist, 0);
        let lhs = aa.apply(&v);
        let rhs = a.apply(&a.apply(&v));
        assert!(lhs[0].equals(&rhs[0]) && lhs[1].equals(&rhs[1]));
        assert!(a.compose(&a.inverse().unwrap()).is_identity());
        assert!(a.inverse().unwrap().compose(&a).is_identity());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let a = K0Matrix::new(
            [[K0Elem::gauss((1, 2), (3, 2)), K0Elem::int(-3)], [K0Elem::one(), K0Elem::zero()]],
            1,
            2,
        );
        let b = K0Matrix::from_text(&a.entries_text(), 1, 2).unwrap();
        assert!(a.equals(&b));
        let bad = [["1".to_string(), "x".to_string()], ["0".to_string(), "1".to_string()]];
        assert!(matches!(
            K0Matrix::from_text(&bad, 0, 1),
            Err(SemilinearError::Parse { entry: (0, 1), .. })
        ));
    }
}
