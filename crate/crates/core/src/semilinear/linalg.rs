//! Q3-linear algebra on flattened semilinear problems.
//!
//! Every K0-coordinate is split into `f` rational coordinates so that the
//! semilinear conditions become honest linear systems over Q3.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::matrix::{K0Matrix, K0Vector};
use super::scalar::{K0Elem, Scalar};
use super::SemilinearError;
use crate::padic::{rational_reconstruct, PrecisionPolicy, Valuation};

/// Height bound used when recognizing approximate rationals.
pub const RATIONAL_HEIGHT: u64 = 1_000_000;

/// Row-reduced echelon form. Pivots are chosen with minimal valuation in their
/// column, entries passing `is_negligible(zero_bound)` count as zero.
pub fn rref(rows: &mut [Vec<Scalar>], ncols: usize, zero_bound: u32) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let best = (r..rows.len())
            .filter(|&i| !rows[i][c].is_negligible(zero_bound))
            .min_by_key(|&i| match rows[i][c].val() {
                Valuation::Finite(v) => v,
                Valuation::Infinity => num_rational::Ratio::from_integer(i64::MAX),
            });
        let Some(p) = best else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = x.mul(&inv);
        }
        rows[r][c] = Scalar::one();
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_negligible(zero_bound) {
                if i != r {
                    rows[i][c] = Scalar::zero();
                }
                continue;
            }
            let factor = rows[i][c].clone();
            for j in 0..ncols {
                let d = rows[r][j].mul(&factor);
                rows[i][j] = rows[i][j].sub(&d);
            }
            rows[i][c] = Scalar::zero();
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the kernel of the system `rows * x = 0`.
pub fn nullspace(mut rows: Vec<Vec<Scalar>>, ncols: usize, zero_bound: u32) -> Vec<Vec<Scalar>> {
    let pivots = rref(&mut rows, ncols, zero_bound);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = rows[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Solve `a * x = b`; `None` if inconsistent. Free variables are set to zero.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar], zero_bound: u32) -> Option<Vec<Scalar>> {
    let ncols = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows, ncols + 1, zero_bound);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = rows[r][ncols].clone();
    }
    Some(x)
}

pub fn rank(mut rows: Vec<Vec<Scalar>>, ncols: usize, zero_bound: u32) -> usize {
    rref(&mut rows, ncols, zero_bound).len()
}

/// Rational coordinates of a K0 element (length `f`).
pub fn flatten_elem(x: &K0Elem, f: u32) -> Vec<Scalar> {
    if f == 1 {
        vec![x.re.clone()]
    } else {
        vec![x.re.clone(), x.im.clone()]
    }
}

fn unflatten_elem(c: &[Scalar], f: u32) -> K0Elem {
    if f == 1 {
        K0Elem::real(c[0].clone())
    } else {
        K0Elem::new(c[0].clone(), c[1].clone())
    }
}

fn basis_elem(c: usize) -> K0Elem {
    if c == 0 {
        K0Elem::one()
    } else {
        K0Elem::zeta4()
    }
}

/// Q3-basis of the linear 2x2 matrices over K0, ordered by (row, column, coordinate).
pub fn matrix_basis(f: u32) -> Vec<K0Matrix> {
    let mut out = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for c in 0..f as usize {
                let mut m = K0Matrix::zero(f);
                m.m[i][j] = basis_elem(c);
                out.push(m);
            }
        }
    }
    out
}

pub fn flatten_matrix(m: &K0Matrix) -> Vec<Scalar> {
    m.m.iter().flatten().flat_map(|x| flatten_elem(x, m.f)).collect()
}

pub fn combine_matrices(basis: &[K0Matrix], coeffs: &[Scalar], f: u32) -> K0Matrix {
    let mut acc = K0Matrix::zero(f);
    for (b, c) in basis.iter().zip(coeffs) {
        acc = acc.add(&b.scale_q3(c)).expect("linear matrices");
    }
    acc
}

/// Q3-subspace of linear maps satisfying a family of intertwining conditions.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub f: u32,
    pub basis: Vec<K0Matrix>,
}

impl SolutionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn combine(&self, coeffs: &[Scalar]) -> K0Matrix {
        combine_matrices(&self.basis, coeffs, self.f)
    }
}

/// All linear X (over K0) with `X o L = R o X` for each pair `(L, R)`.
pub fn equivariant_solution_space(
    constraints: &[(K0Matrix, K0Matrix)],
    f: u32,
    policy: &PrecisionPolicy,
) -> Result<SolutionSpace, SemilinearError> {
    let basis = matrix_basis(f);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (l, r) in constraints {
        if l.twist != r.twist {
            return Err(SemilinearError::TwistMismatch(l.twist, r.twist));
        }
        if l.f != f || r.f != f {
            return Err(SemilinearError::FieldMismatch);
        }
        // Column k: the flattened residual X o L - R o X for X = basis[k].
        let cols: Vec<Vec<Scalar>> = basis
            .iter()
            .map(|b| {
                let left = b.compose(l);
                let right = r.compose(b);
                let mut diff = left.clone();
                for i in 0..2 {
                    for j in 0..2 {
                        diff.m[i][j] = left.m[i][j].sub(&right.m[i][j]);
                    }
                }
                flatten_matrix(&diff)
            })
            .collect();
        for i in 0..cols[0].len() {
            rows.push(cols.iter().map(|c| c[i].clone()).collect());
        }
    }
    let kernel = nullspace(rows, basis.len(), policy.min_acceptable);
    Ok(SolutionSpace {
        f,
        basis: kernel
            .iter()
            .map(|c| combine_matrices(&basis, c, f))
            .collect(),
    })
}

/// Q3-basis of the vectors fixed by every given semilinear map.
pub fn fixed_space(maps: &[K0Matrix], f: u32, policy: &PrecisionPolicy) -> Vec<K0Vector> {
    let n = 2 * f as usize;
    let unit = |k: usize| -> K0Vector {
        let mut v = [K0Elem::zero(), K0Elem::zero()];
        v[k / f as usize] = basis_elem(k % f as usize);
        v
    };
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for g in maps {
        let cols: Vec<Vec<Scalar>> = (0..n)
            .map(|k| {
                let v = unit(k);
                let gv = g.apply(&v);
                let mut out = flatten_elem(&gv[0].sub(&v[0]), f);
                out.extend(flatten_elem(&gv[1].sub(&v[1]), f));
                out
            })
            .collect();
        for i in 0..n {
            rows.push(cols.iter().map(|c| c[i].clone()).collect());
        }
    }
    nullspace(rows, n, policy.min_acceptable)
        .iter()
        .map(|c| {
            [
                unflatten_elem(&c[..f as usize], f),
                unflatten_elem(&c[f as usize..], f),
            ]
        })
        .collect()
}

/// Q3-coordinates of `target` in the span of `basis`, if it lies there.
pub fn coordinates_in(
    basis: &[K0Vector],
    target: &K0Vector,
    f: u32,
    policy: &PrecisionPolicy,
) -> Option<Vec<Scalar>> {
    let flat = |v: &K0Vector| {
        let mut out = flatten_elem(&v[0], f);
        out.extend(flatten_elem(&v[1], f));
        out
    };
    let cols: Vec<Vec<Scalar>> = basis.iter().map(flat).collect();
    let rhs = flat(target);
    let a: Vec<Vec<Scalar>> = (0..rhs.len())
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    solve(&a, &rhs, policy.min_acceptable)
}

/// Recognize a Q3 scalar as a rational of bounded height.
///
/// The bound shrinks with the available precision so that a recovered
/// fraction is always the unique one below it.
pub fn to_rational(x: &Scalar) -> Option<BigRational> {
    match x {
        Scalar::Exact(r) => Some(r.clone()),
        Scalar::Approx(p) if p.is_zero() => Some(BigRational::from_integer(BigInt::from(0))),
        Scalar::Approx(p) => {
            let cap = (3f64.powi(p.precision() as i32) / 2.0).sqrt().floor() as u64;
            let bound = RATIONAL_HEIGHT.min(cap.saturating_sub(1));
            if bound == 0 {
                return None;
            }
            rational_reconstruct(p, bound)
        }
    }
}

/// Characteristic polynomial `X^2 + c1 X + c0` of a linear map, as `[c0, c1, 1]`.
pub fn char_poly(m: &K0Matrix) -> Result<[BigRational; 3], SemilinearError> {
    if m.twist != 0 {
        return Err(SemilinearError::TwistMismatch(m.twist, 0));
    }
    let tr = m.trace();
    let det = m.det();
    let rational = |x: &K0Elem| -> Result<BigRational, SemilinearError> {
        if !x.im.is_zero() {
            if to_rational(&x.im).is_some_and(|r| r == BigRational::from_integer(BigInt::from(0))) {
                return to_rational(&x.re).ok_or(SemilinearError::NotRational);
            }
            return Err(SemilinearError::NotRational);
        }
        to_rational(&x.re).ok_or(SemilinearError::NotRational)
    };
    Ok([
        rational(&det)?,
        -rational(&tr)?,
        BigRational::from_integer(BigInt::from(1)),
    ])
}
