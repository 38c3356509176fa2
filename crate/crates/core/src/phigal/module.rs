use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;

use super::PhiGalError;
use crate::local_fields::{catalog, FieldElement, GaloisGroup, Qp2, TowerField};
use crate::padic::{PadicNumber, PrecisionPolicy, Valuation};
use crate::semilinear::{nullspace, rref, K0Elem, K0Matrix, Scalar};

/// A point of P^1(Q3), written `[x : 1]` or `[1 : 0]`.
#[derive(Clone, Debug)]
pub enum ProjParam {
    Rational(BigRational),
    Infinity,
    /// A 3-adic point with no small-height rational representative.
    Padic(PadicNumber),
}

impl ProjParam {
    pub fn int(n: i64) -> Self {
        ProjParam::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        ProjParam::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjParam::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ProjParam::Rational(r) => r.is_zero(),
            ProjParam::Padic(p) => p.is_zero(),
            ProjParam::Infinity => false,
        }
    }

    /// Homogeneous coordinates `(x, y)`.
    pub fn homogeneous(&self) -> (Scalar, Scalar) {
        match self {
            ProjParam::Rational(r) => (Scalar::Exact(r.clone()), Scalar::one()),
            ProjParam::Padic(p) => (Scalar::Approx(*p), Scalar::one()),
            ProjParam::Infinity => (Scalar::one(), Scalar::zero()),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            ProjParam::Infinity => "inf".into(),
            ProjParam::Rational(r) => Scalar::Exact(r.clone()).to_text(),
            ProjParam::Padic(p) => p.to_digit_string(),
        }
    }

    pub fn parse_text(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Some(ProjParam::Infinity);
        }
        match Scalar::parse_text(s)? {
            Scalar::Exact(r) => Some(ProjParam::Rational(r)),
            Scalar::Approx(p) => Some(ProjParam::Padic(p)),
        }
    }

    pub fn equals(&self, other: &Self) -> bool {
        match (self, other) {
            (ProjParam::Infinity, ProjParam::Infinity) => true,
            (ProjParam::Infinity, _) | (_, ProjParam::Infinity) => false,
            _ => self.homogeneous().0.equals(&other.homogeneous().0),
        }
    }
}

impl fmt::Display for ProjParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Embed a K0 scalar into K.
pub fn k0_in_field(field: &Arc<TowerField>, x: &K0Elem) -> FieldElement {
    FieldElement::from_qp2(field, x.to_qp2())
}

pub(crate) type KVector = [FieldElement; 2];

/// `M * v` for the linear part of `M`, on K-coordinates.
pub(crate) fn apply_linear(field: &Arc<TowerField>, m: &K0Matrix, v: &KVector) -> KVector {
    let e = |i: usize, j: usize| k0_in_field(field, m.entry(i, j));
    [
        e(0, 0).mul(&v[0]).add(&e(0, 1).mul(&v[1])),
        e(1, 0).mul(&v[0]).add(&e(1, 1).mul(&v[1])),
    ]
}

pub(crate) fn min_valuation(v: &KVector) -> Valuation {
    v[0].valuation().min(v[1].valuation())
}

/// Is `x` zero relative to the scale `reference`?
pub(crate) fn negligible(x: &FieldElement, reference: Valuation, bound: u32) -> bool {
    match (x.valuation(), reference) {
        (Valuation::Infinity, _) => true,
        (_, Valuation::Infinity) => false,
        (Valuation::Finite(v), Valuation::Finite(r)) => v >= r + Ratio::from_integer(bound as i64),
    }
}

pub(crate) fn det2(a: &KVector, b: &KVector) -> FieldElement {
    a[0].mul(&b[1]).sub(&a[1].mul(&b[0]))
}

/// Do two nonzero vectors of K^2 span the same line?
pub(crate) fn same_line(a: &KVector, b: &KVector, bound: u32) -> bool {
    let scale = match (min_valuation(a), min_valuation(b)) {
        (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x + y),
        _ => return false,
    };
    negligible(&det2(a, b), scale, bound)
}

/// Q3-coordinates of a field element over the basis `zeta4^c pi^i`, ordered by (i, c).
pub(crate) fn flatten_field(x: &FieldElement) -> Vec<Scalar> {
    x.coord_array()
        .into_iter()
        .flatten()
        .map(|p| {
            if p.is_exact_zero() {
                Scalar::zero()
            } else {
                Scalar::Approx(p)
            }
        })
        .collect()
}

pub(crate) fn unflatten_field(field: &Arc<TowerField>, c: &[Scalar]) -> FieldElement {
    let f = field.unramified_degree() as usize;
    let coords = c
        .chunks(f)
        .map(|ch| {
            let re = ch[0].to_padic();
            let im = if f == 2 {
                ch[1].to_padic()
            } else {
                PadicNumber::exact_zero()
            };
            let fix = |p: PadicNumber, s: &Scalar| {
                if s.is_zero() && s.is_exact() {
                    PadicNumber::exact_zero()
                } else {
                    p
                }
            };
            Qp2::new(fix(re, &ch[0]), if f == 2 { fix(im, &ch[1]) } else { im })
        })
        .collect();
    FieldElement::new(field, coords)
}

pub(crate) fn field_basis(field: &Arc<TowerField>) -> Vec<FieldElement> {
    let e = field.ramification_index() as usize;
    let f = field.unramified_degree() as usize;
    let mut out = Vec::with_capacity(e * f);
    for i in 0..e {
        for c in 0..f {
            let mut coords = vec![Qp2::zero(); e];
            coords[i] = if c == 0 { Qp2::one() } else { Qp2::zeta4() };
            out.push(FieldElement::new(field, coords));
        }
    }
    out
}

/// A rank-2 (phi, Gal(K/Q3))-module: matrices over K0 in a fixed basis (e1, e2).
#[derive(Clone, Debug)]
pub struct PhiGalModule {
    field_label: String,
    field: Arc<TowerField>,
    group: Arc<GaloisGroup>,
    phi: K0Matrix,
    galois: Vec<(String, K0Matrix)>,
    policy: PrecisionPolicy,
    plane: OnceLock<Result<[KVector; 2], PhiGalError>>,
}

impl PhiGalModule {
    /// Validates bijectivity, twists, phi-equivariance and the group relations.
    pub fn new(
        field_label: &str,
        phi: K0Matrix,
        galois: Vec<(String, K0Matrix)>,
    ) -> Result<Self, PhiGalError> {
        let entry = catalog().get(field_label)?;
        let field = entry.field();
        let group = entry.group()?;
        let f = field.unramified_degree();
        let bad = |m: String| Err(PhiGalError::InvalidModule(m));
        if phi.f != f || phi.twist != 1 % f {
            return bad(format!("phi must be sigma-semilinear over a K0 of degree {f}"));
        }
        if !phi.is_invertible() {
            return bad("phi is not bijective".into());
        }
        let mut ordered = Vec::new();
        for name in group.generator_names() {
            let Some((_, m)) = galois.iter().find(|(n, _)| n == name) else {
                return bad(format!("missing matrix for generator {name}"));
            };
            let auto = group.generator_automorphism(name).expect("named generator");
            if m.f != f || m.twist != auto.unramified_exponent() % f {
                return bad(format!("{name} must have twist {}", auto.unramified_exponent()));
            }
            ordered.push((name.clone(), m.clone()));
        }
        if galois.len() != ordered.len() {
            return bad("matrices given for unknown generators".into());
        }
        let module = PhiGalModule {
            field_label: field_label.to_string(),
            field,
            group,
            phi,
            galois: ordered,
            policy: PrecisionPolicy::default(),
            plane: OnceLock::new(),
        };
        module.validate()?;
        Ok(module)
    }

    fn validate(&self) -> Result<(), PhiGalError> {
        for (name, m) in &self.galois {
            if !self.phi.compose(m).equals(&m.compose(&self.phi)) {
                return Err(PhiGalError::InvalidModule(format!("phi does not commute with {name}")));
            }
            let order = self.group.generator_automorphism(name).expect("generator").order();
            if !m.pow(order as i64)?.is_identity() {
                return Err(PhiGalError::InvalidModule(format!("{name}^{order} is not the identity")));
            }
        }
        for r in self.group.relations() {
            let l = self.word_matrix(&r.lhs)?;
            let rr = self.word_matrix(&r.rhs)?;
            if !l.equals(&rr) {
                return Err(PhiGalError::InvalidModule(format!("relation {r} fails")));
            }
        }
        Ok(())
    }

    pub fn field_label(&self) -> &str {
        &self.field_label
    }

    pub fn field(&self) -> &Arc<TowerField> {
        &self.field
    }

    pub fn group(&self) -> &Arc<GaloisGroup> {
        &self.group
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    pub fn f(&self) -> u32 {
        self.field.unramified_degree()
    }

    pub fn e(&self) -> u32 {
        self.field.ramification_index()
    }

    pub fn phi(&self) -> &K0Matrix {
        &self.phi
    }

    pub fn galois(&self) -> &[(String, K0Matrix)] {
        &self.galois
    }

    pub fn generator_matrix(&self, name: &str) -> Option<&K0Matrix> {
        self.galois.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// Same Galois action, different Frobenius.
    pub fn with_phi(&self, phi: K0Matrix) -> Result<Self, PhiGalError> {
        Self::new(&self.field_label, phi, self.galois.clone())
    }

    pub fn word_matrix(&self, word: &[(String, i32)]) -> Result<K0Matrix, PhiGalError> {
        let mut acc = K0Matrix::identity(self.f());
        for (g, k) in word {
            let m = self
                .generator_matrix(g)
                .ok_or_else(|| PhiGalError::InvalidModule(format!("unknown generator {g}")))?;
            acc = acc.compose(&m.pow(*k as i64)?);
        }
        Ok(acc)
    }

    /// Matrix of the group element with table index `idx`.
    pub fn element_matrix(&self, idx: usize) -> K0Matrix {
        let word = &self.group.elements()[idx].word;
        let mut acc = K0Matrix::identity(self.f());
        if word != "1" {
            for g in word.split(' ') {
                acc = acc.compose(self.generator_matrix(g).expect("generator matrix"));
            }
        }
        acc
    }

    /// Diagonal action of a generator on `K (x) D`.
    pub(crate) fn act(&self, name: &str, v: &KVector) -> Result<KVector, PhiGalError> {
        let auto = self
            .group
            .generator_automorphism(name)
            .ok_or_else(|| PhiGalError::InvalidModule(format!("unknown generator {name}")))?;
        let m = self.generator_matrix(name).expect("validated");
        let moved = [auto.apply(&v[0])?, auto.apply(&v[1])?];
        Ok(apply_linear(&self.field, m, &moved))
    }

    /// Is the K-line through `v` stable under every generator?
    pub(crate) fn line_is_stable(&self, v: &KVector) -> Result<bool, PhiGalError> {
        for (name, _) in &self.galois {
            if !same_line(&self.act(name, v)?, v, self.policy.min_acceptable) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Q3-basis of the Galois invariants of `K (x) D`, a plane by Galois descent.
    ///
    /// The basis is in echelon form over the coordinates (x before y, low powers
    /// of pi first) and each vector is scaled by a power of 3 so that its
    /// valuation lies in (-1/2, 1/2].
    pub fn fixed_plane(&self) -> Result<[KVector; 2], PhiGalError> {
        self.plane.get_or_init(|| self.compute_plane()).clone()
    }

    fn compute_plane(&self) -> Result<[KVector; 2], PhiGalError> {
        let field = &self.field;
        let basis = field_basis(field);
        let n = basis.len();
        let zero = field.zero();
        let bound = self.policy.min_acceptable;
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for (name, m) in &self.galois {
            let auto = self.group.generator_automorphism(name).expect("generator");
            let images = basis
                .iter()
                .map(|b| auto.apply(b))
                .collect::<Result<Vec<_>, _>>()?;
            let cols: Vec<Vec<Scalar>> = (0..2 * n)
                .map(|k| {
                    let (v, gv) = if k < n {
                        ([basis[k].clone(), zero.clone()], [images[k].clone(), zero.clone()])
                    } else {
                        (
                            [zero.clone(), basis[k - n].clone()],
                            [zero.clone(), images[k - n].clone()],
                        )
                    };
                    let w = apply_linear(field, m, &gv);
                    let mut out = flatten_field(&w[0].sub(&v[0]));
                    out.extend(flatten_field(&w[1].sub(&v[1])));
                    out
                })
                .collect();
            for i in 0..2 * n {
                rows.push(cols.iter().map(|c| c[i].clone()).collect());
            }
        }
        let mut kernel = nullspace(rows, 2 * n, bound);
        if kernel.len() != 2 {
            return Err(PhiGalError::DescentFailure(kernel.len()));
        }
        rref(&mut kernel, 2 * n, bound);
        let half = Ratio::new(1, 2);
        let vecs: Vec<KVector> = kernel
            .iter()
            .map(|row| {
                let v = [
                    unflatten_field(field, &row[..n]),
                    unflatten_field(field, &row[n..]),
                ];
                let val = match min_valuation(&v) {
                    Valuation::Finite(x) => x,
                    Valuation::Infinity => Ratio::zero(),
                };
                let k = (val - half).ceil().to_integer();
                let s = Qp2::one().mul_pow3(-k);
                [v[0].scale(&s), v[1].scale(&s)]
            })
            .collect();
        Ok([vecs[0].clone(), vecs[1].clone()])
    }
}

/// A module with a Hodge-Tate (0,1) filtration: `Fil^1 D_K = K * (x e1 + y e2)`.
#[derive(Clone, Debug)]
pub struct FilteredModule {
    pub base: Arc<PhiGalModule>,
    pub fil: KVector,
}

impl FilteredModule {
    /// Checks the line is well formed; Galois stability is reported by the
    /// condition checks rather than enforced here.
    pub fn new(base: Arc<PhiGalModule>, fil: KVector) -> Result<Self, PhiGalError> {
        for c in &fil {
            if !Arc::ptr_eq(c.field(), base.field()) && **c.field() != **base.field() {
                return Err(PhiGalError::WrongField {
                    expected: base.field_label().to_string(),
                    found: c.field().label().to_string(),
                });
            }
        }
        if fil[0].is_zero() && fil[1].is_zero() {
            return Err(PhiGalError::InvalidModule("filtration line is zero".into()));
        }
        Ok(FilteredModule { base, fil })
    }

    /// The line through `x v1 + y v2` for `t = [x : y]` in the fixed-plane basis.
    pub fn from_point(base: Arc<PhiGalModule>, t: &ProjParam) -> Result<Self, PhiGalError> {
        let [v1, v2] = base.fixed_plane()?;
        let (x, y) = t.homogeneous();
        let (x, y) = (x.to_padic(), y.to_padic());
        let lift = |s: &PadicNumber| {
            if s.is_zero() {
                Qp2::zero()
            } else {
                Qp2::from_padic(*s)
            }
        };
        let fil = [
            v1[0].scale(&lift(&x)).add(&v2[0].scale(&lift(&y))),
            v1[1].scale(&lift(&x)).add(&v2[1].scale(&lift(&y))),
        ];
        if !base.line_is_stable(&fil)? {
            return Err(PhiGalError::InvalidModule(
                "line from the fixed plane is not Galois stable".into(),
            ));
        }
        Self::new(base, fil)
    }

    /// Slope `x / y` of the filtration line, `None` at infinity.
    pub fn slope(&self) -> Option<FieldElement> {
        let scale = min_valuation(&self.fil);
        if negligible(&self.fil[1], scale, self.base.policy().min_acceptable) {
            return None;
        }
        self.fil[0].div(&self.fil[1]).ok()
    }

    pub fn field(&self) -> &Arc<TowerField> {
        self.base.field()
    }
}
