use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use super::module::{negligible, FilteredModule, PhiGalModule, ProjParam};
use super::PhiGalError;
use crate::local_fields::{catalog, FieldElement, Qp2};
use crate::padic::{hensel_root, PadicNumber, PrecisionPolicy};
use crate::semilinear::{K0Elem, K0Matrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Dc,
    Dpc,
    Dpcg,
    Dpcng,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Dc => "Dc",
            Kind::Dpc => "Dpc",
            Kind::Dpcg => "Dpcg",
            Kind::Dpcng => "Dpcng",
        }
    }
}

/// Name of a class of filtered modules, e.g. `Dc(1;-3;0)`, `Dpcg(3;0,-1)`,
/// `Dpc(12;0;3;1;1/2)`.
///
/// `extra` holds mu for `Dpcg` and (i, epsilon) for the degree 12 family. The
/// parameter is the filtration line: the slope x/y of Fil for `Dc` and
/// `Dpc(4;...)`, the fixed-plane point otherwise. `Dpcg` carries none since
/// all its filtrations are isomorphic.
#[derive(Clone, Debug)]
pub struct ClassLabel {
    pub kind: Kind,
    pub e: u32,
    pub trace: i64,
    pub extra: Vec<i64>,
    pub param: Option<ProjParam>,
}

const SUPERSINGULAR: [i64; 3] = [-3, 0, 3];
const ORDINARY: [i64; 4] = [-2, -1, 1, 2];

/// Allowed mu for each trace in the abelian cubic and sextic rows.
pub(crate) fn abelian_mus(a: i64) -> &'static [i64] {
    match a {
        -3 => &[1, 2],
        0 => &[-1, 1],
        3 => &[-2, -1],
        _ => &[],
    }
}

impl ClassLabel {
    pub fn dc(e: u32, a: i64, param: ProjParam) -> Self {
        ClassLabel { kind: Kind::Dc, e, trace: a, extra: vec![], param: Some(param) }
    }

    pub fn dpc4(param: ProjParam) -> Self {
        ClassLabel { kind: Kind::Dpc, e: 4, trace: 0, extra: vec![], param: Some(param) }
    }

    pub fn dpc12(i: i64, eps: i64, param: ProjParam) -> Self {
        ClassLabel { kind: Kind::Dpc, e: 12, trace: 0, extra: vec![i, eps], param: Some(param) }
    }

    pub fn dpcng(e: u32, param: ProjParam) -> Self {
        ClassLabel { kind: Kind::Dpcng, e, trace: 0, extra: vec![], param: Some(param) }
    }

    pub fn dpcg(e: u32, a: i64, mu: i64) -> Self {
        ClassLabel { kind: Kind::Dpcg, e, trace: a, extra: vec![mu], param: None }
    }

    pub fn is_ordinary(&self) -> bool {
        self.kind == Kind::Dc && ORDINARY.contains(&self.trace)
    }

    /// Rows whose classes form a P^1(Q3) family.
    pub fn is_projective_family(&self) -> bool {
        matches!(self.kind, Kind::Dpc | Kind::Dpcng)
    }

    /// Catalog label of the field K.
    pub fn field_label(&self) -> Result<String, PhiGalError> {
        let s = match (self.kind, self.e) {
            (Kind::Dc, 1) => "Q3".to_string(),
            (Kind::Dc, 2) => "Q3(sqrt3)".to_string(),
            (Kind::Dpc, 4) => "Q3(zeta4,pi4)".to_string(),
            (Kind::Dpc, 12) => format!("K{}", self.extra.first().copied().unwrap_or(0)),
            (Kind::Dpcng, 3) => "Lng-closure".to_string(),
            (Kind::Dpcng, 6) => "Lng-closure(sqrt3)".to_string(),
            (Kind::Dpcg, 3) => "Lg".to_string(),
            (Kind::Dpcg, 6) => "Lg(sqrt3)".to_string(),
            _ => return Err(self.invalid("no such row")),
        };
        Ok(s)
    }

    fn invalid(&self, why: &str) -> PhiGalError {
        PhiGalError::InvalidLabel(format!("{}: {why}", self.family_text()))
    }

    /// Check the label against the admissible parameter sets.
    pub fn validate(&self) -> Result<(), PhiGalError> {
        let needs_param = self.kind != Kind::Dpcg;
        if needs_param && self.param.is_none() {
            return Err(self.invalid("missing filtration parameter"));
        }
        match self.kind {
            Kind::Dc => {
                if ![1, 2].contains(&self.e) {
                    return Err(self.invalid("Dc needs e in {1, 2}"));
                }
                if !SUPERSINGULAR.contains(&self.trace) && !ORDINARY.contains(&self.trace) {
                    return Err(self.invalid("trace must satisfy |a| <= 3"));
                }
                if !self.extra.is_empty() {
                    return Err(self.invalid("unexpected extra parameters"));
                }
            }
            Kind::Dpc => match self.e {
                4 if self.extra.is_empty() => {}
                12 if self.extra.len() == 2
                    && (1..=5).contains(&self.extra[0])
                    && (0..=1).contains(&self.extra[1]) => {}
                _ => return Err(self.invalid("Dpc needs e = 4, or e = 12 with i in 1..5 and epsilon in {0, 1}")),
            },
            Kind::Dpcng => {
                if ![3, 6].contains(&self.e) || !self.extra.is_empty() {
                    return Err(self.invalid("Dpcng needs e in {3, 6}"));
                }
            }
            Kind::Dpcg => {
                if ![3, 6].contains(&self.e) {
                    return Err(self.invalid("Dpcg needs e in {3, 6}"));
                }
                let mu = match self.extra.as_slice() {
                    [mu] => *mu,
                    _ => return Err(self.invalid("Dpcg needs exactly one mu")),
                };
                if !abelian_mus(self.trace).contains(&mu) {
                    return Err(self.invalid("(a, mu) outside the root table"));
                }
            }
        }
        if self.kind != Kind::Dc && self.kind != Kind::Dpcg && self.trace != 0 {
            return Err(self.invalid("trace must be 0"));
        }
        Ok(())
    }

    /// Label of the unfiltered family, e.g. `Dpc(12;0;3;1)`.
    pub fn family_text(&self) -> String {
        let k = self.kind.name();
        match self.kind {
            Kind::Dpcg => format!("{k}({};{},{})", self.e, self.trace, self.extra.first().copied().unwrap_or(0)),
            _ => {
                let mut parts = vec![self.e.to_string(), self.trace.to_string()];
                parts.extend(self.extra.iter().map(|x| x.to_string()));
                format!("{k}({})", parts.join(";"))
            }
        }
    }

    pub fn family(&self) -> ClassLabel {
        ClassLabel { param: None, ..self.clone() }
    }

    pub fn with_param(&self, param: ProjParam) -> ClassLabel {
        ClassLabel { param: Some(param), ..self.clone() }
    }

    pub fn same_class(&self, other: &ClassLabel) -> bool {
        self.kind == other.kind
            && self.e == other.e
            && self.trace == other.trace
            && self.extra == other.extra
            && match (&self.param, &other.param) {
                (None, None) => true,
                (Some(a), Some(b)) => a.equals(b),
                _ => false,
            }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = self.family_text();
        match &self.param {
            None => write!(f, "{fam}"),
            Some(p) => write!(f, "{};{p})", &fam[..fam.len() - 1]),
        }
    }
}

impl FromStr for ClassLabel {
    type Err = PhiGalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PhiGalError::InvalidLabel(s.to_string());
        let s = s.trim();
        let open = s.find('(').ok_or_else(err)?;
        let body = s[open + 1..].strip_suffix(')').ok_or_else(err)?;
        let kind = match &s[..open] {
            "Dc" => Kind::Dc,
            "Dpc" => Kind::Dpc,
            "Dpcg" => Kind::Dpcg,
            "Dpcng" => Kind::Dpcng,
            _ => return Err(err()),
        };
        let parts: Vec<&str> = body.split(';').map(str::trim).collect();
        let int = |t: &str| t.parse::<i64>().map_err(|_| err());
        let e: u32 = parts.first().ok_or_else(err)?.parse().map_err(|_| err())?;
        let label = match kind {
            Kind::Dpcg => {
                let (a, mu) = parts.get(1).ok_or_else(err)?.split_once(',').ok_or_else(err)?;
                if parts.len() > 3 || (parts.len() == 3 && parts[2] != "pi") {
                    return Err(err());
                }
                ClassLabel::dpcg(e, int(a.trim())?, int(mu.trim())?)
            }
            _ => {
                let (head, last) = parts.split_at(parts.len() - 1);
                let param = ProjParam::parse_text(last[0]);
                let (nums, param) = match param {
                    Some(p) if head.len() >= 2 => (head, Some(p)),
                    _ => (&parts[..], None),
                };
                let trace = int(nums.get(1).ok_or_else(err)?)?;
                let extra = nums[2..].iter().map(|t| int(t)).collect::<Result<Vec<_>, _>>()?;
                ClassLabel { kind, e, trace, extra, param }
            }
        };
        Ok(label)
    }
}

fn ordinary_unit(a: i64) -> Result<PadicNumber, PhiGalError> {
    let poly = [PadicNumber::from_i64(3), PadicNumber::from_i64(a), PadicNumber::one()];
    let seed = PadicNumber::from_i64((-a).rem_euclid(3));
    hensel_root(&poly, &seed, &PrecisionPolicy::default())
        .map_err(|e| PhiGalError::InvalidLabel(format!("no unit root for trace {a}: {e}")))
}

fn ints(rows: [[i64; 2]; 2], twist: u32, f: u32) -> K0Matrix {
    K0Matrix::from_ints(rows, twist, f)
}

fn minus_id(f: u32) -> K0Matrix {
    K0Matrix::scalar(K0Elem::int(-1), f)
}

/// Order-3 inertia matrix of the non-abelian and degree 12 rows:
/// `((-1/2, b/2), (c/2, -1/2))`.
fn tau3_half(b: K0Elem, c: K0Elem) -> K0Matrix {
    let h = Scalar::ratio(1, 2);
    K0Matrix::new(
        [
            [K0Elem::ratio(-1, 2), b.scale(&h)],
            [c.scale(&h), K0Elem::ratio(-1, 2)],
        ],
        0,
        2,
    )
}

fn build_base(family: &ClassLabel) -> Result<PhiGalModule, PhiGalError> {
    let field = family.field_label()?;
    let zeta = K0Elem::zeta4();
    let id2 = || K0Matrix::new([[K0Elem::one(), K0Elem::zero()], [K0Elem::zero(), K0Elem::one()]], 1, 2);
    let swap = ints([[0, -3], [1, 0]], 1, 2);
    let a = family.trace;
    let (phi, galois): (K0Matrix, Vec<(String, K0Matrix)>) = match (family.kind, family.e) {
        (Kind::Dc, e) => {
            let phi = if SUPERSINGULAR.contains(&a) {
                ints([[0, -3], [1, -a]], 0, 1)
            } else {
                let u = ordinary_unit(a)?;
                let u3 = PadicNumber::from_i64(3).div(&u).expect("unit");
                K0Matrix::diag(
                    K0Elem::real(Scalar::Approx(u)),
                    K0Elem::real(Scalar::Approx(u3)),
                    0,
                    1,
                )
            };
            let gal = if e == 2 { vec![("t2".to_string(), minus_id(1))] } else { vec![] };
            (phi, gal)
        }
        (Kind::Dpc, 4) => (
            swap,
            vec![
                ("t4".into(), K0Matrix::diag(zeta.clone(), zeta.neg(), 0, 2)),
                ("w".into(), id2()),
            ],
        ),
        (Kind::Dpc, 12) => {
            let s = if family.extra[1] == 0 { 1 } else { -1 };
            (
                swap,
                vec![
                    ("t3".into(), tau3_half(K0Elem::int(-3 * s), K0Elem::int(s))),
                    ("t4".into(), K0Matrix::diag(zeta.clone(), zeta.neg(), 0, 2)),
                    ("w".into(), id2()),
                ],
            )
        }
        (Kind::Dpcng, e) => {
            let mut gal = vec![
                ("t3".to_string(), tau3_half(zeta.scale(&Scalar::int(3)), zeta.clone())),
                ("w".to_string(), id2()),
            ];
            if e == 6 {
                gal.push(("t2".into(), minus_id(2)));
            }
            (swap, gal)
        }
        (Kind::Dpcg, e) => {
            let mu = family.extra[0];
            let phi = match (a, mu) {
                (-3, 1) => [[1, 1], [-1, 2]],
                (-3, 2) => [[2, -1], [1, 1]],
                (0, 1) => [[1, -2], [2, -1]],
                (0, -1) => [[-1, 2], [-2, 1]],
                (3, -1) => [[-1, -1], [1, -2]],
                (3, -2) => [[-2, 1], [-1, -1]],
                _ => return Err(family.invalid("(a, mu) outside the root table")),
            };
            let mut gal = vec![("t3".to_string(), ints([[0, -1], [1, -1]], 0, 1))];
            if e == 6 {
                gal.push(("t2".into(), minus_id(1)));
            }
            (ints(phi, 0, 1), gal)
        }
        _ => return Err(family.invalid("no such row")),
    };
    PhiGalModule::new(&field, phi, galois)
}

/// The unfiltered canonical module of a family, built once per process.
pub fn canonical_base(label: &ClassLabel) -> Result<Arc<PhiGalModule>, PhiGalError> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<PhiGalModule>>>> = OnceLock::new();
    let family = label.family();
    match family.kind {
        Kind::Dpcg => family.validate()?,
        _ => family.with_param(ProjParam::int(0)).validate()?,
    }
    let key = family.family_text();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().expect("cache lock").get(&key) {
        return Ok(Arc::clone(m));
    }
    let built = Arc::new(build_base(&family)?);
    let mut guard = cache.lock().expect("cache lock");
    Ok(Arc::clone(guard.entry(key).or_insert(built)))
}

/// The canonical filtered module named by `label`.
pub fn canonical_module(label: &ClassLabel) -> Result<FilteredModule, PhiGalError> {
    label.validate()?;
    let base = canonical_base(label)?;
    let param = label.param.clone().unwrap_or(ProjParam::int(0));
    FilteredModule::from_point(base, &param)
}

/// The sets of admissible filtration slopes in the wild rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MembershipSet {
    M3na,
    M6na,
    M3a,
    M6a,
    M12 { i: u32, eps: u32 },
}

impl MembershipSet {
    pub fn field_label(self) -> String {
        match self {
            MembershipSet::M3na => "Lng-closure".into(),
            MembershipSet::M6na => "Lng-closure(sqrt3)".into(),
            MembershipSet::M3a => "Lg".into(),
            MembershipSet::M6a => "Lg(sqrt3)".into(),
            MembershipSet::M12 { i, .. } => format!("K{i}"),
        }
    }
}

impl FromStr for MembershipSet {
    type Err = PhiGalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PhiGalError::InvalidLabel(format!("unknown set {s}"));
        Ok(match s {
            "M3na" => MembershipSet::M3na,
            "M6na" => MembershipSet::M6na,
            "M3a" => MembershipSet::M3a,
            "M6a" => MembershipSet::M6a,
            _ => {
                let body = s.strip_prefix("M12(").and_then(|r| r.strip_suffix(')')).ok_or_else(err)?;
                let (i, eps) = body.split_once(',').ok_or_else(err)?;
                let i: u32 = i.trim().parse().map_err(|_| err())?;
                let eps: u32 = eps.trim().parse().map_err(|_| err())?;
                if !(1..=5).contains(&i) || eps > 1 {
                    return Err(err());
                }
                MembershipSet::M12 { i, eps }
            }
        })
    }
}

fn close(a: &FieldElement, b: &FieldElement) -> bool {
    let reference = a.valuation().min(b.valuation());
    negligible(&a.sub(b), reference, PrecisionPolicy::default().min_acceptable)
}

/// Does `alpha` satisfy the Galois relations defining the set?
///
/// Field-of-definition constraints are checked as invariance under the
/// relevant generators (`w`, and `t2` in the sextic rows).
pub fn membership_check(set: MembershipSet, alpha: &FieldElement) -> Result<bool, PhiGalError> {
    let label = set.field_label();
    let entry = catalog().get(&label)?;
    if alpha.field().label() != label {
        return Err(PhiGalError::WrongField {
            expected: label,
            found: alpha.field().label().to_string(),
        });
    }
    let group = entry.group()?;
    let field = alpha.field();
    let apply = |g: &str| -> Result<FieldElement, PhiGalError> {
        let a = group
            .generator_automorphism(g)
            .ok_or_else(|| PhiGalError::InvalidLabel(format!("{label} has no generator {g}")))?;
        Ok(a.apply(alpha)?)
    };
    let int = |n: i64| field.int(n);
    let mobius = |num: FieldElement, den: FieldElement| -> Option<FieldElement> { num.div(&den).ok() };
    let (t3_target, fixers): (Option<FieldElement>, Vec<&str>) = match set {
        MembershipSet::M3na | MembershipSet::M6na => {
            let zeta = field.zeta4();
            let num = zeta.mul(&int(3)).add(alpha);
            let den = int(1).add(&zeta.mul(alpha));
            let fix = if set == MembershipSet::M6na { vec!["w", "t2"] } else { vec!["w"] };
            (mobius(num, den), fix)
        }
        MembershipSet::M3a | MembershipSet::M6a => {
            let fix = if set == MembershipSet::M6a { vec!["t2"] } else { vec![] };
            (mobius(alpha.sub(&int(1)), alpha.clone()), fix)
        }
        MembershipSet::M12 { eps, .. } => {
            let s = if eps == 0 { 1 } else { -1 };
            if !close(&apply("t4")?, &alpha.neg()) {
                return Ok(false);
            }
            let num = alpha.add(&int(-3 * s));
            let den = int(1).add(&alpha.scale(&Qp2::from_i64(s)));
            (mobius(num, den), vec!["w"])
        }
    };
    let Some(target) = t3_target else { return Ok(false) };
    if !close(&apply("t3")?, &target) {
        return Ok(false);
    }
    for g in fixers {
        if !close(&apply(g)?, alpha) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_text_round_trip() {
        for s in [
            "Dc(1;-3;0)",
            "Dc(2;1;inf)",
            "Dpc(4;0;5/2)",
            "Dpcg(3;-3,1)",
            "Dpcng(6;0;-7)",
            "Dpc(12;0;3;1;1/2)",
        ] {
            let l: ClassLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
            l.validate().unwrap();
        }
        let l: ClassLabel = "Dpcg(6;3,-2;pi)".parse().unwrap();
        assert_eq!(l.to_string(), "Dpcg(6;3,-2)");
    }

    #[test]
    fn invalid_labels_rejected() {
        for s in ["Dpcg(3;0,2)", "Dpcg(3;1,1)", "Dc(4;0;0)", "Dc(1;4;0)", "Dpc(12;0;6;0;1)", "Dpcng(3;3;0)"] {
            let l: Result<ClassLabel, _> = s.parse();
            assert!(l.map_or(true, |l| canonical_module(&l).is_err()), "{s}");
        }
        assert!("Dx(1;0;0)".parse::<ClassLabel>().is_err());
    }
}
