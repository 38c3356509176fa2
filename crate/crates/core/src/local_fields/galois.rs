use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use super::roots::{find_roots_in_field, int_poly};
use super::{FieldElement, LocalFieldError, TowerField};
use num_rational::Ratio;

use crate::padic::{PrecisionPolicy, Valuation};

/// A field automorphism: `pi -> image_of_pi`, `zeta4 -> (-1)^m zeta4`.
#[derive(Clone, Debug)]
pub struct Automorphism {
    image_of_pi: FieldElement,
    unramified_exponent: u32,
    order: u32,
}

impl Automorphism {
    pub fn image_of_pi(&self) -> &FieldElement {
        &self.image_of_pi
    }

    pub fn unramified_exponent(&self) -> u32 {
        self.unramified_exponent
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn field(&self) -> &Arc<TowerField> {
        self.image_of_pi.field()
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement, LocalFieldError> {
        if !x.same_field(&self.image_of_pi) {
            return Err(LocalFieldError::FieldMismatch);
        }
        let field = self.field();
        let m = self.unramified_exponent;
        let mut acc = field.zero();
        for c in x.coords().iter().rev() {
            acc = acc
                .mul(&self.image_of_pi)
                .add(&FieldElement::from_qp2(field, c.sigma_pow(m)));
        }
        Ok(acc)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Automorphism, LocalFieldError> {
        let f = self.field().unramified_degree();
        Ok(Automorphism {
            image_of_pi: self.apply(&other.image_of_pi)?,
            unramified_exponent: (self.unramified_exponent + other.unramified_exponent) % f,
            order: 0,
        })
    }
}

/// How a generator is pinned down beyond its order and unramified exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pin {
    /// `g(pi) = pi`.
    FixesPi,
    /// `g(pi) = zeta4 * pi`.
    ScalesPiByZeta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub order: u32,
    pub unramified_exponent: u32,
    pub pin: Option<Pin>,
}

/// A word `g1^k1 g2^k2 ...`, read as a composition of maps (rightmost acts first).
pub type Word = Vec<(String, i32)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

pub fn format_word(w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .map(|(g, k)| if *k == 1 { g.clone() } else { format!("{g}^{k}") })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", format_word(&self.lhs), format_word(&self.rhs))
    }
}

pub fn parse_word(s: &str) -> Result<Word, String> {
    let s = s.trim();
    if s == "1" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split_whitespace()
        .map(|tok| match tok.split_once('^') {
            Some((g, k)) => k
                .parse::<i32>()
                .map(|k| (g.to_string(), k))
                .map_err(|_| format!("bad exponent in {tok}")),
            None => Ok((tok.to_string(), 1)),
        })
        .collect()
}

pub fn parse_relation(s: &str) -> Result<Relation, String> {
    let (l, r) = s.split_once('=').ok_or_else(|| format!("relation without '=': {s}"))?;
    Ok(Relation {
        lhs: parse_word(l)?,
        rhs: parse_word(r)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<GeneratorSpec>,
    pub relations: Vec<Relation>,
}

/// Measured agreement of a relation (or generator order) at working precision:
/// `residual` is a lower bound for `v(lhs(pi) - rhs(pi))`.
#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub relation: String,
    pub residual: Ratio<i64>,
}

#[derive(Clone, Debug)]
pub struct GroupElement {
    pub word: String,
    pub automorphism: Automorphism,
}

#[derive(Clone, Debug)]
pub struct GaloisGroup {
    field: Arc<TowerField>,
    generator_names: Vec<String>,
    generator_index: Vec<usize>,
    relations: Vec<Relation>,
    elements: Vec<GroupElement>,
    table: Vec<Vec<usize>>,
    checks: Vec<RelationCheck>,
}

fn identify(
    img: &FieldElement,
    m: u32,
    autos: &[Automorphism],
) -> Result<usize, LocalFieldError> {
    let mut best: Option<(usize, Valuation)> = None;
    for (i, a) in autos.iter().enumerate() {
        if a.unramified_exponent != m {
            continue;
        }
        let v = img.sub(&a.image_of_pi).valuation();
        if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
            best = Some((i, v));
        }
    }
    let (i, v) = best.ok_or(LocalFieldError::NotGalois {
        found: 0,
        expected: autos.len(),
    })?;
    let separation = Valuation::int(5);
    if v < separation {
        return Err(LocalFieldError::PrecisionExhausted(format!(
            "composite automorphism matches no root (best agreement {v})"
        )));
    }
    Ok(i)
}

fn word_index(
    word: &Word,
    assign: &HashMap<&str, usize>,
    table: &[Vec<usize>],
    inverse: &[usize],
    identity: usize,
) -> Option<usize> {
    let mut acc = identity;
    for (g, k) in word {
        let gi = *assign.get(g.as_str())?;
        let base = if *k < 0 { inverse[gi] } else { gi };
        for _ in 0..k.unsigned_abs() {
            acc = table[acc][base];
        }
    }
    Some(acc)
}

impl GaloisGroup {
    /// Realize `presentation` by automorphisms of `field`.
    ///
    /// Generators are assigned in order; each takes the first automorphism (in
    /// the order unramified exponent, then canonical root order) that has the
    /// right order, exponent and pin and satisfies every relation among the
    /// generators assigned so far.
    pub fn build(
        field: &Arc<TowerField>,
        presentation: &Presentation,
        policy: &PrecisionPolicy,
    ) -> Result<GaloisGroup, LocalFieldError> {
        let n = field.degree() as usize;
        let roots = find_roots_in_field(field, &int_poly(field, field.eisenstein()), policy)?;
        if roots.len() != field.ramification_index() as usize {
            return Err(LocalFieldError::NotGalois {
                found: roots.len() * field.unramified_degree() as usize,
                expected: n,
            });
        }
        let mut autos = Vec::with_capacity(n);
        for m in 0..field.unramified_degree() {
            for r in &roots {
                autos.push(Automorphism {
                    image_of_pi: r.clone(),
                    unramified_exponent: m,
                    order: 0,
                });
            }
        }
        let pi = field.pi();
        let identity = autos
            .iter()
            .position(|a| a.unramified_exponent == 0 && a.image_of_pi.agrees_to(&pi, 5))
            .ok_or_else(|| LocalFieldError::PrecisionExhausted("identity not found".into()))?;
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let c = autos[i].compose(&autos[j])?;
                table[i][j] = identify(&c.image_of_pi, c.unramified_exponent, &autos)?;
            }
        }
        let inverse: Vec<usize> = (0..n)
            .map(|i| (0..n).find(|&j| table[i][j] == identity))
            .collect::<Option<_>>()
            .ok_or_else(|| LocalFieldError::PrecisionExhausted("missing inverse".into()))?;
        for i in 0..n {
            let mut k = 1;
            let mut acc = i;
            while acc != identity {
                acc = table[acc][i];
                k += 1;
                if k > n as u32 + 1 {
                    return Err(LocalFieldError::PrecisionExhausted("order overflow".into()));
                }
            }
            autos[i].order = k;
        }

        let zeta_pi = if field.unramified_degree() == 2 {
            Some(field.zeta4().mul(&pi))
        } else {
            None
        };
        let gens = &presentation.generators;
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|g| {
                (0..n)
                    .filter(|&i| {
                        let a = &autos[i];
                        a.order == g.order
                            && a.unramified_exponent == g.unramified_exponent % field.unramified_degree()
                            && match g.pin {
                                None => true,
                                Some(Pin::FixesPi) => a.image_of_pi.agrees_to(&pi, 5),
                                Some(Pin::ScalesPiByZeta) => zeta_pi
                                    .as_ref()
                                    .is_some_and(|z| a.image_of_pi.agrees_to(z, 5)),
                            }
                    })
                    .collect()
            })
            .collect();

        let mut chosen: Vec<usize> = Vec::new();
        let found = Self::assign(
            gens,
            &presentation.relations,
            &candidates,
            &table,
            &inverse,
            identity,
            n,
            &mut chosen,
        );
        if !found {
            return Err(LocalFieldError::RelationViolation(format!(
                "no assignment of generators of {} satisfies the presentation",
                field.label()
            )));
        }

        let mut elements_idx = vec![identity];
        let mut words: HashMap<usize, String> = HashMap::from([(identity, "1".to_string())]);
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for (gi, g) in chosen.iter().zip(gens) {
                let y = table[x][*gi];
                if !words.contains_key(&y) {
                    let w = if words[&x] == "1" {
                        g.name.clone()
                    } else {
                        format!("{} {}", words[&x], g.name)
                    };
                    words.insert(y, w);
                    elements_idx.push(y);
                    queue.push_back(y);
                }
            }
        }
        let elements: Vec<GroupElement> = elements_idx
            .iter()
            .map(|&i| GroupElement {
                word: words[&i].clone(),
                automorphism: autos[i].clone(),
            })
            .collect();
        let pos: HashMap<usize, usize> =
            elements_idx.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let etable: Vec<Vec<usize>> = elements_idx
            .iter()
            .map(|&i| elements_idx.iter().map(|&j| pos[&table[i][j]]).collect())
            .collect();

        let mut group = GaloisGroup {
            field: Arc::clone(field),
            generator_names: gens.iter().map(|g| g.name.clone()).collect(),
            generator_index: chosen.iter().map(|i| pos[i]).collect(),
            relations: presentation.relations.clone(),
            elements,
            table: etable,
            checks: Vec::new(),
        };
        group.checks = group.direct_checks(gens)?;
        Ok(group)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        gens: &[GeneratorSpec],
        relations: &[Relation],
        candidates: &[Vec<usize>],
        table: &[Vec<usize>],
        inverse: &[usize],
        identity: usize,
        n: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        let k = chosen.len();
        if k == gens.len() {
            let mut seen = vec![false; n];
            let mut stack = vec![identity];
            seen[identity] = true;
            let mut count = 1;
            while let Some(x) = stack.pop() {
                for &g in chosen.iter() {
                    let y = table[x][g];
                    if !seen[y] {
                        seen[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
            return count == n;
        }
        for &c in &candidates[k] {
            if chosen.contains(&c) {
                continue;
            }
            chosen.push(c);
            let assign: HashMap<&str, usize> = gens[..=k]
                .iter()
                .zip(chosen.iter())
                .map(|(g, &i)| (g.name.as_str(), i))
                .collect();
            let ok = relations.iter().all(|r| {
                match (
                    word_index(&r.lhs, &assign, table, inverse, identity),
                    word_index(&r.rhs, &assign, table, inverse, identity),
                ) {
                    (Some(a), Some(b)) => a == b,
                    _ => true,
                }
            });
            if ok && Self::assign(gens, relations, candidates, table, inverse, identity, n, chosen)
            {
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn generator(&self, name: &str) -> Option<&Automorphism> {
        let k = self.generator_names.iter().position(|g| g == name)?;
        Some(&self.elements[self.generator_index[k]].automorphism)
    }

    /// Evaluate a word on `x` by applying automorphisms directly (no table lookups).
    pub fn apply_word(&self, word: &Word, x: &FieldElement) -> Result<FieldElement, LocalFieldError> {
        let mut acc = x.clone();
        for (g, k) in word.iter().rev() {
            let a = self
                .generator(g)
                .ok_or_else(|| LocalFieldError::RelationViolation(format!("unknown generator {g}")))?;
            let reps = k.rem_euclid(a.order as i32) as u32;
            for _ in 0..reps {
                acc = a.apply(&acc)?;
            }
        }
        Ok(acc)
    }

    fn word_exponent(&self, word: &Word) -> u32 {
        let f = self.field.unramified_degree() as i64;
        let total: i64 = word
            .iter()
            .map(|(g, k)| {
                self.generator(g)
                    .map_or(0, |a| a.unramified_exponent as i64 * *k as i64)
            })
            .sum();
        total.rem_euclid(f) as u32
    }

    fn direct_checks(&self, gens: &[GeneratorSpec]) -> Result<Vec<RelationCheck>, LocalFieldError> {
        let pi = self.field.pi();
        let mut out = Vec::new();
        for g in gens {
            let a = self.generator(&g.name).expect("assigned");
            let mut x = pi.clone();
            for _ in 0..g.order {
                x = a.apply(&x)?;
            }
            let exp_ok = (a.unramified_exponent * g.order) % self.field.unramified_degree() == 0;
            out.push(RelationCheck {
                relation: format!("{}^{} = 1", g.name, g.order),
                residual: if exp_ok {
                    x.sub(&pi).valuation_bound()
                } else {
                    Ratio::from_integer(0)
                },
            });
        }
        for r in &self.relations {
            let l = self.apply_word(&r.lhs, &pi)?;
            let rr = self.apply_word(&r.rhs, &pi)?;
            let exp_ok = self.word_exponent(&r.lhs) == self.word_exponent(&r.rhs);
            out.push(RelationCheck {
                relation: r.to_string(),
                residual: if exp_ok {
                    l.sub(&rr).valuation_bound()
                } else {
                    Ratio::from_integer(0)
                },
            });
        }
        Ok(out)
    }

    pub fn field(&self) -> &Arc<TowerField> {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    /// Element-table index of the named generator.
    pub fn generator_position(&self, name: &str) -> Option<usize> {
        let k = self.generator_names.iter().position(|g| g == name)?;
        Some(self.generator_index[k])
    }

    pub fn generator_automorphism(&self, name: &str) -> Option<&Automorphism> {
        self.generator(name)
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.table[a][b] == 0)
            .expect("group table has inverses")
    }

    /// Words for every element as generator-index sequences (rightmost acts first).
    pub fn element_words(&self) -> Vec<Vec<usize>> {
        self.elements
            .iter()
            .map(|el| {
                if el.word == "1" {
                    Vec::new()
                } else {
                    el.word
                        .split(' ')
                        .map(|g| self.generator_names.iter().position(|x| x == g).unwrap())
                        .collect()
                }
            })
            .collect()
    }

    /// Elements with unramified exponent 0.
    pub fn inertia(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&i| self.elements[i].automorphism.unramified_exponent == 0)
            .collect()
    }

    pub fn checks(&self) -> &[RelationCheck] {
        &self.checks
    }

    /// Smallest residual among orders and relations; `None` for the trivial group.
    pub fn min_residual(&self) -> Option<Ratio<i64>> {
        self.checks.iter().map(|c| c.residual).min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(name: &str, order: u32, m: u32, pin: Option<Pin>) -> GeneratorSpec {
        GeneratorSpec {
            name: name.into(),
            order,
            unramified_exponent: m,
            pin,
        }
    }

    #[test]
    fn quartic_group_is_dihedral_of_order_8() {
        let k = TowerField::new("Q3(zeta4,pi4)", 2, vec![-3, 0, 0, 0, 1]).unwrap();
        let pres = Presentation {
            generators: vec![
                gen("t4", 4, 0, Some(Pin::ScalesPiByZeta)),
                gen("w", 2, 1, Some(Pin::FixesPi)),
            ],
            relations: vec![
                parse_relation("t4 w = w t4^-1").unwrap(),
            ],
        };
        let g = GaloisGroup::build(&k, &pres, &PrecisionPolicy::default()).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.inertia().len(), 4);
        assert!(g.min_residual().unwrap() >= Ratio::from_integer(20));
        let t4 = g.generator_automorphism("t4").unwrap();
        assert!(t4.apply(&k.pi()).unwrap().agrees_to(&k.zeta4().mul(&k.pi()), 30));
        let w = g.generator_automorphism("w").unwrap();
        assert!(w.apply(&k.zeta4()).unwrap().agrees_to(&k.zeta4().neg(), 30));
    }

    #[test]
    fn sqrt3_generator_negates() {
        let k = TowerField::new("Q3(sqrt3)", 1, vec![-3, 0, 1]).unwrap();
        let pres = Presentation {
            generators: vec![gen("t2", 2, 0, None)],
            relations: vec![],
        };
        let g = GaloisGroup::build(&k, &pres, &PrecisionPolicy::default()).unwrap();
        let t2 = g.generator_automorphism("t2").unwrap();
        assert!(t2.apply(&k.pi()).unwrap().agrees_to(&k.pi().neg(), 30));
    }

    #[test]
    fn word_parsing() {
        let r = parse_relation("t4 t3 t4^-1 = t3^2").unwrap();
        assert_eq!(r.lhs.len(), 3);
        assert_eq!(r.rhs, vec![("t3".to_string(), 2)]);
        assert_eq!(r.to_string(), "t4 t3 t4^-1 = t3^2");
    }
}
