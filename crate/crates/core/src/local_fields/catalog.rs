use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use super::galois::{parse_relation, GeneratorSpec, Pin, Presentation};
use super::{GaloisGroup, LocalFieldError, TowerField};
use crate::padic::PrecisionPolicy;

const CATALOG_TEXT: &str = include_str!("catalog.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowInfo {
    pub e: u32,
    pub kind: String,
    /// Good-reduction class for the degree 12 fields.
    pub class: Option<u32>,
}

#[derive(Debug)]
pub struct CatalogEntry {
    pub label: String,
    /// Ascending integer coefficients of the Eisenstein polynomial.
    pub polynomial: Vec<i64>,
    pub e: u32,
    pub f: u32,
    pub presentation: Option<Presentation>,
    pub row: Option<RowInfo>,
    field: OnceLock<Arc<TowerField>>,
    group: OnceLock<Result<Arc<GaloisGroup>, LocalFieldError>>,
}

impl CatalogEntry {
    pub fn field(&self) -> Arc<TowerField> {
        Arc::clone(self.field.get_or_init(|| {
            TowerField::new(&self.label, self.f, self.polynomial.clone())
                .expect("catalog polynomials are validated at load time")
        }))
    }

    /// Galois group at the default precision policy, computed once.
    pub fn group(&self) -> Result<Arc<GaloisGroup>, LocalFieldError> {
        self.group
            .get_or_init(|| self.build_group(&PrecisionPolicy::default()).map(Arc::new))
            .clone()
    }

    pub fn build_group(&self, policy: &PrecisionPolicy) -> Result<GaloisGroup, LocalFieldError> {
        let pres = self.presentation.as_ref().ok_or(LocalFieldError::NotGalois {
            found: 0,
            expected: (self.e * self.f) as usize,
        })?;
        GaloisGroup::build(&self.field(), pres, policy)
    }

    /// Generator data as recorded in the catalog, e.g. `t4(ord 4, m 0), w(ord 2, m 1)`.
    pub fn group_shape(&self) -> String {
        match &self.presentation {
            None => "not Galois".into(),
            Some(p) if p.generators.is_empty() => "trivial".into(),
            Some(p) => {
                let gens: Vec<String> = p
                    .generators
                    .iter()
                    .map(|g| format!("{}(ord {}, m {})", g.name, g.order, g.unramified_exponent))
                    .collect();
                gens.join(", ")
            }
        }
    }

    /// Label of the other degree 12 field in the same good-reduction class.
    pub fn paired_label(&self) -> Option<String> {
        let row = self.row.as_ref()?;
        row.class?;
        let i: u32 = self.label.strip_prefix('K')?.parse().ok()?;
        Some(format!("K{}", if i > 5 { i - 5 } else { i + 5 }))
    }
}

#[derive(Debug)]
pub struct FieldCatalog {
    entries: Vec<CatalogEntry>,
    index: HashMap<String, usize>,
}

pub(crate) fn parse_int_poly(s: &str) -> Result<Vec<i64>, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty polynomial".into());
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
    let mut coeffs: Vec<i64> = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, term.strip_prefix('+').unwrap_or(term)),
        };
        let (coef, deg) = match body.find('X') {
            None => (body.parse::<i64>().map_err(|_| format!("bad term {term}"))?, 0usize),
            Some(pos) => {
                let c = body[..pos].trim_end_matches('*');
                let c = if c.is_empty() {
                    1
                } else {
                    c.parse::<i64>().map_err(|_| format!("bad coefficient in {term}"))?
                };
                let rest = &body[pos + 1..];
                let d = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(|| format!("bad exponent in {term}"))?
                        .parse::<usize>()
                        .map_err(|_| format!("bad exponent in {term}"))?
                };
                (c, d)
            }
        };
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        coeffs[deg] += sign * coef;
    }
    Ok(coeffs)
}

fn parse_generators(s: &str) -> Result<Vec<GeneratorSpec>, String> {
    if s == "1" {
        return Ok(Vec::new());
    }
    s.split_whitespace()
        .map(|tok| {
            let parts: Vec<&str> = tok.split(':').collect();
            if parts.len() < 3 || parts.len() > 4 {
                return Err(format!("bad generator {tok}"));
            }
            let pin = match parts.get(3) {
                None => None,
                Some(&"fix") => Some(Pin::FixesPi),
                Some(&"zeta") => Some(Pin::ScalesPiByZeta),
                Some(p) => return Err(format!("unknown pin {p}")),
            };
            Ok(GeneratorSpec {
                name: parts[0].to_string(),
                order: parts[1].parse().map_err(|_| format!("bad order in {tok}"))?,
                unramified_exponent: parts[2]
                    .parse()
                    .map_err(|_| format!("bad exponent in {tok}"))?,
                pin,
            })
        })
        .collect()
}

fn parse_row(s: &str) -> Result<Option<RowInfo>, String> {
    if s == "-" {
        return Ok(None);
    }
    let mut e = None;
    let mut kind = None;
    let mut class = None;
    for kv in s.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad row field {kv}"))?;
        match k {
            "e" => e = Some(v.parse().map_err(|_| format!("bad e {v}"))?),
            "kind" => kind = Some(v.to_string()),
            "class" => class = Some(v.parse().map_err(|_| format!("bad class {v}"))?),
            _ => return Err(format!("unknown row field {k}")),
        }
    }
    Ok(Some(RowInfo {
        e: e.ok_or("row without e")?,
        kind: kind.ok_or("row without kind")?,
        class,
    }))
}

impl FieldCatalog {
    pub fn parse(text: &str) -> Result<FieldCatalog, LocalFieldError> {
        let mut entries = Vec::new();
        let mut index = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| LocalFieldError::CatalogParse {
                line: lineno + 1,
                message,
            };
            let cols: Vec<&str> = line.split('|').map(str::trim).collect();
            if cols.len() != 6 {
                return Err(err(format!("expected 6 columns, found {}", cols.len())));
            }
            let polynomial = parse_int_poly(cols[1]).map_err(err)?;
            if !super::tower::is_eisenstein(&polynomial) {
                return Err(err(format!("{} is not Eisenstein", cols[1])));
            }
            let f: u32 = cols[2].parse().map_err(|_| err("bad f".into()))?;
            let presentation = if cols[3] == "-" {
                None
            } else {
                let generators = parse_generators(cols[3]).map_err(err)?;
                let relations = if cols[4] == "-" {
                    Vec::new()
                } else {
                    cols[4]
                        .split(';')
                        .map(parse_relation)
                        .collect::<Result<_, _>>()
                        .map_err(err)?
                };
                Some(Presentation {
                    generators,
                    relations,
                })
            };
            let row = parse_row(cols[5]).map_err(err)?;
            let label = cols[0].to_string();
            if index.insert(label.clone(), entries.len()).is_some() {
                return Err(err(format!("duplicate label {label}")));
            }
            entries.push(CatalogEntry {
                label,
                e: (polynomial.len() - 1) as u32,
                polynomial,
                f,
                presentation,
                row,
                field: OnceLock::new(),
                group: OnceLock::new(),
            });
        }
        Ok(FieldCatalog { entries, index })
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, label: &str) -> Result<&CatalogEntry, LocalFieldError> {
        self.index
            .get(label)
            .map(|&i| &self.entries[i])
            .ok_or_else(|| LocalFieldError::UnknownLabel(label.to_string()))
    }

    pub fn build_field(&self, label: &str) -> Result<Arc<TowerField>, LocalFieldError> {
        Ok(self.get(label)?.field())
    }

    /// Classification-relevant fields with ramification index `e`.
    pub fn fields_with_index(&self, e: u32) -> Result<Vec<&CatalogEntry>, LocalFieldError> {
        if ![1, 2, 3, 4, 6, 12].contains(&e) {
            return Err(LocalFieldError::UnsupportedIndex(e));
        }
        Ok(self
            .entries
            .iter()
            .filter(|en| en.row.as_ref().is_some_and(|r| r.e == e))
            .collect())
    }
}

static CATALOG: OnceLock<FieldCatalog> = OnceLock::new();

/// The active catalog: the shipped one unless [`install_catalog`] ran first.
pub fn catalog() -> &'static FieldCatalog {
    CATALOG.get_or_init(|| FieldCatalog::parse(CATALOG_TEXT).expect("shipped catalog parses"))
}

/// Replaces the shipped catalog for the rest of the process. Must run before
/// anything touches [`catalog`]; returns false if a catalog is already active.
pub fn install_catalog(text: &str) -> Result<bool, LocalFieldError> {
    let parsed = FieldCatalog::parse(text)?;
    Ok(CATALOG.set(parsed).is_ok())
}

/// Text of the shipped catalog.
pub fn shipped_catalog_text() -> &'static str {
    CATALOG_TEXT
}

pub fn catalog_fields(e: u32) -> Result<Vec<&'static CatalogEntry>, LocalFieldError> {
    catalog().fields_with_index(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_parser() {
        assert_eq!(parse_int_poly("X^4 - 3").unwrap(), vec![-3, 0, 0, 0, 1]);
        assert_eq!(parse_int_poly("X^3 - 3X^2 + 6").unwrap(), vec![6, 0, -3, 1]);
        assert_eq!(parse_int_poly("X - 3").unwrap(), vec![-3, 1]);
        assert!(parse_int_poly("X^ + 1").is_err());
    }

    #[test]
    fn catalog_loads_and_indices() {
        let c = catalog();
        assert_eq!(c.build_field("K3").unwrap().eisenstein()[0], 3);
        let q = c.build_field("Q3(zeta4,pi4)").unwrap();
        assert_eq!((q.unramified_degree(), q.ramification_index()), (2, 4));
        assert_eq!(catalog_fields(12).unwrap().len(), 10);
        assert_eq!(catalog_fields(4).unwrap().len(), 1);
        assert_eq!(catalog_fields(3).unwrap().len(), 2);
        assert!(catalog_fields(5).is_err());
        assert!(matches!(c.get("K11"), Err(LocalFieldError::UnknownLabel(_))));
        let classes: std::collections::BTreeSet<u32> = catalog_fields(12)
            .unwrap()
            .iter()
            .map(|e| e.row.as_ref().unwrap().class.unwrap())
            .collect();
        assert_eq!(classes.len(), 5);
        assert_eq!(c.get("K2").unwrap().paired_label().as_deref(), Some("K7"));
    }

    #[test]
    fn malformed_catalog_reports_line() {
        let bad = "Q3 | X - 3 | 1 | - | - | e=1 kind=crystalline\nbroken | X^2 - 9 | 1 | - | - | -\n";
        match FieldCatalog::parse(bad) {
            Err(LocalFieldError::CatalogParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
