use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::conditions::{check_conditions_window, is_admissible, DEFAULT_WEIL_WINDOW};
use super::iso::{classify, classify_unfiltered, intertwiners, isomorphism_within};
use super::label::{canonical_base, canonical_module, ClassLabel};
use super::module::ProjParam;
use super::twist::twist_unramified;

pub const TABLE_SCHEMA: &str = "phigal-table-report/1";

const SUPERSINGULAR: [i64; 3] = [-3, 0, 3];
const ORDINARY: [i64; 4] = [-2, -1, 1, 2];

#[derive(Clone, Debug, Serialize)]
pub struct RowReport {
    pub row: String,
    pub field_label: String,
    /// "finite" or "P1".
    pub kind: &'static str,
    /// Class count the row must produce (finite rows only).
    pub expected_classes: Option<usize>,
    pub computed_classes: usize,
    pub labels: Vec<String>,
    pub conditions_pass: bool,
    pub admissible: bool,
    pub pairwise_non_isomorphic: bool,
    pub classify_round_trip: bool,
    /// Ordinary rows: the filtration at infinity must fail admissibility.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_rejected: Option<bool>,
    /// Abelian wild rows: family reached by the unramified twist of each class.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub twist_orbits: Vec<(String, String)>,
    pub failures: Vec<String>,
    pub pass: bool,
    pub elapsed_ms: u128,
}

/// Knobs for a table run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableConfig {
    /// Parameters sampled per projective row (at least 3).
    pub sample_budget: usize,
    /// Condition (2) is checked for |n| <= weil_window only.
    pub weil_window: i64,
    /// Mixed into every row's sampling seed.
    pub seed: u64,
    /// Sampled parameters are n/d with |n| <= height_bound, 1 <= d <= 12.
    pub height_bound: i64,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig { sample_budget: 25, weil_window: DEFAULT_WEIL_WINDOW, seed: 0, height_bound: 60 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub schema: &'static str,
    pub sample_budget: usize,
    pub weil_window: i64,
    pub seed: u64,
    pub height_bound: i64,
    pub rows: Vec<RowReport>,
    pub pass: bool,
}

struct RowSpec {
    row: String,
    expected: Option<usize>,
    labels: Vec<ClassLabel>,
    boundary: Option<Vec<ClassLabel>>,
    twist_orbits: bool,
}

/// `n` distinct points of P^1(Q3): infinity, 0, then seeded rationals of
/// height at most `height`. Fewer come back if the height leaves too few.
pub(crate) fn sample_params(n: usize, seed: u64, height: i64) -> Vec<ProjParam> {
    let mut out = vec![ProjParam::Infinity, ProjParam::int(0)];
    let mut rng = StdRng::seed_from_u64(seed);
    let height = height.max(1);
    for _ in 0..200 * n {
        if out.len() >= n {
            break;
        }
        let p = ProjParam::ratio(rng.gen_range(-height..=height), rng.gen_range(1..=12));
        if !out.iter().any(|q| q.equals(&p)) {
            out.push(p);
        }
    }
    out.truncate(n);
    out
}

fn specs(cfg: &TableConfig) -> Vec<RowSpec> {
    let budget = cfg.sample_budget;
    let mut rows = Vec::new();
    for e in [1, 2] {
        rows.push(RowSpec {
            row: format!("Dc e={e} supersingular"),
            expected: Some(3),
            labels: SUPERSINGULAR.iter().map(|&a| ClassLabel::dc(e, a, ProjParam::int(0))).collect(),
            boundary: None,
            twist_orbits: false,
        });
        let labels = ORDINARY
            .iter()
            .flat_map(|&a| (0..2).map(move |al| ClassLabel::dc(e, a, ProjParam::int(al))))
            .collect();
        rows.push(RowSpec {
            row: format!("Dc e={e} ordinary"),
            expected: Some(8),
            labels,
            boundary: Some(
                ORDINARY.iter().map(|&a| ClassLabel::dc(e, a, ProjParam::Infinity)).collect(),
            ),
            twist_orbits: false,
        });
    }
    for e in [3, 6] {
        for (a, mus) in [(-3, [1, 2]), (0, [-1, 1]), (3, [-2, -1])] {
            rows.push(RowSpec {
                row: format!("Dpcg e={e} a={a}"),
                expected: Some(2),
                labels: mus.iter().map(|&mu| ClassLabel::dpcg(e, a, mu)).collect(),
                boundary: None,
                twist_orbits: true,
            });
        }
    }
    let p1 = |row: String, make: &dyn Fn(ProjParam) -> ClassLabel, seed: u64| RowSpec {
        row,
        expected: None,
        labels: sample_params(budget, seed ^ cfg.seed, cfg.height_bound)
            .into_iter()
            .map(make)
            .collect(),
        boundary: None,
        twist_orbits: false,
    };
    rows.push(p1("Dpc e=4".into(), &ClassLabel::dpc4, 4));
    rows.push(p1("Dpcng e=3".into(), &|t| ClassLabel::dpcng(3, t), 3));
    rows.push(p1("Dpcng e=6".into(), &|t| ClassLabel::dpcng(6, t), 6));
    for i in 1..=5 {
        for eps in 0..2 {
            rows.push(p1(
                format!("Dpc e=12 i={i} eps={eps}"),
                &move |t| ClassLabel::dpc12(i, eps, t),
                (12 * 100 + i * 10 + eps) as u64,
            ));
        }
    }
    rows
}

fn run_row(spec: &RowSpec, weil_window: i64, budget: usize) -> RowReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    let field_label = spec.labels.first().and_then(|l| l.field_label().ok()).unwrap_or_default();
    let mut modules = Vec::new();
    for l in &spec.labels {
        match canonical_module(l) {
            Ok(m) => modules.push((l.clone(), m)),
            Err(e) => failures.push(format!("{l}: cannot build: {e}")),
        }
    }

    let mut conditions_pass = true;
    let mut admissible = true;
    let mut classify_round_trip = true;
    for (l, m) in &modules {
        match check_conditions_window(m, weil_window) {
            Ok(r) if r.all_pass() => {}
            Ok(r) => {
                conditions_pass = false;
                failures.push(format!(
                    "{l}: conditions {} {} {} {}",
                    r.cond1, r.cond2, r.cond3, r.cond4
                ));
            }
            Err(e) => {
                conditions_pass = false;
                failures.push(format!("{l}: conditions error: {e}"));
            }
        }
        match is_admissible(m) {
            Ok(r) if r.admissible => {}
            Ok(_) => {
                admissible = false;
                failures.push(format!("{l}: not admissible"));
            }
            Err(e) => {
                admissible = false;
                failures.push(format!("{l}: admissibility error: {e}"));
            }
        }
        match classify(m) {
            Ok(c) if c.same_class(l) => {}
            Ok(c) => {
                classify_round_trip = false;
                failures.push(format!("{l}: classified as {c}"));
            }
            Err(e) => {
                classify_round_trip = false;
                failures.push(format!("{l}: classify error: {e}"));
            }
        }
    }

    // Intertwiner spaces depend only on the pair of families, so compute each once.
    let mut pairwise = true;
    let mut spaces: Vec<(String, String, Vec<_>)> = Vec::new();
    for i in 0..modules.len() {
        for j in i + 1..modules.len() {
            let (li, mi) = &modules[i];
            let (lj, mj) = &modules[j];
            let key = (li.family_text(), lj.family_text());
            let pos = spaces.iter().position(|(a, b, _)| (a, b) == (&key.0, &key.1));
            let pos = match pos {
                Some(p) => p,
                None => match intertwiners(&mi.base, &mj.base) {
                    Ok(s) => {
                        spaces.push((key.0, key.1, s));
                        spaces.len() - 1
                    }
                    Err(e) => {
                        pairwise = false;
                        failures.push(format!("{li} vs {lj}: {e}"));
                        continue;
                    }
                },
            };
            if isomorphism_within(&spaces[pos].2, mi, mj).is_some() {
                pairwise = false;
                failures.push(format!("{li} and {lj} are isomorphic"));
            }
        }
    }

    let boundary_rejected = spec.boundary.as_ref().map(|ls| {
        ls.iter().all(|l| match canonical_module(l).and_then(|m| is_admissible(&m)) {
            Ok(r) if !r.admissible => true,
            Ok(_) => {
                failures.push(format!("{l}: admissible at the boundary"));
                false
            }
            Err(e) => {
                failures.push(format!("{l}: {e}"));
                false
            }
        })
    });

    let mut twist_orbits = Vec::new();
    if spec.twist_orbits {
        for (l, m) in &modules {
            let image = twist_unramified(m)
                .and_then(|t| classify_unfiltered(&t.base))
                .map(|c| c.family_text())
                .unwrap_or_else(|e| format!("error: {e}"));
            twist_orbits.push((l.family_text(), image));
        }
    }

    let computed = modules.len();
    let count_ok = spec.expected.map_or(computed == budget, |n| n == computed);
    if !count_ok {
        failures.push(format!("expected {:?} classes, built {computed}", spec.expected));
    }
    let pass = count_ok
        && conditions_pass
        && admissible
        && pairwise
        && classify_round_trip
        && boundary_rejected.unwrap_or(true);
    RowReport {
        row: spec.row.clone(),
        field_label,
        kind: if spec.expected.is_some() { "finite" } else { "P1" },
        expected_classes: spec.expected,
        computed_classes: computed,
        labels: spec.labels.iter().map(|l| l.to_string()).collect(),
        conditions_pass,
        admissible,
        pairwise_non_isomorphic: pairwise,
        classify_round_trip,
        boundary_rejected,
        twist_orbits,
        failures,
        pass,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// Rebuild every row of the classification table and check it.
///
/// Finite rows are built in full; each projective row is sampled at
/// `sample_budget` distinct parameters (at least 3). Rows run in parallel.
pub fn verify_table1(sample_budget: usize) -> TableReport {
    verify_table(&TableConfig { sample_budget, ..TableConfig::default() })
}

pub fn verify_table(cfg: &TableConfig) -> TableReport {
    verify_rows(cfg, |_| true)
}

/// As [`verify_table`], restricted to rows whose name passes `keep`.
pub fn verify_rows(cfg: &TableConfig, keep: impl Fn(&str) -> bool) -> TableReport {
    let cfg = TableConfig { sample_budget: cfg.sample_budget.max(3), ..*cfg };
    // Warm the canonical-module cache serially so worker threads share it.
    let specs: Vec<RowSpec> = specs(&cfg).into_iter().filter(|s| keep(&s.row)).collect();
    for s in &specs {
        if let Some(l) = s.labels.first() {
            let _ = canonical_base(l);
        }
    }
    let rows: Vec<RowReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|s| scope.spawn(move || run_row(s, cfg.weil_window, cfg.sample_budget)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("row worker")).collect()
    });
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    TableReport {
        schema: TABLE_SCHEMA,
        sample_budget: cfg.sample_budget,
        weil_window: cfg.weil_window,
        seed: cfg.seed,
        height_bound: cfg.height_bound,
        rows,
        pass,
    }
}
