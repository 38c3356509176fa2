use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use phigal_core::ec_char3::{automorphism_group, verify_table2, BaseField, EcError, Verdict};
use phigal_core::local_fields::catalog;
use phigal_core::phigal::{
    check_conditions_window, classify, is_admissible, verify_table, ModuleFile, PhiGalError,
};

use crate::config::CliConfig;
use crate::equation::parse_curve;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;

/// What a subcommand produced: exit status, structured report, and its
/// human rendering. `error` goes to stderr.
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub human: String,
    pub error: Option<String>,
}

fn invalid(schema: &str, context: Value, msg: String) -> Outcome {
    let mut report = json!({ "schema": schema, "status": "invalid", "error": msg });
    if let (Value::Object(r), Value::Object(c)) = (&mut report, context) {
        r.extend(c);
    }
    Outcome { code: EXIT_FAILURE, report, human: String::new(), error: Some(msg) }
}

/// Errors that mean "the module is well formed but outside the classification".
fn is_rejection(e: &PhiGalError) -> bool {
    matches!(
        e,
        PhiGalError::Unclassifiable(_) | PhiGalError::DescentFailure(_) | PhiGalError::InfiniteStableFamily
    )
}

const CLASSIFY_SCHEMA: &str = "phigal-classify-report/1";

pub fn classify_file(path: &Path, cfg: &CliConfig) -> Outcome {
    let ctx = json!({ "file": path.display().to_string() });
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return invalid(CLASSIFY_SCHEMA, ctx, format!("{}: {e}", path.display())),
    };
    let module = match ModuleFile::parse(&text).and_then(|f| f.to_module()) {
        Ok(m) => m,
        Err(e) => return invalid(CLASSIFY_SCHEMA, ctx, format!("{}: {e}", path.display())),
    };
    let reject = |e: PhiGalError, conditions: Value, adm: Value| {
        let code = if is_rejection(&e) { EXIT_REJECTED } else { EXIT_FAILURE };
        let status = if code == EXIT_REJECTED { "unclassifiable" } else { "invalid" };
        Outcome {
            code,
            report: json!({
                "schema": CLASSIFY_SCHEMA,
                "file": path.display().to_string(),
                "status": status,
                "error": e.to_string(),
                "conditions": conditions,
                "admissibility": adm,
            }),
            human: String::new(),
            error: Some(e.to_string()),
        }
    };
    let conditions = match check_conditions_window(&module, cfg.weil_window) {
        Ok(c) => c,
        Err(e) => return reject(e, Value::Null, Value::Null),
    };
    let cond_json = serde_json::to_value(&conditions).expect("report serializes");
    let adm = match is_admissible(&module) {
        Ok(a) => a,
        Err(e) => return reject(e, cond_json, Value::Null),
    };
    let adm_json = serde_json::to_value(&adm).expect("report serializes");

    let mut human = String::new();
    let _ = writeln!(human, "field: {}", module.base.field_label());
    let _ = writeln!(
        human,
        "conditions: (1) {} (2) {} (3) {} (4) {}",
        mark(conditions.cond1),
        mark(conditions.cond2),
        mark(conditions.cond3),
        mark(conditions.cond4)
    );
    if let Some(a) = conditions.trace {
        let _ = writeln!(human, "trace of phi on D0: {}", -a);
    }
    for w in &conditions.weil_failures {
        let _ = writeln!(human, "  weil: {w}");
    }
    let _ = writeln!(human, "det phi = {}", conditions.det_phi);
    for (g, d) in &conditions.generator_dets {
        let _ = writeln!(human, "det {g} = {d}");
    }
    let _ = writeln!(
        human,
        "admissible: {} (t_N = {}, t_H = {})",
        if adm.admissible { "yes" } else { "no" },
        adm.t_n,
        adm.t_h
    );

    if !conditions.all_pass() || !adm.admissible {
        let what = if !conditions.all_pass() { "conditions fail" } else { "not admissible" };
        let _ = writeln!(human, "unclassifiable: {what}");
        return Outcome {
            code: EXIT_REJECTED,
            report: json!({
                "schema": CLASSIFY_SCHEMA,
                "file": path.display().to_string(),
                "status": "unclassifiable",
                "error": what,
                "conditions": cond_json,
                "admissibility": adm_json,
            }),
            human,
            error: None,
        };
    }
    match classify(&module) {
        Ok(label) => {
            let _ = writeln!(human, "class: {label}");
            Outcome {
                code: EXIT_OK,
                report: json!({
                    "schema": CLASSIFY_SCHEMA,
                    "file": path.display().to_string(),
                    "status": "classified",
                    "label": label.to_string(),
                    "conditions": cond_json,
                    "admissibility": adm_json,
                }),
                human,
                error: None,
            }
        }
        Err(e) => reject(e, cond_json, adm_json),
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

const VERIFY_SCHEMA: &str = "phigal-verify-report/1";

pub fn verify(cfg: &CliConfig) -> Outcome {
    let start = Instant::now();
    let t1 = verify_table(&cfg.table());
    let t2_start = Instant::now();
    let t2 = verify_table2();
    let t2_ms = t2_start.elapsed().as_millis();

    let mut human = String::new();
    let _ = writeln!(
        human,
        "classification table (samples {}, weil window {}, seed {})",
        t1.sample_budget, t1.weil_window, t1.seed
    );
    for r in &t1.rows {
        let count = match r.expected_classes {
            Some(n) => format!("{}/{n} classes", r.computed_classes),
            None => format!("{}/{} params", r.computed_classes, t1.sample_budget),
        };
        let _ = writeln!(
            human,
            "{} {:<26} {:<20} {:<15} {:>6} ms",
            if r.pass { "PASS" } else { "FAIL" },
            r.row,
            r.field_label,
            count,
            r.elapsed_ms
        );
        for f in &r.failures {
            let _ = writeln!(human, "       {f}");
        }
        for (from, to) in &r.twist_orbits {
            let _ = writeln!(human, "       twist {from} -> {to}");
        }
    }
    let _ = writeln!(human, "curve pairs ({t2_ms} ms)");
    let (t2_json, t2_pass) = match &t2 {
        Ok(rep) => {
            for r in &rep.rows {
                let ok = r.verdict.is_valid_minimal() && r.trace == r.expected_trace;
                let _ = writeln!(
                    human,
                    "{} {:<20} {:<32} trace {:>2}  {}",
                    if ok { "PASS" } else { "FAIL" },
                    r.field_label,
                    r.curve,
                    r.trace,
                    r.verdict
                );
            }
            for r in &rep.excluded {
                let ok = matches!(r.verdict, Verdict::Invalid(_));
                let _ = writeln!(
                    human,
                    "{} {:<20} {:<32} trace {:>2}  {} [no pair expected]",
                    if ok { "PASS" } else { "FAIL" },
                    r.field_label,
                    r.curve,
                    r.trace,
                    r.verdict
                );
            }
            for (curve, tried, found) in &rep.excluded_search {
                let _ = writeln!(human, "       {curve}: {found} valid of {tried} candidates");
            }
            (serde_json::to_value(rep).expect("report serializes"), rep.pass)
        }
        Err(e) => {
            let _ = writeln!(human, "FAIL curve pairs: {e}");
            (json!({ "error": e.to_string() }), false)
        }
    };
    let pass = t1.pass && t2_pass;
    let elapsed = start.elapsed().as_millis();
    let _ = writeln!(human, "{} in {elapsed} ms", if pass { "all rows pass" } else { "FAILURES" });
    let failing: Vec<&str> = t1.rows.iter().filter(|r| !r.pass).map(|r| r.row.as_str()).collect();
    Outcome {
        code: if pass { EXIT_OK } else { EXIT_FAILURE },
        report: json!({
            "schema": VERIFY_SCHEMA,
            "config": cfg,
            "table1": t1,
            "table2": t2_json,
            "failing_rows": failing,
            "pass": pass,
            "elapsed_ms": elapsed,
        }),
        human,
        error: (!pass).then(|| "verification failed".to_string()),
    }
}

const EC_SCHEMA: &str = "phigal-ec-info/1";

pub fn ec_info(field: BaseField, text: &str) -> Outcome {
    let curve = match parse_curve(field, text) {
        Ok(c) => c,
        Err(e) => {
            let code = match e {
                EcError::Singular(_) => EXIT_REJECTED,
                _ => EXIT_FAILURE,
            };
            let status = if code == EXIT_REJECTED { "singular" } else { "invalid" };
            return Outcome {
                code,
                report: json!({ "schema": EC_SCHEMA, "input": text, "field": field.to_string(),
                                "status": status, "error": e.to_string() }),
                human: String::new(),
                error: Some(e.to_string()),
            };
        }
    };
    let points = curve.point_count();
    let trace = curve.frobenius_trace();
    let kind = if curve.is_supersingular() { "supersingular" } else { "ordinary" };
    let aut = automorphism_group(&curve);
    let sylow3 = aut.unique_sylow3().map(|s| s.len());
    let mut human = String::new();
    let _ = writeln!(human, "curve: {curve}");
    let _ = writeln!(human, "points: {points}");
    let _ = writeln!(human, "trace: {trace} ({kind})");
    let _ = writeln!(human, "j: {}", curve.j_invariant());
    let _ = writeln!(human, "Aut over {field}: order {}, {}", aut.order(), aut.shape);
    if let Some(n) = sylow3.filter(|&n| n > 1) {
        let _ = writeln!(human, "normal 3-Sylow of order {n}");
    }
    Outcome {
        code: EXIT_OK,
        report: json!({
            "schema": EC_SCHEMA,
            "input": text,
            "status": "ok",
            "curve": curve.to_string(),
            "field": field.to_string(),
            "points": points,
            "trace": trace,
            "reduction": kind,
            "j_invariant": curve.j_invariant().to_string(),
            "aut_order": aut.order(),
            "aut_shape": aut.shape.to_string(),
            "normal_sylow3_order": sylow3,
        }),
        human,
        error: None,
    }
}

const FIELDS_SCHEMA: &str = "phigal-fields/1";

fn poly_text(c: &[i64]) -> String {
    let mut s = String::new();
    for (k, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let sign = if a < 0 { "-" } else { "+" };
        if s.is_empty() {
            if a < 0 {
                s.push('-');
            }
        } else {
            let _ = write!(s, " {sign} ");
        }
        let m = a.abs();
        match (k, m) {
            (0, _) => {
                let _ = write!(s, "{m}");
            }
            (_, 1) => {}
            _ => {
                let _ = write!(s, "{m}");
            }
        }
        match k {
            0 => {}
            1 => s.push('X'),
            _ => {
                let _ = write!(s, "X^{k}");
            }
        }
    }
    s
}

pub fn fields_list(e: Option<u32>) -> Outcome {
    let entries: Vec<_> = match e {
        Some(e) => match catalog().fields_with_index(e) {
            Ok(v) => v,
            Err(err) => {
                return Outcome {
                    code: EXIT_FAILURE,
                    report: json!({ "schema": FIELDS_SCHEMA, "status": "invalid", "error": err.to_string() }),
                    human: String::new(),
                    error: Some(err.to_string()),
                }
            }
        },
        None => catalog().entries().iter().collect(),
    };
    let mut human = String::new();
    let mut rows = Vec::new();
    let mut code = EXIT_OK;
    for en in entries {
        let group = en.presentation.as_ref().map(|_| en.group());
        let (order, residual, gerr) = match &group {
            None => (None, None, None),
            Some(Ok(g)) => (Some(g.order()), g.min_residual().map(|r| r.to_string()), None),
            Some(Err(err)) => {
                code = EXIT_FAILURE;
                (None, None, Some(err.to_string()))
            }
        };
        let kind = en.row.as_ref().map(|r| match r.class {
            Some(c) => format!("{} class {c}", r.kind),
            None => r.kind.clone(),
        });
        let _ = writeln!(
            human,
            "{:<20} e={:<2} f={} {:<50} {}{}",
            en.label,
            en.e,
            en.f,
            poly_text(&en.polynomial),
            match (order, &gerr) {
                (Some(n), _) => format!("|G| = {n}, residual {}", residual.clone().unwrap_or("exact".into())),
                (None, Some(err)) => format!("group error: {err}"),
                (None, None) => "not Galois".into(),
            },
            kind.as_ref().map(|k| format!("  [{k}]")).unwrap_or_default()
        );
        rows.push(json!({
            "label": en.label,
            "e": en.e,
            "f": en.f,
            "polynomial": poly_text(&en.polynomial),
            "kind": kind,
            "group_order": order,
            "group": en.group_shape(),
            "min_residual": residual,
            "error": gerr,
        }));
    }
    Outcome {
        code,
        report: json!({ "schema": FIELDS_SCHEMA, "status": "ok", "fields": rows }),
        human,
        error: None,
    }
}
