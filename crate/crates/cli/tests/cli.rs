use std::path::Path;
use std::process::{Command, Output};

use phigal_core::local_fields::shipped_catalog_text;
use phigal_core::phigal::{canonical_module, ClassLabel, ModuleFile, ProjParam};
use serde_json::Value;

fn phigal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phigal")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = phigal(&all);
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.code().unwrap(), v)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn module_json(label: ClassLabel) -> String {
    ModuleFile::from_module(&canonical_module(&label).unwrap()).to_json()
}

#[test]
fn classify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "dc.json", &module_json(ClassLabel::dc(1, -3, ProjParam::int(0))));
    let (code, v) = json(&["classify", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["label"], "Dc(1;-3;0)");
    assert_eq!(v["status"], "classified");
    assert_eq!(v["conditions"]["cond3"], true);
    assert_eq!(v["admissibility"]["admissible"], true);

    let k3 = ClassLabel::dpc12(3, 1, ProjParam::ratio(5, 7));
    let f = write(dir.path(), "k3.json", &module_json(k3.clone()));
    let out = phigal(&["classify", &f]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains(&format!("class: {k3}")), "{text}");
}

#[test]
fn classify_condition_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
      "schema": "phigal-module/1",
      "field_label": "Q3(sqrt3)",
      "group_presentation_ref": "Q3(sqrt3)",
      "phi": [["1", "0"], ["0", "3"]],
      "galois": {"t2": [["1", "0"], ["0", "-1"]]},
      "fil": [["1"], ["1"]]
    }"#;
    let f = write(dir.path(), "bad.json", text);
    let (code, v) = json(&["classify", &f]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "unclassifiable");
    assert_eq!(v["conditions"]["cond3"], false);
}

#[test]
fn classify_malformed_entry_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = module_json(ClassLabel::dc(1, 0, ProjParam::int(0))).replacen("\"0\"", "\"1+*i\"", 1);
    let f = write(dir.path(), "bad.json", &text);
    let out = phigal(&["classify", &f]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("1+*i") && err.contains("offset 1"), "{err}");

    let f = write(dir.path(), "trunc.json", "{\"schema\": ");
    assert_eq!(phigal(&["classify", &f]).status.code(), Some(1));
    assert_eq!(phigal(&["classify", "/nonexistent/file.json"]).status.code(), Some(1));
}

#[test]
fn verify_table_json() {
    let (code, v) = json(&["verify-table"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "phigal-verify-report/1");
    assert_eq!(v["pass"], true);
    let rows = v["table1"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 23);
    for r in rows {
        assert_eq!(r["pass"], true, "{}", r["row"]);
        match r["expected_classes"].as_u64() {
            Some(n) => assert_eq!(r["computed_classes"].as_u64(), Some(n)),
            None => {
                assert_eq!(r["computed_classes"], 25);
                assert_eq!(r["pairwise_non_isomorphic"], true);
            }
        }
    }
    assert_eq!(v["table2"]["rows"].as_array().unwrap().len(), 14);
    // The report round-trips through a JSON parser unchanged.
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn verify_table_corrupted_catalog_names_row() {
    let dir = tempfile::tempdir().unwrap();
    // Lg with the non-Galois cubic's polynomial.
    let bad = shipped_catalog_text().replacen("Lg | X^3 - 3X^2 + 3 |", "Lg | X^3 - 3X^2 + 6 |", 1);
    assert_ne!(bad, shipped_catalog_text());
    let f = write(dir.path(), "catalog.txt", &bad);
    let (code, v) = json(&["--catalog", &f, "--samples", "3", "verify-table"]);
    assert_eq!(code, 1);
    assert_eq!(v["pass"], false);
    let failing: Vec<&str> = v["failing_rows"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(failing.contains(&"Dpcg e=3 a=0"), "{failing:?}");
    assert!(!failing.contains(&"Dc e=1 supersingular"));
}

#[test]
fn verify_table_is_deterministic() {
    let run = || {
        let (code, mut v) = json(&["--samples", "4", "--seed", "7", "verify-table"]);
        strip_timing(&mut v);
        (code, v)
    };
    assert_eq!(run(), run());
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.retain(|k, _| !k.ends_with("_ms"));
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn ec_info_examples() {
    let (code, v) = json(&["ec-info", "--field", "f3", "y^2=x^3-x"]);
    assert_eq!(code, 0);
    assert_eq!((v["points"].as_i64(), v["trace"].as_i64()), (Some(4), Some(0)));
    assert_eq!(v["reduction"], "supersingular");

    let (code, v) = json(&["ec-info", "--field", "f9", "y^2=x^3+x"]);
    assert_eq!(code, 0);
    assert_eq!(v["aut_order"], 12);
    assert_eq!(v["normal_sylow3_order"], 3);

    let (_, v) = json(&["ec-info", "y^2 = x^3 + x^2 + 1"]);
    assert_eq!(v["reduction"], "ordinary");
    assert_eq!(v["aut_order"], 2);

    let out = phigal(&["ec-info", "--field", "f3", "y^2=x^3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(phigal(&["ec-info", "y^2=x^3+q"]).status.code(), Some(1));
}

#[test]
fn fields_list() {
    let (code, v) = json(&["fields", "list", "--e", "12"]);
    assert_eq!(code, 0);
    let fields = v["fields"].as_array().unwrap();
    assert_eq!(fields.len(), 10);
    assert!(fields.iter().all(|f| f["group_order"] == 24));
    let out = phigal(&["fields", "list", "--e", "3"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Lg ") && text.contains("Lng-closure "));
    assert_eq!(phigal(&["fields", "list", "--e", "5"]).status.code(), Some(1));
}

#[test]
fn config_bounds() {
    assert_eq!(phigal(&["--samples", "2", "verify-table"]).status.code(), Some(2));
    assert_eq!(phigal(&["--precision", "10", "fields", "list"]).status.code(), Some(2));
}
