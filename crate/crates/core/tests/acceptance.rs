//! One line per acceptance criterion: verdict, tolerance, measured time
//! against its budget. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use phigal_core::ec_char3::{automorphism_group, verify_table2, BaseField, CurveF3q, Verdict};
use phigal_core::local_fields::{catalog, find_roots_in_field, int_poly};
use phigal_core::padic::PrecisionPolicy;
use phigal_core::phigal::{
    canonical_module, check_conditions, classify, conjugate, descent_basis, is_admissible,
    is_isomorphic, twist_ramified, twist_unramified, verify_rows, weil_traces, ClassLabel,
    FilteredModule, ProjParam, TableConfig, TableReport,
};
use phigal_core::semilinear::{K0Elem, K0Matrix, Scalar};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

const SUPERSINGULAR: [i64; 3] = [-3, 0, 3];
const ORDINARY: [i64; 4] = [-2, -1, 1, 2];
const MUS: [(i64, [i64; 2]); 3] = [(-3, [1, 2]), (0, [-1, 1]), (3, [-2, -1])];

fn table(budget: usize, keep: impl Fn(&str) -> bool) -> TableReport {
    verify_rows(&TableConfig { sample_budget: budget, ..TableConfig::default() }, keep)
}

fn failures(rep: &TableReport) -> Vec<String> {
    rep.rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}: {}", r.row, r.failures.join("; ")))
        .collect()
}

fn finite_rows() -> Outcome {
    let rep = table(3, |r| r.starts_with("Dc ") || r.starts_with("Dpcg"));
    let mut bad = failures(&rep);
    let mut total = 0;
    for e in [1, 2] {
        for (kind, n) in [("supersingular", 3), ("ordinary", 8)] {
            let name = format!("Dc e={e} {kind}");
            match rep.rows.iter().find(|r| r.row == name) {
                Some(r) if r.computed_classes == n => total += n,
                _ => bad.push(format!("{name}: expected {n} classes")),
            }
        }
    }
    for e in [3, 6] {
        for (a, mus) in MUS {
            let name = format!("Dpcg e={e} a={a}");
            let want: Vec<String> = mus.iter().map(|&m| ClassLabel::dpcg(e, a, m).to_string()).collect();
            match rep.rows.iter().find(|r| r.row == name) {
                Some(r) if r.labels == want && r.computed_classes == 2 => total += 2,
                _ => bad.push(format!("{name}: expected classes {want:?}")),
            }
        }
    }
    ok(
        bad.is_empty() && rep.rows.len() == 10,
        if bad.is_empty() {
            format!("{total} pairwise distinct classes in 10 rows (3+8 for e=1,2; mu-sets {{1,2}},{{-1,1}},{{-2,-1}} for e=3,6)")
        } else {
            bad.join(" | ")
        },
    )
}

fn infinite_rows() -> Outcome {
    let rep = table(25, |r| !(r.starts_with("Dc ") || r.starts_with("Dpcg")));
    let bad = failures(&rep);
    let all_25 = rep.rows.iter().all(|r| r.computed_classes == 25 && r.pairwise_non_isomorphic);
    ok(
        bad.is_empty() && all_25 && rep.rows.len() == 13,
        if bad.is_empty() {
            format!("{} rows x 25 parameters: pairwise non-isomorphic, conditions (1)-(4) and admissibility hold", rep.rows.len())
        } else {
            bad.join(" | ")
        },
    )
}

fn sample(n: usize, seed: u64) -> Vec<ProjParam> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = vec![ProjParam::Infinity, ProjParam::int(0), ProjParam::int(1)];
    while out.len() < n {
        out.push(ProjParam::ratio(rng.gen_range(-40..=40), rng.gen_range(1..=9)));
    }
    out
}

fn admissible(l: &ClassLabel) -> Result<bool, String> {
    let m = canonical_module(l).map_err(|e| format!("{l}: {e}"))?;
    is_admissible(&m).map(|r| r.admissible).map_err(|e| format!("{l}: {e}"))
}

/// Every projective row and every abelian wild class, for sampled parameters.
fn wild_labels(per_row: usize) -> Vec<ClassLabel> {
    let mut out = Vec::new();
    for e in [3, 6] {
        for (a, mus) in MUS {
            out.extend(mus.iter().map(|&m| ClassLabel::dpcg(e, a, m)));
        }
    }
    for (k, t) in sample(per_row, 41).into_iter().enumerate() {
        out.push(ClassLabel::dpc4(t.clone()));
        out.push(ClassLabel::dpcng(3, t.clone()));
        out.push(ClassLabel::dpcng(6, t.clone()));
        let i = (k % 5) as i64 + 1;
        out.push(ClassLabel::dpc12(i, (k % 2) as i64, t));
    }
    out
}

fn boundary() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for e in [1, 2] {
        for a in ORDINARY {
            let l = ClassLabel::dc(e, a, ProjParam::Infinity);
            match admissible(&l) {
                Ok(false) => checked += 1,
                Ok(true) => bad.push(format!("{l} admissible")),
                Err(err) => bad.push(err),
            }
            for t in sample(8, 7).into_iter().skip(1) {
                let l = ClassLabel::dc(e, a, t);
                match admissible(&l) {
                    Ok(true) => checked += 1,
                    Ok(false) => bad.push(format!("{l} not admissible")),
                    Err(err) => bad.push(err),
                }
            }
        }
        for a in SUPERSINGULAR {
            for t in sample(8, 11) {
                let l = ClassLabel::dc(e, a, t);
                match admissible(&l) {
                    Ok(true) => checked += 1,
                    Ok(false) => bad.push(format!("{l} not admissible")),
                    Err(err) => bad.push(err),
                }
            }
        }
    }
    for l in wild_labels(10) {
        match admissible(&l) {
            Ok(true) => checked += 1,
            Ok(false) => bad.push(format!("{l} not admissible")),
            Err(err) => bad.push(err),
        }
    }
    ok(
        bad.is_empty(),
        if bad.is_empty() {
            format!("8 ordinary Dc(e;a;inf) rejected; {checked} other modules (ordinary finite alpha, supersingular, wild) admissible")
        } else {
            bad.join(" | ")
        },
    )
}

fn lambda_table() -> Outcome {
    let mut bad = Vec::new();
    let (mut rejected, mut accepted) = (0, 0);
    for e in [3, 6] {
        for a in -4..=4 {
            for mu in -4..=4 {
                let expected = MUS.iter().any(|(a0, ms)| *a0 == a && ms.contains(&mu));
                let l = ClassLabel::dpcg(e, a, mu);
                match (canonical_module(&l), expected) {
                    (Err(_), false) => rejected += 1,
                    (Ok(_), false) => bad.push(format!("{l} accepted")),
                    (Err(err), true) => bad.push(format!("{l}: {err}")),
                    (Ok(m), true) => match check_conditions(&m) {
                        // Char poly X^2 + c1 X + c0 on D0: det = c0, trace = -c1.
                        Ok(r) => match &r.char_poly {
                            Some([c0, c1, _]) if c0 == "3" && c1 == &a.to_string() => accepted += 1,
                            cp => bad.push(format!("{l}: char poly {cp:?}, want det 3, trace {}", -a)),
                        },
                        Err(err) => bad.push(format!("{l}: {err}")),
                    },
                }
            }
        }
    }
    ok(
        bad.is_empty() && accepted == 12,
        if bad.is_empty() {
            format!("{rejected} pairs outside the table rejected; {accepted} accepted with det 3 and trace -a")
        } else {
            bad.join(" | ")
        },
    )
}

fn curve_data() -> Outcome {
    let f3 = BaseField::F3;
    let mut bad = Vec::new();
    for (a6, count, trace) in [(0, 4, 0), (1, 7, -3), (-1, 1, 3)] {
        let e = CurveF3q::short(f3, 0, -1, a6).unwrap();
        if (e.point_count(), e.frobenius_trace()) != (count, trace) {
            bad.push(format!("{e}: {} points, trace {}", e.point_count(), e.frobenius_trace()));
        }
    }
    let e = CurveF3q::short(BaseField::F9, 0, 1, 0).unwrap();
    let g = automorphism_group(&e);
    let sylow = g.unique_sylow3().map(|s| s.len());
    if g.order() != 12 || sylow != Some(3) || !g.is_group() {
        bad.push(format!("{e}: Aut order {}, normal 3-Sylow {sylow:?}", g.order()));
    }
    ok(
        bad.is_empty(),
        if bad.is_empty() {
            "traces 0, -3, 3 (4, 7, 1 points) over F3; Aut(y^2 = x^3 + x / F9) of order 12, shape Z3:Z4, normal 3-Sylow".into()
        } else {
            bad.join(" | ")
        },
    )
}

fn galois_pairs() -> Outcome {
    let rep = match verify_table2() {
        Ok(r) => r,
        Err(e) => return ok(false, e.to_string()),
    };
    let mut bad: Vec<String> = rep
        .rows
        .iter()
        .filter(|r| !r.verdict.is_valid_minimal() || r.trace != r.expected_trace)
        .map(|r| format!("{} {}: {}", r.field_label, r.curve, r.verdict))
        .collect();
    bad.extend(
        rep.excluded
            .iter()
            .filter(|r| !matches!(r.verdict, Verdict::Invalid(_)))
            .map(|r| format!("{} {}: {} (expected invalid)", r.field_label, r.curve, r.verdict)),
    );
    bad.extend(
        rep.excluded_search
            .iter()
            .filter(|(_, _, found)| *found > 0)
            .map(|(c, _, found)| format!("{c}: {found} valid pairs found")),
    );
    let fields: std::collections::BTreeSet<&str> = rep.rows.iter().map(|r| r.field_label.as_str()).collect();
    ok(
        bad.is_empty() && rep.pass,
        if bad.is_empty() {
            format!(
                "{} pairs valid-minimal over {} fields (non-abelian cubic, abelian cubic x3 curves, K1..K10); trace +-3 over the non-abelian closure invalid, 0 of {} candidates valid",
                rep.rows.len(),
                fields.len(),
                rep.excluded_search.iter().map(|x| x.1).sum::<usize>()
            )
        } else {
            bad.join(" | ")
        },
    )
}

fn galois_groups() -> Outcome {
    let policy = PrecisionPolicy::default();
    let mut bad = Vec::new();
    let mut groups = 0;
    let mut worst: Option<num_rational::Ratio<i64>> = None;
    for en in catalog().entries() {
        if en.presentation.is_none() {
            continue;
        }
        match en.group() {
            Ok(g) => {
                groups += 1;
                if g.order() as u32 != en.e * en.f {
                    bad.push(format!("{}: group of order {}", en.label, g.order()));
                }
                for c in g.checks() {
                    if c.residual < 20.into() {
                        bad.push(format!("{}: {} residual {}", en.label, c.relation, c.residual));
                    }
                    worst = Some(worst.map_or(c.residual, |w| w.min(c.residual)));
                }
            }
            Err(e) => bad.push(format!("{}: {e}", en.label)),
        }
        if en.e == 12 {
            let k = en.field();
            match find_roots_in_field(&k, &int_poly(&k, &en.polynomial), &policy) {
                Ok(r) if r.len() == 12 => {}
                Ok(r) => bad.push(format!("{}: {} roots", en.label, r.len())),
                Err(e) => bad.push(format!("{}: {e}", en.label)),
            }
        }
    }
    ok(
        bad.is_empty() && policy.working_precision == 40,
        if bad.is_empty() {
            format!(
                "{groups} groups: orders e*f, generator orders and relations hold (min residual {}); 12 roots for each of K1..K10",
                worst.map(|w| w.to_string()).unwrap_or_default()
            )
        } else {
            bad.join(" | ")
        },
    )
}

fn finite_labels() -> Vec<ClassLabel> {
    let mut out = Vec::new();
    for e in [1, 2] {
        out.extend(SUPERSINGULAR.iter().map(|&a| ClassLabel::dc(e, a, ProjParam::int(0))));
        for a in ORDINARY {
            out.extend((0..2).map(|al| ClassLabel::dc(e, a, ProjParam::int(al))));
        }
    }
    for e in [3, 6] {
        for (a, mus) in MUS {
            out.extend(mus.iter().map(|&m| ClassLabel::dpcg(e, a, m)));
        }
    }
    out
}

fn random_conjugator(rng: &mut StdRng, f: u32) -> K0Matrix {
    loop {
        let mut entry = || {
            let im = if f == 2 { rng.gen_range(-3..=3) } else { 0 };
            K0Elem::new(Scalar::int(rng.gen_range(-5..=5)), Scalar::int(im))
        };
        let m = K0Matrix::linear([[entry(), entry()], [entry(), entry()]], f);
        if m.is_invertible() {
            return m;
        }
    }
}

fn properties() -> Outcome {
    let mut bad = Vec::new();
    let mut all: Vec<ClassLabel> = finite_labels();
    all.extend(wild_labels(5).into_iter().filter(|l| l.is_projective_family()));

    // classify o canonical = id, descent, Weil traces.
    let mut modules: Vec<(ClassLabel, FilteredModule)> = Vec::new();
    for l in &all {
        let m = match canonical_module(l) {
            Ok(m) => m,
            Err(e) => {
                bad.push(format!("{l}: {e}"));
                continue;
            }
        };
        match classify(&m) {
            Ok(c) if c.same_class(l) => {}
            Ok(c) => bad.push(format!("classify({l}) = {c}")),
            Err(e) => bad.push(format!("classify({l}): {e}")),
        }
        let dim = descent_basis(&m.base).len();
        if dim != 2 {
            bad.push(format!("{l}: descent dimension {dim}"));
        }
        match weil_traces(&m.base, 6) {
            Ok(ts) if ts.iter().all(|t| t.is_rational()) => {}
            Ok(_) => bad.push(format!("{l}: irrational Weil trace")),
            Err(e) => bad.push(format!("{l}: {e}")),
        }
        modules.push((l.clone(), m));
    }
    let n_labels = modules.len();

    // Twists: unramified is an involution negating the trace; ramified maps
    // Dc(1;a;alpha) to Dc(2;a;alpha).
    let mut twists = 0;
    for (l, m) in &modules {
        let once = match twist_unramified(m) {
            Ok(t) => t,
            Err(e) => {
                bad.push(format!("twist {l}: {e}"));
                continue;
            }
        };
        let trace = |d: &FilteredModule| check_conditions(d).ok().and_then(|r| r.trace);
        if trace(&once).map(|t| -t) != trace(m) {
            bad.push(format!("twist of {l} does not negate the trace"));
        }
        match twist_unramified(&once).and_then(|t| is_isomorphic(m, &t)) {
            Ok(Some(_)) => twists += 1,
            Ok(None) => bad.push(format!("twice-twisted {l} not isomorphic to {l}")),
            Err(e) => bad.push(format!("twist {l}: {e}")),
        }
        if l.field_label().as_deref() == Ok("Q3") {
            let want = ClassLabel::dc(2, l.trace, l.param.clone().unwrap_or(ProjParam::int(0)));
            match twist_ramified(m).and_then(|t| classify(&t)) {
                Ok(c) if c.same_class(&want) => twists += 1,
                Ok(c) => bad.push(format!("ramified twist of {l} is {c}, want {want}")),
                Err(e) => bad.push(format!("ramified twist of {l}: {e}")),
            }
        }
    }

    // Equivalence laws on 50 random conjugates.
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut laws = 0;
    for k in 0..50 {
        let (l, d) = &modules[(k * 7) % modules.len()];
        let f = d.base.f();
        let x = random_conjugator(&mut rng, f);
        let y = random_conjugator(&mut rng, f);
        let (d1, d2) = match conjugate(d, &x).and_then(|d1| Ok((conjugate(&d1, &y)?, d1))) {
            Ok((d2, d1)) => (d1, d2),
            Err(e) => {
                bad.push(format!("conjugate {l}: {e}"));
                continue;
            }
        };
        let iso = |a: &FilteredModule, b: &FilteredModule| matches!(is_isomorphic(a, b), Ok(Some(_)));
        let checks = [
            ("reflexive", iso(&d1, &d1)),
            ("forward", iso(d, &d1)),
            ("symmetric", iso(&d1, d)),
            ("step", iso(&d1, &d2)),
            ("transitive", iso(d, &d2)),
            ("classify", classify(&d2).is_ok_and(|c| c.same_class(l))),
        ];
        for (name, good) in checks {
            if good {
                laws += 1;
            } else {
                bad.push(format!("conjugate {k} of {l}: {name} fails"));
            }
        }
        // A different class stays different after conjugation.
        if let Some((l2, other)) = modules
            .iter()
            .find(|(l2, o)| o.base.field_label() == d.base.field_label() && !l2.same_class(l))
        {
            if iso(other, &d1) {
                bad.push(format!("{l2} isomorphic to a conjugate of {l}"));
            } else {
                laws += 1;
            }
        }
    }
    ok(
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{n_labels} labels: classify o canonical = id, descent dimension 2, Weil traces rational (|n| <= 6); {twists} twist checks; {laws} equivalence checks on 50 conjugates"
            )
        } else {
            bad.join(" | ")
        },
    )
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(u32, &str, &str, u64, Check); 8] = [
        (1, "table, finite rows", "exact", 10, finite_rows),
        (2, "table, projective rows (25 samples)", "exact", 60, infinite_rows),
        (3, "admissibility boundary", "exact", 60, boundary),
        (4, "abelian cubic (a, mu) table", "exact", 60, lambda_table),
        (5, "curve data over F3 and F9", "exact", 1, curve_data),
        (6, "curve Galois pairs", "exact", 60, galois_pairs),
        (7, "Galois groups and dodecic roots", "residual >= 20 at precision 40", 120, galois_groups),
        (8, "property suites", "exact", 120, properties),
    ];
    let mut all = true;
    for (n, name, tol, budget, check) in criteria {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = out.pass && in_time;
        all &= pass;
        println!(
            "criterion {n} {}: {name} [{tol}] {:.2}s / {budget}s{}: {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { " OVER BUDGET" },
            out.detail
        );
    }
    println!("acceptance: {}", if all { "all criteria pass" } else { "FAILURES" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
