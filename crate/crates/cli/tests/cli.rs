use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use vinf_cli::places::{abs_value, Place};
use vinf_cli::scenario::{to_canonical_json, Scenario};
use vinf_exact::{rat, Rational};

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "scenarios", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn vinf(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_vinf")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn temp_file(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("vinf-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn chi_of_two_branches_is_infinite() {
    let (code, out, _) = vinf(&["chi", "-f", &scenario("two_branches.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("+inf"), "{out}");
    assert!(out.contains("verdict: rich"), "{out}");
}

#[test]
fn root_is_not_rich() {
    let (code, out, _) = vinf(&["classify", "-f", &scenario("root.json")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("delta=0"), "{out}");
}

#[test]
fn oracle_check_reports_counts() {
    let (code, out, _) = vinf(&["oracle-check", "--seed", "7", "--count", "50"]);
    assert_eq!(code, 0);
    assert!(out.contains("50/50 α-consistency"), "{out}");
}

#[test]
fn algebraize_from_a_file() {
    let (code, out, _) = vinf(&["algebraize", "-f", &scenario("cusp_points.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("witness P = y^2 - x^3"), "{out}");
    assert!(out.contains("T = {0}"), "{out}");
    assert!(out.contains("branch match: confirmed"), "{out}");
}

#[test]
fn two_level_sets_through_a_bound() {
    let body = r#"{
  "format": 1,
  "valuations": {
    "cusp": { "kind": "curve", "base": { "chart": "y" }, "m": 3, "coeffs": [[1, "1"]], "truncation": 1, "exact": true }
  },
  "algebraize": {
    "branches": [ { "valuation": "cusp" } ],
    "bounds": [ { "place": "inf", "bound": "3" } ],
    "points": [["4", "8"], ["9", "27"], ["2", "3"]],
    "max_degree": 3
  }
}"#;
    let f = temp_file("levels.json", body);
    let (code, out, _) = vinf(&["algebraize", "--json", "-f", &f]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["values"], serde_json::json!(["0", "1"]));
    assert_eq!(v["branch_match_confirmed"], serde_json::json!(false));
}

#[test]
fn json_reports_are_deterministic() {
    let f = scenario("mixed.json");
    for cmd in [&["classify", "e", "f"][..], &["matrix"], &["laplacian", "P"], &["dirichlet", "mu", "P"]] {
        let mut args = vec!["--json", "-f", f.as_str()];
        args.extend_from_slice(cmd);
        let (c1, a, _) = vinf(&args);
        let (c2, b, _) = vinf(&args);
        assert_eq!((c1, c2), (0, 0), "{cmd:?}");
        assert_eq!(a, b);
        serde_json::from_str::<serde_json::Value>(&a).expect("valid JSON");
    }
}

#[test]
fn text_commands_on_a_mixed_scenario() {
    let f = scenario("mixed.json");
    let (code, out, _) = vinf(&["skewness", "-f", &f]);
    assert_eq!(code, 0);
    assert!(out.contains("skewness(root) = 1"));
    assert!(out.contains("skewness(w) = -1/2"));
    let (_, out, _) = vinf(&["eval", "-f", &f, "w", "y", "x"]);
    assert!(out.contains("w(y) = 1/2") && out.contains("w(x) = -1"), "{out}");
    let (_, out, _) = vinf(&["meet", "-f", &f, "e", "root"]);
    assert!(out.contains("meet = -deg") && out.contains("GT"), "{out}");
    let (_, out, _) = vinf(&["find-positive", "-f", &f, "--max-degree", "2", "w"]);
    assert!(out.starts_with("witness: y"), "{out}");
    let (_, out, _) = vinf(&["log-laplacian", "-f", &f, "P"]);
    assert!(out.contains("total mass 3"), "{out}");
}

#[test]
fn syntax_errors_exit_with_two_and_a_position() {
    let f = temp_file("broken.json", "{\n  \"format\": 1,\n  \"valuations\": {\n    \"a\": { \"kind\": \"root\" },,\n  }\n}\n");
    let (code, _, err) = vinf(&["skewness", "-f", &f]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn domain_errors_exit_with_two() {
    let bad_value = temp_file("badq.json", "{\"format\": 1, \"valuations\": {\"w\": {\"kind\": \"monomial\", \"s\": \"-1\", \"t\": \"1/0\"}}}");
    let (code, _, err) = vinf(&["skewness", "-f", &bad_value]);
    assert_eq!(code, 2);
    assert!(err.contains("column"), "{err}");
    let bad_step = temp_file(
        "badstep.json",
        "{\"format\": 1, \"valuations\": {\"e\": {\"kind\": \"divisorial\", \"base\": {\"chart\": \"y\"}, \"steps\": [\"sat(prev)\", \"free(0)\"]}}}",
    );
    assert_eq!(vinf(&["skewness", "-f", &bad_step]).0, 2);
    assert_eq!(vinf(&["skewness", "-f", &scenario("mixed.json"), "nope"]).0, 2);
    assert_eq!(vinf(&["skewness", "-f", "/nonexistent/scenario.json"]).0, 2);
    assert_eq!(vinf(&["classify", "-f", &scenario("root.json"), "--max-degree", "0"]).0, 2);
    assert_eq!(vinf(&["algebraize", "-f", &scenario("root.json")]).0, 2);
    assert_eq!(vinf(&["frobnicate"]).0, 2);
    let wrong_format = temp_file("v2.json", "{\"format\": 2}");
    assert_eq!(vinf(&["skewness", "-f", &wrong_format]).0, 2);
}

#[test]
fn json_errors_are_machine_readable() {
    let (code, out, _) = vinf(&["--json", "skewness", "-f", &scenario("mixed.json"), "nope"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exit_code"], serde_json::json!(2));
}

#[test]
fn canonical_output_round_trips() {
    for name in ["two_branches.json", "root.json", "cusp_points.json", "mixed.json"] {
        let (code, once, _) = vinf(&["canonical", "-f", &scenario(name)]);
        assert_eq!(code, 0);
        let f = temp_file(&format!("canon-{name}"), &once);
        let (_, twice, _) = vinf(&["canonical", "-f", &f]);
        assert_eq!(once, twice, "{name}");
    }
}

fn q_string(n: i64, d: i64, k: i64) -> String {
    // A non-canonical spelling of n/d.
    format!("{}/{}", n * k, d * k)
}

prop_compose! {
    fn scenario_text()(
        s in -3i64..=3, t in 1i64..=6, k in 1i64..=4,
        steps in proptest::collection::vec((0u8..3, -2i64..=2), 0..4),
        coeffs in proptest::collection::vec((1u32..6, -5i64..=5), 0..4),
        m in 1u32..=3,
        poly in proptest::collection::vec((0u32..3, 0u32..3, -4i64..=4), 1..5),
    ) -> String {
        let steps: Vec<String> = steps
            .iter()
            .enumerate()
            .map(|(i, (kind, c))| match (kind, i) {
                (_, 0) => format!("\"free({})\"", q_string(*c, 1, k)),
                // Later free points stay off the other boundary components.
                (0, _) => format!("\"free({})\"", q_string(if *c == 0 { 3 } else { *c }, 1, k)),
                (1, _) => "\"sat(prev)\"".to_string(),
                _ => "\"free(1)\"".to_string(),
            })
            .collect();
        let coeffs: Vec<String> = coeffs.iter().map(|(j, a)| format!("[{j}, \"{}\"]", q_string(*a, 1, k))).collect();
        let poly: Vec<String> = poly.iter().map(|(i, j, c)| format!("({c})*x^{i}*y^{j}")).collect();
        format!(
            r#"{{"format": 1,
 "valuations": {{
   "w": {{"kind": "monomial", "s": "{}", "t": "{}"}},
   "e": {{"kind": "divisorial", "base": {{"chart": "x", "c": "{}"}}, "steps": [{}]}},
   "c": {{"kind": "curve", "base": {{"chart": "y"}}, "m": {m}, "coeffs": [{}], "truncation": 6}}
 }},
 "polynomials": {{"P": "{}"}},
 "measures": {{"mu": [["e", "{}"]]}}
}}"#,
            q_string(-1, 1, k),
            q_string(s, t, k),
            q_string(s, 1, k),
            steps.join(", "),
            coeffs.join(", "),
            poly.join(" + "),
            q_string(t, 2, k)
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_round_trips(text in scenario_text()) {
        let sc = Scenario::parse(&text).unwrap();
        let once = to_canonical_json(&sc.file).unwrap();
        let again = Scenario::parse(&once).unwrap();
        prop_assert_eq!(to_canonical_json(&again.file).unwrap(), once);
        prop_assert_eq!(again.polynomials, sc.polynomials);
        for (name, v) in &sc.valuations {
            prop_assert_eq!(again.valuations[name].key().unwrap(), v.key().unwrap());
        }
    }

    #[test]
    fn absolute_values_are_multiplicative(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500) {
        let (x, y) = (rat(a, b), rat(c, d));
        for place in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Prime(7)] {
            prop_assert_eq!(abs_value(&(&x * &y), place), abs_value(&x, place) * abs_value(&y, place));
            if let Place::Prime(_) = place {
                let s = abs_value(&(&x + &y), place);
                let m = std::cmp::max(abs_value(&x, place), abs_value(&y, place));
                prop_assert!(s <= m);
            } else {
                prop_assert!(abs_value(&(&x + &y), place) <= abs_value(&x, place) + abs_value(&y, place));
            }
            prop_assert!(abs_value(&x, place) >= Rational::from_integer(0.into()));
        }
    }
}
