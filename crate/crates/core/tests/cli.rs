use std::path::{Path, PathBuf};
use std::sync::Once;

use ktrop::cli::{parse_document, read_document, run, serialize};

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name).display().to_string()
}

fn scratch(name: &str, text: &str) -> String {
    static SETUP: Once = Once::new();
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    // tests run in parallel; the referenced fan is copied once
    SETUP.call_once(|| {
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::copy(example("p2_fan.json"), dir.join("p2_fan.json")).unwrap();
    });
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

/// (exit code, stdout, stderr)
fn ktrop(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["ktrop"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn validate_fan() {
    let (code, out, _) = ktrop(&["validate", &example("p2_fan.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("smooth: true") && out.contains("complete: true"));
    assert!(out.contains("v(0,0)|r(-1,-1);r(0,1)"));
}

#[test]
fn missing_payload_is_a_schema_error() {
    let p = scratch("no_payload.json", r#"{"version":"1","kind":"fan"}"#);
    let (code, _, err) = ktrop(&["validate", &p]);
    assert_eq!(code, 2);
    assert!(err.contains("$.payload"), "{err}");
}

#[test]
fn unknown_kind_and_version() {
    let p = scratch("gizmo.json", r#"{"version":"1","kind":"gizmo","payload":{}}"#);
    let (code, _, err) = ktrop(&["validate", &p]);
    assert_eq!(code, 2);
    assert!(err.contains("gizmo"));
    let p = scratch("v9.json", r#"{"version":"9","kind":"fan","payload":{}}"#);
    let (code, _, err) = ktrop(&["validate", &p]);
    assert_eq!(code, 2);
    assert!(err.contains("version"));
}

#[test]
fn unknown_cell_id_is_named() {
    let text = std::fs::read_to_string(example("p2_balanced.json")).unwrap().replace("\"v(0,0)|r(0,1)\"", "\"v(9,9)\"");
    let p = scratch("unknown_id.json", &text);
    let (code, _, err) = ktrop(&["validate", &p]);
    assert_eq!(code, 2);
    assert!(err.contains("$.payload.weights") && err.contains("v(9,9)"), "{err}");
}

#[test]
fn serialization_roundtrips() {
    for name in ["p2_fan.json", "p2_balanced.json", "coarsening_triangle.json"] {
        let doc = read_document(Path::new(&example(name))).unwrap();
        let v = serialize(&doc);
        let again = parse_document(&v.to_string()).unwrap();
        assert_eq!(serialize(&again), v, "{name}");
    }
}

#[test]
fn balance_exit_codes() {
    let (code, out, _) = ktrop(&["balance", &example("p2_balanced.json"), "--witness"]);
    assert_eq!(code, 0);
    assert!(out.contains("balanced: true"), "{out}");
    let text = std::fs::read_to_string(example("p2_balanced.json"))
        .unwrap()
        .replace(r#""v(0,0)|r(1,0)": "1""#, r#""v(0,0)|r(1,0)": "2""#);
    let p = scratch("unbalanced.json", &text);
    let (code, out, _) = ktrop(&["balance", &p]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn total_chi_json() {
    let (code, out, _) = ktrop(&["--format", "json", "total-chi", &example("coarsening_triangle.json")]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["total_chi"], "13");
}

#[test]
fn render_coarsening_labels() {
    let args = ["render", &example("coarsening_triangle.json"), "--coarsen"];
    let (code, svg, _) = ktrop(&args);
    assert_eq!(code, 0);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let labels: Vec<&str> = svg.lines().filter(|l| l.starts_with("<text")).map(|l| l.split('>').nth(1).unwrap().trim_end_matches("</text")).collect();
    // one label per stratum
    assert_eq!(labels.len(), 8);
    assert_eq!(labels.iter().filter(|l| **l == "7").count(), 4);
    assert_eq!(labels.iter().filter(|l| **l == "5").count(), 3);
    assert_eq!(labels.iter().filter(|l| **l == "2").count(), 1);
    assert_eq!(ktrop(&args).1, svg);
}

#[test]
fn render_edge_cases() {
    let p = scratch("empty.json", r#"{"version":"1","kind":"complex","payload":{"rank":2,"vertices":[],"cells":[]}}"#);
    let (code, svg, err) = ktrop(&["render", &p]);
    assert_eq!(code, 0, "{err}");
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
    let p = scratch(
        "cube.json",
        r#"{"version":"1","kind":"complex","payload":{"vertices":[["0","0","0"],["1","0","0"]],"cells":[{"vertices":[0,1]}]}}"#,
    );
    let (code, _, _) = ktrop(&["render", &p]);
    assert_eq!(code, 3);
}

#[test]
fn thread_count_does_not_change_output() {
    for cmd in [vec!["filtration", "TRI"], vec!["coarsen", "TRI"], vec!["enumerate", "SEG", "--bound", "4"]] {
        let seg = scratch("seg.json", r#"{"version":"1","kind":"polytope","payload":{"vertices":[["0"],["4"]]}}"#);
        let tri = example("coarsening_triangle.json");
        let args: Vec<&str> = cmd.iter().map(|a| match *a {
            "TRI" => tri.as_str(),
            "SEG" => seg.as_str(),
            x => x,
        }).collect();
        let one = ktrop(&[&["--threads", "1"], &args[..]].concat());
        let four = ktrop(&[&["--threads", "4"], &args[..]].concat());
        assert_eq!(one.0, 0, "{cmd:?}: {}", one.2);
        assert_eq!(one, four, "{cmd:?}");
    }
}
