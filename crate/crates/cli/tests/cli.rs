use std::path::Path;
use std::process::{Command, Output};

use cyclotomo::construct::{build_regular_upolygon, UPolygonJson};
use cyclotomo::crossratio::CrossRatioSetJson;
use cyclotomo::dirsearch::BoundReport;
use cyclotomo::geometry::{Point, PointSet};
use cyclotomo::modelset::PatchJson;
use cyclotomo::tomo::CollisionReportJson;
use cyclotomo::FieldTag;
use cyclotomo_cli::{render_svg, RenderInput, RenderSpec, XRayJson};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclotomo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parse into the typed document and serialize again with the same printer.
fn round_trips<T: DeserializeOwned + Serialize>(text: &str) {
    let doc: T = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&doc).unwrap() + "\n", text);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn json_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cross-ratio-set", "--n", "12"]);
    assert!(o.status.success());
    round_trips::<CrossRatioSetJson>(&stdout(&o));

    let o = run(&["magic", "--n", "5"]);
    assert!(o.status.success());
    round_trips::<BoundReport>(&stdout(&o));

    let u = dir.path().join("u.json");
    let o = run(&["upolygon", "--n", "4", "--json", u.to_str().unwrap()]);
    assert!(o.status.success());
    round_trips::<UPolygonJson>(&stdout(&o));
    assert_eq!(std::fs::read_to_string(&u).unwrap(), stdout(&o));

    let p = dir.path().join("p.json");
    let o = run(&["patch", "--n", "12", "--radius", "2", "--window", "ngon:12:1", "--out", p.to_str().unwrap()]);
    assert!(o.status.success());
    round_trips::<PatchJson>(&std::fs::read_to_string(&p).unwrap());

    let o = run(&["xray", "--points", p.to_str().unwrap(), "--direction", "1,0,0,0"]);
    assert!(o.status.success());
    round_trips::<XRayJson>(&stdout(&o));

    let o = run(&["verify-uniqueness", "--points", u.to_str().unwrap(), "--directions", u.to_str().unwrap(), "--max-size", "21"]);
    assert_eq!(o.status.code(), Some(1));
    round_trips::<CollisionReportJson>(&stdout(&o));
    let r: CollisionReportJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.found && r.exhaustive);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "g.json", "{ not json");
    let wrong = write(dir.path(), "w.json", r#"{"n": 4, "points": [[1, 2, 3, "x"]]}"#);
    let bad_n = write(dir.path(), "b.json", r#"{"n": 1, "points": []}"#);
    let pts = write(dir.path(), "p.json", r#"{"n": 4, "points": [[0, 0], [1, 0]]}"#);
    let dirs8 = write(dir.path(), "d.json", r#"{"n": 8, "directions": [[1, 0, 0, 0]]}"#);
    let zero = write(dir.path(), "z.json", r#"{"n": 4, "directions": [[0, 0]]}"#);
    let cases: Vec<Vec<&str>> = vec![
        vec!["magic", "--n", "2"],
        vec!["bound", "--n", "0"],
        vec!["bound", "--n", "abc"],
        vec!["frobnicate"],
        vec![],
        vec!["bound"],
        vec!["bound", "--n", "301"],
        vec!["xray", "--points", &garbage, "--direction", "1,0"],
        vec!["xray", "--points", &wrong, "--direction", "1,0"],
        vec!["xray", "--points", &bad_n, "--direction", "1,0"],
        vec!["xray", "--points", &pts, "--direction", "0,0"],
        vec!["xray", "--points", &pts, "--direction", "1,x"],
        vec!["xray", "--points", "/nonexistent/file.json", "--direction", "1,0"],
        vec!["verify-uniqueness", "--points", &pts, "--directions", &dirs8],
        vec!["verify-uniqueness", "--points", &pts, "--directions", &zero],
        vec!["patch", "--n", "8", "--radius", "-1", "--out", "/dev/null"],
        vec!["patch", "--n", "8", "--radius", "2", "--window", "hexagon", "--out", "/dev/null"],
        vec!["patch", "--n", "8", "--radius", "2", "--star", "2", "--out", "/dev/null"],
        vec!["patch", "--n", "8", "--radius", "2", "--shift", "1", "--out", "/dev/null"],
        vec!["demo3d", "--tolerance", "-1"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn collision_free_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let grid: Vec<String> = (0..3)
        .flat_map(|x| (0..3).map(move |y| format!("[{x}, {y}]")))
        .collect();
    let pts = write(dir.path(), "p.json", &format!(r#"{{"n": 4, "points": [{}]}}"#, grid.join(",")));
    let dirs = write(
        dir.path(),
        "d.json",
        r#"{"n": 4, "directions": [[1, 0], [1, 1], [1, 2], [2, -1]]}"#,
    );
    let o = run(&["verify-uniqueness", "--points", &pts, "--directions", &dirs]);
    assert_eq!(o.status.code(), Some(0));
    let r: CollisionReportJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!r.found && r.exhaustive);
}

#[test]
fn svg_is_deterministic_and_counts_rays() {
    let inst = build_regular_upolygon(FieldTag::new(12).unwrap()).unwrap();
    let spec = RenderSpec::fit(&inst.points().unwrap());
    let a = render_svg(&RenderInput::Instance(&inst), &spec);
    let b = render_svg(&RenderInput::Instance(&inst), &spec);
    assert_eq!(a, b);
    assert_eq!(a.matches("<line class=\"direction\"").count(), 12);
    assert_eq!(a.matches("class=\"white\"").count(), 12);
    assert_eq!(a.matches("class=\"grey\"").count(), 12);

    let dir = tempfile::tempdir().unwrap();
    let s1 = dir.path().join("1.svg");
    let s2 = dir.path().join("2.svg");
    for s in [&s1, &s2] {
        assert!(run(&["upolygon", "--n", "12", "--svg", s.to_str().unwrap()]).status.success());
    }
    assert_eq!(std::fs::read(&s1).unwrap(), std::fs::read(&s2).unwrap());
}

#[test]
fn empty_point_set_renders() {
    let empty = PointSet::new(FieldTag::new(4).unwrap());
    let svg = render_svg(&RenderInput::Points(&empty), &RenderSpec::fit(&empty));
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.contains("<g id=\"points\">\n  </g>"));
    assert!(svg.trim_end().ends_with("</svg>"));

    let one = PointSet::from_points(FieldTag::new(4).unwrap(), [Point::from_int_xy(1, 1)]).unwrap();
    let svg = render_svg(&RenderInput::Points(&one), &RenderSpec::fit(&one));
    assert!(svg.contains(r#"cx="300" cy="300""#));
}

#[test]
fn bound_reports_the_witness() {
    let o = run(&["bound", "--n", "3"]);
    assert!(o.status.success());
    let r: BoundReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r.bound, r.magic), (6, 7));
    assert!(r.exhaustive && r.matches_regular);
    assert_eq!(r.witness.len(), 6);
    assert!(!o.stderr.is_empty());
}
