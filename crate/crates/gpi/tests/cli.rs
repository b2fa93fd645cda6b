use std::fs;

use gpi::descriptor::{AlgebraDescriptor, ElementaryGrading, GrassmannGradingDesc};
use gpi::triplet::read_triplets;
use gpi::{run, Outcome};
use gpi_core::identities::{identities_by_evaluation, IdentitySubspace};
use gpi_core::linalg::Subspace;
use gpi_core::MultidegreeSignature;
use serde_json::Value;

fn gpi(args: &[&str]) -> Outcome {
    run(std::iter::once("gpi").chain(args.iter().copied()))
}

fn cert(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = gpi(&all);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn regularity_examples() {
    let out = gpi(&["regularity", "--group", "2", "--targets", "0,1"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains(": regular"));
    let c = cert(&["regularity", "--group", "2", "--targets", "0,0,1"]);
    assert_eq!(c["regular"], false);
    assert_eq!(c["surjective"], true);
    let c = cert(&["regularity", "--group", "2", "--targets", "0"]);
    assert_eq!(c["regular"], false);
    assert_eq!(c["surjective"], false);
    let c = cert(&["regularity", "--group", "2,2", "--targets", "0,0;0,1;1,0;1,1"]);
    assert_eq!(c["regular"], true);
}

#[test]
fn regularity_malformed_map() {
    assert_eq!(gpi(&["regularity", "--group", "2", "--targets", "0,2"]).code, 1);
    assert_eq!(gpi(&["regularity", "--group", "2", "--targets", "a"]).code, 1);
    assert_eq!(gpi(&["regularity", "--group", "2"]).code, 1);
}

#[test]
fn identities_examples() {
    let c = cert(&["identities", "--algebra", "grassmann:N=6,deg=natural", "--sig", "0,0", "--basis"]);
    assert_eq!(c["dims"]["evaluation"], 1);
    assert_eq!(c["stabilized"], true);
    assert_eq!(c["n_values"], serde_json::json!([6, 8]));
    assert_eq!(c["basis"][0], "y1*y2 - y2*y1");

    let c = cert(&["identities", "--generators", "[[x1,x2],x3]", "--sig", "0,0,0"]);
    assert_eq!(c["dims"]["consequences"], 2);

    let out = gpi(&["identities", "--algebra", "grassmann:N=6,deg=natural"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("--sig"));
}

#[test]
fn identities_matrix_algebra() {
    let c = cert(&["identities", "--algebra", "matrix:targets=0,1", "--sig", "0,0", "--basis"]);
    assert_eq!(c["dims"]["evaluation"], 1);
    assert_eq!(c["basis"][0], "y1*y2 - y2*y1");
    assert_eq!(c["n_values"], Value::Null);
}

#[test]
fn generators_from_file_expand_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gens.txt");
    fs::write(&path, "# infty generators\n[x1,x2,x3]\n").unwrap();
    let p = path.to_str().unwrap();
    let c = cert(&["identities", "--algebra", "grassmann:N=8,deg=infty", "--generators", p, "--sig", "1,0,1"]);
    assert_eq!(c["relation"], "agree");
    assert_eq!(c["dims"]["evaluation"], c["dims"]["consequences"]);
    assert_eq!(c["inputs"]["generators"], "# infty generators\n[x1,x2,x3]\n");
}

#[test]
fn preset_generators_for_grassmann() {
    for deg in ["natural", "infty", "trivial", "kstar,k=1"] {
        let sig = if deg == "trivial" { "e,e,e" } else { "1,0,1" };
        let alg = format!("grassmann:N=8,deg={deg}");
        let c = cert(&["identities", "--algebra", &alg, "--sig", sig, "--route", "both"]);
        assert_eq!(c["relation"], "agree", "{deg}");
    }
}

#[test]
fn route_disagreement_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let p = path.to_str().unwrap();
    let out = gpi(&[
        "--cert",
        p,
        "identities",
        "--algebra",
        "grassmann:N=6,deg=natural",
        "--generators",
        "[x1,x2,x3]",
        "--sig",
        "1,1",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("routes disagree"));
    let c: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(c["relation"], "disagree");
    assert!(c["inconsistency"].as_str().unwrap().contains("routes disagree"));
}

#[test]
fn unstabilized_truncation_exit_2() {
    let out = gpi(&[
        "identities",
        "--full",
        "--algebra",
        "grassmann:N=4,deg=trivial",
        "--sig",
        "e,e,e,e",
        "--n-list",
        "3,4",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("not stabilized"));
    let ok = gpi(&["identities", "--full", "--algebra", "grassmann:N=4,deg=trivial", "--sig", "e,e,e", "--n-list", "4,6"]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
}

#[test]
fn truncation_too_small_is_usage() {
    let out = gpi(&["identities", "--algebra", "grassmann:N=2,deg=trivial", "--sig", "e,e,e", "--n-list", "2"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("larger N"));
}

#[test]
fn guard_exit_3() {
    let out = gpi(&["--max-cells", "10", "identities", "--algebra", "matrix:targets=0,1", "--sig", "0,0,0"]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("resource guard"));
    let out = gpi(&["--max-cells", "10", "factor-check", "--shape", "1,1", "--entries", "field", "--sweep", "3"]);
    assert_eq!(out.code, 3);
}

#[test]
fn factor_check_examples() {
    let c = cert(&["factor-check", "--shape", "1,1", "--entries", "grassmann:deg=kstar,k=1", "--sig", "1,1"]);
    assert_eq!(c["relation"], "product_strictly_inside");
    assert_eq!(c["witness"], "z1*z2");
    assert_eq!(c["verdicts"][0]["dim_r"], 2);
    assert_eq!(c["verdicts"][0]["dim_product"], 0);

    let c = cert(&["factor-check", "--shape", "1,1", "--entries", "grassmann:deg=infty", "--sweep", "4"]);
    assert_eq!(c["relation"], "equal");
    assert_eq!(c["verdicts"].as_array().unwrap().len(), 30);
    assert_eq!(c["stabilized"], true);

    let c = cert(&["factor-check", "--shape", "1,1", "--entries", "field", "--sweep", "4"]);
    assert_eq!(c["relation"], "equal");
    let dims: Vec<u64> = c["verdicts"].as_array().unwrap().iter().map(|v| v["dim_r"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![0, 0, 0, 6]);
}

#[test]
fn factor_check_matrix_entries() {
    let c = cert(&["factor-check", "--shape", "1,1", "--entries", "matrix:targets=0,1", "--sweep", "2"]);
    assert_eq!(c["relation"], "equal");
    let c = cert(&["factor-check", "--shape", "2", "--entries", "grassmann:deg=natural", "--sig", "0,1"]);
    assert_eq!(c["relation"], "equal");
}

#[test]
fn factor_check_usage() {
    assert_eq!(gpi(&["factor-check", "--shape", "1,1", "--entries", "field"]).code, 1);
    assert_eq!(gpi(&["factor-check", "--shape", "1,1", "--entries", "field", "--sig", "e", "--sweep", "2"]).code, 1);
    assert_eq!(gpi(&["factor-check", "--shape", "1,1", "--entries", "grassmann:N=4,deg=natural", "--sig", "1"]).code, 1);
    assert_eq!(gpi(&["factor-check", "--shape", "0", "--entries", "field", "--sig", "e"]).code, 1);
    assert_eq!(gpi(&["factor-check", "--shape", "1,1", "--entries", "lie", "--sig", "e"]).code, 1);
}

#[test]
fn relfree_examples() {
    let out = gpi(&["relfree", "nf", "--mode", "kstar:1", "--poly", "z1*z2"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.trim(), "0");

    let c = cert(&["relfree", "multbasis", "--mode", "kstar:1"]);
    assert_eq!(c["verdict"], "fails");
    assert!(c["witness"].as_str().unwrap().ends_with("= 0"));

    let c = cert(&["relfree", "multbasis", "--mode", "infty", "--bound", "4", "--samples", "200", "--seed", "7"]);
    assert_eq!(c["verdict"], "holds-on-samples");
    assert_eq!(c["seed"], 7);

    let out = gpi(&["relfree", "nf", "--mode", "k:3", "--poly", "z1"]);
    assert_eq!(out.code, 4);
    assert_eq!(out.stderr.trim(), "error: unsupported: generators g_m unspecified in source");
    assert_eq!(gpi(&["relfree", "multbasis", "--mode", "deg_k"]).code, 4);
    assert_eq!(gpi(&["relfree", "multbasis", "--mode", "bogus"]).code, 1);
}

#[test]
fn relfree_nf_and_probe() {
    let out = gpi(&["relfree", "nf", "--mode", "infty", "--poly", "y2*y1"]);
    assert_eq!(out.stdout.trim(), "y1*y2 - [y1,y2]");
    let c = cert(&["relfree", "probe", "--mode", "natural", "--poly", "z2*z1 + y3*z1", "--trials", "50"]);
    assert_eq!(c["discrepancies"], 0);
    let c = cert(&["relfree", "count", "--mode", "infty", "--sig", "0,1,0"]);
    assert_eq!(c["basis_words"], 4);
    assert_eq!(c["identity_dim"], 2);
}

#[test]
fn model_eval_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    fs::write(&path, "[y1,y2]*[y3,y4]\n").unwrap();
    let p = path.to_str().unwrap();
    let c = cert(&["model", "eval", "--shape", "1,1", "--backend", "natural", "--poly", p]);
    assert_eq!(c["identity"], true);
    assert_eq!(c["inputs"]["poly"], "[y1,y2]*[y3,y4]");
    let c = cert(&["model", "eval", "--shape", "1,1", "--backend", "infty", "--poly", "[y1,y2]"]);
    assert_eq!(c["identity"], false);
    assert_eq!(c["matrix"][1][0], "0");
}

#[test]
fn certificate_fields() {
    let c = cert(&["factor-check", "--shape", "1,1", "--entries", "grassmann:deg=kstar,k=2", "--sig", "1,1,1"]);
    for key in [
        "command",
        "group",
        "inputs",
        "order_version",
        "relation",
        "schema_version",
        "seed",
        "stabilized",
        "tool_version",
        "verdicts",
        "witness",
    ] {
        assert!(c.get(key).is_some(), "missing {key}");
    }
    assert_eq!(c["witness"], "z1*z2*z3");
    assert_eq!(c["verdicts"][0]["n_values"], serde_json::json!([8, 10]));
    assert_eq!(c["inputs"]["entries"], "grassmann:deg=kstar,k=2");
}

#[test]
fn certificate_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = gpi(&["--cert", p.to_str().unwrap(), "relfree", "multbasis", "--mode", "natural", "--seed", "11"]);
        assert_eq!(out.code, 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn descriptor_file_round_trip() {
    let d = AlgebraDescriptor::BlockTriangular {
        blocks: vec![1, 1],
        group: vec![2],
        grading: ElementaryGrading { targets: vec![vec![0], vec![1]] },
    };
    let text = d.to_canonical_json();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ut.json");
    fs::write(&path, &text).unwrap();
    let reparsed = AlgebraDescriptor::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(reparsed.to_canonical_json(), text);

    let c = cert(&["identities", "--algebra", path.to_str().unwrap(), "--sig", "0,0"]);
    assert_eq!(c["inputs"]["algebra"], serde_json::to_value(&d).unwrap());
    assert_eq!(c["dims"]["evaluation"], 1);

    let e = AlgebraDescriptor::MatrixOver {
        blocks: vec![1, 1],
        inner: Box::new(AlgebraDescriptor::Grassmann {
            generators: 6,
            group: vec![2],
            grading: GrassmannGradingDesc::Infty,
        }),
    };
    let epath = dir.path().join("ute.json");
    fs::write(&epath, e.to_canonical_json()).unwrap();
    let c = cert(&["identities", "--algebra", epath.to_str().unwrap(), "--sig", "0,0,0,0"]);
    assert_eq!(c["stabilized"], true);
}

#[test]
fn matrix_out_triplets() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis.txt");
    let out = gpi(&[
        "identities",
        "--algebra",
        "matrix:targets=0,1",
        "--sig",
        "0,1,1",
        "--matrix-out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let (cols, rows) = read_triplets(&fs::read_to_string(&path).unwrap()).unwrap();
    let d = AlgebraDescriptor::parse_short("matrix:targets=0,1").unwrap();
    let sig = MultidegreeSignature::z2(&[0, 1, 1]).unwrap();
    let expected = identities_by_evaluation(&d.build().unwrap(), &sig).unwrap();
    let got = IdentitySubspace::new(sig, Subspace::span(cols, &rows).unwrap()).unwrap();
    assert_eq!(got, expected);
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, r#"{"algebra": "grassmann:N=6,deg=natural", "sig": "0,0", "basis": true}"#).unwrap();
    let p = path.to_str().unwrap();
    let c = cert(&["identities", "--config", p]);
    assert_eq!(c["signature"], "(0;0)");
    assert_eq!(c["basis"][0], "y1*y2 - y2*y1");
    let c = cert(&["identities", "--config", p, "--sig", "1,1"]);
    assert_eq!(c["signature"], "(1;1)");
    assert_eq!(c["dims"]["evaluation"], 1);

    fs::write(&path, r#"{"colour": "red"}"#).unwrap();
    assert_eq!(gpi(&["identities", "--config", p]).code, 1);
}

#[test]
fn help_and_bad_commands() {
    let out = gpi(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("factor-check"));
    assert_eq!(gpi(&["bogus"]).code, 1);
    assert_eq!(gpi(&["identities", "--route", "sideways", "--sig", "0"]).code, 1);
    assert_eq!(gpi(&[]).code, 1);
}
