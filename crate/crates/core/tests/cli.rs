use std::path::{Path, PathBuf};

use dgcore::cli::run;
use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).to_string_lossy().into_owned()
}

fn dgq(out: &Path, args: &[&str]) -> (i32, String) {
    let mut argv = vec!["dgq".to_string(), "--out".to_string(), out.to_string_lossy().into_owned()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut buf = Vec::new();
    let code = run(argv, &mut buf);
    (code, String::from_utf8(buf).unwrap())
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn koszul_invariants_from_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    for (n, ws) in [(1, "koszul1.dgws"), (2, "koszul2.dgws"), (3, "koszul3.dgws")] {
        let path = corpus(ws);
        let (code, text) = dgq(dir.path(), &["cone-length", &path]);
        assert_eq!(code, 0, "{text}");
        assert!(text.starts_with(&format!("cone length of K: {n}\n")), "{text}");
        assert!(text.contains("certificate: "));
        let (code, text) = dgq(dir.path(), &["level", &path]);
        assert_eq!(code, 0);
        assert!(text.starts_with(&format!("level of K: {}\n", n + 1)), "{text}");
        let stem = ws.trim_end_matches(".dgws");
        let cert = read_json(&dir.path().join(format!("cone-length-{stem}-K.json")));
        assert_eq!(cert["cone_length"], n);
        assert_eq!(cert["ghost_length"], n);
        assert_eq!(cert["exact"], true);
        assert_eq!(cert["witness"]["stage"], n);
        assert_eq!(cert["filtration"]["upper"], n);
    }
}

#[test]
fn bare_names_resolve_in_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = dgq(dir.path(), &["cone-length", "koszul2"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("cone length of K: 2\n"));
    let (code, text) = dgq(dir.path(), &["ghost-length", "koszul1", "--window", "0:8"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("ghost length of K: 1\n"));
    let cert = read_json(&dir.path().join("ghost-length-koszul1-K.json"));
    assert_eq!(cert["settings"]["window"], "0:8");
    assert!(cert["witness"]["map"]["images"].is_object());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dgq(dir.path(), &["validate", "badmodule"]).0, 3);
    let broken = dir.path().join("broken.dgws");
    std::fs::write(&broken, "{ \"algebras\": ").unwrap();
    assert_eq!(dgq(dir.path(), &["validate", broken.to_str().unwrap()]).0, 2);
    assert_eq!(dgq(dir.path(), &["validate", "koszul1", "--field", "fp:x"]).0, 2);
    assert_eq!(dgq(dir.path(), &["no-such-command"]).0, 2);
    assert_eq!(dgq(dir.path(), &["filtration", "acyclic"]).0, 3, "two modules and no --module");
    assert_eq!(dgq(dir.path(), &["catsplit", "projector", "--map", "pi"]).0, 3);
    assert_eq!(dgq(dir.path(), &["cone-length", "koszul2", "--budget-generators", "1"]).0, 5);
    assert_eq!(dgq(dir.path(), &["cone-length", "koszul2", "--window", "0:1"]).0, 5);
    assert_eq!(dgq(dir.path(), &["cohomology", "koszul1", "--max-degree", "2", "--window", "0:6"]).0, 5);
    assert_eq!(dgq(dir.path(), &["validate", "no-such-workspace"]).0, 1);
}

#[test]
fn splitting_commands() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = dgq(dir.path(), &["split", "projector", "--map", "pi"]);
    assert_eq!(code, 0, "{text}");
    let cert = read_json(&dir.path().join("split-projector-pi.json"));
    assert_eq!(cert["module"]["generators"].as_array().unwrap().len(), 2);
    assert_eq!(cert["length"], 1);
    assert_eq!(cert["ambient_length"], 1);

    let (code, _) = dgq(dir.path(), &["catsplit", "catfree", "--map", "pi"]);
    assert_eq!(code, 0);
    let cert = read_json(&dir.path().join("catsplit-catfree-pi.json"));
    assert_eq!(cert["method"], "pairs");
    assert_eq!(cert["pairs"], serde_json::json!([{ "epsilon": "y1", "d_epsilon": "z1" }]));
    for c in cert["beta_checks"].as_array().unwrap() {
        assert_eq!(c["rank"], c["source_dim"]);
        assert_eq!(c["rank"], c["p0_dim"]);
    }
}

#[test]
fn derived_workspaces_reload() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dgq(dir.path(), &["cone", "cones", "--map", "mx"]).0, 0);
    let ws = dir.path().join("cones-cone_mx.dgws");
    let (code, text) = dgq(dir.path(), &["cohomology", ws.to_str().unwrap(), "--module", "cone_mx"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("cohomology of cone_mx on -1:8: H^0 = 1\n"), "{text}");

    assert_eq!(dgq(dir.path(), &["cone", "cones", "--map", "id", "--name", "Cid"]).0, 0);
    let ws = dir.path().join("cones-Cid.dgws");
    let (code, text) = dgq(dir.path(), &["minimize", ws.to_str().unwrap(), "--module", "Cid"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("minimal model of Cid: 0 generators"));

    assert_eq!(dgq(dir.path(), &["sum", "koszul1", "K", "K"]).0, 0);
    let ws = dir.path().join("koszul1-K_plus_K.dgws");
    let (code, text) = dgq(dir.path(), &["level", ws.to_str().unwrap(), "--module", "K_plus_K"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("level of K_plus_K: 2\n"));

    assert_eq!(dgq(dir.path(), &["suspend", "koszul1", "--module", "K", "--shift", "-3", "--name", "S"]).0, 0);
    let ws = dir.path().join("koszul1-S.dgws");
    let (code, text) = dgq(dir.path(), &["cohomology", ws.to_str().unwrap(), "--module", "S", "--window", "0:6"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("cohomology of S on 0:6: H^3 = 1\n"), "{text}");
    assert_eq!(dgq(dir.path(), &["suspend", "koszul1", "--module", "K", "--shift", "1", "--name", "K"]).0, 3);
}

#[test]
fn small_corpus_values() {
    let dir = tempfile::tempdir().unwrap();
    let (_, text) = dgq(dir.path(), &["cohomology", "exterior"]);
    assert!(text.starts_with("cohomology of L on -1:7: H^0 = 1, H^1 = 1\n"), "{text}");
    let (_, text) = dgq(dir.path(), &["level", "exterior"]);
    assert!(text.starts_with("level of L: 1\n"));
    let (_, text) = dgq(dir.path(), &["level", "acyclic", "--module", "B"]);
    assert!(text.starts_with("level of B: 1\n"));
    let (_, text) = dgq(dir.path(), &["level", "acyclic", "--module", "C"]);
    assert!(text.starts_with("level of C: 0\n"));
    let (code, text) = dgq(dir.path(), &["ghost-dim", "acyclic"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("ghost dimension >= 0 (over 2 modules)\n"));
    let (_, text) = dgq(dir.path(), &["filtration", "koszul3"]);
    assert!(text.starts_with("filtration of K: length 3\n"));
}

#[test]
fn every_corpus_file_parses() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("dgws") {
            continue;
        }
        seen += 1;
        let want = if path.file_stem().unwrap() == "badmodule" { 3 } else { 0 };
        assert_eq!(dgq(dir.path(), &["validate", path.to_str().unwrap()]).0, want, "{}", path.display());
    }
    assert!(seen >= 9);
}

#[test]
fn certificates_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 6] = [
        &["level", "koszul2"],
        &["minimize", "acyclic", "--module", "C"],
        &["split", "projector", "--map", "pi"],
        &["catsplit", "catfree", "--map", "pi"],
        &["cone", "cones", "--map", "mx"],
        &["ghost-dim", "koszul3"],
    ];
    for args in runs {
        assert_eq!(dgq(a.path(), args).0, 0);
        assert_eq!(dgq(b.path(), args).0, 0);
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in names {
        let x = std::fs::read(a.path().join(&n)).unwrap();
        let y = std::fs::read(b.path().join(&n)).unwrap();
        assert_eq!(x, y, "{n:?}");
        assert!(!String::from_utf8(x).unwrap().contains(a.path().to_str().unwrap()));
    }
}
