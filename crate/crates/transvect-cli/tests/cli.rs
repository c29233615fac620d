use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use transvect::io::{emit_instance, parse_instance, Generator, Instance, Options, WordRecord};
use transvect::pipeline::random_generators;
use transvect::{GroupSpec, Transvection};

fn transvect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transvect")).args(args).output().expect("binary runs")
}

fn instance(spec: &GroupSpec, seed: u64) -> Instance {
    let gens = random_generators(spec, spec.n, seed, 1_000_000)
        .iter()
        .map(|m| Generator::Transvection(Transvection::from_matrix(&spec.field, m).unwrap()))
        .collect();
    Instance::new(spec.clone(), gens, Options { seed, ..Options::default() })
}

fn write(dir: &std::path::Path, name: &str, inst: &Instance) -> String {
    let path = dir.join(name);
    fs::write(&path, emit_instance(inst)).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn synthesize_emits_report_and_words() {
    let dir = tempfile::tempdir().unwrap();
    let spec = GroupSpec::su(3, 2, 3).unwrap();
    let inst = instance(&spec, 3);
    let input = write(dir.path(), "su33.json", &inst);
    let report = dir.path().join("report.json");
    let words = dir.path().join("words.jsonl");
    let o = transvect(&["synthesize", "--input", &input, "--seed", "3", "--emit", report.to_str().unwrap(), words.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["members"], Value::from(spec.count_transvections()));
    assert_eq!(r["verified"], Value::Bool(true));
    let lines = fs::read_to_string(&words).unwrap();
    assert_eq!(lines.lines().count() as u64, spec.count_transvections());
    let first: WordRecord = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first.length, first.word.len());
    // the instance file survives a parse/emit cycle byte for byte
    let text = fs::read_to_string(&input).unwrap();
    assert_eq!(emit_instance(&parse_instance(&text).unwrap()), text);
}

#[test]
fn classify_graph_and_oracle_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = GroupSpec::sp(3, 1, 4).unwrap();
    let input = write(dir.path(), "sp43.json", &instance(&spec, 1));
    let o = transvect(&["classify", "--input", &input, "--strict"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["family"], "Sp");
    assert_eq!(v["irreducible"], true);
    assert_eq!(v["confirmed_order"], 51840);
    assert_eq!(v["defining_field"]["order"], 3);

    assert_eq!(stdout_json(&transvect(&["oracle", "order", "--input", &input]))["order"], "51840");
    assert_eq!(stdout_json(&transvect(&["oracle", "closure", "--input", &input]))["order"], 51840);
    assert!(stdout_json(&transvect(&["oracle", "diameter", "--input", &input]))["diameter"].as_u64().unwrap() > 0);

    let g = stdout_json(&transvect(&["graph", "--input", &input]));
    assert_eq!(g["vertices"].as_array().unwrap().len(), 4);
    let csv = transvect(&["graph", "--input", &input, "--format", "csv"]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("from,to,label,twoway\n"));
    let dot = transvect(&["graph", "--input", &input, "--format", "dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("bad.json");
    fs::write(&garbage, "{\"group\": 1}").unwrap();
    let o = transvect(&["classify", "--input", garbage.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "Parse");
    assert_eq!(err["exit_code"], 4);

    let missing = dir.path().join("missing.json");
    assert_eq!(transvect(&["graph", "--input", missing.to_str().unwrap()]).status.code(), Some(4));

    // Sp(4,9) is outside the pipeline
    let sp49 = GroupSpec::sp(3, 2, 4).unwrap();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    let gens = (0..4).map(|_| Generator::Transvection(sp49.random_transvection(&mut rng))).collect();
    let path = write(dir.path(), "sp49.json", &Instance::new(sp49, gens, Options::default()));
    assert_eq!(transvect(&["synthesize", "--input", &path]).status.code(), Some(5));

    // reducible generators: hypotheses unmet
    let sl = GroupSpec::sl(3, 1, 3).unwrap();
    let e = |i| transvect::geom::unit_vec(3, i);
    let gens = vec![Generator::Transvection(transvect::trans::tv_make(&sl.field, &e(0), &e(1)).unwrap())];
    let input = write(dir.path(), "red.json", &Instance::new(sl, gens, Options::default()));
    assert_eq!(transvect(&["synthesize", "--input", &input]).status.code(), Some(2));

    // closure cap
    let input = write(dir.path(), "sl33.json", &instance(&GroupSpec::sl(3, 1, 3).unwrap(), 2));
    assert_eq!(transvect(&["oracle", "closure", "--input", &input, "--cap", "10"]).status.code(), Some(3));
}
