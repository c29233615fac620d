use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use transvect::graph::build_graph;
use transvect::io::{emit_instance, emit_words, graph_csv, graph_dot, graph_json, parse_instance, Generator, Instance, Options, WordRecord};
use transvect::pipeline::{random_generators, synthesize, SynthesisOptions};
use transvect::{Error, Fe, GroupSpec, Transvection};

const SP43: &str = r#"{
  "group": {"family": "sp", "n": 4, "field": {"p": 3, "k": 1}},
  "generators": [
    {"u": [[1],[0],[0],[0]], "phi": [[0],[1],[0],[0]]},
    {"u": [0,1,0,0], "phi": [2,0,0,0]},
    {"matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,1],[0,0,0,1]]}
  ]
}"#;

#[test]
fn parses_hand_written_instance() {
    let inst = parse_instance(SP43).unwrap();
    assert_eq!(inst.spec.family, transvect::Family::Sp);
    assert_eq!(inst.generators.len(), 3);
    assert_eq!(inst.options, Options::default());
    // packed and array encodings agree
    match (&inst.generators[0], &inst.generators[1]) {
        (Generator::Transvection(a), Generator::Transvection(b)) => {
            assert_eq!(a.u, vec![Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO]);
            assert_eq!(b.phi[0], Fe(2));
        }
        _ => panic!("expected transvections"),
    }
    assert_eq!(inst.transvections().len(), 3);
}

#[test]
fn emitted_files_carry_the_field() {
    let inst = parse_instance(SP43).unwrap();
    let text = emit_instance(&inst);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["group"]["field"]["modulus"], serde_json::json!([0, 1]));
    assert_eq!(v["group"]["field"]["q0"], serde_json::json!(3));
    assert_eq!(v["group"]["gram"][0][1], serde_json::json!([1]));
    assert_eq!(parse_instance(&text).unwrap(), inst);
    assert_eq!(emit_instance(&parse_instance(&text).unwrap()), text);
}

#[test]
fn unitary_header() {
    let text = r#"{"group": {"family": "su", "n": 3, "field": {"p": 3, "k": 2, "modulus": [2,2,1], "q0": 3}}, "generators": []}"#;
    let inst = parse_instance(text).unwrap();
    assert_eq!(inst.spec.q0(), 3);
    let bad = text.replace("\"q0\": 3", "\"q0\": 9");
    assert!(matches!(parse_instance(&bad), Err(Error::Parse(_))));
}

#[test]
fn rejects_malformed_input() {
    let cases = [
        "not json",
        r#"{"group": {"family": "gl", "n": 3, "field": {"p": 3, "k": 1}}, "generators": []}"#,
        r#"{"group": {"family": "sl", "n": 3, "field": {"p": 3, "k": 1}}, "generators": [{"u": [1,0,0], "phi": [0,1]}]}"#,
        r#"{"group": {"family": "sl", "n": 3, "field": {"p": 3, "k": 1}}, "generators": [{"u": [1,0,0], "phi": [0,7,0]}]}"#,
        r#"{"group": {"family": "sl", "n": 3, "field": {"p": 3, "k": 2}}, "generators": [{"u": [[1,0],[0,0],[0]], "phi": [0,1,0]}]}"#,
        r#"{"group": {"family": "sl", "n": 3, "field": {"p": 3, "k": 1}}, "generators": [{"u": [1,0,0], "phi": [1,0,0]}]}"#,
        r#"{"group": {"family": "sl", "n": 3, "field": {"p": 4, "k": 1}}, "generators": []}"#,
        r#"{"group": {"family": "sp", "n": 3, "field": {"p": 3, "k": 1}}, "generators": []}"#,
    ];
    for c in cases {
        assert!(parse_instance(c).is_err(), "{c}");
    }
}

#[test]
fn word_records_evaluate() {
    let spec = GroupSpec::su(3, 2, 3).unwrap();
    let x = random_generators(&spec, 3, 2, 1_000_000);
    let gs = synthesize(&spec, &x, &SynthesisOptions::default()).unwrap();
    let text = emit_words(&gs);
    let f = &spec.field;
    let inst = Instance::new(spec.clone(), Vec::new(), Options::default());
    let mut n = 0;
    for line in text.lines() {
        let r: WordRecord = serde_json::from_str(line).unwrap();
        assert_eq!(r.length, r.word.len());
        let mut file = inst.to_file();
        file.generators = vec![transvect::io::GeneratorRecord::Transvection { u: r.target.u.clone(), phi: r.target.phi.clone() }];
        let t: Transvection = Instance::from_file(&file).unwrap().transvections().remove(0);
        assert_eq!(gs.eval(&r.word), t.matrix(f));
        n += 1;
    }
    assert_eq!(n as u64, spec.count_transvections());
}

#[test]
fn graph_exports() {
    let spec = GroupSpec::sp(3, 1, 4).unwrap();
    let ts: Vec<Transvection> = spec.all_transvections().into_iter().take(6).collect();
    let g = build_graph(&spec.field, &ts);
    let edges: usize = (0..g.len()).map(|s| g.out_neighbors(s).len()).sum();
    let v: serde_json::Value = serde_json::from_str(&graph_json(&g)).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(v["edges"].as_array().unwrap().len(), edges);
    let csv = graph_csv(&g);
    assert_eq!(csv.lines().next(), Some("from,to,label,twoway"));
    assert_eq!(csv.lines().count(), edges + 1);
    // every symplectic edge is two-way, drawn once
    let dot = graph_dot(&g);
    assert_eq!(dot.matches("dir=none").count(), edges / 2);
}

proptest! {
    #[test]
    fn instance_round_trip(seed in any::<u64>(), which in 0usize..3, count in 0usize..5, budget in 1usize..1000) {
        let spec = [GroupSpec::sl(5, 2, 3), GroupSpec::sp(3, 1, 4), GroupSpec::su(3, 2, 3)][which].clone().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gens = Vec::new();
        for i in 0..count {
            let t = spec.random_transvection(&mut rng);
            gens.push(if i % 2 == 0 { Generator::Transvection(t) } else { Generator::Matrix(t.matrix(&spec.field)) });
        }
        let inst = Instance::new(spec, gens, Options { seed, budget, cap: 10, strict: seed % 2 == 0 });
        let text = emit_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }
}
