use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cnot_steiner::arch::Architecture;
use cnot_steiner::circuit::{from_circuit, is_mapped, parse_qasm};
use cnot_steiner::gf2::ParityMatrix;
use cnot_steiner::placement::{apply_placement, Placement};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnot-steiner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_program(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n{body}")).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn gen_writes_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = run(&[
            "gen",
            "-n",
            "9",
            "--count",
            "3",
            "--samples",
            "20",
            "--seed",
            "5",
            "--out-dir",
            path(d),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut names: Vec<String> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 20);
    assert!(names.contains(&"rand_n9_g3_s19.qasm".to_string()));
    for name in &names {
        let text = fs::read_to_string(a.join(name)).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("cx ")).count(), 3);
        assert_eq!(text, fs::read_to_string(b.join(name)).unwrap());
    }

    let big = dir.path().join("big");
    let out = run(&[
        "gen",
        "-n",
        "16",
        "--count",
        "256",
        "--samples",
        "1",
        "--out-dir",
        path(&big),
    ]);
    assert_eq!(code(&out), 0);
    let c = parse_qasm(&fs::read_to_string(big.join("rand_n16_g256_s0.qasm")).unwrap()).unwrap();
    assert_eq!((c.n(), c.count_cnots()), (16, 256));
}

#[test]
fn route_is_verified_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let gen_dir = dir.path().join("in");
    assert_eq!(
        code(&run(&[
            "gen",
            "-n",
            "9",
            "--count",
            "20",
            "--samples",
            "1",
            "--seed",
            "2",
            "--out-dir",
            path(&gen_dir)
        ])),
        0
    );
    let input = gen_dir.join("rand_n9_g20_s0.qasm");

    let mut outputs = Vec::new();
    for i in 0..2 {
        let out_file = dir.path().join(format!("out{i}.qasm"));
        let out = run(&[
            "route",
            path(&input),
            "--arch",
            "square-9",
            "--seed",
            "7",
            "-o",
            path(&out_file),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let stats: Value = serde_json::from_slice(&out.stdout).unwrap();
        outputs.push((fs::read(&out_file).unwrap(), stats));
    }
    assert_eq!(outputs[0], outputs[1]);

    let (bytes, stats) = &outputs[0];
    let routed = parse_qasm(std::str::from_utf8(bytes).unwrap()).unwrap();
    let original = parse_qasm(&fs::read_to_string(&input).unwrap()).unwrap();
    let a = Architecture::builtin("square-9").unwrap();
    assert!(is_mapped(&routed, &a));
    let perm: Vec<usize> = serde_json::from_value(stats["placement"].clone()).unwrap();
    let expected = apply_placement(&from_circuit(&original).unwrap(), &Placement::new(perm).unwrap()).unwrap();
    assert_eq!(from_circuit(&routed).unwrap(), expected);
    assert_eq!(stats["input_cnots"], 20);
    assert_eq!(stats["output_cnots"].as_u64().unwrap() as usize, routed.count_cnots());
    assert_eq!(stats["seed"], 7);
    let overhead = stats["overhead_percent"].as_f64().unwrap();
    assert!((overhead - 100.0 * (routed.count_cnots() as f64 - 20.0) / 20.0).abs() < 1e-9);
}

#[test]
fn route_identity_equivalent_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_program(dir.path(), "id.qasm", "qreg q[9];\ncx q[0],q[8];\ncx q[0],q[8];\n");
    let out = run(&["route", &input, "--arch", "square-9", "--no-placement"]);
    assert_eq!(code(&out), 0);
    let routed = parse_qasm(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(routed.is_empty());
    let stats: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(stats["output_cnots"], 0);
    assert_eq!(stats["placement"], serde_json::json!([0, 1, 2, 3, 4, 5, 6, 7, 8]));
}

#[test]
fn route_phase_polynomial_and_custom_arch() {
    let dir = tempfile::tempdir().unwrap();
    let arch = dir.path().join("line4.json");
    fs::write(
        &arch,
        r#"{"name": "line-4", "n": 4, "edges": [[0, 1], [1, 2], [2, 3]], "hamiltonian_path": [0, 1, 2, 3]}"#,
    )
    .unwrap();
    let body = "qreg q[4];\nrz(pi/4) q[0];\ncx q[0],q[3];\nrz(0.3) q[3];\ncx q[1],q[2];\nrz(-pi/8) q[2];\n";
    let input = write_program(dir.path(), "pp.qasm", body);
    let out_file = dir.path().join("out.qasm");

    let out = run(&["route", &input, "--arch-json", path(&arch), "--seed", "1"]);
    assert_eq!(code(&out), 2, "Rz input needs --phasepoly");

    let out = run(&[
        "route",
        &input,
        "--arch-json",
        path(&arch),
        "--phasepoly",
        "--population",
        "6",
        "--iterations",
        "3",
        "-o",
        path(&out_file),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let routed = parse_qasm(&fs::read_to_string(&out_file).unwrap()).unwrap();
    let line = Architecture::line(4);
    assert!(is_mapped(&routed, &line));
}

#[test]
fn bench_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = run(&[
        "bench",
        "--arch",
        "square-9",
        "--counts",
        "0,10",
        "--samples",
        "2",
        "--seed",
        "3",
        "--csv-out",
        path(&csv),
        "--explain",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("102"));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "architecture,input_cnots,samples,mean_output_cnots,overhead_percent,seed"
    );
    assert_eq!(lines[1], "square-9,0,2,0.0000,0.0000,3");
    assert!(lines[2].starts_with("square-9,10,2,"));
    assert_eq!(lines.len(), 3);

    let again = run(&[
        "bench",
        "--arch",
        "square-9",
        "--counts",
        "0,10",
        "--samples",
        "2",
        "--seed",
        "3",
    ]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);

    let unconstrained = run(&[
        "bench",
        "--arch",
        "square-9",
        "--counts",
        "10",
        "--samples",
        "2",
        "--unconstrained",
        "--no-placement",
    ]);
    assert_eq!(code(&unconstrained), 0);
}

#[test]
fn synth_matrix_to_qasm() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    let matrix = ParityMatrix::from_bits(&[[1, 0, 1], [0, 1, 0], [1, 1, 0]]).unwrap();
    fs::write(&m, matrix.to_string()).unwrap();
    let line = dir.path().join("line.json");
    fs::write(&line, Architecture::line(3).to_json()).unwrap();
    let out = run(&["synth", path(&m), "--arch-json", path(&line)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let c = parse_qasm(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(from_circuit(&c).unwrap(), matrix);
    assert!(is_mapped(&c, &Architecture::line(3)));

    fs::write(&m, "1 1\n1 1\n").unwrap();
    let two = dir.path().join("two.json");
    fs::write(&two, Architecture::line(2).to_json()).unwrap();
    assert_eq!(code(&run(&["synth", path(&m), "--arch-json", path(&two)])), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["route"])), 1);
    assert_eq!(code(&run(&["bench", "--arch", "nowhere-7"])), 1);
    assert_eq!(code(&run(&["bench", "--arch", "square-9", "--crossover", "1.5"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);

    let bad = write_program(dir.path(), "bad.qasm", "qreg q[2];\ncreg c[2];\n");
    assert_eq!(code(&run(&["route", &bad, "--arch", "square-9"])), 2);
    let wide = write_program(dir.path(), "wide.qasm", "qreg q[12];\ncx q[0],q[11];\n");
    assert_eq!(code(&run(&["route", &wide, "--arch", "square-9"])), 2);
    let json = dir.path().join("broken.json");
    fs::write(&json, "{\"name\": 3}").unwrap();
    assert_eq!(code(&run(&["synth", &bad, "--arch-json", path(&json)])), 2);
    let m = dir.path().join("m.txt");
    fs::write(&m, "1 2\n0 1\n").unwrap();
    assert_eq!(code(&run(&["synth", path(&m), "--arch", "square-9"])), 2);
}
