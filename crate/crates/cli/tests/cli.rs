use std::path::Path;
use std::process::Command;

fn gibbsmps(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gibbsmps")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn write_config(dir: &Path, betas: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(
        &p,
        format!(
            "[model]\nkind = tfim\nlattice = chain 3\nh = 0.5\n[ansatz]\nn_ancilla = 1\nlayers = 1\n\
             [objective]\nbetas = {betas}\n[optimizer]\nmax_iter = 150\nrestarts = 2\n\
             [measurement]\nshots = 1000\n[oracle]\nsources = dense_ed bdg\n[output]\ndir = {}\n",
            dir.join("out").display()
        ),
    )
    .unwrap();
    p.display().to_string()
}

#[test]
fn full_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "0 2");
    for verb in ["prepare", "measure", "oracle"] {
        let o = gibbsmps(&[verb, "--config", &cfg, "--threads", "2"]);
        assert!(o.status.success(), "{verb}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = gibbsmps(&["plotdata", "--config", &cfg]);
    assert!(o.status.success());
    assert!(dir.path().join("out/plots/energy.csv").exists());
    let prep = std::fs::read_to_string(dir.path().join("out/prep.jsonl")).unwrap();
    assert_eq!(prep.lines().count(), 2);
    assert!(prep.lines().all(|l| l.contains("\"schema_version\":1")));
}

#[test]
fn seed_override_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "1");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = gibbsmps(&["prepare", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "42"]);
        assert!(o.status.success());
    }
    let ra = std::fs::read_to_string(a.join("prep.jsonl")).unwrap();
    assert_eq!(ra, std::fs::read_to_string(b.join("prep.jsonl")).unwrap());
    assert!(ra.contains("\"seed\":42"));
}

#[test]
fn errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[model]\nkind = tfim\nlattice = ring 4\n").unwrap();
    let o = gibbsmps(&["prepare", "--config", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let cfg = write_config(dir.path(), "1");
    let o = gibbsmps(&["measure", "--config", &cfg]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("beta = 1"));
}

#[test]
fn bundled_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in std::fs::read_dir(root).unwrap() {
        let p = entry.unwrap().path();
        gibbsmps::experiment::ExperimentConfig::read_file(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
