use std::path::Path;
use std::process::Command;

fn run(args: &[&str], threads: &str, out: &Path) {
    let o = Command::new(env!("CARGO_BIN_EXE_spar"))
        .args(args)
        .args(["--threads", threads, "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success() || o.status.code() == Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

fn same_files(a: &Path, b: &Path) {
    let mut names: Vec<_> = std::fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap(), "{n:?} differs");
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[model]\nfamily = \"ev_logistic\"\nalpha = 2.0\n[grid]\nangles = 40\nr_count = 7\nxy_count = 9\n[spar]\nlimit_set = true\nsource = \"numeric\"\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    for cmd in ["eval", "spar"] {
        let (a, b) = (dir.path().join(format!("{cmd}1")), dir.path().join(format!("{cmd}4")));
        run(&[cmd, "--config", cfg], "1", &a);
        run(&[cmd, "--config", cfg], "4", &b);
        same_files(&a, &b);
    }
    let (a, b) = (dir.path().join("mc1"), dir.path().join("mc4"));
    run(&["verify", "monte_carlo", "--seed", "7"], "1", &a);
    run(&["verify", "monte_carlo", "--seed", "7"], "4", &b);
    same_files(&a, &b);
}
