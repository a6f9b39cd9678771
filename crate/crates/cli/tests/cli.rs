use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_padic-polylog"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_dirac_passes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.txt", "prime 3\nprecision 4\norders 6 6\ndirac 1 1 1\n");
    let o = run(&["verify", "--input", &input, "--level", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# p=3 M=4 M_eff=4 N=6,6\n"));
    assert!(text.lines().last().unwrap().starts_with("PASS"));
}

#[test]
fn moments_of_a_point_mass() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.txt", "dirac 2 3 1\n");
    let o = run(&["moments", "--input", &input, "--prime", "5", "--precision", "2", "--orders", "4,4", "--level", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "1 2 18"));
}

#[test]
fn restriction_drops_masses_on_p_zp() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.txt", "prime 3\nprecision 3\norders 4\ndirac 1 1\ndirac 3 1\n");
    let out = dir.path().join("out.txt");
    let o = run(&["restrict", "--input", &input, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(out).unwrap(), "# p=3 M=3 M_eff=3 N=4\n0 1\n1 1\n");
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.txt", "prime 3\nprecision 3\norders 4\ndirac 1 1\n");
    let o = run(&["amice", "--input", &input, "--prime", "5", "--precision", "2"]);
    assert!(stdout(&o).starts_with("# p=5 M=2 "));
}

#[test]
fn output_does_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.txt", "prime 3\nprecision 4\norders 6 6\ndirac 1 2 1\ndirac 2 5 2\ndirac 4 1 7\n");
    for cmd in ["polylog", "verify"] {
        let outs: Vec<String> = [1, 2, 5]
            .iter()
            .map(|w| stdout(&run(&[cmd, "--input", &input, "--level", "3", "--workers", &w.to_string()])))
            .collect();
        assert!(outs.iter().all(|o| o == &outs[0]), "{cmd} differs across worker counts");
    }
}

#[test]
fn poly_q_ring_from_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.txt", "prime 3\nprecision 2\norders 2\ndirac 1 0,1\n");
    let o = run(&["amice", "--input", &input, "--ring", "poly-q:2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "# p=3 M=2 M_eff=2 N=2\n0 1 1\n1 1 1\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.txt", "prime 3\nprecision 3\norders 4 4\ndirac 1 1 1\n");
    let missing = run(&["verify", "--input", &ok]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("level"));
    assert_eq!(run(&["amice", "--input", &ok, "--prime", "4"]).status.code(), Some(2));
    assert_eq!(run(&["amice", "--input", &ok, "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["amice", "--input", &ok, "--workers", "0"]).status.code(), Some(2));
    assert_eq!(run(&["amice"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.txt", "prime 3\nprecision 3\norders 4\ndirac one 1\n");
    assert_eq!(run(&["amice", "--input", &bad]).status.code(), Some(3));
    let mixed = write(dir.path(), "mixed.txt", "prime 3\nprecision 3\norders 4\ndirac 1 1,1\n");
    assert_eq!(run(&["amice", "--input", &mixed]).status.code(), Some(3));
    let arity = write(dir.path(), "arity.txt", "prime 3\nprecision 3\norders 4 4\ncoeff 1 1\n");
    assert_eq!(run(&["amice", "--input", &arity]).status.code(), Some(3));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("PASS"));
}
