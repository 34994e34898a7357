use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regflip")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn field(text: &str, key: &str) -> Option<u64> {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(": ")?.parse().ok())
}

#[test]
fn square_enumeration() {
    let input = data("square.txt");
    let o = run(&["enumerate", "--input", path(&input), "--print", "--stats", "--orbits"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(field(&out, "triangulations"), Some(2));
    assert_eq!(field(&out, "orbits"), Some(1));
    assert_eq!(field(&out, "lps_solved"), Some(0));
    assert!(out.contains(" (2,1,2,1)") && out.contains(" (1,2,1,2)"), "{out}");
}

#[test]
fn regular_and_all_modes() {
    let input = data("nested_triangles.txt");
    let regular = stdout(&run(&["enumerate", "--input", path(&input)]));
    let all = stdout(&run(&["enumerate", "--input", path(&input), "--all"]));
    let baseline = stdout(&run(&["enumerate", "--input", path(&input), "--all", "--baseline"]));
    assert_eq!(field(&regular, "triangulations"), Some(16));
    assert_eq!(field(&all, "triangulations"), Some(18));
    assert_eq!(field(&baseline, "triangulations"), Some(18));
}

#[test]
fn cube_orbits() {
    let input = data("cube3.txt");
    let out = stdout(&run(&["enumerate", "--input", path(&input), "--orbits", "--flip-cache", "0"]));
    assert_eq!(field(&out, "triangulations"), Some(74));
    assert_eq!(field(&out, "orbits"), Some(6));
}

#[test]
fn limit_stops_early() {
    let input = data("delta2x2.txt");
    let out = stdout(&run(&["enumerate", "--input", path(&input), "--limit", "10"]));
    assert_eq!(field(&out, "triangulations"), Some(10));
    assert!(out.contains("stopped: limit"));
}

#[test]
fn regularity_verdicts() {
    let o = run(&[
        "regular",
        "--input",
        path(&data("square.txt")),
        "--triangulation",
        path(&data("square_diagonal.tri")),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("regular"));
    assert!(stdout(&o).contains("heights: ("));

    let o = run(&[
        "regular",
        "--input",
        path(&data("nested_triangles.txt")),
        "--triangulation",
        path(&data("nested_pinwheel.tri")),
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("non-regular\ncertificate:\n"), "{out}");
    assert!(out.lines().skip(2).count() >= 1);
}

#[test]
fn flip_listing() {
    let dir = TempDir::new().unwrap();
    let coarse = write(&dir, "coarse.tri", "{{0,1,2}}\n");
    let o = run(&["flips", "--input", path(&data("triangle_interior.txt")), "--triangulation", &coarse]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "{3}|{}|{0,1,2} (-3,-3,-3,9) regular");

    let o = run(&[
        "flips",
        "--input",
        path(&data("square.txt")),
        "--triangulation",
        path(&data("square_diagonal.tri")),
    ]);
    assert_eq!(stdout(&o).trim(), "{1,3}|{}|{0,2} (-1,1,-1,1) regular");

    let simplex = write(&dir, "simplex.txt", "points: [[0,0],[1,0],[0,1]]\n");
    let o = run(&["flips", "--input", &simplex, "--triangulation", &coarse]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let duplicate = write(&dir, "dup.txt", "points: [[0,0],[1,0],[0,1],[1,0]]\n");
    let malformed = write(&dir, "bad.txt", "# header\npoints: [[0,0],\n  [1,x]]\n");
    let bad_perm = write(&dir, "perm.txt", "points: [[0,0],[1,0],[1,1],[0,1]]\nsymmetry: [[1,0,2,3]]\n");
    let short = write(&dir, "short.tri", "{{0,1,2}}\n");
    let square = data("square.txt");

    let o = run(&["enumerate", "--input", &duplicate]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let o = run(&["enumerate", "--input", &malformed]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":3:6:"), "{}", stderr(&o));

    let o = run(&["enumerate", "--input", &bad_perm, "--orbits"]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(&["regular", "--input", path(&square), "--triangulation", &short]);
    assert_eq!(o.status.code(), Some(3));

    assert_eq!(run(&["enumerate"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["enumerate", "--input", path(&square), "--all", "--regular"]).status.code(), Some(1));
    assert_eq!(run(&["enumerate", "--input", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let o = run(&["enumerate", "--input", path(&square), "--baseline", "--all", "--max-nodes", "1"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn printed_triangulations_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = data("cube3.txt");
    let first = stdout(&run(&["enumerate", "--input", path(&input), "--print"]));
    let second = stdout(&run(&["enumerate", "--input", path(&input), "--print"]));
    assert_eq!(first, second);
    for line in first.lines().filter(|l| l.starts_with('{')).step_by(9) {
        let (t, g) = line.split_once(' ').unwrap();
        let file = write(&dir, "t.tri", t);
        let o = run(&["regular", "--input", path(&input), "--triangulation", &file]);
        assert!(o.status.success(), "{t}: {}", stderr(&o));
        assert_eq!(stdout(&o).lines().next(), Some("regular"));
        assert!(g.starts_with('(') && g.ends_with(')'));
    }
}
