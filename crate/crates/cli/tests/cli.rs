use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn chainmail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainmail"))
        .args(args)
        .output()
        .expect("run chainmail")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn pipeline_p2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p2");
    let o = chainmail(&["pipeline", data("p2.cmg").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("|H1| = 3\n"));
    assert!(report.contains("verdict non-LO"));
    assert_eq!(stdout(&o), report);
    for f in ["trace.txt", "facts.txt", "filled.pres"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn pipeline_rejects_positive_edge_slope() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("triangle.cmg")).unwrap().replacen("slope -1/1", "slope 1/1", 1);
    let g = dir.path().join("bad.cmg");
    fs::write(&g, text).unwrap();
    let o = chainmail(&["pipeline", g.to_str().unwrap(), "-o", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("condition (a)"), "{}", stderr(&o));
    assert!(stderr(&o).contains("edge `e1`"));
}

#[test]
fn pipeline_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = data("k4.cmg");
    let mut outputs = Vec::new();
    for jobs in ["1", "8", "1"] {
        let out = dir.path().join(format!("k4-{}-{jobs}", outputs.len()));
        let o = chainmail(&["pipeline", k4.to_str().unwrap(), "--jobs", jobs, "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let files: Vec<Vec<u8>> = ["trace.txt", "facts.txt", "report.txt", "filled.pres"]
            .iter()
            .map(|f| fs::read(out.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn present_k4() {
    let o = chainmail(&["present", data("k4.cmg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("gen ")).count(), 24);
    assert_eq!(text.lines().filter(|l| l.starts_with("rel ")).count(), 27);
}

#[test]
fn fill_then_h1() {
    let dir = tempfile::tempdir().unwrap();
    let pres = dir.path().join("lens.pres");
    let filled = dir.path().join("lens-filled.pres");
    let o = chainmail(&["present", data("lens.cmg").to_str().unwrap(), "-o", pres.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = chainmail(&["fill", pres.to_str().unwrap(), "v:o", "5/3", "-o", filled.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = chainmail(&["h1", filled.to_str().unwrap()]);
    assert!(stdout(&o).contains("order 5"), "{}", stdout(&o));
    // negative slopes are positional values, not flags
    let o = chainmail(&["fill", pres.to_str().unwrap(), "v:o", "-2/1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // h1 also accepts a graph
    let o = chainmail(&["h1", data("p2.cmg").to_str().unwrap()]);
    assert!(stdout(&o).contains("betti 3"), "{}", stdout(&o));
}

#[test]
fn refute_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let z3 = dir.path().join("z3.pres");
    fs::write(&z3, "gen a\nrel a^3\n").unwrap();
    let o = chainmail(&["refute", z3.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("refutation "));

    let z = dir.path().join("z.pres");
    fs::write(&z, "gen a\n").unwrap();
    let o = chainmail(&["refute", z.to_str().unwrap(), "--radius", "2"]);
    assert_eq!(o.status.code(), Some(4));

    let o = chainmail(&["refute", z.to_str().unwrap(), "--radius", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn refute_filled_p2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p2");
    let o = chainmail(&["pipeline", data("p2.cmg").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cert = dir.path().join("cert.txt");
    let o = chainmail(&[
        "refute",
        out.join("filled.pres").to_str().unwrap(),
        "--radius",
        "4",
        "--conj-len",
        "1",
        "-o",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(cert).unwrap().starts_with("refutation "));
}

#[test]
fn prove_and_glue() {
    let dir = tempfile::tempdir().unwrap();
    let o = chainmail(&["prove", data("triangle.cmg").to_str().unwrap(), "--jobs", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("case ")).count(), 27);

    let pres = dir.path().join("p2.pres");
    let o = chainmail(&["present", data("p2.cmg").to_str().unwrap(), "-o", pres.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let p = pres.to_str().unwrap();
    let o = chainmail(&["glue", p, "v:1", p, "e:e"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("gen ")).count(), 8);
    assert!(text.contains("periph b/v:1 "));
}

#[test]
fn validation_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = chainmail(&["validate", data("k4.cmg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("4 faces"));

    let twisted = fs::read_to_string(data("k4.cmg"))
        .unwrap()
        .replace("rotation 4: e4.t e5.t e6.t", "rotation 4: e4.t e6.t e5.t");
    let g = dir.path().join("twisted.cmg");
    fs::write(&g, twisted).unwrap();
    let o = chainmail(&["validate", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("genus 1"), "{}", stderr(&o));

    let o = chainmail(&["validate", dir.path().join("missing.cmg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let p = data("p2.cmg");
    let o = chainmail(&["present", p.to_str().unwrap(), "-o", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = chainmail(&["prove", data("p2.cmg").to_str().unwrap(), "--jobs", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
