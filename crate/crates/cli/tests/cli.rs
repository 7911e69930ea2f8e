use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

struct Parsed {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    footer: Vec<(String, String)>,
}

impl Parsed {
    fn note(&self, key: &str) -> f64 {
        let (_, v) = self.footer.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no footer {key}"));
        v.parse().unwrap_or_else(|_| panic!("footer {key} = {v} is not a number"))
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }
}

fn parse(text: &str) -> Parsed {
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let header = lines.next().expect("header").split(',').map(String::from).collect();
    let (mut rows, mut footer) = (Vec::new(), Vec::new());
    for line in lines {
        match line.strip_prefix("# ") {
            Some(note) => {
                let (k, v) = note.split_once(" = ").expect("key = value footer");
                footer.push((k.to_string(), v.to_string()));
            }
            None => rows.push(line.split(',').map(String::from).collect()),
        }
    }
    Parsed { header, rows, footer }
}

fn lnsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lnsum")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Parsed {
    let out = lnsum(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    parse(&String::from_utf8(out.stdout).unwrap())
}

fn model(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn malformed_model_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let out_file = dir.path().join("out.csv");
    for text in ["mu=0 sigma=-1\n", "mu=0\n", "mu=zero sigma=1\n", "", "kappa=1 sigma=1\n"] {
        let m = model(&dir, "bad.txt", text);
        let out = lnsum(&["invert", "--model", s(&m), "--out", s(&out_file)]);
        assert_eq!(out.status.code(), Some(2), "{text:?}");
        assert!(!out_file.exists());
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    }
    let out = lnsum(&["invert", "--model", s(&dir.path().join("missing.txt"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_options_exit_2() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "mu=0 sigma=1\n");
    assert_eq!(lnsum(&["invert", "--model", s(&m), "--method", "talbot"]).status.code(), Some(2));
    assert_eq!(lnsum(&["transform", "--model", s(&m), "--engine", "holgate", "--axis", "s"]).status.code(), Some(2));
    assert_eq!(lnsum(&["invert", "--model", s(&m), "--grid-min", "2", "--grid-max", "1"]).status.code(), Some(2));
    assert_eq!(lnsum(&["compare", "--model", s(&m), "--method", "davies"]).status.code(), Some(2));
}

#[test]
fn transform_at_origin_is_one() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "mu=0.4 sigma=1.3\nmu=-1 sigma=0.2\n");
    for axis in ["s", "omega"] {
        let t = ok(&["transform", "--model", s(&m), "--axis", axis, "--grid-min", "0", "--grid-max", "0", "--grid-count", "1"]);
        assert_eq!(t.header, [if axis == "s" { "s" } else { "omega" }, "re", "im", "engine"]);
        assert_eq!(t.column("re"), [1.0]);
        assert_eq!(t.column("im"), [0.0]);
    }
}

#[test]
fn engine_comparison_agrees_on_the_real_axis() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "mu=0 sigma=1\n");
    let t = ok(&["transform", "--model", s(&m), "--engine", "gh,reduced_range"]);
    assert_eq!(t.header, ["s", "gh_re", "gh_im", "reduced_range_re", "reduced_range_im"]);
    assert!(t.note("max_abs_diff gh vs reduced_range") <= 1e-5);
}

#[test]
fn davies_matches_closed_form_for_unit_sigma() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "mu=0 sigma=1\n");
    let t = ok(&["invert", "--model", s(&m), "--method", "davies"]);
    assert_eq!(t.header, ["x", "cdf", "pdf", "cdf_raw"]);
    assert!(t.note("max_abs_cdf_error") <= 1e-3);
    assert!(t.column("cdf").iter().all(|f| (0.0..=1.0).contains(f)));
}

#[test]
fn stehfest_density_at_one() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "mu=0 sigma=1\n");
    let t = ok(&["invert", "--model", s(&m), "--method", "gaver", "--N", "12", "--grid-min", "1", "--grid-max", "1", "--grid-count", "1"]);
    let want = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    assert!((t.column("pdf")[0] - want).abs() <= 1e-2);
}

#[test]
fn arctan_fit_for_wide_component() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "mu=0 sigma=2\n");
    let t = ok(&["invert", "--model", s(&m), "--method", "arctan", "--K", "8"]);
    assert!(t.note("max_abs_cdf_error") <= 0.05);
}

#[test]
fn compare_is_deterministic_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "mu=0 sigma=0.5\nmu=0.3 sigma=1\n");
    let args = ["compare", "--model", s(&m), "--method", "davies,gaver", "--samples", "20000", "--seed", "11"];
    let (a, b) = (ok(&args), ok(&args));
    assert_eq!(a.header, ["method", "max_abs_error", "mean_abs_error", "ks_distance"]);
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.rows.len(), 2);
    assert!(a.rows.iter().all(|r| r[1].parse::<f64>().unwrap() < 0.05));
}

#[test]
fn figure_one_crossings() {
    let t = ok(&["figures", "1"]);
    for (k, v) in &t.footer {
        if k.starts_with("mgf crossing") {
            let x: f64 = v.parse().unwrap();
            assert!((0.3..=1.0).contains(&x), "{k} = {x}");
        }
    }
    assert_eq!(t.header.len(), 10);
}

#[test]
fn figure_six_fit_quality() {
    let t = ok(&["figures", "6"]);
    assert!(t.note("max_abs_difference") <= 0.05);
}

#[test]
fn invalid_figure_id_exits_2() {
    for id in ["0", "7"] {
        assert_eq!(lnsum(&["figures", id]).status.code(), Some(2));
    }
}

#[test]
fn file_output_round_trips() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "# one wide component\nmu = 0.2, sigma = 0.8\n");
    let out_file = dir.path().join("out.csv");
    let args = ["invert", "--model", s(&m), "--method", "gaver", "--grid-count", "7"];
    let stdout = ok(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", s(&out_file)]);
    let out = lnsum(&with_out);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = parse(&std::fs::read_to_string(&out_file).unwrap());
    assert_eq!(written.rows, stdout.rows);
    assert_eq!(written.footer, stdout.footer);
}

#[test]
fn segments_and_samples() {
    let dir = TempDir::new().unwrap();
    let m = model(&dir, "m.txt", "mu=0 sigma=1\n");
    let t = ok(&["segments", "--model", s(&m), "--segments", "3", "--K", "4"]);
    let kinds: Vec<&str> = t.rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(kinds, ["segment", "segment", "segment", "tail", "term", "term", "term", "term"]);
    let mc = ok(&["mc", "--model", s(&m), "--samples", "500", "--seed", "2"]);
    assert_eq!(mc.header, ["x"]);
    assert_eq!(mc.rows.len(), 500);
    assert_eq!(mc.rows, ok(&["mc", "--model", s(&m), "--samples", "500", "--seed", "2"]).rows);
}
