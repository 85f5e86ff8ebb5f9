use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hgsp::{io, Spectrum};
use nalgebra::{DMatrix, DVector};
use tempfile::TempDir;

const FIG7B: &str = r#"{"format_version": 1, "num_nodes": 7, "hyperedges": [[1, 4, 6], [2, 3], [5, 6, 7]]}"#;

fn hgsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgsp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value of `key=...` in the output.
fn metric(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_owned))
        .unwrap_or_else(|| panic!("no {key} in {:?}", stdout(o)))
}

struct Work(TempDir);

impl Work {
    fn new() -> Self {
        Self(TempDir::new().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    }

    fn p(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_owned()
    }

    fn spectrum(&self, hypergraph: &str) -> Spectrum {
        let h = self.write("h.json", hypergraph);
        let o = hgsp(&["spectrum", "--hypergraph", &h, "--output", &self.p("spec.json")]);
        assert!(o.status.success(), "{}", stderr(&o));
        read_spectrum(&self.path("spec.json"))
    }
}

fn read_spectrum(p: &Path) -> Spectrum {
    io::parse_spectrum(&fs::read_to_string(p).unwrap()).unwrap()
}

fn read_signal(p: &Path) -> DVector<f64> {
    io::parse_signal(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn leading_component_has_zero_variation() {
    let w = Work::new();
    w.spectrum(FIG7B);
    let o = hgsp(&["tv", "--spectrum", &w.p("spec.json"), "--component", "1"]);
    assert!(o.status.success());
    assert_eq!(metric(&o, "tv"), "0");
}

#[test]
fn transform_inverse_round_trip_for_even_order() {
    let w = Work::new();
    let hg = r#"{"format_version": 1, "num_nodes": 6, "hyperedges": [[1, 2, 3, 4], [3, 4, 5, 6], [1, 2], [2, 5, 6]]}"#;
    let sp = w.spectrum(hg);
    assert_eq!(sp.order(), 4);
    let s = DVector::from_vec(vec![0.5, -1.25, 2.0, 3.5, -0.75, 1.0]);
    let sig = w.write("s.txt", &io::format_signal(&s));
    let spec = w.p("spec.json");
    let o = hgsp(&["transform", "--spectrum", &spec, "--signal", &sig, "--output", &w.p("t.txt")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = hgsp(&["inverse", "--spectrum", &spec, "--signal", &w.p("t.txt"), "--output", &w.p("back.txt")]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((read_signal(&w.path("back.txt")) - s).amax() <= 1e-10);
}

#[test]
fn lossless_compression_of_three_band_signal() {
    let w = Work::new();
    let sp = w.spectrum(FIG7B);
    let c = DVector::from_vec(vec![1.5, -0.5, 2.0]);
    let s = sp.basis().rows(0, 3).tr_mul(&c);
    let sig = w.write("s.txt", &io::format_signal(&s));
    let spec = w.p("spec.json");
    let o = hgsp(&["compress", "--lossless", "--spectrum", &spec, "--signal", &sig, "--output", &w.p("c.json")]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(metric(&o, "k"), "3");
    assert!(metric(&o, "cr").starts_with("2.3333"));
    let o = hgsp(&["decompress", "--spectrum", &spec, "--compressed", &w.p("c.json"), "--output", &w.p("d.txt")]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((read_signal(&w.path("d.txt")) - s).amax() <= 1e-10);
}

#[test]
fn sample_and_reconstruct_bandlimited_signal() {
    let w = Work::new();
    let sp = w.spectrum(FIG7B);
    let s = sp.basis().rows(0, 2).tr_mul(&DVector::from_vec(vec![1.0, -2.0]));
    let sig = w.write("s.txt", &io::format_signal(&s));
    let spec = w.p("spec.json");
    let o = hgsp(&[
        "sample", "--spectrum", &spec, "--k", "2", "--q", "3", "--plan", &w.p("plan.json"), "--signal", &sig,
        "--output", &w.p("sq.txt"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(metric(&o, "indices").split(',').count(), 3);
    let o = hgsp(&[
        "reconstruct", "--spectrum", &spec, "--plan", &w.p("plan.json"), "--signal", &w.p("sq.txt"), "--output",
        &w.p("rec.txt"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((read_signal(&w.path("rec.txt")) - s).amax() <= 1e-10);
}

#[test]
fn filter_and_denoise_run() {
    let w = Work::new();
    let sp = w.spectrum(FIG7B);
    let f1 = sp.basis_vector(0);
    let sig = w.write("s.txt", &io::format_signal(&f1));
    let spec = w.p("spec.json");
    // identity filter
    let o = hgsp(&["filter", "--spectrum", &spec, "--signal", &sig, "--coeffs", "1,0,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((io::parse_signal(&stdout(&o)).unwrap() - &f1).amax() <= 1e-12);
    let o = hgsp(&[
        "denoise", "--spectrum", &spec, "--signal", &sig, "--gamma", "5", "--output", &w.p("d.txt"), "--curve",
        &w.p("curve.csv"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(metric(&o, "gamma"), "5");
    assert!((read_signal(&w.path("d.txt")) - &f1).amax() <= 1e-10);
    assert!(fs::read_to_string(w.path("curve.csv")).unwrap().starts_with("gamma,score\n5,"));
}

#[test]
fn cluster_and_classify_two_cliques() {
    let w = Work::new();
    let mut edges = Vec::new();
    for block in [[1, 2, 3, 4], [5, 6, 7, 8]] {
        for a in 0..4 {
            for b in a + 1..4 {
                for c in b + 1..4 {
                    edges.push(format!("[{}, {}, {}]", block[a], block[b], block[c]));
                }
            }
        }
    }
    let hg = format!(r#"{{"format_version": 1, "num_nodes": 8, "hyperedges": [{}]}}"#, edges.join(", "));
    w.spectrum(&hg);
    let spec = w.p("spec.json");
    let o = hgsp(&["cluster", "--spectrum", &spec, "--k", "2", "--output", &w.p("c.txt")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ids = fs::read_to_string(w.path("c.txt")).unwrap();
    assert_eq!(ids, "1\n1\n1\n1\n2\n2\n2\n2\n");
    let labels = w.write("l.txt", "1\n0\n0\n0\n-1\n0\n0\n0\n");
    let o = hgsp(&["classify", "--spectrum", &spec, "--labels", &labels, "--output", &w.p("p.txt")]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(metric(&o, "training_fit"), "2");
    let pred = io::parse_labels(&fs::read_to_string(w.path("p.txt")).unwrap()).unwrap();
    assert_eq!(pred, vec![1, 1, 1, 1, -1, -1, -1, -1]);
}

#[test]
fn build_hypergraph_from_csv() {
    let w = Work::new();
    let csv = w.write("zoo.csv", "id,x,y,kind\na,0,0,cat\nb,0,1,cat\nc,10,10,dog\nd,10,11,dog\n");
    let o = hgsp(&[
        "build-hypergraph", "--features", &csv, "--m", "2", "--label-column", "kind", "--output", &w.p("h.json"),
        "--labels-output", &w.p("l.txt"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(metric(&o, "nodes"), "4");
    let h = io::parse_hypergraph(&fs::read_to_string(w.path("h.json")).unwrap()).unwrap();
    assert_eq!(h.edges(), &[vec![0, 1], vec![2, 3]]);
    assert_eq!(fs::read_to_string(w.path("l.txt")).unwrap(), "1\n1\n-1\n-1\n");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let w = Work::new();
    w.spectrum(FIG7B);
    let first = fs::read(w.path("spec.json")).unwrap();
    w.spectrum(FIG7B);
    assert_eq!(first, fs::read(w.path("spec.json")).unwrap());
}

#[test]
fn validation_errors_exit_one_with_one_line() {
    let w = Work::new();
    w.spectrum(FIG7B);
    let spec = w.p("spec.json");
    let short = w.write("short.txt", "1\n2\n");
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["tv", "--spectrum", &spec, "--component", "1", "--bogus"], "--bogus"),
        (vec!["tv", "--spectrum", "/nonexistent/spec.json", "--component", "1"], "/nonexistent/spec.json"),
        (vec!["bandwidth", "--spectrum", &spec, "--signal", &short], "short.txt"),
        (vec!["tv", "--spectrum", &spec, "--component", "9"], "--component"),
    ];
    for (args, needle) in cases {
        let o = hgsp(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        assert!(err.contains(needle), "{err}");
    }
    let nan = w.write("nan.txt", "1\nNaN\n");
    let o = hgsp(&["bandwidth", "--spectrum", &spec, "--signal", &nan]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn numerical_failures_exit_two() {
    let w = Work::new();
    let zero = Spectrum::from_parts(3, DMatrix::identity(3, 3), DVector::zeros(3), 0.0).unwrap();
    let spec = w.write("zero.json", &io::format_spectrum(&zero));
    let o = hgsp(&["tv", "--spectrum", &spec, "--component", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = hgsp(&["cluster", "--spectrum", &spec, "--k", "2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn help_exits_zero() {
    let o = hgsp(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("build-hypergraph"));
}
