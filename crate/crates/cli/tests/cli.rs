use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lssgld(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lssgld"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = lssgld(&["validate", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}: {}", path.display(), stderr(&out));
        seen += 1;
    }
    assert_eq!(seen, 7);
}

#[test]
fn validate_lists_every_bad_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.toml",
        r#"
experiment = "mixture"

[mixture]
n_centers = 8

[[samplers]]
kind = "sgld"
sigma = 1.0
batch_size = 20
"#,
    );
    let out = lssgld(&["validate", &cfg]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("samplers[0].batch_size"), "{err}");
    assert!(err.contains("mixture.n_centers"), "{err}");
    assert!(
        err.contains("samplers[0].sigma: sigma = 1 requires a smoothed kind"),
        "{err}"
    );
}

#[test]
fn unknown_fields_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "typo.toml",
        "experiment = \"gauss2d\"\n[gauss2d]\nitertions = 10\n",
    );
    let out = lssgld(&["validate", &cfg]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("itertions"));
}

#[test]
fn gamma_table_prints_spectral_averages() {
    let out = lssgld(&["gamma-table", "--dims", "1000,10000", "--sigmas", "1,5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "sigma,d=1000,d=10000\n1,0.268,0.268\n5,0.114,0.114\n");
}

#[test]
fn bounds_prints_three_forms_per_sigma() {
    let out = lssgld(&["bounds", "--sigmas", "0,1,2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("form,sigma,"));
    let forms: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(forms.len(), 9);
    for form in ["convex", "convex_corollary", "nonconvex"] {
        assert_eq!(forms.iter().filter(|f| **f == form).count(), 3);
    }
}

#[test]
fn runs_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "small.toml",
        r#"
experiment = "gauss2d"
seeds = [3, 4]

[gauss2d]
iterations = 2000
grid_size = 2
burn_in = 200
export_samples = 50
"#,
    );
    let run = |name: &str, threads: &str| {
        let dir = tmp.path().join(name);
        let out = lssgld(&["--threads", threads, "run", &cfg, "--output-dir", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
        dir
    };
    let a = run("a", "1");
    let b = run("b", "2");
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "summary.toml"));
    assert!(names.iter().any(|n| n == "act_vs_error.csv"));
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n:?}");
    }
    let summary = fs::read_to_string(a.join("summary.toml")).unwrap();
    assert!(summary.contains("seeds = [3, 4]"));
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "gamma.toml",
        "experiment = \"gamma_table\"\nseeds = [1, 2]\n",
    );
    let dir = tmp.path().join("out");
    let out = lssgld(&["run", &cfg, "--seed", "9", "--output-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = fs::read_to_string(dir.join("summary.toml")).unwrap();
    assert!(summary.contains("seeds = [9]"), "{summary}");
}
