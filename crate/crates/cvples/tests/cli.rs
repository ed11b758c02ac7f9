use std::path::Path;
use std::process::{Command, Output};

fn cvples(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvples"))
        .args(args)
        .env("CVPLES_OUTPUT_DIR", out_dir)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("case.cfg");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn sigma_eq_prints_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    for (args, want) in [
        (&["sigma-eq", "--filter", "impl6", "--int6"][..], "0.70859"),
        (&["sigma-eq", "--filter", "expl4", "--int6"][..], "0.53683"),
        (&["sigma-eq", "--filter", "gauss", "--int6"][..], "0.33996"),
    ] {
        let o = cvples(args, dir.path());
        assert!(o.status.success());
        assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), want);
    }
}

#[test]
fn config_errors_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "case=tgv\nn=16\nsgs=smagorinsky\nwidth=3\n",
        "case=tgv\nn=16\nsgs=none\ncvp=on\n",
        "case=tgv\nn=16\nmach=0.5\n",
        "case=tgv\nn=16\nradius=0.2\n",
        "case=tgv\nn=16\nfilter_alpha=0.6\n",
        "case=helix\nn=16\nsgs=smagorinsky\ncvp=on\ncvp_filter=gauss\nny=8\n",
        "case=tgv\nn=16\nthis line has no equals\n",
    ] {
        let cfg = write_config(dir.path(), text);
        let o = cvples(&["run", &cfg], dir.path());
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    }
    let o = cvples(&["sigma-eq", "--filter", "expl4", "--alpha", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unresolved_run_reports_blow_up() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case=tgv\nn=16\nsgs=none\nsolution_filter=off\nt_end=20\n");
    let out = dir.path().join("out");
    let o = cvples(&["run", &cfg], &out);
    assert_eq!(o.status.code(), Some(3));
    let status = std::fs::read_to_string(out.join("status.txt")).unwrap();
    assert!(status.starts_with("blow-up:"), "{status}");
    // diagnostics up to the failure are kept
    let csv = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(csv.lines().count() > 3);
}

#[test]
fn overrides_take_precedence_over_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case=tgv\nn=16\nsgs=vreman\nt_end=100\n");
    let out = dir.path().join("out");
    let o = cvples(&["run", &cfg, "--t_end=0.2"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(out.join("status.txt")).unwrap(), "completed\n");
    let last = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    let t: f64 = last.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((t - 0.2).abs() < 1e-9, "{t}");
}
