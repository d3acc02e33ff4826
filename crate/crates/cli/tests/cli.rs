use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_medpower"))
}

fn smoke_config() -> String {
    format!("{}/../../configs/smoke.conf", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn records(dir: &Path) -> usize {
    std::fs::read_dir(dir)
        .map(|it| {
            it.filter_map(|e| e.ok())
                .filter(|e| {
                    let name = e.file_name().to_string_lossy().into_owned();
                    name.starts_with("scn_") && name.ends_with(".csv")
                })
                .count()
        })
        .unwrap_or(0)
}

#[test]
fn verify_passes() {
    let o = run(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn plan_run_merge_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid");
    let out_s = out.to_str().unwrap();
    let cfg = smoke_config();

    let o = run(&["plan", "--config", &cfg, "--out", out_s]);
    assert!(o.status.success());
    let manifest = std::fs::read_to_string(out.join("manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 5);
    assert_eq!(manifest.matches(",pending").count(), 4);

    let o = run(&["run", "--config", &cfg, "--out", out_s, "--workers", "2", "--cap", "3"]);
    assert_eq!(o.status.code(), Some(2), "capped run leaves work behind");
    assert_eq!(records(&out), 3);

    let o = run(&["resume", "--config", &cfg, "--out", out_s]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1 of 4 scenarios pending"));
    let o = run(&["resume", "--config", &cfg, "--out", out_s]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("completed 0"));

    let merged = dir.path().join("results.csv");
    let o = run(&["merge", "--results", out_s, "--out", merged.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&merged).unwrap().lines().count(), 1 + 4 * 15);

    let figs = dir.path().join("figs");
    let o = run(&["report", "--results", merged.to_str().unwrap(), "--figure", "4", "--out", figs.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(figs.join("fig4_a0.3_b0.3_c_prime0.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);

    let o = run(&["report", "--results", out_s, "--figure", "3", "--out", figs.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("c_prime=0.1"));
}

#[test]
fn rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = smoke_config();
    assert!(!run(&["run", "--config", &cfg, "--out", out, "--shard", "3/3"]).status.success());
    assert!(!run(&["run", "--config", &cfg, "--out", out, "--workers", "0"]).status.success());
    assert!(!run(&["report", "--results", out, "--figure", "9", "--out", out]).status.success());
    assert!(!run(&["plan", "--config", "/nonexistent.conf", "--out", out]).status.success());
}

#[test]
fn shards_cover_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = smoke_config();
    for k in 0..3 {
        let shard = format!("{k}/3");
        let o = run(&["run", "--config", &cfg, "--out", out, "--shard", &shard, "--workers", "1"]);
        assert!(o.status.success());
    }
    assert_eq!(records(dir.path()), 4);
}

const HEAVY: &str = "\
a_min=0.1\na_max=0.5\na_step=0.1\n\
b_min=0.3\nb_max=0.4\nb_step=0.1\n\
c_prime_min=0\nc_prime_max=0\nc_prime_step=0.1\n\
n_min=150\nn_max=150\nn_step=10\n\
B=1000\nR=40\nmaster_seed=9\n";

#[test]
fn killed_run_resumes_to_identical_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("heavy.conf");
    std::fs::write(&cfg, HEAVY).unwrap();
    let cfg = cfg.to_str().unwrap();
    let total = 10;

    let reference = dir.path().join("reference");
    let o = run(&["run", "--config", cfg, "--out", reference.to_str().unwrap(), "--workers", "1"]);
    assert!(o.status.success());
    assert_eq!(records(&reference), total);

    let interrupted = dir.path().join("interrupted");
    let mut child = bin()
        .args(["run", "--config", cfg, "--out", interrupted.to_str().unwrap(), "--workers", "1"])
        .stdout(std::process::Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(120);
    while records(&interrupted) < total / 2 && Instant::now() < deadline {
        std::thread::sleep(Duration::from_millis(5));
    }
    child.kill().unwrap();
    child.wait().unwrap();
    let done = records(&interrupted);
    assert!(done >= 1 && done < total, "kill landed after {done} of {total} scenarios");

    let o = run(&["resume", "--config", cfg, "--out", interrupted.to_str().unwrap(), "--workers", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(&format!("completed {}", total - done)));

    let merge = |d: &Path| {
        let out = d.join("results.csv");
        assert!(run(&["merge", "--results", d.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(merge(&reference), merge(&interrupted));
}
