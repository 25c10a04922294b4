use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dcsched"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn dcsched")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dcsched-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const BASIC: &str = "\
[channel.a]
p_stay_good = 0.9
p_stay_bad = 0.1

[channel.b]
p_stay_good = 0.8
p_stay_bad = 0.2

[sweep]
n = 10
lb = 0, 0.5, 1
dt = 0, 1
nk = 10/5
";

#[test]
fn analyze_reports_closed_form() {
    let cfg = write_config("analyze.cfg", BASIC);
    let out = run(&["analyze", "--config", cfg.to_str().unwrap(), "--policy", "pd"]);
    assert!(out.status.success());
    let text = stdout(&out);
    // pi_bad are 0.1 and 0.2 (memoryless rows), so PD loses 2%.
    assert!(text.contains("e2e_plr = 2.00000000e-2"), "{text}");
    assert!(text.contains("rf = 2.00000000e0"));
}

#[test]
fn analyze_nc_requires_generation_size() {
    let cfg = write_config("analyze-nc.cfg", BASIC);
    let out = run(&["analyze", "--config", cfg.to_str().unwrap(), "--policy", "nc"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--k is required"));
}

#[test]
fn invalid_config_exits_1() {
    let cfg = write_config("broken.cfg", "[channel.a]\np_stay_good = 2\n");
    let out = run(&["analyze", "--config", cfg.to_str().unwrap(), "--policy", "pd"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("out of range"));
}

#[test]
fn missing_config_exits_1() {
    let out = run(&["sweep", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    let out = run(&["analyze", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for sub in ["analyze", "sweep", "simulate", "calibrate", "reproduce-tables"] {
        assert!(text.contains(sub), "help lacks {sub}");
    }
}

#[test]
fn sweep_writes_csv_to_out_path() {
    let cfg = write_config("sweep.cfg", BASIC);
    let out_path = cfg.with_file_name("sweep-out.csv");
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "policy,lb,dt,k,n,q,rf,coding_rate,e2e_plr,mc_plr,mc_stderr,z"
    );
    // 3 lb x 2 dt PD+PS cells plus 3 lb x 1 nk NC cells.
    assert_eq!(lines.count(), 9);
}

#[test]
fn sweep_table_format_to_stdout() {
    let cfg = write_config("sweep-table.cfg", BASIC);
    let out = run(&["sweep", "--config", cfg.to_str().unwrap(), "--format", "table"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("policy"));
}

#[test]
fn sweep_runs_are_byte_identical() {
    let cfg = write_config("sweep-det.cfg", &format!("{BASIC}[mc]\nrounds = 5000\nseed = 4\n"));
    let a = run(&["sweep", "--config", cfg.to_str().unwrap(), "--jobs", "4"]);
    let b = run(&["sweep", "--config", cfg.to_str().unwrap(), "--jobs", "1"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn simulate_agrees_with_analytics() {
    let cfg = write_config("sim.cfg", BASIC);
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--policy",
        "pdps",
        "--dt",
        "0.4",
        "--lb",
        "0.5",
        "--rounds",
        "200000",
        "--seed",
        "11",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("analytic_plr ="));
    assert!(text.contains("rounds = 200000"));
    let z: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("z = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(z < 4.0, "z = {z}");
}

#[test]
fn calibrate_reports_best_fit() {
    let out = run(&["calibrate", "--q", "65536"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("<- best"));
    assert!(text.contains("channel 70deg"));
    assert!(text.contains("mode=Exact"));
}

#[test]
fn calibrate_infeasible_exits_3() {
    let out = run(&["calibrate", "--q", "16"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("infeasible"));
}

#[test]
fn reproduce_tables_matches_goldens() {
    let out_dir = std::env::temp_dir().join(format!("dcsched-repro-{}", std::process::id()));
    let out = run(&["reproduce-tables", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    for table in ["table1", "table2", "table3"] {
        assert!(text.contains(&format!("{table}: ok")), "{text}");
        assert!(out_dir.join(format!("{table}.csv")).exists());
    }
}
