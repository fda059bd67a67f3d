use std::process::{Command, Output};

fn d2dsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2dsim"))
        .args(args)
        .env_remove("RUST_BACKTRACE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SMALL: [&str; 6] = ["--cues", "6", "--pairs", "6", "--snapshots", "8"];

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn run_prints_csv_and_exits_zero() {
    let o = d2dsim(&[&["run"], &SMALL[..]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.lines().any(|l| l == d2dsim::CSV_HEADER));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("overlay,1,4.3,6,6,1,"), "{}", rows[0]);
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        &["sweep-ues", "--pair-grid", "2,4", "--reps", "2", "--seed", "9"],
        &SMALL[..],
    ]
    .concat();
    let a = d2dsim(&args);
    let b = d2dsim(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_rows(&stdout(&a)).len(), 5 * 2 * 2);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let p = path.to_str().unwrap();
    let o = d2dsim(&[&["run", "--out", p], &SMALL[..]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let direct = stdout(&d2dsim(&[&["run"], &SMALL[..]].concat()));
    assert_eq!(written, direct);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.conf");
    std::fs::write(
        &path,
        "# small run\nscheme = underlay2\ncell_type = 5\nn_cues = 4 # trailing\nn_pairs = 4\nsnapshots = 5\n",
    )
    .unwrap();
    let o = d2dsim(&["run", "--config", path.to_str().unwrap(), "--cell-type", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    let rows = data_rows(&csv);
    assert!(rows[0].starts_with("underlay2,3,17.1,4,4,"), "{}", rows[0]);
}

#[test]
fn densification_sweep_has_fifteen_rows() {
    let o = d2dsim(&["sweep-densification", "--total-ues", "12", "--snapshots", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 15);
    let densities: Vec<&str> = rows.iter().step_by(3).map(|r| r.split(',').nth(2).unwrap()).collect();
    assert_eq!(densities, ["4.3", "8.5", "17.1", "25.6", "38.5"]);
    assert!(csv.contains("# population: 12 UEs as 4 CUEs + 4 pairs"));
}

#[test]
fn default_pair_grid_is_labelled() {
    let o = d2dsim(&["sweep-ues", "--cues", "3", "--snapshots", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.contains("# pair grid: 12,24,36,48 (default stand-in)"));
    assert_eq!(data_rows(&csv).len(), 20);
    assert!(data_rows(&csv).iter().all(|r| r.starts_with("overlay,")));
}

fn assert_fails_with(args: &[&str], needle: &str) {
    let o = d2dsim(args);
    assert!(!o.status.success(), "{args:?} should fail");
    let e = stderr(&o);
    assert!(e.contains(needle), "{args:?}: {e}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn bad_values_fail_with_a_diagnostic() {
    assert_fails_with(&["run", "--scheme", "hybrid"], "`scheme`: invalid value \"hybrid\"");
    assert_fails_with(&["run", "--cell-type", "7"], "`cell_type`");
    assert_fails_with(&["run", "--snapshots", "0"], "`snapshots`");
    assert_fails_with(&["run", "--reps", "0"], "`replications`");
    assert_fails_with(&["run", "--cues=-3"], "`n_cues`");
    assert_fails_with(&["run", "--seed", "x"], "`seed`");
}

#[test]
fn config_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.conf");
    assert_fails_with(&["run", "--config", missing.to_str().unwrap()], "cannot read config");
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "scheme=overlay\nspeed=3\n").unwrap();
    assert_fails_with(
        &["run", "--config", bad.to_str().unwrap()],
        "line 2: unknown key `speed`",
    );
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("r.csv");
    let o = d2dsim(&[&["run", "--out", target.to_str().unwrap()], &SMALL[..]].concat());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn usage_errors_exit_nonzero() {
    assert!(!d2dsim(&[]).status.success());
    assert!(!d2dsim(&["simulate"]).status.success());
    assert!(!d2dsim(&["run", "--bogus"]).status.success());
    assert!(d2dsim(&["--help"]).status.success());
}
