use std::process::{Command, Output};

fn fisherlens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fisherlens"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn sweep_header_and_rows() {
    let out = fisherlens(&["sweep", "--points", "5", "--with-oracle"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# fisherlens "));
    assert_eq!(lines[1], "s,f_tot,f_unentangled,f_oracle");
    assert_eq!(lines.len(), 7);
    assert!(lines[2].starts_with("0,0.25,"));
}

#[test]
fn coarse_grid_fails_oracle_check() {
    let out = fisherlens(&["oracle-check", "--grid-points", "201"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("grid convergence"));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(fisherlens(&["sweep", "--sigma", "-1"]).status.code(), Some(2));
    assert_eq!(fisherlens(&["reproduce"]).status.code(), Some(2));
    assert_eq!(fisherlens(&["sweep", "--r", "1,2"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# example\nr = 0.5\nalpha = pi/8\npoints = 3\n").unwrap();
    let out = fisherlens(&["sweep", "--config", path.to_str().unwrap(), "--r", "0.25"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("r=0.25 alpha=0.392699081699"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "radius = 2\n").unwrap();
    assert_eq!(
        fisherlens(&["sweep", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn reproduce_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = fisherlens(&[
        "reproduce",
        "--figure",
        "fig2b",
        "--out",
        dir.path().to_str().unwrap(),
        "--svg",
    ]);
    assert!(out.status.success());
    for stem in ["fig2b_r0", "fig2b_r0.25", "fig2b_r0.5", "fig2b_r1"] {
        let csv = std::fs::read_to_string(dir.path().join(format!("{stem}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 503);
    }
    let svg = std::fs::read_to_string(dir.path().join("fig2b.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn sleast_blank_analytic_for_unbalanced_generic_angle() {
    let out = fisherlens(&["sleast", "--r", "0.5", "--alpha", "pi/6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert_eq!(row[3], "");
}
