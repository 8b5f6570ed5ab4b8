use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_osp-prox"))
}

#[test]
fn run_with_config_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("case1_oppm.json");
    std::fs::write(&cfg, r#"{"environment":{"kind":"case1"},"algorithm":"oppm","horizon":500,"seed":2}"#).unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("case1_oppm.csv")).unwrap();
    assert!(csv.starts_with("t,x,y,x_br,y_br,dgap_avg,nereg_avg"));
    assert_eq!(csv.lines().last().unwrap().split(',').next(), Some("500"));
    assert!(dir.path().join("case1_oppm.svg").exists());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--env", "stationary", "--algorithm", "optoppm_multi", "--rounds", "30", "--seed", "5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("stationary_optoppm_multi.csv")).unwrap();
    assert_eq!(csv.lines().last().unwrap().split(',').next(), Some("30"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"environment":{"kind":"case1"},"algorithm":"oppm","horizon":0}"#).unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));
    let out = bin().args(["run", "--env", "case9", "--algorithm", "oppm"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["run", "--config"]).arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn grid_writes_eight_panels_deterministically() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = bin().args(["grid", "--rounds", "300", "--seed", "7", "--out"]).arg(d.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let mut svgs = 0;
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap();
        svgs += usize::from(p.extension().is_some_and(|e| e == "svg"));
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    assert_eq!(svgs, 8);
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["verify", "--rounds", "300", "--out"]).arg(dir.path()).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 3);
    assert!(dir.path().join("verify.tsv").exists());
}
