use std::path::PathBuf;
use std::process::Command as Process;

use chiral_scatter::cli::{render, resolve, Command, Flags, Format, RunConfig};
use chiral_scatter::two_photon::parity_limit;
use chiral_scatter::GaussianPacket1;

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn no_env() -> Vec<(String, String)> {
    Vec::new()
}

fn run(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_chiral-scatter"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Data rows of a CSV document as named columns.
fn columns(csv_text: &str) -> Vec<(String, Vec<String>)> {
    let body: String = csv_text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let mut cols: Vec<(String, Vec<String>)> = r.headers().unwrap().iter().map(|h| (h.to_string(), Vec::new())).collect();
    for rec in r.records() {
        for (c, v) in cols.iter_mut().zip(rec.unwrap().iter()) {
            c.1.push(v.to_string());
        }
    }
    cols
}

fn real(cols: &[(String, Vec<String>)], name: &str) -> Vec<f64> {
    let c = cols.iter().find(|c| c.0 == name).unwrap_or_else(|| panic!("no column {name}"));
    c.1.iter().map(|v| v.parse().unwrap()).collect()
}

fn rendered_text(cfg: &RunConfig) -> String {
    String::from_utf8(render(cfg).unwrap().bytes).unwrap()
}

#[test]
fn flags_beat_env_beat_file() {
    let path = tmp("precedence.toml");
    std::fs::write(&path, "m = 2\nsigma = 3.0\ndelta = 0.5\nseed = 9\n").unwrap();
    let flags = Flags {
        config: Some(path.clone()),
        sigma: Some(1.5),
        ..Default::default()
    };
    let env = vec![
        ("CHIRAL_SCATTER_SIGMA".to_string(), "2.5".to_string()),
        ("CHIRAL_SCATTER_DELTA".to_string(), "0.25".to_string()),
        ("UNRELATED".to_string(), "x".to_string()),
    ];
    let cfg = resolve(Command::Single, &flags, env).unwrap();
    assert_eq!(cfg.m, Some(2));
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.delta, 0.25);
    assert_eq!(cfg.sigma, 1.5);
}

#[test]
fn unknown_keys_are_rejected() {
    let path = tmp("unknown.toml");
    std::fs::write(&path, "m = 2\nsigmma = 3.0\n").unwrap();
    let flags = Flags {
        config: Some(path),
        ..Default::default()
    };
    let err = resolve(Command::Single, &flags, no_env()).unwrap_err();
    assert!(err.0.contains("sigmma"), "{}", err.0);
    let env = vec![("CHIRAL_SCATTER_BOGUS".to_string(), "1".to_string())];
    assert!(resolve(Command::Single, &Flags::default(), env).is_err());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["single", "--grid", "1:0:5"], &[]).0, 2);
    assert_eq!(run(&["single", "--sigma", "-1"], &[]).0, 2);
    assert_eq!(run(&["frobnicate"], &[]).0, 2);
    assert_eq!(run(&["two", "--m", "2", "--mu", "5"], &[]).0, 4);
    let env = [("CHIRAL_SCATTER_DEGENERACY_TOL", "10.0")];
    let args = ["disorder", "--m", "4", "--Sigma", "1e-6", "--samples", "2", "--grid", "-2:2:81"];
    assert_eq!(run(&args, &env).0, 5);
    assert_eq!(run(&["validate", "--filter", "no-such-criterion"], &[]).0, 2);
    assert_eq!(run(&["--help"], &[]).0, 0);
}

#[test]
fn outputs_carry_units_and_parameters() {
    let (code, out, _) = run(&["single", "--m", "1", "--grid", "-4:4:161"], &[]);
    assert_eq!(code, 0);
    let header: Vec<&str> = out.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header.iter().any(|l| l.contains("units of κ")));
    for key in ["sigma", "delta", "grid", "detunings", "kappa"] {
        assert!(header.iter().any(|l| l.starts_with(&format!("# {key} ="))), "{key}");
    }
    let (code, out, _) = run(&["two", "--m", "1", "--grid", "-4:4:161", "--format", "json"], &[]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(doc["units"].as_str().unwrap().contains("κ"));
    assert_eq!(doc["parameters"]["m"], 1);
}

#[test]
fn empty_array_passes_the_packet_through() {
    let mut cfg = RunConfig::new(Command::Single);
    cfg.m = Some(0);
    cfg.delta = 0.3;
    cfg.grid = Some("-10:10:401".into());
    let cols = columns(&rendered_text(&cfg));
    let p = GaussianPacket1::new(0.3, 2.0).unwrap();
    for (y, rho) in real(&cols, "y").iter().zip(real(&cols, "density")) {
        assert!((rho - p.amplitude(*y).norm_sqr()).abs() < 1e-15);
    }
}

#[test]
fn resonant_pairs_depend_on_parity_only() {
    let mut cfg = RunConfig::new(Command::Two);
    cfg.grid = Some("-12:12:481".into());
    let mut density = |m| {
        cfg.m = Some(m);
        let cols = columns(&rendered_text(&cfg));
        (real(&cols, "d"), real(&cols, "density"))
    };
    let (d, one) = density(1);
    let (_, three) = density(3);
    let (_, two) = density(2);
    let (_, zero) = density(0);
    for k in 0..d.len() {
        assert!((one[k] - three[k]).abs() < 1e-9);
        assert!((one[k] - parity_limit(d[k], 2.0, 1).powi(2)).abs() < 1e-9);
        assert!((two[k] - zero[k]).abs() < 1e-9);
    }
}

#[test]
fn clean_disorder_run_has_no_spread() {
    let mut cfg = RunConfig::new(Command::Disorder);
    cfg.m = Some(2);
    cfg.samples = 4;
    cfg.grid = Some("-5:5:201".into());
    let cols = columns(&rendered_text(&cfg));
    for name in ["median_abs_dev", "mean_abs_dev", "std_error"] {
        assert!(real(&cols, name).iter().all(|&x| x == 0.0), "{name}");
    }
}

#[test]
fn same_seed_same_bytes() {
    let mut cfg = RunConfig::new(Command::Disorder);
    cfg.m = Some(3);
    cfg.disorder = 0.5;
    cfg.samples = 20;
    cfg.seed = 42;
    cfg.grid = Some("-5:5:201".into());
    cfg.format = Format::Json;
    let a = render(&cfg).unwrap().bytes;
    assert_eq!(a, render(&cfg).unwrap().bytes);
    cfg.seed = 43;
    assert_ne!(a, render(&cfg).unwrap().bytes);

    let path = tmp("same_seed.csv");
    let args = ["disorder", "--m", "3", "--Sigma", "0.5", "--samples", "20", "--seed", "42", "--grid", "-5:5:201"];
    let (code, stdout, _) = run(&args, &[]);
    assert_eq!(code, 0);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(run(&with_out, &[]).0, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn sweep_conserves_norm() {
    let mut cfg = RunConfig::new(Command::Sweep);
    cfg.m = Some(4);
    let cols = columns(&rendered_text(&cfg));
    assert_eq!(real(&cols, "m"), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    assert!(real(&cols, "norm_change").iter().all(|x| x.abs() < 1e-8));
}

fn measured(report: &str) -> Vec<(String, String)> {
    let cols = columns(report);
    let check = &cols.iter().find(|c| c.0 == "check").unwrap().1;
    let value = &cols.iter().find(|c| c.0 == "measured").unwrap().1;
    check.iter().cloned().zip(value.iter().cloned()).collect()
}

#[test]
fn validate_filter_and_tolerance_override() {
    let (code, out, err) = run(&["validate", "--filter", "parity"], &[]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("criterion 4 parity: PASS"));
    assert!(out.lines().skip(1).all(|l| l.starts_with("4,")));

    // A looser bound changes the verdict threshold, never the measurement.
    let path = tmp("loose.toml");
    std::fs::write(&path, "[tolerances]\nparity = 1e-3\n").unwrap();
    let (code, loose, _) = run(&["validate", "--filter", "parity", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(code, 0);
    assert_eq!(measured(&out), measured(&loose));
    assert_ne!(out, loose);

    std::fs::write(&path, "[tolerances]\nparity = 1e-30\n").unwrap();
    let (code, _, err) = run(&["validate", "--filter", "parity", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(code, 1);
    assert!(err.contains("FAIL"));
}
