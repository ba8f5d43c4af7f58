use std::f64::consts::FRAC_PI_4;
use std::path::Path;
use std::process::{Command as Proc, Output};

use quench_core::cavity::{qfi_growth_exponent, CavityParams};
use quench_sweep::cli::CommonArgs;
use quench_sweep::config::Layer;
use quench_sweep::{run, Command, SweepSpec};

fn quench(args: &[&str]) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_quench")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn spec(command: Command, pairs: &[(&str, &str)]) -> SweepSpec {
    let layer: Layer = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    SweepSpec::resolve(command, &layer, &Layer::new()).unwrap()
}

#[test]
fn three_layer_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    std::fs::write(&cfg, "# layered\nomega = 2\nbig-omega = 5\nt = 0.5:1:2\n").unwrap();
    let args = CommonArgs {
        config: Some(cfg.clone()),
        big_omega: Some("7".into()),
        ..Default::default()
    };
    let s = args.resolve(Command::QfiMap).unwrap();
    assert_eq!(s.big_omega, 7.0); // flag over config
    assert_eq!(s.omega, 2.0); // config over default
    assert_eq!(s.t.values(), vec![0.5, 1.0]);
    assert_eq!(s.g_over_gc.values().len(), 7); // default
    assert_eq!(s.lambda.name(), "omega");

    let out = dir.path().join("a.csv");
    let o = quench(&[
        "qfi-map",
        "--config",
        cfg.to_str().unwrap(),
        "--big-omega",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("omega=2.0;big_omega=7.0;"), "{csv}");
}

#[test]
fn bad_config_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "omega = 1\nwidth = 3\n").unwrap();
    let o = quench(&["asymptote", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2: unknown key `width`"));
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = out.to_str().unwrap().to_string();
    full.extend(["--out", &p]);
    let o = quench(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn binary_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["qfi-map", "--g-over-gc", "0:2:21", "--t", "0:6:13", "--heuristic"][..],
        &["cfi-map", "--t", "1:6:6"][..],
        &["asymptote"][..],
    ] {
        let a = run_to(dir.path(), "a.csv", args);
        let b = run_to(dir.path(), "b.csv", args);
        assert_eq!(a, b, "{args:?}");
        assert!(!String::from_utf8(a).unwrap().contains("NaN,NaN"));
    }
}

#[test]
fn qfi_map_rows() {
    let t = run(&spec(Command::QfiMap, &[("g_over_gc", "0,1,2"), ("t", "0:8:17")])).unwrap().table;
    let (g, q) = (t.column("g_over_gc"), t.column("qfi"));
    for (gi, qi) in g.iter().zip(&q) {
        if *gi == 0.0 {
            assert_eq!(*qi, 0.0);
        }
    }
    // the critical column repeats the g = 1 rows
    let crit = t.column("ln_qfi_lambda2_critical");
    let ln = t.column("ln_qfi_lambda2");
    for i in 0..g.len() {
        if g[i] == 1.0 {
            assert_eq!(ln[i].to_bits(), crit[i].to_bits());
        }
    }
    assert!(t.text_column("provenance").iter().all(|p| p.contains("qfi_from_generator")));
}

#[test]
fn cfi_map_default_grid() {
    let t = run(&SweepSpec::defaults(Command::CfiMap).unwrap()).unwrap().table;
    for r in t.column("ratio") {
        assert!((0.0..=1.0 + 1e-9).contains(&r), "{r}");
    }
    let (x, ridge, best) = (t.column("omega_t"), t.column("ridge_phi"), t.column("ridge_ratio"));
    let mut last = f64::INFINITY;
    for i in (0..x.len()).step_by(180) {
        let d = (ridge[i] - FRAC_PI_4).abs();
        assert!(d <= last, "wt={}: {d}", x[i]);
        last = d;
        if x[i] >= 3.0 {
            assert!(best[i] >= 0.99);
        }
    }
    assert!(last < 1e-4);
}

#[test]
fn asymptote_values() {
    let t = run(&spec(
        Command::Asymptote,
        &[("phi", "0.6853981633974483,0.8853981633974483,0.5,1.0707963267948966")],
    ))
    .unwrap()
    .table;
    let v = t.column("ln_omega2_cfi");
    assert!((v[0] - 50f64.ln()).abs() < 1e-12 && (v[0] - 3.912).abs() < 1e-3);
    assert!((v[0] - v[1]).abs() < 1e-12 && (v[2] - v[3]).abs() < 1e-12);

    // the default grid is symmetric and grows toward the pole
    let t = run(&SweepSpec::defaults(Command::Asymptote).unwrap()).unwrap().table;
    let v = t.column("ln_omega2_cfi");
    let n = v.len();
    for i in 0..n / 2 {
        assert!((v[i] - v[n - 1 - i]).abs() < 1e-9);
        if i > 0 {
            assert!(v[i] > v[i - 1]);
        }
    }

    let o = quench(&["asymptote", "--phi", "0.7,0.78541"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole"));
}

#[test]
fn oracle_check_default_grid_passes() {
    let o = quench(&["oracle-check"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() == 30, "{text}");
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
    assert!(text.contains("residual="));
}

#[test]
fn oracle_check_tiny_cutoff_fails_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = quench(&[
        "oracle-check",
        "--g-over-gc",
        "1.4142135623730951",
        "--t",
        "3",
        "--cutoff",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("FAIL check=variance_vs_fock") && text.contains("too small"), "{text}");
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("generator_qfi_vs_fidelity") && l.contains(",fail,")));
}

#[test]
fn cavity_scaling() {
    // closed-form exponents at the weak-pump example, eta = 0.01
    let expected = [0.5657, 1.1314, 2.2627];
    for (n, e) in [25u32, 100, 400].into_iter().zip(expected) {
        let c = CavityParams::new(-1.0, 1.0, 0.0, 0.01, n).unwrap();
        let x = qfi_growth_exponent(&c).unwrap();
        assert!((x - e).abs() < 1e-4, "{x}");
        assert!((x - 8.0 * 2f64.sqrt() * (n as f64).sqrt() * 0.01).abs() < 1e-14);
    }
    let t = run(&SweepSpec::defaults(Command::CavityScaling).unwrap()).unwrap().table;
    assert_eq!(t.column("n_atoms"), vec![25.0, 100.0, 400.0]);
    assert!(t.notes.iter().any(|n| n.contains("r_squared = 9.99")));

    let o = quench(&["cavity-scaling", "--eta", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("growth fit failed"));
    let o = quench(&["cavity-scaling", "--n-atoms", "25,100"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(quench(&["--help"]).status.code(), Some(0));
    assert_eq!(quench(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(quench(&["qfi-map", "--lambda", "g"]).status.code(), Some(1));
    assert_eq!(quench(&["qfi-map", "--t", "0:1:1"]).status.code(), Some(1));
    let o = quench(&["optimal-angle", "--g-over-gc", "1.5", "--t", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("# quench optimal-angle\n# spec_sha256 = "));
}
