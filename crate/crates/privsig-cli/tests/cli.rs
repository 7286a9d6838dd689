//! End-to-end tests that drive the compiled `privsig` binary.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn privsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privsig"))
        .args(args)
        .output()
        .expect("the binary should launch")
}

fn run_json(args: &[&str]) -> Value {
    let out = privsig(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout should be one json document")
}

fn stdout_text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be utf-8")
}

#[test]
fn scalar_solve_reports_the_reference_slope() {
    let doc = run_json(&["solve", "--mode", "scalar", "--rho", "0.3", "--delta", "1"]);
    assert_eq!(doc["schema"], "privsig/1");
    assert_eq!(doc["mode"], "scalar");
    let slope = doc["b_over_a"].as_f64().expect("slope should be a number");
    assert!(
        (slope - (-6.51)).abs() < 0.01,
        "slope {slope} should match the -6.51 reference within 0.01"
    );
    assert_eq!(doc["payoff_dominant"], true);
    assert!(doc["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn reference_slope_table_reproduces_through_sweeps() {
    // Slopes for sigma_x2 = sigma_y2 = 1 over the (rho, delta) reference
    // grid, quoted to two decimals.
    let expected = [
        (0.3, [-36.39, -6.51, -3.64]),
        (0.7, [-15.05, -2.45, -1.50]),
    ];
    for (rho, slopes) in expected {
        let out = privsig(&[
            "sweep",
            "--mode",
            "nash",
            "--axis",
            "delta",
            "--grid",
            "0.1,1,10",
            "--rho",
            &rho.to_string(),
        ]);
        assert!(out.status.success());
        let text = stdout_text(&out);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "mode,delta,rho,sigma_x2,sigma_y2,p,sigma_w2,levels,mse_x,mse_y,j_e,j_d,b_over_a",
            "header must match the published schema byte for byte"
        );
        for (line, want) in lines.zip(slopes) {
            let got: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(
                (got - want).abs() < 0.01,
                "rho {rho}: slope {got} should match {want} within 0.01"
            );
        }
    }
}

#[test]
fn bottleneck_regime_flips_at_the_scalar_threshold() {
    let above = run_json(&["ib", "--rho", "0.5", "--delta", "0.3"]);
    assert_eq!(above["regime"], "noninformative");
    assert_eq!(above["k"], 0);
    assert_eq!(above["mutual_information"]["i_xz"], 0.0);

    let below = run_json(&["ib", "--rho", "0.5", "--delta", "0.2"]);
    assert_eq!(below["regime"], "fully-informative");
    assert_eq!(below["k"], 1);
}

#[test]
fn awgn_solution_spends_the_whole_power_budget() {
    let doc = run_json(&[
        "solve", "--mode", "awgn", "--rho", "0.75", "--delta", "1", "--p", "2.5", "--sigma-w2",
        "0.5", "--verify",
    ]);
    let used = doc["power_used"].as_f64().unwrap();
    assert!(
        (used - 2.5).abs() <= 1e-9,
        "transmit power {used} should sit on the 2.5 budget"
    );
    assert_eq!(doc["verify"]["certified"], true);
}

#[test]
fn sweep_csv_is_byte_stable_across_runs() {
    let args = [
        "sweep", "--mode", "awgn", "--axis", "sigma-w2", "--grid", "0.01,0.1,1", "--rho", "0.75",
        "--delta", "1", "--p", "1",
    ];
    let first = privsig(&args);
    let second = privsig(&args);
    assert!(first.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "identical flags must produce identical bytes"
    );
}

#[test]
fn privacy_weight_sweep_moves_both_errors_up() {
    let out = privsig(&[
        "sweep", "--mode", "nash", "--axis", "delta", "--grid", "0.1,0.5,1,5,10", "--rho", "0.6",
    ]);
    assert!(out.status.success());
    let text = stdout_text(&out);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let col = |name: &str| -> usize {
        text.lines()
            .next()
            .unwrap()
            .split(',')
            .position(|c| c == name)
            .unwrap()
    };
    let (ix, iy) = (col("mse_x"), col("mse_y"));
    for pair in rows.windows(2) {
        let (x0, x1): (f64, f64) = (pair[0][ix].parse().unwrap(), pair[1][ix].parse().unwrap());
        let (y0, y1): (f64, f64) = (pair[0][iy].parse().unwrap(), pair[1][iy].parse().unwrap());
        assert!(x1 >= x0, "privacy error should grow with the weight: {x0} -> {x1}");
        assert!(y1 >= y0, "tracking error should grow with the weight: {y0} -> {y1}");
    }
}

#[test]
fn correlation_sweep_shapes_match_the_two_regimes() {
    let parse_cols = |text: &str| -> Vec<(f64, f64)> {
        text.lines()
            .skip(1)
            .map(|l| {
                let cells: Vec<&str> = l.split(',').collect();
                (cells[8].parse().unwrap(), cells[9].parse().unwrap())
            })
            .collect()
    };

    // Light privacy weight: the receiver keeps tracking Y at essentially
    // constant quality while learning steadily more about X.
    let light = privsig(&[
        "sweep", "--mode", "nash", "--axis", "rho", "--grid", "0.1,0.3,0.5,0.7,0.9", "--delta",
        "0.1",
    ]);
    assert!(light.status.success());
    let rows = parse_cols(&stdout_text(&light));
    let spread = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max)
        - rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    assert!(
        spread < 0.1,
        "tracking error should stay nearly flat at delta 0.1, spread {spread}"
    );
    for pair in rows.windows(2) {
        assert!(
            pair[1].0 < pair[0].0,
            "privacy error should fall as correlation rises: {} -> {}",
            pair[0].0,
            pair[1].0
        );
    }

    // Heavy privacy weight: protecting X now costs tracking quality, and
    // the cost grows with correlation.
    let heavy = privsig(&[
        "sweep", "--mode", "nash", "--axis", "rho", "--grid", "0.1,0.3,0.5,0.7,0.9", "--delta",
        "10",
    ]);
    assert!(heavy.status.success());
    let rows = parse_cols(&stdout_text(&heavy));
    for pair in rows.windows(2) {
        assert!(
            pair[1].1 > pair[0].1,
            "tracking error should rise with correlation at delta 10: {} -> {}",
            pair[0].1,
            pair[1].1
        );
    }
}

#[test]
fn default_verify_suite_certifies_and_exits_zero() {
    let out = privsig(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_text(&out);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("certified")).count(),
        6,
        "all six reference settings should certify:\n{text}"
    );
}

#[test]
fn corrupted_encoder_is_caught_with_exit_three() {
    let out = privsig(&["verify", "--corrupt", "encoder"]);
    assert_eq!(out.status.code(), Some(3), "tampering must be detected");
    let text = stdout_text(&out);
    assert!(
        text.lines().filter(|l| l.starts_with("VIOLATED")).count() == 6,
        "every tampered setting should be flagged:\n{text}"
    );
}

#[test]
fn corrupted_stackelberg_baseline_is_beaten() {
    let out = privsig(&[
        "verify",
        "--mode",
        "stackelberg",
        "--rho",
        "0.75",
        "--delta",
        "1",
        "--n-encoders",
        "40",
        "--corrupt",
        "encoder",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout_text(&out).contains("VIOLATED"));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let out = privsig(&["solve", "--mode", "scalar", "--rho", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("--delta"),
        "the message should name the missing flag"
    );
}

#[test]
fn invalid_covariance_is_a_usage_error() {
    let out = privsig(&["solve", "--mode", "scalar", "--rho", "1.5", "--delta", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quantizer_output_matches_the_two_level_closed_form() {
    let doc = run_json(&["quantize", "--levels", "2"]);
    let mse = doc["mse"].as_f64().unwrap();
    let closed_form = 1.0 - 2.0 / std::f64::consts::PI;
    assert!(
        (mse - closed_form).abs() < 1e-9,
        "two-level distortion {mse} should equal 1 - 2/pi"
    );
    assert_eq!(doc["thresholds"].as_array().unwrap().len(), 1);
    let recon: Vec<f64> = doc["reconstructions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((recon[0] + recon[1]).abs() < 1e-12, "levels should be symmetric");
}

#[test]
fn covariance_file_drives_a_vector_solve() {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    writeln!(file, "2.0 0.5 0.8 0.1").unwrap();
    writeln!(file, "0.5 1.5 0.2 0.6").unwrap();
    writeln!(file, "0.8 0.2 1.8 0.3").unwrap();
    writeln!(file, "0.1 0.6 0.3 1.2").unwrap();
    let path = file.path().to_str().unwrap().to_owned();
    let doc = run_json(&[
        "solve", "--mode", "stackelberg", "--sigma-file", &path, "--nx", "2", "--delta", "0.7",
    ]);
    assert_eq!(doc["source"]["n_x"], 2);
    assert_eq!(doc["source"]["n_y"], 2);
    let alphas = doc["alphas"].as_array().unwrap();
    assert_eq!(alphas.len(), 2);
    assert!(alphas.iter().all(|a| a.as_f64() == Some(1.0)));
    let spectrum = &doc["spectrum"];
    assert_eq!(spectrum["n_pos"], 2);
    assert_eq!(spectrum["n_neg"], 2);
}

#[test]
fn simulation_confirms_the_analytic_report() {
    let doc = run_json(&[
        "simulate", "--mode", "discrete", "--rho", "0.75", "--delta", "1", "--levels", "4", "--n",
        "50000",
    ]);
    assert_eq!(doc["pass"], true);
    let z_x = doc["z_x"].as_f64().unwrap();
    assert!(z_x.abs() < 4.0, "standardized gap {z_x} should sit inside the band");
}

#[test]
fn output_lands_in_the_requested_file() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("row.csv");
    let out = privsig(&[
        "solve", "--mode", "scalar", "--rho", "0.3", "--delta", "1", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "with --out, stdout should stay quiet");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("mode,delta,rho"));
    assert_eq!(text.lines().count(), 2);
}
