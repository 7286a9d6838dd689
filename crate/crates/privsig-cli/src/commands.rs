//! Implementations of the six subcommands.
//!
//! Every function returns `Ok(exit_code)` — `0`, or `3` when a requested
//! verification fails after its document or verdict has been emitted —
//! and `Err(message)` for usage or validation problems, which the caller
//! prints to standard error with exit code `2`.

use std::fs;

use privsig::bottleneck::{
    gaussian_mutual_information, solve_chechik, solve_constrained_ib, solve_mmse_ib, IBRegime,
};
use privsig::channel::{lloyd_max_gaussian, solve_awgn, solve_discrete};
use privsig::equilibrium::{solve_scalar, solve_stackelberg, NashSolution};
use privsig::mat::Mat;
use privsig::model::{
    evaluate_linear, mmse_decoders, ChannelSpec, EquilibriumReport, GameSpec, JointGaussian,
    LinearPolicyPair,
};
use privsig::spectral::SymMatrix;
use privsig::verify::{
    check_consistency, check_discrete_consistency, check_nash_scalar, check_stackelberg,
    ConsistencyReport, DeviationReport, ScalarPolicyView, Verdict,
};
use serde_json::{json, Value};

use crate::output::{
    emit, json_text, mat_json, num, opt_num, policy_json, report_json, spectrum_json, vec_json,
    warnings_json, SweepRow, CSV_HEADER, SCHEMA,
};
use crate::{
    Format, IbArgs, QuantizeArgs, SimulateArgs, SimulateMode, SolveArgs, SolveMode, SourceArgs,
    SweepArgs, SweepAxis, SweepMode, VerifyArgs, VerifyMode,
};

/// Fixed reference grid for the default verification suite (unit
/// variances).
const VERIFY_GRID: [(f64, f64); 6] = [
    (0.3, 0.1),
    (0.3, 1.0),
    (0.3, 10.0),
    (0.7, 0.1),
    (0.7, 1.0),
    (0.7, 10.0),
];

fn solver_err(e: privsig::Error) -> String {
    e.to_string()
}

/// Build the source from either the scalar flags or a covariance file.
fn load_source(args: &SourceArgs) -> Result<JointGaussian, String> {
    if let Some(path) = &args.sigma_file {
        let n_x = args
            .nx
            .ok_or("--sigma-file needs --nx (size of the private block)")?;
        let text = fs::read_to_string(path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            rows.push(row.map_err(|e| format!("{}:{}: {e}", path.display(), i + 1))?);
        }
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(format!("{}: expected a square matrix", path.display()));
        }
        if n_x >= dim {
            return Err(format!(
                "--nx {n_x} leaves no public block in a {dim}x{dim} covariance"
            ));
        }
        let sigma = SymMatrix::from_rows(&rows).map_err(solver_err)?;
        JointGaussian::new(n_x, dim - n_x, sigma).map_err(solver_err)
    } else {
        let rho = args
            .rho
            .ok_or("provide --rho for a scalar source, or --sigma-file with --nx")?;
        JointGaussian::scalar(args.sx2, args.sy2, rho).map_err(solver_err)
    }
}

/// Scalar parameters of a two-dimensional source.
fn scalar_params(source: &JointGaussian) -> (f64, f64, f64) {
    let s = source.sigma();
    (s[(0, 0)], s[(1, 1)], s[(0, 1)])
}

fn source_json(source: &JointGaussian) -> Value {
    json!({
        "n_x": source.n_x(),
        "n_y": source.n_y(),
        "sigma": mat_json(source.sigma().mat()),
    })
}

fn channel_json(channel: &ChannelSpec) -> Value {
    match channel {
        ChannelSpec::Noiseless => json!({"type": "noiseless"}),
        ChannelSpec::Awgn { noise_var, power } => {
            json!({"type": "awgn", "p": num(*power), "sigma_w2": num(*noise_var)})
        }
        ChannelSpec::Discrete { levels } => json!({"type": "discrete", "levels": levels}),
    }
}

fn deviation_json(report: &DeviationReport) -> Value {
    json!({
        "certified": report.certified(),
        "baseline_j_e": num(report.baseline_je),
        "tested": report.tested,
        "best_deviation_j_e": num(report.best_deviation_je),
        "margin": num(report.margin),
        "details": match &report.verdict {
            Verdict::Certified => Value::Null,
            Verdict::Violated(details) => Value::String(details.clone()),
        },
    })
}

fn consistency_json(report: &ConsistencyReport) -> Value {
    json!({
        "pass": report.pass,
        "analytic": report_json(&report.analytic),
        "empirical": report_json(&report.empirical),
        "se_x": num(report.se_x),
        "se_y": num(report.se_y),
        "z_x": num(report.z_x),
        "z_y": num(report.z_y),
        "k_sigma": num(report.k_sigma),
    })
}

fn solve_mode_name(mode: SolveMode) -> &'static str {
    match mode {
        SolveMode::Scalar => "scalar",
        SolveMode::Nash => "nash",
        SolveMode::Stackelberg => "stackelberg",
        SolveMode::Ib => "ib",
        SolveMode::Awgn => "awgn",
        SolveMode::Discrete => "discrete",
    }
}

pub fn cmd_solve(args: SolveArgs) -> Result<i32, String> {
    match args.mode {
        SolveMode::Scalar | SolveMode::Nash | SolveMode::Stackelberg => solve_linear(args),
        SolveMode::Ib => {
            if args.format == Format::Csv {
                return Err("bottleneck solutions serialize as json; use the sweep command for csv".into());
            }
            let source = load_source(&args.source)?;
            let request = IbRequest::from_flags(args.delta, None, args.beta)?;
            let doc = ib_document(&source, request)?;
            emit(&json_text(&doc), args.out.as_deref())?;
            Ok(0)
        }
        SolveMode::Awgn => solve_noisy(args),
        SolveMode::Discrete => solve_quantized(args),
    }
}

fn solve_linear(args: SolveArgs) -> Result<i32, String> {
    let source = load_source(&args.source)?;
    let delta = args.delta.ok_or("--delta is required")?;
    let scalar = source.dim() == 2;
    if args.mode == SolveMode::Scalar && !scalar {
        return Err(
            "--mode scalar reads a two-dimensional source; use --mode stackelberg for vectors"
                .into(),
        );
    }
    let sol: NashSolution = if scalar {
        let (sx2, sy2, rho) = scalar_params(&source);
        solve_scalar(sx2, sy2, rho, delta).map_err(solver_err)?
    } else {
        let spec =
            GameSpec::new(source.clone(), delta, ChannelSpec::Noiseless).map_err(solver_err)?;
        solve_stackelberg(&spec).map_err(solver_err)?
    };

    let mut doc = json!({
        "schema": SCHEMA,
        "mode": solve_mode_name(args.mode),
        "source": source_json(&sol.spec.source),
        "delta": num(delta),
        "channel": channel_json(&sol.spec.channel),
        "b_over_a": opt_num(sol.b_over_a()),
        "alphas": vec_json(&sol.alphas),
        "payoff_dominant": sol.payoff_dominant,
        "policy": policy_json(&sol.report.policy),
        "spectrum": spectrum_json(&sol.report.spectrum),
        "report": report_json(&sol.report),
        "warnings": warnings_json(&sol.warnings),
    });

    let mut exit = 0;
    if args.verify {
        let deviation = if scalar {
            let view = ScalarPolicyView::from_nash(&sol).map_err(solver_err)?;
            check_nash_scalar(&view, privsig::verify::DEFAULT_VERIFY_TOL).map_err(solver_err)?
        } else {
            check_stackelberg(
                &sol.spec,
                &sol.report,
                200,
                args.seed,
                privsig::verify::DEFAULT_VERIFY_TOL,
            )
            .map_err(solver_err)?
        };
        if !deviation.certified() {
            exit = 3;
        }
        doc["verify"] = deviation_json(&deviation);
    }

    let text = match args.format {
        Format::Json => json_text(&doc),
        Format::Csv => {
            if !scalar {
                return Err("csv output covers scalar games; use json for vector sources".into());
            }
            let (sx2, sy2, rho) = scalar_params(&sol.spec.source);
            let row = SweepRow {
                mode: solve_mode_name(args.mode),
                delta: Some(delta),
                rho: Some(rho),
                sigma_x2: Some(sx2),
                sigma_y2: Some(sy2),
                mse_x: Some(sol.report.mse_x),
                mse_y: Some(sol.report.mse_y),
                j_e: Some(sol.report.j_e),
                j_d: Some(sol.report.j_d),
                b_over_a: sol.b_over_a(),
                ..Default::default()
            };
            format!("{CSV_HEADER}\n{}\n", row.to_csv_line())
        }
    };
    emit(&text, args.out.as_deref())?;
    Ok(exit)
}

fn solve_noisy(args: SolveArgs) -> Result<i32, String> {
    let source = load_source(&args.source)?;
    if source.dim() != 2 {
        return Err("the power-constrained channel carries scalar games only".into());
    }
    let (sx2, sy2, rho) = scalar_params(&source);
    let delta = args.delta.ok_or("--delta is required")?;
    let p = args.p.ok_or("--p (power budget) is required for --mode awgn")?;
    let sigma_w2 = args
        .sigma_w2
        .ok_or("--sigma-w2 (noise variance) is required for --mode awgn")?;
    let sol = solve_awgn(sx2, sy2, rho, delta, p, sigma_w2).map_err(solver_err)?;

    let mut doc = json!({
        "schema": SCHEMA,
        "mode": "awgn",
        "source": source_json(&sol.spec.source),
        "delta": num(delta),
        "channel": channel_json(&sol.spec.channel),
        "a": num(sol.a),
        "b": num(sol.b),
        "b_over_a": opt_num(sol.b_over_a()),
        "power_used": num(sol.power_used),
        "d_x": num(sol.d_x),
        "d_y": num(sol.d_y),
        "policy": policy_json(&sol.report.policy),
        "spectrum": spectrum_json(&sol.report.spectrum),
        "report": report_json(&sol.report),
        "warnings": warnings_json(&sol.warnings),
    });

    let mut exit = 0;
    if args.verify {
        let view = ScalarPolicyView::from_awgn(&sol);
        let deviation =
            check_nash_scalar(&view, privsig::verify::DEFAULT_VERIFY_TOL).map_err(solver_err)?;
        if !deviation.certified() {
            exit = 3;
        }
        doc["verify"] = deviation_json(&deviation);
    }

    let text = match args.format {
        Format::Json => json_text(&doc),
        Format::Csv => {
            let row = SweepRow {
                mode: "awgn",
                delta: Some(delta),
                rho: Some(rho),
                sigma_x2: Some(sx2),
                sigma_y2: Some(sy2),
                p: Some(p),
                sigma_w2: Some(sigma_w2),
                mse_x: Some(sol.report.mse_x),
                mse_y: Some(sol.report.mse_y),
                j_e: Some(sol.report.j_e),
                j_d: Some(sol.report.j_d),
                b_over_a: sol.b_over_a(),
                ..Default::default()
            };
            format!("{CSV_HEADER}\n{}\n", row.to_csv_line())
        }
    };
    emit(&text, args.out.as_deref())?;
    Ok(exit)
}

fn solve_quantized(args: SolveArgs) -> Result<i32, String> {
    let source = load_source(&args.source)?;
    if source.dim() != 2 {
        return Err("the discrete channel carries scalar games only".into());
    }
    let (sx2, sy2, rho) = scalar_params(&source);
    let delta = args.delta.ok_or("--delta is required")?;
    let levels = args.levels.ok_or("--levels is required for --mode discrete")?;
    let sol = solve_discrete(sx2, sy2, rho, delta, levels).map_err(solver_err)?;
    let f = &sol.report.policy.f;
    let b_over_a = if f[(0, 0)] == 0.0 {
        None
    } else {
        Some(f[(0, 1)] / f[(0, 0)])
    };

    let mut doc = json!({
        "schema": SCHEMA,
        "mode": "discrete",
        "source": source_json(&sol.spec.source),
        "delta": num(delta),
        "channel": channel_json(&sol.spec.channel),
        "levels": levels,
        "b_over_a": opt_num(b_over_a),
        "c_x": num(sol.c_x),
        "c_y": num(sol.c_y),
        "quantizer": {
            "thresholds": vec_json(sol.quantizer.boundaries()),
            "reconstructions": vec_json(sol.quantizer.reconstructions()),
            "mse_u": num(sol.quantizer.mse()),
            "iterations": sol.quantizer.iterations(),
        },
        "policy": policy_json(&sol.report.policy),
        "spectrum": spectrum_json(&sol.report.spectrum),
        "report": report_json(&sol.report),
        "warnings": warnings_json(&sol.warnings),
    });

    let mut exit = 0;
    if args.verify {
        let consistency =
            check_discrete_consistency(&sol, 100_000, args.seed, privsig::verify::DEFAULT_K_SIGMA)
                .map_err(solver_err)?;
        if !consistency.pass {
            exit = 3;
        }
        doc["verify"] = consistency_json(&consistency);
    }

    let text = match args.format {
        Format::Json => json_text(&doc),
        Format::Csv => {
            let row = SweepRow {
                mode: "discrete",
                delta: Some(delta),
                rho: Some(rho),
                sigma_x2: Some(sx2),
                sigma_y2: Some(sy2),
                levels: Some(levels),
                mse_x: Some(sol.report.mse_x),
                mse_y: Some(sol.report.mse_y),
                j_e: Some(sol.report.j_e),
                j_d: Some(sol.report.j_d),
                b_over_a,
                ..Default::default()
            };
            format!("{CSV_HEADER}\n{}\n", row.to_csv_line())
        }
    };
    emit(&text, args.out.as_deref())?;
    Ok(exit)
}

/// Which bottleneck variant to run; exactly one flag picks it.
enum IbRequest {
    Delta(f64),
    Alpha(f64),
    Beta(f64),
}

impl IbRequest {
    fn from_flags(
        delta: Option<f64>,
        alpha: Option<f64>,
        beta: Option<f64>,
    ) -> Result<Self, String> {
        match (delta, alpha, beta) {
            (Some(d), None, None) => Ok(IbRequest::Delta(d)),
            (None, Some(a), None) => Ok(IbRequest::Alpha(a)),
            (None, None, Some(b)) => Ok(IbRequest::Beta(b)),
            _ => Err("pick exactly one of --delta, --alpha, --beta".into()),
        }
    }
}

fn regime_name(regime: IBRegime) -> &'static str {
    match regime {
        IBRegime::FullyInformative => "fully-informative",
        IBRegime::Partial => "partial",
        IBRegime::NonInformative => "noninformative",
    }
}

fn mutual_information_json(i_xz: f64, i_yz: f64) -> Value {
    json!({"i_xz": num(i_xz), "i_yz": num(i_yz)})
}

fn ib_document(source: &JointGaussian, request: IbRequest) -> Result<Value, String> {
    match request {
        IbRequest::Delta(delta) => {
            let sol = solve_mmse_ib(source, delta).map_err(solver_err)?;
            let x_block = sol.report.policy.f.block(0, 0, sol.k, source.n_x());
            let (i_xz, i_yz) =
                gaussian_mutual_information(source, &x_block, None).map_err(solver_err)?;
            Ok(json!({
                "schema": SCHEMA,
                "mode": "ib",
                "source": source_json(source),
                "delta": num(delta),
                "regime": regime_name(sol.regime),
                "k": sol.k,
                "spectrum": spectrum_json(&sol.spectrum),
                "policy": policy_json(&sol.report.policy),
                "report": report_json(&sol.report),
                "mutual_information": mutual_information_json(i_xz, i_yz),
            }))
        }
        IbRequest::Alpha(alpha) => {
            let sol = solve_constrained_ib(source, alpha).map_err(solver_err)?;
            let noise = SymMatrix::new(sol.encoder.noise_cov.clone()).map_err(solver_err)?;
            let (i_xz, i_yz) =
                gaussian_mutual_information(source, &sol.encoder.map, Some(&noise))
                    .map_err(solver_err)?;
            Ok(json!({
                "schema": SCHEMA,
                "mode": "constrained-ib",
                "source": source_json(source),
                "alpha": num(alpha),
                "lambda_min": num(sol.lambda_min),
                "objective": num(sol.objective),
                "supported_on_min_eigenspace": sol.supported_on_min_eigenspace,
                "phi": mat_json(sol.phi.mat()),
                "encoder": {
                    "map": mat_json(&sol.encoder.map),
                    "noise_cov": mat_json(&sol.encoder.noise_cov),
                },
                "mutual_information": mutual_information_json(i_xz, i_yz),
            }))
        }
        IbRequest::Beta(beta) => {
            let sol = solve_chechik(source, beta).map_err(solver_err)?;
            let noise = SymMatrix::new(sol.noise_cov.clone()).map_err(solver_err)?;
            let (i_xz, i_yz) =
                gaussian_mutual_information(source, &sol.a_matrix, Some(&noise))
                    .map_err(solver_err)?;
            Ok(json!({
                "schema": SCHEMA,
                "mode": "chechik",
                "source": source_json(source),
                "beta": num(beta),
                "active_count": sol.active_count,
                "alphas": vec_json(&sol.alphas),
                "lambdas": vec_json(&sol.lambdas),
                "betas_critical": vec_json(&sol.betas_critical),
                "a_matrix": mat_json(&sol.a_matrix),
                "left_eigenvectors": mat_json(&sol.left_eigenvectors),
                "mutual_information": mutual_information_json(i_xz, i_yz),
            }))
        }
    }
}

pub fn cmd_ib(args: IbArgs) -> Result<i32, String> {
    if args.format == Format::Csv {
        return Err("bottleneck solutions serialize as json; use the sweep command for csv".into());
    }
    let source = load_source(&args.source)?;
    let request = IbRequest::from_flags(args.delta, args.alpha, args.beta)?;
    let doc = ib_document(&source, request)?;
    emit(&json_text(&doc), args.out.as_deref())?;
    Ok(0)
}

pub fn cmd_quantize(args: QuantizeArgs) -> Result<i32, String> {
    let q = lloyd_max_gaussian(args.levels, args.tol, args.max_iter).map_err(solver_err)?;
    let doc = json!({
        "schema": SCHEMA,
        "levels": q.levels(),
        "thresholds": vec_json(q.boundaries()),
        "reconstructions": vec_json(q.reconstructions()),
        "mse": num(q.mse()),
        "iterations": q.iterations(),
    });
    emit(&json_text(&doc), args.out.as_deref())?;
    Ok(0)
}

fn sweep_mode_name(mode: SweepMode) -> &'static str {
    match mode {
        SweepMode::Nash => "nash",
        SweepMode::Stackelberg => "stackelberg",
        SweepMode::Ib => "ib",
        SweepMode::Awgn => "awgn",
        SweepMode::Discrete => "discrete",
    }
}

fn axis_name(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Delta => "delta",
        SweepAxis::Rho => "rho",
        SweepAxis::SigmaW2 => "sigma-w2",
        SweepAxis::Levels => "levels",
    }
}

pub fn cmd_sweep(args: SweepArgs) -> Result<i32, String> {
    if args.grid.is_empty() {
        return Err("--grid needs at least one value".into());
    }
    if args.grid.iter().any(|v| !v.is_finite()) {
        return Err("--grid values must be finite".into());
    }
    if args.grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err("--grid values must be strictly increasing".into());
    }
    match args.axis {
        SweepAxis::SigmaW2 if args.mode != SweepMode::Awgn => {
            return Err("--axis sigma-w2 applies to --mode awgn".into())
        }
        SweepAxis::Levels if args.mode != SweepMode::Discrete => {
            return Err("--axis levels applies to --mode discrete".into())
        }
        _ => {}
    }
    let axis_fixed_too = match args.axis {
        SweepAxis::Delta => args.delta.is_some(),
        SweepAxis::Rho => args.rho.is_some(),
        SweepAxis::SigmaW2 => args.sigma_w2.is_some(),
        SweepAxis::Levels => args.levels.is_some(),
    };
    if axis_fixed_too {
        return Err(format!(
            "--{} is the swept axis; do not also pass it as a fixed value",
            axis_name(args.axis)
        ));
    }
    match args.mode {
        SweepMode::Awgn => {
            args.p.ok_or("--p is required for --mode awgn")?;
            if args.axis != SweepAxis::SigmaW2 {
                args.sigma_w2.ok_or("--sigma-w2 is required for --mode awgn")?;
            }
        }
        SweepMode::Discrete => {
            if args.axis != SweepAxis::Levels {
                args.levels.ok_or("--levels is required for --mode discrete")?;
            }
        }
        _ => {
            if args.p.is_some() || args.sigma_w2.is_some() {
                return Err("--p/--sigma-w2 apply to --mode awgn".into());
            }
            if args.levels.is_some() {
                return Err("--levels applies to --mode discrete".into());
            }
        }
    }
    if args.axis == SweepAxis::Levels {
        for &v in &args.grid {
            if v.fract() != 0.0 || !(2.0..=65536.0).contains(&v) {
                return Err(format!("--grid for levels needs whole numbers >= 2, got {v}"));
            }
        }
    }

    let mut rows = Vec::with_capacity(args.grid.len());
    for &v in &args.grid {
        rows.push(sweep_row(&args, v)?);
    }

    let text = match args.format {
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for row in &rows {
                s.push_str(&row.to_csv_line());
                s.push('\n');
            }
            s
        }
        Format::Json => json_text(&json!({
            "schema": SCHEMA,
            "seed": args.seed,
            "rows": rows.iter().map(SweepRow::to_json).collect::<Vec<_>>(),
        })),
    };
    emit(&text, args.out.as_deref())?;
    Ok(0)
}

fn sweep_row(args: &SweepArgs, v: f64) -> Result<SweepRow, String> {
    let delta = if args.axis == SweepAxis::Delta {
        v
    } else {
        args.delta.ok_or("--delta is required")?
    };
    let rho = if args.axis == SweepAxis::Rho {
        v
    } else {
        args.rho.ok_or("--rho is required")?
    };
    let base = SweepRow {
        mode: sweep_mode_name(args.mode),
        delta: Some(delta),
        rho: Some(rho),
        sigma_x2: Some(args.sx2),
        sigma_y2: Some(args.sy2),
        ..Default::default()
    };
    match args.mode {
        SweepMode::Nash | SweepMode::Stackelberg => {
            let sol = solve_scalar(args.sx2, args.sy2, rho, delta).map_err(solver_err)?;
            Ok(SweepRow {
                mse_x: Some(sol.report.mse_x),
                mse_y: Some(sol.report.mse_y),
                j_e: Some(sol.report.j_e),
                j_d: Some(sol.report.j_d),
                b_over_a: sol.b_over_a(),
                ..base
            })
        }
        SweepMode::Ib => {
            let source = JointGaussian::scalar(args.sx2, args.sy2, rho).map_err(solver_err)?;
            let sol = solve_mmse_ib(&source, delta).map_err(solver_err)?;
            Ok(SweepRow {
                mse_x: Some(sol.report.mse_x),
                mse_y: Some(sol.report.mse_y),
                j_e: Some(sol.report.j_e),
                j_d: Some(sol.report.j_d),
                ..base
            })
        }
        SweepMode::Awgn => {
            let sigma_w2 = if args.axis == SweepAxis::SigmaW2 {
                v
            } else {
                args.sigma_w2.expect("validated above")
            };
            let p = args.p.expect("validated above");
            let sol =
                solve_awgn(args.sx2, args.sy2, rho, delta, p, sigma_w2).map_err(solver_err)?;
            Ok(SweepRow {
                p: Some(p),
                sigma_w2: Some(sigma_w2),
                mse_x: Some(sol.report.mse_x),
                mse_y: Some(sol.report.mse_y),
                j_e: Some(sol.report.j_e),
                j_d: Some(sol.report.j_d),
                b_over_a: sol.b_over_a(),
                ..base
            })
        }
        SweepMode::Discrete => {
            let levels = if args.axis == SweepAxis::Levels {
                v as usize
            } else {
                args.levels.expect("validated above")
            };
            let sol =
                solve_discrete(args.sx2, args.sy2, rho, delta, levels).map_err(solver_err)?;
            let f = &sol.report.policy.f;
            let b_over_a = if f[(0, 0)] == 0.0 {
                None
            } else {
                Some(f[(0, 1)] / f[(0, 0)])
            };
            Ok(SweepRow {
                levels: Some(levels),
                mse_x: Some(sol.report.mse_x),
                mse_y: Some(sol.report.mse_y),
                j_e: Some(sol.report.j_e),
                j_d: Some(sol.report.j_d),
                b_over_a,
                ..base
            })
        }
    }
}

fn verdict_details(report: &DeviationReport) -> &str {
    match &report.verdict {
        Verdict::Certified => "",
        Verdict::Violated(details) => details,
    }
}

pub fn cmd_verify(args: VerifyArgs) -> Result<i32, String> {
    if let Some(target) = &args.corrupt {
        if target != "encoder" {
            return Err(format!("unknown --corrupt target '{target}'"));
        }
    }
    let corrupt = args.corrupt.is_some();
    match args.mode {
        None => verify_default_suite(&args, corrupt),
        Some(VerifyMode::Scalar) => verify_scalar(&args, corrupt),
        Some(VerifyMode::Stackelberg) => verify_stackelberg(&args, corrupt),
        Some(VerifyMode::Consistency) => verify_consistency(&args, corrupt),
        Some(VerifyMode::Discrete) => verify_discrete(&args, corrupt),
    }
}

/// One fixed-point check; the corrupt hook bends the encoder slope so the
/// stale decoders no longer best-respond.
fn scalar_fixed_point(
    sx2: f64,
    sy2: f64,
    rho: f64,
    delta: f64,
    awgn: Option<(f64, f64)>,
    corrupt: bool,
    tol: f64,
) -> Result<DeviationReport, String> {
    let mut view = match awgn {
        None => {
            let sol = solve_scalar(sx2, sy2, rho, delta).map_err(solver_err)?;
            ScalarPolicyView::from_nash(&sol).map_err(solver_err)?
        }
        Some((p, sigma_w2)) => {
            let sol = solve_awgn(sx2, sy2, rho, delta, p, sigma_w2).map_err(solver_err)?;
            ScalarPolicyView::from_awgn(&sol)
        }
    };
    if corrupt {
        view.b *= 1.05;
    }
    check_nash_scalar(&view, tol).map_err(solver_err)
}

fn verify_default_suite(args: &VerifyArgs, corrupt: bool) -> Result<i32, String> {
    let mut certified = 0usize;
    for (rho, delta) in VERIFY_GRID {
        let report = scalar_fixed_point(1.0, 1.0, rho, delta, None, corrupt, args.tol)?;
        if report.certified() {
            certified += 1;
            println!("certified  fixed-point rho={rho} delta={delta} (margin {:+.3e})", report.margin);
        } else {
            println!(
                "VIOLATED   fixed-point rho={rho} delta={delta}: {}",
                verdict_details(&report)
            );
        }
    }
    println!("{certified}/{} checks certified", VERIFY_GRID.len());
    Ok(if certified == VERIFY_GRID.len() { 0 } else { 3 })
}

fn verify_scalar(args: &VerifyArgs, corrupt: bool) -> Result<i32, String> {
    let source = load_source(&args.source)?;
    if source.dim() != 2 {
        return Err("the fixed-point check reads scalar games".into());
    }
    let (sx2, sy2, rho) = scalar_params(&source);
    let delta = args.delta.ok_or("--delta is required")?;
    let awgn = match (args.p, args.sigma_w2) {
        (Some(p), Some(sw2)) => Some((p, sw2)),
        (None, None) => None,
        _ => return Err("--p and --sigma-w2 go together".into()),
    };
    let report = scalar_fixed_point(sx2, sy2, rho, delta, awgn, corrupt, args.tol)?;
    if report.certified() {
        println!("certified  fixed-point (margin {:+.3e})", report.margin);
        Ok(0)
    } else {
        println!("VIOLATED   fixed-point: {}", verdict_details(&report));
        Ok(3)
    }
}

/// Damage a baseline for the negative-control hook: bend the slope for
/// scalar games (then rescale onto the power budget if any), silence the
/// last encoder row for vector ones; decoders re-fit so the baseline is a
/// consistent — merely suboptimal — policy.
fn corrupted_baseline(spec: &GameSpec, f: &Mat) -> Result<EquilibriumReport, String> {
    let mut rows: Vec<Vec<f64>> = (0..f.rows()).map(|r| f.row(r).to_vec()).collect();
    if spec.source.dim() == 2 {
        rows[0][1] *= 1.05;
    } else {
        let last = rows.len() - 1;
        for value in &mut rows[last] {
            *value = 0.0;
        }
    }
    let mut f2 = Mat::from_rows(&rows);
    if let ChannelSpec::Awgn { power, .. } = spec.channel {
        let used = f2.mul(spec.source.sigma().mat()).mul(&f2.t()).trace();
        f2 = f2.scale((power / used).sqrt());
    }
    let (d_x, d_y) = mmse_decoders(spec, &f2).map_err(solver_err)?;
    let policy = LinearPolicyPair {
        f: f2,
        d_x,
        d_y,
        channel: spec.channel.clone(),
    };
    evaluate_linear(spec, &policy).map_err(solver_err)
}

fn verify_stackelberg(args: &VerifyArgs, corrupt: bool) -> Result<i32, String> {
    let source = load_source(&args.source)?;
    let delta = args.delta.ok_or("--delta is required")?;
    let (spec, mut baseline) = match (args.p, args.sigma_w2) {
        (Some(p), Some(sigma_w2)) => {
            if source.dim() != 2 {
                return Err("the power-constrained channel carries scalar games only".into());
            }
            let (sx2, sy2, rho) = scalar_params(&source);
            let sol = solve_awgn(sx2, sy2, rho, delta, p, sigma_w2).map_err(solver_err)?;
            (sol.spec.clone(), sol.report)
        }
        (None, None) => {
            let spec =
                GameSpec::new(source, delta, ChannelSpec::Noiseless).map_err(solver_err)?;
            let sol = solve_stackelberg(&spec).map_err(solver_err)?;
            (spec, sol.report)
        }
        _ => return Err("--p and --sigma-w2 go together".into()),
    };
    if corrupt {
        baseline = corrupted_baseline(&spec, &baseline.policy.f.clone())?;
    }
    let report = check_stackelberg(&spec, &baseline, args.n_encoders, args.seed, args.tol)
        .map_err(solver_err)?;
    if report.certified() {
        println!(
            "certified  deviation-sampling ({} candidates, margin {:+.3e})",
            report.tested, report.margin
        );
        Ok(0)
    } else {
        println!("VIOLATED   deviation-sampling: {}", verdict_details(&report));
        Ok(3)
    }
}

fn verify_consistency(args: &VerifyArgs, corrupt: bool) -> Result<i32, String> {
    if corrupt {
        return Err("--corrupt targets the equilibrium checks, not consistency".into());
    }
    let source = load_source(&args.source)?;
    let delta = args.delta.ok_or("--delta is required")?;
    let (spec, policy) = match (args.p, args.sigma_w2) {
        (Some(p), Some(sigma_w2)) => {
            if source.dim() != 2 {
                return Err("the power-constrained channel carries scalar games only".into());
            }
            let (sx2, sy2, rho) = scalar_params(&source);
            let sol = solve_awgn(sx2, sy2, rho, delta, p, sigma_w2).map_err(solver_err)?;
            (sol.spec.clone(), sol.report.policy)
        }
        (None, None) => {
            let spec =
                GameSpec::new(source, delta, ChannelSpec::Noiseless).map_err(solver_err)?;
            let sol = solve_stackelberg(&spec).map_err(solver_err)?;
            (spec, sol.report.policy)
        }
        _ => return Err("--p and --sigma-w2 go together".into()),
    };
    let report =
        check_consistency(&spec, &policy, args.mc, args.seed, args.k_sigma).map_err(solver_err)?;
    if report.pass {
        println!(
            "certified  monte-carlo consistency (z_x {:+.2}, z_y {:+.2} at {} draws)",
            report.z_x, report.z_y, args.mc
        );
        Ok(0)
    } else {
        println!(
            "VIOLATED   monte-carlo consistency: z_x {:+.2}, z_y {:+.2} exceed {:.1} sigma",
            report.z_x, report.z_y, report.k_sigma
        );
        Ok(3)
    }
}

fn verify_discrete(args: &VerifyArgs, corrupt: bool) -> Result<i32, String> {
    if corrupt {
        return Err("--corrupt targets the equilibrium checks, not consistency".into());
    }
    let source = load_source(&args.source)?;
    if source.dim() != 2 {
        return Err("the discrete channel carries scalar games only".into());
    }
    let (sx2, sy2, rho) = scalar_params(&source);
    let delta = args.delta.ok_or("--delta is required")?;
    let levels = args.levels.ok_or("--levels is required for --mode discrete")?;
    let sol = solve_discrete(sx2, sy2, rho, delta, levels).map_err(solver_err)?;
    let report = check_discrete_consistency(&sol, args.mc, args.seed, args.k_sigma)
        .map_err(solver_err)?;
    if report.pass {
        println!(
            "certified  discrete consistency (z_x {:+.2}, z_y {:+.2} at {} draws)",
            report.z_x, report.z_y, args.mc
        );
        Ok(0)
    } else {
        println!(
            "VIOLATED   discrete consistency: z_x {:+.2}, z_y {:+.2} exceed {:.1} sigma",
            report.z_x, report.z_y, report.k_sigma
        );
        Ok(3)
    }
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<i32, String> {
    let source = load_source(&args.source)?;
    let delta = args.delta.ok_or("--delta is required")?;
    let (mode, report) = match args.mode {
        SimulateMode::Scalar => {
            let spec = GameSpec::new(source, delta, ChannelSpec::Noiseless).map_err(solver_err)?;
            let sol = solve_stackelberg(&spec).map_err(solver_err)?;
            let rep = check_consistency(
                &spec,
                &sol.report.policy,
                args.n,
                args.seed,
                privsig::verify::DEFAULT_K_SIGMA,
            )
            .map_err(solver_err)?;
            ("scalar", rep)
        }
        SimulateMode::Awgn => {
            if source.dim() != 2 {
                return Err("the power-constrained channel carries scalar games only".into());
            }
            let (sx2, sy2, rho) = scalar_params(&source);
            let p = args.p.ok_or("--p is required for --mode awgn")?;
            let sigma_w2 = args.sigma_w2.ok_or("--sigma-w2 is required for --mode awgn")?;
            let sol = solve_awgn(sx2, sy2, rho, delta, p, sigma_w2).map_err(solver_err)?;
            let rep = check_consistency(
                &sol.spec.clone(),
                &sol.report.policy,
                args.n,
                args.seed,
                privsig::verify::DEFAULT_K_SIGMA,
            )
            .map_err(solver_err)?;
            ("awgn", rep)
        }
        SimulateMode::Discrete => {
            if source.dim() != 2 {
                return Err("the discrete channel carries scalar games only".into());
            }
            let (sx2, sy2, rho) = scalar_params(&source);
            let levels = args.levels.ok_or("--levels is required for --mode discrete")?;
            let sol = solve_discrete(sx2, sy2, rho, delta, levels).map_err(solver_err)?;
            let rep = check_discrete_consistency(
                &sol,
                args.n,
                args.seed,
                privsig::verify::DEFAULT_K_SIGMA,
            )
            .map_err(solver_err)?;
            ("discrete", rep)
        }
    };
    let doc = json!({
        "schema": SCHEMA,
        "mode": mode,
        "n": args.n,
        "seed": args.seed,
        "analytic": report_json(&report.analytic),
        "empirical": report_json(&report.empirical),
        "se_x": num(report.se_x),
        "se_y": num(report.se_y),
        "z_x": num(report.z_x),
        "z_y": num(report.z_y),
        "pass": report.pass,
    });
    emit(&json_text(&doc), args.out.as_deref())?;
    Ok(0)
}
