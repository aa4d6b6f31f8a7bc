//! Subcommand implementations: thin wrappers over the library with report persistence.

use std::fmt;
use std::path::Path;

use anyhow::Context;
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use wavestab_core::evolution::{dt_max, random_perturbation, stability_experiment, EvolveConfig};
use wavestab_core::minimizer::{gamma_threshold_check, minimize_constrained, MinimizerConfig, Termination};
use wavestab_core::models::{fifth_order_fourier_coefficients, fifth_order_wave, rbo_wave, ModelKind, ModelSpec, WaveSolution};
use wavestab_core::solver::{continue_to, newton_solve, NewtonConfig};
use wavestab_core::spectrum::{check_hypothesis_h, log_second_derivative, pf2_logconcavity_check, pf2_shift, Pf2Report, SpectralReport};
use wavestab_core::stability::{stability_verdict_with, VerdictOptions};
use wavestab_core::PeriodicField;

use crate::output::{csv, emit, json, num, SCHEMA};
use crate::{Command, WaveArgs};

/// Rejected command-line configuration (exit status 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Stages used when continuing a family member to a requested `A`.
const CONTINUATION_STAGES: usize = 8;

/// Environment variable capping the number of `sweep` workers.
const THREADS_ENV: &str = "WAVESTAB_THREADS";

pub fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Wave { wave, out, json } => cmd_wave(&wave, out.as_deref(), json.as_deref()),
        Command::Spectrum { wave, tol_zero, out, csv } => cmd_spectrum(&wave, tol_zero, out.as_deref(), csv.as_deref()),
        Command::Stability { wave, fd, tol_zero, out } => cmd_stability(&wave, fd, tol_zero, out.as_deref()),
        Command::Minimize { model, omega0, gamma, n, period, max_iter, plain_gradient, out, csv } => {
            let model: ModelSpec = model.parse()?;
            let period = period.unwrap_or_else(|| model.default_period());
            let mut cfg = MinimizerConfig::new(model, omega0, gamma, n, period);
            cfg.max_iter = max_iter;
            cfg.preconditioned = !plain_gradient;
            cmd_minimize(&cfg, out.as_deref(), csv.as_deref())
        }
        Command::Evolve { wave, eps, dt, t_final, record_every, seed, modes, out } => {
            cmd_evolve(&wave, eps, dt, t_final, record_every, seed, modes, out.as_deref())
        }
        Command::Figure1 { omega, n, window, out_dir } => cmd_figure1(omega, n, window, &out_dir),
        Command::Sweep { model, omega_min, omega_max, count, a, n, out } => {
            cmd_sweep(&model, omega_min, omega_max, count, a, n, out.as_deref())
        }
    }
}

/// Closed-form family member at `ω`, Newton-polished, then continued to the requested `A`.
pub fn build_wave(args: &WaveArgs) -> anyhow::Result<WaveSolution> {
    let model: ModelSpec = args.model.parse()?;
    if !args.omega.is_finite() {
        return Err(config_error(format!("omega must be finite, got {}", args.omega)));
    }
    if let Some(p) = args.period {
        if (p - model.default_period()).abs() > 1e-12 * p.abs() {
            return Err(config_error(format!(
                "the closed-form {model} family lives on L0 = {}, got {p}",
                model.default_period()
            )));
        }
    }
    let newton = NewtonConfig::default();
    let base = match model.kind() {
        ModelKind::FifthOrder => {
            let w = fifth_order_wave(args.omega, args.n)?;
            newton_solve(&model, w.omega, w.a, &w.field, &newton)?
        }
        ModelKind::Rbo => rbo_wave(args.omega, args.n)?,
        _ => return Err(config_error(format!("no closed-form wave family for model `{model}` (use fifth or rbo)"))),
    };
    match args.a {
        Some(a) if !a.is_finite() => Err(config_error(format!("A must be finite, got {a}"))),
        Some(a) if a != base.a => {
            info!("continuing from A = {} to A = {a}", base.a);
            Ok(continue_to(&model, &base, args.omega, a, CONTINUATION_STAGES, &newton)?)
        }
        _ => Ok(base),
    }
}

fn profile_rows<'a>(fields: &'a [&'a PeriodicField]) -> impl Iterator<Item = Vec<String>> + 'a {
    let grid = *fields[0].grid();
    (0..grid.len()).map(move |j| {
        std::iter::once(num(grid.node(j))).chain(fields.iter().map(|f| num(f.values()[j]))).collect()
    })
}

#[derive(Serialize)]
struct WaveSummary {
    schema: u32,
    model: String,
    omega: f64,
    #[serde(rename = "A")]
    a: f64,
    period: f64,
    points: usize,
    mean: f64,
    integral: f64,
    max: f64,
    min: f64,
    residual_sup: f64,
}

fn cmd_wave(args: &WaveArgs, out: Option<&Path>, summary: Option<&Path>) -> anyhow::Result<()> {
    let w = build_wave(args)?;
    emit(out, &csv(&["x", "phi"], profile_rows(&[&w.field])))?;
    if let Some(path) = summary {
        let s = WaveSummary {
            schema: SCHEMA,
            model: w.model.to_string(),
            omega: w.omega,
            a: w.a,
            period: w.grid().period(),
            points: w.grid().len(),
            mean: w.field.mean(),
            integral: w.field.integral(),
            max: w.field.max(),
            min: w.field.min(),
            residual_sup: w.residual_sup,
        };
        emit(Some(path), &json(&s)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    schema: u32,
    model: String,
    omega: f64,
    #[serde(rename = "A")]
    a: f64,
    period: f64,
    points: usize,
    #[serde(flatten)]
    report: &'a SpectralReport,
}

fn cmd_spectrum(args: &WaveArgs, tol_zero: Option<f64>, out: Option<&Path>, eig_csv: Option<&Path>) -> anyhow::Result<()> {
    let w = build_wave(args)?;
    let report = check_hypothesis_h(&w, tol_zero)?;
    let doc = SpectrumOutput {
        schema: SCHEMA,
        model: w.model.to_string(),
        omega: w.omega,
        a: w.a,
        period: w.grid().period(),
        points: w.grid().len(),
        report: &report,
    };
    emit(out, &json(&doc)?)?;
    if let Some(path) = eig_csv {
        let rows = report.eigenvalues.iter().enumerate().map(|(i, v)| vec![i.to_string(), num(*v)]);
        emit(Some(path), &csv(&["index", "eigenvalue"], rows))?;
    }
    Ok(())
}

fn cmd_stability(args: &WaveArgs, fd: bool, tol_zero: Option<f64>, out: Option<&Path>) -> anyhow::Result<()> {
    let w = build_wave(args)?;
    let report = stability_verdict_with(&w, &VerdictOptions { finite_differences: fd, tol_zero })?;
    emit(out, &json(&report)?)
}

#[derive(Serialize)]
struct MinimizeOutput<'a> {
    schema: u32,
    config: &'a MinimizerConfig,
    gamma_above_threshold: bool,
    termination: Termination,
    iterations: usize,
    b_final: f64,
    constraint_residual: f64,
    grad_norm: f64,
    multiplier: f64,
    polish_distance: f64,
    residual_sup: f64,
    cube_integral: f64,
}

fn cmd_minimize(cfg: &MinimizerConfig, out: Option<&Path>, profile: Option<&Path>) -> anyhow::Result<()> {
    let res = minimize_constrained(cfg, None)?;
    let last = res.history.last().context("empty descent history")?;
    let doc = MinimizeOutput {
        schema: SCHEMA,
        config: cfg,
        gamma_above_threshold: gamma_threshold_check(cfg.gamma, cfg.omega0, cfg.period),
        termination: res.termination,
        iterations: res.history.len() - 1,
        b_final: last.b,
        constraint_residual: last.constraint_residual,
        grad_norm: last.grad_norm,
        multiplier: res.multiplier,
        polish_distance: res.polish_distance,
        residual_sup: res.wave.residual_sup,
        cube_integral: res.wave.field.cube_integral(),
    };
    emit(out, &json(&doc)?)?;
    if let Some(path) = profile {
        emit(Some(path), &csv(&["x", "phi", "u"], profile_rows(&[&res.wave.field, &res.raw])))?;
    }
    Ok(())
}

/// `|x − x₀|/|x₀|` (absolute when `x₀ = 0`).
fn deviation(x: f64, x0: f64) -> f64 {
    if x0 != 0.0 {
        (x - x0).abs() / x0.abs()
    } else {
        (x - x0).abs()
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_evolve(
    args: &WaveArgs,
    eps: f64,
    dt: Option<f64>,
    t_final: f64,
    record_every: usize,
    seed: u64,
    modes: usize,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let w = build_wave(args)?;
    let p = random_perturbation(*w.grid(), seed, modes);
    let dt = match dt {
        Some(dt) => dt,
        None => dt_max(&w.field.lin_comb(1.0, &p, eps), w.model.symbol())?.min(1e-3),
    };
    let cfg = EvolveConfig::new(dt, t_final, record_every);
    let st = stability_experiment(&w, eps, &cfg, &p)?;
    info!(
        "evolved to T = {t_final}: drift_P {:.3e}, drift_F {:.3e}, amplification {:.4}",
        st.drift_p,
        st.drift_f,
        st.amplification()
    );
    let rows = (0..st.times.len()).map(|k| {
        vec![
            num(st.times[k]),
            num(deviation(st.p_series[k], st.p_series[0])),
            num(deviation(st.f_series[k], st.f_series[0])),
            num(deviation(st.m_series[k], st.m_series[0])),
            num(st.rho_series[k]),
            st.v_series.as_ref().map_or_else(|| num(f64::NAN), |v| num(v[k])),
        ]
    });
    emit(out, &csv(&["t", "drift_P", "drift_F", "drift_M", "rho", "V"], rows))
}

#[derive(Serialize)]
struct Figure1Summary<'a> {
    schema: u32,
    omega: f64,
    #[serde(rename = "A")]
    a: f64,
    points: usize,
    phi_max: f64,
    phi_min: f64,
    /// Shift making `μ + φ` positive; the log-concavity data use `μ + φ`.
    mu: f64,
    pf2: &'a Pf2Report,
}

fn cmd_figure1(omega: f64, n: usize, window: usize, out_dir: &Path) -> anyhow::Result<()> {
    let w = build_wave(&WaveArgs { model: "fifth".into(), omega, a: None, n, period: None })?;
    let mu = pf2_shift(&w.field);
    let d2 = log_second_derivative(&w.field, mu)?;
    let mut seq = fifth_order_fourier_coefficients(omega, window)?.derived;
    seq[0] += mu;
    let pf2 = pf2_logconcavity_check(&seq, (0, window))?;

    std::fs::create_dir_all(out_dir)?;
    emit(Some(&out_dir.join("figure1_phi.csv")), &csv(&["x", "phi"], profile_rows(&[&w.field])))?;
    emit(Some(&out_dir.join("figure1_log_d2.csv")), &csv(&["x", "d2_log_g"], profile_rows(&[&d2])))?;
    let rows = pf2.log_second_differences.iter().map(|(k, v)| vec![k.to_string(), num(*v)]);
    emit(Some(&out_dir.join("figure1_coeff_log_d2.csv")), &csv(&["n", "log_second_difference"], rows))?;
    let summary = Figure1Summary {
        schema: SCHEMA,
        omega,
        a: w.a,
        points: n,
        phi_max: w.field.max(),
        phi_min: w.field.min(),
        mu,
        pf2: &pf2,
    };
    emit(Some(&out_dir.join("figure1.json")), &json(&summary)?)
}

/// Worker count from `WAVESTAB_THREADS`, or rayon's default when unset.
fn sweep_threads() -> anyhow::Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(config_error(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

fn cmd_sweep(
    model: &str,
    omega_min: f64,
    omega_max: f64,
    count: usize,
    a: Option<f64>,
    n: usize,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    if !(omega_min.is_finite() && omega_max.is_finite() && omega_min <= omega_max) || count == 0 {
        return Err(config_error("sweep needs finite omega_min <= omega_max and count >= 1"));
    }
    if count > 1 && omega_min == omega_max {
        return Err(config_error("omega_min == omega_max with count > 1"));
    }
    let omegas: Vec<f64> = (0..count)
        .map(|i| if count == 1 { omega_min } else { omega_min + (omega_max - omega_min) * i as f64 / (count - 1) as f64 })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(sweep_threads()?).build()?;
    let results: Vec<(f64, anyhow::Result<_>)> = pool.install(|| {
        omegas
            .par_iter()
            .map(|&omega| {
                let args = WaveArgs { model: model.to_string(), omega, a, n, period: None };
                let r = build_wave(&args).and_then(|w| {
                    let opts = VerdictOptions { finite_differences: false, tol_zero: None };
                    Ok(stability_verdict_with(&w, &opts)?)
                });
                (omega, r)
            })
            .collect()
    });

    let mut failures = 0;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(omega, r)| match r {
            Ok(rep) => vec![
                num(*omega),
                num(rep.a),
                num(rep.residual_sup),
                num(rep.s_phi),
                num(rep.omega_gap),
                rep.hypothesis_h.n_negative.to_string(),
                serde_json::to_value(rep.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                rep.reason.replace(',', ";"),
            ],
            Err(e) => {
                failures += 1;
                let nan = num(f64::NAN);
                vec![num(*omega), nan.clone(), nan.clone(), nan.clone(), nan, String::new(), "ERROR".into(), format!("{e:#}").replace(',', ";")]
            }
        })
        .collect();
    let header = ["omega", "A", "residual_sup", "s_phi", "omega_gap", "n_negative", "verdict", "reason"];
    emit(out, &csv(&header, rows))?;
    // Surface the first failure with its exit status after the table is written.
    match results.into_iter().find_map(|(_, r)| r.err()) {
        Some(e) => Err(e.context(format!("{failures} of {count} sweep points failed"))),
        None => Ok(()),
    }
}
