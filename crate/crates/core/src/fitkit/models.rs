//! Shipped models (analytic gradients) and the coherence fits built on them.
//!
//! Conventions match the synthetic traces in `qubitsim`:
//! T1 `exp(−t/T1)`, Ramsey `½(1 + exp(−t/T2*)·cos(2πΔt))`, echo
//! `½(1 + exp(−t/T2e))`.

use super::{least_squares, Bounds, Dataset, FitError, FitResult, LsqOptions, Model};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;
use std::f64::consts::PI;

fn names(n: &[&str]) -> Vec<String> {
    n.iter().map(|s| s.to_string()).collect()
}

/// `a + b·x`
pub struct LinearModel;

impl Model for LinearModel {
    fn parameter_names(&self) -> Vec<String> {
        names(&["intercept", "slope"])
    }
    fn value(&self, x: f64, p: &[f64]) -> f64 {
        p[0] + p[1] * x
    }
    fn gradient(&self, x: f64, _p: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        out[1] = x;
    }
}

/// `exp(−t/T1)`
pub struct ExpDecay;

impl Model for ExpDecay {
    fn parameter_names(&self) -> Vec<String> {
        names(&["t1"])
    }
    fn value(&self, t: f64, p: &[f64]) -> f64 {
        (-t / p[0]).exp()
    }
    fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        out[0] = (-t / p[0]).exp() * t / (p[0] * p[0]);
    }
}

/// `½(1 + exp(−t/T2e))`
pub struct EchoDecay;

impl Model for EchoDecay {
    fn parameter_names(&self) -> Vec<String> {
        names(&["t2_echo"])
    }
    fn value(&self, t: f64, p: &[f64]) -> f64 {
        0.5 * (1.0 + (-t / p[0]).exp())
    }
    fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        out[0] = 0.5 * (-t / p[0]).exp() * t / (p[0] * p[0]);
    }
}

/// `½(1 + exp(−t/T2*)·cos(2πΔt))`, Δ in Hz.
pub struct RamseyDecay;

impl Model for RamseyDecay {
    fn parameter_names(&self) -> Vec<String> {
        names(&["t2_star", "detuning"])
    }
    fn value(&self, t: f64, p: &[f64]) -> f64 {
        0.5 * (1.0 + (-t / p[0]).exp() * (2.0 * PI * p[1] * t).cos())
    }
    fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        let e = (-t / p[0]).exp();
        let phase = 2.0 * PI * p[1] * t;
        out[0] = 0.5 * e * phase.cos() * t / (p[0] * p[0]);
        out[1] = -0.5 * e * phase.sin() * 2.0 * PI * t;
    }
}

/// RB survival `A·p^m + B`.
pub struct RbDecay;

impl Model for RbDecay {
    fn parameter_names(&self) -> Vec<String> {
        names(&["a", "b", "p"])
    }
    fn value(&self, m: f64, p: &[f64]) -> f64 {
        p[0] * p[2].powf(m) + p[1]
    }
    fn gradient(&self, m: f64, p: &[f64], out: &mut [f64]) {
        out[0] = p[2].powf(m);
        out[1] = 1.0;
        out[2] = if m == 0.0 { 0.0 } else { p[0] * m * p[2].powf(m - 1.0) };
    }
}

/// Quasiparticle double exponential
/// `exp(n_qp·(exp(−t/T1qp) − 1))·exp(−t/T1R)`.
pub struct QpDoubleExp;

impl Model for QpDoubleExp {
    fn parameter_names(&self) -> Vec<String> {
        names(&["n_qp", "t1_qp", "t1_r"])
    }
    fn value(&self, t: f64, p: &[f64]) -> f64 {
        (p[0] * ((-t / p[1]).exp() - 1.0)).exp() * (-t / p[2]).exp()
    }
    fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        let u = (-t / p[1]).exp();
        let f = (p[0] * (u - 1.0)).exp() * (-t / p[2]).exp();
        out[0] = f * (u - 1.0);
        out[1] = f * p[0] * u * t / (p[1] * p[1]);
        out[2] = f * t / (p[2] * p[2]);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub time_constant_s: f64,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamseyFit {
    pub t2_star_s: f64,
    pub detuning_hz: f64,
    pub fit: FitResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QpModelParams {
    pub n_qp: f64,
    pub t1_qp_s: f64,
    pub t1_r_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QpFit {
    pub params: QpModelParams,
    pub fit: FitResult,
}

/// Ordinary least-squares line through `(x, y)`; returns `(intercept, slope)`.
pub(crate) fn regress(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

/// Decay constant seed from `ln y` vs `t` over samples with `y > floor`.
fn log_linear_tau(t: &[f64], y: &[f64], floor: f64) -> Option<(f64, f64)> {
    let (xs, ls): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(y)
        .filter(|(_, v)| **v > floor)
        .map(|(a, v)| (*a, v.ln()))
        .unzip();
    let (c, slope) = regress(&xs, &ls)?;
    (slope < 0.0).then(|| (-1.0 / slope, c))
}

fn positive_bounds(n: usize) -> Bounds {
    Bounds::new(vec![f64::MIN_POSITIVE; n], vec![f64::INFINITY; n])
}

fn fit_single_decay<M: Model>(model: &M, data: &Dataset, transformed: &[f64]) -> Result<DecayFit, FitError> {
    data.require_increasing()?;
    let (tau0, _) = log_linear_tau(&data.x, transformed, 0.02)
        .ok_or_else(|| FitError::Degenerate("trace shows no decay".into()))?;
    let fit = least_squares(model, data, &[tau0], &positive_bounds(1), &LsqOptions::default())?;
    Ok(DecayFit {
        time_constant_s: fit.values()[0],
        fit,
    })
}

/// Fits `exp(−t/T1)`.
pub fn fit_t1(data: &Dataset) -> Result<DecayFit, FitError> {
    fit_single_decay(&ExpDecay, data, &data.y)
}

/// Fits `½(1 + exp(−t/T2e))`.
pub fn fit_echo(data: &Dataset) -> Result<DecayFit, FitError> {
    let contrast: Vec<f64> = data.y.iter().map(|v| 2.0 * v - 1.0).collect();
    fit_single_decay(&EchoDecay, data, &contrast)
}

/// Strongest non-DC frequency of `signal` sampled on an (approximately)
/// uniform grid, from a zero-padded FFT.
fn fft_peak_frequency(t: &[f64], signal: &[f64]) -> f64 {
    let n = signal.len();
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    let mean = signal.iter().sum::<f64>() / n as f64;
    let len = (16 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = signal.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let (k, _) = buf[1..len / 2]
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c.norm_sqr()))
        .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    k as f64 / (len as f64 * dt)
}

/// Fits the Ramsey fringe. Detuning is seeded from the FFT peak and reported
/// as non-negative (the model is even in Δ).
pub fn fit_ramsey(data: &Dataset) -> Result<RamseyFit, FitError> {
    data.require_increasing()?;
    if data.len() < 3 {
        return Err(FitError::InsufficientData {
            points: data.len(),
            params: 2,
        });
    }
    let contrast: Vec<f64> = data.y.iter().map(|v| 2.0 * v - 1.0).collect();
    let span = data.x[data.len() - 1] - data.x[0];
    if span <= 0.0 {
        return Err(FitError::Degenerate("zero time span".into()));
    }
    let f0 = fft_peak_frequency(&data.x, &contrast);
    let bounds = Bounds::new(vec![f64::MIN_POSITIVE, 0.0], vec![f64::INFINITY, f64::INFINITY]);
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for tau0 in [span / 3.0, span / 10.0, span] {
        for det0 in [f0, 0.0] {
            match least_squares(&RamseyDecay, data, &[tau0, det0], &bounds, &LsqOptions::default()) {
                Ok(r) => {
                    if best.as_ref().is_none_or(|b| r.residual_norm < b.residual_norm) {
                        best = Some(r);
                    }
                }
                Err(e) => last_err = Some(e),
            }
        }
    }
    let fit = best.ok_or_else(|| last_err.unwrap_or_else(|| FitError::Degenerate("no start converged".into())))?;
    let v = fit.values();
    Ok(RamseyFit {
        t2_star_s: v[0],
        detuning_hz: v[1],
        fit,
    })
}

/// Fits the quasiparticle double exponential. With `n_qp → 0` the model
/// reduces to a single exponential and `t1_qp` becomes unconstrained; its
/// standard error is then reported as infinite.
pub fn fit_qp_double_exp(data: &Dataset) -> Result<QpFit, FitError> {
    data.require_increasing()?;
    let n = data.len();
    if n < 4 {
        return Err(FitError::InsufficientData { points: n, params: 3 });
    }
    let (lo, hi) = data
        .y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < 1e-9 {
        return Err(FitError::Degenerate("flat trace".into()));
    }
    let half = n / 2;
    let (tr0, intercept) = log_linear_tau(&data.x[half..], &data.y[half..], 1e-3)
        .or_else(|| log_linear_tau(&data.x, &data.y, 1e-3))
        .ok_or_else(|| FitError::Degenerate("trace shows no decay".into()))?;
    let n0 = (-intercept).max(0.05);
    let span = data.x[n - 1] - data.x[0];
    let bounds = Bounds::new(
        vec![0.0, f64::MIN_POSITIVE, f64::MIN_POSITIVE],
        vec![f64::INFINITY, f64::INFINITY, f64::INFINITY],
    );
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for tq0 in [span / 30.0, span / 10.0, span / 3.0] {
        match least_squares(&QpDoubleExp, data, &[n0, tq0, tr0], &bounds, &LsqOptions::default()) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.residual_norm < b.residual_norm) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    // Nested candidate with no quasiparticles. The double exponential can only
    // approach it along a slow valley, so it is fitted directly and preferred
    // whenever it explains the data as well.
    let nested_bounds = Bounds::new(vec![0.0, span, f64::MIN_POSITIVE], vec![0.0, span, f64::INFINITY]);
    if let Ok(mut r) = least_squares(
        &QpDoubleExp,
        data,
        &[0.0, span, tr0],
        &nested_bounds,
        &LsqOptions::default(),
    ) {
        r.parameters[1].standard_error = Some(f64::INFINITY);
        let tolerance = 1e-9 * r.residual_norm + 1e-12;
        if best
            .as_ref()
            .is_none_or(|b| r.residual_norm <= b.residual_norm + tolerance)
        {
            best = Some(r);
        }
    }
    let fit = best.ok_or_else(|| last_err.unwrap_or_else(|| FitError::Degenerate("no start converged".into())))?;
    let v = fit.values();
    Ok(QpFit {
        params: QpModelParams {
            n_qp: v[0],
            t1_qp_s: v[1],
            t1_r_s: v[2],
        },
        fit,
    })
}
