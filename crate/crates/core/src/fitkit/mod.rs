//! Nonlinear least squares and the decay models used to extract coherence
//! times, RB decay and quasiparticle parameters.

mod lm;
mod models;

pub use lm::{least_squares, Bounds, LsqOptions};
pub(crate) use models::regress;
pub use models::{
    fit_echo, fit_qp_double_exp, fit_ramsey, fit_t1, DecayFit, EchoDecay, ExpDecay, LinearModel, QpDoubleExp, QpFit,
    QpModelParams, RamseyDecay, RamseyFit, RbDecay,
};

use serde::Serialize;
use std::io::Read;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("not enough data: {points} points for {params} parameters")]
    InsufficientData { points: usize, params: usize },
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("initial guess violates bounds for parameter `{name}`")]
    BoundsViolation { name: String },
    #[error("jacobian is singular: parameter `{name}` has no influence on the model")]
    SingularJacobian { name: String },
    #[error("no convergence after {} iterations (residual norm {})", .0.iterations, .0.residual_norm)]
    IterationCap(Box<FitResult>),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("csv: {0}")]
    Csv(String),
}

/// A parametric model `y = f(x; p)`.
pub trait Model {
    fn parameter_names(&self) -> Vec<String>;

    fn value(&self, x: f64, p: &[f64]) -> f64;

    /// Writes `∂f/∂p` into `out`. The default is a central difference with
    /// step `1e-6 · max(|p_i|, 1e-12)`.
    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let mut q = p.to_vec();
        for i in 0..p.len() {
            let h = 1e-6 * p[i].abs().max(1e-12);
            q[i] = p[i] + h;
            let up = self.value(x, &q);
            q[i] = p[i] - h;
            let down = self.value(x, &q);
            q[i] = p[i];
            out[i] = (up - down) / (2.0 * h);
        }
    }
}

/// A user model from a closure; gradients by finite differences.
pub struct FnModel<F> {
    names: Vec<String>,
    f: F,
}

impl<F: Fn(f64, &[f64]) -> f64> FnModel<F> {
    pub fn new(names: &[&str], f: F) -> Self {
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            f,
        }
    }
}

impl<F: Fn(f64, &[f64]) -> f64> Model for FnModel<F> {
    fn parameter_names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn value(&self, x: f64, p: &[f64]) -> f64 {
        (self.f)(x, p)
    }
}

/// Observations with optional per-point standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, FitError> {
        let d = Self { x, y, sigma: None };
        d.check()?;
        Ok(d)
    }

    pub fn with_sigma(mut self, sigma: Vec<f64>) -> Result<Self, FitError> {
        self.sigma = Some(sigma);
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<(), FitError> {
        if self.x.len() != self.y.len() {
            return Err(FitError::InvalidData(format!(
                "x has {} points, y has {}",
                self.x.len(),
                self.y.len()
            )));
        }
        if self.x.iter().chain(&self.y).any(|v| !v.is_finite()) {
            return Err(FitError::InvalidData("non-finite sample".into()));
        }
        if let Some(s) = &self.sigma {
            if s.len() != self.x.len() || s.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(FitError::InvalidData("sigma must be positive, one per point".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn require_increasing(&self) -> Result<(), FitError> {
        if self.x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FitError::InvalidData("time axis must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Reads a two-column `time_s,signal` CSV with a header row.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, FitError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| FitError::Csv(e.to_string()))?.clone();
        if headers.len() != 2 {
            return Err(FitError::Csv(format!("expected 2 columns, found {}", headers.len())));
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| FitError::Csv(e.to_string()))?;
            let parse = |i: usize| {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| FitError::Csv(format!("line {:?}: {e}", rec.position().map(|p| p.line()))))
            };
            x.push(parse(0)?);
            y.push(parse(1)?);
        }
        Self::new(x, y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitParameter {
    pub name: String,
    pub value: f64,
    /// Infinite along directions the data do not constrain.
    pub standard_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub parameters: Vec<FitParameter>,
    pub covariance: Option<Vec<Vec<f64>>>,
    /// `sqrt(Σ rᵢ²)` of the (weighted) residuals.
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Cost `½Σrᵢ²` after each accepted step, starting with the initial cost.
    #[serde(skip)]
    pub cost_history: Vec<f64>,
}

impl FitResult {
    pub fn values(&self) -> Vec<f64> {
        self.parameters.iter().map(|p| p.value).collect()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn standard_error(&self, name: &str) -> Option<f64> {
        self.parameters
            .iter()
            .find(|p| p.name == name)
            .and_then(|p| p.standard_error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }
}
