//! Open-system simulation of a driven transmon truncated to two or three
//! levels, in the frame rotating at the drive carrier.
//!
//! The Lindblad generator is affine in the two drive quadratures, so it is
//! assembled once as `L0 + Ωx(t)·Lx + Ωy(t)·Ly` over column-stacked density
//! matrices and integrated with fixed-step RK4. Steps are aligned with the
//! modulator's breakpoints so a stepped gate is integrated exactly.

use crate::chainmodel::{GatingSchedule, MuxError, MuxModel, Port, PortGate};
use crate::fitkit::Dataset;
use crate::noisecalc::CoherenceRecord;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Integrator steps per pulse when none are given.
pub const DEFAULT_STEPS_PER_PULSE: usize = 2000;
/// Coarsest step allowed, as a fraction of the pulse duration.
pub const MIN_STEPS_PER_PULSE: usize = 200;
/// Transmon anharmonicity used when none is given (−2π·180 MHz).
pub const DEFAULT_ANHARMONICITY_RAD_S: f64 = -2.0 * PI * 180e6;
/// Excited population below which the experiment cannot resolve a signal.
pub const DEFAULT_DETECTION_FLOOR: f64 = 1e-2;
/// Largest gating window relative to the pulse duration.
pub const TDM_HORIZON_FACTOR: f64 = 2.0;
/// DRAG coefficient used when calibrating a `CosineDrag` pulse. 1 nulls
/// leakage; 0.5 gives the smaller total error for a 40 ns cosine.
pub const DEFAULT_DRAG_COEFFICIENT: f64 = 0.5;

const TRACE_TOLERANCE: f64 = 1e-6;
const CALIBRATION_TARGET: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("integrator failure at t = {time_s} s: trace drifted by {drift}")]
    IntegratorFailure { time_s: f64, drift: f64 },
    #[error("calibration: {0}")]
    Calibration(String),
    #[error(transparent)]
    Mux(#[from] MuxError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Cosine,
    CosineDrag,
}

/// A single-quadrature cosine pulse, optionally with a DRAG quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    pub duration_s: f64,
    /// Peak Rabi rate.
    pub amplitude_rad_s: f64,
    pub drag_coefficient: f64,
    /// Drive frequency minus qubit frequency.
    pub carrier_detuning_rad_s: f64,
    /// Rotation axis angle in the equatorial plane; 0 is x.
    pub phase_rad: f64,
}

impl PulseSpec {
    pub fn new(shape: PulseShape, duration_s: f64, amplitude_rad_s: f64) -> Result<Self, SimError> {
        let p = Self {
            shape,
            duration_s,
            amplitude_rad_s,
            drag_coefficient: 0.0,
            carrier_detuning_rad_s: 0.0,
            phase_rad: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_drag(mut self, coefficient: f64) -> Self {
        self.drag_coefficient = coefficient;
        self
    }

    pub fn with_phase(mut self, phase_rad: f64) -> Self {
        self.phase_rad = phase_rad;
        self
    }

    pub fn with_detuning(mut self, detuning_rad_s: f64) -> Self {
        self.carrier_detuning_rad_s = detuning_rad_s;
        self
    }

    pub fn with_amplitude(mut self, amplitude_rad_s: f64) -> Self {
        self.amplitude_rad_s = amplitude_rad_s;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(SimError::Config(format!(
                "pulse duration must be positive, got {}",
                self.duration_s
            )));
        }
        if !(self.amplitude_rad_s >= 0.0 && self.amplitude_rad_s.is_finite()) {
            return Err(SimError::Config(format!(
                "amplitude must be non-negative, got {}",
                self.amplitude_rad_s
            )));
        }
        if !self.drag_coefficient.is_finite() || !self.carrier_detuning_rad_s.is_finite() || !self.phase_rad.is_finite()
        {
            return Err(SimError::Config("pulse parameters must be finite".into()));
        }
        Ok(())
    }

    /// In-phase Rabi rate `A (1 − cos 2πt/t_g) / 2`, zero outside the pulse.
    pub fn envelope(&self, t: f64) -> f64 {
        if !(0.0..=self.duration_s).contains(&t) {
            return 0.0;
        }
        0.5 * self.amplitude_rad_s * (1.0 - (2.0 * PI * t / self.duration_s).cos())
    }

    pub fn envelope_derivative(&self, t: f64) -> f64 {
        if !(0.0..=self.duration_s).contains(&t) {
            return 0.0;
        }
        let w = 2.0 * PI / self.duration_s;
        0.5 * self.amplitude_rad_s * w * (w * t).sin()
    }

    /// Rotation angle of the full pulse through an open gate.
    pub fn area(&self) -> f64 {
        0.5 * self.amplitude_rad_s * self.duration_s
    }

    fn quadrature(&self, t: f64, anharmonicity: f64) -> f64 {
        match self.shape {
            PulseShape::Cosine => 0.0,
            PulseShape::CosineDrag if self.drag_coefficient == 0.0 || anharmonicity == 0.0 => 0.0,
            PulseShape::CosineDrag => -self.drag_coefficient * self.envelope_derivative(t) / anharmonicity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Levels {
    Two,
    Three,
}

impl Levels {
    pub fn dim(self) -> usize {
        match self {
            Levels::Two => 2,
            Levels::Three => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub levels: Levels,
    pub dt_s: f64,
    pub t1_s: Option<f64>,
    pub t_phi_s: Option<f64>,
    pub anharmonicity_rad_s: f64,
}

impl SimConfig {
    /// Decay-free configuration with the default step for a pulse of `t_g`.
    pub fn for_pulse(levels: Levels, t_g: f64) -> Self {
        Self {
            levels,
            dt_s: t_g / DEFAULT_STEPS_PER_PULSE as f64,
            t1_s: None,
            t_phi_s: None,
            anharmonicity_rad_s: DEFAULT_ANHARMONICITY_RAD_S,
        }
    }

    pub fn with_decay(mut self, t1_s: Option<f64>, t_phi_s: Option<f64>) -> Self {
        self.t1_s = t1_s;
        self.t_phi_s = t_phi_s;
        self
    }

    /// Relaxation from T1 and pure dephasing from `1/Tφ = 1/T2* − 1/(2T1)`.
    pub fn with_coherence(self, record: &CoherenceRecord) -> Self {
        let t_phi = pure_dephasing_time(record.t1_s, record.t2_star_s);
        self.with_decay(Some(record.t1_s), t_phi)
    }

    pub fn decay_free(mut self) -> Self {
        self.t1_s = None;
        self.t_phi_s = None;
        self
    }

    pub fn validate_for(&self, t_g: f64) -> Result<(), SimError> {
        if !(self.dt_s > 0.0) {
            return Err(SimError::Config(format!("dt must be positive, got {}", self.dt_s)));
        }
        if self.dt_s > t_g / MIN_STEPS_PER_PULSE as f64 * (1.0 + 1e-12) {
            return Err(SimError::Config(format!(
                "dt = {} s exceeds t_g/{MIN_STEPS_PER_PULSE} for t_g = {t_g} s",
                self.dt_s
            )));
        }
        for (name, v) in [("t1", self.t1_s), ("t_phi", self.t_phi_s)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(SimError::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if !self.anharmonicity_rad_s.is_finite() {
            return Err(SimError::Config("anharmonicity must be finite".into()));
        }
        Ok(())
    }
}

/// `Tφ` from `1/Tφ = 1/T2 − 1/(2T1)`; `None` when T2 is T1-limited.
pub fn pure_dephasing_time(t1_s: f64, t2_s: f64) -> Option<f64> {
    let rate = 1.0 / t2_s - 0.5 / t1_s;
    (rate > 0.0).then(|| 1.0 / rate)
}

/// Density matrix of the truncated transmon.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    rho: DMatrix<Complex64>,
}

impl QubitState {
    pub fn ground(levels: Levels) -> Self {
        Self::basis(levels, 0)
    }

    pub fn excited(levels: Levels) -> Self {
        Self::basis(levels, 1)
    }

    fn basis(levels: Levels, k: usize) -> Self {
        let d = levels.dim();
        let mut rho = DMatrix::zeros(d, d);
        rho[(k, k)] = Complex64::new(1.0, 0.0);
        Self { rho }
    }

    /// Validates trace, Hermiticity and positivity.
    pub fn from_density_matrix(rho: DMatrix<Complex64>) -> Result<Self, SimError> {
        if !rho.is_square() || !(rho.nrows() == 2 || rho.nrows() == 3) {
            return Err(SimError::Config("density matrix must be 2×2 or 3×3".into()));
        }
        let s = Self { rho };
        if (s.trace() - 1.0).abs() > 1e-9 {
            return Err(SimError::Config(format!("trace {} is not 1", s.trace())));
        }
        if s.hermiticity_error() > 1e-12 {
            return Err(SimError::Config("density matrix is not Hermitian".into()));
        }
        if s.min_eigenvalue() < -1e-9 {
            return Err(SimError::Config("density matrix is not positive semidefinite".into()));
        }
        Ok(s)
    }

    pub fn levels(&self) -> Levels {
        if self.rho.nrows() == 2 {
            Levels::Two
        } else {
            Levels::Three
        }
    }

    pub fn density_matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn population(&self, k: usize) -> f64 {
        self.rho[(k, k)].re
    }

    /// `p_e = ⟨1|ρ|1⟩`.
    pub fn excited_population(&self) -> f64 {
        self.population(1)
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.rho.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().min()
    }

    /// `⟨σy⟩` on the computational subspace.
    pub fn bloch_y(&self) -> f64 {
        -2.0 * self.rho[(0, 1)].im
    }

    fn vec(&self) -> DMatrix<Complex64> {
        let d = self.rho.nrows();
        DMatrix::from_column_slice(d * d, 1, self.rho.as_slice())
    }

    fn from_vec(d: usize, v: &DMatrix<Complex64>) -> Self {
        Self {
            rho: DMatrix::from_column_slice(d, d, v.as_slice()),
        }
    }
}

/// Time-dependent drive attenuation in `[0, 1]`.
pub trait Modulator {
    fn value(&self, t: f64) -> f64;

    /// Times where the value or its derivative jumps.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F: Fn(f64) -> f64> Modulator for F {
    fn value(&self, t: f64) -> f64 {
        self(t)
    }
}

impl Modulator for PortGate {
    fn value(&self, t: f64) -> f64 {
        PortGate::value(self, t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        PortGate::breakpoints(self)
    }
}

/// A constant modulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl Modulator for Constant {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }
}

/// Linear map on density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: DMatrix<Complex64>,
}

impl Superoperator {
    pub fn identity(levels: Levels) -> Self {
        let d = levels.dim();
        Self {
            dim: d,
            matrix: DMatrix::identity(d * d, d * d),
        }
    }

    /// `ρ ↦ U ρ U†`.
    pub fn from_unitary(u: &DMatrix<Complex64>) -> Self {
        let d = u.nrows();
        Self {
            dim: d,
            matrix: u.conjugate().kronecker(u),
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, state: &QubitState) -> QubitState {
        assert_eq!(state.rho.nrows(), self.dim, "dimension mismatch");
        QubitState::from_vec(self.dim, &(&self.matrix * state.vec()))
    }

    /// The map applying `self` first and then `next`.
    pub fn then(&self, next: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, next.dim, "dimension mismatch");
        Superoperator {
            dim: self.dim,
            matrix: &next.matrix * &self.matrix,
        }
    }
}

struct Generator {
    d: usize,
    l0: DMatrix<Complex64>,
    lx: DMatrix<Complex64>,
    ly: DMatrix<Complex64>,
}

fn commutator_super(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = h.nrows();
    let id = DMatrix::<Complex64>::identity(d, d);
    (id.kronecker(h) - h.transpose().kronecker(&id)) * Complex64::new(0.0, -1.0)
}

fn dissipator_super(l: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = l.nrows();
    let id = DMatrix::<Complex64>::identity(d, d);
    let ldl = l.adjoint() * l;
    let half = Complex64::new(0.5, 0.0);
    l.conjugate().kronecker(l) - id.kronecker(&ldl) * half - ldl.transpose().kronecker(&id) * half
}

impl Generator {
    fn new(pulse: &PulseSpec, config: &SimConfig) -> Self {
        let d = config.levels.dim();
        let c = |x: f64| Complex64::new(x, 0.0);
        let mut a = DMatrix::<Complex64>::zeros(d, d);
        for k in 1..d {
            a[(k - 1, k)] = c((k as f64).sqrt());
        }
        let ad = a.adjoint();
        let h0 = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                let k = i as f64;
                c(-k * pulse.carrier_detuning_rad_s + 0.5 * config.anharmonicity_rad_s * k * (k - 1.0))
            } else {
                c(0.0)
            }
        });
        let x = (&a + &ad) * c(0.5);
        let y = (&ad - &a) * Complex64::new(0.0, 0.5);
        let mut l0 = commutator_super(&h0);
        if let Some(t1) = config.t1_s {
            l0 += dissipator_super(&(&a * c((1.0 / t1).sqrt())));
        }
        if let Some(tp) = config.t_phi_s {
            let n = DMatrix::from_fn(d, d, |i, j| if i == j { c(i as f64) } else { c(0.0) });
            l0 += dissipator_super(&(n * c((2.0 / tp).sqrt())));
        }
        Self {
            d,
            l0,
            lx: commutator_super(&x),
            ly: commutator_super(&y),
        }
    }

    fn apply(&self, wx: f64, wy: f64, v: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = &self.l0 * v;
        if wx != 0.0 {
            out += (&self.lx * v) * Complex64::new(wx, 0.0);
        }
        if wy != 0.0 {
            out += (&self.ly * v) * Complex64::new(wy, 0.0);
        }
        out
    }
}

/// Integration segments over `[0, t_g]`, split at interior breakpoints.
fn segments(t_g: f64, mut cuts: Vec<f64>) -> Vec<(f64, f64)> {
    cuts.retain(|t| *t > 0.0 && *t < t_g);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(cuts);
    edges.push(t_g);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// RK4 over the pulse. `check` runs after every step on the physical state.
fn integrate<M: Modulator + ?Sized>(
    v: &mut DMatrix<Complex64>,
    pulse: &PulseSpec,
    modulator: &M,
    config: &SimConfig,
    mut check: impl FnMut(f64, &DMatrix<Complex64>) -> Result<(), SimError>,
) -> Result<(), SimError> {
    pulse.validate()?;
    config.validate_for(pulse.duration_s)?;
    let gen = Generator::new(pulse, config);
    let (sin_p, cos_p) = pulse.phase_rad.sin_cos();
    // The DRAG quadrature only cancels coupling to level 2, which the
    // two-level truncation does not have; there it is left out.
    let alpha = match config.levels {
        Levels::Two => 0.0,
        Levels::Three => config.anharmonicity_rad_s,
    };
    for (a, b) in segments(pulse.duration_s, modulator.breakpoints()) {
        let len = b - a;
        let n = ((len / config.dt_s) - 1e-9).ceil().max(1.0) as usize;
        let h = len / n as f64;
        // Modulator samples stay strictly inside the segment so a jump at an
        // edge is seen from the correct side.
        let inset = len * 1e-9;
        let drive = |t: f64| {
            let m = modulator.value(t.clamp(a + inset, b - inset));
            let i = m * pulse.envelope(t);
            let q = m * pulse.quadrature(t, alpha);
            (i * cos_p - q * sin_p, i * sin_p + q * cos_p)
        };
        for s in 0..n {
            let t = a + s as f64 * h;
            let (x0, y0) = drive(t);
            let (xm, ym) = drive(t + 0.5 * h);
            let (x1, y1) = drive(t + h);
            let half = Complex64::new(0.5 * h, 0.0);
            let k1 = gen.apply(x0, y0, v);
            let k2 = gen.apply(xm, ym, &(&*v + &k1 * half));
            let k3 = gen.apply(xm, ym, &(&*v + &k2 * half));
            let k4 = gen.apply(x1, y1, &(&*v + &k3 * Complex64::new(h, 0.0)));
            *v += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0);
            check(t + h, v)?;
        }
    }
    debug_assert_eq!(v.nrows(), gen.d * gen.d);
    Ok(())
}

/// Evolves `state` through the pulse with drive `pulse(t)·modulator(t)`.
pub fn evolve<M: Modulator + ?Sized>(
    state: &QubitState,
    pulse: &PulseSpec,
    modulator: &M,
    config: &SimConfig,
) -> Result<QubitState, SimError> {
    evolve_observed(state, pulse, modulator, config, |_, _| {})
}

/// As [`evolve`], calling `observer` with the state after every step.
pub fn evolve_observed<M: Modulator + ?Sized>(
    state: &QubitState,
    pulse: &PulseSpec,
    modulator: &M,
    config: &SimConfig,
    mut observer: impl FnMut(f64, &QubitState),
) -> Result<QubitState, SimError> {
    if state.levels() != config.levels {
        return Err(SimError::Config("state dimension does not match config levels".into()));
    }
    let d = config.levels.dim();
    let mut v = state.vec();
    integrate(&mut v, pulse, modulator, config, |t, v| {
        let s = QubitState::from_vec(d, v);
        let drift = (s.trace() - 1.0).abs();
        if !(drift <= TRACE_TOLERANCE) {
            return Err(SimError::IntegratorFailure { time_s: t, drift });
        }
        observer(t, &s);
        Ok(())
    })?;
    Ok(QubitState::from_vec(d, &v))
}

/// The superoperator of the whole pulse, for reuse across many states.
pub fn propagator<M: Modulator + ?Sized>(
    pulse: &PulseSpec,
    modulator: &M,
    config: &SimConfig,
) -> Result<Superoperator, SimError> {
    let d = config.levels.dim();
    let mut m = DMatrix::identity(d * d, d * d);
    integrate(&mut m, pulse, modulator, config, |_, _| Ok(()))?;
    Ok(Superoperator { dim: d, matrix: m })
}

/// Finds the amplitude giving a π rotation with an open gate.
///
/// Bisects on `⟨σy⟩`, which changes sign at θ = π, over `[A0/2, 3A0/2]`
/// around the area seed `A0 = 2π/t_g`. Calibration uses a decay-free
/// two-level model.
pub fn calibrate_pi_pulse(t_g: f64, shape: PulseShape, config: &SimConfig) -> Result<PulseSpec, SimError> {
    let drag = match shape {
        PulseShape::Cosine => 0.0,
        PulseShape::CosineDrag => DEFAULT_DRAG_COEFFICIENT,
    };
    calibrate_pi_pulse_with_drag(t_g, shape, drag, config)
}

pub fn calibrate_pi_pulse_with_drag(
    t_g: f64,
    shape: PulseShape,
    drag_coefficient: f64,
    config: &SimConfig,
) -> Result<PulseSpec, SimError> {
    if !(t_g > 0.0) {
        return Err(SimError::Config(format!("t_g must be positive, got {t_g}")));
    }
    let seed = 2.0 * PI / t_g;
    let base = PulseSpec::new(shape, t_g, seed)?.with_drag(drag_coefficient);
    let cfg = SimConfig {
        levels: Levels::Two,
        ..config.decay_free()
    };
    let ground = QubitState::ground(Levels::Two);
    let y = |amp: f64| evolve(&ground, &base.with_amplitude(amp), &Constant(1.0), &cfg).map(|s| s.bloch_y());
    let (mut lo, mut hi) = (0.5 * seed, 1.5 * seed);
    let (y_lo, y_hi) = (y(lo)?, y(hi)?);
    if !(y_lo < 0.0 && y_hi > 0.0) {
        return Err(SimError::Calibration(format!(
            "no π crossing bracketed (⟨σy⟩ = {y_lo}, {y_hi})"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= seed * 1e-15 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if y(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pulse = base.with_amplitude(0.5 * (lo + hi));
    let p_e = evolve(&ground, &pulse, &Constant(1.0), &cfg)?.excited_population();
    if p_e < 1.0 - CALIBRATION_TARGET {
        return Err(SimError::Calibration(format!(
            "calibrated pulse reaches only p_e = {p_e}"
        )));
    }
    Ok(pulse)
}

/// Gate feeding the qubit on RF1 while the mux idles on RF2, opened for
/// `window_s` around the pulse centre.
pub fn tdm_gate(window_s: f64, mux: &MuxModel, pulse: &PulseSpec) -> Result<PortGate, SimError> {
    let horizon = TDM_HORIZON_FACTOR * pulse.duration_s;
    if !(window_s >= 0.0) || window_s > horizon {
        return Err(SimError::Config(format!(
            "window {window_s} s outside [0, {horizon}] s"
        )));
    }
    let schedule = GatingSchedule::centered_window(mux, Port::RF2, Port::RF1, 0.5 * pulse.duration_s, window_s)?;
    Ok(PortGate {
        schedule,
        target: Port::RF1,
        rise_time_s: mux.rise_time_s,
    })
}

/// Excited population after the pulse is gated through the multiplexer.
pub fn tdm_experiment(window_s: f64, mux: &MuxModel, pulse: &PulseSpec, config: &SimConfig) -> Result<f64, SimError> {
    let gate = tdm_gate(window_s, mux, pulse)?;
    Ok(evolve(&QubitState::ground(config.levels), pulse, &gate, config)?.excited_population())
}

/// `p_e = sin²(θ/2)` with θ the pulse area reaching the qubit through an
/// ideal gate opened for `window_s` around the pulse centre.
pub fn partial_area_population(window_s: f64, floor_amplitude: f64, pulse: &PulseSpec) -> f64 {
    let t_g = pulse.duration_s;
    let w = window_s.clamp(0.0, t_g);
    let k = 2.0 * PI / t_g;
    // ∫₀ᵃ (1 − cos kt)/2 dt, normalised by t_g/2.
    let edge = |a: f64| (a / 2.0 - (k * a).sin() / (2.0 * k)) / (t_g / 2.0);
    let inside = 1.0 - 2.0 * edge((t_g - w) / 2.0);
    let theta = pulse.area() * (floor_amplitude + (1.0 - floor_amplitude) * inside);
    (theta / 2.0).sin().powi(2)
}

/// The population the experiment would report: values under the detection
/// floor read as the floor.
pub fn detected_population(p_e: f64, floor: f64) -> f64 {
    p_e.max(floor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    T1,
    Ramsey,
    Echo,
}

/// Gaussian observation noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationNoise {
    pub sigma: f64,
    pub seed: u64,
}

/// Ideal decay trace with optional additive noise.
///
/// T1: `exp(−t/T1)`; Ramsey: `½(1 + exp(−t/T2*) cos 2πΔt)`; echo:
/// `½(1 + exp(−t/T2e))`.
pub fn synth_decay_trace(
    kind: TraceKind,
    truth: &CoherenceRecord,
    detuning_hz: f64,
    times_s: &[f64],
    noise: Option<ObservationNoise>,
) -> Result<Dataset, SimError> {
    let mut y: Vec<f64> = times_s
        .iter()
        .map(|&t| match kind {
            TraceKind::T1 => (-t / truth.t1_s).exp(),
            TraceKind::Ramsey => 0.5 * (1.0 + (-t / truth.t2_star_s).exp() * (2.0 * PI * detuning_hz * t).cos()),
            TraceKind::Echo => 0.5 * (1.0 + (-t / truth.t2_echo_s).exp()),
        })
        .collect();
    if let Some(n) = noise {
        let dist = Normal::new(0.0, n.sigma).map_err(|e| SimError::Config(format!("noise sigma: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(n.seed);
        for v in &mut y {
            *v += dist.sample(&mut rng);
        }
    }
    let data = Dataset::new(times_s.to_vec(), y).map_err(|e| SimError::Config(e.to_string()))?;
    data.require_increasing().map_err(|e| SimError::Config(e.to_string()))?;
    Ok(data)
}
