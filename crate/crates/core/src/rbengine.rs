//! Single-qubit randomized benchmarking: the Clifford group over a small set
//! of physical generators, random sequences with recovery, simulated
//! execution, decay fitting and a coherence-limited fidelity model.

use crate::fitkit::{least_squares, Bounds, Dataset, FitError, FitResult, LsqOptions, RbDecay};
use crate::noisecalc::CoherenceRecord;
use crate::qubitsim::{propagator, Constant, Levels, PulseSpec, QubitState, SimConfig, SimError, Superoperator};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Hilbert-space dimension of a single qubit.
pub const QUBIT_DIMENSION: usize = 2;
/// Sequences per length in the reference experiment.
pub const DEFAULT_REPEATS: usize = 80;
/// Sequences per length for quick runs.
pub const DESK_REPEATS: usize = 20;
/// Log-spaced Clifford counts up to 1000.
pub const DEFAULT_LENGTHS: [usize; 10] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000];
/// Shorter ladder for quick runs.
pub const DESK_LENGTHS: [usize; 9] = [1, 5, 10, 25, 50, 100, 200, 300, 400];
/// Fitted low-frequency-noise scaling of the dephasing term, in units of t_g/3.
pub const K1_FACTOR: f64 = 0.433;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RbError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("fitted decay p = {p} is outside (0, 1]")]
    DecayOutOfRange { p: f64, fit: Box<FitResult> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Gate {
    I,
    X90,
    MinusX90,
    Y90,
    MinusY90,
    X180,
    Y180,
}

impl Gate {
    pub const ALL: [Gate; 7] = [
        Gate::I,
        Gate::X90,
        Gate::MinusX90,
        Gate::Y90,
        Gate::MinusY90,
        Gate::X180,
        Gate::Y180,
    ];

    /// (rotation angle, axis phase in the xy plane).
    pub fn rotation(self) -> (f64, f64) {
        match self {
            Gate::I => (0.0, 0.0),
            Gate::X90 => (PI / 2.0, 0.0),
            Gate::MinusX90 => (PI / 2.0, PI),
            Gate::Y90 => (PI / 2.0, PI / 2.0),
            Gate::MinusY90 => (PI / 2.0, -PI / 2.0),
            Gate::X180 => (PI, 0.0),
            Gate::Y180 => (PI, PI / 2.0),
        }
    }

    /// `exp(−iθ(cos φ σx + sin φ σy)/2)`.
    pub fn unitary(self) -> Matrix2<Complex64> {
        let (theta, phi) = self.rotation();
        let (s, c) = (theta / 2.0).sin_cos();
        let off = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, -phi);
        Matrix2::new(
            Complex64::new(c, 0.0),
            off,
            Complex64::new(0.0, -s) * Complex64::from_polar(1.0, phi),
            Complex64::new(c, 0.0),
        )
    }

    /// The physical pulse realising this gate, given a calibrated π-pulse.
    pub fn pulse(self, pi_pulse: &PulseSpec) -> PulseSpec {
        let (theta, phi) = self.rotation();
        pi_pulse
            .with_amplitude(pi_pulse.amplitude_rad_s * theta / PI)
            .with_phase(pi_pulse.phase_rad + phi)
    }
}

use Gate::*;

/// Generator decompositions, gates listed in the order they are applied.
const DECOMPOSITIONS: [&[Gate]; 24] = [
    // Paulis
    &[I],
    &[X180],
    &[Y180],
    &[Y180, X180],
    // 2π/3 rotations
    &[X90, Y90],
    &[X90, MinusY90],
    &[MinusX90, Y90],
    &[MinusX90, MinusY90],
    &[Y90, X90],
    &[Y90, MinusX90],
    &[MinusY90, X90],
    &[MinusY90, MinusX90],
    // π/2 rotations
    &[X90],
    &[MinusX90],
    &[Y90],
    &[MinusY90],
    &[MinusX90, Y90, X90],
    &[MinusX90, MinusY90, X90],
    // Hadamard-like
    &[X180, Y90],
    &[X180, MinusY90],
    &[Y180, X90],
    &[Y180, MinusX90],
    &[X90, Y90, X90],
    &[MinusX90, Y90, MinusX90],
];

/// Equal up to a global phase.
fn same_up_to_phase(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>, tol: f64) -> bool {
    (a.adjoint() * b).trace().norm() >= 2.0 - tol
}

#[derive(Debug, Clone)]
pub struct CliffordTable {
    decompositions: Vec<Vec<Gate>>,
    unitaries: Vec<Matrix2<Complex64>>,
    /// `product[i][j]`: apply `i`, then `j`.
    product: Vec<[usize; 24]>,
    inverse: [usize; 24],
    identity: usize,
}

impl CliffordTable {
    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn decomposition(&self, i: usize) -> &[Gate] {
        &self.decompositions[i]
    }

    pub fn unitary(&self, i: usize) -> &Matrix2<Complex64> {
        &self.unitaries[i]
    }

    /// The element equal to applying `first` and then `second`.
    pub fn compose(&self, first: usize, second: usize) -> usize {
        self.product[first][second]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Net element of a sequence applied left to right.
    pub fn compose_all(&self, seq: &[usize]) -> usize {
        seq.iter().fold(self.identity, |acc, &c| self.compose(acc, c))
    }

    /// Index of the element equal to `u` up to a global phase.
    pub fn find(&self, u: &Matrix2<Complex64>) -> Option<usize> {
        self.unitaries.iter().position(|v| same_up_to_phase(v, u, 1e-9))
    }

    /// Mean number of physical generators per element.
    pub fn mean_generator_count(&self) -> f64 {
        let total: usize = self.decompositions.iter().map(Vec::len).sum();
        total as f64 / self.len() as f64
    }
}

/// Builds the 24-element table from the generator decompositions and checks
/// that the elements are distinct and closed under composition.
pub fn build_clifford_table() -> CliffordTable {
    let decompositions: Vec<Vec<Gate>> = DECOMPOSITIONS.iter().map(|d| d.to_vec()).collect();
    let unitaries: Vec<Matrix2<Complex64>> = decompositions
        .iter()
        .map(|d| d.iter().fold(Matrix2::identity(), |u, g| g.unitary() * u))
        .collect();
    let n = unitaries.len();
    for i in 0..n {
        for j in 0..i {
            assert!(
                !same_up_to_phase(&unitaries[i], &unitaries[j], 1e-9),
                "decompositions {i} and {j} coincide"
            );
        }
    }
    let find = |u: &Matrix2<Complex64>| {
        unitaries
            .iter()
            .position(|v| same_up_to_phase(v, u, 1e-9))
            .expect("Clifford table is not closed")
    };
    let mut product = vec![[0usize; 24]; n];
    for i in 0..n {
        for j in 0..n {
            product[i][j] = find(&(unitaries[j] * unitaries[i]));
        }
    }
    let identity = find(&Matrix2::identity());
    let mut inverse = [0usize; 24];
    for (i, inv) in inverse.iter_mut().enumerate() {
        *inv = (0..n).find(|&j| product[i][j] == identity).expect("missing inverse");
    }
    CliffordTable {
        decompositions,
        unitaries,
        product,
        inverse,
        identity,
    }
}

fn sequence_from_rng(table: &CliffordTable, m: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut seq: Vec<usize> = (0..m).map(|_| rng.random_range(0..table.len())).collect();
    seq.push(table.inverse(table.compose_all(&seq)));
    seq
}

/// `m` uniformly random Cliffords followed by the recovery element.
pub fn rb_sequence(table: &CliffordTable, m: usize, seed: u64) -> Result<Vec<usize>, RbError> {
    if m == 0 {
        return Err(RbError::InvalidInput("sequence length must be at least 1".into()));
    }
    Ok(sequence_from_rng(table, m, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Mean survival probability per sequence length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbCurve {
    pub lengths: Vec<usize>,
    pub survival: Vec<f64>,
}

/// Noisy superoperators of the 24 Cliffords built from simulated pulses.
pub struct CliffordChannels {
    channels: Vec<Superoperator>,
    levels: Levels,
}

impl CliffordChannels {
    pub fn simulate(table: &CliffordTable, pi_pulse: &PulseSpec, config: &SimConfig) -> Result<Self, RbError> {
        let mut gates = Vec::new();
        for g in Gate::ALL {
            gates.push((g, propagator(&g.pulse(pi_pulse), &Constant(1.0), config)?));
        }
        let lookup = |g: Gate| &gates.iter().find(|(h, _)| *h == g).expect("all gates simulated").1;
        let channels = (0..table.len())
            .map(|i| {
                table
                    .decomposition(i)
                    .iter()
                    .fold(Superoperator::identity(config.levels), |acc, &g| acc.then(lookup(g)))
            })
            .collect();
        Ok(Self {
            channels,
            levels: config.levels,
        })
    }

    /// Exact gates, for reference runs.
    pub fn ideal(table: &CliffordTable) -> Self {
        let channels = (0..table.len())
            .map(|i| {
                let u = table.unitary(i);
                Superoperator::from_unitary(&DMatrix::from_iterator(2, 2, u.iter().copied()))
            })
            .collect();
        Self {
            channels,
            levels: Levels::Two,
        }
    }

    /// Ground-state population after running `seq` from the ground state.
    pub fn survival(&self, seq: &[usize]) -> f64 {
        seq.iter()
            .fold(QubitState::ground(self.levels), |s, &c| self.channels[c].apply(&s))
            .population(0)
    }
}

fn validate_ladder(lengths: &[usize], repeats: usize) -> Result<(), RbError> {
    if lengths.is_empty() || lengths[0] == 0 || lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RbError::InvalidInput(
            "lengths must be positive and strictly increasing".into(),
        ));
    }
    if repeats == 0 {
        return Err(RbError::InvalidInput("repeats must be at least 1".into()));
    }
    Ok(())
}

/// Runs `repeats` random sequences per length. Sequence `k` (counting
/// lengths-major) draws from stream `k` of the master seed, so results do not
/// depend on thread scheduling.
pub fn run_rb_with_channels(
    table: &CliffordTable,
    channels: &CliffordChannels,
    lengths: &[usize],
    repeats: usize,
    seed: u64,
) -> Result<RbCurve, RbError> {
    validate_ladder(lengths, repeats)?;
    let jobs: Vec<(usize, usize)> = (0..lengths.len())
        .flat_map(|li| (0..repeats).map(move |r| (li, r)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(li, r)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((li * repeats + r) as u64);
            channels.survival(&sequence_from_rng(table, lengths[li], &mut rng))
        })
        .collect();
    let survival = values
        .chunks(repeats)
        .map(|c| c.iter().sum::<f64>() / repeats as f64)
        .collect();
    Ok(RbCurve {
        lengths: lengths.to_vec(),
        survival,
    })
}

/// Simulated RB with a two-level transmon and the given decoherence.
pub fn run_rb(
    lengths: &[usize],
    repeats: usize,
    noise: Option<&CoherenceRecord>,
    pi_pulse: &PulseSpec,
    seed: u64,
) -> Result<RbCurve, RbError> {
    let mut config = SimConfig::for_pulse(Levels::Two, pi_pulse.duration_s);
    if let Some(n) = noise {
        config = config.with_coherence(n);
    }
    run_rb_config(lengths, repeats, pi_pulse, &config, seed)
}

pub fn run_rb_config(
    lengths: &[usize],
    repeats: usize,
    pi_pulse: &PulseSpec,
    config: &SimConfig,
    seed: u64,
) -> Result<RbCurve, RbError> {
    validate_ladder(lengths, repeats)?;
    let table = build_clifford_table();
    let channels = CliffordChannels::simulate(&table, pi_pulse, config)?;
    run_rb_with_channels(&table, &channels, lengths, repeats, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbResult {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub r_clifford: f64,
    pub r_g: f64,
    pub f_1q: f64,
    pub d: usize,
    pub p_standard_error: Option<f64>,
    pub f_1q_standard_error: Option<f64>,
    pub fit: FitResult,
}

impl RbResult {
    /// Derived error rates for decay `p` with the table's generator average.
    pub fn from_decay(a: f64, b: f64, p: f64, p_se: Option<f64>, generators_per_clifford: f64, fit: FitResult) -> Self {
        let d = QUBIT_DIMENSION as f64;
        let scale = (d - 1.0) / d / generators_per_clifford;
        let r_clifford = (1.0 - p) * (d - 1.0) / d;
        let r_g = r_clifford / generators_per_clifford;
        Self {
            a,
            b,
            p,
            r_clifford,
            r_g,
            f_1q: 1.0 - r_g,
            d: QUBIT_DIMENSION,
            p_standard_error: p_se,
            f_1q_standard_error: p_se.map(|s| s * scale),
            fit,
        }
    }
}

fn decay_guess(m: &[f64], f: &[f64], b: f64) -> Option<[f64; 3]> {
    let pts: Vec<(f64, f64)> = m
        .iter()
        .zip(f)
        .filter(|(_, &y)| y - b > 0.0)
        .map(|(&x, &y)| (x, (y - b).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let (_, slope) = crate::fitkit::regress(&xs, &ys)?;
    let p = slope.exp().clamp(1e-6, 1.0);
    let a = (f[0] - b).clamp(-1.0, 2.0);
    Some([a, b.clamp(-1.0, 2.0), p])
}

/// Fits `F = A pᵐ + B`.
///
/// Starts from B = tail mean, A = first point − B and p from a log-linear
/// regression on F − B. Short ladders rarely reach the asymptote, so a second
/// start with B = 1/d is also tried and the lower residual wins.
pub fn fit_rb(lengths: &[usize], fidelities: &[f64]) -> Result<RbResult, RbError> {
    if lengths.len() != fidelities.len() {
        return Err(RbError::InvalidInput("lengths and fidelities differ in length".into()));
    }
    let mut distinct = lengths.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(RbError::Fit(FitError::InsufficientData {
            points: distinct.len(),
            params: 3,
        }));
    }
    let m: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let data = Dataset::new(m.clone(), fidelities.to_vec())?;
    let tail = (fidelities.len() / 4).max(1);
    let tail_mean = fidelities[fidelities.len() - tail..].iter().sum::<f64>() / tail as f64;
    let bounds = Bounds::new(vec![-1.0, -1.0, f64::MIN_POSITIVE], vec![2.0, 2.0, 1.0]);
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    let starts = [tail_mean, 1.0 / QUBIT_DIMENSION as f64];
    for start in starts.iter().filter_map(|&b| decay_guess(&m, fidelities, b)) {
        match least_squares(&RbDecay, &data, &start, &bounds, &LsqOptions::default()) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.residual_norm < b.residual_norm) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let fit = match (best, last_err) {
        (Some(f), _) => f,
        (None, Some(e)) => return Err(e.into()),
        (None, None) => return Err(FitError::Degenerate("no usable initial guess".into()).into()),
    };
    let v = fit.values();
    let p = v[2];
    if !(p > 0.0 && p <= 1.0) {
        return Err(RbError::DecayOutOfRange { p, fit: Box::new(fit) });
    }
    let p_se = fit.standard_error("p");
    let per_clifford = build_clifford_table().mean_generator_count();
    Ok(RbResult::from_decay(v[0], v[1], p, p_se, per_clifford, fit))
}

/// Gate-fidelity model `F = 1 − c0 − k1/Tφ_mux`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityModel {
    pub c0: f64,
    pub k1_s: f64,
    pub t_g_s: f64,
    pub t_phi_mux_s: f64,
}

impl FidelityModel {
    /// `c0 = t_g/(3 T1) + c0_extra`, `1/Tφ_mux = 1/T2* − 1/T2*_baseline`
    /// (infinite when T2* reaches the baseline) and `k1 = 0.433 t_g/3`.
    pub fn new(t_g_s: f64, t1_s: f64, t2_star_s: f64, t2_star_baseline_s: f64, c0_extra: f64) -> Result<Self, RbError> {
        if !(t_g_s > 0.0 && t1_s > 0.0 && t2_star_s > 0.0 && t2_star_baseline_s > 0.0) {
            return Err(RbError::InvalidInput("times must be positive".into()));
        }
        let rate = 1.0 / t2_star_s - 1.0 / t2_star_baseline_s;
        Ok(Self {
            c0: t_g_s / (3.0 * t1_s) + c0_extra,
            k1_s: K1_FACTOR * t_g_s / 3.0,
            t_g_s,
            t_phi_mux_s: if rate > 0.0 { 1.0 / rate } else { f64::INFINITY },
        })
    }

    pub fn with_k1(mut self, k1_s: f64) -> Self {
        self.k1_s = k1_s;
        self
    }

    /// Dephasing contribution `k1/Tφ_mux`.
    pub fn mux_penalty(&self) -> f64 {
        if self.t_phi_mux_s.is_infinite() {
            0.0
        } else {
            self.k1_s / self.t_phi_mux_s
        }
    }

    pub fn fidelity(&self) -> f64 {
        1.0 - self.c0 - self.mux_penalty()
    }
}

pub fn coherence_limited_fidelity(
    t_g_s: f64,
    t1_s: f64,
    t2_star_s: f64,
    t2_star_baseline_s: f64,
    c0_extra: f64,
) -> Result<f64, RbError> {
    Ok(FidelityModel::new(t_g_s, t1_s, t2_star_s, t2_star_baseline_s, c0_extra)?.fidelity())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_identity_and_average() {
        let t = build_clifford_table();
        assert_eq!(t.len(), 24);
        assert_eq!(t.decomposition(t.identity()), &[Gate::I]);
        assert_eq!(t.mean_generator_count(), 1.875);
    }

    #[test]
    fn unitaries_are_unitary() {
        let t = build_clifford_table();
        for i in 0..t.len() {
            let u = t.unitary(i);
            assert!((u.adjoint() * u - Matrix2::identity()).norm() < 1e-12);
        }
        for g in Gate::ALL {
            assert!((g.unitary().adjoint() * g.unitary() - Matrix2::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn inverses_compose_to_identity() {
        let t = build_clifford_table();
        for i in 0..t.len() {
            let prod = t.unitary(t.inverse(i)) * t.unitary(i);
            assert!(same_up_to_phase(&prod, &Matrix2::identity(), 1e-12));
        }
    }

    #[test]
    fn hadamard_is_in_group() {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let t = build_clifford_table();
        assert!(t.find(&Matrix2::new(h, h, h, -h)).is_some());
    }

    #[test]
    fn sequences_recover() {
        let t = build_clifford_table();
        let s = rb_sequence(&t, 1, 9).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(t.compose_all(&s), t.identity());
        assert_eq!(rb_sequence(&t, 50, 3).unwrap(), rb_sequence(&t, 50, 3).unwrap());
        assert_ne!(rb_sequence(&t, 50, 3).unwrap(), rb_sequence(&t, 50, 4).unwrap());
        assert!(rb_sequence(&t, 0, 1).is_err());
    }

    #[test]
    fn ideal_execution_returns_to_ground() {
        let t = build_clifford_table();
        let ch = CliffordChannels::ideal(&t);
        for seed in 0..20 {
            let s = rb_sequence(&t, 200, seed).unwrap();
            assert!(ch.survival(&s) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn fit_recovers_exact_decay() {
        let m: Vec<usize> = DEFAULT_LENGTHS.to_vec();
        let f: Vec<f64> = m.iter().map(|&x| 0.5 * 0.999f64.powi(x as i32) + 0.5).collect();
        let r = fit_rb(&m, &f).unwrap();
        assert!((r.p - 0.999).abs() < 1e-6);
        assert!((r.a - 0.5).abs() < 1e-6);
        assert!((r.b - 0.5).abs() < 1e-6);
        assert!((r.r_clifford - 5e-4).abs() < 1e-8);
        assert!((r.r_g - 2.6667e-4).abs() < 1e-7);
        assert!((r.f_1q - 0.99973).abs() < 1e-5);
        assert_eq!(r.d, 2);
    }

    #[test]
    fn fit_of_flat_survival_gives_unit_fidelity() {
        let m = [1, 10, 100, 1000];
        let r = fit_rb(&m, &[1.0; 4]).unwrap();
        assert_eq!(r.p, 1.0);
        assert_eq!(r.r_g, 0.0);
        assert_eq!(r.f_1q, 1.0);
    }

    #[test]
    fn fit_needs_three_lengths() {
        assert!(matches!(
            fit_rb(&[1, 1, 2], &[1.0, 0.9, 0.8]),
            Err(RbError::Fit(FitError::InsufficientData { .. }))
        ));
    }

    #[test]
    fn fidelity_model_examples() {
        let f = coherence_limited_fidelity(40e-9, 30e-6, 40e-6, 40e-6, 0.0).unwrap();
        assert!((f - (1.0 - 40e-9 / 90e-6)).abs() < 1e-15);
        let m = FidelityModel::new(40e-9, 30e-6, 10e-6, 40e-6, 0.0).unwrap();
        let expected = 0.433 * 40e-9 / 3.0 * (1.0 / 10e-6 - 1.0 / 40e-6);
        assert!((m.mux_penalty() - expected).abs() < 1e-15);
        assert!((m.mux_penalty() - 4.33e-4).abs() < 1e-6);
        let above = FidelityModel::new(40e-9, 30e-6, 50e-6, 40e-6, 0.0).unwrap();
        assert_eq!(above.mux_penalty(), 0.0);
    }

    #[test]
    fn plateau_calibration() {
        // c0_extra chosen so the T1 and calibration terms sum to 7e-4.
        let extra = 7e-4 - 40e-9 / 90e-6;
        let f = coherence_limited_fidelity(40e-9, 30e-6, 40e-6, 40e-6, extra).unwrap();
        assert!((f - 0.9993).abs() < 1e-12);
    }

    #[test]
    fn from_decay_identities() {
        let fit = FitResult {
            parameters: Vec::new(),
            covariance: None,
            residual_norm: 0.0,
            converged: true,
            iterations: 0,
            cost_history: Vec::new(),
        };
        let r = RbResult::from_decay(0.5, 0.5, 0.99, None, 1.875, fit);
        assert!((r.f_1q - (1.0 - r.r_g)).abs() < 1e-15);
        assert!((r.r_g - r.r_clifford / 1.875).abs() < 1e-15);
        assert!((r.r_clifford - 0.01 * 0.5).abs() < 1e-15);
    }
}
