//! Closed-form noise calculus for the multiplexer → resonator → qubit path.
//!
//! Spectroscopic inputs are taken in Hz (ω/2π) at the API boundary and
//! converted to angular units internally. Dephasing rates `Γ` are plain
//! rates in 1/s.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// CODATA 2018 values.
pub mod constants {
    /// Planck constant, J·s (exact).
    pub const H: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant, J/K (exact).
    pub const K_B: f64 = 1.380_649e-23;
    /// Elementary charge, C (exact).
    pub const E: f64 = 1.602_176_634e-19;
}

use constants::{H, HBAR, K_B};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("dispersive shift is zero; photon-number relation is singular")]
    ZeroDispersiveShift,
    #[error("domain error: {0}")]
    Domain(String),
}

/// Transmon and readout-resonator constants, all angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub omega_q: f64,
    pub omega_r: f64,
    pub kappa_r: f64,
    pub chi: f64,
    pub alpha: f64,
    pub g: f64,
}

impl TransmonParams {
    /// Builds from frequencies in Hz (each value is ω/2π).
    pub fn from_hz(f_q: f64, f_r: f64, kappa_r: f64, chi: f64, alpha: f64, g: f64) -> Result<Self, NoiseError> {
        let p = Self {
            omega_q: 2.0 * PI * f_q,
            omega_r: 2.0 * PI * f_r,
            kappa_r: 2.0 * PI * kappa_r,
            chi: 2.0 * PI * chi,
            alpha: 2.0 * PI * alpha,
            g: 2.0 * PI * g,
        };
        if !(p.omega_q > 0.0 && p.omega_r > 0.0 && p.kappa_r > 0.0) {
            return Err(NoiseError::Domain(
                "qubit, resonator frequency and linewidth must be positive".into(),
            ));
        }
        Ok(p)
    }

    /// The benchmarked device: 3.957 GHz qubit, 6.471 GHz resonator,
    /// κ/2π = 0.697 MHz, χ/2π = −0.259 MHz, α/2π = −180 MHz, g/2π ≈ 90 MHz.
    pub fn reference_device() -> Self {
        Self::from_hz(3.957e9, 6.471e9, 0.697e6, -0.259e6, -180e6, 90e6).expect("valid constants")
    }

    pub fn f_q(&self) -> f64 {
        self.omega_q / (2.0 * PI)
    }

    pub fn f_r(&self) -> f64 {
        self.omega_r / (2.0 * PI)
    }

    /// `(κ² + 4χ²) / (4χ²κ)`: photons per unit dephasing rate.
    fn photons_per_rate(&self) -> Result<f64, NoiseError> {
        if self.chi == 0.0 {
            return Err(NoiseError::ZeroDispersiveShift);
        }
        let k = self.kappa_r;
        let c2 = 4.0 * self.chi * self.chi;
        Ok((k * k + c2) / (c2 * k))
    }
}

/// Attenuation and source bookkeeping between the multiplexer and the
/// resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    pub attenuation_db: f64,
    pub source_occupancy: f64,
    pub source_temperature_k: f64,
    pub reference_frequency_hz: f64,
}

impl NoisePath {
    pub fn from_occupancy(
        attenuation_db: f64,
        occupancy: f64,
        reference_frequency_hz: f64,
    ) -> Result<Self, NoiseError> {
        if !(attenuation_db >= 0.0 && occupancy >= 0.0 && reference_frequency_hz > 0.0) {
            return Err(NoiseError::Domain(
                "attenuation, occupancy must be ≥ 0 and frequency > 0".into(),
            ));
        }
        Ok(Self {
            attenuation_db,
            source_occupancy: occupancy,
            source_temperature_k: occupancy_to_temperature(occupancy, reference_frequency_hz)?,
            reference_frequency_hz,
        })
    }

    pub fn from_temperature(
        attenuation_db: f64,
        temperature_k: f64,
        reference_frequency_hz: f64,
    ) -> Result<Self, NoiseError> {
        let n = temperature_to_occupancy(temperature_k, reference_frequency_hz)?;
        Self::from_occupancy(attenuation_db, n, reference_frequency_hz)
    }

    /// Occupancy arriving at the resonator.
    pub fn delivered_occupancy(&self) -> f64 {
        propagate_attenuation(self.source_occupancy, self.attenuation_db, Direction::TowardQubit)
    }
}

/// Drive/charge-line coupling of a noisy source to the qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveCoupling {
    pub c_d_f: f64,
    pub c_q_f: f64,
    pub r_m_ohm: f64,
    pub t_eff_k: f64,
}

impl DriveCoupling {
    /// 0.1 fF line coupling, 110 fF qubit, 5 Ω source at 7 K effective.
    pub fn charge_line_reference() -> Self {
        Self {
            c_d_f: 0.1e-15,
            c_q_f: 110e-15,
            r_m_ohm: 5.0,
            t_eff_k: 7.0,
        }
    }
}

/// Relaxation, Ramsey and echo times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceRecord {
    pub t1_s: f64,
    pub t2_star_s: f64,
    pub t2_echo_s: f64,
}

impl CoherenceRecord {
    pub fn new(t1_s: f64, t2_star_s: f64, t2_echo_s: f64) -> Result<Self, NoiseError> {
        if !(t1_s > 0.0 && t2_star_s > 0.0 && t2_echo_s > 0.0) {
            return Err(NoiseError::Domain("coherence times must be positive".into()));
        }
        if t2_star_s > 2.0 * t1_s || t2_echo_s > 2.0 * t1_s {
            return Err(NoiseError::Domain("T2 cannot exceed 2·T1".into()));
        }
        Ok(Self {
            t1_s,
            t2_star_s,
            t2_echo_s,
        })
    }

    /// Echo decoherence rate Γ = 1/T2e.
    pub fn gamma_echo(&self) -> f64 {
        1.0 / self.t2_echo_s
    }
}

/// Thermal photon number in the resonator implied by an excess dephasing
/// rate: `n = Γ (κ² + 4χ²) / (4χ² κ)`.
pub fn occupancy_from_dephasing(gamma_excess: f64, params: &TransmonParams) -> Result<f64, NoiseError> {
    if !(gamma_excess >= 0.0) {
        return Err(NoiseError::Domain(format!("negative dephasing rate {gamma_excess}")));
    }
    Ok(gamma_excess * params.photons_per_rate()?)
}

/// Inverse of [`occupancy_from_dephasing`].
pub fn dephasing_from_occupancy(n: f64, params: &TransmonParams) -> Result<f64, NoiseError> {
    if !(n >= 0.0) {
        return Err(NoiseError::Domain(format!("negative occupancy {n}")));
    }
    Ok(n / params.photons_per_rate()?)
}

/// Bose-Einstein temperature of a mode at `f_hz` holding `n` photons.
pub fn occupancy_to_temperature(n: f64, f_hz: f64) -> Result<f64, NoiseError> {
    if !(n >= 0.0) || !(f_hz > 0.0) {
        return Err(NoiseError::Domain("need n ≥ 0 and f > 0".into()));
    }
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(H * f_hz / (K_B * (1.0 / n).ln_1p()))
}

/// Bose-Einstein occupancy `1/(exp(hf/kT) − 1)`.
pub fn temperature_to_occupancy(t_k: f64, f_hz: f64) -> Result<f64, NoiseError> {
    if !(t_k >= 0.0) || !(f_hz > 0.0) {
        return Err(NoiseError::Domain("need T ≥ 0 and f > 0".into()));
    }
    if t_k == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (H * f_hz / (K_B * t_k)).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    TowardQubit,
    TowardSource,
}

/// Scales an occupancy through a lossy section. Emission of the (cold)
/// attenuator itself is neglected.
pub fn propagate_attenuation(n: f64, attenuation_db: f64, direction: Direction) -> f64 {
    let ratio = 10f64.powf(-attenuation_db / 10.0);
    match direction {
        Direction::TowardQubit => n * ratio,
        Direction::TowardSource => n / ratio,
    }
}

/// Emission-side voltage noise of a resistor at effective temperature
/// `t_eff`: `S_VV(ω) = 4 R ħω / (exp(ħω/k_B T) − 1)` in V²/Hz.
pub fn voltage_noise_psd(r_ohm: f64, omega: f64, t_eff_k: f64) -> f64 {
    if t_eff_k <= 0.0 {
        return 0.0;
    }
    let e = HBAR * omega;
    4.0 * r_ohm * e / (e / (K_B * t_eff_k)).exp_m1()
}

/// Drive-line coupling `A_d = sqrt(ħ C_q ω_q / 2) · C_d / (C_d + C_q)`.
pub fn drive_coupling_strength(coupling: &DriveCoupling, omega_q: f64) -> f64 {
    (HBAR * coupling.c_q_f * omega_q / 2.0).sqrt() * coupling.c_d_f / (coupling.c_d_f + coupling.c_q_f)
}

/// Relaxation limit `T1 = ħ² / (A_d² S_VV(ω_q))` set by a noisy drive line.
pub fn t1_limit(coupling: &DriveCoupling, omega_q: f64) -> Result<f64, NoiseError> {
    t1_limit_attenuated(coupling, omega_q, 0.0)
}

/// [`t1_limit`] with `attenuation_db` of loss applied to `S_VV`.
pub fn t1_limit_attenuated(coupling: &DriveCoupling, omega_q: f64, attenuation_db: f64) -> Result<f64, NoiseError> {
    let c = coupling;
    if !(c.c_d_f >= 0.0 && c.c_q_f > 0.0 && c.r_m_ohm > 0.0 && c.t_eff_k >= 0.0 && omega_q > 0.0) {
        return Err(NoiseError::Domain("coupling parameters must be positive".into()));
    }
    let a_d = drive_coupling_strength(c, omega_q);
    let s_vv = voltage_noise_psd(c.r_m_ohm, omega_q, c.t_eff_k) * 10f64.powf(-attenuation_db / 10.0);
    let rate = a_d * a_d * s_vv / (HBAR * HBAR);
    Ok(if rate > 0.0 { 1.0 / rate } else { f64::INFINITY })
}

/// Additional dephasing per unit switching rate, 88.66 kHz per MHz.
pub const SWITCHING_DEPHASING_SLOPE: f64 = 88.66e3 / 1e6;

/// Linear switching-rate dephasing `Γ(f) = Γ_static + slope·f`.
pub fn dephasing_vs_switching(rate_hz: f64, gamma_static: f64, slope: f64) -> Result<f64, NoiseError> {
    if !(rate_hz >= 0.0) {
        return Err(NoiseError::Domain(format!("negative switching rate {rate_hz}")));
    }
    Ok(gamma_static + slope * rate_hz)
}

/// Dephasing rate a source occupancy would cause after `attenuation_db`.
/// Composition of attenuation and the inverse photon-number relation.
pub fn projected_dephasing(
    source_occupancy: f64,
    attenuation_db: f64,
    params: &TransmonParams,
) -> Result<f64, NoiseError> {
    let n = propagate_attenuation(source_occupancy, attenuation_db, Direction::TowardQubit);
    dephasing_from_occupancy(n, params)
}

/// Occupancy at the source implied by an excess dephasing rate observed
/// behind `attenuation_db`.
pub fn source_occupancy(gamma_excess: f64, attenuation_db: f64, params: &TransmonParams) -> Result<f64, NoiseError> {
    let n = occupancy_from_dephasing(gamma_excess, params)?;
    Ok(propagate_attenuation(n, attenuation_db, Direction::TowardSource))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dev() -> TransmonParams {
        TransmonParams::reference_device()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_rate_zero_photons() {
        assert_eq!(occupancy_from_dephasing(0.0, &dev()).unwrap(), 0.0);
        assert_eq!(dephasing_from_occupancy(0.0, &dev()).unwrap(), 0.0);
    }

    #[test]
    fn singular_without_dispersive_shift() {
        let p = TransmonParams { chi: 0.0, ..dev() };
        assert_eq!(occupancy_from_dephasing(1.0, &p), Err(NoiseError::ZeroDispersiveShift));
        assert_eq!(dephasing_from_occupancy(1.0, &p), Err(NoiseError::ZeroDispersiveShift));
    }

    #[test]
    fn on_state_echo_gives_resonator_occupancy() {
        // Hand evaluation: Γ = 1/25µs − 1/35µs = 11428.57 1/s,
        // (κ²+4χ²)/(4χ²κ) with κ=2π·0.697e6, χ=2π·0.259e6 → 6.4182e-7 s.
        let gamma = 1.0 / 25e-6 - 1.0 / 35e-6;
        let k = 2.0 * PI * 0.697e6;
        let c = 2.0 * PI * 0.259e6;
        let expected = gamma * (k * k + 4.0 * c * c) / (4.0 * c * c * k);
        let n = occupancy_from_dephasing(gamma, &dev()).unwrap();
        assert!(rel(n, expected) < 1e-14);
        assert!((n - 7.3e-3).abs() < 0.1e-3);
        let at_mux = propagate_attenuation(n, 13.0, Direction::TowardSource);
        assert!((at_mux - 0.146).abs() < 0.002);
    }

    #[test]
    fn inverse_example() {
        let g = dephasing_from_occupancy(7.3e-3, &dev()).unwrap();
        assert!((g - 1.14e4).abs() < 0.01e4);
    }

    #[test]
    fn linear_in_gamma() {
        let a = occupancy_from_dephasing(1234.0, &dev()).unwrap();
        let b = occupancy_from_dephasing(2468.0, &dev()).unwrap();
        assert!(rel(b, 2.0 * a) < 1e-15);
    }

    #[test]
    fn bose_einstein_analytic_point() {
        let f = 6.471e9;
        let n = 1.0 / (std::f64::consts::E - 1.0);
        let t = occupancy_to_temperature(n, f).unwrap();
        assert!(rel(t, H * f / K_B) < 1e-14);
        assert_eq!(occupancy_to_temperature(0.0, f).unwrap(), 0.0);
        assert_eq!(temperature_to_occupancy(0.0, f).unwrap(), 0.0);
    }

    #[test]
    fn multiplexer_temperatures() {
        let t = occupancy_to_temperature(0.146, 6.471e9).unwrap();
        assert!((t - 0.150).abs() < 0.005);
        let t = occupancy_to_temperature(1.10, 6.471e9).unwrap();
        assert!(rel(t, 0.5) < 0.10);
    }

    #[test]
    fn attenuation_examples() {
        assert_eq!(propagate_attenuation(0.3, 0.0, Direction::TowardQubit), 0.3);
        let n = propagate_attenuation(0.146, 13.0, Direction::TowardQubit);
        assert!((n - 7.3e-3).abs() < 0.05e-3);
        let n20 = propagate_attenuation(0.146, 20.0, Direction::TowardQubit);
        assert!(rel(n20, 1.46e-3) < 1e-12);
        let t2 = 1.0 / dephasing_from_occupancy(n20, &dev()).unwrap();
        assert!(t2 > 400e-6);
    }

    #[test]
    fn t1_limit_reference() {
        // Independent evaluation of the three closed forms.
        let c = DriveCoupling::charge_line_reference();
        let w = 2.0 * PI * 3.957e9;
        let a = (HBAR * 110e-15 * w / 2.0).sqrt() * (0.1 / 110.1);
        let s = 4.0 * 5.0 * HBAR * w / ((HBAR * w / (K_B * 7.0)).exp() - 1.0);
        let expected = HBAR * HBAR / (a * a * s);
        let t1 = t1_limit(&c, w).unwrap();
        assert!(rel(t1, expected) < 1e-12);
        assert!(rel(t1, 50e-6) < 0.05);
        let t1a = t1_limit_attenuated(&c, w, 20.0).unwrap();
        assert!(rel(t1a, 100.0 * t1) < 1e-12);
        assert!(t1a > 4.5e-3);
    }

    #[test]
    fn t1_limit_degenerate_cases() {
        let w = 2.0 * PI * 3.957e9;
        let cold = DriveCoupling {
            t_eff_k: 0.0,
            ..DriveCoupling::charge_line_reference()
        };
        assert_eq!(t1_limit(&cold, w).unwrap(), f64::INFINITY);
        let decoupled = DriveCoupling {
            c_d_f: 0.0,
            ..DriveCoupling::charge_line_reference()
        };
        assert_eq!(t1_limit(&decoupled, w).unwrap(), f64::INFINITY);
        let weak = DriveCoupling {
            c_d_f: 1e-22,
            ..DriveCoupling::charge_line_reference()
        };
        assert!(t1_limit(&weak, w).unwrap() > 1e6);
    }

    #[test]
    fn switching_model() {
        assert_eq!(
            dephasing_vs_switching(0.0, 123.0, SWITCHING_DEPHASING_SLOPE).unwrap(),
            123.0
        );
        let g = dephasing_vs_switching(1e6, 1.0 / 25e-6, SWITCHING_DEPHASING_SLOPE).unwrap();
        assert!((g - 128.66e3).abs() < 1e-6);
        assert!((1.0 / g - 7.8e-6).abs() < 0.05e-6);
        assert_eq!(dephasing_vs_switching(5e6, 7.0, 0.0).unwrap(), 7.0);
    }

    #[test]
    fn coherence_record_physicality() {
        assert!(CoherenceRecord::new(30e-6, 25e-6, 35e-6).is_ok());
        assert!(CoherenceRecord::new(30e-6, 61e-6, 35e-6).is_err());
        assert!(CoherenceRecord::new(0.0, 1e-6, 1e-6).is_err());
    }

    #[test]
    fn noise_path_links_occupancy_and_temperature() {
        let p = NoisePath::from_temperature(13.0, 0.15, 6.471e9).unwrap();
        let back = occupancy_to_temperature(p.source_occupancy, 6.471e9).unwrap();
        assert!(rel(back, 0.15) < 1e-12);
        assert!(rel(p.delivered_occupancy(), p.source_occupancy * 10f64.powf(-1.3)) < 1e-14);
    }

    proptest! {
        #[test]
        fn bose_einstein_round_trip(log_n in -6.0f64..1.0) {
            let n = 10f64.powf(log_n);
            let t = occupancy_to_temperature(n, 6.471e9).unwrap();
            let back = temperature_to_occupancy(t, 6.471e9).unwrap();
            prop_assert!(rel(back, n) < 1e-10);
        }

        #[test]
        fn photon_relation_round_trip(g in 0.0f64..1e7) {
            let n = occupancy_from_dephasing(g, &dev()).unwrap();
            let back = dephasing_from_occupancy(n, &dev()).unwrap();
            prop_assert!((back - g).abs() <= 1e-12 * g.max(1e-300));
        }

        #[test]
        fn attenuation_round_trip(n in 0.0f64..10.0, db in 0.0f64..60.0) {
            let there = propagate_attenuation(n, db, Direction::TowardQubit);
            let back = propagate_attenuation(there, db, Direction::TowardSource);
            prop_assert!((back - n).abs() <= 1e-12 * n.max(1e-300));
        }

        #[test]
        fn t1_limit_grows_as_source_cools(t_hi in 0.05f64..20.0, frac in 0.05f64..0.95) {
            let w = 2.0 * PI * 3.957e9;
            let hot = DriveCoupling { t_eff_k: t_hi, ..DriveCoupling::charge_line_reference() };
            let cool = DriveCoupling { t_eff_k: t_hi * frac, ..hot };
            prop_assert!(t1_limit(&cool, w).unwrap() > t1_limit(&hot, w).unwrap());
        }

        #[test]
        fn voltage_noise_vanishes_when_cold(r in 0.1f64..100.0) {
            let w = 2.0 * PI * 4e9;
            prop_assert!(voltage_noise_psd(r, w, 1e-3) < 1e-100);
            prop_assert_eq!(voltage_noise_psd(r, w, 0.0), 0.0);
        }
    }
}
