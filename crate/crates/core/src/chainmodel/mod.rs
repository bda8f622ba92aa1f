//! Behavioral model of the SP4T multiplexer: digital programming, RF
//! transfer, gating envelope and power dissipation.

mod digital;
mod envelope;
mod power;

pub use digital::{program_parallel, program_serial, MuxDigitalState, ProgrammingMode, SerialFrame};
pub use envelope::{envelope_table, gating_envelope, GatingSchedule, PortGate, SwitchEvent};
pub use power::{
    dynamic_power, power_sweep, qubit_capacity, required_channel_power, static_breakdown, static_power, CoolingBudget,
    DynamicMode, StaticAnchor,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MuxError {
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("mode violation: {0}")]
    ModeViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// One of the four switched RF ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    RF1,
    RF2,
    RF3,
    RF4,
}

impl Port {
    pub const ALL: [Port; 4] = [Port::RF1, Port::RF2, Port::RF3, Port::RF4];
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Port::RF1 => "RF1",
            Port::RF2 => "RF2",
            Port::RF3 => "RF3",
            Port::RF4 => "RF4",
        };
        f.write_str(s)
    }
}

/// Maps the 2-bit control word `(D1, D0)` to a port. Index is `2*D1 + D0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[Port; 4]", into = "[Port; 4]")]
pub struct PortMap([Port; 4]);

impl PortMap {
    pub fn new(ports: [Port; 4]) -> Result<Self, MuxError> {
        for p in Port::ALL {
            if !ports.contains(&p) {
                return Err(MuxError::InvalidModel(format!(
                    "port map is not a bijection: {p} unreachable"
                )));
            }
        }
        Ok(Self(ports))
    }

    pub fn port(&self, d1: bool, d0: bool) -> Port {
        self.0[word_index(d1, d0)]
    }

    /// Inverse lookup: the control word selecting `port`.
    pub fn word(&self, port: Port) -> (bool, bool) {
        let i = self.0.iter().position(|&p| p == port).expect("bijective map");
        (i & 0b10 != 0, i & 0b01 != 0)
    }
}

impl Default for PortMap {
    /// (0,0)→RF1, (0,1)→RF2, (1,0)→RF3, (1,1)→RF4.
    fn default() -> Self {
        Self(Port::ALL)
    }
}

impl TryFrom<[Port; 4]> for PortMap {
    type Error = MuxError;
    fn try_from(value: [Port; 4]) -> Result<Self, Self::Error> {
        PortMap::new(value)
    }
}

impl From<PortMap> for [Port; 4] {
    fn from(m: PortMap) -> Self {
        m.0
    }
}

fn word_index(d1: bool, d0: bool) -> usize {
    ((d1 as usize) << 1) | d0 as usize
}

/// Behavioral parameters of the multiplexer.
///
/// Power coefficients are stored in SI units: `static_coeff` in W/V³ above
/// threshold, `dyn_coeff*` in J/V² per switching event (equivalently W/Hz/V²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuxModel {
    pub v_threshold_v: f64,
    pub static_coeff_w_per_v3: f64,
    /// ESD clamp dissipation at `v_ref_v`.
    pub esd_static_w: f64,
    /// Bias at which `esd_static_w` was measured.
    pub v_ref_v: f64,
    pub subthreshold_leakage_w: f64,
    pub dyn_coeff_j_per_v2: f64,
    pub dyn_coeff_serial_j_per_v2: f64,
    pub isolation_db: f64,
    pub insertion_loss_db: f64,
    pub rise_time_s: f64,
    pub port_map: PortMap,
    /// In parallel mode with LE low, drop every port instead of holding the
    /// last selection.
    pub le_low_all_off: bool,
}

impl Default for MuxModel {
    /// Measured base-temperature device: 0.6 V threshold, 0.60 µW at 0.7 V
    /// of which 0.37 µW is ESD leakage, 1 pJ/Hz/V² dynamic (0.26 in serial
    /// digital-only switching), 30 dB isolation, 2.3 dB insertion loss,
    /// 2.6 ns rise time.
    fn default() -> Self {
        let anchor = StaticAnchor::MEASURED;
        Self {
            v_threshold_v: anchor.v_threshold_v,
            static_coeff_w_per_v3: anchor.coefficient(),
            esd_static_w: 0.37e-6,
            v_ref_v: anchor.v_ref_v,
            subthreshold_leakage_w: 0.0,
            dyn_coeff_j_per_v2: 1.0e-12,
            dyn_coeff_serial_j_per_v2: 0.26e-12,
            isolation_db: 30.0,
            insertion_loss_db: 2.3,
            rise_time_s: RISE_TIME_BASE_TEMPERATURE_S,
            port_map: PortMap::default(),
            le_low_all_off: false,
        }
    }
}

/// 10–90 % rise time measured inside the refrigerator.
pub const RISE_TIME_BASE_TEMPERATURE_S: f64 = 2.6e-9;
/// 10–90 % rise time measured at room temperature.
pub const RISE_TIME_ROOM_TEMPERATURE_S: f64 = 0.4e-9;

impl MuxModel {
    /// Same device with a static curve re-anchored to a different threshold.
    pub fn with_static_anchor(mut self, anchor: StaticAnchor) -> Self {
        self.v_threshold_v = anchor.v_threshold_v;
        self.v_ref_v = anchor.v_ref_v;
        self.static_coeff_w_per_v3 = anchor.coefficient();
        self
    }

    pub fn validate(&self) -> Result<(), MuxError> {
        let finite = [
            self.v_threshold_v,
            self.static_coeff_w_per_v3,
            self.esd_static_w,
            self.v_ref_v,
            self.subthreshold_leakage_w,
            self.dyn_coeff_j_per_v2,
            self.dyn_coeff_serial_j_per_v2,
            self.isolation_db,
            self.insertion_loss_db,
            self.rise_time_s,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(MuxError::InvalidModel("non-finite parameter".into()));
        }
        if self.v_threshold_v <= 0.0 {
            return Err(MuxError::InvalidModel("v_threshold must be positive".into()));
        }
        if self.v_ref_v <= self.v_threshold_v {
            return Err(MuxError::InvalidModel("reference bias must lie above threshold".into()));
        }
        if self.isolation_db < 0.0 || self.insertion_loss_db < 0.0 || self.rise_time_s < 0.0 {
            return Err(MuxError::InvalidModel(
                "isolation, insertion loss and rise time must be non-negative".into(),
            ));
        }
        if self.static_coeff_w_per_v3 < 0.0 || self.esd_static_w < 0.0 || self.subthreshold_leakage_w < 0.0 {
            return Err(MuxError::InvalidModel("static power terms must be non-negative".into()));
        }
        if !(0.0 <= self.dyn_coeff_serial_j_per_v2 && self.dyn_coeff_serial_j_per_v2 < self.dyn_coeff_j_per_v2) {
            return Err(MuxError::InvalidModel(
                "serial digital-only coefficient must be below the parallel coefficient".into(),
            ));
        }
        Ok(())
    }

    /// Amplitude leaking to an unselected port, `10^(-isolation/20)`.
    pub fn floor_amplitude(&self) -> f64 {
        db_to_amplitude(self.isolation_db)
    }

    /// Amplitude transmission through the selected port.
    pub fn insertion_amplitude(&self) -> f64 {
        db_to_amplitude(self.insertion_loss_db)
    }
}

/// Amplitude ratio for a loss of `db` decibels.
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(-db / 20.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_model_is_valid() {
        MuxModel::default().validate().unwrap();
    }

    #[test]
    fn port_map_default_assignment() {
        let m = PortMap::default();
        assert_eq!(m.port(false, false), Port::RF1);
        assert_eq!(m.port(false, true), Port::RF2);
        assert_eq!(m.port(true, false), Port::RF3);
        assert_eq!(m.port(true, true), Port::RF4);
        for p in Port::ALL {
            let (d1, d0) = m.word(p);
            assert_eq!(m.port(d1, d0), p);
        }
    }

    #[test]
    fn port_map_rejects_non_bijection() {
        assert!(PortMap::new([Port::RF1, Port::RF1, Port::RF3, Port::RF4]).is_err());
        let bad: Result<PortMap, _> = serde_json::from_str(r#"["RF2","RF2","RF3","RF4"]"#);
        assert!(bad.is_err());
    }

    #[test]
    fn serial_coefficient_must_be_below_parallel() {
        let m = MuxModel {
            dyn_coeff_serial_j_per_v2: 1.0e-12,
            ..MuxModel::default()
        };
        assert!(matches!(m.validate(), Err(MuxError::InvalidModel(_))));
    }

    #[test]
    fn floor_for_30_db() {
        let m = MuxModel::default();
        assert!((m.floor_amplitude() - 10f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn model_json_round_trip_uses_defaults() {
        let m: MuxModel = serde_json::from_str(r#"{"isolation_db": 35.0}"#).unwrap();
        assert_eq!(m.isolation_db, 35.0);
        assert_eq!(m.insertion_loss_db, 2.3);
        let back: MuxModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<MuxModel>(r#"{"isolation": 35.0}"#).is_err());
    }
}
