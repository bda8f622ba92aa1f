//! RF transmission envelope seen through one port while the switch follows
//! a gating schedule.
//!
//! Transitions follow a first-order (RC) response whose 10–90 % rise time is
//! the model's `rise_time`, i.e. a time constant of `rise_time / ln 9`.

use super::{MuxError, MuxModel, Port};
use crate::table::Table;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub time_s: f64,
    pub port: Port,
}

/// Time-ordered port selections. Before the first event the switch sits on
/// `initial_port` (or nothing, if `None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct GatingSchedule {
    initial_port: Option<Port>,
    events: Vec<SwitchEvent>,
    floor_amplitude: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    initial_port: Option<Port>,
    events: Vec<SwitchEvent>,
    floor_amplitude: f64,
}

impl TryFrom<RawSchedule> for GatingSchedule {
    type Error = MuxError;
    fn try_from(r: RawSchedule) -> Result<Self, Self::Error> {
        GatingSchedule::new(r.initial_port, r.events, r.floor_amplitude)
    }
}

impl GatingSchedule {
    pub fn new(initial_port: Option<Port>, events: Vec<SwitchEvent>, floor_amplitude: f64) -> Result<Self, MuxError> {
        if !(floor_amplitude > 0.0 && floor_amplitude <= 1.0) {
            return Err(MuxError::InvalidSchedule(format!(
                "floor amplitude {floor_amplitude} outside (0, 1]"
            )));
        }
        if events.iter().any(|e| !e.time_s.is_finite()) {
            return Err(MuxError::InvalidSchedule("non-finite event time".into()));
        }
        if events.windows(2).any(|w| w[1].time_s <= w[0].time_s) {
            return Err(MuxError::InvalidSchedule(
                "event times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            initial_port,
            events,
            floor_amplitude,
        })
    }

    /// Schedule whose floor comes from the model's isolation.
    pub fn for_model(model: &MuxModel, initial_port: Option<Port>, events: Vec<SwitchEvent>) -> Result<Self, MuxError> {
        Self::new(initial_port, events, model.floor_amplitude())
    }

    /// Opens `target` for `window_s` centred on `center_s`, parked on `idle`
    /// otherwise. A zero window yields a schedule with no events.
    pub fn centered_window(
        model: &MuxModel,
        idle: Port,
        target: Port,
        center_s: f64,
        window_s: f64,
    ) -> Result<Self, MuxError> {
        if !(window_s >= 0.0) {
            return Err(MuxError::InvalidSchedule(format!("negative window {window_s}")));
        }
        let events = if window_s == 0.0 {
            Vec::new()
        } else {
            vec![
                SwitchEvent {
                    time_s: center_s - window_s / 2.0,
                    port: target,
                },
                SwitchEvent {
                    time_s: center_s + window_s / 2.0,
                    port: idle,
                },
            ]
        };
        Self::for_model(model, Some(idle), events)
    }

    pub fn initial_port(&self) -> Option<Port> {
        self.initial_port
    }

    pub fn events(&self) -> &[SwitchEvent] {
        &self.events
    }

    pub fn floor_amplitude(&self) -> f64 {
        self.floor_amplitude
    }

    /// Port selected at `t` (an event applies from its own time onward).
    pub fn port_at(&self, t: f64) -> Option<Port> {
        self.events
            .iter()
            .take_while(|e| e.time_s <= t)
            .last()
            .map(|e| Some(e.port))
            .unwrap_or(self.initial_port)
    }

    fn level(&self, port: Option<Port>, target: Port) -> f64 {
        if port == Some(target) {
            1.0
        } else {
            self.floor_amplitude
        }
    }
}

/// Amplitude factor in `[floor, 1]` reaching `target` at time `t`.
pub fn gating_envelope(schedule: &GatingSchedule, target: Port, t: f64, rise_time_s: f64) -> f64 {
    if rise_time_s <= 0.0 {
        return schedule.level(schedule.port_at(t), target);
    }
    let tau = rise_time_s / 9f64.ln();
    let mut current = schedule.level(schedule.initial_port, target);
    let mut goal = current;
    let mut since = f64::NEG_INFINITY;
    for e in schedule.events.iter().take_while(|e| e.time_s <= t) {
        if since.is_finite() {
            current = goal + (current - goal) * (-(e.time_s - since) / tau).exp();
        }
        goal = schedule.level(Some(e.port), target);
        since = e.time_s;
    }
    let a = if since.is_finite() {
        goal + (current - goal) * (-(t - since) / tau).exp()
    } else {
        current
    };
    a.clamp(schedule.floor_amplitude, 1.0)
}

/// The gating envelope for one port, usable as a drive modulator.
#[derive(Debug, Clone, PartialEq)]
pub struct PortGate {
    pub schedule: GatingSchedule,
    pub target: Port,
    pub rise_time_s: f64,
}

impl PortGate {
    pub fn value(&self, t: f64) -> f64 {
        gating_envelope(&self.schedule, self.target, t, self.rise_time_s)
    }

    /// Times where the envelope is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.schedule.events.iter().map(|e| e.time_s).collect()
    }
}

/// Samples the envelope at `times_s`.
pub fn envelope_table(gate: &PortGate, times_s: &[f64]) -> Table {
    let mut t = Table::new("envelope", &[("t", "s"), ("value", "1"), ("unit", "-")]);
    for &x in times_s {
        t.push(vec![x.into(), gate.value(x).into(), "1".into()]);
    }
    t
}
