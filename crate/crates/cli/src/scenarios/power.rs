use super::{grid, non_empty_finite, positive, require, Context, Scenario, ScenarioOutput};
use crate::CliError;
use cryomux::chainmodel::{
    dynamic_power, power_sweep, qubit_capacity, required_channel_power, static_breakdown, CoolingBudget, DynamicMode,
    MuxModel,
};
use cryomux::table::Table;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig2Power {
    pub v_dd_v: Vec<f64>,
    /// Switching rate of the `dynamic` rows in the bias sweep.
    pub switch_rate_hz: f64,
    pub dynamic_rates_hz: Vec<f64>,
    pub dynamic_v_dd_v: Vec<f64>,
    pub mux: MuxModel,
}

impl Default for Fig2Power {
    fn default() -> Self {
        Self {
            v_dd_v: grid(20, 20.0),
            switch_rate_hz: 1e6,
            dynamic_rates_hz: vec![0.0, 0.25e6, 0.5e6, 0.75e6, 1e6, 2e6, 5e6],
            dynamic_v_dd_v: vec![0.7, 0.9],
            mux: MuxModel::default(),
        }
    }
}

impl Scenario for Fig2Power {
    fn validate(&self) -> Result<(), String> {
        non_empty_finite("v_dd_v", &self.v_dd_v)?;
        non_empty_finite("dynamic_rates_hz", &self.dynamic_rates_hz)?;
        non_empty_finite("dynamic_v_dd_v", &self.dynamic_v_dd_v)?;
        require(self.switch_rate_hz.is_finite(), "`switch_rate_hz` must be finite")?;
        self.mux.validate().map_err(|e| format!("mux: {e}"))
    }

    fn run(&self, _: &Context) -> Result<ScenarioOutput, CliError> {
        let m = &self.mux;
        let sweep = power_sweep(m, &self.v_dd_v, self.switch_rate_hz).map_err(CliError::downstream)?;

        let mut breakdown = Table::new("static", &[("v_dd", "V"), ("core", "W"), ("esd", "W"), ("total", "W")]);
        for &v in &self.v_dd_v {
            let (core, esd) = static_breakdown(m, v).map_err(CliError::downstream)?;
            breakdown.push(vec![v.into(), core.into(), esd.into(), (core + esd).into()]);
        }

        let mut dynamic = Table::new(
            "dynamic",
            &[
                ("switch_rate", "Hz"),
                ("v_dd", "V"),
                ("parallel", "W"),
                ("serial_digital_only", "W"),
            ],
        );
        for &v in &self.dynamic_v_dd_v {
            for &f in &self.dynamic_rates_hz {
                let par = dynamic_power(m, f, v, DynamicMode::Parallel).map_err(CliError::downstream)?;
                let ser = dynamic_power(m, f, v, DynamicMode::SerialDigitalOnly).map_err(CliError::downstream)?;
                dynamic.push(vec![f.into(), v.into(), par.into(), ser.into()]);
            }
        }
        Ok(ScenarioOutput {
            tables: vec![sweep, breakdown, dynamic],
            documents: vec![],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingCapacity {
    pub cooling_power_w: f64,
    pub per_channel_power_w: Vec<f64>,
    pub qubits: Vec<u64>,
}

impl Default for ScalingCapacity {
    fn default() -> Self {
        Self {
            cooling_power_w: 20e-6,
            per_channel_power_w: vec![1.09e-6, 0.6e-6, 0.2e-6, 20e-9, 20e-12],
            qubits: vec![100, 1_000, 10_000, 1_000_000],
        }
    }
}

impl Scenario for ScalingCapacity {
    fn validate(&self) -> Result<(), String> {
        positive("cooling_power_w", self.cooling_power_w)?;
        non_empty_finite("per_channel_power_w", &self.per_channel_power_w)?;
        for &p in &self.per_channel_power_w {
            positive("per_channel_power_w", p)?;
        }
        require(
            self.qubits.iter().all(|&q| q > 0),
            "`qubits` entries must be at least 1",
        )
    }

    fn run(&self, _: &Context) -> Result<ScenarioOutput, CliError> {
        let mut capacity = Table::new(
            "capacity",
            &[("cooling_power", "W"), ("per_channel_power", "W"), ("qubits", "1")],
        );
        for &p in &self.per_channel_power_w {
            let budget = CoolingBudget::new(self.cooling_power_w, p).map_err(CliError::downstream)?;
            capacity.push(vec![
                self.cooling_power_w.into(),
                p.into(),
                (qubit_capacity(&budget) as f64).into(),
            ]);
        }
        let mut required = Table::new(
            "required",
            &[("cooling_power", "W"), ("qubits", "1"), ("per_channel_power", "W")],
        );
        for &q in &self.qubits {
            let p = required_channel_power(self.cooling_power_w, q).map_err(CliError::downstream)?;
            required.push(vec![self.cooling_power_w.into(), (q as f64).into(), p.into()]);
        }
        Ok(ScenarioOutput {
            tables: vec![capacity, required],
            documents: vec![],
        })
    }
}
