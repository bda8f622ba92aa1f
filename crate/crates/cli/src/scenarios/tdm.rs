use super::{grid, non_empty_finite, positive, require, Context, Scenario, ScenarioOutput};
use crate::CliError;
use cryomux::chainmodel::MuxModel;
use cryomux::qubitsim::{
    calibrate_pi_pulse, detected_population, partial_area_population, pure_dephasing_time, tdm_experiment, Levels,
    PulseShape, SimConfig, DEFAULT_DETECTION_FLOOR, TDM_HORIZON_FACTOR,
};
use cryomux::table::Table;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig4bTdm {
    pub t_g_s: f64,
    pub windows_ns: Vec<f64>,
    pub levels: Levels,
    pub shape: PulseShape,
    pub detection_floor: f64,
    pub t1_s: Option<f64>,
    pub t2_s: Option<f64>,
    pub mux: MuxModel,
}

impl Default for Fig4bTdm {
    fn default() -> Self {
        Self {
            t_g_s: 40e-9,
            windows_ns: grid(30, 0.5),
            levels: Levels::Two,
            shape: PulseShape::Cosine,
            detection_floor: DEFAULT_DETECTION_FLOOR,
            t1_s: None,
            t2_s: None,
            mux: MuxModel::default(),
        }
    }
}

impl Scenario for Fig4bTdm {
    fn validate(&self) -> Result<(), String> {
        positive("t_g_s", self.t_g_s)?;
        non_empty_finite("windows_ns", &self.windows_ns)?;
        let horizon_ns = TDM_HORIZON_FACTOR * self.t_g_s * 1e9;
        for &w in &self.windows_ns {
            require(
                (0.0..=horizon_ns).contains(&w),
                format!("window {w} ns outside [0, {horizon_ns}] ns"),
            )?;
        }
        require(
            (0.0..1.0).contains(&self.detection_floor),
            "`detection_floor` must lie in [0, 1)",
        )?;
        if let Some(t1) = self.t1_s {
            positive("t1_s", t1)?;
        }
        if let Some(t2) = self.t2_s {
            positive("t2_s", t2)?;
            require(self.t1_s.is_some(), "`t2_s` needs `t1_s`")?;
        }
        self.mux.validate().map_err(|e| format!("mux: {e}"))
    }

    fn run(&self, _: &Context) -> Result<ScenarioOutput, CliError> {
        let base = SimConfig::for_pulse(self.levels, self.t_g_s);
        let pulse = calibrate_pi_pulse(self.t_g_s, self.shape, &base).map_err(CliError::downstream)?;
        let t_phi = match (self.t1_s, self.t2_s) {
            (Some(t1), Some(t2)) => pure_dephasing_time(t1, t2),
            _ => None,
        };
        let config = base.with_decay(self.t1_s, t_phi);
        let floor = self.mux.floor_amplitude();
        let mut t = Table::new(
            "tdm",
            &[
                ("window", "ns"),
                ("p_e", "1"),
                ("one_minus_p_e", "1"),
                ("p_e_detected", "1"),
                ("p_e_oracle", "1"),
            ],
        );
        for &w in &self.windows_ns {
            let ws = w * 1e-9;
            let p = tdm_experiment(ws, &self.mux, &pulse, &config).map_err(CliError::downstream)?;
            t.push(vec![
                w.into(),
                p.into(),
                (1.0 - p).into(),
                detected_population(p, self.detection_floor).into(),
                partial_area_population(ws, floor, &pulse).into(),
            ]);
        }
        Ok(ScenarioOutput {
            tables: vec![t],
            documents: vec![],
        })
    }
}
