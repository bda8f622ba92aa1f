use super::{positive, require, Context, Scenario, ScenarioOutput};
use crate::CliError;
use cryomux::qubitsim::{calibrate_pi_pulse, pure_dephasing_time, Levels, PulseShape, SimConfig};
use cryomux::rbengine::{fit_rb, run_rb_config, FidelityModel, DESK_LENGTHS, DESK_REPEATS};
use cryomux::table::Table;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig4aRb {
    pub t_g_s: f64,
    pub t1_s: f64,
    pub t2_star_s: Vec<f64>,
    /// T2* without the multiplexer, for the multiplexer-penalty model.
    pub t2_star_baseline_s: f64,
    pub c0_extra: f64,
    pub lengths: Vec<usize>,
    pub repeats: usize,
    pub levels: Levels,
    pub shape: PulseShape,
}

impl Default for Fig4aRb {
    fn default() -> Self {
        Self {
            t_g_s: 40e-9,
            t1_s: 30e-6,
            t2_star_s: vec![10e-6, 15e-6, 20e-6, 25e-6, 40e-6],
            t2_star_baseline_s: 40e-6,
            c0_extra: 0.0,
            lengths: DESK_LENGTHS.to_vec(),
            repeats: DESK_REPEATS,
            levels: Levels::Two,
            shape: PulseShape::Cosine,
        }
    }
}

impl Scenario for Fig4aRb {
    fn validate(&self) -> Result<(), String> {
        positive("t_g_s", self.t_g_s)?;
        positive("t1_s", self.t1_s)?;
        positive("t2_star_baseline_s", self.t2_star_baseline_s)?;
        require(!self.t2_star_s.is_empty(), "`t2_star_s` is empty")?;
        for &t in &self.t2_star_s {
            positive("t2_star_s", t)?;
            require(t <= 2.0 * self.t1_s, format!("T2* = {t} s exceeds 2·T1"))?;
        }
        require(self.c0_extra.is_finite(), "`c0_extra` must be finite")?;
        require(self.lengths.len() >= 3, "`lengths` needs at least three entries")?;
        require(
            self.lengths[0] > 0 && self.lengths.windows(2).all(|w| w[0] < w[1]),
            "`lengths` must be positive and strictly increasing",
        )?;
        require(self.repeats > 0, "`repeats` must be at least 1")
    }

    fn run(&self, ctx: &Context) -> Result<ScenarioOutput, CliError> {
        let base = SimConfig::for_pulse(self.levels, self.t_g_s);
        let pulse = calibrate_pi_pulse(self.t_g_s, self.shape, &base).map_err(CliError::downstream)?;
        let mut summary = Table::new(
            "fidelity",
            &[
                ("t2_star", "s"),
                ("p", "1"),
                ("p_se", "1"),
                ("f_1q", "1"),
                ("f_1q_se", "1"),
                ("f_model_markovian", "1"),
                ("f_model_mux", "1"),
            ],
        );
        let mut curves = Table::new("curves", &[("t2_star", "s"), ("length", "1"), ("survival", "1")]);
        for (i, &t2) in self.t2_star_s.iter().enumerate() {
            let config = base.with_decay(Some(self.t1_s), pure_dephasing_time(self.t1_s, t2));
            let curve = run_rb_config(&self.lengths, self.repeats, &pulse, &config, ctx.sub_seed(i as u64))
                .map_err(CliError::downstream)?;
            let fit = fit_rb(&curve.lengths, &curve.survival).map_err(CliError::downstream)?;
            let markovian = FidelityModel::new(self.t_g_s, self.t1_s, t2, 2.0 * self.t1_s, self.c0_extra)
                .map_err(CliError::downstream)?
                .with_k1(self.t_g_s / 3.0);
            let mux = FidelityModel::new(self.t_g_s, self.t1_s, t2, self.t2_star_baseline_s, self.c0_extra)
                .map_err(CliError::downstream)?;
            summary.push(vec![
                t2.into(),
                fit.p.into(),
                fit.p_standard_error.unwrap_or(f64::NAN).into(),
                fit.f_1q.into(),
                fit.f_1q_standard_error.unwrap_or(f64::NAN).into(),
                markovian.fidelity().into(),
                mux.fidelity().into(),
            ]);
            for (&m, &s) in curve.lengths.iter().zip(&curve.survival) {
                curves.push(vec![t2.into(), (m as f64).into(), s.into()]);
            }
        }
        Ok(ScenarioOutput {
            tables: vec![summary, curves],
            documents: vec![],
        })
    }
}
