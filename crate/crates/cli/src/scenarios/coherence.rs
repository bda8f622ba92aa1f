use super::{grid, non_empty_finite, non_negative, positive, require, Context, DeviceHz, Scenario, ScenarioOutput};
use crate::CliError;
use cryomux::chainmodel::{static_power, MuxModel};
use cryomux::fitkit::{fit_echo, fit_ramsey, fit_t1, least_squares, Bounds, Dataset, LinearModel, LsqOptions};
use cryomux::noisecalc::{
    dephasing_vs_switching, occupancy_from_dephasing, occupancy_to_temperature, projected_dephasing,
    propagate_attenuation, source_occupancy, t1_limit, t1_limit_attenuated, CoherenceRecord, Direction, DriveCoupling,
    TransmonParams, SWITCHING_DEPHASING_SLOPE,
};
use cryomux::qubitsim::{synth_decay_trace, ObservationNoise, TraceKind};
use cryomux::table::Table;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sampling of the synthetic decay traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceSampling {
    pub points: usize,
    /// Trace length in units of the true decay time.
    pub span_factor: f64,
    /// Additive Gaussian noise on the population; 0 gives ideal traces.
    pub noise_sigma: f64,
}

impl Default for TraceSampling {
    fn default() -> Self {
        Self {
            points: 201,
            span_factor: 3.0,
            noise_sigma: 0.01,
        }
    }
}

impl TraceSampling {
    fn validate(&self) -> Result<(), String> {
        require(self.points >= 8, "`trace.points` must be at least 8")?;
        positive("trace.span_factor", self.span_factor)?;
        non_negative("trace.noise_sigma", self.noise_sigma)
    }

    fn synth(
        &self,
        kind: TraceKind,
        truth: &CoherenceRecord,
        tau: f64,
        detuning_hz: f64,
        seed: u64,
    ) -> Result<Dataset, CliError> {
        let span = self.span_factor * tau;
        let times: Vec<f64> = (0..self.points)
            .map(|i| span * i as f64 / (self.points - 1) as f64)
            .collect();
        let noise = (self.noise_sigma > 0.0).then_some(ObservationNoise {
            sigma: self.noise_sigma,
            seed,
        });
        synth_decay_trace(kind, truth, detuning_hz, &times, noise).map_err(CliError::downstream)
    }
}

/// Resonator occupancy, occupancy at the multiplexer and its temperature for
/// an excess dephasing rate seen behind `attenuation_db`.
fn noise_temperature(gamma_excess: f64, attenuation_db: f64, p: &TransmonParams) -> Result<(f64, f64, f64), CliError> {
    let n_res = occupancy_from_dephasing(gamma_excess, p).map_err(CliError::downstream)?;
    let n_mux = propagate_attenuation(n_res, attenuation_db, Direction::TowardSource);
    let t = occupancy_to_temperature(n_mux, p.omega_r / (2.0 * PI)).map_err(CliError::downstream)?;
    Ok((n_res, n_mux, t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig3Coherence {
    pub v_dd_v: Vec<f64>,
    pub t1_s: f64,
    pub t2_star_baseline_s: f64,
    pub t2_echo_baseline_s: f64,
    /// Echo time at `v_ref_v`; sets the excess rate per watt of static power.
    pub t2_echo_ref_s: f64,
    pub v_ref_v: f64,
    pub attenuation_db: f64,
    pub ramsey_detuning_hz: f64,
    pub trace: TraceSampling,
    pub device: DeviceHz,
    pub mux: MuxModel,
}

impl Default for Fig3Coherence {
    fn default() -> Self {
        Self {
            v_dd_v: grid(14, 20.0),
            t1_s: 30e-6,
            t2_star_baseline_s: 40e-6,
            t2_echo_baseline_s: 35e-6,
            t2_echo_ref_s: 25e-6,
            v_ref_v: 0.7,
            attenuation_db: 13.0,
            ramsey_detuning_hz: 0.2e6,
            trace: TraceSampling::default(),
            device: DeviceHz::default(),
            mux: MuxModel::default(),
        }
    }
}

impl Scenario for Fig3Coherence {
    fn validate(&self) -> Result<(), String> {
        non_empty_finite("v_dd_v", &self.v_dd_v)?;
        for (k, v) in [
            ("t1_s", self.t1_s),
            ("t2_star_baseline_s", self.t2_star_baseline_s),
            ("t2_echo_baseline_s", self.t2_echo_baseline_s),
            ("t2_echo_ref_s", self.t2_echo_ref_s),
            ("v_ref_v", self.v_ref_v),
        ] {
            positive(k, v)?;
        }
        require(
            self.t2_echo_ref_s < self.t2_echo_baseline_s,
            "`t2_echo_ref_s` must be shorter than `t2_echo_baseline_s`",
        )?;
        non_negative("attenuation_db", self.attenuation_db)?;
        non_negative("ramsey_detuning_hz", self.ramsey_detuning_hz)?;
        self.trace.validate()?;
        self.mux.validate().map_err(|e| format!("mux: {e}"))
    }

    fn run(&self, ctx: &Context) -> Result<ScenarioOutput, CliError> {
        let dev = self.device.transmon()?;
        let p_ref = static_power(&self.mux, self.v_ref_v).map_err(CliError::downstream)?;
        if !(p_ref > 0.0) {
            return Err(CliError::Downstream(format!(
                "no static power at v_ref = {} V",
                self.v_ref_v
            )));
        }
        let gamma_ref = 1.0 / self.t2_echo_ref_s - 1.0 / self.t2_echo_baseline_s;
        let mut t = Table::new(
            "coherence",
            &[
                ("v_dd", "V"),
                ("static_power", "W"),
                ("gamma_excess", "1/s"),
                ("t1", "s"),
                ("t2_star", "s"),
                ("t2_echo", "s"),
                ("t1_fit", "s"),
                ("t2_star_fit", "s"),
                ("t2_echo_fit", "s"),
                ("n_resonator", "1"),
                ("n_mux", "1"),
                ("t_eff_mux", "K"),
            ],
        );
        for (i, &v) in self.v_dd_v.iter().enumerate() {
            let p = static_power(&self.mux, v).map_err(CliError::downstream)?;
            let gamma = gamma_ref * p / p_ref;
            let truth = CoherenceRecord::new(
                self.t1_s,
                1.0 / (1.0 / self.t2_star_baseline_s + gamma),
                1.0 / (1.0 / self.t2_echo_baseline_s + gamma),
            )
            .map_err(CliError::downstream)?;
            let base = 3 * i as u64;
            let s = &self.trace;
            let t1 = fit_t1(&s.synth(TraceKind::T1, &truth, truth.t1_s, 0.0, ctx.sub_seed(base))?);
            let ramsey = fit_ramsey(&s.synth(
                TraceKind::Ramsey,
                &truth,
                truth.t2_star_s,
                self.ramsey_detuning_hz,
                ctx.sub_seed(base + 1),
            )?);
            let echo = fit_echo(&s.synth(TraceKind::Echo, &truth, truth.t2_echo_s, 0.0, ctx.sub_seed(base + 2))?);
            let (t1, ramsey, echo) = match (t1, ramsey, echo) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                    return Err(CliError::Downstream(format!("fit at {v} V: {e}")))
                }
            };
            let (n_res, n_mux, t_eff) = noise_temperature(gamma, self.attenuation_db, &dev)?;
            t.push(vec![
                v.into(),
                p.into(),
                gamma.into(),
                truth.t1_s.into(),
                truth.t2_star_s.into(),
                truth.t2_echo_s.into(),
                t1.time_constant_s.into(),
                ramsey.t2_star_s.into(),
                echo.time_constant_s.into(),
                n_res.into(),
                n_mux.into(),
                t_eff.into(),
            ]);
        }
        Ok(ScenarioOutput {
            tables: vec![t],
            documents: vec![],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig3fSlope {
    pub switch_rates_hz: Vec<f64>,
    pub t1_s: f64,
    /// Echo time with the multiplexer biased but not switching.
    pub t2_echo_static_s: f64,
    /// Echo time without the multiplexer's noise.
    pub t2_echo_baseline_s: f64,
    /// Extra echo dephasing rate per unit switching rate.
    pub slope_hz_per_hz: f64,
    pub attenuation_db: f64,
    pub trace: TraceSampling,
    pub device: DeviceHz,
}

impl Default for Fig3fSlope {
    fn default() -> Self {
        Self {
            switch_rates_hz: vec![0.0, 55e3, 135e3, 200e3, 265e3, 465e3, 785e3, 1e6],
            t1_s: 30e-6,
            t2_echo_static_s: 25e-6,
            t2_echo_baseline_s: 35e-6,
            slope_hz_per_hz: SWITCHING_DEPHASING_SLOPE,
            attenuation_db: 13.0,
            trace: TraceSampling::default(),
            device: DeviceHz::default(),
        }
    }
}

impl Scenario for Fig3fSlope {
    fn validate(&self) -> Result<(), String> {
        non_empty_finite("switch_rates_hz", &self.switch_rates_hz)?;
        require(
            self.switch_rates_hz.len() >= 2,
            "`switch_rates_hz` needs at least two rates",
        )?;
        for &f in &self.switch_rates_hz {
            non_negative("switch_rates_hz", f)?;
        }
        positive("t1_s", self.t1_s)?;
        positive("t2_echo_static_s", self.t2_echo_static_s)?;
        positive("t2_echo_baseline_s", self.t2_echo_baseline_s)?;
        require(
            self.t2_echo_static_s <= self.t2_echo_baseline_s,
            "`t2_echo_static_s` cannot exceed `t2_echo_baseline_s`",
        )?;
        non_negative("slope_hz_per_hz", self.slope_hz_per_hz)?;
        non_negative("attenuation_db", self.attenuation_db)?;
        self.trace.validate()
    }

    fn run(&self, ctx: &Context) -> Result<ScenarioOutput, CliError> {
        let dev = self.device.transmon()?;
        let gamma_static = 1.0 / self.t2_echo_static_s;
        let gamma_base = 1.0 / self.t2_echo_baseline_s;
        let mut t = Table::new(
            "echo",
            &[
                ("switch_rate", "Hz"),
                ("gamma_echo", "1/s"),
                ("t2_echo", "s"),
                ("t2_echo_fit", "s"),
                ("t2_echo_fit_se", "s"),
                ("gamma_echo_fit", "1/s"),
                ("n_resonator", "1"),
                ("n_mux", "1"),
                ("t_eff_mux", "K"),
            ],
        );
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (i, &f) in self.switch_rates_hz.iter().enumerate() {
            let gamma = dephasing_vs_switching(f, gamma_static, self.slope_hz_per_hz).map_err(CliError::downstream)?;
            let t2 = 1.0 / gamma;
            let truth = CoherenceRecord::new(self.t1_s, t2, t2).map_err(CliError::downstream)?;
            let data = self
                .trace
                .synth(TraceKind::Echo, &truth, t2, 0.0, ctx.sub_seed(i as u64))?;
            let fit = fit_echo(&data).map_err(|e| CliError::Downstream(format!("fit at {f} Hz: {e}")))?;
            let t2_fit = fit.time_constant_s;
            let se = fit.fit.standard_error("t2_echo").unwrap_or(f64::NAN);
            let (n_res, n_mux, t_eff) = noise_temperature(gamma - gamma_base, self.attenuation_db, &dev)?;
            t.push(vec![
                f.into(),
                gamma.into(),
                t2.into(),
                t2_fit.into(),
                se.into(),
                (1.0 / t2_fit).into(),
                n_res.into(),
                n_mux.into(),
                t_eff.into(),
            ]);
            // MHz and kHz keep the linear fit well scaled.
            xs.push(f * 1e-6);
            ys.push(1e-3 / t2_fit);
        }
        let data = Dataset::new(xs, ys).map_err(CliError::downstream)?;
        let line = least_squares(
            &LinearModel,
            &data,
            &[0.0, 0.0],
            &Bounds::unbounded(2),
            &LsqOptions::default(),
        )
        .map_err(CliError::downstream)?;
        let mut summary = Table::new(
            "slope",
            &[
                ("slope_fit", "kHz/MHz"),
                ("slope_fit_se", "kHz/MHz"),
                ("intercept_fit", "kHz"),
                ("slope_true", "kHz/MHz"),
            ],
        );
        summary.push(vec![
            line.values()[1].into(),
            line.standard_error("slope").unwrap_or(f64::NAN).into(),
            line.values()[0].into(),
            (self.slope_hz_per_hz * 1e3).into(),
        ]);
        Ok(ScenarioOutput {
            tables: vec![t, summary],
            documents: vec![],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodsTeff {
    pub t2_echo_baseline_s: f64,
    pub t2_echo_on_s: f64,
    /// Attenuation between the multiplexer and the resonator.
    pub attenuation_db: f64,
    /// Total attenuation assumed for the projections.
    pub projected_attenuation_db: f64,
    pub switch_rate_hz: f64,
    pub slope_hz_per_hz: f64,
    pub device: DeviceHz,
}

impl Default for MethodsTeff {
    fn default() -> Self {
        Self {
            t2_echo_baseline_s: 35e-6,
            t2_echo_on_s: 25e-6,
            attenuation_db: 13.0,
            projected_attenuation_db: 20.0,
            switch_rate_hz: 1e6,
            slope_hz_per_hz: SWITCHING_DEPHASING_SLOPE,
            device: DeviceHz::default(),
        }
    }
}

impl Scenario for MethodsTeff {
    fn validate(&self) -> Result<(), String> {
        positive("t2_echo_baseline_s", self.t2_echo_baseline_s)?;
        positive("t2_echo_on_s", self.t2_echo_on_s)?;
        require(
            self.t2_echo_on_s <= self.t2_echo_baseline_s,
            "`t2_echo_on_s` cannot exceed `t2_echo_baseline_s`",
        )?;
        non_negative("attenuation_db", self.attenuation_db)?;
        non_negative("projected_attenuation_db", self.projected_attenuation_db)?;
        non_negative("switch_rate_hz", self.switch_rate_hz)?;
        non_negative("slope_hz_per_hz", self.slope_hz_per_hz)
    }

    fn run(&self, _: &Context) -> Result<ScenarioOutput, CliError> {
        let dev = self.device.transmon()?;
        let gamma_base = 1.0 / self.t2_echo_baseline_s;
        let gamma_on = 1.0 / self.t2_echo_on_s;
        let excess = gamma_on - gamma_base;
        let (n_res, n_mux, t_eff) = noise_temperature(excess, self.attenuation_db, &dev)?;
        let mut teff = Table::new(
            "teff",
            &[
                ("gamma_excess", "1/s"),
                ("attenuation", "dB"),
                ("n_resonator", "1"),
                ("n_mux", "1"),
                ("t_eff_mux", "K"),
            ],
        );
        teff.push(vec![
            excess.into(),
            self.attenuation_db.into(),
            n_res.into(),
            n_mux.into(),
            t_eff.into(),
        ]);

        let mut proj = Table::new(
            "projection",
            &[
                ("case", "-"),
                ("switch_rate", "Hz"),
                ("gamma_excess", "1/s"),
                ("n_source", "1"),
                ("attenuation", "dB"),
                ("gamma_projected", "1/s"),
                ("t2_limit", "s"),
            ],
        );
        let switching = dephasing_vs_switching(self.switch_rate_hz, gamma_on, self.slope_hz_per_hz)
            .map_err(CliError::downstream)?;
        for (case, rate, g) in [
            ("static", 0.0, excess),
            ("switching", self.switch_rate_hz, switching - gamma_base),
        ] {
            let n_src = source_occupancy(g, self.attenuation_db, &dev).map_err(CliError::downstream)?;
            let gp = projected_dephasing(n_src, self.projected_attenuation_db, &dev).map_err(CliError::downstream)?;
            proj.push(vec![
                case.into(),
                rate.into(),
                g.into(),
                n_src.into(),
                self.projected_attenuation_db.into(),
                gp.into(),
                (1.0 / gp).into(),
            ]);
        }
        Ok(ScenarioOutput {
            tables: vec![teff, proj],
            documents: vec![],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodsT1Limit {
    pub c_d_f: f64,
    pub c_q_f: f64,
    pub r_m_ohm: f64,
    pub t_eff_k: f64,
    pub f_q_hz: f64,
    pub attenuation_db: f64,
}

impl Default for MethodsT1Limit {
    fn default() -> Self {
        let c = DriveCoupling::charge_line_reference();
        Self {
            c_d_f: c.c_d_f,
            c_q_f: c.c_q_f,
            r_m_ohm: c.r_m_ohm,
            t_eff_k: c.t_eff_k,
            f_q_hz: 3.957e9,
            attenuation_db: 20.0,
        }
    }
}

impl Scenario for MethodsT1Limit {
    fn validate(&self) -> Result<(), String> {
        non_negative("c_d_f", self.c_d_f)?;
        positive("c_q_f", self.c_q_f)?;
        positive("r_m_ohm", self.r_m_ohm)?;
        non_negative("t_eff_k", self.t_eff_k)?;
        positive("f_q_hz", self.f_q_hz)?;
        non_negative("attenuation_db", self.attenuation_db)
    }

    fn run(&self, _: &Context) -> Result<ScenarioOutput, CliError> {
        let c = DriveCoupling {
            c_d_f: self.c_d_f,
            c_q_f: self.c_q_f,
            r_m_ohm: self.r_m_ohm,
            t_eff_k: self.t_eff_k,
        };
        let w = 2.0 * PI * self.f_q_hz;
        let bare = t1_limit(&c, w).map_err(CliError::downstream)?;
        let att = t1_limit_attenuated(&c, w, self.attenuation_db).map_err(CliError::downstream)?;
        let mut t = Table::new(
            "t1_limit",
            &[("t1_limit", "s"), ("attenuation", "dB"), ("t1_limit_attenuated", "s")],
        );
        t.push(vec![bare.into(), self.attenuation_db.into(), att.into()]);
        Ok(ScenarioOutput {
            tables: vec![t],
            documents: vec![],
        })
    }
}
