//! The scenario registry.

mod coherence;
mod fit;
mod power;
mod rb;
mod tdm;

use crate::config::ResolvedScenario;
use crate::CliError;
use cryomux::noisecalc::TransmonParams;
use cryomux::table::Table;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

/// A named JSON document written next to the tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub name: String,
    pub value: Value,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioOutput {
    pub tables: Vec<Table>,
    pub documents: Vec<Document>,
}

pub(crate) struct Context<'a> {
    scenario: &'a ResolvedScenario,
}

impl Context<'_> {
    pub(crate) fn sub_seed(&self, index: u64) -> u64 {
        self.scenario.sub_seed(index)
    }

    pub(crate) fn base_dir(&self) -> &Path {
        &self.scenario.base_dir
    }
}

/// Parameters of one scenario. Missing keys take their defaults.
pub(crate) trait Scenario: Serialize + DeserializeOwned + Default {
    fn validate(&self) -> Result<(), String> {
        Ok(())
    }

    fn run(&self, ctx: &Context) -> Result<ScenarioOutput, CliError>;
}

#[derive(Clone, Copy)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
    resolve: fn(Value) -> Result<Value, CliError>,
    run: fn(&Value, &Context) -> Result<ScenarioOutput, CliError>,
}

impl ScenarioInfo {
    /// Validates `params` and returns them with defaults filled in.
    pub fn resolve(&self, params: Value) -> Result<Value, CliError> {
        (self.resolve)(params)
    }
}

impl std::fmt::Debug for ScenarioInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScenarioInfo").field("name", &self.name).finish()
    }
}

fn resolve<S: Scenario>(params: Value) -> Result<Value, CliError> {
    let s: S = serde_json::from_value(params).map_err(|e| CliError::Schema(format!("params: {e}")))?;
    s.validate().map_err(|e| CliError::Schema(format!("params: {e}")))?;
    serde_json::to_value(&s).map_err(|e| CliError::Schema(format!("params: {e}")))
}

fn run<S: Scenario>(params: &Value, ctx: &Context) -> Result<ScenarioOutput, CliError> {
    let s = S::deserialize(params).map_err(|e| CliError::Schema(format!("params: {e}")))?;
    s.run(ctx)
}

const fn entry<S: Scenario>(name: &'static str, description: &'static str) -> ScenarioInfo {
    ScenarioInfo {
        name,
        description,
        resolve: resolve::<S>,
        run: run::<S>,
    }
}

static REGISTRY: [ScenarioInfo; 9] = [
    entry::<power::Fig2Power>(
        "fig2_power",
        "static and dynamic multiplexer dissipation vs supply and switching rate",
    ),
    entry::<coherence::Fig3Coherence>(
        "fig3_coherence",
        "T1, T2* and T2e vs supply voltage with fitted synthetic traces and inferred noise temperature",
    ),
    entry::<coherence::Fig3fSlope>("fig3f_slope", "echo dephasing vs switching rate and the fitted slope"),
    entry::<rb::Fig4aRb>(
        "fig4a_rb",
        "simulated randomized benchmarking vs T2* against the fidelity model",
    ),
    entry::<tdm::Fig4bTdm>(
        "fig4b_tdm",
        "excited population vs TDM gate window for a gated pi pulse",
    ),
    entry::<coherence::MethodsT1Limit>("methods_t1_limit", "relaxation limit from a noisy drive line"),
    entry::<coherence::MethodsTeff>(
        "methods_teff",
        "multiplexer noise temperature from excess dephasing and attenuation projections",
    ),
    entry::<power::ScalingCapacity>(
        "scaling_capacity",
        "qubit count per cooling budget and per-channel power allowance",
    ),
    entry::<fit::FitTrace>(
        "fit_trace",
        "fit a measured time_s,signal trace with one of the decay models",
    ),
];

/// Registered scenarios in a fixed order.
pub fn registry() -> &'static [ScenarioInfo] {
    &REGISTRY
}

pub fn find(name: &str) -> Option<&'static ScenarioInfo> {
    REGISTRY.iter().find(|e| e.name == name)
}

pub fn run_scenario(scenario: &ResolvedScenario) -> Result<ScenarioOutput, CliError> {
    let entry = find(scenario.name).ok_or_else(|| CliError::UnknownScenario(scenario.name.to_string()))?;
    (entry.run)(&scenario.params, &Context { scenario })
}

/// Readout and qubit constants in Hz (each value is ω/2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub(crate) struct DeviceHz {
    pub f_q_hz: f64,
    pub f_r_hz: f64,
    pub kappa_r_hz: f64,
    pub chi_hz: f64,
    pub alpha_hz: f64,
    pub g_hz: f64,
}

impl Default for DeviceHz {
    fn default() -> Self {
        Self {
            f_q_hz: 3.957e9,
            f_r_hz: 6.471e9,
            kappa_r_hz: 0.697e6,
            chi_hz: -0.259e6,
            alpha_hz: -180e6,
            g_hz: 90e6,
        }
    }
}

impl DeviceHz {
    pub fn transmon(&self) -> Result<TransmonParams, CliError> {
        TransmonParams::from_hz(
            self.f_q_hz,
            self.f_r_hz,
            self.kappa_r_hz,
            self.chi_hz,
            self.alpha_hz,
            self.g_hz,
        )
        .map_err(CliError::downstream)
    }
}

pub(crate) fn require(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<(), String> {
    require(
        v > 0.0 && v.is_finite(),
        format!("`{name}` must be positive and finite, got {v}"),
    )
}

pub(crate) fn non_negative(name: &str, v: f64) -> Result<(), String> {
    require(
        v >= 0.0 && v.is_finite(),
        format!("`{name}` must be non-negative and finite, got {v}"),
    )
}

pub(crate) fn non_empty_finite(name: &str, v: &[f64]) -> Result<(), String> {
    require(!v.is_empty(), format!("`{name}` is empty"))?;
    require(
        v.iter().all(|x| x.is_finite()),
        format!("`{name}` holds a non-finite value"),
    )
}

/// `0, step, 2·step, …, n·step` computed as `i / per_unit` so decimal
/// grids come out exact.
pub(crate) fn grid(n: usize, per_unit: f64) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / per_unit).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique_and_ordered() {
        let names: Vec<&str> = registry().iter().map(|e| e.name).collect();
        let mut dedup = names.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), names.len());
        assert_eq!(names[0], "fig2_power");
        for required in [
            "fig2_power",
            "fig3_coherence",
            "fig3f_slope",
            "fig4a_rb",
            "fig4b_tdm",
            "methods_t1_limit",
            "methods_teff",
            "scaling_capacity",
        ] {
            assert!(find(required).is_some(), "{required}");
        }
    }

    #[test]
    fn defaults_resolve_for_every_scenario_but_fit_trace() {
        for e in registry() {
            let r = e.resolve(Value::Object(Default::default()));
            if e.name == "fit_trace" {
                assert_eq!(r.unwrap_err().exit_code(), 3);
            } else {
                let params = r.unwrap_or_else(|err| panic!("{}: {err}", e.name));
                // Resolution is idempotent.
                assert_eq!(e.resolve(params.clone()).unwrap(), params);
            }
        }
    }
}
