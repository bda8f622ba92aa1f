use super::{require, Context, Document, Scenario, ScenarioOutput};
use crate::CliError;
use cryomux::fitkit::{fit_echo, fit_qp_double_exp, fit_ramsey, fit_t1, Dataset, FitResult};
use cryomux::table::Table;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceModel {
    #[default]
    T1,
    Ramsey,
    Echo,
    QpDoubleExp,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitTrace {
    /// `time_s,signal` CSV, relative to the scenario file.
    pub path: String,
    pub model: TraceModel,
}

impl Scenario for FitTrace {
    fn validate(&self) -> Result<(), String> {
        require(!self.path.is_empty(), "`path` is required")
    }

    fn run(&self, ctx: &Context) -> Result<ScenarioOutput, CliError> {
        let path = ctx.base_dir().join(&self.path);
        let file = std::fs::File::open(&path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        let data = Dataset::from_csv(file).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        let fit: FitResult = match self.model {
            TraceModel::T1 => fit_t1(&data).map(|f| f.fit),
            TraceModel::Ramsey => fit_ramsey(&data).map(|f| f.fit),
            TraceModel::Echo => fit_echo(&data).map(|f| f.fit),
            TraceModel::QpDoubleExp => fit_qp_double_exp(&data).map(|f| f.fit),
        }
        .map_err(CliError::downstream)?;
        let mut t = Table::new("parameters", &[("name", "-"), ("value", "-"), ("standard_error", "-")]);
        for p in &fit.parameters {
            t.push(vec![
                p.name.as_str().into(),
                p.value.into(),
                p.standard_error.unwrap_or(f64::NAN).into(),
            ]);
        }
        let value = serde_json::to_value(&fit).map_err(CliError::downstream)?;
        Ok(ScenarioOutput {
            tables: vec![t],
            documents: vec![Document {
                name: "fit".into(),
                value,
            }],
        })
    }
}
