//! Parameter sweeps over temperature or friction; rows evaluate in
//! parallel and are written in input order. Row failures become error
//! strings and the sweep continues.

use std::path::Path;

use anyhow::anyhow;
use qkramers_core::rate::{kramers_rate, RateFormula, RateResult};
use qkramers_core::{Config, Error as CoreError, FdrMode};
use rayon::prelude::*;
use serde::Deserialize;

use crate::output::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Temperature,
    Friction,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ValueSpec {
    Explicit(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        count: usize,
        #[serde(default = "default_scale")]
        scale: Scale,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Scale {
    Linear,
    Log,
}

fn default_scale() -> Scale {
    Scale::Linear
}

#[derive(Debug, Clone, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    values: ValueSpec,
    #[serde(default)]
    pub outputs: Option<Vec<String>>,
}

impl SweepSpec {
    pub fn from_config(raw: &serde_json::Value) -> anyhow::Result<Self> {
        let section = raw
            .get("sweep")
            .ok_or_else(|| anyhow!(CoreError::Config("config has no \"sweep\" section".into())))?;
        let spec: SweepSpec = serde_json::from_value(section.clone())
            .map_err(|e| anyhow!(CoreError::Config(format!("sweep: {e}"))))?;
        let vals = spec.values();
        if vals.is_empty() {
            return Err(anyhow!(CoreError::Config("sweep values are empty".into())));
        }
        if !vals.windows(2).all(|w| w[1] > w[0]) && !vals.windows(2).all(|w| w[1] < w[0]) {
            return Err(anyhow!(CoreError::Config(
                "sweep values must be strictly monotone".into()
            )));
        }
        Ok(spec)
    }

    pub fn values(&self) -> Vec<f64> {
        match &self.values {
            ValueSpec::Explicit(v) => v.clone(),
            ValueSpec::Range {
                min,
                max,
                count,
                scale,
            } => {
                let n = (*count).max(2);
                (0..n)
                    .map(|i| {
                        let f = i as f64 / (n - 1) as f64;
                        match scale {
                            Scale::Linear => min + (max - min) * f,
                            Scale::Log => min * (max / min).powf(f),
                        }
                    })
                    .collect()
            }
        }
    }
}

pub struct SweepRow {
    pub value: f64,
    pub result: Result<RateResult, String>,
}

pub struct SweepTable {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
    pub columns: Vec<String>,
}

const ALL_COLUMNS: [&str; 13] = [
    "T", "inv_T", "gamma", "k", "ln_k", "Lambda", "D_b", "psi_b", "D_0", "psi_0", "g_b", "N_b",
    "formula",
];

impl SweepTable {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| r.result.is_err())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push_str(",error\r\n");
        for row in &self.rows {
            let mut fields: Vec<String> = Vec::with_capacity(self.columns.len() + 1);
            match &row.result {
                Ok(r) => {
                    for col in &self.columns {
                        fields.push(self.field(col, row.value, r));
                    }
                    fields.push(String::new());
                }
                Err(msg) => {
                    for col in &self.columns {
                        // the swept variable still identifies the row
                        let v = match (col.as_str(), self.variable) {
                            ("T", SweepVariable::Temperature) => fmt(row.value),
                            ("inv_T", SweepVariable::Temperature) => fmt(1.0 / row.value),
                            ("gamma", SweepVariable::Friction) => fmt(row.value),
                            _ => String::new(),
                        };
                        fields.push(v);
                    }
                    fields.push(format!("\"{}\"", msg.replace(['"', ',', '\n'], ";")));
                }
            }
            out.push_str(&fields.join(","));
            out.push_str("\r\n");
        }
        out
    }

    fn field(&self, col: &str, value: f64, r: &RateResult) -> String {
        match col {
            "T" => {
                if self.variable == SweepVariable::Temperature {
                    fmt(value)
                } else {
                    String::new()
                }
            }
            "inv_T" => {
                if self.variable == SweepVariable::Temperature && value != 0.0 {
                    fmt(1.0 / value)
                } else {
                    String::new()
                }
            }
            "gamma" => {
                if self.variable == SweepVariable::Friction {
                    fmt(value)
                } else {
                    String::new()
                }
            }
            "k" => fmt(r.k),
            "ln_k" => fmt(r.k.ln()),
            "Lambda" => fmt(r.transmission.big_lambda),
            "D_b" => fmt(r.db),
            "psi_b" => fmt(r.psib),
            "D_0" => fmt(r.d0),
            "psi_0" => fmt(r.psi0),
            "g_b" => fmt(r.gb),
            "N_b" => fmt(r.nb),
            "formula" => format!("{:?}", r.formula).to_lowercase(),
            _ => String::new(),
        }
    }
}

pub fn run_sweep(
    config: &Config,
    spec: &SweepSpec,
    mode: FdrMode,
    formula: RateFormula,
) -> SweepTable {
    let values = spec.values();
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&v| {
            let bath = match spec.variable {
                SweepVariable::Temperature => config.bath.with_temperature(v),
                SweepVariable::Friction => config.bath.with_gamma(v),
            };
            let result = kramers_rate(&bath, &config.potential, &config.dispersion, mode, formula)
                .map_err(|e| e.to_string());
            SweepRow { value: v, result }
        })
        .collect();
    let columns = match &spec.outputs {
        Some(cols) => cols.clone(),
        None => ALL_COLUMNS.iter().map(|s| s.to_string()).collect(),
    };
    SweepTable {
        variable: spec.variable,
        rows,
        columns,
    }
}

/// Plain-text gnuplot companion for the emitted CSV.
pub fn gnuplot_script(spec: &SweepSpec, csv_path: &Path) -> String {
    let csv = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "sweep.csv".into());
    match spec.variable {
        SweepVariable::Temperature => format!(
            "set datafile separator ','\n\
             set xlabel '1/T'\n\
             set ylabel 'ln k'\n\
             plot '{csv}' using 2:5 with linespoints title 'ln k vs 1/T'\n"
        ),
        SweepVariable::Friction => format!(
            "set datafile separator ','\n\
             set xlabel 'Gamma'\n\
             set ylabel 'k'\n\
             set logscale y\n\
             plot '{csv}' using 3:4 with linespoints title 'k vs Gamma'\n"
        ),
    }
}
