//! Experiment configuration: JSON schema and validation.

use moyal::duality::{functional_from_json, Functional};
use moyal::error::{MoyalError, Result};
use moyal::grid::PhaseGrid;
use moyal::symbol::{symbol_from_json, Symbol};
use moyal::theta::ThetaMatrix;
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    StarCompare,
    Trace,
    Associativity,
    Bridge,
    ApproxId,
    Norms,
    FourierBound,
    SeriesTail,
}

impl Experiment {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "star-compare" => Experiment::StarCompare,
            "trace" => Experiment::Trace,
            "associativity" => Experiment::Associativity,
            "bridge" => Experiment::Bridge,
            "approx-id" => Experiment::ApproxId,
            "norms" => Experiment::Norms,
            "fourier-bound" => Experiment::FourierBound,
            "series-tail" => Experiment::SeriesTail,
            other => {
                return Err(MoyalError::Config(format!(
                    "unknown experiment \"{other}\" (expected one of star-compare, trace, \
                     associativity, bridge, approx-id, norms, fourier-bound, series-tail)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::StarCompare => "star-compare",
            Experiment::Trace => "trace",
            Experiment::Associativity => "associativity",
            Experiment::Bridge => "bridge",
            Experiment::ApproxId => "approx-id",
            Experiment::Norms => "norms",
            Experiment::FourierBound => "fourier-bound",
            Experiment::SeriesTail => "series-tail",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub theta: ThetaMatrix<f64>,
    pub grid: PhaseGrid<f64>,
    pub symbols: Vec<Symbol<f64>>,
    pub functionals: Vec<Functional<f64>>,
    pub tolerances: BTreeMap<String, f64>,
    pub params: Value,
    pub output: String,
}

/// Command-line overrides applied after parsing.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub theta0: Option<f64>,
}

fn field<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| MoyalError::Config(format!("missing field \"{key}\"")))
}

pub fn parse_config(text: &str, overrides: &Overrides) -> Result<ExperimentConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        MoyalError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;

    let experiment = Experiment::parse(
        field(&v, "experiment")?
            .as_str()
            .ok_or_else(|| MoyalError::Config("\"experiment\" must be a string".into()))?,
    )?;

    let theta_spec = field(&v, "theta")?;
    let theta = if let Some(entries) = theta_spec.get("entries") {
        if overrides.theta0.is_some() {
            return Err(MoyalError::Config(
                "--theta0 cannot override an explicit entries matrix".into(),
            ));
        }
        let rows = entries
            .as_array()
            .ok_or_else(|| MoyalError::Config("theta.entries must be an array".into()))?;
        let mut matrix = Vec::new();
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| MoyalError::Config("theta.entries rows must be arrays".into()))?;
            matrix.push(
                row.iter()
                    .map(|x| {
                        x.as_f64().ok_or_else(|| {
                            MoyalError::Config("theta entries must be numbers".into())
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?,
            );
        }
        ThetaMatrix::from_entries(&matrix)?
    } else {
        let d = field(theta_spec, "d")?
            .as_u64()
            .ok_or_else(|| MoyalError::Config("theta.d must be an integer".into()))?
            as usize;
        let theta0 = overrides.theta0.unwrap_or(
            field(theta_spec, "theta0")?
                .as_f64()
                .ok_or_else(|| MoyalError::Config("theta.theta0 must be a number".into()))?,
        );
        if theta0 == 0.0 {
            ThetaMatrix::zero(d)?
        } else {
            ThetaMatrix::canonical(d, theta0)?
        }
    };

    let grid_spec = field(&v, "grid")?;
    let l = overrides.grid_l.unwrap_or(
        field(grid_spec, "l")?
            .as_f64()
            .ok_or_else(|| MoyalError::Config("grid.l must be a number".into()))?,
    );
    let n = overrides.grid_n.unwrap_or(
        field(grid_spec, "n")?
            .as_u64()
            .ok_or_else(|| MoyalError::Config("grid.n must be an integer".into()))?
            as usize,
    );
    let grid = PhaseGrid::new(theta.dim(), l, n)?;

    let symbols_spec = field(&v, "symbols")?
        .as_array()
        .ok_or_else(|| MoyalError::Config("\"symbols\" must be an array".into()))?;
    if symbols_spec.is_empty() {
        return Err(MoyalError::Config("\"symbols\" must not be empty".into()));
    }
    let symbols = symbols_spec
        .iter()
        .map(symbol_from_json::<f64>)
        .collect::<Result<Vec<_>>>()?;
    for s in &symbols {
        if s.dim() != theta.dim() {
            return Err(MoyalError::Config(
                "symbol dimension does not match theta".into(),
            ));
        }
    }

    let functionals = match v.get("functionals") {
        None => Vec::new(),
        Some(list) => list
            .as_array()
            .ok_or_else(|| MoyalError::Config("\"functionals\" must be an array".into()))?
            .iter()
            .map(functional_from_json::<f64>)
            .collect::<Result<Vec<_>>>()?,
    };

    let mut tolerances = BTreeMap::new();
    if let Some(tols) = v.get("tolerances") {
        let map = tols
            .as_object()
            .ok_or_else(|| MoyalError::Config("\"tolerances\" must be an object".into()))?;
        for (k, val) in map {
            let t = val
                .as_f64()
                .ok_or_else(|| MoyalError::Config(format!("tolerance \"{k}\" must be a number")))?;
            if !(t > 0.0) {
                return Err(MoyalError::Config(format!("tolerance \"{k}\" must be positive")));
            }
            tolerances.insert(k.clone(), t);
        }
    }

    let params = v.get("params").cloned().unwrap_or(Value::Null);

    let output = field(&v, "output")?
        .as_str()
        .ok_or_else(|| MoyalError::Config("\"output\" must be a string".into()))?
        .to_string();

    Ok(ExperimentConfig {
        experiment,
        theta,
        grid,
        symbols,
        functionals,
        tolerances,
        params,
        output,
    })
}

impl ExperimentConfig {
    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn param_f64_list(&self, key: &str, default: &[f64]) -> Vec<f64> {
        self.params
            .get(key)
            .and_then(|v| v.as_array())
            .map(|a| a.iter().filter_map(|x| x.as_f64()).collect())
            .unwrap_or_else(|| default.to_vec())
    }

    pub fn param_u64(&self, key: &str, default: u64) -> u64 {
        self.params.get(key).and_then(|v| v.as_u64()).unwrap_or(default)
    }

    pub fn param_f64(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).and_then(|v| v.as_f64()).unwrap_or(default)
    }
}
