//! Scenario files: JSON with a schema version, market parameters and
//! whichever market-structure fields the chosen command needs.

use std::fs;
use std::path::{Path, PathBuf};

use hetnet_market::welfare::MarketScenario;
use hetnet_market::{AllocationProfile, MarketParams, Objective};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub params: MarketParams,
    /// Fixed per-SP splits, for `associate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocation: Option<AllocationProfile>,
    /// Per-SP licensed bands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidths: Option<Vec<f64>>,
    /// SP count when the licensed band is shared equally.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sps: Option<usize>,
    /// Licensed band, shared equally among `n_sps` SPs (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub licensed_bandwidth: Option<f64>,
    /// Whole band to split between licensed and unlicensed use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_bandwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_unlicensed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Output path used when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Results attached by a previous run; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<serde_json::Value>,
}

/// A range of unlicensed bandwidths (or per-SP bands for a 2-SP map).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<MarketScenario>>,
}

fn missing(field: &str, command: &str) -> CliError {
    CliError::Validation(format!(
        "scenario field `{field}` is required for `{command}`"
    ))
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Validation(format!(
            "scenario field `{field}` must be > 0, got {v}"
        )))
    }
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: ScenarioFile = serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("scenario: {e}")))?;
        if s.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "scenario field `schema_version` must be {SCHEMA_VERSION}, got {}",
                s.schema_version
            )));
        }
        Ok(s)
    }

    pub fn new(params: MarketParams) -> Self {
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            params,
            allocation: None,
            bandwidths: None,
            n_sps: None,
            licensed_bandwidth: None,
            total_bandwidth: None,
            b_unlicensed: None,
            objective: None,
            sweep: None,
            out: None,
            report: None,
        }
    }

    pub fn allocation(&self) -> Result<&AllocationProfile, CliError> {
        let a = self
            .allocation
            .as_ref()
            .ok_or_else(|| missing("allocation", "associate"))?;
        a.validate()?;
        Ok(a)
    }

    pub fn b_unlicensed(&self, command: &str) -> Result<f64, CliError> {
        let b = self
            .b_unlicensed
            .ok_or_else(|| missing("b_unlicensed", command))?;
        if b.is_finite() && b >= 0.0 {
            Ok(b)
        } else {
            Err(CliError::Validation(format!(
                "scenario field `b_unlicensed` must be >= 0, got {b}"
            )))
        }
    }

    /// Per-SP licensed bands from `bandwidths`, or `licensed_bandwidth`
    /// shared equally among `n_sps`.
    pub fn bands(&self, command: &str) -> Result<Vec<f64>, CliError> {
        if let Some(b) = &self.bandwidths {
            if self.licensed_bandwidth.is_some() {
                return Err(CliError::Validation(
                    "give either `bandwidths` or `licensed_bandwidth`, not both".into(),
                ));
            }
            if let Some(n) = self.n_sps {
                if n != b.len() {
                    return Err(CliError::Validation(format!(
                        "scenario field `n_sps` is {n} but `bandwidths` lists {}",
                        b.len()
                    )));
                }
            }
            if b.is_empty() {
                return Err(CliError::Validation(
                    "scenario field `bandwidths` is empty".into(),
                ));
            }
            for &x in b {
                positive("bandwidths", x)?;
            }
            return Ok(b.clone());
        }
        let total = positive(
            "licensed_bandwidth",
            self.licensed_bandwidth
                .ok_or_else(|| missing("bandwidths` or `licensed_bandwidth", command))?,
        )?;
        let n = self.n_sps.unwrap_or(1);
        if n == 0 {
            return Err(CliError::Validation(
                "scenario field `n_sps` must be >= 1".into(),
            ));
        }
        Ok(vec![total / n as f64; n])
    }

    pub fn total_bandwidth(&self, command: &str) -> Result<f64, CliError> {
        positive(
            "total_bandwidth",
            self.total_bandwidth
                .ok_or_else(|| missing("total_bandwidth", command))?,
        )
    }
}
