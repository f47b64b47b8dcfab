use std::path::PathBuf;

use anderson_thermo::disorder::DisorderSpec;
use anderson_thermo::lattice::{CubeSequenceParams, LatticeBox};
use anderson_thermo::manybody::{InteractionSpec, Statistics};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    Ids,
    BoltzmannLimit,
    FermionDensity,
    WeylCheck,
    WegnerCheck,
    SubaddCheck,
    TestfnCheck,
    CubeSeq,
    HardcorePacking,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Ids => "ids",
            Experiment::BoltzmannLimit => "boltzmann-limit",
            Experiment::FermionDensity => "fermion-density",
            Experiment::WeylCheck => "weyl-check",
            Experiment::WegnerCheck => "wegner-check",
            Experiment::SubaddCheck => "subadd-check",
            Experiment::TestfnCheck => "testfn-check",
            Experiment::CubeSeq => "cube-seq",
            Experiment::HardcorePacking => "hardcore-packing",
        }
    }
}

fn one() -> usize {
    1
}

/// Top-level configuration file. Experiment-specific settings live under
/// `params` and are decoded by the experiment itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub realizations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistics: Option<Statistics>,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.realizations == 0 {
            return Err(CliError::Config("realizations: must be positive".into()));
        }
        if let Some(d) = &self.disorder {
            d.validate().map_err(|e| CliError::Config(format!("disorder: {e}")))?;
        }
        if let Some(label) = &self.label {
            if label.is_empty() || label.contains(['/', '\\']) || label == "." || label == ".." {
                return Err(CliError::Config(format!("label: not a plain directory name: {label:?}")));
            }
        }
        Ok(())
    }

    pub fn disorder(&self) -> Result<&DisorderSpec, CliError> {
        self.disorder
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("disorder: required by {}", self.experiment.name())))
    }

    pub fn interaction(&self) -> InteractionSpec {
        self.interaction.clone().unwrap_or_else(InteractionSpec::none)
    }

    pub fn statistics(&self) -> Result<Statistics, CliError> {
        self.statistics
            .ok_or_else(|| CliError::Config(format!("statistics: required by {}", self.experiment.name())))
    }

    pub fn params<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        let value = if self.params.is_null() {
            serde_json::Value::Object(Default::default())
        } else {
            self.params.clone()
        };
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("params: {e}")))
    }

    /// SHA-256 of the canonical JSON form, ignoring where the output goes.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        c.label = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn default_grid_points() -> usize {
    400
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    #[serde(rename = "box")]
    pub region: LatticeBox,
    #[serde(default = "one")]
    pub particles: usize,
    /// Keep only the lowest levels.
    pub levels: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdsParams {
    #[serde(rename = "box")]
    pub region: LatticeBox,
    /// Defaults to the a priori spectral range with 400 points.
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoltzmannParams {
    pub sides: Vec<usize>,
    pub particles: usize,
    #[serde(default)]
    pub entropy: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FermionDensityParams {
    #[serde(rename = "box")]
    pub region: LatticeBox,
    pub density: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylParams {
    #[serde(rename = "box")]
    pub region: LatticeBox,
    pub densities: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WegnerParams {
    pub boxes: Vec<LatticeBox>,
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitParams {
    pub first: LatticeBox,
    pub second: LatticeBox,
    pub n1: usize,
    pub n2: usize,
    #[serde(default)]
    pub s1: f64,
    #[serde(default)]
    pub s2: f64,
}

fn default_sector_cap() -> usize {
    5000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeSeqParams {
    pub density: f64,
    #[serde(default)]
    pub entropy_density: f64,
    pub cube: CubeSequenceParams,
    pub max_level: u32,
    #[serde(default)]
    pub min_level: u32,
    #[serde(default = "default_sector_cap")]
    pub sector_cap: usize,
}

fn default_enumerate_up_to() -> usize {
    15
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackingParams {
    pub sides: Vec<usize>,
    pub radius: f64,
    #[serde(default = "default_enumerate_up_to")]
    pub enumerate_up_to: usize,
}
