//! Experiment configuration: a JSON document whose fields can be overridden by flags.

use std::path::PathBuf;

use semiqc_core::algorithms::Readout;
use semiqc_core::classical::{CatMatrix, MapModel, Potential};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MapChoice {
    Cat,
    Baker,
    Kicked,
    /// Haar-random unitary from the seed (quantum-only commands).
    Haar,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialChoice {
    Cosine,
    Sawtooth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutMode {
    Exact,
    Shots,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub map: MapChoice,
    /// Cat matrix `[[a, b], [c, d]]` acting on `(p, q)`.
    pub matrix: [i64; 4],
    pub k: f64,
    pub period: f64,
    pub potential: PotentialChoice,
    /// Per-step Maslov index; calibrated when absent.
    pub maslov: Option<i64>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            map: MapChoice::Cat,
            matrix: [2, 1, 3, 2],
            k: 0.0,
            period: 1.0,
            potential: PotentialChoice::Cosine,
            maslov: None,
        }
    }
}

impl ModelSpec {
    pub fn cat_matrix(&self) -> CliResult<CatMatrix> {
        let [a, b, c, d] = self.matrix;
        Ok(CatMatrix::new(a, b, c, d)?)
    }

    /// Classical model; `None` for the quantum-only choices.
    pub fn model(&self) -> CliResult<Option<MapModel>> {
        let m = match self.map {
            MapChoice::Cat => MapModel::cat(self.cat_matrix()?),
            MapChoice::Baker => MapModel::baker(),
            MapChoice::Kicked => {
                let v = match self.potential {
                    PotentialChoice::Cosine => Potential::Cosine,
                    PotentialChoice::Sawtooth => Potential::Sawtooth,
                };
                MapModel::kicked(self.k, self.period, v)?
            }
            MapChoice::Haar | MapChoice::Identity => return Ok(None),
        };
        Ok(Some(match self.maslov {
            Some(nu) => m.with_maslov(nu),
            None => m,
        }))
    }

    pub fn require_model(&self) -> CliResult<MapModel> {
        self.model()?.ok_or_else(|| {
            CliError::Validation(format!("{:?} has no classical dynamics", self.map))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub model: ModelSpec,
    #[serde(rename = "N")]
    pub dims: Vec<usize>,
    pub n_max: Option<usize>,
    pub t: Option<usize>,
    pub t_max: Option<usize>,
    pub phase_bits: Option<u32>,
    pub amplitude_bits: Option<u32>,
    pub seed: u64,
    pub shots: Option<u64>,
    pub readout: ReadoutMode,
    /// Phase-estimation input: `random` or `eigenvector:<j>`.
    pub input: Option<String>,
    /// Unitary in the binary matrix format, used instead of the model.
    pub matrix_file: Option<PathBuf>,
    /// Grid size for the spectral density.
    pub points: Option<usize>,
    /// Characteristic polynomial from half the traces plus `det(-U)`.
    pub half: bool,
    /// Largest N for which `cat-period` also runs phase estimation.
    pub pe_max: Option<usize>,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            subcommand: String::new(),
            model: ModelSpec::default(),
            dims: Vec::new(),
            n_max: None,
            t: None,
            t_max: None,
            phase_bits: None,
            amplitude_bits: None,
            seed: 0,
            shots: None,
            readout: ReadoutMode::Exact,
            input: None,
            matrix_file: None,
            points: None,
            half: false,
            pe_max: None,
            output: PathBuf::from("artifacts"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> CliResult<Self> {
        serde_json::from_str(s).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form, ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output");
        }
        let digest = Sha256::digest(v.to_string());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn single_dim(&self) -> CliResult<usize> {
        match self.dims.as_slice() {
            [n] => Ok(*n),
            [] => Err(CliError::Validation("--N is required".into())),
            _ => Err(CliError::Validation(
                "this command takes a single --N".into(),
            )),
        }
    }

    pub fn dim_or(&self, default: usize) -> CliResult<usize> {
        if self.dims.is_empty() {
            Ok(default)
        } else {
            self.single_dim()
        }
    }

    pub fn need<T: Copy>(&self, v: Option<T>, flag: &str) -> CliResult<T> {
        v.ok_or_else(|| CliError::Validation(format!("--{flag} is required")))
    }

    pub fn readout(&self) -> Readout {
        match self.readout {
            ReadoutMode::Exact => Readout::Exact,
            ReadoutMode::Shots => Readout::Shots {
                shots: self.shots.unwrap_or(10_000),
                seed: self.seed,
            },
        }
    }
}
