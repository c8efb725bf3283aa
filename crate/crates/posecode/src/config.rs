//! Pipeline configuration (TOML) and loading of the data tables it names.

use std::path::{Path, PathBuf};

use posecode_core::pipeline::CaptionerData;
use posecode_core::realization::PROFILE_NAMES;
use posecode_core::{CaptionProfile, MiningParams, TemplateBank};
use serde::{Deserialize, Serialize};

use crate::formats::{self, read_text};
use crate::{Error, Result};

pub const DATA_DIR_ENV: &str = "POSECODE_DATA_DIR";

/// Overrides applied to every profile of the schedule.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Knobs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregation_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MiningConfig {
    pub min_support: usize,
    pub tau1: f64,
    pub tau2: f64,
}

impl Default for MiningConfig {
    fn default() -> Self {
        let p = MiningParams::default();
        MiningConfig {
            min_support: p.min_support,
            tau1: p.tau_single,
            tau2: p.tau_pair,
        }
    }
}

/// Table files; unset entries fall back to `$POSECODE_DATA_DIR/<default
/// name>` when that file exists, then to the built-in tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataFiles {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posecodes: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binning: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub super_posecodes: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eligibility: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusions: Option<PathBuf>,
}

/// Default file names, as written by `export-defaults`.
pub mod file_names {
    pub const REGISTRY: &str = "joints.txt";
    pub const POSECODES: &str = "posecodes.tsv";
    pub const BINNING: &str = "binning.tsv";
    pub const SUPER_POSECODES: &str = "super_posecodes.tsv";
    pub const ROLES: &str = "roles.tsv";
    pub const ELIGIBILITY: &str = "eligibility.tsv";
    pub const RULES: &str = "rules.tsv";
    pub const TEMPLATES: &str = "templates.txt";
    pub const EXCLUSIONS: &str = "exclusions.tsv";
    pub const CONFIG: &str = "pipeline.toml";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub per_pose: u32,
    /// Worker threads; unset means one per logical core.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub schedule: Vec<String>,
    pub knobs: Knobs,
    pub mining: MiningConfig,
    pub data: DataFiles,
    /// Directory relative data paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            per_pose: 3,
            jobs: None,
            schedule: CaptionProfile::default_schedule()
                .into_iter()
                .map(|p| p.name)
                .collect(),
            knobs: Knobs::default(),
            mining: MiningConfig::default(),
            data: DataFiles::default(),
            base_dir: PathBuf::new(),
        }
    }
}

fn fraction(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} must be within [0, 1], got {v}"
        )))
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Reads a config file; relative data paths resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut config = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_pose == 0 {
            return Err(Error::Config("per_pose must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.schedule.is_empty() {
            return Err(Error::Config("empty profile schedule".into()));
        }
        for name in &self.schedule {
            if CaptionProfile::by_name(name).is_none() {
                return Err(Error::Config(format!(
                    "unknown profile `{name}` (known: {})",
                    PROFILE_NAMES.join(", ")
                )));
            }
        }
        if let Some(v) = self.knobs.skip_prob {
            fraction("skip_prob", v)?;
        }
        if let Some(v) = self.knobs.aggregation_prob {
            fraction("aggregation_prob", v)?;
        }
        if let Some(v) = self.knobs.noise_scale {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "noise_scale must be finite and non-negative, got {v}"
                )));
            }
        }
        fraction("tau1", self.mining.tau1)?;
        fraction("tau2", self.mining.tau2)?;
        Ok(())
    }

    /// The schedule with the knob overrides applied.
    pub fn profiles(&self) -> Result<Vec<CaptionProfile>> {
        self.validate()?;
        Ok(self
            .schedule
            .iter()
            .map(|name| {
                let mut p = CaptionProfile::by_name(name).expect("validated");
                if let Some(v) = self.knobs.skip_prob {
                    p.skip_prob = v;
                }
                if let Some(v) = self.knobs.aggregation_prob {
                    p.aggregation_prob = v;
                }
                if let Some(v) = self.knobs.noise_scale {
                    p.noise_scale = v;
                }
                p
            })
            .collect())
    }

    pub fn mining_params(&self) -> MiningParams {
        MiningParams {
            min_support: self.mining.min_support,
            tau_single: self.mining.tau1,
            tau_pair: self.mining.tau2,
            ..MiningParams::default()
        }
    }

    fn locate(
        &self,
        configured: &Option<PathBuf>,
        default_name: &str,
        data_dir: Option<&Path>,
    ) -> Option<PathBuf> {
        match configured {
            Some(p) if p.is_absolute() => Some(p.clone()),
            Some(p) => Some(self.base_dir.join(p)),
            None => data_dir
                .map(|d| d.join(default_name))
                .filter(|p| p.is_file()),
        }
    }

    /// Tables from the data directory named by `POSECODE_DATA_DIR`, if set.
    pub fn captioner_data(&self) -> Result<CaptionerData> {
        let dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
        self.captioner_data_from(dir.as_deref())
    }

    /// Loads every configured table; a configured path that cannot be read
    /// is an error naming it.
    pub fn captioner_data_from(&self, data_dir: Option<&Path>) -> Result<CaptionerData> {
        use file_names::*;
        let mut data = CaptionerData::defaults();
        let d = &self.data;
        let load =
            |p: &Path| -> Result<(String, String)> { Ok((read_text(p)?, p.display().to_string())) };

        if let Some(p) = self.locate(&d.registry, REGISTRY, data_dir) {
            let (text, name) = load(&p)?;
            data.base_registry = std::sync::Arc::new(formats::parse_registry(&text, &name)?);
        }
        if let Some(p) = self.locate(&d.posecodes, POSECODES, data_dir) {
            let (text, name) = load(&p)?;
            data.posecodes = formats::parse_posecodes(&text, &name)?;
        }
        if let Some(p) = self.locate(&d.binning, BINNING, data_dir) {
            let (text, name) = load(&p)?;
            data.binning = formats::parse_binning(&text, &name)?;
        }
        if let Some(p) = self.locate(&d.super_posecodes, SUPER_POSECODES, data_dir) {
            let (text, name) = load(&p)?;
            data.super_posecodes = formats::parse_super_posecodes(&text, &name)?;
        }
        if let Some(p) = self.locate(&d.roles, ROLES, data_dir) {
            let (text, name) = load(&p)?;
            data.roles = formats::parse_roles(&text, &name)?;
        }
        if let Some(p) = self.locate(&d.eligibility, ELIGIBILITY, data_dir) {
            let (text, name) = load(&p)?;
            data.eligibility = Some(formats::parse_eligibility(&text, &name)?);
        }
        if let Some(p) = self.locate(&d.rules, RULES, data_dir) {
            let (text, name) = load(&p)?;
            data.rules = formats::parse_rules(&text, &name)?;
        }
        if let Some(p) = self.locate(&d.templates, TEMPLATES, data_dir) {
            let (text, _) = load(&p)?;
            data.templates = TemplateBank::parse(&text).map_err(|err| Error::Core {
                path: p.clone(),
                err,
            })?;
        }
        if let Some(p) = self.locate(&d.exclusions, EXCLUSIONS, data_dir) {
            let (text, name) = load(&p)?;
            let exclusions = formats::parse_exclusions(&text, &name)?;
            data.rules
                .retain(|r| !exclusions.iter().any(|e| e.matches(r)));
        }
        Ok(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = PipelineConfig::default();
        let text = c.to_toml();
        assert_eq!(PipelineConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(
            PipelineConfig::from_toml("").unwrap(),
            PipelineConfig::default()
        );
    }

    #[test]
    fn rejects_out_of_range_knobs() {
        assert!(PipelineConfig::from_toml("[knobs]\nskip_prob = 1.5\n").is_err());
        assert!(PipelineConfig::from_toml("[mining]\ntau1 = -0.1\n").is_err());
        assert!(PipelineConfig::from_toml("schedule = [\"Z9\"]\n").is_err());
        assert!(PipelineConfig::from_toml("bogus = 1\n").is_err());
    }

    #[test]
    fn knobs_apply_to_every_profile() {
        let c = PipelineConfig::from_toml("[knobs]\nskip_prob = 0.5\nnoise_scale = 0.0\n").unwrap();
        for p in c.profiles().unwrap() {
            assert_eq!(p.skip_prob, 0.5);
            assert_eq!(p.noise_scale, 0.0);
        }
    }
}
