//! Run manifests: what a panel run covers and how it is configured.
//!
//! A manifest can be read from TOML or JSON (chosen by file extension) and
//! then overridden field by field from the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ecm_core::multiplex::showcase_selections;
use ecm_core::sampler::MIN_PERCENTILE_SAMPLES;
use ecm_core::{FitConfig, LayerSelection, ModelKind, MultiplexDataset, SampleConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};

/// Years to process: everything, an inclusive range `a..b`, or a comma list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum YearSpec {
    #[default]
    All,
    Range(i32, i32),
    List(Vec<i32>),
}

impl FromStr for YearSpec {
    type Err = ToolError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<i32>().map_err(|e| ToolError::Config(format!("year {t:?}: {e}")));
        if s.is_empty() || s == "all" {
            Ok(Self::All)
        } else if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(ToolError::Config(format!("empty year range {s}")));
            }
            Ok(Self::Range(a, b))
        } else {
            Ok(Self::List(s.split(',').map(num).collect::<Result<_>>()?))
        }
    }
}

impl fmt::Display for YearSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::Range(a, b) => write!(f, "{a}..{b}"),
            Self::List(v) => {
                let parts: Vec<String> = v.iter().map(i32::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl Serialize for YearSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl YearSpec {
    /// The dataset years selected, in ascending order.
    pub fn resolve(&self, dataset: &MultiplexDataset) -> Result<Vec<i32>> {
        let years = dataset.years();
        let picked: Vec<i32> = match self {
            Self::All => years.to_vec(),
            Self::Range(a, b) => years.iter().copied().filter(|y| (a..=b).contains(&y)).collect(),
            Self::List(list) => {
                for y in list {
                    if !years.contains(y) {
                        return Err(ecm_core::Error::UnknownYear(*y).into());
                    }
                }
                let mut v = list.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
        };
        if picked.is_empty() {
            return Err(ToolError::Config(format!("no dataset year matches {self}")));
        }
        Ok(picked)
    }
}

/// Expands `all`, `top14`, `showcase` and `+`-joined code groups, separated by commas.
pub fn parse_layers(specs: &[String]) -> Result<Vec<LayerSelection>> {
    let mut out = Vec::new();
    for spec in specs {
        for item in spec.split(',') {
            match item.trim() {
                "showcase" => out.extend(showcase_selections()),
                other => out.push(LayerSelection::parse(other)?),
            }
        }
    }
    if out.is_empty() {
        return Err(ToolError::Config("no layer selection given".into()));
    }
    let mut unique: Vec<LayerSelection> = Vec::new();
    for s in out {
        if !unique.contains(&s) {
            unique.push(s);
        }
    }
    Ok(unique)
}

/// `ecm`, `wcm` or `both`.
pub fn parse_models(s: &str) -> Result<Vec<ModelKind>> {
    match s.trim() {
        "both" => Ok(vec![ModelKind::Ecm, ModelKind::Wcm]),
        other => Ok(vec![other.parse()?]),
    }
}

fn default_layers() -> Vec<String> {
    vec!["all".into()]
}

fn default_models() -> Vec<ModelKind> {
    vec![ModelKind::Ecm, ModelKind::Wcm]
}

fn default_out() -> PathBuf {
    PathBuf::from("ecm-out")
}

fn default_alpha() -> f64 {
    0.05
}

fn default_bias_tolerance() -> f64 {
    ecm_core::bias::DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Optional node-list file fixing the node order.
    #[serde(default)]
    pub nodes: Option<PathBuf>,
    #[serde(default)]
    pub years: YearSpec,
    #[serde(default = "default_layers")]
    pub layers: Vec<String>,
    #[serde(default = "default_models")]
    pub models: Vec<ModelKind>,
    #[serde(default)]
    pub fit: FitConfig,
    /// Monte Carlo samples per model and cell; 0 disables intervals.
    #[serde(default)]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Report weighted statistics on weights divided by the snapshot total.
    #[serde(default)]
    pub normalize: bool,
    #[serde(default = "default_bias_tolerance")]
    pub bias_tolerance: f64,
    /// Write per-iteration solver traces.
    #[serde(default)]
    pub trace: bool,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl Default for RunManifest {
    fn default() -> Self {
        Self {
            data: None,
            nodes: None,
            years: YearSpec::All,
            layers: default_layers(),
            models: default_models(),
            fit: FitConfig::default(),
            samples: 0,
            seed: 0,
            alpha: default_alpha(),
            normalize: false,
            bias_tolerance: default_bias_tolerance(),
            trace: false,
            out: default_out(),
        }
    }
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        match ext {
            "json" => serde_json::from_str(&text).map_err(|e| ToolError::Config(format!("{}: {e}", path.display()))),
            "toml" => toml::from_str(&text).map_err(|e| ToolError::Config(format!("{}: {e}", path.display()))),
            other => Err(ToolError::Config(format!("{}: unsupported config extension {other:?}", path.display()))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fit.validate()?;
        if self.models.is_empty() {
            return Err(ToolError::Config("no model selected".into()));
        }
        if self.samples > 0 {
            self.sample_config().expect("samples > 0").validate()?;
            if self.samples < MIN_PERCENTILE_SAMPLES {
                return Err(ToolError::Config(format!(
                    "percentile intervals need at least {MIN_PERCENTILE_SAMPLES} samples, got {}",
                    self.samples
                )));
            }
        }
        if !(self.bias_tolerance >= 0.0 && self.bias_tolerance.is_finite()) {
            return Err(ToolError::Config(format!("bias tolerance {} must be non-negative", self.bias_tolerance)));
        }
        parse_layers(&self.layers)?;
        Ok(())
    }

    pub fn sample_config(&self) -> Option<SampleConfig> {
        (self.samples > 0).then_some(SampleConfig { sample_count: self.samples, seed: self.seed, alpha: self.alpha })
    }

    pub fn selections(&self) -> Result<Vec<LayerSelection>> {
        parse_layers(&self.layers)
    }

    pub fn data_path(&self) -> Result<&Path> {
        self.data.as_deref().ok_or_else(|| ToolError::Config("no dataset given (--data)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn year_specs() {
        assert_eq!("1992..2002".parse::<YearSpec>().unwrap(), YearSpec::Range(1992, 2002));
        assert_eq!("2002".parse::<YearSpec>().unwrap(), YearSpec::List(vec![2002]));
        assert_eq!("2000,1995".parse::<YearSpec>().unwrap(), YearSpec::List(vec![2000, 1995]));
        assert!("2002..1992".parse::<YearSpec>().is_err());
        assert!("x".parse::<YearSpec>().is_err());
        assert_eq!(YearSpec::Range(1, 3).to_string(), "1..3");
    }

    #[test]
    fn layer_specs() {
        let l = parse_layers(&["showcase".into()]).unwrap();
        assert_eq!(l.len(), 7);
        let l = parse_layers(&["84+85,all".into(), "all".into()]).unwrap();
        assert_eq!(l, vec![LayerSelection::Codes(vec!["84".into(), "85".into()]), LayerSelection::All]);
    }

    #[test]
    fn manifests_from_toml_and_json() {
        let t: RunManifest = toml::from_str(
            "years = \"1992..1994\"\nlayers = [\"top14\"]\nmodels = [\"ecm\"]\nsamples = 200\n[fit]\nmax_iterations = 50\n",
        )
        .unwrap();
        assert_eq!(t.years, YearSpec::Range(1992, 1994));
        assert_eq!(t.fit.max_iterations, 50);
        assert_eq!(t.fit.degree_tolerance, 1e-6);
        t.validate().unwrap();
        let j: RunManifest = serde_json::from_str(r#"{"samples": 10}"#).unwrap();
        assert!(j.validate().is_err());
        assert!(serde_json::from_str::<RunManifest>(r#"{"sample": 10}"#).is_err());
        assert_eq!(parse_models("both").unwrap().len(), 2);
        assert!(parse_models("bcm").is_err());
    }
}
