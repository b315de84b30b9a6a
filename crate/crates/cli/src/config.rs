//! The TOML run configuration read by `riccilab simulate --config`.
//!
//! ```toml
//! out = "runs/s3"
//! seed = 7
//!
//! [geometry]
//! kind = "sphere"
//! n = 3
//! c0 = 1.0
//!
//! [flow]
//! curvature_ceiling = 1e6
//!
//! [scan]
//! quantity = "R"
//! alphas = [2.0, 2.5, 3.0, inf]
//!
//! [[norm]]
//! quantity = "Rm"
//! alpha = 2.5
//! interval = [0.0, 0.2]
//!
//! [[rescale]]
//! q = 1000.0
//! t_center = 0.05
//! window = [0.05, 0.24]
//! alpha = 2.5
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use ricci_lab::flow::{dumbbell_profile, FlowConfig};
use ricci_lab::geometry::{make_round_sphere, sampled_round_sphere, MetricState};
use ricci_lab::io::read_profile;
use ricci_lab::norms::Quantity;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeometrySpec {
    /// The exact round sphere `c0·g_S`, or its warped sampling on `cells` cells.
    Sphere {
        n: usize,
        #[serde(default = "one")]
        c0: f64,
        cells: Option<usize>,
    },
    /// A profile file, relative to the config file.
    Warped { n: usize, profile: PathBuf },
    Dumbbell {
        n: usize,
        cells: usize,
        neck: f64,
        #[serde(default = "four")]
        power: i32,
    },
}

fn one() -> f64 {
    1.0
}

fn four() -> i32 {
    4
}

impl GeometrySpec {
    pub fn build(&self, base: &Path) -> anyhow::Result<MetricState> {
        Ok(match self {
            GeometrySpec::Sphere { n, c0, cells: None } => make_round_sphere(*n, *c0, 0.0)?,
            GeometrySpec::Sphere { n, c0, cells: Some(m) } => sampled_round_sphere(*n, *c0, *m, 0.0)?,
            GeometrySpec::Warped { n, profile } => read_profile(&base.join(profile), *n)?,
            GeometrySpec::Dumbbell { n, cells, neck, power } => dumbbell_profile(*n, *cells, *neck, *power)?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default = "scalar")]
    pub quantity: String,
    #[serde(default)]
    pub alphas: Vec<f64>,
    /// Decreasing distances to `T̂`; fitted to the run when absent.
    pub eps: Option<Vec<f64>>,
}

fn scalar() -> String {
    "R".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub quantity: String,
    pub alpha: f64,
    /// Whole run when absent.
    pub interval: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RescaleEntry {
    pub q: f64,
    pub t_center: f64,
    /// Source-time window compared before and after rescaling.
    pub window: [f64; 2],
    /// `(n+2)/2` when absent.
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub flow: FlowConfig,
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub norm: Vec<NormSpec>,
    #[serde(default)]
    pub rescale: Vec<RescaleEntry>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

/// A parsed config with the directory its relative paths resolve against
/// and the raw table echoed into manifests.
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
    pub echo: toml::Table,
}

pub fn load(path: &Path) -> anyhow::Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let echo: toml::Table = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let config: RunConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    for s in config.scan.iter().map(|s| &s.quantity).chain(config.norm.iter().map(|q| &q.quantity)) {
        s.parse::<Quantity>()?;
    }
    if let GeometrySpec::Warped { profile, .. } = &config.geometry {
        let p = path.parent().unwrap_or(Path::new(".")).join(profile);
        if !p.is_file() {
            bail!("profile {} does not exist", p.display());
        }
    }
    Ok(Loaded {
        config,
        base: path.parent().unwrap_or(Path::new(".")).to_path_buf(),
        echo,
    })
}
