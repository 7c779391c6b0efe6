//! Run configuration: a TOML document with dotted-path overrides.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use envqdd::control::EnvRates;
use envqdd::qdd::{QddStrongParams, QddUltraParams, ThermalParams, UltraRates};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads for grid evaluation; 0 uses all cores. Not echoed, since it
    /// cannot change results.
    #[serde(skip_serializing)]
    pub workers: usize,
    pub format: Format,
    pub model: ModelConfig,
    pub tolerances: Tolerances,
    pub rates: RatesConfig,
    pub eliminate: EliminateConfig,
    pub sweep: SweepConfig,
    pub oracle: OracleConfig,
    pub props: PropsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            workers: 0,
            format: Format::Csv,
            model: ModelConfig::default(),
            tolerances: Tolerances::default(),
            rates: RatesConfig::default(),
            eliminate: EliminateConfig::default(),
            sweep: SweepConfig::default(),
            oracle: OracleConfig::default(),
            props: PropsConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Thermal `σ∓` exchange at rates `κ₁(n_th+1)`, `κ₁n_th`.
    Strong,
    /// Drive-corrected channels `κ_αx`, `κ_α∓`.
    Ultra,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub g: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub delta: f64,
    pub kappa1: f64,
    pub n_th: f64,
    pub kappa_ax: f64,
    pub kappa_am: f64,
    pub kappa_ap: f64,
    /// Nominal environment frequency, only used for the model error estimates.
    pub omega_e: Option<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Strong,
            g: 0.01,
            omega1: 1.0,
            omega2: 20.0,
            delta: 0.5,
            kappa1: 1.0,
            n_th: 0.0,
            kappa_ax: 0.0,
            kappa_am: 1.0,
            kappa_ap: 0.0,
            omega_e: None,
        }
    }
}

/// Parameters accepted as sweep axes.
pub const AXIS_NAMES: &[&str] =
    &["g", "omega1", "omega2", "delta", "kappa1", "n_th", "kappa_ax", "kappa_am", "kappa_ap"];

impl ModelConfig {
    pub fn set(&mut self, name: &str, v: f64) -> Result<()> {
        let slot = match name {
            "g" => &mut self.g,
            "omega1" => &mut self.omega1,
            "omega2" => &mut self.omega2,
            "delta" => &mut self.delta,
            "kappa1" => &mut self.kappa1,
            "n_th" => &mut self.n_th,
            "kappa_ax" => &mut self.kappa_ax,
            "kappa_am" => &mut self.kappa_am,
            "kappa_ap" => &mut self.kappa_ap,
            _ => bail!("unknown sweep parameter `{name}` (expected one of {})", AXIS_NAMES.join(", ")),
        };
        *slot = v;
        Ok(())
    }

    pub fn thermal(&self) -> envqdd::Result<ThermalParams> {
        ThermalParams::new(self.kappa1, self.n_th)
    }

    pub fn strong(&self) -> envqdd::Result<QddStrongParams> {
        let p = QddStrongParams::thermal(self.g, self.omega1, self.omega2, self.delta, self.thermal()?);
        p.validate()?;
        Ok(p)
    }

    pub fn ultra(&self) -> envqdd::Result<QddUltraParams> {
        let p = QddUltraParams {
            g: self.g,
            omega1: self.omega1,
            omega2: self.omega2,
            delta: self.delta,
            rates: UltraRates { kappa_ax: self.kappa_ax, kappa_am: self.kappa_am, kappa_ap: self.kappa_ap },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> envqdd::Result<()> {
        match self.kind {
            ModelKind::Strong => self.strong().map(drop),
            ModelKind::Ultra => self.ultra().map(drop),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative tolerance of the oracle's monodromy integration.
    pub rel_tol: f64,
    /// Largest accepted `g/κ_Σ` for oracle runs.
    pub max_coupling_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_coupling_ratio: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    /// Also run the Floquet reduction.
    pub floquet: bool,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self { floquet: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElimScenario {
    Dispersive,
    Resonant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EliminateConfig {
    pub scenario: ElimScenario,
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub kappa_z: f64,
    pub kappa1: f64,
    pub n_th: f64,
    /// Environment splitting of the resonant scenario.
    pub delta: f64,
}

impl Default for EliminateConfig {
    fn default() -> Self {
        Self { scenario: ElimScenario::Resonant, kappa_x: 0.5, kappa_y: 0.2, kappa_z: 0.1, kappa1: 1.0, n_th: 0.1, delta: 1.0 }
    }
}

impl EliminateConfig {
    pub fn env_rates(&self) -> envqdd::Result<EnvRates> {
        let r = EnvRates {
            kappa_x: self.kappa_x,
            kappa_y: self.kappa_y,
            kappa_z: self.kappa_z,
            kappa1: self.kappa1,
            n_th: self.n_th,
        };
        r.validate()?;
        Ok(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "linear")]
    pub scale: Scale,
}

fn linear() -> Scale {
    Scale::Linear
}

impl SweepAxis {
    pub fn validate(&self) -> Result<()> {
        if !AXIS_NAMES.contains(&self.name.as_str()) {
            bail!("sweep.axes: unknown parameter `{}` (expected one of {})", self.name, AXIS_NAMES.join(", "));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            bail!("sweep.axes.{}: need finite min <= max", self.name);
        }
        match self.count {
            0 => bail!("sweep.axes.{}: count must be positive", self.name),
            1 if self.min != self.max => bail!("sweep.axes.{}: a single point needs min == max", self.name),
            _ => {}
        }
        if self.scale == Scale::Log && !(self.min > 0.0) {
            bail!("sweep.axes.{}: log scale needs min > 0", self.name);
        }
        Ok(())
    }

    /// Grid points with exact end points.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / n;
                match self.scale {
                    Scale::Linear => self.min * (1.0 - t) + self.max * t,
                    Scale::Log => {
                        if i == 0 {
                            self.min
                        } else if i + 1 == self.count {
                            self.max
                        } else {
                            (self.min.ln() * (1.0 - t) + self.max.ln() * t).exp()
                        }
                    }
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recipe {
    /// `κ_{s,z}(ω₂)` at `Δ = 2κ₁` for `n_th ∈ {0, 0.01, …, 0.1}`.
    Fig1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub recipe: Option<Recipe>,
    /// The first axis is the curve variable; interior maxima are marked along it.
    pub axes: Vec<SweepAxis>,
    pub floquet: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            recipe: None,
            axes: vec![SweepAxis { name: "omega2".into(), min: 0.0, max: 50.0, count: 200, scale: Scale::Linear }],
            floquet: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Hilbert dimension of the spin target.
    pub target_dim: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { target_dim: 2 }
    }
}

pub const PROP_FAMILIES: &[&str] = &["prop1", "prop2", "prop3", "thm4"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropsConfig {
    /// Families to run; empty runs all.
    pub only: Vec<String>,
    /// Random instances per randomized family.
    pub samples: usize,
    /// Runs this instance index only, for replay.
    pub index: Option<u64>,
}

impl Default for PropsConfig {
    fn default() -> Self {
        Self { only: Vec::new(), samples: 16, index: None }
    }
}

impl RunConfig {
    /// Reads the optional config file, applies `key=value` overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                text.parse::<toml::Table>().with_context(|| format!("parsing {}", p.display()))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(doc).try_into().context("invalid configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [("tolerances.rel_tol", t.rel_tol), ("tolerances.max_coupling_ratio", t.max_coupling_ratio)] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name}: {v} must be positive");
            }
        }
        for axis in &self.sweep.axes {
            axis.validate()?;
        }
        if self.sweep.axes.is_empty() && self.sweep.recipe.is_none() {
            bail!("sweep.axes: at least one axis is required");
        }
        if self.sweep.axes.len() > 2 {
            bail!("sweep.axes: at most two axes are supported");
        }
        for f in &self.props.only {
            if !PROP_FAMILIES.contains(&f.as_str()) {
                bail!("props.only: unknown family `{f}` (expected one of {})", PROP_FAMILIES.join(", "));
            }
        }
        if self.oracle.target_dim < 2 {
            bail!("oracle.target_dim: must be at least 2");
        }
        Ok(())
    }
}

fn apply_override(doc: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item.split_once('=').ok_or_else(|| anyhow!("--set {item}: expected key=value"))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        bail!("--set {item}: empty key segment");
    }
    // Values are TOML literals; anything unparsable is taken as a bare string.
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut table = doc;
    for seg in parents {
        let entry = table.entry(seg.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| anyhow!("--set {item}: `{seg}` is not a section"))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}
