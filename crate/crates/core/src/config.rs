//! Experiment configuration: a flat `key = value` text format.
//!
//! ```text
//! preset = exp3
//! group.single = on
//! group.single.max = 4
//! feature.window = 19
//! topology = auto
//! train.sigma2 = 10
//! ```
//!
//! `#` starts a comment. A `preset` line replaces everything set before it.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureGroup, PropertyGroup};
use crate::topology::{StateTopology, TopologyKind};
use crate::train::{Reduction, TrainConfig};

pub const PRESETS: [&str; 8] = ["exp1", "exp2", "exp3", "exp4", "exp5", "exp6", "exp7", "exp8"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopologyChoice {
    /// Extended when a group needs it, binary otherwise.
    #[default]
    Auto,
    Fixed(TopologyKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub features: FeatureConfig,
    pub topology: TopologyChoice,
    pub train: TrainConfig,
    pub train_path: Option<String>,
    pub test_path: Option<String>,
    pub exclude_prefixes: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::preset("exp8").unwrap()
    }
}

impl ExperimentConfig {
    pub fn with_features(features: FeatureConfig) -> Self {
        ExperimentConfig {
            features,
            topology: TopologyChoice::Auto,
            train: TrainConfig::default(),
            train_path: None,
            test_path: None,
            exclude_prefixes: Vec::new(),
        }
    }

    /// One of `exp1` to `exp8`.
    pub fn preset(name: &str) -> Result<Self> {
        use FeatureGroup::*;
        let n = name
            .strip_prefix("exp")
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|n| (1..=8).contains(n))
            .ok_or_else(|| Error::ConfigConflict(format!("unknown preset `{name}`")))?;
        // columns exp1..exp8; 0 = off, 1 = on, k > 1 = on with that neighbour bound
        #[rustfmt::skip]
        let table: [(FeatureGroup, [usize; 8]); 17] = [
            (Basic,             [1, 0, 1, 1, 1, 1, 1, 1]),
            (Properties,        [1, 0, 1, 1, 1, 1, 1, 1]),
            (HydrophobicWindow, [0, 0, 1, 1, 1, 1, 1, 1]),
            (HydrophilicWindow, [0, 0, 1, 1, 1, 1, 1, 1]),
            (Single,            [0, 2, 5, 3, 5, 5, 5, 5]),
            (Double,            [0, 1, 1, 1, 3, 3, 3, 3]),
            (SingleShuffled,    [0, 0, 0, 3, 6, 6, 6, 6]),
            (DoubleShuffled,    [0, 0, 0, 1, 3, 3, 3, 3]),
            (SingleHydrophobic, [0, 0, 0, 0, 0, 3, 6, 6]),
            (DoubleHydrophobic, [0, 0, 0, 0, 0, 1, 3, 3]),
            (SingleHydrophilic, [0, 0, 0, 0, 0, 3, 6, 6]),
            (DoubleHydrophilic, [0, 0, 0, 0, 0, 1, 3, 3]),
            (Border,            [0, 0, 0, 0, 0, 0, 1, 1]),
            (ShortLoops,        [0, 0, 0, 0, 0, 0, 1, 1]),
            (Electronic,        [0, 0, 0, 0, 0, 0, 1, 1]),
            (ChemicalGroups,    [0, 0, 0, 0, 0, 0, 0, 1]),
            (States,            [0, 0, 0, 0, 0, 0, 0, 1]),
        ];
        let mut f = FeatureConfig::none().with(StartEndEdge);
        for (g, cols) in table {
            match cols[n - 1] {
                0 => {}
                k if g.has_order() => {
                    f.enable_with_order(g, k);
                }
                _ => {
                    f.enable(g);
                }
            }
        }
        Ok(ExperimentConfig::with_features(f))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        c.apply(text)?;
        Ok(c)
    }

    /// Applies every line of `text` on top of the current values.
    pub fn apply(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: n + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(k.trim(), v.trim()).map_err(|e| match e {
                Error::Config { msg, .. } => Error::Config { line: n + 1, msg },
                other => other,
            })?;
        }
        Ok(())
    }

    /// Sets one key. Errors carry line 0.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |msg: String| Error::Config { line: 0, msg };
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| bad(format!("`{key}`: `{v}` is not a number")))
        };
        let int = |v: &str| -> Result<usize> {
            v.parse::<usize>().map_err(|_| bad(format!("`{key}`: `{v}` is not a non-negative integer")))
        };
        let flag = |v: &str| -> Result<bool> {
            match v {
                "on" | "true" | "yes" => Ok(true),
                "off" | "false" | "no" => Ok(false),
                _ => Err(bad(format!("`{key}`: expected on or off, got `{v}`"))),
            }
        };

        if let Some(rest) = key.strip_prefix("group.") {
            let (name, is_max) = match rest.strip_suffix(".max") {
                Some(n) => (n, true),
                None => (rest, false),
            };
            let g = FeatureGroup::parse(name).ok_or_else(|| bad(format!("unknown feature group `{name}`")))?;
            if is_max {
                if !g.has_order() {
                    return Err(bad(format!("group `{name}` takes no neighbour bound")));
                }
                let k = int(value)?;
                if k == 0 {
                    return Err(bad(format!("`{key}` must be at least 1")));
                }
                self.features.set_order(g, k);
            } else if flag(value)? {
                self.features.enable(g);
            } else {
                self.features.disable(g);
            }
            return Ok(());
        }
        if let Some(name) = key.strip_prefix("property.") {
            let group = PropertyGroup::new(name, value)
                .ok_or_else(|| bad(format!("`{key}`: `{value}` is not a residue list")))?;
            let mut groups = self.features.custom_property_groups().map(<[_]>::to_vec).unwrap_or_default();
            groups.retain(|g| g.name != group.name);
            groups.push(group);
            self.features.set_property_groups(groups);
            return Ok(());
        }
        match key {
            "preset" => *self = ExperimentConfig::preset(value).map_err(|_| bad(format!("unknown preset `{value}`")))?,
            "topology" => {
                self.topology = match value {
                    "auto" => TopologyChoice::Auto,
                    _ => TopologyChoice::Fixed(
                        TopologyKind::parse(value).ok_or_else(|| bad(format!("unknown topology `{value}`")))?,
                    ),
                }
            }
            "feature.window" => {
                let w = int(value)?;
                if w % 2 == 0 {
                    return Err(bad("feature.window must be odd".into()));
                }
                self.features.window = w;
            }
            "feature.threshold" => self.features.threshold = num(value)?,
            "train.sigma2" => self.train.sigma2 = num(value)?,
            "train.epsilon" => self.train.epsilon = num(value)?,
            "train.max_iters" => self.train.max_iters = int(value)?,
            "train.lbfgs_history" => self.train.lbfgs_history = int(value)?,
            "train.deterministic" => {
                self.train.reduction = if flag(value)? {
                    Reduction::Deterministic
                } else {
                    Reduction::Free
                }
            }
            "data.train" => self.train_path = Some(value.to_string()),
            "data.test" => self.test_path = Some(value.to_string()),
            "filter.exclude_prefix" => self
                .exclude_prefixes
                .extend(value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from)),
            _ => return Err(bad(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Checks the training settings and picks the state topology.
    pub fn resolve_topology(&self) -> Result<StateTopology> {
        self.train.validate()?;
        let kind = match self.topology {
            TopologyChoice::Auto if self.features.needs_extended() => TopologyKind::Extended,
            TopologyChoice::Auto => TopologyKind::Binary,
            TopologyChoice::Fixed(k) => k,
        };
        self.features.check(kind)?;
        Ok(StateTopology::new(kind))
    }

    /// Canonical text of everything that shapes the feature space.
    pub fn feature_text(features: &FeatureConfig, topology: TopologyKind) -> String {
        let mut out = String::new();
        write_features(&mut out, features);
        writeln!(out, "topology = {}", topology.name()).unwrap();
        out
    }

    /// Full canonical dump; parsing it back gives the same configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_features(&mut out, &self.features);
        let topo = match self.topology {
            TopologyChoice::Auto => "auto",
            TopologyChoice::Fixed(k) => k.name(),
        };
        writeln!(out, "topology = {topo}").unwrap();
        let t = &self.train;
        writeln!(out, "train.sigma2 = {}", t.sigma2).unwrap();
        writeln!(out, "train.epsilon = {}", t.epsilon).unwrap();
        writeln!(out, "train.max_iters = {}", t.max_iters).unwrap();
        writeln!(out, "train.lbfgs_history = {}", t.lbfgs_history).unwrap();
        writeln!(out, "train.deterministic = {}", t.reduction == Reduction::Deterministic).unwrap();
        if let Some(p) = &self.train_path {
            writeln!(out, "data.train = {p}").unwrap();
        }
        if let Some(p) = &self.test_path {
            writeln!(out, "data.test = {p}").unwrap();
        }
        if !self.exclude_prefixes.is_empty() {
            writeln!(out, "filter.exclude_prefix = {}", self.exclude_prefixes.join(",")).unwrap();
        }
        out
    }
}

fn write_features(out: &mut String, features: &FeatureConfig) {
    for g in FeatureGroup::ALL {
        let on = features.is_enabled(g);
        writeln!(out, "group.{} = {}", g.name(), if on { "on" } else { "off" }).unwrap();
        if on && g.has_order() {
            writeln!(out, "group.{}.max = {}", g.name(), features.order(g)).unwrap();
        }
    }
    writeln!(out, "feature.window = {}", features.window).unwrap();
    writeln!(out, "feature.threshold = {}", features.threshold).unwrap();
    if let Some(groups) = features.custom_property_groups() {
        for g in groups {
            writeln!(out, "property.{} = {}", g.name, g.letters()).unwrap();
        }
    }
}

/// Lowercase hex SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// Hash identifying a feature space.
pub fn feature_hash(features: &FeatureConfig, topology: TopologyKind) -> String {
    sha256_hex(&ExperimentConfig::feature_text(features, topology))
}
