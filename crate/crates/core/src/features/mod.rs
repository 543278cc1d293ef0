//! Observation predicates and the feature index.
//!
//! A feature is an observation predicate (a label-free boolean function of
//! the sequence and a position) crossed with a label context. Predicates are
//! organised in eighteen groups that can be toggled independently.

mod index;
mod predicates;
pub mod tables;

use std::fmt;

pub use index::{
    build_index, CompiledRecord, ContextId, FeatureIndex, FeatureKey, LabelContext, NUM_CONTEXTS,
};
pub(crate) use index::{parse_key_fields, ContextMap};
pub use predicates::{enumerate_predicates, Predicate, PredicateEnumerator};
pub use tables::{
    default_property_groups, kd_value, window_mean_kd, Classification, ElectronicClass,
    PropertyGroup, ResidueClassTables,
};

use crate::error::{Error, Result};
use crate::topology::TopologyKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureGroup {
    StartEndEdge,
    Basic,
    Properties,
    HydrophobicWindow,
    HydrophilicWindow,
    Single,
    Double,
    SingleShuffled,
    DoubleShuffled,
    SingleHydrophobic,
    DoubleHydrophobic,
    SingleHydrophilic,
    DoubleHydrophilic,
    Border,
    ShortLoops,
    Electronic,
    ChemicalGroups,
    States,
}

impl FeatureGroup {
    pub const COUNT: usize = 18;

    pub const ALL: [FeatureGroup; FeatureGroup::COUNT] = [
        FeatureGroup::StartEndEdge,
        FeatureGroup::Basic,
        FeatureGroup::Properties,
        FeatureGroup::HydrophobicWindow,
        FeatureGroup::HydrophilicWindow,
        FeatureGroup::Single,
        FeatureGroup::Double,
        FeatureGroup::SingleShuffled,
        FeatureGroup::DoubleShuffled,
        FeatureGroup::SingleHydrophobic,
        FeatureGroup::DoubleHydrophobic,
        FeatureGroup::SingleHydrophilic,
        FeatureGroup::DoubleHydrophilic,
        FeatureGroup::Border,
        FeatureGroup::ShortLoops,
        FeatureGroup::Electronic,
        FeatureGroup::ChemicalGroups,
        FeatureGroup::States,
    ];

    pub fn name(self) -> &'static str {
        use FeatureGroup::*;
        match self {
            StartEndEdge => "start_end_edge",
            Basic => "basic",
            Properties => "properties",
            HydrophobicWindow => "hydrophobic_window",
            HydrophilicWindow => "hydrophilic_window",
            Single => "single",
            Double => "double",
            SingleShuffled => "single_shuffled",
            DoubleShuffled => "double_shuffled",
            SingleHydrophobic => "single_hydrophobic",
            DoubleHydrophobic => "double_hydrophobic",
            SingleHydrophilic => "single_hydrophilic",
            DoubleHydrophilic => "double_hydrophilic",
            Border => "border",
            ShortLoops => "short_loops",
            Electronic => "electronic",
            ChemicalGroups => "groups",
            States => "states",
        }
    }

    pub fn parse(s: &str) -> Option<FeatureGroup> {
        FeatureGroup::ALL.into_iter().find(|g| g.name() == s)
    }

    /// Groups parameterised by a neighbour count.
    pub fn has_order(self) -> bool {
        use FeatureGroup::*;
        matches!(
            self,
            Single
                | Double
                | SingleShuffled
                | DoubleShuffled
                | SingleHydrophobic
                | DoubleHydrophobic
                | SingleHydrophilic
                | DoubleHydrophilic
        )
    }

    /// Groups that need the extended state alphabet.
    pub fn needs_extended(self) -> bool {
        matches!(self, FeatureGroup::ShortLoops | FeatureGroup::States)
    }

    fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEFAULT_WINDOW: usize = 19;
pub const DEFAULT_THRESHOLD: f64 = 1.0;

/// Which feature groups are active, their neighbour orders, and the tables
/// they read.
#[derive(Debug, Clone)]
pub struct FeatureConfig {
    enabled: [bool; FeatureGroup::COUNT],
    order: [usize; FeatureGroup::COUNT],
    pub window: usize,
    pub threshold: f64,
    custom_properties: Option<Vec<PropertyGroup>>,
}

// orders of disabled groups do not count
impl PartialEq for FeatureConfig {
    fn eq(&self, other: &Self) -> bool {
        self.enabled == other.enabled
            && FeatureGroup::ALL.iter().all(|&g| self.order(g) == other.order(g))
            && self.window == other.window
            && self.threshold == other.threshold
            && self.custom_properties == other.custom_properties
    }
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig::none()
    }
}

impl FeatureConfig {
    /// Every group disabled.
    pub fn none() -> Self {
        FeatureConfig {
            enabled: [false; FeatureGroup::COUNT],
            order: [0; FeatureGroup::COUNT],
            window: DEFAULT_WINDOW,
            threshold: DEFAULT_THRESHOLD,
            custom_properties: None,
        }
    }

    /// Default neighbour orders (5/3 ordered, 6/3 shuffled, 6/3 hydropathy).
    pub fn default_order(group: FeatureGroup) -> usize {
        use FeatureGroup::*;
        match group {
            Single => 5,
            SingleShuffled | SingleHydrophobic | SingleHydrophilic => 6,
            Double | DoubleShuffled | DoubleHydrophobic | DoubleHydrophilic => 3,
            _ => 0,
        }
    }

    pub fn enable(&mut self, group: FeatureGroup) -> &mut Self {
        self.enabled[group.ordinal()] = true;
        if group.has_order() && self.order[group.ordinal()] == 0 {
            self.order[group.ordinal()] = Self::default_order(group);
        }
        self
    }

    pub fn enable_with_order(&mut self, group: FeatureGroup, order: usize) -> &mut Self {
        self.enabled[group.ordinal()] = true;
        self.order[group.ordinal()] = order;
        self
    }

    pub fn disable(&mut self, group: FeatureGroup) -> &mut Self {
        self.enabled[group.ordinal()] = false;
        self
    }

    pub fn set_order(&mut self, group: FeatureGroup, order: usize) -> &mut Self {
        self.order[group.ordinal()] = order;
        self
    }

    pub fn with(mut self, group: FeatureGroup) -> Self {
        self.enable(group);
        self
    }

    pub fn with_order(mut self, group: FeatureGroup, order: usize) -> Self {
        self.enable_with_order(group, order);
        self
    }

    pub fn is_enabled(&self, group: FeatureGroup) -> bool {
        self.enabled[group.ordinal()]
    }

    /// Neighbour order of an enabled group, 0 when disabled.
    pub fn order(&self, group: FeatureGroup) -> usize {
        if self.is_enabled(group) {
            self.order[group.ordinal()]
        } else {
            0
        }
    }

    pub fn enabled_groups(&self) -> impl Iterator<Item = FeatureGroup> + '_ {
        FeatureGroup::ALL.into_iter().filter(|g| self.is_enabled(*g))
    }

    pub fn needs_extended(&self) -> bool {
        self.enabled_groups().any(FeatureGroup::needs_extended)
    }

    /// Replaces the default property groups.
    pub fn set_property_groups(&mut self, groups: Vec<PropertyGroup>) -> &mut Self {
        self.custom_properties = Some(groups);
        self
    }

    pub fn custom_property_groups(&self) -> Option<&[PropertyGroup]> {
        self.custom_properties.as_deref()
    }

    pub fn tables(&self) -> ResidueClassTables {
        match &self.custom_properties {
            Some(g) => ResidueClassTables::with_properties(g.clone()),
            None => ResidueClassTables::default(),
        }
    }

    /// Fails on an even window or when a group needs states the topology
    /// does not have.
    pub fn check(&self, kind: TopologyKind) -> Result<()> {
        if self.window % 2 == 0 {
            return Err(Error::ConfigConflict(format!("window length {} is not odd", self.window)));
        }
        if kind == TopologyKind::Binary {
            if let Some(g) = self.enabled_groups().find(|g| g.needs_extended()) {
                return Err(Error::ConfigConflict(format!(
                    "feature group `{g}` requires the extended topology"
                )));
            }
        }
        Ok(())
    }
}
