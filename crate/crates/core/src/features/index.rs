use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::predicates::{Predicate, PredicateEnumerator, EDGE};
use super::{FeatureConfig, FeatureGroup};
use crate::error::{Error, Result};
use crate::seq::{BinaryLabel, Dataset, ProteinRecord};
use crate::topology::{StateFamily, StateId, StateTopology};

/// The label side of a feature.
///
/// Ordinary groups condition on the binary projection of the current state
/// (or of the previous and current state for transition predicates). Short
/// loop and sequence-state predicates condition on extended state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelContext {
    Label(BinaryLabel),
    Transition(BinaryLabel, BinaryLabel),
    Family(StateFamily),
}

pub type ContextId = u8;
pub const NUM_CONTEXTS: usize = 10;

impl LabelContext {
    pub fn id(self) -> ContextId {
        match self {
            LabelContext::Label(l) => l.index() as u8,
            LabelContext::Transition(a, b) => 2 + 2 * a.index() as u8 + b.index() as u8,
            LabelContext::Family(f) => {
                6 + StateFamily::ALL.iter().position(|x| *x == f).unwrap() as u8
            }
        }
    }

    pub fn from_id(id: ContextId) -> LabelContext {
        let bin = |i: u8| if i == 0 { BinaryLabel::NonHelix } else { BinaryLabel::Helix };
        match id {
            0 | 1 => LabelContext::Label(bin(id)),
            2..=5 => LabelContext::Transition(bin((id - 2) / 2), bin((id - 2) % 2)),
            _ => LabelContext::Family(StateFamily::ALL[(id - 6) as usize]),
        }
    }

    pub fn is_bigram(self) -> bool {
        matches!(self, LabelContext::Transition(..))
    }

    pub fn parse(s: &str) -> Option<LabelContext> {
        let bin = |s: &str| match s {
            "NH" => Some(BinaryLabel::NonHelix),
            "H" => Some(BinaryLabel::Helix),
            _ => None,
        };
        if let Some((a, b)) = s.split_once('>') {
            return Some(LabelContext::Transition(bin(a)?, bin(b)?));
        }
        bin(s)
            .map(LabelContext::Label)
            .or_else(|| StateFamily::parse(s).map(LabelContext::Family))
    }

    /// Contexts a predicate may be paired with.
    fn candidates(p: &Predicate) -> &'static [LabelContext] {
        use BinaryLabel::{Helix as H, NonHelix as N};
        use LabelContext::*;
        const UNIGRAM: &[LabelContext] = &[Label(N), Label(H)];
        const EDGES: &[LabelContext] = &[
            Transition(N, N),
            Transition(N, H),
            Transition(H, N),
            Transition(H, H),
        ];
        const CHANGES: &[LabelContext] = &[Transition(N, H), Transition(H, N)];
        const SHORT: &[LabelContext] = &[Family(StateFamily::ShortLoop)];
        const STATES: &[LabelContext] = &[
            Family(StateFamily::HelixCore),
            Family(StateFamily::HelixEnd),
            Family(StateFamily::LoopEnd),
        ];
        match p.group {
            FeatureGroup::StartEndEdge if p.key == EDGE => EDGES,
            FeatureGroup::Border => CHANGES,
            FeatureGroup::ShortLoops => SHORT,
            FeatureGroup::States => STATES,
            _ => UNIGRAM,
        }
    }
}

impl fmt::Display for LabelContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |l: &BinaryLabel| if l.is_helix() { "H" } else { "NH" };
        match self {
            LabelContext::Label(l) => f.write_str(bin(l)),
            LabelContext::Transition(a, b) => write!(f, "{}>{}", bin(a), bin(b)),
            LabelContext::Family(fam) => f.write_str(fam.name()),
        }
    }
}

/// Which contexts each state and state pair of a topology activates.
#[derive(Debug, Clone)]
pub(crate) struct ContextMap {
    unigram: Vec<Vec<ContextId>>,
    bigram: Vec<ContextId>,
    num_states: usize,
}

impl ContextMap {
    pub(crate) fn new(topo: &StateTopology) -> Self {
        let n = topo.num_states();
        let unigram = (0..n)
            .map(|s| {
                let mut v = vec![LabelContext::Label(topo.projection(s)).id()];
                if let Some(f) = topo.family(s) {
                    v.push(LabelContext::Family(f).id());
                }
                v
            })
            .collect();
        let bigram = (0..n * n)
            .map(|k| LabelContext::Transition(topo.projection(k / n), topo.projection(k % n)).id())
            .collect();
        ContextMap {
            unigram,
            bigram,
            num_states: n,
        }
    }

    #[inline]
    pub(crate) fn unigram(&self, s: StateId) -> &[ContextId] {
        &self.unigram[s]
    }

    #[inline]
    pub(crate) fn bigram(&self, prev: StateId, s: StateId) -> ContextId {
        self.bigram[prev * self.num_states + s]
    }

    /// Contexts active at position `i` of a state path.
    pub(crate) fn active(&self, path: &[StateId], i: usize) -> [bool; NUM_CONTEXTS] {
        let mut on = [false; NUM_CONTEXTS];
        for &c in self.unigram(path[i]) {
            on[c as usize] = true;
        }
        if i > 0 {
            on[self.bigram(path[i - 1], path[i]) as usize] = true;
        }
        on
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureKey {
    pub predicate: Predicate,
    pub context: LabelContext,
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}",
            self.predicate.group, self.predicate.key, self.context
        )
    }
}

/// Per-position feature firings of one record: `(context, feature index)`
/// pairs, active whenever the label context holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledRecord {
    offsets: Vec<usize>,
    entries: Vec<(ContextId, u32)>,
}

impl CompiledRecord {
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn at(&self, i: usize) -> &[(ContextId, u32)] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }
}

/// Bijection between instantiated feature keys and dense indices.
#[derive(Debug, Clone, Default)]
pub struct FeatureIndex {
    keys: Vec<FeatureKey>,
    lookup: HashMap<Predicate, Vec<(ContextId, u32)>>,
}

impl PartialEq for FeatureIndex {
    fn eq(&self, other: &Self) -> bool {
        self.keys == other.keys
    }
}

impl FeatureIndex {
    /// Index over `keys` in the given dense order.
    pub fn from_keys(keys: Vec<FeatureKey>) -> Result<Self> {
        let mut lookup: HashMap<Predicate, Vec<(ContextId, u32)>> = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            let slot = lookup.entry(k.predicate.clone()).or_default();
            if slot.iter().any(|(c, _)| *c == k.context.id()) {
                return Err(Error::ModelFormat {
                    line: i + 1,
                    msg: format!("duplicate feature `{k}`"),
                });
            }
            slot.push((k.context.id(), i as u32));
        }
        Ok(FeatureIndex { keys, lookup })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[FeatureKey] {
        &self.keys
    }

    pub fn key(&self, j: usize) -> &FeatureKey {
        &self.keys[j]
    }

    pub fn get(&self, key: &FeatureKey) -> Option<usize> {
        self.lookup
            .get(&key.predicate)?
            .iter()
            .find(|(c, _)| *c == key.context.id())
            .map(|&(_, j)| j as usize)
    }

    /// Resolves every active predicate of `record` against the index.
    /// Predicates that were never seen in training contribute nothing.
    pub fn compile(&self, record: &ProteinRecord, enumerator: &PredicateEnumerator) -> CompiledRecord {
        let seq = record.sequence();
        let mut offsets = Vec::with_capacity(seq.len() + 1);
        let mut entries = Vec::new();
        offsets.push(0);
        for i in 0..seq.len() {
            for p in enumerator.at(seq, i) {
                if let Some(found) = self.lookup.get(&p) {
                    entries.extend_from_slice(found);
                }
            }
            offsets.push(entries.len());
        }
        CompiledRecord { offsets, entries }
    }

    /// One line per feature: `group<TAB>key<TAB>context<TAB>index`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, k) in self.keys.iter().enumerate() {
            out.push_str(&format!("{k}\t{i}\n"));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut keys = Vec::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::ModelFormat {
                    line: n + 1,
                    msg: "expected 4 tab-separated fields".into(),
                });
            }
            let key = parse_key_fields(&fields[..3], n + 1)?;
            if fields[3].parse::<usize>().ok() != Some(keys.len()) {
                return Err(Error::ModelFormat {
                    line: n + 1,
                    msg: "feature indices must be dense and in order".into(),
                });
            }
            keys.push(key);
        }
        FeatureIndex::from_keys(keys)
    }
}

/// Parses `group`, `key`, `context` columns.
pub(crate) fn parse_key_fields(fields: &[&str], line: usize) -> Result<FeatureKey> {
    let err = |msg: &str| Error::ModelFormat {
        line,
        msg: msg.to_string(),
    };
    let group = FeatureGroup::parse(fields[0]).ok_or_else(|| err("unknown feature group"))?;
    let context = LabelContext::parse(fields[2]).ok_or_else(|| err("unknown label context"))?;
    Ok(FeatureKey {
        predicate: Predicate::new(group, fields[1]),
        context,
    })
}

/// Instantiates every feature whose predicate fires at a training position
/// together with the label context the gold state path shows there.
pub fn build_index(train: &Dataset, config: &FeatureConfig, topo: &StateTopology) -> Result<FeatureIndex> {
    config.check(topo.kind())?;
    if train.is_empty() {
        return Err(Error::EmptyTraining);
    }
    let enumerator = PredicateEnumerator::new(config);
    let contexts = ContextMap::new(topo);
    let mut keys = BTreeSet::new();
    for record in train.records() {
        let gold = record
            .gold()
            .ok_or_else(|| Error::MissingGold(record.id().to_string()))?;
        let path = topo.derive_states(gold);
        for (i, preds) in enumerator.enumerate(record).into_iter().enumerate() {
            let active = contexts.active(&path, i);
            for p in preds {
                for &ctx in LabelContext::candidates(&p) {
                    if active[ctx.id() as usize] {
                        keys.insert(FeatureKey {
                            predicate: p.clone(),
                            context: ctx,
                        });
                    }
                }
            }
        }
    }
    FeatureIndex::from_keys(keys.into_iter().collect())
}
