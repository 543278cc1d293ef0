//! Label topologies.
//!
//! The binary topology is the plain helix / non-helix alphabet. The extended
//! topology expands each label into counting states so that helix ends,
//! helix cores, loop ends and short inter-helix loops become visible to the
//! feature functions while inference stays an exact first-order chain.
//!
//! Helix run of length `n`: the first `min(5, ceil(n/2))` residues walk
//! `HIn1..`, the last `min(5, floor(n/2))` residues end on `..HOut5`, and
//! anything left in between is `HCore`. Long loops and terminal loops use
//! the same split over `LIn`/`LInt`/`LOut`. Loops shorter than seven residues
//! with a helix on both sides are `SL1..SLn`.

use std::fmt;

use crate::error::{Error, Result};
use crate::seq::{runs, BinaryLabel};

pub const END_STATES: u8 = 5;
pub const MAX_SHORT_LOOP: u8 = 6;

/// Index of a state inside a [`StateTopology`].
pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    Binary,
    Extended,
}

impl TopologyKind {
    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Binary => "binary",
            TopologyKind::Extended => "extended",
        }
    }

    pub fn parse(s: &str) -> Option<TopologyKind> {
        match s {
            "binary" => Some(TopologyKind::Binary),
            "extended" => Some(TopologyKind::Extended),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    NonHelix,
    Helix,
    HelixIn(u8),
    HelixCore,
    HelixOut(u8),
    LoopIn(u8),
    LoopInterior,
    LoopOut(u8),
    ShortLoop(u8),
}

/// Groups of extended states that share feature weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateFamily {
    HelixCore,
    HelixEnd,
    LoopEnd,
    ShortLoop,
}

impl StateFamily {
    pub const ALL: [StateFamily; 4] = [
        StateFamily::HelixCore,
        StateFamily::HelixEnd,
        StateFamily::LoopEnd,
        StateFamily::ShortLoop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateFamily::HelixCore => "HelixCore",
            StateFamily::HelixEnd => "HelixEnd",
            StateFamily::LoopEnd => "LoopEnd",
            StateFamily::ShortLoop => "ShortLoop",
        }
    }

    pub fn parse(s: &str) -> Option<StateFamily> {
        StateFamily::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl StateKind {
    pub fn projection(self) -> BinaryLabel {
        match self {
            StateKind::Helix | StateKind::HelixIn(_) | StateKind::HelixCore | StateKind::HelixOut(_) => {
                BinaryLabel::Helix
            }
            _ => BinaryLabel::NonHelix,
        }
    }

    pub fn family(self) -> Option<StateFamily> {
        match self {
            StateKind::HelixCore => Some(StateFamily::HelixCore),
            StateKind::HelixIn(_) | StateKind::HelixOut(_) => Some(StateFamily::HelixEnd),
            StateKind::LoopIn(_) | StateKind::LoopOut(_) => Some(StateFamily::LoopEnd),
            StateKind::ShortLoop(_) => Some(StateFamily::ShortLoop),
            _ => None,
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateKind::NonHelix => write!(f, "NH"),
            StateKind::Helix => write!(f, "H"),
            StateKind::HelixIn(k) => write!(f, "HIn{k}"),
            StateKind::HelixCore => write!(f, "HCore"),
            StateKind::HelixOut(k) => write!(f, "HOut{k}"),
            StateKind::LoopIn(k) => write!(f, "LIn{k}"),
            StateKind::LoopInterior => write!(f, "LInt"),
            StateKind::LoopOut(k) => write!(f, "LOut{k}"),
            StateKind::ShortLoop(k) => write!(f, "SL{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTopology {
    kind: TopologyKind,
    states: Vec<StateKind>,
    allowed: Vec<bool>,
    start: Vec<bool>,
    end: Vec<bool>,
}

impl StateTopology {
    pub fn new(kind: TopologyKind) -> Self {
        match kind {
            TopologyKind::Binary => Self::binary(),
            TopologyKind::Extended => Self::extended(),
        }
    }

    /// Two states, every transition allowed. Non-helix is listed first.
    pub fn binary() -> Self {
        StateTopology {
            kind: TopologyKind::Binary,
            states: vec![StateKind::NonHelix, StateKind::Helix],
            allowed: vec![true; 4],
            start: vec![true; 2],
            end: vec![true; 2],
        }
    }

    pub fn extended() -> Self {
        use StateKind::*;
        let mut states = Vec::new();
        states.extend((1..=END_STATES).map(LoopIn));
        states.push(LoopInterior);
        states.extend((1..=END_STATES).map(LoopOut));
        states.extend((1..=MAX_SHORT_LOOP).map(ShortLoop));
        states.extend((1..=END_STATES).map(HelixIn));
        states.push(HelixCore);
        states.extend((1..=END_STATES).map(HelixOut));

        let n = states.len();
        let mut topo = StateTopology {
            kind: TopologyKind::Extended,
            states,
            allowed: vec![false; n * n],
            start: vec![false; n],
            end: vec![false; n],
        };

        let mut allow = |a: StateKind, b: StateKind| {
            let (i, j) = (topo_index(&topo.states, a), topo_index(&topo.states, b));
            topo.allowed[i * n + j] = true;
        };

        // Runs over In/Core/Out for both helices and long loops share one shape.
        for (enter, core, exit) in [
            (HelixIn as fn(u8) -> StateKind, HelixCore, HelixOut as fn(u8) -> StateKind),
            (LoopIn, LoopInterior, LoopOut),
        ] {
            for k in 1..=END_STATES {
                if k < END_STATES {
                    allow(enter(k), enter(k + 1));
                    allow(exit(k), exit(k + 1));
                }
                // even run: k in, k out
                allow(enter(k), exit(END_STATES + 1 - k));
                // odd run: k in, k - 1 out
                if k >= 2 {
                    allow(enter(k), exit(END_STATES + 2 - k));
                }
            }
            allow(enter(END_STATES), core);
            allow(core, core);
            allow(core, exit(1));
        }

        // A run may end after its last Out state or after a lone In1.
        for helix_last in [HelixOut(END_STATES), HelixIn(1)] {
            allow(helix_last, LoopIn(1));
            allow(helix_last, ShortLoop(1));
        }
        for loop_last in [LoopOut(END_STATES), LoopIn(1)] {
            allow(loop_last, HelixIn(1));
        }
        for k in 1..=MAX_SHORT_LOOP {
            if k < MAX_SHORT_LOOP {
                allow(ShortLoop(k), ShortLoop(k + 1));
            }
            allow(ShortLoop(k), HelixIn(1));
        }

        for s in [HelixIn(1), LoopIn(1)] {
            let i = topo_index(&topo.states, s);
            topo.start[i] = true;
        }
        for s in [HelixIn(1), HelixOut(END_STATES), LoopIn(1), LoopOut(END_STATES)] {
            let i = topo_index(&topo.states, s);
            topo.end[i] = true;
        }
        topo
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateKind] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> StateKind {
        self.states[id]
    }

    pub fn index_of(&self, kind: StateKind) -> Option<StateId> {
        self.states.iter().position(|&s| s == kind)
    }

    pub fn parse_state(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.to_string() == name)
    }

    pub fn projection(&self, id: StateId) -> BinaryLabel {
        self.states[id].projection()
    }

    pub fn family(&self, id: StateId) -> Option<StateFamily> {
        self.states[id].family()
    }

    #[inline]
    pub fn is_allowed(&self, from: StateId, to: StateId) -> bool {
        self.allowed[from * self.states.len() + to]
    }

    pub fn is_start(&self, id: StateId) -> bool {
        self.start[id]
    }

    pub fn is_end(&self, id: StateId) -> bool {
        self.end[id]
    }

    /// Checks start, end and every transition of `path`.
    pub fn check_path(&self, path: &[StateId]) -> Result<()> {
        let Some((&first, &last)) = path.first().zip(path.last()) else {
            return Ok(());
        };
        if path.iter().any(|&s| s >= self.num_states()) {
            let position = path.iter().position(|&s| s >= self.num_states()).unwrap();
            return Err(Error::InfeasiblePath { position });
        }
        if !self.is_start(first) {
            return Err(Error::InfeasiblePath { position: 0 });
        }
        for (i, w) in path.windows(2).enumerate() {
            if !self.is_allowed(w[0], w[1]) {
                return Err(Error::InfeasiblePath { position: i + 1 });
            }
        }
        if !self.is_end(last) {
            return Err(Error::InfeasiblePath {
                position: path.len() - 1,
            });
        }
        Ok(())
    }

    /// Deterministic state path for a gold binary labelling.
    pub fn derive_states(&self, gold: &[BinaryLabel]) -> Vec<StateId> {
        match self.kind {
            TopologyKind::Binary => gold.iter().map(|l| l.index()).collect(),
            TopologyKind::Extended => self.derive_extended(gold),
        }
    }

    fn derive_extended(&self, gold: &[BinaryLabel]) -> Vec<StateId> {
        use StateKind::*;
        let runs = runs(gold);
        let last_run = runs.len().saturating_sub(1);
        let mut kinds = Vec::with_capacity(gold.len());
        for (r, &(label, _, n)) in runs.iter().enumerate() {
            let interior = r > 0 && r < last_run;
            if label.is_helix() {
                push_run(&mut kinds, n, HelixIn, HelixCore, HelixOut);
            } else if interior && n <= MAX_SHORT_LOOP as usize {
                kinds.extend((1..=n as u8).map(ShortLoop));
            } else {
                push_run(&mut kinds, n, LoopIn, LoopInterior, LoopOut);
            }
        }
        kinds
            .into_iter()
            .map(|k| self.index_of(k).expect("derived state belongs to topology"))
            .collect()
    }

    pub fn project(&self, path: &[StateId]) -> Vec<BinaryLabel> {
        path.iter().map(|&s| self.projection(s)).collect()
    }
}

fn topo_index(states: &[StateKind], kind: StateKind) -> usize {
    states.iter().position(|&s| s == kind).unwrap()
}

fn push_run(
    out: &mut Vec<StateKind>,
    n: usize,
    enter: fn(u8) -> StateKind,
    core: StateKind,
    exit: fn(u8) -> StateKind,
) {
    let cap = END_STATES as usize;
    let head = cap.min(n.div_ceil(2));
    let tail = cap.min(n / 2);
    let middle = n - head - tail;
    out.extend((1..=head as u8).map(enter));
    out.extend(std::iter::repeat_n(core, middle));
    out.extend(((cap - tail + 1) as u8..=END_STATES).map(exit));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{parse_labels, runs};
    use proptest::prelude::*;

    fn labels(s: &str) -> Vec<BinaryLabel> {
        parse_labels(s).unwrap()
    }

    fn kinds(topo: &StateTopology, path: &[StateId]) -> Vec<StateKind> {
        path.iter().map(|&s| topo.state(s)).collect()
    }

    #[test]
    fn binary_shape() {
        let t = StateTopology::binary();
        assert_eq!(t.num_states(), 2);
        for a in 0..2 {
            for b in 0..2 {
                assert!(t.is_allowed(a, b));
            }
        }
        assert_eq!(t.projection(0), BinaryLabel::NonHelix);
        assert_eq!(t.derive_states(&labels("0110")), vec![0, 1, 1, 0]);
    }

    #[test]
    fn extended_has_28_states() {
        assert_eq!(StateTopology::extended().num_states(), 28);
    }

    #[test]
    fn helix_of_18_splits_5_8_5() {
        let t = StateTopology::extended();
        let g = labels(&format!("0{}0", "1".repeat(18)));
        let k = kinds(&t, &t.derive_states(&g));
        let helix = &k[1..19];
        assert!(helix[..5].iter().all(|s| matches!(s, StateKind::HelixIn(_))));
        assert!(helix[5..13].iter().all(|s| *s == StateKind::HelixCore));
        assert!(helix[13..].iter().all(|s| matches!(s, StateKind::HelixOut(_))));
    }

    #[test]
    fn short_interior_loop() {
        let t = StateTopology::extended();
        let g = labels("11000001100000");
        let k = kinds(&t, &t.derive_states(&g));
        assert_eq!(
            &k[2..7],
            &(1..=5).map(StateKind::ShortLoop).collect::<Vec<_>>()[..]
        );
        // terminal tail is never a short loop
        assert!(k[9..].iter().all(|s| !matches!(s, StateKind::ShortLoop(_))));
    }

    #[test]
    fn helix_of_7_has_no_core() {
        let t = StateTopology::extended();
        let k = kinds(&t, &t.derive_states(&labels("1111111")));
        use StateKind::*;
        assert_eq!(
            k,
            vec![
                HelixIn(1),
                HelixIn(2),
                HelixIn(3),
                HelixIn(4),
                HelixOut(3),
                HelixOut(4),
                HelixOut(5)
            ]
        );
    }

    #[test]
    fn ceil_floor_split_for_all_run_lengths() {
        // independent count check for runs 1..30 against the ceil/floor rule
        let t = StateTopology::extended();
        for n in 1..=30usize {
            let g = vec![BinaryLabel::Helix; n];
            let k = kinds(&t, &t.derive_states(&g));
            let ins = k.iter().filter(|s| matches!(s, StateKind::HelixIn(_))).count();
            let outs = k.iter().filter(|s| matches!(s, StateKind::HelixOut(_))).count();
            let core = k.iter().filter(|s| **s == StateKind::HelixCore).count();
            assert_eq!(ins, 5.min((n + 1) / 2), "n={n}");
            assert_eq!(outs, 5.min(n / 2), "n={n}");
            assert_eq!(ins + outs + core, n);
            assert_eq!(t.project(&t.derive_states(&g)), g);
            t.check_path(&t.derive_states(&g)).unwrap();
        }
    }

    #[test]
    fn project_examples() {
        let t = StateTopology::extended();
        let p = [
            t.index_of(StateKind::LoopIn(1)).unwrap(),
            t.index_of(StateKind::HelixIn(1)).unwrap(),
            t.index_of(StateKind::HelixIn(2)).unwrap(),
        ];
        assert_eq!(t.project(&p), labels("011"));
        let lint = t.index_of(StateKind::LoopInterior).unwrap();
        assert_eq!(t.project(&[lint; 4]), labels("0000"));
    }

    #[test]
    fn exhaustive_round_trip_up_to_12() {
        for t in [StateTopology::binary(), StateTopology::extended()] {
            for n in 1..=12usize {
                for bits in 0u32..(1 << n) {
                    let g: Vec<BinaryLabel> = (0..n)
                        .map(|i| {
                            if bits >> i & 1 == 1 {
                                BinaryLabel::Helix
                            } else {
                                BinaryLabel::NonHelix
                            }
                        })
                        .collect();
                    let path = t.derive_states(&g);
                    t.check_path(&path).unwrap();
                    assert_eq!(t.project(&path), g);
                }
            }
        }
    }

    /// Every allowed path decomposes its helix runs exactly as `derive_states`
    /// does and never has a short-loop run longer than six.
    #[test]
    fn every_allowed_path_respects_the_decomposition() {
        let topo = StateTopology::extended();
        let t = &topo;
        let n = t.num_states();
        let mut frontier: Vec<Vec<StateId>> =
            (0..n).filter(|&s| t.is_start(s)).map(|s| vec![s]).collect();
        for len in 1..=14 {
            for path in frontier.iter().filter(|p| t.is_end(*p.last().unwrap())) {
                let k = kinds(t, path);
                let derived = kinds(t, &t.derive_states(&t.project(path)));
                for (label, start, run_len) in runs(&t.project(path)) {
                    if label.is_helix() {
                        assert_eq!(k[start..start + run_len], derived[start..start + run_len]);
                    }
                }
                let sl = runs(&k.iter().map(|s| matches!(s, StateKind::ShortLoop(_))).collect::<Vec<_>>());
                assert!(sl.iter().all(|&(is_sl, _, l)| !is_sl || l <= 6));
            }
            if len == 14 {
                break;
            }
            frontier = frontier
                .iter()
                .flat_map(|p| {
                    let last = *p.last().unwrap();
                    (0..n).filter(move |&s| t.is_allowed(last, s)).map(move |s| {
                        let mut q = p.clone();
                        q.push(s);
                        q
                    })
                })
                .collect();
        }
    }

    proptest! {
        #[test]
        fn random_round_trip_up_to_40(bits in prop::collection::vec(any::<bool>(), 13..=40)) {
            let t = StateTopology::extended();
            let g: Vec<BinaryLabel> = bits.iter()
                .map(|&b| if b { BinaryLabel::Helix } else { BinaryLabel::NonHelix })
                .collect();
            let path = t.derive_states(&g);
            prop_assert!(t.check_path(&path).is_ok());
            prop_assert_eq!(t.project(&path), g);
        }
    }
}
