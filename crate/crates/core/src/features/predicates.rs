use std::fmt;

use super::tables::{mean_kd, window_mean_kd, ElectronicClass, ResidueClassTables};
use super::{FeatureConfig, FeatureGroup};
use crate::seq::{residues_to_string, ProteinRecord, Residue};

/// A label-free boolean test on `(sequence, position)`, identified by its
/// group and a group-specific key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub group: FeatureGroup,
    pub key: String,
}

impl Predicate {
    pub fn new(group: FeatureGroup, key: impl Into<String>) -> Self {
        Predicate {
            group,
            key: key.into(),
        }
    }

    /// Transition-arity predicates condition on the previous label too.
    pub fn is_bigram(&self) -> bool {
        match self.group {
            FeatureGroup::Border => true,
            FeatureGroup::StartEndEdge => self.key == EDGE,
            _ => false,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.group, self.key)
    }
}

pub(crate) const START: &str = "start";
pub(crate) const END: &str = "end";
pub(crate) const EDGE: &str = "edge";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl Side {
    fn tag(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// Enumerates predicates for a fixed configuration.
#[derive(Debug, Clone)]
pub struct PredicateEnumerator {
    config: FeatureConfig,
    tables: ResidueClassTables,
}

impl PredicateEnumerator {
    pub fn new(config: &FeatureConfig) -> Self {
        PredicateEnumerator {
            config: config.clone(),
            tables: config.tables(),
        }
    }

    /// Active predicates at every position of `record`.
    pub fn enumerate(&self, record: &ProteinRecord) -> Vec<Vec<Predicate>> {
        let seq = record.sequence();
        (0..seq.len()).map(|i| self.at(seq, i)).collect()
    }

    pub fn at(&self, seq: &[Residue], i: usize) -> Vec<Predicate> {
        use FeatureGroup::*;
        let cfg = &self.config;
        let n = seq.len();
        let r = seq[i];
        let mut out = Vec::new();

        if cfg.is_enabled(StartEndEdge) {
            if i == 0 {
                out.push(Predicate::new(StartEndEdge, START));
            }
            if i + 1 == n {
                out.push(Predicate::new(StartEndEdge, END));
            }
            if i > 0 {
                out.push(Predicate::new(StartEndEdge, EDGE));
            }
        }

        if cfg.is_enabled(Basic) && r.is_standard() {
            out.push(Predicate::new(Basic, r.as_char().to_string()));
        }

        if cfg.is_enabled(Properties) {
            for g in self.tables.properties_of(r) {
                out.push(Predicate::new(Properties, g.name.clone()));
            }
        }

        if cfg.is_enabled(HydrophobicWindow) || cfg.is_enabled(HydrophilicWindow) {
            let mean = window_mean_kd(seq, i, cfg.window);
            let key = format!("w{}", cfg.window);
            if cfg.is_enabled(HydrophobicWindow) && mean > cfg.threshold {
                out.push(Predicate::new(HydrophobicWindow, key.clone()));
            }
            if cfg.is_enabled(HydrophilicWindow) && mean < cfg.threshold {
                out.push(Predicate::new(HydrophilicWindow, key));
            }
        }

        for side in [Side::Left, Side::Right] {
            let max_k = cfg
                .order(Single)
                .max(cfg.order(SingleShuffled))
                .max(cfg.order(SingleHydrophobic))
                .max(cfg.order(SingleHydrophilic));
            for k in 1..=max_k {
                let Some(win) = side_window(seq, i, side, k) else {
                    break;
                };
                let standard = win.iter().all(|r| r.is_standard());
                if k <= cfg.order(Single) && standard {
                    out.push(Predicate::new(
                        Single,
                        format!("{}{k}:{}", side.tag(), residues_to_string(win)),
                    ));
                }
                if k <= cfg.order(SingleShuffled) && standard {
                    out.push(Predicate::new(
                        SingleShuffled,
                        format!("{}{k}:{}", side.tag(), sorted_string(win)),
                    ));
                }
                self.push_hydropathy(
                    &mut out,
                    win,
                    (SingleHydrophobic, SingleHydrophilic),
                    k,
                    format!("{}{k}", side.tag()),
                );
            }
        }

        let max_k = cfg
            .order(Double)
            .max(cfg.order(DoubleShuffled))
            .max(cfg.order(DoubleHydrophobic))
            .max(cfg.order(DoubleHydrophilic));
        for k in 1..=max_k {
            let (Some(left), Some(right)) = (
                side_window(seq, i, Side::Left, k),
                side_window(seq, i, Side::Right, k),
            ) else {
                break;
            };
            let standard = left.iter().chain(right).all(|r| r.is_standard());
            if k <= cfg.order(Double) && standard {
                out.push(Predicate::new(
                    Double,
                    format!("{k}:{}|{}", residues_to_string(left), residues_to_string(right)),
                ));
            }
            let both: Vec<Residue> = left.iter().chain(right).copied().collect();
            if k <= cfg.order(DoubleShuffled) && standard {
                out.push(Predicate::new(
                    DoubleShuffled,
                    format!("{k}:{}", sorted_string(&both)),
                ));
            }
            self.push_hydropathy(
                &mut out,
                &both,
                (DoubleHydrophobic, DoubleHydrophilic),
                k,
                k.to_string(),
            );
        }

        if cfg.is_enabled(Border) && i > 0 && r.is_standard() && seq[i - 1].is_standard() {
            out.push(Predicate::new(
                Border,
                format!("{}{}", seq[i - 1].as_char(), r.as_char()),
            ));
        }

        if cfg.is_enabled(ShortLoops) && r.is_standard() {
            out.push(Predicate::new(ShortLoops, r.as_char().to_string()));
        }

        if cfg.is_enabled(Electronic) {
            if let Some(class) = ElectronicClass::of(r) {
                out.push(Predicate::new(Electronic, class.name()));
            }
        }

        if cfg.is_enabled(ChemicalGroups) {
            for g in self.tables.chemical_groups_of(r) {
                out.push(Predicate::new(ChemicalGroups, g.to_string()));
            }
        }

        if cfg.is_enabled(States) && r.is_standard() {
            out.push(Predicate::new(States, r.as_char().to_string()));
        }

        out
    }

    fn push_hydropathy(
        &self,
        out: &mut Vec<Predicate>,
        window: &[Residue],
        (phobic, philic): (FeatureGroup, FeatureGroup),
        k: usize,
        key: String,
    ) {
        let want_phobic = k <= self.config.order(phobic);
        let want_philic = k <= self.config.order(philic);
        if !(want_phobic || want_philic) {
            return;
        }
        let mean = mean_kd(window);
        if want_phobic && mean > self.config.threshold {
            out.push(Predicate::new(phobic, key));
        } else if want_philic && mean < self.config.threshold {
            out.push(Predicate::new(philic, key));
        }
    }
}

/// The `k` residues strictly left or right of `i`, if they fit.
fn side_window(seq: &[Residue], i: usize, side: Side, k: usize) -> Option<&[Residue]> {
    match side {
        Side::Left => (i >= k).then(|| &seq[i - k..i]),
        Side::Right => (i + k < seq.len()).then(|| &seq[i + 1..=i + k]),
    }
}

fn sorted_string(residues: &[Residue]) -> String {
    let mut v = residues.to_vec();
    v.sort_unstable();
    residues_to_string(&v)
}

/// Active predicates at every position of `record`.
pub fn enumerate_predicates(record: &ProteinRecord, config: &FeatureConfig) -> Vec<Vec<Predicate>> {
    PredicateEnumerator::new(config).enumerate(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::PropertyGroup;
    use proptest::prelude::*;
    use FeatureGroup::*;

    fn rec(s: &str) -> ProteinRecord {
        ProteinRecord::from_strings("t", s, None).unwrap()
    }

    fn keys(preds: &[Predicate], group: FeatureGroup) -> Vec<String> {
        preds.iter().filter(|p| p.group == group).map(|p| p.key.clone()).collect()
    }

    fn toy_config() -> FeatureConfig {
        let mut c = FeatureConfig::none().with(Basic).with(Properties);
        c.set_property_groups(vec![
            PropertyGroup::new("Hydrophobic", "ACF").unwrap(),
            PropertyGroup::new("Polar", "CDE").unwrap(),
        ]);
        c
    }

    #[test]
    fn basic_at_first_position() {
        let p = enumerate_predicates(&rec("CAAF"), &toy_config());
        assert_eq!(keys(&p[0], Basic), vec!["C"]);
    }

    #[test]
    fn toy_hydrophobic_class_everywhere_on_caaf() {
        let p = enumerate_predicates(&rec("CAAF"), &toy_config());
        for pos in &p {
            assert!(keys(pos, Properties).contains(&"Hydrophobic".to_string()));
        }
        assert_eq!(keys(&p[0], Properties), vec!["Hydrophobic", "Polar"]);
    }

    #[test]
    fn neighbour_grams_stop_at_boundaries() {
        let c = FeatureConfig::none().with_order(Single, 3);
        let p = enumerate_predicates(&rec("ACDEFG"), &c);
        assert_eq!(keys(&p[0], Single), vec!["R1:C", "R2:CD", "R3:CDE"]);
        assert!(!keys(&p[0], Single).iter().any(|k| k.starts_with('L')));
        assert_eq!(keys(&p[3], Single), vec!["L1:D", "L2:CD", "L3:ACD", "R1:F", "R2:FG"]);
    }

    #[test]
    fn double_side_windows() {
        let c = FeatureConfig::none()
            .with_order(Double, 2)
            .with_order(DoubleShuffled, 2)
            .with_order(DoubleHydrophobic, 2)
            .with_order(DoubleHydrophilic, 2);
        let p = enumerate_predicates(&rec("KIAIL"), &c);
        assert_eq!(keys(&p[2], Double), vec!["1:I|I", "2:KI|IL"]);
        assert_eq!(keys(&p[2], DoubleShuffled), vec!["1:II", "2:IIKL"]);
        // mean(I, I) = 4.5; mean(K, I, I, L) = 2.225
        assert_eq!(keys(&p[2], DoubleHydrophobic), vec!["1", "2"]);
        assert!(keys(&p[2], DoubleHydrophilic).is_empty());
        assert!(keys(&p[0], Double).is_empty());
    }

    #[test]
    fn single_side_hydropathy() {
        let c = FeatureConfig::none()
            .with_order(SingleHydrophobic, 2)
            .with_order(SingleHydrophilic, 2);
        let p = enumerate_predicates(&rec("KKIII"), &c);
        // left of 2: K,K mean -3.9; right: I,I mean 4.5
        assert_eq!(keys(&p[2], SingleHydrophilic), vec!["L1", "L2"]);
        assert_eq!(keys(&p[2], SingleHydrophobic), vec!["R1", "R2"]);
    }

    #[test]
    fn window_threshold_is_strict() {
        // a mean sitting exactly on the threshold fires neither predicate
        let mut c = FeatureConfig::none().with(HydrophobicWindow).with(HydrophilicWindow);
        c.threshold = 1.8;
        let p = enumerate_predicates(&rec("AAA"), &c);
        for pos in &p {
            assert!(keys(pos, HydrophobicWindow).is_empty());
            assert!(keys(pos, HydrophilicWindow).is_empty());
        }
        let p = enumerate_predicates(&rec("IIIIIKKKKK"), &FeatureConfig::none().with(HydrophobicWindow).with(HydrophilicWindow));
        // whole sequence in every window: mean 0.3 < 1.0
        assert!(p.iter().all(|pos| keys(pos, HydrophilicWindow) == vec!["w19"]));
    }

    #[test]
    fn border_start_end_edge() {
        let c = FeatureConfig::none().with(StartEndEdge).with(Border);
        let p = enumerate_predicates(&rec("ACD"), &c);
        assert_eq!(keys(&p[0], StartEndEdge), vec!["start"]);
        assert_eq!(keys(&p[1], StartEndEdge), vec!["edge"]);
        assert_eq!(keys(&p[2], StartEndEdge), vec!["end", "edge"]);
        assert!(keys(&p[0], Border).is_empty());
        assert_eq!(keys(&p[2], Border), vec!["CD"]);
        assert!(p[2].iter().all(|q| q.is_bigram() == (q.key != "end")));
    }

    #[test]
    fn unknown_residue_activates_nothing_residue_keyed() {
        let mut c = FeatureConfig::none();
        for g in FeatureGroup::ALL {
            c.enable(g);
        }
        let r = ProteinRecord::new("u", vec![Residue::Unk], None).unwrap();
        let p = enumerate_predicates(&r, &c);
        // only the position-only predicates remain
        assert!(p[0]
            .iter()
            .all(|q| matches!(q.group, StartEndEdge | HydrophobicWindow | HydrophilicWindow)));
    }

    #[test]
    fn electronic_exactly_one_per_standard_residue() {
        let c = FeatureConfig::none().with(Electronic);
        for r in Residue::STANDARD {
            let rec = ProteinRecord::new("x", vec![r], None).unwrap();
            assert_eq!(enumerate_predicates(&rec, &c)[0].len(), 1);
        }
    }

    fn all_on() -> FeatureConfig {
        let mut c = FeatureConfig::none();
        for g in FeatureGroup::ALL {
            c.enable(g);
        }
        c
    }

    fn arb_seq() -> impl Strategy<Value = Vec<Residue>> {
        prop::collection::vec(prop::sample::select(Residue::STANDARD.to_vec()), 1..40)
    }

    proptest! {
        #[test]
        fn predicates_ignore_labels(seq in arb_seq(), bits in prop::collection::vec(any::<bool>(), 40)) {
            use crate::seq::BinaryLabel;
            let gold: Vec<BinaryLabel> = bits[..seq.len()].iter()
                .map(|&b| if b { BinaryLabel::Helix } else { BinaryLabel::NonHelix }).collect();
            let a = ProteinRecord::new("a", seq.clone(), None).unwrap();
            let b = ProteinRecord::new("a", seq, Some(gold)).unwrap();
            let c = all_on();
            prop_assert_eq!(enumerate_predicates(&a, &c), enumerate_predicates(&b, &c));
            prop_assert_eq!(enumerate_predicates(&a, &c), enumerate_predicates(&a, &c));
        }

        #[test]
        fn shuffled_keys_are_permutation_invariant(
            window in prop::collection::vec(prop::sample::select(Residue::STANDARD.to_vec()), 3),
            perm in Just(vec![2usize, 0, 1]),
        ) {
            let c = FeatureConfig::none().with_order(Single, 3).with_order(SingleShuffled, 3);
            let mut seq = window.clone();
            seq.push(Residue::A);
            let permuted: Vec<Residue> = perm.iter().map(|&j| window[j]).chain([Residue::A]).collect();
            let p1 = enumerate_predicates(&ProteinRecord::new("x", seq, None).unwrap(), &c);
            let p2 = enumerate_predicates(&ProteinRecord::new("x", permuted, None).unwrap(), &c);
            let s1 = keys(&p1[3], SingleShuffled);
            let s2 = keys(&p2[3], SingleShuffled);
            prop_assert_eq!(s1.last(), s2.last());
            let uniform = window.iter().all(|&r| r == window[0]);
            let o1 = keys(&p1[3], Single);
            let o2 = keys(&p2[3], Single);
            if !uniform {
                prop_assert_ne!(o1.last(), o2.last());
            }
        }

        #[test]
        fn window_predicates_are_exclusive(seq in arb_seq()) {
            let c = FeatureConfig::none().with(HydrophobicWindow).with(HydrophilicWindow);
            let rec = ProteinRecord::new("x", seq, None).unwrap();
            for pos in enumerate_predicates(&rec, &c) {
                prop_assert!(pos.len() <= 1);
            }
        }
    }
}
