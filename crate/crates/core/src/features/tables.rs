//! Residue lookup tables: Kyte-Doolittle hydropathy, Sternberg property
//! groups, electronic classes and side-chain chemical groups.

use std::fmt;

use crate::seq::Residue;

/// Kyte-Doolittle hydropathy index. `Unk` is neutral (0.0).
pub fn kd_value(r: Residue) -> f64 {
    use Residue::*;
    match r {
        K => -3.9,
        R => -4.5,
        H => -3.2,
        E => -3.5,
        Q => -3.5,
        D => -3.5,
        N => -3.5,
        W => -0.9,
        Y => -1.3,
        S => -0.8,
        T => -0.7,
        P => -1.6,
        G => -0.4,
        A => 1.8,
        M => 1.9,
        C => 2.5,
        F => 2.8,
        L => 3.8,
        V => 4.2,
        I => 4.5,
        Unk => 0.0,
    }
}

/// Mean hydropathy over the window of length `w` centred at `i`, truncated
/// at the sequence ends. The divisor is the number of residues actually
/// inside the window.
pub fn window_mean_kd(seq: &[Residue], i: usize, w: usize) -> f64 {
    debug_assert!(i < seq.len() && w % 2 == 1);
    let half = w / 2;
    let lo = i.saturating_sub(half);
    let hi = (i + half).min(seq.len() - 1);
    mean_kd(&seq[lo..=hi])
}

pub fn mean_kd(window: &[Residue]) -> f64 {
    window.iter().map(|&r| kd_value(r)).sum::<f64>() / window.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElectronicClass {
    StrongDonor,
    WeakDonor,
    Neutral,
    WeakAcceptor,
    StrongAcceptor,
}

impl ElectronicClass {
    pub const ALL: [ElectronicClass; 5] = [
        ElectronicClass::StrongDonor,
        ElectronicClass::WeakDonor,
        ElectronicClass::Neutral,
        ElectronicClass::WeakAcceptor,
        ElectronicClass::StrongAcceptor,
    ];

    pub fn of(r: Residue) -> Option<ElectronicClass> {
        use ElectronicClass::*;
        use Residue::*;
        Some(match r {
            A | D | E | P => StrongDonor,
            I | L | V => WeakDonor,
            C | G | H | S | W | M => Neutral,
            F | Q | T | Y => WeakAcceptor,
            K | N | R => StrongAcceptor,
            Unk => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ElectronicClass::StrongDonor => "StrongDonor",
            ElectronicClass::WeakDonor => "WeakDonor",
            ElectronicClass::Neutral => "Neutral",
            ElectronicClass::WeakAcceptor => "WeakAcceptor",
            ElectronicClass::StrongAcceptor => "StrongAcceptor",
        }
    }
}

impl fmt::Display for ElectronicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Side-chain chemical groups, numbered 1..=18.
const CHEMICAL_GROUPS: [&str; 18] = [
    "R",              // 1  -C-
    "YFHW",           // 2  =C(aromatic)-
    "LVIT",           // 3  -CH-
    "KNDELCWSIRQFHY", // 4  -CH2-
    "P",              // 5  -CH2(ring)-
    "LVIATM",         // 6  -CH3
    "WFYH",           // 7  =CH(aromatic)-
    "WP",             // 8  -CH(ring)
    "NQ",             // 9  -C=O
    "DE",             // 10 -COO-
    "H",              // 11 =N-
    "R",              // 12 -NH-
    "NRQ",            // 13 -NH2
    "R",              // 14 =NH2+
    "K",              // 15 -NH3+
    "STY",            // 16 -OH
    "C",              // 17 -SH
    "PHW",            // 18 -NH(ring)-
];

const DEFAULT_PROPERTIES: [(&str, &str); 9] = [
    ("Aromatic", "FWYH"),
    ("Hydrophobic", "MILVAGFWYHKC"),
    ("Positive", "HKR"),
    ("Polar", "WYCHKREDSQNT"),
    ("Charged", "HKRED"),
    ("Negative", "ED"),
    ("Aliphatic", "ILV"),
    ("Small", "VAGCPSDTN"),
    ("Tiny", "AGS"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyGroup {
    pub name: String,
    pub residues: Vec<Residue>,
}

impl PropertyGroup {
    pub fn new(name: impl Into<String>, letters: &str) -> Option<Self> {
        let residues = letters
            .chars()
            .map(Residue::from_char)
            .collect::<Option<Vec<_>>>()?;
        Some(PropertyGroup {
            name: name.into(),
            residues,
        })
    }

    pub fn contains(&self, r: Residue) -> bool {
        self.residues.contains(&r)
    }

    pub fn letters(&self) -> String {
        self.residues.iter().map(|r| r.as_char()).collect()
    }
}

/// Sternberg's nine property groups.
pub fn default_property_groups() -> Vec<PropertyGroup> {
    DEFAULT_PROPERTIES
        .iter()
        .map(|(n, l)| PropertyGroup::new(*n, l).unwrap())
        .collect()
}

/// Residues that belong to the named default property group.
pub fn property_residues(name: &str) -> Option<Vec<Residue>> {
    default_property_groups()
        .into_iter()
        .find(|g| g.name.eq_ignore_ascii_case(name))
        .map(|g| g.residues)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClassTables {
    property_groups: Vec<PropertyGroup>,
    chemical: Vec<Vec<Residue>>,
}

/// Every class a residue belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Classification {
    pub properties: Vec<String>,
    pub electronic: Option<ElectronicClass>,
    pub chemical_groups: Vec<u8>,
}

impl Default for ResidueClassTables {
    fn default() -> Self {
        Self::with_properties(default_property_groups())
    }
}

impl ResidueClassTables {
    pub fn with_properties(property_groups: Vec<PropertyGroup>) -> Self {
        let chemical = CHEMICAL_GROUPS
            .iter()
            .map(|l| l.chars().map(|c| Residue::from_char(c).unwrap()).collect())
            .collect();
        ResidueClassTables {
            property_groups,
            chemical,
        }
    }

    pub fn property_groups(&self) -> &[PropertyGroup] {
        &self.property_groups
    }

    pub fn properties_of(&self, r: Residue) -> impl Iterator<Item = &PropertyGroup> {
        self.property_groups.iter().filter(move |g| g.contains(r))
    }

    /// Chemical group numbers (1-based) containing `r`.
    pub fn chemical_groups_of(&self, r: Residue) -> impl Iterator<Item = u8> + '_ {
        self.chemical
            .iter()
            .enumerate()
            .filter(move |(_, g)| g.contains(&r))
            .map(|(i, _)| i as u8 + 1)
    }

    pub fn classify(&self, r: Residue) -> Classification {
        if !r.is_standard() {
            return Classification::default();
        }
        Classification {
            properties: self.properties_of(r).map(|g| g.name.clone()).collect(),
            electronic: ElectronicClass::of(r),
            chemical_groups: self.chemical_groups_of(r).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Residue::*;

    #[test]
    fn hydropathy_values() {
        assert_eq!(kd_value(K), -3.9);
        assert_eq!(kd_value(I), 4.5);
        assert_eq!(kd_value(Unk), 0.0);
        assert_eq!(kd_value(F), 2.8);
    }

    #[test]
    fn window_means() {
        let a = vec![A; 19];
        assert!((window_mean_kd(&a, 9, 19) - 1.8).abs() < 1e-12);
        let k = vec![K; 19];
        assert!((window_mean_kd(&k, 9, 19) + 3.9).abs() < 1e-12);
        assert!((window_mean_kd(&[K, I], 0, 19) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        let t = ResidueClassTables::default();
        let f = t.classify(F);
        assert_eq!(f.properties, vec!["Aromatic", "Hydrophobic"]);
        assert_eq!(f.electronic, Some(ElectronicClass::WeakAcceptor));
        assert_eq!(f.chemical_groups, vec![2, 4, 7]);
        assert_eq!(t.classify(A).electronic, Some(ElectronicClass::StrongDonor));
        assert_eq!(t.classify(P).chemical_groups, vec![5, 8, 18]);
        assert_eq!(t.classify(Unk), Classification::default());
    }

    #[test]
    fn electronic_classes_partition_the_alphabet() {
        for r in Residue::STANDARD {
            assert!(ElectronicClass::of(r).is_some());
        }
        let sizes: Vec<usize> = ElectronicClass::ALL
            .iter()
            .map(|c| Residue::STANDARD.iter().filter(|&&r| ElectronicClass::of(r) == Some(*c)).count())
            .collect();
        assert_eq!(sizes, vec![4, 3, 6, 4, 3]);
    }

    #[test]
    fn property_groups_overlap() {
        let t = ResidueClassTables::default();
        assert_eq!(t.property_groups().len(), 9);
        assert_eq!(t.properties_of(H).count(), 5);
    }
}
