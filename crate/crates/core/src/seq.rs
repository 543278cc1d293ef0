//! Residues, binary labels, protein records and the dataset text format.
//!
//! A dataset file is a series of blocks:
//!
//! ```text
//! >id
//! SEQUENCE
//! 0011110
//! ```
//!
//! The label line is optional. Blank lines between blocks are ignored and
//! sequences are never wrapped.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// One of the twenty standard amino acids, or `Unk` for anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Residue {
    A,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    K,
    L,
    M,
    N,
    P,
    Q,
    R,
    S,
    T,
    V,
    W,
    Y,
    Unk,
}

impl Residue {
    pub const STANDARD: [Residue; 20] = [
        Residue::A,
        Residue::C,
        Residue::D,
        Residue::E,
        Residue::F,
        Residue::G,
        Residue::H,
        Residue::I,
        Residue::K,
        Residue::L,
        Residue::M,
        Residue::N,
        Residue::P,
        Residue::Q,
        Residue::R,
        Residue::S,
        Residue::T,
        Residue::V,
        Residue::W,
        Residue::Y,
    ];

    /// Strict conversion: only the twenty standard upper-case letters.
    pub fn from_char(c: char) -> Option<Residue> {
        let r = match c {
            'A' => Residue::A,
            'C' => Residue::C,
            'D' => Residue::D,
            'E' => Residue::E,
            'F' => Residue::F,
            'G' => Residue::G,
            'H' => Residue::H,
            'I' => Residue::I,
            'K' => Residue::K,
            'L' => Residue::L,
            'M' => Residue::M,
            'N' => Residue::N,
            'P' => Residue::P,
            'Q' => Residue::Q,
            'R' => Residue::R,
            'S' => Residue::S,
            'T' => Residue::T,
            'V' => Residue::V,
            'W' => Residue::W,
            'Y' => Residue::Y,
            _ => return None,
        };
        Some(r)
    }

    /// Lenient conversion: case-insensitive, everything unrecognised is `Unk`.
    pub fn from_char_lenient(c: char) -> Residue {
        Residue::from_char(c.to_ascii_uppercase()).unwrap_or(Residue::Unk)
    }

    /// `Unk` renders as `X`.
    pub fn as_char(self) -> char {
        match self {
            Residue::A => 'A',
            Residue::C => 'C',
            Residue::D => 'D',
            Residue::E => 'E',
            Residue::F => 'F',
            Residue::G => 'G',
            Residue::H => 'H',
            Residue::I => 'I',
            Residue::K => 'K',
            Residue::L => 'L',
            Residue::M => 'M',
            Residue::N => 'N',
            Residue::P => 'P',
            Residue::Q => 'Q',
            Residue::R => 'R',
            Residue::S => 'S',
            Residue::T => 'T',
            Residue::V => 'V',
            Residue::W => 'W',
            Residue::Y => 'Y',
            Residue::Unk => 'X',
        }
    }

    pub fn is_standard(self) -> bool {
        self != Residue::Unk
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Helix (`1`) or non-helix (`0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryLabel {
    NonHelix,
    Helix,
}

impl BinaryLabel {
    pub fn from_char(c: char) -> Option<BinaryLabel> {
        match c {
            '0' => Some(BinaryLabel::NonHelix),
            '1' => Some(BinaryLabel::Helix),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            BinaryLabel::NonHelix => '0',
            BinaryLabel::Helix => '1',
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_helix(self) -> bool {
        self == BinaryLabel::Helix
    }
}

/// Parses a `0`/`1` string.
pub fn parse_labels(s: &str) -> Option<Vec<BinaryLabel>> {
    s.chars().map(BinaryLabel::from_char).collect()
}

pub fn labels_to_string(labels: &[BinaryLabel]) -> String {
    labels.iter().map(|l| l.as_char()).collect()
}

pub fn residues_to_string(residues: &[Residue]) -> String {
    residues.iter().map(|r| r.as_char()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProteinRecord {
    id: String,
    sequence: Vec<Residue>,
    gold: Option<Vec<BinaryLabel>>,
}

impl ProteinRecord {
    pub fn new(
        id: impl Into<String>,
        sequence: Vec<Residue>,
        gold: Option<Vec<BinaryLabel>>,
    ) -> Result<Self> {
        let id = id.into();
        if sequence.is_empty() {
            return Err(Error::MalformedRecord {
                id,
                reason: "empty sequence".into(),
            });
        }
        if let Some(g) = &gold {
            if g.len() != sequence.len() {
                return Err(Error::MalformedRecord {
                    reason: format!(
                        "label length {} differs from sequence length {}",
                        g.len(),
                        sequence.len()
                    ),
                    id,
                });
            }
        }
        Ok(ProteinRecord { id, sequence, gold })
    }

    /// Builds a record from residue and label strings (strict residues).
    pub fn from_strings(id: &str, sequence: &str, labels: Option<&str>) -> Result<Self> {
        let seq = sequence
            .chars()
            .enumerate()
            .map(|(i, c)| {
                Residue::from_char(c).ok_or_else(|| Error::UnknownResidue {
                    id: id.to_string(),
                    position: i,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let gold = match labels {
            Some(l) => Some(parse_labels(l).ok_or_else(|| Error::MalformedRecord {
                id: id.to_string(),
                reason: "label line must contain only 0 and 1".into(),
            })?),
            None => None,
        };
        ProteinRecord::new(id, seq, gold)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn sequence(&self) -> &[Residue] {
        &self.sequence
    }

    pub fn gold(&self) -> Option<&[BinaryLabel]> {
        self.gold.as_deref()
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Copy of this record without gold labels.
    pub fn unlabeled(&self) -> ProteinRecord {
        ProteinRecord {
            id: self.id.clone(),
            sequence: self.sequence.clone(),
            gold: None,
        }
    }
}

/// Residue parsing policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    /// Unrecognised letters become [`Residue::Unk`].
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    records: Vec<ProteinRecord>,
}

impl Dataset {
    pub fn new(records: Vec<ProteinRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.id()) {
                return Err(Error::DuplicateId(r.id().to_string()));
            }
        }
        Ok(Dataset { records })
    }

    pub fn records(&self) -> &[ProteinRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ProteinRecord> {
        self.records.iter().find(|r| r.id() == id)
    }

    /// Drops every record whose id starts with one of `prefixes`.
    pub fn exclude_prefixes(&self, prefixes: &[String]) -> Dataset {
        let records = self
            .records
            .iter()
            .filter(|r| !prefixes.iter().any(|p| r.id().starts_with(p.as_str())))
            .cloned()
            .collect();
        Dataset { records }
    }

    /// Canonical text form; parses back to an equal dataset.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push('>');
            out.push_str(r.id());
            out.push('\n');
            out.push_str(&residues_to_string(r.sequence()));
            out.push('\n');
            if let Some(g) = r.gold() {
                out.push_str(&labels_to_string(g));
                out.push('\n');
            }
        }
        out
    }
}

impl IntoIterator for Dataset {
    type Item = ProteinRecord;
    type IntoIter = std::vec::IntoIter<ProteinRecord>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.into_iter()
    }
}

pub fn parse_dataset(text: &str, mode: ParseMode) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    let mut records = Vec::new();
    while let Some((line_no, header)) = lines.next() {
        let id = header
            .strip_prefix('>')
            .ok_or_else(|| Error::Syntax {
                line: line_no,
                msg: "expected a `>` header line".into(),
            })?
            .trim();
        if id.is_empty() {
            return Err(Error::Syntax {
                line: line_no,
                msg: "empty record id".into(),
            });
        }

        let seq_line = match lines.peek() {
            Some((_, l)) if !l.starts_with('>') => lines.next().unwrap().1,
            _ => {
                return Err(Error::MalformedRecord {
                    id: id.to_string(),
                    reason: "missing sequence line".into(),
                })
            }
        };
        let mut sequence = Vec::with_capacity(seq_line.len());
        for (pos, c) in seq_line.chars().enumerate() {
            match (Residue::from_char(c), mode) {
                (Some(r), _) => sequence.push(r),
                (None, ParseMode::Lenient) => sequence.push(Residue::from_char_lenient(c)),
                (None, ParseMode::Strict) => {
                    return Err(Error::UnknownResidue {
                        id: id.to_string(),
                        position: pos,
                    })
                }
            }
        }

        let gold = match lines.peek() {
            Some((_, l)) if !l.starts_with('>') => {
                let l = lines.next().unwrap().1;
                Some(parse_labels(l).ok_or_else(|| Error::MalformedRecord {
                    id: id.to_string(),
                    reason: "label line must contain only 0 and 1".into(),
                })?)
            }
            _ => None,
        };

        records.push(ProteinRecord::new(id, sequence, gold)?);
    }
    Dataset::new(records)
}

/// A maximal run of helix labels, both ends inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Segment { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of shared positions.
    pub fn overlap(&self, other: &Segment) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        if hi >= lo {
            hi - lo + 1
        } else {
            0
        }
    }

    /// Midpoint residue; the lower median for even lengths.
    pub fn midpoint(&self) -> usize {
        self.start + (self.len() - 1) / 2
    }
}

pub fn segmentize(labels: &[BinaryLabel]) -> Vec<Segment> {
    let mut segments = Vec::new();
    let mut start = None;
    for (i, l) in labels.iter().enumerate() {
        match (l.is_helix(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                segments.push(Segment::new(s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        segments.push(Segment::new(s, labels.len() - 1));
    }
    segments
}

/// Maximal runs of equal labels as `(label, start, length)`.
pub(crate) fn runs<T: Copy + PartialEq>(items: &[T]) -> Vec<(T, usize, usize)> {
    let mut out: Vec<(T, usize, usize)> = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        match out.last_mut() {
            Some((v, _, len)) if *v == x => *len += 1,
            _ => out.push((x, i, 1)),
        }
    }
    out
}
