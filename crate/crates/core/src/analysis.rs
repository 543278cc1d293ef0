//! Residue composition around predicted helices.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::seq::{segmentize, BinaryLabel, ProteinRecord, Residue};

pub const DEFAULT_HALF_WIDTH: usize = 4;
pub const DEFAULT_RADIUS: usize = 25;

/// Residue frequencies in a window around each helix midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub counts: Vec<(Residue, usize)>,
    pub total: usize,
}

impl Composition {
    pub fn frequency(&self, r: Residue) -> f64 {
        self.counts
            .iter()
            .find(|(x, _)| *x == r)
            .map_or(0.0, |&(_, c)| c as f64 / self.total as f64)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("residue\tcount\tfrequency\n");
        for &(r, c) in &self.counts {
            writeln!(out, "{}\t{c}\t{}", r.as_char(), c as f64 / self.total as f64).unwrap();
        }
        out
    }
}

pub fn central_composition(
    predictions: &[(&ProteinRecord, &[BinaryLabel])],
    half_width: usize,
) -> Result<Composition> {
    let mut counts = [0usize; 21];
    let mut order = Vec::new();
    let mut total = 0;
    for (rec, labels) in predictions {
        let seq = rec.sequence();
        for seg in segmentize(labels) {
            let mid = seg.midpoint();
            let lo = mid.saturating_sub(half_width).max(seg.start);
            let hi = (mid + half_width).min(seg.end);
            for &r in &seq[lo..=hi] {
                if counts[r as usize] == 0 {
                    order.push(r);
                }
                counts[r as usize] += 1;
                total += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::EmptyAnalysis);
    }
    order.sort();
    Ok(Composition {
        counts: order.into_iter().map(|r| (r, counts[r as usize])).collect(),
        total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionalProfile {
    pub radius: usize,
    /// Residues in the set, per offset `-radius..=radius`.
    pub counts: Vec<usize>,
    /// Residues observed at all, per offset.
    pub denominators: Vec<usize>,
}

impl PositionalProfile {
    pub fn offsets(&self) -> impl Iterator<Item = isize> {
        let r = self.radius as isize;
        -r..=r
    }

    /// `None` where no residue was observed.
    pub fn frequency(&self, offset: isize) -> Option<f64> {
        let k = (offset + self.radius as isize) as usize;
        (self.denominators[k] > 0).then(|| self.counts[k] as f64 / self.denominators[k] as f64)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("offset\tcount\tdenominator\tfrequency\n");
        for (k, off) in self.offsets().enumerate() {
            let f = self.frequency(off).map_or("NA".to_string(), |f| f.to_string());
            writeln!(out, "{off}\t{}\t{}\t{f}", self.counts[k], self.denominators[k]).unwrap();
        }
        out
    }
}

pub fn positional_profile(
    predictions: &[(&ProteinRecord, &[BinaryLabel])],
    residue_set: &BTreeSet<Residue>,
    radius: usize,
) -> Result<PositionalProfile> {
    let width = 2 * radius + 1;
    let mut counts = vec![0; width];
    let mut denominators = vec![0; width];
    let mut helices = 0;
    for (rec, labels) in predictions {
        let seq = rec.sequence();
        for seg in segmentize(labels) {
            helices += 1;
            let mid = seg.midpoint() as isize;
            for k in 0..width {
                let pos = mid + k as isize - radius as isize;
                if pos < 0 || pos >= seq.len() as isize {
                    continue;
                }
                denominators[k] += 1;
                if residue_set.contains(&seq[pos as usize]) {
                    counts[k] += 1;
                }
            }
        }
    }
    if helices == 0 {
        return Err(Error::EmptyAnalysis);
    }
    Ok(PositionalProfile {
        radius,
        counts,
        denominators,
    })
}
