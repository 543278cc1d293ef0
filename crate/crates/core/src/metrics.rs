//! Per-residue and per-segment accuracy.
//!
//! Counts are pooled over the whole dataset before any ratio is taken. A
//! ratio whose denominator is zero is undefined and prints as `NA`.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::seq::{segmentize, BinaryLabel, Segment};

/// Minimum overlap, in residues, for two segments to match.
pub const MIN_OVERLAP: usize = 3;

fn pct(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

fn check(pairs: &[(&[BinaryLabel], &[BinaryLabel])]) -> Result<()> {
    for (index, (gold, pred)) in pairs.iter().enumerate() {
        if gold.len() != pred.len() {
            return Err(Error::MalformedPair {
                index,
                gold: gold.len(),
                predicted: pred.len(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResidueCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ResidueCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidueMetrics {
    pub counts: ResidueCounts,
    pub q2: Option<f64>,
    pub q2t_obs: Option<f64>,
    pub q2t_prd: Option<f64>,
    pub q2n_obs: Option<f64>,
    pub q2n_prd: Option<f64>,
}

pub fn per_residue(pairs: &[(&[BinaryLabel], &[BinaryLabel])]) -> Result<ResidueMetrics> {
    check(pairs)?;
    let mut c = ResidueCounts::default();
    for (gold, pred) in pairs {
        for (g, p) in gold.iter().zip(pred.iter()) {
            match (g.is_helix(), p.is_helix()) {
                (true, true) => c.tp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
            }
        }
    }
    Ok(ResidueMetrics {
        counts: c,
        q2: pct(c.tp + c.tn, c.total()),
        q2t_obs: pct(c.tp, c.tp + c.fn_),
        q2t_prd: pct(c.tp, c.tp + c.fp),
        q2n_obs: pct(c.tn, c.tn + c.fp),
        q2n_prd: pct(c.tn, c.tn + c.fn_),
    })
}

/// One-to-one matching as `(observed index, predicted index)` pairs.
///
/// Observed segments are visited left to right; each takes the unmatched
/// predicted segment with the largest overlap (leftmost on ties) if that
/// overlap is at least [`MIN_OVERLAP`].
pub fn match_segments(obs: &[Segment], pred: &[Segment]) -> Vec<(usize, usize)> {
    let mut taken = vec![false; pred.len()];
    let mut out = Vec::new();
    for (i, o) in obs.iter().enumerate() {
        let mut best: Option<(usize, usize)> = None;
        for (j, p) in pred.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let ov = o.overlap(p);
            if ov >= MIN_OVERLAP && best.is_none_or(|(_, b)| ov > b) {
                best = Some((j, ov));
            }
        }
        if let Some((j, _)) = best {
            taken[j] = true;
            out.push((i, j));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SegmentMetrics {
    pub proteins: usize,
    pub observed: usize,
    pub predicted: usize,
    pub matched: usize,
    pub fully_correct: usize,
    pub qok: Option<f64>,
    pub qtmh_obs: Option<f64>,
    pub qtmh_prd: Option<f64>,
}

pub fn per_segment(pairs: &[(&[BinaryLabel], &[BinaryLabel])]) -> Result<SegmentMetrics> {
    check(pairs)?;
    let mut m = SegmentMetrics {
        proteins: pairs.len(),
        ..SegmentMetrics::default()
    };
    for (gold, pred) in pairs {
        let (o, p) = (segmentize(gold), segmentize(pred));
        let matched = match_segments(&o, &p).len();
        m.observed += o.len();
        m.predicted += p.len();
        m.matched += matched;
        if o.len() == matched && p.len() == matched {
            m.fully_correct += 1;
        }
    }
    m.qok = pct(m.fully_correct, m.proteins);
    m.qtmh_obs = pct(m.matched, m.observed);
    m.qtmh_prd = pct(m.matched, m.predicted);
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsReport {
    pub residue: ResidueMetrics,
    pub segment: SegmentMetrics,
}

/// `NA` for undefined ratios, two decimals otherwise.
pub fn format_pct(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.2}"),
        None => "NA".to_string(),
    }
}

impl MetricsReport {
    pub fn evaluate(pairs: &[(&[BinaryLabel], &[BinaryLabel])]) -> Result<Self> {
        Ok(MetricsReport {
            residue: per_residue(pairs)?,
            segment: per_segment(pairs)?,
        })
    }

    fn rows(&self) -> [(&'static str, &'static str, Option<f64>); 8] {
        let (r, s) = (&self.residue, &self.segment);
        [
            ("Qok", "proteins with every helix correct", s.qok),
            ("Qtmh_obs", "observed helices predicted", s.qtmh_obs),
            ("Qtmh_prd", "predicted helices observed", s.qtmh_prd),
            ("Q2", "residues correct", r.q2),
            ("Q2T_obs", "helix residue recall", r.q2t_obs),
            ("Q2T_prd", "helix residue precision", r.q2t_prd),
            ("Q2N_obs", "non-helix residue recall", r.q2n_obs),
            ("Q2N_prd", "non-helix residue precision", r.q2n_prd),
        ]
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tvalue\n");
        for (name, _, v) in self.rows() {
            writeln!(out, "{name}\t{}", format_pct(v)).unwrap();
        }
        let s = &self.segment;
        let counts = [
            ("proteins", s.proteins),
            ("residues", self.residue.counts.total()),
            ("observed_segments", s.observed),
            ("predicted_segments", s.predicted),
            ("matched_segments", s.matched),
        ];
        for (name, v) in counts {
            writeln!(out, "{name}\t{v}").unwrap();
        }
        out
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Per-segment")?;
        for (i, (name, desc, v)) in self.rows().into_iter().enumerate() {
            if i == 3 {
                writeln!(f, "Per-residue")?;
            }
            writeln!(f, "  {name:<9} {:>7}  {desc}", format_pct(v))?;
        }
        writeln!(
            f,
            "{} proteins, {} residues, {} observed / {} predicted / {} matched segments",
            self.segment.proteins,
            self.residue.counts.total(),
            self.segment.observed,
            self.segment.predicted,
            self.segment.matched
        )
    }
}
