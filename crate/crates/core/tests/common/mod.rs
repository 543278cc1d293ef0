#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tmhcrf::{Dataset, ProteinRecord};

pub const TOY: &str = ">r1\nCAAF\n0111\n>r2\nCDED\n1000\n>r3\nDFAE\n0110\n";
pub const TOY_CONFIG: &str = "preset = exp1\ngroup.start_end_edge = off\nproperty.Hydrophobic = ACF\nproperty.Polar = CDE\n";

const MEMBRANE: &[u8] = b"LLLLIIIIVVVVFFFAAAMMGWC";
const LOOP: &[u8] = b"KKRRDDEENNQQSSTTGGPPHYA";

const HELIX_END: &[u8] = b"WWYYFLIV";
const FLANK: &[u8] = b"KKRRKRNY";

/// Synthetic membrane proteins: hydrophobic helices of 16..=26 residues
/// separated by polar loops, with a fraction of residues drawn from the
/// other pool. Residues are independent given their label.
pub fn synthetic_dataset(n: usize, seed: u64, noise: f64) -> Dataset {
    generate(n, seed, noise, false)
}

/// As [`synthetic_dataset`], but the three residues at each end of a helix
/// come from an aromatic-rich pool and the three loop residues next to a
/// helix from a positively charged pool (before noise).
pub fn structured_dataset(n: usize, seed: u64, noise: f64) -> Dataset {
    generate(n, seed, noise, true)
}

fn generate(n: usize, seed: u64, noise: f64, boundaries: bool) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..n)
        .map(|i| {
            let helices = rng.gen_range(1..=6);
            let mut seq = Vec::new();
            let mut labels = Vec::new();
            let mut push = |rng: &mut ChaCha8Rng, len: usize, helix: bool| {
                for _ in 0..len {
                    let flip = rng.gen_bool(noise);
                    let pool = if helix != flip { MEMBRANE } else { LOOP };
                    seq.push(*pool.choose(rng).unwrap() as char);
                    labels.push(if helix { '1' } else { '0' });
                }
            };
            let terminal = rng.gen_range(3..30);
            push(&mut rng, terminal, false);
            for h in 0..helices {
                let len = rng.gen_range(16..=26);
                push(&mut rng, len, true);
                let loop_len = if h + 1 == helices {
                    rng.gen_range(3..30)
                } else if rng.gen_bool(0.3) {
                    rng.gen_range(2..=6)
                } else {
                    rng.gen_range(7..40)
                };
                push(&mut rng, loop_len, false);
            }
            if boundaries {
                let segs = tmhcrf::seq::segmentize(&tmhcrf::seq::parse_labels(&labels.iter().collect::<String>()).unwrap());
                for s in segs {
                    for k in 0..3 {
                        for (pos, pool) in [
                            (Some(s.start + k), HELIX_END),
                            (Some(s.end - k), HELIX_END),
                            (s.start.checked_sub(k + 1), FLANK),
                            (Some(s.end + k + 1).filter(|&p| p < seq.len()), FLANK),
                        ] {
                            if let Some(p) = pos {
                                if !rng.gen_bool(noise) {
                                    seq[p] = *pool.choose(&mut rng).unwrap() as char;
                                }
                            }
                        }
                    }
                }
            }
            let seq: String = seq.into_iter().collect();
            let labels: String = labels.into_iter().collect();
            ProteinRecord::from_strings(&format!("syn{i:03}"), &seq, Some(&labels)).unwrap()
        })
        .collect();
    Dataset::new(records).unwrap()
}

/// First `frac` of the records, and the rest.
pub fn split(data: &Dataset, frac: f64) -> (Dataset, Dataset) {
    let cut = (data.len() as f64 * frac).round() as usize;
    let (a, b) = data.records().split_at(cut);
    (Dataset::new(a.to_vec()).unwrap(), Dataset::new(b.to_vec()).unwrap())
}

/// Random sequence of `len` standard residues.
pub fn random_protein(rng: &mut ChaCha8Rng, id: &str, len: usize) -> ProteinRecord {
    const ALL: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";
    let seq: String = (0..len).map(|_| *ALL.choose(rng).unwrap() as char).collect();
    ProteinRecord::from_strings(id, &seq, None).unwrap()
}
