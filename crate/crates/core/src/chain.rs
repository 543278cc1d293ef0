//! Exact inference on the linear chain.
//!
//! A [`Trellis`] holds log-potentials: start scores for position 0 and a
//! dense `L x L` block of edge scores for every later position. Everything
//! runs in log space.

use crate::error::{Error, Result};
use crate::features::{
    CompiledRecord, ContextMap, FeatureConfig, FeatureIndex, PredicateEnumerator, NUM_CONTEXTS,
};
use crate::math::logsumexp;
use crate::seq::{BinaryLabel, ProteinRecord};
use crate::topology::{StateId, StateTopology};

#[derive(Debug, Clone, PartialEq)]
pub struct Trellis {
    num_positions: usize,
    num_states: usize,
    start: Vec<f64>,
    end: Vec<f64>,
    edges: Vec<f64>,
}

impl Trellis {
    /// `start` and `end` have one entry per state (`end` is added after the
    /// last position, normally `0` or `-inf`); `edges` holds
    /// `(num_positions - 1) * L * L` scores, row-major in `(position, prev, cur)`.
    pub fn new(num_states: usize, start: Vec<f64>, end: Vec<f64>, edges: Vec<f64>) -> Self {
        assert_eq!(start.len(), num_states);
        assert_eq!(end.len(), num_states);
        assert_eq!(edges.len() % (num_states * num_states), 0);
        let num_positions = edges.len() / (num_states * num_states) + 1;
        Trellis {
            num_positions,
            num_states,
            start,
            end,
            edges,
        }
    }

    pub fn num_positions(&self) -> usize {
        self.num_positions
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn start(&self, s: StateId) -> f64 {
        self.start[s]
    }

    pub fn end(&self, s: StateId) -> f64 {
        self.end[s]
    }

    /// Edge score into position `i >= 1`.
    #[inline]
    pub fn edge(&self, i: usize, prev: StateId, cur: StateId) -> f64 {
        let l = self.num_states;
        self.edges[(i - 1) * l * l + prev * l + cur]
    }

    #[inline]
    fn block(&self, i: usize) -> &[f64] {
        let l2 = self.num_states * self.num_states;
        &self.edges[(i - 1) * l2..i * l2]
    }

    /// Adds `c` to every potential entering position `i`.
    pub fn shift_position(&mut self, i: usize, c: f64) {
        if i == 0 {
            self.start.iter_mut().for_each(|x| *x += c);
        } else {
            let l2 = self.num_states * self.num_states;
            self.edges[(i - 1) * l2..i * l2].iter_mut().for_each(|x| *x += c);
        }
    }

    /// Unnormalised log score of a state path, summed left to right.
    pub fn path_score(&self, path: &[StateId]) -> f64 {
        debug_assert_eq!(path.len(), self.num_positions);
        let mut score = self.start[path[0]];
        for i in 1..path.len() {
            score += self.edge(i, path[i - 1], path[i]);
        }
        score + self.end[path[path.len() - 1]]
    }

    /// Highest scoring path and its score. Ties go to the lower-numbered
    /// state at every backtracking step.
    pub fn viterbi(&self) -> Result<(Vec<StateId>, f64)> {
        let (n, l) = (self.num_positions, self.num_states);
        let mut delta = self.start.clone();
        let mut next = vec![f64::NEG_INFINITY; l];
        let mut back = vec![0usize; n * l];
        for i in 1..n {
            let block = self.block(i);
            for s in 0..l {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for p in 0..l {
                    let v = delta[p] + block[p * l + s];
                    if v > best {
                        best = v;
                        arg = p;
                    }
                }
                next[s] = best;
                back[i * l + s] = arg;
            }
            std::mem::swap(&mut delta, &mut next);
        }
        let mut best = f64::NEG_INFINITY;
        let mut last = 0;
        for s in 0..l {
            let v = delta[s] + self.end[s];
            if v > best {
                best = v;
                last = s;
            }
        }
        if best == f64::NEG_INFINITY {
            return Err(Error::InfeasibleTopology);
        }
        let mut path = vec![0; n];
        path[n - 1] = last;
        for i in (1..n).rev() {
            path[i - 1] = back[i * l + path[i]];
        }
        Ok((path, best))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardBackward {
    num_states: usize,
    log_alpha: Vec<f64>,
    log_beta: Vec<f64>,
    log_z: f64,
}

impl ForwardBackward {
    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn log_alpha(&self, i: usize) -> &[f64] {
        &self.log_alpha[i * self.num_states..(i + 1) * self.num_states]
    }

    pub fn log_beta(&self, i: usize) -> &[f64] {
        &self.log_beta[i * self.num_states..(i + 1) * self.num_states]
    }
}

pub fn forward_backward(t: &Trellis) -> Result<ForwardBackward> {
    let (n, l) = (t.num_positions, t.num_states);
    let mut alpha = vec![f64::NEG_INFINITY; n * l];
    let mut beta = vec![f64::NEG_INFINITY; n * l];
    let mut scratch = vec![0.0; l];

    alpha[..l].copy_from_slice(&t.start);
    for i in 1..n {
        let block = t.block(i);
        let (prev, cur) = alpha.split_at_mut(i * l);
        let prev = &prev[(i - 1) * l..];
        for s in 0..l {
            for p in 0..l {
                scratch[p] = prev[p] + block[p * l + s];
            }
            cur[s] = logsumexp(&scratch);
        }
    }

    beta[(n - 1) * l..].copy_from_slice(&t.end);
    for i in (1..n).rev() {
        let block = t.block(i);
        let (head, tail) = beta.split_at_mut(i * l);
        let next = &tail[..l];
        let cur = &mut head[(i - 1) * l..];
        for p in 0..l {
            for s in 0..l {
                scratch[s] = block[p * l + s] + next[s];
            }
            cur[p] = logsumexp(&scratch);
        }
    }

    let last = &alpha[(n - 1) * l..];
    for s in 0..l {
        scratch[s] = last[s] + t.end[s];
    }
    let log_z = logsumexp(&scratch);
    if log_z == f64::NEG_INFINITY {
        return Err(Error::InfeasibleTopology);
    }
    if !log_z.is_finite() {
        return Err(Error::NumericalFailure {
            id: None,
            detail: format!("log partition function is {log_z}"),
        });
    }
    Ok(ForwardBackward {
        num_states: l,
        log_alpha: alpha,
        log_beta: beta,
        log_z,
    })
}

/// Posterior node and edge marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    num_states: usize,
    node: Vec<f64>,
    edge: Vec<f64>,
}

impl Marginals {
    /// `P(y_i = s | x)`.
    pub fn node(&self, i: usize, s: StateId) -> f64 {
        self.node[i * self.num_states + s]
    }

    pub fn node_row(&self, i: usize) -> &[f64] {
        &self.node[i * self.num_states..(i + 1) * self.num_states]
    }

    /// `P(y_{i-1} = prev, y_i = cur | x)` for `i >= 1`.
    pub fn edge(&self, i: usize, prev: StateId, cur: StateId) -> f64 {
        let l = self.num_states;
        self.edge[(i - 1) * l * l + prev * l + cur]
    }

    pub fn num_positions(&self) -> usize {
        self.node.len() / self.num_states
    }
}

pub fn marginals(fb: &ForwardBackward, t: &Trellis) -> Marginals {
    let (n, l) = (t.num_positions, t.num_states);
    let z = fb.log_z;
    let node = fb
        .log_alpha
        .iter()
        .zip(&fb.log_beta)
        .map(|(a, b)| (a + b - z).exp())
        .collect();
    let mut edge = vec![0.0; (n - 1) * l * l];
    for i in 1..n {
        let alpha = fb.log_alpha(i - 1);
        let beta = fb.log_beta(i);
        let block = t.block(i);
        let out = &mut edge[(i - 1) * l * l..i * l * l];
        for p in 0..l {
            if alpha[p] == f64::NEG_INFINITY {
                continue;
            }
            for s in 0..l {
                let v = block[p * l + s];
                if v != f64::NEG_INFINITY {
                    out[p * l + s] = (alpha[p] + v + beta[s] - z).exp();
                }
            }
        }
    }
    Marginals {
        num_states: l,
        node,
        edge,
    }
}

/// Posterior mass of every label context at every position. Edge contexts
/// carry no mass at position 0.
pub(crate) fn context_masses(
    fb: &ForwardBackward,
    t: &Trellis,
    contexts: &ContextMap,
) -> Vec<[f64; NUM_CONTEXTS]> {
    let (n, l) = (t.num_positions, t.num_states);
    let z = fb.log_z;
    let mut out = vec![[0.0; NUM_CONTEXTS]; n];
    for (i, mass) in out.iter_mut().enumerate() {
        let alpha = fb.log_alpha(i);
        let beta = fb.log_beta(i);
        for s in 0..l {
            let a = alpha[s] + beta[s];
            if a == f64::NEG_INFINITY {
                continue;
            }
            let p = (a - z).exp();
            for &c in contexts.unigram(s) {
                mass[c as usize] += p;
            }
        }
        if i == 0 {
            continue;
        }
        let prev = fb.log_alpha(i - 1);
        let block = t.block(i);
        for p in 0..l {
            if prev[p] == f64::NEG_INFINITY {
                continue;
            }
            for s in 0..l {
                let v = block[p * l + s];
                if v != f64::NEG_INFINITY && beta[s] != f64::NEG_INFINITY {
                    mass[contexts.bigram(p, s) as usize] += (prev[p] + v + beta[s] - z).exp();
                }
            }
        }
    }
    out
}

/// Weight vector together with the feature index, topology and feature
/// configuration it was trained with.
#[derive(Debug, Clone)]
pub struct CrfModel {
    weights: Vec<f64>,
    index: FeatureIndex,
    topo: StateTopology,
    config: FeatureConfig,
    enumerator: PredicateEnumerator,
    contexts: ContextMap,
}

impl PartialEq for CrfModel {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights
            && self.index == other.index
            && self.topo == other.topo
            && self.config == other.config
    }
}

impl CrfModel {
    pub fn new(
        weights: Vec<f64>,
        index: FeatureIndex,
        topo: StateTopology,
        config: FeatureConfig,
    ) -> Result<Self> {
        if weights.len() != index.len() {
            return Err(Error::IncompatibleModel(format!(
                "{} weights for {} features",
                weights.len(),
                index.len()
            )));
        }
        if let Some(j) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NumericalFailure {
                id: None,
                detail: format!("weight {j} is not finite"),
            });
        }
        config.check(topo.kind())?;
        Ok(CrfModel {
            enumerator: PredicateEnumerator::new(&config),
            contexts: ContextMap::new(&topo),
            weights,
            index,
            topo,
            config,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn index(&self) -> &FeatureIndex {
        &self.index
    }

    pub fn topology(&self) -> &StateTopology {
        &self.topo
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn num_features(&self) -> usize {
        self.index.len()
    }

    pub(crate) fn contexts(&self) -> &ContextMap {
        &self.contexts
    }

    pub(crate) fn set_weights(&mut self, weights: Vec<f64>) {
        debug_assert_eq!(weights.len(), self.index.len());
        self.weights = weights;
    }

    pub fn compile(&self, record: &ProteinRecord) -> CompiledRecord {
        self.index.compile(record, &self.enumerator)
    }

    pub fn trellis(&self, compiled: &CompiledRecord) -> Trellis {
        self.trellis_with(compiled, &self.weights)
    }

    /// Trellis under an arbitrary weight vector of the right length.
    pub(crate) fn trellis_with(&self, compiled: &CompiledRecord, weights: &[f64]) -> Trellis {
        let topo = &self.topo;
        let l = topo.num_states();
        let n = compiled.len();
        let mut start = vec![f64::NEG_INFINITY; l];
        let end = (0..l)
            .map(|s| if topo.is_end(s) { 0.0 } else { f64::NEG_INFINITY })
            .collect();
        let mut edges = vec![f64::NEG_INFINITY; n.saturating_sub(1) * l * l];
        let mut unary = vec![0.0; l];

        for i in 0..n {
            let mut ctx = [0.0; NUM_CONTEXTS];
            for &(c, j) in compiled.at(i) {
                ctx[c as usize] += weights[j as usize];
            }
            for (s, u) in unary.iter_mut().enumerate() {
                *u = self.contexts.unigram(s).iter().map(|&c| ctx[c as usize]).sum();
            }
            if i == 0 {
                for s in 0..l {
                    if topo.is_start(s) {
                        start[s] = unary[s];
                    }
                }
                continue;
            }
            let block = &mut edges[(i - 1) * l * l..i * l * l];
            for p in 0..l {
                for s in 0..l {
                    if topo.is_allowed(p, s) {
                        block[p * l + s] = unary[s] + ctx[self.contexts.bigram(p, s) as usize];
                    }
                }
            }
        }
        Trellis::new(l, start, end, edges)
    }
}

pub fn build_trellis(record: &ProteinRecord, model: &CrfModel) -> Trellis {
    model.trellis(&model.compile(record))
}

/// `log p(path | x)`.
pub fn sequence_log_prob(record: &ProteinRecord, path: &[StateId], model: &CrfModel) -> Result<f64> {
    if path.len() != record.len() {
        return Err(Error::InfeasiblePath {
            position: path.len().min(record.len()),
        });
    }
    model.topology().check_path(path)?;
    let t = build_trellis(record, model);
    let fb = forward_backward(&t)?;
    Ok(t.path_score(path) - fb.log_z())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub states: Vec<StateId>,
    pub labels: Vec<BinaryLabel>,
    pub score: f64,
}

pub fn viterbi(record: &ProteinRecord, model: &CrfModel) -> Result<Decoded> {
    let t = build_trellis(record, model);
    let (states, score) = t.viterbi()?;
    let labels = model.topology().project(&states);
    Ok(Decoded {
        states,
        labels,
        score,
    })
}

/// Per-residue helix probability.
pub fn helix_marginals(record: &ProteinRecord, model: &CrfModel) -> Result<Vec<f64>> {
    let t = build_trellis(record, model);
    let fb = forward_backward(&t)?;
    let m = marginals(&fb, &t);
    let topo = model.topology();
    Ok((0..record.len())
        .map(|i| {
            m.node_row(i)
                .iter()
                .enumerate()
                .filter(|(s, _)| topo.projection(*s).is_helix())
                .map(|(_, p)| p)
                .sum::<f64>()
                .clamp(0.0, 1.0)
        })
        .collect())
}
