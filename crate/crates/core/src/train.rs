//! Penalised maximum-likelihood training.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::chain::{context_masses, forward_backward, CrfModel};
use crate::error::{Error, Result};
use crate::features::{build_index, CompiledRecord, FeatureConfig, FeatureIndex, NUM_CONTEXTS};
use crate::lbfgs::{self, LbfgsParams, Termination};
use crate::seq::Dataset;
use crate::topology::{StateId, StateTopology};

/// How per-record contributions are summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Fixed chunks summed in record order; bit-identical across thread counts.
    Deterministic,
    #[default]
    Free,
}

/// Records per chunk in deterministic mode.
const CHUNK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Gaussian prior variance; `f64::INFINITY` disables the penalty.
    pub sigma2: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub lbfgs_history: usize,
    pub reduction: Reduction,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            sigma2: 10.0,
            epsilon: 1e-4,
            max_iters: 500,
            lbfgs_history: 10,
            reduction: Reduction::Free,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::ConfigConflict(msg.to_string()));
        if !(self.sigma2 > 0.0) {
            return bad("sigma2 must be positive");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if self.lbfgs_history == 0 {
            return bad("lbfgs_history must be at least 1");
        }
        Ok(())
    }

    fn penalty_scale(&self) -> f64 {
        if self.sigma2.is_infinite() {
            0.0
        } else {
            1.0 / self.sigma2
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub iterations: usize,
    pub objective: f64,
    pub grad_norm: f64,
    /// Objective and gradient infinity-norm, starting with the initial point.
    pub trace: Vec<(f64, f64)>,
    pub termination: Termination,
    pub num_features: usize,
}

impl TrainReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("iteration\tobjective\tgrad_norm\n");
        for (i, (v, g)) in self.trace.iter().enumerate() {
            writeln!(out, "{i}\t{v}\t{g}").unwrap();
        }
        out
    }
}

/// Training data compiled against a feature index.
pub struct Problem {
    model: CrfModel,
    compiled: Vec<CompiledRecord>,
    gold: Vec<Vec<StateId>>,
    ids: Vec<String>,
    empirical: Vec<f64>,
}

impl Problem {
    pub fn new(train: &Dataset, config: &FeatureConfig, topo: &StateTopology) -> Result<Self> {
        let index = build_index(train, config, topo)?;
        Problem::with_index(train, index, config, topo)
    }

    pub fn with_index(
        train: &Dataset,
        index: FeatureIndex,
        config: &FeatureConfig,
        topo: &StateTopology,
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyTraining);
        }
        let k = index.len();
        let model = CrfModel::new(vec![0.0; k], index, topo.clone(), config.clone())?;
        let mut gold = Vec::with_capacity(train.len());
        for r in train.records() {
            let g = r.gold().ok_or_else(|| Error::MissingGold(r.id().to_string()))?;
            gold.push(topo.derive_states(g));
        }
        let compiled: Vec<CompiledRecord> = train.records().par_iter().map(|r| model.compile(r)).collect();
        let mut empirical = vec![0.0; k];
        for (c, path) in compiled.iter().zip(&gold) {
            add_empirical(&mut empirical, c, path, &model);
        }
        Ok(Problem {
            ids: train.records().iter().map(|r| r.id().to_string()).collect(),
            model,
            compiled,
            gold,
            empirical,
        })
    }

    pub fn num_features(&self) -> usize {
        self.empirical.len()
    }

    pub fn index(&self) -> &FeatureIndex {
        self.model.index()
    }

    pub fn empirical(&self) -> &[f64] {
        &self.empirical
    }

    /// Penalised conditional log-likelihood and its gradient.
    pub fn objective_and_gradient(&self, lambda: &[f64], tc: &TrainConfig) -> Result<(f64, Vec<f64>)> {
        let k = self.num_features();
        assert_eq!(lambda.len(), k);
        let n = self.compiled.len();
        let one = |i: usize, acc: &mut (f64, Vec<f64>)| self.accumulate(i, lambda, acc);

        let (ll, expected) = match tc.reduction {
            Reduction::Deterministic => {
                let parts: Vec<Result<(f64, Vec<f64>)>> = (0..n.div_ceil(CHUNK))
                    .into_par_iter()
                    .map(|c| {
                        let mut acc = (0.0, vec![0.0; k]);
                        for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                            one(i, &mut acc)?;
                        }
                        Ok(acc)
                    })
                    .collect();
                let mut total = (0.0, vec![0.0; k]);
                for part in parts {
                    let (l, e) = part?;
                    total.0 += l;
                    total.1.iter_mut().zip(&e).for_each(|(a, b)| *a += b);
                }
                total
            }
            Reduction::Free => (0..n)
                .into_par_iter()
                .try_fold(
                    || (0.0, vec![0.0; k]),
                    |mut acc, i| {
                        one(i, &mut acc)?;
                        Ok::<_, Error>(acc)
                    },
                )
                .try_reduce(
                    || (0.0, vec![0.0; k]),
                    |mut a, b| {
                        a.0 += b.0;
                        a.1.iter_mut().zip(&b.1).for_each(|(x, y)| *x += y);
                        Ok(a)
                    },
                )?,
        };

        let scale = tc.penalty_scale();
        let penalty: f64 = lambda.iter().map(|w| w * w).sum::<f64>() * 0.5 * scale;
        let objective = ll - penalty;
        let grad: Vec<f64> = (0..k)
            .map(|j| self.empirical[j] - expected[j] - lambda[j] * scale)
            .collect();
        if !objective.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NumericalFailure {
                id: None,
                detail: "non-finite objective or gradient".into(),
            });
        }
        Ok((objective, grad))
    }

    /// Adds record `i`'s log-likelihood and expected counts.
    fn accumulate(&self, i: usize, lambda: &[f64], acc: &mut (f64, Vec<f64>)) -> Result<()> {
        let fail = |detail: String| Error::NumericalFailure {
            id: Some(self.ids[i].clone()),
            detail,
        };
        let compiled = &self.compiled[i];
        let t = self.model.trellis_with(compiled, lambda);
        let fb = forward_backward(&t).map_err(|e| fail(e.to_string()))?;
        let ll = t.path_score(&self.gold[i]) - fb.log_z();
        if !ll.is_finite() {
            return Err(fail(format!("log-likelihood is {ll}")));
        }
        acc.0 += ll;
        let masses = context_masses(&fb, &t, self.model.contexts());
        for (pos, mass) in masses.iter().enumerate() {
            for &(c, j) in compiled.at(pos) {
                acc.1[j as usize] += mass[c as usize];
            }
        }
        Ok(())
    }

    pub fn optimize(self, tc: &TrainConfig) -> Result<(CrfModel, TrainReport)> {
        tc.validate()?;
        let params = LbfgsParams {
            history: tc.lbfgs_history,
            max_iters: tc.max_iters,
            epsilon: tc.epsilon,
            ..LbfgsParams::default()
        };
        let k = self.num_features();
        let out = lbfgs::minimize(vec![0.0; k], &params, |x| {
            let (v, g) = self.objective_and_gradient(x, tc)?;
            Ok((-v, g.into_iter().map(|z| -z).collect()))
        })?;
        let report = TrainReport {
            iterations: out.iterations,
            objective: -out.value,
            grad_norm: out.grad_norm,
            trace: out.trace.iter().map(|&(v, g)| (-v, g)).collect(),
            termination: out.termination,
            num_features: k,
        };
        let mut model = self.model;
        model.set_weights(out.x);
        Ok((model, report))
    }
}

fn add_empirical(out: &mut [f64], compiled: &CompiledRecord, path: &[StateId], model: &CrfModel) {
    for i in 0..compiled.len() {
        let active: [bool; NUM_CONTEXTS] = model.contexts().active(path, i);
        for &(c, j) in compiled.at(i) {
            if active[c as usize] {
                out[j as usize] += 1.0;
            }
        }
    }
}

/// Count of every indexed feature under the gold state paths.
pub fn empirical_expectations(
    train: &Dataset,
    index: &FeatureIndex,
    config: &FeatureConfig,
    topo: &StateTopology,
) -> Result<Vec<f64>> {
    Ok(Problem::with_index(train, index.clone(), config, topo)?.empirical)
}

/// Penalised log-likelihood and gradient of `lambda` on `train`.
pub fn objective_and_gradient(
    lambda: &[f64],
    train: &Dataset,
    index: &FeatureIndex,
    config: &FeatureConfig,
    topo: &StateTopology,
    tc: &TrainConfig,
) -> Result<(f64, Vec<f64>)> {
    Problem::with_index(train, index.clone(), config, topo)?.objective_and_gradient(lambda, tc)
}

pub fn train(
    train: &Dataset,
    config: &FeatureConfig,
    topo: &StateTopology,
    tc: &TrainConfig,
) -> Result<(CrfModel, TrainReport)> {
    tc.validate()?;
    Problem::new(train, config, topo)?.optimize(tc)
}
