//! Evaluation protocol: exact-match accuracy, majority baseline, k-fold
//! cross-validation, paired t-tests, per-class metrics and agreement.

mod confusion;
mod experiment;
pub mod report;
mod stats;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::features::{ClassLabel, Example};
use crate::rules::{classify, Learner, LearnerParams, RipperLearner};

pub use confusion::{per_class_metrics, ClassMetrics, ConfusionMatrix};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentError, ExperimentReport, ExperimentRow, LearnerKind};
pub use stats::{kappa, paired_t, t_critical, TTest};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("cannot split {n} examples into {k} folds")]
    BadFolds { n: usize, k: usize },
    #[error("paired series differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {0} items")]
    TooFew(usize),
    #[error("agreement expected by chance is 1; kappa is undefined")]
    DegenerateKappa,
}

/// Assignment of examples to k disjoint test folds: a seeded ChaCha8
/// shuffle of the indices, dealt round-robin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn new(n: usize, k: usize, seed: u64) -> Result<FoldPlan, EvalError> {
        if k < 2 || k > n {
            return Err(EvalError::BadFolds { n, k });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut assignment = vec![0; n];
        for (slot, idx) in order.into_iter().enumerate() {
            assignment[idx] = slot % k;
        }
        Ok(FoldPlan { k, seed, assignment })
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Test indices of fold `f`, ascending.
    pub fn test_indices(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|i| self.assignment[*i] == f).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for f in &self.assignment {
            sizes[*f] += 1;
        }
        sizes
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CVResult {
    pub per_fold_accuracy: Vec<f64>,
    pub mean: f64,
    pub standard_error: f64,
    /// Out-of-fold prediction for every example.
    pub predictions: Vec<ClassLabel>,
}

impl CVResult {
    fn from_folds(per_fold_accuracy: Vec<f64>, predictions: Vec<ClassLabel>) -> CVResult {
        let k = per_fold_accuracy.len() as f64;
        let mean = per_fold_accuracy.iter().sum::<f64>() / k;
        let var = per_fold_accuracy.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (k - 1.0);
        CVResult { per_fold_accuracy, mean, standard_error: var.sqrt() / k.sqrt(), predictions }
    }
}

/// Share of positions where the prediction equals the gold label.
pub fn accuracy(predicted: &[ClassLabel], gold: &[ClassLabel]) -> f64 {
    if gold.is_empty() {
        return 0.0;
    }
    predicted.iter().zip(gold).filter(|(p, g)| p == g).count() as f64 / gold.len() as f64
}

/// The modal label and its relative frequency; ties go to the label that is
/// more frequent in the reference corpus.
pub fn majority_baseline(labels: &[ClassLabel]) -> Option<(ClassLabel, f64)> {
    let mut counts = [0usize; 16];
    for l in labels {
        counts[l.index()] += 1;
    }
    let (best, n) = ClassLabel::ALL
        .iter()
        .map(|c| (*c, counts[c.index()]))
        .fold(None::<(ClassLabel, usize)>, |acc, (c, n)| match acc {
            Some((_, m)) if m >= n => acc,
            _ => Some((c, n)),
        })?;
    (n > 0).then(|| (best, n as f64 / labels.len() as f64))
}

/// Trains on the complement of each fold and scores exact-match accuracy on
/// the fold. Folds run in parallel; results are keyed by fold index.
pub fn cross_validate_with(examples: &[Example], learner: &dyn Learner, plan: &FoldPlan) -> Result<CVResult, EvalError> {
    if plan.len() != examples.len() {
        return Err(EvalError::LengthMismatch(plan.len(), examples.len()));
    }
    let folds: Vec<(Vec<usize>, Vec<ClassLabel>)> = (0..plan.k)
        .into_par_iter()
        .map(|f| {
            let train: Vec<&Example> =
                examples.iter().enumerate().filter(|(i, _)| plan.assignment[*i] != f).map(|(_, e)| e).collect();
            let rl = learner.fit(&train);
            let test = plan.test_indices(f);
            let preds = test.iter().map(|i| classify(&rl, &examples[*i].features)).collect();
            (test, preds)
        })
        .collect();

    let mut predictions = vec![ClassLabel::CPQ; examples.len()];
    let mut per_fold = Vec::with_capacity(plan.k);
    for (test, preds) in folds {
        let gold: Vec<ClassLabel> = test.iter().map(|i| examples[*i].label).collect();
        per_fold.push(accuracy(&preds, &gold));
        for (i, p) in test.into_iter().zip(preds) {
            predictions[i] = p;
        }
    }
    Ok(CVResult::from_folds(per_fold, predictions))
}

/// k-fold cross-validation of the rule learner.
pub fn cross_validate(examples: &[Example], params: &LearnerParams, k: usize, seed: u64) -> Result<CVResult, EvalError> {
    let plan = FoldPlan::new(examples.len(), k, seed)?;
    cross_validate_with(examples, &RipperLearner { params: params.clone() }, &plan)
}
