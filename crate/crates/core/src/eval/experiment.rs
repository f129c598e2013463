use thiserror::Error;

use super::{cross_validate_with, paired_t, CVResult, EvalError, FoldPlan, TTest};
use crate::corpus::Corpus;
use crate::features::{extract_examples, FeatureError, FeatureGroup, GroupSet};
use crate::focus::FocusModel;
use crate::rules::{Learner, LearnerParams, MajorityLearner, RipperLearner};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no configurations given")]
    Empty,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LearnerKind {
    Majority,
    Rules(LearnerParams),
}

/// One row of an experiment: a feature selection and a learner.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: String,
    pub groups: GroupSet,
    pub focus: Option<FocusModel>,
    pub learner: LearnerKind,
}

impl ExperimentConfig {
    pub fn rules(model: &str, groups: GroupSet, focus: Option<FocusModel>, params: &LearnerParams) -> Self {
        ExperimentConfig { model: model.into(), groups, focus, learner: LearnerKind::Rules(params.clone()) }
    }

    pub fn majority() -> Self {
        ExperimentConfig {
            model: "BASELINE".into(),
            groups: [FeatureGroup::Familiarity].into_iter().collect(),
            focus: None,
            learner: LearnerKind::Majority,
        }
    }

    /// Feature sets in table notation, e.g. `FAMILIARITY,IINF,SEG`.
    pub fn feature_label(&self) -> String {
        if self.learner == LearnerKind::Majority {
            return "MAJORITY CLASS".into();
        }
        let mut parts: Vec<&str> =
            self.groups.iter().filter(|g| *g != FeatureGroup::Contrast).map(FeatureGroup::label).collect();
        if self.groups.contains(FeatureGroup::Contrast) {
            parts.push(self.focus.map_or("CONTRAST", FocusModel::label));
        }
        parts.join(",")
    }

    fn learner(&self) -> Box<dyn Learner> {
        match &self.learner {
            LearnerKind::Majority => Box::new(MajorityLearner),
            LearnerKind::Rules(p) => Box::new(RipperLearner { params: p.clone() }),
        }
    }

    /// The seventeen feature-set comparisons: baselines, each theory group
    /// with familiarity, and the combinations under every focus model.
    pub fn standard_suite(params: &LearnerParams) -> Vec<ExperimentConfig> {
        use FeatureGroup::*;
        let g = |gs: &[FeatureGroup]| gs.iter().copied().collect::<GroupSet>();
        let mut out = vec![ExperimentConfig::majority(), Self::rules("BASELINE", g(&[Familiarity]), None, params)];
        for f in FocusModel::ALL {
            out.push(Self::rules("INCREMENTAL", g(&[Familiarity, Contrast]), Some(*f), params));
        }
        out.push(Self::rules("CONCEPTUAL PACT", g(&[Familiarity, ConceptualPact]), None, params));
        out.push(Self::rules("INTENTIONAL INFLUENCES", g(&[Familiarity, IntentionalInfluences]), None, params));
        out.push(Self::rules("SITUATION SPECIFIC", g(&[Familiarity, Inherent]), None, params));
        let suites: [(&str, &[FeatureGroup]); 3] = [
            ("INTENTIONAL INFLUENCES, INCREMENTAL", &[Familiarity, IntentionalInfluences, Contrast]),
            ("ALL THEORY FEATURES COMBINED", &[Familiarity, IntentionalInfluences, ConceptualPact, Contrast]),
            ("ALL THEORIES & SITUATION SPECIFIC", &[Familiarity, IntentionalInfluences, Inherent, ConceptualPact, Contrast]),
        ];
        for (model, groups) in suites {
            for f in FocusModel::ALL {
                out.push(Self::rules(model, g(groups), Some(*f), params));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub config: ExperimentConfig,
    pub result: CVResult,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub k: usize,
    pub seed: u64,
    pub examples: usize,
    pub rows: Vec<ExperimentRow>,
    /// Paired t of row i against row j, for i ≠ j.
    pub t_matrix: Vec<Vec<Option<TTest>>>,
}

/// Cross-validates every configuration on one shared fold plan, so any two
/// rows can be compared with a paired t-test.
pub fn run_experiment(
    corpus: &Corpus,
    configs: &[ExperimentConfig],
    k: usize,
    seed: u64,
) -> Result<ExperimentReport, ExperimentError> {
    if configs.is_empty() {
        return Err(ExperimentError::Empty);
    }
    let plan = FoldPlan::new(corpus.mention_count(), k, seed)?;
    let mut rows = Vec::with_capacity(configs.len());
    for c in configs {
        let examples = extract_examples(corpus, c.groups, c.focus)?;
        let result = cross_validate_with(&examples, c.learner().as_ref(), &plan)?;
        rows.push(ExperimentRow { config: c.clone(), result });
    }
    let n = rows.len();
    let mut t_matrix = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                t_matrix[i][j] = Some(paired_t(&rows[i].result.per_fold_accuracy, &rows[j].result.per_fold_accuracy)?);
            }
        }
    }
    Ok(ExperimentReport { k, seed, examples: corpus.mention_count(), rows, t_matrix })
}
