//! Cross-validated sampling experiments and their metrics.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use indexmap::IndexMap;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::db::{Database, SentenceExample};
use crate::error::{Error, Result};
use crate::sampler::{certainty, SamplerConfig, SamplingState, Strategy};
use crate::thesaurus::{Thesaurus, MAX_SIM};

/// Largest possible certainty: top score 11, runner-up 0, for any lambda.
pub const C_MAX: f64 = MAX_SIM as f64;

/// The system's answer for one test sentence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub predicted: Option<String>,
    pub gold: String,
    pub s1: f64,
    pub s2: f64,
}

impl Outcome {
    pub fn correct(&self) -> bool {
        self.predicted.as_deref() == Some(self.gold.as_str())
    }

    pub fn certainty(&self, lambda: f64) -> f64 {
        certainty(self.s1, self.s2, lambda)
    }
}

/// Fraction of correct outputs.
pub fn precision(outcomes: &[Outcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(outcomes.iter().filter(|o| o.correct()).count() as f64 / outcomes.len() as f64)
}

/// Fraction of positions where `predicted` equals `gold`.
pub fn precision_of<S: AsRef<str>>(predicted: &[S], gold: &[S]) -> Result<f64> {
    if predicted.is_empty() || predicted.len() != gold.len() {
        return Err(Error::EmptyInput);
    }
    let correct = predicted
        .iter()
        .zip(gold)
        .filter(|(p, g)| p.as_ref() == g.as_ref())
        .count();
    Ok(correct as f64 / predicted.len() as f64)
}

/// Certainty-weighted score: correct answers add `C/C_MAX`, wrong ones
/// subtract `p * C/C_MAX`; averaged over all inputs.
pub fn pm(outcomes: &[Outcome], lambda: f64, p: f64) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total: f64 = outcomes
        .iter()
        .map(|o| {
            let delta = if o.correct() { 1.0 } else { -p };
            delta * o.certainty(lambda) / C_MAX
        })
        .sum();
    Ok(total / outcomes.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub applicability: f64,
    /// `None` when no input reaches the threshold.
    pub precision: Option<f64>,
}

/// For each threshold: the share of inputs whose certainty reaches it, and
/// the precision over that share.
pub fn applicability_precision_curve(outcomes: &[Outcome], lambda: f64, thresholds: &[f64]) -> Vec<CurvePoint> {
    let n = outcomes.len();
    let scored: Vec<(f64, bool)> = outcomes.iter().map(|o| (o.certainty(lambda), o.correct())).collect();
    thresholds
        .iter()
        .map(|&threshold| {
            let (mut passed, mut correct) = (0usize, 0usize);
            for &(c, ok) in &scored {
                if c >= threshold {
                    passed += 1;
                    correct += usize::from(ok);
                }
            }
            CurvePoint {
                threshold,
                applicability: if n == 0 { 0.0 } else { passed as f64 / n as f64 },
                precision: (passed > 0).then(|| correct as f64 / passed as f64),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    pub per_verb: IndexMap<String, f64>,
    /// Sentence-weighted over all verbs.
    pub pooled: f64,
}

/// Precision on `test` of always answering the sense most frequent in
/// `train` for the verb. Verbs absent from `train` fall back to their first
/// seed sense; frequency ties go to the earlier sense in the database.
pub fn lower_bound(train: &[SentenceExample], test: &[SentenceExample], db: &Database) -> Result<LowerBound> {
    if test.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts: HashMap<&str, HashMap<&str, usize>> = HashMap::new();
    for x in train {
        if let Some(g) = &x.gold {
            *counts.entry(&x.verb).or_default().entry(g).or_default() += 1;
        }
    }
    let mut per_verb_counts: IndexMap<String, (usize, usize)> = IndexMap::new();
    for x in test {
        let gold = x.gold.as_deref().ok_or_else(|| Error::InvalidSentence {
            id: x.id.clone(),
            message: "test sentence has no gold sense".into(),
        })?;
        let senses = db.senses(&x.verb).ok_or_else(|| Error::UnknownVerb(x.verb.clone()))?;
        let majority = counts
            .get(x.verb.as_str())
            .and_then(|c| {
                senses
                    .iter()
                    .map(|s| (s.sense_id.as_str(), c.get(s.sense_id.as_str()).copied().unwrap_or(0)))
                    .fold(None::<(&str, usize)>, |best, cur| match best {
                        Some(b) if b.1 >= cur.1 => Some(b),
                        _ => Some(cur),
                    })
                    .filter(|(_, n)| *n > 0)
                    .map(|(s, _)| s)
            })
            .unwrap_or(senses[0].sense_id.as_str());
        let entry = per_verb_counts.entry(x.verb.clone()).or_default();
        entry.0 += usize::from(majority == gold);
        entry.1 += 1;
    }
    let correct: usize = per_verb_counts.values().map(|c| c.0).sum();
    Ok(LowerBound {
        pooled: correct as f64 / test.len() as f64,
        per_verb: per_verb_counts
            .into_iter()
            .map(|(v, (c, n))| (v, c as f64 / n as f64))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub folds: usize,
    pub strategies: Vec<Strategy>,
    pub sampler: SamplerConfig,
    /// Penalty for wrong answers in PM.
    pub p: f64,
    pub thresholds: Vec<f64>,
    pub rng_seed: u64,
    /// Evaluate after every `eval_stride` batches (the last one always).
    pub eval_stride: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            folds: 6,
            strategies: vec![Strategy::Random, Strategy::Utility],
            sampler: SamplerConfig::default(),
            p: 1.0,
            thresholds: (0..=12).map(f64::from).collect(),
            rng_seed: 0,
            eval_stride: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.sampler.validate()?;
        if self.folds < 2 {
            return Err(Error::Config("at least two folds are needed".into()));
        }
        if !(self.p >= 0.0 && self.p.is_finite()) {
            return Err(Error::Config(format!("penalty p = {} must be >= 0", self.p)));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("no strategy selected".into()));
        }
        if self.eval_stride == 0 {
            return Err(Error::Config("evaluation stride must be at least 1".into()));
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("thresholds must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub strategy: Strategy,
    pub fold: usize,
    pub iteration: usize,
    pub labeled: usize,
    pub precision: f64,
    pub pm: f64,
    pub applicability: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Test-fold membership: sentence ids per fold.
    pub folds: Vec<Vec<String>>,
    pub rows: Vec<ReportRow>,
    pub lower_bounds: Vec<LowerBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Precision,
    Pm,
}

/// Normalized area under a curve given as (x, y) points: the trapezoid
/// integral divided by the x range, i.e. the curve's mean height.
pub fn curve_area(points: &[(f64, f64)]) -> f64 {
    match points {
        [] => 0.0,
        [(_, y)] => *y,
        _ => {
            let width = points.last().unwrap().0 - points[0].0;
            let integral: f64 = points
                .windows(2)
                .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
                .sum();
            if width > 0.0 {
                integral / width
            } else {
                points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64
            }
        }
    }
}

impl ExperimentReport {
    pub fn rows_for(&self, strategy: Strategy, fold: usize) -> impl Iterator<Item = &ReportRow> {
        self.rows
            .iter()
            .filter(move |r| r.strategy == strategy && r.fold == fold)
    }

    pub fn final_row(&self, strategy: Strategy, fold: usize) -> Option<&ReportRow> {
        self.rows_for(strategy, fold).last()
    }

    /// Curve area for one fold, over labeled count.
    pub fn area(&self, strategy: Strategy, fold: usize, metric: Metric) -> f64 {
        let points: Vec<(f64, f64)> = self
            .rows_for(strategy, fold)
            .map(|r| {
                let y = match metric {
                    Metric::Precision => r.precision,
                    Metric::Pm => r.pm,
                };
                (r.labeled as f64, y)
            })
            .collect();
        curve_area(&points)
    }

    /// Curve area averaged over folds.
    pub fn mean_area(&self, strategy: Strategy, metric: Metric) -> f64 {
        let folds = self.config.folds;
        (0..folds).map(|f| self.area(strategy, f, metric)).sum::<f64>() / folds as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy,fold,iteration,labeled,precision,pm\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.strategy, r.fold, r.iteration, r.labeled, r.precision, r.pm
            )
            .unwrap();
        }
        out
    }

    pub fn summary(&self) -> Summary {
        let mut strategies = IndexMap::new();
        for &s in &self.config.strategies {
            let finals: Vec<&ReportRow> = (0..self.config.folds).filter_map(|f| self.final_row(s, f)).collect();
            strategies.insert(
                s.to_string(),
                StrategySummary {
                    final_precision: finals.iter().map(|r| r.precision).collect(),
                    final_pm: finals.iter().map(|r| r.pm).collect(),
                    area_precision: self.mean_area(s, Metric::Precision),
                    area_pm: self.mean_area(s, Metric::Pm),
                    final_applicability: finals.iter().map(|r| r.applicability.clone()).collect(),
                },
            );
        }
        let n = self.lower_bounds.len().max(1) as f64;
        Summary {
            config: self.config.clone(),
            strategies,
            lower_bound: self.lower_bounds.iter().map(|l| l.pooled).sum::<f64>() / n,
            lower_bound_per_fold: self.lower_bounds.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategySummary {
    pub final_precision: Vec<f64>,
    pub final_pm: Vec<f64>,
    pub area_precision: f64,
    pub area_pm: f64,
    pub final_applicability: Vec<Vec<CurvePoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub strategies: IndexMap<String, StrategySummary>,
    /// Mean over folds of the pooled majority-sense precision.
    pub lower_bound: f64,
    pub lower_bound_per_fold: Vec<LowerBound>,
}

fn mix_seed(parts: &[u64]) -> u64 {
    // splitmix64 over the parts
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        let mut z = h ^ p.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}

/// Assigns each sentence to a test fold, verb by verb, so every fold gets
/// a near-equal share of each verb. Returns fold index per sentence.
pub fn assign_folds(corpus: &[SentenceExample], folds: usize, rng_seed: u64) -> Vec<usize> {
    let mut by_verb: IndexMap<&str, Vec<usize>> = IndexMap::new();
    for (i, x) in corpus.iter().enumerate() {
        by_verb.entry(&x.verb).or_default().push(i);
    }
    let mut assignment = vec![0; corpus.len()];
    let mut offset = 0;
    for (v, (_, mut members)) in by_verb.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[rng_seed, 1, v as u64]));
        members.shuffle(&mut rng);
        for (k, i) in members.into_iter().enumerate() {
            assignment[i] = (offset + k) % folds;
        }
        // rotate so small verbs do not all pile into fold 0
        offset += 1;
    }
    assignment
}

/// Per-verb evaluation at one iteration.
#[derive(Debug, Clone)]
struct Checkpoint {
    iteration: usize,
    labeled: usize,
    outcomes: Vec<Outcome>,
}

/// Outcomes of the held-out sentences, read from the state's cache.
fn evaluate(state: &SamplingState) -> Vec<Outcome> {
    (0..state.holdout().len())
        .map(|i| {
            let x = state.holdout_index(i);
            let senses = state.database().senses(&state.sentence(x).verb).expect("validated");
            Outcome {
                predicted: state.best_sense(x).map(|s| senses[s].sense_id.clone()),
                gold: state.sentence(x).gold.clone().unwrap_or_default(),
                s1: state.s1(x),
                s2: state.s2(x),
            }
        })
        .collect()
}

/// Runs one strategy on one verb of one fold.
fn run_verb(
    thesaurus: &Arc<Thesaurus>,
    seeds: &Database,
    train: Vec<SentenceExample>,
    test: Vec<SentenceExample>,
    strategy: Strategy,
    config: &ExperimentConfig,
    rng_seed: u64,
) -> Result<Vec<Checkpoint>> {
    let mut state = SamplingState::with_holdout(thesaurus.clone(), seeds.clone(), train, test, config.sampler)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut checkpoints = vec![Checkpoint {
        iteration: 0,
        labeled: 0,
        outcomes: evaluate(&state),
    }];
    let mut iteration = 0;
    while state.pool_len() > 0 {
        let mut batch = Vec::new();
        for x in state.select(strategy, &mut rng)? {
            let gold = state.corpus()[x].gold.clone().expect("validated gold");
            if state.can_commit(x, &gold) {
                batch.push((x, gold));
            } else {
                // the gold sense's frame lacks one of the sentence's cases
                state.discard(x)?;
            }
        }
        state.commit_batch(&batch)?;
        iteration += 1;
        if iteration % config.eval_stride == 0 || state.pool_len() == 0 {
            checkpoints.push(Checkpoint {
                iteration,
                labeled: state.labeled().len() + state.discarded().len(),
                outcomes: evaluate(&state),
            });
        }
    }
    Ok(checkpoints)
}

/// Cross-validated comparison of sampling strategies. Each verb is run on
/// its own; per-iteration metrics are pooled over verbs by sentence count.
pub fn run_experiment(
    corpus: &[SentenceExample],
    thesaurus: Arc<Thesaurus>,
    seeds: &Database,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    config.validate()?;
    if corpus.len() < config.folds {
        return Err(Error::Config(format!(
            "{} sentences cannot fill {} folds",
            corpus.len(),
            config.folds
        )));
    }
    for x in corpus {
        x.validate(seeds)?;
        if x.gold.is_none() {
            return Err(Error::InvalidSentence {
                id: x.id.clone(),
                message: "experiments need a gold sense on every sentence".into(),
            });
        }
    }

    let assignment = assign_folds(corpus, config.folds, config.rng_seed);
    let verbs: Vec<&str> = {
        let mut seen = IndexMap::new();
        for x in corpus {
            seen.entry(x.verb.as_str()).or_insert(());
        }
        seen.into_keys().collect()
    };

    let mut jobs = Vec::new();
    for fold in 0..config.folds {
        for (si, &strategy) in config.strategies.iter().enumerate() {
            for (vi, &verb) in verbs.iter().enumerate() {
                jobs.push((fold, si, strategy, vi, verb));
            }
        }
    }

    let results: Vec<Result<Vec<Checkpoint>>> = jobs
        .par_iter()
        .map(|&(fold, _, strategy, vi, verb)| {
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for (i, x) in corpus.iter().enumerate() {
                if x.verb != verb {
                    continue;
                }
                if assignment[i] == fold {
                    test.push(x.clone());
                } else {
                    train.push(x.clone());
                }
            }
            let seed = mix_seed(&[config.rng_seed, 2, fold as u64, vi as u64]);
            run_verb(&thesaurus, seeds, train, test, strategy, config, seed)
        })
        .collect();

    let mut per_job: HashMap<(usize, usize), Vec<Vec<Checkpoint>>> = HashMap::new();
    for (&(fold, si, ..), result) in jobs.iter().zip(results) {
        per_job.entry((fold, si)).or_default().push(result?);
    }

    let mut rows = Vec::new();
    for (si, &strategy) in config.strategies.iter().enumerate() {
        for fold in 0..config.folds {
            let verb_runs = &per_job[&(fold, si)];
            let mut iterations: Vec<usize> = verb_runs
                .iter()
                .flat_map(|cps| cps.iter().map(|c| c.iteration))
                .collect();
            iterations.sort_unstable();
            iterations.dedup();
            for iteration in iterations {
                let mut pooled: Vec<Outcome> = Vec::new();
                let mut labeled = 0;
                for cps in verb_runs {
                    let cp = cps
                        .iter()
                        .rev()
                        .find(|c| c.iteration <= iteration)
                        .expect("iteration 0 always present");
                    labeled += cp.labeled;
                    pooled.extend(cp.outcomes.iter().cloned());
                }
                if pooled.is_empty() {
                    continue;
                }
                rows.push(ReportRow {
                    strategy,
                    fold,
                    iteration,
                    labeled,
                    precision: precision(&pooled)?,
                    pm: pm(&pooled, config.sampler.lambda, config.p)?,
                    applicability: applicability_precision_curve(&pooled, config.sampler.lambda, &config.thresholds),
                });
            }
        }
    }

    let mut folds = vec![Vec::new(); config.folds];
    let mut lower_bounds = Vec::with_capacity(config.folds);
    for (i, x) in corpus.iter().enumerate() {
        folds[assignment[i]].push(x.id.clone());
    }
    for fold in 0..config.folds {
        let (train, test): (Vec<_>, Vec<_>) = corpus.iter().enumerate().partition(|(i, _)| assignment[*i] != fold);
        let train: Vec<SentenceExample> = train.into_iter().map(|(_, x)| x.clone()).collect();
        let test: Vec<SentenceExample> = test.into_iter().map(|(_, x)| x.clone()).collect();
        lower_bounds.push(lower_bound(&train, &test, seeds)?);
    }

    Ok(ExperimentReport {
        config: config.clone(),
        folds,
        rows,
        lower_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(pred: &str, gold: &str, s1: f64, s2: f64) -> Outcome {
        Outcome {
            predicted: Some(pred.into()),
            gold: gold.into(),
            s1,
            s2,
        }
    }

    #[test]
    fn precision_ratios() {
        let all: Vec<_> = (0..4).map(|_| outcome("a", "a", 9.0, 1.0)).collect();
        assert_eq!(precision(&all).unwrap(), 1.0);
        let none: Vec<_> = (0..4).map(|_| outcome("a", "b", 9.0, 1.0)).collect();
        assert_eq!(precision(&none).unwrap(), 0.0);
        let p: Vec<&str> = "aaaaaaabbb".split("").filter(|s| !s.is_empty()).collect();
        let g = vec!["a"; 10];
        assert!((precision_of(&p, &g).unwrap() - 0.7).abs() < 1e-15);
        assert!(matches!(precision(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn pm_values() {
        let good: Vec<_> = (0..3).map(|_| outcome("a", "a", 11.0, 0.0)).collect();
        assert_eq!(pm(&good, 0.5, 1.0).unwrap(), 1.0);
        let bad: Vec<_> = (0..3).map(|_| outcome("a", "b", 11.0, 0.0)).collect();
        assert_eq!(pm(&bad, 0.5, 1.0).unwrap(), -1.0);
        let half = vec![outcome("a", "a", 11.0, 0.0), outcome("a", "b", 0.0, 0.0)];
        assert_eq!(pm(&half, 0.5, 1.0).unwrap(), 0.5);
        assert!(pm(&[], 0.5, 1.0).is_err());
    }

    #[test]
    fn applicability_edges() {
        let xs = vec![
            outcome("a", "a", 11.0, 0.0),
            outcome("a", "b", 4.0, 4.0),
            outcome("a", "a", 8.0, 6.0),
        ];
        let curve = applicability_precision_curve(&xs, 0.5, &[0.0, 5.0, 11.0, 11.5]);
        assert_eq!(curve[0].applicability, 1.0);
        assert_eq!(curve[1].applicability, 2.0 / 3.0);
        assert_eq!(curve[1].precision, Some(1.0));
        assert_eq!(curve[2].applicability, 1.0 / 3.0);
        assert_eq!(curve[3].applicability, 0.0);
        assert_eq!(curve[3].precision, None);
    }

    #[test]
    fn area_of_flat_and_ramp() {
        assert_eq!(curve_area(&[(0.0, 0.5), (10.0, 0.5)]), 0.5);
        assert_eq!(curve_area(&[(0.0, 0.0), (4.0, 1.0)]), 0.5);
        assert_eq!(curve_area(&[(3.0, 0.25)]), 0.25);
    }

    #[test]
    fn folds_cover_each_sentence_once() {
        let corpus: Vec<SentenceExample> = (0..23)
            .map(|i| SentenceExample {
                id: i.to_string(),
                verb: if i % 3 == 0 { "a" } else { "b" }.into(),
                complements: vec![crate::db::Complement::new("o", "w0")],
                gold: Some("s".into()),
            })
            .collect();
        let a = assign_folds(&corpus, 6, 5);
        assert_eq!(a, assign_folds(&corpus, 6, 5));
        let mut sizes = [0; 6];
        for &f in &a {
            sizes[f] += 1;
        }
        assert_eq!(sizes.iter().sum::<usize>(), 23);
        assert!(sizes.iter().all(|&s| (3..=5).contains(&s)), "{sizes:?}");
    }

    #[test]
    fn config_errors() {
        let mut c = ExperimentConfig::default();
        c.folds = 1;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.p = -0.5;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.sampler.lambda = -0.1;
        assert!(c.validate().is_err());
    }
}
