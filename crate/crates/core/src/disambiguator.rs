//! Scores the candidate senses of a sentence by how closely its case
//! fillers resemble the stored examples of each sense.
//!
//! A sense's score is the mean of the per-case maximum similarities,
//! weighted by each case's contribution to disambiguation (CCD): cases whose
//! example sets overlap across senses carry less weight.

use std::cmp::Reverse;
use std::collections::HashMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::db::{Database, FillerSet, SenseEntry, SentenceExample};
use crate::error::{Error, Result};
use crate::thesaurus::{Sim, Term, Thesaurus, SHARING_THRESHOLD};

/// Highest similarity between `noun` and any filler in `examples`.
pub fn max_sim(thesaurus: &Thesaurus, noun: &str, examples: &FillerSet) -> Result<Sim> {
    examples
        .iter()
        .map(|e| thesaurus.sim(noun, e))
        .max()
        .ok_or(Error::EmptyFillerSet)
}

/// Size of a one-to-one matching between two filler multisets, pairing
/// fillers whose similarity reaches [`SHARING_THRESHOLD`]. Pairs are taken
/// greedily by descending similarity. Both sides are put in canonical
/// (sorted) order first, so the result depends only on the multisets.
pub fn shared_count(thesaurus: &Thesaurus, a: &FillerSet, b: &FillerSet) -> usize {
    let resolve = |set: &FillerSet| {
        let mut terms: Vec<Term> = set.iter().map(|w| thesaurus.term(w)).collect();
        terms.sort_unstable_by(|x, y| x.word.cmp(&y.word));
        terms
    };
    let (left, right) = (resolve(a), resolve(b));

    let mut pairs = Vec::new();
    for (i, x) in left.iter().enumerate() {
        for (j, y) in right.iter().enumerate() {
            let s = thesaurus.sim_terms(x, y);
            if s >= SHARING_THRESHOLD {
                pairs.push((Reverse(s), i, j));
            }
        }
    }
    pairs.sort_unstable();

    let mut used_left = vec![false; left.len()];
    let mut used_right = vec![false; right.len()];
    let mut matched = 0;
    for (_, i, j) in pairs {
        if !used_left[i] && !used_right[j] {
            used_left[i] = true;
            used_right[j] = true;
            matched += 1;
        }
    }
    matched
}

/// Fraction of the two sets' fillers left unshared; 1 for two empty sets.
pub fn unshared_ratio(thesaurus: &Thesaurus, a: &FillerSet, b: &FillerSet) -> f64 {
    let size = a.len() + b.len();
    if size == 0 {
        return 1.0;
    }
    let shared = shared_count(thesaurus, a, b);
    (size - 2 * shared) as f64 / size as f64
}

/// CCD before exponentiation: the mean, over pairs of senses that
/// subcategorize `case`, of the fraction of their fillers left unshared.
/// Returns 1 when fewer than two senses subcategorize the case.
pub fn ccd_base(db: &Database, thesaurus: &Thesaurus, verb: &str, case: &str) -> Result<f64> {
    let senses = db.senses(verb).ok_or_else(|| Error::UnknownVerb(verb.to_owned()))?;
    let sets: Vec<&FillerSet> = senses.iter().filter_map(|s| s.fillers(case)).collect();
    if sets.len() < 2 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            total += unshared_ratio(thesaurus, sets[i], sets[j]);
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

pub fn ccd(db: &Database, thesaurus: &Thesaurus, verb: &str, case: &str, alpha: f64) -> Result<f64> {
    Ok(ccd_base(db, thesaurus, verb, case)?.powf(alpha))
}

/// How CCD turns into per-case weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
#[derive(Default)]
pub enum Weighting {
    /// weight = base^alpha
    Power { alpha: f64 },
    /// The limit of a very large alpha: only the case(s) with the greatest
    /// base count, equally weighted.
    #[default]
    ArgmaxOnly,
}

/// Weighted mean of the known entries of `row`. `bases` holds the CCD base
/// of each entry's case. Entries that are `None` (case not subcategorized)
/// are skipped; an all-`None` row scores 0. A zero total weight falls back
/// to the plain mean.
pub fn weighted_score(row: &[Option<Sim>], bases: &[f64], weighting: Weighting) -> f64 {
    debug_assert_eq!(row.len(), bases.len());
    let known = || row.iter().zip(bases).filter_map(|(s, b)| s.map(|s| (s as f64, *b)));
    let (mut num, mut den, mut count, mut plain) = (0.0, 0.0, 0usize, 0.0);
    match weighting {
        Weighting::Power { alpha } => {
            for (s, b) in known() {
                let w = b.powf(alpha);
                num += s * w;
                den += w;
                plain += s;
                count += 1;
            }
        }
        Weighting::ArgmaxOnly => {
            let top = known().map(|(_, b)| b).fold(f64::NEG_INFINITY, f64::max);
            for (s, b) in known() {
                if b == top {
                    num += s;
                    den += 1.0;
                }
                plain += s;
                count += 1;
            }
        }
    }
    if count == 0 {
        return 0.0;
    }
    let mean = if den > 0.0 { num / den } else { plain / count as f64 };
    // a mean never leaves the range of its terms; rounding can nudge it out
    let (lo, hi) = known().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (s, _)| {
        (lo.min(s), hi.max(s))
    });
    mean.clamp(lo, hi)
}

/// CCD bases for every case of one verb, computed from a database
/// snapshot and then held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseWeights {
    pub weighting: Weighting,
    bases: HashMap<String, f64>,
}

impl CaseWeights {
    pub fn compute(db: &Database, thesaurus: &Thesaurus, verb: &str, weighting: Weighting) -> Result<Self> {
        let senses = db.senses(verb).ok_or_else(|| Error::UnknownVerb(verb.to_owned()))?;
        let mut bases = HashMap::new();
        for sense in senses {
            for case in sense.frame.keys() {
                if !bases.contains_key(case) {
                    bases.insert(case.clone(), ccd_base(db, thesaurus, verb, case)?);
                }
            }
        }
        Ok(CaseWeights { weighting, bases })
    }

    pub fn from_bases(weighting: Weighting, bases: HashMap<String, f64>) -> Self {
        CaseWeights { weighting, bases }
    }

    /// Uniform weights: every case has base 1.
    pub fn uniform(weighting: Weighting) -> Self {
        CaseWeights {
            weighting,
            bases: HashMap::new(),
        }
    }

    /// A case no sense subcategorized at computation time has base 1.
    pub fn base(&self, case: &str) -> f64 {
        self.bases.get(case).copied().unwrap_or(1.0)
    }

    pub fn bases_for(&self, x: &SentenceExample) -> Vec<f64> {
        x.cases().map(|c| self.base(c)).collect()
    }
}

/// Per-complement SIM values of one sentence against one sense; `None`
/// where the sense does not subcategorize the complement's case.
pub type SimRow = Vec<Option<Sim>>;

pub fn sim_row(thesaurus: &Thesaurus, x: &SentenceExample, sense: &SenseEntry) -> Result<SimRow> {
    x.complements
        .iter()
        .map(|c| {
            sense
                .fillers(c.case())
                .map(|f| max_sim(thesaurus, c.noun(), f))
                .transpose()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interpretation {
    #[serde(rename = "sense")]
    pub sense_id: String,
    #[serde(skip)]
    pub sense_index: usize,
    pub score: f64,
    pub per_case_sim: IndexMap<String, Sim>,
}

/// Candidate senses sorted by descending score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub interpretations: Vec<Interpretation>,
    /// No sense subcategorized every input case; all senses were scored
    /// over the cases they share with the input.
    pub frame_mismatch: bool,
}

impl Ranking {
    pub fn best(&self) -> Option<&Interpretation> {
        self.interpretations.first()
    }

    pub fn s1(&self) -> f64 {
        self.interpretations.first().map_or(0.0, |i| i.score)
    }

    /// Second highest score, 0 when there is a single candidate.
    pub fn s2(&self) -> f64 {
        self.interpretations.get(1).map_or(0.0, |i| i.score)
    }

    pub fn certainty(&self, lambda: f64) -> f64 {
        crate::sampler::certainty(self.s1(), self.s2(), lambda)
    }
}

/// Whether a sense with this row survives the frame filter.
pub fn fits_frame(row: &[Option<Sim>]) -> bool {
    row.iter().all(Option::is_some)
}

/// Ranks senses from precomputed SIM rows (one per sense, in database
/// order). Shared by from-scratch scoring and the sampler's cache.
pub fn rank_rows(
    senses: &[SenseEntry],
    x: &SentenceExample,
    rows: &[SimRow],
    bases: &[f64],
    weighting: Weighting,
) -> Ranking {
    debug_assert_eq!(senses.len(), rows.len());
    let survivors: Vec<usize> = (0..rows.len()).filter(|&s| fits_frame(&rows[s])).collect();
    let frame_mismatch = survivors.is_empty();
    let candidates = if frame_mismatch {
        (0..rows.len()).collect()
    } else {
        survivors
    };
    let mut interpretations: Vec<Interpretation> = candidates
        .into_iter()
        .map(|s| Interpretation {
            sense_id: senses[s].sense_id.clone(),
            sense_index: s,
            score: weighted_score(&rows[s], bases, weighting),
            per_case_sim: x
                .complements
                .iter()
                .zip(&rows[s])
                .filter_map(|(c, sim)| sim.map(|v| (c.case().to_owned(), v)))
                .collect(),
        })
        .collect();
    interpretations.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ranking {
        interpretations,
        frame_mismatch,
    }
}

/// Scores every sense of `x.verb` with CCD computed from `db` now.
pub fn score_senses(
    x: &SentenceExample,
    db: &Database,
    thesaurus: &Thesaurus,
    weighting: Weighting,
) -> Result<Ranking> {
    let weights = CaseWeights::compute(db, thesaurus, &x.verb, weighting)?;
    score_with_weights(x, db, thesaurus, &weights)
}

/// Scores every sense of `x.verb` with the given (possibly stale) weights.
pub fn score_with_weights(
    x: &SentenceExample,
    db: &Database,
    thesaurus: &Thesaurus,
    weights: &CaseWeights,
) -> Result<Ranking> {
    x.check_shape()?;
    let senses = db.senses(&x.verb).ok_or_else(|| Error::UnknownVerb(x.verb.clone()))?;
    let rows = senses
        .iter()
        .map(|s| sim_row(thesaurus, x, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_rows(senses, x, &rows, &weights.bases_for(x), weights.weighting))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db::SenseEntry;

    /// depth-3 binary tree: w0..w7. len(w0,w1)=2, len(w0,w2)=4, len(w0,w4)=6.
    fn tree() -> Thesaurus {
        Thesaurus::complete(3, 2).unwrap()
    }

    fn set(words: &[&str]) -> FillerSet {
        words.iter().copied().collect()
    }

    fn sense(id: &str, frame: &[(&str, &[&str])]) -> SenseEntry {
        SenseEntry {
            verb: "v".into(),
            sense_id: id.into(),
            gloss: String::new(),
            frame: frame.iter().map(|(c, f)| (c.to_string(), set(f))).collect(),
        }
    }

    #[test]
    fn max_sim_cases() {
        let t = Thesaurus::complete(6, 2).unwrap();
        assert_eq!(max_sim(&t, "w3", &set(&["w9", "w3"])).unwrap(), 11);
        // w0 and w16 meet 5 levels up: len 10
        assert_eq!(t.path_length("w0", "w16"), Some(10));
        assert_eq!(max_sim(&t, "w0", &set(&["w16"])).unwrap(), 5);
        // lengths {12, 4} -> max(0, 9)
        assert_eq!(t.path_length("w0", "w32"), Some(12));
        assert_eq!(t.path_length("w0", "w2"), Some(4));
        assert_eq!(max_sim(&t, "w0", &set(&["w32", "w2"])).unwrap(), 9);
        assert!(matches!(max_sim(&t, "w0", &set(&[])), Err(Error::EmptyFillerSet)));
    }

    #[test]
    fn ccd_disjoint_identical_and_half() {
        let t = tree();
        let disjoint =
            Database::from_entries([sense("a", &[("o", &["w0", "w1"])]), sense("b", &[("o", &["w6", "w7"])])]).unwrap();
        for alpha in [0.0, 0.5, 1.0, 7.0] {
            assert_eq!(ccd(&disjoint, &t, "v", "o", alpha).unwrap(), 1.0);
        }
        let identical = Database::from_entries([
            sense("a", &[("o", &["w0", "w5", "w5"])]),
            sense("b", &[("o", &["w5", "w0", "w5"])]),
        ])
        .unwrap();
        assert_eq!(ccd(&identical, &t, "v", "o", 1.0).unwrap(), 0.0);
        assert_eq!(ccd(&identical, &t, "v", "o", 3.0).unwrap(), 0.0);
        // exactly one cross pair with sim >= 9: (w0, w2) at length 4
        let t4 = Thesaurus::complete(4, 2).unwrap();
        let half = Database::from_entries([
            sense("a", &[("o", &["w0", "w8"])]),
            sense("b", &[("o", &["w2", "w15"])]),
        ])
        .unwrap();
        let cross: Vec<Sim> = ["w0", "w8"]
            .iter()
            .flat_map(|a| ["w2", "w15"].map(|b| t4.sim(a, b)))
            .collect();
        assert_eq!(cross.iter().filter(|&&s| s >= 9).count(), 1);
        assert_eq!(ccd(&half, &t4, "v", "o", 1.0).unwrap(), 0.5);
    }

    #[test]
    fn ccd_single_sense_is_one() {
        let t = tree();
        let db = Database::from_entries([
            sense("a", &[("o", &["w0"]), ("ni", &["w1"])]),
            sense("b", &[("o", &["w0"])]),
        ])
        .unwrap();
        assert_eq!(ccd_base(&db, &t, "v", "ni").unwrap(), 1.0);
        assert_eq!(ccd_base(&db, &t, "v", "o").unwrap(), 0.0);
    }

    #[test]
    fn matching_is_one_to_one_and_order_free() {
        let t = tree();
        // w0 is similar to both w1 and w2 but may only be used once
        assert_eq!(shared_count(&t, &set(&["w0"]), &set(&["w1", "w2"])), 1);
        let a = set(&["w0", "w1", "w2", "w3"]);
        let b = set(&["w1", "w0", "w3", "w2"]);
        assert_eq!(shared_count(&t, &a, &b), 4);
        let rev: FillerSet = a.iter().rev().collect();
        assert_eq!(shared_count(&t, &rev, &b), shared_count(&t, &a, &b));
    }

    #[test]
    fn frame_filter_discards_sense_lacking_a_case() {
        let t = tree();
        let db = Database::from_entries([
            sense("s1", &[("c1", &["w0"]), ("c2", &["w1"]), ("c3", &["w2"])]),
            sense(
                "s2",
                &[("c1", &["w3"]), ("c2", &["w4"]), ("c3", &["w5"]), ("c4", &["w6"])],
            ),
            sense("s3", &[("c2", &["w1"]), ("c3", &["w2"])]),
        ])
        .unwrap();
        let x = SentenceExample::new("x", "v", [("c1", "w0"), ("c2", "w1"), ("c3", "w2")]);
        let r = score_senses(&x, &db, &t, Weighting::ArgmaxOnly).unwrap();
        assert!(!r.frame_mismatch);
        let ids: Vec<_> = r.interpretations.iter().map(|i| i.sense_id.as_str()).collect();
        assert_eq!(ids, ["s1", "s2"]);
        assert_eq!(r.s1(), 11.0);
    }

    #[test]
    fn verbatim_fillers_score_eleven() {
        let t = tree();
        let db = Database::from_entries([
            sense("a", &[("ga", &["w0"]), ("o", &["w2"])]),
            sense("b", &[("ga", &["w7"]), ("o", &["w5"])]),
        ])
        .unwrap();
        let x = SentenceExample::new("x", "v", [("ga", "w7"), ("o", "w5")]);
        for weighting in [Weighting::ArgmaxOnly, Weighting::Power { alpha: 1.0 }] {
            let r = score_senses(&x, &db, &t, weighting).unwrap();
            assert_eq!(r.best().unwrap().sense_id, "b");
            assert_eq!(r.s1(), 11.0);
        }
    }

    #[test]
    fn frame_mismatch_fallback() {
        let t = tree();
        let db = Database::from_entries([sense("a", &[("ga", &["w0"])]), sense("b", &[("o", &["w5"])])]).unwrap();
        let x = SentenceExample::new("x", "v", [("ga", "w1"), ("o", "w5")]);
        let r = score_senses(&x, &db, &t, Weighting::ArgmaxOnly).unwrap();
        assert!(r.frame_mismatch);
        assert_eq!(r.interpretations.len(), 2);
        assert_eq!(r.interpretations[0].sense_id, "b");
        assert_eq!(r.interpretations[0].per_case_sim.len(), 1);
        assert_eq!(r.s2(), 10.0);
    }

    #[test]
    fn argmax_only_uses_most_selective_case() {
        let t = tree();
        // "ga" identical across senses (base 0), "o" disjoint (base 1)
        let db = Database::from_entries([
            sense("a", &[("ga", &["w0"]), ("o", &["w2"])]),
            sense("b", &[("ga", &["w0"]), ("o", &["w6"])]),
        ])
        .unwrap();
        let x = SentenceExample::new("x", "v", [("ga", "w0"), ("o", "w7")]);
        let r = score_senses(&x, &db, &t, Weighting::ArgmaxOnly).unwrap();
        assert_eq!(r.best().unwrap().sense_id, "b");
        assert_eq!(r.s1(), 10.0);
        assert_eq!(r.s2(), t.sim("w7", "w2") as f64);
    }

    #[test]
    fn zero_weight_falls_back_to_plain_mean() {
        let row = [Some(11), Some(5)];
        assert_eq!(weighted_score(&row, &[0.0, 0.0], Weighting::Power { alpha: 1.0 }), 8.0);
        assert_eq!(weighted_score(&row, &[0.0, 0.0], Weighting::ArgmaxOnly), 8.0);
        assert_eq!(weighted_score(&row, &[0.0, 0.0], Weighting::Power { alpha: 0.0 }), 8.0);
        assert_eq!(weighted_score(&[None, None], &[1.0, 1.0], Weighting::ArgmaxOnly), 0.0);
    }

    #[test]
    fn argmax_ties_average() {
        let row = [Some(11), Some(5), Some(0)];
        assert_eq!(weighted_score(&row, &[1.0, 1.0, 0.5], Weighting::ArgmaxOnly), 8.0);
    }
}
