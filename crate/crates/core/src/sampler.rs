//! Selective sampling: interpretation certainty, training utility, and the
//! incremental score cache.
//!
//! The corpus is split into a labeled part (already stored in the
//! database) and an unlabeled pool. For every corpus sentence the state
//! keeps, per sense, the per-case maximum similarity against the stored
//! fillers. Storing a new example under sense `s` can only raise the
//! entries of `s`, and only to the similarity against the new fillers, so a
//! commit updates the cache with one comparison per sentence instead of a
//! rescan of the database.
//!
//! CCD weights are frozen between calls to [`SamplingState::refresh_weights`].
//! Utility evaluation and per-commit cache updates both see the frozen
//! weights. The pairwise terms behind CCD are kept current on every commit,
//! so a refresh only re-averages them.
//!
//! A state may also track held-out sentences. They are scored like pool
//! sentences but can never be selected or committed.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::db::{CommitPolicy, Database, SentenceExample};
use crate::disambiguator::{
    fits_frame, rank_rows, sim_row, unshared_ratio, weighted_score, CaseWeights, Ranking, SimRow, Weighting,
};
use crate::error::{Error, Result};
use crate::thesaurus::{Term, Thesaurus};

/// Interpretation certainty from the two best scores. With a single
/// candidate pass `s2 = 0`.
pub fn certainty(s1: f64, s2: f64, lambda: f64) -> f64 {
    // = λ·s1 + (1−λ)(s1−s2)
    s1 - (1.0 - lambda) * s2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random,
    Utility,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Strategy::Random),
            "utility" => Ok(Strategy::Utility),
            other => Err(Error::Config(format!("unknown strategy `{other}`"))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Random => "random",
            Strategy::Utility => "utility",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub lambda: f64,
    /// Number of best senses averaged in the utility estimate.
    pub k: usize,
    pub batch_size: usize,
    pub weighting: Weighting,
    pub policy: CommitPolicy,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            lambda: 0.5,
            k: 1,
            batch_size: 1,
            weighting: Weighting::ArgmaxOnly,
            policy: CommitPolicy::Reject,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda {} not in [0, 1]", self.lambda)));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if let Weighting::Power { alpha } = self.weighting {
            if !(alpha >= 0.0 && alpha.is_finite()) {
                return Err(Error::Config(format!("alpha {alpha} must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

/// Unshared ratio of every sense pair subcategorizing one case.
#[derive(Debug, Clone)]
struct PairTable {
    /// Sense indices, ascending.
    members: Vec<usize>,
    /// Square matrix over `members`.
    ratios: Vec<f64>,
}

impl PairTable {
    fn build(db: &Database, thesaurus: &Thesaurus, verb: &str, case: &str) -> Self {
        let senses = db.senses(verb).expect("verb exists");
        let members: Vec<usize> = (0..senses.len())
            .filter(|&i| senses[i].fillers(case).is_some())
            .collect();
        let m = members.len();
        let mut table = PairTable {
            members,
            ratios: vec![0.0; m * m],
        };
        for i in 0..m {
            table.update_row(db, thesaurus, verb, case, i);
        }
        table
    }

    fn update_row(&mut self, db: &Database, thesaurus: &Thesaurus, verb: &str, case: &str, i: usize) {
        let senses = db.senses(verb).expect("verb exists");
        let m = self.members.len();
        let a = senses[self.members[i]].fillers(case).expect("member has case");
        for j in 0..m {
            if j == i {
                continue;
            }
            let b = senses[self.members[j]].fillers(case).expect("member has case");
            let r = unshared_ratio(thesaurus, a, b);
            self.ratios[i * m + j] = r;
            self.ratios[j * m + i] = r;
        }
    }

    /// Mean over pairs, summed in the same order as a fresh computation.
    fn base(&self) -> f64 {
        let m = self.members.len();
        if m < 2 {
            return 1.0;
        }
        let mut total = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                total += self.ratios[i * m + j];
            }
        }
        total / (m * (m - 1) / 2) as f64
    }
}

#[derive(Debug, Clone)]
struct VerbSlot {
    name: String,
    weights: CaseWeights,
    pairs: HashMap<String, PairTable>,
    members: Vec<usize>,
}

impl VerbSlot {
    fn new(db: &Database, thesaurus: &Thesaurus, verb: &str, weighting: Weighting) -> Self {
        let mut pairs = HashMap::new();
        for sense in db.senses(verb).expect("verb exists") {
            for case in sense.frame.keys() {
                if !pairs.contains_key(case) {
                    pairs.insert(case.clone(), PairTable::build(db, thesaurus, verb, case));
                }
            }
        }
        let mut slot = VerbSlot {
            name: verb.to_owned(),
            weights: CaseWeights::uniform(weighting),
            pairs,
            members: Vec::new(),
        };
        slot.weights = slot.current_weights(weighting);
        slot
    }

    fn current_weights(&self, weighting: Weighting) -> CaseWeights {
        let bases = self.pairs.iter().map(|(case, t)| (case.clone(), t.base())).collect();
        CaseWeights::from_bases(weighting, bases)
    }

    /// Brings the pair tables up to date after fillers for `cases` were
    /// stored under `sense`.
    fn on_commit<'a>(
        &mut self,
        db: &Database,
        thesaurus: &Thesaurus,
        sense: usize,
        cases: impl Iterator<Item = &'a str>,
    ) {
        for case in cases {
            let pos = self.pairs.get(case).and_then(|t| t.members.binary_search(&sense).ok());
            match pos {
                Some(i) => {
                    let t = self.pairs.get_mut(case).expect("present");
                    t.update_row(db, thesaurus, &self.name, case, i);
                }
                None => {
                    // the sense gained a case it did not subcategorize
                    let t = PairTable::build(db, thesaurus, &self.name, case);
                    self.pairs.insert(case.to_owned(), t);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct CacheEntry {
    verb: usize,
    cases: Vec<u32>,
    terms: Vec<Term>,
    /// One row per sense of the verb, database order.
    rows: Vec<SimRow>,
    /// Frozen CCD base per complement.
    bases: Vec<f64>,
    /// Score per sense; `None` when the sense is not a candidate.
    scores: Vec<Option<f64>>,
    frame_mismatch: bool,
    s1: f64,
    s2: f64,
}

/// Scores and top-two of one sentence from its rows. Must agree with
/// [`rank_rows`] exactly.
fn summarize(rows: &[SimRow], bases: &[f64], weighting: Weighting) -> (Vec<Option<f64>>, bool, f64, f64) {
    let mismatch = !rows.iter().any(|r| fits_frame(r));
    let scores: Vec<Option<f64>> = rows
        .iter()
        .map(|r| (mismatch || fits_frame(r)).then(|| weighted_score(r, bases, weighting)))
        .collect();
    let (s1, s2) = top_two(scores.iter().flatten().copied());
    (scores, mismatch, s1, s2)
}

fn top_two(scores: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut s1, mut s2) = (None::<f64>, None::<f64>);
    for s in scores {
        match s1 {
            Some(best) if s <= best => {
                if s2.is_none_or(|second| s > second) {
                    s2 = Some(s);
                }
            }
            _ => {
                s2 = s1;
                s1 = Some(s);
            }
        }
    }
    (s1.unwrap_or(0.0), s2.unwrap_or(0.0))
}

#[derive(Debug, Clone)]
pub struct SamplingState {
    thesaurus: Arc<Thesaurus>,
    db: Database,
    corpus: Vec<SentenceExample>,
    ids: HashMap<String, usize>,
    entries: Vec<CacheEntry>,
    verbs: Vec<VerbSlot>,
    in_pool: Vec<bool>,
    pool_len: usize,
    /// Sentences at or past this index are held out.
    holdout_start: usize,
    labeled: Vec<(usize, String)>,
    discarded: Vec<usize>,
    config: SamplerConfig,
}

impl SamplingState {
    /// Starts with every corpus sentence in the pool.
    pub fn new(
        thesaurus: Arc<Thesaurus>,
        db: Database,
        corpus: Vec<SentenceExample>,
        config: SamplerConfig,
    ) -> Result<Self> {
        Self::with_holdout(thesaurus, db, corpus, Vec::new(), config)
    }

    /// Like [`SamplingState::new`], additionally tracking `holdout`. Held-out
    /// sentences get indices after the corpus.
    pub fn with_holdout(
        thesaurus: Arc<Thesaurus>,
        db: Database,
        mut corpus: Vec<SentenceExample>,
        holdout: Vec<SentenceExample>,
        config: SamplerConfig,
    ) -> Result<Self> {
        config.validate()?;
        let holdout_start = corpus.len();
        corpus.extend(holdout);
        let mut ids = HashMap::with_capacity(corpus.len());
        let mut verb_index: HashMap<String, usize> = HashMap::new();
        let mut verbs: Vec<VerbSlot> = Vec::new();
        let mut case_ids: HashMap<String, u32> = HashMap::new();
        let mut entries = Vec::with_capacity(corpus.len());

        for (i, x) in corpus.iter().enumerate() {
            x.validate(&db)?;
            if ids.insert(x.id.clone(), i).is_some() {
                return Err(Error::InvalidSentence {
                    id: x.id.clone(),
                    message: "duplicate id".into(),
                });
            }
            let v = match verb_index.get(&x.verb) {
                Some(&v) => v,
                None => {
                    verbs.push(VerbSlot::new(&db, &thesaurus, &x.verb, config.weighting));
                    verb_index.insert(x.verb.clone(), verbs.len() - 1);
                    verbs.len() - 1
                }
            };
            verbs[v].members.push(i);
            let cases = x
                .cases()
                .map(|c| {
                    let n = case_ids.len() as u32;
                    *case_ids.entry(c.to_owned()).or_insert(n)
                })
                .collect();
            let rows = db
                .senses(&x.verb)
                .expect("validated")
                .iter()
                .map(|s| sim_row(&thesaurus, x, s))
                .collect::<Result<Vec<_>>>()?;
            let bases = verbs[v].weights.bases_for(x);
            let (scores, frame_mismatch, s1, s2) = summarize(&rows, &bases, config.weighting);
            entries.push(CacheEntry {
                verb: v,
                cases,
                terms: x.complements.iter().map(|c| thesaurus.term(c.noun())).collect(),
                rows,
                bases,
                scores,
                frame_mismatch,
                s1,
                s2,
            });
        }

        let n = corpus.len();
        Ok(SamplingState {
            thesaurus,
            db,
            corpus,
            ids,
            entries,
            verbs,
            in_pool: (0..n).map(|i| i < holdout_start).collect(),
            pool_len: holdout_start,
            holdout_start,
            labeled: Vec::new(),
            discarded: Vec::new(),
            config,
        })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn thesaurus(&self) -> &Thesaurus {
        &self.thesaurus
    }

    pub fn database(&self) -> &Database {
        &self.db
    }

    pub fn corpus(&self) -> &[SentenceExample] {
        &self.corpus[..self.holdout_start]
    }

    pub fn holdout(&self) -> &[SentenceExample] {
        &self.corpus[self.holdout_start..]
    }

    /// Index of the `i`-th held-out sentence.
    pub fn holdout_index(&self, i: usize) -> usize {
        self.holdout_start + i
    }

    /// Sentence at a state index (corpus or held out).
    pub fn sentence(&self, x: usize) -> &SentenceExample {
        &self.corpus[x]
    }

    /// Index of a corpus sentence by id.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.get(id).copied().filter(|&x| x < self.holdout_start)
    }

    pub fn in_pool(&self, x: usize) -> bool {
        self.in_pool.get(x).copied().unwrap_or(false)
    }

    /// Unlabeled sentences, corpus order.
    pub fn pool(&self) -> Vec<usize> {
        (0..self.holdout_start).filter(|&i| self.in_pool[i]).collect()
    }

    pub fn pool_len(&self) -> usize {
        self.pool_len
    }

    /// Committed sentences with their labels, in commit order.
    pub fn labeled(&self) -> &[(usize, String)] {
        &self.labeled
    }

    /// Frozen CCD weights for a verb.
    pub fn weights(&self, verb: &str) -> Option<&CaseWeights> {
        self.verbs.iter().find(|v| v.name == verb).map(|v| &v.weights)
    }

    pub fn s1(&self, x: usize) -> f64 {
        self.entries[x].s1
    }

    pub fn s2(&self, x: usize) -> f64 {
        self.entries[x].s2
    }

    pub fn certainty(&self, x: usize) -> f64 {
        certainty(self.entries[x].s1, self.entries[x].s2, self.config.lambda)
    }

    /// Cached per-sense scores of `x` (database sense order).
    pub fn cached_scores(&self, x: usize) -> &[Option<f64>] {
        &self.entries[x].scores
    }

    /// Index of the best candidate sense of `x`; ties go to the earlier
    /// sense, as in a ranking.
    pub fn best_sense(&self, x: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (s, score) in self.entries[x].scores.iter().enumerate() {
            if let Some(v) = *score {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((s, v));
                }
            }
        }
        best.map(|(s, _)| s)
    }

    /// Full ranking of `x` built from the cache.
    pub fn ranking(&self, x: usize) -> Ranking {
        let e = &self.entries[x];
        let sentence = &self.corpus[x];
        let senses = self.db.senses(&sentence.verb).expect("validated");
        rank_rows(senses, sentence, &e.rows, &e.bases, self.config.weighting)
    }

    /// The `k` best candidate senses of `x`.
    pub fn k_best(&self, x: usize) -> Vec<usize> {
        self.ranking(x)
            .interpretations
            .iter()
            .take(self.config.k)
            .map(|i| i.sense_index)
            .collect()
    }

    fn legal(&self, x: usize, sense: usize) -> bool {
        self.config.policy == CommitPolicy::ExtendFrame || fits_frame(&self.entries[x].rows[sense])
    }

    /// Row of `y` for `sense` after `x`'s fillers join that sense, or `None`
    /// when nothing would change.
    fn raised_row(&self, x: usize, sense: usize, y: usize) -> Option<SimRow> {
        let (ex, ey) = (&self.entries[x], &self.entries[y]);
        let old = &ey.rows[sense];
        let mut new: Option<SimRow> = None;
        for (j, case) in ey.cases.iter().enumerate() {
            let Some(i) = ex.cases.iter().position(|c| c == case) else {
                continue;
            };
            let sim = Some(self.thesaurus.sim_terms(&ex.terms[i], &ey.terms[j]));
            if sim > old[j] {
                new.get_or_insert_with(|| old.clone())[j] = sim;
            }
        }
        new
    }

    /// Certainty of `y` if its row for `sense` were `row`.
    fn certainty_with(&self, y: usize, sense: usize, row: &SimRow) -> f64 {
        let e = &self.entries[y];
        let weighting = self.config.weighting;
        if fits_frame(row) == fits_frame(&e.rows[sense]) {
            // candidate set unchanged
            if e.scores[sense].is_none() {
                return certainty(e.s1, e.s2, self.config.lambda);
            }
            let new_score = weighted_score(row, &e.bases, weighting);
            let others = e
                .scores
                .iter()
                .enumerate()
                .filter_map(|(s, v)| if s == sense { Some(new_score) } else { *v });
            let (s1, s2) = top_two(others);
            return certainty(s1, s2, self.config.lambda);
        }
        let mut rows = e.rows.clone();
        rows[sense] = row.clone();
        let (_, _, s1, s2) = summarize(&rows, &e.bases, weighting);
        certainty(s1, s2, self.config.lambda)
    }

    /// Change in the certainty of `y` if `x` were stored under `sense`,
    /// with CCD weights held fixed. Zero when the commit would be rejected
    /// or `y` belongs to another verb.
    pub fn delta_certainty(&self, x: usize, sense: usize, y: usize) -> f64 {
        if self.entries[x].verb != self.entries[y].verb || !self.legal(x, sense) {
            return 0.0;
        }
        match self.raised_row(x, sense, y) {
            None => 0.0,
            Some(row) => self.certainty_with(y, sense, &row) - self.certainty(y),
        }
    }

    /// Total certainty gain over the pool from storing `x` under `sense`.
    pub fn utility_for_sense(&self, x: usize, sense: usize) -> f64 {
        let verb = &self.verbs[self.entries[x].verb];
        verb.members
            .iter()
            .filter(|&&y| self.in_pool[y])
            .map(|&y| self.delta_certainty(x, sense, y))
            .sum()
    }

    /// Training utility of `x`: the gain averaged over its `k` best senses.
    pub fn tuf(&self, x: usize) -> f64 {
        let total: f64 = self.k_best(x).into_iter().map(|s| self.utility_for_sense(x, s)).sum();
        total / self.config.k as f64
    }

    /// Pool sentences ordered by descending utility, then ascending
    /// certainty, then corpus order.
    pub fn utility_order(&self) -> Vec<(usize, f64)> {
        let pool = self.pool();
        let mut scored: Vec<(usize, f64, f64)> =
            pool.par_iter().map(|&x| (x, self.tuf(x), self.certainty(x))).collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.2.total_cmp(&b.2)).then(a.0.cmp(&b.0)));
        scored.into_iter().map(|(x, u, _)| (x, u)).collect()
    }

    /// The next batch by maximal training utility.
    pub fn select_samples(&self) -> Result<Vec<usize>> {
        if self.pool_len == 0 {
            return Err(Error::PoolExhausted);
        }
        Ok(self
            .utility_order()
            .into_iter()
            .take(self.config.batch_size)
            .map(|(x, _)| x)
            .collect())
    }

    /// The next batch drawn uniformly without replacement.
    pub fn select_random(&self, rng: &mut impl Rng) -> Result<Vec<usize>> {
        if self.pool_len == 0 {
            return Err(Error::PoolExhausted);
        }
        let mut pool = self.pool();
        let n = self.config.batch_size.min(pool.len());
        let (chosen, _) = pool.partial_shuffle(rng, n);
        Ok(chosen.to_vec())
    }

    pub fn select(&self, strategy: Strategy, rng: &mut impl Rng) -> Result<Vec<usize>> {
        match strategy {
            Strategy::Random => self.select_random(rng),
            Strategy::Utility => self.select_samples(),
        }
    }

    /// Moves `x` from the pool to the labeled set, stores its fillers
    /// under `sense`, and raises the cached rows of that sense for every
    /// sentence of the verb. Rows of other senses are untouched.
    pub fn commit_and_update(&mut self, x: usize, sense: &str) -> Result<()> {
        if !self.in_pool(x) {
            let id = self.corpus.get(x).map_or_else(|| x.to_string(), |s| s.id.clone());
            return Err(Error::NotInPool(id));
        }
        let sentence = &self.corpus[x];
        let s = self
            .db
            .sense_index(&sentence.verb, sense)
            .ok_or_else(|| Error::UnknownSense {
                verb: sentence.verb.clone(),
                sense: sense.to_owned(),
            })?;
        self.db.commit_example(sentence, sense, self.config.policy)?;
        self.in_pool[x] = false;
        self.pool_len -= 1;
        self.labeled.push((x, sense.to_owned()));

        let v = self.entries[x].verb;
        self.verbs[v].on_commit(&self.db, &self.thesaurus, s, self.corpus[x].cases());
        let members = self.verbs[v].members.clone();
        let weighting = self.config.weighting;
        for y in members {
            if let Some(row) = self.raised_row(x, s, y) {
                let e = &mut self.entries[y];
                e.rows[s] = row;
                let (scores, mismatch, s1, s2) = summarize(&e.rows, &e.bases, weighting);
                e.scores = scores;
                e.frame_mismatch = mismatch;
                e.s1 = s1;
                e.s2 = s2;
            }
        }
        Ok(())
    }

    /// Whether storing `x` under `sense` is allowed by the commit policy.
    pub fn can_commit(&self, x: usize, sense: &str) -> bool {
        self.db.can_commit(&self.corpus[x], sense, self.config.policy)
    }

    /// Removes `x` from the pool without storing anything, e.g. when its
    /// label cannot be committed under the current policy.
    pub fn discard(&mut self, x: usize) -> Result<()> {
        if !self.in_pool(x) {
            let id = self.corpus.get(x).map_or_else(|| x.to_string(), |s| s.id.clone());
            return Err(Error::NotInPool(id));
        }
        self.in_pool[x] = false;
        self.pool_len -= 1;
        self.discarded.push(x);
        Ok(())
    }

    /// Sentences removed from the pool by [`SamplingState::discard`].
    pub fn discarded(&self) -> &[usize] {
        &self.discarded
    }

    pub fn commit_by_id(&mut self, id: &str, sense: &str) -> Result<()> {
        let x = self.index_of(id).ok_or_else(|| Error::UnknownExample(id.to_owned()))?;
        self.commit_and_update(x, sense)
    }

    /// Brings CCD up to the current database and rescores the cache.
    pub fn refresh_weights(&mut self) -> Result<()> {
        let weighting = self.config.weighting;
        for v in 0..self.verbs.len() {
            let weights = self.verbs[v].current_weights(weighting);
            for &y in &self.verbs[v].members {
                let e = &mut self.entries[y];
                e.bases = weights.bases_for(&self.corpus[y]);
                let (scores, mismatch, s1, s2) = summarize(&e.rows, &e.bases, weighting);
                e.scores = scores;
                e.frame_mismatch = mismatch;
                e.s1 = s1;
                e.s2 = s2;
            }
            self.verbs[v].weights = weights;
        }
        Ok(())
    }

    /// Commits a batch, then refreshes CCD once. Fails before touching the
    /// state if any element is invalid.
    pub fn commit_batch(&mut self, batch: &[(usize, String)]) -> Result<()> {
        let mut scratch = self.db.clone();
        for (i, (x, sense)) in batch.iter().enumerate() {
            if !self.in_pool(*x) || batch[..i].iter().any(|(p, _)| p == x) {
                let id = self.corpus.get(*x).map_or_else(|| x.to_string(), |s| s.id.clone());
                return Err(Error::NotInPool(id));
            }
            scratch.commit_example(&self.corpus[*x], sense, self.config.policy)?;
        }
        for (x, sense) in batch {
            self.commit_and_update(*x, sense)?;
        }
        self.refresh_weights()
    }

    /// Rebuilds state from a database and a list of labeled ids, e.g. when
    /// resuming a saved session. `db` must already contain the labeled
    /// fillers.
    pub fn restore(
        thesaurus: Arc<Thesaurus>,
        db: Database,
        corpus: Vec<SentenceExample>,
        labeled: Vec<(String, String)>,
        config: SamplerConfig,
    ) -> Result<Self> {
        let mut state = SamplingState::new(thesaurus, db, corpus, config)?;
        for (id, sense) in labeled {
            let x = state.index_of(&id).ok_or_else(|| Error::UnknownExample(id.clone()))?;
            if !state.in_pool[x] {
                return Err(Error::NotInPool(id));
            }
            if state.db.sense_index(&state.corpus[x].verb, &sense).is_none() {
                return Err(Error::UnknownSense {
                    verb: state.corpus[x].verb.clone(),
                    sense,
                });
            }
            state.in_pool[x] = false;
            state.pool_len -= 1;
            state.labeled.push((x, sense));
        }
        Ok(state)
    }
}
