//! Synthetic benchmark generation: a complete tree thesaurus, seed
//! entries, and gold-labeled sentences drawn from per-sense filler
//! clusters.
//!
//! Each (sense, case) owns a cluster: a subtree whose root sits
//! `cluster_spread` levels above the leaves. Within a cluster, sentence
//! fillers concentrate in a few child subtrees ("modes") while seed fillers
//! are spread uniformly, so the seeds cover the modes only partially. With
//! probability `overlap` (scaled down for later cases) a sense reuses the
//! cluster of an earlier sense of the same verb, which makes that case less
//! selective.

use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::db::{Complement, Database, FillerSet, SenseEntry, SentenceExample};
use crate::error::{Error, Result};
use crate::thesaurus::{LeafId, Thesaurus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerbShape {
    #[serde(default)]
    pub name: Option<String>,
    pub senses: usize,
    pub sentences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub verbs: Vec<VerbShape>,
    #[serde(default = "default_cases")]
    pub cases: Vec<String>,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_branching")]
    pub branching: u32,
    /// Height of a cluster's subtree above the leaves.
    #[serde(default = "default_spread")]
    pub cluster_spread: u32,
    /// Probability that a sense shares the first case's cluster with an
    /// earlier sense. Case `j` of `n` uses `overlap * (n - j) / n`.
    #[serde(default = "default_overlap")]
    pub overlap: f64,
    #[serde(default = "default_seed_fillers")]
    pub seed_fillers_per_case: f64,
    /// Number of child subtrees sentence fillers are drawn from.
    #[serde(default = "default_modes")]
    pub modes_per_cluster: usize,
    /// Probability that a sentence carries each case (at least one is kept).
    #[serde(default = "default_presence")]
    pub case_presence: f64,
    /// Zipf exponent of the sense frequency distribution.
    #[serde(default = "default_skew")]
    pub sense_skew: f64,
    /// Zipf exponent of word frequencies inside a mode; 0 is uniform.
    #[serde(default = "default_skew")]
    pub word_skew: f64,

    #[serde(default)]
    pub rng_seed: u64,
}

fn default_cases() -> Vec<String> {
    vec!["ga".into(), "o".into()]
}
fn default_depth() -> u32 {
    6
}
fn default_branching() -> u32 {
    4
}
fn default_spread() -> u32 {
    3
}
fn default_overlap() -> f64 {
    0.5
}
fn default_seed_fillers() -> f64 {
    3.7
}
fn default_modes() -> usize {
    3
}
fn default_presence() -> f64 {
    0.9
}
fn default_skew() -> f64 {
    1.0
}

/// (sentences, senses) per verb for a ten-verb benchmark of about a
/// thousand sentences.
pub const TEN_VERB_SHAPE: [(usize, usize); 10] = [
    (136, 4),
    (160, 29),
    (167, 5),
    (126, 10),
    (108, 8),
    (126, 15),
    (84, 29),
    (90, 2),
    (60, 5),
    (54, 2),
];

impl GeneratorSpec {
    /// Ten verbs shaped like a small real corpus: 1111 sentences, between
    /// 2 and 29 senses per verb.
    pub fn ten_verb_benchmark(rng_seed: u64) -> Self {
        GeneratorSpec {
            verbs: TEN_VERB_SHAPE
                .iter()
                .enumerate()
                .map(|(i, &(sentences, senses))| VerbShape {
                    name: Some(format!("v{i:02}")),
                    senses,
                    sentences,
                })
                .collect(),
            rng_seed,
            ..GeneratorSpec::with_verbs(Vec::new())
        }
    }

    pub fn with_verbs(verbs: Vec<VerbShape>) -> Self {
        GeneratorSpec {
            verbs,
            cases: default_cases(),
            depth: default_depth(),
            branching: default_branching(),
            cluster_spread: default_spread(),
            overlap: default_overlap(),
            seed_fillers_per_case: default_seed_fillers(),
            modes_per_cluster: default_modes(),
            case_presence: default_presence(),
            sense_skew: default_skew(),
            word_skew: default_skew(),
            rng_seed: 0,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.verbs.is_empty() {
            return bad("no verbs".into());
        }
        if self.cases.is_empty() {
            return bad("no cases".into());
        }
        if self.cluster_spread == 0 || self.cluster_spread > self.depth {
            return bad(format!(
                "cluster_spread {} must be in 1..={}",
                self.cluster_spread, self.depth
            ));
        }
        if !(0.0..=1.0).contains(&self.overlap) || !(0.0..=1.0).contains(&self.case_presence) {
            return bad("overlap and case_presence must be probabilities".into());
        }
        if !(self.sense_skew >= 0.0 && self.word_skew >= 0.0) {
            return bad("skew exponents must be non-negative".into());
        }
        if !(self.seed_fillers_per_case >= 1.0) {
            return bad("seed_fillers_per_case must be at least 1".into());
        }
        if self.modes_per_cluster == 0 || self.modes_per_cluster > self.branching as usize {
            return bad(format!("modes_per_cluster must be in 1..={}", self.branching));
        }
        let slots = (self.branching as u64).checked_pow(self.depth - self.cluster_spread);
        let leaves = (self.branching as u64).checked_pow(self.depth);
        if leaves.is_none_or(|l| l > 5_000_000) {
            return bad("tree too large".into());
        }
        for (i, v) in self.verbs.iter().enumerate() {
            if v.senses == 0 {
                return bad(format!("verb {i} has no senses"));
            }
            if slots.is_some_and(|s| (v.senses as u64) > s) {
                return bad(format!(
                    "verb {i}: {} senses need distinct clusters but the tree has only {} cluster slots",
                    v.senses,
                    slots.unwrap_or(0)
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub thesaurus: Thesaurus,
    pub seeds: Database,
    pub corpus: Vec<SentenceExample>,
}

impl SyntheticData {
    /// Writes `thesaurus.jsonl`, `seeds.jsonl`, and `corpus.jsonl`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, text: String| {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(path, e))
        };
        write("thesaurus.jsonl", self.thesaurus.to_jsonl())?;
        write("seeds.jsonl", self.seeds.to_jsonl())?;
        write("corpus.jsonl", crate::corpus::to_jsonl(&self.corpus))
    }
}

/// A cluster: path from the root to its subtree, plus the chosen modes
/// (child positions) and their weights.
#[derive(Debug, Clone)]
struct Cluster {
    path: Vec<usize>,
    mode_weights: Vec<f64>,
    /// Leaves of each mode, most frequent first.
    mode_leaves: Vec<Vec<LeafId>>,
}

fn zipf(n: usize, exponent: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| 1.0 / (r as f64).powf(exponent))).expect("positive weights")
}

fn path_of(mut slot: u64, level: u32, branching: u32) -> Vec<usize> {
    let mut path = vec![0; level as usize];
    for p in path.iter_mut().rev() {
        *p = (slot % branching as u64) as usize;
        slot /= branching as u64;
    }
    path
}

pub fn generate_synthetic(spec: &GeneratorSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let thesaurus = Thesaurus::complete(spec.depth, spec.branching)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let level = spec.depth - spec.cluster_spread;
    let slots = (spec.branching as u64).pow(level);
    let n_cases = spec.cases.len();

    let mut entries = Vec::new();
    let mut corpus = Vec::new();

    for (vi, shape) in spec.verbs.iter().enumerate() {
        let verb = shape.name.clone().unwrap_or_else(|| format!("v{vi:02}"));

        // clusters[case][sense]
        let mut clusters: Vec<Vec<Cluster>> = Vec::with_capacity(n_cases);
        for j in 0..n_cases {
            let overlap = spec.overlap * (n_cases - j) as f64 / n_cases as f64;
            let fresh: Vec<u64> = rand::seq::index::sample(&mut rng, slots as usize, shape.senses)
                .into_iter()
                .map(|s| s as u64)
                .collect();
            let mut per_sense: Vec<Cluster> = Vec::with_capacity(shape.senses);
            for s in 0..shape.senses {
                let path = if s > 0 && rng.gen_bool(overlap) {
                    per_sense[rng.gen_range(0..s)].path.clone()
                } else {
                    path_of(fresh[s], level, spec.branching)
                };
                let arity = spec.branching as usize;
                let modes = rand::seq::index::sample(&mut rng, arity, spec.modes_per_cluster).into_vec();
                let mode_weights = (0..modes.len()).map(|m| 1.0 / (m + 1) as f64).collect();
                let mode_leaves = modes
                    .iter()
                    .map(|&m| {
                        let mut p = path.clone();
                        p.push(m);
                        let mut leaves = thesaurus.leaves_under(&p).expect("mode within tree");
                        leaves.shuffle(&mut rng);
                        leaves
                    })
                    .collect();
                per_sense.push(Cluster {
                    path,
                    mode_weights,
                    mode_leaves,
                });
            }
            clusters.push(per_sense);
        }

        let mode_size = (spec.branching as usize).pow(spec.cluster_spread - 1);
        let pick_rank = zipf(mode_size, spec.word_skew);
        let typical = |cluster: &Cluster, rng: &mut ChaCha8Rng| {
            let mode = WeightedIndex::new(&cluster.mode_weights)
                .expect("positive weights")
                .sample(rng);
            cluster.mode_leaves[mode][pick_rank.sample(rng)]
        };

        let whole_fraction = spec.seed_fillers_per_case.fract();
        let whole = spec.seed_fillers_per_case.trunc() as usize;
        for s in 0..shape.senses {
            let mut frame = indexmap::IndexMap::new();
            for (j, case) in spec.cases.iter().enumerate() {
                let leaves = thesaurus
                    .leaves_under(&clusters[j][s].path)
                    .expect("cluster path within tree");
                let count = whole + usize::from(rng.gen_bool(whole_fraction));
                let fillers: FillerSet = (0..count)
                    .map(|_| thesaurus.word(*leaves.choose(&mut rng).unwrap()).to_owned())
                    .collect();
                frame.insert(case.clone(), fillers);
            }
            entries.push(SenseEntry {
                verb: verb.clone(),
                sense_id: format!("s{s}"),
                gloss: String::new(),
                frame,
            });
        }

        let sense_weights: Vec<f64> = (0..shape.senses)
            .map(|i| 1.0 / ((i + 1) as f64).powf(spec.sense_skew))
            .collect();
        let pick_sense = WeightedIndex::new(&sense_weights).expect("positive weights");
        for n in 0..shape.sentences {
            let s = pick_sense.sample(&mut rng);
            let mut present: Vec<usize> = (0..n_cases).filter(|_| rng.gen_bool(spec.case_presence)).collect();
            if present.is_empty() {
                present.push(rng.gen_range(0..n_cases));
            }
            let complements = present
                .into_iter()
                .map(|j| {
                    let leaf = typical(&clusters[j][s], &mut rng);
                    Complement::new(spec.cases[j].clone(), thesaurus.word(leaf))
                })
                .collect();
            corpus.push(SentenceExample {
                id: format!("{verb}-{n:03}"),
                verb: verb.clone(),
                complements,
                gold: Some(format!("s{s}")),
            });
        }
    }

    let seeds = Database::from_entries(entries)?;
    Ok(SyntheticData {
        thesaurus,
        seeds,
        corpus,
    })
}
