//! Independent reference implementations used as test oracles. Nothing
//! here calls into the scoring code under test except where a test
//! explicitly wants a clone-and-rescore reference.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use verbsense::thesaurus::NodeRecord;
use verbsense::{Database, SentenceExample, Thesaurus, Weighting};

pub fn table_sim(len: u32) -> u8 {
    match len {
        0 => 11,
        2 => 10,
        4 => 9,
        6 => 8,
        8 => 7,
        10 => 5,
        l if l >= 12 => 0,
        odd => panic!("odd path length {odd} in a uniform-depth tree"),
    }
}

/// Undirected adjacency over node ids plus the word of every leaf.
pub struct Graph {
    adj: HashMap<String, Vec<String>>,
    leaf_of: HashMap<String, String>,
}

impl Graph {
    pub fn new(records: &[NodeRecord]) -> Self {
        let mut adj: HashMap<String, Vec<String>> = HashMap::new();
        let mut leaf_of = HashMap::new();
        for r in records {
            match r {
                NodeRecord::Internal { id, children } => {
                    for c in children {
                        adj.entry(id.clone()).or_default().push(c.clone());
                        adj.entry(c.clone()).or_default().push(id.clone());
                    }
                }
                NodeRecord::Leaf { id, word } => {
                    leaf_of.insert(word.clone(), id.clone());
                }
            }
        }
        Graph { adj, leaf_of }
    }

    pub fn words(&self) -> Vec<String> {
        let mut w: Vec<String> = self.leaf_of.keys().cloned().collect();
        w.sort();
        w
    }

    /// BFS distances from one word's leaf to every node.
    pub fn distances_from(&self, word: &str) -> HashMap<String, u32> {
        let start = &self.leaf_of[word];
        let mut dist = HashMap::from([(start.clone(), 0u32)]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(n) = queue.pop_front() {
            let d = dist[&n];
            for m in self.adj.get(&n).into_iter().flatten() {
                if !dist.contains_key(m) {
                    dist.insert(m.clone(), d + 1);
                    queue.push_back(m.clone());
                }
            }
        }
        dist
    }

    pub fn leaf(&self, word: &str) -> &str {
        &self.leaf_of[word]
    }

    pub fn path_len(&self, a: &str, b: &str) -> u32 {
        self.distances_from(a)[&self.leaf_of[b]]
    }
}

/// All-pairs similarity from BFS path lengths.
pub struct OracleSim {
    sims: HashMap<(String, String), u8>,
}

impl OracleSim {
    pub fn new(thesaurus: &Thesaurus) -> Self {
        let g = Graph::new(&thesaurus.records());
        let words = g.words();
        let mut sims = HashMap::new();
        for a in &words {
            let d = g.distances_from(a);
            for b in &words {
                sims.insert((a.clone(), b.clone()), table_sim(d[&g.leaf_of[b]]));
            }
        }
        OracleSim { sims }
    }

    pub fn sim(&self, a: &str, b: &str) -> u8 {
        if a == b {
            return 11;
        }
        self.sims.get(&(a.to_owned(), b.to_owned())).copied().unwrap_or(0)
    }
}

/// Greedy one-to-one sharing count over sorted fillers.
pub fn oracle_shared(osim: &OracleSim, a: &[String], b: &[String]) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    let mut candidates = Vec::new();
    for i in 0..a.len() {
        for j in 0..b.len() {
            let s = osim.sim(&a[i], &b[j]);
            if s >= 9 {
                candidates.push((s, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut taken_a = vec![false; a.len()];
    let mut taken_b = vec![false; b.len()];
    let mut n = 0;
    for (_, i, j) in candidates {
        if !taken_a[i] && !taken_b[j] {
            taken_a[i] = true;
            taken_b[j] = true;
            n += 1;
        }
    }
    n
}

pub fn oracle_ccd_base(osim: &OracleSim, db: &Database, verb: &str, case: &str) -> f64 {
    let sets: Vec<Vec<String>> = db
        .senses(verb)
        .unwrap()
        .iter()
        .filter_map(|s| s.frame.get(case))
        .map(|f| f.0.clone())
        .collect();
    if sets.len() < 2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut pairs = 0.0;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let size = (sets[i].len() + sets[j].len()) as f64;
            let shared = oracle_shared(osim, &sets[i], &sets[j]) as f64;
            sum += (size - 2.0 * shared) / size;
            pairs += 1.0;
        }
    }
    sum / pairs
}

/// Straight-line ranking: (sense id, score) sorted by descending score,
/// ties in database order, plus whether the frame filter emptied the set.
pub fn oracle_rank(
    osim: &OracleSim,
    db: &Database,
    x: &SentenceExample,
    weighting: Weighting,
) -> (Vec<(String, f64)>, bool) {
    let senses = db.senses(&x.verb).unwrap();
    let fits = |frame: &indexmap::IndexMap<String, verbsense::FillerSet>| {
        x.complements.iter().all(|c| frame.contains_key(&c.0))
    };
    let mismatch = !senses.iter().any(|s| fits(&s.frame));
    let bases: HashMap<&str, f64> = x
        .complements
        .iter()
        .map(|c| (c.0.as_str(), oracle_ccd_base(osim, db, &x.verb, &c.0)))
        .collect();

    let mut out = Vec::new();
    for sense in senses {
        if !mismatch && !fits(&sense.frame) {
            continue;
        }
        // (sim, base) for every complement the sense subcategorizes
        let mut known: Vec<(f64, f64)> = Vec::new();
        for c in &x.complements {
            if let Some(fillers) = sense.frame.get(&c.0) {
                let best = fillers.0.iter().map(|f| osim.sim(&c.1, f)).max().unwrap();
                known.push((best as f64, bases[c.0.as_str()]));
            }
        }
        let score = if known.is_empty() {
            0.0
        } else {
            let weights: Vec<f64> = match weighting {
                Weighting::Power { alpha } => known.iter().map(|k| k.1.powf(alpha)).collect(),
                Weighting::ArgmaxOnly => {
                    let top = known.iter().map(|k| k.1).fold(f64::MIN, f64::max);
                    known.iter().map(|k| if k.1 == top { 1.0 } else { 0.0 }).collect()
                }
            };
            let den: f64 = weights.iter().sum();
            if den > 0.0 {
                known.iter().zip(&weights).map(|(k, w)| k.0 * w).sum::<f64>() / den
            } else {
                known.iter().map(|k| k.0).sum::<f64>() / known.len() as f64
            }
        };
        out.push((sense.sense_id.clone(), score));
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    (out, mismatch)
}

/// A tree with exactly `leaves` leaves at uniform depth `depth`, random
/// branching. Words are `t0..` in shuffled order.
pub fn random_tree(rng: &mut impl Rng, leaves: usize, depth: usize) -> Vec<NodeRecord> {
    // node counts per level, root first, strictly non-increasing upward
    let mut counts = vec![1usize];
    let mut inner: Vec<usize> = (0..depth - 1).map(|_| rng.gen_range(1..=leaves)).collect();
    inner.sort();
    counts.extend(inner);
    counts.push(leaves);

    let mut records = Vec::new();
    let mut words: Vec<usize> = (0..leaves).collect();
    words.shuffle(rng);
    for (i, w) in words.iter().enumerate() {
        records.push(NodeRecord::Leaf {
            id: format!("L{depth}.{i}"),
            word: format!("t{w}"),
        });
    }
    for level in (0..depth).rev() {
        let parents = counts[level];
        let children = counts[level + 1];
        // split children into `parents` non-empty consecutive runs
        let mut cuts: Vec<usize> = (1..children).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(parents - 1).collect();
        cuts.sort();
        cuts.insert(0, 0);
        cuts.push(children);
        for p in 0..parents {
            let id = if level == 0 {
                "root".to_string()
            } else {
                format!("L{level}.{p}")
            };
            records.push(NodeRecord::Internal {
                id,
                children: (cuts[p]..cuts[p + 1]).map(|c| format!("L{}.{c}", level + 1)).collect(),
            });
        }
    }
    records
}

/// A small random instance: synthetic data whose seed frames randomly
/// lose cases (so the frame filter and its fallback both fire) and whose
/// sentences occasionally carry words missing from the thesaurus.
pub fn random_instance(seed: u64, sentences: usize) -> (Thesaurus, Database, Vec<SentenceExample>) {
    use verbsense::synth::{generate_synthetic, GeneratorSpec, VerbShape};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let spec = GeneratorSpec {
        cases: vec!["ga".into(), "o".into(), "ni".into()],
        depth: 4,
        branching: 3,
        cluster_spread: 2,
        overlap: rng.gen_range(0.0..1.0),
        case_presence: 0.7,
        rng_seed: seed,
        ..GeneratorSpec::with_verbs(vec![
            VerbShape {
                name: Some("va".into()),
                senses: rng.gen_range(1..6),
                sentences: sentences * 2 / 3,
            },
            VerbShape {
                name: Some("vb".into()),
                senses: rng.gen_range(1..4),
                sentences: sentences - sentences * 2 / 3,
            },
        ])
    };
    let data = generate_synthetic(&spec).unwrap();
    let entries = data.seeds.entries().cloned().map(|mut e| {
        if e.frame.len() > 1 && rng.gen_bool(0.3) {
            let i = rng.gen_range(0..e.frame.len());
            e.frame.shift_remove_index(i);
        }
        e
    });
    let db = Database::from_entries(entries.collect::<Vec<_>>()).unwrap();
    let mut corpus = data.corpus;
    for x in &mut corpus {
        if rng.gen_bool(0.05) {
            x.complements[0].1 = "unlisted".into();
        }
    }
    (data.thesaurus, db, corpus)
}
