//! Word taxonomy with uniform leaf depth and the path-length similarity scale.
//!
//! Every word is a leaf. Because all leaves sit at the same depth, the path
//! between two leaves climbs the same number of edges on both sides and its
//! length is always even. Similarity is a step function of that length:
//!
//! | path length | 0  | 2  | 4 | 6 | 8 | 10 | ≥ 12 |
//! |-------------|----|----|---|---|---|----|------|
//! | similarity  | 11 | 10 | 9 | 8 | 7 | 5  | 0    |

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Similarity degree between two words, one of `{0, 5, 7, 8, 9, 10, 11}`.
pub type Sim = u8;

/// Similarity of two identical words.
pub const MAX_SIM: Sim = 11;

/// Fillers at or above this similarity are treated as shared between
/// example sets when measuring case selectivity.
pub const SHARING_THRESHOLD: Sim = 9;

const SIM_BY_HALF_LENGTH: [Sim; 6] = [11, 10, 9, 8, 7, 5];

/// Maps an (even) path length onto the similarity scale.
pub fn sim_for_length(len: u32) -> Sim {
    SIM_BY_HALF_LENGTH.get((len / 2) as usize).copied().unwrap_or(0)
}

/// Index of a leaf node in a [`Thesaurus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafId(u32);

impl LeafId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A word resolved against the thesaurus once, so repeated similarity
/// lookups skip the string hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub word: String,
    pub leaf: Option<LeafId>,
}

#[derive(Debug, Clone)]
struct Node {
    id: String,
    parent: Option<u32>,
    children: Vec<u32>,
    word: Option<String>,
}

/// One line of the thesaurus file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeRecord {
    Internal { id: String, children: Vec<String> },
    Leaf { id: String, word: String },
}

#[derive(Debug, Clone)]
pub struct Thesaurus {
    nodes: Vec<Node>,
    /// Parent per node, root maps to itself; kept apart from `nodes` for
    /// the path-length hot loop.
    parents: Vec<u32>,
    root: u32,
    depth: u32,
    leaf_index: HashMap<String, LeafId>,
    unknown_sim: Sim,
}

impl Thesaurus {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: NodeRecord = serde_json::from_str(&line).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            records.push(record);
        }
        Self::from_records(records)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        Self::from_reader(text.as_bytes())
    }

    /// Builds and validates a tree. The root is the single id that no
    /// internal node lists as a child.
    pub fn from_records(records: Vec<NodeRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Thesaurus("no nodes".into()));
        }
        let mut index: HashMap<String, u32> = HashMap::with_capacity(records.len());
        let mut nodes = Vec::with_capacity(records.len());
        for record in &records {
            let (id, word) = match record {
                NodeRecord::Internal { id, .. } => (id, None),
                NodeRecord::Leaf { id, word } => (id, Some(word.clone())),
            };
            if index.insert(id.clone(), nodes.len() as u32).is_some() {
                return Err(Error::Thesaurus(format!("duplicate node id `{id}`")));
            }
            nodes.push(Node {
                id: id.clone(),
                parent: None,
                children: Vec::new(),
                word,
            });
        }

        for record in &records {
            if let NodeRecord::Internal { id, children } = record {
                if children.is_empty() {
                    return Err(Error::Thesaurus(format!("internal node `{id}` has no children")));
                }
                let parent = index[id];
                for child in children {
                    let &c = index
                        .get(child)
                        .ok_or_else(|| Error::Thesaurus(format!("`{id}` references unknown node `{child}`")))?;
                    if c == parent {
                        return Err(Error::Thesaurus(format!("`{id}` is its own child")));
                    }
                    if nodes[c as usize].parent.is_some() {
                        return Err(Error::Thesaurus(format!("node `{child}` has two parents")));
                    }
                    nodes[c as usize].parent = Some(parent);
                    nodes[parent as usize].children.push(c);
                }
            }
        }

        let roots: Vec<u32> = (0..nodes.len() as u32)
            .filter(|&i| nodes[i as usize].parent.is_none())
            .collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(Error::Thesaurus("no root (cycle)".into())),
            _ => {
                return Err(Error::Thesaurus(format!(
                    "{} unreferenced nodes; expected a single root",
                    roots.len()
                )))
            }
        };

        // Walk from the root: reaches every node iff the graph is a tree.
        let mut depth_of = vec![u32::MAX; nodes.len()];
        let mut stack = vec![(root, 0u32)];
        let mut leaf_depth: Option<u32> = None;
        let mut seen = 0usize;
        while let Some((n, d)) = stack.pop() {
            depth_of[n as usize] = d;
            seen += 1;
            let node = &nodes[n as usize];
            if node.children.is_empty() {
                if node.word.is_none() {
                    return Err(Error::Thesaurus(format!("leaf `{}` carries no word", node.id)));
                }
                match leaf_depth {
                    None => leaf_depth = Some(d),
                    Some(ld) if ld != d => {
                        return Err(Error::Thesaurus(format!(
                            "leaf `{}` at depth {d}, expected uniform depth {ld}",
                            node.id
                        )))
                    }
                    _ => {}
                }
            }
            stack.extend(node.children.iter().map(|&c| (c, d + 1)));
        }
        if seen != nodes.len() {
            return Err(Error::Thesaurus("tree is not connected (cycle detected)".into()));
        }
        let depth = leaf_depth.unwrap_or(0);
        if depth == 0 {
            return Err(Error::Thesaurus("leaf depth must be at least 1".into()));
        }

        let mut leaf_index = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if let Some(word) = &node.word {
                if leaf_index.insert(word.clone(), LeafId(i as u32)).is_some() {
                    return Err(Error::Thesaurus(format!("word `{word}` appears on two leaves")));
                }
            }
        }

        let parents = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| n.parent.unwrap_or(i as u32))
            .collect();
        Ok(Thesaurus {
            nodes,
            parents,
            root,
            depth,
            leaf_index,
            unknown_sim: 0,
        })
    }

    /// Similarity returned for a word missing from the tree against any
    /// different word. Defaults to 0.
    pub fn with_unknown_similarity(mut self, sim: Sim) -> Self {
        self.unknown_sim = sim;
        self
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn num_leaves(&self) -> usize {
        self.leaf_index.len()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.leaf_index.contains_key(word)
    }

    pub fn leaf(&self, word: &str) -> Option<LeafId> {
        self.leaf_index.get(word).copied()
    }

    pub fn word(&self, leaf: LeafId) -> &str {
        self.nodes[leaf.index()].word.as_deref().unwrap_or_default()
    }

    /// Words in file order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().filter_map(|n| n.word.as_deref())
    }

    pub fn term(&self, word: &str) -> Term {
        Term {
            word: word.to_owned(),
            leaf: self.leaf(word),
        }
    }

    /// Number of edges between two words, or `None` if either is unknown.
    pub fn path_length(&self, a: &str, b: &str) -> Option<u32> {
        Some(self.leaf_distance(self.leaf(a)?, self.leaf(b)?))
    }

    pub fn leaf_distance(&self, a: LeafId, b: LeafId) -> u32 {
        let (mut a, mut b) = (a.0, b.0);
        let mut len = 0;
        // uniform depth: both sides climb in lock step
        while a != b {
            a = self.parents[a as usize];
            b = self.parents[b as usize];
            len += 2;
        }
        len
    }

    pub fn sim(&self, a: &str, b: &str) -> Sim {
        if a == b {
            return MAX_SIM;
        }
        match self.path_length(a, b) {
            Some(len) => sim_for_length(len),
            None => self.unknown_sim,
        }
    }

    pub fn sim_terms(&self, a: &Term, b: &Term) -> Sim {
        match (a.leaf, b.leaf) {
            (Some(x), Some(y)) => sim_for_length(self.leaf_distance(x, y)),
            _ if a.word == b.word => MAX_SIM,
            _ => self.unknown_sim,
        }
    }

    pub fn records(&self) -> Vec<NodeRecord> {
        self.nodes
            .iter()
            .map(|n| match &n.word {
                Some(word) => NodeRecord::Leaf {
                    id: n.id.clone(),
                    word: word.clone(),
                },
                None => NodeRecord::Internal {
                    id: n.id.clone(),
                    children: n.children.iter().map(|&c| self.nodes[c as usize].id.clone()).collect(),
                },
            })
            .collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in self.records() {
            out.push_str(&serde_json::to_string(&record).expect("node record serializes"));
            out.push('\n');
        }
        out
    }

    /// Builds a complete tree of the given depth and branching factor.
    /// Leaves are named `w0`, `w1`, … in left-to-right order.
    pub fn complete(depth: u32, branching: u32) -> Result<Self> {
        if depth == 0 || branching == 0 {
            return Err(Error::Thesaurus("depth and branching must be positive".into()));
        }
        let mut records = Vec::new();
        let mut level: Vec<String> = vec!["n".into()];
        let mut leaf_count = 0usize;
        for d in 0..depth {
            let mut next = Vec::with_capacity(level.len() * branching as usize);
            for parent in &level {
                let children: Vec<String> = (0..branching).map(|b| format!("{parent}.{b}")).collect();
                next.extend(children.iter().cloned());
                records.push(NodeRecord::Internal {
                    id: parent.clone(),
                    children,
                });
            }
            if d + 1 == depth {
                for id in &next {
                    records.push(NodeRecord::Leaf {
                        id: id.clone(),
                        word: format!("w{leaf_count}"),
                    });
                    leaf_count += 1;
                }
            }
            level = next;
        }
        Self::from_records(records)
    }

    /// Leaves below the node reached from the root by following `path`
    /// (child positions), in left-to-right order.
    pub fn leaves_under(&self, path: &[usize]) -> Option<Vec<LeafId>> {
        let mut node = self.root;
        for &step in path {
            node = *self.nodes[node as usize].children.get(step)?;
        }
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            let children = &self.nodes[n as usize].children;
            if children.is_empty() {
                out.push(LeafId(n));
            } else {
                stack.extend(children.iter().rev());
            }
        }
        Some(out)
    }

    /// Number of children of the node reached by `path`.
    pub fn arity(&self, path: &[usize]) -> Option<usize> {
        let mut node = self.root;
        for &step in path {
            node = *self.nodes[node as usize].children.get(step)?;
        }
        Some(self.nodes[node as usize].children.len())
    }

    /// Ancestors of `leaf` up to and including the root, nearest first.
    pub fn ancestors(&self, leaf: LeafId) -> impl Iterator<Item = usize> + '_ {
        let mut cur = self.nodes[leaf.index()].parent;
        std::iter::from_fn(move || {
            let n = cur?;
            cur = self.nodes[n as usize].parent;
            Some(n as usize)
        })
    }
}
