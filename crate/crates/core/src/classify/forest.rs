//! Bagged decision forest: CART trees on bootstrap resamples with Gini splits
//! over ⌈√w⌉ random features per node, grown to purity.

use std::io::{Read, Write};

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed;

const MAGIC: &[u8; 4] = b"HGRF";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    /// Sparse class distribution, sorted by class.
    Leaf(Vec<(u32, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    /// Times each training index was drawn into this tree's bootstrap.
    bootstrap: Vec<u32>,
}

impl Tree {
    fn leaf(&self, query: &[f64]) -> &[(u32, f64)] {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if query[*feature as usize] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
                Node::Leaf(d) => return d,
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn bootstrap_counts(&self) -> &[u32] {
        &self.bootstrap
    }
}

/// Predicted class and its averaged probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionScore {
    pub class: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    n_classes: usize,
    n_features: usize,
    seed: u64,
}

/// Out-of-bag estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OobEstimate {
    pub error: f64,
    /// Samples left out of at least one tree.
    pub covered: usize,
    pub total: usize,
}

/// Argmax of a distribution, smallest class on ties.
fn argmax(dist: &[f64]) -> PredictionScore {
    let mut best = PredictionScore {
        class: 0,
        score: f64::NEG_INFINITY,
    };
    for (c, &p) in dist.iter().enumerate() {
        if p > best.score {
            best = PredictionScore { class: c, score: p };
        }
    }
    best
}

pub fn train_forest(rows: &[Vec<f64>], labels: &[usize], n_trees: usize, seed: u64) -> Result<Forest> {
    if rows.is_empty() {
        return Err(Error::invalid("cannot train a forest on an empty dataset"));
    }
    if rows.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if n_trees == 0 {
        return Err(Error::invalid("a forest needs at least one tree"));
    }
    let w = rows[0].len();
    if w == 0 || rows.iter().any(|r| r.len() != w) {
        return Err(Error::invalid("rows must be non-empty and of equal length"));
    }
    let n_classes = labels.iter().max().expect("non-empty") + 1;
    let trees = (0..n_trees)
        .into_par_iter()
        .map(|t| grow_tree(rows, labels, n_classes, seed::derive(seed, t as u64)))
        .collect();
    Ok(Forest {
        trees,
        n_classes,
        n_features: w,
        seed,
    })
}

/// Features tried per split.
pub fn features_per_split(w: usize) -> usize {
    let mut m = (w as f64).sqrt().ceil() as usize;
    while m * m < w {
        m += 1;
    }
    while m > 1 && (m - 1) * (m - 1) >= w {
        m -= 1;
    }
    m.clamp(1, w)
}

fn grow_tree(rows: &[Vec<f64>], labels: &[usize], n_classes: usize, tree_seed: u64) -> Tree {
    let mut rng = seed::rng(tree_seed);
    let n = rows.len();
    let mut bootstrap = vec![0u32; n];
    let mut drawn = Vec::with_capacity(n);
    for _ in 0..n {
        let i = rng.random_range(0..n);
        bootstrap[i] += 1;
        drawn.push(i);
    }
    drawn.sort_unstable();

    let w = rows[0].len();
    let mtry = features_per_split(w);
    let mut nodes: Vec<Node> = Vec::new();
    // (node slot, sample indices)
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, drawn)];
    nodes.push(Node::Leaf(Vec::new()));
    let mut counts = vec![0usize; n_classes];
    while let Some((slot, idx)) = stack.pop() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &i in &idx {
            counts[labels[i]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let split = if pure || idx.len() < 2 {
            None
        } else {
            let feats = sample(&mut rng, w, mtry);
            best_split(rows, labels, &idx, feats.iter(), n_classes)
        };
        match split {
            Some((feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| rows[i][feature] <= threshold);
                let (li, ri) = (nodes.len(), nodes.len() + 1);
                nodes.push(Node::Leaf(Vec::new()));
                nodes.push(Node::Leaf(Vec::new()));
                nodes[slot] = Node::Split {
                    feature: feature as u32,
                    threshold,
                    left: li as u32,
                    right: ri as u32,
                };
                stack.push((ri, r));
                stack.push((li, l));
            }
            None => {
                let total = idx.len() as f64;
                let dist = counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(k, &c)| (k as u32, c as f64 / total))
                    .collect();
                nodes[slot] = Node::Leaf(dist);
            }
        }
    }
    Tree { nodes, bootstrap }
}

/// Lowest weighted Gini impurity over the given features; the first candidate
/// wins ties. None when every candidate feature is constant on `idx`.
fn best_split(
    rows: &[Vec<f64>],
    labels: &[usize],
    idx: &[usize],
    feats: impl Iterator<Item = usize>,
    n_classes: usize,
) -> Option<(usize, f64)> {
    let n = idx.len();
    let mut total = vec![0usize; n_classes];
    for &i in idx {
        total[labels[i]] += 1;
    }
    let total_sq: usize = total.iter().map(|c| c * c).sum();
    let mut order = idx.to_vec();
    let mut left = vec![0usize; n_classes];
    let mut best: Option<(f64, usize, f64)> = None;
    for f in feats {
        order.sort_by(|&a, &b| rows[a][f].total_cmp(&rows[b][f]).then(a.cmp(&b)));
        left.iter_mut().for_each(|c| *c = 0);
        let (mut lsq, mut rsq) = (0usize, total_sq);
        for k in 0..n - 1 {
            let c = labels[order[k]];
            // moving one sample of class c from right to left
            lsq += 2 * left[c] + 1;
            rsq -= 2 * (total[c] - left[c]) - 1;
            left[c] += 1;
            let (a, b) = (rows[order[k]][f], rows[order[k + 1]][f]);
            if a >= b {
                continue;
            }
            let (nl, nr) = ((k + 1) as f64, (n - k - 1) as f64);
            // n·(weighted Gini) up to a constant
            let score = -(lsq as f64 / nl) - (rsq as f64 / nr);
            if best.is_none_or(|(s, _, _)| score < s) {
                let mut t = a + (b - a) / 2.0;
                if t >= b {
                    t = a;
                }
                best = Some((score, f, t));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

impl Forest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// The forest made of the first `n` trees. Tree t only depends on the seed
    /// and t, so this equals a forest trained with `n` trees.
    pub fn truncated(&self, n: usize) -> Result<Forest> {
        if n == 0 || n > self.trees.len() {
            return Err(Error::invalid(format!("cannot keep {n} of {} trees", self.trees.len())));
        }
        Ok(Forest {
            trees: self.trees[..n].to_vec(),
            ..self.clone_header()
        })
    }

    fn clone_header(&self) -> Forest {
        Forest {
            trees: Vec::new(),
            n_classes: self.n_classes,
            n_features: self.n_features,
            seed: self.seed,
        }
    }

    fn check_dim(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.n_features {
            return Err(Error::invalid(format!(
                "query has {} values, forest expects {}",
                query.len(),
                self.n_features
            )));
        }
        Ok(())
    }

    fn accumulate<'a>(&self, trees: impl Iterator<Item = &'a Tree>, query: &[f64], dist: &mut [f64]) -> usize {
        let mut used = 0;
        for t in trees {
            for &(c, p) in t.leaf(query) {
                dist[c as usize] += p;
            }
            used += 1;
        }
        used
    }

    /// Class probabilities averaged over all trees.
    pub fn distribution(&self, query: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(query)?;
        let mut dist = vec![0.0; self.n_classes];
        let used = self.accumulate(self.trees.iter(), query, &mut dist);
        dist.iter_mut().for_each(|p| *p /= used as f64);
        Ok(dist)
    }

    pub fn predict(&self, query: &[f64]) -> Result<PredictionScore> {
        Ok(argmax(&self.distribution(query)?))
    }

    /// Misclassified fraction among training samples, each predicted only by
    /// the trees whose bootstrap left it out.
    pub fn oob_error(&self, rows: &[Vec<f64>], labels: &[usize]) -> Result<OobEstimate> {
        let n = self.trees[0].bootstrap.len();
        if rows.len() != n || labels.len() != n {
            return Err(Error::invalid(format!(
                "forest was trained on {n} samples, got {}",
                rows.len()
            )));
        }
        let mut wrong = 0usize;
        let mut covered = 0usize;
        let mut dist = vec![0.0; self.n_classes];
        for (i, (r, &l)) in rows.iter().zip(labels).enumerate() {
            self.check_dim(r)?;
            dist.iter_mut().for_each(|p| *p = 0.0);
            let used = self.accumulate(self.trees.iter().filter(|t| t.bootstrap[i] == 0), r, &mut dist);
            if used == 0 {
                continue;
            }
            covered += 1;
            if argmax(&dist).class != l {
                wrong += 1;
            }
        }
        Ok(OobEstimate {
            error: if covered == 0 {
                0.0
            } else {
                wrong as f64 / covered as f64
            },
            covered,
            total: n,
        })
    }

    /// Flat little-endian binary encoding.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n_classes as u32).to_le_bytes());
        buf.extend_from_slice(&(self.n_features as u32).to_le_bytes());
        buf.extend_from_slice(&self.seed.to_le_bytes());
        buf.extend_from_slice(&(self.trees.len() as u32).to_le_bytes());
        for t in &self.trees {
            buf.extend_from_slice(&(t.bootstrap.len() as u32).to_le_bytes());
            for c in &t.bootstrap {
                buf.extend_from_slice(&c.to_le_bytes());
            }
            buf.extend_from_slice(&(t.nodes.len() as u32).to_le_bytes());
            for node in &t.nodes {
                match node {
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        buf.push(0);
                        buf.extend_from_slice(&feature.to_le_bytes());
                        buf.extend_from_slice(&threshold.to_bits().to_le_bytes());
                        buf.extend_from_slice(&left.to_le_bytes());
                        buf.extend_from_slice(&right.to_le_bytes());
                    }
                    Node::Leaf(d) => {
                        buf.push(1);
                        buf.extend_from_slice(&(d.len() as u32).to_le_bytes());
                        for (c, p) in d {
                            buf.extend_from_slice(&c.to_le_bytes());
                            buf.extend_from_slice(&p.to_bits().to_le_bytes());
                        }
                    }
                }
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Forest> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        let mut cur = Cursor { buf: &buf, at: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::Format("not a forest file".into()));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported forest version {version}")));
        }
        let n_classes = cur.u32()? as usize;
        let n_features = cur.u32()? as usize;
        let seed = cur.u64()?;
        let n_trees = cur.u32()? as usize;
        if n_trees == 0 || n_classes == 0 || n_features == 0 {
            return Err(Error::Format("empty forest header".into()));
        }
        let mut trees = Vec::with_capacity(n_trees.min(1 << 16));
        for _ in 0..n_trees {
            let n = cur.u32()? as usize;
            let bootstrap = (0..n).map(|_| cur.u32()).collect::<Result<Vec<_>>>()?;
            let n_nodes = cur.u32()? as usize;
            let mut nodes = Vec::with_capacity(n_nodes.min(1 << 20));
            for _ in 0..n_nodes {
                let node = match cur.take(1)?[0] {
                    0 => {
                        let feature = cur.u32()?;
                        let threshold = f64::from_bits(cur.u64()?);
                        let (left, right) = (cur.u32()?, cur.u32()?);
                        if feature as usize >= n_features || left as usize >= n_nodes || right as usize >= n_nodes {
                            return Err(Error::Format("split node out of range".into()));
                        }
                        Node::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        }
                    }
                    1 => {
                        let m = cur.u32()? as usize;
                        let d = (0..m)
                            .map(|_| {
                                let c = cur.u32()?;
                                if c as usize >= n_classes {
                                    return Err(Error::Format("leaf class out of range".into()));
                                }
                                Ok((c, f64::from_bits(cur.u64()?)))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Node::Leaf(d)
                    }
                    t => return Err(Error::Format(format!("unknown node tag {t}"))),
                };
                nodes.push(node);
            }
            // children always follow their parent, which rules out cycles
            for (i, node) in nodes.iter().enumerate() {
                if let Node::Split { left, right, .. } = node {
                    if *left as usize <= i || *right as usize <= i {
                        return Err(Error::Format("split child precedes its parent".into()));
                    }
                }
            }
            if nodes.is_empty() {
                return Err(Error::Format("tree without nodes".into()));
            }
            trees.push(Tree { nodes, bootstrap });
        }
        if cur.at != buf.len() {
            return Err(Error::Format("trailing bytes after forest".into()));
        }
        Ok(Forest {
            trees,
            n_classes,
            n_features,
            seed,
        })
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Format("truncated forest file".into()))?;
        let s = &self.buf[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
