//! A small CART-style decision tree: exact Gini split search over integer
//! features, midpoint thresholds, and seeded averaged train/test runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

/// One tree node; splits route `value <= threshold` to the left child.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        label: u8,
        samples: [usize; 2],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// A trained binary classifier over fixed-width integer feature rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionTree {
    width: usize,
    root: Node,
}

/// Node, depth, and leaf counts; a lone leaf has depth 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub node_count: usize,
    pub depth: usize,
    pub leaf_count: usize,
}

/// Held-out performance of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub total_errors: usize,
}

impl DecisionTree {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Routes `row` to a leaf and returns its label.
    pub fn predict(&self, row: &[i64]) -> u8 {
        assert_eq!(row.len(), self.width, "row width mismatch");
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { label, .. } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if (row[*feature] as f64) <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn stats(&self) -> TreeStats {
        fn walk(node: &Node) -> (usize, usize, usize) {
            match node {
                Node::Leaf { .. } => (1, 0, 1),
                Node::Split { left, right, .. } => {
                    let (ln, ld, ll) = walk(left);
                    let (rn, rd, rl) = walk(right);
                    (ln + rn + 1, ld.max(rd) + 1, ll + rl)
                }
            }
        }
        let (node_count, depth, leaf_count) = walk(&self.root);
        TreeStats {
            node_count,
            depth,
            leaf_count,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.root).expect("trees serialize")
    }
}

/// Grows a tree by exact Gini-impurity minimisation: candidate thresholds are
/// midpoints between consecutive distinct sorted feature values, a node stops
/// when it is pure or no split strictly reduces impurity, leaves take the
/// majority label (ties go to 0), and score ties keep the lowest feature and
/// then the lowest threshold.
pub fn train_tree(x: &[Vec<i64>], y: &[u8]) -> DecisionTree {
    assert!(!x.is_empty(), "training set must be non-empty");
    assert_eq!(x.len(), y.len(), "feature/label counts differ");
    let width = x[0].len();
    assert!(x.iter().all(|r| r.len() == width), "ragged feature rows");
    assert!(y.iter().all(|&l| l <= 1), "labels must be 0 or 1");
    let order: Vec<Vec<u32>> = (0..width)
        .map(|f| {
            let mut idx: Vec<u32> = (0..x.len() as u32).collect();
            idx.sort_by_key(|&i| x[i as usize][f]);
            idx
        })
        .collect();
    let root = grow(x, y, order);
    DecisionTree { width, root }
}

fn grow(x: &[Vec<i64>], y: &[u8], order: Vec<Vec<u32>>) -> Node {
    let n = order[0].len();
    let pos = order[0].iter().filter(|&&i| y[i as usize] == 1).count();
    let neg = n - pos;
    let samples = [neg, pos];
    let majority = u8::from(pos > neg);
    if pos == 0 || neg == 0 {
        return Node::Leaf {
            label: majority,
            samples,
        };
    }
    // Scores are compared as exact fractions: a split's quality is
    //   ((pl² + ql²)·nr + (pr² + qr²)·nl) / (nl·nr),
    // larger meaning lower weighted Gini impurity.
    let mut best: Option<(u128, u128, usize, f64)> = None;
    for (f, idx) in order.iter().enumerate() {
        let mut pl = 0u128;
        let mut ql = 0u128;
        for k in 0..n - 1 {
            let i = idx[k] as usize;
            if y[i] == 1 {
                pl += 1;
            } else {
                ql += 1;
            }
            let here = x[i][f];
            let next = x[idx[k + 1] as usize][f];
            if here == next {
                continue;
            }
            let (nl, nr) = ((k + 1) as u128, (n - k - 1) as u128);
            let (pr, qr) = (pos as u128 - pl, neg as u128 - ql);
            let num = (pl * pl + ql * ql) * nr + (pr * pr + qr * qr) * nl;
            let den = nl * nr;
            if best.map_or(true, |(bn, bd, _, _)| num * bd > bn * den) {
                best = Some((num, den, f, (here as f64 + next as f64) / 2.0));
            }
        }
    }
    let parent = (pos * pos + neg * neg) as u128;
    match best {
        Some((num, den, feature, threshold)) if num * n as u128 > parent * den => {
            let split = |keep_left: bool| -> Vec<Vec<u32>> {
                order
                    .iter()
                    .map(|idx| {
                        idx.iter()
                            .copied()
                            .filter(|&i| {
                                ((x[i as usize][feature] as f64) <= threshold) == keep_left
                            })
                            .collect()
                    })
                    .collect()
            };
            let left = grow(x, y, split(true));
            let right = grow(x, y, split(false));
            Node::Split {
                feature,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
        _ => Node::Leaf {
            label: majority,
            samples,
        },
    }
}

/// Accuracy and error count of `tree` on a labeled set.
pub fn evaluate(tree: &DecisionTree, x: &[Vec<i64>], y: &[u8]) -> Evaluation {
    assert!(!x.is_empty(), "evaluation set must be non-empty");
    assert_eq!(x.len(), y.len(), "feature/label counts differ");
    let total_errors = x
        .iter()
        .zip(y)
        .filter(|(row, &label)| tree.predict(row) != label)
        .count();
    Evaluation {
        accuracy: (x.len() - total_errors) as f64 / x.len() as f64,
        total_errors,
    }
}

/// Shuffles `0..count` and splits off the first `train` indices.
pub fn train_test_split(count: usize, train: usize, rng: &mut impl Rng) -> (Vec<usize>, Vec<usize>) {
    assert!(train >= 1 && train < count, "need 1 <= train < count");
    let mut idx: Vec<usize> = (0..count).collect();
    idx.shuffle(rng);
    let test = idx.split_off(train);
    (idx, test)
}

/// Means over repeated seeded train/test runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub iterations: usize,
    pub mean_accuracy: f64,
    pub mean_errors: f64,
    pub mean_nodes: f64,
    pub mean_depth: f64,
    pub mean_leaves: f64,
}

/// Repeats shuffle → split → train → evaluate `iterations` times (stream `i`
/// of the seed drives iteration `i`) and averages the results.
pub fn averaged_experiment(
    x: &[Vec<i64>],
    y: &[u8],
    train: usize,
    iterations: usize,
    seed: u64,
) -> ExperimentSummary {
    assert!(iterations >= 1, "need at least one iteration");
    let runs: Vec<(Evaluation, TreeStats)> = (0..iterations as u64)
        .into_par_iter()
        .map(|it| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(it);
            let (tr, te) = train_test_split(x.len(), train, &mut rng);
            let tx: Vec<Vec<i64>> = tr.iter().map(|&i| x[i].clone()).collect();
            let ty: Vec<u8> = tr.iter().map(|&i| y[i]).collect();
            let ex: Vec<Vec<i64>> = te.iter().map(|&i| x[i].clone()).collect();
            let ey: Vec<u8> = te.iter().map(|&i| y[i]).collect();
            let tree = train_tree(&tx, &ty);
            (evaluate(&tree, &ex, &ey), tree.stats())
        })
        .collect();
    let k = iterations as f64;
    ExperimentSummary {
        iterations,
        mean_accuracy: runs.iter().map(|(e, _)| e.accuracy).sum::<f64>() / k,
        mean_errors: runs.iter().map(|(e, _)| e.total_errors as f64).sum::<f64>() / k,
        mean_nodes: runs.iter().map(|(_, s)| s.node_count as f64).sum::<f64>() / k,
        mean_depth: runs.iter().map(|(_, s)| s.depth as f64).sum::<f64>() / k,
        mean_leaves: runs.iter().map(|(_, s)| s.leaf_count as f64).sum::<f64>() / k,
    }
}
