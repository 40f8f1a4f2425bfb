//! Hierarchical clustering of boolean feature data with missing values.
//!
//! A dataset of rows over boolean features (with `?` marking unspecified
//! cells) is expanded into the ensemble of all `2^m` completions; each
//! completion is clustered by size-weighted average linkage (UPGMA) under
//! the Manhattan distance, the dendrogram is converted to a hierarchical
//! partition by discarding the merge heights (collapsing degenerate equal
//! heights into multi-way splits), and the ensemble member minimizing the
//! average HVI to the others is selected as the central partition. The
//! central completion is a parsimonious inference of the missing values.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hpart::{BlockTree, Element, HierPartition, NodeId};
use crate::infotheory::{hvi, vertex_hmi_terms};

/// Collapse tolerance for equal merge heights. Boolean Manhattan distances
/// and UPGMA averages are exact dyadic rationals at small n, so this only
/// guards float noise.
pub const DEFAULT_HEIGHT_TOL: f64 = 1e-9;

/// Guard on the number of missing cells a completion ensemble may expand.
pub const MAX_MISSING_CELLS: usize = 20;

/// A labelled boolean feature matrix; `None` marks a missing cell.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    labels: Vec<String>,
    columns: Vec<String>,
    values: Vec<Vec<Option<u8>>>,
}

impl FeatureMatrix {
    pub fn new(
        labels: Vec<String>,
        columns: Vec<String>,
        values: Vec<Vec<Option<u8>>>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Validation("dataset has no rows".into()));
        }
        if labels.len() != values.len() {
            return Err(Error::Validation("labels and rows differ in length".into()));
        }
        let width = columns.len();
        if values.iter().any(|row| row.len() != width) {
            return Err(Error::Validation("dataset is not rectangular".into()));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(FeatureMatrix {
            labels,
            columns,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn label(&self, row: usize) -> &str {
        &self.labels[row]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column(&self, col: usize) -> &str {
        &self.columns[col]
    }

    pub fn value(&self, row: usize, col: usize) -> Option<u8> {
        self.values[row][col]
    }

    /// Missing cells in row-major order; this fixed order defines the
    /// truth-table index of each completion.
    pub fn missing_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in self.values.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if cell.is_none() {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|row| row.iter().all(Option::is_some))
    }
}

/// Reads a dataset: CSV with a header, first column row labels, remaining
/// cells `0`, `1` or `?`.
pub fn load_dataset(path: &Path) -> Result<FeatureMatrix> {
    let file = std::fs::File::open(path)?;
    read_dataset(file)
}

pub fn read_dataset<R: Read>(reader: R) -> Result<FeatureMatrix> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv_reader.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::Validation(
            "dataset needs a label column and at least one feature column".into(),
        ));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let record = record?;
        let row_no = idx + 1;
        if record.len() != header.len() {
            return Err(Error::DatasetParse {
                row: row_no,
                col: record.len(),
                msg: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        labels.push(record[0].to_string());
        let mut row = Vec::with_capacity(columns.len());
        for (col, cell) in record.iter().skip(1).enumerate() {
            let parsed = match cell {
                "0" => Some(0),
                "1" => Some(1),
                "?" => None,
                other => {
                    return Err(Error::DatasetParse {
                        row: row_no,
                        col: col + 1,
                        msg: format!("expected 0, 1 or ?, found {other:?}"),
                    })
                }
            };
            row.push(parsed);
        }
        values.push(row);
    }
    FeatureMatrix::new(labels, columns, values)
}

/// The values a completion assigns to the missing cells, as the binary
/// digits of its truth-table index (first missing cell = most significant
/// bit, bit 0 = value 0).
pub fn truth_table_bits(index: u64, m: usize) -> Vec<bool> {
    (0..m).map(|j| index >> (m - 1 - j) & 1 == 1).collect()
}

/// All `2^m` completions of the matrix, in truth-table order.
pub fn completions(fm: &FeatureMatrix) -> Result<Completions> {
    let cells = fm.missing_cells();
    if cells.len() > MAX_MISSING_CELLS {
        return Err(Error::TooManyMissing {
            found: cells.len(),
            limit: MAX_MISSING_CELLS,
        });
    }
    Ok(Completions {
        base: fm.clone(),
        cells,
        next: 0,
    })
}

pub struct Completions {
    base: FeatureMatrix,
    cells: Vec<(usize, usize)>,
    next: u64,
}

impl Completions {
    pub fn total(&self) -> u64 {
        1u64 << self.cells.len()
    }
}

impl Iterator for Completions {
    type Item = FeatureMatrix;

    fn next(&mut self) -> Option<FeatureMatrix> {
        if self.next >= self.total() {
            return None;
        }
        let bits = truth_table_bits(self.next, self.cells.len());
        self.next += 1;
        let mut fm = self.base.clone();
        for (&(r, c), &bit) in self.cells.iter().zip(&bits) {
            fm.values[r][c] = Some(bit as u8);
        }
        Some(fm)
    }
}

/// Manhattan distance between two rows of a complete matrix.
pub fn manhattan(fm: &FeatureMatrix, i: usize, j: usize) -> Result<f64> {
    if !fm.is_complete() {
        return Err(Error::IncompleteMatrix);
    }
    let mut total = 0.0;
    for c in 0..fm.n_cols() {
        let a = fm.values[i][c].unwrap() as f64;
        let b = fm.values[j][c].unwrap() as f64;
        total += (a - b).abs();
    }
    Ok(total)
}

/// One agglomerative merge: `left` and `right` are cluster ids (rows are
/// `0..n`, the cluster created by merge `i` is `n + i`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

/// A sequence of agglomerative merges with non-decreasing heights.
#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub n_leaves: usize,
}

/// Size-weighted average-linkage (UPGMA) clustering under the distances of
/// the complete matrix. At every step the minimum-distance active pair is
/// merged, ties broken by the lexicographically smallest (id, id) pair;
/// the distance from the merged cluster A∪B to C is
/// `(|A| d(A,C) + |B| d(B,C)) / (|A| + |B|)`.
pub fn average_linkage(fm: &FeatureMatrix) -> Result<Dendrogram> {
    if !fm.is_complete() {
        return Err(Error::IncompleteMatrix);
    }
    let n = fm.n_rows();
    let total = 2 * n - 1;
    let mut dist = vec![vec![0.0f64; total]; total];
    for i in 0..n {
        for j in i + 1..n {
            let d = manhattan(fm, i, j)?;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut sizes = vec![0usize; total];
    sizes[..n].fill(1);
    // Kept in ascending id order; new ids are always larger, so a linear
    // scan finds the lexicographically smallest tie.
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize)> = None;
        for (ai, &a) in active.iter().enumerate() {
            for &b in &active[ai + 1..] {
                let d = dist[a][b];
                if best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, a, b));
                }
            }
        }
        let (height, a, b) = best.expect("at least two active clusters");
        let new_id = n + step;
        for &c in &active {
            if c == a || c == b {
                continue;
            }
            let d = (sizes[a] as f64 * dist[a][c] + sizes[b] as f64 * dist[b][c])
                / (sizes[a] + sizes[b]) as f64;
            dist[new_id][c] = d;
            dist[c][new_id] = d;
        }
        sizes[new_id] = sizes[a] + sizes[b];
        active.retain(|&c| c != a && c != b);
        active.push(new_id);
        merges.push(Merge {
            left: a,
            right: b,
            height,
        });
    }
    debug_assert!(merges.windows(2).all(|w| w[0].height <= w[1].height + 1e-12));
    Ok(Dendrogram {
        merges,
        n_leaves: n,
    })
}

enum HeightTree {
    Leaf(Element),
    Node(Vec<HeightTree>, f64),
}

/// Converts a dendrogram to a hierarchical partition over the elements
/// `1..=n_leaves` (row `i` becomes element `i + 1`). Merge heights are
/// discarded; a parent and child merge whose heights differ by at most
/// `tol` are collapsed into a single multi-child node, which is how
/// degenerate splitting distances produce non-binary partitions.
pub fn dendro_to_hpart(d: &Dendrogram, tol: f64) -> HierPartition {
    let n = d.n_leaves;
    if n == 1 {
        return HierPartition::single_leaf(1);
    }
    let mut slots: Vec<Option<HeightTree>> = (0..2 * n - 1).map(|_| None).collect();
    for (i, slot) in slots.iter_mut().take(n).enumerate() {
        *slot = Some(HeightTree::Leaf(i as Element + 1));
    }
    for (step, merge) in d.merges.iter().enumerate() {
        let left = slots[merge.left].take().expect("cluster merged once");
        let right = slots[merge.right].take().expect("cluster merged once");
        slots[n + step] = Some(HeightTree::Node(vec![left, right], merge.height));
    }
    let root = slots[2 * n - 2].take().expect("root remains");
    let tree = collapse(root, tol);
    HierPartition::from_blocks(&tree).expect("dendrogram yields a valid partition")
}

fn collapse(node: HeightTree, tol: f64) -> BlockTree {
    match node {
        HeightTree::Leaf(e) => BlockTree::Leaf(vec![e]),
        HeightTree::Node(children, height) => {
            let mut parts = Vec::new();
            let mut queue: std::collections::VecDeque<HeightTree> = children.into();
            while let Some(child) = queue.pop_front() {
                match child {
                    HeightTree::Node(grandchildren, child_height)
                        if (height - child_height).abs() <= tol =>
                    {
                        for g in grandchildren.into_iter().rev() {
                            queue.push_front(g);
                        }
                    }
                    other => parts.push(collapse(other, tol)),
                }
            }
            BlockTree::Internal(parts)
        }
    }
}

/// One ensemble member: the completion (as truth-table bits over the
/// missing cells) and the hierarchical partition it clusters into.
#[derive(Clone, Debug)]
pub struct EnsembleMember {
    pub completion_bits: Vec<bool>,
    pub partition: HierPartition,
}

/// The clustering ensemble over all completions of a matrix. Duplicate
/// partitions across completions are retained; eccentricity weights by
/// multiplicity.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub members: Vec<EnsembleMember>,
}

pub fn build_ensemble(fm: &FeatureMatrix) -> Result<Ensemble> {
    build_ensemble_with(fm, DEFAULT_HEIGHT_TOL)
}

pub fn build_ensemble_with(fm: &FeatureMatrix, tol: f64) -> Result<Ensemble> {
    let m = fm.missing_cells().len();
    let mut members = Vec::new();
    for (index, completion) in completions(fm)?.enumerate() {
        let dendrogram = average_linkage(&completion)?;
        let partition = dendro_to_hpart(&dendrogram, tol);
        members.push(EnsembleMember {
            completion_bits: truth_table_bits(index as u64, m),
            partition,
        });
    }
    Ok(Ensemble { members })
}

/// Eccentricity of each member: its average HVI to all members (the zero
/// self-term included in the average).
pub fn eccentricity(e: &Ensemble) -> Vec<f64> {
    let len = e.members.len();
    assert!(len > 0, "ensemble must be non-empty");
    let mut sums = vec![0.0; len];
    for i in 0..len {
        for j in i + 1..len {
            let v = hvi(&e.members[i].partition, &e.members[j].partition)
                .expect("ensemble members share the universe")
                .total;
            sums[i] += v;
            sums[j] += v;
        }
    }
    sums.iter().map(|s| s / len as f64).collect()
}

/// Index of the member minimizing the eccentricity; ties go to the lowest
/// completion index.
pub fn central(e: &Ensemble) -> usize {
    let ecc = eccentricity(e);
    let mut best = 0;
    for (i, &c) in ecc.iter().enumerate() {
        if c < ecc[best] {
            best = i;
        }
    }
    best
}

/// Statistics of the recursive HMI terms matched to one node of the
/// central partition, pooled over all members and all overlapping
/// same-depth vertices.
#[derive(Clone, Debug)]
pub struct NodeStats {
    pub node: NodeId,
    pub depth: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
    /// `stddev / mean`, omitted when the mean is zero.
    pub cv: Option<f64>,
    pub samples: usize,
}

/// Per-vertex statistics of `I(central^t; member^s)` over the ensemble.
pub fn vertex_stats(central: &HierPartition, e: &Ensemble) -> Result<Vec<NodeStats>> {
    let mut pools: Vec<Vec<f64>> = vec![Vec::new(); central.num_nodes()];
    for member in &e.members {
        for term in vertex_hmi_terms(central, &member.partition)? {
            pools[term.t.0].push(term.value);
        }
    }
    let mut out = Vec::with_capacity(central.num_nodes());
    for id in central.node_ids() {
        let values = &pools[id.0];
        let count = values.len();
        let mean = if count == 0 {
            0.0
        } else {
            values.iter().sum::<f64>() / count as f64
        };
        let var = if count == 0 {
            0.0
        } else {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64
        };
        let stddev = var.sqrt();
        out.push(NodeStats {
            node: id,
            depth: central.depth(id),
            mean,
            stddev,
            cv: if mean > 0.0 { Some(stddev / mean) } else { None },
            samples: count,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpart::Permutation;

    fn matrix(rows: &[(&str, &[Option<u8>])]) -> FeatureMatrix {
        let labels = rows.iter().map(|(l, _)| l.to_string()).collect();
        let width = rows[0].1.len();
        let columns = (0..width).map(|c| format!("f{c}")).collect();
        let values = rows.iter().map(|(_, v)| v.to_vec()).collect();
        FeatureMatrix::new(labels, columns, values).unwrap()
    }

    #[test]
    fn read_dataset_with_missing_cell() {
        let csv = "name,a,b\nx,0,1\ny,1,?\nz,0,0\n";
        let fm = read_dataset(csv.as_bytes()).unwrap();
        assert_eq!(fm.n_rows(), 3);
        assert_eq!(fm.n_cols(), 2);
        assert_eq!(fm.missing_cells(), vec![(1, 1)]);
    }

    #[test]
    fn read_dataset_rejects_bad_value() {
        let csv = "name,a\nx,2\n";
        assert!(matches!(
            read_dataset(csv.as_bytes()),
            Err(Error::DatasetParse { row: 1, col: 1, .. })
        ));
    }

    #[test]
    fn read_dataset_rejects_duplicate_label() {
        let csv = "name,a\nx,0\nx,1\n";
        assert!(matches!(
            read_dataset(csv.as_bytes()),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn completions_counts() {
        let complete = matrix(&[("x", &[Some(0)]), ("y", &[Some(1)])]);
        assert_eq!(completions(&complete).unwrap().count(), 1);

        let one_missing = matrix(&[("x", &[None]), ("y", &[Some(1)])]);
        let both: Vec<FeatureMatrix> = completions(&one_missing).unwrap().collect();
        assert_eq!(both.len(), 2);
        assert_eq!(both[0].value(0, 0), Some(0));
        assert_eq!(both[1].value(0, 0), Some(1));
    }

    #[test]
    fn completions_truth_table_order() {
        let fm = matrix(&[("x", &[None, None]), ("y", &[Some(1), Some(1)])]);
        let values: Vec<(u8, u8)> = completions(&fm)
            .unwrap()
            .map(|c| (c.value(0, 0).unwrap(), c.value(0, 1).unwrap()))
            .collect();
        // First missing cell is the most significant bit.
        assert_eq!(values, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn manhattan_examples() {
        let fm = matrix(&[
            ("x", &[Some(0), Some(0), Some(1)]),
            ("y", &[Some(0), Some(1), Some(0)]),
            ("z", &[Some(1), Some(1), Some(1)]),
            ("w", &[Some(0), Some(0), Some(1)]),
        ]);
        assert_eq!(manhattan(&fm, 0, 3).unwrap(), 0.0);
        assert_eq!(manhattan(&fm, 0, 1).unwrap(), 2.0);
        let all_ones = matrix(&[
            ("x", &[Some(1), Some(1), Some(1)]),
            ("y", &[Some(0), Some(0), Some(0)]),
        ]);
        assert_eq!(manhattan(&all_ones, 0, 1).unwrap(), 3.0);
    }

    #[test]
    fn manhattan_requires_complete_matrix() {
        let fm = matrix(&[("x", &[None]), ("y", &[Some(1)])]);
        assert!(matches!(manhattan(&fm, 0, 1), Err(Error::IncompleteMatrix)));
    }

    #[test]
    fn average_linkage_hand_trace() {
        // a = (0,0), b = (0,1), c = (1,1): d(a,b) = d(b,c) = 1, d(a,c) = 2.
        // The (a,b) tie wins lexicographically, then d({a,b},c) = 1.5.
        let fm = matrix(&[
            ("a", &[Some(0), Some(0)]),
            ("b", &[Some(0), Some(1)]),
            ("c", &[Some(1), Some(1)]),
        ]);
        let d = average_linkage(&fm).unwrap();
        assert_eq!(d.merges.len(), 2);
        assert_eq!((d.merges[0].left, d.merges[0].right), (0, 1));
        assert_eq!(d.merges[0].height, 1.0);
        assert_eq!((d.merges[1].left, d.merges[1].right), (2, 3));
        assert_eq!(d.merges[1].height, 1.5);
    }

    #[test]
    fn average_linkage_identical_rows_merge_at_zero() {
        let fm = matrix(&[
            ("a", &[Some(0), Some(0)]),
            ("b", &[Some(0), Some(0)]),
            ("c", &[Some(1), Some(1)]),
        ]);
        let d = average_linkage(&fm).unwrap();
        assert_eq!(d.merges[0].height, 0.0);
        assert!(d.merges[1].height > 0.0);
    }

    #[test]
    fn degenerate_heights_collapse_to_ternary_root() {
        // Three rows with all pairwise Manhattan distances equal to 2:
        // both merges happen at height 2 and collapse into one root.
        let fm = matrix(&[
            ("a", &[Some(0), Some(0), Some(1)]),
            ("b", &[Some(0), Some(1), Some(0)]),
            ("c", &[Some(1), Some(0), Some(0)]),
        ]);
        let d = average_linkage(&fm).unwrap();
        assert_eq!(d.merges[0].height, 2.0);
        assert_eq!(d.merges[1].height, 2.0);
        let hp = dendro_to_hpart(&d, DEFAULT_HEIGHT_TOL);
        assert_eq!(hp.serialize(), "[[1],[2],[3]]");
    }

    #[test]
    fn distinct_heights_stay_binary() {
        let fm = matrix(&[
            ("a", &[Some(0), Some(0)]),
            ("b", &[Some(0), Some(1)]),
            ("c", &[Some(1), Some(1)]),
        ]);
        let d = average_linkage(&fm).unwrap();
        let hp = dendro_to_hpart(&d, DEFAULT_HEIGHT_TOL);
        assert_eq!(hp.serialize(), "[[[1],[2]],[3]]");
        assert!(hp.validate().is_empty());
    }

    #[test]
    fn collapse_respects_tolerance() {
        let d = Dendrogram {
            merges: vec![
                Merge {
                    left: 0,
                    right: 1,
                    height: 1.0,
                },
                Merge {
                    left: 2,
                    right: 3,
                    height: 1.0 + 1e-12,
                },
            ],
            n_leaves: 3,
        };
        let hp = dendro_to_hpart(&d, DEFAULT_HEIGHT_TOL);
        assert_eq!(hp.serialize(), "[[1],[2],[3]]");
    }

    #[test]
    fn ensemble_and_eccentricity() {
        let fm = matrix(&[
            ("a", &[Some(0), Some(0)]),
            ("b", &[Some(0), None]),
            ("c", &[Some(1), Some(1)]),
        ]);
        let ensemble = build_ensemble(&fm).unwrap();
        assert_eq!(ensemble.members.len(), 2);
        for member in &ensemble.members {
            assert!(member.partition.validate().is_empty());
        }
        let ecc = eccentricity(&ensemble);
        assert_eq!(ecc.len(), 2);
        let v = hvi(
            &ensemble.members[0].partition,
            &ensemble.members[1].partition,
        )
        .unwrap()
        .total;
        assert!((ecc[0] - v / 2.0).abs() < 1e-12);
        assert!((ecc[1] - v / 2.0).abs() < 1e-12);
    }

    #[test]
    fn eccentricity_weights_duplicates() {
        let t = HierPartition::parse("[[[1],[2]],[3]]").unwrap();
        let s = HierPartition::parse("[[1],[2],[3]]").unwrap();
        let v = hvi(&t, &s).unwrap().total;
        let member = |p: &HierPartition| EnsembleMember {
            completion_bits: vec![],
            partition: p.clone(),
        };
        let e = Ensemble {
            members: vec![member(&t), member(&t), member(&s)],
        };
        let ecc = eccentricity(&e);
        assert!((ecc[0] - v / 3.0).abs() < 1e-12);
        assert!((ecc[1] - v / 3.0).abs() < 1e-12);
        assert!((ecc[2] - 2.0 * v / 3.0).abs() < 1e-12);
        assert_eq!(central(&e), 0);
    }

    #[test]
    fn central_of_singleton_is_zero() {
        let e = Ensemble {
            members: vec![EnsembleMember {
                completion_bits: vec![],
                partition: HierPartition::parse("[[1],[2]]").unwrap(),
            }],
        };
        assert_eq!(central(&e), 0);
    }

    #[test]
    fn vertex_stats_self_ensemble() {
        let p = HierPartition::parse("[[[1],[2]],[3]]").unwrap();
        let e = Ensemble {
            members: vec![EnsembleMember {
                completion_bits: vec![],
                partition: p.clone(),
            }],
        };
        let stats = vertex_stats(&p, &e).unwrap();
        assert_eq!(stats.len(), p.num_nodes());
        let root = stats.iter().find(|s| s.node == p.root()).unwrap();
        let h = crate::infotheory::hentropy(&p);
        assert!((root.mean - h).abs() < 1e-12);
        assert_eq!(root.stddev, 0.0);
        for s in &stats {
            if p.is_leaf(s.node) {
                assert_eq!(s.mean, 0.0);
                assert!(s.cv.is_none());
            }
        }
    }

    #[test]
    fn vertex_stats_root_mean_over_members() {
        let a = HierPartition::parse("[[[1],[2]],[3]]").unwrap();
        let b = HierPartition::parse("[[1],[2],[3]]").unwrap();
        let member = |p: &HierPartition| EnsembleMember {
            completion_bits: vec![],
            partition: p.clone(),
        };
        let e = Ensemble {
            members: vec![member(&a), member(&b)],
        };
        let stats = vertex_stats(&a, &e).unwrap();
        let root = stats.iter().find(|s| s.node == a.root()).unwrap();
        let i_aa = crate::infotheory::hmi_recursive(&a, &a).unwrap();
        let i_ab = crate::infotheory::hmi_recursive(&a, &b).unwrap();
        assert!((root.mean - 0.5 * (i_aa + i_ab)).abs() < 1e-12);
    }

    #[test]
    fn pipeline_invariant_under_row_permutation() {
        // Distinct distances, so the merge structure is tie-free; permuting
        // the input rows must give the same partition after relabeling.
        let fm = matrix(&[
            ("a", &[Some(0), Some(0), Some(0), Some(0)]),
            ("b", &[Some(0), Some(0), Some(0), Some(1)]),
            ("c", &[Some(1), Some(1), Some(0), Some(0)]),
            ("d", &[Some(1), Some(1), Some(1), Some(1)]),
        ]);
        let direct = dendro_to_hpart(&average_linkage(&fm).unwrap(), DEFAULT_HEIGHT_TOL);

        // Rows rotated by one: new row i holds old row (i + 1) mod 4.
        let rotated = matrix(&[
            ("b", &[Some(0), Some(0), Some(0), Some(1)]),
            ("c", &[Some(1), Some(1), Some(0), Some(0)]),
            ("d", &[Some(1), Some(1), Some(1), Some(1)]),
            ("a", &[Some(0), Some(0), Some(0), Some(0)]),
        ]);
        let permuted = dendro_to_hpart(&average_linkage(&rotated).unwrap(), DEFAULT_HEIGHT_TOL);
        // Original row r sits at rotated position r - 1 (mod 4), so the
        // original element e maps to ((e - 2) mod 4) + 1.
        let relabel = Permutation::new(vec![4, 1, 2, 3]).unwrap();
        assert_eq!(direct.apply_permutation(&relabel).unwrap(), permuted);
    }
}
