//! Generation of flat and hierarchical partitions: exhaustive enumeration
//! by inductive extension, and random sampling via the splitter scheme.
//!
//! The enumerators are lazy streams. Hierarchical enumeration for size `n`
//! holds the complete list for size `n - 1` plus a dedup set of canonical
//! serializations for size `n`; counts grow super-exponentially, so keep
//! `n` small.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hpart::{BlockTree, Element, HierPartition, LevelPartition};

/// All set partitions of `{1..n}` as restricted-growth membership vectors,
/// each yielded exactly once. The count is the Bell number `B(n)`.
pub fn enum_flat_partitions(n: usize) -> FlatPartitions {
    assert!(n >= 1, "universe must be non-empty");
    FlatPartitions {
        membership: vec![0; n],
        done: false,
    }
}

pub struct FlatPartitions {
    membership: Vec<u32>,
    done: bool,
}

impl Iterator for FlatPartitions {
    type Item = LevelPartition;

    fn next(&mut self) -> Option<LevelPartition> {
        if self.done {
            return None;
        }
        let result = LevelPartition::from_membership(&self.membership, 1);
        // Advance the restricted growth string: bump the rightmost position
        // that can still grow, reset everything after it.
        let n = self.membership.len();
        let mut advanced = false;
        for idx in (1..n).rev() {
            let prefix_max = self.membership[..idx].iter().copied().max().unwrap();
            if self.membership[idx] <= prefix_max {
                self.membership[idx] += 1;
                for slot in &mut self.membership[idx + 1..] {
                    *slot = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(result)
    }
}

/// All distinct hierarchical partitions of `{1..n}`, deduplicated by
/// canonical form.
///
/// Partitions of size `n` are generated from each partition of size `n - 1`
/// by three extension operations: add `n` to a leaf block, add the
/// singleton leaf `{n}` as a new child of an internal node, or replace any
/// node by a new parent holding that node and the singleton leaf `{n}`.
/// Different parents can produce the same partition, hence the dedup step.
pub fn enum_hier_partitions(n: usize) -> HierPartitions {
    assert!(n >= 1, "universe must be non-empty");
    let parents = if n == 1 {
        Vec::new()
    } else {
        enum_hier_partitions(n - 1).collect()
    };
    HierPartitions {
        n,
        parents,
        parent_idx: 0,
        pending: if n == 1 {
            VecDeque::from([HierPartition::single_leaf(1)])
        } else {
            VecDeque::new()
        },
        seen: HashSet::new(),
    }
}

pub struct HierPartitions {
    n: usize,
    parents: Vec<HierPartition>,
    parent_idx: usize,
    pending: VecDeque<HierPartition>,
    seen: HashSet<String>,
}

impl Iterator for HierPartitions {
    type Item = HierPartition;

    fn next(&mut self) -> Option<HierPartition> {
        loop {
            if let Some(next) = self.pending.pop_front() {
                return Some(next);
            }
            if self.parent_idx >= self.parents.len() {
                return None;
            }
            let parent = &self.parents[self.parent_idx];
            self.parent_idx += 1;
            let new_element = self.n as Element;
            for candidate in extend_partition(parent, new_element) {
                let key = candidate.serialize();
                if self.seen.insert(key) {
                    self.pending.push_back(candidate);
                }
            }
        }
    }
}

/// All single-node extensions of `parent` by `new_element`, in a fixed
/// deterministic order (nodes in depth-first order, operations 1/2 before 3).
fn extend_partition(parent: &HierPartition, new_element: Element) -> Vec<HierPartition> {
    let tree = parent.to_blocks();
    let mut out = Vec::new();
    let paths = tree_paths(&tree);
    for path in &paths {
        let extended = replace_at(&tree, path, &mut |node| match node {
            BlockTree::Leaf(elements) => {
                let mut elements = elements.clone();
                elements.push(new_element);
                BlockTree::Leaf(elements)
            }
            BlockTree::Internal(children) => {
                let mut children = children.clone();
                children.push(BlockTree::Leaf(vec![new_element]));
                BlockTree::Internal(children)
            }
        });
        out.push(HierPartition::from_blocks(&extended).expect("extension stays valid"));
    }
    for path in &paths {
        let wrapped = replace_at(&tree, path, &mut |node| {
            BlockTree::Internal(vec![node.clone(), BlockTree::Leaf(vec![new_element])])
        });
        out.push(HierPartition::from_blocks(&wrapped).expect("extension stays valid"));
    }
    out
}

/// Depth-first pre-order paths of every node in the tree.
fn tree_paths(tree: &BlockTree) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![(tree, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        out.push(path.clone());
        if let BlockTree::Internal(children) = node {
            for (i, child) in children.iter().enumerate().rev() {
                let mut child_path = path.clone();
                child_path.push(i);
                stack.push((child, child_path));
            }
        }
    }
    out
}

fn replace_at(
    tree: &BlockTree,
    path: &[usize],
    replace: &mut dyn FnMut(&BlockTree) -> BlockTree,
) -> BlockTree {
    if path.is_empty() {
        return replace(tree);
    }
    match tree {
        BlockTree::Internal(children) => {
            let mut children = children.clone();
            children[path[0]] = replace_at(&children[path[0]], &path[1..], replace);
            BlockTree::Internal(children)
        }
        BlockTree::Leaf(_) => unreachable!("path descends into a leaf"),
    }
}

/// One random flat partition of `block` by the splitter scheme: draw the
/// number of splitters `z` uniformly from `{0..m}`, shuffle the `m`
/// elements and `z` splitters together, cut the sequence at the splitters
/// and drop empty parts.
pub fn random_flat_partition<R: Rng + ?Sized>(block: &[Element], rng: &mut R) -> Vec<Vec<Element>> {
    assert!(!block.is_empty(), "block must be non-empty");
    let m = block.len();
    let z = rng.gen_range(0..=m);
    let mut sequence: Vec<Option<Element>> = block.iter().copied().map(Some).collect();
    sequence.extend(std::iter::repeat_n(None, z));
    sequence.shuffle(rng);

    let mut parts = Vec::new();
    let mut current = Vec::new();
    for slot in sequence {
        match slot {
            Some(e) => current.push(e),
            None => {
                if !current.is_empty() {
                    parts.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        parts.push(current);
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    parts.sort_by_key(|part| part[0]);
    parts
}

/// One random hierarchical partition of `{1..n}`: split the universe with
/// [`random_flat_partition`], re-drawing whenever the outcome is a single
/// part, and recurse into every part until only non-divisible
/// (single-element) sets remain. Every leaf is therefore a singleton and
/// no unary internal nodes occur. The sampling law is not uniform over
/// that support.
pub fn random_hier_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HierPartition {
    assert!(n >= 1, "universe must be non-empty");
    let universe: Vec<Element> = (1..=n as Element).collect();
    let tree = random_subtree(universe, rng);
    HierPartition::from_blocks(&tree).expect("generator output is valid")
}

fn random_subtree<R: Rng + ?Sized>(block: Vec<Element>, rng: &mut R) -> BlockTree {
    if block.len() == 1 {
        return BlockTree::Leaf(block);
    }
    let parts = loop {
        let parts = random_flat_partition(&block, rng);
        if parts.len() > 1 {
            break parts;
        }
    };
    BlockTree::Internal(
        parts
            .into_iter()
            .map(|part| random_subtree(part, rng))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn flat_counts_match_bell_numbers() {
        let bell = [1usize, 2, 5, 15, 52];
        for (i, &expected) in bell.iter().enumerate() {
            let n = i + 1;
            assert_eq!(enum_flat_partitions(n).count(), expected, "n = {n}");
        }
    }

    #[test]
    fn flat_extension_step() {
        // Extending {{1,2},{3}} by the element 4 must produce the three
        // partitions {{1,2,4},{3}}, {{1,2},{3,4}} and {{1,2},{3},{4}}.
        let partitions: BTreeSet<Vec<u32>> = enum_flat_partitions(4)
            .map(|p| p.membership().to_vec())
            .collect();
        for expected in [[0, 0, 1, 0], [0, 0, 1, 1], [0, 0, 1, 2]] {
            assert!(partitions.contains(expected.as_slice()), "{expected:?}");
        }
    }

    #[test]
    fn flat_partitions_are_distinct() {
        let mut seen = BTreeSet::new();
        for p in enum_flat_partitions(5) {
            assert!(seen.insert(p.membership().to_vec()));
        }
    }

    #[test]
    fn hier_counts_small_n() {
        assert_eq!(enum_hier_partitions(1).count(), 1);
        assert_eq!(enum_hier_partitions(2).count(), 2);
        assert_eq!(enum_hier_partitions(3).count(), 8);
    }

    #[test]
    fn hier_n2_exact_set() {
        let got: BTreeSet<String> = enum_hier_partitions(2).map(|p| p.serialize()).collect();
        let expected: BTreeSet<String> =
            ["[1,2]", "[[1],[2]]"].iter().map(|s| s.to_string()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn hier_n3_exact_set() {
        let got: BTreeSet<String> = enum_hier_partitions(3).map(|p| p.serialize()).collect();
        let expected: BTreeSet<String> = [
            "[1,2,3]",
            "[[1,3],[2]]",
            "[[1],[2,3]]",
            "[[1],[2],[3]]",
            "[[1,2],[3]]",
            "[[[1],[2]],[3]]",
            "[[[1],[3]],[2]]",
            "[[1],[[2],[3]]]",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn hier_partitions_valid_and_distinct() {
        let mut seen = BTreeSet::new();
        for p in enum_hier_partitions(4) {
            assert!(p.validate().is_empty());
            assert!(seen.insert(p.serialize()));
        }
    }

    #[test]
    fn splitter_parts_cover_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let block: Vec<Element> = vec![2, 4, 5, 9];
        for _ in 0..500 {
            let parts = random_flat_partition(&block, &mut rng);
            assert!(!parts.is_empty());
            assert!(parts.iter().all(|p| !p.is_empty()));
            let mut union: Vec<Element> = parts.iter().flatten().copied().collect();
            union.sort_unstable();
            assert_eq!(union, block);
        }
    }

    #[test]
    fn splitter_single_element_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let parts = random_flat_partition(&[3], &mut rng);
            assert_eq!(parts, vec![vec![3]]);
        }
    }

    #[test]
    fn random_hier_n1_is_single_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(random_hier_partition(1, &mut rng).serialize(), "[1]");
        }
    }

    #[test]
    fn random_hier_is_valid_without_unary_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let p = random_hier_partition(12, &mut rng);
            assert!(p.validate().is_empty());
            for id in p.node_ids() {
                assert_ne!(p.children(id).len(), 1, "unary node in {p}");
            }
        }
    }

    #[test]
    fn random_hier_support_at_n3() {
        // The generator recurses until all parts are singletons, so its
        // support at n = 3 is exactly the four singleton-leaf partitions.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = BTreeSet::new();
        for _ in 0..20_000 {
            seen.insert(random_hier_partition(3, &mut rng).serialize());
        }
        let expected: BTreeSet<String> = [
            "[[1],[2],[3]]",
            "[[[1],[2]],[3]]",
            "[[[1],[3]],[2]]",
            "[[1],[[2],[3]]]",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn random_hier_leaves_are_singletons() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let p = random_hier_partition(9, &mut rng);
            for id in p.node_ids() {
                if p.is_leaf(id) {
                    assert_eq!(p.block(id).len(), 1);
                }
            }
        }
    }

    #[test]
    fn random_hier_reproducible_by_seed() {
        let a: Vec<String> = {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..10)
                .map(|_| random_hier_partition(8, &mut rng).serialize())
                .collect()
        };
        let b: Vec<String> = {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..10)
                .map(|_| random_hier_partition(8, &mut rng).serialize())
                .collect()
        };
        assert_eq!(a, b);
    }
}
