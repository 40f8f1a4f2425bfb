//! Shared oracles for the integration and acceptance suites.
//!
//! Everything here recomputes expected values through routes that share no
//! code with the library paths under test: the mutual-information oracle
//! materializes full joint label distributions and combines plain
//! entropies, and the enumeration oracle constructs hierarchical
//! partitions recursively from set partitions instead of extending them
//! element by element.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hierinfo::genpart::random_flat_partition;
use hierinfo::hpart::{Element, HierPartition, NodeId};

/// Per-element node paths, padded so a leaf repeats down to the maximum
/// depth: `paths[e - 1][l]` is the node covering element `e` at depth `l`.
fn node_paths_padded(hp: &HierPartition) -> Vec<Vec<usize>> {
    let max_depth = hp.max_depth();
    let mut paths = vec![vec![usize::MAX; max_depth + 1]; hp.n()];
    let mut stack: Vec<(NodeId, usize)> = vec![(hp.root(), 0)];
    while let Some((id, depth)) = stack.pop() {
        for &e in hp.block(id) {
            paths[e as usize - 1][depth] = id.0;
        }
        if hp.children(id).is_empty() {
            for d in depth + 1..=max_depth {
                for &e in hp.block(id) {
                    paths[e as usize - 1][d] = id.0;
                }
            }
        } else {
            for &c in hp.children(id) {
                stack.push((c, depth + 1));
            }
        }
    }
    paths
}

/// Entropy in nats of the joint distribution of an arbitrary label tuple.
fn tuple_entropy(labels: &[Vec<usize>]) -> f64 {
    let n = labels.len();
    let mut counts: HashMap<&[usize], u64> = HashMap::new();
    for row in labels {
        *counts.entry(row.as_slice()).or_insert(0) += 1;
    }
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.ln()
        })
        .sum()
}

/// Brute-force HMI: sum over levels of the classical conditional mutual
/// information written as four joint entropies,
/// `I(X';Y'|Z) = H(X',Z) + H(Y',Z) - H(X',Y',Z) - H(Z)` with
/// `Z = (T_l, S_l)`.
pub fn oracle_hmi(t: &HierPartition, s: &HierPartition) -> f64 {
    assert_eq!(t.n(), s.n());
    let n = t.n();
    let levels = t.max_depth().max(s.max_depth());
    let pt = node_paths_padded(t);
    let ps = node_paths_padded(s);
    // Level label for an element, clamped to the leaf beyond max depth.
    let lt = |e: usize, l: usize| pt[e][l.min(t.max_depth())];
    let ls = |e: usize, l: usize| ps[e][l.min(s.max_depth())];

    let mut total = 0.0;
    for l in 0..levels {
        let gather = |take_t_next: bool, take_s_next: bool| -> Vec<Vec<usize>> {
            (0..n)
                .map(|e| {
                    let mut row = Vec::with_capacity(4);
                    if take_t_next {
                        row.push(lt(e, l + 1));
                    }
                    if take_s_next {
                        row.push(ls(e, l + 1));
                    }
                    row.push(lt(e, l));
                    row.push(ls(e, l));
                    row
                })
                .collect()
        };
        let h_tz = tuple_entropy(&gather(true, false));
        let h_sz = tuple_entropy(&gather(false, true));
        let h_tsz = tuple_entropy(&gather(true, true));
        let h_z = tuple_entropy(&gather(false, false));
        total += h_tz + h_sz - h_tsz - h_z;
    }
    total
}

pub fn oracle_hentropy(t: &HierPartition) -> f64 {
    oracle_hmi(t, t)
}

pub fn oracle_hvi(t: &HierPartition, s: &HierPartition) -> f64 {
    oracle_hentropy(t) + oracle_hentropy(s) - 2.0 * oracle_hmi(t, s)
}

/// All set partitions of `elements` by recursive insertion: the first
/// element joins each block of every partition of the rest, or starts a
/// new block.
fn set_partitions(elements: &[Element]) -> Vec<Vec<Vec<Element>>> {
    if elements.is_empty() {
        return vec![vec![]];
    }
    let first = elements[0];
    let mut out = Vec::new();
    for rest in set_partitions(&elements[1..]) {
        for i in 0..rest.len() {
            let mut extended = rest.clone();
            extended[i].push(first);
            out.push(extended);
        }
        let mut with_new = rest;
        with_new.push(vec![first]);
        out.push(with_new);
    }
    out
}

#[derive(Clone)]
enum OracleTree {
    Leaf(Vec<Element>),
    Node(Vec<OracleTree>),
}

/// All hierarchical partitions of a block: the single leaf, plus every
/// proper set partition of the block with each part replaced by each of
/// its own hierarchical partitions.
fn oracle_subtrees(block: &[Element]) -> Vec<OracleTree> {
    let mut sorted = block.to_vec();
    sorted.sort_unstable();
    let mut out = vec![OracleTree::Leaf(sorted.clone())];
    if block.len() < 2 {
        return out;
    }
    for parts in set_partitions(&sorted) {
        if parts.len() < 2 {
            continue;
        }
        let choices: Vec<Vec<OracleTree>> = parts.iter().map(|p| oracle_subtrees(p)).collect();
        let mut combos: Vec<Vec<OracleTree>> = vec![Vec::new()];
        for options in &choices {
            let mut next = Vec::new();
            for combo in &combos {
                for option in options {
                    let mut extended = combo.clone();
                    extended.push(option.clone());
                    next.push(extended);
                }
            }
            combos = next;
        }
        out.extend(combos.into_iter().map(OracleTree::Node));
    }
    out
}

fn canonical_string(tree: &OracleTree) -> String {
    match tree {
        OracleTree::Leaf(elements) => {
            let inner: Vec<String> = elements.iter().map(u32::to_string).collect();
            format!("[{}]", inner.join(","))
        }
        OracleTree::Node(children) => {
            let mut rendered: Vec<(Element, String)> = children
                .iter()
                .map(|c| (min_element(c), canonical_string(c)))
                .collect();
            rendered.sort();
            let inner: Vec<String> = rendered.into_iter().map(|(_, s)| s).collect();
            format!("[{}]", inner.join(","))
        }
    }
}

fn min_element(tree: &OracleTree) -> Element {
    match tree {
        OracleTree::Leaf(elements) => *elements.iter().min().unwrap(),
        OracleTree::Node(children) => children.iter().map(min_element).min().unwrap(),
    }
}

/// Canonical serializations of all hierarchical partitions of `{1..n}`,
/// built by the recursive-construction oracle.
pub fn oracle_enum_hier(n: usize) -> BTreeSet<String> {
    let universe: Vec<Element> = (1..=n as Element).collect();
    oracle_subtrees(&universe)
        .iter()
        .map(canonical_string)
        .collect()
}

/// Bell numbers by the binomial recurrence `B(n+1) = sum_k C(n,k) B(k)`.
pub fn bell_numbers(upto: usize) -> Vec<u64> {
    let mut bell = vec![1u64]; // B(0)
    for n in 0..upto {
        let mut next = 0u64;
        for (k, &b) in bell.iter().enumerate().take(n + 1) {
            next += binomial(n, k) * b;
        }
        bell.push(next);
    }
    bell
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut result = 1u64;
    for i in 0..k.min(n - k) {
        result = result * (n - i) as u64 / (i + 1) as u64;
    }
    result
}

/// Test-side random partition generator with multi-element leaves: splits
/// by the splitter scheme but stops whenever a drawn split is trivial, so
/// its support (unlike the library generator's) includes every
/// hierarchical partition without unary nodes. Used to exercise the
/// measures on leaf-padded, mixed-depth trees.
pub fn arb_partition(n: usize, rng: &mut ChaCha8Rng) -> HierPartition {
    use hierinfo::hpart::BlockTree;
    fn build(block: Vec<Element>, rng: &mut ChaCha8Rng) -> BlockTree {
        if block.len() == 1 {
            return BlockTree::Leaf(block);
        }
        let parts = random_flat_partition(&block, rng);
        if parts.len() == 1 {
            return BlockTree::Leaf(block);
        }
        BlockTree::Internal(parts.into_iter().map(|p| build(p, rng)).collect())
    }
    let universe: Vec<Element> = (1..=n as Element).collect();
    HierPartition::from_blocks(&build(universe, rng)).expect("generator output is valid")
}

/// Uniform choice from a slice.
pub fn pick<'a, T, R: Rng>(items: &'a [T], rng: &mut R) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}
