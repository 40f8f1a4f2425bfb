//! Hierarchical partitions: representation, parsing, validation, level
//! projection and the permutation action.
//!
//! A hierarchical partition of the universe `{1..n}` is a rooted tree in
//! which every node owns a block of elements, the root owns the whole
//! universe, and the children of an internal node split its block into
//! disjoint non-empty parts. The text format is nested bracket notation:
//! `[[[1,2],[3]],[4]]` is a root with two children, the first of which is
//! split again into the leaves `{1,2}` and `{3}`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A universe element. Elements are dense 1-based integers `1..=n`;
/// external labels are mapped to this range at ingestion and never enter
/// the core types.
pub type Element = u32;

/// Index of a node inside a [`HierPartition`] arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug)]
struct Node {
    children: Vec<NodeId>,
    /// Sorted ascending, never empty.
    block: Vec<Element>,
    depth: usize,
}

/// A hierarchical partition of `{1..n}`.
///
/// Values are immutable after construction; all operations are pure
/// functions, so sharing across threads needs no synchronization.
#[derive(Clone, Debug)]
pub struct HierPartition {
    nodes: Vec<Node>,
    root: NodeId,
    n: usize,
}

/// Recursive block structure used to build partitions programmatically.
#[derive(Clone, Debug)]
pub enum BlockTree {
    Leaf(Vec<Element>),
    Internal(Vec<BlockTree>),
}

/// The flat partition induced at a given depth, as a membership vector.
///
/// Block ids are contiguous `0..k` in order of first appearance when the
/// elements are scanned in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPartition {
    membership: Vec<u32>,
    depth: usize,
}

/// A bijection on `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<Element>,
}

/// A single invariant violation found by [`HierPartition::validate`].
#[derive(Clone, Debug)]
pub struct Violation {
    pub node: NodeId,
    pub condition: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: {}", self.node.0, self.condition)
    }
}

impl HierPartition {
    /// The partition whose root is a single leaf owning all of `{1..n}`.
    pub fn single_leaf(n: usize) -> Self {
        assert!(n >= 1, "universe must be non-empty");
        HierPartition {
            nodes: vec![Node {
                children: Vec::new(),
                block: (1..=n as Element).collect(),
                depth: 0,
            }],
            root: NodeId(0),
            n,
        }
    }

    /// Builds a partition from a recursive block structure, inferring the
    /// universe size from the largest element and checking all invariants.
    pub fn from_blocks(tree: &BlockTree) -> Result<Self> {
        let mut nodes = Vec::new();
        build_nodes(tree, 0, &mut nodes)?;
        let root = NodeId(0);

        // Coverage: the root block must be exactly 1..=n with no repeats.
        let root_block = &nodes[root.0].block;
        let mut seen = BTreeSet::new();
        for &e in root_block {
            if e == 0 {
                return Err(Error::Validation("element 0 is out of range".into()));
            }
            if !seen.insert(e) {
                return Err(Error::Validation(format!("element {e} appears twice")));
            }
        }
        let n = *root_block.last().expect("non-empty root") as usize;
        for e in 1..=n as Element {
            if !seen.contains(&e) {
                return Err(Error::Validation(format!("element {e} is missing")));
            }
        }

        Ok(HierPartition { nodes, root, n })
    }

    /// Parses bracket notation. Whitespace is ignored; leaves are
    /// comma-separated integer lists.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cursor = Cursor::new(text);
        let tree = cursor.parse_node()?;
        cursor.skip_ws();
        if !cursor.at_end() {
            return Err(cursor.syntax("trailing input after partition"));
        }
        Self::from_blocks(&tree)
    }

    /// Universe size `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// All node ids, in depth-first pre-order of construction.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    /// The block owned by a node, sorted ascending.
    pub fn block(&self, id: NodeId) -> &[Element] {
        &self.nodes[id.0].block
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id.0].depth
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.0].children.is_empty()
    }

    /// Maximum leaf depth `L`.
    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|v| v.depth).max().unwrap_or(0)
    }

    /// Checks every structural invariant and returns the violations found
    /// (empty means the partition is valid).
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let expected_root: Vec<Element> = (1..=self.n as Element).collect();
        if self.nodes[self.root.0].block != expected_root {
            out.push(Violation {
                node: self.root,
                condition: "root block is not the full universe".into(),
            });
        }
        if self.nodes[self.root.0].depth != 0 {
            out.push(Violation {
                node: self.root,
                condition: "root depth is not 0".into(),
            });
        }
        for id in self.node_ids() {
            let node = &self.nodes[id.0];
            if node.block.is_empty() {
                out.push(Violation {
                    node: id,
                    condition: "empty block".into(),
                });
                continue;
            }
            if node.block.windows(2).any(|w| w[0] >= w[1]) {
                out.push(Violation {
                    node: id,
                    condition: "block is not sorted strictly ascending".into(),
                });
            }
            if node.children.is_empty() {
                continue;
            }
            for &c in &node.children {
                if self.nodes[c.0].depth != node.depth + 1 {
                    out.push(Violation {
                        node: c,
                        condition: "depth is not parent depth + 1".into(),
                    });
                }
            }
            // Children must partition the block: disjoint (i) and covering (ii).
            let mut union: Vec<Element> = node
                .children
                .iter()
                .flat_map(|c| self.nodes[c.0].block.iter().copied())
                .collect();
            union.sort_unstable();
            let distinct = union.windows(2).all(|w| w[0] < w[1]);
            if !distinct {
                out.push(Violation {
                    node: id,
                    condition: "children blocks are not pairwise disjoint".into(),
                });
            }
            if union != node.block {
                out.push(Violation {
                    node: id,
                    condition: "children blocks do not cover the node block".into(),
                });
            }
        }
        out
    }

    /// The flat partition induced at depth `level`. A leaf above `level`
    /// contributes its whole block unchanged (leaf padding).
    pub fn level_partition(&self, level: usize) -> Result<LevelPartition> {
        let max = self.max_depth();
        if level > max {
            return Err(Error::DepthOutOfRange { depth: level, max });
        }
        Ok(self.level_membership(level))
    }

    /// Like [`level_partition`](Self::level_partition) but clamping to the
    /// leaf partition beyond the maximum depth, which is how two trees of
    /// unequal depth are aligned.
    pub fn level_partition_padded(&self, level: usize) -> LevelPartition {
        self.level_membership(level.min(self.max_depth()))
    }

    fn level_membership(&self, level: usize) -> LevelPartition {
        let mut owner = vec![usize::MAX; self.n];
        for id in self.node_ids() {
            let node = &self.nodes[id.0];
            let covers = node.depth == level || (node.children.is_empty() && node.depth < level);
            if covers {
                for &e in &node.block {
                    owner[e as usize - 1] = id.0;
                }
            }
        }
        LevelPartition::from_owners(&owner, level)
    }

    /// The nodes forming the padded level at `level`: real nodes at that
    /// depth plus leaves that ended higher up.
    pub fn level_nodes(&self, level: usize) -> Vec<NodeId> {
        self.node_ids()
            .filter(|&id| {
                let node = &self.nodes[id.0];
                node.depth == level || (node.children.is_empty() && node.depth < level)
            })
            .collect()
    }

    /// Applies a permutation elementwise to every block, keeping the tree
    /// shape. `p(T) = { p(U_t) : t }`.
    pub fn apply_permutation(&self, p: &Permutation) -> Result<Self> {
        if p.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: p.n(),
            });
        }
        let mut out = self.clone();
        for node in &mut out.nodes {
            for e in &mut node.block {
                *e = p.image(*e);
            }
            node.block.sort_unstable();
        }
        Ok(out)
    }

    /// Canonical form: children recursively ordered by smallest contained
    /// element, nodes renumbered in depth-first order. Two partitions are
    /// equal as hierarchical partitions iff their canonical forms are
    /// structurally identical.
    pub fn canonical_form(&self) -> Self {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        self.copy_canonical(self.root, &mut nodes);
        HierPartition {
            nodes,
            root: NodeId(0),
            n: self.n,
        }
    }

    fn copy_canonical(&self, id: NodeId, out: &mut Vec<Node>) -> NodeId {
        let slot = out.len();
        out.push(Node {
            children: Vec::new(),
            block: self.nodes[id.0].block.clone(),
            depth: self.nodes[id.0].depth,
        });
        let mut order: Vec<NodeId> = self.nodes[id.0].children.clone();
        order.sort_by_key(|c| self.nodes[c.0].block[0]);
        let children: Vec<NodeId> = order
            .into_iter()
            .map(|c| self.copy_canonical(c, out))
            .collect();
        out[slot].children = children;
        NodeId(slot)
    }

    /// Canonical bracket notation: children ordered by smallest contained
    /// element, elements ascending. Round-trips through [`parse`](Self::parse).
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        self.serialize_node(self.root, &mut s);
        s
    }

    fn serialize_node(&self, id: NodeId, out: &mut String) {
        let node = &self.nodes[id.0];
        out.push('[');
        if node.children.is_empty() {
            for (i, e) in node.block.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&e.to_string());
            }
        } else {
            let mut order: Vec<NodeId> = node.children.clone();
            order.sort_by_key(|c| self.nodes[c.0].block[0]);
            for (i, c) in order.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                self.serialize_node(c, out);
            }
        }
        out.push(']');
    }

    /// The recursive block structure of this partition (child order as stored).
    pub fn to_blocks(&self) -> BlockTree {
        self.node_blocks(self.root)
    }

    fn node_blocks(&self, id: NodeId) -> BlockTree {
        let node = &self.nodes[id.0];
        if node.children.is_empty() {
            BlockTree::Leaf(node.block.clone())
        } else {
            BlockTree::Internal(node.children.iter().map(|&c| self.node_blocks(c)).collect())
        }
    }
}

/// Equality as hierarchical partitions (up to child order).
impl PartialEq for HierPartition {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.serialize() == other.serialize()
    }
}

impl Eq for HierPartition {}

impl fmt::Display for HierPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl std::str::FromStr for HierPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HierPartition::parse(s)
    }
}

fn build_nodes(tree: &BlockTree, depth: usize, nodes: &mut Vec<Node>) -> Result<NodeId> {
    let slot = nodes.len();
    nodes.push(Node {
        children: Vec::new(),
        block: Vec::new(),
        depth,
    });
    match tree {
        BlockTree::Leaf(elements) => {
            if elements.is_empty() {
                return Err(Error::Validation("empty block".into()));
            }
            let mut block = elements.clone();
            block.sort_unstable();
            nodes[slot].block = block;
        }
        BlockTree::Internal(children) => {
            if children.is_empty() {
                return Err(Error::Validation("empty block".into()));
            }
            let ids: Vec<NodeId> = children
                .iter()
                .map(|c| build_nodes(c, depth + 1, nodes))
                .collect::<Result<_>>()?;
            let mut block: Vec<Element> = ids
                .iter()
                .flat_map(|c| nodes[c.0].block.iter().copied())
                .collect();
            block.sort_unstable();
            nodes[slot].children = ids;
            nodes[slot].block = block;
        }
    }
    Ok(NodeId(slot))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn syntax(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == byte => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.syntax(&format!(
                "expected {:?}, found {:?}",
                byte as char, b as char
            ))),
            None => Err(self.syntax(&format!("expected {:?}, found end of input", byte as char))),
        }
    }

    fn parse_node(&mut self) -> Result<BlockTree> {
        self.expect(b'[')?;
        match self.peek() {
            Some(b'[') => {
                let mut children = vec![self.parse_node()?];
                loop {
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            children.push(self.parse_node()?);
                        }
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(BlockTree::Internal(children));
                        }
                        Some(b) => {
                            return Err(
                                self.syntax(&format!("expected ',' or ']', found {:?}", b as char))
                            )
                        }
                        None => return Err(self.syntax("unbalanced brackets")),
                    }
                }
            }
            Some(b) if b.is_ascii_digit() => {
                let mut elements = vec![self.parse_integer()?];
                loop {
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            elements.push(self.parse_integer()?);
                        }
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(BlockTree::Leaf(elements));
                        }
                        Some(b) => {
                            return Err(
                                self.syntax(&format!("expected ',' or ']', found {:?}", b as char))
                            )
                        }
                        None => return Err(self.syntax("unbalanced brackets")),
                    }
                }
            }
            Some(b']') => Err(Error::Validation("empty block".into())),
            Some(b) => Err(self.syntax(&format!("unexpected token {:?}", b as char))),
            None => Err(self.syntax("unbalanced brackets")),
        }
    }

    fn parse_integer(&mut self) -> Result<Element> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an integer"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse::<Element>()
            .map_err(|_| self.syntax(&format!("integer {text} out of range")))
    }
}

impl LevelPartition {
    /// Normalizes an arbitrary labelling into contiguous first-appearance
    /// block ids.
    pub fn from_membership(membership: &[u32], depth: usize) -> Self {
        let owners: Vec<usize> = membership.iter().map(|&m| m as usize).collect();
        Self::from_owners(&owners, depth)
    }

    fn from_owners(owners: &[usize], depth: usize) -> Self {
        let mut remap: Vec<(usize, u32)> = Vec::new();
        let mut membership = Vec::with_capacity(owners.len());
        for &o in owners {
            let id = match remap.iter().find(|(orig, _)| *orig == o) {
                Some(&(_, id)) => id,
                None => {
                    let id = remap.len() as u32;
                    remap.push((o, id));
                    id
                }
            };
            membership.push(id);
        }
        LevelPartition { membership, depth }
    }

    pub fn n(&self) -> usize {
        self.membership.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn membership(&self) -> &[u32] {
        &self.membership
    }

    pub fn num_blocks(&self) -> usize {
        self.membership.iter().map(|&m| m as usize + 1).max().unwrap_or(0)
    }

    /// Sizes of the blocks, indexed by block id.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_blocks()];
        for &m in &self.membership {
            sizes[m as usize] += 1;
        }
        sizes
    }

    /// True if every block of `self` is contained in a block of `coarser`.
    pub fn refines(&self, coarser: &LevelPartition) -> bool {
        if self.n() != coarser.n() {
            return false;
        }
        let mut image: Vec<Option<u32>> = vec![None; self.num_blocks()];
        for (e, &b) in self.membership.iter().enumerate() {
            match image[b as usize] {
                None => image[b as usize] = Some(coarser.membership[e]),
                Some(c) if c == coarser.membership[e] => {}
                Some(_) => return false,
            }
        }
        true
    }
}

impl Permutation {
    /// Builds a permutation from images of `1..=n`; `map[i]` is the image
    /// of element `i + 1`.
    pub fn new(map: Vec<Element>) -> Result<Self> {
        let mut sorted = map.clone();
        sorted.sort_unstable();
        let expected: Vec<Element> = (1..=map.len() as Element).collect();
        if sorted != expected {
            return Err(Error::Validation("permutation is not a bijection on 1..=n".into()));
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (1..=n as Element).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn image(&self, e: Element) -> Element {
        self.map[e as usize - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &img) in self.map.iter().enumerate() {
            map[img as usize - 1] = i as Element + 1;
        }
        Permutation { map }
    }

    pub fn as_slice(&self) -> &[Element] {
        &self.map
    }
}
