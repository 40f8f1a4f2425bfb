//! Deterministic information-theoretic measures on hierarchical partitions.
//!
//! The central quantity is the hierarchical mutual information (HMI),
//! computed by two equivalent algorithms:
//!
//! * [`hmi_recursive`] descends the two trees jointly, summing a local
//!   contingency-table mutual information at every overlapping node pair
//!   and weighting recursive calls by the overlap probability;
//! * [`hmi_levels`] projects both trees onto padded flat partitions and
//!   sums classical conditional mutual information terms level by level.
//!
//! From the HMI the usual derived quantities follow: hierarchical entropy
//! ([`hentropy`]), joint and conditional entropies ([`hje`], [`hce`]), the
//! hierarchical variation of information ([`hvi`]), the normalized HMI
//! ([`nhmi`]), and the exponential transform [`dn`] of the HVI which is a
//! true metric for a fixed universe size.
//!
//! All logarithms are natural; every returned value is in nats. Zero
//! probabilities never appear because only non-empty intersection cells are
//! iterated, which realizes the `0 ln 0 = 0` and `0/0 = 0` conventions
//! without floating-point special cases. Probabilities are exact integer
//! ratios evaluated in floating point at the last step.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::hpart::{Element, HierPartition, LevelPartition, NodeId};

/// A generalized mean used to normalize or adjust the HMI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Max,
    Min,
}

impl MeanKind {
    pub fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            MeanKind::Arithmetic => 0.5 * (x + y),
            MeanKind::Geometric => (x * y).sqrt(),
            MeanKind::Max => x.max(y),
            MeanKind::Min => x.min(y),
        }
    }

    pub const ALL: [MeanKind; 4] = [
        MeanKind::Arithmetic,
        MeanKind::Geometric,
        MeanKind::Max,
        MeanKind::Min,
    ];
}

impl std::str::FromStr for MeanKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "arithmetic" => Ok(MeanKind::Arithmetic),
            "geometric" => Ok(MeanKind::Geometric),
            "max" => Ok(MeanKind::Max),
            "min" => Ok(MeanKind::Min),
            other => Err(format!(
                "unknown mean {other:?} (expected arithmetic, geometric, max or min)"
            )),
        }
    }
}

impl std::fmt::Display for MeanKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::Geometric => "geometric",
            MeanKind::Max => "max",
            MeanKind::Min => "min",
        };
        f.write_str(s)
    }
}

/// A measure total together with its per-level decomposition;
/// `per_level[l]` is the contribution of the step from depth `l` to `l+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureReport {
    pub total: f64,
    pub per_level: Vec<f64>,
}

/// One recursive HMI term: the sub-partition mutual information of an
/// overlapping same-depth node pair, with its overlap weight.
#[derive(Clone, Debug)]
pub struct VertexTerm {
    pub t: NodeId,
    pub s: NodeId,
    pub depth: usize,
    /// Overlap probability `|U_t ∩ U_s| / n`, always positive.
    pub weight: f64,
    /// Mutual information of the two sub-partitions restricted to the
    /// overlap; zero when either node is a leaf.
    pub value: f64,
}

/// Sparse joint counts between the blocks of two flat partitions.
///
/// Only non-empty cells are stored; counts sum to `n` and the marginals
/// recover the block sizes of the two partitions.
#[derive(Clone, Debug)]
pub struct JointCounts {
    table: BTreeMap<(u32, u32), u64>,
    n: usize,
}

impl JointCounts {
    pub fn from_levels(a: &LevelPartition, b: &LevelPartition) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::SizeMismatch {
                left: a.n(),
                right: b.n(),
            });
        }
        Ok(Self::from_pairs(
            a.membership()
                .iter()
                .zip(b.membership())
                .map(|(&x, &y)| (x, y)),
        ))
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut table = BTreeMap::new();
        let mut n = 0usize;
        for key in pairs {
            *table.entry(key).or_insert(0u64) += 1;
            n += 1;
        }
        JointCounts { table, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &u64)> {
        self.table.iter()
    }

    pub fn row_marginals(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for (&(r, _), &c) in &self.table {
            *out.entry(r).or_insert(0) += c;
        }
        out
    }

    pub fn col_marginals(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for (&(_, c), &v) in &self.table {
            *out.entry(c).or_insert(0) += v;
        }
        out
    }

    /// Classical mutual information of the contingency table, in nats.
    pub fn mutual_information(&self) -> f64 {
        let rows = self.row_marginals();
        let cols = self.col_marginals();
        let n = self.n as u64;
        let mut total = 0.0;
        for (&(r, c), &v) in &self.table {
            let a = rows[&r];
            let b = cols[&c];
            total += v as f64 / n as f64 * ln_ratio(v * n, a * b);
        }
        total
    }
}

/// `ln(num / den)` with the ratio formed from exact integer counts.
fn ln_ratio(num: u64, den: u64) -> f64 {
    (num as f64 / den as f64).ln()
}

/// Shannon entropy in nats of a partition given by its block sizes.
pub fn entropy_from_sizes(sizes: &[usize], n: usize) -> f64 {
    sizes
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 / n as f64 * ln_ratio(n as u64, c as u64))
        .sum()
}

/// Per-tree lookup from an element to the child of a given node owning it.
struct ChildIndex {
    child_of: Vec<HashMap<Element, NodeId>>,
}

impl ChildIndex {
    fn build(hp: &HierPartition) -> Self {
        let mut child_of = vec![HashMap::new(); hp.num_nodes()];
        for id in hp.node_ids() {
            for &c in hp.children(id) {
                for &e in hp.block(c) {
                    child_of[id.0].insert(e, c);
                }
            }
        }
        ChildIndex { child_of }
    }

    /// Child of `node` containing `e`; a leaf acts as its own child, which
    /// is the padding convention for trees of unequal depth.
    fn descend(&self, hp: &HierPartition, node: NodeId, e: Element) -> NodeId {
        if hp.is_leaf(node) {
            node
        } else {
            self.child_of[node.0][&e]
        }
    }
}

fn check_same_universe(t: &HierPartition, s: &HierPartition) -> Result<()> {
    if t.n() != s.n() {
        return Err(Error::SizeMismatch {
            left: t.n(),
            right: s.n(),
        });
    }
    Ok(())
}

/// Hierarchical mutual information `I(T;S)` by the recursive algorithm.
///
/// The recursion visits only node pairs with positive overlap. At each pair
/// it adds the contingency-table mutual information between the two child
/// partitions restricted to the overlap, then recurses into every non-empty
/// child cell weighted by its conditional probability.
pub fn hmi_recursive(t: &HierPartition, s: &HierPartition) -> Result<f64> {
    check_same_universe(t, s)?;
    let ti = ChildIndex::build(t);
    let si = ChildIndex::build(s);
    let universe: Vec<Element> = (1..=t.n() as Element).collect();
    Ok(hmi_rec(t, &ti, s, &si, t.root(), s.root(), &universe))
}

fn hmi_rec(
    t: &HierPartition,
    ti: &ChildIndex,
    s: &HierPartition,
    si: &ChildIndex,
    ta: NodeId,
    sa: NodeId,
    overlap: &[Element],
) -> f64 {
    // A leaf keeps its whole block at every deeper level, so every further
    // local term against it is zero.
    if t.is_leaf(ta) || s.is_leaf(sa) {
        return 0.0;
    }
    let w = overlap.len() as u64;
    let mut cells: BTreeMap<(NodeId, NodeId), Vec<Element>> = BTreeMap::new();
    for &e in overlap {
        let tc = ti.descend(t, ta, e);
        let sc = si.descend(s, sa, e);
        cells.entry((tc, sc)).or_default().push(e);
    }
    let mut rows: BTreeMap<NodeId, u64> = BTreeMap::new();
    let mut cols: BTreeMap<NodeId, u64> = BTreeMap::new();
    for (&(tc, sc), cell) in &cells {
        *rows.entry(tc).or_insert(0) += cell.len() as u64;
        *cols.entry(sc).or_insert(0) += cell.len() as u64;
    }
    let mut total = 0.0;
    for (&(tc, sc), cell) in &cells {
        let c = cell.len() as u64;
        total += c as f64 / w as f64 * ln_ratio(c * w, rows[&tc] * cols[&sc]);
    }
    for (&(tc, sc), cell) in &cells {
        let c = cell.len() as u64;
        total += c as f64 / w as f64 * hmi_rec(t, ti, s, si, tc, sc, cell);
    }
    total
}

struct LevelDecomposition {
    mi: Vec<f64>,
    h_step_t: Vec<f64>,
    h_step_s: Vec<f64>,
}

/// Per-level conditional terms shared by [`hmi_levels`] and [`hvi`]. Both
/// trees are padded to the common maximum depth.
fn level_decomposition(t: &HierPartition, s: &HierPartition) -> Result<LevelDecomposition> {
    check_same_universe(t, s)?;
    let n = t.n();
    let levels = t.max_depth().max(s.max_depth());
    let mt: Vec<LevelPartition> = (0..=levels).map(|l| t.level_partition_padded(l)).collect();
    let ms: Vec<LevelPartition> = (0..=levels).map(|l| s.level_partition_padded(l)).collect();

    let mut decomp = LevelDecomposition {
        mi: Vec::with_capacity(levels),
        h_step_t: Vec::with_capacity(levels),
        h_step_s: Vec::with_capacity(levels),
    };
    for l in 0..levels {
        // Group the universe by the joint conditioning cell at depth l.
        let mut groups: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
        for e in 0..n {
            let key = (mt[l].membership()[e], ms[l].membership()[e]);
            groups.entry(key).or_default().push(e);
        }
        // I(T_{l+1}; S_{l+1} | T_l, S_l): within-cell MI weighted by the
        // cell probability.
        let mut term = 0.0;
        for cell in groups.values() {
            let counts = JointCounts::from_pairs(
                cell.iter()
                    .map(|&e| (mt[l + 1].membership()[e], ms[l + 1].membership()[e])),
            );
            term += cell.len() as f64 / n as f64 * counts.mutual_information();
        }
        decomp.mi.push(clamp_dust(term));

        // H(X_{l+1} | X_l) = H(X_{l+1}) - H(X_l) because levels refine.
        let h = |lp: &LevelPartition| entropy_from_sizes(&lp.block_sizes(), n);
        decomp.h_step_t.push(clamp_dust(h(&mt[l + 1]) - h(&mt[l])));
        decomp.h_step_s.push(clamp_dust(h(&ms[l + 1]) - h(&ms[l])));
    }
    Ok(decomp)
}

/// Rounds float dust from cancellation up to an exact zero; anything more
/// negative than -1e-12 is preserved (it would indicate a real bug).
fn clamp_dust(x: f64) -> f64 {
    if x < 0.0 && x > -1e-12 {
        0.0
    } else {
        x
    }
}

/// Hierarchical mutual information by the level-by-level algorithm.
///
/// `per_level[l]` is the classical conditional mutual information between
/// the two depth-`l+1` partitions given the joint depth-`l` partition; the
/// total agrees with [`hmi_recursive`] to within 1e-10.
pub fn hmi_levels(t: &HierPartition, s: &HierPartition) -> Result<MeasureReport> {
    let decomp = level_decomposition(t, s)?;
    Ok(MeasureReport {
        total: decomp.mi.iter().sum(),
        per_level: decomp.mi,
    })
}

/// Hierarchical entropy `H(T) = I(T;T)`, which collapses to the flat
/// entropy of the leaf-level partition.
pub fn hentropy(t: &HierPartition) -> f64 {
    let n = t.n();
    let sizes: Vec<usize> = t
        .node_ids()
        .filter(|&id| t.is_leaf(id))
        .map(|id| t.block(id).len())
        .collect();
    entropy_from_sizes(&sizes, n)
}

/// Hierarchical joint entropy `H(T,S) = H(T) + H(S) - I(T;S)`.
pub fn hje(t: &HierPartition, s: &HierPartition) -> Result<f64> {
    let i = hmi_recursive(t, s)?;
    Ok(hentropy(t) + hentropy(s) - i)
}

/// Hierarchical conditional entropy `H(T|S) = H(T) - I(T;S)`.
pub fn hce(t: &HierPartition, s: &HierPartition) -> Result<f64> {
    let i = hmi_recursive(t, s)?;
    Ok(clamp_dust(hentropy(t) - i))
}

/// Hierarchical variation of information `V(T;S) = H(T) + H(S) - 2 I(T;S)`,
/// decomposed into non-negative per-level terms.
pub fn hvi(t: &HierPartition, s: &HierPartition) -> Result<MeasureReport> {
    let decomp = level_decomposition(t, s)?;
    let per_level: Vec<f64> = (0..decomp.mi.len())
        .map(|l| clamp_dust(decomp.h_step_t[l] + decomp.h_step_s[l] - 2.0 * decomp.mi[l]))
        .collect();
    Ok(MeasureReport {
        total: per_level.iter().sum(),
        per_level,
    })
}

/// Normalized HMI `I(T;S) / M(H(T), H(S))`, in `[0, 1]`.
pub fn nhmi(t: &HierPartition, s: &HierPartition, mean: MeanKind) -> Result<f64> {
    let i = hmi_recursive(t, s)?;
    let denom = mean.apply(hentropy(t), hentropy(s));
    if denom <= 0.0 {
        return Err(Error::DegenerateDenominator(format!(
            "{mean} mean of the two hierarchical entropies is zero"
        )));
    }
    Ok((i / denom).clamp(0.0, 1.0))
}

/// The metric distance `d_n(T,S) = 1 - exp(-(n/2) V(T;S))`, equivalently
/// `1 - 2^{-(n/2) V}` with `V` measured in bits.
///
/// The smallest variation of information between distinct partitions of
/// `{1..n}` is `(2 ln 2)/n` (2/n bits, attained by splitting a two-element
/// block), so `n/2` is exactly the decay rate at which the transform
/// satisfies the triangle inequality for a fixed universe size; any two
/// distinct partitions end up at least 1/2 apart.
pub fn dn(t: &HierPartition, s: &HierPartition) -> Result<f64> {
    let v = hvi(t, s)?.total;
    let n = t.n() as f64;
    Ok(1.0 - (-(n / 2.0) * v).exp())
}

/// Which pair measure a triangle defect is evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMeasure {
    Hvi,
    Dn,
}

impl PairMeasure {
    pub fn eval(self, a: &HierPartition, b: &HierPartition) -> Result<f64> {
        match self {
            PairMeasure::Hvi => Ok(hvi(a, b)?.total),
            PairMeasure::Dn => dn(a, b),
        }
    }
}

impl std::str::FromStr for PairMeasure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hvi" => Ok(PairMeasure::Hvi),
            "dn" => Ok(PairMeasure::Dn),
            other => Err(format!("unknown measure {other:?} (expected hvi or dn)")),
        }
    }
}

/// Triangle defect `m(T,S) + m(S,R) - m(T,R)`; negative values witness a
/// triangle-inequality violation of the measure.
pub fn triangle_defect(
    t: &HierPartition,
    s: &HierPartition,
    r: &HierPartition,
    measure: PairMeasure,
) -> Result<f64> {
    Ok(measure.eval(t, s)? + measure.eval(s, r)? - measure.eval(t, r)?)
}

/// All recursive HMI terms `I(T^t; S^s)`, one per overlapping same-depth
/// node pair, sorted by depth then node ids. Leaves persist at deeper
/// levels through the padding convention, so a leaf of one tree pairs with
/// every overlapping deeper node of the other (with value zero). The root
/// pair's value is the total HMI.
pub fn vertex_hmi_terms(t: &HierPartition, s: &HierPartition) -> Result<Vec<VertexTerm>> {
    check_same_universe(t, s)?;
    let ti = ChildIndex::build(t);
    let si = ChildIndex::build(s);
    let universe: Vec<Element> = (1..=t.n() as Element).collect();
    let mut out = Vec::new();
    vertex_rec(
        t,
        &ti,
        s,
        &si,
        t.root(),
        s.root(),
        &universe,
        0,
        &mut out,
    );
    out.sort_by_key(|term| (term.depth, term.t, term.s));
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn vertex_rec(
    t: &HierPartition,
    ti: &ChildIndex,
    s: &HierPartition,
    si: &ChildIndex,
    ta: NodeId,
    sa: NodeId,
    overlap: &[Element],
    depth: usize,
    out: &mut Vec<VertexTerm>,
) -> f64 {
    let n = t.n() as f64;
    if t.is_leaf(ta) && s.is_leaf(sa) {
        out.push(VertexTerm {
            t: ta,
            s: sa,
            depth,
            weight: overlap.len() as f64 / n,
            value: 0.0,
        });
        return 0.0;
    }
    let w = overlap.len() as u64;
    let mut cells: BTreeMap<(NodeId, NodeId), Vec<Element>> = BTreeMap::new();
    for &e in overlap {
        let tc = ti.descend(t, ta, e);
        let sc = si.descend(s, sa, e);
        cells.entry((tc, sc)).or_default().push(e);
    }
    let mut rows: BTreeMap<NodeId, u64> = BTreeMap::new();
    let mut cols: BTreeMap<NodeId, u64> = BTreeMap::new();
    for (&(tc, sc), cell) in &cells {
        *rows.entry(tc).or_insert(0) += cell.len() as u64;
        *cols.entry(sc).or_insert(0) += cell.len() as u64;
    }
    let mut value = 0.0;
    for (&(tc, sc), cell) in &cells {
        let c = cell.len() as u64;
        value += c as f64 / w as f64 * ln_ratio(c * w, rows[&tc] * cols[&sc]);
    }
    for (&(tc, sc), cell) in &cells {
        let c = cell.len() as u64;
        value += c as f64 / w as f64 * vertex_rec(t, ti, s, si, tc, sc, cell, depth + 1, out);
    }
    let value = clamp_dust(value);
    out.push(VertexTerm {
        t: ta,
        s: sa,
        depth,
        weight: overlap.len() as f64 / n,
        value,
    });
    value
}
