//! Ordered trees of fixed height, leaf codes, and universal trees.
//!
//! A leaf is addressed by its [`LeafCode`]: one child index per depth, depth 1
//! first, where index 0 is the *rightmost* child of a node. With this
//! numbering the numeric lexicographic order of codes is the tree's leaf
//! order (left = larger), and the all-zeros code is the smallest leaf.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bounds;
use crate::game::Priority;
use crate::zielonka::TupleSignature;

/// Largest tree the explicit constructions will materialise.
pub const DEFAULT_LEAF_LIMIT: u128 = 4_000_000;

/// Default ceiling on the number of trees an enumeration may produce.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("height mismatch: expected {expected}, found {found}")]
    HeightMismatch { expected: usize, found: usize },
    #[error("{what} would have {count} elements, above the limit of {limit}")]
    TooLarge { what: &'static str, count: u128, limit: u128 },
    #[error("invalid leaf code {0}")]
    InvalidCode(LeafCode),
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("signature value out of range at vertex {vertex}: {reason}")]
    BadSignature { vertex: usize, reason: String },
}

/// Truncation depth used by the `p`-orders for a bound `d`: the number of
/// odd priorities in `[p, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelMap {
    d: Priority,
}

impl LevelMap {
    pub fn new(d: Priority) -> Self {
        LevelMap { d }
    }

    /// The map matching a tree of height `h`, i.e. `d = 2h`.
    pub fn for_height(h: usize) -> Self {
        LevelMap { d: 2 * h }
    }

    pub fn d(&self) -> Priority {
        self.d
    }

    pub fn height(&self) -> usize {
        self.d / 2
    }

    pub fn level(&self, p: Priority) -> usize {
        if p > self.d {
            0
        } else {
            (self.d + 1 - p) / 2
        }
    }
}

/// Path to a leaf: child indices from depth 1 down, 0 = rightmost child.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafCode(Vec<u32>);

impl LeafCode {
    pub fn new(indices: Vec<u32>) -> Self {
        LeafCode(indices)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn truncated(&self, level: usize) -> &[u32] {
        &self.0[..level.min(self.0.len())]
    }
}

impl fmt::Display for LeafCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for LeafCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|e| format!("bad index `{}`: {e}", part.trim()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(LeafCode)
    }
}

/// Rank of a leaf in ascending leaf order; `LeafId(0)` is the smallest leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafId(pub u32);

/// A nested description of an ordered tree: children listed left to right,
/// a leaf has none.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape(pub Vec<Shape>);

impl Shape {
    pub fn leaf() -> Self {
        Shape(Vec::new())
    }

    pub fn node(children: Vec<Shape>) -> Self {
        Shape(children)
    }

    pub fn leaf_count(&self) -> usize {
        if self.0.is_empty() {
            1
        } else {
            self.0.iter().map(Shape::leaf_count).sum()
        }
    }
}

/// Accumulates nodes before [`OrderedTree`] fixes the layout.
#[derive(Default)]
struct Builder {
    // Children listed left to right.
    children: Vec<Vec<u32>>,
}

impl Builder {
    fn node(&mut self, children: Vec<u32>) -> u32 {
        self.children.push(children);
        (self.children.len() - 1) as u32
    }

    fn shape(&mut self, shape: &Shape) -> u32 {
        let kids = shape.0.iter().map(|c| self.shape(c)).collect();
        self.node(kids)
    }

    fn finish(self, root: u32, height: usize) -> Result<OrderedTree, TreeError> {
        if height == 0 {
            return Err(TreeError::Malformed("height must be at least 1".into()));
        }
        // Renumber in preorder, visiting children in code order (rightmost first).
        let mut order = Vec::with_capacity(self.children.len());
        let mut stack = vec![(root, 0usize)];
        while let Some((node, depth)) = stack.pop() {
            order.push(node);
            let kids = &self.children[node as usize];
            if depth == height && !kids.is_empty() {
                return Err(TreeError::Malformed(format!("node below depth {height}")));
            }
            if depth < height && kids.is_empty() {
                return Err(TreeError::Malformed(format!(
                    "leaf at depth {depth}, expected all leaves at depth {height}"
                )));
            }
            // Push leftmost first so the rightmost child is visited first.
            for &k in kids.iter() {
                stack.push((k, depth + 1));
            }
        }
        let mut new_id = vec![u32::MAX; self.children.len()];
        for (i, &old) in order.iter().enumerate() {
            if new_id[old as usize] != u32::MAX {
                return Err(TreeError::Malformed("node shared between parents".into()));
            }
            new_id[old as usize] = i as u32;
        }
        let children: Vec<Vec<u32>> = order
            .iter()
            .map(|&old| {
                self.children[old as usize]
                    .iter()
                    .rev()
                    .map(|&k| new_id[k as usize])
                    .collect()
            })
            .collect();
        Ok(OrderedTree::from_layout(height, children))
    }
}

/// An ordered tree whose leaves all sit at depth `height`.
///
/// Nodes are numbered in preorder with children visited in code order, so
/// the root is node 0 and leaves appear in ascending leaf order.
#[derive(Clone, PartialEq, Eq)]
pub struct OrderedTree {
    height: usize,
    /// Children in code order: `children[v][0]` is the rightmost child.
    children: Vec<Vec<u32>>,
    index_in_parent: Vec<u32>,
    /// Leaf node ids in ascending leaf order.
    leaves: Vec<u32>,
    /// Half-open range of leaf ranks below each node.
    leaf_range: Vec<(u32, u32)>,
    /// For leaf rank `r`, `ancestors[r * (height + 1) + l]` is its ancestor at depth `l`.
    ancestors: Vec<u32>,
}

impl fmt::Debug for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrderedTree")
            .field("height", &self.height)
            .field("leaves", &self.leaf_count())
            .field("shape", &self.to_shape())
            .finish()
    }
}

impl OrderedTree {
    fn from_layout(height: usize, children: Vec<Vec<u32>>) -> Self {
        let n = children.len();
        let mut index_in_parent = vec![0u32; n];
        let mut leaves = Vec::new();
        let mut leaf_range = vec![(0u32, 0u32); n];
        // Preorder numbering means descendants have larger ids; a reverse
        // sweep finishes every subtree before its parent.
        for v in 0..n {
            for (i, &c) in children[v].iter().enumerate() {
                index_in_parent[c as usize] = i as u32;
            }
            if children[v].is_empty() {
                leaf_range[v] = (leaves.len() as u32, leaves.len() as u32 + 1);
                leaves.push(v as u32);
            }
        }
        for v in (0..n).rev() {
            if let (Some(&first), Some(&last)) = (children[v].first(), children[v].last()) {
                leaf_range[v] = (leaf_range[first as usize].0, leaf_range[last as usize].1);
            }
        }
        let mut ancestors = Vec::with_capacity(leaves.len() * (height + 1));
        let mut path = vec![0u32; height + 1];
        let mut stack = vec![(0u32, 0usize)];
        while let Some((v, depth)) = stack.pop() {
            path[depth] = v;
            if depth == height {
                ancestors.extend_from_slice(&path);
            }
            for &c in children[v as usize].iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        OrderedTree {
            height,
            children,
            index_in_parent,
            leaves,
            leaf_range,
            ancestors,
        }
    }

    pub fn from_shape(shape: &Shape) -> Result<Self, TreeError> {
        let mut b = Builder::default();
        let root = b.shape(shape);
        let height = shape_height(shape);
        b.finish(root, height)
    }

    /// Rebuilds a tree from its leaf codes (any order). The codes must be
    /// distinct, of equal length, and use child indices `0..k` at every node.
    pub fn from_codes(codes: &[LeafCode]) -> Result<Self, TreeError> {
        let first = codes
            .first()
            .ok_or_else(|| TreeError::Malformed("no leaves".into()))?;
        let height = first.0.len();
        if height == 0 {
            return Err(TreeError::Malformed("empty leaf code".into()));
        }
        let mut sorted = codes.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != codes.len() {
            return Err(TreeError::Malformed("duplicate leaf code".into()));
        }
        if let Some(bad) = sorted.iter().find(|c| c.0.len() != height) {
            return Err(TreeError::InvalidCode(bad.clone()));
        }
        let shape = shape_from_sorted(&sorted, 0, height).map_err(TreeError::InvalidCode)?;
        Self::from_shape(&shape)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of leaves, written `|T|`.
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn level_map(&self) -> LevelMap {
        LevelMap::for_height(self.height)
    }

    pub fn min_leaf(&self) -> LeafId {
        LeafId(0)
    }

    pub fn max_leaf(&self) -> LeafId {
        LeafId(self.leaves.len() as u32 - 1)
    }

    pub fn leaves(&self) -> impl Iterator<Item = LeafId> + '_ {
        (0..self.leaves.len() as u32).map(LeafId)
    }

    fn ancestor(&self, leaf: LeafId, depth: usize) -> u32 {
        self.ancestors[leaf.0 as usize * (self.height + 1) + depth]
    }

    pub fn leaf_code(&self, leaf: LeafId) -> LeafCode {
        LeafCode(
            (1..=self.height)
                .map(|depth| self.index_in_parent[self.ancestor(leaf, depth) as usize])
                .collect(),
        )
    }

    pub fn leaf_codes(&self) -> Vec<LeafCode> {
        self.leaves().map(|l| self.leaf_code(l)).collect()
    }

    pub fn leaf_id(&self, code: &LeafCode) -> Option<LeafId> {
        if code.0.len() != self.height {
            return None;
        }
        let mut node = 0u32;
        for &i in &code.0 {
            node = *self.children[node as usize].get(i as usize)?;
        }
        Some(LeafId(self.leaf_range[node as usize].0))
    }

    fn check_code(&self, code: &LeafCode) -> Result<LeafId, TreeError> {
        self.leaf_id(code).ok_or_else(|| TreeError::InvalidCode(code.clone()))
    }

    /// Compares two leaves under `≥_p`: their codes truncated to `level(p)`.
    pub fn compare_leaves_at(&self, a: &LeafCode, b: &LeafCode, p: Priority, levels: &LevelMap) -> Result<Ordering, TreeError> {
        self.check_code(a)?;
        self.check_code(b)?;
        let l = levels.level(p);
        Ok(a.truncated(l).cmp(b.truncated(l)))
    }

    /// Compares two leaves by their ancestors at depth `level`.
    pub fn compare_at(&self, a: LeafId, b: LeafId, level: usize) -> Ordering {
        let level = level.min(self.height);
        if self.ancestor(a, level) == self.ancestor(b, level) {
            Ordering::Equal
        } else {
            a.cmp(&b)
        }
    }

    /// Smallest leaf, in the total leaf order, that dominates `target` at
    /// truncation `level` (strictly if `strict`). `None` means Top: either the
    /// target is Top or no leaf qualifies.
    ///
    /// Leaves agreeing with `target` on the first `level` entries form the
    /// contiguous block below its depth-`level` ancestor, so the answer is
    /// that block's first leaf, or the one right after it when strict.
    pub fn min_leaf_geq(&self, target: Option<LeafId>, level: usize, strict: bool) -> Option<LeafId> {
        let target = target?;
        let block = self.leaf_range[self.ancestor(target, level.min(self.height)) as usize];
        if strict {
            (block.1 < self.leaves.len() as u32).then_some(LeafId(block.1))
        } else {
            Some(LeafId(block.0))
        }
    }

    /// Like [`OrderedTree::min_leaf_geq`] for a code and a priority.
    pub fn min_leaf_geq_code(&self, target: Option<&LeafCode>, p: Priority, strict: bool) -> Result<Option<LeafCode>, TreeError> {
        let target = target.map(|c| self.check_code(c)).transpose()?;
        let level = self.level_map().level(p);
        Ok(self.min_leaf_geq(target, level, strict).map(|l| self.leaf_code(l)))
    }

    pub fn to_shape(&self) -> Shape {
        fn go(t: &OrderedTree, v: u32) -> Shape {
            Shape(t.children[v as usize].iter().rev().map(|&c| go(t, c)).collect())
        }
        go(self, 0)
    }

    /// One line per leaf, ascending, each the comma-separated code.
    pub fn dump(&self) -> String {
        self.leaves()
            .map(|l| self.leaf_code(l).to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Parses the output of [`OrderedTree::dump`]. Blank lines are ignored.
    pub fn parse_dump(text: &str) -> Result<Self, TreeError> {
        let codes = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.parse::<LeafCode>()
                    .map_err(|e| TreeError::Malformed(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_codes(&codes)
    }
}

fn shape_height(shape: &Shape) -> usize {
    match shape.0.first() {
        Some(c) => 1 + shape_height(c),
        None => 0,
    }
}

fn shape_from_sorted(codes: &[LeafCode], depth: usize, height: usize) -> Result<Shape, LeafCode> {
    if depth == height {
        return Ok(Shape::leaf());
    }
    let mut children = Vec::new();
    let mut start = 0;
    while start < codes.len() {
        let index = codes[start].0[depth];
        if index as usize != children.len() {
            return Err(codes[start].clone());
        }
        let end = start + codes[start..].partition_point(|c| c.0[depth] == index);
        children.push(shape_from_sorted(&codes[start..end], depth + 1, height)?);
        start = end;
    }
    // Built in code order; shapes list children left to right.
    children.reverse();
    Ok(Shape(children))
}

fn check_leaf_budget(what: &'static str, count: u128, limit: u128) -> Result<(), TreeError> {
    if count > limit {
        Err(TreeError::TooLarge { what, count, limit })
    } else {
        Ok(())
    }
}

/// The complete tree of height `h` with every node of degree `n`; `n^h` leaves.
pub fn make_naive_tree(n: usize, h: usize) -> Result<OrderedTree, TreeError> {
    make_naive_tree_with_limit(n, h, DEFAULT_LEAF_LIMIT)
}

pub fn make_naive_tree_with_limit(n: usize, h: usize, limit: u128) -> Result<OrderedTree, TreeError> {
    if n == 0 || h == 0 {
        return Err(TreeError::Malformed("naive tree needs n >= 1 and h >= 1".into()));
    }
    let count = (n as u128).checked_pow(h as u32).unwrap_or(u128::MAX);
    check_leaf_budget("naive tree", count, limit)?;
    let mut b = Builder::default();
    let mut level = vec![b.node(Vec::new())];
    for _ in 0..h {
        let mut next = Vec::with_capacity(level.len() * n);
        for &v in &level {
            let kids: Vec<u32> = (0..n).map(|_| b.node(Vec::new())).collect();
            next.extend_from_slice(&kids);
            b.children[v as usize] = kids;
        }
        level = next;
    }
    b.finish(0, h)
}

/// The succinct universal tree with `f(n, h)` leaves.
///
/// The root's children are, left to right: the root's children of the tree
/// for `(⌊n/2⌋, h)`, then one node rooting the tree for `(n, h-1)`, then the
/// root's children of the tree for `(n-1-⌊n/2⌋, h)`. For `n = 0` the tree is
/// empty, so that side contributes nothing.
pub fn make_succinct_tree(n: usize, h: usize) -> Result<OrderedTree, TreeError> {
    make_succinct_tree_with_limit(n, h, DEFAULT_LEAF_LIMIT)
}

pub fn make_succinct_tree_with_limit(n: usize, h: usize, limit: u128) -> Result<OrderedTree, TreeError> {
    if n == 0 || h == 0 {
        return Err(TreeError::Malformed("succinct tree needs n >= 1 and h >= 1".into()));
    }
    let count = bounds::f_recurrence(n as u64, h as u32);
    let count = u128::try_from(&count).unwrap_or(u128::MAX);
    check_leaf_budget("succinct tree", count, limit)?;
    let mut b = Builder::default();
    let kids = succinct_children(n, h, &mut b);
    let root = b.node(kids);
    b.finish(root, h)
}

/// Root children, left to right, of the succinct tree for `(n, h)`.
fn succinct_children(n: usize, h: usize, b: &mut Builder) -> Vec<u32> {
    if n == 0 {
        return Vec::new();
    }
    if h == 1 {
        return (0..n).map(|_| b.node(Vec::new())).collect();
    }
    if n == 1 {
        let below = succinct_children(1, h - 1, b);
        return vec![b.node(below)];
    }
    let half = n / 2;
    let mut out = succinct_children(half, h, b);
    let middle = succinct_children(n, h - 1, b);
    out.push(b.node(middle));
    out.extend(succinct_children(n - 1 - half, h, b));
    out
}

/// Node map of an embedding: `map[v]` is the image of node `v` of the small tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    map: Vec<u32>,
}

impl Embedding {
    pub fn node_image(&self, node: usize) -> usize {
        self.map[node] as usize
    }

    /// Image of a leaf of the small tree as a leaf of the large one.
    pub fn leaf_image(&self, small: &OrderedTree, large: &OrderedTree, leaf: LeafId) -> LeafId {
        let node = small.leaves[leaf.0 as usize];
        LeafId(large.leaf_range[self.map[node as usize] as usize].0)
    }
}

struct EmbedSearch<'a> {
    small: &'a OrderedTree,
    large: &'a OrderedTree,
    // 0 = unknown, 1 = embeds, 2 = does not.
    memo: Vec<u8>,
}

impl EmbedSearch<'_> {
    fn embeds(&mut self, s: u32, l: u32) -> bool {
        let key = s as usize * self.large.node_count() + l as usize;
        match self.memo[key] {
            1 => return true,
            2 => return false,
            _ => {}
        }
        let ok = self.match_children(s, l, None);
        self.memo[key] = if ok { 1 } else { 2 };
        ok
    }

    /// Greedy in-order matching of the children of `s` into those of `l`:
    /// each child takes the first remaining candidate it embeds into, which
    /// is optimal for order-preserving matchings.
    fn match_children(&mut self, s: u32, l: u32, mut out: Option<&mut Vec<u32>>) -> bool {
        let small_kids = &self.small.children[s as usize];
        let large_kids = &self.large.children[l as usize];
        let mut j = 0;
        for &c in small_kids {
            loop {
                if j == large_kids.len() {
                    return false;
                }
                let cand = large_kids[j];
                j += 1;
                if self.embeds(c, cand) {
                    if let Some(out) = out.as_deref_mut() {
                        out[c as usize] = cand;
                    }
                    break;
                }
            }
        }
        true
    }
}

/// An injective, root-, depth- and sibling-order-preserving node map from
/// `small` into `large`, or `None` if there is none.
pub fn embed(small: &OrderedTree, large: &OrderedTree) -> Result<Option<Embedding>, TreeError> {
    if small.height != large.height {
        return Err(TreeError::HeightMismatch {
            expected: large.height,
            found: small.height,
        });
    }
    let mut search = EmbedSearch {
        small,
        large,
        memo: vec![0; small.node_count() * large.node_count()],
    };
    if !search.embeds(0, 0) {
        return Ok(None);
    }
    let mut map = vec![u32::MAX; small.node_count()];
    map[0] = 0;
    // Preorder: parents are mapped before their children.
    for s in 0..small.node_count() as u32 {
        let l = map[s as usize];
        let ok = search.match_children(s, l, Some(&mut map));
        debug_assert!(ok);
    }
    Ok(Some(Embedding { map }))
}

/// Number of ordered trees of height `h` with exactly `n` leaves: `h^(n-1)`.
pub fn count_trees(n: usize, h: usize) -> u128 {
    if n == 0 || h == 0 {
        return 0;
    }
    (h as u128).checked_pow(n as u32 - 1).unwrap_or(u128::MAX)
}

/// Every ordered tree of height `h` with exactly `n` leaves, each once.
///
/// Trees are produced by splitting the leaves among the root's children
/// (compositions of `n`, in binary counting order of the cut points) and
/// taking the product of the subtree enumerations.
pub fn enumerate_trees(n: usize, h: usize, limit: u128) -> Result<TreeEnumeration, TreeError> {
    if n == 0 || h == 0 {
        return Err(TreeError::Malformed("enumeration needs n >= 1 and h >= 1".into()));
    }
    let count = count_trees(n, h);
    check_leaf_budget("tree enumeration", count, limit)?;
    Ok(TreeEnumeration::new(n, h))
}

pub struct TreeEnumeration {
    n: usize,
    height: usize,
    // Subtree shapes of height `height - 1`, indexed by leaf count.
    below: HashMap<usize, Vec<Shape>>,
    mask: u64,
    parts: Vec<usize>,
    odometer: Option<Vec<usize>>,
}

impl TreeEnumeration {
    fn new(n: usize, height: usize) -> Self {
        let mut e = TreeEnumeration {
            n,
            height,
            below: HashMap::new(),
            mask: 0,
            parts: Vec::new(),
            odometer: None,
        };
        e.load_composition();
        e
    }

    fn load_composition(&mut self) {
        if self.height == 1 {
            self.parts = vec![1; self.n];
            self.odometer = Some(vec![0; self.n]);
            return;
        }
        // Bit i of the mask set means a cut after leaf i + 1.
        let mut parts = Vec::new();
        let mut run = 1;
        for i in 0..self.n - 1 {
            if self.mask >> i & 1 == 1 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        let memo = &mut self.below;
        for &p in &parts {
            memo.entry(p).or_insert_with(|| all_shapes(p, self.height - 1));
        }
        self.odometer = Some(vec![0; parts.len()]);
        self.parts = parts;
    }

    fn advance(&mut self) {
        if self.height == 1 {
            self.odometer = None;
            return;
        }
        let odometer = self.odometer.as_mut().expect("active odometer");
        let mut pos = odometer.len();
        while pos > 0 {
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < self.below[&self.parts[pos]].len() {
                return;
            }
            odometer[pos] = 0;
        }
        self.mask += 1;
        if self.mask >> (self.n - 1) != 0 {
            self.odometer = None;
        } else {
            self.load_composition();
        }
    }
}

impl Iterator for TreeEnumeration {
    type Item = OrderedTree;

    fn next(&mut self) -> Option<OrderedTree> {
        let odometer = self.odometer.as_ref()?;
        let shape = if self.height == 1 {
            Shape((0..self.n).map(|_| Shape::leaf()).collect())
        } else {
            Shape(
                self.parts
                    .iter()
                    .zip(odometer)
                    .map(|(p, &i)| self.below[p][i].clone())
                    .collect(),
            )
        };
        self.advance();
        Some(OrderedTree::from_shape(&shape).expect("enumerated shapes are well formed"))
    }
}

/// All shapes of the given height with `n` leaves (materialised).
fn all_shapes(n: usize, h: usize) -> Vec<Shape> {
    if h == 1 {
        return vec![Shape((0..n).map(|_| Shape::leaf()).collect())];
    }
    let mut out = Vec::new();
    for mask in 0..1u64 << (n - 1) {
        let mut parts = Vec::new();
        let mut run = 1;
        for i in 0..n - 1 {
            if mask >> i & 1 == 1 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        let options: Vec<Vec<Shape>> = parts.iter().map(|&p| all_shapes(p, h - 1)).collect();
        let mut idx = vec![0usize; parts.len()];
        'product: loop {
            out.push(Shape(idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect()));
            let mut pos = idx.len();
            while pos > 0 {
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < options[pos].len() {
                    continue 'product;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    out
}

/// Outcome of a brute-force universality check.
#[derive(Debug, Clone)]
pub struct Universality {
    pub universal: bool,
    /// First tree (in enumeration order) that does not embed.
    pub witness: Option<OrderedTree>,
}

/// Checks that every height-`h` tree with exactly `n` leaves embeds into `tree`.
pub fn is_universal(tree: &OrderedTree, n: usize, h: usize, limit: u128) -> Result<Universality, TreeError> {
    if tree.height != h {
        return Err(TreeError::HeightMismatch {
            expected: h,
            found: tree.height,
        });
    }
    for t in enumerate_trees(n, h, limit)? {
        if embed(&t, tree)?.is_none() {
            return Ok(Universality {
                universal: false,
                witness: Some(t),
            });
        }
    }
    Ok(Universality {
        universal: true,
        witness: None,
    })
}

/// Smallest leaf count of an `(n, h)`-universal tree, with one witness.
///
/// Candidate sizes ascend from the lower bound `g(n, h)`; every height-`h`
/// tree of each size is tried.
pub fn find_minimal_universal(n: usize, h: usize, limit: u128) -> Result<(usize, OrderedTree), TreeError> {
    let targets: Vec<OrderedTree> = enumerate_trees(n, h, limit)?.collect();
    let start = bounds::g_recurrence(n as u64, h as u32);
    let start = usize::try_from(&start).map_err(|_| TreeError::TooLarge {
        what: "lower bound",
        count: u128::MAX,
        limit,
    })?;
    let upper = usize::try_from(&bounds::f_recurrence(n as u64, h as u32)).unwrap_or(usize::MAX);
    for size in start..=upper {
        for candidate in enumerate_trees(size, h, limit)? {
            if candidate.children[0].len() < n && h > 0 {
                // The tree with n single-leaf paths needs n root children.
                continue;
            }
            let mut universal = true;
            for t in &targets {
                if embed(t, &candidate)?.is_none() {
                    universal = false;
                    break;
                }
            }
            if universal {
                return Ok((size, candidate));
            }
        }
    }
    unreachable!("the succinct tree with f(n, h) leaves is universal")
}

/// The tree induced by a tuple signature, and each vertex's leaf.
#[derive(Debug, Clone)]
pub struct SignatureTree {
    /// `None` when every vertex is Top.
    pub tree: Option<OrderedTree>,
    pub leaf_of: Vec<Option<LeafId>>,
}

/// Prefix tree of the distinct non-Top tuples of `sig`. Children are ordered
/// by component value, larger values further left, so leaf order and every
/// `p`-order agree with the tuple orders.
pub fn signature_to_tree(sig: &TupleSignature, n: usize, d: Priority) -> Result<SignatureTree, TreeError> {
    let h = d / 2;
    for (v, t) in sig.iter().enumerate() {
        if let Some(t) = t {
            if t.values().len() != h {
                return Err(TreeError::BadSignature {
                    vertex: v,
                    reason: format!("tuple has {} components, expected {h}", t.values().len()),
                });
            }
            if let Some(c) = t.values().iter().find(|&&c| c as usize > n) {
                return Err(TreeError::BadSignature {
                    vertex: v,
                    reason: format!("component {c} exceeds {n}"),
                });
            }
        }
    }
    let mut distinct: Vec<&[u32]> = sig.iter().flatten().map(|t| t.values()).collect();
    distinct.sort();
    distinct.dedup();
    if distinct.is_empty() {
        return Ok(SignatureTree {
            tree: None,
            leaf_of: vec![None; sig.len()],
        });
    }
    let codes: Vec<LeafCode> = distinct
        .iter()
        .map(|values| LeafCode(dense_indices(&distinct, values)))
        .collect();
    let tree = OrderedTree::from_codes(&codes)?;
    let leaf_of = sig
        .iter()
        .map(|t| {
            t.as_ref().map(|t| {
                let rank = distinct.binary_search(&t.values()).expect("tuple is listed");
                LeafId(rank as u32)
            })
        })
        .collect();
    Ok(SignatureTree {
        tree: Some(tree),
        leaf_of,
    })
}

/// Replaces each component by its rank among the distinct values that
/// follow the same prefix.
fn dense_indices(sorted: &[&[u32]], values: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(values.len());
    let mut lo = 0;
    let mut hi = sorted.len();
    for depth in 0..values.len() {
        let block = &sorted[lo..hi];
        let mut rank = 0u32;
        let mut prev = None;
        for t in block {
            if t[depth] >= values[depth] {
                break;
            }
            if prev != Some(t[depth]) {
                rank += 1;
                prev = Some(t[depth]);
            }
        }
        out.push(rank);
        let start = lo + block.partition_point(|t| t[depth] < values[depth]);
        let end = lo + block.partition_point(|t| t[depth] <= values[depth]);
        lo = start;
        hi = end;
    }
    out
}
