//! Progress measures over an ordered tree and the generic value iteration.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{ParityGame, Player, Region, Vertex, VertexSet};
use crate::oracle::PositionalStrategy;
use crate::tree::{embed, signature_to_tree, LeafId, OrderedTree, TreeError};
use crate::zielonka::TupleSignature;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("tree height {tree} does not match d/2 = {expected}")]
    HeightMismatch { tree: usize, expected: usize },
    #[error("measure has {found} entries for {expected} vertices")]
    LengthMismatch { found: usize, expected: usize },
    #[error("leaf {0:?} is not in the tree")]
    UnknownLeaf(LeafId),
    #[error("not a signature: {0}")]
    NotASignature(SignatureViolation),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A leaf of the tree, or Top, which lies above every leaf in every `p`-order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureValue {
    Leaf(LeafId),
    Top,
}

impl MeasureValue {
    pub fn is_top(self) -> bool {
        self == MeasureValue::Top
    }

    pub fn leaf(self) -> Option<LeafId> {
        match self {
            MeasureValue::Leaf(l) => Some(l),
            MeasureValue::Top => None,
        }
    }

    fn from_option(leaf: Option<LeafId>) -> Self {
        leaf.map_or(MeasureValue::Top, MeasureValue::Leaf)
    }
}

/// Comparison of two measure values truncated to `level`.
pub fn compare_values(tree: &OrderedTree, a: MeasureValue, b: MeasureValue, level: usize) -> Ordering {
    match (a, b) {
        (MeasureValue::Top, MeasureValue::Top) => Ordering::Equal,
        (MeasureValue::Top, _) => Ordering::Greater,
        (_, MeasureValue::Top) => Ordering::Less,
        (MeasureValue::Leaf(x), MeasureValue::Leaf(y)) => tree.compare_at(x, y, level),
    }
}

fn dominates(tree: &OrderedTree, a: MeasureValue, b: MeasureValue, level: usize, strict: bool) -> bool {
    match compare_values(tree, a, b, level) {
        Ordering::Greater => true,
        Ordering::Equal => !strict,
        Ordering::Less => false,
    }
}

/// One value per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Measure {
    values: Vec<MeasureValue>,
}

impl Measure {
    pub fn new(values: Vec<MeasureValue>) -> Self {
        Measure { values }
    }

    /// Every vertex at the smallest leaf.
    pub fn bottom(tree: &OrderedTree, n: usize) -> Self {
        Measure {
            values: vec![MeasureValue::Leaf(tree.min_leaf()); n],
        }
    }

    pub fn top(n: usize) -> Self {
        Measure {
            values: vec![MeasureValue::Top; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: Vertex) -> MeasureValue {
        self.values[v]
    }

    pub fn set(&mut self, v: Vertex, value: MeasureValue) {
        self.values[v] = value;
    }

    pub fn values(&self) -> &[MeasureValue] {
        &self.values
    }

    /// Pointwise order.
    pub fn leq(&self, other: &Measure) -> bool {
        self.values.len() == other.values.len() && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    fn check(&self, tree: &OrderedTree, n: usize) -> Result<(), MeasureError> {
        if self.values.len() != n {
            return Err(MeasureError::LengthMismatch {
                found: self.values.len(),
                expected: n,
            });
        }
        match self.values.iter().filter_map(|v| v.leaf()).find(|l| l.0 as usize >= tree.leaf_count()) {
            Some(l) => Err(MeasureError::UnknownLeaf(l)),
            None => Ok(()),
        }
    }
}

/// Eve wins exactly on the vertices whose value is not Top.
pub fn winning_region_from_measure(mu: &Measure) -> Region {
    let n = mu.len();
    let eve = VertexSet::from_vertices(n, (0..n).filter(|&v| !mu.get(v).is_top()));
    Region::from_eve_wins(eve)
}

fn check_height(game: &ParityGame, tree: &OrderedTree) -> Result<(), MeasureError> {
    if tree.height() != game.d() / 2 {
        return Err(MeasureError::HeightMismatch {
            tree: tree.height(),
            expected: game.d() / 2,
        });
    }
    Ok(())
}

fn level_of(game: &ParityGame, tree: &OrderedTree, v: Vertex) -> usize {
    tree.level_map().level(game.priority(v))
}

/// The least leaf that `v` needs given its successors' values, before
/// taking the maximum with `μ(v)`.
///
/// Eve needs to dominate one successor, so she takes the minimum of the
/// per-successor answers; Adam's vertex must dominate all of them, and since
/// the answer is monotone in the target, the maximum of the per-successor
/// answers is the least leaf dominating every successor.
pub fn lift_target(game: &ParityGame, tree: &OrderedTree, mu: &Measure, v: Vertex) -> MeasureValue {
    let level = level_of(game, tree, v);
    let strict = game.priority(v) % 2 == 1;
    let per_successor = game
        .successors(v)
        .iter()
        .map(|&w| MeasureValue::from_option(tree.min_leaf_geq(mu.get(w).leaf(), level, strict)));
    match game.owner(v) {
        Player::Eve => per_successor.min(),
        Player::Adam => per_successor.max(),
    }
    .expect("vertices have successors")
}

/// `Lift_v(μ)(v)`: the value `v` takes after one lift. It never decreases.
pub fn lift_value(game: &ParityGame, tree: &OrderedTree, mu: &Measure, v: Vertex) -> MeasureValue {
    lift_target(game, tree, mu, v).max(mu.get(v))
}

/// First vertex/successor pair breaking the signature conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureViolation {
    pub vertex: Vertex,
    pub successor: Vertex,
}

impl fmt::Display for SignatureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertex {} is not justified by successor {}", self.vertex, self.successor)
    }
}

/// Checks the dominance conditions directly: a non-Top Eve vertex must
/// dominate some successor at its priority (strictly when odd), a non-Top
/// Adam vertex every successor.
pub fn validate_signature(game: &ParityGame, tree: &OrderedTree, mu: &Measure) -> Result<(), SignatureViolation> {
    for v in game.vertices() {
        let value = mu.get(v);
        if value.is_top() {
            continue;
        }
        let level = level_of(game, tree, v);
        let strict = game.priority(v) % 2 == 1;
        let ok = |w: &Vertex| dominates(tree, value, mu.get(*w), level, strict);
        let succ = game.successors(v);
        let bad = match game.owner(v) {
            Player::Eve => (!succ.iter().any(ok)).then(|| succ[0]),
            Player::Adam => succ.iter().find(|w| !ok(w)).copied(),
        };
        if let Some(successor) = bad {
            return Err(SignatureViolation { vertex: v, successor });
        }
    }
    Ok(())
}

/// Eve's positional strategy read off a signature: each non-Top Eve vertex
/// moves to its smallest-id successor that it dominates; Top Eve vertices
/// move to their smallest-id successor.
pub fn strategy_from_measure(game: &ParityGame, tree: &OrderedTree, mu: &Measure) -> Result<PositionalStrategy, MeasureError> {
    let mut choice = vec![None; game.num_vertices()];
    for v in game.vertices_of(Player::Eve) {
        let value = mu.get(v);
        let succ = game.successors(v).iter().copied();
        let pick = if value.is_top() {
            succ.min()
        } else {
            let level = level_of(game, tree, v);
            let strict = game.priority(v) % 2 == 1;
            succ.filter(|&w| dominates(tree, value, mu.get(w), level, strict)).min()
        };
        match pick {
            Some(w) => choice[v] = Some(w),
            None => {
                return Err(MeasureError::NotASignature(SignatureViolation {
                    vertex: v,
                    successor: game.successors(v)[0],
                }))
            }
        }
    }
    Ok(PositionalStrategy::new(game, Player::Eve, choice).expect("choices are successors"))
}

/// Which vertex to lift next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Worklist seeded with every vertex; predecessors of a lifted vertex are re-queued.
    Fifo,
    /// Sweeps over the vertices in id order until a sweep changes nothing.
    RoundRobin,
    /// Picks uniformly among the vertices that might still be liftable.
    Random(u64),
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fifo" => Ok(Policy::Fifo),
            "roundrobin" => Ok(Policy::RoundRobin),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(Policy::Random)
                    .map_err(|e| format!("bad seed `{seed}`: {e}")),
                None => Err(format!("unknown policy `{s}` (expected fifo, roundrobin or random:SEED)")),
            },
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Fifo => write!(f, "fifo"),
            Policy::RoundRobin => write!(f, "roundrobin"),
            Policy::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftStats {
    pub total: u64,
    pub per_vertex: Vec<u64>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct ValueIteration {
    pub measure: Measure,
    pub region: Region,
    pub stats: LiftStats,
}

/// Value iteration from the all-`ℓ_min` measure.
pub fn value_iteration(game: &ParityGame, tree: &OrderedTree, policy: Policy) -> Result<ValueIteration, MeasureError> {
    value_iteration_from(game, tree, policy, Measure::bottom(tree, game.num_vertices()))
}

/// Value iteration from an arbitrary start; returns the least simultaneous
/// fixed point of the lifts above `start`.
pub fn value_iteration_from(game: &ParityGame, tree: &OrderedTree, policy: Policy, start: Measure) -> Result<ValueIteration, MeasureError> {
    check_height(game, tree)?;
    start.check(tree, game.num_vertices())?;
    let clock = Instant::now();
    let n = game.num_vertices();
    let mut mu = start;
    let mut per_vertex = vec![0u64; n];

    let mut try_lift = |mu: &mut Measure, v: Vertex| -> bool {
        let next = lift_value(game, tree, mu, v);
        if next != mu.get(v) {
            mu.set(v, next);
            per_vertex[v] += 1;
            true
        } else {
            false
        }
    };

    match policy {
        Policy::Fifo => {
            let preds = game.predecessors();
            let mut queue: VecDeque<Vertex> = (0..n).collect();
            let mut queued = vec![true; n];
            while let Some(v) = queue.pop_front() {
                queued[v] = false;
                if try_lift(&mut mu, v) {
                    for &u in &preds[v] {
                        if !queued[u] {
                            queued[u] = true;
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        Policy::RoundRobin => loop {
            let mut changed = false;
            for v in 0..n {
                changed |= try_lift(&mut mu, v);
            }
            if !changed {
                break;
            }
        },
        Policy::Random(seed) => {
            let preds = game.predecessors();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pending: Vec<Vertex> = (0..n).collect();
            let mut slot: Vec<Option<usize>> = (0..n).map(Some).collect();
            while !pending.is_empty() {
                let i = rng.gen_range(0..pending.len());
                let v = pending[i];
                if try_lift(&mut mu, v) {
                    for &u in &preds[v] {
                        if slot[u].is_none() {
                            slot[u] = Some(pending.len());
                            pending.push(u);
                        }
                    }
                } else {
                    let last = *pending.last().expect("nonempty");
                    pending.swap_remove(i);
                    if last != v {
                        slot[last] = Some(i);
                    }
                    slot[v] = None;
                }
            }
        }
    }

    let region = winning_region_from_measure(&mu);
    Ok(ValueIteration {
        measure: mu,
        region,
        stats: LiftStats {
            total: per_vertex.iter().sum(),
            per_vertex,
            elapsed: clock.elapsed(),
        },
    })
}

/// Carries a tuple signature into `tree` through the prefix tree of its
/// values and an embedding. `None` when that prefix tree does not embed.
pub fn transfer_signature(sig: &TupleSignature, tree: &OrderedTree, n: usize, d: usize) -> Result<Option<Measure>, MeasureError> {
    let induced = signature_to_tree(sig, n, d)?;
    let Some(small) = induced.tree else {
        return Ok(Some(Measure::top(sig.len())));
    };
    let Some(embedding) = embed(&small, tree)? else {
        return Ok(None);
    };
    let values = induced
        .leaf_of
        .iter()
        .map(|leaf| match leaf {
            Some(l) => MeasureValue::Leaf(embedding.leaf_image(&small, tree, *l)),
            None => MeasureValue::Top,
        })
        .collect();
    Ok(Some(Measure::new(values)))
}
