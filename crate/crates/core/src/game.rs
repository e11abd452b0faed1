//! Parity game arenas, validation, cycles and random instances.
//!
//! Priorities range over `[0, d]` with `d` even; the winner of an infinite
//! play is decided by the largest priority seen infinitely often (even means
//! Eve wins).

use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type Vertex = usize;
pub type Priority = usize;

/// The two players. Eve plays for even priorities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Eve,
    Adam,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }

    /// Owner tag used by the PGSolver format: 0 for Eve, 1 for Adam.
    pub fn to_index(self) -> usize {
        match self {
            Player::Eve => 0,
            Player::Adam => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Player> {
        match index {
            0 => Some(Player::Eve),
            1 => Some(Player::Adam),
            _ => None,
        }
    }

    /// The player favoured when `priority` is the largest one seen infinitely often.
    pub fn from_priority(priority: Priority) -> Player {
        if priority % 2 == 0 {
            Player::Eve
        } else {
            Player::Adam
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Eve => write!(f, "Eve"),
            Player::Adam => write!(f, "Adam"),
        }
    }
}

/// A set of vertices of one game, stored as a dense membership vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    bits: Vec<bool>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { bits: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        VertexSet { bits: vec![true; n] }
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut set = VertexSet::empty(n);
        for v in vertices {
            set.insert(v);
        }
        set
    }

    /// Size of the universe, not the number of members.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.bits[v]
    }

    /// Returns true if `v` was not already present.
    pub fn insert(&mut self, v: Vertex) -> bool {
        !std::mem::replace(&mut self.bits[v], true)
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        std::mem::replace(&mut self.bits[v], false)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(v, b)| b.then_some(v))
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> VertexSet {
        VertexSet {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(a, b)| !a || *b)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !(*a && *b))
    }

    fn zip_with(&self, other: &VertexSet, f: impl Fn(bool, bool) -> bool) -> VertexSet {
        assert_eq!(self.bits.len(), other.bits.len(), "vertex sets of different games");
        VertexSet {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Winning regions of both players. The two sets partition the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub eve_wins: VertexSet,
    pub adam_wins: VertexSet,
}

impl Region {
    pub fn from_eve_wins(eve_wins: VertexSet) -> Self {
        let adam_wins = eve_wins.complement();
        Region {
            eve_wins,
            adam_wins,
        }
    }

    pub fn winner(&self, v: Vertex) -> Player {
        if self.eve_wins.contains(v) {
            Player::Eve
        } else {
            Player::Adam
        }
    }

    pub fn is_partition(&self) -> bool {
        self.eve_wins.is_disjoint(&self.adam_wins)
            && self.eve_wins.union(&self.adam_wins).len() == self.eve_wins.universe()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid game: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParameters(String),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One broken invariant of a [`ParityGame`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyGame,
    OddBound { d: Priority },
    BoundTooSmall { d: Priority },
    LengthMismatch { field: &'static str, len: usize, expected: usize },
    DeadEnd { vertex: Vertex },
    PriorityExceedsBound { vertex: Vertex, priority: Priority, d: Priority },
    SuccessorOutOfRange { vertex: Vertex, successor: Vertex },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGame => write!(f, "game has no vertices"),
            Violation::OddBound { d } => write!(f, "priority bound d = {d} is odd"),
            Violation::BoundTooSmall { d } => write!(f, "priority bound d = {d} is below 2"),
            Violation::LengthMismatch { field, len, expected } => {
                write!(f, "{field} has {len} entries, expected {expected}")
            }
            Violation::DeadEnd { vertex } => write!(f, "dead end at vertex {vertex}"),
            Violation::PriorityExceedsBound { vertex, priority, d } => {
                write!(f, "priority exceeds d at vertex {vertex} ({priority} > {d})")
            }
            Violation::SuccessorOutOfRange { vertex, successor } => {
                write!(f, "successor {successor} of vertex {vertex} is out of range")
            }
        }
    }
}

/// A parity game arena: per-vertex owner, priority and ordered successor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    d: Priority,
    owner: Vec<Player>,
    priority: Vec<Priority>,
    successors: Vec<Vec<Vertex>>,
    names: Vec<Option<String>>,
}

impl ParityGame {
    /// Builds a game and rejects it if any invariant is violated.
    pub fn new(
        d: Priority,
        owner: Vec<Player>,
        priority: Vec<Priority>,
        successors: Vec<Vec<Vertex>>,
    ) -> Result<Self, GameError> {
        let game = Self::new_unchecked(d, owner, priority, successors);
        let violations = game.validate();
        if violations.is_empty() {
            Ok(game)
        } else {
            Err(GameError::Invalid(violations))
        }
    }

    /// Builds a game without checking it. Solvers assume [`ParityGame::validate`]
    /// reports nothing.
    pub fn new_unchecked(
        d: Priority,
        owner: Vec<Player>,
        priority: Vec<Priority>,
        successors: Vec<Vec<Vertex>>,
    ) -> Self {
        let n = owner.len();
        ParityGame {
            d,
            owner,
            priority,
            successors,
            names: vec![None; n],
        }
    }

    /// Smallest legal bound for the given priorities: the maximum rounded up
    /// to even, and at least 2.
    pub fn tight_bound(priorities: &[Priority]) -> Priority {
        let max = priorities.iter().copied().max().unwrap_or(0);
        (max + max % 2).max(2)
    }

    pub fn with_names(mut self, names: Vec<Option<String>>) -> Self {
        self.names = names;
        self
    }

    /// The same game with `d` replaced by [`ParityGame::tight_bound`].
    pub fn with_tight_bound(mut self) -> Self {
        self.d = Self::tight_bound(&self.priority);
        self
    }

    /// Every invariant violation, in vertex order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.owner.len();
        let mut out = Vec::new();
        if n == 0 {
            out.push(Violation::EmptyGame);
        }
        if self.d % 2 == 1 {
            out.push(Violation::OddBound { d: self.d });
        }
        if self.d < 2 {
            out.push(Violation::BoundTooSmall { d: self.d });
        }
        let mut ragged = false;
        for (field, len) in [
            ("priority", self.priority.len()),
            ("successors", self.successors.len()),
            ("names", self.names.len()),
        ] {
            if len != n {
                out.push(Violation::LengthMismatch { field, len, expected: n });
                ragged = true;
            }
        }
        if ragged {
            return out;
        }
        for v in 0..n {
            if self.priority[v] > self.d {
                out.push(Violation::PriorityExceedsBound {
                    vertex: v,
                    priority: self.priority[v],
                    d: self.d,
                });
            }
            if self.successors[v].is_empty() {
                out.push(Violation::DeadEnd { vertex: v });
            }
            for &w in &self.successors[v] {
                if w >= n {
                    out.push(Violation::SuccessorOutOfRange { vertex: v, successor: w });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }

    pub fn num_edges(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// The even priority bound `d`.
    pub fn d(&self) -> Priority {
        self.d
    }

    pub fn owner(&self, v: Vertex) -> Player {
        self.owner[v]
    }

    pub fn priority(&self, v: Vertex) -> Priority {
        self.priority[v]
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.successors[v]
    }

    pub fn name(&self, v: Vertex) -> Option<&str> {
        self.names[v].as_deref()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.num_vertices()
    }

    pub fn vertices_of(&self, player: Player) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices().filter(move |&v| self.owner[v] == player)
    }

    pub fn max_priority(&self) -> Priority {
        self.priority.iter().copied().max().unwrap_or(0)
    }

    /// Reverse adjacency: for each vertex the list of its predecessors, each listed once.
    pub fn predecessors(&self) -> Vec<Vec<Vertex>> {
        let mut preds = vec![Vec::new(); self.num_vertices()];
        for v in self.vertices() {
            for &w in &self.successors[v] {
                if preds[w].last() != Some(&v) {
                    preds[w].push(v);
                }
            }
        }
        preds
    }
}

/// Whether the largest priority of a cycle is even or odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleParity {
    Even,
    Odd,
}

impl CycleParity {
    pub fn winner(self) -> Player {
        match self {
            CycleParity::Even => Player::Eve,
            CycleParity::Odd => Player::Adam,
        }
    }
}

/// A nonempty closed walk `v_0 → v_1 → … → v_k → v_0` in a game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    vertices: Vec<Vertex>,
}

impl Cycle {
    pub fn new(game: &ParityGame, vertices: Vec<Vertex>) -> Result<Self, GameError> {
        if vertices.is_empty() {
            return Err(GameError::NotACycle("empty vertex sequence".into()));
        }
        let n = game.num_vertices();
        if let Some(&v) = vertices.iter().find(|&&v| v >= n) {
            return Err(GameError::NotACycle(format!("vertex {v} is out of range")));
        }
        for (i, &v) in vertices.iter().enumerate() {
            let next = vertices[(i + 1) % vertices.len()];
            if !game.successors(v).contains(&next) {
                return Err(GameError::NotACycle(format!("no edge {v} -> {next}")));
            }
        }
        Ok(Cycle { vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
}

/// Even iff the maximum priority on the cycle is even.
pub fn classify_cycle(game: &ParityGame, cycle: &Cycle) -> CycleParity {
    let max = cycle
        .vertices
        .iter()
        .map(|&v| game.priority(v))
        .max()
        .expect("cycles are nonempty");
    if max % 2 == 0 {
        CycleParity::Even
    } else {
        CycleParity::Odd
    }
}

/// Uniformly random game: owners and priorities uniform, out-degree uniform in
/// `degree`, successors drawn without replacement. Deterministic in `seed`.
pub fn generate_random_game(
    n: usize,
    d: Priority,
    degree: (usize, usize),
    seed: u64,
) -> Result<ParityGame, GameError> {
    let (lo, hi) = degree;
    if n == 0 {
        return Err(GameError::InfeasibleParameters("n must be at least 1".into()));
    }
    if d < 2 || d % 2 == 1 {
        return Err(GameError::InfeasibleParameters(format!(
            "d must be even and at least 2, got {d}"
        )));
    }
    if lo < 1 || lo > hi || hi > n {
        return Err(GameError::InfeasibleParameters(format!(
            "out-degree range [{lo}, {hi}] must lie within [1, {n}]"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut owner = Vec::with_capacity(n);
    let mut priority = Vec::with_capacity(n);
    let mut successors = Vec::with_capacity(n);
    for _ in 0..n {
        owner.push(if rng.gen_bool(0.5) { Player::Eve } else { Player::Adam });
        priority.push(rng.gen_range(0..=d));
        let k = rng.gen_range(lo..=hi);
        let mut succ = sample(&mut rng, n, k).into_vec();
        succ.sort_unstable();
        successors.push(succ);
    }
    ParityGame::new(d, owner, priority, successors)
}
