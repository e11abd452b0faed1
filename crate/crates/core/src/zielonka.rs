//! Zielonka's algorithm as alternating greatest and least fixed points.
//!
//! A [`SubGame`] masks the base game: `active` vertices are still played,
//! `win`/`lose` vertices are terminal and end the play in favour of Eve
//! resp. Adam. Eve's objective in a subgame is `(Parity ∪ Reach(win)) ∩ Safe(lose)`.
//!
//! Solving a subgame with top priority `p` iterates an operator on sets of
//! active vertices. Each step makes the priority-`p` vertices terminal (won
//! by Eve iff they can move into the current set) and solves the resulting
//! game with priorities below `p` recursively. The iteration starts from all
//! vertices when `p` is even (greatest fixed point) and from the empty set
//! when `p` is odd (least fixed point).

use std::cmp::Ordering;

use log::trace;
use thiserror::Error;

use crate::game::{ParityGame, Player, Priority, Region, Vertex, VertexSet};
use crate::tree::LevelMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZielonkaError {
    #[error("terminal and active vertex sets overlap")]
    Overlap,
    #[error("active vertex {vertex} has priority {priority} above the cap {cap}")]
    AboveCap { vertex: Vertex, priority: Priority, cap: Priority },
    #[error("active vertex {0} has no successor inside the subgame")]
    DeadEnd(Vertex),
    #[error("tuples of different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
}

/// A game restricted to `active` vertices with terminal `win`/`lose` vertices.
#[derive(Debug, Clone)]
pub struct SubGame<'a> {
    game: &'a ParityGame,
    active: VertexSet,
    win: VertexSet,
    lose: VertexSet,
    cap: Priority,
}

impl<'a> SubGame<'a> {
    pub fn new(
        game: &'a ParityGame,
        active: VertexSet,
        win: VertexSet,
        lose: VertexSet,
        cap: Priority,
    ) -> Result<Self, ZielonkaError> {
        if !active.is_disjoint(&win) || !active.is_disjoint(&lose) || !win.is_disjoint(&lose) {
            return Err(ZielonkaError::Overlap);
        }
        let sg = SubGame {
            game,
            active,
            win,
            lose,
            cap,
        };
        let surviving = sg.surviving();
        for v in sg.active.iter() {
            let priority = game.priority(v);
            if priority > cap {
                return Err(ZielonkaError::AboveCap { vertex: v, priority, cap });
            }
            if !game.successors(v).iter().any(|&w| surviving.contains(w)) {
                return Err(ZielonkaError::DeadEnd(v));
            }
        }
        Ok(sg)
    }

    /// The whole game: every vertex active, no terminals, cap `d`.
    pub fn whole(game: &'a ParityGame) -> Self {
        let n = game.num_vertices();
        SubGame {
            game,
            active: VertexSet::full(n),
            win: VertexSet::empty(n),
            lose: VertexSet::empty(n),
            cap: game.d(),
        }
    }

    pub fn active(&self) -> &VertexSet {
        &self.active
    }

    pub fn terminal_win(&self) -> &VertexSet {
        &self.win
    }

    pub fn terminal_lose(&self) -> &VertexSet {
        &self.lose
    }

    pub fn priority_cap(&self) -> Priority {
        self.cap
    }

    fn surviving(&self) -> VertexSet {
        self.active.union(&self.win).union(&self.lose)
    }

    /// Active vertices of priority exactly `cap`.
    pub fn top_vertices(&self) -> VertexSet {
        VertexSet::from_vertices(
            self.active.universe(),
            self.active.iter().filter(|&v| self.game.priority(v) == self.cap),
        )
    }

    /// Active vertices from which Eve can force the next vertex into `target`.
    /// Successors outside the subgame are ignored.
    pub fn pre(&self, target: &VertexSet) -> VertexSet {
        let surviving = self.surviving();
        let mut out = VertexSet::empty(self.active.universe());
        for u in self.active.iter() {
            let mut succ = self
                .game
                .successors(u)
                .iter()
                .filter(|&&w| surviving.contains(w));
            let hit = match self.game.owner(u) {
                Player::Eve => succ.any(|&w| target.contains(w)),
                Player::Adam => succ.all(|&w| target.contains(w)),
            };
            if hit {
                out.insert(u);
            }
        }
        out
    }

    /// Eve's winning active vertices for `Reach(win) ∩ Safe(lose)`: the
    /// attractor to `win`. Staying among active vertices forever loses, which
    /// is the parity outcome when every active priority is 1.
    pub fn solve_reach_safe(&self) -> VertexSet {
        let mut x = VertexSet::empty(self.active.universe());
        loop {
            let next = self.pre(&x.union(&self.win));
            if next == x {
                return x;
            }
            x = next;
        }
    }

    /// Eve's winning active vertices when staying among active vertices
    /// forever wins (every active priority is 0): the largest set from which
    /// she can keep the play in it or reach `win`.
    pub fn solve_safety(&self) -> VertexSet {
        let mut y = self.active.clone();
        loop {
            let next = self.pre(&y.union(&self.win));
            if next == y {
                return y;
            }
            y = next;
        }
    }

    /// The same subgame with cap lowered by one. Requires no active vertex at the cap.
    fn lowered(&self) -> SubGame<'a> {
        SubGame {
            cap: self.cap - 1,
            ..self.clone()
        }
    }

    /// The recursive game used by one iteration step from `current`: vertices
    /// of priority `cap` become terminal, winning iff in `pre(current ∪ win)`.
    pub fn inner(&self, current: &VertexSet) -> SubGame<'a> {
        let top = self.top_vertices();
        let win_k = top.intersection(&self.pre(&current.union(&self.win)));
        let lose_k = top.difference(&win_k);
        SubGame {
            game: self.game,
            active: self.active.difference(&top),
            win: self.win.union(&win_k),
            lose: self.lose.union(&lose_k),
            cap: self.cap.saturating_sub(1),
        }
    }

    /// One application of the fixed-point operator: winners of
    /// [`SubGame::inner`] plus the top-priority vertices declared winning.
    pub fn operator(&self, current: &VertexSet) -> VertexSet {
        let inner = self.inner(current);
        let win_k = inner.win.difference(&self.win);
        inner.solve().union(&win_k)
    }

    fn iterate(&self, start: VertexSet) -> Vec<VertexSet> {
        let mut stages: Vec<VertexSet> = Vec::new();
        let mut current = start;
        loop {
            let next = self.operator(&current);
            let stable = next == current;
            if !stable || stages.is_empty() {
                stages.push(next.clone());
            }
            if stable {
                break;
            }
            current = next;
        }
        debug_assert!(stages.len() <= self.active.len() + 1, "fixed point must stabilise within n steps");
        stages
    }

    /// Stages `Y_0 ⊇ Y_1 ⊇ …` of the greatest fixed point iteration, ending
    /// with the fixed point (no repeated final entry).
    pub fn even_stages(&self) -> Vec<VertexSet> {
        self.iterate(self.active.clone())
    }

    /// Stages `X_0 ⊆ X_1 ⊆ …` of the least fixed point iteration, ending
    /// with the fixed point (no repeated final entry).
    pub fn odd_stages(&self) -> Vec<VertexSet> {
        self.iterate(VertexSet::empty(self.active.universe()))
    }

    /// Greatest fixed point iteration for an even cap.
    pub fn solve_even(&self) -> VertexSet {
        debug_assert!(self.cap % 2 == 0);
        self.even_stages().pop().expect("at least one stage")
    }

    /// Least fixed point iteration for an odd cap.
    pub fn solve_odd(&self) -> VertexSet {
        debug_assert!(self.cap % 2 == 1);
        self.odd_stages().pop().expect("at least one stage")
    }

    /// Eve's winning active vertices.
    pub fn solve(&self) -> VertexSet {
        if self.active.is_empty() {
            return self.active.clone();
        }
        let has_zero = || self.active.iter().any(|v| self.game.priority(v) == 0);
        match self.cap {
            0 => self.solve_safety(),
            1 if !has_zero() => self.solve_reach_safe(),
            _ if self.top_vertices().is_empty() => self.lowered().solve(),
            p if p % 2 == 0 => self.solve_even(),
            _ => self.solve_odd(),
        }
    }
}

/// Winning regions of a valid game.
pub fn solve_zielonka(game: &ParityGame) -> Region {
    let eve = SubGame::whole(game).solve();
    trace!("zielonka: Eve wins {} of {} vertices", eve.len(), game.num_vertices());
    Region::from_eve_wins(eve)
}

/// A tuple in `[0, n]^{d/2}`; position `i` holds the component for odd priority `d - 1 - 2i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignatureTuple {
    values: Vec<u32>,
}

impl SignatureTuple {
    pub fn new(values: Vec<u32>) -> Self {
        SignatureTuple { values }
    }

    pub fn zeros(d: Priority) -> Self {
        SignatureTuple { values: vec![0; d / 2] }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// The bound `d` this tuple is indexed against.
    pub fn d(&self) -> Priority {
        2 * self.values.len()
    }

    /// Component for the odd priority `p`.
    pub fn component(&self, p: Priority) -> u32 {
        self.values[Self::position(self.d(), p)]
    }

    fn position(d: Priority, p: Priority) -> usize {
        assert!(p % 2 == 1 && p < d, "components are indexed by odd priorities below d");
        (d - 1 - p) / 2
    }

    /// The restriction to odd priorities `>= p`, most significant first.
    pub fn truncated(&self, p: Priority) -> &[u32] {
        &self.values[..LevelMap::new(self.d()).level(p)]
    }
}

/// `None` stands for Top.
pub type TupleSignature = Vec<Option<SignatureTuple>>;

/// Lexicographic comparison of the restrictions to odd priorities `>= p`.
pub fn tuple_compare(x: &SignatureTuple, y: &SignatureTuple, p: Priority) -> Result<Ordering, ZielonkaError> {
    if x.values.len() != y.values.len() {
        return Err(ZielonkaError::LengthMismatch(x.values.len(), y.values.len()));
    }
    Ok(x.truncated(p).cmp(y.truncated(p)))
}

/// `≥_p` on tuples extended with Top as the largest element. Returns whether
/// `a` dominates `b`, strictly if `strict`.
fn dominates(a: &Option<SignatureTuple>, b: &Option<SignatureTuple>, p: Priority, strict: bool) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => {
            let ord = x.truncated(p).cmp(y.truncated(p));
            if strict {
                ord == Ordering::Greater
            } else {
                ord != Ordering::Less
            }
        }
    }
}

/// Checks both signature conditions on a tuple-valued map. On failure returns
/// the first offending vertex (and, for Adam, the offending successor).
pub fn validate_tuple_signature(game: &ParityGame, sig: &TupleSignature) -> Result<(), (Vertex, Option<Vertex>)> {
    for v in game.vertices() {
        let p = game.priority(v);
        let strict = p % 2 == 1;
        let ok = |w: &Vertex| dominates(&sig[v], &sig[*w], p, strict);
        match game.owner(v) {
            Player::Eve => {
                if !game.successors(v).iter().any(ok) {
                    return Err((v, None));
                }
            }
            Player::Adam => {
                if let Some(&w) = game.successors(v).iter().find(|w| !ok(w)) {
                    return Err((v, Some(w)));
                }
            }
        }
    }
    Ok(())
}

/// A signature read off the least fixed point stages of the recursion.
///
/// Along the recursion, the component for odd `p` of a vertex is `k + 1`
/// where `X_k` is the first stage of the priority-`p` iteration containing
/// it, and the lower components come from the recursive game of that stage.
/// Vertices of priority `p` get zeros below `p`. Top marks Adam's region.
pub fn extract_signature(game: &ParityGame) -> TupleSignature {
    solve_with_signature(game).1
}

pub fn solve_with_signature(game: &ParityGame) -> (Region, TupleSignature) {
    let whole = SubGame::whole(game);
    let eve = whole.solve();
    let d = game.d();
    let mut components = vec![vec![0u32; d / 2]; game.num_vertices()];
    assign_components(&whole, &eve, d, &mut components);
    let sig = components
        .into_iter()
        .enumerate()
        .map(|(v, values)| eve.contains(v).then(|| SignatureTuple::new(values)))
        .collect();
    (Region::from_eve_wins(eve), sig)
}

/// Fills components at and below the cap of `sg` for `target`, which must
/// consist of Eve's winners in `sg`.
fn assign_components(sg: &SubGame<'_>, target: &VertexSet, d: Priority, out: &mut [Vec<u32>]) {
    if target.is_empty() || sg.cap == 0 {
        return;
    }
    let p = sg.cap;
    let top = sg.top_vertices();
    if top.is_empty() {
        return assign_components(&sg.lowered(), target, d, out);
    }
    if p % 2 == 0 {
        let fixed = sg.even_stages().pop().expect("at least one stage");
        assign_components(&sg.inner(&fixed), &target.difference(&top), d, out);
    } else {
        let pos = SignatureTuple::position(d, p);
        let mut previous = VertexSet::empty(target.universe());
        for (k, stage) in sg.odd_stages().into_iter().enumerate() {
            let fresh = stage.difference(&previous).intersection(target);
            for v in fresh.iter() {
                out[v][pos] = k as u32 + 1;
            }
            assign_components(&sg.inner(&previous), &fresh.difference(&top), d, out);
            previous = stage;
        }
        debug_assert!(target.is_subset(&previous));
    }
}
