//! Ground truth for tiny games by enumerating positional strategies.
//!
//! Parity games are positionally determined, so Eve wins from `v` iff some
//! positional strategy of hers beats every positional strategy of Adam. Both
//! quantifiers are checked exhaustively; determinacy is observed, not assumed.

use thiserror::Error;

use crate::game::{ParityGame, Player, Region, Vertex, VertexSet};

/// Default ceiling on the number of positional strategies per player.
pub const DEFAULT_STRATEGY_CAP: u128 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{player} has {count} positional strategies, above the cap of {cap}")]
    TooLarge { player: Player, count: u128, cap: u128 },
    #[error("strategy for {player} is not total or picks a non-successor at vertex {vertex}")]
    BadStrategy { player: Player, vertex: Vertex },
}

/// A positional strategy: one successor per vertex of `player`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalStrategy {
    player: Player,
    choice: Vec<Option<Vertex>>,
}

impl PositionalStrategy {
    pub fn new(game: &ParityGame, player: Player, choice: Vec<Option<Vertex>>) -> Result<Self, OracleError> {
        if choice.len() != game.num_vertices() {
            return Err(OracleError::BadStrategy { player, vertex: choice.len().min(game.num_vertices()) });
        }
        for v in game.vertices() {
            let ok = match (game.owner(v) == player, choice[v]) {
                (true, Some(w)) => game.successors(v).contains(&w),
                (false, None) => true,
                _ => false,
            };
            if !ok {
                return Err(OracleError::BadStrategy { player, vertex: v });
            }
        }
        Ok(PositionalStrategy { player, choice })
    }

    pub fn player(&self) -> Player {
        self.player
    }

    /// The chosen successor, or `None` for vertices of the other player.
    pub fn choice(&self, v: Vertex) -> Option<Vertex> {
        self.choice[v]
    }
}

/// Number of positional strategies of `player` (saturating).
pub fn strategy_count(game: &ParityGame, player: Player) -> u128 {
    game.vertices_of(player)
        .map(|v| game.successors(v).len() as u128)
        .fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// All positional strategies of `player`, in lexicographic order of successor
/// indices with the lowest vertex most significant.
pub fn strategies(game: &ParityGame, player: Player) -> Strategies<'_> {
    let owned: Vec<Vertex> = game.vertices_of(player).collect();
    Strategies {
        game,
        player,
        indices: Some(vec![0; owned.len()]),
        owned,
    }
}

pub struct Strategies<'a> {
    game: &'a ParityGame,
    player: Player,
    owned: Vec<Vertex>,
    indices: Option<Vec<usize>>,
}

impl Iterator for Strategies<'_> {
    type Item = PositionalStrategy;

    fn next(&mut self) -> Option<PositionalStrategy> {
        let indices = self.indices.as_mut()?;
        let mut choice = vec![None; self.game.num_vertices()];
        for (&v, &i) in self.owned.iter().zip(indices.iter()) {
            choice[v] = Some(self.game.successors(v)[i]);
        }
        let current = PositionalStrategy {
            player: self.player,
            choice,
        };

        let mut pos = self.owned.len();
        loop {
            if pos == 0 {
                self.indices = None;
                break;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < self.game.successors(self.owned[pos]).len() {
                break;
            }
            indices[pos] = 0;
        }
        Some(current)
    }
}

/// Winner of the unique play from `start` consistent with both strategies.
pub fn play_outcome(
    game: &ParityGame,
    eve: &PositionalStrategy,
    adam: &PositionalStrategy,
    start: Vertex,
) -> Player {
    let next = |v: Vertex| match game.owner(v) {
        Player::Eve => eve.choice(v),
        Player::Adam => adam.choice(v),
    }
    .expect("strategies must be total for their player");

    let mut seen_at = vec![usize::MAX; game.num_vertices()];
    let mut path = Vec::new();
    let mut v = start;
    while seen_at[v] == usize::MAX {
        seen_at[v] = path.len();
        path.push(v);
        v = next(v);
    }
    let max = path[seen_at[v]..]
        .iter()
        .map(|&u| game.priority(u))
        .max()
        .expect("cycle is nonempty");
    Player::from_priority(max)
}

/// Regions plus, for each vertex Eve wins, the first strategy in enumeration
/// order that wins from it.
#[derive(Debug, Clone)]
pub struct BruteForceSolution {
    pub region: Region,
    pub eve_witness: Vec<Option<PositionalStrategy>>,
}

pub struct BruteForce {
    cap: u128,
}

impl Default for BruteForce {
    fn default() -> Self {
        BruteForce {
            cap: DEFAULT_STRATEGY_CAP,
        }
    }
}

impl BruteForce {
    pub fn with_cap(cap: u128) -> Self {
        BruteForce { cap }
    }

    pub fn check_size(&self, game: &ParityGame) -> Result<(), OracleError> {
        for player in [Player::Eve, Player::Adam] {
            let count = strategy_count(game, player);
            if count > self.cap {
                return Err(OracleError::TooLarge {
                    player,
                    count,
                    cap: self.cap,
                });
            }
        }
        Ok(())
    }

    pub fn solve(&self, game: &ParityGame) -> Result<BruteForceSolution, OracleError> {
        self.check_size(game)?;
        let n = game.num_vertices();
        let adam_strategies: Vec<PositionalStrategy> = strategies(game, Player::Adam).collect();
        let mut eve_wins = VertexSet::empty(n);
        let mut eve_witness = vec![None; n];

        for sigma in strategies(game, Player::Eve) {
            let mut unbeaten = VertexSet::full(n);
            for tau in &adam_strategies {
                for v in game.vertices() {
                    if unbeaten.contains(v) && play_outcome(game, &sigma, tau, v) == Player::Adam {
                        unbeaten.remove(v);
                    }
                }
                if unbeaten.is_empty() {
                    break;
                }
            }
            for v in unbeaten.iter() {
                if eve_wins.insert(v) {
                    eve_witness[v] = Some(sigma.clone());
                }
            }
        }
        Ok(BruteForceSolution {
            region: Region::from_eve_wins(eve_wins),
            eve_witness,
        })
    }
}

/// Winning regions by exhaustive strategy enumeration, with the default cap.
pub fn solve_bruteforce(game: &ParityGame) -> Result<Region, OracleError> {
    BruteForce::default().solve(game).map(|s| s.region)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(owner: Vec<Player>, priority: Vec<usize>, successors: Vec<Vec<usize>>) -> ParityGame {
        let d = ParityGame::tight_bound(&priority);
        ParityGame::new(d, owner, priority, successors).unwrap()
    }

    fn trivial(g: &ParityGame, player: Player) -> PositionalStrategy {
        strategies(g, player).next().unwrap()
    }

    #[test]
    fn self_loops() {
        let even = game(vec![Player::Eve], vec![2], vec![vec![0]]);
        assert!(solve_bruteforce(&even).unwrap().eve_wins.contains(0));
        let odd = game(vec![Player::Eve], vec![1], vec![vec![0]]);
        assert!(solve_bruteforce(&odd).unwrap().adam_wins.contains(0));
    }

    #[test]
    fn forced_plays() {
        let g = game(vec![Player::Eve], vec![2], vec![vec![0]]);
        assert_eq!(play_outcome(&g, &trivial(&g, Player::Eve), &trivial(&g, Player::Adam), 0), Player::Eve);
        let g = game(vec![Player::Eve, Player::Adam], vec![1, 2], vec![vec![1], vec![0]]);
        let (s, t) = (trivial(&g, Player::Eve), trivial(&g, Player::Adam));
        assert_eq!(play_outcome(&g, &s, &t, 0), Player::Eve);
        let g = game(vec![Player::Eve, Player::Adam], vec![1, 3], vec![vec![1], vec![0]]);
        let (s, t) = (trivial(&g, Player::Eve), trivial(&g, Player::Adam));
        assert_eq!(play_outcome(&g, &s, &t, 1), Player::Adam);
    }

    #[test]
    fn choices_matter() {
        // Eve at 0 can go to an even sink (1) or an odd sink (2); Adam at 3 can too.
        let g = game(
            vec![Player::Eve, Player::Eve, Player::Eve, Player::Adam],
            vec![0, 2, 1, 0],
            vec![vec![1, 2], vec![1], vec![2], vec![1, 2]],
        );
        let sol = BruteForce::default().solve(&g).unwrap();
        assert_eq!(sol.region.eve_wins, VertexSet::from_vertices(4, [0, 1]));
        assert!(sol.region.is_partition());
        assert_eq!(sol.eve_witness[0].as_ref().unwrap().choice(0), Some(1));
    }

    #[test]
    fn enumeration_is_exhaustive_and_ordered() {
        let g = game(
            vec![Player::Eve, Player::Adam, Player::Eve],
            vec![0, 0, 0],
            vec![vec![0, 1, 2], vec![0], vec![1, 2]],
        );
        let all: Vec<_> = strategies(&g, Player::Eve).collect();
        assert_eq!(all.len() as u128, strategy_count(&g, Player::Eve));
        assert_eq!(all.len(), 6);
        assert_eq!((all[0].choice(0), all[0].choice(2)), (Some(0), Some(1)));
        assert_eq!((all[1].choice(0), all[1].choice(2)), (Some(0), Some(2)));
        assert_eq!((all[5].choice(0), all[5].choice(2)), (Some(2), Some(2)));
        assert_eq!(strategies(&g, Player::Adam).count(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let g = game(vec![Player::Eve; 2], vec![0, 0], vec![vec![0, 1], vec![0, 1]]);
        assert!(matches!(
            BruteForce::with_cap(3).solve(&g),
            Err(OracleError::TooLarge { player: Player::Eve, count: 4, cap: 3 })
        ));
    }

    #[test]
    fn strategy_validation() {
        let g = game(vec![Player::Eve, Player::Adam], vec![0, 0], vec![vec![1], vec![0]]);
        assert!(PositionalStrategy::new(&g, Player::Eve, vec![Some(1), None]).is_ok());
        assert!(PositionalStrategy::new(&g, Player::Eve, vec![Some(0), None]).is_err());
        assert!(PositionalStrategy::new(&g, Player::Eve, vec![Some(1), Some(0)]).is_err());
    }
}
