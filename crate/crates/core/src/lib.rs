//! Parity games, Zielonka's algorithm, universal trees, and value iteration
//! over an arbitrary universal tree.

pub mod bounds;
pub mod game;
pub mod measure;
pub mod oracle;
pub mod pgsolver;
pub mod tree;
pub mod zielonka;

pub use game::{generate_random_game, classify_cycle, Cycle, CycleParity, GameError, ParityGame, Player, Priority, Region, Vertex, VertexSet, Violation};
pub use measure::{lift_value, strategy_from_measure, transfer_signature, validate_signature, value_iteration, winning_region_from_measure, LiftStats, Measure, MeasureValue, Policy};
pub use oracle::{play_outcome, solve_bruteforce, PositionalStrategy};
pub use pgsolver::{parse_pgsolver, write_pgsolver, ParseError};
pub use tree::{embed, enumerate_trees, find_minimal_universal, is_universal, make_naive_tree, make_succinct_tree, signature_to_tree, LeafCode, LeafId, LevelMap, OrderedTree};
pub use zielonka::{extract_signature, solve_zielonka, tuple_compare, SignatureTuple, SubGame, TupleSignature};
